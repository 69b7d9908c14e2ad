//! Cycle-by-cycle simulation of the extended systolic array.
//!
//! Each micro-op (one register row pair) makes two passes through the
//! `n x n` grid: a sort or merge pass, then a compress pass fed back through
//! the loop-back registers. Inputs are skewed so PE `(r, c)` handles micro-op
//! `k` of a pass at `start + k + r + c`. The paired value instruction follows
//! one cycle after the last compress op at PE `(0, 0)` and replays the
//! routing each PE recorded for the key instruction.
//!
//! Lane mapping: element `i` of the first (west) chunk enters row `n-1-i`,
//! element `j` of the second (north) chunk enters column `j`. East outputs
//! are read bottom to top and south outputs left to right.

use serde::Serialize;

use crate::arch::{PlanKind, Sources};
use crate::stream::{check_ascending, Side, StreamError};
use crate::SENTINEL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Instr {
    Key,
    Value,
}

/// One micro-op of one pass of one instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Job {
    pub instr: Instr,
    pub uop: usize,
    /// 0 = sort/merge pass, 1 = compress pass.
    pub pass: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Routing {
    Initial,
    Forward,
    Switch,
    Combine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyState {
    Valid,
    /// Unused lane beyond the chunk length.
    Padding,
    /// Left behind when two equal keys were combined.
    Duplicate,
    /// Exceeded every key of the other chunk; excluded after the merge pass.
    Unmerged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TaggedKey {
    pub key: u32,
    pub source: Side,
    /// Has met a valid, larger-or-equal key from the other side (directly or
    /// through a key that had).
    pub merged: bool,
    /// Result of combining keys from both sides.
    pub both_sides: bool,
    pub state: KeyState,
}

impl TaggedKey {
    fn input(key: u32, source: Side, valid: bool) -> Self {
        TaggedKey {
            key: if valid { key } else { SENTINEL },
            source,
            merged: false,
            both_sides: false,
            state: if valid { KeyState::Valid } else { KeyState::Padding },
        }
    }

    pub fn is_valid(&self) -> bool {
        self.state == KeyState::Valid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueToken {
    pub value: f32,
    #[serde(skip)]
    pub sources: Sources,
    pub valid: bool,
}

impl ValueToken {
    fn invalid() -> Self {
        ValueToken { value: 0.0, sources: Sources::new(), valid: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Key(TaggedKey),
    Value(ValueToken),
}

impl Payload {
    fn key(&self) -> &TaggedKey {
        match self {
            Payload::Key(k) => k,
            Payload::Value(_) => panic!("expected a key token"),
        }
    }

    fn value(&self) -> &ValueToken {
        match self {
            Payload::Value(v) => v,
            Payload::Key(_) => panic!("expected a value token"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Slot {
    job: Job,
    payload: Payload,
}

/// Keys and values of one micro-op.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UopInput {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub va: Vec<f32>,
    pub vb: Vec<f32>,
}

impl UopInput {
    pub fn new(a: Vec<u32>, b: Vec<u32>, va: Vec<f32>, vb: Vec<f32>) -> Self {
        assert_eq!(a.len(), va.len(), "first side key/value lengths");
        assert_eq!(b.len(), vb.len(), "second side key/value lengths");
        UopInput { a, b, va, vb }
    }

    /// Keys with values `1, 2, 3, ...` on each side.
    pub fn keys(a: &[u32], b: &[u32]) -> Self {
        let ramp = |n: usize| (1..=n).map(|i| i as f32).collect();
        UopInput { a: a.to_vec(), b: b.to_vec(), va: ramp(a.len()), vb: ramp(b.len()) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CounterId {
    #[serde(rename = "W_IC")]
    WestIn,
    #[serde(rename = "N_IC")]
    NorthIn,
    #[serde(rename = "E_OC")]
    EastOut,
    #[serde(rename = "S_OC")]
    SouthOut,
}

impl CounterId {
    pub fn name(self) -> &'static str {
        match self {
            CounterId::WestIn => "W_IC",
            CounterId::NorthIn => "N_IC",
            CounterId::EastOut => "E_OC",
            CounterId::SouthOut => "S_OC",
        }
    }
}

/// A counter increment, stamped with the cycle the output left the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CounterUpdate {
    pub cycle: u64,
    pub counter: CounterId,
    pub uop: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeEvent {
    pub cycle: u64,
    pub row: usize,
    pub col: usize,
    pub job: Job,
    pub west: Payload,
    pub north: Payload,
    pub routing: Routing,
    pub east: Payload,
    pub south: Payload,
    /// At least one input carried data.
    pub active: bool,
}

/// Functional outcome of one micro-op as observed at the array edges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UopResult {
    pub first: Vec<u32>,
    pub second: Vec<u32>,
    pub ic: [usize; 2],
    pub oc: [usize; 2],
    pub first_values: Vec<f32>,
    pub second_values: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UopTrace {
    /// East edge after the first pass, bottom row first.
    pub pass1_east: Vec<TaggedKey>,
    /// South edge after the first pass, left column first.
    pub pass1_south: Vec<TaggedKey>,
    pub final_east: Vec<TaggedKey>,
    pub final_south: Vec<TaggedKey>,
    /// Cycle in which the first compress-pass output of the key instruction
    /// leaves the array.
    pub first_output_cycle: u64,
    /// Valid outputs occupy a prefix of both edges.
    pub compacted: bool,
    pub result: UopResult,
}

#[derive(Debug, Clone)]
pub struct CycleTrace {
    pub n: usize,
    pub kind: PlanKind,
    pub rows: usize,
    /// Cycles from input latch (cycle 0) until the last value output has
    /// landed in the deskew buffer, inclusive.
    pub total_cycles: u64,
    /// Per-PE events; empty unless recording was requested.
    pub events: Vec<PeEvent>,
    pub counter_updates: Vec<CounterUpdate>,
    pub uops: Vec<UopTrace>,
    /// Cycles in which PE (0, 0) had a scheduled operation.
    pub pe00_busy: Vec<u64>,
    /// Routing stored by each PE (row-major) for each micro-op and pass.
    pub routing: Vec<Vec<[Routing; 2]>>,
}

impl CycleTrace {
    /// Cycles in `[1, last busy]` in which PE (0, 0) had nothing scheduled.
    pub fn pe00_idle(&self) -> Vec<u64> {
        let Some(&last) = self.pe00_busy.last() else { return vec![] };
        (1..last).filter(|c| self.pe00_busy.binary_search(c).is_err()).collect()
    }

    pub fn active_ops(&self) -> usize {
        self.events.iter().filter(|e| e.active).count()
    }
}

struct Schedule {
    n: usize,
    rows: usize,
    value_start: u64,
}

impl Schedule {
    fn new(n: usize, rows: usize) -> Self {
        Schedule { n, rows, value_start: (n + 2 + rows) as u64 }
    }

    /// Cycle at which PE (0, 0) handles micro-op 0 of a pass.
    fn base(&self, instr: Instr, pass: usize) -> u64 {
        let n = self.n as u64;
        let v = match instr {
            Instr::Key => 1,
            Instr::Value => self.value_start,
        };
        v + pass as u64 * (n + 1)
    }

    fn job_at(&self, r: usize, c: usize, t: u64) -> Option<Job> {
        let offset = (r + c) as u64;
        let mut found = None;
        for instr in [Instr::Key, Instr::Value] {
            for pass in 0..2 {
                let b = self.base(instr, pass) + offset;
                if t >= b && t - b < self.rows as u64 {
                    assert!(found.is_none(), "PE ({r}, {c}) double-booked at cycle {t}");
                    found = Some(Job { instr, uop: (t - b) as usize, pass });
                }
            }
        }
        found
    }

    fn last_compute(&self) -> u64 {
        self.base(Instr::Value, 1) + self.rows as u64 - 1 + 2 * (self.n as u64 - 1)
    }
}

fn compare(mode: PlanKind, r: usize, c: usize, w: &TaggedKey, nn: &TaggedKey) -> (Routing, TaggedKey, TaggedKey) {
    if mode == PlanKind::Sort && r == c {
        return (Routing::Switch, *nn, *w);
    }
    let (wv, nv) = (w.is_valid(), nn.is_valid());
    if wv && nv && w.key == nn.key {
        let combined = TaggedKey {
            key: nn.key,
            source: nn.source,
            merged: mode == PlanKind::Zip,
            both_sides: w.source != nn.source || w.both_sides || nn.both_sides,
            state: KeyState::Valid,
        };
        let dup = TaggedKey { state: KeyState::Duplicate, merged: false, both_sides: false, ..*w };
        return (Routing::Combine, dup, combined);
    }
    // Invalid keys compare as +inf; two invalid keys forward.
    let forward = !wv || (nv && w.key > nn.key);
    let (larger, mut smaller) = if forward { (*w, *nn) } else { (*nn, *w) };
    if mode == PlanKind::Zip && wv && nv && (larger.source != smaller.source || larger.merged) {
        smaller.merged = true;
    }
    (if forward { Routing::Forward } else { Routing::Switch }, larger, smaller)
}

fn replay(routing: Routing, w: &ValueToken, nn: &ValueToken) -> (ValueToken, ValueToken) {
    match routing {
        Routing::Forward => (w.clone(), nn.clone()),
        Routing::Switch => (nn.clone(), w.clone()),
        Routing::Combine => {
            let mut sources = nn.sources.clone();
            sources.extend_from_slice(&w.sources);
            (ValueToken::invalid(), ValueToken { value: nn.value + w.value, sources, valid: true })
        }
        Routing::Initial => panic!("value replay found no stored routing"),
    }
}

fn validate(n: usize, kind: PlanKind, inputs: &[UopInput]) -> Result<(), StreamError> {
    if inputs.len() > n {
        return Err(StreamError::TooLong { len: inputs.len(), capacity: n });
    }
    for u in inputs {
        for (keys, vals, side) in [(&u.a, &u.va, Side::First), (&u.b, &u.vb, Side::Second)] {
            if keys.len() > n {
                return Err(StreamError::TooLong { len: keys.len(), capacity: n });
            }
            assert_eq!(keys.len(), vals.len(), "key/value length mismatch");
            if let Some(pos) = keys.iter().position(|&k| k == SENTINEL) {
                return Err(StreamError::SentinelKey { pos });
            }
            if kind == PlanKind::Zip {
                check_ascending(keys, side)?;
            }
        }
    }
    Ok(())
}

#[derive(Default, Clone)]
struct Edges {
    pass1_east: Vec<Option<TaggedKey>>,
    pass1_south: Vec<Option<TaggedKey>>,
    final_east: Vec<Option<TaggedKey>>,
    final_south: Vec<Option<TaggedKey>>,
    val_east: Vec<Option<ValueToken>>,
    val_south: Vec<Option<ValueToken>>,
    drop_east: Vec<bool>,
    drop_south: Vec<bool>,
    first_output: Option<u64>,
}

/// Runs a key instruction and its paired value instruction over `inputs`
/// (one micro-op per register row pair).
pub fn run_pair(n: usize, kind: PlanKind, inputs: &[UopInput], record: bool) -> Result<CycleTrace, StreamError> {
    assert!(n >= 2, "array dimension must be at least 2");
    validate(n, kind, inputs)?;
    let rows = inputs.len();
    let mut trace = CycleTrace {
        n,
        kind,
        rows,
        total_cycles: 0,
        events: vec![],
        counter_updates: vec![],
        uops: vec![],
        pe00_busy: vec![],
        routing: vec![vec![[Routing::Initial; 2]; rows]; n * n],
    };
    if rows == 0 {
        return Ok(trace);
    }

    let sched = Schedule::new(n, rows);
    let blank = Edges {
        pass1_east: vec![None; n],
        pass1_south: vec![None; n],
        final_east: vec![None; n],
        final_south: vec![None; n],
        val_east: vec![None; n],
        val_south: vec![None; n],
        drop_east: vec![false; n],
        drop_south: vec![false; n],
        first_output: None,
    };
    let mut edges = vec![blank; rows];

    let feed = |job: Job, lane: usize, side: Side| -> Payload {
        let u = &inputs[job.uop];
        let (idx, keys, vals) = match side {
            Side::First => (n - 1 - lane, &u.a, &u.va),
            Side::Second => (lane, &u.b, &u.vb),
        };
        let valid = idx < keys.len();
        match job.instr {
            Instr::Key => Payload::Key(TaggedKey::input(if valid { keys[idx] } else { 0 }, side, valid)),
            Instr::Value if valid => Payload::Value(ValueToken {
                value: vals[idx],
                sources: smallvec::smallvec![crate::arch::Src { side, pos: idx as u8 }],
                valid: true,
            }),
            Instr::Value => Payload::Value(ValueToken::invalid()),
        }
    };

    let mut east: Vec<Option<Slot>> = vec![None; n * n];
    let mut south: Vec<Option<Slot>> = vec![None; n * n];
    let mut loop_e: Vec<Option<Slot>> = vec![None; n];
    let mut loop_s: Vec<Option<Slot>> = vec![None; n];
    let end = sched.last_compute() + 1;
    let mut last_landing = 0;

    for t in 1..=end {
        let mut new_east: Vec<Option<Slot>> = vec![None; n * n];
        let mut new_south: Vec<Option<Slot>> = vec![None; n * n];
        let mut new_loop_e: Vec<Option<Slot>> = vec![None; n];
        let mut new_loop_s: Vec<Option<Slot>> = vec![None; n];

        // Edge registers written last cycle: loop back or land in the
        // deskew buffer.
        for lane in 0..n {
            for (is_east, slot) in [(true, east[lane * n + n - 1].take()), (false, south[(n - 1) * n + lane].take())] {
                let Some(mut slot) = slot else { continue };
                let job = slot.job;
                let e = &mut edges[job.uop];
                match (job.instr, job.pass, &mut slot.payload) {
                    (Instr::Key, 0, Payload::Key(k)) => {
                        let exit_counters: &[CounterId] = match (kind, k.state) {
                            (PlanKind::Sort, KeyState::Padding) => &[],
                            (PlanKind::Sort, _) => {
                                if k.source == Side::First {
                                    &[CounterId::WestIn]
                                } else {
                                    &[CounterId::NorthIn]
                                }
                            }
                            (PlanKind::Zip, KeyState::Valid) if k.merged => {
                                if k.both_sides {
                                    &[CounterId::WestIn, CounterId::NorthIn]
                                } else if k.source == Side::First {
                                    &[CounterId::WestIn]
                                } else {
                                    &[CounterId::NorthIn]
                                }
                            }
                            _ => &[],
                        };
                        for &counter in exit_counters {
                            trace.counter_updates.push(CounterUpdate { cycle: t, counter, uop: job.uop });
                        }
                        if is_east {
                            e.pass1_east[lane] = Some(*k);
                        } else {
                            e.pass1_south[lane] = Some(*k);
                        }
                        if kind == PlanKind::Zip && k.state == KeyState::Valid && !k.merged {
                            k.state = KeyState::Unmerged;
                            if is_east {
                                e.drop_east[lane] = true;
                            } else {
                                e.drop_south[lane] = true;
                            }
                        }
                    }
                    (Instr::Value, 0, Payload::Value(v)) => {
                        let dropped = if is_east { e.drop_east[lane] } else { e.drop_south[lane] };
                        if dropped {
                            *v = ValueToken::invalid();
                        }
                    }
                    (Instr::Key, 1, Payload::Key(k)) => {
                        let compute = t - 1;
                        e.first_output = Some(e.first_output.map_or(compute, |f| f.min(compute)));
                        if k.is_valid() {
                            let counter = if is_east { CounterId::EastOut } else { CounterId::SouthOut };
                            trace.counter_updates.push(CounterUpdate { cycle: t, counter, uop: job.uop });
                        }
                        if is_east {
                            e.final_east[lane] = Some(*k);
                        } else {
                            e.final_south[lane] = Some(*k);
                        }
                    }
                    (Instr::Value, 1, Payload::Value(v)) => {
                        last_landing = last_landing.max(t);
                        if is_east {
                            e.val_east[lane] = Some(v.clone());
                        } else {
                            e.val_south[lane] = Some(v.clone());
                        }
                    }
                    _ => unreachable!("payload does not match its job"),
                }
                if job.pass == 0 {
                    slot.job.pass = 1;
                    if is_east {
                        new_loop_e[lane] = Some(slot);
                    } else {
                        new_loop_s[lane] = Some(slot);
                    }
                }
            }
        }

        for r in 0..n {
            for c in 0..n {
                let Some(job) = sched.job_at(r, c, t) else { continue };
                let take = |slot: Option<Slot>, what: &str| -> Payload {
                    let slot = slot.unwrap_or_else(|| panic!("PE ({r}, {c}) cycle {t}: no {what} input"));
                    assert_eq!(slot.job, job, "PE ({r}, {c}) cycle {t}: {what} input from another job");
                    slot.payload
                };
                let w = match (c, job.pass) {
                    (0, 0) => feed(job, r, Side::First),
                    (0, _) => take(loop_e[r].take(), "loop-back west"),
                    _ => take(east[r * n + c - 1].take(), "west"),
                };
                let nn = match (r, job.pass) {
                    (0, 0) => feed(job, c, Side::Second),
                    (0, _) => take(loop_s[c].take(), "loop-back north"),
                    _ => take(south[(r - 1) * n + c].take(), "north"),
                };
                let (routing, e_out, s_out) = match job.instr {
                    Instr::Key => {
                        let mode = if job.pass == 0 { kind } else { PlanKind::Sort };
                        let (routing, e, s) = compare(mode, r, c, w.key(), nn.key());
                        trace.routing[r * n + c][job.uop][job.pass] = routing;
                        (routing, Payload::Key(e), Payload::Key(s))
                    }
                    Instr::Value => {
                        let routing = trace.routing[r * n + c][job.uop][job.pass];
                        let (e, s) = replay(routing, w.value(), nn.value());
                        (routing, Payload::Value(e), Payload::Value(s))
                    }
                };
                if r == 0 && c == 0 {
                    trace.pe00_busy.push(t);
                }
                if record {
                    let active = match (&w, &nn) {
                        (Payload::Key(a), Payload::Key(b)) => a.state != KeyState::Padding || b.state != KeyState::Padding,
                        (Payload::Value(a), Payload::Value(b)) => a.valid || b.valid,
                        _ => unreachable!(),
                    };
                    trace.events.push(PeEvent {
                        cycle: t,
                        row: r,
                        col: c,
                        job,
                        west: w,
                        north: nn,
                        routing,
                        east: e_out.clone(),
                        south: s_out.clone(),
                        active,
                    });
                }
                new_east[r * n + c] = Some(Slot { job, payload: e_out });
                new_south[r * n + c] = Some(Slot { job, payload: s_out });
            }
        }
        east = new_east;
        south = new_south;
        loop_e = new_loop_e;
        loop_s = new_loop_s;
    }

    trace.total_cycles = last_landing + 1;
    for (k, e) in edges.into_iter().enumerate() {
        trace.uops.push(finish_uop(n, k, e, &trace.counter_updates));
    }
    Ok(trace)
}

fn finish_uop(n: usize, uop: usize, e: Edges, updates: &[CounterUpdate]) -> UopTrace {
    let unwrap_keys = |v: Vec<Option<TaggedKey>>| -> Vec<TaggedKey> { v.into_iter().map(|k| k.expect("edge output")).collect() };
    let unwrap_vals = |v: Vec<Option<ValueToken>>| -> Vec<ValueToken> { v.into_iter().map(|k| k.expect("edge output")).collect() };
    let mut pass1_east = unwrap_keys(e.pass1_east);
    pass1_east.reverse();
    let pass1_south = unwrap_keys(e.pass1_south);
    let mut final_east = unwrap_keys(e.final_east);
    final_east.reverse();
    let final_south = unwrap_keys(e.final_south);
    let mut val_east = unwrap_vals(e.val_east);
    val_east.reverse();
    let val_south = unwrap_vals(e.val_south);

    let prefix = |keys: &[TaggedKey]| keys.iter().take_while(|k| k.is_valid()).count();
    let compacted = prefix(&final_east) == final_east.iter().filter(|k| k.is_valid()).count()
        && prefix(&final_south) == final_south.iter().filter(|k| k.is_valid()).count();
    for (keys, vals) in [(&final_east, &val_east), (&final_south, &val_south)] {
        for (k, v) in keys.iter().zip(vals) {
            assert_eq!(k.is_valid(), v.valid, "value lane validity diverged from its key");
        }
    }
    let valid_keys = |keys: &[TaggedKey]| keys.iter().filter(|k| k.is_valid()).map(|k| k.key).collect::<Vec<_>>();
    let valid_vals = |vals: &[ValueToken]| vals.iter().filter(|v| v.valid).map(|v| v.value).collect::<Vec<_>>();
    let count = |id: CounterId| updates.iter().filter(|u| u.uop == uop && u.counter == id).count();
    debug_assert_eq!(final_east.len(), n);
    UopTrace {
        result: UopResult {
            first: valid_keys(&final_east),
            second: valid_keys(&final_south),
            ic: [count(CounterId::WestIn), count(CounterId::NorthIn)],
            oc: [count(CounterId::EastOut), count(CounterId::SouthOut)],
            first_values: valid_vals(&val_east),
            second_values: valid_vals(&val_south),
        },
        pass1_east,
        pass1_south,
        final_east,
        final_south,
        first_output_cycle: e.first_output.expect("compress pass produced output"),
        compacted,
    }
}

/// Single micro-op sort pair with full event recording.
pub fn trace_sort(n: usize, input: &UopInput) -> Result<CycleTrace, StreamError> {
    run_pair(n, PlanKind::Sort, std::slice::from_ref(input), true)
}

/// Single micro-op merge pair with full event recording.
pub fn trace_zip(n: usize, input: &UopInput) -> Result<CycleTrace, StreamError> {
    run_pair(n, PlanKind::Zip, std::slice::from_ref(input), true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(ks: &[TaggedKey]) -> Vec<Option<u32>> {
        ks.iter().map(|k| k.is_valid().then_some(k.key)).collect()
    }

    #[test]
    fn sort_north_chunk() {
        let t = trace_sort(3, &UopInput::keys(&[], &[5, 8, 5])).unwrap();
        let u = &t.uops[0];
        assert_eq!(keys(&u.pass1_east), vec![Some(5), None, Some(8)]);
        assert_eq!(u.pass1_east[1].state, KeyState::Duplicate);
        assert_eq!(keys(&u.final_south), vec![Some(5), Some(8), None]);
        assert_eq!(u.result.oc, [0, 2]);
        assert_eq!(u.result.ic, [0, 3]);
        assert_eq!(u.first_output_cycle, 7);
        assert_eq!(u.result.second_values, vec![4.0, 2.0]);
    }

    #[test]
    fn zip_excludes_the_unmerged_key() {
        let t = trace_zip(3, &UopInput::keys(&[3, 5, 9], &[2, 5, 8])).unwrap();
        let u = &t.uops[0];
        assert_eq!(u.result.first, vec![2, 3, 5]);
        assert_eq!(u.result.second, vec![8]);
        assert_eq!(u.result.ic, [2, 3]);
        let nine = u.pass1_east.iter().chain(&u.pass1_south).find(|k| k.key == 9).unwrap();
        assert!(!nine.merged);
        let stamp = t.counter_updates.iter().map(|c| c.cycle).min().unwrap();
        assert!(stamp > 0);
    }

    #[test]
    fn empty_chunks_are_inactive() {
        for t in [trace_sort(3, &UopInput::keys(&[], &[])), trace_zip(3, &UopInput::keys(&[], &[]))] {
            let t = t.unwrap();
            assert_eq!(t.active_ops(), 0);
            assert!(t.counter_updates.is_empty());
        }
    }

    #[test]
    fn pe00_stalls_at_pass_transitions() {
        let inputs = vec![UopInput::keys(&[1, 2], &[3]); 3];
        let t = run_pair(3, PlanKind::Sort, &inputs, false).unwrap();
        assert_eq!(t.pe00_idle(), vec![4, 11]);
        assert_eq!(t.pe00_busy, vec![1, 2, 3, 5, 6, 7, 8, 9, 10, 12, 13, 14]);
    }

    #[test]
    fn rejects_sentinel_and_oversized_input() {
        assert!(trace_sort(3, &UopInput::keys(&[SENTINEL], &[])).is_err());
        assert!(trace_sort(2, &UopInput::keys(&[1, 2, 3], &[])).is_err());
        assert!(trace_zip(3, &UopInput::keys(&[2, 1], &[])).is_err());
    }
}
