//! Text and JSON renderings of a [`CycleTrace`].

use std::collections::BTreeMap;
use std::fmt::Write;

use serde_json::{json, Value};

use super::trace::{CycleTrace, Instr, KeyState, Payload, PeEvent, Routing, TaggedKey, UopTrace};
use crate::arch::PlanKind;
use crate::stream::Side;

/// Short token form: `5w` / `8n` valid keys (`*` merged, `+` combined
/// across sides), `d` duplicate, `x` unmerged, `-` padding. Values print as
/// numbers or `-`.
pub fn token(p: &Payload) -> String {
    match p {
        Payload::Key(k) => key_token(k),
        Payload::Value(v) if v.valid => format!("{:?}", v.value),
        Payload::Value(_) => "-".into(),
    }
}

pub fn key_token(k: &TaggedKey) -> String {
    match k.state {
        KeyState::Padding => "-".into(),
        KeyState::Duplicate => "d".into(),
        KeyState::Unmerged => "x".into(),
        KeyState::Valid => {
            let side = if k.source == Side::First { 'w' } else { 'n' };
            let mut s = format!("{}{}", k.key, side);
            if k.merged {
                s.push('*');
            }
            if k.both_sides {
                s.push('+');
            }
            s
        }
    }
}

fn routing_letter(r: Routing) -> char {
    match r {
        Routing::Initial => 'I',
        Routing::Forward => 'F',
        Routing::Switch => 'S',
        Routing::Combine => 'C',
    }
}

fn job_label(e: &PeEvent) -> String {
    let i = if e.job.instr == Instr::Key { 'K' } else { 'V' };
    format!("{i}{}.{}", e.job.uop, e.job.pass)
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    if items.is_empty() {
        return "-".into();
    }
    items.iter().map(f).collect::<Vec<_>>().join(" ")
}

fn kind_name(k: PlanKind) -> &'static str {
    match k {
        PlanKind::Sort => "sort",
        PlanKind::Zip => "zip",
    }
}

fn write_uop(out: &mut String, k: usize, u: &UopTrace) {
    let r = &u.result;
    let _ = writeln!(out, "uop {k}");
    let _ = writeln!(out, "  pass-1 east (bottom to top): {}", join(&u.pass1_east, key_token));
    let _ = writeln!(out, "  pass-1 south:                {}", join(&u.pass1_south, key_token));
    let _ = writeln!(out, "  final east (bottom to top):  {}", join(&u.final_east, key_token));
    let _ = writeln!(out, "  final south:                 {}", join(&u.final_south, key_token));
    let _ = writeln!(out, "  first: {}  values: {}", join(&r.first, u32::to_string), join(&r.first_values, |v| format!("{v:?}")));
    let _ = writeln!(out, "  second: {}  values: {}", join(&r.second, u32::to_string), join(&r.second_values, |v| format!("{v:?}")));
    let _ = writeln!(out, "  counters: W_IC={} N_IC={} E_OC={} S_OC={}", r.ic[0], r.ic[1], r.oc[0], r.oc[1]);
    let _ = writeln!(out, "  first output cycle: {}", u.first_output_cycle);
}

/// Per-cycle grid of PE operations followed by counter events and a
/// per-micro-op summary. Cells read `<job> <routing> <west>|<north>`, where
/// the job is `K`/`V` (key/value instruction), micro-op and pass.
pub fn render_text(t: &CycleTrace) -> String {
    let n = t.n;
    let mut out = String::new();
    let _ = writeln!(out, "{} n={} rows={}", kind_name(t.kind), n, t.rows);
    let mut by_cycle: BTreeMap<u64, Vec<&PeEvent>> = BTreeMap::new();
    for e in &t.events {
        by_cycle.entry(e.cycle).or_default().push(e);
    }
    let mut updates: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    for u in &t.counter_updates {
        updates.entry(u.cycle).or_default().push(format!("{} += 1 (uop {})", u.counter.name(), u.uop));
    }
    let cycles: Vec<u64> = by_cycle.keys().chain(updates.keys()).copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let cells: Vec<Vec<String>> = cycles
        .iter()
        .map(|c| {
            let mut grid = vec![".".to_string(); n * n];
            for e in by_cycle.get(c).into_iter().flatten() {
                grid[e.row * n + e.col] =
                    format!("{} {} {}|{}", job_label(e), routing_letter(e.routing), token(&e.west), token(&e.north));
            }
            grid
        })
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1).max(3);
    for (ci, c) in cycles.iter().enumerate() {
        let _ = writeln!(out, "-- cycle {c} --");
        for r in 0..n {
            let row: Vec<String> = (0..n).map(|col| format!("{:<width$}", cells[ci][r * n + col])).collect();
            let _ = writeln!(out, "  r{r}  {}", row.join("  ").trim_end());
        }
        for u in updates.get(c).into_iter().flatten() {
            let _ = writeln!(out, "  {u}");
        }
    }
    let _ = writeln!(out, "== summary ==");
    for (k, u) in t.uops.iter().enumerate() {
        write_uop(&mut out, k, u);
    }
    let _ = writeln!(out, "total cycles: {}", t.total_cycles);
    let _ = writeln!(out, "PE(0,0) idle cycles: {}", join(&t.pe00_idle(), u64::to_string));
    out
}

fn counter_json(t: &CycleTrace) -> Vec<Value> {
    t.counter_updates
        .iter()
        .map(|u| json!({"cycle": u.cycle, "counter": u.counter, "uop": u.uop}))
        .collect()
}

/// Machine-readable event stream.
pub fn render_json(t: &CycleTrace) -> Value {
    let events: Vec<Value> = t
        .events
        .iter()
        .map(|e| {
            json!({
                "cycle": e.cycle,
                "pe": [e.row, e.col],
                "instr": e.job.instr,
                "uop": e.job.uop,
                "pass": e.job.pass,
                "inputs": {"west": token(&e.west), "north": token(&e.north)},
                "decision": e.routing,
                "outputs": {"east": token(&e.east), "south": token(&e.south)},
                "active": e.active,
            })
        })
        .collect();
    let uops: Vec<Value> = t
        .uops
        .iter()
        .map(|u| {
            let toks = |ks: &[TaggedKey]| ks.iter().map(key_token).collect::<Vec<_>>();
            json!({
                "pass1_east": toks(&u.pass1_east),
                "pass1_south": toks(&u.pass1_south),
                "final_east": toks(&u.final_east),
                "final_south": toks(&u.final_south),
                "first": u.result.first,
                "second": u.result.second,
                "first_values": u.result.first_values,
                "second_values": u.result.second_values,
                "ic": u.result.ic,
                "oc": u.result.oc,
                "first_output_cycle": u.first_output_cycle,
            })
        })
        .collect();
    json!({
        "schema": 1,
        "kind": kind_name(t.kind),
        "n": t.n,
        "rows": t.rows,
        "total_cycles": t.total_cycles,
        "pe00_idle": t.pe00_idle(),
        "events": events,
        "counters": counter_json(t),
        "uops": uops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systolic::{trace_sort, trace_zip, UopInput};

    #[test]
    fn text_is_deterministic_and_mentions_events() {
        let t = trace_zip(3, &UopInput::keys(&[3, 5, 9], &[2, 5, 8])).unwrap();
        let a = render_text(&t);
        let b = render_text(&trace_zip(3, &UopInput::keys(&[3, 5, 9], &[2, 5, 8])).unwrap());
        assert_eq!(a, b);
        assert!(a.contains("-- cycle 4 --"));
        assert!(a.contains("x"));
        assert!(a.contains("W_IC += 1"));
    }

    #[test]
    fn json_has_schema_and_events() {
        let t = trace_sort(3, &UopInput::keys(&[], &[5, 8, 5])).unwrap();
        let j = render_json(&t);
        assert_eq!(j["schema"], 1);
        assert_eq!(j["uops"][0]["final_south"], json!(["5n", "8n", "d"]));
        assert_eq!(j["events"][0]["cycle"], 1);
        assert_eq!(j["events"][0]["pe"], json!([0, 0]));
    }
}
