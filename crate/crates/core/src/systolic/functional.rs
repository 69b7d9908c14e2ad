//! Direct (non-cycle) evaluation of one row pair of a key instruction, plus
//! replay of the resulting plan on values.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::arch::{PlanKind, PlanRow, Sources, Src};
use crate::stream::{check_ascending, Side, StreamError};

/// Keys and counters produced for one register row pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairResult {
    pub kind: PlanKind,
    /// Valid keys for the first register (sentinel padding not included).
    pub first: Vec<u32>,
    pub second: Vec<u32>,
    /// Input counters `[IC0, IC1]`.
    pub ic: [usize; 2],
    /// Output counters `[OC0, OC1]`.
    pub oc: [usize; 2],
    pub plan: PlanRow,
}

fn check_len(len: usize, r: usize) -> Result<(), StreamError> {
    if len > r {
        return Err(StreamError::TooLong { len, capacity: r });
    }
    Ok(())
}

/// Groups one side's lanes by key. Duplicates of the first side fold from
/// the highest position down, the second side from the lowest up, which is
/// the order the array's combine chains produce.
fn sort_side(keys: &[u32], side: Side) -> (Vec<u32>, Vec<Sources>) {
    let mut groups: BTreeMap<u32, Sources> = BTreeMap::new();
    for (i, &k) in keys.iter().enumerate() {
        groups.entry(k).or_default().push(Src { side, pos: i as u8 });
    }
    groups
        .into_iter()
        .map(|(k, mut srcs)| {
            if side == Side::First {
                srcs.reverse();
            }
            (k, srcs)
        })
        .unzip()
}

/// Sorts each side independently, combining duplicates.
pub fn sort_functional(r: usize, a: &[u32], b: &[u32]) -> Result<PairResult, StreamError> {
    check_len(a.len(), r)?;
    check_len(b.len(), r)?;
    let (first, first_src) = sort_side(a, Side::First);
    let (second, second_src) = sort_side(b, Side::Second);
    Ok(PairResult {
        kind: PlanKind::Sort,
        ic: [a.len(), b.len()],
        oc: [first.len(), second.len()],
        first,
        second,
        plan: PlanRow {
            la: a.len(),
            lb: b.len(),
            first: first_src,
            second: second_src,
            consumed_a: a.len(),
            consumed_b: b.len(),
        },
    })
}

/// Merges the mergeable prefixes of two sorted sides. The merged list fills
/// the first register and spills into the second.
pub fn zip_functional(r: usize, a: &[u32], b: &[u32]) -> Result<PairResult, StreamError> {
    check_len(a.len(), r)?;
    check_len(b.len(), r)?;
    check_ascending(a, Side::First)?;
    check_ascending(b, Side::Second)?;
    let (ca, cb) = match (a.last(), b.last()) {
        (Some(&ma), Some(&mb)) => (a.partition_point(|&k| k <= mb), b.partition_point(|&k| k <= ma)),
        _ => (0, 0),
    };
    let mut keys = Vec::with_capacity(ca + cb);
    let mut srcs: Vec<Sources> = Vec::with_capacity(ca + cb);
    let (mut i, mut j) = (0, 0);
    while i < ca || j < cb {
        let take_a = j == cb || (i < ca && a[i] <= b[j]);
        let take_b = i == ca || (j < cb && b[j] <= a[i]);
        let mut s = Sources::new();
        if take_a {
            keys.push(a[i]);
            s.push(Src::first(i));
            i += 1;
        }
        if take_b {
            if !take_a {
                keys.push(b[j]);
            }
            s.push(Src::second(j));
            j += 1;
        }
        srcs.push(s);
    }
    let split = keys.len().min(r);
    let second_src = srcs.split_off(split);
    let second = keys.split_off(split);
    Ok(PairResult {
        kind: PlanKind::Zip,
        ic: [ca, cb],
        oc: [keys.len(), second.len()],
        first: keys,
        second,
        plan: PlanRow { la: a.len(), lb: b.len(), first: srcs, second: second_src, consumed_a: ca, consumed_b: cb },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("plan expects lengths ({expect_a}, {expect_b}), values have ({got_a}, {got_b})")]
pub struct PlanMismatch {
    pub expect_a: usize,
    pub expect_b: usize,
    pub got_a: usize,
    pub got_b: usize,
}

fn fold(srcs: &Sources, va: &[f32], vb: &[f32]) -> f32 {
    let get = |s: &Src| match s.side {
        Side::First => va[s.pos as usize],
        Side::Second => vb[s.pos as usize],
    };
    srcs[1..].iter().fold(get(&srcs[0]), |acc, s| acc + get(s))
}

/// Shuffles and accumulates values according to a plan row.
pub fn apply_plan(plan: &PlanRow, va: &[f32], vb: &[f32]) -> Result<(Vec<f32>, Vec<f32>), PlanMismatch> {
    if va.len() != plan.la || vb.len() != plan.lb {
        return Err(PlanMismatch { expect_a: plan.la, expect_b: plan.lb, got_a: va.len(), got_b: vb.len() });
    }
    let first = plan.first.iter().map(|s| fold(s, va, vb)).collect();
    let second = plan.second.iter().map(|s| fold(s, va, vb)).collect();
    Ok((first, second))
}
