//! Key-value streams, chunks and partitions, with brute-force oracles for
//! chunk sorting and chunk merging.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::CsrMatrix;
use crate::SENTINEL;

/// Which of the two chunks of a pair an element came from. `First` is the
/// west / `td1` side, `Second` the north / `td2` side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("chunk length {len} exceeds capacity {capacity}")]
    TooLong { len: usize, capacity: usize },
    #[error("{side:?} chunk not strictly ascending at position {pos}")]
    Unsorted { side: Side, pos: usize },
    #[error("sentinel key at position {pos}, inside the valid length")]
    SentinelKey { pos: usize },
}

/// Up to `capacity` key-value pairs. Lanes at and beyond `len` hold the
/// sentinel key and a zero value.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyValueChunk {
    keys: Vec<u32>,
    values: Vec<f32>,
    len: usize,
}

impl KeyValueChunk {
    pub fn empty(capacity: usize) -> Self {
        KeyValueChunk { keys: vec![SENTINEL; capacity], values: vec![0.0; capacity], len: 0 }
    }

    pub fn from_pairs(capacity: usize, pairs: &[(u32, f32)]) -> Result<Self, StreamError> {
        if pairs.len() > capacity {
            return Err(StreamError::TooLong { len: pairs.len(), capacity });
        }
        if let Some(pos) = pairs.iter().position(|p| p.0 == SENTINEL) {
            return Err(StreamError::SentinelKey { pos });
        }
        let mut c = Self::empty(capacity);
        for (i, &(k, v)) in pairs.iter().enumerate() {
            c.keys[i] = k;
            c.values[i] = v;
        }
        c.len = pairs.len();
        Ok(c)
    }

    /// Keys only, values set to zero.
    pub fn from_keys(capacity: usize, keys: &[u32]) -> Result<Self, StreamError> {
        let pairs: Vec<(u32, f32)> = keys.iter().map(|&k| (k, 0.0)).collect();
        Self::from_pairs(capacity, &pairs)
    }

    pub fn capacity(&self) -> usize {
        self.keys.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn keys(&self) -> &[u32] {
        &self.keys[..self.len]
    }

    pub fn values(&self) -> &[f32] {
        &self.values[..self.len]
    }

    /// All lanes including sentinel padding.
    pub fn lanes(&self) -> &[u32] {
        &self.keys
    }

    pub fn pairs(&self) -> Vec<(u32, f32)> {
        self.keys().iter().copied().zip(self.values().iter().copied()).collect()
    }

    pub fn is_sorted(&self) -> bool {
        self.keys().windows(2).all(|w| w[0] < w[1])
    }

    pub(crate) fn check_sorted(&self, side: Side) -> Result<(), StreamError> {
        check_ascending(self.keys(), side)
    }
}

pub(crate) fn check_ascending(keys: &[u32], side: Side) -> Result<(), StreamError> {
    match keys.windows(2).position(|w| w[0] >= w[1]) {
        Some(p) => Err(StreamError::Unsorted { side, pos: p + 1 }),
        None => Ok(()),
    }
}

/// Order in which the values of one key's duplicates are folded together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AccumOrder {
    /// Lowest original position first.
    #[default]
    Ascending,
    /// Highest original position first.
    Descending,
}

/// The intermediate products of row `i` of `A x B`, `j`-major then `k`.
pub fn expand_row(a: &CsrMatrix, b: &CsrMatrix, i: usize) -> Vec<(u32, f32)> {
    let (acols, avals) = a.row(i);
    let mut out = Vec::new();
    for (&j, &av) in acols.iter().zip(avals) {
        let (bcols, bvals) = b.row(j as usize);
        out.extend(bcols.iter().zip(bvals).map(|(&k, &bv)| (k, av * bv)));
    }
    out
}

/// Sorts a chunk and combines duplicate keys, folding their values in
/// ascending original position.
pub fn chunk_sort_oracle(c: &KeyValueChunk) -> KeyValueChunk {
    chunk_sort_oracle_ordered(c, AccumOrder::Ascending)
}

pub fn chunk_sort_oracle_ordered(c: &KeyValueChunk, order: AccumOrder) -> KeyValueChunk {
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &k) in c.keys().iter().enumerate() {
        groups.entry(k).or_default().push(i);
    }
    let pairs: Vec<(u32, f32)> = groups
        .into_iter()
        .map(|(k, mut pos)| {
            if order == AccumOrder::Descending {
                pos.reverse();
            }
            let v = pos[1..].iter().fold(c.values[pos[0]], |acc, &p| acc + c.values[p]);
            (k, v)
        })
        .collect();
    KeyValueChunk::from_pairs(c.capacity(), &pairs).expect("sorting cannot grow a chunk")
}

/// Outcome of merging one chunk pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeStep {
    pub merged: Vec<(u32, f32)>,
    pub consumed_a: usize,
    pub consumed_b: usize,
}

/// Merges the mergeable prefix of two sorted chunks: an element is
/// mergeable when some key of the other chunk is greater or equal. If either
/// chunk is empty nothing is mergeable.
pub fn chunk_merge_oracle(a: &KeyValueChunk, b: &KeyValueChunk) -> Result<MergeStep, StreamError> {
    a.check_sorted(Side::First)?;
    b.check_sorted(Side::Second)?;
    Ok(merge_slices(&a.pairs(), &b.pairs()))
}

fn merge_slices(a: &[(u32, f32)], b: &[(u32, f32)]) -> MergeStep {
    let (Some(&(max_a, _)), Some(&(max_b, _))) = (a.last(), b.last()) else {
        return MergeStep { merged: vec![], consumed_a: 0, consumed_b: 0 };
    };
    let ca = a.partition_point(|p| p.0 <= max_b);
    let cb = b.partition_point(|p| p.0 <= max_a);
    let merged = merge_runs(&a[..ca], &b[..cb]);
    MergeStep { merged, consumed_a: ca, consumed_b: cb }
}

fn merge_runs(a: &[(u32, f32)], b: &[(u32, f32)]) -> Vec<(u32, f32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ka, va) = a[i];
        let (kb, vb) = b[j];
        if ka < kb {
            out.push(a[i]);
            i += 1;
        } else if kb < ka {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((ka, va + vb));
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// One sorted run of a stream.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Partition {
    entries: Vec<(u32, f32)>,
}

impl Partition {
    pub fn new(entries: Vec<(u32, f32)>) -> Result<Self, StreamError> {
        let keys: Vec<u32> = entries.iter().map(|e| e.0).collect();
        check_ascending(&keys, Side::First)?;
        Ok(Partition { entries })
    }

    pub fn entries(&self) -> &[(u32, f32)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Splits into chunks of at most `r` elements.
    pub fn chunks(&self, r: usize) -> Vec<KeyValueChunk> {
        self.entries
            .chunks(r)
            .map(|c| KeyValueChunk::from_pairs(r, c).expect("chunk fits"))
            .collect()
    }
}

/// Two-pointer merge of two runs, accumulating equal keys.
pub fn partition_merge_oracle(p: &Partition, q: &Partition) -> Partition {
    Partition { entries: merge_runs(&p.entries, &q.entries) }
}

/// Merges two runs one chunk window at a time, the way the merge
/// instructions do: each step merges the current windows, advances each side
/// by its consumed count, and the remaining tail is copied once either side
/// runs out. Returns the merged run and the number of chunk-merge steps.
pub fn merge_partitions_chunked(p: &Partition, q: &Partition, r: usize) -> (Partition, u64) {
    assert!(r > 0, "chunk capacity must be positive");
    let (a, b) = (&p.entries, &q.entries);
    let (mut i, mut j, mut steps) = (0, 0, 0u64);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        let step = merge_slices(&a[i..(i + r).min(a.len())], &b[j..(j + r).min(b.len())]);
        out.extend(step.merged);
        i += step.consumed_a;
        j += step.consumed_b;
        steps += 1;
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    (Partition { entries: out }, steps)
}
