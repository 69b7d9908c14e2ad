//! Architectural state: matrix, vector and counter registers, the reorder
//! plan left by the last key instruction, and flat memory.

use serde::Serialize;
use serde_json::{json, Value};
use smallvec::SmallVec;
use thiserror::Error;

use crate::counters::OpCounters;
use crate::stream::Side;
use crate::{MAX_R, MIN_R};

pub const NUM_MATRIX_REGS: usize = 16;
pub const NUM_VECTOR_REGS: usize = 32;

/// R x R raw 32-bit lanes, interpreted as keys or f32 bits per instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixReg {
    r: usize,
    lanes: Vec<u32>,
}

impl MatrixReg {
    pub fn new(r: usize) -> Self {
        MatrixReg { r, lanes: vec![0; r * r] }
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.lanes[i * self.r..(i + 1) * self.r]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.lanes[i * self.r..(i + 1) * self.r]
    }

    pub fn row_f32(&self, i: usize) -> Vec<f32> {
        self.row(i).iter().map(|&w| f32::from_bits(w)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorReg {
    pub lanes: Vec<u32>,
}

impl VectorReg {
    pub fn new(r: usize) -> Self {
        VectorReg { lanes: vec![0; r] }
    }
}

/// R small counters, each in `[0, R]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterVector {
    counts: Vec<u8>,
}

impl CounterVector {
    pub fn new(r: usize) -> Self {
        CounterVector { counts: vec![0; r] }
    }

    pub fn get(&self, i: usize) -> usize {
        self.counts[i] as usize
    }

    pub fn set(&mut self, i: usize, v: usize) {
        assert!(v <= self.counts.len(), "counter value {v} exceeds R = {}", self.counts.len());
        self.counts[i] = v as u8;
    }

    pub fn counts(&self) -> &[u8] {
        &self.counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanKind {
    Sort,
    Zip,
}

/// One contributing input lane of an output slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Src {
    pub side: Side,
    pub pos: u8,
}

impl Src {
    pub fn first(pos: usize) -> Self {
        Src { side: Side::First, pos: pos as u8 }
    }

    pub fn second(pos: usize) -> Self {
        Src { side: Side::Second, pos: pos as u8 }
    }
}

/// Sources of one output slot, folded left to right.
pub type Sources = SmallVec<[Src; 2]>;

/// How one register row pair was reordered by a key instruction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlanRow {
    pub la: usize,
    pub lb: usize,
    /// Output slots written to the first register of the pair.
    pub first: Vec<Sources>,
    /// Output slots written to the second register of the pair.
    pub second: Vec<Sources>,
    pub consumed_a: usize,
    pub consumed_b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReorderPlan {
    pub kind: PlanKind,
    /// Key registers of the instruction that produced the plan.
    pub key_regs: (usize, usize),
    pub rows: Vec<PlanRow>,
}

impl ReorderPlan {
    pub fn references(&self, reg: usize) -> bool {
        self.key_regs.0 == reg || self.key_regs.1 == reg
    }

    pub fn summary(&self) -> Value {
        json!({
            "kind": self.kind,
            "key_regs": [self.key_regs.0, self.key_regs.1],
            "rows": self.rows.iter().map(|r| json!({
                "la": r.la, "lb": r.lb,
                "out1": r.first.len(), "out2": r.second.len(),
                "consumed": [r.consumed_a, r.consumed_b],
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("memory fault at address {addr:#x}")]
pub struct MemoryFault {
    pub addr: u64,
}

/// Flat byte-addressable memory with little-endian 32-bit word access.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Memory {
    bytes: Vec<u8>,
}

impl Memory {
    pub fn new(size: usize) -> Self {
        Memory { bytes: vec![0; size] }
    }

    pub fn size(&self) -> usize {
        self.bytes.len()
    }

    /// Grows (zero-filled) to at least `size` bytes.
    pub fn ensure(&mut self, size: usize) {
        if self.bytes.len() < size {
            self.bytes.resize(size, 0);
        }
    }

    fn range(&self, addr: u64, n: usize) -> Result<std::ops::Range<usize>, MemoryFault> {
        let size = self.bytes.len() as u64;
        let words_fit = size.saturating_sub(addr) / 4;
        if (n as u64) > words_fit {
            return Err(MemoryFault { addr: addr.max(addr + 4 * words_fit) });
        }
        Ok(addr as usize..addr as usize + 4 * n)
    }

    pub fn read_words(&self, addr: u64, n: usize) -> Result<Vec<u32>, MemoryFault> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let r = self.range(addr, n)?;
        Ok(self.bytes[r].chunks_exact(4).map(|b| u32::from_le_bytes(b.try_into().unwrap())).collect())
    }

    pub fn write_words(&mut self, addr: u64, data: &[u32]) -> Result<(), MemoryFault> {
        if data.is_empty() {
            return Ok(());
        }
        let r = self.range(addr, data.len())?;
        for (dst, w) in self.bytes[r].chunks_exact_mut(4).zip(data) {
            dst.copy_from_slice(&w.to_le_bytes());
        }
        Ok(())
    }

    pub fn read_f32(&self, addr: u64, n: usize) -> Result<Vec<f32>, MemoryFault> {
        Ok(self.read_words(addr, n)?.into_iter().map(f32::from_bits).collect())
    }

    pub fn write_f32(&mut self, addr: u64, data: &[f32]) -> Result<(), MemoryFault> {
        let words: Vec<u32> = data.iter().map(|v| v.to_bits()).collect();
        self.write_words(addr, &words)
    }
}

/// Complete machine state for one simulated core.
#[derive(Debug, Clone)]
pub struct MachineState {
    r: usize,
    pub tr: Vec<MatrixReg>,
    pub v: Vec<VectorReg>,
    pub ic: [CounterVector; 2],
    pub oc: [CounterVector; 2],
    pub plan: Option<ReorderPlan>,
    pub mem: Memory,
    pub counters: OpCounters,
    /// One line per executed instruction when enabled.
    pub trace_log: Option<Vec<String>>,
}

impl MachineState {
    /// # Panics
    /// If `r` is outside the supported array sizes.
    pub fn new(r: usize, mem_bytes: usize) -> Self {
        assert!((MIN_R..=MAX_R).contains(&r), "R = {r} outside {MIN_R}..={MAX_R}");
        MachineState {
            r,
            tr: (0..NUM_MATRIX_REGS).map(|_| MatrixReg::new(r)).collect(),
            v: (0..NUM_VECTOR_REGS).map(|_| VectorReg::new(r)).collect(),
            ic: [CounterVector::new(r), CounterVector::new(r)],
            oc: [CounterVector::new(r), CounterVector::new(r)],
            plan: None,
            mem: Memory::new(mem_bytes),
            counters: OpCounters::default(),
            trace_log: None,
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn enable_trace_log(&mut self) {
        self.trace_log.get_or_insert_with(Vec::new);
    }

    /// Sets every lane of vector register `v` from `vals` (shorter input is
    /// zero-extended).
    pub fn set_vector(&mut self, v: usize, vals: &[u32]) {
        let lanes = &mut self.v[v].lanes;
        lanes.fill(0);
        lanes[..vals.len()].copy_from_slice(vals);
    }

    /// JSON image of registers (hex lanes), counters and the plan summary.
    pub fn snapshot(&self) -> Value {
        let hex = |lanes: &[u32]| lanes.iter().map(|w| format!("{w:08x}")).collect::<Vec<_>>();
        json!({
            "r": self.r,
            "tr": self.tr.iter().map(|m| (0..self.r).map(|i| hex(m.row(i))).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "v": self.v.iter().map(|v| hex(&v.lanes)).collect::<Vec<_>>(),
            "ic": [self.ic[0].counts(), self.ic[1].counts()],
            "oc": [self.oc[0].counts(), self.oc[1].counts()],
            "plan": self.plan.as_ref().map(ReorderPlan::summary),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memory_round_trip_and_faults() {
        let mut m = Memory::new(16);
        assert_eq!(m.read_words(0, 0).unwrap(), Vec::<u32>::new());
        m.write_words(4, &[1, 0xdead_beef]).unwrap();
        assert_eq!(m.read_words(4, 2).unwrap(), vec![1, 0xdead_beef]);
        assert_eq!(m.read_words(8, 3), Err(MemoryFault { addr: 16 }));
        assert_eq!(m.write_words(100, &[1]), Err(MemoryFault { addr: 100 }));
        assert_eq!(m.read_words(14, 1), Err(MemoryFault { addr: 14 }));
        assert_eq!(m.read_words(u64::MAX - 2, 1).unwrap_err().addr, u64::MAX - 2);
        assert!(m.read_words(100, 0).is_ok());
    }

    #[test]
    fn little_endian_layout() {
        let mut m = Memory::new(4);
        m.write_words(0, &[0x0403_0201]).unwrap();
        assert_eq!(m.bytes, vec![1, 2, 3, 4]);
    }

    #[test]
    #[should_panic(expected = "exceeds R")]
    fn counters_are_bounded() {
        let mut c = CounterVector::new(4);
        c.set(0, 4);
        c.set(0, 5);
    }

    #[test]
    fn snapshot_shape() {
        let mut s = MachineState::new(2, 0);
        s.tr[0].row_mut(1)[0] = 0xa;
        let snap = s.snapshot();
        assert_eq!(snap["tr"][0][1][0], "0000000a");
        assert_eq!(snap["tr"].as_array().unwrap().len(), NUM_MATRIX_REGS);
        assert_eq!(snap["v"].as_array().unwrap().len(), NUM_VECTOR_REGS);
        assert!(snap["plan"].is_null());
    }
}
