//! Operation counters shared by the executor and all kernels.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Dynamic opcode classes. Only the eight stream instructions are counted
/// here; host-level vector arithmetic goes to [`OpCounters::extra`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Opcode {
    Mlxe,
    Msxe,
    Mssortk,
    Mssortv,
    Mszipk,
    Mszipv,
    #[serde(rename = "mmv.vi")]
    MmvVi,
    #[serde(rename = "mmv.vo")]
    MmvVo,
}

impl Opcode {
    pub const ALL: [Opcode; 8] = [
        Opcode::Mlxe,
        Opcode::Msxe,
        Opcode::Mssortk,
        Opcode::Mssortv,
        Opcode::Mszipk,
        Opcode::Mszipv,
        Opcode::MmvVi,
        Opcode::MmvVo,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::Mlxe => "mlxe.t",
            Opcode::Msxe => "msxe.t",
            Opcode::Mssortk => "mssortk.tt",
            Opcode::Mssortv => "mssortv.tt",
            Opcode::Mszipk => "mszipk.tt",
            Opcode::Mszipv => "mszipv.tt",
            Opcode::MmvVi => "mmv.vi",
            Opcode::MmvVo => "mmv.vo",
        }
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// Kernel phases, following the usual execution-time breakdown of
/// row-wise SpGEMM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Preprocessing,
    RowSort,
    Expansion,
    Sorting,
    Merging,
    Output,
    OutputShuffle,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStat {
    /// Host wall-clock nanoseconds. Advisory only; zeroed by
    /// [`OpCounters::without_timings`].
    pub host_ns: u64,
    pub ops: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OpCounters {
    pub multiplies: u64,
    pub dynamic_instr: BTreeMap<Opcode, u64>,
    /// `mssortk` + `mszipk`.
    pub key_instr_total: u64,
    pub sort_iterations: u64,
    pub merge_iterations: u64,
    /// First-order array occupancy in cycles, summed over key/value pairs.
    pub cycle_estimate: u64,
    /// Row micro-ops issued by indexed loads and stores.
    pub row_uops: u64,
    pub extra: BTreeMap<String, u64>,
    pub phases: BTreeMap<Phase, PhaseStat>,
}

impl OpCounters {
    pub fn count(&self, op: Opcode) -> u64 {
        self.dynamic_instr.get(&op).copied().unwrap_or(0)
    }

    pub fn record(&mut self, op: Opcode) {
        *self.dynamic_instr.entry(op).or_insert(0) += 1;
        if matches!(op, Opcode::Mssortk | Opcode::Mszipk) {
            self.key_instr_total += 1;
        }
    }

    pub fn bump(&mut self, name: &str, by: u64) {
        *self.extra.entry(name.to_string()).or_insert(0) += by;
    }

    pub fn extra(&self, name: &str) -> u64 {
        self.extra.get(name).copied().unwrap_or(0)
    }

    pub fn phase(&mut self, phase: Phase, elapsed: Duration, ops: u64) {
        let stat = self.phases.entry(phase).or_default();
        stat.host_ns += elapsed.as_nanos() as u64;
        stat.ops += ops;
    }

    pub fn total_instructions(&self) -> u64 {
        self.dynamic_instr.values().sum()
    }

    /// Adds every counter of `other` into `self`.
    pub fn absorb(&mut self, other: &OpCounters) {
        self.multiplies += other.multiplies;
        for (op, n) in &other.dynamic_instr {
            *self.dynamic_instr.entry(*op).or_insert(0) += n;
        }
        self.key_instr_total += other.key_instr_total;
        self.sort_iterations += other.sort_iterations;
        self.merge_iterations += other.merge_iterations;
        self.cycle_estimate += other.cycle_estimate;
        self.row_uops += other.row_uops;
        for (k, n) in &other.extra {
            *self.extra.entry(k.clone()).or_insert(0) += n;
        }
        for (p, s) in &other.phases {
            let stat = self.phases.entry(*p).or_default();
            stat.host_ns += s.host_ns;
            stat.ops += s.ops;
        }
    }

    /// Copy with host timings zeroed, for byte-stable reports.
    pub fn without_timings(&self) -> OpCounters {
        let mut out = self.clone();
        for stat in out.phases.values_mut() {
            stat.host_ns = 0;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_total_tracks_sort_and_zip() {
        let mut c = OpCounters::default();
        c.record(Opcode::Mssortk);
        c.record(Opcode::Mssortv);
        c.record(Opcode::Mszipk);
        c.record(Opcode::Mszipk);
        assert_eq!(c.key_instr_total, c.count(Opcode::Mssortk) + c.count(Opcode::Mszipk));
        assert_eq!(c.key_instr_total, 3);
        assert_eq!(c.total_instructions(), 4);
    }

    #[test]
    fn absorb_and_strip_timings() {
        let mut a = OpCounters::default();
        a.phase(Phase::Sorting, Duration::from_nanos(50), 2);
        let mut b = OpCounters::default();
        b.phase(Phase::Sorting, Duration::from_nanos(25), 1);
        b.bump("probes", 4);
        a.absorb(&b);
        assert_eq!(a.phases[&Phase::Sorting], PhaseStat { host_ns: 75, ops: 3 });
        assert_eq!(a.extra("probes"), 4);
        assert_eq!(a.without_timings().phases[&Phase::Sorting].host_ns, 0);
    }

    #[test]
    fn opcode_names_serialize_as_mnemonics() {
        let mut c = OpCounters::default();
        c.record(Opcode::MmvVo);
        let json = serde_json::to_string(&c.dynamic_instr).unwrap();
        assert_eq!(json, r#"{"mmv.vo":1}"#);
    }
}
