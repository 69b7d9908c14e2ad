use serde::Serialize;
use spz_core::counters::Opcode;
use spz_core::kernels::{Algorithm, Divergence, Tolerance};
use spz_core::{DatasetStats, OpCounters};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool { name: "spz", version: env!("CARGO_PKG_VERSION") };

#[derive(Debug, Serialize)]
pub struct MatrixInfo {
    pub id: String,
    /// Right-hand operand when it is not the matrix itself.
    pub rhs: Option<String>,
    pub stats: DatasetStats,
}

#[derive(Debug, Serialize)]
pub struct ReportConfig {
    pub r: usize,
    pub seed: Option<u64>,
    pub esc_block_rows: usize,
    pub block_sizes: Option<Vec<usize>>,
    pub rsort: bool,
    pub tolerance: Tolerance,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub passed: bool,
    pub divergence: Option<Divergence>,
}

#[derive(Debug, Serialize)]
pub struct SweepRun {
    pub block_rows: usize,
    pub best: bool,
    pub counters: OpCounters,
}

#[derive(Debug, Serialize)]
pub struct KernelEntry {
    pub algorithm: Algorithm,
    pub check: Option<Check>,
    pub counters: OpCounters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub host_ns: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_sweep: Option<Vec<SweepRun>>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool: Tool,
    pub command: &'static str,
    pub matrix: MatrixInfo,
    pub config: ReportConfig,
    pub kernels: Vec<KernelEntry>,
}

impl RunReport {
    pub fn failed(&self) -> Option<(Algorithm, &Check)> {
        self.kernels.iter().find_map(|k| k.check.as_ref().filter(|c| !c.passed).map(|c| (k.algorithm, c)))
    }

    pub fn key_instr(&self, algo: Algorithm) -> Option<u64> {
        self.kernels.iter().find(|k| k.algorithm == algo).map(|k| k.counters.key_instr_total)
    }
}

#[derive(Debug, Serialize)]
pub struct StatsReport {
    pub schema: u32,
    pub tool: Tool,
    pub command: &'static str,
    pub matrix: MatrixInfo,
}

/// Left-aligned first column, right-aligned numbers, two spaces between.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&width)
            .enumerate()
            .map(|(i, (c, &w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

/// Three significant figures with a signed two-digit exponent: `3.78E-05`.
pub fn sci(x: f64) -> String {
    let t = format!("{x:.2e}");
    let (m, e) = t.split_once('e').expect("exponent");
    let e: i32 = e.parse().expect("integer exponent");
    format!("{m}E{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

pub fn stats_fields(s: &DatasetStats) -> Vec<(&'static str, String)> {
    vec![
        ("rows", s.rows.to_string()),
        ("cols", s.cols.to_string()),
        ("nnz", s.nnz.to_string()),
        ("density", sci(s.density)),
        ("total_work", s.total_work.to_string()),
        ("avg_work_per_row", format!("{:.2}", s.avg_work_per_row)),
        ("out_nnz", s.out_nnz.to_string()),
        ("avg_out_nnz_per_row", format!("{:.2}", s.avg_out_nnz_per_row)),
        ("group_size", s.group_size.to_string()),
        ("avg_work_per_group", format!("{:.2}", s.avg_work_per_group)),
        ("work_variation", format!("{:.2}", s.work_variation)),
    ]
}

pub fn stats_text(r: &StatsReport) -> String {
    let mut out = format!("matrix  {}\n", r.matrix.id);
    if let Some(rhs) = &r.matrix.rhs {
        out += &format!("rhs     {rhs}\n");
    }
    let rows: Vec<Vec<String>> =
        stats_fields(&r.matrix.stats).into_iter().map(|(k, v)| vec![k.to_string(), v]).collect();
    out + &table(&["metric", "value"], &rows)
}

pub fn stats_csv(r: &StatsReport) -> Result<String, csv::Error> {
    let fields = stats_fields(&r.matrix.stats);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["matrix"];
    header.extend(fields.iter().map(|f| f.0));
    w.write_record(&header)?;
    let mut row = vec![r.matrix.id.clone()];
    row.extend(fields.into_iter().map(|f| f.1));
    w.write_record(&row)?;
    finish(w)
}

const KERNEL_COLUMNS: [&str; 9] = [
    "algorithm",
    "check",
    "multiplies",
    "instructions",
    "key_instr",
    "sort_iter",
    "merge_iter",
    "cycles",
    "row_uops",
];

fn check_cell(c: &Option<Check>) -> String {
    match c {
        None => "-".into(),
        Some(c) if c.passed => "pass".into(),
        Some(_) => "FAIL".into(),
    }
}

fn kernel_cells(k: &KernelEntry) -> Vec<String> {
    let c = &k.counters;
    vec![
        k.algorithm.to_string(),
        check_cell(&k.check),
        c.multiplies.to_string(),
        c.total_instructions().to_string(),
        c.key_instr_total.to_string(),
        c.sort_iterations.to_string(),
        c.merge_iterations.to_string(),
        c.cycle_estimate.to_string(),
        c.row_uops.to_string(),
    ]
}

pub fn run_text(r: &RunReport) -> String {
    let s = &r.matrix.stats;
    let mut out = format!("matrix   {} ({} x {}, nnz {})\n", r.matrix.id, s.rows, s.cols, s.nnz);
    let rhs = r.matrix.rhs.as_deref().unwrap_or("A");
    out += &format!("product  A x {rhs}: work {}, output nnz {}\n", s.total_work, s.out_nnz);
    out += &format!("config   R={} esc_block_rows={} tol={:e}\n\n", r.config.r, r.config.esc_block_rows, r.config.tolerance.rel);
    let rows: Vec<Vec<String>> = r.kernels.iter().map(kernel_cells).collect();
    out += &table(&KERNEL_COLUMNS, &rows);

    for k in &r.kernels {
        if let Some(sweep) = &k.block_sweep {
            out += "\nesc block sweep (* = best)\n";
            let rows: Vec<Vec<String>> = sweep
                .iter()
                .map(|s| {
                    vec![
                        format!("{}{}", if s.best { "*" } else { " " }, s.block_rows),
                        s.counters.extra("radix_passes").to_string(),
                        s.counters.extra("radix_moves").to_string(),
                        s.counters.extra("esc_triples").to_string(),
                    ]
                })
                .collect();
            out += &table(&["block_rows", "radix_passes", "radix_moves", "triples"], &rows);
        }
        if let Some(Check { passed: false, divergence: Some(d) }) = &k.check {
            out += &format!("\n{} diverges at {d}\n", k.algorithm);
        }
    }
    if let (Some(spz), Some(rs)) = (r.key_instr(Algorithm::Spz), r.key_instr(Algorithm::SpzRsort)) {
        if spz > 0 {
            let change = (rs as f64 - spz as f64) / spz as f64 * 100.0;
            out += &format!("\nspz-rsort key instructions vs spz: {rs} vs {spz} ({change:+.1}%)\n");
        }
    }
    out
}

pub fn run_csv(r: &RunReport) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["matrix"];
    header.extend(KERNEL_COLUMNS);
    header.extend(["block_rows", "best"]);
    header.extend(Opcode::ALL.iter().map(|o| o.mnemonic()));
    w.write_record(&header)?;
    let opcodes = |c: &OpCounters| Opcode::ALL.iter().map(|&o| c.count(o).to_string()).collect::<Vec<_>>();
    for k in &r.kernels {
        let mut row = vec![r.matrix.id.clone()];
        row.extend(kernel_cells(k));
        let block = if k.algorithm == Algorithm::Esc {
            let best = k.block_sweep.as_ref().and_then(|s| s.iter().find(|s| s.best)).map(|s| s.block_rows);
            best.unwrap_or(r.config.esc_block_rows).to_string()
        } else {
            String::new()
        };
        row.extend([block, String::new()]);
        row.extend(opcodes(&k.counters));
        w.write_record(&row)?;
        for s in k.block_sweep.iter().flatten() {
            let entry = KernelEntry {
                algorithm: k.algorithm,
                check: None,
                counters: s.counters.clone(),
                host_ns: None,
                block_sweep: None,
            };
            let mut row = vec![r.matrix.id.clone()];
            row.extend(kernel_cells(&entry));
            row.extend([s.block_rows.to_string(), s.best.to_string()]);
            row.extend(opcodes(&s.counters));
            w.write_record(&row)?;
        }
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, csv::Error> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns_columns() {
        let t = table(&["name", "n"], &[vec!["a".into(), "100".into()], vec!["long".into(), "7".into()]]);
        assert_eq!(t, "name    n\na     100\nlong    7\n");
    }

    #[test]
    fn scientific() {
        assert_eq!(sci(3.78e-5), "3.78E-05");
        assert_eq!(sci(1.0), "1.00E+00");
        assert_eq!(sci(0.0), "0.00E+00");
        assert_eq!(sci(1234.0), "1.23E+03");
    }
}
