use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{KernelError, KernelResult};
use crate::arch::MachineState;
use crate::counters::{OpCounters, Phase};
use crate::isa::programs::{merge_chunks, sort_chunks, Bases};
use crate::isa::run_program;
use crate::matrix::{check_dims, row_work, CsrMatrix};
use crate::stream::expand_row;

/// How rows are assigned to lockstep groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowOrder {
    /// `R` consecutive rows per group.
    Natural,
    /// Rows sorted by decreasing work, ties by row index.
    DescendingWork,
    /// Rows sorted by increasing work, ties by row index.
    AscendingWork,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpzConfig {
    pub r: usize,
    pub order: RowOrder,
}

/// Merge kernel over groups of `R` consecutive rows.
pub fn spgemm_spz(a: &CsrMatrix, b: &CsrMatrix, m: &mut MachineState) -> Result<KernelResult, KernelError> {
    let cfg = SpzConfig { r: m.r(), order: RowOrder::Natural };
    spgemm_spz_with(a, b, m, &cfg)
}

/// Merge kernel over groups of rows with similar work. Output rows are
/// shuffled back to their original positions at the end.
pub fn spgemm_spz_rsort(a: &CsrMatrix, b: &CsrMatrix, m: &mut MachineState) -> Result<KernelResult, KernelError> {
    let cfg = SpzConfig { r: m.r(), order: RowOrder::DescendingWork };
    spgemm_spz_with(a, b, m, &cfg)
}

pub fn spgemm_spz_with(
    a: &CsrMatrix,
    b: &CsrMatrix,
    m: &mut MachineState,
    cfg: &SpzConfig,
) -> Result<KernelResult, KernelError> {
    check_dims(a, b)?;
    if m.r() != cfg.r {
        return Err(KernelError::RMismatch { machine: m.r(), expected: cfg.r });
    }
    let mut k = OpCounters::default();
    let t = Instant::now();
    let work = row_work(a, b);
    k.phase(Phase::Preprocessing, t.elapsed(), a.nnz() as u64);

    let mut perm: Vec<usize> = (0..a.rows()).collect();
    if cfg.order != RowOrder::Natural {
        let t = Instant::now();
        let mut comparisons = 0u64;
        let desc = cfg.order == RowOrder::DescendingWork;
        perm.sort_by(|&x, &y| {
            comparisons += 1;
            let by_work = if desc { work[y].cmp(&work[x]) } else { work[x].cmp(&work[y]) };
            by_work.then(x.cmp(&y))
        });
        k.phase(Phase::RowSort, t.elapsed(), comparisons);
    }

    let mut computed = Vec::with_capacity(a.rows());
    for group in perm.chunks(cfg.r) {
        computed.extend(run_group(m, a, b, group, &work, &mut k)?);
    }

    let rows = if cfg.order == RowOrder::Natural {
        computed
    } else {
        let t = Instant::now();
        let mut out = vec![Vec::new(); a.rows()];
        for (row, data) in perm.iter().zip(computed) {
            out[*row] = data;
        }
        k.phase(Phase::OutputShuffle, t.elapsed(), a.rows() as u64);
        out
    };
    let c = CsrMatrix::from_rows(a.rows(), b.cols(), rows)?;
    Ok(KernelResult { c, counters: k })
}

/// A sorted run inside a stream's region: element offset relative to the
/// buffer, reserved capacity and current length.
#[derive(Debug, Clone, Copy)]
struct Part {
    off: usize,
    cap: usize,
    len: usize,
}

/// Per-stream progress through one merge level.
struct MergeCursor {
    pairs: Vec<(Part, Part)>,
    next: usize,
    i: usize,
    j: usize,
    out: usize,
    done: Vec<Part>,
}

/// Memory layout of one group, in elements: keys of buffer A at `[0, T)`,
/// values at `[T, 2T)`, then buffer B at `[2T, 4T)`. Both buffers are
/// reached through the same base addresses; the buffer is picked by adding
/// `2T` to the element offset.
struct Layout {
    total: usize,
}

impl Layout {
    fn bases(&self) -> Bases {
        let vals = 4 * self.total as u64;
        Bases { keys_in: 0, vals_in: vals, keys_out: 0, vals_out: vals }
    }

    fn buffer(&self, which: usize) -> usize {
        which * 2 * self.total
    }

    fn key_addr(&self, elem: usize) -> u64 {
        4 * elem as u64
    }

    fn val_addr(&self, elem: usize) -> u64 {
        4 * (self.total + elem) as u64
    }
}

fn copy_elems(m: &mut MachineState, l: &Layout, from: usize, to: usize, n: usize) -> Result<(), KernelError> {
    let keys = m.mem.read_words(l.key_addr(from), n)?;
    let vals = m.mem.read_words(l.val_addr(from), n)?;
    m.mem.write_words(l.key_addr(to), &keys)?;
    m.mem.write_words(l.val_addr(to), &vals)?;
    Ok(())
}

fn set_lanes(m: &mut MachineState, reg: usize, vals: &[usize]) {
    let lanes: Vec<u32> = vals.iter().map(|&v| v as u32).collect();
    m.set_vector(reg, &lanes);
}

fn lanes(m: &MachineState, reg: usize) -> Vec<usize> {
    m.v[reg].lanes.iter().map(|&v| v as usize).collect()
}

fn run_group(
    m: &mut MachineState,
    a: &CsrMatrix,
    b: &CsrMatrix,
    rows: &[usize],
    work: &[u64],
    k: &mut OpCounters,
) -> Result<Vec<Vec<(u32, f32)>>, KernelError> {
    let r = m.r();
    let streams = rows.len();
    let lens: Vec<usize> = rows.iter().map(|&i| work[i] as usize).collect();
    let mut base = Vec::with_capacity(streams);
    let mut total = 0;
    for &l in &lens {
        base.push(total);
        total += l;
    }
    if total == 0 {
        return Ok(vec![Vec::new(); streams]);
    }
    let layout = Layout { total };
    m.mem.ensure(16 * total);
    let bases = layout.bases();

    // Expansion into buffer A.
    let t = Instant::now();
    for (s, &row) in rows.iter().enumerate() {
        let e = expand_row(a, b, row);
        let keys: Vec<u32> = e.iter().map(|p| p.0).collect();
        let vals: Vec<f32> = e.iter().map(|p| p.1).collect();
        m.mem.write_words(layout.key_addr(base[s]), &keys).expect("buffer sized from work");
        m.mem.write_f32(layout.val_addr(base[s]), &vals).expect("buffer sized from work");
        k.multiplies += e.len() as u64;
    }
    k.phase(Phase::Expansion, t.elapsed(), 2 * total as u64);

    // Chunk sorting: chunks 2c and 2c+1 of each stream, written to buffer B.
    let t = Instant::now();
    let chunks: Vec<usize> = lens.iter().map(|&l| l.div_ceil(r)).collect();
    let iters = chunks.iter().map(|&c| c.div_ceil(2)).max().unwrap_or(0);
    let mut parts: Vec<Vec<Part>> = vec![Vec::new(); streams];
    let sort_prog = sort_chunks(&bases);
    let mut sort_ops = 0;
    let chunk_len = |s: usize, c: usize| lens[s].saturating_sub(c * r).min(r);
    for it in 0..iters {
        let (mut l1, mut l2, mut o1, mut o2) = (vec![0; r], vec![0; r], vec![0; r], vec![0; r]);
        for s in 0..streams {
            l1[s] = chunk_len(s, 2 * it);
            l2[s] = chunk_len(s, 2 * it + 1);
            o1[s] = base[s] + 2 * it * r;
            o2[s] = o1[s] + r;
        }
        set_lanes(m, 0, &l1);
        set_lanes(m, 1, &l2);
        set_lanes(m, 2, &o1);
        set_lanes(m, 3, &o2);
        let shift = layout.buffer(1);
        set_lanes(m, 6, &o1.iter().map(|o| o + shift).collect::<Vec<_>>());
        set_lanes(m, 7, &o2.iter().map(|o| o + shift).collect::<Vec<_>>());
        let delta = run_program(m, &sort_prog)?;
        sort_ops += delta.total_instructions();
        k.absorb(&delta);
        let (n1, n2) = (lanes(m, 4), lanes(m, 5));
        for s in 0..streams {
            if l1[s] > 0 {
                parts[s].push(Part { off: o1[s], cap: l1[s], len: n1[s] });
            }
            if l2[s] > 0 {
                parts[s].push(Part { off: o2[s], cap: l2[s], len: n2[s] });
            }
        }
    }
    k.sort_iterations += iters as u64;
    k.phase(Phase::Sorting, t.elapsed(), sort_ops);

    // Merge tree: pairwise levels, buffers swap after each level.
    let t = Instant::now();
    let merge_prog = merge_chunks(&bases);
    let mut merge_ops = 0;
    let mut src = 1;
    while parts.iter().any(|p| p.len() > 1) {
        let (sb, db) = (layout.buffer(src), layout.buffer(1 - src));
        let mut cursors = Vec::with_capacity(streams);
        for p in &parts {
            let mut done = Vec::new();
            let pairs: Vec<(Part, Part)> = p.chunks_exact(2).map(|w| (w[0], w[1])).collect();
            if p.len() % 2 == 1 {
                let last = *p.last().unwrap();
                copy_elems(m, &layout, sb + last.off, db + last.off, last.len)?;
                merge_ops += last.len as u64;
                k.bump("host_copy_elems", last.len as u64);
                done.push(last);
            }
            let out = pairs.first().map_or(0, |(p, _)| db + p.off);
            cursors.push(MergeCursor { pairs, next: 0, i: 0, j: 0, out, done });
        }
        loop {
            let (mut l1, mut l2, mut o1, mut o2, mut out) = (vec![0; r], vec![0; r], vec![0; r], vec![0; r], vec![0; r]);
            let mut active = false;
            for (s, c) in cursors.iter_mut().enumerate() {
                while let Some(&(p, q)) = c.pairs.get(c.next) {
                    if c.i < p.len && c.j < q.len {
                        break;
                    }
                    for (part, pos) in [(p, c.i), (q, c.j)] {
                        let n = part.len - pos;
                        copy_elems(m, &layout, sb + part.off + pos, c.out, n)?;
                        c.out += n;
                        merge_ops += n as u64;
                        k.bump("host_copy_elems", n as u64);
                    }
                    let merged = Part { off: p.off, cap: p.cap + q.cap, len: c.out - (db + p.off) };
                    c.done.push(merged);
                    c.next += 1;
                    c.i = 0;
                    c.j = 0;
                    if let Some((np, _)) = c.pairs.get(c.next) {
                        c.out = db + np.off;
                    }
                }
                if let Some(&(p, q)) = c.pairs.get(c.next) {
                    active = true;
                    l1[s] = (p.len - c.i).min(r);
                    l2[s] = (q.len - c.j).min(r);
                    o1[s] = sb + p.off + c.i;
                    o2[s] = sb + q.off + c.j;
                    out[s] = c.out;
                }
            }
            if !active {
                break;
            }
            set_lanes(m, 0, &l1);
            set_lanes(m, 1, &l2);
            set_lanes(m, 2, &o1);
            set_lanes(m, 3, &o2);
            set_lanes(m, 5, &out);
            let delta = run_program(m, &merge_prog)?;
            merge_ops += delta.total_instructions();
            k.absorb(&delta);
            k.merge_iterations += 1;
            let (ci, cj, next_out) = (lanes(m, 6), lanes(m, 7), lanes(m, 5));
            for (s, c) in cursors.iter_mut().enumerate() {
                if c.pairs.get(c.next).is_some() {
                    c.i += ci[s];
                    c.j += cj[s];
                    c.out = next_out[s];
                }
            }
        }
        for (p, c) in parts.iter_mut().zip(cursors) {
            let mut done = c.done;
            // The carried-over odd partition sits last in region order.
            done.sort_by_key(|d| d.off);
            *p = done;
        }
        src = 1 - src;
    }
    k.phase(Phase::Merging, t.elapsed(), merge_ops);

    let t = Instant::now();
    let sb = layout.buffer(src);
    let mut out = Vec::with_capacity(streams);
    for p in &parts {
        let row = match p.first() {
            Some(part) => {
                let keys = m.mem.read_words(layout.key_addr(sb + part.off), part.len).expect("in bounds");
                let vals = m.mem.read_f32(layout.val_addr(sb + part.off), part.len).expect("in bounds");
                keys.into_iter().zip(vals).collect()
            }
            None => Vec::new(),
        };
        out.push(row);
    }
    k.phase(Phase::Output, t.elapsed(), out.iter().map(Vec::len).sum::<usize>() as u64);
    Ok(out)
}
