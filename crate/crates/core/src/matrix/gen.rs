//! Seeded synthetic matrix generators.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CsrMatrix, MatrixError};

fn value(rng: &mut ChaCha8Rng) -> f32 {
    rng.gen_range(-1.0f32..=1.0)
}

fn assemble(rows: usize, cols: usize, data: Vec<Vec<(u32, f32)>>) -> CsrMatrix {
    CsrMatrix::from_rows(rows, cols, data).expect("generator produced an invalid matrix")
}

/// Every entry is present independently with probability `density`.
/// Positions are drawn by geometric skipping, so cost is proportional to
/// the number of non-zeros rather than `rows * cols`.
///
/// # Panics
/// If `density` is outside `[0, 1]`.
pub fn gen_random(rows: usize, cols: usize, density: f64, seed: u64) -> CsrMatrix {
    assert!((0.0..=1.0).contains(&density), "density {density} outside [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![Vec::new(); rows];
    if density > 0.0 {
        let log_q = (1.0 - density).ln();
        for row in data.iter_mut() {
            let mut c = 0usize;
            loop {
                if density < 1.0 {
                    let u: f64 = 1.0 - rng.gen::<f64>();
                    let skip = (u.ln() / log_q).floor();
                    if skip >= (cols - c.min(cols)) as f64 {
                        break;
                    }
                    c += skip as usize;
                }
                if c >= cols {
                    break;
                }
                row.push((c as u32, value(&mut rng)));
                c += 1;
            }
        }
    }
    assemble(rows, cols, data)
}

fn sampled_row(rng: &mut ChaCha8Rng, cols: usize, nnz: usize) -> Vec<(u32, f32)> {
    let mut idx = sample(rng, cols, nnz).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|c| (c as u32, value(rng))).collect()
}

/// `heavy_rows` randomly chosen rows get `heavy_nnz` entries each, every
/// other row gets `light_nnz`. Columns are sampled without replacement.
///
/// # Panics
/// If `heavy_rows > rows` or either nnz exceeds `cols`.
pub fn gen_skewed(
    rows: usize,
    cols: usize,
    heavy_rows: usize,
    heavy_nnz: usize,
    light_nnz: usize,
    seed: u64,
) -> CsrMatrix {
    assert!(heavy_rows <= rows, "heavy_rows {heavy_rows} > rows {rows}");
    assert!(heavy_nnz <= cols && light_nnz <= cols, "per-row nnz exceeds {cols} columns");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut heavy = vec![false; rows];
    for i in sample(&mut rng, rows, heavy_rows) {
        heavy[i] = true;
    }
    let data = heavy
        .iter()
        .map(|&h| sampled_row(&mut rng, cols, if h { heavy_nnz } else { light_nnz }))
        .collect();
    assemble(rows, cols, data)
}

/// Row `i` holds every column in `[i - half_width, i + half_width]`.
pub fn gen_banded(rows: usize, cols: usize, half_width: usize, seed: u64) -> CsrMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows)
        .map(|i| {
            let lo = i.saturating_sub(half_width);
            let hi = (i + half_width + 1).min(cols);
            (lo..hi).map(|c| (c as u32, value(&mut rng))).collect()
        })
        .collect();
    assemble(rows, cols, data)
}

/// Textual generator description, e.g. `random:64x64:0.1:seed3`.
///
/// ```text
/// random:RxC:DENSITY:seedS
/// skewed:RxC:HEAVY_ROWS:HEAVY_NNZ:LIGHT_NNZ:seedS
/// banded:RxC:HALF_WIDTH:seedS
/// identity:N
/// ```
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Random { rows: usize, cols: usize, density: f64, seed: u64 },
    Skewed { rows: usize, cols: usize, heavy_rows: usize, heavy_nnz: usize, light_nnz: usize, seed: u64 },
    Banded { rows: usize, cols: usize, half_width: usize, seed: u64 },
    Identity { n: usize },
}

impl GenSpec {
    pub fn build(&self) -> Result<CsrMatrix, MatrixError> {
        let bad = |msg: &str| MatrixError::BadGenSpec { spec: self.to_string(), msg: msg.into() };
        Ok(match *self {
            GenSpec::Random { rows, cols, density, seed } => {
                if !(0.0..=1.0).contains(&density) {
                    return Err(bad("density must be within [0, 1]"));
                }
                gen_random(rows, cols, density, seed)
            }
            GenSpec::Skewed { rows, cols, heavy_rows, heavy_nnz, light_nnz, seed } => {
                if heavy_rows > rows {
                    return Err(bad("more heavy rows than rows"));
                }
                if heavy_nnz > cols || light_nnz > cols {
                    return Err(bad("per-row nnz exceeds the column count"));
                }
                gen_skewed(rows, cols, heavy_rows, heavy_nnz, light_nnz, seed)
            }
            GenSpec::Banded { rows, cols, half_width, seed } => gen_banded(rows, cols, half_width, seed),
            GenSpec::Identity { n } => CsrMatrix::identity(n),
        })
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpec::Random { rows, cols, density, seed } => write!(f, "random:{rows}x{cols}:{density}:seed{seed}"),
            GenSpec::Skewed { rows, cols, heavy_rows, heavy_nnz, light_nnz, seed } => {
                write!(f, "skewed:{rows}x{cols}:{heavy_rows}:{heavy_nnz}:{light_nnz}:seed{seed}")
            }
            GenSpec::Banded { rows, cols, half_width, seed } => write!(f, "banded:{rows}x{cols}:{half_width}:seed{seed}"),
            GenSpec::Identity { n } => write!(f, "identity:{n}"),
        }
    }
}

impl FromStr for GenSpec {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: String| MatrixError::BadGenSpec { spec: s.to_string(), msg };
        let parts: Vec<&str> = s.split(':').collect();
        let num = |tok: &str, what: &str| -> Result<usize, MatrixError> {
            tok.parse().map_err(|_| bad(format!("bad {what} '{tok}'")))
        };
        let dims = |tok: &str| -> Result<(usize, usize), MatrixError> {
            let (r, c) = tok.split_once('x').ok_or_else(|| bad(format!("expected RxC, got '{tok}'")))?;
            Ok((num(r, "row count")?, num(c, "column count")?))
        };
        let seed = |tok: &str| -> Result<u64, MatrixError> {
            let t = tok.strip_prefix("seed").unwrap_or(tok);
            t.parse().map_err(|_| bad(format!("bad seed '{tok}'")))
        };
        let arity = |n: usize| -> Result<(), MatrixError> {
            if parts.len() == n {
                Ok(())
            } else {
                Err(bad(format!("'{}' takes {} fields, got {}", parts[0], n - 1, parts.len() - 1)))
            }
        };
        match parts[0] {
            "random" => {
                arity(4)?;
                let (rows, cols) = dims(parts[1])?;
                let density = parts[2].parse().map_err(|_| bad(format!("bad density '{}'", parts[2])))?;
                Ok(GenSpec::Random { rows, cols, density, seed: seed(parts[3])? })
            }
            "skewed" => {
                arity(6)?;
                let (rows, cols) = dims(parts[1])?;
                Ok(GenSpec::Skewed {
                    rows,
                    cols,
                    heavy_rows: num(parts[2], "heavy row count")?,
                    heavy_nnz: num(parts[3], "heavy nnz")?,
                    light_nnz: num(parts[4], "light nnz")?,
                    seed: seed(parts[5])?,
                })
            }
            "banded" => {
                arity(4)?;
                let (rows, cols) = dims(parts[1])?;
                Ok(GenSpec::Banded { rows, cols, half_width: num(parts[2], "half width")?, seed: seed(parts[3])? })
            }
            "identity" => {
                arity(2)?;
                Ok(GenSpec::Identity { n: num(parts[1], "size")? })
            }
            other => Err(bad(format!("unknown generator '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_extremes() {
        assert_eq!(gen_random(20, 30, 0.0, 1).nnz(), 0);
        assert_eq!(gen_random(20, 30, 1.0, 1).nnz(), 600);
    }

    #[test]
    fn deterministic_for_a_seed() {
        assert_eq!(gen_random(100, 100, 0.05, 7), gen_random(100, 100, 0.05, 7));
        assert_ne!(gen_random(100, 100, 0.05, 7), gen_random(100, 100, 0.05, 8));
    }

    #[test]
    fn expected_nnz() {
        let m = gen_random(400, 400, 0.05, 11);
        let expect = 400.0 * 400.0 * 0.05;
        assert!((m.nnz() as f64 - expect).abs() < 0.05 * expect, "nnz {}", m.nnz());
        assert!(m.values().iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn skewed_row_sizes() {
        let m = gen_skewed(160, 256, 10, 64, 2, 1);
        let heavy = (0..160).filter(|&i| m.row_nnz(i) == 64).count();
        let light = (0..160).filter(|&i| m.row_nnz(i) == 2).count();
        assert_eq!((heavy, light), (10, 150));
    }

    #[test]
    fn banded_shape() {
        let m = gen_banded(5, 5, 1, 0);
        assert_eq!(m.row(0).0, &[0, 1]);
        assert_eq!(m.row(2).0, &[1, 2, 3]);
        assert_eq!(m.row(4).0, &[3, 4]);
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["random:64x64:0.1:seed3", "skewed:160x256:10:64:2:seed1", "banded:8x8:2:seed0", "identity:4"] {
            let g: GenSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert_eq!("random:2x2:0.5:9".parse::<GenSpec>().unwrap().to_string(), "random:2x2:0.5:seed9");
        for s in ["random:2x2:0.5", "random:2by2:0.5:seed1", "blob:1", "random:2x2:1.5:seed1"] {
            assert!(s.parse::<GenSpec>().and_then(|g| g.build()).is_err(), "{s}");
        }
    }
}
