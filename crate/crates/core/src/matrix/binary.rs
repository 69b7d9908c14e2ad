//! Versioned little-endian binary cache for CSR matrices.
//!
//! Layout: magic `SPZCSR\0\0`, u32 version, u64 rows, u64 cols, u64 nnz,
//! then row_ptr as u64, col_idx as u32 and values as IEEE-754 f32.

use std::io::{Read, Write};

use super::{CsrMatrix, MatrixError};

pub const MAGIC: &[u8; 8] = b"SPZCSR\0\0";
pub const VERSION: u32 = 1;

pub fn write_binary<W: Write>(m: &CsrMatrix, mut out: W) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(36 + 8 * (m.rows() + 1) + 8 * m.nnz());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    for x in [m.rows(), m.cols(), m.nnz()] {
        buf.extend_from_slice(&(x as u64).to_le_bytes());
    }
    for &p in m.row_ptr() {
        buf.extend_from_slice(&(p as u64).to_le_bytes());
    }
    for &c in m.col_idx() {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    for &v in m.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], MatrixError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| MatrixError::BadBinary(format!("truncated at byte {}", self.pos)))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, MatrixError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, MatrixError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize, MatrixError> {
        usize::try_from(self.u64()?).map_err(|_| MatrixError::BadBinary("length overflows usize".into()))
    }
}

pub fn read_binary<R: Read>(mut input: R) -> Result<CsrMatrix, MatrixError> {
    let mut data = Vec::new();
    input.read_to_end(&mut data)?;
    let mut cur = Cursor { data: &data, pos: 0 };
    if cur.take(8)? != MAGIC {
        return Err(MatrixError::BadBinary("bad magic".into()));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(MatrixError::BadBinary(format!("unsupported version {version}")));
    }
    let (rows, cols, nnz) = (cur.len()?, cur.len()?, cur.len()?);
    let need = rows
        .checked_add(1)
        .and_then(|r| r.checked_mul(8))
        .and_then(|b| nnz.checked_mul(8).and_then(|n| b.checked_add(n)));
    if need.is_none_or(|n| n != data.len() - cur.pos) {
        return Err(MatrixError::BadBinary("array sizes disagree with the header".into()));
    }
    let row_ptr = (0..=rows).map(|_| cur.len()).collect::<Result<Vec<_>, _>>()?;
    let col_idx = (0..nnz).map(|_| cur.u32()).collect::<Result<Vec<_>, _>>()?;
    let values = (0..nnz).map(|_| cur.u32().map(f32::from_bits)).collect::<Result<Vec<_>, _>>()?;
    CsrMatrix::new(rows, cols, row_ptr, col_idx, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = CsrMatrix::from_rows(3, 4, vec![vec![(1, -0.5), (3, 2.0)], vec![], vec![(0, 1e-7)]]).unwrap();
        let mut buf = Vec::new();
        write_binary(&m, &mut buf).unwrap();
        assert_eq!(read_binary(&buf[..]).unwrap(), m);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_binary(&b"nope"[..]).is_err());
        let mut buf = Vec::new();
        write_binary(&CsrMatrix::identity(2), &mut buf).unwrap();
        buf.pop();
        assert!(read_binary(&buf[..]).is_err());
        buf[8] = 9;
        assert!(read_binary(&buf[..]).is_err());
    }
}
