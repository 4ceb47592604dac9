//! Binary interchange formats.
//!
//! QMAT1: magic "QMAT1", rows and cols as 64-bit little-endian
//! integers, then four row-major planes (w, x, y, z) of little-endian
//! 64-bit floats.
//!
//! QIMGF1: magic "QIMGF1", height and width as 64-bit little-endian
//! integers, then three row-major planes (R, G, B) of little-endian
//! 64-bit floats. Carries unclipped channel values across process
//! boundaries, which 8-bit storage cannot.
//!
//! Both readers reject malformed payloads with the byte offset of the
//! first problem.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use clqa_core::{ColorImageQ, QMatrix};

use crate::errors::{CliError, CliResult};

const QMAT_MAGIC: &[u8] = b"QMAT1";
const QIMG_MAGIC: &[u8] = b"QIMGF1";
/// Caps plane element count; 2^26 doubles per plane is about 0.5 GiB.
const MAX_ELEMS: u64 = 1 << 26;

type ParseError = (usize, String);

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn expect_magic(&mut self, magic: &[u8]) -> Result<(), ParseError> {
        if self.bytes.len() < magic.len() || &self.bytes[..magic.len()] != magic {
            let name = String::from_utf8_lossy(magic).into_owned();
            return Err((0, format!("missing {name} magic")));
        }
        self.pos = magic.len();
        Ok(())
    }

    fn read_u64(&mut self, what: &str) -> Result<u64, ParseError> {
        let end = self.pos + 8;
        if self.bytes.len() < end {
            return Err((self.pos, format!("file truncated reading {what}")));
        }
        let v = u64::from_le_bytes(self.bytes[self.pos..end].try_into().unwrap());
        self.pos = end;
        Ok(v)
    }

    fn read_plane(&mut self, rows: usize, cols: usize, what: &str) -> Result<Array2<f64>, ParseError> {
        let count = rows * cols;
        let end = self.pos + 8 * count;
        if self.bytes.len() < end {
            return Err((
                self.bytes.len(),
                format!("file truncated inside the {what} plane"),
            ));
        }
        let mut data = Vec::with_capacity(count);
        for i in 0..count {
            let at = self.pos + 8 * i;
            data.push(f64::from_le_bytes(self.bytes[at..at + 8].try_into().unwrap()));
        }
        self.pos = end;
        Ok(Array2::from_shape_vec((rows, cols), data).expect("shape matches count"))
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos != self.bytes.len() {
            return Err((
                self.pos,
                format!(
                    "unexpected trailing data: expected {} bytes, file has {}",
                    self.pos,
                    self.bytes.len()
                ),
            ));
        }
        Ok(())
    }
}

fn read_dims(cur: &mut Cursor, names: (&str, &str)) -> Result<(usize, usize), ParseError> {
    let at = cur.pos;
    let rows = cur.read_u64(names.0)?;
    let at_cols = cur.pos;
    let cols = cur.read_u64(names.1)?;
    if rows == 0 || cols == 0 {
        return Err((at, format!("{} and {} must be positive", names.0, names.1)));
    }
    if rows.saturating_mul(cols) > MAX_ELEMS {
        return Err((at_cols, format!("implausible dimensions {rows}x{cols}")));
    }
    Ok((rows as usize, cols as usize))
}

fn parse_qmat(bytes: &[u8]) -> Result<QMatrix, ParseError> {
    let mut cur = Cursor::new(bytes);
    cur.expect_magic(QMAT_MAGIC)?;
    let (rows, cols) = read_dims(&mut cur, ("rows", "cols"))?;
    let w = cur.read_plane(rows, cols, "w")?;
    let x = cur.read_plane(rows, cols, "x")?;
    let y = cur.read_plane(rows, cols, "y")?;
    let z = cur.read_plane(rows, cols, "z")?;
    cur.finish()?;
    Ok(QMatrix::from_planes(w, x, y, z))
}

fn parse_qimg(bytes: &[u8]) -> Result<ColorImageQ, ParseError> {
    let mut cur = Cursor::new(bytes);
    cur.expect_magic(QIMG_MAGIC)?;
    let (rows, cols) = read_dims(&mut cur, ("height", "width"))?;
    let r = cur.read_plane(rows, cols, "R")?;
    let g = cur.read_plane(rows, cols, "G")?;
    let b = cur.read_plane(rows, cols, "B")?;
    cur.finish()?;
    Ok(ColorImageQ::from_channels(r, g, b))
}

fn format_error(path: &Path, (offset, detail): ParseError) -> CliError {
    CliError::Format {
        path: path.to_owned(),
        offset,
        detail,
    }
}

pub fn read_qmat(path: &Path) -> CliResult<QMatrix> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_qmat(&bytes).map_err(|e| format_error(path, e))
}

pub fn write_qmat(path: &Path, q: &QMatrix) -> CliResult<()> {
    let (rows, cols) = q.shape();
    let mut out = Vec::with_capacity(QMAT_MAGIC.len() + 16 + 32 * rows * cols);
    out.extend_from_slice(QMAT_MAGIC);
    out.extend_from_slice(&(rows as u64).to_le_bytes());
    out.extend_from_slice(&(cols as u64).to_le_bytes());
    for plane in [&q.w, &q.x, &q.y, &q.z] {
        for r in 0..rows {
            for c in 0..cols {
                out.extend_from_slice(&plane[(r, c)].to_le_bytes());
            }
        }
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn read_qimg(path: &Path) -> CliResult<ColorImageQ> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_qimg(&bytes).map_err(|e| format_error(path, e))
}

pub fn write_qimg(path: &Path, img: &ColorImageQ) -> CliResult<()> {
    let (rows, cols) = img.shape();
    let mut out = Vec::with_capacity(QIMG_MAGIC.len() + 16 + 24 * rows * cols);
    out.extend_from_slice(QIMG_MAGIC);
    out.extend_from_slice(&(rows as u64).to_le_bytes());
    out.extend_from_slice(&(cols as u64).to_le_bytes());
    let (r, g, b) = img.channels();
    for plane in [r, g, b] {
        for i in 0..rows {
            for j in 0..cols {
                out.extend_from_slice(&plane[(i, j)].to_le_bytes());
            }
        }
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}
