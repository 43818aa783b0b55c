//! Cube ingestion and emission.
//!
//! Two interchange formats are supported:
//!
//! * **HSIB**: the native binary format. An ASCII magic line `HSIB1\n`,
//!   a one-line header `rows cols bands dtype has_labels has_wavelengths\n`
//!   with `dtype` in `{f32, f64}`, then raw little-endian band-major pixel
//!   data (band 1's N values, then band 2's, ...), then N little-endian
//!   u32 labels if `has_labels=1`, then L little-endian f64 wavelengths if
//!   `has_wavelengths=1`.
//! * **CSV**: L rows by N columns of decimal reals, no header. Labels
//!   travel in a separate single-column file.
//!
//! Values are held as f64 in memory regardless of the on-disk width.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use crate::cube::HsiCube;
use crate::error::{Error, Result};

/// On-disk element width for HSIB pixel data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    fn token(self) -> &'static str {
        match self {
            Dtype::F32 => "f32",
            Dtype::F64 => "f64",
        }
    }

    fn parse(tok: &str) -> Option<Self> {
        match tok {
            "f32" => Some(Dtype::F32),
            "f64" => Some(Dtype::F64),
            _ => None,
        }
    }
}

/// Cube file format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeFormat {
    Hsib,
    Csv,
}

/// Load a cube from `path` in the named format. CSV labels, when needed,
/// go through [`load_csv`].
pub fn load_cube(path: &Path, format: CubeFormat) -> Result<HsiCube> {
    match format {
        CubeFormat::Hsib => load_hsib(path),
        CubeFormat::Csv => load_csv(path, None),
    }
}

const MAGIC: &[u8] = b"HSIB1\n";

fn read_line<R: BufRead>(r: &mut R, path: &Path, what: &str) -> Result<String> {
    let mut buf = Vec::new();
    r.read_until(b'\n', &mut buf)?;
    if buf.last() != Some(&b'\n') {
        return Err(Error::format(path, format!("missing newline after {what}")));
    }
    buf.pop();
    String::from_utf8(buf).map_err(|_| Error::format(path, format!("non-ASCII {what}")))
}

fn truncation(e: std::io::Error, path: &Path, section: &str) -> Error {
    if e.kind() == ErrorKind::UnexpectedEof {
        Error::Dimension(format!(
            "{} ends inside the {section} section (file truncated?)",
            path.display()
        ))
    } else {
        Error::Io(e)
    }
}

/// Read an HSIB cube. Rejects malformed headers, truncated or oversized
/// files, and non-finite pixel values.
pub fn load_hsib(path: &Path) -> Result<HsiCube> {
    let mut r = BufReader::new(File::open(path)?);

    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)
        .map_err(|e| truncation(e, path, "magic"))?;
    if magic != MAGIC {
        return Err(Error::format(path, "bad magic, expected \"HSIB1\""));
    }

    let header = read_line(&mut r, path, "header")?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 6 {
        return Err(Error::format(
            path,
            format!("header has {} fields, expected 6", toks.len()),
        ));
    }
    let parse_count = |tok: &str, what: &str| -> Result<usize> {
        tok.parse::<usize>()
            .map_err(|_| Error::format(path, format!("bad {what}: {tok:?}")))
    };
    let rows = parse_count(toks[0], "rows")?;
    let cols = parse_count(toks[1], "cols")?;
    let bands = parse_count(toks[2], "bands")?;
    let dtype = Dtype::parse(toks[3])
        .ok_or_else(|| Error::format(path, format!("bad dtype: {:?}", toks[3])))?;
    let flag = |tok: &str, what: &str| -> Result<bool> {
        match tok {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(Error::format(path, format!("bad {what} flag: {tok:?}"))),
        }
    };
    let has_labels = flag(toks[4], "has_labels")?;
    let has_wavelengths = flag(toks[5], "has_wavelengths")?;

    let n = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Dimension("rows*cols overflows".into()))?;
    if n == 0 || bands == 0 {
        return Err(Error::Dimension(format!(
            "header declares {rows}x{cols}x{bands} cube"
        )));
    }

    let mut band_data = Vec::with_capacity(bands);
    match dtype {
        Dtype::F64 => {
            let mut buf = vec![0u8; n * 8];
            for _ in 0..bands {
                r.read_exact(&mut buf)
                    .map_err(|e| truncation(e, path, "pixel data"))?;
                band_data.push(
                    buf.chunks_exact(8)
                        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                        .collect::<Vec<f64>>(),
                );
            }
        }
        Dtype::F32 => {
            let mut buf = vec![0u8; n * 4];
            for _ in 0..bands {
                r.read_exact(&mut buf)
                    .map_err(|e| truncation(e, path, "pixel data"))?;
                band_data.push(
                    buf.chunks_exact(4)
                        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
                        .collect::<Vec<f64>>(),
                );
            }
        }
    }

    let labels = if has_labels {
        let mut buf = vec![0u8; n * 4];
        r.read_exact(&mut buf)
            .map_err(|e| truncation(e, path, "label"))?;
        Some(
            buf.chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect::<Vec<u32>>(),
        )
    } else {
        None
    };

    let wavelengths = if has_wavelengths {
        let mut buf = vec![0u8; bands * 8];
        r.read_exact(&mut buf)
            .map_err(|e| truncation(e, path, "wavelength"))?;
        Some(
            buf.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect::<Vec<f64>>(),
        )
    } else {
        None
    };

    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::Dimension(format!(
            "{} has trailing data beyond the declared sections",
            path.display()
        )));
    }

    let cube = HsiCube::new(
        rows,
        cols,
        band_data,
        (1..=bands as u32).collect(),
        labels,
        wavelengths,
    )?;
    if !cube.is_finite() {
        return Err(Error::format(path, "non-finite pixel value"));
    }
    Ok(cube)
}

/// Write a cube as HSIB. With `Dtype::F32` pixel values are narrowed on
/// disk; `Dtype::F64` round-trips band data bit-exactly.
pub fn write_hsib(cube: &HsiCube, path: &Path, dtype: Dtype) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    writeln!(
        w,
        "{} {} {} {} {} {}",
        cube.n_rows(),
        cube.n_cols(),
        cube.n_bands(),
        dtype.token(),
        cube.labels().is_some() as u8,
        cube.wavelengths().is_some() as u8
    )?;
    for band in cube.bands() {
        match dtype {
            Dtype::F64 => {
                for v in band {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            Dtype::F32 => {
                for v in band {
                    w.write_all(&(*v as f32).to_le_bytes())?;
                }
            }
        }
    }
    if let Some(labels) = cube.labels() {
        for lab in labels {
            w.write_all(&lab.to_le_bytes())?;
        }
    }
    if let Some(wl) = cube.wavelengths() {
        for v in wl {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a CSV cube (L rows of N comma-separated reals), optionally paired
/// with a single-column label file of N integers.
pub fn load_csv(path: &Path, labels_path: Option<&Path>) -> Result<HsiCube> {
    let text = std::fs::read_to_string(path)?;
    let mut band_data: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| {
                Error::format(path, format!("line {}: bad number {field:?}", lineno + 1))
            })?;
            if !v.is_finite() {
                return Err(Error::format(
                    path,
                    format!("line {}: non-finite value", lineno + 1),
                ));
            }
            row.push(v);
        }
        if let Some(first) = band_data.first() {
            if row.len() != first.len() {
                return Err(Error::Dimension(format!(
                    "line {}: {} columns, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        band_data.push(row);
    }
    if band_data.is_empty() {
        return Err(Error::format(path, "no data rows"));
    }

    let n = band_data[0].len();
    let labels = match labels_path {
        Some(lp) => Some(load_labels_csv(lp)?),
        None => None,
    };

    // A CSV cube is a flat pixel list: one row of N pixels.
    HsiCube::new(
        1,
        n,
        band_data.clone(),
        (1..=band_data.len() as u32).collect(),
        labels,
        None,
    )
}

/// Read a single-column CSV of integer class labels (0 = background).
pub fn load_labels_csv(path: &Path) -> Result<Vec<u32>> {
    let text = std::fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: u32 = line.parse().map_err(|_| {
            Error::format(path, format!("line {}: bad label {line:?}", lineno + 1))
        })?;
        labels.push(v);
    }
    Ok(labels)
}

/// Write cube band data as CSV (shortest decimal form that round-trips).
pub fn write_csv(cube: &HsiCube, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for band in cube.bands() {
        let mut first = true;
        for v in band {
            if !first {
                write!(w, ",")?;
            }
            write!(w, "{v}")?;
            first = false;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Write labels as a single-column CSV.
pub fn write_labels_csv(labels: &[u32], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for lab in labels {
        writeln!(w, "{lab}")?;
    }
    w.flush()?;
    Ok(())
}
