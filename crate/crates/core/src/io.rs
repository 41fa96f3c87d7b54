//! Text file formats: CSV vectors and matrices, filter files, pyramids,
//! binary PGM images. Writes go through a temporary file in the target
//! directory and are renamed into place only on success.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::compress::CompressionResult;
use crate::dilation::ScalingFunctionSamples;
use crate::error::{Error, Result};
use crate::filters::FilterCoefficients;
use crate::fwt::{Normalization, PyramidCoefficients};

/// Writes `contents` atomically: a partial file never appears at `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        // folds -0 into 0 so identical values print identically
        "0".to_string()
    } else {
        format!("{v:?}")
    }
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: '{}' is not a number", token.trim())))
}

/// Lines with content, `#` comments stripped, paired with 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Real values separated by commas, whitespace or newlines.
pub fn parse_signal(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        for tok in l.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            out.push(parse_f64(tok, line)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no values found".into()));
    }
    Ok(out)
}

pub fn format_signal(values: &[f64]) -> String {
    let mut s = String::new();
    for v in values {
        s.push_str(&format_f64(*v));
        s.push('\n');
    }
    s
}

/// One `re,im` pair per line; a line with a single value is real.
pub fn parse_complex(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        let toks: Vec<&str> = l.split(',').map(str::trim).collect();
        match toks.as_slice() {
            [re] => out.push(Complex64::new(parse_f64(re, line)?, 0.0)),
            [re, im] => out.push(Complex64::new(parse_f64(re, line)?, parse_f64(im, line)?)),
            _ => {
                return Err(Error::Parse(format!(
                    "line {line}: expected 're,im', found {} fields",
                    toks.len()
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no values found".into()));
    }
    Ok(out)
}

pub fn format_complex(values: &[Complex64]) -> String {
    let mut s = String::new();
    for v in values {
        let _ = writeln!(s, "{},{}", format_f64(v.re), format_f64(v.im));
    }
    s
}

/// Filter file: coefficients separated by whitespace, commas or newlines,
/// with an optional `# name: <name>` line.
pub fn parse_filter(text: &str) -> Result<FilterCoefficients> {
    let name = text.lines().find_map(|l| {
        l.trim()
            .strip_prefix('#')
            .and_then(|r| r.trim().strip_prefix("name:"))
            .map(|n| n.trim().to_string())
    });
    FilterCoefficients::new(parse_signal(text)?, name)
}

/// A built-in name, or else a path to a filter file.
pub fn load_filter(spec: &str) -> Result<FilterCoefficients> {
    match FilterCoefficients::builtin(spec) {
        Ok(f) => Ok(f),
        Err(e) => {
            let path = Path::new(spec);
            if path.exists() {
                let mut f = parse_filter(&fs::read_to_string(path)?)?;
                if f.name().is_none() {
                    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
                    f = FilterCoefficients::new(f.coeffs().to_vec(), Some(stem.to_string()))?;
                }
                Ok(f)
            } else {
                Err(e)
            }
        }
    }
}

/// Header line, then the flat coefficients one per line.
pub fn format_pyramid(p: &PyramidCoefficients) -> String {
    let blocks: Vec<String> = p.block_lengths().iter().map(usize::to_string).collect();
    let mut s = format!(
        "# pyramid levels={} normalization={} blocks={}\n",
        p.levels(),
        p.normalization.label(),
        blocks.join(",")
    );
    s.push_str(&format_signal(&p.flatten()));
    s
}

/// Reads [`format_pyramid`] output. Without a header the values are taken as
/// a flat pyramid with the given fallback levels and normalization.
pub fn parse_pyramid(text: &str, levels: usize, normalization: Normalization) -> Result<PyramidCoefficients> {
    let mut levels = levels;
    let mut normalization = normalization;
    if let Some(header) = text.lines().find_map(|l| l.trim().strip_prefix("# pyramid")) {
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("levels", v)) => {
                    levels = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad pyramid level count '{v}'")))?
                }
                Some(("normalization", v)) => normalization = Normalization::parse(v)?,
                Some(("blocks", _)) => {}
                _ => return Err(Error::Parse(format!("unknown pyramid header field '{field}'"))),
            }
        }
    }
    PyramidCoefficients::from_flat(&parse_signal(text)?, levels, normalization)
}

/// Comma-separated rows.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, l) in content_lines(text) {
        let row = l
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| parse_f64(t, line))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "line {line}: {} columns, expected {}",
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix".into()));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_row_iterator(r, c, rows.into_iter().flatten()))
}

pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format_f64(*v)).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// `x,value` lines with a header.
pub fn format_samples(samples: &ScalingFunctionSamples, column: &str) -> String {
    let mut s = format!("x,{column}\n");
    for (x, v) in samples.points() {
        let _ = writeln!(s, "{},{}", format_f64(x), format_f64(v));
    }
    s
}

pub fn format_report(rows: &[CompressionResult]) -> String {
    let mut s = String::from("basis,fraction,kept_count,l2_rel_error,linf_error\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:.6e},{:.6e}",
            r.basis,
            format_f64(r.kept_fraction),
            r.kept_count,
            r.l2_rel_error,
            r.linf_error
        );
    }
    s
}

/// Binary greyscale PGM (`P5`). Header tokens may be separated by any
/// whitespace and interleaved with `#` comments; `maxval > 255` means
/// big-endian 16-bit samples. Rows of the image become matrix rows.
pub fn parse_pgm(bytes: &[u8]) -> Result<DMatrix<f64>> {
    let mut pos = 0;
    let token = |pos: &mut usize| -> Result<String> {
        loop {
            match bytes.get(*pos) {
                Some(b'#') => {
                    while bytes.get(*pos).is_some_and(|b| *b != b'\n' && *b != b'\r') {
                        *pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => *pos += 1,
                Some(_) => break,
                None => return Err(Error::Parse("PGM header ends early".into())),
            }
        }
        let start = *pos;
        while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
            *pos += 1;
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = token(&mut pos)?;
    if magic != "P5" {
        return Err(Error::Parse(format!("expected PGM magic P5, found '{magic}'")));
    }
    let num = |what: &str, pos: &mut usize| -> Result<usize> {
        let t = token(pos)?;
        t.parse()
            .map_err(|_| Error::Parse(format!("PGM {what} '{t}' is not a positive integer")))
    };
    let width = num("width", &mut pos)?;
    let height = num("height", &mut pos)?;
    let maxval = num("maxval", &mut pos)?;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(Error::Parse(format!(
            "unsupported PGM geometry {width}x{height} maxval {maxval}"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Parse("PGM header is not followed by whitespace".into()));
    }
    pos += 1;
    let bpp = if maxval > 255 { 2 } else { 1 };
    let raster = &bytes[pos..];
    let needed = width * height * bpp;
    if raster.len() < needed {
        return Err(Error::Parse(format!(
            "PGM raster has {} bytes, expected {needed}",
            raster.len()
        )));
    }
    Ok(DMatrix::from_fn(height, width, |i, j| {
        let k = (i * width + j) * bpp;
        if bpp == 2 {
            u16::from_be_bytes([raster[k], raster[k + 1]]) as f64
        } else {
            raster[k] as f64
        }
    }))
}

/// 8-bit `P5` with values rounded and clamped to `0..=255`.
pub fn format_pgm(m: &DMatrix<f64>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", m.ncols(), m.nrows()).into_bytes();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            let v = if v.is_nan() { 0.0 } else { v.round().clamp(0.0, 255.0) };
            out.push(v as u8);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_formats() {
        let v = parse_signal("9\n1, 2\n# comment\n0 # trailing\n\n").unwrap();
        assert_eq!(v, vec![9., 1., 2., 0.]);
        assert_eq!(parse_signal(&format_signal(&[0.1, -0.0, 1e-300])).unwrap(), vec![0.1, 0.0, 1e-300]);
        assert!(parse_signal("1\nx\n").is_err());
        assert!(parse_signal("# only a comment\n").is_err());
    }

    #[test]
    fn complex_formats() {
        let v = vec![Complex64::new(1.5, -2.0), Complex64::new(0.0, 1.0)];
        assert_eq!(parse_complex(&format_complex(&v)).unwrap(), v);
        assert_eq!(parse_complex("3\n").unwrap(), vec![Complex64::new(3.0, 0.0)]);
        assert!(parse_complex("1,2,3\n").is_err());
    }

    #[test]
    fn filter_file() {
        let f = parse_filter("# name: box\n1\n1\n").unwrap();
        assert_eq!(f.name(), Some("box"));
        assert_eq!(f.coeffs(), &[1.0, 1.0]);
    }

    #[test]
    fn pyramid_round_trip() {
        let p = PyramidCoefficients::from_flat(&[3., 2., 4., 1.], 2, Normalization::Unnormalized).unwrap();
        let text = format_pyramid(&p);
        assert!(text.starts_with("# pyramid levels=2 normalization=paper blocks=1,1,2\n"));
        assert_eq!(parse_pyramid(&text, 1, Normalization::Orthonormal).unwrap(), p);
        let bare = parse_pyramid("1\n2\n3\n4\n", 1, Normalization::Orthonormal).unwrap();
        assert_eq!(bare.levels(), 1);
    }

    #[test]
    fn matrix_round_trip() {
        let m = DMatrix::from_row_slice(2, 3, &[1., 2., 3., 4., 5., 6.5]);
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
        assert!(parse_matrix("1,2\n3\n").is_err());
    }

    #[test]
    fn pgm_with_comments_and_odd_whitespace() {
        let mut bytes = b"P5 # magic\n# a comment line\n3\t2\n\n255\n".to_vec();
        bytes.extend([0u8, 10, 20, 30, 40, 255]);
        let m = parse_pgm(&bytes).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 3, &[0., 10., 20., 30., 40., 255.]));
        assert_eq!(parse_pgm(&format_pgm(&m)).unwrap(), m);
    }

    #[test]
    fn pgm_sixteen_bit_and_errors() {
        let mut bytes = b"P5\n2 1\n65535\n".to_vec();
        bytes.extend([0x01, 0x00, 0xff, 0xff]);
        let m = parse_pgm(&bytes).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(1, 2, &[256., 65535.]));
        assert!(parse_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\n\x00").is_err());
    }

    #[test]
    fn pgm_output_clamps() {
        let m = DMatrix::from_row_slice(1, 3, &[-4.0, 127.6, 300.0]);
        let bytes = format_pgm(&m);
        assert_eq!(&bytes[bytes.len() - 3..], &[0, 128, 255]);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"1\n").unwrap();
        write_atomic(&path, b"2\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "2\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
