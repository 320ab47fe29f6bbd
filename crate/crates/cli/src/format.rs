//! Text formats for matrices, factor bundles, C-systems and certificates.
//!
//! Every format starts with a header line; matrices follow as `CMAT` blocks.
//! Scalars are printed in scientific notation with 17 significant digits, so
//! every finite double survives a render/parse round trip bit for bit.

use std::fmt::Write as _;

use cpsd_core::types::{CSystem, ExtremalCertificate, PsdFactorization};
use cpsd_core::{DenseMatrix, Field};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    At { line: usize, msg: String },
    #[error("unexpected end of input: {0}")]
    Eof(String),
}

fn at(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::At {
        line,
        msg: msg.into(),
    }
}

pub fn render_scalar(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{sign}{:.16e}i", z.re, z.im.abs())
}

pub fn parse_scalar(tok: &str) -> Option<f64> {
    tok.parse().ok()
}

/// Parses `a+bi` or `a-bi`; a bare real is accepted with zero imaginary part.
pub fn parse_complex(tok: &str) -> Option<Complex64> {
    let Some(body) = tok.strip_suffix('i') else {
        return parse_scalar(tok).map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
    let re = parse_scalar(&body[..split])?;
    let im_abs = parse_scalar(&body[split + 1..])?;
    if im_abs.is_sign_negative() {
        return None;
    }
    let im = if bytes[split] == b'-' { -im_abs } else { im_abs };
    Some(Complex64::new(re, im))
}

pub fn render_matrix(m: &DenseMatrix) -> String {
    let mut out = format!("CMAT v1 {} {} {}\n", m.field(), m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| match m.field() {
                Field::Real => render_scalar(m.re(i, j)),
                Field::Complex => render_complex(m.get(i, j)),
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn render_factors(f: &PsdFactorization) -> String {
    let mut out = format!("CFAC v1 {} {} {}\n", f.field, f.len(), f.d);
    for x in &f.factors {
        let x = match f.field {
            Field::Complex => x.clone().into_complex_field(),
            Field::Real => x.clone(),
        };
        out.push_str(&render_matrix(&x));
    }
    out
}

pub fn render_csystem(s: &CSystem) -> String {
    let block = |vs: &[Vec<f64>]| {
        let flat: Vec<f64> = vs.iter().flatten().copied().collect();
        render_matrix(&DenseMatrix::from_real(vs.len(), s.r, &flat))
    };
    format!("CSYS v1 {} {} {}\n{}{}", s.m(), s.n(), s.r, block(&s.xs), block(&s.ys))
}

pub fn render_certificate(c: &ExtremalCertificate) -> String {
    format!(
        "CERT v1 {} {}\n{}{}{}",
        c.m(),
        c.n(),
        render_matrix(&c.c),
        render_matrix(&c.e),
        render_matrix(&c.omega)
    )
}

/// Line cursor that skips blank lines and `#` comments.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
        }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        for (i, l) in self.inner.by_ref() {
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok((i + 1, t));
            }
        }
        Err(ParseError::Eof(format!("expected {what}")))
    }

    fn finish(mut self) -> Result<(), ParseError> {
        match self.next_line("") {
            Ok((line, _)) => Err(at(line, "trailing content after the last block")),
            Err(_) => Ok(()),
        }
    }
}

fn header<'a>(line: usize, text: &'a str, tag: &str, fields: usize) -> Result<Vec<&'a str>, ParseError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.first() != Some(&tag) {
        return Err(at(line, format!("expected a {tag} header, found '{text}'")));
    }
    if toks.get(1) != Some(&"v1") {
        return Err(at(line, format!("unsupported {tag} version")));
    }
    if toks.len() != fields + 2 {
        return Err(at(line, format!("{tag} header needs {fields} fields after the version")));
    }
    Ok(toks[2..].to_vec())
}

fn count(line: usize, tok: &str) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| at(line, format!("'{tok}' is not a nonnegative integer")))
}

fn field(line: usize, tok: &str) -> Result<Field, ParseError> {
    tok.parse().map_err(|_| at(line, format!("unknown field '{tok}'")))
}

fn matrix_block(lines: &mut Lines) -> Result<DenseMatrix, ParseError> {
    let (hline, text) = lines.next_line("a CMAT header")?;
    let h = header(hline, text, "CMAT", 3)?;
    let (fld, rows, cols) = (field(hline, h[0])?, count(hline, h[1])?, count(hline, h[2])?);
    let mut data = Vec::with_capacity(rows * cols);
    // Rows of a matrix without columns are blank lines.
    for _ in 0..if cols == 0 { 0 } else { rows } {
        let (line, text) = lines.next_line("a matrix row")?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != cols {
            return Err(at(line, format!("expected {cols} entries, found {}", toks.len())));
        }
        for tok in toks {
            let z = match fld {
                Field::Real => parse_scalar(tok).map(|x| Complex64::new(x, 0.0)),
                Field::Complex => parse_complex(tok),
            };
            data.push(z.ok_or_else(|| at(line, format!("malformed {fld} entry '{tok}'")))?);
        }
    }
    DenseMatrix::with_field(rows, cols, data, fld).map_err(|e| at(hline, e.to_string()))
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix, ParseError> {
    let mut lines = Lines::new(text);
    let m = matrix_block(&mut lines)?;
    lines.finish()?;
    Ok(m)
}

pub fn parse_factors(text: &str) -> Result<PsdFactorization, ParseError> {
    let mut lines = Lines::new(text);
    let (hline, htext) = lines.next_line("a CFAC header")?;
    let h = header(hline, htext, "CFAC", 3)?;
    let (fld, n, d) = (field(hline, h[0])?, count(hline, h[1])?, count(hline, h[2])?);
    let mut factors = Vec::with_capacity(n);
    for k in 0..n {
        let x = matrix_block(&mut lines)?;
        if x.dims() != (d, d) || x.field() != fld {
            return Err(at(
                hline,
                format!(
                    "block {k} is a {} {}x{} matrix, expected {fld} {d}x{d}",
                    x.field(),
                    x.rows(),
                    x.cols()
                ),
            ));
        }
        factors.push(x);
    }
    lines.finish()?;
    let mut f = PsdFactorization::from_factors(fld, factors).map_err(|e| at(hline, e.to_string()))?;
    f.d = d;
    Ok(f)
}

pub fn parse_csystem(text: &str) -> Result<CSystem, ParseError> {
    let mut lines = Lines::new(text);
    let (hline, htext) = lines.next_line("a CSYS header")?;
    let h = header(hline, htext, "CSYS", 3)?;
    let (m, n, r) = (count(hline, h[0])?, count(hline, h[1])?, count(hline, h[2])?);
    let mut blocks = Vec::with_capacity(2);
    for (rows, who) in [(m, "x"), (n, "y")] {
        let b = matrix_block(&mut lines)?;
        if b.dims() != (rows, r) || b.field() != Field::Real {
            return Err(at(hline, format!("{who} block must be a real {rows}x{r} matrix")));
        }
        blocks.push((0..rows).map(|i| b.row_re(i)).collect::<Vec<_>>());
    }
    lines.finish()?;
    let ys = blocks.pop().unwrap_or_default();
    let xs = blocks.pop().unwrap_or_default();
    CSystem::new(r, xs, ys).map_err(|e| at(hline, e.to_string()))
}

pub fn parse_certificate(text: &str) -> Result<ExtremalCertificate, ParseError> {
    let mut lines = Lines::new(text);
    let (hline, htext) = lines.next_line("a CERT header")?;
    let h = header(hline, htext, "CERT", 2)?;
    let (m, n) = (count(hline, h[0])?, count(hline, h[1])?);
    let c = matrix_block(&mut lines)?;
    let e = matrix_block(&mut lines)?;
    let omega = matrix_block(&mut lines)?;
    lines.finish()?;
    if c.dims() != (m, n) || e.dims() != (m + n, m + n) || omega.dims() != (m + n, m + n) {
        return Err(at(hline, format!("blocks do not match C of size {m}x{n}")));
    }
    Ok(ExtremalCertificate { c, e, omega })
}
