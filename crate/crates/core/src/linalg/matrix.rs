use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(Error::InvalidArgument(format!("unknown field '{other}'"))),
        }
    }
}

/// Dense row-major matrix over the complex numbers with a field tag.
///
/// A `Real` matrix has every imaginary part exactly zero; writing a value
/// with a nonzero imaginary part promotes the tag to `Complex`.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
    field: Field,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
            field: Field::Real,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols, "entry count must equal rows*cols");
        Self {
            rows,
            cols,
            data: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            field: Field::Real,
        }
    }

    /// Builds a matrix from complex entries; the tag is `Real` iff every
    /// imaginary part is exactly zero.
    pub fn from_complex(rows: usize, cols: usize, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), rows * cols, "entry count must equal rows*cols");
        let field = if values.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        Self {
            rows,
            cols,
            data: values,
            field,
        }
    }

    /// Like `from_complex` but keeps an explicit `Complex` tag even when every
    /// entry happens to be real. A `Real` request with imaginary parts fails.
    pub fn with_field(rows: usize, cols: usize, values: Vec<Complex64>, field: Field) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        if field == Field::Real && values.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidArgument(
                "real matrix with nonzero imaginary part".into(),
            ));
        }
        Ok(Self {
            rows,
            cols,
            data: values,
            field,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = Complex64::new(f(i, j), 0.0);
            }
        }
        m
    }

    pub fn from_fn_complex(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_complex(rows, cols, data)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in values.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(x, 0.0);
        }
        m
    }

    /// Column vector from real entries.
    pub fn column(values: &[f64]) -> Self {
        Self::from_real(values.len(), 1, values)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    /// Real part of entry `(i, j)`.
    #[inline]
    pub fn re(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j].re
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        if value.im != 0.0 {
            self.field = Field::Complex;
        }
        self.data[i * self.cols + j] = value;
    }

    pub fn set_re(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = Complex64::new(value, 0.0);
    }

    /// Tags the matrix `Complex` without touching entries.
    pub fn into_complex_field(mut self) -> Self {
        self.field = Field::Complex;
        self
    }

    /// Real parts, row-major.
    pub fn real_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub fn real_part(&self) -> DenseMatrix {
        DenseMatrix::from_real(self.rows, self.cols, &self.real_parts())
    }

    pub fn imag_part(&self) -> DenseMatrix {
        let im: Vec<f64> = self.data.iter().map(|z| z.im).collect();
        DenseMatrix::from_real(self.rows, self.cols, &im)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        DenseMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
            field: self.field,
        }
    }

    pub fn conj(&self) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
            field: self.field,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> DenseMatrix {
        let mut t = self.transpose();
        for z in t.data.iter_mut() {
            *z = z.conj();
        }
        t
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
            field: self.field,
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> DenseMatrix {
        DenseMatrix::from_complex(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
            .with_field_at_least(self.field)
    }

    fn with_field_at_least(mut self, field: Field) -> Self {
        self.field = self.field.join(field);
        self
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation of `A` from `A*`; fails on non-square input.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        self.require_square()?;
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        Ok(dev)
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Result<DenseMatrix> {
        self.require_square()?;
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                let v = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                out.data[i * n + j] = if i == j { Complex64::new(v.re, 0.0) } else { v };
            }
        }
        Ok(out)
    }

    pub fn require_square(&self) -> Result<()> {
        if self.rows == self.cols {
            Ok(())
        } else {
            Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn require_same_dims(&self, other: &DenseMatrix) -> Result<()> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )))
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut data = vec![Complex64::new(0.0, 0.0); n * m];
        for i in 0..n {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[l * m..(l + 1) * m];
                let out = &mut data[i * m..(i + 1) * m];
                for (o, b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(DenseMatrix {
            rows: n,
            cols: m,
            data,
            field: self.field.join(other.field),
        })
    }

    pub fn try_add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.require_same_dims(other)?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
            field: self.field.join(other.field),
        })
    }

    pub fn try_sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.require_same_dims(other)?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
            field: self.field.join(other.field),
        })
    }

    /// Sub-block `[r0, r0 + rows) x [c0, c0 + cols)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> DenseMatrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        let mut data = Vec::with_capacity(rows * cols);
        for i in r0..r0 + rows {
            data.extend_from_slice(&self.data[i * self.cols + c0..i * self.cols + c0 + cols]);
        }
        DenseMatrix::from_complex(rows, cols, data).with_field_at_least(self.field)
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &DenseMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block.get(i, j);
            }
        }
        self.field = self.field.join(block.field);
    }

    /// Column `j` as a new `rows x 1` matrix.
    pub fn col(&self, j: usize) -> DenseMatrix {
        self.block(0, j, self.rows, 1)
    }

    /// Row `i` of real parts.
    pub fn row_re(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.get(i, j).re).collect()
    }

    /// Largest entrywise difference; fails on mismatched dimensions.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64> {
        self.require_same_dims(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Reorders rows and columns: `out[i][j] = self[p[i]][p[j]]`.
    pub fn permute_symmetric(&self, p: &[usize]) -> DenseMatrix {
        assert!(self.is_square() && p.len() == self.rows);
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.get(p[i], p[j]);
            }
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_add(rhs).expect("matrix dimensions must agree")
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_sub(rhs).expect("matrix dimensions must agree")
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs).expect("inner dimensions must agree")
    }
}

impl Neg for &DenseMatrix {
    type Output = DenseMatrix;
    fn neg(self) -> DenseMatrix {
        self.scale(-1.0)
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} ({})", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self.get(i, j);
                    if self.field == Field::Real {
                        format!("{:>10.6}", z.re)
                    } else {
                        format!("{:>8.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}
