//! Dense complex matrices over a single scalar backend, with the
//! elimination primitives (rank, kernel, inverse, determinant) every other
//! module is built on.
//!
//! Exact elimination pivots on any nonzero entry; float elimination treats
//! a pivot as zero when |pivot| <= eps * scale, where scale is the largest
//! entry magnitude of the input matrix.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{rat_from_wire, rat_to_wire, Backend, Scalar, DEFAULT_EPS};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    backend: Backend,
    entries: Vec<Scalar>, // row-major, rows*cols
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        let backend = entries.first().map(Scalar::backend).unwrap_or(Backend::Exact);
        for e in &entries {
            if e.backend() != backend {
                return Err(Error::MixedBackend(
                    "matrix entries must share one backend".into(),
                ));
            }
        }
        Ok(Matrix {
            rows,
            cols,
            backend,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize, backend: Backend) -> Self {
        Matrix {
            rows,
            cols,
            backend,
            entries: vec![Scalar::zero(backend); rows * cols],
        }
    }

    pub fn identity(n: usize, backend: Backend) -> Self {
        let mut m = Matrix::zeros(n, n, backend);
        for i in 0..n {
            m.set(i, i, Scalar::one(backend));
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Scalar>(rows: usize, cols: usize, mut f: F) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix::new(rows, cols, entries)
    }

    /// Exact matrix from integer rows; panics on ragged input (test/helper use).
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            for &v in *row {
                entries.push(Scalar::from_int(v));
            }
        }
        Matrix::new(r, c, entries).expect("from_i64")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        debug_assert_eq!(v.backend(), self.backend);
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// Largest effective tolerance of the entries (0 for exact).
    pub fn eps(&self) -> f64 {
        match self.backend {
            Backend::Exact => 0.0,
            Backend::Float => self
                .entries
                .iter()
                .map(|e| e.eps())
                .fold(DEFAULT_EPS, f64::max),
        }
    }

    /// Largest entry magnitude; the scale for relative zero tests.
    pub fn scale(&self) -> f64 {
        self.entries.iter().map(|e| e.abs()).fold(0.0, f64::max)
    }

    fn pivot_is_zero(&self, v: &Scalar, scale: f64) -> bool {
        match self.backend {
            Backend::Exact => v.is_zero(),
            Backend::Float => v.abs() <= self.eps() * scale.max(1.0),
        }
    }

    pub fn same_shape(&self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        self.check_backend(other)
    }

    pub fn check_backend(&self, other: &Matrix) -> Result<()> {
        if self.backend != other.backend {
            return Err(Error::MixedBackend(format!(
                "{} vs {}",
                self.backend, other.backend
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Matrix::new(self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Matrix::new(self.rows, self.cols, entries)
    }

    pub fn scale_by(&self, c: &Scalar) -> Matrix {
        let entries = self
            .entries
            .iter()
            .map(|a| a.clone() * c.clone())
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            backend: self.backend,
            entries,
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_backend(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols, self.backend);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j).clone() + a.clone() * other.at(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows, self.backend);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn conj(&self) -> Matrix {
        let entries = self.entries.iter().map(Scalar::conj).collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            backend: self.backend,
            entries,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    /// Entrywise equality at the backend tolerance.
    pub fn approx_eq(&self, other: &Matrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.approx_eq(b))
    }

    /// Frobenius norm as a double.
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let a = e.abs();
                a * a
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_float_backend(&self, eps: f64) -> Matrix {
        let entries = self
            .entries
            .iter()
            .map(|e| e.to_float_backend(eps))
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            backend: Backend::Float,
            entries,
        }
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let scale = self.scale();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            // Largest-magnitude pivot keeps float elimination stable and is
            // harmless (any nonzero works) for exact arithmetic.
            let mut best: Option<(usize, f64)> = None;
            for r in row..m.rows {
                let v = m.at(r, col);
                if !m.pivot_is_zero(v, scale) {
                    let a = v.abs();
                    if best.map(|(_, b)| a > b).unwrap_or(true) {
                        best = Some((r, a));
                    }
                }
            }
            let Some((prow, _)) = best else { continue };
            if prow != row {
                for c in 0..m.cols {
                    let tmp = m.at(row, c).clone();
                    let v = m.at(prow, c).clone();
                    m.set(row, c, v);
                    m.set(prow, c, tmp);
                }
            }
            let inv = m.at(row, col).inv().expect("nonzero pivot");
            for c in 0..m.cols {
                let v = m.at(row, c).clone() * inv.clone();
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.at(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..m.cols {
                    let v = m.at(r, c).clone() - f.clone() * m.at(row, c).clone();
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Row rank via Gaussian elimination.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, dimension cols - rank.
    /// Each vector is returned as a cols x 1 matrix.
    pub fn kernel_basis(&self) -> Vec<Matrix> {
        let (r, pivots) = self.rref();
        let mut free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.sort_unstable();
        let mut basis = Vec::new();
        for &f in &free {
            let mut v = Matrix::zeros(self.cols, 1, self.backend);
            v.set(f, 0, Scalar::one(self.backend));
            for (prow, &pcol) in pivots.iter().enumerate() {
                v.set(pcol, 0, -r.at(prow, f).clone());
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant by elimination; square input only.
    pub fn det(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::Shape("det of non-square matrix".into()));
        }
        let mut m = self.clone();
        let scale = self.scale();
        let n = m.rows;
        let mut det = Scalar::one(self.backend);
        for col in 0..n {
            let mut prow = None;
            let mut best = 0.0;
            for r in col..n {
                let v = m.at(r, col);
                if !m.pivot_is_zero(v, scale) {
                    let a = v.abs();
                    if prow.is_none() || a > best {
                        prow = Some(r);
                        best = a;
                    }
                }
            }
            let Some(prow) = prow else {
                return Ok(Scalar::zero(self.backend));
            };
            if prow != col {
                det = -det;
                for c in 0..n {
                    let tmp = m.at(col, c).clone();
                    let v = m.at(prow, c).clone();
                    m.set(col, c, v);
                    m.set(prow, c, tmp);
                }
            }
            let p = m.at(col, col).clone();
            det = det * p.clone();
            let inv = p.inv()?;
            for r in col + 1..n {
                let f = m.at(r, col).clone() * inv.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m.at(r, c).clone() - f.clone() * m.at(col, c).clone();
                    m.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    /// Inverse via Gauss-Jordan; `SingularG` when rank-deficient.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n, self.backend);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one(self.backend));
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
            return Err(Error::SingularG);
        }
        let mut out = Matrix::zeros(n, n, self.backend);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.at(i, n + j).clone());
            }
        }
        Ok(out)
    }

    /// Direct sum: block diagonal of self and other.
    pub fn direct_sum(&self, other: &Matrix) -> Result<Matrix> {
        self.check_backend(other)?;
        let mut out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols, self.backend);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.at(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.at(i, j).clone());
            }
        }
        Ok(out)
    }

    /// Row-major flattening as a cols*rows x 1 column vector.
    pub fn vec(&self) -> Matrix {
        Matrix {
            rows: self.rows * self.cols,
            cols: 1,
            backend: self.backend,
            entries: self.entries.clone(),
        }
    }

    /// Inverse of `vec`: reshape a column vector into rows x cols.
    pub fn unvec(v: &Matrix, rows: usize, cols: usize) -> Result<Matrix> {
        if v.cols != 1 || v.rows != rows * cols {
            return Err(Error::Shape("unvec shape mismatch".into()));
        }
        Matrix::new(rows, cols, v.entries.clone())
    }

    // ---- JSON wire format -------------------------------------------------
    //
    // {"backend":"exact"|"float","rows":R,"cols":C,"entries":[[re,im],...]}
    // exact re/im are "p/q" strings (q > 0, gcd-reduced), float re/im are
    // JSON numbers; row-major order.

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| match e {
                Scalar::Exact { re, im } => json!([rat_to_wire(re), rat_to_wire(im)]),
                Scalar::Float { re, im, .. } => json!([re, im]),
            })
            .collect();
        json!({
            "backend": self.backend.to_string(),
            "rows": self.rows,
            "cols": self.cols,
            "entries": entries,
        })
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }

    pub fn from_json(v: &Value) -> Result<Matrix> {
        let backend = match v.get("backend").and_then(Value::as_str) {
            Some("exact") => Backend::Exact,
            Some("float") => Backend::Float,
            other => return Err(Error::Parse(format!("bad backend field {other:?}"))),
        };
        let rows = v
            .get("rows")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing rows".into()))? as usize;
        let cols = v
            .get("cols")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing cols".into()))? as usize;
        let eps = v.get("eps").and_then(Value::as_f64).unwrap_or(DEFAULT_EPS);
        let raw = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing entries".into()))?;
        let mut entries = Vec::with_capacity(raw.len());
        for pair in raw {
            let pair = pair
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Parse("entry must be a [re, im] pair".into()))?;
            match backend {
                Backend::Exact => {
                    let re = pair[0]
                        .as_str()
                        .ok_or_else(|| Error::Parse("exact entry parts must be strings".into()))?;
                    let im = pair[1]
                        .as_str()
                        .ok_or_else(|| Error::Parse("exact entry parts must be strings".into()))?;
                    entries.push(Scalar::exact(rat_from_wire(re)?, rat_from_wire(im)?));
                }
                Backend::Float => {
                    let re = pair[0]
                        .as_f64()
                        .ok_or_else(|| Error::Parse("float entry parts must be numbers".into()))?;
                    let im = pair[1]
                        .as_f64()
                        .ok_or_else(|| Error::Parse("float entry parts must be numbers".into()))?;
                    entries.push(Scalar::float_with_eps(re, im, eps));
                }
            }
        }
        Matrix::new(rows, cols, entries)
    }

    pub fn from_json_str(s: &str) -> Result<Matrix> {
        let v: Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
        Matrix::from_json(&v)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::identity(3, Backend::Exact).rank(), 3);
        assert_eq!(Matrix::zeros(2, 2, Backend::Exact).rank(), 0);
        // the 2x2 in the 3-dim classical list with a unit superdiagonal
        let m = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_nullity() {
        let m = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let r = m.rank();
        let k = m.kernel_basis();
        assert_eq!(r + k.len(), m.cols());
        for v in &k {
            assert!(m.mul(v).unwrap().is_zero());
        }
    }

    #[test]
    fn kernel_examples() {
        assert!(Matrix::identity(4, Backend::Exact).kernel_basis().is_empty());
        assert_eq!(Matrix::zeros(2, 3, Backend::Exact).kernel_basis().len(), 3);
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_i64(&[&[1, 2], &[3, 5]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(2, Backend::Exact));
        assert!(Matrix::zeros(2, 2, Backend::Exact).inverse().is_err());
    }

    #[test]
    fn det_values() {
        let m = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        assert_eq!(m.det().unwrap(), Scalar::from_int(-2));
    }

    #[test]
    fn float_rank_uses_relative_threshold() {
        let m = Matrix::new(
            2,
            2,
            vec![
                Scalar::float(1e6, 0.0),
                Scalar::float(0.0, 0.0),
                Scalar::float(0.0, 0.0),
                Scalar::float(1e-12, 0.0),
            ],
        )
        .unwrap();
        // 1e-12 is below eps * scale = 1e-9 * 1e6
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn json_round_trip_exact() {
        let m = Matrix::from_fn(2, 2, |i, j| {
            if i == j {
                Scalar::from_ratio(1, 2)
            } else {
                Scalar::i(Backend::Exact)
            }
        })
        .unwrap();
        let s = m.to_json_string();
        assert!(s.contains("\"1/2\""));
        let back = Matrix::from_json_str(&s).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn json_round_trip_float() {
        let m = Matrix::new(
            1,
            2,
            vec![Scalar::float(0.5, -1.0), Scalar::float(2.0, 0.0)],
        )
        .unwrap();
        let back = Matrix::from_json_str(&m.to_json_string()).unwrap();
        assert!(m.approx_eq(&back));
    }
}
