//! Eigenvalues and Jordan structure (Segre characteristics).
//!
//! Block sizes come from the rank sequence r_k = rank((M - lambda I)^k):
//! the number of blocks of size >= k is r_{k-1} - r_k.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::{char_poly, roots};
use crate::scalar::{Backend, Scalar};

/// Segre data: per eigenvalue, the nonincreasing Jordan block sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanStructure {
    /// (eigenvalue, nonincreasing block sizes), sorted by
    /// (total multiplicity desc, then eigenvalue order).
    pub entries: Vec<(Scalar, Vec<usize>)>,
}

impl JordanStructure {
    pub fn dimension(&self) -> usize {
        self.entries
            .iter()
            .map(|(_, b)| b.iter().sum::<usize>())
            .sum()
    }

    /// Sort into the canonical presentation order.
    fn canonicalize(&mut self) {
        self.entries.sort_by(|a, b| {
            let ma: usize = a.1.iter().sum();
            let mb: usize = b.1.iter().sum();
            mb.cmp(&ma).then_with(|| a.0.order_cmp(&b.0))
        });
    }

    /// Structural equality of eigenvalues (at tolerance) and block data.
    pub fn approx_eq(&self, other: &JordanStructure) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.0.approx_eq(&b.0) && a.1 == b.1)
    }

    /// The same structure with every eigenvalue multiplied by u.
    pub fn scale_spectrum(&self, u: &Scalar) -> JordanStructure {
        let mut s = JordanStructure {
            entries: self
                .entries
                .iter()
                .map(|(v, b)| (v.clone() * u.clone(), b.clone()))
                .collect(),
        };
        s.canonicalize();
        s
    }

    /// Block-size data only, forgetting eigenvalues: the multiset of Segre
    /// lists sorted descending.
    pub fn shape(&self) -> Vec<Vec<usize>> {
        let mut shapes: Vec<Vec<usize>> = self.entries.iter().map(|(_, b)| b.clone()).collect();
        shapes.sort();
        shapes.reverse();
        shapes
    }

    pub fn to_json(&self) -> Value {
        let spectrum: Vec<Value> = self
            .entries
            .iter()
            .map(|(v, blocks)| {
                let z = v.to_complex64();
                json!({"value": [z.re, z.im], "blocks": blocks})
            })
            .collect();
        json!({ "spectrum": spectrum })
    }
}

/// Eigenvalues with algebraic multiplicities, sorted by the scalar order.
///
/// Exact backend: requires the characteristic polynomial to split over the
/// Gaussian rationals (`IrreducibleFactor` otherwise, signalling a retry on
/// the float backend). Float backend: numeric roots clustered by
/// single-linkage at eps * max(1, spectral scale).
pub fn eigenvalues(m: &Matrix) -> Result<Vec<(Scalar, usize)>> {
    let p = char_poly(m)?;
    let raw = roots(&p)?;
    match m.backend() {
        Backend::Exact => Ok(raw),
        Backend::Float => Ok(cluster(raw, m.eps())),
    }
}

fn cluster(raw: Vec<(Scalar, usize)>, eps: f64) -> Vec<(Scalar, usize)> {
    let vals: Vec<Complex64> = raw.iter().map(|(s, _)| s.to_complex64()).collect();
    let scale = vals.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let thresh = eps * scale;
    let n = vals.len();
    // Single-linkage components of the "distance <= thresh" graph.
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(comp: &mut Vec<usize>, i: usize) -> usize {
        if comp[i] != i {
            let r = find(comp, comp[i]);
            comp[i] = r;
        }
        comp[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if (vals[i] - vals[j]).norm() <= thresh {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                if a != b {
                    comp[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (Complex64, usize)> =
        std::collections::BTreeMap::new();
    for i in 0..n {
        let r = find(&mut comp, i);
        let mult = raw[i].1;
        let e = groups.entry(r).or_insert((Complex64::new(0.0, 0.0), 0));
        e.0 += vals[i] * mult as f64;
        e.1 += mult;
    }
    let mut out: Vec<(Scalar, usize)> = groups
        .values()
        .map(|(sum, k)| {
            let c = sum / *k as f64;
            (Scalar::float_with_eps(c.re, c.im, eps), *k)
        })
        .collect();
    out.sort_by(|a, b| a.0.order_cmp(&b.0));
    out
}

/// Segre characteristic of `lambda`: the Jordan block sizes from the rank
/// sequence; the sequence stops at the first stationary point.
pub fn segre(m: &Matrix, lambda: &Scalar) -> Result<Vec<usize>> {
    if !m.is_square() {
        return Err(Error::Shape("segre of non-square matrix".into()));
    }
    let n = m.rows();
    let shifted = shift(m, lambda)?;
    let mut ranks = vec![n];
    let mut power = shifted.clone();
    loop {
        let r = power.rank();
        ranks.push(r);
        if r == *ranks.iter().rev().nth(1).unwrap() || r == 0 {
            break;
        }
        power = power.mul(&shifted)?;
    }
    if ranks[1] == n {
        return Err(Error::NotAnEigenvalue(lambda.to_string()));
    }
    // blocks[k-1] = number of blocks of size >= k, i.e. r_{k-1} - r_k.
    let mut blocks = Vec::new();
    for k in 1..ranks.len() {
        blocks.push(ranks[k - 1] - ranks[k]);
    }
    let mut sizes = Vec::new();
    for (k, &count) in blocks.iter().enumerate() {
        let next = blocks.get(k + 1).copied().unwrap_or(0);
        for _ in 0..count.saturating_sub(next) {
            sizes.push(k + 1);
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(sizes)
}

fn shift(m: &Matrix, lambda: &Scalar) -> Result<Matrix> {
    let mut s = m.clone();
    for i in 0..m.rows() {
        let v = s.at(i, i).clone() - lambda.clone();
        s.set(i, i, v);
    }
    Ok(s)
}

/// Full Jordan structure: eigenvalues plus Segre data.
pub fn jordan_structure(m: &Matrix) -> Result<JordanStructure> {
    let eigs = eigenvalues(m)?;
    let mut entries = Vec::new();
    for (v, mult) in eigs {
        let blocks = segre(m, &v)?;
        debug_assert_eq!(blocks.iter().sum::<usize>(), mult);
        entries.push((v, blocks));
    }
    let mut js = JordanStructure { entries };
    js.canonicalize();
    Ok(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks_of(js: &JordanStructure, v: &Scalar) -> Vec<usize> {
        js.entries
            .iter()
            .find(|(e, _)| e == v)
            .map(|(_, b)| b.clone())
            .expect("eigenvalue present")
    }

    #[test]
    fn eigenvalue_examples() {
        // diag(3,3,5)
        let m = Matrix::from_i64(&[&[3, 0, 0], &[0, 3, 0], &[0, 0, 5]]);
        let e = eigenvalues(&m).unwrap();
        assert_eq!(e, vec![(Scalar::from_int(3), 2), (Scalar::from_int(5), 1)]);
        // J2(0)
        let m = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        assert_eq!(eigenvalues(&m).unwrap(), vec![(Scalar::from_int(0), 2)]);
        // canonical matrix of [2,1,0] at (1:2)
        let m = Matrix::from_i64(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 2]]);
        let e = eigenvalues(&m).unwrap();
        assert_eq!(e, vec![(Scalar::from_int(1), 2), (Scalar::from_int(2), 1)]);
    }

    #[test]
    fn segre_examples() {
        // J2(1) + diag(1): rank sequence 3, 1, 0 -> [2, 1]
        let m = Matrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(segre(&m, &Scalar::from_int(1)).unwrap(), vec![2, 1]);
        // diag(1,1)
        let m = Matrix::from_i64(&[&[1, 0], &[0, 1]]);
        assert_eq!(segre(&m, &Scalar::from_int(1)).unwrap(), vec![1, 1]);
        // not an eigenvalue
        assert!(matches!(
            segre(&m, &Scalar::from_int(7)),
            Err(Error::NotAnEigenvalue(_))
        ));
    }

    #[test]
    fn jordan_structure_examples() {
        // [[1,1],[0,1]] -> {1: [2]}
        let m = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        let js = jordan_structure(&m).unwrap();
        assert_eq!(js.entries, vec![(Scalar::from_int(1), vec![2])]);
        // D(1:1:2) = [1] + chain3(1,1,2) -> {1: [2,1], 2: [1]}
        let m = Matrix::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 1, 1, 0],
            &[0, 0, 1, 1],
            &[0, 0, 0, 2],
        ]);
        let js = jordan_structure(&m).unwrap();
        assert_eq!(blocks_of(&js, &Scalar::from_int(1)), vec![2, 1]);
        assert_eq!(blocks_of(&js, &Scalar::from_int(2)), vec![1]);
        // zero 3x3 -> {0: [1,1,1]}
        let js = jordan_structure(&Matrix::zeros(3, 3, Backend::Exact)).unwrap();
        assert_eq!(js.entries, vec![(Scalar::from_int(0), vec![1, 1, 1])]);
    }

    #[test]
    fn block_count_identity() {
        let m = Matrix::from_i64(&[
            &[2, 1, 0, 0],
            &[0, 2, 0, 0],
            &[0, 0, 2, 0],
            &[0, 0, 0, 5],
        ]);
        let lam = Scalar::from_int(2);
        let blocks = segre(&m, &lam).unwrap();
        let mut shifted = m.clone();
        for i in 0..4 {
            let v = shifted.at(i, i).clone() - lam.clone();
            shifted.set(i, i, v);
        }
        assert_eq!(blocks.len(), 4 - shifted.rank());
        assert_eq!(blocks, vec![2, 1]);
    }

    #[test]
    fn float_clustering() {
        let mut m = Matrix::zeros(3, 3, Backend::Exact).to_float_backend(1e-6);
        m.set(0, 0, Scalar::float_with_eps(1.0, 0.0, 1e-6));
        m.set(1, 1, Scalar::float_with_eps(1.0 + 1e-9, 0.0, 1e-6));
        m.set(2, 2, Scalar::float_with_eps(2.0, 0.0, 1e-6));
        let e = eigenvalues(&m).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].1, 2);
    }

    #[test]
    fn conjugation_invariance() {
        let m = Matrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 4]]);
        let g = Matrix::from_i64(&[&[1, 2, 0], &[0, 1, 3], &[1, 0, 1]]);
        let conj = g.inverse().unwrap().mul(&m).unwrap().mul(&g).unwrap();
        assert!(jordan_structure(&m)
            .unwrap()
            .approx_eq(&jordan_structure(&conj).unwrap()));
    }
}
