//! Extensions realized by matrices: an n x n matrix A determines an
//! (n+1)-dimensional Lie algebra with [e_j, e_{n+1}] = sum_i A_ij e_i on an
//! abelian pair, and an n x n bilinear form determines an (n+1)-dimensional
//! associative algebra with e_i e_j = A_{i-1,j-1} e_1.
//!
//! The Lie basis keeps the distinguished vector last, the associative basis
//! keeps it first.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraKind {
    Lie,
    Associative,
}

impl AlgebraKind {
    fn as_str(&self) -> &'static str {
        match self {
            AlgebraKind::Lie => "lie",
            AlgebraKind::Associative => "assoc",
        }
    }
}

/// Structure constants c[i][j][k]: [e_i, e_j] = sum_k c[i][j][k] e_k for
/// Lie, e_i e_j = sum_k c[i][j][k] e_k for associative. Dense desk-scale
/// storage.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    pub dim: usize,
    pub kind: AlgebraKind,
    pub backend: Backend,
    table: Vec<Scalar>, // dim^3, index (i * dim + j) * dim + k
}

impl StructureConstants {
    pub fn zero(dim: usize, kind: AlgebraKind, backend: Backend) -> Self {
        StructureConstants {
            dim,
            kind,
            backend,
            table: vec![Scalar::zero(backend); dim * dim * dim],
        }
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.table[(i * self.dim + j) * self.dim + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Scalar) {
        self.table[(i * self.dim + j) * self.dim + k] = v;
    }

    /// Product of basis elements i, j as a coefficient vector.
    fn product(&self, i: usize, j: usize) -> Vec<Scalar> {
        (0..self.dim).map(|k| self.at(i, j, k).clone()).collect()
    }

    /// Product of two coefficient vectors via bilinearity.
    fn product_vec(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(self.backend); self.dim];
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if y[j].is_zero() {
                    continue;
                }
                let c = x[i].clone() * y[j].clone();
                for k in 0..self.dim {
                    let t = self.at(i, j, k);
                    if !t.is_zero() {
                        out[k] = out[k].clone() + c.clone() * t.clone();
                    }
                }
            }
        }
        out
    }

    /// Antisymmetry + Jacobi on all basis triples.
    pub fn check_lie(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let a = self.at(i, j, k).clone();
                    let b = self.at(j, i, k).clone();
                    if !(a + b).is_zero() {
                        return Err(Error::JacobiViolation(i, j, k));
                    }
                }
            }
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    // [[i,j],k] + [[j,k],i] + [[k,i],j] = 0
                    let ij = self.product(i, j);
                    let jk = self.product(j, k);
                    let ki = self.product(k, i);
                    let ek = basis(self.dim, k, self.backend);
                    let ei = basis(self.dim, i, self.backend);
                    let ej = basis(self.dim, j, self.backend);
                    let t1 = self.product_vec(&ij, &ek);
                    let t2 = self.product_vec(&jk, &ei);
                    let t3 = self.product_vec(&ki, &ej);
                    for l in 0..self.dim {
                        let s = t1[l].clone() + t2[l].clone() + t3[l].clone();
                        if !s.is_zero() {
                            return Err(Error::JacobiViolation(i, j, k));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Associativity on all basis triples.
    pub fn check_associative(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let ij = self.product(i, j);
                    let jk = self.product(j, k);
                    let ek = basis(self.dim, k, self.backend);
                    let ei = basis(self.dim, i, self.backend);
                    let lhs = self.product_vec(&ij, &ek);
                    let rhs = self.product_vec(&ei, &jk);
                    for l in 0..self.dim {
                        if !(lhs[l].clone() - rhs[l].clone()).is_zero() {
                            return Err(Error::AssociativityViolation(i, j, k));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Transport along a basis change H (columns = new basis in old
    /// coordinates): c'[a][b][l] = sum H_ia H_jb c[i][j][k] (H^-1)_lk.
    pub fn transport(&self, h: &Matrix) -> Result<StructureConstants> {
        if h.rows() != self.dim || h.cols() != self.dim {
            return Err(Error::Shape("basis change must be dim x dim".into()));
        }
        let hinv = h.inverse()?;
        let mut out = StructureConstants::zero(self.dim, self.kind, self.backend);
        for a in 0..self.dim {
            for bj in 0..self.dim {
                // product of new basis vectors a, b in old coordinates
                let fa: Vec<Scalar> = (0..self.dim).map(|i| h.at(i, a).clone()).collect();
                let fb: Vec<Scalar> = (0..self.dim).map(|i| h.at(i, bj).clone()).collect();
                let prod_old = self.product_vec(&fa, &fb);
                // convert to new coordinates: coeff_l = sum_k (H^-1)_{l k} prod_k
                for l in 0..self.dim {
                    let mut s = Scalar::zero(self.backend);
                    for k in 0..self.dim {
                        s = s + hinv.at(l, k).clone() * prod_old[k].clone();
                    }
                    out.set(a, bj, l, s);
                }
            }
        }
        Ok(out)
    }

    /// Nonzero entries, sorted by (i, j, k), 1-based in the wire format.
    pub fn to_json(&self) -> Value {
        let mut entries = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let c = self.at(i, j, k);
                    if !c.is_zero() {
                        let z = c.to_complex64();
                        entries.push(json!({
                            "i": i + 1,
                            "j": j + 1,
                            "k": k + 1,
                            "c": [z.re, z.im],
                        }));
                    }
                }
            }
        }
        json!({
            "dim": self.dim,
            "kind": self.kind.as_str(),
            "table": entries,
        })
    }
}

fn basis(dim: usize, i: usize, backend: Backend) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(backend); dim];
    v[i] = Scalar::one(backend);
    v
}

/// The (n+1)-dimensional Lie algebra of the matrix A:
/// [e_j, e_{n+1}] = sum_i A_ij e_i, all other basis brackets zero.
pub fn lie_from_matrix(a: &Matrix) -> Result<StructureConstants> {
    if !a.is_square() {
        return Err(Error::Shape("lie_from_matrix needs a square matrix".into()));
    }
    let n = a.rows();
    let mut sc = StructureConstants::zero(n + 1, AlgebraKind::Lie, a.backend());
    for j in 0..n {
        for i in 0..n {
            let v = a.at(i, j).clone();
            if !v.is_zero() {
                sc.set(j, n, i, v.clone());
                sc.set(n, j, i, -v);
            }
        }
    }
    sc.check_lie()?;
    Ok(sc)
}

/// The transported matrix c * G^-1 A G; the basis change diag(G, c) carries
/// one bracket table to the other, which is verified exactly before
/// returning.
pub fn iso_transport(a: &Matrix, g: &Matrix, c: &Scalar) -> Result<Matrix> {
    if c.is_zero() {
        return Err(Error::ZeroScalar);
    }
    let ginv = g.inverse()?;
    let result = ginv.mul(a)?.mul(g)?.scale_by(c);
    // Structure-constant check: transporting the algebra of A along
    // H = diag(G, c) must give the algebra of the result.
    let n = a.rows();
    let mut h = Matrix::zeros(n + 1, n + 1, a.backend());
    for i in 0..n {
        for j in 0..n {
            h.set(i, j, g.at(i, j).clone());
        }
    }
    h.set(n, n, c.clone());
    let transported = lie_from_matrix(a)?.transport(&h)?;
    let direct = lie_from_matrix(&result)?;
    if transported != direct {
        return Err(Error::Invalid(
            "transported structure constants disagree with the direct construction".into(),
        ));
    }
    Ok(result)
}

/// The (n+1)-dimensional associative algebra of a bilinear form A:
/// e_i e_j = A_{i-1, j-1} e_1 for i, j >= 2, and e_1 annihilates everything.
pub fn assoc_from_form(a: &Matrix) -> Result<StructureConstants> {
    if !a.is_square() {
        return Err(Error::Shape("assoc_from_form needs a square matrix".into()));
    }
    let n = a.rows();
    let mut sc = StructureConstants::zero(n + 1, AlgebraKind::Associative, a.backend());
    for i in 0..n {
        for j in 0..n {
            let v = a.at(i, j).clone();
            if !v.is_zero() {
                sc.set(i + 1, j + 1, 0, v);
            }
        }
    }
    sc.check_associative()?;
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lie_of_1x1() {
        let a = Matrix::from_i64(&[&[5]]);
        let sc = lie_from_matrix(&a).unwrap();
        assert_eq!(sc.dim, 2);
        assert_eq!(*sc.at(0, 1, 0), Scalar::from_int(5));
        assert_eq!(*sc.at(1, 0, 0), Scalar::from_int(-5));
    }

    #[test]
    fn lie_of_zero_is_abelian() {
        let sc = lie_from_matrix(&Matrix::zeros(3, 3, Backend::Exact)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert!(sc.at(i, j, k).is_zero());
                }
            }
        }
    }

    #[test]
    fn lie_of_diagonal() {
        // diag(1, lambda) with lambda = 3
        let a = Matrix::from_i64(&[&[1, 0], &[0, 3]]);
        let sc = lie_from_matrix(&a).unwrap();
        assert_eq!(*sc.at(0, 2, 0), Scalar::from_int(1));
        assert_eq!(*sc.at(1, 2, 1), Scalar::from_int(3));
        sc.check_lie().unwrap();
    }

    #[test]
    fn transport_examples() {
        let a = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        // identity transport
        let r = iso_transport(&a, &Matrix::identity(2, Backend::Exact), &Scalar::from_int(1))
            .unwrap();
        assert_eq!(r, a);
        // G = diag(1,2), c = 1: G^-1 A G scales the off-diagonal entry by 2
        let g = Matrix::from_i64(&[&[1, 0], &[0, 2]]);
        let r = iso_transport(&a, &g, &Scalar::from_int(1)).unwrap();
        assert_eq!(r, Matrix::from_i64(&[&[1, 2], &[0, 1]]));
        // 1x1 scaling: [p] -> [2p]
        let p = Matrix::from_i64(&[&[3]]);
        let r = iso_transport(&p, &Matrix::identity(1, Backend::Exact), &Scalar::from_int(2))
            .unwrap();
        assert_eq!(r, Matrix::from_i64(&[&[6]]));
        // degenerate inputs
        assert!(iso_transport(&a, &Matrix::zeros(2, 2, Backend::Exact), &Scalar::from_int(1)).is_err());
        assert!(iso_transport(&a, &g, &Scalar::from_int(0)).is_err());
    }

    #[test]
    fn transport_preserves_class() {
        use crate::strata::classify_scalar_similarity;
        let a = Matrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 2]]);
        let g = Matrix::from_i64(&[&[1, 2, 0], &[0, 1, 1], &[3, 0, 1]]);
        let c = Scalar::from_int(2);
        let b = iso_transport(&a, &g, &c).unwrap();
        assert_eq!(
            classify_scalar_similarity(&a).unwrap(),
            classify_scalar_similarity(&b).unwrap()
        );
    }

    #[test]
    fn assoc_examples() {
        // diag(1,1): e2 e2 = e3 e3 = e1
        let sc = assoc_from_form(&Matrix::identity(2, Backend::Exact)).unwrap();
        assert_eq!(*sc.at(1, 1, 0), Scalar::from_int(1));
        assert_eq!(*sc.at(2, 2, 0), Scalar::from_int(1));
        assert!(sc.at(1, 2, 0).is_zero());
        // Gamma_2 = [[0,-1],[1,1]]: e2 e3 = -e1, e3 e2 = e1, e3 e3 = e1
        let g2 = Matrix::from_i64(&[&[0, -1], &[1, 1]]);
        let sc = assoc_from_form(&g2).unwrap();
        assert_eq!(*sc.at(1, 2, 0), Scalar::from_int(-1));
        assert_eq!(*sc.at(2, 1, 0), Scalar::from_int(1));
        assert_eq!(*sc.at(2, 2, 0), Scalar::from_int(1));
        sc.check_associative().unwrap();
    }

    #[test]
    fn json_lists_nonzero_sorted() {
        let a = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        let v = lie_from_matrix(&a).unwrap().to_json();
        let table = v["table"].as_array().unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table[0]["i"], 2);
        assert_eq!(table[0]["j"], 3);
        assert_eq!(table[0]["k"], 1);
    }
}
