//! Deformation data of a matrix class: Arnold's parameter count,
//! centralizer and tangent-space computations, miniversal complements, and
//! the jump/degeneration order between classes.

use crate::error::{Error, Result};
use crate::jordan::{jordan_structure, JordanStructure};
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar};
use crate::strata::{canonical_matrix, MultiIndex};

/// Group action on square matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    /// G . A = G^-1 A G; tangent directions [A, B].
    Similarity,
    /// G . A = G^T A G; tangent directions X^T A + A X.
    Cogredient,
}

/// Arnold's parameter count: sum over eigenvalues of n1 + 3 n2 + 5 n3 + ...
/// with n1 >= n2 >= ... the block sizes of the eigenvalue.
pub fn arnold_count(js: &JordanStructure) -> usize {
    js.entries
        .iter()
        .map(|(_, blocks)| {
            blocks
                .iter()
                .enumerate()
                .map(|(i, b)| (2 * i + 1) * b)
                .sum::<usize>()
        })
        .sum()
}

/// Dimension of the centralizer of A: the kernel of B -> AB - BA on the
/// n^2-dimensional matrix space.
pub fn centralizer_dim(a: &Matrix) -> Result<usize> {
    let op = action_operator(a, Action::Similarity)?;
    Ok(op.cols() - op.rank())
}

/// Matrix of the infinitesimal action on vec(X), row-major convention.
fn action_operator(a: &Matrix, action: Action) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Shape("action operator needs a square matrix".into()));
    }
    let n = a.rows();
    let backend = a.backend();
    let dim = n * n;
    let mut op = Matrix::zeros(dim, dim, backend);
    for k in 0..n {
        for l in 0..n {
            let col = k * n + l;
            let mut e = Matrix::zeros(n, n, backend);
            e.set(k, l, Scalar::one(backend));
            let image = match action {
                Action::Similarity => a.mul(&e)?.sub(&e.mul(a)?)?,
                Action::Cogredient => e.transpose().mul(a)?.add(&a.mul(&e)?)?,
            };
            for p in 0..n {
                for q in 0..n {
                    op.set(p * n + q, col, image.at(p, q).clone());
                }
            }
        }
    }
    Ok(op)
}

/// Basis of the tangent space to the orbit of A: the image of the
/// infinitesimal action, returned as n x n matrices.
pub fn tangent_space(a: &Matrix, action: Action) -> Result<Vec<Matrix>> {
    let n = a.rows();
    let op = action_operator(a, action)?;
    // Row-reduce the transpose: its nonzero rows span the column space of
    // the operator, which is the tangent space.
    let (r, prows) = op.transpose().rref();
    let mut basis = Vec::new();
    for row in 0..prows.len() {
        let mut m = Matrix::zeros(n, n, a.backend());
        for p in 0..n {
            for q in 0..n {
                m.set(p, q, r.at(row, p * n + q).clone());
            }
        }
        basis.push(m);
    }
    Ok(basis)
}

/// Basis of the orthogonal complement of the tangent space under the
/// conjugate-transpose trace pairing <X, Y> = sum conj(x_ij) y_ij. The
/// orthogonal complement is transverse, so A + sum t_i W_i is a miniversal
/// deformation.
pub fn miniversal_complement(a: &Matrix, action: Action) -> Result<Vec<Matrix>> {
    let n = a.rows();
    let tangent = tangent_space(a, action)?;
    if tangent.is_empty() {
        // Whole space: standard basis.
        let mut basis = Vec::new();
        for p in 0..n {
            for q in 0..n {
                let mut e = Matrix::zeros(n, n, a.backend());
                e.set(p, q, Scalar::one(a.backend()));
                basis.push(e);
            }
        }
        return Ok(basis);
    }
    // Rows = conjugated tangent vectors; kernel = orthogonal complement.
    let dim = n * n;
    let mut rows = Matrix::zeros(tangent.len(), dim, a.backend());
    for (i, t) in tangent.iter().enumerate() {
        let tc = t.conj();
        for p in 0..n {
            for q in 0..n {
                rows.set(i, p * n + q, tc.at(p, q).clone());
            }
        }
    }
    let kernel = rows.kernel_basis();
    kernel
        .iter()
        .map(|v| Matrix::unvec(v, n, n))
        .collect::<Result<Vec<_>>>()
}

/// Parameter count of a miniversal deformation under scalar similarity:
/// one less than Arnold's count, except for the zero matrix where the two
/// coincide (at n^2).
pub fn scalar_similarity_param_count(a: &Matrix) -> Result<usize> {
    let count = arnold_count(&jordan_structure(a)?);
    if a.is_zero() {
        Ok(count)
    } else {
        Ok(count - 1)
    }
}

/// Jump-deformation (degeneration) order under scalar similarity:
/// `degenerates_to(a, b)` is true iff a admits a jump deformation to b,
/// i.e. a lies in the closure of b's scalar-similarity class. Decided by:
/// some u != 0 (from the finite ratio candidate set) matches the spectra as
/// multisets and rank((a - s I)^k) <= rank((u b - s I)^k) for every
/// eigenvalue s and k >= 1; when both matrices are nilpotent the scalar
/// matching is dropped. Reflexive by convention.
pub fn degenerates_to(a: &Matrix, b: &Matrix) -> Result<bool> {
    a.same_shape(b)?;
    let ja = jordan_structure(a)?;
    let jb = jordan_structure(b)?;
    let a_nil = is_nilpotent(&ja);
    let b_nil = is_nilpotent(&jb);
    if a_nil && b_nil {
        return rank_dominates(a, b, &jb);
    }
    if a_nil != b_nil {
        return Ok(false);
    }
    // Candidate scalars: ratios of nonzero eigenvalues of a over those of b.
    let nonzero = |js: &JordanStructure| -> Vec<Scalar> {
        js.entries
            .iter()
            .filter(|(v, _)| !v.is_zero())
            .map(|(v, _)| v.clone())
            .collect()
    };
    let mut candidates: Vec<Scalar> = Vec::new();
    for x in nonzero(&ja) {
        for y in nonzero(&jb) {
            let c = x.div(&y)?;
            if !candidates.iter().any(|d| d.approx_eq(&c)) {
                candidates.push(c);
            }
        }
    }
    candidates.sort_by(|x, y| x.order_cmp(y));
    for u in candidates {
        if !spectra_match(&jb.scale_spectrum(&u), &ja) {
            continue;
        }
        let ub = b.scale_by(&u);
        let jub = jordan_structure(&ub)?;
        if rank_dominates(a, &ub, &jub)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Equality of spectra as multisets (eigenvalue with algebraic
/// multiplicity), ignoring the block structure.
fn spectra_match(a: &JordanStructure, b: &JordanStructure) -> bool {
    if a.entries.len() != b.entries.len() {
        return false;
    }
    let mut used = vec![false; b.entries.len()];
    for (va, ba) in &a.entries {
        let ma: usize = ba.iter().sum();
        let mut hit = false;
        for (j, (vb, bb)) in b.entries.iter().enumerate() {
            if !used[j] && va.approx_eq(vb) && bb.iter().sum::<usize>() == ma {
                used[j] = true;
                hit = true;
                break;
            }
        }
        if !hit {
            return false;
        }
    }
    true
}

fn is_nilpotent(js: &JordanStructure) -> bool {
    js.entries.iter().all(|(v, _)| v.is_zero())
}

/// rank((a - s)^k) <= rank((b - s)^k) for all eigenvalues s of b and all k.
/// Both spectra are assumed equal as multisets at this point.
fn rank_dominates(a: &Matrix, b: &Matrix, jb: &JordanStructure) -> Result<bool> {
    let n = a.rows();
    for (lam, _) in &jb.entries {
        let sa = shifted(a, lam);
        let sb = shifted(b, lam);
        let mut pa = sa.clone();
        let mut pb = sb.clone();
        for _ in 1..=n {
            if pa.rank() > pb.rank() {
                return Ok(false);
            }
            pa = pa.mul(&sa)?;
            pb = pb.mul(&sb)?;
        }
    }
    Ok(true)
}

fn shifted(m: &Matrix, lam: &Scalar) -> Matrix {
    let mut s = m.clone();
    for i in 0..m.rows() {
        let v = s.at(i, i).clone() - lam.clone();
        s.set(i, i, v);
    }
    s
}

/// Family-level deformation reachability: does the stratum `m` (with
/// distinct small-integer parameters) jump into stratum `k` at some point?
/// Complete search over spectrum-compatible parameter assignments; the
/// projective scale freedom lets the assignment draw values directly from
/// the source spectrum.
pub fn family_deforms_to(m: &MultiIndex, k: &MultiIndex) -> Result<bool> {
    if m == k {
        return Ok(true);
    }
    let nm = m.param_count();
    let params: Vec<Scalar> = (1..=nm as i64).map(Scalar::from_int).collect();
    let source = canonical_matrix(m, &params)?;
    // Eigenvalue multiplicities of the source: value i+1 has multiplicity
    // parts[i].
    let eigs: Vec<(Scalar, usize)> = m
        .nonzero()
        .iter()
        .enumerate()
        .map(|(i, &mult)| (Scalar::from_int(i as i64 + 1), mult))
        .collect();
    let kparts = k.nonzero().to_vec();
    let mut assignment = vec![0usize; kparts.len()];
    let mut used = vec![0usize; eigs.len()];
    let mut found = false;
    assign_all(
        &kparts,
        0,
        &eigs,
        &mut used,
        &mut assignment,
        &mut |assign| {
            if found {
                return Ok(());
            }
            let vals: Vec<Scalar> = assign.iter().map(|&e| eigs[e].0.clone()).collect();
            let target = canonical_matrix(k, &vals)?;
            if degenerates_to(&source, &target)? {
                found = true;
            }
            Ok(())
        },
    )?;
    Ok(found)
}

fn assign_all(
    parts: &[usize],
    slot: usize,
    eigs: &[(Scalar, usize)],
    used: &mut Vec<usize>,
    assignment: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if slot == parts.len() {
        if used.iter().zip(eigs).all(|(&u, (_, m))| u == *m) {
            f(assignment)?;
        }
        return Ok(());
    }
    for e in 0..eigs.len() {
        if used[e] + parts[slot] <= eigs[e].1 {
            used[e] += parts[slot];
            assignment[slot] = e;
            assign_all(parts, slot + 1, eigs, used, assignment, f)?;
            used[e] -= parts[slot];
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::MultiIndex;

    fn js(entries: Vec<(i64, Vec<usize>)>) -> JordanStructure {
        JordanStructure {
            entries: entries
                .into_iter()
                .map(|(v, b)| (Scalar::from_int(v), b))
                .collect(),
        }
    }

    fn mi(parts: &[usize]) -> MultiIndex {
        MultiIndex::from_partition(parts).unwrap()
    }

    #[test]
    fn arnold_examples() {
        // {p: [1,1], q: [1], r: [1]} -> 4 + 1 + 1 = 6
        assert_eq!(arnold_count(&js(vec![(1, vec![1, 1]), (2, vec![1]), (3, vec![1])])), 6);
        // {p: [2,1], r: [1]} -> 5 + 1 = 6
        assert_eq!(arnold_count(&js(vec![(1, vec![2, 1]), (2, vec![1])])), 6);
        // single 1x1 block
        assert_eq!(arnold_count(&js(vec![(0, vec![1])])), 1);
    }

    #[test]
    fn centralizer_examples() {
        assert_eq!(centralizer_dim(&Matrix::identity(2, Backend::Exact)).unwrap(), 4);
        assert_eq!(centralizer_dim(&Matrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap(), 2);
        // D(1:1:2): centralizer dim = Arnold count = 6
        let d = Matrix::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 1, 1, 0],
            &[0, 0, 1, 1],
            &[0, 0, 0, 2],
        ]);
        assert_eq!(centralizer_dim(&d).unwrap(), 6);
    }

    #[test]
    fn tangent_space_examples() {
        // cogredient at diag(1, 0): span of e11-ish and the symmetric pairing direction
        let a = Matrix::from_i64(&[&[1, 0], &[0, 0]]);
        let t = tangent_space(&a, Action::Cogredient).unwrap();
        assert_eq!(t.len(), 2);
        // similarity at I: zero subspace
        let t = tangent_space(&Matrix::identity(2, Backend::Exact), Action::Similarity).unwrap();
        assert!(t.is_empty());
        // similarity at J2(0): 2-dimensional
        let t = tangent_space(&Matrix::from_i64(&[&[0, 1], &[0, 0]]), Action::Similarity).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn complement_dimensions() {
        // cogredient at B(0:0) = diag(1,0): 2 parameters
        let a = Matrix::from_i64(&[&[1, 0], &[0, 0]]);
        assert_eq!(miniversal_complement(&a, Action::Cogredient).unwrap().len(), 2);
        // cogredient at the zero form: all 4 directions
        let z = Matrix::zeros(2, 2, Backend::Exact);
        assert_eq!(miniversal_complement(&z, Action::Cogredient).unwrap().len(), 4);
        // similarity at pI (p != 0): 4 directions
        let p = Matrix::identity(2, Backend::Exact).scale_by(&Scalar::from_int(5));
        assert_eq!(miniversal_complement(&p, Action::Similarity).unwrap().len(), 4);
    }

    #[test]
    fn complement_is_transverse() {
        let a = Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        for action in [Action::Similarity, Action::Cogredient] {
            let t = tangent_space(&a, action).unwrap();
            let w = miniversal_complement(&a, action).unwrap();
            assert_eq!(t.len() + w.len(), 9);
            // stacked T union W basis must have full rank
            let n2 = 9;
            let mut rows = Matrix::zeros(t.len() + w.len(), n2, Backend::Exact);
            for (i, m) in t.iter().chain(w.iter()).enumerate() {
                for p in 0..3 {
                    for q in 0..3 {
                        rows.set(i, p * 3 + q, m.at(p, q).clone());
                    }
                }
            }
            assert_eq!(rows.rank(), n2);
        }
    }

    #[test]
    fn scalar_similarity_counts() {
        let p = Matrix::identity(2, Backend::Exact).scale_by(&Scalar::from_int(3));
        assert_eq!(scalar_similarity_param_count(&p).unwrap(), 3);
        assert_eq!(
            scalar_similarity_param_count(&Matrix::zeros(2, 2, Backend::Exact)).unwrap(),
            4
        );
        let d = Matrix::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 1, 1, 0],
            &[0, 0, 1, 1],
            &[0, 0, 0, 2],
        ]);
        assert_eq!(scalar_similarity_param_count(&d).unwrap(), 5);
    }

    #[test]
    fn degeneration_examples() {
        let i2 = Matrix::identity(2, Backend::Exact);
        let b11 = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert!(degenerates_to(&i2, &b11).unwrap());
        assert!(!degenerates_to(&b11, &i2).unwrap());
        assert!(degenerates_to(&b11, &b11).unwrap());
        // scalar freedom: I2 also jumps to [[2,2],[0,2]]
        let b22 = Matrix::from_i64(&[&[2, 2], &[0, 2]]);
        assert!(degenerates_to(&i2, &b22).unwrap());
        // nilpotent dominance: 0 jumps to J2(0), not conversely
        let z = Matrix::zeros(2, 2, Backend::Exact);
        let j2 = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        assert!(degenerates_to(&z, &j2).unwrap());
        assert!(!degenerates_to(&j2, &z).unwrap());
        // distinct-ratio spectra do not jump
        let b12 = Matrix::from_i64(&[&[1, 1], &[0, 2]]);
        assert!(!degenerates_to(&i2, &b12).unwrap());
    }

    #[test]
    fn family_reachability_matches_merges() {
        use crate::strata::merges_to;
        for n in 2..=4usize {
            let strata = crate::strata::enumerate_strata(n).unwrap();
            for s in &strata {
                for t in &strata {
                    let merged = merges_to(&t.index, &s.index).unwrap();
                    let deforms = family_deforms_to(&s.index, &t.index).unwrap();
                    assert_eq!(
                        merged,
                        deforms,
                        "n={n} m={} k={}",
                        s.index.display(),
                        t.index.display()
                    );
                }
            }
        }
    }

    #[test]
    fn sampled_jump_curves() {
        use crate::strata::classify_scalar_similarity;
        // A(1) jumps to B(1:1) along I + t e12: classify stays [1,1] at (1:1)
        for t in [
            Scalar::from_int(1),
            Scalar::from_ratio(1, 2),
            Scalar::from_ratio(1, 4),
        ] {
            let mut m = Matrix::identity(2, Backend::Exact);
            m.set(0, 1, t);
            let c = classify_scalar_similarity(&m).unwrap();
            assert_eq!(c.stratum.index, mi(&[1, 1]));
            assert_eq!(
                c.point.coords,
                vec![Scalar::from_int(1), Scalar::from_int(1)]
            );
        }
        // the zero matrix jumps to anything along t * B
        let b = Matrix::from_i64(&[&[1, 1], &[0, 2]]);
        for t in [Scalar::from_ratio(1, 2), Scalar::from_ratio(1, 4)] {
            let c = classify_scalar_similarity(&b.scale_by(&t)).unwrap();
            assert_eq!(c, classify_scalar_similarity(&b).unwrap());
        }
    }
}
