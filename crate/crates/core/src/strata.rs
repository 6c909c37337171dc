//! Strata of the moduli space of n x n matrices under scalar similarity:
//! multi-index strata, canonical stratum matrices, projective orbifold
//! symmetry, the merge order between strata, and classification of
//! arbitrary matrices.
//!
//! A stratum is indexed by a nonincreasing multi-index [m_1, ..., m_n] with
//! sum n. Its canonical matrix is assembled from "chain blocks": at a stage
//! where the leading values satisfy m_1 = ... = m_k > m_{k+1}, append
//! (m_k - m_{k+1}) copies of the k x k upper-bidiagonal block with diagonal
//! (p_1, ..., p_k) and 1 on the superdiagonal (a bare [p_1] when k = 1),
//! then decrement the leading values to m_{k+1} and repeat. The 1s never
//! cross chain boundaries.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jordan::{jordan_structure, JordanStructure};
use crate::matrix::Matrix;
use crate::rng::Rng;
use crate::scalar::{Backend, Scalar};

/// Nonincreasing nonnegative integer tuple of length n summing to n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    parts: Vec<usize>,
}

impl MultiIndex {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        let n = parts.len();
        if parts.iter().sum::<usize>() != n {
            return Err(Error::Invalid(format!(
                "multi-index {parts:?} must sum to its length {n}"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!(
                "multi-index {parts:?} must be nonincreasing"
            )));
        }
        Ok(MultiIndex { parts })
    }

    /// Build from the nonzero parts, padding with zeros to length n = sum.
    pub fn from_partition(nonzero: &[usize]) -> Result<Self> {
        let n: usize = nonzero.iter().sum();
        if nonzero.iter().any(|&p| p == 0) {
            // trailing zeros are tolerated as long as the shape is valid
            let mut parts = nonzero.to_vec();
            let total: usize = parts.iter().sum();
            parts.resize(total, 0);
            return MultiIndex::new(parts);
        }
        let mut parts = nonzero.to_vec();
        parts.resize(n, 0);
        MultiIndex::new(parts)
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Nonzero parts (the partition proper).
    pub fn nonzero(&self) -> &[usize] {
        let k = self.parts.iter().take_while(|&&p| p > 0).count();
        &self.parts[..k]
    }

    /// Number of parameters N = number of nonzero parts.
    pub fn param_count(&self) -> usize {
        self.nonzero().len()
    }

    /// Chain-block sizes of the canonical matrix, largest last; this is the
    /// conjugate partition read off stage by stage.
    pub fn chain_sizes(&self) -> Vec<usize> {
        let mut current: Vec<usize> = self.nonzero().to_vec();
        let mut chains = Vec::new();
        while !current.is_empty() {
            let k = current.iter().take_while(|&&v| v == current[0]).count();
            let next = current.get(k).copied().unwrap_or(0);
            let reps = current[0] - next;
            for _ in 0..reps {
                chains.push(k);
            }
            for v in current.iter_mut().take(k) {
                *v = next;
            }
            current.retain(|&v| v > 0);
        }
        chains
    }

    /// 0-based maximal runs of equal nonzero parts (the parameter indices
    /// the symmetry group may permute).
    pub fn symmetry_blocks_raw(&self) -> Vec<Vec<usize>> {
        symmetry_group(self)
            .into_iter()
            .map(|b| b.into_iter().map(|i| i - 1).collect())
            .collect()
    }

    pub fn display(&self) -> String {
        format!(
            "[{}]",
            self.parts
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// A stratum: multi-index plus its derived parameter/symmetry data.
#[derive(Debug, Clone, PartialEq)]
pub struct Stratum {
    pub index: MultiIndex,
}

impl Stratum {
    pub fn new(index: MultiIndex) -> Self {
        Stratum { index }
    }

    pub fn param_count(&self) -> usize {
        self.index.param_count()
    }

    /// Maximal blocks of consecutive parameter indices (1-based) with equal
    /// nonzero part value. The symmetry group is the direct product of full
    /// symmetric groups on these blocks.
    pub fn symmetry_blocks(&self) -> Vec<Vec<usize>> {
        symmetry_group(&self.index)
    }

    /// Orbifold label such as "P^2/Sigma_3"; trivial factors are dropped.
    pub fn orbifold_label(&self) -> String {
        let n = self.param_count();
        let blocks = self.symmetry_blocks();
        let nontrivial: Vec<usize> = blocks.iter().map(Vec::len).filter(|&l| l > 1).collect();
        let base = format!("P^{}", n.saturating_sub(1));
        match nontrivial.len() {
            0 => base,
            1 => format!("{base}/Sigma_{}", nontrivial[0]),
            _ => format!(
                "{base}/({})",
                nontrivial
                    .iter()
                    .map(|l| format!("Sigma_{l}"))
                    .collect::<Vec<_>>()
                    .join(" x ")
            ),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "index": self.index.parts(),
            "param_count": self.param_count(),
            "symmetry_blocks": self.symmetry_blocks(),
            "orbifold": self.orbifold_label(),
        })
    }
}

/// Projective parameter point of a stratum: N coordinates up to a common
/// nonzero scalar and the stratum's block permutations; all-zero is the
/// generic point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    pub coords: Vec<Scalar>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<Scalar>) -> Self {
        ProjectivePoint { coords }
    }

    pub fn is_generic(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn display(&self) -> String {
        format!(
            "({})",
            self.coords
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(":")
        )
    }
}

/// One stratum per partition of n, in lexicographically decreasing order of
/// parts; multi-indices are zero-padded to length n.
pub fn enumerate_strata(n: usize) -> Result<Vec<Stratum>> {
    if n == 0 || n > 12 {
        return Err(Error::Invalid(format!("n = {n} out of supported range 1..=12")));
    }
    let mut out = Vec::new();
    let mut current = vec![n];
    loop {
        let mut parts = current.clone();
        parts.resize(n, 0);
        out.push(Stratum::new(MultiIndex::new(parts)?));
        if !next_partition(&mut current) {
            break;
        }
    }
    Ok(out)
}

/// Next partition in decreasing lexicographic order; false when done.
fn next_partition(parts: &mut Vec<usize>) -> bool {
    // Find the last part > 1; everything after it is 1s.
    let Some(k) = parts.iter().rposition(|&p| p > 1) else {
        return false;
    };
    let tail: usize = parts[k..].iter().sum();
    let new_val = parts[k] - 1;
    parts.truncate(k);
    let mut rest = tail;
    while rest > 0 {
        let v = new_val.min(rest);
        parts.push(v);
        rest -= v;
    }
    true
}

/// The canonical stratum matrix: chain blocks along the diagonal.
pub fn canonical_matrix(index: &MultiIndex, params: &[Scalar]) -> Result<Matrix> {
    let n_params = index.param_count();
    if params.len() != n_params {
        return Err(Error::Invalid(format!(
            "stratum {} takes {} parameters, got {}",
            index.display(),
            n_params,
            params.len()
        )));
    }
    let backend = params
        .first()
        .map(Scalar::backend)
        .unwrap_or(Backend::Exact);
    let n = index.n();
    let mut m = Matrix::zeros(n, n, backend);
    let mut pos = 0usize;
    for k in index.chain_sizes() {
        for j in 0..k {
            m.set(pos + j, pos + j, params[j].clone());
            if j + 1 < k {
                m.set(pos + j, pos + j + 1, Scalar::one(backend));
            }
        }
        pos += k;
    }
    debug_assert_eq!(pos, n);
    Ok(m)
}

/// Jordan structure of canonical_matrix(index, params) computed directly
/// from the chain decomposition: inside one chain each distinct value
/// contributes a single Jordan block whose size is its multiplicity in the
/// chain's diagonal prefix.
pub fn canonical_jordan(index: &MultiIndex, params: &[Scalar]) -> Result<JordanStructure> {
    if params.len() != index.param_count() {
        return Err(Error::Invalid("parameter count mismatch".into()));
    }
    let mut distinct: Vec<Scalar> = Vec::new();
    for p in params {
        if !distinct.iter().any(|d| d == p) {
            distinct.push(p.clone());
        }
    }
    let chains = index.chain_sizes();
    let mut entries = Vec::new();
    for v in distinct {
        let mut blocks = Vec::new();
        for &k in &chains {
            let count = params[..k].iter().filter(|p| **p == v).count();
            if count > 0 {
                blocks.push(count);
            }
        }
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        entries.push((v, blocks));
    }
    entries.sort_by(|a, b| {
        let ma: usize = a.1.iter().sum();
        let mb: usize = b.1.iter().sum();
        mb.cmp(&ma).then_with(|| a.0.order_cmp(&b.0))
    });
    Ok(JordanStructure { entries })
}

/// Maximal blocks {i, i+1, ...} (1-based) of equal nonzero parts.
pub fn symmetry_group(index: &MultiIndex) -> Vec<Vec<usize>> {
    let nz = index.nonzero();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < nz.len() {
        let mut j = i;
        while j + 1 < nz.len() && nz[j + 1] == nz[i] {
            j += 1;
        }
        blocks.push((i + 1..=j + 1).collect());
        i = j + 1;
    }
    blocks
}

/// Canonical representative of a projective point under the stratum's block
/// permutations and global scaling: all-zero stays put; otherwise over all
/// block-respecting permutations, scale the first nonzero coordinate to 1
/// and take the lexicographically least tuple under the scalar order.
pub fn canonical_projective_rep(point: &ProjectivePoint, blocks: &[Vec<usize>]) -> ProjectivePoint {
    if point.is_generic() {
        return point.clone();
    }
    let n = point.coords.len();
    let mut best: Option<Vec<Scalar>> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    permute_blocks(blocks, &mut perm, 0, &mut |perm| {
        let arranged: Vec<Scalar> = perm.iter().map(|&i| point.coords[i].clone()).collect();
        let Some(first) = arranged.iter().find(|c| !c.is_zero()) else {
            return;
        };
        let inv = first.inv().expect("nonzero");
        let scaled: Vec<Scalar> = arranged.iter().map(|c| c.clone() * inv.clone()).collect();
        let better = match &best {
            None => true,
            Some(b) => tuple_less(&scaled, b),
        };
        if better {
            best = Some(scaled);
        }
    });
    ProjectivePoint::new(best.expect("nonzero point"))
}

fn tuple_less(a: &[Scalar], b: &[Scalar]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.order_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => continue,
        }
    }
    false
}

/// Visit every permutation that only rearranges indices inside each block.
fn permute_blocks(
    blocks: &[Vec<usize>],
    perm: &mut Vec<usize>,
    block_idx: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if block_idx == blocks.len() {
        f(perm);
        return;
    }
    let idxs: Vec<usize> = blocks[block_idx].iter().map(|&i| i - 1).collect();
    permute_within(&idxs, 0, perm, &mut |perm| {
        permute_blocks(blocks, perm, block_idx + 1, f)
    });
}

fn permute_within(
    idxs: &[usize],
    k: usize,
    perm: &mut Vec<usize>,
    f: &mut impl FnMut(&mut Vec<usize>),
) {
    if k == idxs.len() {
        f(perm);
        return;
    }
    for j in k..idxs.len() {
        perm.swap(idxs[k], idxs[j]);
        permute_within(idxs, k + 1, perm, f);
        perm.swap(idxs[k], idxs[j]);
    }
}

/// Merge order: true iff some set-partition of the nonzero parts of `k` has
/// group sums equal to the nonzero parts of `m`. Brute force over set
/// partitions (desk scale).
pub fn merges_to(k: &MultiIndex, m: &MultiIndex) -> Result<bool> {
    if k.n() != m.n() {
        return Err(Error::Shape("multi-indices of different n".into()));
    }
    let parts = k.nonzero().to_vec();
    let mut target: Vec<usize> = m.nonzero().to_vec();
    target.sort_unstable_by(|a, b| b.cmp(a));
    let mut groups: Vec<usize> = Vec::new();
    Ok(search_partitions(&parts, 0, &mut groups, &target))
}

fn search_partitions(
    parts: &[usize],
    i: usize,
    groups: &mut Vec<usize>,
    target: &[usize],
) -> bool {
    if i == parts.len() {
        let mut sums = groups.clone();
        sums.sort_unstable_by(|a, b| b.cmp(a));
        return sums == target;
    }
    // Place part i into an existing group or a new one.
    for g in 0..groups.len() {
        groups[g] += parts[i];
        if search_partitions(parts, i + 1, groups, target) {
            groups[g] -= parts[i];
            return true;
        }
        groups[g] -= parts[i];
    }
    groups.push(parts[i]);
    let hit = search_partitions(parts, i + 1, groups, target);
    groups.pop();
    hit
}

/// Classification result: the unique stratum and canonical projective point.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub stratum: Stratum,
    pub point: ProjectivePoint,
}

impl Classification {
    pub fn display(&self) -> String {
        format!(
            "stratum {}, point {}",
            self.stratum.index.display(),
            self.point.display()
        )
    }
}

/// Classify a square matrix under scalar similarity: find the unique
/// (stratum, canonical point) whose canonical matrix has the same Jordan
/// structure up to one global spectral scalar.
///
/// The assignment search fixes the scalar to 1 (any admissible global
/// rescaling can be absorbed into the projective coordinates) and
/// enumerates maps from parameter slots to the eigenvalues of M subject to
/// the multiplicity constraint sum of assigned parts = algebraic
/// multiplicity.
pub fn classify_scalar_similarity(m: &Matrix) -> Result<Classification> {
    if !m.is_square() {
        return Err(Error::Shape("classification needs a square matrix".into()));
    }
    let js = jordan_structure(m)?;
    classify_jordan(&js, m.rows(), m.backend())
}

fn classify_jordan(js: &JordanStructure, n: usize, backend: Backend) -> Result<Classification> {
    let eigs: Vec<(Scalar, usize)> = js
        .entries
        .iter()
        .map(|(v, b)| (v.clone(), b.iter().sum::<usize>()))
        .collect();
    // The all-zero spectrum (nilpotent) classifies to a generic point.
    let nilpotent = eigs.len() == 1 && eigs[0].0.is_zero();
    let mut hits: Vec<Classification> = Vec::new();
    for stratum in enumerate_strata(n)? {
        let idx = &stratum.index;
        let nparams = idx.param_count();
        if nilpotent {
            // Generic point: the canonical matrix with all parameters zero
            // is the nilpotent chain matrix of the stratum.
            let zeros = vec![Scalar::zero(backend); nparams];
            let cj = canonical_jordan(idx, &zeros)?;
            if cj.approx_eq(js) {
                hits.push(Classification {
                    stratum: stratum.clone(),
                    point: ProjectivePoint::new(zeros),
                });
            }
            continue;
        }
        let parts = idx.nonzero();
        let mut assignment: Vec<usize> = vec![0; nparams];
        let mut found: Vec<Vec<Scalar>> = Vec::new();
        assign_search(parts, 0, &eigs, &mut vec![0; eigs.len()], &mut assignment, &mut |a| {
            let params: Vec<Scalar> = a.iter().map(|&e| eigs[e].0.clone()).collect();
            found.push(params);
        });
        for params in found {
            let cj = canonical_jordan(idx, &params)?;
            if cj.approx_eq(js) {
                let point = canonical_projective_rep(
                    &ProjectivePoint::new(params),
                    &stratum.symmetry_blocks(),
                );
                let c = Classification {
                    stratum: stratum.clone(),
                    point,
                };
                if !hits.contains(&c) {
                    hits.push(c);
                }
            }
        }
    }
    match hits.len() {
        0 => Err(Error::Unclassifiable),
        1 => Ok(hits.pop().unwrap()),
        _ => Err(Error::AmbiguousClassification),
    }
}

/// Enumerate assignments of eigenvalue indices to parameter slots with the
/// multiplicity constraint.
fn assign_search(
    parts: &[usize],
    slot: usize,
    eigs: &[(Scalar, usize)],
    used: &mut Vec<usize>,
    assignment: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if slot == parts.len() {
        if used
            .iter()
            .zip(eigs)
            .all(|(&u, (_, mult))| u == *mult)
        {
            f(assignment);
        }
        return;
    }
    for e in 0..eigs.len() {
        if used[e] + parts[slot] <= eigs[e].1 {
            used[e] += parts[slot];
            assignment[slot] = e;
            assign_search(parts, slot + 1, eigs, used, assignment, f);
            used[e] -= parts[slot];
        }
    }
}

/// Scalar-similarity witness: c and invertible G with c * G^-1 A G = B,
/// i.e. (cA) G = G B. Returns None when the classes differ.
pub fn scalar_similar(a: &Matrix, b: &Matrix, seed: u64) -> Result<Option<(Scalar, Matrix)>> {
    a.same_shape(b)?;
    let ca = classify_scalar_similarity(a)?;
    let cb = classify_scalar_similarity(b)?;
    if ca != cb {
        return Ok(None);
    }
    // Candidate scalars map spectrum(A) onto spectrum(B).
    let sa = jordan_structure(a)?;
    let sb = jordan_structure(b)?;
    let mut candidates: Vec<Scalar> = Vec::new();
    let nonzero = |js: &JordanStructure| -> Vec<Scalar> {
        js.entries
            .iter()
            .filter(|(v, _)| !v.is_zero())
            .map(|(v, _)| v.clone())
            .collect()
    };
    let za = nonzero(&sa);
    let zb = nonzero(&sb);
    if za.is_empty() && zb.is_empty() {
        candidates.push(Scalar::one(a.backend()));
    } else {
        for x in &zb {
            for y in &za {
                let c = x.clone().div(y)?;
                if !candidates.iter().any(|d| d.approx_eq(&c)) {
                    candidates.push(c);
                }
            }
        }
        candidates.sort_by(|x, y| x.order_cmp(y));
    }
    for c in candidates {
        if !sa.scale_spectrum(&c).approx_eq(&sb) {
            continue;
        }
        if let Some(g) = solve_intertwiner(&a.scale_by(&c), b, seed)? {
            return Ok(Some((c, g)));
        }
    }
    Err(Error::WitnessSearchFailed(64))
}

/// Find invertible G with M G = G B by sampling the kernel of the Sylvester
/// operator X -> M X - X B; a generic kernel element is invertible when the
/// matrices are similar.
fn solve_intertwiner(m: &Matrix, b: &Matrix, seed: u64) -> Result<Option<Matrix>> {
    let n = m.rows();
    let backend = m.backend();
    // Operator on vec(X): rows indexed by output entries.
    let dim = n * n;
    let mut op = Matrix::zeros(dim, dim, backend);
    for p in 0..n {
        for q in 0..n {
            let row = p * n + q;
            // (M X)_{pq} = sum_k M_{pk} X_{kq}
            for k in 0..n {
                let col = k * n + q;
                let v = op.at(row, col).clone() + m.at(p, k).clone();
                op.set(row, col, v);
            }
            // -(X B)_{pq} = -sum_k X_{pk} B_{kq}
            for k in 0..n {
                let col = p * n + k;
                let v = op.at(row, col).clone() - b.at(k, q).clone();
                op.set(row, col, v);
            }
        }
    }
    let kernel = op.kernel_basis();
    if kernel.is_empty() {
        return Ok(None);
    }
    let mut rng = Rng::new(seed);
    for _ in 0..64 {
        let mut g = Matrix::zeros(n, n, backend);
        for v in &kernel {
            let w = match backend {
                Backend::Exact => Scalar::from_int(rng.next_range(-3, 3)),
                Backend::Float => Scalar::float(rng.next_gaussian(), rng.next_gaussian()),
            };
            g = g.add(&Matrix::unvec(v, n, n)?.scale_by(&w))?;
        }
        if g.inverse().is_ok() {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(parts: &[usize]) -> MultiIndex {
        MultiIndex::from_partition(parts).unwrap()
    }

    fn ints(vals: &[i64]) -> Vec<Scalar> {
        vals.iter().map(|&v| Scalar::from_int(v)).collect()
    }

    #[test]
    fn enumerate_small() {
        let s2: Vec<_> = enumerate_strata(2)
            .unwrap()
            .into_iter()
            .map(|s| s.index.parts().to_vec())
            .collect();
        assert_eq!(s2, vec![vec![2, 0], vec![1, 1]]);
        let s4: Vec<_> = enumerate_strata(4)
            .unwrap()
            .into_iter()
            .map(|s| s.index.parts().to_vec())
            .collect();
        assert_eq!(
            s4,
            vec![
                vec![4, 0, 0, 0],
                vec![3, 1, 0, 0],
                vec![2, 2, 0, 0],
                vec![2, 1, 1, 0],
                vec![1, 1, 1, 1]
            ]
        );
        assert_eq!(enumerate_strata(10).unwrap().len(), 42);
    }

    #[test]
    fn canonical_tables() {
        // [2,1,0] at (p1, p2)
        let m = canonical_matrix(&mi(&[2, 1]), &ints(&[7, 9])).unwrap();
        assert_eq!(
            m,
            Matrix::from_i64(&[&[7, 0, 0], &[0, 7, 1], &[0, 0, 9]])
        );
        // [2,2,0,0] at (p1, p2): two chain-2 blocks
        let m = canonical_matrix(&mi(&[2, 2]), &ints(&[7, 9])).unwrap();
        assert_eq!(
            m,
            Matrix::from_i64(&[
                &[7, 1, 0, 0],
                &[0, 9, 0, 0],
                &[0, 0, 7, 1],
                &[0, 0, 0, 9]
            ])
        );
    }

    #[test]
    fn ten_by_ten_example() {
        let m = canonical_matrix(&mi(&[3, 2, 2, 2, 1]), &ints(&[1, 2, 3, 4, 5])).unwrap();
        let expected = Matrix::from_i64(&[
            &[1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            &[0, 1, 1, 0, 0, 0, 0, 0, 0, 0],
            &[0, 0, 2, 1, 0, 0, 0, 0, 0, 0],
            &[0, 0, 0, 3, 1, 0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 4, 0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0, 1, 1, 0, 0, 0],
            &[0, 0, 0, 0, 0, 0, 2, 1, 0, 0],
            &[0, 0, 0, 0, 0, 0, 0, 3, 1, 0],
            &[0, 0, 0, 0, 0, 0, 0, 0, 4, 1],
            &[0, 0, 0, 0, 0, 0, 0, 0, 0, 5],
        ]);
        assert_eq!(m, expected);
    }

    #[test]
    fn symmetry_blocks_examples() {
        assert_eq!(
            symmetry_group(&mi(&[3, 2, 2, 2, 1])),
            vec![vec![1], vec![2, 3, 4], vec![5]]
        );
        assert_eq!(symmetry_group(&mi(&[1, 1, 1, 1])), vec![vec![1, 2, 3, 4]]);
        assert_eq!(symmetry_group(&mi(&[3, 1])), vec![vec![1], vec![2]]);
    }

    #[test]
    fn orbifold_labels() {
        let label = |p: &[usize]| Stratum::new(mi(p)).orbifold_label();
        assert_eq!(label(&[2]), "P^0");
        assert_eq!(label(&[1, 1]), "P^1/Sigma_2");
        assert_eq!(label(&[3, 2, 2, 2, 1]), "P^4/Sigma_3");
        assert_eq!(label(&[2, 1, 1]), "P^2/Sigma_2");
        assert_eq!(label(&[2, 2, 1, 1]), "P^3/(Sigma_2 x Sigma_2)");
    }

    #[test]
    fn projective_canonicalization() {
        let blocks = vec![vec![1, 2]];
        let p = canonical_projective_rep(&ProjectivePoint::new(ints(&[2, 2])), &blocks);
        assert_eq!(p.coords, ints(&[1, 1]));
        // (3:1) -> min of {(1,1/3),(1,3)} = (1,1/3)
        let p = canonical_projective_rep(&ProjectivePoint::new(ints(&[3, 1])), &blocks);
        assert_eq!(p.coords, vec![Scalar::from_int(1), Scalar::from_ratio(1, 3)]);
        // scaling only across distinct blocks
        let blocks = vec![vec![1], vec![2]];
        let p = canonical_projective_rep(&ProjectivePoint::new(ints(&[0, 5])), &blocks);
        assert_eq!(p.coords, ints(&[0, 1]));
        // generic point is fixed
        let g = ProjectivePoint::new(ints(&[0, 0]));
        assert_eq!(canonical_projective_rep(&g, &blocks), g);
    }

    #[test]
    fn merge_examples() {
        assert!(merges_to(&mi(&[1, 1]), &mi(&[2])).unwrap());
        assert!(merges_to(&mi(&[2, 1]), &mi(&[3])).unwrap());
        assert!(!merges_to(&mi(&[2, 2]), &mi(&[3, 1])).unwrap());
        // reflexive
        assert!(merges_to(&mi(&[2, 1]), &mi(&[2, 1])).unwrap());
    }

    #[test]
    fn classify_examples() {
        // I2 -> stratum [2,0], point (1)
        let c = classify_scalar_similarity(&Matrix::identity(2, Backend::Exact)).unwrap();
        assert_eq!(c.stratum.index.parts(), &[2, 0]);
        assert_eq!(c.point.coords, ints(&[1]));
        // [[1,1],[0,1]] -> stratum [1,1], point (1:1)
        let c = classify_scalar_similarity(&Matrix::from_i64(&[&[1, 1], &[0, 1]])).unwrap();
        assert_eq!(c.stratum.index.parts(), &[1, 1]);
        assert_eq!(c.point.coords, ints(&[1, 1]));
        // diag(1) + J2(1) + [2]: eigenvalue 1 blocks [2,1], eigenvalue 2 block [1]
        let m = Matrix::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 1, 1, 0],
            &[0, 0, 1, 0],
            &[0, 0, 0, 2],
        ]);
        let c = classify_scalar_similarity(&m).unwrap();
        assert_eq!(c.stratum.index.parts(), &[2, 1, 1, 0]);
        let expect = canonical_projective_rep(
            &ProjectivePoint::new(ints(&[1, 1, 2])),
            &c.stratum.symmetry_blocks(),
        );
        assert_eq!(c.point, expect);
    }

    #[test]
    fn classify_canonical_roundtrip_small() {
        for n in 1..=4 {
            for stratum in enumerate_strata(n).unwrap() {
                let nparams = stratum.param_count();
                let params = ints(&(1..=nparams as i64).collect::<Vec<_>>());
                let m = canonical_matrix(&stratum.index, &params).unwrap();
                let c = classify_scalar_similarity(&m).unwrap();
                assert_eq!(c.stratum.index, stratum.index, "n={n}");
                let expect = canonical_projective_rep(
                    &ProjectivePoint::new(params),
                    &stratum.symmetry_blocks(),
                );
                assert_eq!(c.point, expect);
            }
        }
    }

    #[test]
    fn canonical_jordan_matches_matrix_jordan() {
        let idx = mi(&[3, 2, 2, 2, 1]);
        let params = ints(&[1, 2, 2, 4, 5]);
        let direct = canonical_jordan(&idx, &params).unwrap();
        let via_matrix =
            jordan_structure(&canonical_matrix(&idx, &params).unwrap()).unwrap();
        assert!(direct.approx_eq(&via_matrix));
    }

    #[test]
    fn scalar_similar_examples() {
        let i3 = Matrix::identity(3, Backend::Exact);
        let (c, g) = scalar_similar(&i3, &i3, 0).unwrap().unwrap();
        assert!(c.is_one());
        assert!(g.inverse().is_ok());

        let a = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        let b = Matrix::from_i64(&[&[2, 2], &[0, 2]]);
        let (c, g) = scalar_similar(&a, &b, 0).unwrap().unwrap();
        assert_eq!(c, Scalar::from_int(2));
        // verify c G^-1 A G = B
        let lhs = g
            .inverse()
            .unwrap()
            .mul(&a)
            .unwrap()
            .mul(&g)
            .unwrap()
            .scale_by(&c);
        assert_eq!(lhs, b);

        let i2 = Matrix::identity(2, Backend::Exact);
        assert!(scalar_similar(&i2, &a, 0).unwrap().is_none());
    }
}
