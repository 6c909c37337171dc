//! Bilinear forms under the cogredient action G . A = G^T A G: canonical
//! summands, the 2- and 3-dimensional stratifications, congruence
//! invariants and certificates, the dictionary between the two
//! classification schemes, and the 3-dimensional deformation graph.

use num_complex::Complex64;
use serde_json::{json, Value};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{DeformationGraph, Edge, EdgeKind, Node, NodeKind};
use crate::jordan::{jordan_structure, JordanStructure};
use crate::matrix::Matrix;
use crate::rng::Rng;
use crate::scalar::{Backend, Scalar};
use crate::strata::{canonical_projective_rep, ProjectivePoint};

// ---------------------------------------------------------------------------
// Canonical summands
// ---------------------------------------------------------------------------

/// Indecomposable (and rank-one diagonal) canonical pieces of the
/// congruence classification.
#[derive(Debug, Clone, PartialEq)]
pub enum CanonicalSummand {
    /// H_m(lambda) = [[0, I_m], [J_m(lambda), 0]], lambda != 0 and
    /// lambda != (-1)^(m+1).
    H { m: usize, lambda: Scalar },
    /// The alternating anti-triangular Gamma_m.
    Gamma { m: usize },
    /// Nilpotent Jordan block J_m(0).
    Jzero { m: usize },
    Diag1,
    Diag0,
}

/// The literal matrix of a canonical summand.
pub fn build_summand(s: &CanonicalSummand) -> Result<Matrix> {
    match s {
        CanonicalSummand::H { m, lambda } => {
            if *m == 0 {
                return Err(Error::Invalid("H_0 is empty".into()));
            }
            let backend = lambda.backend();
            let forbidden = if m % 2 == 0 {
                // (-1)^(m+1) = -1
                -Scalar::one(backend)
            } else {
                Scalar::one(backend)
            };
            if lambda.is_zero() || lambda.approx_eq(&forbidden) {
                return Err(Error::InvalidLambda(lambda.to_string()));
            }
            let n = 2 * m;
            let mut h = Matrix::zeros(n, n, backend);
            for i in 0..*m {
                h.set(i, m + i, Scalar::one(backend));
                h.set(m + i, i, lambda.clone());
                if i + 1 < *m {
                    h.set(m + i, i + 1, Scalar::one(backend));
                }
            }
            Ok(h)
        }
        CanonicalSummand::Gamma { m } => {
            if *m == 0 {
                return Err(Error::Invalid("Gamma_0 is empty".into()));
            }
            // Row i (1-based) carries (-1)^(m-i) at columns m+1-i and m+2-i.
            let n = *m;
            let mut g = Matrix::zeros(n, n, Backend::Exact);
            for i in 1..=n {
                let sign = if (n - i) % 2 == 0 {
                    Scalar::from_int(1)
                } else {
                    Scalar::from_int(-1)
                };
                g.set(i - 1, n - i, sign.clone());
                if n + 2 - i <= n {
                    g.set(i - 1, n + 1 - i, sign);
                }
            }
            Ok(g)
        }
        CanonicalSummand::Jzero { m } => {
            let mut j = Matrix::zeros(*m, *m, Backend::Exact);
            for i in 0..m.saturating_sub(1) {
                j.set(i, i + 1, Scalar::from_int(1));
            }
            Ok(j)
        }
        CanonicalSummand::Diag1 => Ok(Matrix::from_i64(&[&[1]])),
        CanonicalSummand::Diag0 => Ok(Matrix::from_i64(&[&[0]])),
    }
}

// ---------------------------------------------------------------------------
// Congruence invariants
// ---------------------------------------------------------------------------

/// Congruence-invariant data of a square matrix.
#[derive(Debug, Clone)]
pub struct CogredientInvariants {
    pub rank: usize,
    pub rank_sym: usize,
    pub rank_skew: usize,
    /// dim(ker M intersect ker M^T) (the radical of the form).
    pub radical: usize,
    /// dim(ker M + ker M^T).
    pub ker_span: usize,
    /// Jordan structure of the cosquare M^-T M for invertible M; None when
    /// singular or when the exact spectrum does not split (callers compare
    /// on the float backend in that case).
    pub cosquare: Option<JordanStructure>,
}

impl CogredientInvariants {
    pub fn is_symmetric(&self) -> bool {
        self.rank_skew == 0
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.rank_sym == 0
    }
}

pub fn cogredient_invariants(m: &Matrix) -> Result<CogredientInvariants> {
    if !m.is_square() {
        return Err(Error::Shape("invariants need a square matrix".into()));
    }
    let backend = m.backend();
    let half = match backend {
        Backend::Exact => Scalar::from_ratio(1, 2),
        Backend::Float => Scalar::float(0.5, 0.0),
    };
    let mt = m.transpose();
    let sym = m.add(&mt)?.scale_by(&half);
    let skew = m.sub(&mt)?.scale_by(&half);
    let rank = m.rank();
    let n = m.rows();
    // ker M + ker M^T and their intersection via the kernels of the two
    // operators and the stacked operator.
    let k1 = n - rank;
    let k2 = n - mt.rank();
    let mut stacked = Matrix::zeros(2 * n, n, backend);
    for i in 0..n {
        for j in 0..n {
            stacked.set(i, j, m.at(i, j).clone());
            stacked.set(n + i, j, mt.at(i, j).clone());
        }
    }
    let radical = n - stacked.rank();
    let ker_span = k1 + k2 - radical;
    let cosquare = if rank == n {
        let cs = mt.inverse()?.mul(m)?;
        jordan_structure(&cs).ok()
    } else {
        None
    };
    Ok(CogredientInvariants {
        rank,
        rank_sym: sym.rank(),
        rank_skew: skew.rank(),
        radical,
        ker_span,
        cosquare,
    })
}

/// Do the invariants definitively separate two forms?
fn invariants_separate(a: &Matrix, b: &Matrix) -> Result<bool> {
    let ia = cogredient_invariants(a)?;
    let ib = cogredient_invariants(b)?;
    if (ia.rank, ia.rank_sym, ia.rank_skew, ia.radical, ia.ker_span)
        != (ib.rank, ib.rank_sym, ib.rank_skew, ib.radical, ib.ker_span)
    {
        return Ok(true);
    }
    // Cosquare spectra are congruence invariants on the nose. Only claim a
    // separation when both structures are available and clearly differ at a
    // coarse tolerance (multiple numeric roots are badly conditioned).
    if ia.rank == a.rows() {
        if let (Some(ca), Some(cb)) = (separation_cosquare(a), separation_cosquare(b)) {
            if !jordan_match_coarse(&ca, &cb, 1e-3) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Cosquare Jordan structure for separation purposes: exact when the
/// spectrum splits, otherwise a coarse float computation; None when
/// anything fails (no separation is then claimed).
fn separation_cosquare(m: &Matrix) -> Option<JordanStructure> {
    let cs = m.transpose().inverse().ok()?.mul(m).ok()?;
    if let Ok(js) = jordan_structure(&cs) {
        return Some(js);
    }
    for eps in [1e-9, 1e-6, 1e-4] {
        if let Ok(js) = float_cosquare(m, eps).and_then(|c| jordan_structure(&c)) {
            return Some(js);
        }
    }
    None
}

/// Multiset comparison of Jordan structures with a coarse eigenvalue
/// tolerance (block lists must match exactly).
fn jordan_match_coarse(a: &JordanStructure, b: &JordanStructure, tol: f64) -> bool {
    if a.entries.len() != b.entries.len() {
        return false;
    }
    let mut used = vec![false; b.entries.len()];
    for (va, ba) in &a.entries {
        let za = va.to_complex64();
        let mut hit = false;
        for (j, (vb, bb)) in b.entries.iter().enumerate() {
            if used[j] || ba != bb {
                continue;
            }
            if (za - vb.to_complex64()).norm() <= tol * za.norm().max(1.0) {
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

fn float_cosquare(m: &Matrix, eps: f64) -> Result<Matrix> {
    let f = m.to_float_backend(eps);
    Ok(f.transpose().inverse()?.mul(&f)?)
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

/// An equivalence witness: invertible G with G^T A G = B (to the stated
/// residual), plus an optional scalar for scalar-similarity certificates.
#[derive(Debug, Clone)]
pub struct CongruenceCertificate {
    pub g: Matrix,
    pub c: Option<Scalar>,
    pub residual: f64,
    pub verified: bool,
}

impl CongruenceCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "G": self.g.to_json(),
            "c": self.c.as_ref().map(|c| {
                let z = c.to_complex64();
                json!([z.re, z.im])
            }),
            "residual": self.residual,
            "verified": self.verified,
        })
    }
}

/// Search options for certificate searches; all randomness comes from the
/// seed.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub seed: u64,
    pub tol: f64,
    pub restarts: u32,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            seed: 0,
            tol: 1e-9,
            restarts: 64,
        }
    }
}

/// Search for a congruence certificate between same-size square matrices.
///
/// Returns Ok(Some(cert)) when a verified witness is found, Ok(None) when
/// the congruence invariants definitively separate the classes, and
/// Err(SearchExhausted) when the invariants agree but the search budget is
/// spent (absence of a certificate is not a proof of inequivalence).
///
/// Exact candidates run first: equality, scalar multiples with exact
/// square roots, signed permutations, the constructive 2x2 reduction, and
/// radical splitting for singular forms; then seeded damped Gauss-Newton
/// restarts on the float backend.
pub fn congruent(a: &Matrix, b: &Matrix, opts: &SearchOptions) -> Result<Option<CongruenceCertificate>> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Shape(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if !a.is_square() {
        return Err(Error::Shape("congruence needs square matrices".into()));
    }
    // Mixed backends compare on floats.
    if a.backend() != b.backend() {
        let eps = opts.tol.max(a.eps()).max(b.eps());
        return congruent(&a.to_float_backend(eps), &b.to_float_backend(eps), opts);
    }
    if a.is_zero() || b.is_zero() {
        return if a.is_zero() && b.is_zero() {
            Ok(Some(exact_cert(Matrix::identity(a.rows(), a.backend()))))
        } else {
            Ok(None)
        };
    }
    if invariants_separate(a, b)? {
        return Ok(None);
    }
    if a.backend() == Backend::Exact && b.backend() == Backend::Exact {
        if let Some(g) = exact_congruence(a, b)? {
            debug_assert!(verify_congruence_exact(a, b, &g));
            return Ok(Some(exact_cert(g)));
        }
    }
    // Float phase.
    let fa = a.to_float_backend(opts.tol.max(a.eps()));
    let fb = b.to_float_backend(opts.tol.max(b.eps()));
    match lm_search(&fa, &fb, opts, true) {
        Some((g, residual)) => Ok(Some(CongruenceCertificate {
            g,
            c: None,
            residual,
            verified: true,
        })),
        None => Err(Error::SearchExhausted),
    }
}

fn exact_cert(g: Matrix) -> CongruenceCertificate {
    CongruenceCertificate {
        g,
        c: None,
        residual: 0.0,
        verified: true,
    }
}

fn verify_congruence_exact(a: &Matrix, b: &Matrix, g: &Matrix) -> bool {
    g.inverse().is_ok()
        && g.transpose()
            .mul(a)
            .and_then(|x| x.mul(g))
            .map(|x| x == *b)
            .unwrap_or(false)
}

/// Exact-arithmetic certificate attempts.
fn exact_congruence(a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    let n = a.rows();
    if a == b {
        return Ok(Some(Matrix::identity(n, a.backend())));
    }
    // b = u * a with u a perfect Gaussian square: G = sqrt(u) I.
    if let Some(u) = proportionality(a, b) {
        if let Some(s) = u.sqrt_exact() {
            let g = Matrix::identity(n, a.backend()).scale_by(&s);
            if verify_congruence_exact(a, b, &g) {
                return Ok(Some(g));
            }
        }
    }
    // Signed permutations.
    if n <= 4 {
        if let Some(g) = signed_permutation_search(a, b) {
            return Ok(Some(g));
        }
    }
    if n <= 2 {
        if let Some(g) = exact_cert_2(a, b)? {
            return Ok(Some(g));
        }
    }
    // Singular forms: split off the radical and recurse on the quotient.
    if n == 3 {
        if let Some(g) = radical_split_cert(a, b)? {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// u with b = u a (entrywise), if any.
fn proportionality(a: &Matrix, b: &Matrix) -> Option<Scalar> {
    let mut u: Option<Scalar> = None;
    for (x, y) in a.entries().iter().zip(b.entries()) {
        if x.is_zero() != y.is_zero() {
            return None;
        }
        if x.is_zero() {
            continue;
        }
        let r = y.div(x).ok()?;
        match &u {
            None => u = Some(r),
            Some(v) => {
                if !v.approx_eq(&r) {
                    return None;
                }
            }
        }
    }
    u
}

fn signed_permutation_search(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    let backend = a.backend();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out: Option<Matrix> = None;
    visit_perms(&mut perm, 0, &mut |p| {
        if out.is_some() {
            return;
        }
        for signs in 0..(1u32 << n) {
            let mut g = Matrix::zeros(n, n, backend);
            for (j, &i) in p.iter().enumerate() {
                let s = if signs & (1 << j) != 0 {
                    -Scalar::one(backend)
                } else {
                    Scalar::one(backend)
                };
                g.set(i, j, s);
            }
            if verify_congruence_exact(a, b, &g) {
                out = Some(g);
                return;
            }
        }
    });
    out
}

fn visit_perms(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for j in k..perm.len() {
        perm.swap(k, j);
        visit_perms(perm, k + 1, f);
        perm.swap(k, j);
    }
}

// ---------------------------------------------------------------------------
// 2x2 classification and constructive reduction
// ---------------------------------------------------------------------------

/// Congruence class of a 2x2 complex bilinear form.
#[derive(Debug, Clone, PartialEq)]
pub enum Class2 {
    /// Antisymmetric: A(0) (zero) or A(1).
    A { p: u8 },
    /// B(p:q) at the canonical P^1/Sigma_2 representative.
    B { point: ProjectivePoint },
}

impl Class2 {
    pub fn display(&self) -> String {
        match self {
            Class2::A { p } => format!("A({p})"),
            Class2::B { point } => format!("B{}", point.display()),
        }
    }
}

/// Canonical P^1/Sigma_2 representative of (p:q).
pub fn b_point(p: Scalar, q: Scalar) -> ProjectivePoint {
    canonical_projective_rep(&ProjectivePoint::new(vec![p, q]), &[vec![1, 2]])
}

/// The matrix B(p:q) = [[1, p], [q, 0]].
pub fn b2_matrix(p: &Scalar, q: &Scalar) -> Matrix {
    let backend = p.backend();
    let mut m = Matrix::zeros(2, 2, backend);
    m.set(0, 0, Scalar::one(backend));
    m.set(0, 1, p.clone());
    m.set(1, 0, q.clone());
    m
}

/// The matrix A(p) = [[0, p], [-p, 0]].
pub fn a2_matrix(p: &Scalar) -> Matrix {
    let backend = p.backend();
    let mut m = Matrix::zeros(2, 2, backend);
    m.set(0, 1, p.clone());
    m.set(1, 0, -p.clone());
    m
}

/// Classify a 2x2 form, following the constructive representability proof:
/// antisymmetric forms are A(p) with p scaled to 0 or 1; everything else is
/// B(p:q) with the point read off the reduction (through the cosquare for
/// invertible forms, exactly whenever the spectrum splits).
pub fn classify_bilinear_2(m: &Matrix) -> Result<Class2> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::Shape("classify_bilinear_2 needs a 2x2 matrix".into()));
    }
    let inv = cogredient_invariants(m)?;
    if inv.is_antisymmetric() {
        return Ok(Class2::A {
            p: if inv.rank == 0 { 0 } else { 1 },
        });
    }
    let backend = m.backend();
    if inv.rank == 1 {
        return Ok(if inv.is_symmetric() {
            Class2::B {
                point: b_point(Scalar::zero(backend), Scalar::zero(backend)),
            }
        } else {
            Class2::B {
                point: b_point(Scalar::one(backend), Scalar::zero(backend)),
            }
        });
    }
    // Invertible, not antisymmetric: the cosquare spectrum is {l, 1/l} and
    // the class is B(l:1).
    let lambda = cosquare_ratio(m)?;
    Ok(Class2::B {
        point: b_point(lambda, Scalar::one(backend)),
    })
}

/// One eigenvalue of the cosquare of an invertible 2x2 form (its spectrum
/// is {l, 1/l}); falls back to the float backend when the exact spectrum
/// does not split.
fn cosquare_ratio(m: &Matrix) -> Result<Scalar> {
    let cs = m.transpose().inverse()?.mul(m)?;
    match crate::jordan::eigenvalues(&cs) {
        Ok(eigs) => Ok(eigs[0].0.clone()),
        Err(Error::IrreducibleFactor) => {
            let eps = m.eps().max(1e-9);
            let cf = float_cosquare(m, eps)?;
            let eigs = crate::jordan::eigenvalues(&cf)?;
            Ok(eigs[0].0.clone())
        }
        Err(e) => Err(e),
    }
}

/// Constructive reduction of a 2x2 form to its canonical matrix:
/// returns (G, C) with G^T M G = C and C one of A(0), A(1), B(p:q).
/// Exact inputs reduce exactly when the required square roots exist in the
/// Gaussian rationals; otherwise None (callers fall back to floats).
fn reduce2(m: &Matrix) -> Result<Option<(Matrix, Matrix)>> {
    let backend = m.backend();
    let inv = cogredient_invariants(m)?;
    if inv.is_antisymmetric() {
        if inv.rank == 0 {
            return Ok(Some((Matrix::identity(2, backend), m.clone())));
        }
        // diag(1/p, 1) maps [[0,p],[-p,0]] to A(1).
        let p = m.at(0, 1).clone();
        let mut g = Matrix::identity(2, backend);
        g.set(0, 0, p.inv()?);
        let c = g.transpose().mul(m)?.mul(&g)?;
        return Ok(Some((g, c)));
    }
    // Find u with beta(u, u) admitting an exact inverse square root.
    let beta = |x: &Matrix, y: &Matrix| -> Scalar {
        x.transpose()
            .mul(m)
            .unwrap()
            .mul(y)
            .unwrap()
            .at(0, 0)
            .clone()
    };
    let col = |a: Scalar, b: Scalar| Matrix::new(2, 1, vec![a, b]).unwrap();
    let one = Scalar::one(backend);
    let zero = Scalar::zero(backend);
    let s_mixed = m.at(0, 1).clone() + m.at(1, 0).clone();
    let mut candidates: Vec<Matrix> = vec![
        col(one.clone(), zero.clone()),
        col(zero.clone(), one.clone()),
    ];
    let mut mus: Vec<Scalar> = [1i64, -1, 2, -2, 3, -3]
        .iter()
        .map(|&v| Scalar::from_int(v))
        .collect();
    mus.push(Scalar::from_ratio(1, 2));
    mus.push(Scalar::from_ratio(-1, 2));
    mus.push(Scalar::from_ratio(1, 3));
    mus.push(Scalar::i(Backend::Exact));
    mus.push(-Scalar::i(Backend::Exact));
    if !s_mixed.is_zero() {
        mus.push(s_mixed.clone());
        mus.push(-s_mixed.clone());
        if let Ok(si) = s_mixed.inv() {
            mus.push(si);
        }
    }
    let mus: Vec<Scalar> = if backend == Backend::Exact {
        mus
    } else {
        mus.iter().map(|s| s.to_float_backend(m.eps())).collect()
    };
    for mu in &mus {
        candidates.push(col(one.clone(), mu.clone()));
        candidates.push(col(mu.clone(), one.clone()));
    }
    let mut first: Option<(Matrix, Scalar)> = None;
    for u in &candidates {
        let q = beta(u, u);
        if q.is_zero() {
            continue;
        }
        let c = match q.inv()?.sqrt_exact() {
            Some(c) => c,
            None => continue,
        };
        first = Some((u.scale_by(&c), c));
        break;
    }
    let Some((e1, _)) = first else {
        return Ok(None);
    };
    // Complete the basis with v independent of e1.
    let vs = [
        col(zero.clone(), one.clone()),
        col(one.clone(), zero.clone()),
        col(one.clone(), one.clone()),
    ];
    let mut e2: Option<Matrix> = None;
    for v in &vs {
        let det = e1.at(0, 0).clone() * v.at(1, 0).clone()
            - e1.at(1, 0).clone() * v.at(0, 0).clone();
        if det.is_zero() {
            continue;
        }
        let t = beta(v, v);
        if t.is_zero() {
            e2 = Some(v.clone());
            break;
        }
        // e2 = e1 + x v with 1 + x s + x^2 t = 0.
        let s = beta(&e1, v) + beta(v, &e1);
        let four = match backend {
            Backend::Exact => Scalar::from_int(4),
            Backend::Float => Scalar::float(4.0, 0.0),
        };
        let disc = s.clone() * s.clone() - four * t.clone();
        let Some(root) = disc.sqrt_exact() else {
            continue;
        };
        let two_t = (t.clone() + t.clone()).inv()?;
        let x = (-s + root) * two_t;
        e2 = Some(e1.add(&v.scale_by(&x))?);
        break;
    }
    let Some(e2) = e2 else {
        return Ok(None);
    };
    let mut g = Matrix::zeros(2, 2, backend);
    g.set(0, 0, e1.at(0, 0).clone());
    g.set(1, 0, e1.at(1, 0).clone());
    g.set(0, 1, e2.at(0, 0).clone());
    g.set(1, 1, e2.at(1, 0).clone());
    if g.inverse().is_err() {
        return Ok(None);
    }
    let c = g.transpose().mul(m)?.mul(&g)?;
    Ok(Some((g, c)))
}

/// Exact 2x2 certificate through the constructive reduction of both sides
/// plus the canonical in-family moves diag(1, c) and the swap.
fn exact_cert_2(a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    let Some((ga, ca)) = reduce2(a)? else {
        return Ok(None);
    };
    let Some((gb, cb)) = reduce2(b)? else {
        return Ok(None);
    };
    let Some(mv) = canonical_move_2(&ca, &cb)? else {
        return Ok(None);
    };
    let g = ga.mul(&mv)?.mul(&gb.inverse()?)?;
    if verify_congruence_exact(a, b, &g) {
        Ok(Some(g))
    } else {
        Ok(None)
    }
}

/// Exact move between two canonical 2x2 matrices in the same class:
/// identity, scaling diag(1, c), the swap [[1, p+q], [0, -1]], or their
/// composition. None when the canonicals are in different classes.
fn canonical_move_2(ca: &Matrix, cb: &Matrix) -> Result<Option<Matrix>> {
    if ca == cb {
        return Ok(Some(Matrix::identity(2, ca.backend())));
    }
    let backend = ca.backend();
    // Both must be B-form [[1, p], [q, 0]] to move within the family.
    let is_b_form = |m: &Matrix| m.at(0, 0).is_one() && m.at(1, 1).is_zero();
    if !is_b_form(ca) || !is_b_form(cb) {
        return Ok(None);
    }
    let (p, q) = (ca.at(0, 1).clone(), ca.at(1, 0).clone());
    let (p2, q2) = (cb.at(0, 1).clone(), cb.at(1, 0).clone());
    // Try plain scaling (p2, q2) = (c p, c q).
    let try_scale = |p: &Scalar, q: &Scalar| -> Option<Scalar> {
        let c = if !p.is_zero() {
            p2.div(p).ok()?
        } else if !q.is_zero() {
            q2.div(q).ok()?
        } else {
            return None;
        };
        let ok = p.clone() * c.clone() == p2 && q.clone() * c.clone() == q2;
        ok.then_some(c)
    };
    if let Some(c) = try_scale(&p, &q) {
        let mut g = Matrix::identity(2, backend);
        g.set(1, 1, c);
        return Ok(Some(g));
    }
    // Swap then scale: B(p:q) -> B(q:p) via [[1, p+q], [0, -1]].
    let mut swap = Matrix::identity(2, backend);
    swap.set(0, 1, p.clone() + q.clone());
    swap.set(1, 1, -Scalar::one(backend));
    if let Some(c) = try_scale(&q, &p) {
        let mut g = Matrix::identity(2, backend);
        g.set(1, 1, c);
        return Ok(Some(swap.mul(&g)?));
    }
    Ok(None)
}

/// Split a singular form as radical + quotient and certify blockwise.
fn radical_split_cert(a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    let n = a.rows();
    let Some((ua, ka)) = radical_adapted_basis(a)? else {
        return Ok(None);
    };
    let Some((ub, kb)) = radical_adapted_basis(b)? else {
        return Ok(None);
    };
    if ka != kb || ka == 0 || ka == n {
        return Ok(None);
    }
    let qa = quotient_block(a, &ua, ka)?;
    let qb = quotient_block(b, &ub, ka)?;
    let sub = if ka <= 2 {
        exact_congruence(&qa, &qb)?
    } else {
        None
    };
    let Some(gq) = sub else {
        return Ok(None);
    };
    let mut block = Matrix::identity(n, a.backend());
    for i in 0..ka {
        for j in 0..ka {
            block.set(i, j, gq.at(i, j).clone());
        }
    }
    let g = ua.mul(&block)?.mul(&ub.inverse()?)?;
    if verify_congruence_exact(a, b, &g) {
        Ok(Some(g))
    } else {
        Ok(None)
    }
}

/// Basis adapted to the radical: returns (U, k) where U's first k columns
/// complement the radical, the rest span it, and U^T M U = [[Q, 0], [0, 0]].
fn radical_adapted_basis(m: &Matrix) -> Result<Option<(Matrix, usize)>> {
    let n = m.rows();
    let backend = m.backend();
    let mt = m.transpose();
    let mut stacked = Matrix::zeros(2 * n, n, backend);
    for i in 0..n {
        for j in 0..n {
            stacked.set(i, j, m.at(i, j).clone());
            stacked.set(n + i, j, mt.at(i, j).clone());
        }
    }
    let rad = stacked.kernel_basis();
    if rad.is_empty() {
        return Ok(None);
    }
    let k = n - rad.len();
    // Greedily extend the radical to a full basis with standard vectors.
    let mut cols: Vec<Matrix> = Vec::new();
    for i in 0..n {
        let mut e = Matrix::zeros(n, 1, backend);
        e.set(i, 0, Scalar::one(backend));
        let mut test = Matrix::zeros(n, cols.len() + rad.len() + 1, backend);
        let mut cidx = 0;
        for c in cols.iter().chain(rad.iter()).chain(std::iter::once(&e)) {
            for r in 0..n {
                test.set(r, cidx, c.at(r, 0).clone());
            }
            cidx += 1;
        }
        if test.rank() == cols.len() + rad.len() + 1 {
            cols.push(e);
        }
        if cols.len() == k {
            break;
        }
    }
    let mut u = Matrix::zeros(n, n, backend);
    for (j, c) in cols.iter().chain(rad.iter()).enumerate() {
        for i in 0..n {
            u.set(i, j, c.at(i, 0).clone());
        }
    }
    if u.inverse().is_err() {
        return Ok(None);
    }
    Ok(Some((u, k)))
}

fn quotient_block(m: &Matrix, u: &Matrix, k: usize) -> Result<Matrix> {
    let full = u.transpose().mul(m)?.mul(u)?;
    Matrix::from_fn(k, k, |i, j| full.at(i, j).clone())
}

// ---------------------------------------------------------------------------
// Damped Gauss-Newton certificate search (float)
// ---------------------------------------------------------------------------

/// Seeded Levenberg-Marquardt on vec(G^T A G - B). With
/// `require_invertible` the accepted G must have a determinant bounded away
/// from zero (a congruence witness); without it the minimizer certifies
/// closure reachability.
fn lm_search(a: &Matrix, b: &Matrix, opts: &SearchOptions, require_invertible: bool) -> Option<(Matrix, f64)> {
    let n = a.rows();
    let av = to_c64(a);
    let bv = to_c64(b);
    let accept = opts.tol * frob(&bv).max(1e-3);
    let mut rng = Rng::new(opts.seed);
    let mut best: Option<(Vec<Complex64>, f64)> = None;
    for restart in 0..opts.restarts {
        let mut g: Vec<Complex64> = (0..n * n)
            .map(|i| {
                let base = if i % (n + 1) == 0 && restart == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                base + Complex64::new(rng.next_gaussian(), rng.next_gaussian()) * 0.6
            })
            .collect();
        let mut mu = 1e-3;
        let mut res = residual(&av, &g, &bv, n);
        let mut rnorm = frob(&res);
        for _ in 0..400 {
            if rnorm <= accept * 0.5 {
                break;
            }
            let jac = jacobian(&av, &g, n);
            // Solve (J^H J + mu I) delta = -J^H r.
            let m2 = n * n;
            let mut lhs = vec![Complex64::new(0.0, 0.0); m2 * m2];
            let mut rhs = vec![Complex64::new(0.0, 0.0); m2];
            for i in 0..m2 {
                for j in 0..m2 {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..m2 {
                        s += jac[k * m2 + i].conj() * jac[k * m2 + j];
                    }
                    if i == j {
                        s += Complex64::new(mu, 0.0);
                    }
                    lhs[i * m2 + j] = s;
                }
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..m2 {
                    s += jac[k * m2 + i].conj() * res[k];
                }
                rhs[i] = -s;
            }
            let Some(delta) = solve_c64(&mut lhs, &mut rhs, m2) else {
                mu *= 10.0;
                continue;
            };
            let trial: Vec<Complex64> = g.iter().zip(&delta).map(|(x, d)| x + d).collect();
            let tres = residual(&av, &trial, &bv, n);
            let tnorm = frob(&tres);
            if tnorm < rnorm {
                g = trial;
                res = tres;
                rnorm = tnorm;
                mu = (mu / 3.0).max(1e-14);
            } else {
                mu *= 4.0;
                if mu > 1e12 {
                    break;
                }
            }
        }
        let ok_det = !require_invertible || det_c64(&g, n).norm() > 1e-9;
        if rnorm <= accept && ok_det {
            let better = best.as_ref().map(|(_, r)| rnorm < *r).unwrap_or(true);
            if better {
                best = Some((g, rnorm));
            }
            break;
        }
    }
    best.map(|(g, r)| {
        let eps = a.eps().max(1e-12);
        let gm = Matrix::from_fn(n, n, |i, j| {
            Scalar::float_with_eps(g[i * n + j].re, g[i * n + j].im, eps)
        })
        .expect("float matrix");
        (gm, r)
    })
}

fn to_c64(m: &Matrix) -> Vec<Complex64> {
    m.entries().iter().map(Scalar::to_complex64).collect()
}

fn frob(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn matmul_c64(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let v = a[i * n + k];
            if v.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += v * b[k * n + j];
            }
        }
    }
    out
}

fn transpose_c64(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

fn residual(a: &[Complex64], g: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let gt = transpose_c64(g, n);
    let gag = matmul_c64(&matmul_c64(&gt, a, n), g, n);
    gag.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// d residual / d G as an (n^2) x (n^2) complex matrix, row-major.
fn jacobian(a: &[Complex64], g: &[Complex64], n: usize) -> Vec<Complex64> {
    let m2 = n * n;
    let ag = matmul_c64(a, g, n);
    let gta = matmul_c64(&transpose_c64(g, n), a, n);
    let mut jac = vec![Complex64::new(0.0, 0.0); m2 * m2];
    for p in 0..n {
        for q in 0..n {
            let row = p * n + q;
            for k in 0..n {
                for l in 0..n {
                    let col = k * n + l;
                    let mut v = Complex64::new(0.0, 0.0);
                    if p == l {
                        v += ag[k * n + q];
                    }
                    if q == l {
                        v += gta[p * n + k];
                    }
                    jac[row * m2 + col] = v;
                }
            }
        }
    }
    jac
}

/// In-place Gaussian elimination solve; None when singular.
fn solve_c64(a: &mut [Complex64], b: &mut [Complex64], n: usize) -> Option<Vec<Complex64>> {
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].norm();
        for r in col + 1..n {
            let v = a[r * n + col].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        let inv = a[col * n + col].inv();
        for r in col + 1..n {
            let f = a[r * n + col] * inv;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[col * n + c];
                a[r * n + c] -= f * v;
            }
            let bv = b[col];
            b[r] -= f * bv;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i * n + j] * x[j];
        }
        x[i] = s * a[i * n + i].inv();
    }
    Some(x)
}

fn det_c64(g: &[Complex64], n: usize) -> Complex64 {
    let mut a = g.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].norm();
        for r in col + 1..n {
            let v = a[r * n + col].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            det = -det;
        }
        det *= a[col * n + col];
        let inv = a[col * n + col].inv();
        for r in col + 1..n {
            let f = a[r * n + col] * inv;
            for c in col..n {
                let v = a[col * n + c];
                a[r * n + c] -= f * v;
            }
        }
    }
    det
}

/// Unconstrained reachability: can G^T T G approximate S arbitrarily well?
/// Success certifies that S lies in the closure of T's congruence class.
pub fn closure_reachable(target: &Matrix, limit: &Matrix, opts: &SearchOptions) -> bool {
    let tol = SearchOptions {
        tol: 1e-6,
        ..*opts
    };
    let ft = target.to_float_backend(1e-12);
    let fl = limit.to_float_backend(1e-12);
    lm_search(&ft, &fl, &tol, false).is_some()
}

// ---------------------------------------------------------------------------
// 3-dimensional families
// ---------------------------------------------------------------------------

/// The matrices B_1(p:q), ..., B_6 of the first 3-dimensional scheme;
/// families 1 and 2 take a point.
pub fn b_family(k: usize, point: Option<(&Scalar, &Scalar)>) -> Result<Matrix> {
    let needs_point = matches!(k, 1 | 2);
    if needs_point != point.is_some() {
        return Err(Error::Invalid(format!(
            "B_{k} {} a parameter point",
            if needs_point { "requires" } else { "does not take" }
        )));
    }
    Ok(match k {
        1 | 2 => {
            let (p, q) = point.unwrap();
            let backend = p.backend();
            let mut m = Matrix::zeros(3, 3, backend);
            m.set(0, 0, Scalar::one(backend));
            m.set(0, 1, p.clone());
            m.set(1, 0, q.clone());
            if k == 1 {
                m.set(2, 2, Scalar::one(backend));
            }
            m
        }
        3 => Matrix::from_i64(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]]),
        4 => Matrix::from_i64(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 0]]),
        5 => Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]),
        6 => Matrix::from_i64(&[&[0, 0, 1], &[0, -1, -1], &[1, 1, 0]]),
        _ => return Err(Error::Invalid(format!("B_{k} is not a family"))),
    })
}

/// The matrices C_1(p:q), ..., C_6 of the deformation-adapted scheme;
/// families 1 and 5 take a point.
pub fn c_family(k: usize, point: Option<(&Scalar, &Scalar)>) -> Result<Matrix> {
    let needs_point = matches!(k, 1 | 5);
    if needs_point != point.is_some() {
        return Err(Error::Invalid(format!(
            "C_{k} {} a parameter point",
            if needs_point { "requires" } else { "does not take" }
        )));
    }
    Ok(match k {
        1 | 5 => {
            let (p, q) = point.unwrap();
            let backend = p.backend();
            let mut m = Matrix::zeros(3, 3, backend);
            m.set(0, 2, q.clone());
            m.set(2, 0, p.clone());
            m.set(2, 2, Scalar::one(backend));
            if k == 1 {
                m.set(1, 1, Scalar::one(backend));
                m.set(1, 2, Scalar::one(backend));
            }
            m
        }
        2 => Matrix::from_i64(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 1]]),
        3 => Matrix::from_i64(&[&[0, 1, 1], &[-1, 0, 0], &[0, 0, 0]]),
        4 => Matrix::from_i64(&[&[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]),
        6 => Matrix::from_i64(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]),
        _ => return Err(Error::Invalid(format!("C_{k} is not a family"))),
    })
}

/// Congruence class of a 3x3 form in the C-scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct Class3 {
    pub family: usize,
    pub point: Option<ProjectivePoint>,
}

impl Class3 {
    fn family_only(family: usize) -> Self {
        Class3 {
            family,
            point: None,
        }
    }

    fn at(family: usize, p: Scalar, q: Scalar) -> Self {
        Class3 {
            family,
            point: Some(b_point(p, q)),
        }
    }

    pub fn display(&self) -> String {
        match &self.point {
            Some(pt) => format!("C{}{}", self.family, pt.display()),
            None => format!("C{}", self.family),
        }
    }

    /// Representative matrix of the class.
    pub fn representative(&self) -> Result<Matrix> {
        match (self.family, &self.point) {
            (1, Some(pt)) => c_family(1, Some((&pt.coords[0], &pt.coords[1]))),
            (5, Some(pt)) => c_family(5, Some((&pt.coords[0], &pt.coords[1]))),
            (f, None) => c_family(f, None),
            _ => Err(Error::Invalid("bad class".into())),
        }
    }
}

/// Classify a 3x3 form into the C-scheme: invariant filtering first, then
/// point determination through the radical quotient or the cosquare, with
/// a certificate confirmation against the candidate representative.
///
/// The overlap rule is honored: C_1(0:0) classifies as C_5(1:gamma) with
/// gamma a primitive sixth root of unity (float backend; the point leaves
/// the Gaussian rationals).
pub fn classify_bilinear_3(m: &Matrix) -> Result<Class3> {
    if m.rows() != 3 || m.cols() != 3 {
        return Err(Error::Shape("classify_bilinear_3 needs a 3x3 matrix".into()));
    }
    if m.is_zero() {
        // The zero form is not covered by the C-families (C_5(0:0) already
        // has rank 1).
        return Err(Error::Unclassifiable);
    }
    let inv = cogredient_invariants(m)?;
    let backend = m.backend();
    let candidates: Vec<Class3> = if inv.is_antisymmetric() {
        vec![Class3::family_only(6)]
    } else if inv.is_symmetric() {
        match inv.rank {
            3 => vec![Class3::family_only(4)],
            2 => vec![Class3::at(5, Scalar::one(backend), Scalar::one(backend))],
            1 => vec![Class3::at(5, Scalar::zero(backend), Scalar::zero(backend))],
            _ => return Err(Error::Unclassifiable),
        }
    } else if inv.rank == 3 {
        // Cosquare spectrum {1, l, 1/l}; numeric multiple roots are badly
        // conditioned, so coarser readings are kept as fallback candidates
        // and every candidate must survive the certificate confirmation.
        let mut structures: Vec<JordanStructure> = Vec::new();
        if let Some(js) = &inv.cosquare {
            structures.push(js.clone());
        }
        for eps in [m.eps().max(1e-9), 1e-6, 1e-4] {
            if let Ok(js) = float_cosquare(m, eps).and_then(|c| jordan_structure(&c)) {
                structures.push(js);
            }
        }
        let mut cands = Vec::new();
        for js in structures {
            if let Ok(c) = classify3_from_cosquare(&js, backend) {
                if !cands.contains(&c) {
                    cands.push(c);
                }
            }
        }
        cands
    } else {
        // Singular, not (anti)symmetric.
        if inv.radical == 1 {
            let (u, k) = radical_adapted_basis(m)?.ok_or(Error::Unclassifiable)?;
            let q = quotient_block(m, &u, k)?;
            match classify_bilinear_2(&q)? {
                Class2::B { point } => vec![Class3 {
                    family: 5,
                    point: Some(point),
                }],
                // A quotient cannot be antisymmetric here: the form itself
                // would be antisymmetric.
                Class2::A { .. } => return Err(Error::Unclassifiable),
            }
        } else if inv.ker_span == 2 && inv.rank_sym == 3 {
            vec![Class3::at(1, Scalar::one(backend), Scalar::zero(backend))]
        } else if inv.ker_span == 2 && inv.rank_sym == 2 {
            vec![Class3::family_only(3)]
        } else {
            return Err(Error::Unclassifiable);
        }
    };
    if candidates.is_empty() {
        return Err(Error::Unclassifiable);
    }
    let mut last = Error::Unclassifiable;
    for class in candidates {
        match confirm_class3(m, &class) {
            Ok(()) => return Ok(class),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Does a scalar equal the given small integer, at its own backend's
/// tolerance?
fn approx_is(v: &Scalar, target: i64) -> bool {
    let t = match v.backend() {
        Backend::Exact => Scalar::from_int(target),
        Backend::Float => Scalar::float_with_eps(target as f64, 0.0, v.eps()),
    };
    v.approx_eq(&t)
}

fn classify3_from_cosquare(js: &JordanStructure, backend: Backend) -> Result<Class3> {
    let one = Scalar::one(backend);
    // Unipotent spectrum: [3] block is C_1(1:1), diagonalizable is C_4.
    if js.entries.len() == 1 && approx_is(&js.entries[0].0, 1) {
        return match js.entries[0].1.as_slice() {
            [3] => Ok(Class3::at(1, one.clone(), one)),
            [1, 1, 1] => Ok(Class3::family_only(4)),
            _ => Err(Error::Unclassifiable),
        };
    }
    let mut vals: Vec<(Scalar, Vec<usize>)> = js.entries.clone();
    if let Some((_, blocks)) = vals.iter().find(|(v, _)| approx_is(v, -1)) {
        // Spectrum {-1, -1, 1}: J_2(-1) -> C_1(1:-1); diagonalizable -> C_2.
        return if blocks.as_slice() == [2] {
            Ok(Class3::at(1, one.clone(), -one))
        } else {
            Ok(Class3::family_only(2))
        };
    }
    // Remove one eigenvalue 1; what remains must be a simple pair {l, 1/l}.
    let pos_one = vals
        .iter()
        .position(|(v, _)| approx_is(v, 1))
        .ok_or(Error::Unclassifiable)?;
    if vals[pos_one].1 == vec![1] {
        vals.remove(pos_one);
    } else {
        return Err(Error::Unclassifiable);
    }
    if vals.len() == 2 && vals.iter().all(|(_, b)| b.as_slice() == [1]) {
        let l = vals[0].0.clone();
        return Ok(Class3::at(1, l, Scalar::one(backend)));
    }
    Err(Error::Unclassifiable)
}

/// Certificate confirmation of a proposed class.
fn confirm_class3(m: &Matrix, class: &Class3) -> Result<()> {
    let rep = class.representative()?;
    let rep = if m.backend() == Backend::Float && rep.backend() == Backend::Exact {
        rep.to_float_backend(m.eps())
    } else {
        rep
    };
    match congruent(m, &rep, &SearchOptions::default()) {
        Ok(Some(_)) => Ok(()),
        Ok(None) => Err(Error::Unclassifiable),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Dictionary between the 2x2 schemes
// ---------------------------------------------------------------------------

/// One verified dictionary item.
#[derive(Debug, Clone)]
pub struct DictionaryItem {
    pub name: String,
    pub certificate: CongruenceCertificate,
    pub exact: bool,
}

/// Verify the seven-item dictionary between the H/Gamma/J summand scheme
/// and the A/B scheme by producing explicit certificates.
pub fn dictionary_check(opts: &SearchOptions) -> Result<Vec<DictionaryItem>> {
    let mut items = Vec::new();
    let mut push = |name: String, a: &Matrix, b: &Matrix| -> Result<()> {
        let cert = congruent(a, b, opts)?.ok_or(Error::SearchExhausted)?;
        let exact = cert.residual == 0.0;
        items.push(DictionaryItem {
            name,
            certificate: cert,
            exact,
        });
        Ok(())
    };
    // 1. H_1(lambda) ~ B(p:q) with lambda = p/q, sampled at 2, 3, 1/2.
    for (num, den) in [(2i64, 1i64), (3, 1), (1, 2)] {
        let lambda = Scalar::from_ratio(num, den);
        let h = build_summand(&CanonicalSummand::H {
            m: 1,
            lambda: lambda.clone(),
        })?;
        let b = b2_matrix(&lambda, &Scalar::from_int(1));
        push(format!("H1({num}/{den}) ~ B({num}/{den}:1)"), &h, &b)?;
    }
    // 2. B(1:1) ~ diag(1,1)
    let b11 = b2_matrix(&Scalar::from_int(1), &Scalar::from_int(1));
    push("B(1:1) ~ diag(1,1)".into(), &b11, &Matrix::identity(2, Backend::Exact))?;
    // 3. B(1:-1) ~ Gamma_2
    let b1m1 = b2_matrix(&Scalar::from_int(1), &Scalar::from_int(-1));
    let g2 = build_summand(&CanonicalSummand::Gamma { m: 2 })?;
    push("B(1:-1) ~ Gamma_2".into(), &b1m1, &g2)?;
    // 4. B(1:0) ~ J_2(0)
    let b10 = b2_matrix(&Scalar::from_int(1), &Scalar::from_int(0));
    let j2 = build_summand(&CanonicalSummand::Jzero { m: 2 })?;
    push("B(1:0) ~ J_2(0)".into(), &b10, &j2)?;
    // 5. B(0:0) ~ diag(1,0)
    let b00 = b2_matrix(&Scalar::from_int(0), &Scalar::from_int(0));
    let d10 = Matrix::from_i64(&[&[1, 0], &[0, 0]]);
    push("B(0:0) ~ diag(1,0)".into(), &b00, &d10)?;
    // 6. H_1(-1) ~ A(1)
    let hm1 = build_summand(&CanonicalSummand::H {
        m: 1,
        lambda: Scalar::from_int(-1),
    })?;
    let a1 = a2_matrix(&Scalar::from_int(1));
    push("H1(-1) ~ A(1)".into(), &hm1, &a1)?;
    // 7. A(0) = diag(0,0)
    let a0 = a2_matrix(&Scalar::from_int(0));
    push("A(0) = diag(0,0)".into(), &a0, &Matrix::zeros(2, 2, Backend::Exact))?;
    Ok(items)
}

// ---------------------------------------------------------------------------
// Jump verification and the 3-dimensional deformation graph
// ---------------------------------------------------------------------------

/// Verify a jump deformation: D_t = D + t * sum(directions) must be
/// congruent to the target for sampled t != 0 while D itself is not.
pub fn verify_jump(
    d: &Matrix,
    directions: &[Matrix],
    target: &Matrix,
    opts: &SearchOptions,
) -> Result<bool> {
    let mut total = Matrix::zeros(d.rows(), d.cols(), d.backend());
    for dir in directions {
        total = total.add(dir)?;
    }
    // D itself must not be congruent to the target (invariant separation or
    // an exhausted search both count).
    match congruent(d, target, opts) {
        Ok(Some(_)) => return Ok(false),
        Ok(None) | Err(Error::SearchExhausted) => {}
        Err(e) => return Err(e),
    }
    let steps = match d.backend() {
        Backend::Exact => vec![
            Scalar::from_int(1),
            Scalar::from_ratio(1, 2),
            Scalar::from_ratio(1, 4),
        ],
        Backend::Float => vec![
            Scalar::float(1.0, 0.0),
            Scalar::float(0.5, 0.0),
            Scalar::float(0.25, 0.0),
        ],
    };
    for t in steps {
        let dt = d.add(&total.scale_by(&t))?;
        match congruent(&dt, target, opts) {
            Ok(Some(_)) => {}
            Ok(None) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Node labels of the 3-dimensional bilinear graph.
fn bnode(label: &str, kind: NodeKind) -> Node {
    Node {
        label: label.to_string(),
        kind,
        stratum: None,
        pattern: None,
    }
}

/// The deformation graph of 3x3 bilinear forms: nodes are the C-families,
/// their distinguished points, and the coincidence members; edges follow
/// the prose description, each backed by a machine check.
pub fn bilinear_deformation_graph_3(opts: &SearchOptions) -> Result<DeformationGraph> {
    let one = Scalar::from_int(1);
    let mone = Scalar::from_int(-1);
    let zero = Scalar::from_int(0);
    let two = Scalar::from_int(2);

    let c1 = |p: &Scalar, q: &Scalar| c_family(1, Some((p, q)));
    let c5 = |p: &Scalar, q: &Scalar| c_family(5, Some((p, q)));

    let reps: Vec<(&str, NodeKind, Matrix)> = vec![
        ("C1 (p:q)", NodeKind::Family, c1(&one, &two)?),
        ("C1 (0:0)", NodeKind::Generic, c1(&zero, &zero)?),
        ("C1 (1:1)", NodeKind::Point, c1(&one, &one)?),
        ("C1 (1:-1)", NodeKind::Point, c1(&one, &mone)?),
        ("C2", NodeKind::Point, c_family(2, None)?),
        ("C3", NodeKind::Point, c_family(3, None)?),
        ("C4", NodeKind::Point, c_family(4, None)?),
        ("C5 (p:q)", NodeKind::Family, c5(&one, &two)?),
        ("C5 (0:0)", NodeKind::Generic, c5(&zero, &zero)?),
        ("C5 (1:1)", NodeKind::Point, c5(&one, &one)?),
        ("C5 (1:-1)", NodeKind::Point, c5(&one, &mone)?),
        ("C6", NodeKind::Point, c_family(6, None)?),
    ];
    let rep = |label: &str| -> &Matrix {
        &reps.iter().find(|(l, _, _)| *l == label).unwrap().2
    };

    // (source, target, kind); family targets mean "every member except the
    // generic element".
    let edges: Vec<(&str, &str, EdgeKind)> = vec![
        ("C1 (0:0)", "C1 (p:q)", EdgeKind::JumpToFamily),
        ("C2", "C1 (1:-1)", EdgeKind::JumpToPoint),
        ("C3", "C1 (p:q)", EdgeKind::JumpToFamily),
        ("C4", "C1 (1:1)", EdgeKind::JumpToPoint),
        ("C5 (p:q)", "C1 (p:q)", EdgeKind::JumpToFamily),
        ("C5 (p:q)", "C3", EdgeKind::JumpToPoint),
        ("C5 (1:1)", "C4", EdgeKind::JumpToPoint),
        ("C5 (1:-1)", "C2", EdgeKind::JumpToPoint),
        ("C5 (0:0)", "C5 (p:q)", EdgeKind::JumpToFamily),
        ("C5 (0:0)", "C2", EdgeKind::JumpToPoint),
        ("C5 (0:0)", "C4", EdgeKind::JumpToPoint),
        ("C6", "C5 (1:-1)", EdgeKind::JumpToPoint),
        ("C6", "C2", EdgeKind::JumpToPoint),
        ("C6", "C3", EdgeKind::JumpToPoint),
        ("C6", "C1 (p:q)", EdgeKind::JumpToFamily),
    ];

    // Machine checks.
    for (src, tgt, _) in &edges {
        if src.ends_with("(0:0)") && tgt.ends_with("(p:q)") && src[..2] == tgt[..2] {
            // Generic element of a family: the scaling curve C(tp:tq) is a
            // jump to every member; classify along the curve.
            let fam = if src.starts_with("C1") { 1 } else { 5 };
            let base = classify_bilinear_3(rep(tgt))?;
            for t in [Scalar::from_ratio(1, 2), Scalar::from_ratio(1, 4)] {
                let along = c_family(fam, Some((&t.clone(), &(t.clone() * two.clone()))))?;
                if classify_bilinear_3(&along)? != base {
                    return Err(Error::SearchExhausted);
                }
            }
            continue;
        }
        // Degeneration check: the source must be reachable as a limit of
        // congruence images of the target, and the classes must differ.
        let s = rep(src);
        let sample_targets: Vec<Matrix> = if tgt.ends_with("(p:q)") {
            let fam = if tgt.starts_with("C1") { 1 } else { 5 };
            vec![
                c_family(fam, Some((&one, &two)))?,
                c_family(fam, Some((&one, &one)))?,
                c_family(fam, Some((&one, &mone)))?,
            ]
        } else {
            vec![rep(tgt).clone()]
        };
        for t in &sample_targets {
            if classify_bilinear_3(s)? == classify_bilinear_3(t)? {
                return Err(Error::SearchExhausted);
            }
            // A limit of symmetric (antisymmetric) forms stays symmetric
            // (antisymmetric).
            let it = cogredient_invariants(t)?;
            let is = cogredient_invariants(s)?;
            if (it.is_symmetric() && !is.is_symmetric())
                || (it.is_antisymmetric() && !is.is_antisymmetric())
            {
                return Err(Error::SearchExhausted);
            }
            if !closure_reachable(t, s, opts) {
                return Err(Error::SearchExhausted);
            }
        }
    }

    let mut nodes: Vec<Node> = reps
        .iter()
        .map(|(l, k, _)| bnode(l, *k))
        .collect();
    // Family membership for the clusters.
    let mut all_edges: Vec<Edge> = edges
        .iter()
        .map(|(f, t, k)| Edge {
            from: f.to_string(),
            to: t.to_string(),
            kind: *k,
        })
        .collect();
    for fam in ["C1", "C5"] {
        for (label, kind, _) in &reps {
            if label.starts_with(fam) && *kind != NodeKind::Family {
                all_edges.push(Edge {
                    from: format!("{fam} (p:q)"),
                    to: label.to_string(),
                    kind: EdgeKind::Smooth,
                });
            }
        }
    }
    all_edges.sort();
    nodes.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(DeformationGraph {
        name: "bilinear_3".into(),
        nodes,
        edges: all_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    #[test]
    fn summand_matrices() {
        let h1 = build_summand(&CanonicalSummand::H { m: 1, lambda: s(5) }).unwrap();
        assert_eq!(h1, Matrix::from_i64(&[&[0, 1], &[5, 0]]));
        let g2 = build_summand(&CanonicalSummand::Gamma { m: 2 }).unwrap();
        assert_eq!(g2, Matrix::from_i64(&[&[0, -1], &[1, 1]]));
        let g3 = build_summand(&CanonicalSummand::Gamma { m: 3 }).unwrap();
        assert_eq!(g3, Matrix::from_i64(&[&[0, 0, 1], &[0, -1, -1], &[1, 1, 0]]));
        let j2 = build_summand(&CanonicalSummand::Jzero { m: 2 }).unwrap();
        assert_eq!(j2, Matrix::from_i64(&[&[0, 1], &[0, 0]]));
        // H_1 excludes 0 and 1; H_2 excludes 0 and -1.
        assert!(build_summand(&CanonicalSummand::H { m: 1, lambda: s(1) }).is_err());
        assert!(build_summand(&CanonicalSummand::H { m: 1, lambda: s(0) }).is_err());
        assert!(build_summand(&CanonicalSummand::H { m: 2, lambda: s(-1) }).is_err());
        assert!(build_summand(&CanonicalSummand::H { m: 2, lambda: s(1) }).is_ok());
    }

    #[test]
    fn gamma3_matches_b6() {
        let g3 = build_summand(&CanonicalSummand::Gamma { m: 3 }).unwrap();
        assert_eq!(g3, b_family(6, None).unwrap());
    }

    #[test]
    fn invariant_examples() {
        let i = cogredient_invariants(&Matrix::identity(2, Backend::Exact)).unwrap();
        assert_eq!((i.rank, i.rank_sym, i.rank_skew), (2, 2, 0));
        let a1 = a2_matrix(&s(1));
        let i = cogredient_invariants(&a1).unwrap();
        assert_eq!((i.rank, i.rank_sym, i.rank_skew), (2, 0, 2));
        // B(1:0) = [[1,1],[0,0]]: the antisymmetric part of a nonzero 2x2
        // form has even rank, so the triple is (1, 2, 2).
        let b10 = b2_matrix(&s(1), &s(0));
        let i = cogredient_invariants(&b10).unwrap();
        assert_eq!((i.rank, i.rank_sym, i.rank_skew), (1, 2, 2));
    }

    #[test]
    fn classify2_examples() {
        // [[0,5],[-5,0]] -> A(1)
        let m = a2_matrix(&s(5));
        assert_eq!(classify_bilinear_2(&m).unwrap(), Class2::A { p: 1 });
        assert_eq!(
            classify_bilinear_2(&Matrix::zeros(2, 2, Backend::Exact)).unwrap(),
            Class2::A { p: 0 }
        );
        // diag(1,1) -> B(1:1)
        let c = classify_bilinear_2(&Matrix::identity(2, Backend::Exact)).unwrap();
        assert_eq!(c, Class2::B { point: b_point(s(1), s(1)) });
        // J_2(0) -> B(1:0)
        let c = classify_bilinear_2(&Matrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap();
        assert_eq!(c, Class2::B { point: b_point(s(1), s(0)) });
        // H_1(2) -> B(2:1)
        let h = build_summand(&CanonicalSummand::H { m: 1, lambda: s(2) }).unwrap();
        let c = classify_bilinear_2(&h).unwrap();
        assert_eq!(c, Class2::B { point: b_point(s(2), s(1)) });
    }

    #[test]
    fn classify2_is_orbit_constant() {
        let m = b2_matrix(&s(1), &s(3));
        let base = classify_bilinear_2(&m).unwrap();
        let g = Matrix::from_i64(&[&[2, 1], &[1, 1]]);
        let moved = g.transpose().mul(&m).unwrap().mul(&g).unwrap();
        assert_eq!(classify_bilinear_2(&moved).unwrap(), base);
        // swap representative
        assert_eq!(
            classify_bilinear_2(&b2_matrix(&s(3), &s(1))).unwrap(),
            base
        );
        // scaling representative
        assert_eq!(
            classify_bilinear_2(&b2_matrix(&s(1), &s(3)).scale_by(&s(7))).unwrap(),
            base
        );
    }

    #[test]
    fn congruent_family_moves() {
        let opts = SearchOptions::default();
        // B(1:2) ~ B(2:4) via diag(1, c)
        let cert = congruent(&b2_matrix(&s(1), &s(2)), &b2_matrix(&s(2), &s(4)), &opts)
            .unwrap()
            .unwrap();
        assert_eq!(cert.residual, 0.0);
        // B(1:2) ~ B(2:1) via the swap
        let cert = congruent(&b2_matrix(&s(1), &s(2)), &b2_matrix(&s(2), &s(1)), &opts)
            .unwrap()
            .unwrap();
        assert_eq!(cert.residual, 0.0);
        // definite inequivalence: diag(1,1) vs A(1)
        assert!(congruent(&Matrix::identity(2, Backend::Exact), &a2_matrix(&s(1)), &opts)
            .unwrap()
            .is_none());
    }

    #[test]
    fn certificates_verify() {
        let opts = SearchOptions::default();
        let pairs = vec![
            (b2_matrix(&s(1), &s(1)), Matrix::identity(2, Backend::Exact)),
            (
                b2_matrix(&s(1), &s(-1)),
                build_summand(&CanonicalSummand::Gamma { m: 2 }).unwrap(),
            ),
            (
                b2_matrix(&s(1), &s(0)),
                build_summand(&CanonicalSummand::Jzero { m: 2 }).unwrap(),
            ),
        ];
        for (a, b) in pairs {
            let cert = congruent(&a, &b, &opts).unwrap().unwrap();
            assert!(cert.verified);
            assert_eq!(cert.residual, 0.0, "expected exact certificate");
            let lhs = cert.g.transpose().mul(&a).unwrap().mul(&cert.g).unwrap();
            assert_eq!(lhs, b);
        }
    }

    #[test]
    fn dictionary_all_exact() {
        let items = dictionary_check(&SearchOptions::default()).unwrap();
        assert_eq!(items.len(), 9); // 3 sampled lambdas + 6 fixed items
        for item in &items {
            assert!(item.exact, "{} should be exact", item.name);
            assert!(item.certificate.verified);
        }
    }

    #[test]
    fn projectivity_certificates() {
        let opts = SearchOptions::default();
        // u = 9/4 has the exact square root 3/2
        let m = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        let um = m.scale_by(&Scalar::from_ratio(9, 4));
        let cert = congruent(&m, &um, &opts).unwrap().unwrap();
        assert_eq!(cert.residual, 0.0);
        // u = 2 needs the float backend
        let um = m.scale_by(&s(2));
        let cert = congruent(&m, &um, &opts).unwrap().unwrap();
        assert!(cert.residual <= 1e-9 * um.norm());
    }

    #[test]
    fn b_c_family_matrices() {
        let c1 = c_family(1, Some((&s(1), &s(1)))).unwrap();
        assert_eq!(c1, Matrix::from_i64(&[&[0, 0, 1], &[0, 1, 1], &[1, 0, 1]]));
        let c6 = c_family(6, None).unwrap();
        assert_eq!(c6, Matrix::from_i64(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]));
        let b5 = b_family(5, None).unwrap();
        assert_eq!(b5, Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]));
        assert!(c_family(1, None).is_err());
        assert!(c_family(2, Some((&s(1), &s(1)))).is_err());
    }

    #[test]
    fn classify3_named_equivalences() {
        // B_3 -> C_2
        let c = classify_bilinear_3(&b_family(3, None).unwrap()).unwrap();
        assert_eq!(c, Class3::family_only(2));
        // B_5 -> C_3
        let c = classify_bilinear_3(&b_family(5, None).unwrap()).unwrap();
        assert_eq!(c, Class3::family_only(3));
        // B_6 -> C_1(1:1)
        let c = classify_bilinear_3(&b_family(6, None).unwrap()).unwrap();
        assert_eq!(c, Class3::at(1, s(1), s(1)));
        // B_4 -> C_6
        let c = classify_bilinear_3(&b_family(4, None).unwrap()).unwrap();
        assert_eq!(c, Class3::family_only(6));
        // B_1(1:1) -> C_4
        let c = classify_bilinear_3(&b_family(1, Some((&s(1), &s(1)))).unwrap()).unwrap();
        assert_eq!(c, Class3::family_only(4));
        // B_1(0:0) -> C_5(1:1)
        let c = classify_bilinear_3(&b_family(1, Some((&s(0), &s(0)))).unwrap()).unwrap();
        assert_eq!(c, Class3::at(5, s(1), s(1)));
        // C_5(p:q) ~ B_2(p:q) pointwise
        for (p, q) in [(1i64, 2i64), (1, 3), (2, 3)] {
            let b2 = b_family(2, Some((&s(p), &s(q)))).unwrap();
            let c = classify_bilinear_3(&b2).unwrap();
            assert_eq!(c, Class3::at(5, s(p), s(q)), "B2({p}:{q})");
        }
    }

    #[test]
    fn classify3_overlap_rule() {
        // C_1(0:0) ~ C_5(1:gamma), gamma a primitive sixth root of unity.
        let c = classify_bilinear_3(&c_family(1, Some((&s(0), &s(0)))).unwrap()).unwrap();
        assert_eq!(c.family, 5);
        let pt = c.point.unwrap();
        // the canonical representative scales the first coordinate to 1
        let gamma = pt.coords[1].to_complex64() / pt.coords[0].to_complex64();
        let g6 = gamma.powu(6);
        let g3 = gamma.powu(3);
        assert!((g6 - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        assert!((g3 + Complex64::new(1.0, 0.0)).norm() < 1e-6); // primitive
    }

    #[test]
    fn zero_form_is_not_classifiable() {
        assert!(matches!(
            classify_bilinear_3(&Matrix::zeros(3, 3, Backend::Exact)),
            Err(Error::Unclassifiable)
        ));
    }

    #[test]
    fn verify_jump_examples() {
        let opts = SearchOptions::default();
        // B(0:0) + t(x e12 + y e21) jumps to B(x:y), here (1:2).
        let d = b2_matrix(&s(0), &s(0));
        let mut dir1 = Matrix::zeros(2, 2, Backend::Exact);
        dir1.set(0, 1, s(1));
        let mut dir2 = Matrix::zeros(2, 2, Backend::Exact);
        dir2.set(1, 0, s(2));
        let target = b2_matrix(&s(1), &s(2));
        assert!(verify_jump(&d, &[dir1.clone(), dir2], &target, &opts).unwrap());
        // A(1) + t e11 jumps to B(1:-1)
        let a1 = a2_matrix(&s(1));
        let mut e11 = Matrix::zeros(2, 2, Backend::Exact);
        e11.set(0, 0, s(1));
        let b1m1 = b2_matrix(&s(1), &s(-1));
        assert!(verify_jump(&a1, &[e11.clone()], &b1m1, &opts).unwrap());
        // ... but no single direction jumps A(1) to diag(1,1)
        let d11 = Matrix::identity(2, Backend::Exact);
        for (i, j) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            let mut e = Matrix::zeros(2, 2, Backend::Exact);
            e.set(i, j, s(1));
            assert!(!verify_jump(&a1, &[e], &d11, &opts).unwrap(), "e{}{}", i, j);
        }
    }

    #[test]
    fn graph3_edges_and_barriers() {
        let g = bilinear_deformation_graph_3(&SearchOptions::default()).unwrap();
        let jumps: BTreeSet<(String, String)> = g
            .jump_edges()
            .iter()
            .map(|e| (e.from.clone(), e.to.clone()))
            .collect();
        assert!(jumps.contains(&("C6".into(), "C3".into())));
        assert!(jumps.contains(&("C2".into(), "C1 (1:-1)".into())));
        assert!(!jumps.contains(&("C6".into(), "C4".into())));
        // nothing jumps to C6
        assert!(jumps.iter().all(|(_, t)| t != "C6"));
        assert!(g.is_acyclic());
    }
}
