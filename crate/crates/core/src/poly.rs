//! Characteristic polynomials and root extraction.
//!
//! Exact roots are found over the Gaussian rationals only: the square-free
//! part is computed by a gcd with the derivative, low degrees fall to the
//! quadratic formula (with an exact Gaussian square-root test), and higher
//! degrees run a rational-root style search over Gaussian-integer divisors
//! of the constant term. A polynomial that does not split produces
//! [`Error::IrreducibleFactor`], which tells the caller to retry on the
//! float backend. Float roots come from Durand-Kerner iteration.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar};

/// Monic polynomial as coefficients `c[0] + c[1] t + ... + c[d] t^d`
/// with `c[d] = 1` for the outputs of [`char_poly`].
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        Poly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn backend(&self) -> Backend {
        self.coeffs
            .first()
            .map(Scalar::backend)
            .unwrap_or(Backend::Exact)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let backend = self.backend();
        let mut acc = Scalar::zero(backend);
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Evaluate at a matrix argument (Cayley-Hamilton checks).
    pub fn eval_matrix(&self, m: &Matrix) -> Result<Matrix> {
        let n = m.rows();
        let mut acc = Matrix::zeros(n, n, m.backend());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m)?;
            for i in 0..n {
                let v = acc.at(i, i).clone() + c.clone();
                acc.set(i, i, v);
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![Scalar::zero(self.backend())]);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| {
                let k = match self.backend() {
                    Backend::Exact => Scalar::from_int(k as i64),
                    Backend::Float => Scalar::float(k as f64, 0.0),
                };
                c.clone() * k
            })
            .collect();
        Poly::new(coeffs)
    }

    fn trim(mut self) -> Poly {
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().is_zero() {
            self.coeffs.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    fn make_monic(&self) -> Result<Poly> {
        let lead = self
            .coeffs
            .last()
            .ok_or_else(|| Error::Parse("empty polynomial".into()))?;
        let inv = lead.inv()?;
        Ok(Poly::new(
            self.coeffs.iter().map(|c| c.clone() * inv.clone()).collect(),
        ))
    }

    /// Euclidean remainder of self by a monic divisor.
    fn rem(&self, div: &Poly) -> Poly {
        let mut r = self.clone().trim();
        let d = div.degree();
        while !r.is_zero() && r.degree() >= d && !(r.degree() == 0 && d == 0) {
            let shift = r.degree() - d;
            let f = r.coeffs.last().unwrap().clone();
            if f.is_zero() {
                r.coeffs.pop();
                continue;
            }
            for k in 0..=d {
                let v = r.coeffs[shift + k].clone() - f.clone() * div.coeffs[k].clone();
                r.coeffs[shift + k] = v;
            }
            r = r.trim();
            if r.degree() < d || (r.degree() == 0 && r.coeffs[0].is_zero()) {
                break;
            }
        }
        r.trim()
    }

    /// Exact quotient by (t - root); remainder is discarded (synthetic division).
    fn deflate(&self, root: &Scalar) -> Poly {
        let d = self.degree();
        let backend = self.backend();
        let mut out = vec![Scalar::zero(backend); d];
        let mut carry = Scalar::zero(backend);
        for k in (0..d).rev() {
            carry = self.coeffs[k + 1].clone() + carry * root.clone();
            out[k] = carry.clone();
        }
        Poly::new(out)
    }

    /// Monic gcd over the coefficient field.
    fn gcd(&self, other: &Poly) -> Result<Poly> {
        let mut a = self.clone().trim();
        let mut b = other.clone().trim();
        while !b.is_zero() && !(b.degree() == 0 && b.coeffs[0].is_zero()) {
            if b.degree() == 0 {
                // unit
                return Ok(Poly::new(vec![Scalar::one(self.backend())]));
            }
            let bm = b.make_monic()?;
            let r = a.rem(&bm);
            a = bm;
            b = r;
        }
        a.make_monic()
    }
}

/// Monic characteristic polynomial of a square matrix by the
/// Faddeev-LeVerrier recurrence (division-by-integer only, so it is exact
/// on the exact backend).
pub fn char_poly(m: &Matrix) -> Result<Poly> {
    if !m.is_square() {
        return Err(Error::Shape("char_poly of non-square matrix".into()));
    }
    let n = m.rows();
    let backend = m.backend();
    let mut coeffs = vec![Scalar::zero(backend); n + 1];
    coeffs[n] = Scalar::one(backend);
    let mut aux = Matrix::identity(n, backend);
    for k in 1..=n {
        let prod = m.mul(&aux)?;
        let mut tr = Scalar::zero(backend);
        for i in 0..n {
            tr = tr + prod.at(i, i).clone();
        }
        let kinv = match backend {
            Backend::Exact => Scalar::from_int(k as i64).inv()?,
            Backend::Float => Scalar::float(1.0 / k as f64, 0.0),
        };
        let c = -(tr * kinv);
        coeffs[n - k] = c.clone();
        aux = prod;
        for i in 0..n {
            let v = aux.at(i, i).clone() + c.clone();
            aux.set(i, i, v);
        }
    }
    Ok(Poly::new(coeffs))
}

/// All roots with multiplicities. Exact backend: splits over the Gaussian
/// rationals or fails with `IrreducibleFactor`. Float backend: Durand-Kerner.
pub fn roots(p: &Poly) -> Result<Vec<(Scalar, usize)>> {
    match p.backend() {
        Backend::Exact => exact_roots(p),
        Backend::Float => Ok(float_roots(p)),
    }
}

fn exact_roots(p: &Poly) -> Result<Vec<(Scalar, usize)>> {
    let p = p.make_monic()?;
    let degree = p.degree();
    if degree == 0 {
        return Ok(vec![]);
    }
    // Distinct roots live in the square-free part p / gcd(p, p').
    let g = p.gcd(&p.derivative())?;
    let sf = if g.degree() > 0 {
        poly_div_exact(&p, &g)?
    } else {
        p.clone()
    };
    let mut distinct = Vec::new();
    squarefree_roots(&sf, &mut distinct)?;
    // Multiplicity: how many times (t - r) divides p.
    let mut out = Vec::new();
    let mut total = 0usize;
    for r in distinct {
        let mut mult = 0usize;
        let mut q = p.clone();
        loop {
            if q.degree() == 0 {
                break;
            }
            if !q.eval(&r).is_zero() {
                break;
            }
            q = q.deflate(&r);
            mult += 1;
        }
        total += mult;
        out.push((r, mult));
    }
    if total != degree {
        return Err(Error::IrreducibleFactor);
    }
    out.sort_by(|a, b| a.0.order_cmp(&b.0));
    Ok(out)
}

/// Exact polynomial division, erroring if the remainder is nonzero.
fn poly_div_exact(p: &Poly, d: &Poly) -> Result<Poly> {
    let d = d.make_monic()?;
    let mut r = p.clone().trim();
    let dd = d.degree();
    let mut q = vec![Scalar::zero(p.backend()); p.degree() - dd + 1];
    while r.degree() >= dd && !r.is_zero() {
        let shift = r.degree() - dd;
        let f = r.coeffs.last().unwrap().clone();
        q[shift] = f.clone();
        for k in 0..=dd {
            let v = r.coeffs[shift + k].clone() - f.clone() * d.coeffs[k].clone();
            r.coeffs[shift + k] = v;
        }
        r = r.trim();
        if r.coeffs.len() == 1 && r.coeffs[0].is_zero() {
            break;
        }
        if r.degree() < dd {
            break;
        }
    }
    if !r.is_zero() {
        return Err(Error::IrreducibleFactor);
    }
    Ok(Poly::new(q))
}

fn squarefree_roots(sf: &Poly, out: &mut Vec<Scalar>) -> Result<()> {
    let mut q = sf.clone().trim();
    loop {
        match q.degree() {
            0 => return Ok(()),
            1 => {
                out.push(-q.coeffs[0].clone());
                return Ok(());
            }
            2 => {
                // t^2 + bt + c, roots (-b +- sqrt(b^2 - 4c)) / 2
                let b = q.coeffs[1].clone();
                let c = q.coeffs[0].clone();
                let four = Scalar::from_int(4);
                let disc = b.clone() * b.clone() - four * c;
                let s = disc.sqrt_exact().ok_or(Error::IrreducibleFactor)?;
                let half = Scalar::from_ratio(1, 2);
                let r1 = (-b.clone() + s.clone()) * half.clone();
                let r2 = (-b - s) * half;
                out.push(r1.clone());
                if r2 != r1 {
                    out.push(r2);
                }
                return Ok(());
            }
            _ => {
                let r = find_gaussian_root(&q)?.ok_or(Error::IrreducibleFactor)?;
                out.push(r.clone());
                q = q.deflate(&r).trim();
            }
        }
    }
}

/// Search for a Gaussian-rational root of a monic polynomial of degree >= 3.
///
/// After the substitution t = s/m (m a common denominator of the
/// coefficients) the roots in question become Gaussian integers dividing
/// the constant term, so we enumerate divisors of that Gaussian integer.
fn find_gaussian_root(p: &Poly) -> Result<Option<Scalar>> {
    if p.eval(&Scalar::zero(Backend::Exact)).is_zero() {
        return Ok(Some(Scalar::zero(Backend::Exact)));
    }
    // Common denominator of all coefficient parts.
    let mut m = BigInt::one();
    for c in &p.coeffs {
        if let Scalar::Exact { re, im } = c {
            m = m.lcm(re.denom());
            m = m.lcm(im.denom());
        }
    }
    // q(s) = m^d p(s/m) is monic with Gaussian-integer coefficients; its
    // constant term is m^d * c0.
    let d = p.degree();
    let c0 = match &p.coeffs[0] {
        Scalar::Exact { re, im } => (re.clone(), im.clone()),
        _ => unreachable!("exact backend"),
    };
    let md = num::pow::pow(m.clone(), d);
    let g_re = (&c0.0 * BigRational::from_integer(md.clone())).to_integer();
    let g_im = (&c0.1 * BigRational::from_integer(md)).to_integer();
    let divisors = gaussian_divisors(&g_re, &g_im, 20_000);
    let m_rat = BigRational::from_integer(m);
    for (a, b) in divisors {
        let cand = Scalar::exact(
            BigRational::from_integer(a) / m_rat.clone(),
            BigRational::from_integer(b) / m_rat.clone(),
        );
        if p.eval(&cand).is_zero() {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

/// All divisors of the Gaussian integer a+bi, up to unit multiples
/// (units are applied, so every associate is listed). Bounded by `cap`
/// candidates; desk-scale constant terms stay far below it.
fn gaussian_divisors(a: &BigInt, b: &BigInt, cap: usize) -> Vec<(BigInt, BigInt)> {
    let norm = a * a + b * b;
    if norm.is_zero() {
        return vec![];
    }
    // Gaussian primes dividing a+bi, found through the factorization of the norm.
    let mut primes: Vec<(BigInt, BigInt)> = Vec::new();
    let mut n = norm.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            while (&n % &p).is_zero() {
                n = &n / &p;
            }
            primes.extend(gaussian_primes_over(&p));
        }
        p += 1;
    }
    if n > BigInt::one() {
        primes.extend(gaussian_primes_over(&n));
    }
    // Exponent of each Gaussian prime in a+bi by trial division.
    let mut factors: Vec<((BigInt, BigInt), usize)> = Vec::new();
    let (mut za, mut zb) = (a.clone(), b.clone());
    for (pa, pb) in primes {
        let mut e = 0usize;
        loop {
            match gaussian_divide(&za, &zb, &pa, &pb) {
                Some((qa, qb)) => {
                    za = qa;
                    zb = qb;
                    e += 1;
                }
                None => break,
            }
        }
        if e > 0 {
            factors.push(((pa, pb), e));
        }
    }
    // Enumerate divisor products times the four units.
    let mut divs: Vec<(BigInt, BigInt)> = vec![(BigInt::one(), BigInt::zero())];
    for ((pa, pb), e) in &factors {
        let mut next = Vec::new();
        for d in &divs {
            let mut cur = d.clone();
            next.push(cur.clone());
            for _ in 0..*e {
                cur = gaussian_mul(&cur.0, &cur.1, pa, pb);
                next.push(cur.clone());
            }
        }
        divs = next;
        if divs.len() > cap {
            divs.truncate(cap);
        }
    }
    let mut out = Vec::with_capacity(divs.len() * 4);
    for (da, db) in divs {
        out.push((da.clone(), db.clone()));
        out.push((-da.clone(), -db.clone()));
        out.push((-db.clone(), da.clone())); // * i
        out.push((db, -da)); // * -i
    }
    out
}

/// Gaussian primes above the rational prime p.
fn gaussian_primes_over(p: &BigInt) -> Vec<(BigInt, BigInt)> {
    if *p == BigInt::from(2) {
        return vec![(BigInt::one(), BigInt::one())];
    }
    if (p % BigInt::from(4)) == BigInt::from(3) {
        return vec![(p.clone(), BigInt::zero())];
    }
    // p = 1 mod 4: find x^2 + y^2 = p by direct search (desk-scale norms).
    let mut x = BigInt::one();
    loop {
        let rest = p - &x * &x;
        if rest < BigInt::zero() {
            break;
        }
        let y = rest.sqrt();
        if &y * &y == rest {
            return vec![(x.clone(), y.clone()), (x, -y)];
        }
        x += 1;
    }
    vec![(p.clone(), BigInt::zero())]
}

fn gaussian_mul(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> (BigInt, BigInt) {
    (a * c - b * d, a * d + b * c)
}

/// Exact division in Z[i], `None` if it does not divide.
fn gaussian_divide(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Option<(BigInt, BigInt)> {
    let norm = c * c + d * d;
    if norm.is_zero() {
        return None;
    }
    let re = a * c + b * d;
    let im = b * c - a * d;
    if (&re % &norm).is_zero() && (&im % &norm).is_zero() {
        Some((re / &norm, im / &norm))
    } else {
        None
    }
}

/// Durand-Kerner (Weierstrass) iteration on a monic complex polynomial,
/// followed by no clustering; the caller clusters at its tolerance.
fn float_roots(p: &Poly) -> Vec<(Scalar, usize)> {
    let d = p.degree();
    if d == 0 {
        return vec![];
    }
    let lead = p.coeffs.last().unwrap().to_complex64();
    let coeffs: Vec<Complex64> = p.coeffs.iter().map(|c| c.to_complex64() / lead).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut zs: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for k in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != k {
                    denom *= zs[k] - zs[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let step = eval(zs[k]) / denom;
            zs[k] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    let eps = p.coeffs.first().map(|c| c.eps()).unwrap_or(1e-9);
    zs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    zs.into_iter()
        .map(|z| (Scalar::float_with_eps(z.re, z.im, eps), 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    #[test]
    fn char_poly_examples() {
        // diag(1,1) -> t^2 - 2t + 1
        let p = char_poly(&Matrix::from_i64(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(
            p.coeffs,
            vec![Scalar::from_int(1), Scalar::from_int(-2), Scalar::from_int(1)]
        );
        // nilpotent [[0,1],[0,0]] -> t^2
        let p = char_poly(&Matrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap();
        assert_eq!(
            p.coeffs,
            vec![Scalar::from_int(0), Scalar::from_int(0), Scalar::from_int(1)]
        );
        // [[1,1],[0,2]] -> t^2 - 3t + 2 (direct expansion)
        let p = char_poly(&Matrix::from_i64(&[&[1, 1], &[0, 2]])).unwrap();
        assert_eq!(
            p.coeffs,
            vec![Scalar::from_int(2), Scalar::from_int(-3), Scalar::from_int(1)]
        );
    }

    #[test]
    fn cayley_hamilton_small() {
        let m = Matrix::from_i64(&[&[1, 2, 0], &[0, 3, 1], &[5, 0, 1]]);
        let p = char_poly(&m).unwrap();
        assert!(p.eval_matrix(&m).unwrap().is_zero());
    }

    #[test]
    fn exact_roots_with_multiplicity() {
        // (t-1)^2 (t-3)
        let m = Matrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 3]]);
        let r = roots(&char_poly(&m).unwrap()).unwrap();
        assert_eq!(r, vec![(Scalar::from_int(1), 2), (Scalar::from_int(3), 1)]);
    }

    #[test]
    fn exact_roots_gaussian() {
        // t^2 + 1 -> +-i
        let m = Matrix::from_i64(&[&[0, 1], &[-1, 0]]);
        let r = roots(&char_poly(&m).unwrap()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|(s, _)| *s == Scalar::i(Backend::Exact)));
    }

    #[test]
    fn irreducible_is_flagged() {
        // t^2 - 2 does not split over Q(i)
        let m = Matrix::from_i64(&[&[0, 2], &[1, 0]]);
        assert_eq!(
            roots(&char_poly(&m).unwrap()).unwrap_err(),
            Error::IrreducibleFactor
        );
    }

    #[test]
    fn quartic_with_rational_roots() {
        // eigenvalues 1, 2, 3, 1/2 via a triangular matrix
        let mut m = Matrix::zeros(4, 4, Backend::Exact);
        for (i, v) in [Scalar::from_int(1), Scalar::from_int(2), Scalar::from_int(3), Scalar::from_ratio(1, 2)]
            .into_iter()
            .enumerate()
        {
            m.set(i, i, v);
        }
        m.set(0, 1, Scalar::from_int(1));
        let r = roots(&char_poly(&m).unwrap()).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.iter().any(|(s, _)| *s == Scalar::from_ratio(1, 2)));
    }

    #[test]
    fn float_roots_cluster_free() {
        let m = Matrix::from_i64(&[&[0, 1], &[-1, 0]]).to_float_backend(1e-9);
        let r = roots(&char_poly(&m).unwrap()).unwrap();
        assert_eq!(r.len(), 2);
        let vals: Vec<Complex64> = r.iter().map(|(s, _)| s.to_complex64()).collect();
        assert!(vals.iter().any(|z| (z - Complex64::new(0.0, 1.0)).norm() < 1e-9));
        assert!(vals.iter().any(|z| (z - Complex64::new(0.0, -1.0)).norm() < 1e-9));
    }
}
