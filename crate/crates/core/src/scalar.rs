//! Complex scalars over two backends: exact Gaussian rationals (a + bi with
//! rational a, b) and double-precision floats tagged with a comparison
//! tolerance.
//!
//! Exact arithmetic is closed under +, *, and inversion of nonzero values.
//! Mixing backends in one operation is a bug in the caller, not a data
//! condition, so the arithmetic operators panic on a mix; fallible entry
//! points validate up front via [`Scalar::same_backend`].

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default comparison tolerance for the float backend.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Which arithmetic backend a scalar (and everything built from it) lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Float => write!(f, "float"),
        }
    }
}

/// A complex scalar on one of the two backends.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact { re: BigRational, im: BigRational },
    Float { re: f64, im: f64, eps: f64 },
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact { .. } => Backend::Exact,
            Scalar::Float { .. } => Backend::Float,
        }
    }

    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact {
                re: BigRational::zero(),
                im: BigRational::zero(),
            },
            Backend::Float => Scalar::Float {
                re: 0.0,
                im: 0.0,
                eps: DEFAULT_EPS,
            },
        }
    }

    pub fn one(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::from_int(1),
            Backend::Float => Scalar::float(1.0, 0.0),
        }
    }

    /// The exact integer n as a scalar.
    pub fn from_int(n: i64) -> Self {
        Scalar::Exact {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// The exact rational p/q as a scalar.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar::Exact {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    /// Exact Gaussian rational re + im*i from integer pairs (rp/rq, ip/iq).
    pub fn gaussian(rp: i64, rq: i64, ip: i64, iq: i64) -> Self {
        assert!(rq != 0 && iq != 0, "zero denominator");
        Scalar::Exact {
            re: BigRational::new(BigInt::from(rp), BigInt::from(rq)),
            im: BigRational::new(BigInt::from(ip), BigInt::from(iq)),
        }
    }

    pub fn exact(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact { re, im }
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float {
            re,
            im,
            eps: DEFAULT_EPS,
        }
    }

    pub fn float_with_eps(re: f64, im: f64, eps: f64) -> Self {
        Scalar::Float { re, im, eps }
    }

    /// Imaginary unit.
    pub fn i(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact {
                re: BigRational::zero(),
                im: BigRational::one(),
            },
            Backend::Float => Scalar::float(0.0, 1.0),
        }
    }

    pub fn eps(&self) -> f64 {
        match self {
            Scalar::Exact { .. } => 0.0,
            Scalar::Float { eps, .. } => *eps,
        }
    }

    pub fn same_backend(&self, other: &Scalar) -> Result<Backend> {
        let (a, b) = (self.backend(), other.backend());
        if a == b {
            Ok(a)
        } else {
            Err(Error::MixedBackend(format!("{a} vs {b}")))
        }
    }

    /// Lossy conversion to a complex double (exact values are rounded).
    pub fn to_complex64(&self) -> Complex64 {
        match self {
            Scalar::Exact { re, im } => Complex64::new(rat_to_f64(re), rat_to_f64(im)),
            Scalar::Float { re, im, .. } => Complex64::new(*re, *im),
        }
    }

    /// Reinterpret on the float backend with the given tolerance.
    pub fn to_float_backend(&self, eps: f64) -> Scalar {
        let z = self.to_complex64();
        Scalar::Float {
            re: z.re,
            im: z.im,
            eps,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact { re, im } => re.is_zero() && im.is_zero(),
            Scalar::Float { re, im, eps } => (re * re + im * im).sqrt() <= *eps,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact { re, im } => re.is_one() && im.is_zero(),
            s => (s.clone() - Scalar::one(Backend::Float)).is_zero(),
        }
    }

    /// |z| as a double, on either backend.
    pub fn abs(&self) -> f64 {
        self.to_complex64().norm()
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact { re, im } => Scalar::Exact {
                re: re.clone(),
                im: -im.clone(),
            },
            Scalar::Float { re, im, eps } => Scalar::Float {
                re: *re,
                im: -*im,
                eps: *eps,
            },
        }
    }

    /// Multiplicative inverse; `ZeroScalar` on zero.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::ZeroScalar);
        }
        match self {
            Scalar::Exact { re, im } => {
                let n = re * re + im * im;
                Ok(Scalar::Exact {
                    re: re / &n,
                    im: -(im / &n),
                })
            }
            Scalar::Float { re, im, eps } => {
                let z = Complex64::new(*re, *im).inv();
                Ok(Scalar::Float {
                    re: z.re,
                    im: z.im,
                    eps: *eps,
                })
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.clone() * other.inv()?)
    }

    /// Equality at the backend's native tolerance: exact equality, or
    /// |a-b| <= max(eps) * max(1, |a|, |b|) for floats.
    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact { re: ar, im: ai }, Scalar::Exact { re: br, im: bi }) => {
                ar == br && ai == bi
            }
            (Scalar::Float { .. }, Scalar::Float { .. }) => {
                let eps = self.eps().max(other.eps());
                let scale = 1f64.max(self.abs()).max(other.abs());
                (self.clone() - other.clone()).abs() <= eps * scale
            }
            _ => false,
        }
    }

    /// Total order used for canonical representatives: compare real parts,
    /// tie-break on imaginary parts. Exact comparison is rational; float
    /// comparison uses `total_cmp`.
    pub fn order_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact { re: ar, im: ai }, Scalar::Exact { re: br, im: bi }) => {
                ar.cmp(br).then_with(|| ai.cmp(bi))
            }
            _ => {
                let a = self.to_complex64();
                let b = other.to_complex64();
                a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
            }
        }
    }

    /// Square root within the Gaussian rationals, when one exists.
    /// On the float backend always returns the principal square root.
    pub fn sqrt_exact(&self) -> Option<Scalar> {
        match self {
            Scalar::Float { re, im, eps } => {
                let z = Complex64::new(*re, *im).sqrt();
                Some(Scalar::Float {
                    re: z.re,
                    im: z.im,
                    eps: *eps,
                })
            }
            Scalar::Exact { re: a, im: b } => {
                // Solve (x + yi)^2 = a + bi over the rationals:
                // x^2 - y^2 = a, 2xy = b.
                if b.is_zero() {
                    if a.is_negative() {
                        let y = rational_sqrt(&(-a.clone()))?;
                        return Some(Scalar::Exact {
                            re: BigRational::zero(),
                            im: y,
                        });
                    }
                    let x = rational_sqrt(a)?;
                    return Some(Scalar::Exact {
                        re: x,
                        im: BigRational::zero(),
                    });
                }
                let norm = a * a + b * b;
                let r = rational_sqrt(&norm)?;
                let two = BigRational::from_integer(BigInt::from(2));
                let x2 = (a + &r) / &two;
                let x = rational_sqrt(&x2)?;
                if x.is_zero() {
                    return None; // b != 0 needs x != 0
                }
                let y = b / (&two * &x);
                Some(Scalar::Exact { re: x, im: y })
            }
        }
    }
}

/// Rational square root if numerator and denominator are perfect squares.
fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    // BigRational -> f64 with enough headroom for desk-scale values.
    let n = r.numer();
    let d = r.denom();
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact { re: ar, im: ai }, Scalar::Exact { re: br, im: bi }) => {
                ar == br && ai == bi
            }
            (
                Scalar::Float { re: ar, im: ai, .. },
                Scalar::Float { re: br, im: bi, .. },
            ) => ar == br && ai == bi,
            _ => false,
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (
                        Scalar::Exact { re: ar, im: ai },
                        Scalar::Exact { re: br, im: bi },
                    ) => Scalar::Exact { re: ar $op br, im: ai $op bi },
                    (
                        Scalar::Float { re: ar, im: ai, eps: ae },
                        Scalar::Float { re: br, im: bi, eps: be },
                    ) => Scalar::Float { re: ar $op br, im: ai $op bi, eps: ae.max(be) },
                    (a, b) => panic!(
                        "mixed scalar backends in arithmetic: {} vs {}",
                        a.backend(),
                        b.backend()
                    ),
                }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl std::ops::Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact { re: ar, im: ai }, Scalar::Exact { re: br, im: bi }) => {
                Scalar::Exact {
                    re: &ar * &br - &ai * &bi,
                    im: &ar * &bi + &ai * &br,
                }
            }
            (
                Scalar::Float { re: ar, im: ai, eps: ae },
                Scalar::Float { re: br, im: bi, eps: be },
            ) => Scalar::Float {
                re: ar * br - ai * bi,
                im: ar * bi + ai * br,
                eps: ae.max(be),
            },
            (a, b) => panic!(
                "mixed scalar backends in arithmetic: {} vs {}",
                a.backend(),
                b.backend()
            ),
        }
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact { re, im } => Scalar::Exact { re: -re, im: -im },
            Scalar::Float { re, im, eps } => Scalar::Float {
                re: -re,
                im: -im,
                eps,
            },
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact { re, im } => {
                if im.is_zero() {
                    write!(f, "{re}")
                } else if re.is_zero() {
                    write!(f, "{im}i")
                } else if im.is_negative() {
                    write!(f, "{re}{im}i")
                } else {
                    write!(f, "{re}+{im}i")
                }
            }
            Scalar::Float { re, im, .. } => {
                if *im == 0.0 {
                    write!(f, "{re}")
                } else if *re == 0.0 {
                    write!(f, "{im}i")
                } else if *im < 0.0 {
                    write!(f, "{re}{im}i")
                } else {
                    write!(f, "{re}+{im}i")
                }
            }
        }
    }
}

/// Serialize one rational as the "p/q" wire string (q > 0, gcd-reduced;
/// BigRational keeps that normal form internally).
pub fn rat_to_wire(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse "p/q" or a bare integer "p".
pub fn rat_from_wire(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_field_ops() {
        let a = Scalar::gaussian(1, 2, 3, 4); // 1/2 + 3/4 i
        let b = a.inv().unwrap();
        assert!((a.clone() * b).is_one());
        let c = Scalar::from_ratio(2, 3) + Scalar::from_ratio(1, 3);
        assert!(c.is_one());
    }

    #[test]
    fn mixed_backend_is_error() {
        let a = Scalar::from_int(1);
        let b = Scalar::float(1.0, 0.0);
        assert!(a.same_backend(&b).is_err());
        let r = std::panic::catch_unwind(|| a + b);
        assert!(r.is_err());
    }

    #[test]
    fn exact_sqrt() {
        // sqrt(-1) = i
        let m1 = Scalar::from_int(-1);
        let s = m1.sqrt_exact().unwrap();
        assert_eq!(s, Scalar::i(Backend::Exact));
        // sqrt(2i) = 1 + i
        let z = Scalar::gaussian(0, 1, 2, 1);
        let s = z.sqrt_exact().unwrap();
        assert_eq!(s.clone() * s, z);
        // sqrt(2) is not Gaussian rational
        assert!(Scalar::from_int(2).sqrt_exact().is_none());
        // 9/4 works
        let s = Scalar::from_ratio(9, 4).sqrt_exact().unwrap();
        assert_eq!(s, Scalar::from_ratio(3, 2));
    }

    #[test]
    fn order_is_total_on_exact() {
        let a = Scalar::from_int(1);
        let b = Scalar::gaussian(1, 1, 1, 1);
        assert_eq!(a.order_cmp(&b), Ordering::Less);
        assert_eq!(b.order_cmp(&a), Ordering::Greater);
        assert_eq!(a.order_cmp(&a.clone()), Ordering::Equal);
    }

    #[test]
    fn wire_rationals() {
        let r = rat_from_wire("-3/6").unwrap();
        assert_eq!(rat_to_wire(&r), "-1/2");
        assert_eq!(rat_to_wire(&rat_from_wire("5").unwrap()), "5/1");
        assert!(rat_from_wire("1/0").is_err());
    }
}
