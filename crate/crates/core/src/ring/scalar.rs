use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Which coefficient ring an element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarDomain {
    ExactInteger,
    ExactRational,
    ComplexFloat,
}

impl fmt::Display for ScalarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalarDomain::ExactInteger => "exact-integer",
            ScalarDomain::ExactRational => "exact-rational",
            ScalarDomain::ComplexFloat => "complex-float",
        })
    }
}

/// A single coefficient. Arithmetic between different variants is a logic
/// error; [`crate::ring::RingElement`] checks domains before combining.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Int(BigInt),
    Rat(BigRational),
    Complex(Complex64),
}

impl Scalar {
    pub fn domain(&self) -> ScalarDomain {
        match self {
            Scalar::Int(_) => ScalarDomain::ExactInteger,
            Scalar::Rat(_) => ScalarDomain::ExactRational,
            Scalar::Complex(_) => ScalarDomain::ComplexFloat,
        }
    }

    pub fn zero(domain: ScalarDomain) -> Scalar {
        match domain {
            ScalarDomain::ExactInteger => Scalar::Int(BigInt::zero()),
            ScalarDomain::ExactRational => Scalar::Rat(BigRational::zero()),
            ScalarDomain::ComplexFloat => Scalar::Complex(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(domain: ScalarDomain) -> Scalar {
        match domain {
            ScalarDomain::ExactInteger => Scalar::Int(BigInt::one()),
            ScalarDomain::ExactRational => Scalar::Rat(BigRational::one()),
            ScalarDomain::ComplexFloat => Scalar::Complex(Complex64::new(1.0, 0.0)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Int(a) => a.is_zero(),
            Scalar::Rat(a) => a.is_zero(),
            Scalar::Complex(a) => a.re == 0.0 && a.im == 0.0,
        }
    }

    pub(crate) fn add_assign(&mut self, other: &Scalar) {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => *a += b,
            (Scalar::Rat(a), Scalar::Rat(b)) => *a += b,
            (Scalar::Complex(a), Scalar::Complex(b)) => *a += b,
            _ => unreachable!("mixed scalar domains"),
        }
    }

    pub(crate) fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a * b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a * b),
            _ => unreachable!("mixed scalar domains"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Int(a) => Scalar::Int(-a),
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Complex(a) => Scalar::Complex(-a),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Complex(a) => Scalar::Complex(a.conj()),
            other => other.clone(),
        }
    }

    /// `|a|`, exact for the exact domains.
    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Int(a) => Scalar::Int(a.abs()),
            Scalar::Rat(a) => Scalar::Rat(a.abs()),
            Scalar::Complex(a) => Scalar::Complex(Complex64::new(a.norm(), 0.0)),
        }
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Int(a) => Complex64::new(a.to_f64().unwrap_or(f64::NAN), 0.0),
            Scalar::Rat(a) => Complex64::new(rational_to_f64(a), 0.0),
            Scalar::Complex(a) => *a,
        }
    }

    /// Exact rational value, if the scalar is exact.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Int(a) => Some(BigRational::from_integer(a.clone())),
            Scalar::Rat(a) => Some(a.clone()),
            Scalar::Complex(_) => None,
        }
    }

    /// Re-expresses the scalar in a wider domain.
    pub fn promote(&self, domain: ScalarDomain) -> Option<Scalar> {
        match (self, domain) {
            (s, d) if s.domain() == d => Some(s.clone()),
            (Scalar::Int(a), ScalarDomain::ExactRational) => {
                Some(Scalar::Rat(BigRational::from_integer(a.clone())))
            }
            (s, ScalarDomain::ComplexFloat) => Some(Scalar::Complex(s.to_complex())),
            _ => None,
        }
    }
}

/// Rational to f64 without overflowing when numerator and denominator are
/// individually out of range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 900;
    let n = if shift > 0 { r.numer() >> shift as usize } else { r.numer().clone() };
    let d = if shift > 0 { r.denom() >> shift as usize } else { r.denom().clone() };
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(a) => write!(f, "{a}"),
            Scalar::Rat(a) => write!(f, "{}/{}", a.numer(), a.denom()),
            Scalar::Complex(a) => write!(f, "{a}"),
        }
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(BigInt::from(v))
    }
}

impl From<BigInt> for Scalar {
    fn from(v: BigInt) -> Self {
        Scalar::Int(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Self {
        Scalar::Rat(v)
    }
}

impl From<Complex64> for Scalar {
    fn from(v: Complex64) -> Self {
        Scalar::Complex(v)
    }
}
