use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::groups::{folner_window, FolnerWindow, GroupDescriptor, GroupElement};
use crate::ring::rational_to_f64;

/// Coordinates of a point of `(R/Z)^Γ`, each in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub enum TorusCoords {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// A point of `(R/Z)^Γ` for a finite group `Γ`, indexed in the order of the
/// full-group window.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusVector {
    descriptor: GroupDescriptor,
    coords: TorusCoords,
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

fn frac_f64(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

pub(crate) fn group_window(descriptor: &GroupDescriptor) -> Result<FolnerWindow> {
    if !descriptor.is_finite() {
        return Err(Error::UnsupportedFamily(format!(
            "torus vectors need a finite group, got {descriptor}"
        )));
    }
    folner_window(descriptor, 1)
}

impl TorusVector {
    fn check_len(descriptor: &GroupDescriptor, len: usize) -> Result<()> {
        let order = descriptor
            .order()
            .ok_or_else(|| Error::UnsupportedFamily(format!("{descriptor} is infinite")))?;
        if order != len as u64 {
            return Err(Error::Domain(format!("{len} coordinates for a group of order {order}")));
        }
        Ok(())
    }

    /// Exact vector; coordinates are reduced mod 1.
    pub fn exact(descriptor: GroupDescriptor, coords: Vec<BigRational>) -> Result<Self> {
        Self::check_len(&descriptor, coords.len())?;
        Ok(TorusVector {
            descriptor,
            coords: TorusCoords::Exact(coords.iter().map(frac).collect()),
        })
    }

    /// Floating-point vector; coordinates are reduced mod 1.
    pub fn float(descriptor: GroupDescriptor, coords: Vec<f64>) -> Result<Self> {
        Self::check_len(&descriptor, coords.len())?;
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite torus coordinate".into()));
        }
        Ok(TorusVector {
            descriptor,
            coords: TorusCoords::Float(coords.into_iter().map(frac_f64).collect()),
        })
    }

    pub fn zero(descriptor: GroupDescriptor) -> Result<Self> {
        let n = descriptor
            .order()
            .ok_or_else(|| Error::UnsupportedFamily(format!("{descriptor} is infinite")))?;
        Self::exact(descriptor, vec![BigRational::zero(); n as usize])
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn len(&self) -> usize {
        match &self.coords {
            TorusCoords::Exact(v) => v.len(),
            TorusCoords::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self) -> &TorusCoords {
        &self.coords
    }

    pub fn exact_coords(&self) -> Option<&[BigRational]> {
        match &self.coords {
            TorusCoords::Exact(v) => Some(v),
            TorusCoords::Float(_) => None,
        }
    }

    pub fn value_f64(&self, i: usize) -> f64 {
        match &self.coords {
            TorusCoords::Exact(v) => rational_to_f64(&v[i]),
            TorusCoords::Float(v) => v[i],
        }
    }

    /// Coordinates as `p/q` strings (exact) or plain decimals.
    pub fn formatted(&self) -> Vec<String> {
        match &self.coords {
            TorusCoords::Exact(v) => v.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect(),
            TorusCoords::Float(v) => v.iter().map(|x| x.to_string()).collect(),
        }
    }

    fn permuted(&self, source: &[usize]) -> TorusVector {
        let coords = match &self.coords {
            TorusCoords::Exact(v) => TorusCoords::Exact(source.iter().map(|&i| v[i].clone()).collect()),
            TorusCoords::Float(v) => TorusCoords::Float(source.iter().map(|&i| v[i]).collect()),
        };
        TorusVector {
            descriptor: self.descriptor.clone(),
            coords,
        }
    }

    /// Exact `h + k` (mod 1); `None` unless both are exact.
    pub fn add_exact(&self, other: &TorusVector) -> Option<TorusVector> {
        let (a, b) = (self.exact_coords()?, other.exact_coords()?);
        Some(TorusVector {
            descriptor: self.descriptor.clone(),
            coords: TorusCoords::Exact(a.iter().zip(b).map(|(x, y)| frac(&(x + y))).collect()),
        })
    }

    /// Exact `k·h` (mod 1).
    pub fn scale_exact(&self, k: &BigInt) -> Option<TorusVector> {
        let a = self.exact_coords()?;
        let k = BigRational::from_integer(k.clone());
        Some(TorusVector {
            descriptor: self.descriptor.clone(),
            coords: TorusCoords::Exact(a.iter().map(|x| frac(&(x * &k))).collect()),
        })
    }

    /// Least common denominator of the exact coordinates.
    pub fn denominator(&self) -> Option<BigInt> {
        let a = self.exact_coords()?;
        Some(a.iter().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom())))
    }
}

/// Right shift `(γh)_{γ'} = h_{γ'γ}`.
pub fn shift(h: &TorusVector, gamma: &GroupElement) -> Result<TorusVector> {
    let window = group_window(&h.descriptor)?;
    let d = &h.descriptor;
    d.check(gamma)?;
    let source: Vec<usize> = window
        .iter()
        .map(|g| window.position(&d.mul(&g, gamma)).expect("group closed"))
        .collect();
    Ok(h.permuted(&source))
}

/// Exponent `p` of the orbit pseudometric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum PNorm {
    L1,
    L2,
    LInf,
}

impl std::str::FromStr for PNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(PNorm::L1),
            "2" => Ok(PNorm::L2),
            "inf" | "infinity" | "∞" => Ok(PNorm::LInf),
            other => Err(Error::Domain(format!("p must be 1, 2 or inf, got `{other}`"))),
        }
    }
}

/// `ϑ(s, t) = min_m |s − t − m|` on exact coordinates.
fn circle_distance_exact(s: &BigRational, t: &BigRational) -> BigRational {
    let d = frac(&(s - t));
    let other = BigRational::one() - &d;
    if d < other {
        d
    } else {
        other
    }
}

fn circle_distance(s: f64, t: f64) -> f64 {
    let d = frac_f64(s - t);
    d.min(1.0 - d)
}

/// `d_{ϑ,F,p}(x, y)`: the normalised `ℓ^p` aggregate of
/// `ϑ((γx)_e, (γy)_e) = ϑ(x_γ, y_γ)` over `γ ∈ F`.
pub fn orbit_distance(
    x: &TorusVector,
    y: &TorusVector,
    subset: &[GroupElement],
    p: PNorm,
) -> Result<f64> {
    if x.descriptor != y.descriptor {
        return Err(Error::DescriptorMismatch(format!(
            "{} vs {}",
            x.descriptor, y.descriptor
        )));
    }
    if subset.is_empty() {
        return Err(Error::Domain("orbit distance over an empty set".into()));
    }
    let window = group_window(&x.descriptor)?;
    let mut terms = Vec::with_capacity(subset.len());
    for g in subset {
        let i = window
            .position(g)
            .ok_or_else(|| Error::Domain(format!("{:?} is not a group element", g.coords())))?;
        terms.push(match (&x.coords, &y.coords) {
            (TorusCoords::Exact(a), TorusCoords::Exact(b)) => {
                rational_to_f64(&circle_distance_exact(&a[i], &b[i]).abs())
            }
            _ => circle_distance(x.value_f64(i), y.value_f64(i)),
        });
    }
    let n = terms.len() as f64;
    Ok(match p {
        PNorm::LInf => terms.iter().copied().fold(0.0, f64::max),
        PNorm::L1 => terms.iter().sum::<f64>() / n,
        PNorm::L2 => (terms.iter().map(|t| t * t).sum::<f64>() / n).sqrt(),
    })
}
