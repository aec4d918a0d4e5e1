use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::torus::{group_window, TorusVector};
use crate::det::{quotient_order, snf, QuotientOrder, SnfResult};
use crate::error::{Error, Result};
use crate::groups::GroupDescriptor;
use crate::linalg::bareiss_determinant;
use crate::ring::{RingElement, Scalar, ScalarDomain};
use crate::sections::compress;

/// Listing more solutions than this requires an explicit larger limit.
pub const DEFAULT_LIST_LIMIT: usize = 1 << 16;

/// `X_f = {h ∈ (R/Z)^Γ : f·h = 0}` for a finite group `Γ`.
///
/// Stored structurally: with `M = compress(f, Γ) = U·D·V`, the solutions are
/// `h = V⁻¹y` with `y_i ∈ (1/d_i)Z / Z`. The generators `V⁻¹e_i / d_i` (for
/// `d_i > 1`) generate `X_f` freely as a product of cyclic groups of orders
/// `d_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSolutionSet {
    element: RingElement,
    matrix: Vec<Vec<BigInt>>,
    snf: SnfResult,
    generators: Vec<(BigInt, TorusVector)>,
    count: BigInt,
}

fn integer_rows(f: &RingElement) -> Result<Vec<Vec<BigInt>>> {
    let window = group_window(f.descriptor())?;
    let m = compress(f, &window)?;
    let n = m.size();
    let mut rows = vec![vec![BigInt::zero(); n]; n];
    for (r, c, v) in m.entries() {
        rows[r][c] = match v {
            Scalar::Int(x) => x,
            _ => unreachable!("integer element"),
        };
    }
    Ok(rows)
}

fn check_input(f: &RingElement, group: &GroupDescriptor) -> Result<()> {
    if f.descriptor() != group {
        return Err(Error::DescriptorMismatch(format!(
            "element over {} but group {group}",
            f.descriptor()
        )));
    }
    if !group.is_finite() {
        return Err(Error::UnsupportedFamily(format!(
            "solution sets are computed for finite groups only, got {group}"
        )));
    }
    if f.domain() != ScalarDomain::ExactInteger {
        return Err(Error::ScalarDomainMismatch(format!(
            "X_f needs integer coefficients, got {}",
            f.domain()
        )));
    }
    Ok(())
}

/// Computes `X_f` through the Smith normal form of `f_Γ`.
pub fn solve_dual_finite(f: &RingElement, group: &GroupDescriptor) -> Result<DualSolutionSet> {
    check_input(f, group)?;
    let matrix = integer_rows(f)?;
    let snf = snf(&matrix)?;
    let count = match quotient_order(&snf) {
        QuotientOrder::Finite(c) => c,
        QuotientOrder::Infinite => {
            return Err(Error::Singular(
                "f is a zero divisor on the finite group: X_f is infinite".into(),
            ))
        }
    };
    let t = snf.transforms.as_ref().expect("snf keeps transforms");
    let n = matrix.len();
    let mut generators = Vec::new();
    for (i, d) in snf.divisors.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        let coords = (0..n)
            .map(|r| BigRational::new(t.v_inv[r][i].clone(), d.clone()))
            .collect();
        generators.push((d.clone(), TorusVector::exact(group.clone(), coords)?));
    }
    let set = DualSolutionSet {
        element: f.clone(),
        matrix,
        snf,
        generators,
        count,
    };
    for (_, g) in &set.generators {
        if !set.contains(g) {
            return Err(Error::Domain("generator failed exact verification".into()));
        }
    }
    Ok(set)
}

impl DualSolutionSet {
    pub fn descriptor(&self) -> &GroupDescriptor {
        self.element.descriptor()
    }

    pub fn element(&self) -> &RingElement {
        &self.element
    }

    pub fn snf(&self) -> &SnfResult {
        &self.snf
    }

    /// `|X_f| = Π d_i`.
    pub fn count(&self) -> &BigInt {
        &self.count
    }

    /// `(order, generator)` pairs.
    pub fn generators(&self) -> &[(BigInt, TorusVector)] {
        &self.generators
    }

    /// Exact membership: every coordinate of `f·h` is an integer.
    pub fn contains(&self, h: &TorusVector) -> bool {
        let Some(x) = h.exact_coords() else {
            return false;
        };
        if h.descriptor() != self.descriptor() {
            return false;
        }
        // Integer arithmetic on `L·h` with `L` the common denominator.
        let l = x.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled: Vec<BigInt> = x.iter().map(|c| c.numer() * (&l / c.denom())).collect();
        self.matrix.iter().all(|row| {
            let s: BigInt = row
                .iter()
                .zip(&scaled)
                .filter(|(a, _)| !a.is_zero())
                .map(|(a, b)| a * b)
                .sum();
            s.is_multiple_of(&l)
        })
    }

    /// Every solution, each verified exactly; fails with
    /// [`Error::TooLarge`] above `limit`.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<TorusVector>> {
        let count = self
            .count
            .to_usize()
            .filter(|c| *c <= limit)
            .ok_or_else(|| Error::TooLarge(format!("{} solutions exceed the limit {limit}", self.count)))?;
        // Work with residues of `L·h` modulo `L = d_max`; `L ≤ count ≤ limit`.
        let n = self.matrix.len();
        let l = self.generators.iter().map(|(d, _)| d.to_i64().expect("bounded by count")).max().unwrap_or(1);
        let mut out: Vec<Vec<i64>> = vec![vec![0; n]];
        for (d, g) in &self.generators {
            let d = d.to_i64().expect("bounded by count");
            let step: Vec<i64> = g
                .exact_coords()
                .expect("exact generator")
                .iter()
                .map(|c| (c * BigRational::from_integer(l.into())).to_integer().to_i64().expect("residue"))
                .collect();
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for h in &out {
                let mut cur = h.clone();
                for _ in 0..d {
                    next.push(cur.clone());
                    for (x, s) in cur.iter_mut().zip(&step) {
                        *x = (*x + s).rem_euclid(l);
                    }
                }
            }
            out = next;
        }
        debug_assert_eq!(out.len(), count);
        let small: Vec<Vec<i64>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().expect("small coefficients")).collect())
            .collect();
        let verified = |h: &[i64]| {
            small.iter().all(|row| {
                let s: i128 = row.iter().zip(h).map(|(&a, &x)| a as i128 * x as i128).sum();
                s % l as i128 == 0
            })
        };
        let descriptor = self.descriptor().clone();
        let lb = BigInt::from(l);
        out.into_iter()
            .map(|h| {
                let coords: Vec<BigRational> = h.iter().map(|&x| BigRational::new(x.into(), lb.clone())).collect();
                if !verified(&h) {
                    return Err(Error::Domain(format!("solution {coords:?} failed exact verification")));
                }
                TorusVector::exact(descriptor.clone(), coords)
            })
            .collect()
    }

    /// Solutions as CSV: one row per solution, `p/q` per group element.
    pub fn to_csv(&self, limit: usize) -> Result<String> {
        let window = group_window(self.descriptor())?;
        let header: Vec<String> = window
            .iter()
            .map(|g| {
                let c: Vec<String> = g.coords().iter().map(i64::to_string).collect();
                format!("h[{}]", c.join(" "))
            })
            .collect();
        let mut out = header.join(",");
        out.push('\n');
        for h in self.enumerate(limit)? {
            out.push_str(&h.formatted().join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

/// `(1/|Γ|) log |X_f|` with its cross-checks.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub group_order: u64,
    /// `|Z^Γ / f_Γ Z^Γ|` from the Smith normal form.
    #[serde(serialize_with = "as_string")]
    pub quotient_order: BigInt,
    /// `|X_f|` from the solution set structure.
    #[serde(serialize_with = "as_string")]
    pub solution_count: BigInt,
    /// `|det f_Γ|` by fraction-free elimination.
    #[serde(serialize_with = "as_string")]
    pub determinant: BigInt,
    /// `(1/|Γ|) log|det f_Γ|` from the floating-point factorization.
    pub logabsdet: f64,
}

fn as_string<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Natural log of a positive big integer without overflow.
pub fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Topological entropy of the shift on `X_f` for finite `Γ`.
pub fn entropy_finite_group(f: &RingElement, group: &GroupDescriptor) -> Result<EntropyEstimate> {
    let set = solve_dual_finite(f, group)?;
    let order = group.order().expect("finite");
    let quotient = match quotient_order(set.snf()) {
        QuotientOrder::Finite(q) => q,
        QuotientOrder::Infinite => unreachable!("checked by the solver"),
    };
    let determinant = bareiss_determinant(&set.matrix)?.abs();
    let window = group_window(group)?;
    let logabsdet = compress(f, &window)?.logabsdet() / order as f64;
    let value = ln_bigint(&quotient) / order as f64;
    if quotient != determinant || &quotient != set.count() {
        return Err(Error::Domain(format!(
            "inconsistent counts: quotient {quotient}, |X_f| {}, |det| {determinant}",
            set.count()
        )));
    }
    if (logabsdet - value).abs() > 1e-8 * value.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "floating determinant {logabsdet} disagrees with exact count {value}"
        )));
    }
    Ok(EntropyEstimate {
        value,
        group_order: order,
        quotient_order: quotient,
        solution_count: set.count().clone(),
        determinant,
        logabsdet,
    })
}
