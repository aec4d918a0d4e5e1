use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ring::{rational_to_f64, RingElement, Scalar, ScalarDomain};

pub const DEFAULT_DEGREE: usize = 40;

/// Outward padding applied to certified spectral intervals.
pub const INTERVAL_PADDING: f64 = 1.05;

/// `[σ²/1.05, ‖f‖₁²·1.05]` from a lower bound `σ` on `σ_min(f)`.
pub fn padded_interval(sigma_lower: f64, l1_norm: f64) -> (f64, f64) {
    (
        sigma_lower * sigma_lower / INTERVAL_PADDING,
        l1_norm * l1_norm * INTERVAL_PADDING,
    )
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct PolyTraceEstimate {
    /// `½ tr Q(f*f)`.
    pub value: f64,
    /// `½ sup_{[a,b]} |Q − log|`, from the Chebyshev tail.
    pub error_bound: f64,
    pub degree: usize,
    pub interval: (f64, f64),
}

fn int(x: &BigInt) -> Scalar {
    Scalar::Int(x.clone())
}

/// `Σ_γ P_γ Q_γ`, which is `tr(P Q)` when `Q` is self-adjoint and real.
fn pairing(p: &RingElement, q: &RingElement) -> BigInt {
    let (small, large) = if p.support_size() <= q.support_size() { (p, q) } else { (q, p) };
    small
        .terms()
        .filter_map(|(g, c)| {
            let other = large.coefficient_ref(g)?;
            match (c, other) {
                (Scalar::Int(a), Scalar::Int(b)) => Some(a * b),
                _ => unreachable!("integer recursion"),
            }
        })
        .sum()
}

/// `½ tr Q(f*f) ≈ log det_LΓ f`, where `Q` is the degree-`m` Chebyshev
/// truncation of `log` on `[a, b] ⊇ σ(f*f)`.
///
/// With `h = 2f*f − (a+b)e` and `D = b − a`, the Chebyshev polynomials
/// `T_k(h/D)` equal `P_k/D^k` for the integer recursion
/// `P_{k+1} = 2hP_k − D²P_{k−1}` (after clearing denominators), and
/// `tr T_{2k} = 2‖P_k‖²/D^{2k} − 1`,
/// `tr T_{2k+1} = 2⟨P_{k+1}, P_k⟩/D^{2k+1} − tr(h)/D`.
/// All traces are exact rationals; only the series coefficients are floats.
pub fn fk_poly_trace(f: &RingElement, a: f64, b: f64, degree: usize) -> Result<PolyTraceEstimate> {
    if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("interval [{a}, {b}] must satisfy 0 < a")));
    }
    if b < a {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    if degree == 0 {
        return Err(Error::Domain("degree must be positive".into()));
    }
    if f.domain() == ScalarDomain::ComplexFloat {
        return Err(Error::ScalarDomainMismatch(
            "polynomial traces are computed exactly and need exact coefficients".into(),
        ));
    }
    if a == b {
        return Ok(PolyTraceEstimate {
            value: 0.5 * a.ln(),
            error_bound: 0.0,
            degree,
            interval: (a, b),
        });
    }
    // f = f'/q with f' integral.
    let q = f.terms().fold(BigInt::one(), |acc, (_, c)| {
        acc.lcm(c.to_rational().expect("exact").denom())
    });
    let f_int = RingElement::from_terms(
        f.descriptor().clone(),
        ScalarDomain::ExactInteger,
        f.terms().map(|(g, c)| {
            let v = c.to_rational().expect("exact") * BigRational::from_integer(q.clone());
            (g.clone(), Scalar::Int(v.to_integer()))
        }),
    )?;
    let g = f_int.adjoint().convolve(&f_int)?;
    let a_q = BigRational::from_float(a).expect("finite");
    let b_q = BigRational::from_float(b).expect("finite");
    let l = a_q.denom().lcm(b_q.denom());
    let big_a = (&a_q * BigRational::from_integer(l.clone())).to_integer();
    let big_b = (&b_q * BigRational::from_integer(l.clone())).to_integer();
    let q2 = &q * &q;
    // h' = 2L g' − (A + B) q² e,   D' = (B − A) q²
    let shift = RingElement::identity(f.descriptor().clone()).scale(&int(&(-(&big_a + &big_b) * &q2)))?;
    let h = g.scale(&int(&(BigInt::from(2) * &l)))?.add(&shift)?;
    let d = (&big_b - &big_a) * &q2;
    let d2 = &d * &d;

    let half = degree.div_ceil(2);
    let mut p: Vec<RingElement> = vec![RingElement::identity(f.descriptor().clone()), h.clone()];
    for k in 1..half {
        let next = h
            .convolve(&p[k])?
            .scale(&int(&BigInt::from(2)))?
            .sub(&p[k - 1].scale(&int(&d2))?)?;
        p.push(next);
    }
    let tr_h = match h.trace_identity() {
        Scalar::Int(x) => x,
        _ => unreachable!(),
    };
    let d_rat = BigRational::from_integer(d.clone());
    let tr_h_over_d = BigRational::new(tr_h, d.clone());
    let two = BigRational::from_integer(2.into());
    let mut traces = vec![BigRational::one(), tr_h_over_d.clone()];
    let mut d_pow = d_rat.clone();
    for k in 2..=degree {
        d_pow = &d_pow * &d_rat;
        let j = k / 2;
        let t = if k % 2 == 0 {
            &two * BigRational::from_integer(pairing(&p[j], &p[j])) / &d_pow - BigRational::one()
        } else {
            &two * BigRational::from_integer(pairing(&p[j + 1], &p[j])) / &d_pow - &tr_h_over_d
        };
        traces.push(t);
    }

    // log(α + βt) = 2 log((√a+√b)/2) + 2 Σ_{k≥1} (−1)^{k+1} r^k/k T_k(t),
    // r = (√b − √a)/(√b + √a).
    let (sa, sb) = (a.sqrt(), b.sqrt());
    let r = (sb - sa) / (sb + sa);
    let mut coeffs = vec![2.0 * ((sa + sb) / 2.0).ln()];
    let mut rk = 1.0;
    for k in 1..=degree {
        rk *= r;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        coeffs.push(2.0 * sign * rk / k as f64);
    }
    let value = 0.5
        * crate::mahler::compensated_sum(
            coeffs.iter().zip(&traces).map(|(c, t)| c * rational_to_f64(t)),
        );
    let m = degree as f64;
    let tail = 2.0 * r.powf(m + 1.0) / ((m + 1.0) * (1.0 - r));
    let rounding = 64.0 * f64::EPSILON * coeffs.iter().map(|c| c.abs()).sum::<f64>();
    Ok(PolyTraceEstimate {
        value,
        error_bound: 0.5 * tail + rounding,
        degree,
        interval: (a, b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{folner_window, GroupDescriptor};
    use crate::mahler::{mahler_roots, LaurentPoly};
    use crate::sections::{certify_invertible, CertificateMethod};
    use crate::det::{fk_finite_sections, Evidence};
    use approx::assert_relative_eq;

    fn z() -> GroupDescriptor {
        GroupDescriptor::IntegerLattice(1)
    }

    fn three_plus_u() -> RingElement {
        RingElement::integer(z(), &[(&[0], 3), (&[1], 1), (&[-1], 1)]).unwrap()
    }

    #[test]
    fn point_interval() {
        let two = RingElement::integer(z(), &[(&[0], 2)]).unwrap();
        for m in [1, 5, 40] {
            let e = fk_poly_trace(&two, 4.0, 4.0, m).unwrap();
            assert_eq!(e.value, 2f64.ln());
            assert_eq!(e.error_bound, 0.0);
        }
    }

    #[test]
    fn scalar_on_a_wide_interval() {
        let two = RingElement::integer(GroupDescriptor::Heisenberg3, &[(&[0, 0, 0], 2)]).unwrap();
        let e = fk_poly_trace(&two, 1.0, 9.0, 40).unwrap();
        assert!((e.value - 2f64.ln()).abs() <= e.error_bound);
    }

    #[test]
    fn matches_the_root_formula() {
        let f = three_plus_u();
        let exact = mahler_roots(&LaurentPoly::new(f.clone()).unwrap()).unwrap();
        let e = fk_poly_trace(&f, 1.0, 25.0, 40).unwrap();
        assert!(e.error_bound < 1e-8);
        assert!((e.value - exact).abs() <= e.error_bound, "{} vs {exact}", e.value);
    }

    #[test]
    fn traces_match_torus_quadrature() {
        // For Z, tr φ(f*f) = ∫ φ(|f|²); a 256-point grid is exact for
        // trigonometric polynomials of degree < 256.
        let f = RingElement::integer(z(), &[(&[0], 4), (&[1], -1), (&[2], 2)]).unwrap();
        let (a, b) = (0.5, 60.0);
        let m = 12;
        let est = fk_poly_trace(&f, a, b, m).unwrap();
        let (sa, sb) = (a.sqrt(), b.sqrt());
        let r = (sb - sa) / (sb + sa);
        let n = 256;
        let mut total = 0.0;
        for j in 0..n {
            let s = f.symbol_at(&[j as f64 / n as f64]).unwrap().norm_sqr();
            let t = (2.0 * s - (a + b)) / (b - a);
            let mut q = 2.0 * ((sa + sb) / 2.0).ln();
            for k in 1..=m {
                let tk = (k as f64 * t.clamp(-1.0, 1.0).acos()).cos();
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                q += 2.0 * sign * r.powi(k as i32) / k as f64 * tk;
            }
            total += q;
        }
        assert_relative_eq!(est.value, 0.5 * total / n as f64, epsilon = 1e-12);
    }

    #[test]
    fn rational_coefficients_and_interval_endpoints() {
        let f = RingElement::integer(z(), &[(&[0], 6), (&[1], 2), (&[-1], 2)]).unwrap();
        let half = f.promote(ScalarDomain::ExactRational).unwrap().scale(&Scalar::Rat(BigRational::new(1.into(), 2.into()))).unwrap();
        let exact = mahler_roots(&LaurentPoly::new(half.clone()).unwrap()).unwrap();
        let e = fk_poly_trace(&half, 0.9, 26.3, 40).unwrap();
        assert!((e.value - exact).abs() <= e.error_bound);
    }

    #[test]
    fn higher_degree_is_consistent() {
        let f = RingElement::integer(
            GroupDescriptor::Heisenberg3,
            &[(&[0, 0, 0], 5), (&[1, 0, 0], 1), (&[-1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, -1, 0], 1)],
        )
        .unwrap();
        let lo = fk_poly_trace(&f, 1.0, 81.0, 10).unwrap();
        let hi = fk_poly_trace(&f, 1.0, 81.0, 20).unwrap();
        assert!((lo.value - hi.value).abs() <= lo.error_bound + hi.error_bound);
    }

    #[test]
    fn certified_interval_pipeline() {
        let f = three_plus_u();
        let cert = certify_invertible(&f, CertificateMethod::PositiveGap).unwrap();
        let (a, b) = padded_interval(cert.sigma_min_lower, f.l1_norm_f64());
        assert!(a < 1.0 && b > 25.0);
        let e = fk_poly_trace(&f, a, b, DEFAULT_DEGREE).unwrap();
        let s = fk_finite_sections(&f, &[folner_window(&z(), 300).unwrap()], Evidence::Certified(cert)).unwrap();
        assert!((e.value - s.rows[0].value).abs() < 1e-2 + e.error_bound);
    }

    #[test]
    fn rejects_bad_intervals() {
        let f = three_plus_u();
        assert!(fk_poly_trace(&f, 0.0, 25.0, 10).is_err());
        assert!(fk_poly_trace(&f, -1.0, 25.0, 10).is_err());
        assert!(fk_poly_trace(&f, 5.0, 1.0, 10).is_err());
        assert!(fk_poly_trace(&f, 1.0, 25.0, 0).is_err());
    }
}
