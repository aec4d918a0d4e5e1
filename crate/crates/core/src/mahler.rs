//! Logarithmic Mahler measures of `Z^d` group-ring elements, viewed as
//! Laurent polynomials: exact roots in one variable, torus quadrature, and
//! determinants over the finite quotients `(Z/N)^d`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::{folner_window, GroupDescriptor, GroupElement};
use crate::ring::{rational_to_f64, RingElement, Scalar};
use crate::sections::compress;

/// Grid values with `|f| < DEFECT_THRESHOLD` are excluded from the mean.
pub const DEFECT_THRESHOLD: f64 = 1e-14;

/// A ring element over `Z^d` read as a Laurent polynomial in `u_1..u_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    element: RingElement,
}

impl LaurentPoly {
    pub fn new(element: RingElement) -> Result<Self> {
        match element.descriptor() {
            GroupDescriptor::IntegerLattice(_) => Ok(LaurentPoly { element }),
            other => Err(Error::UnsupportedFamily(format!(
                "Laurent polynomials live over Z^d, not {other}"
            ))),
        }
    }

    pub fn dim(&self) -> usize {
        self.element.descriptor().arity().expect("lattice")
    }

    pub fn as_ring_element(&self) -> &RingElement {
        &self.element
    }

    pub fn into_ring_element(self) -> RingElement {
        self.element
    }

    /// For `d = 1`, writes `f = u^{-k} Σ_{j=0}^n c_j u^j` with `c_0 c_n ≠ 0`
    /// and returns `(k, [c_0, …, c_n])`. Fails for the zero polynomial.
    pub fn univariate(&self) -> Result<(i64, Vec<Scalar>)> {
        if self.dim() != 1 {
            return Err(Error::Domain(format!("{}-variate polynomial", self.dim())));
        }
        if self.element.is_zero() {
            return Err(Error::Domain("the zero polynomial has no Mahler measure".into()));
        }
        let exps: Vec<i64> = self.element.support().map(|g| g.coords()[0]).collect();
        let (lo, hi) = (exps[0], *exps.last().expect("nonempty"));
        let mut coeffs = vec![Scalar::zero(self.element.domain()); (hi - lo) as usize + 1];
        for (g, c) in self.element.terms() {
            coeffs[(g.coords()[0] - lo) as usize] = c.clone();
        }
        Ok((-lo, coeffs))
    }
}

impl TryFrom<RingElement> for LaurentPoly {
    type Error = Error;
    fn try_from(f: RingElement) -> Result<Self> {
        LaurentPoly::new(f)
    }
}

/// `log M(f) = log|c_n| + Σ log⁺|λ_j|` over the roots `λ_j` of `Σ c_j u^j`,
/// found as eigenvalues of the balanced companion matrix.
pub fn mahler_roots(f: &LaurentPoly) -> Result<f64> {
    let (_, coeffs) = f.univariate()?;
    let exact: Vec<BigRational> = coeffs
        .iter()
        .map(|c| {
            c.to_rational().ok_or_else(|| {
                Error::ScalarDomainMismatch("root formula needs exact coefficients".into())
            })
        })
        .collect::<Result<_>>()?;
    let n = exact.len() - 1;
    let lead = &exact[n];
    let mut value = rational_to_f64(&lead.abs()).ln();
    if n == 0 {
        return Ok(value);
    }
    // Companion matrix of the monic polynomial; exact division first.
    let monic: Vec<f64> = exact[..n].iter().map(|c| rational_to_f64(&(c / lead))).collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for (j, c) in monic.iter().enumerate() {
        m[(j, n - 1)] = -c;
    }
    nalgebra::linalg::balancing::balance_parlett_reinsch(&mut m);
    let roots = companion_roots(m)?;
    value += roots.iter().map(|l| l.norm().ln().max(0.0)).sum::<f64>();
    Ok(value)
}

const SCHUR_MAX_ITERATIONS: usize = 2000;

/// Eigenvalues of a companion matrix. The unshifted QR iteration can stall
/// on root sets symmetric under `λ ↦ −λ` (polynomials in `u²`), so on
/// failure the spectrum is computed for `M + sI` and shifted back.
fn companion_roots(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let scale = m.norm().max(1.0);
    for s in [0.0, 0.5 * std::f64::consts::SQRT_2, -std::f64::consts::FRAC_1_PI, 1.618_033_988_749_895] {
        let shifted = &m + DMatrix::<f64>::identity(n, n) * (s * scale);
        if let Some(schur) = shifted.try_schur(f64::EPSILON, SCHUR_MAX_ITERATIONS) {
            let shift = Complex64::new(s * scale, 0.0);
            return Ok(schur.complex_eigenvalues().iter().map(|l| l - shift).collect());
        }
    }
    Err(Error::Domain(format!(
        "eigenvalue iteration did not converge for a degree-{n} polynomial"
    )))
}

/// `N`-th roots of unity `ω^k`, with `ω^{N-k}` the bitwise conjugate of
/// `ω^k` so that `f*` evaluates to the exact conjugate of `f`.
fn unit_roots(n: usize) -> Vec<Complex64> {
    let mut table = vec![Complex64::new(1.0, 0.0); n];
    for k in 1..n.div_ceil(2) {
        let t = std::f64::consts::TAU * k as f64 / n as f64;
        table[k] = Complex64::new(t.cos(), t.sin());
        table[n - k] = table[k].conj();
    }
    if n % 2 == 0 {
        table[n / 2] = Complex64::new(-1.0, 0.0);
    }
    table
}

/// Terms grouped into pairs `{γ, -γ}`: `(γ, c_γ, c_{-γ})` with `γ ≥ -γ`.
fn paired_terms(f: &RingElement) -> Vec<(Vec<i64>, Complex64, Complex64)> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out: Vec<(Vec<i64>, Complex64, Complex64)> = Vec::new();
    for (g, c) in f.terms() {
        let neg: Vec<i64> = g.coords().iter().map(|x| -x).collect();
        let rep = g.coords().to_vec().max(neg.clone());
        if rep.as_slice() == g.coords() {
            let other = f.coefficient(&GroupElement::from_coords(&neg));
            let other = if rep == neg { zero } else { other.to_complex() };
            out.push((rep, c.to_complex(), other));
        } else if f.coefficient_ref(&GroupElement::from_coords(&rep)).is_none() {
            out.push((rep, zero, c.to_complex()));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Symbol values `f(ω^j)` on the `N^d` grid of `N`-th roots of unity, in
/// lexicographic order of `j ∈ [0, N)^d`.
pub(crate) fn torus_grid_values(f: &RingElement, n: usize) -> Result<Vec<Complex64>> {
    let GroupDescriptor::IntegerLattice(d) = f.descriptor() else {
        return Err(Error::UnsupportedFamily(format!(
            "torus evaluation needs Z^d, got {}",
            f.descriptor()
        )));
    };
    let d = *d;
    if n == 0 {
        return Err(Error::Domain("grid size must be positive".into()));
    }
    let points = n
        .checked_pow(d as u32)
        .filter(|p| *p <= 1 << 28)
        .ok_or_else(|| Error::TooLarge(format!("{n}^{d} grid points")))?;
    let table = unit_roots(n);
    let pairs = paired_terms(f);
    let modulus = n as i64;
    let values = (0..points)
        .into_par_iter()
        .map(|idx| {
            let mut j = vec![0i64; d];
            let mut rest = idx;
            for slot in j.iter_mut().rev() {
                *slot = (rest % n) as i64;
                rest /= n;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (g, c_pos, c_neg) in &pairs {
                let phase = g
                    .iter()
                    .zip(&j)
                    .fold(0i64, |a, (x, y)| (a + x.rem_euclid(modulus) * y) % modulus)
                    as usize;
                let w = table[phase];
                let w_inv = table[(n - phase) % n];
                acc += *c_pos * w + *c_neg * w_inv;
            }
            acc
        })
        .collect();
    Ok(values)
}

/// Result of a torus quadrature.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct MahlerGrid {
    /// Mean of `log|f|` over the non-defective grid points.
    pub value: f64,
    pub grid: usize,
    pub points: usize,
    /// Grid points with `|f| < 1e-14`, excluded from the mean.
    pub defects: usize,
}

/// Neumaier-compensated sum in slice order.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `(1/N^d) Σ log|f(ω)|` over the `N`-th roots-of-unity grid.
pub fn mahler_grid(f: &RingElement, n: usize) -> Result<MahlerGrid> {
    if f.is_zero() {
        return Err(Error::Domain("the zero element has no Mahler measure".into()));
    }
    if n < 2 {
        return Err(Error::Domain(format!("grid size {n} < 2")));
    }
    let values = torus_grid_values(f, n)?;
    let logs: Vec<f64> = values
        .iter()
        .map(|v| v.norm())
        .filter(|a| *a >= DEFECT_THRESHOLD)
        .map(f64::ln)
        .collect();
    let defects = values.len() - logs.len();
    let value = if logs.is_empty() {
        f64::NEG_INFINITY
    } else {
        compensated_sum(logs.iter().copied()) / logs.len() as f64
    };
    Ok(MahlerGrid {
        value,
        grid: n,
        points: values.len(),
        defects,
    })
}

/// `(1/N^d) log|det|` of `f` pushed to the group ring of `(Z/N)^d`.
///
/// Returns `-∞` when the image is singular.
pub fn circulant_logdet(f: &RingElement, n: usize) -> Result<f64> {
    let GroupDescriptor::IntegerLattice(d) = f.descriptor() else {
        return Err(Error::UnsupportedFamily(format!(
            "circulant sections need Z^d, got {}",
            f.descriptor()
        )));
    };
    if n < 2 {
        return Err(Error::Domain(format!("modulus {n} < 2")));
    }
    let quotient = GroupDescriptor::cyclic_product(vec![n as u64; *d])?;
    let image = RingElement::from_terms(
        quotient.clone(),
        f.domain(),
        f.terms()
            .map(|(g, c)| Ok((quotient.element(g.coords())?, c.clone())))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let window = folner_window(&quotient, 1)?;
    if window.len() > 4096 {
        return Err(Error::TooLarge(format!("{}-element quotient", window.len())));
    }
    let m = compress(&image, &window)?;
    Ok(m.logabsdet() / window.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::ring::ScalarDomain;
    use proptest::prelude::*;

    fn z(d: usize) -> GroupDescriptor {
        GroupDescriptor::IntegerLattice(d)
    }

    fn poly(terms: &[(i64, i64)]) -> RingElement {
        let t: Vec<([i64; 1], i64)> = terms.iter().map(|(e, c)| ([*e], *c)).collect();
        let refs: Vec<(&[i64], i64)> = t.iter().map(|(e, c)| (e.as_slice(), *c)).collect();
        RingElement::integer(z(1), &refs).unwrap()
    }

    fn lp(f: RingElement) -> LaurentPoly {
        LaurentPoly::new(f).unwrap()
    }

    #[test]
    fn univariate_view() {
        let (k, c) = lp(poly(&[(-1, 1), (0, 3), (1, 1)])).univariate().unwrap();
        assert_eq!(k, 1);
        assert_eq!(c, vec![Scalar::from(1), Scalar::from(3), Scalar::from(1)]);
        assert!(lp(RingElement::zero(z(1), ScalarDomain::ExactInteger)).univariate().is_err());
        assert!(LaurentPoly::new(RingElement::identity(GroupDescriptor::Heisenberg3)).is_err());
    }

    #[test]
    fn root_formula_examples() {
        assert_relative_eq!(mahler_roots(&lp(poly(&[(0, 2)]))).unwrap(), 2f64.ln());
        assert!(mahler_roots(&lp(poly(&[(1, 1)]))).unwrap().abs() < 1e-15);
        // roots of z² + 3z + 1 by the quadratic formula
        let big_root = (3.0 + 5f64.sqrt()) / 2.0;
        let v = mahler_roots(&lp(poly(&[(-1, 1), (0, 3), (1, 1)]))).unwrap();
        assert!((v - big_root.ln()).abs() < 1e-12);
        assert!((v - 0.962_423_650_119).abs() < 1e-9);
        assert!(matches!(
            mahler_roots(&lp(RingElement::zero(z(1), ScalarDomain::ExactInteger))),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn root_formula_on_polynomials_in_u_squared() {
        // c0 + c2 u² + c4 u⁴ has the Mahler measure of c0 + c2 v + c4 v²,
        // whose roots come from the quadratic formula.
        for [c0, c2, c4] in [[8.0, 11.0, -10.0], [-6.0, 0.0, 24.0], [-3.0, 11.0, -3.0], [3.0, 10.0, 8.0]] {
            let disc: f64 = c2 * c2 - 4.0 * c4 * c0;
            let expected = if disc >= 0.0 {
                let r1 = (-c2 + disc.sqrt()) / (2.0 * c4);
                let r2 = (-c2 - disc.sqrt()) / (2.0 * c4);
                c4.abs().ln() + r1.abs().ln().max(0.0) + r2.abs().ln().max(0.0)
            } else {
                // complex pair of modulus sqrt(c0 / c4)
                c4.abs().ln() + 2.0 * (c0 / c4).abs().sqrt().ln().max(0.0)
            };
            let f = poly(&[(0, c0 as i64), (2, c2 as i64), (4, c4 as i64)]);
            assert!((mahler_roots(&lp(f)).unwrap() - expected).abs() < 1e-10, "{c0} {c2} {c4}");
        }
    }

    #[test]
    fn root_formula_matches_factored_products() {
        // Π (u - r_i) with integer r_i: log M = Σ log max(1, |r_i|)
        let roots = [2i64, -3, 1, 5, -1, 7, 0, 4];
        let mut f = poly(&[(0, 1)]);
        for r in roots {
            f = f.convolve(&poly(&[(1, 1), (0, -r)])).unwrap();
        }
        let expected: f64 = roots.iter().map(|r| (r.abs() as f64).max(1.0).ln()).sum();
        assert!((mahler_roots(&lp(f)).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn grid_examples() {
        let f = RingElement::integer(
            z(2),
            &[(&[0, 0], 5), (&[1, 0], 1), (&[-1, 0], 1), (&[0, 1], 1), (&[0, -1], 1)],
        )
        .unwrap();
        let g = mahler_grid(&f, 2).unwrap();
        let expected = (9f64.ln() + 2.0 * 5f64.ln()) / 4.0;
        assert_relative_eq!(g.value, expected, epsilon = 1e-14);
        assert_relative_eq!(g.value, 1.35403, epsilon = 1e-5);
        assert_eq!((g.points, g.defects), (4, 0));

        let two = RingElement::integer(z(3), &[(&[0, 0, 0], 2)]).unwrap();
        assert_relative_eq!(mahler_grid(&two, 5).unwrap().value, 2f64.ln(), epsilon = 1e-15);

        let f = poly(&[(-1, 1), (0, 3), (1, 1)]);
        let exact = mahler_roots(&lp(f.clone())).unwrap();
        assert!((mahler_grid(&f, 64).unwrap().value - exact).abs() < 1e-10);
    }

    #[test]
    fn grid_records_defects() {
        // 2 + u + u⁻¹ vanishes at u = -1, a grid point for even N.
        let f = poly(&[(-1, 1), (0, 2), (1, 1)]);
        let g = mahler_grid(&f, 8).unwrap();
        assert_eq!(g.defects, 1);
        assert!(g.value.is_finite());
        assert!(mahler_grid(&RingElement::zero(z(1), ScalarDomain::ExactInteger), 4).is_err());
        assert!(mahler_grid(&f, 1).is_err());
    }

    #[test]
    fn circulant_examples() {
        let f = poly(&[(0, 2), (1, 1)]);
        assert_relative_eq!(circulant_logdet(&f, 3).unwrap(), 9f64.ln() / 3.0, epsilon = 1e-14);
        let e = RingElement::identity(z(2));
        assert!(circulant_logdet(&e, 4).unwrap().abs() < 1e-15);
        let singular = poly(&[(0, 1), (1, -1)]);
        assert_eq!(circulant_logdet(&singular, 4).unwrap(), f64::NEG_INFINITY);
    }

    fn nonvanishing(d: usize) -> impl Strategy<Value = RingElement> {
        prop::collection::vec((prop::collection::vec(-2i64..=2, d), -3i64..=3), 0..5).prop_map(
            move |terms| {
                let r: i64 = terms.iter().map(|(_, c)| c.abs()).sum();
                let mut t: Vec<(Vec<i64>, i64)> =
                    terms.into_iter().filter(|(g, _)| g.iter().any(|x| *x != 0)).collect();
                t.push((vec![0; d], r + 1));
                let refs: Vec<(&[i64], i64)> = t.iter().map(|(g, c)| (g.as_slice(), *c)).collect();
                RingElement::integer(GroupDescriptor::IntegerLattice(d), &refs).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn circulant_equals_grid(f in prop_oneof![nonvanishing(1), nonvanishing(2)], k in 1u32..=4) {
            let n = 1usize << k;
            let a = circulant_logdet(&f, n).unwrap();
            let b = mahler_grid(&f, n).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300) + 1e-15);
        }

        #[test]
        fn root_formula_handles_even_polynomials(f in nonvanishing(1), g in nonvanishing(1)) {
            // Substituting u ↦ u² preserves the Mahler measure.
            let square = |h: &RingElement| {
                let t: Vec<(Vec<i64>, i64)> = h
                    .terms()
                    .map(|(g, c)| (vec![2 * g.coords()[0]], c.to_rational().unwrap().to_integer().try_into().unwrap()))
                    .collect();
                let refs: Vec<(&[i64], i64)> = t.iter().map(|(g, c)| (g.as_slice(), *c)).collect();
                RingElement::integer(GroupDescriptor::IntegerLattice(1), &refs).unwrap()
            };
            let fg = f.convolve(&g).unwrap();
            let lhs = mahler_roots(&lp(square(&fg))).unwrap();
            prop_assert!((lhs - mahler_roots(&lp(fg)).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn root_formula_is_multiplicative(f in nonvanishing(1), g in nonvanishing(1)) {
            let fg = f.convolve(&g).unwrap();
            let lhs = mahler_roots(&lp(fg)).unwrap();
            let rhs = mahler_roots(&lp(f)).unwrap() + mahler_roots(&lp(g)).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        #[test]
        fn grid_adjoint_symmetry_is_exact(f in prop_oneof![nonvanishing(1), nonvanishing(2)], n in 2usize..20) {
            prop_assert_eq!(mahler_grid(&f.adjoint(), n).unwrap(), mahler_grid(&f, n).unwrap());
        }

        #[test]
        fn grid_is_monotone_in_the_symbol(f in nonvanishing(2), extra in 2i64..5) {
            // |g| = |f| + extra·|f|/... : g = f·(c + u) with c ≥ 2 has |g| ≥ |f|.
            let lift = RingElement::integer(
                GroupDescriptor::IntegerLattice(2),
                &[(&[0, 0], extra + 1), (&[1, 0], 1)],
            ).unwrap();
            let g = f.convolve(&lift).unwrap();
            for n in [4, 8] {
                prop_assert!(mahler_grid(&f, n).unwrap().value <= mahler_grid(&g, n).unwrap().value);
            }
        }
    }

    #[test]
    fn grid_error_shrinks() {
        let f = RingElement::integer(
            z(2),
            &[(&[0, 0], 5), (&[1, 0], 1), (&[-1, 0], 1), (&[0, 1], 1), (&[0, -1], 1)],
        )
        .unwrap();
        let mut prev = f64::INFINITY;
        for n in [8, 16, 32, 64] {
            let diff = (mahler_grid(&f, 2 * n).unwrap().value - mahler_grid(&f, n).unwrap().value).abs();
            assert!(diff <= prev);
            prev = diff;
        }
    }
}
