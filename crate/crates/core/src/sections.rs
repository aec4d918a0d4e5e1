//! Compressions `f_F = p_F ∘ f ∘ ι_F` of group-ring elements to finite
//! windows, and invertibility certificates for `f` itself.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::groups::{FolnerWindow, GroupDescriptor};
use crate::linalg::{
    logabsdet_band, logabsdet_dense, BandLu, BandMatrix, DenseLu, DenseMatrix, Field,
};
use crate::mahler::torus_grid_values;
use crate::ring::{rational_to_f64, RingElement, Scalar, ScalarDomain};


#[derive(Clone, Debug, PartialEq)]
enum Storage {
    /// Row-major `n × n`.
    Dense(Vec<Scalar>),
    /// Per row, `(column, value)` sorted by column.
    Sparse(Vec<Vec<(usize, Scalar)>>),
}

/// The matrix of `f_F` in window order: `entry(γ', γ) = f_{γ'γ⁻¹}`.
///
/// Entries stay in the scalar domain of `f`. Stored sparse when fewer than a
/// quarter of the entries are nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressionMatrix {
    window: FolnerWindow,
    domain: ScalarDomain,
    storage: Storage,
}

impl CompressionMatrix {
    /// Assembles a window-indexed matrix from `(row, col, value)` entries;
    /// duplicates are summed.
    pub fn from_entries(
        window: FolnerWindow,
        domain: ScalarDomain,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self> {
        let n = window.len();
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n];
        for (r, c, v) in entries {
            if r >= n || c >= n {
                return Err(Error::Domain(format!("entry ({r}, {c}) outside a {n}x{n} matrix")));
            }
            if v.domain() != domain {
                return Err(Error::ScalarDomainMismatch(format!(
                    "{} entry in a {domain} matrix",
                    v.domain()
                )));
            }
            rows[r].push((c, v));
        }
        let mut nnz = 0;
        for row in rows.iter_mut() {
            row.sort_by_key(|(c, _)| *c);
            let mut merged: Vec<(usize, Scalar)> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => lv.add_assign(&v),
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            nnz += merged.len();
            *row = merged;
        }
        let storage = if (nnz as f64) < 0.25 * (n as f64) * (n as f64) {
            Storage::Sparse(rows)
        } else {
            let mut dense = vec![Scalar::zero(domain); n * n];
            for (r, row) in rows.into_iter().enumerate() {
                for (c, v) in row {
                    dense[r * n + c] = v;
                }
            }
            Storage::Dense(dense)
        };
        Ok(CompressionMatrix {
            window,
            domain,
            storage,
        })
    }

    pub fn window(&self) -> &FolnerWindow {
        &self.window
    }

    pub fn domain(&self) -> ScalarDomain {
        self.domain
    }

    pub fn size(&self) -> usize {
        self.window.len()
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        let n = self.size();
        match &self.storage {
            Storage::Dense(d) => d[row * n + col].clone(),
            Storage::Sparse(rows) => rows[row]
                .binary_search_by_key(&col, |(c, _)| *c)
                .map(|i| rows[row][i].1.clone())
                .unwrap_or_else(|_| Scalar::zero(self.domain)),
        }
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> Vec<(usize, usize, Scalar)> {
        let n = self.size();
        match &self.storage {
            Storage::Dense(d) => d
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i / n, i % n, v.clone()))
                .collect(),
            Storage::Sparse(rows) => rows
                .iter()
                .enumerate()
                .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v.clone())))
                .collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(d) => d.iter().filter(|v| !v.is_zero()).count(),
            Storage::Sparse(rows) => rows.iter().map(Vec::len).sum(),
        }
    }

    pub fn conj_transpose(&self) -> CompressionMatrix {
        CompressionMatrix::from_entries(
            self.window.clone(),
            self.domain,
            self.entries().into_iter().map(|(r, c, v)| (c, r, v.conj())),
        )
        .expect("transpose of a valid matrix")
    }

    /// Exact rational entries as dense rows (exact domains only).
    pub fn to_rational_rows(&self) -> Result<Vec<Vec<BigRational>>> {
        let n = self.size();
        let mut rows = vec![vec![BigRational::zero(); n]; n];
        for (r, c, v) in self.entries() {
            rows[r][c] = v.to_rational().ok_or_else(|| {
                Error::ScalarDomainMismatch("complex matrix has no exact form".into())
            })?;
        }
        Ok(rows)
    }

    fn is_real(&self) -> bool {
        self.domain != ScalarDomain::ComplexFloat
            || self.entries().iter().all(|(_, _, v)| v.to_complex().im == 0.0)
    }

    fn bandwidths(&self) -> (usize, usize) {
        self.entries().iter().fold((0, 0), |(kl, ku), (r, c, _)| {
            if r > c {
                (kl.max(r - c), ku)
            } else {
                (kl, ku.max(c - r))
            }
        })
    }

    pub(crate) fn numeric(&self) -> NumericMatrix {
        if self.is_real() {
            NumericMatrix::Real(self.numeric_form(|v| v.to_complex().re))
        } else {
            NumericMatrix::Complex(self.numeric_form(|v| v.to_complex()))
        }
    }

    fn numeric_form<T: Field>(&self, conv: impl Fn(&Scalar) -> T) -> NumericForm<T> {
        let n = self.size();
        let (kl, ku) = self.bandwidths();
        if 2 * (2 * kl + ku + 1) < n {
            let mut b = BandMatrix::zeros(n, kl, ku);
            for (r, c, v) in self.entries() {
                b.set(r, c, conv(&v));
            }
            NumericForm::Band(b)
        } else {
            let mut d = DenseMatrix::zeros(n, n);
            for (r, c, v) in self.entries() {
                d[(r, c)] = conv(&v);
            }
            NumericForm::Dense(d)
        }
    }

    /// `ln |det|` through the banded or dense path, `-∞` when singular.
    ///
    /// Non-Hermitian matrices are factored twice, as `M` and `M*`, and the
    /// results averaged, so a matrix and its adjoint give bit-identical
    /// values.
    pub fn logabsdet(&self) -> f64 {
        let single = |m: &CompressionMatrix| match m.numeric() {
            NumericMatrix::Real(m) => m.logabsdet(),
            NumericMatrix::Complex(m) => m.logabsdet(),
        };
        let adjoint = self.conj_transpose();
        if adjoint == *self {
            return single(self);
        }
        let (a, b) = (single(self), single(&adjoint));
        if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        0.5 * (a + b)
    }

    pub fn to_dense_complex(&self) -> DenseMatrix<Complex64> {
        let n = self.size();
        let mut d = DenseMatrix::zeros(n, n);
        for (r, c, v) in self.entries() {
            d[(r, c)] = v.to_complex();
        }
        d
    }
}

pub(crate) enum NumericForm<T> {
    Dense(DenseMatrix<T>),
    Band(BandMatrix<T>),
}

pub(crate) enum NumericMatrix {
    Real(NumericForm<f64>),
    Complex(NumericForm<Complex64>),
}

impl<T: Field> NumericForm<T> {
    fn logabsdet(&self) -> f64 {
        match self {
            NumericForm::Dense(d) => logabsdet_dense(d).expect("square by construction"),
            NumericForm::Band(b) => logabsdet_band(b),
        }
    }

    fn sigma_min(&self, n: usize) -> f64 {
        enum Lu<T> {
            Dense(DenseLu<T>),
            Band(BandLu<T>),
        }
        let lu = match self {
            NumericForm::Dense(d) => Lu::Dense(DenseLu::factor(d.clone())),
            NumericForm::Band(b) => Lu::Band(BandLu::factor(b)),
        };
        let singular = match &lu {
            Lu::Dense(l) => l.is_singular(),
            Lu::Band(l) => l.is_singular(),
        };
        if singular || n == 0 {
            return 0.0;
        }
        let apply = |x: &[T]| -> Vec<T> {
            match &lu {
                Lu::Dense(l) => l.solve(&l.solve_adjoint(x)),
                Lu::Band(l) => l.solve(&l.solve_adjoint(x)),
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x5167_4d11);
        let mut x: Vec<T> = (0..n).map(|_| T::from_real(rng.gen_range(0.5..1.5))).collect();
        normalize(&mut x);
        let mut mu = 0.0;
        for _ in 0..SIGMA_MAX_ITERATIONS {
            // y = (M*M)⁻¹ x; ⟨x, y⟩ is the Rayleigh quotient.
            let y = apply(&x);
            let rq: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * *b).real()).sum();
            if !rq.is_finite() || rq <= 0.0 {
                return 0.0;
            }
            let residual: f64 = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (*b - *a * T::from_real(rq)).abs().powi(2))
                .sum::<f64>()
                .sqrt();
            let prev = mu;
            mu = rq;
            x = y;
            normalize(&mut x);
            if residual <= SIGMA_TOLERANCE * rq || (mu - prev).abs() <= 1e-14 * mu {
                break;
            }
        }
        1.0 / mu.sqrt()
    }
}

const SIGMA_MAX_ITERATIONS: usize = 20_000;
const SIGMA_TOLERANCE: f64 = 1e-8;

fn normalize<T: Field>(x: &mut [T]) {
    let norm = x.iter().map(|v| v.abs().powi(2)).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v = *v / T::from_real(norm);
        }
    }
}

/// Compresses `f` to the window `F`.
pub fn compress(f: &RingElement, window: &FolnerWindow) -> Result<CompressionMatrix> {
    if f.descriptor() != window.descriptor() {
        return Err(Error::DescriptorMismatch(format!(
            "element over {} compressed to a window of {}",
            f.descriptor(),
            window.descriptor()
        )));
    }
    let d = f.descriptor();
    let terms: Vec<_> = f.terms().collect();
    let mut entries = Vec::with_capacity(terms.len() * window.len());
    for (col, g) in window.iter().enumerate() {
        // entry(γ', γ) = f_s exactly when γ' = s·γ.
        for (s, c) in &terms {
            if let Some(row) = window.position(&d.mul(s, &g)) {
                entries.push((row, col, (*c).clone()));
            }
        }
    }
    CompressionMatrix::from_entries(window.clone(), f.domain(), entries)
}

/// Smallest singular value by inverse power iteration on `M*M`, or 0 when
/// `M` is numerically singular.
///
/// The Rayleigh quotient of `(M*M)⁻¹` approaches `σ_min⁻²` from below, so
/// the estimate never undershoots `σ_min` beyond rounding.
pub fn sigma_min_estimate(m: &CompressionMatrix) -> f64 {
    let n = m.size();
    match m.numeric() {
        NumericMatrix::Real(f) => f.sigma_min(n),
        NumericMatrix::Complex(f) => f.sigma_min(n),
    }
}

/// How invertibility of `f` is certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    /// Grid minimum of `|f|` on the torus minus a Lipschitz slack (`Z^d` only).
    TorusMin { grid: usize },
    /// `f = c·e + r` with `|c| > ‖r‖₁`.
    L1Neumann,
    /// Self-adjoint `f = c·e + r` with `c > ‖r‖₁`.
    PositiveGap,
}

impl CertificateMethod {
    pub const DEFAULT_GRID: usize = 256;

    pub fn name(&self) -> &'static str {
        match self {
            CertificateMethod::TorusMin { .. } => "torus-min",
            CertificateMethod::L1Neumann => "l1-neumann",
            CertificateMethod::PositiveGap => "positive-gap",
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    Grid {
        size: usize,
        grid_min: f64,
        lipschitz: f64,
        slack: f64,
    },
    Dominance {
        center: f64,
        remainder_l1: f64,
    },
}

/// A proof that `f` is invertible in `LΓ`, with rigorous (outward rounded)
/// bounds.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct InvertibilityCertificate {
    pub method: CertificateMethod,
    /// Lower bound on `σ_min(f)` acting on `ℓ²(Γ)`; always positive.
    pub sigma_min_lower: f64,
    /// Upper bound on `‖f⁻¹‖`.
    pub inverse_norm_upper: Option<f64>,
    /// Upper bound on `‖f⁻¹‖₁` (Neumann series only).
    pub inverse_l1_upper: Option<f64>,
    /// Enclosure of the spectrum (self-adjoint case only).
    pub spectrum: Option<(f64, f64)>,
    pub witness: Witness,
}

fn down(x: f64) -> f64 {
    x - x.abs() * 4.0 * f64::EPSILON - f64::MIN_POSITIVE
}

fn up(x: f64) -> f64 {
    x + x.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE
}

/// `(|c|, ‖r‖₁, c real?)` for `f = c·e + r`, exact where possible.
fn dominance(f: &RingElement) -> (f64, f64, f64, f64, Option<f64>) {
    let (c, r) = f.split_identity();
    match (c.to_rational(), r.l1_norm().to_rational()) {
        (Some(c), Some(rn)) => {
            let gap = c.abs() - &rn;
            (
                rational_to_f64(&c.abs()),
                rational_to_f64(&rn),
                down(rational_to_f64(&gap)),
                up(rational_to_f64(&(c.abs() + &rn))),
                Some(rational_to_f64(&c)),
            )
        }
        _ => {
            let cz = c.to_complex();
            let rn = up(r.l1_norm_f64());
            let real = (cz.im == 0.0).then_some(cz.re);
            (cz.norm(), rn, down(down(cz.norm()) - rn), up(cz.norm() + rn), real)
        }
    }
}

/// Tries to certify that `f` is invertible. Failure is always
/// [`Error::NotCertifiable`] and never a claim of non-invertibility.
pub fn certify_invertible(
    f: &RingElement,
    method: CertificateMethod,
) -> Result<InvertibilityCertificate> {
    let nc = |why: String| Error::NotCertifiable(why);
    match method {
        CertificateMethod::L1Neumann => {
            let (c, rn, gap, _, _) = dominance(f);
            if gap <= 0.0 {
                return Err(nc(format!("|c| = {c} does not dominate ‖r‖₁ = {rn}")));
            }
            let inv = up(1.0 / gap);
            Ok(InvertibilityCertificate {
                method,
                sigma_min_lower: gap,
                inverse_norm_upper: Some(inv),
                inverse_l1_upper: Some(inv),
                spectrum: None,
                witness: Witness::Dominance {
                    center: c,
                    remainder_l1: rn,
                },
            })
        }
        CertificateMethod::PositiveGap => {
            if !f.is_self_adjoint() {
                return Err(nc("element is not self-adjoint".into()));
            }
            let (c, rn, gap, top, real) = dominance(f);
            match real {
                Some(c) if c > 0.0 => {}
                _ => return Err(nc("identity coefficient is not a positive real".into())),
            }
            if gap <= 0.0 {
                return Err(nc(format!("c = {c} does not exceed ‖r‖₁ = {rn}")));
            }
            Ok(InvertibilityCertificate {
                method,
                sigma_min_lower: gap,
                inverse_norm_upper: Some(up(1.0 / gap)),
                inverse_l1_upper: None,
                spectrum: Some((gap, top)),
                witness: Witness::Dominance {
                    center: c,
                    remainder_l1: rn,
                },
            })
        }
        CertificateMethod::TorusMin { grid } => {
            let GroupDescriptor::IntegerLattice(_) = f.descriptor() else {
                return Err(nc(format!("torus-min needs Z^d, got {}", f.descriptor())));
            };
            if grid == 0 {
                return Err(nc("grid size must be positive".into()));
            }
            if f.is_zero() {
                return Err(nc("zero element".into()));
            }
            let values = torus_grid_values(f, grid)?;
            let grid_min = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
            let lipschitz = std::f64::consts::TAU
                * f.terms()
                    .map(|(g, c)| c.abs_f64() * g.coords().iter().map(|x| x.abs() as f64).sum::<f64>())
                    .sum::<f64>();
            let rounding = f.l1_norm_f64() * (f.support_size() as f64 + 8.0) * 4.0 * f64::EPSILON;
            let slack = up(lipschitz * 0.5 / grid as f64 + rounding);
            let bound = down(grid_min - slack);
            if bound <= 0.0 {
                return Err(nc(format!(
                    "grid minimum {grid_min} does not exceed Lipschitz slack {slack} at N = {grid}"
                )));
            }
            Ok(InvertibilityCertificate {
                method,
                sigma_min_lower: bound,
                inverse_norm_upper: Some(up(1.0 / bound)),
                inverse_l1_upper: None,
                spectrum: None,
                witness: Witness::Grid {
                    size: grid,
                    grid_min,
                    lipschitz,
                    slack,
                },
            })
        }
    }
}
