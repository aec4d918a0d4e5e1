//! Determinant engines: `log|det|` of finite matrices, Smith normal forms,
//! finite-section and polynomial-trace approximations of `log det_LΓ f`, and
//! perturbed sections.

pub mod perturbed;
mod poly;
mod snf;

use num_rational::BigRational;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::{boundary_ratio, FolnerWindow};
use crate::linalg::{logabsdet_dense, DenseMatrix, Field};
use crate::ring::{rational_to_f64, RingElement, Scalar};
use crate::sections::{compress, CompressionMatrix, InvertibilityCertificate};

pub use poly::{fk_poly_trace, padded_interval, PolyTraceEstimate, DEFAULT_DEGREE};
pub use snf::{quotient_order, snf, snf_i64, QuotientOrder, SnfResult, SnfTransforms};

/// `ln |det M|` by pivoted elimination (Cholesky when Hermitian positive
/// definite); `-∞` when numerically singular.
pub fn logabsdet<T: Field>(m: &DenseMatrix<T>) -> Result<f64> {
    logabsdet_dense(m)
}

/// Why `f` may be treated as invertible in `LΓ`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evidence {
    Certified(InvertibilityCertificate),
    /// The caller vouches for invertibility.
    Asserted,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub window_size: usize,
    #[serde(serialize_with = "ratio_as_f64")]
    pub boundary_ratio: BigRational,
    /// `(1/|F|) log|det|`; `-∞` on defect rows.
    pub value: f64,
    pub method: String,
    /// The section was numerically singular.
    pub defect: bool,
}

fn ratio_as_f64<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(rational_to_f64(r))
}

/// Per-window approximations with Følner diagnostics.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ConvergenceTable {
    pub target: String,
    pub evidence: Evidence,
    pub rows: Vec<ConvergenceRow>,
}

/// `x` with 12 significant digits, trailing zeros trimmed.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    };
    trim_zeros(&s)
}

fn trim_zeros(s: &str) -> String {
    let (mantissa, exp) = match s.find('e') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let mantissa = if mantissa.contains('.') {
        mantissa.trim_end_matches('0').trim_end_matches('.')
    } else {
        mantissa
    };
    format!("{mantissa}{exp}")
}

impl ConvergenceTable {
    pub const CSV_HEADER: &'static str = "n,window_size,boundary_ratio,value,method";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                r.window_size,
                format_sig(rational_to_f64(&r.boundary_ratio)),
                format_sig(r.value),
                r.method
            ));
        }
        out
    }

    pub fn last_value(&self) -> Option<f64> {
        self.rows.last().map(|r| r.value)
    }
}

fn check_schedule(f: &RingElement, schedule: &[FolnerWindow]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Domain("empty window schedule".into()));
    }
    for w in schedule {
        if w.descriptor() != f.descriptor() {
            return Err(Error::DescriptorMismatch(format!(
                "window over {} for an element over {}",
                w.descriptor(),
                f.descriptor()
            )));
        }
    }
    if schedule.windows(2).any(|p| p[0].len() >= p[1].len()) {
        return Err(Error::Domain("window sizes must increase strictly".into()));
    }
    Ok(())
}

fn row(
    f: &RingElement,
    window: &FolnerWindow,
    matrix: &CompressionMatrix,
    method: &str,
) -> Result<ConvergenceRow> {
    let size = window.len();
    let log = matrix.logabsdet();
    let defect = !log.is_finite();
    Ok(ConvergenceRow {
        n: window.level(),
        window_size: size,
        boundary_ratio: boundary_ratio(window, &f.kernel())?,
        value: if defect { f64::NEG_INFINITY } else { log / size as f64 },
        method: method.to_string(),
        defect,
    })
}

/// `(1/|F|) log|det f_F|` over a schedule of windows.
///
/// Singular sections become defect rows rather than failures. Windows are
/// processed concurrently; rows keep schedule order.
pub fn fk_finite_sections(
    f: &RingElement,
    schedule: &[FolnerWindow],
    evidence: Evidence,
) -> Result<ConvergenceTable> {
    check_schedule(f, schedule)?;
    let rows = schedule
        .par_iter()
        .map(|w| row(f, w, &compress(f, w)?, "sections"))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable {
        target: format!("log det of {} over {}", describe(f), f.descriptor()),
        evidence,
        rows,
    })
}

fn describe(f: &RingElement) -> String {
    let terms: Vec<String> = f
        .terms()
        .take(8)
        .map(|(g, c)| format!("{c}·{:?}", g.coords()))
        .collect();
    let more = if f.support_size() > 8 { " + …" } else { "" };
    format!("{}{more}", terms.join(" + "))
}

/// Seed for window `n` of a perturbation study.
fn window_seed(seed: u64, size: usize) -> u64 {
    seed ^ (size as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Sections with a seeded low-rank perturbation: `⌊δ|F|⌋` columns drawn
/// uniformly from the window are replaced by the matching unit vectors.
/// The perturbed matrix stays banded, and its determinant is the principal
/// minor of `f_F` on the untouched indices.
pub fn perturbation_study(
    f: &RingElement,
    schedule: &[FolnerWindow],
    delta: f64,
    seed: u64,
    evidence: Evidence,
) -> Result<ConvergenceTable> {
    check_schedule(f, schedule)?;
    if !(0.0..=0.1).contains(&delta) {
        return Err(Error::Domain(format!("δ = {delta} outside [0, 0.1]")));
    }
    let rows = schedule
        .par_iter()
        .map(|w| {
            let base = compress(f, w)?;
            if delta == 0.0 {
                return row(f, w, &base, "perturbed");
            }
            let size = w.len();
            let r = (delta * size as f64).floor() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(window_seed(seed, size));
            let mut replaced = vec![false; size];
            for j in sample(&mut rng, size, r).iter() {
                replaced[j] = true;
            }
            let one = Scalar::one(f.domain());
            let entries = base
                .entries()
                .into_iter()
                .filter(|(_, c, _)| !replaced[*c])
                .chain((0..size).filter(|j| replaced[*j]).map(|j| (j, j, one.clone())));
            let s = CompressionMatrix::from_entries(w.clone(), f.domain(), entries)?;
            row(f, w, &s, "perturbed")
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable {
        target: format!(
            "log det of {} over {} (δ = {delta}, seed {seed})",
            describe(f),
            f.descriptor()
        ),
        evidence,
        rows,
    })
}
