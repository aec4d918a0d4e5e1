//! Finitely supported elements of `ZΓ`, `QΓ` and `CΓ`.

mod format;
mod scalar;

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::groups::{GroupDescriptor, GroupElement};

pub use format::{parse_ring_element, serialize_ring_element};
pub use scalar::{rational_to_f64, Scalar, ScalarDomain};

/// A group-ring element: a finitely supported map `Γ → scalars`.
///
/// Zero coefficients are never stored and every key is canonical for the
/// descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct RingElement {
    descriptor: GroupDescriptor,
    domain: ScalarDomain,
    terms: BTreeMap<GroupElement, Scalar>,
}

impl RingElement {
    pub fn zero(descriptor: GroupDescriptor, domain: ScalarDomain) -> Self {
        RingElement {
            descriptor,
            domain,
            terms: BTreeMap::new(),
        }
    }

    /// The unit `e_Γ` with integer coefficient.
    pub fn identity(descriptor: GroupDescriptor) -> Self {
        let e = descriptor.identity();
        let mut terms = BTreeMap::new();
        terms.insert(e, Scalar::from(1));
        RingElement {
            descriptor,
            domain: ScalarDomain::ExactInteger,
            terms,
        }
    }

    /// Builds an element from `(element, coefficient)` pairs. Repeated keys
    /// are summed; every coefficient must lie in `domain`.
    pub fn from_terms(
        descriptor: GroupDescriptor,
        domain: ScalarDomain,
        terms: impl IntoIterator<Item = (GroupElement, Scalar)>,
    ) -> Result<Self> {
        let mut out = RingElement::zero(descriptor, domain);
        for (g, c) in terms {
            if !out.descriptor.contains(&g) {
                return Err(Error::DescriptorMismatch(format!(
                    "{:?} is not a canonical element of {}",
                    g.coords(),
                    out.descriptor
                )));
            }
            if c.domain() != domain {
                return Err(Error::ScalarDomainMismatch(format!(
                    "{} coefficient in a {domain} element",
                    c.domain()
                )));
            }
            out.accumulate(g, &c);
        }
        Ok(out)
    }

    /// Integer element from raw coordinates, canonicalising each key.
    pub fn integer(descriptor: GroupDescriptor, terms: &[(&[i64], i64)]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(terms.len());
        for (coords, c) in terms {
            pairs.push((descriptor.element(coords)?, Scalar::from(*c)));
        }
        RingElement::from_terms(descriptor, ScalarDomain::ExactInteger, pairs)
    }

    fn accumulate(&mut self, g: GroupElement, c: &Scalar) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(g) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c.clone());
                }
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn domain(&self) -> ScalarDomain {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Scalar)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, g: &GroupElement) -> Scalar {
        self.terms
            .get(g)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.domain))
    }

    pub(crate) fn coefficient_ref(&self, g: &GroupElement) -> Option<&Scalar> {
        self.terms.get(g)
    }

    /// Same element with coefficients re-expressed in a wider domain.
    pub fn promote(&self, domain: ScalarDomain) -> Result<Self> {
        if domain == self.domain {
            return Ok(self.clone());
        }
        let mut terms = BTreeMap::new();
        for (g, c) in &self.terms {
            let c = c.promote(domain).ok_or_else(|| {
                Error::ScalarDomainMismatch(format!("cannot express {} as {domain}", self.domain))
            })?;
            terms.insert(g.clone(), c);
        }
        Ok(RingElement {
            descriptor: self.descriptor.clone(),
            domain,
            terms,
        })
    }

    fn check_compatible(&self, other: &RingElement) -> Result<()> {
        if self.descriptor != other.descriptor {
            return Err(Error::DescriptorMismatch(format!(
                "{} vs {}",
                self.descriptor, other.descriptor
            )));
        }
        if self.domain != other.domain {
            return Err(Error::ScalarDomainMismatch(format!(
                "{} vs {}",
                self.domain, other.domain
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.accumulate(g.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> RingElement {
        RingElement {
            descriptor: self.descriptor.clone(),
            domain: self.domain,
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by `c` (same domain).
    pub fn scale(&self, c: &Scalar) -> Result<RingElement> {
        if c.domain() != self.domain {
            return Err(Error::ScalarDomainMismatch(format!(
                "{} scalar on a {} element",
                c.domain(),
                self.domain
            )));
        }
        let mut out = RingElement::zero(self.descriptor.clone(), self.domain);
        for (g, a) in &self.terms {
            out.accumulate(g.clone(), &a.mul(c));
        }
        Ok(out)
    }

    /// Convolution product `(fg)_{γ'} = Σ_γ f_γ g_{γ⁻¹γ'}`.
    pub fn convolve(&self, other: &RingElement) -> Result<RingElement> {
        self.check_compatible(other)?;
        let d = &self.descriptor;
        let mut acc: HashMap<GroupElement, Scalar> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                let prod = a.mul(b);
                acc.entry(d.mul(s, t))
                    .and_modify(|c| c.add_assign(&prod))
                    .or_insert(prod);
            }
        }
        Ok(RingElement {
            descriptor: d.clone(),
            domain: self.domain,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    /// `(f*)_γ = conj(f_{γ⁻¹})`.
    pub fn adjoint(&self) -> RingElement {
        RingElement {
            descriptor: self.descriptor.clone(),
            domain: self.domain,
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (self.descriptor.inverse(g), c.conj()))
                .collect(),
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    /// `Σ |f_γ|`, exact for exact domains.
    pub fn l1_norm(&self) -> Scalar {
        let mut acc = Scalar::zero(self.domain);
        for c in self.terms.values() {
            acc.add_assign(&c.abs());
        }
        acc
    }

    pub fn l1_norm_f64(&self) -> f64 {
        self.terms.values().map(Scalar::abs_f64).sum()
    }

    /// `K_f = supp(f) ∪ supp(f*) ∪ {e}`, sorted.
    pub fn kernel(&self) -> Vec<GroupElement> {
        let mut k: Vec<GroupElement> = self
            .terms
            .keys()
            .flat_map(|g| [g.clone(), self.descriptor.inverse(g)])
            .chain(std::iter::once(self.descriptor.identity()))
            .collect();
        k.sort();
        k.dedup();
        k
    }

    pub fn l1_norm_and_kernel(&self) -> (Scalar, Vec<GroupElement>) {
        (self.l1_norm(), self.kernel())
    }

    /// Canonical trace: the coefficient at the identity.
    pub fn trace_identity(&self) -> Scalar {
        self.coefficient(&self.descriptor.identity())
    }

    /// `k`-fold convolution power; `f⁰ = e_Γ`.
    pub fn power(&self, k: u32) -> RingElement {
        let mut result = RingElement::identity(self.descriptor.clone())
            .promote(self.domain)
            .expect("integer unit promotes to every domain");
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.convolve(&base).expect("same descriptor and domain");
            }
            k >>= 1;
            if k > 0 {
                base = base.convolve(&base).expect("same descriptor and domain");
            }
        }
        result
    }

    /// `(e + a − a²)·b` in `ZF₂`: an element whose powers never cancel, so
    /// `‖g^k‖₁ = 3^k`.
    pub fn free_growth_example() -> RingElement {
        use crate::groups::{LETTER_A, LETTER_B};
        RingElement::integer(
            GroupDescriptor::FreeGroupRank2,
            &[
                (&[LETTER_B], 1),
                (&[LETTER_A, LETTER_B], 1),
                (&[LETTER_A, LETTER_A, LETTER_B], -1),
            ],
        )
        .expect("valid free-group words")
    }

    /// Splits `f = c·e + r`, returning `(c, r)`.
    pub fn split_identity(&self) -> (Scalar, RingElement) {
        let e = self.descriptor.identity();
        let c = self.coefficient(&e);
        let mut r = self.clone();
        r.terms.remove(&e);
        (c, r)
    }

    /// Value of the symbol `Σ f_γ exp(2πi⟨γ, s⟩)` at `s ∈ [0,1)^d` for lattice
    /// elements.
    pub fn symbol_at(&self, s: &[f64]) -> Result<Complex64> {
        match self.descriptor {
            GroupDescriptor::IntegerLattice(d) if d == s.len() => {}
            _ => {
                return Err(Error::UnsupportedFamily(format!(
                    "symbol evaluation needs Z^{} , got {}",
                    s.len(),
                    self.descriptor
                )))
            }
        }
        Ok(self.symbol_terms().iter().fold(Complex64::zero(), |acc, (g, c)| {
            let phase: f64 = g.iter().zip(s).map(|(&k, &x)| k as f64 * x).sum();
            acc + c * Complex64::from_polar(1.0, std::f64::consts::TAU * phase)
        }))
    }

    pub(crate) fn symbol_terms(&self) -> Vec<(Vec<i64>, Complex64)> {
        self.terms
            .iter()
            .map(|(g, c)| (g.coords().to_vec(), c.to_complex()))
            .collect()
    }
}

/// One row of an ℓ¹-growth table.
#[derive(Clone, Debug, PartialEq)]
pub struct L1GrowthRow {
    pub k: u32,
    /// `‖f^k‖₁`, exact.
    pub l1_norm: Scalar,
    pub support_size: usize,
    /// `‖f^k‖₁ = ‖f‖₁^k`: no cancellation among the expanded products.
    pub no_cancellation: bool,
}

/// `‖f^k‖₁` for `k = 0..=k_max`.
pub fn l1_growth(f: &RingElement, k_max: u32) -> Vec<L1GrowthRow> {
    let base = f.l1_norm();
    let mut power = RingElement::identity(f.descriptor.clone())
        .promote(f.domain)
        .expect("integer unit promotes to every domain");
    let mut bound = Scalar::one(f.domain);
    let mut rows = Vec::new();
    for k in 0..=k_max {
        if k > 0 {
            power = power.convolve(f).expect("same descriptor and domain");
            bound = bound.mul(&base);
        }
        let l1_norm = power.l1_norm();
        rows.push(L1GrowthRow {
            k,
            no_cancellation: l1_norm == bound,
            support_size: power.support_size(),
            l1_norm,
        });
    }
    rows
}
