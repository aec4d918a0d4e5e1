//! Supported discrete groups: integer lattices, the integer Heisenberg group,
//! finite products of cyclic groups and the free group of rank two.
//!
//! Elements are plain coordinate vectors in canonical form; the group law
//! lives on [`GroupDescriptor`], so an element only makes sense together with
//! the descriptor it was built for.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Free-group letter codes used inside [`GroupElement`] words.
pub const LETTER_A: i64 = 1;
pub const LETTER_B: i64 = 2;

/// The supported group families.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupDescriptor {
    IntegerLattice(usize),
    Heisenberg3,
    FiniteCyclicProduct(Vec<u64>),
    /// Non-amenable; only admitted for ring arithmetic.
    FreeGroupRank2,
}

/// A group element in canonical coordinates.
///
/// Lattice: `d` integers. Heisenberg: `(x, y, z)`. Finite product: residues
/// in `[0, m_i)`. Free group: a reduced word of letter codes `±1` (a) and
/// `±2` (b).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(SmallVec<[i64; 4]>);

impl GroupElement {
    pub fn from_coords(coords: &[i64]) -> Self {
        GroupElement(SmallVec::from_slice(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl GroupDescriptor {
    pub fn lattice(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("lattice rank must be at least 1".into()));
        }
        Ok(GroupDescriptor::IntegerLattice(d))
    }

    pub fn cyclic_product(moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() || moduli.iter().any(|&m| m < 2) {
            return Err(Error::Domain(format!(
                "finite cyclic product needs moduli >= 2, got {moduli:?}"
            )));
        }
        Ok(GroupDescriptor::FiniteCyclicProduct(moduli))
    }

    pub fn is_amenable(&self) -> bool {
        !matches!(self, GroupDescriptor::FreeGroupRank2)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupDescriptor::FiniteCyclicProduct(_))
    }

    pub fn is_abelian(&self) -> bool {
        matches!(
            self,
            GroupDescriptor::IntegerLattice(_) | GroupDescriptor::FiniteCyclicProduct(_)
        )
    }

    /// Group order for finite families.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupDescriptor::FiniteCyclicProduct(m) => Some(m.iter().product()),
            _ => None,
        }
    }

    /// Number of coordinates of an element; `None` for free-group words.
    pub fn arity(&self) -> Option<usize> {
        match self {
            GroupDescriptor::IntegerLattice(d) => Some(*d),
            GroupDescriptor::Heisenberg3 => Some(3),
            GroupDescriptor::FiniteCyclicProduct(m) => Some(m.len()),
            GroupDescriptor::FreeGroupRank2 => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self.arity() {
            Some(k) => GroupElement(SmallVec::from_elem(0, k)),
            None => GroupElement(SmallVec::new()),
        }
    }

    /// Whether `g` is a canonical element of this group.
    pub fn contains(&self, g: &GroupElement) -> bool {
        match self {
            GroupDescriptor::IntegerLattice(d) => g.0.len() == *d,
            GroupDescriptor::Heisenberg3 => g.0.len() == 3,
            GroupDescriptor::FiniteCyclicProduct(m) => {
                g.0.len() == m.len()
                    && g.0.iter().zip(m).all(|(&r, &m)| r >= 0 && (r as u64) < m)
            }
            GroupDescriptor::FreeGroupRank2 => {
                g.0.iter().all(|l| matches!(l.abs(), LETTER_A | LETTER_B))
                    && g.0.windows(2).all(|w| w[0] != -w[1])
            }
        }
    }

    /// Builds the canonical element with the given coordinates, reducing
    /// residues and free-group words.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        match self {
            GroupDescriptor::IntegerLattice(d) if coords.len() == *d => {
                Ok(GroupElement::from_coords(coords))
            }
            GroupDescriptor::Heisenberg3 if coords.len() == 3 => {
                Ok(GroupElement::from_coords(coords))
            }
            GroupDescriptor::FiniteCyclicProduct(m) if coords.len() == m.len() => Ok(
                GroupElement(
                    coords
                        .iter()
                        .zip(m)
                        .map(|(&c, &m)| c.rem_euclid(m as i64))
                        .collect(),
                ),
            ),
            GroupDescriptor::FreeGroupRank2 => {
                if let Some(bad) = coords.iter().find(|l| !matches!(l.abs(), LETTER_A | LETTER_B)) {
                    return Err(Error::Domain(format!("invalid free-group letter code {bad}")));
                }
                Ok(reduce_word(coords.iter().copied()))
            }
            _ => Err(Error::DescriptorMismatch(format!(
                "{} coordinates for group {self}",
                coords.len()
            ))),
        }
    }

    pub(crate) fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch(format!(
                "element {:?} does not belong to {self}",
                g.coords()
            )))
        }
    }

    /// Group product `g·h`, validating both operands.
    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    /// Group product without validation; operands must be canonical.
    pub(crate) fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match self {
            GroupDescriptor::IntegerLattice(_) => {
                GroupElement(g.0.iter().zip(&h.0).map(|(a, b)| a + b).collect())
            }
            GroupDescriptor::Heisenberg3 => {
                let (a, b) = (&g.0, &h.0);
                GroupElement(SmallVec::from_slice(&[
                    a[0] + b[0],
                    a[1] + b[1],
                    a[2] + b[2] + a[0] * b[1],
                ]))
            }
            GroupDescriptor::FiniteCyclicProduct(m) => GroupElement(
                g.0.iter()
                    .zip(&h.0)
                    .zip(m)
                    .map(|((a, b), &m)| (a + b) % m as i64)
                    .collect(),
            ),
            GroupDescriptor::FreeGroupRank2 => {
                reduce_word(g.0.iter().copied().chain(h.0.iter().copied()))
            }
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        match self {
            GroupDescriptor::IntegerLattice(_) => GroupElement(g.0.iter().map(|a| -a).collect()),
            GroupDescriptor::Heisenberg3 => {
                let (x, y, z) = (g.0[0], g.0[1], g.0[2]);
                GroupElement(SmallVec::from_slice(&[-x, -y, -z + x * y]))
            }
            GroupDescriptor::FiniteCyclicProduct(m) => GroupElement(
                g.0.iter()
                    .zip(m)
                    .map(|(&a, &m)| (m as i64 - a) % m as i64)
                    .collect(),
            ),
            GroupDescriptor::FreeGroupRank2 => GroupElement(g.0.iter().rev().map(|l| -l).collect()),
        }
    }

    /// All elements of a finite group in lexicographic order.
    pub fn finite_elements(&self) -> Result<Vec<GroupElement>> {
        match self {
            GroupDescriptor::FiniteCyclicProduct(m) => {
                let hi: Vec<i64> = m.iter().map(|&m| m as i64 - 1).collect();
                Ok(BoxIter::new(vec![0; m.len()], hi).collect())
            }
            _ => Err(Error::UnsupportedFamily(format!("{self} is not finite"))),
        }
    }
}

fn reduce_word(letters: impl Iterator<Item = i64>) -> GroupElement {
    let mut out: SmallVec<[i64; 4]> = SmallVec::new();
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    GroupElement(out)
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::IntegerLattice(d) => write!(f, "Z^{d}"),
            GroupDescriptor::Heisenberg3 => write!(f, "H3"),
            GroupDescriptor::FiniteCyclicProduct(m) => {
                let parts: Vec<String> = m.iter().map(u64::to_string).collect();
                write!(f, "Zmod:{}", parts.join("x"))
            }
            GroupDescriptor::FreeGroupRank2 => write!(f, "F2"),
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse {
            line: 0,
            message: format!("unknown group descriptor `{s}`"),
        };
        if s == "H3" {
            Ok(GroupDescriptor::Heisenberg3)
        } else if s == "F2" {
            Ok(GroupDescriptor::FreeGroupRank2)
        } else if let Some(d) = s.strip_prefix("Z^") {
            GroupDescriptor::lattice(d.parse().map_err(|_| bad())?)
        } else if let Some(rest) = s.strip_prefix("Zmod:") {
            let moduli = rest
                .split('x')
                .map(|m| m.parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            GroupDescriptor::cyclic_product(moduli)
        } else {
            Err(bad())
        }
    }
}

/// Lexicographic iterator over an integer box `lo ..= hi`.
#[derive(Clone, Debug)]
pub struct BoxIter {
    lo: Vec<i64>,
    hi: Vec<i64>,
    next: Option<Vec<i64>>,
}

impl BoxIter {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        let next = if lo.iter().zip(&hi).all(|(l, h)| l <= h) {
            Some(lo.clone())
        } else {
            None
        };
        BoxIter { lo, hi, next }
    }
}

impl Iterator for BoxIter {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        let mut done = true;
        while i > 0 {
            i -= 1;
            if succ[i] < self.hi[i] {
                succ[i] += 1;
                done = false;
                break;
            }
            succ[i] = self.lo[i];
        }
        if !done {
            self.next = Some(succ);
        }
        Some(GroupElement::from_coords(&cur))
    }
}

#[derive(Clone, Debug)]
enum Layout {
    /// Coordinate box, enumerated lexicographically.
    Box { lo: Vec<i64>, hi: Vec<i64> },
    Listed {
        elements: Vec<GroupElement>,
        index: HashMap<GroupElement, usize>,
    },
}

/// An ordered finite subset of a group.
#[derive(Clone, Debug)]
pub struct FolnerWindow {
    descriptor: GroupDescriptor,
    level: usize,
    layout: Layout,
}

impl PartialEq for FolnerWindow {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor
            && self.len() == other.len()
            && self.iter().eq(other.iter())
    }
}

impl FolnerWindow {
    /// A window from an explicit list of distinct canonical elements.
    pub fn from_elements(descriptor: GroupDescriptor, elements: Vec<GroupElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Domain("window must be nonempty".into()));
        }
        let mut index = HashMap::with_capacity(elements.len());
        for (i, g) in elements.iter().enumerate() {
            descriptor.check(g)?;
            if index.insert(g.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate window element {:?}", g.coords())));
            }
        }
        Ok(FolnerWindow {
            descriptor,
            level: 0,
            layout: Layout::Listed { elements, index },
        })
    }

    /// The coordinate box `lo ..= hi` in lexicographic order.
    pub fn coordinate_box(descriptor: GroupDescriptor, lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        let arity = match descriptor {
            GroupDescriptor::FreeGroupRank2 => None,
            ref d => d.arity(),
        };
        if arity != Some(lo.len()) || lo.len() != hi.len() || lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::Domain(format!("invalid box {lo:?}..={hi:?} for {descriptor}")));
        }
        if let GroupDescriptor::FiniteCyclicProduct(m) = &descriptor {
            if lo.iter().zip(&hi).zip(m).any(|((&l, &h), &m)| l < 0 || h as u64 >= m) {
                return Err(Error::Domain("box leaves the residue range".into()));
            }
        }
        Ok(FolnerWindow {
            descriptor,
            level: 0,
            layout: Layout::Box { lo, hi },
        })
    }

    pub fn with_level(mut self, level: usize) -> Self {
        self.level = level;
        self
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    /// The `n` this window was generated for (0 for hand-built windows).
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        match &self.layout {
            Layout::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| (h - l + 1) as usize).product(),
            Layout::Listed { elements, .. } => elements.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = GroupElement> + '_> {
        match &self.layout {
            Layout::Box { lo, hi } => Box::new(BoxIter::new(lo.clone(), hi.clone())),
            Layout::Listed { elements, .. } => Box::new(elements.iter().cloned()),
        }
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.iter().collect()
    }

    /// Position of `g` in window order.
    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        match &self.layout {
            Layout::Box { lo, hi } => {
                let c = g.coords();
                if c.len() != lo.len() {
                    return None;
                }
                let mut pos = 0usize;
                for i in 0..c.len() {
                    if c[i] < lo[i] || c[i] > hi[i] {
                        return None;
                    }
                    pos = pos * (hi[i] - lo[i] + 1) as usize + (c[i] - lo[i]) as usize;
                }
                Some(pos)
            }
            Layout::Listed { index, .. } => index.get(g).copied(),
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.position(g).is_some()
    }

    pub fn element_at(&self, pos: usize) -> Option<GroupElement> {
        match &self.layout {
            Layout::Box { lo, hi } => {
                if pos >= self.len() {
                    return None;
                }
                let mut rem = pos;
                let mut c = vec![0; lo.len()];
                for i in (0..lo.len()).rev() {
                    let w = (hi[i] - lo[i] + 1) as usize;
                    c[i] = lo[i] + (rem % w) as i64;
                    rem /= w;
                }
                Some(GroupElement::from_coords(&c))
            }
            Layout::Listed { elements, .. } => elements.get(pos).cloned(),
        }
    }

    /// The right translate `W·c`, in the order induced from `W`.
    pub fn right_translate(&self, c: &GroupElement) -> Result<FolnerWindow> {
        let elements = self.iter().map(|w| self.descriptor.mul(&w, c)).collect();
        FolnerWindow::from_elements(self.descriptor.clone(), elements)
    }

    /// `{g ∈ W : K·g ⊆ W}`.
    pub fn interior(&self, kernel: &[GroupElement]) -> Vec<GroupElement> {
        self.iter()
            .filter(|g| kernel.iter().all(|k| self.contains(&self.descriptor.mul(k, g))))
            .collect()
    }
}

/// The standard window of level `n`: the box `[-n, n]^d` for lattices,
/// `{|x| ≤ n, |y| ≤ n, |z| ≤ n²}` for the Heisenberg group and the whole
/// group for finite families.
pub fn folner_window(descriptor: &GroupDescriptor, n: usize) -> Result<FolnerWindow> {
    if n == 0 {
        return Err(Error::Domain("window level must be at least 1".into()));
    }
    let n = n as i64;
    let (lo, hi) = match descriptor {
        GroupDescriptor::IntegerLattice(d) => (vec![-n; *d], vec![n; *d]),
        GroupDescriptor::Heisenberg3 => (vec![-n, -n, -n * n], vec![n, n, n * n]),
        GroupDescriptor::FiniteCyclicProduct(m) => {
            (vec![0; m.len()], m.iter().map(|&m| m as i64 - 1).collect())
        }
        GroupDescriptor::FreeGroupRank2 => {
            return Err(Error::UnsupportedFamily(
                "the free group admits no Følner windows".into(),
            ))
        }
    };
    Ok(FolnerWindow::coordinate_box(descriptor.clone(), lo, hi)?.with_level(n as usize))
}

/// Exact `|K·F Δ F| / |F|`.
pub fn boundary_ratio(window: &FolnerWindow, kernel: &[GroupElement]) -> Result<BigRational> {
    if kernel.is_empty() {
        return Err(Error::Domain("boundary ratio needs a nonempty K".into()));
    }
    for k in kernel {
        window.descriptor.check(k)?;
    }
    let size = window.len();
    let diff = match (&window.layout, &window.descriptor) {
        (
            Layout::Box { lo, hi },
            GroupDescriptor::IntegerLattice(_) | GroupDescriptor::Heisenberg3,
        ) => fibred_symmetric_difference(&window.descriptor, lo, hi, kernel),
        _ => enumerated_symmetric_difference(window, kernel),
    };
    Ok(BigRational::new(BigInt::from(diff), BigInt::from(size)))
}

fn enumerated_symmetric_difference(window: &FolnerWindow, kernel: &[GroupElement]) -> u64 {
    let d = &window.descriptor;
    let mut covered = vec![false; window.len()];
    let mut outside = HashSet::new();
    for g in window.iter() {
        for k in kernel {
            let kg = d.mul(k, &g);
            match window.position(&kg) {
                Some(p) => covered[p] = true,
                None => {
                    outside.insert(kg);
                }
            }
        }
    }
    outside.len() as u64 + covered.iter().filter(|c| !**c).count() as u64
}

/// Symmetric difference for boxes in groups where left multiplication by `k`
/// sends the last-coordinate fibre over a prefix `p` onto the fibre over
/// `k_prefix + p`, shifted by an amount depending only on `k` and `p`
/// (lattices and the Heisenberg group). Cost is linear in the number of
/// prefixes instead of the window size.
fn fibred_symmetric_difference(
    descriptor: &GroupDescriptor,
    lo: &[i64],
    hi: &[i64],
    kernel: &[GroupElement],
) -> u64 {
    let last = lo.len() - 1;
    let (zlo, zhi) = (lo[last], hi[last]);
    let mut fibres: HashMap<Vec<i64>, Vec<(i64, i64)>> = HashMap::new();
    for prefix in BoxIter::new(lo[..last].to_vec(), hi[..last].to_vec()) {
        let p = prefix.coords();
        for k in kernel {
            let kc = k.coords();
            let target: Vec<i64> = p.iter().zip(kc).map(|(a, b)| a + b).collect();
            let shift = match descriptor {
                GroupDescriptor::Heisenberg3 => kc[2] + kc[0] * p[1],
                _ => kc[last],
            };
            fibres.entry(target).or_default().push((zlo + shift, zhi + shift));
        }
    }
    let fibre_len = zhi - zlo + 1;
    let in_box = |p: &[i64]| p.iter().zip(lo).zip(hi).all(|((x, l), h)| l <= x && x <= h);
    let mut outside = 0i64;
    let mut uncovered = 0i64;
    let mut seen_box_prefixes = 0i64;
    for (p, mut intervals) in fibres {
        intervals.sort_unstable();
        let mut union: Vec<(i64, i64)> = Vec::new();
        for (a, b) in intervals {
            match union.last_mut() {
                Some(last) if a <= last.1 + 1 => last.1 = last.1.max(b),
                _ => union.push((a, b)),
            }
        }
        let total: i64 = union.iter().map(|(a, b)| b - a + 1).sum();
        if in_box(&p) {
            seen_box_prefixes += 1;
            let inside: i64 = union
                .iter()
                .map(|&(a, b)| (b.min(zhi) - a.max(zlo) + 1).max(0))
                .sum();
            outside += total - inside;
            uncovered += fibre_len - inside;
        } else {
            outside += total;
        }
    }
    let box_prefixes: i64 = lo[..last].iter().zip(&hi[..last]).map(|(l, h)| h - l + 1).product();
    uncovered += (box_prefixes - seen_box_prefixes) * fibre_len;
    (outside + uncovered) as u64
}
