//! Perturbed compressions built from a quasitiling.
//!
//! On each tile `W` with interior `W' = {g ∈ W : K_f·g ⊆ W}`, the vectors
//! `f·δ_g` (`g ∈ W'`) live in `C[W]`. Their orthogonal complement gets an
//! exact rational orthogonal basis, scaled so that the transfer map
//! `T̃ : C[W \ W'] → (f·C[W'])^⊥` and its inverse both have norm at most 2.
//! The perturbed matrix `S` agrees with `f_F` on the tiled interiors, places
//! the translated transfer maps on the tile complements and is the identity
//! on the uncovered rest of `F`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dynamics::{quasitile, TileMode, Tiling};
use crate::error::{Error, Result};
use crate::groups::{FolnerWindow, GroupElement};
use crate::linalg::exact_rank;
use crate::ring::{rational_to_f64, RingElement, Scalar, ScalarDomain};
use crate::sections::{compress, CompressionMatrix};

/// The transfer map of one tile shape.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMap {
    pub tile: usize,
    /// `W \ W'` in tile order: the domain basis.
    pub domain: Vec<GroupElement>,
    /// Images `T̃δ_w`, as coordinate vectors over the tile in tile order;
    /// pairwise orthogonal.
    pub vectors: Vec<Vec<BigRational>>,
    /// Least common denominator `M_j` of all image coordinates.
    pub denominator: BigInt,
    /// `‖T̃‖` (largest image norm).
    pub norm: f64,
    /// `‖T̃⁻¹‖` (inverse of the smallest image norm).
    pub inverse_norm: f64,
}

impl TransferMap {
    /// `T̃x` for `x` over the domain basis.
    pub fn apply(&self, x: &[BigInt]) -> Vec<BigRational> {
        let len = self.vectors.first().map_or(0, Vec::len);
        let mut out = vec![BigRational::zero(); len];
        for (xi, v) in x.iter().zip(&self.vectors) {
            if xi.is_zero() {
                continue;
            }
            let xi = BigRational::from_integer(xi.clone());
            for (o, c) in out.iter_mut().zip(v) {
                *o += &xi * c;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedCompression {
    /// `S_F`, exact rational, indexed like the window.
    pub matrix: CompressionMatrix,
    /// `rank(S_F − f_F)`, exact.
    pub rank_defect: usize,
    /// `M = Π M_j` over the tile shapes used.
    pub denominator: BigInt,
    pub tiling: Tiling,
    /// One entry per tile shape (`None` for shapes never placed).
    pub transfers: Vec<Option<TransferMap>>,
    /// Window positions of the tiled interiors `F'`.
    pub interior: Vec<usize>,
}

impl PerturbedCompression {
    /// `(1/|F|) log|det S_F|`.
    pub fn value(&self) -> f64 {
        self.matrix.logabsdet() / self.matrix.size() as f64
    }
}

/// Reduced row echelon null space of `rows` (each row a linear form).
fn null_space(rows: &[Vec<BigRational>], width: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = BigRational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let k = m[i][c].clone();
                let (head, tail) = if i < r { let (a, b) = m.split_at_mut(r); (&mut a[i], &b[0]) } else { let (a, b) = m.split_at_mut(i); (&mut b[0], &a[r]) };
                for (x, y) in head.iter_mut().zip(tail) {
                    *x -= &k * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![BigRational::zero(); width];
            v[fc] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][fc].clone();
            }
            v
        })
        .collect()
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact Gram–Schmidt (orthogonal, not normalised).
fn orthogonalize(vectors: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let mut out: Vec<Vec<BigRational>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for u in &out {
            let k = dot(&v, u) / dot(u, u);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= &k * y;
            }
        }
        out.push(v);
    }
    out
}

/// Scales `v` by a rational close to `1/‖v‖` so that `1 ≤ ‖v‖ < 2`.
fn unitize(v: Vec<BigRational>) -> Vec<BigRational> {
    let sq = dot(&v, &v);
    let n = sq.numer() * sq.denom();
    let s = n.sqrt().max(BigInt::one());
    // ‖v·q/s‖² = p·q/s² ∈ [1, 4)
    let k = BigRational::new(sq.denom().clone(), s);
    v.into_iter().map(|x| x * &k).collect()
}

fn transfer_map(f: &RingElement, tile_index: usize, tile: &FolnerWindow) -> Result<TransferMap> {
    let kernel = f.kernel();
    let interior = tile.interior(&kernel);
    let m = compress(f, tile)?;
    let forms: Vec<Vec<BigRational>> = interior
        .iter()
        .map(|g| {
            let col = tile.position(g).expect("interior ⊆ tile");
            (0..tile.len())
                .map(|row| m.get(row, col).to_rational().expect("exact"))
                .collect()
        })
        .collect();
    let complement = orthogonalize(null_space(&forms, tile.len()));
    let domain: Vec<GroupElement> = tile.iter().filter(|g| !interior.contains(g)).collect();
    if complement.len() != domain.len() {
        return Err(Error::Precondition(format!(
            "tile {tile_index}: f·C[W'] has dimension {} < |W'| = {}",
            tile.len() - complement.len(),
            interior.len()
        )));
    }
    let vectors: Vec<Vec<BigRational>> = complement.into_iter().map(unitize).collect();
    let denominator = vectors
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let norms: Vec<f64> = vectors.iter().map(|v| rational_to_f64(&dot(v, v)).sqrt()).collect();
    Ok(TransferMap {
        tile: tile_index,
        domain,
        vectors,
        denominator,
        norm: norms.iter().copied().fold(0.0, f64::max),
        inverse_norm: norms.iter().copied().fold(0.0, |acc, n| acc.max(1.0 / n)),
    })
}

/// Pairwise-disjoint tiling used for the construction; `ε` only matters for
/// epsilon-disjoint tilings.
const TILING_EPSILON: f64 = 0.25;

/// Builds `S_F` for an integer element `f` from tiles whose interiors satisfy
/// `|W'_j| ≥ (1 − ε/2)|W_j|`.
pub fn build_perturbed_compression(
    f: &RingElement,
    window: &FolnerWindow,
    tiles: &[FolnerWindow],
    epsilon: f64,
) -> Result<PerturbedCompression> {
    if f.domain() != ScalarDomain::ExactInteger {
        return Err(Error::ScalarDomainMismatch(format!(
            "perturbed compressions need integer coefficients, got {}",
            f.domain()
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Precondition(format!("ε = {epsilon} must be positive")));
    }
    let kernel = f.kernel();
    for (j, t) in tiles.iter().enumerate() {
        let inner = t.interior(&kernel).len() as f64;
        if inner < (1.0 - epsilon / 2.0) * t.len() as f64 {
            return Err(Error::Precondition(format!(
                "tile {j}: interior has {inner} of {} elements, below (1 − ε/2)|W|",
                t.len()
            )));
        }
    }
    let tiling = quasitile(window, tiles, TILING_EPSILON, TileMode::PairwiseDisjoint)?;
    let d = window.descriptor();
    let mut transfers: Vec<Option<TransferMap>> = vec![None; tiles.len()];
    for p in &tiling.placements {
        if transfers[p.tile].is_none() {
            transfers[p.tile] = Some(transfer_map(f, p.tile, &tiles[p.tile])?);
        }
    }

    #[derive(Clone)]
    enum Column {
        Free,
        Interior,
        Transfer { placement: usize, index: usize },
    }
    let n = window.len();
    let mut kind = vec![Column::Free; n];
    for (pi, p) in tiling.placements.iter().enumerate() {
        let tile = &tiles[p.tile];
        let t = transfers[p.tile].as_ref().expect("built above");
        for w in tile.iter() {
            let pos = window.position(&d.mul(&w, &p.center)).expect("tile inside window");
            kind[pos] = match t.domain.iter().position(|x| *x == w) {
                Some(index) => Column::Transfer { placement: pi, index },
                None => Column::Interior,
            };
        }
    }

    let base = compress(f, window)?;
    let to_rat = |s: Scalar| Scalar::Rat(s.to_rational().expect("exact"));
    let mut entries: Vec<(usize, usize, Scalar)> = base
        .entries()
        .into_iter()
        .filter(|(_, c, _)| matches!(kind[*c], Column::Interior))
        .map(|(r, c, v)| (r, c, to_rat(v)))
        .collect();
    for (col, k) in kind.iter().enumerate() {
        match k {
            Column::Free => entries.push((col, col, Scalar::Rat(BigRational::one()))),
            Column::Interior => {}
            Column::Transfer { placement, index } => {
                let p = &tiling.placements[*placement];
                let tile = &tiles[p.tile];
                let v = &transfers[p.tile].as_ref().expect("built").vectors[*index];
                for (w, c) in tile.iter().zip(v) {
                    if !c.is_zero() {
                        let row = window.position(&d.mul(&w, &p.center)).expect("inside");
                        entries.push((row, col, Scalar::Rat(c.clone())));
                    }
                }
            }
        }
    }
    let matrix = CompressionMatrix::from_entries(window.clone(), ScalarDomain::ExactRational, entries)?;
    let denominator: BigInt = transfers
        .iter()
        .flatten()
        .map(|t| t.denominator.clone())
        .product();

    // rank(S − f_F): only the non-interior columns differ.
    let changed: Vec<usize> = (0..n).filter(|&c| !matches!(kind[c], Column::Interior)).collect();
    let m_rat = BigRational::from_integer(denominator.clone());
    let diff: Vec<Vec<BigInt>> = (0..n)
        .map(|r| {
            changed
                .iter()
                .map(|&c| {
                    let s = matrix.get(r, c).to_rational().expect("exact");
                    let b = base.get(r, c).to_rational().expect("exact");
                    let scaled = (s - b) * &m_rat;
                    debug_assert!(scaled.is_integer());
                    scaled.to_integer()
                })
                .collect()
        })
        .collect();
    let rank_defect = if changed.is_empty() { 0 } else { exact_rank(&diff) };
    let interior = (0..n).filter(|&c| matches!(kind[c], Column::Interior)).collect();
    Ok(PerturbedCompression {
        matrix,
        rank_defect,
        denominator,
        tiling,
        transfers,
        interior,
    })
}
