use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::groups::{FolnerWindow, GroupElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TileMode {
    /// A new translate may overlap covered points in fewer than `ε|F_j|`
    /// places.
    EpsilonDisjoint,
    /// Translates are pairwise disjoint.
    PairwiseDisjoint,
}

/// One accepted translate `F_j·c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Placement {
    pub tile: usize,
    pub center: GroupElement,
}

/// A greedy quasitiling of a window by right translates of tiles.
#[derive(Clone, Debug, PartialEq)]
pub struct Tiling {
    pub window: FolnerWindow,
    pub tiles: Vec<FolnerWindow>,
    /// Accepted translates in placement order.
    pub placements: Vec<Placement>,
    pub mode: TileMode,
    pub epsilon: f64,
    /// `|∪ F_j D_j| / |F|`, exact.
    pub coverage: BigRational,
}

impl Tiling {
    /// Centre set `D_j` of tile `j`.
    pub fn centers(&self, tile: usize) -> Vec<GroupElement> {
        self.placements
            .iter()
            .filter(|p| p.tile == tile)
            .map(|p| p.center.clone())
            .collect()
    }

    /// Whether the coverage reaches `1 − ε`.
    pub fn meets_target(&self) -> bool {
        let target = BigRational::from_float(1.0 - self.epsilon).expect("finite ε");
        self.coverage >= target
    }

    /// `tile_index,center_coordinates` rows; coordinates space-separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tile_index,center_coordinates\n");
        for p in &self.placements {
            let c: Vec<String> = p.center.coords().iter().map(i64::to_string).collect();
            out.push_str(&format!("{},{}\n", p.tile, c.join(" ")));
        }
        out
    }
}

/// Greedy quasitiling: tiles largest first, candidate centres `c = w₀⁻¹x`
/// for `x` in window order (with `w₀` the first element of the tile), a
/// translate accepted when it lies in `F` and its overlap with covered points
/// is 0 (pairwise) or below `ε|F_j|`. A coverage shortfall is reported in
/// the result, not treated as an error.
pub fn quasitile(
    window: &FolnerWindow,
    tiles: &[FolnerWindow],
    epsilon: f64,
    mode: TileMode,
) -> Result<Tiling> {
    if tiles.is_empty() {
        return Err(Error::Precondition("no tiles given".into()));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Precondition(format!("ε = {epsilon} outside (0, 1/2)")));
    }
    let d = window.descriptor();
    if let Some(t) = tiles.iter().find(|t| t.descriptor() != d) {
        return Err(Error::DescriptorMismatch(format!(
            "tile over {} for a window over {d}",
            t.descriptor()
        )));
    }
    let mut order: Vec<usize> = (0..tiles.len()).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(tiles[j].len()));
    let mut covered = vec![false; window.len()];
    let mut placements = Vec::new();
    let mut positions = Vec::new();
    for j in order {
        let tile = tiles[j].elements();
        let w0_inv = d.inverse(&tile[0]);
        let budget = epsilon * tile.len() as f64;
        for x in window.iter() {
            let c = d.mul(&w0_inv, &x);
            positions.clear();
            let inside = tile.iter().all(|w| match window.position(&d.mul(w, &c)) {
                Some(p) => {
                    positions.push(p);
                    true
                }
                None => false,
            });
            if !inside {
                continue;
            }
            let overlap = positions.iter().filter(|&&p| covered[p]).count();
            let accept = match mode {
                TileMode::PairwiseDisjoint => overlap == 0,
                TileMode::EpsilonDisjoint => (overlap as f64) < budget,
            };
            if accept {
                for &p in &positions {
                    covered[p] = true;
                }
                placements.push(Placement { tile: j, center: c });
            }
        }
    }
    let count = covered.iter().filter(|c| **c).count();
    Ok(Tiling {
        window: window.clone(),
        tiles: tiles.to_vec(),
        placements,
        mode,
        epsilon,
        coverage: BigRational::new(BigInt::from(count), BigInt::from(window.len())),
    })
}
