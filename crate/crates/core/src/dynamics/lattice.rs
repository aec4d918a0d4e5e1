use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};

use crate::error::{Error, Result};

pub const MAX_DIMENSION: usize = 6;
pub const MAX_RADIUS: f64 = 40.0;

/// Exact `|{x ∈ Z^k : ‖x‖₂ ≤ R}|`.
///
/// Coordinates are enumerated one at a time; counts for the remaining
/// coordinates depend only on the remaining squared budget and are memoised.
pub fn count_lattice_ball(k: usize, radius: f64) -> Result<u64> {
    if k == 0 || k > MAX_DIMENSION {
        return Err(Error::TooLarge(format!("dimension {k} outside 1..={MAX_DIMENSION}")));
    }
    if !(0.0..=MAX_RADIUS).contains(&radius) {
        return Err(Error::TooLarge(format!("radius {radius} outside [0, {MAX_RADIUS}]")));
    }
    // Σ x_i² ≤ R² ⇔ Σ x_i² ≤ ⌊R²⌋ for integer points; R² taken exactly.
    let r = BigRational::from_f64(radius).expect("finite radius");
    let budget = (&r * &r).floor().to_integer().to_usize().expect("bounded radius");
    // table[b] = points of the current dimension with squared norm ≤ b
    let mut table: Vec<u64> = (0..=budget).map(|b| 2 * isqrt(b) + 1).collect();
    for _ in 1..k {
        table = (0..=budget)
            .map(|b| {
                let m = isqrt(b) as i64;
                (-m..=m).map(|x| table[b - (x * x) as usize]).sum()
            })
            .collect();
    }
    Ok(table[budget])
}

fn isqrt(b: usize) -> u64 {
    let mut s = (b as f64).sqrt() as u64;
    while s * s > b as u64 {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= b as u64 {
        s += 1;
    }
    s
}

/// `Γ(k/2 + 1)` for integer `k ≥ 0`.
fn gamma_half_integer_plus_one(k: usize) -> f64 {
    if k % 2 == 0 {
        (1..=k / 2).map(|i| i as f64).product()
    } else {
        // Γ(m + 1/2) = √π · Π_{i=1}^{m} (i − 1/2), with m = (k + 1)/2
        let m = k.div_ceil(2);
        std::f64::consts::PI.sqrt() * (1..=m).map(|i| i as f64 - 0.5).product::<f64>()
    }
}

/// Volume of the `k`-ball of radius `r`.
pub fn ball_volume(k: usize, r: f64) -> f64 {
    std::f64::consts::PI.powf(k as f64 / 2.0) * r.powi(k as i32) / gamma_half_integer_plus_one(k)
}

/// `π^{k/2}(R + √k)^k / Γ(k/2 + 1)`: unit cubes anchored at counted points
/// lie in the ball of radius `R + √k`.
pub fn lattice_ball_bound(k: usize, radius: f64) -> f64 {
    ball_volume(k, radius + (k as f64).sqrt())
}
