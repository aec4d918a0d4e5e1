//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Reference values come from independent oracles written here (brute-force
//! coset and solution enumeration, exact rational elimination, closed-form
//! roots), never from the code under test.

use std::collections::HashSet;
use std::io::Write;
use std::time::{Duration, Instant};

use fkdet::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Prints the verdict line, then fails the test on a miss.
fn report(id: u32, title: &str, started: Instant, limit: Duration, failures: Vec<String>) {
    let elapsed = started.elapsed();
    let mut failures = failures;
    if elapsed > limit {
        failures.push(format!("runtime {elapsed:.2?} exceeds {limit:?}"));
    }
    // Written to the raw handle so the line shows even under output capture.
    let line = if failures.is_empty() {
        format!("criterion {id:>2} PASS  {title} ({elapsed:.2?})\n")
    } else {
        format!("criterion {id:>2} FAIL  {title} ({elapsed:.2?}): {}\n", failures.join("; "))
    };
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    if !failures.is_empty() {
        panic!("criterion {id} failed: {}", failures.join("; "));
    }
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn int_element(d: &GroupDescriptor, terms: &[(Vec<i64>, i64)]) -> RingElement {
    let refs: Vec<(&[i64], i64)> = terms.iter().map(|(g, c)| (g.as_slice(), *c)).collect();
    RingElement::integer(d.clone(), &refs).unwrap()
}

fn z1() -> GroupDescriptor {
    GroupDescriptor::IntegerLattice(1)
}

fn three_plus_u() -> RingElement {
    int_element(&z1(), &[(vec![0], 3), (vec![1], 1), (vec![-1], 1)])
}

/// `M = 3 + u + u⁻¹` on the circle has roots `(−3 ± √5)/2`; the measure is
/// `log` of the larger one in modulus.
fn three_plus_u_oracle() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).ln()
}

/// Exact determinant by rational Gaussian elimination.
fn rational_det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            let k = &m[i][c] / &m[c][c];
            for j in c..n {
                let sub = &k * &m[c][j];
                m[i][j] -= sub;
            }
        }
    }
    assert!(det.is_integer());
    det.to_integer()
}

fn full_window(d: &GroupDescriptor) -> FolnerWindow {
    FolnerWindow::from_elements(d.clone(), d.finite_elements().unwrap()).unwrap()
}

fn integer_matrix(f: &RingElement, w: &FolnerWindow) -> Vec<Vec<BigInt>> {
    let m = compress(f, w).unwrap();
    (0..m.size())
        .map(|r| (0..m.size()).map(|c| m.get(r, c).to_rational().unwrap().to_integer()).collect())
        .collect()
}

/// `M·h ∈ Zⁿ`, checked exactly on the integer vector `D·h`.
fn annihilated(m: &[Vec<i64>], h: &[BigRational], denominator: i64) -> bool {
    let scaled: Vec<i64> = h
        .iter()
        .map(|x| {
            let q = x.denom().to_i64().unwrap();
            assert!(denominator % q == 0, "coordinate {x} outside (1/D)Z");
            x.numer().to_i64().unwrap() * (denominator / q)
        })
        .collect();
    m.iter().all(|row| {
        let s: i128 = row.iter().zip(&scaled).map(|(&a, &x)| a as i128 * x as i128).sum();
        s % denominator as i128 == 0
    })
}

fn random_cyclic_group(rng: &mut ChaCha8Rng) -> GroupDescriptor {
    loop {
        let factors = rng.gen_range(1..=3);
        let moduli: Vec<u64> = (0..factors).map(|_| rng.gen_range(2..=8)).collect();
        if moduli.iter().product::<u64>() <= 24 {
            return GroupDescriptor::cyclic_product(moduli).unwrap();
        }
    }
}

/// `c·e + r` with `‖r‖₁ ≤ 3` and `|c| > ‖r‖₁`.
fn random_dominant(rng: &mut ChaCha8Rng, d: &GroupDescriptor) -> RingElement {
    let elements = d.finite_elements().unwrap();
    let mut terms: Vec<(Vec<i64>, i64)> = Vec::new();
    let mut budget: i64 = rng.gen_range(0..=3);
    while budget > 0 {
        let g = &elements[rng.gen_range(1..elements.len())];
        let c = rng.gen_range(1..=budget) * if rng.gen_bool(0.5) { 1 } else { -1 };
        budget -= c.abs();
        terms.push((g.coords().to_vec(), c));
    }
    let f = int_element(d, &terms);
    let r = f.l1_norm_f64() as i64;
    let c = rng.gen_range(r + 1..=r + 2) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let mut all = terms;
    all.push((d.identity().coords().to_vec(), c));
    int_element(d, &all)
}

#[test]
fn criterion_01_finite_group_equality_chain() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..25 {
        let d = random_cyclic_group(&mut rng);
        let f = random_dominant(&mut rng, &d);
        let w = full_window(&d);
        let m = integer_matrix(&f, &w);
        let det = rational_det(&m).abs();
        let set = solve_dual_finite(&f, &d).unwrap();
        let order = match quotient_order(set.snf()) {
            QuotientOrder::Finite(q) => q,
            QuotientOrder::Infinite => {
                failures.push(format!("trial {trial}: infinite quotient"));
                continue;
            }
        };
        check(&mut failures, set.count() == &det && order == det, || {
            format!("trial {trial} on {d}: |X_f| = {}, quotient {order}, det {det}", set.count())
        });
        // Enumerate and verify every solution whenever the set is listable.
        if det <= BigInt::from(DEFAULT_LIST_LIMIT) {
            let all = set.enumerate(DEFAULT_LIST_LIMIT).unwrap();
            let distinct: HashSet<Vec<BigRational>> =
                all.iter().map(|h| h.exact_coords().unwrap().to_vec()).collect();
            let small: Vec<Vec<i64>> =
                m.iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
            let dd = det.to_i64().unwrap();
            let ok = BigInt::from(distinct.len()) == det
                && distinct.iter().all(|h| annihilated(&small, h, dd))
                && distinct.iter().all(|h| h.iter().all(|x| !x.is_negative() && x < &BigRational::one()));
            check(&mut failures, ok, || format!("trial {trial}: enumeration disagrees with det {det}"));
        }
        let e = entropy_finite_group(&f, &d).unwrap();
        let expected = det.to_f64().unwrap().ln() / d.order().unwrap() as f64;
        check(&mut failures, (e.value - expected).abs() <= 1e-12, || {
            format!("trial {trial}: entropy {} vs {expected}", e.value)
        });
    }
    report(1, "finite-group equality chain", started, Duration::from_secs(10), failures);
}

#[test]
fn criterion_02_mahler_cross_check() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let f = three_plus_u();
    let oracle = three_plus_u_oracle();
    check(&mut failures, (oracle - 0.962423650119).abs() < 1e-11, || format!("oracle {oracle}"));
    let roots = mahler_roots(&LaurentPoly::new(f.clone()).unwrap()).unwrap();
    check(&mut failures, (roots - 0.962423650119).abs() <= 1e-9, || format!("mahler_roots {roots}"));
    let w = folner_window(&z1(), 1000).unwrap();
    let sections = fk_finite_sections(&f, &[w], Evidence::Asserted).unwrap();
    let v = sections.rows[0].value;
    check(&mut failures, (v - oracle).abs() <= 1e-2, || format!("sections n=1000: {v}"));
    let poly = fk_poly_trace(&f, 1.0, 25.0, 40).unwrap();
    check(&mut failures, (poly.value - oracle).abs() <= poly.error_bound, || {
        format!("poly trace {} ± {}", poly.value, poly.error_bound)
    });
    report(2, "Z cross-check: roots, sections, polynomial trace", started, Duration::from_secs(30), failures);
}

#[test]
fn criterion_03_grid_circulant_identity() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let z2 = GroupDescriptor::IntegerLattice(2);
    for trial in 0..10 {
        let mut terms: Vec<(Vec<i64>, i64)> = (0..rng.gen_range(1..=4))
            .map(|_| (vec![rng.gen_range(-2..=2), rng.gen_range(-2..=2)], rng.gen_range(-2..=2)))
            .filter(|(g, _)| g != &vec![0, 0])
            .collect();
        let r: i64 = terms.iter().map(|(_, c)| c.abs()).sum();
        terms.push((vec![0, 0], r + rng.gen_range(1..=3)));
        // Nonvanishing on the torus: the constant term dominates.
        let f = int_element(&z2, &terms);
        for n in [4, 8, 16] {
            let grid = mahler_grid(&f, n).unwrap().value;
            let circ = circulant_logdet(&f, n).unwrap();
            let scale = grid.abs().max(circ.abs()).max(f64::MIN_POSITIVE);
            check(&mut failures, (grid - circ).abs() <= 1e-9 * scale, || {
                format!("trial {trial}, N = {n}: grid {grid} vs circulant {circ}")
            });
        }
    }
    report(3, "torus grid equals circulant log-determinant", started, Duration::from_secs(30), failures);
}

/// `|Z³ / M Z³|` by enumerating coset representatives in `[0, D)³`; two
/// points are equivalent iff `adj(M)·(x − y) ≡ 0 (mod D)`.
fn brute_force_cosets(m: &[[i64; 3]; 3]) -> u64 {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det: i64 = (0..3).map(|j| m[0][j] * adj[j][0]).sum();
    let d = det.abs();
    let mut seen = HashSet::new();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let x = [a, b, c];
                let key: Vec<i64> =
                    (0..3).map(|i| (0..3).map(|j| adj[i][j] * x[j]).sum::<i64>().rem_euclid(d)).collect();
                seen.insert(key);
            }
        }
    }
    seen.len() as u64
}

#[test]
fn criterion_04_snf_oracle_equivalence() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut done = 0;
    while done < 50 {
        let mut m = [[0i64; 3]; 3];
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = rng.gen_range(-3..=3);
            }
        }
        let rows: Vec<Vec<i64>> = m.iter().map(|r| r.to_vec()).collect();
        let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect();
        if rational_det(&big).is_zero() {
            continue;
        }
        done += 1;
        let expected = brute_force_cosets(&m);
        let got = quotient_order(&snf_i64(&rows).unwrap());
        check(&mut failures, got == QuotientOrder::Finite(expected.into()), || {
            format!("{rows:?}: snf gives {got}, enumeration {expected}")
        });
    }
    report(4, "SNF quotient order equals coset enumeration", started, Duration::from_secs(10), failures);
}

#[test]
fn criterion_05_perturbation_invariance() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let f = three_plus_u();
    let w = folner_window(&z1(), 1000).unwrap();
    let values: Vec<f64> = [11u64, 29]
        .iter()
        .map(|&seed| {
            perturbation_study(&f, std::slice::from_ref(&w), 0.02, seed, Evidence::Asserted)
                .unwrap()
                .rows[0]
                .value
        })
        .collect();
    for v in &values {
        check(&mut failures, (v - 0.9624237).abs() <= 2e-2, || format!("perturbed value {v}"));
    }
    check(&mut failures, (values[0] - values[1]).abs() <= 4e-2, || format!("seeds disagree: {values:?}"));
    report(5, "perturbed sections stay near the determinant", started, Duration::from_secs(60), failures);
}

#[test]
fn criterion_06_multiplicativity_and_adjoint() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let random_poly = |rng: &mut ChaCha8Rng| {
        loop {
            let lo = rng.gen_range(-2..=0);
            let terms: Vec<(Vec<i64>, i64)> =
                (lo..=lo + rng.gen_range(1..=3)).map(|e| (vec![e], rng.gen_range(-3..=3))).collect();
            let f = int_element(&z1(), &terms);
            // keep polynomials with at least two terms and a nonzero constant term
            if f.support_size() >= 2 && !f.coefficient(&z1().identity()).is_zero() {
                return f;
            }
        }
    };
    for trial in 0..10 {
        let f = random_poly(&mut rng);
        let g = random_poly(&mut rng);
        let m = |p: &RingElement| mahler_roots(&LaurentPoly::new(p.clone()).unwrap()).unwrap();
        let fg = f.convolve(&g).unwrap();
        let (mf, mg, mfg) = (m(&f), m(&g), m(&fg));
        check(&mut failures, (mfg - mf - mg).abs() <= 1e-9, || {
            format!("trial {trial}: m(fg) = {mfg} vs {mf} + {mg}")
        });
        for n in [16, 64] {
            let a = mahler_grid(&f, n).unwrap();
            let b = mahler_grid(&f.adjoint(), n).unwrap();
            check(&mut failures, a.value.to_bits() == b.value.to_bits(), || {
                format!("trial {trial}, N = {n}: grid {} vs adjoint {}", a.value, b.value)
            });
        }
        let schedule: Vec<FolnerWindow> = [5, 20, 60].iter().map(|&n| folner_window(&z1(), n).unwrap()).collect();
        let a = fk_finite_sections(&f, &schedule, Evidence::Asserted).unwrap();
        let b = fk_finite_sections(&f.adjoint(), &schedule, Evidence::Asserted).unwrap();
        let same = a.rows.iter().zip(&b.rows).all(|(x, y)| x.value.to_bits() == y.value.to_bits());
        check(&mut failures, same, || format!("trial {trial}: section rows differ for f and f*"));
    }
    report(6, "multiplicativity and adjoint symmetry", started, Duration::from_secs(60), failures);
}

#[test]
fn criterion_07_separated_micro_entropy() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let d = GroupDescriptor::cyclic_product(vec![3]).unwrap();
    let f = int_element(&d, &[(vec![0], 2), (vec![1], 1)]);
    let set = solve_dual_finite(&f, &d).unwrap();
    let all = d.finite_elements().unwrap();
    let eps = default_epsilon(f.l1_norm_f64());
    check(&mut failures, (eps - 1.0 / 24.0).abs() < 1e-15, || format!("ε = {eps}"));
    let count = |p: PNorm, e: f64| extremal_count(&set, &all, p, e, CountMode::Separated).unwrap().count;
    let inf = count(PNorm::LInf, eps);
    check(&mut failures, inf == 9 && set.count() == &BigInt::from(9), || {
        format!("p = ∞: separated {inf}, |X_f| = {}", set.count())
    });
    for p in [PNorm::L1, PNorm::L2] {
        let c = count(p, eps);
        check(&mut failures, c <= 9, || format!("{p:?}: separated {c} > 9"));
        let small = count(p, 1e-3);
        check(&mut failures, small == 9, || format!("{p:?} at ε = 1e-3: {small}"));
    }
    report(7, "separated counts on Z/3 recover |X_f|", started, Duration::from_secs(5), failures);
}

/// Containment, disjointness and coverage recomputed from the placements.
fn verify_tiling(t: &Tiling) -> std::result::Result<BigRational, String> {
    let d = t.window.descriptor();
    let mut covered = HashSet::new();
    let mut total = 0usize;
    for p in &t.placements {
        for w in t.tiles[p.tile].iter() {
            let g = d.multiply(&w, &p.center).map_err(|e| e.to_string())?;
            if !t.window.contains(&g) {
                return Err(format!("{g:?} outside the window"));
            }
            total += 1;
            covered.insert(g);
        }
    }
    if t.mode == TileMode::PairwiseDisjoint && total != covered.len() {
        return Err("overlapping translates".into());
    }
    let ratio = BigRational::new(covered.len().into(), t.window.len().into());
    if ratio != t.coverage {
        return Err(format!("reported coverage {} vs recomputed {ratio}", t.coverage));
    }
    Ok(ratio)
}

#[test]
fn criterion_08_quasitiling_postconditions() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let z2 = GroupDescriptor::IntegerLattice(2);
    let bx = |d: &GroupDescriptor, lo: i64, hi: i64| {
        let k = d.arity().unwrap_or(1);
        FolnerWindow::coordinate_box(d.clone(), vec![lo; k], vec![hi; k]).unwrap()
    };
    let cases = [
        (bx(&z1(), 0, 99), vec![bx(&z1(), 0, 9)], TileMode::PairwiseDisjoint, BigRational::one()),
        (bx(&z2, 0, 99), vec![bx(&z2, 0, 9)], TileMode::PairwiseDisjoint, BigRational::one()),
        (
            bx(&z1(), 0, 99),
            vec![bx(&z1(), 0, 6), bx(&z1(), 0, 2)],
            TileMode::EpsilonDisjoint,
            BigRational::new(9.into(), 10.into()),
        ),
        (
            bx(&z1(), 0, 99),
            vec![bx(&z1(), 0, 6), bx(&z1(), 0, 2)],
            TileMode::PairwiseDisjoint,
            BigRational::new(9.into(), 10.into()),
        ),
    ];
    for (i, (window, tiles, mode, target)) in cases.iter().enumerate() {
        let t = quasitile(window, tiles, 0.1, *mode).unwrap();
        match verify_tiling(&t) {
            Ok(c) => check(&mut failures, &c >= target, || format!("case {i}: coverage {c} < {target}")),
            Err(e) => failures.push(format!("case {i}: {e}")),
        }
    }
    let t = quasitile(&cases[0].0, &cases[0].1, 0.1, TileMode::PairwiseDisjoint).unwrap();
    let centers: Vec<i64> = t.centers(0).iter().map(|c| c.coords()[0]).collect();
    check(&mut failures, centers == (0..10).map(|i| 10 * i).collect::<Vec<_>>(), || {
        format!("centers {centers:?}")
    });
    report(8, "quasitiling postconditions", started, Duration::from_secs(5), failures);
}

#[test]
fn criterion_09_lattice_ball_bound() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for k in 1..=4usize {
        for r in [1.0, 2.5, 5.0, 10.0] {
            let count = count_lattice_ball(k, r).unwrap();
            // brute-force oracle over the enclosing cube
            let m = r.floor() as i64;
            let mut brute = 0u64;
            let mut x = vec![-m; k];
            'outer: loop {
                if x.iter().map(|v| (v * v) as f64).sum::<f64>() <= r * r {
                    brute += 1;
                }
                for i in 0..k {
                    if x[i] < m {
                        x[i] += 1;
                        continue 'outer;
                    }
                    x[i] = -m;
                }
                break;
            }
            let gamma = |k: usize| -> f64 {
                // Γ(k/2 + 1) from Γ(1) = 1, Γ(1/2) = √π
                let mut g = if k % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
                let mut s = if k % 2 == 0 { 1.0 } else { 0.5 };
                while s <= k as f64 / 2.0 + 1e-9 {
                    g *= s;
                    s += 1.0;
                }
                g
            };
            let bound = std::f64::consts::PI.powf(k as f64 / 2.0) * (r + (k as f64).sqrt()).powi(k as i32) / gamma(k);
            check(&mut failures, count == brute, || format!("k = {k}, R = {r}: {count} vs brute {brute}"));
            check(&mut failures, (count as f64) <= bound, || format!("k = {k}, R = {r}: {count} > {bound}"));
        }
    }
    report(9, "lattice-ball counts under the volume bound", started, Duration::from_secs(10), failures);
}

#[test]
fn criterion_10_free_group_l1_growth() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let g = RingElement::free_growth_example();
    for row in l1_growth(&g, 6) {
        let expected = 3u64.pow(row.k);
        let l1 = row.l1_norm.to_rational().unwrap();
        check(&mut failures, l1 == BigRational::from_integer(expected.into()), || {
            format!("k = {}: ‖g^k‖₁ = {l1}", row.k)
        });
        // 3^k words with unit coefficients: the expanded products never collide.
        check(&mut failures, row.support_size as u64 == expected && row.no_cancellation, || {
            format!("k = {}: support {}", row.k, row.support_size)
        });
    }
    report(10, "free-group ℓ¹ growth 3^k", started, Duration::from_secs(5), failures);
}

#[test]
fn criterion_11_heisenberg_consistency() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let h = GroupDescriptor::Heisenberg3;
    let f = int_element(
        &h,
        &[
            (vec![0, 0, 0], 5),
            (vec![1, 0, 0], 1),
            (vec![-1, 0, 0], 1),
            (vec![0, 1, 0], 1),
            (vec![0, -1, 0], 1),
        ],
    );
    let cert = certify_invertible(&f, CertificateMethod::PositiveGap).unwrap();
    let (lo, hi) = cert.spectrum.unwrap();
    check(&mut failures, lo >= 1.0 - 1e-12 && hi <= 9.0 + 1e-12, || format!("spectrum [{lo}, {hi}]"));
    let schedule: Vec<FolnerWindow> = (4..=6).map(|n| folner_window(&h, n).unwrap()).collect();
    let table = fk_finite_sections(&f, &schedule, Evidence::Certified(cert)).unwrap();
    let values: Vec<f64> = table.rows.iter().map(|r| r.value).collect();
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            check(&mut failures, (values[i] - values[j]).abs() <= 5e-2, || {
                format!("sections {} and {} differ: {values:?}", i + 4, j + 4)
            });
        }
    }
    // f is positive with spectrum in [1, 9], so f*f has spectrum in [1, 81].
    let poly = fk_poly_trace(&f, 1.0, 81.0, DEFAULT_DEGREE).unwrap();
    for (n, v) in (4..).zip(&values) {
        check(&mut failures, (v - poly.value).abs() <= 5e-2 + poly.error_bound, || {
            format!("n = {n}: section {v} vs polynomial trace {} ± {}", poly.value, poly.error_bound)
        });
    }
    println!("    heisenberg sections {values:?}, polynomial trace {} ± {}", poly.value, poly.error_bound);
    report(11, "Heisenberg sections agree with the polynomial trace", started, Duration::from_secs(300), failures);
}

/// Documented Følner thresholds: the boundary ratio of `K_f` falls below 0.1
/// from these levels on.
const THRESHOLDS: [(&str, usize, usize); 3] = [("Z^1", 10, 60), ("Z^2", 20, 40), ("H3", 25, 30)];

#[test]
fn criterion_12_folner_sanity() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let lattice_generator = |d: usize| {
        let mut terms = vec![(vec![0; d], 2 * d as i64 + 1)];
        for i in 0..d {
            for s in [-1, 1] {
                let mut g = vec![0; d];
                g[i] = s;
                terms.push((g, 1));
            }
        }
        int_element(&GroupDescriptor::IntegerLattice(d), &terms)
    };
    let heisenberg = int_element(
        &GroupDescriptor::Heisenberg3,
        &[
            (vec![0, 0, 0], 5),
            (vec![1, 0, 0], 1),
            (vec![-1, 0, 0], 1),
            (vec![0, 1, 0], 1),
            (vec![0, -1, 0], 1),
        ],
    );
    let tenth = BigRational::new(1.into(), 10.into());
    for (name, from, to) in THRESHOLDS {
        let f = match name {
            "Z^1" => lattice_generator(1),
            "Z^2" => lattice_generator(2),
            _ => heisenberg.clone(),
        };
        let kernel = f.kernel();
        for n in from..=to {
            let w = folner_window(f.descriptor(), n).unwrap();
            let ratio = boundary_ratio(&w, &kernel).unwrap();
            check(&mut failures, ratio < tenth, || format!("{name} at n = {n}: ratio {ratio}"));
        }
        if from > 1 {
            let w = folner_window(f.descriptor(), from - 1).unwrap();
            let ratio = boundary_ratio(&w, &kernel).unwrap();
            println!("    {name}: ratio {} at n = {}, below 0.1 from n = {from}", ratio, from - 1);
        }
    }
    report(12, "Følner boundary ratios below 0.1 past the thresholds", started, Duration::from_secs(120), failures);
}
