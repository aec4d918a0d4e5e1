use std::str::FromStr;

use anyhow::{bail, Result};
use fkdet::{
    certify_invertible, circulant_logdet, entropy_finite_group, extremal_count, fk_finite_sections,
    fk_poly_trace, format_sig, l1_growth, mahler_grid, mahler_roots, padded_interval, perturbation_study,
    quasitile, quotient_order, rational_to_f64, snf, solve_dual_finite, CertificateMethod, ConvergenceTable,
    CountMode, Evidence, GroupDescriptor, InvertibilityCertificate, LaurentPoly, PNorm, RingElement,
    TileMode,
};

use crate::input::{load_element, load_matrix, parse_box, parse_pair, schedule};
use crate::table::Table;
use crate::{CertMethod, Cli, Command, DetMethod, ElementArgs, EvidenceArgs, MahlerMethod, Mode, TilingMode};

pub fn run(cli: &Cli) -> Result<String> {
    let table = match &cli.command {
        Command::Mahler { element, method, grid } => mahler(element, *method, *grid)?,
        Command::Fkdet {
            element,
            method,
            schedule,
            degree,
            interval,
            evidence,
        } => fk(element, *method, schedule, *degree, interval.as_deref(), evidence)?,
        Command::Snf { matrix } => snf_table(matrix)?,
        Command::EntropyFinite { element, solutions } => {
            let f = element_of(element)?;
            if let Some(limit) = solutions {
                let set = solve_dual_finite(&f, f.descriptor())?;
                if cli.format == crate::Format::Csv {
                    return Ok(set.to_csv(*limit)?);
                }
                solutions_table(&set, *limit)?
            } else {
                entropy(&f)?
            }
        }
        Command::Separated { element, eps, p, mode } => separated(element, *eps, p, *mode)?,
        Command::Quasitile {
            group,
            window,
            tiles,
            eps,
            mode,
        } => tiling(group, window, tiles, *eps, *mode)?,
        Command::Perturb {
            element,
            schedule: levels,
            delta,
            seed,
            evidence,
        } => {
            let f = element_of(element)?;
            let ev = evidence_for(&f, evidence)?;
            convergence(&perturbation_study(&f, &schedule(&f, levels)?, *delta, *seed, ev)?)
        }
        Command::L1growth { k, f, group } => growth(*k, f.as_deref(), group.as_deref())?,
        Command::Certify { element, method, grid } => {
            let f = element_of(element)?;
            certificate_table(&certify(&f, *method, *grid)?)
        }
    };
    table.render(cli.format)
}

fn element_of(args: &ElementArgs) -> Result<RingElement> {
    load_element(&args.f, args.group.as_deref())
}

fn mahler(args: &ElementArgs, method: MahlerMethod, grid: usize) -> Result<Table> {
    let f = element_of(args)?;
    Ok(match method {
        MahlerMethod::Roots => {
            let mut t = Table::new(&["method", "value"]);
            t.push(vec!["roots".into(), format_sig(mahler_roots(&LaurentPoly::new(f)?)?)]);
            t
        }
        MahlerMethod::Grid => {
            let g = mahler_grid(&f, grid)?;
            if g.defects > 0 {
                eprintln!("warning: {} grid points below the defect threshold were skipped", g.defects);
            }
            let mut t = Table::new(&["method", "grid", "points", "defects", "value", "circulant"]);
            let circ = circulant_logdet(&f, grid).map(format_sig).unwrap_or_else(|_| "".into());
            t.push(vec![
                "grid".into(),
                g.grid.to_string(),
                g.points.to_string(),
                g.defects.to_string(),
                format_sig(g.value),
                circ,
            ]);
            t
        }
    })
}

fn certify(f: &RingElement, method: CertMethod, grid: usize) -> Result<InvertibilityCertificate> {
    let methods = match method {
        CertMethod::Auto => {
            let mut m = vec![CertificateMethod::PositiveGap, CertificateMethod::L1Neumann];
            if matches!(f.descriptor(), GroupDescriptor::IntegerLattice(_)) {
                m.push(CertificateMethod::TorusMin { grid });
            }
            m
        }
        CertMethod::TorusMin => vec![CertificateMethod::TorusMin { grid }],
        CertMethod::L1Neumann => vec![CertificateMethod::L1Neumann],
        CertMethod::PositiveGap => vec![CertificateMethod::PositiveGap],
    };
    let mut reasons = Vec::new();
    for m in methods {
        match certify_invertible(f, m) {
            Ok(c) => return Ok(c),
            Err(fkdet::Error::NotCertifiable(r)) => reasons.push(format!("{}: {r}", m.name())),
            Err(e) => return Err(e.into()),
        }
    }
    Err(fkdet::Error::NotCertifiable(reasons.join("; ")).into())
}

fn evidence_for(f: &RingElement, args: &EvidenceArgs) -> Result<Evidence> {
    if args.assume_invertible {
        eprintln!("note: invertibility asserted, not certified");
        return Ok(Evidence::Asserted);
    }
    Ok(Evidence::Certified(certify(f, args.certify, CertificateMethod::DEFAULT_GRID)?))
}

fn convergence(t: &ConvergenceTable) -> Table {
    let mut out = Table::new(&["n", "window_size", "boundary_ratio", "value", "method"]);
    for r in &t.rows {
        if r.defect {
            eprintln!("warning: section n = {} is numerically singular", r.n);
        }
        out.push(vec![
            r.n.to_string(),
            r.window_size.to_string(),
            format_sig(rational_to_f64(&r.boundary_ratio)),
            format_sig(r.value),
            r.method.clone(),
        ]);
    }
    out
}

fn fk(
    args: &ElementArgs,
    method: DetMethod,
    levels: &str,
    degree: usize,
    interval: Option<&str>,
    evidence: &EvidenceArgs,
) -> Result<Table> {
    let f = element_of(args)?;
    match method {
        DetMethod::Sections => {
            let ev = evidence_for(&f, evidence)?;
            Ok(convergence(&fk_finite_sections(&f, &schedule(&f, levels)?, ev)?))
        }
        DetMethod::Poly => {
            let (a, b) = match interval {
                Some(s) => parse_pair(s)?,
                None => {
                    if evidence.assume_invertible {
                        bail!(fkdet::Error::Precondition(
                            "the polynomial trace needs --interval when certification is skipped".into()
                        ));
                    }
                    let cert = certify(&f, evidence.certify, CertificateMethod::DEFAULT_GRID)?;
                    padded_interval(cert.sigma_min_lower, f.l1_norm_f64())
                }
            };
            let e = fk_poly_trace(&f, a, b, degree)?;
            let mut t = Table::new(&["method", "degree", "interval_lo", "interval_hi", "value", "error_bound"]);
            t.push(vec![
                "poly".into(),
                e.degree.to_string(),
                format_sig(e.interval.0),
                format_sig(e.interval.1),
                format_sig(e.value),
                format_sig(e.error_bound),
            ]);
            Ok(t)
        }
    }
}

fn snf_table(path: &str) -> Result<Table> {
    let m = load_matrix(path)?;
    let r = snf(&m)?;
    let mut t = Table::new(&["divisors", "order"]);
    let divisors: Vec<String> = r.divisors.iter().map(ToString::to_string).collect();
    t.push(vec![divisors.join(","), quotient_order(&r).to_string()]);
    Ok(t)
}

fn entropy(f: &RingElement) -> Result<Table> {
    let e = entropy_finite_group(f, f.descriptor())?;
    let mut t = Table::new(&[
        "value",
        "group_order",
        "solution_count",
        "quotient_order",
        "determinant",
        "logabsdet",
    ]);
    t.push(vec![
        format_sig(e.value),
        e.group_order.to_string(),
        e.solution_count.to_string(),
        e.quotient_order.to_string(),
        e.determinant.to_string(),
        format_sig(e.logabsdet),
    ]);
    Ok(t)
}

fn solutions_table(set: &fkdet::DualSolutionSet, limit: usize) -> Result<Table> {
    let mut t = Table::new(&["index", "coordinates"]);
    for (i, h) in set.enumerate(limit)?.iter().enumerate() {
        t.push(vec![i.to_string(), h.formatted().join(" ")]);
    }
    Ok(t)
}

fn separated(args: &ElementArgs, eps: Option<f64>, p: &str, mode: Mode) -> Result<Table> {
    let f = element_of(args)?;
    let p = PNorm::from_str(p)?;
    let eps = eps.unwrap_or_else(|| fkdet::default_epsilon(f.l1_norm_f64()));
    let set = solve_dual_finite(&f, f.descriptor())?;
    let all = f.descriptor().finite_elements()?;
    let mode = match mode {
        Mode::Separated => CountMode::Separated,
        Mode::Spanning => CountMode::Spanning,
    };
    let c = extremal_count(&set, &all, p, eps, mode)?;
    let mut t = Table::new(&["mode", "p", "epsilon", "count", "greedy", "points"]);
    let p_name = match p {
        PNorm::L1 => "1",
        PNorm::L2 => "2",
        PNorm::LInf => "inf",
    };
    let mode_name = match mode {
        CountMode::Separated => "separated",
        CountMode::Spanning => "spanning",
    };
    t.push(vec![
        mode_name.into(),
        p_name.into(),
        format_sig(eps),
        c.count.to_string(),
        c.greedy.to_string(),
        c.points.to_string(),
    ]);
    Ok(t)
}

fn tiling(group: &str, window: &str, tiles: &str, eps: f64, mode: TilingMode) -> Result<Table> {
    let g = GroupDescriptor::from_str(group)?;
    let window = parse_box(&g, window)?;
    let tiles = tiles.split(';').map(|s| parse_box(&g, s.trim())).collect::<Result<Vec<_>>>()?;
    let mode = match mode {
        TilingMode::Pairwise => TileMode::PairwiseDisjoint,
        TilingMode::Epsilon => TileMode::EpsilonDisjoint,
    };
    let t = quasitile(&window, &tiles, eps, mode)?;
    eprintln!(
        "coverage {} ({}){}",
        t.coverage,
        format_sig(rational_to_f64(&t.coverage)),
        if t.meets_target() { "" } else { ", below the 1 - eps target" }
    );
    let mut out = Table::new(&["tile_index", "center_coordinates"]);
    for p in &t.placements {
        let c: Vec<String> = p.center.coords().iter().map(i64::to_string).collect();
        out.push(vec![p.tile.to_string(), c.join(" ")]);
    }
    Ok(out)
}

fn growth(k: u32, f: Option<&str>, group: Option<&str>) -> Result<Table> {
    let f = match f {
        Some(src) => load_element(src, group)?,
        None => RingElement::free_growth_example(),
    };
    let mut t = Table::new(&["k", "l1_norm", "support_size", "no_cancellation"]);
    for r in l1_growth(&f, k) {
        let l1 = match r.l1_norm.to_rational() {
            Some(q) if q.is_integer() => q.to_integer().to_string(),
            Some(q) => q.to_string(),
            None => format_sig(r.l1_norm.abs_f64()),
        };
        t.push(vec![r.k.to_string(), l1, r.support_size.to_string(), r.no_cancellation.to_string()]);
    }
    Ok(t)
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

fn certificate_table(c: &InvertibilityCertificate) -> Table {
    let mut t = Table::new(&[
        "method",
        "sigma_min_lower",
        "inverse_norm_upper",
        "inverse_l1_upper",
        "spectrum_lo",
        "spectrum_hi",
    ]);
    t.push(vec![
        c.method.name().into(),
        format_sig(c.sigma_min_lower),
        opt(c.inverse_norm_upper),
        opt(c.inverse_l1_upper),
        opt(c.spectrum.map(|s| s.0)),
        opt(c.spectrum.map(|s| s.1)),
    ]);
    t
}
