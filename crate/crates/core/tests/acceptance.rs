//! Acceptance criteria, one test each. Every test prints a `[PASS]` or
//! `[FAIL]` line to stderr (uncaptured) before asserting.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use gcp::analysis::{
    crossing_threshold, fit_exponents, fit_exponents_joint, joint_collapse_cost, CollapseGroup,
    FitOptions,
};
use gcp::entanglement::{
    concurrence_of_theta, gcp_pair_concurrence, parallel_concurrence, series_concurrence,
    Concurrence, ThetaNorm,
};
use gcp::io;
use gcp::lattice::{Coord, Lattice, LatticeKind};
use gcp::paths::{bfs_path_counts, shortest_analytic, shortest_triangular, PathSummary, PathTable};
use gcp::percolation::{sweep, theta_grid, CurvePoint, PercolationCurve, Protocol, SweepConfig};

const SEED: u64 = 42;
const ENSEMBLES: usize = 1000;
const POINTS: usize = 101;

fn report(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[{tag}] {criterion}: {detail}");
}

fn sizes(kind: LatticeKind) -> &'static [usize] {
    match kind {
        LatticeKind::Square | LatticeKind::Triangular => &[6, 7, 8, 9, 10],
        LatticeKind::Hexagonal => &[4, 5, 6, 7],
    }
}

fn run(kind: LatticeKind, size: usize, protocol: Protocol) -> PercolationCurve {
    let lattice = Lattice::build(kind, size).unwrap();
    let table = (protocol == Protocol::Gcp).then(|| PathTable::build(&lattice).unwrap());
    let config = SweepConfig::new(
        protocol,
        theta_grid(0.0, 1.0, POINTS).unwrap(),
        ENSEMBLES,
        SEED,
    );
    sweep(&lattice, table.as_ref(), &config).unwrap()
}

type CurveSet = BTreeMap<LatticeKind, Vec<PercolationCurve>>;

/// GCP curves at the reference sizes, computed once and shared.
fn gcp_curves() -> &'static (CurveSet, Duration) {
    static CURVES: OnceLock<(CurveSet, Duration)> = OnceLock::new();
    CURVES.get_or_init(|| {
        let start = Instant::now();
        let set = LatticeKind::ALL
            .into_iter()
            .map(|k| {
                (
                    k,
                    sizes(k).iter().map(|&s| run(k, s, Protocol::Gcp)).collect(),
                )
            })
            .collect();
        (set, start.elapsed())
    })
}

#[test]
fn path_formula_oracle() {
    let start = Instant::now();
    let (mut pairs, mut mismatches) = (0usize, 0usize);
    for kind in [LatticeKind::Square, LatticeKind::Triangular] {
        for side in 3..=8 {
            let lattice = Lattice::build(kind, side).unwrap();
            for s in lattice.nodes() {
                let bfs = bfs_path_counts(&lattice, s).unwrap();
                for t in lattice.nodes() {
                    pairs += 1;
                    if shortest_analytic(&lattice, s, t).unwrap().unwrap() != bfs[t.index()] {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches == 0 && elapsed < Duration::from_secs(5);
    report(
        "path-formula oracle equivalence",
        pass,
        &format!("{mismatches} mismatches over {pairs} ordered pairs, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn appendix_worked_example() {
    let at = |x, y| Coord { x, y };
    let a = shortest_triangular(3, at(0, 1), at(2, 2)).unwrap();
    let b = shortest_triangular(3, at(0, 0), at(2, 2)).unwrap();
    let pass = a == PathSummary::new(2, 2) && b == PathSummary::new(2, 1);
    report(
        "appendix worked example",
        pass,
        &format!(
            "(0,1)->(2,2) = (l={}, n={}); (0,0)->(2,2) = (l={}, n={})",
            a.length, a.count, b.length, b.count
        ),
    );
    assert!(pass);
}

#[test]
fn concurrence_rules() {
    let cc = |v| Concurrence::new(v).unwrap();
    let tol = 1e-9;
    let series = series_concurrence(cc(0.9), 3).unwrap().value();
    let parallel = parallel_concurrence(cc(0.8), 2).unwrap().value();
    let pipeline = gcp_pair_concurrence(cc(0.9), PathSummary::new(3, 2))
        .unwrap()
        .value();
    let saturated = parallel_concurrence(cc(0.99), 2).unwrap().value();
    let identities = series_concurrence(cc(0.5), 0).is_err()
        && [0.0, 0.25, 0.6, 1.0].iter().all(|&v| {
            series_concurrence(cc(v), 1).unwrap().value() == v
                && parallel_concurrence(cc(v), 1).unwrap().value() == v
        });
    let composed = (1..6).all(|a| {
        (1..6).all(|b| {
            let joined = series_concurrence(cc(0.7), a + b).unwrap().value();
            let split = series_concurrence(cc(0.7), a).unwrap().value()
                * series_concurrence(cc(0.7), b).unwrap().value();
            (joined - split).abs() < tol
        })
    });
    let pass = identities
        && composed
        && (series - 0.729).abs() < tol
        && (parallel - 0.96).abs() < tol
        && (pipeline - 0.908_081_636_743_740_5).abs() < tol
        && saturated == 1.0;
    report(
        "concurrence-rule suite",
        pass,
        &format!("series {series:.12}, parallel {parallel:.12}, pipeline {pipeline:.12}, saturated {saturated}"),
    );
    assert!(pass);
}

#[test]
fn cep_sanity_anchor() {
    let start = Instant::now();
    let curves: Vec<_> = [8, 16, 32]
        .iter()
        .map(|&l| run(LatticeKind::Square, l, Protocol::Cep))
        .collect();
    let est = crossing_threshold(&curves).unwrap();
    let elapsed = start.elapsed();
    let pass = (est.theta_t - 0.667).abs() <= 0.03 && elapsed < Duration::from_secs(300);
    report(
        "CEP sanity anchor (square L=8,16,32)",
        pass,
        &format!(
            "theta_T = {:.4} +/- {:.4} (target 0.667 +/- 0.03), {elapsed:.1?}",
            est.theta_t, est.uncertainty
        ),
    );
    assert!(pass);
}

#[test]
fn gcp_thresholds() {
    let (curves, elapsed) = gcp_curves();
    let mut pass = *elapsed < Duration::from_secs(1800);
    let mut parts = Vec::new();
    for (kind, target) in [
        (LatticeKind::Square, 0.34),
        (LatticeKind::Triangular, 0.31),
        (LatticeKind::Hexagonal, 0.41),
    ] {
        let est = crossing_threshold(&curves[&kind]).unwrap();
        pass &= (est.theta_t - target).abs() <= 0.05;
        parts.push(format!(
            "{kind} {:.4}+/-{:.4} (target {target})",
            est.theta_t, est.uncertainty
        ));
    }
    report(
        "GCP thresholds",
        pass,
        &format!("{}; sweeps {elapsed:.1?}", parts.join(", ")),
    );
    assert!(pass);
}

fn synthetic(n: usize, nu: f64, beta: f64, c_th: f64) -> PercolationCurve {
    let nf = n as f64;
    PercolationCurve {
        kind: LatticeKind::Square,
        node_count: n,
        protocol: Protocol::Gcp,
        ensembles: 1,
        seed: 0,
        points: theta_grid(0.0, 1.0, POINTS)
            .unwrap()
            .into_iter()
            .map(|t| {
                let c = concurrence_of_theta(t).value();
                let x = (c - c_th) * nf.powf(1.0 / (2.0 * nu));
                CurvePoint {
                    theta: t.value(),
                    c,
                    p_mean: nf.powf(-beta / (2.0 * nu)) / (1.0 + (-x).exp()),
                    p_stderr: 0.0,
                }
            })
            .collect(),
    }
}

#[test]
fn universality_class() {
    let (curves, _) = gcp_curves();
    let thresholds: Vec<Concurrence> = curves
        .values()
        .map(|c| {
            concurrence_of_theta(ThetaNorm::new(crossing_threshold(c).unwrap().theta_t).unwrap())
        })
        .collect();
    let groups: Vec<CollapseGroup<'_>> = curves
        .values()
        .zip(&thresholds)
        .map(|(curves, &c_th)| CollapseGroup { curves, c_th })
        .collect();
    let options = FitOptions::default();
    let fit = fit_exponents_joint(&groups, &options).unwrap();
    let at_class = joint_collapse_cost(&groups, 4.0 / 3.0, 5.0 / 36.0, &options.collapse).unwrap();
    let ratio = at_class / fit.cost;
    let ratio_ok = ratio <= 2.0;
    let nu_ok = (1.0..=1.7).contains(&fit.nu);
    let beta_ok = (0.06..=0.16).contains(&fit.beta);

    let mut recovered = true;
    let mut planted = Vec::new();
    for (nu, beta) in [(4.0 / 3.0, 5.0 / 36.0), (1.0, 0.08)] {
        let set: Vec<_> = [36, 49, 64, 81, 100]
            .iter()
            .map(|&n| synthetic(n, nu, beta, 0.5))
            .collect();
        let f = fit_exponents(&set, Concurrence::new(0.5).unwrap(), &options).unwrap();
        recovered &= (f.nu - nu).abs() <= 0.05 && (f.beta - beta).abs() <= 0.02;
        planted.push(format!("({nu:.3},{beta:.3})->({:.3},{:.3})", f.nu, f.beta));
    }

    let pass = ratio_ok && nu_ok && beta_ok && recovered;
    report(
        "universality class",
        pass,
        &format!(
            "fit nu = {:.3} [{}], beta = {:.3} [{}], cost(4/3, 5/36) / min = {ratio:.2} [{}]; synthetic {} [{}]",
            fit.nu,
            if nu_ok { "ok" } else { "outside 1.0..1.7" },
            fit.beta,
            if beta_ok { "ok" } else { "outside 0.06..0.16" },
            if ratio_ok { "ok" } else { "above 2" },
            planted.join(" "),
            if recovered { "ok" } else { "missed" },
        ),
    );
    assert!(pass);
}

#[test]
fn collapse_rejects_wrong_exponents() {
    let (curves, _) = gcp_curves();
    let thresholds: Vec<Concurrence> = curves
        .values()
        .map(|c| {
            concurrence_of_theta(ThetaNorm::new(crossing_threshold(c).unwrap().theta_t).unwrap())
        })
        .collect();
    let groups: Vec<CollapseGroup<'_>> = curves
        .values()
        .zip(&thresholds)
        .map(|(curves, &c_th)| CollapseGroup { curves, c_th })
        .collect();
    let options = FitOptions::default().collapse;
    let good = joint_collapse_cost(&groups, 1.34, 0.115, &options).unwrap();
    let bad = joint_collapse_cost(&groups, 2.5, 0.5, &options).unwrap();
    assert!(bad >= 5.0 * good, "{bad} vs {good}");
}

fn monotone(c: &PercolationCurve) -> bool {
    c.points.iter().enumerate().all(|(i, a)| {
        c.points[i + 1..]
            .iter()
            .all(|b| b.p_mean >= a.p_mean - 3.0 * (a.p_stderr.powi(2) + b.p_stderr.powi(2)).sqrt())
    })
}

#[test]
fn monotonicity_and_dominance() {
    let (curves, _) = gcp_curves();
    let (mut checked, mut non_monotone, mut violations) = (0, 0, 0);
    for (&kind, gcp) in curves {
        for (g, &size) in gcp.iter().zip(sizes(kind)) {
            let cep = run(kind, size, Protocol::Cep);
            checked += 2;
            non_monotone += usize::from(!monotone(g)) + usize::from(!monotone(&cep));
            violations += g
                .points
                .iter()
                .zip(&cep.points)
                .filter(|(a, b)| a.p_mean < b.p_mean)
                .count();
        }
    }
    let pass = non_monotone == 0 && violations == 0;
    report(
        "monotonicity and GCP >= CEP dominance",
        pass,
        &format!("{checked} curves, {non_monotone} non-monotone, {violations} pointwise GCP < CEP"),
    );
    assert!(pass);
}

#[test]
fn determinism_across_workers() {
    let bytes = |kind, protocol, workers| {
        let lattice = Lattice::build(kind, 6).unwrap();
        let table = (protocol == Protocol::Gcp).then(|| PathTable::build(&lattice).unwrap());
        let config = SweepConfig::new(protocol, theta_grid(0.0, 1.0, 51).unwrap(), 200, SEED)
            .workers(workers);
        let mut buf = Vec::new();
        io::write_curve(&mut buf, &sweep(&lattice, table.as_ref(), &config).unwrap()).unwrap();
        buf
    };
    let mut identical = true;
    for kind in LatticeKind::ALL {
        for protocol in [Protocol::Gcp, Protocol::Cep] {
            let one = bytes(kind, protocol, 1);
            identical &= [4, 8].iter().all(|&w| bytes(kind, protocol, w) == one);
        }
    }
    report(
        "determinism across worker counts",
        identical,
        &format!(
            "workers 1, 4, 8 {}",
            if identical {
                "byte-identical"
            } else {
                "differ"
            }
        ),
    );
    assert!(identical);
}
