//! Data collapse `P N^{β/dν} = f((c − c_th) N^{1/dν})` and its quality
//! function.
//!
//! The cost follows Houdayer and Hartmann: every transformed point is compared
//! with the master curve built from piecewise-linear interpolation of the
//! *other* curves at its abscissa, and the squared deviations are averaged
//! over all points that some other curve covers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::optimize::nelder_mead;
use crate::entanglement::{theta_of_concurrence, Concurrence};
use crate::error::{Error, Result};
use crate::lattice::LatticeKind;
use crate::percolation::PercolationCurve;

/// Spatial dimension of every lattice here.
pub const DIMENSION: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseOptions {
    /// Only points with `|θ − θ_th| <= theta_window` enter the cost, where
    /// `θ_th` corresponds to `c_th`. `None` keeps every point.
    pub theta_window: Option<f64>,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        CollapseOptions {
            theta_window: Some(0.1),
        }
    }
}

impl CollapseOptions {
    fn admits(&self, theta: f64, theta_th: f64) -> bool {
        self.theta_window
            .is_none_or(|w| (theta - theta_th).abs() <= w + 1e-12)
    }
}

/// Curves of one lattice kind sharing a threshold.
#[derive(Debug, Clone, Copy)]
pub struct CollapseGroup<'a> {
    pub curves: &'a [PercolationCurve],
    pub c_th: Concurrence,
}

/// One transformed point, for plotting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapsePoint {
    pub lattice: LatticeKind,
    #[serde(rename = "N")]
    pub node_count: usize,
    pub theta_norm: f64,
    pub x: f64,
    pub y: f64,
    pub in_window: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupFit {
    pub lattice: LatticeKind,
    pub c_th: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub nu: f64,
    pub beta: f64,
    /// Threshold concurrence; absent for a joint fit over several lattices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_th: Option<f64>,
    pub cost: f64,
    #[serde(default = "default_dimension")]
    pub d: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupFit>,
}

fn default_dimension() -> f64 {
    DIMENSION
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub nu_range: (f64, f64),
    pub nu_step: f64,
    pub beta_range: (f64, f64),
    pub beta_step: f64,
    pub collapse: CollapseOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            nu_range: (0.8, 2.0),
            nu_step: 0.02,
            beta_range: (0.0, 0.4),
            beta_step: 0.005,
            collapse: CollapseOptions::default(),
        }
    }
}

fn scale_exponents(nu: f64, beta: f64) -> Result<(f64, f64)> {
    if !(nu.is_finite() && nu > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!(
            "invalid exponents nu={nu}, beta={beta}"
        )));
    }
    Ok((1.0 / (DIMENSION * nu), beta / (DIMENSION * nu)))
}

/// `(x, y)` for the points of `curve` inside the window, in increasing `x`.
fn transform(
    curve: &PercolationCurve,
    nu: f64,
    beta: f64,
    c_th: Concurrence,
    options: &CollapseOptions,
) -> Result<Vec<(f64, f64)>> {
    let (x_exp, y_exp) = scale_exponents(nu, beta)?;
    let n = curve.node_count as f64;
    let (x_scale, y_scale) = (n.powf(x_exp), n.powf(y_exp));
    let theta_th = theta_of_concurrence(c_th).value();
    let mut pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| options.admits(p.theta, theta_th))
        .map(|p| ((p.c - c_th.value()) * x_scale, p.p_mean * y_scale))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pts)
}

fn interpolate(pts: &[(f64, f64)], x: f64) -> Option<f64> {
    let (first, last) = (pts.first()?, pts.last()?);
    if x < first.0 || x > last.0 {
        return None;
    }
    let hi = pts.partition_point(|p| p.0 < x);
    if hi == 0 {
        return Some(first.1);
    }
    let (x0, y0) = pts[hi - 1];
    let (x1, y1) = pts[hi];
    let t = if x1 == x0 { 0.5 } else { (x - x0) / (x1 - x0) };
    Some(y0 + (y1 - y0) * t)
}

fn check_same_kind(curves: &[PercolationCurve]) -> Result<()> {
    if let Some(first) = curves.first() {
        if let Some(other) = curves.iter().find(|c| c.kind != first.kind) {
            return Err(Error::Consistency(format!(
                "collapse mixes {} and {} curves under one threshold",
                first.kind, other.kind
            )));
        }
    }
    Ok(())
}

/// Mean squared deviation of every point from the master curve of the others.
pub fn collapse_cost(
    curves: &[PercolationCurve],
    nu: f64,
    beta: f64,
    c_th: Concurrence,
    options: &CollapseOptions,
) -> Result<f64> {
    scale_exponents(nu, beta)?;
    check_same_kind(curves)?;
    if curves.len() < 2 {
        return Ok(0.0);
    }
    let sets = curves
        .iter()
        .map(|c| transform(c, nu, beta, c_th, options))
        .collect::<Result<Vec<_>>>()?;

    let mut total = 0.0;
    let mut count = 0usize;
    for (i, own) in sets.iter().enumerate() {
        for &(x, y) in own {
            let (sum, k) = sets
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .filter_map(|(_, other)| interpolate(other, x))
                .fold((0.0, 0usize), |(s, k), y| (s + y, k + 1));
            if k == 0 {
                continue;
            }
            let k = k as f64;
            total += (y - sum / k).powi(2);
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::InsufficientOverlap);
    }
    Ok(total / count as f64)
}

/// Mean of the per-lattice costs, each group collapsed at its own threshold.
pub fn joint_collapse_cost(
    groups: &[CollapseGroup<'_>],
    nu: f64,
    beta: f64,
    options: &CollapseOptions,
) -> Result<f64> {
    if groups.is_empty() {
        return Err(Error::Fit("no curve groups".into()));
    }
    let mut total = 0.0;
    for g in groups {
        total += collapse_cost(g.curves, nu, beta, g.c_th, options)?;
    }
    Ok(total / groups.len() as f64)
}

/// Every transformed point of every group, flagged by whether it enters the cost.
pub fn collapse_points(
    groups: &[CollapseGroup<'_>],
    nu: f64,
    beta: f64,
    options: &CollapseOptions,
) -> Result<Vec<CollapsePoint>> {
    let (x_exp, y_exp) = scale_exponents(nu, beta)?;
    let mut out = Vec::new();
    for g in groups {
        let theta_th = theta_of_concurrence(g.c_th).value();
        for curve in g.curves {
            let n = curve.node_count as f64;
            for p in &curve.points {
                out.push(CollapsePoint {
                    lattice: curve.kind,
                    node_count: curve.node_count,
                    theta_norm: p.theta,
                    x: (p.c - g.c_th.value()) * n.powf(x_exp),
                    y: p.p_mean * n.powf(y_exp),
                    in_window: options.admits(p.theta, theta_th),
                });
            }
        }
    }
    Ok(out)
}

fn check_fit_input(groups: &[CollapseGroup<'_>]) -> Result<()> {
    if groups.is_empty() {
        return Err(Error::Fit("no curves to fit".into()));
    }
    for g in groups {
        check_same_kind(g.curves)?;
        let mut sizes: Vec<_> = g.curves.iter().map(|c| c.node_count).collect();
        sizes.sort_unstable();
        sizes.dedup();
        if sizes.len() < 3 {
            return Err(Error::Fit(format!(
                "need curves at 3 or more distinct sizes, got {}",
                sizes.len()
            )));
        }
    }
    Ok(())
}

fn steps(range: (f64, f64), step: f64) -> Vec<f64> {
    let count = ((range.1 - range.0) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| range.0 + i as f64 * step).collect()
}

/// Joint exponent fit over one or more lattice kinds.
///
/// Coarse grid search over `(ν, β)` followed by a Nelder–Mead refinement
/// confined to the same box.
pub fn fit_exponents_joint(
    groups: &[CollapseGroup<'_>],
    options: &FitOptions,
) -> Result<ScalingFit> {
    check_fit_input(groups)?;
    let objective = |nu: f64, beta: f64| -> f64 {
        joint_collapse_cost(groups, nu, beta, &options.collapse).unwrap_or(f64::INFINITY)
    };

    let nus = steps(options.nu_range, options.nu_step);
    let betas = steps(options.beta_range, options.beta_step);
    let grid: Vec<(f64, f64)> = nus
        .iter()
        .flat_map(|&nu| betas.iter().map(move |&b| (nu, b)))
        .collect();
    let costs: Vec<f64> = grid.par_iter().map(|&(nu, b)| objective(nu, b)).collect();
    let (best_idx, best_cost) = costs
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, c)| c.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Fit("collapse cost is non-finite everywhere on the grid".into()))?;

    let (nu_lo, nu_hi) = options.nu_range;
    let (b_lo, b_hi) = options.beta_range;
    let boxed = |x: &[f64]| {
        if x[0] < nu_lo || x[0] > nu_hi || x[1] < b_lo || x[1] > b_hi {
            f64::INFINITY
        } else {
            objective(x[0], x[1])
        }
    };
    let (start_nu, start_beta) = grid[best_idx];
    let (x, refined) = nelder_mead(
        boxed,
        &[start_nu, start_beta],
        &[options.nu_step, options.beta_step],
        1e-10,
        400,
    );
    let (nu, beta, cost) = if refined <= best_cost {
        (x[0], x[1], refined)
    } else {
        (start_nu, start_beta, best_cost)
    };
    if !cost.is_finite() {
        return Err(Error::Fit("non-finite collapse cost at optimum".into()));
    }

    let group_fits = groups
        .iter()
        .map(|g| {
            Ok(GroupFit {
                lattice: g.curves[0].kind,
                c_th: g.c_th.value(),
                cost: collapse_cost(g.curves, nu, beta, g.c_th, &options.collapse)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScalingFit {
        nu,
        beta,
        c_th: (groups.len() == 1).then(|| groups[0].c_th.value()),
        cost,
        d: DIMENSION,
        groups: if groups.len() > 1 {
            group_fits
        } else {
            Vec::new()
        },
    })
}

/// Exponent fit for curves of one lattice kind at a fixed threshold.
pub fn fit_exponents(
    curves: &[PercolationCurve],
    c_th: Concurrence,
    options: &FitOptions,
) -> Result<ScalingFit> {
    fit_exponents_joint(&[CollapseGroup { curves, c_th }], options)
}

/// Three-parameter fit that also moves the threshold, starting from the
/// fixed-threshold optimum.
pub fn fit_with_threshold(
    curves: &[PercolationCurve],
    c_th: Concurrence,
    options: &FitOptions,
) -> Result<ScalingFit> {
    let start = fit_exponents(curves, c_th, options)?;
    let (nu_lo, nu_hi) = options.nu_range;
    let (b_lo, b_hi) = options.beta_range;
    let objective = |x: &[f64]| {
        if x[0] < nu_lo || x[0] > nu_hi || x[1] < b_lo || x[1] > b_hi {
            return f64::INFINITY;
        }
        match Concurrence::new(x[2]) {
            Ok(c) => {
                collapse_cost(curves, x[0], x[1], c, &options.collapse).unwrap_or(f64::INFINITY)
            }
            Err(_) => f64::INFINITY,
        }
    };
    let (x, cost) = nelder_mead(
        objective,
        &[start.nu, start.beta, c_th.value()],
        &[options.nu_step, options.beta_step, 0.01],
        1e-10,
        600,
    );
    if !cost.is_finite() || cost > start.cost {
        return Ok(start);
    }
    Ok(ScalingFit {
        nu: x[0],
        beta: x[1],
        c_th: Some(x[2]),
        cost,
        d: DIMENSION,
        groups: Vec::new(),
    })
}
