use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::percolation::PercolationCurve;

/// Grid points count as "in transition" when some curve has `P` strictly
/// inside this range.
pub const TRANSITION_WINDOW: (f64, f64) = (0.1, 0.9);

/// Where the curves of two sizes intersect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub n_small: usize,
    pub n_large: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    #[serde(rename = "theta_T")]
    pub theta_t: f64,
    pub uncertainty: f64,
    pub crossings: Vec<Crossing>,
}

fn check_compatible(curves: &[PercolationCurve]) -> Result<()> {
    if curves.len() < 2 {
        return Err(Error::Usage(format!(
            "need at least 2 curves for a crossing, got {}",
            curves.len()
        )));
    }
    let first = &curves[0];
    if first.points.len() < 2 {
        return Err(Error::Consistency(
            "curves need at least 2 grid points".into(),
        ));
    }
    for c in &curves[1..] {
        if c.kind != first.kind {
            return Err(Error::Consistency(format!(
                "mixed lattice kinds {} and {}",
                first.kind, c.kind
            )));
        }
        if c.protocol != first.protocol {
            return Err(Error::Consistency(format!(
                "mixed protocols {} and {}",
                first.protocol, c.protocol
            )));
        }
        let same_grid = c.points.len() == first.points.len()
            && c.thetas()
                .zip(first.thetas())
                .all(|(a, b)| (a - b).abs() <= 1e-12);
        if !same_grid {
            return Err(Error::Consistency(
                "curves use different theta grids".into(),
            ));
        }
    }
    let mut sizes: Vec<_> = curves.iter().map(|c| c.node_count).collect();
    sizes.sort_unstable();
    if sizes.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Consistency("curve sizes must be distinct".into()));
    }
    Ok(())
}

/// Crossing of two curves on a shared grid, restricted to `window` (flags per
/// grid point). Multiple sign changes from noise resolve to their median.
fn pair_crossing(
    small: &PercolationCurve,
    large: &PercolationCurve,
    window: &[bool],
) -> Result<f64> {
    let diff: Vec<f64> = small
        .points
        .iter()
        .zip(&large.points)
        .map(|(a, b)| a.p_mean - b.p_mean)
        .collect();
    let theta: Vec<f64> = small.thetas().collect();

    if window
        .iter()
        .zip(&diff)
        .filter(|(w, _)| **w)
        .all(|(_, d)| *d == 0.0)
    {
        return Err(Error::DegenerateCrossing(
            small.node_count,
            large.node_count,
        ));
    }

    let mut roots = Vec::new();
    for i in 0..diff.len() - 1 {
        if !(window[i] && window[i + 1]) {
            continue;
        }
        let (d0, d1) = (diff[i], diff[i + 1]);
        if d0 == 0.0 {
            // exact touch at a grid point counts once, from the left
            if i == 0 || !window[i - 1] || diff[i - 1] != 0.0 {
                roots.push(theta[i]);
            }
        } else if d0 * d1 < 0.0 {
            roots.push(theta[i] + (theta[i + 1] - theta[i]) * d0 / (d0 - d1));
        }
    }
    let last = diff.len() - 1;
    if window[last] && diff[last] == 0.0 && window[last - 1] && diff[last - 1] != 0.0 {
        roots.push(theta[last]);
    }

    if roots.is_empty() {
        return Err(Error::NoCrossing(small.node_count, large.node_count));
    }
    let mid = roots.len() / 2;
    Ok(if roots.len() % 2 == 1 {
        roots[mid]
    } else {
        0.5 * (roots[mid - 1] + roots[mid])
    })
}

/// Threshold from the pairwise crossings of curves at different sizes.
///
/// `theta_T` is the mean of all pairwise crossings; its uncertainty is the
/// larger of their sample standard deviation and half the grid spacing.
pub fn crossing_threshold(curves: &[PercolationCurve]) -> Result<ThresholdEstimate> {
    check_compatible(curves)?;
    let mut sorted: Vec<&PercolationCurve> = curves.iter().collect();
    sorted.sort_by_key(|c| c.node_count);

    let npts = sorted[0].points.len();
    let (lo, hi) = TRANSITION_WINDOW;
    let window: Vec<bool> = (0..npts)
        .map(|i| {
            sorted
                .iter()
                .any(|c| c.points[i].p_mean > lo && c.points[i].p_mean < hi)
        })
        .collect();

    let mut crossings = Vec::new();
    for (i, small) in sorted.iter().enumerate() {
        for large in &sorted[i + 1..] {
            crossings.push(Crossing {
                n_small: small.node_count,
                n_large: large.node_count,
                theta: pair_crossing(small, large, &window)?,
            });
        }
    }

    let k = crossings.len() as f64;
    let theta_t = crossings.iter().map(|c| c.theta).sum::<f64>() / k;
    let spread = if crossings.len() > 1 {
        let var = crossings
            .iter()
            .map(|c| (c.theta - theta_t).powi(2))
            .sum::<f64>()
            / (k - 1.0);
        var.sqrt()
    } else {
        0.0
    };
    let thetas: Vec<f64> = sorted[0].thetas().collect();
    let half_spacing = thetas
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max)
        / 2.0;

    Ok(ThresholdEstimate {
        theta_t,
        uncertainty: spread.max(half_spacing),
        crossings,
    })
}
