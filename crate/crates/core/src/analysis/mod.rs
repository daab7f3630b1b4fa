//! Finite-size analysis of percolation curves: threshold from the crossing
//! of curves at different sizes, and critical exponents from data collapse.

mod collapse;
mod crossing;
mod optimize;

pub use collapse::{
    collapse_cost, collapse_points, fit_exponents, fit_exponents_joint, fit_with_threshold,
    joint_collapse_cost, CollapseGroup, CollapseOptions, CollapsePoint, FitOptions, ScalingFit,
    DIMENSION,
};
pub use crossing::{crossing_threshold, Crossing, ThresholdEstimate, TRANSITION_WINDOW};
pub use optimize::nelder_mead;
