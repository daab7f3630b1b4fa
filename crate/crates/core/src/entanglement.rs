//! Concurrence calculus for identical two-qubit pure states
//! `|ψ(θ)⟩ = cos θ |00⟩ + sin θ |11⟩`, `θ ∈ [0, π/4]`.
//!
//! Angles are carried in normalised units `t = θ / (π/4) ∈ [0, 1]`. The
//! concurrence is `c = sin 2θ` and singlet conversion succeeds with
//! probability `p = 2 sin²θ = 1 − √(1 − c²)`.
//!
//! Swapping along a path multiplies concurrences (series rule). Distilling
//! `n` parallel links of concurrence `c` obeys the parallel rule
//! `(1 + √(1 − c′²))/2 = max{1/2, ((1 + √(1 − c²))/2)ⁿ}`. Post-swap states are
//! treated as pure, which holds when the swap projects onto the XZ Bell basis.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::PathSummary;

/// Values within this distance outside `[0, 1]` are clamped rather than rejected.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

fn unit_interval(what: &str, value: f64) -> Result<f64> {
    if !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&value) {
        return Err(Error::Domain(format!("{what} = {value} is outside [0, 1]")));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Clamps into `[0, 1]` and snaps values within [`CLAMP_TOLERANCE`] of 1 onto 1.
#[inline]
fn snap(value: f64) -> f64 {
    if value >= 1.0 - CLAMP_TOLERANCE {
        1.0
    } else {
        value.max(0.0)
    }
}

macro_rules! unit_scalar {
    ($(#[$meta:meta])* $name:ident, $label:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
        #[serde(try_from = "f64", into = "f64")]
        pub struct $name(f64);

        impl $name {
            pub const ZERO: $name = $name(0.0);
            pub const ONE: $name = $name(1.0);

            pub fn new(value: f64) -> Result<Self> {
                unit_interval($label, value).map($name)
            }

            #[inline]
            pub fn value(self) -> f64 {
                self.0
            }
        }

        impl TryFrom<f64> for $name {
            type Error = Error;

            fn try_from(value: f64) -> Result<Self> {
                Self::new(value)
            }
        }

        impl From<$name> for f64 {
            fn from(v: $name) -> f64 {
                v.0
            }
        }
    };
}

unit_scalar!(
    /// Entanglement angle in units of π/4: 0 is a product state, 1 a singlet.
    ThetaNorm,
    "normalised theta"
);
unit_scalar!(Concurrence, "concurrence");
unit_scalar!(
    /// Probability that singlet conversion succeeds.
    SingletProb,
    "singlet probability"
);

/// `c = sin(2θ)`.
pub fn concurrence_of_theta(t: ThetaNorm) -> Concurrence {
    Concurrence(snap((FRAC_PI_2 * t.0).sin()))
}

/// Inverse of [`concurrence_of_theta`] on the branch `θ ∈ [0, π/4]`.
pub fn theta_of_concurrence(c: Concurrence) -> ThetaNorm {
    ThetaNorm(snap(c.0.asin() / FRAC_PI_2))
}

/// `p = 2 sin²θ`.
pub fn singlet_prob_of_theta(t: ThetaNorm) -> SingletProb {
    let s = (FRAC_PI_2 * t.0 / 2.0).sin();
    SingletProb(snap(2.0 * s * s))
}

/// `p = 1 − √(1 − c²)`, evaluated as `c² / (1 + √(1 − c²))` to keep precision
/// for weak links.
pub fn singlet_prob_of_concurrence(c: Concurrence) -> SingletProb {
    let c2 = c.0 * c.0;
    SingletProb(snap(c2 / (1.0 + (1.0 - c2).sqrt())))
}

/// Entanglement swapping along `length` identical links: `c^length`.
pub fn series_concurrence(c: Concurrence, length: u32) -> Result<Concurrence> {
    if length < 1 {
        return Err(Error::Domain("path length must be at least 1".into()));
    }
    let value = match i32::try_from(length) {
        Ok(l) => c.0.powi(l),
        Err(_) => c.0.powf(f64::from(length)),
    };
    Ok(Concurrence(value.clamp(0.0, 1.0)))
}

/// Distillation of `count` identical parallel links.
///
/// The product of the `count` identical terms is taken in log space so that
/// path counts in the tens of thousands neither underflow nor lose the weak
/// link regime.
pub fn parallel_concurrence(c: Concurrence, count: u64) -> Result<Concurrence> {
    if count < 1 {
        return Err(Error::Domain("path count must be at least 1".into()));
    }
    if count == 1 {
        return Ok(c);
    }
    let c2 = c.0 * c.0;
    // 1 - (1 + √(1 − c²))/2, without cancellation
    let deficit = c2 / (2.0 * (1.0 + (1.0 - c2).sqrt()));
    let log_product = count as f64 * (-deficit).ln_1p();
    if log_product <= -std::f64::consts::LN_2 {
        return Ok(Concurrence::ONE);
    }
    let m = log_product.exp();
    let one_minus_m = -log_product.exp_m1();
    // 1 − (2M − 1)² = 4M(1 − M)
    let value = 2.0 * (m * one_minus_m).sqrt();
    Ok(Concurrence(snap(value.max(c.0))))
}

/// Direct-link concurrence between two nodes joined by `paths.count`
/// shortest paths of `paths.length` identical edges each.
pub fn gcp_pair_concurrence(edge: Concurrence, paths: PathSummary) -> Result<Concurrence> {
    parallel_concurrence(series_concurrence(edge, paths.length)?, paths.count)
}
