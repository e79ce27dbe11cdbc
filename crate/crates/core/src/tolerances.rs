//! Every numerical tolerance used by the pipeline, in one place.

use serde::{Deserialize, Serialize};

/// Unit-norm validation threshold for points of S^2 and S^3.
pub const EPS_UNIT: f64 = 1e-9;
/// Relative threshold on `|f_x x f_y|` below which a node is degenerate.
pub const EPS_RANK: f64 = 1e-10;
/// Pairwise distance below which two points of a triple coincide.
pub const EPS_DISTINCT: f64 = 1e-8;
/// Hard limit on the unit-norm drift of an S^3 integration.
pub const DRIFT_LIMIT: f64 = 1e-6;

/// Tolerances that a run is checked against. Names follow the quantity they bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative conformality accepted by the curvature residuals.
    pub tau_conf: f64,
    /// CMC residual on a conformal chart.
    pub tau_cmc: f64,
    /// Minimality residual on a conformal chart.
    pub tau_min: f64,
    /// Pointwise metric disagreement between cousins.
    pub tau_isom: f64,
    /// Coefficient `c` of the loop-residual threshold `c * h^2`.
    pub tau_loop_coeff: f64,
    /// Agreement of the two period integrals.
    pub tau_period: f64,
    /// Hopf-projection cluster radius of a boundary fiber.
    pub rho_cluster: f64,
    /// Normal relation between cousins.
    pub tau_normal: f64,
    /// Shape-operator relation between cousins.
    pub tau_shape: f64,
    /// Measured unduloid geometry (neck, bulge, meridian length, profile distance).
    pub tau_geom: f64,
    /// Spherical distance of the boundary Hopf points against the necksize.
    pub tau_hopf: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau_conf: 1e-3,
            tau_cmc: 1e-3,
            tau_min: 1e-3,
            tau_isom: 1e-3,
            tau_loop_coeff: 10.0,
            tau_period: 1e-4,
            rho_cluster: 1e-3,
            tau_normal: 1e-3,
            tau_shape: 5e-3,
            tau_geom: 1e-3,
            tau_hopf: 1e-4,
        }
    }
}

impl Tolerances {
    /// Loop-residual density threshold for grid spacing `h`.
    pub fn tau_loop(&self, h: f64) -> f64 {
        self.tau_loop_coeff * h * h
    }

    /// All tolerances must be strictly positive and finite.
    pub fn validate(&self) -> Result<(), String> {
        let named = [
            ("tau_conf", self.tau_conf),
            ("tau_cmc", self.tau_cmc),
            ("tau_min", self.tau_min),
            ("tau_isom", self.tau_isom),
            ("tau_loop_coeff", self.tau_loop_coeff),
            ("tau_period", self.tau_period),
            ("rho_cluster", self.rho_cluster),
            ("tau_normal", self.tau_normal),
            ("tau_shape", self.tau_shape),
            ("tau_geom", self.tau_geom),
            ("tau_hopf", self.tau_hopf),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}
