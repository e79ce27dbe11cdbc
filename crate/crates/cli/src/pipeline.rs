//! The generate -> cousin -> measure pipeline shared by `gen-unduloid` and `sweep`.

use std::f64::consts::{FRAC_PI_2, TAU};

use cousinlab::cousin::{verify_normal_relation, verify_shape_relation, CousinPair};
use cousinlab::delaunay::{
    boundary_hopf_points, generate_unduloid, measure_bulge, measure_neck_to_bulge, measure_necksize,
    meridian_hausdorff, unduloid_profile_oracle, Resolution, UnduloidProfile,
};
use cousinlab::quat::spherical_distance;
use cousinlab::surface::{cmc_residual, minimal_residual_s3};
use cousinlab::tolerances::Tolerances;
use cousinlab::Result;
use serde::Serialize;

use crate::report::Check;

#[derive(Debug, Clone, Serialize)]
pub struct UnduloidMeasurements {
    pub necksize: f64,
    pub bulge: f64,
    pub neck_to_bulge: f64,
    pub hopf_points: [[f64; 3]; 2],
    pub hopf_distance: f64,
    pub profile_hausdorff: f64,
    pub cousin: cousinlab::cousin::CousinReport,
}

pub struct UnduloidRun {
    pub pair: CousinPair,
    pub profile: UnduloidProfile,
    pub measurements: UnduloidMeasurements,
    pub checks: Vec<Check>,
}

pub fn run_unduloid(n: f64, resolution: Resolution, tol: &Tolerances) -> Result<UnduloidRun> {
    let pair = generate_unduloid(n, resolution)?;
    let profile = unduloid_profile_oracle(n)?;
    let (a, b) = boundary_hopf_points(&pair)?;
    let m = UnduloidMeasurements {
        necksize: measure_necksize(&pair.f)?,
        bulge: measure_bulge(&pair.f)?,
        neck_to_bulge: measure_neck_to_bulge(&pair.f)?,
        hopf_points: [a.xyz(), b.xyz()],
        hopf_distance: spherical_distance(a, b),
        profile_hausdorff: meridian_hausdorff(&pair.f, &profile),
        cousin: pair.report(),
    };
    let h = pair.f.h();
    let checks = vec![
        Check::at_most("loop_residual", pair.loop_residual_max, tol.tau_loop(h)),
        Check::at_most("isometry", pair.isometry_error, tol.tau_isom),
        Check::at_most("cmc_residual", cmc_residual(&pair.f, tol.tau_conf)?.max(), tol.tau_cmc),
        Check::at_most("minimal_residual", minimal_residual_s3(&pair.ftilde, tol.tau_conf)?.max(), tol.tau_min),
        Check::at_most("normal_relation", verify_normal_relation(&pair)?.max(), tol.tau_normal),
        Check::at_most("shape_relation", verify_shape_relation(&pair)?.max(), tol.tau_shape),
        Check::at_most("necksize", (m.necksize - n).abs(), tol.tau_geom),
        Check::at_most("bulge", (m.bulge - (TAU - n)).abs(), tol.tau_geom),
        Check::at_most("neck_to_bulge", (m.neck_to_bulge - FRAC_PI_2).abs(), tol.tau_geom),
        Check::at_most("profile_hausdorff", m.profile_hausdorff, tol.tau_geom),
        Check::at_most("hopf_distance", (m.hopf_distance - n).abs(), tol.tau_hopf),
    ];
    Ok(UnduloidRun {
        pair,
        profile,
        measurements: m,
        checks,
    })
}
