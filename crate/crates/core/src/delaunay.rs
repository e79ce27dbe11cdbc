//! Spherical helicoids, Delaunay unduloids and an independent profile oracle.
//!
//! The helicoid `h(x, y) = p(y) (cos x + u(y) sin x)` with
//! `p(y) = cos ny - i sin ny` and `u(y) = j cos 2 pi y + k sin 2 pi y` is minimal
//! in S^3. On `y in [-1/4, 1/4]` its cousin is half an unduloid of necksize
//! `n`: the column `x = 0` becomes a neck half-circle and `x = +-pi/2` bulges.
//! The rows `y = +-1/4` are `(+-k)`-Hopf circles, which the cousin turns into
//! meridians lying in one horizontal plane.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::cousin::{integrate_to_r3, CousinPair, IntegrationOptions};
use crate::error::{Error, Result};
use crate::ode::{self, Solution};
use crate::quat::{hopf_project_unchecked, rotation_to_standard_frame, spherical_cluster, Quaternion, SpherePoint};
use crate::surface::{Ambient, BoundaryFlags, Field, ImmersionGrid};

/// Sampling of the spherical helicoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelicoidParams {
    pub n: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl HelicoidParams {
    /// One unduloid period in `x` (bulge, neck, bulge) over the closed strip `|y| <= 1/4`.
    pub fn unduloid_half(n: f64, resolution: Resolution) -> Self {
        Self {
            n,
            x_range: (-FRAC_PI_2, FRAC_PI_2),
            y_range: (-0.25, 0.25),
            nx: resolution.nx,
            ny: resolution.ny,
        }
    }

    fn spacing(&self) -> Result<(f64, f64)> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::GridTooSmall {
                nx: self.nx,
                ny: self.ny,
                min: crate::surface::MIN_GRID,
            });
        }
        let hx = (self.x_range.1 - self.x_range.0) / (self.nx - 1) as f64;
        let hy = (self.y_range.1 - self.y_range.0) / (self.ny - 1) as f64;
        Ok((hx, hy))
    }

    /// `n` must avoid 0 and 2 pi (no immersion). Negative `n` (nodoid cousins)
    /// is rejected as well.
    fn check(&self) -> Result<()> {
        let n = self.n;
        if !n.is_finite() || n <= 0.0 || (n - TAU).abs() < 1e-12 {
            return Err(Error::HelicoidNotImmersed(n));
        }
        Ok(())
    }
}

/// Grid size of a generated half-unduloid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub nx: usize,
    pub ny: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { nx: 801, ny: 201 }
    }
}

/// `h(x, y)` for necksize parameter `n`.
pub fn helicoid_point(n: f64, x: f64, y: f64) -> Quaternion {
    let (sy, cy) = (n * y).sin_cos();
    let (su, cu) = (TAU * y).sin_cos();
    let p = Quaternion::new(cy, -sy, 0.0, 0.0);
    let (sx, cx) = x.sin_cos();
    p * (Quaternion::real(cx) + Quaternion::imag(0.0, cu, su) * sx)
}

/// `|h_y|^2 = n^2 cos^2 x + (2 pi - n)^2 sin^2 x`; `|h_x| = 1` and `<h_x, h_y> = 0`.
pub fn helicoid_g(n: f64, x: f64) -> f64 {
    let m = TAU - n;
    let (s, c) = x.sin_cos();
    n * n * c * c + m * m * s * s
}

/// The helicoid sampled on the orthogonal `(x, y)` chart.
pub fn spherical_helicoid(params: &HelicoidParams) -> Result<ImmersionGrid> {
    params.check()?;
    let (hx, hy) = params.spacing()?;
    let n = params.n;
    Ok(ImmersionGrid::from_fn(
        Ambient::S3,
        (params.x_range.0, hx, params.nx),
        (params.y_range.0, hy, params.ny),
        |x, y| helicoid_point(n, x, y),
    )?
    .with_boundary(BoundaryFlags::horizontal()))
}

/// The helicoid on a conformal chart `(s, y)`, where `dx/ds = sqrt(G(x))`.
///
/// `s = 0` corresponds to `x = 0`; the `s`-range covers `params.x_range` with
/// `params.nx` equal steps.
pub fn conformal_helicoid(params: &HelicoidParams) -> Result<ImmersionGrid> {
    params.check()?;
    let (_, hy) = params.spacing()?;
    let n = params.n;
    let speed = |x: f64| helicoid_g(n, x).sqrt();
    let s_of = |x: f64| -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let sign = x.signum();
        let sol = ode::integrate(
            |t, _y: &[f64; 1]| [1.0 / speed(sign * t)],
            0.0,
            [0.0],
            x.abs(),
            None,
            0.0,
            ode::Options::default(),
        );
        sign * sol.y_end[0]
    };
    let (s0, s1) = (s_of(params.x_range.0), s_of(params.x_range.1));
    let hs = (s1 - s0) / (params.nx - 1) as f64;

    // Fixed-step RK4 keeps the error in x(s) a smooth function of s, so it does
    // not pollute finite differences of the sampled surface.
    const SUB: usize = 16;
    let dt = hs / SUB as f64;
    let mut xs = Vec::with_capacity(params.nx);
    let mut x = params.x_range.0;
    xs.push(x);
    for _ in 1..params.nx {
        for _ in 0..SUB {
            let k1 = speed(x);
            let k2 = speed(x + 0.5 * dt * k1);
            let k3 = speed(x + 0.5 * dt * k2);
            let k4 = speed(x + dt * k3);
            x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        xs.push(x);
    }
    let values = Field::from_fn(params.nx, params.ny, |i, j| {
        helicoid_point(n, xs[i], params.y_range.0 + j as f64 * hy)
    });
    Ok(ImmersionGrid::new(Ambient::S3, (s0, hs), (params.y_range.0, hy), values)?
        .with_boundary(BoundaryFlags::horizontal()))
}

/// One point of a meridian profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    /// Arclength from the neck.
    pub s: f64,
    /// Distance from the axis.
    pub r: f64,
    /// Height along the axis.
    pub z: f64,
    /// Inclination of the meridian (`pi/2` at necks and bulges).
    pub phi: f64,
    /// Axial force `2 pi (r sin phi - r^2)`.
    pub force: f64,
}

/// Meridian of an H = 1 unduloid, integrated from the neck to the first bulge
/// and extended by reflection.
#[derive(Debug, Clone)]
pub struct UnduloidProfile {
    pub n: f64,
    pub neck_radius: f64,
    pub bulge_radius: f64,
    /// Arclength from neck to bulge.
    pub half_length: f64,
    /// Axial distance from neck to bulge (half the period).
    pub half_period: f64,
    /// Force at the neck, `n (1 - n / 2 pi)`.
    pub force: f64,
    /// Largest deviation of the force along the integrated arc.
    pub force_drift: f64,
    solution: Solution<3>,
}

/// `2 pi (r sin phi - r^2)`.
pub fn axial_force(r: f64, phi: f64) -> f64 {
    TAU * (r * phi.sin() - r * r)
}

fn check_necksize(n: f64) -> Result<()> {
    if !(n > 0.0 && n <= PI) {
        return Err(Error::NecksizeOutOfRange(n));
    }
    Ok(())
}

fn meridian_rhs(_s: f64, y: &[f64; 3]) -> [f64; 3] {
    [y[2].cos(), y[2].sin(), 2.0 - y[2].sin() / y[0]]
}

/// Integrates `r' = cos phi`, `z' = sin phi`, `phi' = 2 - sin phi / r` from the
/// neck `r = n / 2 pi`, `phi = pi/2` until `phi` returns to `pi/2` at the bulge.
pub fn unduloid_profile_oracle(n: f64) -> Result<UnduloidProfile> {
    check_necksize(n)?;
    let r0 = n / TAU;
    let rhs = meridian_rhs;
    let opts = ode::Options {
        h_max: 0.01,
        ..Default::default()
    };
    let cylinder = (n - PI).abs() < 1e-12;
    let solution = if cylinder {
        ode::integrate(rhs, 0.0, [r0, 0.0, FRAC_PI_2], FRAC_PI_2, None, 0.0, opts)
    } else {
        let event = |_s: f64, y: &[f64; 3]| FRAC_PI_2 - y[2];
        let sol = ode::integrate(rhs, 0.0, [r0, 0.0, FRAC_PI_2], PI, Some(&event), 0.0, opts);
        if !sol.event_hit {
            return Err(Error::IntegrationQuality(format!(
                "profile for n = {n} did not reach a bulge"
            )));
        }
        sol
    };
    let force = n * (1.0 - n / TAU);
    let force_drift = solution
        .steps
        .iter()
        .map(|st| (axial_force(st.y1[0], st.y1[2]) - force).abs())
        .fold(0.0, f64::max);
    Ok(UnduloidProfile {
        n,
        neck_radius: r0,
        bulge_radius: solution.y_end[0],
        half_length: solution.t_end,
        half_period: solution.y_end[1],
        force,
        force_drift,
        solution,
    })
}

impl UnduloidProfile {
    /// The profile at signed arclength `s` from the neck, by reflection across
    /// necks and bulges.
    pub fn at(&self, s: f64) -> ProfileSample {
        let l = self.half_length;
        let k = (s / (2.0 * l)).floor();
        let t = s - 2.0 * l * k;
        let (u, mirrored) = if t <= l { (t, false) } else { (2.0 * l - t, true) };
        let y = self.solution.eval_exact(meridian_rhs, u.clamp(0.0, l));
        let (z, phi) = if mirrored {
            (2.0 * self.half_period - y[1], PI - y[2])
        } else {
            (y[1], y[2])
        };
        ProfileSample {
            s,
            r: y[0],
            z: z + 2.0 * self.half_period * k,
            phi,
            force: axial_force(y[0], phi),
        }
    }

    /// `count` samples equally spaced in `[s0, s1]`.
    pub fn samples(&self, s0: f64, s1: f64, count: usize) -> Vec<ProfileSample> {
        let count = count.max(2);
        (0..count)
            .map(|k| self.at(s0 + (s1 - s0) * k as f64 / (count - 1) as f64))
            .collect()
    }
}

/// The upper half of the oracle unduloid sampled on its arclength chart:
/// `x` is meridian arclength from the neck over `[-pi/2, pi/2]` and
/// `y in [-1/4, 1/4]` sweeps the half-parallels, with the boundary in the
/// `ij`-plane and the axis along `i`. The chart is orthogonal with `E = 1`,
/// `G = (2 pi r)^2`, oriented so that `H = +1`.
pub fn oracle_unduloid_grid(profile: &UnduloidProfile, resolution: Resolution) -> Result<ImmersionGrid> {
    let params = HelicoidParams::unduloid_half(profile.n, resolution);
    let (hx, hy) = params.spacing()?;
    let rows: Vec<ProfileSample> = (0..params.nx)
        .map(|i| profile.at(params.x_range.0 + i as f64 * hx))
        .collect();
    let values = Field::from_fn(params.nx, params.ny, |i, j| {
        let p = rows[i];
        let theta = TAU * (params.y_range.0 + j as f64 * hy + 0.25);
        Quaternion::imag(p.z, p.r * theta.cos(), p.r * theta.sin())
    });
    Ok(ImmersionGrid::new(Ambient::R3, (params.x_range.0, hx), (params.y_range.0, hy), values)?
        .with_boundary(BoundaryFlags::horizontal()))
}

/// Integrates the cousin of the helicoid on `|y| <= 1/4` and moves the result
/// so that the neck circle is centered at the origin, the axis points along
/// `i`, and the boundary lies in the `ij`-plane with the surface above it.
/// `f~` is conjugated by the same rotation, which preserves the cousin relation.
/// Both grids use the conformal `(s, y)` chart of the helicoid.
pub fn generate_unduloid(n: f64, resolution: Resolution) -> Result<CousinPair> {
    check_necksize(n)?;
    // The conformal chart concentrates nodes at the neck, whose radius n / 2 pi
    // is the smallest feature of the surface.
    let h = conformal_helicoid(&HelicoidParams::unduloid_half(n, resolution))?;
    let pair = integrate_to_r3(&h, &IntegrationOptions::default())?;
    align(pair)
}

/// Midpoint of the end points of every column (the centers of the half-parallels).
fn column_centers(g: &ImmersionGrid) -> Vec<Quaternion> {
    (0..g.nx)
        .map(|i| (g.at(i, 0) + g.at(i, g.ny - 1)) * 0.5)
        .collect()
}

fn align(pair: CousinPair) -> Result<CousinPair> {
    let f = &pair.f;
    let centers = column_centers(f);
    let axis = (centers[f.nx - 1] - centers[0]).normalized();
    let mut m = Quaternion::ZERO;
    for i in 0..f.nx {
        m += axis.cross(f.at(i, f.ny - 1) - f.at(i, 0));
    }
    let mut m = m.normalized();
    let mid = f.ny / 2;
    let lift: f64 = (0..f.nx).map(|i| (f.at(i, mid) - centers[i]).dot(m)).sum();
    if lift < 0.0 {
        m = -m;
    }
    let e1 = (axis - m * axis.dot(m)).normalized();
    let e2 = m.cross(e1);
    let rot = rotation_to_standard_frame(e1, e2, m);

    let lengths = half_parallel_lengths(f);
    let neck = interior_argmin(&lengths)?;
    let origin = centers[neck];
    let fv = f.values.map(|p| rot.rotate(p - origin));
    let a = rot.quat();
    let tv = pair.ftilde.values.map(|p| a * p * a.conj());
    Ok(CousinPair {
        f: f.with_values(Ambient::R3, fv)?,
        ftilde: pair.ftilde.with_values(Ambient::S3, tv)?,
        ..pair
    })
}

/// `Pi_k` images of the bottom and top boundary rows, each required to cluster
/// within `1e-4`.
pub fn boundary_hopf_points(pair: &CousinPair) -> Result<(SpherePoint, SpherePoint)> {
    const CLUSTER: f64 = 1e-4;
    let g = &pair.ftilde;
    let row = |j: usize| -> Result<SpherePoint> {
        let pts: Vec<SpherePoint> = (0..g.nx)
            .map(|i| hopf_project_unchecked(SpherePoint::K, g.at(i, j)))
            .collect();
        let (c, r) = spherical_cluster(&pts);
        if !(r <= CLUSTER) {
            return Err(Error::IntegrationQuality(format!(
                "boundary row {j} spreads over radius {r:e} under the k-Hopf projection"
            )));
        }
        Ok(c)
    };
    Ok((row(0)?, row(g.ny - 1)?))
}

/// Polyline length of every column, Richardson-extrapolated against the
/// every-other-node polyline when the column has an even number of segments.
pub fn half_parallel_lengths(g: &ImmersionGrid) -> Vec<f64> {
    (0..g.nx)
        .map(|i| {
            let col = g.values.column(i);
            let fine: f64 = col.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
            if (col.len() - 1) % 2 == 0 && col.len() >= 5 {
                let coarse: f64 = col.iter().step_by(2).collect::<Vec<_>>().windows(2).map(|w| (*w[1] - *w[0]).norm()).sum();
                fine + (fine - coarse) / 3.0
            } else {
                fine
            }
        })
        .collect()
}

/// Index of the smallest entry, which must be interior. Ties within a relative
/// `1e-7` (a cylinder) resolve to the entry closest to the middle.
fn interior_argmin(v: &[f64]) -> Result<usize> {
    let n = v.len();
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let mid = (n - 1) as f64 / 2.0;
    let best = (1..n.saturating_sub(1))
        .filter(|&k| v[k] <= min * (1.0 + 1e-7))
        .min_by(|&a, &b| (a as f64 - mid).abs().total_cmp(&(b as f64 - mid).abs()));
    match best {
        Some(k) => Ok(k),
        None => {
            let k = v.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |e| e.0);
            Err(Error::NoInteriorMinimum(k))
        }
    }
}

/// Vertex of the parabola through three equally spaced samples.
fn parabolic_extremum(a: f64, b: f64, c: f64) -> f64 {
    let curv = a - 2.0 * b + c;
    if curv.abs() < 1e-300 {
        return b;
    }
    b - (c - a) * (c - a) / (8.0 * curv)
}

/// Twice the length of the shortest half-parallel (columns of the grid).
pub fn measure_necksize(g: &ImmersionGrid) -> Result<f64> {
    let l = half_parallel_lengths(g);
    let k = interior_argmin(&l)?;
    Ok(2.0 * parabolic_extremum(l[k - 1], l[k], l[k + 1]))
}

/// Twice the length of the longest half-parallel (columns of the grid).
pub fn measure_bulge(g: &ImmersionGrid) -> Result<f64> {
    let neg: Vec<f64> = half_parallel_lengths(g).iter().map(|v| -v).collect();
    let shift = neg.iter().copied().fold(f64::INFINITY, f64::min);
    // Reuse the minimum search on a positive sequence.
    let pos: Vec<f64> = neg.iter().map(|v| v - shift + 1.0).collect();
    match interior_argmin(&pos) {
        Ok(k) => Ok(-2.0 * parabolic_extremum(neg[k - 1], neg[k], neg[k + 1])),
        // A bulge at the domain edge: the edge column is the best estimate.
        Err(Error::NoInteriorMinimum(k)) => Ok(-2.0 * neg[k]),
        Err(e) => Err(e),
    }
}

/// The meridian through the middle row as `(z, r)` pairs, for a surface
/// aligned with its axis along `i` through the origin.
pub fn middle_meridian(g: &ImmersionGrid) -> Vec<(f64, f64)> {
    let j = g.ny / 2;
    (0..g.nx)
        .map(|i| {
            let p = g.at(i, j);
            (p.x, (p.y * p.y + p.z * p.z).sqrt())
        })
        .collect()
}

/// Symmetric Hausdorff distance between the middle meridian of an aligned
/// half-unduloid and the oracle profile over the same arclength window.
pub fn meridian_hausdorff(g: &ImmersionGrid, profile: &UnduloidProfile) -> f64 {
    let a = middle_meridian(g);
    let arc = meridian_arclength(g);
    let neck = interior_argmin(&half_parallel_lengths(g)).unwrap_or(a.len() / 2);
    let (s0, s1) = (arc[0] - arc[neck], arc[a.len() - 1] - arc[neck]);
    let b: Vec<(f64, f64)> = profile
        .samples(s0, s1, 4 * g.nx)
        .iter()
        .map(|p| (p.z, p.r))
        .collect();
    directed_hausdorff(&a, &b).max(directed_hausdorff(&b, &a))
}

/// Cumulative polyline arclength along the middle row.
pub fn meridian_arclength(g: &ImmersionGrid) -> Vec<f64> {
    let j = g.ny / 2;
    let mut acc = 0.0;
    let mut out = vec![0.0];
    for i in 1..g.nx {
        acc += (g.at(i, j) - g.at(i - 1, j)).norm();
        out.push(acc);
    }
    out
}

/// Arclength of the middle meridian from the neck column to the bulge column
/// on the positive side of the neck.
pub fn measure_neck_to_bulge(g: &ImmersionGrid) -> Result<f64> {
    let l = half_parallel_lengths(g);
    let neck = interior_argmin(&l)?;
    // Ties (a cylinder) resolve to the far end of the window.
    let top = l[neck..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bulge = (neck..g.nx).rev().find(|&k| l[k] >= top * (1.0 - 1e-7)).unwrap_or(neck);
    let arc = meridian_arclength(g);
    Ok(arc[bulge] - arc[neck])
}

fn directed_hausdorff(from: &[(f64, f64)], to: &[(f64, f64)]) -> f64 {
    from.iter()
        .map(|&p| {
            to.windows(2)
                .map(|w| point_segment_distance(p, w[0], w[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    (qx * qx + qy * qy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::spherical_distance;
    use crate::surface::{dx, minimal_residual_s3, FdOrder};

    #[test]
    fn helicoid_axes() {
        let n = 1.3;
        for k in 0..20 {
            let y = -0.25 + 0.025 * k as f64;
            let p = Quaternion::new((n * y).cos(), -(n * y).sin(), 0.0, 0.0);
            assert!(helicoid_point(n, 0.0, y).max_abs_diff(p) < 1e-15);
            let m = TAU - n;
            let polar = Quaternion::imag(0.0, (m * y).cos(), (m * y).sin());
            assert!(helicoid_point(n, FRAC_PI_2, y).max_abs_diff(polar) < 1e-15);
        }
    }

    #[test]
    fn tangent_on_axis_is_polar_position() {
        let n = 2.1;
        let h = 1e-3;
        let g = ImmersionGrid::from_fn(Ambient::S3, (-2.0 * h, h, 5), (-0.25, 0.05, 11), |x, y| {
            helicoid_point(n, x, y)
        })
        .unwrap();
        let d = dx(&g.values, h, FdOrder::Fourth);
        for j in 0..g.ny {
            let want = helicoid_point(n, FRAC_PI_2, g.y(j));
            assert!(d.get(2, j).max_abs_diff(want) < 1e-10);
        }
    }

    #[test]
    fn helicoid_rejects_singular_parameters() {
        for n in [0.0, TAU, -0.5] {
            let p = HelicoidParams::unduloid_half(n, Resolution::default());
            assert!(matches!(spherical_helicoid(&p), Err(Error::HelicoidNotImmersed(_))));
        }
    }

    #[test]
    fn conformal_chart_is_conformal_and_minimal() {
        let p = HelicoidParams::unduloid_half(FRAC_PI_2, Resolution::default());
        let g = conformal_helicoid(&p).unwrap();
        let r = minimal_residual_s3(&g, 1e-3).unwrap();
        assert!(r.max() < 1e-4, "{}", r.max());
        assert!((g.at(g.nx - 1, 0) - helicoid_point(p.n, FRAC_PI_2, -0.25)).norm() < 1e-9);
    }

    #[test]
    fn oracle_neck_bulge_and_force() {
        let prof = unduloid_profile_oracle(FRAC_PI_2).unwrap();
        assert!((prof.neck_radius - 0.25).abs() < 1e-15);
        assert!((prof.bulge_radius - 0.75).abs() < 1e-8);
        assert!((prof.force - 3.0 * PI / 8.0).abs() < 1e-15);
        assert!(prof.force_drift < 1e-8);
        assert!((prof.half_length - FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn oracle_cylinder() {
        let prof = unduloid_profile_oracle(PI).unwrap();
        for s in [-3.0, -0.2, 0.0, 0.9, 4.0] {
            let p = prof.at(s);
            assert!((p.r - 0.5).abs() < 1e-14);
            assert!((p.z - s).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_reflection_is_continuous() {
        let prof = unduloid_profile_oracle(1.0).unwrap();
        let l = prof.half_length;
        for s in [l, 2.0 * l, -l, 3.0 * l] {
            let a = prof.at(s - 1e-9);
            let b = prof.at(s + 1e-9);
            assert!((a.r - b.r).abs() < 1e-8 && (a.z - b.z).abs() < 1e-8, "{s}");
        }
        assert!((prof.at(2.0 * l).r - prof.neck_radius).abs() < 1e-12);
        assert!((prof.at(-0.3).z + prof.at(0.3).z).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_out_of_range() {
        assert!(unduloid_profile_oracle(0.0).is_err());
        assert!(unduloid_profile_oracle(3.2).is_err());
    }

    #[test]
    fn half_unduloid_quarter_pi() {
        let n = FRAC_PI_2;
        let pair = generate_unduloid(n, Resolution::default()).unwrap();
        let neck = measure_necksize(&pair.f).unwrap();
        assert!((neck - n).abs() < 1e-3, "{neck}");
        let bulge = measure_bulge(&pair.f).unwrap();
        assert!((bulge - (TAU - n)).abs() < 1e-3, "{bulge}");
        let (a, b) = boundary_hopf_points(&pair).unwrap();
        assert!((spherical_distance(a, b) - n).abs() < 1e-4);
        let prof = unduloid_profile_oracle(n).unwrap();
        let d = meridian_hausdorff(&pair.f, &prof);
        assert!(d < 1e-3, "{d}");
        // The boundary lies in the ij-plane.
        let off = (0..pair.f.nx)
            .flat_map(|i| [pair.f.at(i, 0).z, pair.f.at(i, pair.f.ny - 1).z])
            .fold(0.0f64, |m, z| m.max(z.abs()));
        assert!(off < 1e-6, "{off}");
    }

    #[test]
    fn cone_has_no_interior_neck() {
        let g = ImmersionGrid::from_fn(Ambient::R3, (1.0, 0.1, 11), (0.0, PI / 20.0, 21), |x, y| {
            Quaternion::imag(x, x * y.cos(), x * y.sin())
        })
        .unwrap();
        assert!(matches!(measure_necksize(&g), Err(Error::NoInteriorMinimum(0))));
    }

    #[test]
    fn half_cylinder_necksize() {
        let g = ImmersionGrid::from_fn(Ambient::R3, (-1.0, 0.1, 21), (0.0, PI / 40.0, 41), |x, y| {
            Quaternion::imag(x, 0.5 * y.cos(), 0.5 * y.sin())
        })
        .unwrap();
        // Richardson-extrapolated chords over 40 segments leave an O(h^4) bias.
        assert!((measure_necksize(&g).unwrap() - PI).abs() < 1e-6);
    }
}
