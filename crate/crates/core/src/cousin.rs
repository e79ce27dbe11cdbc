//! Conjugate cousins: CMC-1 surfaces in R^3 and minimal surfaces in S^3.
//!
//! The two first-order systems
//!
//! ```text
//! d f~ = f~ (df o J)            (R^3 -> S^3)
//! d f  = -f~^-1 (d f~ o J)      (S^3 -> R^3)
//! ```
//!
//! are integrated over a rectangular grid along a spanning tree. Edge updates
//! in S^3 are fourth-order Magnus steps `f~ <- f~ exp(Omega)`, which keep
//! `|f~| = 1` up to roundoff; edges in R^3 use the endpoint-corrected trapezoid
//! rule. Both use fourth-order differences for the integrands, so the scheme
//! error is far below the curvature residuals it is checked against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{settle, Quaternion, UnitQuaternion};
use crate::surface::{
    derivatives_with, dx, dy, j_matrix, normal, shape_operator, Ambient, Edge, FdOrder, Field,
    ImmersionGrid, MetricField,
};
use crate::tolerances::{Tolerances, DRIFT_LIMIT};

/// Spanning tree used to reach every node from the base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegrationOrder {
    /// Along the base row first, then up and down every column.
    #[default]
    RowFirst,
    /// Along the base column first, then left and right along every row.
    ColumnFirst,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    pub order: IntegrationOrder,
    /// Node where the integration is anchored.
    pub base_point: (usize, usize),
    /// Value of `f~` at the base point (S^3 direction).
    pub base_value: UnitQuaternion,
    /// Value of `f` at the base point (R^3 direction); must be imaginary.
    pub base_offset: Quaternion,
    pub tolerances: Tolerances,
    /// Reject inputs whose loop residual exceeds `tau_loop`.
    pub check_integrability: bool,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            order: IntegrationOrder::RowFirst,
            base_point: (0, 0),
            base_value: UnitQuaternion::from_normalized(Quaternion::ONE),
            base_offset: Quaternion::ZERO,
            tolerances: Tolerances::default(),
            check_integrability: true,
        }
    }
}

/// A CMC-1 immersion into R^3 together with its minimal cousin in S^3.
#[derive(Debug, Clone)]
pub struct CousinPair {
    pub f: ImmersionGrid,
    pub ftilde: ImmersionGrid,
    pub base_point: (usize, usize),
    /// Largest unit-norm drift met before renormalization.
    pub drift_log: f64,
    /// Largest loop-residual density of the integrated 1-form.
    pub loop_residual_max: f64,
    pub isometry_error: f64,
}

/// Summary written by the CLI for every integration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CousinReport {
    pub loop_residual_max: f64,
    pub isometry_error: f64,
    pub drift_log: f64,
    pub base_point: (usize, usize),
}

impl CousinPair {
    pub fn report(&self) -> CousinReport {
        CousinReport {
            loop_residual_max: self.loop_residual_max,
            isometry_error: self.isometry_error,
            drift_log: self.drift_log,
            base_point: self.base_point,
        }
    }

    /// Replaces `f~` by `a f~`; the relations between the cousins are unaffected.
    pub fn left_translate(&self, a: UnitQuaternion) -> Result<CousinPair> {
        let q = a.quat();
        let vals = self.ftilde.values.map(|p| q * p);
        Ok(CousinPair {
            ftilde: self.ftilde.with_values(Ambient::S3, vals)?,
            ..self.clone()
        })
    }
}

/// Which side of an ordered boundary curve the surface lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Ordered grid indices along one boundary component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCurve {
    pub nodes: Vec<(usize, usize)>,
    pub conormal_side: Side,
}

impl BoundaryCurve {
    /// The nodes of one grid edge, traversed counterclockwise (surface on the left).
    pub fn from_edge(g: &ImmersionGrid, edge: Edge) -> Self {
        Self {
            nodes: g.edge_nodes(edge),
            conormal_side: Side::Left,
        }
    }

    pub fn new(nodes: Vec<(usize, usize)>, conormal_side: Side) -> Result<Self> {
        check_adjacent(&nodes)?;
        Ok(Self {
            nodes,
            conormal_side,
        })
    }
}

fn check_adjacent(nodes: &[(usize, usize)]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::InvalidPath("a path needs at least two nodes".into()));
    }
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.0.abs_diff(b.0) + a.1.abs_diff(b.1) != 1 {
            return Err(Error::InvalidPath(format!(
                "nodes {a:?} and {b:?} are not grid neighbours"
            )));
        }
    }
    Ok(())
}

/// The 1-forms of the cousin system sampled at the nodes: `a(d/dx)` and `a(d/dy)`.
struct Forms {
    ax: Field<Quaternion>,
    ay: Field<Quaternion>,
    /// Derivatives of `ax` along x and `ay` along y, for the endpoint corrections.
    ax_x: Field<Quaternion>,
    ay_y: Field<Quaternion>,
}

impl Forms {
    fn new(g: &ImmersionGrid, ax: Field<Quaternion>, ay: Field<Quaternion>) -> Self {
        let ax_x = dx(&ax, g.hx, FdOrder::Fourth);
        let ay_y = dy(&ay, g.hy, FdOrder::Fourth);
        Self { ax, ay, ax_x, ay_y }
    }

    /// Increment of the form along the edge from `(i, j)` to its x- or y-neighbour.
    fn endpoints(&self, along_x: bool, i: usize, j: usize) -> [Quaternion; 4] {
        if along_x {
            [
                self.ax.get(i, j),
                self.ax.get(i + 1, j),
                self.ax_x.get(i, j),
                self.ax_x.get(i + 1, j),
            ]
        } else {
            [
                self.ay.get(i, j),
                self.ay.get(i, j + 1),
                self.ay_y.get(i, j),
                self.ay_y.get(i, j + 1),
            ]
        }
    }
}

/// `df o J` in the coordinate frame of `g` (for R^3 grids), or
/// `-f~^-1 (df~ o J)` (for S^3 grids). Both are imaginary-quaternion valued.
fn cousin_forms(g: &ImmersionGrid) -> Result<Forms> {
    let d = derivatives_with(g, FdOrder::Fourth);
    let m = MetricField::from_derivatives(&d);
    m.check_nondegenerate()?;
    let mut ax = Vec::with_capacity(g.nx * g.ny);
    let mut ay = Vec::with_capacity(g.nx * g.ny);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (e, f, gg) = m.at(i, j);
            let jm = j_matrix(e, f, gg);
            let (fx, fy) = (d.fx.get(i, j), d.fy.get(i, j));
            let jx = fx * jm[0][0] + fy * jm[1][0];
            let jy = fx * jm[0][1] + fy * jm[1][1];
            match g.ambient {
                Ambient::R3 => {
                    ax.push(jx.im());
                    ay.push(jy.im());
                }
                Ambient::S3 => {
                    let pinv = g.at(i, j).conj();
                    ax.push(-(pinv * jx).im());
                    ay.push(-(pinv * jy).im());
                }
            }
        }
    }
    let (nx, ny) = (g.nx, g.ny);
    Ok(Forms::new(
        g,
        Field { nx, ny, data: ax },
        Field { nx, ny, data: ay },
    ))
}

/// Fourth-order Magnus exponent of `Y' = Y A(t)` over one step of length `h`,
/// from the endpoint values and derivatives of `A`. For imaginary
/// quaternions the commutator is `[a, b] = 2 a x b`.
fn magnus(h: f64, [a0, a1, d0, d1]: [Quaternion; 4]) -> Quaternion {
    (a0 + a1) * (0.5 * h) + (d0 - d1) * (h * h / 12.0) + a0.cross(a1) * (h * h / 6.0)
}

/// Endpoint-corrected trapezoid rule for `y' = g(t)`.
fn trapezoid(h: f64, [g0, g1, d0, d1]: [Quaternion; 4]) -> Quaternion {
    (g0 + g1) * (0.5 * h) + (d0 - d1) * (h * h / 12.0)
}

/// Edges of the spanning tree in visiting order: `(from, to)`.
fn spanning_tree(nx: usize, ny: usize, base: (usize, usize), order: IntegrationOrder) -> Vec<((usize, usize), (usize, usize))> {
    let (i0, j0) = base;
    let mut edges = Vec::with_capacity(nx * ny);
    let sweep = |k0: usize, n: usize| -> Vec<(usize, usize)> {
        (k0 + 1..n).map(|k| (k - 1, k)).chain((0..k0).rev().map(|k| (k + 1, k))).collect()
    };
    match order {
        IntegrationOrder::RowFirst => {
            for (a, b) in sweep(i0, nx) {
                edges.push(((a, j0), (b, j0)));
            }
            for i in 0..nx {
                for (a, b) in sweep(j0, ny) {
                    edges.push(((i, a), (i, b)));
                }
            }
        }
        IntegrationOrder::ColumnFirst => {
            for (a, b) in sweep(j0, ny) {
                edges.push(((i0, a), (i0, b)));
            }
            for j in 0..ny {
                for (a, b) in sweep(i0, nx) {
                    edges.push(((a, j), (b, j)));
                }
            }
        }
    }
    edges
}

/// Exponent of the edge from `a` to the adjacent node `b` (negated when
/// traversed against the grid direction).
fn edge_increment(
    g: &ImmersionGrid,
    forms: &Forms,
    a: (usize, usize),
    b: (usize, usize),
    rule: fn(f64, [Quaternion; 4]) -> Quaternion,
) -> Quaternion {
    let along_x = a.1 == b.1;
    let (lo, forward) = if along_x {
        ((a.0.min(b.0), a.1), b.0 > a.0)
    } else {
        ((a.0, a.1.min(b.1)), b.1 > a.1)
    };
    let h = if along_x { g.hx } else { g.hy };
    let w = rule(h, forms.endpoints(along_x, lo.0, lo.1));
    if forward {
        w
    } else {
        -w
    }
}

fn check_base(g: &ImmersionGrid, base: (usize, usize)) -> Result<()> {
    if base.0 >= g.nx || base.1 >= g.ny {
        return Err(Error::InvalidPath(format!(
            "base point {base:?} outside the {}x{} grid",
            g.nx, g.ny
        )));
    }
    Ok(())
}

/// Per-plaquette density of the discrete Maurer–Cartan defect, `|holonomy - 1| / (hx hy)`.
///
/// For an R^3 grid this measures `d a + a ^ a` for `a = df o J` and vanishes
/// exactly for CMC-1 input; a plane gives density 2. For an S^3 grid it
/// measures the closedness of `f~^-1 (df~ o J)`, which holds exactly for
/// minimal input. Indexed by the lower-left node, `(nx - 1) x (ny - 1)`.
pub fn loop_residual(g: &ImmersionGrid) -> Result<Field<f64>> {
    let forms = cousin_forms(g)?;
    Ok(loop_residual_from(g, &forms))
}

fn loop_residual_from(g: &ImmersionGrid, forms: &Forms) -> Field<f64> {
    let area = g.hx * g.hy;
    Field::from_fn(g.nx - 1, g.ny - 1, |i, j| {
        let inc = |a, b| match g.ambient {
            Ambient::R3 => edge_increment(g, forms, a, b, magnus),
            Ambient::S3 => edge_increment(g, forms, a, b, trapezoid),
        };
        let e1 = inc((i, j), (i + 1, j));
        let e2 = inc((i + 1, j), (i + 1, j + 1));
        let e3 = inc((i + 1, j + 1), (i, j + 1));
        let e4 = inc((i, j + 1), (i, j));
        let defect = match g.ambient {
            Ambient::R3 => (e1.exp() * e2.exp() * e3.exp() * e4.exp() - Quaternion::ONE).norm(),
            Ambient::S3 => (e1 + e2 + e3 + e4).norm(),
        };
        defect / area
    })
}

fn require_integrable(g: &ImmersionGrid, forms: &Forms, opts: &IntegrationOptions) -> Result<f64> {
    let res = loop_residual_from(g, forms);
    let (worst, i, j) = res.max_with_index();
    let tol = opts.tolerances.tau_loop(g.h());
    if opts.check_integrability && !(worst <= tol) {
        return Err(Error::NotIntegrable {
            expected: match g.ambient {
                Ambient::R3 => "CMC",
                Ambient::S3 => "minimal",
            },
            i,
            j,
            density: worst,
            tolerance: tol,
        });
    }
    Ok(worst)
}

/// Integrates `d f~ = f~ (df o J)` for a CMC-1 grid `f` in R^3.
pub fn integrate_to_s3(f: &ImmersionGrid, opts: &IntegrationOptions) -> Result<CousinPair> {
    f.require(Ambient::R3)?;
    check_base(f, opts.base_point)?;
    let forms = cousin_forms(f)?;
    let loop_max = require_integrable(f, &forms, opts)?;

    let mut vals = Field::from_fn(f.nx, f.ny, |_, _| Quaternion::ZERO);
    vals.set(opts.base_point.0, opts.base_point.1, opts.base_value.quat());
    let mut drift: f64 = 0.0;
    for (a, b) in spanning_tree(f.nx, f.ny, opts.base_point, opts.order) {
        let w = edge_increment(f, &forms, a, b, magnus);
        let q = vals.get(a.0, a.1) * w.exp();
        drift = drift.max((q.norm() - 1.0).abs());
        vals.set(b.0, b.1, settle(q));
    }
    if drift > DRIFT_LIMIT {
        return Err(Error::IntegrationUnstable {
            drift,
            limit: DRIFT_LIMIT,
        });
    }
    let ftilde = f.with_values(Ambient::S3, vals)?;
    let isometry_error = isometry_error(f, &ftilde);
    Ok(CousinPair {
        f: f.clone(),
        ftilde,
        base_point: opts.base_point,
        drift_log: drift,
        loop_residual_max: loop_max,
        isometry_error,
    })
}

/// Integrates `df = -f~^-1 (d f~ o J)` for a minimal grid `f~` in S^3.
pub fn integrate_to_r3(ftilde: &ImmersionGrid, opts: &IntegrationOptions) -> Result<CousinPair> {
    ftilde.require(Ambient::S3)?;
    check_base(ftilde, opts.base_point)?;
    let drift = ftilde
        .values
        .data
        .iter()
        .map(|q| (q.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let forms = cousin_forms(ftilde)?;
    let loop_max = require_integrable(ftilde, &forms, opts)?;

    let mut vals = Field::from_fn(ftilde.nx, ftilde.ny, |_, _| Quaternion::ZERO);
    vals.set(opts.base_point.0, opts.base_point.1, opts.base_offset.im());
    for (a, b) in spanning_tree(ftilde.nx, ftilde.ny, opts.base_point, opts.order) {
        let w = edge_increment(ftilde, &forms, a, b, trapezoid);
        vals.set(b.0, b.1, vals.get(a.0, a.1) + w);
    }
    let f = ftilde.with_values(Ambient::R3, vals)?;

    let h = median(&shape_operator(&f)?.mean_curvature().data);
    if h < 0.0 {
        return Err(Error::OrientationSign { mean_curvature: h });
    }
    let isometry_error = isometry_error(&f, ftilde);
    Ok(CousinPair {
        f,
        ftilde: ftilde.clone(),
        base_point: opts.base_point,
        drift_log: drift,
        loop_residual_max: loop_max,
        isometry_error,
    })
}

fn median(v: &[f64]) -> f64 {
    let mut s: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
    if s.is_empty() {
        return f64::NAN;
    }
    s.sort_by(f64::total_cmp);
    s[s.len() / 2]
}

/// `max |E - E~| + |F - F~| + |G - G~|` over all nodes.
pub fn isometry_error(f: &ImmersionGrid, ftilde: &ImmersionGrid) -> f64 {
    let m = MetricField::from_derivatives(&derivatives_with(f, FdOrder::Fourth));
    let mt = MetricField::from_derivatives(&derivatives_with(ftilde, FdOrder::Fourth));
    (0..f.nx * f.ny)
        .map(|k| {
            (m.e.data[k] - mt.e.data[k]).abs()
                + (m.f.data[k] - mt.f.data[k]).abs()
                + (m.g.data[k] - mt.g.data[k]).abs()
        })
        .fold(0.0, f64::max)
}

/// Pointwise `|nu~ - f~ nu|`.
pub fn verify_normal_relation(pair: &CousinPair) -> Result<Field<f64>> {
    let nu = normal(&pair.f)?;
    let nut = normal(&pair.ftilde)?;
    Ok(Field::from_fn(pair.f.nx, pair.f.ny, |i, j| {
        (nut.get(i, j) - pair.ftilde.at(i, j) * nu.get(i, j)).norm()
    }))
}

/// Pointwise operator norm of `J S~ - S + Id`, measured in the metric of `f`.
pub fn verify_shape_relation(pair: &CousinPair) -> Result<Field<f64>> {
    let s = shape_operator(&pair.f)?;
    let st = shape_operator(&pair.ftilde)?;
    Ok(Field::from_fn(pair.f.nx, pair.f.ny, |i, j| {
        let (e, f, g) = s.metric.at(i, j);
        let jm = j_matrix(e, f, g);
        let a = s.s.get(i, j);
        let b = st.s.get(i, j);
        let mut r = [[0.0; 2]; 2];
        for (row, rr) in r.iter_mut().enumerate() {
            for (col, v) in rr.iter_mut().enumerate() {
                let js = jm[row][0] * b[0][col] + jm[row][1] * b[1][col];
                let id = if row == col { 1.0 } else { 0.0 };
                *v = js - a[row][col] + id;
            }
        }
        metric_operator_norm(e, f, g, r)
    }))
}

/// Largest singular value of `m` as a map of the tangent plane with metric `(E, F, G)`.
fn metric_operator_norm(e: f64, f: f64, g: f64, m: [[f64; 2]; 2]) -> f64 {
    // Cholesky G = L^T L with L upper triangular; the orthonormal-frame matrix is L m L^-1.
    let l11 = e.sqrt();
    let l12 = f / l11;
    let l22 = (g - l12 * l12).sqrt();
    let l = [[l11, l12], [0.0, l22]];
    let linv = [[1.0 / l11, -l12 / (l11 * l22)], [0.0, 1.0 / l22]];
    let mul = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
        let mut c = [[0.0; 2]; 2];
        for r in 0..2 {
            for k in 0..2 {
                c[r][k] = a[r][0] * b[0][k] + a[r][1] * b[1][k];
            }
        }
        c
    };
    let n = mul(mul(l, m), linv);
    let fro2 = n.iter().flatten().map(|v| v * v).sum::<f64>();
    let det = n[0][0] * n[1][1] - n[0][1] * n[1][0];
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (fro2 + disc)).sqrt()
}

/// Both forms of the period of a path, `(direct, cousin)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PeriodValues {
    /// `int <gamma', d>` on `f`.
    pub direct: f64,
    /// `-int <df~(J gamma'), f~ d>` on `f~`.
    pub cousin: f64,
}

/// The period of `path` in direction `d`, returned after the two forms agree within `tau_period`.
pub fn period(pair: &CousinPair, path: &[(usize, usize)], direction: Quaternion, tol: &Tolerances) -> Result<f64> {
    let v = period_forms(pair, path, direction)?;
    if !((v.direct - v.cousin).abs() <= tol.tau_period) {
        return Err(Error::PeriodMismatch {
            direct: v.direct,
            cousin: v.cousin,
            tolerance: tol.tau_period,
        });
    }
    Ok(v.direct)
}

/// Evaluates both forms of the period without comparing them. The path
/// must start and end on different flagged boundary edges of the grid.
pub fn period_forms(pair: &CousinPair, path: &[(usize, usize)], direction: Quaternion) -> Result<PeriodValues> {
    let g = &pair.f;
    check_adjacent(path)?;
    if let Some(&(i, j)) = path.iter().find(|&&(i, j)| i >= g.nx || j >= g.ny) {
        return Err(Error::InvalidPath(format!("node ({i}, {j}) outside the grid")));
    }
    let first = path[0];
    let last = *path.last().unwrap_or(&first);
    let on = |n: (usize, usize)| -> Vec<Edge> {
        g.boundary
            .edges()
            .into_iter()
            .filter(|&e| g.edge_nodes(e).contains(&n))
            .collect()
    };
    let (ea, eb) = (on(first), on(last));
    if ea.is_empty() || eb.is_empty() || ea.iter().all(|e| eb.contains(e)) {
        return Err(Error::InvalidPath(
            "path must run between two different boundary components".into(),
        ));
    }
    let d = direction.im();
    let direct = (g.at(last.0, last.1) - g.at(first.0, first.1)).dot(d);
    let forms = cousin_forms(&pair.ftilde)?;
    let cousin = path
        .windows(2)
        .map(|w| edge_increment(&pair.ftilde, &forms, w[0], w[1], trapezoid).dot(d))
        .sum();
    Ok(PeriodValues { direct, cousin })
}

/// For a boundary curve of `f` whose conormal is the constant `u`, the
/// tangent of the cousin curve should be parallel to `f~ u`. Returns the
/// largest sine of the angle between `f~^-1 (f~ o gamma)'` and `u`.
pub fn boundary_tangent_defect(pair: &CousinPair, curve: &BoundaryCurve, u: Quaternion) -> Result<f64> {
    check_adjacent(&curve.nodes)?;
    let d = derivatives_with(&pair.ftilde, FdOrder::Fourth);
    let u = u.im().normalized();
    let mut worst: f64 = 0.0;
    for w in curve.nodes.windows(2) {
        for &(i, j) in w {
            let along_x = w[0].1 == w[1].1;
            let t = if along_x { d.fx.get(i, j) } else { d.fy.get(i, j) };
            let v = (pair.ftilde.at(i, j).conj() * t).im();
            if v.norm() == 0.0 {
                continue;
            }
            worst = worst.max(v.normalized().cross(u).norm());
        }
    }
    Ok(worst)
}
