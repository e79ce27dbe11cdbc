//! Immersion grids and finite-difference differential geometry.
//!
//! A grid samples `f(x, y)` at `x = x0 + i hx`, `y = y0 + j hy` for
//! `i < nx`, `j < ny`, stored row-major (`j` outer). Values are imaginary
//! quaternions for surfaces in R^3 and unit quaternions for surfaces in S^3.
//! Derivatives are second-order central in the interior and second-order
//! one-sided on the boundary; a fourth-order variant is available for the
//! cousin integrator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::tolerances::{EPS_RANK, EPS_UNIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ambient {
    R3,
    S3,
}

impl Ambient {
    pub fn name(self) -> &'static str {
        match self {
            Ambient::R3 => "R3",
            Ambient::S3 => "S3",
        }
    }
}

/// Which edges of the parameter rectangle are symmetry-curve boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BoundaryFlags {
    /// `j = 0`
    pub bottom: bool,
    /// `i = nx - 1`
    pub right: bool,
    /// `j = ny - 1`
    pub top: bool,
    /// `i = 0`
    pub left: bool,
}

/// The four edges of the parameter rectangle, in counterclockwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    Bottom,
    Right,
    Top,
    Left,
}

impl BoundaryFlags {
    pub fn horizontal() -> Self {
        Self {
            bottom: true,
            top: true,
            ..Self::default()
        }
    }

    /// Flagged edges in counterclockwise order starting at the bottom.
    pub fn edges(&self) -> Vec<Edge> {
        let mut v = Vec::new();
        if self.bottom {
            v.push(Edge::Bottom);
        }
        if self.right {
            v.push(Edge::Right);
        }
        if self.top {
            v.push(Edge::Top);
        }
        if self.left {
            v.push(Edge::Left);
        }
        v
    }
}

/// Scalar, vector or matrix data attached to every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<T>,
}

impl<T: Copy> Field<T> {
    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                data.push(f(i, j));
            }
        }
        Self { nx, ny, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.nx + i] = v;
    }

    pub fn map<U: Copy>(&self, mut f: impl FnMut(T) -> U) -> Field<U> {
        Field {
            nx: self.nx,
            ny: self.ny,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn row(&self, j: usize) -> Vec<T> {
        (0..self.nx).map(|i| self.get(i, j)).collect()
    }

    pub fn column(&self, i: usize) -> Vec<T> {
        (0..self.ny).map(|j| self.get(i, j)).collect()
    }
}

impl Field<f64> {
    /// Maximum over all nodes with its location.
    pub fn max_with_index(&self) -> (f64, usize, usize) {
        self.max_in(0, self.nx, 0, self.ny)
    }

    pub fn max(&self) -> f64 {
        self.max_with_index().0
    }

    /// Maximum over nodes at least `margin` away from every edge.
    pub fn max_interior(&self, margin: usize) -> f64 {
        if self.nx <= 2 * margin || self.ny <= 2 * margin {
            return f64::NAN;
        }
        self.max_in(margin, self.nx - margin, margin, self.ny - margin).0
    }

    fn max_in(&self, i0: usize, i1: usize, j0: usize, j1: usize) -> (f64, usize, usize) {
        let mut best = (f64::NEG_INFINITY, i0, j0);
        for j in j0..j1 {
            for i in i0..i1 {
                let v = self.get(i, j);
                if v > best.0 || v.is_nan() {
                    best = (v, i, j);
                    if v.is_nan() {
                        return best;
                    }
                }
            }
        }
        best
    }
}

/// Values that finite-difference stencils can combine.
pub trait FdValue:
    Copy + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<f64, Output = Self>
{
}
impl FdValue for f64 {}
impl FdValue for Quaternion {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    Second,
    Fourth,
}

/// First derivative of equally spaced samples.
// One-sided stencils for the two nodes nearest an edge, sixth-order accurate
// so that boundary truncation does not dominate the interior fourth-order error.
const EDGE1: [[f64; 7]; 2] = [
    [-147.0, 360.0, -450.0, 400.0, -225.0, 72.0, -10.0],
    [-10.0, -77.0, 150.0, -100.0, 50.0, -15.0, 2.0],
];
const EDGE2: [[f64; 8]; 2] = [
    [938.0, -4014.0, 7911.0, -9490.0, 7380.0, -3618.0, 1019.0, -126.0],
    [126.0, -70.0, -486.0, 855.0, -670.0, 324.0, -90.0, 11.0],
];

fn edge_stencil<V: FdValue>(v: &[V], w: &[f64], denom: f64) -> V {
    let mut acc = v[0] * (w[0] / denom);
    for (x, c) in v.iter().zip(w).skip(1) {
        acc = acc + *x * (c / denom);
    }
    acc
}

pub fn diff_line<V: FdValue>(v: &[V], h: f64, order: FdOrder) -> Vec<V> {
    let n = v.len();
    let mut out = Vec::with_capacity(n);
    match order {
        FdOrder::Second => {
            let s = 1.0 / (2.0 * h);
            for k in 0..n {
                let d = if k == 0 {
                    (v[1] * 4.0 - v[0] * 3.0 - v[2]) * s
                } else if k == n - 1 {
                    (v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) * s
                } else {
                    (v[k + 1] - v[k - 1]) * s
                };
                out.push(d);
            }
        }
        FdOrder::Fourth if n >= EDGE1[0].len() => {
            let s = 1.0 / (12.0 * h);
            let e = 1.0 / h;
            let m = EDGE1[0].len();
            for k in 0..n {
                let d = if k < 2 {
                    edge_stencil(&v[..m], &EDGE1[k], 60.0) * e
                } else if k >= n - 2 {
                    let r: Vec<V> = v[n - m..].iter().rev().copied().collect();
                    edge_stencil(&r, &EDGE1[n - 1 - k], 60.0) * -e
                } else {
                    (v[k - 2] - v[k - 1] * 8.0 + v[k + 1] * 8.0 - v[k + 2]) * s
                };
                out.push(d);
            }
        }
        FdOrder::Fourth => {
            let s = 1.0 / (12.0 * h);
            let fwd0 = |a: &[V]| (a[1] * 48.0 - a[0] * 25.0 - a[2] * 36.0 + a[3] * 16.0 - a[4] * 3.0) * s;
            let fwd1 = |a: &[V]| (a[2] * 18.0 - a[0] * 3.0 - a[1] * 10.0 - a[3] * 6.0 + a[4]) * s;
            for k in 0..n {
                let d = if k == 0 {
                    fwd0(&v[0..5])
                } else if k == 1 {
                    fwd1(&v[0..5])
                } else if k == n - 1 {
                    let r: Vec<V> = v[n - 5..].iter().rev().copied().collect();
                    fwd0(&r) * -1.0
                } else if k == n - 2 {
                    let r: Vec<V> = v[n - 5..].iter().rev().copied().collect();
                    fwd1(&r) * -1.0
                } else {
                    (v[k - 2] - v[k - 1] * 8.0 + v[k + 1] * 8.0 - v[k + 2]) * s
                };
                out.push(d);
            }
        }
    }
    out
}

/// Second derivative of equally spaced samples, second order everywhere.
pub fn diff2_line<V: FdValue>(v: &[V], h: f64) -> Vec<V> {
    let n = v.len();
    let s = 1.0 / (h * h);
    (0..n)
        .map(|k| {
            if k == 0 {
                (v[0] * 2.0 - v[1] * 5.0 + v[2] * 4.0 - v[3]) * s
            } else if k == n - 1 {
                (v[n - 1] * 2.0 - v[n - 2] * 5.0 + v[n - 3] * 4.0 - v[n - 4]) * s
            } else {
                (v[k + 1] - v[k] * 2.0 + v[k - 1]) * s
            }
        })
        .collect()
}

/// Second derivative with the requested accuracy. Fourth order uses the
/// five-point central stencil and six-point one-sided stencils at the two
/// outermost nodes; lines shorter than six samples fall back to second order.
pub fn diff2_line_with<V: FdValue>(v: &[V], h: f64, order: FdOrder) -> Vec<V> {
    let n = v.len();
    if order == FdOrder::Second || n < 6 {
        return diff2_line(v, h);
    }
    let s = 1.0 / (12.0 * h * h);
    let e = 1.0 / (h * h);
    let m = EDGE2[0].len();
    if n < m {
        let edge0 = |a: &[V]| (a[0] * 45.0 - a[1] * 154.0 + a[2] * 214.0 - a[3] * 156.0 + a[4] * 61.0 - a[5] * 10.0) * s;
        let edge1 = |a: &[V]| (a[0] * 10.0 - a[1] * 15.0 - a[2] * 4.0 + a[3] * 14.0 - a[4] * 6.0 + a[5]) * s;
        let rev: Vec<V> = v[n - 6..].iter().rev().copied().collect();
        return (0..n)
            .map(|k| match k {
                0 => edge0(&v[..6]),
                1 => edge1(&v[..6]),
                k if k == n - 1 => edge0(&rev),
                k if k == n - 2 => edge1(&rev),
                k => (v[k + 1] * 16.0 + v[k - 1] * 16.0 - v[k] * 30.0 - v[k + 2] - v[k - 2]) * s,
            })
            .collect();
    }
    let rev: Vec<V> = v[n - m..].iter().rev().copied().collect();
    (0..n)
        .map(|k| {
            if k < 2 {
                edge_stencil(&v[..m], &EDGE2[k], 180.0) * e
            } else if k >= n - 2 {
                edge_stencil(&rev, &EDGE2[n - 1 - k], 180.0) * e
            } else {
                (v[k + 1] * 16.0 + v[k - 1] * 16.0 - v[k] * 30.0 - v[k + 2] - v[k - 2]) * s
            }
        })
        .collect()
}

fn apply_x<V: FdValue>(f: &Field<V>, mut op: impl FnMut(&[V]) -> Vec<V>) -> Field<V> {
    let mut out = f.clone();
    for j in 0..f.ny {
        let d = op(&f.row(j));
        for (i, v) in d.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}

fn apply_y<V: FdValue>(f: &Field<V>, mut op: impl FnMut(&[V]) -> Vec<V>) -> Field<V> {
    let mut out = f.clone();
    for i in 0..f.nx {
        let d = op(&f.column(i));
        for (j, v) in d.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}

/// `d/dx` of a field.
pub fn dx<V: FdValue>(f: &Field<V>, hx: f64, order: FdOrder) -> Field<V> {
    apply_x(f, |r| diff_line(r, hx, order))
}

/// `d/dy` of a field.
pub fn dy<V: FdValue>(f: &Field<V>, hy: f64, order: FdOrder) -> Field<V> {
    apply_y(f, |c| diff_line(c, hy, order))
}

pub fn dxx<V: FdValue>(f: &Field<V>, hx: f64) -> Field<V> {
    apply_x(f, |r| diff2_line(r, hx))
}

pub fn dyy<V: FdValue>(f: &Field<V>, hy: f64) -> Field<V> {
    apply_y(f, |c| diff2_line(c, hy))
}

/// A rectangular sample of an immersion into R^3 or S^3.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionGrid {
    pub ambient: Ambient,
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub values: Field<Quaternion>,
    pub boundary: BoundaryFlags,
}

/// Smallest grid on which every stencil is defined.
pub const MIN_GRID: usize = 5;

impl ImmersionGrid {
    /// Builds a grid, validating the ambient constraint at every node.
    pub fn new(
        ambient: Ambient,
        (x0, hx): (f64, f64),
        (y0, hy): (f64, f64),
        values: Field<Quaternion>,
    ) -> Result<Self> {
        let (nx, ny) = (values.nx, values.ny);
        if nx < MIN_GRID || ny < MIN_GRID {
            return Err(Error::GridTooSmall { nx, ny, min: MIN_GRID });
        }
        if values.data.len() != nx * ny {
            return Err(Error::GridShape(format!(
                "{} values for a {nx}x{ny} grid",
                values.data.len()
            )));
        }
        if !(hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite()) {
            return Err(Error::GridShape(format!("spacings must be positive, got {hx}, {hy}")));
        }
        for j in 0..ny {
            for i in 0..nx {
                let q = values.get(i, j);
                let deviation = match ambient {
                    Ambient::R3 => q.w.abs(),
                    Ambient::S3 => (q.norm() - 1.0).abs(),
                };
                if !q.is_finite() || deviation > EPS_UNIT {
                    return Err(Error::AmbientViolation {
                        i,
                        j,
                        ambient: ambient.name(),
                        deviation,
                    });
                }
            }
        }
        Ok(Self {
            ambient,
            nx,
            ny,
            x0,
            y0,
            hx,
            hy,
            values,
            boundary: BoundaryFlags::default(),
        })
    }

    /// Samples `f` on the grid `x0 + i hx`, `y0 + j hy`.
    pub fn from_fn(
        ambient: Ambient,
        (x0, hx, nx): (f64, f64, usize),
        (y0, hy, ny): (f64, f64, usize),
        f: impl Fn(f64, f64) -> Quaternion,
    ) -> Result<Self> {
        let values = Field::from_fn(nx, ny, |i, j| f(x0 + i as f64 * hx, y0 + j as f64 * hy));
        Self::new(ambient, (x0, hx), (y0, hy), values)
    }

    pub fn with_boundary(mut self, boundary: BoundaryFlags) -> Self {
        self.boundary = boundary;
        self
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Quaternion {
        self.values.get(i, j)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    /// Largest parameter spacing.
    pub fn h(&self) -> f64 {
        self.hx.max(self.hy)
    }

    pub fn same_shape(&self, o: &ImmersionGrid) -> bool {
        self.nx == o.nx
            && self.ny == o.ny
            && (self.hx - o.hx).abs() <= 1e-14 * self.hx
            && (self.hy - o.hy).abs() <= 1e-14 * self.hy
    }

    /// Copy with new values and the same parameter layout.
    pub fn with_values(&self, ambient: Ambient, values: Field<Quaternion>) -> Result<Self> {
        Ok(Self::new(ambient, (self.x0, self.hx), (self.y0, self.hy), values)?.with_boundary(self.boundary))
    }

    /// Node indices along one edge, oriented counterclockwise around the rectangle.
    pub fn edge_nodes(&self, edge: Edge) -> Vec<(usize, usize)> {
        let (nx, ny) = (self.nx, self.ny);
        match edge {
            Edge::Bottom => (0..nx).map(|i| (i, 0)).collect(),
            Edge::Right => (0..ny).map(|j| (nx - 1, j)).collect(),
            Edge::Top => (0..nx).rev().map(|i| (i, ny - 1)).collect(),
            Edge::Left => (0..ny).rev().map(|j| (0, j)).collect(),
        }
    }

    pub(crate) fn require(&self, ambient: Ambient) -> Result<()> {
        if self.ambient != ambient {
            return Err(Error::WrongAmbient {
                expected: ambient.name(),
                found: self.ambient.name(),
            });
        }
        Ok(())
    }
}

/// Partial derivatives of a grid.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub fx: Field<Quaternion>,
    pub fy: Field<Quaternion>,
}

/// First partials, second order.
pub fn derivatives(g: &ImmersionGrid) -> Derivatives {
    derivatives_with(g, FdOrder::Second)
}

pub fn derivatives_with(g: &ImmersionGrid, order: FdOrder) -> Derivatives {
    Derivatives {
        fx: dx(&g.values, g.hx, order),
        fy: dy(&g.values, g.hy, order),
    }
}

/// First fundamental form coefficients.
#[derive(Debug, Clone)]
pub struct MetricField {
    pub e: Field<f64>,
    pub f: Field<f64>,
    pub g: Field<f64>,
}

impl MetricField {
    pub fn from_derivatives(d: &Derivatives) -> Self {
        let (nx, ny) = (d.fx.nx, d.fx.ny);
        Self {
            e: Field::from_fn(nx, ny, |i, j| d.fx.get(i, j).norm_sqr()),
            f: Field::from_fn(nx, ny, |i, j| d.fx.get(i, j).dot(d.fy.get(i, j))),
            g: Field::from_fn(nx, ny, |i, j| d.fy.get(i, j).norm_sqr()),
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> (f64, f64, f64) {
        (self.e.get(i, j), self.f.get(i, j), self.g.get(i, j))
    }

    /// Fails at the first node where the metric is not positive definite.
    pub fn check_nondegenerate(&self) -> Result<()> {
        for j in 0..self.e.ny {
            for i in 0..self.e.nx {
                let (e, f, g) = self.at(i, j);
                let det = e * g - f * f;
                if !(e > 0.0 && g > 0.0 && det > EPS_RANK * EPS_RANK * (e * g).max(1e-300)) {
                    return Err(Error::DegenerateNode {
                        i,
                        j,
                        what: format!("metric (E, F, G) = ({e:e}, {f:e}, {g:e}) is degenerate"),
                    });
                }
            }
        }
        Ok(())
    }
}

pub fn metric(g: &ImmersionGrid) -> MetricField {
    MetricField::from_derivatives(&derivatives(g))
}

/// Matrix of the 90 degree rotation `J` in the coordinate frame `(d/dx, d/dy)`:
/// column `c` holds the components of `J` applied to the `c`-th basis vector.
///
/// `J dx = (-F dx + E dy) / W`, `J dy = (-G dx + F dy) / W`, `W = sqrt(EG - F^2)`.
#[inline]
pub fn j_matrix(e: f64, f: f64, g: f64) -> [[f64; 2]; 2] {
    let w = (e * g - f * f).sqrt();
    [[-f / w, -g / w], [e / w, f / w]]
}

/// Applies `J` to a tangent field given in coordinate components `(a, b) = a dx + b dy`.
pub fn apply_j(g: &ImmersionGrid, field: &Field<[f64; 2]>) -> Result<Field<[f64; 2]>> {
    let m = metric(g);
    m.check_nondegenerate()?;
    Ok(Field::from_fn(g.nx, g.ny, |i, j| {
        let (e, f, gg) = m.at(i, j);
        let jm = j_matrix(e, f, gg);
        let [a, b] = field.get(i, j);
        [jm[0][0] * a + jm[0][1] * b, jm[1][0] * a + jm[1][1] * b]
    }))
}

/// Length of a coordinate tangent vector in the metric `(E, F, G)`.
#[inline]
pub fn tangent_norm(e: f64, f: f64, g: f64, v: [f64; 2]) -> f64 {
    (e * v[0] * v[0] + 2.0 * f * v[0] * v[1] + g * v[1] * v[1]).sqrt()
}

/// Unit normal of a surface given its tangent vectors at a point.
///
/// R^3: `fx x fy / |fx x fy|`. S^3: `p * n` where `n` is the unit cross product of the
/// left-translated tangents `p^-1 fx`, `p^-1 fy`.
#[inline]
///
/// `None` when `|f_x x f_y|` falls below `EPS_RANK * scale`.
pub(crate) fn normal_at(
    ambient: Ambient,
    p: Quaternion,
    fx: Quaternion,
    fy: Quaternion,
    scale: f64,
) -> Option<Quaternion> {
    let (a, b) = match ambient {
        Ambient::R3 => (fx, fy),
        Ambient::S3 => (p.conj() * fx, p.conj() * fy),
    };
    let c = a.cross(b);
    let n = c.norm();
    if !(n > EPS_RANK * scale) || !(scale > 0.0) {
        return None;
    }
    let c = c / n;
    Some(match ambient {
        Ambient::R3 => c,
        Ambient::S3 => p * c,
    })
}

/// Unit normal field with the orientation `(f_x, f_y, nu)` positive,
/// from fourth-order tangents.
pub fn normal(g: &ImmersionGrid) -> Result<Field<Quaternion>> {
    normal_from(g, &derivatives_with(g, FdOrder::Fourth))
}

pub(crate) fn normal_from(g: &ImmersionGrid, d: &Derivatives) -> Result<Field<Quaternion>> {
    let scale = (0..g.nx * g.ny)
        .map(|k| d.fx.data[k].norm() * d.fy.data[k].norm())
        .fold(0.0, f64::max);
    let mut data = Vec::with_capacity(g.nx * g.ny);
    for j in 0..g.ny {
        for i in 0..g.nx {
            match normal_at(g.ambient, g.at(i, j), d.fx.get(i, j), d.fy.get(i, j), scale) {
                Some(n) => data.push(n),
                None => {
                    return Err(Error::DegenerateNode {
                        i,
                        j,
                        what: "f_x and f_y are linearly dependent".into(),
                    })
                }
            }
        }
    }
    Ok(Field {
        nx: g.nx,
        ny: g.ny,
        data,
    })
}

/// Pointwise `r1 = |f_x|^2 - |f_y|^2` and `r2 = |f_x f_y + f_y f_x|`.
pub fn conformality_residual(g: &ImmersionGrid) -> (Field<f64>, Field<f64>) {
    let d = derivatives(g);
    let r1 = Field::from_fn(g.nx, g.ny, |i, j| d.fx.get(i, j).norm_sqr() - d.fy.get(i, j).norm_sqr());
    let r2 = Field::from_fn(g.nx, g.ny, |i, j| {
        let (a, b) = (d.fx.get(i, j), d.fy.get(i, j));
        match g.ambient {
            Ambient::R3 => (a * b + b * a).norm(),
            Ambient::S3 => 2.0 * a.dot(b).abs(),
        }
    });
    (r1, r2)
}

/// Largest relative deviation from conformality, `max(|E - G|, 2|F|) / ((E + G) / 2)`.
///
/// Evaluated with fourth-order differences so that the verdict reflects the
/// chart rather than the stencil.
pub fn relative_conformality(g: &ImmersionGrid) -> (f64, usize, usize) {
    let m = MetricField::from_derivatives(&derivatives_with(g, FdOrder::Fourth));
    let field = Field::from_fn(g.nx, g.ny, |i, j| {
        let (e, f, gg) = m.at(i, j);
        (e - gg).abs().max(2.0 * f.abs()) / (0.5 * (e + gg))
    });
    field.max_with_index()
}

fn require_conformal(g: &ImmersionGrid, tau_conf: f64) -> Result<()> {
    let (r, i, j) = relative_conformality(g);
    if !(r <= tau_conf) {
        return Err(Error::NotConformal {
            i,
            j,
            residual: r,
            tolerance: tau_conf,
        });
    }
    Ok(())
}

fn laplacian(g: &ImmersionGrid, order: FdOrder) -> Field<Quaternion> {
    let xx = apply_x(&g.values, |r| diff2_line_with(r, g.hx, order));
    let yy = apply_y(&g.values, |c| diff2_line_with(c, g.hy, order));
    Field::from_fn(g.nx, g.ny, |i, j| xx.get(i, j) + yy.get(i, j))
}

/// `|Delta f - 2 f_x f_y|` on a conformal chart; zero exactly when `H = 1`
/// with respect to the normal `f_x x f_y`. Fourth-order stencils.
pub fn cmc_residual(g: &ImmersionGrid, tau_conf: f64) -> Result<Field<f64>> {
    cmc_residual_with(g, tau_conf, FdOrder::Fourth)
}

pub fn cmc_residual_with(g: &ImmersionGrid, tau_conf: f64, order: FdOrder) -> Result<Field<f64>> {
    g.require(Ambient::R3)?;
    require_conformal(g, tau_conf)?;
    let d = derivatives_with(g, order);
    let lap = laplacian(g, order);
    Ok(Field::from_fn(g.nx, g.ny, |i, j| {
        (lap.get(i, j) - d.fx.get(i, j) * d.fy.get(i, j) * 2.0).norm()
    }))
}

/// `|Delta f + f (|f_x|^2 + |f_y|^2)|` on a conformal chart into S^3. Fourth-order stencils.
pub fn minimal_residual_s3(g: &ImmersionGrid, tau_conf: f64) -> Result<Field<f64>> {
    minimal_residual_s3_with(g, tau_conf, FdOrder::Fourth)
}

pub fn minimal_residual_s3_with(g: &ImmersionGrid, tau_conf: f64, order: FdOrder) -> Result<Field<f64>> {
    g.require(Ambient::S3)?;
    require_conformal(g, tau_conf)?;
    let d = derivatives_with(g, order);
    let lap = laplacian(g, order);
    Ok(Field::from_fn(g.nx, g.ny, |i, j| {
        let e = d.fx.get(i, j).norm_sqr() + d.fy.get(i, j).norm_sqr();
        (lap.get(i, j) + g.at(i, j) * e).norm()
    }))
}

/// Shape operator in the coordinate frame: `s[r][c]` is the `r`-component of `S(e_c)`.
#[derive(Debug, Clone)]
pub struct ShapeField {
    pub s: Field<[[f64; 2]; 2]>,
    pub metric: MetricField,
}

impl ShapeField {
    pub fn mean_curvature(&self) -> Field<f64> {
        self.s.map(|m| 0.5 * (m[0][0] + m[1][1]))
    }

    /// `|A|^2`, the sum of squared principal curvatures.
    pub fn norm_a_sqr(&self) -> Field<f64> {
        self.s.map(|m| m[0][0] * m[0][0] + 2.0 * m[0][1] * m[1][0] + m[1][1] * m[1][1])
    }

    /// Principal curvatures (ascending) at a node.
    pub fn principal_curvatures(&self, i: usize, j: usize) -> [f64; 2] {
        let m = self.s.get(i, j);
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        [0.5 * tr - disc, 0.5 * tr + disc]
    }

    /// `|E S12 + F S22 - F S11 - G S21|`: failure of metric self-adjointness.
    pub fn self_adjointness_defect(&self) -> Field<f64> {
        Field::from_fn(self.s.nx, self.s.ny, |i, j| {
            let m = self.s.get(i, j);
            let (e, f, g) = self.metric.at(i, j);
            (e * m[0][1] + f * m[1][1] - f * m[0][0] - g * m[1][0]).abs()
        })
    }
}

/// Solves `d nu = -df o S` for `S` in the `(d/dx, d/dy)` frame.
///
/// The tangential part of `d nu` is taken from the second derivatives,
/// `<nu_x, f_y> = -<nu, (f_y)_x>`, all with fourth-order stencils, so boundary
/// nodes keep full accuracy.
/// The mixed derivative is differenced in both orders, which makes the
/// self-adjointness defect a genuine discretization diagnostic. In S^3 the
/// derivative of the normal is tangent to the surface and the same formulas hold.
pub fn shape_operator(g: &ImmersionGrid) -> Result<ShapeField> {
    let o = FdOrder::Fourth;
    let d = derivatives_with(g, o);
    let m = MetricField::from_derivatives(&d);
    m.check_nondegenerate()?;
    let nu = normal_from(g, &d)?;
    let fxx = apply_x(&g.values, |r| diff2_line_with(r, g.hx, o));
    let fyy = apply_y(&g.values, |c| diff2_line_with(c, g.hy, o));
    let fxy = dy(&d.fx, g.hy, o);
    let fyx = dx(&d.fy, g.hx, o);
    let s = Field::from_fn(g.nx, g.ny, |i, j| {
        let (e, f, gg) = m.at(i, j);
        let det = e * gg - f * f;
        let n = nu.get(i, j);
        let solve = |r0: f64, r1: f64| [(gg * r0 - f * r1) / det, (-f * r0 + e * r1) / det];
        let c0 = solve(n.dot(fxx.get(i, j)), n.dot(fyx.get(i, j)));
        let c1 = solve(n.dot(fxy.get(i, j)), n.dot(fyy.get(i, j)));
        [[c0[0], c1[0]], [c0[1], c1[1]]]
    });
    Ok(ShapeField { s, metric: m })
}

/// Pointwise `Delta_M u + |A|^2 u` using the divergence form of the Laplace–Beltrami operator.
pub fn jacobi_residual(g: &ImmersionGrid, u: &Field<f64>) -> Result<Field<f64>> {
    g.require(Ambient::R3)?;
    if u.nx != g.nx || u.ny != g.ny {
        return Err(Error::GridShape("scalar field shape differs from grid".into()));
    }
    let shape = shape_operator(g)?;
    let a2 = shape.norm_a_sqr();
    let m = &shape.metric;
    let ux = dx(u, g.hx, FdOrder::Second);
    let uy = dy(u, g.hy, FdOrder::Second);
    let w = Field::from_fn(g.nx, g.ny, |i, j| {
        let (e, f, gg) = m.at(i, j);
        (e * gg - f * f).sqrt()
    });
    let flux_x = Field::from_fn(g.nx, g.ny, |i, j| {
        let (_, f, gg) = m.at(i, j);
        (gg * ux.get(i, j) - f * uy.get(i, j)) / w.get(i, j)
    });
    let flux_y = Field::from_fn(g.nx, g.ny, |i, j| {
        let (e, f, _) = m.at(i, j);
        (-f * ux.get(i, j) + e * uy.get(i, j)) / w.get(i, j)
    });
    let div_x = dx(&flux_x, g.hx, FdOrder::Second);
    let div_y = dy(&flux_y, g.hy, FdOrder::Second);
    Ok(Field::from_fn(g.nx, g.ny, |i, j| {
        (div_x.get(i, j) + div_y.get(i, j)) / w.get(i, j) + a2.get(i, j) * u.get(i, j)
    }))
}
