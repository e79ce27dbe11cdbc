//! Spherical metrics on the disk built from developed cells: slit spheres,
//! chains and truncated rays of them, and three-point metrics.
//!
//! Every cell is a region of S^2 (after its placing rotation) and the
//! developing map is the identity on each cell, so the degree at a point is
//! the number of cells whose region contains it. Boundary arcs are oriented
//! with the cell on their left.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moduli::SphericalTriple;
use crate::quat::{spherical_distance, Quaternion, SpherePoint, UnitQuaternion};

/// Distance below which points and arcs are treated as coincident.
pub const EPS_ARC: f64 = 1e-9;

/// Great-circle arc from `p`, turning counterclockwise about `pole` through
/// `length`. The left side of the arc is the hemisphere containing `pole`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreatArc {
    pub p: SpherePoint,
    pub q: SpherePoint,
    pub pole: SpherePoint,
    pub length: f64,
}

impl GreatArc {
    /// The unique minimizing arc between non-antipodal, distinct points.
    pub fn minimizing(p: SpherePoint, q: SpherePoint) -> Result<Self> {
        let c = p.quat().cross(q.quat());
        let length = spherical_distance(p, q);
        if length <= EPS_ARC || c.norm() <= EPS_ARC {
            return Err(Error::NonMinimizingArc(length));
        }
        Ok(Self {
            p,
            q,
            pole: SpherePoint::new_unchecked(c.normalized()),
            length,
        })
    }

    /// The arc of the given length starting at `p` on the great circle about `pole`.
    pub fn from_pole(p: SpherePoint, pole: SpherePoint, length: f64) -> Result<Self> {
        if p.dot(pole).abs() > EPS_ARC {
            return Err(Error::InvalidQuaternion("arc start is not on the great circle of its pole".into()));
        }
        if !(length > 0.0 && length < TAU) {
            return Err(Error::NonMinimizingArc(length));
        }
        let q = UnitQuaternion::from_axis_angle(pole, length).rotate_point(p);
        Ok(Self { p, q, pole, length })
    }

    /// Standard arc of length `n` along the equator from `i`.
    pub fn equatorial(n: f64) -> Result<Self> {
        Self::from_pole(SpherePoint::I, SpherePoint::K, n)
    }

    pub fn is_minimizing(&self) -> bool {
        self.length <= PI + EPS_ARC
    }

    pub fn reversed(&self) -> Self {
        Self {
            p: self.q,
            q: self.p,
            pole: self.pole.neg(),
            length: self.length,
        }
    }

    pub fn rotated(&self, a: UnitQuaternion) -> Self {
        Self {
            p: a.rotate_point(self.p),
            q: a.rotate_point(self.q),
            pole: a.rotate_point(self.pole),
            length: self.length,
        }
    }

    /// Spherical distance from `x` to the arc.
    pub fn distance_to(&self, x: SpherePoint) -> f64 {
        let (p, n, x) = (self.p.quat(), self.pole.quat(), x.quat());
        let t = n.cross(p);
        let theta = x.dot(t).atan2(x.dot(p)).rem_euclid(TAU);
        if theta <= self.length {
            x.dot(n).clamp(-1.0, 1.0).asin().abs()
        } else {
            spherical_distance(self.p, SpherePoint::new_unchecked(x))
                .min(spherical_distance(self.q, SpherePoint::new_unchecked(x)))
        }
    }

    fn matches(&self, o: &GreatArc) -> bool {
        spherical_distance(self.p, o.p) <= EPS_ARC
            && spherical_distance(self.q, o.q) <= EPS_ARC
            && spherical_distance(self.pole, o.pole) <= EPS_ARC
            && (self.length - o.length).abs() <= EPS_ARC
    }
}

/// Region of S^2 occupied by a cell, in the cell's own coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// `S^2` minus a closed arc.
    SlitSphere { arc: GreatArc },
    /// The open hemisphere about `pole`.
    Hemisphere { pole: SpherePoint },
    /// The region to the left of the loop of minimizing arcs through `vertices`.
    Triangle { vertices: [SpherePoint; 3] },
}

fn det3(a: SpherePoint, b: SpherePoint, c: SpherePoint) -> f64 {
    a.quat().cross(b.quat()).dot(c.quat())
}

impl Region {
    pub fn contains(&self, x: SpherePoint) -> bool {
        match self {
            Region::SlitSphere { arc } => arc.distance_to(x) > 0.0,
            Region::Hemisphere { pole } => pole.dot(x) > 0.0,
            Region::Triangle { vertices: v } => {
                let side = |i: usize| det3(v[i], v[(i + 1) % 3], x);
                if det3(v[0], v[1], v[2]) > 0.0 {
                    (0..3).all(|i| side(i) > 0.0)
                } else {
                    (0..3).any(|i| side(i) > 0.0)
                }
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Region::SlitSphere { .. } => 2.0 * TAU,
            Region::Hemisphere { .. } => TAU,
            Region::Triangle { vertices: v } => {
                let e = excess(v[0], v[1], v[2]);
                if det3(v[0], v[1], v[2]) > 0.0 {
                    e
                } else {
                    2.0 * TAU - e
                }
            }
        }
    }

    /// The arcs bounding the region (slits count once).
    pub fn boundary_arcs(&self) -> Vec<GreatArc> {
        match self {
            Region::SlitSphere { arc } => vec![*arc],
            Region::Hemisphere { pole } => {
                let p = SpherePoint::new_unchecked(orthogonal(pole.quat()));
                // Two half circles cover the boundary great circle.
                let a = GreatArc::from_pole(p, *pole, PI).expect("orthogonal start");
                vec![a, GreatArc::from_pole(a.q, *pole, PI).expect("orthogonal start")]
            }
            Region::Triangle { vertices: v } => (0..3)
                .filter_map(|i| GreatArc::minimizing(v[i], v[(i + 1) % 3]).ok())
                .collect(),
        }
    }
}

fn orthogonal(n: Quaternion) -> Quaternion {
    let trial = if n.x.abs() < 0.9 { Quaternion::I } else { Quaternion::J };
    n.cross(trial).normalized()
}

/// Area of the small spherical triangle: `2 atan2(|det|, 1 + a.b + b.c + c.a)`.
fn excess(a: SpherePoint, b: SpherePoint, c: SpherePoint) -> f64 {
    let d = det3(a, b, c).abs();
    2.0 * d.atan2(1.0 + a.dot(b) + b.dot(c) + c.dot(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellRole {
    /// A slit sphere of a chain or ray.
    Slit,
    /// The central triangle of a three-point metric.
    Core,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub region: Region,
    pub role: CellRole,
    /// Places the region in the common development.
    pub rotation: UnitQuaternion,
}

impl Cell {
    fn new(region: Region, role: CellRole) -> Self {
        Self {
            region,
            role,
            rotation: UnitQuaternion::IDENTITY,
        }
    }

    pub fn contains(&self, x: SpherePoint) -> bool {
        self.region.contains(self.rotation.conj().rotate_point(x))
    }

    pub fn boundary_arcs(&self) -> Vec<GreatArc> {
        self.region.boundary_arcs().iter().map(|a| a.rotated(self.rotation)).collect()
    }
}

/// A boundary arc of one cell, developed, with the cell on its left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPiece {
    pub cell: usize,
    pub arc: GreatArc,
    /// Artificial boundary left by truncating a ray.
    pub truncation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gluing {
    pub a: BoundaryPiece,
    pub b: BoundaryPiece,
}

/// A cell in which a developed point lies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DevelopedPoint {
    pub cell: usize,
    pub position: SpherePoint,
}

/// A spherical metric on the disk as a tree of glued cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetedMetric {
    pub cells: Vec<Cell>,
    pub gluings: Vec<Gluing>,
    /// The remaining boundary as a loop, in order.
    pub boundary: Vec<BoundaryPiece>,
    /// Completion points (where the completion boundary degenerates to points).
    pub completion_points: Vec<SpherePoint>,
}

impl SheetedMetric {
    pub fn area(&self) -> f64 {
        self.cells.iter().map(|c| c.region.area()).sum()
    }

    /// The boundary arcs that belong to the metric rather than to a truncation.
    pub fn completion_boundary(&self) -> Vec<BoundaryPiece> {
        self.boundary.iter().copied().filter(|b| !b.truncation).collect()
    }

    pub fn completion_boundary_length(&self) -> f64 {
        self.completion_boundary().iter().map(|b| b.arc.length).sum()
    }

    pub fn truncation_length(&self) -> f64 {
        self.boundary.iter().filter(|b| b.truncation).map(|b| b.arc.length).sum()
    }

    /// Cells whose developed region contains `q`.
    pub fn preimages(&self, q: SpherePoint) -> Result<Vec<DevelopedPoint>> {
        for (index, cell) in self.cells.iter().enumerate() {
            for arc in cell.boundary_arcs() {
                let d = arc.distance_to(q);
                if d <= EPS_ARC {
                    return Err(Error::QueryOnBoundary(format!(
                        "distance {d:e} to a boundary arc of cell {index}"
                    )));
                }
            }
        }
        Ok(self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(q))
            .map(|(cell, _)| DevelopedPoint { cell, position: q })
            .collect())
    }

    /// Rotates the whole development.
    pub fn rotated(&self, a: UnitQuaternion) -> Self {
        let piece = |b: &BoundaryPiece| BoundaryPiece {
            arc: b.arc.rotated(a),
            ..*b
        };
        Self {
            cells: self
                .cells
                .iter()
                .map(|c| Cell {
                    rotation: a.mul(c.rotation),
                    ..c.clone()
                })
                .collect(),
            gluings: self
                .gluings
                .iter()
                .map(|g| Gluing {
                    a: piece(&g.a),
                    b: piece(&g.b),
                })
                .collect(),
            boundary: self.boundary.iter().map(piece).collect(),
            completion_points: self.completion_points.iter().map(|&p| a.rotate_point(p)).collect(),
        }
    }

    /// Gluing lengths agree and the gluing graph is a spanning tree, so the
    /// union of the cells is a disk.
    pub fn validate(&self) -> Result<()> {
        for g in &self.gluings {
            if (g.a.arc.length - g.b.arc.length).abs() > EPS_ARC {
                return Err(Error::JoinLengthMismatch(g.a.arc.length, g.b.arc.length));
            }
        }
        let n = self.cells.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for g in &self.gluings {
            let (ra, rb) = (root(&mut parent, g.a.cell), root(&mut parent, g.b.cell));
            if ra == rb {
                return Err(Error::GridShape("gluings close a cycle of cells".into()));
            }
            parent[ra] = rb;
        }
        if n > 0 && self.gluings.len() != n - 1 {
            return Err(Error::GridShape("cells are not connected".into()));
        }
        Ok(())
    }
}

/// `S^2` minus a minimizing arc; its boundary is the two banks of the slit.
pub fn make_slit_sphere(e: GreatArc) -> Result<SheetedMetric> {
    if !e.is_minimizing() {
        return Err(Error::NonMinimizingArc(e.length));
    }
    Ok(SheetedMetric {
        cells: vec![Cell::new(Region::SlitSphere { arc: e }, CellRole::Slit)],
        gluings: Vec::new(),
        boundary: vec![
            BoundaryPiece {
                cell: 0,
                arc: e,
                truncation: false,
            },
            BoundaryPiece {
                cell: 0,
                arc: e.reversed(),
                truncation: false,
            },
        ],
        completion_points: Vec::new(),
    })
}

/// Glues boundary piece `ia` of `a` to piece `ib` of `b`. The developments
/// must already extend one another: the pieces develop onto the same arc
/// with opposite orientations, so the cells lie on opposite sides.
pub fn join(a: &SheetedMetric, ia: usize, b: &SheetedMetric, ib: usize) -> Result<SheetedMetric> {
    let pa = *a.boundary.get(ia).ok_or(Error::NoSuchArc(ia))?;
    let pb = *b.boundary.get(ib).ok_or(Error::NoSuchArc(ib))?;
    if (pa.arc.length - pb.arc.length).abs() > EPS_ARC {
        return Err(Error::JoinLengthMismatch(pa.arc.length, pb.arc.length));
    }
    if !pa.arc.matches(&pb.arc.reversed()) {
        return Err(if pa.arc.matches(&pb.arc) {
            Error::JoinOrientation
        } else {
            Error::JoinMisaligned
        });
    }
    let offset = a.cells.len();
    let shift = |p: &BoundaryPiece| BoundaryPiece {
        cell: p.cell + offset,
        ..*p
    };
    let mut cells = a.cells.clone();
    cells.extend(b.cells.iter().cloned());
    let mut gluings = a.gluings.clone();
    gluings.extend(b.gluings.iter().map(|g| Gluing {
        a: shift(&g.a),
        b: shift(&g.b),
    }));
    gluings.push(Gluing { a: pa, b: shift(&pb) });
    // Splice b's loop, starting after the glued piece, into a's loop.
    let mut boundary: Vec<BoundaryPiece> = a.boundary[..ia].to_vec();
    let m = b.boundary.len();
    boundary.extend((1..m).map(|k| shift(&b.boundary[(ib + k) % m])));
    boundary.extend_from_slice(&a.boundary[ia + 1..]);
    let mut completion_points = a.completion_points.clone();
    completion_points.extend_from_slice(&b.completion_points);
    Ok(SheetedMetric {
        cells,
        gluings,
        boundary,
        completion_points,
    })
}

/// `k` slit spheres along `e`, each joined to the next; the boundary is the
/// first sphere's bank along `e` and the last sphere's opposite bank.
pub fn chain(e: GreatArc, k: usize) -> Result<SheetedMetric> {
    let one = make_slit_sphere(e)?;
    let mut m = one.clone();
    for _ in 1..k.max(1) {
        // Boundary is [bank along e, bank against e]; extend at the second.
        m = join(&m, 1, &one, 0)?;
    }
    Ok(m)
}

/// A ray of slit spheres cut off after `k` spheres. Its completion boundary
/// is the arc `e` itself; the far bank is reported as truncation.
pub fn truncated_ray_on(e: GreatArc, k: usize) -> Result<SheetedMetric> {
    let mut m = chain(e, k.max(1))?;
    m.boundary[1].truncation = true;
    Ok(m)
}

/// [`truncated_ray_on`] the standard equatorial arc of length `n`.
pub fn truncated_ray(n: f64, k: usize) -> Result<SheetedMetric> {
    truncated_ray_on(GreatArc::equatorial(n)?, k)
}

/// Two rays of `depth` slit spheres joined across their completion arcs. The
/// completion boundary is the two endpoints of `e`.
pub fn line_of_slit_spheres(e: GreatArc, depth: usize) -> Result<SheetedMetric> {
    let mut m = chain(e, 2 * depth.max(1))?;
    for b in &mut m.boundary {
        b.truncation = true;
    }
    m.completion_points = vec![e.p, e.q];
    Ok(m)
}

/// The embeddable triangle of a triple and the arcs of its boundary loop.
///
/// Three cases: a proper triangle, the left hemisphere when the minimizing
/// arcs close up a great circle (this includes every triple with an
/// antipodal pair), and the sphere slit along the arc containing all three
/// points when one point lies inside the arc joining the other two.
fn core_triangle(t: &SphericalTriple) -> Result<(Region, [GreatArc; 3])> {
    let v = t.p;
    let d = [0, 1, 2].map(|i| spherical_distance(v[i], v[(i + 1) % 3]));
    let coplanar = det3(v[0], v[1], v[2]).abs() <= EPS_ARC * EPS_ARC.sqrt();
    if !coplanar {
        let arcs = [0, 1, 2].map(|i| GreatArc::minimizing(v[i], v[(i + 1) % 3]));
        let [a0, a1, a2] = arcs;
        return Ok((Region::Triangle { vertices: v }, [a0?, a1?, a2?]));
    }
    let perimeter = d.iter().sum::<f64>();
    if (perimeter - TAU).abs() <= 1e-9 {
        // Normal of the common great circle, oriented so that the loop turns
        // counterclockwise through the minimizing distances.
        let normal = (0..3)
            .map(|i| v[i].quat().cross(v[(i + 1) % 3].quat()))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("three pairs")
            .normalized();
        let ccw = |pole: Quaternion, i: usize| {
            let (p, x) = (v[i].quat(), v[(i + 1) % 3].quat());
            x.dot(pole.cross(p)).atan2(x.dot(p)).rem_euclid(TAU)
        };
        let fits = |pole: Quaternion| (0..3).map(|i| (ccw(pole, i) - d[i]).abs()).fold(0.0, f64::max);
        let pole = if fits(normal) <= fits(-normal) { normal } else { -normal };
        let pole = SpherePoint::new_unchecked(pole);
        let arcs = [0, 1, 2].map(|i| GreatArc::from_pole(v[i], pole, d[i]));
        let [a0, a1, a2] = arcs;
        return Ok((Region::Hemisphere { pole }, [a0?, a1?, a2?]));
    }
    // One point lies inside the arc joining the other two: that arc is the
    // longest side.
    let long = (0..3).max_by(|&a, &b| d[a].total_cmp(&d[b])).expect("three sides");
    let slit = GreatArc::minimizing(v[long], v[(long + 1) % 3])?;
    let arcs = [0, 1, 2].map(|i| GreatArc::minimizing(v[i], v[(i + 1) % 3]));
    let [a0, a1, a2] = arcs;
    Ok((Region::SlitSphere { arc: slit }, [a0?, a1?, a2?]))
}

/// Area of the embeddable triangle to the left of the loop through the
/// triple: spherical excess in general, `2 pi` when the loop is a great circle
/// (antipodal pairs included), `4 pi` when one point lies inside the arc
/// joining the others.
pub fn triangle_area(t: &SphericalTriple) -> f64 {
    match core_triangle(t) {
        Ok((region, _)) => region.area(),
        // Only reachable for near-coincident points, which a triple excludes.
        Err(_) => f64::NAN,
    }
}

/// The embeddable triangle of `t` with a ray of `depth` slit spheres joined
/// across each edge.
pub fn three_point_metric(t: &SphericalTriple, depth: usize) -> Result<SheetedMetric> {
    let (region, arcs) = core_triangle(t)?;
    let mut m = SheetedMetric {
        cells: vec![Cell::new(region, CellRole::Core)],
        gluings: Vec::new(),
        boundary: arcs
            .iter()
            .map(|&arc| BoundaryPiece {
                cell: 0,
                arc,
                truncation: false,
            })
            .collect(),
        completion_points: t.p.to_vec(),
    };
    if depth == 0 {
        return Ok(m);
    }
    for arc in arcs {
        let ray = truncated_ray_on(arc.reversed(), depth)?;
        let at = m
            .boundary
            .iter()
            .position(|b| !b.truncation && b.arc.matches(&arc))
            .ok_or(Error::JoinMisaligned)?;
        m = join(&m, at, &ray, 0)?;
    }
    Ok(m)
}

/// Number of sheets over a generic point `q`.
pub fn developing_degree(m: &SheetedMetric, q: SpherePoint) -> Result<usize> {
    Ok(m.preimages(q)?.len())
}
