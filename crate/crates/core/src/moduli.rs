//! Spherical triples, necksize trigonometry, end forces, and the classifying
//! map from cousin boundary data to points of S^2.
//!
//! Convention: the necksize `n_i` belongs to the edge `p_i p_{i+1}` (indices
//! mod 3), with labels increasing counterclockwise.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::cousin::BoundaryCurve;
use crate::error::{Error, Result};
use crate::quat::{
    hopf_project_unchecked, spherical_cluster, spherical_distance, Quaternion, SpherePoint, UnitQuaternion,
};
use crate::surface::{Ambient, ImmersionGrid};
use crate::tolerances::{Tolerances, EPS_DISTINCT};

/// Slack below which a necksize inequality counts as an
/// equality: a few ulps of `2 pi`.
pub const INEQUALITY_SLOP: f64 = 8.0 * f64::EPSILON * TAU;

/// Three labeled, pairwise distinct points of S^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalTriple {
    pub p: [SpherePoint; 3],
}

impl SphericalTriple {
    pub fn new(p1: SpherePoint, p2: SpherePoint, p3: SpherePoint) -> Result<Self> {
        let p = [p1, p2, p3];
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            if spherical_distance(p[a], p[b]) <= EPS_DISTINCT {
                return Err(Error::CoincidentPoints(a + 1, b + 1));
            }
        }
        Ok(Self { p })
    }

    /// The triple moved by the rotation `v -> a v a^-1`.
    pub fn rotate(&self, a: UnitQuaternion) -> Self {
        Self {
            p: self.p.map(|q| a.rotate_point(q)),
        }
    }

    /// Reflection through the equatorial (`ij`) plane.
    pub fn mirror(&self) -> Self {
        Self {
            p: self.p.map(|q| {
                let [x, y, z] = q.xyz();
                SpherePoint::new_unchecked(Quaternion::imag(x, y, -z))
            }),
        }
    }
}

/// Latitude of the circle through the triple and the longitudes of `p2`, `p3`
/// once `p1` sits at longitude 0 and the points run eastward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalTripleCoords {
    pub latitude: f64,
    pub lon2: f64,
    pub lon3: f64,
}

impl CanonicalTripleCoords {
    pub fn to_triple(&self) -> Result<SphericalTriple> {
        SphericalTriple::new(
            SpherePoint::from_lat_lon(self.latitude, 0.0),
            SpherePoint::from_lat_lon(self.latitude, self.lon2),
            SpherePoint::from_lat_lon(self.latitude, self.lon3),
        )
    }
}

/// Three necksizes, each in `(0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NecksizeVector(pub [f64; 3]);

impl NecksizeVector {
    pub fn new(n: [f64; 3]) -> Result<Self> {
        for (index, &value) in n.iter().enumerate() {
            if !(value > 0.0 && value <= PI) {
                return Err(Error::NecksizeComponent { index: index + 1, value });
            }
        }
        Ok(Self(n))
    }
}

/// Verdict of the four spherical triangle inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// Slacks of `n1 <= n2 + n3`, `n2 <= n3 + n1`, `n3 <= n1 + n2`,
    /// `n1 + n2 + n3 <= 2 pi`; equalities within rounding are reported as 0.
    pub slacks: [f64; 4],
    /// Smallest slack.
    pub margin: f64,
}

/// Distances `n_i = d(p_i, p_{i+1})`.
pub fn triple_distances(t: &SphericalTriple) -> NecksizeVector {
    let p = &t.p;
    NecksizeVector([
        spherical_distance(p[0], p[1]),
        spherical_distance(p[1], p[2]),
        spherical_distance(p[2], p[0]),
    ])
}

/// Necksize admissibility: triangle inequalities and perimeter at most `2 pi`.
/// Two cylindrical ends (`n_i = n_j = pi`) are always rejected.
pub fn check_necksize_inequalities(n: &NecksizeVector) -> Result<Admissibility> {
    let n = NecksizeVector::new(n.0)?.0;
    let snap = |s: f64| if s.abs() <= INEQUALITY_SLOP { 0.0 } else { s };
    let mut sorted = n;
    sorted.sort_by(|a, b| b.total_cmp(a));
    // Subtract the largest first so that exact boundary cases stay exact.
    let perimeter = ((TAU - sorted[0]) - sorted[1]) - sorted[2];
    let slacks = [
        snap(n[1] + n[2] - n[0]),
        snap(n[2] + n[0] - n[1]),
        snap(n[0] + n[1] - n[2]),
        snap(perimeter),
    ];
    let margin = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    let cylinders = n.iter().filter(|&&v| v == PI).count();
    Ok(Admissibility {
        admissible: margin >= 0.0 && cylinders <= 1,
        slacks,
        margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    Left,
    /// Positive canonical latitude.
    Right,
}

/// A triple with the given distances; `Right` has nonnegative canonical latitude
/// and `Left` is its mirror image.
pub fn triple_from_necksizes(n: &NecksizeVector, chirality: Chirality) -> Result<SphericalTriple> {
    let adm = check_necksize_inequalities(n)?;
    if !adm.admissible {
        return Err(Error::Inadmissible(n.0));
    }
    let n = n.0;
    // Build on the edge whose length is farthest from 0 and pi. Edge e joins
    // labels e and e+1; the opposite vertex is e+2.
    let e = (0..3)
        .max_by(|&a, &b| n[a].sin().total_cmp(&n[b].sin()))
        .unwrap_or(0);
    let (base, opp) = (n[e], n[(e + 2) % 3]);
    // A at longitude 0, B at longitude `base`, C with d(C, A) = opp.
    // The angle at A comes from the half-angle formula, which stays accurate
    // for the degenerate (equality) triangles.
    let a = [1.0, 0.0, 0.0];
    let b = [base.cos(), base.sin(), 0.0];
    // With s the half perimeter, s - n_k and pi - s are half the (snapped)
    // slacks, so exact equality cases give exactly flat triangles.
    let half = |k: usize| (0.5 * adm.slacks[k]).max(0.0).sin();
    let num = (half((e + 2) % 3) * half(e)).sqrt();
    let den = (half(3) * half((e + 1) % 3)).sqrt();
    let alpha = 2.0 * num.atan2(den);
    let (x, y, z) = (opp.cos(), opp.sin() * alpha.cos(), opp.sin() * alpha.sin());
    let build = |z: f64| -> Result<SphericalTriple> {
        let mut pts = [SpherePoint::I; 3];
        pts[e] = SpherePoint::new_unchecked(Quaternion::imag(a[0], a[1], a[2]));
        pts[(e + 1) % 3] = SpherePoint::new_unchecked(Quaternion::imag(b[0], b[1], b[2]));
        pts[(e + 2) % 3] = SpherePoint::new_unchecked(Quaternion::imag(x, y, z).normalized());
        SphericalTriple::new(pts[0], pts[1], pts[2])
    };
    let up = build(z)?;
    let lat = canonicalize_triple(&up)?.latitude;
    let right_is_up = lat >= 0.0;
    Ok(match (chirality, right_is_up) {
        (Chirality::Right, true) | (Chirality::Left, false) => up,
        _ => build(-z)?,
    })
}

/// Rotates the circle through the triple to a circle of latitude with `p1` at
/// longitude 0 and `p2`, `p3` proceeding eastward.
pub fn canonicalize_triple(t: &SphericalTriple) -> Result<CanonicalTripleCoords> {
    let [p1, p2, p3] = t.p.map(|p| p.quat());
    // The points run counterclockwise about this normal, so it is the pole.
    let c = (p2 - p1).cross(p3 - p1);
    let len = c.norm();
    if !(len > EPS_DISTINCT * EPS_DISTINCT) {
        return Err(Error::CoincidentPoints(1, 2));
    }
    let pole = c / len;
    let h = p1.dot(pole).clamp(-1.0, 1.0);
    let e1 = (p1 - pole * h).normalized();
    let e2 = pole.cross(e1);
    let lon = |p: Quaternion| p.dot(e2).atan2(p.dot(e1)).rem_euclid(TAU);
    Ok(CanonicalTripleCoords {
        latitude: h.asin(),
        lon2: lon(p2),
        lon3: lon(p3),
    })
}

/// Force magnitude of an end asymptotic to a surface of revolution of
/// necksize `n` and mean curvature `h`: `n (1 - h n / 2 pi)`.
pub fn end_weight(n: f64, h: f64) -> f64 {
    n * (1.0 - h * n / TAU)
}

/// Three weights with coplanar unit axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceSystem {
    pub weights: [f64; 3],
    /// Unit axis directions in the `ij`-plane.
    pub axes: [[f64; 3]; 3],
    /// Angles between axes `(a1, a2)`, `(a2, a3)`, `(a3, a1)`.
    pub angles: [f64; 3],
}

impl ForceSystem {
    /// `|sum w_i a_i|`.
    pub fn residual(&self) -> f64 {
        let mut s = [0.0; 3];
        for (w, a) in self.weights.iter().zip(&self.axes) {
            for k in 0..3 {
                s[k] += w * a[k];
            }
        }
        (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt()
    }
}

/// Balanced axes for the unduloid end weights of `n`.
pub fn axis_angles_from_necksizes(n: &NecksizeVector) -> Result<ForceSystem> {
    let n = NecksizeVector::new(n.0)?.0;
    axis_angles_from_weights(n.map(|v| end_weight(v, 1.0)))
}

/// Closes the triangle of forces: `cos theta_ij = (w_k^2 - w_i^2 - w_j^2) / (2 w_i w_j)`.
/// The axes run counterclockwise, `a1 = i`.
pub fn axis_angles_from_weights(w: [f64; 3]) -> Result<ForceSystem> {
    let ok = w.iter().all(|&v| v > 0.0 && v.is_finite())
        && (0..3).all(|i| w[i] <= (w[(i + 1) % 3] + w[(i + 2) % 3]) * (1.0 + 4.0 * f64::EPSILON));
    if !ok {
        return Err(Error::ForceClosure(w));
    }
    let cos_angle = |i: usize, j: usize, k: usize| {
        ((w[k] * w[k] - w[i] * w[i] - w[j] * w[j]) / (2.0 * w[i] * w[j])).clamp(-1.0, 1.0)
    };
    let t12 = cos_angle(0, 1, 2).acos();
    let a1 = [1.0, 0.0, 0.0];
    let a2 = [t12.cos(), t12.sin(), 0.0];
    let s = [w[0] * a1[0] + w[1] * a2[0], w[0] * a1[1] + w[1] * a2[1]];
    let len = (s[0] * s[0] + s[1] * s[1]).sqrt();
    let a3 = if len > 0.0 {
        [-s[0] / len, -s[1] / len, 0.0]
    } else {
        // Degenerate closure (w3 = 0 is excluded above); keep a unit vector.
        [0.0, -1.0, 0.0]
    };
    let angle = |a: [f64; 3], b: [f64; 3]| {
        let cross = a[0] * b[1] - a[1] * b[0];
        cross.abs().atan2(a[0] * b[0] + a[1] * b[1])
    };
    Ok(ForceSystem {
        weights: w,
        axes: [a1, a2, a3],
        angles: [angle(a1, a2), angle(a2, a3), angle(a3, a1)],
    })
}

/// The `k`-Hopf images of the boundary components of a cousin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundaryClass {
    /// Half-unduloid cousins have two boundary fibers.
    Pair([SpherePoint; 2]),
    Triple(SphericalTriple),
}

impl BoundaryClass {
    pub fn points(&self) -> Vec<SpherePoint> {
        match self {
            BoundaryClass::Pair(p) => p.to_vec(),
            BoundaryClass::Triple(t) => t.p.to_vec(),
        }
    }
}

/// Result of [`classify_boundary`], with the cluster radius of each component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: BoundaryClass,
    pub cluster_radii: Vec<f64>,
}

/// Classifies the flagged grid edges as boundary components, in
/// counterclockwise order starting from the bottom edge.
pub fn classify_boundary(ftilde: &ImmersionGrid, tol: &Tolerances) -> Result<Classification> {
    let curves: Vec<BoundaryCurve> = ftilde
        .boundary
        .edges()
        .into_iter()
        .map(|e| BoundaryCurve::from_edge(ftilde, e))
        .collect();
    classify_curves(ftilde, &curves, tol)
}

/// Classifies explicit boundary curves, labeled in the order given (which
/// must be counterclockwise for a triple).
pub fn classify_curves(ftilde: &ImmersionGrid, curves: &[BoundaryCurve], tol: &Tolerances) -> Result<Classification> {
    ftilde.require(Ambient::S3)?;
    if !(curves.len() == 2 || curves.len() == 3) {
        return Err(Error::BoundaryCount(curves.len()));
    }
    let mut centers = Vec::with_capacity(curves.len());
    let mut radii = Vec::with_capacity(curves.len());
    for (component, c) in curves.iter().enumerate() {
        let pts: Vec<SpherePoint> = c
            .nodes
            .iter()
            .map(|&(i, j)| hopf_project_unchecked(SpherePoint::K, ftilde.at(i, j)))
            .collect();
        let (center, radius) = spherical_cluster(&pts);
        if !(radius <= tol.rho_cluster) {
            return Err(Error::NotHopfFiber {
                component: component + 1,
                radius,
                tolerance: tol.rho_cluster,
            });
        }
        centers.push(center);
        radii.push(radius);
    }
    let class = if centers.len() == 2 {
        BoundaryClass::Pair([centers[0], centers[1]])
    } else {
        BoundaryClass::Triple(SphericalTriple::new(centers[0], centers[1], centers[2])?)
    };
    Ok(Classification {
        class,
        cluster_radii: radii,
    })
}

/// JSON record of a triple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleReport {
    pub p1: [f64; 3],
    pub p2: [f64; 3],
    pub p3: [f64; 3],
    pub canonical: CanonicalTripleCoords,
    pub necksizes: [f64; 3],
    /// Which pair of points each necksize is measured between.
    pub necksize_convention: String,
    pub admissible: bool,
    pub margins: [f64; 4],
}

impl TripleReport {
    pub fn new(t: &SphericalTriple) -> Result<Self> {
        let n = triple_distances(t);
        let adm = check_necksize_inequalities(&n)?;
        Ok(Self {
            p1: t.p[0].xyz(),
            p2: t.p[1].xyz(),
            p3: t.p[2].xyz(),
            canonical: canonicalize_triple(t)?,
            necksizes: n.0,
            necksize_convention: "n_i = d(p_i, p_(i+1)), indices mod 3".into(),
            admissible: adm.admissible,
            margins: adm.slacks,
        })
    }
}
