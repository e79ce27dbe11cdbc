//! Quaternions, the three-sphere as unit quaternions, and the Hopf fibration.
//!
//! R^3 is identified with the imaginary quaternions and S^3 with the unit
//! quaternions. For imaginary `p`, `q` the Hamilton product splits as
//! `pq = -<p, q> + p x q`.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tolerances::EPS_UNIT;

/// An element `w + x i + y j + z k` of the quaternions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// The imaginary quaternion `x i + y j + z k`.
    pub const fn imag(x: f64, y: f64, z: f64) -> Self {
        Self::new(0.0, x, y, z)
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Imaginary part as a 3-vector.
    pub fn vector(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Euclidean inner product on R^4.
    pub fn dot(self, o: Self) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn im(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            None
        } else {
            Some(self.conj() / n2)
        }
    }

    pub fn normalized(self) -> Self {
        self / self.norm()
    }

    /// Cross product of the imaginary parts, as an imaginary quaternion.
    pub fn cross(self, o: Self) -> Self {
        Self::imag(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    /// Exponential of a quaternion.
    pub fn exp(self) -> Self {
        let v = self.im();
        let theta = v.norm();
        let ew = self.w.exp();
        if theta < 1e-300 {
            return Self::real(ew);
        }
        let s = theta.sin() / theta;
        Self::new(ew * theta.cos(), ew * s * v.x, ew * s * v.y, ew * s * v.z)
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(self, o: Self) -> f64 {
        (self.w - o.w)
            .abs()
            .max((self.x - o.x).abs())
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }
}

/// Hamilton product `p q`.
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        qmul(self, o)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        Quaternion::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        <[f64; 4]>::deserialize(d).map(Quaternion::from_array)
    }
}

/// Renormalize when the norm has drifted by more than a tenth of `EPS_UNIT`.
pub(crate) fn settle(q: Quaternion) -> Quaternion {
    let n = q.norm();
    if (n - 1.0).abs() > EPS_UNIT / 10.0 {
        q / n
    } else {
        q
    }
}

/// A point of S^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion(Quaternion::ONE);

    /// Validates `|q| = 1` within `EPS_UNIT`.
    pub fn new(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if !q.is_finite() || (n - 1.0).abs() > EPS_UNIT {
            return Err(Error::InvalidQuaternion(format!(
                "expected a unit quaternion, |q| = {n}"
            )));
        }
        Ok(Self(settle(q)))
    }

    /// Normalizes any nonzero quaternion.
    pub fn from_normalized(q: Quaternion) -> Self {
        Self(q.normalized())
    }

    /// Wraps without checking; callers guarantee unit norm up to roundoff.
    pub(crate) fn new_unchecked(q: Quaternion) -> Self {
        Self(settle(q))
    }

    /// Rotation by `angle` about the unit axis `axis`, acting by conjugation.
    pub fn from_axis_angle(axis: SpherePoint, angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        let a = axis.quat();
        Self::new_unchecked(Quaternion::new(c, s * a.x, s * a.y, s * a.z))
    }

    pub fn quat(self) -> Quaternion {
        self.0
    }

    pub fn conj(self) -> Self {
        Self(self.0.conj())
    }

    pub fn mul(self, o: UnitQuaternion) -> UnitQuaternion {
        Self::new_unchecked(self.0 * o.0)
    }

    /// Conjugation `a v a^-1` of an imaginary quaternion: the rotation of R^3 realized by `a`.
    pub fn rotate(self, v: Quaternion) -> Quaternion {
        (self.0 * v * self.0.conj()).im()
    }

    pub fn rotate_point(self, p: SpherePoint) -> SpherePoint {
        SpherePoint::new_unchecked(self.rotate(p.quat()))
    }

    /// Spherical (great-circle) distance on S^3.
    pub fn distance(self, o: UnitQuaternion) -> f64 {
        angle_between4(self.0, o.0)
    }
}

/// A point of S^2 inside the imaginary quaternions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpherePoint(Quaternion);

impl SpherePoint {
    pub const I: SpherePoint = SpherePoint(Quaternion::I);
    pub const J: SpherePoint = SpherePoint(Quaternion::J);
    pub const K: SpherePoint = SpherePoint(Quaternion::K);

    /// Validates `w = 0` and unit norm within `EPS_UNIT`.
    pub fn new(q: Quaternion) -> Result<Self> {
        if q.w.abs() > EPS_UNIT {
            return Err(Error::InvalidQuaternion(format!(
                "sphere point must be imaginary, real part {}",
                q.w
            )));
        }
        let n = q.norm();
        if !q.is_finite() || (n - 1.0).abs() > EPS_UNIT {
            return Err(Error::InvalidQuaternion(format!(
                "sphere point must have unit norm, |p| = {n}"
            )));
        }
        Ok(Self(settle(q.im())))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Quaternion::imag(x, y, z))
    }

    /// Projects the imaginary part of any nonzero quaternion to S^2.
    pub fn from_direction(q: Quaternion) -> Result<Self> {
        let v = q.im();
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidQuaternion(
                "cannot normalize a zero direction".into(),
            ));
        }
        Ok(Self(v / n))
    }

    /// Point at latitude `lat` and longitude `lon` (z is north).
    pub fn from_lat_lon(lat: f64, lon: f64) -> Self {
        let (sl, cl) = lat.sin_cos();
        let (so, co) = lon.sin_cos();
        Self(Quaternion::imag(cl * co, cl * so, sl))
    }

    pub(crate) fn new_unchecked(q: Quaternion) -> Self {
        Self(settle(q.im()))
    }

    pub fn quat(self) -> Quaternion {
        self.0
    }

    pub fn xyz(self) -> [f64; 3] {
        self.0.vector()
    }

    pub fn dot(self, o: SpherePoint) -> f64 {
        self.0.dot(o.0)
    }

    pub fn neg(self) -> SpherePoint {
        Self(-self.0)
    }

    /// Great-circle distance, `atan2(|p x q|, <p, q>)`.
    pub fn distance(self, o: SpherePoint) -> f64 {
        spherical_distance(self, o)
    }
}

/// Great-circle distance between two points of S^2.
pub fn spherical_distance(p: SpherePoint, q: SpherePoint) -> f64 {
    let c = p.0.cross(q.0).norm();
    c.atan2(p.dot(q))
}

/// Angle between two nonzero vectors of R^4, accurate near 0 and pi.
pub fn angle_between4(a: Quaternion, b: Quaternion) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    let (a, b) = (a / na, b / nb);
    // |a - b| and |a + b| give a well-conditioned half-angle form.
    2.0 * (a - b).norm().atan2((a + b).norm())
}

fn check_unit(q: Quaternion, what: &str) -> Result<()> {
    let n = q.norm();
    if !q.is_finite() || (n - 1.0).abs() > EPS_UNIT {
        return Err(Error::InvalidQuaternion(format!(
            "{what} must have unit norm, |q| = {n}"
        )));
    }
    Ok(())
}

/// The `u`-Hopf projection `p u p^-1` of a point of S^3 to S^2.
pub fn hopf_project(u: SpherePoint, p: UnitQuaternion) -> Result<SpherePoint> {
    check_unit(u.0, "Hopf direction")?;
    check_unit(p.0, "point of S^3")?;
    Ok(hopf_project_unchecked(u, p.0))
}

/// `p u p^-1` for an arbitrary nonzero `p`, normalized.
pub(crate) fn hopf_project_unchecked(u: SpherePoint, p: Quaternion) -> SpherePoint {
    let r = p * u.0 * p.conj();
    SpherePoint::new_unchecked(r / p.norm_sqr())
}

/// The point `p (cos t + u sin t)` of the `u`-Hopf circle through `p`.
pub fn hopf_flow(u: SpherePoint, p: UnitQuaternion, t: f64) -> UnitQuaternion {
    let (s, c) = t.sin_cos();
    UnitQuaternion::new_unchecked(p.0 * (Quaternion::real(c) + u.0 * s))
}

/// `u`-Hopf projection of `samples` equally spaced points on the `v`-Hopf circle
/// through `p`, sampled over one period `t in [0, 2 pi)`.
///
/// The image is a round circle of spherical radius `angle(u, v)`, covered twice.
pub fn project_foreign_circle(
    u: SpherePoint,
    v: SpherePoint,
    p: UnitQuaternion,
    samples: usize,
) -> Result<Vec<SpherePoint>> {
    check_unit(u.0, "Hopf direction u")?;
    check_unit(v.0, "Hopf direction v")?;
    check_unit(p.0, "point of S^3")?;
    let step = std::f64::consts::TAU / samples.max(1) as f64;
    Ok((0..samples)
        .map(|s| hopf_project_unchecked(u, hopf_flow(v, p, s as f64 * step).0))
        .collect())
}

/// Center and spherical radius of the circle traced by [`project_foreign_circle`].
///
/// `Pi_u(p e^{tv}) = p (e^{tv} u e^{-tv}) p^-1`, and `e^{tv} u e^{-tv}` rotates `u`
/// about `v` by `2t`; the circle is therefore centered at `p v p^-1`.
pub fn foreign_circle_center(u: SpherePoint, v: SpherePoint, p: UnitQuaternion) -> (SpherePoint, f64) {
    (hopf_project_unchecked(v, p.0), spherical_distance(u, v))
}

/// Rotation `a` (acting by conjugation) with `a u a^-1 = v`.
pub fn rotation_between(u: SpherePoint, v: SpherePoint) -> UnitQuaternion {
    let d = u.dot(v);
    if d < -1.0 + 1e-14 {
        // Antipodal: rotate by pi about any axis orthogonal to u.
        let trial = if u.0.x.abs() < 0.9 { Quaternion::I } else { Quaternion::J };
        let axis = SpherePoint::new_unchecked(u.0.cross(trial).normalized());
        return UnitQuaternion::from_axis_angle(axis, std::f64::consts::PI);
    }
    let c = u.0.cross(v.0);
    UnitQuaternion::from_normalized(Quaternion::new(1.0 + d, c.x, c.y, c.z))
}

/// Normalized centroid of a cloud of points on S^2 and its largest spherical
/// distance from the members (`NaN` centroid for an empty or balanced cloud).
pub fn spherical_cluster(points: &[SpherePoint]) -> (SpherePoint, f64) {
    let sum: Quaternion = points.iter().map(|p| p.0).sum();
    let c = SpherePoint::new_unchecked(sum.normalized());
    let r = points.iter().map(|&p| spherical_distance(c, p)).fold(0.0, f64::max);
    (c, r)
}

/// Rotation `a` taking the orthonormal right-handed frame `(e1, e2, e3)` to `(i, j, k)`.
///
/// The rows of the rotation matrix are the frame vectors; the quaternion is
/// recovered from its largest diagonal combination for stability.
pub fn rotation_to_standard_frame(e1: Quaternion, e2: Quaternion, e3: Quaternion) -> UnitQuaternion {
    let m = [e1.vector(), e2.vector(), e3.vector()];
    let tr = m[0][0] + m[1][1] + m[2][2];
    let q = if tr > 0.0 {
        let s = 2.0 * (tr + 1.0).sqrt();
        Quaternion::new(0.25 * s, (m[2][1] - m[1][2]) / s, (m[0][2] - m[2][0]) / s, (m[1][0] - m[0][1]) / s)
    } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
        let s = 2.0 * (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt();
        Quaternion::new((m[2][1] - m[1][2]) / s, 0.25 * s, (m[0][1] + m[1][0]) / s, (m[0][2] + m[2][0]) / s)
    } else if m[1][1] > m[2][2] {
        let s = 2.0 * (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt();
        Quaternion::new((m[0][2] - m[2][0]) / s, (m[0][1] + m[1][0]) / s, 0.25 * s, (m[1][2] + m[2][1]) / s)
    } else {
        let s = 2.0 * (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt();
        Quaternion::new((m[1][0] - m[0][1]) / s, (m[0][2] + m[2][0]) / s, (m[1][2] + m[2][1]) / s, 0.25 * s)
    };
    UnitQuaternion::from_normalized(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn random_unit(rng: &mut impl Rng) -> UnitQuaternion {
        loop {
            let q = Quaternion::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n = q.norm();
            if n > 0.1 && n < 1.0 {
                return UnitQuaternion::from_normalized(q);
            }
        }
    }

    fn random_sphere(rng: &mut impl Rng) -> SpherePoint {
        loop {
            let q = Quaternion::imag(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n = q.norm();
            if n > 0.1 && n < 1.0 {
                return SpherePoint::from_direction(q).unwrap();
            }
        }
    }

    #[test]
    fn defining_relations() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::I * Quaternion::I, -Quaternion::ONE);
        assert_eq!(Quaternion::I * Quaternion::J * Quaternion::K, -Quaternion::ONE);
    }

    #[test]
    fn imaginary_product_splits_into_dot_and_cross() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let p = Quaternion::imag(rng.gen(), rng.gen(), rng.gen());
            let q = Quaternion::imag(rng.gen(), rng.gen(), rng.gen());
            let pq = p * q;
            assert!((pq.w + p.dot(q)).abs() < 1e-14);
            assert!((pq.im() - p.cross(q)).norm() < 1e-14);
        }
    }

    #[test]
    fn unit_products_stay_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let p = random_unit(&mut rng);
            let q = random_unit(&mut rng);
            assert!(((p.quat() * q.quat()).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_unit_input() {
        assert!(UnitQuaternion::new(Quaternion::new(1.0, 1.0, 0.0, 0.0)).is_err());
        assert!(SpherePoint::new(Quaternion::new(0.5, 0.0, 0.0, 1.0)).is_err());
        assert!(SpherePoint::new(Quaternion::imag(0.0, 0.0, 1.0 + 1e-6)).is_err());
        assert!(SpherePoint::new(Quaternion::imag(0.0, 0.0, 1.0 + 1e-12)).is_ok());
    }

    #[test]
    fn hopf_projection_basics() {
        let k = SpherePoint::K;
        assert_eq!(hopf_project(k, UnitQuaternion::IDENTITY).unwrap(), k);
        let q = hopf_flow(k, UnitQuaternion::IDENTITY, FRAC_PI_2);
        assert!(q.quat().max_abs_diff(Quaternion::K) < 1e-15);
        let p = UnitQuaternion::new(Quaternion::new(0.5, 0.5, 0.5, 0.5)).unwrap();
        assert_eq!(hopf_flow(k, p, 0.0), p);
    }

    #[test]
    fn fibers_are_hopf_circles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let u = random_sphere(&mut rng);
            let p = random_unit(&mut rng);
            let t = rng.gen_range(-10.0..10.0);
            let a = hopf_project(u, p).unwrap();
            let b = hopf_project(u, hopf_flow(u, p, t)).unwrap();
            assert!(a.quat().max_abs_diff(b.quat()) < 1e-12);
        }
    }

    #[test]
    fn projection_is_rotation_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let u = random_sphere(&mut rng);
            let p = random_unit(&mut rng);
            let a = random_unit(&mut rng);
            let lhs = hopf_project(a.rotate_point(u), UnitQuaternion::new_unchecked(a.quat() * p.quat() * a.quat().conj()))
                .unwrap();
            let rhs = a.rotate_point(hopf_project(u, p).unwrap());
            assert!(lhs.quat().max_abs_diff(rhs.quat()) < 1e-12);
            // Left translation alone rotates the image as well.
            let lt = hopf_project(u, a.mul(p)).unwrap();
            assert!(lt.quat().max_abs_diff(rhs.quat()) < 1e-12);
        }
    }

    #[test]
    fn foreign_circle_degenerates_to_point_for_equal_directions() {
        let p = UnitQuaternion::from_normalized(Quaternion::new(0.3, -0.2, 0.9, 0.1));
        let pts = project_foreign_circle(SpherePoint::K, SpherePoint::K, p, 64).unwrap();
        for q in &pts {
            assert!(q.distance(pts[0]) < 1e-12);
        }
    }

    #[test]
    fn foreign_circle_at_sixty_degrees() {
        let u = SpherePoint::K;
        let v = SpherePoint::from_lat_lon(FRAC_PI_2 - FRAC_PI_3, 0.7);
        let p = UnitQuaternion::from_normalized(Quaternion::new(0.1, 0.7, -0.3, 0.2));
        let pts = project_foreign_circle(u, v, p, 360).unwrap();
        // Independent center: normalized mean of the samples (the circle is not a great circle).
        let mean: Quaternion = pts.iter().map(|q| q.quat()).sum();
        let c = SpherePoint::from_direction(mean).unwrap();
        for q in &pts {
            assert!((q.distance(c) - FRAC_PI_3).abs() < 1e-10);
        }
        let (center, radius) = foreign_circle_center(u, v, p);
        assert!((radius - FRAC_PI_3).abs() < 1e-15);
        assert!(center.distance(c) < 1e-10);
    }

    #[test]
    fn angle_is_accurate_near_pi() {
        let a = SpherePoint::from_lat_lon(0.0, 0.0);
        let b = SpherePoint::from_lat_lon(0.0, PI - 1e-9);
        assert!((a.distance(b) - (PI - 1e-9)).abs() < 1e-15);
        assert!((a.distance(a.neg()) - PI).abs() < 1e-15);
    }

    #[test]
    fn standard_frame_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_unit(&mut rng);
            let frame = [Quaternion::I, Quaternion::J, Quaternion::K].map(|e| a.rotate(e));
            let r = rotation_to_standard_frame(frame[0], frame[1], frame[2]);
            for (e, std) in frame.iter().zip([Quaternion::I, Quaternion::J, Quaternion::K]) {
                assert!(r.rotate(*e).max_abs_diff(std) < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_between_maps_u_to_v() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let u = random_sphere(&mut rng);
            let v = random_sphere(&mut rng);
            let a = rotation_between(u, v);
            assert!(a.rotate_point(u).distance(v) < 1e-12);
            let b = rotation_between(u, u.neg());
            assert!(b.rotate_point(u).distance(u.neg()) < 1e-12);
        }
    }
}
