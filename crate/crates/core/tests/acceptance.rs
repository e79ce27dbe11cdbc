//! Acceptance criteria, one line each. Every tolerance is pinned here.
//!
//! Runs without the libtest harness so the table is always printed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::time::Instant;

use cousinlab::cousin::{
    integrate_to_r3, integrate_to_s3, period_forms, verify_normal_relation, verify_shape_relation,
    IntegrationOptions,
};
use cousinlab::delaunay::{
    boundary_hopf_points, conformal_helicoid, generate_unduloid, measure_bulge, measure_neck_to_bulge,
    measure_necksize, meridian_hausdorff, oracle_unduloid_grid, unduloid_profile_oracle, HelicoidParams,
    Resolution,
};
use cousinlab::devmap::{chain, developing_degree, triangle_area, GreatArc};
use cousinlab::moduli::{
    axis_angles_from_necksizes, canonicalize_triple, check_necksize_inequalities, end_weight,
    triple_distances, triple_from_necksizes, Chirality, NecksizeVector, SphericalTriple,
};
use cousinlab::quat::{hopf_flow, hopf_project, spherical_distance, Quaternion, SpherePoint, UnitQuaternion};
use cousinlab::surface::{minimal_residual_s3, Ambient, ImmersionGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Arclength of the conformal helicoid chart over one unduloid period.
fn conformal_span(n: f64) -> f64 {
    let g = conformal_helicoid(&HelicoidParams::unduloid_half(n, Resolution { nx: 17, ny: 17 })).unwrap();
    g.x(g.nx - 1) - g.x0
}

/// Smallest grid with spacing at most `h` in both directions.
fn resolution_for(n: f64, h: f64) -> Resolution {
    Resolution {
        nx: (conformal_span(n) / h).ceil() as usize + 1,
        ny: (0.5 / h).ceil() as usize + 1,
    }
}

fn spacing(g: &ImmersionGrid) -> f64 {
    g.hx.max(g.hy)
}

fn max_dev(a: &ImmersionGrid, b: &ImmersionGrid, shift: Quaternion) -> f64 {
    a.values
        .data
        .iter()
        .zip(&b.values.data)
        .map(|(p, q)| (*p + shift - *q).norm())
        .fold(0.0, f64::max)
}

fn random_unit(rng: &mut impl Rng) -> UnitQuaternion {
    loop {
        let q = Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let r = q.norm();
        if r > 0.1 && r <= 1.0 {
            return UnitQuaternion::new(q / r).unwrap();
        }
    }
}

fn random_point(rng: &mut impl Rng) -> SpherePoint {
    loop {
        let v = Quaternion::imag(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let r = v.norm();
        if r > 0.1 && r <= 1.0 {
            return SpherePoint::new(v / r).unwrap();
        }
    }
}

fn random_admissible(rng: &mut impl Rng) -> NecksizeVector {
    loop {
        let n = NecksizeVector([0; 3].map(|_| rng.gen_range(1e-3..=PI)));
        if check_necksize_inequalities(&n).unwrap().admissible {
            return n;
        }
    }
}

/// Rotation matrix of a unit quaternion, written out entrywise.
fn rotation_matrix(a: UnitQuaternion) -> [[f64; 3]; 3] {
    let q = a.quat();
    let (w, x, y, z) = (q.w, q.x, q.y, q.z);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn apply(m: [[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|r| m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2])
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// The ten necksizes of the unduloid criteria.
fn unduloid_necksizes() -> Vec<f64> {
    vec![0.05, 0.2, 0.5, 0.8, 1.2, FRAC_PI_2, 2.0, 2.5, 3.0, PI]
}

fn helicoid_minimality() -> Outcome {
    const TAU_MIN: f64 = 1e-4;
    const MIN_SLOPE: f64 = 1.9;
    const SECONDS_PER_CASE: f64 = 10.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4, PI] {
        let t = Instant::now();
        let mut levels = Vec::new();
        for h in [0.04, 0.02, 0.01, 0.005] {
            let res = resolution_for(n, h);
            let g = conformal_helicoid(&HelicoidParams::unduloid_half(n, res)).unwrap();
            // The chart is exactly conformal; the gate only has to absorb
            // finite-difference error on the coarsest level.
            let r = minimal_residual_s3(&g, 1e-2).unwrap().max();
            levels.push((spacing(&g), r));
        }
        let slopes: Vec<f64> = levels
            .windows(2)
            .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
            .collect();
        let secs = t.elapsed().as_secs_f64();
        let (h, fine) = levels[3];
        let min_slope = slopes.iter().copied().fold(f64::INFINITY, f64::min);
        ok &= fine <= TAU_MIN && min_slope >= MIN_SLOPE && secs < SECONDS_PER_CASE;
        parts.push(format!("n={n:.4}: {fine:.1e} at h={h:.4}, slope>={min_slope:.2}, {secs:.1}s"));
    }
    outcome(ok, parts.join("; "))
}

fn sphere_chart(h: f64, n: usize) -> ImmersionGrid {
    let half = (n - 1) as f64 * h / 2.0;
    ImmersionGrid::from_fn(Ambient::R3, (-half, h, n), (-half, h, n), |x, y| {
        let s = 1.0 / y.cosh();
        Quaternion::imag(x.cos() * s, -x.sin() * s, y.tanh())
    })
    .unwrap()
}

fn cousin_round_trip() -> Outcome {
    const TAU_TRIP: f64 = 1e-6;
    const SECONDS: f64 = 30.0;
    let t = Instant::now();
    let opts = IntegrationOptions::default();
    let trip = |g: &ImmersionGrid| {
        let pair = integrate_to_s3(g, &opts).unwrap();
        let back = integrate_to_r3(&pair.ftilde, &opts).unwrap();
        let (i, j) = pair.base_point;
        max_dev(&back.f, g, g.at(i, j) - back.f.at(i, j))
    };
    let sphere = trip(&sphere_chart(0.01, 121));
    let mut ok = sphere <= TAU_TRIP;
    let mut parts = vec![format!("sphere {sphere:.1e}")];
    for n in [0.7, FRAC_PI_2, 3.0] {
        let profile = unduloid_profile_oracle(n).unwrap();
        let g = oracle_unduloid_grid(&profile, Resolution::default()).unwrap();
        let d = trip(&g);
        ok &= d <= TAU_TRIP;
        parts.push(format!("oracle n={n:.3} {d:.1e}"));
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < SECONDS;
    parts.push(format!("{secs:.1}s"));
    outcome(ok, parts.join(", "))
}

fn unduloid_hopf_distance(pairs: &[(f64, cousinlab::cousin::CousinPair)], secs: f64) -> Outcome {
    const TAU_HOPF: f64 = 1e-4;
    const SECONDS: f64 = 300.0;
    let worst = pairs
        .iter()
        .map(|(n, pair)| {
            let (a, b) = boundary_hopf_points(pair).unwrap();
            (spherical_distance(a, b) - n).abs()
        })
        .fold(0.0, f64::max);
    outcome(
        worst <= TAU_HOPF && secs < SECONDS,
        format!("{} necksizes, max |d - n| = {worst:.1e}, {secs:.1}s", pairs.len()),
    )
}

fn unduloid_geometry(pairs: &[(f64, cousinlab::cousin::CousinPair)]) -> Outcome {
    const TAU_GEOM: f64 = 1e-3;
    let mut worst = [0.0f64; 4];
    for (n, pair) in pairs {
        let profile = unduloid_profile_oracle(*n).unwrap();
        let e = [
            (measure_necksize(&pair.f).unwrap() - n).abs(),
            (measure_bulge(&pair.f).unwrap() - (TAU - n)).abs(),
            (measure_neck_to_bulge(&pair.f).unwrap() - FRAC_PI_2).abs(),
            meridian_hausdorff(&pair.f, &profile),
        ];
        for k in 0..4 {
            worst[k] = worst[k].max(e[k]);
        }
    }
    outcome(
        worst.iter().all(|&w| w <= TAU_GEOM),
        format!(
            "neck {:.1e}, bulge {:.1e}, neck-to-bulge {:.1e}, Hausdorff {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn cousin_relations() -> Outcome {
    const TAU_NORMAL: f64 = 1e-3;
    const TAU_SHAPE: f64 = 5e-3;
    const TAU_SELF: f64 = 1e-6;
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4, PI] {
        let pair = generate_unduloid(n, resolution_for(n, 0.005)).unwrap();
        let nr = verify_normal_relation(&pair).unwrap().max();
        let sr = verify_shape_relation(&pair).unwrap().max();
        ok &= nr <= TAU_NORMAL && sr <= TAU_SHAPE;
        parts.push(format!("n={n:.3} normal {nr:.1e} shape {sr:.1e}"));
    }
    let g = sphere_chart(0.01, 121);
    let pair = integrate_to_s3(&g, &IntegrationOptions::default()).unwrap();
    let (i, j) = pair.base_point;
    // f~ = a f with the constant a fixed at the base point.
    let a = pair.ftilde.at(i, j) * g.at(i, j).inverse().unwrap();
    let dev = g
        .values
        .data
        .iter()
        .zip(&pair.ftilde.values.data)
        .map(|(p, q)| (a * *p - *q).norm())
        .fold(0.0, f64::max);
    ok &= dev <= TAU_SELF;
    parts.push(format!("sphere self-cousin {dev:.1e}"));
    outcome(ok, parts.join("; "))
}

fn force_formula() -> Outcome {
    const TAU_DRIFT: f64 = 1e-8;
    const TAU_CLOSURE: f64 = 1e-10;
    let exact = end_weight(PI, 1.0) == FRAC_PI_2;
    let drift = unduloid_necksizes()
        .into_iter()
        .map(|n| unduloid_profile_oracle(n).unwrap().force_drift)
        .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let closure = (0..100)
        .map(|_| axis_angles_from_necksizes(&random_admissible(&mut rng)).unwrap().residual())
        .fold(0.0, f64::max);
    outcome(
        exact && drift <= TAU_DRIFT && closure <= TAU_CLOSURE,
        format!("end_weight(pi, 1) exact: {exact}, force drift {drift:.1e}, closure {closure:.1e}"),
    )
}

fn moduli_round_trip() -> Outcome {
    const TAU_TRIP: f64 = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let n = random_admissible(&mut rng);
        let c = if k % 2 == 0 { Chirality::Right } else { Chirality::Left };
        let back = triple_distances(&triple_from_necksizes(&n, c).unwrap()).0;
        for i in 0..3 {
            worst = worst.max((back[i] - n.0[i]).abs());
        }
    }
    let figure = NecksizeVector([FRAC_PI_2, 2.0 * PI / 3.0, 5.0 * PI / 6.0]);
    let lat = canonicalize_triple(&triple_from_necksizes(&figure, Chirality::Right).unwrap())
        .unwrap()
        .latitude;
    outcome(
        worst <= TAU_TRIP && lat.abs() <= TAU_TRIP,
        format!("round trip {worst:.1e}, figure-triple latitude {lat:.1e}"),
    )
}

fn necksize_inequalities() -> Outcome {
    let xs = [1e-300, 1e-16, 1e-9, 0.1, 1.0, 2.0, 3.0, PI];
    let rejected = xs
        .iter()
        .all(|&x| !check_necksize_inequalities(&NecksizeVector([PI, PI, x])).unwrap().admissible)
        && xs
            .iter()
            .all(|&x| !check_necksize_inequalities(&NecksizeVector([x, PI, PI])).unwrap().admissible);
    let boundary = [
        [FRAC_PI_2, 2.0 * PI / 3.0, 5.0 * PI / 6.0],
        [2.0 * PI / 3.0; 3],
        [PI, FRAC_PI_2, FRAC_PI_2],
        [PI, 1.0, PI - 1.0],
    ];
    let accepted = boundary.iter().all(|&n| {
        let a = check_necksize_inequalities(&NecksizeVector(n)).unwrap();
        a.admissible && a.margin == 0.0
    });
    outcome(
        rejected && accepted,
        format!("(pi, pi, x) rejected for {} values of x: {rejected}; perimeter 2 pi accepted with zero margin: {accepted}", xs.len()),
    )
}

fn hopf_properties() -> Outcome {
    const TAU_HOPF: f64 = 1e-10;
    const SECONDS: f64 = 5.0;
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut fiber, mut equi, mut radius, mut speed, mut cover) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let u = random_point(&mut rng);
        let v = random_point(&mut rng);
        let p = random_unit(&mut rng);
        let a = random_unit(&mut rng);
        let t = rng.gen_range(0.0..TAU);
        let base = hopf_project(u, p).unwrap();
        // Independent evaluation: rotate u by the matrix of p.
        let oracle = apply(rotation_matrix(p), u.xyz());
        fiber = fiber.max(dist3(base.xyz(), oracle));
        fiber = fiber.max(dist3(hopf_project(u, hopf_flow(u, p, t)).unwrap().xyz(), oracle));
        let moved = hopf_project(u, a.mul(p)).unwrap();
        equi = equi.max(dist3(moved.xyz(), apply(rotation_matrix(a), oracle)));

        // The v-circle through p projects to a circle about Pi_v(p) of radius angle(u, v).
        let theta = spherical_distance(u, v);
        let center = apply(rotation_matrix(p), v.xyz());
        let image = |s: f64| hopf_project(u, hopf_flow(v, p, s)).unwrap().xyz();
        let x = image(t);
        let r = (x[0] * center[0] + x[1] * center[1] + x[2] * center[2]).clamp(-1.0, 1.0).acos();
        radius = radius.max((r - theta).abs());
        // Fourth-order central difference of the image curve.
        let h = 1e-3;
        let (a2, a1, b1, b2) = (image(t - 2.0 * h), image(t - h), image(t + h), image(t + 2.0 * h));
        let vel: Vec<f64> = (0..3).map(|k| (a2[k] - 8.0 * a1[k] + 8.0 * b1[k] - b2[k]) / (12.0 * h)).collect();
        let sp = (vel[0] * vel[0] + vel[1] * vel[1] + vel[2] * vel[2]).sqrt();
        speed = speed.max((sp - 2.0 * theta.sin()).abs());
        // Period pi in the parameter: the circle is covered twice per fiber.
        cover = cover.max(dist3(image(t + PI), x));
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = fiber <= TAU_HOPF
        && equi <= TAU_HOPF
        && radius <= TAU_HOPF
        && speed <= TAU_HOPF
        && cover <= TAU_HOPF
        && secs < SECONDS;
    outcome(
        ok,
        format!(
            "fiber {fiber:.1e}, equivariance {equi:.1e}, radius {radius:.1e}, speed {speed:.1e}, double cover {cover:.1e}, {secs:.2}s"
        ),
    )
}

fn developing_maps() -> Outcome {
    const TAU_AREA: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut degrees_ok = true;
    for k in 1..=6 {
        let e = GreatArc::minimizing(random_point(&mut rng), random_point(&mut rng)).unwrap();
        let m = chain(e, k).unwrap();
        for _ in 0..1000 {
            degrees_ok &= developing_degree(&m, random_point(&mut rng)).unwrap() == k;
        }
    }
    let octant = SphericalTriple::new(SpherePoint::I, SpherePoint::J, SpherePoint::K).unwrap();
    let area = triangle_area(&octant);
    let antipodal = SphericalTriple::new(
        SpherePoint::I,
        SpherePoint::new(-Quaternion::I).unwrap(),
        SpherePoint::from_lat_lon(0.0, 2.0),
    )
    .unwrap();
    let anti = triangle_area(&antipodal);
    outcome(
        degrees_ok && (area - FRAC_PI_2).abs() <= TAU_AREA && anti == TAU,
        format!("degree k for k = 1..6 at 1000 points: {degrees_ok}; octant {:.1e}; antipodal area = 2 pi: {}", (area - FRAC_PI_2).abs(), anti == TAU),
    )
}

fn period_identity() -> Outcome {
    const TAU_PERIOD: f64 = 1e-4;
    const TAU_MIRROR: f64 = 1e-6;
    let pair = generate_unduloid(1.0, Resolution::default()).unwrap();
    let (nx, ny) = (pair.f.nx, pair.f.ny);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut agree, mut mirror) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let mut i = rng.gen_range(0..nx);
        let mut j = 0;
        let mut path = vec![(i, j)];
        while j < ny - 1 {
            match rng.gen_range(0..5) {
                0 if i > 0 => i -= 1,
                1 if i + 1 < nx => i += 1,
                _ => j += 1,
            }
            path.push((i, j));
        }
        let d = random_point(&mut rng).quat();
        let v = period_forms(&pair, &path, d).unwrap();
        agree = agree.max((v.direct - v.cousin).abs());
        let m = period_forms(&pair, &path, Quaternion::K).unwrap();
        mirror = mirror.max(m.direct.abs()).max(m.cousin.abs());
    }
    outcome(
        agree <= TAU_PERIOD && mirror <= TAU_MIRROR,
        format!("20 paths: forms agree to {agree:.1e}, mirror-direction period {mirror:.1e}"),
    )
}

fn main() {
    let t = Instant::now();
    let pairs: Vec<_> = unduloid_necksizes()
        .into_iter()
        .map(|n| (n, generate_unduloid(n, Resolution::default()).unwrap()))
        .collect();
    let unduloid_secs = t.elapsed().as_secs_f64();

    let results = [
        ("1 helicoid minimality", helicoid_minimality()),
        ("2 cousin round trip", cousin_round_trip()),
        ("3 unduloid Hopf distance", unduloid_hopf_distance(&pairs, unduloid_secs)),
        ("4 unduloid geometry", unduloid_geometry(&pairs)),
        ("5 cousin structure relations", cousin_relations()),
        ("6 force formula", force_formula()),
        ("7 moduli round trip", moduli_round_trip()),
        ("8 necksize inequalities", necksize_inequalities()),
        ("9 Hopf projection properties", hopf_properties()),
        ("10 developing maps", developing_maps()),
        ("11 period identity", period_identity()),
    ];
    for (name, o) in &results {
        println!("[{}] {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<_> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
