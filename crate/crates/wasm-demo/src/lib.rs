//! Browser bindings. Every export returns a JSON string or an error message.

use cousinlab::delaunay::{unduloid_profile_oracle, ProfileSample};
use cousinlab::devmap::{developing_degree, three_point_metric};
use cousinlab::moduli::{
    axis_angles_from_necksizes, check_necksize_inequalities, triple_from_necksizes, CanonicalTripleCoords,
    Chirality, ForceSystem, NecksizeVector, TripleReport,
};
use cousinlab::quat::SpherePoint;
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Profile {
    neck_radius: f64,
    bulge_radius: f64,
    half_period: f64,
    force: f64,
    /// Two full periods of the meridian, neck to neck.
    samples: Vec<ProfileSample>,
}

/// Meridian of the unit-mean-curvature unduloid with necksize `n`.
#[wasm_bindgen]
pub fn unduloid_profile(n: f64, count: usize) -> Result<String, String> {
    let p = unduloid_profile_oracle(n).map_err(|e| e.to_string())?;
    json(&Profile {
        neck_radius: p.neck_radius,
        bulge_radius: p.bulge_radius,
        half_period: p.half_period,
        force: p.force,
        samples: p.samples(-2.0 * p.half_length, 2.0 * p.half_length, count.clamp(16, 4096)),
    })
}

#[derive(Serialize)]
struct Necksizes {
    admissible: bool,
    slacks: [f64; 4],
    triple: Option<TripleReport>,
    forces: Option<ForceSystem>,
}

/// Admissibility, classifying triple and balanced end axes of a necksize vector.
#[wasm_bindgen]
pub fn necksizes(n1: f64, n2: f64, n3: f64, right_handed: bool) -> Result<String, String> {
    let n = NecksizeVector([n1, n2, n3]);
    if ![n1, n2, n3].iter().all(|&v| v > 0.0 && v <= std::f64::consts::PI) {
        return json(&Necksizes {
            admissible: false,
            slacks: [f64::NAN; 4],
            triple: None,
            forces: None,
        });
    }
    let a = check_necksize_inequalities(&n).map_err(|e| e.to_string())?;
    let (triple, forces) = if a.admissible {
        let c = if right_handed { Chirality::Right } else { Chirality::Left };
        let t = triple_from_necksizes(&n, c).map_err(|e| e.to_string())?;
        (
            Some(TripleReport::new(&t).map_err(|e| e.to_string())?),
            axis_angles_from_necksizes(&n).ok(),
        )
    } else {
        (None, None)
    };
    json(&Necksizes {
        admissible: a.admissible,
        slacks: a.slacks,
        triple,
        forces,
    })
}

#[derive(Serialize)]
struct Developed {
    cells: usize,
    area: f64,
    degree: usize,
}

/// Sheets of the three-point metric over the point at (`lat`, `lon`).
#[wasm_bindgen]
pub fn devmap_degree(latitude: f64, lon2: f64, lon3: f64, depth: usize, lat: f64, lon: f64) -> Result<String, String> {
    let t = CanonicalTripleCoords { latitude, lon2, lon3 }
        .to_triple()
        .map_err(|e| e.to_string())?;
    let m = three_point_metric(&t, depth.min(32)).map_err(|e| e.to_string())?;
    let degree = developing_degree(&m, SpherePoint::from_lat_lon(lat, lon)).map_err(|e| e.to_string())?;
    json(&Developed {
        cells: m.cells.len(),
        area: m.area(),
        degree,
    })
}
