//! Grid files, OBJ meshes and profile CSV.
//!
//! A grid file is one JSON object: the header fields `ambient`, `nx`, `ny`,
//! `x0`, `y0`, `hx`, `hy`, `boundary`, and `data`, the node values as
//! little-endian `f64` quadruples `[w, x, y, z]` in row-major order
//! (`i` fastest), base64 encoded.

use std::io::{BufRead, Write};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::delaunay::ProfileSample;
use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::surface::{Ambient, BoundaryFlags, Field, ImmersionGrid};

const GRID_FORMAT: &str = "cousinlab-grid/1";
const DATA_ENCODING: &str = "base64-f64le";

#[derive(Serialize, Deserialize)]
struct GridFile {
    format: String,
    ambient: Ambient,
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    hx: f64,
    hy: f64,
    boundary: BoundaryFlags,
    encoding: String,
    data: String,
}

pub fn grid_to_json(g: &ImmersionGrid) -> String {
    let mut bytes = Vec::with_capacity(g.values.data.len() * 32);
    for q in &g.values.data {
        for c in q.to_array() {
            bytes.extend_from_slice(&c.to_le_bytes());
        }
    }
    let file = GridFile {
        format: GRID_FORMAT.into(),
        ambient: g.ambient,
        nx: g.nx,
        ny: g.ny,
        x0: g.x0,
        y0: g.y0,
        hx: g.hx,
        hy: g.hy,
        boundary: g.boundary,
        encoding: DATA_ENCODING.into(),
        data: STANDARD.encode(bytes),
    };
    serde_json::to_string_pretty(&file).expect("grid header serializes")
}

pub fn grid_from_json(text: &str) -> Result<ImmersionGrid> {
    let file: GridFile = serde_json::from_str(text)?;
    if file.format != GRID_FORMAT {
        return Err(Error::Format(format!("unknown grid format {:?}", file.format)));
    }
    if file.encoding != DATA_ENCODING {
        return Err(Error::Format(format!("unknown data encoding {:?}", file.encoding)));
    }
    let bytes = STANDARD
        .decode(file.data.as_bytes())
        .map_err(|e| Error::Format(format!("grid data: {e}")))?;
    let count = file.nx.checked_mul(file.ny).ok_or_else(|| Error::Format("grid size overflows".into()))?;
    if bytes.len() != count * 32 {
        return Err(Error::Format(format!(
            "grid data has {} bytes, expected {} for {}x{}",
            bytes.len(),
            count * 32,
            file.nx,
            file.ny
        )));
    }
    let data: Vec<Quaternion> = bytes
        .chunks_exact(32)
        .map(|c| {
            let f = |k: usize| f64::from_le_bytes(c[8 * k..8 * k + 8].try_into().expect("8 bytes"));
            Quaternion::new(f(0), f(1), f(2), f(3))
        })
        .collect();
    let values = Field {
        nx: file.nx,
        ny: file.ny,
        data,
    };
    Ok(ImmersionGrid::new(file.ambient, (file.x0, file.hx), (file.y0, file.hy), values)?.with_boundary(file.boundary))
}

pub fn write_grid(g: &ImmersionGrid, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, grid_to_json(g))?;
    Ok(())
}

pub fn read_grid(path: &std::path::Path) -> Result<ImmersionGrid> {
    grid_from_json(&std::fs::read_to_string(path)?)
}

/// Writes an R^3 grid as a triangle mesh: vertices in row-major order with
/// 17 significant digits, each quad split along its `(i, j)-(i+1, j+1)`
/// diagonal, faces wound so that their normals agree with `f_x x f_y`.
pub fn write_obj(g: &ImmersionGrid, out: &mut impl Write) -> Result<()> {
    g.require(Ambient::R3)?;
    writeln!(out, "# {}x{} grid", g.nx, g.ny)?;
    for q in &g.values.data {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", q.x, q.y, q.z)?;
    }
    let index = |i: usize, j: usize| j * g.nx + i + 1;
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let (a, b, c, d) = (index(i, j), index(i + 1, j), index(i + 1, j + 1), index(i, j + 1));
            writeln!(out, "f {a} {b} {c}")?;
            writeln!(out, "f {a} {c} {d}")?;
        }
    }
    Ok(())
}

/// Vertices and triangles of an OBJ file (1-based indices resolved to 0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ObjMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

pub fn read_obj(input: impl BufRead) -> Result<ObjMesh> {
    let mut mesh = ObjMesh {
        vertices: Vec::new(),
        faces: Vec::new(),
    };
    for (line_no, line) in input.lines().enumerate() {
        let line = line?;
        let mut parts = line.split_whitespace();
        let bad = || Error::Format(format!("OBJ line {}: {line:?}", line_no + 1));
        match parts.next() {
            Some("v") => {
                let mut v = [0.0; 3];
                for c in &mut v {
                    *c = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                }
                mesh.vertices.push(v);
            }
            Some("f") => {
                let mut f = [0usize; 3];
                for c in &mut f {
                    // Accept `v`, `v/vt` and `v/vt/vn` references.
                    let k: usize = parts
                        .next()
                        .and_then(|s| s.split('/').next())
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(bad)?;
                    if k == 0 {
                        return Err(bad());
                    }
                    *c = k - 1;
                }
                mesh.faces.push(f);
            }
            _ => {}
        }
    }
    Ok(mesh)
}

pub fn write_profile_csv(samples: &[ProfileSample], out: &mut impl Write) -> Result<()> {
    writeln!(out, "s,r,z,phi,force")?;
    for p in samples {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", p.s, p.r, p.z, p.phi, p.force)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::normal;

    fn sphere_patch() -> ImmersionGrid {
        ImmersionGrid::from_fn(Ambient::R3, (-1.0, 0.1, 21), (-0.5, 0.1, 11), |x, y| {
            Quaternion::imag(x.cos() * y.cos(), x.sin() * y.cos(), y.sin())
        })
        .unwrap()
        .with_boundary(BoundaryFlags::horizontal())
    }

    #[test]
    fn grid_json_round_trip_is_exact() {
        let g = sphere_patch();
        let back = grid_from_json(&grid_to_json(&g)).unwrap();
        assert_eq!(back, g);
        let s3 = ImmersionGrid::from_fn(Ambient::S3, (0.0, 0.1, 6), (0.0, 0.1, 6), |x, y| {
            Quaternion::new(x.cos() * y.cos(), x.sin() * y.cos(), y.sin(), 0.0)
        })
        .unwrap();
        assert_eq!(grid_from_json(&grid_to_json(&s3)).unwrap(), s3);
    }

    #[test]
    fn grid_json_rejects_truncated_data() {
        let text = grid_to_json(&sphere_patch());
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["nx"] = 22.into();
        assert!(matches!(grid_from_json(&v.to_string()), Err(Error::Format(_))));
    }

    #[test]
    fn obj_two_by_two() {
        let values = Field::from_fn(2, 2, |i, j| Quaternion::imag(i as f64, j as f64, 0.0));
        let g = ImmersionGrid {
            ambient: Ambient::R3,
            nx: 2,
            ny: 2,
            x0: 0.0,
            y0: 0.0,
            hx: 1.0,
            hy: 1.0,
            values,
            boundary: BoundaryFlags::default(),
        };
        let mut buf = Vec::new();
        write_obj(&g, &mut buf).unwrap();
        let mesh = read_obj(buf.as_slice()).unwrap();
        assert_eq!(mesh.vertices.len(), 4);
        assert_eq!(mesh.faces.len(), 2);
    }

    #[test]
    fn obj_round_trip_and_winding() {
        let g = sphere_patch();
        let mut buf = Vec::new();
        write_obj(&g, &mut buf).unwrap();
        let mesh = read_obj(buf.as_slice()).unwrap();
        for (v, q) in mesh.vertices.iter().zip(&g.values.data) {
            assert_eq!(*v, [q.x, q.y, q.z]);
        }
        let nu = normal(&g).unwrap();
        for f in &mesh.faces {
            let [a, b, c] = f.map(|k| Quaternion::imag(mesh.vertices[k][0], mesh.vertices[k][1], mesh.vertices[k][2]));
            let face_normal = (b - a).cross(c - a);
            let (i, j) = (f[0] % g.nx, f[0] / g.nx);
            assert!(face_normal.dot(nu.get(i, j)) > 0.0);
        }
    }
}
