//! `cousinlab`: generate unduloids and helicoids, integrate cousins, classify
//! boundary data, and check necksize and force relations.
//!
//! Exit status is 0 when every checked tolerance passes, 1 when a check
//! fails, and 2 on any error.

mod pipeline;
mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cousinlab::cousin::{integrate_to_r3, integrate_to_s3, verify_normal_relation, verify_shape_relation, IntegrationOptions, IntegrationOrder};
use cousinlab::delaunay::{conformal_helicoid, spherical_helicoid, HelicoidParams, Resolution};
use cousinlab::devmap::{developing_degree, three_point_metric, triangle_area};
use cousinlab::io::{read_grid, write_grid, write_obj, write_profile_csv};
use cousinlab::moduli::{
    axis_angles_from_weights, canonicalize_triple, check_necksize_inequalities, classify_boundary, end_weight,
    triple_from_necksizes, BoundaryClass, CanonicalTripleCoords, Chirality, NecksizeVector, TripleReport,
};
use cousinlab::quat::{spherical_distance, SpherePoint};
use cousinlab::surface::{minimal_residual_s3, relative_conformality, Ambient};
use cousinlab::tolerances::Tolerances;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::pipeline::run_unduloid;
use crate::report::{Check, RunReport};

#[derive(Parser)]
#[command(name = "cousinlab", version, about = "CMC surfaces, their minimal cousins in S^3, and triunduloid moduli")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON file overriding any of the tolerances.
    #[arg(long, global = true)]
    tolerances: Option<PathBuf>,
    /// Override one tolerance, e.g. `--tol tau_isom=1e-4` (repeatable).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Include wall time in the report (makes reports non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Clone, Copy)]
struct GridSize {
    /// Nodes along the periodic direction.
    #[arg(long, default_value_t = 801)]
    nx: usize,
    /// Nodes across the strip.
    #[arg(long, default_value_t = 201)]
    ny: usize,
}

impl GridSize {
    fn resolution(self) -> Result<Resolution, String> {
        if self.nx < 16 || self.ny < 16 {
            return Err(format!("resolution must be at least 16x16, got {}x{}", self.nx, self.ny));
        }
        Ok(Resolution { nx: self.nx, ny: self.ny })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Half-unduloid of the given necksize as the cousin of a spherical helicoid.
    GenUnduloid {
        #[arg(long)]
        necksize: f64,
        #[command(flatten)]
        size: GridSize,
        /// OBJ mesh of the half-unduloid.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid file of the half-unduloid.
        #[arg(long)]
        grid_out: Option<PathBuf>,
        /// Grid file of its cousin in S^3.
        #[arg(long)]
        cousin_out: Option<PathBuf>,
        /// CSV of the oracle meridian profile over one period.
        #[arg(long)]
        profile_csv: Option<PathBuf>,
    },
    /// Spherical helicoid grid over one unduloid period.
    GenHelicoid {
        #[arg(long)]
        necksize: f64,
        #[command(flatten)]
        size: GridSize,
        #[arg(long, value_enum, default_value_t = Chart::Conformal)]
        chart: Chart,
        /// Grid file of the helicoid.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the cousin of a grid (R^3 -> S^3 or S^3 -> R^3 by its ambient).
    Cousin {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Order::RowFirst)]
        order: Order,
        /// Skip the integrability precheck.
        #[arg(long)]
        no_check: bool,
    },
    /// Hopf images of the boundary fibers of a cousin grid in S^3.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Write the triple record here as well.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissibility of a necksize vector, or the necksizes of a canonical triple.
    Necksizes {
        /// Three necksizes `n1,n2,n3`.
        #[arg(long, value_delimiter = ',', conflicts_with = "triple")]
        values: Option<Vec<f64>>,
        /// Canonical triple `latitude,lon2,lon3`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        triple: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = ChiralityArg::Right)]
        chirality: ChiralityArg,
    },
    /// End weights and balanced axis directions.
    Forces {
        #[arg(long, value_delimiter = ',')]
        necksizes: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        mean_curvature: f64,
    },
    /// Three-point metric of a canonical triple with truncated rays.
    Devmap {
        /// Canonical triple `latitude,lon2,lon3`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        triple: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Point `lon,lat` at which to count sheets.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        query_degree: Option<Vec<f64>>,
        /// JSON dump of cells and gluings.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `gen-unduloid` over many necksizes on a worker pool (COUSINLAB_THREADS caps it).
    Sweep {
        /// Explicit necksizes.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to", "count"])]
        necksizes: Option<Vec<f64>>,
        #[arg(long, requires_all = ["to", "count"])]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        size: GridSize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Chart {
    Conformal,
    Orthogonal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    RowFirst,
    ColumnFirst,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChiralityArg {
    Left,
    Right,
}

type CmdResult = Result<RunReport, String>;

fn module_error(e: cousinlab::Error) -> String {
    e.to_string()
}

fn load_tolerances(common: &Common) -> Result<Tolerances, String> {
    let mut value = match &common.tolerances {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let t: Tolerances = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::to_value(t).expect("tolerances serialize")
        }
        None => serde_json::to_value(Tolerances::default()).expect("tolerances serialize"),
    };
    for item in &common.tol {
        let (name, v) = item
            .split_once('=')
            .ok_or_else(|| format!("--tol expects NAME=VALUE, got {item:?}"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("--tol {name}: not a number: {v:?}"))?;
        let slot = value
            .get_mut(name.trim())
            .ok_or_else(|| format!("--tol: unknown tolerance {name:?}"))?;
        *slot = json!(v);
    }
    let t: Tolerances = serde_json::from_value(value).map_err(|e| e.to_string())?;
    t.validate()?;
    Ok(t)
}

fn create(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn save_grid(g: &cousinlab::ImmersionGrid, path: &Path) -> Result<(), String> {
    write_grid(g, path).map_err(|e| format!("{}: {e}", path.display()))
}

fn expect_len(what: &str, v: &[f64], k: usize) -> Result<(), String> {
    if v.len() != k {
        return Err(format!("{what} expects {k} comma-separated numbers, got {}", v.len()));
    }
    Ok(())
}

fn triple_arg(v: &[f64]) -> Result<cousinlab::moduli::SphericalTriple, String> {
    expect_len("--triple", v, 3)?;
    CanonicalTripleCoords {
        latitude: v[0],
        lon2: v[1],
        lon3: v[2],
    }
    .to_triple()
    .map_err(module_error)
}

fn necksize_vector(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn gen_unduloid(
    tol: &Tolerances,
    n: f64,
    size: GridSize,
    out: Option<&Path>,
    grid_out: Option<&Path>,
    cousin_out: Option<&Path>,
    profile_csv: Option<&Path>,
) -> CmdResult {
    let res = size.resolution()?;
    let run = run_unduloid(n, res, tol).map_err(module_error)?;
    if let Some(path) = out {
        let mut w = create(path)?;
        write_obj(&run.pair.f, &mut w).map_err(module_error)?;
        w.flush().map_err(|e| e.to_string())?;
    }
    if let Some(path) = grid_out {
        save_grid(&run.pair.f, path)?;
    }
    if let Some(path) = cousin_out {
        save_grid(&run.pair.ftilde, path)?;
    }
    if let Some(path) = profile_csv {
        let l = run.profile.half_length;
        let samples = run.profile.samples(-2.0 * l, 2.0 * l, 4 * res.nx + 1);
        let mut w = create(path)?;
        write_profile_csv(&samples, &mut w).map_err(module_error)?;
        w.flush().map_err(|e| e.to_string())?;
    }
    Ok(RunReport::new(
        "gen-unduloid",
        json!({ "necksize": n, "nx": res.nx, "ny": res.ny, "tolerances": tol }),
        run.checks,
        serde_json::to_value(&run.measurements).expect("measurements serialize"),
    ))
}

fn run(cli: Cli) -> CmdResult {
    let tol = load_tolerances(&cli.common)?;
    match cli.command {
        Command::GenUnduloid {
            necksize,
            size,
            out,
            grid_out,
            cousin_out,
            profile_csv,
        } => gen_unduloid(
            &tol,
            necksize,
            size,
            out.as_deref(),
            grid_out.as_deref(),
            cousin_out.as_deref(),
            profile_csv.as_deref(),
        ),
        Command::GenHelicoid { necksize, size, chart, out } => {
            let res = size.resolution()?;
            let params = HelicoidParams::unduloid_half(necksize, res);
            let g = match chart {
                Chart::Conformal => conformal_helicoid(&params),
                Chart::Orthogonal => spherical_helicoid(&params),
            }
            .map_err(module_error)?;
            if let Some(path) = &out {
                save_grid(&g, path)?;
            }
            let (conformality, _, _) = relative_conformality(&g);
            let mut checks = Vec::new();
            if let Chart::Conformal = chart {
                let r = minimal_residual_s3(&g, tol.tau_conf).map_err(module_error)?.max();
                checks.push(Check::at_most("minimal_residual", r, tol.tau_min));
            }
            Ok(RunReport::new(
                "gen-helicoid",
                json!({ "necksize": necksize, "nx": res.nx, "ny": res.ny, "chart": match chart { Chart::Conformal => "conformal", Chart::Orthogonal => "orthogonal" } }),
                checks,
                json!({ "relative_conformality": conformality, "hx": g.hx, "hy": g.hy, "s_range": [g.x0, g.x(g.nx - 1)] }),
            ))
        }
        Command::Cousin {
            input,
            out,
            order,
            no_check,
        } => {
            let g = read_grid(&input).map_err(|e| format!("{}: {e}", input.display()))?;
            let opts = IntegrationOptions {
                order: match order {
                    Order::RowFirst => IntegrationOrder::RowFirst,
                    Order::ColumnFirst => IntegrationOrder::ColumnFirst,
                },
                tolerances: tol,
                check_integrability: !no_check,
                ..IntegrationOptions::default()
            };
            let pair = match g.ambient {
                Ambient::R3 => integrate_to_s3(&g, &opts),
                Ambient::S3 => integrate_to_r3(&g, &opts),
            }
            .map_err(module_error)?;
            let produced = match g.ambient {
                Ambient::R3 => &pair.ftilde,
                Ambient::S3 => &pair.f,
            };
            if let Some(path) = &out {
                save_grid(produced, path)?;
            }
            let checks = vec![
                Check::at_most("loop_residual", pair.loop_residual_max, tol.tau_loop(g.h())),
                Check::at_most("isometry", pair.isometry_error, tol.tau_isom),
                Check::at_most("normal_relation", verify_normal_relation(&pair).map_err(module_error)?.max(), tol.tau_normal),
                Check::at_most("shape_relation", verify_shape_relation(&pair).map_err(module_error)?.max(), tol.tau_shape),
            ];
            Ok(RunReport::new(
                "cousin",
                json!({ "input": input, "ambient": g.ambient, "nx": g.nx, "ny": g.ny, "tolerances": tol }),
                checks,
                serde_json::to_value(pair.report()).expect("report serializes"),
            ))
        }
        Command::Classify { input, out } => {
            let g = read_grid(&input).map_err(|e| format!("{}: {e}", input.display()))?;
            let c = classify_boundary(&g, &tol).map_err(module_error)?;
            let checks = c
                .cluster_radii
                .iter()
                .enumerate()
                .map(|(k, &r)| Check::at_most(&format!("cluster_radius_{}", k + 1), r, tol.rho_cluster))
                .collect();
            let result = match &c.class {
                BoundaryClass::Pair([a, b]) => json!({
                    "points": [a.xyz(), b.xyz()],
                    "distance": spherical_distance(*a, *b),
                }),
                BoundaryClass::Triple(t) => serde_json::to_value(TripleReport::new(t).map_err(module_error)?).expect("record serializes"),
            };
            if let Some(path) = &out {
                let text = serde_json::to_string_pretty(&result).expect("record serializes");
                std::fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok(RunReport::new("classify", json!({ "input": input }), checks, result))
        }
        Command::Necksizes {
            values,
            triple,
            chirality,
        } => {
            if let Some(t) = triple {
                let t = triple_arg(&t)?;
                let record = TripleReport::new(&t).map_err(module_error)?;
                let admissible = record.admissible;
                return Ok(RunReport::new(
                    "necksizes",
                    json!({ "triple": [record.canonical.latitude, record.canonical.lon2, record.canonical.lon3] }),
                    Vec::new(),
                    serde_json::to_value(record).expect("record serializes"),
                )
                .with_verdict(admissible));
            }
            let v = values.ok_or("necksizes: give --values or --triple")?;
            expect_len("--values", &v, 3)?;
            let n = NecksizeVector(necksize_vector(&v));
            // A component outside (0, pi] is a verdict on the input, not a failure to run.
            let adm = match check_necksize_inequalities(&n) {
                Ok(adm) => adm,
                Err(e @ cousinlab::Error::NecksizeComponent { .. }) => {
                    return Ok(RunReport::new(
                        "necksizes",
                        json!({ "values": v }),
                        Vec::new(),
                        json!({ "admissible": false, "reason": e.to_string() }),
                    )
                    .with_verdict(false));
                }
                Err(e) => return Err(module_error(e)),
            };
            let mut result = json!({ "admissible": adm.admissible, "margins": adm.slacks, "margin": adm.margin });
            if adm.admissible {
                let c = match chirality {
                    ChiralityArg::Left => Chirality::Left,
                    ChiralityArg::Right => Chirality::Right,
                };
                let t = triple_from_necksizes(&n, c).map_err(module_error)?;
                result["triple"] = serde_json::to_value(TripleReport::new(&t).map_err(module_error)?).expect("record serializes");
            }
            Ok(RunReport::new("necksizes", json!({ "values": v }), Vec::new(), result).with_verdict(adm.admissible))
        }
        Command::Forces {
            necksizes,
            mean_curvature,
        } => {
            expect_len("--necksizes", &necksizes, 3)?;
            let n = NecksizeVector::new(necksize_vector(&necksizes)).map_err(module_error)?;
            let w = n.0.map(|v| end_weight(v, mean_curvature));
            let f = axis_angles_from_weights(w).map_err(module_error)?;
            let checks = vec![Check::at_most("closure", f.residual(), 1e-10)];
            Ok(RunReport::new(
                "forces",
                json!({ "necksizes": n.0, "mean_curvature": mean_curvature }),
                checks,
                serde_json::to_value(f).expect("forces serialize"),
            ))
        }
        Command::Devmap {
            triple,
            depth,
            query_degree,
            out,
        } => {
            let t = triple_arg(&triple)?;
            let m = three_point_metric(&t, depth).map_err(module_error)?;
            m.validate().map_err(module_error)?;
            if let Some(path) = &out {
                let text = serde_json::to_string_pretty(&m).expect("metric serializes");
                std::fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let degree = match &query_degree {
                Some(q) => Some(expect_len("--query-degree", q, 2).and_then(|_| developing_degree(&m, SpherePoint::from_lat_lon(q[1], q[0])).map_err(module_error))?),
                None => None,
            };
            Ok(RunReport::new(
                "devmap",
                json!({ "triple": triple, "depth": depth, "query_degree": query_degree }),
                Vec::new(),
                json!({
                    "canonical": canonicalize_triple(&t).map_err(module_error)?,
                    "triangle_area": triangle_area(&t),
                    "area": m.area(),
                    "cells": m.cells.len(),
                    "gluings": m.gluings.len(),
                    "completion_points": m.completion_points.iter().map(|p| p.xyz()).collect::<Vec<_>>(),
                    "degree": degree,
                }),
            ))
        }
        Command::Sweep {
            necksizes,
            from,
            to,
            count,
            size,
        } => {
            let list = match (necksizes, from, to, count) {
                (Some(v), ..) => v,
                (None, Some(a), Some(b), Some(k)) if k >= 2 => {
                    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
                }
                (None, Some(a), Some(_), Some(1)) => vec![a],
                _ => return Err("sweep: give --necksizes or --from/--to/--count".into()),
            };
            let res = size.resolution()?;
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(k) = thread_cap()? {
                builder = builder.num_threads(k);
            }
            let pool = builder.build().map_err(|e| e.to_string())?;
            let runs: Vec<Value> = pool.install(|| {
                list.par_iter()
                    .map(|&n| match run_unduloid(n, res, &tol) {
                        Ok(r) => {
                            let passed = r.checks.iter().all(|c| c.passed);
                            json!({ "necksize": n, "passed": passed, "checks": r.checks, "measurements": r.measurements })
                        }
                        Err(e) => json!({ "necksize": n, "passed": false, "error": e.to_string() }),
                    })
                    .collect()
            });
            let all = runs.iter().all(|r| r["passed"] == json!(true));
            Ok(RunReport::new(
                "sweep",
                json!({ "necksizes": list, "nx": res.nx, "ny": res.ny, "tolerances": tol }),
                Vec::new(),
                json!(runs),
            )
            .with_verdict(all))
        }
    }
}

fn thread_cap() -> Result<Option<usize>, String> {
    match std::env::var("COUSINLAB_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("COUSINLAB_THREADS must be a positive integer, got {s:?}")),
            Ok(k) => Ok(Some(k)),
        },
        Err(_) => Ok(None),
    }
}

fn emit(report: &RunReport, path: Option<&Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report_path = cli.common.report.clone();
    let timing = cli.common.timing;
    let start = Instant::now();
    match run(cli) {
        Ok(mut report) => {
            if timing {
                report.wall_time_s = Some(start.elapsed().as_secs_f64());
            }
            if let Err(e) = emit(&report, report_path.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} = {:e} > {:e}", c.name, c.value, c.tolerance);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
