use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use dpcyl::cylinder::CylinderCertificate;
use dpcyl::rational::{parse_q, Q};
use dpcyl::sample::random_ample;
use dpcyl::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dpcyl", version, about = "Polar cylinders on Du Val del Pezzo surfaces")]
struct Cli {
    /// Write JSON here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Catalog file to use instead of the built-in one.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Surface model: degree, roots, lines and Dynkin type.
    Classify(SurfaceArg),
    /// The (-1)- and (-2)-curves.
    Curves(SurfaceArg),
    /// The ruling used by the constructions, or the first one with section -n.
    Fibration {
        #[command(flatten)]
        surface: SurfaceArg,
        #[arg(long)]
        n: Option<i64>,
    },
    /// Recompute the fibration table over the catalog.
    Table,
    /// Dump the catalog as JSON.
    Catalog,
    /// Build a cylinder certificate for an ample class.
    Cylinder {
        #[command(flatten)]
        surface: SurfaceArg,
        /// A list of k+1 e-basis coefficients, an e-basis expression, or a
        /// shorter list of coordinates in the construction basis. Default -K.
        #[arg(long = "H", allow_hyphen_values = true)]
        h: Option<String>,
    },
    /// Check a certificate produced by `cylinder`.
    Verify {
        /// Output of `cylinder`, or "-" for standard input.
        input: PathBuf,
    },
    /// Construct and verify cylinders for seeded random ample classes.
    Batch {
        /// A catalog key, or "all".
        #[arg(long, default_value = "all")]
        surface: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct SurfaceArg {
    /// Catalog key d/DYNKIN[/variant] or a JSON file with degree and roots.
    #[arg(long)]
    surface: String,
}

/// What `cylinder` prints and `verify` reads.
#[derive(Serialize, Deserialize)]
struct Bundle {
    surface: SurfaceSpec,
    #[serde(rename = "H")]
    h: DivisorClass,
    certificate: CylinderCertificate,
}

enum Failure {
    Usage(anyhow::Error),
    Check(serde_json::Value),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    let (value, code) = match result {
        Ok(v) => (v, ExitCode::SUCCESS),
        Err(Failure::Check(v)) => (v, ExitCode::from(1)),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = serde_json::to_string_pretty(&value).expect("json") + "\n";
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    code
}

fn load_catalog(cli: &Cli) -> anyhow::Result<Vec<CatalogEntry>> {
    match &cli.catalog {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(catalog::from_json(&text)?)
        }
        None => Ok(catalog()),
    }
}

fn find_surface(cli: &Cli, key: &str) -> anyhow::Result<SurfaceModel> {
    let path = std::path::Path::new(key);
    if key.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {key}"))?;
        let spec: SurfaceSpec = serde_json::from_str(&text).context("parsing surface JSON")?;
        return Ok(SurfaceModel::from_spec(&spec)?);
    }
    let (d, t, v) = catalog::parse_key(key)?;
    let wanted = v.as_deref().map(|v| v.replace(' ', "").trim_end_matches("lines").to_string());
    let hit = load_catalog(cli)?.into_iter().find(|e| {
        let ev = e.variant.as_deref().map(|v| v.replace(' ', "").trim_end_matches("lines").to_string());
        e.degree == d && e.dynkin == t && (wanted.is_none() || ev == wanted)
    });
    let entry = hit.ok_or_else(|| anyhow!("unknown catalog entry {key}"))?;
    Ok(entry.surface()?)
}

fn parse_list(text: &str) -> anyhow::Result<Vec<Q>> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(|t| {
            let t = t.trim().trim_matches('"');
            parse_q(t).ok_or_else(|| anyhow!("not a rational: {t:?}"))
        })
        .collect()
}

fn parse_h(surface: &SurfaceModel, planner: &Planner, text: Option<&str>) -> anyhow::Result<ClassOnS> {
    let Some(text) = text else {
        return Ok(dpcyl::surface::anticanonical(surface));
    };
    let h = if text.trim_start().starts_with('[') {
        let v = parse_list(text)?;
        if v.len() == surface.k() + 1 {
            mumford_pullback(surface, &DivisorClass::new(v)?)?
        } else {
            let basis = planner.coordinate_basis();
            if v.len() != basis.len() {
                bail!(
                    "--H has {} entries; give {} e-basis coefficients or {} coordinates",
                    v.len(),
                    surface.k() + 1,
                    basis.len()
                );
            }
            planner.class_from_coords(&v)?
        }
    } else {
        mumford_pullback(surface, &DivisorClass::parse(text, surface.k())?)?
    };
    if !is_ample(surface, &h)? {
        bail!("H = {} is not ample", h.rep);
    }
    Ok(h)
}

fn report_json(report: &VerifyReport) -> serde_json::Value {
    let mut v = serde_json::to_value(report).expect("json");
    v["accepted"] = json!(report.accepted());
    v
}

fn run(cli: &Cli) -> std::result::Result<serde_json::Value, Failure> {
    match &cli.cmd {
        Cmd::Classify(a) => {
            let s = find_surface(cli, &a.surface)?;
            Ok(json!({
                "degree": s.degree(),
                "dynkin": s.dynkin(),
                "rho": s.rho(),
                "line_count": s.line_count(),
                "roots": s.roots(),
                "minus_one": s.minus_one(),
            }))
        }
        Cmd::Curves(a) => {
            let s = find_surface(cli, &a.surface)?;
            Ok(json!({ "minus_one": s.minus_one(), "minus_two": s.roots() }))
        }
        Cmd::Fibration { surface, n } => {
            let s = find_surface(cli, &surface.surface)?;
            let fib = match n {
                None => select_fibration(&s).map_err(anyhow::Error::from)?,
                Some(n) => dpcyl::fibration::valid_fibrations(&s)
                    .into_iter()
                    .find(|f| f.n == *n)
                    .ok_or_else(|| anyhow!("no fibration with a (-{n})-section"))?,
            };
            Ok(serde_json::to_value(&fib).expect("json"))
        }
        Cmd::Table => {
            let rows = regenerate_table();
            let all = rows.iter().all(|r| r.matched);
            let v = json!({
                "rows": rows.iter().map(|r| json!({
                    "surface": r.entry.key(),
                    "expected": r.entry.expected,
                    "computed": r.computed.as_ref().map(|f| f.signature()),
                    "matched": r.matched,
                })).collect::<Vec<_>>(),
                "all_matched": all,
            });
            if all {
                Ok(v)
            } else {
                Err(Failure::Check(v))
            }
        }
        Cmd::Catalog => {
            let entries = load_catalog(cli)?;
            Ok(serde_json::from_str(&catalog::to_json(&entries)).expect("json"))
        }
        Cmd::Cylinder { surface, h } => {
            let s = find_surface(cli, &surface.surface)?;
            let planner = Planner::new(&s).map_err(anyhow::Error::from)?;
            let h = parse_h(&s, &planner, h.as_deref())?;
            let cert = planner.construct(&h, &Options::default()).map_err(|e| {
                Failure::Check(json!({ "error": e.to_string() }))
            })?;
            let bundle = Bundle {
                surface: s.spec(),
                h: h.rep.clone(),
                certificate: cert,
            };
            Ok(serde_json::to_value(&bundle).expect("json"))
        }
        Cmd::Verify { input } => {
            let text = if input.as_os_str() == "-" {
                std::io::read_to_string(std::io::stdin()).context("reading standard input")?
            } else {
                std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?
            };
            let b: Bundle = serde_json::from_str(&text).context("parsing certificate")?;
            let s = SurfaceModel::from_spec(&b.surface).map_err(anyhow::Error::from)?;
            let h = ClassOnS::new(&s, b.h).map_err(anyhow::Error::from)?;
            let report = verify_certificate(&s, &h, &b.certificate);
            let v = report_json(&report);
            if report.accepted() {
                Ok(v)
            } else {
                Err(Failure::Check(v))
            }
        }
        Cmd::Batch { surface, count, seed } => batch(cli, surface, *count, *seed),
    }
}

fn batch(cli: &Cli, which: &str, count: usize, seed: u64) -> std::result::Result<serde_json::Value, Failure> {
    let keys: Vec<String> = if which == "all" {
        load_catalog(cli)?.iter().map(|e| e.key()).collect()
    } else {
        vec![which.to_string()]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut surfaces = Vec::new();
    let mut failed = 0;
    for key in keys {
        let s = find_surface(cli, &key)?;
        if s.rho() <= 1 {
            continue;
        }
        let planner = Planner::new(&s).map_err(anyhow::Error::from)?;
        let mut items = Vec::new();
        for index in 0..count {
            let h = random_ample(&s, &mut rng, 6, 100_000)
                .ok_or_else(|| anyhow!("no ample class found for {key}"))?;
            let item = match planner.construct(&h, &Options::default()) {
                Ok(cert) => {
                    let r = verify_certificate(&s, &h, &cert);
                    if !r.accepted() {
                        failed += 1;
                    }
                    json!({
                        "index": index,
                        "H": h.rep,
                        "lemma": cert.lemma,
                        "epsilon": rational::fmt_q(&cert.epsilon),
                        "accepted": r.accepted(),
                        "failures": r.failures,
                    })
                }
                Err(e) => {
                    failed += 1;
                    json!({ "index": index, "H": h.rep, "error": e.to_string(), "accepted": false })
                }
            };
            items.push(item);
        }
        surfaces.push(json!({ "surface": key, "items": items }));
    }
    let total: usize = surfaces.len() * count;
    let v = json!({
        "seed": seed,
        "count": count,
        "total": total,
        "failed": failed,
        "surfaces": surfaces,
    });
    if failed == 0 {
        Ok(v)
    } else {
        Err(Failure::Check(v))
    }
}
