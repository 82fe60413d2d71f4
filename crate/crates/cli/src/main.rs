//! Command-line front end. Every subcommand is a thin wrapper around one
//! library call; `--json` prints that call's serialization from
//! `shishikura::io`.
//!
//! Exit codes: 0 success or verdict true, 1 verdict false, 2 error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use shishikura::fixtures::{fig2_toy, persian_carpet};
use shishikura::graft::{self, BranchChoice, CheckStatus, GraftSpec};
use shishikura::io::{self as sio, Metadata};
use shishikura::orbits::{self, OrbitClass, DEFAULT_CYCLE_CAP};
use shishikura::scalar::{parse_ratio, ratio_string};
use shishikura::spectral::{self, certify_lower, certify_upper};
use shishikura::{dot, Error, Rational, Scalar, TreeMap};

/// Overrides the cap on enumerated closed walks.
const CYCLE_CAP_VAR: &str = "SHISHIKURA_CYCLE_CAP";

#[derive(Parser)]
#[command(name = "shishikura", version, about = "Exact analysis and self-grafting of weighted tree maps")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a document describes a valid tree map.
    Validate { file: Option<PathBuf> },
    /// Print the transition matrix.
    Matrix {
        file: Option<PathBuf>,
        /// Ignore weights and count segments.
        #[arg(long)]
        counts: bool,
    },
    /// Certified interval for the spectral radius of the transition matrix.
    Lambda {
        file: Option<PathBuf>,
        /// Interval width, as P/Q.
        #[arg(long, default_value = "1/1000000")]
        tol: String,
    },
    /// Search for a witness vector proving a bound on the spectral radius.
    Certify {
        file: Option<PathBuf>,
        #[arg(long)]
        bound: String,
        /// Prove a lower bound instead of a strict upper bound.
        #[arg(long)]
        lower: bool,
        /// Use the count matrix.
        #[arg(long)]
        counts: bool,
    },
    /// List periodic orbits.
    Cycles {
        file: Option<PathBuf>,
        #[arg(long)]
        max_period: usize,
        #[arg(long)]
        repelling_only: bool,
    },
    /// Decide whether the count matrix has an expanding block.
    Cantor {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
    /// Self-graft along a periodic orbit.
    Graft {
        file: Option<PathBuf>,
        #[arg(long)]
        orbit: String,
        /// `left`, `right`, `left@J` or `right@J`.
        #[arg(long)]
        branch: String,
        /// Run the recovery, grouping, contraction and N-increment checks.
        #[arg(long)]
        verify: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write one of the built-in tree maps.
    Demo {
        name: DemoName,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Graphviz rendering of the tree or of its Markov graph.
    Dot {
        file: Option<PathBuf>,
        #[arg(long)]
        markov: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    PersianCarpet,
    Fig2,
}

struct Outcome {
    text: String,
    json: Value,
    verdict: bool,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { text, json, verdict: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            let printed = if cli.json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&out.json).expect("json values serialize"))
            } else {
                write!(stdout, "{}", out.text)
            };
            if printed.is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(if out.verdict { 0 } else { 1 })
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&sio::error_json(&e)).expect("json values serialize"));
            }
            eprintln!("error: {e}");
            for v in e.violations() {
                eprintln!("  {}: {v}", v.code());
            }
            ExitCode::from(2)
        }
    }
}

fn read_input(file: &Option<PathBuf>) -> shishikura::Result<String> {
    let mut text = String::new();
    match file {
        Some(path) if path.as_os_str() != "-" => {
            text = fs::read_to_string(path)
                .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        }
        _ => {
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Error::parse("stdin", e.to_string()))?;
        }
    }
    Ok(text)
}

fn load(file: &Option<PathBuf>) -> shishikura::Result<(TreeMap, Metadata)> {
    sio::parse(&read_input(file)?)
}

fn write_output(path: &Option<PathBuf>, text: &str) -> shishikura::Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::write(p, text).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", p.display())))
        }
        _ => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidArgument(format!("cannot write to stdout: {e}"))),
    }
}

fn rational_arg(name: &str, text: &str) -> shishikura::Result<Rational> {
    parse_ratio(text).ok_or_else(|| Error::InvalidArgument(format!("--{name} expects P/Q, got {text:?}")))
}

fn cycle_cap() -> shishikura::Result<usize> {
    match std::env::var(CYCLE_CAP_VAR) {
        Ok(v) => v
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{CYCLE_CAP_VAR} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_CYCLE_CAP),
    }
}

/// Period encoded in an orbit id (`fp1`, `p3-1`, `n2-1`, `v4-1`).
fn orbit_period(id: &str) -> Option<usize> {
    if id.starts_with("fp") {
        return Some(1);
    }
    let rest = id.strip_prefix(['p', 'n', 'v'])?;
    rest.split_once('-')?.0.parse().ok()
}

fn run(command: &Command) -> shishikura::Result<Outcome> {
    match command {
        Command::Validate { file } => {
            let text = read_input(file)?;
            match sio::parse(&text) {
                Ok((tm, _)) => {
                    let json = sio::validation_json(&tm);
                    let julia = match &json["juliaCycles"] {
                        Value::Null => "Julia cycles not counted, some periodic vertex is untagged".to_string(),
                        n => format!("{n} Julia cycles"),
                    };
                    let text = format!(
                        "valid: {} vertices, {} edges, {} segments, {julia}\n",
                        json["vertices"], json["edges"], json["segments"]
                    );
                    Ok(Outcome::ok(text, json))
                }
                Err(e @ Error::Invalid(_)) => {
                    let mut text = String::from("invalid:\n");
                    for v in e.violations() {
                        text.push_str(&format!("  {}: {v}\n", v.code()));
                    }
                    let mut json = sio::error_json(&e);
                    json["valid"] = json!(false);
                    Ok(Outcome { text, json, verdict: false })
                }
                Err(e) => Err(e),
            }
        }
        Command::Matrix { file, counts } => {
            let (tm, _) = load(file)?;
            let m = if *counts { spectral::count_matrix(&tm) } else { spectral::transition_matrix(&tm) };
            Ok(Outcome::ok(format!("{m}\n"), sio::matrix_json(&m)))
        }
        Command::Lambda { file, tol } => {
            let (tm, _) = load(file)?;
            let tol = rational_arg("tol", tol)?.to_f64();
            let est = spectral::spectral_radius_estimate(&spectral::transition_matrix(&tm), tol)?;
            let verdict = sio::verdict(&est);
            let text = format!(
                "lambda in [{:.9}, {:.9}) ~ {:.9}\n  lower {}\n  upper {}\nverdict: {verdict}\n",
                est.lower.to_f64(),
                est.upper.to_f64(),
                est.estimate,
                ratio_string(&est.lower),
                ratio_string(&est.upper)
            );
            Ok(Outcome {
                text,
                json: sio::estimate_json(&est),
                verdict: verdict == "<1",
            })
        }
        Command::Certify { file, bound, lower, counts } => {
            let (tm, _) = load(file)?;
            let bound = rational_arg("bound", bound)?;
            let m = if *counts { spectral::count_matrix(&tm) } else { spectral::transition_matrix(&tm) };
            let cert = if *lower { certify_lower(&m, &bound) } else { certify_upper(&m, &bound) };
            let relation = if *lower { ">=" } else { "<" };
            Ok(match cert {
                Some(c) => Outcome::ok(
                    format!(
                        "lambda {relation} {}\nwitness: ({})\n",
                        ratio_string(&c.bound),
                        c.witness.iter().map(ratio_string).collect::<Vec<_>>().join(", ")
                    ),
                    json!({ "certified": true, "certificate": sio::certificate_json(&c) }),
                ),
                None => Outcome {
                    text: format!("no witness found for lambda {relation} {}\n", ratio_string(&bound)),
                    json: json!({ "certified": false, "certificate": null }),
                    verdict: false,
                },
            })
        }
        Command::Cycles { file, max_period, repelling_only } => {
            let (tm, _) = load(file)?;
            let mut list = orbits::periodic_orbits_capped(&tm, *max_period, cycle_cap()?)?;
            if *repelling_only {
                list.retain(|o| o.class == OrbitClass::Repelling);
            }
            let json = sio::orbits_json(&tm, &list);
            let mut text = String::new();
            for o in json.as_array().expect("orbits serialize to an array") {
                text.push_str(&format!(
                    "{} period {} {} slope {} points {}\n",
                    o["id"].as_str().unwrap_or_default(),
                    o["period"],
                    o["class"].as_str().unwrap_or_default(),
                    o["slope"].as_str().unwrap_or_default(),
                    o["pointLabels"]
                        .as_array()
                        .map(|ps| ps.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(" "))
                        .unwrap_or_default()
                ));
            }
            Ok(Outcome::ok(text, json))
        }
        Command::Cantor { file, n_max } => {
            let (tm, _) = load(file)?;
            let r = orbits::cantor_analysis(&tm, *n_max)?;
            let mut text = format!("cantor: {}\n", r.status);
            if let Some(w) = &r.witness {
                text.push_str(&format!(
                    "witness edges: {}\ncount-matrix lambda >= {}\n",
                    w.edges.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "),
                    ratio_string(&w.certificate.bound)
                ));
            }
            for (n, row) in r.growth.iter().enumerate() {
                text.push_str(&format!(
                    "kappa_{}: {}\n",
                    n + 1,
                    row.iter().map(ratio_string).collect::<Vec<_>>().join(" ")
                ));
            }
            Ok(Outcome {
                text,
                json: sio::cantor_json(&r),
                verdict: r.status,
            })
        }
        Command::Graft { file, orbit, branch, verify, output } => {
            let (tm, meta) = load(file)?;
            let period = orbit_period(orbit).ok_or_else(|| Error::InvalidArgument(format!("malformed orbit id {orbit:?}")))?;
            let o = orbits::periodic_orbits_capped(&tm, period, cycle_cap()?)?
                .into_iter()
                .find(|o| o.id == *orbit)
                .ok_or_else(|| Error::InvalidArgument(format!("no orbit with id {orbit:?}")))?;
            let sites = graft::graft_sites(&tm, &o)?;
            let choice = BranchChoice::parse(branch).filter(|c| sites.contains(c)).ok_or_else(|| {
                let ids: Vec<String> = sites.iter().map(|c| c.to_string()).collect();
                Error::InvalidArgument(format!("branch {branch:?} is not admissible, choose one of {}", ids.join(", ")))
            })?;
            let result = graft::self_graft(&GraftSpec::new(tm, o, choice)?)?;
            let report = if *verify { Some(graft::verify_graft(&result)?) } else { None };
            let name = meta.name.map(|n| format!("{n}, grafted along {orbit}"));
            let doc = sio::serialize(&result.grafted, &sio::graft_metadata(&result, name));
            write_output(&Some(output.clone()), &doc)?;
            let mut text = format!(
                "grafted along {orbit} (period {}), branch {}: {} vertices, {} edges\n",
                result.period(),
                result.branch,
                result.grafted.tree().vertex_count(),
                result.grafted.tree().edge_count()
            );
            let mut verdict = true;
            if let Some(r) = &report {
                for c in &r.checks {
                    text.push_str(&format!("{} {}: {}\n", c.kind.as_str(), c.status.as_str(), c.detail));
                }
                verdict = r.checks.iter().all(|c| c.status != CheckStatus::Fail);
            }
            Ok(Outcome {
                text,
                json: sio::graft_report_json(&result, report.as_ref()),
                verdict,
            })
        }
        Command::Demo { name, output } => {
            let (tm, name) = match name {
                DemoName::PersianCarpet => (persian_carpet::<Rational>(), "persian-carpet"),
                DemoName::Fig2 => (fig2_toy::<Rational>(), "fig2"),
            };
            let doc = sio::serialize(&tm, &Metadata::named(name));
            match output {
                Some(_) => {
                    write_output(output, &doc)?;
                    Ok(Outcome::ok(String::new(), sio::validation_json(&tm)))
                }
                None => {
                    let json: Value = serde_json::from_str(&doc).expect("documents are json");
                    Ok(Outcome::ok(doc, json))
                }
            }
        }
        Command::Dot { file, markov, output } => {
            let (tm, _) = load(file)?;
            let text = if *markov {
                dot::markov_dot(&orbits::markov_graph(&tm))
            } else {
                dot::tree_dot(&tm)
            };
            match output {
                Some(_) => {
                    write_output(output, &text)?;
                    Ok(Outcome::ok(String::new(), json!({ "written": true })))
                }
                None => Ok(Outcome::ok(text.clone(), json!({ "dot": text }))),
            }
        }
    }
}
