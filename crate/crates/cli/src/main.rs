use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poisson_kit::catalogue::run::{
    algebra_report, polytope_report, run_document, triple_report, wrap_report, RunOptions,
};
use poisson_kit::catalogue::{all_fixtures, find_fixture, run_fixture};
use poisson_kit::lie::RootType;
use poisson_kit::toric::DelzantPolytope;
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "poisson-kit", version, about = "Regularity checks for Poisson submanifolds and submersions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for default grids and random cross-check points.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Values per coordinate in default grids.
    #[arg(long, default_value_t = 5, global = true)]
    grid: usize,
    /// Tolerance for floating-point comparisons.
    #[arg(long, default_value_t = 1e-9, global = true)]
    tol: f64,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run a document; fails if a bivector is not Poisson or a relatedness check fails.
    Check { file: PathBuf },
    /// Run a document; fails if a submanifold is not pointwise Poisson-Dirac.
    Classify { file: PathBuf },
    /// Run a document; fails if a submersion is not a Poisson map or not a submersion on its grid.
    Submersion { file: PathBuf },
    /// Analyse a polytope given as JSON, or by name: interval, triangle, square.
    Toric {
        polytope: String,
        /// Print only the number of orbit types.
        #[arg(long)]
        leaves: bool,
        /// Sample every stratum and certify the quotient pointwise.
        #[arg(long)]
        strata: bool,
        /// Print only the kernel lattice.
        #[arg(long)]
        kernel: bool,
        /// Print only the Delzant check; fails if the polytope is not Delzant.
        #[arg(long)]
        delzant: bool,
    },
    /// Validate a Lie algebra given as JSON, or check a standard Manin triple.
    Lie {
        file: Option<PathBuf>,
        #[arg(long, value_enum, conflicts_with = "file")]
        standard: Option<Root>,
    },
    /// Run a document and report leaf counts and rank profiles.
    Leaves { file: PathBuf },
    /// The built-in example catalogue.
    Example {
        #[command(subcommand)]
        action: ExampleAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Root {
    #[value(name = "A1", alias = "a1")]
    A1,
    #[value(name = "A2", alias = "a2")]
    A2,
}

#[derive(Subcommand)]
enum ExampleAction {
    /// List example ids with their notes.
    List,
    /// Run one example, or all of them, against the stored expectations.
    Run {
        id: Option<String>,
        #[arg(long, conflicts_with = "id")]
        all: bool,
        /// Also print the example's full report.
        #[arg(long)]
        report: bool,
    },
    /// Print the source of an example.
    Show { id: String },
}

/// Input errors exit with 2, analysis failures with 1.
enum Outcome {
    Pass(Value),
    Fail(Value),
}

struct InputError(String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions {
        seed: cli.global.seed,
        grid: cli.global.grid,
        tol: cli.global.tol,
        leaf_ranks: matches!(cli.command, Command::Leaves { .. }),
    };
    let text_override = match &cli.command {
        Command::Toric { leaves: true, .. } => Some(Leaf::Count),
        _ => None,
    };
    match dispatch(&cli.command, &opts) {
        Ok(outcome) => {
            let (v, code) = match outcome {
                Outcome::Pass(v) => (v, 0),
                Outcome::Fail(v) => (v, 1),
            };
            emit(&v, cli.global.format, text_override);
            ExitCode::from(code)
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[derive(Clone, Copy)]
enum Leaf {
    Count,
}

fn emit(v: &Value, format: Format, special: Option<Leaf>) {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable"),
        Format::Text => match (special, v.pointer("/results/polytope/leaf_count")) {
            (Some(Leaf::Count), Some(n)) => n.to_string(),
            _ => {
                let mut lines = Vec::new();
                flatten(v, "", &mut lines);
                lines.join("\n")
            }
        },
    };
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn flatten(v: &Value, prefix: &str, out: &mut Vec<String>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                flatten(x, &join(k), out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(x, &format!("{prefix}[{i}]"), out);
            }
        }
        Value::String(s) => out.push(format!("{prefix}: {s}")),
        other => out.push(format!("{prefix}: {other}")),
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn run_file(path: &Path, opts: &RunOptions) -> Result<(String, Value), InputError> {
    let src = read(path)?;
    let report = run_document(&src, opts).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    Ok((src, report))
}

fn results(report: &Value) -> impl Iterator<Item = &Value> {
    report["results"].as_object().into_iter().flat_map(|m| m.values())
}

fn is(v: &Value, field: &str, verdict: &str) -> bool {
    v.get(field).and_then(Value::as_str) == Some(verdict)
}

fn verdict(report: Value, failed: bool) -> Outcome {
    if failed {
        Outcome::Fail(report)
    } else {
        Outcome::Pass(report)
    }
}

fn dispatch(cmd: &Command, opts: &RunOptions) -> Result<Outcome, InputError> {
    match cmd {
        Command::Check { file } => {
            let (_, r) = run_file(file, opts)?;
            let failed = results(&r).any(|v| {
                v.get("error").is_some()
                    || is(v, "poisson", "fails")
                    || is(v, "related", "fails")
                    || v.get("matches") == Some(&json!(false))
            });
            Ok(verdict(r, failed))
        }
        Command::Classify { file } => {
            let (_, r) = run_file(file, opts)?;
            let failed = results(&r)
                .filter(|v| is(v, "kind", "submanifold"))
                .any(|v| v.get("error").is_some() || is(v, "pointwise_pd", "fails"));
            Ok(verdict(r, failed))
        }
        Command::Submersion { file } => {
            let (_, r) = run_file(file, opts)?;
            let failed = results(&r)
                .filter(|v| is(v, "kind", "submersion"))
                .any(|v| v.get("error").is_some() || is(v, "poisson_map", "fails"));
            Ok(verdict(r, failed))
        }
        Command::Toric {
            polytope,
            leaves,
            strata,
            kernel,
            delzant,
        } => {
            let (src, p) = load_polytope(polytope)?;
            let full = polytope_report(&p, *strata);
            let mut v = full.clone();
            if *leaves || *kernel || *delzant {
                let mut m = Map::new();
                m.insert("kind".into(), json!("polytope"));
                for (flag, key) in [(*leaves, "leaf_count"), (*kernel, "kernel"), (*delzant, "delzant")] {
                    if flag {
                        m.insert(key.into(), full[key].clone());
                    }
                }
                if *strata {
                    m.insert("strata".into(), full["strata"].clone());
                }
                v = Value::Object(m);
            }
            let failed = full.get("error").is_some()
                || (*delzant && full.pointer("/delzant/delzant") != Some(&json!(true)))
                || (*strata && full.pointer("/strata/all_poisson_dirac") != Some(&json!(true)));
            let mut res = Map::new();
            res.insert("polytope".into(), v);
            Ok(verdict(wrap_report(&src, opts, res), failed))
        }
        Command::Lie { file, standard } => {
            let (src, name, v, ok) = match (file, standard) {
                (Some(f), _) => {
                    let src = read(f)?;
                    let v = algebra_report(&src).map_err(|e| InputError(format!("{}: {e}", f.display())))?;
                    let ok = v["valid"] == json!(true);
                    (src, "algebra", v, ok)
                }
                (None, Some(root)) => {
                    let (k, label) = match root {
                        Root::A1 => (RootType::A1, "A1"),
                        Root::A2 => (RootType::A2, "A2"),
                    };
                    let v = triple_report(k);
                    let ok = v["passes"] == json!(true);
                    (format!("triple {label}"), "triple", v, ok)
                }
                (None, None) => return Err(InputError("lie needs a JSON file or --standard A1|A2".into())),
            };
            let mut res = Map::new();
            res.insert(name.into(), v);
            Ok(verdict(wrap_report(&src, opts, res), !ok))
        }
        Command::Leaves { file } => {
            let (src, r) = run_file(file, opts)?;
            let mut res = Map::new();
            if let Some(m) = r["results"].as_object() {
                for (k, v) in m {
                    let mut keep = Map::new();
                    keep.insert("kind".into(), v["kind"].clone());
                    for key in ["leaf_count", "order", "leaf_ranks"] {
                        if let Some(x) = v.get(key) {
                            keep.insert(key.into(), x.clone());
                        }
                    }
                    if keep.len() > 1 {
                        res.insert(k.clone(), Value::Object(keep));
                    }
                }
            }
            Ok(Outcome::Pass(wrap_report(&src, opts, res)))
        }
        // expectations are frozen at the default options
        Command::Example { action } => example(action, &RunOptions::default()),
    }
}

fn load_polytope(arg: &str) -> Result<(String, DelzantPolytope), InputError> {
    let named = match arg {
        "interval" => Some(DelzantPolytope::interval()),
        "triangle" => Some(DelzantPolytope::triangle()),
        "square" => Some(DelzantPolytope::square()),
        _ => None,
    };
    if let Some(p) = named {
        return Ok((arg.to_string(), p));
    }
    let src = read(Path::new(arg))?;
    let p = DelzantPolytope::from_json(&src).map_err(|e| InputError(format!("{arg}: {e}")))?;
    Ok((src, p))
}

fn example(action: &ExampleAction, opts: &RunOptions) -> Result<Outcome, InputError> {
    match action {
        ExampleAction::List => {
            let list: Vec<Value> = all_fixtures()
                .iter()
                .map(|f| json!({ "id": f.id, "note": f.note, "mode": f.mode }))
                .collect();
            Ok(Outcome::Pass(json!({ "examples": list })))
        }
        ExampleAction::Show { id } => {
            let f = find_fixture(id).ok_or_else(|| InputError(format!("unknown example '{id}'")))?;
            Ok(Outcome::Pass(json!({ "id": f.id, "note": f.note, "source": f.source })))
        }
        ExampleAction::Run { id, all, report } => {
            let fixtures = match (id, all) {
                (Some(id), _) => vec![find_fixture(id).ok_or_else(|| InputError(format!("unknown example '{id}'")))?],
                (None, true) => all_fixtures(),
                (None, false) => return Err(InputError("example run needs an id or --all".into())),
            };
            let mut out = Vec::new();
            let mut failed = false;
            for f in &fixtures {
                let o = run_fixture(f, opts);
                failed |= !o.passed;
                let mut v = json!({ "id": o.id, "passed": o.passed, "mismatches": o.mismatches });
                if *report {
                    v["report"] = run_document(f.source, opts).unwrap_or(Value::Null);
                }
                out.push(v);
            }
            let passed = out.iter().filter(|v| v["passed"] == json!(true)).count();
            Ok(verdict(json!({ "examples": out, "passed": passed, "total": fixtures.len() }), failed))
        }
    }
}
