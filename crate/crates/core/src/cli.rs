//! The `squeeze` command line.
//!
//! Every command writes a line-delimited JSON result file (see [`report`])
//! and prints a short summary. The output directory defaults to
//! `$SQUEEZE_OUT_DIR`, or the working directory when that is unset.
//!
//! Exit status: 0 on success, 1 on a domain or validation error, 2 on a
//! usage error.

use std::fmt::Display;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::domain::{variable_names, Builtin, CPoint, DomainSpec, ModelParams};
use crate::domain_file::{parse_domain, parse_expression};
use crate::kobayashi::{indicatrix_radii, kobayashi_upper, DiscSearchConfig};
use crate::normal_form::normal_form_of_domain;
use crate::poly::fmt_real;
use crate::report::{self, Header};
use crate::squeezing::{decay_experiment, geometric_deltas, squeezing_upper, Mode, SqueezeConfig, DEFAULT_MARGIN};

pub const OUT_DIR_ENV: &str = "SQUEEZE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "squeeze", version, about = "Kobayashi-metric and squeezing-function bounds for domains in C^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce the defining function at q to normal form.
    NormalForm {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Upper bound on K(p, ζ) from an admissible disc.
    Kobayashi {
        #[command(flatten)]
        domain: DomainArgs,
        /// Comma-separated coordinates, e.g. `0,0,-1e-4` or `0.5i,0,0`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Radius intervals of the indicatrix along several directions.
    Indicatrix {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Directions separated by `;`, e.g. `1,0,0;0,1,0`.
        #[arg(long, allow_hyphen_values = true)]
        dirs: String,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Squeezing-function upper bound at (0, 0, -δ).
    SqueezeBound {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Numeric)]
        mode: ModeArg,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Squeezing bounds over a δ sweep, with a CSV table and fitted slope.
    Experiment {
        #[command(flatten)]
        domain: DomainArgs,
        /// `start:end:count` (geometric) or a comma-separated list.
        #[arg(long)]
        deltas: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Numeric)]
        mode: ModeArg,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the built-in self-checks and verify the hashes of result files.
    Verify {
        files: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct DomainArgs {
    /// Domain file.
    spec: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "spec")]
    builtin: Option<BuiltinArg>,
    /// Type parameter of the model family.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Radius of the ball.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long)]
    boundary_samples: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Result file; defaults to `<command>.jsonl` in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp so repeated runs give identical files.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BuiltinArg {
    Model,
    Herbort,
    #[value(alias = "convex_control")]
    ConvexControl,
    Ball,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Numeric,
    #[value(alias = "closed_form")]
    ClosedForm,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Numeric => Mode::Numeric,
            ModeArg::ClosedForm => Mode::ClosedForm,
        }
    }
}

struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Parse `argv` (including the program name), run the command and return
/// the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn load_domain(args: &DomainArgs) -> Result<(DomainSpec, Value), Failure> {
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        let dom = parse_domain(&text).map_err(|e| Failure(format!("{}:{e}", path.display())))?;
        return Ok((dom, json!({ "file": path.display().to_string(), "text": text })));
    }
    let builtin = match args.builtin {
        Some(BuiltinArg::Model) => Builtin::Model(ModelParams::new(args.k)),
        Some(BuiltinArg::Herbort) => Builtin::Herbort,
        Some(BuiltinArg::ConvexControl) => Builtin::ConvexControl,
        Some(BuiltinArg::Ball) => Builtin::Ball { r: args.r },
        None => return Err(Failure("give a domain file or --builtin".into())),
    };
    let dom = DomainSpec::builtin(builtin)?;
    Ok((dom, json!({ "builtin": builtin })))
}

fn search_config(args: &SearchArgs) -> Result<DiscSearchConfig, Failure> {
    let mut cfg = DiscSearchConfig { seed: args.seed, ..DiscSearchConfig::default() };
    if let Some(n) = args.max_degree {
        cfg.max_degree = n;
    }
    if let Some(m) = args.boundary_samples {
        cfg.boundary_samples = m;
    }
    if let Some(b) = args.budget {
        cfg.optimizer_budget = b;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Comma-separated complex numbers in the domain-file expression syntax.
pub fn parse_vector(text: &str) -> Result<Vec<Complex64>, String> {
    text.split(',')
        .map(|part| {
            let p = parse_expression(part.trim(), &[]).map_err(|e| format!("`{}`: {e}", part.trim()))?;
            if p.degree().unwrap_or(0) > 0 {
                return Err(format!("`{}` is not a constant", part.trim()));
            }
            Ok(p.evaluate(&[]))
        })
        .collect()
}

fn parse_deltas(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    match parts.as_slice() {
        [a, b, n] => {
            let count = n.trim().parse::<usize>().map_err(|e| format!("`{n}`: {e}"))?;
            geometric_deltas(num(a)?, num(b)?, count).map_err(|e| e.to_string())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(format!("`{text}` is neither start:end:count nor a list")),
    }
}

fn out_path(output: &OutputArgs, command: &str) -> PathBuf {
    output.out.clone().unwrap_or_else(|| {
        let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_default();
        dir.join(format!("{command}.jsonl"))
    })
}

fn emit(output: &OutputArgs, command: &str, config: Value, records: &[Value]) -> Result<PathBuf, Failure> {
    let path = out_path(output, command);
    let header = Header::new(command, config, output.deterministic);
    report::write(&path, &header, records).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result types serialize")
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::NormalForm { domain, output } => {
            let (dom, source) = load_domain(&domain)?;
            let res = normal_form_of_domain(&dom, None)?;
            let grammar = res.jet.to_hermitian()?.to_grammar(&variable_names(res.jet.z_block() + 1));
            let report = json!({
                "normal_form": grammar,
                "k": res.k,
                "d": 2 * res.k,
                "degree_p": res.p.degree(),
                "min_degree_q": res.q.min_degree(),
                "min_degree_r": res.r.min_degree(),
                "status": res.status,
                "transform_log": res.transform_log,
            });
            let config = json!({ "command": "normal-form", "domain": source });
            let path = emit(&output, "normal-form", config, &[report])?;
            println!("k = {}  status = {}", res.k, if res.is_normalized() { "normalized" } else { "pseudoconvexity violation" });
            println!("rho = {grammar}");
            println!("wrote {}", path.display());
        }
        Command::Kobayashi { domain, point, dir, search, output } => {
            let (dom, source) = load_domain(&domain)?;
            let cfg = search_config(&search)?;
            let p = CPoint(parse_vector(&point).map_err(Failure)?);
            let zeta = parse_vector(&dir).map_err(Failure)?;
            let est = kobayashi_upper(&dom, &p, &zeta, &cfg)?;
            let config = json!({
                "command": "kobayashi", "domain": source, "point": p, "direction": zeta, "search": cfg,
            });
            let record = json!({ "domain": dom.family().as_str(), "estimate": est, "seed": cfg.seed });
            let path = emit(&output, "kobayashi", config, &[record])?;
            println!("K <= {}", fmt_real(est.value));
            println!("wrote {}", path.display());
        }
        Command::Indicatrix { domain, point, dirs, search, output } => {
            let (dom, source) = load_domain(&domain)?;
            let cfg = search_config(&search)?;
            let p = CPoint(parse_vector(&point).map_err(Failure)?);
            let dirs: Vec<Vec<Complex64>> = dirs.split(';').map(parse_vector).collect::<Result<_, _>>().map_err(Failure)?;
            let data = indicatrix_radii(&dom, &p, &dirs, &cfg)?;
            let config = json!({
                "command": "indicatrix", "domain": source, "point": p, "directions": dirs, "search": cfg,
            });
            let path = emit(&output, "indicatrix", config, &[to_value(&data)])?;
            for e in &data.entries {
                println!("[{}, {}]", fmt_real(e.r_lo), fmt_real(e.r_hi));
            }
            println!("wrote {}", path.display());
        }
        Command::SqueezeBound { domain, delta, mode, search, output } => {
            let (dom, source) = load_domain(&domain)?;
            let cfg = SqueezeConfig { disc: search_config(&search)?, margin: DEFAULT_MARGIN, mode: mode.into() };
            let b = squeezing_upper(&dom, delta, &cfg)?;
            let config = json!({ "command": "squeeze-bound", "domain": source, "delta": delta, "squeeze": cfg });
            let path = emit(&output, "squeeze-bound", config, &[to_value(&b)])?;
            match &b.diagnostic {
                Some(d) => println!("bound = {} ({d})", fmt_real(b.bound)),
                None => println!("bound = {}", fmt_real(b.bound)),
            }
            println!("wrote {}", path.display());
        }
        Command::Experiment { domain, deltas, mode, search, output } => {
            let (dom, source) = load_domain(&domain)?;
            let cfg = SqueezeConfig { disc: search_config(&search)?, margin: DEFAULT_MARGIN, mode: mode.into() };
            let deltas = parse_deltas(&deltas).map_err(Failure)?;
            let table = decay_experiment(&dom, &deltas, &cfg)?;
            let config = json!({ "command": "experiment", "domain": source, "deltas": deltas, "squeeze": cfg });
            let mut records: Vec<Value> = table.rows.iter().map(to_value).collect();
            records.push(json!({
                "summary": {
                    "slope": table.slope,
                    "theoretical_exponent": table.theoretical_exponent.map(|r| r.to_string()),
                    "verdict": table.verdict.as_str(),
                    "mode": table.mode,
                }
            }));
            let path = emit(&output, "experiment", config, &records)?;
            let csv_path = path.with_extension("csv");
            std::fs::write(&csv_path, table.to_csv()).map_err(|e| Failure(format!("{}: {e}", csv_path.display())))?;
            print!("{}", table.to_csv());
            let fmt = |x: Option<f64>| x.map(fmt_real).unwrap_or_else(|| "undefined".into());
            println!(
                "slope = {}  theoretical = {}  verdict = {}",
                fmt(table.slope),
                table.theoretical_exponent.map(|r| r.to_string()).unwrap_or_else(|| "none".into()),
                table.verdict.as_str()
            );
            println!("wrote {} and {}", path.display(), csv_path.display());
        }
        Command::Verify { files } => {
            let mut failed = false;
            for (name, ok) in self_checks() {
                println!("{} {name}", if ok { "PASS" } else { "FAIL" });
                failed |= !ok;
            }
            for f in &files {
                let res = std::fs::read_to_string(f).map_err(|e| e.to_string()).and_then(|t| {
                    report::verify_text(&t).map_err(|e| e.to_string())
                });
                match res {
                    Ok(h) => println!("PASS {} ({}, hash {})", f.display(), h.command, h.config_hash),
                    Err(e) => {
                        println!("FAIL {}: {e}", f.display());
                        failed = true;
                    }
                }
            }
            if failed {
                return Err(Failure("verification failed".into()));
            }
        }
    }
    Ok(())
}

fn self_checks() -> Vec<(&'static str, bool)> {
    use crate::kobayashi::{ball_exact, diag_lower_certificate, lemma10_disc};
    use crate::squeezing::{exponent_composition, ExponentVariant};
    use num_rational::Rational64;

    let e1 = vec![Complex64::new(1.0, 0.0), Complex64::default(), Complex64::default()];
    let cfg = DiscSearchConfig::default();
    let mut out = Vec::new();
    let ball = DomainSpec::ball(1.0).ok();
    out.push((
        "ball centre metric",
        ball.as_ref()
            .and_then(|b| kobayashi_upper(b, &CPoint::origin(3), &e1, &cfg).ok())
            .is_some_and(|k| (1.0..=1.0 + 2e-3).contains(&k.value)),
    ));
    out.push((
        "ball closed form",
        ball_exact(1.0, &[Complex64::new(0.5, 0.0), Complex64::default(), Complex64::default()], &e1)
            .is_ok_and(|k| (k - 4.0 / 3.0).abs() < 1e-14),
    ));
    out.push((
        "exponent identity",
        (1..=8u32).all(|k| {
            let k64 = i64::from(k);
            exponent_composition(k, ExponentVariant::Standard) * Rational64::from_integer(4 * k64 * (4 * k64 + 1))
                == Rational64::from_integer(1)
        }),
    ));
    let model = DomainSpec::model(ModelParams::new(2)).ok();
    out.push(("model axis disc", model.as_ref().is_some_and(|m| lemma10_disc(m, 1e-4, 0.1, 0).is_ok())));
    out.push((
        "model certificate below disc bound",
        model.as_ref().is_some_and(|m| {
            let p = crate::kobayashi::sweep_point(m, 1e-2);
            let diag = crate::kobayashi::diagonal_direction(3);
            match (diag_lower_certificate(m, 1e-2), kobayashi_upper(m, &p, &diag, &cfg)) {
                (Ok(lo), Ok(hi)) => lo.value <= hi.value,
                _ => false,
            }
        }),
    ));
    out.push((
        "closed-form slope",
        model.as_ref().is_some_and(|m| {
            let cfg = SqueezeConfig { mode: Mode::ClosedForm, ..Default::default() };
            decay_experiment(m, &[1e-2, 1e-3, 1e-4, 1e-5, 1e-6], &cfg)
                .ok()
                .and_then(|t| t.slope)
                .is_some_and(|s| (s - 1.0 / 72.0).abs() < 1e-12)
        }),
    ));
    out.push((
        "model normal form",
        model.as_ref().is_some_and(|m| normal_form_of_domain(m, None).is_ok_and(|r| r.is_normalized() && r.k == 2)),
    ));
    out
}
