//! Command-line front end. Every computation works on the documented JSON
//! file formats and prints deterministic JSON (sorted keys, no timestamps).
//!
//! Exit codes: 0 = computed/verified, 1 = a theorem check found a violation,
//! 2 = input error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use logpic::complex::{self, ComplexDivisor, ComplexJson, MetrizedComplex};
use logpic::divisor::{self, GraphDivisor};
use logpic::graph::{GraphJson, Multigraph};
use logpic::logcurve::{self, BundleJson, CurveJson, LogCurve, LogLineBundle, TorusModel};
use logpic::sweep::{self, SweepConfig, SweepReport};

#[derive(Parser)]
#[command(
    name = "logpic",
    version,
    about = "Exact divisor theory on multigraphs, metrized curve complexes, and log curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on multigraphs
    Graph {
        #[command(subcommand)]
        verb: GraphVerb,
    },
    /// Operations on metrized curve complexes
    Complex {
        #[command(subcommand)]
        verb: ComplexVerb,
    },
    /// Operations on log curves
    Curve {
        #[command(subcommand)]
        verb: CurveVerb,
    },
    /// Write the named fixtures as JSON files
    Fixtures {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum GraphVerb {
    /// Rank of a divisor (loop-subdivided semantics; --naive-rank for the
    /// loop-blind rank)
    Rank {
        #[arg(long)]
        divisor: PathBuf,
        #[arg(long)]
        naive_rank: bool,
        input: PathBuf,
    },
    /// Canonical q-reduced representative of a divisor class
    Reduce {
        #[arg(long)]
        divisor: PathBuf,
        /// Base vertex id; defaults to the lexicographically least vertex
        #[arg(long)]
        base: Option<String>,
        input: PathBuf,
    },
    /// Linear equivalence of two divisors
    Equiv {
        #[arg(long)]
        divisor: PathBuf,
        #[arg(long)]
        divisor2: PathBuf,
        input: PathBuf,
    },
    /// Invariant factors of the Jacobian
    Jacobian { input: PathBuf },
    /// Canonical divisor K(v) = valence(v) - 2
    Canonical { input: PathBuf },
    /// Verify graph Riemann-Roch on this graph over a degree window
    RrCheck {
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        degree_window: Option<(i64, i64)>,
        #[arg(long)]
        naive_rank: bool,
        input: PathBuf,
    },
    /// Exhaustive/seeded Riemann-Roch sweep over generated graphs
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum ComplexVerb {
    /// Rank of a divisor on the complex (--naive-rank skips loop subdivision)
    Rank {
        #[arg(long)]
        divisor: PathBuf,
        #[arg(long)]
        naive_rank: bool,
        input: PathBuf,
    },
    /// Equivalence of two divisors under component equivalence and firing
    Equiv {
        #[arg(long)]
        divisor: PathBuf,
        #[arg(long)]
        divisor2: PathBuf,
        input: PathBuf,
    },
    /// Canonical class and a representative divisor
    Canonical { input: PathBuf },
    /// Underlying weighted graph; with --divisor, also its multidegree
    Tropicalize {
        #[arg(long)]
        divisor: Option<PathBuf>,
        input: PathBuf,
    },
    /// Verify Riemann-Roch over all classes in a degree window
    RrCheck {
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        degree_window: Option<(i64, i64)>,
        input: PathBuf,
    },
    /// Verify the Clifford bound over special classes
    Clifford {
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        degree_window: Option<(i64, i64)>,
        input: PathBuf,
    },
    /// Rebuild the complex through the curve correspondence and compare
    Roundtrip { input: PathBuf },
    /// Riemann-Roch sweep over generated complexes
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum CurveVerb {
    /// Combinatorial rank of a line bundle (--direct for the literal
    /// finite-torus enumeration)
    Rank {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        direct: bool,
        #[arg(long)]
        torus: Option<i64>,
        input: PathBuf,
    },
    /// Equality of two bundles in the log Picard model
    Equiv {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        bundle2: PathBuf,
        #[arg(long)]
        torus: Option<i64>,
        input: PathBuf,
    },
    /// The relative log cotangent bundle
    Canonical { input: PathBuf },
    /// Dual graph; with --bundle, the reduced representative of tau(L)
    Tropicalize {
        #[arg(long)]
        bundle: Option<PathBuf>,
        input: PathBuf,
    },
    /// The associated metrized curve complex
    ToComplex { input: PathBuf },
    /// Verify Riemann-Roch for bundle classes in a degree window
    RrCheck {
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        degree_window: Option<(i64, i64)>,
        input: PathBuf,
    },
    /// Verify the kernel of the quotient onto the complex Picard group
    SesCheck {
        #[arg(long, default_value_t = 2)]
        torus: i64,
        input: PathBuf,
    },
    /// Verify the Clifford bound over special classes
    Clifford {
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        degree_window: Option<(i64, i64)>,
        input: PathBuf,
    },
    /// Rebuild the curve through the complex correspondence and compare
    Roundtrip { input: PathBuf },
    /// Theorem sweeps over generated curves
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepProperty::All)]
        property: SweepProperty,
        #[command(flatten)]
        args: SweepArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepProperty {
    Rr,
    Specialization,
    Clifford,
    Ses,
    Roundtrip,
    All,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_vertices: Option<usize>,
    #[arg(long)]
    max_edges: Option<usize>,
    #[arg(long)]
    max_group_order: Option<i64>,
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    degree_window: Option<(i64, i64)>,
    #[arg(long)]
    instances: Option<usize>,
    /// Negative control: loop-blind graph ranks (expected to violate RR on
    /// loops)
    #[arg(long)]
    naive_rank: bool,
    /// Also write the report to a file
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn config(&self) -> SweepConfig {
        let mut cfg = SweepConfig::new(self.seed);
        if let Some(v) = self.max_vertices {
            cfg.max_vertices = v;
        }
        if let Some(e) = self.max_edges {
            cfg.max_edges = e;
        }
        if let Some(g) = self.max_group_order {
            cfg.max_group_order = g;
        }
        if let Some(w) = self.degree_window {
            cfg.degree_window = w;
        }
        if let Some(i) = self.instances {
            cfg.instances = i;
        }
        cfg.loop_blind_rank = self.naive_rank;
        cfg
    }
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {:?}", s))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {}", e))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {}", e))?;
    if lo > hi {
        return Err("degree window must satisfy lo <= hi".into());
    }
    Ok((lo, hi))
}

/// Outcome of a command: the JSON to print and whether a theorem check
/// failed.
struct Outcome {
    value: Value,
    violation: bool,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome {
            value,
            violation: false,
        }
    }
}

#[derive(Debug)]
struct CliError {
    message: String,
    location: Option<String>,
}

impl CliError {
    fn new(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            location: None,
        }
    }
}

impl From<logpic::Error> for CliError {
    fn from(e: logpic::Error) -> Self {
        CliError::new(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(format!("io error: {}", e))
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError {
        message: format!("cannot read {}: {}", path.display(), e),
        location: None,
    })?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| CliError {
        message: format!("{}: {}", path.display(), e.inner()),
        location: Some(format!("/{}", e.path().to_string().replace('.', "/"))),
    })
}

fn load_graph(path: &Path) -> Result<Multigraph, CliError> {
    let json: GraphJson = read_json(path)?;
    Ok(Multigraph::from_json(&json)?)
}

fn load_complex(path: &Path) -> Result<MetrizedComplex, CliError> {
    let json: ComplexJson = read_json(path)?;
    Ok(MetrizedComplex::from_json(&json)?)
}

fn load_curve(path: &Path) -> Result<LogCurve, CliError> {
    let json: CurveJson = read_json(path)?;
    Ok(LogCurve::from_json(&json)?)
}

fn load_graph_divisor(g: &Multigraph, path: &Path) -> Result<GraphDivisor, CliError> {
    let map: BTreeMap<String, i64> = read_json(path)?;
    Ok(GraphDivisor::from_map(g, &map)?)
}

fn load_complex_divisor(cx: &MetrizedComplex, path: &Path) -> Result<ComplexDivisor, CliError> {
    let map: BTreeMap<String, BTreeMap<String, i64>> = read_json(path)?;
    Ok(ComplexDivisor::from_map(cx, &map)?)
}

fn load_bundle(x: &LogCurve, path: &Path) -> Result<LogLineBundle, CliError> {
    let json: BundleJson = read_json(path)?;
    Ok(LogLineBundle::from_json(x, &json)?)
}

fn report_outcome(report: SweepReport) -> Outcome {
    let violation = !report.passed();
    Outcome {
        value: serde_json::to_value(report).expect("report serializes"),
        violation,
    }
}

fn window_config(window: Option<(i64, i64)>, naive: bool) -> SweepConfig {
    let mut cfg = SweepConfig::new(0);
    if let Some(w) = window {
        cfg.degree_window = w;
    }
    cfg.loop_blind_rank = naive;
    cfg
}

fn run_graph(verb: GraphVerb) -> Result<Outcome, CliError> {
    match verb {
        GraphVerb::Rank {
            divisor,
            naive_rank,
            input,
        } => {
            let g = load_graph(&input)?;
            let d = load_graph_divisor(&g, &divisor)?;
            let rank = if naive_rank {
                divisor::rank_bn(&g, &d)
            } else {
                divisor::rank_ac(&g, &d)
            };
            Ok(Outcome::ok(json!({ "rank": rank })))
        }
        GraphVerb::Reduce {
            divisor,
            base,
            input,
        } => {
            let g = load_graph(&input)?;
            let d = load_graph_divisor(&g, &divisor)?;
            let q = match base {
                Some(id) => g.vertex_index(&id)?,
                None => 0,
            };
            let reduced = divisor::q_reduce(&g, &d, q);
            let unburnt = divisor::dhar(&g, &reduced, q)?;
            Ok(Outcome::ok(json!({
                "base": g.vertex_id(q),
                "reduced": reduced.to_map(&g),
                "unburnt": unburnt
                    .iter()
                    .map(|&v| g.vertex_id(v).to_string())
                    .collect::<Vec<_>>(),
            })))
        }
        GraphVerb::Equiv {
            divisor,
            divisor2,
            input,
        } => {
            let g = load_graph(&input)?;
            let d1 = load_graph_divisor(&g, &divisor)?;
            let d2 = load_graph_divisor(&g, &divisor2)?;
            Ok(Outcome::ok(json!({
                "equivalent": divisor::is_equivalent(&g, &d1, &d2)
            })))
        }
        GraphVerb::Jacobian { input } => {
            let g = load_graph(&input)?;
            let invariants: Vec<String> = divisor::jacobian(&g)
                .iter()
                .map(|f| f.to_string())
                .collect();
            Ok(Outcome::ok(json!({ "invariants": invariants })))
        }
        GraphVerb::Canonical { input } => {
            let g = load_graph(&input)?;
            let k = g.canonical_divisor();
            Ok(Outcome::ok(json!({
                "canonical": k.to_map(&g),
                "degree": k.degree(),
            })))
        }
        GraphVerb::RrCheck {
            degree_window,
            naive_rank,
            input,
        } => {
            let g = load_graph(&input)?;
            let cfg = window_config(degree_window, naive_rank);
            Ok(report_outcome(sweep::rr_check_graph(&cfg, &g)?))
        }
        GraphVerb::Sweep(args) => {
            let report = sweep::sweep_rr_graph(&args.config())?;
            finish_sweep(args, report)
        }
    }
}

fn run_complex(verb: ComplexVerb) -> Result<Outcome, CliError> {
    match verb {
        ComplexVerb::Rank {
            divisor,
            naive_rank,
            input,
        } => {
            let cx = load_complex(&input)?;
            let d = load_complex_divisor(&cx, &divisor)?;
            let class = complex::class_of(&cx, &d)?;
            let rank = if naive_rank {
                complex::rank_naive(&cx, &class)?
            } else {
                complex::rank(&cx, &class)?
            };
            Ok(Outcome::ok(json!({ "rank": rank })))
        }
        ComplexVerb::Equiv {
            divisor,
            divisor2,
            input,
        } => {
            let cx = load_complex(&input)?;
            let d1 = load_complex_divisor(&cx, &divisor)?;
            let d2 = load_complex_divisor(&cx, &divisor2)?;
            let c1 = complex::class_of(&cx, &d1)?;
            let c2 = complex::class_of(&cx, &d2)?;
            Ok(Outcome::ok(json!({
                "equivalent": complex::is_equivalent(&cx, &c1, &c2)?
            })))
        }
        ComplexVerb::Canonical { input } => {
            let cx = load_complex(&input)?;
            let (class, rep) = complex::canonical(&cx)?;
            Ok(Outcome::ok(json!({
                "class": class_json(&cx, &class),
                "degree": class.degree(),
                "representative": rep.to_map(&cx),
            })))
        }
        ComplexVerb::Tropicalize { divisor, input } => {
            let cx = load_complex(&input)?;
            let mut out = json!({
                "graph": serde_json::to_value(cx.graph().to_json()).expect("graph serializes"),
            });
            if let Some(path) = divisor {
                let d = load_complex_divisor(&cx, &path)?;
                out["multidegree"] = serde_json::to_value(d.multidegree().to_map(cx.graph()))
                    .expect("divisor serializes");
            }
            Ok(Outcome::ok(out))
        }
        ComplexVerb::RrCheck {
            degree_window,
            input,
        } => {
            let cx = load_complex(&input)?;
            let cfg = window_config(degree_window, false);
            Ok(report_outcome(sweep::rr_check_complex(&cfg, &cx)?))
        }
        ComplexVerb::Clifford {
            degree_window,
            input,
        } => {
            let cx = load_complex(&input)?;
            let (x, _) = logcurve::from_complex(&cx)?;
            let cfg = window_config(degree_window, false);
            let report = sweep::sweep_clifford_on(&cfg, &[("input".to_string(), x)])?;
            Ok(report_outcome(report))
        }
        ComplexVerb::Roundtrip { input } => {
            let cx = load_complex(&input)?;
            let (x, _) = logcurve::from_complex(&cx)?;
            let cx2 = logcurve::to_complex(&x)?;
            let ok = complex::structurally_equal(&cx, &cx2);
            Ok(Outcome {
                value: json!({ "ok": ok }),
                violation: !ok,
            })
        }
        ComplexVerb::Sweep(args) => {
            let report = sweep::sweep_rr_complex(&args.config())?;
            finish_sweep(args, report)
        }
    }
}

fn run_curve(verb: CurveVerb) -> Result<Outcome, CliError> {
    match verb {
        CurveVerb::Rank {
            bundle,
            direct,
            torus,
            input,
        } => {
            let x = load_curve(&input)?;
            let l = load_bundle(&x, &bundle)?;
            let rank = if direct {
                let torus = TorusModel::new(torus.unwrap_or(2))?;
                logcurve::comb_rank_direct(&x, &l, &torus)?
            } else {
                logcurve::comb_rank(&x, &l)?
            };
            Ok(Outcome::ok(json!({ "rank": rank })))
        }
        CurveVerb::Equiv {
            bundle,
            bundle2,
            torus,
            input,
        } => {
            let x = load_curve(&input)?;
            let l1 = load_bundle(&x, &bundle)?;
            let l2 = load_bundle(&x, &bundle2)?;
            let torus = TorusModel::new(torus.unwrap_or(2))?;
            Ok(Outcome::ok(json!({
                "equivalent": logcurve::log_class_equal(&x, &l1, &l2, &torus)?
            })))
        }
        CurveVerb::Canonical { input } => {
            let x = load_curve(&input)?;
            let omega = logcurve::omega_log(&x)?;
            Ok(Outcome::ok(json!({
                "bundle": serde_json::to_value(omega.to_json(&x)).expect("bundle serializes"),
                "degree": logcurve::degree(&omega),
            })))
        }
        CurveVerb::Tropicalize { bundle, input } => {
            let x = load_curve(&input)?;
            let cx = logcurve::to_complex(&x)?;
            let mut out = json!({
                "graph": serde_json::to_value(cx.graph().to_json()).expect("graph serializes"),
            });
            if let Some(path) = bundle {
                let l = load_bundle(&x, &path)?;
                let reduced = logcurve::tau(&x, &l)?;
                out["tau"] = serde_json::to_value(reduced.to_map(cx.graph()))
                    .expect("divisor serializes");
                out["multidegree"] = serde_json::to_value(
                    logcurve::multidegree(&x, &l).to_map(cx.graph()),
                )
                .expect("divisor serializes");
                out["degree"] = json!(logcurve::degree(&l));
            }
            Ok(Outcome::ok(out))
        }
        CurveVerb::ToComplex { input } => {
            let x = load_curve(&input)?;
            let cx = logcurve::to_complex(&x)?;
            Ok(Outcome::ok(
                serde_json::to_value(cx.to_json()).expect("complex serializes"),
            ))
        }
        CurveVerb::RrCheck {
            degree_window,
            input,
        } => {
            let x = load_curve(&input)?;
            let cfg = window_config(degree_window, false);
            let report = sweep::sweep_rr_curve_on(&cfg, &[("input".to_string(), x)])?;
            Ok(report_outcome(report))
        }
        CurveVerb::SesCheck { torus, input } => {
            let x = load_curve(&input)?;
            let torus = TorusModel::new(torus)?;
            let kernel = logcurve::quotient_kernel(&x, &torus)?;
            let ok = kernel.order == kernel.expected && kernel.full;
            Ok(Outcome {
                value: json!({
                    "kernelOrder": kernel.order,
                    "expected": kernel.expected,
                    "b1": kernel.b1,
                    "torus": kernel.torus,
                    "invariants": kernel.invariants,
                }),
                violation: !ok,
            })
        }
        CurveVerb::Clifford {
            degree_window,
            input,
        } => {
            let x = load_curve(&input)?;
            let cfg = window_config(degree_window, false);
            let report = sweep::sweep_clifford_on(&cfg, &[("input".to_string(), x)])?;
            Ok(report_outcome(report))
        }
        CurveVerb::Roundtrip { input } => {
            let x = load_curve(&input)?;
            let cx = logcurve::to_complex(&x)?;
            let (back, _) = logcurve::from_complex(&cx)?;
            let ok = back == x;
            Ok(Outcome {
                value: json!({ "ok": ok }),
                violation: !ok,
            })
        }
        CurveVerb::Sweep { property, args } => {
            let cfg = args.config();
            let report = match property {
                SweepProperty::Rr => sweep::sweep_rr_curve(&cfg)?,
                SweepProperty::Specialization => sweep::sweep_specialization(&cfg)?,
                SweepProperty::Clifford => sweep::sweep_clifford(&cfg)?,
                SweepProperty::Ses => sweep::sweep_ses(&cfg)?,
                SweepProperty::Roundtrip => sweep::sweep_roundtrip(&cfg)?,
                SweepProperty::All => {
                    let reports = vec![
                        ("rr", sweep::sweep_rr_curve(&cfg)?),
                        ("specialization", sweep::sweep_specialization(&cfg)?),
                        ("clifford", sweep::sweep_clifford(&cfg)?),
                        ("ses", sweep::sweep_ses(&cfg)?),
                        ("roundtrip", sweep::sweep_roundtrip(&cfg)?),
                    ];
                    let violation = reports.iter().any(|(_, r)| !r.passed());
                    let value = Value::Object(
                        reports
                            .into_iter()
                            .map(|(name, r)| {
                                (
                                    name.to_string(),
                                    serde_json::to_value(r).expect("report serializes"),
                                )
                            })
                            .collect(),
                    );
                    let out = Outcome { value, violation };
                    return finish_sweep_outcome(args, out);
                }
            };
            finish_sweep(args, report)
        }
    }
}

fn finish_sweep(args: SweepArgs, report: SweepReport) -> Result<Outcome, CliError> {
    finish_sweep_outcome(args, report_outcome(report))
}

fn finish_sweep_outcome(args: SweepArgs, outcome: Outcome) -> Result<Outcome, CliError> {
    if let Some(path) = &args.out {
        fs::write(path, render(&outcome.value))?;
    }
    Ok(outcome)
}

fn class_json(cx: &MetrizedComplex, class: &complex::ComplexClass) -> Value {
    let map: serde_json::Map<String, Value> = class
        .parts
        .iter()
        .enumerate()
        .map(|(v, part)| {
            (
                cx.graph().vertex_id(v).to_string(),
                json!({ "degree": part.degree, "torsion": part.torsion.residues }),
            )
        })
        .collect();
    Value::Object(map)
}

fn run_fixtures(out: &Path) -> Result<Outcome, CliError> {
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    for (name, value) in logpic::fixtures::all() {
        let path = out.join(format!("{}.json", name));
        fs::write(&path, render(&value))?;
        written.push(path.display().to_string());
    }
    Ok(Outcome::ok(json!({ "written": written })))
}

fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Graph { verb } => run_graph(verb),
        Command::Complex { verb } => run_complex(verb),
        Command::Curve { verb } => run_curve(verb),
        Command::Fixtures { out } => run_fixtures(&out),
    };
    match result {
        Ok(outcome) => {
            print!("{}", render(&outcome.value));
            if outcome.violation {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            let mut payload = json!({ "error": err.message });
            if let Some(location) = err.location {
                payload["location"] = json!(location);
            }
            eprint!("{}", render(&payload));
            ExitCode::from(2)
        }
    }
}
