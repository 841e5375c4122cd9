mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use popmatch::dominant::strongly_dominant;
use popmatch::gadgets::{vc_to_roommates, vc_to_weighted_bipartite, PlainGraph};
use popmatch::maxweight::{approx2, max_weight_popular, RStatus, ROutcome};
use popmatch::popularity::{counterexample, enumerate_popular, max_size_popular_brute, max_weight_popular_brute, EnumerationGuard};
use popmatch::stable::{gale_shapley, irving, ListInstance};
use popmatch::subgraph::popular_subgraph;
use popmatch::witness::{
    is_popular_lp, stable_mixed_feasibility, verify_bipartite_witness, verify_roommates_witness, verify_strongly_dominant,
    BipartiteWitness, RoommatesWitness, StronglyDominantWitness,
};
use popmatch::{Error, Matching, PreferenceInstance, Side};
use serde_json::{json, Value};

use report::{digest, reverify, GuardSettings, RunReport};

#[derive(Parser, Debug)]
#[command(name = "popmatch", version, about = "Popular, stable and strongly dominant matchings")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a run report (result, instance digest, timing, guard).
    #[arg(long, global = true)]
    run_report: Option<PathBuf>,
    /// Worker threads for parity enumeration and brute-force filters.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProposingSide {
    A,
    B,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PopularityMode {
    Brute,
    Lp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WitnessKind {
    Popular,
    StronglyDominant,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GadgetKind {
    VcRoommates,
    VcBipartite,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BruteTask {
    EnumeratePopular,
    MaxSize,
    MaxWeight,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// A stable matching: Gale-Shapley on bipartite input, Irving otherwise.
    Stable {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "a")]
        proposers: ProposingSide,
    },
    /// Irving's algorithm.
    Irving {
        instance: PathBuf,
        /// Include phase-1 lists, rotations and final lists.
        #[arg(long)]
        trace: bool,
    },
    /// A strongly dominant matching via the bidirected reduction.
    StronglyDominant {
        instance: PathBuf,
        #[arg(long)]
        witness: bool,
        /// Include the Irving trace on the bidirected instance.
        #[arg(long)]
        trace: bool,
    },
    /// Popularity of a matching (exit 1 when not popular).
    VerifyPopular {
        instance: PathBuf,
        matching: PathBuf,
        #[arg(long, value_enum, default_value = "lp")]
        mode: PopularityMode,
    },
    /// Checks a dual witness against a matching (exit 1 on violations).
    VerifyWitness {
        instance: PathBuf,
        matching: PathBuf,
        witness: PathBuf,
        #[arg(long, value_enum, default_value = "popular")]
        kind: WitnessKind,
    },
    /// Components of the popular subgraph (brute force, bipartite).
    PopularSubgraph {
        instance: PathBuf,
        /// Use stable edges only. Under-approximates the subgraph, so the
        /// exact algorithm is not sound on top of it.
        #[arg(long)]
        stable_edges_only: bool,
    },
    /// Exact max-weight popular matching.
    MaxWeightPopular {
        instance: PathBuf,
        /// `w u v p/q` lines overriding weights in the instance.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Per-parity-vector status, objective and decomposition.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Enumerate parities of every component instead of size-2 ones only.
        #[arg(long)]
        plain: bool,
    },
    /// Better of max-weight stable and max-weight dominant.
    Approx2 {
        instance: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Vertex-cover reduction gadgets.
    Gadget {
        #[arg(value_enum)]
        kind: GadgetKind,
        /// Edge list, one `u v` pair per line, vertices labelled from 1.
        #[arg(long)]
        graph: PathBuf,
        /// Also write the gadget instance in instance-file format.
        #[arg(long)]
        instance_out: Option<PathBuf>,
    },
    /// Exhaustive oracles.
    Brute {
        #[arg(value_enum)]
        task: BruteTask,
        instance: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Whether the stable-matching LP with odd-set cuts is feasible.
    MixedStableFeasible { instance: PathBuf },
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl Failure {
    fn message(&self) -> String {
        match self {
            Failure::Usage(s) => s.clone(),
            Failure::Domain(e) => e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type CmdResult = Result<Outcome, Failure>;

struct Outcome {
    value: Value,
    /// Exit 1: the requested object does not exist or the check failed.
    negative: bool,
    matchings: Vec<Matching>,
}

impl Outcome {
    fn ok(value: Value, matchings: Vec<Matching>) -> Self {
        Self { value, negative: false, matchings }
    }
}

struct Ctx {
    guard: EnumerationGuard,
    /// Instance file bytes, for the digest.
    instance_bytes: Option<Vec<u8>>,
    instance: Option<PreferenceInstance>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }

    fn load(&mut self, path: &Path, weights: Option<&Path>) -> Result<PreferenceInstance, Failure> {
        let text = self.read(path)?;
        self.instance_bytes = Some(text.clone().into_bytes());
        let mut g = PreferenceInstance::parse(&text)?;
        if let Some(w) = weights {
            let wt = self.read(w)?;
            g = g.with_weights_text(&wt)?;
        }
        self.instance = Some(g.clone());
        Ok(g)
    }

    fn json(&mut self, path: &Path) -> Result<Value, Failure> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    std::fs::write(path, s).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn opt_matching(g: &PreferenceInstance, m: &Option<Matching>) -> Value {
    m.as_ref().map_or(Value::Null, |m| m.to_json(g))
}

fn outcome_json(o: &ROutcome, g: &PreferenceInstance) -> Value {
    match &o.status {
        RStatus::Infeasible => json!({"r": o.r.to_string_bits(), "status": "infeasible"}),
        RStatus::Optimal { objective, .. } => json!({
            "r": o.r.to_string_bits(),
            "status": "optimal",
            "objective": objective.to_fraction_string(),
            "matching": o.best.as_ref().map(|m| m.matching.to_json(g)),
        }),
    }
}

fn run(cmd: &Command, ctx: &mut Ctx) -> CmdResult {
    match cmd {
        Command::Stable { instance, proposers } => {
            let g = ctx.load(instance, None)?;
            let m = if g.is_bipartite() {
                let side = match proposers {
                    ProposingSide::A => Side::A,
                    ProposingSide::B => Side::B,
                };
                Some(gale_shapley(&g, side)?)
            } else {
                irving(&g).0
            };
            let value = json!({"stable": opt_matching(&g, &m)});
            Ok(Outcome { value, negative: m.is_none(), matchings: m.into_iter().collect() })
        }
        Command::Irving { instance, trace } => {
            let g = ctx.load(instance, None)?;
            let (m, tr) = irving(&g);
            let mut value = json!({"stable": opt_matching(&g, &m)});
            if *trace {
                value["trace"] = tr.to_json(&ListInstance::from_instance(&g));
            }
            Ok(Outcome { value, negative: m.is_none(), matchings: m.into_iter().collect() })
        }
        Command::StronglyDominant { instance, witness, trace } => {
            let g = ctx.load(instance, None)?;
            let (res, bi, tr) = strongly_dominant(&g);
            let mut value = json!({"strongly_dominant": res.as_ref().map(|r| r.matching.to_json(&g))});
            if *witness {
                value["witness"] = res.as_ref().map_or(Value::Null, |r| {
                    let right: Vec<&str> = r.witness.right().iter().map(|&u| g.name(u)).collect();
                    json!({"dual": r.witness.to_json(&g), "R": right})
                });
            }
            if *trace {
                value["trace"] = tr.to_json(&bi);
            }
            let negative = res.is_none();
            Ok(Outcome { value, negative, matchings: res.map(|r| r.matching).into_iter().collect() })
        }
        Command::VerifyPopular { instance, matching, mode } => {
            let g = ctx.load(instance, None)?;
            let m = Matching::from_json(&g, &ctx.json(matching)?)?;
            let value = match mode {
                PopularityMode::Brute => {
                    let ce = counterexample(&g, &m, &ctx.guard)?;
                    json!({"mode": "brute", "popular": ce.is_none(), "counterexample": opt_matching(&g, &ce)})
                }
                PopularityMode::Lp => {
                    let r = is_popular_lp(&g, &m)?;
                    json!({
                        "mode": "lp",
                        "popular": r.popular,
                        "optimum": r.optimum.to_fraction_string(),
                        "witness": r.witness.as_ref().map(|w| w.to_json(&g)),
                        "counterexample": if r.popular { Value::Null } else { r.best.to_json(&g) },
                    })
                }
            };
            let negative = value["popular"] != Value::Bool(true);
            Ok(Outcome { value, negative, matchings: vec![m] })
        }
        Command::VerifyWitness { instance, matching, witness, kind } => {
            let g = ctx.load(instance, None)?;
            let m = Matching::from_json(&g, &ctx.json(matching)?)?;
            let w = RoommatesWitness::from_json(&g, &ctx.json(witness)?)?;
            let value = match kind {
                WitnessKind::Popular if g.is_bipartite() => {
                    if !w.z.is_empty() {
                        return Err(Failure::Domain(Error::InvalidWitness("bipartite witnesses carry no odd sets".into())));
                    }
                    verify_bipartite_witness(&g, &m, &BipartiteWitness { alpha: w.alpha })?.to_json()
                }
                WitnessKind::Popular => verify_roommates_witness(&g, &m, &w)?.to_json(),
                WitnessKind::StronglyDominant => {
                    let mut alpha = Vec::with_capacity(g.n());
                    for (u, a) in w.alpha.iter().enumerate() {
                        match a.to_i64() {
                            Some(v @ -1..=1) => alpha.push(v as i8),
                            _ => {
                                return Err(Failure::Domain(Error::InvalidWitness(format!(
                                    "value {a} at `{}` is not in {{-1, 0, 1}}",
                                    g.name(u)
                                ))))
                            }
                        }
                    }
                    let c = verify_strongly_dominant(&g, &m, &StronglyDominantWitness { alpha })?;
                    json!({"valid": c.ok(), "dual": c.dual.to_json(), "partition": c.partition.to_json()})
                }
            };
            let negative = value["valid"] != Value::Bool(true);
            Ok(Outcome { value, negative, matchings: vec![m] })
        }
        Command::PopularSubgraph { instance, stable_edges_only } => {
            let g = ctx.load(instance, None)?;
            let f = popular_subgraph(&g, &ctx.guard, *stable_edges_only)?;
            let mut value = f.to_json(&g);
            value["stable_edges_only"] = json!(stable_edges_only);
            Ok(Outcome::ok(value, Vec::new()))
        }
        Command::MaxWeightPopular { instance, weights, report, plain } => {
            let g = ctx.load(instance, weights.as_deref())?;
            let f = popular_subgraph(&g, &ctx.guard, false)?;
            let res = max_weight_popular(&g, &f, !plain)?;
            if let Some(path) = report {
                write_json(path, &res.report_json(&g))?;
            }
            let value = json!({
                "matching": res.matching.to_json(&g),
                "weight": res.weight.to_fraction_string(),
                "r": res.r.to_string_bits(),
                "witness": res.witness.to_json(&g),
            });
            Ok(Outcome::ok(value, vec![res.matching]))
        }
        Command::Approx2 { instance, weights } => {
            let g = ctx.load(instance, weights.as_deref())?;
            let f = popular_subgraph(&g, &ctx.guard, false)?;
            let a = approx2(&g, &f)?;
            let value = json!({
                "matching": a.matching.to_json(&g),
                "weight": a.weight.to_fraction_string(),
                "chosen": if a.from_stable { "stable" } else { "dominant" },
                "stable": outcome_json(&a.stable, &g),
                "dominant": outcome_json(&a.dominant, &g),
            });
            Ok(Outcome::ok(value, vec![a.matching]))
        }
        Command::Gadget { kind, graph, instance_out } => {
            let text = ctx.read(graph)?;
            ctx.instance_bytes = Some(text.clone().into_bytes());
            let h = PlainGraph::parse(&text)?;
            let gad = match kind {
                GadgetKind::VcRoommates => vc_to_roommates(&h),
                GadgetKind::VcBipartite => vc_to_weighted_bipartite(&h),
            };
            if let Some(path) = instance_out {
                std::fs::write(path, gad.instance.to_text()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            ctx.instance = Some(gad.instance.clone());
            Ok(Outcome::ok(gad.to_json(), Vec::new()))
        }
        Command::Brute { task, instance, weights } => {
            let g = ctx.load(instance, weights.as_deref())?;
            match task {
                BruteTask::EnumeratePopular => {
                    let all = enumerate_popular(&g, &ctx.guard)?;
                    let value = json!({"count": all.len(), "popular": all.iter().map(|m| m.to_json(&g)).collect::<Vec<_>>()});
                    Ok(Outcome { negative: all.is_empty(), value, matchings: all })
                }
                BruteTask::MaxSize | BruteTask::MaxWeight => {
                    let best = if matches!(task, BruteTask::MaxSize) {
                        max_size_popular_brute(&g, &ctx.guard)?
                    } else {
                        max_weight_popular_brute(&g, &ctx.guard)?
                    };
                    let value = json!({
                        "matching": opt_matching(&g, &best),
                        "size": best.as_ref().map(|m| m.len()),
                        "weight": best.as_ref().map(|m| m.weight(&g).to_fraction_string()),
                    });
                    Ok(Outcome { negative: best.is_none(), value, matchings: best.into_iter().collect() })
                }
            }
        }
        Command::MixedStableFeasible { instance } => {
            let g = ctx.load(instance, None)?;
            let feasible = stable_mixed_feasibility(&g, ctx.guard.max_vertices)?;
            Ok(Outcome { value: json!({"feasible": feasible}), negative: !feasible, matchings: Vec::new() })
        }
    }
}

fn emit(out: Option<&Path>, v: &Value) -> Result<(), Failure> {
    match out {
        Some(p) => write_json(p, v),
        None => {
            use std::io::Write;
            let text = serde_json::to_string_pretty(v).expect("json");
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Usage(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let mut ctx = Ctx { guard: EnumerationGuard::from_env(), instance_bytes: None, instance: None };
    let start = Instant::now();
    let result = run(&cli.command, &mut ctx).and_then(|o| {
        let checked = match &ctx.instance {
            Some(g) => reverify(g, &o.matchings).map_err(Failure::Usage)?,
            None => 0,
        };
        emit(cli.out.as_deref(), &o.value)?;
        Ok((o, checked))
    });
    let elapsed = start.elapsed();
    let code = match result {
        Ok((o, checked)) => {
            let code = if o.negative { 1 } else { 0 };
            if let Some(path) = &cli.run_report {
                let rep = RunReport {
                    command: std::env::args().skip(1).collect(),
                    instance_digest: ctx.instance_bytes.as_deref().map(digest),
                    output: o.value,
                    exit_code: code,
                    reverified_matchings: checked,
                    timing_ms: elapsed.as_secs_f64() * 1000.0,
                    guard: GuardSettings::from(&ctx.guard),
                    jobs: cli.jobs,
                };
                if let Err(f) = write_json(path, &serde_json::to_value(&rep).expect("report")) {
                    eprintln!("error: {}", f.message());
                    return ExitCode::from(2);
                }
            }
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            2
        }
    };
    ExitCode::from(code as u8)
}
