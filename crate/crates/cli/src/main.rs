//! `spg`: solve shortest-path games, synthesize and evaluate strategies,
//! and cross-check the whole pipeline on random corpora.
//!
//! Reports are single JSON documents on stdout (or key/value lines with
//! `--format text`); diagnostics go to stderr. Exit codes: 0 success,
//! 1 domain failure (divergent values, unmet preconditions, caps),
//! 2 usage, file or parse errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use spg_core::analysis::graph_params;
use spg_core::convert::convert_detailed;
use spg_core::corpus::{run_suite, CorpusConfig};
use spg_core::det::{
    eval_pure_strategy, eval_switching_strategy, switching_strategy, PureStrategy,
    SwitchingStrategy, DEFAULT_ALPHA_CAP,
};
use spg_core::game::{GameGraph, VertexId};
use spg_core::markov::{build_mc, max_best_response};
use spg_core::optimality::check_optimal_memoryless;
use spg_core::parse::{parse_game, parse_game_json};
use spg_core::randomized::{synthesize_epsilon_optimal, RandStrategy};
use spg_core::rational::{format_rational, parse_rational, Rational};
use spg_core::simulate::{simulate, SimConfig};
use spg_core::values::solve_values;
use spg_core::{Error, ExtValue};

#[derive(Parser)]
#[command(name = "spg", version, about = "Shortest-path game solver and strategy toolkit")]
struct Cli {
    /// Report style on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a game file and report its shape.
    Validate { game: PathBuf },
    /// Optimal values of every vertex.
    Values { game: PathBuf },
    /// Deterministic switching strategy guaranteeing max(-n, value).
    SynthesizeDet {
        game: PathBuf,
        /// Guarantee level: the result secures max(-n, value) everywhere.
        #[arg(long)]
        n: u64,
    },
    /// Randomized memoryless strategy within epsilon of the value at v0.
    SynthesizeRand {
        game: PathBuf,
        #[arg(long)]
        v0: String,
        /// Tolerance, e.g. 1/10.
        #[arg(long)]
        epsilon: String,
        /// Guarantee level of the underlying switching strategy; defaults
        /// to one more than the largest possible finite value magnitude.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Worst-case value of a pure or switching strategy.
    EvaluateDet {
        game: PathBuf,
        /// Strategy JSON: {"sigma": {...}} or {"sigma1", "sigma2", "alpha"}.
        #[arg(long)]
        strategy: PathBuf,
        /// Start vertex (required for switching strategies).
        #[arg(long)]
        v0: Option<String>,
        #[arg(long, default_value_t = DEFAULT_ALPHA_CAP)]
        alpha_cap: u64,
    },
    /// Expected payoffs of a randomized strategy against best Max play.
    EvaluateRand {
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Turn a randomized strategy into a switching strategy at least as
    /// good from v0.
    Convert {
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        v0: String,
    },
    /// Decide whether an optimal memoryless Min strategy exists.
    CheckOptimal { game: PathBuf },
    /// Monte-Carlo estimate of a randomized strategy's expected payoff
    /// against best Max play.
    Simulate {
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        v0: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        episodes: u64,
        #[arg(long, default_value_t = 10_000)]
        step_cap: u64,
    },
    /// Generate a seeded corpus and run the full cross-validation suite.
    CorpusCheck {
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        max_vertices: usize,
        #[arg(long, default_value_t = 3)]
        max_weight: i64,
        /// Also write each generated game into this directory.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            println!("{}", render(&report, cli.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::InvalidGame(_)
        | Error::InvalidStrategy(_)
        | Error::InvalidChain(_) => 2,
        Error::Domain(_) | Error::CapExceeded(_) => 1,
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => v.to_string(),
        Format::Text => {
            let mut out = String::new();
            render_text(v, "", &mut out);
            out.trim_end().to_string()
        }
    }
}

fn render_text(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(val, &key, out);
            }
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                render_text(val, &format!("{prefix}[{i}]"), out);
            }
        }
        leaf => {
            let shown = match leaf {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "{prefix} = {shown}");
        }
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse { line: 0, col: 0, msg: format!("{}: {e}", path.display()) })
}

fn load_game(path: &Path) -> Result<GameGraph, Error> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('{') {
        parse_game_json(&text)
    } else {
        parse_game(&text)
    }
}

fn load_json(path: &Path) -> Result<Value, Error> {
    serde_json::from_str(&read_file(path)?).map_err(|e| Error::Parse {
        line: e.line(),
        col: e.column(),
        msg: format!("{}: {e}", path.display()),
    })
}

fn find_vertex(g: &GameGraph, name: &str) -> Result<VertexId, Error> {
    g.find(name)
        .ok_or_else(|| Error::InvalidStrategy(format!("no vertex named {name:?} in the game")))
}

/// Exact-cycle graph parameters when SPG_EXACT_PARAMS=1, safe bounds
/// otherwise.
fn params_for(g: &GameGraph) -> Result<spg_core::analysis::GraphParams, Error> {
    let exact = std::env::var("SPG_EXACT_PARAMS").map(|v| v == "1").unwrap_or(false);
    graph_params(g, exact)
}

fn value_to_json(x: ExtValue) -> Value {
    serde_json::to_value(x).expect("values serialize")
}

fn name_map_json(map: &BTreeMap<String, String>) -> Value {
    Value::Object(map.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect())
}

fn rho_to_json(g: &GameGraph, rho: &RandStrategy) -> Value {
    let mut obj = Map::new();
    for (name, row) in rho.to_name_map(g) {
        let entries: Vec<Value> = row
            .into_iter()
            .map(|(succ, p)| json!([succ, format_rational(&p)]))
            .collect();
        obj.insert(name, Value::Array(entries));
    }
    Value::Object(obj)
}

fn rho_from_json(g: &GameGraph, v: &Value) -> Result<RandStrategy, Error> {
    // Accept both a bare {"rho": {...}} document and the full output of
    // synthesize-rand.
    let rho = v.get("rho").unwrap_or(v);
    let obj = rho
        .as_object()
        .ok_or_else(|| Error::InvalidStrategy("randomized strategy must be an object".into()))?;
    let mut map: BTreeMap<String, Vec<(String, Rational)>> = BTreeMap::new();
    for (name, row) in obj {
        let items = row
            .as_array()
            .ok_or_else(|| Error::InvalidStrategy(format!("row of {name:?} must be an array")))?;
        let mut parsed = Vec::new();
        for item in items {
            let pair = item.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                Error::InvalidStrategy(format!("row entry of {name:?} must be [successor, prob]"))
            })?;
            let succ = pair[0]
                .as_str()
                .ok_or_else(|| Error::InvalidStrategy("successor must be a name".into()))?;
            let prob = pair[1]
                .as_str()
                .ok_or_else(|| Error::InvalidStrategy("probability must be a string".into()))?;
            parsed.push((succ.to_string(), parse_rational(prob)?));
        }
        map.insert(name.clone(), parsed);
    }
    RandStrategy::from_name_map(g, &map)
}

fn switching_to_json(g: &GameGraph, s: &SwitchingStrategy) -> Value {
    json!({
        "sigma1": name_map_json(&s.sigma1.to_name_map(g)),
        "sigma2": name_map_json(&s.sigma2.to_name_map(g)),
        "alpha": s.alpha.to_string(),
    })
}

fn name_map_from_json(v: &Value, key: &str) -> Result<BTreeMap<String, String>, Error> {
    let obj = v
        .get(key)
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidStrategy(format!("missing strategy field {key:?}")))?;
    obj.iter()
        .map(|(k, val)| {
            val.as_str()
                .map(|s| (k.clone(), s.to_string()))
                .ok_or_else(|| Error::InvalidStrategy(format!("{key}[{k:?}] must be a name")))
        })
        .collect()
}

fn switching_from_json(g: &GameGraph, v: &Value) -> Result<SwitchingStrategy, Error> {
    let sigma1 = PureStrategy::from_name_map(g, &name_map_from_json(v, "sigma1")?)?;
    let sigma2 = PureStrategy::from_name_map(g, &name_map_from_json(v, "sigma2")?)?;
    let alpha_text = v
        .get("alpha")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidStrategy("missing decimal string field \"alpha\"".into()))?;
    let alpha = alpha_text
        .parse::<num_bigint::BigUint>()
        .map_err(|_| Error::InvalidStrategy(format!("alpha {alpha_text:?} is not a natural")))?;
    SwitchingStrategy::new(g, sigma1, sigma2, alpha)
}

fn run(cli: &Cli) -> Result<Value, Error> {
    match &cli.cmd {
        Cmd::Validate { game } => {
            let g = load_game(game)?;
            Ok(json!({
                "vertices": g.n_vertices(),
                "edges": g.edges().len(),
                "targets": g.targets().count(),
                "max_abs_weight": g.max_abs_weight(),
            }))
        }
        Cmd::Values { game } => {
            let g = load_game(game)?;
            let sol = solve_values(&g)?;
            eprintln!("converged after {} applications of the one-step operator", sol.iterations);
            let mut obj = Map::new();
            for v in g.vertices() {
                obj.insert(g.name(v).to_string(), value_to_json(sol.get(v)));
            }
            Ok(Value::Object(obj))
        }
        Cmd::SynthesizeDet { game, n } => {
            let g = load_game(game)?;
            let sol = solve_values(&g)?;
            let s = switching_strategy(&g, &sol, *n)?;
            Ok(switching_to_json(&g, &s))
        }
        Cmd::SynthesizeRand { game, v0, epsilon, n } => {
            let g = load_game(game)?;
            let sol = solve_values(&g)?;
            let v0 = find_vertex(&g, v0)?;
            let eps = parse_rational(epsilon)?;
            let n = n.unwrap_or_else(|| g.finite_value_bound().unsigned_abs() + 1);
            let params = params_for(&g)?;
            let synth = synthesize_epsilon_optimal(&g, &sol, v0, n, &eps, &params)?;
            Ok(json!({
                "rho": rho_to_json(&g, &synth.strategy),
                "bound": {
                    "a": synth.bound.a,
                    "b": format_rational(&synth.bound.b),
                    "p_min": format_rational(&synth.bound.p_min),
                    "epsilon": format_rational(&synth.bound.epsilon),
                    "dval_sigma_v0": synth.bound.dval_sigma_v0,
                },
                "switching": switching_to_json(&g, &synth.switching),
            }))
        }
        Cmd::EvaluateDet { game, strategy, v0, alpha_cap } => {
            let g = load_game(game)?;
            let doc = load_json(strategy)?;
            let doc = doc.get("switching").unwrap_or(&doc);
            if doc.get("alpha").is_some() {
                let s = switching_from_json(&g, doc)?;
                let v0 = v0.as_deref().ok_or_else(|| {
                    Error::InvalidStrategy("switching strategies need --v0".into())
                })?;
                let v0 = find_vertex(&g, v0)?;
                let value = eval_switching_strategy(&g, &s, v0, *alpha_cap)?;
                Ok(json!({ "v0": g.name(v0), "value": value }))
            } else {
                let sigma = PureStrategy::from_name_map(&g, &name_map_from_json(doc, "sigma")?)?;
                let eval = eval_pure_strategy(&g, &sigma)?;
                let mut obj = Map::new();
                for v in g.vertices() {
                    obj.insert(g.name(v).to_string(), value_to_json(eval[v.0]));
                }
                Ok(Value::Object(obj))
            }
        }
        Cmd::EvaluateRand { game, strategy } => {
            let g = load_game(game)?;
            let rho = rho_from_json(&g, &load_json(strategy)?)?;
            let (tau, mvals) = max_best_response(&g, &rho)?;
            let mut obj = Map::new();
            for v in g.vertices() {
                let val = match mvals.get(v) {
                    Some(x) => Value::String(format_rational(x)),
                    None => Value::String("+inf".into()),
                };
                obj.insert(g.name(v).to_string(), val);
            }
            Ok(json!({
                "values": Value::Object(obj),
                "tau": name_map_json(&tau.to_name_map(&g)),
            }))
        }
        Cmd::Convert { game, strategy, v0 } => {
            let g = load_game(game)?;
            let rho = rho_from_json(&g, &load_json(strategy)?)?;
            let v0 = find_vertex(&g, v0)?;
            let out = convert_detailed(&g, &rho, v0)?;
            let mut doc = switching_to_json(&g, &out.switching);
            let obj = doc.as_object_mut().unwrap();
            obj.insert(
                "mval_v0".into(),
                Value::String(format_rational(out.mvals.get(v0).unwrap())),
            );
            obj.insert("tau".into(), name_map_json(&out.tau.to_name_map(&g)));
            Ok(doc)
        }
        Cmd::CheckOptimal { game } => {
            let g = load_game(game)?;
            let report = check_optimal_memoryless(&g)?;
            Ok(json!({
                "exists": report.exists,
                "reason": serde_json::to_value(report.reason).unwrap(),
                "strategy": report
                    .optimal_strategy
                    .map(|s| name_map_json(&s.to_name_map(&g)))
                    .unwrap_or(Value::Null),
                "bellman_applications": report.bellman_applications,
            }))
        }
        Cmd::Simulate { game, strategy, v0, seed, episodes, step_cap } => {
            let g = load_game(game)?;
            let rho = rho_from_json(&g, &load_json(strategy)?)?;
            let v0 = find_vertex(&g, v0)?;
            let (tau, mvals) = max_best_response(&g, &rho)?;
            let mc = build_mc(&g, &rho, &tau)?;
            let cfg = SimConfig { seed: *seed, episodes: *episodes, step_cap: *step_cap };
            let report = simulate(&mc, v0, &cfg);
            Ok(json!({
                "report": serde_json::to_value(report).unwrap(),
                "exact": Value::String(format_rational(mvals.get(v0).unwrap())),
            }))
        }
        Cmd::CorpusCheck { seed, count, max_vertices, max_weight, dump_dir } => {
            let cfg = CorpusConfig {
                seed: *seed,
                count: *count,
                max_vertices: *max_vertices,
                max_weight: *max_weight,
            };
            if let Some(dir) = dump_dir {
                dump_corpus(&cfg, dir)?;
            }
            let report = run_suite(&cfg);
            let ok = report.all_pass();
            let doc = serde_json::to_value(&report).expect("suite reports serialize");
            if ok {
                Ok(doc)
            } else {
                // Still print the full report, then fail.
                println!("{}", render(&doc, Format::Json));
                Err(Error::Domain("corpus suite found violations".into()))
            }
        }
    }
}

fn dump_corpus(cfg: &CorpusConfig, dir: &Path) -> Result<(), Error> {
    use rand::SeedableRng;
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Domain(format!("cannot create {}: {e}", dir.display())))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.count {
        let g = spg_core::corpus::generate_game(&mut rng, cfg.max_vertices, cfg.max_weight);
        let path = dir.join(format!("game{i:04}.spg"));
        std::fs::write(&path, spg_core::parse::serialize_game(&g))
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
