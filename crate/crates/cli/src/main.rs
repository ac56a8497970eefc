use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use fastsax::bench::{self, CostModel, SweepConfig};
use fastsax::index::{build_index, default_levels, LevelConfig, MultiLevelIndex};
use fastsax::pla::{evaluate, fit_pla};
use fastsax::sax::{breakpoints, mindist, paa, paa_dist, symbolize};
use fastsax::series::{euclidean, load_ucr, Dataset};
use fastsax::{linear_scan, range_query_ordered, CascadeOrder, Error, RangeQuery};

#[derive(Parser)]
#[command(
    name = "fastsax",
    version,
    about = "Exact multi-level SAX range queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a UCR dataset and write its multi-level index.
    Build(BuildArgs),
    /// Run a range query against an index.
    Query(QueryArgs),
    /// Compare operation counts of the cascade and single-level SAX.
    Bench(BenchArgs),
    /// Check an index against its dataset and spot-check the search.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    index: PathBuf,
    #[arg(long, default_value_t = 10)]
    alphabet: usize,
    /// Comma-separated frame counts; defaults to divisors of n near n/4, n/8, n/16.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// One-line UCR file, or `row:k` for row k of the dataset. Either way the
    /// raw values are normalized exactly like the dataset rows.
    #[arg(long)]
    query: String,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value = "finest-first")]
    order: CascadeOrder,
}

#[derive(Args)]
struct BenchArgs {
    /// UCR dataset; a seeded random-walk dataset is generated when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "3,10,20")]
    alphabet_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    epsilon_list: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// JSON object of per-class weights (add, mult, compare, sqrt, abs, lookup).
    #[arg(long)]
    cost_model: Option<PathBuf>,
    /// Level used by the SAX baseline, 0 being the one with the most frames.
    #[arg(long, default_value_t = 0)]
    baseline_level: usize,
    #[arg(long, default_value = "finest-first")]
    order: CascadeOrder,
    #[arg(long, default_value_t = 20)]
    queries: usize,
    /// Size of the generated dataset.
    #[arg(long, default_value_t = 1000)]
    series: usize,
    /// Length of the generated series.
    #[arg(long, default_value_t = 128)]
    length: usize,
    /// Record wall-clock seconds (makes the CSV non-reproducible).
    #[arg(long)]
    timed: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn load_raw(path: &Path) -> Result<Dataset> {
    load_ucr(path).with_context(|| format!("loading {}", path.display()))
}

fn load_normalized(path: &Path) -> Result<Dataset> {
    Ok(load_raw(path)?.normalize()?)
}

fn level_config(levels: Option<Vec<usize>>, n: usize, alphabet: usize) -> Result<LevelConfig> {
    let cfg = LevelConfig::new(levels.unwrap_or_else(|| default_levels(n)), alphabet)?;
    for &frames in cfg.levels() {
        if !n.is_multiple_of(frames) {
            bail!("level {frames} does not divide series length n={n}");
        }
    }
    Ok(cfg)
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    let d = load_normalized(&args.data)?;
    let cfg = level_config(args.levels, d.n(), args.alphabet)?;
    let idx = build_index(&d, &cfg)?;
    idx.save(&args.index)
        .with_context(|| format!("writing {}", args.index.display()))?;
    println!(
        "indexed {} series of length {} (a={}) into {}",
        idx.len(),
        idx.n,
        cfg.alphabet(),
        args.index.display()
    );
    for (level, &frames) in cfg.levels().iter().enumerate() {
        let mean = idx
            .entries
            .iter()
            .map(|e| e.levels[level].residual)
            .sum::<f64>()
            / idx.len() as f64;
        println!("level {level}: frames={frames} mean_residual={mean:.6}");
    }
    Ok(())
}

fn query_values(spec: &str, d: &Dataset) -> Result<Vec<f64>> {
    if let Some(row) = spec.strip_prefix("row:") {
        let k: usize = row
            .parse()
            .with_context(|| format!("bad row index {row:?}"))?;
        let s = d
            .series()
            .get(k)
            .ok_or_else(|| anyhow!("row {k} out of range ({} rows)", d.len()))?;
        return Ok(s.values.clone());
    }
    let q = load_ucr(spec).with_context(|| format!("loading query {spec}"))?;
    if q.len() != 1 {
        bail!("query file {spec} holds {} series, expected 1", q.len());
    }
    Ok(q.series()[0].values.clone())
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let raw = load_raw(&args.data)?;
    let q = query_values(&args.query, &raw)?;
    let d = raw.normalize()?;
    let idx = MultiLevelIndex::load(&args.index)
        .with_context(|| format!("loading {}", args.index.display()))?;
    let rq = RangeQuery::normalized(&q, args.epsilon)?;
    let r = range_query_ordered(&idx, &d, &rq, args.order)?;
    let answers: Vec<u64> = r.answers.iter().map(|id| id.0).collect();
    if args.json {
        let levels: Vec<_> = r
            .levels
            .iter()
            .map(|l| {
                json!({
                    "frames": l.frames,
                    "tested": l.tested,
                    "excluded_eq9": l.excluded_eq9,
                    "excluded_eq10": l.excluded_eq10,
                })
            })
            .collect();
        let out = json!({
            "epsilon": args.epsilon,
            "answers": answers,
            "levels": levels,
            "candidates_after_cascade": r.candidates_after_cascade(),
            "op_counts": r.ops,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        let ids: Vec<String> = answers.iter().map(u64::to_string).collect();
        println!("answers ({}): {}", ids.len(), ids.join(" "));
        for l in &r.levels {
            println!(
                "level frames={}: tested={} excluded_eq9={} excluded_eq10={}",
                l.frames, l.tested, l.excluded_eq9, l.excluded_eq10
            );
        }
        println!("candidates_after_cascade: {}", r.candidates_after_cascade());
        let o = r.ops;
        println!(
            "ops: adds={} mults={} compares={} sqrts={} abss={} lookups={}",
            o.adds, o.mults, o.compares, o.sqrts, o.abss, o.lookups
        );
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    if args.epsilon_list.is_empty() || args.alphabet_list.is_empty() {
        bail!("epsilon and alphabet lists must be nonempty");
    }
    let (d, queries, name) = match &args.data {
        Some(path) => {
            let d = load_normalized(path)?;
            let q = bench::sample_queries(&d, args.queries, args.seed);
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "data".into());
            (d, q, name)
        }
        None => {
            let d = bench::random_walk_dataset(args.seed, args.series, args.length)?;
            let q = bench::random_walk_queries(args.seed, args.queries, args.length)?;
            (d, q, "random-walk".to_string())
        }
    };
    let cfg = level_config(args.levels, d.n(), args.alphabet_list[0])?;
    let mut sweep = SweepConfig::new(name, args.seed, cfg.levels().to_vec());
    sweep.alphabets = args.alphabet_list;
    sweep.epsilons = args.epsilon_list;
    sweep.baseline_level = args.baseline_level;
    sweep.order = args.order;
    sweep.timed = args.timed;
    if let Some(path) = &args.cost_model {
        sweep.cost_model =
            CostModel::load(path).with_context(|| format!("loading {}", path.display()))?;
    }
    let results = bench::run_sweep(&d, &queries, &sweep)?;
    bench::emit_csv(&results, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    for (a, eps, ratio) in bench::cell_ratios(&results) {
        println!("a={a} epsilon={eps} fast_sax/sax={ratio:.4}");
    }
    Ok(())
}

struct Checks {
    failed: Vec<String>,
}

impl Checks {
    fn record(&mut self, name: &str, failures: Vec<String>, detail: String) {
        if failures.is_empty() {
            println!("PASS {name} ({detail})");
        } else {
            println!("FAIL {name}: {} failure(s)", failures.len());
            for f in failures.iter().take(5) {
                println!("  {f}");
            }
            self.failed.push(name.to_string());
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    let d = load_normalized(&args.data)?;
    let mut checks = Checks { failed: Vec::new() };
    let idx = match MultiLevelIndex::load(&args.index) {
        Ok(idx) => {
            checks.record("index-integrity", vec![], "checksum ok".into());
            idx
        }
        Err(e) => {
            checks.record("index-integrity", vec![e.to_string()], String::new());
            return Ok(false);
        }
    };
    let fp_fail = match idx.check_dataset(&d) {
        Ok(()) => vec![],
        Err(e) => vec![e.to_string()],
    };
    let fp_ok = fp_fail.is_empty();
    checks.record("fingerprint", fp_fail, "index matches dataset".into());
    if !fp_ok {
        return Ok(false);
    }

    let mismatches = idx.recompute_mismatches(&d)?;
    checks.record(
        "recomputation",
        mismatches,
        format!("{} series x {} levels", idx.len(), idx.config.len()),
    );

    if idx.config.is_nested() {
        let mut bad = Vec::new();
        for e in &idx.entries {
            for w in e.levels.windows(2) {
                if w[0].residual > w[1].residual + 1e-9 {
                    bad.push(format!("series {}: residual grows at a finer level", e.id));
                }
            }
        }
        checks.record("residual-monotonicity", bad, "nested levels".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let t = breakpoints(idx.config.alphabet())?;
    let rows = d.series();
    let pick = |rng: &mut ChaCha8Rng| &rows[rng.random_range(0..rows.len())].values;

    let mut bad = Vec::new();
    for _ in 0..args.trials {
        let (u, v) = (pick(&mut rng), pick(&mut rng));
        let e = euclidean(u, v)?;
        for &frames in idx.config.levels() {
            let (pu, pv) = (paa(u, frames)?, paa(v, frames)?);
            let pd = paa_dist(&pu, &pv)?;
            let md = mindist(&symbolize(&pu, t), &symbolize(&pv, t), t)?;
            if md > pd + 1e-9 || pd > e + 1e-9 {
                bad.push(format!(
                    "frames {frames}: mindist {md} paa {pd} euclidean {e}"
                ));
            }
        }
    }
    checks.record("lower-bounding", bad, format!("{} pairs", args.trials));

    let mut bad = Vec::new();
    for _ in 0..args.trials {
        let (u, q) = (pick(&mut rng), pick(&mut rng));
        for &frames in idx.config.levels() {
            let own = euclidean(u, &evaluate(&fit_pla(u, frames)?))?;
            let other = euclidean(u, &evaluate(&fit_pla(q, frames)?))?;
            if own > other + 1e-9 {
                bad.push(format!(
                    "frames {frames}: own fit {own} > other fit {other}"
                ));
            }
        }
    }
    checks.record(
        "projection-optimality",
        bad,
        format!("{} pairs", args.trials),
    );

    let mut bad = Vec::new();
    for trial in 0..args.trials {
        let base = pick(&mut rng).clone();
        let noisy: Vec<f64> = base
            .iter()
            .map(|x| x + 0.2 * (rng.random::<f64>() - 0.5))
            .collect();
        let eps = rng.random_range(0.0..6.0);
        let rq = RangeQuery::normalized(&noisy, eps)?;
        let r = range_query_ordered(&idx, &d, &rq, CascadeOrder::FinestFirst)?;
        let oracle = linear_scan(&d, &rq)?;
        if r.answers != oracle {
            bad.push(format!(
                "trial {trial} (epsilon {eps}): {} answers vs {} from linear scan",
                r.answers.len(),
                oracle.len()
            ));
        }
    }
    checks.record("exactness", bad, format!("{} queries", args.trials));

    if !checks.failed.is_empty() {
        eprintln!("verify failed: {}", checks.failed.join(", "));
    }
    Ok(checks.failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build(a) => cmd_build(a).map(|_| true),
        Command::Query(a) => cmd_query(a).map(|_| true),
        Command::Bench(a) => cmd_bench(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            if let Some(Error::AnswerMismatch { .. }) = e.downcast_ref::<Error>() {
                eprintln!("bug: {e:#}");
                return ExitCode::from(3);
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
