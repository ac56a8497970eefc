//! Operation-count benchmarks comparing the multi-level cascade against
//! single-level SAX, with CSV output.

use std::fs::{self, File};
use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{build_index, LevelConfig};
use crate::ops::OpCounts;
use crate::query::{range_query_ordered, sax_only_query, CascadeOrder, RangeQuery};
use crate::sax::{breakpoints, mindist, sax_word};
use crate::series::{euclidean, znormalize_values, Dataset};

pub const CSV_COLUMNS: [&str; 20] = [
    "method",
    "dataset",
    "seed",
    "n",
    "a",
    "levels",
    "epsilon",
    "adds",
    "mults",
    "compares",
    "sqrts",
    "abss",
    "lookups",
    "weighted_total",
    "excluded_eq9",
    "excluded_eq10",
    "candidates",
    "answers",
    "wall_seconds",
    "mean_tightness",
];

/// Weight per operation class. Defaults to all ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostModel {
    pub add: f64,
    pub mult: f64,
    pub compare: f64,
    pub sqrt: f64,
    pub abs: f64,
    pub lookup: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl CostModel {
    pub fn uniform(w: f64) -> Self {
        Self {
            add: w,
            mult: w,
            compare: w,
            sqrt: w,
            abs: w,
            lookup: w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("add", self.add),
            ("mult", self.mult),
            ("compare", self.compare),
            ("sqrt", self.sqrt),
            ("abs", self.abs),
            ("lookup", self.lookup),
        ];
        for (name, w) in all {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::CostModel(format!("weight {name} = {w}")));
            }
        }
        Ok(())
    }

    /// Reads a JSON object with any of the keys `add`, `mult`, `compare`,
    /// `sqrt`, `abs`, `lookup`; missing keys default to 1.
    pub fn from_json(text: &str) -> Result<Self> {
        let m: CostModel = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn weigh(&self, c: &OpCounts) -> f64 {
        c.adds as f64 * self.add
            + c.mults as f64 * self.mult
            + c.compares as f64 * self.compare
            + c.sqrts as f64 * self.sqrt
            + c.abss as f64 * self.abs
            + c.lookups as f64 * self.lookup
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    FastSax,
    Sax,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FastSax => "FAST_SAX",
            Method::Sax => "SAX",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "FAST_SAX" => Some(Method::FastSax),
            "SAX" => Some(Method::Sax),
            _ => None,
        }
    }
}

/// Totals for one method on one sweep cell, summed over all queries.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub method: Method,
    pub dataset: String,
    pub seed: u64,
    pub n: usize,
    pub alphabet: usize,
    pub levels: Vec<usize>,
    pub epsilon: f64,
    pub ops: OpCounts,
    pub weighted_total: f64,
    pub excluded_eq9: u64,
    pub excluded_eq10: u64,
    pub candidates: u64,
    pub answers: u64,
    /// Only recorded when timing is requested, so untimed output is
    /// reproducible byte for byte.
    pub wall_seconds: Option<f64>,
    pub mean_tightness: f64,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dataset_name: String,
    pub seed: u64,
    pub levels: Vec<usize>,
    pub alphabets: Vec<usize>,
    pub epsilons: Vec<f64>,
    /// Level (0 = most frames) used by the single-level SAX baseline.
    pub baseline_level: usize,
    pub order: CascadeOrder,
    pub cost_model: CostModel,
    pub timed: bool,
    pub tightness_pairs: usize,
}

impl SweepConfig {
    pub fn new(dataset_name: impl Into<String>, seed: u64, levels: Vec<usize>) -> Self {
        Self {
            dataset_name: dataset_name.into(),
            seed,
            levels,
            alphabets: vec![3, 10, 20],
            epsilons: vec![1.0, 2.0, 3.0, 4.0],
            baseline_level: 0,
            order: CascadeOrder::FinestFirst,
            cost_model: CostModel::default(),
            timed: false,
            tightness_pairs: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightnessSummary {
    pub pairs: usize,
    pub skipped: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

/// Seeded random walks with standard normal steps, each z-normalized.
pub fn random_walks(seed: u64, stream: u64, count: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..count)
        .map(|_| {
            let mut x = 0.0;
            let walk: Vec<f64> = (0..n)
                .map(|_| {
                    x += rng.sample::<f64, _>(StandardNormal);
                    x
                })
                .collect();
            znormalize_values(&walk)
        })
        .collect()
}

/// The default synthetic dataset: `count` normalized random walks.
pub fn random_walk_dataset(seed: u64, count: usize, n: usize) -> Result<Dataset> {
    Dataset::from_rows(random_walks(seed, 0, count, n)?)?.normalize()
}

/// Held-out random-walk queries drawn from a separate stream of the same seed.
pub fn random_walk_queries(seed: u64, count: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    random_walks(seed, 1, count, n)
}

/// Distinct dataset rows chosen by the seed, used as queries for datasets
/// loaded from files.
pub fn sample_queries(d: &Dataset, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = count.min(d.len());
    let mut rows = sample(&mut rng, d.len(), count).into_vec();
    rows.sort_unstable();
    rows.into_iter()
        .map(|i| d.series()[i].values.clone())
        .collect()
}

/// MINDIST / Euclidean ratios over seeded random pairs of distinct series.
/// Pairs at zero Euclidean distance are skipped.
pub fn tightness_report(
    d: &Dataset,
    frames: usize,
    alphabet: usize,
    sample_size: usize,
    seed: u64,
) -> Result<TightnessSummary> {
    if d.len() < 2 {
        return Err(Error::Shape("tightness needs at least two series".into()));
    }
    let t = breakpoints(alphabet)?;
    let words = d
        .series()
        .iter()
        .map(|s| sax_word(&s.values, frames, t))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut min, mut max) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    let (mut pairs, mut skipped) = (0, 0);
    for _ in 0..sample_size {
        let pick = sample(&mut rng, d.len(), 2);
        let (i, j) = (pick.index(0), pick.index(1));
        let e = euclidean(&d.series()[i].values, &d.series()[j].values)?;
        if e == 0.0 {
            skipped += 1;
            continue;
        }
        let r = mindist(&words[i], &words[j], t)? / e;
        sum += r;
        min = min.min(r);
        max = max.max(r);
        pairs += 1;
    }
    if pairs == 0 {
        return Err(Error::Shape("no pair with nonzero distance".into()));
    }
    Ok(TightnessSummary {
        pairs,
        skipped,
        min,
        mean: sum / pairs as f64,
        max,
    })
}

#[derive(Default)]
struct Tally {
    ops: OpCounts,
    eq9: u64,
    eq10: u64,
    candidates: u64,
    answers: u64,
}

/// Runs both methods on every (alphabet, epsilon) cell. The index is rebuilt
/// for each alphabet size. Both methods must return identical answer sets
/// for every query or the sweep aborts.
pub fn run_sweep(d: &Dataset, queries: &[Vec<f64>], cfg: &SweepConfig) -> Result<Vec<BenchResult>> {
    cfg.cost_model.validate()?;
    let d_norm;
    let d = if d.is_normalized() {
        d
    } else {
        d_norm = d.clone().normalize()?;
        &d_norm
    };
    let mut out = Vec::new();
    for &a in &cfg.alphabets {
        let level_cfg = LevelConfig::new(cfg.levels.clone(), a)?;
        let idx = build_index(d, &level_cfg)?;
        let baseline_frames = *level_cfg.levels().get(cfg.baseline_level).ok_or_else(|| {
            Error::Levels(format!(
                "baseline level {} out of range",
                cfg.baseline_level
            ))
        })?;
        let tightness =
            tightness_report(d, baseline_frames, a, cfg.tightness_pairs, cfg.seed)?.mean;

        for &eps in &cfg.epsilons {
            let rqs = queries
                .iter()
                .map(|q| RangeQuery::new(q.clone(), eps))
                .collect::<Result<Vec<_>>>()?;

            let mut fast = Tally::default();
            let mut fast_answers = Vec::with_capacity(rqs.len());
            let start = Instant::now();
            for rq in &rqs {
                let r = range_query_ordered(&idx, d, rq, cfg.order)?;
                fast.ops += r.ops;
                fast.eq9 += r.excluded_eq9() as u64;
                fast.eq10 += r.excluded_eq10() as u64;
                fast.candidates += r.candidates_after_cascade() as u64;
                fast.answers += r.answers.len() as u64;
                fast_answers.push(r.answers);
            }
            let fast_secs = start.elapsed().as_secs_f64();

            let mut base = Tally::default();
            let start = Instant::now();
            for (qi, rq) in rqs.iter().enumerate() {
                let r = sax_only_query(&idx, d, rq, cfg.baseline_level)?;
                if r.answers != fast_answers[qi] {
                    return Err(Error::AnswerMismatch {
                        alphabet: a,
                        epsilon: eps,
                        query: qi,
                    });
                }
                base.ops += r.ops;
                base.eq10 += r.excluded_eq10() as u64;
                base.candidates += r.candidates_after_cascade() as u64;
                base.answers += r.answers.len() as u64;
            }
            let base_secs = start.elapsed().as_secs_f64();

            for (method, tally, secs) in [
                (Method::FastSax, fast, fast_secs),
                (Method::Sax, base, base_secs),
            ] {
                out.push(BenchResult {
                    method,
                    dataset: cfg.dataset_name.clone(),
                    seed: cfg.seed,
                    n: d.n(),
                    alphabet: a,
                    levels: level_cfg.levels().to_vec(),
                    epsilon: eps,
                    ops: tally.ops,
                    weighted_total: cfg.cost_model.weigh(&tally.ops),
                    excluded_eq9: tally.eq9,
                    excluded_eq10: tally.eq10,
                    candidates: tally.candidates,
                    answers: tally.answers,
                    wall_seconds: cfg.timed.then_some(secs),
                    mean_tightness: tightness,
                });
            }
        }
    }
    Ok(out)
}

/// Weighted-total ratio FAST_SAX / SAX for each (alphabet, epsilon) cell,
/// in sweep order.
pub fn cell_ratios(results: &[BenchResult]) -> Vec<(usize, f64, f64)> {
    results
        .iter()
        .filter(|r| r.method == Method::FastSax)
        .filter_map(|f| {
            results
                .iter()
                .find(|s| {
                    s.method == Method::Sax && s.alphabet == f.alphabet && s.epsilon == f.epsilon
                })
                .map(|s| (f.alphabet, f.epsilon, f.weighted_total / s.weighted_total))
        })
        .collect()
}

fn levels_field(levels: &[usize]) -> String {
    levels
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

pub fn write_csv<W: Write>(results: &[BenchResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in results {
        w.write_record([
            r.method.name().to_string(),
            r.dataset.clone(),
            r.seed.to_string(),
            r.n.to_string(),
            r.alphabet.to_string(),
            levels_field(&r.levels),
            r.epsilon.to_string(),
            r.ops.adds.to_string(),
            r.ops.mults.to_string(),
            r.ops.compares.to_string(),
            r.ops.sqrts.to_string(),
            r.ops.abss.to_string(),
            r.ops.lookups.to_string(),
            r.weighted_total.to_string(),
            r.excluded_eq9.to_string(),
            r.excluded_eq10.to_string(),
            r.candidates.to_string(),
            r.answers.to_string(),
            r.wall_seconds.map(|s| s.to_string()).unwrap_or_default(),
            r.mean_tightness.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(results: &[BenchResult], path: impl AsRef<Path>) -> Result<()> {
    if results.is_empty() {
        return Err(Error::Shape("no benchmark results to write".into()));
    }
    let mut buf = Vec::new();
    write_csv(results, &mut buf)?;
    File::create(path)?.write_all(&buf)?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchResult>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Format(format!("unexpected CSV header {header:?}")));
    }
    let bad = |col: &str, v: &str| Error::Format(format!("bad {col} value {v:?}"));
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).unwrap_or("");
        macro_rules! num {
            ($i:expr) => {
                get($i).parse().map_err(|_| bad(CSV_COLUMNS[$i], get($i)))?
            };
        }
        let levels = get(5)
            .split(';')
            .map(|s| s.parse().map_err(|_| bad("levels", s)))
            .collect::<Result<Vec<usize>>>()?;
        out.push(BenchResult {
            method: Method::parse(get(0)).ok_or_else(|| bad("method", get(0)))?,
            dataset: get(1).to_string(),
            seed: num!(2),
            n: num!(3),
            alphabet: num!(4),
            levels,
            epsilon: num!(6),
            ops: OpCounts {
                adds: num!(7),
                mults: num!(8),
                compares: num!(9),
                sqrts: num!(10),
                abss: num!(11),
                lookups: num!(12),
            },
            weighted_total: num!(13),
            excluded_eq9: num!(14),
            excluded_eq10: num!(15),
            candidates: num!(16),
            answers: num!(17),
            wall_seconds: if get(18).is_empty() {
                None
            } else {
                Some(num!(18))
            },
            mean_tightness: num!(19),
        });
    }
    Ok(out)
}
