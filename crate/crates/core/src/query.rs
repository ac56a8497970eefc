//! Online phase: the multi-level exclusion cascade, the SAX-only baseline,
//! the linear-scan oracle and operation accounting.

use crate::error::{Error, Result};
use crate::index::{LevelEntry, MultiLevelIndex};
use crate::ops::OpCounts;
use crate::pla::{fit_residual, fit_residual_cost};
use crate::sax::{self, breakpoints, mindist_cost, paa_cost, BreakpointTable, SaxWord};
use crate::series::{euclidean, euclidean_cost, znormalize_values, Dataset, SeriesId};

/// A query series (normalized like the dataset) and an inclusive radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeQuery {
    pub values: Vec<f64>,
    pub epsilon: f64,
}

impl RangeQuery {
    /// Uses `values` as given; they must already be z-normalized.
    pub fn new(values: Vec<f64>, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::Epsilon(epsilon));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values, epsilon })
    }

    /// Z-normalizes raw values first.
    pub fn normalized(raw: &[f64], epsilon: f64) -> Result<Self> {
        Self::new(znormalize_values(raw)?, epsilon)
    }
}

/// Order in which the cascade visits the levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CascadeOrder {
    /// Most frames (shortest segments) first.
    #[default]
    FinestFirst,
    CoarsestFirst,
}

impl CascadeOrder {
    pub fn name(self) -> &'static str {
        match self {
            CascadeOrder::FinestFirst => "finest-first",
            CascadeOrder::CoarsestFirst => "coarsest-first",
        }
    }
}

impl std::str::FromStr for CascadeOrder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "finest-first" => Ok(CascadeOrder::FinestFirst),
            "coarsest-first" => Ok(CascadeOrder::CoarsestFirst),
            other => Err(format!(
                "unknown cascade order {other:?} (finest-first | coarsest-first)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LevelCounters {
    pub frames: usize,
    pub tested: usize,
    pub excluded_eq9: usize,
    pub excluded_eq10: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryReport {
    /// Series within `epsilon` of the query, sorted by id.
    pub answers: Vec<SeriesId>,
    /// Survivors of the filter stage, sorted by id.
    pub candidates: Vec<SeriesId>,
    /// One entry per visited level, in visiting order.
    pub levels: Vec<LevelCounters>,
    pub ops: OpCounts,
}

impl QueryReport {
    pub fn candidates_after_cascade(&self) -> usize {
        self.candidates.len()
    }

    pub fn excluded_eq9(&self) -> usize {
        self.levels.iter().map(|l| l.excluded_eq9).sum()
    }

    pub fn excluded_eq10(&self) -> usize {
        self.levels.iter().map(|l| l.excluded_eq10).sum()
    }
}

/// The query's residual and word at every configured level, in level
/// order. Identical to what the index stores for a database series.
pub fn query_residuals(values: &[f64], cfg: &crate::index::LevelConfig) -> Result<Vec<LevelEntry>> {
    cfg.validate(values.len())?;
    crate::index::represent(values, cfg)
}

/// True iff the residual gap alone proves the series lies outside the
/// query radius.
#[inline]
pub fn exclude_eq9(res_u: f64, res_q: f64, epsilon: f64) -> bool {
    (res_u - res_q).abs() > epsilon
}

const EQ9_COST: OpCounts = OpCounts {
    adds: 1,
    abss: 1,
    compares: 1,
    mults: 0,
    sqrts: 0,
    lookups: 0,
};

/// True iff MINDIST between the words exceeds the radius.
pub fn exclude_eq10(
    w_q: &SaxWord,
    w_u: &SaxWord,
    t: &BreakpointTable,
    epsilon: f64,
) -> Result<bool> {
    Ok(sax::mindist(w_q, w_u, t)? > epsilon)
}

fn compare() -> OpCounts {
    OpCounts {
        compares: 1,
        ..OpCounts::ZERO
    }
}

/// Word of the query at one level, tallying PAA and breakpoint search.
fn counted_word(
    values: &[f64],
    frames: usize,
    t: &BreakpointTable,
    ops: &mut OpCounts,
) -> Result<SaxWord> {
    let p = sax::paa(values, frames)?;
    *ops += paa_cost(values.len(), frames);
    let symbols = p
        .means
        .iter()
        .map(|&m| {
            let (s, probes) = t.locate(m);
            ops.compares += probes;
            s
        })
        .collect();
    Ok(SaxWord {
        symbols,
        alphabet: t.alphabet_size(),
        n: values.len(),
    })
}

fn check_inputs(idx: &MultiLevelIndex, d: &Dataset, rq: &RangeQuery) -> Result<()> {
    idx.check_dataset(d)?;
    if rq.values.len() != idx.n {
        return Err(Error::LengthMismatch {
            left: idx.n,
            right: rq.values.len(),
        });
    }
    if idx.len() != d.len() {
        return Err(Error::Shape(format!(
            "index holds {} series, dataset {}",
            idx.len(),
            d.len()
        )));
    }
    Ok(())
}

/// Final scan over the filter survivors.
fn verify(
    d: &Dataset,
    rq: &RangeQuery,
    alive: &[bool],
    ops: &mut OpCounts,
) -> Result<(Vec<SeriesId>, Vec<SeriesId>)> {
    let mut candidates = Vec::new();
    let mut answers = Vec::new();
    let per = euclidean_cost(rq.values.len()) + compare();
    for (s, _) in d.series().iter().zip(alive).filter(|(_, &a)| a) {
        candidates.push(s.id);
        *ops += per;
        if euclidean(&s.values, &rq.values)? <= rq.epsilon {
            answers.push(s.id);
        }
    }
    candidates.sort_unstable();
    answers.sort_unstable();
    Ok((answers, candidates))
}

/// Exact range query through the multi-level cascade, visiting the finest
/// level first.
pub fn range_query(idx: &MultiLevelIndex, d: &Dataset, rq: &RangeQuery) -> Result<QueryReport> {
    range_query_ordered(idx, d, rq, CascadeOrder::FinestFirst)
}

/// Exact range query. At each level every surviving series is tested
/// against the residual condition and then against MINDIST; excluded
/// series are never revisited. Survivors are checked against the true
/// distance.
pub fn range_query_ordered(
    idx: &MultiLevelIndex,
    d: &Dataset,
    rq: &RangeQuery,
    order: CascadeOrder,
) -> Result<QueryReport> {
    check_inputs(idx, d, rq)?;
    let cfg = &idx.config;
    let t = breakpoints(cfg.alphabet())?;
    let n = idx.n;
    let eps = rq.epsilon;
    let mut ops = OpCounts::ZERO;

    let mut visit: Vec<usize> = (0..cfg.len()).collect();
    if order == CascadeOrder::CoarsestFirst {
        visit.reverse();
    }

    let mut alive = vec![true; idx.len()];
    let mut remaining = idx.len();
    let mut levels = Vec::with_capacity(visit.len());
    for &level in &visit {
        let frames = cfg.levels()[level];
        let mut counters = LevelCounters {
            frames,
            ..Default::default()
        };
        if remaining == 0 {
            levels.push(counters);
            continue;
        }
        let res_q = fit_residual(&rq.values, frames)?;
        ops += fit_residual_cost(n, frames);
        let word_q = counted_word(&rq.values, frames, t, &mut ops)?;
        let eq10_cost = mindist_cost(frames) + compare();

        for (entry, live) in idx.entries.iter().zip(alive.iter_mut()) {
            if !*live {
                continue;
            }
            let le = &entry.levels[level];
            counters.tested += 1;
            ops += EQ9_COST;
            if exclude_eq9(le.residual, res_q, eps) {
                counters.excluded_eq9 += 1;
                *live = false;
                continue;
            }
            ops += eq10_cost;
            if sax::mindist_unchecked(&word_q, &le.word, t) > eps {
                counters.excluded_eq10 += 1;
                *live = false;
            }
        }
        remaining -= counters.excluded_eq9 + counters.excluded_eq10;
        levels.push(counters);
    }

    let (answers, candidates) = verify(d, rq, &alive, &mut ops)?;
    Ok(QueryReport {
        answers,
        candidates,
        levels,
        ops,
    })
}

/// Plain SAX: MINDIST filtering at one level followed by the verification
/// scan.
pub fn sax_only_query(
    idx: &MultiLevelIndex,
    d: &Dataset,
    rq: &RangeQuery,
    baseline_level: usize,
) -> Result<QueryReport> {
    check_inputs(idx, d, rq)?;
    let cfg = &idx.config;
    let frames = *cfg.levels().get(baseline_level).ok_or_else(|| {
        Error::Levels(format!(
            "baseline level {baseline_level} out of range for {} levels",
            cfg.len()
        ))
    })?;
    let t = breakpoints(cfg.alphabet())?;
    let mut ops = OpCounts::ZERO;
    let word_q = counted_word(&rq.values, frames, t, &mut ops)?;
    let eq10_cost = mindist_cost(frames) + compare();

    let mut counters = LevelCounters {
        frames,
        ..Default::default()
    };
    let alive: Vec<bool> = idx
        .entries
        .iter()
        .map(|entry| {
            counters.tested += 1;
            ops += eq10_cost;
            let out =
                sax::mindist_unchecked(&word_q, &entry.levels[baseline_level].word, t) > rq.epsilon;
            if out {
                counters.excluded_eq10 += 1;
            }
            !out
        })
        .collect();

    let (answers, candidates) = verify(d, rq, &alive, &mut ops)?;
    Ok(QueryReport {
        answers,
        candidates,
        levels: vec![counters],
        ops,
    })
}

/// Brute-force answer set, sorted by id.
pub fn linear_scan(d: &Dataset, rq: &RangeQuery) -> Result<Vec<SeriesId>> {
    let mut out = Vec::new();
    for s in d.series() {
        if euclidean(&s.values, &rq.values)? <= rq.epsilon {
            out.push(s.id);
        }
    }
    out.sort_unstable();
    Ok(out)
}
