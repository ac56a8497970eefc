//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{phi, random_series, rng, walk_dataset};
use fastsax::bench::{
    self, random_walk_dataset, random_walk_queries, run_sweep, write_csv, CostModel, Method,
    SweepConfig,
};
use fastsax::index::{build_index, LevelConfig, MultiLevelIndex};
use fastsax::pla::{evaluate, fit_pla, residual};
use fastsax::sax::{breakpoints, mindist, paa, paa_dist, symbolize};
use fastsax::series::euclidean;
use fastsax::{linear_scan, range_query, CascadeOrder, RangeQuery};
use rand::Rng;

const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c1_exactness() -> Outcome {
    let start = Instant::now();
    let d = walk_dataset(SEED, 1000, 128);
    let queries = random_walk_queries(SEED, 50, 128).unwrap();
    let mut cells = 0;
    let mut bad = Vec::new();
    for a in [3, 10, 20] {
        let idx = build_index(&d, &LevelConfig::new(vec![32, 16, 8], a).unwrap()).unwrap();
        for eps in [0.5, 1.0, 2.0, 4.0] {
            cells += 1;
            for (qi, q) in queries.iter().enumerate() {
                let rq = RangeQuery::new(q.clone(), eps).unwrap();
                if range_query(&idx, &d, &rq).unwrap().answers != linear_scan(&d, &rq).unwrap() {
                    bad.push(format!("a={a} eps={eps} q={qi}"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 120.0,
        format!(
            "{cells} cells x 50 queries, {} mismatches, {secs:.1}s (limit 120s)",
            bad.len()
        ),
    )
}

fn c2_lower_bounding() -> Outcome {
    let mut r = rng(SEED + 2);
    let mut violations = 0;
    let mut pairs = 0;
    for frames in [4, 8, 16] {
        for a in [3, 10, 20] {
            let t = breakpoints(a).unwrap();
            for _ in 0..10_000 {
                let u = random_series(&mut r, 128);
                let v = random_series(&mut r, 128);
                let (pu, pv) = (paa(&u, frames).unwrap(), paa(&v, frames).unwrap());
                let md = mindist(&symbolize(&pu, t), &symbolize(&pv, t), t).unwrap();
                let pd = paa_dist(&pu, &pv).unwrap();
                let e = euclidean(&u, &v).unwrap();
                if md > pd + 1e-9 || pd > e + 1e-9 {
                    violations += 1;
                }
                pairs += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{pairs} pairs over 9 (N, a) cells, {violations} violations"),
    )
}

fn c3_projection_optimality() -> Outcome {
    let mut r = rng(SEED + 3);
    let mut violations = 0;
    for _ in 0..10_000 {
        let u = random_series(&mut r, 128);
        let q = random_series(&mut r, 128);
        for frames in [4, 8, 16] {
            let own = euclidean(&u, &evaluate(&fit_pla(&u, frames).unwrap())).unwrap();
            let other = euclidean(&u, &evaluate(&fit_pla(&q, frames).unwrap())).unwrap();
            if own > other + 1e-9 {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("10000 pairs x N in {{4,8,16}}, {violations} violations"),
    )
}

fn c4_exclusion_soundness() -> Outcome {
    let mut r = rng(SEED + 4);
    let (mut checked, mut excluded, mut violations) = (0u64, 0u64, 0u64);
    for trial in 0..12 {
        let d = common::random_dataset(&mut r, 200, 128);
        let a = [3, 10, 20][trial % 3];
        let cfg = LevelConfig::new(vec![32, 16, 8], a).unwrap();
        let idx = build_index(&d, &cfg).unwrap();
        let t = breakpoints(a).unwrap();
        for _ in 0..5 {
            let q = random_series(&mut r, 128);
            let qe = fastsax::query_residuals(&q, &cfg).unwrap();
            let dists: Vec<f64> = d
                .series()
                .iter()
                .map(|s| euclidean(&q, &s.values).unwrap())
                .collect();
            for eps in [0.5, 1.0, 2.0, 4.0, 8.0, 12.0] {
                for (e, &dist) in idx.entries.iter().zip(&dists) {
                    for (le, qle) in e.levels.iter().zip(&qe) {
                        checked += 1;
                        let out = fastsax::exclude_eq9(le.residual, qle.residual, eps)
                            || fastsax::exclude_eq10(&qle.word, &le.word, t, eps).unwrap();
                        if out {
                            excluded += 1;
                            if dist <= eps {
                                violations += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    outcome(
        violations == 0,
        format!("{checked} (series, level, query, eps) tests, {excluded} exclusions, {violations} unsound"),
    )
}

fn c5_breakpoints() -> Outcome {
    let (mut worst_cdf, mut worst_sym) = (0.0f64, 0.0f64);
    for a in 3..=20 {
        let b = breakpoints(a).unwrap().betas();
        for (i, &beta) in b.iter().enumerate() {
            worst_cdf = worst_cdf.max((phi(beta) - (i + 1) as f64 / a as f64).abs());
            worst_sym = worst_sym.max((beta + b[a - 2 - i]).abs());
        }
    }
    let b3 = breakpoints(3).unwrap().betas();
    let b4 = breakpoints(4).unwrap().betas();
    let spots = (b3[0] + 0.4307).abs() <= 1e-4
        && (b3[1] - 0.4307).abs() <= 1e-4
        && (b4[0] + 0.6745).abs() <= 1e-4
        && b4[1].abs() <= 1e-4
        && (b4[2] - 0.6745).abs() <= 1e-4;
    outcome(
        worst_cdf <= 1e-6 && worst_sym <= 1e-9 && spots,
        format!("max |Phi(b)-i/a| = {worst_cdf:.2e}, max asymmetry = {worst_sym:.2e}, spot values ok = {spots}"),
    )
}

fn default_sweep(order: CascadeOrder) -> Vec<bench::BenchResult> {
    let d = random_walk_dataset(SEED, 1000, 128).unwrap();
    let queries = random_walk_queries(SEED, 20, 128).unwrap();
    let mut cfg = SweepConfig::new("random-walk", SEED, vec![32, 16, 8]);
    cfg.alphabets = vec![3, 10, 20];
    cfg.epsilons = vec![1.0, 2.0, 3.0, 4.0];
    cfg.cost_model = CostModel::default();
    cfg.order = order;
    run_sweep(&d, &queries, &cfg).unwrap()
}

fn c6_direction() -> (Outcome, Outcome) {
    let results = default_sweep(CascadeOrder::FinestFirst);
    let mut cost_cells = Vec::new();
    let mut cost_ok = true;
    let mut cand_ok = true;
    for f in results.iter().filter(|r| r.method == Method::FastSax) {
        let s = results
            .iter()
            .find(|s| s.method == Method::Sax && s.alphabet == f.alphabet && s.epsilon == f.epsilon)
            .unwrap();
        let ratio = f.weighted_total / s.weighted_total;
        let mark = if f.weighted_total < s.weighted_total {
            ""
        } else {
            "!"
        };
        cost_ok &= f.weighted_total < s.weighted_total;
        cand_ok &= f.candidates <= s.candidates;
        cost_cells.push(format!(
            "a={}/eps={}:{ratio:.3}{mark}",
            f.alphabet, f.epsilon
        ));
    }
    let reverse: Vec<String> = bench::cell_ratios(&default_sweep(CascadeOrder::CoarsestFirst))
        .iter()
        .map(|(a, e, r)| format!("a={a}/eps={e}:{r:.3}"))
        .collect();
    println!(
        "      (informational) coarsest-first ratios: {}",
        reverse.join(" ")
    );
    (
        outcome(
            cost_ok,
            format!(
                "FAST_SAX/SAX weighted ratio per cell ('!' = not below 1): {}",
                cost_cells.join(" ")
            ),
        ),
        outcome(
            cand_ok,
            "FAST_SAX candidates <= SAX candidates in every cell",
        ),
    )
}

fn c7_persistence() -> Outcome {
    let mut r = rng(SEED + 7);
    let dir = tempfile::tempdir().unwrap();
    let (mut round_trips, mut corruptions, mut missed) = (0, 0, 0);
    for i in 0..100 {
        let n = [16, 32, 64][i % 3];
        let count = r.random_range(1..25);
        let d = common::random_dataset(&mut r, count, n);
        let a = r.random_range(3..=20);
        let levels = match i % 4 {
            0 => vec![n / 4],
            1 => vec![n / 2, n / 4],
            2 => vec![n / 2, n / 8],
            _ => vec![n, n / 4, n / 16],
        };
        let idx = build_index(&d, &LevelConfig::new(levels, a).unwrap()).unwrap();
        let path = dir.path().join(format!("idx{i}.txt"));
        idx.save(&path).unwrap();
        if MultiLevelIndex::load(&path).unwrap() == idx {
            round_trips += 1;
        }
        let bytes = std::fs::read(&path).unwrap();
        // exhaustive single-byte flips on the first few, sampled on the rest
        let positions: Vec<usize> = if i < 3 {
            (0..bytes.len()).collect()
        } else {
            (0..20).map(|_| r.random_range(0..bytes.len())).collect()
        };
        for pos in positions {
            let mut bad = bytes.clone();
            let delta = r.random_range(1..=255u8);
            bad[pos] = bad[pos].wrapping_add(delta);
            corruptions += 1;
            let loaded = String::from_utf8(bad)
                .ok()
                .map(|text| MultiLevelIndex::from_text(&text));
            if let Some(Ok(_)) = loaded {
                missed += 1;
            }
        }
    }
    outcome(
        round_trips == 100 && missed == 0,
        format!("{round_trips}/100 exact round trips, {corruptions} single-byte corruptions, {missed} undetected"),
    )
}

fn c8_residuals() -> Outcome {
    let tent = residual(&[0.0, 1.0, 0.0], &fit_pla(&[0.0, 1.0, 0.0], 1).unwrap()).unwrap();
    let tent_err = (tent - (2.0f64 / 3.0).sqrt()).abs();
    let mut worst = 0.0f64;
    let mut r = rng(SEED + 8);
    for _ in 0..200 {
        let frames = [1, 2, 4, 8, 16][r.random_range(0..5)];
        let width = 64 / frames;
        let s: Vec<f64> = (0..frames)
            .flat_map(|_| {
                let slope = r.random_range(-2.0..2.0);
                let icpt = r.random_range(-2.0..2.0);
                (0..width).map(move |x| icpt + slope * x as f64)
            })
            .collect();
        worst = worst.max(residual(&s, &fit_pla(&s, frames).unwrap()).unwrap());
    }
    outcome(
        tent_err <= 1e-12 && worst <= 1e-12,
        format!("|tent - sqrt(2/3)| = {tent_err:.1e}, max piecewise-linear residual = {worst:.1e}"),
    )
}

fn c9_determinism() -> Outcome {
    let csv = || {
        let mut buf = Vec::new();
        write_csv(&default_sweep(CascadeOrder::FinestFirst), &mut buf).unwrap();
        buf
    };
    let (a, b) = (csv(), csv());
    outcome(
        a == b,
        format!(
            "two runs with seed {SEED}: {} bytes, identical = {}",
            a.len(),
            a == b
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("C1 exactness", c1_exactness()),
        ("C2 lower-bounding chain", c2_lower_bounding()),
        ("C3 projection optimality", c3_projection_optimality()),
        ("C4 exclusion soundness", c4_exclusion_soundness()),
        ("C5 breakpoints", c5_breakpoints()),
    ];
    let (cost, cand) = c6_direction();
    results.push(("C6a weighted total FAST_SAX < SAX", cost));
    results.push(("C6b candidates FAST_SAX <= SAX", cand));
    results.push(("C7 persistence", c7_persistence()));
    results.push(("C8 residual values", c8_residuals()));
    results.push(("C9 bench determinism", c9_determinism()));

    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
