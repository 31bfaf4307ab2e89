//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report is always
//! printed. Exits nonzero if any criterion fails. Tolerances and ensemble
//! sizes are fixed below; every ensemble uses base seed 0 unless stated.

use std::process::ExitCode;
use std::time::Instant;

use divest::analysis::{classify, summarize, BehaviorType};
use divest::ensemble::{run_ensemble, sweep, Axis, SweepResult};
use divest::firm::FirmParams;
use divest::io;
use divest::market::{trading_round, Investor, MarketState, TradingParams};
use divest::policy::{PolicyParams, PolicyState};
use divest::social::{adoption_probability, social_round, Network, SocialParams};
use divest::{engine, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

const CEILING: f64 = 625.0;
const CONSERVATION_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-12;
const MC_DRAWS: usize = 100_000;
const MC_SIGMAS: f64 = 3.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn with(base: &SimConfig, overrides: &[&str]) -> SimConfig {
    let mut c = base.clone();
    c.apply_overrides(overrides).expect("valid overrides");
    c
}

fn mean_cce(config: &SimConfig, runs: usize) -> f64 {
    let recs = run_ensemble(config, runs, None).unwrap();
    summarize(&recs, config).unwrap().mean_cce
}

// 1. type-A runs end exactly at the extraction ceiling
fn ceiling() -> Verdict {
    let started = Instant::now();
    let cfg = with(&SimConfig::default(), &["social.sif=0.05", "rho=0.5"]);
    let recs = run_ensemble(&cfg, 100, None).unwrap();
    let a: Vec<_> = recs
        .iter()
        .filter(|r| classify(r, &cfg) == BehaviorType::A)
        .collect();
    let exact = a.iter().all(|r| r.final_cce == CEILING);
    let secs = started.elapsed().as_secs_f64();
    verdict(
        !a.is_empty() && exact && secs < 30.0,
        format!("{} of 100 runs type A, all at exactly 625: {exact}, {secs:.1}s (< 30s)", a.len()),
    )
}

fn random_config(rng: &mut ChaCha8Rng) -> SimConfig {
    SimConfig {
        firm: FirmParams {
            r0: rng.gen_range(10.0..1000.0),
            b0: rng.gen_range(10.0..1000.0),
            q: rng.gen_range(0.1..10.0),
            x: rng.gen_range(0.0..10.0),
            net_price: rng.gen_range(0.5..50.0),
            shares: rng.gen_range(10.0..1e5),
            discount: rng.gen_range(1e-4..0.05),
        },
        social: SocialParams {
            sif: rng.gen(),
            phi: rng.gen(),
            alpha: rng.gen_range(0.001..2.0),
            delta: rng.gen(),
            k_ring: 2 * rng.gen_range(1..5),
            p_rewire_init: rng.gen_range(0.0..0.5),
        },
        policy: PolicyParams {
            lambda: rng.gen_range(0.1..40.0),
            p_max: rng.gen_range(0.001..1.0),
            unscaled: false,
        },
        investors: rng.gen_range(12..150),
        rho: rng.gen(),
        sri_share: rng.gen(),
        init_convinced: rng.gen(),
        liquidity: rng.gen_range(0.3..4.0),
        mu: rng.gen_range(0.0..12.0),
        delisting_fraction: rng.gen_range(0.0..0.2),
        horizon: rng.gen_range(1..=250),
        immediate_divestment: rng.gen(),
        reinvest_dividends: rng.gen(),
        seed: rng.gen(),
        ..SimConfig::default()
    }
}

// 2. budget + cce == B0 at every month of 1000 random configurations
fn conservation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let cfg = random_config(&mut rng);
        let rec = engine::run(&cfg).expect("random config runs");
        for r in rec.rows() {
            worst = worst.max((r.budget + r.cce - cfg.firm.b0).abs() / cfg.firm.b0);
        }
    }
    verdict(
        worst <= CONSERVATION_TOL,
        format!("worst relative error {worst:.2e} (tol {CONSERVATION_TOL:.0e})"),
    )
}

// 3. more social interaction, less carbon
fn sif_trend() -> Verdict {
    let base = SimConfig::default();
    let m = |sif: &str| mean_cce(&with(&base, &[&format!("social.sif={sif}")]), 400);
    let (m01, m02, m05, m06) = (m("0.1"), m("0.2"), m("0.5"), m("0.6"));
    let decline = 1.0 - m05 / m02;
    verdict(
        m01 > m06 && decline >= 0.30,
        format!(
            "mean CCE sif 0.1/0.2/0.5/0.6 = {m01:.1}/{m02:.1}/{m05:.1}/{m06:.1}; decline over [0.2, 0.5] {:.1}% (>= 30%)",
            100.0 * decline
        ),
    )
}

// 4. L < 1 crashes the price at once
fn liquidity_crash() -> Verdict {
    let cfg = with(&SimConfig::default(), &["liquidity=0.8"]);
    let recs = run_ensemble(&cfg, 200, None).unwrap();
    let early = recs
        .iter()
        .filter(|r| r.events.first_crash_month.is_some_and(|m| m <= 5))
        .count();
    let share = early as f64 / 200.0;
    verdict(share >= 0.95, format!("{early}/200 runs crash by month 5 ({:.1}% >= 95%)", 100.0 * share))
}

// 5. a responsible majority pushes CCE below the budget
fn sri_threshold() -> Verdict {
    let base = with(&SimConfig::default(), &["social.sif=0.6"]);
    let high = with(&base, &["sri_share=0.7"]);
    let recs = run_ensemble(&high, 200, None).unwrap();
    let s = summarize(&recs, &high).unwrap();
    let low = mean_cce(&with(&base, &["sri_share=0.05"]), 200);
    verdict(
        s.types.f > 0 && s.mean_cce < 250.0 && low > 250.0,
        format!(
            "sri 0.7: {} of 200 runs type F, mean CCE {:.2} (< 250); sri 0.05: mean CCE {low:.1} (> 250)",
            s.types.f, s.mean_cce
        ),
    )
}

// 6. a small responsible minority can trigger the collapse
fn minority_tipping() -> Verdict {
    let base = SimConfig::default();
    let mut best = (0.0, String::new());
    for sri in ["0.1", "0.15", "0.2"] {
        for sif in ["0.5", "0.6", "0.7"] {
            let cfg = with(&base, &[&format!("sri_share={sri}"), &format!("social.sif={sif}")]);
            let recs = run_ensemble(&cfg, 100, None).unwrap();
            let early = recs
                .iter()
                .filter(|r| {
                    r.events
                        .first_crash_month
                        .is_some_and(|c| r.events.budget_exceeded_month.is_none_or(|b| c < b))
                })
                .count() as f64
                / 100.0;
            if early > best.0 {
                best = (early, format!("sri {sri}, sif {sif}"));
            }
        }
    }
    verdict(
        best.0 >= 0.25,
        format!("best cell {}: {:.0}% of runs crash before the budget is used up (>= 25%)", best.1, 100.0 * best.0),
    )
}

fn tipping_grid() -> SweepResult {
    let axes = Axis::parse_list("social.sif:0.05:0.7:14,rho:0.05:0.7:14").unwrap();
    sweep(&SimConfig::default(), &axes, 40, None).unwrap()
}

// 7. every behaviour type occurs somewhere in 10,000 runs
fn type_coverage(grid: &SweepResult) -> Verdict {
    let mut counts = [0usize; 6];
    for c in &grid.cells {
        for (k, v) in c.summary.types.to_array().iter().enumerate() {
            counts[k] += v;
        }
    }
    let grid_runs: usize = counts.iter().sum();
    let sri_axis = Axis::linspace("sri_share", 0.0, 0.9, 12).unwrap();
    let per_cell = (10_000 - grid_runs) / 12;
    let sri = sweep(&with(&SimConfig::default(), &["social.sif=0.6"]), &[sri_axis], per_cell, None).unwrap();
    for c in &sri.cells {
        for (k, v) in c.summary.types.to_array().iter().enumerate() {
            counts[k] += v;
        }
    }
    let total: usize = counts.iter().sum();
    verdict(
        counts.iter().all(|&c| c > 0) && total >= 10_000,
        format!("{total} runs, counts A..F = {counts:?}"),
    )
}

// 8. a bimodal band separates the high- and low-CCE regions
fn tipping_band(grid: &SweepResult) -> Verdict {
    let bimodal = grid.cells.iter().filter(|c| c.summary.bimodal).count();
    let high = grid.cells.iter().filter(|c| c.summary.mean_cce > 500.0).count();
    let low = grid.cells.iter().filter(|c| c.summary.mean_cce < 300.0).count();
    let band = grid.tipping_band(500.0, 300.0);
    verdict(
        band.is_some() && high > 0 && low > 0,
        format!(
            "{high} cells > 500, {low} cells < 300, {bimodal} bimodal; separating band: {}",
            band.map_or("none".to_string(), |b| format!("{} cells", b.len()))
        ),
    )
}

#[derive(Deserialize)]
struct NpvCase {
    q: f64,
    net_price: f64,
    shares: f64,
    discount: f64,
    stock: f64,
    expected: String,
}

#[derive(Deserialize)]
struct AdoptionCase {
    alpha: f64,
    sigma_i: f64,
    sigma_j: f64,
    committed: bool,
    delta: f64,
    expected: String,
}

#[derive(Deserialize)]
struct PolicyCase {
    lambda: f64,
    p_max: f64,
    unconvinced: f64,
    expected: String,
}

#[derive(Deserialize)]
struct Oracles {
    npv: Vec<NpvCase>,
    adoption: Vec<AdoptionCase>,
    policy: Vec<PolicyCase>,
}

fn rel_err(got: f64, expected: &str) -> f64 {
    let e: f64 = expected.parse().expect("oracle value");
    if e == 0.0 {
        got.abs()
    } else {
        ((got - e) / e).abs()
    }
}

/// Observed count against a binomial expectation, in standard deviations.
fn z_score(hits: usize, p: f64, n: usize) -> f64 {
    let mean = p * n as f64;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    (hits as f64 - mean) / sd
}

fn investor(id: usize, responsible: bool, convinced: bool, cash: f64) -> Investor {
    Investor {
        id,
        responsible,
        convinced,
        shares: 2.5,
        cash,
        last_income: 0.0,
    }
}

fn bernoulli_checks() -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // policy arrival
    for (u, params) in [(0.0, PolicyParams::default()), (0.05, PolicyParams { lambda: 20.0, p_max: 0.5, unscaled: false })] {
        let p = params.probability(u);
        let hits = (0..MC_DRAWS)
            .filter(|&m| PolicyState::default().sample(m as u32, u, &params, &mut rng))
            .count();
        out.push((format!("policy p={p:.4}"), z_score(hits, p, MC_DRAWS)));
    }

    // belief adoption from a committed neighbour with equal success
    let make_pair = || vec![investor(0, false, false, 0.0), investor(1, true, true, 0.0)];
    let mut net = Network::empty(2);
    net.add_edge(0, 1);
    let params = SocialParams {
        sif: 1.0,
        phi: 0.0,
        alpha: 0.7,
        delta: 0.2,
        ..SocialParams::default()
    };
    let p = adoption_probability(0.0, 0.0, true, params.alpha, params.delta);
    let mut hits = 0;
    for _ in 0..MC_DRAWS {
        let mut pair = make_pair();
        social_round(&mut pair, &mut net, &params, 3.0, &mut rng);
        hits += usize::from(pair[0].convinced);
    }
    out.push((format!("adoption p={p:.2}"), z_score(hits, p, MC_DRAWS)));

    // social activation: encounters between two disagreeing neighbours
    let params = SocialParams {
        sif: 0.3,
        phi: 1.0,
        ..SocialParams::default()
    };
    let mut encounters = 0;
    for _ in 0..MC_DRAWS / 2 {
        let mut pair = make_pair();
        encounters += social_round(&mut pair, &mut net, &params, 3.0, &mut rng).encounters;
    }
    out.push(("social activation p=0.3".into(), z_score(encounters, 0.3, MC_DRAWS)));

    // trading activation: a buyer trades whenever drawn
    let tp = TradingParams {
        rho: 0.25,
        mu: 4.0,
        npv_unconstrained: 10.0,
        npv_constrained: 10.0,
        immediate_divestment: false,
    };
    let mut trades = 0;
    for _ in 0..MC_DRAWS {
        let mut inv = vec![Investor {
            shares: 0.0,
            ..investor(0, false, false, 10.0)
        }];
        let mut market = MarketState {
            price: 1.0,
            held: 500.0,
            issued: 1000.0,
            pending_flow: 0.0,
        };
        trades += trading_round(&mut inv, &mut market, &tp, &mut rng);
    }
    out.push(("trading activation p=0.25".into(), z_score(trades, 0.25, MC_DRAWS)));
    out
}

// 9. analytic formulas against high-precision references; Bernoulli draws
fn oracles() -> Verdict {
    let text = include_str!("data/oracles.json");
    let o: Oracles = serde_json::from_str(text).expect("oracle fixture");
    let npv = o
        .npv
        .iter()
        .map(|c| {
            let f = FirmParams {
                q: c.q,
                net_price: c.net_price,
                shares: c.shares,
                discount: c.discount,
                ..FirmParams::default()
            };
            rel_err(f.npv_of_stock(c.stock), &c.expected)
        })
        .fold(0.0, f64::max);
    let adoption = o
        .adoption
        .iter()
        .map(|c| {
            rel_err(
                adoption_probability(c.sigma_i, c.sigma_j, c.committed, c.alpha, c.delta),
                &c.expected,
            )
        })
        .fold(0.0, f64::max);
    let policy = o
        .policy
        .iter()
        .map(|c| {
            let p = PolicyParams {
                lambda: c.lambda,
                p_max: c.p_max,
                unscaled: false,
            };
            rel_err(p.probability(c.unconvinced), &c.expected)
        })
        .fold(0.0, f64::max);
    let cases = o.npv.len() + o.adoption.len() + o.policy.len();

    let mc = bernoulli_checks();
    let worst_z = mc.iter().map(|(_, z)| z.abs()).fold(0.0, f64::max);
    let mc_text: Vec<String> = mc.iter().map(|(n, z)| format!("{n}: z={z:+.2}")).collect();
    verdict(
        npv <= ORACLE_TOL && adoption <= ORACLE_TOL && policy <= ORACLE_TOL && worst_z <= MC_SIGMAS,
        format!(
            "{cases} cases, max rel err npv {npv:.1e} / adoption {adoption:.1e} / policy {policy:.1e} (tol {ORACLE_TOL:.0e}); {}",
            mc_text.join(", ")
        ),
    )
}

// 10. same config and seed, same bytes, regardless of thread count
fn determinism() -> Verdict {
    let cfg = SimConfig {
        seed: 7,
        ..SimConfig::default()
    };
    let a = io::run_csv(&engine::run(&cfg).unwrap());
    let b = io::run_csv(&engine::run(&cfg).unwrap());
    let csv_bytes = |threads| -> Vec<Vec<u8>> {
        run_ensemble(&cfg, 16, Some(threads))
            .unwrap()
            .iter()
            .map(io::run_csv)
            .collect()
    };
    let one = csv_bytes(1);
    let eight = csv_bytes(8);
    let summary = |threads| io::summary_json(&summarize(&run_ensemble(&cfg, 16, Some(threads)).unwrap(), &cfg).unwrap()).unwrap();
    let same_summary = summary(1) == summary(8);
    verdict(
        a == b && one == eight && same_summary,
        format!(
            "repeat run CSV identical: {}; 16-run ensemble CSVs 1 vs 8 threads identical: {}; summaries identical: {same_summary}",
            a == b,
            one == eight
        ),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(u32, &str, Verdict)> = vec![
        (1, "CCE ceiling", ceiling()),
        (2, "budget conservation", conservation()),
        (3, "SIF trend", sif_trend()),
        (4, "liquidity crash", liquidity_crash()),
        (5, "SRI threshold", sri_threshold()),
        (6, "minority tipping", minority_tipping()),
    ];
    let grid = tipping_grid();
    results.push((7, "type coverage", type_coverage(&grid)));
    results.push((8, "tipping boundary", tipping_band(&grid)));
    results.push((9, "analytic oracles", oracles()));
    results.push((10, "determinism", determinism()));

    let mut failed = 0;
    for (n, name, v) in &results {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} [{tag}] {name}: {}", v.detail);
        failed += usize::from(!v.pass);
    }
    println!(
        "acceptance: {}/{} passed in {:.0}s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
