//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.
//!
//! ```bash
//! cargo test -p gamefi-sim --test acceptance
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::time::{Duration, Instant};

use gamefi_sim::analysis::trend_report;
use gamefi_sim::cli::run_cli;
use gamefi_sim::econ::{PlayerCore, ValueAmount};
use gamefi_sim::retention::{select_top, update_churn, winner_count, RetentionPlayer, RetentionState};
use gamefi_sim::serverfi::{arrivals, entry_gate, expected_collection_cost, ServerFiState};
use gamefi_sim::{derive_stream, run_experiment, ExperimentSpec, ModelKind, PlayerId};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

// tolerances and thresholds
const ORACLE_TRIALS: u64 = 100_000;
const ORACLE_REL_TOL: f64 = 0.02;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(10);
const SHAPE_ITERATIONS: u32 = 500;
const SHAPE_REPEATS: u32 = 20;
const SHAPE_TIME_LIMIT: Duration = Duration::from_secs(120);
const SERVERFI_GROWTH_FACTOR: f64 = 1.2;
const RETENTION_MAX_FINAL_TO_PEAK: f64 = 0.6;
const PAYOUT_REL_TOL: f64 = 1e-9;
const PROTOCOL_REPEATS: u32 = 100;
const PROTOCOL_TIME_LIMIT: Duration = Duration::from_secs(600);
const PROTOCOL_MEMORY_LIMIT_KIB: u64 = 1024 * 1024;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("gamefi-sim").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field(output: &str, key: &str) -> Result<f64, String> {
    output
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .ok_or_else(|| format!("`{key}` missing from oracle output"))?
        .parse()
        .map_err(|e| format!("{key}: {e}"))
}

/// 1. Coupon-collector oracle equivalence for k in {2, 4, 8}.
fn coupon_oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for k in [2usize, 4, 8] {
        let (code, out, err) = cli(&[
            "oracle",
            "--k",
            &k.to_string(),
            "--trials",
            &ORACLE_TRIALS.to_string(),
            "--seed",
            "7",
        ]);
        if code != 0 {
            return Err(format!("oracle k={k} exited {code}: {err}"));
        }
        // analytic value recomputed here from the harmonic sum
        let analytic: f64 = (1..=k).map(|i| k as f64 / i as f64).sum();
        let mc = field(&out, "monte_carlo")?;
        let printed = field(&out, "analytic")?;
        let rel = (mc - analytic).abs() / analytic;
        ok &= rel < ORACLE_REL_TOL && (printed - analytic).abs() < 1e-4;
        notes.push(format!("k={k} {analytic:.4} vs {mc:.4} ({:.2}%)", 100.0 * rel));
    }
    let elapsed = started.elapsed();
    ok &= elapsed < ORACLE_TIME_LIMIT;
    let msg = format!("{} in {elapsed:.2?}", notes.join(", "));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 2. Upward trend of the fragment economy at default parameters.
fn serverfi_shape() -> Outcome {
    let spec = ExperimentSpec::new(ModelKind::ServerFi).with_size(SHAPE_ITERATIONS, SHAPE_REPEATS);
    let started = Instant::now();
    let series = run_experiment(&spec).map_err(|e| e.to_string())?.series;
    let elapsed = started.elapsed();
    let trend = trend_report(&series).map_err(|e| e.to_string())?;
    let t50 = series.mean_total_value[49];
    let t500 = series.mean_total_value[499];
    let msg = format!(
        "late_slope {:.4}, T500/T50 = {:.1}/{:.1} = {:.3} (need > 0 and >= {SERVERFI_GROWTH_FACTOR}), peak at {}, {elapsed:.2?}",
        trend.late_slope,
        t500,
        t50,
        t500 / t50,
        trend.peak_iteration
    );
    if trend.late_slope > 0.0 && t500 >= SERVERFI_GROWTH_FACTOR * t50 && elapsed < SHAPE_TIME_LIMIT {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 3. Early peak then decline of the retention economy.
fn retention_shape() -> Outcome {
    let spec = ExperimentSpec::new(ModelKind::Retention).with_size(SHAPE_ITERATIONS, SHAPE_REPEATS);
    let started = Instant::now();
    let series = run_experiment(&spec).map_err(|e| e.to_string())?.series;
    let elapsed = started.elapsed();
    let trend = trend_report(&series).map_err(|e| e.to_string())?;
    let msg = format!(
        "peak at {} (early_peak {}), final/peak {:.3} (need <= {RETENTION_MAX_FINAL_TO_PEAK}), {elapsed:.2?}",
        trend.peak_iteration, trend.early_peak, trend.final_to_peak_ratio
    );
    if trend.early_peak
        && trend.final_to_peak_ratio <= RETENTION_MAX_FINAL_TO_PEAK
        && elapsed < SHAPE_TIME_LIMIT
    {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 4. Byte-identical CSV across reruns and worker counts.
fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let configs = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");
    let mut notes = Vec::new();
    for model in ["serverfi", "retention"] {
        let config = format!("{configs}/{model}.json");
        let mut outputs = Vec::new();
        for (tag, workers) in [("a", "4"), ("b", "4"), ("serial", "1"), ("wide", "8")] {
            let path = dir.path().join(format!("{model}_{tag}.csv"));
            let (code, _, err) = cli(&[
                "simulate",
                "--config",
                &config,
                "--repeats",
                "12",
                "--seed",
                "20240501",
                "--workers",
                workers,
                "--out",
                path.to_str().unwrap(),
            ]);
            if code != 0 {
                return Err(format!("simulate {model} exited {code}: {err}"));
            }
            outputs.push(fs::read(&path).map_err(|e| e.to_string())?);
        }
        if outputs.iter().any(|o| o != &outputs[0]) {
            return Err(format!("{model}: CSV bytes differ between runs"));
        }
        notes.push(format!("{model} {} bytes x4 identical", outputs[0].len()));
    }
    Ok(notes.join(", "))
}

/// 5. Payout conservation and fragment / value-to-draw conservation.
fn conservation() -> Outcome {
    let spec = ExperimentSpec::new(ModelKind::Retention);
    let mut world = RetentionState::new(spec.retention.clone(), spec.econ.clone());
    let mut rng = derive_stream(spec.master_seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let rec = world.step(&mut rng);
        if rec.active_players == 0 {
            continue;
        }
        let audit = world.last_payout();
        let rel = (audit.paid - audit.pool).abs() / audit.pool.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if rel > PAYOUT_REL_TOL {
            return Err(format!("iteration {}: payout rel error {rel:e}", rec.iteration));
        }
    }

    let spec = ExperimentSpec::new(ModelKind::ServerFi);
    let k = spec.serverfi.k as u64;
    let lambda = spec.serverfi.lambda;
    let mut world = ServerFiState::new(spec.serverfi.clone(), spec.econ.clone()).with_audit();
    let mut rng = derive_stream(spec.master_seed, 0);
    let mut conversions = 0u64;
    for _ in 0..500 {
        let rec = world.step(&mut rng);
        for a in world.audit().unwrap() {
            if a.credit_before + a.contribution != a.draws as f64 * lambda + a.credit_after {
                return Err(format!("iteration {}: value-to-draw mismatch for {}", rec.iteration, a.player));
            }
            if !(0.0..lambda).contains(&a.credit_after) {
                return Err(format!("iteration {}: credit out of range", rec.iteration));
            }
            conversions += 1;
        }
        let f = world.flows();
        if f.drawn - k * f.minted_nfts - f.destroyed != world.inventory_total() {
            return Err(format!("iteration {}: fragment ledger out of balance", rec.iteration));
        }
    }
    let f = world.flows();
    Ok(format!(
        "retention worst payout rel error {worst:.1e}; serverfi {conversions} conversions exact, \
         {} drawn = {} minted x {k} + {} destroyed + {} held",
        f.drawn,
        f.minted_nfts,
        f.destroyed,
        world.inventory_total()
    ))
}

fn peak_rss_kib() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find_map(|l| l.strip_prefix("VmHWM:"))
        .and_then(|v| v.trim().trim_end_matches("kB").trim().parse().ok())
}

/// 6. Full protocol (500 iterations x 100 repeats) for both models.
fn protocol_scale() -> Outcome {
    let started = Instant::now();
    for model in [ModelKind::ServerFi, ModelKind::Retention] {
        let spec = ExperimentSpec::new(model).with_size(500, PROTOCOL_REPEATS);
        let out = run_experiment(&spec).map_err(|e| e.to_string())?;
        if out.series.len() != 500 || out.raw.len() != PROTOCOL_REPEATS as usize {
            return Err(format!("{model:?}: unexpected output shape"));
        }
    }
    let elapsed = started.elapsed();
    let rss = peak_rss_kib().ok_or("peak RSS unavailable (no /proc/self/status)")?;
    let msg = format!(
        "both models 500 x {PROTOCOL_REPEATS} in {elapsed:.2?}, peak RSS {:.1} MiB",
        rss as f64 / 1024.0
    );
    if elapsed < PROTOCOL_TIME_LIMIT && rss < PROTOCOL_MEMORY_LIMIT_KIB {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn rp(id: u64, tolerance: u32, misses: u32) -> RetentionPlayer {
    RetentionPlayer {
        core: PlayerCore::new(PlayerId(id), ValueAmount::new(1.0).unwrap(), 1),
        tolerance,
        consecutive_misses: misses,
        earned: 0.0,
    }
}

/// 7. Rule examples: winner count, tie-break, miss counter, gate, arrivals.
fn rule_suites() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_owned());
        }
    };
    let totals = |pairs: &[(u64, f64)]| {
        pairs
            .iter()
            .map(|&(id, v)| (PlayerId(id), ValueAmount::new(v).unwrap()))
            .collect::<std::collections::BTreeMap<_, _>>()
    };

    // winner count
    let five = totals(&[(0, 10.0), (1, 5.0), (2, 1.0), (3, 1.0), (4, 1.0)]);
    check("top 20% of 5 is {A}", select_top(&five, 0.2) == BTreeSet::from([PlayerId(0)]));
    check("N=4 still one winner", winner_count(4, 0.2) == 1);
    check("max(1, floor(pN)) for N=1..500", (1..=500).all(|n| winner_count(n, 0.2) == (n / 5).max(1)));
    // tie-break
    let tie = totals(&[(0, 5.0), (1, 5.0)]);
    check("tie goes to lower id", select_top(&tie, 0.2) == BTreeSet::from([PlayerId(0)]));
    // miss counter
    let mut ps = vec![rp(0, 3, 3)];
    check("tau=3, 4th miss departs", update_churn(&mut ps, &BTreeSet::new()) == vec![PlayerId(0)]);
    let mut ps = vec![rp(0, 3, 3)];
    let stayed = update_churn(&mut ps, &BTreeSet::from([PlayerId(0)])).is_empty();
    check("winner resets misses", stayed && ps[0].consecutive_misses == 0);
    let mut ps = vec![rp(0, 1, 0)];
    let stayed = update_churn(&mut ps, &BTreeSet::new()).is_empty();
    check("new player first miss stays", stayed && ps[0].consecutive_misses == 1);
    // entry gate
    let cost = expected_collection_cost(4, 1.0);
    check("cost(4,1) = 25/3", (cost - 25.0 / 3.0).abs() < 1e-12);
    check("gate open at 0.2 x 50", entry_gate(cost, 0.2, 50));
    check("gate closed at 0.1 x 50", !entry_gate(cost, 0.1, 50));
    check("gate closed at zero reward", !entry_gate(cost, 0.0, 50));
    // arrivals
    check("arrivals(1) = 100", arrivals(1, 100, 1.1, true) == 100);
    check("arrivals(2) = 90", arrivals(2, 100, 1.1, true) == 90);
    check("closed gate, no arrivals", arrivals(2, 100, 1.1, false) == 0);

    if failures.is_empty() {
        Ok("14 rule examples hold".into())
    } else {
        Err(format!("failed: {}", failures.join("; ")))
    }
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1", "coupon-collector oracle matches lambda*k*H_k", coupon_oracle_equivalence),
        ("2", "serverfi upward trend at defaults", serverfi_shape),
        ("3", "retention early peak then decline", retention_shape),
        ("4", "simulate is byte-reproducible across worker counts", determinism),
        ("5", "payout, fragment and value-to-draw conservation", conservation),
        ("6", "full protocol within time and memory budget", protocol_scale),
        ("7", "rule unit examples", rule_suites),
    ];
    let mut failed = 0;
    for (id, title, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] criterion {id}: {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {id}: {title}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
