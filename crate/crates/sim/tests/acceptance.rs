//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Exits non-zero when a
//! criterion outside `KNOWN_FAILURES` fails.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use volte_core::bip::{
    solve_branch_and_bound, solve_exhaustive, BinaryProgram, Row, SolveStatus, Unlimited, MAX_EXHAUSTIVE_VARS,
};
use volte_core::channel::{build_topology, BitsMatrix, ChannelModel};
use volte_core::metrics::Stat;
use volte_core::ratemap::{bits_per_prb, CqiIndex, BITS_PER_PRB, VOLTE_PAYLOAD_BITS};
use volte_core::sched::{
    build_frame_program, heuristic_tti, run_frame, schedule_frame_optimal, schedule_frame_relaxed_bound,
    tti_select_volte, FrameOptions, HeuristicMode, Policy, SchedulerState, DEFAULT_GAMMA, FRAME_TTIS,
};
use volte_sim::experiment::{build_scenario, frame_options};
use volte_sim::{run_experiment, write_results, Bandwidth, ExperimentConfig, ResultRow, RunRecord};

/// Criteria that fail with the shipped defaults; see the project notes.
const KNOWN_FAILURES: &[usize] = &[10];

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

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn random_bits(r: &mut ChaCha8Rng, n: usize, users: usize) -> BitsMatrix {
    BitsMatrix::from_fn(n, users, |_, _| BITS_PER_PRB[r.random_range(0..16)])
}

fn channel_bits(seed: u64, n: usize, num_volte: usize, num_data: usize) -> BitsMatrix {
    let topo = build_topology(seed, num_volte, num_data, 288.0, 3.8).unwrap();
    ChannelModel::default().bits(seed ^ 0xfade, &topo, n).unwrap()
}

fn state_with(num_volte: usize, num_data: usize, remaining: Vec<usize>) -> SchedulerState {
    let mut s = SchedulerState::new(num_volte, num_data, DEFAULT_GAMMA).unwrap();
    s.remaining_volte = remaining;
    s
}

// 1 ------------------------------------------------------------------------

fn c1_rate_map() -> Outcome {
    let b = |c| bits_per_prb(CqiIndex::new(c).unwrap());
    let got = (b(15), b(7), b(1));
    outcome(got == (666, 177, 18), format!("CQI 15/7/1 -> {}/{}/{} bits", got.0, got.1, got.2))
}

// 2 ------------------------------------------------------------------------

fn random_row(r: &mut ChaCha8Rng, n: usize, point: &[bool]) -> (Vec<f64>, f64) {
    let coeffs: Vec<f64> = (0..n)
        .map(|_| if r.random_bool(0.5) { r.random_range(-3i32..=5) as f64 } else { 0.0 })
        .collect();
    let at_point: f64 = coeffs.iter().zip(point).filter(|p| *p.1).map(|p| p.0).sum();
    let rhs = if r.random_bool(0.7) {
        at_point + r.random_range(-1i32..=1) as f64
    } else {
        r.random_range(-4i32..=8) as f64
    };
    (coeffs, rhs)
}

fn random_program(r: &mut ChaCha8Rng) -> BinaryProgram {
    let n = r.random_range(1..=22);
    let halves = r.random_bool(0.5);
    let objective = (0..n)
        .map(|_| {
            let v = r.random_range(-10i32..=15) as f64;
            if halves { v / 2.0 } else { v }
        })
        .collect();
    let mut p = BinaryProgram::new(objective);
    let point: Vec<bool> = (0..n).map(|_| r.random_bool(0.5)).collect();
    for _ in 0..r.random_range(0..=1) {
        let (c, rhs) = random_row(r, n, &point);
        p.add_eq(Row::dense(&c, rhs.round()));
    }
    for _ in 0..r.random_range(0..=3) {
        let (c, rhs) = random_row(r, n, &point);
        p.add_ge(Row::dense(&c, rhs));
    }
    for _ in 0..r.random_range(0..=3) {
        let (c, rhs) = random_row(r, n, &point);
        p.add_le(Row::dense(&c, rhs));
    }
    p
}

fn c2_oracle_equivalence() -> Outcome {
    let mut r = rng(2);
    let mut bad = Vec::new();
    let (mut feasible, mut max_vars) = (0, 0);
    for i in 0..200 {
        let p = random_program(&mut r);
        max_vars = max_vars.max(p.num_vars);
        let ex = solve_exhaustive(&p).unwrap();
        let bb = solve_branch_and_bound(&p, &mut Unlimited);
        let same = ex.status == bb.status
            && (ex.status != SolveStatus::Optimal || ex.objective_value == bb.objective_value);
        feasible += usize::from(ex.status == SolveStatus::Optimal);
        if !same {
            bad.push(format!("program {i}"));
        }
    }

    let mut sched_exhaustive = 0;
    for i in 0..100 {
        let n = r.random_range(1..=3);
        let (u, k) = loop {
            let (u, k) = (r.random_range(0..=2), r.random_range(0..=2));
            if u + k > 0 {
                break (u, k);
            }
        };
        let t = r.random_range(1..=2);
        let b = random_bits(&mut r, n, u + k);
        let truth = oracle::frame_optimum(std::slice::from_ref(&b), u, t).map(|v| v as f64);
        let reduced = schedule_frame_optimal(std::slice::from_ref(&b), u, t, &mut Unlimited).unwrap();
        let literal = build_frame_program(&b, u, k, t).unwrap();
        let full = solve_branch_and_bound(&literal, &mut Unlimited);
        let mut verdicts = vec![
            (reduced.status == SolveStatus::Optimal).then_some(reduced.objective),
            (full.status == SolveStatus::Optimal).then_some(full.objective_value),
        ];
        if literal.num_vars <= MAX_EXHAUSTIVE_VARS {
            let ex = solve_exhaustive(&literal).unwrap();
            verdicts.push((ex.status == SolveStatus::Optimal).then_some(ex.objective_value));
            sched_exhaustive += 1;
        }
        if verdicts.iter().any(|v| *v != truth) {
            bad.push(format!("schedule {i} (N={n} U={u} K={k} T={t}): {verdicts:?} vs {truth:?}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "200 programs (<= {max_vars} vars, {feasible} feasible) and 100 schedules \
             ({sched_exhaustive} also enumerated in literal form); mismatches: {}",
            if bad.is_empty() { "none".to_string() } else { bad.join("; ") }
        ),
    )
}

// 3 ------------------------------------------------------------------------

fn c3_relaxation_sandwich() -> Outcome {
    let mut r = rng(3);
    let (mut checked, mut attempts, mut worst, mut tight) = (0, 0, f64::INFINITY, 0);
    let mut bad = Vec::new();
    while checked < 100 && attempts < 2000 {
        attempts += 1;
        let (n, u, k, t) = (r.random_range(1..=4), r.random_range(1..=3), r.random_range(1..=2), r.random_range(1..=3));
        let b = random_bits(&mut r, n, u + k);
        let sol = schedule_frame_optimal(std::slice::from_ref(&b), u, t, &mut Unlimited).unwrap();
        if sol.status != SolveStatus::Optimal {
            continue;
        }
        checked += 1;
        match schedule_frame_relaxed_bound(&b, u, k, t).unwrap() {
            Some(bound) => {
                worst = worst.min(bound - sol.objective);
                tight += usize::from((bound - sol.objective).abs() <= 1e-6);
                if sol.objective > bound + 1e-6 {
                    bad.push(format!("ILP {} > LP {bound}", sol.objective));
                }
            }
            None => bad.push("LP infeasible for a feasible ILP".into()),
        }
    }
    outcome(
        checked == 100 && bad.is_empty(),
        format!(
            "{checked} feasible instances, min(LP - ILP) = {worst:.3}, LP tight on {tight}; {}",
            if bad.is_empty() { "no violations".into() } else { bad.join("; ") }
        ),
    )
}

// 4 ------------------------------------------------------------------------

fn c4_baseline_dominance() -> Outcome {
    let mut r = rng(4);
    let (mut strict_gain, mut bad) = (0, Vec::new());
    for i in 0..1000u64 {
        let n = [7, 15, 50][r.random_range(0..3)];
        let (u, k) = (r.random_range(1..=12), r.random_range(1..=5));
        let b = channel_bits(r.random(), n, u, k);
        let remaining: Vec<usize> = (0..u).filter(|_| r.random_bool(0.7)).collect();
        let s = state_with(u, k, remaining);
        let strict = i % 2 == 1;
        let h = heuristic_tti(&b, &s, HeuristicMode::MaxThroughput, strict, &mut 0);
        let base = heuristic_tti(&b, &s, HeuristicMode::Baseline, strict, &mut 0);
        let volte = |a: &volte_core::sched::TtiAllocation| -> Vec<Option<usize>> {
            a.owner.iter().map(|o| o.filter(|&v| v < u)).collect()
        };
        if volte(&h) != volte(&base) || h.volte_served != base.volte_served || h.data_bits() < base.data_bits() {
            bad.push(i);
        }
        strict_gain += usize::from(h.data_bits() > base.data_bits());
    }
    outcome(
        bad.is_empty() && strict_gain >= 1,
        format!(
            "1000 TTIs: VoLTE allocations identical in {}, heuristic data > baseline in {strict_gain}",
            1000 - bad.len()
        ),
    )
}

// 5 ------------------------------------------------------------------------

fn c5_phase_one_dominance() -> Outcome {
    let mut r = rng(5);
    let mut bad = Vec::new();
    let (mut strictly_more, mut oracle_checked) = (0, 0);
    for i in 0..500 {
        let small = i < 250;
        let (n, u) = if small { (7, r.random_range(1..=4)) } else { (15, r.random_range(1..=10)) };
        let k = r.random_range(1..=5);
        let b = channel_bits(r.random(), n, u, k);
        let remaining: Vec<usize> = (0..u).filter(|_| r.random_bool(0.8)).collect();
        let sel = tti_select_volte(&b, &remaining, u, &mut Unlimited).unwrap();
        let opt = sel.y.iter().filter(|&&y| y).count();
        if sel.stats.status != SolveStatus::Optimal {
            bad.push(format!("instance {i}: phase one not solved to optimality"));
            continue;
        }
        if small {
            oracle_checked += 1;
            let truth = oracle::tti_max_served(&b, &remaining);
            if truth != opt {
                bad.push(format!("instance {i}: P2(a) {opt} vs enumeration {truth}"));
            }
        }
        let s = state_with(u, k, remaining);
        for mode in [HeuristicMode::MaxThroughput, HeuristicMode::ProportionalFair] {
            let served = heuristic_tti(&b, &s, mode, false, &mut 0).volte_served.len();
            if served > opt {
                bad.push(format!("instance {i}: heuristic {served} > optimum {opt}"));
            }
            strictly_more += usize::from(mode == HeuristicMode::MaxThroughput && opt > served);
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "500 TTIs ({oracle_checked} optima cross-checked by enumeration); optimum serves more in {strictly_more}; {}",
            if bad.is_empty() { "no violations".into() } else { bad.join("; ") }
        ),
    )
}

// 6 ------------------------------------------------------------------------

fn c6_frame_bound() -> Outcome {
    let mut r = rng(6);
    let opts = FrameOptions::default();
    let (mut checked, mut attempts, mut gap_total) = (0, 0, 0u64);
    let mut bad = Vec::new();
    while checked < 100 && attempts < 500 {
        attempts += 1;
        let (u, k) = (r.random_range(1..=10), r.random_range(1..=5));
        let b = channel_bits(r.random(), 7, u, k);
        let bits = std::slice::from_ref(&b);
        let (frame, _) = run_frame(bits, u, k, Policy::TtiOptimal, &opts, None).unwrap();
        if frame.volte_served_count() != u {
            continue;
        }
        checked += 1;
        let sol = schedule_frame_optimal(bits, u, FRAME_TTIS, &mut Unlimited).unwrap();
        if sol.status != SolveStatus::Optimal {
            bad.push(format!("attempt {attempts}: frame-level {:?} on a P1-feasible instance", sol.status));
            continue;
        }
        let best = sol.objective as u64;
        if sol.objective != best as f64 || frame.data_bits() > best {
            bad.push(format!("attempt {attempts}: TTI-level {} > frame-level {}", frame.data_bits(), sol.objective));
        } else {
            gap_total += best - frame.data_bits();
        }
    }
    outcome(
        checked == 100 && bad.is_empty(),
        format!(
            "{checked} fully served N=7 frames, TTI-level <= frame-level everywhere (total gap {gap_total} bits); {}",
            if bad.is_empty() { "no violations".into() } else { bad.join("; ") }
        ),
    )
}

// 7 ------------------------------------------------------------------------

fn c7_volte_linearity() -> Outcome {
    let cfg = ExperimentConfig {
        bandwidth: Bandwidth::Mhz3,
        num_data: 5,
        runs: 30,
        ..ExperimentConfig::default()
    };
    let opts = frame_options(&cfg);
    let (mut knee, mut still_clean) = (None, true);
    let (mut zero_outage_frames, mut bad) = (0, Vec::new());
    for u in (0..=60).step_by(5) {
        let mut clean = 0;
        for run in 0..cfg.runs {
            let s = build_scenario(&cfg, u, run).unwrap();
            let (frame, state) = run_frame(&s.frames[0], u, cfg.num_data, Policy::Heuristic, &opts, None).unwrap();
            let served = frame.volte_served_count() as u64;
            if state.c_volte != VOLTE_PAYLOAD_BITS as u64 * served {
                bad.push(format!("U={u} run {run}: c_volte {} for {served} served", state.c_volte));
            }
            if served == u as u64 {
                clean += 1;
                zero_outage_frames += 1;
                if state.c_volte != 253 * u as u64 {
                    bad.push(format!("U={u} run {run}: c_volte {} != 253*U", state.c_volte));
                }
            }
        }
        // Knee: last sweep point of the leading run where most frames serve everyone.
        if still_clean && 2 * clean > cfg.runs {
            knee = Some(u);
        } else {
            still_clean = false;
        }
    }
    let knee = knee.unwrap_or(0);
    outcome(
        bad.is_empty() && knee > 0,
        format!(
            "N=15 K=5: most frames fully served up to U={knee}; c_volte = 253*U in all {zero_outage_frames} \
             zero-outage frames; {}",
            if bad.is_empty() { "no violations".into() } else { bad.join("; ") }
        ),
    )
}

// 8, 9 ---------------------------------------------------------------------

fn trend_config() -> ExperimentConfig {
    ExperimentConfig {
        bandwidth: Bandwidth::Mhz3,
        num_data: 5,
        volte_sweep: vec![0, 5, 10, 15],
        policies: Policy::ALL.to_vec(),
        runs: 30,
        ..ExperimentConfig::default()
    }
}

fn trend_records() -> &'static Vec<RunRecord> {
    static RECORDS: OnceLock<Vec<RunRecord>> = OnceLock::new();
    RECORDS.get_or_init(|| run_experiment(&trend_config()).unwrap())
}

fn series(records: &[RunRecord], policy: Policy, u: usize, f: impl Fn(&RunRecord) -> f64) -> Vec<f64> {
    records.iter().filter(|r| r.policy == policy && r.num_volte == u).map(f).collect()
}

/// Checks `mean[i+1] <= mean[i] + se` (or `>=` with `- se` when
/// `increasing`), `se` pooled over the two points.
fn monotone(stats: &[Stat], increasing: bool) -> bool {
    stats.windows(2).all(|w| {
        let se = (w[0].sem().powi(2) + w[1].sem().powi(2)).sqrt();
        if increasing {
            w[1].mean >= w[0].mean - se
        } else {
            w[1].mean <= w[0].mean + se
        }
    })
}

fn c8_monotone_trends() -> Outcome {
    let cfg = trend_config();
    let recs = trend_records();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in Policy::ALL {
        let stats: Vec<Stat> = cfg
            .volte_sweep
            .iter()
            .map(|&u| Stat::of(&series(recs, p, u, |r| r.metrics.data_bits_per_frame * 0.05)).unwrap())
            .collect();
        let m = monotone(&stats, false);
        ok &= m;
        let means: Vec<String> = stats.iter().map(|s| format!("{:.0}", s.mean)).collect();
        parts.push(format!("{}{} [{}]", p.name(), if m { "" } else { " NOT monotone" }, means.join(" ")));
    }
    let infeasible: Vec<Stat> = cfg
        .volte_sweep
        .iter()
        .map(|&u| Stat::of(&series(recs, Policy::FrameOptimal, u, |r| r.metrics.infeasible_fraction)).unwrap())
        .collect();
    let m = monotone(&infeasible, true);
    ok &= m;
    let fr: Vec<String> = infeasible.iter().map(|s| format!("{:.2}", s.mean)).collect();
    outcome(
        ok,
        format!(
            "30 runs, N=15 K=5, U={:?}; data kbps: {}; frame_optimal infeasible fraction [{}]{}",
            cfg.volte_sweep,
            parts.join(", "),
            fr.join(" "),
            if m { "" } else { " NOT monotone" }
        ),
    )
}

fn c9_pf_fairness() -> Outcome {
    let recs = trend_records();
    let jain = |p| series(recs, p, 10, |r| r.metrics.jain.unwrap());
    let total = |p| series(recs, p, 10, |r| r.metrics.total_bits_per_frame);
    let (pf, mt) = (jain(Policy::HeuristicPf), jain(Policy::Heuristic));
    let wins = pf.iter().zip(&mt).filter(|(a, b)| a > b).count();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (tp, tm) = (mean(&total(Policy::HeuristicPf)), mean(&total(Policy::Heuristic)));
    let pass = mean(&pf) > mean(&mt) && wins * 10 >= pf.len() * 8 && tp <= tm;
    outcome(
        pass,
        format!(
            "U=10: mean Jain {:.3} (PF) vs {:.3}; PF fairer in {wins}/{} runs; total kbps {:.0} (PF) vs {:.0}",
            mean(&pf),
            mean(&mt),
            pf.len(),
            tp * 0.05,
            tm * 0.05
        ),
    )
}

// 10 -----------------------------------------------------------------------

fn c10_saturation() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        bandwidth: Bandwidth::Mhz10,
        num_data: 50,
        volte_sweep: (0..=600).step_by(50).collect(),
        policies: vec![Policy::Heuristic],
        runs: 30,
        ..ExperimentConfig::default()
    };
    let recs = run_experiment(&cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let volte: Vec<Stat> = cfg
        .volte_sweep
        .iter()
        .map(|&u| Stat::of(&series(&recs, Policy::Heuristic, u, |r| r.metrics.volte_bits_per_frame * 0.05)).unwrap())
        .collect();
    let outage: Vec<f64> = cfg
        .volte_sweep
        .iter()
        .map(|&u| {
            let v = series(&recs, Policy::Heuristic, u, |r| r.metrics.outage.unwrap_or(0.0));
            v.iter().sum::<f64>() / v.len() as f64
        })
        .collect();
    let deltas: Vec<f64> = volte.windows(2).map(|w| w[1].mean - w[0].mean).collect();
    // Knee: where growth first falls below 90% of the initial slope.
    let knee = deltas.iter().position(|&d| d < 0.9 * deltas[0]);
    let tol = |i: usize| volte[i].sem() + volte[i + 1].sem();
    let increasing = (0..volte.len() - 1).all(|i| volte[i + 1].mean >= volte[i].mean - tol(i));
    let concave = (0..deltas.len() - 1).all(|i| deltas[i + 1] <= deltas[i] + tol(i) + tol(i + 1));
    let (flat, spread) = match knee {
        Some(k) if volte.len() - k >= 2 => {
            let tail: Vec<f64> = volte[k..].iter().map(|s| s.mean).collect();
            let hi = tail.iter().cloned().fold(f64::MIN, f64::max);
            let lo = tail.iter().cloned().fold(f64::MAX, f64::min);
            let spread = (hi - lo) / hi;
            (spread <= 0.05, spread)
        }
        _ => (false, f64::NAN),
    };
    let curve: Vec<String> = cfg
        .volte_sweep
        .iter()
        .zip(&volte)
        .map(|(u, s)| format!("{u}:{:.0}", s.mean))
        .collect();
    outcome(
        increasing && concave && flat && secs < 600.0,
        format!(
            "N=50 K=50, 30 runs, {secs:.0} s; VoLTE kbps {}; knee {}; increasing {increasing}, concave {concave}, \
             spread beyond knee {:.1}% (limit 5%); outage at U=600 {:.3}",
            curve.join(" "),
            knee.map_or("none".to_string(), |k| format!("U={}", cfg.volte_sweep[k])),
            spread * 100.0,
            outage[outage.len() - 1]
        ),
    )
}

// 11 -----------------------------------------------------------------------

const OPS_CONSTANT: f64 = 2.0;

fn c11_heuristic_cost() -> Outcome {
    let mut ratios = Vec::new();
    for bw in [Bandwidth::Mhz1_4, Bandwidth::Mhz3, Bandwidth::Mhz10] {
        for u in [10, 100, 400] {
            for k in [5, 50] {
                let cfg = ExperimentConfig {
                    bandwidth: bw,
                    num_data: k,
                    ..ExperimentConfig::default()
                };
                let s = build_scenario(&cfg, u, 0).unwrap();
                let n = bw.num_prb() as f64;
                for p in [Policy::Heuristic, Policy::HeuristicPf, Policy::Baseline] {
                    let (_, st) = run_frame(&s.frames[0], u, k, p, &frame_options(&cfg), None).unwrap();
                    ratios.push(st.ops as f64 / (FRAME_TTIS as f64 * n * (u + k) as f64 + FRAME_TTIS as f64 * n * n));
                }
            }
        }
    }
    let c = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);

    let cfg = ExperimentConfig {
        bandwidth: Bandwidth::Mhz10,
        num_data: 50,
        frames: 5,
        ..ExperimentConfig::default()
    };
    let s = build_scenario(&cfg, 600, 0).unwrap();
    let mut times: Vec<f64> = s
        .frames
        .iter()
        .map(|bits| {
            let t = Instant::now();
            run_frame(bits, 600, 50, Policy::Heuristic, &frame_options(&cfg), None).unwrap();
            t.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    times.sort_by(f64::total_cmp);
    let median = times[times.len() / 2];
    outcome(
        c <= OPS_CONSTANT && median < 50.0,
        format!(
            "ops / (T*N*(U+K+N)) in [{lo:.3}, {c:.3}] over 18 grid points x 3 heuristics (c = {OPS_CONSTANT}); \
             N=50 U=600 K=50 frame: median {median:.2} ms"
        ),
    )
}

// 12 -----------------------------------------------------------------------

fn scratch_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("volte-acceptance-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn cli_outputs(config: &Path, out: &Path) -> Vec<(String, Vec<u8>)> {
    let status = Command::new(env!("CARGO_BIN_EXE_volte-sim"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let mut files: Vec<(String, Vec<u8>)> = ["results.csv", "summary.csv"]
        .iter()
        .map(|f| f.to_string())
        .chain(["throughput", "outage", "fairness", "infeasibility"].iter().map(|f| format!("plotdata/{f}.csv")))
        .map(|f| {
            let bytes = std::fs::read(out.join(&f)).unwrap();
            (f, bytes)
        })
        .collect();
    files.sort();
    files
}

fn c12_determinism() -> Outcome {
    let dir = scratch_dir("det");
    let configs = [
        "bandwidth = 1.4\nnum_data = 3\nvolte_sweep = 0:8:4\nruns = 3\nseed = 11\n\
         policies = frame_optimal,tti_optimal,tti_optimal_pf,heuristic,heuristic_pf,baseline\n",
        "bandwidth = 3\nnum_data = 4\nvolte_sweep = 2,6\nruns = 2\nframes = 2\nseed = 99\n\
         per_tti_fading = true\nstrict_pseudocode = true\nnode_limit = 500\n\
         policies = frame_optimal,tti_optimal_pf,heuristic_pf,baseline\n",
    ];
    let mut identical = true;
    let mut compared = 0;
    for (i, text) in configs.iter().enumerate() {
        let path = dir.join(format!("c{i}.cfg"));
        std::fs::write(&path, text).unwrap();
        let a = cli_outputs(&path, &dir.join(format!("a{i}")));
        let b = cli_outputs(&path, &dir.join(format!("b{i}")));
        identical &= a == b;
        compared += a.len();

        let mut cfg = ExperimentConfig::default();
        cfg.apply_str(text).unwrap();
        let bytes = |recs: Vec<RunRecord>| {
            let rows: Vec<ResultRow> = recs.iter().map(|r| ResultRow::from_record(&cfg, r)).collect();
            let mut buf = Vec::new();
            write_results(&mut buf, &rows).unwrap();
            buf
        };
        let lib = bytes(run_experiment(&cfg).unwrap());
        identical &= lib == a.iter().find(|f| f.0 == "results.csv").unwrap().1;
        identical &= lib == bytes(run_experiment(&cfg).unwrap());
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        identical,
        format!("2 configs x 2 CLI executions: {compared} CSV files compared, plus in-process reruns; identical: {identical}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("rate-map exactness", c1_rate_map),
        ("oracle equivalence", c2_oracle_equivalence),
        ("relaxation sandwich", c3_relaxation_sandwich),
        ("baseline dominance", c4_baseline_dominance),
        ("phase-1 dominance", c5_phase_one_dominance),
        ("frame bound", c6_frame_bound),
        ("VoLTE linearity", c7_volte_linearity),
        ("monotone trends", c8_monotone_trends),
        ("PF fairness gain", c9_pf_fairness),
        ("saturation trend", c10_saturation),
        ("heuristic cost", c11_heuristic_cost),
        ("determinism", c12_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let t = Instant::now();
        let o = check();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("[{tag}] {id:>2}. {name} ({:.1} s): {}", t.elapsed().as_secs_f64(), o.detail);
        if !o.pass && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
