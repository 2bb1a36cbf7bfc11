//! Monte-Carlo driver.
//!
//! Seeds: every user has its own stream. User `i` of class `c` (0 = VoLTE,
//! 1 = data) in run `r` is dropped with `mix_seed(seed, [r, c, i])`, and
//! its fading in frame `f` (TTI `t` with per-TTI fading) is drawn from
//! `mix_seed(seed, [r, c, i, 1 + f])` (`[.., 1 + f, t]`). Runs are
//! independent; within a run, a sweep point with more VoLTE users keeps all
//! the users of the smaller points, so curves over `U` use common random
//! numbers.

use rayon::prelude::*;
use volte_core::channel::{
    build_topology, compute_sinr_matrix, draw_fading, links_per_user, bits_matrix, mix_seed, BitsMatrix,
    FadingGains, PowerDelayProfile, SinrMatrix, Topology,
};
use volte_core::metrics::RunMetrics;
use volte_core::sched::{run_frame, FrameAllocation, FrameOptions, Policy, FRAME_TTIS};

use crate::config::ExperimentConfig;
use crate::error::SimError;

const VOLTE_CLASS: u64 = 0;
const DATA_CLASS: u64 = 1;

/// Channel realisations of one (U, run) pair, shared by all policies.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub num_volte: usize,
    pub num_data: usize,
    pub run: usize,
    /// Seed reported for the run: `mix_seed(seed, [run])`.
    pub seed: u64,
    pub topology: Topology,
    /// Per frame: one bits matrix, or one per TTI.
    pub frames: Vec<Vec<BitsMatrix>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub policy: Policy,
    pub num_volte: usize,
    pub run: usize,
    pub seed: u64,
    pub metrics: RunMetrics,
    pub solver_nodes: u64,
    pub solver_timeouts: u64,
    pub ops: u64,
}

fn user_key(run: usize, volte: bool, index: usize) -> [u64; 3] {
    [run as u64, if volte { VOLTE_CLASS } else { DATA_CLASS }, index as u64]
}

fn user_order(num_volte: usize, num_data: usize) -> impl Iterator<Item = (bool, usize)> {
    (0..num_volte).map(|i| (true, i)).chain((0..num_data).map(|k| (false, k)))
}

/// Drops the users of one run.
pub fn build_run_topology(cfg: &ExperimentConfig, num_volte: usize, run: usize) -> Result<Topology, SimError> {
    let mut topo = build_topology(0, 0, 0, cfg.cell_radius_m, cfg.pathloss_exponent)?;
    for (volte, i) in user_order(num_volte, cfg.num_data) {
        let seed = mix_seed(cfg.seed, &user_key(run, volte, i));
        let one = build_topology(seed, usize::from(volte), usize::from(!volte), cfg.cell_radius_m, cfg.pathloss_exponent)?;
        topo.users.extend(one.users);
    }
    Ok(topo)
}

/// SINR for one fading draw. `path` identifies the draw within a user's
/// stream.
pub fn draw_sinr(
    cfg: &ExperimentConfig,
    topology: &Topology,
    num_volte: usize,
    run: usize,
    path: &[u64],
) -> Result<SinrMatrix, SimError> {
    let n_prb = cfg.num_prb();
    let links = links_per_user(topology);
    let profile = PowerDelayProfile::etu();
    let mut gains = Vec::with_capacity(topology.users.len() * links * n_prb);
    for (volte, i) in user_order(num_volte, cfg.num_data) {
        let mut key = user_key(run, volte, i).to_vec();
        key.extend_from_slice(path);
        let f = draw_fading(mix_seed(cfg.seed, &key), &profile, n_prb, links)?;
        for l in 0..links {
            gains.extend_from_slice(f.link(l));
        }
    }
    let fading = FadingGains::from_vec(n_prb, topology.users.len() * links, gains)?;
    Ok(compute_sinr_matrix(topology, &fading, &cfg.radio)?)
}

pub fn build_scenario(cfg: &ExperimentConfig, num_volte: usize, run: usize) -> Result<Scenario, SimError> {
    let topology = build_run_topology(cfg, num_volte, run)?;
    let mut frames = Vec::with_capacity(cfg.frames);
    for f in 0..cfg.frames as u64 {
        let frame = if cfg.per_tti_fading {
            (0..FRAME_TTIS as u64)
                .map(|t| Ok(bits_matrix(&draw_sinr(cfg, &topology, num_volte, run, &[1 + f, t])?)))
                .collect::<Result<Vec<_>, SimError>>()?
        } else {
            vec![bits_matrix(&draw_sinr(cfg, &topology, num_volte, run, &[1 + f])?)]
        };
        frames.push(frame);
    }
    Ok(Scenario {
        num_volte,
        num_data: cfg.num_data,
        run,
        seed: mix_seed(cfg.seed, &[run as u64]),
        topology,
        frames,
    })
}

pub fn frame_options(cfg: &ExperimentConfig) -> FrameOptions {
    FrameOptions {
        num_tti: FRAME_TTIS,
        gamma: cfg.gamma,
        strict_pseudocode: cfg.strict_pseudocode,
        node_limit: cfg.node_limit,
    }
}

/// Runs every frame of a scenario under one policy. PF averages carry over
/// from frame to frame.
pub fn run_policy(
    cfg: &ExperimentConfig,
    scenario: &Scenario,
    policy: Policy,
) -> Result<(RunRecord, Vec<FrameAllocation>), SimError> {
    let opts = frame_options(cfg);
    let mut pf = None;
    let mut allocations = Vec::with_capacity(scenario.frames.len());
    let (mut nodes, mut timeouts, mut ops) = (0, 0, 0);
    for bits in &scenario.frames {
        let (a, state) = run_frame(bits, scenario.num_volte, scenario.num_data, policy, &opts, pf)?;
        nodes += state.solver_nodes;
        timeouts += state.solver_timeouts;
        ops += state.ops;
        pf = Some(state.pf_avg);
        allocations.push(a);
    }
    let metrics = RunMetrics::from_frames(&allocations, scenario.num_volte)?;
    let record = RunRecord {
        policy,
        num_volte: scenario.num_volte,
        run: scenario.run,
        seed: scenario.seed,
        metrics,
        solver_nodes: nodes,
        solver_timeouts: timeouts,
        ops,
    };
    Ok((record, allocations))
}

/// Runs the whole sweep. Records come back sorted by policy (config
/// order), U and run, whatever the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>, SimError> {
    cfg.validate()?;
    cfg.check_caps()?;
    let jobs: Vec<(usize, usize)> = cfg
        .volte_sweep
        .iter()
        .flat_map(|&u| (0..cfg.runs).map(move |r| (u, r)))
        .collect();
    let per_job: Vec<Vec<RunRecord>> = jobs
        .par_iter()
        .map(|&(u, r)| {
            let s = build_scenario(cfg, u, r)?;
            cfg.policies
                .iter()
                .map(|&p| run_policy(cfg, &s, p).map(|x| x.0))
                .collect::<Result<Vec<_>, SimError>>()
        })
        .collect::<Result<_, SimError>>()?;
    let rank = |p: Policy| cfg.policies.iter().position(|&q| q == p).unwrap_or(usize::MAX);
    let mut records: Vec<RunRecord> = per_job.into_iter().flatten().collect();
    records.sort_by_key(|r| (rank(r.policy), r.num_volte, r.run));
    Ok(records)
}
