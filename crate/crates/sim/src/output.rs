//! CSV formats: per-run results, per-point summaries, plot families and
//! inspection dumps.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use volte_core::channel::{cqi_matrix, BitsMatrix, SinrMatrix};
use volte_core::metrics::{aggregate_runs, frame_bits_to_kbps, Stat};
use volte_core::ratemap::{prbs_for_voice_packet, MCS_TABLE};
use volte_core::sched::{FrameAllocation, Policy};

use crate::config::ExperimentConfig;
use crate::error::SimError;
use crate::experiment::RunRecord;

pub const RESULT_COLUMNS: [&str; 12] = [
    "policy",
    "bandwidth_mhz",
    "N",
    "U",
    "K",
    "seed",
    "volte_kbps",
    "data_kbps",
    "total_kbps",
    "jain",
    "outage",
    "infeasible",
];

fn num(v: f64) -> String {
    format!("{v:.6}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// One row of the per-run results file.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub policy: String,
    pub bandwidth_mhz: String,
    pub num_prb: usize,
    pub num_volte: usize,
    pub num_data: usize,
    pub seed: u64,
    pub volte_kbps: f64,
    pub data_kbps: f64,
    pub total_kbps: f64,
    pub jain: Option<f64>,
    pub outage: Option<f64>,
    /// Only set for the frame-level policy.
    pub infeasible: Option<f64>,
}

impl ResultRow {
    pub fn from_record(cfg: &ExperimentConfig, r: &RunRecord) -> Self {
        let m = &r.metrics;
        ResultRow {
            policy: r.policy.name().to_string(),
            bandwidth_mhz: cfg.bandwidth.to_string(),
            num_prb: cfg.num_prb(),
            num_volte: r.num_volte,
            num_data: cfg.num_data,
            seed: r.seed,
            volte_kbps: frame_bits_to_kbps(m.volte_bits_per_frame),
            data_kbps: frame_bits_to_kbps(m.data_bits_per_frame),
            total_kbps: frame_bits_to_kbps(m.total_bits_per_frame),
            jain: m.jain,
            outage: m.outage,
            infeasible: (r.policy == Policy::FrameOptimal).then_some(m.infeasible_fraction),
        }
    }

    fn fields(&self) -> [String; 12] {
        [
            self.policy.clone(),
            self.bandwidth_mhz.clone(),
            self.num_prb.to_string(),
            self.num_volte.to_string(),
            self.num_data.to_string(),
            self.seed.to_string(),
            num(self.volte_kbps),
            num(self.data_kbps),
            num(self.total_kbps),
            opt(self.jain),
            opt(self.outage),
            opt(self.infeasible),
        ]
    }
}

pub fn write_results<W: Write>(out: W, rows: &[ResultRow]) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_COLUMNS)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(|e| SimError::io("<results>", e))?;
    Ok(())
}

pub fn read_results<R: Read>(input: R) -> Result<Vec<ResultRow>, SimError> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers()?.clone();
    if headers.iter().ne(RESULT_COLUMNS) {
        return Err(SimError::Results(format!("unexpected header `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let bad = |col: &str| SimError::Results(format!("row {}: bad `{col}`", i + 1));
        let req = |j: usize| -> Result<f64, SimError> { rec[j].parse().map_err(|_| bad(RESULT_COLUMNS[j])) };
        let optional = |j: usize| -> Result<Option<f64>, SimError> {
            match &rec[j] {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(RESULT_COLUMNS[j])),
            }
        };
        let int = |j: usize| -> Result<usize, SimError> { rec[j].parse().map_err(|_| bad(RESULT_COLUMNS[j])) };
        rows.push(ResultRow {
            policy: rec[0].to_string(),
            bandwidth_mhz: rec[1].to_string(),
            num_prb: int(2)?,
            num_volte: int(3)?,
            num_data: int(4)?,
            seed: rec[5].parse().map_err(|_| bad("seed"))?,
            volte_kbps: req(6)?,
            data_kbps: req(7)?,
            total_kbps: req(8)?,
            jain: optional(9)?,
            outage: optional(10)?,
            infeasible: optional(11)?,
        });
    }
    Ok(rows)
}

/// Mean and sample standard deviation per (policy, U), in kbps.
pub fn write_summary<W: Write>(out: W, cfg: &ExperimentConfig, records: &[RunRecord]) -> Result<(), SimError> {
    let mut groups: Vec<((Policy, usize), Vec<_>)> = Vec::new();
    for r in records {
        match groups.last_mut() {
            Some((key, v)) if *key == (r.policy, r.num_volte) => v.push(r.metrics.clone()),
            _ => groups.push(((r.policy, r.num_volte), vec![r.metrics.clone()])),
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "policy",
        "bandwidth_mhz",
        "N",
        "U",
        "K",
        "runs",
        "volte_kbps_mean",
        "volte_kbps_std",
        "data_kbps_mean",
        "data_kbps_std",
        "total_kbps_mean",
        "total_kbps_std",
        "jain_mean",
        "jain_std",
        "outage_mean",
        "outage_std",
        "infeasible_mean",
        "infeasible_std",
    ])?;
    for ((policy, u), runs) in &groups {
        let a = aggregate_runs(runs)?;
        let kbps = |s: Stat| [num(frame_bits_to_kbps(s.mean)), num(frame_bits_to_kbps(s.std))];
        let pair = |s: Option<Stat>| match s {
            Some(s) => [num(s.mean), num(s.std)],
            None => [String::new(), String::new()],
        };
        let infeasible = (*policy == Policy::FrameOptimal).then_some(a.infeasible_fraction);
        let mut rec = vec![
            policy.name().to_string(),
            cfg.bandwidth.to_string(),
            cfg.num_prb().to_string(),
            u.to_string(),
            cfg.num_data.to_string(),
            a.runs.to_string(),
        ];
        rec.extend(kbps(a.volte_bits_per_frame));
        rec.extend(kbps(a.data_bits_per_frame));
        rec.extend(kbps(a.total_bits_per_frame));
        rec.extend(pair(a.jain));
        rec.extend(pair(a.outage));
        rec.extend(pair(infeasible));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| SimError::io("<summary>", e))?;
    Ok(())
}

/// Figure families derived from the results file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotFamily {
    Throughput,
    Outage,
    Fairness,
    Infeasibility,
}

impl PlotFamily {
    pub const ALL: [PlotFamily; 4] = [
        PlotFamily::Throughput,
        PlotFamily::Outage,
        PlotFamily::Fairness,
        PlotFamily::Infeasibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlotFamily::Throughput => "throughput",
            PlotFamily::Outage => "outage",
            PlotFamily::Fairness => "fairness",
            PlotFamily::Infeasibility => "infeasibility",
        }
    }
}

impl std::str::FromStr for PlotFamily {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        PlotFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| SimError::UnknownFamily(s.to_string()))
    }
}

type PointKey = (String, String, usize, usize, usize);

fn stat_cells(values: &[f64]) -> [String; 2] {
    match Stat::of(values) {
        Some(s) => [num(s.mean), num(s.sem())],
        None => [String::new(), String::new()],
    }
}

/// Tidy per-figure table: one row per (policy, bandwidth, K, U) with means
/// and standard errors. Points without data for the family are skipped.
pub fn emit_plotdata<W: Write>(out: W, rows: &[ResultRow], family: PlotFamily) -> Result<(), SimError> {
    let mut points: BTreeMap<PointKey, Vec<&ResultRow>> = BTreeMap::new();
    let mut order: Vec<PointKey> = Vec::new();
    for r in rows {
        let key = (r.policy.clone(), r.bandwidth_mhz.clone(), r.num_prb, r.num_data, r.num_volte);
        let entry = points.entry(key.clone()).or_default();
        if entry.is_empty() {
            order.push(key);
        }
        entry.push(r);
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["policy", "bandwidth_mhz", "N", "K", "U", "runs"];
    match family {
        PlotFamily::Throughput => header.extend([
            "volte_kbps_mean",
            "volte_kbps_sem",
            "data_kbps_mean",
            "data_kbps_sem",
            "total_kbps_mean",
            "total_kbps_sem",
        ]),
        PlotFamily::Outage => header.extend(["outage_mean", "outage_sem"]),
        PlotFamily::Fairness => header.extend(["jain_mean", "jain_sem"]),
        PlotFamily::Infeasibility => header.extend(["infeasible_mean", "infeasible_sem"]),
    }
    w.write_record(&header)?;
    for key in &order {
        let group = &points[key];
        let col = |f: fn(&ResultRow) -> Option<f64>| group.iter().filter_map(|r| f(r)).collect::<Vec<f64>>();
        let values: Vec<Vec<f64>> = match family {
            PlotFamily::Throughput => vec![
                col(|r| Some(r.volte_kbps)),
                col(|r| Some(r.data_kbps)),
                col(|r| Some(r.total_kbps)),
            ],
            PlotFamily::Outage => vec![col(|r| r.outage)],
            PlotFamily::Fairness => vec![col(|r| r.jain)],
            PlotFamily::Infeasibility => vec![col(|r| r.infeasible)],
        };
        if values[0].is_empty() {
            continue;
        }
        let mut rec = vec![
            key.0.clone(),
            key.1.clone(),
            key.2.to_string(),
            key.3.to_string(),
            key.4.to_string(),
            values[0].len().to_string(),
        ];
        for v in &values {
            rec.extend(stat_cells(v));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| SimError::io("<plotdata>", e))?;
    Ok(())
}

/// The CQI table with derived per-PRB capacities.
pub fn write_rate_table<W: Write>(out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "cqi",
        "modulation",
        "modulation_order",
        "code_rate_x1024",
        "sinr_threshold_db",
        "bits_per_prb",
        "prbs_per_voice_packet",
    ])?;
    for e in &MCS_TABLE {
        let modulation = match e.modulation_order {
            2 => "QPSK",
            4 => "16QAM",
            _ => "64QAM",
        };
        w.write_record([
            e.cqi.to_string(),
            modulation.to_string(),
            e.modulation_order.to_string(),
            e.code_rate_x1024.to_string(),
            format!("{:.3}", e.sinr_threshold_db),
            e.bits_per_prb().to_string(),
            prbs_for_voice_packet(e.cqi).map(|m| m.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| SimError::io("<rate table>", e))?;
    Ok(())
}

/// Long-format channel dump: one row per (TTI, PRB, user).
pub fn write_channel<W: Write>(out: W, num_volte: usize, sinr: &[SinrMatrix]) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tti", "prb", "user", "kind", "sinr_db", "cqi", "bits"])?;
    for (t, s) in sinr.iter().enumerate() {
        let cqi = cqi_matrix(s);
        let bits: BitsMatrix = volte_core::channel::bits_matrix(s);
        for n in 0..s.num_prb() {
            for u in 0..s.num_users() {
                w.write_record([
                    t.to_string(),
                    n.to_string(),
                    u.to_string(),
                    if u < num_volte { "volte" } else { "data" }.to_string(),
                    format!("{:.3}", s.get(n, u)),
                    cqi[n * s.num_users() + u].to_string(),
                    bits.get(n, u).to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| SimError::io("<channel>", e))?;
    Ok(())
}

/// `tti, prb, user, bits` for every PRB of a frame; idle PRBs have an
/// empty user and 0 bits.
pub fn write_frame_allocation<W: Write>(out: W, frame: &FrameAllocation, bits: &[BitsMatrix]) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tti", "prb", "user", "bits"])?;
    for (t, a) in frame.per_tti.iter().enumerate() {
        let b = &bits[t % bits.len()];
        for (n, o) in a.owner.iter().enumerate() {
            let (user, got) = match o {
                Some(u) => (u.to_string(), b.get(n, *u)),
                None => (String::new(), 0),
            };
            w.write_record([t.to_string(), n.to_string(), user, got.to_string()])?;
        }
    }
    w.flush().map_err(|e| SimError::io("<frame>", e))?;
    Ok(())
}
