//! Batch evaluation over many random deployments.
//!
//! Deployment `k` of an experiment uses seed `base_seed + k`, so any single
//! deployment can be regenerated in isolation. Deployments are independent
//! work items and results are keyed by index, which makes the output
//! identical for every worker count.

mod cdf;
pub mod output;

pub use cdf::EmpiricalCdf;

use rayon::prelude::*;
use serde::Serialize;

use crate::deployment::{generate_deployment, ScenarioConfig};
use crate::error::{Error, Result};
use crate::mode::{Mode, PowerPolicy};
use crate::simulator::Simulator;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    /// Geometry template; its `seed` is replaced per deployment.
    pub scenario_template: ScenarioConfig,
    pub num_deployments: usize,
    pub modes: Vec<Mode>,
    pub power_policy: PowerPolicy,
    pub base_seed: u64,
    /// 0 uses every available core.
    pub worker_count: usize,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_deployments == 0 {
            return Err(Error::Config("num_deployments must be at least 1".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::Config(
                "an experiment needs at least one mode".into(),
            ));
        }
        self.scenario_template.validate()
    }

    pub fn seed_for(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }
}

/// Base seed of the sweep curve with `num_aps` APs.
///
/// Curves with different AP counts draw disjoint seed ranges (for fewer than
/// 2^32 deployments each); the fixed and variable power curves of one AP
/// count share seeds, so they are evaluated on the same deployments.
pub fn curve_base_seed(base_seed: u64, num_aps: usize) -> u64 {
    base_seed.wrapping_add((num_aps as u64) << 32)
}

/// Per-deployment outcome. Fields are `None` for modes that were not run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeploymentRecord {
    pub index: usize,
    pub seed: u64,
    pub num_aps: usize,
    pub num_stas: usize,
    pub ncmap_mbps: Option<f64>,
    pub ctdma_mbps: Option<f64>,
    pub ctdma_sr_mbps: Option<f64>,
    pub gain_ctdma_pct: Option<f64>,
    pub gain_ctdma_sr_pct: Option<f64>,
    pub txop_ctdma_us: Option<f64>,
    pub txop_ctdma_sr_us: Option<f64>,
    pub ctdma_sr_slots: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discard {
    pub index: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    NcMapMbps,
    CTdmaMbps,
    CTdmaSrMbps,
    GainCTdmaPct,
    GainCTdmaSrPct,
    TxopCTdmaUs,
    TxopCTdmaSrUs,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::NcMapMbps,
        Metric::CTdmaMbps,
        Metric::CTdmaSrMbps,
        Metric::GainCTdmaPct,
        Metric::GainCTdmaSrPct,
        Metric::TxopCTdmaUs,
        Metric::TxopCTdmaSrUs,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Metric::NcMapMbps => "ncmap_mbps",
            Metric::CTdmaMbps => "ctdma_mbps",
            Metric::CTdmaSrMbps => "ctdma_sr_mbps",
            Metric::GainCTdmaPct => "gain_ctdma_pct",
            Metric::GainCTdmaSrPct => "gain_ctdma_sr_pct",
            Metric::TxopCTdmaUs => "txop_ctdma_us",
            Metric::TxopCTdmaSrUs => "txop_ctdma_sr_us",
        }
    }

    pub fn of(self, r: &DeploymentRecord) -> Option<f64> {
        match self {
            Metric::NcMapMbps => r.ncmap_mbps,
            Metric::CTdmaMbps => r.ctdma_mbps,
            Metric::CTdmaSrMbps => r.ctdma_sr_mbps,
            Metric::GainCTdmaPct => r.gain_ctdma_pct,
            Metric::GainCTdmaSrPct => r.gain_ctdma_sr_pct,
            Metric::TxopCTdmaUs => r.txop_ctdma_us,
            Metric::TxopCTdmaSrUs => r.txop_ctdma_sr_us,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResults {
    pub spec: ExperimentSpec,
    /// Retained deployments in index order.
    pub records: Vec<DeploymentRecord>,
    pub discarded: Vec<Discard>,
}

impl ExperimentResults {
    pub fn samples(&self, metric: Metric) -> Vec<f64> {
        self.records.iter().filter_map(|r| metric.of(r)).collect()
    }

    /// `None` when the metric was not computed in this experiment.
    pub fn cdf(&self, metric: Metric) -> Option<EmpiricalCdf> {
        EmpiricalCdf::new(&self.samples(metric)).ok()
    }

    pub fn available_metrics(&self) -> Vec<Metric> {
        Metric::ALL
            .into_iter()
            .filter(|m| self.records.first().and_then(|r| m.of(r)).is_some())
            .collect()
    }
}

/// Evaluates one deployment of the experiment.
pub fn run_one(spec: &ExperimentSpec, sim: &Simulator, index: usize) -> Result<DeploymentRecord> {
    let seed = spec.seed_for(index);
    let scenario = ScenarioConfig {
        seed,
        ..spec.scenario_template.clone()
    };
    let dep = generate_deployment(&scenario)?;
    let eval = sim.evaluate(&dep, &spec.modes, spec.power_policy)?;
    let mbps = |m: Mode| eval.report(m).map(|r| r.aggregate_mbps);
    let txop = |m: Mode| eval.report(m).and_then(|r| r.txop_duration_us);
    Ok(DeploymentRecord {
        index,
        seed,
        num_aps: dep.num_aps(),
        num_stas: dep.num_stas(),
        ncmap_mbps: mbps(Mode::NcMap),
        ctdma_mbps: mbps(Mode::CTdma),
        ctdma_sr_mbps: mbps(Mode::CTdmaSr),
        gain_ctdma_pct: eval.gain_vs_ncmap(Mode::CTdma),
        gain_ctdma_sr_pct: eval.gain_vs_ncmap(Mode::CTdmaSr),
        txop_ctdma_us: txop(Mode::CTdma),
        txop_ctdma_sr_us: txop(Mode::CTdmaSr),
        ctdma_sr_slots: eval
            .report(Mode::CTdmaSr)
            .and_then(|r| r.num_coordinated_slots),
    })
}

pub fn run_experiment(spec: &ExperimentSpec, sim: &Simulator) -> Result<ExperimentResults> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.worker_count)
        .build()
        .map_err(|e| Error::Experiment(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<DeploymentRecord>> = pool.install(|| {
        (0..spec.num_deployments)
            .into_par_iter()
            .map(|i| run_one(spec, sim, i))
            .collect()
    });

    let mut records = Vec::with_capacity(outcomes.len());
    let mut discarded = Vec::new();
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => {
                let seed = spec.seed_for(index);
                log::warn!("discarding deployment {index} (seed {seed}): {e}");
                discarded.push(Discard {
                    index,
                    seed,
                    reason: e.to_string(),
                });
            }
        }
    }
    if records.is_empty() {
        return Err(Error::Experiment(format!(
            "all {} deployments were discarded; first reason: {}",
            discarded.len(),
            discarded.first().map_or("none", |d| d.reason.as_str())
        )));
    }
    Ok(ExperimentResults {
        spec: spec.clone(),
        records,
        discarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimConfig;

    fn spec(n: usize, workers: usize) -> ExperimentSpec {
        ExperimentSpec {
            scenario_template: ScenarioConfig {
                num_aps: 2,
                stas_per_ap: 2,
                ..Default::default()
            },
            num_deployments: n,
            modes: Mode::ALL.to_vec(),
            power_policy: PowerPolicy::Variable,
            base_seed: 40,
            worker_count: workers,
        }
    }

    #[test]
    fn seeds_follow_index() {
        let res = run_experiment(&spec(5, 1), &Simulator::default()).unwrap();
        let seeds: Vec<u64> = res.records.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![40, 41, 42, 43, 44]);
    }

    #[test]
    fn single_deployment() {
        let res = run_experiment(&spec(1, 1), &Simulator::default()).unwrap();
        assert_eq!(res.records.len(), 1);
        let cdf = res.cdf(Metric::GainCTdmaSrPct).unwrap();
        assert_eq!(cdf.percentile(5.0), cdf.percentile(95.0));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let a = run_experiment(&spec(12, 1), &Simulator::default()).unwrap();
        let b = run_experiment(&spec(12, 3), &Simulator::default()).unwrap();
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn all_discarded_is_an_error() {
        let mut cfg = SimConfig::default();
        cfg.radio.noise_floor_dbm = 0.0;
        let sim = Simulator::from_config(&cfg).unwrap();
        match run_experiment(&spec(3, 1), &sim) {
            Err(Error::Experiment(msg)) => assert!(msg.contains("3 deployments")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn only_requested_modes_are_recorded() {
        let mut s = spec(2, 1);
        s.modes = vec![Mode::CTdma];
        let res = run_experiment(&s, &Simulator::default()).unwrap();
        assert!(res
            .records
            .iter()
            .all(|r| r.ncmap_mbps.is_none() && r.ctdma_mbps.is_some()));
        assert_eq!(
            res.available_metrics(),
            vec![Metric::CTdmaMbps, Metric::TxopCTdmaUs]
        );
    }

    #[test]
    fn invalid_spec() {
        assert!(run_experiment(&spec(0, 1), &Simulator::default()).is_err());
        let mut s = spec(1, 1);
        s.modes.clear();
        assert!(run_experiment(&s, &Simulator::default()).is_err());
    }
}
