use crate::analysis::{gain_percent, throughput_coordinated, throughput_ncmap, ThroughputReport};
use crate::config::SimConfig;
use crate::deployment::Deployment;
use crate::error::Result;
use crate::mode::{Mode, PowerPolicy};
use crate::phy::LinkModel;
use crate::propagation::{build_rssi_matrix, check_power_levels, PathLossParams, RssiMatrix};
use crate::scheduler::{build_ctdma_schedule, build_ctdma_sr_schedule, Schedule};

/// Radio and PHY parameters needed to evaluate a deployment.
#[derive(Debug, Clone)]
pub struct Simulator {
    path_loss: PathLossParams,
    tx_power_levels_dbm: Vec<f64>,
    link: LinkModel,
}

/// Reports for the requested modes on one deployment.
#[derive(Debug, Clone, Default)]
pub struct Evaluation {
    pub ncmap: Option<ThroughputReport>,
    pub ctdma: Option<(Schedule, ThroughputReport)>,
    pub ctdma_sr: Option<(Schedule, ThroughputReport)>,
}

impl Evaluation {
    pub fn report(&self, mode: Mode) -> Option<&ThroughputReport> {
        match mode {
            Mode::NcMap => self.ncmap.as_ref(),
            Mode::CTdma => self.ctdma.as_ref().map(|(_, r)| r),
            Mode::CTdmaSr => self.ctdma_sr.as_ref().map(|(_, r)| r),
        }
    }

    /// Gain of `mode` over nc-MAP in percent, when both were evaluated.
    pub fn gain_vs_ncmap(&self, mode: Mode) -> Option<f64> {
        let base = self.ncmap.as_ref()?;
        let cand = self.report(mode)?;
        gain_percent(cand, base).ok()
    }
}

impl Simulator {
    pub fn new(
        path_loss: PathLossParams,
        tx_power_levels_dbm: Vec<f64>,
        link: LinkModel,
    ) -> Result<Self> {
        path_loss.validate()?;
        check_power_levels(&tx_power_levels_dbm)?;
        Ok(Simulator {
            path_loss,
            tx_power_levels_dbm,
            link,
        })
    }

    pub fn from_config(cfg: &SimConfig) -> Result<Self> {
        Self::new(
            cfg.radio.path_loss.clone(),
            cfg.radio.tx_power_levels_dbm.clone(),
            cfg.link_model()?,
        )
    }

    pub fn link_model(&self) -> &LinkModel {
        &self.link
    }

    pub fn tx_power_levels_dbm(&self) -> &[f64] {
        &self.tx_power_levels_dbm
    }

    pub fn rssi(&self, dep: &Deployment) -> Result<RssiMatrix> {
        build_rssi_matrix(dep, &self.path_loss, &self.tx_power_levels_dbm)
    }

    pub fn evaluate(
        &self,
        dep: &Deployment,
        modes: &[Mode],
        policy: PowerPolicy,
    ) -> Result<Evaluation> {
        let rssi = self.rssi(dep)?;
        let n = dep.num_stas();
        let mut eval = Evaluation::default();
        if modes.contains(&Mode::NcMap) {
            eval.ncmap = Some(throughput_ncmap(dep, &rssi, &self.link)?);
        }
        if modes.contains(&Mode::CTdma) {
            let s = build_ctdma_schedule(dep, &rssi, &self.link)?;
            let r = throughput_coordinated(&s, n, &self.link)?;
            eval.ctdma = Some((s, r));
        }
        if modes.contains(&Mode::CTdmaSr) {
            let s = build_ctdma_sr_schedule(dep, &rssi, &self.link, policy)?;
            let r = throughput_coordinated(&s, n, &self.link)?;
            eval.ctdma_sr = Some((s, r));
        }
        Ok(eval)
    }
}

impl Default for Simulator {
    fn default() -> Self {
        Simulator::from_config(&SimConfig::default()).expect("default configuration is valid")
    }
}
