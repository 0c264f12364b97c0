//! TGax enterprise path loss, received power and SINR.

use serde::{Deserialize, Serialize};

use crate::deployment::Deployment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossParams {
    pub breakpoint_m: f64,
    /// Applied to every link regardless of geometry.
    pub wall_count: u32,
    pub center_freq_ghz: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        PathLossParams {
            breakpoint_m: 10.0,
            wall_count: 3,
            center_freq_ghz: 5.0,
        }
    }
}

impl PathLossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.breakpoint_m.is_finite() && self.breakpoint_m > 0.0) {
            return Err(Error::Config("breakpoint_m must be positive".into()));
        }
        if !(self.center_freq_ghz.is_finite() && self.center_freq_ghz > 0.0) {
            return Err(Error::Config("center_freq_ghz must be positive".into()));
        }
        Ok(())
    }
}

/// Enterprise-scenario path loss in dB at distance `d` meters.
pub fn path_loss_db(d: f64, params: &PathLossParams) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Domain(format!(
            "path loss distance must be > 0, got {d}"
        )));
    }
    let bp = params.breakpoint_m;
    let near = 20.0 * (d.min(bp) * params.center_freq_ghz / 2.4).log10();
    let far = if d > bp { 35.0 * (d / bp).log10() } else { 0.0 };
    Ok(40.05 + near + far + 7.0 * f64::from(params.wall_count))
}

/// Thermal noise power in dBm over `bandwidth_hz` plus a receiver noise figure.
pub fn thermal_noise_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    -174.0 + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Target over interference-plus-noise, combined in milliwatts.
pub fn sinr_db(target_rssi_dbm: f64, interferer_rssis_dbm: &[f64], noise_floor_dbm: f64) -> f64 {
    if interferer_rssis_dbm.is_empty() {
        return target_rssi_dbm - noise_floor_dbm;
    }
    let denom: f64 = interferer_rssis_dbm
        .iter()
        .map(|&p| dbm_to_mw(p))
        .sum::<f64>()
        + dbm_to_mw(noise_floor_dbm);
    mw_to_dbm(dbm_to_mw(target_rssi_dbm) / denom)
}

/// Received power at every station from every AP at every allowed power.
#[derive(Debug, Clone, PartialEq)]
pub struct RssiMatrix {
    tx_power_levels_dbm: Vec<f64>,
    num_aps: usize,
    num_stas: usize,
    path_loss_db: Vec<f64>,
    rssi_dbm: Vec<f64>,
    rssi_mw: Vec<f64>,
}

impl RssiMatrix {
    #[inline]
    fn idx(&self, sta: usize, ap: usize, level: usize) -> usize {
        (sta * self.num_aps + ap) * self.tx_power_levels_dbm.len() + level
    }

    pub fn num_aps(&self) -> usize {
        self.num_aps
    }

    pub fn num_stas(&self) -> usize {
        self.num_stas
    }

    /// Allowed transmit powers, ascending.
    pub fn tx_power_levels_dbm(&self) -> &[f64] {
        &self.tx_power_levels_dbm
    }

    pub fn num_levels(&self) -> usize {
        self.tx_power_levels_dbm.len()
    }

    pub fn max_level(&self) -> usize {
        self.tx_power_levels_dbm.len() - 1
    }

    pub fn path_loss_db(&self, sta: usize, ap: usize) -> f64 {
        self.path_loss_db[sta * self.num_aps + ap]
    }

    pub fn rssi_dbm(&self, sta: usize, ap: usize, level: usize) -> f64 {
        self.rssi_dbm[self.idx(sta, ap, level)]
    }

    #[inline]
    pub fn rssi_mw(&self, sta: usize, ap: usize, level: usize) -> f64 {
        self.rssi_mw[self.idx(sta, ap, level)]
    }
}

pub fn check_power_levels(powers: &[f64]) -> Result<()> {
    if powers.is_empty() {
        return Err(Error::Config(
            "at least one transmit power level is required".into(),
        ));
    }
    if powers.iter().any(|p| !p.is_finite()) || powers.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "transmit power levels must be finite and strictly ascending, got {powers:?}"
        )));
    }
    Ok(())
}

pub fn build_rssi_matrix(
    dep: &Deployment,
    params: &PathLossParams,
    powers_dbm: &[f64],
) -> Result<RssiMatrix> {
    check_power_levels(powers_dbm)?;
    params.validate()?;
    let num_aps = dep.num_aps();
    let num_stas = dep.num_stas();
    let levels = powers_dbm.len();
    let mut pl = Vec::with_capacity(num_stas * num_aps);
    let mut rssi_dbm = Vec::with_capacity(num_stas * num_aps * levels);
    for (s, sp) in dep.sta_positions().iter().enumerate() {
        for (a, ap) in dep.ap_positions().iter().enumerate() {
            let d = sp.distance(ap);
            let loss = path_loss_db(d, params)
                .map_err(|_| Error::Domain(format!("station {s} coincides with AP {a}")))?;
            pl.push(loss);
            rssi_dbm.extend(powers_dbm.iter().map(|p| p - loss));
        }
    }
    let rssi_mw = rssi_dbm.iter().map(|&r| dbm_to_mw(r)).collect();
    Ok(RssiMatrix {
        tx_power_levels_dbm: powers_dbm.to_vec(),
        num_aps,
        num_stas,
        path_loss_db: pl,
        rssi_dbm,
        rssi_mw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::{Deployment, Point};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn p() -> PathLossParams {
        PathLossParams::default()
    }

    #[test]
    fn path_loss_reference_points() {
        assert_abs_diff_eq!(path_loss_db(0.48, &p()).unwrap(), 61.05, epsilon = 1e-9);
        assert_abs_diff_eq!(path_loss_db(3.0, &p()).unwrap(), 76.97, epsilon = 5e-3);
        assert_abs_diff_eq!(path_loss_db(12.0, &p()).unwrap(), 90.20, epsilon = 5e-3);
    }

    #[test]
    fn path_loss_domain() {
        assert!(matches!(path_loss_db(0.0, &p()), Err(Error::Domain(_))));
        assert!(path_loss_db(-1.0, &p()).is_err());
        assert!(path_loss_db(f64::NAN, &p()).is_err());
    }

    #[test]
    fn continuous_at_breakpoint() {
        let at = path_loss_db(10.0, &p()).unwrap();
        let above = path_loss_db(10.0 + 1e-9, &p()).unwrap();
        let below = path_loss_db(10.0 - 1e-9, &p()).unwrap();
        assert_abs_diff_eq!(at, above, epsilon = 1e-6);
        assert_abs_diff_eq!(at, below, epsilon = 1e-6);
    }

    #[test]
    fn thermal_noise_80mhz() {
        assert_abs_diff_eq!(thermal_noise_dbm(80e6, 7.0), -87.969, epsilon = 1e-3);
    }

    #[test]
    fn sinr_examples() {
        assert_eq!(sinr_db(-54.0, &[], -95.0), 41.0);
        assert_abs_diff_eq!(sinr_db(-54.0, &[-54.0], -300.0), 0.0, epsilon = 1e-9);
        // 1e-5 mW / (2e-6 + 10^-9.5) mW
        let oracle = 10.0 * (1e-5 / (2e-6 + 10f64.powf(-9.5))).log10();
        assert_abs_diff_eq!(
            sinr_db(-50.0, &[-60.0, -60.0], -95.0),
            oracle,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(oracle, 6.9890, epsilon = 1e-4);
    }

    fn one_ap(stas: Vec<Point>) -> Deployment {
        let n = stas.len();
        Deployment::new(6.0, 6.0, vec![Point::new(3.0, 3.0)], stas, vec![0; n]).unwrap()
    }

    #[test]
    fn rssi_matrix_composition() {
        let dep = one_ap(vec![Point::new(3.0, 4.0)]);
        let m = build_rssi_matrix(&dep, &p(), &[11.0, 23.0]).unwrap();
        let pl1 = path_loss_db(1.0, &p()).unwrap();
        assert_abs_diff_eq!(m.rssi_dbm(0, 0, 1), 23.0 - pl1, epsilon = 1e-12);
        assert_abs_diff_eq!(
            m.rssi_dbm(0, 0, 1) - m.rssi_dbm(0, 0, 0),
            12.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn mirrored_stations_see_equal_rssi() {
        let dep = one_ap(vec![Point::new(2.0, 3.0), Point::new(4.0, 3.0)]);
        let m = build_rssi_matrix(&dep, &p(), &[11.0, 17.0, 23.0]).unwrap();
        for l in 0..3 {
            assert_eq!(m.rssi_dbm(0, 0, l), m.rssi_dbm(1, 0, l));
        }
    }

    #[test]
    fn coincident_positions_fail() {
        let dep = one_ap(vec![Point::new(3.0, 3.0)]);
        assert!(matches!(
            build_rssi_matrix(&dep, &p(), &[23.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn unsorted_powers_rejected() {
        let dep = one_ap(vec![Point::new(3.0, 4.0)]);
        assert!(build_rssi_matrix(&dep, &p(), &[23.0, 11.0]).is_err());
        assert!(build_rssi_matrix(&dep, &p(), &[]).is_err());
    }

    proptest! {
        #[test]
        fn path_loss_nondecreasing(a in 1e-3f64..100.0, b in 1e-3f64..100.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(path_loss_db(lo, &p()).unwrap() <= path_loss_db(hi, &p()).unwrap());
        }

        #[test]
        fn interference_strictly_lowers_sinr(
            target in -90.0f64..-30.0,
            others in proptest::collection::vec(-100.0f64..-30.0, 0..4),
            extra in -100.0f64..-30.0,
            noise in -100.0f64..-80.0,
        ) {
            let before = sinr_db(target, &others, noise);
            let mut more = others.clone();
            more.push(extra);
            prop_assert!(sinr_db(target, &more, noise) < before);
        }

        #[test]
        fn no_interferers_is_snr(target in -100.0f64..0.0, noise in -110.0f64..-60.0) {
            prop_assert_eq!(sinr_db(target, &[], noise), target - noise);
        }
    }
}
