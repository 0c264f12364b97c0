//! Closed-form aggregate throughput, S = p_s · N_bits / E[T], for independent
//! DCF contention (nc-MAP) and for shared TXOPs (c-TDMA, c-TDMA/SR).

use serde::Serialize;

use crate::deployment::Deployment;
use crate::error::{Error, Result};
use crate::mode::Mode;
use crate::phy::LinkModel;
use crate::propagation::RssiMatrix;
use crate::scheduler::Schedule;

/// Probabilities that a backoff slot is empty, carries a success, or carries
/// a collision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotProbabilities {
    pub empty: f64,
    pub success: f64,
    pub collision: f64,
}

impl SlotProbabilities {
    /// `num_aps` saturated contenders, each transmitting with probability `tau`.
    pub fn contention(num_aps: usize, tau: f64) -> Self {
        let others_idle = (1.0 - tau).powi(num_aps as i32 - 1);
        let success = num_aps as f64 * tau * others_idle;
        let empty = (1.0 - tau).powi(num_aps as i32);
        // A lone contender cannot collide; avoid a rounding residue.
        let collision = if num_aps <= 1 {
            0.0
        } else {
            1.0 - empty - success
        };
        SlotProbabilities {
            empty,
            success,
            collision,
        }
    }

    /// Only the Sharing AP contends, so there are no collisions.
    pub fn coordinated(tau: f64) -> Self {
        SlotProbabilities {
            empty: 1.0 - tau,
            success: tau,
            collision: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputReport {
    pub mode: Mode,
    /// Aggregate throughput S in Mbps.
    pub aggregate_mbps: f64,
    /// Mean backoff slot duration E[T] in µs.
    pub expected_slot_us: f64,
    /// Bits delivered by one successful slot.
    pub bits_per_success: u64,
    pub probabilities: SlotProbabilities,
    /// Shared TXOP duration; coordinated modes only.
    pub txop_duration_us: Option<f64>,
    /// Coordinated slots per TXOP; coordinated modes only.
    pub num_coordinated_slots: Option<usize>,
}

impl ThroughputReport {
    /// S recomputed from the reported fields.
    pub fn reconstructed_mbps(&self) -> f64 {
        self.probabilities.success * self.bits_per_success as f64 / self.expected_slot_us
    }
}

/// Inputs of the uncoordinated DCF model.
#[derive(Debug, Clone, PartialEq)]
pub struct DcfModelInputs {
    pub tau: f64,
    /// `success_durations_us[m][n]`: successful slot carrying a frame from AP
    /// `m` to its `n`-th station. The outer length is the number of APs M and
    /// each inner length is N_m.
    pub success_durations_us: Vec<Vec<f64>>,
    pub empty_slot_us: f64,
    pub collision_us: f64,
    pub payload_bits: u64,
}

impl DcfModelInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::Model(format!(
                "tau must lie in (0, 1), got {}",
                self.tau
            )));
        }
        if self.success_durations_us.is_empty() {
            return Err(Error::Model("no contending APs".into()));
        }
        for (m, d) in self.success_durations_us.iter().enumerate() {
            if d.is_empty() {
                return Err(Error::Model(format!("AP {m} has no stations")));
            }
            if d.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
                return Err(Error::Model(format!(
                    "AP {m} has a non-positive slot duration"
                )));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self) -> Result<ThroughputReport> {
        self.validate()?;
        let num_aps = self.success_durations_us.len();
        let p = SlotProbabilities::contention(num_aps, self.tau);
        let per_ap_success = self.tau * (1.0 - self.tau).powi(num_aps as i32 - 1);
        let busy: f64 = self
            .success_durations_us
            .iter()
            .map(|d| per_ap_success / d.len() as f64 * d.iter().sum::<f64>())
            .sum();
        let expected_slot_us =
            p.empty * self.empty_slot_us + busy + p.collision * self.collision_us;
        Ok(ThroughputReport {
            mode: Mode::NcMap,
            aggregate_mbps: p.success * self.payload_bits as f64 / expected_slot_us,
            expected_slot_us,
            bits_per_success: self.payload_bits,
            probabilities: p,
            txop_duration_us: None,
            num_coordinated_slots: None,
        })
    }
}

/// nc-MAP: every AP contends on its own. A winner transmits alone at maximum
/// power, so each link uses its SNR-selected MCS.
pub fn throughput_ncmap(
    dep: &Deployment,
    rssi: &RssiMatrix,
    model: &LinkModel,
) -> Result<ThroughputReport> {
    let t = model.timing();
    let level = rssi.max_level();
    let mut durations = Vec::with_capacity(dep.num_aps());
    for ap in 0..dep.num_aps() {
        let mut per_sta = Vec::with_capacity(dep.stas_of(ap).len());
        for &sta in dep.stas_of(ap) {
            let snr = rssi.rssi_dbm(sta, ap, level) - model.noise_floor_dbm();
            let mcs = model.mcs_table().select(snr).ok_or_else(|| {
                Error::Model(format!(
                    "link AP {ap} -> station {sta} infeasible (SNR {snr:.2} dB)"
                ))
            })?;
            per_sta.push(model.dcf_success_us(mcs.index));
        }
        durations.push(per_sta);
    }
    DcfModelInputs {
        tau: t.tau(),
        success_durations_us: durations,
        empty_slot_us: t.t_empty_slot_us,
        collision_us: t.t_rts_us + t.t_cts_timeout_us,
        payload_bits: t.payload_bits(),
    }
    .evaluate()
}

/// Shared-TXOP throughput: one frame to each of `num_stas` stations per TXOP,
/// won by the Sharing AP alone.
pub fn throughput_coordinated(
    schedule: &Schedule,
    num_stas: usize,
    model: &LinkModel,
) -> Result<ThroughputReport> {
    if schedule.slots.is_empty() || num_stas == 0 {
        return Err(Error::Model("empty schedule".into()));
    }
    let mut covered = vec![0u32; num_stas];
    for sta in schedule.slots.iter().flat_map(|c| c.stas()) {
        match covered.get_mut(sta) {
            Some(c) => *c += 1,
            None => {
                return Err(Error::Model(format!(
                    "schedule references unknown station {sta}"
                )))
            }
        }
    }
    if let Some(sta) = covered.iter().position(|&c| c != 1) {
        return Err(Error::Model(format!(
            "station {sta} is scheduled {} times, expected once",
            covered[sta]
        )));
    }

    let t = model.timing();
    let tau = t.tau();
    let p = SlotProbabilities::coordinated(tau);
    let txop = schedule.txop_duration_us(model);
    let expected_slot_us = p.empty * t.t_empty_slot_us + p.success * txop;
    let bits = num_stas as u64 * t.payload_bits();
    Ok(ThroughputReport {
        mode: schedule.mode,
        aggregate_mbps: p.success * bits as f64 / expected_slot_us,
        expected_slot_us,
        bits_per_success: bits,
        probabilities: p,
        txop_duration_us: Some(txop),
        num_coordinated_slots: Some(schedule.num_slots()),
    })
}

/// Relative throughput change in percent.
pub fn gain_percent(candidate: &ThroughputReport, baseline: &ThroughputReport) -> Result<f64> {
    gain_percent_mbps(candidate.aggregate_mbps, baseline.aggregate_mbps)
}

pub fn gain_percent_mbps(candidate: f64, baseline: f64) -> Result<f64> {
    if baseline.is_nan() || baseline <= 0.0 {
        return Err(Error::Domain(format!(
            "baseline throughput must be > 0, got {baseline}"
        )));
    }
    Ok(100.0 * (candidate - baseline) / baseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::Mode;
    use crate::scheduler::{score_alpha, Combination, Link};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const TAU: f64 = 2.0 / 17.0;

    fn slot(model: &LinkModel, stas: &[usize], mcs: u8) -> Combination {
        let mcs_list = vec![mcs; stas.len()];
        let score = score_alpha(&mcs_list, model);
        Combination {
            links: stas
                .iter()
                .enumerate()
                .map(|(i, &sta)| Link {
                    ap: i,
                    sta,
                    power_level: 0,
                    tx_power_dbm: 23.0,
                    sinr_db: 30.0,
                    mcs,
                })
                .collect(),
            total_bits: score.total_bits,
            slot_duration_us: score.slot_duration_us,
            alpha_mbps: score.alpha_mbps,
            enum_rank: stas[0],
        }
    }

    fn schedule(model: &LinkModel, groups: &[&[usize]], mcs: u8) -> Schedule {
        Schedule {
            slots: groups.iter().map(|g| slot(model, g, mcs)).collect(),
            mode: Mode::CTdmaSr,
            covered_stas: groups.iter().flat_map(|g| g.iter().copied()).collect(),
        }
    }

    #[test]
    fn single_contender_never_collides() {
        let p = SlotProbabilities::contention(1, TAU);
        assert_eq!(p.collision, 0.0);
        assert_abs_diff_eq!(p.success, TAU, epsilon = 1e-15);
    }

    #[test]
    fn two_contenders() {
        let p = SlotProbabilities::contention(2, TAU);
        assert_abs_diff_eq!(p.success, 60.0 / 289.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.empty, 225.0 / 289.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.collision, 4.0 / 289.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.success, 0.2076, epsilon = 1e-4);
        assert_abs_diff_eq!(p.empty, 0.7785, epsilon = 1e-4);
        assert_abs_diff_eq!(p.collision, 0.0138, epsilon = 1e-4);
    }

    #[test]
    fn identical_links_collapse_to_one_duration() {
        let inputs = DcfModelInputs {
            tau: TAU,
            success_durations_us: vec![vec![200.0; 3], vec![200.0; 2]],
            empty_slot_us: 9.0,
            collision_us: 69.0,
            payload_bits: 12000,
        };
        let r = inputs.evaluate().unwrap();
        let p = SlotProbabilities::contention(2, TAU);
        let expected = p.empty * 9.0 + p.success * 200.0 + p.collision * 69.0;
        assert_abs_diff_eq!(r.expected_slot_us, expected, epsilon = 1e-12);
    }

    #[test]
    fn six_single_link_slots() {
        let m = LinkModel::default();
        let s = schedule(&m, &[&[0], &[1], &[2], &[3], &[4], &[5]], 7);
        let r = throughput_coordinated(&s, 6, &m).unwrap();
        // Hand composition of the shared-TXOP timeline.
        let txop = 80.0 + 16.0 + 62.0 + 16.0 + 6.0 * (76.0 + 16.0 + 60.8 + 16.0 + 24.0 + 34.0);
        let et = (15.0 / 17.0) * 9.0 + (2.0 / 17.0) * txop;
        assert_abs_diff_eq!(r.txop_duration_us.unwrap(), txop, epsilon = 1e-9);
        assert_abs_diff_eq!(txop, 1534.8, epsilon = 1e-9);
        assert_abs_diff_eq!(r.expected_slot_us, et, epsilon = 1e-9);
        assert_abs_diff_eq!(r.expected_slot_us, 188.51, epsilon = 5e-3);
        assert_abs_diff_eq!(
            r.aggregate_mbps,
            (2.0 / 17.0) * 72000.0 / et,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(r.aggregate_mbps, 44.935, epsilon = 5e-4);
        assert_eq!(r.num_coordinated_slots, Some(6));
    }

    #[test]
    fn three_two_link_slots_and_gain() {
        let m = LinkModel::default();
        let tdma = throughput_coordinated(
            &schedule(&m, &[&[0], &[1], &[2], &[3], &[4], &[5]], 7),
            6,
            &m,
        )
        .unwrap();
        let sr =
            throughput_coordinated(&schedule(&m, &[&[0, 3], &[1, 4], &[2, 5]], 7), 6, &m).unwrap();
        let txop = 174.0 + 3.0 * 226.8;
        assert_abs_diff_eq!(sr.txop_duration_us.unwrap(), 854.4, epsilon = 1e-9);
        let et = (15.0 / 17.0) * 9.0 + (2.0 / 17.0) * txop;
        assert_abs_diff_eq!(
            sr.aggregate_mbps,
            (2.0 / 17.0) * 72000.0 / et,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(sr.aggregate_mbps, 78.10, epsilon = 5e-3);
        let g = gain_percent(&sr, &tdma).unwrap();
        assert_abs_diff_eq!(
            g,
            100.0 * (sr.aggregate_mbps / tdma.aggregate_mbps - 1.0),
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(g, 73.80, epsilon = 5e-3);
    }

    #[test]
    fn empty_or_partial_schedule_is_an_error() {
        let m = LinkModel::default();
        let empty = Schedule {
            slots: vec![],
            mode: Mode::CTdma,
            covered_stas: vec![],
        };
        assert!(matches!(
            throughput_coordinated(&empty, 6, &m),
            Err(Error::Model(_))
        ));
        let partial = schedule(&m, &[&[0], &[1]], 7);
        assert!(throughput_coordinated(&partial, 3, &m).is_err());
    }

    #[test]
    fn gain_cases() {
        assert_eq!(gain_percent_mbps(10.0, 10.0).unwrap(), 0.0);
        assert_eq!(gain_percent_mbps(20.0, 10.0).unwrap(), 100.0);
        assert!(matches!(gain_percent_mbps(1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn ncmap_on_a_generated_deployment() {
        use crate::deployment::{generate_deployment, ScenarioConfig};
        use crate::propagation::{build_rssi_matrix, PathLossParams};
        let dep = generate_deployment(&ScenarioConfig {
            num_aps: 1,
            stas_per_ap: 1,
            seed: 3,
            ..Default::default()
        })
        .unwrap();
        let rssi = build_rssi_matrix(&dep, &PathLossParams::default(), &[23.0]).unwrap();
        let m = LinkModel::default();
        let r = throughput_ncmap(&dep, &rssi, &m).unwrap();
        assert_eq!(r.probabilities.collision, 0.0);
        let snr = rssi.rssi_dbm(0, 0, 0) - m.noise_floor_dbm();
        let mcs = m.mcs_table().select(snr).unwrap().index;
        let et = (15.0 / 17.0) * 9.0 + TAU * m.dcf_success_us(mcs);
        assert_abs_diff_eq!(r.aggregate_mbps, TAU * 12000.0 / et, epsilon = 1e-9);
        assert!((r.reconstructed_mbps() - r.aggregate_mbps).abs() <= 1e-9 * r.aggregate_mbps);
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one(m in 1usize..=8, tau in 0.01f64..0.99) {
            let p = SlotProbabilities::contention(m, tau);
            prop_assert!((p.empty + p.success + p.collision - 1.0).abs() < 1e-12);
            let c = SlotProbabilities::coordinated(tau);
            prop_assert!((c.empty + c.success + c.collision - 1.0).abs() < 1e-12);
        }

        #[test]
        fn ncmap_invariant_under_relabeling(
            durations in proptest::collection::vec(proptest::collection::vec(100.0f64..600.0, 1..4), 1..5),
            rot in 0usize..4,
        ) {
            let base = DcfModelInputs {
                tau: TAU,
                success_durations_us: durations.clone(),
                empty_slot_us: 9.0,
                collision_us: 69.0,
                payload_bits: 12000,
            };
            let mut relabeled = durations.clone();
            let k = rot % relabeled.len();
            relabeled.rotate_left(k);
            for d in &mut relabeled {
                d.reverse();
            }
            let a = base.evaluate().unwrap().aggregate_mbps;
            let b = DcfModelInputs { success_durations_us: relabeled, ..base }.evaluate().unwrap().aggregate_mbps;
            prop_assert!((a - b).abs() <= 1e-9 * a);
        }

        #[test]
        fn merging_slots_shortens_the_txop(mcs_a in 0u8..11, mcs_b in 0u8..11) {
            let m = LinkModel::default();
            let split = Schedule {
                slots: vec![slot(&m, &[0], mcs_a), slot(&m, &[1], mcs_b)],
                mode: Mode::CTdma,
                covered_stas: vec![0, 1],
            };
            let mut joint = slot(&m, &[0, 1], mcs_a);
            joint.links[1].mcs = mcs_b;
            let s = score_alpha(&[mcs_a, mcs_b], &m);
            joint.slot_duration_us = s.slot_duration_us;
            let merged = Schedule { slots: vec![joint], mode: Mode::CTdmaSr, covered_stas: vec![0, 1] };
            prop_assert!(merged.txop_duration_us(&m) < split.txop_duration_us(&m));
            let a = throughput_coordinated(&split, 2, &m).unwrap();
            let b = throughput_coordinated(&merged, 2, &m).unwrap();
            prop_assert!(b.aggregate_mbps > a.aggregate_mbps);
        }

        #[test]
        fn throughput_reconstructs(groups in 1usize..6, mcs in 0u8..11) {
            let m = LinkModel::default();
            let owned: Vec<Vec<usize>> = (0..groups).map(|g| vec![2 * g, 2 * g + 1]).collect();
            let refs: Vec<&[usize]> = owned.iter().map(Vec::as_slice).collect();
            let r = throughput_coordinated(&schedule(&m, &refs, mcs), 2 * groups, &m).unwrap();
            prop_assert!((r.reconstructed_mbps() - r.aggregate_mbps).abs() <= 1e-9 * r.aggregate_mbps);
        }

        #[test]
        fn throughput_decreasing_in_txop(extra in 1.0f64..1000.0) {
            let m = LinkModel::default();
            let base = schedule(&m, &[&[0], &[1]], 5);
            let mut longer = base.clone();
            longer.slots[0].slot_duration_us += extra;
            let a = throughput_coordinated(&base, 2, &m).unwrap().aggregate_mbps;
            let b = throughput_coordinated(&longer, 2, &m).unwrap().aggregate_mbps;
            prop_assert!(b < a);
        }
    }
}
