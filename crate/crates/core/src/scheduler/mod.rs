//! Coordinated-slot scheduling for shared TXOPs.
//!
//! c-TDMA/SR scheduling enumerates every candidate slot (a nonempty subset of
//! APs, one associated station per AP and one power level per AP), scores each
//! candidate by the bits it delivers per microsecond of slot time, and greedily
//! accepts the best-scoring candidates whose stations are all still uncovered.
//!
//! Enumeration order, recorded in [`Combination::enum_rank`]:
//! 1. AP subsets by size, then lexicographically by AP index;
//! 2. station assignments lexicographically (first AP's station varies slowest);
//! 3. power vectors lexicographically over ascending power levels.

mod oracle;

pub use oracle::{brute_force_optimal, DEFAULT_ORACLE_MAX_STAS};

use smallvec::SmallVec;

use crate::deployment::Deployment;
use crate::error::{Error, Result};
use crate::mode::{Mode, PowerPolicy};
use crate::phy::LinkModel;
use crate::propagation::{mw_to_dbm, RssiMatrix};

/// One AP-to-station transmission inside a coordinated slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub ap: usize,
    pub sta: usize,
    pub power_level: usize,
    pub tx_power_dbm: f64,
    pub sinr_db: f64,
    pub mcs: u8,
}

pub type Links = SmallVec<[Link; 4]>;

/// A candidate coordinated slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub links: Links,
    pub total_bits: u64,
    pub slot_duration_us: f64,
    pub alpha_mbps: f64,
    pub enum_rank: usize,
}

impl Combination {
    pub fn stas(&self) -> impl Iterator<Item = usize> + '_ {
        self.links.iter().map(|l| l.sta)
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }
}

/// Bits, slot duration and α of a slot whose links use the given MCSs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotScore {
    pub total_bits: u64,
    pub slot_duration_us: f64,
    pub alpha_mbps: f64,
}

/// Scores a slot: the slot lasts MAP-TF + SIFS plus its longest transmission,
/// and α is the bits delivered divided by that duration (bits/µs = Mbps).
pub fn score_alpha(mcs_per_link: &[u8], model: &LinkModel) -> SlotScore {
    let t = model.timing();
    let longest = mcs_per_link
        .iter()
        .map(|&m| model.coordinated_tx_us(m))
        .fold(0.0, f64::max);
    let slot_duration_us = t.t_map_tf_us + t.t_sifs_us + longest;
    let total_bits = mcs_per_link.len() as u64 * t.payload_bits();
    SlotScore {
        total_bits,
        slot_duration_us,
        alpha_mbps: total_bits as f64 / slot_duration_us,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub slots: Vec<Combination>,
    pub mode: Mode,
    /// Ascending.
    pub covered_stas: Vec<usize>,
}

impl Schedule {
    fn from_slots(slots: Vec<Combination>, mode: Mode, num_stas: usize) -> Result<Self> {
        let mut seen = vec![false; num_stas];
        for sta in slots.iter().flat_map(Combination::stas) {
            if std::mem::replace(&mut seen[sta], true) {
                return Err(Error::Unschedulable {
                    sta,
                    reason: "station appears in more than one slot".into(),
                });
            }
        }
        if let Some(sta) = seen.iter().position(|&s| !s) {
            return Err(Error::Unschedulable {
                sta,
                reason: "no feasible combination contains it".into(),
            });
        }
        Ok(Schedule {
            slots,
            mode,
            covered_stas: (0..num_stas).collect(),
        })
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    /// Sum of the coordinated slot durations.
    pub fn slots_duration_us(&self) -> f64 {
        self.slots.iter().map(|c| c.slot_duration_us).sum()
    }

    /// MAP-RTS + SIFS + MAP-CTS + SIFS followed by every coordinated slot.
    pub fn txop_duration_us(&self, model: &LinkModel) -> f64 {
        let t = model.timing();
        t.t_map_rts_us + t.t_sifs_us + t.t_map_cts_us + t.t_sifs_us + self.slots_duration_us()
    }
}

/// Mixed-radix counter, last digit fastest.
struct Odometer {
    radices: SmallVec<[usize; 4]>,
    digits: SmallVec<[usize; 4]>,
}

impl Odometer {
    fn new(radices: impl IntoIterator<Item = usize>) -> Self {
        let radices: SmallVec<[usize; 4]> = radices.into_iter().collect();
        let digits = smallvec::smallvec![0; radices.len()];
        Odometer { radices, digits }
    }

    fn advance(&mut self) -> bool {
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                return true;
            }
            self.digits[i] = 0;
        }
        false
    }
}

/// Advances `idx` to the next k-combination of `0..n` in lexicographic order.
fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// SINR of link `j` when all `links` transmit together. Interference is summed
/// in link order and noise is added last.
pub(crate) fn link_sinr_db(
    rssi: &RssiMatrix,
    model: &LinkModel,
    aps: &[usize],
    stas: &[usize],
    levels: &[usize],
    j: usize,
) -> f64 {
    let target = rssi.rssi_dbm(stas[j], aps[j], levels[j]);
    if aps.len() == 1 {
        return target - model.noise_floor_dbm();
    }
    let mut interference = 0.0;
    for l in 0..aps.len() {
        if l != j {
            interference += rssi.rssi_mw(stas[j], aps[l], levels[l]);
        }
    }
    mw_to_dbm(rssi.rssi_mw(stas[j], aps[j], levels[j]) / (interference + model.noise_mw()))
}

fn power_levels(rssi: &RssiMatrix, policy: PowerPolicy) -> Vec<usize> {
    match policy {
        PowerPolicy::Fixed => vec![rssi.max_level()],
        PowerPolicy::Variable => (0..rssi.num_levels()).collect(),
    }
}

/// Enumerates every feasible candidate slot; infeasible ones (some link below
/// MCS0) are dropped.
pub fn enumerate_combinations(
    dep: &Deployment,
    rssi: &RssiMatrix,
    model: &LinkModel,
    policy: PowerPolicy,
) -> Vec<Combination> {
    let num_aps = dep.num_aps();
    let levels = power_levels(rssi, policy);
    let powers = rssi.tx_power_levels_dbm();
    let mut out = Vec::new();
    let mut rank = 0usize;

    let mut stas: SmallVec<[usize; 4]> = SmallVec::new();
    let mut lv: SmallVec<[usize; 4]> = SmallVec::new();
    let mut mcs: SmallVec<[u8; 4]> = SmallVec::new();
    let mut sinrs: SmallVec<[f64; 4]> = SmallVec::new();

    for k in 1..=num_aps {
        let mut aps: Vec<usize> = (0..k).collect();
        loop {
            let mut sta_odo = Odometer::new(aps.iter().map(|&a| dep.stas_of(a).len()));
            loop {
                stas.clear();
                stas.extend(
                    aps.iter()
                        .zip(&sta_odo.digits)
                        .map(|(&a, &d)| dep.stas_of(a)[d]),
                );
                let mut pow_odo = Odometer::new(std::iter::repeat_n(levels.len(), k));
                loop {
                    lv.clear();
                    lv.extend(pow_odo.digits.iter().map(|&d| levels[d]));
                    mcs.clear();
                    sinrs.clear();
                    let mut feasible = true;
                    for j in 0..k {
                        let s = link_sinr_db(rssi, model, &aps, &stas, &lv, j);
                        match model.mcs_table().select(s) {
                            Some(e) => {
                                mcs.push(e.index);
                                sinrs.push(s);
                            }
                            None => {
                                feasible = false;
                                break;
                            }
                        }
                    }
                    if feasible {
                        let score = score_alpha(&mcs, model);
                        let links = (0..k)
                            .map(|j| Link {
                                ap: aps[j],
                                sta: stas[j],
                                power_level: lv[j],
                                tx_power_dbm: powers[lv[j]],
                                sinr_db: sinrs[j],
                                mcs: mcs[j],
                            })
                            .collect();
                        out.push(Combination {
                            links,
                            total_bits: score.total_bits,
                            slot_duration_us: score.slot_duration_us,
                            alpha_mbps: score.alpha_mbps,
                            enum_rank: rank,
                        });
                    }
                    rank += 1;
                    if !pow_odo.advance() {
                        break;
                    }
                }
                if !sta_odo.advance() {
                    break;
                }
            }
            if !next_subset(&mut aps, num_aps) {
                break;
            }
        }
    }
    out
}

/// Number of candidates [`enumerate_combinations`] considers before dropping
/// infeasible ones: for every AP subset, the product over its APs of
/// (stations × power levels).
pub fn candidate_count(dep: &Deployment, num_levels: usize) -> usize {
    (0..dep.num_aps())
        .map(|a| dep.stas_of(a).len() * num_levels + 1)
        .product::<usize>()
        - 1
}

/// Ranking order: α descending, then enumeration rank ascending.
pub fn rank_order(a: &Combination, b: &Combination) -> std::cmp::Ordering {
    b.alpha_mbps
        .total_cmp(&a.alpha_mbps)
        .then(a.enum_rank.cmp(&b.enum_rank))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accepted,
    /// The candidate contains a station already covered by an accepted slot.
    Skipped {
        repeated_sta: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyStep {
    /// Zero-based position in ranking order.
    pub position: usize,
    pub enum_rank: usize,
    pub alpha_mbps: f64,
    pub decision: Decision,
}

/// Greedy selection together with the decision taken on every candidate
/// scanned before coverage completed.
pub fn greedy_select_traced(
    combos: &[Combination],
    dep: &Deployment,
) -> Result<(Schedule, Vec<GreedyStep>)> {
    let n = dep.num_stas();
    let mut order: Vec<&Combination> = combos.iter().collect();
    order.sort_unstable_by(|a, b| rank_order(a, b));

    let mut covered = vec![false; n];
    let mut remaining = n;
    let mut slots = Vec::new();
    let mut trace = Vec::new();
    for (position, c) in order.into_iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let decision = match c.stas().find(|&s| covered[s]) {
            Some(repeated_sta) => Decision::Skipped { repeated_sta },
            None => {
                for s in c.stas() {
                    covered[s] = true;
                }
                remaining -= c.num_links();
                slots.push(c.clone());
                Decision::Accepted
            }
        };
        trace.push(GreedyStep {
            position,
            enum_rank: c.enum_rank,
            alpha_mbps: c.alpha_mbps,
            decision,
        });
    }
    let schedule = Schedule::from_slots(slots, Mode::CTdmaSr, n)?;
    Ok((schedule, trace))
}

/// Accepts candidates in ranking order whenever none of their stations is
/// covered yet, until every station is covered.
pub fn greedy_select(combos: &[Combination], dep: &Deployment) -> Result<Schedule> {
    greedy_select_traced(combos, dep).map(|(s, _)| s)
}

/// The full c-TDMA/SR pipeline: enumerate, rank, select.
pub fn build_ctdma_sr_schedule(
    dep: &Deployment,
    rssi: &RssiMatrix,
    model: &LinkModel,
    policy: PowerPolicy,
) -> Result<Schedule> {
    let combos = enumerate_combinations(dep, rssi, model, policy);
    greedy_select(&combos, dep)
}

/// One interference-free slot per station, at maximum power, in station order.
pub fn build_ctdma_schedule(
    dep: &Deployment,
    rssi: &RssiMatrix,
    model: &LinkModel,
) -> Result<Schedule> {
    let level = rssi.max_level();
    let mut slots = Vec::with_capacity(dep.num_stas());
    for sta in 0..dep.num_stas() {
        let ap = dep.ap_of(sta);
        let sinr_db = link_sinr_db(rssi, model, &[ap], &[sta], &[level], 0);
        let mcs = model
            .mcs_table()
            .select(sinr_db)
            .ok_or_else(|| Error::Unschedulable {
                sta,
                reason: format!("SNR {sinr_db:.2} dB at maximum power is below MCS0"),
            })?
            .index;
        let score = score_alpha(&[mcs], model);
        slots.push(Combination {
            links: smallvec::smallvec![Link {
                ap,
                sta,
                power_level: level,
                tx_power_dbm: rssi.tx_power_levels_dbm()[level],
                sinr_db,
                mcs,
            }],
            total_bits: score.total_bits,
            slot_duration_us: score.slot_duration_us,
            alpha_mbps: score.alpha_mbps,
            enum_rank: sta,
        });
    }
    Schedule::from_slots(slots, Mode::CTdma, dep.num_stas())
}

/// Renders candidates in ranking order as a table with one power/STA column
/// pair per AP followed by α. `None` cells mean the AP is silent.
pub fn format_combination_table(combos: &[Combination], num_aps: usize, limit: usize) -> String {
    use std::fmt::Write;

    let mut order: Vec<&Combination> = combos.iter().collect();
    order.sort_unstable_by(|a, b| rank_order(a, b));
    let mut s = String::new();
    let _ = write!(s, "{:>6} {:>8}", "rank", "enum");
    for a in 0..num_aps {
        let _ = write!(s, " | AP{:<2} P[dBm] STA", a + 1);
    }
    let _ = writeln!(s, " | {:>10}", "alpha[Mbps]");
    for (i, c) in order.into_iter().take(limit).enumerate() {
        let _ = write!(s, "{:>6} {:>8}", format!("c{}", i + 1), c.enum_rank);
        for a in 0..num_aps {
            match c.links.iter().find(|l| l.ap == a) {
                Some(l) => {
                    let _ = write!(s, " | {:>11.0} {:>3}", l.tx_power_dbm, l.sta + 1);
                }
                None => {
                    let _ = write!(s, " | {:>11} {:>3}", "-", "-");
                }
            }
        }
        let _ = writeln!(s, " | {:>10.2}", c.alpha_mbps);
    }
    s
}
