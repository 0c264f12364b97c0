//! 802.11ax MCS selection, PHY rates and frame airtimes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagation::dbm_to_mw;

pub const NUM_MCS: usize = 11;

/// Data bits per OFDM symbol, 980 data subcarriers (80 MHz), one spatial stream.
pub const BITS_PER_SYMBOL: [u32; NUM_MCS] = [
    490,  // BPSK 1/2
    980,  // QPSK 1/2
    1470, // QPSK 3/4
    1960, // 16-QAM 1/2
    2940, // 16-QAM 3/4
    3920, // 64-QAM 2/3
    4410, // 64-QAM 3/4
    4900, // 64-QAM 5/6
    5880, // 256-QAM 3/4
    6533, // 256-QAM 5/6
    7350, // 1024-QAM 3/4
];

pub const DEFAULT_MCS_THRESHOLDS_DB: [f64; NUM_MCS] = [
    2.0, 5.0, 8.0, 11.0, 15.0, 18.0, 20.0, 25.0, 29.0, 31.0, 34.0,
];

const SERVICE_BITS: u64 = 16;
const TAIL_BITS: u64 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McsEntry {
    pub index: u8,
    pub bits_per_symbol: u32,
    pub min_sinr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    entries: Vec<McsEntry>,
}

impl McsTable {
    /// Standard rates with the given minimum SINR per index.
    pub fn with_thresholds(thresholds_db: &[f64]) -> Result<Self> {
        if thresholds_db.len() != NUM_MCS {
            return Err(Error::Config(format!(
                "expected {NUM_MCS} MCS thresholds, got {}",
                thresholds_db.len()
            )));
        }
        let entries = thresholds_db
            .iter()
            .zip(BITS_PER_SYMBOL)
            .enumerate()
            .map(|(i, (&min_sinr_db, bits_per_symbol))| McsEntry {
                index: i as u8,
                bits_per_symbol,
                min_sinr_db,
            })
            .collect();
        Self::new(entries)
    }

    pub fn new(entries: Vec<McsEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config("MCS table is empty".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if usize::from(e.index) != i {
                return Err(Error::Config(format!(
                    "MCS indices must be contiguous from 0, found {} at position {i}",
                    e.index
                )));
            }
            if e.bits_per_symbol == 0 || !e.min_sinr_db.is_finite() {
                return Err(Error::Config(format!("MCS {i} has invalid parameters")));
            }
        }
        for w in entries.windows(2) {
            if w[1].bits_per_symbol <= w[0].bits_per_symbol || w[1].min_sinr_db <= w[0].min_sinr_db
            {
                return Err(Error::Config(format!(
                    "MCS {} must have more bits and a higher SINR threshold than MCS {}",
                    w[1].index, w[0].index
                )));
            }
        }
        Ok(McsTable { entries })
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }

    pub fn get(&self, index: u8) -> Option<&McsEntry> {
        self.entries.get(usize::from(index))
    }

    /// Highest MCS whose threshold does not exceed `sinr_db`.
    pub fn select(&self, sinr_db: f64) -> Option<&McsEntry> {
        select_mcs(sinr_db, &self.entries)
    }
}

impl Default for McsTable {
    fn default() -> Self {
        McsTable::with_thresholds(&DEFAULT_MCS_THRESHOLDS_DB).expect("default table is valid")
    }
}

pub fn select_mcs(sinr_db: f64, table: &[McsEntry]) -> Option<&McsEntry> {
    let n = table.partition_point(|e| e.min_sinr_db <= sinr_db);
    n.checked_sub(1).map(|i| &table[i])
}

/// Frame and interframe durations in microseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingConstants {
    pub legacy_preamble_us: f64,
    pub ofdm_symbol_us: f64,
    pub guard_interval_us: f64,
    pub t_map_rts_us: f64,
    pub t_map_cts_us: f64,
    pub t_cts_timeout_us: f64,
    pub t_map_tf_us: f64,
    pub t_empty_slot_us: f64,
    pub t_sifs_us: f64,
    pub t_difs_us: f64,
    pub t_rts_us: f64,
    pub t_cts_us: f64,
    pub t_ack_us: f64,
    pub payload_bytes: u32,
    pub cw_min: u32,
}

impl Default for TimingConstants {
    fn default() -> Self {
        TimingConstants {
            legacy_preamble_us: 20.0,
            ofdm_symbol_us: 12.8,
            guard_interval_us: 0.8,
            t_map_rts_us: 80.0,
            t_map_cts_us: 62.0,
            t_cts_timeout_us: 41.0,
            t_map_tf_us: 76.0,
            t_empty_slot_us: 9.0,
            t_sifs_us: 16.0,
            t_difs_us: 34.0,
            t_rts_us: 28.0,
            t_cts_us: 24.0,
            t_ack_us: 24.0,
            payload_bytes: 1500,
            cw_min: 15,
        }
    }
}

impl TimingConstants {
    pub fn validate(&self) -> Result<()> {
        let durations = [
            ("legacy_preamble_us", self.legacy_preamble_us),
            ("ofdm_symbol_us", self.ofdm_symbol_us),
            ("guard_interval_us", self.guard_interval_us),
            ("t_map_rts_us", self.t_map_rts_us),
            ("t_map_cts_us", self.t_map_cts_us),
            ("t_cts_timeout_us", self.t_cts_timeout_us),
            ("t_map_tf_us", self.t_map_tf_us),
            ("t_empty_slot_us", self.t_empty_slot_us),
            ("t_sifs_us", self.t_sifs_us),
            ("t_difs_us", self.t_difs_us),
            ("t_rts_us", self.t_rts_us),
            ("t_cts_us", self.t_cts_us),
            ("t_ack_us", self.t_ack_us),
        ];
        for (name, v) in durations {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.payload_bytes == 0 {
            return Err(Error::Config("payload_bytes must be positive".into()));
        }
        Ok(())
    }

    pub fn symbol_with_gi_us(&self) -> f64 {
        self.ofdm_symbol_us + self.guard_interval_us
    }

    pub fn payload_bits(&self) -> u64 {
        8 * u64::from(self.payload_bytes)
    }

    /// Single-backoff-stage transmission probability, 2 / (CW_min + 2).
    pub fn tau(&self) -> f64 {
        2.0 / (f64::from(self.cw_min) + 2.0)
    }
}

pub fn data_rate_mbps(mcs: &McsEntry, t: &TimingConstants) -> f64 {
    f64::from(mcs.bits_per_symbol) / t.symbol_with_gi_us()
}

pub fn ppdu_airtime_us(payload_bytes: u32, mcs: &McsEntry, t: &TimingConstants) -> f64 {
    let bits = SERVICE_BITS + 8 * u64::from(payload_bytes) + TAIL_BITS;
    let symbols = bits.div_ceil(u64::from(mcs.bits_per_symbol));
    t.legacy_preamble_us + symbols as f64 * t.symbol_with_gi_us()
}

/// MCS table, timing and noise floor bundled with per-MCS lookups used in the
/// inner loops of the scheduler.
#[derive(Debug, Clone)]
pub struct LinkModel {
    mcs: McsTable,
    timing: TimingConstants,
    noise_floor_dbm: f64,
    noise_mw: f64,
    thresholds_linear: Vec<f64>,
    data_airtime_us: Vec<f64>,
    coordinated_tx_us: Vec<f64>,
}

impl LinkModel {
    pub fn new(mcs: McsTable, timing: TimingConstants, noise_floor_dbm: f64) -> Result<Self> {
        timing.validate()?;
        if !noise_floor_dbm.is_finite() {
            return Err(Error::Config("noise floor must be finite".into()));
        }
        let thresholds_linear = mcs
            .entries()
            .iter()
            .map(|e| 10f64.powf(e.min_sinr_db / 10.0))
            .collect();
        let data_airtime_us: Vec<f64> = mcs
            .entries()
            .iter()
            .map(|e| ppdu_airtime_us(timing.payload_bytes, e, &timing))
            .collect();
        let coordinated_tx_us = data_airtime_us
            .iter()
            .map(|d| d + timing.t_sifs_us + timing.t_ack_us + timing.t_difs_us)
            .collect();
        Ok(LinkModel {
            mcs,
            timing,
            noise_floor_dbm,
            noise_mw: dbm_to_mw(noise_floor_dbm),
            thresholds_linear,
            data_airtime_us,
            coordinated_tx_us,
        })
    }

    pub fn mcs_table(&self) -> &McsTable {
        &self.mcs
    }

    pub fn timing(&self) -> &TimingConstants {
        &self.timing
    }

    pub fn noise_floor_dbm(&self) -> f64 {
        self.noise_floor_dbm
    }

    pub fn noise_mw(&self) -> f64 {
        self.noise_mw
    }

    /// Same decision as [`McsTable::select`] on a linear SINR.
    #[inline]
    pub fn select_linear(&self, sinr: f64) -> Option<u8> {
        let n = self.thresholds_linear.partition_point(|&t| t <= sinr);
        n.checked_sub(1).map(|i| i as u8)
    }

    /// T_DATA for one payload at `mcs`.
    pub fn data_airtime_us(&self, mcs: u8) -> f64 {
        self.data_airtime_us[usize::from(mcs)]
    }

    /// One transmission inside a coordinated slot: DATA + SIFS + ACK + DIFS.
    #[inline]
    pub fn coordinated_tx_us(&self, mcs: u8) -> f64 {
        self.coordinated_tx_us[usize::from(mcs)]
    }

    /// One successful nc-MAP slot: RTS/CTS handshake, DATA, ACK, DIFS and an
    /// empty slot.
    pub fn dcf_success_us(&self, mcs: u8) -> f64 {
        let t = &self.timing;
        t.t_rts_us
            + t.t_sifs_us
            + t.t_cts_us
            + t.t_sifs_us
            + self.data_airtime_us(mcs)
            + t.t_sifs_us
            + t.t_ack_us
            + t.t_difs_us
            + t.t_empty_slot_us
    }
}

impl Default for LinkModel {
    fn default() -> Self {
        LinkModel::new(
            McsTable::default(),
            TimingConstants::default(),
            crate::propagation::thermal_noise_dbm(80e6, 7.0),
        )
        .expect("defaults are valid")
    }
}
