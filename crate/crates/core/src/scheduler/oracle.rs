//! Exhaustive minimum-TXOP schedule, used to measure greedy quality.

use crate::deployment::Deployment;
use crate::error::{Error, Result};
use crate::mode::{Mode, PowerPolicy};
use crate::phy::LinkModel;
use crate::propagation::RssiMatrix;

use super::{enumerate_combinations, Combination, Schedule};

pub const DEFAULT_ORACLE_MAX_STAS: usize = 12;

/// Searches every partition of the stations into feasible coordinated slots
/// and returns one with the shortest total TXOP. Within a slot the candidate
/// with the shortest duration (lowest enumeration rank on ties) is used.
///
/// Refuses deployments with more than `max_stas` stations.
pub fn brute_force_optimal(
    dep: &Deployment,
    rssi: &RssiMatrix,
    model: &LinkModel,
    policy: PowerPolicy,
    max_stas: usize,
) -> Result<Schedule> {
    let n = dep.num_stas();
    if n > max_stas || n >= usize::BITS as usize {
        return Err(Error::Config(format!(
            "brute-force search limited to {max_stas} stations, deployment has {n}"
        )));
    }
    let full = (1usize << n) - 1;

    let combos = enumerate_combinations(dep, rssi, model, policy);
    let mut best_slot: Vec<Option<&Combination>> = vec![None; full + 1];
    for c in &combos {
        let mask = c.stas().fold(0usize, |m, s| m | (1 << s));
        let replace = match best_slot[mask] {
            None => true,
            Some(b) => c.slot_duration_us < b.slot_duration_us,
        };
        if replace {
            best_slot[mask] = Some(c);
        }
    }

    // cost[mask]: shortest total slot time covering exactly `mask`.
    let mut cost = vec![f64::INFINITY; full + 1];
    let mut choice = vec![0usize; full + 1];
    cost[0] = 0.0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // Every slot containing the lowest uncovered station.
        let mut sub = rest;
        loop {
            let part = sub | low;
            if let Some(c) = best_slot[part] {
                let total = c.slot_duration_us + cost[mask ^ part];
                if total < cost[mask] {
                    cost[mask] = total;
                    choice[mask] = part;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }

    if !cost[full].is_finite() {
        let sta = (0..n).find(|&s| best_slot[1 << s].is_none()).unwrap_or(0);
        return Err(Error::Unschedulable {
            sta,
            reason: "no feasible partition covers every station".into(),
        });
    }

    let mut slots = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let part = choice[mask];
        slots.push(best_slot[part].expect("chosen part is feasible").clone());
        mask ^= part;
    }
    Schedule::from_slots(slots, Mode::CTdmaSr, n)
}
