//! Enterprise-scenario geometry.
//!
//! Rooms are laid out in a single row along the x-axis. Only the M rooms whose
//! APs share the channel are modelled; `interleaved_rooms` rooms on other
//! channels separate consecutive co-channel rooms (0 makes them adjacent).
//! AP `m` sits at the center of its room and its stations are drawn uniformly
//! inside that room.
//! Hand-authored scenarios (the toy fixtures) are loaded from a TOML document
//! in which every room is the `room_width_m × room_depth_m` rectangle centered
//! on its AP, so they are free to use other floor plans.
//!
//! Station coordinates come from `ChaCha8Rng::seed_from_u64(seed)`: for each AP
//! in index order, for each of its stations, `x` then `y` are drawn as
//! `lo + u * side` with `u` a standard `f64` sample in `[0, 1)`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ROOM_SIDE_M: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned room rectangle, closed on all sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Room {
    pub min: Point,
    pub max: Point,
}

impl Room {
    pub fn centered_on(center: Point, width: f64, depth: f64) -> Self {
        Room {
            min: Point::new(center.x - width / 2.0, center.y - depth / 2.0),
            max: Point::new(center.x + width / 2.0, center.y + depth / 2.0),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        // Allow for rounding when the room is reconstructed from its center.
        const EPS: f64 = 1e-9;
        p.x >= self.min.x - EPS
            && p.x <= self.max.x + EPS
            && p.y >= self.min.y - EPS
            && p.y <= self.max.y + EPS
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub num_aps: usize,
    pub stas_per_ap: usize,
    pub room_width_m: f64,
    pub room_depth_m: f64,
    /// Rooms on other channels between consecutive co-channel rooms.
    pub interleaved_rooms: usize,
    pub seed: u64,
    /// AP that wins contention and shares its TXOP. It is bookkeeping only:
    /// the throughput models do not depend on which AP coordinates.
    pub sharing_ap_index: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            num_aps: 4,
            stas_per_ap: 3,
            room_width_m: DEFAULT_ROOM_SIDE_M,
            room_depth_m: DEFAULT_ROOM_SIDE_M,
            interleaved_rooms: 1,
            seed: 0,
            sharing_ap_index: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_aps == 0 {
            return Err(Error::Config("num_aps must be at least 1".into()));
        }
        if self.stas_per_ap == 0 {
            return Err(Error::Config("stas_per_ap must be at least 1".into()));
        }
        check_room(self.room_width_m, self.room_depth_m).map_err(Error::Config)?;
        if self.sharing_ap_index >= self.num_aps {
            return Err(Error::Config(format!(
                "sharing_ap_index {} out of range for {} APs",
                self.sharing_ap_index, self.num_aps
            )));
        }
        Ok(())
    }

    /// Left edge of the `m`-th co-channel room.
    pub fn room_origin_x(&self, m: usize) -> f64 {
        (m * (self.interleaved_rooms + 1)) as f64 * self.room_width_m
    }

    /// Center of the `m`-th co-channel room.
    pub fn ap_position(&self, m: usize) -> Point {
        Point::new(
            self.room_origin_x(m) + 0.5 * self.room_width_m,
            0.5 * self.room_depth_m,
        )
    }
}

fn check_room(width: f64, depth: f64) -> std::result::Result<(), String> {
    if !(width.is_finite() && width > 0.0 && depth.is_finite() && depth > 0.0) {
        return Err(format!(
            "room dimensions must be positive, got {width} x {depth}"
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    room_width_m: f64,
    room_depth_m: f64,
    ap_positions: Vec<Point>,
    sta_positions: Vec<Point>,
    /// `association[sta]` is the serving AP.
    association: Vec<usize>,
    stas_by_ap: Vec<Vec<usize>>,
}

impl Deployment {
    /// Builds a deployment from explicit positions and checks every invariant:
    /// each AP serves at least one station, each station lies in its AP's room
    /// and no two devices share a position.
    pub fn new(
        room_width_m: f64,
        room_depth_m: f64,
        ap_positions: Vec<Point>,
        sta_positions: Vec<Point>,
        association: Vec<usize>,
    ) -> Result<Self> {
        check_room(room_width_m, room_depth_m).map_err(Error::ScenarioInvalid)?;
        if ap_positions.is_empty() {
            return Err(Error::ScenarioInvalid("scenario has no APs".into()));
        }
        if sta_positions.is_empty() {
            return Err(Error::ScenarioInvalid("scenario has no stations".into()));
        }
        if sta_positions.len() != association.len() {
            return Err(Error::ScenarioInvalid(format!(
                "{} stations but {} associations",
                sta_positions.len(),
                association.len()
            )));
        }
        for p in ap_positions.iter().chain(&sta_positions) {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(Error::ScenarioInvalid(format!(
                    "non-finite coordinate ({}, {})",
                    p.x, p.y
                )));
            }
        }

        let mut stas_by_ap = vec![Vec::new(); ap_positions.len()];
        for (sta, (&ap, pos)) in association.iter().zip(&sta_positions).enumerate() {
            let Some(served) = stas_by_ap.get_mut(ap) else {
                return Err(Error::ScenarioInvalid(format!(
                    "station {sta} associated to unknown AP {ap}"
                )));
            };
            let room = Room::centered_on(ap_positions[ap], room_width_m, room_depth_m);
            if !room.contains(pos) {
                return Err(Error::ScenarioInvalid(format!(
                    "station {sta} at ({}, {}) lies outside the room of AP {ap}",
                    pos.x, pos.y
                )));
            }
            served.push(sta);
        }
        if let Some(ap) = stas_by_ap.iter().position(Vec::is_empty) {
            return Err(Error::ScenarioInvalid(format!(
                "AP {ap} has no associated stations"
            )));
        }

        check_distinct("AP", &ap_positions)?;
        check_distinct("station", &sta_positions)?;

        Ok(Deployment {
            room_width_m,
            room_depth_m,
            ap_positions,
            sta_positions,
            association,
            stas_by_ap,
        })
    }

    pub fn num_aps(&self) -> usize {
        self.ap_positions.len()
    }

    /// Total station count N.
    pub fn num_stas(&self) -> usize {
        self.sta_positions.len()
    }

    pub fn ap_positions(&self) -> &[Point] {
        &self.ap_positions
    }

    pub fn sta_positions(&self) -> &[Point] {
        &self.sta_positions
    }

    pub fn association(&self) -> &[usize] {
        &self.association
    }

    pub fn ap_of(&self, sta: usize) -> usize {
        self.association[sta]
    }

    /// Stations served by `ap`, ascending.
    pub fn stas_of(&self, ap: usize) -> &[usize] {
        &self.stas_by_ap[ap]
    }

    pub fn room_width_m(&self) -> f64 {
        self.room_width_m
    }

    pub fn room_depth_m(&self) -> f64 {
        self.room_depth_m
    }

    pub fn room_of(&self, ap: usize) -> Room {
        Room::centered_on(self.ap_positions[ap], self.room_width_m, self.room_depth_m)
    }

    pub fn to_document(&self) -> ScenarioDocument {
        ScenarioDocument {
            room_width_m: self.room_width_m,
            room_depth_m: self.room_depth_m,
            aps: self
                .ap_positions
                .iter()
                .map(|p| ApEntry { x: p.x, y: p.y })
                .collect(),
            stas: self
                .sta_positions
                .iter()
                .zip(&self.association)
                .map(|(p, &ap)| StaEntry { x: p.x, y: p.y, ap })
                .collect(),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_document()).expect("scenario document always serializes")
    }
}

fn check_distinct(kind: &str, points: &[Point]) -> Result<()> {
    for (i, a) in points.iter().enumerate() {
        if let Some(j) = points[i + 1..].iter().position(|b| b == a) {
            return Err(Error::ScenarioInvalid(format!(
                "{kind}s {i} and {} share position ({}, {})",
                i + 1 + j,
                a.x,
                a.y
            )));
        }
    }
    Ok(())
}

/// Generates the random single-row deployment for `cfg`.
pub fn generate_deployment(cfg: &ScenarioConfig) -> Result<Deployment> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ap_positions: Vec<Point> = (0..cfg.num_aps).map(|m| cfg.ap_position(m)).collect();
    let total = cfg.num_aps * cfg.stas_per_ap;
    let mut sta_positions = Vec::with_capacity(total);
    let mut association = Vec::with_capacity(total);
    for m in 0..cfg.num_aps {
        let x0 = cfg.room_origin_x(m);
        for _ in 0..cfg.stas_per_ap {
            let x = x0 + rng.gen::<f64>() * cfg.room_width_m;
            let y = rng.gen::<f64>() * cfg.room_depth_m;
            sta_positions.push(Point::new(x, y));
            association.push(m);
        }
    }
    Deployment::new(
        cfg.room_width_m,
        cfg.room_depth_m,
        ap_positions,
        sta_positions,
        association,
    )
}

/// On-disk scenario schema.
///
/// ```toml
/// room_width_m = 6.0
/// room_depth_m = 6.0
///
/// [[aps]]
/// x = 3.0
/// y = 3.0
///
/// [[stas]]
/// x = 2.5
/// y = 3.5
/// ap = 0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    #[serde(default = "default_room_side")]
    pub room_width_m: f64,
    #[serde(default = "default_room_side")]
    pub room_depth_m: f64,
    pub aps: Vec<ApEntry>,
    #[serde(default)]
    pub stas: Vec<StaEntry>,
}

fn default_room_side() -> f64 {
    DEFAULT_ROOM_SIDE_M
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApEntry {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaEntry {
    pub x: f64,
    pub y: f64,
    pub ap: usize,
}

impl ScenarioDocument {
    pub fn into_deployment(self) -> Result<Deployment> {
        let aps = self.aps.iter().map(|a| Point::new(a.x, a.y)).collect();
        let stas = self.stas.iter().map(|s| Point::new(s.x, s.y)).collect();
        let assoc = self.stas.iter().map(|s| s.ap).collect();
        Deployment::new(self.room_width_m, self.room_depth_m, aps, stas, assoc)
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(source: &str) -> Result<Deployment> {
    let doc: ScenarioDocument =
        toml::from_str(source).map_err(|e| Error::ScenarioParse(e.to_string()))?;
    doc.into_deployment()
}

pub fn load_scenario_file(path: impl AsRef<Path>) -> Result<Deployment> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ScenarioParse(format!("{}: {e}", path.display())))?;
    load_scenario(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(num_aps: usize, stas_per_ap: usize, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            num_aps,
            stas_per_ap,
            seed,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn four_adjacent_rooms_in_a_row() {
        let mut c = cfg(4, 3, 7);
        c.interleaved_rooms = 0;
        let dep = generate_deployment(&c).unwrap();
        let expected = [(3.0, 3.0), (9.0, 3.0), (15.0, 3.0), (21.0, 3.0)];
        for (p, (x, y)) in dep.ap_positions().iter().zip(expected) {
            assert_eq!((p.x, p.y), (x, y));
        }
        assert_eq!(dep.num_stas(), 12);
        for ap in 0..4 {
            assert_eq!(dep.stas_of(ap).len(), 3);
        }
    }

    #[test]
    fn default_layout_skips_one_room() {
        let dep = generate_deployment(&cfg(4, 3, 7)).unwrap();
        let xs: Vec<f64> = dep.ap_positions().iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![3.0, 15.0, 27.0, 39.0]);
        for ap in 0..4 {
            let room = dep.room_of(ap);
            assert!(dep
                .stas_of(ap)
                .iter()
                .all(|&s| room.contains(&dep.sta_positions()[s])));
        }
    }

    #[test]
    fn single_room() {
        let dep = generate_deployment(&cfg(1, 1, 99)).unwrap();
        assert_eq!(dep.ap_positions(), &[Point::new(3.0, 3.0)]);
        let s = dep.sta_positions()[0];
        assert!((0.0..=6.0).contains(&s.x) && (0.0..=6.0).contains(&s.y));
    }

    #[test]
    fn same_seed_same_deployment() {
        let a = generate_deployment(&cfg(3, 4, 1234)).unwrap();
        let b = generate_deployment(&cfg(3, 4, 1234)).unwrap();
        assert_eq!(a, b);
        let c = generate_deployment(&cfg(3, 4, 1235)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(matches!(
            generate_deployment(&cfg(0, 3, 0)),
            Err(Error::Config(_))
        ));
        assert!(generate_deployment(&cfg(2, 0, 0)).is_err());
        let mut c = cfg(2, 2, 0);
        c.room_depth_m = 0.0;
        assert!(generate_deployment(&c).is_err());
        let mut c = cfg(2, 2, 0);
        c.sharing_ap_index = 2;
        assert!(generate_deployment(&c).is_err());
    }

    #[test]
    fn empty_station_list_is_rejected() {
        let doc = "[[aps]]\nx = 3.0\ny = 3.0\n";
        assert!(matches!(load_scenario(doc), Err(Error::ScenarioInvalid(_))));
    }

    #[test]
    fn station_outside_room_is_rejected() {
        let doc = "[[aps]]\nx = 3.0\ny = 3.0\n[[stas]]\nx = 7.0\ny = 3.0\nap = 0\n";
        assert!(matches!(load_scenario(doc), Err(Error::ScenarioInvalid(_))));
    }

    #[test]
    fn unknown_ap_and_duplicates_are_rejected() {
        let doc = "[[aps]]\nx = 3.0\ny = 3.0\n[[stas]]\nx = 2.0\ny = 3.0\nap = 1\n";
        assert!(load_scenario(doc).is_err());
        let doc = "[[aps]]\nx = 3.0\ny = 3.0\n[[stas]]\nx = 2.0\ny = 3.0\nap = 0\n\
                   [[stas]]\nx = 2.0\ny = 3.0\nap = 0\n";
        assert!(matches!(load_scenario(doc), Err(Error::ScenarioInvalid(_))));
    }

    #[test]
    fn malformed_document() {
        assert!(matches!(
            load_scenario("aps = 3"),
            Err(Error::ScenarioParse(_))
        ));
        assert!(matches!(
            load_scenario("[[aps]]\nx = 3.0\ny = 3.0\nz = 1.0\n"),
            Err(Error::ScenarioParse(_))
        ));
    }

    #[test]
    fn missing_file_is_a_scenario_error() {
        assert!(matches!(
            load_scenario_file("/nonexistent/scenario.toml"),
            Err(Error::ScenarioParse(_))
        ));
    }

    proptest! {
        #[test]
        fn stations_stay_in_their_rooms(seed in any::<u64>(), m in 1usize..6, n in 1usize..5, gap in 0usize..3) {
            let mut c = cfg(m, n, seed);
            c.interleaved_rooms = gap;
            let dep = generate_deployment(&c).unwrap();
            for ap in 0..m {
                let p = dep.ap_positions()[ap];
                prop_assert_eq!(p, c.ap_position(ap));
                let x0 = (ap * (gap + 1)) as f64 * c.room_width_m;
                for &s in dep.stas_of(ap) {
                    let q = dep.sta_positions()[s];
                    prop_assert!(q.x >= x0 && q.x <= x0 + c.room_width_m);
                    prop_assert!(q.y >= 0.0 && q.y <= c.room_depth_m);
                }
            }
        }

        #[test]
        fn document_round_trip(seed in any::<u64>(), m in 1usize..5, n in 1usize..4) {
            let dep = generate_deployment(&cfg(m, n, seed)).unwrap();
            let back = load_scenario(&dep.to_toml_string()).unwrap();
            prop_assert_eq!(dep, back);
        }
    }
}
