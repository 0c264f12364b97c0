use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Channel access mode evaluated for a deployment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Independent DCF contention with RTS/CTS, no coordination.
    #[serde(rename = "nc-MAP")]
    NcMap,
    /// Shared TXOP with one transmission per coordinated slot.
    #[serde(rename = "c-TDMA")]
    CTdma,
    /// Shared TXOP where several APs may transmit in the same slot.
    #[serde(rename = "c-TDMA/SR")]
    CTdmaSr,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::NcMap, Mode::CTdma, Mode::CTdmaSr];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::NcMap => "nc-MAP",
            Mode::CTdma => "c-TDMA",
            Mode::CTdmaSr => "c-TDMA/SR",
        }
    }

    pub fn is_coordinated(self) -> bool {
        !matches!(self, Mode::NcMap)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nc-map" | "ncmap" => Ok(Mode::NcMap),
            "c-tdma" | "ctdma" => Ok(Mode::CTdma),
            "c-tdma/sr" | "ctdma-sr" | "ctdma_sr" => Ok(Mode::CTdmaSr),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Which transmit powers the c-TDMA/SR scheduler may assign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerPolicy {
    /// Every AP transmits at the maximum level.
    Fixed,
    /// Any configured level per AP.
    #[default]
    Variable,
}

impl PowerPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            PowerPolicy::Fixed => "fixed",
            PowerPolicy::Variable => "variable",
        }
    }
}

impl fmt::Display for PowerPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
