//! System parameters, scenarios and random realizations of the two
//! co-existing networks.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, Error, Result};
use crate::gain::FadingModel;
use crate::rng::StreamKey;

/// Direction of transmission inside one network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkMode {
    Uplink,
    Downlink,
}

/// Which way each network transmits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub primary: LinkMode,
    pub secondary: LinkMode,
}

impl Scenario {
    pub const UU: Scenario = Scenario {
        primary: LinkMode::Uplink,
        secondary: LinkMode::Uplink,
    };
    pub const UD: Scenario = Scenario {
        primary: LinkMode::Uplink,
        secondary: LinkMode::Downlink,
    };
    pub const DU: Scenario = Scenario {
        primary: LinkMode::Downlink,
        secondary: LinkMode::Uplink,
    };
    pub const DD: Scenario = Scenario {
        primary: LinkMode::Downlink,
        secondary: LinkMode::Downlink,
    };

    pub const ALL: [Scenario; 4] = [Scenario::UU, Scenario::UD, Scenario::DU, Scenario::DD];

    /// Co-existence levels that exist for this scenario.
    pub fn levels(self) -> Vec<CoexistenceLevel> {
        CoexistenceLevel::ALL
            .into_iter()
            .filter(|l| l.check(self).is_ok())
            .collect()
    }

    /// The level with the most scheduling this scenario supports.
    pub fn natural_level(self) -> CoexistenceLevel {
        match self {
            Scenario::UU | Scenario::UD => CoexistenceLevel::Symmetric,
            Scenario::DU => CoexistenceLevel::Asymmetric,
            _ => CoexistenceLevel::PureInterference,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |m: LinkMode| if m == LinkMode::Uplink { 'u' } else { 'd' };
        write!(f, "{}{}", c(self.primary), c(self.secondary))
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uu" => Ok(Scenario::UU),
            "ud" => Ok(Scenario::UD),
            "du" => Ok(Scenario::DU),
            "dd" => Ok(Scenario::DD),
            other => Err(Error::Parse(format!(
                "unknown scenario `{other}` (expected uu, ud, du or dd)"
            ))),
        }
    }
}

impl Serialize for Scenario {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// How much channel knowledge the networks use when sharing the band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoexistenceLevel {
    /// Nobody schedules; every user transmits.
    PureInterference,
    /// Only the secondary network deactivates users.
    Asymmetric,
    /// Both networks deactivate users.
    Symmetric,
}

impl CoexistenceLevel {
    pub const ALL: [CoexistenceLevel; 3] = [
        CoexistenceLevel::PureInterference,
        CoexistenceLevel::Asymmetric,
        CoexistenceLevel::Symmetric,
    ];

    /// Scheduling only happens in uplink, so the asymmetric level needs a
    /// secondary uplink and the symmetric level a primary uplink.
    pub fn check(self, scenario: Scenario) -> Result<()> {
        match self {
            CoexistenceLevel::PureInterference => Ok(()),
            CoexistenceLevel::Asymmetric if scenario.secondary == LinkMode::Uplink => Ok(()),
            CoexistenceLevel::Symmetric if scenario.primary == LinkMode::Uplink => Ok(()),
            _ => Err(contract(format!(
                "co-existence level {self} does not exist in scenario {scenario}"
            ))),
        }
    }
}

impl fmt::Display for CoexistenceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoexistenceLevel::PureInterference => "pure",
            CoexistenceLevel::Asymmetric => "asymmetric",
            CoexistenceLevel::Symmetric => "symmetric",
        })
    }
}

impl FromStr for CoexistenceLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pure" | "pure-interference" | "pure_interference" => {
                Ok(CoexistenceLevel::PureInterference)
            }
            "asymmetric" | "asym" => Ok(CoexistenceLevel::Asymmetric),
            "symmetric" | "sym" => Ok(CoexistenceLevel::Symmetric),
            other => Err(Error::Parse(format!(
                "unknown co-existence level `{other}` (expected pure, asymmetric or symmetric)"
            ))),
        }
    }
}

/// How an uplink network picks its active users.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Keep the users with the smallest interference gains.
    LeastInterference,
    /// Search subsets using own-channel and interference gains, keeping the
    /// primary sum-rate at least `protection` times its stand-alone value.
    JointOptimization { protection: f64 },
}

/// Sizes, powers and the gain law of one system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n: u64,
    pub alpha: f64,
    pub power: f64,
    pub noise: f64,
    pub model: FadingModel,
    k: u64,
}

impl SystemParams {
    /// `k = round(n^α)`, at least 1.
    pub fn new(n: u64, alpha: f64, power: f64, noise: f64, model: FadingModel) -> Result<Self> {
        if n < 1 {
            return Err(domain("need at least one primary user"));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!("alpha must be positive, got {alpha}")));
        }
        let k = (n as f64).powf(alpha).round();
        if k > u64::MAX as f64 {
            return Err(domain(format!("n^alpha = {k:e} does not fit a user count")));
        }
        SystemParams::with_users(n, (k as u64).max(1), power, noise, model)
            .map(|p| SystemParams { alpha, ..p })
    }

    /// Explicit user counts; `alpha` is recorded as `ln k / ln n` (1 if n = 1).
    pub fn with_users(n: u64, k: u64, power: f64, noise: f64, model: FadingModel) -> Result<Self> {
        if n < 1 || k < 1 {
            return Err(domain(format!(
                "user counts must be positive, got n={n}, k={k}"
            )));
        }
        if !(power > 0.0 && power.is_finite()) {
            return Err(domain(format!(
                "transmit power must be positive, got {power}"
            )));
        }
        if !(noise > 0.0 && noise.is_finite()) {
            return Err(domain(format!("noise power must be positive, got {noise}")));
        }
        model.validate()?;
        let alpha = if n > 1 {
            (k as f64).ln() / (n as f64).ln()
        } else {
            1.0
        };
        Ok(SystemParams {
            n,
            alpha,
            power,
            noise,
            model,
            k,
        })
    }

    /// Number of secondary users.
    pub fn k(&self) -> u64 {
        self.k
    }
}

/// Stream purposes of the six gain groups of an instance.
pub mod purpose {
    pub const G_P: u64 = 0;
    pub const G_S: u64 = 1;
    pub const G_SP: u64 = 2;
    pub const G_PS: u64 = 3;
    pub const G0_SP: u64 = 4;
    pub const G0_PS: u64 = 5;
}

/// One realization of every channel and interference gain.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkInstance {
    /// Primary users' own channel gains (length n).
    pub g_p: Vec<f64>,
    /// Secondary users' own channel gains (length k).
    pub g_s: Vec<f64>,
    /// Secondary user j to primary receiver (length k).
    pub g_sp: Vec<f64>,
    /// Primary user i to secondary receiver (length n).
    pub g_ps: Vec<f64>,
    /// Secondary base station to the primary receiver.
    pub g0_sp: f64,
    /// Primary base station to the secondary receiver.
    pub g0_ps: f64,
    pub model: FadingModel,
    pub power: f64,
    pub noise: f64,
}

const DUMP_MAGIC: &str = "COEXIST-INSTANCE v1";

impl NetworkInstance {
    /// Draws all `2n + 2k + 2` gains, each group from its own sub-stream.
    pub fn generate(params: &SystemParams, key: StreamKey) -> Result<Self> {
        let n = usize::try_from(params.n).map_err(|_| domain("n too large"))?;
        let k = usize::try_from(params.k).map_err(|_| domain("k too large"))?;
        let model = params.model;
        let draw = |p: u64, len: usize| model.sample(&mut key.rng(p), len);
        Ok(NetworkInstance {
            g_p: draw(purpose::G_P, n),
            g_s: draw(purpose::G_S, k),
            g_sp: draw(purpose::G_SP, k),
            g_ps: draw(purpose::G_PS, n),
            g0_sp: model.sample_one(&mut key.rng(purpose::G0_SP)),
            g0_ps: model.sample_one(&mut key.rng(purpose::G0_PS)),
            model,
            power: params.power,
            noise: params.noise,
        })
    }

    pub fn n(&self) -> usize {
        self.g_p.len()
    }

    pub fn k(&self) -> usize {
        self.g_s.len()
    }

    /// Checks the shape and sign invariants, e.g. after loading.
    pub fn validate(&self) -> Result<()> {
        if self.g_p.is_empty() || self.g_s.is_empty() {
            return Err(contract("instance needs at least one user per network"));
        }
        if self.g_ps.len() != self.g_p.len() || self.g_sp.len() != self.g_s.len() {
            return Err(contract(format!(
                "gain vector lengths disagree: g_p {}, g_ps {}, g_s {}, g_sp {}",
                self.g_p.len(),
                self.g_ps.len(),
                self.g_s.len(),
                self.g_sp.len()
            )));
        }
        let all = self
            .g_p
            .iter()
            .chain(&self.g_s)
            .chain(&self.g_sp)
            .chain(&self.g_ps);
        if !all
            .chain([&self.g0_sp, &self.g0_ps])
            .all(|g| *g >= 0.0 && g.is_finite())
        {
            return Err(contract("gains must be finite and nonnegative"));
        }
        if !(self.power > 0.0 && self.noise > 0.0) {
            return Err(contract("power and noise must be positive"));
        }
        Ok(())
    }

    fn columns(&self) -> [(&'static str, &[f64]); 6] {
        [
            ("g_p", &self.g_p),
            ("g_s", &self.g_s),
            ("g_sp", &self.g_sp),
            ("g_ps", &self.g_ps),
            ("g0_sp", std::slice::from_ref(&self.g0_sp)),
            ("g0_ps", std::slice::from_ref(&self.g0_ps)),
        ]
    }

    /// Columnar dump: a text header naming each column and its length,
    /// then all values as little-endian f64 in header order.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{DUMP_MAGIC}")?;
        writeln!(w, "model {}", self.model)?;
        writeln!(w, "power {:e}", self.power)?;
        writeln!(w, "noise {:e}", self.noise)?;
        for (name, col) in self.columns() {
            writeln!(w, "{name} {}", col.len())?;
        }
        writeln!(w, "end")?;
        for (_, col) in self.columns() {
            for v in col {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load<R: BufRead>(mut r: R) -> Result<Self> {
        let mut line = String::new();
        let mut next_line = |r: &mut R| -> Result<String> {
            line.clear();
            if r.read_line(&mut line)? == 0 {
                return Err(Error::Parse("instance header ended early".into()));
            }
            Ok(line.trim_end().to_string())
        };
        if next_line(&mut r)? != DUMP_MAGIC {
            return Err(Error::Parse("not an instance dump".into()));
        }
        let mut model = None;
        let mut power = None;
        let mut noise = None;
        let mut lengths = Vec::new();
        loop {
            let l = next_line(&mut r)?;
            if l == "end" {
                break;
            }
            let (key, value) = l
                .split_once(' ')
                .ok_or_else(|| Error::Parse(format!("bad header line `{l}`")))?;
            let number = || {
                value
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad value in `{l}`")))
            };
            match key {
                "model" => model = Some(value.parse::<FadingModel>()?),
                "power" => power = Some(number()?),
                "noise" => noise = Some(number()?),
                _ => {
                    let len = value
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad length in `{l}`")))?;
                    lengths.push((key.to_string(), len));
                }
            }
        }
        let expected = ["g_p", "g_s", "g_sp", "g_ps", "g0_sp", "g0_ps"];
        if lengths.len() != expected.len()
            || lengths.iter().zip(expected).any(|((name, _), e)| name != e)
        {
            return Err(Error::Parse(format!("expected columns {expected:?}")));
        }
        let mut cols = Vec::with_capacity(6);
        for (name, len) in &lengths {
            let mut bytes = vec![0u8; len * 8];
            r.read_exact(&mut bytes)
                .map_err(|_| Error::Parse(format!("column `{name}` is truncated")))?;
            cols.push(
                bytes
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                    .collect::<Vec<f64>>(),
            );
        }
        let scalar = |c: &Vec<f64>, name: &str| -> Result<f64> {
            match c.as_slice() {
                [v] => Ok(*v),
                _ => Err(Error::Parse(format!("column `{name}` must hold one value"))),
            }
        };
        let inst = NetworkInstance {
            g0_sp: scalar(&cols[4], "g0_sp")?,
            g0_ps: scalar(&cols[5], "g0_ps")?,
            g_ps: std::mem::take(&mut cols[3]),
            g_sp: std::mem::take(&mut cols[2]),
            g_s: std::mem::take(&mut cols[1]),
            g_p: std::mem::take(&mut cols[0]),
            model: model.ok_or_else(|| Error::Parse("missing model line".into()))?,
            power: power.ok_or_else(|| Error::Parse("missing power line".into()))?,
            noise: noise.ok_or_else(|| Error::Parse("missing noise line".into()))?,
        };
        inst.validate()?;
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_is_rounded_power() {
        let p = SystemParams::new(3, 2.0, 1.0, 1.0, FadingModel::Rayleigh).unwrap();
        assert_eq!(p.k(), 9);
        let p = SystemParams::new(10, 0.1, 1.0, 1.0, FadingModel::Rayleigh).unwrap();
        assert_eq!(p.k(), 1);
        assert!(SystemParams::new(0, 1.0, 1.0, 1.0, FadingModel::Rayleigh).is_err());
        assert!(SystemParams::new(4, 0.0, 1.0, 1.0, FadingModel::Rayleigh).is_err());
        assert!(SystemParams::new(4, 1.0, 0.0, 1.0, FadingModel::Rayleigh).is_err());
    }

    #[test]
    fn level_scenario_consistency() {
        use CoexistenceLevel::*;
        assert_eq!(
            Scenario::UU.levels(),
            vec![PureInterference, Asymmetric, Symmetric]
        );
        assert_eq!(Scenario::UD.levels(), vec![PureInterference, Symmetric]);
        assert_eq!(Scenario::DU.levels(), vec![PureInterference, Asymmetric]);
        assert_eq!(Scenario::DD.levels(), vec![PureInterference]);
        assert!(matches!(
            Symmetric.check(Scenario::DU),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.to_string().parse::<Scenario>().unwrap(), s);
        }
        for l in CoexistenceLevel::ALL {
            assert_eq!(l.to_string().parse::<CoexistenceLevel>().unwrap(), l);
        }
    }
}
