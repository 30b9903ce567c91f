//! Radiated-energy accounting over one TTI, with and without D2D, and the
//! derived energy efficiency in bps/J/Hz.

use std::str::FromStr;

use crate::error::{Error, Result};

/// Device population of the studied site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnergyCounts {
    /// `N_d`, BS-served devices outside any pair.
    pub regular: usize,
    /// `N_r`, one per pair.
    pub relays: usize,
    /// `N_d2d`
    pub pairs: usize,
    /// `N`
    pub total: usize,
}

impl EnergyCounts {
    pub fn from_pairs(regular: usize, pairs: usize) -> Self {
        EnergyCounts {
            regular,
            relays: pairs,
            pairs,
            total: regular + 2 * pairs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total != self.regular + 2 * self.pairs {
            return Err(Error::InconsistentCounts(format!(
                "N = {} but N_d + 2 N_d2d = {}",
                self.total,
                self.regular + 2 * self.pairs
            )));
        }
        if self.relays != self.pairs {
            return Err(Error::InconsistentCounts(format!(
                "N_r = {} but N_d2d = {}",
                self.relays, self.pairs
            )));
        }
        Ok(())
    }

    /// Fraction of devices that belong to a pair.
    pub fn paired_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            2.0 * self.pairs as f64 / self.total as f64
        }
    }
}

/// Which devices the BS-serving term charges for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyMode {
    /// `E1 = P_bs (N_d + N_r) T`
    #[default]
    Literal,
    /// `E1 = P_bs N_d T`: relays are not charged a BS link of their own.
    RelayExcluded,
}

impl EnergyMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnergyMode::Literal => "literal",
            EnergyMode::RelayExcluded => "relay_excluded",
        }
    }
}

impl FromStr for EnergyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(EnergyMode::Literal),
            "relay_excluded" => Ok(EnergyMode::RelayExcluded),
            other => Err(Error::invalid(
                "energy_mode",
                format!("unknown mode `{other}` (expected literal or relay_excluded)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// BS-serving energy, J.
    pub e1: f64,
    /// D2D transmit energy, J.
    pub e2: f64,
    pub total: f64,
    pub tti: f64,
    pub counts: EnergyCounts,
}

/// `P_bs N T`
pub fn energy_without_d2d(p_bs: f64, n: usize, tti: f64) -> f64 {
    p_bs * n as f64 * tti
}

pub fn energy_with_d2d(
    p_bs: f64,
    p_d2d: f64,
    counts: EnergyCounts,
    tti: f64,
    mode: EnergyMode,
) -> Result<EnergyBreakdown> {
    counts.validate()?;
    if !(p_bs >= 0.0 && p_d2d >= 0.0 && tti >= 0.0) {
        return Err(Error::invalid(
            "energy",
            "powers and TTI must be non-negative",
        ));
    }
    let bs_links = match mode {
        EnergyMode::Literal => counts.regular + counts.relays,
        EnergyMode::RelayExcluded => counts.regular,
    };
    let e1 = p_bs * bs_links as f64 * tti;
    let e2 = p_d2d * counts.pairs as f64 * tti;
    Ok(EnergyBreakdown {
        e1,
        e2,
        total: e1 + e2,
        tti,
        counts,
    })
}

/// Delivered rate per Watt of mean radiated power, per Hz of system band.
pub fn energy_efficiency(
    total_rate: f64,
    energy: f64,
    tti: f64,
    total_bandwidth: f64,
) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::invalid(
            "energy",
            format!("must be positive, got {energy}"),
        ));
    }
    if !(total_bandwidth > 0.0) {
        return Err(Error::invalid(
            "total_bandwidth",
            format!("must be positive, got {total_bandwidth}"),
        ));
    }
    if !(tti > 0.0) {
        return Err(Error::invalid(
            "tti",
            format!("must be positive, got {tti}"),
        ));
    }
    Ok(total_rate / (energy / tti) / total_bandwidth)
}
