//! Communication phase: D2D link SINR over the shared dedicated band,
//! Shannon rates, and downlink rates for BS-served devices.

use std::fmt;
use std::str::FromStr;

use crate::discovery::{D2DLink, D2DMatching, SinrReport};
use crate::error::{Error, Result};
use crate::propagation::ChannelGains;

/// Overlay partition of the system bandwidth, in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPlan {
    pub total_bandwidth: f64,
    pub d2d_bandwidth: f64,
    pub cellular_bandwidth: f64,
}

impl BandPlan {
    pub fn new(total_bandwidth: f64, d2d_bandwidth: f64) -> Result<Self> {
        if !(total_bandwidth > 0.0) || !total_bandwidth.is_finite() {
            return Err(Error::invalid(
                "total_bandwidth",
                format!("must be positive, got {total_bandwidth}"),
            ));
        }
        if !(0.0..=total_bandwidth).contains(&d2d_bandwidth) {
            return Err(Error::invalid(
                "d2d_bandwidth",
                format!("must lie in [0, {total_bandwidth}], got {d2d_bandwidth}"),
            ));
        }
        Ok(BandPlan {
            total_bandwidth,
            d2d_bandwidth,
            cellular_bandwidth: total_bandwidth - d2d_bandwidth,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SampleKind {
    Regular,
    D2dEndpoint,
    Relay,
}

impl SampleKind {
    pub const ALL: [SampleKind; 3] = [
        SampleKind::Regular,
        SampleKind::Relay,
        SampleKind::D2dEndpoint,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SampleKind::Regular => "regular",
            SampleKind::D2dEndpoint => "d2d_endpoint",
            SampleKind::Relay => "relay",
        }
    }

    pub fn is_bs_served(&self) -> bool {
        !matches!(self, SampleKind::D2dEndpoint)
    }
}

impl fmt::Display for SampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputSample {
    pub device: usize,
    pub kind: SampleKind,
    /// bits/s
    pub rate: f64,
    pub sinr: f64,
}

/// How BS-served devices share the cellular band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegularMode {
    /// Every device sees the whole cellular band.
    #[default]
    FullBand,
    /// The full-band rate divided by the number of BS-served devices in the
    /// serving sector.
    EqualShare,
}

impl RegularMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegularMode::FullBand => "full_band",
            RegularMode::EqualShare => "equal_share",
        }
    }
}

impl FromStr for RegularMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full_band" => Ok(RegularMode::FullBand),
            "equal_share" => Ok(RegularMode::EqualShare),
            other => Err(Error::invalid(
                "regular_mode",
                format!("unknown mode `{other}` (expected full_band or equal_share)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConfig {
    pub regular_mode: RegularMode,
    /// Cap relay samples at `min(BS→relay, D2D)` rate.
    pub end_to_end: bool,
    /// Noise over the D2D band, Watts.
    pub d2d_noise: f64,
}

/// `W log2(1 + sinr)`
pub fn shannon_rate(sinr: f64, bandwidth: f64) -> f64 {
    if bandwidth <= 0.0 || sinr <= 0.0 {
        0.0
    } else {
        bandwidth * sinr.ln_1p() / std::f64::consts::LN_2
    }
}

/// SINR of `link` at its receiver. Every other link interferes through its
/// relay, transmitting at that link's power.
pub fn d2d_link_sinr<G: ChannelGains + ?Sized>(
    link: &D2DLink,
    matching: &D2DMatching,
    gains: &G,
    noise: f64,
) -> Result<f64> {
    if !matching.contains(link) {
        return Err(Error::LinkNotInMatching {
            a: link.a,
            b: link.b,
        });
    }
    Ok(link_sinr_unchecked(link, matching, gains, noise))
}

fn link_sinr_unchecked<G: ChannelGains + ?Sized>(
    link: &D2DLink,
    matching: &D2DMatching,
    gains: &G,
    noise: f64,
) -> f64 {
    let rx = link.receiver();
    let signal = link.link_power() * gains.d2d_gain(link.relay, rx);
    let interference: f64 = matching
        .links
        .iter()
        .filter(|other| !(other.a == link.a && other.b == link.b))
        .map(|other| other.link_power() * gains.d2d_gain(other.relay, rx))
        .sum();
    if signal <= 0.0 {
        0.0
    } else {
        signal / (interference + noise)
    }
}

/// Downlink rate of a BS-served device. `served_in_sector` is only used in
/// equal-share mode.
pub fn regular_rate(
    report: &SinrReport,
    band: &BandPlan,
    mode: RegularMode,
    served_in_sector: usize,
) -> f64 {
    let full = shannon_rate(report.serving_sinr, band.cellular_bandwidth);
    match mode {
        RegularMode::FullBand => full,
        RegularMode::EqualShare => full / served_in_sector.max(1) as f64,
    }
}

/// One sample per device. `reports` must be indexed by device and carry the
/// serving SINR over the cellular band.
pub fn evaluate_phase<G: ChannelGains + ?Sized>(
    matching: &D2DMatching,
    band: &BandPlan,
    gains: &G,
    reports: &[SinrReport],
    config: &PhaseConfig,
) -> Vec<ThroughputSample> {
    let n = reports.len();
    let link_of = matching.link_of(n);

    let mut served_per_sector = vec![0usize; gains.sector_count()];
    for (d, r) in reports.iter().enumerate() {
        let bs_served = match link_of[d] {
            None => true,
            Some(l) => matching.links[l].relay == d,
        };
        if bs_served {
            served_per_sector[r.serving_sector] += 1;
        }
    }

    let d2d: Vec<(f64, f64)> = matching
        .links
        .iter()
        .map(|l| {
            let z = link_sinr_unchecked(l, matching, gains, config.d2d_noise);
            (z, shannon_rate(z, band.d2d_bandwidth))
        })
        .collect();

    reports
        .iter()
        .enumerate()
        .map(|(device, r)| {
            let bs = || {
                (
                    r.serving_sinr,
                    regular_rate(
                        r,
                        band,
                        config.regular_mode,
                        served_per_sector[r.serving_sector],
                    ),
                )
            };
            match link_of[device] {
                None => {
                    let (sinr, rate) = bs();
                    ThroughputSample {
                        device,
                        kind: SampleKind::Regular,
                        rate,
                        sinr,
                    }
                }
                Some(l) if matching.links[l].relay == device => {
                    let (sinr, mut rate) = bs();
                    if config.end_to_end {
                        rate = rate.min(d2d[l].1);
                    }
                    ThroughputSample {
                        device,
                        kind: SampleKind::Relay,
                        rate,
                        sinr,
                    }
                }
                Some(l) => ThroughputSample {
                    device,
                    kind: SampleKind::D2dEndpoint,
                    rate: d2d[l].1,
                    sinr: d2d[l].0,
                },
            }
        })
        .collect()
}
