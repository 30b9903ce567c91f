//! Path loss, thermal noise and antenna-inclusive link gains.
//!
//! BS→device links use Cost231-Hata with the sector antenna pattern on the
//! base-station side; device→device links use a WINNER II single-slope
//! form. Devices are omnidirectional (0 dBi). Both models clamp distances
//! below [`MIN_DISTANCE_M`].

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{DeviceSet, Point, Sector};
use crate::units::db_to_linear;

/// Close-in distance clamp applied to both path-loss models.
pub const MIN_DISTANCE_M: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost231Params {
    pub carrier_mhz: f64,
    pub bs_height: f64,
    pub device_height: f64,
    /// `C_m`: 0 dB for medium cities, 3 dB for metropolitan centres.
    pub city_correction: f64,
    pub min_distance: f64,
}

impl Cost231Params {
    pub fn new(
        carrier_mhz: f64,
        bs_height: f64,
        device_height: f64,
        city_correction: f64,
    ) -> Result<Self> {
        if !(carrier_mhz > 0.0) {
            return Err(Error::invalid(
                "carrier_mhz",
                format!("must be positive, got {carrier_mhz}"),
            ));
        }
        if !(bs_height > 0.0) || !(device_height > 0.0) {
            return Err(Error::invalid("height", "antenna heights must be positive"));
        }
        Ok(Cost231Params {
            carrier_mhz,
            bs_height,
            device_height,
            city_correction,
            min_distance: MIN_DISTANCE_M,
        })
    }

    /// Mobile antenna correction `a(h_m)` for small and medium cities.
    pub fn mobile_correction(&self) -> f64 {
        let lf = self.carrier_mhz.log10();
        (1.1 * lf - 0.7) * self.device_height - (1.56 * lf - 0.8)
    }

    /// Path-loss increase per decade of distance.
    pub fn slope_db_per_decade(&self) -> f64 {
        44.9 - 6.55 * self.bs_height.log10()
    }
}

pub fn pathloss_cost231(p: &Cost231Params, distance: f64) -> f64 {
    let d_km = distance.max(p.min_distance) / 1000.0;
    46.3 + 33.9 * p.carrier_mhz.log10() - 13.82 * p.bs_height.log10() - p.mobile_correction()
        + p.slope_db_per_decade() * d_km.log10()
        + p.city_correction
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WinnerScenario {
    /// Urban microcell, line of sight.
    UrbanMicroLos,
    /// Urban microcell, non line of sight (hexagonal-layout form).
    #[default]
    UrbanMicroNlos,
}

impl WinnerScenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            WinnerScenario::UrbanMicroLos => "umi_los",
            WinnerScenario::UrbanMicroNlos => "umi_nlos",
        }
    }
}

impl fmt::Display for WinnerScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WinnerScenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "umi_los" => Ok(WinnerScenario::UrbanMicroLos),
            "umi_nlos" => Ok(WinnerScenario::UrbanMicroNlos),
            other => Err(Error::invalid(
                "d2d_channel",
                format!("unknown scenario `{other}` (expected umi_los or umi_nlos)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinnerParams {
    pub carrier_ghz: f64,
    pub scenario: WinnerScenario,
    pub min_distance: f64,
}

impl WinnerParams {
    pub fn new(carrier_ghz: f64, scenario: WinnerScenario) -> Result<Self> {
        if !(carrier_ghz > 0.0) {
            return Err(Error::invalid(
                "carrier_ghz",
                format!("must be positive, got {carrier_ghz}"),
            ));
        }
        Ok(WinnerParams {
            carrier_ghz,
            scenario,
            min_distance: MIN_DISTANCE_M,
        })
    }

    /// `(intercept, slope)` such that `PL = intercept + slope * log10(d_m)`.
    pub fn coefficients(&self) -> (f64, f64) {
        match self.scenario {
            WinnerScenario::UrbanMicroLos => (41.0 + 20.0 * (self.carrier_ghz / 5.0).log10(), 22.7),
            WinnerScenario::UrbanMicroNlos => (22.7 + 26.0 * self.carrier_ghz.log10(), 36.7),
        }
    }
}

pub fn pathloss_winner(p: &WinnerParams, distance: f64) -> f64 {
    let (intercept, slope) = p.coefficients();
    intercept + slope * distance.max(p.min_distance).log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub noise_figure: f64,
    pub thermal_density: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            noise_figure: 5.0,
            thermal_density: -174.0,
        }
    }
}

impl NoiseModel {
    pub fn new(noise_figure: f64, thermal_density: f64) -> Result<Self> {
        if !(noise_figure >= 0.0) {
            return Err(Error::invalid(
                "noise_figure",
                format!("must be >= 0, got {noise_figure}"),
            ));
        }
        Ok(NoiseModel {
            noise_figure,
            thermal_density,
        })
    }

    /// Noise power in Watts; zero for a zero-width band.
    pub fn power_watts(&self, bandwidth: f64) -> f64 {
        if bandwidth <= 0.0 {
            0.0
        } else {
            crate::units::dbm_to_watts(noise_power(self, bandwidth))
        }
    }
}

/// Receiver noise power in dBm over `bandwidth` Hz.
pub fn noise_power(n: &NoiseModel, bandwidth: f64) -> f64 {
    n.thermal_density + 10.0 * bandwidth.log10() + n.noise_figure
}

/// Deterministic log-normal shadowing. A zero sigma disables it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shadowing {
    pub sigma_db: f64,
    pub seed: u64,
}

impl Shadowing {
    pub const OFF: Shadowing = Shadowing {
        sigma_db: 0.0,
        seed: 0,
    };

    pub fn is_enabled(&self) -> bool {
        self.sigma_db > 0.0
    }

    fn sample_db(&self, stream: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let z: f64 = StandardNormal.sample(&mut rng);
        self.sigma_db * z
    }

    /// Symmetric in `(a, b)`.
    pub fn d2d_offset_db(&self, a: usize, b: usize) -> f64 {
        if !self.is_enabled() {
            return 0.0;
        }
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.sample_db(((lo as u64) << 32 | hi as u64) | (1 << 63))
    }

    /// One draw per (site, device), shared by the three sectors of a site.
    pub fn bs_offset_db(&self, site: usize, device: usize) -> f64 {
        if !self.is_enabled() {
            return 0.0;
        }
        self.sample_db((site as u64) << 32 | device as u64)
    }
}

/// Linear BS→device power gain including the sector antenna.
pub fn bs_link_gain(
    sector: &Sector,
    cost: &Cost231Params,
    device: &Point,
    device_height: f64,
) -> Result<f64> {
    Ok(db_to_linear(bs_link_gain_db(
        sector,
        cost,
        device,
        device_height,
    )?))
}

pub fn bs_link_gain_db(
    sector: &Sector,
    cost: &Cost231Params,
    device: &Point,
    device_height: f64,
) -> Result<f64> {
    let (theta, phi) = sector.offset_angles(device, device_height)?;
    let d = sector.position.distance(device);
    Ok(sector.pattern.element_gain(theta, phi) - pathloss_cost231(cost, d))
}

/// Linear device↔device power gain (omnidirectional, symmetric).
pub fn d2d_link_gain(p: &WinnerParams, u: &Point, v: &Point) -> f64 {
    db_to_linear(-pathloss_winner(p, u.distance(v)))
}

/// Linear power gains of every link in a drop.
///
/// Implementations must return `d2d_gain(a, b) == d2d_gain(b, a)`.
pub trait ChannelGains: Sync {
    fn device_count(&self) -> usize;
    fn sector_count(&self) -> usize;
    fn bs_gain(&self, sector: usize, device: usize) -> f64;
    fn d2d_gain(&self, from: usize, to: usize) -> f64;

    /// Appends every peer whose gain towards `device` is at least `min_gain`,
    /// in ascending peer order.
    fn strong_peers(&self, device: usize, min_gain: f64, out: &mut Vec<(usize, f64)>) {
        for v in 0..self.device_count() {
            if v != device {
                let g = self.d2d_gain(v, device);
                if g >= min_gain {
                    out.push((v, g));
                }
            }
        }
    }

    /// `Σ_{d≠u} g(d→u)` for every device `u`, summed in ascending `d`.
    fn received_d2d_totals(&self) -> Vec<f64> {
        let n = self.device_count();
        (0..n)
            .map(|u| {
                (0..n)
                    .filter(|&d| d != u)
                    .fold(0.0, |acc, d| acc + self.d2d_gain(d, u))
            })
            .collect()
    }
}

/// Dense gain table, used for hand-specified instances.
#[derive(Debug, Clone, PartialEq)]
pub struct GainTable {
    devices: usize,
    sectors: usize,
    bs: Vec<f64>,
    d2d: Vec<f64>,
}

impl GainTable {
    pub fn new(devices: usize, sectors: usize) -> Self {
        GainTable {
            devices,
            sectors,
            bs: vec![0.0; devices * sectors],
            d2d: vec![0.0; devices * devices],
        }
    }

    pub fn set_bs(&mut self, sector: usize, device: usize, gain: f64) {
        self.bs[device * self.sectors + sector] = gain;
    }

    /// Sets both directions.
    pub fn set_d2d(&mut self, a: usize, b: usize, gain: f64) {
        self.d2d[a * self.devices + b] = gain;
        self.d2d[b * self.devices + a] = gain;
    }
}

impl ChannelGains for GainTable {
    fn device_count(&self) -> usize {
        self.devices
    }
    fn sector_count(&self) -> usize {
        self.sectors
    }
    fn bs_gain(&self, sector: usize, device: usize) -> f64 {
        self.bs[device * self.sectors + sector]
    }
    fn d2d_gain(&self, from: usize, to: usize) -> f64 {
        self.d2d[from * self.devices + to]
    }
}

/// Gains of a geometric drop. BS→device gains are precomputed; the
/// device↔device part is evaluated from positions on demand, since a full
/// table for thousands of devices would not fit comfortably in memory.
#[derive(Debug, Clone)]
pub struct LinkGainMatrix {
    sectors: usize,
    bs: Vec<f64>,
    positions: Vec<Point>,
    winner: WinnerParams,
    shadowing: Shadowing,
    /// `10^(-intercept/10)`
    d2d_scale: f64,
    /// `-slope/20`, applied to squared distance.
    d2d_exponent: f64,
    min_distance_sq: f64,
}

impl LinkGainMatrix {
    pub fn build(
        sectors: &[Sector],
        devices: &DeviceSet,
        cost: &Cost231Params,
        winner: &WinnerParams,
        shadowing: Shadowing,
    ) -> Result<Self> {
        let n = devices.len();
        let mut bs = Vec::with_capacity(n * sectors.len());
        for (device, p) in devices.positions.iter().enumerate() {
            for s in sectors {
                let mut g_db = bs_link_gain_db(s, cost, p, devices.device_height)?;
                g_db -= shadowing.bs_offset_db(s.site_index, device);
                bs.push(db_to_linear(g_db));
            }
        }
        let (intercept, slope) = winner.coefficients();
        Ok(LinkGainMatrix {
            sectors: sectors.len(),
            bs,
            positions: devices.positions.clone(),
            winner: *winner,
            shadowing,
            d2d_scale: db_to_linear(-intercept),
            d2d_exponent: -slope / 20.0,
            min_distance_sq: winner.min_distance * winner.min_distance,
        })
    }

    pub fn winner(&self) -> &WinnerParams {
        &self.winner
    }

    #[inline]
    fn geometric_gain(&self, d_sq: f64) -> f64 {
        self.d2d_scale * d_sq.max(self.min_distance_sq).powf(self.d2d_exponent)
    }
}

impl ChannelGains for LinkGainMatrix {
    fn device_count(&self) -> usize {
        self.positions.len()
    }

    fn sector_count(&self) -> usize {
        self.sectors
    }

    #[inline]
    fn bs_gain(&self, sector: usize, device: usize) -> f64 {
        self.bs[device * self.sectors + sector]
    }

    #[inline]
    fn d2d_gain(&self, from: usize, to: usize) -> f64 {
        let g = self.geometric_gain(self.positions[from].distance_squared(&self.positions[to]));
        if self.shadowing.is_enabled() {
            g * db_to_linear(-self.shadowing.d2d_offset_db(from, to))
        } else {
            g
        }
    }

    fn strong_peers(&self, device: usize, min_gain: f64, out: &mut Vec<(usize, f64)>) {
        if self.shadowing.is_enabled() || !(min_gain > 0.0) {
            for v in 0..self.positions.len() {
                if v != device {
                    let g = self.d2d_gain(v, device);
                    if g >= min_gain {
                        out.push((v, g));
                    }
                }
            }
            return;
        }
        if min_gain > self.d2d_scale * self.min_distance_sq.powf(self.d2d_exponent) * (1.0 + 1e-9) {
            return;
        }
        // Gain is monotone in distance: prefilter on squared distance with
        // slack, then confirm against the exact gain.
        let max_d_sq = (min_gain / self.d2d_scale).powf(1.0 / self.d2d_exponent) * (1.0 + 1e-9);
        let here = self.positions[device];
        for (v, p) in self.positions.iter().enumerate() {
            if v == device {
                continue;
            }
            let d_sq = here.distance_squared(p);
            if d_sq <= max_d_sq {
                let g = self.geometric_gain(d_sq);
                if g >= min_gain {
                    out.push((v, g));
                }
            }
        }
    }

    fn received_d2d_totals(&self) -> Vec<f64> {
        if self.shadowing.is_enabled() {
            let n = self.positions.len();
            return (0..n)
                .map(|u| {
                    (0..n)
                        .filter(|&d| d != u)
                        .fold(0.0, |acc, d| acc + self.d2d_gain(d, u))
                })
                .collect();
        }
        // Visit each unordered pair once. Additions into `totals[u]` still
        // arrive in ascending peer order, so the result is bit-identical to
        // the row-wise default.
        let n = self.positions.len();
        let mut totals = vec![0.0; n];
        for i in 0..n {
            let pi = self.positions[i];
            let mut row = totals[i];
            for (t, pj) in totals[i + 1..].iter_mut().zip(&self.positions[i + 1..]) {
                let g = self.geometric_gain(pi.distance_squared(pj));
                row += g;
                *t += g;
            }
            totals[i] = row;
        }
        totals
    }
}
