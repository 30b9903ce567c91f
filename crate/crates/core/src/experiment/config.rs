//! Scenario configuration and its flat `key = value` file format.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Keys not
//! present keep their defaults, which reproduce the reference
//! scenario. Unknown keys are an error.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::antenna::AntennaPattern;
use crate::communication::{BandPlan, RegularMode};
use crate::energy::EnergyMode;
use crate::error::{Error, Result};
use crate::propagation::{Cost231Params, NoiseModel, WinnerParams, WinnerScenario, MIN_DISTANCE_M};
use crate::units::{db_to_linear, dbm_to_watts, mhz_to_hz};

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub rings: u32,
    pub cell_radius_m: f64,
    pub devices_per_site: usize,
    pub bs_power_dbm: f64,
    pub d2d_power_dbm: f64,
    /// `inf` disables pairing.
    pub delta_d2d_db: f64,
    pub total_bandwidth_mhz: f64,
    pub d2d_bandwidth_mhz: f64,
    pub carrier_mhz: f64,
    pub noise_figure_db: f64,
    pub thermal_density_dbm_hz: f64,
    pub tti_ms: f64,
    pub bs_height_m: f64,
    pub device_height_m: f64,
    pub azimuth0_deg: f64,
    pub theta_3db_deg: f64,
    pub phi_3db_deg: f64,
    pub max_attenuation_db: f64,
    pub downtilt_deg: f64,
    pub antenna_gain_dbi: f64,
    pub city_correction_db: f64,
    pub d2d_channel: WinnerScenario,
    pub min_distance_m: f64,
    pub shadowing_sigma_db: f64,
    pub regular_mode: RegularMode,
    pub end_to_end: bool,
    pub energy_mode: EnergyMode,
    pub seed: u64,
    pub drops: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            rings: 2,
            cell_radius_m: 500.0,
            devices_per_site: 400,
            bs_power_dbm: 46.0,
            d2d_power_dbm: 0.0,
            delta_d2d_db: 0.0,
            total_bandwidth_mhz: 20.0,
            d2d_bandwidth_mhz: 5.0,
            carrier_mhz: 2120.0,
            noise_figure_db: 5.0,
            thermal_density_dbm_hz: -174.0,
            tti_ms: 1.0,
            bs_height_m: 30.0,
            device_height_m: 1.5,
            azimuth0_deg: 0.0,
            theta_3db_deg: 70.0,
            phi_3db_deg: 10.0,
            max_attenuation_db: 20.0,
            downtilt_deg: 8.0,
            antenna_gain_dbi: 18.0,
            city_correction_db: 3.0,
            d2d_channel: WinnerScenario::UrbanMicroNlos,
            min_distance_m: MIN_DISTANCE_M,
            shadowing_sigma_db: 0.0,
            regular_mode: RegularMode::FullBand,
            end_to_end: false,
            energy_mode: EnergyMode::Literal,
            seed: 1,
            drops: 20,
        }
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        line,
        message: format!("cannot parse `{value}` for `{key}`"),
    })
}

fn parse_enum<T: FromStr<Err = Error>>(line: usize, value: &str) -> Result<T> {
    value.parse().map_err(|e: Error| Error::Config {
        line,
        message: e.to_string(),
    })
}

impl ScenarioConfig {
    /// Reads a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    /// Sets one key from its textual value. `line` is used for diagnostics.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        macro_rules! num {
            ($field:ident) => {
                self.$field = parse_value(line, key, value)?
            };
        }
        match key {
            "rings" => num!(rings),
            "cell_radius_m" => num!(cell_radius_m),
            "devices_per_site" => num!(devices_per_site),
            "bs_power_dbm" => num!(bs_power_dbm),
            "d2d_power_dbm" => num!(d2d_power_dbm),
            "delta_d2d_db" => num!(delta_d2d_db),
            "total_bandwidth_mhz" => num!(total_bandwidth_mhz),
            "d2d_bandwidth_mhz" => num!(d2d_bandwidth_mhz),
            "carrier_mhz" => num!(carrier_mhz),
            "noise_figure_db" => num!(noise_figure_db),
            "thermal_density_dbm_hz" => num!(thermal_density_dbm_hz),
            "tti_ms" => num!(tti_ms),
            "bs_height_m" => num!(bs_height_m),
            "device_height_m" => num!(device_height_m),
            "azimuth0_deg" => num!(azimuth0_deg),
            "theta_3db_deg" => num!(theta_3db_deg),
            "phi_3db_deg" => num!(phi_3db_deg),
            "max_attenuation_db" => num!(max_attenuation_db),
            "downtilt_deg" => num!(downtilt_deg),
            "antenna_gain_dbi" => num!(antenna_gain_dbi),
            "city_correction_db" => num!(city_correction_db),
            "min_distance_m" => num!(min_distance_m),
            "shadowing_sigma_db" => num!(shadowing_sigma_db),
            "end_to_end" => num!(end_to_end),
            "seed" => num!(seed),
            "drops" => num!(drops),
            "d2d_channel" => self.d2d_channel = parse_enum(line, value)?,
            "regular_mode" => self.regular_mode = parse_enum(line, value)?,
            "energy_mode" => self.energy_mode = parse_enum(line, value)?,
            _ => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.drops < 1 {
            return Err(Error::invalid("drops", "must be at least 1"));
        }
        if !(self.cell_radius_m > 0.0) {
            return Err(Error::invalid("cell_radius_m", "must be positive"));
        }
        if !(self.total_bandwidth_mhz > 0.0) {
            return Err(Error::invalid("total_bandwidth_mhz", "must be positive"));
        }
        if !(0.0..=self.total_bandwidth_mhz).contains(&self.d2d_bandwidth_mhz) {
            return Err(Error::invalid(
                "d2d_bandwidth_mhz",
                format!(
                    "must lie in [0, total_bandwidth_mhz = {}]",
                    self.total_bandwidth_mhz
                ),
            ));
        }
        if !(self.tti_ms > 0.0) {
            return Err(Error::invalid("tti_ms", "must be positive"));
        }
        if !(self.min_distance_m > 0.0) {
            return Err(Error::invalid("min_distance_m", "must be positive"));
        }
        if !(self.shadowing_sigma_db >= 0.0) {
            return Err(Error::invalid("shadowing_sigma_db", "must be >= 0"));
        }
        if self.delta_d2d_db.is_nan() {
            return Err(Error::invalid("delta_d2d_db", "must not be NaN"));
        }
        if !(self.bs_height_m > self.device_height_m) || !(self.device_height_m > 0.0) {
            return Err(Error::invalid(
                "bs_height_m",
                "base stations must sit above positive-height devices",
            ));
        }
        self.pattern()?;
        self.cost231()?;
        self.winner()?;
        self.noise()?;
        Ok(())
    }

    pub fn pattern(&self) -> Result<AntennaPattern> {
        AntennaPattern::new(
            self.theta_3db_deg,
            self.phi_3db_deg,
            self.max_attenuation_db,
            self.downtilt_deg,
            self.antenna_gain_dbi,
        )
    }

    pub fn cost231(&self) -> Result<Cost231Params> {
        let mut p = Cost231Params::new(
            self.carrier_mhz,
            self.bs_height_m,
            self.device_height_m,
            self.city_correction_db,
        )?;
        p.min_distance = self.min_distance_m;
        Ok(p)
    }

    pub fn winner(&self) -> Result<WinnerParams> {
        let mut p = WinnerParams::new(self.carrier_mhz / 1000.0, self.d2d_channel)?;
        p.min_distance = self.min_distance_m;
        Ok(p)
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.noise_figure_db, self.thermal_density_dbm_hz)
    }

    pub fn band_plan(&self) -> Result<BandPlan> {
        BandPlan::new(
            mhz_to_hz(self.total_bandwidth_mhz),
            mhz_to_hz(self.d2d_bandwidth_mhz),
        )
    }

    pub fn bs_power_w(&self) -> f64 {
        dbm_to_watts(self.bs_power_dbm)
    }

    pub fn d2d_power_w(&self) -> f64 {
        dbm_to_watts(self.d2d_power_dbm)
    }

    pub fn delta_linear(&self) -> f64 {
        db_to_linear(self.delta_d2d_db)
    }

    pub fn tti_s(&self) -> f64 {
        self.tti_ms * 1e-3
    }

    /// True when both configs produce identical layouts and link gains for a
    /// given seed.
    pub fn same_geometry(&self, other: &ScenarioConfig) -> bool {
        self.rings == other.rings
            && self.cell_radius_m == other.cell_radius_m
            && self.devices_per_site == other.devices_per_site
            && self.carrier_mhz == other.carrier_mhz
            && self.bs_height_m == other.bs_height_m
            && self.device_height_m == other.device_height_m
            && self.azimuth0_deg == other.azimuth0_deg
            && self.theta_3db_deg == other.theta_3db_deg
            && self.phi_3db_deg == other.phi_3db_deg
            && self.max_attenuation_db == other.max_attenuation_db
            && self.downtilt_deg == other.downtilt_deg
            && self.antenna_gain_dbi == other.antenna_gain_dbi
            && self.city_correction_db == other.city_correction_db
            && self.d2d_channel == other.d2d_channel
            && self.min_distance_m == other.min_distance_m
            && self.shadowing_sigma_db == other.shadowing_sigma_db
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_cfg_string(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("rings", &self.rings);
        kv("cell_radius_m", &self.cell_radius_m);
        kv("devices_per_site", &self.devices_per_site);
        kv("bs_power_dbm", &self.bs_power_dbm);
        kv("d2d_power_dbm", &self.d2d_power_dbm);
        kv("delta_d2d_db", &self.delta_d2d_db);
        kv("total_bandwidth_mhz", &self.total_bandwidth_mhz);
        kv("d2d_bandwidth_mhz", &self.d2d_bandwidth_mhz);
        kv("carrier_mhz", &self.carrier_mhz);
        kv("noise_figure_db", &self.noise_figure_db);
        kv("thermal_density_dbm_hz", &self.thermal_density_dbm_hz);
        kv("tti_ms", &self.tti_ms);
        kv("bs_height_m", &self.bs_height_m);
        kv("device_height_m", &self.device_height_m);
        kv("azimuth0_deg", &self.azimuth0_deg);
        kv("theta_3db_deg", &self.theta_3db_deg);
        kv("phi_3db_deg", &self.phi_3db_deg);
        kv("max_attenuation_db", &self.max_attenuation_db);
        kv("downtilt_deg", &self.downtilt_deg);
        kv("antenna_gain_dbi", &self.antenna_gain_dbi);
        kv("city_correction_db", &self.city_correction_db);
        kv("d2d_channel", &self.d2d_channel);
        kv("min_distance_m", &self.min_distance_m);
        kv("shadowing_sigma_db", &self.shadowing_sigma_db);
        kv("regular_mode", &self.regular_mode.as_str());
        kv("end_to_end", &self.end_to_end);
        kv("energy_mode", &self.energy_mode.as_str());
        kv("seed", &self.seed);
        kv("drops", &self.drops);
        s
    }
}

impl FromStr for ScenarioConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            cfg.set(key.trim(), value.trim(), line)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    D2dPowerDbm,
    DeltaD2dDb,
    D2dBandwidthMhz,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::D2dPowerDbm => "d2d_power_dbm",
            SweepAxis::DeltaD2dDb => "delta_d2d_db",
            SweepAxis::D2dBandwidthMhz => "d2d_bandwidth_mhz",
        }
    }

    pub fn apply(&self, config: &mut ScenarioConfig, value: f64) {
        match self {
            SweepAxis::D2dPowerDbm => config.d2d_power_dbm = value,
            SweepAxis::DeltaD2dDb => config.delta_d2d_db = value,
            SweepAxis::D2dBandwidthMhz => config.d2d_bandwidth_mhz = value,
        }
    }

    pub fn value_of(&self, config: &ScenarioConfig) -> f64 {
        match self {
            SweepAxis::D2dPowerDbm => config.d2d_power_dbm,
            SweepAxis::DeltaD2dDb => config.delta_d2d_db,
            SweepAxis::D2dBandwidthMhz => config.d2d_bandwidth_mhz,
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d2d_power_dbm" => Ok(SweepAxis::D2dPowerDbm),
            "delta_d2d_db" => Ok(SweepAxis::DeltaD2dDb),
            "d2d_bandwidth_mhz" => Ok(SweepAxis::D2dBandwidthMhz),
            other => Err(Error::UnknownAxis(other.to_string())),
        }
    }
}
