use rayon::prelude::*;

use super::config::{ScenarioConfig, SweepAxis};
use super::metrics::{AggregatedMetrics, MeanRates, MetricsBundle};
use crate::communication::{evaluate_phase, BandPlan, PhaseConfig, ThroughputSample};
use crate::discovery::{
    build_short_reports, pair_devices_with_power, serving_bs, D2DMatching, DiscoveryParams,
    SinrReport,
};
use crate::energy::{energy_efficiency, energy_with_d2d, energy_without_d2d, EnergyCounts};
use crate::error::{Error, Result};
use crate::geometry::{build_hex_layout, place_devices, sectorize, DeviceSet, Sector, SitePlan};
use crate::propagation::{ChannelGains, LinkGainMatrix, Shadowing};

/// Index of the site whose devices contribute to the metrics.
pub const CENTRAL_SITE: usize = 0;

const SHADOWING_SEED_SALT: u64 = 0x5eed_5ad0_0000_0001;

/// Layout and link gains of one drop. Everything here is independent of
/// transmit powers, thresholds and the bandwidth split, so one context can
/// evaluate a whole sweep.
#[derive(Debug, Clone)]
pub struct DropContext {
    pub drop_seed: u64,
    pub plan: SitePlan,
    pub sectors: Vec<Sector>,
    pub devices: DeviceSet,
    pub gains: LinkGainMatrix,
    /// Total device→device gain received by each device.
    pub totals: Vec<f64>,
    geometry: ScenarioConfig,
}

/// Everything a drop produced, network-wide.
#[derive(Debug, Clone)]
pub struct DropOutcome {
    pub reports: Vec<SinrReport>,
    pub matching: D2DMatching,
    pub samples: Vec<ThroughputSample>,
    pub baseline_samples: Vec<ThroughputSample>,
    /// Devices counted in the metrics.
    pub population: Vec<usize>,
    pub bundle: MetricsBundle,
}

impl DropContext {
    pub fn build(config: &ScenarioConfig, drop_seed: u64) -> Result<Self> {
        config.validate()?;
        let plan = build_hex_layout(config.rings, config.cell_radius_m)?;
        let sectors = sectorize(
            &plan,
            config.azimuth0_deg,
            config.bs_height_m,
            config.downtilt_deg,
            &config.pattern()?,
        )?;
        let mut devices = place_devices(
            &plan,
            config.devices_per_site,
            config.device_height_m,
            drop_seed,
        );
        let shadowing = Shadowing {
            sigma_db: config.shadowing_sigma_db,
            seed: drop_seed ^ SHADOWING_SEED_SALT,
        };
        let gains = LinkGainMatrix::build(
            &sectors,
            &devices,
            &config.cost231()?,
            &config.winner()?,
            shadowing,
        )?;
        // The strongest sector does not depend on power or noise.
        for d in 0..devices.len() {
            devices.assign_serving(d, serving_bs(d, &gains, 1.0, 0.0).0);
        }
        let totals = gains.received_d2d_totals();
        Ok(DropContext {
            drop_seed,
            plan,
            sectors,
            devices,
            gains,
            totals,
            geometry: config.clone(),
        })
    }

    /// Runs discovery and communication for `config`, which must share this
    /// context's geometry.
    pub fn evaluate(&self, config: &ScenarioConfig) -> Result<DropOutcome> {
        if !self.geometry.same_geometry(config) {
            return Err(Error::invalid(
                "config",
                "geometry differs from the drop context",
            ));
        }
        config.validate()?;
        let band = config.band_plan()?;
        let noise = config.noise()?;
        let bs_power = config.bs_power_w();
        let d2d_power = config.d2d_power_w();
        let params = DiscoveryParams {
            bs_power,
            d2d_power,
            discovery_noise: noise.power_watts(band.total_bandwidth),
            cellular_noise: noise.power_watts(band.cellular_bandwidth),
        };
        let delta = config.delta_linear();
        let reports = build_short_reports(&self.gains, &params, delta, &self.totals);
        let matching = pair_devices_with_power(&reports, delta, (d2d_power, d2d_power))?;
        let phase = PhaseConfig {
            regular_mode: config.regular_mode,
            end_to_end: config.end_to_end,
            d2d_noise: noise.power_watts(band.d2d_bandwidth),
        };
        let samples = evaluate_phase(&matching, &band, &self.gains, &reports, &phase);

        // No-D2D reference: the whole band goes to the BSs.
        let baseline_band = BandPlan::new(band.total_bandwidth, 0.0)?;
        let baseline_noise = noise.power_watts(band.total_bandwidth);
        let baseline_reports: Vec<SinrReport> = (0..self.devices.len())
            .map(|d| {
                let (sector, sinr) = serving_bs(d, &self.gains, bs_power, baseline_noise);
                SinrReport {
                    device: d,
                    candidates: Vec::new(),
                    serving_sinr: sinr,
                    serving_sector: sector,
                }
            })
            .collect();
        let no_links = D2DMatching {
            links: Vec::new(),
            regular_devices: (0..self.devices.len()).collect(),
        };
        let baseline_samples = evaluate_phase(
            &no_links,
            &baseline_band,
            &self.gains,
            &baseline_reports,
            &phase,
        );

        // Studied population: regular devices dropped in the central site,
        // plus both ends of every pair whose relay was dropped there.
        let home = &self.devices.home_site;
        let link_of = matching.link_of(self.devices.len());
        let population: Vec<usize> = (0..self.devices.len())
            .filter(|&d| match link_of[d] {
                None => home[d] == CENTRAL_SITE,
                Some(l) => home[matching.links[l].relay] == CENTRAL_SITE,
            })
            .collect();
        let pairs = matching
            .links
            .iter()
            .filter(|l| home[l.relay] == CENTRAL_SITE)
            .count();
        let counts = EnergyCounts::from_pairs(population.len() - 2 * pairs, pairs);

        let tti = config.tti_s();
        let energy = energy_with_d2d(bs_power, d2d_power, counts, tti, config.energy_mode)?;
        let baseline_energy = energy_without_d2d(bs_power, counts.total, tti);

        let pop_samples: Vec<ThroughputSample> = population.iter().map(|&d| samples[d]).collect();
        let baseline_rates: Vec<f64> = population
            .iter()
            .map(|&d| baseline_samples[d].rate)
            .collect();
        let ee = |rate: f64, e: f64| {
            if counts.total == 0 {
                Ok(0.0)
            } else {
                energy_efficiency(rate, e, tti, band.total_bandwidth)
            }
        };
        let total_rate: f64 = pop_samples.iter().map(|s| s.rate).sum();
        let baseline_total: f64 = baseline_rates.iter().sum();

        let bundle = MetricsBundle {
            drop_seed: self.drop_seed,
            paired_fraction: counts.paired_fraction(),
            mean_rates: MeanRates::from_samples(&pop_samples),
            ee: ee(total_rate, energy.total)?,
            baseline_ee: ee(baseline_total, baseline_energy)?,
            samples: pop_samples,
            baseline_rates,
            energy,
            baseline_energy,
        };
        Ok(DropOutcome {
            reports,
            matching,
            samples,
            baseline_samples,
            population,
            bundle,
        })
    }
}

/// Full pipeline for one drop.
pub fn run_drop(config: &ScenarioConfig, drop_seed: u64) -> Result<MetricsBundle> {
    Ok(DropContext::build(config, drop_seed)?
        .evaluate(config)?
        .bundle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub config: ScenarioConfig,
    pub metrics: AggregatedMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

/// Seed of drop `i`.
pub fn drop_seed(config: &ScenarioConfig, i: usize) -> u64 {
    config.seed.wrapping_add(i as u64)
}

/// One aggregated row per value, over `config.drops` drops seeded
/// `seed + i`. Each drop's layout is built once and shared by all values.
pub fn run_sweep(
    config: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    execution: Execution,
) -> Result<SweepTable> {
    config.validate()?;
    let configs: Vec<ScenarioConfig> = values
        .iter()
        .map(|&v| {
            let mut c = config.clone();
            axis.apply(&mut c, v);
            c.validate().map(|_| c)
        })
        .collect::<Result<_>>()?;
    if configs.is_empty() {
        return Ok(SweepTable {
            axis,
            rows: Vec::new(),
        });
    }

    let one_drop = |i: usize| -> Result<Vec<MetricsBundle>> {
        let ctx = DropContext::build(config, drop_seed(config, i))?;
        configs
            .iter()
            .map(|c| Ok(ctx.evaluate(c)?.bundle))
            .collect()
    };
    let per_drop: Vec<Vec<MetricsBundle>> = match execution {
        Execution::Serial => (0..config.drops).map(one_drop).collect::<Result<_>>()?,
        Execution::Parallel => (0..config.drops)
            .into_par_iter()
            .map(one_drop)
            .collect::<Result<_>>()?,
    };

    let rows = configs
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            let bundles: Vec<MetricsBundle> = per_drop.iter().map(|d| d[k].clone()).collect();
            SweepRow {
                axis_value: values[k],
                config: c,
                metrics: AggregatedMetrics::from_drops(&bundles),
            }
        })
        .collect();
    Ok(SweepTable { axis, rows })
}

/// Single scenario point, reported on the D2D power axis.
pub fn run_scenario(config: &ScenarioConfig, execution: Execution) -> Result<SweepTable> {
    run_sweep(
        config,
        SweepAxis::D2dPowerDbm,
        &[config.d2d_power_dbm],
        execution,
    )
}

/// The no-D2D reference: pairing disabled and no band set aside.
pub fn baseline_config(config: &ScenarioConfig) -> ScenarioConfig {
    let mut c = config.clone();
    c.delta_d2d_db = f64::INFINITY;
    c.d2d_bandwidth_mhz = 0.0;
    c
}
