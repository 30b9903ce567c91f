use std::collections::BTreeMap;

use crate::communication::{SampleKind, ThroughputSample};
use crate::energy::EnergyBreakdown;
use crate::error::{Error, Result};

/// Grid used for the emitted throughput CDFs: log-spaced from 10 kbit/s to
/// 1 Gbit/s.
pub const CDF_GRID_POINTS: usize = 200;
pub const CDF_GRID_MIN_BPS: f64 = 1e4;
pub const CDF_GRID_MAX_BPS: f64 = 1e9;

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            let step = (b - a) / (points - 1) as f64;
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        hi
                    } else {
                        10f64.powf(a + step * i as f64)
                    }
                })
                .collect()
        }
    }
}

pub fn default_cdf_grid() -> Vec<f64> {
    log_grid(CDF_GRID_MIN_BPS, CDF_GRID_MAX_BPS, CDF_GRID_POINTS)
}

/// `F(x) = #{s <= x} / n` at each grid point.
pub fn empirical_cdf(samples: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(grid
        .iter()
        .map(|&x| sorted.partition_point(|&s| s <= x) as f64 / n)
        .collect())
}

/// Smallest sample `x` with `F(x) >= q`.
pub fn quantile(samples: &[f64], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let rank = ((q.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n);
    Ok(sorted[rank - 1])
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanRates {
    /// Over D2D endpoints.
    pub d2d: Option<f64>,
    /// Over BS-served devices (regular and relay).
    pub regular: Option<f64>,
    /// Over every device.
    pub global: Option<f64>,
}

impl MeanRates {
    pub fn from_samples(samples: &[ThroughputSample]) -> Self {
        MeanRates {
            d2d: mean(
                samples
                    .iter()
                    .filter(|s| !s.kind.is_bs_served())
                    .map(|s| s.rate),
            ),
            regular: mean(
                samples
                    .iter()
                    .filter(|s| s.kind.is_bs_served())
                    .map(|s| s.rate),
            ),
            global: mean(samples.iter().map(|s| s.rate)),
        }
    }
}

/// Metrics of one drop, restricted to the studied (central) site.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsBundle {
    pub drop_seed: u64,
    pub paired_fraction: f64,
    pub samples: Vec<ThroughputSample>,
    /// Rates of the same devices in the no-D2D reference scenario.
    pub baseline_rates: Vec<f64>,
    pub mean_rates: MeanRates,
    pub energy: EnergyBreakdown,
    pub baseline_energy: f64,
    /// bps/J/Hz; zero for an empty population.
    pub ee: f64,
    pub baseline_ee: f64,
}

impl MetricsBundle {
    pub fn rates_of(&self, kind: SampleKind) -> Vec<f64> {
        self.samples
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| s.rate)
            .collect()
    }

    pub fn total_rate(&self) -> f64 {
        self.samples.iter().map(|s| s.rate).sum()
    }
}

/// Mean and unbiased variance across drops.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stat {
    pub mean: f64,
    pub variance: f64,
    pub count: usize,
}

impl Stat {
    pub fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Stat {
                mean: f64::NAN,
                variance: f64::NAN,
                count,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let variance = if count > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        Stat {
            mean,
            variance,
            count,
        }
    }
}

/// Drop-averaged metrics for one scenario point.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedMetrics {
    pub drops: usize,
    pub paired_fraction: Stat,
    pub mean_d2d_rate: Stat,
    pub mean_regular_rate: Stat,
    pub mean_global_rate: Stat,
    pub e1: Stat,
    pub e2: Stat,
    pub total_energy: Stat,
    pub baseline_energy: Stat,
    pub ee: Stat,
    pub baseline_ee: Stat,
    /// Rates pooled over all drops, per kind.
    pub samples: BTreeMap<SampleKind, Vec<f64>>,
    pub baseline_samples: Vec<f64>,
}

impl AggregatedMetrics {
    /// Ordered reduction over `drops`; the result depends only on the order
    /// of the slice.
    pub fn from_drops(drops: &[MetricsBundle]) -> Self {
        let stat = |f: &dyn Fn(&MetricsBundle) -> f64| {
            Stat::from_values(&drops.iter().map(f).collect::<Vec<_>>())
        };
        let stat_opt = |f: &dyn Fn(&MetricsBundle) -> Option<f64>| {
            Stat::from_values(&drops.iter().filter_map(f).collect::<Vec<_>>())
        };
        let mut samples: BTreeMap<SampleKind, Vec<f64>> = BTreeMap::new();
        let mut baseline_samples = Vec::new();
        for d in drops {
            for s in &d.samples {
                samples.entry(s.kind).or_default().push(s.rate);
            }
            baseline_samples.extend_from_slice(&d.baseline_rates);
        }
        AggregatedMetrics {
            drops: drops.len(),
            paired_fraction: stat(&|d| d.paired_fraction),
            mean_d2d_rate: stat_opt(&|d| d.mean_rates.d2d),
            mean_regular_rate: stat_opt(&|d| d.mean_rates.regular),
            mean_global_rate: stat_opt(&|d| d.mean_rates.global),
            e1: stat(&|d| d.energy.e1),
            e2: stat(&|d| d.energy.e2),
            total_energy: stat(&|d| d.energy.total),
            baseline_energy: stat(&|d| d.baseline_energy),
            ee: stat(&|d| d.ee),
            baseline_ee: stat(&|d| d.baseline_ee),
            samples,
            baseline_samples,
        }
    }

    pub fn rates(&self, kind: SampleKind) -> &[f64] {
        self.samples.get(&kind).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cdf_examples() {
        let s = [1.0, 2.0, 3.0];
        assert_eq!(empirical_cdf(&s, &[2.0]).unwrap(), vec![2.0 / 3.0]);
        assert_eq!(empirical_cdf(&s, &[0.5, 10.0]).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(
            empirical_cdf(&[], &[1.0]),
            Err(Error::EmptySamples)
        ));
    }

    #[test]
    fn quantile_examples() {
        let s = [5.0, 1.0, 4.0, 2.0, 3.0];
        assert_eq!(quantile(&s, 0.0).unwrap(), 1.0);
        assert_eq!(quantile(&s, 0.1).unwrap(), 1.0);
        assert_eq!(quantile(&s, 0.2).unwrap(), 1.0);
        assert_eq!(quantile(&s, 0.21).unwrap(), 2.0);
        assert_eq!(quantile(&s, 1.0).unwrap(), 5.0);
        assert!(quantile(&[], 0.5).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = default_cdf_grid();
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 1e4);
        assert_eq!(g[199], 1e9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(log_grid(1.0, 10.0, 0).is_empty());
        assert_eq!(log_grid(3.0, 10.0, 1), vec![3.0]);
    }

    #[test]
    fn stat_values() {
        let s = Stat::from_values(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(Stat::from_values(&[7.0]).variance, 0.0);
        assert_eq!(Stat::from_values(&[]).count, 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn cdf_monotone(
            samples in proptest::collection::vec(0.0f64..1e9, 1..60),
            mut grid in proptest::collection::vec(0.0f64..1.2e9, 1..60),
        ) {
            grid.sort_by(f64::total_cmp);
            let f = empirical_cdf(&samples, &grid).unwrap();
            prop_assert!(f.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(f.iter().all(|&p| (0.0..=1.0).contains(&p)));
            let max = samples.iter().cloned().fold(f64::MIN, f64::max);
            let min = samples.iter().cloned().fold(f64::MAX, f64::min);
            let ends = empirical_cdf(&samples, &[min - 1.0, max]).unwrap();
            prop_assert_eq!(ends, vec![0.0, 1.0]);
        }
    }
}
