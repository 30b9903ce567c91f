//! Discovery phase: serving-BS SINR, pairwise discovery SINR with every
//! device transmitting on one shared discovery channel, and the central
//! controller's greedy pairing with relay designation.

use std::collections::HashSet;
use std::io::Write;

use crate::error::{Error, Result};
use crate::propagation::ChannelGains;

/// Radio parameters of the discovery phase, in Watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscoveryParams {
    pub bs_power: f64,
    pub d2d_power: f64,
    /// Noise over the discovery channel.
    pub discovery_noise: f64,
    /// Noise over the cellular band, used for the serving-BS SINR.
    pub cellular_noise: f64,
}

impl DiscoveryParams {
    /// Every power and noise term multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        DiscoveryParams {
            bs_power: self.bs_power * k,
            d2d_power: self.d2d_power * k,
            discovery_noise: self.discovery_noise * k,
            cellular_noise: self.cellular_noise * k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub peer: usize,
    /// Linear SINR measured at the reporting device from `peer`.
    pub sinr: f64,
}

/// What one device sends to the D2D controller.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrReport {
    pub device: usize,
    /// Sorted by peer, never containing `device` itself.
    pub candidates: Vec<Candidate>,
    pub serving_sinr: f64,
    pub serving_sector: usize,
}

impl SinrReport {
    pub fn candidate_sinr(&self, peer: usize) -> Option<f64> {
        self.candidates
            .binary_search_by_key(&peer, |c| c.peer)
            .ok()
            .map(|i| self.candidates[i].sinr)
    }
}

/// Established D2D connection, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2DLink {
    pub a: usize,
    pub b: usize,
    pub relay: usize,
    pub gamma_d2d: f64,
    /// Transmit power of `a` and `b` in Watts.
    pub channel_power: (f64, f64),
}

impl D2DLink {
    /// The endpoint fed by the relay.
    pub fn receiver(&self) -> usize {
        if self.relay == self.a {
            self.b
        } else {
            self.a
        }
    }

    /// Link power: the smaller endpoint power.
    pub fn link_power(&self) -> f64 {
        self.channel_power.0.min(self.channel_power.1)
    }

    pub fn involves(&self, device: usize) -> bool {
        self.a == device || self.b == device
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct D2DMatching {
    pub links: Vec<D2DLink>,
    pub regular_devices: Vec<usize>,
}

impl D2DMatching {
    pub fn device_count(&self) -> usize {
        self.regular_devices.len() + 2 * self.links.len()
    }

    pub fn contains(&self, link: &D2DLink) -> bool {
        self.links.iter().any(|l| l.a == link.a && l.b == link.b)
    }

    /// Link index of every device, `None` for regular devices.
    pub fn link_of(&self, devices: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; devices];
        for (i, l) in self.links.iter().enumerate() {
            out[l.a] = Some(i);
            out[l.b] = Some(i);
        }
        out
    }

    /// Checks the matching and partition invariants.
    pub fn validate(&self, devices: usize) -> Result<()> {
        let mut seen = vec![false; devices];
        let mut mark = |d: usize| -> Result<()> {
            if d >= devices || std::mem::replace(&mut seen[d], true) {
                return Err(Error::InconsistentCounts(format!(
                    "device {d} appears twice or is out of range"
                )));
            }
            Ok(())
        };
        for l in &self.links {
            if l.a >= l.b || !(l.relay == l.a || l.relay == l.b) {
                return Err(Error::InconsistentCounts(format!(
                    "malformed link ({}, {})",
                    l.a, l.b
                )));
            }
            mark(l.a)?;
            mark(l.b)?;
        }
        for &d in &self.regular_devices {
            mark(d)?;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InconsistentCounts(
                "devices missing from the partition".into(),
            ));
        }
        Ok(())
    }
}

/// Strongest sector by received power, lowest index on ties, with its SINR
/// against all other sectors as interferers.
pub fn serving_bs<G: ChannelGains + ?Sized>(
    device: usize,
    gains: &G,
    bs_power: f64,
    noise: f64,
) -> (usize, f64) {
    let sectors = gains.sector_count();
    let mut best = 0;
    let mut best_power = f64::NEG_INFINITY;
    let mut total = 0.0;
    for s in 0..sectors {
        let p = bs_power * gains.bs_gain(s, device);
        total += p;
        if p > best_power {
            best = s;
            best_power = p;
        }
    }
    let interference = (total - best_power).max(0.0);
    (best, sinr(best_power, interference + noise))
}

#[inline]
fn sinr(signal: f64, denominator: f64) -> f64 {
    if signal <= 0.0 {
        0.0
    } else {
        signal / denominator
    }
}

/// Discovery SINR at `u` from `v`, with every other device transmitting.
/// Direct evaluation, linear in the number of devices.
pub fn discovery_sinr<G: ChannelGains + ?Sized>(
    u: usize,
    v: usize,
    gains: &G,
    d2d_power: f64,
    noise: f64,
) -> f64 {
    let interference: f64 = (0..gains.device_count())
        .filter(|&d| d != u && d != v)
        .map(|d| d2d_power * gains.d2d_gain(d, u))
        .sum();
    sinr(d2d_power * gains.d2d_gain(v, u), interference + noise)
}

/// SINR at a receiver with total received gain `total`, of which `g` belongs
/// to the wanted transmitter.
#[inline]
fn sinr_from_total(g: f64, total: f64, power: f64, noise: f64) -> f64 {
    sinr(power * g, power * (total - g).max(0.0) + noise)
}

fn serving_part<G: ChannelGains + ?Sized>(
    gains: &G,
    params: &DiscoveryParams,
) -> Vec<(usize, f64)> {
    (0..gains.device_count())
        .map(|u| serving_bs(u, gains, params.bs_power, params.cellular_noise))
        .collect()
}

/// Complete reports: each device lists every other device.
pub fn build_reports<G: ChannelGains + ?Sized>(
    gains: &G,
    params: &DiscoveryParams,
) -> Vec<SinrReport> {
    let totals = gains.received_d2d_totals();
    let serving = serving_part(gains, params);
    let n = gains.device_count();
    (0..n)
        .map(|u| SinrReport {
            device: u,
            candidates: (0..n)
                .filter(|&v| v != u)
                .map(|v| Candidate {
                    peer: v,
                    sinr: sinr_from_total(
                        gains.d2d_gain(v, u),
                        totals[u],
                        params.d2d_power,
                        params.discovery_noise,
                    ),
                })
                .collect(),
            serving_sinr: serving[u].1,
            serving_sector: serving[u].0,
        })
        .collect()
}

/// Short-list reports: a peer is listed only when the SINR is at least
/// `floor` in both directions. Pairs below the threshold can never be
/// matched, so pairing on these reports with `delta >= floor` equals pairing
/// on the complete reports.
///
/// `totals` must be the output of `gains.received_d2d_totals()`; it does not
/// depend on transmit power, so callers can reuse it across power settings.
pub fn build_short_reports<G: ChannelGains + ?Sized>(
    gains: &G,
    params: &DiscoveryParams,
    floor: f64,
    totals: &[f64],
) -> Vec<SinrReport> {
    let n = gains.device_count();
    let serving = serving_part(gains, params);
    let p = params.d2d_power;
    let mut peers = Vec::new();
    (0..n)
        .map(|u| {
            let mut candidates = Vec::new();
            if floor <= 0.0 || (floor.is_finite() && p > 0.0) {
                // gamma >= f  <=>  g >= f/(1+f) * (total + N/P)
                let min_gain = if floor <= 0.0 {
                    0.0
                } else {
                    floor / (1.0 + floor) * (totals[u] + params.discovery_noise / p) * (1.0 - 1e-9)
                };
                peers.clear();
                gains.strong_peers(u, min_gain, &mut peers);
                for &(v, g) in &peers {
                    let forward = sinr_from_total(g, totals[u], p, params.discovery_noise);
                    if forward < floor {
                        continue;
                    }
                    let g_back = gains.d2d_gain(u, v);
                    let backward = sinr_from_total(g_back, totals[v], p, params.discovery_noise);
                    if backward >= floor {
                        candidates.push(Candidate {
                            peer: v,
                            sinr: forward,
                        });
                    }
                }
            }
            SinrReport {
                device: u,
                candidates,
                serving_sinr: serving[u].1,
                serving_sector: serving[u].0,
            }
        })
        .collect()
}

/// Every unordered pair `(a, b, γ_D2D)` reported by both sides, `a < b`.
fn mutual_pairs(reports: &[SinrReport]) -> Result<Vec<(usize, usize, f64)>> {
    let index_ok = reports.iter().enumerate().all(|(i, r)| r.device == i);
    if !index_ok {
        return Err(Error::InconsistentCounts(
            "reports must be indexed by device".into(),
        ));
    }
    let mut pairs = Vec::new();
    for r in reports {
        for c in &r.candidates {
            if c.peer == r.device || c.peer >= reports.len() {
                return Err(Error::InconsistentReports {
                    device: r.device,
                    peer: c.peer,
                });
            }
            if !(c.sinr >= 0.0) || !c.sinr.is_finite() {
                return Err(Error::InvalidSinr {
                    device: r.device,
                    peer: c.peer,
                    value: c.sinr,
                });
            }
            let back =
                reports[c.peer]
                    .candidate_sinr(r.device)
                    .ok_or(Error::InconsistentReports {
                        device: r.device,
                        peer: c.peer,
                    })?;
            if r.device < c.peer {
                pairs.push((r.device, c.peer, c.sinr.min(back)));
            }
        }
    }
    Ok(pairs)
}

/// Number of pairs whose `γ_D2D` clears `delta`.
pub fn eligible_pair_count(reports: &[SinrReport], delta: f64) -> Result<usize> {
    Ok(mutual_pairs(reports)?
        .iter()
        .filter(|p| p.2 >= delta)
        .count())
}

/// Greedy opportunistic pairing. Pairs are taken by descending `γ_D2D`
/// (ties in lexicographic pair order) whenever both endpoints are free and
/// the pair clears `delta`. The relay is the endpoint with the better
/// serving SINR, the lower index on ties.
pub fn pair_devices(reports: &[SinrReport], delta: f64) -> Result<D2DMatching> {
    pair_devices_with_power(reports, delta, (0.0, 0.0))
}

/// As [`pair_devices`], stamping each link with the endpoints' powers.
pub fn pair_devices_with_power(
    reports: &[SinrReport],
    delta: f64,
    power: (f64, f64),
) -> Result<D2DMatching> {
    let mut pairs = mutual_pairs(reports)?;
    pairs.retain(|p| p.2 >= delta);
    pairs.sort_by(|x, y| y.2.total_cmp(&x.2).then(x.0.cmp(&y.0)).then(x.1.cmp(&y.1)));

    let mut matched = vec![false; reports.len()];
    let mut links = Vec::new();
    for (a, b, gamma) in pairs {
        if matched[a] || matched[b] {
            continue;
        }
        matched[a] = true;
        matched[b] = true;
        let relay = if reports[a].serving_sinr >= reports[b].serving_sinr {
            a
        } else {
            b
        };
        links.push(D2DLink {
            a,
            b,
            relay,
            gamma_d2d: gamma,
            channel_power: power,
        });
    }
    let regular_devices = (0..reports.len()).filter(|&d| !matched[d]).collect();
    Ok(D2DMatching {
        links,
        regular_devices,
    })
}

/// Debug dump: one row per reported candidate
/// (`device,peer,gamma_db,theta_db,matched,relay_flag`).
pub fn write_discovery_csv<W: Write>(
    out: &mut W,
    reports: &[SinrReport],
    matching: &D2DMatching,
) -> std::io::Result<()> {
    let links: HashSet<(usize, usize)> = matching.links.iter().map(|l| (l.a, l.b)).collect();
    let relays: HashSet<usize> = matching.links.iter().map(|l| l.relay).collect();
    writeln!(out, "device,peer,gamma_db,theta_db,matched,relay_flag")?;
    for r in reports {
        for c in &r.candidates {
            let key = (r.device.min(c.peer), r.device.max(c.peer));
            let matched = links.contains(&key);
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.device,
                c.peer,
                crate::units::linear_to_db(c.sinr),
                crate::units::linear_to_db(r.serving_sinr),
                u8::from(matched),
                u8::from(matched && relays.contains(&r.device)),
            )?;
        }
    }
    Ok(())
}
