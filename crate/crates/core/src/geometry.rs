//! Hexagonal multi-site layout, three-sector base stations and uniform
//! device drops.
//!
//! Conventions: positions are planar metres, azimuths are degrees measured
//! counter-clockwise from the +x axis. Cells are flat-topped hexagons whose
//! `cell_radius` is the centre-to-vertex distance, so neighbouring sites sit
//! `sqrt(3) * cell_radius` apart.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::antenna::AntennaPattern;
use crate::error::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn distance_squared(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_squared(other).sqrt()
    }

    /// Rotate counter-clockwise about `center` by `degrees`.
    pub fn rotated_about(&self, center: &Point, degrees: f64) -> Point {
        let (s, c) = degrees.to_radians().sin_cos();
        let dx = self.x - center.x;
        let dy = self.y - center.y;
        Point::new(center.x + c * dx - s * dy, center.y + s * dx + c * dy)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Site centres of a hexagonal network.
#[derive(Debug, Clone, PartialEq)]
pub struct SitePlan {
    pub rings: u32,
    pub cell_radius: f64,
    pub site_positions: Vec<Point>,
}

impl SitePlan {
    pub fn site_count(&self) -> usize {
        self.site_positions.len()
    }

    pub fn inter_site_distance(&self) -> f64 {
        SQRT_3 * self.cell_radius
    }

    pub fn hexagon_area(&self) -> f64 {
        1.5 * SQRT_3 * self.cell_radius * self.cell_radius
    }

    /// Whether `p` lies inside (or on the border of) the hexagon of `site`.
    pub fn contains(&self, site: usize, p: &Point) -> bool {
        hexagon_contains(&self.site_positions[site], self.cell_radius, p)
    }
}

/// Point-in-hexagon test for a flat-topped hexagon.
pub fn hexagon_contains(center: &Point, radius: f64, p: &Point) -> bool {
    let x = (p.x - center.x).abs();
    let y = (p.y - center.y).abs();
    // Small slack so that vertices generated by floating point still pass.
    let eps = 1e-9 * radius;
    y <= 0.5 * SQRT_3 * radius + eps && SQRT_3 * x + y <= SQRT_3 * radius + eps
}

/// Number of sites in a hexagonal layout with `rings` tiers around the centre.
pub fn site_count_for_rings(rings: u32) -> usize {
    1 + 3 * rings as usize * (rings as usize + 1)
}

/// Builds site positions on a hexagonal lattice centred at the origin.
/// Site 0 is the central site; outer sites follow ring by ring.
pub fn build_hex_layout(rings: u32, cell_radius: f64) -> Result<SitePlan> {
    if !(cell_radius > 0.0) || !cell_radius.is_finite() {
        return Err(Error::invalid(
            "cell_radius",
            format!("must be positive and finite, got {cell_radius}"),
        ));
    }
    let isd = SQRT_3 * cell_radius;
    let r = rings as i64;
    let mut axial: Vec<(i64, i64)> = Vec::with_capacity(site_count_for_rings(rings));
    for q in -r..=r {
        for s in -r..=r {
            let t = -q - s;
            if q.abs().max(s.abs()).max(t.abs()) <= r {
                axial.push((q, s));
            }
        }
    }
    // Ring order first, then angle, so that site 0 is central and indices are
    // stable across ring counts.
    let ring_of = |&(q, s): &(i64, i64)| q.abs().max(s.abs()).max((q + s).abs());
    let to_point = |&(q, s): &(i64, i64)| {
        Point::new(
            isd * 0.5 * SQRT_3 * q as f64,
            isd * (s as f64 + 0.5 * q as f64),
        )
    };
    axial.sort_by(|a, b| {
        let pa = to_point(a);
        let pb = to_point(b);
        let angle = |p: &Point| {
            let a = p.y.atan2(p.x);
            if a < 0.0 {
                a + std::f64::consts::TAU
            } else {
                a
            }
        };
        ring_of(a)
            .cmp(&ring_of(b))
            .then(angle(&pa).total_cmp(&angle(&pb)))
    });
    Ok(SitePlan {
        rings,
        cell_radius,
        site_positions: axial.iter().map(to_point).collect(),
    })
}

/// A base station covering one third of a site.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub site_index: usize,
    pub position: Point,
    pub azimuth: f64,
    pub bs_height: f64,
    pub downtilt: f64,
    pub pattern: AntennaPattern,
}

impl Sector {
    /// Horizontal offset from boresight and vertical depression angle of
    /// `point` seen from this base station, both in degrees.
    pub fn offset_angles(&self, point: &Point, device_height: f64) -> Result<(f64, f64)> {
        offset_angles(self, point, device_height)
    }
}

/// Three sectors per site with azimuths `azimuth0 + {0, 120, 240}` degrees.
/// Each sector's antenna pattern is tilted to `downtilt`.
pub fn sectorize(
    plan: &SitePlan,
    azimuth0: f64,
    bs_height: f64,
    downtilt: f64,
    pattern: &AntennaPattern,
) -> Result<Vec<Sector>> {
    if !(bs_height > 0.0) {
        return Err(Error::invalid(
            "bs_height",
            format!("must be positive, got {bs_height}"),
        ));
    }
    let pattern = pattern.with_tilt(downtilt);
    let mut sectors = Vec::with_capacity(3 * plan.site_count());
    for (site_index, position) in plan.site_positions.iter().enumerate() {
        for k in 0..3 {
            sectors.push(Sector {
                site_index,
                position: *position,
                azimuth: azimuth0 + 120.0 * k as f64,
                bs_height,
                downtilt,
                pattern,
            });
        }
    }
    Ok(sectors)
}

/// Wraps an angle in degrees to `[-180, 180]`.
pub fn wrap_degrees(angle: f64) -> f64 {
    let wrapped = (angle + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid maps +180 to -180; keep the sign of the input at the seam.
    if wrapped == -180.0 && angle > 0.0 {
        180.0
    } else {
        wrapped
    }
}

pub fn offset_angles(sector: &Sector, point: &Point, device_height: f64) -> Result<(f64, f64)> {
    let dx = point.x - sector.position.x;
    let dy = point.y - sector.position.y;
    let horizontal = dx.hypot(dy);
    if horizontal < 1e-9 {
        return Err(Error::CoLocated);
    }
    let theta = wrap_degrees(dy.atan2(dx).to_degrees() - sector.azimuth);
    let phi = ((sector.bs_height - device_height) / horizontal)
        .atan()
        .to_degrees();
    Ok((theta, phi))
}

/// Device positions plus per-device bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSet {
    pub positions: Vec<Point>,
    pub device_height: f64,
    /// Site whose hexagon the device was dropped into.
    pub home_site: Vec<usize>,
    /// Serving sector, filled in once discovery has run.
    pub serving_sector: Vec<Option<usize>>,
}

impl DeviceSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn assign_serving(&mut self, device: usize, sector: usize) {
        self.serving_sector[device] = Some(sector);
    }
}

/// Drops `per_site` devices uniformly in every hexagon by rejection sampling
/// from the bounding box. Deterministic in `seed`.
pub fn place_devices(plan: &SitePlan, per_site: usize, device_height: f64, seed: u64) -> DeviceSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = plan.cell_radius;
    let half_height = 0.5 * SQRT_3 * r;
    let total = per_site * plan.site_count();
    let mut positions = Vec::with_capacity(total);
    let mut home_site = Vec::with_capacity(total);
    for (site, center) in plan.site_positions.iter().enumerate() {
        let mut placed = 0;
        while placed < per_site {
            let p = Point::new(
                center.x + rng.random_range(-r..=r),
                center.y + rng.random_range(-half_height..=half_height),
            );
            if hexagon_contains(center, r, &p) {
                positions.push(p);
                home_site.push(site);
                placed += 1;
            }
        }
    }
    DeviceSet {
        serving_sector: vec![None; positions.len()],
        positions,
        device_height,
        home_site,
    }
}
