//! Site layout, simulation region and UE placement.
//!
//! Sites sit on a centred hexagonal lattice laid out in rows (3, 4, 5, 4, 3
//! for 19 sites), numbered row-major from the bottom row, left to right:
//!
//! ```text
//!          16  17  18
//!        12  13  14  15
//!      7   8  [9]  10  11
//!        3   4   5   6
//!          0   1   2
//! ```
//!
//! The centre is cell 9 and its inner ring is {4, 5, 8, 10, 13, 14}.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SimRng;

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("invalid network config: {0}")]
    InvalidConfig(String),
    #[error("{0} sites do not form a centred hexagonal layout (valid: 1, 7, 19, 37, ...)")]
    InvalidSiteCount(u32),
    #[error("site plan is empty")]
    EmptyPlan,
    #[error("region has zero area")]
    ZeroArea,
    #[error("UE density must be positive, got {0}")]
    NonPositiveDensity(f64),
}

/// Deployment parameters of the macro layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub n_bs: u32,
    pub bs_height_m: f64,
    pub p_max_w: f64,
    pub isd_m: f64,
    pub ue_density_per_km2: f64,
    pub ue_height_m: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            carrier_freq_hz: 3.5e9,
            bandwidth_hz: 10e6,
            n_bs: 19,
            bs_height_m: 25.0,
            p_max_w: 20.0,
            isd_m: 500.0,
            ue_density_per_km2: 1256.0,
            ue_height_m: 1.5,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<(), TopologyError> {
        let fields = [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("bs_height_m", self.bs_height_m),
            ("p_max_w", self.p_max_w),
            ("isd_m", self.isd_m),
            ("ue_density_per_km2", self.ue_density_per_km2),
            ("ue_height_m", self.ue_height_m),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(TopologyError::InvalidConfig(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        hex_rings(self.n_bs).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance_2d(&self, other: &Point3) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_3d(&self, other: &Point3) -> f64 {
        let d2 = self.distance_2d(other);
        d2.hypot(self.z - other.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub cell_id: u32,
    pub position: Point3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SitePlan {
    pub sites: Vec<Site>,
    pub isd_m: f64,
}

impl SitePlan {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Id of the site closest to the origin.
    pub fn centre_id(&self) -> Option<u32> {
        let origin = Point3::new(0.0, 0.0, 0.0);
        self.sites
            .iter()
            .min_by(|a, b| {
                a.position
                    .distance_2d(&origin)
                    .total_cmp(&b.position.distance_2d(&origin))
            })
            .map(|s| s.cell_id)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["cell_id", "x_m", "y_m", "z_m"])?;
        for s in &self.sites {
            w.serialize((s.cell_id, s.position.x, s.position.y, s.position.z))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Number of rings around the centre for a centred hexagonal count.
fn hex_rings(n_bs: u32) -> Result<u32, TopologyError> {
    let mut k = 0u32;
    loop {
        let count = 3 * k * (k + 1) + 1;
        if count == n_bs {
            return Ok(k);
        }
        if count > n_bs {
            return Err(TopologyError::InvalidSiteCount(n_bs));
        }
        k += 1;
    }
}

pub fn build_hex_grid(config: &NetworkConfig) -> Result<SitePlan, TopologyError> {
    let rings = hex_rings(config.n_bs)? as i64;
    let d = config.isd_m;
    let row_pitch = d * 3f64.sqrt() / 2.0;
    let mut sites = Vec::with_capacity(config.n_bs as usize);
    for row in 0..=2 * rings {
        let offset = row - rings;
        let len = 2 * rings + 1 - offset.abs();
        for col in 0..len {
            let x = (col as f64 - (len - 1) as f64 / 2.0) * d;
            let y = offset as f64 * row_pitch;
            sites.push(Site {
                cell_id: sites.len() as u32,
                position: Point3::new(x, y, config.bs_height_m),
            });
        }
    }
    Ok(SitePlan { sites, isd_m: d })
}

/// Convex polygon bounding the simulation area. Vertices are counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub vertices: Vec<(f64, f64)>,
    pub area_km2: f64,
}

impl Region {
    pub fn from_points(points: &[(f64, f64)]) -> Self {
        let vertices = convex_hull(points);
        let area_km2 = polygon_area(&vertices) / 1e6;
        Self { vertices, area_km2 }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        (0..n).all(|i| {
            let (ax, ay) = self.vertices[i];
            let (bx, by) = self.vertices[(i + 1) % n];
            (bx - ax) * (y - ay) - (by - ay) * (x - ax) >= 0.0
        })
    }

    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.vertices.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(x0, y0, x1, y1), &(x, y)| (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
        )
    }
}

/// Andrew's monotone chain; returns the hull counter-clockwise without
/// collinear points.
fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    // Tolerance scaled to the coordinates so lattice points that are
    // collinear up to rounding are dropped.
    let scale = pts
        .iter()
        .fold(0.0f64, |m, p| m.max(p.0.abs()).max(p.1.abs()))
        .max(1.0);
    let eps = 1e-9 * scale * scale;
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= eps
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn polygon_area(vertices: &[(f64, f64)]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let (x0, y0) = vertices[i];
            let (x1, y1) = vertices[(i + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum();
    twice.abs() / 2.0
}

/// Hull of the sites grown by a hexagon of circumradius `isd/2` (vertices at
/// 30° + k·60°), so every hull edge moves outward by exactly `isd/2`.
pub fn default_region(plan: &SitePlan) -> Result<Region, TopologyError> {
    if plan.is_empty() {
        return Err(TopologyError::EmptyPlan);
    }
    let r = plan.isd_m / 2.0;
    let mut points = Vec::with_capacity(plan.len() * 6);
    for site in &plan.sites {
        for k in 0..6 {
            let angle = (30.0 + 60.0 * k as f64).to_radians();
            points.push((
                site.position.x + r * angle.cos(),
                site.position.y + r * angle.sin(),
            ));
        }
    }
    Ok(Region::from_points(&points))
}

/// Homogeneous PPP over `region`: count ~ Poisson(density · area), positions
/// i.i.d. uniform.
pub fn place_ues(
    region: &Region,
    density_per_km2: f64,
    height_m: f64,
    seed: u64,
) -> Result<Vec<Point3>, TopologyError> {
    if !(density_per_km2 > 0.0) {
        return Err(TopologyError::NonPositiveDensity(density_per_km2));
    }
    if !(region.area_km2 > 0.0) {
        return Err(TopologyError::ZeroArea);
    }
    let mut rng = SimRng::from_seed(seed);
    let count = rng.poisson(density_per_km2 * region.area_km2);
    Ok(uniform_points(region, count as usize, height_m, &mut rng))
}

/// Same as [`place_ues`] but with a fixed UE count.
pub fn place_ues_exact(
    region: &Region,
    count: usize,
    height_m: f64,
    seed: u64,
) -> Result<Vec<Point3>, TopologyError> {
    if !(region.area_km2 > 0.0) {
        return Err(TopologyError::ZeroArea);
    }
    let mut rng = SimRng::from_seed(seed);
    Ok(uniform_points(region, count, height_m, &mut rng))
}

fn uniform_points(region: &Region, count: usize, height_m: f64, rng: &mut SimRng) -> Vec<Point3> {
    let (x0, y0, x1, y1) = region.bounding_box();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = rng.uniform_range(x0, x1);
        let y = rng.uniform_range(y0, y1);
        if region.contains(x, y) {
            out.push(Point3::new(x, y, height_m));
        }
    }
    out
}

pub fn write_ues_csv<W: Write>(ues: &[Point3], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ue_id", "x_m", "y_m", "z_m"])?;
    for (id, p) in ues.iter().enumerate() {
        w.serialize((id, p.x, p.y, p.z))?;
    }
    w.flush()?;
    Ok(())
}
