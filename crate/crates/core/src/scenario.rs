//! Seeded scenario generators: random-waypoint mobility traces, site grids
//! with noisy straight routes, and a fixed corridor fixture for handover
//! planning.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::handover::{EnbSite, Route, RouteReading};
use crate::seed::rng_for;
use crate::vsn::{MobilityTrace, Vehicle, VehicleId, VehicleSnapshot};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("{0}")]
    InvalidParam(String),
}

fn ensure(cond: bool, msg: &str) -> Result<(), ScenarioError> {
    if cond {
        Ok(())
    } else {
        Err(ScenarioError::InvalidParam(msg.to_owned()))
    }
}

/// Parameters for the random-waypoint vehicle trace generator.
#[derive(Debug, Clone, PartialEq)]
pub struct VsnGenParams {
    pub vehicles: usize,
    pub width: f64,
    pub height: f64,
    pub steps: usize,
    /// Seconds between snapshots.
    pub period: f64,
    /// Bytes generated per vehicle per period.
    pub volume: u64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub seed: u64,
}

impl Default for VsnGenParams {
    fn default() -> Self {
        VsnGenParams {
            vehicles: 100,
            width: 1000.0,
            height: 1000.0,
            steps: 20,
            period: 1.0,
            volume: 1024,
            speed_min: 5.0,
            speed_max: 15.0,
            seed: 0,
        }
    }
}

impl VsnGenParams {
    fn validate(&self) -> Result<(), ScenarioError> {
        ensure(self.vehicles >= 1, "vehicles must be at least 1")?;
        ensure(self.steps >= 1, "steps must be at least 1")?;
        ensure(
            self.width > 0.0 && self.width.is_finite(),
            "width must be positive",
        )?;
        ensure(
            self.height > 0.0 && self.height.is_finite(),
            "height must be positive",
        )?;
        ensure(
            self.period > 0.0 && self.period.is_finite(),
            "period must be positive",
        )?;
        ensure(self.volume >= 1, "volume must be at least 1 byte")?;
        ensure(
            self.speed_min > 0.0 && self.speed_max >= self.speed_min,
            "speeds must satisfy 0 < min <= max",
        )
    }
}

struct Waypointer {
    x: f64,
    y: f64,
    target_x: f64,
    target_y: f64,
    speed: f64,
    rng: rand_chacha::ChaCha12Rng,
    width: f64,
    height: f64,
    speed_min: f64,
    speed_max: f64,
}

impl Waypointer {
    fn new(seed: u64, vid: u64, params: &VsnGenParams) -> Self {
        let mut rng = rng_for(seed, &[1, vid]);
        let x = rng.random_range(0.0..params.width);
        let y = rng.random_range(0.0..params.height);
        let target_x = rng.random_range(0.0..params.width);
        let target_y = rng.random_range(0.0..params.height);
        let speed = rng.random_range(params.speed_min..=params.speed_max);
        Waypointer {
            x,
            y,
            target_x,
            target_y,
            speed,
            rng,
            width: params.width,
            height: params.height,
            speed_min: params.speed_min,
            speed_max: params.speed_max,
        }
    }

    fn advance(&mut self, period: f64) {
        let mut budget = self.speed * period;
        loop {
            let dx = self.target_x - self.x;
            let dy = self.target_y - self.y;
            let dist = (dx * dx + dy * dy).sqrt();
            if dist <= budget {
                self.x = self.target_x;
                self.y = self.target_y;
                budget -= dist;
                self.target_x = self.rng.random_range(0.0..self.width);
                self.target_y = self.rng.random_range(0.0..self.height);
                self.speed = self.rng.random_range(self.speed_min..=self.speed_max);
                if budget <= 0.0 {
                    return;
                }
            } else {
                self.x += dx / dist * budget;
                self.y += dy / dist * budget;
                return;
            }
        }
    }
}

/// Generates a random-waypoint mobility trace: every vehicle walks toward
/// a uniformly drawn waypoint at a uniformly drawn speed, picking a new
/// one on arrival. Deterministic per seed; each vehicle has its own
/// derived random stream.
pub fn gen_vsn_trace(params: &VsnGenParams) -> Result<MobilityTrace, ScenarioError> {
    params.validate()?;
    let mut walkers: Vec<Waypointer> = (0..params.vehicles as u64)
        .map(|vid| Waypointer::new(params.seed, vid, params))
        .collect();
    let mut snapshots = Vec::with_capacity(params.steps);
    for step in 0..params.steps {
        if step > 0 {
            for w in walkers.iter_mut() {
                w.advance(params.period);
            }
        }
        let vehicles: Vec<Vehicle> = walkers
            .iter()
            .enumerate()
            .map(|(i, w)| Vehicle {
                id: VehicleId(i as u64),
                x: w.x,
                y: w.y,
                volume: params.volume,
            })
            .collect();
        let snapshot = VehicleSnapshot::new(step as f64 * params.period, vehicles)
            .expect("generated snapshot is valid");
        snapshots.push(snapshot);
    }
    Ok(MobilityTrace::new(snapshots).expect("generated times increase"))
}

/// Parameters for the grid-of-sites handover scenario generator.
#[derive(Debug, Clone, PartialEq)]
pub struct HandoverGenParams {
    /// Sites per grid side (grid x grid sites overall).
    pub grid: usize,
    /// Distance between neighboring site centers, meters.
    pub spacing: f64,
    /// Coverage range of every site, meters.
    pub range: f64,
    /// Number of route readings.
    pub readings: usize,
    /// Gaussian jitter of the route's y coordinate, meters.
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for HandoverGenParams {
    fn default() -> Self {
        HandoverGenParams {
            grid: 5,
            spacing: 400.0,
            range: 400.0,
            readings: 100,
            noise_sd: 15.0,
            seed: 0,
        }
    }
}

impl HandoverGenParams {
    fn validate(&self) -> Result<(), ScenarioError> {
        ensure(self.grid >= 1, "grid must be at least 1")?;
        ensure(
            self.spacing > 0.0 && self.spacing.is_finite(),
            "spacing must be positive",
        )?;
        ensure(
            self.range > 0.0 && self.range.is_finite(),
            "range must be positive",
        )?;
        ensure(self.readings >= 2, "readings must be at least 2")?;
        ensure(
            self.noise_sd >= 0.0 && self.noise_sd.is_finite(),
            "noise_sd must be non-negative",
        )
    }
}

/// Generates a `grid x grid` lattice of sites and a left-to-right route
/// along the middle row with Gaussian y-jitter. With the default
/// parameters the route is fully covered.
pub fn gen_handover_scenario(
    params: &HandoverGenParams,
) -> Result<(Vec<EnbSite>, Route), ScenarioError> {
    params.validate()?;
    let mut sites = Vec::with_capacity(params.grid * params.grid);
    for row in 0..params.grid {
        for col in 0..params.grid {
            sites.push(EnbSite {
                id: (row * params.grid + col) as u32,
                x: (col as f64 + 0.5) * params.spacing,
                y: (row as f64 + 0.5) * params.spacing,
                range: params.range,
            });
        }
    }
    let extent = params.grid as f64 * params.spacing;
    let mid_y = extent / 2.0;
    let x0 = 0.05 * extent;
    let x1 = 0.95 * extent;
    let mut rng = rng_for(params.seed, &[2]);
    let noise = Normal::new(0.0, params.noise_sd.max(f64::MIN_POSITIVE))
        .expect("valid normal distribution");
    let readings: Vec<RouteReading> = (0..params.readings)
        .map(|i| {
            let frac = i as f64 / (params.readings - 1) as f64;
            let jitter = if params.noise_sd > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            RouteReading {
                index: i,
                time: i as f64,
                x: x0 + frac * (x1 - x0),
                y: mid_y + jitter,
            }
        })
        .collect();
    let route = Route::new(readings).expect("generated route is valid");
    Ok((sites, route))
}

/// A fixed straight-corridor scenario of eight sites along a 48-reading
/// route (one reading per meter).
///
/// Built so that nearest allocation serves the sites in the order
/// 20, 8, 25, 5, 2, 3, 13, 19 (7 handovers), while ranges overlap enough
/// that the minimal plan drops sites 25 and 3, leaving
/// 20, 8, 5, 2, 13, 19 (5 handovers).
pub fn corridor_scenario() -> (Vec<EnbSite>, Route) {
    let site = |id: u32, x: f64, range: f64| EnbSite {
        id,
        x,
        y: 0.0,
        range,
    };
    let sites = vec![
        site(20, 2.5, 6.0),
        site(8, 8.5, 8.0),
        site(25, 14.5, 4.0),
        site(5, 20.5, 8.0),
        site(2, 26.5, 8.0),
        site(3, 32.5, 2.6),
        site(13, 38.5, 7.0),
        site(19, 44.5, 4.0),
    ];
    let points: Vec<(f64, f64)> = (0..48).map(|i| (i as f64, 0.0)).collect();
    let route = Route::from_points(&points).expect("corridor route is valid");
    (sites, route)
}
