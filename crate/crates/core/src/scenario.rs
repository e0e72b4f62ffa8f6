//! Network geometry and user population.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of the macro station. Small cells are numbered from 1.
pub const MBS_ID: usize = 0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Azimuth of `other` seen from `self`, in degrees within [0, 360).
    pub fn azimuth_deg(&self, other: &Point) -> f64 {
        let a = (other.y - self.y).atan2(other.x - self.x).to_degrees();
        if a < 0.0 {
            a + 360.0
        } else {
            a
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StationKind {
    Mbs,
    Scbs,
}

impl StationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StationKind::Mbs => "MBS",
            StationKind::Scbs => "SCBS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerSupply {
    OnGrid,
    Renewable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStationConfig {
    pub id: usize,
    pub kind: StationKind,
    pub position: Point,
    pub antenna_height_m: f64,
    pub n_sectors: u32,
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub n_rb_per_sector: u32,
    /// Aggregated backhaul capacity per sector in RBs; zero for leaf stations.
    pub backhaul_rb_cap: u32,
    pub power_supply: PowerSupply,
}

impl BaseStationConfig {
    pub fn mbs(position: Point) -> Self {
        Self {
            id: MBS_ID,
            kind: StationKind::Mbs,
            position,
            antenna_height_m: 47.0,
            n_sectors: 3,
            tx_power_dbm: 46.0,
            antenna_gain_dbi: 17.5,
            n_rb_per_sector: 106,
            backhaul_rb_cap: 27 * 106,
            power_supply: PowerSupply::OnGrid,
        }
    }

    pub fn scbs(id: usize, position: Point) -> Self {
        Self {
            id,
            kind: StationKind::Scbs,
            position,
            antenna_height_m: 16.0,
            n_sectors: 1,
            tx_power_dbm: 32.0,
            antenna_gain_dbi: 17.5,
            n_rb_per_sector: 106,
            backhaul_rb_cap: 0,
            power_supply: PowerSupply::Renewable,
        }
    }

    /// Sector of this station serving a point, by azimuth. Sector `k` spans
    /// azimuths `[30 + 120k, 150 + 120k)` degrees for a 3-sector site.
    pub fn sector_of(&self, p: &Point) -> usize {
        if self.n_sectors <= 1 {
            return 0;
        }
        let width = 360.0 / f64::from(self.n_sectors);
        let offset = 90.0 - width / 2.0;
        let az = (self.position.azimuth_deg(p) - offset).rem_euclid(360.0);
        ((az / width) as usize).min(self.n_sectors as usize - 1)
    }
}

/// Configurable per-kind station parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationParams {
    pub antenna_height_m: f64,
    pub n_sectors: u32,
    pub tx_power_dbm: f64,
    pub n_rb_per_sector: u32,
    /// Aggregated backhaul capacity per sector in RBs.
    pub backhaul_rb_cap_per_sector: u32,
}

impl StationParams {
    pub fn mbs() -> Self {
        Self::from_station(&BaseStationConfig::mbs(Point::default()))
    }

    pub fn scbs() -> Self {
        Self::from_station(&BaseStationConfig::scbs(1, Point::default()))
    }

    fn from_station(s: &BaseStationConfig) -> Self {
        Self {
            antenna_height_m: s.antenna_height_m,
            n_sectors: s.n_sectors,
            tx_power_dbm: s.tx_power_dbm,
            n_rb_per_sector: s.n_rb_per_sector,
            backhaul_rb_cap_per_sector: s.backhaul_rb_cap,
        }
    }

    pub fn apply(&self, s: &mut BaseStationConfig) {
        s.antenna_height_m = self.antenna_height_m;
        s.n_sectors = self.n_sectors;
        s.tx_power_dbm = self.tx_power_dbm;
        s.n_rb_per_sector = self.n_rb_per_sector;
        s.backhaul_rb_cap = self.backhaul_rb_cap_per_sector;
    }

    pub fn validate(&self, key: &str) -> Result<()> {
        if !(self.antenna_height_m > 0.0) {
            return Err(Error::config(
                format!("{key}.antenna_height_m"),
                "must be a positive height in meters",
            ));
        }
        if self.n_sectors == 0 {
            return Err(Error::config(format!("{key}.n_sectors"), "must be at least 1"));
        }
        if self.n_rb_per_sector == 0 {
            return Err(Error::config(
                format!("{key}.n_rb_per_sector"),
                "must be at least 1 RB",
            ));
        }
        Ok(())
    }
}

/// Static geometry of the network. Station 0 is the MBS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLayout {
    pub stations: Vec<BaseStationConfig>,
    /// Star backhaul edges `(scbs_id, mbs_id)`.
    pub backhaul: Vec<(usize, usize)>,
}

impl NetworkLayout {
    pub fn mbs(&self) -> &BaseStationConfig {
        &self.stations[MBS_ID]
    }

    pub fn scbs(&self) -> &[BaseStationConfig] {
        &self.stations[1..]
    }

    pub fn n_scbs(&self) -> usize {
        self.stations.len() - 1
    }

    /// MBS sector carrying each SCBS's backhaul, indexed by `scbs_id - 1`.
    pub fn backhaul_sectors(&self) -> Vec<usize> {
        let mbs = self.mbs();
        self.scbs().iter().map(|s| mbs.sector_of(&s.position)).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["bs_id", "kind", "x", "y", "height", "sectors"])?;
        for s in &self.stations {
            wr.write_record([
                s.id.to_string(),
                s.kind.as_str().to_string(),
                s.position.x.to_string(),
                s.position.y.to_string(),
                s.antenna_height_m.to_string(),
                s.n_sectors.to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrafficClass {
    LowRate,
    HighRate,
}

impl TrafficClass {
    /// RB demand per slot.
    pub fn demand_rbs(&self) -> u32 {
        match self {
            TrafficClass::LowRate => 3,
            TrafficClass::HighRate => 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserEquipment {
    pub id: usize,
    pub position: Point,
    pub antenna_height_m: f64,
    pub traffic_class: TrafficClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_scbs: usize,
    pub n_users: usize,
    pub mbs_position_m: [f64; 2],
    pub scbs_grid_spacing_m: f64,
    /// Radius of the user deployment disc around the MBS. Defaults to the
    /// computed MBS coverage radius when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area_radius_m: Option<f64>,
    /// Fraction of high-rate users.
    pub user_class_mix: f64,
    pub ue_antenna_height_m: f64,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_scbs: 24,
            n_users: 400,
            mbs_position_m: [0.0, 0.0],
            scbs_grid_spacing_m: 720.0,
            area_radius_m: None,
            user_class_mix: 0.45,
            ue_antenna_height_m: 1.5,
            rng_seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn mbs_position(&self) -> Point {
        Point::new(self.mbs_position_m[0], self.mbs_position_m[1])
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.user_class_mix) {
            return Err(Error::config(
                "scenario.user_class_mix",
                "must be a fraction in [0, 1]",
            ));
        }
        if !(self.scbs_grid_spacing_m > 0.0) {
            return Err(Error::config(
                "scenario.scbs_grid_spacing_m",
                "must be a positive distance in meters",
            ));
        }
        if let Some(r) = self.area_radius_m {
            if !(r > 0.0) {
                return Err(Error::config(
                    "scenario.area_radius_m",
                    "must be a positive distance in meters",
                ));
            }
        }
        if !(self.ue_antenna_height_m > 0.0) {
            return Err(Error::config(
                "scenario.ue_antenna_height_m",
                "must be a positive height in meters",
            ));
        }
        Ok(())
    }
}

/// Lattice offsets (in grid units) of the first `n` SCBS sites around the
/// center. Full rings are taken before partial ones; within the chosen set
/// ids follow row-major order.
fn grid_offsets(n: usize) -> Vec<(i64, i64)> {
    if n == 0 {
        return Vec::new();
    }
    let mut half = 1i64;
    while ((2 * half + 1) * (2 * half + 1) - 1) < n as i64 {
        half += 1;
    }
    let mut points: Vec<(i64, i64)> = (-half..=half)
        .flat_map(|j| (-half..=half).map(move |i| (i, j)))
        .filter(|&p| p != (0, 0))
        .collect();
    // stable sort keeps row-major order among equal rings
    points.sort_by_key(|&(i, j)| (i.abs().max(j.abs()), i * i + j * j));
    points.truncate(n);
    points.sort_by_key(|&(i, j)| (j, i));
    points
}

/// Builds the MBS at the center and the SCBS lattice around it.
///
/// Every SCBS site must lie inside the MBS coverage disc.
pub fn build_layout(config: &ScenarioConfig, mbs_coverage_radius_m: f64) -> Result<NetworkLayout> {
    build_layout_with(
        config,
        &StationParams::mbs(),
        &StationParams::scbs(),
        mbs_coverage_radius_m,
    )
}

pub fn build_layout_with(
    config: &ScenarioConfig,
    mbs_params: &StationParams,
    scbs_params: &StationParams,
    mbs_coverage_radius_m: f64,
) -> Result<NetworkLayout> {
    config.validate()?;
    let center = config.mbs_position();
    let mut mbs = BaseStationConfig::mbs(center);
    mbs_params.apply(&mut mbs);
    let mut stations = vec![mbs];
    let mut backhaul = Vec::with_capacity(config.n_scbs);
    for (k, (i, j)) in grid_offsets(config.n_scbs).into_iter().enumerate() {
        let pos = Point::new(
            center.x + i as f64 * config.scbs_grid_spacing_m,
            center.y + j as f64 * config.scbs_grid_spacing_m,
        );
        let d = center.distance(&pos);
        if d > mbs_coverage_radius_m {
            return Err(Error::Layout(format!(
                "SCBS site ({:.0}, {:.0}) lies {d:.0} m from the MBS, outside its {mbs_coverage_radius_m:.0} m coverage",
                pos.x, pos.y
            )));
        }
        let id = k + 1;
        let mut scbs = BaseStationConfig::scbs(id, pos);
        scbs_params.apply(&mut scbs);
        stations.push(scbs);
        backhaul.push((id, MBS_ID));
    }
    Ok(NetworkLayout { stations, backhaul })
}

/// Uniform point in a disc.
pub fn uniform_in_disc<R: Rng + ?Sized>(rng: &mut R, center: Point, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}

/// Draws user positions i.i.d. uniform over the deployment disc.
pub fn deploy_users(config: &ScenarioConfig, area_radius_m: f64) -> Vec<UserEquipment> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let center = config.mbs_position();
    (0..config.n_users)
        .map(|id| {
            let position = uniform_in_disc(&mut rng, center, area_radius_m);
            let traffic_class = if rng.random::<f64>() < config.user_class_mix {
                TrafficClass::HighRate
            } else {
                TrafficClass::LowRate
            };
            UserEquipment {
                id,
                position,
                antenna_height_m: config.ue_antenna_height_m,
                traffic_class,
            }
        })
        .collect()
}
