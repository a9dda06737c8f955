//! Simulation configuration and its validation.
//!
//! Defaults follow the published test-bed: 127-byte packets, 27 mAh per node,
//! 44/49 mA transmit/receive draw, 360 s runs, 56 reference nodes and 10
//! mobile targets on a 75 x 65 m field.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::ConfigError;
use crate::geometry::{Bounds, Point};

/// Fully validated simulation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub grid_width_m: f64,
    pub grid_height_m: f64,
    /// Reference (fixed, known-position) node count.
    pub num_references: usize,
    /// Mobile target count.
    pub num_targets: usize,
    /// Seconds between reporting rounds.
    pub reporting_period_s: f64,
    pub duration_s: f64,
    pub radio_range_m: f64,
    pub packet_size_bytes: u32,
    pub data_rate_bps: f64,
    #[serde(rename = "tx_draw_mA")]
    pub tx_draw_ma: f64,
    #[serde(rename = "rx_draw_mA")]
    pub rx_draw_ma: f64,
    #[serde(rename = "init_energy_mAh")]
    pub init_energy_mah: f64,
    /// Fraction of the initial energy a target needs to be eligible as leader.
    pub leader_energy_threshold_fraction: f64,
    /// Locations carried by one aggregate packet.
    pub aggregation_capacity: usize,
    pub rss_ref_dbm: f64,
    pub path_loss_exponent: f64,
    pub ref_distance_m: f64,
    pub noise_sigma_db: f64,
    pub seed: u64,
    pub speed_min_mps: f64,
    pub speed_max_mps: f64,
    /// Interval between mobility updates.
    pub mobility_tick_s: f64,
    /// Per-hop independent loss probability.
    pub loss_rate: f64,
    pub sink_x_m: f64,
    pub sink_y_m: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            grid_width_m: 75.0,
            grid_height_m: 65.0,
            num_references: 56,
            num_targets: 10,
            reporting_period_s: 2.0,
            duration_s: 360.0,
            radio_range_m: 16.0,
            packet_size_bytes: 127,
            data_rate_bps: 250_000.0,
            tx_draw_ma: 44.0,
            rx_draw_ma: 49.0,
            init_energy_mah: 27.0,
            leader_energy_threshold_fraction: 0.2,
            aggregation_capacity: 5,
            rss_ref_dbm: -40.0,
            path_loss_exponent: 2.4,
            ref_distance_m: 1.0,
            noise_sigma_db: 0.0,
            seed: 1,
            speed_min_mps: 0.5,
            speed_max_mps: 1.5,
            mobility_tick_s: 1.0,
            loss_rate: 0.0,
            sink_x_m: 0.0,
            sink_y_m: 0.0,
        }
    }
}

/// Partially specified settings, as read from a config file or flags.
/// Every field left as `None` takes its default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawSettings {
    pub grid_width_m: Option<f64>,
    pub grid_height_m: Option<f64>,
    pub num_references: Option<usize>,
    pub num_targets: Option<usize>,
    pub reporting_period_s: Option<f64>,
    pub duration_s: Option<f64>,
    pub radio_range_m: Option<f64>,
    pub packet_size_bytes: Option<u32>,
    pub data_rate_bps: Option<f64>,
    #[serde(rename = "tx_draw_mA")]
    pub tx_draw_ma: Option<f64>,
    #[serde(rename = "rx_draw_mA")]
    pub rx_draw_ma: Option<f64>,
    #[serde(rename = "init_energy_mAh")]
    pub init_energy_mah: Option<f64>,
    pub leader_energy_threshold_fraction: Option<f64>,
    pub aggregation_capacity: Option<usize>,
    pub rss_ref_dbm: Option<f64>,
    pub path_loss_exponent: Option<f64>,
    pub ref_distance_m: Option<f64>,
    pub noise_sigma_db: Option<f64>,
    pub seed: Option<u64>,
    pub speed_min_mps: Option<f64>,
    pub speed_max_mps: Option<f64>,
    pub mobility_tick_s: Option<f64>,
    pub loss_rate: Option<f64>,
    pub sink_x_m: Option<f64>,
    pub sink_y_m: Option<f64>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if let Some(v) = $src.$field { $dst.$field = v; } )*
    };
}

impl RawSettings {
    /// Fields set in `other` win over fields set in `self`.
    pub fn merged_with(mut self, other: &RawSettings) -> RawSettings {
        macro_rules! take {
            ($($field:ident),*) => { $( if other.$field.is_some() { self.$field = other.$field; } )* };
        }
        take!(
            grid_width_m,
            grid_height_m,
            num_references,
            num_targets,
            reporting_period_s,
            duration_s,
            radio_range_m,
            packet_size_bytes,
            data_rate_bps,
            tx_draw_ma,
            rx_draw_ma,
            init_energy_mah,
            leader_energy_threshold_fraction,
            aggregation_capacity,
            rss_ref_dbm,
            path_loss_exponent,
            ref_distance_m,
            noise_sigma_db,
            seed,
            speed_min_mps,
            speed_max_mps,
            mobility_tick_s,
            loss_rate,
            sink_x_m,
            sink_y_m
        );
        self
    }
}

/// Fills omitted fields with defaults and checks every constraint.
pub fn validate_config(raw: &RawSettings) -> Result<SimConfig, ConfigError> {
    let mut cfg = SimConfig::default();
    overlay!(cfg, raw;
        grid_width_m, grid_height_m, num_references, num_targets, reporting_period_s,
        duration_s, radio_range_m, packet_size_bytes, data_rate_bps, tx_draw_ma,
        rx_draw_ma, init_energy_mah, leader_energy_threshold_fraction,
        aggregation_capacity, rss_ref_dbm, path_loss_exponent, ref_distance_m,
        noise_sigma_db, seed, speed_min_mps, speed_max_mps, mobility_tick_s, loss_rate,
        sink_x_m, sink_y_m,
    );
    cfg.validate()?;
    Ok(cfg)
}

fn positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
    // NaN fails the comparison as well.
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::NotPositive { field, value })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Negative { field, value })
    }
}

fn within(field: &'static str, value: f64, min: f64, max: f64) -> Result<(), ConfigError> {
    if (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange {
            field,
            value,
            min,
            max,
        })
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("grid_width_m", self.grid_width_m)?;
        positive("grid_height_m", self.grid_height_m)?;
        positive("reporting_period_s", self.reporting_period_s)?;
        positive("duration_s", self.duration_s)?;
        positive("radio_range_m", self.radio_range_m)?;
        positive("packet_size_bytes", f64::from(self.packet_size_bytes))?;
        positive("data_rate_bps", self.data_rate_bps)?;
        positive("tx_draw_mA", self.tx_draw_ma)?;
        positive("rx_draw_mA", self.rx_draw_ma)?;
        positive("init_energy_mAh", self.init_energy_mah)?;
        positive("path_loss_exponent", self.path_loss_exponent)?;
        positive("ref_distance_m", self.ref_distance_m)?;
        positive("mobility_tick_s", self.mobility_tick_s)?;
        non_negative("noise_sigma_db", self.noise_sigma_db)?;
        non_negative("speed_min_mps", self.speed_min_mps)?;
        non_negative("speed_max_mps", self.speed_max_mps)?;
        if !self.rss_ref_dbm.is_finite() {
            return Err(ConfigError::OutOfRange {
                field: "rss_ref_dbm",
                value: self.rss_ref_dbm,
                min: f64::MIN,
                max: f64::MAX,
            });
        }
        within(
            "leader_energy_threshold_fraction",
            self.leader_energy_threshold_fraction,
            0.0,
            1.0,
        )?;
        within("loss_rate", self.loss_rate, 0.0, 1.0)?;
        within("sink_x_m", self.sink_x_m, 0.0, self.grid_width_m)?;
        within("sink_y_m", self.sink_y_m, 0.0, self.grid_height_m)?;
        if self.speed_max_mps < self.speed_min_mps {
            return Err(ConfigError::SpeedRange {
                min: self.speed_min_mps,
                max: self.speed_max_mps,
            });
        }
        if self.aggregation_capacity < 1 {
            return Err(ConfigError::ZeroCapacity);
        }
        if self.num_references < 1 {
            return Err(ConfigError::NoReferences);
        }
        Ok(())
    }

    /// Number of reporting rounds, `floor(duration / period)`.
    pub fn rounds(&self) -> u32 {
        whole_rounds(self.duration_s, self.reporting_period_s)
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            width: self.grid_width_m,
            height: self.grid_height_m,
        }
    }

    pub fn sink_position(&self) -> Point {
        Point::new(self.sink_x_m, self.sink_y_m)
    }

    pub fn channel(&self) -> ChannelParams {
        ChannelParams {
            rss_ref_dbm: self.rss_ref_dbm,
            ref_distance_m: self.ref_distance_m,
            path_loss_exponent: self.path_loss_exponent,
            noise_sigma_db: self.noise_sigma_db,
            radio_range_m: self.radio_range_m,
        }
    }

    pub fn leader_threshold_mah(&self) -> f64 {
        self.leader_energy_threshold_fraction * self.init_energy_mah
    }
}

/// `floor(total / period)`, tolerant of quotients that land a hair below an
/// integer through floating-point division (e.g. `0.3 / 0.1`).
pub fn whole_rounds(total: f64, period: f64) -> u32 {
    if !(total > 0.0 && period > 0.0) {
        return 0;
    }
    let q = total / period;
    let nearest = libm::round(q);
    let n = if libm::fabs(q - nearest) <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        libm::floor(q)
    };
    n.min(f64::from(u32::MAX)) as u32
}
