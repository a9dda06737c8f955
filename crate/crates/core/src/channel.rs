//! Log-distance path loss: received power falls by `10 * eta` dB per decade
//! of distance beyond the reference distance `d0`.
//!
//! Connectivity is a boundary-inclusive disk of radius `radio_range_m`; RSS
//! noise only ever perturbs distance estimates, never who can hear whom.

use serde::{Deserialize, Serialize};

use crate::error::ChannelError;
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Received power at `ref_distance_m`, dBm.
    pub rss_ref_dbm: f64,
    pub ref_distance_m: f64,
    pub path_loss_exponent: f64,
    /// Standard deviation of log-normal shadowing, dB.
    pub noise_sigma_db: f64,
    pub radio_range_m: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            rss_ref_dbm: -40.0,
            ref_distance_m: 1.0,
            path_loss_exponent: 2.4,
            noise_sigma_db: 0.0,
            radio_range_m: 16.0,
        }
    }
}

/// RSS in dBm at distance `d`. `noise_draw` is a standard-normal sample
/// scaled by `noise_sigma_db`; pass `None` for the noiseless value.
pub fn rss_at_distance(
    d: f64,
    params: &ChannelParams,
    noise_draw: Option<f64>,
) -> Result<f64, ChannelError> {
    if !(d > 0.0) {
        return Err(ChannelError::NonPositiveDistance(d));
    }
    let loss = 10.0 * params.path_loss_exponent * libm::log10(d / params.ref_distance_m);
    let noise = noise_draw.map_or(0.0, |z| params.noise_sigma_db * z);
    Ok(params.rss_ref_dbm - loss + noise)
}

/// Inverse of the noiseless path-loss curve.
pub fn distance_from_rss(rss: f64, params: &ChannelParams) -> f64 {
    let exponent = (params.rss_ref_dbm - rss) / (10.0 * params.path_loss_exponent);
    params.ref_distance_m * libm::pow(10.0, exponent)
}

pub fn in_range(a: Point, b: Point, params: &ChannelParams) -> bool {
    a.distance(b) <= params.radio_range_m
}
