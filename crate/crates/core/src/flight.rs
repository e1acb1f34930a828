//! Analytic flight delays.
//!
//! Horizontal moves follow a symmetric trapezoidal velocity profile (or a
//! triangular one when the leg is too short to reach cruise speed). A wrong
//! "go" decision is undone by braking at the instant the computation
//! finishes, turning around, and flying back to the point of interest.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KinematicParams {
    /// Target horizontal speed, m/s.
    pub cruise_speed: f64,
    /// Acceleration and deceleration magnitude, m/s².
    pub accel: f64,
    /// Vertical takeoff duration, s.
    pub takeoff_time: f64,
    /// Vertical landing duration, s.
    pub land_time: f64,
    /// Yaw/settle time added once per turn-back, s.
    pub turnaround_overhead: f64,
}

impl Default for KinematicParams {
    fn default() -> Self {
        Self {
            cruise_speed: 4.0,
            accel: 2.0,
            takeoff_time: 8.0,
            land_time: 10.0,
            turnaround_overhead: 2.0,
        }
    }
}

impl KinematicParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.cruise_speed,
            self.accel,
            self.takeoff_time,
            self.land_time,
            self.turnaround_overhead,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("kinematic parameters must be finite".into()));
        }
        if self.cruise_speed <= 0.0 || self.accel <= 0.0 {
            return Err(Error::Config("cruise_speed and accel must be positive".into()));
        }
        if self.takeoff_time < 0.0 || self.land_time < 0.0 || self.turnaround_overhead < 0.0 {
            return Err(Error::Config("takeoff, land and turnaround times must be >= 0".into()));
        }
        Ok(())
    }

    /// Shortest leg on which the drone reaches cruise speed.
    pub fn cruise_threshold(&self) -> f64 {
        self.cruise_speed * self.cruise_speed / self.accel
    }
}

/// Time to fly `distance` metres starting and ending at rest.
pub fn flight_time(distance: f64, k: &KinematicParams) -> Result<f64> {
    if !(distance >= 0.0) || !distance.is_finite() {
        return Err(Error::Domain(format!("distance must be finite and >= 0, got {distance}")));
    }
    Ok(flight_time_unchecked(distance, k))
}

fn flight_time_unchecked(distance: f64, k: &KinematicParams) -> f64 {
    if distance >= k.cruise_threshold() {
        distance / k.cruise_speed + k.cruise_speed / k.accel
    } else {
        2.0 * (distance / k.accel).sqrt()
    }
}

/// Position along the leg and current speed, `elapsed` seconds after departure.
pub fn position_after(elapsed: f64, distance: f64, k: &KinematicParams) -> Result<(f64, f64)> {
    let total = flight_time(distance, k)?;
    if !(elapsed >= 0.0) || elapsed > total + 1e-12 {
        return Err(Error::Domain(format!(
            "elapsed time {elapsed} s outside [0, {total}] s for a {distance} m leg"
        )));
    }
    let t = elapsed.min(total);
    let a = k.accel;
    // Duration of the acceleration (and of the deceleration) phase.
    let ramp = if distance >= k.cruise_threshold() { k.cruise_speed / a } else { total / 2.0 };
    Ok(if t <= ramp {
        (0.5 * a * t * t, a * t)
    } else if t <= total - ramp {
        let v = a * ramp;
        (0.5 * a * ramp * ramp + v * (t - ramp), v)
    } else {
        let r = total - t;
        (distance - 0.5 * a * r * r, a * r)
    })
}

/// Extra time, relative to having waited, when the drone left after sensing
/// and learns `proc_t` seconds later that it must go back.
///
/// Requires `0 <= proc_t < flight_time(distance)`: the result must arrive
/// before the next waypoint is reached.
pub fn penalty_time(distance: f64, proc_t: f64, k: &KinematicParams) -> Result<f64> {
    let total = flight_time(distance, k)?;
    if !(proc_t >= 0.0) || proc_t >= total {
        return Err(Error::Contract(format!(
            "processing time {proc_t} s must be in [0, {total}) s for a {distance} m leg"
        )));
    }
    let (x, v) = position_after(proc_t, distance, k)?;
    let t_stop = v / k.accel;
    let x_stop = x + v * v / (2.0 * k.accel);
    Ok(t_stop + k.turnaround_overhead + flight_time_unchecked(x_stop, k))
}
