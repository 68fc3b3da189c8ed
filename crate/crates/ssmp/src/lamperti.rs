//! The space-time transform between additive-pair trajectories and
//! Cartesian trajectories, in both directions, on discretized paths.
//!
//! The clock uses a left-endpoint rule, consistent with the cadlag
//! convention that a grid value is held from the left knot; step paths
//! therefore transform exactly.

use crate::error::{Error, Result};
use crate::path::{from_polar, to_polar, MapPath, MapState, SsmpPath};

/// The additive-to-Cartesian clock: values of the integral of
/// `exp(alpha * xi)` at the grid knots.
#[derive(Debug, Clone)]
pub struct TimeChange {
    pub alpha: f64,
    /// Grid times of the underlying additive path.
    map_times: Vec<f64>,
    /// Nondecreasing clock values at the knots, `clock[0] = 0`.
    clock: Vec<f64>,
}

impl TimeChange {
    pub fn clock(&self) -> &[f64] {
        &self.clock
    }

    pub fn map_times(&self) -> &[f64] {
        &self.map_times
    }

    /// Final clock value: the Cartesian lifetime carried by the grid.
    pub fn lifetime(&self) -> f64 {
        *self.clock.last().unwrap()
    }
}

/// Builds the clock of a path: `clock[k] = sum_{j<k} exp(alpha*xi_j) * dt_j`.
pub fn build_clock(map_path: &MapPath, alpha: f64) -> Result<TimeChange> {
    if !(alpha > 0.0) {
        return Err(Error::domain("alpha must be positive"));
    }
    let last = map_path.killed().unwrap_or(map_path.len() - 1);
    let times = &map_path.times()[..=last];
    let states = &map_path.states()[..=last];
    let mut clock = Vec::with_capacity(times.len());
    clock.push(0.0);
    let mut acc = 0.0;
    for j in 0..times.len() - 1 {
        acc += (alpha * states[j].xi).exp() * (times[j + 1] - times[j]);
        clock.push(acc);
    }
    Ok(TimeChange {
        alpha,
        map_times: times.to_vec(),
        clock,
    })
}

/// Generalized inverse of the clock by binary search with linear
/// interpolation inside a grid cell (exact when the ordinate is constant on
/// the cell). `None` signals that `t` is at or beyond the lifetime.
pub fn phi(tc: &TimeChange, t: f64) -> Option<f64> {
    if t < 0.0 || t >= tc.lifetime() {
        return None;
    }
    let k = held_index(tc, t);
    if k + 1 >= tc.clock.len() {
        return None;
    }
    let (c0, c1) = (tc.clock[k], tc.clock[k + 1]);
    let (s0, s1) = (tc.map_times[k], tc.map_times[k + 1]);
    if c1 == c0 {
        return Some(s0);
    }
    Some(s0 + (t - c0) / (c1 - c0) * (s1 - s0))
}

/// Grid-cell index whose held value governs Cartesian time `t`, i.e. the
/// largest knot with clock value at most `t`.
fn held_index(tc: &TimeChange, t: f64) -> usize {
    match tc.clock.binary_search_by(|c| c.total_cmp(&t)) {
        Ok(i) => i,
        Err(i) => i - 1,
    }
}

/// Transforms an additive path into the Cartesian trajectory
/// `exp(xi) * theta` sampled at `out_times`; the kill index is set where an
/// output time reaches the lifetime carried by the clock.
pub fn ssmp_from_map(map_path: &MapPath, alpha: f64, out_times: &[f64]) -> Result<SsmpPath> {
    if out_times.is_empty() {
        return Err(Error::domain("out_times must be nonempty"));
    }
    let tc = build_clock(map_path, alpha)?;
    let lifetime = tc.lifetime();
    let dim = map_path.states()[0].theta.dim();
    let mut points = Vec::with_capacity(out_times.len());
    let mut killed = None;
    for (i, &t) in out_times.iter().enumerate() {
        if t >= lifetime {
            if killed.is_none() {
                killed = Some(i);
            }
            points.push(vec![0.0; dim]);
        } else {
            let k = held_index(&tc, t);
            let s = &map_path.states()[k];
            points.push(from_polar(s.xi, &s.theta));
        }
    }
    SsmpPath::new(out_times.to_vec(), points, alpha, killed)
}

/// Inverse transform: log-radius and direction at the knots, reindexed by
/// the inverse clock built from the integral of the negative-alpha radius
/// power.
pub fn map_from_ssmp(ssmp_path: &SsmpPath) -> Result<MapPath> {
    let alpha = ssmp_path.alpha;
    let last = ssmp_path.killed().unwrap_or(ssmp_path.len() - 1);
    let times = &ssmp_path.times()[..=last];
    let pts = &ssmp_path.points()[..=last];
    let live = ssmp_path.killed().map(|_| last).unwrap_or(times.len());

    let mut map_times = Vec::with_capacity(times.len());
    let mut states = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for (j, p) in pts.iter().enumerate() {
        map_times.push(acc);
        if j < live {
            let (xi, theta) = to_polar(p)?;
            states.push(MapState::new(xi, theta)?);
            if j + 1 < times.len() {
                let r = crate::path::norm(p);
                acc += r.powf(-alpha) * (times[j + 1] - times[j]);
            }
        } else {
            // Cemetery knot; carry the previous state so lengths match, the
            // kill index marks it as dead.
            let prev = states
                .last()
                .cloned()
                .ok_or_else(|| Error::invalid("path killed at its first point"))?;
            states.push(prev);
        }
    }
    let killed = ssmp_path.killed().map(|_| last);
    MapPath::new(map_times, states, killed)
}
