//! Domain types shared by every module: angles on the sphere, discretized
//! trajectories of the additive pair (ordinate, modulator) and of the
//! process itself in Cartesian coordinates, polar conversions and path
//! concatenation, plus the CSV interchange format.

use crate::error::{Error, Result};
use std::io::{BufRead, Write};

/// Default tolerance when glueing exactly-constructed path segments.
pub const DEFAULT_TOL_GLUE: f64 = 1e-9;

/// A point on the unit sphere, stored as Cartesian components.
///
/// Unit vectors avoid spherical-coordinate singularities in general
/// dimension; a scalar-radian view is provided for the planar case only.
#[derive(Debug, Clone, PartialEq)]
pub struct Angle {
    components: Vec<f64>,
}

impl Angle {
    /// Builds an angle from a vector with norm within `1e-9` of one.
    /// The stored components are renormalized to machine precision.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("angle needs at least one component"));
        }
        let norm = norm(&components);
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "angle vector norm {norm} not within 1e-9 of 1"
            )));
        }
        let components = components.iter().map(|c| c / norm).collect();
        Ok(Angle { components })
    }

    /// Direction of an arbitrary nonzero vector.
    pub fn from_direction(v: &[f64]) -> Result<Self> {
        let n = norm(v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::domain("cannot take direction of zero vector"));
        }
        Ok(Angle {
            components: v.iter().map(|c| c / n).collect(),
        })
    }

    /// Planar angle in (-pi, pi].
    pub fn from_radians(phi: f64) -> Self {
        Angle {
            components: vec![phi.cos(), phi.sin()],
        }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Planar angle in (-pi, pi]. Only meaningful for `dim() == 2`.
    pub fn radians(&self) -> Result<f64> {
        if self.dim() != 2 {
            return Err(Error::domain("radians() requires a planar angle"));
        }
        Ok(self.components[1].atan2(self.components[0]))
    }
}

/// State of the additive pair: log-radius (ordinate) and sphere position
/// (modulator).
#[derive(Debug, Clone, PartialEq)]
pub struct MapState {
    pub xi: f64,
    pub theta: Angle,
}

impl MapState {
    pub fn new(xi: f64, theta: Angle) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::domain("ordinate must be finite"));
        }
        Ok(MapState { xi, theta })
    }
}

/// A discretized trajectory of the additive pair with an optional kill index
/// marking the lifetime.
#[derive(Debug, Clone)]
pub struct MapPath {
    times: Vec<f64>,
    states: Vec<MapState>,
    killed: Option<usize>,
}

impl MapPath {
    pub fn new(times: Vec<f64>, states: Vec<MapState>, killed: Option<usize>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::invalid("empty path"));
        }
        if times.len() != states.len() {
            return Err(Error::invalid("times and states length mismatch"));
        }
        if times[0] != 0.0 {
            return Err(Error::invalid("path must start at time 0"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times must be strictly increasing"));
        }
        if let Some(k) = killed {
            if k >= times.len() {
                return Err(Error::invalid("kill index out of range"));
            }
        }
        Ok(MapPath {
            times,
            states,
            killed,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[MapState] {
        &self.states
    }

    pub fn killed(&self) -> Option<usize> {
        self.killed
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn xi_values(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.xi).collect()
    }

    /// Lifetime: kill time if killed, otherwise the final grid time.
    pub fn lifetime(&self) -> f64 {
        match self.killed {
            Some(k) => self.times[k],
            None => *self.times.last().unwrap(),
        }
    }
}

/// A discretized trajectory in Cartesian coordinates with its scaling index.
/// Points are nonzero before the kill index.
#[derive(Debug, Clone)]
pub struct SsmpPath {
    times: Vec<f64>,
    points: Vec<Vec<f64>>,
    pub alpha: f64,
    killed: Option<usize>,
}

impl SsmpPath {
    pub fn new(
        times: Vec<f64>,
        points: Vec<Vec<f64>>,
        alpha: f64,
        killed: Option<usize>,
    ) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::invalid("empty path"));
        }
        if times.len() != points.len() {
            return Err(Error::invalid("times and points length mismatch"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times must be strictly increasing"));
        }
        if !(alpha > 0.0) {
            return Err(Error::domain("scaling index must be positive"));
        }
        let live = killed.unwrap_or(points.len());
        if points[..live].iter().any(|p| norm(p) == 0.0) {
            return Err(Error::invalid("zero point before kill index"));
        }
        if let Some(k) = killed {
            if k >= times.len() {
                return Err(Error::invalid("kill index out of range"));
            }
        }
        Ok(SsmpPath {
            times,
            points,
            alpha,
            killed,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn killed(&self) -> Option<usize> {
        self.killed
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn lifetime(&self) -> f64 {
        match self.killed {
            Some(k) => self.times[k],
            None => *self.times.last().unwrap(),
        }
    }

    /// Radii at every grid point.
    pub fn radii(&self) -> Vec<f64> {
        self.points.iter().map(|p| norm(p)).collect()
    }
}

/// The triple encoding the point of closest reach of the ordinate minimum:
/// depth below the start, modulator position at the minimum, and the time
/// the minimum was (last) attained.
#[derive(Debug, Clone)]
pub struct PocrSample {
    pub depth: f64,
    pub angle: Angle,
    pub gtime: Option<f64>,
}

impl PocrSample {
    pub fn new(depth: f64, angle: Angle, gtime: Option<f64>) -> Result<Self> {
        if !(depth >= 0.0) {
            return Err(Error::domain("depth must be nonnegative"));
        }
        if let Some(g) = gtime {
            if !(g >= 0.0) {
                return Err(Error::domain("gtime must be nonnegative"));
            }
        }
        Ok(PocrSample {
            depth,
            angle,
            gtime,
        })
    }
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Polar decomposition of a nonzero vector into (log-radius, direction).
pub fn to_polar(x: &[f64]) -> Result<(f64, Angle)> {
    let r = norm(x);
    if r == 0.0 || !r.is_finite() {
        return Err(Error::domain("to_polar requires a nonzero finite vector"));
    }
    Ok((r.ln(), Angle::from_direction(x)?))
}

/// Inverse of [`to_polar`]: the vector `exp(logr) * theta`.
pub fn from_polar(logr: f64, theta: &Angle) -> Vec<f64> {
    let r = logr.exp();
    theta.components().iter().map(|c| c * r).collect()
}

/// Result of glueing two path segments end to end.
#[derive(Debug, Clone)]
pub struct GluedPath {
    pub path: SsmpPath,
    /// Measured endpoint mismatch between the segments.
    pub endpoint_gap: f64,
}

/// Concatenates a killed path with a follow-on segment started at the kill
/// position. The follow-on times are shifted by the first path's lifetime.
pub fn concat_paths(pre: &SsmpPath, post: &SsmpPath, tol_glue: f64) -> Result<GluedPath> {
    if pre.killed().is_none() {
        return Err(Error::invalid("first segment must have a finite lifetime"));
    }
    if post.times()[0] != 0.0 {
        return Err(Error::invalid("second segment must start at time 0"));
    }
    if pre.dim() != post.dim() {
        return Err(Error::invalid("segment dimensions differ"));
    }
    let k = pre.killed().unwrap();
    let end = &pre.points()[k];
    let start = &post.points()[0];
    let gap = norm(&end
        .iter()
        .zip(start.iter())
        .map(|(a, b)| a - b)
        .collect::<Vec<_>>());
    if gap > tol_glue {
        return Err(Error::Glue { gap, tol: tol_glue });
    }
    let shift = pre.times()[k];
    let mut times: Vec<f64> = pre.times()[..=k].to_vec();
    let mut points: Vec<Vec<f64>> = pre.points()[..=k].to_vec();
    // The post segment's first point coincides with the glue point; keep the
    // pre endpoint and append from index 1.
    times.extend(post.times()[1..].iter().map(|t| t + shift));
    points.extend(post.points()[1..].iter().cloned());
    let killed = post.killed().map(|kp| kp + k);
    let path = SsmpPath::new(times, points, pre.alpha, killed)?;
    Ok(GluedPath {
        path,
        endpoint_gap: gap,
    })
}

/// Writes an `SsmpPath` as CSV: header `t,x_1..x_d`, one row per grid point,
/// and a trailing `#killed=<index>` row when the path is killed.
pub fn write_ssmp_csv<W: Write>(path: &SsmpPath, mut w: W) -> Result<()> {
    let d = path.dim();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=d).map(|i| format!("x_{i}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for (t, p) in path.times().iter().zip(path.points()) {
        let row: Vec<String> = std::iter::once(format!("{t}"))
            .chain(p.iter().map(|c| format!("{c}")))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    if let Some(k) = path.killed() {
        writeln!(w, "#killed={k}")?;
    }
    Ok(())
}

/// Writes a `MapPath` as CSV: header `t,xi,theta_1..theta_d`.
pub fn write_map_csv<W: Write>(path: &MapPath, mut w: W) -> Result<()> {
    let d = path.states()[0].theta.dim();
    let header: Vec<String> = ["t".to_string(), "xi".to_string()]
        .into_iter()
        .chain((1..=d).map(|i| format!("theta_{i}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for (t, s) in path.times().iter().zip(path.states()) {
        let row: Vec<String> = [format!("{t}"), format!("{}", s.xi)]
            .into_iter()
            .chain(s.theta.components().iter().map(|c| format!("{c}")))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    if let Some(k) = path.killed() {
        writeln!(w, "#killed={k}")?;
    }
    Ok(())
}

/// Reads an `SsmpPath` written by [`write_ssmp_csv`]. The scaling index is
/// not part of the format and must be supplied.
pub fn read_ssmp_csv<R: BufRead>(r: R, alpha: f64) -> Result<SsmpPath> {
    let mut times = Vec::new();
    let mut points = Vec::new();
    let mut killed = None;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with('t')) {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#killed=") {
            killed = Some(rest.parse::<usize>().map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?);
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })
            })
            .collect::<Result<_>>()?;
        if fields.len() < 2 {
            return Err(Error::Parse {
                line: i + 1,
                msg: "row needs a time and at least one coordinate".into(),
            });
        }
        times.push(fields[0]);
        points.push(fields[1..].to_vec());
    }
    SsmpPath::new(times, points, alpha, killed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_axis_cases() {
        let (logr, theta) = to_polar(&[1.0, 0.0]).unwrap();
        assert_eq!(logr, 0.0);
        assert_eq!(theta.components(), &[1.0, 0.0]);

        let (logr, theta) = to_polar(&[std::f64::consts::E, 0.0]).unwrap();
        assert!((logr - 1.0).abs() < 1e-15);
        assert_eq!(theta.components(), &[1.0, 0.0]);
    }

    #[test]
    fn polar_three_four_five() {
        // Independent oracle: |(3,4)| via hypot.
        let expected_logr = 3.0f64.hypot(4.0).ln();
        let (logr, theta) = to_polar(&[3.0, 4.0]).unwrap();
        assert!((logr - expected_logr).abs() < 1e-15);
        assert!((logr - 5.0f64.ln()).abs() < 1e-15);
        assert!((theta.components()[0] - 0.6).abs() < 1e-15);
        assert!((theta.components()[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn from_polar_basics() {
        let v = from_polar(0.0, &Angle::new(vec![0.0, 1.0]).unwrap());
        assert_eq!(v, vec![0.0, 1.0]);
        let v = from_polar(1.0, &Angle::new(vec![1.0, 0.0]).unwrap());
        assert!((v[0] - std::f64::consts::E).abs() < 1e-15);
        assert_eq!(v[1], 0.0);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(to_polar(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn non_unit_angle_rejected() {
        assert!(Angle::new(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn polar_round_trip_random() {
        // Deterministic LCG so the test needs no RNG plumbing.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let d = 2 + (next() * 3.0) as usize;
            let x: Vec<f64> = (0..d).map(|_| 4.0 * next() - 2.0).collect();
            if norm(&x) < 1e-3 {
                continue;
            }
            let (logr, theta) = to_polar(&x).unwrap();
            let back = from_polar(logr, &theta);
            let scale = norm(&x);
            for (a, b) in x.iter().zip(back.iter()) {
                assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
            }
        }
    }

    fn line_path(times: Vec<f64>, xs: Vec<f64>, killed: Option<usize>) -> SsmpPath {
        let points = xs.into_iter().map(|x| vec![x, 1.0]).collect();
        SsmpPath::new(times, points, 1.0, killed).unwrap()
    }

    #[test]
    fn concat_shifts_times_and_preserves_count() {
        let pre = line_path(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0], Some(2));
        let post = line_path(vec![0.0, 1.0], vec![3.0, 4.0], None);
        let glued = concat_paths(&pre, &post, DEFAULT_TOL_GLUE).unwrap();
        assert_eq!(glued.path.times(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(glued.path.len(), pre.len() + post.len() - 1);
        assert!(glued.endpoint_gap <= DEFAULT_TOL_GLUE);
        assert!(glued
            .path
            .times()
            .windows(2)
            .all(|w| w[1] > w[0]));
    }

    #[test]
    fn concat_mismatch_rejected() {
        let pre = line_path(vec![0.0, 1.0], vec![1.0, 2.0], Some(1));
        let post = line_path(vec![0.0, 1.0], vec![2.5, 3.0], None);
        match concat_paths(&pre, &post, 1e-6) {
            Err(Error::Glue { gap, .. }) => assert!((gap - 0.5).abs() < 1e-12),
            other => panic!("expected glue error, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip() {
        let p = line_path(vec![0.0, 0.5, 1.25], vec![1.0, -2.0, 0.5], Some(2));
        let mut buf = Vec::new();
        write_ssmp_csv(&p, &mut buf).unwrap();
        let back = read_ssmp_csv(std::io::Cursor::new(buf), 1.0).unwrap();
        assert_eq!(back.times(), p.times());
        assert_eq!(back.points(), p.points());
        assert_eq!(back.killed(), Some(2));
    }
}
