//! Direct numerical integration of the equations of motion, used as ground
//! truth for the analytic orbit.
//!
//! Two systems are integrated with classical fixed-step RK4, both in scaled
//! units and both switched on at t = 0 from the circular state:
//!
//! * the full Coulomb problem `r'' = -r/|r|³ - eps (cos(αt+δ), sin(αt+δ))`;
//! * the first-order equation `r1'' = -(r1 - 3 (r0·r1) r0) - eps (...)` about
//!   the circular orbit `r0 = (cos(t+φ0), sin(t+φ0))`, with `r1(0) = r1'(0) = 0`.

use serde::{Deserialize, Serialize};

use crate::clifford::{dot, Vec2};
use crate::error::{Error, Result};
use crate::model::ScaledConfig;
use crate::orbit::OrbitSolution;

/// Radius below which the full integration is considered a collision.
pub const SINGULAR_RADIUS: f64 = 1e-6;

/// Largest step accepted.
pub const MAX_DT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    pub dt: f64,
    pub t_end: f64,
    pub method: Method,
    /// Keep every `stride`-th step in the output (the final step is always kept).
    pub stride: usize,
}

impl IntegratorSettings {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        let s = Self {
            dt,
            t_end,
            method: Method::Rk4,
            stride: 1,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::InvalidInput(format!(
                "dt must lie in (0, {MAX_DT}], got {}",
                self.dt
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "t_end must be positive and finite, got {}",
                self.t_end
            )));
        }
        Ok(())
    }

    /// Number of steps and the exact step length that lands on `t_end`.
    pub fn grid(&self) -> (usize, f64) {
        let n = ((self.t_end / self.dt).round() as usize).max(1);
        (n, self.t_end / n as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            positions: Vec::with_capacity(n),
            velocities: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, r: Vec2, v: Vec2) {
        self.times.push(t);
        self.positions.push(r);
        self.velocities.push(v);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        Some((*self.times.first()?, *self.times.last()?))
    }

    pub fn last_position(&self) -> Option<Vec2> {
        self.positions.last().copied()
    }
}

type State = (Vec2, Vec2);

fn rk4_step(f: &impl Fn(f64, State) -> Vec2, t: f64, (r, v): State, h: f64) -> State {
    let a1 = f(t, (r, v));
    let (r2, v2) = (r + v * (h / 2.0), v + a1 * (h / 2.0));
    let a2 = f(t + h / 2.0, (r2, v2));
    let (r3, v3) = (r + v2 * (h / 2.0), v + a2 * (h / 2.0));
    let a3 = f(t + h / 2.0, (r3, v3));
    let (r4, v4) = (r + v3 * h, v + a3 * h);
    let a4 = f(t + h, (r4, v4));
    (
        r + (v + v2 * 2.0 + v3 * 2.0 + v4) * (h / 6.0),
        v + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0),
    )
}

fn run(
    s: &IntegratorSettings,
    init: State,
    accel: impl Fn(f64, State) -> Vec2,
    mut check: impl FnMut(f64, &State) -> Result<()>,
    record: impl Fn(f64, &State) -> State,
) -> Result<Trajectory> {
    s.validate()?;
    let (n, h) = s.grid();
    let mut traj = Trajectory::with_capacity(n / s.stride + 2);
    let mut state = init;
    let (r, v) = record(0.0, &state);
    traj.push(0.0, r, v);
    for i in 1..=n {
        let t_prev = h * (i - 1) as f64;
        state = rk4_step(&accel, t_prev, state, h);
        let t = h * i as f64;
        check(t, &state)?;
        if i % s.stride == 0 || i == n {
            let (r, v) = record(t, &state);
            traj.push(t, r, v);
        }
    }
    Ok(traj)
}

fn forcing(cfg: &ScaledConfig, t: f64) -> Vec2 {
    let (s, c) = (cfg.alpha * t + cfg.delta).sin_cos();
    Vec2::new(c, s) * cfg.eps
}

fn circular(cfg: &ScaledConfig, t: f64) -> State {
    let (s, c) = (t + cfg.phi0).sin_cos();
    (Vec2::new(c, s), Vec2::new(-s, c))
}

fn collision_guard(t: f64, (r, v): &State) -> Result<()> {
    let radius = r.norm();
    if radius < SINGULAR_RADIUS || !radius.is_finite() || !v.is_finite() {
        return Err(Error::SingularRadius { t, radius });
    }
    Ok(())
}

/// Integrates the full driven Coulomb problem.
pub fn integrate_full(cfg: &ScaledConfig, s: &IntegratorSettings) -> Result<Trajectory> {
    cfg.validate()?;
    let accel = |t: f64, (r, _): State| {
        let rn = r.norm();
        r * (-1.0 / (rn * rn * rn)) - forcing(cfg, t)
    };
    run(s, circular(cfg, 0.0), accel, collision_guard, |_, st| *st)
}

/// Integrates the first-order perturbation equation and returns the
/// trajectory of `r0 + r1`.
pub fn integrate_linearized(cfg: &ScaledConfig, s: &IntegratorSettings) -> Result<Trajectory> {
    cfg.validate()?;
    let accel = |t: f64, (r1, _): State| {
        let (r0, _) = circular(cfg, t);
        (r1 - r0 * (3.0 * dot(r0, r1))) * -1.0 - forcing(cfg, t)
    };
    let record = |t: f64, (r1, v1): &State| {
        let (r0, v0) = circular(cfg, t);
        (r0 + *r1, v0 + *v1)
    };
    run(
        s,
        (Vec2::default(), Vec2::default()),
        accel,
        |_, _| Ok(()),
        record,
    )
}

/// Position deviation statistics between two descriptions of the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub max_dev: f64,
    pub rms_dev: f64,
    /// `max_dev / eps`; absent when eps is zero.
    pub dev_over_eps: Option<f64>,
    /// `max_dev / eps²`; absent when eps is zero.
    pub dev_over_eps2: Option<f64>,
    pub samples: usize,
}

impl ErrorReport {
    fn from_devs(devs: impl Iterator<Item = f64>, eps: f64) -> Self {
        let (mut max, mut sq, mut n) = (0.0f64, 0.0, 0usize);
        for d in devs {
            max = max.max(d);
            sq += d * d;
            n += 1;
        }
        let rms = if n == 0 { 0.0 } else { (sq / n as f64).sqrt() };
        let scaled = |p: i32| (eps > 0.0).then(|| max / eps.powi(p));
        Self {
            max_dev: max,
            rms_dev: rms,
            dev_over_eps: scaled(1),
            dev_over_eps2: scaled(2),
            samples: n,
        }
    }
}

/// Compares analytic positions with the trajectory samples in `window`.
pub fn compare_window(
    analytic: &OrbitSolution,
    numeric: &Trajectory,
    window: (f64, f64),
) -> Result<ErrorReport> {
    let (want_start, want_end) = window;
    let slack = 1e-9 * want_end.abs().max(1.0);
    match numeric.span() {
        Some((have_start, have_end))
            if have_start <= want_start + slack && have_end >= want_end - slack => {}
        span => {
            let (have_start, have_end) = span.unwrap_or((f64::NAN, f64::NAN));
            return Err(Error::WindowMismatch {
                have_start,
                have_end,
                want_start,
                want_end,
            });
        }
    }
    let devs = numeric
        .times
        .iter()
        .zip(&numeric.positions)
        .filter(|(&t, _)| t >= want_start - slack && t <= want_end + slack)
        .map(|(&t, &r)| (analytic.position(t) - r).norm());
    Ok(ErrorReport::from_devs(devs, analytic.cfg.eps))
}

/// Compares over the whole trajectory.
pub fn compare(analytic: &OrbitSolution, numeric: &Trajectory) -> Result<ErrorReport> {
    let window = numeric
        .span()
        .ok_or_else(|| Error::InvalidInput("empty trajectory".into()))?;
    compare_window(analytic, numeric, window)
}

/// Sample-by-sample comparison of two trajectories on the same time grid.
pub fn compare_trajectories(a: &Trajectory, b: &Trajectory, eps: f64) -> Result<ErrorReport> {
    if a.times != b.times {
        return Err(Error::InvalidInput(
            "trajectories are on different time grids".into(),
        ));
    }
    let devs = a
        .positions
        .iter()
        .zip(&b.positions)
        .map(|(p, q)| (*p - *q).norm());
    Ok(ErrorReport::from_devs(devs, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    use crate::coefficients::ResonancePolicy;
    use crate::orbit::solve;

    fn cfg(alpha: f64, eps: f64) -> ScaledConfig {
        ScaledConfig::new(alpha, eps, 0.3, 0.7).unwrap()
    }

    #[test]
    fn settings_validation() {
        assert!(IntegratorSettings::new(1e-3, 1.0).is_ok());
        assert!(IntegratorSettings::new(0.0, 1.0).is_err());
        assert!(IntegratorSettings::new(2e-2, 1.0).is_err());
        assert!(IntegratorSettings::new(1e-3, 0.0).is_err());
        assert!(IntegratorSettings::new(1e-3, f64::INFINITY).is_err());
        let (n, h) = IntegratorSettings::new(1e-3, TAU).unwrap().grid();
        assert_eq!(n, 6283);
        assert!((h * n as f64 - TAU).abs() < 1e-12);
    }

    #[test]
    fn trajectory_shape() {
        let s = IntegratorSettings::new(1e-2, 1.0).unwrap().with_stride(7);
        let tr = integrate_full(&cfg(3.0, 1e-3), &s).unwrap();
        assert_eq!(tr.len(), tr.positions.len());
        assert_eq!(tr.len(), tr.velocities.len());
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(tr.span(), Some((0.0, 1.0)));
    }

    #[test]
    fn unforced_orbit_closes() {
        let s = IntegratorSettings::new(1e-3, TAU).unwrap();
        let c = cfg(3.0, 0.0);
        let tr = integrate_full(&c, &s).unwrap();
        assert!((tr.last_position().unwrap() - tr.positions[0]).norm() < 1e-10);
    }

    #[test]
    fn unforced_radius_is_conserved() {
        let s = IntegratorSettings::new(1e-3, 20.0 * PI)
            .unwrap()
            .with_stride(50);
        let tr = integrate_full(&cfg(3.0, 0.0), &s).unwrap();
        let worst = tr
            .positions
            .iter()
            .map(|r| (r.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn unforced_drift_is_fourth_order() {
        let drift = |dt: f64| {
            let s = IntegratorSettings::new(dt, 20.0 * PI)
                .unwrap()
                .with_stride(usize::MAX);
            let tr = integrate_full(&cfg(3.0, 0.0), &s).unwrap();
            (tr.last_position().unwrap() - tr.positions[0]).norm()
        };
        let ratio = drift(5e-3) / drift(2.5e-3);
        assert!((14.0..=18.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn unforced_linearized_perturbation_vanishes() {
        let c = cfg(3.0, 0.0);
        let s = IntegratorSettings::new(1e-2, 10.0).unwrap();
        let tr = integrate_linearized(&c, &s).unwrap();
        for (&t, &r) in tr.times.iter().zip(&tr.positions) {
            let (sn, cs) = (t + 0.3).sin_cos();
            assert_eq!(r, Vec2::new(cs, sn));
        }
    }

    #[test]
    fn linearized_is_fourth_order_by_successive_refinement() {
        let c = cfg(3.0, 1e-3);
        let end = |dt: f64| {
            let s = IntegratorSettings::new(dt, 4.0 * PI)
                .unwrap()
                .with_stride(usize::MAX);
            integrate_linearized(&c, &s)
                .unwrap()
                .last_position()
                .unwrap()
        };
        let (a, b, d) = (end(1e-2), end(5e-3), end(2.5e-3));
        let ratio = (a - b).norm() / (b - d).norm();
        assert!((14.0..=18.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn linearized_and_full_agree_to_second_order() {
        // the two integrations differ only by terms quadratic in r1
        let s = IntegratorSettings::new(5e-3, TAU).unwrap();
        let gap = |eps: f64| {
            let c = cfg(3.0, eps);
            let full = integrate_full(&c, &s).unwrap();
            let lin = integrate_linearized(&c, &s).unwrap();
            compare_trajectories(&full, &lin, eps).unwrap().max_dev
        };
        let ratio = gap(2e-4) / gap(1e-4);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn collision_guard_trips_near_the_origin() {
        let v = Vec2::new(0.0, 1.0);
        assert!(collision_guard(1.0, &(Vec2::new(1.0, 0.0), v)).is_ok());
        assert!(matches!(
            collision_guard(2.5, &(Vec2::new(5e-7, 0.0), v)),
            Err(Error::SingularRadius { t, .. }) if t == 2.5
        ));
        assert!(collision_guard(0.0, &(Vec2::new(f64::NAN, 0.0), v)).is_err());
        assert!(
            collision_guard(0.0, &(Vec2::new(1.0, 0.0), Vec2::new(f64::INFINITY, 0.0))).is_err()
        );
    }

    #[test]
    fn compare_identical_is_zero_and_window_is_checked() {
        let c = cfg(3.0, 1e-3);
        let s = IntegratorSettings::new(1e-2, 1.0).unwrap();
        let tr = integrate_full(&c, &s).unwrap();
        let r = compare_trajectories(&tr, &tr, 1e-3).unwrap();
        assert_eq!((r.max_dev, r.rms_dev), (0.0, 0.0));
        assert_eq!(r.dev_over_eps, Some(0.0));

        let sol = solve(&c, &ResonancePolicy::default()).unwrap();
        assert!(compare_window(&sol, &tr, (0.0, 1.0)).is_ok());
        assert!(matches!(
            compare_window(&sol, &tr, (0.0, 2.0)),
            Err(Error::WindowMismatch { .. })
        ));
    }

    #[test]
    fn zero_eps_report_has_no_normalized_fields() {
        let c = cfg(3.0, 0.0);
        let sol = solve(&c, &ResonancePolicy::default()).unwrap();
        let s = IntegratorSettings::new(1e-3, TAU).unwrap();
        let r = compare(&sol, &integrate_full(&c, &s).unwrap()).unwrap();
        assert!(r.max_dev < 1e-9);
        assert_eq!(r.dev_over_eps, None);
    }
}
