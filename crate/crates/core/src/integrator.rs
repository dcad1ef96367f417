//! Explicit-Euler evolution of the modulated field.

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::flow::{ModeState, ModulatedDs};
use crate::geometry::{self, Superquadric};
use crate::linalg::Vec3;

/// Accepted constraint violation after the guard has run.
pub const GUARD_TOL: f64 = 1e-12;

/// Radial projection rounds per guard call before falling back.
pub const GUARD_ALTERNATIONS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub max_steps: usize,
    pub goal_tol: f64,
    /// Project each new point back into the valid region.
    pub guard: bool,
    /// Record every n-th sample (the final sample is always kept).
    pub record_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            max_steps: 200_000,
            goal_tol: 1e-3,
            guard: true,
            record_stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::validation("integrator.dt", "must be positive"));
        }
        if self.max_steps < 1 {
            return Err(Error::validation("integrator.max_steps", "must be ≥ 1"));
        }
        if !(self.goal_tol > 0.0 && self.goal_tol.is_finite()) {
            return Err(Error::validation("integrator.goal_tol", "must be positive"));
        }
        if self.record_stride < 1 {
            return Err(Error::validation("integrator.record_stride", "must be ≥ 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub xi: Vec3,
    pub v: Vec3,
    pub mode: ModeState,
    pub gamma_o: Option<f64>,
    pub gamma_w: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    ReachedTarget,
    MaxSteps,
    /// Evaluation or guard failure; carries [`Error::code`] and the message.
    Error { code: String, message: String },
}

impl Outcome {
    pub fn label(&self) -> &str {
        match self {
            Outcome::ReachedTarget => "reached_target",
            Outcome::MaxSteps => "max_steps",
            Outcome::Error { code, .. } => code,
        }
    }
}

/// Summary over every visited point, recorded or not.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryStats {
    pub min_gamma_o: Option<f64>,
    pub max_gamma_w: f64,
    pub steps: usize,
    pub mode_transitions: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub outcome: Outcome,
    pub stats: TrajectoryStats,
}

impl Trajectory {
    /// Total signed angle swept by the path around `axis` through `center`.
    ///
    /// Positions are projected onto the plane orthogonal to `axis`; the sign
    /// follows the right-hand rule about `axis`.
    pub fn winding_angle(&self, center: Vec3, axis: Vec3) -> f64 {
        let Some(axis) = axis.normalized() else {
            return 0.0;
        };
        let planar = |p: Vec3| {
            let r = p - center;
            r - axis * r.dot(axis)
        };
        self.samples
            .windows(2)
            .map(|w| {
                let (a, b) = (planar(w[0].xi), planar(w[1].xi));
                if a.norm() == 0.0 || b.norm() == 0.0 {
                    return 0.0;
                }
                a.cross(b).dot(axis).atan2(a.dot(b))
            })
            .sum()
    }

    pub fn final_position(&self) -> Option<Vec3> {
        self.samples.last().map(|s| s.xi)
    }
}

/// `xi + v Δt`.
#[inline]
pub fn step(xi: Vec3, v: Vec3, dt: f64) -> Vec3 {
    xi + v * dt
}

/// Pulls `xi` back inside the workspace and outside the obstacle.
pub fn containment_guard(ws: &Superquadric, ob: Option<&Superquadric>, xi: Vec3) -> Result<Vec3> {
    guard_point(Some(ws), ob, xi)
}

/// Guard with either constraint optional.
///
/// Alternates exact radial projections (the scaling law makes them one-shot
/// per surface). If both surfaces keep undoing each other, the point is
/// snapped onto their intersection curve by Gauss–Newton.
pub fn guard_point(ws: Option<&Superquadric>, ob: Option<&Superquadric>, xi: Vec3) -> Result<Vec3> {
    let violation = |x: Vec3| -> Result<(f64, f64)> {
        let gw = ws.map(|w| geometry::gamma(w, x)).transpose()?.unwrap_or(0.0);
        let go = ob.map(|o| geometry::gamma(o, x)).transpose()?.unwrap_or(f64::INFINITY);
        Ok((gw, go))
    };
    let ok = |(gw, go): (f64, f64)| gw <= 1.0 + GUARD_TOL && go >= 1.0 - GUARD_TOL;

    let mut x = xi;
    let mut g = violation(x)?;
    for _ in 0..GUARD_ALTERNATIONS {
        if ok(g) {
            return Ok(x);
        }
        if let Some(w) = ws {
            if g.0 > 1.0 {
                x = w.radial_projection(x, 1.0)?;
                g = violation(x)?;
            }
        }
        if let Some(o) = ob {
            if g.1 < 1.0 {
                x = o.radial_projection(x, 1.0)?;
                g = violation(x)?;
            }
        }
    }
    if ok(g) {
        return Ok(x);
    }
    if let (Some(w), Some(o)) = (ws, ob) {
        if let Some(p) = geometry::project_to_intersection(w, o, x) {
            let gp = violation(p)?;
            if ok(gp) {
                debug!("guard snapped {xi} onto the intersection curve");
                return Ok(p);
            }
            g = gp;
        }
    }
    warn!("containment guard conflict at {xi}: gamma_w = {}, gamma_o = {}", g.0, g.1);
    Err(Error::GuardConflict {
        gamma_w: g.0,
        gamma_o: g.1,
    })
}

/// Checks the start-point preconditions.
pub fn check_start(field: &ModulatedDs, start: Vec3) -> Result<()> {
    let (gw, go) = field.gammas(start).map_err(|e| Error::InvalidStart(e.to_string()))?;
    if field.flow.method.constrains_workspace() && gw > 1.0 {
        return Err(Error::InvalidStart(format!("outside workspace (gamma_w = {gw})")));
    }
    if let Some(g) = go.filter(|_| field.flow.method.constrains_obstacle()) {
        if g < 1.0 {
            return Err(Error::InvalidStart(format!("inside obstacle (gamma_o = {g})")));
        }
    }
    Ok(())
}

/// Integrates from `start` until the target, the step budget, or an error.
pub fn simulate(field: &ModulatedDs, start: Vec3, config: &IntegratorConfig) -> Result<Trajectory> {
    config.validate()?;
    check_start(field, start)?;
    let target = field.ds.target();
    let method = field.flow.method;
    let guard_ws = method.constrains_workspace().then_some(&field.workspace);
    let guard_ob = field.obstacle.as_ref().filter(|_| method.constrains_obstacle());

    let mut samples = Vec::new();
    let mut stats = TrajectoryStats {
        min_gamma_o: None,
        max_gamma_w: f64::NEG_INFINITY,
        steps: 0,
        mode_transitions: 0,
    };
    let mut last_mode: Option<ModeState> = None;
    let mut xi = start;

    let outcome = loop {
        let t = stats.steps as f64 * config.dt;
        let eval = match field.eval(xi) {
            Ok(e) => e,
            Err(e) => {
                // Still account for the point we stopped at.
                if let Ok((gw, go)) = field.gammas(xi) {
                    stats.max_gamma_w = stats.max_gamma_w.max(gw);
                    if let Some(g) = go {
                        stats.min_gamma_o = Some(stats.min_gamma_o.map_or(g, |m: f64| m.min(g)));
                    }
                }
                break error_outcome(&e);
            }
        };
        stats.max_gamma_w = stats.max_gamma_w.max(eval.gamma_w);
        if let Some(g) = eval.gamma_o {
            stats.min_gamma_o = Some(stats.min_gamma_o.map_or(g, |m| m.min(g)));
        }
        if last_mode.is_some_and(|m| m != eval.mode) {
            stats.mode_transitions += 1;
        }
        last_mode = Some(eval.mode);

        let sample = TrajectorySample {
            t,
            xi,
            v: eval.velocity,
            mode: eval.mode,
            gamma_o: eval.gamma_o,
            gamma_w: eval.gamma_w,
        };
        let reached = xi.distance(target) <= config.goal_tol;
        let exhausted = stats.steps >= config.max_steps;
        if reached || exhausted || stats.steps % config.record_stride == 0 {
            samples.push(sample);
        }
        if reached {
            break Outcome::ReachedTarget;
        }
        if exhausted {
            break Outcome::MaxSteps;
        }

        let mut next = step(xi, eval.velocity, config.dt);
        if config.guard {
            next = match guard_point(guard_ws, guard_ob, next) {
                Ok(p) => p,
                Err(e) => break error_outcome(&e),
            };
        }
        xi = next;
        stats.steps += 1;
    };

    Ok(Trajectory {
        samples,
        outcome,
        stats,
    })
}

fn error_outcome(e: &Error) -> Outcome {
    Outcome::Error {
        code: e.code().to_string(),
        message: e.to_string(),
    }
}

/// Rectilinear sampling grid; an axis with one point sits at `min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub min: Vec3,
    pub max: Vec3,
    pub counts: [usize; 3],
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::validation("sweep.min/max", "must be finite"));
        }
        if self.counts.contains(&0) {
            return Err(Error::validation("sweep.counts", "every count must be ≥ 1"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        let (lo, hi, n) = (self.min[axis], self.max[axis], self.counts[axis]);
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    /// Grid points with x varying fastest.
    pub fn points(&self) -> impl Iterator<Item = Vec3> + '_ {
        let [nx, ny, nz] = self.counts;
        (0..nz).flat_map(move |k| {
            (0..ny).flat_map(move |j| {
                (0..nx).map(move |i| Vec3::new(self.coord(0, i), self.coord(1, j), self.coord(2, k)))
            })
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    pub xi: Vec3,
    pub v: Vec3,
    /// `None` marks a point outside the valid region (or one that failed to evaluate).
    pub mode: Option<ModeState>,
}

pub fn sweep_field(field: &ModulatedDs, grid: &GridSpec) -> Result<Vec<FieldSample>> {
    grid.validate()?;
    Ok(grid
        .points()
        .map(|xi| {
            let valid = field.in_domain(xi).unwrap_or(false);
            match valid.then(|| field.velocity(xi)) {
                Some(Ok((v, mode))) => FieldSample {
                    xi,
                    v,
                    mode: Some(mode),
                },
                _ => FieldSample {
                    xi,
                    v: Vec3::ZERO,
                    mode: None,
                },
            }
        })
        .collect())
}
