//! Original dynamical systems and the modulated velocity field.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{self, Superquadric};
use crate::linalg::{Mat3, Vec3};
use crate::modulation::{self, ModulationParams};

/// Norm below which a velocity counts as zero for the floor rule.
pub const ZERO_VELOCITY_TOL: f64 = 1e-12;

/// How far outside the valid region (in Γ units) a query is still evaluated.
///
/// Covers explicit-Euler overshoot when the containment guard is disabled.
pub const DOMAIN_SLACK: f64 = 0.1;

/// Globally asymptotically stable original field `f(ξ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OriginalDs {
    /// `f(ξ) = −A (ξ − ξ*)`, with every eigenvalue of `A` in the right half-plane.
    LinearAttractor { gain_matrix: Mat3, target: Vec3 },
    /// `f(ξ) = −k (ξ − ξ*)`.
    ScaledRadial { gain: f64, target: Vec3 },
}

impl OriginalDs {
    pub fn linear(gain_matrix: Mat3, target: Vec3) -> Result<Self> {
        let ds = Self::LinearAttractor {
            gain_matrix,
            target,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn radial(gain: f64, target: Vec3) -> Result<Self> {
        let ds = Self::ScaledRadial { gain, target };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.target().is_finite() {
            return Err(Error::validation("ds.target", "must be finite"));
        }
        match self {
            Self::ScaledRadial { gain, .. } => {
                if !(gain.is_finite() && *gain > 0.0) {
                    return Err(Error::validation("ds.gain", "must be positive"));
                }
            }
            Self::LinearAttractor { gain_matrix, .. } => {
                if !gain_matrix.is_finite() {
                    return Err(Error::validation("ds.matrix", "must be finite"));
                }
                if !is_routh_hurwitz_stable(gain_matrix) {
                    return Err(Error::validation(
                        "ds.matrix",
                        "eigenvalues must all have positive real part",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn target(&self) -> Vec3 {
        match *self {
            Self::LinearAttractor { target, .. } | Self::ScaledRadial { target, .. } => target,
        }
    }

    #[inline]
    pub fn eval(&self, xi: Vec3) -> Vec3 {
        match self {
            Self::LinearAttractor {
                gain_matrix,
                target,
            } => -(gain_matrix.mul_vec(xi - *target)),
            Self::ScaledRadial { gain, target } => (xi - *target) * -gain,
        }
    }
}

/// True iff `−A` is Hurwitz.
///
/// `det(sI + A) = s³ + tr(A) s² + m₂(A) s + det(A)`; Routh–Hurwitz for a cubic
/// `s³ + a₂s² + a₁s + a₀` requires `a₂ > 0`, `a₀ > 0` and `a₂a₁ > a₀`.
pub fn is_routh_hurwitz_stable(a: &Mat3) -> bool {
    let a2 = a.trace();
    let a1 = a.principal_minor_sum();
    let a0 = a.det();
    a2 > 0.0 && a0 > 0.0 && a2 * a1 > a0
}

pub fn eval_original(ds: &OriginalDs, xi: Vec3) -> Vec3 {
    ds.eval(xi)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SignPref {
    #[default]
    Along,
    Opposite,
}

impl SignPref {
    pub fn sign(self) -> f64 {
        match self {
            Self::Along => 1.0,
            Self::Opposite => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Self::Along => Self::Opposite,
            Self::Opposite => Self::Along,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Along => "along",
            Self::Opposite => "opposite",
        }
    }
}

impl FromStr for SignPref {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "along" => Ok(Self::Along),
            "opposite" => Ok(Self::Opposite),
            _ => Err(format!("expected `along` or `opposite`, got `{s}`")),
        }
    }
}

/// Which modulation law drives the field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    /// Workspace, combined and intersection-line modulation.
    #[default]
    Full,
    /// Obstacle modulation alone with unit weight; ignores the workspace.
    /// Kept as the baseline that can leave the workspace.
    ObstacleOnly,
    /// The unmodulated original field; ignores both surfaces.
    Original,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::ObstacleOnly => "obstacle_only",
            Self::Original => "original",
        }
    }

    pub fn constrains_workspace(self) -> bool {
        self == Self::Full
    }

    pub fn constrains_obstacle(self) -> bool {
        self != Self::Original
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(Self::Full),
            "obstacle_only" => Ok(Self::ObstacleOnly),
            "original" => Ok(Self::Original),
            _ => Err(format!("expected `full`, `obstacle_only` or `original`, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowParams {
    pub v_th: f64,
    pub sign_pref: SignPref,
    pub beta1: f64,
    pub beta2: f64,
    pub method: Method,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            v_th: 0.01,
            sign_pref: SignPref::Along,
            beta1: 0.95,
            beta2: 1.05,
            method: Method::Full,
        }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_th > 0.0 && self.v_th.is_finite()) {
            return Err(Error::validation("flow.v_th", "must be positive"));
        }
        if !(self.beta1 > 0.0 && self.beta1 <= 1.0) {
            return Err(Error::validation("flow.beta1", "must lie in (0, 1]"));
        }
        if !(self.beta2 >= 1.0 && self.beta2.is_finite()) {
            return Err(Error::validation("flow.beta2", "must be ≥ 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeState {
    Free,
    Combined,
    Intersection,
}

impl ModeState {
    pub fn token(self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::Combined => "combined",
            Self::Intersection => "intersect",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "free" => Some(Self::Free),
            "combined" => Some(Self::Combined),
            "intersect" => Some(Self::Intersection),
            _ => None,
        }
    }
}

impl fmt::Display for ModeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Band membership from Γ values alone.
pub fn mode_from_gammas(gamma_w: f64, gamma_o: Option<f64>, params: &FlowParams) -> ModeState {
    match gamma_o {
        None => ModeState::Free,
        Some(go) => {
            let in_band = params.beta1 <= gamma_w && gamma_w <= 1.0 && 1.0 <= go && go <= params.beta2;
            if in_band {
                ModeState::Intersection
            } else {
                ModeState::Combined
            }
        }
    }
}

pub fn detect_mode(
    ws: &Superquadric,
    ob: Option<&Superquadric>,
    xi: Vec3,
    params: &FlowParams,
) -> Result<ModeState> {
    let gw = geometry::gamma(ws, xi)?;
    let go = ob.map(|o| geometry::gamma(o, xi)).transpose()?;
    Ok(mode_from_gammas(gw, go, params))
}

/// Points the velocity along `+e_ow` or `−e_ow`.
pub fn apply_direction(v: Vec3, e_ow: Vec3, sign_pref: SignPref) -> Vec3 {
    let s = v.dot(e_ow);
    if s == 0.0 {
        // sign(0) = 0: the floor then moves along ±e_ow.
        return Vec3::ZERO;
    }
    v * (s.signum() * sign_pref.sign())
}

/// Raises `‖v‖` to at least `v_th`; a vanishing `v` is replaced by `±v_th ê_ow`.
pub fn apply_velocity_floor(v: Vec3, e_ow: Vec3, params: &FlowParams) -> Vec3 {
    let n = v.norm();
    if n >= params.v_th {
        v
    } else if n > ZERO_VELOCITY_TOL {
        v * (params.v_th / n)
    } else {
        e_ow * (params.v_th * params.sign_pref.sign() / e_ow.norm())
    }
}

/// One evaluation of the modulated field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub velocity: Vec3,
    /// Modulated velocity before direction selection and the floor.
    pub raw: Vec3,
    pub mode: ModeState,
    pub gamma_w: f64,
    pub gamma_o: Option<f64>,
}

/// Workspace, optional obstacle, original field and parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulatedDs {
    pub workspace: Superquadric,
    pub obstacle: Option<Superquadric>,
    pub ds: OriginalDs,
    pub flow: FlowParams,
    pub modulation: ModulationParams,
}

impl ModulatedDs {
    pub fn new(workspace: Superquadric, obstacle: Option<Superquadric>, ds: OriginalDs) -> Self {
        Self {
            workspace,
            obstacle,
            ds,
            flow: FlowParams::default(),
            modulation: ModulationParams::default(),
        }
    }

    pub fn with_flow(mut self, flow: FlowParams) -> Self {
        self.flow = flow;
        self
    }

    pub fn with_modulation(mut self, modulation: ModulationParams) -> Self {
        self.modulation = modulation;
        self
    }

    pub fn gammas(&self, xi: Vec3) -> Result<(f64, Option<f64>)> {
        let gw = geometry::gamma(&self.workspace, xi)?;
        let go = self.obstacle.as_ref().map(|o| geometry::gamma(o, xi)).transpose()?;
        Ok((gw, go))
    }

    /// Whether `xi` lies in the region the trajectory must stay in.
    pub fn in_domain(&self, xi: Vec3) -> Result<bool> {
        let (gw, go) = self.gammas(xi)?;
        let method = self.flow.method;
        let ws_ok = !method.constrains_workspace() || gw <= 1.0;
        let ob_ok = !method.constrains_obstacle() || go.is_none_or(|g| g >= 1.0);
        Ok(ws_ok && ob_ok)
    }

    pub fn velocity(&self, xi: Vec3) -> Result<(Vec3, ModeState)> {
        self.eval(xi).map(|e| (e.velocity, e.mode))
    }

    pub fn eval(&self, xi: Vec3) -> Result<Evaluation> {
        let (gw, go) = self.gammas(xi)?;
        let method = self.flow.method;
        if method.constrains_workspace() && gw > 1.0 + DOMAIN_SLACK {
            return Err(Error::OutOfDomain(format!("gamma_w = {gw} outside the workspace")));
        }
        if let Some(g) = go.filter(|_| method.constrains_obstacle()) {
            if g < 1.0 - DOMAIN_SLACK {
                return Err(Error::OutOfDomain(format!("gamma_o = {g} inside the obstacle")));
            }
        }
        let f = self.ds.eval(xi);

        if method == Method::Original {
            return Ok(Evaluation {
                velocity: f,
                raw: f,
                mode: ModeState::Free,
                gamma_w: gw,
                gamma_o: go,
            });
        }

        if self.flow.method == Method::ObstacleOnly {
            return Ok(match &self.obstacle {
                None => Evaluation {
                    velocity: f,
                    raw: f,
                    mode: ModeState::Free,
                    gamma_w: gw,
                    gamma_o: None,
                },
                Some(ob) => {
                    let v = modulation::obstacle_modulation(ob, xi, 1.0)? * f;
                    Evaluation {
                        velocity: v,
                        raw: v,
                        mode: ModeState::Combined,
                        gamma_w: gw,
                        gamma_o: go,
                    }
                }
            });
        }

        // Overshoot is classified as if it sat on the violated surface.
        let mode = mode_from_gammas(gw.min(1.0), go.map(|g| g.max(1.0)), &self.flow);
        let (raw, velocity) = match (mode, &self.obstacle) {
            (ModeState::Free, _) | (_, None) => {
                let v = modulation::workspace_modulation(&self.workspace, xi, &self.modulation)? * f;
                (v, v)
            }
            (ModeState::Combined, Some(ob)) => {
                let m = modulation::combined_modulation(&self.workspace, ob, xi, &self.modulation)?;
                let v = m * f;
                (v, v)
            }
            (ModeState::Intersection, Some(ob)) => {
                let (m, e_ow) = modulation::intersection_modulation_with_tangent(&self.workspace, ob, xi)?;
                let raw = m * f;
                let directed = apply_direction(raw, e_ow, self.flow.sign_pref);
                (raw, apply_velocity_floor(directed, e_ow, &self.flow))
            }
        };
        Ok(Evaluation {
            velocity,
            raw,
            mode,
            gamma_w: gw,
            gamma_o: go,
        })
    }
}

pub fn eval_modulated(field: &ModulatedDs, xi: Vec3) -> Result<(Vec3, ModeState)> {
    field.velocity(xi)
}
