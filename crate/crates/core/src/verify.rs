//! Seeded numerical checks of the geometric guarantees.
//!
//! Every check owns an independent ChaCha stream derived from the seed, so
//! results do not depend on which checks run or in which order.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::flow::{FlowParams, ModulatedDs, OriginalDs};
use crate::geometry::{self, Superquadric};
use crate::integrator::{self, IntegratorConfig};
use crate::linalg::{Mat3, Vec3};
use crate::modulation::{self, ModulationParams};
use crate::scenario_io::Scenario;

/// Deliberate corruption used to confirm the checks can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mutation {
    #[default]
    None,
    /// Workspace normal eigenvalue `1 + Γ_w` instead of `1 − Γ_w`.
    FlipLambdaSign,
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Mutation::None),
            "flip_lambda_sign" => Ok(Mutation::FlipLambdaSign),
            other => Err(format!("unknown mutation `{other}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub mutation: Mutation,
    pub containment_scenarios: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            mutation: Mutation::None,
            containment_scenarios: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed residual, in the check's own normalization.
    pub worst: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub note: String,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<22} worst={:.3e} tol={:.1e} n={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.samples
        )?;
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        Ok(())
    }
}

fn report(name: &'static str, worst: f64, tolerance: f64, samples: usize, note: String) -> CheckReport {
    CheckReport {
        name,
        passed: worst <= tolerance && note.is_empty(),
        worst,
        tolerance,
        samples,
        note,
    }
}

pub type CheckFn = fn(&VerifyConfig) -> CheckReport;

/// The full suite, in reporting order.
pub const CHECKS: &[(&str, CheckFn)] = &[
    ("gradient", |c| check_gradient(c.seed, 1000)),
    ("tangent_basis", |c| check_tangent_basis(c.seed, 10_000)),
    ("workspace_boundary", |c| check_workspace_boundary(c.seed, 50, 20, c.mutation)),
    ("intersection_line", |c| check_intersection_line(c.seed, 20, 50)),
    ("rank_one", |c| check_rank_one(c.seed, 20, 50)),
    ("partition_of_unity", |c| check_partition_of_unity(c.seed, 100_000)),
    ("identity_branch", |c| check_identity_branch(c.seed, 10_000)),
    ("reconstruction", |c| check_reconstruction(c.seed, 1000, c.mutation)),
    ("containment", |c| check_containment(c.seed, c.containment_scenarios, true)),
];

pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckReport> {
    CHECKS.iter().map(|(_, check)| check(cfg)).collect()
}

/// Independent generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

fn random_vec(rng: &mut impl Rng, lo: f64, hi: f64) -> Vec3 {
    Vec3::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi))
}

fn random_axes(rng: &mut impl Rng, lo: f64, hi: f64) -> [f64; 3] {
    [rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi)]
}

pub fn random_workspace(rng: &mut impl Rng) -> Superquadric {
    Superquadric::new(random_vec(rng, -0.5, 0.5), random_axes(rng, 0.6, 1.6), rng.gen_range(1..=3))
        .expect("valid random workspace")
}

/// A point with `Γ = 1` in a uniformly random direction from the center.
pub fn random_boundary_point(rng: &mut impl Rng, body: &Superquadric) -> Vec3 {
    body.radial_projection(body.center + random_unit(rng), 1.0)
        .expect("direction is nonzero")
}

/// Uniform rejection sample inside the workspace bounding box.
fn sample_where(rng: &mut impl Rng, ws: &Superquadric, accept: impl Fn(Vec3) -> bool) -> Option<Vec3> {
    let a = ws.effective_axes();
    for _ in 0..10_000 {
        let p = ws.center + Vec3::new(a[0] * rng.gen_range(-1.0..1.0), a[1] * rng.gen_range(-1.0..1.0), a[2] * rng.gen_range(-1.0..1.0));
        if accept(p) {
            return Some(p);
        }
    }
    None
}

/// Obstacle strictly inside the workspace, clear of the boundary.
pub fn random_inner_obstacle(rng: &mut impl Rng, ws: &Superquadric) -> Superquadric {
    loop {
        let center = sample_where(rng, ws, |p| geometry::gamma(ws, p).unwrap() <= 0.3).expect("interior sample");
        let ob = Superquadric::with_margin(center, random_axes(rng, 0.1, 0.3), rng.gen_range(1..=3), rng.gen_range(0.0..0.03))
            .expect("valid obstacle");
        let clear = (0..200).all(|_| geometry::gamma(ws, random_boundary_point(rng, &ob)).unwrap() < 0.97);
        if clear {
            return ob;
        }
    }
}

/// Obstacle centered near the workspace boundary, so the two surfaces cross.
pub fn random_crossing_obstacle(rng: &mut impl Rng, ws: &Superquadric) -> Superquadric {
    let b = random_boundary_point(rng, ws);
    let out = geometry::gamma_gradient(ws, b).unwrap().normalized().unwrap();
    let axes = random_axes(rng, 0.15, 0.35);
    let lo = axes.iter().cloned().fold(f64::INFINITY, f64::min);
    let center = b + out * (lo * rng.gen_range(-0.5..0.5));
    Superquadric::new(center, axes, rng.gen_range(1..=3)).expect("valid obstacle")
}

/// A point on the intersection curve of `ws` and `ob`, if one is found.
pub fn sample_intersection_point(rng: &mut impl Rng, ws: &Superquadric, ob: &Superquadric) -> Option<Vec3> {
    let reach = ob.effective_axes().iter().cloned().fold(0.0, f64::max);
    for _ in 0..100 {
        let guess = ob.center + random_unit(rng) * reach;
        let Some(p) = geometry::project_to_intersection(ws, ob, guess) else {
            continue;
        };
        let gw = geometry::gamma(ws, p).ok()?;
        let go = geometry::gamma(ob, p).ok()?;
        if (gw - 1.0).abs() <= 1e-10 && (go - 1.0).abs() <= 1e-10 && geometry::intersection_tangent(ws, ob, p).is_ok() {
            return Some(p);
        }
    }
    None
}

/// Workspace and crossing obstacle whose intersection curve is samplable.
pub fn random_intersecting_pair(rng: &mut impl Rng) -> (Superquadric, Superquadric) {
    loop {
        let ws = Superquadric::new(random_vec(rng, -0.5, 0.5), random_axes(rng, 0.7, 1.5), rng.gen_range(1..=2)).unwrap();
        let ob = random_crossing_obstacle(rng, &ws);
        if sample_intersection_point(rng, &ws, &ob).is_some() {
            return (ws, ob);
        }
    }
}

/// Stable linear field `A = k I + ω [u]×` or a scaled radial field.
pub fn random_ds(rng: &mut impl Rng, target: Vec3) -> OriginalDs {
    if rng.gen_bool(0.5) {
        return OriginalDs::radial(rng.gen_range(0.5..2.0), target).unwrap();
    }
    let k = rng.gen_range(0.5..1.5);
    let w = rng.gen_range(0.0..1.5);
    let u = random_unit(rng) * w;
    let a = Mat3::from_rows([[k, -u.z, u.y], [u.z, k, -u.x], [-u.y, u.x, k]]);
    OriginalDs::linear(a, target).unwrap()
}

/// Random valid scenario with one start. `intersecting` selects whether the
/// obstacle crosses the workspace boundary.
pub fn random_scenario(rng: &mut impl Rng, intersecting: bool) -> Scenario {
    loop {
        let (ws, ob) = if intersecting {
            random_intersecting_pair(rng)
        } else {
            let ws = random_workspace(rng);
            let ob = random_inner_obstacle(rng, &ws);
            (ws, ob)
        };
        let g = |p: Vec3| (geometry::gamma(&ws, p).unwrap(), geometry::gamma(&ob, p).unwrap());
        let Some(target) = sample_where(rng, &ws, |p| {
            let (gw, go) = g(p);
            gw <= 0.5 && go >= 2.0
        }) else {
            continue;
        };
        // Half the starts sit in the outer shell where the workspace modulation is active.
        let near_boundary = rng.gen_bool(0.5);
        let Some(start) = sample_where(rng, &ws, |p| {
            let (gw, go) = g(p);
            gw <= 1.0 && go >= 1.0 && (!near_boundary || gw >= 0.8)
        }) else {
            continue;
        };
        let scenario = Scenario {
            workspace: ws,
            obstacle: Some(ob),
            ds: random_ds(rng, target),
            flow: FlowParams::default(),
            modulation: ModulationParams::default(),
            integrator: IntegratorConfig {
                max_steps: 20_000,
                ..IntegratorConfig::default()
            },
            starts: vec![start],
        };
        if scenario.validate().is_ok() {
            return scenario;
        }
    }
}

fn workspace_matrix(ws: &Superquadric, xi: Vec3, params: &ModulationParams, mutation: Mutation) -> Mat3 {
    match mutation {
        Mutation::None => modulation::workspace_modulation(ws, xi, params).unwrap(),
        Mutation::FlipLambdaSign => {
            let (g, grad) = ws.gamma_and_gradient(xi).unwrap();
            let mut eig = modulation::workspace_eigenvalues(g, 1.0, params.lambda_w);
            if g > params.lambda_w {
                eig[0] = 1.0 + g;
            }
            modulation::modulation_from_normal(-grad, eig).unwrap()
        }
    }
}

/// Relative error of the analytic gradient against central differences.
pub fn check_gradient(seed: u64, n: usize) -> CheckReport {
    let mut rng = rng_for(seed, 1);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut body = random_workspace(&mut rng);
    for i in 0..n {
        if i % 20 == 0 {
            body = Superquadric::new(random_vec(&mut rng, -1.0, 1.0), random_axes(&mut rng, 0.5, 2.0), rng.gen_range(1..=3)).unwrap();
        }
        let xi = body.center + random_unit(&mut rng) * rng.gen_range(0.1..3.0);
        let g = geometry::gamma_gradient(&body, xi).unwrap();
        let mut fd = [0.0; 3];
        for (k, slot) in fd.iter_mut().enumerate() {
            let mut d = [0.0; 3];
            d[k] = h;
            let d = Vec3::from_array(d);
            *slot = (geometry::gamma(&body, xi + d).unwrap() - geometry::gamma(&body, xi - d).unwrap()) / (2.0 * h);
        }
        worst = worst.max((Vec3::from_array(fd) - g).norm() / g.norm());
    }
    report("gradient", worst, 1e-6, n, String::new())
}

/// Orthogonality and independence of the tangent basis, including
/// normals whose first component is (nearly) zero.
pub fn check_tangent_basis(seed: u64, n: usize) -> CheckReport {
    let mut rng = rng_for(seed, 2);
    let mut worst: f64 = 0.0;
    let mut degenerate = 0;
    for i in 0..n {
        let mut v = random_unit(&mut rng);
        if i % 5 == 0 {
            v.x = rng.gen_range(-1e-12..1e-12);
            v = v * (1.0 / v.norm());
        }
        let (e1, e2) = geometry::tangent_basis(v).unwrap();
        worst = worst
            .max(e1.dot(v).abs() / (e1.norm() * v.norm()))
            .max(e2.dot(v).abs() / (e2.norm() * v.norm()));
        if e1.cross(e2).norm() <= 1e-9 {
            degenerate += 1;
        }
    }
    let note = if degenerate > 0 {
        format!("{degenerate} dependent bases")
    } else {
        String::new()
    };
    report("tangent_basis", worst, 1e-12, n, note)
}

/// `|n_wᵀ M_w f| / (‖n_w‖ ‖f‖)` at random boundary points.
pub fn check_workspace_boundary(seed: u64, workspaces: usize, per_workspace: usize, mutation: Mutation) -> CheckReport {
    let mut rng = rng_for(seed, 3);
    let params = ModulationParams::default();
    let mut worst: f64 = 0.0;
    for _ in 0..workspaces {
        let ws = random_workspace(&mut rng);
        for _ in 0..per_workspace {
            let xi = random_boundary_point(&mut rng, &ws);
            let f = random_vec(&mut rng, -1.0, 1.0);
            let nw = geometry::workspace_normal(&ws, xi).unwrap();
            let m = workspace_matrix(&ws, xi, &params, mutation);
            worst = worst.max(nw.dot(m * f).abs() / (nw.norm() * f.norm()));
        }
    }
    report("workspace_boundary", worst, 1e-9, workspaces * per_workspace, String::new())
}

/// Normal components and alignment of `M_ow f` on the intersection curve.
pub fn check_intersection_line(seed: u64, pairs: usize, per_pair: usize) -> CheckReport {
    let mut rng = rng_for(seed, 4);
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for _ in 0..pairs {
        let (ws, ob) = random_intersecting_pair(&mut rng);
        for _ in 0..per_pair {
            let Some(xi) = sample_intersection_point(&mut rng, &ws, &ob) else {
                missing += 1;
                continue;
            };
            let f = random_vec(&mut rng, -1.0, 1.0);
            let (m, e_ow) = modulation::intersection_modulation_with_tangent(&ws, &ob, xi).unwrap();
            let nw = geometry::workspace_normal(&ws, xi).unwrap();
            let no = geometry::obstacle_normal(&ob, xi).unwrap();
            let v = m * f;
            worst = worst
                .max(no.dot(v).abs() / (no.norm() * f.norm()))
                .max(nw.dot(v).abs() / (nw.norm() * f.norm()));
            if v.norm() > 1e-12 {
                worst = worst.max(v.cross(e_ow).norm() / (v.norm() * e_ow.norm()));
            }
        }
    }
    let note = if missing > 0 {
        format!("{missing} curve samples not found")
    } else {
        String::new()
    };
    report("intersection_line", worst, 1e-9, pairs * per_pair - missing, note)
}

/// Singular values of `M_ow` on the curve: `σ₂/σ₁ ≤ 1e-9`, `σ₃/σ₁ ≤ 1e-12`.
///
/// The reported residual is `max(σ₂/σ₁ / 1e-9, σ₃/σ₁ / 1e-12)`, so the
/// tolerance is 1.
pub fn check_rank_one(seed: u64, pairs: usize, per_pair: usize) -> CheckReport {
    let mut rng = rng_for(seed, 5);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for _ in 0..pairs {
        let (ws, ob) = random_intersecting_pair(&mut rng);
        for _ in 0..per_pair {
            let Some(xi) = sample_intersection_point(&mut rng, &ws, &ob) else {
                continue;
            };
            let m = modulation::intersection_modulation(&ws, &ob, xi).unwrap();
            let mut s: Vec<f64> = Matrix3::from_fn(|i, j| m.m[i][j]).singular_values().iter().cloned().collect();
            s.sort_by(|a, b| b.total_cmp(a));
            worst = worst.max((s[1] / s[0]) / 1e-9).max((s[2] / s[0]) / 1e-12);
            n += 1;
        }
    }
    report("rank_one", worst, 1.0, n, String::new())
}

/// `ω_o + ω_w = 1` and both weights in `[0, 1]`.
pub fn check_partition_of_unity(seed: u64, n: usize) -> CheckReport {
    let mut rng = rng_for(seed, 6);
    let eps = ModulationParams::default().eps_weight;
    let mut worst: f64 = 0.0;
    let mut out_of_range = 0;
    let mut count = 0;
    while count < n {
        let ws = random_workspace(&mut rng);
        let ob = if rng.gen_bool(0.5) {
            random_inner_obstacle(&mut rng, &ws)
        } else {
            random_crossing_obstacle(&mut rng, &ws)
        };
        let mut taken = 0;
        while taken < 1000 && count < n {
            let Some(xi) = sample_where(&mut rng, &ws, |p| {
                geometry::gamma(&ws, p).unwrap() <= 1.0 && geometry::gamma(&ob, p).unwrap() >= 1.0
            }) else {
                break;
            };
            taken += 1;
            let Ok((wo, ww)) = modulation::weights(&ws, &ob, xi, eps) else {
                continue;
            };
            worst = worst.max((wo + ww - 1.0).abs());
            if !(0.0..=1.0).contains(&wo) || !(0.0..=1.0).contains(&ww) {
                out_of_range += 1;
            }
            count += 1;
        }
    }
    let note = if out_of_range > 0 {
        format!("{out_of_range} weights outside [0, 1]")
    } else {
        String::new()
    };
    report("partition_of_unity", worst, 1e-12, count, note)
}

/// Below `λ_w` the workspace modulation is bit-exactly the identity, and the
/// obstacle-free field is bit-exactly the original one.
pub fn check_identity_branch(seed: u64, n: usize) -> CheckReport {
    let mut rng = rng_for(seed, 7);
    let params = ModulationParams::default();
    let mut mismatches = 0usize;
    let mut ws = random_workspace(&mut rng);
    let mut field = ModulatedDs::new(ws, None, random_ds(&mut rng, ws.center));
    for i in 0..n {
        if i % 100 == 0 {
            ws = random_workspace(&mut rng);
            field = ModulatedDs::new(ws, None, random_ds(&mut rng, ws.center));
        }
        let xi = sample_where(&mut rng, &ws, |p| geometry::gamma(&ws, p).unwrap() <= params.lambda_w).unwrap();
        let m = modulation::workspace_modulation(&ws, xi, &params).unwrap();
        let same_matrix = m.m.iter().flatten().zip(Mat3::IDENTITY.m.iter().flatten()).all(|(a, b)| a.to_bits() == b.to_bits());
        let v = field.velocity(xi).unwrap().0;
        let f = field.ds.eval(xi);
        let same_velocity = v.to_array().iter().zip(f.to_array()).all(|(a, b)| a.to_bits() == b.to_bits());
        if !(same_matrix && same_velocity) {
            mismatches += 1;
        }
    }
    report("identity_branch", mismatches as f64, 0.0, n, String::new())
}

/// `‖M E − E D‖ / (‖E‖ ‖D‖)` for workspace and obstacle modulations.
pub fn check_reconstruction(seed: u64, n: usize, mutation: Mutation) -> CheckReport {
    let mut rng = rng_for(seed, 8);
    let params = ModulationParams::default();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let ws = random_workspace(&mut rng);
        let ob = random_inner_obstacle(&mut rng, &ws);

        // Workspace shell point, where the modulation is not the identity.
        let xi = ws
            .radial_projection(ws.center + random_unit(&mut rng), rng.gen_range(params.lambda_w + 1e-3..1.0))
            .unwrap();
        let (g, grad) = ws.gamma_and_gradient(xi).unwrap();
        let mut eig = modulation::workspace_eigenvalues(g, 1.0, params.lambda_w);
        if mutation == Mutation::FlipLambdaSign {
            eig[0] = 1.0 + g;
        }
        worst = worst.max(reconstruction_residual(&workspace_matrix(&ws, xi, &params, mutation), -grad, eig));

        let xo = ob
            .radial_projection(ob.center + random_unit(&mut rng), rng.gen_range(1.0..3.0))
            .unwrap();
        let omega = rng.gen_range(0.0..=1.0);
        let (g, grad) = ob.gamma_and_gradient(xo).unwrap();
        let m = modulation::obstacle_modulation(&ob, xo, omega).unwrap();
        worst = worst.max(reconstruction_residual(&m, grad, modulation::obstacle_eigenvalues(g, omega)));
    }
    report("reconstruction", worst, 1e-10, 2 * n, String::new())
}

fn reconstruction_residual(m: &Mat3, n: Vec3, eig: [f64; 3]) -> f64 {
    let (e1, e2) = geometry::tangent_basis(n).unwrap();
    let e = Mat3::from_cols(n, e1, e2);
    let d = Mat3::diag(eig);
    (*m * e - e.scale_cols(eig)).norm() / (e.norm() * d.norm())
}

/// Result of one randomized containment run.
#[derive(Clone, Debug)]
pub struct ContainmentRun {
    pub intersecting: bool,
    pub max_gamma_w: f64,
    pub min_gamma_o: f64,
    pub outcome: integrator::Outcome,
    pub steps: usize,
}

/// Simulates `count` random scenarios, alternating non-intersecting and
/// intersecting obstacles.
pub fn containment_runs(seed: u64, count: usize, guard: bool, dt: f64) -> Vec<ContainmentRun> {
    let mut rng = rng_for(seed, 9);
    (0..count)
        .map(|i| {
            let intersecting = i % 2 == 1;
            let mut s = random_scenario(&mut rng, intersecting);
            s.integrator.guard = guard;
            s.integrator.dt = dt;
            let traj = integrator::simulate(&s.field(), s.starts[0], &s.integrator).expect("validated start");
            let max_gamma_w = traj.samples.iter().map(|p| p.gamma_w).fold(f64::NEG_INFINITY, f64::max);
            let min_gamma_o = traj.samples.iter().filter_map(|p| p.gamma_o).fold(f64::INFINITY, f64::min);
            ContainmentRun {
                intersecting,
                max_gamma_w: max_gamma_w.max(traj.stats.max_gamma_w),
                min_gamma_o: min_gamma_o.min(traj.stats.min_gamma_o.unwrap_or(f64::INFINITY)),
                outcome: traj.outcome,
                steps: traj.stats.steps,
            }
        })
        .collect()
}

/// Every sample satisfies `Γ_w ≤ 1 + 1e-9` and `Γ_o ≥ 1 − 1e-9`.
pub fn check_containment(seed: u64, count: usize, guard: bool) -> CheckReport {
    let runs = containment_runs(seed, count, guard, IntegratorConfig::default().dt);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for r in &runs {
        worst = worst.max(r.max_gamma_w - 1.0).max(1.0 - r.min_gamma_o);
        if matches!(r.outcome, integrator::Outcome::Error { .. }) {
            errors += 1;
        }
    }
    let note = if errors > 0 {
        format!("{errors} runs ended in an error")
    } else {
        String::new()
    };
    report("containment", worst.max(0.0), 1e-9, runs.len(), note)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_of_order() {
        let a = check_gradient(7, 50);
        let _ = check_tangent_basis(7, 50);
        let b = check_gradient(7, 50);
        assert_eq!(a, b);
    }

    #[test]
    fn mutation_breaks_boundary_check() {
        assert!(check_workspace_boundary(3, 5, 5, Mutation::None).passed);
        assert!(!check_workspace_boundary(3, 5, 5, Mutation::FlipLambdaSign).passed);
    }

    #[test]
    fn random_scenarios_validate() {
        let mut rng = rng_for(11, 0);
        for i in 0..10 {
            let s = random_scenario(&mut rng, i % 2 == 0);
            assert!(s.validate().is_ok());
        }
    }

    #[test]
    fn small_suite_passes() {
        let cfg = VerifyConfig {
            seed: 5,
            mutation: Mutation::None,
            containment_scenarios: 4,
        };
        for r in run_all(&cfg) {
            assert!(r.passed, "{r}");
        }
    }
}
