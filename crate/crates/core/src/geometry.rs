//! Superquadric bodies and the quantities derived from their Γ-function.
//!
//! A body is `Γ(ξ) = Σ ((ξ − c)_i / a_i)^{2p}`, with `Γ < 1` inside, `Γ = 1` on
//! the surface and `Γ > 1` outside. Obstacles may carry a safety margin that
//! inflates every axis; the workspace never does.

use crate::error::{Error, Result};
use crate::linalg::Vec3;

/// Gradient norms below this are treated as a vanishing normal.
pub const ZERO_NORMAL_TOL: f64 = 1e-12;

/// Relative threshold on `|n_1|` below which the tangent basis pivots.
pub const PIVOT_TOL: f64 = 1e-9;

/// Relative threshold on `|n_w × n_o|` below which the normals count as parallel.
pub const PARALLEL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Superquadric {
    pub center: Vec3,
    pub axes: [f64; 3],
    /// Half the even exponent: the surface uses `2 * power`.
    pub power: u32,
    /// Added to every axis before evaluation.
    pub margin: f64,
}

impl Superquadric {
    pub fn new(center: Vec3, axes: [f64; 3], power: u32) -> Result<Self> {
        Self::with_margin(center, axes, power, 0.0)
    }

    pub fn with_margin(center: Vec3, axes: [f64; 3], power: u32, margin: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::validation("center", "must be finite"));
        }
        if let Some(a) = axes.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::validation("axes", format!("must be positive and finite, got {a}")));
        }
        if power < 1 {
            return Err(Error::validation("power", "must be ≥ 1"));
        }
        if !(margin.is_finite() && margin >= 0.0) {
            return Err(Error::validation("margin", "must be non-negative"));
        }
        Ok(Self {
            center,
            axes,
            power,
            margin,
        })
    }

    /// Sphere of the given radius.
    pub fn sphere(center: Vec3, radius: f64) -> Result<Self> {
        Self::new(center, [radius; 3], 1)
    }

    pub fn effective_axes(&self) -> [f64; 3] {
        self.axes.map(|a| a + self.margin)
    }

    /// Exponent actually applied to each scaled coordinate.
    #[inline]
    pub fn exponent(&self) -> i32 {
        2 * self.power as i32
    }

    /// Position relative to the center.
    #[inline]
    pub fn local(&self, xi: Vec3) -> Vec3 {
        xi - self.center
    }

    /// Γ and ∇Γ in one pass.
    pub fn gamma_and_gradient(&self, xi: Vec3) -> Result<(f64, Vec3)> {
        check_finite(xi)?;
        let q = self.exponent();
        let rel = self.local(xi);
        let axes = self.effective_axes();
        let mut gamma = 0.0;
        let mut grad = [0.0; 3];
        for i in 0..3 {
            let s = rel[i] / axes[i];
            let s_pow = s.powi(q - 1);
            gamma += s_pow * s;
            grad[i] = f64::from(q) * s_pow / axes[i];
        }
        Ok((gamma, Vec3::from_array(grad)))
    }

    /// The point on the ray from the center through `xi` where `Γ = level`.
    ///
    /// Relies on the scaling law `Γ(c + sξ̃) = s^{2p} Γ(c + ξ̃)`.
    pub fn radial_projection(&self, xi: Vec3, level: f64) -> Result<Vec3> {
        let g = gamma(self, xi)?;
        if g <= 0.0 {
            return Err(Error::ZeroNormal);
        }
        let s = (level / g).powf(1.0 / f64::from(self.exponent()));
        Ok(self.center + self.local(xi) * s)
    }
}

fn check_finite(xi: Vec3) -> Result<()> {
    if xi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("non-finite position {xi}")))
    }
}

/// Γ of `body` at `xi`.
pub fn gamma(body: &Superquadric, xi: Vec3) -> Result<f64> {
    check_finite(xi)?;
    let q = body.exponent();
    let rel = body.local(xi);
    let axes = body.effective_axes();
    Ok((0..3).map(|i| (rel[i] / axes[i]).powi(q)).sum())
}

/// ∇Γ; component `i` is `2p ξ̃_i^{2p−1} / a_i^{2p}`.
pub fn gamma_gradient(body: &Superquadric, xi: Vec3) -> Result<Vec3> {
    body.gamma_and_gradient(xi).map(|(_, g)| g)
}

/// Inward-pointing workspace normal, `−∇Γ_w`.
pub fn workspace_normal(ws: &Superquadric, xi: Vec3) -> Result<Vec3> {
    let g = gamma_gradient(ws, xi)?;
    nonzero(-g)
}

/// Outward-pointing obstacle normal, `+∇Γ_o`.
pub fn obstacle_normal(ob: &Superquadric, xi: Vec3) -> Result<Vec3> {
    let g = gamma_gradient(ob, xi)?;
    nonzero(g)
}

fn nonzero(n: Vec3) -> Result<Vec3> {
    if n.norm() < ZERO_NORMAL_TOL {
        Err(Error::ZeroNormal)
    } else {
        Ok(n)
    }
}

/// Two independent vectors spanning the plane orthogonal to `n`.
///
/// Uses `e1 = (n2, −n1, 0)`, `e2 = (n3, 0, −n1)` directly. When `|n1|` is
/// negligible those collapse, so the coordinates are first cycled to put the
/// largest component of `n` in the leading slot and cycled back afterwards.
pub fn tangent_basis(n: Vec3) -> Result<(Vec3, Vec3)> {
    let norm = n.norm();
    if !(norm >= ZERO_NORMAL_TOL) {
        return Err(Error::ZeroNormal);
    }
    if n.x.abs() >= PIVOT_TOL * norm {
        return Ok(leading_basis(n.to_array()));
    }
    let a = n.to_array();
    let k = (0..3)
        .max_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
        .unwrap_or(0);
    let cycled = [a[k], a[(k + 1) % 3], a[(k + 2) % 3]];
    let (e1, e2) = leading_basis(cycled);
    Ok((uncycle(e1, k), uncycle(e2, k)))
}

fn leading_basis(m: [f64; 3]) -> (Vec3, Vec3) {
    (Vec3::new(m[1], -m[0], 0.0), Vec3::new(m[2], 0.0, -m[0]))
}

// Slot j of a cycled vector holds original coordinate (k + j) mod 3.
fn uncycle(v: Vec3, k: usize) -> Vec3 {
    let mut out = [0.0; 3];
    for j in 0..3 {
        out[(k + j) % 3] = v[j];
    }
    Vec3::from_array(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Exterior,
    Boundary,
    Interior,
}

pub fn classify_region(body: &Superquadric, xi: Vec3, tol: f64) -> Result<Region> {
    let g = gamma(body, xi)?;
    Ok(if (g - 1.0).abs() <= tol {
        Region::Boundary
    } else if g > 1.0 {
        Region::Exterior
    } else {
        Region::Interior
    })
}

/// `n_w × n_o`, the direction of the intersection line through `xi`.
pub fn intersection_tangent(ws: &Superquadric, ob: &Superquadric, xi: Vec3) -> Result<Vec3> {
    let nw = workspace_normal(ws, xi)?;
    let no = obstacle_normal(ob, xi)?;
    tangent_from_normals(nw, no)
}

pub(crate) fn tangent_from_normals(nw: Vec3, no: Vec3) -> Result<Vec3> {
    let e = nw.cross(no);
    if e.norm() < PARALLEL_TOL * nw.norm() * no.norm() {
        Err(Error::ParallelNormals)
    } else {
        Ok(e)
    }
}

/// Minimum-norm Gauss–Newton projection onto the curve `Γ_a = Γ_b = 1`.
///
/// Returns `None` if the iteration stalls or the gradients become parallel.
pub fn project_to_intersection(a: &Superquadric, b: &Superquadric, xi: Vec3) -> Option<Vec3> {
    let mut x = xi;
    for _ in 0..50 {
        let (ga, da) = a.gamma_and_gradient(x).ok()?;
        let (gb, db) = b.gamma_and_gradient(x).ok()?;
        let (ra, rb) = (1.0 - ga, 1.0 - gb);
        if ra.abs() <= 4.0 * f64::EPSILON && rb.abs() <= 4.0 * f64::EPSILON {
            return Some(x);
        }
        // Solve (J Jᵀ) y = r, step = Jᵀ y.
        let (aa, ab, bb) = (da.dot(da), da.dot(db), db.dot(db));
        let det = aa * bb - ab * ab;
        if !(det > 1e-14 * aa * bb) {
            return None;
        }
        let ya = (bb * ra - ab * rb) / det;
        let yb = (aa * rb - ab * ra) / det;
        let next = x + da * ya + db * yb;
        if next == x {
            return Some(x);
        }
        x = next;
    }
    let ga = gamma(a, x).ok()?;
    let gb = gamma(b, x).ok()?;
    ((ga - 1.0).abs() < 1e-12 && (gb - 1.0).abs() < 1e-12).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_sphere() -> Superquadric {
        Superquadric::sphere(Vec3::ZERO, 1.0).unwrap()
    }

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn gamma_examples() {
        let s = unit_sphere();
        assert_eq!(gamma(&s, Vec3::ZERO).unwrap(), 0.0);
        assert_eq!(gamma(&s, Vec3::X).unwrap(), 1.0);
        let e = Superquadric::new(Vec3::ZERO, [2.0, 1.0, 1.0], 1).unwrap();
        assert!((gamma(&e, Vec3::new(1.0, 1.0, 0.0)).unwrap() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn gamma_respects_center_and_margin() {
        let c = Vec3::new(1.0, -2.0, 0.5);
        let ob = Superquadric::with_margin(c, [0.4, 0.4, 0.4], 1, 0.1).unwrap();
        assert!((gamma(&ob, c + Vec3::new(0.5, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_input_rejected() {
        let s = unit_sphere();
        assert!(matches!(
            gamma(&s, Vec3::new(f64::NAN, 0.0, 0.0)),
            Err(Error::InvalidInput(_))
        ));
        assert!(gamma_gradient(&s, Vec3::new(0.0, f64::INFINITY, 0.0)).is_err());
    }

    #[test]
    fn construction_validates() {
        assert!(Superquadric::new(Vec3::ZERO, [1.0, 0.0, 1.0], 1).is_err());
        assert!(Superquadric::new(Vec3::ZERO, [1.0, 1.0, 1.0], 0).is_err());
        assert!(Superquadric::with_margin(Vec3::ZERO, [1.0; 3], 1, -0.1).is_err());
    }

    #[test]
    fn gradient_examples() {
        let s = unit_sphere();
        assert_eq!(gamma_gradient(&s, Vec3::X).unwrap(), Vec3::new(2.0, 0.0, 0.0));
        for p in 1..5 {
            let b = Superquadric::new(Vec3::ZERO, [1.0, 2.0, 3.0], p).unwrap();
            assert_eq!(gamma_gradient(&b, Vec3::ZERO).unwrap(), Vec3::ZERO);
        }
        let e = Superquadric::new(Vec3::ZERO, [2.0, 1.0, 1.0], 1).unwrap();
        let g = gamma_gradient(&e, Vec3::new(1.0, 1.0, 0.0)).unwrap();
        assert!(close(g, Vec3::new(0.5, 2.0, 0.0), 1e-15));
    }

    #[test]
    fn normal_signs() {
        let s = unit_sphere();
        assert_eq!(workspace_normal(&s, Vec3::X).unwrap(), Vec3::new(-2.0, 0.0, 0.0));
        assert_eq!(workspace_normal(&s, Vec3::Y).unwrap(), Vec3::new(0.0, -2.0, 0.0));
        assert_eq!(obstacle_normal(&s, Vec3::X).unwrap(), Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(obstacle_normal(&s, Vec3::Y).unwrap(), Vec3::new(0.0, 2.0, 0.0));
        let e = Superquadric::new(Vec3::ZERO, [2.0, 1.0, 1.0], 1).unwrap();
        let xi = Vec3::new(1.0, 1.0, 0.0);
        assert!(close(workspace_normal(&e, xi).unwrap(), Vec3::new(-0.5, -2.0, 0.0), 1e-15));
        assert!(close(obstacle_normal(&e, xi).unwrap(), Vec3::new(0.5, 2.0, 0.0), 1e-15));
    }

    #[test]
    fn normal_vanishes_at_center() {
        let s = unit_sphere();
        assert!(matches!(workspace_normal(&s, Vec3::ZERO), Err(Error::ZeroNormal)));
        assert!(matches!(obstacle_normal(&s, Vec3::ZERO), Err(Error::ZeroNormal)));
    }

    #[test]
    fn tangent_basis_direct_formula() {
        let (e1, e2) = tangent_basis(Vec3::X).unwrap();
        assert_eq!(e1, Vec3::new(0.0, -1.0, 0.0));
        assert_eq!(e2, Vec3::new(0.0, 0.0, -1.0));
        let (e1, e2) = tangent_basis(Vec3::new(-2.0, 0.0, 0.0)).unwrap();
        assert_eq!(e1, Vec3::new(0.0, 2.0, 0.0));
        assert_eq!(e2, Vec3::new(0.0, 0.0, 2.0));
        let n = Vec3::new(0.3, -1.2, 0.7);
        let (e1, e2) = tangent_basis(n).unwrap();
        assert_eq!(e1, Vec3::new(n.y, -n.x, 0.0));
        assert_eq!(e2, Vec3::new(n.z, 0.0, -n.x));
    }

    #[test]
    fn tangent_basis_pivots_when_leading_component_vanishes() {
        for n in [Vec3::Z, Vec3::Y, Vec3::new(0.0, 1.0, 1.0), Vec3::new(1e-13, -3.0, 0.5)] {
            let (e1, e2) = tangent_basis(n).unwrap();
            assert!(e1.dot(n).abs() <= 1e-12 * n.norm_squared());
            assert!(e2.dot(n).abs() <= 1e-12 * n.norm_squared());
            assert!(e1.cross(e2).norm() > 0.0);
        }
        // n = z: k = 2, cycled (1, 0, 0) -> (0,-1,0), (0,0,-1) mapped back.
        let (e1, e2) = tangent_basis(Vec3::Z).unwrap();
        assert_eq!(e1, Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(e2, Vec3::new(0.0, -1.0, 0.0));
        assert!(matches!(tangent_basis(Vec3::ZERO), Err(Error::ZeroNormal)));
    }

    #[test]
    fn region_classification() {
        let s = unit_sphere();
        assert_eq!(classify_region(&s, Vec3::new(2.0, 0.0, 0.0), 1e-9).unwrap(), Region::Exterior);
        assert_eq!(classify_region(&s, Vec3::X, 1e-9).unwrap(), Region::Boundary);
        assert_eq!(classify_region(&s, Vec3::new(0.5, 0.0, 0.0), 1e-9).unwrap(), Region::Interior);
    }

    #[test]
    fn intersection_tangent_canonical() {
        let e = tangent_from_normals(Vec3::X, Vec3::Y).unwrap();
        assert_eq!(e, Vec3::Z);
    }

    #[test]
    fn intersection_tangent_sphere_pair() {
        let ws = unit_sphere();
        let ob = Superquadric::sphere(Vec3::X, 0.5).unwrap();
        // Both sphere equations give x = 7/8, y² = 15/64.
        let xi = Vec3::new(0.875, (15.0_f64 / 64.0).sqrt(), 0.0);
        assert!((gamma(&ws, xi).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma(&ob, xi).unwrap() - 1.0).abs() < 1e-15);
        let e = intersection_tangent(&ws, &ob, xi).unwrap();
        // n_w = -2ξ, n_o = 8(ξ - c), so n_w × n_o = 16 ξ × c = (0, 0, -16 y).
        let expected = Vec3::new(0.0, 0.0, -16.0 * xi.y);
        assert!(close(e, expected, 1e-13), "{e}");
        assert!((e.z - -7.745_966_692_414_834).abs() < 1e-12);
        let flipped = tangent_from_normals(
            workspace_normal(&ob, xi).unwrap(),
            obstacle_normal(&ws, xi).unwrap(),
        )
        .unwrap();
        assert!(close(flipped, -e, 1e-13));
    }

    #[test]
    fn tangential_contact_is_parallel() {
        let ws = unit_sphere();
        let ob = Superquadric::sphere(Vec3::new(0.5, 0.0, 0.0), 0.5).unwrap();
        assert!(matches!(
            intersection_tangent(&ws, &ob, Vec3::X),
            Err(Error::ParallelNormals)
        ));
    }

    #[test]
    fn radial_projection_hits_level() {
        let b = Superquadric::new(Vec3::new(0.1, 0.2, 0.3), [1.0, 0.5, 0.8], 2).unwrap();
        let p = b.radial_projection(Vec3::new(1.5, -0.4, 0.9), 1.0).unwrap();
        assert!((gamma(&b, p).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_newton_reaches_intersection() {
        let ws = unit_sphere();
        let ob = Superquadric::new(Vec3::new(0.9, 0.0, 0.0), [0.3, 0.3, 0.4], 2).unwrap();
        let p = project_to_intersection(&ws, &ob, Vec3::new(0.8, 0.2, 0.1)).unwrap();
        assert!((gamma(&ws, p).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma(&ob, p).unwrap() - 1.0).abs() < 1e-14);
    }
}
