//! Modulation matrices.
//!
//! Every square modulation is `E · D · E⁻¹` with `E = [n, e1, e2]` built from
//! a surface normal and its tangent basis. The intersection-line modulation is
//! the rank-deficient `E · D · pinv(E)` with `E = [n_o, e_ow]`.

use crate::error::{Error, Result};
use crate::geometry::{self, Superquadric};
use crate::linalg::{Mat2x3, Mat3, Mat3x2, Vec3};

/// `|det E|` threshold, relative to the cube of the largest column norm.
pub const BASIS_DET_TOL: f64 = 1e-12;

/// `|det(EᵀE)|` threshold for the 3×2 pseudo-inverse, relative to `‖c0‖²‖c1‖²`.
pub const PINV_DET_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulationParams {
    /// Γ_w at or below which the workspace modulation is the identity.
    pub lambda_w: f64,
    /// Smallest admissible weight denominator.
    pub eps_weight: f64,
}

impl Default for ModulationParams {
    fn default() -> Self {
        Self {
            lambda_w: 0.7,
            eps_weight: 1e-9,
        }
    }
}

impl ModulationParams {
    pub fn new(lambda_w: f64, eps_weight: f64) -> Result<Self> {
        let p = Self {
            lambda_w,
            eps_weight,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_w > 0.0 && self.lambda_w < 1.0) {
            return Err(Error::validation("modulation.lambda_w", "must lie in (0, 1)"));
        }
        if !(self.eps_weight > 0.0 && self.eps_weight.is_finite()) {
            return Err(Error::validation("modulation.eps_weight", "must be positive"));
        }
        Ok(())
    }
}

/// `E · diag(eig) · E⁻¹` for `E = [n, e1, e2]`.
///
/// All-ones eigenvalues return [`Mat3::IDENTITY`] without touching `n`.
///
/// With a repeated tangential eigenvalue the product collapses to
/// `λ² I + (λ¹ − λ²) n r₀` where `r₀ = (e1 × e2)ᵀ / det E` is the first row
/// of the adjugate inverse. Only that row is formed: the other two rows lose
/// accuracy like `cond(E)` when `n₁` is small but above the pivot threshold.
pub fn modulation_from_normal(n: Vec3, eig: [f64; 3]) -> Result<Mat3> {
    if eig == [1.0; 3] {
        return Ok(Mat3::IDENTITY);
    }
    let (e1, e2) = geometry::tangent_basis(n)?;
    if eig[1] != eig[2] {
        let basis = Mat3::from_cols(n, e1, e2);
        let (inv, _) = basis.inverse(BASIS_DET_TOL).ok_or(Error::SingularBasis { det: basis.det() })?;
        return Ok(basis.scale_cols(eig) * inv);
    }
    let c = e1.cross(e2);
    let det = n.dot(c);
    let scale = n.norm().max(e1.norm()).max(e2.norm());
    if !det.is_finite() || det.abs() <= BASIS_DET_TOL * scale * scale * scale {
        return Err(Error::SingularBasis { det });
    }
    let r0 = c * (1.0 / det);
    let k = eig[0] - eig[1];
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = k * n[i] * r0[j];
        }
        row[i] += eig[1];
    }
    Ok(Mat3::from_rows(m))
}

/// Diagonal of the (optionally weighted) workspace eigenvalue matrix.
///
/// `omega_w = 1` gives the unweighted form.
pub fn workspace_eigenvalues(gamma_w: f64, omega_w: f64, lambda_w: f64) -> [f64; 3] {
    if gamma_w > lambda_w {
        let s = omega_w * gamma_w;
        [1.0 - s, 1.0 + s, 1.0 + s]
    } else {
        [1.0; 3]
    }
}

pub fn obstacle_eigenvalues(gamma_o: f64, omega_o: f64) -> [f64; 3] {
    let s = omega_o / gamma_o;
    [1.0 - s, 1.0 + s, 1.0 + s]
}

/// Workspace modulation `M_w`.
pub fn workspace_modulation(ws: &Superquadric, xi: Vec3, params: &ModulationParams) -> Result<Mat3> {
    modified_workspace_modulation(ws, xi, 1.0, params)
}

/// Workspace modulation with eigenvalues `1 ∓ ω_w Γ_w`.
pub fn modified_workspace_modulation(
    ws: &Superquadric,
    xi: Vec3,
    omega_w: f64,
    params: &ModulationParams,
) -> Result<Mat3> {
    let (g, grad) = ws.gamma_and_gradient(xi)?;
    if g <= params.lambda_w {
        return Ok(Mat3::IDENTITY);
    }
    modulation_from_normal(-grad, workspace_eigenvalues(g, omega_w, params.lambda_w))
}

/// Obstacle modulation `M_o` with weight `omega_o`.
pub fn obstacle_modulation(ob: &Superquadric, xi: Vec3, omega_o: f64) -> Result<Mat3> {
    if !(0.0..=1.0).contains(&omega_o) {
        return Err(Error::InvalidInput(format!("obstacle weight {omega_o} outside [0, 1]")));
    }
    let (g, grad) = ob.gamma_and_gradient(xi)?;
    if !(g > 0.0) {
        return Err(Error::InvalidInput("obstacle modulation queried at the obstacle center".into()));
    }
    modulation_from_normal(grad, obstacle_eigenvalues(g, omega_o))
}

/// `(ω_o, ω_w)` from the two Γ values.
pub fn weights_from_gammas(gamma_w: f64, gamma_o: f64, eps_weight: f64) -> Result<(f64, f64)> {
    let to_ws = 1.0 - gamma_w;
    let to_ob = gamma_o - 1.0;
    let denominator = to_ob + to_ws;
    if !(denominator >= eps_weight) {
        return Err(Error::NearIntersectionSingularity { denominator });
    }
    Ok((to_ws / denominator, to_ob / denominator))
}

pub fn weights(ws: &Superquadric, ob: &Superquadric, xi: Vec3, eps_weight: f64) -> Result<(f64, f64)> {
    weights_from_gammas(geometry::gamma(ws, xi)?, geometry::gamma(ob, xi)?, eps_weight)
}

/// Combined modulation `M_o(ω_o) · ^wM_w(ω_w)`.
///
/// The weights see Γ_w clamped to `≤ 1` and Γ_o clamped to `≥ 1`; the
/// eigenvalues see the raw values. Inside the valid region the two agree.
/// Slightly outside it (explicit-Euler overshoot) the clamp keeps the weights
/// in `[0, 1]` while the raw eigenvalues still point back toward the region.
pub fn combined_modulation(
    ws: &Superquadric,
    ob: &Superquadric,
    xi: Vec3,
    params: &ModulationParams,
) -> Result<Mat3> {
    let (gw, grad_w) = ws.gamma_and_gradient(xi)?;
    let (go, grad_o) = ob.gamma_and_gradient(xi)?;
    let (omega_o, omega_w) = weights_from_gammas(gw.min(1.0), go.max(1.0), params.eps_weight)?;

    let m_ws = if gw <= params.lambda_w {
        Mat3::IDENTITY
    } else {
        modulation_from_normal(-grad_w, workspace_eigenvalues(gw, omega_w, params.lambda_w))?
    };
    if !(go > 0.0) {
        return Err(Error::InvalidInput("combined modulation queried at the obstacle center".into()));
    }
    let m_ob = modulation_from_normal(grad_o, obstacle_eigenvalues(go, omega_o))?;
    Ok(m_ob * m_ws)
}

/// `(EᵀE)⁻¹ Eᵀ` for a 3×2 `E`.
pub fn pinv_3x2(e: &Mat3x2) -> Result<Mat2x3> {
    let [c0, c1] = e.cols;
    let g00 = c0.dot(c0);
    let g01 = c0.dot(c1);
    let g11 = c1.dot(c1);
    let det = g00 * g11 - g01 * g01;
    let scale = g00 * g11;
    if !(scale > 0.0) || !(det.abs() >= PINV_DET_TOL * scale) {
        return Err(Error::RankDeficient);
    }
    let inv = 1.0 / det;
    Ok(Mat2x3 {
        rows: [(c0 * g11 - c1 * g01) * inv, (c1 * g00 - c0 * g01) * inv],
    })
}

/// Intersection-line modulation `M_ow` together with `e_ow`.
pub fn intersection_modulation_with_tangent(
    ws: &Superquadric,
    ob: &Superquadric,
    xi: Vec3,
) -> Result<(Mat3, Vec3)> {
    let nw = geometry::workspace_normal(ws, xi)?;
    let (go, grad_o) = ob.gamma_and_gradient(xi)?;
    if grad_o.norm() < geometry::ZERO_NORMAL_TOL {
        return Err(Error::ZeroNormal);
    }
    let no = grad_o;
    let e_ow = geometry::tangent_from_normals(nw, no)?;
    let basis = Mat3x2::from_cols(no, e_ow);
    let pinv = pinv_3x2(&basis)?;
    let d = [1.0 - 1.0 / go, 1.0 + 1.0 / go];
    // Σ_k d_k · col_k ⊗ row_k
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = d[0] * basis.cols[0][i] * pinv.rows[0][j] + d[1] * basis.cols[1][i] * pinv.rows[1][j];
        }
    }
    Ok((Mat3::from_rows(m), e_ow))
}

pub fn intersection_modulation(ws: &Superquadric, ob: &Superquadric, xi: Vec3) -> Result<Mat3> {
    intersection_modulation_with_tangent(ws, ob, xi).map(|(m, _)| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gamma, obstacle_normal, workspace_normal};

    fn unit_sphere() -> Superquadric {
        Superquadric::sphere(Vec3::ZERO, 1.0).unwrap()
    }

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn repeated_eigenvalue_form_matches_full_product() {
        let n = Vec3::new(0.6, -1.1, 0.4);
        let eig = [0.3, 1.7, 1.7];
        let (e1, e2) = geometry::tangent_basis(n).unwrap();
        let basis = Mat3::from_cols(n, e1, e2);
        let (inv, _) = basis.inverse(BASIS_DET_TOL).unwrap();
        let full = basis.scale_cols(eig) * inv;
        assert!((modulation_from_normal(n, eig).unwrap() - full).max_abs() < 1e-14);
    }

    #[test]
    fn ill_conditioned_basis_still_reconstructs() {
        // n₁ just above the pivot threshold: e1 and e2 are nearly parallel.
        let n = Vec3::new(3e-9, 0.8, -0.6);
        let eig = [0.1, 1.9, 1.9];
        let m = modulation_from_normal(n, eig).unwrap();
        let (e1, e2) = geometry::tangent_basis(n).unwrap();
        let e = Mat3::from_cols(n, e1, e2);
        let residual = (m * e - e.scale_cols(eig)).norm() / (e.norm() * Mat3::diag(eig).norm());
        assert!(residual < 1e-14, "residual {residual}");
    }

    /// The intersection point of the unit sphere and a radius-0.5 sphere at x = 1.
    fn sphere_pair() -> (Superquadric, Superquadric, Vec3) {
        let ob = Superquadric::sphere(Vec3::X, 0.5).unwrap();
        (unit_sphere(), ob, Vec3::new(0.875, (15.0_f64 / 64.0).sqrt(), 0.0))
    }

    #[test]
    fn identity_branch_is_exact() {
        let ws = unit_sphere();
        let p = ModulationParams::default();
        for xi in [Vec3::ZERO, Vec3::new(0.5, 0.3, -0.2), Vec3::new(0.0, 0.0, 0.83)] {
            assert!(gamma(&ws, xi).unwrap() <= p.lambda_w);
            assert_eq!(workspace_modulation(&ws, xi, &p).unwrap(), Mat3::IDENTITY);
        }
    }

    #[test]
    fn workspace_boundary_axis_aligned() {
        let ws = unit_sphere();
        let m = workspace_modulation(&ws, Vec3::X, &ModulationParams::default()).unwrap();
        assert!((m - Mat3::diag([0.0, 2.0, 2.0])).max_abs() < 1e-15);
        assert!(close(m * Vec3::splat(1.0), Vec3::new(0.0, 2.0, 2.0), 1e-15));
    }

    #[test]
    fn workspace_boundary_kills_normal_velocity() {
        let ws = Superquadric::new(Vec3::new(0.2, -0.1, 0.3), [1.0, 0.7, 1.3], 2).unwrap();
        let p = ModulationParams::default();
        let xi = ws.radial_projection(Vec3::new(0.9, 0.4, -0.5), 1.0).unwrap();
        let n = workspace_normal(&ws, xi).unwrap();
        let m = workspace_modulation(&ws, xi, &p).unwrap();
        for f in [Vec3::X, Vec3::new(-0.3, 2.0, 0.7), n] {
            assert!((n.dot(m * f)).abs() <= 1e-12 * n.norm() * f.norm());
        }
    }

    #[test]
    fn obstacle_boundary_eigenvalues() {
        assert_eq!(obstacle_eigenvalues(1.0, 1.0), [0.0, 2.0, 2.0]);
        assert_eq!(obstacle_eigenvalues(3.0, 0.0), [1.0; 3]);
        let far = obstacle_eigenvalues(1e12, 1.0);
        assert!(far.iter().all(|l| (l - 1.0).abs() < 1e-11));
    }

    #[test]
    fn obstacle_modulation_identity_without_weight() {
        let ob = Superquadric::sphere(Vec3::ZERO, 0.5).unwrap();
        assert_eq!(obstacle_modulation(&ob, Vec3::new(2.0, 1.0, 0.0), 0.0).unwrap(), Mat3::IDENTITY);
        assert!(obstacle_modulation(&ob, Vec3::X, 1.5).is_err());
    }

    #[test]
    fn obstacle_boundary_deflects() {
        let ob = Superquadric::sphere(Vec3::ZERO, 0.5).unwrap();
        let xi = Vec3::new(0.5, 0.0, 0.0);
        let m = obstacle_modulation(&ob, xi, 1.0).unwrap();
        let f = Vec3::new(-1.0, 0.2, 0.0);
        let v = m * f;
        let n = obstacle_normal(&ob, xi).unwrap();
        assert!(n.dot(v).abs() < 1e-12);
        // Tangential part doubled: E diagonal here, so v = (0, 0.4, 0).
        assert!(close(v, Vec3::new(0.0, 0.4, 0.0), 1e-15));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weights_from_gammas(0.5, 1.0, 1e-9).unwrap(), (1.0, 0.0));
        assert_eq!(weights_from_gammas(1.0, 2.0, 1e-9).unwrap(), (0.0, 1.0));
        assert_eq!(weights_from_gammas(0.5, 1.5, 1e-9).unwrap(), (0.5, 0.5));
        assert!(matches!(
            weights_from_gammas(1.0, 1.0, 1e-9),
            Err(Error::NearIntersectionSingularity { .. })
        ));
    }

    #[test]
    fn modified_workspace_limits() {
        let ws = unit_sphere();
        let p = ModulationParams::default();
        let xi = Vec3::new(0.6, 0.5, 0.3);
        assert_eq!(
            modified_workspace_modulation(&ws, xi, 1.0, &p).unwrap(),
            workspace_modulation(&ws, xi, &p).unwrap()
        );
        assert_eq!(modified_workspace_modulation(&ws, xi, 0.0, &p).unwrap(), Mat3::IDENTITY);
        let m = modified_workspace_modulation(&ws, Vec3::X, 1.0, &p).unwrap();
        assert!((m - Mat3::diag([0.0, 2.0, 2.0])).max_abs() < 1e-15);
    }

    #[test]
    fn combined_far_obstacle_central_point_is_identity() {
        let ws = unit_sphere();
        let ob = Superquadric::sphere(Vec3::new(0.5, 0.0, 0.0), 0.01).unwrap();
        let xi = Vec3::new(-0.5, 0.0, 0.0);
        let m = combined_modulation(&ws, &ob, xi, &ModulationParams::default()).unwrap();
        // Γ_o = 1e4: M_o within 1e-4 of I; M_w exactly I.
        assert!((m - Mat3::IDENTITY).max_abs() < 2e-4);
    }

    #[test]
    fn combined_on_obstacle_boundary_equals_obstacle_factor() {
        let ws = Superquadric::sphere(Vec3::ZERO, 2.0).unwrap();
        let ob = Superquadric::sphere(Vec3::ZERO, 0.5).unwrap();
        let xi = Vec3::new(0.0, 0.5, 0.0);
        let p = ModulationParams::default();
        let m = combined_modulation(&ws, &ob, xi, &p).unwrap();
        let m_o = obstacle_modulation(&ob, xi, 1.0).unwrap();
        assert_eq!(m, m_o);
        assert!((m - Mat3::diag([2.0, 0.0, 2.0])).max_abs() < 1e-15);
    }

    #[test]
    fn combined_on_workspace_boundary_is_tangent() {
        let ws = unit_sphere();
        let ob = Superquadric::sphere(Vec3::new(-0.5, 0.0, 0.0), 0.1).unwrap();
        let xi = Vec3::new(0.6, 0.8, 0.0);
        let m = combined_modulation(&ws, &ob, xi, &ModulationParams::default()).unwrap();
        let n = workspace_normal(&ws, xi).unwrap();
        for f in [Vec3::new(1.0, 1.0, 0.0), Vec3::new(-0.2, 0.3, 0.9)] {
            assert!(n.dot(m * f).abs() <= 1e-12 * n.norm() * f.norm());
        }
    }

    #[test]
    fn pinv_examples() {
        let e = Mat3x2::from_cols(Vec3::X, Vec3::new(0.0, 2.0, 0.0));
        let p = pinv_3x2(&e).unwrap();
        assert_eq!(p.rows[0], Vec3::X);
        assert_eq!(p.rows[1], Vec3::new(0.0, 0.5, 0.0));

        let c0 = Vec3::new(0.6, 0.8, 0.0);
        let c1 = Vec3::new(-0.8, 0.6, 0.0);
        let p = pinv_3x2(&Mat3x2::from_cols(c0, c1)).unwrap();
        assert!(close(p.rows[0], c0, 1e-15) && close(p.rows[1], c1, 1e-15));

        let e = Mat3x2::from_cols(Vec3::new(1.0, 2.0, 3.0), Vec3::new(-0.5, 0.1, 2.0));
        let pe = pinv_3x2(&e).unwrap().mul_3x2(&e);
        assert!((pe[0][0] - 1.0).abs() < 1e-14 && (pe[1][1] - 1.0).abs() < 1e-14);
        assert!(pe[0][1].abs() < 1e-14 && pe[1][0].abs() < 1e-14);

        let e = Mat3x2::from_cols(Vec3::new(1.0, 2.0, 3.0), Vec3::new(2.0, 4.0, 6.0));
        assert!(matches!(pinv_3x2(&e), Err(Error::RankDeficient)));
    }

    #[test]
    fn intersection_modulation_examples() {
        let (ws, ob, xi) = sphere_pair();
        let m = intersection_modulation(&ws, &ob, xi).unwrap();
        assert!(close(m * Vec3::Z, Vec3::new(0.0, 0.0, 2.0), 1e-14));
        assert!((m * Vec3::X).norm() < 1e-14);
        let nw = workspace_normal(&ws, xi).unwrap();
        let no = obstacle_normal(&ob, xi).unwrap();
        for f in [Vec3::new(0.3, -1.0, 0.7), Vec3::Y, Vec3::splat(1.0)] {
            let v = m * f;
            assert!(no.dot(v).abs() < 1e-13 * no.norm() * f.norm());
            assert!(nw.dot(v).abs() < 1e-13 * nw.norm() * f.norm());
        }
    }
}
