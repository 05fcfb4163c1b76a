//! Cosmic-string spacetime: metric, tetrad, Levi-Civita connection and the
//! frame connection one-forms used by the transport operator.
//!
//! Line element: `ds² = -(dx0)² + dρ² + dz² + α²ρ² dφ²` with `x0 = c t`.
//! Writing the time slot as `c t` keeps the rest-frame tetrad at
//! `e^0_0 = 1` and the four-velocity at `U^0 = c cosh ξ` for any `c`.

use nalgebra::Matrix4;
use serde::Serialize;

use crate::error::{require, Error, Result};

/// Coordinate / frame slot of the time direction.
pub const T: usize = 0;
/// Coordinate / frame slot of the radial direction.
pub const RHO: usize = 1;
/// Coordinate / frame slot of the axial direction.
pub const Z: usize = 2;
/// Coordinate / frame slot of the azimuthal direction.
pub const PHI: usize = 3;

/// Coordinate labels in slot order, for reports.
pub const COORD_NAMES: [&str; 4] = ["t", "rho", "z", "phi"];

/// Minkowski metric `η = diag(-1, 1, 1, 1)`; its own inverse.
pub const ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

pub type Rank3 = [[[f64; 4]; 4]; 4];
pub type Rank4 = [[[[f64; 4]; 4]; 4]; 4];

pub(crate) const ZERO3: Rank3 = [[[0.0; 4]; 4]; 4];

/// Central-difference step for first derivatives of the metric and tetrad.
pub const FD_STEP: f64 = 1e-5;
/// Central-difference step for derivatives of the Christoffel symbols.
pub const CURVATURE_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StringGeometry {
    alpha: f64,
    c: f64,
}

impl StringGeometry {
    /// `alpha` must lie in `(0, 1]`; `alpha = 1` is flat spacetime.
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        require(
            alpha.is_finite() && alpha > 0.0 && alpha <= 1.0,
            "alpha",
            alpha,
            "deficit factor must lie in (0, 1]",
        )?;
        require(c.is_finite() && c > 0.0, "c", c, "speed of light must be positive")?;
        Ok(Self { alpha, c })
    }

    /// Geometry with `c = 1`.
    pub fn with_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Cone angle `2π(1 - α)` removed by the string.
    pub fn deficit_angle(&self) -> f64 {
        2.0 * std::f64::consts::PI * (1.0 - self.alpha)
    }
}

/// Event in `(x0, ρ, z, φ)`. `φ` is kept unwrapped so it can parameterize
/// paths that wind around the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub rho: f64,
    pub z: f64,
    pub phi: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, rho: f64, z: f64, phi: f64) -> Self {
        Self { t, rho, z, phi }
    }

    /// Point at radius `rho` on the `t = z = φ = 0` slice.
    pub fn at_radius(rho: f64) -> Self {
        Self::new(0.0, rho, 0.0, 0.0)
    }

    pub fn coord(&self, i: usize) -> f64 {
        match i {
            T => self.t,
            RHO => self.rho,
            Z => self.z,
            PHI => self.phi,
            _ => panic!("coordinate index {i} out of range"),
        }
    }

    pub fn with_coord(mut self, i: usize, value: f64) -> Self {
        match i {
            T => self.t = value,
            RHO => self.rho = value,
            Z => self.z = value,
            PHI => self.phi = value,
            _ => panic!("coordinate index {i} out of range"),
        }
        self
    }

    /// Azimuth reduced to `[0, 2π)`.
    pub fn phi_wrapped(&self) -> f64 {
        self.phi.rem_euclid(2.0 * std::f64::consts::PI)
    }

    pub(crate) fn check_off_axis(&self) -> Result<()> {
        if self.rho.is_finite() && self.rho > 0.0 {
            Ok(())
        } else {
            Err(Error::OnStringAxis { rho: self.rho })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g: Matrix4<f64>,
}

impl MetricTensor {
    pub fn inverse(&self) -> Matrix4<f64> {
        // diagonal for this spacetime
        Matrix4::from_diagonal(&self.g.diagonal().map(|x| 1.0 / x))
    }
}

/// Frame field. `e[(a, μ)] = e^a_μ`, `einv[(μ, a)] = e^μ_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetrad {
    pub e: Matrix4<f64>,
    pub einv: Matrix4<f64>,
}

impl Tetrad {
    /// `e^a_μ e^b_ν η_ab`.
    pub fn reconstruct_metric(&self) -> Matrix4<f64> {
        let eta = Matrix4::from_diagonal(&ETA.into());
        self.e.transpose() * eta * self.e
    }

    /// Largest deviation of `e einv` and `einv e` from the identity.
    pub fn duality_defect(&self) -> f64 {
        let id = Matrix4::<f64>::identity();
        let a = (self.e * self.einv - id).amax();
        let b = (self.einv * self.e - id).amax();
        a.max(b)
    }

    /// `e_{bμ} = η_bc e^c_μ`.
    pub fn lowered(&self, b: usize, mu: usize) -> f64 {
        ETA[b] * self.e[(b, mu)]
    }
}

/// `gamma[λ][μ][ν] = Γ^λ_{μν}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelSymbols {
    pub gamma: Rank3,
}

impl ChristoffelSymbols {
    pub fn lower_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for l in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    worst = worst.max((self.gamma[l][m][n] - self.gamma[l][n][m]).abs());
                }
            }
        }
        worst
    }
}

/// Mixed-index one-form `omega[μ][a][b] = X_μ^a_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionOneForm {
    pub omega: Rank3,
}

impl ConnectionOneForm {
    pub fn zero() -> Self {
        Self { omega: ZERO3 }
    }

    pub fn get(&self, mu: usize, a: usize, b: usize) -> f64 {
        self.omega[mu][a][b]
    }

    /// `X_μ^{ab} = X_μ^a_c η^{cb}`.
    pub fn raised(&self, mu: usize, a: usize, b: usize) -> f64 {
        self.omega[mu][a][b] * ETA[b]
    }

    /// `X_{μab} = η_ac X_μ^c_b`.
    pub fn lowered(&self, mu: usize, a: usize, b: usize) -> f64 {
        ETA[a] * self.omega[mu][a][b]
    }

    /// Largest `|X_μ^{ab} + X_μ^{ba}|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for mu in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    worst = worst.max((self.raised(mu, a, b) + self.raised(mu, b, a)).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.omega
            .iter()
            .flatten()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = *self;
        for mu in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    out.omega[mu][a][b] += other.omega[mu][a][b];
                }
            }
        }
        out
    }

    /// Entries with `|value| > tol`, in `(μ, a, b)` order.
    pub fn nonzero(&self, tol: f64) -> Vec<((usize, usize, usize), f64)> {
        let mut out = Vec::new();
        for mu in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    let v = self.omega[mu][a][b];
                    if v.abs() > tol {
                        out.push(((mu, a, b), v));
                    }
                }
            }
        }
        out
    }
}

/// Overall sign placed in front of `e^a_ν ∇_μ e^ν_b`.
///
/// `Tabulated` gives `ω_φ^3_1 = -ω_φ^1_3 = α`, the values whose sum with the
/// Fermi-Walker term yields the total connection the transport operator is
/// built on. `Literal` is `ω = -e ∇e` taken at face value, which flips both
/// components; it is kept as a mutation hook for the verify suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SpinConnectionSign {
    #[default]
    Tabulated,
    Literal,
}

impl SpinConnectionSign {
    fn factor(self) -> f64 {
        match self {
            SpinConnectionSign::Tabulated => 1.0,
            SpinConnectionSign::Literal => -1.0,
        }
    }
}

pub fn metric_at(geom: &StringGeometry, pt: &SpacetimePoint) -> Result<MetricTensor> {
    pt.check_off_axis()?;
    let a = geom.alpha;
    Ok(MetricTensor {
        g: Matrix4::from_diagonal(&[-1.0, 1.0, 1.0, a * a * pt.rho * pt.rho].into()),
    })
}

/// Static, non-rotating frame: `e^0_t = e^1_ρ = e^2_z = 1`, `e^3_φ = αρ`.
pub fn tetrad_at(geom: &StringGeometry, pt: &SpacetimePoint) -> Result<Tetrad> {
    pt.check_off_axis()?;
    let s = geom.alpha * pt.rho;
    Ok(Tetrad {
        e: Matrix4::from_diagonal(&[1.0, 1.0, 1.0, s].into()),
        einv: Matrix4::from_diagonal(&[1.0, 1.0, 1.0, 1.0 / s].into()),
    })
}

/// Analytic `∂_μ e^ν_b`, stored as `d[μ][ν][b]`.
pub fn inverse_tetrad_derivative(geom: &StringGeometry, pt: &SpacetimePoint) -> Result<Rank3> {
    pt.check_off_axis()?;
    let mut d = ZERO3;
    d[RHO][PHI][PHI] = -1.0 / (geom.alpha * pt.rho * pt.rho);
    Ok(d)
}

/// Levi-Civita connection in closed form. Nonzero: `Γ^ρ_φφ = -α²ρ`,
/// `Γ^φ_ρφ = Γ^φ_φρ = 1/ρ`.
pub fn christoffel_at(geom: &StringGeometry, pt: &SpacetimePoint) -> Result<ChristoffelSymbols> {
    pt.check_off_axis()?;
    let a = geom.alpha;
    let mut gamma = ZERO3;
    gamma[RHO][PHI][PHI] = -a * a * pt.rho;
    gamma[PHI][RHO][PHI] = 1.0 / pt.rho;
    gamma[PHI][PHI][RHO] = 1.0 / pt.rho;
    Ok(ChristoffelSymbols { gamma })
}

/// `ω_μ^a_b = s e^a_ν (∂_μ e^ν_b + Γ^ν_{μλ} e^λ_b)` from explicit parts, so
/// analytic and finite-difference inputs share one assembly.
pub fn spin_connection_from_parts(
    tetrad: &Tetrad,
    d_einv: &Rank3,
    christoffel: &ChristoffelSymbols,
    sign: SpinConnectionSign,
) -> ConnectionOneForm {
    let s = sign.factor();
    let mut omega = ZERO3;
    for mu in 0..4 {
        // ∇_μ e^ν_b
        let mut cov = [[0.0f64; 4]; 4];
        for nu in 0..4 {
            for b in 0..4 {
                let mut v = d_einv[mu][nu][b];
                for l in 0..4 {
                    v += christoffel.gamma[nu][mu][l] * tetrad.einv[(l, b)];
                }
                cov[nu][b] = v;
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                let mut v = 0.0;
                for nu in 0..4 {
                    v += tetrad.e[(a, nu)] * cov[nu][b];
                }
                omega[mu][a][b] = s * v;
            }
        }
    }
    ConnectionOneForm { omega }
}

/// Spin connection with the tabulated sign: only `ω_φ^3_1 = -ω_φ^1_3 = α`
/// survive.
pub fn spin_connection_at(geom: &StringGeometry, pt: &SpacetimePoint) -> Result<ConnectionOneForm> {
    spin_connection_with_sign(geom, pt, SpinConnectionSign::Tabulated)
}

pub fn spin_connection_with_sign(
    geom: &StringGeometry,
    pt: &SpacetimePoint,
    sign: SpinConnectionSign,
) -> Result<ConnectionOneForm> {
    let tetrad = tetrad_at(geom, pt)?;
    let d = inverse_tetrad_derivative(geom, pt)?;
    let gamma = christoffel_at(geom, pt)?;
    Ok(spin_connection_from_parts(&tetrad, &d, &gamma, sign))
}

/// Fermi-Walker term `τ_μ^a_b = (a^ν/c²)(e^a_ν e_{bμ} - e^a_μ e_{bν})` for a
/// coordinate acceleration `accel[ν] = a^ν`.
pub fn fw_connection_at(
    geom: &StringGeometry,
    pt: &SpacetimePoint,
    accel: &[f64; 4],
) -> Result<ConnectionOneForm> {
    let tetrad = tetrad_at(geom, pt)?;
    let c2 = geom.c * geom.c;
    let mut omega = ZERO3;
    for mu in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let mut v = 0.0;
                for nu in 0..4 {
                    v += accel[nu]
                        * (tetrad.e[(a, nu)] * tetrad.lowered(b, mu)
                            - tetrad.e[(a, mu)] * tetrad.lowered(b, nu));
                }
                omega[mu][a][b] = v / c2;
            }
        }
    }
    Ok(ConnectionOneForm { omega })
}

/// `Ω = ω + τ`.
pub fn total_connection_at(
    geom: &StringGeometry,
    pt: &SpacetimePoint,
    accel: &[f64; 4],
) -> Result<ConnectionOneForm> {
    total_connection_with_sign(geom, pt, accel, SpinConnectionSign::Tabulated)
}

pub fn total_connection_with_sign(
    geom: &StringGeometry,
    pt: &SpacetimePoint,
    accel: &[f64; 4],
    sign: SpinConnectionSign,
) -> Result<ConnectionOneForm> {
    let omega = spin_connection_with_sign(geom, pt, sign)?;
    let tau = fw_connection_at(geom, pt, accel)?;
    Ok(omega.sum(&tau))
}

/// `R^λ_{μνκ} = ∂_ν Γ^λ_{μκ} - ∂_κ Γ^λ_{μν} + Γ^λ_{νσ}Γ^σ_{μκ} - Γ^λ_{κσ}Γ^σ_{μν}`
/// with the derivatives taken by central differences of [`christoffel_at`]
/// (step [`CURVATURE_STEP`]). Stored as `r[λ][μ][ν][κ]`.
pub fn riemann_at(geom: &StringGeometry, pt: &SpacetimePoint) -> Result<Rank4> {
    riemann_with_step(geom, pt, CURVATURE_STEP)
}

pub fn riemann_with_step(geom: &StringGeometry, pt: &SpacetimePoint, h: f64) -> Result<Rank4> {
    pt.check_off_axis()?;
    require(h > 0.0 && h < pt.rho, "h", h, "step must be positive and smaller than rho")?;
    let gamma = christoffel_at(geom, pt)?.gamma;
    // dgamma[ν][λ][μ][κ] = ∂_ν Γ^λ_{μκ}
    let mut dgamma = [ZERO3; 4];
    for (nu, slot) in dgamma.iter_mut().enumerate() {
        let x = pt.coord(nu);
        let plus = christoffel_at(geom, &pt.with_coord(nu, x + h))?.gamma;
        let minus = christoffel_at(geom, &pt.with_coord(nu, x - h))?.gamma;
        for l in 0..4 {
            for m in 0..4 {
                for k in 0..4 {
                    slot[l][m][k] = (plus[l][m][k] - minus[l][m][k]) / (2.0 * h);
                }
            }
        }
    }
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for l in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                for k in 0..4 {
                    let mut v = dgamma[n][l][m][k] - dgamma[k][l][m][n];
                    for s in 0..4 {
                        v += gamma[l][n][s] * gamma[s][m][k] - gamma[l][k][s] * gamma[s][m][n];
                    }
                    r[l][m][n][k] = v;
                }
            }
        }
    }
    Ok(r)
}

pub fn max_abs4(r: &Rank4) -> f64 {
    r.iter()
        .flatten()
        .flatten()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(rho: f64) -> SpacetimePoint {
        SpacetimePoint::at_radius(rho)
    }

    #[test]
    fn geometry_rejects_bad_alpha_and_c() {
        assert!(StringGeometry::with_alpha(0.0).is_err());
        assert!(StringGeometry::with_alpha(1.2).is_err());
        assert!(StringGeometry::with_alpha(-0.5).is_err());
        assert!(StringGeometry::new(0.5, 0.0).is_err());
        assert!(StringGeometry::with_alpha(1.0).is_ok());
    }

    #[test]
    fn metric_components() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let m = metric_at(&g, &pt(2.0)).unwrap();
        assert_eq!(m.g[(PHI, PHI)], 1.0);
        assert_eq!(m.g[(T, T)], -1.0);
        assert_eq!(m.g[(RHO, RHO)], 1.0);
        assert_eq!(m.g[(Z, Z)], 1.0);

        let flat = StringGeometry::with_alpha(1.0).unwrap();
        let m = metric_at(&flat, &pt(3.0)).unwrap();
        assert_eq!(m.g[(PHI, PHI)], 9.0);
    }

    #[test]
    fn axis_is_rejected() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let err = metric_at(&g, &pt(0.0)).unwrap_err();
        assert!(err.to_string().contains("on string axis"));
        assert!(tetrad_at(&g, &pt(-1.0)).is_err());
        assert!(christoffel_at(&g, &pt(0.0)).is_err());
        assert!(spin_connection_at(&g, &pt(0.0)).is_err());
        assert!(riemann_at(&g, &pt(0.0)).is_err());
    }

    #[test]
    fn tetrad_entries() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let e = tetrad_at(&g, &pt(2.0)).unwrap();
        assert_eq!(e.e[(PHI, PHI)], 1.0);
        assert_eq!(e.e[(T, T)], 1.0);
        // inverse by numerical inversion
        let inv = e.e.try_inverse().unwrap();
        assert!((inv[(PHI, PHI)] - 1.0).abs() < 1e-15);
        assert!((e.einv - inv).amax() < 1e-15);
    }

    #[test]
    fn christoffel_values_and_static_time() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let c = christoffel_at(&g, &pt(2.0)).unwrap();
        assert_eq!(c.gamma[RHO][PHI][PHI], -0.5);
        assert_eq!(c.gamma[PHI][RHO][PHI], 0.5);
        assert!(c.gamma[T].iter().flatten().all(|&x| x == 0.0));
        assert_eq!(c.lower_asymmetry(), 0.0);
    }

    #[test]
    fn spin_connection_tabulated_values() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let w = spin_connection_at(&g, &pt(2.0)).unwrap();
        assert!((w.get(PHI, 3, 1) - 0.5).abs() < 1e-15);
        assert!((w.get(PHI, 1, 3) + 0.5).abs() < 1e-15);
        assert_eq!(w.nonzero(1e-12).len(), 2);

        let flat = StringGeometry::with_alpha(1.0).unwrap();
        let w = spin_connection_at(&flat, &pt(0.7)).unwrap();
        assert!((w.get(PHI, 1, 3).abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn literal_sign_flips_spin_connection() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let lit = spin_connection_with_sign(&g, &pt(2.0), SpinConnectionSign::Literal).unwrap();
        assert!((lit.get(PHI, 1, 3) - 0.5).abs() < 1e-15);
        assert!((lit.get(PHI, 3, 1) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn fw_term_for_radial_acceleration() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let acc = [0.0, -0.28125, 0.0, 0.0];
        let tau = fw_connection_at(&g, &pt(2.0), &acc).unwrap();
        assert!((tau.get(PHI, 1, 3) + 0.28125).abs() < 1e-15);
        assert!((tau.get(PHI, 3, 1) - 0.28125).abs() < 1e-15);
        assert!((tau.get(T, 0, 1) - 0.28125).abs() < 1e-15);
        assert!((tau.get(T, 1, 0) - 0.28125).abs() < 1e-15);
        assert!((tau.get(Z, 1, 2) + 0.28125).abs() < 1e-15);
        assert!((tau.get(Z, 2, 1) - 0.28125).abs() < 1e-15);
        assert_eq!(tau.nonzero(1e-12).len(), 6);
        assert!(tau.antisymmetry_defect() < 1e-15);

        let none = fw_connection_at(&g, &pt(2.0), &[0.0; 4]).unwrap();
        assert_eq!(none.max_abs(), 0.0);
    }

    #[test]
    fn fw_term_scales_with_inverse_c_squared() {
        // a^ρ/c² is what enters; doubling c with a^ρ scaled by 4 leaves τ unchanged
        let g1 = StringGeometry::new(0.5, 1.0).unwrap();
        let g2 = StringGeometry::new(0.5, 2.0).unwrap();
        let t1 = fw_connection_at(&g1, &pt(2.0), &[0.0, -0.28125, 0.0, 0.0]).unwrap();
        let t2 = fw_connection_at(&g2, &pt(2.0), &[0.0, -1.125, 0.0, 0.0]).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn total_connection_at_rest() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let o = total_connection_at(&g, &pt(2.0), &[0.0; 4]).unwrap();
        assert!((o.get(PHI, 1, 3) + 0.5).abs() < 1e-15);
        assert_eq!(o.get(T, 0, 1), 0.0);
        assert_eq!(o.get(Z, 1, 2), 0.0);
    }

    #[test]
    fn flat_space_has_no_curvature() {
        let g = StringGeometry::with_alpha(1.0).unwrap();
        let r = riemann_at(&g, &pt(1.0)).unwrap();
        assert!(max_abs4(&r) < 1e-6);
    }

    #[test]
    fn point_wrapping() {
        let p = SpacetimePoint::new(0.0, 1.0, 0.0, -0.5);
        assert!((p.phi_wrapped() - (2.0 * std::f64::consts::PI - 0.5)).abs() < 1e-15);
        assert_eq!(p.with_coord(PHI, 3.0).coord(PHI), 3.0);
    }
}
