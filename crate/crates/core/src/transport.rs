//! Fermi-Walker transport of spinors along the circular orbit.
//!
//! The operator is the path-ordered exponential
//! `Ξ = P exp(-(i/2) ∫ Ω_{μab} Σ^{ab} U^μ dτ)` with the contraction running
//! over independent pairs `a < b` (equivalently `-(i/4)` over the full double
//! sum). With that normalization and `Σ^{ab} = (i/2)[γ^a, γ^b]` the transport
//! acts with half-angles on spinors.
//!
//! For the stationary orbit the integrand is constant and the product
//! collapses to `Ξ = exp(Γ/2)`, `Γ = η₁σ¹ + η₂(iσ²)`, which
//! [`transport_closed_form`] evaluates without a matrix exponential.
//!
//! Sign dictionary between the two representations (checked in tests):
//! the spin-½ family below reproduces `Γ/2` exactly; in the chiral Dirac basis
//! of [`gamma_matrices`] the upper (left-handed) block of the transport equals
//! `Ξᵀ` and the lower block equals `Ξ⁻¹`. No Dirac block can equal `Ξ` itself:
//! the spin-½ family closes with structure constants of the opposite sign to
//! any Clifford-built family.

use nalgebra::{Matrix2, Matrix4, SMatrix, Vector2};
use serde::Serialize;

use crate::error::{require, Error, Result};
use crate::geometry::{
    total_connection_with_sign, SpinConnectionSign, ETA, PHI, T,
};
use crate::kinematics::{four_velocity, proper_acceleration, CircularWorldline, Direction};
use crate::C64;

pub type M2 = Matrix2<C64>;
pub type M4 = Matrix4<C64>;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Pauli matrices `σ¹, σ², σ³`.
pub fn pauli() -> [M2; 3] {
    [
        M2::new(ZERO, ONE, ONE, ZERO),
        M2::new(ZERO, -I, I, ZERO),
        M2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

/// 2×2 operator on a single spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinHalfOperator(pub M2);

/// 4×4 operator on a Dirac spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracOperator(pub M4);

impl SpinHalfOperator {
    pub fn identity() -> Self {
        Self(M2::identity())
    }

    pub fn matrix(&self) -> &M2 {
        &self.0
    }

    pub fn det(&self) -> C64 {
        self.0.determinant()
    }

    /// `‖Ξ†Ξ - I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        max_abs(&(self.0.adjoint() * self.0 - M2::identity()))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.0.try_inverse().map(Self)
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn compose(&self, first: &Self) -> Self {
        Self(self.0 * first.0)
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        max_abs(&(self.0 - other.0))
    }
}

impl DiracOperator {
    pub fn identity() -> Self {
        Self(M4::identity())
    }

    pub fn det(&self) -> C64 {
        self.0.determinant()
    }
}

/// Matrix exponential for the two operator sizes used here.
pub trait MatrixExp: Sized {
    fn expm(&self) -> Self;
}

impl MatrixExp for M2 {
    fn expm(&self) -> Self {
        self.exp()
    }
}

impl MatrixExp for M4 {
    fn expm(&self) -> Self {
        self.exp()
    }
}

pub fn max_abs<const R: usize, const K: usize>(m: &SMatrix<C64, R, K>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Representation {
    SpinHalf,
    Dirac,
}

/// Antisymmetric family `Σ^{ab}` (upper frame indices).
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzGenerators<const D: usize> {
    sigma: [[SMatrix<C64, D, D>; 4]; 4],
}

impl<const D: usize> LorentzGenerators<D> {
    pub fn get(&self, a: usize, b: usize) -> &SMatrix<C64, D, D> {
        &self.sigma[a][b]
    }

    /// `-(i/2) Σ_{a<b} coeff[a][b] Σ^{ab}` for lower-index coefficients.
    pub fn contract(&self, coeff: &[[f64; 4]; 4]) -> SMatrix<C64, D, D> {
        let mut out = SMatrix::<C64, D, D>::zeros();
        for a in 0..4 {
            for b in (a + 1)..4 {
                if coeff[a][b] != 0.0 {
                    out += self.sigma[a][b] * re(coeff[a][b]);
                }
            }
        }
        out * (-0.5 * I)
    }

    /// Largest `‖Σ^{ab} + Σ^{ba}‖`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                worst = worst.max(max_abs(&(self.sigma[a][b] + self.sigma[b][a])));
            }
        }
        worst
    }

    /// Largest residual of
    /// `[Σ^{ab}, Σ^{cd}] = 2iκ(η^{ad}Σ^{bc} + η^{bc}Σ^{ad} - η^{ac}Σ^{bd} - η^{bd}Σ^{ac})`
    /// over all index quadruples. `kappa = ±1` selects the structure-constant
    /// sign.
    pub fn closure_defect(&self, kappa: f64) -> f64 {
        let eta = |a: usize, b: usize| if a == b { ETA[a] } else { 0.0 };
        let s = &self.sigma;
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let lhs = s[a][b] * s[c][d] - s[c][d] * s[a][b];
                        let rhs = (s[b][c] * re(eta(a, d)) + s[a][d] * re(eta(b, c))
                            - s[b][d] * re(eta(a, c))
                            - s[a][c] * re(eta(b, d)))
                            * (2.0 * kappa * I);
                        worst = worst.max(max_abs(&(lhs - rhs)));
                    }
                }
            }
        }
        worst
    }
}

/// Chiral-basis Dirac matrices with `{γ^a, γ^b} = 2η^{ab}`:
/// `γ^0 = i[[0, 1], [1, 0]]`, `γ^k = i[[0, σ^k], [-σ^k, 0]]`.
pub fn gamma_matrices() -> [M4; 4] {
    let s = pauli();
    let block = |ul: M2, ur: M2, ll: M2, lr: M2| {
        let mut m = M4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&ul);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&ur);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&ll);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&lr);
        m
    };
    let z = M2::zeros();
    let id = M2::identity();
    [
        block(z, id, id, z) * I,
        block(z, s[0], -s[0], z) * I,
        block(z, s[1], -s[1], z) * I,
        block(z, s[2], -s[2], z) * I,
    ]
}

/// `Σ^{ab} = (i/2)[γ^a, γ^b]`. Block diagonal in the chiral basis:
/// `Σ^{0k} = diag(iσ^k, -iσ^k)`, `Σ^{jk} = -ε_{jkl} diag(σ^l, σ^l)`.
pub fn dirac_generators() -> LorentzGenerators<4> {
    let g = gamma_matrices();
    let mut sigma = [[M4::zeros(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            sigma[a][b] = (g[a] * g[b] - g[b] * g[a]) * (0.5 * I);
        }
    }
    LorentzGenerators { sigma }
}

/// Spin-½ family: boosts `Σ^{0k} = iσ^k` (anti-Hermitian), rotations
/// `Σ^{jk} = ε_{jkl} σ^l` (Hermitian). This is the normalization under which
/// the orbit transport reduces to `exp((η₁σ¹ + η₂ iσ²)/2)`.
pub fn spin_half_generators() -> LorentzGenerators<2> {
    let s = pauli();
    let mut sigma = [[M2::zeros(); 4]; 4];
    for k in 1..4 {
        sigma[0][k] = s[k - 1] * I;
        sigma[k][0] = -sigma[0][k];
    }
    // ε_{jkl} σ^l for (j, k, l) cyclic in (1, 2, 3)
    for (j, k, l) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
        sigma[j][k] = s[l - 1];
        sigma[k][j] = -s[l - 1];
    }
    LorentzGenerators { sigma }
}

/// How the particle sent toward `-Φ` is transported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum PairConvention {
    /// The orbit one-form of the co-rotating particle integrated over the
    /// signed azimuth `0 → -Φ`. Gives `η₁, η₂ → -η₁, -η₂`, i.e. the inverse
    /// of the partner operator; the closed-form final pair state is built on
    /// this assignment.
    #[default]
    MirroredPath,
    /// The physical counter-rotating orbit (`U^φ < 0`, forward in proper
    /// time). Only the rotation leg flips: `η₂ → -η₂`.
    CounterRotating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TransportOptions {
    pub pair: PairConvention,
    pub omega_sign: SpinConnectionSign,
}

/// Per-radian coefficients `A_ab = Ω_{μab} dx^μ/dφ` of the transport along
/// the orbit, lower frame indices. `dx^t/dφ = U^t/U^φ`; at `ξ = 0` the time
/// leg vanishes (`Ω_t ∝ sinh² ξ` against `dt/dφ ∝ 1/sinh ξ`) and only the
/// spin connection survives.
pub fn orbit_coefficients(
    wl: &CircularWorldline,
    phi: f64,
    opts: &TransportOptions,
) -> Result<[[f64; 4]; 4]> {
    let tangent_wl = match opts.pair {
        PairConvention::MirroredPath => wl.with_direction(Direction::Positive),
        PairConvention::CounterRotating => *wl,
    };
    let accel = proper_acceleration(wl);
    let omega = total_connection_with_sign(
        wl.geom(),
        &wl.point_at(phi),
        &[accel[0], accel[1], accel[2], accel[3]],
        opts.omega_sign,
    )?;
    let mut tangent = [0.0; 4];
    tangent[PHI] = 1.0;
    if wl.xi() > 0.0 {
        let u = four_velocity(&tangent_wl);
        tangent[T] = u[T] / u[PHI];
    }
    let mut coeff = [[0.0; 4]; 4];
    for (a, row) in coeff.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            *slot = (0..4).map(|mu| omega.lowered(mu, a, b) * tangent[mu]).sum();
        }
    }
    Ok(coeff)
}

/// Midpoint-rule ordered product `∏ exp(G(φ_k) Δφ)` over `steps` uniform
/// steps from `start` to `end`; later steps multiply from the left.
pub fn path_ordered_exp<const D: usize, F>(
    mut generator: F,
    start: f64,
    end: f64,
    steps: usize,
) -> Result<SMatrix<C64, D, D>>
where
    F: FnMut(f64) -> Result<SMatrix<C64, D, D>>,
    SMatrix<C64, D, D>: MatrixExp,
{
    if steps == 0 {
        return Err(Error::ZeroSteps);
    }
    let h = (end - start) / steps as f64;
    let mut u = SMatrix::<C64, D, D>::identity();
    if h == 0.0 {
        return Ok(u);
    }
    for k in 0..steps {
        let mid = start + (k as f64 + 0.5) * h;
        let step = (generator(mid)? * re(h)).expm();
        u = step * u;
    }
    Ok(u)
}

fn integrate<const D: usize, F>(
    gens: &LorentzGenerators<D>,
    mut profile: F,
    phi: f64,
    steps: usize,
    opts: &TransportOptions,
) -> Result<SMatrix<C64, D, D>>
where
    F: FnMut(f64) -> Result<CircularWorldline>,
    SMatrix<C64, D, D>: MatrixExp,
{
    require(phi.is_finite() && phi >= 0.0, "Phi", phi, "sweep angle must be non-negative")?;
    let dir = profile(0.0)?.direction().sign();
    path_ordered_exp(
        |p| {
            let wl = profile(p)?;
            Ok(gens.contract(&orbit_coefficients(&wl, p, opts)?))
        },
        0.0,
        dir * phi,
        steps,
    )
}

/// Path-ordered spin-½ transport over an azimuth `phi` in the worldline's
/// direction of travel.
pub fn transport_numeric_spin_half(
    wl: &CircularWorldline,
    phi: f64,
    steps: usize,
    opts: &TransportOptions,
) -> Result<SpinHalfOperator> {
    integrate(&spin_half_generators(), |_| Ok(*wl), phi, steps, opts).map(SpinHalfOperator)
}

pub fn transport_numeric_dirac(
    wl: &CircularWorldline,
    phi: f64,
    steps: usize,
    opts: &TransportOptions,
) -> Result<DiracOperator> {
    integrate(&dirac_generators(), |_| Ok(*wl), phi, steps, opts).map(DiracOperator)
}

/// Spin-½ transport along an orbit whose parameters vary with the signed
/// azimuth. `profile(φ)` returns the local worldline; its direction at
/// `φ = 0` fixes the orientation. The stationary orbit has a constant
/// integrand, so this is the mode that exercises genuine path ordering.
pub fn transport_numeric_varying<F>(
    profile: F,
    phi: f64,
    steps: usize,
    opts: &TransportOptions,
) -> Result<SpinHalfOperator>
where
    F: FnMut(f64) -> Result<CircularWorldline>,
{
    integrate(&spin_half_generators(), profile, phi, steps, opts).map(SpinHalfOperator)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransportOperator {
    SpinHalf(SpinHalfOperator),
    Dirac(DiracOperator),
}

pub fn transport_numeric(
    wl: &CircularWorldline,
    phi: f64,
    steps: usize,
    representation: Representation,
    opts: &TransportOptions,
) -> Result<TransportOperator> {
    Ok(match representation {
        Representation::SpinHalf => {
            TransportOperator::SpinHalf(transport_numeric_spin_half(wl, phi, steps, opts)?)
        }
        Representation::Dirac => {
            TransportOperator::Dirac(transport_numeric_dirac(wl, phi, steps, opts)?)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportParams {
    pub eta1: f64,
    pub eta2: f64,
    /// `sqrt(η₁² - η₂²)`, purely imaginary on the orbit.
    #[serde(skip)]
    pub gamma: C64,
    /// Wigner angle `|γ|`.
    pub theta: f64,
}

impl TransportParams {
    pub fn from_etas(eta1: f64, eta2: f64) -> Self {
        let g2 = eta1 * eta1 - eta2 * eta2;
        let gamma = if g2 >= 0.0 {
            re(g2.sqrt())
        } else {
            C64::new(0.0, (-g2).sqrt())
        };
        Self {
            eta1,
            eta2,
            gamma,
            theta: gamma.norm(),
        }
    }

    /// `η₁² - η₂²`.
    pub fn gamma_squared(&self) -> f64 {
        self.eta1 * self.eta1 - self.eta2 * self.eta2
    }

    /// `Γ = [[0, η₁+η₂], [η₁-η₂, 0]]`.
    pub fn generator(&self) -> M2 {
        M2::new(ZERO, re(self.eta1 + self.eta2), re(self.eta1 - self.eta2), ZERO)
    }
}

/// `η₁ = -αΦ sinh ξ cosh ξ`, `η₂ = -αΦ cosh² ξ` for the co-rotating particle;
/// the partner's signs follow the default [`PairConvention`].
pub fn transport_params(wl: &CircularWorldline, phi: f64) -> TransportParams {
    transport_params_with(wl, phi, PairConvention::default())
}

pub fn transport_params_with(
    wl: &CircularWorldline,
    phi: f64,
    pair: PairConvention,
) -> TransportParams {
    let (s, c) = (wl.xi().sinh(), wl.xi().cosh());
    let scale = wl.geom().alpha() * phi;
    let mut eta1 = -scale * s * c;
    let mut eta2 = -scale * c * c;
    if wl.direction() == Direction::Negative {
        eta2 = -eta2;
        if pair == PairConvention::MirroredPath {
            eta1 = -eta1;
        }
    }
    TransportParams::from_etas(eta1, eta2)
}

/// `(cosh(γ/2), sinh(γ/2)/γ)` as functions of `γ²`, real on both branches.
fn half_angle_factors(g2: f64) -> (f64, f64) {
    // series below |γ| = 1e-6
    if g2.abs() < 1e-12 {
        (1.0 + g2 / 8.0 + g2 * g2 / 384.0, 0.5 + g2 / 48.0 + g2 * g2 / 3840.0)
    } else if g2 < 0.0 {
        let t = (-g2).sqrt();
        ((0.5 * t).cos(), (0.5 * t).sin() / t)
    } else {
        let g = g2.sqrt();
        ((0.5 * g).cosh(), (0.5 * g).sinh() / g)
    }
}

/// `Ξ = cosh(γ/2) I + (sinh(γ/2)/γ) Γ`.
pub fn transport_closed_form(params: &TransportParams) -> SpinHalfOperator {
    let (ch, sh) = half_angle_factors(params.gamma_squared());
    SpinHalfOperator(M2::identity() * re(ch) + params.generator() * re(sh))
}

/// `θ = αΦ cosh ξ`.
pub fn wigner_angle(alpha: f64, xi: f64, phi: f64) -> f64 {
    alpha * phi * xi.cosh()
}

/// Angle of a real rotation about the 2-axis,
/// `[[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`, in `(-2π, 2π]`.
pub fn rotation_angle_about_2(op: &SpinHalfOperator) -> f64 {
    2.0 * op.0[(1, 0)].re.atan2(op.0[(0, 0)].re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chirality {
    Left,
    Right,
}

/// Tolerance on the off-diagonal blocks accepted by [`chiral_block`].
pub const BLOCK_TOLERANCE: f64 = 1e-8;

pub fn chiral_block(d: &DiracOperator, which: Chirality) -> Result<SpinHalfOperator> {
    let m = &d.0;
    let off = max_abs(&m.fixed_view::<2, 2>(0, 2).into_owned())
        .max(max_abs(&m.fixed_view::<2, 2>(2, 0).into_owned()));
    if off > BLOCK_TOLERANCE {
        return Err(Error::NotBlockDiagonal { off_block: off });
    }
    let start = match which {
        Chirality::Left => 0,
        Chirality::Right => 2,
    };
    Ok(SpinHalfOperator(m.fixed_view::<2, 2>(start, start).into_owned()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BasisSpinor {
    Up,
    Down,
}

impl BasisSpinor {
    pub fn vector(self) -> Vector2<C64> {
        match self {
            BasisSpinor::Up => Vector2::new(ONE, ZERO),
            BasisSpinor::Down => Vector2::new(ZERO, ONE),
        }
    }
}

pub fn apply_to_spinor(op: &SpinHalfOperator, s: BasisSpinor) -> Vector2<C64> {
    op.0 * s.vector()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::StringGeometry;
    use std::f64::consts::PI;

    fn wl(alpha: f64, sinh_xi: f64, dir: Direction) -> CircularWorldline {
        CircularWorldline::new(
            StringGeometry::with_alpha(alpha).unwrap(),
            2.0,
            sinh_xi.asinh(),
            dir,
        )
        .unwrap()
    }

    #[test]
    fn generators_are_antisymmetric() {
        assert_eq!(spin_half_generators().antisymmetry_defect(), 0.0);
        assert!(dirac_generators().antisymmetry_defect() < 1e-15);
    }

    #[test]
    fn clifford_relations() {
        let g = gamma_matrices();
        for a in 0..4 {
            for b in 0..4 {
                let ac = g[a] * g[b] + g[b] * g[a];
                let want = if a == b { M4::identity() * re(2.0 * ETA[a]) } else { M4::zeros() };
                assert!(max_abs(&(ac - want)) < 1e-15, "({a},{b})");
            }
        }
    }

    #[test]
    fn dirac_generators_are_block_diagonal() {
        let s = dirac_generators();
        let p = pauli();
        for a in 0..4 {
            for b in 0..4 {
                let m = s.get(a, b);
                assert!(max_abs(&m.fixed_view::<2, 2>(0, 2).into_owned()) < 1e-15);
                assert!(max_abs(&m.fixed_view::<2, 2>(2, 0).into_owned()) < 1e-15);
            }
        }
        let left01 = s.get(0, 1).fixed_view::<2, 2>(0, 0).into_owned();
        assert!(max_abs(&(left01 - p[0] * I)) < 1e-15);
        let right13 = s.get(1, 3).fixed_view::<2, 2>(2, 2).into_owned();
        assert!(max_abs(&(right13 - p[1])) < 1e-15);
    }

    #[test]
    fn structure_constant_signs() {
        let dirac = dirac_generators();
        let half = spin_half_generators();
        assert!(dirac.closure_defect(1.0) < 1e-14);
        assert!(dirac.closure_defect(-1.0) > 1.0);
        assert!(half.closure_defect(-1.0) < 1e-14);
        assert!(half.closure_defect(1.0) > 1.0);
    }

    #[test]
    fn spin_half_hermiticity() {
        let s = spin_half_generators();
        for k in 1..4 {
            assert!(max_abs(&(s.get(0, k).adjoint() + s.get(0, k))) < 1e-15);
        }
        for (j, k) in [(1, 2), (2, 3), (1, 3)] {
            assert!(max_abs(&(s.get(j, k).adjoint() - s.get(j, k))) < 1e-15);
        }
        // exp of a rotation about the 2-axis is real orthogonal
        let r = (s.get(1, 3) * re(0.7) * (-0.5 * I)).exp();
        assert!(r.iter().all(|z| z.im.abs() < 1e-15));
        assert!(max_abs(&(r.transpose() * r - M2::identity())) < 1e-14);
    }

    #[test]
    fn params_values() {
        let p = transport_params(&wl(0.5, 0.75, Direction::Positive), PI);
        assert!((p.eta1 + 1.472622).abs() < 1e-6);
        assert!((p.eta2 + 2.454369).abs() < 1e-6);
        assert!((p.theta - 0.625 * PI).abs() < 1e-14);
        assert!((p.theta - 1.963495).abs() < 1e-6);
        let g2 = p.gamma * p.gamma;
        assert!((g2.re - p.gamma_squared()).abs() < 1e-12 && g2.im.abs() < 1e-12);

        let rest = transport_params(&wl(0.5, 0.0, Direction::Positive), PI);
        assert_eq!(rest.eta1, 0.0);
        assert!((rest.eta2 + 0.5 * PI).abs() < 1e-15);
        assert!((rest.theta - 0.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn partner_params_follow_convention() {
        let w = wl(0.5, 0.75, Direction::Positive);
        let p1 = transport_params(&w, PI);
        let p2 = transport_params(&w.with_direction(Direction::Negative), PI);
        assert_eq!((p2.eta1, p2.eta2), (-p1.eta1, -p1.eta2));
        let p3 = transport_params_with(&w.with_direction(Direction::Negative), PI, PairConvention::CounterRotating);
        assert_eq!((p3.eta1, p3.eta2), (p1.eta1, -p1.eta2));
    }

    #[test]
    fn closed_form_special_cases() {
        let full = TransportParams::from_etas(0.0, -2.0 * PI);
        let xi = transport_closed_form(&full);
        assert!(xi.max_diff(&SpinHalfOperator(-M2::identity())) < 1e-15);

        let th = 1.1;
        let rot = transport_closed_form(&TransportParams::from_etas(0.0, -th));
        let (c, s) = ((th / 2.0).cos(), (th / 2.0).sin());
        let want = M2::new(re(c), re(-s), re(s), re(c));
        assert!(max_abs(&(rot.0 - want)) < 1e-15);
        assert!((rotation_angle_about_2(&rot) - th).abs() < 1e-14);

        let id = transport_closed_form(&TransportParams::from_etas(0.0, 0.0));
        assert_eq!(id, SpinHalfOperator::identity());
    }

    #[test]
    fn closed_form_near_degenerate_gamma() {
        // the series branch and the trigonometric branch agree across 1e-6
        for g in [9e-7, 1.1e-6] {
            let p = TransportParams::from_etas(0.3, (0.09f64 + g * g).sqrt());
            let xi = transport_closed_form(&p);
            let exact = (p.generator() * re(0.5)).exp();
            assert!(max_abs(&(xi.0 - exact)) < 1e-13);
        }
        // hyperbolic branch (γ real) for arbitrary parameters
        let p = TransportParams::from_etas(1.0, 0.4);
        let exact = (p.generator() * re(0.5)).exp();
        assert!(max_abs(&(transport_closed_form(&p).0 - exact)) < 1e-14);
    }

    #[test]
    fn numeric_matches_closed_form_for_both_particles() {
        let opts = TransportOptions::default();
        for dir in [Direction::Positive, Direction::Negative] {
            let w = wl(0.5, 0.75, dir);
            let num = transport_numeric_spin_half(&w, PI, 64, &opts).unwrap();
            let cf = transport_closed_form(&transport_params(&w, PI));
            assert!(num.max_diff(&cf) < 1e-12, "{dir:?}");
        }
        let counter = TransportOptions {
            pair: PairConvention::CounterRotating,
            ..Default::default()
        };
        let w = wl(0.5, 0.75, Direction::Negative);
        let num = transport_numeric_spin_half(&w, PI, 64, &counter).unwrap();
        let cf = transport_closed_form(&transport_params_with(&w, PI, PairConvention::CounterRotating));
        assert!(num.max_diff(&cf) < 1e-12);
    }

    #[test]
    fn numeric_edge_cases() {
        let opts = TransportOptions::default();
        let w = wl(0.5, 0.75, Direction::Positive);
        assert_eq!(transport_numeric_spin_half(&w, PI, 0, &opts), Err(Error::ZeroSteps));
        for n in [1, 7] {
            let id = transport_numeric_spin_half(&w, 0.0, n, &opts).unwrap();
            assert_eq!(id, SpinHalfOperator::identity());
        }
        let flat = CircularWorldline::new(StringGeometry::with_alpha(1.0).unwrap(), 1.0, 0.0, Direction::Positive).unwrap();
        let loop_op = transport_numeric_spin_half(&flat, 2.0 * PI, 4096, &opts).unwrap();
        assert!(loop_op.max_diff(&SpinHalfOperator(-M2::identity())) < 1e-10);
    }

    #[test]
    fn chiral_block_rejects_mixing() {
        let g = gamma_matrices();
        let err = chiral_block(&DiracOperator(g[0]), Chirality::Left).unwrap_err();
        assert!(matches!(err, Error::NotBlockDiagonal { .. }));
        let id = DiracOperator::identity();
        assert_eq!(chiral_block(&id, Chirality::Left).unwrap(), SpinHalfOperator::identity());
        assert_eq!(chiral_block(&id, Chirality::Right).unwrap(), SpinHalfOperator::identity());
    }

    #[test]
    fn spinor_action() {
        let th = 0.9;
        let rot = transport_closed_form(&TransportParams::from_etas(0.0, -th));
        let up = apply_to_spinor(&rot, BasisSpinor::Up);
        assert!((up[0] - re((th / 2.0).cos())).norm() < 1e-15);
        assert!((up[1] - re((th / 2.0).sin())).norm() < 1e-15);
        let down = apply_to_spinor(&SpinHalfOperator::identity(), BasisSpinor::Down);
        assert_eq!(down, BasisSpinor::Down.vector());
    }

    #[test]
    fn wigner_angle_values() {
        assert!((wigner_angle(1.0, 0.0, PI / 2.0) - PI / 2.0).abs() < 1e-15);
        assert!((wigner_angle(0.5, 0.75f64.asinh(), PI) - 0.625 * PI).abs() < 1e-14);
    }
}
