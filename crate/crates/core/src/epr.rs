//! Two-particle spin states, their evolution under the transport operators
//! and the CHSH combination.
//!
//! Amplitudes are stored in the product basis `(↑↑, ↑↓, ↓↑, ↓↓)` with the
//! particle sent toward `+Φ` as the first factor.
//!
//! The spin factor of each particle evolves non-unitarily when `ξ > 0`, so
//! evolved states are kept unnormalized. [`correlator`] divides by `⟨s|s⟩`
//! and the raw norm travels with every [`BellReport`].

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::StringGeometry;
use crate::kinematics::{CircularWorldline, Direction};
use crate::transport::{
    pauli, transport_closed_form, transport_params, wigner_angle, SpinHalfOperator, M2,
};
use crate::C64;

/// Tsirelson value `2√2`.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    pub amp: Vector4<C64>,
}

impl TwoQubitState {
    pub fn new(amp: [C64; 4]) -> Self {
        Self { amp: amp.into() }
    }

    pub fn real(amp: [f64; 4]) -> Self {
        Self::new(amp.map(re))
    }

    pub fn norm(&self) -> f64 {
        self.amp.norm()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amp.dotc(&other.amp)
    }

    pub fn scaled(&self, k: C64) -> Self {
        Self { amp: self.amp * k }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            amp: self.amp + other.amp,
        }
    }

    /// Largest amplitude difference after removing a global phase, taken
    /// from the largest-magnitude component of `other`.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let k = (0..4)
            .max_by(|&i, &j| other.amp[i].norm().total_cmp(&other.amp[j].norm()))
            .unwrap();
        let (a, b) = (self.amp[k], other.amp[k]);
        let phase = if a.norm() == 0.0 || b.norm() == 0.0 {
            re(1.0)
        } else {
            (b / a) / (b / a).norm()
        };
        (self.amp * phase - other.amp).camax()
    }
}

/// The Bell basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellStates {
    pub psi_plus: TwoQubitState,
    pub psi_minus: TwoQubitState,
    pub phi_plus: TwoQubitState,
    pub phi_minus: TwoQubitState,
}

impl BellStates {
    /// In the order `(ψ⁺, ψ⁻, φ⁺, φ⁻)`.
    pub fn ordered(&self) -> [TwoQubitState; 4] {
        [self.psi_plus, self.psi_minus, self.phi_plus, self.phi_minus]
    }
}

pub fn bell_states() -> BellStates {
    let h = FRAC_1_SQRT_2;
    BellStates {
        psi_plus: TwoQubitState::real([0.0, h, h, 0.0]),
        psi_minus: TwoQubitState::real([0.0, h, -h, 0.0]),
        phi_plus: TwoQubitState::real([h, 0.0, 0.0, h]),
        phi_minus: TwoQubitState::real([h, 0.0, 0.0, -h]),
    }
}

/// Singlet emitted at the source.
pub fn initial_state() -> TwoQubitState {
    bell_states().psi_minus
}

fn kron(a: &M2, b: &M2) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `(Ξ₊ ⊗ Ξ₋)|s⟩`.
pub fn evolve_pair(
    initial: &TwoQubitState,
    xi_plus: &SpinHalfOperator,
    xi_minus: &SpinHalfOperator,
) -> TwoQubitState {
    TwoQubitState {
        amp: kron(&xi_plus.0, &xi_minus.0) * initial.amp,
    }
}

/// Phase placed in front of the `sin θ` terms of the closed-form final state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClosedFormPhase {
    /// `+1`: what `cosh γ ψ⁻ - (η₁/γ) sinh γ φ⁻ - (η₂/γ) sinh γ φ⁺` evaluates
    /// to with `γ = iθ`. Reproduced by the transport operators.
    Derived,
    /// `e^{-iπ/2}`, the upper branch of the printed `e^{∓iπ/2}`.
    PrintedUpper,
    /// `e^{+iπ/2}`, the lower branch.
    PrintedLower,
}

impl ClosedFormPhase {
    fn factor(self) -> C64 {
        match self {
            ClosedFormPhase::Derived => re(1.0),
            ClosedFormPhase::PrintedUpper => C64::new(0.0, -1.0),
            ClosedFormPhase::PrintedLower => C64::new(0.0, 1.0),
        }
    }
}

/// `cos θ ψ⁻ + p sin θ (sinh ξ φ⁻ + cosh ξ φ⁺)` with `θ = αΦ cosh ξ`.
/// Norm² is `cos² θ + sin² θ cosh 2ξ`.
pub fn final_state_closed_form(alpha: f64, xi: f64, phi: f64, phase: ClosedFormPhase) -> TwoQubitState {
    let theta = wigner_angle(alpha, xi, phi);
    let b = bell_states();
    let tail = b
        .phi_minus
        .scaled(re(xi.sinh()))
        .add(&b.phi_plus.scaled(re(xi.cosh())));
    b.psi_minus
        .scaled(re(theta.cos()))
        .add(&tail.scaled(phase.factor() * theta.sin()))
}

/// Coefficients against `(ψ⁺, ψ⁻, φ⁺, φ⁻)`.
pub fn bell_decomposition(s: &TwoQubitState) -> [C64; 4] {
    bell_states().ordered().map(|b| b.inner(s))
}

/// ±1-valued spin observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub op: M2,
}

impl MeasurementSetting {
    /// `n̂·σ` for a real unit vector.
    pub fn along(n: [f64; 3]) -> Self {
        let s = pauli();
        Self {
            op: s[0] * re(n[0]) + s[1] * re(n[1]) + s[2] * re(n[2]),
        }
    }

    /// Largest deviation from Hermiticity and from `op² = I`.
    pub fn defect(&self) -> f64 {
        let herm = (self.op - self.op.adjoint()).camax();
        let inv = (self.op * self.op - M2::identity()).camax();
        herm.max(inv)
    }

    /// `R op R†` with `R = exp(-i β σ²/2)`: the measurement axis turned by
    /// `β` about the 2-axis.
    pub fn rotated_about_2(&self, beta: f64) -> Self {
        let (s, c) = (0.5 * beta).sin_cos();
        let r = Matrix2::new(re(c), re(-s), re(s), re(c));
        Self {
            op: r * self.op * r.adjoint(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a: MeasurementSetting,
    pub a_prime: MeasurementSetting,
    pub b: MeasurementSetting,
    pub b_prime: MeasurementSetting,
}

/// `a = (σ¹+σ³)/√2`, `a′ = (-σ¹+σ³)/√2`, `b = σ³`, `b′ = σ¹`.
pub fn chsh_settings() -> ChshSettings {
    let h = FRAC_1_SQRT_2;
    ChshSettings {
        a: MeasurementSetting::along([h, 0.0, h]),
        a_prime: MeasurementSetting::along([-h, 0.0, h]),
        b: MeasurementSetting::along([0.0, 0.0, 1.0]),
        b_prime: MeasurementSetting::along([1.0, 0.0, 0.0]),
    }
}

/// `⟨s|A⊗B|s⟩ / ⟨s|s⟩`.
pub fn correlator(s: &TwoQubitState, a: &MeasurementSetting, b: &MeasurementSetting) -> Result<f64> {
    let n2 = s.amp.norm_squared();
    if n2 == 0.0 || !n2.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let v = s.amp.dotc(&(kron(&a.op, &b.op) * s.amp));
    debug_assert!(v.im.abs() <= 1e-12 * n2.max(1.0));
    Ok(v.re / n2)
}

pub fn chsh_with(s: &TwoQubitState, set: &ChshSettings) -> Result<f64> {
    let e = |a, b| correlator(s, a, b);
    Ok((e(&set.a, &set.b)? + e(&set.a_prime, &set.b)? + e(&set.a, &set.b_prime)?
        - e(&set.a_prime, &set.b_prime)?)
    .abs())
}

/// `|⟨ab⟩ + ⟨a′b⟩ + ⟨ab′⟩ - ⟨a′b′⟩|` with the standard settings.
pub fn chsh_direct(s: &TwoQubitState) -> Result<f64> {
    chsh_with(s, &chsh_settings())
}

/// How `(η₁² + η₂²)/γ²` is read in the closed CHSH expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChshRatio {
    /// Over `|γ|² = θ²`, giving `+cosh 2ξ`. Agrees with the direct
    /// evaluation at `ξ = 0` for every `θ`.
    Modulus,
    /// Over `γ² = η₁² - η₂² = -θ²`, giving `-cosh 2ξ`.
    Printed,
}

impl ChshRatio {
    pub fn value(self, xi: f64) -> f64 {
        match self {
            ChshRatio::Modulus => (2.0 * xi).cosh(),
            ChshRatio::Printed => -(2.0 * xi).cosh(),
        }
    }
}

/// `√2 |-cos 2θ - cos² θ + r sin² θ|`, `r` from [`ChshRatio::Modulus`].
pub fn chsh_closed_form(theta: f64, xi: f64) -> f64 {
    chsh_closed_form_with(theta, xi, ChshRatio::Modulus)
}

pub fn chsh_closed_form_with(theta: f64, xi: f64, ratio: ChshRatio) -> f64 {
    let (s, c) = theta.sin_cos();
    SQRT_2 * (-(2.0 * theta).cos() - c * c + ratio.value(xi) * s * s).abs()
}

/// Sign of the axis rotation applied by each observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RestorationAssignment {
    /// Observer at `+Φ` turns by `+θ`, observer at `-Φ` by `-θ`.
    PlusMinus,
    /// Observer at `+Φ` turns by `-θ`, observer at `-Φ` by `+θ`.
    MinusPlus,
}

impl RestorationAssignment {
    pub const ALL: [RestorationAssignment; 2] =
        [RestorationAssignment::PlusMinus, RestorationAssignment::MinusPlus];

    fn signs(self) -> (f64, f64) {
        match self {
            RestorationAssignment::PlusMinus => (1.0, -1.0),
            RestorationAssignment::MinusPlus => (-1.0, 1.0),
        }
    }
}

/// Assignment that restores maximal violation for the singlet evolved by
/// the default transport; frozen by `restoration_assignment_is_frozen`.
pub const RESTORATION: RestorationAssignment = RestorationAssignment::PlusMinus;

pub fn restored_settings(theta: f64, assignment: RestorationAssignment) -> ChshSettings {
    let (s1, s2) = assignment.signs();
    let base = chsh_settings();
    ChshSettings {
        a: base.a.rotated_about_2(s1 * theta),
        a_prime: base.a_prime.rotated_about_2(s1 * theta),
        b: base.b.rotated_about_2(s2 * theta),
        b_prime: base.b_prime.rotated_about_2(s2 * theta),
    }
}

/// Picks the assignment with the larger restored CHSH value on `state`.
pub fn select_assignment(state: &TwoQubitState, theta: f64) -> Result<RestorationAssignment> {
    let mut best = (RestorationAssignment::PlusMinus, f64::NEG_INFINITY);
    for a in RestorationAssignment::ALL {
        let v = chsh_with(state, &restored_settings(theta, a))?;
        if v > best.1 {
            best = (a, v);
        }
    }
    Ok(best.0)
}

/// Transport operators for the pair: `(Ξ₊, Ξ₋)` from the closed form.
pub fn pair_operators(geom: StringGeometry, rho: f64, xi: f64, phi: f64) -> Result<(SpinHalfOperator, SpinHalfOperator)> {
    let w = CircularWorldline::new(geom, rho, xi, Direction::Positive)?;
    let plus = transport_closed_form(&transport_params(&w, phi));
    let minus = transport_closed_form(&transport_params(&w.with_direction(Direction::Negative), phi));
    Ok((plus, minus))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellReport {
    pub alpha: f64,
    pub xi: f64,
    pub phi: f64,
    pub theta: f64,
    pub norm: f64,
    pub chsh_direct: f64,
    pub chsh_closed: f64,
    pub chsh_restored: f64,
    /// `|chsh_restored - 2√2|`.
    pub restored_residual: f64,
    #[serde(skip)]
    pub bell_coefficients: [C64; 4],
}

/// Evolves the singlet over `±phi` and evaluates every CHSH quantity.
pub fn bell_report(geom: StringGeometry, rho: f64, xi: f64, phi: f64) -> Result<BellReport> {
    let (plus, minus) = pair_operators(geom, rho, xi, phi)?;
    let state = evolve_pair(&initial_state(), &plus, &minus);
    let theta = wigner_angle(geom.alpha(), xi, phi);
    let restored = chsh_with(&state, &restored_settings(theta, RESTORATION))?;
    Ok(BellReport {
        alpha: geom.alpha(),
        xi,
        phi,
        theta,
        norm: state.norm(),
        chsh_direct: chsh_direct(&state)?,
        chsh_closed: chsh_closed_form(theta, xi),
        chsh_restored: restored,
        restored_residual: (restored - TSIRELSON).abs(),
        bell_coefficients: bell_decomposition(&state),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bell_basis_orthonormal() {
        let b = bell_states().ordered();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((b[i].inner(&b[j]) - re(want)).norm() < 1e-15);
            }
        }
        let h = FRAC_1_SQRT_2;
        assert_eq!(bell_states().psi_minus, TwoQubitState::real([0.0, h, -h, 0.0]));
    }

    #[test]
    fn singlet_correlations() {
        let s = initial_state();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        let z = MeasurementSetting::along([0.0, 0.0, 1.0]);
        assert!((correlator(&s, &z, &z).unwrap() + 1.0).abs() < 1e-15);
        let n = {
            let v = [0.3f64, -0.5, 0.7];
            let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            MeasurementSetting::along([v[0] / l, v[1] / l, v[2] / l])
        };
        assert!((correlator(&s, &n, &n).unwrap() + 1.0).abs() < 1e-14);
        let x = MeasurementSetting::along([1.0, 0.0, 0.0]);
        assert!((correlator(&bell_states().phi_plus, &x, &x).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_state_is_rejected() {
        let z = TwoQubitState::real([0.0; 4]);
        let s = MeasurementSetting::along([0.0, 0.0, 1.0]);
        assert_eq!(correlator(&z, &s, &s), Err(Error::ZeroNorm));
        assert!(chsh_direct(&z).is_err());
    }

    #[test]
    fn settings_algebra() {
        let s = chsh_settings();
        for m in [s.a, s.a_prime, s.b, s.b_prime] {
            assert!(m.defect() < 1e-15);
        }
        let ac = s.a.op * s.a_prime.op + s.a_prime.op * s.a.op;
        assert!(ac.camax() < 1e-15);
        assert!((chsh_direct(&initial_state()).unwrap() - TSIRELSON).abs() < 1e-14);
    }

    #[test]
    fn product_state_respects_classical_bound() {
        let up_up = TwoQubitState::real([1.0, 0.0, 0.0, 0.0]);
        assert!(chsh_direct(&up_up).unwrap() <= 2.0 + 1e-12);
    }

    #[test]
    fn identity_evolution() {
        let id = SpinHalfOperator::identity();
        assert_eq!(evolve_pair(&initial_state(), &id, &id), initial_state());
    }

    #[test]
    fn closed_form_state_cases() {
        let s = final_state_closed_form(0.5, 1.0, 0.0, ClosedFormPhase::Derived);
        assert!(s.distance_up_to_phase(&initial_state()) < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);

        // ξ = 0, θ = π/2: the state is p·φ⁺
        for (phase, p) in [
            (ClosedFormPhase::PrintedUpper, C64::new(0.0, -1.0)),
            (ClosedFormPhase::PrintedLower, C64::new(0.0, 1.0)),
            (ClosedFormPhase::Derived, re(1.0)),
        ] {
            let s = final_state_closed_form(1.0, 0.0, PI / 2.0, phase);
            let want = bell_states().phi_plus.scaled(p);
            assert!((s.amp - want.amp).camax() < 1e-15);
        }

        let xi = 0.75f64.asinh();
        let s = final_state_closed_form(0.5, xi, PI, ClosedFormPhase::Derived);
        let th = 0.625 * PI;
        let want = th.cos().powi(2) + th.sin().powi(2) * (0.75f64.powi(2) + 1.25f64.powi(2));
        assert!((s.norm().powi(2) - want).abs() < 1e-14);
        assert!((want - (th.cos().powi(2) + th.sin().powi(2) * (2.0 * xi).cosh())).abs() < 1e-14);
    }

    #[test]
    fn decomposition_cases() {
        let d = bell_decomposition(&initial_state());
        assert!((d[1] - re(1.0)).norm() < 1e-15);
        assert!(d[0].norm() + d[2].norm() + d[3].norm() < 1e-15);

        let th = 0.4;
        let s = final_state_closed_form(th, 0.0, 1.0, ClosedFormPhase::PrintedUpper);
        let d = bell_decomposition(&s);
        assert!((d[1] - re(th.cos())).norm() < 1e-15);
        assert!((d[2] - C64::new(0.0, -th.sin())).norm() < 1e-15);
        assert!(d[0].norm() + d[3].norm() < 1e-15);

        let s = final_state_closed_form(0.5, 0.3, 2.0, ClosedFormPhase::Derived);
        let d = bell_decomposition(&s);
        let rebuilt = bell_states()
            .ordered()
            .iter()
            .zip(d)
            .fold(TwoQubitState::real([0.0; 4]), |acc, (b, k)| acc.add(&b.scaled(k)));
        assert!((rebuilt.amp - s.amp).camax() < 1e-15);
    }

    #[test]
    fn rest_frame_evolution_is_a_rotation() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let (p, m) = pair_operators(g, 2.0, 0.0, PI).unwrap();
        let s = evolve_pair(&initial_state(), &p, &m);
        let th = 0.5 * PI;
        let want = final_state_closed_form(0.5, 0.0, PI, ClosedFormPhase::Derived);
        assert!((s.amp - want.amp).camax() < 1e-15);
        let d = bell_decomposition(&s);
        assert!((d[1] - re(th.cos())).norm() < 1e-15);
        assert!((d[2] - re(th.sin())).norm() < 1e-15);
    }

    #[test]
    fn printed_phase_is_unreachable_for_real_operators() {
        // Transport operators are real, so the evolved singlet has real
        // amplitudes; a relative phase of ±i between ψ⁻ and φ⁺ cannot appear.
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let (p, m) = pair_operators(g, 2.0, 0.0, PI / 2.0).unwrap();
        let s = evolve_pair(&initial_state(), &p, &m);
        let printed = final_state_closed_form(0.5, 0.0, PI / 2.0, ClosedFormPhase::PrintedUpper);
        assert!(s.distance_up_to_phase(&printed) > 0.1);
    }

    #[test]
    fn chsh_closed_form_values() {
        for xi in [0.0, 0.5, 2.0] {
            assert!((chsh_closed_form(0.0, xi) - TSIRELSON).abs() < 1e-15);
            assert!((chsh_closed_form(PI, xi) - TSIRELSON).abs() < 1e-14);
        }
        assert!((chsh_closed_form(PI / 2.0, 0.0) - TSIRELSON).abs() < 1e-14);
        assert!(chsh_closed_form_with(PI / 2.0, 0.0, ChshRatio::Printed).abs() < 1e-14);
        assert!((chsh_closed_form_with(PI, 0.0, ChshRatio::Printed) - TSIRELSON).abs() < 1e-14);
    }

    #[test]
    fn degradation_at_quarter_turn() {
        let s = final_state_closed_form(1.0, 0.0, PI / 4.0, ClosedFormPhase::PrintedUpper);
        assert!(chsh_direct(&s).unwrap() < TSIRELSON - 1e-3);
        let s = final_state_closed_form(1.0, 0.0, PI / 4.0, ClosedFormPhase::Derived);
        assert!(chsh_direct(&s).unwrap() < TSIRELSON - 1e-3);
    }

    #[test]
    fn correlator_on_half_turn_state() {
        let z = MeasurementSetting::along([0.0, 0.0, 1.0]);
        let s = final_state_closed_form(1.0, 0.0, PI / 2.0, ClosedFormPhase::PrintedLower);
        assert!((correlator(&s, &z, &z).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn restoration_at_rest() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        for phi in [0.3, 1.0, PI, 5.0] {
            let (p, m) = pair_operators(g, 2.0, 0.0, phi).unwrap();
            let s = evolve_pair(&initial_state(), &p, &m);
            let th = wigner_angle(0.5, 0.0, phi);
            let v = chsh_with(&s, &restored_settings(th, RESTORATION)).unwrap();
            assert!((v - TSIRELSON).abs() < 1e-10);
        }
        let unchanged = restored_settings(0.0, RESTORATION);
        assert!((unchanged.a.op - chsh_settings().a.op).camax() < 1e-15);
    }

    #[test]
    fn restoration_assignment_is_frozen() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let (p, m) = pair_operators(g, 2.0, 0.0, 1.3).unwrap();
        let s = evolve_pair(&initial_state(), &p, &m);
        assert_eq!(select_assignment(&s, 0.65).unwrap(), RESTORATION);
    }

    #[test]
    fn report_at_zero_angle() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        let r = bell_report(g, 2.0, 0.7, 0.0).unwrap();
        assert!((r.chsh_direct - TSIRELSON).abs() < 1e-12);
        assert!((r.chsh_closed - TSIRELSON).abs() < 1e-12);
        assert!(r.restored_residual < 1e-12);
    }
}
