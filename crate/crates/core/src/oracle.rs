//! Independent numerical cross-checks.
//!
//! Nothing here calls the closed-form Christoffel symbols, the analytic
//! tetrad derivative or the nalgebra matrix exponential; each routine
//! recomputes its quantity from more primitive inputs.

use nalgebra::{Matrix4, Vector4};

use crate::error::Result;
use crate::geometry::{
    metric_at, spin_connection_from_parts, tetrad_at, ChristoffelSymbols, ConnectionOneForm,
    Rank3, SpacetimePoint, SpinConnectionSign, StringGeometry, PHI, ZERO3,
};
use crate::kinematics::{four_velocity, CircularWorldline};
use crate::transport::M2;
use crate::C64;

/// Levi-Civita symbols `Γ^λ_{μν} = ½ g^{λσ}(∂_μ g_{σν} + ∂_ν g_{σμ} - ∂_σ g_{μν})`
/// with central-difference metric derivatives.
pub fn fd_christoffel(
    geom: &StringGeometry,
    pt: &SpacetimePoint,
    h: f64,
) -> Result<ChristoffelSymbols> {
    let ginv = metric_at(geom, pt)?
        .g
        .try_inverse()
        .expect("metric is non-degenerate off the axis");
    // dg[σ][μ][ν] = ∂_σ g_{μν}
    let mut dg = ZERO3;
    for (s, slot) in dg.iter_mut().enumerate() {
        let x = pt.coord(s);
        let plus = metric_at(geom, &pt.with_coord(s, x + h))?.g;
        let minus = metric_at(geom, &pt.with_coord(s, x - h))?.g;
        for m in 0..4 {
            for n in 0..4 {
                slot[m][n] = (plus[(m, n)] - minus[(m, n)]) / (2.0 * h);
            }
        }
    }
    let mut gamma = ZERO3;
    for l in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                let mut v = 0.0;
                for s in 0..4 {
                    v += ginv[(l, s)] * (dg[m][s][n] + dg[n][s][m] - dg[s][m][n]);
                }
                gamma[l][m][n] = 0.5 * v;
            }
        }
    }
    Ok(ChristoffelSymbols { gamma })
}

/// Central-difference `∂_μ e^ν_b`, stored as `d[μ][ν][b]`.
pub fn fd_inverse_tetrad_derivative(
    geom: &StringGeometry,
    pt: &SpacetimePoint,
    h: f64,
) -> Result<Rank3> {
    let mut d = ZERO3;
    for (mu, slot) in d.iter_mut().enumerate() {
        let x = pt.coord(mu);
        let plus = tetrad_at(geom, &pt.with_coord(mu, x + h))?.einv;
        let minus = tetrad_at(geom, &pt.with_coord(mu, x - h))?.einv;
        for nu in 0..4 {
            for b in 0..4 {
                slot[nu][b] = (plus[(nu, b)] - minus[(nu, b)]) / (2.0 * h);
            }
        }
    }
    Ok(d)
}

/// Spin connection assembled from finite-difference Christoffels and tetrad
/// derivatives.
pub fn fd_spin_connection(
    geom: &StringGeometry,
    pt: &SpacetimePoint,
    h: f64,
    sign: SpinConnectionSign,
) -> Result<ConnectionOneForm> {
    let tetrad = tetrad_at(geom, pt)?;
    let d = fd_inverse_tetrad_derivative(geom, pt, h)?;
    let gamma = fd_christoffel(geom, pt, h)?;
    Ok(spin_connection_from_parts(&tetrad, &d, &gamma, sign))
}

/// `U^ν ∇_ν U^μ` for the congruence of circular orbits sharing the
/// worldline's rapidity and direction, using finite differences throughout.
pub fn covariant_acceleration(wl: &CircularWorldline, h: f64) -> Result<Vector4<f64>> {
    let pt = wl.point_at(0.0);
    let u = four_velocity(wl);
    let gamma = fd_christoffel(wl.geom(), &pt, h)?.gamma;
    let field = |p: &SpacetimePoint| -> Result<Vector4<f64>> {
        let shifted = CircularWorldline::new(*wl.geom(), p.rho, wl.xi(), wl.direction())?;
        Ok(four_velocity(&shifted))
    };
    let mut a = Vector4::zeros();
    for nu in 0..4 {
        if u[nu] == 0.0 {
            continue;
        }
        let x = pt.coord(nu);
        let du = (field(&pt.with_coord(nu, x + h))? - field(&pt.with_coord(nu, x - h))?) / (2.0 * h);
        a += du * u[nu];
    }
    for m in 0..4 {
        for n in 0..4 {
            for l in 0..4 {
                a[m] += gamma[m][n][l] * u[n] * u[l];
            }
        }
    }
    Ok(a)
}

/// Parallel transport of the frame around a circle of radius `rho` at rest,
/// integrating `dV^a/dφ = -ω_φ^a_b V^b` with classical RK4 over `steps`
/// steps. The columns of the result are the transported frame vectors.
pub fn frame_holonomy(
    geom: &StringGeometry,
    rho: f64,
    sweep: f64,
    steps: usize,
    sign: SpinConnectionSign,
) -> Result<Matrix4<f64>> {
    let h_fd: f64 = 1e-5;
    let rhs = |phi: f64, v: &Matrix4<f64>| -> Result<Matrix4<f64>> {
        let pt = SpacetimePoint::new(0.0, rho, 0.0, phi);
        let w = fd_spin_connection(geom, &pt, h_fd.min(0.5 * rho), sign)?;
        let mut m = Matrix4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                m[(a, b)] = -w.get(PHI, a, b);
            }
        }
        Ok(m * v)
    };
    let h = sweep / steps.max(1) as f64;
    let mut v = Matrix4::identity();
    for k in 0..steps.max(1) {
        let p = k as f64 * h;
        let k1 = rhs(p, &v)?;
        let k2 = rhs(p + 0.5 * h, &(v + k1 * (0.5 * h)))?;
        let k3 = rhs(p + 0.5 * h, &(v + k2 * (0.5 * h)))?;
        let k4 = rhs(p + h, &(v + k3 * h))?;
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(v)
}

/// Rotation by `angle` in the frame 1-3 (ρ-φ) plane, i.e. about the 2-axis.
pub fn rotation_about_2(angle: f64) -> Matrix4<f64> {
    let (s, c) = angle.sin_cos();
    let mut r = Matrix4::identity();
    r[(1, 1)] = c;
    r[(1, 3)] = -s;
    r[(3, 1)] = s;
    r[(3, 3)] = c;
    r
}

/// `exp(m)` by scaling and squaring around a truncated Taylor series.
pub fn taylor_expm(m: &M2) -> M2 {
    let norm = m.iter().map(|z| z.norm()).sum::<f64>();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m * C64::new(scale, 0.0);
    let mut term = M2::identity();
    let mut sum = M2::identity();
    for k in 1..=20 {
        term = term * a / C64::new(k as f64, 0.0);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}
