//! Circular worldlines of the EPR particles around the string axis.

use nalgebra::Vector4;
use serde::Serialize;

use crate::error::{require, Error, Result};
use crate::geometry::{SpacetimePoint, StringGeometry, PHI, RHO, T};

/// Sense of rotation, i.e. the sign of `dφ/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// Toward the observer at `φ = +Φ`.
    Positive,
    /// Toward the observer at `φ = -Φ`.
    Negative,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Positive => 1.0,
            Direction::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Positive => Direction::Negative,
            Direction::Negative => Direction::Positive,
        }
    }
}

/// Rapidity from `v/c`.
pub fn rapidity_from_beta(beta: f64) -> Result<f64> {
    require(
        beta.is_finite() && (0.0..1.0).contains(&beta),
        "beta",
        beta,
        "v/c must lie in [0, 1)",
    )?;
    Ok(beta.atanh())
}

/// `v/c = tanh ξ`.
pub fn beta_from_rapidity(xi: f64) -> f64 {
    xi.tanh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircularWorldline {
    geom: StringGeometry,
    rho: f64,
    xi: f64,
    direction: Direction,
}

impl CircularWorldline {
    pub fn new(geom: StringGeometry, rho: f64, xi: f64, direction: Direction) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::OnStringAxis { rho });
        }
        require(xi.is_finite() && xi >= 0.0, "xi", xi, "rapidity must be finite and non-negative")?;
        Ok(Self {
            geom,
            rho,
            xi,
            direction,
        })
    }

    pub fn geom(&self) -> &StringGeometry {
        &self.geom
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    /// Orbital speed `c tanh ξ`.
    pub fn speed(&self) -> f64 {
        self.geom.c() * self.xi.tanh()
    }

    /// Point of the orbit at azimuth `phi` (on the `z = 0` plane).
    pub fn point_at(&self, phi: f64) -> SpacetimePoint {
        SpacetimePoint::new(0.0, self.rho, 0.0, phi)
    }

    /// `dτ/dφ` magnitude, `αρ / (c sinh ξ)`; infinite at rest.
    pub fn proper_time_per_radian(&self) -> f64 {
        self.geom.alpha() * self.rho / (self.geom.c() * self.xi.sinh())
    }
}

/// `U^t = c cosh ξ`, `U^φ = ±(c/(αρ)) sinh ξ`.
pub fn four_velocity(wl: &CircularWorldline) -> Vector4<f64> {
    let c = wl.geom.c();
    let mut u = Vector4::zeros();
    u[T] = c * wl.xi.cosh();
    u[PHI] = wl.direction.sign() * c * wl.xi.sinh() / (wl.geom.alpha() * wl.rho);
    u
}

/// Centripetal proper acceleration, `a^ρ = -(c²/ρ) sinh² ξ`.
pub fn proper_acceleration(wl: &CircularWorldline) -> Vector4<f64> {
    let c = wl.geom.c();
    let s = wl.xi.sinh();
    let mut a = Vector4::zeros();
    a[RHO] = -c * c * s * s / wl.rho;
    a
}

/// Proper time to sweep an azimuth `phi`: `αρΦ / (c sinh ξ)`.
pub fn proper_time_total(wl: &CircularWorldline, phi: f64) -> Result<f64> {
    require(phi.is_finite() && phi >= 0.0, "Phi", phi, "sweep angle must be non-negative")?;
    if wl.xi == 0.0 {
        return Err(Error::ParticleAtRest);
    }
    Ok(wl.proper_time_per_radian() * phi)
}

/// Frame four-momentum `(mc cosh ξ, 0, 0, ±mc sinh ξ)`.
pub fn four_momentum_frame(wl: &CircularWorldline, mass: f64) -> Result<Vector4<f64>> {
    require(mass.is_finite() && mass > 0.0, "mass", mass, "mass must be positive")?;
    let mc = mass * wl.geom.c();
    Ok(Vector4::new(
        mc * wl.xi.cosh(),
        0.0,
        0.0,
        wl.direction.sign() * mc * wl.xi.sinh(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric_at;

    fn wl(alpha: f64, rho: f64, xi: f64, dir: Direction) -> CircularWorldline {
        CircularWorldline::new(StringGeometry::with_alpha(alpha).unwrap(), rho, xi, dir).unwrap()
    }

    #[test]
    fn rejects_bad_worldlines() {
        let g = StringGeometry::with_alpha(0.5).unwrap();
        assert!(CircularWorldline::new(g, 0.0, 1.0, Direction::Positive).is_err());
        assert!(CircularWorldline::new(g, 1.0, -0.1, Direction::Positive).is_err());
        assert!(rapidity_from_beta(1.0).is_err());
        assert!(rapidity_from_beta(-0.1).is_err());
    }

    #[test]
    fn velocity_at_rest_and_moving() {
        let u = four_velocity(&wl(0.5, 2.0, 0.0, Direction::Positive));
        assert_eq!(u, Vector4::new(1.0, 0.0, 0.0, 0.0));

        let xi = rapidity_from_beta(0.6).unwrap();
        let u = four_velocity(&wl(0.5, 2.0, xi, Direction::Positive));
        assert!((u[T] - 1.25).abs() < 1e-14);
        assert!((u[PHI] - 0.75).abs() < 1e-14);
        assert!(u[RHO] == 0.0 && u[2] == 0.0);
    }

    #[test]
    fn acceleration_and_proper_time() {
        let xi = 0.75f64.asinh();
        let w = wl(0.5, 2.0, xi, Direction::Positive);
        assert!((proper_acceleration(&w)[RHO] + 0.28125).abs() < 1e-15);
        assert_eq!(proper_acceleration(&wl(0.5, 2.0, 0.0, Direction::Positive)).norm(), 0.0);

        let pi = std::f64::consts::PI;
        let tau = proper_time_total(&w, pi).unwrap();
        assert!((tau - pi / 0.75).abs() < 1e-12);
        assert!((tau - 4.188790).abs() < 1e-6);
        let tau2 = proper_time_total(&w, 2.0 * pi).unwrap();
        assert!((tau2 - 2.0 * tau).abs() < 1e-12);

        let unit = wl(1.0, 1.0, 1.0f64.asinh(), Direction::Positive);
        assert!((proper_time_total(&unit, pi).unwrap() - pi).abs() < 1e-12);

        let rest = wl(0.5, 2.0, 0.0, Direction::Positive);
        assert_eq!(proper_time_total(&rest, pi), Err(Error::ParticleAtRest));
    }

    #[test]
    fn momentum_values() {
        let p = four_momentum_frame(&wl(0.5, 2.0, 0.0, Direction::Positive), 1.0).unwrap();
        assert_eq!(p, Vector4::new(1.0, 0.0, 0.0, 0.0));
        let p = four_momentum_frame(&wl(0.5, 2.0, 0.75f64.asinh(), Direction::Negative), 1.0).unwrap();
        assert!((p[0] - 1.25).abs() < 1e-15);
        assert!((p[3] + 0.75).abs() < 1e-15);
        assert!(four_momentum_frame(&wl(0.5, 2.0, 0.1, Direction::Negative), 0.0).is_err());
    }

    #[test]
    fn velocity_normalization_with_c() {
        let g = StringGeometry::new(0.3, 2.0).unwrap();
        let w = CircularWorldline::new(g, 1.5, 0.9, Direction::Negative).unwrap();
        let u = four_velocity(&w);
        let m = metric_at(&g, &w.point_at(0.0)).unwrap().g;
        let norm = (u.transpose() * m * u)[0];
        assert!((norm + 4.0).abs() < 1e-12);
    }
}
