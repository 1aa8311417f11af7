//! Direction sets and half-space steering physics.
//!
//! A plane wave hitting the interface from one side continues into the other
//! half-space along the transmitted direction `φ(θ)` with amplitude scaled by
//! the transmission coefficient `Φ(θ)`. Both only depend on the incident
//! direction and the frequency-independent wavenumber ratio ξ. When
//! `ξ|θ₁| > 1` the vertical component of `φ` turns imaginary and the
//! transmitted wave is evanescent; the principal square root branch
//! `√(1−t²) = i√(t²−1)` is used throughout.
//!
//! Steering vectors collect, across one array, the amplitude-and-phase
//! pattern a point source at `x` would produce. Their normalized forms are
//! the probes the imaging functionals correlate against singular vectors.

use nalgebra::{DVector, Vector2, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::medium::{HalfSpace, LayeredMedium};

/// Whether an array observes scattered waves or emits incident waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayRole {
    /// Directions on the upper unit half-circle (`θ₂ > 0`).
    Observation,
    /// Directions on the lower unit half-circle (`θ₂ < 0`).
    Incidence,
}

/// An ordered set of unit directions with their generating angles.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorArray {
    role: ArrayRole,
    angles: Vec<f64>,
    directions: Vec<Vector2<f64>>,
    angle_min: f64,
    angle_max: f64,
}

impl SensorArray {
    /// Builds `n` equispaced directions with angles covering
    /// `[angle_min, angle_max]` inclusive.
    ///
    /// Observation directions are `(cos ζ, sin ζ)`; incidence directions are
    /// the negated `−(cos ς, sin ς)` so they point into the lower half-space.
    /// The range must stay inside `(0, π)` so that every direction has a
    /// nonzero vertical component.
    pub fn equispaced(role: ArrayRole, n: usize, angle_min: f64, angle_max: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!(
                "direction count must be at least 2, got {n}"
            )));
        }
        if !(angle_min.is_finite() && angle_max.is_finite()) {
            return Err(Error::invalid("angle range must be finite"));
        }
        if !(0.0 < angle_min && angle_min < angle_max && angle_max < std::f64::consts::PI) {
            return Err(Error::invalid(format!(
                "angle range must satisfy 0 < min < max < pi so that no direction is horizontal, got [{angle_min}, {angle_max}]"
            )));
        }
        let step = (angle_max - angle_min) / (n as f64 - 1.0);
        let angles: Vec<f64> = (0..n).map(|j| angle_min + j as f64 * step).collect();
        let directions = angles
            .iter()
            .map(|&a| {
                let v = Vector2::new(a.cos(), a.sin());
                match role {
                    ArrayRole::Observation => v,
                    ArrayRole::Incidence => -v,
                }
            })
            .collect();
        Ok(Self {
            role,
            angles,
            directions,
            angle_min,
            angle_max,
        })
    }

    pub fn role(&self) -> ArrayRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vector2<f64>] {
        &self.directions
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle_range(&self) -> (f64, f64) {
        (self.angle_min, self.angle_max)
    }

    /// The half-space the directions point into.
    pub fn half_space(&self) -> HalfSpace {
        match self.role {
            ArrayRole::Observation => HalfSpace::Upper,
            ArrayRole::Incidence => HalfSpace::Lower,
        }
    }
}

fn check_direction(direction: Vector2<f64>) -> Result<()> {
    let norm = direction.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "direction must be unit-norm, got |θ| = {norm}"
        )));
    }
    if direction.y == 0.0 {
        return Err(Error::invalid(
            "direction must have a nonzero vertical component (θ₂ ≠ 0)",
        ));
    }
    Ok(())
}

/// Transmitted direction `φ(θ) = (ξθ₁, sign(θ₂)√(1−ξ²θ₁²))`.
///
/// For `ξ²θ₁² > 1` the square root continues as `i√(ξ²θ₁²−1)` (evanescent
/// transmission).
pub fn transmitted_direction(direction: Vector2<f64>, xi: f64) -> Result<Vector2<Complex64>> {
    check_direction(direction)?;
    let t = xi * direction.x;
    let t2 = t * t;
    let sign = direction.y.signum();
    let vertical = if t2 <= 1.0 {
        Complex64::new(sign * (1.0 - t2).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, sign * (t2 - 1.0).sqrt())
    };
    Ok(Vector2::new(Complex64::new(t, 0.0), vertical))
}

/// Interface transmission coefficient
/// `Φ(θ) = 2μ₋ξθ₂ / (μ₋ξθ₂ + μ₊ sign(θ₂)√(1−ξ²θ₁²))`,
/// sharing the square-root branch of [`transmitted_direction`].
pub fn transmission_coeff(
    direction: Vector2<f64>,
    xi: f64,
    mu_plus: f64,
    mu_minus: f64,
) -> Result<Complex64> {
    let phi = transmitted_direction(direction, xi)?;
    let numer = Complex64::new(2.0 * mu_minus * xi * direction.y, 0.0);
    let denom = Complex64::new(mu_minus * xi * direction.y, 0.0) + mu_plus * phi.y;
    Ok(numer / denom)
}

/// Dot of a real test vector with `(1, φ₁, φ₂)`.
pub fn test_vector_dot(c: Vector3<f64>, phi: Vector2<Complex64>) -> Complex64 {
    Complex64::new(c.x, 0.0) + c.y * phi.x + c.z * phi.y
}

/// Array response of a hypothetical point at `x`: one complex entry per
/// array direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub values: DVector<Complex64>,
    pub x: Vector2<f64>,
    pub omega: f64,
    pub role: ArrayRole,
}

impl SteeringVector {
    pub fn norm(&self) -> f64 {
        self.values.norm()
    }
}

fn steering(
    x: Vector2<f64>,
    omega: f64,
    array: &SensorArray,
    c: Vector3<f64>,
    medium: &LayeredMedium,
    phase_sign: f64,
) -> Result<SteeringVector> {
    let xi = medium.wavenumber_ratio();
    let k_minus = medium.wavenumber(HalfSpace::Lower, omega)?;
    let mut values = DVector::zeros(array.len());
    for (n, dir) in array.directions().iter().enumerate() {
        let phi = transmitted_direction(*dir, xi)?;
        let coeff = transmission_coeff(*dir, xi, medium.mu_plus, medium.mu_minus)?;
        let dot = test_vector_dot(c, phi);
        // phase exponent ∓ i k₋ φ·x with the bilinear (unconjugated) dot
        let phi_dot_x = phi.x * x.x + phi.y * x.y;
        let phase = (Complex64::new(0.0, phase_sign) * k_minus * phi_dot_x).exp();
        values[n] = dot * coeff * phase;
    }
    if values.norm() == 0.0 {
        return Err(Error::DegenerateSteering(format!(
            "all steering entries vanish at x = ({}, {})",
            x.x, x.y
        )));
    }
    Ok(SteeringVector {
        values,
        x,
        omega,
        role: array.role(),
    })
}

/// Observation steering vector: entry `n` is
/// `c · (1, φ(ϑₙ)) Φ(ϑₙ) exp(−i k₋ φ(ϑₙ)·x)`.
pub fn observation_steering(
    x: Vector2<f64>,
    omega: f64,
    obs: &SensorArray,
    c_d: Vector3<f64>,
    medium: &LayeredMedium,
) -> Result<SteeringVector> {
    if obs.role() != ArrayRole::Observation {
        return Err(Error::invalid(
            "observation steering requires an observation array",
        ));
    }
    steering(x, omega, obs, c_d, medium, -1.0)
}

/// Incidence steering vector: same shape as [`observation_steering`] with the
/// opposite phase sign, `exp(+i k₋ φ(θₙ)·x)`.
pub fn incidence_steering(
    x: Vector2<f64>,
    omega: f64,
    inc: &SensorArray,
    c_h: Vector3<f64>,
    medium: &LayeredMedium,
) -> Result<SteeringVector> {
    if inc.role() != ArrayRole::Incidence {
        return Err(Error::invalid(
            "incidence steering requires an incidence array",
        ));
    }
    steering(x, omega, inc, c_h, medium, 1.0)
}

/// Rescales a steering vector to unit Euclidean norm.
pub fn normalize(v: &SteeringVector) -> Result<SteeringVector> {
    let norm = v.values.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateSteering(format!(
            "cannot normalize steering vector with norm {norm}"
        )));
    }
    Ok(SteeringVector {
        values: v.values.map(|z| z / norm),
        ..v.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    const XI_41: f64 = 1.118033988749895; // sqrt(5)/2

    fn medium_41() -> LayeredMedium {
        LayeredMedium::new(5.0, 4.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn equispaced_observation_angles() {
        let a = SensorArray::equispaced(ArrayRole::Observation, 6, FRAC_PI_4, 3.0 * PI / 4.0)
            .unwrap();
        for (j, &angle) in a.angles().iter().enumerate() {
            let expected = FRAC_PI_4 + j as f64 * PI / 10.0;
            assert!((angle - expected).abs() < 1e-12);
        }
        assert_eq!(a.angles()[0], FRAC_PI_4);
        assert!((a.angles()[5] - 3.0 * PI / 4.0).abs() < 1e-12);
        for d in a.directions() {
            assert!((d.norm() - 1.0).abs() < 1e-12);
            assert!(d.y > 0.0);
        }
    }

    #[test]
    fn two_point_array_hits_endpoints() {
        let a = SensorArray::equispaced(ArrayRole::Observation, 2, FRAC_PI_4, 3.0 * PI / 4.0)
            .unwrap();
        let s = 0.5_f64.sqrt();
        assert!((a.directions()[0] - Vector2::new(s, s)).norm() < 1e-12);
        assert!((a.directions()[1] - Vector2::new(-s, s)).norm() < 1e-12);
    }

    #[test]
    fn incidence_directions_are_negated() {
        let a =
            SensorArray::equispaced(ArrayRole::Incidence, 10, FRAC_PI_4, 3.0 * PI / 4.0).unwrap();
        let s = 0.5_f64.sqrt();
        assert!((a.directions()[0] - Vector2::new(-s, -s)).norm() < 1e-12);
        for d in a.directions() {
            assert!(d.y < 0.0);
        }
    }

    #[test]
    fn degenerate_angle_ranges_are_rejected() {
        assert!(SensorArray::equispaced(ArrayRole::Observation, 4, 0.0, 1.0).is_err());
        assert!(SensorArray::equispaced(ArrayRole::Observation, 4, 0.5, PI).is_err());
        assert!(SensorArray::equispaced(ArrayRole::Observation, 1, 0.5, 1.0).is_err());
        assert!(SensorArray::equispaced(ArrayRole::Observation, 4, 1.0, 0.5).is_err());
    }

    #[test]
    fn symmetric_range_is_closed_under_mirror() {
        let a = SensorArray::equispaced(ArrayRole::Observation, 6, FRAC_PI_4, PI - FRAC_PI_4)
            .unwrap();
        let n = a.len();
        for j in 0..n {
            let d = a.directions()[j];
            let mirror = a.directions()[n - 1 - j];
            assert!((d.x + mirror.x).abs() < 1e-12);
            assert!((d.y - mirror.y).abs() < 1e-12);
        }
    }

    #[test]
    fn transmitted_direction_vertical() {
        let phi = transmitted_direction(Vector2::new(0.0, -1.0), 0.7).unwrap();
        assert_eq!(phi.x, Complex64::new(0.0, 0.0));
        assert_eq!(phi.y, Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn transmitted_direction_propagating() {
        let d = Vector2::new(FRAC_PI_4.cos(), FRAC_PI_4.sin());
        let phi = transmitted_direction(d, XI_41).unwrap();
        assert!((phi.x.re - 0.7905694150420949).abs() < 1e-12);
        assert_eq!(phi.x.im, 0.0);
        // 1 - xi^2/2 = 0.375
        assert!((phi.y.re - 0.375_f64.sqrt()).abs() < 1e-12);
        assert!((phi.y.re - 0.6123724356957945).abs() < 1e-12);
        assert_eq!(phi.y.im, 0.0);
    }

    #[test]
    fn transmitted_direction_evanescent_branch() {
        let d = Vector2::new((PI / 12.0).cos(), (PI / 12.0).sin());
        let phi = transmitted_direction(d, XI_41).unwrap();
        let t = XI_41 * d.x;
        assert!(t * t > 1.0);
        assert!((phi.x.re - 1.079937904402505).abs() < 1e-12);
        assert_eq!(phi.y.re, 0.0);
        assert!((phi.y.im - (t * t - 1.0).sqrt()).abs() < 1e-12);
        assert!((phi.y.im - 0.4077571303671759).abs() < 1e-12);
    }

    #[test]
    fn horizontal_direction_is_rejected() {
        assert!(transmitted_direction(Vector2::new(1.0, 0.0), 1.0).is_err());
        assert!(transmission_coeff(Vector2::new(-1.0, 0.0), 1.0, 1.0, 1.0).is_err());
        assert!(transmitted_direction(Vector2::new(0.5, 0.5), 1.0).is_err());
    }

    #[test]
    fn matched_media_transmit_unchanged() {
        for angle in [0.3f64, 1.0, 2.2, 2.9] {
            for role_sign in [1.0, -1.0] {
                let d = Vector2::new(angle.cos(), role_sign * angle.sin());
                let phi = transmitted_direction(d, 1.0).unwrap();
                assert!((phi.x.re - d.x).abs() < 1e-12);
                assert!((phi.y.re - d.y).abs() < 1e-12);
                assert_eq!(phi.x.im, 0.0);
                assert_eq!(phi.y.im, 0.0);
                let coeff = transmission_coeff(d, 1.0, 1.0, 1.0).unwrap();
                assert!((coeff - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn transmission_coeff_vertical_incidence() {
        let c = transmission_coeff(Vector2::new(0.0, -1.0), XI_41, 1.0, 1.0).unwrap();
        let expected = 2.0 * XI_41 / (XI_41 + 1.0);
        assert!((c.re - expected).abs() < 1e-12);
        assert!((c.re - 1.0557280900008412).abs() < 1e-12);
        assert_eq!(c.im, 0.0);
    }

    #[test]
    fn transmission_coeff_evanescent() {
        let d = Vector2::new((PI / 12.0).cos(), (PI / 12.0).sin());
        let c = transmission_coeff(d, XI_41, 1.0, 1.0).unwrap();
        // independent arithmetic on the definition
        let t = XI_41 * d.x;
        let rho = (t * t - 1.0).sqrt();
        let numer = Complex64::new(2.0 * XI_41 * d.y, 0.0);
        let denom = Complex64::new(XI_41 * d.y, 0.0) + Complex64::new(0.0, rho);
        assert!(denom.norm() > 0.0);
        let expected = numer / denom;
        assert!((c - expected).norm() < 1e-12);
        assert!(c.im != 0.0);
    }

    #[test]
    fn mirrored_direction_flips_horizontal_component() {
        let d = Vector2::new(0.6, 0.8);
        let m = Vector2::new(-0.6, 0.8);
        let phi_d = transmitted_direction(d, XI_41).unwrap();
        let phi_m = transmitted_direction(m, XI_41).unwrap();
        assert!((phi_d.x + phi_m.x).norm() < 1e-12);
        assert!((phi_d.y - phi_m.y).norm() < 1e-12);
        let c_d = transmission_coeff(d, XI_41, 2.0, 3.0).unwrap();
        let c_m = transmission_coeff(m, XI_41, 2.0, 3.0).unwrap();
        assert!((c_d - c_m).norm() < 1e-12);
    }

    #[test]
    fn observation_steering_at_origin_is_transmission() {
        let m = medium_41();
        let obs = SensorArray::equispaced(ArrayRole::Observation, 6, FRAC_PI_4, 3.0 * PI / 4.0)
            .unwrap();
        let d = observation_steering(
            Vector2::new(0.0, 0.0),
            2.0 * PI,
            &obs,
            Vector3::new(1.0, 0.0, 0.0),
            &m,
        )
        .unwrap();
        for (n, dir) in obs.directions().iter().enumerate() {
            let coeff = transmission_coeff(*dir, m.wavenumber_ratio(), 1.0, 1.0).unwrap();
            assert!((d.values[n] - coeff).norm() < 1e-12);
        }
    }

    #[test]
    fn observation_steering_single_direction_phase() {
        // x = (0, -2), direction (0, 1): phi = (0, 1), phase = exp(+8 pi i) = 1
        let m = medium_41();
        let obs = SensorArray::equispaced(ArrayRole::Observation, 2, 1.5707963267948966 - 1e-9, 1.5707963267948966 + 1e-9)
            .unwrap();
        let d = observation_steering(
            Vector2::new(0.0, -2.0),
            2.0 * PI,
            &obs,
            Vector3::new(1.0, 0.0, 0.0),
            &m,
        )
        .unwrap();
        // both directions are numerically (0, 1)
        for v in d.values.iter() {
            assert!((v - Complex64::new(1.0557280900008412, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn incidence_steering_single_direction_phase() {
        // x = (0, -2), direction (0, -1): phi = (0, -1), phase = exp(+8 pi i) = 1
        let m = medium_41();
        let inc = SensorArray::equispaced(ArrayRole::Incidence, 2, 1.5707963267948966 - 1e-9, 1.5707963267948966 + 1e-9)
            .unwrap();
        let h = incidence_steering(
            Vector2::new(0.0, -2.0),
            2.0 * PI,
            &inc,
            Vector3::new(1.0, 0.0, 0.0),
            &m,
        )
        .unwrap();
        for v in h.values.iter() {
            assert!((v - Complex64::new(1.0557280900008412, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn test_vector_dot_weights_components() {
        let phi = Vector2::new(
            Complex64::new(0.7905694150420949, 0.0),
            Complex64::new(0.6123724356957945, 0.0),
        );
        let dot = test_vector_dot(Vector3::new(0.0, 1.0, 5.0), phi);
        assert!((dot.re - 3.8524315935210676).abs() < 1e-12);
        assert_eq!(dot.im, 0.0);
    }

    #[test]
    fn steering_conjugation_link() {
        // For c = (1,0,0) and a propagating direction, the incidence entry at x
        // equals the conjugate of the observation-style entry built on the same
        // transmitted direction.
        let m = medium_41();
        let xi = m.wavenumber_ratio();
        let k_minus = m.wavenumber(HalfSpace::Lower, 2.0 * PI).unwrap();
        let x = Vector2::new(0.3, -1.7);
        let dir = Vector2::new(0.5, -(1.0f64 - 0.25).sqrt());
        let phi = transmitted_direction(dir, xi).unwrap();
        let coeff = transmission_coeff(dir, xi, m.mu_plus, m.mu_minus).unwrap();
        assert_eq!(phi.x.im, 0.0);
        assert_eq!(phi.y.im, 0.0);
        let phase_arg = k_minus * (phi.x.re * x.x + phi.y.re * x.y);
        let obs_style = coeff * Complex64::new(0.0, -phase_arg).exp();
        let inc_style = coeff * Complex64::new(0.0, phase_arg).exp();
        assert!((inc_style - obs_style.conj()).norm() < 1e-12);
    }

    #[test]
    fn wrong_array_role_is_rejected() {
        let m = medium_41();
        let obs = SensorArray::equispaced(ArrayRole::Observation, 4, FRAC_PI_4, 3.0 * PI / 4.0)
            .unwrap();
        let inc = SensorArray::equispaced(ArrayRole::Incidence, 4, FRAC_PI_4, 3.0 * PI / 4.0)
            .unwrap();
        let x = Vector2::new(0.0, -1.0);
        let c = Vector3::new(1.0, 0.0, 0.0);
        assert!(observation_steering(x, 1.0, &inc, c, &m).is_err());
        assert!(incidence_steering(x, 1.0, &obs, c, &m).is_err());
    }

    #[test]
    fn normalize_pythagorean() {
        let v = SteeringVector {
            values: DVector::from_vec(vec![
                Complex64::new(3.0, 0.0),
                Complex64::new(0.0, 4.0),
            ]),
            x: Vector2::new(0.0, -1.0),
            omega: 1.0,
            role: ArrayRole::Observation,
        };
        let u = normalize(&v).unwrap();
        assert!((u.values[0] - Complex64::new(0.6, 0.0)).norm() < 1e-15);
        assert!((u.values[1] - Complex64::new(0.0, 0.8)).norm() < 1e-15);
        // idempotent
        let uu = normalize(&u).unwrap();
        assert!((uu.values - u.values).norm() < 1e-15);
    }

    #[test]
    fn normalize_rejects_zero() {
        let v = SteeringVector {
            values: DVector::zeros(3),
            x: Vector2::new(0.0, -1.0),
            omega: 1.0,
            role: ArrayRole::Observation,
        };
        assert!(normalize(&v).is_err());
    }

    proptest! {
        #[test]
        fn transmitted_direction_is_unit_when_propagating(
            angle in 0.01..3.13f64,
            xi in 0.1..3.0f64,
            lower in proptest::bool::ANY,
        ) {
            let sign = if lower { -1.0 } else { 1.0 };
            let d = Vector2::new(angle.cos(), sign * angle.sin());
            prop_assume!(xi * d.x.abs() <= 1.0);
            let phi = transmitted_direction(d, xi).unwrap();
            let norm2 = phi.x.norm_sqr() + phi.y.norm_sqr();
            prop_assert!((norm2 - 1.0).abs() < 1e-12);
        }

        #[test]
        fn normalize_is_scale_invariant(
            scale in 0.01..100.0f64,
            re in -5.0..5.0f64,
            im in -5.0..5.0f64,
        ) {
            prop_assume!(re.abs() + im.abs() > 1e-3);
            let values = DVector::from_vec(vec![
                Complex64::new(re, im),
                Complex64::new(1.0, -2.0),
                Complex64::new(-0.5, 0.25),
            ]);
            let v = SteeringVector {
                values: values.clone(),
                x: Vector2::new(0.0, -1.0),
                omega: 1.0,
                role: ArrayRole::Incidence,
            };
            let scaled = SteeringVector { values: values * Complex64::new(scale, 0.0), ..v.clone() };
            let n1 = normalize(&v).unwrap();
            let n2 = normalize(&scaled).unwrap();
            prop_assert!((n1.norm() - 1.0).abs() < 1e-12);
            prop_assert!((n1.values - n2.values).norm() < 1e-10);
        }
    }
}
