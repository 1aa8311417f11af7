//! Physical configuration: the two-layered background, the buried scatterers,
//! the frequency sweep, and the complete experiment description (`Scenario`).
//!
//! The background is a planar interface at `x2 = 0` separating two homogeneous
//! half-spaces. Sources and receivers live in the upper half-space, scatterers
//! in the lower one. All material constants are real, positive and
//! frequency-independent.

use std::f64::consts::PI;

use nalgebra::{Vector2, Vector3};

use crate::error::{Error, Result};
use crate::imaging::ImagingGrid;
use crate::steering::{self, ArrayRole, SensorArray};

/// Reference-domain area |B| of a scatterer. All scatterers are disks, so the
/// reference domain is the unit disk.
pub const REFERENCE_AREA: f64 = PI;

/// Selects one of the two half-spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfSpace {
    /// `x2 > 0`, where sources and receivers are placed.
    Upper,
    /// `x2 < 0`, where the scatterers are buried.
    Lower,
}

/// Relative permittivities and permeabilities of the two half-spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayeredMedium {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
}

impl LayeredMedium {
    /// All four parameters must be strictly positive and finite.
    pub fn new(eps_plus: f64, eps_minus: f64, mu_plus: f64, mu_minus: f64) -> Result<Self> {
        for (name, v) in [
            ("eps_plus", eps_plus),
            ("eps_minus", eps_minus),
            ("mu_plus", mu_plus),
            ("mu_minus", mu_minus),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            eps_plus,
            eps_minus,
            mu_plus,
            mu_minus,
        })
    }

    /// Wavenumber `k±(ω) = ω √(ε± μ±)` of the requested half-space.
    pub fn wavenumber(&self, half: HalfSpace, omega: f64) -> Result<f64> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(format!(
                "omega must be strictly positive, got {omega}"
            )));
        }
        let (eps, mu) = match half {
            HalfSpace::Upper => (self.eps_plus, self.mu_plus),
            HalfSpace::Lower => (self.eps_minus, self.mu_minus),
        };
        Ok(omega * (eps * mu).sqrt())
    }

    /// Ratio `ξ = k₊(ω)/k₋(ω) = √(ε₊μ₊/(ε₋μ₋))`.
    ///
    /// Both wavenumbers scale linearly in ω, so the ratio is
    /// frequency-independent.
    pub fn wavenumber_ratio(&self) -> f64 {
        (self.eps_plus * self.mu_plus / (self.eps_minus * self.mu_minus)).sqrt()
    }
}

/// A small disk-shaped scatterer embedded in the lower half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inhomogeneity {
    /// Center, strictly below the interface.
    pub center: Vector2<f64>,
    /// Disk radius (small with respect to the wavelength).
    pub radius: f64,
    /// Relative permittivity of the scatterer material.
    pub eps: f64,
    /// Relative permeability of the scatterer material.
    pub mu: f64,
}

/// Material contrasts of a scatterer against the lower half-space, plus the
/// scalar of its (isotropic) polarization tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contrasts {
    /// `γ_ε = ε/ε₋ − 1`
    pub gamma_eps: f64,
    /// `γ_μ = μ/μ₋ − 1`
    pub gamma_mu: f64,
    /// Diagonal value `2 μ₋ |B| / (μ₋ + μ)` of the polarization tensor.
    pub pol_scalar: f64,
}

impl Inhomogeneity {
    pub fn new(center: Vector2<f64>, radius: f64, eps: f64, mu: f64) -> Result<Self> {
        if !(center.x.is_finite() && center.y.is_finite() && center.y < 0.0) {
            return Err(Error::invalid(format!(
                "scatterer center must lie strictly below the interface (x2 < 0), got ({}, {})",
                center.x, center.y
            )));
        }
        for (name, v) in [("radius", radius), ("eps", eps), ("mu", mu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "scatterer {name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            center,
            radius,
            eps,
            mu,
        })
    }

    /// Contrast coefficients of this scatterer against the lower half-space.
    pub fn contrasts(&self, medium: &LayeredMedium) -> Contrasts {
        Contrasts {
            gamma_eps: self.eps / medium.eps_minus - 1.0,
            gamma_mu: self.mu / medium.mu_minus - 1.0,
            pol_scalar: 2.0 * medium.mu_minus * REFERENCE_AREA / (medium.mu_minus + self.mu),
        }
    }
}

/// How a frequency sweep is spaced between its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencySpacing {
    /// Angular frequencies equispaced.
    LinearOmega,
    /// Wavelengths `λ = 2π/ω` equispaced; frequencies still stored ascending.
    LinearLambda,
}

/// An ordered, strictly increasing set of angular frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySet {
    omegas: Vec<f64>,
    spacing: FrequencySpacing,
}

impl FrequencySet {
    /// Builds `count` frequencies covering `[omega_min, omega_max]` inclusive.
    ///
    /// `count == 1` yields the single frequency `omega_min`. In
    /// `LinearLambda` mode the corresponding wavelengths `2π/ω` are
    /// equispaced instead of the frequencies themselves.
    pub fn equispaced(
        omega_min: f64,
        omega_max: f64,
        count: usize,
        spacing: FrequencySpacing,
    ) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("frequency count must be at least 1"));
        }
        if !(omega_min.is_finite() && omega_min > 0.0) {
            return Err(Error::invalid(format!(
                "omega_min must be strictly positive, got {omega_min}"
            )));
        }
        if !(omega_max.is_finite() && omega_max >= omega_min) {
            return Err(Error::invalid(format!(
                "omega_max must satisfy omega_min <= omega_max, got [{omega_min}, {omega_max}]"
            )));
        }
        if count == 1 {
            return Ok(Self {
                omegas: vec![omega_min],
                spacing,
            });
        }
        if omega_max == omega_min {
            return Err(Error::invalid(
                "omega_min == omega_max requires count == 1 (frequencies must be strictly increasing)",
            ));
        }
        let n = count as f64;
        let omegas: Vec<f64> = match spacing {
            FrequencySpacing::LinearOmega => (0..count)
                .map(|f| omega_min + f as f64 * (omega_max - omega_min) / (n - 1.0))
                .collect(),
            FrequencySpacing::LinearLambda => {
                let lambda_max = 2.0 * PI / omega_min;
                let lambda_min = 2.0 * PI / omega_max;
                (0..count)
                    .map(|f| {
                        let lambda = lambda_max - f as f64 * (lambda_max - lambda_min) / (n - 1.0);
                        2.0 * PI / lambda
                    })
                    .collect()
            }
        };
        Ok(Self { omegas, spacing })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn spacing(&self) -> FrequencySpacing {
        self.spacing
    }

    /// Wavelength `λ_f = 2π/ω_f` of the f-th entry.
    pub fn wavelength(&self, index: usize) -> f64 {
        2.0 * PI / self.omegas[index]
    }
}

/// Complete description of one experiment: background, scatterers, arrays,
/// frequency sweep, test vectors, noise and search grid.
///
/// Construction validates every cross-cutting constraint, in particular the
/// steering selection check: for every array direction the test-vector dot
/// `c · (1, φ(θ))` and the transmission coefficient `Φ(θ)` must stay away
/// from zero, otherwise steering vectors could degenerate. The transmitted
/// direction `φ` depends on frequency only through the frequency-independent
/// ratio ξ, so one pass over the directions covers the whole sweep.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub medium: LayeredMedium,
    pub scatterers: Vec<Inhomogeneity>,
    pub observation: SensorArray,
    pub incidence: SensorArray,
    pub frequencies: FrequencySet,
    /// Test vector applied to observation steering entries.
    pub c_d: Vector3<f64>,
    /// Test vector applied to incidence steering entries.
    pub c_h: Vector3<f64>,
    /// Target signal-to-noise ratio in dB; `None` means noiseless data.
    pub snr_db: Option<f64>,
    /// Seed for the noise generator.
    pub seed: u64,
    /// Search grid for the imaging functionals.
    pub grid: ImagingGrid,
}

/// Absolute floor below which the selection check treats a value as zero.
const SELECTION_TOL: f64 = 1e-12;

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        medium: LayeredMedium,
        scatterers: Vec<Inhomogeneity>,
        observation: SensorArray,
        incidence: SensorArray,
        frequencies: FrequencySet,
        c_d: Vector3<f64>,
        c_h: Vector3<f64>,
        snr_db: Option<f64>,
        seed: u64,
        grid: ImagingGrid,
    ) -> Result<Self> {
        if observation.role() != ArrayRole::Observation {
            return Err(Error::validation(
                "arrays.observation",
                "array role must be observation",
            ));
        }
        if incidence.role() != ArrayRole::Incidence {
            return Err(Error::validation(
                "arrays.incidence",
                "array role must be incidence",
            ));
        }
        if let Some(snr) = snr_db {
            if !snr.is_finite() {
                return Err(Error::validation("noise.snr_db", "SNR must be finite"));
            }
        }
        let scenario = Self {
            medium,
            scatterers,
            observation,
            incidence,
            frequencies,
            c_d,
            c_h,
            snr_db,
            seed,
            grid,
        };
        scenario.check_selection("test_vectors.c_d", &scenario.observation, scenario.c_d)?;
        scenario.check_selection("test_vectors.c_h", &scenario.incidence, scenario.c_h)?;
        Ok(scenario)
    }

    /// Selection check: `c · (1, φ(θ)) ≠ 0` and `Φ(θ) ≠ 0` for every
    /// direction of `array`.
    fn check_selection(&self, path: &str, array: &SensorArray, c: Vector3<f64>) -> Result<()> {
        if c.norm() == 0.0 {
            return Err(Error::validation(path, "test vector must be nonzero"));
        }
        let xi = self.medium.wavenumber_ratio();
        for (n, dir) in array.directions().iter().enumerate() {
            let phi = steering::transmitted_direction(*dir, xi)?;
            let dot = steering::test_vector_dot(c, phi);
            if dot.norm() < SELECTION_TOL {
                return Err(Error::validation(
                    path,
                    format!(
                        "selection check failed: c · (1, φ) vanishes for direction {n} (|dot| < {SELECTION_TOL:e})"
                    ),
                ));
            }
            let phi_coeff = steering::transmission_coeff(
                *dir,
                xi,
                self.medium.mu_plus,
                self.medium.mu_minus,
            )?;
            if phi_coeff.norm() < SELECTION_TOL {
                return Err(Error::validation(
                    path,
                    format!("selection check failed: transmission coefficient vanishes for direction {n}"),
                ));
            }
        }
        Ok(())
    }

    /// Positions of all scatterer centers, in declaration order.
    pub fn scatterer_centers(&self) -> Vec<Vector2<f64>> {
        self.scatterers.iter().map(|s| s.center).collect()
    }
}
