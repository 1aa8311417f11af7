//! Imaging functionals over a rectangular search grid.
//!
//! Three functionals are provided:
//!
//! * the multi-frequency filter: magnitude of the frequency- and
//!   rank-summed correlations between normalized steering vectors and the
//!   signal singular vectors, divided by the frequency count;
//! * single-frequency MUSIC: reciprocal norm of the normalized observation
//!   steering vector's projection onto the noise subspace;
//! * single-frequency Kirchhoff migration: `|W_Dᴴ · K · conj(W_H)|`.
//!
//! Grid evaluation is data-parallel over lattice points with one writer per
//! cell, so results are bitwise identical for any worker count.

use nalgebra::{DMatrix, DVector, Vector2, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::medium::{HalfSpace, LayeredMedium, Scenario};
use crate::spectral::{estimate_signal_rank, Frame, MSRDataset, SpectralData};
use crate::steering::{
    test_vector_dot, transmission_coeff, transmitted_direction, SensorArray,
};

/// Ceiling applied to MUSIC values where the functional diverges.
pub const DEFAULT_MUSIC_CEILING: f64 = 1e12;

/// Rectangular lattice in the lower half-space.
///
/// Point counts per axis follow `floor((max − min)/step) + 1`, with division
/// results within 1e-9 of an integer rounded up to it so that binary
/// representation of steps like 0.05 still reaches the far edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagingGrid {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
    pub step: f64,
    n1: usize,
    n2: usize,
}

fn axis_count(min: f64, max: f64, step: f64) -> usize {
    ((max - min) / step + 1e-9).floor() as usize + 1
}

impl ImagingGrid {
    pub fn new(x1_min: f64, x1_max: f64, x2_min: f64, x2_max: f64, step: f64) -> Result<Self> {
        for (name, v) in [
            ("x1_min", x1_min),
            ("x1_max", x1_max),
            ("x2_min", x2_min),
            ("x2_max", x2_max),
            ("step", step),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("grid {name} must be finite")));
            }
        }
        if step <= 0.0 {
            return Err(Error::invalid(format!("grid step must be positive, got {step}")));
        }
        if x1_max < x1_min || x2_max < x2_min {
            return Err(Error::invalid("grid bounds must satisfy min <= max on both axes"));
        }
        if x2_max > 0.0 {
            return Err(Error::invalid(format!(
                "grid must lie in the lower half-space (x2_max <= 0), got x2_max = {x2_max}"
            )));
        }
        let n1 = axis_count(x1_min, x1_max, step);
        let n2 = axis_count(x2_min, x2_max, step);
        Ok(Self {
            x1_min,
            x1_max,
            x2_min,
            x2_max,
            step,
            n1,
            n2,
        })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i1: usize, i2: usize) -> Vector2<f64> {
        Vector2::new(
            self.x1_min + i1 as f64 * self.step,
            self.x2_min + i2 as f64 * self.step,
        )
    }

    /// Linear index of the lattice point `(i1, i2)`; `x2` is the outer
    /// (slow) axis, `x1` the inner one, both ascending.
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i2 * self.n1 + i1
    }
}

/// Which functional produced a map.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodTag {
    Filter { f_count: usize },
    Music { omega: f64, m_hat: usize },
    Kirchhoff { omega: f64 },
}

impl MethodTag {
    pub fn name(&self) -> &'static str {
        match self {
            MethodTag::Filter { .. } => "filter",
            MethodTag::Music { .. } => "music",
            MethodTag::Kirchhoff { .. } => "kirchhoff",
        }
    }
}

/// Noise settings a map was computed under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseProvenance {
    pub seed: u64,
    pub snr_db: f64,
}

/// A scalar field over the search grid with its provenance.
#[derive(Debug, Clone)]
pub struct ImagingMap {
    pub grid: ImagingGrid,
    /// Row-major values (`x2` outer, `x1` inner).
    pub values: Vec<f64>,
    pub method: MethodTag,
    /// Frequencies that entered the functional.
    pub frequencies: Vec<f64>,
    pub noise: Option<NoiseProvenance>,
}

impl ImagingMap {
    pub fn value_at(&self, i1: usize, i2: usize) -> f64 {
        self.values[self.grid.index(i1, i2)]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lattice point of the global maximum (first hit on ties).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, &v) in self.values.iter().enumerate() {
            if v > best.1 {
                best = (i, v);
            }
        }
        (best.0 % self.grid.n1(), best.0 / self.grid.n1())
    }
}

/// Per-direction data that does not depend on the evaluation point: the
/// weight `c·(1,φ)Φ` and the transmitted direction, plus the phase sign.
struct DirectionTable {
    weights: Vec<Complex64>,
    phis: Vec<Vector2<Complex64>>,
    phase_sign: f64,
}

impl DirectionTable {
    fn build(
        array: &SensorArray,
        c: Vector3<f64>,
        medium: &LayeredMedium,
        phase_sign: f64,
    ) -> Result<Self> {
        let xi = medium.wavenumber_ratio();
        let mut weights = Vec::with_capacity(array.len());
        let mut phis = Vec::with_capacity(array.len());
        for dir in array.directions() {
            let phi = transmitted_direction(*dir, xi)?;
            let coeff = transmission_coeff(*dir, xi, medium.mu_plus, medium.mu_minus)?;
            weights.push(test_vector_dot(c, phi) * coeff);
            phis.push(phi);
        }
        Ok(Self {
            weights,
            phis,
            phase_sign,
        })
    }

    /// Unit-norm steering vector at `x`.
    fn unit_steering(&self, x: Vector2<f64>, k_minus: f64) -> Result<DVector<Complex64>> {
        let mut v = DVector::zeros(self.weights.len());
        for n in 0..self.weights.len() {
            let phi = &self.phis[n];
            let phi_dot_x = phi.x * x.x + phi.y * x.y;
            let phase = (Complex64::new(0.0, self.phase_sign) * k_minus * phi_dot_x).exp();
            v[n] = self.weights[n] * phase;
        }
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateSteering(format!(
                "steering vector norm {norm} at x = ({}, {})",
                x.x, x.y
            )));
        }
        Ok(v / Complex64::new(norm, 0.0))
    }
}

/// Everything needed to evaluate one frequency's filter term at a point.
struct FilterFrame {
    k_minus: f64,
    obs: DirectionTable,
    inc: DirectionTable,
    u_cols: Vec<DVector<Complex64>>,
    v_cols_conj: Vec<DVector<Complex64>>,
}

impl FilterFrame {
    fn build(scenario: &Scenario, frame: &Frame) -> Result<Self> {
        let s = &frame.spectral;
        let m_hat = s.m_hat.min(s.p());
        let u_cols = (0..m_hat).map(|m| s.u.column(m).into_owned()).collect();
        let v_cols_conj = (0..m_hat)
            .map(|m| s.v.column(m).map(|z| z.conj()))
            .collect();
        Ok(Self {
            k_minus: scenario
                .medium
                .wavenumber(HalfSpace::Lower, frame.msr.omega)?,
            obs: DirectionTable::build(
                &scenario.observation,
                scenario.c_d,
                &scenario.medium,
                -1.0,
            )?,
            inc: DirectionTable::build(&scenario.incidence, scenario.c_h, &scenario.medium, 1.0)?,
            u_cols,
            v_cols_conj,
        })
    }

    /// `Σ_{m ≤ M̂} (W_Dᴴ U_m)(W_Hᴴ conj(V_m))` at `x`.
    fn term(&self, x: Vector2<f64>) -> Result<Complex64> {
        if self.u_cols.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let wd = self.obs.unit_steering(x, self.k_minus)?;
        let wh = self.inc.unit_steering(x, self.k_minus)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for (u, v) in self.u_cols.iter().zip(self.v_cols_conj.iter()) {
            sum += wd.dotc(u) * wh.dotc(v);
        }
        Ok(sum)
    }
}

fn check_point_in_lower_half_space(x: Vector2<f64>) -> Result<()> {
    if x.y > 0.0 {
        return Err(Error::invalid(format!(
            "evaluation point must lie in the lower half-space (x2 <= 0), got x2 = {}",
            x.y
        )));
    }
    Ok(())
}

fn build_filter_frames(
    scenario: &Scenario,
    dataset: &MSRDataset,
    f_count: usize,
) -> Result<Vec<FilterFrame>> {
    if f_count == 0 {
        return Err(Error::invalid("frequency list must be non-empty"));
    }
    if f_count > dataset.len() {
        return Err(Error::invalid(format!(
            "filter needs {f_count} frequencies but the dataset has {}",
            dataset.len()
        )));
    }
    dataset.frames()[..f_count]
        .iter()
        .map(|frame| FilterFrame::build(scenario, frame))
        .collect()
}

fn eval_filter(frames: &[FilterFrame], x: Vector2<f64>) -> Result<f64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for frame in frames {
        sum += frame.term(x)?;
    }
    Ok(sum.norm() / frames.len() as f64)
}

/// Multi-frequency filter value at a single point, using the first `f_count`
/// frequencies of the dataset. The magnitude is taken once over the double
/// sum, not per term.
pub fn filter_value(
    x: Vector2<f64>,
    scenario: &Scenario,
    dataset: &MSRDataset,
    f_count: usize,
) -> Result<f64> {
    check_point_in_lower_half_space(x)?;
    let frames = build_filter_frames(scenario, dataset, f_count)?;
    eval_filter(&frames, x)
}

fn map_noise(dataset: &MSRDataset) -> Option<NoiseProvenance> {
    dataset
        .noise()
        .map(|(seed, snr_db)| NoiseProvenance { seed, snr_db })
}

fn eval_grid<F>(grid: &ImagingGrid, f: F) -> Result<Vec<f64>>
where
    F: Fn(Vector2<f64>) -> Result<f64> + Sync,
{
    let n1 = grid.n1();
    let mut values = vec![0.0f64; grid.len()];
    let results: Result<Vec<()>> = values
        .par_chunks_mut(n1)
        .enumerate()
        .map(|(i2, row)| {
            for (i1, cell) in row.iter_mut().enumerate() {
                *cell = f(grid.point(i1, i2))?;
            }
            Ok(())
        })
        .collect();
    results?;
    Ok(values)
}

/// Multi-frequency filter map over `grid`.
pub fn filter_map(
    scenario: &Scenario,
    dataset: &MSRDataset,
    f_count: usize,
    grid: &ImagingGrid,
) -> Result<ImagingMap> {
    let frames = build_filter_frames(scenario, dataset, f_count)?;
    let values = eval_grid(grid, |x| eval_filter(&frames, x))?;
    Ok(ImagingMap {
        grid: *grid,
        values,
        method: MethodTag::Filter { f_count },
        frequencies: dataset.frames()[..f_count]
            .iter()
            .map(|f| f.msr.omega)
            .collect(),
        noise: map_noise(dataset),
    })
}

/// Per-frequency signal ranks actually used by the filter, for diagnostics.
pub fn rank_trace(dataset: &MSRDataset, f_count: usize) -> Vec<usize> {
    dataset.frames()[..f_count.min(dataset.len())]
        .iter()
        .map(|f| f.spectral.m_hat)
        .collect()
}

/// Options for the MUSIC functional.
#[derive(Debug, Clone, Copy)]
pub struct MusicOptions {
    /// Re-estimate the signal rank at this threshold instead of using the
    /// dataset's stored rank.
    pub tau: Option<f64>,
    /// Values are clamped here so maps stay finite at scatterer locations.
    pub ceiling: f64,
}

impl Default for MusicOptions {
    fn default() -> Self {
        Self {
            tau: None,
            ceiling: DEFAULT_MUSIC_CEILING,
        }
    }
}

/// Norm of the projection of unit vector `w` onto the orthogonal complement
/// of the first `m_hat` columns of `u`.
pub fn noise_projection_norm(u: &DMatrix<Complex64>, m_hat: usize, w: &DVector<Complex64>) -> f64 {
    let mut residual = w.clone();
    for m in 0..m_hat {
        let col = u.column(m);
        let coeff = col.dotc(w);
        residual -= DVector::from(col.into_owned()) * coeff;
    }
    residual.norm()
}

struct MusicFrame {
    k_minus: f64,
    obs: DirectionTable,
    u: DMatrix<Complex64>,
    m_hat: usize,
    ceiling: f64,
}

impl MusicFrame {
    fn value(&self, x: Vector2<f64>) -> Result<f64> {
        let wd = self.obs.unit_steering(x, self.k_minus)?;
        let norm = noise_projection_norm(&self.u, self.m_hat, &wd);
        if norm * self.ceiling <= 1.0 {
            Ok(self.ceiling)
        } else {
            Ok(1.0 / norm)
        }
    }
}

/// MUSIC map at the dataset frequency `freq_index`.
///
/// The projection is applied to the normalized steering vector, which only
/// rescales the map monotonically and pins its lower bound at 1. Requires a
/// nonempty noise subspace (`M̂ < n_obs`).
pub fn music_map(
    scenario: &Scenario,
    dataset: &MSRDataset,
    freq_index: usize,
    grid: &ImagingGrid,
    opts: &MusicOptions,
) -> Result<ImagingMap> {
    let frame = dataset.frame(freq_index)?;
    let s = &frame.spectral;
    let m_hat = match opts.tau {
        Some(tau) => {
            let sigma: Vec<f64> = s.sigma.iter().copied().collect();
            estimate_signal_rank(&sigma, tau)?
        }
        None => s.m_hat,
    };
    let n_obs = s.u.nrows();
    if m_hat >= n_obs {
        return Err(Error::EmptyNoiseSubspace { m_hat, n_obs });
    }
    if !(opts.ceiling.is_finite() && opts.ceiling > 1.0) {
        return Err(Error::invalid(format!(
            "music ceiling must be finite and exceed 1, got {}",
            opts.ceiling
        )));
    }
    let music = MusicFrame {
        k_minus: scenario
            .medium
            .wavenumber(HalfSpace::Lower, frame.msr.omega)?,
        obs: DirectionTable::build(&scenario.observation, scenario.c_d, &scenario.medium, -1.0)?,
        u: s.u.clone(),
        m_hat,
        ceiling: opts.ceiling,
    };
    let values = eval_grid(grid, |x| music.value(x))?;
    Ok(ImagingMap {
        grid: *grid,
        values,
        method: MethodTag::Music {
            omega: frame.msr.omega,
            m_hat,
        },
        frequencies: vec![frame.msr.omega],
        noise: map_noise(dataset),
    })
}

/// `|W_Dᴴ · K · conj(W_H)|` evaluated directly from the matrix.
pub fn kirchhoff_form_direct(
    k: &DMatrix<Complex64>,
    wd: &DVector<Complex64>,
    wh: &DVector<Complex64>,
) -> f64 {
    let k_whc = k * wh.map(|z| z.conj());
    wd.dotc(&k_whc).norm()
}

/// `|Σ_m σ_m (W_Dᴴ U_m)(W_Hᴴ conj(V_m))|` over every singular triple;
/// algebraically identical to [`kirchhoff_form_direct`].
pub fn kirchhoff_form_svd(s: &SpectralData, wd: &DVector<Complex64>, wh: &DVector<Complex64>) -> f64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..s.p() {
        let u = s.u.column(m);
        let v_conj = s.v.column(m).map(|z| z.conj());
        sum += s.sigma[m] * wd.dotc(&u.into_owned()) * wh.dotc(&v_conj);
    }
    sum.norm()
}

struct KirchhoffFrame {
    k_minus: f64,
    obs: DirectionTable,
    inc: DirectionTable,
    k: DMatrix<Complex64>,
}

impl KirchhoffFrame {
    fn value(&self, x: Vector2<f64>) -> Result<f64> {
        let wd = self.obs.unit_steering(x, self.k_minus)?;
        let wh = self.inc.unit_steering(x, self.k_minus)?;
        Ok(kirchhoff_form_direct(&self.k, &wd, &wh))
    }
}

/// Kirchhoff migration map at the dataset frequency `freq_index`.
pub fn kirchhoff_map(
    scenario: &Scenario,
    dataset: &MSRDataset,
    freq_index: usize,
    grid: &ImagingGrid,
) -> Result<ImagingMap> {
    let frame = dataset.frame(freq_index)?;
    let kirchhoff = KirchhoffFrame {
        k_minus: scenario
            .medium
            .wavenumber(HalfSpace::Lower, frame.msr.omega)?,
        obs: DirectionTable::build(&scenario.observation, scenario.c_d, &scenario.medium, -1.0)?,
        inc: DirectionTable::build(&scenario.incidence, scenario.c_h, &scenario.medium, 1.0)?,
        k: frame.msr.data.clone(),
    };
    let values = eval_grid(grid, |x| kirchhoff.value(x))?;
    Ok(ImagingMap {
        grid: *grid,
        values,
        method: MethodTag::Kirchhoff {
            omega: frame.msr.omega,
        },
        frequencies: vec![frame.msr.omega],
        noise: map_noise(dataset),
    })
}
