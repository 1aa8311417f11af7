//! Singular value decomposition of MSR matrices and signal-rank estimation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::{self, MSRMatrix};
use crate::medium::Scenario;

/// Relative singular-value threshold used when none is supplied.
pub const DEFAULT_TAU: f64 = 0.1;

/// Thin SVD of one MSR matrix plus the estimated signal rank.
///
/// `u` is `n_obs × p`, `v` is `n_inc × p` with `p = min(n_obs, n_inc)`, and
/// `sigma` holds the `p` singular values in descending order. `K` is
/// recovered as `U · diag(σ) · Vᴴ`. Singular-vector phases are arbitrary;
/// downstream quantities pair `U` with `conj(V)` and stay phase-consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub u: DMatrix<Complex64>,
    pub sigma: DVector<f64>,
    pub v: DMatrix<Complex64>,
    /// Estimated signal rank `M̂ ≤ p`.
    pub m_hat: usize,
    pub omega: f64,
}

impl SpectralData {
    pub fn p(&self) -> usize {
        self.sigma.len()
    }

    /// Re-estimates the signal rank at threshold `tau`, optionally capping it.
    pub fn with_signal_rank(mut self, tau: f64, cap: Option<usize>) -> Result<Self> {
        let sigma: Vec<f64> = self.sigma.iter().copied().collect();
        let mut m_hat = estimate_signal_rank(&sigma, tau)?;
        if let Some(cap) = cap {
            m_hat = m_hat.min(cap);
        }
        self.m_hat = m_hat;
        Ok(self)
    }
}

/// Thin SVD with singular values sorted descending. The signal rank is
/// initialized at the default threshold [`DEFAULT_TAU`].
pub fn svd(m: &MSRMatrix) -> Result<SpectralData> {
    if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("matrix entries must be finite"));
    }
    let decomp = m.data.clone().svd(true, true);
    let u_raw = decomp.u.expect("svd requested u");
    let v_t = decomp.v_t.expect("svd requested v_t");
    let sv = decomp.singular_values;

    // sort triples by singular value, descending; ties keep original order
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap().then(a.cmp(&b)));

    let p = sv.len();
    let mut u = DMatrix::zeros(u_raw.nrows(), p);
    let mut v = DMatrix::zeros(v_t.ncols(), p);
    let mut sigma = DVector::zeros(p);
    for (new, &old) in order.iter().enumerate() {
        sigma[new] = sv[old];
        u.set_column(new, &u_raw.column(old));
        // rows of Vᴴ are conjugated columns of V
        for i in 0..v_t.ncols() {
            v[(i, new)] = v_t[(old, i)].conj();
        }
    }

    let sigma_vec: Vec<f64> = sigma.iter().copied().collect();
    let m_hat = estimate_signal_rank(&sigma_vec, DEFAULT_TAU)?;
    Ok(SpectralData {
        u,
        sigma,
        v,
        m_hat,
        omega: m.omega,
    })
}

/// Number of singular values at or above `tau · σ₁`.
///
/// Returns 0 for an all-zero spectrum. The input must be non-empty,
/// non-negative and sorted descending; `tau` must lie in `(0, 1)`.
pub fn estimate_signal_rank(sigma: &[f64], tau: f64) -> Result<usize> {
    if sigma.is_empty() {
        return Err(Error::invalid("singular value list must be non-empty"));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid(format!(
            "threshold tau must lie strictly between 0 and 1, got {tau}"
        )));
    }
    for w in sigma.windows(2) {
        if w[0] < w[1] {
            return Err(Error::invalid(
                "singular values must be sorted in descending order",
            ));
        }
    }
    if sigma.iter().any(|&s| s < 0.0 || !s.is_finite()) {
        return Err(Error::invalid("singular values must be finite and non-negative"));
    }
    let top = sigma[0];
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sigma.iter().take_while(|&&s| s >= tau * top).count())
}

/// First `m_hat` singular triples; the noise subspace is the orthogonal
/// complement of the returned left singular vectors.
pub fn signal_subspace(
    s: &SpectralData,
    m_hat: usize,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>, DVector<f64>)> {
    if m_hat == 0 || m_hat > s.p() {
        return Err(Error::invalid(format!(
            "signal rank must satisfy 0 < m_hat <= {}, got {m_hat}",
            s.p()
        )));
    }
    let u_cols = s.u.columns(0, m_hat).into_owned();
    let v_cols = s.v.columns(0, m_hat).into_owned();
    let sigma_head = s.sigma.rows(0, m_hat).into_owned();
    Ok((u_cols, v_cols, sigma_head))
}

/// One frequency of a dataset: the matrix and its decomposition.
#[derive(Debug, Clone)]
pub struct Frame {
    pub msr: MSRMatrix,
    pub spectral: SpectralData,
}

/// Per-frequency MSR matrices with their SVDs and estimated signal ranks,
/// ordered by ascending frequency.
#[derive(Debug, Clone)]
pub struct MSRDataset {
    frames: Vec<Frame>,
    /// Scenario-level `(seed, snr_db)` when the data carries noise.
    noise: Option<(u64, f64)>,
}

/// Knobs for dataset synthesis.
#[derive(Debug, Clone)]
pub struct SynthesisOptions {
    /// Force noiseless data even when the scenario specifies an SNR.
    pub noiseless: bool,
    pub seed_override: Option<u64>,
    pub snr_override: Option<f64>,
    /// Relative singular-value threshold for the signal rank.
    pub tau: f64,
    /// Optional cap on the estimated rank used by the imaging filter.
    pub rank_cap: Option<usize>,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            noiseless: false,
            seed_override: None,
            snr_override: None,
            tau: DEFAULT_TAU,
            rank_cap: None,
        }
    }
}

impl SynthesisOptions {
    pub fn noiseless() -> Self {
        Self {
            noiseless: true,
            ..Self::default()
        }
    }

    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed_override: Some(seed),
            ..Self::default()
        }
    }
}

impl MSRDataset {
    /// Wraps already-decomposed frames.
    pub fn from_parts(frames: Vec<Frame>, noise: Option<(u64, f64)>) -> Self {
        Self { frames, noise }
    }

    /// Decomposes already-synthesized matrices. `noise` records the
    /// scenario-level seed and SNR the matrices were drawn with, if any.
    pub fn from_matrices(
        matrices: Vec<MSRMatrix>,
        tau: f64,
        rank_cap: Option<usize>,
        noise: Option<(u64, f64)>,
    ) -> Result<Self> {
        let frames = matrices
            .into_iter()
            .map(|msr| {
                let spectral = svd(&msr)?.with_signal_rank(tau, rank_cap)?;
                Ok(Frame { msr, spectral })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { frames, noise })
    }

    /// Synthesizes matrices for every scenario frequency and decomposes them.
    pub fn synthesize(scenario: &Scenario, opts: &SynthesisOptions) -> Result<Self> {
        let matrices = forward::synthesize(
            scenario,
            opts.seed_override,
            opts.snr_override,
            opts.noiseless,
        )?;
        let snr = if opts.noiseless {
            None
        } else {
            opts.snr_override.or(scenario.snr_db)
        };
        let noise = snr.map(|snr_db| (opts.seed_override.unwrap_or(scenario.seed), snr_db));
        Self::from_matrices(matrices, opts.tau, opts.rank_cap, noise)
    }

    /// Scenario-level `(seed, snr_db)` the data was drawn with, if noisy.
    pub fn noise(&self) -> Option<(u64, f64)> {
        self.noise
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame(&self, index: usize) -> Result<&Frame> {
        self.frames.get(index).ok_or_else(|| {
            Error::invalid(format!(
                "frequency index {index} out of range ({} frequencies)",
                self.frames.len()
            ))
        })
    }
}
