//! Density-bounded random edge weights on the complete graph.
//!
//! A weight assignment is one real per unordered vertex pair, each drawn
//! independently from a law whose density is bounded by `phi` and whose
//! support lies in `[-1, 1]`. Two noise models are provided: a uniform
//! window of length `1/phi` around a base weight, and a gaussian around the
//! base weight rejection-truncated to `[-1, 1]`. Sampling is keyed by
//! `(master_seed, trial, pair index)` so sweeps are reproducible and
//! parallelizable without shared state.

use crate::rng::{keyed_rng, DOMAIN_EDGE_WEIGHTS};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

#[derive(Debug, Error, PartialEq)]
pub enum WeightError {
    #[error("phi must be positive, got {0}")]
    InvalidPhi(f64),
    #[error("uniform window 1/phi = {0} does not fit inside [-1, 1]")]
    WindowTooWide(f64),
    #[error("sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("base weight for pair ({u}, {v}) is {value}, outside [-1, 1]")]
    BaseOutOfRange { u: u32, v: u32, value: f64 },
    #[error("vertex count must be at least 2, got {0}")]
    TooFewVertices(usize),
    #[error("base weights are for n = {base_n}, instance has n = {n}")]
    BaseSizeMismatch { base_n: usize, n: usize },
    #[error("base weight line {line}: {msg}")]
    BaseParse { line: usize, msg: String },
}

/// Index of the unordered pair `{u, v}` in row-major upper-triangular order.
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u != v && u < n && v < n);
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Number of unordered pairs on `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Enumerates unordered pairs in the same order as [`pair_index`].
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
}

/// Original (pre-noise) edge weights, one per unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseWeights {
    n: usize,
    vals: Vec<f64>,
}

impl BaseWeights {
    pub fn zero(n: usize) -> Self {
        BaseWeights {
            n,
            vals: vec![0.0; pair_count(n)],
        }
    }

    pub fn from_pairs(
        n: usize,
        entries: impl IntoIterator<Item = (u32, u32, f64)>,
    ) -> Result<Self, WeightError> {
        let mut base = Self::zero(n);
        for (u, v, w) in entries {
            if u == v || u as usize >= n || v as usize >= n {
                return Err(WeightError::BaseParse {
                    line: 0,
                    msg: format!("invalid pair ({u}, {v}) for n = {n}"),
                });
            }
            if !(-1.0..=1.0).contains(&w) {
                return Err(WeightError::BaseOutOfRange { u, v, value: w });
            }
            base.vals[pair_index(n, u as usize, v as usize)] = w;
        }
        Ok(base)
    }

    /// Parses the "u v w" per-line format; unlisted pairs default to 0.
    pub fn parse(text: &str, n: usize) -> Result<Self, WeightError> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse_err = |msg: &str| WeightError::BaseParse {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            let u: u32 = it
                .next()
                .ok_or_else(|| parse_err("missing u"))?
                .parse()
                .map_err(|_| parse_err("bad u"))?;
            let v: u32 = it
                .next()
                .ok_or_else(|| parse_err("missing v"))?
                .parse()
                .map_err(|_| parse_err("bad v"))?;
            let w: f64 = it
                .next()
                .ok_or_else(|| parse_err("missing w"))?
                .parse()
                .map_err(|_| parse_err("bad w"))?;
            if it.next().is_some() {
                return Err(parse_err("trailing tokens"));
            }
            entries.push((u, v, w));
        }
        Self::from_pairs(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.vals[pair_index(self.n, u, v)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseKind {
    /// Uniform on a window of length `1/phi` placed around the base weight.
    UniformWindow { phi: f64 },
    /// Normal(base, sigma^2) rejection-truncated to `[-1, 1]`.
    TruncatedGaussian { sigma: f64 },
}

/// A noise law together with its density bound and master seed.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightModel {
    kind: NoiseKind,
    base: Option<BaseWeights>,
    master_seed: u64,
    phi: f64,
}

impl WeightModel {
    /// Uniform-window noise. Requires `phi >= 1/2` so the window fits
    /// inside `[-1, 1]`.
    pub fn uniform_window(phi: f64, master_seed: u64) -> Result<Self, WeightError> {
        if !(phi > 0.0) || !phi.is_finite() {
            return Err(WeightError::InvalidPhi(phi));
        }
        let window = 1.0 / phi;
        if window > 2.0 {
            return Err(WeightError::WindowTooWide(window));
        }
        Ok(WeightModel {
            kind: NoiseKind::UniformWindow { phi },
            base: None,
            master_seed,
            phi,
        })
    }

    /// Truncated-gaussian noise; `phi` is set to the exact supremum of the
    /// truncated density (over all pairs).
    pub fn truncated_gaussian(sigma: f64, master_seed: u64) -> Result<Self, WeightError> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(WeightError::InvalidSigma(sigma));
        }
        let phi = truncated_gaussian_sup(sigma, 0.0);
        Ok(WeightModel {
            kind: NoiseKind::TruncatedGaussian { sigma },
            base: None,
            master_seed,
            phi,
        })
    }

    /// Attaches base weights; recomputes the stored density bound.
    pub fn with_base(mut self, base: BaseWeights) -> Result<Self, WeightError> {
        for (u, v) in pairs(base.n) {
            let b = base.get(u, v);
            if !(-1.0..=1.0).contains(&b) {
                return Err(WeightError::BaseOutOfRange {
                    u: u as u32,
                    v: v as u32,
                    value: b,
                });
            }
        }
        if let NoiseKind::TruncatedGaussian { sigma } = self.kind {
            self.phi = base
                .vals
                .iter()
                .map(|&b| truncated_gaussian_sup(sigma, b))
                .fold(f64::MIN, f64::max);
        }
        self.base = Some(base);
        Ok(self)
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    /// Supremum of the per-pair density.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn descriptor(&self) -> String {
        match self.kind {
            NoiseKind::UniformWindow { phi } => format!("uniform(phi={phi})"),
            NoiseKind::TruncatedGaussian { sigma } => format!("gaussian(sigma={sigma})"),
        }
    }
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// Mass that Normal(base, sigma^2) puts on `[-1, 1]`.
pub fn truncation_mass(sigma: f64, base: f64) -> f64 {
    normal_cdf((1.0 - base) / sigma) - normal_cdf((-1.0 - base) / sigma)
}

/// Supremum of the Normal(base, sigma^2) density truncated to `[-1, 1]`.
/// The mode stays at `base` for `base` in `[-1, 1]`.
pub fn truncated_gaussian_sup(sigma: f64, base: f64) -> f64 {
    1.0 / (sigma * SQRT_2PI * truncation_mass(sigma, base))
}

/// Density of the truncated gaussian at `x` (for tests and reports).
pub fn truncated_gaussian_density(sigma: f64, base: f64, x: f64) -> f64 {
    if !(-1.0..=1.0).contains(&x) {
        return 0.0;
    }
    let z = (x - base) / sigma;
    (-0.5 * z * z).exp() / (sigma * SQRT_2PI * truncation_mass(sigma, base))
}

/// A sampled symmetric weight assignment; one value per unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    n: usize,
    x: Vec<f64>,
}

impl EdgeWeights {
    pub fn new(n: usize, x: Vec<f64>) -> Self {
        assert_eq!(x.len(), pair_count(n));
        EdgeWeights { n, x }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, vec![0.0; pair_count(n)])
    }

    /// Builds weights from explicit (u, v, x) entries; missing pairs are 0.
    pub fn from_pairs(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut w = Self::zero(n);
        for &(u, v, x) in entries {
            w.x[pair_index(n, u, v)] = x;
        }
        w
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.x[pair_index(self.n, u, v)]
    }

    #[cfg(test)]
    fn set(&mut self, u: usize, v: usize, x: f64) {
        let idx = pair_index(self.n, u, v);
        self.x[idx] = x;
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    /// Sum of all pair weights (the constant offset between the cut value
    /// and the Hamiltonian).
    pub fn total(&self) -> f64 {
        self.x.iter().sum()
    }
}

/// Outcome of [`validate_weights`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum WeightsCheck {
    Ok,
    Violation { u: u32, v: u32, value: f64, reason: String },
}

impl WeightsCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, WeightsCheck::Ok)
    }
}

/// Confirms every entry is finite and in `[-1, 1]`; symmetry is structural
/// (one stored value per unordered pair). Reports the first offending pair.
pub fn validate_weights(w: &EdgeWeights) -> WeightsCheck {
    for (u, v) in pairs(w.n) {
        let x = w.get(u, v);
        if !x.is_finite() {
            return WeightsCheck::Violation {
                u: u as u32,
                v: v as u32,
                value: x,
                reason: "non-finite".to_string(),
            };
        }
        if !(-1.0..=1.0).contains(&x) {
            return WeightsCheck::Violation {
                u: u as u32,
                v: v as u32,
                value: x,
                reason: "outside [-1, 1]".to_string(),
            };
        }
    }
    WeightsCheck::Ok
}

/// Window of length `1/phi` centered at `base`, translated (never clipped)
/// to fit inside `[-1, 1]`. Translation keeps the density exactly `phi` on
/// the support; clipping would create atoms.
fn window_low(base: f64, window: f64) -> f64 {
    let lo = base - window / 2.0;
    lo.clamp(-1.0, 1.0 - window)
}

/// Draws one weight assignment. Each pair's value is a pure function of
/// `(master_seed, trial, pair index)`.
pub fn sample_weights(
    model: &WeightModel,
    n: usize,
    trial: u64,
) -> Result<EdgeWeights, WeightError> {
    if n < 2 {
        return Err(WeightError::TooFewVertices(n));
    }
    if let Some(base) = &model.base {
        if base.n != n {
            return Err(WeightError::BaseSizeMismatch { base_n: base.n, n });
        }
    }
    let m = pair_count(n);
    let mut x = Vec::with_capacity(m);
    for (u, v) in pairs(n) {
        let idx = pair_index(n, u, v);
        let b = model.base.as_ref().map_or(0.0, |bw| bw.vals[idx]);
        let mut rng = keyed_rng(DOMAIN_EDGE_WEIGHTS, model.master_seed, trial, idx as u64);
        let value = match model.kind {
            NoiseKind::UniformWindow { phi } => {
                let window = 1.0 / phi;
                window_low(b, window) + rng.random::<f64>() * window
            }
            NoiseKind::TruncatedGaussian { sigma } => {
                let normal = Normal::new(b, sigma).expect("validated sigma");
                loop {
                    let cand = normal.sample(&mut rng);
                    if (-1.0..=1.0).contains(&cand) {
                        break cand;
                    }
                }
            }
        };
        x.push(value);
    }
    Ok(EdgeWeights { n, x })
}
