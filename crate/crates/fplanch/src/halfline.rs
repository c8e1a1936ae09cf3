//! Grids and sampled functions on the positive semiaxis.
//!
//! Everything lives on a log-uniform grid: nodes xi_k = e^{eta_k} with eta_k
//! uniform on [eta_min, eta_max]. Quadrature is the trapezoid rule in eta,
//! which after the change of variables d xi = e^eta d eta gives weights
//! w_k = xi_k * h (halved at the two ends).

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default verification window. The left end is deep enough that the test
/// family (exponentials e^{-a xi} with a >= 0.5, Gaussian bumps in eta) has
/// sub-1e-8 mass outside, which the transform round-trips require.
pub const DEFAULT_ETA_MIN: f64 = -36.0;
pub const DEFAULT_ETA_MAX: f64 = 12.0;
pub const DEFAULT_N: usize = 4096;

/// Default mu window. Entries and Gamma factors decay like e^{-pi mu}; the
/// node count keeps the sampled eigenvalue curve dense enough to fill the
/// spectrum segment to under 1e-3.
pub const DEFAULT_MU_MAX: f64 = 20.0;
pub const DEFAULT_MU_NODES: usize = 8192;

/// Log-uniform grid on the positive semiaxis with trapezoid quadrature
/// weights for integrals in the xi variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    eta_min: f64,
    eta_max: f64,
    n: usize,
    step: f64,
    eta: Vec<f64>,
    xi: Vec<f64>,
    weights: Vec<f64>,
}

impl LogGrid {
    pub fn new(eta_min: f64, eta_max: f64, n: usize) -> Result<Self> {
        if !eta_min.is_finite() || !eta_max.is_finite() || eta_min >= eta_max {
            return Err(Error::InvalidArgument(format!(
                "log grid needs eta_min < eta_max, got [{eta_min}, {eta_max}]"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "log grid needs at least 2 nodes, got {n}"
            )));
        }
        let step = (eta_max - eta_min) / (n - 1) as f64;
        let eta: Vec<f64> = (0..n).map(|k| eta_min + step * k as f64).collect();
        let xi: Vec<f64> = eta.iter().map(|e| e.exp()).collect();
        let mut weights: Vec<f64> = xi.iter().map(|x| x * step).collect();
        weights[0] *= 0.5;
        weights[n - 1] *= 0.5;
        debug_assert!(xi.iter().all(|&x| x > 0.0));
        Ok(Self {
            eta_min,
            eta_max,
            n,
            step,
            eta,
            xi,
            weights,
        })
    }

    pub fn default_verification() -> Arc<Self> {
        Arc::new(Self::new(DEFAULT_ETA_MIN, DEFAULT_ETA_MAX, DEFAULT_N).expect("valid defaults"))
    }

    pub fn eta_min(&self) -> f64 {
        self.eta_min
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Uniform spacing in the logarithmic variable.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Grids are compatible when they share the same layout parameters.
    pub fn same_layout(&self, other: &Self) -> bool {
        self.eta_min == other.eta_min && self.eta_max == other.eta_max && self.n == other.n
    }
}

/// Complex samples of a function on a `LogGrid`.
#[derive(Debug, Clone)]
pub struct HalfLineFunction {
    grid: Arc<LogGrid>,
    values: Vec<Complex64>,
}

impl HalfLineFunction {
    pub fn new(grid: Arc<LogGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples on a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite sample at node {bad}"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<LogGrid>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.xi().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn zero(grid: Arc<LogGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }
}

/// Quadrature inner product <x, y> = sum x_k conj(y_k) w_k, linear in the
/// first slot and conjugate-linear in the second.
pub fn inner_product(x: &HalfLineFunction, y: &HalfLineFunction) -> Result<Complex64> {
    if !x.grid().same_layout(y.grid()) {
        return Err(Error::GridMismatch(
            "inner product of functions on different grids".into(),
        ));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for ((a, b), w) in x.values().iter().zip(y.values()).zip(x.grid().weights()) {
        acc += a * b.conj() * w;
    }
    Ok(acc)
}

/// Quadrature squared norm; the imaginary residue of <x,x> is discarded
/// (it is zero up to rounding).
pub fn norm_sq(x: &HalfLineFunction) -> f64 {
    x.values()
        .iter()
        .zip(x.grid().weights())
        .map(|(v, w)| v.norm_sqr() * w)
        .sum()
}

/// Quadrature value of the integral of |x(xi)| xi^{-1/2} d xi, the membership
/// diagnostic for the dense subspace on which the channel transforms are
/// classical integrals. Always finite on a finite grid.
pub fn in_domain_d(x: &HalfLineFunction) -> f64 {
    x.values()
        .iter()
        .zip(x.grid().xi())
        .zip(x.grid().weights())
        .map(|((v, xi), w)| v.norm() / xi.sqrt() * w)
        .sum()
}

/// The exponential test family e_a(xi) = e^{-a xi}, a > 0.
pub fn exp_fn(a: f64, grid: &Arc<LogGrid>) -> Result<HalfLineFunction> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "exponential rate must be positive and finite, got {a}"
        )));
    }
    HalfLineFunction::from_fn(grid.clone(), |xi| Complex64::new((-a * xi).exp(), 0.0))
}

/// Uniform grid of mu values on [0, mu_max] for the model space channels.
///
/// The degenerate single-node grid (m = 1, mu_max = 0) is allowed; it carries
/// the matrix at mu = 0 only.
#[derive(Debug, Clone, PartialEq)]
pub struct MuGrid {
    mu_max: f64,
    m: usize,
    step: f64,
    nodes: Vec<f64>,
}

impl MuGrid {
    pub fn new(mu_max: f64, m: usize) -> Result<Self> {
        let degenerate = m == 1 && mu_max == 0.0;
        if !degenerate && (!(mu_max > 0.0) || !mu_max.is_finite() || m < 2) {
            return Err(Error::InvalidArgument(format!(
                "mu grid needs mu_max > 0 and m >= 2 (or the degenerate m=1, mu_max=0), got mu_max={mu_max}, m={m}"
            )));
        }
        let step = if degenerate { 0.0 } else { mu_max / (m - 1) as f64 };
        let nodes = (0..m).map(|j| step * j as f64).collect();
        Ok(Self {
            mu_max,
            m,
            step,
            nodes,
        })
    }

    pub fn default_verification() -> Arc<Self> {
        Arc::new(Self::new(DEFAULT_MU_MAX, DEFAULT_MU_NODES).expect("valid defaults"))
    }

    pub fn mu_max(&self) -> f64 {
        self.mu_max
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Trapezoid weight of node j for integrals over [0, mu_max].
    pub fn weight(&self, j: usize) -> f64 {
        if self.m == 1 {
            return 1.0;
        }
        if j == 0 || j == self.m - 1 {
            0.5 * self.step
        } else {
            self.step
        }
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.mu_max == other.mu_max && self.m == other.m
    }
}
