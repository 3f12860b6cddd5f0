//! Adjustable regularizers.
//!
//! * The η-norm `Σ (η+w_i)σ_i / (η+w_iσ_i)` over singular values is a
//!   unitarily invariant rank surrogate: it tends to the rank as `η → 0` and to
//!   the nuclear norm as `η → ∞` (for unit weights).
//! * The τ-norm `Σ (1+τ)‖e_i‖² / (τ+‖e_i‖)` over rows interpolates between the
//!   L2,1 norm (`τ → 0`) and the squared Frobenius norm (`τ → ∞`).
//!
//! The η-norm proximal operator is solved per singular value by a
//! difference-of-convex iteration that linearizes the concave surrogate.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{self, SortedSvd};

/// Singular values below this are treated as exact zeros.
pub const SIGMA_ZERO: f64 = 1e-12;
/// Inner DC iteration cap.
pub const PROX_MAX_INNER: usize = 20;
/// Inner DC stopping threshold on `‖σ^{i+1} − σ^i‖_∞`.
pub const PROX_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NormError {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("singular value decomposition did not converge")]
    Svd,
}

pub type Result<T> = std::result::Result<T, NormError>;

/// Parameters of the η-norm.
///
/// `weights` is matched to the singular values by position; when the matrix
/// has more singular values than weights, the last weight is repeated.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaNormParams {
    eta: f64,
    weights: Vec<f64>,
}

impl EtaNormParams {
    pub fn new(eta: f64, weights: Vec<f64>) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(NormError::InvalidParam(format!("eta must be positive, got {eta}")));
        }
        if weights.is_empty() {
            return Err(NormError::InvalidParam("weight vector is empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(NormError::InvalidParam(format!("weights must be positive, got {w}")));
        }
        Ok(Self { eta, weights })
    }

    /// All-ones weights.
    pub fn uniform(eta: f64) -> Result<Self> {
        Self::new(eta, vec![1.0])
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.get(i).copied().unwrap_or_else(|| *self.weights.last().expect("weights are non-empty"))
    }
}

/// Parameters of the τ-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauNormParams {
    tau: f64,
}

impl TauNormParams {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(NormError::InvalidParam(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

fn clean(s: f64) -> f64 {
    if s < SIGMA_ZERO {
        0.0
    } else {
        s
    }
}

/// Surrogate `h(σ) = Σ (η+w_i)σ_i / (η+w_iσ_i)`.
pub fn h_value(sigma: &[f64], params: &EtaNormParams) -> f64 {
    let eta = params.eta;
    sigma
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let s = clean(s);
            let w = params.weight(i);
            (eta + w) * s / (eta + w * s)
        })
        .sum()
}

/// Elementwise derivative `(η+w_i)η / (η+w_iσ_i)²`.
pub fn h_gradient(sigma: &[f64], params: &EtaNormParams) -> Vec<f64> {
    let eta = params.eta;
    sigma
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let s = clean(s);
            let w = params.weight(i);
            let den = eta + w * s;
            (eta + w) * eta / (den * den)
        })
        .collect()
}

/// η-norm of a matrix.
pub fn eta_norm(m: &DMatrix<f64>, params: &EtaNormParams) -> Result<f64> {
    if !linalg::all_finite(m) {
        return Err(NormError::NonFinite);
    }
    if m.is_empty() {
        return Ok(0.0);
    }
    let s = linalg::singular_values(m).ok_or(NormError::Svd)?;
    Ok(h_value(s.as_slice(), params))
}

/// Value of the separable prox objective `h(σ) + (ω/2)‖σ − σ_A‖²`.
pub fn prox_objective(sigma: &[f64], sigma_a: &[f64], params: &EtaNormParams, omega: f64) -> f64 {
    let quad: f64 = sigma.iter().zip(sigma_a).map(|(s, a)| (s - a) * (s - a)).sum();
    h_value(sigma, params) + 0.5 * omega * quad
}

/// State of the inner DC iteration for one prox evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxWorkspace {
    /// Singular values of the prox argument, non-increasing.
    pub sigma_a: Vec<f64>,
    /// Current iterate.
    pub sigma_iter: Vec<f64>,
    /// Gradient of `h` at the current iterate.
    pub grad: Vec<f64>,
    pub omega: f64,
    /// Inner iterations performed.
    pub iterations: usize,
}

impl ProxWorkspace {
    /// Starts the iteration at `σ⁰ = σ_A`.
    pub fn new(sigma_a: Vec<f64>, omega: f64) -> Self {
        let sigma_iter = sigma_a.clone();
        let grad = vec![0.0; sigma_a.len()];
        Self { sigma_a, sigma_iter, grad, omega, iterations: 0 }
    }

    /// One linearize-and-minimize step `σ ← max(σ_A − g/ω, 0)`. Returns the
    /// max-abs change of the iterate.
    pub fn step(&mut self, params: &EtaNormParams) -> f64 {
        self.grad = h_gradient(&self.sigma_iter, params);
        let mut change = 0.0f64;
        for i in 0..self.sigma_a.len() {
            let next = (self.sigma_a[i] - self.grad[i] / self.omega).max(0.0);
            change = change.max((next - self.sigma_iter[i]).abs());
            self.sigma_iter[i] = next;
        }
        self.iterations += 1;
        change
    }

    /// Runs the DC iteration to tolerance, then, per coordinate, keeps the
    /// better of the DC fixed point and the boundary point `σ = 0`.
    ///
    /// Each coordinate's objective is a concave function plus a convex
    /// quadratic, so it has at most one interior local minimum; the DC
    /// iteration from `σ_A` finds that one, and the comparison with zero
    /// recovers the global minimum when the boundary wins.
    pub fn solve(&mut self, params: &EtaNormParams) {
        for _ in 0..PROX_MAX_INNER {
            if self.step(params) < PROX_TOL {
                break;
            }
        }
        for i in 0..self.sigma_a.len() {
            let s = self.sigma_iter[i];
            if s == 0.0 {
                continue;
            }
            let a = self.sigma_a[i];
            let w = params.weight(i);
            let at_s = (params.eta + w) * s / (params.eta + w * s) + 0.5 * self.omega * (s - a) * (s - a);
            let at_zero = 0.5 * self.omega * a * a;
            if at_zero < at_s {
                self.sigma_iter[i] = 0.0;
            }
        }
    }
}

/// Solves the separable singular-value problem `argmin_σ≥0 h(σ) + (ω/2)‖σ − σ_A‖²`.
pub fn prox_singular_values(sigma_a: &[f64], params: &EtaNormParams, omega: f64) -> ProxWorkspace {
    let mut ws = ProxWorkspace::new(sigma_a.to_vec(), omega);
    ws.solve(params);
    ws
}

/// Moreau–Yosida operator of the η-norm: `argmin_M ‖M‖_η + (ω/2)‖M − A‖_F²`.
pub fn eta_prox(a: &DMatrix<f64>, params: &EtaNormParams, omega: f64) -> Result<DMatrix<f64>> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(NormError::InvalidParam(format!("omega must be positive, got {omega}")));
    }
    if !linalg::all_finite(a) {
        return Err(NormError::NonFinite);
    }
    if a.is_empty() {
        return Ok(a.clone());
    }
    let svd = SortedSvd::compute(a).ok_or(NormError::Svd)?;
    let ws = prox_singular_values(svd.singular_values.as_slice(), params, omega);
    Ok(svd.recompose(&ws.sigma_iter))
}

fn row_norms(e: &DMatrix<f64>) -> impl Iterator<Item = f64> + '_ {
    e.row_iter().map(|r| r.norm())
}

/// τ-norm of a matrix, summed over rows.
pub fn tau_norm(e: &DMatrix<f64>, params: &TauNormParams) -> f64 {
    let tau = params.tau;
    row_norms(e).map(|r| (1.0 + tau) * r * r / (tau + r)).sum()
}

/// Diagonal of the τ-norm weight matrix, `(1+τ)(‖e_i‖+2τ)/(‖e_i‖+τ)²`.
pub fn tau_weights(e: &DMatrix<f64>, params: &TauNormParams) -> DVector<f64> {
    let tau = params.tau;
    DVector::from_iterator(
        e.nrows(),
        row_norms(e).map(|r| (1.0 + tau) * (r + 2.0 * tau) / ((r + tau) * (r + tau))),
    )
}

/// The τ-norm weight matrix as a dense diagonal matrix.
pub fn tau_weight_matrix(e: &DMatrix<f64>, params: &TauNormParams) -> DMatrix<f64> {
    DMatrix::from_diagonal(&tau_weights(e, params))
}

/// Gradient of the τ-norm, `D_E · E`.
pub fn tau_gradient(e: &DMatrix<f64>, params: &TauNormParams) -> DMatrix<f64> {
    let d = tau_weights(e, params);
    let mut g = e.clone();
    for (i, mut row) in g.row_iter_mut().enumerate() {
        row *= d[i];
    }
    g
}
