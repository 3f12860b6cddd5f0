//! Alternating augmented-Lagrangian solver.
//!
//! Every view `v` self-represents its presented samples, `X = XZ + E`, and
//! the embedded representation `WᵀZW` is split into a shared heredity matrix
//! `M` and a per-view variation matrix `N` through `WᵀZW − M + pN = 0`. The
//! variation matrices define per-view graphs whose spectral embeddings `F`
//! are pulled toward a consensus embedding `H`.
//!
//! [`Solver`] owns the (optionally normalized) data and hyper-parameters and
//! exposes each block update separately; [`fit`] runs the full loop:
//!
//! ```text
//! repeat
//!     for each view v: Z, (N, ζ), E, F, multipliers and penalty
//!     M, H
//! until the objective ratio stops changing or max_iter is reached
//! ```

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::IncompleteDataset;
use crate::graph::GraphLaplacian;
use crate::linalg;
use crate::norms::{self, EtaNormParams, TauNormParams};

/// Floor applied to the objective-ratio denominator.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SolverError {
    #[error("invalid hyper-parameter: {0}")]
    InvalidParams(String),
    #[error("{c} clusters requested but view {view} presents only {m} samples")]
    TooManyClusters { c: usize, view: usize, m: usize },
    #[error("non-finite values after {step}{} in iteration {iteration}", view.map(|v| format!(" (view {v})")).unwrap_or_default())]
    NonFinite { step: &'static str, view: Option<usize>, iteration: usize },
    #[error("numerical failure in {0}")]
    Numerical(&'static str),
}

pub type Result<T> = std::result::Result<T, SolverError>;

/// How the indicator matrices `F` and `H` are initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initialization {
    /// `H` = the `c` smallest Laplacian eigenvectors of `Σ_v Wᵀ|Z₀|W`, where
    /// `Z₀` is the first representation iterate from an all-zero state, and
    /// every `F` starts at `H`.
    Spectral,
    /// Seeded Gaussian matrices, orthonormalized.
    Random,
}

/// Model and schedule parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Weight of the graph-smoothness (alignment) term.
    pub alpha: f64,
    /// Weight of the τ-norm error penalty.
    pub beta: f64,
    /// Weight of the embedding-agreement term.
    pub gamma: f64,
    /// Scale of the variation matrix in the decomposition constraint.
    pub p: f64,
    pub eta: f64,
    pub tau: f64,
    /// Per-singular-value weights of the η-norm; the last entry is repeated.
    pub weights: Vec<f64>,
    pub omega0: f64,
    pub phi: f64,
    pub omega_max: f64,
    pub max_iter: usize,
    /// Relative change of the objective ratio below which the loop stops.
    pub tol: f64,
    /// Cluster count; `None` uses the dataset's.
    pub clusters: Option<usize>,
    pub seed: u64,
    pub init: Initialization,
    /// Scale each presented sample to unit Euclidean norm before solving.
    pub normalize_samples: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            alpha: 1e-3,
            beta: 1e-4,
            gamma: 1e-1,
            p: 1.0,
            eta: 1e-3,
            tau: 1e-2,
            weights: vec![1.0],
            omega0: 1e-3,
            phi: 1.5,
            omega_max: 1e6,
            max_iter: 100,
            tol: 1e-6,
            clusters: None,
            seed: 0,
            init: Initialization::Spectral,
            normalize_samples: true,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SolverError::InvalidParams(m));
        for (name, value) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(value >= 0.0 && value.is_finite()) {
                return bad(format!("{name} must be finite and non-negative, got {value}"));
            }
        }
        if self.p == 0.0 || !self.p.is_finite() {
            return bad(format!("p must be finite and non-zero, got {}", self.p));
        }
        if !(self.phi > 1.0 && self.phi.is_finite()) {
            return bad(format!("phi must exceed 1, got {}", self.phi));
        }
        if !(self.omega0 > 0.0 && self.omega0 <= self.omega_max && self.omega_max.is_finite()) {
            return bad(format!("need 0 < omega0 <= omega_max, got {} and {}", self.omega0, self.omega_max));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if let Some(c) = self.clusters {
            if c < 2 {
                return bad(format!("cluster count must be at least 2, got {c}"));
            }
        }
        self.eta_params()?;
        self.tau_params()?;
        Ok(())
    }

    pub fn eta_params(&self) -> Result<EtaNormParams> {
        EtaNormParams::new(self.eta, self.weights.clone()).map_err(|e| SolverError::InvalidParams(e.to_string()))
    }

    pub fn tau_params(&self) -> Result<TauNormParams> {
        TauNormParams::new(self.tau).map_err(|e| SolverError::InvalidParams(e.to_string()))
    }
}

/// All iterates of the alternating loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    /// Shared heredity matrix, `n × n`.
    pub m: DMatrix<f64>,
    /// Per-view variation matrices, `n × n`.
    pub n: Vec<DMatrix<f64>>,
    /// Per-view representations, `m_v × m_v`.
    pub z: Vec<DMatrix<f64>>,
    /// Per-view errors, `d_v × m_v`.
    pub e: Vec<DMatrix<f64>>,
    /// Per-view indicator matrices, `n × c`.
    pub f: Vec<DMatrix<f64>>,
    /// Consensus indicator, `n × c`.
    pub h: DMatrix<f64>,
    /// Multipliers of the self-representation constraint, `d_v × m_v`.
    pub c1: Vec<DMatrix<f64>>,
    /// Multipliers of the decomposition constraint, `n × n`.
    pub c2: Vec<DMatrix<f64>>,
    /// Row-sum multipliers of the variation matrices.
    pub zeta: Vec<DVector<f64>>,
    pub omega: f64,
    pub iter: usize,
}

/// Intermediate matrices of the variation and error steps, reused across views.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepScratch {
    /// `WᵀZW − M + C₂/ω`.
    pub k: DMatrix<f64>,
    /// Squared distances between rows of `F`.
    pub t: DMatrix<f64>,
    /// Unclamped candidate for `N`.
    pub y: DMatrix<f64>,
    /// Diagonal of the τ-norm weight matrix used by the error step.
    pub d_e: DVector<f64>,
}

/// The objective ratio and every raw term it is built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTerms {
    /// `‖M‖_η`.
    pub rank_term: f64,
    /// `β‖E‖_τ` per view.
    pub error_terms: Vec<f64>,
    /// `α Tr(FᵀL_N F)` per view.
    pub smoothness_terms: Vec<f64>,
    /// `γ ‖FᵀH‖_F²` per view (enters the numerator with a minus sign).
    pub agreement_terms: Vec<f64>,
    /// `‖X − XZ − E‖_F` per view.
    pub self_residuals: Vec<f64>,
    /// `‖WᵀZW − M + pN‖_F` per view.
    pub decomposition_residuals: Vec<f64>,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// One row of the convergence trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration number.
    pub iteration: usize,
    pub objective_ratio: f64,
    /// Relative change of the ratio against the previous iteration.
    pub relative_change: Option<f64>,
    pub numerator: f64,
    pub denominator: f64,
    pub max_self_residual: f64,
    pub max_decomposition_residual: f64,
    /// Largest `|Σ_j N_ij − 1|` over views and rows.
    pub max_row_sum_violation: f64,
    pub omega: f64,
    pub terms: ObjectiveTerms,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
}

impl ConvergenceTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}

/// Result of [`fit`].
#[derive(Debug, Clone)]
pub struct FitResult {
    pub state: SolverState,
    pub trace: ConvergenceTrace,
    /// Whether the tolerance was met before `max_iter`.
    pub converged: bool,
}

impl FitResult {
    pub fn iterations(&self) -> usize {
        self.state.iter
    }
}

/// Data, parameters and cached factorizations for one solve.
#[derive(Debug, Clone)]
pub struct Solver {
    data: IncompleteDataset,
    params: Hyperparams,
    eta: EtaNormParams,
    tau: TauNormParams,
    c: usize,
    /// Cholesky factors of `I + XᵀX` per view.
    gram: Vec<Cholesky<f64, Dyn>>,
}

impl Solver {
    pub fn new(data: &IncompleteDataset, params: &Hyperparams) -> Result<Self> {
        params.validate()?;
        let c = params.clusters.unwrap_or(data.n_clusters());
        if c > data.n_samples() {
            return Err(SolverError::InvalidParams(format!("{c} clusters for {} samples", data.n_samples())));
        }
        let data = if params.normalize_samples { data.normalized_samples() } else { data.clone() };
        let gram = data
            .views()
            .iter()
            .map(|x| {
                let g = DMatrix::identity(x.ncols(), x.ncols()) + x.transpose() * x;
                Cholesky::new(g).ok_or(SolverError::Numerical("factorizing I + XᵀX"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { eta: params.eta_params()?, tau: params.tau_params()?, params: params.clone(), data, c, gram })
    }

    /// The data the solver works on (normalized if requested).
    pub fn data(&self) -> &IncompleteDataset {
        &self.data
    }

    pub fn params(&self) -> &Hyperparams {
        &self.params
    }

    pub fn clusters(&self) -> usize {
        self.c
    }

    /// Zero iterates, zero multipliers, `ω = ω₀`, orthonormal indicators.
    pub fn init_state(&self) -> Result<SolverState> {
        let data = &self.data;
        for v in 0..data.n_views() {
            let m = data.index(v).len();
            if self.c > m {
                return Err(SolverError::TooManyClusters { c: self.c, view: v, m });
            }
        }
        let n = data.n_samples();
        let n_views = data.n_views();
        let (f, h) = match self.params.init {
            Initialization::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
                let f: Vec<DMatrix<f64>> =
                    (0..n_views).map(|_| linalg::random_orthonormal(n, self.c, &mut rng)).collect();
                let h = linalg::random_orthonormal(n, self.c, &mut rng);
                (f, h)
            }
            Initialization::Spectral => {
                let mut s = DMatrix::zeros(n, n);
                for v in 0..n_views {
                    let x = data.view(v);
                    let z0 = self.gram[v].solve(&(x.transpose() * x));
                    data.index(v).scatter_add(&z0.abs(), 1.0, &mut s);
                }
                let lap = GraphLaplacian::from_variation(&s);
                let (_, vecs) = linalg::smallest_eigenvectors(&lap.laplacian, self.c)
                    .ok_or(SolverError::Numerical("spectral initialization"))?;
                let h = linalg::orthonormalize(&vecs);
                (vec![h.clone(); n_views], h)
            }
        };
        Ok(SolverState {
            m: DMatrix::zeros(n, n),
            n: vec![DMatrix::zeros(n, n); n_views],
            z: data.indices().iter().map(|w| DMatrix::zeros(w.len(), w.len())).collect(),
            e: data.views().iter().map(|x| DMatrix::zeros(x.nrows(), x.ncols())).collect(),
            f,
            h,
            c1: data.views().iter().map(|x| DMatrix::zeros(x.nrows(), x.ncols())).collect(),
            c2: vec![DMatrix::zeros(n, n); n_views],
            zeta: vec![DVector::zeros(n); n_views],
            omega: self.params.omega0,
            iter: 0,
        })
    }

    /// `WᵀZW` for view `v`.
    fn embedded_z(&self, state: &SolverState, v: usize) -> DMatrix<f64> {
        self.data.index(v).scatter(&state.z[v])
    }

    /// Point at which the heredity prox is evaluated: the mean over views of
    /// `WᵀZW + pN + C₂/ω`.
    pub fn m_target(&self, state: &SolverState) -> DMatrix<f64> {
        let n = self.data.n_samples();
        let n_views = self.data.n_views();
        let mut a = DMatrix::zeros(n, n);
        for v in 0..n_views {
            self.data.index(v).scatter_add(&state.z[v], 1.0, &mut a);
            a += &state.n[v] * self.params.p + &state.c2[v] / state.omega;
        }
        a / n_views as f64
    }

    /// Heredity step: η-norm prox at [`Self::m_target`] with penalty `n_v·ω`.
    pub fn update_m(&self, state: &mut SolverState) -> Result<()> {
        let a = self.m_target(state);
        let penalty = state.omega * self.data.n_views() as f64;
        state.m = norms::eta_prox(&a, &self.eta, penalty).map_err(|_| SolverError::Numerical("heredity prox"))?;
        Ok(())
    }

    /// Right-hand side `Xᵀ(X − E + C₁/ω) + W(M − pN − C₂/ω)Wᵀ` of the
    /// representation step.
    fn z_rhs(&self, state: &SolverState, v: usize) -> DMatrix<f64> {
        let x = self.data.view(v);
        let w = self.data.index(v);
        let omega = state.omega;
        let target = x - &state.e[v] + &state.c1[v] / omega;
        let coupling = &state.m - &state.n[v] * self.params.p - &state.c2[v] / omega;
        x.transpose() * target + w.gather(&coupling)
    }

    /// Representation step: `Z = (I + XᵀX)⁻¹ (Xᵀ(X − E + C₁/ω) + W(M − pN − C₂/ω)Wᵀ)`.
    pub fn update_z(&self, state: &mut SolverState, v: usize) -> Result<()> {
        state.z[v] = self.gram[v].solve(&self.z_rhs(state, v));
        Ok(())
    }

    /// Gradient of the representation subproblem (divided by ω) at the
    /// current `Z`: `Z − W(M − pN − C₂/ω)Wᵀ − Xᵀ(X − XZ − E + C₁/ω)`.
    pub fn z_gradient(&self, state: &SolverState, v: usize) -> DMatrix<f64> {
        let x = self.data.view(v);
        let w = self.data.index(v);
        let omega = state.omega;
        let coupling = &state.m - &state.n[v] * self.params.p - &state.c2[v] / omega;
        let residual = x - x * &state.z[v] - &state.e[v] + &state.c1[v] / omega;
        &state.z[v] - w.gather(&coupling) - x.transpose() * residual
    }

    /// Variation step for view `v`: closed-form row-wise minimizer with the
    /// row-sum multiplier, clamped to a nonnegative, zero-diagonal matrix.
    pub fn update_n_zeta(&self, state: &mut SolverState, v: usize, scratch: &mut StepScratch) -> Result<()> {
        let n = self.data.n_samples();
        let omega = state.omega;
        let p = self.params.p;
        let mut k = self.embedded_z(state, v) - &state.m;
        k += &state.c2[v] / omega;
        scratch.t = linalg::row_sq_distances(&state.f[v]);
        scratch.k = k;
        let b = unconstrained_variation(&scratch.k, &scratch.t, self.params.alpha, p, omega);
        let zeta = row_sum_multiplier(&b, p, omega);
        scratch.y = variation_candidate_from(&b, &zeta, p, omega);
        let mut nv = scratch.y.map(|y| y.max(0.0));
        for i in 0..n {
            nv[(i, i)] = 0.0;
        }
        state.n[v] = nv;
        state.zeta[v] = zeta;
        Ok(())
    }

    /// Error step for view `v`: each row of `X − XZ + C₁/ω` is shrunk by
    /// `1/(1 + (β/ω) D_ii)`, with the τ-norm weights `D` taken at the previous `E`.
    pub fn update_e(&self, state: &mut SolverState, v: usize, scratch: &mut StepScratch) -> Result<()> {
        let x = self.data.view(v);
        let omega = state.omega;
        scratch.d_e = norms::tau_weights(&state.e[v], &self.tau);
        let mut e = x - x * &state.z[v] + &state.c1[v] / omega;
        for (i, mut row) in e.row_iter_mut().enumerate() {
            row /= 1.0 + self.params.beta / omega * scratch.d_e[i];
        }
        state.e[v] = e;
        Ok(())
    }

    /// Matrix whose `c` smallest eigenvectors give `F⁽ᵛ⁾`: `αL_N − γHHᵀ`, symmetrized.
    pub fn f_matrix(&self, state: &SolverState, v: usize) -> DMatrix<f64> {
        let lap = GraphLaplacian::from_variation(&state.n[v]);
        let hh = &state.h * state.h.transpose();
        linalg::symmetrize(&(lap.laplacian * self.params.alpha - hh * self.params.gamma))
    }

    /// Indicator step for view `v`. Returns the selected eigenvalues.
    pub fn update_f(&self, state: &mut SolverState, v: usize) -> Result<DVector<f64>> {
        let a = self.f_matrix(state, v);
        let (values, vectors) =
            linalg::smallest_eigenvectors(&a, self.c).ok_or(SolverError::Numerical("indicator eigenproblem"))?;
        state.f[v] = vectors;
        Ok(values)
    }

    /// Matrix whose `c` largest eigenvectors give `H`: `γ Σ_v F Fᵀ`, symmetrized.
    pub fn h_matrix(&self, state: &SolverState) -> DMatrix<f64> {
        let n = self.data.n_samples();
        let mut g = DMatrix::zeros(n, n);
        for f in &state.f {
            g += f * f.transpose();
        }
        linalg::symmetrize(&(g * self.params.gamma))
    }

    /// Consensus step. Returns the selected eigenvalues (largest first).
    pub fn update_h(&self, state: &mut SolverState) -> Result<DVector<f64>> {
        let g = self.h_matrix(state);
        let (values, vectors) =
            linalg::largest_eigenvectors(&g, self.c).ok_or(SolverError::Numerical("consensus eigenproblem"))?;
        state.h = vectors;
        Ok(values)
    }

    /// Dual ascent for view `v`, then `ω ← min(φω, ω_max)`.
    pub fn update_multipliers(&self, state: &mut SolverState, v: usize) {
        let x = self.data.view(v);
        let omega = state.omega;
        let r1 = x - x * &state.z[v] - &state.e[v];
        let r2 = self.embedded_z(state, v) - &state.m + &state.n[v] * self.params.p;
        state.c1[v] += r1 * omega;
        state.c2[v] += r2 * omega;
        state.omega = (self.params.phi * omega).min(self.params.omega_max);
    }

    /// Objective ratio (regularizers over squared constraint residuals) with
    /// its individual terms.
    pub fn objective(&self, state: &SolverState) -> Result<ObjectiveTerms> {
        let params = &self.params;
        let rank_term = norms::eta_norm(&state.m, &self.eta).map_err(|_| SolverError::Numerical("heredity norm"))?;
        let n_views = self.data.n_views();
        let mut terms = ObjectiveTerms {
            rank_term,
            error_terms: Vec::with_capacity(n_views),
            smoothness_terms: Vec::with_capacity(n_views),
            agreement_terms: Vec::with_capacity(n_views),
            self_residuals: Vec::with_capacity(n_views),
            decomposition_residuals: Vec::with_capacity(n_views),
            numerator: rank_term,
            denominator: 0.0,
            ratio: 0.0,
        };
        for v in 0..n_views {
            let x = self.data.view(v);
            let f = &state.f[v];
            let lap = GraphLaplacian::from_variation(&state.n[v]);
            let error = params.beta * norms::tau_norm(&state.e[v], &self.tau);
            let smooth = params.alpha * (f.transpose() * &lap.laplacian * f).trace();
            let agree = params.gamma * (f.transpose() * &state.h).norm_squared();
            let r1 = (x - x * &state.z[v] - &state.e[v]).norm();
            let r2 = (self.embedded_z(state, v) - &state.m + &state.n[v] * params.p).norm();
            terms.numerator += error + smooth - agree;
            terms.denominator += r1 * r1 + r2 * r2;
            terms.error_terms.push(error);
            terms.smoothness_terms.push(smooth);
            terms.agreement_terms.push(agree);
            terms.self_residuals.push(r1);
            terms.decomposition_residuals.push(r2);
        }
        terms.ratio = terms.numerator / terms.denominator.max(DENOMINATOR_FLOOR);
        Ok(terms)
    }

    /// Largest `|Σ_j N_ij − 1|` over all views.
    pub fn row_sum_violation(&self, state: &SolverState) -> f64 {
        state
            .n
            .iter()
            .flat_map(|nv| nv.row_iter().map(|r| (r.sum() - 1.0).abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    /// One full sweep over all blocks.
    pub fn iterate(&self, state: &mut SolverState, scratch: &mut StepScratch) -> Result<()> {
        let iteration = state.iter + 1;
        let check = |ok: bool, step: &'static str, view: Option<usize>| {
            if ok {
                Ok(())
            } else {
                Err(SolverError::NonFinite { step, view, iteration })
            }
        };
        for v in 0..self.data.n_views() {
            self.update_z(state, v)?;
            check(linalg::all_finite(&state.z[v]), "update_z", Some(v))?;
            self.update_n_zeta(state, v, scratch)?;
            check(linalg::all_finite(&state.n[v]), "update_n_zeta", Some(v))?;
            self.update_e(state, v, scratch)?;
            check(linalg::all_finite(&state.e[v]), "update_e", Some(v))?;
            self.update_f(state, v)?;
            check(linalg::all_finite(&state.f[v]), "update_f", Some(v))?;
            self.update_multipliers(state, v);
            check(
                linalg::all_finite(&state.c1[v]) && linalg::all_finite(&state.c2[v]),
                "update_multipliers",
                Some(v),
            )?;
        }
        self.update_m(state)?;
        check(linalg::all_finite(&state.m), "update_m", None)?;
        self.update_h(state)?;
        check(linalg::all_finite(&state.h), "update_h", None)?;
        state.iter = iteration;
        Ok(())
    }

    /// Runs the loop from [`Self::init_state`] until the objective ratio's
    /// relative change drops below `tol` or `max_iter` sweeps are done.
    pub fn run(&self) -> Result<FitResult> {
        let mut state = self.init_state()?;
        let mut scratch = StepScratch::default();
        let mut trace = ConvergenceTrace::default();
        let mut previous: Option<f64> = None;
        let mut converged = false;
        while state.iter < self.params.max_iter {
            self.iterate(&mut state, &mut scratch)?;
            let terms = self.objective(&state)?;
            if !terms.ratio.is_finite() {
                return Err(SolverError::NonFinite { step: "objective", view: None, iteration: state.iter });
            }
            let relative_change = previous.map(|prev| (terms.ratio - prev).abs() / prev.abs().max(DENOMINATOR_FLOOR));
            trace.records.push(IterationRecord {
                iteration: state.iter,
                objective_ratio: terms.ratio,
                relative_change,
                numerator: terms.numerator,
                denominator: terms.denominator,
                max_self_residual: terms.self_residuals.iter().copied().fold(0.0, f64::max),
                max_decomposition_residual: terms.decomposition_residuals.iter().copied().fold(0.0, f64::max),
                max_row_sum_violation: self.row_sum_violation(&state),
                omega: state.omega,
                terms: terms.clone(),
            });
            previous = Some(terms.ratio);
            if relative_change.is_some_and(|r| r < self.params.tol) {
                converged = true;
                break;
            }
        }
        Ok(FitResult { state, trace, converged })
    }
}

/// Runs the full solver on `data`.
pub fn fit(data: &IncompleteDataset, params: &Hyperparams) -> Result<FitResult> {
    Solver::new(data, params)?.run()
}

/// `−K/p − α/(2p²ω) T` with a zero diagonal: the variation candidate before
/// the row-sum multiplier is added.
pub fn unconstrained_variation(k: &DMatrix<f64>, t: &DMatrix<f64>, alpha: f64, p: f64, omega: f64) -> DMatrix<f64> {
    let n = k.nrows();
    let mut b = k * (-1.0 / p) - t * (alpha / (2.0 * p * p * omega));
    for i in 0..n {
        b[(i, i)] = 0.0;
    }
    b
}

/// Row-sum multiplier making every unclamped row of the candidate sum to one:
/// `ζ_i = (ωp²/(n−1)) (1 − Σ_{j≠i} B_ij)`.
pub fn row_sum_multiplier(b: &DMatrix<f64>, p: f64, omega: f64) -> DVector<f64> {
    let n = b.nrows();
    let scale = omega * p * p / (n as f64 - 1.0);
    DVector::from_iterator(n, b.row_iter().map(|r| scale * (1.0 - r.sum())))
}

/// `B + ζ_i/(p²ω)` added to every off-diagonal entry of row `i`.
fn variation_candidate_from(b: &DMatrix<f64>, zeta: &DVector<f64>, p: f64, omega: f64) -> DMatrix<f64> {
    let n = b.nrows();
    let mut y = b.clone();
    for i in 0..n {
        let shift = zeta[i] / (p * p * omega);
        for j in 0..n {
            if j != i {
                y[(i, j)] += shift;
            }
        }
    }
    y
}

/// Unclamped variation candidate for a given multiplier vector:
/// `Y_ij = −K_ij/p − α/(2p²ω) T_ij + ζ_i/(p²ω)` off the diagonal, zero on it.
pub fn variation_candidate(
    k: &DMatrix<f64>,
    t: &DMatrix<f64>,
    zeta: &DVector<f64>,
    alpha: f64,
    p: f64,
    omega: f64,
) -> DMatrix<f64> {
    variation_candidate_from(&unconstrained_variation(k, t, alpha, p, omega), zeta, p, omega)
}
