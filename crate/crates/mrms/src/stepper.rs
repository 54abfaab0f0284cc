//! The MRMS(k, p) stepper for linear non-autonomous systems.
//!
//! A step searches the 2k-dimensional subspace spanned by the columns of
//! `V = [-y_0 | ... | -y_(k-1) | tau f_0 | ... | tau f_(k-1)]` for the vector
//! minimizing the residual of the underlying p-step BDF formula. For a linear
//! system this reduces to the thin least-squares problem
//! `min || W gamma - g ||_2` with
//!
//! ```text
//! W = (tau A(t_k) - c_k I) V,
//! g = sum_(j=1..p) c_(k-j) y_(k-j) - tau b(t_k),
//! ```
//!
//! after which `y_k = V gamma`. When the matrix and the step size are
//! constant, the products `A y_j` and `A f_j` from previous steps are cached
//! so that only two fresh matrix-vector multiplications are needed per step.

use std::collections::VecDeque;
use std::time::Instant;

use crate::bdf::{bdf_coefficients, bdf_rhs, BdfScheme};
use crate::error::{Error, Result};
use crate::linalg::{least_squares_min_norm, DenseThinMatrix, SparseMatrixCsc, Vector};
use crate::problems::LinearProblem;
use crate::trajectory::{RunStats, Trajectory};

struct HistoryEntry {
    t: f64,
    y: Vector,
    f: Vector,
    /// Cached `A y` / `A f`, valid only while the matrix stays constant.
    ay: Option<Vector>,
    af: Option<Vector>,
}

/// The k most recent `(t_j, y_j, f_j)` triples at uniform spacing `tau`,
/// ordered oldest to newest, plus cached matrix-vector products.
pub struct HistoryWindow {
    tau: f64,
    entries: VecDeque<HistoryEntry>,
}

impl HistoryWindow {
    /// Seeds a window from raw states; `f_j = A(t_j) y_j + b(t_j)` is
    /// computed here (and not counted in any run statistics).
    pub fn from_states(
        problem: &LinearProblem,
        t0: f64,
        tau: f64,
        states: Vec<Vector>,
    ) -> Result<Self> {
        if !(tau > 0.0) || states.is_empty() {
            return Err(Error::InvalidInput(format!(
                "history needs tau > 0 and at least one state (tau = {tau}, states = {})",
                states.len()
            )));
        }
        let mut entries = VecDeque::with_capacity(states.len());
        for (j, y) in states.into_iter().enumerate() {
            if y.len() != problem.dim() {
                return Err(Error::DimensionMismatch {
                    context: "history state",
                    expected: problem.dim(),
                    actual: y.len(),
                });
            }
            if !y.is_finite() {
                return Err(Error::NonFinite {
                    context: "history state",
                });
            }
            let t = t0 + j as f64 * tau;
            let f = problem.f_at(t, &y)?;
            entries.push_back(HistoryEntry {
                t,
                y,
                f,
                ay: None,
                af: None,
            });
        }
        Ok(HistoryWindow { tau, entries })
    }

    /// Ingests explicit `(t_j, y_j, f_j)` triples, verifying uniform spacing
    /// and consistency of each `f_j` with the problem right-hand side.
    pub fn from_triples(
        problem: &LinearProblem,
        tau: f64,
        triples: Vec<(f64, Vector, Vector)>,
    ) -> Result<Self> {
        if !(tau > 0.0) || triples.is_empty() {
            return Err(Error::InvalidInput(
                "history needs tau > 0 and at least one triple".into(),
            ));
        }
        let t0 = triples[0].0;
        let mut entries = VecDeque::with_capacity(triples.len());
        for (j, (t, y, f)) in triples.into_iter().enumerate() {
            let expected_t = t0 + j as f64 * tau;
            if (t - expected_t).abs() > 1e-12 * tau.max(t.abs()) {
                return Err(Error::InvalidInput(format!(
                    "history times not uniformly spaced: t_{j} = {t}, expected {expected_t}"
                )));
            }
            let f_check = problem.f_at(t, &y)?;
            let diff = f_check.sub(&f).norm_inf();
            if diff > 1e-8 * (1.0 + f_check.norm_inf()) {
                return Err(Error::InvalidInput(format!(
                    "history derivative f_{j} inconsistent with A(t) y + b(t) (deviation {diff:.3e})"
                )));
            }
            entries.push_back(HistoryEntry {
                t,
                y,
                f,
                ay: None,
                af: None,
            });
        }
        Ok(HistoryWindow { tau, entries })
    }

    /// Window width k.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Time of the newest entry.
    pub fn last_time(&self) -> f64 {
        self.entries.back().expect("history never empty").t
    }

    pub fn states(&self) -> impl Iterator<Item = &Vector> {
        self.entries.iter().map(|e| &e.y)
    }

    pub fn triple(&self, j: usize) -> (f64, &Vector, &Vector) {
        let e = &self.entries[j];
        (e.t, &e.y, &e.f)
    }

    /// Fills missing cached products `A y_j`, `A f_j` against a constant
    /// matrix; returns how many fresh matvecs that took.
    fn ensure_products(&mut self, a: &SparseMatrixCsc) -> Result<u64> {
        let mut fresh = 0;
        for e in &mut self.entries {
            if e.ay.is_none() {
                e.ay = Some(a.matvec(&e.y)?);
                fresh += 1;
            }
            if e.af.is_none() {
                e.af = Some(a.matvec(&e.f)?);
                fresh += 1;
            }
        }
        Ok(fresh)
    }

    fn advance(&mut self, t: f64, y: Vector, f: Vector, ay: Option<Vector>) {
        self.entries.pop_front();
        self.entries.push_back(HistoryEntry {
            t,
            y,
            f,
            ay,
            af: None,
        });
    }
}

/// Shape of an MRMS(k, p) method: window width k, BDF order p (p <= min(k, 6)),
/// and whether to cache `A V` columns across steps when the matrix and step
/// size are constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MrmsConfig {
    pub k: usize,
    pub p: usize,
    pub cache_av: bool,
}

impl MrmsConfig {
    pub fn new(k: usize, p: usize) -> Result<Self> {
        let config = MrmsConfig {
            k,
            p,
            cache_av: true,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.p == 0 || self.p > self.k || self.p > 6 {
            return Err(Error::InvalidInput(format!(
                "MRMS(k, p) needs 1 <= p <= min(k, 6), got k = {}, p = {}",
                self.k, self.p
            )));
        }
        Ok(())
    }
}

/// Per-step least-squares diagnostics.
#[derive(Clone, Debug)]
pub struct StepDiagnostics {
    /// `||W gamma - g||_2 = ||r(y_k)||_2`.
    pub residual_norm: f64,
    /// Numerical rank of W.
    pub ls_rank: usize,
    /// The 2k minimizing coefficients (alpha block, then beta block).
    pub gamma: Vector,
}

/// `V = [-y_0 | ... | -y_(k-1) | tau f_0 | ... | tau f_(k-1)]`, an n-by-2k matrix.
pub fn assemble_v(history: &HistoryWindow) -> DenseThinMatrix {
    let k = history.len();
    let n = history.entries[0].y.len();
    let tau = history.tau;
    let mut v = DenseThinMatrix::zeros(n, 2 * k);
    for (j, e) in history.entries.iter().enumerate() {
        let col_y = v.col_mut(j);
        for (dst, src) in col_y.iter_mut().zip(e.y.iter()) {
            *dst = -src;
        }
    }
    for (j, e) in history.entries.iter().enumerate() {
        let col_f = v.col_mut(k + j);
        for (dst, src) in col_f.iter_mut().zip(e.f.iter()) {
            *dst = tau * src;
        }
    }
    v
}

/// `W = (tau A(t_k) - c_k I) V` and `g = sum_j c_(k-j) y_(k-j) - tau b(t_k)`.
///
/// Cached `A`-products stored in the history are reused when present;
/// missing ones are computed on the fly (without being stored).
pub fn assemble_w_g(
    problem: &LinearProblem,
    t_k: f64,
    history: &HistoryWindow,
    scheme: &BdfScheme,
) -> Result<(DenseThinMatrix, Vector)> {
    let a = problem.matrix_at(t_k);
    let (w, g, _b, _fresh) = assemble_w_g_impl(problem, &a, t_k, history, scheme)?;
    Ok((w, g))
}

fn assemble_w_g_impl(
    problem: &LinearProblem,
    a: &SparseMatrixCsc,
    t_k: f64,
    history: &HistoryWindow,
    scheme: &BdfScheme,
) -> Result<(DenseThinMatrix, Vector, Vector, u64)> {
    let k = history.len();
    let p = scheme.order();
    if p > k {
        return Err(Error::InvalidInput(format!(
            "BDF order {p} exceeds history width {k}"
        )));
    }
    let n = history.entries[0].y.len();
    let tau = history.tau;
    let ck = scheme.leading();
    let mut fresh = 0u64;

    let mut w = DenseThinMatrix::zeros(n, 2 * k);
    let mut scratch;
    for j in 0..2 * k {
        let e = &history.entries[j % k];
        let (src, cached, scale) = if j < k {
            (&e.y, e.ay.as_ref(), -1.0)
        } else {
            (&e.f, e.af.as_ref(), tau)
        };
        let av = match cached {
            Some(av) => av,
            None => {
                scratch = a.matvec(src)?;
                fresh += 1;
                &scratch
            }
        };
        let col = w.col_mut(j);
        for i in 0..n {
            col[i] = scale * (tau * av[i] - ck * src[i]);
        }
    }

    let b_tk = problem.forcing_at(t_k);
    let g = bdf_rhs(scheme, history.states().skip(k - p), tau, &b_tk);
    Ok((w, g, b_tk, fresh))
}

/// One MRMS step: assembles W and g, solves the thin least-squares problem,
/// forms `y_k = V gamma` and advances the history window (drop oldest,
/// append `(t_k, y_k, f_k)`).
pub fn mrms_step(
    problem: &LinearProblem,
    history: &mut HistoryWindow,
    config: &MrmsConfig,
    scheme: &BdfScheme,
) -> Result<(Vector, StepDiagnostics)> {
    let mut stats = RunStats::default();
    step_impl(problem, history, config, scheme, &mut stats)
}

fn step_impl(
    problem: &LinearProblem,
    history: &mut HistoryWindow,
    config: &MrmsConfig,
    scheme: &BdfScheme,
    stats: &mut RunStats,
) -> Result<(Vector, StepDiagnostics)> {
    config.validate()?;
    if history.len() != config.k {
        return Err(Error::InvalidInput(format!(
            "history width {} does not match k = {}",
            history.len(),
            config.k
        )));
    }
    if scheme.order() != config.p {
        return Err(Error::InvalidInput(format!(
            "scheme order {} does not match p = {}",
            scheme.order(),
            config.p
        )));
    }

    let tau = history.tau;
    let t_k = history.last_time() + tau;
    // cached A-products are only valid while A stays constant
    let caching = config.cache_av && problem.is_autonomous_matrix();

    let assembly_started = Instant::now();
    let a = problem.matrix_at(t_k);
    if caching {
        stats.matvecs += history.ensure_products(&a)?;
    }
    let (w, g, b_tk, fresh) = assemble_w_g_impl(problem, &a, t_k, history, scheme)?;
    stats.matvecs += fresh;
    stats.assembly_seconds += assembly_started.elapsed().as_secs_f64();

    let solve_started = Instant::now();
    let ls = least_squares_min_norm(&w, &g, None)?;
    stats.solve_seconds += solve_started.elapsed().as_secs_f64();

    let post_started = Instant::now();
    // y_k = V gamma, accumulated column by column
    let k = config.k;
    let n = g.len();
    let mut y = Vector::zeros(n);
    for j in 0..2 * k {
        let e = &history.entries[j % k];
        let (src, scale) = if j < k { (&e.y, -1.0) } else { (&e.f, tau) };
        y.axpy(ls.gamma[j] * scale, src);
    }
    let ay = a.matvec(&y)?;
    stats.matvecs += 1;
    let mut f = ay.clone();
    f.axpy(1.0, &b_tk);
    history.advance(t_k, y.clone(), f, caching.then_some(ay));
    stats.assembly_seconds += post_started.elapsed().as_secs_f64();

    let diagnostics = StepDiagnostics {
        residual_norm: ls.residual_norm,
        ls_rank: ls.rank,
        gamma: ls.gamma,
    };
    Ok((y, diagnostics))
}

/// Fixed-step MRMS(k, p) integration; the history window is advanced in
/// place, and the trajectory carries per-step diagnostics plus the wall-clock
/// split between assembly (matvecs) and the least-squares solves.
pub fn mrms_integrate(
    problem: &LinearProblem,
    history: &mut HistoryWindow,
    config: &MrmsConfig,
    steps: usize,
) -> Result<Trajectory> {
    let run_started = Instant::now();
    config.validate()?;
    let scheme = bdf_coefficients(config.p)?;
    let mut trajectory = Trajectory::default();
    let mut stats = RunStats::default();
    for s in 0..steps {
        let (y, diag) =
            step_impl(problem, history, config, &scheme, &mut stats).map_err(|e| match e {
                Error::AtStep { .. } => e,
                other => other.at_step(s),
            })?;
        trajectory.times.push(history.last_time());
        trajectory.states.push(y);
        trajectory.diagnostics.push(diag);
    }
    stats.total_seconds = run_started.elapsed().as_secs_f64();
    trajectory.stats = stats;
    Ok(trajectory)
}
