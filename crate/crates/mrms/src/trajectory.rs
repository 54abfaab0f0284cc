use crate::linalg::Vector;
use crate::stepper::StepDiagnostics;

/// Instrumentation collected by an integration run.
///
/// Counters make the cost structure checkable: a cached MRMS run performs
/// exactly two fresh matrix-vector products per step after warm-up, and a
/// BDF run on a constant matrix factorizes exactly once.
#[derive(Clone, Debug, Default)]
pub struct RunStats {
    /// Fresh sparse matrix-vector products performed during the run.
    pub matvecs: u64,
    /// Banded LU factorizations performed during the run.
    pub factorizations: u64,
    /// Time spent assembling the per-step data (matvecs, W and g, right-hand sides).
    pub assembly_seconds: f64,
    /// Time spent in the per-step solve (least squares or backsubstitution).
    pub solve_seconds: f64,
    /// Time spent factorizing.
    pub factor_seconds: f64,
    /// Wall-clock time of the whole run.
    pub total_seconds: f64,
}

/// States produced by an integration, one per computed step, plus run statistics.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
    /// Per-step least-squares diagnostics; empty for BDF runs.
    pub diagnostics: Vec<StepDiagnostics>,
    pub stats: RunStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn final_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    pub fn final_state(&self) -> Option<&Vector> {
        self.states.last()
    }
}
