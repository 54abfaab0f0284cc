//! BDF coefficients for orders 1 through 6, and the classical fixed-step BDF
//! integrator used as the baseline (and as the residual definition for the
//! minimal residual steppers).

use std::collections::VecDeque;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{BandedMatrix, Vector};
use crate::problems::LinearProblem;
use crate::stepper::HistoryWindow;
use crate::trajectory::{RunStats, Trajectory};

/// A p-step BDF formula `c_k y_k + ... + c_(k-p) y_(k-p) = tau f_k`.
///
/// Coefficients are stored oldest to newest, normalized as the derivative
/// weights at the rightmost of p + 1 uniformly spaced nodes. They sum to
/// zero (exactness on constants) and satisfy `sum_j c_j * j = 1` on the
/// unit-spaced node scale (exactness on linear polynomials).
#[derive(Clone, Debug, PartialEq)]
pub struct BdfScheme {
    p: usize,
    coeffs: Vec<f64>,
}

impl BdfScheme {
    pub fn order(&self) -> usize {
        self.p
    }

    /// `c_(k-p), ..., c_k`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// The leading coefficient `c_k`.
    pub fn leading(&self) -> f64 {
        self.coeffs[self.p]
    }

    /// `c_(k-j)` for `j = 1..=p`.
    pub fn trailing(&self, j: usize) -> f64 {
        self.coeffs[self.p - j]
    }
}

/// Derivative weights at the rightmost node, from the backward-difference
/// expansion `tau y'(t_k) = sum_(m=1..p) (1/m) (backward difference)^m y_k`.
pub fn bdf_coefficients(p: usize) -> Result<BdfScheme> {
    if !(1..=6).contains(&p) {
        return Err(Error::InvalidOrder { p });
    }
    let mut c = vec![0.0f64; p + 1]; // c[j] multiplies y_(k-j) here
    for m in 1..=p {
        // (1 - z)^m expanded: coefficient of y_(k-j) is (-1)^j C(m, j)
        let mut binom = 1.0f64;
        for j in 0..=m {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            c[j] += sign * binom / m as f64;
            binom = binom * (m - j) as f64 / (j + 1) as f64;
        }
    }
    c.reverse(); // oldest -> newest
    Ok(BdfScheme { p, coeffs: c })
}

/// `g = sum_(j=1..p) c_(k-j) y_(k-j) - tau b(t_k)` for states ordered oldest
/// to newest (`recent[i]` holding `y_(k-p+i)`).
pub(crate) fn bdf_rhs(
    scheme: &BdfScheme,
    recent: impl Iterator<Item = impl std::ops::Deref<Target = Vector>>,
    tau: f64,
    b_tk: &Vector,
) -> Vector {
    let mut g = Vector::zeros(b_tk.len());
    for (i, y) in recent.enumerate() {
        g.axpy(scheme.coefficients()[i], &y);
    }
    g.axpy(-tau, b_tk);
    g
}

/// Fixed-step BDF(p) integration of a linear problem.
///
/// Each step solves `(tau A(t_k) - c_k I) y_k = sum_j c_(k-j) y_(k-j) - tau b(t_k)`
/// through the banded factorization. For a constant matrix the factorization
/// is computed once and reused across all steps; a time-dependent matrix is
/// refactorized at every step.
///
/// `history` must hold at least `p` consistent starting values; the last `p`
/// are used.
pub fn bdf_integrate(
    problem: &LinearProblem,
    history: &HistoryWindow,
    steps: usize,
    p: usize,
) -> Result<Trajectory> {
    let run_start = Instant::now();
    let scheme = bdf_coefficients(p)?;
    if history.len() < p {
        return Err(Error::InvalidInput(format!(
            "BDF({p}) needs {p} starting values, history holds {}",
            history.len()
        )));
    }
    let tau = history.tau();
    let t0 = history.last_time();
    let mut window: VecDeque<Vector> = history.states().skip(history.len() - p).cloned().collect();

    let mut stats = RunStats::default();
    let mut trajectory = Trajectory::default();

    let mut factorization = None;
    if problem.is_autonomous_matrix() {
        let started = Instant::now();
        let shifted = BandedMatrix::from_scaled_csc(&problem.matrix_at(t0), tau, -scheme.leading());
        factorization = Some(shifted.factor().map_err(|e| e.at_step(0))?);
        stats.factor_seconds = started.elapsed().as_secs_f64();
        stats.factorizations = 1;
    }

    for s in 0..steps {
        let t_k = t0 + (s + 1) as f64 * tau;

        let assembly_started = Instant::now();
        let b = problem.forcing_at(t_k);
        let rhs = bdf_rhs(&scheme, window.iter(), tau, &b);
        stats.assembly_seconds += assembly_started.elapsed().as_secs_f64();

        if !problem.is_autonomous_matrix() {
            let started = Instant::now();
            let shifted =
                BandedMatrix::from_scaled_csc(&problem.matrix_at(t_k), tau, -scheme.leading());
            factorization = Some(shifted.factor().map_err(|e| e.at_step(s))?);
            stats.factor_seconds += started.elapsed().as_secs_f64();
            stats.factorizations += 1;
        }

        let solve_started = Instant::now();
        let y = factorization
            .as_ref()
            .expect("factorization present")
            .solve(&rhs)
            .map_err(|e| e.at_step(s))?;
        stats.solve_seconds += solve_started.elapsed().as_secs_f64();

        window.pop_front();
        window.push_back(y.clone());
        trajectory.times.push(t_k);
        trajectory.states.push(y);
    }

    stats.total_seconds = run_start.elapsed().as_secs_f64();
    trajectory.stats = stats;
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrixCsc;
    use crate::problems::{diagonal_matrix, zero_problem};
    use crate::stepper::HistoryWindow;

    /// Vandermonde oracle: derivative weights at the rightmost of p + 1
    /// unit-spaced nodes, solved as a dense linear system.
    fn vandermonde_weights(p: usize) -> Vec<f64> {
        let n = p + 1;
        let mut a = vec![vec![0.0; n]; n];
        let mut b = vec![0.0; n];
        for m in 0..n {
            for (j, row) in a[m].iter_mut().enumerate() {
                *row = (j as f64).powi(m as i32);
            }
            b[m] = if m == 0 {
                0.0
            } else {
                m as f64 * (p as f64).powi(m as i32 - 1)
            };
        }
        // dense Gaussian elimination with partial pivoting
        for j in 0..n {
            let mut ip = j;
            for i in j + 1..n {
                if a[i][j].abs() > a[ip][j].abs() {
                    ip = i;
                }
            }
            a.swap(j, ip);
            b.swap(j, ip);
            for i in j + 1..n {
                let m = a[i][j] / a[j][j];
                for c in j..n {
                    a[i][c] -= m * a[j][c];
                }
                b[i] -= m * b[j];
            }
        }
        for j in (0..n).rev() {
            let mut s = b[j];
            for c in j + 1..n {
                s -= a[j][c] * b[c];
            }
            b[j] = s / a[j][j];
        }
        b
    }

    #[test]
    fn order_one_is_implicit_euler() {
        let s = bdf_coefficients(1).unwrap();
        assert_eq!(s.coefficients(), &[-1.0, 1.0]);
    }

    #[test]
    fn order_two_matches_vandermonde_oracle() {
        let s = bdf_coefficients(2).unwrap();
        let oracle = vandermonde_weights(2);
        for (c, o) in s.coefficients().iter().zip(&oracle) {
            assert!((c - o).abs() < 1e-13);
        }
        assert_eq!(s.coefficients(), &[0.5, -2.0, 1.5]);
    }

    #[test]
    fn order_six_matches_vandermonde_oracle() {
        let s = bdf_coefficients(6).unwrap();
        let oracle = vandermonde_weights(6);
        // the oracle's Vandermonde system has condition ~1e5
        for (c, o) in s.coefficients().iter().zip(&oracle) {
            assert!((c - o).abs() < 1e-10);
        }
        assert!((s.leading() - 49.0 / 20.0).abs() < 1e-14);
    }

    #[test]
    fn orders_outside_one_to_six_are_rejected() {
        assert!(matches!(
            bdf_coefficients(0),
            Err(Error::InvalidOrder { p: 0 })
        ));
        assert!(matches!(
            bdf_coefficients(7),
            Err(Error::InvalidOrder { p: 7 })
        ));
    }

    #[test]
    fn scheme_invariants_hold_for_all_orders() {
        for p in 1..=6 {
            let s = bdf_coefficients(p).unwrap();
            let sum: f64 = s.coefficients().iter().sum();
            assert!(sum.abs() < 1e-13, "p = {p}: coefficients sum to {sum}");
            assert!(s.leading() != 0.0);
            let first_moment: f64 = s
                .coefficients()
                .iter()
                .enumerate()
                .map(|(j, c)| c * j as f64)
                .sum();
            assert!((first_moment - 1.0).abs() < 1e-13);
        }
    }

    // polynomial exactness: sum_j c_j (j tau)^q = tau q (p tau)^(q-1) for q <= p
    #[test]
    fn polynomial_exactness_up_to_order() {
        let tau = 0.37;
        for p in 1..=6usize {
            let s = bdf_coefficients(p).unwrap();
            for q in 0..=p {
                let lhs: f64 = s
                    .coefficients()
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * (j as f64 * tau).powi(q as i32))
                    .sum();
                let rhs = if q == 0 {
                    0.0
                } else {
                    tau * q as f64 * (p as f64 * tau).powi(q as i32 - 1)
                };
                let scale = rhs.abs().max(1.0);
                assert!(
                    (lhs - rhs).abs() < 1e-12 * scale,
                    "p = {p}, q = {q}: {lhs} vs {rhs}"
                );
            }
        }
    }

    fn seeded_history(problem: &LinearProblem, t0: f64, tau: f64, count: usize) -> HistoryWindow {
        let states: Vec<Vector> = (0..count)
            .map(|i| problem.exact_at(t0 + i as f64 * tau).unwrap())
            .collect();
        HistoryWindow::from_states(problem, t0, tau, states).unwrap()
    }

    #[test]
    fn zero_problem_stays_constant() {
        let problem = zero_problem(3);
        let y0 = Vector::from(vec![1.0, -2.0, 0.5]);
        let history = HistoryWindow::from_states(&problem, 0.0, 0.1, vec![y0.clone()]).unwrap();
        let trajectory = bdf_integrate(&problem, &history, 25, 1).unwrap();
        for state in &trajectory.states {
            for i in 0..3 {
                assert_eq!(state[i], y0[i]);
            }
        }
    }

    #[test]
    fn scalar_step_matches_implicit_euler_closed_form() {
        let lambda = -4.0;
        let tau = 0.25;
        let a = diagonal_matrix(&[lambda]);
        let problem = LinearProblem::constant(a, |_| Vector::zeros(1), None);
        let y0 = Vector::from(vec![3.0]);
        let history = HistoryWindow::from_states(&problem, 0.0, tau, vec![y0]).unwrap();
        let trajectory = bdf_integrate(&problem, &history, 1, 1).unwrap();
        let expected = 3.0 / (1.0 - tau * lambda);
        assert!((trajectory.states[0][0] - expected).abs() < 1e-14);
    }

    #[test]
    fn constant_matrix_factorizes_exactly_once() {
        let problem = crate::problems::heat2d_problem(6).unwrap();
        let history = seeded_history(&problem, 0.0, 0.01, 2);
        let trajectory = bdf_integrate(&problem, &history, 40, 2).unwrap();
        assert_eq!(trajectory.stats.factorizations, 1);
        assert!(trajectory.stats.factor_seconds >= 0.0);
    }

    #[test]
    fn singular_shifted_matrix_reports_step() {
        // tau * lambda = c_k makes tau A - c_k I exactly singular
        let a = diagonal_matrix(&[1.0]);
        let problem = LinearProblem::constant(a, |_| Vector::zeros(1), None);
        let history =
            HistoryWindow::from_states(&problem, 0.0, 1.0, vec![Vector::from(vec![1.0])]).unwrap();
        let err = bdf_integrate(&problem, &history, 1, 1).unwrap_err();
        assert!(matches!(err, Error::AtStep { step: 0, .. }));
    }

    #[test]
    fn time_dependent_matrix_refactorizes_each_step() {
        // y' = cos(t) y, y(0) = 1, exact y = e^(sin t)
        let problem = LinearProblem::time_dependent(
            1,
            |t: f64| SparseMatrixCsc::from_triplets(1, &[(0, 0, t.cos())]).unwrap(),
            |_| Vector::zeros(1),
            Some(Box::new(|t: f64| Vector::from(vec![t.sin().exp()]))),
        );
        let steps = 200;
        let tau = 1.0 / steps as f64;
        let history = seeded_history(&problem, 0.0, tau, 2);
        let trajectory = bdf_integrate(&problem, &history, steps - 1, 2).unwrap();
        assert_eq!(trajectory.stats.factorizations, steps as u64 - 1);
        let exact = problem.exact_at(1.0).unwrap();
        let err = (trajectory.final_state().unwrap()[0] - exact[0]).abs();
        assert!(err < 1e-4, "err = {err}");
    }

    /// Dense full-matrix BDF reference: factor once, reuse for every step.
    struct DenseLu {
        a: Vec<Vec<f64>>,
        piv: Vec<usize>,
    }

    impl DenseLu {
        fn new(mut a: Vec<Vec<f64>>) -> Self {
            let n = a.len();
            let mut piv = vec![0usize; n];
            for j in 0..n {
                let mut ip = j;
                for i in j + 1..n {
                    if a[i][j].abs() > a[ip][j].abs() {
                        ip = i;
                    }
                }
                piv[j] = ip;
                a.swap(j, ip);
                for i in j + 1..n {
                    let m = a[i][j] / a[j][j];
                    a[i][j] = m;
                    for c in j + 1..n {
                        let u = a[j][c];
                        a[i][c] -= m * u;
                    }
                }
            }
            DenseLu { a, piv }
        }

        fn solve(&self, b: &[f64]) -> Vec<f64> {
            let n = b.len();
            let mut x = b.to_vec();
            for j in 0..n {
                x.swap(j, self.piv[j]);
                let xj = x[j];
                for i in j + 1..n {
                    x[i] -= self.a[i][j] * xj;
                }
            }
            for j in (0..n).rev() {
                let mut s = x[j];
                for c in j + 1..n {
                    s -= self.a[j][c] * x[c];
                }
                x[j] = s / self.a[j][j];
            }
            x
        }
    }

    // banded path vs dense reference on the heat problem: the endpoint errors
    // must agree to high relative accuracy
    #[test]
    fn heat_endpoint_error_matches_dense_reference() {
        let problem = crate::problems::heat2d_problem(20).unwrap();
        let p = 2;
        let steps_total = 200usize;
        let tau = 10.0 / steps_total as f64;
        let history = seeded_history(&problem, 0.0, tau, p);
        let trajectory = bdf_integrate(&problem, &history, steps_total - (p - 1), p).unwrap();
        let exact = problem.exact_at(10.0).unwrap();
        let err_banded = trajectory.final_state().unwrap().sub(&exact).norm_inf();

        // dense reference with identical recurrence
        let scheme = bdf_coefficients(p).unwrap();
        let a = problem.matrix_at(0.0);
        let n = a.dim();
        let mut dense = a.to_dense();
        for (i, row) in dense.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v *= tau;
                if i == j {
                    *v -= scheme.leading();
                }
            }
        }
        let lu = DenseLu::new(dense);
        let mut w: Vec<Vec<f64>> = (0..p)
            .map(|i| {
                problem
                    .exact_at(i as f64 * tau)
                    .unwrap()
                    .as_slice()
                    .to_vec()
            })
            .collect();
        let mut t = (p - 1) as f64 * tau;
        for _ in 0..steps_total - (p - 1) {
            t += tau;
            let b = problem.forcing_at(t);
            let mut rhs = vec![0.0; n];
            for (i, yj) in w.iter().enumerate() {
                let c = scheme.coefficients()[i];
                for (r, v) in rhs.iter_mut().zip(yj) {
                    *r += c * v;
                }
            }
            for (r, bv) in rhs.iter_mut().zip(b.iter()) {
                *r -= tau * bv;
            }
            let y = lu.solve(&rhs);
            w.remove(0);
            w.push(y);
        }
        let err_dense = Vector::from(w.pop().unwrap()).sub(&exact).norm_inf();
        // the two solver paths agree up to roundoff in the states, so the
        // error values match to 1e-10 relative to the solution scale
        assert!(
            (err_banded - err_dense).abs() <= 1e-10 * exact.norm_inf(),
            "banded {err_banded} vs dense {err_dense}"
        );
    }

    // observed convergence order on the stiff diagonal problem
    #[test]
    fn convergence_order_on_diagonal_problem() {
        use crate::harness::convergence_slope;
        use crate::problems::{diagonal_test_problem, EigenvalueSpec};
        let problem = diagonal_test_problem(EigenvalueSpec::Uniform {
            lambda_max: 100.0,
            n: 100,
        })
        .unwrap();
        for p in 1..=4usize {
            let mut points = Vec::new();
            for s in 4..=11u32 {
                let total = 1usize << s;
                let tau = 1.0 / total as f64;
                let history = seeded_history(&problem, 0.0, tau, p);
                let trajectory = bdf_integrate(&problem, &history, total - (p - 1), p).unwrap();
                let exact = problem.exact_at(1.0).unwrap();
                let err = trajectory.final_state().unwrap().sub(&exact).norm_inf();
                points.push((tau, err));
            }
            let slope = convergence_slope(&points, 1e-12, 4).expect("slope available");
            assert!((slope - p as f64).abs() <= 0.4, "BDF({p}) slope {slope}");
        }
    }
}
