//! Linear-stability analysis of the minimal residual Euler method, the
//! one-step member MRMS(1, 1).
//!
//! Applied to the diagonal model system `y' = diag(lambda) y`, `y(0) = eta`,
//! one step acts as `y_1 = R(tau Lambda) y_0` with the data-dependent
//! amplification polynomial `R(z) = alpha + beta z`. The coefficients solve a
//! 2-column least-squares problem whose rows are weighted by the initial data,
//! which is what makes the stability analysis interesting: modes with small
//! weight can be amplified arbitrarily (harmlessly, since the weight is small),
//! and slow modes are damped.
//!
//! The module provides the least-squares solve, the closed-form normal
//! equations and their collected determinant forms, the Chebyshev minimax
//! bound for equal-magnitude data, and the cubic `B_n` whose sign controls
//! the `|R| <= 1` guarantee.

use crate::error::{Error, Result};
use crate::linalg::{least_squares_min_norm, DenseThinMatrix, Vector};

/// A scaled diagonal model instance: `z_i = tau lambda_i` and the components
/// `eta_i` of the initial data.
#[derive(Clone, Debug, PartialEq)]
pub struct MreInstance {
    z: Vec<f64>,
    eta: Vec<f64>,
}

impl MreInstance {
    pub fn new(z: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        if z.len() != eta.len() {
            return Err(Error::DimensionMismatch {
                context: "MRE instance",
                expected: z.len(),
                actual: eta.len(),
            });
        }
        if z.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "MRE instance needs n >= 2 modes, got {}",
                z.len()
            )));
        }
        if z.iter().chain(eta.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "MRE instance",
            });
        }
        Ok(MreInstance { z, eta })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction enforces n >= 2
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Drops the last mode; used by the determinant recursion checks.
    pub fn head(&self) -> Option<MreInstance> {
        if self.len() <= 2 {
            return None;
        }
        Some(MreInstance {
            z: self.z[..self.len() - 1].to_vec(),
            eta: self.eta[..self.len() - 1].to_vec(),
        })
    }
}

/// Coefficients of the amplification polynomial `R(z) = alpha + beta z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MreCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

impl MreCoefficients {
    /// `R(z) = alpha + beta z`.
    pub fn amplification(&self, z: f64) -> f64 {
        self.alpha + self.beta * z
    }

    /// `P(z) = 1 + (z - 1) R(z)`; `P(1) = 1` for any coefficients.
    pub fn residual_polynomial(&self, z: f64) -> f64 {
        1.0 + (z - 1.0) * self.amplification(z)
    }
}

/// The 2-column least-squares system `min || W gamma + y_0 ||` with rows
/// `(eta_i (z_i - 1), eta_i z_i (z_i - 1))`.
fn build_system(inst: &MreInstance) -> (DenseThinMatrix, Vector) {
    let n = inst.len();
    let mut w = DenseThinMatrix::zeros(n, 2);
    for i in 0..n {
        let s = inst.z[i] - 1.0;
        w.set(i, 0, inst.eta[i] * s);
        w.set(i, 1, inst.eta[i] * inst.z[i] * s);
    }
    let g = Vector::from_fn(n, |i| -inst.eta[i]);
    (w, g)
}

/// Minimizes `|| W gamma + y_0 ||_2` by the rank-revealing QR kernel.
///
/// The normal equations (see [`kramer_determinants`]) are kept only as a
/// cross-check: the z values can span many orders of magnitude and squaring
/// them would waste half the available precision.
pub fn mre_solve(inst: &MreInstance) -> Result<MreCoefficients> {
    if inst.eta.iter().all(|&e| e == 0.0) {
        return Err(Error::InvalidInput(
            "vacuous MRE instance: all eta components are zero".into(),
        ));
    }
    let (w, g) = build_system(inst);
    let ls = least_squares_min_norm(&w, &g, None)?;
    Ok(MreCoefficients {
        alpha: ls.gamma[0],
        beta: ls.gamma[1],
    })
}

/// Well-posedness predicate: the least-squares problem has a unique minimizer
/// iff some pair `i != j` has `z_i != z_j`, both different from 1, and
/// `eta_i eta_j != 0`.
pub fn well_posed(inst: &MreInstance) -> bool {
    let n = inst.len();
    for i in 0..n {
        if inst.eta[i] == 0.0 || inst.z[i] == 1.0 {
            continue;
        }
        for j in i + 1..n {
            if inst.eta[j] != 0.0 && inst.z[j] != 1.0 && inst.z[i] != inst.z[j] {
                return true;
            }
        }
    }
    false
}

/// Kramer determinants of the 2x2 normal equations, in their collected
/// double-sum form (`s_i = 1 - z_i`). `alpha = delta1/delta`,
/// `beta = delta2/delta`; `delta = 0` signals an ill-posed instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KramerDeterminants {
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
}

pub fn kramer_determinants(inst: &MreInstance) -> KramerDeterminants {
    let n = inst.len();
    let s: Vec<f64> = inst.z.iter().map(|z| 1.0 - z).collect();
    let mut delta = 0.0;
    let mut delta1 = 0.0;
    let mut delta2 = 0.0;
    for i in 0..n {
        let wi = inst.eta[i] * inst.eta[i];
        let mut inner = 0.0;
        let mut inner1 = 0.0;
        for j in 0..n {
            let wj = inst.eta[j] * inst.eta[j];
            let dz = inst.z[i] - inst.z[j];
            inner += wj * s[j] * s[j] * dz;
            inner1 += wj * s[j] * dz;
        }
        delta += wi * s[i] * s[i] * inst.z[i] * inner;
        delta1 += wi * s[i] * s[i] * inst.z[i] * inner1;
        delta2 -= wi * s[i] * s[i] * inner1;
    }
    KramerDeterminants {
        delta,
        delta1,
        delta2,
    }
}

/// Increments `(delta, delta1, delta2)` added to the determinants of the
/// first n-1 modes when the last mode joins.
///
/// Note: the delta1 increment carries a factor `s_i` inside the sum; the
/// recursion does not hold without it (direct expansion of the determinant
/// difference, cross-checked numerically in the tests).
pub fn kramer_increments(inst: &MreInstance) -> KramerDeterminants {
    let n = inst.len();
    let zn = inst.z[n - 1];
    let en2 = inst.eta[n - 1] * inst.eta[n - 1];
    let sn = 1.0 - zn;
    let mut d = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for i in 0..n - 1 {
        let wi = inst.eta[i] * inst.eta[i];
        let si = 1.0 - inst.z[i];
        let dz2 = (inst.z[i] - zn) * (inst.z[i] - zn);
        d += wi * si * si * dz2;
        d1 += wi * si * dz2 * (1.0 - inst.z[i] - zn);
        d2 += wi * si * dz2;
    }
    KramerDeterminants {
        delta: en2 * sn * sn * d,
        delta1: en2 * sn * d1,
        delta2: en2 * sn * d2,
    }
}

/// Best uniform quadratic on `[z_n, 0]` within the `p(1) = 1` family,
/// expressed through the degree-2 Chebyshev polynomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimaxQuadratic {
    /// Coefficients `c_0 + c_1 z + c_2 z^2`.
    pub coeffs: [f64; 3],
    /// Maximum deviation from zero on `[z_n, 0]`.
    pub max_deviation: f64,
}

impl MinimaxQuadratic {
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs[0] + self.coeffs[1] * z + self.coeffs[2] * z * z
    }
}

/// `(8 z^2 - 8 z_n z + z_n^2) / (z_n^2 - 8 z_n + 8)` with its deviation
/// `z_n^2 / (z_n^2 - 8 z_n + 8)`.
pub fn minimax_polynomial(z_n: f64) -> Result<MinimaxQuadratic> {
    if !(z_n < 0.0) {
        return Err(Error::InvalidInput(format!(
            "minimax bound needs z_n < 0, got {z_n}"
        )));
    }
    let d = z_n * z_n - 8.0 * z_n + 8.0;
    Ok(MinimaxQuadratic {
        coeffs: [z_n * z_n / d, -8.0 * z_n / d, 8.0 / d],
        max_deviation: z_n * z_n / d,
    })
}

/// `B_n(z) = (2 - z)(z^2 - 8 z + 8) - sqrt(n) z^2`. Negative values on
/// `z <= 0` mark where `R(z_n) < -1` becomes possible for equal-magnitude data.
pub fn bn_evaluate(n: usize, z: f64) -> f64 {
    (2.0 - z) * (z * z - 8.0 * z + 8.0) - (n as f64).sqrt() * z * z
}

/// The two real negative roots `(a_n, b_n)` bracketing the region where
/// `B_n < 0`, or `None` when `B_n` stays positive on the negative axis
/// (which holds exactly for `sqrt(n) < 2 (5 + 3 sqrt(3))`, i.e. n <= 415).
///
/// The leftmost root is bracketed by `10 - sqrt(n)` on the left (where
/// `B_n = 16 - 24 z > 0`) and the negative-axis minimizer of `B_n` on the
/// right; near the threshold the textbook asymptotic bracket `11 - sqrt(n)`
/// lies left of both roots, so the minimizer is used instead. Both roots are
/// then located by bisection to 1e-10.
pub fn bn_roots(n: usize) -> Option<(f64, f64)> {
    let c = 10.0 - (n as f64).sqrt();
    // critical points of B_n: 3 z^2 - 2 c z + 24 = 0
    let disc = c * c - 72.0;
    if c >= 0.0 || disc <= 0.0 {
        return None;
    }
    let z_min = (c - disc.sqrt()) / 3.0; // local minimum on the negative axis
    let z_max = (c + disc.sqrt()) / 3.0; // local maximum, right of the minimum
    if bn_evaluate(n, z_min) >= 0.0 {
        return None;
    }
    let f = |z: f64| bn_evaluate(n, z);
    let a = bisect(f, c, z_min);
    let b = bisect(f, z_min, z_max);
    Some((a, b))
}

/// Bisection for a sign change on `[lo, hi]`, to absolute tolerance 1e-10.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    debug_assert!(f_lo * f(hi) <= 0.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_lo > 0.0) == (f_mid > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form `R(z_3)` and `R(0)` for the three-mode family
/// `z = (0, -1, z_3)`, `y_0 = (1, 1, eta)`.
///
/// At `eta = 0` the third mode carries no weight: `R(z_3) = 1 + z_3/2` can be
/// far below -1 while the solution stays bounded. As `|eta|` grows, `R(z_3)`
/// is pulled back toward zero and the slow mode at `z = 0` gets damped.
pub fn three_mode_closed_form(z3: f64, eta: f64) -> (f64, f64) {
    let e2 = eta * eta;
    let quad = 5.0 * z3 * z3 + 8.0 * z3 + 4.0;
    let denom = e2 * (z3 - 1.0) * (z3 - 1.0) * quad + 4.0;
    let r_z3 = (2.0 * (z3 + 2.0) - e2 * (z3 - 1.0) * quad) / denom;
    let r_0 = (e2 * ((z3 - 2.0) * z3 * (z3 + 1.0) * (3.0 * z3 - 1.0) + 4.0) + 4.0) / denom;
    (r_z3, r_0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn inst(z: &[f64], eta: &[f64]) -> MreInstance {
        MreInstance::new(z.to_vec(), eta.to_vec()).unwrap()
    }

    #[test]
    fn solve_recovers_the_half_slope_example() {
        let c = mre_solve(&inst(&[-1.0, 0.0, 1.0], &[1.0, 1.0, 1.0])).unwrap();
        assert!((c.alpha - 1.0).abs() < 1e-12);
        assert!((c.beta - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_distinct_z_values_reproduce_implicit_euler() {
        let c = mre_solve(&inst(&[-3.0, -0.5, -3.0, -0.5], &[1.0, 2.0, -1.0, 0.3])).unwrap();
        for z in [-3.0, -0.5] {
            let expected = 1.0 / (1.0 - z);
            assert!((c.amplification(z) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weight_mode_follows_the_open_fit() {
        let c = mre_solve(&inst(&[0.0, -1.0, -10.0], &[1.0, 1.0, 0.0])).unwrap();
        assert!((c.amplification(-10.0) + 4.0).abs() < 1e-12);
    }

    #[test]
    fn vacuous_instance_is_rejected() {
        assert!(mre_solve(&inst(&[0.0, -1.0], &[0.0, 0.0])).is_err());
    }

    #[test]
    fn instance_validation() {
        assert!(MreInstance::new(vec![0.0], vec![1.0]).is_err());
        assert!(MreInstance::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(MreInstance::new(vec![0.0, f64::NAN], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn polynomial_evaluations() {
        let c = MreCoefficients {
            alpha: 1.0,
            beta: 0.5,
        };
        assert_eq!(c.amplification(0.0), 1.0);
        assert_eq!(c.residual_polynomial(0.0), 0.0);
        assert_eq!(c.amplification(-4.0), -1.0);
        // P(1) = 1 for arbitrary coefficients
        let arbitrary = MreCoefficients {
            alpha: -3.7,
            beta: 12.9,
        };
        assert_eq!(arbitrary.residual_polynomial(1.0), 1.0);
    }

    #[test]
    fn well_posedness_predicate() {
        assert!(well_posed(&inst(&[0.0, -1.0], &[1.0, 1.0])));
        // no pair with both weights nonzero
        assert!(!well_posed(&inst(&[0.0, -1.0, -2.0], &[1.0, 0.0, 0.0])));
        // all z equal
        assert!(!well_posed(&inst(&[-3.0, -3.0, -3.0], &[1.0, 1.0, 1.0])));
        // distinct pair exists but one of them sits at z = 1
        assert!(!well_posed(&inst(&[1.0, -2.0, -2.0], &[1.0, 1.0, 1.0])));
    }

    #[test]
    fn determinants_ordered_for_n2() {
        let d = kramer_determinants(&inst(&[0.0, -1.0], &[1.0, 1.0]));
        assert!(0.0 <= d.delta2);
        assert!(d.delta2 <= d.delta1);
        assert!(d.delta1 <= d.delta);
        assert!(d.delta > 0.0);
    }

    #[test]
    fn ill_posed_instance_has_zero_delta() {
        let d = kramer_determinants(&inst(&[0.0, -1.0], &[1.0, 0.0]));
        assert_eq!(d.delta, 0.0);
    }

    // the collected double sums must equal the plain 2x2 determinants of the
    // normal equations
    #[test]
    fn collected_sums_match_direct_determinants() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let n = rng.gen_range(2..=8);
            let z: Vec<f64> = (0..n).map(|_| -rng.gen_range(0.0..10.0f64)).collect();
            let eta: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let instance = inst(&z, &eta);
            let d = kramer_determinants(&instance);

            let (m11, m12, m22, r1, r2) = normal_equation_sums(&instance);
            let delta = m11 * m22 - m12 * m12;
            let delta1 = r1 * m22 - m12 * r2;
            let delta2 = m11 * r2 - r1 * m12;
            let scale = delta.abs().max(delta1.abs()).max(delta2.abs()).max(1.0);
            assert!((d.delta - delta).abs() <= 1e-10 * scale);
            assert!((d.delta1 - delta1).abs() <= 1e-10 * scale);
            assert!((d.delta2 - delta2).abs() <= 1e-10 * scale);
        }
    }

    fn normal_equation_sums(instance: &MreInstance) -> (f64, f64, f64, f64, f64) {
        let (mut m11, mut m12, mut m22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..instance.len() {
            let e2 = instance.eta()[i] * instance.eta()[i];
            let z = instance.z()[i];
            let s = 1.0 - z;
            m11 += e2 * s * s;
            m12 += e2 * s * s * z;
            m22 += e2 * s * s * z * z;
            r1 += e2 * s;
            r2 += e2 * s * z;
        }
        (m11, m12, m22, r1, r2)
    }

    // recursion: determinants of n modes = determinants of the first n-1
    // modes + the last-mode increments, both sides evaluated independently
    #[test]
    fn determinant_recursion_holds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let n = rng.gen_range(3..=8);
            let z: Vec<f64> = (0..n).map(|_| -rng.gen_range(0.0..5.0f64)).collect();
            let eta: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let full = inst(&z, &eta);
            let head = full.head().unwrap();
            let d_full = kramer_determinants(&full);
            let d_head = kramer_determinants(&head);
            let inc = kramer_increments(&full);
            let scale = d_full
                .delta
                .abs()
                .max(d_full.delta1.abs())
                .max(d_full.delta2.abs())
                .max(1.0);
            assert!((d_full.delta - (d_head.delta + inc.delta)).abs() <= 1e-10 * scale);
            assert!((d_full.delta1 - (d_head.delta1 + inc.delta1)).abs() <= 1e-10 * scale);
            assert!((d_full.delta2 - (d_head.delta2 + inc.delta2)).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn kramer_ratios_match_the_least_squares_solve() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        for _ in 0..50 {
            let n = rng.gen_range(2..=10);
            let z: Vec<f64> = (0..n).map(|_| -rng.gen_range(0.01..100.0f64)).collect();
            let eta: Vec<f64> = (0..n)
                .map(|_| {
                    let e: f64 = rng.gen_range(0.1..3.0);
                    if rng.gen_bool(0.5) {
                        e
                    } else {
                        -e
                    }
                })
                .collect();
            let instance = inst(&z, &eta);
            if !well_posed(&instance) {
                continue;
            }
            let c = mre_solve(&instance).unwrap();
            let d = kramer_determinants(&instance);
            assert!((c.alpha - d.delta1 / d.delta).abs() <= 1e-8 * c.alpha.abs().max(1.0));
            assert!((c.beta - d.delta2 / d.delta).abs() <= 1e-8 * c.beta.abs().max(1.0));
        }
    }

    #[test]
    fn minimax_is_normalized_at_one() {
        for z_n in [-0.3, -1.0, -8.0, -1e4] {
            let p = minimax_polynomial(z_n).unwrap();
            assert!((p.eval(1.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn minimax_deviation_values() {
        assert!((minimax_polynomial(-1.0).unwrap().max_deviation - 1.0 / 17.0).abs() < 1e-15);
        assert!((minimax_polynomial(-8.0).unwrap().max_deviation - 8.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn minimax_rejects_nonnegative_endpoints() {
        assert!(minimax_polynomial(0.0).is_err());
        assert!(minimax_polynomial(2.0).is_err());
    }

    #[test]
    fn bn_at_zero_is_sixteen() {
        for n in [2usize, 100, 415, 416, 10000] {
            assert_eq!(bn_evaluate(n, 0.0), 16.0);
        }
    }

    #[test]
    fn bn_root_threshold_at_415() {
        assert!(bn_roots(2).is_none());
        assert!(bn_roots(100).is_none());
        assert!(bn_roots(415).is_none());
        let (a, b) = bn_roots(416).expect("roots exist above the threshold");
        assert!(a < b && b < 0.0);
        // strictly negative in between, nonnegative at the roots' scale
        let mid = 0.5 * (a + b);
        assert!(bn_evaluate(416, mid) < 0.0);
        assert!(bn_evaluate(416, a).abs() < 1e-6);
        assert!(bn_evaluate(416, b).abs() < 1e-6);
    }

    #[test]
    fn bn_leftmost_root_for_large_n() {
        let (a, b) = bn_roots(10_000).unwrap();
        assert!(a > 10.0 - 100.0 && a < 11.0 - 100.0, "a = {a}");
        assert!(b < 0.0 && b > a);
    }

    #[test]
    fn three_mode_closed_form_limits() {
        let (r_z3, r_0) = three_mode_closed_form(-10.0, 0.0);
        assert!((r_z3 - (1.0 - 5.0)).abs() < 1e-14);
        assert!((r_0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn three_mode_closed_form_matches_solver() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        // the extreme mode case needs a slightly looser comparison
        let c = mre_solve(&inst(&[0.0, -1.0, -1e6], &[1.0, 1.0, 1.0])).unwrap();
        let (r_z3, r_0) = three_mode_closed_form(-1e6, 1.0);
        assert!((c.amplification(-1e6) - r_z3).abs() <= 1e-8 * r_z3.abs().max(1.0));
        assert!((c.amplification(0.0) - r_0).abs() <= 1e-8 * r_0.abs().max(1.0));
        for _ in 0..50 {
            let z3 = -rng.gen_range(0.1..1e3f64);
            let eta = rng.gen_range(-3.0..3.0);
            let c = mre_solve(&inst(&[0.0, -1.0, z3], &[1.0, 1.0, eta])).unwrap();
            let (r_z3, r_0) = three_mode_closed_form(z3, eta);
            assert!(
                (c.amplification(z3) - r_z3).abs() <= 1e-10 * r_z3.abs().max(1.0),
                "z3 = {z3}, eta = {eta}"
            );
            assert!((c.amplification(0.0) - r_0).abs() <= 1e-10 * r_0.abs().max(1.0));
        }
    }

    fn random_wellposed_nonpositive(
        rng: &mut rand_chacha::ChaCha8Rng,
        max_n: usize,
    ) -> MreInstance {
        loop {
            let n = rng.gen_range(2..=max_n);
            let z: Vec<f64> = (0..n).map(|_| -rng.gen_range(0.0..1e6f64)).collect();
            let eta: Vec<f64> = (0..n)
                .map(|_| {
                    let e: f64 = rng.gen_range(0.001..10.0);
                    if rng.gen_bool(0.5) {
                        e
                    } else {
                        -e
                    }
                })
                .collect();
            let instance = inst(&z, &eta);
            if well_posed(&instance) {
                return instance;
            }
        }
    }

    // 0 <= beta <= alpha <= 1 for well-posed instances with nonpositive z,
    // hence R(z_i) <= 1 on every mode
    #[test]
    fn coefficient_bounds_on_nonpositive_spectra() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        for _ in 0..200 {
            let instance = random_wellposed_nonpositive(&mut rng, 50);
            let c = mre_solve(&instance).unwrap();
            assert!(c.beta >= -1e-12, "beta = {}", c.beta);
            assert!(c.alpha >= c.beta - 1e-12);
            assert!(c.alpha <= 1.0 + 1e-12);
            for &z in instance.z() {
                assert!(c.amplification(z) <= 1.0 + 1e-12);
            }
        }
    }

    /// Brute-force max-norm minimizer over (alpha, beta) by nested grid
    /// refinement; two parameters keep this cheap and unambiguous.
    fn maxnorm_brute_force(instance: &MreInstance) -> f64 {
        let objective = |alpha: f64, beta: f64| -> f64 {
            let c = MreCoefficients { alpha, beta };
            instance
                .z()
                .iter()
                .zip(instance.eta())
                .map(|(&z, &e)| (c.residual_polynomial(z) * e).abs())
                .fold(0.0, f64::max)
        };
        let (mut ca, mut cb) = (0.0f64, 0.0f64);
        let mut half = 2.0f64;
        let mut best = objective(ca, cb);
        for _ in 0..12 {
            let (mut best_a, mut best_b) = (ca, cb);
            for ia in 0..=40 {
                for ib in 0..=40 {
                    let a = ca - half + ia as f64 * (half / 20.0);
                    let b = cb - half + ib as f64 * (half / 20.0);
                    let v = objective(a, b);
                    if v < best {
                        best = v;
                        best_a = a;
                        best_b = b;
                    }
                }
            }
            ca = best_a;
            cb = best_b;
            half /= 5.0;
        }
        best
    }

    // for equal-magnitude data, the achievable max-norm residual is bounded
    // by the Chebyshev deviation of the minimax quadratic
    #[test]
    fn minimax_bound_dominates_brute_force_optimum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for &z_n in &[-1.0, -10.0, -1e4] {
            for _ in 0..5 {
                let n = rng.gen_range(3..=20);
                let mut z: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(z_n..0.0f64)).collect();
                z.push(z_n);
                let eta: Vec<f64> = (0..n)
                    .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                    .collect();
                let instance = inst(&z, &eta);
                let brute = maxnorm_brute_force(&instance);
                let bound = minimax_polynomial(z_n).unwrap().max_deviation;
                assert!(
                    brute <= bound + 1e-6,
                    "z_n = {z_n}, n = {n}: {brute} > {bound}"
                );
            }
        }
    }

    // whenever the z set has at most two distinct values, or the instance is
    // ill-posed, the MRE step equals the implicit Euler step componentwise
    #[test]
    fn implicit_euler_equivalence_cases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(67);
        for case in 0..60 {
            let n = rng.gen_range(2..=20);
            let (z, eta): (Vec<f64>, Vec<f64>) = match case % 3 {
                0 => {
                    // two distinct z values, all weights nonzero
                    let z1 = -rng.gen_range(0.01..1e5f64);
                    let mut z2 = -rng.gen_range(0.01..1e5f64);
                    if z1 == z2 {
                        z2 *= 0.5;
                    }
                    (
                        (0..n)
                            .map(|_| if rng.gen_bool(0.5) { z1 } else { z2 })
                            .collect(),
                        (0..n).map(|_| rng.gen_range(0.1..2.0)).collect(),
                    )
                }
                1 => {
                    // all z equal: ill-posed
                    let z1 = -rng.gen_range(0.01..1e5f64);
                    (
                        vec![z1; n],
                        (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                    )
                }
                _ => {
                    // only one nonzero weight: ill-posed
                    let mut eta = vec![0.0; n];
                    eta[rng.gen_range(0..n)] = rng.gen_range(0.5..2.0);
                    ((0..n).map(|_| -rng.gen_range(0.01..1e5f64)).collect(), eta)
                }
            };
            if eta.iter().all(|&e| e == 0.0) {
                continue;
            }
            let instance = inst(&z, &eta);
            let c = mre_solve(&instance).unwrap();
            for i in 0..n {
                let mre = c.amplification(z[i]) * eta[i];
                let ie = eta[i] / (1.0 - z[i]);
                let denom = mre.abs().max(ie.abs()).max(1e-30);
                assert!(
                    (mre - ie).abs() <= 1e-10 * denom,
                    "case {case}, mode {i}: {mre} vs {ie}"
                );
            }
        }
    }
}
