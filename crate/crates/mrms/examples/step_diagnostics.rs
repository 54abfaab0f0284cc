//! A close look at single MRMS steps on the heat problem: per-step residual
//! norms, least-squares ranks, and the matvec cost structure with the column
//! cache on and off.
//!
//! ```bash
//! cargo run --release --example step_diagnostics
//! ```

use mrms::bdf::bdf_integrate;
use mrms::problems::heat2d_problem;
use mrms::stepper::{mrms_integrate, HistoryWindow, MrmsConfig};
use mrms::Vector;

fn main() -> Result<(), mrms::Error> {
    let grid = 20;
    let problem = heat2d_problem(grid)?;
    let k = 3;
    let steps = 200;
    let tau = 10.0 / (steps + k - 1) as f64;

    let seed = |count: usize| -> Result<HistoryWindow, mrms::Error> {
        let states: Vec<Vector> = (0..count)
            .map(|i| problem.exact_at(i as f64 * tau).unwrap())
            .collect();
        HistoryWindow::from_states(&problem, 0.0, tau, states)
    };

    println!(
        "heat2d N = {grid} (dimension {}), MRMS({k},{k}), {steps} steps",
        grid * grid
    );

    let config = MrmsConfig::new(k, k)?;
    let mut history = seed(k)?;
    let trajectory = mrms_integrate(&problem, &mut history, &config, steps)?;

    println!("\nper-step diagnostics (every 25th step):");
    println!("{:>6} {:>14} {:>6}", "step", "residual", "rank");
    for (i, d) in trajectory.diagnostics.iter().enumerate() {
        if i % 25 == 0 || i + 1 == trajectory.diagnostics.len() {
            println!("{:>6} {:>14.3e} {:>6}", i, d.residual_norm, d.ls_rank);
        }
    }

    let exact = problem.exact_at(trajectory.final_time().unwrap()).unwrap();
    let err = trajectory.final_state().unwrap().sub(&exact).norm_inf();
    let s = &trajectory.stats;
    println!("\nendpoint max-norm error: {err:.3e}");
    println!(
        "cache on:  {} fresh matvecs over {steps} steps ({} warm-up + 2 per step)",
        s.matvecs,
        2 * k - 1
    );
    println!(
        "timing: assembly {:.4} s, least squares {:.4} s, total {:.4} s",
        s.assembly_seconds, s.solve_seconds, s.total_seconds
    );

    let uncached = MrmsConfig {
        cache_av: false,
        ..config
    };
    let mut history = seed(k)?;
    let trajectory = mrms_integrate(&problem, &mut history, &uncached, steps)?;
    println!(
        "cache off: {} fresh matvecs over {steps} steps ({} per step)",
        trajectory.stats.matvecs,
        2 * k + 1
    );

    let history = seed(k)?;
    let bdf = bdf_integrate(&problem, &history, steps, k)?;
    let exact = problem.exact_at(bdf.final_time().unwrap()).unwrap();
    let bdf_err = bdf.final_state().unwrap().sub(&exact).norm_inf();
    println!(
        "\nBDF({k}) on the same grid: error {bdf_err:.3e}, {} factorization ({:.4} s), backsubstitution {:.4} s",
        bdf.stats.factorizations, bdf.stats.factor_seconds, bdf.stats.solve_seconds
    );
    Ok(())
}
