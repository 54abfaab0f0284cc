//! Time-error benchmark on the 2D heat equation (method of lines, five-point
//! stencil, manufactured exact solution), comparing MRMS(k, k) with its
//! classical BDF(k) counterpart for k = 1..5.
//!
//! The integration runs on [0, 10] with M = 50 * 2^s fixed steps. BDF
//! factorizes `tau A - c_k I` once (banded LU) and backsubstitutes per step;
//! MRMS solves one thin least-squares problem per step and needs only two
//! fresh matvecs per step thanks to the column cache. Writes
//! `heat_benchmark.csv` and `heat_benchmark.svg`.
//!
//! ```bash
//! cargo run --release --example heat_benchmark              # N = 20
//! cargo run --release --example heat_benchmark -- 40        # N = 40
//! ```

use std::path::Path;

use mrms::harness::{
    run_heat_benchmark, write_csv, write_svg, HeatMethod, MethodKind, StepSchedule,
};

fn main() -> Result<(), mrms::Error> {
    let grid: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("grid size"))
        .unwrap_or(20);
    let schedule = StepSchedule::new(50, 6)?;
    let ks = [1usize, 2, 3, 4, 5];
    println!(
        "heat benchmark: N = {grid} (dimension {}), steps 50..1600",
        grid * grid
    );

    let records = run_heat_benchmark(
        grid,
        &schedule,
        &ks,
        &[HeatMethod::Mrms, HeatMethod::Bdf],
        1,
    )?;

    println!(
        "{:>8} {:>4} {:>8} {:>12} {:>12} {:>12}",
        "method", "k", "steps", "err", "seconds", "factor_s"
    );
    for r in &records {
        println!(
            "{:>8} {:>4} {:>8} {:>12.3e} {:>12.4} {:>12.4}",
            r.method.as_str(),
            r.k,
            r.steps,
            r.err,
            r.seconds,
            r.factor_seconds
        );
    }

    // parity summary: for k >= 2 the two methods track each other closely
    for &k in &ks[1..] {
        let worst = schedule
            .steps()
            .map(|steps| {
                let err_of = |kind: MethodKind| {
                    records
                        .iter()
                        .find(|r| r.method == kind && r.k == k && r.steps == steps)
                        .map(|r| r.err)
                        .unwrap()
                };
                let (a, b) = (err_of(MethodKind::Mrms), err_of(MethodKind::Bdf));
                (a / b).max(b / a)
            })
            .fold(0.0, f64::max);
        println!("k = {k}: worst MRMS/BDF error ratio {worst:.2}");
    }

    write_csv(&records, Path::new("heat_benchmark.csv"))?;
    write_svg(&records, Path::new("heat_benchmark.svg"))?;
    println!("wrote heat_benchmark.csv and heat_benchmark.svg");
    Ok(())
}
