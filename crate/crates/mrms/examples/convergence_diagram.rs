//! Convergence diagram on the stiff diagonal model problem
//! `y_i' = lambda_i y_i + 1`, `y_i(0) = 1`, with 100 eigenvalues equally
//! spaced on [-100, 0].
//!
//! Runs MRMS(p, p) and MRMS(p + 1, p) for p = 1..5 plus the implicit Euler
//! baseline over step counts 2^4 .. 2^13 on [0, 1], prints the endpoint
//! max-norm errors, and writes `convergence_diagram.csv`.
//!
//! ```bash
//! cargo run --release --example convergence_diagram
//! ```

use std::path::Path;

use mrms::harness::{run_convergence, write_csv, Method, MethodKind, StepSchedule};
use mrms::problems::{diagonal_test_problem, EigenvalueSpec};

fn main() -> Result<(), mrms::Error> {
    let problem = diagonal_test_problem(EigenvalueSpec::Uniform {
        lambda_max: 100.0,
        n: 100,
    })?;
    let schedule = StepSchedule::new(16, 10)?;

    let mut methods = vec![Method::ImplicitEuler];
    for p in 1..=5 {
        methods.push(Method::Mrms { k: p, p });
        methods.push(Method::Mrms { k: p + 1, p });
    }
    let records = run_convergence(&problem, &methods, &schedule, (0.0, 1.0), 1)?;

    print!("{:>12}", "steps");
    for method in &methods {
        let label = match method {
            Method::ImplicitEuler => "IE".to_string(),
            Method::Mrms { k, p } => format!("MRMS({k},{p})"),
            Method::Bdf { p } => format!("BDF({p})"),
        };
        print!("{label:>12}");
    }
    println!();
    for steps in schedule.steps() {
        print!("{steps:>12}");
        for method in &methods {
            let (kind, k, p) = match method {
                Method::ImplicitEuler => (MethodKind::ImplicitEuler, 1, 1),
                Method::Mrms { k, p } => (MethodKind::Mrms, *k, *p),
                Method::Bdf { p } => (MethodKind::Bdf, *p, *p),
            };
            let err = records
                .iter()
                .find(|r| r.method == kind && r.k == k && r.p == p && r.steps == steps)
                .map(|r| r.err)
                .unwrap_or(f64::NAN);
            print!("{err:>12.2e}");
        }
        println!();
    }

    let path = Path::new("convergence_diagram.csv");
    write_csv(&records, path)?;
    println!("\nwrote {}", path.display());
    println!("columns double the step count; each column's decay rate shows the observed order");
    Ok(())
}
