//! Command-line front end: `convergence` and `heat` benchmark drivers plus
//! the `mre` stability-analysis tools.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error. Configuration is
//! flags-only so that any invocation recorded in docs or scripts reproduces
//! the same run.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::harness::{
    run_convergence, run_heat_benchmark, write_csv, write_svg, HeatMethod, Method, StepSchedule,
};
use crate::mre::{bn_roots, mre_solve, MreInstance};
use crate::problems::{diagonal_test_problem, EigenvalueSpec};

#[derive(Parser)]
#[command(
    name = "mrms",
    version,
    about = "Minimal residual multistep integrators for stiff linear ODE systems",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence sweep of MRMS(p + k-offset, p) and implicit Euler on the
    /// diagonal stiff model problem, t in [0, 1].
    Convergence {
        /// Eigenvalue distribution on the negative axis
        #[arg(long, value_parser = ["uniform", "log"], default_value = "uniform")]
        dist: String,

        /// Spectrum magnitude for the uniform distribution: lambda in [-lmax, 0]
        #[arg(long, default_value_t = 100.0)]
        lmax: f64,

        /// Exponent range lo hi for the log distribution (lambda = -10^m)
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        mrange: Option<Vec<f64>>,

        /// System dimension
        #[arg(long, default_value_t = 100)]
        n: usize,

        /// BDF orders to sweep, comma separated (each in 1..=6)
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<usize>,

        /// Extra window width: each run uses MRMS(p + k-offset, p)
        #[arg(long, default_value_t = 0)]
        k_offset: usize,

        /// Smallest step count of the doubling schedule
        #[arg(long, default_value_t = 16)]
        steps_base: usize,

        /// Number of schedule points (steps = base * 2^s)
        #[arg(long, default_value_t = 10)]
        steps_count: usize,

        /// Output CSV path
        #[arg(long, required = true)]
        out: PathBuf,

        /// Optional log-log SVG scatter of (seconds, err)
        #[arg(long)]
        svg: Option<PathBuf>,

        /// Worker threads; keep 1 when the timing columns matter
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },

    /// Time-error benchmark on the 2D heat equation, t in [0, 10]:
    /// MRMS(k, k) against BDF(k).
    Heat {
        /// Interior grid size N (system dimension N^2)
        #[arg(long, required = true)]
        grid: usize,

        /// Smallest step count of the doubling schedule
        #[arg(long, default_value_t = 50)]
        steps_base: usize,

        /// Number of schedule points
        #[arg(long, default_value_t = 6)]
        steps_count: usize,

        /// Window widths / orders, comma separated (each in 1..=6)
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        k: Vec<usize>,

        /// Which integrators to run
        #[arg(long, value_delimiter = ',', default_value = "mrms,bdf")]
        methods: Vec<String>,

        /// Output CSV path
        #[arg(long, required = true)]
        out: PathBuf,

        /// Optional log-log SVG scatter of (seconds, err)
        #[arg(long)]
        svg: Option<PathBuf>,

        /// Worker threads; keep 1 when the timing columns matter
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },

    /// Stability analysis of the one-step minimal residual Euler method.
    Mre {
        /// Sweep variable; `eta` tabulates R(z3) and R(0) for the three-mode
        /// instance z = (0, -1, z3), y0 = (1, 1, eta)
        #[arg(long)]
        sweep: Option<String>,

        /// Third eigenmode for the eta sweep
        #[arg(long, allow_negative_numbers = true)]
        z3: Option<f64>,

        /// Print the negative roots of the stability cubic B_n, or "none"
        #[arg(long)]
        bn: Option<usize>,

        /// Optional CSV output for the sweep table
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses and executes a full invocation; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn validate_orders(values: &[usize], what: &str) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(usage(format!("{what} list must not be empty")));
    }
    for &v in values {
        if !(1..=6).contains(&v) {
            return Err(usage(format!(
                "{what} = {v} outside the zero-stable BDF range 1..=6"
            )));
        }
    }
    Ok(())
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Convergence {
            dist,
            lmax,
            mrange,
            n,
            p,
            k_offset,
            steps_base,
            steps_count,
            out,
            svg,
            jobs,
        } => {
            validate_orders(&p, "--p")?;
            if n < 2 {
                return Err(usage(format!("--n must be at least 2, got {n}")));
            }
            let spec = match dist.as_str() {
                "uniform" => {
                    if !(lmax > 0.0) {
                        return Err(usage(format!("--lmax must be positive, got {lmax}")));
                    }
                    EigenvalueSpec::Uniform {
                        lambda_max: lmax,
                        n,
                    }
                }
                "log" => {
                    let range =
                        mrange.ok_or_else(|| usage("--dist log requires --mrange <LO> <HI>"))?;
                    if range[0] >= range[1] {
                        return Err(usage(format!(
                            "--mrange needs LO < HI, got {} {}",
                            range[0], range[1]
                        )));
                    }
                    EigenvalueSpec::LogSpaced {
                        m_lo: range[0],
                        m_hi: range[1],
                        n,
                    }
                }
                _ => unreachable!("clap validates --dist"),
            };
            let schedule =
                StepSchedule::new(steps_base, steps_count).map_err(|e| usage(e.to_string()))?;
            let problem = diagonal_test_problem(spec)?;
            let mut methods: Vec<Method> = p
                .iter()
                .map(|&order| Method::Mrms {
                    k: order + k_offset,
                    p: order,
                })
                .collect();
            methods.push(Method::ImplicitEuler);
            let records = run_convergence(&problem, &methods, &schedule, (0.0, 1.0), jobs)?;
            write_csv(&records, &out)?;
            println!("wrote {} rows to {}", records.len(), out.display());
            if let Some(svg_path) = svg {
                write_svg(&records, &svg_path)?;
                println!("wrote scatter to {}", svg_path.display());
            }
            Ok(())
        }

        Command::Heat {
            grid,
            steps_base,
            steps_count,
            k,
            methods,
            out,
            svg,
            jobs,
        } => {
            if grid < 2 {
                return Err(usage(format!("--grid must be at least 2, got {grid}")));
            }
            validate_orders(&k, "--k")?;
            let mut selected = Vec::new();
            for m in &methods {
                match m.as_str() {
                    "mrms" => selected.push(HeatMethod::Mrms),
                    "bdf" => selected.push(HeatMethod::Bdf),
                    other => {
                        return Err(usage(format!(
                            "unknown method {other:?} (expected mrms and/or bdf)"
                        )))
                    }
                }
            }
            if selected.is_empty() {
                return Err(usage("--methods list must not be empty"));
            }
            let schedule =
                StepSchedule::new(steps_base, steps_count).map_err(|e| usage(e.to_string()))?;
            let records = run_heat_benchmark(grid, &schedule, &k, &selected, jobs)?;
            write_csv(&records, &out)?;
            println!("wrote {} rows to {}", records.len(), out.display());
            if let Some(svg_path) = svg {
                write_svg(&records, &svg_path)?;
                println!("wrote scatter to {}", svg_path.display());
            }
            Ok(())
        }

        Command::Mre { sweep, z3, bn, out } => match (sweep, bn) {
            (None, Some(n)) => {
                if n < 2 {
                    return Err(usage(format!("--bn needs n >= 2, got {n}")));
                }
                match bn_roots(n) {
                    None => println!("none"),
                    Some((a, b)) => println!("a_n = {a:.10}, b_n = {b:.10}"),
                }
                Ok(())
            }
            (Some(var), None) => {
                if var != "eta" {
                    return Err(usage(format!(
                        "unknown sweep variable {var:?} (only `eta` is available)"
                    )));
                }
                let z3 = z3.ok_or_else(|| usage("--sweep eta requires --z3 <real>"))?;
                let mut table = Vec::new();
                println!("{:>8} {:>24} {:>24}", "eta", "R(z3)", "R(0)");
                for i in 0..=60 {
                    let eta = i as f64 * 0.05;
                    let instance = MreInstance::new(vec![0.0, -1.0, z3], vec![1.0, 1.0, eta])?;
                    let c = mre_solve(&instance)?;
                    let r_z3 = c.amplification(z3);
                    let r_0 = c.amplification(0.0);
                    println!("{eta:>8.2} {r_z3:>24.16e} {r_0:>24.16e}");
                    table.push((eta, r_z3, r_0));
                }
                if let Some(path) = out {
                    let mut text = String::from("eta,r_z3,r_0\n");
                    for (eta, r_z3, r_0) in table {
                        text.push_str(&format!("{eta:.2},{r_z3:.16e},{r_0:.16e}\n"));
                    }
                    std::fs::write(&path, text).map_err(Error::from)?;
                    println!("wrote table to {}", path.display());
                }
                Ok(())
            }
            (None, None) => Err(usage(
                "mre needs either --sweep eta --z3 <real> or --bn <n>",
            )),
            (Some(_), Some(_)) => Err(usage("--sweep and --bn are mutually exclusive")),
        },
    }
}
