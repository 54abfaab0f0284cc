//! Experiment drivers: convergence diagrams on the diagonal model problem,
//! the heat-equation time-error benchmark, CSV emission and a small SVG
//! scatter renderer.
//!
//! Every run seeds its starting values from the problem's exact solution and
//! reports the endpoint error in the maximum norm, together with wall-clock
//! timings split by phase. Error values are deterministic for a fixed
//! configuration; timings of course are not.

use std::fmt;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::bdf::bdf_integrate;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::problems::LinearProblem;
use crate::stepper::{mrms_integrate, HistoryWindow, MrmsConfig};

/// Which integrator produced a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MethodKind {
    Bdf,
    ImplicitEuler,
    Mrms,
}

impl MethodKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodKind::Bdf => "BDF",
            MethodKind::ImplicitEuler => "IE",
            MethodKind::Mrms => "MRMS",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "BDF" => Ok(MethodKind::Bdf),
            "IE" => Ok(MethodKind::ImplicitEuler),
            "MRMS" => Ok(MethodKind::Mrms),
            other => Err(Error::InvalidInput(format!("unknown method tag {other:?}"))),
        }
    }
}

/// A method entry for the convergence driver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Mrms { k: usize, p: usize },
    Bdf { p: usize },
    ImplicitEuler,
}

impl Method {
    fn kind(&self) -> MethodKind {
        match self {
            Method::Mrms { .. } => MethodKind::Mrms,
            Method::Bdf { .. } => MethodKind::Bdf,
            Method::ImplicitEuler => MethodKind::ImplicitEuler,
        }
    }

    fn k(&self) -> usize {
        match self {
            Method::Mrms { k, .. } => *k,
            Method::Bdf { p } => *p,
            Method::ImplicitEuler => 1,
        }
    }

    fn p(&self) -> usize {
        match self {
            Method::Mrms { p, .. } => *p,
            Method::Bdf { p } => *p,
            Method::ImplicitEuler => 1,
        }
    }

    /// Number of exact starting values the method consumes.
    fn starting_values(&self) -> usize {
        match self {
            Method::Mrms { k, .. } => *k,
            Method::Bdf { p } => *p,
            Method::ImplicitEuler => 1,
        }
    }
}

/// One benchmark row.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub method: MethodKind,
    pub k: usize,
    pub p: usize,
    pub steps: usize,
    pub tau: f64,
    /// Endpoint error in the maximum norm; infinite when the run failed.
    pub err: f64,
    /// Wall clock of the whole integration.
    pub seconds: f64,
    /// Factorization time (BDF only, zero for MRMS).
    pub factor_seconds: f64,
}

/// Doubling step-count schedule `steps_s = base * 2^s`, `s = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepSchedule {
    pub base: usize,
    pub count: usize,
}

impl StepSchedule {
    pub fn new(base: usize, count: usize) -> Result<Self> {
        if base == 0 || count == 0 || count > 40 {
            return Err(Error::InvalidInput(format!(
                "step schedule needs base >= 1 and 1 <= count <= 40 (got {base}, {count})"
            )));
        }
        if base.checked_mul(1 << (count - 1)).is_none() {
            return Err(Error::InvalidInput(format!(
                "step schedule overflows: {base} * 2^{}",
                count - 1
            )));
        }
        Ok(StepSchedule { base, count })
    }

    pub fn steps(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.count).map(move |s| self.base << s)
    }
}

fn run_one(
    problem: &LinearProblem,
    method: Method,
    total_steps: usize,
    interval: (f64, f64),
) -> ExperimentRecord {
    let (t0, t1) = interval;
    let tau = (t1 - t0) / total_steps as f64;
    let start = method.starting_values();
    let mut record = ExperimentRecord {
        method: method.kind(),
        k: method.k(),
        p: method.p(),
        steps: total_steps,
        tau,
        err: f64::INFINITY,
        seconds: 0.0,
        factor_seconds: 0.0,
    };
    // the seeded values occupy grid points 0..start, so at least one step
    // must remain to reach the endpoint
    if total_steps < start {
        return record;
    }
    let states: Vec<Vector> = match (0..start)
        .map(|i| {
            problem
                .exact_at(t0 + i as f64 * tau)
                .ok_or_else(|| Error::InvalidInput("problem has no exact solution".into()))
        })
        .collect()
    {
        Ok(s) => s,
        Err(_) => return record,
    };
    let history = HistoryWindow::from_states(problem, t0, tau, states);
    let mut history = match history {
        Ok(h) => h,
        Err(_) => return record,
    };
    let remaining = total_steps - (start - 1);
    let outcome = match method {
        Method::Mrms { k, p } => MrmsConfig::new(k, p)
            .and_then(|config| mrms_integrate(problem, &mut history, &config, remaining)),
        Method::Bdf { p } => bdf_integrate(problem, &history, remaining, p),
        Method::ImplicitEuler => bdf_integrate(problem, &history, remaining, 1),
    };
    match outcome {
        Ok(trajectory) => {
            record.seconds = trajectory.stats.total_seconds;
            record.factor_seconds = trajectory.stats.factor_seconds;
            if let (Some(state), Some(exact)) = (trajectory.final_state(), problem.exact_at(t1)) {
                let diff = state.sub(&exact);
                record.err = if state.is_finite() {
                    diff.norm_inf()
                } else {
                    f64::INFINITY
                };
            }
        }
        Err(_) => {
            // failure recorded per row, the sweep continues
        }
    }
    record
}

fn run_rows(
    problem: &LinearProblem,
    rows: Vec<(Method, usize)>,
    interval: (f64, f64),
    jobs: usize,
) -> Vec<ExperimentRecord> {
    let jobs = jobs.max(1);
    if jobs == 1 {
        return rows
            .iter()
            .map(|&(m, steps)| run_one(problem, m, steps, interval))
            .collect();
    }
    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<ExperimentRecord>>> =
        rows.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(rows.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= rows.len() {
                    break;
                }
                let (m, steps) = rows[i];
                let record = run_one(problem, m, steps, interval);
                *results[i].lock().unwrap() = Some(record);
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("row computed"))
        .collect()
}

/// Runs every (method, step count) combination on one problem, seeding from
/// the exact solution and recording endpoint max-norm errors and timings.
///
/// Integration failures are recorded per row (infinite error) and the sweep
/// continues. `jobs > 1` runs rows on that many worker threads; keep 1 when
/// the timing columns matter.
pub fn run_convergence(
    problem: &LinearProblem,
    methods: &[Method],
    schedule: &StepSchedule,
    interval: (f64, f64),
    jobs: usize,
) -> Result<Vec<ExperimentRecord>> {
    if !problem.has_exact() {
        return Err(Error::InvalidInput(
            "convergence runs need a problem with an exact solution".into(),
        ));
    }
    if !(interval.1 > interval.0) {
        return Err(Error::InvalidInput(format!(
            "empty integration interval [{}, {}]",
            interval.0, interval.1
        )));
    }
    let mut rows = Vec::new();
    for &method in methods {
        for steps in schedule.steps() {
            rows.push((method, steps));
        }
    }
    Ok(run_rows(problem, rows, interval, jobs))
}

/// Which integrators the heat benchmark compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeatMethod {
    Mrms,
    Bdf,
}

/// Time-error benchmark on the 2D heat problem over `[0, 10]`: MRMS(k, k)
/// against BDF(k) for every requested k and step count.
pub fn run_heat_benchmark(
    grid: usize,
    schedule: &StepSchedule,
    ks: &[usize],
    methods: &[HeatMethod],
    jobs: usize,
) -> Result<Vec<ExperimentRecord>> {
    let problem = crate::problems::heat2d_problem(grid)?;
    let mut rows = Vec::new();
    for &k in ks {
        for steps in schedule.steps() {
            if methods.contains(&HeatMethod::Mrms) {
                rows.push((Method::Mrms { k, p: k }, steps));
            }
            if methods.contains(&HeatMethod::Bdf) {
                rows.push((Method::Bdf { p: k }, steps));
            }
        }
    }
    Ok(run_rows(&problem, rows, (0.0, 10.0), jobs))
}

fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes records as CSV with the fixed header
/// `method,k,p,steps,tau,err,seconds,factor_seconds`, reals at 17 significant
/// digits, rows sorted by (method, k, steps).
pub fn write_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let mut sorted: Vec<&ExperimentRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (a.method, a.k, a.steps, a.p).cmp(&(b.method, b.k, b.steps, b.p)));
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "method,k,p,steps,tau,err,seconds,factor_seconds")?;
    for r in sorted {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.method,
            r.k,
            r.p,
            r.steps,
            format_real(r.tau),
            format_real(r.err),
            format_real(r.seconds),
            format_real(r.factor_seconds),
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Parses a CSV file produced by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("method,k,p,steps,tau,err,seconds,factor_seconds") => {}
        other => {
            return Err(Error::InvalidInput(format!(
                "unexpected CSV header: {other:?}"
            )))
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::InvalidInput(format!(
                "line {}: expected 8 fields, got {}",
                idx + 2,
                fields.len()
            )));
        }
        let parse_int = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|e| Error::InvalidInput(format!("line {}: {e}", idx + 2)))
        };
        let parse_real = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::InvalidInput(format!("line {}: {e}", idx + 2)))
        };
        records.push(ExperimentRecord {
            method: fields[0].parse()?,
            k: parse_int(fields[1])?,
            p: parse_int(fields[2])?,
            steps: parse_int(fields[3])?,
            tau: parse_real(fields[4])?,
            err: parse_real(fields[5])?,
            seconds: parse_real(fields[6])?,
            factor_seconds: parse_real(fields[7])?,
        });
    }
    Ok(records)
}

/// Log-log slope of err against tau over the best-fitting window of at least
/// `min_window` consecutive points, ignoring points at or below `floor`
/// (rounding plateaus).
///
/// All windows are fitted by least squares; among those whose RMS deviation
/// is within a factor 2 (plus a small absolute slack) of the best, the
/// longest is chosen, ties resolved toward the small-tau end. Returns `None`
/// when fewer than `min_window` usable points remain.
pub fn convergence_slope(points: &[(f64, f64)], floor: f64, min_window: usize) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(tau, err)| *tau > 0.0 && err.is_finite() && *err > floor)
        .map(|&(tau, err)| (tau.ln(), err.ln()))
        .collect();
    let min_window = min_window.max(2);
    if usable.len() < min_window {
        return None;
    }
    struct Fit {
        start: usize,
        len: usize,
        slope: f64,
        rms: f64,
    }
    let mut fits = Vec::new();
    for len in min_window..=usable.len() {
        for start in 0..=usable.len() - len {
            let window = &usable[start..start + len];
            let m = len as f64;
            let sx: f64 = window.iter().map(|p| p.0).sum();
            let sy: f64 = window.iter().map(|p| p.1).sum();
            let sxx: f64 = window.iter().map(|p| p.0 * p.0).sum();
            let sxy: f64 = window.iter().map(|p| p.0 * p.1).sum();
            let denom = m * sxx - sx * sx;
            if denom == 0.0 {
                continue;
            }
            let slope = (m * sxy - sx * sy) / denom;
            let intercept = (sy - slope * sx) / m;
            let rms = (window
                .iter()
                .map(|p| {
                    let r = p.1 - (slope * p.0 + intercept);
                    r * r
                })
                .sum::<f64>()
                / m)
                .sqrt();
            fits.push(Fit {
                start,
                len,
                slope,
                rms,
            });
        }
    }
    let best_rms = fits.iter().map(|f| f.rms).fold(f64::INFINITY, f64::min);
    fits.into_iter()
        .filter(|f| f.rms <= 2.0 * best_rms + 0.02)
        .max_by(|a, b| (a.len, a.start).cmp(&(b.len, b.start)))
        .map(|f| f.slope)
}

/// Writes a log-log scatter of (seconds, err) per (method, k) series as a
/// standalone SVG file.
pub fn write_svg(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 480.0;
    const MARGIN: f64 = 50.0;
    let usable: Vec<&ExperimentRecord> = records
        .iter()
        .filter(|r| r.seconds > 0.0 && r.err.is_finite() && r.err > 0.0)
        .collect();
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if usable.is_empty() {
        out.push_str("<text x=\"20\" y=\"30\">no finite data points</text>\n</svg>\n");
        std::fs::write(path, out)?;
        return Ok(());
    }
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &usable {
        x_lo = x_lo.min(r.seconds.log10());
        x_hi = x_hi.max(r.seconds.log10());
        y_lo = y_lo.min(r.err.log10());
        y_hi = y_hi.max(r.err.log10());
    }
    // breathing room and degenerate-range guards
    if x_hi - x_lo < 1e-9 {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if y_hi - y_lo < 1e-9 {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let to_x = |v: f64| MARGIN + (v.log10() - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let to_y =
        |v: f64| HEIGHT - MARGIN - (v.log10() - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

    // decade grid lines
    for d in (x_lo.floor() as i64)..=(x_hi.ceil() as i64) {
        let x = MARGIN + (d as f64 - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
        if (MARGIN..=WIDTH - MARGIN).contains(&x) {
            out.push_str(&format!(
                "<line x1=\"{x:.1}\" y1=\"{MARGIN}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#ddd\"/>\n<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\">1e{d}</text>\n",
                HEIGHT - MARGIN,
                HEIGHT - MARGIN + 14.0
            ));
        }
    }
    for d in (y_lo.floor() as i64)..=(y_hi.ceil() as i64) {
        let y = HEIGHT - MARGIN - (d as f64 - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
        if (MARGIN..=HEIGHT - MARGIN).contains(&y) {
            out.push_str(&format!(
                "<line x1=\"{MARGIN}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>\n<text x=\"{:.1}\" y=\"{y:.1}\" font-size=\"10\" text-anchor=\"end\">1e{d}</text>\n",
                WIDTH - MARGIN,
                MARGIN - 4.0
            ));
        }
    }
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">seconds</text>\n",
        WIDTH / 2.0,
        HEIGHT - 10.0
    ));
    out.push_str(&format!(
        "<text x=\"14\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">endpoint error</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));

    const PALETTE: [&str; 8] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
    ];
    let mut series: Vec<(MethodKind, usize)> = usable.iter().map(|r| (r.method, r.k)).collect();
    series.sort();
    series.dedup();
    for (si, (method, k)) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut pts: Vec<&&ExperimentRecord> = usable
            .iter()
            .filter(|r| r.method == *method && r.k == *k)
            .collect();
        pts.sort_by_key(|r| r.steps);
        let path_data: Vec<String> = pts
            .iter()
            .map(|r| format!("{:.1},{:.1}", to_x(r.seconds), to_y(r.err)))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path_data.join(" ")
        ));
        for r in &pts {
            out.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>\n",
                to_x(r.seconds),
                to_y(r.err)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"{color}\">{method}({k})</text>\n",
            WIDTH - MARGIN + 4.0,
            MARGIN + 14.0 * si as f64
        ));
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out)?;
    Ok(())
}
