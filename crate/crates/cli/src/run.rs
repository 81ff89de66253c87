use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use stlsq_core::baselines::{crank_nicolson, rk4, two_sided, CnOptions, SteppedTrajectory};
use stlsq_core::ode::{sup_error, to_series, CosineOde};
use stlsq_core::pde::{
    c0_error, gaussian_initial_datum, reference_solution, PeriodicSchrodinger,
};
use stlsq_core::{Complex64, FourierField2D, HilbertElement, MovingCosinePotential};

use crate::config::{CollocationRule, Experiment, ExperimentConfig, Method};
use crate::error::{CliError, Result};
use crate::plot::{loglog_svg, Series};
use crate::records::{write_csv_file, ConvergenceRecord};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "BENCH_THREADS";

pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

#[derive(Debug, Clone, Copy)]
enum Job {
    Chebyshev { k: usize, rule: CollocationRule },
    Stepper { method: Method, steps: usize },
}

/// Runs the experiment and writes `<experiment>.csv` and `<experiment>.svg`
/// into the configured output directory (the working directory if unset).
pub fn run(config: &ExperimentConfig) -> Result<Vec<ConvergenceRecord>> {
    let records = run_records(config)?;
    let dir = config
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    write_outputs(config, &records, &dir)?;
    Ok(records)
}

/// The records only, in parameter order. Independent points run in parallel.
pub fn run_records(config: &ExperimentConfig) -> Result<Vec<ConvergenceRecord>> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads_from_env() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        if config.experiment.is_pde() {
            let mut out = Vec::new();
            for &tau in &config.tau_values {
                out.extend(pde_records(config, tau)?);
            }
            Ok(out)
        } else {
            ode_records(config)
        }
    })
}

fn jobs(config: &ExperimentConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    if config.uses(Method::Chebyshev) {
        for &rule in &config.collocation {
            for &k in &config.k_values {
                jobs.push(Job::Chebyshev { k, rule });
            }
        }
    }
    for method in [Method::CrankNicolson, Method::Rk4] {
        if config.uses(method) {
            for &steps in &config.step_values {
                jobs.push(Job::Stepper { method, steps });
            }
        }
    }
    jobs
}

fn chebyshev_label(config: &ExperimentConfig, rule: CollocationRule) -> String {
    if config.collocation.len() > 1 || config.experiment == Experiment::OdeAliasing {
        format!("chebyshev L={rule}")
    } else {
        Method::Chebyshev.name().to_string()
    }
}

/// Runs `f` `repeats` times; returns the first result and the median time.
fn timed<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<(T, f64)> {
    let mut first = None;
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let out = f()?;
        times.push(start.elapsed().as_secs_f64());
        first.get_or_insert(out);
    }
    times.sort_by(f64::total_cmp);
    Ok((first.expect("at least one run"), times[times.len() / 2]))
}

fn step<E: HilbertElement, H: stlsq_core::TimeOperator<E>>(
    method: Method,
    op: &H,
    y0: E,
    steps: usize,
) -> Result<SteppedTrajectory<E>> {
    let traj = match method {
        Method::CrankNicolson => two_sided(y0, 1.0, steps, |y, g| {
            crank_nicolson(op, y, g, CnOptions::default())
        })?,
        Method::Rk4 => two_sided(y0, 1.0, steps, |y, g| rk4(op, y, g))?,
        Method::Chebyshev => unreachable!("not a stepper"),
    };
    Ok(traj)
}

fn ode_records(config: &ExperimentConfig) -> Result<Vec<ConvergenceRecord>> {
    let ode = CosineOde::new(
        config.a,
        config.omega,
        Complex64::new(config.eta0[0], config.eta0[1]),
    );
    let coeff = ode.coefficient();
    jobs(config)
        .par_iter()
        .map(|job| match *job {
            Job::Chebyshev { k, rule } => {
                let problem = ode
                    .build_problem(k, rule.nodes(k))?
                    .with_cg_tol(config.cg_tol)?
                    .with_cg_maxit(config.cg_maxit);
                let ((u, diag), wall) =
                    timed(config.timing_repeats, || Ok(problem.pcg_solve()?))?;
                Ok(ConvergenceRecord {
                    method: chebyshev_label(config, rule),
                    param: k,
                    error: sup_error(&to_series(u), &ode),
                    iterations: Some(diag.iterations),
                    wall_time_s: wall,
                })
            }
            Job::Stepper { method, steps } => {
                let (traj, wall) = timed(config.timing_repeats, || {
                    step(method, &coeff, ode.eta0, steps)
                })?;
                Ok(ConvergenceRecord {
                    method: method.name().to_string(),
                    param: steps,
                    error: traj.max_error(|t| ode.exact_solution(t)),
                    iterations: None,
                    wall_time_s: wall,
                })
            }
        })
        .collect()
}

fn pde_problem(config: &ExperimentConfig, tau: f64) -> Result<PeriodicSchrodinger> {
    let pot = MovingCosinePotential {
        c1: config.c1,
        c2: config.c2,
        amplitude: config.amplitude,
    };
    let sigma = config.sigma.unwrap_or(config.n as f64 / 8.0);
    let u0 = gaussian_initial_datum(config.n, sigma)?;
    Ok(PeriodicSchrodinger::new(tau, pot, u0)?)
}

fn pde_records(config: &ExperimentConfig, tau: f64) -> Result<Vec<ConvergenceRecord>> {
    let p = pde_problem(config, tau)?;
    let samples = stlsq_core::ode::uniform_samples(config.samples);
    let reference = reference_solution(&p, &samples, config.reference_steps)?;
    let op = p.interaction_operator()?;
    let suffix = if config.tau_values.len() > 1 {
        format!(" tau={tau}")
    } else {
        String::new()
    };

    jobs(config)
        .par_iter()
        .map(|job| match *job {
            Job::Chebyshev { k, rule } => {
                let problem = p
                    .build_problem_with_l(k, rule.nodes(k))?
                    .with_cg_tol(config.cg_tol)?
                    .with_cg_maxit(config.cg_maxit);
                let ((v, diag), wall) =
                    timed(config.timing_repeats, || Ok(problem.pcg_solve()?))?;
                Ok(ConvergenceRecord {
                    method: chebyshev_label(config, rule) + &suffix,
                    param: k,
                    error: c0_error(&v, &reference.values, &samples)?,
                    iterations: Some(diag.iterations),
                    wall_time_s: wall,
                })
            }
            Job::Stepper { method, steps } => {
                let (traj, wall) =
                    timed(config.timing_repeats, || step(method, &op, p.u0().clone(), steps))?;
                Ok(ConvergenceRecord {
                    method: method.name().to_string() + &suffix,
                    param: steps,
                    error: error_at_samples(&traj, &reference.values, steps)?,
                    iterations: None,
                    wall_time_s: wall,
                })
            }
        })
        .collect()
}

/// Max distance to the reference over the sample times, which are grid
/// points because the step count is a multiple of the sample spacing.
fn error_at_samples(
    traj: &SteppedTrajectory<FourierField2D>,
    reference: &[FourierField2D],
    steps: usize,
) -> Result<f64> {
    let intervals = reference.len() - 1;
    if intervals == 0 || steps % intervals != 0 || traj.states.len() != steps + 1 {
        return Err(CliError::Config(format!(
            "{steps} steps do not align with {} samples",
            reference.len()
        )));
    }
    let stride = steps / intervals;
    Ok(reference
        .iter()
        .enumerate()
        .map(|(j, r)| traj.states[j * stride].sub(r).norm())
        .fold(0.0, f64::max))
}

/// Writes the CSV and the SVG; returns their paths.
pub fn write_outputs(
    config: &ExperimentConfig,
    records: &[ConvergenceRecord],
    dir: &Path,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = config.experiment.name();
    let csv_path = dir.join(format!("{name}.csv"));
    write_csv_file(&csv_path, records)?;

    let (x_label, y_label) = match config.experiment {
        Experiment::PdeTiming => ("K or steps", "wall time (s)"),
        Experiment::PdeErrorVsTime => ("wall time (s)", "C0 error"),
        Experiment::PdeConvergence => ("K or steps", "C0 error"),
        Experiment::OdeConvergence | Experiment::OdeAliasing => ("K or steps", "sup error"),
    };
    let mut series: Vec<Series> = Vec::new();
    for r in records {
        let point = match config.experiment {
            Experiment::PdeTiming => (r.param as f64, r.wall_time_s),
            Experiment::PdeErrorVsTime => (r.wall_time_s, r.error),
            _ => (r.param as f64, r.error),
        };
        match series.iter_mut().find(|s| s.label == r.method) {
            Some(s) => s.points.push(point),
            None => series.push(Series {
                label: r.method.clone(),
                points: vec![point],
            }),
        }
    }
    let svg_path = dir.join(format!("{name}.svg"));
    std::fs::write(&svg_path, loglog_svg(name, x_label, y_label, &series))
        .map_err(|e| CliError::io(&svg_path, e))?;
    Ok((csv_path, svg_path))
}
