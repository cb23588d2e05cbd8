use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::bail;
use clap::{Args, Parser, Subcommand, ValueEnum};

use schwarz_time::experiments::{
    fig_left, fig_right, log_grid, reference_target, theorem_sweeps, validate_all, ExperimentSpec,
};
use schwarz_time::model::{heat_problem_1d, Decomposition, TimeGrid, VariantId};
use schwarz_time::schwarz::{
    run_schwarz, scalar_contraction_oracle, InitStrategy, SchwarzConfig, DEFAULT_SEED,
};
use schwarz_time::spectral::{optimal_theta, sweep, SpectralParams};
use schwarz_time::{solve_monolithic, Error};

/// Schwarz methods in time for parabolic optimal control: convergence-factor
/// sweeps, all-at-once solves, Schwarz runs and experiment reproduction.
///
/// All defaults reproduce the reference setup: nu = 0.1, gamma = 10, T = 1,
/// alpha = 0.4, heat control on (0, 1) with h_x = 1/32 and nt = 40 time
/// steps (the coarsest round mesh containing alpha as a node).
#[derive(Parser)]
#[command(name = "schwarz-time", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Control penalty nu > 0
    #[arg(long, default_value_t = 0.1)]
    nu: f64,
    /// Terminal penalty gamma >= 0
    #[arg(long, default_value_t = 10.0)]
    gamma: f64,
    /// Time horizon T > 0
    #[arg(long = "T", default_value_t = 1.0)]
    horizon: f64,
    /// Interface time alpha in (0, T)
    #[arg(long, default_value_t = 0.4)]
    alpha: f64,
}

impl ParamArgs {
    fn spectral(&self) -> Result<SpectralParams, Error> {
        SpectralParams::new(self.nu, self.gamma, self.horizon, self.alpha)
    }

    fn print(&self) {
        println!(
            "params: nu={} gamma={} T={} alpha={}",
            self.nu, self.gamma, self.horizon, self.alpha
        );
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum InitArg {
    Zeros,
    Random,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ReproduceTarget {
    FigLeft,
    FigRight,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the convergence factor of a variant over an eigenvalue grid
    RhoSweep {
        #[arg(long, default_value = "SD1")]
        variant: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Fixed relaxation parameter in (0, 1]
        #[arg(long, conflicts_with = "theta_opt")]
        theta: Option<f64>,
        /// Use the optimal relaxation parameter of the variant
        #[arg(long)]
        theta_opt: bool,
        /// Smallest positive eigenvalue of the grid (d = 0 is prepended)
        #[arg(long, default_value_t = 1e-2)]
        d_min: f64,
        #[arg(long, default_value_t = 1e4)]
        d_max: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        /// Output CSV path (defaults into the output directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the optimal relaxation parameter of SD1 or SN1
    Theta {
        #[arg(long, default_value = "SD1")]
        variant: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Solve the monolithic heat-control reference and write the trajectory
    Solve {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 32)]
        nx: usize,
        #[arg(long, default_value_t = 40)]
        nt: usize,
        /// Spatial domain length
        #[arg(long = "L", default_value_t = 1.0)]
        length: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Schwarz iteration on the heat test case and write its report
    Schwarz {
        #[arg(long, default_value = "SD1")]
        variant: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = 32)]
        nx: usize,
        #[arg(long, default_value_t = 40)]
        nt: usize,
        #[arg(long = "L", default_value_t = 1.0)]
        length: f64,
        #[arg(long, value_enum, default_value_t = InitArg::Zeros)]
        init: InitArg,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 15)]
        max_iter: usize,
        /// Convergence threshold relative to the first-iteration error
        #[arg(long, default_value_t = schwarz_time::schwarz::DEFAULT_REL_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the measured scalar contraction against the analytic factor
    Oracle {
        #[arg(long, default_value = "SD1")]
        variant: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Eigenvalue of the scalar problem
        #[arg(long, default_value_t = 10.0)]
        d: f64,
        /// Total time steps split across the two subdomains
        #[arg(long, default_value_t = 4096)]
        nt: usize,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
    },
    /// Re-run a canned experiment, writing CSV curves and a manifest
    Reproduce {
        #[arg(value_enum)]
        target: ReproduceTarget,
        /// Output directory (default: $SCHWARZ_TIME_OUTDIR or ./out)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suite; exits 1 on any violation
    Validate {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Samples per randomized theorem check
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

fn default_outdir() -> PathBuf {
    std::env::var_os("SCHWARZ_TIME_OUTDIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn resolve_out(out: Option<PathBuf>, name: &str) -> anyhow::Result<PathBuf> {
    let path = match out {
        Some(p) => p,
        None => default_outdir().join(name),
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    Ok(path)
}

fn run() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::RhoSweep {
            variant,
            params,
            theta,
            theta_opt,
            d_min,
            d_max,
            points,
            out,
        } => {
            let v = VariantId::parse(&variant)?;
            let p = params.spectral()?;
            if points < 2 {
                bail!("need at least 2 grid points");
            }
            if !(d_min > 0.0 && d_max > d_min) {
                bail!("need 0 < d_min < d_max");
            }
            let theta = if theta_opt {
                Some(optimal_theta(v, &p)?)
            } else {
                theta
            };
            params.print();
            println!(
                "rho-sweep: variant={v} theta={} d=[{d_min}, {d_max}] points={points}",
                theta.map_or("none".to_string(), |t| format!("{t}"))
            );
            let mut grid = vec![0.0];
            grid.extend(log_grid(d_min.log10(), d_max.log10(), points));
            let table = sweep(v, &grid, &p, theta)?;
            let path = resolve_out(out, &format!("rho_{}.csv", v.name().to_lowercase()))?;
            table.write_csv(BufWriter::new(File::create(&path)?))?;
            println!("wrote {}", path.display());
        }
        Command::Theta { variant, params } => {
            let v = VariantId::parse(&variant)?;
            let p = params.spectral()?;
            params.print();
            println!("theta_opt({v}) = {:.6}", optimal_theta(v, &p)?);
        }
        Command::Solve {
            params,
            nx,
            nt,
            length,
            out,
        } => {
            params.print();
            println!("solve: nx={nx} nt={nt} L={length}");
            let (prob, _) =
                heat_problem_1d(length, nx, params.nu, params.gamma, params.horizon, reference_target)?;
            let grid = TimeGrid::new(0.0, params.horizon, nt)?;
            let traj = solve_monolithic(&prob, &grid)?;
            let path = resolve_out(out, "trajectory.csv")?;
            traj.write_csv(BufWriter::new(File::create(&path)?))?;
            println!("wrote {}", path.display());
        }
        Command::Schwarz {
            variant,
            params,
            theta,
            nx,
            nt,
            length,
            init,
            seed,
            max_iter,
            tol,
            out,
        } => {
            let v = VariantId::parse(&variant)?;
            params.print();
            println!(
                "schwarz: variant={v} theta={theta} nx={nx} nt={nt} init={init:?} seed={seed} \
                 max_iter={max_iter} tol={tol:e}"
            );
            let (prob, _) =
                heat_problem_1d(length, nx, params.nu, params.gamma, params.horizon, reference_target)?;
            let grid = TimeGrid::new(0.0, params.horizon, nt)?;
            let decomp = Decomposition::new(&grid, params.alpha)?;
            let reference = solve_monolithic(&prob, &grid)?;
            let cfg = SchwarzConfig {
                theta,
                max_iter,
                tol,
                init: match init {
                    InitArg::Zeros => InitStrategy::Zeros,
                    InitArg::Random => InitStrategy::SeededRandom { scale: 1.0, seed },
                },
                ..SchwarzConfig::new(v)
            };
            let report = run_schwarz(&prob, &decomp, &cfg, &reference)?;
            let path = resolve_out(out, &format!("schwarz_{}.csv", v.name().to_lowercase()))?;
            report.write_csv(BufWriter::new(File::create(&path)?))?;
            println!(
                "iterations={} converged={} diverged={} contraction={}",
                report.iterations,
                report.converged,
                report.diverged,
                report
                    .measured_contraction
                    .map_or("n/a".to_string(), |c| format!("{c:.6e}"))
            );
            println!("wrote {}", path.display());
        }
        Command::Oracle {
            variant,
            params,
            d,
            nt,
            theta,
        } => {
            let v = VariantId::parse(&variant)?;
            let p = params.spectral()?;
            params.print();
            println!("oracle: variant={v} d={d} nt={nt} theta={theta}");
            let (measured, analytic) = scalar_contraction_oracle(d, &p, v, nt, theta)?;
            let rel = (measured - analytic).abs() / analytic.abs().max(f64::MIN_POSITIVE);
            println!("measured = {measured:.12e}");
            println!("analytic = {analytic:.12e}");
            println!("relative gap = {rel:.3e}");
        }
        Command::Reproduce { target, out } => {
            let outdir = out.unwrap_or_else(default_outdir);
            match target {
                ReproduceTarget::FigLeft => {
                    let spec = ExperimentSpec::reference("fig_left", &outdir);
                    println!("reproduce fig-left: {spec:?}");
                    let curves = fig_left(&spec)?;
                    println!(
                        "wrote {} curves to {}",
                        curves.len(),
                        outdir.join("fig_left").display()
                    );
                }
                ReproduceTarget::FigRight => {
                    let spec = ExperimentSpec::reference("fig_right", &outdir);
                    println!("reproduce fig-right: {spec:?}");
                    let reports = fig_right(&spec)?;
                    for (name, r) in &reports {
                        println!(
                            "  {name}: iterations={} converged={} diverged={}",
                            r.iterations, r.converged, r.diverged
                        );
                    }
                    println!("wrote reports to {}", outdir.join("fig_right").display());
                }
            }
        }
        Command::Validate { seed, count } => {
            println!("validate: seed={seed} count={count}");
            let mut report = validate_all(seed)?;
            if count != 200 {
                // re-run the randomized sweeps at the requested sample count
                report = theorem_sweeps(seed, count, None)?;
            }
            let mut failed = false;
            for c in &report.checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
                failed |= !c.passed;
            }
            return Ok(!failed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
