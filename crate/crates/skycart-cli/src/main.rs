use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use skycart::analysis::{
    delta_theta_bound_constant, delta_theta_bound_sup, estimate_gamma_out, inner_gain_analytic,
    inner_gain_numeric, lyapunov_feasible, small_gain_admissible, GainEstimates, LyapunovParams,
};
use skycart::equilibria::{
    attainable_alpha_range, attainable_beta_range, controller_equilibrium_attitude,
    steady_state_input,
};
use skycart_cli::scenario::{load_scenario, simulate, Scenario, ScenarioError};
use skycart_cli::verify::{run_suite, Suite};
use skycart_cli::{csv, plot};

#[derive(Parser)]
#[command(
    name = "skycart",
    about = "Planar UAV+UGV cooperative manipulation: simulation, equilibria, \
             stability analysis, and the reference governor",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario (governed when it configures the reference governor)
    Simulate {
        /// Built-in name (paper-fig3, paper-fig4) or path to a TOML file
        scenario: String,
        /// Write the trajectory as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write a matplotlib script referencing the CSV (requires --csv)
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Print attainable equilibria for a scenario's parameters
    Equilibria { scenario: String },
    /// Print disturbance-bound constants, loop gains and admissibility
    Analyze {
        scenario: String,
        /// Sample count for the empirical outer-gain estimate
        #[arg(long, default_value_t = 8)]
        gamma_out_samples: usize,
    },
    /// Run the governed variant of a scenario and report the way-point trace
    Rg { scenario: String },
    /// Run acceptance checks (all, model, control, analysis, rg)
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
}

/// 0 = success, 1 = runtime/check failure, 2 = usage or configuration error.
fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(AppError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(AppError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

enum AppError {
    Config(String),
    Runtime(String),
}

impl From<ScenarioError> for AppError {
    fn from(e: ScenarioError) -> Self {
        AppError::Config(e.to_string())
    }
}

impl From<skycart::Error> for AppError {
    fn from(e: skycart::Error) -> Self {
        AppError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Runtime(e.to_string())
    }
}

fn run(cli: Cli) -> Result<ExitCode, AppError> {
    match cli.command {
        Command::Simulate {
            scenario,
            csv: csv_path,
            plot: plot_path,
        } => {
            let sc = load_scenario(&scenario)?;
            if plot_path.is_some() && csv_path.is_none() {
                return Err(AppError::Config("--plot requires --csv".to_string()));
            }
            run_and_report(&sc, csv_path.as_deref(), plot_path.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Equilibria { scenario } => {
            let sc = load_scenario(&scenario)?;
            print_equilibria(&sc);
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze {
            scenario,
            gamma_out_samples,
        } => {
            let sc = load_scenario(&scenario)?;
            print_analysis(&sc, gamma_out_samples);
            Ok(ExitCode::SUCCESS)
        }
        Command::Rg { scenario } => {
            let sc = load_scenario(&scenario)?;
            if sc.rg.is_none() {
                return Err(AppError::Config(format!(
                    "scenario {scenario} does not configure [rg]"
                )));
            }
            run_and_report(&sc, None, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let suite = Suite::parse(&suite)
                .ok_or_else(|| AppError::Config(format!("unknown suite: {suite}")))?;
            let results = run_suite(suite);
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!(
                "{} of {} criteria passed",
                results.len() - failed,
                results.len()
            );
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn run_and_report(
    sc: &Scenario,
    csv_path: Option<&Path>,
    plot_path: Option<&Path>,
) -> Result<(), AppError> {
    let t0 = Instant::now();
    let traj = simulate(sc)?;
    let elapsed = t0.elapsed().as_secs_f64();
    let last = traj.last().expect("non-empty trajectory");

    println!(
        "simulated {:.1} s ({} samples) in {:.2} s",
        last.t,
        traj.len(),
        elapsed
    );
    println!(
        "final state: x = {:.4} m, alpha = {:.4} rad, theta = {:.4} rad",
        last.state.x,
        last.state.alpha,
        last.state.theta()
    );
    println!(
        "tracking errors at end: |x - ref| = {:.2e} m, |alpha - ref| = {:.2e} rad",
        (last.state.x - last.applied.x_ref).abs(),
        (last.state.alpha - last.applied.alpha_ref).abs()
    );
    println!("min applied thrust u1 = {:.4} N", traj.min_u1());
    if let Some(rg) = &sc.rg {
        let violations = skycart::refgov::violation_count(&traj, &sc.params, &sc.limits, rg);
        println!(
            "governor: applied reference ended at (x = {:.4}, alpha = {:.4}), \
             constraint violations = {violations}",
            last.applied.x_ref, last.applied.alpha_ref
        );
    }

    if let Some(csv_path) = csv_path {
        csv::export_csv(&traj, csv_path)?;
        println!("wrote {}", csv_path.display());
        if let Some(plot_path) = plot_path {
            plot::emit_plot_script(&[csv_path], plot_path)?;
            println!("wrote {}", plot_path.display());
        }
    }
    Ok(())
}

fn print_equilibria(sc: &Scenario) {
    let range = attainable_alpha_range(&sc.params, &sc.limits);
    println!(
        "attainable inclination range: [{:.6}, {:.6}] rad",
        range.alpha_min, range.alpha_max
    );
    let alpha = sc.desired.alpha_ref;
    match attainable_beta_range(alpha, &sc.params, &sc.limits) {
        Ok(betas) => println!(
            "attitude range holding alpha = {alpha:.6}: [{:.6}, {:.6}] rad",
            betas.beta_min, betas.beta_max
        ),
        Err(e) => println!("attitude range holding alpha = {alpha:.6}: {e}"),
    }
    let beta_eq = controller_equilibrium_attitude(alpha, &sc.controller.outer, &sc.params);
    println!("controller equilibrium attitude: beta = {beta_eq:.6} rad");
    match steady_state_input(alpha, beta_eq, &sc.params, &sc.limits) {
        Ok(u) => println!(
            "steady-state input: u1 = {:.4} N, u2 = {:.4} N m, u3 = {:.4} N",
            u.u1(),
            u.u2(),
            u.u3()
        ),
        Err(e) => println!("steady-state input: {e}"),
    }
}

fn print_analysis(sc: &Scenario, gamma_out_samples: usize) {
    let outer = &sc.controller.outer;
    let inner = &sc.controller.inner;
    println!(
        "disturbance bound constant 1/(gamma eps) = {:.6} N (sup over eps: {:.6} N)",
        delta_theta_bound_constant(outer),
        delta_theta_bound_sup(&sc.limits)
    );

    let gamma_in = match inner_gain_analytic(inner.k_p_beta(), inner.k_d_beta(), sc.params.i_u()) {
        Ok(g) => {
            println!("inner-loop gain (critically damped closed form): {g:.6}");
            g
        }
        Err(_) => {
            let est = inner_gain_numeric(
                inner.k_p_beta(),
                inner.k_d_beta(),
                sc.params.i_u(),
                12.0,
                1e-4,
            );
            println!(
                "inner-loop gain (numeric l1, gains not critically damped): {:.6} \
                 (tail fraction {:.1e})",
                est.gain, est.tail_fraction
            );
            est.gain
        }
    };

    let gamma_out = estimate_gamma_out(&sc.controller, &sc.params, &sc.limits, gamma_out_samples);
    println!(
        "outer-loop gain estimate over {gamma_out_samples} random excitations: {gamma_out:.4} \
         (heuristic upper estimate, not a certified bound)"
    );
    println!(
        "loop product gamma_in * gamma_out = {:.4}",
        gamma_in * gamma_out
    );

    let theta_tilde_max = 1.0;
    match GainEstimates::new(gamma_in, gamma_out, theta_tilde_max) {
        Ok(ge) => println!(
            "small-gain admissibility of the initial state (radius {theta_tilde_max} rad): {}",
            if small_gain_admissible(&sc.initial_state, &ge) {
                "admissible (sufficient condition holds)"
            } else {
                "not admissible (condition is sufficient, not necessary)"
            }
        ),
        Err(e) => println!("small-gain admissibility: {e}"),
    }

    // outer-loop damping in the omega^2 / 2 xi omega parameterization
    let i0 = sc.params.i0();
    let omega = (outer.k_p_alpha() / i0).sqrt();
    let xi = outer.k_d_alpha() / i0 / (2.0 * omega);
    let mut max_tt: f64 = 0.0;
    for k in 1..200 {
        let tt = k as f64 * FRAC_PI_2 / 200.0;
        let feasible = (1..20).any(|j| {
            let nu = j as f64 / 20.0;
            lyapunov_feasible(&LyapunovParams::new(xi, nu, tt).unwrap()).feasible
        });
        if feasible {
            max_tt = tt;
        }
    }
    println!(
        "outer loop xi = {xi:.4}: Lyapunov feasibility holds up to \
         theta_tilde_max ~ {max_tt:.4} rad"
    );
}
