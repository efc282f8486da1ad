use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geomphase::config::{parse_number, Settings};
use geomphase::evolver::Propagator;
use geomphase::gp::geometric_phase_stream;
use geomphase::mzi::interference_amplitude;
use geomphase::oracles::{self, QubitDephasingParams};
use geomphase::sweep::{emit_csv, render_heatmap, run_sweep, write_csv, Colormap};
use geomphase::vdp::{gp_numeric, initial_state, VdpParams};
use geomphase::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "geomphase", version, about = "Geometric phases of dissipative spin systems")]
struct Cli {
    /// Flat `key = value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for grid sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: standard output)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Accepted for compatibility; every run is deterministic
    #[arg(long, global = true)]
    seedless: bool,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Per-key overrides of the configuration file.
#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long, global = true, value_name = "X")]
    omega0: Option<String>,
    #[arg(long = "gamma-g", alias = "gamma_g", global = true, value_name = "X")]
    gamma_g: Option<String>,
    #[arg(long = "gamma-d", alias = "gamma_d", global = true, value_name = "X")]
    gamma_d: Option<String>,
    #[arg(long, global = true, value_name = "X")]
    alpha: Option<String>,
    #[arg(long, global = true, value_name = "X")]
    omega: Option<String>,
    /// Signal strength
    #[arg(long = "T", global = true, value_name = "X")]
    strength: Option<String>,
    #[arg(long = "omega-sig", alias = "omega_sig", global = true, value_name = "X")]
    omega_sig: Option<String>,
    #[arg(long, global = true, value_name = "X", allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long = "phi-sig", alias = "phi_sig", global = true, value_name = "X", allow_hyphen_values = true)]
    phi_sig: Option<String>,
    /// Evolution time, or `cycle` for one turn of the axis
    #[arg(long, global = true, value_name = "X")]
    tau: Option<String>,
    #[arg(long = "n-step", alias = "n_step", global = true, value_name = "N")]
    n_step: Option<String>,
    #[arg(long = "delta-min", alias = "delta_min", global = true, value_name = "X", allow_hyphen_values = true)]
    delta_min: Option<String>,
    #[arg(long = "delta-max", alias = "delta_max", global = true, value_name = "X", allow_hyphen_values = true)]
    delta_max: Option<String>,
    #[arg(long = "t-min", alias = "t_min", global = true, value_name = "X")]
    t_min: Option<String>,
    #[arg(long = "t-max", alias = "t_max", global = true, value_name = "X")]
    t_max: Option<String>,
    #[arg(long = "n-delta", alias = "n_delta", global = true, value_name = "N")]
    n_delta: Option<String>,
    #[arg(long = "n-t", alias = "n_t", global = true, value_name = "N")]
    n_t: Option<String>,
    /// sync-analytic, sync-numeric, gp-numeric or gp-analytic
    #[arg(long, global = true, value_name = "MODE")]
    mode: Option<String>,
    #[arg(long = "degeneracy-tol", global = true, value_name = "X")]
    degeneracy_tol: Option<String>,
    #[arg(long = "pivot-tol", global = true, value_name = "X")]
    pivot_tol: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        let all = [
            ("omega0", &self.omega0),
            ("gamma_g", &self.gamma_g),
            ("gamma_d", &self.gamma_d),
            ("alpha", &self.alpha),
            ("omega", &self.omega),
            ("T", &self.strength),
            ("omega_sig", &self.omega_sig),
            ("delta", &self.delta),
            ("phi_sig", &self.phi_sig),
            ("tau", &self.tau),
            ("n_step", &self.n_step),
            ("delta_min", &self.delta_min),
            ("delta_max", &self.delta_max),
            ("t_min", &self.t_min),
            ("t_max", &self.t_max),
            ("n_delta", &self.n_delta),
            ("n_t", &self.n_t),
            ("mode", &self.mode),
            ("degeneracy_tol", &self.degeneracy_tol),
            ("pivot_tol", &self.pivot_tol),
        ];
        all.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect()
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Geometric phase of one lab-frame run
    Gp {
        /// Also run the reversed path
        #[arg(long)]
        reverse: bool,
    },
    /// Detuning/strength grid as CSV
    Tongue {
        /// Also write an SVG heatmap
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value = "viridis")]
        colormap: String,
    },
    /// Convergence of the dephasing-qubit phase with the number of steps
    BenchmarkQubit {
        #[arg(long = "n-steps", value_delimiter = ',', default_value = "200,400,800,1600,3200")]
        n_steps: Vec<usize>,
        #[arg(long, default_value = "1")]
        eta: String,
        #[arg(long, default_value = "0.2")]
        lambda: String,
        #[arg(long, default_value = "pi/4")]
        theta0: String,
        /// Defaults to 2π/η
        #[arg(long = "qubit-tau")]
        qubit_tau: Option<String>,
    },
    /// Interferometric visibility and phase against time
    Mzi {
        #[arg(long = "tau-max")]
        tau_max: Option<String>,
        #[arg(long = "n-tau", default_value_t = 50)]
        n_tau: usize,
    },
    /// Print closed-form reference values
    Oracle {
        /// blockade-ratio, populations, coherences, sync-measure, gp-no-signal,
        /// gp-cyclic, gp-noncyclic or qubit-dephasing
        name: String,
    },
}

fn usage(key: &str, reason: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), reason: reason.into() }
}

fn number(key: &str, text: &str) -> Result<f64> {
    parse_number(text).ok_or_else(|| usage(key, format!("not a number: `{text}`")))
}

fn settings(cli: &Cli) -> Result<Settings> {
    let mut s = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    for (key, value) in cli.overrides.pairs() {
        s.set(key, value)?;
    }
    if let Some(n) = cli.threads {
        s.threads = Some(n).filter(|&n| n > 0);
    }
    Ok(s)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => std::fs::File::create(p)
            .map(|f| Box::new(std::io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|source| Error::Io { path: p.to_path_buf(), source }),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn write_io(path: Option<&Path>, r: std::io::Result<()>) -> Result<()> {
    r.map_err(|source| Error::Io { path: path.map_or_else(|| "<stdout>".into(), Path::to_path_buf), source })
}

fn run_gp(s: &Settings, out: Option<&Path>, reverse: bool) -> Result<()> {
    let p = s.vdp_params()?;
    let opts = s.gp_options()?;
    let mut w = output(out)?;
    let mut text = String::new();
    let mut report = |label: &str, p: &VdpParams| -> Result<()> {
        let r = gp_numeric(p, &opts)?;
        text.push_str(&format!(
            "{label}gamma = {:.12}\n{label}visibility = {:.12}\n{label}pivot_switches = {:?}\n",
            r.gamma, r.visibility, r.pivot_switches
        ));
        Ok(())
    };
    report("", &p)?;
    if reverse {
        report("reversed_", &VdpParams { axis: p.axis.reversed(), ..p })?;
    }
    text.push_str(&format!("analytic_gamma = {:.12}\n", oracles::gp_noncyclic(&p, p.tau)));
    write_io(out, w.write_all(text.as_bytes()))
}

fn run_tongue(s: &Settings, out: Option<&Path>, svg: Option<&Path>, colormap: &str) -> Result<()> {
    let cfg = s.sweep_config()?;
    let colormap: Colormap = colormap.parse().map_err(|e: String| usage("colormap", e))?;
    let table = run_sweep(&cfg)?;
    match out {
        Some(path) => emit_csv(&table, path)?,
        None => write_csv(&table, std::io::stdout().lock())
            .map_err(|e| Error::Io { path: "<stdout>".into(), source: e.into() })?,
    }
    if let Some(path) = svg {
        render_heatmap(&table, path, colormap)?;
    }
    let flagged = table.rows.iter().filter(|r| r.flag.is_some()).count();
    if flagged > 0 {
        eprintln!("{flagged} of {} grid points flagged", table.rows.len());
    }
    Ok(())
}

fn run_benchmark(
    out: Option<&Path>,
    n_steps: &[usize],
    eta: &str,
    lambda: &str,
    theta0: &str,
    tau: Option<&str>,
) -> Result<()> {
    let eta = number("eta", eta)?;
    let lambda = number("lambda", lambda)?;
    let theta0 = number("theta0", theta0)?;
    let tau = match tau {
        Some(t) => number("qubit_tau", t)?,
        None => 2.0 * std::f64::consts::PI / eta.abs(),
    };
    let q = QubitDephasingParams { eta, lambda, theta0, tau };
    let exact = oracles::qubit_dephasing_gp(&q);
    let model = oracles::qubit_dephasing_model(eta, lambda)?;
    let mut text = String::from("n_step,gamma,exact,error\n");
    let mut points = Vec::new();
    for &n in n_steps {
        let states = Propagator::new(&model, oracles::qubit_initial_state(theta0), 0.0, tau, n)?;
        let r = geometric_phase_stream(states, tau / n as f64, &Default::default())?;
        let err = geomphase::gp::principal_arg(geomphase::C64::from_polar(1.0, r.gamma - exact.gamma)).abs();
        text.push_str(&format!("{n},{:.16e},{:.16e},{:.16e}\n", r.gamma, exact.gamma, err));
        points.push((n as f64, err));
    }
    write_io(out, output(out)?.write_all(text.as_bytes()))?;
    if let Some(slope) = log_log_slope(&points) {
        eprintln!("log-log slope {slope:.3}");
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x` over positive points.
fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn run_mzi(s: &Settings, out: Option<&Path>, tau_max: Option<&str>, n_tau: usize) -> Result<()> {
    let p = s.vdp_params()?;
    let tau_max = match tau_max {
        Some(t) => number("tau_max", t)?,
        None => p.tau,
    };
    if n_tau < 1 || tau_max.is_nan() || tau_max < 0.0 {
        return Err(usage("n_tau", "need n_tau >= 1 and tau_max >= 0"));
    }
    let model = geomphase::vdp::build_lab_frame_model(&p)?;
    let rho0 = initial_state(&p)?;
    let mut text = String::from("tau,visibility,phase,flag\n");
    for k in 0..=n_tau {
        let tau = tau_max * k as f64 / n_tau as f64;
        let z = interference_amplitude(&rho0, &model, tau)?;
        let v = z.norm();
        let (phase, flag) = if v < geomphase::gp::MIN_MODULUS {
            (String::new(), "ill_conditioned")
        } else {
            (format!("{:.16e}", geomphase::gp::principal_arg(z)), "")
        };
        text.push_str(&format!("{tau:.16e},{v:.16e},{phase},{flag}\n"));
    }
    write_io(out, output(out)?.write_all(text.as_bytes()))
}

fn run_oracle(s: &Settings, out: Option<&Path>, name: &str) -> Result<()> {
    let p = s.vdp_params()?;
    let delta = p.detuning();
    let text = match name {
        "blockade-ratio" => format!("{:.4}\n", oracles::blockade_ratio()),
        "populations" => {
            let [a, b, c] = oracles::vdp_populations(p.gamma_g, p.gamma_d);
            format!("p_plus1 = {a:.12}\np_0 = {b:.12}\np_minus1 = {c:.12}\n")
        }
        "coherences" => {
            let (a, b) = oracles::vdp_coherences(p.gamma_g, p.gamma_d, delta, p.phi_sig);
            format!("c_plus1_0 = {} {:+}i\nc_0_minus1 = {} {:+}i\n", a.re, a.im, b.re, b.im)
        }
        "sync-measure" => {
            let c = oracles::vdp_coherences(p.gamma_g, p.gamma_d, delta, p.phi_sig);
            format!(
                "S = {:.12e}\nphi_max = {:.12}\n",
                oracles::sync_measure_closed_form(p.strength, c),
                oracles::sync_phase_closed_form(c)
            )
        }
        "gp-no-signal" => {
            format!("{:.12}\n", oracles::gp_no_signal(p.axis.alpha, oracles::vdp_populations(p.gamma_g, p.gamma_d)))
        }
        "gp-cyclic" => format!("{:.12}\n", oracles::gp_cyclic_with_signal(&p)),
        "gp-noncyclic" => format!("{:.12}\n", oracles::gp_noncyclic(&p, p.tau)),
        "qubit-dephasing" => {
            let q = QubitDephasingParams {
                eta: 1.0,
                lambda: 0.2,
                theta0: std::f64::consts::FRAC_PI_4,
                tau: 2.0 * std::f64::consts::PI,
            };
            let g = oracles::qubit_dephasing_gp(&q);
            format!("gamma = {:.12}\narg_term = {:.12}\nlog_term = {:.12}\n", g.gamma, g.arg_term, g.log_term)
        }
        other => return Err(usage("oracle", format!("unknown oracle `{other}`"))),
    };
    write_io(out, output(out)?.write_all(text.as_bytes()))
}

fn run(cli: &Cli) -> Result<()> {
    let s = settings(cli)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Gp { reverse } => run_gp(&s, out, *reverse),
        Command::Tongue { svg, colormap } => run_tongue(&s, out, svg.as_deref(), colormap),
        Command::BenchmarkQubit { n_steps, eta, lambda, theta0, qubit_tau } => {
            run_benchmark(out, n_steps, eta, lambda, theta0, qubit_tau.as_deref())
        }
        Command::Mzi { tau_max, n_tau } => run_mzi(&s, out, tau_max.as_deref(), *n_tau),
        Command::Oracle { name } => run_oracle(&s, out, name),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [100.0, 200.0, 400.0].iter().map(|&n: &f64| (n, 3.0 * n.powi(-4))).collect();
        assert!((log_log_slope(&pts).unwrap() + 4.0).abs() < 1e-12);
        assert!(log_log_slope(&pts[..1]).is_none());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
