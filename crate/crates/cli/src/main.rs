use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ncsep::canonical::{build_hamiltonian, build_omega, build_q, derived_params, polynomial_check};
use ncsep::covariance::Normalization;
use ncsep::dynamics::{constraint_residual, integrate_beta, phases};
use ncsep::experiment::check::check_point;
use ncsep::experiment::config::{Config, Format};
use ncsep::experiment::sweep::write_csv;
use ncsep::experiment::toy::toy_report;
use ncsep::experiment::{find_transitions, grid, sweep, toy_config, SweepRecord};
use ncsep::pipeline::evaluate;
use ncsep::Error;

#[derive(Parser)]
#[command(name = "ncsep", version, about = "Separability sweeps for noncommutative two-mode oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Clone)]
struct Opts {
    /// JSON or TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    t_start: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[arg(long, global = true)]
    t_step: Option<f64>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
    /// Bisection width for transition times
    #[arg(long, global = true)]
    refine_tol: Option<f64>,
    /// Occupation numbers as n1,n2
    #[arg(long, global = true, value_parser = parse_state)]
    state: Option<(u32, u32)>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the separability pipeline over the time grid
    Sweep,
    /// Reproduce the built-in toy model and compare with its closed form
    Toy,
    /// Check structural identities at every grid point
    Check,
    /// Print normal frequencies and mode diagnostics at one time
    Eigen {
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
    },
    /// Integrate the displacement parameters and report phases
    Phases,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

fn parse_state(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or("expected n1,n2")?;
    let n = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}"));
    Ok((n(a)?, n(b)?))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
    fn numerical(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Validation(_) => Failure::config(e.to_string()),
            _ => Failure::numerical(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep => run_sweep(&cli.opts),
        Command::Toy => run_toy(&cli.opts),
        Command::Check => run_check(&cli.opts),
        Command::Eigen { t } => run_eigen(&cli.opts, t),
        Command::Phases => run_phases(&cli.opts),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Config from `--config` with command-line overrides applied.
fn load(opts: &Opts) -> Result<Config, Failure> {
    let path = opts.config.as_ref().ok_or_else(|| Failure::config("--config is required"))?;
    let mut cfg = Config::load(path)?;
    apply(opts, &mut cfg)?;
    Ok(cfg)
}

fn apply(opts: &Opts, cfg: &mut Config) -> Result<(), Failure> {
    let sw = &mut cfg.sweep;
    sw.t_start = opts.t_start.unwrap_or(sw.t_start);
    sw.t_end = opts.t_end.unwrap_or(sw.t_end);
    sw.t_step = opts.t_step.unwrap_or(sw.t_step);
    sw.refine_tol = opts.refine_tol.unwrap_or(sw.refine_tol);
    if let Some((n1, n2)) = opts.state {
        cfg.state.n1 = n1;
        cfg.state.n2 = n2;
    }
    match opts.format {
        Some(OutFormat::Csv) => cfg.output.format = Format::Csv,
        Some(OutFormat::Json) => cfg.output.format = Format::Json,
        None => {}
    }
    if opts.out.is_some() {
        cfg.output.path = opts.out.clone();
    }
    cfg.validate()?;
    Ok(())
}

fn sink(cfg: &Config) -> Result<Box<dyn Write>, Failure> {
    Ok(match &cfg.output.path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::config(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn times(cfg: &Config) -> Result<Vec<f64>, Failure> {
    Ok(grid(cfg.sweep.t_start, cfg.sweep.t_end, cfg.sweep.t_step)?)
}

fn emit_records(cfg: &Config, records: &[SweepRecord], extra: Option<serde_json::Value>) -> Result<(), Failure> {
    let mut w = sink(cfg)?;
    match cfg.output.format {
        Format::Csv => write_csv(records, &mut w)?,
        Format::Json => {
            let body = match extra {
                Some(report) => json!({ "records": records, "report": report }),
                None => json!(records),
            };
            serde_json::to_writer_pretty(&mut w, &body).map_err(io::Error::from)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run_sweep(opts: &Opts) -> Outcome {
    let cfg = load(opts)?;
    let osc = cfg.oscillator();
    let ts = times(&cfg)?;
    let norm = cfg.sweep.normalization;
    match sweep(&osc, &ts, cfg.state(), norm) {
        Ok(records) => {
            emit_records(&cfg, &records, None)?;
            let t: Vec<f64> = records.iter().map(|r| r.t).collect();
            let ps: Vec<f64> = records.iter().map(|r| r.report.ps).collect();
            let state = cfg.state();
            let tr = find_transitions(&t, &ps, |x| Ok(evaluate(&osc, x, state, norm)?.report.ps), cfg.sweep.refine_tol)?;
            for x in tr {
                eprintln!("transition t = {:.6} ({:?})", x.t, x.direction);
            }
            Ok(0)
        }
        Err(fail) => {
            emit_records(&cfg, &fail.completed, None)?;
            Err(Failure::from(fail.source.clone()).with_prefix(&format!("at t = {}", fail.t)))
        }
    }
}

impl Failure {
    fn with_prefix(mut self, prefix: &str) -> Self {
        self.message = format!("{prefix}: {}", self.message);
        self
    }
}

fn toy_defaults(opts: &Opts) -> Result<Config, Failure> {
    let text = r#"{"nc":{"theta":{"kind":"inverse_sqrt","a":1.0,"b":1.0}},"oscillator":{"m1":1.0,"m2":4.0,"w1":1.0,"w2":1.0}}"#;
    let mut cfg = Config::from_json(text)?;
    apply(opts, &mut cfg)?;
    debug_assert_eq!(cfg.oscillator(), toy_config());
    Ok(cfg)
}

fn run_toy(opts: &Opts) -> Outcome {
    let cfg = toy_defaults(opts)?;
    let ts = times(&cfg)?;
    let records = sweep(&toy_config(), &ts, (0, 0), Normalization::Unnormalized).map_err(|f| Failure::from(f.source))?;
    let report = toy_report(&records, cfg.sweep.refine_tol)?;
    let report_json = serde_json::to_value(&report).map_err(io::Error::from)?;
    emit_records(&cfg, &records, Some(report_json))?;

    for (name, tr) in [("pipeline", &report.pipeline_transitions), ("closed form", &report.closed_form_transitions)] {
        let list: Vec<String> = tr.iter().map(|x| format!("{:.3}", x.t)).collect();
        eprintln!("{name} transitions: [{}]", list.join(", "));
    }
    for r in &report.pipeline_runs {
        let kind = if r.separable { "separable" } else { "entangled" };
        eprintln!("region {kind}: t in [{}, {}] ({} points)", r.t_start, r.t_end, r.len);
    }
    if report.agree {
        Ok(0)
    } else {
        eprintln!(
            "warning: pipeline and closed form disagree in sign at {} grid points; largest transition gap {}",
            report.sign_disagreements.len(),
            report.max_transition_gap.map_or("n/a".to_string(), |g| format!("{g:.3}"))
        );
        Ok(4)
    }
}

fn run_check(opts: &Opts) -> Outcome {
    let cfg = load(opts)?;
    let osc = cfg.oscillator();
    let beta = cfg.state.beta0();
    let reports = times(&cfg)?.into_iter().map(|t| check_point(&osc, t, beta)).collect::<Result<Vec<_>, _>>()?;
    let mut w = sink(&cfg)?;
    match cfg.output.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &reports).map_err(io::Error::from)?;
            writeln!(w)?;
        }
        Format::Csv => {
            writeln!(w, "t,symplectic_correspondence,bopp_inverse,diagonalization,adjoint,commutator,b,c,delta,frequency_product,rsup_min_eigenvalue,rsup_scalar_agrees,beta_independence,frame_paths,ok")?;
            for r in &reports {
                let v = [
                    r.t,
                    r.symplectic_correspondence.value,
                    r.bopp_inverse.value,
                    r.diagonalization.value,
                    r.adjoint.value,
                    r.commutator.value,
                    r.b.value,
                    r.c.value,
                    r.delta.value,
                    r.frequency_product.value,
                    r.rsup_min_eigenvalue.value,
                ]
                .map(ncsep::fmt_float);
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    v.join(","),
                    r.rsup_scalar_agrees,
                    ncsep::fmt_float(r.beta_independence.value),
                    ncsep::fmt_float(r.frame_paths.value),
                    r.ok
                )?;
            }
        }
    }
    w.flush()?;
    let failed = reports.iter().filter(|r| !r.ok).count();
    if failed > 0 {
        return Err(Failure::numerical(format!("{failed} of {} grid points failed the identity checks", reports.len())));
    }
    Ok(0)
}

fn run_eigen(opts: &Opts, t: Option<f64>) -> Outcome {
    let cfg = load(opts)?;
    let t = t.unwrap_or(cfg.sweep.t_start);
    let snap = cfg.oscillator().at(t)?;
    let dp = derived_params(&snap.osc, &snap.nc)?;
    let nm = build_q(&dp)?;
    let omega = build_omega(&build_hamiltonian(&dp, &snap.drives, Some(&snap.nc)).0);
    let q: Vec<Vec<[f64; 2]>> = (0..4).map(|i| (0..4).map(|j| [nm.q[(i, j)].re, nm.q[(i, j)].im]).collect()).collect();
    let body = json!({
        "t": t,
        "lambda1": nm.lambda1(),
        "lambda2": nm.lambda2(),
        "derived": dp,
        "polynomial": polynomial_check(&dp),
        "modes": nm.modes,
        "q": q,
        "residuals": {
            "diagonalization": nm.diagonalization_residual(&omega),
            "adjoint": nm.adjoint_residual(),
            "commutator": nm.commutator_residual(),
            "inverse": nm.inverse_residual(),
        },
    });
    let mut w = sink(&cfg)?;
    match cfg.output.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &body).map_err(io::Error::from)?;
            writeln!(w)?;
        }
        Format::Csv => {
            writeln!(w, "t,lambda1,lambda2,b,c,delta,diagonalization,adjoint,commutator")?;
            let v = [
                t,
                nm.lambda1(),
                nm.lambda2(),
                dp.b,
                dp.c,
                dp.delta,
                nm.diagonalization_residual(&omega),
                nm.adjoint_residual(),
                nm.commutator_residual(),
            ]
            .map(ncsep::fmt_float);
            writeln!(w, "{}", v.join(","))?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn run_phases(opts: &Opts) -> Outcome {
    let cfg = load(opts)?;
    let osc = cfg.oscillator();
    let sw = &cfg.sweep;
    let traj = integrate_beta(&osc, cfg.state.beta0(), (sw.t_start, sw.t_end), sw.t_step, sw.tol)?;
    let (n1, n2) = cfg.state();
    let record = phases(&traj, n1, n2);
    let residual = constraint_residual(&traj);
    let mut w = sink(&cfg)?;
    match cfg.output.format {
        Format::Csv => {
            traj.write_csv(&mut w)?;
            eprintln!(
                "phi_geometric = {:.16e}, phi_dynamic = {:.16e}, phi_total = {:.16e}",
                record.phi_geometric, record.phi_dynamic, record.phi_total
            );
        }
        Format::Json => {
            let body = json!({ "phases": record, "constraint_residual": residual, "samples": traj.times.len() });
            serde_json::to_writer_pretty(&mut w, &body).map_err(io::Error::from)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    if residual > 10.0 * sw.tol {
        return Err(Failure::numerical(format!("constraint residual {residual:e} exceeds budget")));
    }
    Ok(0)
}
