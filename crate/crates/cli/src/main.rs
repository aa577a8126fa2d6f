use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hstiefel::io::{matrix_from_json, point_from_json, write_comparison_csv, write_trajectory_csv};
use hstiefel::morse::{critical_level, CRITICAL_TOL};
use hstiefel::stiefel::constraint_residual;
use hstiefel::{
    closed_form_trajectory, critical_levels, flow_limits, gradient, hessian_spectrum, height,
    is_critical, notable_point, numerical_flow, random_point, relative_svd, sigma_invariants, svd,
    Error, StiefelPoint, DEFAULT_TOL,
};

#[derive(Parser)]
#[command(name = "hstiefel", version, about = "Height function on quaternionic Stiefel manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical levels of h on X_{n,k}.
    Levels { n: usize, k: usize },
    /// Canonical critical point at level q.
    Notable { n: usize, k: usize, q: usize },
    /// Haar-random point.
    RandomPoint {
        n: usize,
        k: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Height, gradient norm and criticality of a point.
    Analyze { point: PathBuf },
    /// Hessian spectrum at a critical point.
    Spectrum { point: PathBuf },
    /// Closed-form dimensions of the critical level q.
    Invariants { n: usize, k: usize, q: usize },
    /// Singular value decomposition of a matrix.
    Svd { matrix: PathBuf },
    /// Relative SVD of a point.
    RelSvd { point: PathBuf },
    /// Sampled gradient flow line.
    Flow {
        point: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
        /// Retract onto the manifold after every RK4 step.
        #[arg(long)]
        reproject: bool,
        /// Append the point entries to each row.
        #[arg(long)]
        points: bool,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Endpoints of the flow line through a point.
    Limits { point: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Closed,
    Rk4,
    Both,
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    Io(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn tolerance() -> Result<f64, Failure> {
    match std::env::var("HSTIEFEL_TOL") {
        Err(_) => Ok(DEFAULT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
            _ => Err(Failure::Usage(format!("HSTIEFEL_TOL must be a positive decimal, got {s:?}"))),
        },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_point(path: &Path) -> Result<StiefelPoint, Failure> {
    Ok(point_from_json(&read(path)?, tolerance()?)?)
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::NotSquare { .. } => "not_square",
        Error::InvalidDimensions { .. } => "invalid_dimensions",
        Error::NotOnManifold { .. } => "not_on_manifold",
        Error::NotTangent { .. } => "not_tangent",
        Error::NotNormal { .. } => "not_normal",
        Error::NotOrthonormal { .. } => "not_orthonormal",
        Error::NotSymplectic { .. } => "not_symplectic",
        Error::NotCritical { .. } => "not_critical",
        Error::InvalidLevel { .. } => "invalid_level",
        Error::NonIntegerLevel { .. } => "non_integer_level",
        Error::NoConvergence { .. } => "no_convergence",
        Error::RankDeficient { .. } => "rank_deficient",
        Error::SpectrumMismatch { .. } => "spectrum_mismatch",
        Error::Decomposition(_) => "decomposition",
        Error::Diverged { .. } => "diverged",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Json(_) => "invalid_json",
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn analyze(x: &StiefelPoint) -> Result<Value, Failure> {
    let crit = is_critical(x, CRITICAL_TOL);
    let mut out = json!({
        "on_manifold": true,
        "constraint_residual": constraint_residual(x.mat()),
        "height": height(x),
        "grad_norm": gradient(x).norm(),
        "critical": crit.critical,
    });
    if crit.critical {
        out["level"] = json!(height(x).round() as usize);
    }
    Ok(out)
}

fn spectrum(x: &StiefelPoint) -> Result<Value, Failure> {
    let report = hessian_spectrum(x)?;
    let level = critical_level(x)?;
    let inv = sigma_invariants(x.n(), x.k(), level)?;
    let matches = report.mult_minus2 == inv.index
        && report.mult_zero == inv.kernel_dim
        && report.mult_plus2 == inv.plus_dim;
    Ok(json!({
        "level": level,
        "spectrum": report,
        "rank": report.rank(),
        "sigma_invariants": inv,
        "matches_invariants": matches,
    }))
}

fn run(cli: Cli) -> Result<Output, Failure> {
    Ok(match cli.command {
        Command::Levels { n, k } => Output::Json(json!(critical_levels(n, k)?)),
        Command::Notable { n, k, q } => Output::Json(json!(notable_point(n, k, q)?)),
        Command::RandomPoint { n, k, seed } => Output::Json(json!(random_point(n, k, seed)?)),
        Command::Analyze { point } => Output::Json(analyze(&load_point(&point)?)?),
        Command::Spectrum { point } => Output::Json(spectrum(&load_point(&point)?)?),
        Command::Invariants { n, k, q } => Output::Json(json!(sigma_invariants(n, k, q)?)),
        Command::Svd { matrix } => {
            let a = matrix_from_json(&read(&matrix)?)?;
            let f = svd(&a)?;
            Output::Json(json!({
                "u": f.u,
                "s": f.s,
                "v": f.v,
                "reconstruction_residual": f.reconstruct().dist(&a)?,
                "u_orthonormality": f.u.orthonormality_residual(),
                "v_orthonormality": f.v.orthonormality_residual(),
            }))
        }
        Command::RelSvd { point } => {
            let x = load_point(&point)?;
            let d = relative_svd(&x)?;
            let mut out = json!(d);
            out["p_prime"] = json!(d.p_prime());
            out["t_residual"] = json!(d.reconstruct_t().dist(&x.t())?);
            out["p_residual"] = json!(d.reconstruct_p().dist(&x.p())?);
            out["m_orthonormality"] = json!(d.m.orthonormality_residual());
            out["a_orthonormality"] = json!(d.a.orthonormality_residual());
            out["b_orthonormality"] = json!(d.b.orthonormality_residual());
            Output::Json(out)
        }
        Command::Flow {
            point,
            t0,
            t1,
            steps,
            method,
            reproject,
            points,
            csv,
        } => {
            let x = load_point(&point)?;
            let mut buf = Vec::new();
            match method {
                Method::Closed => {
                    let traj = closed_form_trajectory(&x, t0, t1, steps)?;
                    write_trajectory_csv(&mut buf, &traj, points)?;
                }
                Method::Rk4 => {
                    let traj = numerical_flow(&x, t0, t1, steps, reproject)?;
                    write_trajectory_csv(&mut buf, &traj, points)?;
                }
                Method::Both => {
                    let closed = closed_form_trajectory(&x, t0, t1, steps)?;
                    let rk4 = numerical_flow(&x, t0, t1, steps, reproject)?;
                    let max_dev = write_comparison_csv(&mut buf, &closed, &rk4, points)?;
                    let max_height_gap = closed
                        .heights
                        .iter()
                        .zip(&rk4.heights)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    eprintln!(
                        "{}",
                        json!({
                            "max_deviation": max_dev,
                            "max_height_deviation": max_height_gap,
                            "max_rk4_drift": rk4.max_drift(),
                            "steps": steps,
                            "reproject": reproject,
                        })
                    );
                }
            }
            let text = String::from_utf8(buf).expect("ascii csv");
            match csv {
                Some(path) => {
                    fs::write(&path, &text)
                        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                    Output::Text(String::new())
                }
                None => Output::Text(text),
            }
        }
        Command::Limits { point } => Output::Json(json!(flow_limits(&load_point(&point)?)?)),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let res = match out {
                Output::Json(v) => writeln!(stdout, "{v}"),
                Output::Text(t) => stdout.write_all(t.as_bytes()),
            };
            match res {
                Ok(()) => ExitCode::SUCCESS,
                Err(_) => ExitCode::from(1),
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            println!("{}", json!({"error": error_kind(&e), "message": e.to_string()}));
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            println!("{}", json!({"error": "io", "message": msg}));
            ExitCode::from(1)
        }
    }
}
