//! Command-line front end.
//!
//! Subcommands: `solve`, `mesh`, `reduced`, `table`, `validate`. Problems
//! are either catalog names (`ex1`, `ex2`, `ex3`, `ms1`) or `custom` with
//! every coefficient given as an expression in `x`. All file output is
//! CSV with a header row; numbers carry 17 significant digits so values
//! parsed back from a file equal the in-memory ones.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 validation failure
//! (assumption margins not positive), 4 numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::convergence::{reference_eps_grid, solve_bvp, uniform_table, ConvergenceReport};
use crate::error::{Error, Result};
use crate::expr::parse_expression;
use crate::mesh::{build_shishkin_mesh, MeshKind};
use crate::problem::{
    builtin_problem, validate_problem, ScalarField, TwoParamBvp, DEFAULT_EPS1, DEFAULT_EPS2,
};
use crate::reduced::solve_reduced;

#[derive(Parser)]
#[command(
    name = "spcd",
    version,
    about = "Fitted-mesh upwind solver for weakly coupled pairs of singularly perturbed convection-diffusion equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeshArg {
    Shishkin,
    Uniform,
}

impl From<MeshArg> for MeshKind {
    fn from(arg: MeshArg) -> MeshKind {
        match arg {
            MeshArg::Shishkin => MeshKind::Shishkin,
            MeshArg::Uniform => MeshKind::Uniform,
        }
    }
}

#[derive(Args)]
struct ProblemArgs {
    /// Catalog name (ex1, ex2, ex3, ms1) or `custom`
    #[arg(long)]
    problem: String,

    /// First (smaller) perturbation parameter [default: 5^-4]
    #[arg(long)]
    eps1: Option<f64>,

    /// Second perturbation parameter [default: 2^-7]
    #[arg(long)]
    eps2: Option<f64>,

    /// Lower bound for the convection coefficients, used to place the
    /// mesh transition points; defaults to the catalog problem's stored
    /// value and is required for custom problems
    #[arg(long)]
    alpha: Option<f64>,

    /// Convection coefficient of the first equation, e.g. "1+x^2"
    #[arg(long, allow_hyphen_values = true)]
    a1: Option<String>,
    /// Convection coefficient of the second equation
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<String>,
    /// Diagonal reaction coefficient of the first equation
    #[arg(long, allow_hyphen_values = true)]
    b11: Option<String>,
    /// Coupling coefficient of the first equation (enters with + sign)
    #[arg(long, allow_hyphen_values = true)]
    b12: Option<String>,
    /// Coupling coefficient of the second equation (enters with + sign)
    #[arg(long, allow_hyphen_values = true)]
    b21: Option<String>,
    /// Diagonal reaction coefficient of the second equation
    #[arg(long, allow_hyphen_values = true)]
    b22: Option<String>,
    /// Source term of the first equation
    #[arg(long, allow_hyphen_values = true)]
    f1: Option<String>,
    /// Source term of the second equation
    #[arg(long, allow_hyphen_values = true)]
    f2: Option<String>,

    /// Left boundary value of u1 (custom problems)
    #[arg(long, allow_negative_numbers = true)]
    l1: Option<f64>,
    /// Left boundary value of u2 (custom problems)
    #[arg(long, allow_negative_numbers = true)]
    l2: Option<f64>,
    /// Right boundary value of u1 (custom problems)
    #[arg(long, allow_negative_numbers = true)]
    r1: Option<f64>,
    /// Right boundary value of u2 (custom problems)
    #[arg(long, allow_negative_numbers = true)]
    r2: Option<f64>,
}

impl ProblemArgs {
    fn eps(&self) -> (f64, f64) {
        (
            self.eps1.unwrap_or(DEFAULT_EPS1),
            self.eps2.unwrap_or(DEFAULT_EPS2),
        )
    }

    /// Build the problem template for the requested eps pair.
    fn build(&self, eps1: f64, eps2: f64) -> Result<TwoParamBvp> {
        if self.problem != "custom" {
            let mut bvp = builtin_problem(&self.problem, eps1, eps2)?;
            if let Some(alpha) = self.alpha {
                if !(alpha > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "alpha must be positive, got {alpha}"
                    )));
                }
                bvp.alpha = alpha;
            }
            return Ok(bvp);
        }

        let field = |name: &str, text: &Option<String>| -> Result<ScalarField> {
            let text = text.as_ref().ok_or_else(|| {
                Error::InvalidArgument(format!("custom problems require --{name} <expr>"))
            })?;
            Ok(ScalarField::from_expr(name, parse_expression(text)?))
        };
        let number = |name: &str, value: &Option<f64>| -> Result<f64> {
            value.ok_or_else(|| {
                Error::InvalidArgument(format!("custom problems require --{name} <real>"))
            })
        };

        let alpha = number("alpha", &self.alpha)?;
        let mut bvp = TwoParamBvp {
            eps1,
            eps2,
            a1: field("a1", &self.a1)?,
            a2: field("a2", &self.a2)?,
            b11: field("b11", &self.b11)?,
            b12: field("b12", &self.b12)?,
            b21: field("b21", &self.b21)?,
            b22: field("b22", &self.b22)?,
            f1: field("f1", &self.f1)?,
            f2: field("f2", &self.f2)?,
            left_bc: [number("l1", &self.l1)?, number("l2", &self.l2)?],
            right_bc: [number("r1", &self.r1)?, number("r2", &self.r2)?],
            alpha,
            beta: 1.0, // placeholder until the sampled margin is known
        };
        // no --beta flag: the margin only feeds diagnostics, so the
        // sampled estimate is the honest value to store
        let report = validate_problem(&bvp, 1001)?;
        if report.beta_estimate > 0.0 {
            bvp.beta = report.beta_estimate;
        }
        Ok(bvp)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the boundary value problem and write nodal values as CSV
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Number of mesh elements (a multiple of 4 for the fitted mesh)
        #[arg(long = "N")]
        n: usize,
        /// Mesh family to solve on
        #[arg(long, value_enum, default_value_t = MeshArg::Shishkin)]
        mesh: MeshArg,
        /// Output CSV path (columns x,u1,u2)
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the fitted mesh and write its nodes as CSV
    Mesh {
        #[arg(long)]
        eps1: f64,
        #[arg(long)]
        eps2: f64,
        #[arg(long)]
        alpha: f64,
        /// Number of mesh elements (a multiple of 4)
        #[arg(long = "N")]
        n: usize,
        /// Output CSV path (columns j,x,region)
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate the reduced (eps = 0) problem backwards from x = 1
    Reduced {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Number of integration steps
        #[arg(long = "M")]
        m: usize,
        /// Output CSV path (columns x,u1,u2)
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-mesh convergence table over a parameter grid
    Table {
        #[command(flatten)]
        problem: ProblemArgs,
        /// `paper` for the 15 reference pairs, or a list like
        /// `1e-4:1e-3,1e-5:1e-4`
        #[arg(long = "eps-grid", default_value = "paper")]
        eps_grid: String,
        /// Comma-separated, doubling mesh sizes, e.g. `128,256,512`
        #[arg(long = "N-list")]
        n_list: String,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the coefficient assumptions and report the margins
    Validate {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Number of equispaced sample points
        #[arg(long, default_value_t = 1001)]
        samples: usize,
    },
}

/// 17 significant digits; round-trips through parsing exactly.
fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_eps_grid(text: &str) -> Result<Vec<(f64, f64)>> {
    if text == "paper" {
        return Ok(reference_eps_grid());
    }
    let mut grid = Vec::new();
    for part in text.split(',') {
        let (lhs, rhs) = part.split_once(':').ok_or_else(|| {
            Error::InvalidArgument(format!(
                "eps grid entries look like eps1:eps2, got `{part}`"
            ))
        })?;
        let eps1: f64 = lhs
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad eps1 value `{lhs}`")))?;
        let eps2: f64 = rhs
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad eps2 value `{rhs}`")))?;
        grid.push((eps1, eps2));
    }
    Ok(grid)
}

fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad mesh size `{part}`")))
        })
        .collect()
}

fn write_solution_csv(path: &PathBuf, xs: &[f64], values: &[[f64; 2]]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "x,u1,u2")?;
    for (x, v) in xs.iter().zip(values) {
        writeln!(out, "{},{},{}", sig17(*x), sig17(v[0]), sig17(v[1]))?;
    }
    out.flush()?;
    Ok(())
}

fn write_table_csv(path: &PathBuf, report: &ConvergenceReport) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "eps1,eps2,N,D_eps_N")?;
    for (e, &(eps1, eps2)) in report.eps_grid.iter().enumerate() {
        for (k, &n) in report.n_list.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{}",
                sig17(eps1),
                sig17(eps2),
                n,
                sig17(report.d_eps_n[e][k])
            )?;
        }
    }
    let join = |values: &[f64]| {
        values
            .iter()
            .map(|&v| sig17(v))
            .collect::<Vec<_>>()
            .join(",")
    };
    writeln!(out, "D_N,{}", join(&report.d_n))?;
    writeln!(out, "p_N,{}", join(&report.p_n))?;
    writeln!(out, "C_pN,{}", join(&report.c_p_n))?;
    writeln!(out, "# p_star={:.17}", report.p_star)?;
    writeln!(out, "# C_p_star={:.17}", report.c_p_star)?;
    out.flush()?;
    Ok(())
}

/// Check the sampled assumptions before a run; `Ok(false)` means fail
/// with exit code 3.
fn preflight(bvp: &TwoParamBvp) -> Result<bool> {
    let report = validate_problem(bvp, 257)?;
    if !report.ok {
        eprintln!(
            "validation failed: alpha_estimate = {}, beta_estimate = {}, eps1 = {}, eps2 = {}",
            report.alpha_estimate, report.beta_estimate, bvp.eps1, bvp.eps2
        );
    }
    Ok(report.ok)
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve {
            problem,
            n,
            mesh,
            out,
        } => {
            let (eps1, eps2) = problem.eps();
            let bvp = problem.build(eps1, eps2)?;
            if !preflight(&bvp)? {
                return Ok(3);
            }
            let sol = solve_bvp(&bvp, n, mesh.into())?;
            write_solution_csv(&out, sol.mesh().points(), sol.values())?;
            Ok(0)
        }
        Command::Mesh {
            eps1,
            eps2,
            alpha,
            n,
            out,
        } => {
            let mesh = build_shishkin_mesh(eps1, eps2, alpha, n)?;
            let mut file = BufWriter::new(File::create(&out)?);
            writeln!(file, "j,x,region")?;
            for j in 0..mesh.points().len() {
                writeln!(file, "{},{},{}", j, sig17(mesh.point(j)), mesh.region(j))?;
            }
            file.flush()?;
            Ok(0)
        }
        Command::Reduced { problem, m, out } => {
            let (eps1, eps2) = problem.eps();
            let bvp = problem.build(eps1, eps2)?;
            if !preflight(&bvp)? {
                return Ok(3);
            }
            let rsol = solve_reduced(&bvp, m)?;
            write_solution_csv(&out, rsol.grid(), rsol.values())?;
            Ok(0)
        }
        Command::Table {
            problem,
            eps_grid,
            n_list,
            out,
        } => {
            let grid = parse_eps_grid(&eps_grid)?;
            let sizes = parse_n_list(&n_list)?;
            let (e1, e2) = grid
                .first()
                .copied()
                .ok_or_else(|| Error::InvalidArgument("eps grid must not be empty".to_string()))?;
            let template = problem.build(e1, e2)?;
            if !preflight(&template)? {
                return Ok(3);
            }
            let report = uniform_table(|eps1, eps2| problem.build(eps1, eps2), &grid, &sizes)?;
            write_table_csv(&out, &report)?;
            Ok(0)
        }
        Command::Validate { problem, samples } => {
            let (eps1, eps2) = problem.eps();
            let bvp = problem.build(eps1, eps2)?;
            let report = validate_problem(&bvp, samples)?;
            println!("alpha_estimate = {}", report.alpha_estimate);
            println!("beta_estimate = {}", report.beta_estimate);
            println!("offdiag_min = {}", report.offdiag_min);
            println!("sample_count = {}", report.sample_count);
            for warning in &report.warnings {
                println!("warning: {warning}");
            }
            println!("ok = {}", report.ok);
            Ok(if report.ok { 0 } else { 3 })
        }
    }
}

/// Run the command line; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version land here with non-error kinds
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
