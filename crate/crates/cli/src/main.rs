//! `pfpauli`: verification suites, Pauli group generation, X-basis decompositions,
//! commutants and circuit simulation.
//!
//! Exit codes: 0 success, 1 failed checks, 2 usage, 3 I/O, 4 numerical overflow.

mod complex;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pfpauli::circuits::{
    build_ht, build_ls, derivative_check, evolve, uniform_grid, CircuitParamsS, CircuitParamsT,
    State,
};
use pfpauli::linalg::{span_decompose, CMatrix, SpanDecomposition};
use pfpauli::pauli::{generate_group, p1, p2, parse_generators};
use pfpauli::pseudofermion::PseudofermionParams;
use pfpauli::suite::{self, Scope};
use pfpauli::xbasis::{
    commutant_dimension, ht_derived_coefficients, ht_printed_coefficients, ls_derived_coefficients,
    ls_printed_coefficients, x_matrices,
};
use pfpauli::{Complex64, Error};

use complex::{format_complex, parse_list};

/// Residual above which a decomposition target is reported as outside the span.
const SPAN_WARN: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "pfpauli", version, about = "Pseudofermion realisations of the Pauli groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run invariant suites and print one CHECK line per invariant.
    Verify(VerifyArgs),
    /// Generate a Pauli group from a preset or a generator file.
    Group(GroupArgs),
    /// Expand L_S, H_T or a matrix from a file in the X basis.
    Decompose(DecomposeArgs),
    /// Exact commutant of a subset of the X matrices.
    Commutant(CommutantArgs),
    /// Evolve a circuit state and write the trajectory as CSV.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    All,
    Pseudofermion,
    Xbasis,
    Group,
    Circuits,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Self {
        match s {
            ScopeArg::All => Scope::All,
            ScopeArg::Pseudofermion => Scope::Pseudofermion,
            ScopeArg::Xbasis => Scope::Xbasis,
            ScopeArg::Group => Scope::Group,
            ScopeArg::Circuits => Scope::Circuits,
        }
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    #[arg(value_enum, default_value = "all")]
    scope: ScopeArg,
    #[arg(long, default_value_t = suite::DEFAULT_SEED)]
    seed: u64,
    /// Also write the checks as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra pseudofermion point (needs --delta and --omega).
    #[arg(long, requires_all = ["delta", "omega"])]
    theta: Option<f64>,
    #[arg(long, requires_all = ["theta", "omega"])]
    delta: Option<f64>,
    /// |omega|.
    #[arg(long, requires_all = ["theta", "delta"])]
    omega: Option<f64>,
    /// File of `theta delta |omega|` lines, each checked as an extra pseudofermion point.
    #[arg(long)]
    sweep: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// <X, Y, Z>.
    P1,
    /// The six single-qubit lifts.
    P2,
    /// The Pauli ids of X_1 ... X_6.
    X,
}

#[derive(Args)]
struct GroupArgs {
    /// One generator per line, e.g. `-iXY`; `#` starts a comment.
    file: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "file")]
    preset: Option<Preset>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    #[value(name = "LS")]
    Ls,
    #[value(name = "HT")]
    Ht,
    #[value(name = "file")]
    File,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct DecomposeArgs {
    #[arg(value_enum)]
    target: Target,
    /// Matrix file for `file`: 16 comma-separated entries `re+imi`, row-major.
    path: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
}

#[derive(Args)]
struct CommutantArgs {
    /// 1-based indices of the X matrices to commute with; all twelve when omitted.
    #[arg(value_delimiter = ',')]
    indices: Vec<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    #[value(name = "S")]
    S,
    #[value(name = "T")]
    T,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    #[arg(value_enum)]
    system: System,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    #[arg(long, default_value_t = 0.0)]
    r: f64,
    /// Four comma-separated complex values `(Q1, Q2, dQ1, dQ2)`.
    #[arg(long, default_value = "1,0,0,0", allow_hyphen_values = true)]
    psi0: String,
    #[arg(long)]
    t_end: f64,
    /// Number of grid points, at least 2.
    #[arg(long)]
    steps: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Checks,
    Usage(String),
    Io(String),
    Overflow(f64),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Checks => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Overflow(_) => 4,
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a, &mut out),
        Command::Group(a) => cmd_group(a, &mut out),
        Command::Decompose(a) => cmd_decompose(a, &mut out),
        Command::Commutant(a) => cmd_commutant(a, &mut out),
        Command::Simulate(a) => cmd_simulate(a, &mut out),
    };
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Ok(()), Err(e)) => {
            eprintln!("error: stdout: {e}");
            ExitCode::from(3)
        }
        (Err(f), _) => {
            match &f {
                Failure::Checks => {}
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Overflow(t) => eprintln!("error: evolution overflowed at t = {t}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn stdout_err(e: io::Error) -> Failure {
    Failure::Io(format!("stdout: {e}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn cmd_verify(a: VerifyArgs, out: &mut impl Write) -> Result<(), Failure> {
    let mut points = Vec::new();
    if let (Some(t), Some(d), Some(w)) = (a.theta, a.delta, a.omega) {
        points.push(("point_".to_string(), PseudofermionParams::new(t, d, w).map_err(usage)?));
    }
    if let Some(path) = &a.sweep {
        for (k, line) in read(path)?.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| usage(format!("{}:{}: expected three numbers", path.display(), k + 1)))?;
            let [t, d, w] = vals[..] else {
                return Err(usage(format!("{}:{}: expected three numbers", path.display(), k + 1)));
            };
            let p = PseudofermionParams::new(t, d, w)
                .map_err(|e| usage(format!("{}:{}: {e}", path.display(), k + 1)))?;
            points.push((format!("sweep{}_", k + 1), p));
        }
    }

    let mut report = suite::run(a.scope.into(), a.seed);
    for (prefix, p) in points {
        report.extend(suite::pseudofermion_point_report(p, &prefix));
    }
    write!(out, "{report}").map_err(stdout_err)?;
    if let Some(path) = &a.out {
        let f = fs::File::create(path).map_err(|e| io_err(path, e))?;
        let mut w = BufWriter::new(f);
        report.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(path, e))?;
    }
    let failed = report.failures().count();
    eprintln!("{} checks, {failed} failed", report.checks.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn cmd_group(a: GroupArgs, out: &mut impl Write) -> Result<(), Failure> {
    let group = match (&a.file, a.preset) {
        (Some(path), _) => {
            let gens = parse_generators(&read(path)?).map_err(usage)?;
            generate_group(&gens).map_err(usage)?
        }
        (None, Some(Preset::P1)) => p1(),
        (None, Some(Preset::P2)) | (None, None) => p2(),
        (None, Some(Preset::X)) => generate_group(&x_matrices().pauli_ids[..6]).map_err(usage)?,
    };
    let gens: Vec<String> = group.generators().iter().map(ToString::to_string).collect();
    let centre: Vec<String> = group.center().iter().map(ToString::to_string).collect();
    let elems: Vec<String> = group.elements().iter().map(ToString::to_string).collect();
    let mut w = || -> io::Result<()> {
        writeln!(out, "qubits {}", group.qubits())?;
        writeln!(out, "generators {}", gens.join(" "))?;
        writeln!(out, "order {}", group.order())?;
        writeln!(out, "center {}", centre.join(" "))?;
        writeln!(out, "elements {}", elems.join(" "))
    };
    w().map_err(stdout_err)
}

fn parse_matrix_file(text: &str) -> Result<CMatrix, String> {
    let entries = parse_list(text.trim())?;
    if entries.len() != 16 {
        return Err(format!("expected 16 entries, found {}", entries.len()));
    }
    CMatrix::from_row_major(4, 4, &entries).map_err(|e| e.to_string())
}

fn write_decomposition(
    out: &mut impl Write,
    d: &SpanDecomposition,
    reference: Option<([Complex64; 12], [Complex64; 12])>,
) -> io::Result<()> {
    match reference {
        None => {
            writeln!(out, "slot coefficient")?;
            for (k, c) in d.coefficients.iter().enumerate() {
                writeln!(out, "X{} {}", k + 1, format_complex(*c))?;
            }
        }
        Some((derived, printed)) => {
            writeln!(out, "slot coefficient derived printed printed_diff")?;
            for (k, c) in d.coefficients.iter().enumerate() {
                let diff = (c - printed[k]).norm();
                writeln!(
                    out,
                    "X{} {} {} {} {:.3e}{}",
                    k + 1,
                    format_complex(*c),
                    format_complex(derived[k]),
                    format_complex(printed[k]),
                    diff,
                    if diff > 1e-12 { " INFO" } else { "" }
                )?;
            }
        }
    }
    writeln!(out, "residual {:.3e}", d.residual)
}

fn cmd_decompose(a: DecomposeArgs, out: &mut impl Write) -> Result<(), Failure> {
    let basis = x_matrices().mats;
    let (target, reference) = match a.target {
        Target::Ls => {
            let p = CircuitParamsS::new(a.alpha, a.mu, a.gamma).map_err(usage)?;
            (build_ls(p), Some((ls_derived_coefficients(p), ls_printed_coefficients(p))))
        }
        Target::Ht => {
            let p = CircuitParamsT::new(a.b, a.d, a.r).map_err(usage)?;
            (build_ht(p), Some((ht_derived_coefficients(p), ht_printed_coefficients(p))))
        }
        Target::File => {
            let path = a.path.as_ref().ok_or_else(|| usage("decompose file needs a path"))?;
            let m = parse_matrix_file(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            (m, None)
        }
    };
    let d = span_decompose(&basis, &target).map_err(usage)?;
    write_decomposition(out, &d, reference).map_err(stdout_err)?;
    if d.residual > SPAN_WARN {
        eprintln!("warning: residual {:.3e} exceeds {SPAN_WARN:.0e}; target is not in the span of the X matrices", d.residual);
    }
    Ok(())
}

fn cmd_commutant(a: CommutantArgs, out: &mut impl Write) -> Result<(), Failure> {
    let x = x_matrices();
    let indices: Vec<usize> = if a.indices.is_empty() { (1..=12).collect() } else { a.indices };
    if let Some(bad) = indices.iter().find(|&&j| !(1..=12).contains(&j)) {
        return Err(usage(format!("X index {bad} outside 1..=12")));
    }
    let mats: Vec<CMatrix> = indices.iter().map(|&j| *x.x(j)).collect();
    let c = commutant_dimension(&mats).map_err(usage)?;
    let mut w = || -> io::Result<()> {
        let names: Vec<String> = indices.iter().map(|j| format!("X{j}")).collect();
        writeln!(out, "matrices {}", names.join(","))?;
        writeln!(out, "equations {}", c.equations)?;
        writeln!(out, "dimension {}", c.dim)?;
        for (k, v) in c.basis.iter().enumerate() {
            let entries: Vec<String> = v.iter().map(ToString::to_string).collect();
            writeln!(out, "basis{} {}", k + 1, entries.join(","))?;
        }
        Ok(())
    };
    w().map_err(stdout_err)
}

fn cmd_simulate(a: SimulateArgs, out: &mut impl Write) -> Result<(), Failure> {
    if a.steps < 2 {
        return Err(usage("--steps must be at least 2"));
    }
    if !(a.t_end > 0.0 && a.t_end.is_finite()) {
        return Err(usage("--t-end must be positive and finite"));
    }
    let psi = parse_list(&a.psi0).map_err(usage)?;
    let psi0: State = psi
        .try_into()
        .map_err(|v: Vec<Complex64>| usage(format!("--psi0 needs 4 values, got {}", v.len())))?;
    let l = match a.system {
        System::S => build_ls(CircuitParamsS::new(a.alpha, a.mu, a.gamma).map_err(usage)?),
        // i dPsi/dt = H_T Psi
        System::T => build_ht(CircuitParamsT::new(a.b, a.d, a.r).map_err(usage)?).scale(-Complex64::i()),
    };
    let times = uniform_grid(a.t_end, a.steps).map_err(usage)?;
    let traj = evolve(&l, &psi0, &times).map_err(|e| match e {
        Error::EvolutionOverflow { t } => Failure::Overflow(t),
        other => usage(other),
    })?;

    match &a.out {
        Some(path) => {
            let f = fs::File::create(path).map_err(|e| io_err(path, e))?;
            let mut w = BufWriter::new(f);
            traj.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(path, e))?;
        }
        None => traj.write_csv(&mut *out).map_err(stdout_err)?,
    }
    let h = a.t_end / (a.steps - 1) as f64;
    if h > 1e-2 {
        eprintln!("warning: step {h:.3e} exceeds 1e-2; the derivative residual is only indicative");
    }
    match derivative_check(&traj, &l) {
        Ok(r) => writeln!(out, "residual {r:.3e}").map_err(stdout_err),
        Err(e) => {
            eprintln!("warning: derivative check skipped: {e}");
            Ok(())
        }
    }
}
