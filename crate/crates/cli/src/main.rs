//! `tracelab`: spectra, densities of states, Lyapunov exponents and Green
//! functions of substitution Schrödinger operators, written as plot-ready files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use tracelab::green::{green_plus, EscapeParams, GreenStatus};
use tracelab::io::{gray_level, write_pgm16, RunManifest};
use tracelab::schrodinger::{
    band_spectrum, density_of_states, lyapunov_direct, lyapunov_green, lyapunov_thouless, mixed_bc_eigenvalues,
    schrodinger_point, spectrum_escape, EnergyGrid, OperatorFamily, SchrodingerError, DEFAULT_PREFIX_LEN,
};
use tracelab::substitution::{Substitution, SubstitutionError};
use tracelab::surface::{SurfaceError, TraceMap};
use tracelab::verify::{run_verification, seed_from_env, VerifyConfig};

#[derive(Parser, Debug)]
#[command(name = "tracelab", version, about = "Substitution Schrödinger operators through their trace maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Substitution, e.g. "a>ab;b>a"; uppercase letters are inverses.
    #[arg(long, global = true, default_value = "a>ab;b>a")]
    sub: String,
    /// Coupling constant.
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    kappa: f64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Escape radius.
    #[arg(long, global = true, default_value_t = 1e3)]
    rescape: f64,
    /// Maximal number of trace-map iterations.
    #[arg(long, global = true, default_value_t = 60)]
    nmax: usize,
    /// Relative Cauchy tolerance of the Green function.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
}

impl Common {
    fn escape(&self) -> EscapeParams {
        EscapeParams { r_escape: self.rescape, n_max: self.nmax, tol: self.tol }
    }

    fn manifest(&self, command: &str) -> RunManifest {
        RunManifest::new(command, &self.sub, self.kappa, seed_from_env())
            .param("rescape", self.rescape)
            .param("nmax", self.nmax)
            .param("tol", self.tol)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Abelian data, normal form and invariant word of the substitution.
    Info,
    /// Spectrum on a real grid as outer and inner interval sets.
    Spectrum {
        /// lo:hi:step (default covers the norm bound, step 0.005).
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Also write the bands of the periodic approximant of this order.
        #[arg(long = "n-power")]
        n_power: Option<u32>,
    },
    /// Density of states from averaged Dirichlet windows.
    Dos {
        #[arg(long = "L", default_value_t = 2000)]
        l: usize,
        #[arg(long, default_value_t = 64)]
        windows: usize,
    },
    /// Lyapunov exponent on a complex grid by transfer matrices, Green function and Thouless formula.
    Lyapunov {
        /// re_lo:re_hi:im_lo:im_hi:n, n points per axis.
        #[arg(long = "complex-grid", allow_hyphen_values = true, default_value = "2.5:4:0.1:1:5")]
        complex_grid: String,
        #[arg(long = "N", default_value_t = 10_000)]
        n: usize,
        #[arg(long = "L", default_value_t = 2000)]
        l: usize,
        #[arg(long, default_value_t = 64)]
        windows: usize,
    },
    /// Lyapunov exponent from the Green function over a complex rectangle, as CSV and 16-bit PGM.
    GreenMap {
        #[arg(long = "complex-grid", allow_hyphen_values = true, default_value = "-3:3:-1:1:101")]
        complex_grid: String,
        /// Value mapped to white.
        #[arg(long = "gamma-max", default_value_t = 2.0)]
        gamma_max: f64,
    },
    /// Energies where the trace over the n-th approximant period equals the target.
    LambdaPoints {
        #[arg(long = "n-power", default_value_t = 9)]
        n_power: u32,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        target: f64,
    },
    /// Runs the verification suite and writes a JSON report.
    Verify {
        #[arg(long)]
        quick: bool,
        #[arg(long = "inject-alpha-error", hide = true, default_value_t = 0.0)]
        inject_alpha_error: f64,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Numeric(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<SubstitutionError> for CliError {
    fn from(e: SubstitutionError) -> Self {
        match e {
            SubstitutionError::WordTooLong { .. } | SubstitutionError::IndexOutOfRange { .. } => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::Substitution(s) => s.into(),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<SchrodingerError> for CliError {
    fn from(e: SchrodingerError) -> Self {
        match e {
            SchrodingerError::InvalidArgument(_) | SchrodingerError::PrefixTooShort { .. } => CliError::Input(e.to_string()),
            SchrodingerError::Substitution(s) => s.into(),
            SchrodingerError::Surface(s) => s.into(),
            SchrodingerError::Green(tracelab::green::GreenError::InvalidParams(_)) => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<tracelab::green::GreenError> for CliError {
    fn from(e: tracelab::green::GreenError) -> Self {
        SchrodingerError::from(e).into()
    }
}

impl From<tracelab::numerics::NumericsError> for CliError {
    fn from(e: tracelab::numerics::NumericsError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("i/o: {e}"))
    }
}

type Res<T> = Result<T, CliError>;

fn parse_fields(s: &str, n: usize, what: &str) -> Res<Vec<f64>> {
    let v: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(format!("{what} '{s}': {e}")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Input(format!("{what} '{s}' needs {n} finite ':'-separated numbers")));
    }
    Ok(v)
}

/// Points of `re_lo:re_hi:im_lo:im_hi:n` as rows of constant imaginary
/// part, top row first.
fn complex_grid(s: &str) -> Res<Vec<Vec<Complex64>>> {
    let v = parse_fields(s, 5, "complex grid")?;
    let n = v[4];
    if n < 1.0 || n.fract() != 0.0 {
        return Err(CliError::Input(format!("complex grid point count {n}")));
    }
    let n = n as usize;
    let at = |lo: f64, hi: f64, i: usize| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
    Ok((0..n)
        .rev()
        .map(|j| (0..n).map(|i| Complex64::new(at(v[0], v[1], i), at(v[2], v[3], j))).collect())
        .collect())
}

fn create(dir: &Path, name: &str) -> Res<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_manifest(dir: &Path, m: &RunManifest) -> Res<()> {
    fs::write(dir.join("manifest.json"), m.to_json() + "\n")?;
    Ok(())
}

fn family(c: &Common, needed: usize) -> Res<OperatorFamily> {
    let sub = Substitution::parse(&c.sub)?;
    Ok(OperatorFamily::new(sub, c.kappa, needed.max(DEFAULT_PREFIX_LEN))?)
}

fn cmd_info(c: &Common) -> Res<()> {
    let sub = Substitution::parse(&c.sub)?;
    let cls = sub.classify();
    let m = sub.abelianization();
    println!("substitution      {}", c.sub);
    println!("abelianization    {:?}", m.0);
    println!("det / trace       {} / {}", m.det(), m.trace());
    println!("positive          {}", cls.positive);
    println!("unimodular        {}", cls.unimodular);
    println!("hyperbolic        {}", cls.hyperbolic);
    if !cls.hyperbolic {
        return Err(CliError::Input(format!("'{}' is not hyperbolic", c.sub)));
    }
    let ab = sub.abelian_data()?;
    println!("lambda            {:.12}", ab.lambda);
    println!("normal form       {:?} (sign {})", ab.normal_form.0, ab.sign);
    println!("conjugator        {:?}", ab.conjugator.0);
    println!("alpha             {:.12}", ab.alpha);
    println!("beta              {:.12}", ab.beta);
    let tm = if sub == Substitution::fibonacci() { TraceMap::fibonacci() } else { TraceMap::new(sub.clone())? };
    println!("trace map words   {}", tm.words().iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", "));
    match tm.infinity_vertex() {
        Ok(v) => println!("vertex at infinity {v}"),
        Err(e) => println!("vertex at infinity unavailable ({e})"),
    }
    if cls.positive {
        println!("invariant word    {}", sub.invariant_word_prefix(60)?);
    }
    Ok(())
}

fn cmd_spectrum(c: &Common, grid: Option<&str>, n_power: Option<u32>) -> Res<()> {
    let of = family(c, 0)?;
    let grid = match grid {
        Some(g) => {
            let v = parse_fields(g, 3, "grid")?;
            EnergyGrid::new(v[0], v[1], v[2])?
        }
        None => {
            let b = of.norm_bound() + 0.5;
            EnergyGrid::new(-b, b, 0.005)?
        }
    };
    let ep = c.escape();
    let mut m = c.manifest("spectrum").param("grid", [grid.lo, grid.hi, grid.step]);
    if let Some(n) = n_power {
        m = m.param("n_power", n);
    }
    let bracket = spectrum_escape(&of, &grid, &ep)?;
    let header = vec![m.header()];
    bracket.outer.write_csv(create(&c.out, "spectrum_outer.csv")?, &header)?;
    bracket.inner.write_csv(create(&c.out, "spectrum_inner.csv")?, &header)?;
    if let Some(n) = n_power {
        band_spectrum(&of, n)?.write_csv(create(&c.out, "spectrum_bands.csv")?, &header)?;
    }
    write_manifest(&c.out, &m)?;
    println!(
        "outer: {} intervals, length {:.6}; inner: {} intervals, length {:.6}",
        bracket.outer.intervals().len(),
        bracket.outer.total_length(),
        bracket.inner.intervals().len(),
        bracket.inner.total_length()
    );
    Ok(())
}

fn cmd_dos(c: &Common, l: usize, windows: usize) -> Res<()> {
    let of = family(c, l + windows)?;
    let m = c.manifest("dos").param("L", l).param("windows", windows);
    let dos = density_of_states(&of, l, windows)?;
    dos.write_csv(create(&c.out, "dos.csv")?, &[m.header()])?;
    write_manifest(&c.out, &m)?;
    println!("{} atoms, mean {:.6}", dos.len(), dos.mean());
    Ok(())
}

fn cmd_lyapunov(c: &Common, grid: &str, n: usize, l: usize, windows: usize) -> Res<()> {
    let of = family(c, n.max(l + windows))?;
    let pts: Vec<Complex64> = complex_grid(grid)?.into_iter().flatten().collect();
    let ep = c.escape();
    let m = c.manifest("lyapunov").param("complex_grid", grid).param("N", n).param("L", l).param("windows", windows);
    let dos = density_of_states(&of, l, windows)?;
    let rows: Vec<[f64; 3]> = pts
        .par_iter()
        .map(|&e| -> Res<[f64; 3]> {
            let d = lyapunov_direct(&of, e, n)?.gamma;
            let g = match lyapunov_green(&of, e, &ep) {
                Ok(s) => s.gamma,
                Err(SchrodingerError::Inconclusive(_)) => f64::NAN,
                Err(e) => return Err(e.into()),
            };
            let t = lyapunov_thouless(e, &dos).map_or(f64::NAN, |s| s.gamma);
            Ok([d, g, t])
        })
        .collect::<Res<_>>()?;
    let mut out = create(&c.out, "lyapunov.csv")?;
    writeln!(out, "# {}", m.header())?;
    writeln!(out, "re,im,gamma,method")?;
    for (e, r) in pts.iter().zip(&rows) {
        for (gamma, method) in r.iter().zip(["direct", "green", "thouless"]) {
            writeln!(out, "{},{},{},{}", e.re, e.im, gamma, method)?;
        }
    }
    out.flush()?;
    write_manifest(&c.out, &m)?;
    let worst = rows.iter().map(|r| (r[0] - r[1]).abs().max((r[0] - r[2]).abs()).max((r[1] - r[2]).abs())).fold(0.0, f64::max);
    println!("{} points, largest pairwise disagreement {:.3e}", pts.len(), worst);
    Ok(())
}

fn cmd_green_map(c: &Common, grid: &str, gamma_max: f64) -> Res<()> {
    if !(gamma_max > 0.0) {
        return Err(CliError::Input(format!("gamma-max {gamma_max}")));
    }
    let sub = Substitution::parse(&c.sub)?;
    let tm = if sub == Substitution::fibonacci() { TraceMap::fibonacci() } else { TraceMap::new(sub)? };
    let norm = tm.abelian().alpha_plus_beta();
    let rows = complex_grid(grid)?;
    let ep = c.escape();
    ep.validate()?;
    let m = c.manifest("green-map").param("complex_grid", grid).param("gamma_max", gamma_max);
    let values: Vec<Vec<(f64, GreenStatus)>> = rows
        .par_iter()
        .map(|row| {
            row.iter()
                .map(|&e| green_plus(&tm, &schrodinger_point(e, c.kappa), &ep).map(|g| (g.value / norm, g.status)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut out = create(&c.out, "green_map.csv")?;
    writeln!(out, "# {}", m.header())?;
    writeln!(out, "re,im,gamma,status")?;
    for (row, vals) in rows.iter().zip(&values) {
        for (e, (g, s)) in row.iter().zip(vals) {
            let status = match s {
                GreenStatus::Converged => "converged",
                GreenStatus::BoundedOrbit => "bounded",
                GreenStatus::Inconclusive => "inconclusive",
            };
            writeln!(out, "{},{},{},{}", e.re, e.im, g, status)?;
        }
    }
    out.flush()?;
    let pixels: Vec<Vec<u16>> = values.iter().map(|r| r.iter().map(|(g, _)| gray_level(*g, gamma_max)).collect()).collect();
    let mut img = create(&c.out, "green_map.pgm")?;
    write_pgm16(&mut img, &pixels, &m.header())?;
    img.flush()?;
    write_manifest(&c.out, &m)?;
    println!("{}x{} pixels", pixels.first().map_or(0, |r| r.len()), pixels.len());
    Ok(())
}

fn cmd_lambda_points(c: &Common, n_power: u32, target: f64) -> Res<()> {
    let of = family(c, 0)?;
    let m = c.manifest("lambda-points").param("n_power", n_power).param("target", target);
    let r = mixed_bc_eigenvalues(&of, n_power, target)?;
    let mut out = create(&c.out, "lambda_points.csv")?;
    writeln!(out, "# {}", m.header())?;
    writeln!(out, "E")?;
    for e in &r.roots {
        writeln!(out, "{e}")?;
    }
    out.flush()?;
    write_manifest(&c.out, &m)?;
    println!("period {}, {} roots, {} distinct", r.period, r.roots.len(), r.distinct(1e-9).len());
    Ok(())
}

fn cmd_verify(c: &Common, quick: bool, alpha_error: f64) -> Res<()> {
    let cfg = VerifyConfig { quick, alpha_perturbation: alpha_error, seed: seed_from_env() };
    let m = c.manifest("verify").param("quick", quick).param("alpha_perturbation", alpha_error);
    let report = run_verification(&cfg);
    for r in &report.criteria {
        println!("{}", r.summary_line());
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Numeric(e.to_string()))?;
    fs::write(c.out.join("verify_report.json"), json + "\n")?;
    write_manifest(&c.out, &m)?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<String> = report.criteria.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
        Err(CliError::Verification(format!("criteria {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Res<()> {
    let c = &cli.common;
    if !c.kappa.is_finite() {
        return Err(CliError::Input(format!("kappa {}", c.kappa)));
    }
    if !matches!(cli.command, Command::Info) {
        fs::create_dir_all(&c.out)?;
    }
    match &cli.command {
        Command::Info => cmd_info(c),
        Command::Spectrum { grid, n_power } => cmd_spectrum(c, grid.as_deref(), *n_power),
        Command::Dos { l, windows } => cmd_dos(c, *l, *windows),
        Command::Lyapunov { complex_grid, n, l, windows } => cmd_lyapunov(c, complex_grid, *n, *l, *windows),
        Command::GreenMap { complex_grid, gamma_max } => cmd_green_map(c, complex_grid, *gamma_max),
        Command::LambdaPoints { n_power, target } => cmd_lambda_points(c, *n_power, *target),
        Command::Verify { quick, inject_alpha_error } => cmd_verify(c, *quick, *inject_alpha_error),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.common.workers {
        if k == 0 {
            eprintln!("invalid input: --workers must be positive");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(k);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("numerical failure: thread pool: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
