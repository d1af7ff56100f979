//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 two oracles disagree
//! on an exponent, 64 usage error, 65 unparsable input data.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cremona::{
    build_generalized, build_gt, verify_group_law, verify_i_identity, verify_inverse,
    verify_j_identity, verify_quadric_invariance, CremonaMap, GroupLawMode, IdentityReport,
    PhiSpec, TParam,
};
use crate::invariants::{invariant_i, invariant_j, x_ring};
use crate::multiplicity::{
    curve_b, curve_c, curve_t, mult_along_curve, mult_at_point, point_q, ParametrizedCurve,
    ProjectivePoint,
};
use crate::polyring::{serial, Polynomial, Rational, DEFAULT_PRIME_BITS};
use crate::verify::build_report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_ORACLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

pub const SEED_ENV: &str = "QUADRIC_CREMONA_SEED";
pub const PRIME_BITS_ENV: &str = "QUADRIC_CREMONA_PRIME_BITS";

const ABOUT: &str = "Exact verification of the degree-13 Cremona family g_t of P^4 \
that preserves the quadric I = 0.";

const LONG_ABOUT: &str = "Exact verification of the degree-13 Cremona family g_t of P^4 \
that preserves the quadric I = 0.

Conventions:
  A point (x0, ..., x4) is the binary quartic
    x0 T0^4 + 4 x1 T0^3 T1 + 6 x2 T0^2 T1^2 + 4 x3 T0 T1^3 + x4 T1^4,
  i.e. coefficients are binomially normalized. I = x0 x4 - 4 x1 x3 + 3 x2^2
  and J is the 3x3 Hankel determinant of x0..x4.

  Composition applies the right-hand map first: compose(f, g) has
  coordinates f_i(g_0, ..., g_4), so g_{-t} after g_t is written
  compose(g_{-t}, g_t).";

#[derive(Debug, Parser)]
#[command(name = "quadric-cremona", version, about = ABOUT, long_about = LONG_ABOUT)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,

    /// Bit length of the primes used in modular checks.
    #[arg(long, global = true, env = PRIME_BITS_ENV, default_value_t = DEFAULT_PRIME_BITS,
          value_parser = clap::value_parser!(u32).range(32..=63))]
    pub prime_bits: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check identities of the family and emit one JSON report per line.
    Verify {
        #[command(subcommand)]
        what: VerifyWhat,
    },
    /// Multiplicity of a form at a point or along a curve.
    Mult {
        #[command(subcommand)]
        target: MultTarget,
    },
    /// Build the base-locus multiplicity report.
    Report(ReportArgs),
    /// Identities for the generalized family built from a binary form phi_m.
    Generalized(GeneralizedArgs),
}

#[derive(Debug, Subcommand)]
pub enum VerifyWhat {
    /// J-, I- and quadric identities, group law and inverse.
    Identities(IdentityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Modular,
    ExactSpecialized,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    /// Rational family parameter for the invariant identities.
    #[arg(long, conflicts_with = "symbolic")]
    pub t: Option<Rational>,
    /// Keep t symbolic (the default).
    #[arg(long)]
    pub symbolic: bool,
    /// Also check the generalized family of this degree.
    #[arg(long)]
    pub m: Option<u32>,
    /// Comma-separated coefficients of phi_m, highest power of x first.
    #[arg(long, requires = "m")]
    pub phi: Option<String>,
    /// Strategy for the composition identities; both modular and
    /// exact-specialized run when omitted.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Modular trials (one prime each) or exact specializations.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub trials: u32,
    /// Also run the composition identities with nothing specialized.
    #[arg(long)]
    pub full_exact: bool,
}

#[derive(Debug, Args)]
pub struct FormArgs {
    /// f0..f4 (family member at --t), I, J, x0..x4, or a polynomial file.
    #[arg(long)]
    pub form: String,
    #[arg(long, default_value = "1")]
    pub t: Rational,
}

#[derive(Debug, Subcommand)]
pub enum MultTarget {
    Point {
        #[command(flatten)]
        form: FormArgs,
        /// `q` or five comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    Curve {
        #[command(flatten)]
        form: FormArgs,
        /// B, C, T, or a file with five polynomials in one variable.
        #[arg(long)]
        curve: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub t: Rational,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeneralizedArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub m: u32,
    /// Comma-separated coefficients of phi_m; random when omitted.
    #[arg(long)]
    pub phi: Option<String>,
    /// Write the five coordinates here in the polynomial text format.
    #[arg(long)]
    pub coords: Option<PathBuf>,
}

/// An error carrying its exit code.
struct Exit(i32, String);

impl Exit {
    fn usage(msg: impl Into<String>) -> Self {
        Exit(EXIT_USAGE, msg.into())
    }

    fn data(msg: impl Into<String>) -> Self {
        Exit(EXIT_DATA, msg.into())
    }

    fn internal(msg: impl std::fmt::Display) -> Self {
        Exit(EXIT_FAILURE, msg.to_string())
    }

    /// A closed stdout (e.g. piped into `head`) ends the run quietly.
    fn output(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            Exit(EXIT_OK, String::new())
        } else {
            Exit::internal(e)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e.render());
                    return if e.kind() == DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_USAGE
                    } else {
                        EXIT_OK
                    };
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            if !msg.is_empty() {
                let _ = writeln!(err, "error: {msg}");
            }
            code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Exit> {
    match &cli.command {
        Command::Verify {
            what: VerifyWhat::Identities(a),
        } => cmd_verify(cli, a, out),
        Command::Mult { target } => cmd_mult(target, out),
        Command::Report(a) => cmd_report(cli, a, out),
        Command::Generalized(a) => cmd_generalized(cli, a, out),
    }
}

fn parse_rationals(s: &str) -> Result<Vec<Rational>, Exit> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<Rational>()
                .map_err(|e| Exit::usage(format!("bad rational `{p}`: {e}")))
        })
        .collect()
}

fn phi_spec(m: u32, phi: Option<&str>, seed: u64) -> Result<PhiSpec, Exit> {
    let coeffs = match phi {
        Some(text) => parse_rationals(text)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c: Vec<Rational> =
                (0..=m).map(|_| Rational::from_int(rng.gen_range(-5..=5))).collect();
            if c[0].is_zero() {
                c[0] = Rational::one();
            }
            c
        }
    };
    PhiSpec::rational(m, &coeffs).map_err(|e| Exit::usage(format!("invalid --phi: {e}")))
}

fn emit_reports(mut reports: Vec<IdentityReport>, out: &mut dyn Write) -> Result<i32, Exit> {
    reports.sort_by(|a, b| (&a.identity, &a.method).cmp(&(&b.identity, &b.method)));
    for r in &reports {
        let line = serde_json::to_string(r).map_err(Exit::internal)?;
        writeln!(out, "{line}").map_err(Exit::output)?;
    }
    Ok(if reports.iter().any(|r| !r.holds) {
        EXIT_FAILURE
    } else if reports.iter().any(|r| !r.oracles_agree) {
        EXIT_ORACLE
    } else {
        EXIT_OK
    })
}

fn map_reports(map: &CremonaMap, suffix: &str) -> Result<Vec<IdentityReport>, Exit> {
    let mut v = vec![
        verify_j_identity(map).map_err(Exit::internal)?,
        verify_i_identity(map).map_err(Exit::internal)?,
        verify_quadric_invariance(map).map_err(Exit::internal)?,
    ];
    for r in &mut v {
        r.identity.push_str(suffix);
    }
    Ok(v)
}

fn cmd_verify(cli: &Cli, a: &IdentityArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    let t = match &a.t {
        Some(t) => TParam::Value(t.clone()),
        None => TParam::Symbolic("t".into()),
    };
    let gt = build_gt(&t).map_err(Exit::internal)?;
    let mut reports = map_reports(&gt, "")?;
    if let Some(m) = a.m {
        let spec = phi_spec(m, a.phi.as_deref(), cli.seed)?;
        let gen = build_generalized(&spec).map_err(Exit::internal)?;
        reports.extend(map_reports(&gen, &format!("_generalized_m{m}"))?);
    }
    let mut modes = match a.mode {
        Some(ModeArg::Modular) => vec![GroupLawMode::Modular],
        Some(ModeArg::ExactSpecialized) => vec![GroupLawMode::ExactSpecialized],
        Some(ModeArg::Exact) => vec![GroupLawMode::Exact],
        None => vec![GroupLawMode::Modular, GroupLawMode::ExactSpecialized],
    };
    if a.full_exact && !modes.contains(&GroupLawMode::Exact) {
        modes.push(GroupLawMode::Exact);
    }
    for mode in modes {
        // exact specializations are far costlier than modular trials
        let trials = if mode == GroupLawMode::ExactSpecialized { a.trials.min(2) } else { a.trials };
        reports.push(verify_group_law(mode, trials, cli.prime_bits, cli.seed).map_err(Exit::internal)?);
        reports.push(verify_inverse(mode, trials, cli.prime_bits, cli.seed).map_err(Exit::internal)?);
    }
    emit_reports(reports, out)
}

fn cmd_generalized(cli: &Cli, a: &GeneralizedArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    let spec = phi_spec(a.m, a.phi.as_deref(), cli.seed)?;
    let gen = build_generalized(&spec).map_err(Exit::internal)?;
    if let Some(path) = &a.coords {
        let text = serial::many_to_text(gen.coords());
        std::fs::write(path, text).map_err(|e| Exit::internal(format!("{}: {e}", path.display())))?;
    }
    emit_reports(map_reports(&gen, "")?, out)
}

fn read_file(path: &str) -> Result<String, Exit> {
    std::fs::read_to_string(path).map_err(|e| Exit::data(format!("{path}: {e}")))
}

fn resolve_form(f: &FormArgs) -> Result<Polynomial, Exit> {
    let name = f.form.as_str();
    if let Some(k) = name.strip_prefix('f').and_then(|k| k.parse::<usize>().ok()) {
        if k < 5 {
            let g = build_gt(&TParam::Value(f.t.clone())).map_err(Exit::internal)?;
            return Ok(g.coords()[k].clone());
        }
    }
    match name {
        "I" => return Ok(invariant_i()),
        "J" => return Ok(invariant_j()),
        _ => {}
    }
    if let Ok(v) = Polynomial::var(&x_ring(), name) {
        return Ok(v);
    }
    let text = read_file(name)?;
    serial::from_text(&text).map_err(|e| Exit::data(format!("{name}: {e}")))
}

fn resolve_curve(name: &str) -> Result<ParametrizedCurve, Exit> {
    match name {
        "B" => return Ok(curve_b()),
        "C" => return Ok(curve_c()),
        "T" => return Ok(curve_t()),
        _ => {}
    }
    let text = read_file(name)?;
    let comps = serial::many_from_text(&text).map_err(|e| Exit::data(format!("{name}: {e}")))?;
    let comps: [Polynomial; 5] = comps
        .try_into()
        .map_err(|v: Vec<Polynomial>| Exit::data(format!("{name}: expected 5 polynomials, got {}", v.len())))?;
    ParametrizedCurve::new(comps, name).map_err(|e| Exit::data(format!("{name}: {e}")))
}

fn cmd_mult(target: &MultTarget, out: &mut dyn Write) -> Result<i32, Exit> {
    let value = match target {
        MultTarget::Point { form, point } => {
            let f = resolve_form(form)?;
            let p = if point.trim() == "q" {
                point_q()
            } else {
                let coords: Vec<Rational> = point
                    .split(',')
                    .map(|p| p.trim().parse::<Rational>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| Exit::data(format!("bad point `{point}`: {e}")))?;
                let coords: [Rational; 5] = coords
                    .try_into()
                    .map_err(|_| Exit::data(format!("point `{point}` needs five coordinates")))?;
                ProjectivePoint::new(coords).map_err(|e| Exit::data(e.to_string()))?
            };
            mult_at_point(&f, &p).map_err(|e| Exit::data(e.to_string()))?
        }
        MultTarget::Curve { form, curve } => {
            let f = resolve_form(form)?;
            let c = resolve_curve(curve)?;
            mult_along_curve(&f, &c).map_err(|e| Exit::data(e.to_string()))?
        }
    };
    writeln!(out, "{value}").map_err(Exit::output)?;
    Ok(EXIT_OK)
}

fn cmd_report(cli: &Cli, a: &ReportArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    if a.t.is_zero() {
        return Err(Exit::usage("t = 0 is the degenerate member of the family"));
    }
    let report = build_report(&a.t, cli.seed).map_err(Exit::internal)?;
    let mut text = match a.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &a.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Exit::internal(format!("{}: {e}", path.display())))?,
        None => out.write_all(text.as_bytes()).map_err(Exit::output)?,
    }
    Ok(if report.violated && report.checks.all_pass() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}
