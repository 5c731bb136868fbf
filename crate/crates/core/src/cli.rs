//! `qdgate` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure or runtime error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::circuits::{reference, trace_checkpoints, verify_gate, GateKind, GateSpec};
use crate::emitter::{EmitterParams, LeakConvention};
use crate::hilbert::SpinPreparation;
use crate::metrics::{averages, sweep, Axis, FidelityConvention, SweepGrid};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable naming the default directory for sweep output.
pub const OUT_DIR_ENV: &str = "QDGATE_OUT_DIR";

/// Deviation above which a traced checkpoint counts as a mismatch.
const TRACE_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "qdgate", version, about = "Quantum-dot spin gate simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check ideal circuits against their target unitaries.
    Verify(VerifyArgs),
    /// Angle-averaged fidelity and efficiency at one parameter point.
    Point(PointArgs),
    /// Fidelity/efficiency surface over g/κ and κs/2κ.
    Sweep(SweepArgs),
    /// Intermediate states of an ideal run, compared with closed forms.
    Trace(TraceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Ideal,
    Realistic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Inclusive range of root indices, written `a..b` or `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootRange {
    pub first: u32,
    pub last: u32,
}

fn parse_root(s: &str) -> Result<u32, String> {
    let m: u32 = s.trim().parse().map_err(|_| format!("'{s}' is not a non-negative integer"))?;
    if m == 0 {
        return Err("m must be >= 1".into());
    }
    Ok(m)
}

fn parse_root_range(s: &str) -> Result<RootRange, String> {
    let (first, last) = match s.split_once("..") {
        Some((a, b)) => (parse_root(a)?, parse_root(b.trim_start_matches('='))?),
        None => {
            let m = parse_root(s)?;
            (m, m)
        }
    };
    if last < first {
        return Err(format!("empty range {s}"));
    }
    Ok(RootRange { first, last })
}

/// `start:end` with both ends non-negative.
fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected start:end, got '{s}'"))?;
    let a: f64 = a.parse().map_err(|_| format!("bad number '{a}'"))?;
    let b: f64 = b.parse().map_err(|_| format!("bad number '{b}'"))?;
    Ok((a, b))
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub gate: GateKind,
    /// Root index or inclusive range, e.g. `2` or `1..4`.
    #[arg(long, value_parser = parse_root_range, default_value = "1..8")]
    pub m: RootRange,
    /// Seeded random product preparations, in addition to all basis inputs.
    #[arg(long, default_value_t = 50)]
    pub inputs: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EmitterArgs {
    /// g/κ (figure parameterization).
    #[arg(long, conflicts_with_all = ["g_over_kpks", "ks_over_k"])]
    pub g_over_k: Option<f64>,
    /// κs/2κ (figure parameterization).
    #[arg(long, conflicts_with_all = ["g_over_kpks", "ks_over_k"])]
    pub ks_over_2k: Option<f64>,
    /// g/(κ+κs) (text parameterization).
    #[arg(long)]
    pub g_over_kpks: Option<f64>,
    /// κs/κ (text parameterization).
    #[arg(long)]
    pub ks_over_k: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub gamma_over_k: f64,
}

impl EmitterArgs {
    fn params(&self) -> Result<EmitterParams, CliError> {
        match (self.g_over_k, self.g_over_kpks) {
            (Some(g), None) => Ok(EmitterParams::from_figure_ratios(g, self.ks_over_2k.unwrap_or(0.0), self.gamma_over_k)?),
            (None, Some(g)) => Ok(EmitterParams::from_text_ratios(g, self.ks_over_k.unwrap_or(0.0), self.gamma_over_k)?),
            _ => Err(CliError::Usage(
                "realistic mode needs --g-over-k (with optional --ks-over-2k) or --g-over-kpks (with optional --ks-over-k)"
                    .into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, value_enum)]
    pub gate: GateKind,
    #[arg(long, value_parser = parse_root, default_value = "2")]
    pub m: u32,
    #[arg(long, value_enum, default_value_t = Mode::Realistic)]
    pub mode: Mode,
    #[command(flatten)]
    pub emitter: EmitterArgs,
    #[arg(long, value_enum, default_value_t = LeakConvention::Coherent)]
    pub leak: LeakConvention,
    #[arg(long, value_enum, default_value_t = FidelityConvention::NormalizedOverlap)]
    pub fidelity: FidelityConvention,
    /// Points per angle; defaults to 64 (swap) or 32 (cswap).
    #[arg(long)]
    pub quadrature_n: Option<usize>,
    /// Constant shift of every angle grid, in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub offset: f64,
    /// Also print the fidelity under every convention.
    #[arg(long)]
    pub all_conventions: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub gate: GateKind,
    #[arg(long, value_parser = parse_root, default_value = "2")]
    pub m: u32,
    /// g/κ interval `start:end`.
    #[arg(long, value_parser = parse_interval, default_value = "0:5")]
    pub g_range: (f64, f64),
    #[arg(long, default_value_t = 50)]
    pub g_count: usize,
    /// κs/2κ interval `start:end`.
    #[arg(long, value_parser = parse_interval, default_value = "0:1")]
    pub ks_range: (f64, f64),
    #[arg(long, default_value_t = 50)]
    pub ks_count: usize,
    #[arg(long, default_value_t = 0.1)]
    pub gamma_over_k: f64,
    #[arg(long, value_enum, default_value_t = LeakConvention::Coherent)]
    pub leak: LeakConvention,
    #[arg(long, value_enum, default_value_t = FidelityConvention::NormalizedOverlap)]
    pub fidelity: FidelityConvention,
    #[arg(long)]
    pub quadrature_n: Option<usize>,
    /// Output file; defaults to `sweep_<gate>_m<m>.<ext>` in $QDGATE_OUT_DIR or the working directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json; inferred from the output extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long, value_enum)]
    pub gate: GateKind,
    #[arg(long, value_parser = parse_root, default_value = "2")]
    pub m: u32,
    #[arg(long, value_enum, default_value_t = Mode::Ideal)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    /// Print every amplitude above this magnitude.
    #[arg(long)]
    pub amplitudes: Option<f64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => CliError::Runtime(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Formats with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        format!("{:.*}", (5 - mag).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a, out),
        Command::Point(a) => cmd_point(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Trace(a) => cmd_trace(a, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut all_passed = true;
    let mut reports = Vec::new();
    for m in a.m.first..=a.m.last {
        let r = verify_gate(&GateSpec::ideal(a.gate, m)?, a.inputs, a.seed)?;
        all_passed &= r.passed;
        reports.push(r);
    }
    if a.format == Format::Json {
        serde_json::to_writer_pretty(&mut *out, &reports).map_err(|e| CliError::Runtime(e.to_string()))?;
        writeln!(out)?;
    } else {
        writeln!(out, "gate {}  inputs {}  seed {}", a.gate, reports[0].n_inputs, a.seed)?;
        writeln!(out, "{:>3}  {:>12}  {:>12}  {:>12}  result", "m", "state_err", "prob_err", "matrix_err")?;
        for r in &reports {
            writeln!(
                out,
                "{:>3}  {:>12}  {:>12}  {:>12}  {}",
                r.m,
                sig6(r.max_state_error),
                sig6(r.max_probability_error),
                sig6(r.max_matrix_error),
                if r.passed { "PASS" } else { "FAIL" }
            )?;
        }
        if reports.len() == 1 {
            writeln!(out, "outcomes (first random preparation):")?;
            for (d, (label, p)) in a.gate.detectors().iter().zip(&reports[0].sample_probabilities) {
                let ff: Vec<String> = d.feed_forward.iter().map(|p| p.to_string()).collect();
                writeln!(out, "  {label}  {:<4}  ff {:<16}  p {}", d.mode_label(), ff.join(","), sig6(*p))?;
            }
        }
        writeln!(out, "{}", if all_passed { "PASS" } else { "FAIL" })?;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_point(a: &PointArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = match a.mode {
        Mode::Ideal => GateSpec::ideal(a.gate, a.m)?,
        Mode::Realistic => GateSpec::realistic(a.gate, a.m, a.emitter.params()?, a.leak)?,
    };
    let n = a.quadrature_n.unwrap_or(a.gate.default_quadrature_n());
    let v = averages(&spec, n, a.offset)?;
    let fid = v.fidelity(a.fidelity);
    let leak = match a.mode {
        Mode::Ideal => "none",
        Mode::Realistic => match a.leak {
            LeakConvention::Coherent => "coherent",
            LeakConvention::Lossy => "lossy",
        },
    };
    let params = match spec.scattering {
        crate::circuits::Scattering::Realistic { params, .. } => Some(params),
        _ => None,
    };
    match a.format {
        Format::Json => {
            let doc = json!({
                "gate": a.gate,
                "m": a.m,
                "mode": if params.is_some() { "realistic" } else { "ideal" },
                "params": params,
                "leak_convention": leak,
                "fidelity_convention": a.fidelity,
                "quadrature_n": n,
                "angle_offset": a.offset,
                "avg_fidelity": fid,
                "avg_efficiency": v.avg_efficiency,
                "all_conventions": v,
            });
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::Runtime(e.to_string()))?;
            writeln!(out)?;
        }
        _ => {
            writeln!(
                out,
                "gate {}  m {}  leak {}  fidelity {}  quadrature_n {}",
                a.gate,
                a.m,
                leak,
                a.fidelity.name(),
                n
            )?;
            if let Some(p) = params {
                writeln!(
                    out,
                    "g/kappa {}  ks/2kappa {}  g/(kappa+ks) {}  ks/kappa {}  gamma/kappa {}",
                    sig6(p.g_over_kappa()),
                    sig6(p.ks_over_2kappa()),
                    sig6(p.g_over_kappa_plus_ks()),
                    sig6(p.ks_over_kappa()),
                    sig6(p.gamma / p.kappa)
                )?;
            }
            writeln!(out, "avg_fidelity {}", sig6(fid))?;
            writeln!(out, "avg_efficiency {}", sig6(v.avg_efficiency))?;
            if a.all_conventions {
                for c in FidelityConvention::ALL {
                    writeln!(out, "  {} {}", c.name(), sig6(v.fidelity(c)))?;
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn sweep_output(a: &SweepArgs) -> Result<(PathBuf, Format), CliError> {
    let format = match (a.format, &a.output) {
        (Some(Format::Text), _) => return Err(CliError::Usage("sweep output format must be csv or json".into())),
        (Some(f), _) => f,
        (None, Some(p)) if p.extension().is_some_and(|e| e == "json") => Format::Json,
        _ => Format::Csv,
    };
    let path = match &a.output {
        Some(p) => p.clone(),
        None => {
            let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
            let ext = if format == Format::Json { "json" } else { "csv" };
            dir.join(format!("sweep_{}_m{}.{ext}", a.gate, a.m))
        }
    };
    Ok((path, format))
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let grid = SweepGrid {
        kind: a.gate,
        m: a.m,
        g_over_kappa: Axis::new(a.g_range.0, a.g_range.1, a.g_count),
        ks_over_2kappa: Axis::new(a.ks_range.0, a.ks_range.1, a.ks_count),
        gamma_over_kappa: a.gamma_over_k,
        leak: a.leak,
        fidelity_convention: a.fidelity,
    };
    grid.validate()?;
    let (path, format) = sweep_output(a)?;
    let n = a.quadrature_n.unwrap_or(a.gate.default_quadrature_n());
    let table = sweep(&grid, n, a.jobs)?;
    let file = std::fs::File::create(&path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let writer = std::io::BufWriter::new(file);
    match format {
        Format::Json => table.write_json(writer)?,
        _ => table.write_csv(writer)?,
    }
    writeln!(out, "wrote {} rows to {}", table.rows.len(), path.display())?;
    for c in table.monotone_checks(1e-9) {
        writeln!(
            out,
            "  {}: {} ({} of {} steps against, worst {})",
            c.name,
            if c.passed() { "ok" } else { "violated" },
            c.violations,
            c.steps,
            sig6(c.worst)
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_trace(a: &TraceArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.mode == Mode::Realistic {
        return Err(CliError::Usage(Error::TraceRequiresIdeal.to_string()));
    }
    let spec = GateSpec::ideal(a.gate, a.m)?;
    let prep = SpinPreparation::new(a.alpha, a.beta, a.delta);
    let traced = trace_checkpoints(&spec, &prep)?;
    let expected = reference::checkpoints(a.gate, &prep, a.m)?;
    let mut worst: f64 = 0.0;
    for (cp, exp) in traced.iter().zip(&expected) {
        let dev = cp.state.max_abs_diff(exp)?;
        worst = worst.max(dev);
        let terms = cp.state.describe(1e-12);
        writeln!(
            out,
            "{}  terms {}  norm {}  max_dev {}",
            cp.label,
            terms.len(),
            sig6(cp.state.norm_sqr()),
            sig6(dev)
        )?;
        if let Some(th) = a.amplitudes {
            for t in cp.state.describe(th) {
                writeln!(out, "    {t}")?;
            }
        }
    }
    let ok = worst < TRACE_TOL;
    writeln!(out, "{} checkpoints, max deviation {}: {}", traced.len(), sig6(worst), if ok { "PASS" } else { "FAIL" })?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_examples() {
        assert_eq!(sig6(0.990934), "0.990934");
        assert_eq!(sig6(0.99093412), "0.990934");
        assert_eq!(sig6(12.3456789), "12.3457");
        assert_eq!(sig6(1.5e-13), "1.50000e-13");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn root_ranges() {
        assert_eq!(parse_root_range("1..4").unwrap(), RootRange { first: 1, last: 4 });
        assert_eq!(parse_root_range("3").unwrap(), RootRange { first: 3, last: 3 });
        assert_eq!(parse_root_range("1..=2").unwrap(), RootRange { first: 1, last: 2 });
        assert!(parse_root_range("0").is_err());
        assert!(parse_root_range("0..3").is_err());
        assert!(parse_root_range("4..2").is_err());
        assert!(parse_root_range("x").is_err());
    }

    #[test]
    fn intervals() {
        assert_eq!(parse_interval("0:5").unwrap(), (0.0, 5.0));
        assert!(parse_interval("5").is_err());
    }
}
