//! Command-line front end.
//!
//! Every subcommand reads plain-text inputs (CSV, filter files, binary PGM)
//! and writes plain text. Output files are written atomically. Exit status
//! is 0 on success, 1 on I/O or computation errors and 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::compress::{self, Basis, Data};
use crate::dilation;
use crate::error::{log2_exact, Error, Result};
use crate::fft;
use crate::filters::DEFAULT_ORTHO_TOL;
use crate::fwt::{self, Normalization, Pyramid2d};
use crate::io;
use crate::jsr::{self, MatrixNorm};

#[derive(Debug, Parser)]
#[command(name = "dyadic", version, about = "Fast Fourier and wavelet transforms, dilation equations and compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pyramid wavelet transform of a signal (CSV) or image (PGM / matrix CSV)
    Fwt(FwtArgs),
    /// Radix-2 FFT of complex `re,im` lines
    Fft(FftArgs),
    /// Admissibility report for a filter
    CheckFilter(CheckFilterArgs),
    /// Samples of the scaling function phi on a dyadic grid
    Cascade(SampleArgs),
    /// Samples of the wavelet W on a dyadic grid
    Wavelet(SampleArgs),
    /// Joint spectral radius bounds and Hölder exponent
    Jsr(JsrArgs),
    /// Keep the largest coefficients in one basis and reconstruct
    Compress(CompressArgs),
    /// Compression errors for several bases and fractions
    Contest(ContestArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Orthonormal,
    Paper,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Orthonormal => Normalization::Orthonormal,
            NormalizationArg::Paper => Normalization::Unnormalized,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormArg {
    Spectral,
    Infinity,
}

impl From<NormArg> for MatrixNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Spectral => MatrixNorm::Spectral,
            NormArg::Infinity => MatrixNorm::Infinity,
        }
    }
}

#[derive(Debug, Args)]
struct FwtArgs {
    /// Built-in filter name (haar, hat, d4, stretched-box) or a filter file
    #[arg(long, default_value = "haar")]
    filter: String,
    /// Pyramid levels [default: all, or log2(min side) - 2 for images]
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, value_enum, default_value = "orthonormal")]
    normalization: NormalizationArg,
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Synthesize instead of analyze
    #[arg(long)]
    inverse: bool,
    /// Treat the input as a 2-D image (implied for .pgm files)
    #[arg(long)]
    image: bool,
}

#[derive(Debug, Args)]
struct FftArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    inverse: bool,
    /// Print the twiddle multiplication count to standard error
    #[arg(long)]
    count: bool,
}

#[derive(Debug, Args)]
struct CheckFilterArgs {
    #[arg(long)]
    filter: String,
    #[arg(long, default_value_t = DEFAULT_ORTHO_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    filter: String,
    /// Grid spacing is 2^-depth
    #[arg(long, default_value_t = 8)]
    depth: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct JsrArgs {
    /// Use the reduced refinement pair of this filter
    #[arg(long, conflicts_with_all = ["matrix_a", "matrix_b"])]
    filter: Option<String>,
    /// Matrix CSV for A (requires --matrix-b)
    #[arg(long, requires = "matrix_b")]
    matrix_a: Option<PathBuf>,
    #[arg(long, requires = "matrix_a")]
    matrix_b: Option<PathBuf>,
    /// Longest product length enumerated
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long, value_enum, default_value = "spectral")]
    norm: NormArg,
}

#[derive(Debug, Args)]
struct CompressArgs {
    /// Signal CSV or PGM image
    #[arg(long = "in")]
    input: PathBuf,
    /// fourier, blocked-fourier, <filter>[:levels] or packet:<filter>:<tree>
    #[arg(long, default_value = "haar")]
    basis: String,
    /// Fraction of coefficients kept
    #[arg(long, default_value_t = 0.05)]
    keep: f64,
    /// Reconstruction (PGM for .pgm paths with image input)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report CSV [default: standard output]
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ContestArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated bases; blocked-fourier is always added
    #[arg(long, default_value = "fourier,haar,d4", value_delimiter = ',')]
    bases: Vec<String>,
    /// Comma-separated kept fractions
    #[arg(long, default_value = "0.05", value_delimiter = ',')]
    keep: Vec<f64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, printing to the
/// process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("usage error");
            let _ = writeln!(err, "dyadic: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "dyadic: {}", e.to_string().replace('\n', " "));
            1
        }
    }
}

fn emit(path: Option<&Path>, contents: &[u8], out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => io::write_atomic(p, contents),
        None => Ok(out.write_all(contents)?),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn is_pgm(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

fn read_image(path: &Path) -> Result<nalgebra::DMatrix<f64>> {
    if is_pgm(path) {
        let bytes = fs::read(path).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        })?;
        io::parse_pgm(&bytes)
    } else {
        io::parse_matrix(&read_text(path)?)
    }
}

fn read_data(path: &Path) -> Result<Data> {
    if is_pgm(path) {
        Ok(Data::Image(read_image(path)?))
    } else {
        Ok(Data::Signal(io::parse_signal(&read_text(path)?)?))
    }
}

fn format_image(m: &nalgebra::DMatrix<f64>, path: Option<&Path>) -> Vec<u8> {
    match path {
        Some(p) if is_pgm(p) => io::format_pgm(m),
        _ => io::format_matrix(m).into_bytes(),
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Fwt(a) => fwt_command(a, out),
        Command::Fft(a) => fft_command(a, out, err),
        Command::CheckFilter(a) => {
            let filter = io::load_filter(&a.filter)?;
            writeln!(out, "filter={}", filter.name().unwrap_or("custom"))?;
            write!(out, "{}", filter.condition_report(a.tol))?;
            Ok(())
        }
        Command::Cascade(a) => {
            let filter = io::load_filter(&a.filter)?;
            let samples = dilation::refine(&filter, a.depth)?;
            if samples.degenerate {
                log::warn!("eigenvalue 1 is not simple; the samples are one of several solutions");
            }
            emit(a.out.as_deref(), io::format_samples(&samples, "phi").as_bytes(), out)
        }
        Command::Wavelet(a) => {
            let filter = io::load_filter(&a.filter)?;
            let samples = dilation::wavelet_samples(&filter, a.depth)?;
            emit(a.out.as_deref(), io::format_samples(&samples, "w").as_bytes(), out)
        }
        Command::Jsr(a) => jsr_command(a, out),
        Command::Compress(a) => compress_command(a, out),
        Command::Contest(a) => {
            let data = read_data(&a.input)?;
            let bases = a
                .bases
                .iter()
                .map(|b| Basis::parse(b))
                .collect::<Result<Vec<_>>>()?;
            let rows = compress::contest_report(&data, &bases, &a.keep)?;
            emit(a.report.as_deref(), io::format_report(&rows).as_bytes(), out)
        }
    }
}

fn fwt_command(a: FwtArgs, out: &mut dyn Write) -> Result<()> {
    let filter = io::load_filter(&a.filter)?;
    let normalization = Normalization::from(a.normalization);
    if a.image || is_pgm(&a.input) {
        let m = read_image(&a.input)?;
        let levels = a.levels.unwrap_or_else(|| {
            log2_exact(m.nrows().min(m.ncols())).unwrap_or(0).saturating_sub(2).max(1)
        });
        let result = if a.inverse {
            fwt::synthesize_2d(
                &Pyramid2d {
                    layout: m,
                    levels,
                    normalization,
                },
                &filter,
            )?
        } else {
            fwt::analyze_2d(&m, &filter, levels, normalization)?.layout
        };
        return emit(a.out.as_deref(), &format_image(&result, a.out.as_deref()), out);
    }
    let text = read_text(&a.input)?;
    if a.inverse {
        let n = io::parse_signal(&text)?.len();
        let fallback = a.levels.or_else(|| log2_exact(n)).unwrap_or(0);
        let p = io::parse_pyramid(&text, fallback, normalization)?;
        let signal = fwt::synthesize(&p, &filter)?;
        emit(a.out.as_deref(), io::format_signal(&signal).as_bytes(), out)
    } else {
        let signal = io::parse_signal(&text)?;
        let levels = match a.levels {
            Some(l) => l,
            None => log2_exact(signal.len()).ok_or(Error::InvalidLength {
                len: signal.len(),
                reason: "signal length must be a power of two",
            })?,
        };
        let p = fwt::analyze(&signal, &filter, levels, normalization)?;
        emit(a.out.as_deref(), io::format_pyramid(&p).as_bytes(), out)
    }
}

fn fft_command(a: FftArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let values = io::parse_complex(&read_text(&a.input)?)?;
    let plan = fft::Fft::new(values.len())?;
    let result = if a.inverse {
        plan.inverse(&values)?
    } else {
        let (spec, count) = plan.forward(&values)?;
        if a.count {
            writeln!(err, "multiplications={}", count.multiplications)?;
        }
        spec.values
    };
    emit(a.out.as_deref(), io::format_complex(&result).as_bytes(), out)
}

fn jsr_command(a: JsrArgs, out: &mut dyn Write) -> Result<()> {
    let norm = MatrixNorm::from(a.norm);
    match (&a.filter, &a.matrix_a, &a.matrix_b) {
        (Some(name), _, _) => {
            let filter = io::load_filter(name)?;
            if filter.degree() < 2 {
                return Err(Error::NotApplicable(
                    "a two-tap filter leaves no complementary subspace to measure".into(),
                ));
            }
            let pair = jsr::reduced_pair(&filter)?;
            let est = jsr::jsr_bounds(&pair.a, &pair.b, a.depth, norm)?;
            write_estimate(&est, out)?;
            writeln!(out, "alpha_lower={:.6}", -est.upper.log2())?;
            writeln!(out, "alpha_upper={:.6}", -est.lower.log2())?;
            writeln!(out, "continuous={}", est.upper < 1.0)?;
            Ok(())
        }
        (None, Some(pa), Some(pb)) => {
            let ma = io::parse_matrix(&read_text(pa)?)?;
            let mb = io::parse_matrix(&read_text(pb)?)?;
            let est = jsr::jsr_bounds(&ma, &mb, a.depth, norm)?;
            write_estimate(&est, out)
        }
        _ => Err(Error::InvalidInput(
            "give either --filter or both --matrix-a and --matrix-b".into(),
        )),
    }
}

fn write_estimate(est: &jsr::JsrEstimate, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "depth={}", est.depth)?;
    writeln!(out, "lower={:.12}", est.lower)?;
    writeln!(out, "upper={:.12}", est.upper)?;
    writeln!(out, "gap={:.3e}", est.gap())?;
    writeln!(out, "word={}", est.word_string())?;
    Ok(())
}

fn compress_command(a: CompressArgs, out: &mut dyn Write) -> Result<()> {
    let data = read_data(&a.input)?;
    let basis = Basis::parse(&a.basis)?;
    let (result, recon) = compress::compress_in_basis(&data, &basis, a.keep)?;
    if let Some(path) = a.out.as_deref() {
        let bytes = match &recon {
            Data::Signal(s) => io::format_signal(s).into_bytes(),
            Data::Image(m) => format_image(m, Some(path)),
        };
        io::write_atomic(path, &bytes)?;
    }
    emit(a.report.as_deref(), io::format_report(&[result]).as_bytes(), out)
}
