//! Command-line laboratory for digit statistics of the von Mangoldt function.
//! Every subcommand drives one library operation and emits JSON-lines or CSV
//! records; `decay` and `plotdata` post-process the JSON-lines output of the
//! other subcommands.

mod output;

use std::fmt;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use digitprime_core::arith::{sieve_table, stream_windows, ArithKind};
use digitprime_core::digitclass::{digit_class_sums, symmetrized_value, tail_mass};
use digitprime_core::expsum::{
    bilinear_sum, exp_sum, lambda_grid, rational_scan, type_two_preset, u_fourier_max,
    BilinearMode, BilinearSumConfig, TypeTwoPreset,
};
use digitprime_core::fitlab::{
    fit_decay, spectral_mask_family, theorem1_scan, theorem2_scan, FitModel,
};
use digitprime_core::kahan::KahanSum;
use digitprime_core::walsh::{
    fwht, level_weights, majority_spectrum_profile, walsh_coefficients_streaming,
};
use digitprime_core::{Error as CoreError, Exec};

use output::{emit_records, emit_table, writer, RunOutput};

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Io(std::io::Error),
    Json(serde_json::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "{e}"),
            CliError::Usage(s) => write!(f, "{s}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::BudgetExceeded { .. }) => 3,
            CliError::Core(CoreError::InvalidArgument(_))
            | CliError::Core(CoreError::ThreadsUnavailable)
            | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum KindArg {
    VonMangoldt,
    Moebius,
}

impl From<KindArg> for ArithKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::VonMangoldt => ArithKind::VonMangoldt,
            KindArg::Moebius => ArithKind::Moebius,
        }
    }
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FunctionArg {
    Lambda,
    Majority,
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PresetArg {
    TypeI,
    Ones,
    MuOnes,
    MuLambda,
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModelArg {
    PowerLaw,
    ExpLaw,
}

impl From<ModelArg> for FitModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::PowerLaw => FitModel::PowerLaw,
            ModelArg::ExpLaw => FitModel::ExpLaw,
        }
    }
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let t = s.trim();
    match t {
        "pi" => Ok(std::f64::consts::PI),
        "-pi" => Ok(-std::f64::consts::PI),
        _ => t.parse().map_err(|e| format!("bad frequency {t:?}: {e}")),
    }
}

fn parse_mask(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let parsed = if let Some(hex) = t.strip_prefix("0x") {
        u64::from_str_radix(hex, 16)
    } else if let Some(bits) = t.strip_prefix("0b") {
        u64::from_str_radix(bits, 2)
    } else {
        t.parse()
    };
    parsed.map_err(|e| format!("bad digit mask {t:?}: {e}"))
}

#[derive(Parser, Serialize)]
#[command(
    name = "digitprime",
    version,
    about = "Digit-spectral statistics of the von Mangoldt function"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output shape: JSON-lines records or bare CSV.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Memory budget in bytes for tables and sieve scratch.
    #[arg(long, global = true, env = "DIGITPRIME_MAX_MEM", default_value_t = 4 * 1024 * 1024 * 1024)]
    max_mem: u64,

    /// Worker threads for the sieve streams.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Sieve window length; must be a power of two.
    #[arg(long, global = true, default_value_t = 65536)]
    segment: u64,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Stream a sieved table over [1, 2^n) and report aggregate statistics.
    SieveStats(SieveStatsArgs),
    /// Walsh coefficients of the von Mangoldt table at chosen digit sets.
    Spectrum(SpectrumArgs),
    /// Squared-coefficient mass per level of the spectrum.
    Levels(LevelsArgs),
    /// Von Mangoldt mass per binary digit-sum class.
    Classes(ClassesArgs),
    /// Class mass beyond a multiple of sqrt(n) from the central digit sum.
    Tails(TailsArgs),
    /// Exponential sums over digit classes at real frequencies.
    Expsum(ExpsumArgs),
    /// Largest Fourier coefficient magnitude of the digit-weight measure.
    Ufourier(UfourierArgs),
    /// Bilinear sums over dyadic ranges, unweighted or with preset weights.
    #[command(name = "type1")]
    #[serde(rename = "type1")]
    Type1(Type1Args),
    /// Best rational approximation to r/2^m with bounded denominator.
    Rational(RationalArgs),
    /// Majority correlation scan over a list of sizes.
    Theorem1(Theorem1Args),
    /// Digit-sum bias of primes with prescribed low digits.
    Theorem2(Theorem2Args),
    /// Fit a decay law to two columns of a previous run's JSON output.
    Decay(DecayArgs),
    /// Extract numeric columns from JSON output as a whitespace table.
    Plotdata(PlotdataArgs),
}

#[derive(Args, Serialize)]
struct SieveStatsArgs {
    /// Digit count; the table covers [1, 2^n).
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value = "von-mangoldt")]
    kind: KindArg,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[arg(long)]
    n: u32,
    /// Explicit digit-set masks (decimal, 0x…, or 0b…), comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_mask)]
    masks: Option<Vec<u64>>,
    /// Scan the stock mask family up to this level instead.
    #[arg(long)]
    level_max: Option<u32>,
}

#[derive(Args, Serialize)]
struct LevelsArgs {
    #[arg(long)]
    n: u32,
    /// Which function to analyze: the sieved table or the majority function.
    #[arg(long, value_enum, default_value = "lambda")]
    function: FunctionArg,
}

#[derive(Args, Serialize)]
struct ClassesArgs {
    #[arg(long)]
    n: u32,
}

#[derive(Args, Serialize)]
struct TailsArgs {
    #[arg(long)]
    n: u32,
    /// Cut widths, in units of sqrt(n).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.5, 2.0, 2.5])]
    deltas: Vec<f64>,
}

#[derive(Args, Serialize)]
struct ExpsumArgs {
    #[arg(long)]
    n: u32,
    /// Frequencies in [-pi, pi], comma separated; "pi" is accepted. Defaults
    /// to the exact inversion grid of n + 1 points.
    #[arg(long, value_delimiter = ',', value_parser = parse_lambda)]
    lambda: Option<Vec<f64>>,
}

#[derive(Args, Serialize)]
struct UfourierArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_delimiter = ',', value_parser = parse_lambda, default_values_t = [0.2, 0.5, 1.0, 2.0, std::f64::consts::PI])]
    lambda: Vec<f64>,
    /// Frequency budget; 2^n or more scans exhaustively.
    #[arg(long, default_value_t = 1_048_576)]
    samples: u64,
    /// Scan every frequency regardless of --samples.
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args, Serialize)]
struct Type1Args {
    #[arg(long)]
    n: u32,
    /// Log-length of the short range; the long range gets n - m1 digits.
    #[arg(long)]
    m1: u32,
    #[arg(long, value_delimiter = ',', value_parser = parse_lambda, default_values_t = [0.2, 0.5, 1.0, 2.0, std::f64::consts::PI])]
    lambda: Vec<f64>,
    #[arg(long, value_enum, default_value = "type-i")]
    preset: PresetArg,
}

#[derive(Args, Serialize)]
struct RationalArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    r: u64,
    #[arg(long, default_value_t = 64)]
    q_max: u64,
}

#[derive(Args, Serialize)]
struct Theorem1Args {
    /// Odd sizes to scan, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u32>,
}

#[derive(Args, Serialize)]
struct Theorem2Args {
    #[arg(long)]
    n: u32,
    /// How many low digits are prescribed.
    #[arg(long)]
    r: u32,
}

#[derive(Args, Serialize)]
struct DecayArgs {
    /// JSON-lines file from a previous run; "-" or absent reads stdin.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    x_col: String,
    #[arg(long)]
    y_col: String,
    #[arg(long, value_enum, default_value = "power-law")]
    model: ModelArg,
}

#[derive(Args, Serialize)]
struct PlotdataArgs {
    /// JSON-lines file from a previous run; "-" or absent reads stdin.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required = true)]
    cols: Vec<String>,
}

#[derive(Serialize)]
struct SieveStatsRecord {
    n: u32,
    kind: KindArg,
    sum: f64,
    nonzero: u64,
    mean: f64,
}

#[derive(Serialize)]
struct SpectrumRecord {
    n: u32,
    mask: u64,
    level: u32,
    coeff: f64,
    abs_coeff: f64,
}

#[derive(Serialize)]
struct LevelRecord {
    n: u32,
    k: u32,
    w: f64,
    /// `w * k^1.5`, the natural scale for majority-type spectra.
    w_scaled: f64,
}

#[derive(Serialize)]
struct MajorityLevelRecord {
    n: u32,
    k: u32,
    w: f64,
    w_scaled: f64,
    tail: f64,
}

#[derive(Serialize)]
struct ClassRecord {
    k: u32,
    s_k: f64,
    symmetrized: f64,
}

#[derive(Serialize)]
struct TailRecord {
    n: u32,
    delta: f64,
    delta_sq: f64,
    mass: f64,
    normalized: f64,
    log_normalized: Option<f64>,
}

#[derive(Serialize)]
struct ExpSumRecord {
    n: u32,
    lambda: f64,
    re: f64,
    im: f64,
    magnitude: f64,
}

#[derive(Serialize)]
struct UfourierRecord {
    n: u32,
    lambda: f64,
    lambda_sq: f64,
    max: f64,
    log_max: Option<f64>,
    argmax: u64,
    exhaustive: bool,
}

#[derive(Serialize)]
struct Type1Record {
    n: u32,
    m1: u32,
    preset: PresetArg,
    lambda: f64,
    raw: f64,
    normalized: f64,
}

fn to_values<T: Serialize>(items: impl IntoIterator<Item = T>) -> Result<Vec<Value>, CliError> {
    items
        .into_iter()
        .map(|item| serde_json::to_value(item).map_err(CliError::from))
        .collect()
}

fn read_input(path: &Option<PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(std::fs::read_to_string(p)?),
        _ => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            Ok(text)
        }
    }
}

fn data_rows(text: &str) -> Vec<Map<String, Value>> {
    text.lines()
        .filter_map(|line| {
            let line = line.trim();
            if line.is_empty() {
                return None;
            }
            serde_json::from_str::<Value>(line).ok()?.as_object().cloned()
        })
        .filter(|map| map.get("record").and_then(Value::as_str) == Some("data"))
        .collect()
}

fn dispatch(cli: &Cli, exec: &Exec) -> Result<RunOutput, CliError> {
    let config = serde_json::to_value(cli)?;
    let (command, data, extras) = match &cli.command {
        Command::SieveStats(args) => {
            let kind = ArithKind::from(args.kind);
            let mut sum = KahanSum::new();
            let mut nonzero = 0u64;
            stream_windows(args.n, kind, exec, |w| {
                for &v in &w.values {
                    if v != 0.0 {
                        sum.add(v);
                        nonzero += 1;
                    }
                }
            })?;
            let record = SieveStatsRecord {
                n: args.n,
                kind: args.kind,
                sum: sum.value(),
                nonzero,
                mean: sum.value() / (1u64 << args.n) as f64,
            };
            ("sieve-stats", to_values([record])?, Vec::new())
        }
        Command::Spectrum(args) => {
            let masks = match (&args.masks, args.level_max) {
                (Some(masks), None) => masks.clone(),
                (None, Some(level_max)) => spectral_mask_family(args.n, level_max)?,
                _ => {
                    return Err(CliError::Usage(
                        "give exactly one of --masks or --level-max".into(),
                    ))
                }
            };
            let coeffs =
                walsh_coefficients_streaming(args.n, ArithKind::VonMangoldt, &masks, exec)?;
            let records = masks.iter().zip(&coeffs).map(|(&mask, &coeff)| SpectrumRecord {
                n: args.n,
                mask,
                level: mask.count_ones(),
                coeff,
                abs_coeff: coeff.abs(),
            });
            ("spectrum", to_values(records)?, Vec::new())
        }
        Command::Levels(args) => {
            let data = match args.function {
                FunctionArg::Lambda => {
                    let table = sieve_table(args.n, ArithKind::VonMangoldt, exec)?;
                    let weights = level_weights(&fwht(table.values().to_vec())?);
                    to_values((0..=args.n).map(|k| {
                        let w = weights.w[k as usize];
                        LevelRecord { n: args.n, k, w, w_scaled: w * f64::from(k).powf(1.5) }
                    }))?
                }
                FunctionArg::Majority => {
                    let profile = majority_spectrum_profile(args.n, args.n)?;
                    to_values((0..=args.n).map(|k| {
                        let w = profile.w[k as usize];
                        MajorityLevelRecord {
                            n: args.n,
                            k,
                            w,
                            w_scaled: w * f64::from(k).powf(1.5),
                            tail: profile.tails[k as usize],
                        }
                    }))?
                }
            };
            ("levels", data, Vec::new())
        }
        Command::Classes(args) => {
            let sums = digit_class_sums(args.n, exec)?;
            let mut records = Vec::new();
            for k in 0..=args.n {
                records.push(ClassRecord {
                    k,
                    s_k: sums.s_k(k),
                    symmetrized: symmetrized_value(&sums, k)?,
                });
            }
            ("classes", to_values(records)?, Vec::new())
        }
        Command::Tails(args) => {
            let sums = digit_class_sums(args.n, exec)?;
            let mut records = Vec::new();
            for &delta in &args.deltas {
                let report = tail_mass(&sums, delta)?;
                records.push(TailRecord {
                    n: args.n,
                    delta,
                    delta_sq: delta * delta,
                    mass: report.mass,
                    normalized: report.normalized,
                    log_normalized: (report.normalized > 0.0)
                        .then(|| report.normalized.ln()),
                });
            }
            ("tails", to_values(records)?, Vec::new())
        }
        Command::Expsum(args) => {
            let sums = digit_class_sums(args.n, exec)?;
            let grid = match &args.lambda {
                Some(list) => list.clone(),
                None => lambda_grid(args.n),
            };
            let mut records = Vec::new();
            for &lambda in &grid {
                let z = exp_sum(&sums, lambda)?;
                records.push(ExpSumRecord {
                    n: args.n,
                    lambda,
                    re: z.re,
                    im: z.im,
                    magnitude: z.norm(),
                });
            }
            ("expsum", to_values(records)?, Vec::new())
        }
        Command::Ufourier(args) => {
            let samples = if args.exhaustive {
                1u64.checked_shl(args.n).unwrap_or(u64::MAX)
            } else {
                args.samples
            };
            let mut records = Vec::new();
            for &lambda in &args.lambda {
                let found = u_fourier_max(args.n, lambda, samples, exec)?;
                records.push(UfourierRecord {
                    n: args.n,
                    lambda,
                    lambda_sq: lambda * lambda,
                    max: found.max,
                    log_max: (found.max > 0.0).then(|| found.max.ln()),
                    argmax: found.argmax,
                    exhaustive: found.exhaustive,
                });
            }
            ("ufourier", to_values(records)?, Vec::new())
        }
        Command::Type1(args) => {
            let config = match args.preset {
                PresetArg::TypeI => {
                    BilinearSumConfig { n: args.n, m1: args.m1, mode: BilinearMode::TypeI }
                }
                PresetArg::Ones => type_two_preset(args.n, args.m1, TypeTwoPreset::Ones)?,
                PresetArg::MuOnes => {
                    type_two_preset(args.n, args.m1, TypeTwoPreset::MuOnes)?
                }
                PresetArg::MuLambda => {
                    type_two_preset(args.n, args.m1, TypeTwoPreset::MuLambda)?
                }
            };
            let mut records = Vec::new();
            for &lambda in &args.lambda {
                let value = bilinear_sum(&config, lambda)?;
                records.push(Type1Record {
                    n: args.n,
                    m1: args.m1,
                    preset: args.preset,
                    lambda,
                    raw: value.raw,
                    normalized: value.normalized,
                });
            }
            ("type1", to_values(records)?, Vec::new())
        }
        Command::Rational(args) => {
            let approx = rational_scan(args.m, args.r, args.q_max)?;
            ("rational", to_values([approx])?, Vec::new())
        }
        Command::Theorem1(args) => {
            let scan = theorem1_scan(&args.n, exec)?;
            let data = to_values(&scan.records)?;
            let mut extras = Vec::new();
            if let Some(fit) = &scan.fit {
                let mut value = serde_json::to_value(fit)?;
                if let Some(map) = value.as_object_mut() {
                    map.insert("record".into(), Value::String("fit".into()));
                }
                extras.push(value);
            }
            ("theorem1", data, extras)
        }
        Command::Theorem2(args) => {
            let record = theorem2_scan(args.n, args.r, exec)?;
            ("theorem2", to_values([record])?, Vec::new())
        }
        Command::Decay(args) => {
            let model = FitModel::from(args.model);
            let rows = data_rows(&read_input(&args.input)?);
            // Rows a log-domain fit cannot use are dropped here; the points
            // actually fitted are echoed in the output record.
            let mut points = Vec::new();
            for row in &rows {
                let x = row.get(&args.x_col).and_then(Value::as_f64);
                let y = row.get(&args.y_col).and_then(Value::as_f64);
                if let (Some(x), Some(y)) = (x, y) {
                    if y > 0.0 && (model == FitModel::ExpLaw || x > 0.0) {
                        points.push((x, y));
                    }
                }
            }
            let fit = fit_decay(&points, model)?;
            ("decay", to_values([fit])?, Vec::new())
        }
        Command::Plotdata(_) => unreachable!("handled before dispatch"),
    };
    Ok(RunOutput { command, config, data, extras })
}

fn plotdata(args: &PlotdataArgs) -> Result<(Vec<String>, Vec<Vec<Value>>), CliError> {
    let rows = data_rows(&read_input(&args.input)?);
    // No records at all still yields the header line; a column absent from
    // every record that exists is a caller mistake.
    if !rows.is_empty() {
        for col in &args.cols {
            if !rows.iter().any(|row| row.contains_key(col)) {
                return Err(CliError::Usage(format!(
                    "column {col:?} not found in any data record"
                )));
            }
        }
    }
    let mut table = Vec::new();
    for row in &rows {
        let cells: Vec<Value> = args
            .cols
            .iter()
            .filter_map(|col| row.get(col).filter(|v| !v.is_null()).cloned())
            .collect();
        if cells.len() == args.cols.len() {
            table.push(cells);
        }
    }
    Ok((args.cols.clone(), table))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let exec = Exec {
        budget_bytes: cli.max_mem,
        segment: cli.segment,
        threads: cli.threads,
    };
    let started = Instant::now();
    match &cli.command {
        Command::Plotdata(args) => {
            let (columns, rows) = plotdata(args)?;
            emit_table(writer(&cli.out)?, &columns, &rows)
        }
        _ => {
            let run_output = dispatch(&cli, &exec)?;
            let walltime_ms = started.elapsed().as_millis() as u64;
            emit_records(writer(&cli.out)?, cli.format, run_output, walltime_ms)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
