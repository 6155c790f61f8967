use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use srt_core::analytic::MIN_INNER_TRIALS;
use srt_core::special::SUBSET_ENUMERATION_CAP;
use srt_core::sweep::{db_grid, default_gamma_grid, DEFAULT_INNER_TRIALS, DEFAULT_TRIALS};
use srt_core::{MethodSelection, Scheme, SrtError, SweepSpec, SystemParams};

use crate::CliError;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SRT_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "srt-lab",
    version,
    about = "Intercept vs. outage probability of direct, single-relay and multi-relay decode-and-forward transmission"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Subcommand, Debug)]
enum CommandArgs {
    /// Evaluate every scheme at one operating point (default 10 dB).
    Point(CommonArgs),
    /// Sweep the transmit SNR (default 0:30:2 dB).
    Sweep(CommonArgs),
    /// Trace intercept-vs-outage loci over the SNR grid for several relay counts.
    SrtCurve {
        #[command(flatten)]
        common: CommonArgs,
        /// Relay counts, comma separated.
        #[arg(long, value_name = "N[,N...]", value_delimiter = ',', default_value = "4,8")]
        n_values: Vec<usize>,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Transmit SNR P/N0 in dB: a value, a comma list, or START:STOP:STEP.
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    gamma_db: Option<String>,
    /// Data rate R in bit/s/Hz.
    #[arg(long, value_name = "BIT/S/HZ", allow_negative_numbers = true, default_value_t = 1.0)]
    rate: f64,
    /// Number of relays N.
    #[arg(long, value_name = "N", default_value_t = 6)]
    relays: usize,
    /// Mean source-destination power gain (linear).
    #[arg(long, value_name = "LINEAR", allow_negative_numbers = true, default_value_t = 1.0)]
    gain_sd: f64,
    /// Mean source-eavesdropper power gain (linear).
    #[arg(long, value_name = "LINEAR", allow_negative_numbers = true, default_value_t = 0.1)]
    gain_se: f64,
    /// Mean source-relay power gain (linear): one value, or one per relay.
    #[arg(
        long,
        value_name = "LINEAR[,..]",
        allow_negative_numbers = true,
        value_delimiter = ',',
        default_value = "1"
    )]
    gain_si: Vec<f64>,
    /// Mean relay-destination power gain (linear): one value, or one per relay.
    #[arg(
        long,
        value_name = "LINEAR[,..]",
        allow_negative_numbers = true,
        value_delimiter = ',',
        default_value = "1"
    )]
    gain_id: Vec<f64>,
    /// Mean relay-eavesdropper power gain (linear): one value, or one per relay.
    #[arg(
        long,
        value_name = "LINEAR[,..]",
        allow_negative_numbers = true,
        value_delimiter = ',',
        default_value = "0.1"
    )]
    gain_ie: Vec<f64>,
    /// Schemes to evaluate, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "direct,single,multi")]
    schemes: Vec<SchemeArg>,
    /// Closed forms, protocol Monte Carlo, or both.
    #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
    method: MethodArg,
    /// Monte Carlo trials per row (count).
    #[arg(long, value_name = "COUNT", default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    /// Inner draws per decoding set for the semi-analytic multi-relay intercept (count).
    #[arg(long, value_name = "COUNT", default_value_t = DEFAULT_INNER_TRIALS)]
    inner_trials: u64,
    /// Random seed; identical arguments and seed give identical output.
    #[arg(long, value_name = "U64", default_value_t = 1)]
    seed: u64,
    /// CSV output file; standard output when omitted.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Also write a gnuplot script plotting the CSV (requires --output).
    #[arg(long, value_name = "PATH")]
    plot_script: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Direct,
    Single,
    Multi,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Direct => Scheme::Direct,
            SchemeArg::Single => Scheme::SingleRelay,
            SchemeArg::Multi => Scheme::MultiRelay,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Analytic,
    MonteCarlo,
    Both,
}

impl From<MethodArg> for MethodSelection {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Analytic => MethodSelection::Analytic,
            MethodArg::MonteCarlo => MethodSelection::MonteCarlo,
            MethodArg::Both => MethodSelection::Both,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Point,
    Sweep,
    SrtCurve { n_values: Vec<usize> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Point => "point",
            Command::Sweep => "sweep",
            Command::SrtCurve { .. } => "srt-curve",
        }
    }
}

/// A validated invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub spec: SweepSpec,
    pub output: Option<PathBuf>,
    pub plot_script: Option<PathBuf>,
}

/// Parses `argv` (program name first) and checks every value against the
/// library invariants, naming the offending flag on failure.
pub fn parse_and_validate<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (command, common) = match cli.command {
        CommandArgs::Point(c) => (Command::Point, c),
        CommandArgs::Sweep(c) => (Command::Sweep, c),
        CommandArgs::SrtCurve { common, n_values } => (Command::SrtCurve { n_values }, common),
    };

    let grid = match &common.gamma_db {
        Some(text) => parse_gamma_grid(text)?,
        None if command == Command::Point => vec![10.0],
        None => default_gamma_grid(),
    };
    if command == Command::Point && grid.len() != 1 {
        return Err(invalid("--gamma-db", "point takes a single SNR value"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("--gamma-db", "grid must be strictly ascending"));
    }

    let n = common.relays;
    let per_relay = |flag: &'static str, values: &[f64]| -> Result<Vec<f64>, CliError> {
        match values {
            [g] => Ok(vec![*g; n]),
            v if v.len() == n => Ok(v.to_vec()),
            v => Err(invalid(flag, format!("expected 1 or {n} values, got {}", v.len()))),
        }
    };
    let base_params = SystemParams::new(
        srt_core::sweep::db_to_linear(grid[0]),
        common.rate,
        common.gain_sd,
        common.gain_se,
        per_relay("--gain-si", &common.gain_si)?,
        per_relay("--gain-id", &common.gain_id)?,
        per_relay("--gain-ie", &common.gain_ie)?,
    )
    .map_err(param_error)?;

    let mut schemes: Vec<Scheme> = Vec::new();
    for s in common.schemes.iter().map(|&s| Scheme::from(s)) {
        if !schemes.contains(&s) {
            schemes.push(s);
        }
    }
    let methods = MethodSelection::from(common.method);
    let analytic = methods != MethodSelection::MonteCarlo;
    let relay_schemes = schemes.iter().any(Scheme::uses_relays);

    match &command {
        Command::SrtCurve { n_values } => {
            if n_values.is_empty() {
                return Err(invalid("--n-values", "at least one relay count is required"));
            }
            for &v in n_values {
                if v == 0 || v > SUBSET_ENUMERATION_CAP {
                    return Err(invalid(
                        "--n-values",
                        format!("relay count {v} must be between 1 and {SUBSET_ENUMERATION_CAP}"),
                    ));
                }
            }
            base_params
                .with_relay_count(n_values[0])
                .map_err(|e| invalid("--n-values", e.to_string()))?;
        }
        _ if relay_schemes && n == 0 => {
            return Err(invalid("--relays", "relay schemes need at least one relay"));
        }
        _ if relay_schemes && analytic && n > SUBSET_ENUMERATION_CAP => {
            return Err(invalid(
                "--relays",
                format!(
                    "closed forms enumerate 2^{n} decoding sets; at most {SUBSET_ENUMERATION_CAP} relays \
                     (use --method monte-carlo for more)"
                ),
            ));
        }
        _ => {}
    }
    if methods.includes_monte_carlo() && common.trials == 0 {
        return Err(invalid("--trials", "must be at least 1"));
    }
    if analytic && schemes.contains(&Scheme::MultiRelay) && common.inner_trials < MIN_INNER_TRIALS {
        return Err(invalid(
            "--inner-trials",
            format!("must be at least {MIN_INNER_TRIALS}"),
        ));
    }
    if common.plot_script.is_some() && common.output.is_none() {
        return Err(invalid(
            "--plot-script",
            "needs --output so the script can reference the CSV",
        ));
    }

    let spec = SweepSpec {
        schemes,
        gamma_db_grid: grid,
        base_params,
        methods,
        trials: common.trials,
        inner_trials: common.inner_trials,
        seed: common.seed,
    };
    spec.validate().map_err(|e| invalid("--gamma-db", e.to_string()))?;
    Ok(RunConfig {
        command,
        spec,
        output: common.output,
        plot_script: common.plot_script,
    })
}

/// `10`, `0,5,10` or `0:30:2`.
pub fn parse_gamma_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let number = |s: &str| -> Result<f64, CliError> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| invalid("--gamma-db", format!("`{s}` is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(invalid("--gamma-db", format!("`{s}` is not finite")))
        }
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(number).collect(),
        [start, stop, step] => {
            db_grid(number(start)?, number(stop)?, number(step)?).map_err(|e| invalid("--gamma-db", e.to_string()))
        }
        _ => Err(invalid("--gamma-db", "expected DB, DB,DB,... or START:STOP:STEP")),
    }
}

/// Reads the worker-thread cap from `SRT_LAB_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(invalid(THREADS_ENV, e.to_string())),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(invalid(THREADS_ENV, format!("`{v}` is not a positive integer"))),
        },
    }
}

fn invalid(flag: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Invalid {
        flag,
        reason: reason.into(),
    }
}

fn param_error(e: SrtError) -> CliError {
    match e {
        SrtError::InvalidParam { field, reason } => {
            let flag = match field {
                "gamma" => "--gamma-db",
                "rate" => "--rate",
                "gain_sd" => "--gain-sd",
                "gain_se" => "--gain-se",
                "gains_si" => "--gain-si",
                "gains_id" => "--gain-id",
                "gains_ie" => "--gain-ie",
                "n_relays" => "--relays",
                other => other,
            };
            invalid(flag, reason)
        }
        other => CliError::Core(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        parse_and_validate(std::iter::once("srt-lab").chain(args.iter().copied()))
    }

    fn flag_of(err: CliError) -> &'static str {
        match err {
            CliError::Invalid { flag, .. } => flag,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn defaults_are_reference_configuration() {
        let cfg = parse(&["point"]).unwrap();
        assert_eq!(cfg.command, Command::Point);
        assert_eq!(cfg.spec.gamma_db_grid, vec![10.0]);
        assert_eq!(cfg.spec.base_params, SystemParams::reference());
        assert_eq!(cfg.spec.schemes, Scheme::ALL.to_vec());
        assert_eq!(cfg.spec.seed, 1);
        assert_eq!(cfg.spec.methods, MethodSelection::Analytic);
        assert_eq!(cfg.output, None);
        let sweep = parse(&["sweep"]).unwrap();
        assert_eq!(sweep.spec.gamma_db_grid.len(), 16);
        let curve = parse(&["srt-curve"]).unwrap();
        assert_eq!(curve.command, Command::SrtCurve { n_values: vec![4, 8] });
    }

    #[test]
    fn gamma_grid_forms() {
        assert_eq!(
            parse(&["sweep", "--gamma-db", "0:30:2"])
                .unwrap()
                .spec
                .gamma_db_grid
                .len(),
            16
        );
        assert_eq!(parse_gamma_grid("0,5,12.5").unwrap(), vec![0.0, 5.0, 12.5]);
        assert_eq!(parse_gamma_grid("-3").unwrap(), vec![-3.0]);
        assert!(parse_gamma_grid("1:2").is_err());
        assert!(parse_gamma_grid("x").is_err());
        assert!(parse_gamma_grid("inf").is_err());
        assert_eq!(
            flag_of(parse(&["sweep", "--gamma-db", "5,1"]).unwrap_err()),
            "--gamma-db"
        );
        assert_eq!(
            flag_of(parse(&["point", "--gamma-db", "1,5"]).unwrap_err()),
            "--gamma-db"
        );
    }

    #[test]
    fn invalid_values_name_their_flag() {
        assert_eq!(flag_of(parse(&["point", "--rate", "0"]).unwrap_err()), "--rate");
        assert_eq!(flag_of(parse(&["point", "--gain-sd", "-1"]).unwrap_err()), "--gain-sd");
        assert_eq!(
            flag_of(parse(&["point", "--gain-ie", "0.1,0.2"]).unwrap_err()),
            "--gain-ie"
        );
        assert_eq!(flag_of(parse(&["point", "--relays", "21"]).unwrap_err()), "--relays");
        assert_eq!(flag_of(parse(&["point", "--relays", "0"]).unwrap_err()), "--relays");
        assert_eq!(
            flag_of(parse(&["point", "--inner-trials", "10"]).unwrap_err()),
            "--inner-trials"
        );
        assert_eq!(
            flag_of(parse(&["srt-curve", "--n-values", "4,21"]).unwrap_err()),
            "--n-values"
        );
        assert_eq!(
            flag_of(parse(&["point", "--plot-script", "x.gp"]).unwrap_err()),
            "--plot-script"
        );
        assert_eq!(
            flag_of(parse(&["point", "--method", "monte-carlo", "--trials", "0"]).unwrap_err()),
            "--trials"
        );
    }

    #[test]
    fn monte_carlo_allows_large_relay_counts() {
        assert!(parse(&["point", "--relays", "30", "--method", "monte-carlo"]).is_ok());
        assert!(parse(&["point", "--relays", "0", "--schemes", "direct"]).is_ok());
    }

    #[test]
    fn clap_rejects_unknown_and_malformed() {
        assert!(matches!(parse(&["point", "--bogus"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&["point", "--rate", "fast"]), Err(CliError::Usage(_))));
        assert!(matches!(
            parse(&["point", "--schemes", "relay"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(parse(&[]), Err(CliError::Usage(_))));
    }

    #[test]
    fn per_relay_gain_lists() {
        let cfg = parse(&["point", "--relays", "3", "--gain-si", "0.5,1,2"]).unwrap();
        assert_eq!(cfg.spec.base_params.gains_si(), &[0.5, 1.0, 2.0]);
        assert_eq!(cfg.spec.base_params.gains_ie(), &[0.1; 3]);
    }

    #[test]
    fn help_lists_every_flag_with_units() {
        let err = parse(&["sweep", "--help"]).unwrap_err();
        let CliError::Usage(e) = err else { panic!() };
        let help = e.to_string();
        for flag in [
            "--gamma-db",
            "--rate",
            "--relays",
            "--gain-sd",
            "--gain-se",
            "--gain-si",
            "--gain-id",
            "--gain-ie",
            "--schemes",
            "--method",
            "--trials",
            "--inner-trials",
            "--seed",
            "--output",
            "--plot-script",
        ] {
            assert!(help.contains(flag), "missing {flag}");
        }
        for unit in ["dB", "bit/s/Hz", "linear", "count"] {
            assert!(help.contains(unit), "missing unit {unit}");
        }
    }
}
