//! Argument handling for the `screenqkd` binary.
//!
//! Precedence is defaults, then the TOML file given with `--config`, then
//! flags. Exit codes: 0 when the run completed and every check passed, 1
//! when a check failed, 2 for usage, configuration or I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::adversary::{AttackKind, GuessRule};
use crate::experiment::{run_experiment_with_transcripts, write_outputs, ExperimentConfig, SourceMode};

pub const OUT_DIR_ENV: &str = "SCREENQKD_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "screenqkd-out";

#[derive(Debug, Parser)]
#[command(
    name = "screenqkd",
    version,
    about = "Screening-angle QKD simulator and attack harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run sessions (or an N sweep) and write reports.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of screening angles.
    #[arg(long = "N", alias = "n")]
    n: Option<usize>,
    /// Comma-separated N values; produces a security curve.
    #[arg(long = "sweep-N", alias = "sweep-n", value_delimiter = ',')]
    sweep_n: Option<Vec<usize>>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Probability that Bob uses an analyzing angle.
    #[arg(long = "p-a", alias = "pa")]
    p_a: Option<f64>,
    /// Alice's tap transmission coefficient.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<SourceMode>,
    /// Mean photon number in pulse mode.
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    loss: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    attack: Option<AttackKind>,
    /// Probability that Eve acts in a round.
    #[arg(long)]
    attack_probability: Option<f64>,
    /// Fraction of her own photons Eve recovers on leg 3.
    #[arg(long)]
    eve_tap: Option<f64>,
    /// Probe angle for the simple Trojan attack, radians.
    #[arg(long)]
    eta: Option<f64>,
    /// Make Eve always guess this 1-based screening index.
    #[arg(long)]
    guess_index: Option<usize>,
    /// Width of statistical check bands, in standard deviations.
    #[arg(long)]
    sigmas: Option<f64>,
    #[arg(long)]
    no_assertions: bool,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    /// File stem for reports.
    #[arg(long)]
    name: Option<String>,
    /// Also write per-session transcripts.
    #[arg(long)]
    transcripts: bool,
}

impl RunArgs {
    fn into_config(self) -> crate::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_toml_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.n {
            c.n = v;
            c.sweep_n = None;
        }
        if self.sweep_n.is_some() {
            c.sweep_n = self.sweep_n;
        }
        macro_rules! set {
            ($($flag:ident => $field:expr),* $(,)?) => {
                $(if let Some(v) = self.$flag { $field = v; })*
            };
        }
        set! {
            rounds => c.rounds,
            trials => c.trials,
            p_a => c.p_a,
            t => c.t,
            mu => c.mu,
            loss => c.channel_loss,
            seed => c.seed,
            attack => c.attack.kind,
            attack_probability => c.attack.probability,
            eve_tap => c.attack.eve_tap,
            eta => c.attack.eta,
            sigmas => c.sigmas,
            name => c.output.name,
        }
        if self.mode.is_some() {
            c.mode = self.mode;
        }
        if let Some(index) = self.guess_index {
            c.attack.guess = GuessRule::Fixed { index };
        }
        if self.no_assertions {
            c.assertions = false;
        }
        if self.transcripts {
            c.output.transcripts = true;
        }
        if self.out.is_some() {
            c.output.dir = self.out;
        }
        if c.output.dir.is_none() {
            c.output.dir = Some(PathBuf::from(DEFAULT_OUT_DIR));
        }
        Ok(c)
    }
}

fn fmt_rate(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let Command::Run(args) = cli.command;
    let config = match args.into_config().and_then(|c| c.validate().map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let run = match run_experiment_with_transcripts(&config, config.output.transcripts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };

    // a closed pipe on stdout is not an error worth dying over
    let mut out = std::io::stdout().lock();
    for s in &run.report.summaries {
        let verdicts: Vec<String> = s.verdicts.iter().map(|(v, n)| format!("{}:{n}", v.label())).collect();
        let _ = writeln!(
            out,
            "N={} mode={} attack={} rounds={} trials={} sift_rate={:.6} qber={} ad_violation_rate={} \
             probe_violation_rate={} eve_accuracy={} conclusive_rate={} verdicts={}",
            s.n,
            s.mode,
            s.attack,
            config.rounds,
            config.trials,
            s.sift_rate,
            fmt_rate(s.qber),
            fmt_rate(s.ad_violation_rate),
            fmt_rate(s.probe_violation_rate),
            fmt_rate(s.eve_accuracy),
            fmt_rate(s.conclusive_rate),
            verdicts.join(",")
        );
    }
    for c in &run.report.checks {
        let _ = writeln!(
            out,
            "{} {} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }

    if let Some(dir) = &config.output.dir {
        match write_outputs(&run, dir, &config.output.name) {
            Ok(paths) => {
                for p in paths {
                    let _ = writeln!(out, "wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        }
    }
    if run.report.passed() {
        0
    } else {
        1
    }
}
