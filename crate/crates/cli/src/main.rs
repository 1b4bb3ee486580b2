//! `sybilvote`: run sybil-resilient voting rules, audit their guarantees
//! over small universes, plot the conservatism they cost, and bound the
//! sybil share from an inspection sample.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sybilvote_cli::commands::{self, AuditSpec, DecideSpec, Failure, Format};

#[derive(Parser)]
#[command(
    name = "sybilvote",
    version,
    about = "Sybil-resilient voting: decide elections, audit safety and liveness, estimate the sybil share"
)]
struct Cli {
    /// Output format: human-readable text or a JSON document.
    #[arg(long, global = true, default_value = "text", value_parser = ["text", "structured"])]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a voting rule on an election file.
    Decide {
        /// Election file (header line, then one ballot per line).
        file: PathBuf,
        /// supermajority | majority | condorcet | agenda | suppress-outer | simple-update
        #[arg(long)]
        rule: String,
        /// Fallback when no outright winner exists: conservative | permissive.
        #[arg(long)]
        variant: Option<String>,
        /// Supermajority margin in [0, 1/2]; overrides the file header.
        #[arg(long)]
        delta: Option<String>,
        /// Assumed sybil share in [0, 1]; overrides the file header.
        #[arg(long)]
        sigma: Option<String>,
        /// Agenda order as comma-separated alternative ids.
        #[arg(long)]
        order: Option<String>,
    },
    /// Tabulate the conservatism rho(sigma, delta) as CSV.
    Curve {
        /// Comma-separated sigma values; default 0 to 1/2 in steps of 1/20.
        #[arg(long)]
        sigmas: Option<String>,
        /// Comma-separated delta values; default delta = sigma/2 per row.
        #[arg(long)]
        deltas: Option<String>,
    },
    /// Brute-force check of a guarantee, over a universe of small
    /// instances (--kind) or one recorded election (--file).
    Audit {
        /// Election file to replay (safety of the single recorded instance).
        #[arg(long)]
        file: Option<PathBuf>,
        /// Universe to sweep: binary | ordinal | parameter.
        #[arg(long)]
        kind: Option<String>,
        /// safety | liveness | less-conservative
        #[arg(long)]
        property: String,
        /// Rule under audit; defaults to the guarded rule of the kind.
        #[arg(long)]
        rule: Option<String>,
        /// Baseline rule the guarantee is stated against.
        #[arg(long)]
        base: Option<String>,
        /// Fixed supermajority margin; default: the minimal safe sigma/2.
        #[arg(long)]
        delta: Option<String>,
        /// Sybil share: bound for safety sweeps, exact share for liveness.
        #[arg(long)]
        sigma: Option<String>,
        /// Parameter safety only: bound on the enumerated sybil share when
        /// it differs from the rule's trim bound --sigma.
        #[arg(long)]
        penetration: Option<String>,
        /// Largest electorate size to enumerate.
        #[arg(long)]
        n: Option<u64>,
        /// Number of ranked alternatives (ordinal audits); default 3.
        #[arg(long)]
        m: Option<usize>,
        /// Abort (exit 3) if the universe exceeds this many instances.
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
    },
    /// Upper confidence bound on the sybil share from an inspection sample.
    EstimateSigma {
        /// Sample size: how many voters were inspected.
        #[arg(long)]
        k: u64,
        /// How many of the inspected voters turned out to be sybils.
        #[arg(long)]
        s: u64,
        /// Acceptable probability that the true share exceeds the bound.
        #[arg(long, default_value_t = 0.05)]
        p: f64,
        /// Also report the point estimate s/k plus this margin.
        #[arg(long)]
        epsilon: Option<String>,
    },
}

fn run(cli: Cli) -> Result<commands::CmdOutput, Failure> {
    let format = Format::from_flag(&cli.format)?;
    match cli.command {
        Command::Decide {
            file,
            rule,
            variant,
            delta,
            sigma,
            order,
        } => commands::decide(
            &DecideSpec {
                file,
                rule,
                variant,
                delta,
                sigma,
                order,
            },
            format,
        ),
        Command::Curve { sigmas, deltas } => commands::curve(&sigmas, &deltas, format),
        Command::Audit {
            file,
            kind,
            property,
            rule,
            base,
            delta,
            sigma,
            penetration,
            n,
            m,
            budget,
        } => commands::audit(
            &AuditSpec {
                file,
                kind,
                property,
                rule,
                base,
                delta,
                sigma,
                penetration,
                n,
                m,
                budget,
            },
            format,
        ),
        Command::EstimateSigma { k, s, p, epsilon } => {
            commands::estimate_sigma(k, s, p, &epsilon, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Help and version requests land here too; only real usage
        // errors take the error path.
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
