//! `sadic`: command-line analyses of morphisms and directive sequences.
//!
//! Every run prints one JSON report per line (or one indented document with
//! `--pretty`). Exit status is 0 when every certificate passes, 2 when a
//! certificate fails or the input violates a hypothesis of the requested
//! construction, and 1 on usage or I/O errors.

mod commands;
mod input;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "sadic", version, about = "Morphisms, S-adic towers and their factors")]
struct Cli {
    /// Indented single-document output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Seed for every sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Least period of a word.
    Period { word: String },
    /// Local periods and critical positions of a word.
    Critical { word: String },
    /// Composition `σ_1 ∘ σ_2 ∘ …` of morphism files or inline rules.
    Compose {
        #[arg(required = true)]
        morphisms: Vec<String>,
    },
    /// Metrics and properness flags.
    Classify {
        morphism: String,
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Peels an elementary morphism: `σ = σ' ∘ e`.
    Peel {
        morphism: String,
        /// equal, prefix or interior.
        #[arg(long)]
        case: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        s_len: Option<usize>,
    },
    /// Rank-lowering decomposition of an aligned family from a witness pair,
    /// or of one morphism with `--split`.
    LowerRank {
        #[arg(required = true)]
        morphisms: Vec<String>,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value = "prefix")]
        side: String,
        /// Length of the split prefix `s` of `σ(a)`.
        #[arg(long)]
        split: Option<usize>,
    },
    /// Decomposition `τ = p ∘ q` with `q` letter-onto and proper.
    FactorizeThrough {
        phi: String,
        tau: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        w: String,
    },
    /// Language table of a level.
    Language {
        dseq: String,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long)]
        len: usize,
        /// Fixed depth; the smallest stabilizing depth when omitted.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Recognizability of a morphism on a level language.
    Recognizable {
        morphism: String,
        /// Directive sequence whose level language is used.
        #[arg(long)]
        lang: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Radius to check; the smallest passing radius up to `--cap` when omitted.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
    /// Return words to a marker `u.v`.
    ReturnWords {
        dseq: String,
        #[arg(long)]
        marker: String,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        /// Also build and certify the return coding.
        #[arg(long)]
        coding: bool,
    },
    /// Recognizable tower with verified identities.
    RecoTower {
        dseq: String,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Directory for `nu_n.mor`, `tau_n.mor`, `phi_n.mor` and `certificates.json`.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Proper sequence over pair alphabets.
    Properize {
        dseq: String,
        /// twice or anchor.
        #[arg(long, default_value = "twice")]
        rule: String,
    },
    /// Structure transported to the factor given by a local code.
    Factor {
        dseq: String,
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = 2)]
        levels: usize,
    },
    /// Covering-symbol profiles of sampled factor words.
    Fibers {
        dseq: String,
        #[arg(long)]
        code: String,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Finite-window asymptotic candidates.
    Asymptotic {
        dseq: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        side: String,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Built-in corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CorpusAction {
    List,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Period { .. } => "period",
            Command::Critical { .. } => "critical",
            Command::Compose { .. } => "compose",
            Command::Classify { .. } => "classify",
            Command::Peel { .. } => "peel",
            Command::LowerRank { .. } => "lower-rank",
            Command::FactorizeThrough { .. } => "factorize-through",
            Command::Language { .. } => "language",
            Command::Recognizable { .. } => "recognizable",
            Command::ReturnWords { .. } => "return-words",
            Command::RecoTower { .. } => "reco-tower",
            Command::Properize { .. } => "properize",
            Command::Factor { .. } => "factor",
            Command::Fibers { .. } => "fibers",
            Command::Asymptotic { .. } => "asymptotic",
            Command::Corpus { .. } => "corpus",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let name = cli.command.name();
    match commands::run(&cli.command, cli.seed) {
        Ok(outcome) => {
            print!("{}", report::render(name, &outcome, cli.pretty));
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            let (kind, code) = match &e {
                e if e.is_hypothesis() => ("hypothesis", 2),
                input::CliError::Usage(_) => ("usage", 1),
                input::CliError::Library(_) => ("input", 1),
            };
            eprintln!("error: {e}");
            print!("{}", report::render_error(name, kind, &e.to_string(), cli.pretty));
            ExitCode::from(code)
        }
    }
}
