use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use proofgen::extraction::{extract_rules, RuleSet};
use proofgen::isogen::{generate, Mode};
use proofgen::search::{minimal_proofs, Limits, SearchError};
use proofgen::syntax::SignedFormula;
use proofgen::tableau::{parse_exercise, Proof};
use proofgen::theory::{parse_theory, Theory};

/// Theory-specific tableau rules, minimal proofs and exercise generation.
#[derive(Parser)]
#[command(name = "proofgen", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Verb {
    /// Extract the theory-specific rules of a definitional theory.
    ExtractRules {
        theory: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Find a minimal clean proof of an exercise.
    Prove {
        #[command(flatten)]
        input: Input,
        /// Print every minimal proof instead of the first.
        #[arg(long)]
        all_minimal: bool,
        #[command(flatten)]
        search: SearchFlags,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Generate exercises whose proofs match a minimal proof of the input.
    Generate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = ModeArg::Fast)]
        mode: ModeArg,
        /// Print a witness proof under each exercise.
        #[arg(long)]
        show_proofs: bool,
        #[command(flatten)]
        search: SearchFlags,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a proof file against the rules and report its size.
    Replay {
        theory: PathBuf,
        proof: PathBuf,
        /// Require the proof's hypotheses to be exactly this exercise.
        #[arg(long)]
        exercise: Option<PathBuf>,
        /// Rule file from `extract-rules --format json` instead of extracting.
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct Input {
    theory: PathBuf,
    exercise: PathBuf,
    /// Rule file from `extract-rules --format json` instead of extracting.
    #[arg(long)]
    rules: Option<PathBuf>,
}

#[derive(Args)]
struct SearchFlags {
    /// Largest number of rule and cut applications explored.
    #[arg(long, default_value_t = 64)]
    max_apps: usize,
    /// Largest number of tableaux kept on one search level.
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
    /// Search without the cut rule.
    #[arg(long)]
    no_cut: bool,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
}

impl SearchFlags {
    fn limits(&self) -> Limits {
        Limits {
            max_apps: self.max_apps,
            max_states: self.max_states,
            use_cut: !self.no_cut,
            time_budget: self.time_budget.map(Duration::from_secs_f64),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fast,
    Strict,
}

/// Exit 1: unusable input. Exit 2: a search limit was reached.
enum Failure {
    Input(String),
    Budget(String),
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::NotRefuted(_) => Failure::Budget(e.to_string()),
            SearchError::Tableau(e) => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e)))
}

fn load_theory(path: &Path) -> Result<Theory, Failure> {
    parse_theory(&read(path)?).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e)))
}

fn load_rules(th: &Theory, rules: Option<&Path>) -> Result<RuleSet, Failure> {
    match rules {
        Some(p) => RuleSet::from_json(&read(p)?, th).map_err(|e| Failure::Input(format!("{}: {}", p.display(), e))),
        None => extract_rules(th).map_err(|e| Failure::Input(e.to_string())),
    }
}

fn load_exercise(path: &Path, rs: &RuleSet) -> Result<Vec<SignedFormula>, Failure> {
    parse_exercise(&read(path)?, rs.signature()).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e)))
}

fn load_input(input: &Input) -> Result<(RuleSet, Vec<SignedFormula>), Failure> {
    let th = load_theory(&input.theory)?;
    let rs = load_rules(&th, input.rules.as_deref())?;
    let ex = load_exercise(&input.exercise, &rs)?;
    Ok((rs, ex))
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.verb {
        Verb::ExtractRules { theory, format } => {
            let rs = load_rules(&load_theory(&theory)?, None)?;
            Ok(match format {
                Format::Json => rs.to_json() + "\n",
                Format::Text => {
                    let mut out = String::new();
                    for (s, axiom) in &rs.skolems {
                        out.push_str(&format!("skolem {}/{} from {}\n", s.name(), s.arity(), axiom));
                    }
                    for r in &rs.rules {
                        out.push('\n');
                        out.push_str(&r.render_text());
                    }
                    out.push_str(&format!("\n{} rules\n", rs.rules.len()));
                    out
                }
            })
        }
        Verb::Prove {
            input,
            all_minimal,
            search,
            format,
        } => {
            let (rs, ex) = load_input(&input)?;
            let mut r = minimal_proofs(&ex, &rs, &search.limits())?;
            if !all_minimal {
                r.proofs.truncate(1);
            }
            Ok(match format {
                Format::Json if all_minimal => {
                    let docs: Vec<_> = r.proofs.iter().map(|p| p.to_json_value(&rs)).collect();
                    serde_json::to_string_pretty(&docs).expect("proofs always serialize") + "\n"
                }
                Format::Json => r.proofs[0].to_json(&rs) + "\n",
                Format::Text => {
                    let n = r.proofs.len();
                    let mut out = String::new();
                    for (i, p) in r.proofs.iter().enumerate() {
                        if all_minimal {
                            out.push_str(&format!("proof {} of {}\n", i + 1, n));
                        }
                        out.push_str(&p.render_text(&rs));
                        if i + 1 < n {
                            out.push('\n');
                        }
                    }
                    out
                }
            })
        }
        Verb::Generate {
            input,
            mode,
            show_proofs,
            search,
            format,
        } => {
            let (rs, ex) = load_input(&input)?;
            let mode = match mode {
                ModeArg::Fast => Mode::Fast,
                ModeArg::Strict => Mode::Strict,
            };
            let g = generate(&ex, &rs, mode, &search.limits())?;
            Ok(match format {
                Format::Json => g.to_json() + "\n",
                Format::Text => g.render_text(&rs, show_proofs),
            })
        }
        Verb::Replay {
            theory,
            proof,
            exercise,
            rules,
            format,
        } => {
            let th = load_theory(&theory)?;
            let rs = load_rules(&th, rules.as_deref())?;
            let ex = exercise.as_deref().map(|p| load_exercise(p, &rs)).transpose()?;
            let text = read(&proof)?;
            let p = Proof::replay(&text, &rs, ex.as_deref())
                .map_err(|e| Failure::Input(format!("{}: {}", proof.display(), e)))?;
            Ok(match format {
                Format::Json => {
                    serde_json::json!({
                        "valid": true,
                        "clean": p.is_clean(),
                        "branches": p.branches().len(),
                        "size": p.deductive_size(),
                    })
                    .to_string()
                        + "\n"
                }
                Format::Text => {
                    let clean = if p.is_clean() { "clean" } else { "not clean" };
                    format!("{}valid proof, {}\n", p.render_text(&rs), clean)
                }
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // Only fails when a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli) {
        Ok(out) => {
            print!("{}", out);
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
