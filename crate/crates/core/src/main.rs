use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use phrasecat::catalogue::lint_agreement;
use phrasecat::qa::{
    check_surface_invariants, enumerate_all, enumerate_count, generate_random, option_walk, GenerationSpec,
};
use phrasecat::render::Choice;
use phrasecat::search::{build_index, search};
use phrasecat::workbench::server::{serve, ServerConfig};
use phrasecat::workbench::{publish, Store};
use phrasecat::{parse_catalogue, render_sentence, serialize_catalogue, validate_catalogue, Catalogue, Selection};

/// Phrase-catalogue translation engine.
///
/// Exit status: 0 ok, 1 validation findings, 2 usage or I/O error.
#[derive(Parser)]
#[command(name = "phrasecat", version)]
struct Cli {
    /// Catalogue document.
    #[arg(long, global = true, env = "PHRASECAT_CATALOGUE")]
    catalogue: Option<PathBuf>,
    /// Bulletin store directory.
    #[arg(long, global = true, env = "PHRASECAT_STORE", default_value = "store")]
    store: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a catalogue and run the agreement lint.
    Validate {
        /// Catalogue to check; defaults to --catalogue.
        path: Option<PathBuf>,
        /// Treat warnings as findings too.
        #[arg(long)]
        strict: bool,
    },
    /// Print the canonical form of a catalogue.
    Fmt {
        path: Option<PathBuf>,
        /// Rewrite the file in place.
        #[arg(long, conflicts_with = "check")]
        write: bool,
        /// Exit 1 if the file is not canonical.
        #[arg(long)]
        check: bool,
    },
    /// Render one selection.
    Render {
        #[arg(long)]
        phrase: Option<String>,
        /// JSON file with a selection or just its choices; `-` for stdin.
        #[arg(long)]
        choices: PathBuf,
        /// Language; all catalogue languages when omitted.
        #[arg(long)]
        lang: Option<String>,
    },
    /// Generate seeded random selections and check their renderings.
    Generate {
        #[arg(long)]
        phrase: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Count (and optionally list) every selection of a phrase.
    Enumerate {
        #[arg(long)]
        phrase: String,
        /// List selections, refusing when there are more than this.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Write the option review sheet (tab-separated).
    Walk {
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find phrases by source-language words.
    Search {
        query: String,
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Publish a draft bulletin.
    Publish {
        #[arg(long)]
        bulletin: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Publish output directory.
        #[arg(long, default_value = "published")]
        out: PathBuf,
    },
}

enum Failure {
    /// Exit 1: the input was read but has findings.
    Findings,
    /// Exit 2: usage or I/O problem.
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Findings) => ExitCode::from(1),
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn catalogue_path(cli: &Option<PathBuf>, explicit: Option<PathBuf>) -> Result<PathBuf, Failure> {
    explicit
        .or_else(|| cli.clone())
        .ok_or_else(|| Failure::Usage("no catalogue given (use --catalogue or PHRASECAT_CATALOGUE)".into()))
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path) -> Result<Catalogue, Failure> {
    let bytes = read_input(path)?;
    parse_catalogue(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Load and refuse catalogues with validation errors.
fn load_valid(path: &Path) -> Result<Catalogue, Failure> {
    let cat = load(path)?;
    let report = validate_catalogue(&cat);
    if !report.is_ok() {
        eprint!("{report}");
        return Err(Failure::Usage(format!("{} does not validate", path.display())));
    }
    Ok(cat)
}

fn run(cli: Cli) -> CliResult {
    let Cli {
        catalogue,
        store,
        command,
    } = cli;
    let mut out = io::stdout().lock();
    match command {
        Command::Validate { path, strict } => {
            let path = catalogue_path(&catalogue, path)?;
            let cat = load(&path)?;
            let mut report = validate_catalogue(&cat);
            report.merge(lint_agreement(&cat));
            write!(out, "{report}")?;
            writeln!(
                out,
                "{}: {} error(s), {} warning(s)",
                path.display(),
                report.errors.len(),
                report.warnings.len()
            )?;
            if !report.is_ok() || (strict && !report.warnings.is_empty()) {
                return Err(Failure::Findings);
            }
        }
        Command::Fmt { path, write, check } => {
            let path = catalogue_path(&catalogue, path)?;
            let original = read_input(&path)?;
            let cat = parse_catalogue(&original).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let canonical = serialize_catalogue(&cat);
            if check {
                if canonical != original {
                    eprintln!("{} is not in canonical form", path.display());
                    return Err(Failure::Findings);
                }
            } else if write {
                if canonical != original {
                    std::fs::write(&path, &canonical)?;
                }
            } else {
                out.write_all(&canonical)?;
            }
        }
        Command::Render { phrase, choices, lang } => {
            let cat = load_valid(&catalogue_path(&catalogue, None)?)?;
            let raw: serde_json::Value = serde_json::from_slice(&read_input(&choices)?)?;
            let selection = if raw.get("phrase").is_some() {
                let sel: Selection = serde_json::from_value(raw)?;
                if phrase.as_deref().is_some_and(|p| p != sel.phrase.as_str()) {
                    return Err(Failure::Usage("--phrase differs from the selection file".into()));
                }
                sel
            } else {
                let phrase =
                    phrase.ok_or_else(|| Failure::Usage("--phrase is required for a bare choices file".into()))?;
                let mut sel = Selection::new(phrase.as_str());
                sel.segments = serde_json::from_value::<std::collections::BTreeMap<usize, Choice>>(raw)?;
                sel
            };
            let languages: Vec<String> = match lang {
                Some(l) => vec![l],
                None => cat.languages.iter().map(|l| l.to_string()).collect(),
            };
            let single = languages.len() == 1;
            for lang in languages {
                let text = render_sentence(&cat, &selection, &lang).map_err(|e| {
                    eprintln!("{}: {e}", e.code());
                    Failure::Findings
                })?;
                if single {
                    writeln!(out, "{text}")?;
                } else {
                    writeln!(out, "{lang}\t{text}")?;
                }
            }
        }
        Command::Generate { phrase, seed, count } => {
            let cat = load_valid(&catalogue_path(&catalogue, None)?)?;
            let spec = GenerationSpec {
                phrase: phrase.as_str().into(),
                seed,
                count,
            };
            let selections = generate_random(&cat, &spec).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut violations = 0;
            for sel in &selections {
                let mut texts = serde_json::Map::new();
                for lang in &cat.languages {
                    let text = render_sentence(&cat, sel, lang.as_str()).map_err(|e| Failure::Usage(e.to_string()))?;
                    for finding in check_surface_invariants(&text, lang.as_str()) {
                        eprintln!("{finding}: {text:?}");
                        violations += 1;
                    }
                    texts.insert(lang.to_string(), text.into());
                }
                writeln!(out, "{}", json!({ "selection": sel, "texts": texts }))?;
            }
            if violations > 0 {
                return Err(Failure::Findings);
            }
        }
        Command::Enumerate { phrase, limit } => {
            let cat = load_valid(&catalogue_path(&catalogue, None)?)?;
            match limit {
                None => {
                    let count = enumerate_count(&cat, &phrase).map_err(|e| Failure::Usage(e.to_string()))?;
                    writeln!(out, "{count}")?;
                }
                Some(limit) => {
                    let all = enumerate_all(&cat, &phrase, limit)
                        .map_err(|e| Failure::Usage(format!("{}: {e}", e.code())))?;
                    for sel in &all {
                        writeln!(out, "{}", serde_json::to_string(sel)?)?;
                    }
                }
            }
        }
        Command::Walk { out: path } => {
            let cat = load_valid(&catalogue_path(&catalogue, None)?)?;
            let sheet = option_walk(&cat);
            for warning in &sheet.report.warnings {
                eprintln!("warning: {warning}");
            }
            match path {
                Some(path) => std::fs::write(&path, sheet.to_tsv())?,
                None => out.write_all(sheet.to_tsv().as_bytes())?,
            }
        }
        Command::Search { query, limit } => {
            let cat = load_valid(&catalogue_path(&catalogue, None)?)?;
            let index = build_index(&cat);
            for hit in search(&index, &query, limit) {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{:.4}\t{}",
                    hit.number, hit.phrase, hit.coverage, hit.score, hit.title
                )?;
            }
        }
        Command::Publish { bulletin, out: dir } => {
            let cat = load_valid(&catalogue_path(&catalogue, None)?)?;
            let store = Store::open(&store)?;
            std::fs::create_dir_all(&dir)?;
            match publish(&store, &cat, &bulletin, &dir) {
                Ok(manifest) => writeln!(out, "{}", serde_json::to_string_pretty(&manifest)?)?,
                Err(phrasecat::workbench::PublishError::ValidationFailed(report)) => {
                    eprint!("{report}");
                    eprintln!("VALIDATION_FAILED: nothing was written");
                    return Err(Failure::Findings);
                }
                Err(e) => return Err(Failure::Usage(format!("{}: {e}", e.code()))),
            }
        }
        Command::Serve { addr, out: dir } => {
            let config = ServerConfig {
                catalogue: catalogue_path(&catalogue, None)?,
                store,
                out_dir: dir,
                addr,
            };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(config))?;
        }
    }
    Ok(())
}
