use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use idbe::benchmark::{self, BenchOptions, DictMode};
use idbe::pipeline::{DictionarySource, PipelineConfig, Transform, DEFAULT_BLOCK_SIZE};
use idbe::{build_dictionary, build_lexicon, Dictionary, ErrorClass, SessionKey};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_FORMAT: u8 = 3;
const EXIT_AUTH: u8 = 4;

/// Dictionary-based text compression over a BWT backend.
///
/// Exit codes: 0 success, 1 usage, 2 I/O, 3 format or corruption,
/// 4 authentication failure.
#[derive(Debug, Parser)]
#[command(name = "idbe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a frequency-ranked dictionary from one or more text files.
    Makedict {
        /// Dictionary file to write.
        #[arg(short, long, value_name = "DICT")]
        output: PathBuf,
        /// Training files.
        #[arg(required = true, value_name = "FILE")]
        inputs: Vec<PathBuf>,
    },
    /// Compress a file into a container.
    Compress {
        /// Word transform applied before the backend.
        #[arg(long, value_name = "none|star|idbe", default_value = "none", value_parser = parse_transform)]
        transform: Transform,
        /// Dictionary file. Without --embed-dict the decompressor must be given the same file.
        #[arg(long, value_name = "DICT")]
        dict: Option<PathBuf>,
        /// Store the dictionary in the container. Without --dict, one is trained on the input.
        #[arg(long)]
        embed_dict: bool,
        /// Backend block size in bytes (1024..=16777216).
        #[arg(long, value_name = "N", default_value_t = DEFAULT_BLOCK_SIZE)]
        block_size: usize,
        /// Container file to write.
        #[arg(short, long, value_name = "OUT")]
        output: PathBuf,
        /// File to compress.
        #[arg(value_name = "IN")]
        input: PathBuf,
    },
    /// Restore the original file from a container.
    Decompress {
        /// Dictionary file, required for containers made with an external dictionary.
        #[arg(long, value_name = "DICT")]
        dict: Option<PathBuf>,
        /// File to write.
        #[arg(short, long, value_name = "OUT")]
        output: PathBuf,
        /// Container to read.
        #[arg(value_name = "IN")]
        input: PathBuf,
    },
    /// Wrap a dictionary file in authenticated, encrypted transfer frames.
    PackDict {
        #[command(flatten)]
        key: KeyArg,
        /// Packed output file.
        #[arg(short, long, value_name = "OUT")]
        output: PathBuf,
        /// Dictionary file to pack.
        #[arg(value_name = "DICT")]
        dict: PathBuf,
    },
    /// Verify and unwrap a packed dictionary.
    UnpackDict {
        #[command(flatten)]
        key: KeyArg,
        /// Dictionary file to write.
        #[arg(short, long, value_name = "DICT")]
        output: PathBuf,
        /// Packed input file.
        #[arg(value_name = "IN")]
        input: PathBuf,
    },
    /// Measure bits per character and timings over a corpus directory.
    Bench {
        /// Directory of corpus files (not recursive).
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
        /// Comma-separated transforms to run.
        #[arg(long, value_name = "LIST", value_delimiter = ',', default_value = "none,star,idbe", value_parser = parse_transform)]
        transforms: Vec<Transform>,
        /// Dictionary file. Without it, one is trained on the whole corpus.
        #[arg(long, value_name = "DICT")]
        dict: Option<PathBuf>,
        /// Backend block size in bytes.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_BLOCK_SIZE)]
        block_size: usize,
        /// CSV report to write.
        #[arg(long, value_name = "OUT")]
        csv: PathBuf,
        /// Gnuplot data file to write.
        #[arg(long, value_name = "OUT")]
        plot: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct KeyArg {
    /// Session key as hex, at least 16 bytes. Falls back to $IDBE_KEY.
    #[arg(long, value_name = "HEXKEY", env = "IDBE_KEY", hide_env_values = true)]
    key: String,
}

fn parse_transform(s: &str) -> Result<Transform, String> {
    s.parse().map_err(|e: idbe::Error| e.to_string())
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<idbe::Error> for Failure {
    fn from(e: idbe::Error) -> Self {
        let code = match e.class() {
            ErrorClass::Usage => EXIT_USAGE,
            ErrorClass::Io => EXIT_IO,
            ErrorClass::Format => EXIT_FORMAT,
            ErrorClass::Authentication => EXIT_AUTH,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::io(path, e))
}

/// Write through a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, data: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(path, e))?;
    tmp.write_all(data).map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}

fn load_dictionary(path: &Path) -> CliResult<Dictionary> {
    let bytes = read(path)?;
    Dictionary::parse(&bytes).map_err(|e| Failure {
        message: format!("{}: {e}", path.display()),
        ..Failure::from(e)
    })
}

fn session_key(arg: &KeyArg) -> CliResult<SessionKey> {
    let bytes = hex::decode(arg.key.trim()).map_err(|e| Failure::usage(format!("invalid hex key: {e}")))?;
    Ok(SessionKey::new(bytes)?)
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Makedict { output, inputs } => {
            let texts = inputs.iter().map(|p| read(p)).collect::<CliResult<Vec<_>>>()?;
            let dict = build_dictionary(&build_lexicon(&texts))?;
            write_atomic(&output, &dict.serialize())
        }
        Command::Compress {
            transform,
            dict,
            embed_dict,
            block_size,
            output,
            input,
        } => {
            let data = read(&input)?;
            let mut cfg = PipelineConfig::new(transform).with_block_size(block_size);
            let dictionary = if transform.needs_dictionary() {
                let d = match &dict {
                    Some(path) => load_dictionary(path)?,
                    None if embed_dict => build_dictionary(&build_lexicon(&[&data]))?,
                    None => {
                        return Err(Failure::usage(format!(
                            "transform {transform} needs --dict DICT or --embed-dict"
                        )))
                    }
                };
                let source = if embed_dict {
                    DictionarySource::Embedded
                } else {
                    DictionarySource::External
                };
                cfg = cfg.with_dictionary_source(source);
                Some(d)
            } else {
                None
            };
            let packed = idbe::compress(&data, &cfg, dictionary.as_ref())?;
            write_atomic(&output, &packed)
        }
        Command::Decompress { dict, output, input } => {
            let data = read(&input)?;
            let dictionary = dict.as_deref().map(load_dictionary).transpose()?;
            let restored = idbe::decompress(&data, dictionary.as_ref())?;
            write_atomic(&output, &restored)
        }
        Command::PackDict { key, output, dict } => {
            let key = session_key(&key)?;
            let dictionary = load_dictionary(&dict)?;
            write_atomic(&output, &idbe::pack_dictionary(&dictionary, &key)?)
        }
        Command::UnpackDict { key, output, input } => {
            let key = session_key(&key)?;
            let dictionary = idbe::unpack_dictionary(&read(&input)?, &key)?;
            write_atomic(&output, &dictionary.serialize())
        }
        Command::Bench {
            corpus,
            transforms,
            dict,
            block_size,
            csv,
            plot,
        } => {
            PipelineConfig::new(Transform::None)
                .with_block_size(block_size)
                .validate()?;
            let mode = match dict {
                Some(path) => DictMode::External(path),
                None => DictMode::SelfTrained,
            };
            let opts = BenchOptions {
                block_size,
                ..BenchOptions::default()
            };
            let rows = benchmark::run_corpus_with(&corpus, &transforms, &mode, opts).map_err(|e| match e {
                idbe::Error::Io(io) => Failure::io(&corpus, io),
                other => other.into(),
            })?;
            for r in &rows {
                println!(
                    "{:<16} {:<5} {:>9} -> {:>9}  {:.3} bpc  {:.3}s / {:.3}s",
                    r.file_name,
                    r.transform,
                    r.input_bytes,
                    r.output_bytes,
                    r.bpc,
                    r.compress_seconds,
                    r.decompress_seconds
                );
            }
            write_atomic(&csv, &benchmark::emit_csv(&rows))?;
            if let Some(plot) = plot {
                write_atomic(&plot, &benchmark::emit_plot_data(&rows))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("idbe: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
