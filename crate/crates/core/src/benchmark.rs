//! Corpus benchmark: bits per character and timings for each transform.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::warn;

use crate::dictionary::{build_dictionary, build_lexicon_with, Dictionary};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::pipeline::{self, bpc, DictionarySource, PipelineConfig, Transform, DEFAULT_BLOCK_SIZE};

/// Where the benchmark dictionary comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DictMode {
    /// Built from every file of the corpus under test.
    SelfTrained,
    /// Loaded from a dictionary file.
    External(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub file_name: String,
    pub transform: Transform,
    pub input_bytes: u64,
    pub output_bytes: u64,
    pub bpc: f64,
    pub compress_seconds: f64,
    pub decompress_seconds: f64,
    pub roundtrip_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    pub block_size: usize,
    /// Scheduling across files. Each file is always coded on one thread so
    /// its timings belong to that file alone.
    pub files: Execution,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            block_size: DEFAULT_BLOCK_SIZE,
            files: Execution::default(),
        }
    }
}

/// A corpus file loaded into memory.
#[derive(Debug, Clone)]
pub struct CorpusFile {
    pub name: String,
    pub data: Vec<u8>,
}

/// Read every non-empty regular file directly inside `dir`, sorted by name.
/// Unreadable and empty files are skipped with a warning.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusFile>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        if !entry.file_type()?.is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        match fs::read(&path) {
            Ok(data) if data.is_empty() => warn!("skipping empty file {}", path.display()),
            Ok(data) => files.push(CorpusFile { name, data }),
            Err(e) => warn!("skipping unreadable file {}: {e}", path.display()),
        }
    }
    files.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(files)
}

/// Dictionary trained on the whole corpus.
pub fn self_trained_dictionary(files: &[CorpusFile], exec: Execution) -> Result<Dictionary> {
    let texts: Vec<&[u8]> = files.iter().map(|f| f.data.as_slice()).collect();
    build_dictionary(&build_lexicon_with(&texts, exec))
}

/// Compress, decompress and verify one file under one transform. The
/// dictionary is treated as shipped separately and is not counted.
pub fn measure(file: &CorpusFile, transform: Transform, dict: &Dictionary, block_size: usize) -> Result<BenchRow> {
    let source = if transform.needs_dictionary() {
        DictionarySource::External
    } else {
        DictionarySource::NotNeeded
    };
    let cfg = PipelineConfig::new(transform)
        .with_block_size(block_size)
        .with_dictionary_source(source)
        .with_execution(Execution::Sequential);
    let dict = transform.needs_dictionary().then_some(dict);

    let start = Instant::now();
    let packed = pipeline::compress(&file.data, &cfg, dict)?;
    let compress_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let unpacked = pipeline::decompress_with(&packed, dict, Execution::Sequential)?;
    let decompress_seconds = start.elapsed().as_secs_f64();

    if unpacked != file.data {
        return Err(Error::RoundTripMismatch {
            file: file.name.clone(),
            transform: transform.to_string(),
        });
    }
    let input_bytes = file.data.len() as u64;
    let output_bytes = packed.len() as u64;
    Ok(BenchRow {
        file_name: file.name.clone(),
        transform,
        input_bytes,
        output_bytes,
        bpc: bpc(input_bytes, output_bytes)?,
        compress_seconds,
        decompress_seconds,
        roundtrip_ok: true,
    })
}

/// Benchmark already-loaded files. Rows come back sorted by file name, then
/// in the order of `transforms`.
pub fn run_files(
    files: &[CorpusFile],
    transforms: &[Transform],
    dict: &Dictionary,
    opts: BenchOptions,
) -> Result<Vec<BenchRow>> {
    let mut sorted: Vec<&CorpusFile> = files.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let jobs: Vec<(&CorpusFile, Transform)> = sorted
        .iter()
        .flat_map(|f| transforms.iter().map(move |&t| (*f, t)))
        .collect();
    exec::try_map(opts.files, &jobs, |_, &(file, t)| {
        measure(file, t, dict, opts.block_size)
    })
}

pub fn run_corpus(dir: &Path, transforms: &[Transform], mode: &DictMode) -> Result<Vec<BenchRow>> {
    run_corpus_with(dir, transforms, mode, BenchOptions::default())
}

pub fn run_corpus_with(
    dir: &Path,
    transforms: &[Transform],
    mode: &DictMode,
    opts: BenchOptions,
) -> Result<Vec<BenchRow>> {
    let files = load_corpus(dir)?;
    let dict = match mode {
        DictMode::SelfTrained => self_trained_dictionary(&files, opts.files)?,
        DictMode::External(path) => Dictionary::parse(&fs::read(path)?)?,
    };
    run_files(&files, transforms, &dict, opts)
}

pub const CSV_HEADER: &str = "file,transform,input_bytes,output_bytes,bpc,compress_seconds,decompress_seconds";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit_csv(rows: &[BenchRow]) -> Vec<u8> {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{:.6},{:.6}",
            csv_field(&r.file_name),
            r.transform,
            r.input_bytes,
            r.output_bytes,
            r.bpc,
            r.compress_seconds,
            r.decompress_seconds
        );
    }
    out.into_bytes()
}

/// Gnuplot data: one indexed block per transform (blocks separated by two
/// blank lines), one line per file.
pub fn emit_plot_data(rows: &[BenchRow]) -> Vec<u8> {
    let mut out = String::new();
    let mut transforms: Vec<Transform> = rows.iter().map(|r| r.transform).collect();
    transforms.sort();
    transforms.dedup();
    for (i, t) in transforms.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# transform {t}");
        out.push_str("# file bpc compress_seconds decompress_seconds\n");
        for r in rows.iter().filter(|r| r.transform == *t) {
            let _ = writeln!(
                out,
                "\"{}\" {:.6} {:.6} {:.6}",
                r.file_name.replace('"', "'"),
                r.bpc,
                r.compress_seconds,
                r.decompress_seconds
            );
        }
    }
    out.into_bytes()
}
