//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if a gating criterion fails.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use idbe::backend::{bwt_forward, bwt_inverse, mtf_decode, mtf_encode, rle_decode, rle_encode};
use idbe::benchmark::{self, BenchOptions, BenchRow, CorpusFile};
use idbe::entropy::{ari_decode, ari_encode};
use idbe::pipeline::{DictionarySource, PipelineConfig, Transform};
use idbe::star::{star_decode, star_encode, StarDictionary};
use idbe::transfer::{protect, unprotect, RecordFrame, FRAGMENT_SIZE};
use idbe::{
    build_dictionary, build_lexicon, idbe as idbe_transform, tokenizer, Dictionary, ErrorClass, Execution, SessionKey,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIALS: usize = 1000;
const TEXT_FILES: [&str; 7] = [
    "alice29.txt",
    "asyoulik.txt",
    "cp.html",
    "fields.c",
    "grammar.lsp",
    "lcet10.txt",
    "plrabn12.txt",
];
const BINARY_FILES: [&str; 3] = ["kennedy.xls", "ptt5", "sum"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/canterbury")
}

fn random_word(rng: &mut ChaCha8Rng) -> Vec<u8> {
    const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
    let len = rng.gen_range(2..=10);
    (0..len).map(|_| LETTERS[rng.gen_range(0..LETTERS.len())]).collect()
}

/// 60,000 distinct words, enough to reach three-byte codes.
fn vocabulary(rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    let mut seen = HashSet::new();
    let mut words = Vec::new();
    while words.len() < 60_000 {
        let w = random_word(rng);
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    words
}

fn text(rng: &mut ChaCha8Rng, vocab: &[Vec<u8>], len: usize) -> Vec<u8> {
    const SEPARATORS: [&[u8]; 8] = [b" ", b" ", b" ", b"  ", b", ", b".\n", b"\n", b" - "];
    let mut out = Vec::with_capacity(len + 16);
    while out.len() < len {
        match rng.gen_range(0..20) {
            0 => out.extend_from_slice(&random_word(rng)),
            1 => out.push(rng.gen_range(b'a'..=b'z')),
            2 => out.extend_from_slice(rng.gen_range(0u32..100_000).to_string().as_bytes()),
            3 => out.push(*[b'*', 27, 251, 255, 0xe9].choose(rng).unwrap()),
            _ => {
                let u: f64 = rng.gen();
                out.extend_from_slice(&vocab[(u * u * u * vocab.len() as f64) as usize]);
            }
        }
        out.extend_from_slice(SEPARATORS.choose(rng).unwrap());
    }
    out.truncate(len);
    out
}

/// The i-th randomized input: empty, all-equal, periodic, binary heavy in
/// marker and escape bytes, or text over the shared vocabulary.
fn sample(rng: &mut ChaCha8Rng, vocab: &[Vec<u8>], i: usize, max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(1..=max_len);
    match i % 5 {
        _ if i.is_multiple_of(100) => Vec::new(),
        0 => vec![rng.gen(); len],
        1 => {
            let period: Vec<u8> = (0..rng.gen_range(1..=8)).map(|_| rng.gen()).collect();
            period.iter().copied().cycle().take(len).collect()
        }
        2 => (0..len)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    rng.gen_range(251..=255)
                } else {
                    rng.gen()
                }
            })
            .collect(),
        _ => text(rng, vocab, len),
    }
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let vocab = vocabulary(&mut rng);
    let dict = Dictionary::from_words(vocab.clone()).expect("vocabulary is valid");
    let stars = StarDictionary::from(&dict);
    let key = SessionKey::new(rng.gen::<[u8; 32]>().to_vec()).unwrap();
    let mut failures: Vec<String> = Vec::new();
    let mut fail = |stage: &str, i: usize| {
        if failures.len() < 10 {
            failures.push(format!("{stage}#{i}"));
        } else {
            failures.push(String::new());
        }
    };

    for i in 0..TRIALS {
        let x = sample(&mut rng, &vocab, i, 4000);

        let concat: Vec<u8> = tokenizer::tokens(&x).flat_map(|t| t.bytes.iter().copied()).collect();
        if concat != x {
            fail("tokenize", i);
        }
        if idbe_transform::decode(&idbe_transform::encode(&x, &dict), &dict).ok() != Some(x.clone()) {
            fail("idbe", i);
        }
        if star_decode(&star_encode(&x, &stars), &stars).ok() != Some(x.clone()) {
            fail("star", i);
        }
        let bwt_ok = if x.is_empty() {
            bwt_forward(&x).is_err()
        } else {
            bwt_forward(&x).and_then(|b| bwt_inverse(&b)).ok() == Some(x.clone())
        };
        if !bwt_ok {
            fail("bwt", i);
        }
        if mtf_decode(&mtf_encode(&x)) != x {
            fail("mtf", i);
        }
        if rle_decode(&rle_encode(&x)).ok() != Some(x.clone()) {
            fail("rle", i);
        }
        if ari_decode(&ari_encode(&x)).ok() != Some(x.clone()) {
            fail("ari", i);
        }

        let transform = Transform::ALL[i % 3];
        let execution = if i % 2 == 0 {
            Execution::Parallel
        } else {
            Execution::Sequential
        };
        let mut cfg = PipelineConfig::new(transform)
            .with_block_size(1024)
            .with_execution(execution);
        let own;
        let used = if !transform.needs_dictionary() {
            None
        } else if i % 4 < 2 {
            cfg = cfg.with_dictionary_source(DictionarySource::External);
            Some(&dict)
        } else {
            cfg = cfg.with_dictionary_source(DictionarySource::Embedded);
            own = build_dictionary(&build_lexicon(&[&x])).unwrap();
            Some(&own)
        };
        let restored = idbe::compress(&x, &cfg, used).and_then(|c| idbe::decompress(&c, used));
        if restored.ok() != Some(x.clone()) {
            fail("pipeline", i);
        }

        let chunk = &x[..x.len().min(FRAGMENT_SIZE)];
        let seq = rng.gen();
        let frame_ok = protect(chunk, &key, seq, i % 2 == 0)
            .and_then(|f| {
                let bytes = f.to_bytes();
                let (back, used) = RecordFrame::read(&bytes, seq)?;
                assert_eq!(used, bytes.len());
                unprotect(&back, &key)
            })
            .ok();
        if frame_ok.as_deref() != Some(chunk) {
            fail("frames", i);
        }
    }

    let count = failures.len();
    failures.retain(|f| !f.is_empty());
    outcome(
        count == 0,
        format!("9 stages x {TRIALS} inputs, {count} failures {failures:?}"),
    )
}

fn oracle_bwt(block: &[u8]) -> (Vec<u8>, usize) {
    let n = block.len();
    let doubled: Vec<u8> = block.iter().chain(block).copied().collect();
    let mut rows: Vec<usize> = (0..n).collect();
    rows.sort_by(|&a, &b| doubled[a..a + n].cmp(&doubled[b..b + n]));
    let last = rows.iter().map(|&r| block[(r + n - 1) % n]).collect();
    let primary = rows.iter().position(|&r| r == 0).unwrap();
    (last, primary)
}

fn bwt_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut blocks: Vec<Vec<u8>> = (1..=20).map(|k| b"ab".repeat(k * 100)).collect();
    while blocks.len() < 500 {
        let len = rng.gen_range(1..=4096);
        let block = match blocks.len() % 4 {
            0 => {
                let period: Vec<u8> = (0..rng.gen_range(1..=6)).map(|_| rng.gen_range(b'a'..=b'c')).collect();
                period.iter().copied().cycle().take(len).collect()
            }
            1 => (0..len).map(|_| rng.gen_range(b'a'..=b'b')).collect(),
            2 => vec![rng.gen(); len],
            _ => (0..len).map(|_| rng.gen()).collect(),
        };
        blocks.push(block);
    }
    let mismatches = blocks
        .iter()
        .filter(|b| {
            let (last, primary) = oracle_bwt(b);
            match bwt_forward(b) {
                Ok(got) => got.last_column != last || got.primary_index != primary,
                Err(_) => true,
            }
        })
        .count();
    outcome(
        mismatches == 0,
        format!("{} blocks (20 of them \"ab\"*k), {mismatches} mismatches", blocks.len()),
    )
}

fn corpus_rows() -> Result<Vec<BenchRow>, String> {
    let dir = corpus_dir();
    let files = benchmark::load_corpus(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    if files.is_empty() {
        return Err(format!("no files in {}", dir.display()));
    }
    let dict = benchmark::self_trained_dictionary(&files, Execution::Parallel).map_err(|e| e.to_string())?;
    benchmark::run_files(&files, &Transform::ALL, &dict, BenchOptions::default()).map_err(|e| e.to_string())
}

fn bpc_of(rows: &[BenchRow], file: &str, t: Transform) -> Option<f64> {
    rows.iter()
        .find(|r| r.file_name == file && r.transform == t)
        .map(|r| r.bpc)
}

fn direction(rows: &[BenchRow]) -> Outcome {
    let mut bad = Vec::new();
    let mut parts = Vec::new();
    for f in TEXT_FILES {
        match (bpc_of(rows, f, Transform::Idbe), bpc_of(rows, f, Transform::None)) {
            (Some(i), Some(n)) => {
                parts.push(format!("{f} {n:.3}->{i:.3}"));
                if i >= n {
                    bad.push(f);
                }
            }
            _ => bad.push(f),
        }
    }
    outcome(bad.is_empty(), format!("{}; violations {bad:?}", parts.join(", ")))
}

fn magnitude(rows: &[BenchRow]) -> Outcome {
    let targets = [
        ("alice29.txt", Transform::None, 2.45, 0.25),
        ("plrabn12.txt", Transform::None, 2.80, 0.25),
        ("alice29.txt", Transform::Idbe, 2.11, 0.35),
        ("plrabn12.txt", Transform::Idbe, 2.30, 0.35),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (f, t, want, tol) in targets {
        let got = bpc_of(rows, f, t);
        let ok = got.is_some_and(|g| (g - want).abs() <= tol);
        pass &= ok;
        let shown = got.map_or("missing".to_string(), |g| format!("{g:.3}"));
        parts.push(format!(
            "{f} {t} {shown} vs {want}+-{tol}{}",
            if ok { "" } else { " OUT" }
        ));
    }
    outcome(pass, parts.join(", "))
}

fn ordering(rows: &[BenchRow]) -> Outcome {
    let mut names: Vec<&str> = rows.iter().map(|r| r.file_name.as_str()).collect();
    names.dedup();
    let text: Vec<&str> = names.into_iter().filter(|n| !BINARY_FILES.contains(n)).collect();
    let ordered: Vec<&str> = text
        .iter()
        .copied()
        .filter(|f| {
            matches!(
                (bpc_of(rows, f, Transform::Idbe), bpc_of(rows, f, Transform::Star), bpc_of(rows, f, Transform::None)),
                (Some(i), Some(s), Some(n)) if i < s && s < n
            )
        })
        .collect();
    let share = ordered.len() as f64 / text.len().max(1) as f64;
    outcome(
        !text.is_empty() && share >= 0.6,
        format!(
            "{}/{} text files ({:.0}%): {ordered:?}",
            ordered.len(),
            text.len(),
            share * 100.0
        ),
    )
}

fn empirical_entropy(data: &[u8]) -> f64 {
    let mut counts = [0u64; 256];
    for &b in data {
        counts[b as usize] += 1;
    }
    let n = data.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn entropy_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 100_000;
    let mut pass = true;
    let mut parts = Vec::new();
    for symbols in [2u8, 4, 16] {
        let alphabet: Vec<u8> = (0..symbols).map(|j| 40 + 13 * j).collect();
        let data: Vec<u8> = (0..n).map(|_| *alphabet.choose(&mut rng).unwrap()).collect();
        let h = empirical_entropy(&data);
        let size = ari_encode(&data).len();
        let bound = n as f64 * h / 8.0 + 0.05 * n as f64 + 64.0;
        pass &= (size as f64) <= bound && ari_decode(&ari_encode(&data)).ok() == Some(data);
        parts.push(format!("H0={h:.3}: {size} <= {bound:.0}"));
    }
    outcome(pass, parts.join(", "))
}

fn secure_transfer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let large: Vec<Vec<u8>> = (0..100_000u32)
        .map(|i| (0..4).map(|d| b'a' + (i / 26u32.pow(d) % 26) as u8).collect())
        .collect();
    let dicts = [Vec::new(), vec![b"the".to_vec()], large];
    let key = SessionKey::new(rng.gen::<[u8; 32]>().to_vec()).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for words in dicts {
        let count = words.len();
        let dict = Dictionary::from_words(words).unwrap();
        let packed = match idbe::pack_dictionary(&dict, &key) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("pack of {count} words failed: {e}")),
        };
        let round = idbe::unpack_dictionary(&packed, &key).ok() == Some(dict);
        let rejected = |r: idbe::Result<Dictionary>| matches!(r, Err(e) if e.class() == ErrorClass::Authentication);
        let tamper_ok = (0..100)
            .filter(|_| {
                let mut bad = packed.clone();
                let bit = rng.gen_range(0..bad.len() * 8);
                bad[bit / 8] ^= 1 << (bit % 8);
                rejected(idbe::unpack_dictionary(&bad, &key))
            })
            .count();
        let wrong_ok = (0..20)
            .filter(|_| {
                let other = SessionKey::new(rng.gen::<[u8; 32]>().to_vec()).unwrap();
                rejected(idbe::unpack_dictionary(&packed, &other))
            })
            .count();
        pass &= round && tamper_ok == 100 && wrong_ok == 20;
        parts.push(format!(
            "{count} words: round trip {}, tamper {tamper_ok}/100, wrong key {wrong_ok}/20",
            if round { "ok" } else { "FAILED" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn english_mebibyte(files: &[CorpusFile]) -> Vec<u8> {
    const TARGET: usize = 1 << 20;
    let mut text: Vec<u8> = files
        .iter()
        .filter(|f| ["alice29.txt", "asyoulik.txt", "lcet10.txt", "plrabn12.txt"].contains(&f.name.as_str()))
        .flat_map(|f| f.data.iter().copied())
        .collect();
    if text.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let vocab: Vec<Vec<u8>> = (0..5000).map(|_| random_word(&mut rng)).collect();
        text = self::text(&mut rng, &vocab, TARGET);
    }
    text.iter().copied().cycle().take(TARGET).collect()
}

fn performance() -> Outcome {
    let files = benchmark::load_corpus(&corpus_dir()).unwrap_or_default();
    let data = english_mebibyte(&files);
    let start = Instant::now();
    let dict = build_dictionary(&build_lexicon(&[&data])).unwrap();
    let cfg = PipelineConfig::new(Transform::Idbe).with_dictionary_source(DictionarySource::Embedded);
    let packed = idbe::compress(&data, &cfg, Some(&dict)).unwrap();
    let restored = idbe::decompress(&packed, None).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        restored == data && secs <= 10.0,
        format!(
            "{} bytes -> {} bytes in {secs:.2}s (limit 10s)",
            data.len(),
            packed.len()
        ),
    )
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let rows = panic::catch_unwind(corpus_rows).unwrap_or_else(|_| Err("corpus run panicked".into()));
    let with_rows = |f: fn(&[BenchRow]) -> Outcome| match &rows {
        Ok(rows) => guarded(|| f(rows)),
        Err(e) => outcome(false, format!("corpus unavailable: {e}")),
    };

    let results = [
        (1, "round trips", true, guarded(round_trips)),
        (2, "BWT oracle equivalence", true, guarded(bwt_oracle)),
        (3, "Idbe beats None on text", true, with_rows(direction)),
        (4, "BPC magnitude", false, with_rows(magnitude)),
        (5, "Idbe < Star < None ordering", true, with_rows(ordering)),
        (6, "entropy coder bound", true, guarded(entropy_bound)),
        (7, "secure transfer", true, guarded(secure_transfer)),
        (8, "1 MiB Idbe performance", true, guarded(performance)),
    ];

    let mut gate = true;
    for (n, name, gating, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && !gating { " (non-gating)" } else { "" };
        println!("{tag} {n} {name}{note}: {}", o.detail);
        gate &= o.pass || !gating;
    }
    if gate {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
