//! Frequency-ranked word dictionary and its codeword assignment.
//!
//! Words are counted over a set of training inputs, sorted by descending
//! frequency (ties: byte-wise ascending), and rank `i` receives the `i`-th
//! codeword of the sequence `[33]..[250]`, `[33,33]..[250,250]`, ... up to
//! four bytes. Codes are a pure function of rank, so the on-disk format
//! stores only the words in rank order.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::tokenizer::{self, TokenKind};

/// First byte value of the code alphabet.
pub const CODE_BASE: u8 = 33;
/// Last byte value of the code alphabet.
pub const CODE_LAST: u8 = 250;
/// Size of the code alphabet.
pub const CODE_RADIX: u64 = (CODE_LAST - CODE_BASE) as u64 + 1;
/// Longest codeword.
pub const MAX_CODE_LEN: usize = 4;
/// Shortest word that is worth a dictionary slot.
pub const MIN_WORD_LEN: usize = 2;

const HEADER: &str = "IDBEDICT";
const VERSION: &str = "1";

/// Number of ranks that receive a code of exactly `len` bytes.
const fn band_size(len: usize) -> u64 {
    let mut size = 1;
    let mut i = 0;
    while i < len {
        size *= CODE_RADIX;
        i += 1;
    }
    size
}

/// Total number of distinct codewords.
pub const CODE_CAPACITY: u64 = band_size(1) + band_size(2) + band_size(3) + band_size(4);

#[inline]
pub fn is_code_byte(b: u8) -> bool {
    (CODE_BASE..=CODE_LAST).contains(&b)
}

/// A codeword of 1 to 4 bytes, each in `33..=250`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeWord {
    bytes: [u8; MAX_CODE_LEN],
    len: u8,
}

impl CodeWord {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Build a codeword from raw bytes, validating length and alphabet.
    pub fn from_bytes(bytes: &[u8]) -> Option<CodeWord> {
        if bytes.is_empty() || bytes.len() > MAX_CODE_LEN || !bytes.iter().all(|&b| is_code_byte(b)) {
            return None;
        }
        let mut code = CodeWord {
            bytes: [0; MAX_CODE_LEN],
            len: bytes.len() as u8,
        };
        code.bytes[..bytes.len()].copy_from_slice(bytes);
        Some(code)
    }
}

impl fmt::Debug for CodeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CodeWord({:?})", self.as_bytes())
    }
}

/// Codeword assigned to the zero-based `rank`.
pub fn code_for_rank(rank: u64) -> Result<CodeWord> {
    let mut offset = rank;
    for len in 1..=MAX_CODE_LEN {
        let band = band_size(len);
        if offset < band {
            let mut code = CodeWord {
                bytes: [0; MAX_CODE_LEN],
                len: len as u8,
            };
            let mut q = offset;
            for slot in code.bytes[..len].iter_mut().rev() {
                *slot = CODE_BASE + (q % CODE_RADIX) as u8;
                q /= CODE_RADIX;
            }
            return Ok(code);
        }
        offset -= band;
    }
    Err(Error::DictionaryOverflow { rank })
}

/// Inverse of [`code_for_rank`].
pub fn rank_for_code(code: &CodeWord) -> u64 {
    let len = code.len();
    let preceding: u64 = (1..len).map(band_size).sum();
    let offset = code
        .as_bytes()
        .iter()
        .fold(0u64, |acc, &b| acc * CODE_RADIX + u64::from(b - CODE_BASE));
    preceding + offset
}

/// Words with their occurrence counts, most frequent first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankedLexicon {
    entries: Vec<(Vec<u8>, u64)>,
}

impl RankedLexicon {
    pub fn entries(&self) -> &[(Vec<u8>, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &[u8]> {
        self.entries.iter().map(|(w, _)| w.as_slice())
    }
}

fn count_words(input: &[u8]) -> HashMap<&[u8], u64> {
    let mut counts: HashMap<&[u8], u64> = HashMap::new();
    for tok in tokenizer::tokens(input) {
        if tok.kind == TokenKind::Word && tok.bytes.len() >= MIN_WORD_LEN {
            *counts.entry(tok.bytes).or_insert(0) += 1;
        }
    }
    counts
}

/// Count every word of at least two letters across `training` and rank them.
pub fn build_lexicon<T: AsRef<[u8]> + Sync>(training: &[T]) -> RankedLexicon {
    build_lexicon_with(training, Execution::default())
}

pub fn build_lexicon_with<T: AsRef<[u8]> + Sync>(training: &[T], exec: Execution) -> RankedLexicon {
    let per_input = exec::map(exec, training, |t| count_words(t.as_ref()));
    let mut merged: HashMap<&[u8], u64> = HashMap::new();
    for counts in per_input {
        for (word, n) in counts {
            *merged.entry(word).or_insert(0) += n;
        }
    }
    let mut entries: Vec<(Vec<u8>, u64)> = merged.into_iter().map(|(w, n)| (w.to_vec(), n)).collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    RankedLexicon { entries }
}

/// Bijective word/codeword table.
#[derive(Clone, Default)]
pub struct Dictionary {
    words: Vec<Vec<u8>>,
    ranks: HashMap<Vec<u8>, u32>,
}

impl PartialEq for Dictionary {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words
    }
}

impl Eq for Dictionary {}

impl fmt::Debug for Dictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dictionary")
            .field("len", &self.words.len())
            .field(
                "head",
                &self
                    .words
                    .iter()
                    .take(8)
                    .map(|w| String::from_utf8_lossy(w))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

fn check_word(word: &[u8], line: usize) -> Result<()> {
    if let Some(&byte) = word.iter().find(|&&b| !tokenizer::is_letter(b)) {
        return Err(Error::IllegalWordByte { line, byte });
    }
    if word.len() < MIN_WORD_LEN {
        return Err(Error::MalformedDictionary(format!(
            "word on line {line} is shorter than {MIN_WORD_LEN} letters"
        )));
    }
    Ok(())
}

impl Dictionary {
    /// Build from words already in rank order.
    pub fn from_words(words: Vec<Vec<u8>>) -> Result<Dictionary> {
        if words.len() as u64 > CODE_CAPACITY {
            return Err(Error::DictionaryOverflow { rank: CODE_CAPACITY });
        }
        let mut ranks = HashMap::with_capacity(words.len());
        for (rank, word) in words.iter().enumerate() {
            // header and count occupy the first two lines of the file form
            check_word(word, rank + 3)?;
            if ranks.insert(word.clone(), rank as u32).is_some() {
                return Err(Error::DuplicateWord(String::from_utf8_lossy(word).into_owned()));
            }
        }
        Ok(Dictionary { words, ranks })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words in rank order.
    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn rank_of(&self, word: &[u8]) -> Option<usize> {
        self.ranks.get(word).map(|&r| r as usize)
    }

    /// Forward lookup: word to codeword.
    pub fn code_of(&self, word: &[u8]) -> Option<CodeWord> {
        let rank = self.rank_of(word)?;
        Some(code_for_rank(rank as u64).expect("dictionary size checked at construction"))
    }

    /// Reverse lookup: codeword to word.
    pub fn word_of(&self, code: &CodeWord) -> Option<&[u8]> {
        let rank = usize::try_from(rank_for_code(code)).ok()?;
        self.words.get(rank).map(Vec::as_slice)
    }

    /// Textual dictionary file: header line, count line, one word per line.
    pub fn serialize(&self) -> Vec<u8> {
        let body: usize = self.words.iter().map(|w| w.len() + 1).sum();
        let mut out = Vec::with_capacity(body + 32);
        out.extend_from_slice(format!("{HEADER} {VERSION}\n{}\n", self.words.len()).as_bytes());
        for w in &self.words {
            out.extend_from_slice(w);
            out.push(b'\n');
        }
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Dictionary> {
        let mut lines = bytes.split(|&b| b == b'\n');
        let header = lines
            .next()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| Error::MalformedDictionary("missing header".into()))?;
        let header =
            std::str::from_utf8(header).map_err(|_| Error::MalformedDictionary("header is not ASCII".into()))?;
        match header.split_once(' ') {
            Some((HEADER, VERSION)) => {}
            Some((HEADER, v)) => return Err(Error::UnsupportedDictionaryVersion(v.to_string())),
            _ => return Err(Error::MalformedDictionary(format!("bad header {header:?}"))),
        }
        let count: u64 = lines
            .next()
            .and_then(|l| std::str::from_utf8(l).ok())
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedDictionary("missing or invalid word count".into()))?;
        if count > CODE_CAPACITY {
            return Err(Error::DictionaryOverflow { rank: count });
        }
        let mut words = Vec::with_capacity(count.min(1 << 20) as usize);
        for _ in 0..count {
            match lines.next() {
                Some(l) if !l.is_empty() => words.push(l.to_vec()),
                _ => {
                    return Err(Error::MalformedDictionary(format!(
                        "expected {count} words, found {}",
                        words.len()
                    )))
                }
            }
        }
        // The final newline leaves exactly one empty trailing piece.
        match (lines.next(), lines.next()) {
            (Some([]), None) => {}
            _ => return Err(Error::MalformedDictionary("trailing data after word list".into())),
        }
        Dictionary::from_words(words)
    }
}

/// Assign codes to a ranked lexicon.
pub fn build_dictionary(lexicon: &RankedLexicon) -> Result<Dictionary> {
    Dictionary::from_words(lexicon.words().map(<[u8]>::to_vec).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    /// Enumerate codewords in order by counting in base 218 per band.
    fn enumerate_codes(limit: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        'bands: for len in 1..=4usize {
            let mut digits = vec![CODE_BASE; len];
            loop {
                if out.len() == limit {
                    break 'bands;
                }
                out.push(digits.clone());
                let mut i = len;
                loop {
                    if i == 0 {
                        continue 'bands;
                    }
                    i -= 1;
                    if digits[i] < CODE_LAST {
                        digits[i] += 1;
                        break;
                    }
                    digits[i] = CODE_BASE;
                }
            }
        }
        out
    }

    fn lex(pairs: &[(&str, u64)]) -> Vec<(Vec<u8>, u64)> {
        pairs.iter().map(|(w, n)| (w.as_bytes().to_vec(), *n)).collect()
    }

    #[test]
    fn lexicon_counts_and_ranks() {
        let l = build_lexicon(&[b"aa bb bb cc cc cc"]);
        assert_eq!(l.entries(), lex(&[("cc", 3), ("bb", 2), ("aa", 1)]).as_slice());
    }

    #[test]
    fn lexicon_ties_are_lexicographic() {
        let l = build_lexicon(&[b"yy xx yy xx"]);
        assert_eq!(l.entries(), lex(&[("xx", 2), ("yy", 2)]).as_slice());
    }

    #[test]
    fn lexicon_of_empty_input() {
        assert!(build_lexicon(&[b""]).is_empty());
    }

    #[test]
    fn lexicon_skips_single_letters_and_merges_inputs() {
        let l = build_lexicon(&["a an I", "an"]);
        assert_eq!(l.entries(), lex(&[("an", 2)]).as_slice());
    }

    #[test]
    fn code_examples() {
        assert_eq!(code_for_rank(0).unwrap().as_bytes(), &[33]);
        assert_eq!(code_for_rank(217).unwrap().as_bytes(), &[250]);
        assert_eq!(code_for_rank(218).unwrap().as_bytes(), &[33, 33]);
        assert_eq!(code_for_rank(219).unwrap().as_bytes(), &[33, 34]);
        assert_eq!(code_for_rank(47742).unwrap().as_bytes(), &[33, 33, 33]);
    }

    #[test]
    fn codes_match_enumeration_oracle() {
        let oracle = enumerate_codes(60_000);
        for (rank, expected) in oracle.iter().enumerate() {
            assert_eq!(
                code_for_rank(rank as u64).unwrap().as_bytes(),
                expected.as_slice(),
                "rank {rank}"
            );
        }
    }

    #[test]
    fn band_boundaries() {
        let b1 = 218u64;
        let b2 = b1 + 218 * 218;
        let b3 = b2 + 218 * 218 * 218;
        for (rank, len) in [
            (b1 - 1, 1),
            (b1, 2),
            (b2 - 1, 2),
            (b2, 3),
            (b3 - 1, 3),
            (b3, 4),
            (CODE_CAPACITY - 1, 4),
        ] {
            assert_eq!(code_for_rank(rank).unwrap().len(), len, "rank {rank}");
        }
        assert_eq!(
            code_for_rank(CODE_CAPACITY - 1).unwrap().as_bytes(),
            &[250, 250, 250, 250]
        );
        assert!(matches!(
            code_for_rank(CODE_CAPACITY),
            Err(Error::DictionaryOverflow { .. })
        ));
    }

    #[test]
    fn codes_are_injective_and_monotone_in_length() {
        let mut seen = HashSet::new();
        let mut last_len = 0;
        for rank in 0..100_000u64 {
            let code = code_for_rank(rank).unwrap();
            assert!(code.len() >= last_len);
            last_len = code.len();
            assert!(seen.insert(code), "collision at rank {rank}");
            assert_eq!(rank_for_code(&code), rank);
        }
    }

    #[test]
    fn dictionary_assigns_codes_by_rank() {
        let l = build_lexicon(&[b"aa bb bb cc cc cc"]);
        let d = build_dictionary(&l).unwrap();
        assert_eq!(d.code_of(b"cc").unwrap().as_bytes(), &[33]);
        assert_eq!(d.code_of(b"bb").unwrap().as_bytes(), &[34]);
        assert_eq!(d.code_of(b"aa").unwrap().as_bytes(), &[35]);
        assert_eq!(d.word_of(&CodeWord::from_bytes(&[34]).unwrap()), Some(&b"bb"[..]));
        assert_eq!(d.word_of(&CodeWord::from_bytes(&[36]).unwrap()), None);
    }

    #[test]
    fn empty_dictionary() {
        let d = build_dictionary(&RankedLexicon::default()).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn band_boundary_entry() {
        let words: Vec<Vec<u8>> = (0..219u32).map(|i| format!("w{}", letters(i)).into_bytes()).collect();
        let d = Dictionary::from_words(words.clone()).unwrap();
        assert_eq!(d.code_of(&words[218]).unwrap().as_bytes(), &[33, 33]);
        for (i, w) in words.iter().enumerate() {
            assert_eq!(d.code_of(w).unwrap(), code_for_rank(i as u64).unwrap());
        }
    }

    fn letters(mut i: u32) -> String {
        let mut s = String::new();
        loop {
            s.push((b'a' + (i % 26) as u8) as char);
            i /= 26;
            if i == 0 {
                return s;
            }
        }
    }

    #[test]
    fn serialize_format() {
        let d = Dictionary::from_words(vec![b"cc".to_vec(), b"bb".to_vec(), b"aa".to_vec()]).unwrap();
        assert_eq!(d.serialize(), b"IDBEDICT 1\n3\ncc\nbb\naa\n");
        assert_eq!(Dictionary::parse(&d.serialize()).unwrap(), d);
    }

    #[test]
    fn parse_errors() {
        assert!(
            matches!(Dictionary::parse(b"IDBEDICT 2\n0\n"), Err(Error::UnsupportedDictionaryVersion(v)) if v == "2")
        );
        assert!(matches!(
            Dictionary::parse(b"NOTADICT 1\n0\n"),
            Err(Error::MalformedDictionary(_))
        ));
        assert!(matches!(Dictionary::parse(b""), Err(Error::MalformedDictionary(_))));
        assert!(matches!(
            Dictionary::parse(b"IDBEDICT 1\nx\n"),
            Err(Error::MalformedDictionary(_))
        ));
        assert!(matches!(
            Dictionary::parse(b"IDBEDICT 1\n2\nab\nab\n"),
            Err(Error::DuplicateWord(_))
        ));
        assert!(matches!(
            Dictionary::parse(b"IDBEDICT 1\n1\na1\n"),
            Err(Error::IllegalWordByte { line: 3, byte: b'1' })
        ));
        assert!(matches!(
            Dictionary::parse(b"IDBEDICT 1\n2\nab\n"),
            Err(Error::MalformedDictionary(_))
        ));
        assert!(matches!(
            Dictionary::parse(b"IDBEDICT 1\n1\nab\ncd\n"),
            Err(Error::MalformedDictionary(_))
        ));
        assert!(matches!(
            Dictionary::parse(b"IDBEDICT 1\n1\nab"),
            Err(Error::MalformedDictionary(_))
        ));
        assert!(matches!(
            Dictionary::parse(b"IDBEDICT 1\n1\na\n"),
            Err(Error::MalformedDictionary(_))
        ));
        assert!(Dictionary::parse(b"IDBEDICT 1\n0\n").unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(words in proptest::collection::hash_set("[a-zA-Z]{2,12}", 0..200)) {
            let d = Dictionary::from_words(words.into_iter().map(String::into_bytes).collect()).unwrap();
            prop_assert_eq!(Dictionary::parse(&d.serialize()).unwrap(), d);
        }

        #[test]
        fn lexicon_frequencies_non_increasing(text in "[a-d ]{0,400}") {
            let l = build_lexicon(&[text.as_bytes()]);
            for pair in l.entries().windows(2) {
                prop_assert!(pair[0].1 > pair[1].1 || (pair[0].1 == pair[1].1 && pair[0].0 < pair[1].0));
            }
        }
    }
}
