//! Star encoding: the baseline word transform.
//!
//! Each dictionary word is replaced by a pattern of the same length made
//! mostly of `*`. Within a length group, words take patterns in rank order
//! from a fixed enumeration: all stars first, then patterns with one
//! letter, then two, and so on. Letter positions vary slowest, and letters
//! run `a..z` then `A..Z`.
//!
//! Source `*` bytes are written as `ESC *` and source `ESC` bytes as
//! `ESC ESC`, with `ESC` = 27.

use std::collections::HashMap;

use crate::dictionary::{Dictionary, RankedLexicon};
use crate::error::{Error, Result, Stage};
use crate::tokenizer::{self, is_letter, TokenKind};

pub const STAR: u8 = b'*';
pub const ESC: u8 = 27;

const LETTERS: &[u8; 52] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc holds C(n, i) before the update
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `index`-th star pattern of length `len`, or `None` once the
/// enumeration is exhausted.
pub fn pattern_at(len: usize, index: u128) -> Option<Vec<u8>> {
    let mut rest = index;
    for letters in 0..len {
        let combos = binomial(len, letters);
        let fills = 52u128.checked_pow(letters as u32);
        let block = fills.map_or(u128::MAX, |f| combos.saturating_mul(f));
        if rest >= block {
            rest -= block;
            continue;
        }
        let (mut combo, mut fill) = match fills {
            Some(f) => (rest / f, rest % f),
            None => (0, rest),
        };
        let mut pattern = vec![STAR; len];
        let mut positions = Vec::with_capacity(letters);
        let mut pos = 0;
        while positions.len() < letters {
            let remaining = letters - positions.len();
            let with_pos = binomial(len - pos - 1, remaining - 1);
            if combo < with_pos {
                positions.push(pos);
            } else {
                combo -= with_pos;
            }
            pos += 1;
        }
        for &p in positions.iter().rev() {
            pattern[p] = LETTERS[(fill % 52) as usize];
            fill /= 52;
        }
        return Some(pattern);
    }
    None
}

/// Word/pattern tables for star encoding.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StarDictionary {
    forward: HashMap<Vec<u8>, Vec<u8>>,
    reverse: HashMap<Vec<u8>, Vec<u8>>,
}

impl StarDictionary {
    /// Assign patterns to `words`, which must be in rank order.
    pub fn from_ranked_words<'a, I>(words: I) -> StarDictionary
    where
        I: IntoIterator<Item = &'a [u8]>,
    {
        let mut next_index: HashMap<usize, u128> = HashMap::new();
        let mut exhausted: HashMap<usize, bool> = HashMap::new();
        let mut sd = StarDictionary::default();
        for word in words {
            let len = word.len();
            if len == 0 || exhausted.get(&len).copied().unwrap_or(false) || sd.forward.contains_key(word) {
                continue;
            }
            let idx = next_index.entry(len).or_insert(0);
            match pattern_at(len, *idx) {
                Some(p) => {
                    *idx += 1;
                    sd.reverse.insert(p.clone(), word.to_vec());
                    sd.forward.insert(word.to_vec(), p);
                }
                None => {
                    exhausted.insert(len, true);
                }
            }
        }
        sd
    }

    pub fn pattern_of(&self, word: &[u8]) -> Option<&[u8]> {
        self.forward.get(word).map(Vec::as_slice)
    }

    pub fn word_of(&self, pattern: &[u8]) -> Option<&[u8]> {
        self.reverse.get(pattern).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

pub fn build_star_dictionary(lexicon: &RankedLexicon) -> StarDictionary {
    StarDictionary::from_ranked_words(lexicon.words())
}

impl From<&Dictionary> for StarDictionary {
    fn from(dict: &Dictionary) -> Self {
        StarDictionary::from_ranked_words(dict.words().iter().map(Vec::as_slice))
    }
}

pub fn star_encode(input: &[u8], sd: &StarDictionary) -> Vec<u8> {
    let mut out = Vec::with_capacity(input.len());
    for tok in tokenizer::tokens(input) {
        match tok.kind {
            TokenKind::Word => out.extend_from_slice(sd.pattern_of(tok.bytes).unwrap_or(tok.bytes)),
            TokenKind::Single => {
                let b = tok.bytes[0];
                if b == STAR || b == ESC {
                    out.push(ESC);
                }
                out.push(b);
            }
        }
    }
    out
}

pub fn star_decode(encoded: &[u8], sd: &StarDictionary) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(encoded.len());
    let mut i = 0;
    while i < encoded.len() {
        let b = encoded[i];
        if b == ESC {
            match encoded.get(i + 1) {
                Some(&e @ (STAR | ESC)) => out.push(e),
                Some(_) => return Err(Error::corrupt(Stage::Star, i + 1, "invalid escape sequence")),
                None => return Err(Error::corrupt(Stage::Star, i, "dangling escape byte")),
            }
            i += 2;
        } else if is_letter(b) || b == STAR {
            let run = encoded[i..].iter().take_while(|&&c| is_letter(c) || c == STAR).count();
            let token = &encoded[i..i + run];
            if token.contains(&STAR) {
                let word = sd
                    .word_of(token)
                    .ok_or_else(|| Error::corrupt(Stage::Star, i, "star pattern not in the dictionary"))?;
                out.extend_from_slice(word);
            } else {
                out.extend_from_slice(token);
            }
            i += run;
        } else {
            out.push(b);
            i += 1;
        }
    }
    Ok(out)
}
