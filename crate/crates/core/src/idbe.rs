//! The dictionary word-replacement transform and its inverse.
//!
//! A dictionary word of two or more letters becomes a length marker
//! (`251..=254` for codes of 1..=4 bytes) followed by its codeword. A single
//! space after a coded word is dropped; any other following byte is
//! preceded by [`NO_SPACE`]. Literal bytes `251..=255` are written twice.
//!
//! Decoding relies on run parity. Literal marker bytes always come in pairs,
//! so an odd run of a length marker ends in a real marker, and an odd run of
//! `0xFF` directly after a coded word carries one no-space flag.
//!
//! A coded word at the very end of the input is followed by nothing, and the
//! decoder adds no space there. For that reason a space that is the last
//! input byte is never elided.

use crate::dictionary::{is_code_byte, CodeWord, Dictionary, MIN_WORD_LEN};
use crate::error::{Error, Result, Stage};
use crate::tokenizer::{self, TokenKind};

/// Marker for a one-byte code; `FIRST_LEN_MARKER + k - 1` marks a `k`-byte code.
pub const FIRST_LEN_MARKER: u8 = 251;
pub const LAST_LEN_MARKER: u8 = 254;
/// Flags a coded word that is not followed by a space.
pub const NO_SPACE: u8 = 255;

#[inline]
fn is_len_marker(b: u8) -> bool {
    (FIRST_LEN_MARKER..=LAST_LEN_MARKER).contains(&b)
}

#[inline]
fn needs_escape(b: u8) -> bool {
    b >= FIRST_LEN_MARKER
}

/// Replace dictionary words in `input` by marker-prefixed codewords.
pub fn encode(input: &[u8], dict: &Dictionary) -> Vec<u8> {
    let mut out = Vec::with_capacity(input.len());
    let mut toks = tokenizer::tokens(input).peekable();
    let mut consumed = 0usize;
    while let Some(tok) = toks.next() {
        consumed += tok.bytes.len();
        match tok.kind {
            TokenKind::Word => {
                let code = if tok.bytes.len() >= MIN_WORD_LEN {
                    dict.code_of(tok.bytes)
                } else {
                    None
                };
                let Some(code) = code else {
                    out.extend_from_slice(tok.bytes);
                    continue;
                };
                out.push(FIRST_LEN_MARKER - 1 + code.len() as u8);
                out.extend_from_slice(code.as_bytes());
                match toks.peek() {
                    None => {}
                    Some(next) if next.bytes == b" " && consumed + 1 < input.len() => {
                        toks.next();
                        consumed += 1;
                    }
                    Some(_) => out.push(NO_SPACE),
                }
            }
            TokenKind::Single => {
                let b = tok.bytes[0];
                out.push(b);
                if needs_escape(b) {
                    out.push(b);
                }
            }
        }
    }
    out
}

fn run_length(data: &[u8], start: usize) -> usize {
    let b = data[start];
    data[start..].iter().take_while(|&&x| x == b).count()
}

/// Invert [`encode`] under the same dictionary.
pub fn decode(encoded: &[u8], dict: &Dictionary) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(encoded.len() + encoded.len() / 2);
    let mut i = 0;
    while i < encoded.len() {
        let b = encoded[i];
        if is_len_marker(b) {
            let run = run_length(encoded, i);
            out.extend(std::iter::repeat_n(b, run / 2));
            i += run;
            if run.is_multiple_of(2) {
                continue;
            }
            let len = usize::from(b - (FIRST_LEN_MARKER - 1));
            let code_bytes = encoded
                .get(i..i + len)
                .ok_or_else(|| Error::corrupt(Stage::Idbe, encoded.len(), "stream ends inside a codeword"))?;
            if let Some(bad) = code_bytes.iter().position(|&c| !is_code_byte(c)) {
                return Err(Error::corrupt(
                    Stage::Idbe,
                    i + bad,
                    "byte outside the code alphabet after a length marker",
                ));
            }
            let code = CodeWord::from_bytes(code_bytes).expect("validated above");
            let word = dict
                .word_of(&code)
                .ok_or_else(|| Error::corrupt(Stage::Idbe, i, "codeword not present in the dictionary"))?;
            out.extend_from_slice(word);
            i += len;
            if i == encoded.len() {
                break;
            }
            let flags = if encoded[i] == NO_SPACE {
                run_length(encoded, i)
            } else {
                0
            };
            if flags % 2 == 0 {
                out.push(b' ');
            }
            out.extend(std::iter::repeat_n(NO_SPACE, flags / 2));
            i += flags;
        } else if b == NO_SPACE {
            let run = run_length(encoded, i);
            if run % 2 == 1 {
                return Err(Error::corrupt(
                    Stage::Idbe,
                    i + run - 1,
                    "unpaired 0xFF outside a coded-word suffix",
                ));
            }
            out.extend(std::iter::repeat_n(NO_SPACE, run / 2));
            i += run;
        } else {
            out.push(b);
            i += 1;
        }
    }
    Ok(out)
}
