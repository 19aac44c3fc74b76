//! Lexical front-end shared by the dictionary builder and both word transforms.
//!
//! A byte stream is split into maximal runs of ASCII letters (`Word`) and
//! single non-letter bytes (`Single`). Concatenating the token bytes gives
//! back the input exactly.

/// Kind of a lexical token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Single,
}

/// A borrowed slice of the input, tagged with its kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub bytes: &'a [u8],
}

impl<'a> Token<'a> {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    /// The byte of a `Single` token.
    pub fn byte(&self) -> Option<u8> {
        match self.kind {
            TokenKind::Single => Some(self.bytes[0]),
            TokenKind::Word => None,
        }
    }
}

#[inline]
pub fn is_letter(b: u8) -> bool {
    b.is_ascii_alphabetic()
}

/// Iterator over the tokens of a byte slice. Linear in the input length.
#[derive(Debug, Clone)]
pub struct Tokens<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Iterator for Tokens<'a> {
    type Item = Token<'a>;

    fn next(&mut self) -> Option<Token<'a>> {
        let rest = &self.input[self.pos..];
        let first = *rest.first()?;
        if !is_letter(first) {
            self.pos += 1;
            return Some(Token {
                kind: TokenKind::Single,
                bytes: &rest[..1],
            });
        }
        let len = rest.iter().position(|&b| !is_letter(b)).unwrap_or(rest.len());
        self.pos += len;
        Some(Token {
            kind: TokenKind::Word,
            bytes: &rest[..len],
        })
    }
}

/// Lazily tokenize `input`.
pub fn tokens(input: &[u8]) -> Tokens<'_> {
    Tokens { input, pos: 0 }
}

/// Tokenize `input` into a vector.
pub fn tokenize(input: &[u8]) -> Vec<Token<'_>> {
    tokens(input).collect()
}
