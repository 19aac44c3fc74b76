use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Decoding stage that rejected a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Idbe,
    Star,
    Bwt,
    Rle,
    Ari,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Idbe => "idbe",
            Stage::Star => "star",
            Stage::Bwt => "bwt",
            Stage::Rle => "rle",
            Stage::Ari => "ari",
        })
    }
}

/// Broad classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Io,
    Format,
    Authentication,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dictionary overflow: rank {rank} exceeds the four-byte code space")]
    DictionaryOverflow { rank: u64 },

    #[error("malformed dictionary: {0}")]
    MalformedDictionary(String),

    #[error("unsupported dictionary version {0:?}")]
    UnsupportedDictionaryVersion(String),

    #[error("duplicate dictionary word {0:?}")]
    DuplicateWord(String),

    #[error("illegal byte 0x{byte:02x} in dictionary word on line {line}")]
    IllegalWordByte { line: usize, byte: u8 },

    #[error("corrupt {stage} stream at byte {offset}: {reason}")]
    CorruptStream {
        stage: Stage,
        offset: usize,
        reason: &'static str,
    },

    #[error("primary index {index} out of range for a block of {len} bytes")]
    PrimaryIndexOutOfRange { index: usize, len: usize },

    #[error("cannot transform an empty block")]
    EmptyBlock,

    #[error("transform requires a dictionary but none was supplied")]
    DictionaryMissing,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("corrupt container: {0}")]
    CorruptContainer(String),

    #[error("block {index}: {source}")]
    Block {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("fragment of {len} bytes exceeds the {max}-byte limit")]
    FragmentTooLarge { len: usize, max: usize },

    #[error("session key must be at least {min} bytes")]
    WeakKey { min: usize },

    #[error("authentication failed for frame {sequence}")]
    Authentication { sequence: u32 },

    #[error("frame {sequence} rejected: {reason}")]
    BadFrame { sequence: u32, reason: String },

    #[error("frame sequence gap: expected {expected}, found {found}")]
    SequenceGap { expected: u32, found: u32 },

    #[error("original size must be non-zero")]
    ZeroLength,

    #[error("round trip mismatch for {file} with transform {transform}")]
    RoundTripMismatch { file: String, transform: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn corrupt(stage: Stage, offset: usize, reason: &'static str) -> Self {
        Error::CorruptStream { stage, offset, reason }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) => ErrorClass::Io,
            Error::InvalidConfig(_) | Error::WeakKey { .. } => ErrorClass::Usage,
            Error::Authentication { .. } => ErrorClass::Authentication,
            Error::Block { source, .. } => source.class(),
            _ => ErrorClass::Format,
        }
    }
}
