//! Dictionary-based text transforms in front of a block-sorting compressor.
//!
//! The crate provides:
//!
//! * [`dictionary`]: frequency-ranked word dictionaries with 1 to 4 byte codes
//! * [`idbe`]: the word-to-code transform with length markers and space elision
//! * [`star`]: the star-encoding baseline transform
//! * [`backend`]: BWT, move-to-front and run-length stages
//! * [`entropy`]: an adaptive order-0 arithmetic coder
//! * [`pipeline`]: the container format tying the stages together
//! * [`transfer`]: authenticated, encrypted dictionary transfer frames
//! * [`benchmark`]: corpus runs reporting bits per character
//!
//! With the default `parallel` feature, independent blocks, frames and
//! corpus files are processed on the rayon pool. Building without it gives
//! the same output bytes from a single thread.

pub mod backend;
pub mod benchmark;
pub mod dictionary;
pub mod entropy;
pub mod error;
pub mod exec;
pub mod idbe;
pub mod pipeline;
pub mod star;
pub mod tokenizer;
pub mod transfer;

pub use dictionary::{build_dictionary, build_lexicon, code_for_rank, CodeWord, Dictionary, RankedLexicon};
pub use error::{Error, ErrorClass, Result};
pub use exec::Execution;
pub use pipeline::{bpc, compress, decompress, DictionarySource, PipelineConfig, Transform};
pub use transfer::{pack_dictionary, unpack_dictionary, SessionKey};
