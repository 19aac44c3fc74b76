//! Transform plus block backend, framed in a container.
//!
//! Compression applies the word transform to the whole input, cuts the
//! result into blocks, and codes each block as
//! `ari(rle(mtf(bwt(block).last_column)))`.
//!
//! Container layout, all integers big-endian:
//!
//! ```text
//! "BWT1" | version u8 = 1 | transform u8 | block_size u32 | dict_flag u8
//!        | [dict_len u32 | dict bytes]   (only when dict_flag = 1)
//!        | block_count u32
//! block  = raw_len u32 | primary_index u32 | payload_len u32 | payload
//! ```

use std::fmt;
use std::str::FromStr;

use crate::backend::{bwt_forward, bwt_inverse, mtf_decode, mtf_encode, rle_decode, rle_encode, BwtBlock};
use crate::dictionary::Dictionary;
use crate::entropy::{ari_decode, ari_encode};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::{idbe, star};

pub const MAGIC: &[u8; 4] = b"BWT1";
pub const FORMAT_VERSION: u8 = 1;
pub const DEFAULT_BLOCK_SIZE: usize = 900 * 1024;
pub const MIN_BLOCK_SIZE: usize = 1024;
pub const MAX_BLOCK_SIZE: usize = 16 * 1024 * 1024;

const BLOCK_HEADER_LEN: usize = 12;

/// Word transform applied before the backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transform {
    None,
    Star,
    Idbe,
}

impl Transform {
    pub const ALL: [Transform; 3] = [Transform::None, Transform::Star, Transform::Idbe];

    pub fn code(self) -> u8 {
        match self {
            Transform::None => 0,
            Transform::Star => 1,
            Transform::Idbe => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Transform> {
        match code {
            0 => Some(Transform::None),
            1 => Some(Transform::Star),
            2 => Some(Transform::Idbe),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Transform::None => "none",
            Transform::Star => "star",
            Transform::Idbe => "idbe",
        }
    }

    pub fn needs_dictionary(self) -> bool {
        self != Transform::None
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Transform::None),
            "star" => Ok(Transform::Star),
            "idbe" => Ok(Transform::Idbe),
            other => Err(Error::InvalidConfig(format!("unknown transform {other:?}"))),
        }
    }
}

/// Where the decoder will find the dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictionarySource {
    /// Stored inside the container.
    Embedded,
    /// Supplied separately at decompression time.
    External,
    NotNeeded,
}

impl DictionarySource {
    fn flag(self) -> u8 {
        match self {
            DictionarySource::External => 0,
            DictionarySource::Embedded => 1,
            DictionarySource::NotNeeded => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub transform: Transform,
    pub block_size: usize,
    pub dictionary_source: DictionarySource,
    pub execution: Execution,
}

impl PipelineConfig {
    /// Defaults: 900 KiB blocks, embedded dictionary when one is needed.
    pub fn new(transform: Transform) -> Self {
        PipelineConfig {
            transform,
            block_size: DEFAULT_BLOCK_SIZE,
            dictionary_source: if transform.needs_dictionary() {
                DictionarySource::Embedded
            } else {
                DictionarySource::NotNeeded
            },
            execution: Execution::default(),
        }
    }

    pub fn with_block_size(mut self, block_size: usize) -> Self {
        self.block_size = block_size;
        self
    }

    pub fn with_dictionary_source(mut self, source: DictionarySource) -> Self {
        self.dictionary_source = source;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_BLOCK_SIZE..=MAX_BLOCK_SIZE).contains(&self.block_size) {
            return Err(Error::InvalidConfig(format!(
                "block size {} outside {MIN_BLOCK_SIZE}..={MAX_BLOCK_SIZE}",
                self.block_size
            )));
        }
        if self.transform.needs_dictionary() && self.dictionary_source == DictionarySource::NotNeeded {
            return Err(Error::InvalidConfig(format!(
                "transform {} needs an embedded or external dictionary",
                self.transform
            )));
        }
        Ok(())
    }
}

/// Parsed container header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerHeader {
    pub transform: Transform,
    pub block_size: u32,
    pub dict_flag: u8,
    pub embedded_dictionary: Option<Vec<u8>>,
    pub block_count: u32,
}

impl ContainerHeader {
    pub fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(MAGIC);
        out.push(FORMAT_VERSION);
        out.push(self.transform.code());
        out.extend_from_slice(&self.block_size.to_be_bytes());
        out.push(self.dict_flag);
        if let Some(d) = &self.embedded_dictionary {
            out.extend_from_slice(&(d.len() as u32).to_be_bytes());
            out.extend_from_slice(d);
        }
        out.extend_from_slice(&self.block_count.to_be_bytes());
    }

    /// Parse a header, returning it and the offset of the first block.
    pub fn read(data: &[u8]) -> Result<(ContainerHeader, usize)> {
        let mut r = Reader::new(data);
        if r.take(4)
            .map_err(|_| Error::CorruptContainer("too short for a header".into()))?
            != MAGIC
        {
            return Err(Error::CorruptContainer("bad magic".into()));
        }
        let version = r.u8()?;
        if version != FORMAT_VERSION {
            return Err(Error::CorruptContainer(format!("unsupported version {version}")));
        }
        let transform_code = r.u8()?;
        let transform = Transform::from_code(transform_code)
            .ok_or_else(|| Error::CorruptContainer(format!("unknown transform code {transform_code}")))?;
        let block_size = r.u32()?;
        if !(MIN_BLOCK_SIZE..=MAX_BLOCK_SIZE).contains(&(block_size as usize)) {
            return Err(Error::CorruptContainer(format!("block size {block_size} out of range")));
        }
        let dict_flag = r.u8()?;
        let embedded_dictionary = match (dict_flag, transform.needs_dictionary()) {
            (0, true) => None,
            (1, true) => {
                let len = r.u32()? as usize;
                Some(r.take(len)?.to_vec())
            }
            (2, false) => None,
            _ => {
                return Err(Error::CorruptContainer(format!(
                    "dictionary flag {dict_flag} invalid for transform {transform}"
                )))
            }
        };
        let block_count = r.u32()?;
        Ok((
            ContainerHeader {
                transform,
                block_size,
                dict_flag,
                embedded_dictionary,
                block_count,
            },
            r.pos,
        ))
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Reader { data, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| Error::CorruptContainer(format!("truncated: need {n} bytes at offset {}", self.pos)))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

fn apply_transform(input: &[u8], transform: Transform, dict: Option<&Dictionary>) -> Result<Vec<u8>> {
    match transform {
        Transform::None => Ok(input.to_vec()),
        Transform::Idbe => Ok(idbe::encode(input, dict.ok_or(Error::DictionaryMissing)?)),
        Transform::Star => {
            let sd = star::StarDictionary::from(dict.ok_or(Error::DictionaryMissing)?);
            Ok(star::star_encode(input, &sd))
        }
    }
}

fn invert_transform(data: Vec<u8>, transform: Transform, dict: Option<&Dictionary>) -> Result<Vec<u8>> {
    match transform {
        Transform::None => Ok(data),
        Transform::Idbe => idbe::decode(&data, dict.ok_or(Error::DictionaryMissing)?),
        Transform::Star => {
            let sd = star::StarDictionary::from(dict.ok_or(Error::DictionaryMissing)?);
            star::star_decode(&data, &sd)
        }
    }
}

/// Backend coding of one block: `(primary_index, payload)`.
pub fn encode_block(block: &[u8]) -> Result<(usize, Vec<u8>)> {
    let bwt = bwt_forward(block)?;
    let payload = ari_encode(&rle_encode(&mtf_encode(&bwt.last_column)));
    Ok((bwt.primary_index, payload))
}

/// Inverse of [`encode_block`].
pub fn decode_block(raw_len: usize, primary_index: usize, payload: &[u8]) -> Result<Vec<u8>> {
    let rle = ari_decode(payload)?;
    let last_column = mtf_decode(&rle_decode(&rle)?);
    if last_column.len() != raw_len {
        return Err(Error::CorruptContainer(format!(
            "block decodes to {} bytes, header says {raw_len}",
            last_column.len()
        )));
    }
    bwt_inverse(&BwtBlock {
        last_column,
        primary_index,
    })
}

fn block_error(index: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::Block {
        index,
        source: Box::new(e),
    }
}

/// Compress `input` into a container.
pub fn compress(input: &[u8], cfg: &PipelineConfig, dict: Option<&Dictionary>) -> Result<Vec<u8>> {
    cfg.validate()?;
    if cfg.transform.needs_dictionary() && dict.is_none() {
        return Err(Error::DictionaryMissing);
    }
    let transformed = apply_transform(input, cfg.transform, dict)?;
    let blocks: Vec<&[u8]> = transformed.chunks(cfg.block_size).collect();
    let coded = exec::try_map(cfg.execution, &blocks, |i, block| {
        encode_block(block).map_err(block_error(i))
    })?;

    let (dict_flag, embedded_dictionary) = if cfg.transform.needs_dictionary() {
        let serialized = match cfg.dictionary_source {
            DictionarySource::Embedded => dict.map(Dictionary::serialize),
            _ => None,
        };
        (cfg.dictionary_source.flag(), serialized)
    } else {
        (DictionarySource::NotNeeded.flag(), None)
    };
    let header = ContainerHeader {
        transform: cfg.transform,
        block_size: cfg.block_size as u32,
        dict_flag,
        embedded_dictionary,
        block_count: blocks.len() as u32,
    };
    let payload_total: usize = coded.iter().map(|(_, p)| p.len() + BLOCK_HEADER_LEN).sum();
    let mut out = Vec::with_capacity(payload_total + 64);
    header.write(&mut out);
    for (block, (primary, payload)) in blocks.iter().zip(&coded) {
        out.extend_from_slice(&(block.len() as u32).to_be_bytes());
        out.extend_from_slice(&(*primary as u32).to_be_bytes());
        out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
        out.extend_from_slice(payload);
    }
    Ok(out)
}

/// Decompress a container. `dict` is consulted only when the container
/// refers to an external dictionary.
pub fn decompress(container: &[u8], dict: Option<&Dictionary>) -> Result<Vec<u8>> {
    decompress_with(container, dict, Execution::default())
}

pub fn decompress_with(container: &[u8], dict: Option<&Dictionary>, execution: Execution) -> Result<Vec<u8>> {
    let (header, start) = ContainerHeader::read(container)?;
    let embedded = header
        .embedded_dictionary
        .as_deref()
        .map(Dictionary::parse)
        .transpose()?;
    let dict = match (header.transform.needs_dictionary(), &embedded) {
        (false, _) => None,
        (true, Some(d)) => Some(d),
        (true, None) => Some(dict.ok_or(Error::DictionaryMissing)?),
    };

    let mut r = Reader::new(container);
    r.pos = start;
    let mut frames = Vec::with_capacity(header.block_count.min(1 << 16) as usize);
    for index in 0..header.block_count as usize {
        let err = block_error(index);
        let raw_len = r.u32().map_err(block_error(index))? as usize;
        let primary = r.u32().map_err(block_error(index))? as usize;
        let payload_len = r.u32().map_err(block_error(index))? as usize;
        let payload = r.take(payload_len).map_err(block_error(index))?;
        if raw_len == 0 || raw_len > header.block_size as usize {
            return Err(err(Error::CorruptContainer(format!(
                "block length {raw_len} out of range"
            ))));
        }
        frames.push((raw_len, primary, payload));
    }
    if r.pos != container.len() {
        return Err(Error::CorruptContainer(format!(
            "{} trailing bytes after the last block",
            container.len() - r.pos
        )));
    }
    let blocks = exec::try_map(execution, &frames, |i, &(raw_len, primary, payload)| {
        decode_block(raw_len, primary, payload).map_err(block_error(i))
    })?;
    invert_transform(blocks.concat(), header.transform, dict)
}

/// Bits per character: `8 * compressed / original`.
pub fn bpc(original_size: u64, compressed_size: u64) -> Result<f64> {
    if original_size == 0 {
        return Err(Error::ZeroLength);
    }
    Ok(8.0 * compressed_size as f64 / original_size as f64)
}
