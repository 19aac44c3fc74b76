//! Authenticated, encrypted framing for shipping a dictionary to a peer.
//!
//! The serialized dictionary is cut into fragments of at most 16 KiB. Each
//! fragment is optionally compressed, authenticated with HMAC-SHA256 over
//! the frame header and payload, and `payload || tag` is encrypted. Frames
//! are written back to back:
//!
//! ```text
//! content_type u8 | version u8 | sequence u32 | body_length u16 | body
//! ```
//!
//! `content_type` is 1 for a plain fragment and 2 for a fragment stored as a
//! backend container. All integers are big-endian.
//!
//! The default cipher XORs the plaintext with an HMAC-SHA256 keystream. It
//! exists so the framing can be exercised end to end and is not meant as
//! production cryptography; plug a real cipher in through [`FrameCipher`].

use std::fmt;

use hmac::{Hmac, Mac};
use sha2::Sha256;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::pipeline::{self, PipelineConfig, Transform};

type HmacSha256 = Hmac<Sha256>;

pub const CONTENT_FRAGMENT: u8 = 1;
pub const CONTENT_FRAGMENT_COMPRESSED: u8 = 2;
pub const RECORD_VERSION: u8 = 1;
pub const FRAGMENT_SIZE: usize = 16 * 1024;
pub const MAC_LEN: usize = 32;
pub const FRAME_HEADER_LEN: usize = 8;
pub const MIN_KEY_LEN: usize = 16;

/// Shared secret for a transfer session. Never written into frames.
#[derive(Clone, PartialEq, Eq)]
pub struct SessionKey(Vec<u8>);

impl SessionKey {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<SessionKey> {
        let bytes = bytes.into();
        if bytes.len() < MIN_KEY_LEN {
            return Err(Error::WeakKey { min: MIN_KEY_LEN });
        }
        Ok(SessionKey(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    fn derive(&self, label: &[u8]) -> [u8; 32] {
        let mut mac = HmacSha256::new_from_slice(&self.0).expect("hmac accepts any key length");
        mac.update(label);
        mac.finalize().into_bytes().into()
    }

    fn mac_key(&self) -> [u8; 32] {
        self.derive(b"idbe-transfer mac")
    }

    fn cipher_key(&self) -> [u8; 32] {
        self.derive(b"idbe-transfer cipher")
    }
}

impl fmt::Debug for SessionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SessionKey(<{} bytes>)", self.0.len())
    }
}

/// Symmetric cipher applied to `payload || tag`.
pub trait FrameCipher: Send + Sync {
    fn encrypt(&self, key: &[u8; 32], nonce: &[u8], plaintext: &[u8]) -> Vec<u8>;
    fn decrypt(&self, key: &[u8; 32], nonce: &[u8], ciphertext: &[u8]) -> Vec<u8>;
}

/// Keystream block `i` is `HMAC-SHA256(key, nonce || i)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HmacKeystream;

impl HmacKeystream {
    fn apply(key: &[u8; 32], nonce: &[u8], data: &[u8]) -> Vec<u8> {
        let base = HmacSha256::new_from_slice(key).expect("hmac accepts any key length");
        let mut out = Vec::with_capacity(data.len());
        for (counter, chunk) in data.chunks(32).enumerate() {
            let mut mac = base.clone();
            mac.update(nonce);
            mac.update(&(counter as u64).to_be_bytes());
            let stream = mac.finalize().into_bytes();
            out.extend(chunk.iter().zip(stream.iter()).map(|(a, b)| a ^ b));
        }
        out
    }
}

impl FrameCipher for HmacKeystream {
    fn encrypt(&self, key: &[u8; 32], nonce: &[u8], plaintext: &[u8]) -> Vec<u8> {
        Self::apply(key, nonce, plaintext)
    }

    fn decrypt(&self, key: &[u8; 32], nonce: &[u8], ciphertext: &[u8]) -> Vec<u8> {
        Self::apply(key, nonce, ciphertext)
    }
}

/// One frame of the transfer stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordFrame {
    pub content_type: u8,
    pub version: u8,
    pub sequence: u32,
    pub body: Vec<u8>,
}

impl RecordFrame {
    fn header(content_type: u8, version: u8, sequence: u32, body_len: u16) -> [u8; FRAME_HEADER_LEN] {
        let mut h = [0u8; FRAME_HEADER_LEN];
        h[0] = content_type;
        h[1] = version;
        h[2..6].copy_from_slice(&sequence.to_be_bytes());
        h[6..8].copy_from_slice(&body_len.to_be_bytes());
        h
    }

    pub fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&Self::header(
            self.content_type,
            self.version,
            self.sequence,
            self.body.len() as u16,
        ));
        out.extend_from_slice(&self.body);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(FRAME_HEADER_LEN + self.body.len());
        self.write(&mut out);
        out
    }

    /// Split one frame off the front of `data`. `expected` names the frame
    /// in errors, since the sequence field itself cannot be trusted yet.
    pub fn read(data: &[u8], expected: u32) -> Result<(RecordFrame, usize)> {
        // a frame whose length runs past the input cannot be authenticated
        let header = data
            .get(..FRAME_HEADER_LEN)
            .ok_or(Error::Authentication { sequence: expected })?;
        let body_len = u16::from_be_bytes([header[6], header[7]]) as usize;
        let body = data
            .get(FRAME_HEADER_LEN..FRAME_HEADER_LEN + body_len)
            .ok_or(Error::Authentication { sequence: expected })?;
        Ok((
            RecordFrame {
                content_type: header[0],
                version: header[1],
                sequence: u32::from_be_bytes(header[2..6].try_into().expect("4 bytes")),
                body: body.to_vec(),
            },
            FRAME_HEADER_LEN + body_len,
        ))
    }

    fn nonce(&self) -> [u8; 6] {
        nonce(self.content_type, self.version, self.sequence)
    }
}

fn nonce(content_type: u8, version: u8, sequence: u32) -> [u8; 6] {
    let mut n = [0u8; 6];
    n[0] = content_type;
    n[1] = version;
    n[2..].copy_from_slice(&sequence.to_be_bytes());
    n
}

fn frame_mac(key: &SessionKey, content_type: u8, version: u8, sequence: u32, payload: &[u8]) -> HmacSha256 {
    let mut mac = HmacSha256::new_from_slice(&key.mac_key()).expect("hmac accepts any key length");
    mac.update(&[content_type, version]);
    mac.update(&sequence.to_be_bytes());
    mac.update(payload);
    mac
}

/// Cut `dict_bytes` into consecutive chunks of `chunk_size` (the last may be
/// shorter). Panics if `chunk_size` is zero.
pub fn fragment(dict_bytes: &[u8], chunk_size: usize) -> Vec<&[u8]> {
    assert!(chunk_size > 0, "chunk size must be positive");
    dict_bytes.chunks(chunk_size).collect()
}

fn fragment_codec() -> PipelineConfig {
    PipelineConfig::new(Transform::None)
        .with_block_size(FRAGMENT_SIZE)
        .with_execution(Execution::Sequential)
}

pub fn protect(chunk: &[u8], key: &SessionKey, sequence: u32, compress: bool) -> Result<RecordFrame> {
    protect_with(&HmacKeystream, chunk, key, sequence, compress)
}

/// Build a frame. With `compress`, the fragment is stored as a backend
/// container when that is smaller than the fragment itself.
pub fn protect_with(
    cipher: &dyn FrameCipher,
    chunk: &[u8],
    key: &SessionKey,
    sequence: u32,
    compress: bool,
) -> Result<RecordFrame> {
    if chunk.len() > FRAGMENT_SIZE {
        return Err(Error::FragmentTooLarge {
            len: chunk.len(),
            max: FRAGMENT_SIZE,
        });
    }
    let packed = if compress {
        Some(pipeline::compress(chunk, &fragment_codec(), None)?).filter(|c| c.len() < chunk.len())
    } else {
        None
    };
    let (content_type, payload) = match &packed {
        Some(c) => (CONTENT_FRAGMENT_COMPRESSED, c.as_slice()),
        None => (CONTENT_FRAGMENT, chunk),
    };
    let tag = frame_mac(key, content_type, RECORD_VERSION, sequence, payload)
        .finalize()
        .into_bytes();
    let mut plaintext = Vec::with_capacity(payload.len() + MAC_LEN);
    plaintext.extend_from_slice(payload);
    plaintext.extend_from_slice(&tag);
    let body = cipher.encrypt(
        &key.cipher_key(),
        &nonce(content_type, RECORD_VERSION, sequence),
        &plaintext,
    );
    if body.len() > u16::MAX as usize {
        return Err(Error::FragmentTooLarge {
            len: body.len(),
            max: u16::MAX as usize,
        });
    }
    Ok(RecordFrame {
        content_type,
        version: RECORD_VERSION,
        sequence,
        body,
    })
}

pub fn unprotect(frame: &RecordFrame, key: &SessionKey) -> Result<Vec<u8>> {
    unprotect_with(&HmacKeystream, frame, key)
}

/// Decrypt and authenticate a frame, then undo compression. The MAC is
/// checked before any header field is interpreted.
pub fn unprotect_with(cipher: &dyn FrameCipher, frame: &RecordFrame, key: &SessionKey) -> Result<Vec<u8>> {
    let sequence = frame.sequence;
    let plaintext = cipher.decrypt(&key.cipher_key(), &frame.nonce(), &frame.body);
    if plaintext.len() < MAC_LEN {
        return Err(Error::Authentication { sequence });
    }
    let (payload, tag) = plaintext.split_at(plaintext.len() - MAC_LEN);
    frame_mac(key, frame.content_type, frame.version, sequence, payload)
        .verify_slice(tag)
        .map_err(|_| Error::Authentication { sequence })?;
    if frame.version != RECORD_VERSION {
        return Err(Error::BadFrame {
            sequence,
            reason: format!("unsupported version {}", frame.version),
        });
    }
    let chunk = match frame.content_type {
        CONTENT_FRAGMENT => payload.to_vec(),
        CONTENT_FRAGMENT_COMPRESSED => {
            pipeline::decompress_with(payload, None, Execution::Sequential).map_err(|e| Error::BadFrame {
                sequence,
                reason: format!("fragment does not decompress: {e}"),
            })?
        }
        other => {
            return Err(Error::BadFrame {
                sequence,
                reason: format!("unknown content type {other}"),
            })
        }
    };
    if chunk.len() > FRAGMENT_SIZE {
        return Err(Error::BadFrame {
            sequence,
            reason: format!("fragment of {} bytes exceeds {FRAGMENT_SIZE}", chunk.len()),
        });
    }
    Ok(chunk)
}

/// Options for [`pack_dictionary_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackOptions {
    pub chunk_size: usize,
    pub compress: bool,
    pub execution: Execution,
}

impl Default for PackOptions {
    fn default() -> Self {
        PackOptions {
            chunk_size: FRAGMENT_SIZE,
            compress: true,
            execution: Execution::default(),
        }
    }
}

pub fn pack_dictionary(dict: &Dictionary, key: &SessionKey) -> Result<Vec<u8>> {
    pack_dictionary_with(dict, key, PackOptions::default())
}

pub fn pack_dictionary_with(dict: &Dictionary, key: &SessionKey, opts: PackOptions) -> Result<Vec<u8>> {
    if opts.chunk_size == 0 || opts.chunk_size > FRAGMENT_SIZE {
        return Err(Error::InvalidConfig(format!(
            "chunk size {} outside 1..={FRAGMENT_SIZE}",
            opts.chunk_size
        )));
    }
    let serialized = dict.serialize();
    let chunks = fragment(&serialized, opts.chunk_size);
    let frames = exec::try_map(opts.execution, &chunks, |seq, chunk| {
        protect(chunk, key, seq as u32, opts.compress)
    })?;
    let mut out = Vec::with_capacity(serialized.len() + frames.len() * (FRAME_HEADER_LEN + MAC_LEN));
    for f in &frames {
        f.write(&mut out);
    }
    Ok(out)
}

pub fn unpack_dictionary(bytes: &[u8], key: &SessionKey) -> Result<Dictionary> {
    unpack_dictionary_with(bytes, key, Execution::default())
}

/// Verify every frame, check that sequence numbers run 0, 1, 2, ... and
/// parse the reassembled dictionary. The first failing frame is reported.
pub fn unpack_dictionary_with(bytes: &[u8], key: &SessionKey, execution: Execution) -> Result<Dictionary> {
    let mut frames = Vec::new();
    let mut pos = 0;
    let mut split_error = None;
    while pos < bytes.len() {
        match RecordFrame::read(&bytes[pos..], frames.len() as u32) {
            Ok((frame, used)) => {
                frames.push(frame);
                pos += used;
            }
            Err(e) => {
                split_error = Some(e);
                break;
            }
        }
    }
    let chunks = exec::try_map(execution, &frames, |_, f| unprotect(f, key))?;
    if let Some(e) = split_error {
        return Err(e);
    }
    if frames.is_empty() {
        return Err(Error::BadFrame {
            sequence: 0,
            reason: "no frames".into(),
        });
    }
    for (expected, f) in frames.iter().enumerate() {
        if f.sequence != expected as u32 {
            return Err(Error::SequenceGap {
                expected: expected as u32,
                found: f.sequence,
            });
        }
    }
    Dictionary::parse(&chunks.concat())
}
