//! Adaptive order-0 arithmetic coding of bytes.
//!
//! A 32-bit carry-less range coder drives a frequency model over all 256
//! byte values. Counts start at 1, grow by 32 per coded symbol, and are
//! halved (rounding up) whenever the total exceeds 2^16. The coded stream
//! is prefixed with the original length as a big-endian `u64`.

use crate::error::{Error, Result, Stage};

const INCREMENT: u32 = 32;
const MAX_TOTAL: u32 = 1 << 16;
const TOP: u32 = 1 << 24;
const BOT: u32 = 1 << 16;
const HEADER_LEN: usize = 8;
/// No symbol can cost less than -log2(1 - 255/2^16) bits, about 1/178 of a
/// bit, so a code byte never carries more than ~1421 symbols.
const MAX_SYMBOLS_PER_BYTE: u64 = 4096;

/// Adaptive byte frequencies with a Fenwick tree for cumulative lookups.
#[derive(Clone)]
pub struct FrequencyModel {
    counts: [u32; 256],
    tree: [u32; 257],
    total: u32,
}

impl Default for FrequencyModel {
    fn default() -> Self {
        let mut model = FrequencyModel {
            counts: [1; 256],
            tree: [0; 257],
            total: 256,
        };
        model.rebuild();
        model
    }
}

impl FrequencyModel {
    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn count(&self, symbol: u8) -> u32 {
        self.counts[symbol as usize]
    }

    fn rebuild(&mut self) {
        self.tree = [0; 257];
        for (i, &c) in self.counts.iter().enumerate() {
            let mut j = i + 1;
            while j <= 256 {
                self.tree[j] += c;
                j += j & j.wrapping_neg();
            }
        }
        self.total = self.counts.iter().sum();
    }

    /// Sum of the counts of all symbols below `symbol`.
    pub fn cumulative(&self, symbol: u8) -> u32 {
        let mut sum = 0;
        let mut j = symbol as usize;
        while j > 0 {
            sum += self.tree[j];
            j &= j - 1;
        }
        sum
    }

    /// Symbol whose cumulative interval contains `target`, with its low end.
    fn find(&self, target: u32) -> (u8, u32) {
        let mut pos = 0usize;
        let mut below = 0u32;
        let mut step = 256usize;
        while step > 0 {
            let next = pos + step;
            if next <= 256 && below + self.tree[next] <= target {
                pos = next;
                below += self.tree[next];
            }
            step >>= 1;
        }
        (pos as u8, below)
    }

    pub fn update(&mut self, symbol: u8) {
        self.counts[symbol as usize] += INCREMENT;
        self.total += INCREMENT;
        if self.total > MAX_TOTAL {
            for c in self.counts.iter_mut() {
                *c = c.div_ceil(2);
            }
            self.rebuild();
        } else {
            let mut j = symbol as usize + 1;
            while j <= 256 {
                self.tree[j] += INCREMENT;
                j += j & j.wrapping_neg();
            }
        }
    }
}

struct Encoder {
    low: u32,
    range: u32,
    out: Vec<u8>,
}

impl Encoder {
    fn encode(&mut self, cum: u32, freq: u32, total: u32) {
        self.range /= total;
        self.low = self.low.wrapping_add(cum * self.range);
        self.range *= freq;
        loop {
            if (self.low ^ self.low.wrapping_add(self.range)) >= TOP {
                if self.range >= BOT {
                    break;
                }
                self.range = self.low.wrapping_neg() & (BOT - 1);
            }
            self.out.push((self.low >> 24) as u8);
            self.low <<= 8;
            self.range <<= 8;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        for _ in 0..4 {
            self.out.push((self.low >> 24) as u8);
            self.low <<= 8;
        }
        self.out
    }
}

struct Decoder<'a> {
    low: u32,
    range: u32,
    code: u32,
    input: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    fn new(input: &'a [u8], pos: usize) -> Result<Self> {
        let mut d = Decoder {
            low: 0,
            range: u32::MAX,
            code: 0,
            input,
            pos,
        };
        for _ in 0..4 {
            d.code = (d.code << 8) | u32::from(d.next_byte()?);
        }
        Ok(d)
    }

    fn next_byte(&mut self) -> Result<u8> {
        let b = *self
            .input
            .get(self.pos)
            .ok_or_else(|| Error::corrupt(Stage::Ari, self.pos, "code stream truncated"))?;
        self.pos += 1;
        Ok(b)
    }

    fn target(&mut self, total: u32) -> Result<u32> {
        self.range /= total;
        let t = self.code.wrapping_sub(self.low) / self.range;
        if t >= total {
            return Err(Error::corrupt(
                Stage::Ari,
                self.pos,
                "code value outside the model interval",
            ));
        }
        Ok(t)
    }

    fn consume(&mut self, cum: u32, freq: u32) -> Result<()> {
        self.low = self.low.wrapping_add(cum * self.range);
        self.range *= freq;
        loop {
            if (self.low ^ self.low.wrapping_add(self.range)) >= TOP {
                if self.range >= BOT {
                    break;
                }
                self.range = self.low.wrapping_neg() & (BOT - 1);
            }
            self.code = (self.code << 8) | u32::from(self.next_byte()?);
            self.low <<= 8;
            self.range <<= 8;
        }
        Ok(())
    }
}

pub fn ari_encode(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + data.len() / 2 + 16);
    out.extend_from_slice(&(data.len() as u64).to_be_bytes());
    if data.is_empty() {
        return out;
    }
    let mut enc = Encoder {
        low: 0,
        range: u32::MAX,
        out,
    };
    let mut model = FrequencyModel::default();
    for &b in data {
        let cum = model.cumulative(b);
        enc.encode(cum, model.count(b), model.total());
        model.update(b);
    }
    enc.finish()
}

pub fn ari_decode(coded: &[u8]) -> Result<Vec<u8>> {
    let header: [u8; HEADER_LEN] = coded
        .get(..HEADER_LEN)
        .and_then(|h| h.try_into().ok())
        .ok_or_else(|| Error::corrupt(Stage::Ari, coded.len(), "length header incomplete"))?;
    let len = u64::from_be_bytes(header);
    if len == 0 {
        return Ok(Vec::new());
    }
    let body = (coded.len() - HEADER_LEN) as u64;
    if len > body.saturating_mul(MAX_SYMBOLS_PER_BYTE) {
        return Err(Error::corrupt(
            Stage::Ari,
            0,
            "declared length exceeds what the code stream can hold",
        ));
    }
    let mut out = Vec::with_capacity(len as usize);
    let mut dec = Decoder::new(coded, HEADER_LEN)?;
    let mut model = FrequencyModel::default();
    for _ in 0..len {
        let t = dec.target(model.total())?;
        let (sym, cum) = model.find(t);
        dec.consume(cum, model.count(sym))?;
        out.push(sym);
        model.update(sym);
    }
    Ok(out)
}
