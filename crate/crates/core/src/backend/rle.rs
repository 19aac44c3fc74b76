//! Run-length coding of long runs.
//!
//! A run of four or more equal bytes is written as the byte four times and
//! a count byte `k` for `k` further repeats, so one group covers at most
//! 259 bytes. Longer runs are split into successive groups, and shorter
//! runs are copied as is.

use crate::error::{Error, Result, Stage};

const THRESHOLD: usize = 4;
const MAX_GROUP: usize = THRESHOLD + u8::MAX as usize;

pub fn rle_encode(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() + data.len() / 64);
    let mut i = 0;
    while i < data.len() {
        let b = data[i];
        let mut run = data[i..].iter().take_while(|&&x| x == b).count();
        i += run;
        while run >= THRESHOLD {
            let group = run.min(MAX_GROUP);
            out.extend_from_slice(&[b; THRESHOLD]);
            out.push((group - THRESHOLD) as u8);
            run -= group;
        }
        out.extend(std::iter::repeat_n(b, run));
    }
    out
}

pub fn rle_decode(data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(data.len() * 2);
    let mut prev: Option<u8> = None;
    let mut run = 0;
    let mut i = 0;
    while i < data.len() {
        let b = data[i];
        i += 1;
        out.push(b);
        run = if prev == Some(b) { run + 1 } else { 1 };
        prev = Some(b);
        if run == THRESHOLD {
            let count = *data
                .get(i)
                .ok_or_else(|| Error::corrupt(Stage::Rle, i, "missing run count"))?;
            i += 1;
            out.extend(std::iter::repeat_n(b, count as usize));
            prev = None;
            run = 0;
        }
    }
    Ok(out)
}
