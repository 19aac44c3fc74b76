//! Block-sorting transform over full cyclic rotations (no sentinel).
//!
//! Rotations are ordered byte-lexicographically; identical rotations of a
//! periodic block are ordered by start offset. The forward sort uses prefix
//! doubling with counting sorts, O(n log n).

use crate::error::{Error, Result};

/// Last column of the sorted rotation matrix plus the row of the original.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwtBlock {
    pub last_column: Vec<u8>,
    pub primary_index: usize,
}

/// Start offsets of all cyclic rotations of `block` in sorted order.
pub fn sorted_rotations(block: &[u8]) -> Vec<u32> {
    let n = block.len();
    if n == 0 {
        return Vec::new();
    }
    let mut order = vec![0u32; n];
    let mut class = vec![0u32; n];

    let mut start = [0usize; 257];
    for &b in block {
        start[b as usize + 1] += 1;
    }
    for i in 1..257 {
        start[i] += start[i - 1];
    }
    for (i, &b) in block.iter().enumerate() {
        order[start[b as usize]] = i as u32;
        start[b as usize] += 1;
    }
    let mut classes = 1u32;
    for i in 1..n {
        if block[order[i] as usize] != block[order[i - 1] as usize] {
            classes += 1;
        }
        class[order[i] as usize] = classes - 1;
    }

    let mut shifted = vec![0u32; n];
    let mut next_class = vec![0u32; n];
    let mut count = vec![0u32; n];
    let mut h = 1usize;
    while h < n && (classes as usize) < n {
        // sorted by the second half already; stable sort by the first half
        for (dst, &o) in shifted.iter_mut().zip(&order) {
            *dst = ((o as usize + n - h) % n) as u32;
        }
        count[..classes as usize].fill(0);
        for &s in &shifted {
            count[class[s as usize] as usize] += 1;
        }
        for c in 1..classes as usize {
            count[c] += count[c - 1];
        }
        for &s in shifted.iter().rev() {
            let c = &mut count[class[s as usize] as usize];
            *c -= 1;
            order[*c as usize] = s;
        }
        let key = |i: u32| (class[i as usize], class[(i as usize + h) % n]);
        next_class[order[0] as usize] = 0;
        classes = 1;
        for i in 1..n {
            if key(order[i]) != key(order[i - 1]) {
                classes += 1;
            }
            next_class[order[i] as usize] = classes - 1;
        }
        std::mem::swap(&mut class, &mut next_class);
        h <<= 1;
    }

    if (classes as usize) < n {
        // equal rotations: regroup by class in start-offset order
        count[..classes as usize].fill(0);
        for &c in &class {
            count[c as usize] += 1;
        }
        let mut acc = 0;
        for c in count[..classes as usize].iter_mut() {
            let here = *c;
            *c = acc;
            acc += here;
        }
        for (i, &c) in class.iter().enumerate() {
            order[count[c as usize] as usize] = i as u32;
            count[c as usize] += 1;
        }
    }
    order
}

pub fn bwt_forward(block: &[u8]) -> Result<BwtBlock> {
    if block.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let n = block.len();
    let order = sorted_rotations(block);
    let mut primary_index = 0;
    let last_column = order
        .iter()
        .enumerate()
        .map(|(row, &start)| {
            if start == 0 {
                primary_index = row;
            }
            block[(start as usize + n - 1) % n]
        })
        .collect();
    Ok(BwtBlock {
        last_column,
        primary_index,
    })
}

/// Undo [`bwt_forward`] by walking the last-to-first mapping.
pub fn bwt_inverse(block: &BwtBlock) -> Result<Vec<u8>> {
    let last = &block.last_column;
    let n = last.len();
    if n == 0 {
        return Err(Error::EmptyBlock);
    }
    if block.primary_index >= n {
        return Err(Error::PrimaryIndexOutOfRange {
            index: block.primary_index,
            len: n,
        });
    }
    let mut first = [0u32; 256];
    for &b in last {
        first[b as usize] += 1;
    }
    let mut acc = 0;
    for slot in first.iter_mut() {
        let here = *slot;
        *slot = acc;
        acc += here;
    }
    let lf: Vec<u32> = last
        .iter()
        .map(|&b| {
            let row = first[b as usize];
            first[b as usize] += 1;
            row
        })
        .collect();
    let mut out = vec![0u8; n];
    let mut row = block.primary_index;
    for slot in out.iter_mut().rev() {
        *slot = last[row];
        row = lf[row] as usize;
    }
    Ok(out)
}
