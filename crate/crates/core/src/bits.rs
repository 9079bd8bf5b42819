//! Bit strings with arbitrary bit length and the XOR/concatenation algebra the
//! coded shuffle is built from.
//!
//! Bits are stored MSB-first in a byte vector. Any bits of the final byte past
//! `len` are kept at zero, so byte-wise equality is bit-wise equality and
//! segment boundaries are free to fall in the middle of a byte.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bytes: Vec<u8>,
    len: u64,
}

fn byte_len(bits: u64) -> usize {
    bits.div_ceil(8) as usize
}

/// Mask selecting the top `count` bits of a byte, `1 <= count <= 8`.
fn top_mask(count: u64) -> u8 {
    (0xFFu16 << (8 - count)) as u8
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: u64) -> Self {
        BitString {
            bytes: vec![0; byte_len(len)],
            len,
        }
    }

    /// Wraps `bytes` as a `len`-bit string, clearing any bits past `len`.
    pub fn from_bytes(mut bytes: Vec<u8>, len: u64) -> Result<Self> {
        if bytes.len() != byte_len(len) {
            return Err(Error::LengthMismatch {
                expected: byte_len(len) as u64 * 8,
                found: bytes.len() as u64 * 8,
            });
        }
        let tail = len % 8;
        if tail != 0 {
            if let Some(last) = bytes.last_mut() {
                *last &= top_mask(tail);
            }
        }
        Ok(BitString { bytes, len })
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: u64) -> Self {
        assert!(len <= 64, "from_u64 holds at most 64 bits");
        (0..len)
            .map(|i| (value >> (len - 1 - i)) & 1 == 1)
            .collect()
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn get(&self, index: u64) -> Option<bool> {
        (index < self.len).then(|| self.bytes[(index / 8) as usize] & (0x80 >> (index % 8)) != 0)
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let idx = (self.len / 8) as usize;
            self.bytes[idx] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn count_ones(&self) -> u64 {
        self.bytes.iter().map(|b| u64::from(b.count_ones())).sum()
    }

    /// Eight bits starting at `offset`; positions past the end read as zero.
    fn byte_at(&self, offset: u64) -> u8 {
        let idx = (offset / 8) as usize;
        let shift = offset % 8;
        let hi = self.bytes.get(idx).copied().unwrap_or(0) << shift;
        let lo = if shift == 0 {
            0
        } else {
            self.bytes.get(idx + 1).copied().unwrap_or(0) >> (8 - shift)
        };
        hi | lo
    }

    fn check_range(&self, range: &Range<u64>) -> Result<()> {
        if range.start > range.end || range.end > self.len {
            return Err(Error::OutOfBounds {
                start: range.start,
                end: range.end,
                len: self.len,
            });
        }
        Ok(())
    }

    pub fn slice(&self, range: Range<u64>) -> Result<BitString> {
        self.check_range(&range)?;
        let len = range.end - range.start;
        let bytes = if range.start.is_multiple_of(8) {
            let from = (range.start / 8) as usize;
            self.bytes[from..from + byte_len(len)].to_vec()
        } else {
            (0..byte_len(len) as u64)
                .map(|i| self.byte_at(range.start + 8 * i))
                .collect()
        };
        BitString::from_bytes(bytes, len)
    }

    pub fn split_at(&self, at: u64) -> Result<(BitString, BitString)> {
        Ok((self.slice(0..at)?, self.slice(at..self.len)?))
    }

    pub fn append(&mut self, other: &BitString) {
        let shift = self.len % 8;
        if shift == 0 {
            self.bytes.extend_from_slice(&other.bytes);
        } else {
            for &b in &other.bytes {
                *self
                    .bytes
                    .last_mut()
                    .expect("non-aligned length has a last byte") |= b >> shift;
                self.bytes.push(b << (8 - shift));
            }
        }
        self.len += other.len;
        self.bytes.truncate(byte_len(self.len));
    }

    pub fn xor_assign(&mut self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        for (a, b) in self.bytes.iter_mut().zip(&other.bytes) {
            *a ^= b;
        }
        Ok(())
    }

    /// Overwrites bits `offset..offset + src.len()` with `src`.
    pub fn write_at(&mut self, offset: u64, src: &BitString) -> Result<()> {
        self.check_range(&(offset..offset + src.len))?;
        for (i, &b) in src.bytes.iter().enumerate() {
            let written = 8 * i as u64;
            let count = (src.len - written).min(8);
            self.write_bits(offset + written, b, count);
        }
        Ok(())
    }

    /// Writes the top `count` bits of `value` at bit position `pos`.
    fn write_bits(&mut self, pos: u64, value: u8, count: u64) {
        let mask = top_mask(count);
        let value = value & mask;
        let idx = (pos / 8) as usize;
        let shift = pos % 8;
        self.bytes[idx] = (self.bytes[idx] & !(mask >> shift)) | (value >> shift);
        if shift + count > 8 {
            let spill = mask << (8 - shift);
            self.bytes[idx + 1] = (self.bytes[idx + 1] & !spill) | (value << (8 - shift));
        }
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = BitString::new();
        for bit in iter {
            out.push(bit);
        }
        out
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses a string of `0`/`1` characters; `_` separators are ignored.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|&c| c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParams(format!("not a bit: {other:?}"))),
            })
            .collect()
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "BitString(\"")?;
            for i in 0..self.len {
                f.write_str(if self.get(i) == Some(true) { "1" } else { "0" })?;
            }
            write!(f, "\")")
        } else {
            write!(f, "BitString({} bits)", self.len)
        }
    }
}

/// Bit-wise XOR of equally long operands. An empty operand list yields an
/// empty string.
pub fn xor_segments(operands: &[BitString]) -> Result<BitString> {
    let Some((first, rest)) = operands.split_first() else {
        return Ok(BitString::new());
    };
    let mut acc = first.clone();
    for op in rest {
        acc.xor_assign(op)?;
    }
    Ok(acc)
}

/// Concatenation in order; the result length is the sum of the part lengths.
pub fn concat_segments(parts: &[BitString]) -> BitString {
    let mut out = BitString::new();
    for part in parts {
        out.append(part);
    }
    out
}
