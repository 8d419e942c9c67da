//! Bit-level storage for labels.
//!
//! A [`BitString`] is an append-only sequence of bits. Bit `i` lives in word
//! `i / 64` at position `63 - i % 64`, so fields are laid out most significant
//! bit first with no alignment between them. Readers are pure; every word they
//! touch is charged through [`crate::probe`].

mod file;
mod header;

pub use file::{read_label_file, read_labels_at, write_label_file, LabelFile, MAGIC, VERSION};
pub use header::{LabelHeader, SchemeId};

use crate::error::{Error, Result};
use crate::probe;

/// Bits needed for an index in `[0, n)`: `ceil(log2(max(n, 2)))`.
pub fn width_for(n: u64) -> u32 {
    let n = n.max(2);
    64 - (n - 1).leading_zeros()
}

/// Bits needed to write `v` itself (0 for 0).
pub fn bits_to_hold(v: u64) -> u32 {
    64 - v.leading_zeros()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Identity of the backing buffer, used to attribute probe traces.
    pub fn id(&self) -> usize {
        self.words.as_ptr() as usize
    }

    pub fn push_bit(&mut self, bit: bool) {
        let pos = self.len % 64;
        if pos == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << (63 - pos);
        }
        self.len += 1;
    }

    /// Appends `value` as exactly `width` bits, most significant bit first.
    pub fn write_fixed(&mut self, width: u32, value: u64) -> Result<()> {
        if width > 64 || (width < 64 && value >> width != 0) {
            return Err(Error::ValueOutOfRange { value, width });
        }
        if width == 0 {
            return Ok(());
        }
        let pos = (self.len % 64) as u32;
        if pos == 0 {
            self.words.push(0);
        }
        let free = 64 - pos;
        let last = self.words.len() - 1;
        if width <= free {
            self.words[last] |= value << (free - width);
        } else {
            let spill = width - free;
            self.words[last] |= value >> spill;
            self.words.push(value << (64 - spill));
        }
        self.len += width as usize;
        Ok(())
    }

    /// Appends every bit of `other`.
    pub fn extend_from(&mut self, other: &BitString) {
        let full = other.len / 64;
        for &w in &other.words[..full] {
            self.write_fixed(64, w).expect("64-bit word fits");
        }
        let rest = (other.len % 64) as u32;
        if rest > 0 {
            self.write_fixed(rest, other.words[full] >> (64 - rest))
                .expect("tail fits");
        }
    }

    /// Reads the `width`-bit integer stored at `offset` (`width <= 64`).
    pub fn read_fixed(&self, offset: usize, width: u32) -> Result<u64> {
        if width > 64 || offset + width as usize > self.len {
            return Err(Error::OutOfBounds {
                offset,
                width,
                len: self.len,
            });
        }
        if width == 0 {
            return Ok(0);
        }
        let idx = offset / 64;
        let pos = (offset % 64) as u32;
        probe::load(self.id(), idx);
        let head = self.words[idx] << pos;
        let value = if pos + width <= 64 {
            head >> (64 - width)
        } else {
            probe::load(self.id(), idx + 1);
            let tail = self.words[idx + 1] >> (64 - pos);
            (head | tail) >> (64 - width)
        };
        Ok(value)
    }

    /// Reads a single table bit. Unlike field reads these are traced.
    pub fn bit(&self, offset: usize) -> Result<bool> {
        probe::table_probe(self.id(), offset);
        Ok(self.read_fixed(offset, 1)? == 1)
    }

    pub fn flip(&mut self, offset: usize) -> Result<()> {
        if offset >= self.len {
            return Err(Error::OutOfBounds {
                offset,
                width: 1,
                len: self.len,
            });
        }
        self.words[offset / 64] ^= 1 << (63 - offset % 64);
        Ok(())
    }

    /// Packs the bits into bytes, MSB first, zero-padded to a byte boundary.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_be_bytes()).collect();
        out.truncate(self.len.div_ceil(8));
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Format(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let mut words: Vec<u64> = bytes
            .chunks(8)
            .map(|c| {
                let mut buf = [0u8; 8];
                buf[..c.len()].copy_from_slice(c);
                u64::from_be_bytes(buf)
            })
            .collect();
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= !0u64 << (64 - len % 64);
            }
        }
        Ok(Self { words, len })
    }
}

/// Sequential reader over a [`BitString`].
#[derive(Clone, Copy, Debug)]
pub struct Cursor<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(bits: &'a BitString, pos: usize) -> Self {
        Self { bits, pos }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn bits(&self) -> &'a BitString {
        self.bits
    }

    pub fn read(&mut self, width: u32) -> Result<u64> {
        let v = self.bits.read_fixed(self.pos, width)?;
        self.pos += width as usize;
        Ok(v)
    }

    pub fn read_usize(&mut self, width: u32) -> Result<usize> {
        self.read(width).map(|v| v as usize)
    }

    pub fn skip(&mut self, bits: usize) -> Result<()> {
        if self.pos + bits > self.bits.len() {
            return Err(Error::OutOfBounds {
                offset: self.pos,
                width: bits.min(u32::MAX as usize) as u32,
                len: self.bits.len(),
            });
        }
        self.pos += bits;
        Ok(())
    }
}
