use super::{bits_to_hold, width_for, BitString, Cursor};
use crate::error::{Error, Result};

const SCHEME_BITS: u32 = 4;
const WIDTH_BITS: u32 = 6;
const COUNT_BITS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum SchemeId {
    Warmup = 1,
    Third = 2,
    Average = 3,
}

impl SchemeId {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(Self::Warmup),
            2 => Ok(Self::Third),
            3 => Ok(Self::Average),
            other => Err(Error::Malformed(format!("unknown scheme id {other}"))),
        }
    }
}

/// Self-describing prefix of every label.
///
/// Layout: `scheme:4 | w:6 | n-1:w | count:4 | ow:6 | offsets:count*ow`.
/// Offsets are relative to the first bit after the header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelHeader {
    pub scheme: SchemeId,
    pub n: u64,
    pub w: u32,
    pub offsets: Vec<u64>,
}

impl LabelHeader {
    pub fn new(scheme: SchemeId, n: u64, offsets: Vec<u64>) -> Self {
        debug_assert!(n >= 1);
        debug_assert!(offsets.windows(2).all(|p| p[0] <= p[1]));
        debug_assert!(offsets.len() < 1 << COUNT_BITS);
        Self {
            scheme,
            n,
            w: width_for(n),
            offsets,
        }
    }

    fn offset_width(&self) -> u32 {
        self.offsets.iter().copied().max().map_or(0, bits_to_hold)
    }

    pub fn bit_len(&self) -> usize {
        (SCHEME_BITS + WIDTH_BITS + self.w + COUNT_BITS + WIDTH_BITS) as usize
            + self.offsets.len() * self.offset_width() as usize
    }

    pub fn write(&self, out: &mut BitString) -> Result<()> {
        out.write_fixed(SCHEME_BITS, self.scheme.code() as u64)?;
        out.write_fixed(WIDTH_BITS, self.w as u64)?;
        out.write_fixed(self.w, self.n - 1)?;
        out.write_fixed(COUNT_BITS, self.offsets.len() as u64)?;
        let ow = self.offset_width();
        out.write_fixed(WIDTH_BITS, ow as u64)?;
        for &off in &self.offsets {
            out.write_fixed(ow, off)?;
        }
        Ok(())
    }

    /// Parses a header at the start of `bits`, returning it with its length.
    pub fn parse(bits: &BitString) -> Result<(Self, usize)> {
        let mut c = Cursor::new(bits, 0);
        let scheme = SchemeId::from_code(c.read(SCHEME_BITS)? as u8)?;
        let w = c.read(WIDTH_BITS)? as u32;
        let n = c.read(w)? + 1;
        if w != width_for(n) {
            return Err(Error::Malformed(format!("width {w} inconsistent with n = {n}")));
        }
        let count = c.read(COUNT_BITS)? as usize;
        let ow = c.read(WIDTH_BITS)? as u32;
        let mut offsets = Vec::with_capacity(count);
        for _ in 0..count {
            offsets.push(c.read(ow)?);
        }
        let end = c.pos();
        if offsets.windows(2).any(|p| p[0] > p[1])
            || offsets.last().is_some_and(|&o| end + o as usize > bits.len())
        {
            return Err(Error::Malformed("offset table out of order or out of range".into()));
        }
        Ok((
            Self {
                scheme,
                n,
                w,
                offsets,
            },
            end,
        ))
    }

    /// Reads only the fields a decoder needs: scheme, n, w and the first
    /// offset if there is one.
    pub fn peek(bits: &BitString) -> Result<HeaderPeek> {
        let mut c = Cursor::new(bits, 0);
        let scheme = SchemeId::from_code(c.read(SCHEME_BITS)? as u8)?;
        let w = c.read(WIDTH_BITS)? as u32;
        let n = c.read(w)? + 1;
        let count = c.read(COUNT_BITS)? as usize;
        let ow = c.read(WIDTH_BITS)? as u32;
        let offset = if count > 0 { Some(c.read_usize(ow)?) } else { None };
        let body = c.pos() + count.saturating_sub(1) * ow as usize;
        if body > bits.len() || offset.is_some_and(|o| body + o > bits.len()) {
            return Err(Error::Malformed("header runs past the label".into()));
        }
        Ok(HeaderPeek {
            scheme,
            n,
            w,
            body,
            offset,
        })
    }
}

/// The handful of header fields needed to answer a query.
#[derive(Clone, Copy, Debug)]
pub struct HeaderPeek {
    pub scheme: SchemeId,
    pub n: u64,
    pub w: u32,
    /// First bit after the header.
    pub body: usize,
    pub offset: Option<usize>,
}
