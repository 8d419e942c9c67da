//! On-disk label container.
//!
//! `"RLBL" | version:u8 | scheme:u8 | n:u32le`, then for every node
//! `bits:u32le` followed by the label bits packed MSB first and padded to a
//! byte boundary.

use std::io::{Read, Seek, SeekFrom, Write};

use super::{BitString, SchemeId};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"RLBL";
pub const VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelFile {
    pub scheme: SchemeId,
    pub labels: Vec<BitString>,
}

pub fn write_label_file<W: Write>(out: &mut W, scheme: SchemeId, labels: &[BitString]) -> Result<()> {
    let n = u32::try_from(labels.len()).map_err(|_| Error::Format("too many labels".into()))?;
    out.write_all(MAGIC)?;
    out.write_all(&[VERSION, scheme.code()])?;
    out.write_all(&n.to_le_bytes())?;
    for label in labels {
        let len = u32::try_from(label.len()).map_err(|_| Error::Format("label too long".into()))?;
        out.write_all(&len.to_le_bytes())?;
        out.write_all(&label.to_bytes())?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_preamble<R: Read>(r: &mut R) -> Result<(SchemeId, usize)> {
    let mut head = [0u8; 6];
    r.read_exact(&mut head)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    if &head[..4] != MAGIC {
        return Err(Error::Format("bad magic, expected RLBL".into()));
    }
    if head[4] != VERSION {
        return Err(Error::Format(format!("unsupported version {}", head[4])));
    }
    let scheme = SchemeId::from_code(head[5])?;
    let n = read_u32(r)? as usize;
    Ok((scheme, n))
}

fn read_one<R: Read>(r: &mut R) -> Result<BitString> {
    let bits = read_u32(r)? as usize;
    let mut bytes = vec![0u8; bits.div_ceil(8)];
    r.read_exact(&mut bytes)
        .map_err(|e| Error::Format(format!("truncated label: {e}")))?;
    BitString::from_bytes(&bytes, bits)
}

pub fn read_label_file<R: Read>(r: &mut R) -> Result<LabelFile> {
    let (scheme, n) = read_preamble(r)?;
    let labels = (0..n).map(|_| read_one(r)).collect::<Result<Vec<_>>>()?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after last label".into()));
    }
    Ok(LabelFile { scheme, labels })
}

/// Loads only the labels at `nodes`, seeking past everything else.
/// Returns the scheme, the node count and the labels in request order.
pub fn read_labels_at<R: Read + Seek>(r: &mut R, nodes: &[usize]) -> Result<(SchemeId, usize, Vec<BitString>)> {
    let (scheme, n) = read_preamble(r)?;
    if let Some(&bad) = nodes.iter().find(|&&u| u >= n) {
        return Err(Error::NodeOutOfRange { node: bad, n });
    }
    let last = nodes.iter().copied().max();
    let mut found: Vec<Option<BitString>> = vec![None; nodes.len()];
    if let Some(last) = last {
        for u in 0..=last {
            if nodes.contains(&u) {
                let label = read_one(r)?;
                for (slot, _) in nodes.iter().enumerate().filter(|(_, &x)| x == u) {
                    found[slot] = Some(label.clone());
                }
            } else {
                let bits = read_u32(r)? as i64;
                r.seek(SeekFrom::Current((bits + 7) / 8))?;
            }
        }
    }
    Ok((scheme, n, found.into_iter().map(Option::unwrap).collect()))
}
