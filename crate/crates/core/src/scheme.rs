//! Label assembly and the query entry point.
//!
//! A label is `header | scc:w | body`. The warm-up body is the half table.
//! The composite body is `l1 | l2`; the header's single offset points at
//! `l2`, relative to the start of the body.

use std::io::{Read, Seek, Write};

use crate::biclique::{BicliqueProfile, QPolicy};
use crate::bitio::{read_label_file, read_labels_at, write_label_file, BitString, LabelHeader, SchemeId};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::flatlabel::{decode_l2, label_flat_dag, FlatLabeling, FlatParams, L2View, Variant};
use crate::flatten::{build_superlayers, decode_l1, encode_l1, gamma_for, split_edges, FlattenView, SuperLayering};
use crate::graph::{longest_path_layers_with, scc_condense, BitMatrix, Condensation, Digraph, LayeredDag};
use crate::warmup::{decode_warmup, encode_warmup, WarmupView};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncodeOptions {
    pub scheme: SchemeId,
    pub profile: BicliqueProfile,
    pub q: QPolicy,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            scheme: SchemeId::Third,
            profile: BicliqueProfile::Paper,
            q: QPolicy::Formula,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

impl EncodeOptions {
    pub fn new(scheme: SchemeId, profile: BicliqueProfile) -> Self {
        Self {
            scheme,
            profile,
            ..Self::default()
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSet {
    pub scheme: SchemeId,
    pub labels: Vec<BitString>,
}

impl LabelSet {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, u: usize) -> Result<&BitString> {
        self.labels.get(u).ok_or(Error::NodeOutOfRange { node: u, n: self.n() })
    }

    pub fn query(&self, u: usize, v: usize) -> Result<bool> {
        query(self.label(u)?, self.label(v)?)
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        write_label_file(out, self.scheme, &self.labels)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let f = read_label_file(r)?;
        Ok(Self {
            scheme: f.scheme,
            labels: f.labels,
        })
    }

    /// Loads two labels without reading the rest of the file.
    pub fn query_file<R: Read + Seek>(r: &mut R, u: usize, v: usize) -> Result<bool> {
        let (_, _, pair) = read_labels_at(r, &[u, v])?;
        query(&pair[0], &pair[1])
    }
}

/// Everything the encoder computed, for audits and measurements.
#[derive(Clone, Debug)]
pub struct Audit {
    pub condensation: Condensation,
    pub layered: LayeredDag,
    pub layering: Option<SuperLayering>,
    pub e1: Option<BitMatrix>,
    pub e2: Option<BitMatrix>,
    pub flat: Option<FlatLabeling>,
}

pub fn encode(g: &Digraph, opts: &EncodeOptions) -> Result<LabelSet> {
    encode_with_audit(g, opts).map(|(ls, _)| ls)
}

/// The average-size variant with the given threshold profile.
pub fn encode_average(g: &Digraph, profile: BicliqueProfile) -> Result<LabelSet> {
    encode(g, &EncodeOptions::new(SchemeId::Average, profile))
}

pub fn encode_with_audit(g: &Digraph, opts: &EncodeOptions) -> Result<(LabelSet, Audit)> {
    let n = g.n();
    if n == 0 {
        return Err(Error::Format("graph has no nodes".into()));
    }
    let exec = opts.exec;
    let condensation = scc_condense(g);
    let layered = longest_path_layers_with(&condensation.dag, exec);
    let w = crate::bitio::width_for(n as u64);

    let mut audit = Audit {
        condensation,
        layered,
        layering: None,
        e1: None,
        e2: None,
        flat: None,
    };
    let scc = &audit.condensation.scc_id;
    let labels = match opts.scheme {
        SchemeId::Warmup => {
            let header = LabelHeader::new(SchemeId::Warmup, n as u64, vec![]);
            encode_warmup(&audit.layered, exec)
                .iter()
                .enumerate()
                .map(|(u, l)| {
                    let mut out = BitString::new();
                    header.write(&mut out)?;
                    out.write_fixed(w, scc[u] as u64)?;
                    l.write(w, &mut out)?;
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?
        }
        SchemeId::Third | SchemeId::Average => {
            let d = &audit.layered;
            let layering = build_superlayers(d, gamma_for(n));
            let (e1, e2) = split_edges(d, &layering);
            let variant = if opts.scheme == SchemeId::Third {
                Variant::Third
            } else {
                Variant::Average
            };
            let params = FlatParams {
                variant,
                profile: opts.profile,
                q: opts.q,
                seed: opts.seed,
            };
            let flat = label_flat_dag(d, &layering, &e2, &params, exec)?;
            let l1 = encode_l1(d, &layering, exec);
            let out = exec
                .map(n, |u| {
                    let l1_len = l1[u].bit_len(w);
                    let header = LabelHeader::new(opts.scheme, n as u64, vec![(w as usize + l1_len) as u64]);
                    let mut out = BitString::new();
                    header.write(&mut out)?;
                    out.write_fixed(w, scc[u] as u64)?;
                    l1[u].write(w, &mut out)?;
                    out.extend_from(&flat.labels[u]);
                    Ok(out)
                })
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            audit.layering = Some(layering);
            audit.e1 = Some(e1);
            audit.e2 = Some(e2);
            audit.flat = Some(flat);
            out
        }
    };
    Ok((
        LabelSet {
            scheme: opts.scheme,
            labels,
        },
        audit,
    ))
}

/// Positions of the parts of a parsed label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabelParts {
    pub scheme: SchemeId,
    pub n: usize,
    pub w: u32,
    /// First bit after the header, where the SCC id starts.
    pub body: usize,
    /// `l2` start for composite labels.
    pub l2: Option<usize>,
    pub len: usize,
}

pub fn parts(bits: &BitString) -> Result<LabelParts> {
    let (h, body) = LabelHeader::parse(bits)?;
    let l2 = h.offsets.first().map(|&o| body + o as usize);
    if (h.scheme == SchemeId::Warmup) != l2.is_none() {
        return Err(Error::Malformed("offset table does not match scheme".into()));
    }
    Ok(LabelParts {
        scheme: h.scheme,
        n: h.n as usize,
        w: h.w,
        body,
        l2,
        len: bits.len(),
    })
}

/// Reachability from the node of `lu` to the node of `lv`.
pub fn query(lu: &BitString, lv: &BitString) -> Result<bool> {
    let hu = LabelHeader::peek(lu)?;
    let hv = LabelHeader::peek(lv)?;
    if hu.scheme != hv.scheme || hu.n != hv.n {
        return Err(Error::Mismatch(format!(
            "labels from different encodings: {:?}/n={} vs {:?}/n={}",
            hu.scheme, hu.n, hv.scheme, hv.n
        )));
    }
    let (w, n) = (hu.w, hu.n as usize);
    if lu.read_fixed(hu.body, w)? == lv.read_fixed(hv.body, w)? {
        return Ok(true);
    }
    let (bu, bv) = (hu.body + w as usize, hv.body + w as usize);
    if hu.scheme == SchemeId::Warmup {
        return decode_warmup(&WarmupView::parse(lu, bu, n, w)?, &WarmupView::parse(lv, bv, n, w)?);
    }
    let fu = FlattenView::parse(lu, bu, w)?;
    let fv = FlattenView::parse(lv, bv, w)?;
    if fu.index == fv.index {
        return Ok(true);
    }
    if decode_l1(&fu, &fv)? {
        return Ok(true);
    }
    let missing = || Error::Malformed("composite label without l2 offset".into());
    let su = L2View::parse(lu, hu.body + hu.offset.ok_or_else(missing)?, fu.index, w)?;
    let sv = L2View::parse(lv, hv.body + hv.offset.ok_or_else(missing)?, fv.index, w)?;
    decode_l2(&su, &sv)
}

/// Bit counts of one named part across all labels.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionStats {
    pub name: &'static str,
    pub max_bits: usize,
    pub mean_bits: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelStats {
    pub scheme: SchemeId,
    pub n: usize,
    pub max_bits: usize,
    pub mean_bits: f64,
    pub sections: Vec<SectionStats>,
}

pub fn stats(ls: &LabelSet) -> Result<LabelStats> {
    let n = ls.n();
    let names: &[&'static str] = match ls.scheme {
        SchemeId::Warmup => &["header", "scc", "table"],
        _ => &["header", "scc", "l1", "l2"],
    };
    let mut sizes = vec![Vec::with_capacity(n); names.len()];
    for bits in &ls.labels {
        let p = parts(bits)?;
        let w = p.w as usize;
        sizes[0].push(p.body);
        sizes[1].push(w);
        match p.l2 {
            None => sizes[2].push(p.len - p.body - w),
            Some(l2) => {
                sizes[2].push(l2 - p.body - w);
                sizes[3].push(p.len - l2);
            }
        }
    }
    let summary = |v: &[usize]| {
        let max = v.iter().copied().max().unwrap_or(0);
        let mean = if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<usize>() as f64 / v.len() as f64
        };
        (max, mean)
    };
    let totals: Vec<usize> = ls.labels.iter().map(BitString::len).collect();
    let (max_bits, mean_bits) = summary(&totals);
    Ok(LabelStats {
        scheme: ls.scheme,
        n,
        max_bits,
        mean_bits,
        sections: names
            .iter()
            .zip(&sizes)
            .map(|(&name, v)| {
                let (max_bits, mean_bits) = summary(v);
                SectionStats {
                    name,
                    max_bits,
                    mean_bits,
                }
            })
            .collect(),
    })
}
