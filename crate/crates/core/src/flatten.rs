//! Super-layers and the intra-group labels.
//!
//! Consecutive longest-path layers are merged into at most `3*gamma + 1`
//! groups. Closure edges inside a group (`E1`) are stored as a bit table over
//! the group's topological interval; edges between groups (`E2`) are left to
//! the flat-DAG labels.

use crate::bitio::{BitString, Cursor};
use crate::error::Result;
use crate::exec::Exec;
use crate::graph::{BitMatrix, LayeredDag};

/// `max(1, ceil(log2 n))`.
pub fn gamma_for(n: usize) -> usize {
    if n <= 1 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// A single layer with more than `n/gamma` nodes.
    Thick = 1,
    /// Thin layers totalling more than `n/gamma` nodes.
    Full = 2,
    /// Thin layers totalling at most `n/gamma` nodes.
    Partial = 3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub kind: GroupKind,
    /// Layer interval `[first_layer, end_layer)`.
    pub first_layer: usize,
    pub end_layer: usize,
    /// Topological interval `[beg, end)`.
    pub beg: usize,
    pub end: usize,
}

impl Group {
    pub fn size(&self) -> usize {
        self.end - self.beg
    }
}

#[derive(Clone, Debug)]
pub struct SuperLayering {
    pub gamma: usize,
    pub n: usize,
    pub groups: Vec<Group>,
    /// Group index per node id.
    pub group_of: Vec<u32>,
}

impl SuperLayering {
    pub fn same_group(&self, u: usize, v: usize) -> bool {
        self.group_of[u] == self.group_of[v]
    }

    /// Nodes of group `i` in topological order.
    pub fn members<'a>(&self, d: &'a LayeredDag, i: usize) -> &'a [u32] {
        let g = &self.groups[i];
        &d.order[g.beg..g.end]
    }
}

/// Greedy left-to-right grouping of layer sizes.
pub fn group_layer_sizes(sizes: &[usize], n: usize, gamma: usize) -> Vec<Group> {
    assert!(gamma >= 1);
    let thick = |size: usize| size * gamma > n;
    let mut groups = Vec::new();
    let mut beg = 0;
    let mut open: Option<(usize, usize)> = None;
    let close = |groups: &mut Vec<Group>, first: usize, end_layer: usize, beg: usize, end: usize| {
        let kind = if (end - beg) * gamma > n {
            GroupKind::Full
        } else {
            GroupKind::Partial
        };
        groups.push(Group {
            kind,
            first_layer: first,
            end_layer,
            beg,
            end,
        });
    };
    for (layer, &size) in sizes.iter().enumerate() {
        let end = beg + size;
        if thick(size) {
            if let Some((first, gbeg)) = open.take() {
                close(&mut groups, first, layer, gbeg, beg);
            }
            groups.push(Group {
                kind: GroupKind::Thick,
                first_layer: layer,
                end_layer: layer + 1,
                beg,
                end,
            });
        } else {
            let (first, gbeg) = *open.get_or_insert((layer, beg));
            if (end - gbeg) * gamma > n {
                close(&mut groups, first, layer + 1, gbeg, end);
                open = None;
            }
        }
        beg = end;
    }
    if let Some((first, gbeg)) = open {
        close(&mut groups, first, sizes.len(), gbeg, beg);
    }
    groups
}

pub fn build_superlayers(d: &LayeredDag, gamma: usize) -> SuperLayering {
    let sizes: Vec<usize> = d.layers.iter().map(Vec::len).collect();
    let groups = group_layer_sizes(&sizes, d.n(), gamma);
    let mut group_of = vec![0u32; d.n()];
    for (i, g) in groups.iter().enumerate() {
        for &v in &d.order[g.beg..g.end] {
            group_of[v as usize] = i as u32;
        }
    }
    SuperLayering {
        gamma,
        n: d.n(),
        groups,
        group_of,
    }
}

/// Splits the strict closure into intra-group `E1` and inter-group `E2`.
pub fn split_edges(d: &LayeredDag, s: &SuperLayering) -> (BitMatrix, BitMatrix) {
    let n = d.n();
    let mut e1 = BitMatrix::new(n);
    let mut e2 = BitMatrix::new(n);
    for (u, v) in d.closure.edges() {
        if s.same_group(u, v) {
            e1.set(u, v, true);
        } else {
            e2.set(u, v, true);
        }
    }
    (e1, e2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlattenLabel {
    pub index: u32,
    pub group: u32,
    pub beg: u32,
    pub end: u32,
    pub thick: bool,
    /// `C_u`, empty for thick groups.
    pub table: BitString,
}

impl FlattenLabel {
    /// `index:w | group:w | beg:w | end-1:w | thick:1 | table`.
    pub fn write(&self, w: u32, out: &mut BitString) -> Result<()> {
        out.write_fixed(w, self.index as u64)?;
        out.write_fixed(w, self.group as u64)?;
        out.write_fixed(w, self.beg as u64)?;
        out.write_fixed(w, (self.end - 1) as u64)?;
        out.write_fixed(1, self.thick as u64)?;
        out.extend_from(&self.table);
        Ok(())
    }

    pub fn bit_len(&self, w: u32) -> usize {
        4 * w as usize + 1 + self.table.len()
    }
}

pub fn encode_l1(d: &LayeredDag, s: &SuperLayering, exec: Exec) -> Vec<FlattenLabel> {
    exec.map(d.n(), |u| {
        let gi = s.group_of[u] as usize;
        let g = &s.groups[gi];
        let thick = g.kind == GroupKind::Thick;
        let mut table = BitString::new();
        if !thick {
            for &x in &d.order[g.beg..g.end] {
                table.push_bit(d.closure.get(u, x as usize));
            }
        }
        FlattenLabel {
            index: d.topo[u],
            group: gi as u32,
            beg: g.beg as u32,
            end: g.end as u32,
            thick,
            table,
        }
    })
}

#[derive(Clone, Copy, Debug)]
pub struct FlattenView<'a> {
    pub index: usize,
    pub group: usize,
    pub beg: usize,
    pub end: usize,
    pub thick: bool,
    bits: &'a BitString,
    table: usize,
}

impl<'a> FlattenView<'a> {
    pub fn parse(bits: &'a BitString, offset: usize, w: u32) -> Result<Self> {
        let mut c = Cursor::new(bits, offset);
        let index = c.read_usize(w)?;
        let group = c.read_usize(w)?;
        let beg = c.read_usize(w)?;
        let end = c.read_usize(w)? + 1;
        let thick = c.read(1)? == 1;
        Ok(Self {
            index,
            group,
            beg,
            end,
            thick,
            bits,
            table: c.pos(),
        })
    }

    pub fn table_len(&self) -> usize {
        if self.thick {
            0
        } else {
            self.end - self.beg
        }
    }

    /// First bit after this section.
    pub fn end_pos(&self) -> usize {
        self.table + self.table_len()
    }

    pub fn table_start(&self) -> usize {
        self.table
    }
}

/// Whether `(u, v)` is an intra-group closure edge.
pub fn decode_l1(lu: &FlattenView, lv: &FlattenView) -> Result<bool> {
    if lu.group != lv.group || lu.thick {
        return Ok(false);
    }
    let j = lv
        .index
        .checked_sub(lu.beg)
        .filter(|&j| j < lu.table_len())
        .ok_or_else(|| crate::error::Error::Malformed("index outside group interval".into()))?;
    lu.bits.bit(lu.table + j)
}
