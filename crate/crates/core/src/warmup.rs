//! The half-table scheme.
//!
//! Each node stores its topological index and, for the next `floor(n/2)`
//! nodes in cyclic topological order, whether it is comparable with them.
//! Any pair is covered by the table of whichever endpoint sees the other
//! within half a turn; the index order gives the direction.

use crate::bitio::{BitString, Cursor};
use crate::error::Result;
use crate::exec::Exec;
use crate::graph::LayeredDag;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WarmupLabel {
    pub index: u32,
    pub table: BitString,
}

impl WarmupLabel {
    pub fn write(&self, w: u32, out: &mut BitString) -> Result<()> {
        out.write_fixed(w, self.index as u64)?;
        out.extend_from(&self.table);
        Ok(())
    }
}

/// One label per node, indexed by node id.
pub fn encode_warmup(d: &LayeredDag, exec: Exec) -> Vec<WarmupLabel> {
    let n = d.n();
    let half = n / 2;
    exec.map(n, |u| {
        let iu = d.topo[u] as usize;
        let mut table = BitString::with_capacity(half);
        for j in 0..half {
            let x = d.order[(iu + j + 1) % n] as usize;
            table.push_bit(d.closure.get(u, x) || d.closure.get(x, u));
        }
        WarmupLabel {
            index: iu as u32,
            table,
        }
    })
}

#[derive(Clone, Copy, Debug)]
pub struct WarmupView<'a> {
    pub index: usize,
    pub n: usize,
    bits: &'a BitString,
    table: usize,
}

impl<'a> WarmupView<'a> {
    pub fn parse(bits: &'a BitString, offset: usize, n: usize, w: u32) -> Result<Self> {
        let mut c = Cursor::new(bits, offset);
        let index = c.read_usize(w)?;
        Ok(Self {
            index,
            n,
            bits,
            table: c.pos(),
        })
    }

    fn probe(&self, j: usize) -> Result<bool> {
        self.bits.bit(self.table + j)
    }
}

pub fn decode_warmup(lu: &WarmupView, lv: &WarmupView) -> Result<bool> {
    let (iu, iv, n) = (lu.index, lv.index, lu.n);
    if iu == iv {
        return Ok(true);
    }
    if iu > iv {
        return Ok(false);
    }
    if iv - iu <= n / 2 {
        lu.probe(iv - iu - 1)
    } else {
        lv.probe(n + iu - iv - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{longest_path_layers, transitive_closure, Dag, Digraph};

    fn layered(n: usize, edges: &[(usize, usize)]) -> LayeredDag {
        let d = Dag::new(Digraph::from_edges(n, edges.iter().copied()).unwrap()).unwrap();
        longest_path_layers(&transitive_closure(&d))
    }

    fn bits(b: &BitString) -> Vec<bool> {
        (0..b.len()).map(|i| b.read_fixed(i, 1).unwrap() == 1).collect()
    }

    fn views(labels: &[WarmupLabel], n: usize) -> Vec<BitString> {
        let w = crate::bitio::width_for(n as u64);
        labels
            .iter()
            .map(|l| {
                let mut b = BitString::new();
                l.write(w, &mut b).unwrap();
                b
            })
            .collect()
    }

    fn ask(stored: &[BitString], n: usize, u: usize, v: usize) -> bool {
        let w = crate::bitio::width_for(n as u64);
        let a = WarmupView::parse(&stored[u], 0, n, w).unwrap();
        let b = WarmupView::parse(&stored[v], 0, n, w).unwrap();
        decode_warmup(&a, &b).unwrap()
    }

    #[test]
    fn chain_of_three() {
        let d = layered(3, &[(0, 1), (1, 2)]);
        let labels = encode_warmup(&d, Exec::Sequential);
        for l in &labels {
            assert_eq!(bits(&l.table), vec![true]);
        }
        let stored = views(&labels, 3);
        assert!(ask(&stored, 3, 0, 2));
        assert!(!ask(&stored, 3, 2, 0));
        assert!(ask(&stored, 3, 1, 1));
    }

    #[test]
    fn antichain_tables_are_zero() {
        let d = layered(6, &[]);
        for l in encode_warmup(&d, Exec::Sequential) {
            assert_eq!(l.table.len(), 3);
            assert!(bits(&l.table).iter().all(|&b| !b));
        }
    }

    #[test]
    fn single_node_has_empty_table() {
        let d = layered(1, &[]);
        let labels = encode_warmup(&d, Exec::Sequential);
        assert!(labels[0].table.is_empty());
        let stored = views(&labels, 1);
        assert_eq!(stored[0].len(), 1);
        assert!(ask(&stored, 1, 0, 0));
    }

    #[test]
    fn decoding_matches_closure() {
        for n in [2usize, 5, 8, 13] {
            let edges: Vec<_> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|&(u, v)| (u * 7 + v * 3) % 5 < 2)
                .collect();
            let d = layered(n, &edges);
            let stored = views(&encode_warmup(&d, Exec::Sequential), n);
            for u in 0..n {
                for v in 0..n {
                    assert_eq!(ask(&stored, n, u, v), u == v || d.closure.get(u, v));
                }
            }
        }
    }
}
