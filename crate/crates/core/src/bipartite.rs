//! Unbalanced adjacency labels for bipartite graphs.
//!
//! Sides `A` (`a` nodes) and `B` (`b` nodes) get tables of `alpha` and `beta`
//! bits. Node `u` of `A` covers the `B` nodes starting at `ceil(b*u/a)` and
//! wrapping around; node `v` of `B` covers the `A` nodes starting at
//! `ceil(a*v/b)`. Whenever `a*alpha + b*beta > a*b` every cross pair falls in
//! at least one of the two windows, so a query probes exactly one bit.
//!
//! Label layout: `side:1 | nw:6 | index:nw | a:nw | b:nw | alpha:nw |
//! beta:nw | table`. `B` nodes carry `index = a + j`.

use crate::bitio::{bits_to_hold, BitString, Cursor};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteParams {
    pub a: usize,
    pub b: usize,
    pub alpha: usize,
    pub beta: usize,
}

impl BipartiteParams {
    /// The budget only constrains instances that have cross pairs at all.
    pub fn check(&self) -> Result<()> {
        let &Self { a, b, alpha, beta } = self;
        if a > 0 && b > 0 && a * alpha + b * beta <= a * b {
            return Err(Error::Budget { a, b, alpha, beta });
        }
        Ok(())
    }

    fn field_width(&self) -> u32 {
        bits_to_hold((self.a + self.b).max(self.alpha).max(self.beta) as u64).max(1)
    }

    /// Bits a label spends before its table.
    pub fn header_bits(&self) -> usize {
        1 + 6 + 5 * self.field_width() as usize
    }
}

fn ceil_div(p: usize, q: usize) -> usize {
    p.div_ceil(q)
}

/// Probe indices for the pair `(i_a, i_b)`: `i` into the `A` table and `j`
/// into the `B` table.
pub fn index_pair(i_a: usize, i_b: usize, a: usize, b: usize) -> (usize, usize) {
    let i = (i_b as i64 - ceil_div(b * i_a, a) as i64).rem_euclid(b as i64);
    let j = (i_a as i64 - ceil_div(a * i_b, b) as i64).rem_euclid(a as i64);
    (i as usize, j as usize)
}

/// A bipartite graph with sides indexed from zero.
#[derive(Clone, Debug)]
pub struct BipartiteInstance {
    pub params: BipartiteParams,
    /// Row-major `a x b` adjacency.
    pub adjacency: Vec<bool>,
}

impl BipartiteInstance {
    pub fn new(params: BipartiteParams, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![false; params.a * params.b];
        for &(x, y) in edges {
            if x >= params.a || y >= params.b {
                return Err(Error::NodeOutOfRange {
                    node: x.max(y),
                    n: params.a.max(params.b),
                });
            }
            adjacency[x * params.b + y] = true;
        }
        Ok(Self { params, adjacency })
    }

    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.adjacency[x * self.params.b + y]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteLabel {
    pub side: Side,
    /// Position on its own side.
    pub index: usize,
    pub params: BipartiteParams,
    pub table: BitString,
}

impl BipartiteLabel {
    pub fn write(&self, out: &mut BitString) -> Result<()> {
        let nw = self.params.field_width();
        let p = &self.params;
        let global = match self.side {
            Side::A => self.index,
            Side::B => p.a + self.index,
        };
        out.write_fixed(1, (self.side == Side::B) as u64)?;
        out.write_fixed(6, nw as u64)?;
        for v in [global, p.a, p.b, p.alpha, p.beta] {
            out.write_fixed(nw, v as u64)?;
        }
        out.extend_from(&self.table);
        Ok(())
    }

    pub fn bit_len(&self) -> usize {
        self.params.header_bits() + self.table.len()
    }
}

/// Encodes one label per node: all of `A` first, then all of `B`.
pub fn encode_bipartite<F>(params: BipartiteParams, adjacent: F) -> Result<Vec<BipartiteLabel>>
where
    F: Fn(usize, usize) -> bool,
{
    params.check()?;
    let BipartiteParams { a, b, alpha, beta } = params;
    let mut out = Vec::with_capacity(a + b);
    for u in 0..a {
        let mut table = BitString::with_capacity(alpha);
        let start = if b > 0 { ceil_div(b * u, a) } else { 0 };
        for i in 0..alpha {
            table.push_bit(b > 0 && adjacent(u, (start + i) % b));
        }
        out.push(BipartiteLabel {
            side: Side::A,
            index: u,
            params,
            table,
        });
    }
    for v in 0..b {
        let mut table = BitString::with_capacity(beta);
        let start = if a > 0 { ceil_div(a * v, b) } else { 0 };
        for j in 0..beta {
            table.push_bit(a > 0 && adjacent((start + j) % a, v));
        }
        out.push(BipartiteLabel {
            side: Side::B,
            index: v,
            params,
            table,
        });
    }
    Ok(out)
}

pub fn encode_instance(inst: &BipartiteInstance) -> Result<Vec<BipartiteLabel>> {
    encode_bipartite(inst.params, |x, y| inst.adjacent(x, y))
}

/// A label parsed in place inside a larger bit string.
#[derive(Clone, Copy, Debug)]
pub struct BipartiteView<'a> {
    pub side: Side,
    pub index: usize,
    pub params: BipartiteParams,
    bits: &'a BitString,
    table: usize,
}

impl<'a> BipartiteView<'a> {
    pub fn parse(bits: &'a BitString, offset: usize) -> Result<Self> {
        let mut c = Cursor::new(bits, offset);
        let side = if c.read(1)? == 1 { Side::B } else { Side::A };
        let nw = c.read(6)? as u32;
        let global = c.read_usize(nw)?;
        let a = c.read_usize(nw)?;
        let b = c.read_usize(nw)?;
        let alpha = c.read_usize(nw)?;
        let beta = c.read_usize(nw)?;
        let index = match side {
            Side::A => global,
            Side::B => global
                .checked_sub(a)
                .ok_or_else(|| Error::Malformed("B-side index below a".into()))?,
        };
        Ok(Self {
            side,
            index,
            params: BipartiteParams { a, b, alpha, beta },
            bits,
            table: c.pos(),
        })
    }

    pub fn table_len(&self) -> usize {
        match self.side {
            Side::A => self.params.alpha,
            Side::B => self.params.beta,
        }
    }

    /// First bit after this label.
    pub fn end(&self) -> usize {
        self.table + self.table_len()
    }

    fn probe(&self, k: usize) -> Result<bool> {
        self.bits.bit(self.table + k)
    }
}

/// Adjacency of two nodes from the same instance.
pub fn decode_bipartite(lu: &BipartiteView, lv: &BipartiteView) -> Result<bool> {
    if lu.params != lv.params {
        return Err(Error::Mismatch(format!(
            "bipartite parameters {:?} vs {:?}",
            lu.params, lv.params
        )));
    }
    if lu.side == lv.side {
        return Ok(false);
    }
    let (x, y) = if lu.side == Side::A { (lu, lv) } else { (lv, lu) };
    let BipartiteParams { a, b, alpha, beta } = x.params;
    if x.index >= a || y.index >= b {
        return Err(Error::Malformed("bipartite index out of range".into()));
    }
    let (i, j) = index_pair(x.index, y.index, a, b);
    if i < alpha {
        x.probe(i)
    } else if j < beta {
        y.probe(j)
    } else {
        Err(Error::Malformed("pair not covered by either table".into()))
    }
}

/// Convenience for owned labels.
pub fn decode_labels(lu: &BipartiteLabel, lv: &BipartiteLabel) -> Result<bool> {
    let (mut bu, mut bv) = (BitString::new(), BitString::new());
    lu.write(&mut bu)?;
    lv.write(&mut bv)?;
    decode_bipartite(&BipartiteView::parse(&bu, 0)?, &BipartiteView::parse(&bv, 0)?)
}
