//! Random graph generators and the ground-truth verification harness.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`.

use std::fmt;

use fixedbitset::FixedBitSet;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitio::BitString;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{oracle_matrix_with, transitive_closure, Dag, Digraph};
use crate::scheme::{encode, stats, EncodeOptions, LabelSet};

/// Above this many nodes `verify` samples source nodes instead of checking
/// every pair.
pub const EXHAUSTIVE_MAX_N: usize = 2000;
const SAMPLE_SOURCES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphKind {
    /// Edges go forward in a random permutation.
    Dag,
    /// Every ordered pair independently.
    Digraph,
    /// Transitive closure of a random DAG.
    Poset,
    /// Nodes spread over layers; edges only go to later layers.
    Layered,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub kind: GraphKind,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    /// Layer count for [`GraphKind::Layered`]; defaults to `ceil(sqrt n)`.
    pub layers: Option<usize>,
}

impl GenSpec {
    pub fn new(kind: GraphKind, n: usize, p: f64, seed: u64) -> Self {
        Self {
            kind,
            n,
            p,
            seed,
            layers: None,
        }
    }
}

pub fn generate(spec: &GenSpec) -> Digraph {
    let GenSpec { kind, n, p, seed, .. } = *spec;
    let p = p.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    match kind {
        GraphKind::Digraph => {
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
        }
        GraphKind::Dag | GraphKind::Poset => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(p) {
                        edges.push((perm[i], perm[j]));
                    }
                }
            }
        }
        GraphKind::Layered => {
            let k = spec.layers.unwrap_or_else(|| (n as f64).sqrt().ceil() as usize).max(1);
            let layer: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            for u in 0..n {
                for v in 0..n {
                    if layer[u] < layer[v] && rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
        }
    }
    let g = Digraph::from_edges(n, edges).expect("generated ids in range");
    if kind == GraphKind::Poset {
        transitive_closure(&Dag::new(g).expect("forward edges only")).into_graph()
    } else {
        g
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub n: usize,
    pub pairs_checked: u64,
    pub mismatches: u64,
    /// Smallest mismatching `(u, v)` in row-major order.
    pub first_mismatch: Option<(usize, usize)>,
    pub max_bits: usize,
    pub mean_bits: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }

    pub const CSV_HEADER: &'static str = "n,pairs_checked,mismatches,max_bits,mean_bits";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.2}",
            self.n, self.pairs_checked, self.mismatches, self.max_bits, self.mean_bits
        )
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "pairs_checked={}", self.pairs_checked)?;
        writeln!(f, "mismatches={}", self.mismatches)?;
        if let Some((u, v)) = self.first_mismatch {
            writeln!(f, "first_mismatch={u},{v}")?;
        }
        writeln!(f, "max_bits={}", self.max_bits)?;
        write!(f, "mean_bits={:.2}", self.mean_bits)
    }
}

/// Encodes `g` and checks it against the oracle.
pub fn verify(g: &Digraph, opts: &EncodeOptions) -> Result<VerifyReport> {
    let ls = encode(g, opts)?;
    Ok(verify_labels(g, &ls, opts.exec))
}

fn reach_row(g: &Digraph, u: usize) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(g.n());
    seen.insert(u);
    let mut stack = vec![u];
    while let Some(x) = stack.pop() {
        for &y in g.successors(x) {
            if !seen.put(y as usize) {
                stack.push(y as usize);
            }
        }
    }
    seen
}

/// Compares every query answer (or a sample of rows for large graphs)
/// with BFS reachability. A query that errors counts as a mismatch.
pub fn verify_labels(g: &Digraph, ls: &LabelSet, exec: Exec) -> VerifyReport {
    let n = g.n();
    let sources: Vec<usize> = if n <= EXHAUSTIVE_MAX_N {
        (0..n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mut s: Vec<usize> = rand::seq::index::sample(&mut rng, n, SAMPLE_SOURCES).into_vec();
        s.sort_unstable();
        s
    };
    let truth = (n <= EXHAUSTIVE_MAX_N).then(|| oracle_matrix_with(g, exec));
    let rows = exec.map_slice(&sources, |&u| {
        let owned;
        let row = match &truth {
            Some(m) => m.row(u),
            None => {
                owned = reach_row(g, u);
                &owned
            }
        };
        let mut bad = 0u64;
        let mut first = None;
        for v in 0..n {
            let ok = matches!(ls.query(u, v), Ok(ans) if ans == row.contains(v));
            if !ok {
                bad += 1;
                first.get_or_insert((u, v));
            }
        }
        (bad, first)
    });
    let (max_bits, mean_bits) = stats(ls).map_or((0, 0.0), |s| (s.max_bits, s.mean_bits));
    VerifyReport {
        n,
        pairs_checked: (sources.len() * n) as u64,
        mismatches: rows.iter().map(|r| r.0).sum(),
        first_mismatch: rows.iter().find_map(|r| r.1),
        max_bits,
        mean_bits,
    }
}

/// Table bits the decoder reads while answering `(u, v)`, as `(node, bit)`.
pub fn traced_table_bits(ls: &LabelSet, u: usize, v: usize) -> Result<Vec<(usize, usize)>> {
    let (lu, lv) = (ls.label(u)?, ls.label(v)?);
    crate::probe::start_trace();
    let answer = crate::scheme::query(lu, lv);
    let trace = crate::probe::take_trace();
    answer?;
    Ok(trace
        .into_iter()
        .map(|(buf, bit)| (if buf == lu.id() { u } else { v }, bit))
        .collect())
}

/// Which bit a corruption trial flipped, and through which query it was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Corruption {
    pub node: usize,
    pub bit: usize,
    pub via: (usize, usize),
}

/// Flips one table bit that some query actually reads. Pairs are drawn at
/// random until one consults a table.
pub fn corrupt_probed_bit(ls: &LabelSet, seed: u64) -> Result<(LabelSet, Corruption)> {
    let n = ls.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100_000 {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        let bits = traced_table_bits(ls, u, v)?;
        if let Some(&(node, bit)) = bits.choose(&mut rng) {
            let mut out = ls.clone();
            out.labels[node].flip(bit)?;
            return Ok((out, Corruption { node, bit, via: (u, v) }));
        }
    }
    Err(Error::Mismatch("no query reads a table bit".into()))
}

/// Flips bit `bit` of label `node` in a copy.
pub fn flip_bit(ls: &LabelSet, node: usize, bit: usize) -> Result<LabelSet> {
    let mut out = ls.clone();
    let label: &mut BitString = out
        .labels
        .get_mut(node)
        .ok_or(Error::NodeOutOfRange { node, n: ls.n() })?;
    label.flip(bit)?;
    Ok(out)
}
