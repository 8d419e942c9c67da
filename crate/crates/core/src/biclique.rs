//! Greedy extraction of balanced bicliques from a bipartite graph.
//!
//! Bicliques are peeled off while the residual graph stays large and dense;
//! the leftover graph gets a neighbour map in which every residual edge is
//! recorded by at least one endpoint.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXHAUSTIVE_LIMIT: usize = 24;
const TRIALS: usize = 32;

/// Threshold profile for the extraction loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum BicliqueProfile {
    /// `w > max(c_min, n^{3/4})` and `|E| > w^2 / log2^6 w`.
    #[default]
    Paper,
    /// `w > c_min` and `|E| >= 1`, so small graphs still get bicliques.
    Force,
}

/// How the target biclique size is chosen before falling back downwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QPolicy {
    /// `max(1, floor(log2 w / max(1, log2(w^2/|E|))))`.
    Formula,
    StartAt(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BicliqueParams {
    pub profile: BicliqueProfile,
    pub c_min: usize,
    /// Global node count used in every threshold.
    pub n_ref: usize,
    pub q: QPolicy,
    pub seed: u64,
}

impl BicliqueParams {
    pub fn new(profile: BicliqueProfile, n_ref: usize) -> Self {
        let c_min = match profile {
            BicliqueProfile::Paper => 64,
            BicliqueProfile::Force => 2,
        };
        Self {
            profile,
            c_min,
            n_ref,
            q: QPolicy::Formula,
            seed: 0,
        }
    }

    pub fn with_q(mut self, q: QPolicy) -> Self {
        self.q = q;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn size_threshold(&self) -> f64 {
        match self.profile {
            BicliqueProfile::Paper => (self.c_min as f64).max((self.n_ref as f64).powf(0.75)),
            BicliqueProfile::Force => self.c_min as f64,
        }
    }

    fn size_ok(&self, w: usize) -> bool {
        w as f64 > self.size_threshold()
    }

    fn dense_ok(&self, w: usize, e: usize) -> bool {
        match self.profile {
            BicliqueProfile::Paper => {
                if w < 2 {
                    return false;
                }
                let wf = w as f64;
                e as f64 > wf * wf / wf.log2().powi(6)
            }
            BicliqueProfile::Force => e >= 1,
        }
    }

    /// Loop condition of the extraction.
    pub fn continues(&self, w: usize, e: usize) -> bool {
        self.size_ok(w) && self.dense_ok(w, e)
    }

    fn start_q(&self, w: usize, e: usize) -> usize {
        match self.q {
            QPolicy::StartAt(q) => q.max(1),
            QPolicy::Formula => {
                if w < 2 || e == 0 {
                    return 1;
                }
                let wf = w as f64;
                let ratio = (wf * wf / e as f64).log2().max(1.0);
                ((wf.log2() / ratio).floor() as usize).max(1)
            }
        }
    }
}

/// Bipartite graph with sides `0..a` and `0..b` and a live flag per node.
#[derive(Clone, Debug)]
pub struct Residual {
    a_adj: Vec<FixedBitSet>,
    b_adj: Vec<FixedBitSet>,
    a_live: FixedBitSet,
    b_live: FixedBitSet,
}

impl Residual {
    pub fn new<F>(a: usize, b: usize, adjacent: F) -> Self
    where
        F: Fn(usize, usize) -> bool,
    {
        let mut a_adj = vec![FixedBitSet::with_capacity(b); a];
        let mut b_adj = vec![FixedBitSet::with_capacity(a); b];
        for x in 0..a {
            for y in 0..b {
                if adjacent(x, y) {
                    a_adj[x].insert(y);
                    b_adj[y].insert(x);
                }
            }
        }
        let mut a_live = FixedBitSet::with_capacity(a);
        a_live.insert_range(..);
        let mut b_live = FixedBitSet::with_capacity(b);
        b_live.insert_range(..);
        Self {
            a_adj,
            b_adj,
            a_live,
            b_live,
        }
    }

    pub fn from_edges(a: usize, b: usize, edges: &[(usize, usize)]) -> Self {
        let mut set = FixedBitSet::with_capacity(a * b);
        for &(x, y) in edges {
            set.insert(x * b + y);
        }
        Self::new(a, b, |x, y| set.contains(x * b + y))
    }

    pub fn a(&self) -> usize {
        self.a_adj.len()
    }

    pub fn b(&self) -> usize {
        self.b_adj.len()
    }

    pub fn live_count(&self) -> usize {
        self.a_live.count_ones(..) + self.b_live.count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.a_live.ones().map(|x| self.a_adj[x].count_ones(..)).sum()
    }

    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.a_live.contains(x) && self.b_live.contains(y) && self.a_adj[x].contains(y)
    }

    pub fn a_live(&self) -> impl Iterator<Item = usize> + '_ {
        self.a_live.ones()
    }

    pub fn b_live(&self) -> impl Iterator<Item = usize> + '_ {
        self.b_live.ones()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.a_live
            .ones()
            .flat_map(|x| self.a_adj[x].ones().map(move |y| (x, y)))
            .collect()
    }

    /// Drops the nodes and every edge touching them.
    pub fn remove(&mut self, xs: &[usize], ys: &[usize]) {
        for &x in xs {
            self.a_live.set(x, false);
            for y in self.a_adj[x].ones().collect::<Vec<_>>() {
                self.b_adj[y].set(x, false);
            }
            self.a_adj[x].clear();
        }
        for &y in ys {
            self.b_live.set(y, false);
            for x in self.b_adj[y].ones().collect::<Vec<_>>() {
                self.a_adj[x].set(y, false);
            }
            self.b_adj[y].clear();
        }
    }

    fn side(&self, a_side: bool) -> (&[FixedBitSet], &FixedBitSet) {
        if a_side {
            (&self.a_adj, &self.a_live)
        } else {
            (&self.b_adj, &self.b_live)
        }
    }
}

/// Picks `q` nodes of one side whose common neighbourhood has `q` nodes.
/// Returns `(A_q, B_q)`, both sorted.
pub fn find_biclique(g: &Residual, q: usize, rng: &mut ChaCha8Rng) -> Option<(Vec<usize>, Vec<usize>)> {
    assert!(q >= 1);
    let pick = |a_side: bool| -> Vec<usize> {
        let (adj, live) = g.side(a_side);
        live.ones().filter(|&x| adj[x].count_ones(..) >= q).collect()
    };
    let (ca, cb) = (pick(true), pick(false));
    if ca.len() < q || cb.len() < q {
        return None;
    }
    let avg = |c: &[usize], adj: &[FixedBitSet]| {
        c.iter().map(|&x| adj[x].count_ones(..)).sum::<usize>() as f64 / c.len() as f64
    };
    let a_side = avg(&ca, &g.a_adj) >= avg(&cb, &g.b_adj);
    let (cands, adj) = if a_side { (ca, &g.a_adj) } else { (cb, &g.b_adj) };

    let found = if g.live_count() <= EXHAUSTIVE_LIMIT {
        exhaustive(&cands, adj, q)
    } else {
        sampled(&cands, adj, q, rng)
    };
    let (mut chosen, common) = found?;
    chosen.sort_unstable();
    let mut other: Vec<usize> = common.ones().take(q).collect();
    other.sort_unstable();
    Some(if a_side { (chosen, other) } else { (other, chosen) })
}

fn exhaustive(cands: &[usize], adj: &[FixedBitSet], q: usize) -> Option<(Vec<usize>, FixedBitSet)> {
    fn go(
        cands: &[usize],
        adj: &[FixedBitSet],
        q: usize,
        from: usize,
        chosen: &mut Vec<usize>,
        common: &FixedBitSet,
    ) -> Option<FixedBitSet> {
        if chosen.len() == q {
            return Some(common.clone());
        }
        for k in from..cands.len() {
            if cands.len() - k < q - chosen.len() {
                break;
            }
            let x = cands[k];
            let next = if chosen.is_empty() {
                adj[x].clone()
            } else {
                let mut c = common.clone();
                c.intersect_with(&adj[x]);
                c
            };
            if next.count_ones(..) < q {
                continue;
            }
            chosen.push(x);
            if let Some(done) = go(cands, adj, q, k + 1, chosen, &next) {
                return Some(done);
            }
            chosen.pop();
        }
        None
    }
    let mut chosen = Vec::with_capacity(q);
    let common = go(cands, adj, q, 0, &mut chosen, &FixedBitSet::new())?;
    Some((chosen, common))
}

fn sampled(
    cands: &[usize],
    adj: &[FixedBitSet],
    q: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(Vec<usize>, FixedBitSet)> {
    let mut pool = cands.to_vec();
    for _ in 0..TRIALS {
        let first = pool[rng.random_range(0..pool.len())];
        pool.shuffle(rng);
        let mut chosen = vec![first];
        let mut common = adj[first].clone();
        for &x in &pool {
            if chosen.len() == q {
                break;
            }
            if x == first {
                continue;
            }
            let mut next = common.clone();
            next.intersect_with(&adj[x]);
            if next.count_ones(..) >= q {
                chosen.push(x);
                common = next;
            }
        }
        if chosen.len() == q {
            return Some((chosen, common));
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BicliqueDecomposition {
    /// `(A_i, B_i)` in extraction order, each side sorted.
    pub bicliques: Vec<(Vec<usize>, Vec<usize>)>,
    pub a_rest: Vec<usize>,
    pub b_rest: Vec<usize>,
    pub n_ref: usize,
    /// The loop stopped because the residual graph was small, not sparse.
    pub stopped_by_size: bool,
}

/// Runs the extraction loop. `g` is left as the residual graph.
pub fn find_bicliques(g: &mut Residual, params: &BicliqueParams) -> BicliqueDecomposition {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut bicliques = Vec::new();
    loop {
        let (w, e) = (g.live_count(), g.edge_count());
        if !params.continues(w, e) {
            break;
        }
        let mut q = params.start_q(w, e);
        let found = loop {
            if let Some(k) = find_biclique(g, q, &mut rng) {
                break Some(k);
            }
            if q == 1 {
                break None;
            }
            q -= 1;
        };
        let Some((xs, ys)) = found else { break };
        g.remove(&xs, &ys);
        bicliques.push((xs, ys));
    }
    BicliqueDecomposition {
        bicliques,
        a_rest: g.a_live().collect(),
        b_rest: g.b_live().collect(),
        n_ref: params.n_ref,
        stopped_by_size: !params.size_ok(g.live_count()),
    }
}

/// `N_rest` for both sides, as sorted neighbour lists indexed by local id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RestNeighborMap {
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
}

impl RestNeighborMap {
    /// Whether the edge `(x, y)` is recorded by either endpoint.
    pub fn covers(&self, x: usize, y: usize) -> bool {
        self.a[x].binary_search(&y).is_ok() || self.b[y].binary_search(&x).is_ok()
    }
}

/// Neighbour map of the residual graph: full neighbourhoods after a
/// size stop, otherwise high-degree nodes keep only high-degree neighbours.
pub fn build_n_rest(g: &Residual, dec: &BicliqueDecomposition) -> RestNeighborMap {
    let n = dec.n_ref.max(2) as f64;
    let big_at = n / n.log2().powi(3);
    let mut map = RestNeighborMap {
        a: vec![Vec::new(); g.a()],
        b: vec![Vec::new(); g.b()],
    };
    let a_big: Vec<bool> = (0..g.a())
        .map(|x| !dec.stopped_by_size && g.a_live.contains(x) && g.a_adj[x].count_ones(..) as f64 >= big_at)
        .collect();
    let b_big: Vec<bool> = (0..g.b())
        .map(|y| !dec.stopped_by_size && g.b_live.contains(y) && g.b_adj[y].count_ones(..) as f64 >= big_at)
        .collect();
    for x in g.a_live() {
        map.a[x] = g.a_adj[x].ones().filter(|&y| !a_big[x] || b_big[y]).collect();
    }
    for y in g.b_live() {
        map.b[y] = g.b_adj[y].ones().filter(|&x| !b_big[y] || a_big[x]).collect();
    }
    map
}
