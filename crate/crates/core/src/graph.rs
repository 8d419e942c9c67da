//! Directed graphs, SCC condensation, transitive closure and layering.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::exec::Exec;

/// A simple directed graph on `[0, n)`: no self-loops, no parallel edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    adj: Vec<Vec<u32>>,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph, silently dropping self-loops and repeated pairs.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { node: x, n });
                }
            }
            if u != v {
                adj[u].push(v as u32);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { n, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, u: usize) -> &[u32] {
        &self.adj[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v as usize)))
    }

    /// Kahn order, or `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<u32>> {
        let mut indeg = vec![0usize; self.n];
        for (_, v) in self.edges() {
            indeg[v] += 1;
        }
        let mut order: Vec<u32> = (0..self.n as u32).filter(|&v| indeg[v as usize] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let u = order[head] as usize;
            head += 1;
            for &v in &self.adj[u] {
                indeg[v as usize] -= 1;
                if indeg[v as usize] == 0 {
                    order.push(v);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }
}

/// A [`Digraph`] known to be acyclic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag(Digraph);

impl Dag {
    pub fn new(g: Digraph) -> Result<Self> {
        match g.topological_order() {
            Some(_) => Ok(Dag(g)),
            None => Err(Error::Cyclic),
        }
    }

    pub fn graph(&self) -> &Digraph {
        &self.0
    }

    pub fn into_graph(self) -> Digraph {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn topological_order(&self) -> Vec<u32> {
        self.0.topological_order().expect("Dag is acyclic")
    }
}

/// Dense `n x n` relation, one bitset row per source node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<FixedBitSet>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            rows: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn from_rows(rows: Vec<FixedBitSet>) -> Self {
        Self { rows }
    }

    pub fn from_digraph(g: &Digraph) -> Self {
        let mut m = Self::new(g.n());
        for (u, v) in g.edges() {
            m.set(u, v, true);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn set(&mut self, u: usize, v: usize, on: bool) {
        self.rows[u].set(v, on);
    }

    pub fn row(&self, u: usize) -> &FixedBitSet {
        &self.rows[u]
    }

    pub fn row_mut(&mut self, u: usize) -> &mut FixedBitSet {
        &mut self.rows[u]
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, r)| r.ones().map(move |v| (u, v)))
    }

    pub fn to_digraph(&self) -> Digraph {
        Digraph::from_edges(self.n(), self.edges().filter(|&(u, v)| u != v)).expect("indices in range")
    }
}

/// Output of [`scc_condense`].
#[derive(Clone, Debug)]
pub struct Condensation {
    /// Same node set as the input; each SCC is a chain, cross edges run from
    /// the last node of one chain to the first node of the next.
    pub dag: Dag,
    /// Component index per node; components are numbered in topological order.
    pub scc_id: Vec<u32>,
    /// Members of each component in discovery order.
    pub components: Vec<Vec<u32>>,
}

/// Tarjan's algorithm, iterative. Components come out in reverse
/// topological order, each listed in discovery (preorder) order.
fn tarjan(g: &Digraph) -> Vec<Vec<u32>> {
    let n = g.n();
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0u32;
    let mut call: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = counter;
        low[root as usize] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            let succ = g.successors(v as usize);
            if *next < succ.len() {
                let w = succ[*next];
                *next += 1;
                if index[w as usize] == UNSEEN {
                    index[w as usize] = counter;
                    low[w as usize] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w as usize] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable_by_key(|&x| index[x as usize]);
                comps.push(comp);
            }
        }
    }
    comps
}

/// Collapses strongly connected components into chains so that reachability
/// between different components is preserved while the graph becomes acyclic.
pub fn scc_condense(g: &Digraph) -> Condensation {
    let mut components = tarjan(g);
    components.reverse();
    let mut scc_id = vec![0u32; g.n()];
    for (c, members) in components.iter().enumerate() {
        for &v in members {
            scc_id[v as usize] = c as u32;
        }
    }
    let mut edges = Vec::new();
    for members in &components {
        edges.extend(members.windows(2).map(|p| (p[0] as usize, p[1] as usize)));
    }
    for (u, v) in g.edges() {
        let (cu, cv) = (scc_id[u] as usize, scc_id[v] as usize);
        if cu != cv {
            let last = *components[cu].last().unwrap() as usize;
            let first = components[cv][0] as usize;
            edges.push((last, first));
        }
    }
    let dag = Dag::new(Digraph::from_edges(g.n(), edges).expect("in range")).expect("condensation is acyclic");
    Condensation {
        dag,
        scc_id,
        components,
    }
}

/// Strict reachability rows of a DAG: `rows[u][v]` iff `u ~> v` and `u != v`.
///
/// Nodes are processed by height (longest path to a sink); all rows of one
/// height depend only on lower heights, so each level is computed in parallel.
pub fn closure_matrix_with(d: &Dag, exec: Exec) -> BitMatrix {
    let g = d.graph();
    let n = g.n();
    let order = d.topological_order();
    let mut height = vec![0usize; n];
    for &u in order.iter().rev() {
        let u = u as usize;
        height[u] = g
            .successors(u)
            .iter()
            .map(|&v| height[v as usize] + 1)
            .max()
            .unwrap_or(0);
    }
    let levels = height.iter().copied().max().map_or(0, |h| h + 1);
    let mut by_level: Vec<Vec<u32>> = vec![Vec::new(); levels];
    for u in 0..n {
        by_level[height[u]].push(u as u32);
    }
    let mut rows = vec![FixedBitSet::with_capacity(n); n];
    for level in &by_level {
        let done = &rows;
        let fresh = exec.map_slice(level, |&u| {
            let mut row = FixedBitSet::with_capacity(n);
            for &v in g.successors(u as usize) {
                if !row.contains(v as usize) {
                    row.insert(v as usize);
                    row.union_with(&done[v as usize]);
                }
            }
            row
        });
        for (&u, row) in level.iter().zip(fresh) {
            rows[u as usize] = row;
        }
    }
    BitMatrix::from_rows(rows)
}

pub fn closure_matrix(d: &Dag) -> BitMatrix {
    closure_matrix_with(d, Exec::default())
}

/// Transitive closure `(V, E_c)` of a DAG.
pub fn transitive_closure(d: &Dag) -> Dag {
    Dag(closure_matrix(d).to_digraph())
}

/// Checked variant that accepts any graph and rejects cycles.
pub fn transitive_closure_of(g: &Digraph) -> Result<Dag> {
    Ok(transitive_closure(&Dag::new(g.clone())?))
}

/// A transitively closed DAG partitioned into longest-path layers.
#[derive(Clone, Debug)]
pub struct LayeredDag {
    pub closure: BitMatrix,
    /// `layers[i]` holds the nodes whose longest incoming path has length `i`.
    pub layers: Vec<Vec<u32>>,
    pub layer_of: Vec<u32>,
    /// Topological index `I(v)`: layers enumerated in order, ids ascending.
    pub topo: Vec<u32>,
    /// Inverse of `topo`.
    pub order: Vec<u32>,
}

impl LayeredDag {
    pub fn n(&self) -> usize {
        self.topo.len()
    }
}

impl LayeredDag {
    /// Longest-path layering of `d`, given its strict closure.
    pub fn from_closure(d: &Dag, closure: BitMatrix) -> Self {
        let g = d.graph();
        let n = g.n();
        let mut depth = vec![0u32; n];
        for &u in &d.topological_order() {
            for &v in g.successors(u as usize) {
                depth[v as usize] = depth[v as usize].max(depth[u as usize] + 1);
            }
        }
        let k = depth.iter().copied().max().map_or(0, |m| m as usize + 1);
        let mut layers = vec![Vec::new(); k];
        for v in 0..n {
            layers[depth[v] as usize].push(v as u32);
        }
        let order: Vec<u32> = layers.iter().flatten().copied().collect();
        let mut topo = vec![0u32; n];
        for (i, &v) in order.iter().enumerate() {
            topo[v as usize] = i as u32;
        }
        Self {
            closure,
            layers,
            layer_of: depth,
            topo,
            order,
        }
    }
}

/// Longest-path layering. The closure is computed here, so any DAG works;
/// closing first does not change the layers.
pub fn longest_path_layers(d: &Dag) -> LayeredDag {
    longest_path_layers_with(d, Exec::default())
}

pub fn longest_path_layers_with(d: &Dag, exec: Exec) -> LayeredDag {
    LayeredDag::from_closure(d, closure_matrix_with(d, exec))
}

/// Ground truth: BFS from `u`. Every node reaches itself.
pub fn oracle_reach(g: &Digraph, u: usize, v: usize) -> Result<bool> {
    for x in [u, v] {
        if x >= g.n() {
            return Err(Error::NodeOutOfRange { node: x, n: g.n() });
        }
    }
    let mut seen = vec![false; g.n()];
    let mut queue = vec![u];
    seen[u] = true;
    while let Some(x) = queue.pop() {
        if x == v {
            return Ok(true);
        }
        for &y in g.successors(x) {
            if !seen[y as usize] {
                seen[y as usize] = true;
                queue.push(y as usize);
            }
        }
    }
    Ok(false)
}

/// Reflexive reachability rows by bitset BFS from every node; independent of
/// [`closure_matrix`] and usable on cyclic graphs.
pub fn oracle_matrix_with(g: &Digraph, exec: Exec) -> BitMatrix {
    let n = g.n();
    let adj = BitMatrix::from_digraph(g);
    let rows = exec.map(n, |u| {
        let mut seen = FixedBitSet::with_capacity(n);
        seen.insert(u);
        let mut queue = vec![u];
        while let Some(x) = queue.pop() {
            let mut fresh = adj.row(x).clone();
            fresh.difference_with(&seen);
            seen.union_with(&fresh);
            queue.extend(fresh.ones());
        }
        seen
    });
    BitMatrix::from_rows(rows)
}

pub fn oracle_matrix(g: &Digraph) -> BitMatrix {
    oracle_matrix_with(g, Exec::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Digraph {
        Digraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    fn random_digraph(n: usize, density: u32, seed: u64) -> Digraph {
        let mut x = seed | 1;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                if (x % 100) < density as u64 {
                    edges.push((u, v));
                }
            }
        }
        Digraph::from_edges(n, edges).unwrap()
    }

    fn random_dag(n: usize, density: u32, seed: u64) -> Dag {
        let g = random_digraph(n, density, seed);
        Dag::new(Digraph::from_edges(n, g.edges().filter(|&(u, v)| u < v)).unwrap()).unwrap()
    }

    #[test]
    fn ingestion_drops_self_loops_and_duplicates() {
        let g = graph(3, &[(0, 0), (0, 1), (0, 1), (1, 2)]);
        assert_eq!(g.edge_count(), 2);
        assert!(Digraph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn condense_cycle_with_tail() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        let c = scc_condense(&g);
        assert_eq!(c.scc_id[0], c.scc_id[1]);
        assert_eq!(c.scc_id[1], c.scc_id[2]);
        assert_ne!(c.scc_id[0], c.scc_id[3]);
        // chain over the cycle plus exactly one edge into 3
        assert_eq!(c.dag.graph().edge_count(), 3);
        let big = &c.components[c.scc_id[0] as usize];
        assert_eq!(big.len(), 3);
        assert!(c.dag.graph().has_edge(big[0] as usize, big[1] as usize));
        assert!(c.dag.graph().has_edge(big[1] as usize, big[2] as usize));
        assert!(c.dag.graph().has_edge(big[2] as usize, 3));
        assert!(oracle_reach(&g, 0, 3).unwrap());
        assert!(oracle_reach(c.dag.graph(), 0, 3).unwrap());
    }

    #[test]
    fn condense_single_node() {
        let c = scc_condense(&Digraph::empty(1));
        assert_eq!(c.components.len(), 1);
        assert_eq!(c.dag.graph().edge_count(), 0);
    }

    #[test]
    fn condense_dag_is_identity_on_reachability() {
        let d = random_dag(12, 25, 7);
        let c = scc_condense(d.graph());
        let mut ids = c.scc_id.clone();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 12);
        assert_eq!(oracle_matrix(d.graph()), oracle_matrix(c.dag.graph()));
    }

    #[test]
    fn scc_ids_are_topological() {
        let g = random_digraph(30, 6, 99);
        let c = scc_condense(&g);
        for (u, v) in g.edges() {
            assert!(c.scc_id[u] <= c.scc_id[v]);
        }
    }

    #[test]
    fn closure_examples() {
        let path = Dag::new(graph(3, &[(0, 1), (1, 2)])).unwrap();
        let closed = transitive_closure(&path);
        let mut e: Vec<_> = closed.graph().edges().collect();
        e.sort_unstable();
        assert_eq!(e, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(transitive_closure(&closed), closed);
        assert!(matches!(
            transitive_closure_of(&graph(2, &[(0, 1), (1, 0)])),
            Err(Error::Cyclic)
        ));
    }

    #[test]
    fn closure_matches_bfs_on_random_dag() {
        let d = random_dag(8, 30, 3);
        let c = closure_matrix(&d);
        for u in 0..8 {
            for v in 0..8 {
                assert_eq!(c.get(u, v), u != v && oracle_reach(d.graph(), u, v).unwrap());
            }
        }
    }

    #[test]
    fn closure_modes_agree() {
        let d = random_dag(150, 8, 11);
        assert_eq!(
            closure_matrix_with(&d, Exec::Sequential),
            closure_matrix_with(&d, Exec::Parallel)
        );
    }

    #[test]
    fn layering_examples() {
        let d = Dag::new(graph(4, &[(0, 2), (1, 2), (2, 3), (0, 3), (1, 3)])).unwrap();
        let l = longest_path_layers(&d);
        assert_eq!(l.layers, vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(l.order, vec![0, 1, 2, 3]);

        let anti = longest_path_layers(&Dag::new(Digraph::empty(5)).unwrap());
        assert_eq!(anti.layers, vec![vec![0, 1, 2, 3, 4]]);

        let chain = Dag::new(graph(4, &[(3, 2), (2, 1), (1, 0)])).unwrap();
        let l = longest_path_layers(&transitive_closure(&chain));
        assert_eq!(l.layers, vec![vec![3], vec![2], vec![1], vec![0]]);
        assert_eq!(l.topo, vec![3, 2, 1, 0]);
    }

    #[test]
    fn oracle_examples() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        assert!(oracle_reach(&g, 1, 1).unwrap());
        assert!(oracle_reach(&g, 0, 2).unwrap());
        assert!(!oracle_reach(&g, 2, 0).unwrap());
        assert!(oracle_reach(&g, 0, 3).is_err());
    }

    proptest! {
        #[test]
        fn condensation_preserves_cross_component_reachability(n in 1usize..50, density in 0u32..20, seed: u64) {
            let g = random_digraph(n, density, seed);
            let c = scc_condense(&g);
            let before = oracle_matrix(&g);
            let after = oracle_matrix(c.dag.graph());
            for u in 0..n {
                for v in 0..n {
                    if c.scc_id[u] != c.scc_id[v] {
                        prop_assert_eq!(before.get(u, v), after.get(u, v));
                    } else {
                        prop_assert!(before.get(u, v));
                    }
                }
            }
        }

        #[test]
        fn closure_is_idempotent_and_monotone(n in 1usize..40, density in 0u32..40, seed: u64, extra in 0usize..40) {
            let d = random_dag(n, density, seed);
            let c = transitive_closure(&d);
            prop_assert_eq!(&transitive_closure(&c), &c);
            // adding a forward edge never removes reachability
            let (a, b) = (extra % n, (extra * 7 + 3) % n);
            let (a, b) = (a.min(b), a.max(b));
            let bigger = Dag::new(Digraph::from_edges(n, d.graph().edges().chain([(a, b)])).unwrap()).unwrap();
            let cb = closure_matrix(&bigger);
            for (u, v) in c.graph().edges() {
                prop_assert!(cb.get(u, v));
            }
        }

        #[test]
        fn layers_are_antichains_with_longest_path_predecessors(n in 1usize..60, density in 0u32..50, seed: u64) {
            let d = random_dag(n, density, seed);
            let l = longest_path_layers(&d);
            for (u, v) in l.closure.edges() {
                prop_assert!(l.layer_of[u] < l.layer_of[v]);
                prop_assert!(l.topo[u] < l.topo[v]);
            }
            for (i, layer) in l.layers.iter().enumerate().skip(1) {
                prop_assert!(!layer.is_empty());
                for &v in layer {
                    prop_assert!(l.layers[i - 1].iter().any(|&p| l.closure.get(p as usize, v as usize)));
                }
            }
        }
    }
}
