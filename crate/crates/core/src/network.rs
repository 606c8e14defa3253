//! WOM networks: the adjacency structure, the two random generators used in
//! the experiments, the plain-text edge-list format and the influential
//! degree that drives the discount.
//!
//! Orientation follows the model: `a_ij = 1` means node `j` can recommend
//! products to node `i`. Row `i` therefore lists the nodes that influence
//! `i`, and the column sum of `j` counts how many nodes `j` influences.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A simple (loop-free, 0/1) directed-capable adjacency structure.
///
/// Stored as sorted rows: `row(i)` holds every `j` with `a_ij = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    rows: Vec<Vec<usize>>,
}

impl Graph {
    /// `n` nodes, no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            rows: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from directed entries `(i, j)` meaning `a_ij = 1`.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rows = vec![BTreeSet::new(); n];
        for (i, j) in arcs {
            insert_arc(&mut rows, n, i, j)?;
        }
        Ok(Self::from_sets(rows))
    }

    /// Builds a symmetric graph; each pair sets both `a_ij` and `a_ji`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rows = vec![BTreeSet::new(); n];
        for (i, j) in edges {
            insert_arc(&mut rows, n, i, j)?;
            insert_arc(&mut rows, n, j, i)?;
        }
        Ok(Self::from_sets(rows))
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        Graph {
            rows: (0..n)
                .map(|i| (0..n).filter(|&j| j != i).collect())
                .collect(),
        }
    }

    fn from_sets(rows: Vec<BTreeSet<usize>>) -> Self {
        Graph {
            rows: rows.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    /// Nodes `j` with `a_ij = 1`, ascending.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    /// Number of nonzero adjacency entries.
    pub fn arc_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Number of unordered pairs `{i, j}` joined in at least one direction.
    /// For symmetric graphs this is `arc_count() / 2`.
    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                if i < j || !self.has_arc(j, i) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().all(|&j| self.has_arc(j, i)))
    }

    /// Row sum of `i` (number of nodes that can recommend to `i`).
    pub fn in_degree(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    /// `Σ_j a_ji` for every `i`: how many nodes each node can recommend to.
    pub fn column_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.node_count()];
        for row in &self.rows {
            for &j in row {
                sums[j] += 1;
            }
        }
        sums
    }

    /// Relabels nodes so that old node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.node_count();
        check_permutation(perm, n)?;
        let mut rows = vec![BTreeSet::new(); n];
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                rows[perm[i]].insert(perm[j]);
            }
        }
        Ok(Self::from_sets(rows))
    }

    /// Serializes to the edge-list format read by [`Graph::parse_edge_list`].
    ///
    /// Symmetric graphs are written once per pair under a `symmetric` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.node_count());
        let symmetric = self.is_symmetric();
        if symmetric {
            out.push_str("symmetric\n");
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                if !symmetric || i < j {
                    let _ = writeln!(out, "{i} {j}");
                }
            }
        }
        out
    }

    /// Parses the edge-list format.
    ///
    /// ```text
    /// # comment
    /// n 4
    /// symmetric        (optional)
    /// 0 1
    /// 2 3 1            (optional third column: the entry value, 0 or 1)
    /// ```
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut symmetric = false;
        let mut saw_entry = false;
        let mut rows: Vec<BTreeSet<usize>> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();

            let Some(n) = n else {
                match fields.as_slice() {
                    ["n", count] => {
                        let count: usize = count
                            .parse()
                            .map_err(|_| parse_err(format!("bad node count `{count}`")))?;
                        if count == 0 {
                            return Err(parse_err("node count must be positive".into()));
                        }
                        n = Some(count);
                        rows = vec![BTreeSet::new(); count];
                        continue;
                    }
                    _ => return Err(parse_err("expected header `n <node_count>`".into())),
                }
            };

            if fields.as_slice() == ["symmetric"] {
                if symmetric || saw_entry {
                    return Err(parse_err(
                        "`symmetric` must appear once, right after the header".into(),
                    ));
                }
                symmetric = true;
                continue;
            }

            let (i, j, value) = match fields.as_slice() {
                [i, j] => (*i, *j, "1"),
                [i, j, v] => (*i, *j, *v),
                _ => return Err(parse_err(format!("expected `<i> <j>`, got `{line}`"))),
            };
            let index = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| parse_err(format!("bad node index `{s}`")))
            };
            let (i, j) = (index(i)?, index(j)?);
            let value: f64 = value
                .parse()
                .map_err(|_| parse_err(format!("bad entry value `{value}`")))?;
            saw_entry = true;
            if value == 0.0 {
                continue;
            }
            if value != 1.0 {
                return Err(Error::Validation(format!(
                    "line {line_no}: entry a_{i}{j} = {value} is outside {{0,1}}"
                )));
            }
            let at_line = |e: Error| match e {
                Error::Validation(m) => Error::Validation(format!("line {line_no}: {m}")),
                other => other,
            };
            insert_arc(&mut rows, n, i, j).map_err(at_line)?;
            if symmetric {
                insert_arc(&mut rows, n, j, i).map_err(at_line)?;
            }
        }

        if n.is_none() {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                message: "missing header `n <node_count>`".into(),
            });
        }
        Ok(Self::from_sets(rows))
    }
}

fn insert_arc(rows: &mut [BTreeSet<usize>], n: usize, i: usize, j: usize) -> Result<()> {
    if i >= n || j >= n {
        return Err(Error::Validation(format!(
            "entry ({i}, {j}) out of range for {n} nodes"
        )));
    }
    if i == j {
        return Err(Error::Validation(format!("self-loop at node {i}")));
    }
    if !rows[i].insert(j) {
        return Err(Error::Validation(format!(
            "duplicate entry ({i}, {j}): a_{i}{j} would exceed 1"
        )));
    }
    Ok(())
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::param(format!(
            "permutation has length {}, expected {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::param("not a permutation"));
        }
    }
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    Graph::parse_edge_list(&text)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, g.to_edge_list())?;
    Ok(())
}

/// Per-node influential degree `d_i`, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceVector(Vec<f64>);

impl InfluenceVector {
    pub fn zeros(n: usize) -> Self {
        InfluenceVector(vec![0.0; n])
    }

    /// Wraps explicit values; each must lie in `[0, 1]`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::param(format!("d[{i}] = {v} is outside [0, 1]")));
        }
        Ok(InfluenceVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `d_i = Σ_j a_ji / max_k Σ_j a_jk`; an edgeless graph gets `d = 0`.
pub fn influential_degree(g: &Graph) -> InfluenceVector {
    let sums = g.column_sums();
    let max = sums.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return InfluenceVector::zeros(g.node_count());
    }
    let max = max as f64;
    InfluenceVector(sums.into_iter().map(|s| s as f64 / max).collect())
}

/// Watts–Strogatz small world: ring lattice where every node links to its
/// `mean_degree / 2` nearest neighbours on each side, then each lattice edge
/// has its far endpoint rewired with probability `p`.
///
/// The edge count is always `n * mean_degree / 2`.
pub fn generate_small_world(n: usize, mean_degree: usize, p: f64, seed: u64) -> Result<Graph> {
    if mean_degree == 0 || !mean_degree.is_multiple_of(2) {
        return Err(Error::param("mean degree must be even and positive"));
    }
    if mean_degree >= n {
        return Err(Error::param(format!(
            "mean degree {mean_degree} must be smaller than the node count {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!(
            "rewiring probability {p} is outside [0, 1]"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![BTreeSet::new(); n];
    for u in 0..n {
        for offset in 1..=mean_degree / 2 {
            let v = (u + offset) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }

    // Same visiting order as the classic construction: one pass per lattice
    // distance, nodes in order within a pass.
    for offset in 1..=mean_degree / 2 {
        for u in 0..n {
            let v = (u + offset) % n;
            if !rng.random_bool(p) {
                continue;
            }
            // An earlier rewiring may already have moved this edge away.
            if !adj[u].contains(&v) {
                continue;
            }
            if let Some(w) = pick_rewire_target(&adj, u, &mut rng) {
                adj[u].remove(&v);
                adj[v].remove(&u);
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
    }
    Ok(Graph::from_sets(adj))
}

fn pick_rewire_target(adj: &[BTreeSet<usize>], u: usize, rng: &mut ChaCha8Rng) -> Option<usize> {
    let n = adj.len();
    if adj[u].len() + 1 >= n {
        return None;
    }
    for _ in 0..64 {
        let w = rng.random_range(0..n);
        if w != u && !adj[u].contains(&w) {
            return Some(w);
        }
    }
    let candidates: Vec<usize> = (0..n)
        .filter(|&w| w != u && !adj[u].contains(&w))
        .collect();
    Some(candidates[rng.random_range(0..candidates.len())])
}

/// Static-model (Chung–Lu style) scale-free graph with exactly `m_edges`
/// edges and degree exponent close to `r`.
///
/// Node `i` gets weight `(i + i0)^(-1/(r-1))`; `i0` is doubled from 1 until
/// the largest expected degree `2m w_0 / Σw` drops below `n`. Endpoints are
/// drawn independently in proportion to weight, rejecting self-loops and
/// repeated pairs, until `m_edges` distinct edges exist.
pub fn generate_scale_free(n: usize, m_edges: usize, r: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param("scale-free graph needs at least 2 nodes"));
    }
    let capacity = n * (n - 1) / 2;
    if m_edges > capacity {
        return Err(Error::param(format!(
            "{m_edges} edges exceed the simple-graph capacity {capacity} of {n} nodes"
        )));
    }
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::param(format!("power exponent {r} must exceed 1")));
    }

    let weights = static_model_weights(n, m_edges, r);
    let total: f64 = weights.iter().sum();
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cumulative.push(acc);
    }
    let draw = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.random();
        cumulative
            .partition_point(|&c| c <= u)
            .min(n - 1)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![BTreeSet::new(); n];
    let mut count = 0;
    let mut misses = 0usize;
    let miss_limit = 10_000 + 100 * m_edges;
    while count < m_edges && misses < miss_limit {
        let (i, j) = (draw(&mut rng), draw(&mut rng));
        if i == j || adj[i].contains(&j) {
            misses += 1;
            continue;
        }
        adj[i].insert(j);
        adj[j].insert(i);
        count += 1;
        misses = 0;
    }

    if count < m_edges {
        // Near capacity rejection stalls; finish by weighted sampling without
        // replacement over the remaining pairs.
        let mut pairs = Vec::new();
        let mut pair_weights = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !adj[i].contains(&j) {
                    pairs.push((i, j));
                    pair_weights.push(weights[i] * weights[j]);
                }
            }
        }
        while count < m_edges {
            let sum: f64 = pair_weights.iter().sum();
            let mut target = rng.random::<f64>() * sum;
            let mut pick = pairs.len() - 1;
            for (k, w) in pair_weights.iter().enumerate() {
                if target < *w {
                    pick = k;
                    break;
                }
                target -= w;
            }
            let (i, j) = pairs.swap_remove(pick);
            pair_weights.swap_remove(pick);
            adj[i].insert(j);
            adj[j].insert(i);
            count += 1;
        }
    }
    Ok(Graph::from_sets(adj))
}

fn static_model_weights(n: usize, m_edges: usize, r: f64) -> Vec<f64> {
    let exponent = -1.0 / (r - 1.0);
    let mut offset = 1.0_f64;
    loop {
        let weights: Vec<f64> = (0..n).map(|i| (i as f64 + offset).powf(exponent)).collect();
        let total: f64 = weights.iter().sum();
        let max_expected = 2.0 * m_edges as f64 * weights[0] / total;
        // 2m/n < n always holds, so flattening the weights terminates.
        if max_expected < n as f64 || offset > 1e12 {
            return weights;
        }
        offset *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(n: usize, center: usize) -> Graph {
        Graph::from_edges(n, (0..n).filter(|&i| i != center).map(|i| (center, i))).unwrap()
    }

    #[test]
    fn small_world_edge_counts() {
        let g = generate_small_world(100, 4, 0.1, 7).unwrap();
        assert_eq!(g.node_count(), 100);
        assert_eq!(g.edge_count(), 200);
        assert!(g.is_symmetric());

        let g = generate_small_world(10, 2, 1.0, 3).unwrap();
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn zero_rewiring_is_ring_lattice() {
        let g = generate_small_world(100, 4, 0.0, 11).unwrap();
        for i in 0..100 {
            let mut expected = vec![(i + 98) % 100, (i + 99) % 100, (i + 1) % 100, (i + 2) % 100];
            expected.sort_unstable();
            assert_eq!(g.row(i), expected.as_slice());
        }
        assert!(influential_degree(&g).as_slice().iter().all(|&d| d == 1.0));
    }

    #[test]
    fn small_world_rejects_bad_degree() {
        let err = generate_small_world(100, 3, 0.1, 0).unwrap_err();
        assert!(err.to_string().contains("mean degree must be even"));
        assert!(generate_small_world(4, 4, 0.1, 0).is_err());
        assert!(generate_small_world(10, 0, 0.1, 0).is_err());
        assert!(generate_small_world(10, 2, 1.5, 0).is_err());
    }

    #[test]
    fn scale_free_edge_counts() {
        let g = generate_scale_free(100, 162, 2.1, 5).unwrap();
        assert_eq!(g.edge_count(), 162);
        assert!(g.is_symmetric());

        let g = generate_scale_free(2, 1, 2.0, 5).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(influential_degree(&g).as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn scale_free_near_capacity_completes() {
        let g = generate_scale_free(12, 66, 1.9, 1).unwrap();
        assert_eq!(g, Graph::complete(12));
        let g = generate_scale_free(30, 400, 2.0, 1).unwrap();
        assert_eq!(g.edge_count(), 400);
    }

    #[test]
    fn scale_free_rejects_bad_input() {
        assert!(generate_scale_free(10, 46, 2.0, 0).is_err());
        assert!(generate_scale_free(1, 0, 2.0, 0).is_err());
        assert!(generate_scale_free(10, 5, 1.0, 0).is_err());
    }

    #[test]
    fn heavier_tail_for_smaller_exponent() {
        let mean_max = |r: f64| {
            (0..100u64)
                .map(|s| {
                    let g = generate_scale_free(100, 162, r, s).unwrap();
                    (0..100).map(|i| g.in_degree(i)).max().unwrap() as f64
                })
                .sum::<f64>()
                / 100.0
        };
        let (heavy, light) = (mean_max(1.9), mean_max(2.1));
        assert!(heavy > light, "{heavy} vs {light}");
    }

    #[test]
    fn influential_degree_examples() {
        let d = influential_degree(&star(5, 2));
        assert_eq!(d.as_slice(), &[0.25, 0.25, 1.0, 0.25, 0.25]);

        let d = influential_degree(&Graph::empty(3));
        assert_eq!(d.as_slice(), &[0.0, 0.0, 0.0]);

        let d = influential_degree(&Graph::complete(6));
        assert!(d.as_slice().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn influential_degree_uses_columns() {
        // 1 and 2 both listen to 0; node 0 influences two nodes.
        let g = Graph::from_arcs(3, [(1, 0), (2, 0), (0, 1)]).unwrap();
        assert_eq!(influential_degree(&g).as_slice(), &[1.0, 0.5, 0.0]);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = generate_small_world(100, 4, 0.1, 1).unwrap();
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);

        let g = Graph::from_arcs(4, [(0, 1), (2, 1), (3, 0)]).unwrap();
        let text = g.to_edge_list();
        assert!(!text.contains("symmetric"));
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn edge_list_edge_cases() {
        let g = Graph::parse_edge_list("n 3\n").unwrap();
        assert_eq!(g, Graph::empty(3));

        let g = Graph::parse_edge_list("# hi\nn 3\nsymmetric\n# edge\n0 2\n1 2 0\n").unwrap();
        assert_eq!(g, Graph::from_edges(3, [(0, 2)]).unwrap());

        let err = Graph::parse_edge_list("n 3\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("self-loop")), "{err}");

        let err = Graph::parse_edge_list("n 3\n0 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");

        let err = Graph::parse_edge_list("n 3\n0 1\n0 1\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");

        let err = Graph::parse_edge_list("n 3\n0 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let err = Graph::parse_edge_list("0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");

        let err = Graph::parse_edge_list("n 3\n0 5\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sw1.txt");
        let g = generate_small_world(100, 4, 0.1, 42).unwrap();
        save_graph(&g, &path).unwrap();
        assert_eq!(load_graph(&path).unwrap(), g);
    }
}
