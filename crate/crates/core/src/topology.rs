//! Communication graphs, doubly stochastic mixing matrices, and their
//! spectral diagnostics.
//!
//! Mixing matrices are symmetric by construction: the lazy uniform walk
//! `P = (A + I) / (deg + 1)` on regular graphs, or Metropolis weights
//! `P_vw = 1 / (1 + max(deg_v, deg_w))` on arbitrary graphs. Laziness matters:
//! the plain random walk on an even cycle is periodic and has a unit
//! second eigenvalue in absolute value, so averaging would never contract.
//!
//! Everything here is dense `n x n`; the intended scale is up to about a
//! thousand nodes, where exact symmetric eigendecomposition is cheap.

use std::collections::HashSet;
use std::io::Write;

use nalgebra::DMatrix;
use rand::{seq::SliceRandom as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Cycle,
    Grid,
    Complete,
    Expander,
    Custom,
}

/// Extra knobs for [`build_graph`]; only some kinds consume them.
#[derive(Debug, Clone, Copy)]
pub struct GraphParams {
    /// Degree for random regular expanders.
    pub degree: usize,
    /// Seed for expander resampling.
    pub seed: u64,
    /// Wrap grid edges around (makes the grid regular).
    pub toroidal: bool,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            degree: 6,
            seed: 0,
            toroidal: false,
        }
    }
}

/// An undirected connected graph on nodes `0..n`. Self-loops are never
/// stored; lazy self-weights live in the mixing matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    /// Undirected edges as ordered pairs `(v, w)` with `v < w`.
    pub edges: Vec<(usize, usize)>,
    pub kind: GraphKind,
}

pub fn build_graph(kind: GraphKind, n: usize, params: &GraphParams) -> Result<Graph> {
    match kind {
        GraphKind::Cycle => Graph::cycle(n),
        GraphKind::Grid => Graph::grid(n, params.toroidal),
        GraphKind::Complete => Graph::complete(n),
        GraphKind::Expander => Graph::expander(n, params.degree, params.seed),
        GraphKind::Custom => Err(Error::parameter(
            "kind",
            "custom graphs are built from an explicit edge list via Graph::custom",
        )),
    }
}

impl Graph {
    pub fn cycle(n: usize) -> Result<Graph> {
        if n == 0 {
            return Err(Error::parameter("n", "needs at least one node"));
        }
        let mut edges = Vec::new();
        if n == 2 {
            edges.push((0, 1));
        } else if n > 2 {
            for v in 0..n {
                let w = (v + 1) % n;
                edges.push((v.min(w), v.max(w)));
            }
        }
        edges.sort_unstable();
        Ok(Graph {
            n,
            edges,
            kind: GraphKind::Cycle,
        })
    }

    /// Two-dimensional `k x k` lattice with `n = k^2` nodes, `k >= 2`.
    /// Non-toroidal by default; `toroidal` adds wrap-around edges and makes
    /// the lattice 4-regular (requires `k >= 3` so wrap edges are distinct).
    pub fn grid(n: usize, toroidal: bool) -> Result<Graph> {
        let k = (n as f64).sqrt().round() as usize;
        if k < 2 || k * k != n {
            return Err(Error::parameter(
                "n",
                format!("grid needs a perfect square node count >= 4, got {n}"),
            ));
        }
        if toroidal && k < 3 {
            return Err(Error::parameter(
                "n",
                "toroidal grid needs side length at least 3",
            ));
        }
        let id = |r: usize, c: usize| r * k + c;
        let mut edges = Vec::new();
        for r in 0..k {
            for c in 0..k {
                if c + 1 < k {
                    edges.push((id(r, c), id(r, c + 1)));
                } else if toroidal {
                    edges.push((id(r, 0).min(id(r, c)), id(r, 0).max(id(r, c))));
                }
                if r + 1 < k {
                    edges.push((id(r, c), id(r + 1, c)));
                } else if toroidal {
                    edges.push((id(0, c).min(id(r, c)), id(0, c).max(id(r, c))));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Graph {
            n,
            edges,
            kind: GraphKind::Grid,
        })
    }

    pub fn complete(n: usize) -> Result<Graph> {
        if n == 0 {
            return Err(Error::parameter("n", "needs at least one node"));
        }
        let mut edges = Vec::new();
        for v in 0..n {
            for w in (v + 1)..n {
                edges.push((v, w));
            }
        }
        Ok(Graph {
            n,
            edges,
            kind: GraphKind::Complete,
        })
    }

    /// Random `d`-regular graph by the pairing model, resampled until it is
    /// simple, connected, and its lazy uniform walk has a second eigenvalue
    /// below 0.9 in absolute value. Deterministic given the seed.
    pub fn expander(n: usize, d: usize, seed: u64) -> Result<Graph> {
        if d == 0 || d >= n {
            return Err(Error::parameter("degree", format!("need 0 < d < n, got d={d}, n={n}")));
        }
        if !(n * d).is_multiple_of(2) {
            return Err(Error::parameter(
                "degree",
                format!("no {d}-regular graph on {n} nodes: n*d must be even"),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // the simple-graph probability decays like exp(-(d^2-1)/4), so the
        // rejection loop needs a deep cap at d = 6
        for _attempt in 0..400_000 {
            let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
            stubs.shuffle(&mut rng);
            let mut seen = HashSet::new();
            let mut ok = true;
            for pair in stubs.chunks_exact(2) {
                let (v, w) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                if v == w || !seen.insert((v, w)) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let mut edges: Vec<(usize, usize)> = seen.into_iter().collect();
            edges.sort_unstable();
            let graph = Graph {
                n,
                edges,
                kind: GraphKind::Expander,
            };
            if !graph.is_connected() {
                continue;
            }
            let mixing = mixing_matrix(&graph, MixingScheme::LazyUniform)?;
            if mixing.sigma2 < 0.9 {
                return Ok(graph);
            }
        }
        Err(Error::parameter(
            "seed",
            format!("no well-mixing {d}-regular graph on {n} nodes found"),
        ))
    }

    /// Graph from an explicit edge list; rejects self-loops, out-of-range
    /// endpoints, and disconnected results.
    pub fn custom(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(v, w) in edges {
            if v == w {
                return Err(Error::parameter("edges", format!("self-loop at node {v}")));
            }
            if v >= n || w >= n {
                return Err(Error::parameter(
                    "edges",
                    format!("edge ({v},{w}) out of range for n={n}"),
                ));
            }
            normalized.push((v.min(w), v.max(w)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        let graph = Graph {
            n,
            edges: normalized,
            kind: GraphKind::Custom,
        };
        if !graph.is_connected() {
            return Err(Error::parameter("edges", "graph is not connected"));
        }
        Ok(graph)
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(v, w) in &self.edges {
            adj[v].push(w);
            adj[w].push(v);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors().iter().map(Vec::len).collect()
    }

    pub fn is_regular(&self) -> bool {
        let deg = self.degrees();
        deg.windows(2).all(|p| p[0] == p[1])
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let adj = self.neighbors();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Edge list as CSV (`v,w` per line) for external inspection.
    pub fn write_edge_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "v,w")?;
        for &(v, w) in &self.edges {
            writeln!(out, "{v},{w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingScheme {
    /// `P_vw = 1/(deg+1)` for neighbors and self; regular graphs only.
    LazyUniform,
    /// `P_vw = 1/(1 + max(deg_v, deg_w))` on edges, remainder on the diagonal.
    Metropolis,
}

/// Doubly stochastic gossip matrix supported on a graph, with its second
/// largest absolute eigenvalue cached. Immutable after construction.
#[derive(Debug, Clone)]
pub struct MixingMatrix {
    pub p: DMatrix<f64>,
    pub sigma2: f64,
    pub graph: Graph,
}

pub fn mixing_matrix(graph: &Graph, scheme: MixingScheme) -> Result<MixingMatrix> {
    if !graph.is_connected() {
        return Err(Error::parameter("graph", "mixing needs a connected graph"));
    }
    let n = graph.n;
    let deg = graph.degrees();
    let mut p = DMatrix::<f64>::zeros(n, n);
    match scheme {
        MixingScheme::LazyUniform => {
            if !graph.is_regular() {
                return Err(Error::Scheme {
                    scheme: "lazy_uniform".into(),
                    reason: "graph is not regular; use metropolis weights".into(),
                });
            }
            let w = 1.0 / (deg.first().copied().unwrap_or(0) as f64 + 1.0);
            for v in 0..n {
                p[(v, v)] = w;
            }
            for &(v, u) in &graph.edges {
                p[(v, u)] = w;
                p[(u, v)] = w;
            }
        }
        MixingScheme::Metropolis => {
            for &(v, u) in &graph.edges {
                let w = 1.0 / (1.0 + deg[v].max(deg[u]) as f64);
                p[(v, u)] = w;
                p[(u, v)] = w;
            }
            for v in 0..n {
                let off: f64 = p.row(v).sum();
                p[(v, v)] = 1.0 - off;
            }
        }
    }
    let s2 = sigma2(&p)?;
    Ok(MixingMatrix {
        p,
        sigma2: s2,
        graph: graph.clone(),
    })
}

impl MixingMatrix {
    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    /// Inverse spectral gap `1/(1 - sigma2)`.
    pub fn inverse_gap(&self) -> f64 {
        1.0 / (1.0 - self.sigma2)
    }

    /// Dense matrix as CSV rows for external inspection.
    pub fn write_matrix_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for v in 0..self.n() {
            let row: Vec<String> = (0..self.n()).map(|w| format!("{}", self.p[(v, w)])).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Check row sums, column sums, symmetry and support in one sweep.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.n();
        let adj: HashSet<(usize, usize)> = self.graph.edges.iter().copied().collect();
        for v in 0..n {
            let rs: f64 = self.p.row(v).sum();
            let cs: f64 = self.p.column(v).sum();
            if (rs - 1.0).abs() > tol || (cs - 1.0).abs() > tol {
                return Err(Error::parameter(
                    "p",
                    format!("row/column {v} sums {rs}, {cs} deviate from 1"),
                ));
            }
            for w in 0..n {
                if (self.p[(v, w)] - self.p[(w, v)]).abs() > tol {
                    return Err(Error::parameter("p", format!("asymmetry at ({v},{w})")));
                }
                if v != w && self.p[(v, w)] != 0.0 {
                    let key = (v.min(w), v.max(w));
                    if !adj.contains(&key) {
                        return Err(Error::parameter(
                            "p",
                            format!("weight off the graph support at ({v},{w})"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

const SYMMETRY_TOL: f64 = 1e-10;

/// Second largest eigenvalue in absolute value of a symmetric doubly
/// stochastic matrix. Errors on asymmetric input (the dense symmetric
/// eigensolver contract).
pub fn sigma2(p: &DMatrix<f64>) -> Result<f64> {
    if p.nrows() != p.ncols() {
        return Err(Error::dimension("sigma2 needs a square matrix"));
    }
    let n = p.nrows();
    for v in 0..n {
        for w in (v + 1)..n {
            if (p[(v, w)] - p[(w, v)]).abs() > SYMMETRY_TOL {
                return Err(Error::parameter(
                    "p",
                    format!("matrix is not symmetric at ({v},{w})"),
                ));
            }
        }
    }
    if n == 1 {
        return Ok(0.0);
    }
    let mut eigs: Vec<f64> = p.symmetric_eigenvalues().iter().map(|e| e.abs()).collect();
    eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(eigs[1])
}

/// Exact l1 deviation of row `v` of `P^s` from the uniform distribution.
/// `s >= 1`; panics on an out-of-range node index.
pub fn deviation_l1(p: &DMatrix<f64>, s: usize, v: usize) -> f64 {
    assert!(s >= 1, "deviation_l1 needs s >= 1");
    let ps = matrix_power(p, s);
    row_deviation(&ps, v)
}

fn row_deviation(ps: &DMatrix<f64>, v: usize) -> f64 {
    let n = ps.nrows();
    let uniform = 1.0 / n as f64;
    ps.row(v).iter().map(|x| (x - uniform).abs()).sum()
}

pub fn matrix_power(p: &DMatrix<f64>, s: usize) -> DMatrix<f64> {
    let mut acc = DMatrix::<f64>::identity(p.nrows(), p.ncols());
    let mut base = p.clone();
    let mut e = s;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Result of a gossip mixing-time scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MixingTime {
    /// Smallest `s` with `max_v deviation_l1(P, s, v) <= tol`.
    pub steps: usize,
    /// `ceil(ln(1/tol) / (1 - sigma2))`, the gap-based estimate.
    pub theory_estimate: usize,
}

/// Scan matrix powers for the first step count whose worst-row l1 deviation
/// from uniform drops below `tol`.
pub fn mixing_time(p: &DMatrix<f64>, tol: f64) -> Result<MixingTime> {
    if !(tol > 0.0) {
        return Err(Error::parameter("tol", "must be positive"));
    }
    let s2 = sigma2(p)?;
    if s2 >= 1.0 {
        return Err(Error::Divergence { sigma2: s2 });
    }
    let theory_estimate = ((1.0 / tol).ln() / (1.0 - s2)).ceil().max(1.0) as usize;
    let n = p.nrows();
    let mut ps = p.clone();
    // generous cap: deviation shrinks at least geometrically once aperiodic
    let cap = 100 + 100 * theory_estimate;
    for s in 1..=cap {
        let worst = (0..n).map(|v| row_deviation(&ps, v)).fold(0.0, f64::max);
        if worst <= tol {
            return Ok(MixingTime {
                steps: s,
                theory_estimate,
            });
        }
        ps = &ps * p;
    }
    Err(Error::Divergence { sigma2: s2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lazy_cycle(n: usize) -> MixingMatrix {
        mixing_matrix(&Graph::cycle(n).unwrap(), MixingScheme::LazyUniform).unwrap()
    }

    #[test]
    fn cycle_four_has_ring_edges() {
        let g = Graph::cycle(4).unwrap();
        assert_eq!(g.edges, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
    }

    #[test]
    fn complete_three_has_three_edges() {
        assert_eq!(Graph::complete(3).unwrap().edges.len(), 3);
    }

    #[test]
    fn grid_nine_has_twelve_edges() {
        // 2k(k-1) with k=3
        let g = Graph::grid(9, false).unwrap();
        assert_eq!(g.edges.len(), 12);
        assert!(g.is_connected());
        assert!(!g.is_regular());
    }

    #[test]
    fn grid_rejects_non_square() {
        assert!(Graph::grid(10, false).is_err());
    }

    #[test]
    fn toroidal_grid_is_regular() {
        let g = Graph::grid(9, true).unwrap();
        assert!(g.is_regular());
        assert_eq!(g.degrees()[0], 4);
        assert!(mixing_matrix(&g, MixingScheme::LazyUniform).is_ok());
    }

    #[test]
    fn complete_lazy_uniform_is_the_averaging_matrix() {
        let mix = mixing_matrix(&Graph::complete(4).unwrap(), MixingScheme::LazyUniform).unwrap();
        for v in 0..4 {
            for w in 0..4 {
                assert!((mix.p[(v, w)] - 0.25).abs() < 1e-15);
            }
        }
        assert!(mix.sigma2.abs() < 1e-12);
    }

    // eigen-decomposition oracle: lazy cycle eigenvalues are
    // (1 + 2 cos(2 pi k / n)) / 3
    #[test]
    fn lazy_cycle_sigma2_matches_circulant_eigenvalues() {
        for n in [4usize, 8, 16] {
            let mix = lazy_cycle(n);
            let analytic = (1..n)
                .map(|k| ((1.0 + 2.0 * (std::f64::consts::TAU * k as f64 / n as f64).cos()) / 3.0).abs())
                .fold(0.0, f64::max);
            assert!(
                (mix.sigma2 - analytic).abs() < 1e-10,
                "n={n}: {} vs {analytic}",
                mix.sigma2
            );
        }
        assert!((lazy_cycle(4).sigma2 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lazy_cycle_rows_have_the_expected_pattern() {
        let mix = lazy_cycle(4);
        let third = 1.0 / 3.0;
        let expect = [third, third, 0.0, third];
        for (w, e) in expect.iter().enumerate() {
            assert!((mix.p[(0, w)] - e).abs() < 1e-15);
        }
        mix.validate(1e-12).unwrap();
    }

    // hand evaluation of the Metropolis rule on the 3x3 lattice
    #[test]
    fn metropolis_grid_matches_hand_values() {
        let mix = mixing_matrix(&Graph::grid(9, false).unwrap(), MixingScheme::Metropolis).unwrap();
        // corner 0 neighbors 1 (deg 3) and 3 (deg 3): entries 1/4, self 1/2
        assert!((mix.p[(0, 1)] - 0.25).abs() < 1e-15);
        assert!((mix.p[(0, 3)] - 0.25).abs() < 1e-15);
        assert!((mix.p[(0, 0)] - 0.5).abs() < 1e-15);
        // corner-corner entries are zero
        assert_eq!(mix.p[(0, 8)], 0.0);
        assert_eq!(mix.p[(0, 2)], 0.0);
        // edge node 1 to center 4: 1/(1 + max(3,4)) = 1/5
        assert!((mix.p[(1, 4)] - 0.2).abs() < 1e-15);
        mix.validate(1e-12).unwrap();
    }

    #[test]
    fn lazy_uniform_rejects_irregular_graphs() {
        let g = Graph::grid(9, false).unwrap();
        match mixing_matrix(&g, MixingScheme::LazyUniform) {
            Err(Error::Scheme { .. }) => {}
            other => panic!("expected scheme error, got {other:?}"),
        }
    }

    #[test]
    fn sigma2_of_uniform_matrix_is_zero() {
        let p = DMatrix::from_element(5, 5, 0.2);
        assert!(sigma2(&p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sigma2_of_identity_is_one() {
        let p = DMatrix::<f64>::identity(2, 2);
        assert!((sigma2(&p).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(mixing_time(&p, 1e-3), Err(Error::Divergence { .. })));
    }

    #[test]
    fn sigma2_rejects_asymmetric_input() {
        let p = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.2, 0.8]);
        assert!(sigma2(&p).is_err());
    }

    #[test]
    fn deviation_of_uniform_matrix_is_zero() {
        let p = DMatrix::from_element(4, 4, 0.25);
        for s in [1, 3, 10] {
            assert!(deviation_l1(&p, s, 2).abs() < 1e-15);
        }
    }

    #[test]
    fn deviation_of_lazy_cycle_matches_hand_arithmetic() {
        let mix = lazy_cycle(4);
        // |1/3 - 1/4| * 3 + 1/4 = 1/2
        assert!((deviation_l1(&mix.p, 1, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deviation_vanishes_for_large_powers() {
        let mix = lazy_cycle(8);
        assert!(deviation_l1(&mix.p, 200, 0) < 1e-6);
    }

    #[test]
    fn powers_stay_doubly_stochastic() {
        for mix in [
            lazy_cycle(8),
            mixing_matrix(&Graph::grid(9, false).unwrap(), MixingScheme::Metropolis).unwrap(),
        ] {
            let mut ps = mix.p.clone();
            for _ in 0..100 {
                ps = &ps * &mix.p;
            }
            let n = ps.nrows();
            for v in 0..n {
                assert!((ps.row(v).sum() - 1.0).abs() < 1e-9);
                assert!((ps.column(v).sum() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mixing_time_of_uniform_matrix_is_one() {
        let p = DMatrix::from_element(4, 4, 0.25);
        assert_eq!(mixing_time(&p, 1e-3).unwrap().steps, 1);
    }

    #[test]
    fn trivial_tolerance_is_met_immediately() {
        let mix = lazy_cycle(8);
        assert_eq!(mixing_time(&mix.p, 2.0).unwrap().steps, 1);
    }

    // exhaustive s-scan oracle: the scan is the ground truth; the gap-based
    // estimate should land within a factor 4 of it
    #[test]
    fn mixing_time_estimate_tracks_the_scan() {
        let mix = lazy_cycle(8);
        let mt = mixing_time(&mix.p, 1e-3).unwrap();
        assert!(mt.steps >= 1);
        let ratio = mt.theory_estimate as f64 / mt.steps as f64;
        assert!(
            (0.25..=4.0).contains(&ratio),
            "steps {} estimate {}",
            mt.steps,
            mt.theory_estimate
        );
    }

    #[test]
    fn expander_is_regular_connected_and_mixes() {
        let g = Graph::expander(16, 6, 0).unwrap();
        assert!(g.is_regular());
        assert_eq!(g.degrees()[0], 6);
        assert!(g.is_connected());
        let mix = mixing_matrix(&g, MixingScheme::LazyUniform).unwrap();
        assert!(mix.sigma2 < 0.9);
        // deterministic per seed
        let g2 = Graph::expander(16, 6, 0).unwrap();
        assert_eq!(g.edges, g2.edges);
    }

    #[test]
    fn expander_rejects_odd_stub_count() {
        assert!(Graph::expander(5, 3, 0).is_err());
    }

    #[test]
    fn custom_graph_round_trips_and_validates() {
        let g = Graph::custom(3, &[(0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edges, vec![(0, 1), (1, 2)]);
        assert!(Graph::custom(3, &[(0, 1)]).is_err()); // disconnected
        assert!(Graph::custom(3, &[(0, 0), (0, 1), (1, 2)]).is_err()); // self-loop
    }

    #[test]
    fn edge_csv_has_header_and_rows() {
        let g = Graph::cycle(3).unwrap();
        let mut buf = Vec::new();
        g.write_edge_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("v,w\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
