//! Random site geometry, disordered connectivity and the tight-binding
//! Hamiltonian built on it.

use std::collections::BTreeSet;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::rng::{stream_rng, Stream};
use crate::scalar::Real;

pub const DEFAULT_PASSES: usize = 9;
pub const DEFAULT_POOL_SIZE: usize = 50;

/// Site positions in the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteSet<T> {
    positions: Vec<[T; 2]>,
    seed: u64,
}

impl<T: Real> SiteSet<T> {
    /// Wraps explicit positions (used for hand-built geometries and imports).
    pub fn from_positions(positions: Vec<[T; 2]>, seed: u64) -> Result<Self> {
        if positions.len() < 2 {
            return Err(invalid("a site set needs at least two sites"));
        }
        let unit = |c: T| c >= T::zero() && c <= T::one();
        if let Some(k) = positions.iter().position(|p| !(unit(p[0]) && unit(p[1]))) {
            return Err(invalid(format!("site {k} lies outside the unit square")));
        }
        Ok(Self { positions, seed })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[T; 2]] {
        &self.positions
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn distance_sq(&self, a: usize, b: usize) -> T {
        let (p, q) = (self.positions[a], self.positions[b]);
        let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
        dx * dx + dy * dy
    }

    /// Site indices ordered by distance from `origin`, ties by index.
    pub fn sorted_by_distance_from(&self, origin: [T; 2]) -> Vec<usize> {
        let d2 = |k: usize| {
            let p = self.positions[k];
            let (dx, dy) = (p[0] - origin[0], p[1] - origin[1]);
            dx * dx + dy * dy
        };
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| d2(a).partial_cmp(&d2(b)).unwrap().then(a.cmp(&b)));
        idx
    }
}

/// Draws `n` sites uniformly in the unit square.
pub fn generate_sites<T: Real>(n: usize, seed: u64) -> Result<SiteSet<T>> {
    if n < 2 {
        return Err(invalid(format!("need n >= 2 sites, got {n}")));
    }
    let mut rng = stream_rng(seed, Stream::Sites);
    let positions = (0..n)
        .map(|_| {
            let x: f64 = rng.random();
            let y: f64 = rng.random();
            [T::lit(x), T::lit(y)]
        })
        .collect();
    Ok(SiteSet { positions, seed })
}

/// For each site, the `pool_size` nearest other sites in ascending distance
/// (ties by ascending index).
pub fn k_nearest_pools<T: Real>(sites: &SiteSet<T>, pool_size: usize) -> Result<Vec<Vec<usize>>> {
    let n = sites.len();
    if pool_size == 0 || pool_size >= n {
        return Err(invalid(format!(
            "pool size must be in 1..{n} for {n} sites, got {pool_size}"
        )));
    }
    let pools = (0..n)
        .map(|k| {
            let mut others: Vec<(T, usize)> = (0..n)
                .filter(|&j| j != k)
                .map(|j| (sites.distance_sq(k, j), j))
                .collect();
            let cmp =
                |a: &(T, usize), b: &(T, usize)| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1));
            if pool_size < others.len() {
                others.select_nth_unstable_by(pool_size - 1, cmp);
                others.truncate(pool_size);
            }
            others.sort_by(cmp);
            others.into_iter().map(|(_, j)| j).collect()
        })
        .collect();
    Ok(pools)
}

/// Undirected connectivity over site indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    seed: u64,
    passes: usize,
    pool_size: usize,
}

/// Summary of site degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

impl ConnectivityGraph {
    /// A graph on `n` sites with the given edges; each pair is normalized to
    /// `(low, high)`. Self-loops and out-of-range indices are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(invalid(format!("self-loop on site {a}")));
            }
            if a >= n || b >= n {
                return Err(invalid(format!(
                    "edge ({a}, {b}) out of range for {n} sites"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self {
            n,
            edges: set,
            seed: 0,
            passes: 0,
            pool_size: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    pub fn pool_size(&self) -> usize {
        self.pool_size
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let deg = self.degrees();
        DegreeStats {
            min: deg.iter().copied().min().unwrap_or(0),
            max: deg.iter().copied().max().unwrap_or(0),
            mean: deg.iter().sum::<usize>() as f64 / self.n.max(1) as f64,
        }
    }

    /// SHA-256 over the site count and sorted edge list, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        for &(a, b) in &self.edges {
            h.update((a as u64).to_le_bytes());
            h.update((b as u64).to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// What a connection pass does when the drawn partner is already connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DuplicatePolicy {
    /// Redraw among pool members not yet connected to the site; every visit
    /// adds an edge unless the whole pool is already connected.
    #[default]
    Redraw,
    /// Keep the graph unchanged for that visit.
    Skip,
}

/// Makes `passes` sweeps over the sites; on each visit site `k` connects to
/// a partner drawn uniformly from its nearest-neighbor pool, with repeated
/// edges handled by [`DuplicatePolicy::Redraw`].
pub fn build_connectivity<T: Real>(
    sites: &SiteSet<T>,
    passes: usize,
    pool_size: usize,
    seed: u64,
) -> Result<ConnectivityGraph> {
    build_connectivity_with(sites, passes, pool_size, seed, DuplicatePolicy::Redraw)
}

pub fn build_connectivity_with<T: Real>(
    sites: &SiteSet<T>,
    passes: usize,
    pool_size: usize,
    seed: u64,
    policy: DuplicatePolicy,
) -> Result<ConnectivityGraph> {
    if passes == 0 {
        return Err(invalid("at least one connection pass is required"));
    }
    let pools = k_nearest_pools(sites, pool_size)?;
    let mut rng = stream_rng(seed, Stream::Connectivity);
    let mut edges = BTreeSet::new();
    let mut fresh = Vec::with_capacity(pool_size);
    for _ in 0..passes {
        for (k, pool) in pools.iter().enumerate() {
            let j = pool[rng.random_range(0..pool.len())];
            if edges.insert((k.min(j), k.max(j))) || policy == DuplicatePolicy::Skip {
                continue;
            }
            fresh.clear();
            fresh.extend(
                pool.iter()
                    .copied()
                    .filter(|&c| !edges.contains(&(k.min(c), k.max(c)))),
            );
            if !fresh.is_empty() {
                let c = fresh[rng.random_range(0..fresh.len())];
                edges.insert((k.min(c), k.max(c)));
            }
        }
    }
    let graph = ConnectivityGraph {
        n: sites.len(),
        edges,
        seed,
        passes,
        pool_size,
    };
    if let Some(k) = graph.degrees().iter().position(|&d| d == 0) {
        return Err(invalid(format!("site {k} was left without connections")));
    }
    Ok(graph)
}

/// Tight-binding Hamiltonian with uniform on-site energy and uniform hopping.
#[derive(Debug, Clone)]
pub struct Hamiltonian<T> {
    matrix: Matrix<T>,
    e0: T,
    gamma0: T,
}

impl<T: Real> Hamiltonian<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn e0(&self) -> T {
        self.e0
    }

    pub fn gamma0(&self) -> T {
        self.gamma0
    }

    /// Wraps an arbitrary real symmetric matrix (for tests and oracles).
    pub fn from_matrix(matrix: Matrix<T>, gamma0: T) -> Result<Self> {
        if matrix.asymmetry() != T::zero() {
            return Err(invalid("Hamiltonian matrix must be exactly symmetric"));
        }
        if gamma0 <= T::zero() {
            return Err(invalid("gamma0 must be positive"));
        }
        let e0 = if matrix.dim() > 0 {
            matrix[(0, 0)]
        } else {
            T::zero()
        };
        Ok(Self { matrix, e0, gamma0 })
    }
}

/// `H[k][k] = e0`, `H[k][k'] = -gamma0` on every edge, zero elsewhere.
pub fn assemble_hamiltonian<T: Real>(
    graph: &ConnectivityGraph,
    e0: T,
    gamma0: T,
) -> Result<Hamiltonian<T>> {
    if !(gamma0 > T::zero()) {
        return Err(invalid(format!("gamma0 must be positive, got {gamma0}")));
    }
    let mut matrix = Matrix::zeros(graph.n());
    for k in 0..graph.n() {
        matrix[(k, k)] = e0;
    }
    for (a, b) in graph.edges() {
        matrix[(a, b)] = -gamma0;
        matrix[(b, a)] = -gamma0;
    }
    Ok(Hamiltonian { matrix, e0, gamma0 })
}

/// Persisted form of one network configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphExport {
    pub n: usize,
    pub seed: u64,
    pub passes: usize,
    pub pool_size: usize,
    pub positions: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
}

impl GraphExport {
    pub fn new<T: Real>(sites: &SiteSet<T>, graph: &ConnectivityGraph) -> Self {
        Self {
            n: graph.n(),
            seed: graph.seed(),
            passes: graph.passes(),
            pool_size: graph.pool_size(),
            positions: sites
                .positions()
                .iter()
                .map(|p| [p[0].as_f64(), p[1].as_f64()])
                .collect(),
            edges: graph.edges().map(|(a, b)| [a, b]).collect(),
        }
    }

    /// Rebuilds the site set and graph exactly as stored.
    pub fn restore<T: Real>(&self) -> Result<(SiteSet<T>, ConnectivityGraph)> {
        if self.positions.len() != self.n {
            return Err(invalid(format!(
                "export lists {} positions for n = {}",
                self.positions.len(),
                self.n
            )));
        }
        let sites = SiteSet::from_positions(
            self.positions
                .iter()
                .map(|p| [T::lit(p[0]), T::lit(p[1])])
                .collect(),
            self.seed,
        )?;
        let mut graph =
            ConnectivityGraph::from_edges(self.n, self.edges.iter().map(|e| (e[0], e[1])))?;
        graph.seed = self.seed;
        graph.passes = self.passes;
        graph.pool_size = self.pool_size;
        Ok((sites, graph))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).map_err(|e| Error::json(path, e))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> SiteSet<f64> {
        SiteSet::from_positions(xs.iter().map(|&x| [x, 0.0]).collect(), 0).unwrap()
    }

    #[test]
    fn sites_are_deterministic_and_in_unit_square() {
        let a = generate_sites::<f64>(2, 11).unwrap();
        let b = generate_sites::<f64>(2, 11).unwrap();
        assert_eq!(a, b);
        let big = generate_sites::<f64>(1024, 11).unwrap();
        assert_eq!(big.len(), 1024);
        assert!(big
            .positions()
            .iter()
            .flatten()
            .all(|&c| (0.0..=1.0).contains(&c)));
        let mean_x = big.positions().iter().map(|p| p[0]).sum::<f64>() / 1024.0;
        assert!((0.45..=0.55).contains(&mean_x), "mean x = {mean_x}");
    }

    #[test]
    fn too_few_sites() {
        assert!(matches!(
            generate_sites::<f64>(1, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(SiteSet::from_positions(vec![[0.5f64, 1.5], [0.0, 0.0]], 0).is_err());
    }

    #[test]
    fn collinear_pools() {
        let s = line(&[0.0, 0.1, 0.3]);
        assert_eq!(
            k_nearest_pools(&s, 1).unwrap(),
            vec![vec![1], vec![0], vec![1]]
        );
    }

    #[test]
    fn square_corner_pools_skip_diagonal() {
        let s = SiteSet::from_positions(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 0)
            .unwrap();
        let pools = k_nearest_pools(&s, 2).unwrap();
        assert_eq!(pools, vec![vec![1, 3], vec![0, 2], vec![1, 3], vec![0, 2]]);
    }

    #[test]
    fn ties_break_by_index() {
        let s = line(&[0.5, 0.4, 0.6]);
        assert_eq!(k_nearest_pools(&s, 1).unwrap()[0], vec![1]);
    }

    #[test]
    fn pool_size_must_be_below_n() {
        let s = line(&[0.0, 0.5]);
        assert!(k_nearest_pools(&s, 2).is_err());
        assert!(build_connectivity(&s, 1, 2, 0).is_err());
    }

    #[test]
    fn full_scale_pools_are_full() {
        let s = generate_sites::<f64>(1024, 5).unwrap();
        let pools = k_nearest_pools(&s, 50).unwrap();
        for (k, p) in pools.iter().enumerate() {
            assert_eq!(p.len(), 50);
            let uniq: BTreeSet<_> = p.iter().collect();
            assert_eq!(uniq.len(), 50);
            assert!(!p.contains(&k));
            assert!(p
                .windows(2)
                .all(|w| s.distance_sq(k, w[0]) <= s.distance_sq(k, w[1])));
        }
    }

    #[test]
    fn two_sites_one_edge() {
        let s = line(&[0.0, 1.0]);
        let g = build_connectivity(&s, 1, 1, 3).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(g.degrees(), vec![1, 1]);
    }

    #[test]
    fn small_graph_every_site_connected() {
        let s = generate_sites::<f64>(64, 8).unwrap();
        let g = build_connectivity(&s, 9, 50, 8).unwrap();
        let stats = g.degree_stats();
        assert!(stats.min >= 1);
        assert!(g.edges().all(|(a, b)| a < b));
    }

    #[test]
    fn full_scale_degree_statistics() {
        let s = generate_sites::<f64>(1024, 21).unwrap();
        let g = build_connectivity(&s, 9, 50, 21).unwrap();
        let st = g.degree_stats();
        assert!((16.0..=20.0).contains(&st.mean), "{st:?}");
        assert!(st.min >= 8 && st.max <= 36, "{st:?}");
        let again = build_connectivity(&s, 9, 50, 21).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn redraw_gives_nine_new_edges_per_site() {
        let s = generate_sites::<f64>(1024, 21).unwrap();
        let g = build_connectivity(&s, 9, 50, 21).unwrap();
        assert_eq!(g.edge_count(), 9 * 1024);
        assert!(g.degree_stats().min >= 9);
    }

    #[test]
    fn skip_policy_loses_collisions() {
        let s = generate_sites::<f64>(1024, 21).unwrap();
        let g = build_connectivity_with(&s, 9, 50, 21, DuplicatePolicy::Skip).unwrap();
        let st = g.degree_stats();
        assert!(st.mean < 18.0 && st.min >= 1, "{st:?}");
    }

    #[test]
    fn hamiltonian_two_sites() {
        let g = ConnectivityGraph::from_edges(2, [(0, 1)]).unwrap();
        let h = assemble_hamiltonian(&g, 0.0, 1.0).unwrap();
        assert_eq!(h.matrix().as_slice(), &[0.0, -1.0, -1.0, 0.0]);
    }

    #[test]
    fn empty_graph_is_shifted_identity() {
        let g = ConnectivityGraph::from_edges(4, []).unwrap();
        let h = assemble_hamiltonian(&g, 2.5, 1.0).unwrap();
        assert_eq!(h.matrix(), &Matrix::from_diagonal(&[2.5; 4]));
    }

    #[test]
    fn hamiltonian_matches_edges() {
        let s = generate_sites::<f64>(200, 2).unwrap();
        let g = build_connectivity(&s, 9, 50, 2).unwrap();
        let h = assemble_hamiltonian(&g, 0.0, 1.0).unwrap();
        let m = h.matrix();
        assert_eq!(m.asymmetry(), 0.0);
        let mut negatives = 0;
        for i in 0..200 {
            for j in 0..200 {
                if i != j {
                    assert_eq!(m[(i, j)] != 0.0, g.contains(i, j));
                    negatives += usize::from(m[(i, j)] < 0.0);
                }
            }
        }
        assert_eq!(negatives, 2 * g.edge_count());
        assert!(assemble_hamiltonian(&g, 0.0, 0.0).is_err());
    }

    #[test]
    fn export_round_trip() {
        let s = generate_sites::<f64>(30, 4).unwrap();
        let g = build_connectivity(&s, 3, 10, 4).unwrap();
        let exp = GraphExport::new(&s, &g);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        exp.write(&path).unwrap();
        let back = GraphExport::read(&path).unwrap();
        let (s2, g2) = back.restore::<f64>().unwrap();
        assert_eq!(s2, s);
        assert_eq!(g2, g);
        assert_eq!(g2.content_hash(), g.content_hash());
    }
}
