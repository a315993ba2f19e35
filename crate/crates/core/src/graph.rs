//! Graph-derived complexes: independence and clique complexes, the hard-core
//! fermion model, and Vietoris-Rips scans over point clouds.

use crate::complex::{BettiMethod, CochainComplex};
use crate::error::{Error, Result};
use crate::fock::{ConstraintSet, GradedSpace};
use crate::operators::{Factor, FermionOperator};
use crate::scalar::Coeff;
use rayon::prelude::*;

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Build from an edge list; rejects self-loops, duplicates, and
    /// out-of-range endpoints.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::Invalid(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::Invalid(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("duplicate edge".into()));
        }
        Ok(Graph { n, edges: norm })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges).unwrap()
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges).unwrap()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            if a == v {
                out.push(b);
            } else if b == v {
                out.push(a);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    pub fn complement(&self) -> Graph {
        let mut edges = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.edges.binary_search(&(u, v)).is_err() {
                    edges.push((u, v));
                }
            }
        }
        Graph {
            n: self.n,
            edges,
        }
    }

    /// Parse the graph file format: first data line `n`, then `u v` edge
    /// lines; `#` starts a comment.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: path.to_string(),
                line: ln + 1,
                msg,
            };
            match n {
                None => {
                    n = Some(
                        line.parse()
                            .map_err(|_| err(format!("expected vertex count, got `{line}`")))?,
                    );
                }
                Some(nv) => {
                    let mut it = line.split_whitespace();
                    let u: usize = it
                        .next()
                        .unwrap()
                        .parse()
                        .map_err(|_| err(format!("invalid edge line `{line}`")))?;
                    let v: usize = it
                        .next()
                        .ok_or_else(|| err(format!("edge line `{line}` needs two endpoints")))?
                        .parse()
                        .map_err(|_| err(format!("invalid edge line `{line}`")))?;
                    if it.next().is_some() {
                        return Err(err(format!("trailing tokens on edge line `{line}`")));
                    }
                    if u == v {
                        return Err(err(format!("self-loop at vertex {u}")));
                    }
                    if u >= nv || v >= nv {
                        return Err(err(format!(
                            "edge ({u}, {v}) out of range for {nv} vertices"
                        )));
                    }
                    edges.push((u, v));
                }
            }
        }
        let n = n.ok_or_else(|| Error::Parse {
            path: path.to_string(),
            line: 1,
            msg: "missing vertex count".into(),
        })?;
        Graph::new(n, &edges)
    }
}

/// Euclidean point cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(first) = points.first() {
            let dim = first.len();
            for (i, p) in points.iter().enumerate() {
                if p.len() != dim {
                    return Err(Error::Invalid(format!(
                        "point {i} has dimension {}, expected {dim}",
                        p.len()
                    )));
                }
                if p.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Invalid(format!("point {i} has non-finite entry")));
                }
            }
        }
        Ok(PointCloud { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.points[i]
            .iter()
            .zip(&self.points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Parse CSV: one point per row, comma-separated floats, `#` comments.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut dim: Option<usize> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: path.to_string(),
                line: ln + 1,
                msg,
            };
            let row: Vec<f64> = line
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|_| err(format!("invalid coordinate `{}`", tok.trim())))
                })
                .collect::<Result<_>>()?;
            if row.iter().any(|x| !x.is_finite()) {
                return Err(err("non-finite coordinate".into()));
            }
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(err(format!(
                        "row has {} coordinates, expected {d}",
                        row.len()
                    )))
                }
                _ => {}
            }
            points.push(row);
        }
        PointCloud::new(points)
    }
}

/// Graded space of independent sets: one forbidden pair per edge.
pub fn independence_space(g: &Graph) -> Result<GradedSpace> {
    let forbidden: Vec<Vec<usize>> = g.edges.iter().map(|&(u, v)| vec![u, v]).collect();
    GradedSpace::new(g.n, ConstraintSet::new(forbidden, g.n)?)
}

/// Projector P_i = prod over neighbors j of (1 - n_j), expanded.
pub(crate) fn neighbor_projector(g: &Graph, i: usize) -> Result<FermionOperator> {
    let mut p = FermionOperator::identity(g.n);
    for j in g.neighbors(i) {
        let factor = FermionOperator::identity(g.n)
            .sub(&FermionOperator::number(j, g.n))?;
        p = p.compose(&factor)?;
    }
    Ok(p)
}

/// The hard-core supercharge d = sum over i of a_i† P_i.
pub fn hardcore_supercharge(g: &Graph) -> Result<FermionOperator> {
    let mut d = FermionOperator::zero(g.n);
    for i in 0..g.n {
        let term = FermionOperator::creation(i, g.n).compose(&neighbor_projector(g, i)?)?;
        d = d.add(&term)?;
    }
    Ok(d)
}

/// The hard-core Hamiltonian: dressed hopping over both edge orientations
/// plus the potential sum of projectors.
pub fn hardcore_hamiltonian(g: &Graph) -> Result<FermionOperator> {
    let mut h = FermionOperator::zero(g.n);
    for &(u, v) in &g.edges {
        for (i, j) in [(u, v), (v, u)] {
            let mut hop = FermionOperator::zero(g.n);
            hop.add_term(
                Coeff::one(),
                &[Factor::creation(i), Factor::annihilation(j)],
            )?;
            let term = neighbor_projector(g, i)?
                .compose(&hop)?
                .compose(&neighbor_projector(g, j)?)?;
            h = h.add(&term)?;
        }
    }
    for i in 0..g.n {
        h = h.add(&neighbor_projector(g, i)?)?;
    }
    Ok(h)
}

/// The independence complex of `g` with its verified supercharge.
pub fn independence_complex(g: &Graph) -> Result<CochainComplex> {
    CochainComplex::new(independence_space(g)?, hardcore_supercharge(g)?)
}

/// Clique complex of `g` = independence complex of the complement graph;
/// fermion number l labels l-cliques ((l-1)-simplices).
pub fn clique_complex(g: &Graph) -> Result<CochainComplex> {
    independence_complex(&g.complement())
}

/// Edge between points at Euclidean distance ≤ eps (inclusive).
pub fn vietoris_rips(pc: &PointCloud, eps: f64) -> Result<Graph> {
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::Invalid(format!("invalid grouping scale {eps}")));
    }
    let n = pc.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if pc.distance(i, j) <= eps {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, &edges)
}

/// Output grading convention for Betti tables.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Convention {
    /// Raw fermion-number sectors (reduced Betti numbers shifted by one).
    #[default]
    FermionNumber,
    /// Unreduced simplicial degrees: β̃_k = β_{k+1} plus the augmentation
    /// correction at k = 0.
    Simplicial,
}

/// Relabel a fermion-graded Betti vector as unreduced simplicial Betti
/// numbers indexed by simplex dimension.
pub fn relabel_simplicial(betti: &[usize], n_vertices: usize) -> Vec<usize> {
    if n_vertices == 0 {
        return Vec::new();
    }
    let degrees = betti.len().saturating_sub(1);
    (0..degrees)
        .map(|k| betti.get(k + 1).copied().unwrap_or(0) + usize::from(k == 0))
        .collect()
}

/// One row of a Vietoris-Rips Betti scan: `betti` is None when the scale's
/// graph exceeds the mode cap.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ScanRow {
    pub eps: f64,
    pub l: usize,
    pub betti: Option<usize>,
}

/// Betti numbers of the clique complex of the eps-graph, one row per
/// (scale, sector), for sectors up to `l_max`.
pub fn betti_scan(
    pc: &PointCloud,
    eps_list: &[f64],
    l_max: usize,
    convention: Convention,
) -> Result<Vec<ScanRow>> {
    if eps_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Invalid("scale list must be non-decreasing".into()));
    }
    if pc.is_empty() {
        return Ok(Vec::new());
    }
    let per_scale: Vec<Result<Vec<usize>>> = eps_list
        .par_iter()
        .map(|&eps| -> Result<Vec<usize>> {
            let g = vietoris_rips(pc, eps)?;
            let c = clique_complex(&g)?;
            let betti = c.betti_all(BettiMethod::ExactRank)?;
            Ok(match convention {
                Convention::FermionNumber => betti,
                Convention::Simplicial => relabel_simplicial(&betti, g.n),
            })
        })
        .collect();
    let mut rows = Vec::new();
    for (&eps, res) in eps_list.iter().zip(per_scale) {
        match res {
            Ok(betti) => {
                for l in 0..=l_max {
                    rows.push(ScanRow {
                        eps,
                        l,
                        betti: Some(betti.get(l).copied().unwrap_or(0)),
                    });
                }
            }
            Err(Error::CapExceeded { .. }) => {
                for l in 0..=l_max {
                    rows.push(ScanRow {
                        eps,
                        l,
                        betti: None,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::BettiMethod;

    #[test]
    fn independence_space_dims() {
        let edgeless = Graph::new(3, &[]).unwrap();
        assert_eq!(
            independence_space(&edgeless).unwrap().dims().unwrap(),
            vec![1, 3, 3, 1]
        );
        assert_eq!(
            independence_space(&Graph::complete(3)).unwrap().dims().unwrap(),
            vec![1, 3, 0, 0]
        );
        let c6 = independence_space(&Graph::cycle(6)).unwrap();
        assert_eq!(c6.sector_dim(2).unwrap(), 9);
        assert_eq!(c6.sector_dim(3).unwrap(), 2);
    }

    #[test]
    fn supercharge_small_cases() {
        let single = Graph::new(1, &[]).unwrap();
        assert_eq!(
            hardcore_supercharge(&single).unwrap(),
            FermionOperator::creation(0, 1)
        );

        // P2: a0†(1 - n1) + a1†(1 - n0), built by hand.
        let p2 = Graph::path(2);
        let mut expect = FermionOperator::zero(2);
        expect.add_term(Coeff::one(), &[Factor::creation(0)]).unwrap();
        expect
            .add_term(
                -Coeff::one(),
                &[Factor::creation(0), Factor::creation(1), Factor::annihilation(1)],
            )
            .unwrap();
        expect.add_term(Coeff::one(), &[Factor::creation(1)]).unwrap();
        expect
            .add_term(
                -Coeff::one(),
                &[Factor::creation(1), Factor::creation(0), Factor::annihilation(0)],
            )
            .unwrap();
        assert_eq!(hardcore_supercharge(&p2).unwrap(), expect);
    }

    #[test]
    fn supercharge_c6_properties() {
        let g = Graph::cycle(6);
        let d = hardcore_supercharge(&g).unwrap();
        assert_eq!(d.locality(), 3);
        let space = independence_space(&g).unwrap();
        assert_eq!(d.nilpotency_residual(&space).unwrap(), 0.0);
        // d equals adjoint of sum P_i a_i term by term.
        let mut sum_pa = FermionOperator::zero(6);
        for i in 0..6 {
            let term = super::neighbor_projector(&g, i)
                .unwrap()
                .compose(&FermionOperator::annihilation(i, 6))
                .unwrap();
            sum_pa = sum_pa.add(&term).unwrap();
        }
        assert_eq!(d, sum_pa.adjoint());
    }

    #[test]
    fn hamiltonian_single_vertex_identity() {
        let h = hardcore_hamiltonian(&Graph::new(1, &[]).unwrap()).unwrap();
        assert_eq!(h, FermionOperator::identity(1));
    }

    #[test]
    fn hamiltonian_matches_anticommutator() {
        for g in [Graph::path(2), Graph::cycle(6), Graph::complete(3)] {
            let space = independence_space(&g).unwrap();
            let h = hardcore_hamiltonian(&g).unwrap();
            let d = hardcore_supercharge(&g).unwrap();
            let hh = d.anticommutator(&d.adjoint()).unwrap();
            for l in 0..=g.n {
                assert_eq!(
                    h.sector_matrix(&space, l).unwrap(),
                    hh.sector_matrix(&space, l).unwrap(),
                    "sector {l} of {g:?}"
                );
            }
        }
    }

    #[test]
    fn p2_hamiltonian_sector_matrix() {
        let g = Graph::path(2);
        let space = independence_space(&g).unwrap();
        let h = hardcore_hamiltonian(&g).unwrap();
        let m = h.sector_matrix(&space, 1).unwrap();
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(m.get(r, c), Coeff::one());
        }
    }

    #[test]
    fn complement_k3() {
        assert_eq!(Graph::complete(3).complement(), Graph::new(3, &[]).unwrap());
    }

    #[test]
    fn clique_complex_c4() {
        let c = clique_complex(&Graph::cycle(4)).unwrap();
        assert_eq!(c.space().dims().unwrap(), vec![1, 4, 4, 0, 0]);
        let betti = c.betti_all(BettiMethod::ExactRank).unwrap();
        assert_eq!(betti, vec![0, 0, 1, 0, 0]);
        assert_eq!(c.witten_index().unwrap().index, 1);
    }

    #[test]
    fn clique_complex_k3_contractible() {
        let c = clique_complex(&Graph::complete(3)).unwrap();
        assert_eq!(c.space().dims().unwrap(), vec![1, 3, 3, 1]);
        assert_eq!(
            c.betti_all(BettiMethod::ExactRank).unwrap(),
            vec![0, 0, 0, 0]
        );
        assert_eq!(c.witten_index().unwrap().index, 0);
    }

    #[test]
    fn vietoris_rips_thresholds() {
        let pc = PointCloud::new(vec![vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(vietoris_rips(&pc, 0.5).unwrap().num_edges(), 0);
        assert_eq!(vietoris_rips(&pc, 1.0).unwrap().num_edges(), 1);

        let square = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let g = vietoris_rips(&square, 1.1).unwrap();
        assert_eq!(g.num_edges(), 4);
        assert_eq!(g.edges(), Graph::cycle(4).edges());
    }

    #[test]
    fn betti_scan_square() {
        let square = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let rows = betti_scan(&square, &[0.9, 1.1, 1.5], 2, Convention::FermionNumber).unwrap();
        let beta2: Vec<usize> = rows
            .iter()
            .filter(|r| r.l == 2)
            .map(|r| r.betti.unwrap())
            .collect();
        assert_eq!(beta2, vec![0, 1, 0]);
    }

    #[test]
    fn betti_scan_conventions_single_point() {
        let pc = PointCloud::new(vec![vec![0.0]]).unwrap();
        let raw = betti_scan(&pc, &[1.0], 1, Convention::FermionNumber).unwrap();
        assert_eq!(raw.iter().find(|r| r.l == 1).unwrap().betti, Some(0));
        let simp = betti_scan(&pc, &[1.0], 0, Convention::Simplicial).unwrap();
        assert_eq!(simp[0].betti, Some(1));
    }

    #[test]
    fn betti_scan_empty_cloud() {
        let pc = PointCloud::new(vec![]).unwrap();
        assert!(betti_scan(&pc, &[1.0], 2, Convention::FermionNumber)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn betti_scan_requires_monotone_scales() {
        let pc = PointCloud::new(vec![vec![0.0]]).unwrap();
        assert!(betti_scan(&pc, &[1.0, 0.5], 1, Convention::FermionNumber).is_err());
    }

    #[test]
    fn graph_parse_round_trip_and_errors() {
        let g = Graph::parse("4  # square\n0 1\n1 2\n2 3\n0 3\n", "g.txt").unwrap();
        assert_eq!(g, Graph::cycle(4));
        let err = Graph::parse("3\n0 1\n1 5\n", "g.txt").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn point_cloud_parse_errors() {
        let pc = PointCloud::parse("0.0, 1.0\n2.5, -3.0\n", "pc.csv").unwrap();
        assert_eq!(pc.len(), 2);
        let err = PointCloud::parse("0.0, 1.0\n2.5\n", "pc.csv").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(PointCloud::parse("0.0, nope\n", "pc.csv").is_err());
    }

    #[test]
    fn independence_dims_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(2..=9);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.35) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, &edges).unwrap();
            let dims = independence_space(&g).unwrap().dims().unwrap();
            let mut brute = vec![0usize; n + 1];
            'word: for w in 0u32..1 << n {
                for &(u, v) in g.edges() {
                    if w >> u & 1 == 1 && w >> v & 1 == 1 {
                        continue 'word;
                    }
                }
                brute[w.count_ones() as usize] += 1;
            }
            assert_eq!(dims, brute, "graph {g:?}");
        }
    }

    #[test]
    fn random_graphs_nilpotent_and_self_dual() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let n = rng.gen_range(3..=8);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.3) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, &edges).unwrap();
            let c = independence_complex(&g).unwrap();
            // Betti from d equals Betti from the conjugated boundary d†.
            for l in 0..=n {
                let dim = c.space().sector_dim(l).unwrap();
                let up = c.d_matrix(l).unwrap();
                let down = if l == 0 {
                    None
                } else {
                    Some(c.d_matrix(l - 1).unwrap())
                };
                let down_rank = down.as_ref().map_or(0, |m| m.conj_transpose().rank());
                let homology = dim - up.conj_transpose().rank() - down_rank;
                assert_eq!(
                    homology,
                    c.betti(l, BettiMethod::ExactRank).unwrap(),
                    "sector {l} of {g:?}"
                );
            }
        }
    }
}
