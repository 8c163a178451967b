//! Hodge decomposition of game flows on the flow complex.
//!
//! The flow complex has one vertex per facet dual point, one edge per pair
//! of facets sharing a comparable star and one triangle per triple inside a
//! star. Edges and triangles are oriented by ascending label. Cochains are
//! plain coefficient vectors and the inner product is the unweighted sum, so
//! every coboundary is the transpose of the matching incidence matrix.

mod decomposition;
pub mod linalg;

use std::collections::BTreeMap;

use nalgebra_sparse::{CooMatrix, CsrMatrix};

pub use decomposition::{
    classify, decompose, potential_function, Classification, ComponentNorms, FlowDecomposition,
    GameClass, HodgeConfig, PotentialFit, ProofLabels, Residuals, SubspaceDimensions,
};

use crate::complex::{GameComplex, Label};
use crate::error::{Error, Result};
use crate::game::Player;
use crate::nerve::Nerve;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowComplex {
    labels: Vec<Label>,
    edges: Vec<(usize, usize)>,
    edge_player: Vec<Option<Player>>,
    edge_index: BTreeMap<(usize, usize), usize>,
    triangles: Vec<[usize; 3]>,
}

impl FlowComplex {
    /// A flow complex on an arbitrary graph with vertices `0..vertices`.
    /// Edges are reoriented low-to-high; every triangle's edges must exist.
    pub fn new(
        vertices: usize,
        edges: &[(usize, usize)],
        triangles: &[[usize; 3]],
    ) -> Result<Self> {
        let labels = (0..vertices).collect();
        let edges: Vec<_> = edges.iter().map(|&e| (e, None)).collect();
        Self::assemble(labels, &edges, triangles)
    }

    fn assemble(
        labels: Vec<Label>,
        edges: &[((usize, usize), Option<Player>)],
        triangles: &[[usize; 3]],
    ) -> Result<Self> {
        let n = labels.len();
        let mut edge_index = BTreeMap::new();
        let mut oriented = Vec::new();
        let mut edge_player = Vec::new();
        for &((a, b), player) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::invalid(format!("invalid edge ({a}, {b})")));
            }
            let key = (a.min(b), a.max(b));
            match edge_index.get(&key) {
                Some(&k) => {
                    if edge_player[k] != player {
                        return Err(Error::Invariant(format!(
                            "facets {} and {} are comparable through two players",
                            labels[key.0], labels[key.1]
                        )));
                    }
                }
                None => {
                    edge_index.insert(key, oriented.len());
                    oriented.push(key);
                    edge_player.push(player);
                }
            }
        }
        let mut tris = Vec::with_capacity(triangles.len());
        for t in triangles {
            let mut t = *t;
            t.sort_unstable();
            for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                if !edge_index.contains_key(&(a, b)) {
                    return Err(Error::invalid(format!(
                        "triangle {t:?} lacks edge ({a}, {b})"
                    )));
                }
            }
            tris.push(t);
        }
        tris.sort_unstable();
        tris.dedup();
        Ok(FlowComplex {
            labels,
            edges: oriented,
            edge_player,
            edge_index,
            triangles: tris,
        })
    }

    /// Vertices are the nerve's facets, edges its same-star pairs and
    /// triangles its same-star triples.
    pub fn from_nerve(nerve: &Nerve) -> Result<Self> {
        let labels: Vec<Label> = nerve.vertices.keys().copied().collect();
        let position: BTreeMap<Label, usize> =
            labels.iter().enumerate().map(|(k, &l)| (l, k)).collect();
        let mut stars: BTreeMap<_, Vec<usize>> = BTreeMap::new();
        let mut edges = Vec::with_capacity(nerve.edges.len());
        for e in &nerve.edges {
            let (a, b) = match (position.get(&e.source), position.get(&e.target)) {
                (Some(&a), Some(&b)) => (a, b),
                _ => {
                    return Err(Error::Invariant(
                        "nerve edge endpoint is not a vertex".into(),
                    ))
                }
            };
            edges.push(((a, b), Some(e.star.player)));
            let members = stars.entry(e.star.clone()).or_default();
            members.extend([a, b]);
        }
        let mut triangles = Vec::new();
        for members in stars.values_mut() {
            members.sort_unstable();
            members.dedup();
            for x in 0..members.len() {
                for y in x + 1..members.len() {
                    for z in y + 1..members.len() {
                        triangles.push([members[x], members[y], members[z]]);
                    }
                }
            }
        }
        Self::assemble(labels, &edges, &triangles)
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Edges as vertex positions `(low, high)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_player(&self, edge: usize) -> Option<Player> {
        self.edge_player[edge]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Signed incidence matrix: `t = 1` maps edges to vertices, `t = 2`
    /// triangles to edges.
    pub fn boundary_matrix(&self, t: usize) -> CsrMatrix<f64> {
        match t {
            1 => {
                let mut coo = CooMatrix::new(self.num_vertices(), self.num_edges());
                for (k, &(a, b)) in self.edges.iter().enumerate() {
                    coo.push(b, k, 1.0);
                    coo.push(a, k, -1.0);
                }
                CsrMatrix::from(&coo)
            }
            2 => {
                let mut coo = CooMatrix::new(self.num_edges(), self.num_triangles());
                for (k, &[a, b, c]) in self.triangles.iter().enumerate() {
                    coo.push(self.edge_index[&(b, c)], k, 1.0);
                    coo.push(self.edge_index[&(a, c)], k, -1.0);
                    coo.push(self.edge_index[&(a, b)], k, 1.0);
                }
                CsrMatrix::from(&coo)
            }
            _ => panic!("flow complexes have boundary maps in degrees 1 and 2 only"),
        }
    }

    /// Coboundary `delta_t`, the adjoint of the boundary under the
    /// unweighted inner product.
    pub fn coboundary(&self, t: usize) -> CsrMatrix<f64> {
        self.boundary_matrix(t + 1).transpose()
    }

    /// Hodge Laplacian on `t`-cochains.
    pub fn laplacian(&self, t: usize) -> CsrMatrix<f64> {
        match t {
            0 => {
                let d0 = self.coboundary(0);
                &d0.transpose() * &d0
            }
            1 => {
                let d0 = self.coboundary(0);
                let d1 = self.coboundary(1);
                &(&d0 * &d0.transpose()) + &(&d1.transpose() * &d1)
            }
            2 => {
                let d1 = self.coboundary(1);
                &d1 * &d1.transpose()
            }
            _ => panic!("flow complexes carry Laplacians in degrees 0..=2 only"),
        }
    }
}

/// Coordinate text: a `rows cols nnz` header, then one `row col value` line
/// per stored entry in row-major order.
pub fn triplets(m: &CsrMatrix<f64>) -> String {
    use std::fmt::Write;
    let mut out = format!("{} {} {}\n", m.nrows(), m.ncols(), m.nnz());
    for (r, row) in m.row_iter().enumerate() {
        for (&c, v) in row.col_indices().iter().zip(row.values()) {
            writeln!(out, "{r} {c} {v}").unwrap();
        }
    }
    out
}

/// Signed game flow: on the edge `a -> b` (ascending label) of a star of
/// player `i`, `e_i(b) - e_i(a)`.
pub fn game_flow(complex: &GameComplex, flow: &FlowComplex) -> Result<Vec<f64>> {
    flow.edges
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let player = flow.edge_player[k]
                .ok_or_else(|| Error::invalid("flow complex was not built from a nerve"))?;
            let (la, lb) = (flow.labels[a], flow.labels[b]);
            Ok(complex.facet(lb).payoffs[player] - complex.facet(la).payoffs[player])
        })
        .collect()
}
