//! The situation complex `K_G` and its weighted form `K*_G`.
//!
//! Vertices are the candidate mixed strategies of every player, facets are
//! the situations `[x_1, ..., x_n]` (one candidate per player), and every
//! nonempty subset of a facet's vertices is stored once as a face. Vertex
//! ids are grouped by player, so ascending vertex order is player order and
//! fixes the orientation of every simplex.

mod barycenter;
mod chain;
mod subdivision;

use std::collections::BTreeMap;

use nalgebra_sparse::{CooMatrix, CsrMatrix};
use serde::Serialize;

pub use barycenter::{player_weights, Barycenter};
pub use chain::{orientation_sign, Chain};
pub use subdivision::Subdivision;

use crate::error::{Error, Result};
use crate::game::{Game, MixedStrategy, Player, TOLERANCE};

pub type VertexId = usize;
pub type SimplexId = usize;
/// Facet label: mixed-radix index of the facet's candidate choices.
pub type Label = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub player: Player,
    /// Position of the strategy in the player's candidate list.
    pub index: usize,
    pub strategy: MixedStrategy,
}

/// A situation `[x_1, ..., x_n]` with its cached payoffs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SituationFacet {
    pub label: Label,
    /// Candidate index chosen by each player.
    pub choice: Vec<usize>,
    pub vertices: Vec<VertexId>,
    pub payoffs: Vec<f64>,
    /// Sum of the players' expected payoffs.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    pub id: SimplexId,
    pub vertices: Vec<VertexId>,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// A simplex together with its weight, compared by the discrete metric.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSimplex {
    pub vertices: Vec<VertexId>,
    pub weight: f64,
}

/// Discrete metric on weighted simplices: 0 exactly when both the simplex
/// and its weight agree.
pub fn metric(a: &WeightedSimplex, b: &WeightedSimplex) -> u8 {
    if a.vertices == b.vertices && a.weight == b.weight {
        0
    } else {
        1
    }
}

/// One signed flag `sigma_t < ... < sigma_{n-1}` of a dual cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPiece {
    pub sign: i8,
    pub flag: Vec<SimplexId>,
}

/// The dual cell `*(sigma_t)` as signed chains of barycenters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCell {
    pub base: SimplexId,
    /// `n - t - 1`
    pub dim: usize,
    pub pieces: Vec<DualPiece>,
}

#[derive(Debug, Clone)]
pub struct GameComplex {
    game: Game,
    mixed: Vec<Vec<MixedStrategy>>,
    vertices: Vec<Vertex>,
    offsets: Vec<usize>,
    facets: Vec<SituationFacet>,
    simplices: Vec<Simplex>,
    lookup: BTreeMap<Vec<VertexId>, SimplexId>,
    by_dim: Vec<Vec<SimplexId>>,
    cofaces: Vec<Vec<SimplexId>>,
    tolerance: f64,
}

impl GameComplex {
    pub fn build(game: Game, mixed: Vec<Vec<MixedStrategy>>) -> Result<Self> {
        Self::build_with_tolerance(game, mixed, TOLERANCE)
    }

    /// Pure-strategy complex: every player's candidates are the deltas.
    pub fn pure(game: Game) -> Result<Self> {
        let mixed = (0..game.num_players())
            .map(|i| {
                (0..game.num_strategies(i))
                    .map(|s| MixedStrategy::pure(i, s, game.num_strategies(i)))
                    .collect()
            })
            .collect();
        Self::build(game, mixed)
    }

    pub fn build_with_tolerance(
        game: Game,
        mixed: Vec<Vec<MixedStrategy>>,
        tolerance: f64,
    ) -> Result<Self> {
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::invalid("tolerance must be positive"));
        }
        let n = game.num_players();
        if mixed.len() != n {
            return Err(Error::invalid(format!(
                "{} mixed sets for {n} players",
                mixed.len()
            )));
        }
        let mut vertices = Vec::new();
        let mut offsets = Vec::with_capacity(n);
        for (i, set) in mixed.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::invalid(format!("mixed set of player {i} is empty")));
            }
            offsets.push(vertices.len());
            for (k, x) in set.iter().enumerate() {
                if x.player() != i || x.weights().len() != game.num_strategies(i) {
                    return Err(Error::invalid(format!(
                        "candidate {k} of player {i} does not match the game"
                    )));
                }
                if set[..k].iter().any(|y| y.weights() == x.weights()) {
                    return Err(Error::invalid(format!(
                        "candidate {k} of player {i} repeats an earlier candidate"
                    )));
                }
                vertices.push(Vertex {
                    player: i,
                    index: k,
                    strategy: x.clone(),
                });
            }
        }

        let counts: Vec<usize> = mixed.iter().map(Vec::len).collect();
        let total: usize = counts.iter().product();
        let mut facets = Vec::with_capacity(total);
        for label in 0..total {
            let choice = mixed_radix(label, &counts);
            let verts: Vec<VertexId> = choice
                .iter()
                .enumerate()
                .map(|(i, k)| offsets[i] + k)
                .collect();
            let dists: Vec<Option<&[f64]>> = choice
                .iter()
                .enumerate()
                .map(|(i, &k)| Some(mixed[i][k].weights()))
                .collect();
            let payoffs = game.expected_payoffs_of(&dists);
            let weight = payoffs.iter().sum();
            facets.push(SituationFacet {
                label,
                choice,
                vertices: verts,
                payoffs,
                weight,
            });
        }

        // every nonempty subset of every facet, ordered by (dimension, vertices)
        let mut faces: BTreeMap<(usize, Vec<VertexId>), ()> = BTreeMap::new();
        for f in &facets {
            for mask in 1u64..(1u64 << n) {
                let face: Vec<VertexId> = (0..n)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| f.vertices[b])
                    .collect();
                faces.insert((face.len() - 1, face), ());
            }
        }
        let mut simplices = Vec::with_capacity(faces.len());
        let mut lookup = BTreeMap::new();
        let mut by_dim = vec![Vec::new(); n];
        for (id, ((dim, verts), _)) in faces.into_iter().enumerate() {
            lookup.insert(verts.clone(), id);
            by_dim[dim].push(id);
            simplices.push(Simplex {
                id,
                vertices: verts,
            });
        }
        let mut cofaces = vec![Vec::new(); simplices.len()];
        for s in &simplices {
            if s.vertices.len() < 2 {
                continue;
            }
            for drop in 0..s.vertices.len() {
                let mut face = s.vertices.clone();
                face.remove(drop);
                cofaces[lookup[&face]].push(s.id);
            }
        }
        for c in &mut cofaces {
            c.sort_unstable();
        }

        Ok(GameComplex {
            game,
            mixed,
            vertices,
            offsets,
            facets,
            simplices,
            lookup,
            by_dim,
            cofaces,
            tolerance,
        })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn mixed_sets(&self) -> &[Vec<MixedStrategy>] {
        &self.mixed
    }

    pub fn mixed_counts(&self) -> Vec<usize> {
        self.mixed.iter().map(Vec::len).collect()
    }

    pub fn num_players(&self) -> usize {
        self.game.num_players()
    }

    /// Dimension of the complex, `n - 1`.
    pub fn dim(&self) -> usize {
        self.num_players() - 1
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_id(&self, player: Player, index: usize) -> VertexId {
        self.offsets[player] + index
    }

    pub fn facets(&self) -> &[SituationFacet] {
        &self.facets
    }

    pub fn facet(&self, label: Label) -> &SituationFacet {
        &self.facets[label]
    }

    /// Label of the facet with the given candidate choices.
    pub fn label_of(&self, choice: &[usize]) -> Label {
        let counts = self.mixed_counts();
        choice
            .iter()
            .zip(&counts)
            .fold(0, |acc, (k, m)| acc * m + k)
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, id: SimplexId) -> &Simplex {
        &self.simplices[id]
    }

    pub fn simplices_of_dim(&self, dim: usize) -> &[SimplexId] {
        self.by_dim.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn find(&self, vertices: &[VertexId]) -> Option<SimplexId> {
        let (sorted, _) = orientation_sign(vertices)?;
        self.lookup.get(&sorted).copied()
    }

    pub fn facet_simplex(&self, label: Label) -> SimplexId {
        self.lookup[&self.facets[label].vertices]
    }

    /// Facet label of a top-dimensional simplex.
    pub fn label_of_simplex(&self, id: SimplexId) -> Option<Label> {
        let s = &self.simplices[id];
        if s.vertices.len() != self.num_players() {
            return None;
        }
        let choice: Vec<usize> = s.vertices.iter().map(|&v| self.vertices[v].index).collect();
        Some(self.label_of(&choice))
    }

    /// Simplices of one dimension higher that contain `id`.
    pub fn cofaces(&self, id: SimplexId) -> &[SimplexId] {
        &self.cofaces[id]
    }

    /// Number of simplices per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Signed incidence matrix of the boundary map from `dim`-simplices to
    /// `(dim - 1)`-simplices, indexed by position within each dimension.
    pub fn boundary_matrix(&self, dim: usize) -> CsrMatrix<f64> {
        assert!(dim >= 1, "boundary matrix needs dim >= 1");
        let rows = self.simplices_of_dim(dim - 1);
        let cols = self.simplices_of_dim(dim);
        let row_pos: BTreeMap<SimplexId, usize> =
            rows.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        let mut coo = CooMatrix::new(rows.len(), cols.len());
        for (c, &sid) in cols.iter().enumerate() {
            let verts = &self.simplices[sid].vertices;
            for drop in 0..verts.len() {
                let mut face = verts.clone();
                face.remove(drop);
                let sign = if drop % 2 == 0 { 1.0 } else { -1.0 };
                coo.push(row_pos[&self.lookup[&face]], c, sign);
            }
        }
        CsrMatrix::from(&coo)
    }

    pub fn chain_of(&self, id: SimplexId) -> Chain {
        Chain::simplex(&self.simplices[id].vertices).expect("stored simplices are valid")
    }

    /// Distributions of a simplex extended by the zero function at missing
    /// players.
    fn extended(&self, id: SimplexId) -> Vec<Option<&[f64]>> {
        let mut dists = vec![None; self.num_players()];
        for &v in &self.simplices[id].vertices {
            let vx = &self.vertices[v];
            dists[vx.player] = Some(vx.strategy.weights());
        }
        dists
    }

    /// Barycentric point of any simplex: facets use the averaged weights
    /// directly, proper faces are zero-extended and renormalised.
    pub fn barycenter(&self, id: SimplexId) -> Barycenter {
        let dists = self.extended(id);
        let per_player = player_weights(&self.game, &dists);
        let verts = self.simplices[id].vertices.clone();
        let mut weights: Vec<f64> = verts
            .iter()
            .map(|&v| per_player[self.vertices[v].player])
            .collect();
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            for w in &mut weights {
                *w /= total;
            }
        }
        Barycenter {
            vertices: verts,
            weights,
        }
    }

    pub fn facet_barycenter(&self, label: Label) -> Barycenter {
        self.barycenter(self.facet_simplex(label))
    }

    /// Ambient coordinates of a barycenter: player `i`'s block of length
    /// `l_i` holds the weighted candidate distribution.
    pub fn coordinates(&self, b: &Barycenter) -> Vec<f64> {
        let counts = self.game.strategy_counts();
        let starts: Vec<usize> = counts
            .iter()
            .scan(0, |acc, l| {
                let s = *acc;
                *acc += l;
                Some(s)
            })
            .collect();
        let mut out = vec![0.0; counts.iter().sum()];
        for (&v, &w) in b.vertices.iter().zip(&b.weights) {
            let vx = &self.vertices[v];
            for (k, p) in vx.strategy.weights().iter().enumerate() {
                out[starts[vx.player] + k] += w * p;
            }
        }
        out
    }

    /// Expected payoffs of a simplex under zero extension.
    pub fn payoffs_of(&self, id: SimplexId) -> Vec<f64> {
        self.game.expected_payoffs_of(&self.extended(id))
    }

    /// Sum of expected payoffs. A proper face has a zero-extended player,
    /// whose zero factor makes its weight vanish.
    pub fn face_weight(&self, id: SimplexId) -> f64 {
        self.payoffs_of(id).iter().sum()
    }

    pub fn weighted(&self, id: SimplexId) -> WeightedSimplex {
        WeightedSimplex {
            vertices: self.simplices[id].vertices.clone(),
            weight: self.face_weight(id),
        }
    }

    /// Star dual `*(sigma_t)`: one signed barycenter chain per flag of
    /// cofaces from `sigma_t` up to a facet. The sign is the orientation of
    /// the base's vertices followed by the vertices added along the flag,
    /// relative to the facet.
    pub fn star_dual(&self, id: SimplexId) -> DualCell {
        let base = &self.simplices[id];
        let mut pieces = Vec::new();
        let mut stack = vec![(vec![id], base.vertices.clone())];
        while let Some((flag, order)) = stack.pop() {
            let last = *flag.last().unwrap();
            if self.simplices[last].vertices.len() == self.num_players() {
                let (_, sign) = orientation_sign(&order).expect("distinct vertices");
                pieces.push(DualPiece {
                    sign: sign as i8,
                    flag,
                });
                continue;
            }
            for &up in self.cofaces(last).iter().rev() {
                let added = *self.simplices[up]
                    .vertices
                    .iter()
                    .find(|v| !self.simplices[last].vertices.contains(v))
                    .unwrap();
                let mut f = flag.clone();
                f.push(up);
                let mut o = order.clone();
                o.push(added);
                stack.push((f, o));
            }
        }
        DualCell {
            base: id,
            dim: self.dim() - base.dim(),
            pieces,
        }
    }

    pub fn barycentric_subdivision(&self) -> Subdivision {
        Subdivision::of(self)
    }
}

pub(crate) fn mixed_radix(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for (slot, &r) in out.iter_mut().zip(radices).rev() {
        *slot = index % r;
        index /= r;
    }
    out
}
