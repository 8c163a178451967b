//! Best responses and Nash equilibrium simplices via the degree criterion.
//!
//! A facet `x_i v X_{-i}` is a best response for player `i` when every pure
//! alternative `s_i v X_{-i}` sends its dual flow into it (ties enter both
//! ends), i.e. its deviation degree equals `l_i`. A facet is a Nash simplex
//! when it is a best response for every player.

use serde::Serialize;

use crate::complex::{GameComplex, Label};
use crate::covering::{DeviationTable, Neighbourhood, NeighbourhoodKind};
use crate::game::{Player, SituationProfile};
use crate::Result;

/// Per-facet, per-player degree against the pure alternatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeEntry {
    pub label: Label,
    pub player: Player,
    pub degree: usize,
    /// Degree a best response must reach, `l_i`.
    pub required: usize,
}

pub struct NashAnalysis<'a> {
    complex: &'a GameComplex,
    table: DeviationTable,
}

impl<'a> NashAnalysis<'a> {
    pub fn new(complex: &'a GameComplex) -> Self {
        NashAnalysis {
            complex,
            table: DeviationTable::new(complex),
        }
    }

    pub fn table(&self) -> &DeviationTable {
        &self.table
    }

    fn base_of(&self, label: Label, player: Player) -> usize {
        let mut base = self.complex.facet(label).choice.clone();
        base.remove(player);
        self.table.base_index(player, &base)
    }

    /// Number of pure alternatives whose flow enters the facet, counted by
    /// comparing payoffs directly.
    pub fn deviation_degree(&self, label: Label, player: Player) -> usize {
        let e = self.complex.facet(label).payoffs[player];
        let tol = self.complex.tolerance();
        self.table
            .row(player, self.base_of(label, player))
            .iter()
            .filter(|&&alt| e >= alt - tol)
            .count()
    }

    /// The same degree obtained by building the neighbourhood of the facet
    /// and its pure alternatives and counting entering edges.
    pub fn deviation_degree_by_edges(&self, label: Label, player: Player) -> usize {
        let row = self.table.row(player, self.base_of(label, player));
        let l = row.len();
        let mut values = row;
        values.push(self.complex.facet(label).payoffs[player]);
        let mut base = self.complex.facet(label).choice.clone();
        base.remove(player);
        let nb = Neighbourhood::new(
            NeighbourhoodKind::CrossLevel {
                player,
                base,
                restricted: false,
            },
            (0..=l).collect(),
            values,
            self.complex.tolerance(),
        );
        nb.edges
            .iter()
            .filter(|e| (e.target == l && e.source < l) || (e.tie && e.source == l && e.target < l))
            .count()
    }

    pub fn is_best_response(&self, label: Label, player: Player) -> bool {
        self.deviation_degree(label, player) == self.complex.game().num_strategies(player)
    }

    /// Facets `x_i v X_{-i}` of the star over `base` that are best responses.
    pub fn best_response(&self, player: Player, base: &[usize]) -> Result<Vec<Label>> {
        let star = crate::nerve::comparable_star(self.complex, player, base)?;
        Ok(star
            .facets
            .into_iter()
            .filter(|&f| self.is_best_response(f, player))
            .collect())
    }

    pub fn nash_simplices(&self) -> Vec<Label> {
        self.complex
            .facets()
            .iter()
            .filter(|f| (0..self.complex.num_players()).all(|i| self.is_best_response(f.label, i)))
            .map(|f| f.label)
            .collect()
    }

    pub fn degree_table(&self) -> Vec<DegreeEntry> {
        let game = self.complex.game();
        self.complex
            .facets()
            .iter()
            .flat_map(|f| {
                (0..game.num_players()).map(move |i| DegreeEntry {
                    label: f.label,
                    player: i,
                    degree: self.deviation_degree(f.label, i),
                    required: game.num_strategies(i),
                })
            })
            .collect()
    }
}

pub fn nash_simplices(complex: &GameComplex) -> Vec<Label> {
    NashAnalysis::new(complex).nash_simplices()
}

/// The situation a facet stands for.
pub fn facet_profile(complex: &GameComplex, label: Label) -> SituationProfile {
    let f = complex.facet(label);
    SituationProfile::new(
        f.choice
            .iter()
            .enumerate()
            .map(|(i, &k)| complex.mixed_sets()[i][k].clone())
            .collect(),
    )
    .expect("facet components are in player order")
}

/// Labels the brute-force oracle accepts, for cross-checking.
pub fn oracle_labels(complex: &GameComplex) -> Result<Vec<Label>> {
    let game = complex.game();
    let mut out = Vec::new();
    for f in complex.facets() {
        if game.is_nash(&facet_profile(complex, f.label), complex.tolerance())? {
            out.push(f.label);
        }
    }
    Ok(out)
}
