//! Pure-strategy stars, neighbourhood degrees and the covering complex.
//!
//! For player `i` the pure star `st(s_i^j)` joins the delta at `s_i^j` with
//! every candidate base `X_{-i}`. Two kinds of neighbourhood carry dual
//! flows: the same-level one inside a pure star (another player's candidate
//! varies) and the cross-level one `st_s(X_{-i})`, which varies player `i`'s
//! pure strategy against a fixed base. The degree of a dual point is the
//! number of flows entering it, tie flows entering both ends.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::complex::{mixed_radix, player_weights, GameComplex, Label, VertexId};
use crate::error::{Error, Result};
use crate::game::Player;

/// Expected payoffs `e(s_i^j, X_{-i})` for every player `i`, base and pure
/// strategy `j`, computed once per complex.
#[derive(Debug, Clone)]
pub struct DeviationTable {
    /// `values[i][base][j]` is the full payoff vector.
    values: Vec<Vec<Vec<Vec<f64>>>>,
    radices: Vec<Vec<usize>>,
}

impl DeviationTable {
    pub fn new(complex: &GameComplex) -> Self {
        let game = complex.game();
        let m = complex.mixed_counts();
        let n = m.len();
        let mut values = Vec::with_capacity(n);
        let mut radices = Vec::with_capacity(n);
        for i in 0..n {
            let rad = others(&m, i);
            let total: usize = rad.iter().product();
            let l = game.num_strategies(i);
            let delta: Vec<Vec<f64>> = (0..l)
                .map(|j| {
                    let mut d = vec![0.0; l];
                    d[j] = 1.0;
                    d
                })
                .collect();
            let per_base = (0..total)
                .map(|b| {
                    let base = mixed_radix(b, &rad);
                    (0..l)
                        .map(|j| {
                            let dists = situation(complex, i, &base, &delta[j]);
                            game.expected_payoffs_of(&dists)
                        })
                        .collect()
                })
                .collect();
            values.push(per_base);
            radices.push(rad);
        }
        DeviationTable { values, radices }
    }

    pub fn base_count(&self, player: Player) -> usize {
        self.values[player].len()
    }

    pub fn base_index(&self, player: Player, base: &[usize]) -> usize {
        base.iter()
            .zip(&self.radices[player])
            .fold(0, |acc, (b, r)| acc * r + b)
    }

    pub fn base_at(&self, player: Player, index: usize) -> Vec<usize> {
        mixed_radix(index, &self.radices[player])
    }

    /// `e_k(s_i^j, X_{-i})` for the base with the given index.
    pub fn payoff(&self, player: Player, base: usize, pure: usize, of: Player) -> f64 {
        self.values[player][base][pure][of]
    }

    /// `e_i(s_i^j, X_{-i})` over all `j`.
    pub fn row(&self, player: Player, base: usize) -> Vec<f64> {
        self.values[player][base]
            .iter()
            .map(|v| v[player])
            .collect()
    }
}

fn others(m: &[usize], i: Player) -> Vec<usize> {
    m.iter()
        .enumerate()
        .filter(|(k, _)| *k != i)
        .map(|(_, c)| *c)
        .collect()
}

fn situation<'a>(
    complex: &'a GameComplex,
    i: Player,
    base: &[usize],
    own: &'a [f64],
) -> Vec<Option<&'a [f64]>> {
    let mut it = base.iter();
    (0..complex.num_players())
        .map(|k| {
            if k == i {
                Some(own)
            } else {
                Some(complex.mixed_sets()[k][*it.next().unwrap()].weights())
            }
        })
        .collect()
}

/// One facet `s_i^j v X_{-i}` of a pure star.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureFacet {
    pub base: Vec<usize>,
    /// Barycentric weights per player.
    pub barycenter: Vec<f64>,
    pub payoffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureStar {
    pub player: Player,
    pub pure: usize,
    pub facets: Vec<PureFacet>,
}

pub fn pure_star(complex: &GameComplex, player: Player, pure: usize) -> Result<PureStar> {
    let game = complex.game();
    if player >= game.num_players() {
        return Err(Error::invalid(format!("player {player} out of range")));
    }
    let l = game.num_strategies(player);
    if pure >= l {
        return Err(Error::invalid(format!(
            "pure strategy {pure} out of range for player {player} ({l} strategies)"
        )));
    }
    let mut delta = vec![0.0; l];
    delta[pure] = 1.0;
    let rad = others(&complex.mixed_counts(), player);
    let total: usize = rad.iter().product();
    let facets = (0..total)
        .map(|b| {
            let base = mixed_radix(b, &rad);
            let dists = situation(complex, player, &base, &delta);
            PureFacet {
                barycenter: player_weights(game, &dists),
                payoffs: game.expected_payoffs_of(&dists),
                base,
            }
        })
        .collect();
    Ok(PureStar {
        player,
        pure,
        facets,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NeighbourhoodKind {
    /// Inside `st(s_i^r)`, player `varying`'s candidate changes.
    SameLevel {
        player: Player,
        pure: usize,
        varying: Player,
    },
    /// `st_s(X_{-i})`, or its restriction to `Z_i` when `restricted`.
    CrossLevel {
        player: Player,
        base: Vec<usize>,
        restricted: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighbourhoodEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub tie: bool,
}

/// Members are compared by `values`; edges run from the smaller value to
/// the larger.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbourhood {
    pub kind: NeighbourhoodKind,
    /// Member keys: pure strategy index for cross-level neighbourhoods,
    /// candidate index of the varying player for same-level ones.
    pub members: Vec<usize>,
    pub values: Vec<f64>,
    pub edges: Vec<NeighbourhoodEdge>,
}

impl Neighbourhood {
    pub fn new(kind: NeighbourhoodKind, members: Vec<usize>, values: Vec<f64>, tol: f64) -> Self {
        let mut edges = Vec::new();
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                let diff = values[b] - values[a];
                let tie = diff.abs() <= tol;
                let (source, target) = if tie || diff > 0.0 { (a, b) } else { (b, a) };
                edges.push(NeighbourhoodEdge {
                    source,
                    target,
                    weight: diff.abs(),
                    tie,
                });
            }
        }
        Neighbourhood {
            kind,
            members,
            values,
            edges,
        }
    }

    /// Number of flow directions entering member `position`.
    pub fn degree(&self, position: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.target == position || (e.tie && e.source == position))
            .count()
    }

    pub fn position(&self, member: usize) -> Option<usize> {
        self.members.iter().position(|&m| m == member)
    }
}

pub fn cross_level(
    complex: &GameComplex,
    table: &DeviationTable,
    player: Player,
    base: usize,
) -> Neighbourhood {
    let row = table.row(player, base);
    Neighbourhood::new(
        NeighbourhoodKind::CrossLevel {
            player,
            base: table.base_at(player, base),
            restricted: false,
        },
        (0..row.len()).collect(),
        row,
        complex.tolerance(),
    )
}

pub fn restricted(
    complex: &GameComplex,
    table: &DeviationTable,
    player: Player,
    base: usize,
    z: &[usize],
) -> Neighbourhood {
    let row = table.row(player, base);
    Neighbourhood::new(
        NeighbourhoodKind::CrossLevel {
            player,
            base: table.base_at(player, base),
            restricted: true,
        },
        z.to_vec(),
        z.iter().map(|&j| row[j]).collect(),
        complex.tolerance(),
    )
}

/// Same-level neighbourhood in `st(s_i^r)`: `base` fixes the candidates of
/// everyone except players `i` and `varying`, in player order.
pub fn same_level(
    complex: &GameComplex,
    table: &DeviationTable,
    player: Player,
    pure: usize,
    varying: Player,
    base: &[usize],
) -> Result<Neighbourhood> {
    if varying == player || varying >= complex.num_players() {
        return Err(Error::invalid(
            "the varying player must differ from the star's player",
        ));
    }
    let count = complex.mixed_counts()[varying];
    let slot = if varying < player {
        varying
    } else {
        varying - 1
    };
    let mut values = Vec::with_capacity(count);
    for k in 0..count {
        let mut full = base.to_vec();
        full.insert(slot, k);
        let b = table.base_index(player, &full);
        values.push(table.payoff(player, b, pure, varying));
    }
    Ok(Neighbourhood::new(
        NeighbourhoodKind::SameLevel {
            player,
            pure,
            varying,
        },
        (0..count).collect(),
        values,
        complex.tolerance(),
    ))
}

/// `Z_i`: pure strategies with full degree `l_i - 1` in at least one
/// cross-level neighbourhood.
pub fn compute_z(complex: &GameComplex, table: &DeviationTable, player: Player) -> Vec<usize> {
    let l = complex.game().num_strategies(player);
    let mut z = BTreeSet::new();
    for b in 0..table.base_count(player) {
        let nb = cross_level(complex, table, player, b);
        for j in 0..l {
            if nb.degree(j) == l - 1 {
                z.insert(j);
            }
        }
    }
    z.into_iter().collect()
}

/// `A_i(s)`: base indices where `s` has full degree `|Z_i| - 1` within the
/// neighbourhood restricted to `Z_i`.
pub fn compute_a(
    complex: &GameComplex,
    table: &DeviationTable,
    player: Player,
    z: &[usize],
    pure: usize,
) -> Result<Vec<usize>> {
    let pos = z
        .iter()
        .position(|&j| j == pure)
        .ok_or_else(|| Error::invalid(format!("strategy {pure} is not in Z_{player}")))?;
    Ok((0..table.base_count(player))
        .filter(|&b| restricted(complex, table, player, b, z).degree(pos) == z.len() - 1)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CoverVertex {
    pub sheet: Player,
    pub vertex: VertexId,
}

/// Open simplex `((x_i, X_{-i}), e_i)` of sheet `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SheetSimplex {
    pub label: Label,
    pub vertices: Vec<CoverVertex>,
    pub payoff: f64,
    /// Pure strategies `s` with `X_{-i}` in `A_i(s)`.
    pub covers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sheet {
    pub player: Player,
    pub z: Vec<usize>,
    /// `A_i(s)` for each `s` in `Z_i`, as base indices.
    pub cover_sets: BTreeMap<usize, Vec<usize>>,
    pub simplices: Vec<SheetSimplex>,
}

/// The join of one sheet simplex per player over the same facet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Join {
    pub label: Label,
    /// Index into each sheet's `simplices`, in player order.
    pub parts: Vec<usize>,
}

/// Disjoint union of the per-player sheets with the projection onto `K*_G`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CoveringComplex {
    pub sheets: Vec<Sheet>,
    pub joins: Vec<Join>,
    #[serde(serialize_with = "projection_pairs")]
    pub projection: BTreeMap<CoverVertex, VertexId>,
}

fn projection_pairs<S: serde::Serializer>(
    map: &BTreeMap<CoverVertex, VertexId>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Pair {
        sheet: Player,
        vertex: VertexId,
        image: VertexId,
    }
    s.collect_seq(map.iter().map(|(c, &image)| Pair {
        sheet: c.sheet,
        vertex: c.vertex,
        image,
    }))
}

impl CoveringComplex {
    /// Image of a join: its facet label and `sum_i e_i`.
    pub fn project_join(&self, join: &Join) -> (Label, f64) {
        let weight = join
            .parts
            .iter()
            .enumerate()
            .map(|(i, &k)| self.sheets[i].simplices[k].payoff)
            .sum();
        (join.label, weight)
    }
}

pub fn build_covering(complex: &GameComplex) -> CoveringComplex {
    let table = DeviationTable::new(complex);
    let n = complex.num_players();
    let mut sheets = Vec::with_capacity(n);
    let mut projection = BTreeMap::new();
    for i in 0..n {
        let z = compute_z(complex, &table, i);
        let cover_sets: BTreeMap<usize, Vec<usize>> = z
            .iter()
            .map(|&s| (s, compute_a(complex, &table, i, &z, s).expect("s in Z_i")))
            .collect();
        let mut simplices = Vec::new();
        for f in complex.facets() {
            let mut base = f.choice.clone();
            base.remove(i);
            let b = table.base_index(i, &base);
            let covers: Vec<usize> = cover_sets
                .iter()
                .filter(|(_, a)| a.binary_search(&b).is_ok())
                .map(|(s, _)| *s)
                .collect();
            if covers.is_empty() {
                continue;
            }
            let vertices = f
                .vertices
                .iter()
                .map(|&v| CoverVertex {
                    sheet: i,
                    vertex: v,
                })
                .collect();
            simplices.push(SheetSimplex {
                label: f.label,
                vertices,
                payoff: f.payoffs[i],
                covers,
            });
        }
        for v in 0..complex.vertices().len() {
            projection.insert(
                CoverVertex {
                    sheet: i,
                    vertex: v,
                },
                v,
            );
        }
        sheets.push(Sheet {
            player: i,
            z,
            cover_sets,
            simplices,
        });
    }
    let mut joins = Vec::new();
    for f in complex.facets() {
        let parts: Option<Vec<usize>> = sheets
            .iter()
            .map(|s| s.simplices.iter().position(|x| x.label == f.label))
            .collect();
        if let Some(parts) = parts {
            joins.push(Join {
                label: f.label,
                parts,
            });
        }
    }
    CoveringComplex {
        sheets,
        joins,
        projection,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

impl Condition {
    fn new() -> Self {
        Condition {
            passed: true,
            checked: 0,
            witness: None,
        }
    }

    fn fail(&mut self, witness: String) {
        if self.passed {
            self.passed = false;
            self.witness = Some(witness);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    /// The sheets form a simplicial complex.
    pub simplicial_complex: Condition,
    /// `p` maps simplices to simplices.
    pub simplicial_map: Condition,
    /// Preimages are disjoint and each maps bijectively.
    pub disjoint_bijective: Condition,
    /// Every facet is covered by each sheet's cover sets.
    pub covers_all_facets: Condition,
    /// Joins project to their facet with weight `f(X)`.
    pub join_weights: Condition,
}

impl CoveringReport {
    pub fn passed(&self) -> bool {
        self.simplicial_complex.passed
            && self.simplicial_map.passed
            && self.disjoint_bijective.passed
            && self.covers_all_facets.passed
            && self.join_weights.passed
    }
}

fn nonempty_subsets(vertices: &[CoverVertex]) -> impl Iterator<Item = Vec<CoverVertex>> + '_ {
    (1u64..(1u64 << vertices.len())).map(move |mask| {
        let mut s: Vec<CoverVertex> = (0..vertices.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| vertices[b])
            .collect();
        s.sort_unstable();
        s
    })
}

pub fn verify_covering(covering: &CoveringComplex, complex: &GameComplex) -> CoveringReport {
    let mut complex_ok = Condition::new();
    let mut map_ok = Condition::new();
    let mut disjoint_ok = Condition::new();
    let mut cover_ok = Condition::new();
    let mut join_ok = Condition::new();

    // (a) distinct vertices, all in the vertex set, tagged with their sheet
    let mut cells: BTreeSet<Vec<CoverVertex>> = BTreeSet::new();
    for sheet in &covering.sheets {
        for s in &sheet.simplices {
            complex_ok.checked += 1;
            let distinct: BTreeSet<_> = s.vertices.iter().collect();
            if distinct.len() != s.vertices.len() {
                complex_ok.fail(format!(
                    "sheet {} simplex {} repeats a vertex",
                    sheet.player, s.label
                ));
            }
            if let Some(v) = s
                .vertices
                .iter()
                .find(|v| !covering.projection.contains_key(v))
            {
                complex_ok.fail(format!(
                    "vertex {v:?} of sheet {} simplex {} is unknown",
                    sheet.player, s.label
                ));
            }
            cells.extend(nonempty_subsets(&s.vertices));
        }
    }

    // (b) and (c) over every face of every sheet simplex
    let mut preimages: BTreeMap<Vec<VertexId>, Vec<&Vec<CoverVertex>>> = BTreeMap::new();
    for cell in &cells {
        map_ok.checked += 1;
        let image: Vec<VertexId> = cell
            .iter()
            .filter_map(|v| covering.projection.get(v).copied())
            .collect();
        let mut set = image.clone();
        set.sort_unstable();
        set.dedup();
        if set.len() != cell.len() || image.len() != cell.len() {
            disjoint_ok.fail(format!(
                "{cell:?} is not mapped bijectively (image {image:?})"
            ));
        }
        if complex.find(&set).is_none() {
            map_ok.fail(format!(
                "{cell:?} projects to {set:?}, which is not a simplex"
            ));
            continue;
        }
        preimages.entry(set).or_default().push(cell);
    }
    for (simplex, cells) in &preimages {
        disjoint_ok.checked += 1;
        for a in 0..cells.len() {
            for b in a + 1..cells.len() {
                if let Some(shared) = cells[a].iter().find(|v| cells[b].contains(v)) {
                    disjoint_ok.fail(format!(
                        "preimages {:?} and {:?} of {simplex:?} share {shared:?}",
                        cells[a], cells[b]
                    ));
                }
            }
        }
    }

    // cover condition: every facet lies in each sheet
    for sheet in &covering.sheets {
        let present: BTreeSet<Label> = sheet.simplices.iter().map(|s| s.label).collect();
        for f in complex.facets() {
            cover_ok.checked += 1;
            if !present.contains(&f.label) {
                cover_ok.fail(format!(
                    "facet {} is not covered in sheet {}",
                    f.label, sheet.player
                ));
            }
        }
    }

    for join in &covering.joins {
        join_ok.checked += 1;
        let (label, weight) = covering.project_join(join);
        let facet = complex.facet(label);
        if (weight - facet.weight).abs() > complex.tolerance() * (1.0 + facet.weight.abs()) {
            join_ok.fail(format!(
                "join over {label} weighs {weight}, facet weighs {}",
                facet.weight
            ));
        }
    }
    if !covering.sheets.is_empty() && covering.joins.len() != complex.facets().len() {
        join_ok.fail(format!(
            "{} joins for {} facets",
            covering.joins.len(),
            complex.facets().len()
        ));
    }

    CoveringReport {
        simplicial_complex: complex_ok,
        simplicial_map: map_ok,
        disjoint_bijective: disjoint_ok,
        covers_all_facets: cover_ok,
        join_weights: join_ok,
    }
}
