//! Comparable stars, dual flows and the local and global nerves.
//!
//! A comparable star fixes every player's candidate except player `i`'s and
//! collects the `m_i` facets obtained by varying it. Each pair of facets in a
//! star is joined by a dual flow directed toward the larger `e_i`; the local
//! nerve is the complete flow digraph on a star, and the global nerve glues
//! all local nerves along equal facet labels.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{mixed_radix, GameComplex, Label, SituationFacet};
use crate::error::{Error, Result};
use crate::game::Player;

/// Identifies the star `st(X_{-i})`: the player whose strategy varies and
/// the candidate indices of everyone else, in player order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StarId {
    pub player: Player,
    pub base: Vec<usize>,
}

impl StarId {
    /// Candidate choice of the star's facet where player `i` picks `k`.
    pub fn choice(&self, k: usize) -> Vec<usize> {
        let mut c = self.base.clone();
        c.insert(self.player, k);
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparableStar {
    pub id: StarId,
    pub facets: Vec<Label>,
    /// `e_i` of each facet, aligned with `facets`.
    pub payoffs: Vec<f64>,
}

impl ComparableStar {
    fn payoff_of(&self, label: Label) -> Option<f64> {
        self.facets
            .iter()
            .position(|&f| f == label)
            .map(|k| self.payoffs[k])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualFlowEdge {
    pub source: Label,
    pub target: Label,
    /// `|e_i(target) - e_i(source)|`
    pub weight: f64,
    /// Set when the two payoffs agree within tolerance. A tie edge enters
    /// both endpoints.
    pub tie: bool,
    pub star: StarId,
}

impl DualFlowEdge {
    pub fn enters(&self, label: Label) -> bool {
        self.target == label || (self.tie && self.source == label)
    }

    pub fn touches(&self, label: Label) -> bool {
        self.source == label || self.target == label
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPoint {
    pub label: Label,
    /// `e_i` in a local nerve, the facet weight `f` in the global nerve.
    pub weight: f64,
    pub facet: Option<SituationFacet>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NerveKind {
    Local(StarId),
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nerve {
    pub kind: NerveKind,
    pub vertices: BTreeMap<Label, DualPoint>,
    pub edges: Vec<DualFlowEdge>,
    /// Indices into `edges` of the marked maximum-weight spanning forest.
    pub tree: Vec<usize>,
}

/// Number of comparable stars, `sum_i prod_{k != i} m_k`.
pub fn star_count(complex: &GameComplex) -> usize {
    let m = complex.mixed_counts();
    (0..m.len())
        .map(|i| {
            m.iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, c)| c)
                .product::<usize>()
        })
        .sum()
}

pub fn comparable_star(
    complex: &GameComplex,
    player: Player,
    base: &[usize],
) -> Result<ComparableStar> {
    let m = complex.mixed_counts();
    if player >= m.len() {
        return Err(Error::invalid(format!("player {player} out of range")));
    }
    if base.len() + 1 != m.len() {
        return Err(Error::invalid(format!(
            "base has {} entries, expected {}",
            base.len(),
            m.len() - 1
        )));
    }
    let others = m.iter().enumerate().filter(|(k, _)| *k != player);
    for ((k, &count), &b) in others.zip(base) {
        if b >= count {
            return Err(Error::invalid(format!(
                "candidate {b} of player {k} is not in the complex"
            )));
        }
    }
    let id = StarId {
        player,
        base: base.to_vec(),
    };
    let facets: Vec<Label> = (0..m[player])
        .map(|k| complex.label_of(&id.choice(k)))
        .collect();
    let payoffs = facets
        .iter()
        .map(|&f| complex.facet(f).payoffs[player])
        .collect();
    Ok(ComparableStar {
        id,
        facets,
        payoffs,
    })
}

/// All stars, ordered by player and then by the mixed-radix index of the base.
pub fn comparable_stars(complex: &GameComplex) -> Vec<ComparableStar> {
    let m = complex.mixed_counts();
    let mut out = Vec::with_capacity(star_count(complex));
    for i in 0..m.len() {
        let radices: Vec<usize> = m
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, c)| *c)
            .collect();
        let total: usize = radices.iter().product();
        for b in 0..total {
            out.push(
                comparable_star(complex, i, &mixed_radix(b, &radices)).expect("base in range"),
            );
        }
    }
    out
}

/// Dual flow between two facets of a star; `None` when either facet lies
/// outside it.
pub fn dual_flow(star: &ComparableStar, a: Label, b: Label, tol: f64) -> Option<DualFlowEdge> {
    if a == b {
        return None;
    }
    let ea = star.payoff_of(a)?;
    let eb = star.payoff_of(b)?;
    let diff = eb - ea;
    let tie = diff.abs() <= tol;
    let (source, target) = if tie {
        (a.min(b), a.max(b))
    } else if diff > 0.0 {
        (a, b)
    } else {
        (b, a)
    };
    Some(DualFlowEdge {
        source,
        target,
        weight: diff.abs(),
        tie,
        star: star.id.clone(),
    })
}

pub fn local_nerve(complex: &GameComplex, star: &ComparableStar) -> Nerve {
    let tol = complex.tolerance();
    let vertices = star
        .facets
        .iter()
        .zip(&star.payoffs)
        .map(|(&label, &e)| {
            (
                label,
                DualPoint {
                    label,
                    weight: e,
                    facet: Some(complex.facet(label).clone()),
                },
            )
        })
        .collect();
    let mut labels = star.facets.clone();
    labels.sort_unstable();
    let mut edges = Vec::new();
    for (x, &a) in labels.iter().enumerate() {
        for &b in &labels[x + 1..] {
            edges.push(dual_flow(star, a, b, tol).expect("both facets in the star"));
        }
    }
    let tree = max_spanning_forest(&edges);
    Nerve {
        kind: NerveKind::Local(star.id.clone()),
        vertices,
        edges,
        tree,
    }
}

/// Kruskal on descending weight, ties broken by endpoint labels.
fn max_spanning_forest(edges: &[DualFlowEdge]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    let key = |e: &DualFlowEdge| (e.source.min(e.target), e.source.max(e.target));
    order.sort_by(|&x, &y| {
        edges[y]
            .weight
            .total_cmp(&edges[x].weight)
            .then_with(|| key(&edges[x]).cmp(&key(&edges[y])))
    });
    let mut parent: BTreeMap<Label, Label> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<Label, Label>, x: Label) -> Label {
        let p = *parent.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let r = find(parent, p);
        parent.insert(x, r);
        r
    }
    let mut tree = Vec::new();
    for k in order {
        let (a, b) = (
            find(&mut parent, edges[k].source),
            find(&mut parent, edges[k].target),
        );
        if a != b {
            parent.insert(a.max(b), a.min(b));
            tree.push(k);
        }
    }
    tree.sort_unstable();
    tree
}

/// Local nerves of every star, in star order. Stars are independent, so
/// they are built in parallel.
pub fn local_nerves(complex: &GameComplex) -> Vec<Nerve> {
    comparable_stars(complex)
        .par_iter()
        .map(|s| local_nerve(complex, s))
        .collect()
}

/// Glues local nerves along equal facet labels.
pub fn global_nerve(locals: &[Nerve]) -> Result<Nerve> {
    let mut vertices: BTreeMap<Label, DualPoint> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut tree = Vec::new();
    for nerve in locals {
        for (label, point) in &nerve.vertices {
            let glued = DualPoint {
                label: *label,
                weight: point.facet.as_ref().map_or(f64::NAN, |f| f.weight),
                facet: point.facet.clone(),
            };
            match vertices.get(label) {
                Some(existing) if existing.facet != glued.facet => {
                    return Err(Error::Invariant(format!(
                        "label {label} is shared by two different facets"
                    )));
                }
                Some(_) => {}
                None => {
                    vertices.insert(*label, glued);
                }
            }
        }
        let offset = edges.len();
        edges.extend(nerve.edges.iter().cloned());
        tree.extend(nerve.tree.iter().map(|k| k + offset));
    }
    Ok(Nerve {
        kind: NerveKind::Global,
        vertices,
        edges,
        tree,
    })
}

impl Nerve {
    /// Undirected neighbours of a vertex, ascending.
    pub fn neighbours(&self, label: Label) -> Vec<Label> {
        let set: BTreeSet<Label> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.source == label {
                    Some(e.target)
                } else if e.target == label {
                    Some(e.source)
                } else {
                    None
                }
            })
            .collect();
        set.into_iter().collect()
    }

    pub fn adjacent(&self, a: Label, b: Label) -> bool {
        self.edges
            .iter()
            .any(|e| (e.source == a && e.target == b) || (e.source == b && e.target == a))
    }
}

/// Facets recovered from a global nerve, with the order they were visited in.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub order: Vec<Label>,
    pub facets: BTreeMap<Label, SituationFacet>,
}

/// Breadth-first walk over the global nerve starting from the lowest label,
/// restarting at the lowest unvisited label for each further component.
pub fn reconstruct_complex(nerve: &Nerve) -> Result<Reconstruction> {
    let starts: Vec<Label> = nerve.vertices.keys().copied().collect();
    reconstruct_from(nerve, &starts)
}

/// Same walk with an explicit order of start vertices; the recovered facet
/// set does not depend on it.
pub fn reconstruct_from(nerve: &Nerve, starts: &[Label]) -> Result<Reconstruction> {
    let mut adjacency: BTreeMap<Label, BTreeSet<Label>> = nerve
        .vertices
        .keys()
        .map(|&l| (l, BTreeSet::new()))
        .collect();
    for e in &nerve.edges {
        adjacency.entry(e.source).or_default().insert(e.target);
        adjacency.entry(e.target).or_default().insert(e.source);
    }
    let mut order = Vec::new();
    let mut facets = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &start in starts.iter().chain(nerve.vertices.keys()) {
        if facets.contains_key(&start) {
            continue;
        }
        queue.push_back(start);
        let mut queued = BTreeSet::from([start]);
        while let Some(label) = queue.pop_front() {
            let point = nerve.vertices.get(&label).ok_or_else(|| {
                Error::Invariant(format!("edge endpoint {label} is not a vertex"))
            })?;
            let facet = point
                .facet
                .clone()
                .ok_or_else(|| Error::Invariant(format!("vertex {label} carries no facet")))?;
            facets.insert(label, facet);
            order.push(label);
            for &next in &adjacency[&label] {
                if !facets.contains_key(&next) && queued.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(Reconstruction { order, facets })
}

/// Graph name used in DOT output and for per-nerve file names.
pub fn dot_name(kind: &NerveKind) -> String {
    match kind {
        NerveKind::Global => "global".to_string(),
        NerveKind::Local(id) => {
            let base: Vec<String> = id.base.iter().map(usize::to_string).collect();
            format!("local_p{}_b{}", id.player, base.join("_"))
        }
    }
}

/// Graphviz description of a nerve. Vertices are listed by label, edges in
/// stored order; tie edges are dashed and spanning-tree edges bold.
pub fn export_nerve_dot(nerve: &Nerve) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", dot_name(&nerve.kind)).unwrap();
    for (label, p) in &nerve.vertices {
        writeln!(out, "  n{label} [label=\"{label}\\n{}\"];", p.weight).unwrap();
    }
    let tree: BTreeSet<usize> = nerve.tree.iter().copied().collect();
    for (k, e) in nerve.edges.iter().enumerate() {
        let mut attrs = vec![
            format!("label=\"{}\"", e.weight),
            format!("player={}", e.star.player),
        ];
        if e.tie {
            attrs.push("style=dashed".into());
            attrs.push("dir=none".into());
        }
        if tree.contains(&k) {
            attrs.push("penwidth=2".into());
        }
        writeln!(
            out,
            "  n{} -> n{} [{}];",
            e.source,
            e.target,
            attrs.join(", ")
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::game::MixedStrategy;

    fn rps() -> GameComplex {
        let mixed = (0..2)
            .map(|i| {
                vec![
                    MixedStrategy::pure(i, 0, 3),
                    MixedStrategy::pure(i, 1, 3),
                    MixedStrategy::new(i, vec![0.2, 0.3, 0.5]).unwrap(),
                ]
            })
            .collect();
        GameComplex::build(catalog::rock_paper_scissors(), mixed).unwrap()
    }

    #[test]
    fn rps_star_and_counts() {
        let k = rps();
        let star = comparable_star(&k, 0, &[0]).unwrap();
        assert_eq!(star.facets, vec![0, 3, 6]);
        assert_eq!(star_count(&k), 6);
        assert_eq!(comparable_stars(&k).len(), 6);
        assert!(comparable_star(&k, 0, &[3]).is_err());
        assert!(comparable_star(&k, 2, &[0]).is_err());
    }

    #[test]
    fn flow_direction_and_ties() {
        let star = ComparableStar {
            id: StarId {
                player: 0,
                base: vec![0],
            },
            facets: vec![0, 1, 2],
            payoffs: vec![2.0, 5.0, 2.0],
        };
        let e = dual_flow(&star, 0, 1, 1e-9).unwrap();
        assert_eq!((e.source, e.target, e.weight, e.tie), (0, 1, 3.0, false));
        let e = dual_flow(&star, 1, 0, 1e-9).unwrap();
        assert_eq!((e.source, e.target), (0, 1));
        let t = dual_flow(&star, 2, 0, 1e-9).unwrap();
        assert!(t.tie && t.weight == 0.0 && t.enters(0) && t.enters(2));
        assert!(dual_flow(&star, 0, 7, 1e-9).is_none());
    }

    #[test]
    fn local_nerve_shapes() {
        let k = rps();
        let star = comparable_star(&k, 0, &[0]).unwrap();
        let nl = local_nerve(&k, &star);
        assert_eq!(nl.vertices.len(), 3);
        assert_eq!(nl.edges.len(), 3);
        assert_eq!(nl.tree.len(), 2);

        let single = GameComplex::build(
            catalog::prisoners_dilemma(),
            vec![
                vec![MixedStrategy::uniform(0, 2)],
                vec![MixedStrategy::pure(1, 0, 2)],
            ],
        )
        .unwrap();
        let nl = local_nerve(&single, &comparable_star(&single, 0, &[0]).unwrap());
        assert_eq!(
            (nl.vertices.len(), nl.edges.len(), nl.tree.len()),
            (1, 0, 0)
        );
    }

    #[test]
    fn all_tied_star_uses_label_order() {
        let k = GameComplex::pure(catalog::constant(&[3, 1], 1.0)).unwrap();
        let nl = local_nerve(&k, &comparable_star(&k, 0, &[0]).unwrap());
        assert!(nl.edges.iter().all(|e| e.tie));
        let picked: Vec<(Label, Label)> = nl
            .tree
            .iter()
            .map(|&t| (nl.edges[t].source, nl.edges[t].target))
            .collect();
        assert_eq!(picked, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn global_nerve_of_rps() {
        let k = rps();
        let g = global_nerve(&local_nerves(&k)).unwrap();
        assert_eq!(g.vertices.len(), 9);
        assert_eq!(g.edges.len(), 18);
        for f in k.facets() {
            let mut players: Vec<Player> = g
                .edges
                .iter()
                .filter(|e| e.touches(f.label))
                .map(|e| e.star.player)
                .collect();
            players.sort_unstable();
            assert_eq!(players, vec![0, 0, 1, 1]);
        }
    }

    #[test]
    fn label_collision_is_rejected() {
        let k = rps();
        let mut locals = local_nerves(&k);
        let other = locals[1].vertices[&1].facet.clone().unwrap();
        locals[0].vertices.get_mut(&0).unwrap().facet = Some(SituationFacet { label: 0, ..other });
        assert!(global_nerve(&locals).is_err());
    }

    #[test]
    fn reconstruction_round_trip() {
        let k = rps();
        let g = global_nerve(&local_nerves(&k)).unwrap();
        let r = reconstruct_complex(&g).unwrap();
        assert_eq!(r.order[0], 0);
        let expected: BTreeMap<Label, SituationFacet> =
            k.facets().iter().map(|f| (f.label, f.clone())).collect();
        assert_eq!(r.facets, expected);
        let other = reconstruct_from(&g, &[8]).unwrap();
        assert_eq!(other.order[0], 8);
        assert_eq!(other.facets, r.facets);

        let mut broken = g.clone();
        broken.vertices.get_mut(&4).unwrap().facet = None;
        assert!(reconstruct_complex(&broken).is_err());
    }

    #[test]
    fn single_vertex_nerve() {
        let k = GameComplex::build(
            catalog::prisoners_dilemma(),
            vec![
                vec![MixedStrategy::uniform(0, 2)],
                vec![MixedStrategy::uniform(1, 2)],
            ],
        )
        .unwrap();
        let g = global_nerve(&local_nerves(&k)).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(reconstruct_complex(&g).unwrap().facets.len(), 1);
    }

    #[test]
    fn dot_export() {
        let empty = Nerve {
            kind: NerveKind::Global,
            vertices: BTreeMap::new(),
            edges: vec![],
            tree: vec![],
        };
        assert_eq!(export_nerve_dot(&empty), "digraph \"global\" {\n}\n");
        let k = rps();
        let g = global_nerve(&local_nerves(&k)).unwrap();
        let dot = export_nerve_dot(&g);
        assert_eq!(dot.matches(" -> ").count(), 18);
        assert_eq!(
            dot.lines()
                .filter(|l| l.contains("[label=\"") && !l.contains("->"))
                .count(),
            9
        );
        assert_eq!(
            dot,
            export_nerve_dot(&global_nerve(&local_nerves(&k)).unwrap())
        );
    }
}
