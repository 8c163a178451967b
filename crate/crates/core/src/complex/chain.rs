//! Oriented simplices and real chains over abstract vertex ids.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::VertexId;

/// Sorts `vertices` and returns the sign of the sorting permutation, or
/// `None` when a vertex repeats.
pub fn orientation_sign(vertices: &[VertexId]) -> Option<(Vec<VertexId>, f64)> {
    let mut inversions = 0usize;
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            match vertices[a].cmp(&vertices[b]) {
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    Some((
        sorted,
        if inversions.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        },
    ))
}

/// A finitely supported formal sum of oriented simplices of one dimension.
///
/// Simplices are stored in ascending vertex order; a term written in another
/// order is folded in with the parity of the reordering. `dim == None` is the
/// (-1)-dimensional chain produced by taking the boundary of a 0-chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    dim: Option<usize>,
    terms: BTreeMap<Vec<VertexId>, f64>,
}

impl Chain {
    pub fn zero(dim: usize) -> Self {
        Chain {
            dim: Some(dim),
            terms: BTreeMap::new(),
        }
    }

    pub fn simplex(vertices: &[VertexId]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::invalid("a simplex needs at least one vertex"));
        }
        let mut c = Chain::zero(vertices.len() - 1);
        c.add(vertices, 1.0)?;
        Ok(c)
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn add(&mut self, vertices: &[VertexId], coeff: f64) -> Result<()> {
        if self.dim != Some(vertices.len().wrapping_sub(1)) {
            return Err(Error::invalid(format!(
                "cannot add a {}-vertex simplex to a chain of dimension {:?}",
                vertices.len(),
                self.dim
            )));
        }
        let (key, sign) = orientation_sign(vertices)
            .ok_or_else(|| Error::invalid("simplex has a repeated vertex"))?;
        let value = self.terms.get(&key).copied().unwrap_or(0.0) + sign * coeff;
        if value == 0.0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, value);
        }
        Ok(())
    }

    /// Coefficient of the simplex with the given orientation.
    pub fn coefficient(&self, vertices: &[VertexId]) -> f64 {
        match orientation_sign(vertices) {
            Some((key, sign)) => sign * self.terms.get(&key).copied().unwrap_or(0.0),
            None => 0.0,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[VertexId], f64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, a: f64) -> Chain {
        let mut out = Chain {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (k, v) in &self.terms {
            if a * v != 0.0 {
                out.terms.insert(k.clone(), a * v);
            }
        }
        out
    }

    pub fn plus(&self, other: &Chain) -> Result<Chain> {
        if self.dim != other.dim {
            return Err(Error::invalid("chains of different dimension"));
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            let e = out.terms.entry(k.clone()).or_insert(0.0);
            *e += v;
            if *e == 0.0 {
                out.terms.remove(k);
            }
        }
        Ok(out)
    }

    /// Alternating-sum boundary. A 0-chain has the empty (-1)-chain as its
    /// boundary.
    pub fn boundary(&self) -> Chain {
        let dim = match self.dim {
            Some(d) if d >= 1 => d - 1,
            _ => {
                return Chain {
                    dim: None,
                    terms: BTreeMap::new(),
                }
            }
        };
        let mut out = Chain::zero(dim);
        for (simplex, coeff) in &self.terms {
            for drop in 0..simplex.len() {
                let face: Vec<VertexId> = simplex
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != drop)
                    .map(|(_, v)| *v)
                    .collect();
                let sign = if drop % 2 == 0 { 1.0 } else { -1.0 };
                out.add(&face, sign * coeff)
                    .expect("face of a valid simplex");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_boundary() {
        let b = Chain::simplex(&[3, 7]).unwrap().boundary();
        assert_eq!(b.coefficient(&[7]), 1.0);
        assert_eq!(b.coefficient(&[3]), -1.0);
        assert_eq!(b.terms().count(), 2);
    }

    #[test]
    fn triangle_boundary() {
        let b = Chain::simplex(&[0, 1, 2]).unwrap().boundary();
        assert_eq!(b.coefficient(&[1, 2]), 1.0);
        assert_eq!(b.coefficient(&[0, 2]), -1.0);
        assert_eq!(b.coefficient(&[0, 1]), 1.0);
        assert!(b.boundary().is_zero());
    }

    #[test]
    fn vertex_boundary_is_empty_dimension() {
        let b = Chain::simplex(&[4]).unwrap().boundary();
        assert_eq!(b.dim(), None);
        assert!(b.is_zero());
    }

    #[test]
    fn reversed_orientation_negates() {
        let mut c = Chain::zero(1);
        c.add(&[2, 1], 1.5).unwrap();
        assert_eq!(c.coefficient(&[1, 2]), -1.5);
        assert_eq!(c.coefficient(&[2, 1]), 1.5);
        c.add(&[1, 2], 1.5).unwrap();
        assert!(c.is_zero());
        assert!(c.add(&[1, 1], 1.0).is_err());
        assert!(c.add(&[1, 2, 3], 1.0).is_err());
    }

    proptest! {
        #[test]
        fn boundary_of_boundary_vanishes(
            simplices in prop::collection::vec(
                (prop::collection::btree_set(0usize..8, 4), -5i32..5), 1..6)
        ) {
            let mut c = Chain::zero(3);
            for (vs, coeff) in simplices {
                let mut vs: Vec<_> = vs.into_iter().collect();
                vs.reverse();
                c.add(&vs, coeff as f64).unwrap();
            }
            prop_assert!(c.boundary().boundary().is_zero());
        }

        #[test]
        fn boundary_is_linear(a in -3i32..3, b in -3i32..3) {
            let s = Chain::simplex(&[0, 2, 5]).unwrap();
            let t = Chain::simplex(&[1, 2, 4]).unwrap();
            let lhs = s.scaled(a as f64).plus(&t.scaled(b as f64)).unwrap().boundary();
            let rhs = s.boundary().scaled(a as f64).plus(&t.boundary().scaled(b as f64)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
