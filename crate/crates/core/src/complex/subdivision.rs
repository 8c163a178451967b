use std::collections::BTreeSet;

use super::{GameComplex, SimplexId};

/// Barycentric subdivision: one vertex per simplex of `K_G` and one
/// `k`-cell per strictly increasing flag of `k + 1` simplices.
#[derive(Debug, Clone)]
pub struct Subdivision {
    /// `cells[k]` lists the flags `[sigma_0 < ... < sigma_k]`.
    pub cells: Vec<Vec<Vec<SimplexId>>>,
}

impl Subdivision {
    pub(crate) fn of(complex: &GameComplex) -> Self {
        let n = complex.num_players();
        let supersets: Vec<Vec<SimplexId>> = complex
            .simplices()
            .iter()
            .map(|s| {
                let mut seen = BTreeSet::new();
                let mut frontier = vec![s.id];
                while let Some(x) = frontier.pop() {
                    for &up in complex.cofaces(x) {
                        if seen.insert(up) {
                            frontier.push(up);
                        }
                    }
                }
                seen.into_iter().collect()
            })
            .collect();

        let mut cells = vec![Vec::new(); n];
        for s in complex.simplices() {
            let mut stack = vec![vec![s.id]];
            while let Some(flag) = stack.pop() {
                let last = *flag.last().unwrap();
                for &up in &supersets[last] {
                    let mut next = flag.clone();
                    next.push(up);
                    stack.push(next);
                }
                cells[flag.len() - 1].push(flag);
            }
        }
        for c in &mut cells {
            c.sort();
        }
        Subdivision { cells }
    }

    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use crate::catalog;
    use crate::complex::GameComplex;
    use crate::game::{Game, MixedStrategy};

    #[test]
    fn single_edge() {
        let g = Game::from_shape(&[1, 1], vec![0.0, 0.0]).unwrap();
        let k = GameComplex::pure(g).unwrap();
        let sd = k.barycentric_subdivision();
        assert_eq!(sd.counts(), vec![3, 2]);
    }

    #[test]
    fn rps_subdivision() {
        let g = catalog::rock_paper_scissors();
        let mixed = (0..2)
            .map(|i| (0..3).map(|s| MixedStrategy::pure(i, s, 3)).collect())
            .collect();
        let k = GameComplex::build(g, mixed).unwrap();
        let sd = k.barycentric_subdivision();
        assert_eq!(sd.counts(), vec![15, 18]);
        assert_eq!(sd.euler_characteristic(), k.euler_characteristic());
    }

    #[test]
    fn triangle_flags() {
        // a single triangle has 7 faces, 12 two-flags and 6 full flags
        let g = Game::from_shape(&[1, 1, 1], vec![0.0; 3]).unwrap();
        let sd = GameComplex::pure(g).unwrap().barycentric_subdivision();
        assert_eq!(sd.counts(), vec![7, 12, 6]);
        assert_eq!(sd.euler_characteristic(), 1);
    }
}
