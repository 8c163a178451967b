use serde::Serialize;

use crate::game::Game;

/// Convex weights of a barycentric point over the vertices of its simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Barycenter {
    pub vertices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl Barycenter {
    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.weights.iter().all(|w| (-tol..=1.0 + tol).contains(w))
            && (self.weight_sum() - 1.0).abs() <= tol
    }
}

/// Per-player barycentric weights of a (possibly zero-extended) situation.
///
/// Every pure profile `s` contributes the convex combination with weights
/// `x_j(s_j) / sum_k x_k(s_k)`; the contributions are averaged over the
/// profiles whose denominator is positive. Profiles with a zero denominator
/// can only occur when some players are missing and are skipped.
///
/// `dists[j] == None` is the zero function for player `j`, whose weight is
/// then zero. The result has one entry per player.
pub fn player_weights(game: &Game, dists: &[Option<&[f64]>]) -> Vec<f64> {
    let n = game.num_players();
    let mut acc = vec![0.0; n];
    let mut contributing = 0usize;
    for index in 0..game.num_profiles() {
        let profile = game.profile_at(index);
        let terms: Vec<f64> = dists
            .iter()
            .zip(&profile)
            .map(|(x, &s)| x.map_or(0.0, |x| x[s]))
            .collect();
        let denom: f64 = terms.iter().sum();
        if denom <= 0.0 {
            continue;
        }
        contributing += 1;
        for (a, t) in acc.iter_mut().zip(&terms) {
            *a += t / denom;
        }
    }
    if contributing > 0 {
        for a in &mut acc {
            *a /= contributing as f64;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn uniform_players_get_weights_proportional_to_inverse_counts() {
        let g = Game::from_shape(&[2, 4], vec![0.0; 16]).unwrap();
        let x = [0.5, 0.5];
        let y = [0.25; 4];
        let w = player_weights(&g, &[Some(&x), Some(&y)]);
        // each profile: (1/2, 1/4) / (3/4)
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn equal_counts_give_equal_weights() {
        let g = catalog::rock_paper_scissors();
        let u = [1.0 / 3.0; 3];
        let w = player_weights(&g, &[Some(&u), Some(&u)]);
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_player_gets_everything() {
        let g = Game::from_shape(&[3], vec![1.0, 2.0, 3.0]).unwrap();
        let x = [0.2, 0.3, 0.5];
        assert_eq!(player_weights(&g, &[Some(&x)]), vec![1.0]);
    }

    #[test]
    fn direct_summation_for_deltas() {
        // delta at s_1 for player 0 and (0.25, 0.75) for player 1, over 4 profiles:
        // (0,0): 1/(1+.25) , .25/1.25 ; (0,1): 1/1.75, .75/1.75 ;
        // (1,0): 0, 1 ; (1,1): 0, 1
        let g = Game::from_shape(&[2, 2], vec![0.0; 8]).unwrap();
        let x = [1.0, 0.0];
        let y = [0.25, 0.75];
        let w = player_weights(&g, &[Some(&x), Some(&y)]);
        let expected0 = (0.8 + 1.0 / 1.75) / 4.0;
        assert!((w[0] - expected0).abs() < 1e-15);
        assert!((w[0] + w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_players_are_zero() {
        let g = Game::from_shape(&[2, 2, 2], vec![0.0; 24]).unwrap();
        let u = [0.5, 0.5];
        let w = player_weights(&g, &[Some(&u), None, Some(&u)]);
        assert_eq!(w[1], 0.0);
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
    }
}
