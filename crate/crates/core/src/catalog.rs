//! A handful of textbook games used by the examples and tests.

use crate::game::Game;

fn two_player(names: [&str; 2], strategies: &[&str], payoffs: Vec<f64>) -> Game {
    let strategies: Vec<String> = strategies.iter().map(|s| s.to_string()).collect();
    Game::new(
        names.iter().map(|s| s.to_string()).collect(),
        vec![strategies.clone(), strategies],
        payoffs,
    )
    .expect("catalog game is well formed")
}

/// Prisoner's dilemma with T=5, R=3, P=1, S=0. Strategies are `C`, `D`.
pub fn prisoners_dilemma() -> Game {
    two_player(
        ["Row", "Column"],
        &["C", "D"],
        vec![3.0, 3.0, 0.0, 5.0, 5.0, 0.0, 1.0, 1.0],
    )
}

/// Row wins +1 on a match, column wins +1 on a mismatch.
pub fn matching_pennies() -> Game {
    two_player(
        ["Row", "Column"],
        &["H", "T"],
        vec![1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0],
    )
}

/// Coordination game with payoffs (2,2) and (1,1) on the diagonal.
pub fn coordination() -> Game {
    two_player(
        ["Row", "Column"],
        &["A", "B"],
        vec![2.0, 2.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
    )
}

/// Rock-paper-scissors with win = 1, loss = -1, tie = 0.
pub fn rock_paper_scissors() -> Game {
    let beats = |a: usize, b: usize| (a + 3 - b) % 3 == 1;
    let mut payoffs = Vec::with_capacity(18);
    for a in 0..3 {
        for b in 0..3 {
            let u = if a == b {
                0.0
            } else if beats(a, b) {
                1.0
            } else {
                -1.0
            };
            payoffs.extend([u, -u]);
        }
    }
    two_player(["Row", "Column"], &["Rock", "Paper", "Scissors"], payoffs)
}

/// Every player receives `value` at every profile.
pub fn constant(strategy_counts: &[usize], value: f64) -> Game {
    let profiles: usize = strategy_counts.iter().product();
    Game::from_shape(
        strategy_counts,
        vec![value; profiles * strategy_counts.len()],
    )
    .expect("constant game is well formed")
}
