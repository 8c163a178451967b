//! Nash simplices via the deviation-degree criterion, checked against a
//! brute-force payoff oracle.

use simplicial_games::catalog;
use simplicial_games::complex::GameComplex;
use simplicial_games::game::{Game, MixedStrategy};
use simplicial_games::nash::{oracle_labels, NashAnalysis};

fn with_uniform(game: Game) -> simplicial_games::Result<GameComplex> {
    let mixed = (0..game.num_players())
        .map(|i| {
            let l = game.num_strategies(i);
            let mut set: Vec<_> = (0..l).map(|s| MixedStrategy::pure(i, s, l)).collect();
            set.push(MixedStrategy::uniform(i, l));
            set
        })
        .collect();
    GameComplex::build(game, mixed)
}

fn main() -> simplicial_games::Result<()> {
    for (name, game) in [
        ("prisoner's dilemma", catalog::prisoners_dilemma()),
        ("coordination", catalog::coordination()),
        ("matching pennies", catalog::matching_pennies()),
        ("rock-paper-scissors", catalog::rock_paper_scissors()),
    ] {
        let complex = with_uniform(game)?;
        let analysis = NashAnalysis::new(&complex);
        let found = analysis.nash_simplices();
        let choices: Vec<_> = found
            .iter()
            .map(|&l| complex.facet(l).choice.clone())
            .collect();
        println!("{name}: equilibria at candidate choices {choices:?}");
        assert_eq!(found, oracle_labels(&complex)?);
    }
    Ok(())
}
