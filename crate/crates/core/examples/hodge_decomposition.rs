//! Splits game flows into gradient, harmonic and curl parts and classifies
//! each game.

use simplicial_games::catalog;
use simplicial_games::complex::GameComplex;
use simplicial_games::game::{Game, MixedStrategy};
use simplicial_games::hodge::{classify, potential_function, HodgeConfig};

fn main() -> simplicial_games::Result<()> {
    let config = HodgeConfig::default();
    let rps_mixed = (0..2)
        .map(|i| {
            vec![
                MixedStrategy::pure(i, 0, 3),
                MixedStrategy::pure(i, 1, 3),
                MixedStrategy::uniform(i, 3),
            ]
        })
        .collect();
    let cases: Vec<(&str, GameComplex)> = vec![
        ("coordination", GameComplex::pure(catalog::coordination())?),
        (
            "prisoner's dilemma",
            GameComplex::pure(catalog::prisoners_dilemma())?,
        ),
        (
            "matching pennies",
            GameComplex::pure(catalog::matching_pennies())?,
        ),
        (
            "rock-paper-scissors",
            GameComplex::pure(catalog::rock_paper_scissors())?,
        ),
        (
            "rock-paper-scissors, mixed candidates",
            GameComplex::build(catalog::rock_paper_scissors(), rps_mixed)?,
        ),
        (
            "constant",
            GameComplex::pure(catalog::constant(&[2, 3], 1.0))?,
        ),
        (
            "perturbed coordination",
            GameComplex::pure(Game::from_shape(
                &[2, 2],
                vec![2.0, 2.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0],
            )?)?,
        ),
    ];
    for (name, complex) in &cases {
        let (flow, dec, class) = classify(complex, &config)?;
        let fit = potential_function(&flow, &dec.flow, &config)?;
        println!(
            "{name}: {} | |w| {:.4} |g| {:.4} |h| {:.4} |c| {:.4} | dims {:?} | potential residual {:.2e}",
            class.class, dec.norms.flow, dec.norms.gradient, dec.norms.harmonic, dec.norms.curl, dec.dimensions, fit.residual
        );
    }
    Ok(())
}
