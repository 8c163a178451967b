//! Cell counts of the barycentric subdivision, which keeps the Euler
//! characteristic of the complex it refines.

use simplicial_games::catalog;
use simplicial_games::complex::GameComplex;

fn main() -> simplicial_games::Result<()> {
    for (name, game) in [
        ("prisoner's dilemma", catalog::prisoners_dilemma()),
        ("rock-paper-scissors", catalog::rock_paper_scissors()),
        ("2x2x2 constant", catalog::constant(&[2, 2, 2], 0.0)),
    ] {
        let complex = GameComplex::pure(game)?;
        let sub = complex.barycentric_subdivision();
        println!(
            "{name}: complex {:?} (chi {}), subdivision {:?} (chi {})",
            complex.f_vector(),
            complex.euler_characteristic(),
            sub.counts(),
            sub.euler_characteristic()
        );
    }
    Ok(())
}
