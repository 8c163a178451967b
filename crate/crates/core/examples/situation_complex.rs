//! Builds the situation complex of rock-paper-scissors over three candidate
//! strategies per player and prints its facets, barycenters and f-vector.

use simplicial_games::catalog;
use simplicial_games::complex::GameComplex;
use simplicial_games::game::MixedStrategy;

fn main() -> simplicial_games::Result<()> {
    let game = catalog::rock_paper_scissors();
    let mixed = (0..2)
        .map(|i| {
            Ok(vec![
                MixedStrategy::pure(i, 0, 3),
                MixedStrategy::new(i, vec![0.5, 0.5, 0.0])?,
                MixedStrategy::uniform(i, 3),
            ])
        })
        .collect::<simplicial_games::Result<Vec<_>>>()?;
    let complex = GameComplex::build(game, mixed)?;

    println!(
        "f-vector {:?}, euler characteristic {}",
        complex.f_vector(),
        complex.euler_characteristic()
    );
    for f in complex.facets() {
        let b = complex.facet_barycenter(f.label);
        println!(
            "facet {} choice {:?} payoffs {:?} weight {:+.3} barycenter {:?}",
            f.label,
            f.choice,
            f.payoffs,
            f.weight,
            b.weights
                .iter()
                .map(|w| format!("{w:.3}"))
                .collect::<Vec<_>>()
        );
    }

    let edge = complex.simplices_of_dim(1)[0];
    let dual = complex.star_dual(edge);
    println!(
        "dual of edge {:?} has {} pieces",
        complex.simplex(edge).vertices,
        dual.pieces.len()
    );
    Ok(())
}
