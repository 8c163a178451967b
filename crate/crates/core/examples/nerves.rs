//! Local and global nerves of rock-paper-scissors, their DOT exports and the
//! reconstruction of every facet from the global nerve.

use simplicial_games::catalog;
use simplicial_games::complex::GameComplex;
use simplicial_games::nerve::{
    export_nerve_dot, global_nerve, local_nerves, reconstruct_complex, star_count,
};

fn main() -> simplicial_games::Result<()> {
    let complex = GameComplex::pure(catalog::rock_paper_scissors())?;
    let locals = local_nerves(&complex);
    println!("{} comparable stars", star_count(&complex));
    for n in &locals {
        println!(
            "{:?}: {} edges, spanning tree {:?}",
            n.kind,
            n.edges.len(),
            n.tree
        );
    }
    let global = global_nerve(&locals)?;
    let recon = reconstruct_complex(&global)?;
    println!("reconstruction visits {:?}", recon.order);
    print!("{}", export_nerve_dot(&global));
    Ok(())
}
