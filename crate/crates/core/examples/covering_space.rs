//! The covering complex of the prisoner's dilemma and its verification.

use simplicial_games::catalog;
use simplicial_games::complex::GameComplex;
use simplicial_games::covering::{build_covering, verify_covering};

fn main() -> simplicial_games::Result<()> {
    let complex = GameComplex::pure(catalog::prisoners_dilemma())?;
    let covering = build_covering(&complex);
    for sheet in &covering.sheets {
        println!(
            "sheet {}: Z = {:?}, cover sets {:?}",
            sheet.player, sheet.z, sheet.cover_sets
        );
    }
    for join in &covering.joins {
        let (label, weight) = covering.project_join(join);
        println!("join over facet {label} projects with weight {weight}");
    }
    let report = verify_covering(&covering, &complex);
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    assert!(report.passed());
    Ok(())
}
