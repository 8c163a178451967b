//! Reads a Gambit payoff-list file, converts it to the native JSON document
//! and runs pipeline stages on it.

use simplicial_games::io::{parse_game_str, SourceFormat};
use simplicial_games::pipeline::{run_pipeline, RunConfig, Stage};

const NFG: &str = r#"NFG 1 R "Battle of the sexes" { "Alice" "Bob" }
{ { "Opera" "Football" } { "Opera" "Football" } }
""

3 2 0 0 0 0 2 3
"#;

fn main() -> simplicial_games::Result<()> {
    let doc = parse_game_str(NFG, SourceFormat::Nfg)?;
    let json = doc.to_json();
    print!("{json}");
    assert_eq!(parse_game_str(&json, SourceFormat::Json)?, doc);

    let config = RunConfig::default();
    let nash = run_pipeline(&doc, &config, Stage::Nash)?;
    let report: serde_json::Value = serde_json::from_str(&nash.primary).unwrap();
    for eq in report["equilibria"].as_array().unwrap() {
        println!("equilibrium at {}", eq["choice"]);
    }
    let check = run_pipeline(&doc, &config, Stage::Check)?;
    println!(
        "artifacts: {:?}",
        check.artifacts.iter().map(|a| &a.path).collect::<Vec<_>>()
    );
    Ok(())
}
