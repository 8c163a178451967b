mod common;

use proptest::prelude::*;

use simplicial_games::complex::GameComplex;
use simplicial_games::game::{Game, MixedStrategy};
use simplicial_games::hodge::{decompose, FlowComplex, HodgeConfig};
use simplicial_games::io::{parse_game_str, GameDocument, SourceFormat};
use simplicial_games::nash::nash_simplices;

fn shape() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 2..=3)
}

fn game() -> impl Strategy<Value = Game> {
    shape().prop_flat_map(|counts| {
        let len = counts.len() * counts.iter().product::<usize>();
        prop::collection::vec(-10.0f64..10.0, len)
            .prop_map(move |p| Game::from_shape(&counts, p).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(g in game()) {
        let doc = GameDocument::from_game(&g);
        let back = parse_game_str(&doc.to_json(), SourceFormat::Json).unwrap();
        prop_assert_eq!(back, doc);
    }

    #[test]
    fn nfg_round_trip(g in game()) {
        let doc = GameDocument::from_game(&g);
        let back = parse_game_str(&doc.to_nfg(), SourceFormat::Nfg).unwrap();
        prop_assert_eq!(back.payoffs, doc.payoffs);
        prop_assert_eq!(back.strategies, doc.strategies);
    }

    #[test]
    fn pure_nash_matches_oracle(g in game()) {
        let k = GameComplex::pure(g.clone()).unwrap();
        let found: Vec<Vec<usize>> = nash_simplices(&k).iter().map(|&l| k.facet(l).choice.clone()).collect();
        let corpus = common::CorpusGame {
            seed: 0,
            counts: g.strategy_counts(),
            payoffs: g.payoff_table().to_vec(),
            mixed: g
                .strategy_counts()
                .iter()
                .map(|&l| (0..l).map(|s| MixedStrategy::pure(0, s, l).weights().to_vec()).collect())
                .collect(),
        };
        prop_assert_eq!(found, common::nash_oracle(&corpus, 1e-9));
    }

    #[test]
    fn decomposition_of_arbitrary_flows(
        n in 3usize..9,
        mask in prop::collection::vec(any::<bool>(), 36),
        values in prop::collection::vec(-5.0f64..5.0, 36),
    ) {
        let mut edges = Vec::new();
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                if mask[k % 36] {
                    edges.push((a, b));
                }
                k += 1;
            }
        }
        let has = |a: usize, b: usize| edges.contains(&(a, b));
        let mut triangles = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if has(a, b) && has(a, c) && has(b, c) && (a + b + c) % 2 == 0 {
                        triangles.push([a, b, c]);
                    }
                }
            }
        }
        let flow = FlowComplex::new(n, &edges, &triangles).unwrap();
        let w: Vec<f64> = values[..edges.len()].to_vec();
        let dec = decompose(&flow, &w, &HodgeConfig::default()).unwrap();
        let d = dec.dimensions;
        prop_assert_eq!(d.gradient + d.harmonic + d.curl, edges.len());
        prop_assert!(dec.residuals.max() < 1e-10);
        for (c, &(a, b)) in flow.edges().iter().enumerate() {
            prop_assert!((dec.potential[b] - dec.potential[a] - dec.gradient[c]).abs() < 1e-12);
        }
    }
}
