#![allow(dead_code)]

//! Seeded random games and oracles that share no code paths with the
//! library beyond reading the raw payoff table.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simplicial_games::complex::GameComplex;
use simplicial_games::game::{Game, MixedStrategy};

pub struct CorpusGame {
    pub seed: u64,
    pub counts: Vec<usize>,
    pub payoffs: Vec<f64>,
    pub mixed: Vec<Vec<Vec<f64>>>,
}

impl CorpusGame {
    pub fn game(&self) -> Game {
        Game::from_shape(&self.counts, self.payoffs.clone()).unwrap()
    }

    pub fn candidates(&self) -> Vec<Vec<MixedStrategy>> {
        self.mixed
            .iter()
            .enumerate()
            .map(|(i, set)| {
                set.iter()
                    .map(|w| MixedStrategy::new(i, w.clone()).unwrap())
                    .collect()
            })
            .collect()
    }

    pub fn complex(&self) -> GameComplex {
        GameComplex::build(self.game(), self.candidates()).unwrap()
    }

    pub fn with_payoffs(&self, payoffs: Vec<f64>) -> CorpusGame {
        CorpusGame {
            seed: self.seed,
            counts: self.counts.clone(),
            payoffs,
            mixed: self.mixed.clone(),
        }
    }
}

fn random_distribution(rng: &mut ChaCha8Rng, l: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..l).map(|_| rng.random_range(0.0..1.0) + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / sum).collect();
    // make the sum as close to one as floating point allows
    let drift: f64 = 1.0 - w.iter().sum::<f64>();
    w[0] += drift;
    w
}

/// One game: `n` in {2, 3}, `l_i` in 1..=3, `m_i` in 1..=4. A quarter of the
/// games use small integer payoffs so that ties occur.
pub fn random_game(seed: u64) -> CorpusGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=3usize);
    let counts: Vec<usize> = (0..n).map(|_| rng.random_range(1..=3usize)).collect();
    let total = n * counts.iter().product::<usize>();
    let integer = rng.random_range(0..4) == 0;
    let payoffs = (0..total)
        .map(|_| {
            if integer {
                rng.random_range(-3..=3i32) as f64
            } else {
                rng.random_range(-10.0..=10.0)
            }
        })
        .collect();
    let mixed = counts
        .iter()
        .map(|&l| {
            let m = rng.random_range(1..=4usize);
            let mut set: Vec<Vec<f64>> = Vec::new();
            while set.len() < m {
                let w = if rng.random_range(0..3) == 0 {
                    let mut d = vec![0.0; l];
                    d[rng.random_range(0..l)] = 1.0;
                    d
                } else {
                    random_distribution(&mut rng, l)
                };
                if !set.contains(&w) {
                    set.push(w);
                }
                if l == 1 {
                    break;
                }
            }
            set
        })
        .collect();
    CorpusGame {
        seed,
        counts,
        payoffs,
        mixed,
    }
}

pub fn corpus(size: usize) -> Vec<CorpusGame> {
    (0..size as u64)
        .map(|s| random_game(0x5eed_0000 + s))
        .collect()
}

/// All pure profiles, first player slowest.
pub fn profiles(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &l in counts {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..l).map(move |s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    out
}

/// Expected payoff of `player` by summing over every pure profile.
pub fn expected(counts: &[usize], payoffs: &[f64], dists: &[&[f64]], player: usize) -> f64 {
    let n = counts.len();
    profiles(counts)
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let prob: f64 = p.iter().enumerate().map(|(i, &s)| dists[i][s]).product();
            prob * payoffs[k * n + player]
        })
        .sum()
}

/// Brute-force equilibrium test over all candidate combinations; returns the
/// candidate choices that are Nash, in lexicographic order.
pub fn nash_oracle(g: &CorpusGame, tol: f64) -> Vec<Vec<usize>> {
    let m: Vec<usize> = g.mixed.iter().map(Vec::len).collect();
    profiles(&m)
        .into_iter()
        .filter(|choice| {
            let dists: Vec<&[f64]> = choice
                .iter()
                .enumerate()
                .map(|(i, &k)| g.mixed[i][k].as_slice())
                .collect();
            (0..g.counts.len()).all(|i| {
                let current = expected(&g.counts, &g.payoffs, &dists, i);
                (0..g.counts[i]).all(|s| {
                    let mut delta = vec![0.0; g.counts[i]];
                    delta[s] = 1.0;
                    let mut dev = dists.clone();
                    dev[i] = &delta;
                    expected(&g.counts, &g.payoffs, &dev, i) <= current + tol
                })
            })
        })
        .collect()
}

/// Barycenter of a face given as one optional distribution per player.
pub fn barycenter_oracle(counts: &[usize], dists: &[Option<Vec<f64>>]) -> Vec<f64> {
    let n = counts.len();
    let mut acc = vec![0.0; n];
    let mut used = 0usize;
    for p in profiles(counts) {
        let vals: Vec<f64> = (0..n)
            .map(|i| dists[i].as_ref().map_or(0.0, |d| d[p[i]]))
            .collect();
        let denom: f64 = vals.iter().sum();
        if denom > 0.0 {
            used += 1;
            for i in 0..n {
                acc[i] += vals[i] / denom;
            }
        }
    }
    let total: f64 = acc.iter().sum();
    if used == 0 || total == 0.0 {
        return acc;
    }
    acc.iter().map(|a| a / total).collect()
}

/// Orthogonal projection onto the column space through the eigenvectors of
/// the Gram matrix, and the numerical rank.
pub fn dense_projection(a: &DMatrix<f64>, w: &DVector<f64>) -> (DVector<f64>, usize) {
    if a.ncols() == 0 || a.nrows() == 0 {
        return (DVector::zeros(w.len()), 0);
    }
    let eig = (a.transpose() * a).symmetric_eigen();
    let mut p = DVector::zeros(w.len());
    let mut rank = 0;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > 1e-9 {
            rank += 1;
            let u = a * eig.eigenvectors.column(k) / lambda.sqrt();
            p += &u * u.dot(w);
        }
    }
    (p, rank)
}
