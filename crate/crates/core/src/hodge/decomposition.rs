use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::linalg::{
    self, components, conjugate_gradient, grounded_cholesky, matvec, norm, project_onto_columns,
};
use super::{game_flow, FlowComplex};
use crate::complex::GameComplex;
use crate::error::{Error, Result};
use crate::nerve::{global_nerve, local_nerves};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HodgeConfig {
    /// Relative residual the linear solves must reach.
    pub solver_tolerance: f64,
    /// Bound for the post-hoc checks, relative to `max(1, |w|)`.
    pub invariant_tolerance: f64,
    /// Above this many edges the potential is found with conjugate gradients.
    pub iterative_edge_threshold: usize,
    /// Triangle blocks larger than this are projected iteratively instead of by SVD.
    pub dense_block_limit: usize,
}

impl Default for HodgeConfig {
    fn default() -> Self {
        HodgeConfig {
            solver_tolerance: 1e-10,
            invariant_tolerance: 1e-8,
            iterative_edge_threshold: 10_000,
            dense_block_limit: 2_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentNorms {
    pub flow: f64,
    pub gradient: f64,
    pub harmonic: f64,
    pub curl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub reconstruction: f64,
    pub gradient_harmonic: f64,
    pub gradient_curl: f64,
    pub harmonic_curl: f64,
    pub harmonic_laplacian: f64,
    pub potential_solve: f64,
    pub curl_solve: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        [
            self.reconstruction,
            self.gradient_harmonic,
            self.gradient_curl,
            self.harmonic_curl,
            self.harmonic_laplacian,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Dimensions of the three summands of the 1-cochain space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubspaceDimensions {
    pub gradient: usize,
    pub harmonic: usize,
    pub curl: usize,
}

/// Norms under the alternative naming where `P` is the image of the
/// triangle boundary and `N` the image of the vertex coboundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProofLabels {
    pub p: f64,
    pub h: f64,
    pub n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowDecomposition {
    pub flow: Vec<f64>,
    pub gradient: Vec<f64>,
    pub harmonic: Vec<f64>,
    pub curl: Vec<f64>,
    /// Mean zero on every connected component.
    pub potential: Vec<f64>,
    pub norms: ComponentNorms,
    pub residuals: Residuals,
    pub dimensions: SubspaceDimensions,
    pub proof_labels: ProofLabels,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialFit {
    pub potential: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GameClass {
    Potential,
    Harmonic,
    Nonstrategic,
    Mixed,
}

impl std::fmt::Display for GameClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GameClass::Potential => "potential",
            GameClass::Harmonic => "harmonic",
            GameClass::Nonstrategic => "nonstrategic",
            GameClass::Mixed => "mixed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub class: GameClass,
    pub norms: ComponentNorms,
    pub potential_residual: f64,
}

impl Classification {
    pub fn of(flow: &FlowComplex, dec: &FlowDecomposition, config: &HodgeConfig) -> Self {
        let n = dec.norms;
        let bound = config.invariant_tolerance * n.flow.max(1.0);
        let class = if n.flow < 1e-12 {
            GameClass::Nonstrategic
        } else if n.harmonic + n.curl < bound {
            GameClass::Potential
        } else if n.gradient + n.curl < bound
            && norm(&matvec(&flow.laplacian(1), &dec.flow)) < bound
        {
            GameClass::Harmonic
        } else {
            GameClass::Mixed
        };
        Classification {
            class,
            norms: n,
            potential_residual: norm(&linalg::sub(&dec.flow, &dec.gradient)),
        }
    }
}

/// Least-squares potential `argmin |delta_0 phi - w|`, mean zero per component.
pub fn potential_function(
    flow: &FlowComplex,
    w: &[f64],
    config: &HodgeConfig,
) -> Result<PotentialFit> {
    let (potential, _) = solve_potential(flow, w, config)?;
    let g = matvec(&flow.coboundary(0), &potential);
    Ok(PotentialFit {
        residual: norm(&linalg::sub(&g, w)),
        potential,
    })
}

fn solve_potential(flow: &FlowComplex, w: &[f64], config: &HodgeConfig) -> Result<(Vec<f64>, f64)> {
    check_len(flow, w)?;
    let nv = flow.num_vertices();
    let rhs = matvec(&flow.boundary_matrix(1), w);
    let l0 = flow.laplacian(0);
    let comp = components(nv, flow.edges());
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (v, &c) in comp.iter().enumerate() {
        groups.entry(c).or_default().push(v);
    }
    let mut phi = vec![0.0; nv];
    if flow.num_edges() > config.iterative_edge_threshold {
        let (x, res) = conjugate_gradient(
            |v| matvec(&l0, v),
            &rhs,
            config.solver_tolerance * 0.1,
            20 * nv + 100,
        );
        if res > config.solver_tolerance {
            return Err(Error::Numerical {
                message: "conjugate gradients did not converge for the potential".into(),
                residual: res,
            });
        }
        phi = x;
    } else {
        for members in groups.values() {
            let x = grounded_cholesky(&l0, members, &rhs)?;
            for (&v, val) in members.iter().zip(x) {
                phi[v] = val;
            }
        }
    }
    for members in groups.values() {
        let mean = members.iter().map(|&v| phi[v]).sum::<f64>() / members.len() as f64;
        for &v in members {
            phi[v] -= mean;
        }
    }
    let scale = norm(&rhs);
    let residual = if scale == 0.0 {
        0.0
    } else {
        norm(&linalg::sub(&matvec(&l0, &phi), &rhs)) / scale
    };
    if residual > config.solver_tolerance {
        return Err(Error::Numerical {
            message: "potential solve missed the residual bound".into(),
            residual,
        });
    }
    Ok((phi, residual))
}

fn check_len(flow: &FlowComplex, w: &[f64]) -> Result<()> {
    if w.len() != flow.num_edges() {
        return Err(Error::invalid(format!(
            "flow has {} values for {} edges",
            w.len(),
            flow.num_edges()
        )));
    }
    Ok(())
}

/// Groups of triangles connected through shared edges, with the edges they touch.
fn triangle_blocks(flow: &FlowComplex) -> Vec<(Vec<usize>, Vec<usize>)> {
    let tris = flow.triangles();
    let edge_of = |t: &[usize; 3]| {
        [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
            .map(|(a, b)| flow.edge_between(a, b).expect("triangle edge"))
    };
    // union triangles via an auxiliary graph on edges
    let mut links = Vec::new();
    for t in tris {
        let [a, b, c] = edge_of(t);
        links.push((a, b));
        links.push((a, c));
    }
    let comp = components(flow.num_edges(), &links);
    let mut blocks: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> =
        Default::default();
    for (k, t) in tris.iter().enumerate() {
        let edges = edge_of(t);
        let block = blocks.entry(comp[edges[0]]).or_default();
        block.0.push(k);
        block.1.extend(edges);
    }
    blocks
        .into_values()
        .map(|(t, mut e)| {
            e.sort_unstable();
            e.dedup();
            (t, e)
        })
        .collect()
}

/// Projection onto the image of the triangle boundary, block by block, with
/// the total rank.
fn project_curl(
    flow: &FlowComplex,
    w: &[f64],
    config: &HodgeConfig,
) -> Result<(Vec<f64>, usize, f64)> {
    let mut c = vec![0.0; w.len()];
    let mut rank = 0;
    let mut worst = 0.0f64;
    for (tris, edges) in triangle_blocks(flow) {
        let pos: std::collections::BTreeMap<usize, usize> =
            edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let mut a = DMatrix::zeros(edges.len(), tris.len());
        for (col, &t) in tris.iter().enumerate() {
            let [x, y, z] = flow.triangles()[t];
            a[(pos[&flow.edge_between(y, z).unwrap()], col)] = 1.0;
            a[(pos[&flow.edge_between(x, z).unwrap()], col)] = -1.0;
            a[(pos[&flow.edge_between(x, y).unwrap()], col)] = 1.0;
        }
        let local = DVector::from_iterator(edges.len(), edges.iter().map(|&e| w[e]));
        let proj = if tris.len() <= config.dense_block_limit {
            let (p, r) = project_onto_columns(&a, &local);
            rank += r;
            p
        } else {
            let at = a.transpose();
            let rhs = &at * &local;
            let (y, res) = conjugate_gradient(
                |v| {
                    (&at * (&a * DVector::from_column_slice(v)))
                        .as_slice()
                        .to_vec()
                },
                rhs.as_slice(),
                config.solver_tolerance * 0.1,
                20 * tris.len() + 100,
            );
            worst = worst.max(res);
            if res > config.solver_tolerance {
                return Err(Error::Numerical {
                    message: "conjugate gradients did not converge for the curl projection".into(),
                    residual: res,
                });
            }
            rank += project_onto_columns(&a, &DVector::zeros(edges.len())).1;
            &a * DVector::from_vec(y)
        };
        for (k, &e) in edges.iter().enumerate() {
            c[e] = proj[k];
        }
    }
    Ok((c, rank, worst))
}

fn component_count(flow: &FlowComplex) -> usize {
    components(flow.num_vertices(), flow.edges())
        .iter()
        .enumerate()
        .filter(|(v, c)| v == *c)
        .count()
}

/// Orthogonal split `w = g + h + c` with every invariant checked afterwards.
pub fn decompose(flow: &FlowComplex, w: &[f64], config: &HodgeConfig) -> Result<FlowDecomposition> {
    let (potential, potential_solve) = solve_potential(flow, w, config)?;
    let gradient = matvec(&flow.coboundary(0), &potential);
    let (curl, curl_rank, curl_solve) = project_curl(flow, w, config)?;
    let harmonic: Vec<f64> = (0..w.len()).map(|k| w[k] - gradient[k] - curl[k]).collect();

    let wn = norm(w);
    let scale = wn.max(1.0);
    let recon: Vec<f64> = (0..w.len())
        .map(|k| gradient[k] + harmonic[k] + curl[k] - w[k])
        .collect();
    let residuals = Residuals {
        reconstruction: norm(&recon) / scale,
        gradient_harmonic: linalg::dot(&gradient, &harmonic).abs() / (scale * scale),
        gradient_curl: linalg::dot(&gradient, &curl).abs() / (scale * scale),
        harmonic_curl: linalg::dot(&harmonic, &curl).abs() / (scale * scale),
        harmonic_laplacian: norm(&matvec(&flow.laplacian(1), &harmonic)) / scale,
        potential_solve,
        curl_solve,
    };
    if residuals.max() >= config.invariant_tolerance {
        return Err(Error::Numerical {
            message: "decomposition failed its orthogonality checks".into(),
            residual: residuals.max(),
        });
    }
    let gradient_dim = flow.num_vertices() - component_count(flow);
    let dimensions = SubspaceDimensions {
        gradient: gradient_dim,
        curl: curl_rank,
        harmonic: flow.num_edges() - gradient_dim - curl_rank,
    };
    let norms = ComponentNorms {
        flow: wn,
        gradient: norm(&gradient),
        harmonic: norm(&harmonic),
        curl: norm(&curl),
    };
    Ok(FlowDecomposition {
        flow: w.to_vec(),
        gradient,
        harmonic,
        curl,
        potential,
        proof_labels: ProofLabels {
            p: norms.curl,
            h: norms.harmonic,
            n: norms.gradient,
        },
        norms,
        residuals,
        dimensions,
    })
}

/// Builds the flow complex of a game and classifies its flow.
pub fn classify(
    complex: &GameComplex,
    config: &HodgeConfig,
) -> Result<(FlowComplex, FlowDecomposition, Classification)> {
    let nerve = global_nerve(&local_nerves(complex))?;
    let flow = FlowComplex::from_nerve(&nerve)?;
    let w = game_flow(complex, &flow)?;
    let dec = decompose(&flow, &w, config)?;
    let class = Classification::of(&flow, &dec, config);
    Ok((flow, dec, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::game::MixedStrategy;

    fn run(game: crate::game::Game) -> (FlowComplex, FlowDecomposition, Classification) {
        classify(&GameComplex::pure(game).unwrap(), &HodgeConfig::default()).unwrap()
    }

    #[test]
    fn coordination_is_potential() {
        let (flow, dec, class) = run(catalog::coordination());
        assert_eq!(class.class, GameClass::Potential);
        assert!(dec.norms.harmonic < 1e-8 && dec.norms.curl < 1e-8);
        let fit = potential_function(&flow, &dec.flow, &HodgeConfig::default()).unwrap();
        assert!(fit.residual < 1e-8);
        for (k, &(a, b)) in flow.edges().iter().enumerate() {
            assert!((fit.potential[b] - fit.potential[a] - dec.flow[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn prisoners_dilemma_is_potential() {
        assert_eq!(
            run(catalog::prisoners_dilemma()).2.class,
            GameClass::Potential
        );
    }

    #[test]
    fn matching_pennies_is_harmonic() {
        let (flow, dec, class) = run(catalog::matching_pennies());
        assert_eq!(class.class, GameClass::Harmonic);
        assert!(dec.norms.gradient < 1e-8);
        assert_eq!(dec.harmonic, dec.flow);
        let fit = potential_function(&flow, &dec.flow, &HodgeConfig::default()).unwrap();
        assert!((fit.residual - dec.norms.flow).abs() < 1e-10);
        assert_eq!(
            dec.dimensions,
            SubspaceDimensions {
                gradient: 3,
                harmonic: 1,
                curl: 0
            }
        );
    }

    #[test]
    fn constant_is_nonstrategic() {
        let (flow, dec, class) = run(catalog::constant(&[2, 3], 4.0));
        assert_eq!(class.class, GameClass::Nonstrategic);
        assert!(dec.potential.iter().all(|x| *x == 0.0));
        let fit = potential_function(&flow, &dec.flow, &HodgeConfig::default()).unwrap();
        assert_eq!(fit.residual, 0.0);
    }

    #[test]
    fn zero_flow_on_rps_complex() {
        let mixed = (0..2)
            .map(|i| (0..3).map(|s| MixedStrategy::pure(i, s, 3)).collect())
            .collect();
        let k = GameComplex::build(catalog::rock_paper_scissors(), mixed).unwrap();
        let (flow, dec, _) = classify(&k, &HodgeConfig::default()).unwrap();
        assert_eq!(
            dec.dimensions.gradient + dec.dimensions.harmonic + dec.dimensions.curl,
            18
        );
        assert_eq!(dec.dimensions.curl, 6);
        let zero = decompose(&flow, &[0.0; 18], &HodgeConfig::default()).unwrap();
        assert!(zero
            .gradient
            .iter()
            .chain(&zero.harmonic)
            .chain(&zero.curl)
            .all(|x| *x == 0.0));
    }

    #[test]
    fn cycle_with_triangle_has_curl() {
        let flow = FlowComplex::new(3, &[(0, 1), (1, 2), (0, 2)], &[[0, 1, 2]]).unwrap();
        // circulation 0->1->2->0
        let dec = decompose(&flow, &[1.0, 1.0, -1.0], &HodgeConfig::default()).unwrap();
        assert!(dec.norms.gradient < 1e-12 && dec.norms.harmonic < 1e-12);
        assert!((dec.norms.curl - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn iterative_paths_agree_with_direct() {
        let flow = FlowComplex::new(
            5,
            &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4), (1, 3)],
            &[[0, 1, 2], [2, 3, 4]],
        )
        .unwrap();
        let w = [0.3, -1.2, 2.0, 0.7, 0.1, -0.4, 1.5];
        let direct = decompose(&flow, &w, &HodgeConfig::default()).unwrap();
        let iter_cfg = HodgeConfig {
            iterative_edge_threshold: 0,
            dense_block_limit: 0,
            ..HodgeConfig::default()
        };
        let iterative = decompose(&flow, &w, &iter_cfg).unwrap();
        for (a, b) in direct.gradient.iter().zip(&iterative.gradient) {
            assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in direct.curl.iter().zip(&iterative.curl) {
            assert!((a - b).abs() < 1e-8);
        }
        assert_eq!(direct.dimensions, iterative.dimensions);
    }

    #[test]
    fn wrong_length_rejected() {
        let flow = FlowComplex::new(2, &[(0, 1)], &[]).unwrap();
        assert!(decompose(&flow, &[1.0, 2.0], &HodgeConfig::default()).is_err());
    }
}
