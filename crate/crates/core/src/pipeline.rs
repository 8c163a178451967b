//! End-to-end runs behind the `sgc` binary. Every stage returns named text
//! artifacts; identical inputs give byte-identical artifacts.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::complex::{GameComplex, Label};
use crate::covering::{build_covering, verify_covering};
use crate::error::{Error, Result};
use crate::hodge::{self, Classification, FlowComplex, HodgeConfig};
use crate::io::GameDocument;
use crate::nash::{facet_profile, oracle_labels, NashAnalysis};
use crate::nerve::{
    self, export_nerve_dot, global_nerve, local_nerves, reconstruct_complex, NerveKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Build,
    Nerve,
    Covering,
    Nash,
    Decompose,
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Dot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Overrides the document's tolerance when set.
    pub tolerance: Option<f64>,
    pub solver_tolerance: f64,
    pub out_dir: Option<PathBuf>,
    pub format: ReportFormat,
    /// Accepted for interface stability; every step is deterministic.
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: None,
            solver_tolerance: 1e-10,
            out_dir: None,
            format: ReportFormat::Json,
            seed: 0,
            threads: None,
        }
    }
}

impl RunConfig {
    /// Reads the thread cap from `SGC_THREADS`.
    pub fn threads_from_env() -> Result<Option<usize>> {
        match std::env::var("SGC_THREADS") {
            Err(_) => Ok(None),
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(Error::invalid(format!(
                    "SGC_THREADS must be a positive integer, got {v:?}"
                ))),
            },
        }
    }

    fn hodge(&self, tolerance: f64) -> HodgeConfig {
        HodgeConfig {
            solver_tolerance: self.solver_tolerance,
            invariant_tolerance: 1e-8_f64.max(tolerance),
            ..HodgeConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// Relative path inside the output directory.
    pub path: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    /// What the binary prints to stdout.
    pub primary: String,
}

impl RunOutput {
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        for a in &self.artifacts {
            let path = dir.join(&a.path);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, &a.contents)?;
        }
        Ok(())
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialise");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct CandidateReport {
    player: usize,
    index: usize,
    vertex: usize,
    weights: Vec<f64>,
}

#[derive(Serialize)]
struct FacetReport {
    label: Label,
    choice: Vec<usize>,
    vertices: Vec<usize>,
    payoffs: Vec<f64>,
    weight: f64,
    barycenter: Vec<f64>,
}

#[derive(Serialize)]
struct ComplexReport<'a> {
    players: &'a [String],
    strategies: Vec<&'a [String]>,
    tolerance: f64,
    dimension: usize,
    f_vector: Vec<usize>,
    euler_characteristic: i64,
    candidates: Vec<CandidateReport>,
    facets: Vec<FacetReport>,
}

fn complex_report(k: &GameComplex) -> String {
    let g = k.game();
    json(&ComplexReport {
        players: g.player_names(),
        strategies: (0..g.num_players()).map(|i| g.strategy_names(i)).collect(),
        tolerance: k.tolerance(),
        dimension: k.dim(),
        f_vector: k.f_vector(),
        euler_characteristic: k.euler_characteristic(),
        candidates: k
            .vertices()
            .iter()
            .enumerate()
            .map(|(id, v)| CandidateReport {
                player: v.player,
                index: v.index,
                vertex: id,
                weights: v.strategy.weights().to_vec(),
            })
            .collect(),
        facets: k
            .facets()
            .iter()
            .map(|f| FacetReport {
                label: f.label,
                choice: f.choice.clone(),
                vertices: f.vertices.clone(),
                payoffs: f.payoffs.clone(),
                weight: f.weight,
                barycenter: k.coordinates(&k.facet_barycenter(f.label)),
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct NerveSummary {
    name: String,
    player: Option<usize>,
    base: Option<Vec<usize>>,
    vertices: Vec<Label>,
    edges: Vec<nerve::DualFlowEdge>,
    tree: Vec<usize>,
}

#[derive(Serialize)]
struct NerveReport {
    star_count: usize,
    local: Vec<NerveSummary>,
    global: NerveSummary,
    reconstruction_order: Vec<Label>,
}

fn summarise(n: &nerve::Nerve) -> NerveSummary {
    let (name, player, base) = match &n.kind {
        NerveKind::Global => ("global".to_string(), None, None),
        NerveKind::Local(id) => (
            nerve::dot_name(&n.kind),
            Some(id.player),
            Some(id.base.clone()),
        ),
    };
    NerveSummary {
        name,
        player,
        base,
        vertices: n.vertices.keys().copied().collect(),
        edges: n.edges.clone(),
        tree: n.tree.clone(),
    }
}

#[derive(Serialize)]
struct EquilibriumReport {
    label: Label,
    choice: Vec<usize>,
    strategies: Vec<Vec<f64>>,
    payoffs: Vec<f64>,
}

#[derive(Serialize)]
struct NashReport {
    equilibria: Vec<EquilibriumReport>,
    oracle_agrees: bool,
    degrees: Vec<crate::nash::DegreeEntry>,
}

#[derive(Serialize)]
struct EdgeReport {
    source: Label,
    target: Label,
    player: Option<usize>,
    flow: f64,
    gradient: f64,
    harmonic: f64,
    curl: f64,
}

#[derive(Serialize)]
struct PotentialEntry {
    label: Label,
    choice: Vec<usize>,
    value: f64,
}

#[derive(Serialize)]
struct DecompositionReport {
    classification: hodge::GameClass,
    norms: hodge::ComponentNorms,
    potential_residual: f64,
    residuals: hodge::Residuals,
    dimensions: hodge::SubspaceDimensions,
    proof_labels: hodge::ProofLabels,
    counts: [usize; 3],
    potential: Vec<PotentialEntry>,
    edges: Vec<EdgeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Runs one stage on a validated document.
pub fn run_pipeline(doc: &GameDocument, config: &RunConfig, stage: Stage) -> Result<RunOutput> {
    doc.validate()?;
    let tolerance = config.tolerance.unwrap_or_else(|| doc.tolerance());
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let k = GameComplex::build_with_tolerance(doc.to_game()?, doc.candidates()?, tolerance)?;
    let run = || stage_output(&k, config, stage, tolerance);
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

fn stage_output(
    k: &GameComplex,
    config: &RunConfig,
    stage: Stage,
    tolerance: f64,
) -> Result<RunOutput> {
    let one = |path: &str, contents: String| RunOutput {
        primary: contents.clone(),
        artifacts: vec![Artifact {
            path: path.into(),
            contents,
        }],
    };
    if config.format == ReportFormat::Dot && stage != Stage::Nerve {
        return Err(Error::invalid(
            "DOT output is only available for the nerve subcommand",
        ));
    }
    match stage {
        Stage::Build => Ok(one("complex.json", complex_report(k))),
        Stage::Nerve => nerve_output(k, config),
        Stage::Covering => {
            #[derive(Serialize)]
            struct Out {
                covering: crate::covering::CoveringComplex,
                verification: crate::covering::CoveringReport,
                passed: bool,
            }
            let covering = build_covering(k);
            let verification = verify_covering(&covering, k);
            let passed = verification.passed();
            let out = one(
                "covering.json",
                json(&Out {
                    covering,
                    verification,
                    passed,
                }),
            );
            if !passed {
                return Err(Error::Invariant("covering verification failed".into()));
            }
            Ok(out)
        }
        Stage::Nash => Ok(one("nash.json", nash_report(k)?)),
        Stage::Decompose => decompose_output(k, config, tolerance),
        Stage::Check => {
            let report = check_report(k, config, tolerance);
            let out = one("check.json", json(&report));
            if !report.passed {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                eprint!("{}", out.primary);
                return Err(Error::Invariant(format!(
                    "failed checks: {}",
                    failed.join(", ")
                )));
            }
            Ok(out)
        }
    }
}

fn nerve_output(k: &GameComplex, config: &RunConfig) -> Result<RunOutput> {
    let locals = local_nerves(k);
    let global = global_nerve(&locals)?;
    let recon = reconstruct_complex(&global)?;
    let report = NerveReport {
        star_count: nerve::star_count(k),
        local: locals.iter().map(summarise).collect(),
        global: summarise(&global),
        reconstruction_order: recon.order,
    };
    let mut artifacts = vec![Artifact {
        path: "nerve.json".into(),
        contents: json(&report),
    }];
    let global_dot = export_nerve_dot(&global);
    artifacts.push(Artifact {
        path: "nerves/global.dot".into(),
        contents: global_dot.clone(),
    });
    for n in &locals {
        artifacts.push(Artifact {
            path: format!("nerves/{}.dot", nerve::dot_name(&n.kind)),
            contents: export_nerve_dot(n),
        });
    }
    let primary = match config.format {
        ReportFormat::Json => artifacts[0].contents.clone(),
        ReportFormat::Dot => global_dot,
    };
    Ok(RunOutput { artifacts, primary })
}

fn nash_report(k: &GameComplex) -> Result<String> {
    let analysis = NashAnalysis::new(k);
    let labels = analysis.nash_simplices();
    let oracle = oracle_labels(k)?;
    let equilibria = labels
        .iter()
        .map(|&l| {
            let f = k.facet(l);
            EquilibriumReport {
                label: l,
                choice: f.choice.clone(),
                strategies: facet_profile(k, l)
                    .components()
                    .iter()
                    .map(|x| x.weights().to_vec())
                    .collect(),
                payoffs: f.payoffs.clone(),
            }
        })
        .collect();
    let report = NashReport {
        equilibria,
        oracle_agrees: oracle == labels,
        degrees: analysis.degree_table(),
    };
    if !report.oracle_agrees {
        return Err(Error::Invariant(format!(
            "degree criterion found {labels:?} but the payoff oracle found {oracle:?}"
        )));
    }
    Ok(json(&report))
}

fn decompose_output(k: &GameComplex, config: &RunConfig, tolerance: f64) -> Result<RunOutput> {
    let hc = config.hodge(tolerance);
    let (flow, dec, class) = hodge::classify(k, &hc)?;
    let report = decomposition_report(k, &flow, &dec, &class);
    let mut artifacts = vec![Artifact {
        path: "decomposition.json".into(),
        contents: report,
    }];
    let matrices = [
        ("boundary1", flow.boundary_matrix(1)),
        ("boundary2", flow.boundary_matrix(2)),
        ("laplacian0", flow.laplacian(0)),
        ("laplacian1", flow.laplacian(1)),
        ("laplacian2", flow.laplacian(2)),
    ];
    for (name, m) in matrices {
        artifacts.push(Artifact {
            path: format!("matrices/{name}.txt"),
            contents: hodge::triplets(&m),
        });
    }
    Ok(RunOutput {
        primary: artifacts[0].contents.clone(),
        artifacts,
    })
}

fn decomposition_report(
    k: &GameComplex,
    flow: &FlowComplex,
    dec: &hodge::FlowDecomposition,
    class: &Classification,
) -> String {
    let labels = flow.labels();
    json(&DecompositionReport {
        classification: class.class,
        norms: dec.norms,
        potential_residual: class.potential_residual,
        residuals: dec.residuals,
        dimensions: dec.dimensions,
        proof_labels: dec.proof_labels,
        counts: [flow.num_vertices(), flow.num_edges(), flow.num_triangles()],
        potential: labels
            .iter()
            .zip(&dec.potential)
            .map(|(&l, &value)| PotentialEntry {
                label: l,
                choice: k.facet(l).choice.clone(),
                value,
            })
            .collect(),
        edges: flow
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| EdgeReport {
                source: labels[a],
                target: labels[b],
                player: flow.edge_player(e),
                flow: dec.flow[e],
                gradient: dec.gradient[e],
                harmonic: dec.harmonic[e],
                curl: dec.curl[e],
            })
            .collect(),
    })
}

/// Every structural invariant the library can verify on one game.
pub fn check_report(k: &GameComplex, config: &RunConfig, tolerance: f64) -> CheckReport {
    let mut checks = Vec::new();
    let mut push = |name: &str, outcome: std::result::Result<String, String>| {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        checks.push(CheckResult {
            name: name.into(),
            passed,
            detail,
        });
    };

    push("boundary_squared_zero", {
        let mut worst = 0.0f64;
        for d in 2..=k.dim() {
            let prod = &k.boundary_matrix(d - 1) * &k.boundary_matrix(d);
            worst = worst.max(prod.values().iter().fold(0.0, |m, v| m.max(v.abs())));
        }
        if worst == 0.0 {
            Ok(format!("dimensions 0..={}", k.dim()))
        } else {
            Err(format!("max entry {worst}"))
        }
    });

    push("barycenters_convex", {
        let bad = k
            .facets()
            .iter()
            .find(|f| !k.facet_barycenter(f.label).is_convex(1e-12));
        match bad {
            None => Ok(format!("{} facets", k.facets().len())),
            Some(f) => Err(format!("facet {}", f.label)),
        }
    });

    push("subdivision_euler", {
        let sub = k.barycentric_subdivision();
        let (a, b) = (k.euler_characteristic(), sub.euler_characteristic());
        if a == b {
            Ok(format!("chi = {a}"))
        } else {
            Err(format!("complex {a}, subdivision {b}"))
        }
    });

    let locals = local_nerves(k);
    let global = global_nerve(&locals);
    push("nerve_structure", {
        match &global {
            Err(e) => Err(e.to_string()),
            Ok(g) => {
                let stars = nerve::star_count(k);
                let forest_ok = locals
                    .iter()
                    .all(|n| n.tree.len() + 1 == n.vertices.len().max(1));
                if locals.len() != stars {
                    Err(format!("{} local nerves for {stars} stars", locals.len()))
                } else if !forest_ok {
                    Err("a local spanning tree has the wrong size".into())
                } else if g.vertices.len() != k.facets().len() {
                    Err(format!(
                        "{} global vertices for {} facets",
                        g.vertices.len(),
                        k.facets().len()
                    ))
                } else {
                    Ok(format!(
                        "{stars} local nerves, {} global edges",
                        g.edges.len()
                    ))
                }
            }
        }
    });

    push("nerve_reconstruction", {
        match global
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|g| reconstruct_complex(g).map_err(|e| e.to_string()))
        {
            Err(e) => Err(e),
            Ok(r) if r.facets.values().eq(k.facets().iter()) => {
                Ok(format!("{} facets recovered", r.facets.len()))
            }
            Ok(r) => Err(format!(
                "recovered {} of {} facets",
                r.facets.len(),
                k.facets().len()
            )),
        }
    });

    push("covering", {
        let report = verify_covering(&build_covering(k), k);
        if report.passed() {
            Ok("all conditions hold".into())
        } else {
            Err(serde_json::to_string(&report).unwrap_or_default())
        }
    });

    push("nash_oracle", {
        let analysis = NashAnalysis::new(k);
        let labels = analysis.nash_simplices();
        let edges_agree = k.facets().iter().all(|f| {
            (0..k.num_players()).all(|i| {
                analysis.deviation_degree(f.label, i)
                    == analysis.deviation_degree_by_edges(f.label, i)
            })
        });
        match oracle_labels(k) {
            Err(e) => Err(e.to_string()),
            Ok(o) if o == labels && edges_agree => {
                Ok(format!("{} equilibrium simplices", labels.len()))
            }
            Ok(o) => Err(format!(
                "criterion {labels:?}, oracle {o:?}, edge count agrees: {edges_agree}"
            )),
        }
    });

    push("hodge", {
        match hodge::classify(k, &config.hodge(tolerance)) {
            Err(e) => Err(e.to_string()),
            Ok((flow, dec, class)) => {
                let b = &flow.boundary_matrix(1) * &flow.boundary_matrix(2);
                let chain_zero = b.values().iter().all(|v| *v == 0.0);
                let dims = dec.dimensions;
                if !chain_zero {
                    Err("boundary_1 * boundary_2 is not zero".into())
                } else if dims.gradient + dims.harmonic + dims.curl != flow.num_edges() {
                    Err("subspace dimensions do not add up".into())
                } else {
                    Ok(format!(
                        "{} (max residual {:e})",
                        class.class,
                        dec.residuals.max()
                    ))
                }
            }
        }
    });

    CheckReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn doc(game: crate::game::Game) -> GameDocument {
        GameDocument::from_game(&game)
    }

    #[test]
    fn nash_on_prisoners_dilemma() {
        let out = run_pipeline(
            &doc(catalog::prisoners_dilemma()),
            &RunConfig::default(),
            Stage::Nash,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.primary).unwrap();
        let eq = v["equilibria"].as_array().unwrap();
        assert_eq!(eq.len(), 1);
        assert_eq!(eq[0]["choice"], serde_json::json!([1, 1]));
    }

    #[test]
    fn decompose_matching_pennies() {
        let out = run_pipeline(
            &doc(catalog::matching_pennies()),
            &RunConfig::default(),
            Stage::Decompose,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.primary).unwrap();
        assert_eq!(v["classification"], "harmonic");
        assert_eq!(out.artifacts.len(), 6);
    }

    #[test]
    fn check_and_nerve_on_rps() {
        let rps = doc(catalog::rock_paper_scissors());
        let cfg = RunConfig {
            threads: Some(2),
            ..RunConfig::default()
        };
        let out = run_pipeline(&rps, &cfg, Stage::Check).unwrap();
        assert!(out.primary.contains("\"passed\": true"));
        let nerve = run_pipeline(&rps, &cfg, Stage::Nerve).unwrap();
        let locals = nerve
            .artifacts
            .iter()
            .filter(|a| a.path.starts_with("nerves/local_"))
            .count();
        assert_eq!(locals, 6);
        assert_eq!(
            nerve,
            run_pipeline(&rps, &RunConfig::default(), Stage::Nerve).unwrap()
        );
    }

    #[test]
    fn dot_only_for_nerve() {
        let cfg = RunConfig {
            format: ReportFormat::Dot,
            ..RunConfig::default()
        };
        let d = doc(catalog::coordination());
        assert!(run_pipeline(&d, &cfg, Stage::Nerve)
            .unwrap()
            .primary
            .starts_with("digraph \"global\""));
        assert!(matches!(
            run_pipeline(&d, &cfg, Stage::Build),
            Err(Error::Invalid(_))
        ));
    }
}
