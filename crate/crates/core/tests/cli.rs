use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn games_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("games")
}

fn sgc(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sgc"));
    cmd.args(args).env_remove("SGC_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn game(name: &str) -> String {
    games_dir().join(name).to_string_lossy().into_owned()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read_tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push((
                    path.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&path).unwrap(),
                ));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn nash_on_prisoners_dilemma_lists_defect_defect() {
    let v = stdout_json(&sgc(
        &["nash", "--game", &game("prisoners_dilemma.nfg")],
        &[],
    ));
    let eq = v["equilibria"].as_array().unwrap();
    assert_eq!(eq.len(), 1);
    assert_eq!(eq[0]["choice"], serde_json::json!([1, 1]));
    assert_eq!(v["oracle_agrees"], true);
}

#[test]
fn decompose_matching_pennies_is_harmonic() {
    let v = stdout_json(&sgc(
        &["decompose", "--game", &game("matching_pennies.json")],
        &[],
    ));
    assert_eq!(v["classification"], "harmonic");
    let v = stdout_json(&sgc(
        &["decompose", "--game", &game("coordination.json")],
        &[],
    ));
    assert_eq!(v["classification"], "potential");
}

#[test]
fn check_on_rps_writes_six_local_nerves() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = sgc(
        &[
            "check",
            "--game",
            &game("rock_paper_scissors.json"),
            "--out",
            out_dir,
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = sgc(
        &[
            "nerve",
            "--game",
            &game("rock_paper_scissors.json"),
            "--out",
            out_dir,
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let locals = std::fs::read_dir(dir.path().join("nerves"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("local_")
        })
        .count();
    assert_eq!(locals, 6);
    assert!(dir.path().join("check.json").exists());
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    for cmd in ["build", "nerve", "covering", "nash", "decompose", "check"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let g = game("rock_paper_scissors.json");
        let ra = sgc(
            &[cmd, "--game", &g, "--out", a.path().to_str().unwrap()],
            &[("SGC_THREADS", "1")],
        );
        let rb = sgc(
            &[cmd, "--game", &g, "--out", b.path().to_str().unwrap()],
            &[("SGC_THREADS", "4")],
        );
        assert!(ra.status.success() && rb.status.success(), "{cmd}");
        assert_eq!(ra.stdout, rb.stdout, "{cmd}");
        assert_eq!(read_tree(a.path()), read_tree(b.path()), "{cmd}");
    }
}

#[test]
fn dot_format_prints_the_global_nerve() {
    let out = sgc(
        &[
            "nerve",
            "--game",
            &game("coordination.json"),
            "--format",
            "dot",
        ],
        &[],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("digraph \"global\" {"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = dir.path().join("bad.json");
    std::fs::write(
        &malformed,
        "{\n  \"schema_version\": 1,\n  \"players\": [\n",
    )
    .unwrap();
    let out = sgc(&["build", "--game", malformed.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let short = dir.path().join("short.json");
    std::fs::write(
        &short,
        r#"{"schema_version": 1, "players": ["a", "b"], "strategies": [["x", "y"], ["x", "y"]], "payoffs": [1, 2, 3, 4, 5, 6, 7]}"#,
    )
    .unwrap();
    let out = sgc(&["build", "--game", short.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected 8"));

    let bad_mixed = dir.path().join("mixed.json");
    std::fs::write(
        &bad_mixed,
        r#"{"schema_version": 1, "players": ["a"], "strategies": [["x", "y"]], "payoffs": [1, 2], "mixed": [[[0.7, 0.7]]]}"#,
    )
    .unwrap();
    let out = sgc(&["build", "--game", bad_mixed.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mixed[0][0]"));

    let nfg = dir.path().join("outcome.nfg");
    std::fs::write(
        &nfg,
        "NFG 1 R \"\" { \"a\" \"b\" } { 2 2 }\n{ { \"\" 1 1 } }\n1 1 1 1\n",
    )
    .unwrap();
    assert_eq!(
        sgc(&["build", "--game", nfg.to_str().unwrap()], &[])
            .status
            .code(),
        Some(2)
    );

    let g = game("coordination.json");
    assert_eq!(
        sgc(&["build", "--game", &g, "--format", "dot"], &[])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        sgc(&["build", "--game", &g, "--tolerance=-1"], &[])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        sgc(&["build", "--game", &g], &[("SGC_THREADS", "zero")])
            .status
            .code(),
        Some(3)
    );
}
