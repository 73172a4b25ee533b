use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn reprep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reprep"))
        .args(args)
        .env_remove("REPREP_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_chsh() {
    let o = reprep(&["solve", "--game", path(&fixture("chsh.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("classical,3/4,0.75"), "{text}");
    assert!(text.contains("nonsignaling,,1"), "{text}");
}

#[test]
fn anchor_reproduces_fixture() {
    let o = reprep(&["anchor", "--game", path(&fixture("chsh.json")), "--alpha", "1/4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), std::fs::read_to_string(fixture("anchored_chsh.json")).unwrap());
}

#[test]
fn anchor_rejects_bad_alpha() {
    let o = reprep(&["anchor", "--game", path(&fixture("chsh.json")), "--alpha", "3/2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repeat_materializes_game_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chsh2.json");
    let o = reprep(&["repeat", "--game", path(&fixture("chsh.json")), "--n", "2", "--materialize", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let game = reprep::Game::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(game.questions(0).len(), 4);
    let solved = reprep(&["solve", "--game", path(&out)]);
    assert!(stdout(&solved).contains("classical,5/8,0.625"));
}

#[test]
fn decay_truncates_with_budget_exit() {
    let o = reprep(&["decay", "--game", path(&fixture("anchored_chsh.json")), "--n", "3"]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,exact,float,bound,product_lower");
    assert!(lines[1].starts_with("1,55/64,"));
    assert!(lines[2].starts_with("2,1553/2048,"));
    assert_eq!(lines[3], "3,truncated,,,");
}

#[test]
fn budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_reprep"))
        .args(["decay", "--game", path(&fixture("chsh.json")), "--n", "2"])
        .env("REPREP_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).ends_with("2,truncated,,,\n"));
}

#[test]
fn verify_bundled_fixture_is_green() {
    let o = reprep(&["verify", "--game", path(&fixture("anchored_chsh.json"))]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(!text.contains(",fail"));
    for check in ["game.validate", "depbreak.rounding[i=1]", "quantum.gamma", "quantum.rounding[i=1]"] {
        assert!(text.lines().any(|l| l.trim_start_matches('"').starts_with(check)), "{check}");
    }
}

#[test]
fn corrupted_mu_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(fixture("chsh.json")).unwrap().replacen("\"1/4\"", "\"1/8\"", 1);
    std::fs::write(&bad, text).unwrap();
    let o = reprep(&["verify", "--game", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("game.validate,1,0,-1,fail"));
}

#[test]
fn parse_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.json");
    std::fs::write(&bad, "{\"k\": 2,\n \"questions\": [").unwrap();
    let o = reprep(&["solve", "--game", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(reprep(&["solve"]).status.code(), Some(2));
}

#[test]
fn empty_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "").unwrap();
    let o = reprep(&["run", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_run_is_byte_stable() {
    let cfg = fixture("verify_anchored_chsh.toml");
    let a = reprep(&["run", "--config", path(&cfg)]);
    let b = reprep(&["run", "--config", path(&cfg)]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn depbreak_verify_report() {
    let o = reprep(&["depbreak-verify", "--game", path(&fixture("anchored_chsh.json")), "--n", "2", "--C", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("check,lhs,rhs,slack,status\n"));
    assert!(text.contains("depbreak.holenstein_i,"));
    assert!(text.contains("depbreak.local_sampling[i=1],0,0,0,pass"));
}

#[test]
fn depbreak_verify_accepts_base_strategy_file() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    std::fs::write(&s, r#"{"maps": [[["0","0"],["1","0"],["⊥","0"]], [["0","0"],["1","0"],["⊥","0"]]]}"#).unwrap();
    let o = reprep(&[
        "depbreak-verify",
        "--game",
        path(&fixture("anchored_chsh.json")),
        "--n",
        "2",
        "--C",
        "1",
        "--strategy",
        path(&s),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("depbreak.rounding[i=2]"));
}

#[test]
fn quantum_suites() {
    let game = fixture("anchored_chsh.json");
    let strategy = fixture("anchored_chsh_strategy.json");
    for suite in ["toolbox", "phi", "rounding"] {
        let o = reprep(&["quantum-check", "--suite", suite, "--game", path(&game), "--strategy", path(&strategy)]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!stdout(&o).contains(",fail"));
    }
}

#[test]
fn quantum_check_needs_game_for_phi() {
    assert_eq!(reprep(&["quantum-check", "--suite", "phi"]).status.code(), Some(2));
}
