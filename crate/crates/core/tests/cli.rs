use std::path::PathBuf;
use std::process::{Command, Output};

fn games() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../games")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choquet"))
        .args(args)
        .current_dir(games())
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn reference_game_both_routes_consistent() {
    let out = run(&["solve", "ref.game", "--r", "add", "--route", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("limit Rowena: {u,d,m}"), "{text}");
    assert!(text.contains("limit Colin: {l,r}"));
    assert!(text.trim_end().ends_with("verdict: CONSISTENT"));
}

#[test]
fn unrestricted_both_routes_on_every_example() {
    for game in ["ref.game", "nex.game", "coarse.game", "pd.game"] {
        let out = run(&["solve", game, "--route", "both", "--format", "structured"]);
        assert_eq!(out.status.code(), Some(0), "{game}");
        assert!(stdout(&out).contains("verdict=CONSISTENT"), "{game}");
    }
}

#[test]
fn nonexistence_reports_informational_status() {
    let out = run(&["solve", "nex.game", "--r", "conv+na"]);
    assert_eq!(out.status.code(), Some(10));
    assert!(stdout(&out).contains("empty Colin: from level 2"));
}

#[test]
fn prisoners_dilemma_extended_route() {
    let out = run(&["solve", "pd.game", "--route", "extended", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("extended_limit_P1={D}"));
    assert!(text.contains("extended_limit_P2={D}"));
    assert!(text.contains("certificate={C} dominated by 1 {D} with slack 1"));
}

#[test]
fn extended_route_rejects_shape_restrictions() {
    let out = run(&["solve", "ref.game", "--r", "conv", "--route", "extended"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["solve", "ref.game", "--r", "conv", "--route", "both"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn table_and_structured_carry_the_same_records() {
    let table = stdout(&run(&["solve", "ref.game", "--r", "conc+na"]));
    let structured = stdout(&run(&["solve", "ref.game", "--r", "conc+na", "--format", "structured"]));
    let rows = |prefix: &str| structured.lines().filter(|l| l.starts_with(prefix)).count();
    let table_rows = |title: &str| {
        let lines: Vec<&str> = table.lines().collect();
        let start = lines.iter().position(|l| *l == title).unwrap();
        lines[start + 2..].iter().take_while(|l| !l.is_empty()).count()
    };
    assert_eq!(rows("direct levels\t"), table_rows("direct levels"));
    assert_eq!(rows("witnesses\t"), table_rows("witnesses"));
    assert!(structured.contains("limit_Rowena={u,d}"));
}

#[test]
fn level_cap_truncates_report() {
    let out = run(&["solve", "pd.game", "--levels", "1"]);
    assert!(stdout(&out).contains("stopped at level: 1"));
}

#[test]
fn parse_errors_and_size_caps() {
    let dir = std::env::temp_dir().join(format!("choquet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.game");
    std::fs::write(&bad, "players A B\nactions A x\n").unwrap();
    let out = run(&["solve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let wide = dir.join("wide.game");
    let mut text = String::from("players A B\nactions A x\nactions B c1 c2 c3 c4 c5 c6\npayoffs\n");
    for k in 1..=6 {
        text.push_str(&format!("x c{k} : 0 0\n"));
    }
    std::fs::write(&wide, text).unwrap();
    assert_eq!(run(&["solve", wide.to_str().unwrap()]).status.code(), Some(2));

    let types = dir.join("bad.types");
    std::fs::write(&types, "types P1 a\ntypes P2 b\na -> D\ncapacity a\n{}: 0\n").unwrap();
    assert_eq!(run(&["typespace", "pd.game", types.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn typespace_verdicts() {
    let witness = stdout(&run(&["typespace", "ref.game"]));
    assert!(witness.contains("soundness: SUBSET holds"));
    assert!(witness.contains("verdict: EQUAL"));
    let out = run(&["typespace", "pd.game", "pd_miscoordinated.types"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("soundness: SUBSET holds"));
    assert!(text.contains("verdict: NOT EQUAL"));
}

#[test]
fn corpus_is_deterministic_and_vacuous_when_empty() {
    let args = ["corpus", "--count", "4", "--seed", "9", "--format", "structured"];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&run(&args)));
    assert!(stdout(&first).contains("seed=9"));
    let empty = run(&["corpus", "--count", "0"]);
    assert_eq!(empty.status.code(), Some(0));
    assert!(stdout(&empty).contains("verdict: PASS"));
}

#[test]
fn constant_games_keep_every_action() {
    let out = run(&["corpus", "--count", "5", "--payoff-min", "2", "--payoff-max", "2", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("choquet-const-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("const.game");
    let mut text = String::from("players A B\nactions A x y z\nactions B p q\npayoffs\n");
    for a in ["x", "y", "z"] {
        for b in ["p", "q"] {
            text.push_str(&format!("{a} {b} : 2 2\n"));
        }
    }
    std::fs::write(&path, text).unwrap();
    for r in ["any", "add", "conv", "conc"] {
        let report = stdout(&run(&["solve", path.to_str().unwrap(), "--r", r, "--format", "structured"]));
        assert!(report.contains("limit_A={x,y,z}"), "{r}: {report}");
        assert!(report.contains("limit_B={p,q}"), "{r}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("choquet-out-{}.txt", std::process::id()));
    let out = run(&["solve", "pd.game", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("limit P1: {D}"));
    std::fs::remove_file(&path).unwrap();
}
