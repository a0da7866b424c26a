use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orbit_rank::permgroup::GroupConfig;
use orbit_rank::symrank::classify;
use orbit_rank_cli::commands::{cmd_truncate, load_spec};
use orbit_rank_cli::spec::parse_spec;

fn demo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs/demo.orb")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbit-rank")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn rank_of_a_chain() {
    let o = run(&["rank", demo().to_str().unwrap(), "S3deg3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("0\t0\n1\t1\n2\t2\n") && text.contains("rho = 2"), "{text}");
}

#[test]
fn rank_of_expressions() {
    let file = demo();
    let file = file.to_str().unwrap();
    let w = stdout(&run(&["rank", file, "W"]));
    assert!(w.contains("classification: (1, not tight)") && w.contains("L-1-CLI, not 1-CLI"), "{w}");
    let c = stdout(&run(&["rank", file, "Cantor", "--alpha", "1"]));
    assert!(c.contains("(1, tight)") && c.contains("at alpha = 1: 1-CLI"), "{c}");
    let m = stdout(&run(&["rank", file, "Mixed", "--alpha", "0"]));
    assert!(m.contains("not L-0-CLI"), "{m}");
    let g = stdout(&run(&["rank", file, "Gw", "--alpha", "w+1"]));
    assert!(g.contains("(w, not tight)") && g.contains(": w+1-CLI"), "{g}");
}

#[test]
fn trees() {
    let file = demo();
    let file = file.to_str().unwrap();
    let dot = run(&["tree", file, "S3deg3", "--k", "2", "--dot"]);
    assert_eq!(dot.status.code(), Some(0));
    assert_eq!(stdout(&dot).matches("[label=").count(), 3);
    let empty = run(&["tree", file, "S3deg3", "--k", "0", "--json"]);
    assert_eq!(stdout(&empty).trim(), "[]");
    let json = stdout(&run(&["tree", file, "C4", "--k", "2"]));
    let tree = orbit_rank::wftree::WfTree::from_json(&json).unwrap();
    assert_eq!(tree.rank(), orbit_rank::ordinal::Ordinal::from(2));
    assert_eq!(run(&["tree", file, "S3deg3", "--k", "3"]).status.code(), Some(2));
    assert_eq!(run(&["tree", file, "W", "--k", "1"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify", "--seed", "3", "--trials", "5"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let bad = run(&["verify", "--trials", "10", "--mutant", "product-sum"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    assert!(text.contains("FAIL product-max") && text.contains("counterexample"), "{text}");
    let vacuous = run(&["verify", "--trials", "0"]);
    assert_eq!(vacuous.status.code(), Some(0));
    assert!(stdout(&vacuous).contains("warning"));
    let file = run(&["verify", "--file", demo().to_str().unwrap(), "--trials", "5"]);
    assert_eq!(file.status.code(), Some(0), "{}", stdout(&file));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.orb");
    std::fs::write(&broken, "group A = prod(trivial\n").unwrap();
    let o = run(&["rank", broken.to_str().unwrap(), "A"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:23"));
    assert_eq!(run(&["rank", demo().to_str().unwrap(), "Nope"]).status.code(), Some(2));
    assert_eq!(run(&["rank", "/no/such/file", "A"]).status.code(), Some(2));
    assert_eq!(run(&["examples", "--alpha", "w+"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn truncate_writes_a_usable_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h1.orb");
    let file = demo();
    let file = file.to_str().unwrap();
    let o = run(&["truncate", file, "H1", "--depth", "3", "--breadth", "2", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let spec = parse_spec(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(spec.chain("H1_d3_b2").unwrap().order(0), 4);
    let r = stdout(&run(&["rank", out.to_str().unwrap(), "H1_d3_b2"]));
    assert!(r.contains("rho = "), "{r}");
    let t = run(&["tree", out.to_str().unwrap(), "H1_d3_b2", "--k", "1"]);
    assert_eq!(t.status.code(), Some(0));

    let zero = run(&["truncate", file, "G1", "--depth", "3", "--breadth", "0", "-o", out.to_str().unwrap()]);
    assert_eq!(zero.status.code(), Some(2));
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, "max_group_order = 8\n").unwrap();
    let budget = run(&["--config", cfg.to_str().unwrap(), "truncate", file, "G1", "--depth", "3", "--breadth", "2", "-o", out.to_str().unwrap()]);
    assert_eq!(budget.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&budget.stderr).contains("budget"), "{}", String::from_utf8_lossy(&budget.stderr));
}

#[test]
fn examples_listing() {
    let text = stdout(&run(&["examples", "--alpha", "w*2", "--kind", "H"]));
    assert!(text.contains("H_w*2 = ") && text.contains("(w*2, tight)") && !text.contains("G_w*2"), "{text}");
    let both = stdout(&run(&["examples", "--alpha", "0"]));
    assert!(both.contains("0-CLI") && both.contains("L-0-CLI, not 0-CLI"), "{both}");
}

#[test]
fn sequential_and_parallel_agree() {
    let file = demo();
    let file = file.to_str().unwrap();
    for name in ["S3deg3", "C4"] {
        assert_eq!(stdout(&run(&["rank", file, name])), stdout(&run(&["--sequential", "rank", file, name])));
    }
    let args = ["verify", "--seed", "9", "--trials", "4"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&[&["--sequential"][..], &args].concat())));
}

/// Finite truncations never outrun what the classification allows: a
/// trivial group truncates to rank 0 and every truncation has finite rank.
#[test]
fn truncated_rank_respects_classification() {
    let spec = load_spec(&demo(), &GroupConfig::default()).unwrap();
    for name in ["Cantor", "W", "Mixed", "H1", "G1", "Gw"] {
        let c = classify(spec.group(name).unwrap()).unwrap();
        let text = cmd_truncate(&spec, name, 3, 2, &GroupConfig::default()).unwrap();
        let chain = parse_spec(&text).unwrap();
        let g = chain.chains().pop().unwrap().1;
        assert!(g.rho().is_finite(), "{name}");
        if c.rank.is_zero() && c.tight {
            assert!(g.rho().is_zero(), "{name}");
        }
    }
    let trivial = parse_spec("group T = prod(trivial, powinf(trivial))").unwrap();
    let text = cmd_truncate(&trivial, "T", 3, 2, &GroupConfig::default()).unwrap();
    assert!(parse_spec(&text).unwrap().chains().pop().unwrap().1.rho().is_zero());
}

#[test]
fn spec_files_round_trip() {
    let text = std::fs::read_to_string(demo()).unwrap();
    let spec = parse_spec(&text).unwrap();
    assert_eq!(parse_spec(&spec.to_string()).unwrap(), spec);
}
