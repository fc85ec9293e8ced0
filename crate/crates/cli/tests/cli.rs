use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ratsub::groupfile::load_group_file;
use ratsub::groups::Limits;
use ratsub::compile_str;

const F2: &str = "free F2 {\n    generators = a b\n}\n";

const Z2Z3: &str = "\
finite Z2 {
    cyclic = 2
    generators = s
    assign = s:1
}
finite Z3 {
    cyclic = 3
    generators = t
    assign = t:1
}
finite E {
    cyclic = 1
}
amalgam G {
    left = Z2
    right = Z3
    sub = E
}
";

const HNN: &str = "\
finite T {
    cyclic = 1
}
hnn Z {
    base = T
    stable = y
    associated = T
}
";

const OVER: &str = "\
free H {
    generators = h
}
overgroup Z {
    subgroup = H
    generators = t
    reps = 1, t
    coset 0 {
        t = 1 : 1
        t' = 1 : h'
    }
    coset 1 {
        t = 0 : h
        t' = 0 : 1
    }
}
";

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Dir {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }
}

fn ratsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratsub")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_member() {
    let d = Dir::new();
    let g = d.file("f2.group", F2);
    let o = ratsub(&["check", s(&g), "--subset", "(a b)*", "--word", "a b a b"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "MEMBER\n");
    let o = ratsub(&["check", s(&g), "--subset", "(a b)*", "--word", "b a"]);
    assert_eq!(stdout(&o), "NON-MEMBER\n");
}

#[test]
fn subgroup_mode() {
    let d = Dir::new();
    let g = d.file("f2.group", F2);
    let o = ratsub(&["check", s(&g), "--mode", "subgroup", "--gens", "a a,a b", "--word", "b"]);
    assert_eq!(stdout(&o), "NON-MEMBER\n");
    let o = ratsub(&["subgroup", s(&g), "--gens", "a a", "--gens", "a b", "--word", "b' a a b"]);
    assert_eq!(stdout(&o), "MEMBER\n");
}

#[test]
fn order_in_free_product() {
    let d = Dir::new();
    let g = d.file("g.group", Z2Z3);
    let o = ratsub(&["check", s(&g), "--mode", "order", "--word", "s t"]);
    assert_eq!(stdout(&o), "ORDER INFINITE\n");
    assert_eq!(stdout(&ratsub(&["order", s(&g), "--word", "t"])), "ORDER 3\n");
    assert_eq!(stdout(&ratsub(&["order", s(&g), "--word", "s"])), "ORDER 2\n");
}

#[test]
fn word_problem_mode() {
    let d = Dir::new();
    let g = d.file("g.group", Z2Z3);
    let o = ratsub(&["check", s(&g), "--mode", "wordproblem", "--word", "t t t s s"]);
    assert_eq!(stdout(&o), "MEMBER\n");
    let o = ratsub(&["check", s(&g), "--mode", "wordproblem", "--word", "s t"]);
    assert_eq!(stdout(&o), "NON-MEMBER\n");
}

#[test]
fn automaton_file_is_recoded() {
    let d = Dir::new();
    let g = d.file("f2.group", F2);
    // declares only the letters it uses, in another order
    let m = d.file("r.aut", "alphabet: b a\nstates: 2\ninitial: 0\nfinals: 1\nedge: 0 a 1\nedge: 1 b 1\n");
    let o = ratsub(&["check", s(&g), "--automaton", s(&m), "--word", "a b b"]);
    assert_eq!(stdout(&o), "MEMBER\n");
    let bad = d.file("bad.aut", "alphabet: c\nstates: 1\ninitial: 0\nfinals: 0\n");
    assert_eq!(ratsub(&["check", s(&g), "--automaton", s(&bad), "--word", "a"]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    let d = Dir::new();
    let g = d.file("bad.group", "free F {\n  generators a\n}\n");
    let o = ratsub(&["check", s(&g), "--subset", "a", "--word", "a"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("2:"), "{err}");
    let g = d.file("f2.group", F2);
    assert_eq!(ratsub(&["check", s(&g), "--subset", "(a", "--word", "a"]).status.code(), Some(2));
    assert_eq!(ratsub(&["check", s(&g), "--subset", "a", "--word", "z"]).status.code(), Some(2));
    assert_eq!(ratsub(&["check", "/nonexistent", "--subset", "a", "--word", "a"]).status.code(), Some(2));
}

#[test]
fn unsupported_product_is_refused() {
    let d = Dir::new();
    let g = d.file("ff.group", "product P {\n  free = a b\n  partner = free\n  generators = c d\n}\n");
    let o = ratsub(&["check", s(&g), "--subset", "a", "--word", "a"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("undecidable"));
}

#[test]
fn budget_exhaustion_exits_3() {
    let d = Dir::new();
    let g = d.file("g.group", Z2Z3);
    let o = ratsub(&["check", s(&g), "--subset", "(s t)*", "--word", "t s", "--oracle-budget", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let p = d.file("p.group", "product P {\n  free = a\n  partner = abelian\n  generators = e\n}\n");
    let o = ratsub(&["check", s(&p), "--subset", "(a e | a' e e)*", "--word", "e e e", "--ilp-budget", "0"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn validate_lists_checks() {
    let d = Dir::new();
    let o = ratsub(&["validate", s(&d.file("hnn.group", HNN))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().count() > 3 && out.lines().all(|l| l.starts_with("PASS ")), "{out}");

    let bad = "\
finite Z2 {
    cyclic = 2
    generators = s
    assign = s:1
}
free F {
    generators = a
}
amalgam G {
    left = F
    right = Z2
    sub = Z2
    left_embedding = a a'
    right_embedding = s
}
";
    let o = ratsub(&["validate", s(&d.file("bad.group", bad))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL") && l.contains("injective")));

    let o = ratsub(&["validate", s(&d.file("act.group", &OVER.replace("t' = 0 : 1", "t' = 1 : 1")))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL") && l.contains("bijection")), "{}", stdout(&o));
}

#[test]
fn saturate_prints_automaton_and_summary() {
    let o = ratsub(&["saturate", "--generators", "a", "--subset", "a a' a"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("rounds=") && last.contains("edges_added="), "{out}");
    assert!(out.starts_with("alphabet:"));
    let o = ratsub(&["saturate", "--generators", "a", "--subset", "a a' a", "--dot"]);
    assert!(stdout(&o).starts_with("digraph"));
    let d = Dir::new();
    let rules = d.file("r.rules", "# collapse squares\n1 <- a a\n");
    let o = ratsub(&["saturate", "--generators", "a", "--subset", "a a a", "--rules", s(&rules)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("edges_added="));
}

#[test]
fn explain_goes_to_stderr() {
    let d = Dir::new();
    let g = d.file("g.group", Z2Z3);
    let o = ratsub(&["check", s(&g), "--subset", "(s t)*", "--word", "s t", "--explain"]);
    assert_eq!(stdout(&o), "MEMBER\n");
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("graph_of_groups G") && err.contains("oracle_calls="), "{err}");
}

#[test]
fn oracle_eval_is_hidden_but_works() {
    let help = stdout(&ratsub(&["--help"]));
    assert!(!help.contains("oracle-eval"));
    let o = ratsub(&["oracle-eval", "--kind", "free-product", "--generators", "s:2 t:3", "--word", "s t t"]);
    assert_eq!(stdout(&o), "Syllables([(0, 1), (1, 2)])\n");
}

#[test]
fn verdicts_match_library_and_are_deterministic() {
    let d = Dir::new();
    let cases: &[(&str, &str, &[(&str, &str)])] = &[
        (F2, "f2", &[("(a b)*", "a b a b"), ("a*", "a'"), ("a* b", "a a b"), ("(a | b)* a'", "b")]),
        (Z2Z3, "g", &[("(s t)*", "t s"), ("s t t", "s t'"), ("(s t s)*", "t t")]),
        (OVER, "z", &[("(t t)*", "t"), ("t* t'", "t t"), ("(t t)*", "t t t t")]),
        (HNN, "h", &[("(y y)*", "y"), ("y*", "y y")]),
    ];
    for (text, name, queries) in cases {
        let g = d.file(&format!("{name}.group"), text);
        let (_, built) = load_group_file(text, Limits::default()).unwrap();
        for (subset, word) in *queries {
            let r = compile_str(subset, built.alphabet()).unwrap();
            let want = built.member(&r, &built.alphabet().parse_word(word).unwrap()).unwrap();
            let args = ["check", s(&g), "--subset", subset, "--word", word];
            let first = stdout(&ratsub(&args));
            assert_eq!(first, if want { "MEMBER\n" } else { "NON-MEMBER\n" }, "{name} {subset} {word}");
            assert_eq!(first, stdout(&ratsub(&args)));
        }
    }
}
