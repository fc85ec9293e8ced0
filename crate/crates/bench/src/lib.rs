//! Fixtures shared by the benches.

use ratsub::groupfile::{load_group_file, Built};
use ratsub::groups::Limits;
use ratsub::{compile_str, Nfa, Word};

pub struct Fixture {
    pub name: &'static str,
    pub group: Built,
    pub queries: Vec<(Nfa, Word)>,
}

const GROUPS: &[(&str, &str, &[(&str, &str)])] = &[
    (
        "free",
        "free F2 {\n    generators = a b\n}\n",
        &[("(a b | b' a a)* a'", "a b b' a a"), ("(a a' b)* (b' a)*", "b b a"), ("a* b* a'*", "b a b")],
    ),
    (
        "abelian",
        "abelian A {\n    free = a b\n    torsion = c:3\n}\n",
        &[("(a b c)* (a' | b')*", "a a b c c"), ("(a a c)* b*", "a b c c")],
    ),
    (
        "overgroup",
        "free H {\n    generators = h\n}\novergroup Z {\n    subgroup = H\n    generators = t\n    reps = 1, t\n    coset 0 {\n        t = 1 : 1\n        t' = 1 : h'\n    }\n    coset 1 {\n        t = 0 : h\n        t' = 0 : 1\n    }\n}\n",
        &[("(t t)* (t' t' t')*", "t"), ("(t t t)*", "t t t t t t")],
    ),
    (
        "amalgam",
        "finite Z2 {\n    cyclic = 2\n    generators = s\n    assign = s:1\n}\nfinite Z3 {\n    cyclic = 3\n    generators = t\n    assign = t:1\n}\nfinite E {\n    cyclic = 1\n}\namalgam G {\n    left = Z2\n    right = Z3\n    sub = E\n}\n",
        &[("(s t)* (t s)*", "s t s t'"), ("(s t t)*", "t s t s")],
    ),
    (
        "product",
        "product P {\n    free = a b\n    partner = abelian\n    generators = e f\n}\n",
        &[("(a e)* (b f)*", "a a b e e f"), ("(a e | b f')*", "a b e f")],
    ),
];

pub fn fixtures() -> Vec<Fixture> {
    GROUPS
        .iter()
        .map(|&(name, text, queries)| {
            let (_, group) = load_group_file(text, Limits::default()).unwrap();
            let queries = queries
                .iter()
                .map(|&(r, w)| {
                    let a = group.alphabet();
                    (compile_str(r, a).unwrap(), a.parse_word(w).unwrap())
                })
                .collect();
            Fixture { name, group, queries }
        })
        .collect()
}
