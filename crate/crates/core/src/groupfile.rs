//! Group definition files.
//!
//! ```text
//! # comments run to end of line
//! finite Z2 {
//!     cyclic = 2
//!     generators = s
//!     assign = s:1
//! }
//! finite Z3 {
//!     cyclic = 3
//!     generators = t
//!     assign = t:1
//! }
//! finite E {
//!     cyclic = 1
//! }
//! amalgam G {
//!     left = Z2
//!     right = Z3
//!     sub = E
//! }
//! ```
//!
//! Each top-level block is `<kind> <name> { … }`. Kinds:
//!
//! * `free`: `generators = a b`.
//! * `finite`: `cyclic = n` or one `row = …` line per element (row `i` lists
//!   `i·j`; element 0 is the identity), `generators`, and
//!   `assign = s:1 t:2` giving each generator's element.
//! * `abelian`: `free = e1 e2`, `torsion = f1:3`.
//! * `overgroup`: `subgroup = <name>`, `generators`, `reps = w0, w1, …` and
//!   one `coset <i> { x = <target> : <word over subgroup letters> }` block per
//!   coset with a line for every letter, primed ones included.
//! * `hnn`: `base`, `stable` (letter name), `associated` (a finite group),
//!   `in = …` and `out = …` listing words in the base for the non-identity
//!   elements of the associated group, in order.
//! * `amalgam`: `left`, `right`, `sub` (finite), `left_embedding`,
//!   `right_embedding`.
//! * `graph_of_groups`: `base = <vertex>`, `vertex <v> { group = <name> }`
//!   blocks and `edge <y> { from, to, group, alpha, omega }` blocks.
//! * `product`: `free = a b`, `partner = abelian | free_commutative |
//!   free_monoid | free`, `generators = …` for the partner, and `torsion` for
//!   an abelian partner.
//!
//! Word lists are comma separated; `1` is the empty word. Other definitions
//! are referenced by name and must be declared earlier. The root is named by a
//! top-level `root = <name>` line, or else is the only definition nobody
//! references.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::groups::{
    abelian_group_decider_named, amalgam_graph, finite_group_decider, free_group_decider_with,
    graph_of_groups_decider_with, overgroup_decider, product_with_free_group_decider_with, CheckReport,
    CosetTable, FiniteGroup, GogEdge, GogVertex, GraphOfGroups, GroupDecider, Limits, MonoidDecider, Partner,
    ProductDecider, ProductSpec,
};
use crate::words::{Alphabet, InvolutiveAlphabet, Word};

#[derive(Clone, Debug)]
struct Field {
    key: String,
    value: String,
    line: usize,
    column: usize,
}

#[derive(Clone, Debug)]
struct Block {
    kind: String,
    name: Option<String>,
    line: usize,
    fields: Vec<Field>,
    blocks: Vec<Block>,
}

fn parse_blocks(text: &str) -> Result<(Vec<Field>, Vec<Block>)> {
    let mut stack: Vec<Block> = vec![Block {
        kind: String::new(),
        name: None,
        line: 0,
        fields: Vec::new(),
        blocks: Vec::new(),
    }];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let t = content.trim();
        if t.is_empty() {
            continue;
        }
        let column = content.len() - content.trim_start().len() + 1;
        if t == "}" {
            if stack.len() == 1 {
                return Err(Error::parse(line, column, "unmatched `}`"));
            }
            let b = stack.pop().expect("nonempty");
            stack.last_mut().expect("root").blocks.push(b);
        } else if let Some(head) = t.strip_suffix('{') {
            let words: Vec<&str> = head.split_whitespace().collect();
            if words.is_empty() || words.len() > 2 {
                return Err(Error::parse(line, column, "expected `<kind> [name] {`"));
            }
            stack.push(Block {
                kind: words[0].to_string(),
                name: words.get(1).map(|s| s.to_string()),
                line,
                fields: Vec::new(),
                blocks: Vec::new(),
            });
        } else if let Some((k, v)) = t.split_once('=') {
            let key = k.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(Error::parse(line, column, format!("bad key `{key}`")));
            }
            let vcol = column + t.find('=').expect("split") + 1;
            stack.last_mut().expect("root").fields.push(Field {
                key: key.to_string(),
                value: v.trim().to_string(),
                line,
                column: vcol,
            });
        } else {
            return Err(Error::parse(line, column, format!("cannot read `{t}`")));
        }
    }
    if stack.len() > 1 {
        let open = stack.last().expect("nonempty");
        return Err(Error::parse(open.line, 1, format!("block `{}` is never closed", open.kind)));
    }
    let root = stack.pop().expect("root");
    Ok((root.fields, root.blocks))
}

impl Block {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, 1, msg)
    }

    fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.key == key)
    }

    fn require(&self, key: &str) -> Result<&Field> {
        self.get(key)
            .ok_or_else(|| self.err(format!("`{}` block is missing `{key}`", self.kind)))
    }

    fn names(&self, key: &str) -> Vec<String> {
        self.get(key)
            .map(|f| f.value.split_whitespace().map(str::to_string).collect())
            .unwrap_or_default()
    }

    fn check_keys(&self, allowed: &[&str], sub: &[&str]) -> Result<()> {
        for f in &self.fields {
            if !allowed.contains(&f.key.as_str()) {
                return Err(Error::parse(f.line, f.column, format!("unexpected key `{}`", f.key)));
            }
        }
        for b in &self.blocks {
            if !sub.contains(&b.kind.as_str()) {
                return Err(b.err(format!("unexpected block `{}`", b.kind)));
            }
        }
        Ok(())
    }
}

fn number<T: std::str::FromStr>(f: &Field, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(f.line, f.column, format!("expected a number, got `{s}`")))
}

/// `name:value` pairs.
fn pairs<T: std::str::FromStr>(f: &Field) -> Result<Vec<(String, T)>> {
    f.value
        .split_whitespace()
        .map(|p| match p.split_once(':') {
            Some((n, v)) => Ok((n.to_string(), number(f, v)?)),
            None => Err(Error::parse(f.line, f.column, format!("expected `name:value`, got `{p}`"))),
        })
        .collect()
}

/// Word spellings with the line they came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spelled {
    pub text: String,
    pub line: usize,
}

impl Spelled {
    fn parse(&self, a: &Alphabet) -> Result<Word> {
        a.parse_word(&self.text).map_err(|e| Error::parse(self.line, 1, e.to_string()))
    }
}

fn word_list(f: Option<&Field>) -> Vec<Spelled> {
    match f {
        Some(f) if !f.value.is_empty() => f
            .value
            .split(',')
            .map(|s| Spelled {
                text: s.trim().to_string(),
                line: f.line,
            })
            .collect(),
        _ => Vec::new(),
    }
}

#[derive(Clone, Debug)]
pub struct EdgeDef {
    pub name: String,
    pub from: String,
    pub to: String,
    pub group: Box<GroupDef>,
    pub alpha: Vec<Spelled>,
    pub omega: Vec<Spelled>,
}

#[derive(Clone, Debug)]
pub enum PartnerDef {
    Abelian { free: Vec<String>, torsion: Vec<(String, u64)> },
    FreeCommutative(Vec<String>),
    FreeMonoid(Vec<String>),
}

/// A parsed definition with references resolved.
#[derive(Clone, Debug)]
pub enum GroupDef {
    Free {
        name: String,
        generators: Vec<String>,
    },
    Finite {
        name: String,
        table: Vec<Vec<usize>>,
        generators: Vec<String>,
        assign: Vec<usize>,
    },
    Abelian {
        name: String,
        free: Vec<String>,
        torsion: Vec<(String, u64)>,
    },
    Overgroup {
        name: String,
        sub: Box<GroupDef>,
        generators: Vec<String>,
        reps: Vec<Spelled>,
        /// Per coset: letter name, target coset, rewrite.
        cosets: Vec<Vec<(String, usize, Spelled)>>,
        line: usize,
    },
    GraphOfGroups {
        name: String,
        base: String,
        vertices: Vec<(String, GroupDef)>,
        edges: Vec<EdgeDef>,
    },
    Product {
        name: String,
        free: Vec<String>,
        partner: PartnerDef,
    },
}

impl GroupDef {
    pub fn name(&self) -> &str {
        match self {
            GroupDef::Free { name, .. }
            | GroupDef::Finite { name, .. }
            | GroupDef::Abelian { name, .. }
            | GroupDef::Overgroup { name, .. }
            | GroupDef::GraphOfGroups { name, .. }
            | GroupDef::Product { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GroupDef::Free { .. } => "free",
            GroupDef::Finite { .. } => "finite",
            GroupDef::Abelian { .. } => "abelian",
            GroupDef::Overgroup { .. } => "overgroup",
            GroupDef::GraphOfGroups { .. } => "graph_of_groups",
            GroupDef::Product { .. } => "product",
        }
    }
}

/// Reads a definition file down to its root definition. Unsupported
/// compositions are rejected here, before anything is built.
pub fn parse_group_file(text: &str) -> Result<GroupDef> {
    let (top, blocks) = parse_blocks(text)?;
    let mut defs: HashMap<String, GroupDef> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut referenced: HashSet<String> = HashSet::new();
    for b in &blocks {
        let name = b.name.clone().ok_or_else(|| b.err(format!("`{}` block needs a name", b.kind)))?;
        if defs.contains_key(&name) {
            return Err(b.err(format!("`{name}` is declared twice")));
        }
        let def = {
            let mut lookup = |f: &Field| -> Result<GroupDef> {
                referenced.insert(f.value.clone());
                defs.get(&f.value)
                    .cloned()
                    .ok_or_else(|| Error::parse(f.line, f.column, format!("undeclared group `{}`", f.value)))
            };
            parse_def(b, name.clone(), &mut lookup)?
        };
        order.push(name.clone());
        defs.insert(name, def);
    }
    for f in &top {
        if f.key != "root" {
            return Err(Error::parse(f.line, f.column, format!("unexpected top-level key `{}`", f.key)));
        }
    }
    let root = match top.iter().find(|f| f.key == "root") {
        Some(f) => defs
            .get(&f.value)
            .cloned()
            .ok_or_else(|| Error::parse(f.line, f.column, format!("undeclared group `{}`", f.value)))?,
        None => {
            let free: Vec<&String> = order.iter().filter(|n| !referenced.contains(*n)).collect();
            match free.as_slice() {
                [one] => defs[*one].clone(),
                [] => return Err(Error::parse(1, 1, "no group definitions")),
                _ => {
                    let names: Vec<&str> = free.iter().map(|s| s.as_str()).collect();
                    return Err(Error::parse(
                        1,
                        1,
                        format!("several candidate roots ({}); add `root = <name>`", names.join(", ")),
                    ));
                }
            }
        }
    };
    Ok(root)
}

fn finite_table(b: &Block) -> Result<Vec<Vec<usize>>> {
    if let Some(f) = b.get("cyclic") {
        let n: usize = number(f, &f.value)?;
        if n == 0 {
            return Err(Error::parse(f.line, f.column, "cyclic order must be positive"));
        }
        return Ok((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect());
    }
    let rows: Vec<Vec<usize>> = b
        .fields
        .iter()
        .filter(|f| f.key == "row")
        .map(|f| f.value.split_whitespace().map(|s| number(f, s)).collect())
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Err(b.err("finite group needs `cyclic` or `row` lines"));
    }
    Ok(rows)
}

fn parse_def(b: &Block, name: String, lookup: &mut dyn FnMut(&Field) -> Result<GroupDef>) -> Result<GroupDef> {
    match b.kind.as_str() {
        "free" => {
            b.check_keys(&["generators"], &[])?;
            Ok(GroupDef::Free {
                name,
                generators: b.names("generators"),
            })
        }
        "finite" => {
            b.check_keys(&["cyclic", "row", "generators", "assign"], &[])?;
            let generators = b.names("generators");
            let given: Vec<(String, usize)> = match b.get("assign") {
                Some(f) => pairs(f)?,
                None => Vec::new(),
            };
            let assign = generators
                .iter()
                .map(|g| {
                    given
                        .iter()
                        .find(|(n, _)| n == g)
                        .map(|&(_, e)| e)
                        .ok_or_else(|| b.err(format!("generator `{g}` has no assigned element")))
                })
                .collect::<Result<_>>()?;
            if let Some((n, _)) = given.iter().find(|(n, _)| !generators.contains(n)) {
                return Err(b.err(format!("`{n}` is assigned but not a generator")));
            }
            Ok(GroupDef::Finite {
                name,
                table: finite_table(b)?,
                generators,
                assign,
            })
        }
        "abelian" => {
            b.check_keys(&["free", "torsion"], &[])?;
            Ok(GroupDef::Abelian {
                name,
                free: b.names("free"),
                torsion: match b.get("torsion") {
                    Some(f) => pairs(f)?,
                    None => Vec::new(),
                },
            })
        }
        "overgroup" => {
            b.check_keys(&["subgroup", "generators", "reps"], &["coset"])?;
            let sub = lookup(b.require("subgroup")?)?;
            let reps = word_list(b.get("reps"));
            let mut cosets = vec![None; reps.len()];
            for c in &b.blocks {
                let idx: usize = c
                    .name
                    .as_deref()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| c.err("coset blocks are named by their index"))?;
                if idx >= cosets.len() {
                    return Err(c.err(format!("coset {idx} out of range for {} reps", reps.len())));
                }
                if cosets[idx].is_some() {
                    return Err(c.err(format!("coset {idx} given twice")));
                }
                let mut row = Vec::new();
                for f in &c.fields {
                    let (t, w) = f
                        .value
                        .split_once(':')
                        .ok_or_else(|| Error::parse(f.line, f.column, "expected `<coset> : <word>`"))?;
                    row.push((
                        f.key.clone(),
                        number(f, t)?,
                        Spelled {
                            text: w.trim().to_string(),
                            line: f.line,
                        },
                    ));
                }
                cosets[idx] = Some(row);
            }
            let cosets = cosets
                .into_iter()
                .enumerate()
                .map(|(i, c)| c.ok_or_else(|| b.err(format!("coset {i} has no block"))))
                .collect::<Result<_>>()?;
            Ok(GroupDef::Overgroup {
                name,
                sub: Box::new(sub),
                generators: b.names("generators"),
                reps,
                cosets,
                line: b.line,
            })
        }
        "hnn" => {
            b.check_keys(&["base", "stable", "associated", "in", "out"], &[])?;
            let base = lookup(b.require("base")?)?;
            let assoc = finite_ref(lookup, b.require("associated")?)?;
            let stable = b.require("stable")?.value.clone();
            Ok(GroupDef::GraphOfGroups {
                name,
                base: base.name().to_string(),
                vertices: vec![(base.name().to_string(), base)],
                edges: vec![EdgeDef {
                    from: String::new(),
                    to: String::new(),
                    name: stable,
                    group: Box::new(assoc),
                    alpha: word_list(b.get("in")),
                    omega: word_list(b.get("out")),
                }],
            }
            .with_loop_endpoints())
        }
        "amalgam" => {
            b.check_keys(&["left", "right", "sub", "left_embedding", "right_embedding"], &[])?;
            let left = lookup(b.require("left")?)?;
            let right = lookup(b.require("right")?)?;
            let sub = finite_ref(lookup, b.require("sub")?)?;
            let (ln, rn) = ("left".to_string(), "right".to_string());
            Ok(GroupDef::GraphOfGroups {
                name,
                base: ln.clone(),
                vertices: vec![(ln.clone(), left), (rn.clone(), right)],
                edges: vec![EdgeDef {
                    name: "~y".into(),
                    from: ln,
                    to: rn,
                    group: Box::new(sub),
                    alpha: word_list(b.get("left_embedding")),
                    omega: word_list(b.get("right_embedding")),
                }],
            })
        }
        "graph_of_groups" => {
            b.check_keys(&["base"], &["vertex", "edge"])?;
            let mut vertices = Vec::new();
            let mut edges = Vec::new();
            for c in &b.blocks {
                let cname = c.name.clone().ok_or_else(|| c.err(format!("`{}` block needs a name", c.kind)))?;
                if c.kind == "vertex" {
                    c.check_keys(&["group"], &[])?;
                    vertices.push((cname, lookup(c.require("group")?)?));
                } else {
                    c.check_keys(&["from", "to", "group", "alpha", "omega"], &[])?;
                    edges.push(EdgeDef {
                        name: cname,
                        from: c.require("from")?.value.clone(),
                        to: c.require("to")?.value.clone(),
                        group: Box::new(finite_ref(lookup, c.require("group")?)?),
                        alpha: word_list(c.get("alpha")),
                        omega: word_list(c.get("omega")),
                    });
                }
            }
            Ok(GroupDef::GraphOfGroups {
                name,
                base: b.require("base")?.value.clone(),
                vertices,
                edges,
            })
        }
        "product" => {
            b.check_keys(&["free", "partner", "generators", "torsion"], &[])?;
            let free = b.names("free");
            let pf = b.require("partner")?;
            let gens = b.names("generators");
            let torsion: Vec<(String, u64)> = match b.get("torsion") {
                Some(f) => pairs(f)?,
                None => Vec::new(),
            };
            let partner = match pf.value.as_str() {
                "abelian" => PartnerDef::Abelian { free: gens, torsion },
                "free_commutative" => PartnerDef::FreeCommutative(gens),
                "free_monoid" => PartnerDef::FreeMonoid(gens),
                "free" => {
                    if free.len() >= 2 && gens.len() >= 2 {
                        return Err(Error::Unsupported(format!(
                            "`{name}` is a direct product of two non-abelian free groups, which has \
                             undecidable subgroup membership (and so undecidable rational subset membership)"
                        )));
                    }
                    // a free group of rank at most one is abelian
                    if gens.len() <= 1 {
                        PartnerDef::Abelian { free: gens, torsion }
                    } else {
                        return Ok(GroupDef::Product {
                            name,
                            free: gens,
                            partner: PartnerDef::Abelian { free, torsion },
                        });
                    }
                }
                other => {
                    return Err(Error::parse(pf.line, pf.column, format!("unknown partner kind `{other}`")));
                }
            };
            Ok(GroupDef::Product { name, free, partner })
        }
        other => Err(b.err(format!("unknown group kind `{other}`"))),
    }
}

fn finite_ref(lookup: &mut dyn FnMut(&Field) -> Result<GroupDef>, f: &Field) -> Result<GroupDef> {
    let d = lookup(f)?;
    if !matches!(d, GroupDef::Finite { .. }) {
        return Err(Error::parse(f.line, f.column, format!("`{}` must be a finite group", f.value)));
    }
    Ok(d)
}

impl GroupDef {
    fn with_loop_endpoints(mut self) -> GroupDef {
        if let GroupDef::GraphOfGroups { base, edges, .. } = &mut self {
            for e in edges {
                e.from = base.clone();
                e.to = base.clone();
            }
        }
        self
    }
}

/// The built decider of a definition.
#[derive(Clone, Debug)]
pub enum Built {
    Group(GroupDecider),
    Monoid(MonoidDecider),
}

impl Built {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Built::Group(d) => d.alphabet(),
            Built::Monoid(d) => d.alphabet(),
        }
    }

    pub fn group(&self) -> Option<&GroupDecider> {
        match self {
            Built::Group(d) => Some(d),
            Built::Monoid(_) => None,
        }
    }

    pub fn member(&self, r: &crate::automata::Nfa, w: &Word) -> Result<bool> {
        match self {
            Built::Group(d) => d.member(r, w),
            Built::Monoid(d) => d.member(r, w),
        }
    }
}

fn finite_group(def: &GroupDef) -> Result<FiniteGroup> {
    match def {
        GroupDef::Finite { table, .. } => FiniteGroup::new(table.clone()),
        _ => Err(Error::Invalid(format!("`{}` is not a finite group", def.name()))),
    }
}

fn group_of(def: &GroupDef, limits: Limits) -> Result<GroupDecider> {
    build(def, limits)?
        .group()
        .cloned()
        .ok_or_else(|| Error::Invalid(format!("`{}` is a monoid, not a group", def.name())))
}

pub fn build(def: &GroupDef, limits: Limits) -> Result<Built> {
    match def {
        GroupDef::Free { generators, .. } => Ok(Built::Group(free_group_decider_with(
            &InvolutiveAlphabet::from_generators(generators)?,
            limits,
        )?)),
        GroupDef::Finite {
            table,
            generators,
            assign,
            ..
        } => {
            let g = FiniteGroup::new(table.clone())?;
            let gens = InvolutiveAlphabet::from_generators(generators)?;
            let mut letters = vec![0; gens.len()];
            for (name, &e) in generators.iter().zip(assign) {
                if e >= g.order() {
                    return Err(Error::Invalid(format!("element {e} out of range for `{name}`")));
                }
                let l = gens.alphabet().letter(name)?;
                letters[l.index()] = e;
                letters[gens.inverse(l).index()] = g.inverse(e);
            }
            Ok(Built::Group(finite_group_decider(&g, &gens, &letters)?))
        }
        GroupDef::Abelian { free, torsion, .. } => {
            Ok(Built::Group(abelian_group_decider_named(free, torsion, limits)?))
        }
        GroupDef::Overgroup { sub, .. } => {
            let sd = group_of(sub, limits)?;
            let t = coset_table(def, &sd)?;
            Ok(Built::Group(overgroup_decider(&sd, &t)?))
        }
        GroupDef::GraphOfGroups { .. } => {
            Ok(Built::Group(graph_of_groups_decider_with(&graph_of_groups(def, limits)?, limits)?))
        }
        GroupDef::Product { free, partner, .. } => {
            let partner = match partner {
                PartnerDef::Abelian { free, torsion } => Partner::Abelian {
                    free: free.clone(),
                    torsion: torsion.clone(),
                },
                PartnerDef::FreeCommutative(g) => Partner::FreeCommutative(g.clone()),
                PartnerDef::FreeMonoid(g) => Partner::FreeMonoid(Alphabet::new(g)?),
            };
            let spec = ProductSpec {
                free: InvolutiveAlphabet::from_generators(free)?,
                partner,
            };
            Ok(match product_with_free_group_decider_with(&spec, limits)? {
                ProductDecider::Group(d) => Built::Group(d),
                ProductDecider::Monoid(d) => Built::Monoid(d),
            })
        }
    }
}

fn coset_table(def: &GroupDef, sub: &GroupDecider) -> Result<CosetTable> {
    let GroupDef::Overgroup {
        generators,
        reps,
        cosets,
        line,
        ..
    } = def
    else {
        unreachable!("coset table of a non-overgroup")
    };
    let over = InvolutiveAlphabet::from_generators(generators)?;
    let oa = over.alphabet();
    let reps = reps.iter().map(|s| s.parse(oa)).collect::<Result<Vec<_>>>()?;
    let mut action = Vec::new();
    let mut rewrite = Vec::new();
    for (i, row) in cosets.iter().enumerate() {
        let mut act = vec![usize::MAX; oa.len()];
        let mut rw = vec![Word::empty(); oa.len()];
        for (letter, target, w) in row {
            let l = oa.letter(letter).map_err(|e| Error::parse(w.line, 1, e.to_string()))?;
            act[l.index()] = *target;
            rw[l.index()] = w.parse(sub.alphabet())?;
        }
        if let Some(missing) = oa.letters().find(|l| act[l.index()] == usize::MAX) {
            return Err(Error::parse(
                *line,
                1,
                format!("coset {i} has no entry for `{}`", oa.name(missing)),
            ));
        }
        action.push(act);
        rewrite.push(rw);
    }
    CosetTable::new(sub.generators(), &over, reps, action, rewrite)
}

fn graph_of_groups(def: &GroupDef, limits: Limits) -> Result<GraphOfGroups> {
    let GroupDef::GraphOfGroups {
        base, vertices, edges, ..
    } = def
    else {
        unreachable!("graph of a non-graph definition")
    };
    let index = |v: &str| {
        vertices
            .iter()
            .position(|(n, _)| n == v)
            .ok_or_else(|| Error::Invalid(format!("unknown vertex `{v}`")))
    };
    let mut vs = Vec::new();
    for (n, d) in vertices {
        vs.push(GogVertex {
            name: n.clone(),
            decider: group_of(d, limits)?,
        });
    }
    let mut es = Vec::new();
    for e in edges {
        let (from, to) = (index(&e.from)?, index(&e.to)?);
        let words = |list: &[Spelled], v: usize| -> Result<Vec<Word>> {
            list.iter().map(|s| s.parse(vs[v].decider.alphabet())).collect()
        };
        es.push(GogEdge {
            name: e.name.clone(),
            from,
            to,
            group: finite_group(&e.group)?,
            alpha: words(&e.alpha, from)?,
            omega: words(&e.omega, to)?,
        });
    }
    if vertices.len() == 2 && edges.len() == 1 && edges[0].name == "~y" {
        let e = es.pop().expect("one edge");
        return Ok(amalgam_graph(&vs[0].decider, &vs[1].decider, &e.group, e.alpha, e.omega));
    }
    Ok(GraphOfGroups::new(vs, es, index(base)?))
}

/// Every construction-time check of the definition and its parts, by name.
/// Structural problems become failed checks rather than errors where possible.
pub fn validate(def: &GroupDef, limits: Limits) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    validate_into(def, limits, &mut out)?;
    Ok(out)
}

fn validate_into(def: &GroupDef, limits: Limits, out: &mut Vec<CheckReport>) -> Result<()> {
    let tag = |s: &str| format!("{}: {s}", def.name());
    match def {
        GroupDef::Free { generators, .. } => {
            out.push(CheckReport::new(
                tag("generators form an involutive alphabet"),
                InvolutiveAlphabet::from_generators(generators).is_ok(),
            ));
        }
        GroupDef::Finite { .. } | GroupDef::Abelian { .. } | GroupDef::Product { .. } => {
            let r = build(def, limits);
            out.push(CheckReport::new(tag("definition is well formed"), r.is_ok()));
        }
        GroupDef::Overgroup {
            sub,
            generators,
            reps,
            cosets,
            ..
        } => {
            validate_into(sub, limits, out)?;
            let sd = group_of(sub, limits)?;
            let over = InvolutiveAlphabet::from_generators(generators)?;
            let oa = over.alphabet();
            let reps_w = reps.iter().map(|s| s.parse(oa)).collect::<Result<Vec<_>>>()?;
            let mut action = Vec::new();
            let mut rewrite = Vec::new();
            for row in cosets {
                let mut act = vec![usize::MAX; oa.len()];
                let mut rw = vec![Word::empty(); oa.len()];
                for (letter, target, w) in row {
                    let l = oa.letter(letter)?;
                    act[l.index()] = *target;
                    rw[l.index()] = w.parse(sd.alphabet())?;
                }
                action.push(act);
                rewrite.push(rw);
            }
            // build without the constructor's checks so failures can be listed
            let t = CosetTable::unchecked(sd.generators(), &over, reps_w, action, rewrite);
            let structure = t.structure_checks();
            let ok = structure.iter().all(|c| c.passed);
            out.extend(structure.into_iter().map(|c| CheckReport::new(tag(&c.name), c.passed)));
            if ok {
                out.extend(t.coherence(&sd)?.into_iter().map(|c| CheckReport::new(tag(&c.name), c.passed)));
            }
        }
        GroupDef::GraphOfGroups { vertices, .. } => {
            for (_, d) in vertices {
                validate_into(d, limits, out)?;
            }
            let g = graph_of_groups(def, limits)?;
            out.extend(g.validate().into_iter().map(|c| CheckReport::new(tag(&c.name), c.passed)));
        }
    }
    Ok(())
}

/// Parses and builds in one step.
pub fn load_group_file(text: &str, limits: Limits) -> Result<(GroupDef, Built)> {
    let def = parse_group_file(text)?;
    let built = build(&def, limits)?;
    Ok((def, built))
}
