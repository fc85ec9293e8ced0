//! Fundamental groups of finite graphs of groups with finite edge groups.
//!
//! Words over the disjoint union `B` of the (extended) vertex alphabets and
//! the edge letters are rewritten by three rule families: vertex words equal
//! to 1 vanish, `y y'` vanishes, and `y w y'` collapses to the letter naming
//! the element of `G_{α(y)}` that `w` matches through the edge group. The
//! ancestors of `{ε}` then meet the cycle-type words exactly in the words
//! representing 1.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::rewriting::{ancestors_rid_with, MonadicSystem, SaturationOptions};
use crate::rid::{rid_regular, RidLanguage};
use crate::words::{invert_word, Alphabet, InvolutiveAlphabet, Letter, Morphism, Word};

use super::base::FiniteGroup;
use super::overgroup::extend_generators;
use super::{wp_rid, CheckReport, GroupDecider, Limits};

#[derive(Clone, Debug)]
pub struct GogVertex {
    pub name: String,
    pub decider: GroupDecider,
}

/// An edge orbit `{y, y'}` from `from` to `to`. `alpha[g - 1]` and
/// `omega[g - 1]` are the images of edge-group element `g ≥ 1` in the
/// endpoint groups; the identity maps to the empty word.
#[derive(Clone, Debug)]
pub struct GogEdge {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub group: FiniteGroup,
    pub alpha: Vec<Word>,
    pub omega: Vec<Word>,
}

#[derive(Clone, Debug)]
pub struct GraphOfGroups {
    vertices: Vec<GogVertex>,
    edges: Vec<GogEdge>,
    base: usize,
}

/// Layout of `B`: per vertex the extended alphabet and its offset, then the
/// edge letters.
struct Layout {
    b: InvolutiveAlphabet,
    offsets: Vec<usize>,
    extras: Vec<Vec<(String, Word)>>,
    edge_base: usize,
}

impl GraphOfGroups {
    pub fn new(vertices: Vec<GogVertex>, edges: Vec<GogEdge>, base: usize) -> GraphOfGroups {
        GraphOfGroups { vertices, edges, base }
    }

    pub fn vertices(&self) -> &[GogVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GogEdge] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    fn edge_letter(&self, i: usize, reversed: bool) -> String {
        if reversed {
            format!("{}'", self.edges[i].name)
        } else {
            self.edges[i].name.clone()
        }
    }

    /// Every structural and embedding check, in a fixed order.
    pub fn validate(&self) -> Vec<CheckReport> {
        let mut out = vec![CheckReport::new("graph is non-empty", !self.vertices.is_empty())];
        out.push(CheckReport::new("base vertex exists", self.base < self.vertices.len()));
        let ends_ok = self.edges.iter().all(|e| e.from < self.vertices.len() && e.to < self.vertices.len());
        out.push(CheckReport::new("edge endpoints exist", ends_ok));
        if !ends_ok || self.vertices.is_empty() || self.base >= self.vertices.len() {
            return out;
        }
        out.push(CheckReport::new(
            "edge involution is fixed-point free and reverses orientation",
            self.edges.iter().all(|e| !e.name.ends_with('\'')),
        ));
        out.push(CheckReport::new("letter names are disjoint", self.layout().is_ok()));
        out.push(CheckReport::new("graph is connected", self.tree().is_some()));
        for e in &self.edges {
            for (side, v, words) in [("alpha", e.from, &e.alpha), ("omega", e.to, &e.omega)] {
                let d = &self.vertices[v].decider;
                let label = format!("edge `{}` {side} embedding", e.name);
                let shape = words.len() + 1 == e.group.order() && words.iter().all(|w| d.alphabet().check_word(w).is_ok());
                out.push(CheckReport::new(format!("{label}: defined on every non-identity element"), shape));
                if !shape {
                    continue;
                }
                let img = |g: usize| if g == 0 { Word::empty() } else { words[g - 1].clone() };
                let mut hom = Some(true);
                let mut inj = Some(true);
                'outer: for g in 0..e.group.order() {
                    for h in 0..e.group.order() {
                        match d.equal(&img(g).concat(&img(h)), &img(e.group.mul(g, h))) {
                            Ok(true) => {}
                            Ok(false) => {
                                hom = Some(false);
                                break 'outer;
                            }
                            Err(_) => {
                                hom = None;
                                break 'outer;
                            }
                        }
                    }
                }
                for g in 1..e.group.order() {
                    match d.is_identity(&img(g)) {
                        Ok(false) => {}
                        Ok(true) => {
                            inj = Some(false);
                            break;
                        }
                        Err(_) => {
                            inj = None;
                            break;
                        }
                    }
                }
                out.push(CheckReport::new(format!("{label}: homomorphism"), hom == Some(true)));
                out.push(CheckReport::new(format!("{label}: injective"), inj == Some(true)));
            }
        }
        out
    }

    /// Breadth-first spanning tree from the base; `parent[v]` is the edge
    /// orbit and orientation used to enter `v`. `None` if disconnected.
    fn tree(&self) -> Option<Vec<Option<(usize, bool)>>> {
        let n = self.vertices.len();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[self.base] = true;
        let mut queue = VecDeque::from([self.base]);
        while let Some(u) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                for (reversed, a, b) in [(false, e.from, e.to), (true, e.to, e.from)] {
                    if a == u && !seen[b] {
                        seen[b] = true;
                        parent[b] = Some((i, reversed));
                        queue.push_back(b);
                    }
                }
            }
        }
        seen.iter().all(|&s| s).then_some(parent)
    }

    /// Fresh letters per vertex naming each non-identity element of every
    /// incident edge-group image.
    fn extras(&self) -> Vec<Vec<(String, Word)>> {
        let mut extras = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            for g in 1..e.group.order() {
                extras[e.from].push((format!("{}~a{g}", e.name), e.alpha.get(g - 1).cloned().unwrap_or_default()));
            }
            for g in 1..e.group.order() {
                extras[e.to].push((format!("{}~w{g}", e.name), e.omega.get(g - 1).cloned().unwrap_or_default()));
            }
        }
        extras
    }

    fn layout(&self) -> Result<Layout> {
        let extras = self.extras();
        let mut names = Vec::new();
        let mut inv = Vec::new();
        let mut offsets = Vec::new();
        for (v, vert) in self.vertices.iter().enumerate() {
            let off = names.len();
            offsets.push(off);
            let g = vert.decider.generators();
            names.extend(g.alphabet().names().iter().cloned());
            inv.extend(g.alphabet().letters().map(|l| Letter((off + g.inverse(l).index()) as u32)));
            for (name, _) in &extras[v] {
                let k = names.len() as u32;
                names.push(name.clone());
                names.push(format!("{name}'"));
                inv.push(Letter(k + 1));
                inv.push(Letter(k));
            }
        }
        let edge_base = names.len();
        for i in 0..self.edges.len() {
            let k = names.len() as u32;
            names.push(self.edge_letter(i, false));
            names.push(self.edge_letter(i, true));
            inv.push(Letter(k + 1));
            inv.push(Letter(k));
        }
        let alphabet = Alphabet::new(names)?;
        Ok(Layout {
            b: InvolutiveAlphabet::with_involution(alphabet, inv)?,
            offsets,
            extras,
            edge_base,
        })
    }
}

/// Generators of `π₁` at the base: vertex generators conjugated along the
/// tree, and the edges outside the tree. `ρ` maps them to cycle-type words
/// over `B`.
pub fn fundamental_generators(gog: &GraphOfGroups) -> Result<(InvolutiveAlphabet, Morphism)> {
    let layout = gog.layout()?;
    fundamental_with(gog, &layout)
}

fn fundamental_with(gog: &GraphOfGroups, layout: &Layout) -> Result<(InvolutiveAlphabet, Morphism)> {
    let parent = gog
        .tree()
        .ok_or_else(|| Error::Invalid("graph of groups is not connected".into()))?;
    let b = &layout.b;
    let edge_letter = |i: usize, reversed: bool| Letter((layout.edge_base + 2 * i + usize::from(reversed)) as u32);
    let n = gog.vertices.len();
    let mut path: Vec<Option<Word>> = vec![None; n];
    path[gog.base] = Some(Word::empty());
    // tree paths, filled in breadth-first order
    let mut order: Vec<usize> = vec![gog.base];
    let mut k = 0;
    while k < order.len() {
        let u = order[k];
        k += 1;
        for v in 0..n {
            if path[v].is_none() {
                if let Some((i, rev)) = parent[v] {
                    let e = &gog.edges[i];
                    let src = if rev { e.to } else { e.from };
                    if src == u {
                        let p = path[u].clone().expect("parent first").concat(&Word(vec![edge_letter(i, rev)]));
                        path[v] = Some(p);
                        order.push(v);
                    }
                }
            }
        }
    }
    let path: Vec<Word> = path.into_iter().map(|p| p.expect("connected")).collect();
    let tree_edges: Vec<bool> = (0..gog.edges.len())
        .map(|i| parent.iter().any(|p| matches!(p, Some((j, _)) if *j == i)))
        .collect();
    let mut names = Vec::new();
    let mut images = Vec::new();
    for (v, vert) in gog.vertices.iter().enumerate() {
        let t = &path[v];
        let ti = invert_word(b, t);
        for l in vert.decider.alphabet().letters() {
            names.push(vert.decider.alphabet().name(l).to_string());
            let x = Word(vec![Letter((layout.offsets[v] + l.index()) as u32)]);
            images.push(t.concat(&x).concat(&ti));
        }
    }
    for (i, e) in gog.edges.iter().enumerate() {
        if tree_edges[i] {
            continue;
        }
        for (rev, a, z) in [(false, e.from, e.to), (true, e.to, e.from)] {
            names.push(gog.edge_letter(i, rev));
            let y = Word(vec![edge_letter(i, rev)]);
            images.push(path[a].concat(&y).concat(&invert_word(b, &path[z])));
        }
    }
    let x = InvolutiveAlphabet::from_letters(names)?;
    let rho = Morphism::new(x.alphabet().clone(), b.alphabet().clone(), images)?;
    Ok((x, rho))
}

pub fn graph_of_groups_decider(gog: &GraphOfGroups) -> Result<GroupDecider> {
    graph_of_groups_decider_with(gog, Limits::default())
}

/// The rewriting system whose ancestors of `ε` form the word problem of the
/// fundamental group over `b`, with `rho` mapping fundamental generators into
/// `b`.
pub struct GogSystem {
    pub gamma: MonadicSystem,
    pub b: InvolutiveAlphabet,
    pub x: InvolutiveAlphabet,
    pub rho: Morphism,
}

pub fn graph_of_groups_decider_with(gog: &GraphOfGroups, limits: Limits) -> Result<GroupDecider> {
    let GogSystem { gamma, b, x, rho } = graph_of_groups_system(gog)?;
    let ba = b.alphabet().clone();
    let eps = rid_regular(&Nfa::singleton(&ba, &Word::empty()));
    let opts = SaturationOptions {
        oracle_budget: limits.oracle_budget,
    };
    let wp = ancestors_rid_with(&eps, &gamma, opts)?;
    let names: Vec<&str> = gog.vertices.iter().map(|v| v.name.as_str()).collect();
    let desc = format!("pi1[{}; {} edges]", names.join(", "), gog.edges.len());
    Ok(GroupDecider::new(&x, desc, move |r: &Nfa, w: &Word| {
        let rr = r.relabel(&rho)?;
        let wr = rho.apply(w)?;
        wp.intersects(&rr.left_translate(&invert_word(&b, &wr))?)
    }))
}

pub fn graph_of_groups_system(gog: &GraphOfGroups) -> Result<GogSystem> {
    if let Some(c) = gog.validate().into_iter().find(|c| !c.passed) {
        return Err(Error::Invalid(format!("graph of groups: {} fails", c.name)));
    }
    let layout = gog.layout()?;
    let b = layout.b.clone();
    let ba = b.alphabet().clone();
    let ext: Vec<GroupDecider> = gog
        .vertices
        .iter()
        .zip(&layout.extras)
        .map(|(v, extra)| extend_generators(&v.decider, extra))
        .collect::<Result<_>>()?;

    // R over B, cut down to the block of vertex v and read over its alphabet
    let blocks: Arc<Vec<(usize, usize)>> = Arc::new(
        ext.iter()
            .zip(&layout.offsets)
            .map(|(d, &off)| (off, off + d.alphabet().len()))
            .collect(),
    );
    let localize = {
        let blocks = blocks.clone();
        let alphabets: Vec<Alphabet> = ext.iter().map(|d| d.alphabet().clone()).collect();
        Arc::new(move |r: &Nfa, v: usize| -> Nfa {
            let (lo, hi) = blocks[v];
            r.restrict_letters(|l| (lo..hi).contains(&l.index()))
                .trim()
                .recode(&alphabets[v], |l| Letter((l.index() - lo) as u32))
        })
    };

    let mut gamma = MonadicSystem::new(&ba);
    for (v, d) in ext.iter().enumerate() {
        let wp = wp_rid(d);
        let loc = localize.clone();
        gamma.add_rule(
            None,
            RidLanguage::new(&ba, format!("wp[{}]", gog.vertices[v].name), move |r: &Nfa| {
                wp.intersects(&loc(r, v))
            }),
        )?;
    }
    let mut pairs = Vec::new();
    for i in 0..gog.edges.len() {
        let y = Letter((layout.edge_base + 2 * i) as u32);
        pairs.push(Word(vec![y, b.inverse(y)]));
        pairs.push(Word(vec![b.inverse(y), y]));
    }
    if !pairs.is_empty() {
        gamma.add_rule(None, rid_regular(&Nfa::from_words(&ba, &pairs)).with_description("y y'"))?;
    }
    // y w y' → h, where w names in G_ω the element h names in G_α
    for (i, e) in gog.edges.iter().enumerate() {
        let y = Letter((layout.edge_base + 2 * i) as u32);
        for g in 1..e.group.order() {
            for primed in [false, true] {
                let suffix = if primed { "'" } else { "" };
                for (first, far, near_tag, far_tag) in [(y, e.to, 'a', 'w'), (b.inverse(y), e.from, 'w', 'a')]
                {
                    let h = ba.letter(&format!("{}~{near_tag}{g}{suffix}", e.name))?;
                    let target_name = format!("{}~{far_tag}{g}{suffix}", e.name);
                    let far_d = ext[far].clone();
                    let target = far_d.alphabet().parse_word(&target_name)?;
                    let loc = localize.clone();
                    let (pre, post) = (Word(vec![first]), Word(vec![b.inverse(first)]));
                    gamma.add_rule(
                        Some(h),
                        RidLanguage::new(&ba, format!("collapse[{target_name}]"), move |r: &Nfa| {
                            let inner = loc(&r.quotient(&pre, &post)?, far);
                            if inner.is_empty() {
                                return Ok(false);
                            }
                            far_d.member(&inner, &target)
                        }),
                    )?;
                }
            }
        }
    }

    let (x, rho) = fundamental_with(gog, &layout)?;
    Ok(GogSystem { gamma, b, x, rho })
}

/// One vertex with a loop `t`; `φ_in`, `φ_out` embed the associated group.
pub fn hnn_decider(
    base: &GroupDecider,
    assoc: &FiniteGroup,
    phi_in: Vec<Word>,
    phi_out: Vec<Word>,
    stable: &str,
) -> Result<GroupDecider> {
    let gog = GraphOfGroups::new(
        vec![GogVertex {
            name: base.description().to_string(),
            decider: base.clone(),
        }],
        vec![GogEdge {
            name: stable.to_string(),
            from: 0,
            to: 0,
            group: assoc.clone(),
            alpha: phi_in,
            omega: phi_out,
        }],
        0,
    );
    graph_of_groups_decider(&gog)
}

/// Two vertices joined by one edge orbit; the edge letter is internal.
pub fn amalgam_decider(
    left: &GroupDecider,
    right: &GroupDecider,
    sub: &FiniteGroup,
    phi_l: Vec<Word>,
    phi_r: Vec<Word>,
) -> Result<GroupDecider> {
    graph_of_groups_decider(&amalgam_graph(left, right, sub, phi_l, phi_r))
}

pub fn amalgam_graph(
    left: &GroupDecider,
    right: &GroupDecider,
    sub: &FiniteGroup,
    phi_l: Vec<Word>,
    phi_r: Vec<Word>,
) -> GraphOfGroups {
    GraphOfGroups::new(
        vec![
            GogVertex {
                name: left.description().to_string(),
                decider: left.clone(),
            },
            GogVertex {
                name: right.description().to_string(),
                decider: right.clone(),
            },
        ],
        vec![GogEdge {
            name: "~y".to_string(),
            from: 0,
            to: 1,
            group: sub.clone(),
            alpha: phi_l,
            omega: phi_r,
        }],
        0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::compile_str;
    use crate::groups::{element_order, finite_group_decider, free_group_decider, Order};

    fn cyclic(name: &str, n: usize) -> GroupDecider {
        let g = InvolutiveAlphabet::from_generators([name]).unwrap();
        let assign = [1 % n, (n - 1) % n];
        finite_group_decider(&FiniteGroup::cyclic(n).unwrap(), &g, &assign).unwrap()
    }

    fn z2_z3() -> GroupDecider {
        amalgam_decider(&cyclic("s", 2), &cyclic("t", 3), &FiniteGroup::trivial(), vec![], vec![]).unwrap()
    }

    fn trivial() -> GroupDecider {
        free_group_decider(&InvolutiveAlphabet::from_generators(Vec::<String>::new()).unwrap()).unwrap()
    }

    #[test]
    fn one_vertex_matches_vertex_group() {
        let t = InvolutiveAlphabet::from_generators(["t"]).unwrap();
        let f = free_group_decider(&t).unwrap();
        let gog = GraphOfGroups::new(vec![GogVertex { name: "F1".into(), decider: f.clone() }], vec![], 0);
        let d = graph_of_groups_decider(&gog).unwrap();
        let (x, rho) = fundamental_generators(&gog).unwrap();
        assert_eq!(x.alphabet().names(), t.alphabet().names());
        assert_eq!(rho.apply(&t.parse_word("t t'").unwrap()).unwrap().len(), 2);
        for (r, w) in [("t*", "t t"), ("t*", "t'"), ("(t t)* t'", "t"), ("t' t", "")] {
            let rq = compile_str(r, d.alphabet()).unwrap();
            let ww = d.alphabet().parse_word(w).unwrap();
            let rf = compile_str(r, f.alphabet()).unwrap();
            let wf = f.alphabet().parse_word(w).unwrap();
            assert_eq!(d.member(&rq, &ww).unwrap(), f.member(&rf, &wf).unwrap(), "{r} / {w}");
        }
    }

    #[test]
    fn tree_conjugates_far_generators() {
        let g = amalgam_graph(&cyclic("s", 2), &cyclic("t", 3), &FiniteGroup::trivial(), vec![], vec![]);
        let (x, rho) = fundamental_generators(&g).unwrap();
        let t = x.alphabet().letter("t").unwrap();
        assert_eq!(rho.target().spell(rho.image(t)), "~y t ~y'");
        let s = x.alphabet().letter("s").unwrap();
        assert_eq!(rho.target().spell(rho.image(s)), "s");
    }

    #[test]
    fn free_product_examples() {
        let d = z2_z3();
        let q = |s: &str| compile_str(s, d.alphabet()).unwrap();
        let w = |s: &str| d.alphabet().parse_word(s).unwrap();
        assert!(d.member(&q("(s t)*"), &w("s t s t")).unwrap());
        assert!(d.member(&q("(s t)*"), &w("s t")).unwrap());
        assert!(!d.member(&q("(s t)*"), &w("t s")).unwrap());
        assert!(d.member(&q("(s t)*"), &w("s s t t t")).unwrap());
        assert_eq!(element_order(&d, &w("s t")).unwrap(), Order::Infinite);
        assert_eq!(element_order(&d, &w("s")).unwrap(), Order::Finite(2));
        assert_eq!(element_order(&d, &w("t")).unwrap(), Order::Finite(3));
    }

    #[test]
    fn hnn_of_trivial_is_z() {
        let d = hnn_decider(&trivial(), &FiniteGroup::trivial(), vec![], vec![], "y").unwrap();
        let q = |s: &str| compile_str(s, d.alphabet()).unwrap();
        let w = |s: &str| d.alphabet().parse_word(s).unwrap();
        assert!(!d.member(&q("(y y)*"), &w("y")).unwrap());
        assert!(d.member(&q("y*"), &w("y y")).unwrap());
        assert!(d.member(&q("(y y)*"), &w("y y' y y")).unwrap());
    }

    #[test]
    fn hnn_over_z2() {
        let d = hnn_decider(&cyclic("s", 2), &FiniteGroup::trivial(), vec![], vec![], "y").unwrap();
        let q = |s: &str| compile_str(s, d.alphabet()).unwrap();
        let w = |s: &str| d.alphabet().parse_word(s).unwrap();
        assert!(d.member(&q("s y"), &w("s y")).unwrap());
        assert!(!d.member(&q("(s y)*"), &w("y s")).unwrap());
    }

    #[test]
    fn amalgam_over_z2() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let p = cyclic("p", 4);
        let q4 = cyclic("q", 4);
        let pw = p.alphabet().parse_word("p p").unwrap();
        let qw = q4.alphabet().parse_word("q q").unwrap();
        let d = amalgam_decider(&p, &q4, &z2, vec![pw], vec![qw]).unwrap();
        let q = |s: &str| compile_str(s, d.alphabet()).unwrap();
        let w = |s: &str| d.alphabet().parse_word(s).unwrap();
        assert!(d.member(&q("p p"), &w("q q")).unwrap());
        assert!(!d.member(&q("p"), &w("q")).unwrap());
        assert!(!d.member(&q("p q"), &w("q p")).unwrap());
        assert!(d.member(&q("p p q"), &w("q q q")).unwrap());
    }

    #[test]
    fn validation_catches_bad_embeddings() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let p = cyclic("p", 4);
        let q4 = cyclic("q", 4);
        // p⁴ = 1, so the embedding is not injective
        let bad = amalgam_graph(&p, &q4, &z2, vec![p.alphabet().parse_word("p p p p").unwrap()], vec![q4.alphabet().parse_word("q q").unwrap()]);
        let checks = bad.validate();
        assert!(checks.iter().any(|c| c.name.contains("alpha embedding: injective") && !c.passed));
        assert!(graph_of_groups_decider(&bad).is_err());
        // p is not of order 2
        let bad = amalgam_graph(&p, &q4, &z2, vec![p.alphabet().parse_word("p").unwrap()], vec![q4.alphabet().parse_word("q q").unwrap()]);
        assert!(bad.validate().iter().any(|c| c.name.contains("homomorphism") && !c.passed));
        let disconnected = GraphOfGroups::new(
            vec![
                GogVertex { name: "a".into(), decider: cyclic("s", 2) },
                GogVertex { name: "b".into(), decider: cyclic("t", 3) },
            ],
            vec![],
            0,
        );
        assert!(disconnected.validate().iter().any(|c| c.name == "graph is connected" && !c.passed));
        assert!(fundamental_generators(&disconnected).is_err());
        let clash = amalgam_graph(&cyclic("s", 2), &cyclic("s", 3), &FiniteGroup::trivial(), vec![], vec![]);
        assert!(graph_of_groups_decider(&clash).is_err());
    }
}
