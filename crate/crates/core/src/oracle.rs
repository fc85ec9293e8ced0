//! Brute-force reference semantics for testing the deciders.
//!
//! Nothing here calls into the deciders, saturation or the integer solver.
//! Elements are kept in normal forms computed directly from letter
//! interpretations, and exact answers come from closure computations over
//! automaton states.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::rewriting::MonadicSystem;
use crate::words::{Alphabet, Letter, Word};

/// How each letter of an alphabet acts. `None` entries are letters the
/// representation does not interpret (inside a product, the other factor's
/// letters).
#[derive(Clone, Debug)]
pub enum RepKind {
    /// Letter ↦ (generator, inverted).
    Free(Vec<Option<(u32, bool)>>),
    /// Letter ↦ vector; coordinates with a modulus are reduced.
    Abelian {
        letters: Vec<Option<Vec<i64>>>,
        moduli: Vec<Option<i64>>,
    },
    Finite {
        table: Vec<Vec<usize>>,
        letters: Vec<Option<usize>>,
    },
    /// Letter ↦ (factor, element) in a free product of finite groups.
    FreeProductOfFinites {
        tables: Vec<Vec<Vec<usize>>>,
        letters: Vec<Option<(usize, usize)>>,
    },
    FreeMonoid(Vec<Option<u32>>),
    Product(Box<RepKind>, Box<RepKind>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OracleRep {
    Free(Vec<(u32, bool)>),
    Abelian(Vec<i64>),
    Finite(usize),
    Syllables(Vec<(usize, usize)>),
    Word(Vec<u32>),
    Pair(Box<OracleRep>, Box<OracleRep>),
}

fn base_name(name: &str) -> (&str, bool) {
    match name.strip_suffix('\'') {
        Some(b) => (b, true),
        None => (name, false),
    }
}

impl RepKind {
    /// Letters `g` and `g'` for each named generator.
    pub fn free(a: &Alphabet, gens: &[&str]) -> RepKind {
        RepKind::Free(
            a.names()
                .iter()
                .map(|n| {
                    let (b, inv) = base_name(n);
                    gens.iter().position(|g| *g == b).map(|i| (i as u32, inv))
                })
                .collect(),
        )
    }

    /// `ℤ^r × ℤ/m …`: each named generator is a unit vector, primed is its
    /// negative.
    pub fn abelian(a: &Alphabet, free: &[&str], torsion: &[(&str, i64)]) -> RepKind {
        let k = free.len() + torsion.len();
        let coord = |b: &str| {
            free.iter()
                .position(|g| *g == b)
                .or_else(|| torsion.iter().position(|(g, _)| *g == b).map(|i| i + free.len()))
        };
        let letters = a
            .names()
            .iter()
            .map(|n| {
                let (b, inv) = base_name(n);
                coord(b).map(|i| {
                    let mut v = vec![0; k];
                    v[i] = if inv { -1 } else { 1 };
                    v
                })
            })
            .collect();
        let mut moduli = vec![None; free.len()];
        moduli.extend(torsion.iter().map(|&(_, m)| Some(m)));
        let mut r = RepKind::Abelian { letters, moduli };
        if let RepKind::Abelian { letters, moduli } = &mut r {
            for v in letters.iter_mut().flatten() {
                normalize(v, moduli);
            }
        }
        r
    }

    /// Letters assigned elements of a table group by name.
    pub fn finite(a: &Alphabet, table: Vec<Vec<usize>>, assign: &[(&str, usize)]) -> RepKind {
        let letters = a
            .names()
            .iter()
            .map(|n| assign.iter().find(|(m, _)| m == n).map(|&(_, e)| e))
            .collect();
        RepKind::Finite { table, letters }
    }

    /// `ℤ/n₁ ∗ ℤ/n₂ ∗ …`, generator `g` of order `n` with `g' = g^{n-1}`.
    pub fn cyclic_free_product(a: &Alphabet, factors: &[(&str, usize)]) -> RepKind {
        let tables = factors
            .iter()
            .map(|&(_, n)| (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect())
            .collect();
        let letters = a
            .names()
            .iter()
            .map(|name| {
                let (b, inv) = base_name(name);
                factors
                    .iter()
                    .position(|(g, _)| *g == b)
                    .map(|i| (i, if inv { factors[i].1 - 1 } else { 1 % factors[i].1 }))
            })
            .collect();
        RepKind::FreeProductOfFinites { tables, letters }
    }

    pub fn free_monoid(a: &Alphabet, letters: &[&str]) -> RepKind {
        RepKind::FreeMonoid(
            a.names()
                .iter()
                .map(|n| letters.iter().position(|l| l == n).map(|i| i as u32))
                .collect(),
        )
    }

    pub fn product(left: RepKind, right: RepKind) -> RepKind {
        RepKind::Product(Box::new(left), Box::new(right))
    }

    pub fn interprets(&self, l: Letter) -> bool {
        let i = l.index();
        match self {
            RepKind::Free(m) => m.get(i).is_some_and(Option::is_some),
            RepKind::Abelian { letters, .. } => letters.get(i).is_some_and(Option::is_some),
            RepKind::Finite { letters, .. } => letters.get(i).is_some_and(Option::is_some),
            RepKind::FreeProductOfFinites { letters, .. } => letters.get(i).is_some_and(Option::is_some),
            RepKind::FreeMonoid(m) => m.get(i).is_some_and(Option::is_some),
            RepKind::Product(a, b) => a.interprets(l) || b.interprets(l),
        }
    }

    pub fn identity(&self) -> OracleRep {
        match self {
            RepKind::Free(_) => OracleRep::Free(Vec::new()),
            RepKind::Abelian { moduli, .. } => OracleRep::Abelian(vec![0; moduli.len()]),
            RepKind::Finite { .. } => OracleRep::Finite(0),
            RepKind::FreeProductOfFinites { .. } => OracleRep::Syllables(Vec::new()),
            RepKind::FreeMonoid(_) => OracleRep::Word(Vec::new()),
            RepKind::Product(a, b) => OracleRep::Pair(Box::new(a.identity()), Box::new(b.identity())),
        }
    }

    /// `x · l`; letters this representation ignores leave `x` unchanged.
    fn push(&self, x: &mut OracleRep, l: Letter) {
        let i = l.index();
        match (self, x) {
            (RepKind::Free(m), OracleRep::Free(v)) => {
                if let Some(Some((g, inv))) = m.get(i) {
                    push_free(v, (*g, *inv));
                }
            }
            (RepKind::Abelian { letters, moduli }, OracleRep::Abelian(v)) => {
                if let Some(Some(d)) = letters.get(i) {
                    for (a, b) in v.iter_mut().zip(d) {
                        *a += b;
                    }
                    normalize(v, moduli);
                }
            }
            (RepKind::Finite { table, letters }, OracleRep::Finite(e)) => {
                if let Some(Some(g)) = letters.get(i) {
                    *e = table[*e][*g];
                }
            }
            (RepKind::FreeProductOfFinites { tables, letters }, OracleRep::Syllables(v)) => {
                if let Some(Some((f, e))) = letters.get(i) {
                    push_syllable(tables, v, (*f, *e));
                }
            }
            (RepKind::FreeMonoid(m), OracleRep::Word(v)) => {
                if let Some(Some(c)) = m.get(i) {
                    v.push(*c);
                }
            }
            (RepKind::Product(a, b), OracleRep::Pair(x, y)) => {
                a.push(x, l);
                b.push(y, l);
            }
            _ => unreachable!("representation kind and value disagree"),
        }
    }

    /// `x · y`.
    pub fn combine(&self, x: &OracleRep, y: &OracleRep) -> OracleRep {
        match (self, x, y) {
            (RepKind::Free(_), OracleRep::Free(a), OracleRep::Free(b)) => {
                let mut v = a.clone();
                for &s in b {
                    push_free(&mut v, s);
                }
                OracleRep::Free(v)
            }
            (RepKind::Abelian { moduli, .. }, OracleRep::Abelian(a), OracleRep::Abelian(b)) => {
                let mut v: Vec<i64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                normalize(&mut v, moduli);
                OracleRep::Abelian(v)
            }
            (RepKind::Finite { table, .. }, OracleRep::Finite(a), OracleRep::Finite(b)) => OracleRep::Finite(table[*a][*b]),
            (RepKind::FreeProductOfFinites { tables, .. }, OracleRep::Syllables(a), OracleRep::Syllables(b)) => {
                let mut v = a.clone();
                for &s in b {
                    push_syllable(tables, &mut v, s);
                }
                OracleRep::Syllables(v)
            }
            (RepKind::FreeMonoid(_), OracleRep::Word(a), OracleRep::Word(b)) => {
                OracleRep::Word(a.iter().chain(b).copied().collect())
            }
            (RepKind::Product(k1, k2), OracleRep::Pair(a1, a2), OracleRep::Pair(b1, b2)) => {
                OracleRep::Pair(Box::new(k1.combine(a1, b1)), Box::new(k2.combine(a2, b2)))
            }
            _ => unreachable!("representation kind and value disagree"),
        }
    }
}

fn push_free(v: &mut Vec<(u32, bool)>, s: (u32, bool)) {
    if v.last() == Some(&(s.0, !s.1)) {
        v.pop();
    } else {
        v.push(s);
    }
}

fn push_syllable(tables: &[Vec<Vec<usize>>], v: &mut Vec<(usize, usize)>, (f, e): (usize, usize)) {
    if e == 0 {
        return;
    }
    match v.last_mut() {
        Some((g, x)) if *g == f => {
            *x = tables[f][*x][e];
            if *x == 0 {
                v.pop();
            }
        }
        _ => v.push((f, e)),
    }
}

fn normalize(v: &mut [i64], moduli: &[Option<i64>]) {
    for (x, m) in v.iter_mut().zip(moduli) {
        if let Some(m) = m {
            *x = x.rem_euclid(*m);
        }
    }
}

/// Normal form of the element `w` represents.
pub fn evaluate(kind: &RepKind, w: &Word) -> Result<OracleRep> {
    let mut x = kind.identity();
    for &l in w.letters() {
        if !kind.interprets(l) {
            return Err(Error::UnknownLetter(format!("letter {} has no interpretation", l.0)));
        }
        kind.push(&mut x, l);
    }
    Ok(x)
}

/// Elements of accepted words of length at most `max_len`.
pub fn bfs_members(r: &Nfa, kind: &RepKind, max_len: usize) -> Result<BTreeSet<OracleRep>> {
    let mut best: HashMap<(usize, OracleRep), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let start = (r.initial(), kind.identity());
    best.insert(start.clone(), 0);
    queue.push_back((start, 0usize));
    let mut out = BTreeSet::new();
    while let Some(((s, x), d)) = queue.pop_front() {
        if best.get(&(s, x.clone())).is_some_and(|&b| b < d) {
            continue;
        }
        if r.is_final(s) {
            out.insert(x.clone());
        }
        for &(l, t) in r.edges_from(s) {
            let (y, nd) = match l {
                None => (x.clone(), d),
                Some(l) => {
                    if !kind.interprets(l) {
                        return Err(Error::UnknownLetter(format!("letter {} has no interpretation", l.0)));
                    }
                    let mut y = x.clone();
                    kind.push(&mut y, l);
                    (y, d + 1)
                }
            };
            if nd > max_len {
                continue;
            }
            let key = (t, y);
            if best.get(&key).is_none_or(|&b| nd < b) {
                best.insert(key.clone(), nd);
                if nd == d {
                    queue.push_front((key, nd));
                } else {
                    queue.push_back((key, nd));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certified {
    Member,
    NonMember,
    Unknown,
}

/// Exact answer when a finite argument applies:
///
/// * finite groups: the reachable (state, element) pairs;
/// * free groups, free monoids and products of a free group with a partner
///   whose letters all have positive weight under some sign pattern on the
///   coordinates: pairs of states joined by a path with freely trivial label,
///   tagged by the partner value, which stays bounded by the target's weight;
/// * free products of finite groups: pairs of states joined by a path whose
///   label lies in a single factor, tagged by that element.
///
/// Anything else is `Unknown`.
pub fn certified_nonmember(r: &Nfa, kind: &RepKind, target: &OracleRep) -> Result<Certified> {
    Ok(certify_all(r, kind, std::slice::from_ref(target))?[0])
}

/// [`certified_nonmember`] for many targets, sharing the path closure.
pub fn certify_all(r: &Nfa, kind: &RepKind, targets: &[OracleRep]) -> Result<Vec<Certified>> {
    for l in r.letters_used() {
        if !kind.interprets(l) {
            return Err(Error::UnknownLetter(format!("letter {} has no interpretation", l.0)));
        }
    }
    let r = r.trim();
    let verdict = |b: bool| if b { Certified::Member } else { Certified::NonMember };
    match kind {
        RepKind::Finite { table, letters } => Ok(targets
            .iter()
            .map(|t| match t {
                OracleRep::Finite(t) => verdict(finite_reach(&r, table, letters, *t)),
                _ => Certified::Unknown,
            })
            .collect()),
        RepKind::FreeProductOfFinites { tables, letters } => Ok(targets
            .iter()
            .map(|t| match t {
                OracleRep::Syllables(t) => verdict(syllable_reach(&r, tables, letters, t)),
                _ => Certified::Unknown,
            })
            .collect()),
        _ => {
            let split: Vec<Option<(Vec<(u32, bool)>, Option<OracleRep>)>> =
                targets.iter().map(|t| split_free(kind, t)).collect();
            let parts: Vec<&Option<OracleRep>> = split.iter().flatten().map(|(_, p)| p).collect();
            let Some(p) = BoundedPartner::new(&r, kind, &parts) else {
                return Ok(vec![Certified::Unknown; targets.len()]);
            };
            let paths = trivial_paths(&r, kind, &p);
            Ok(split
                .iter()
                .map(|s| match s {
                    Some((free, part)) => verdict(read_target(&r, &paths, &p, free, &p.value_of(part))),
                    None => Certified::Unknown,
                })
                .collect())
        }
    }
}

fn finite_reach(r: &Nfa, table: &[Vec<usize>], letters: &[Option<usize>], t: usize) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![(r.initial(), 0usize)];
    seen.insert((r.initial(), 0));
    while let Some((s, e)) = stack.pop() {
        if e == t && r.is_final(s) {
            return true;
        }
        for &(l, d) in r.edges_from(s) {
            let f = l.map_or(e, |l| table[e][letters[l.index()].expect("interpreted")]);
            if seen.insert((d, f)) {
                stack.push((d, f));
            }
        }
    }
    false
}

/// `E(p, q, (f, e))`: some path `p → q` evaluates to the single-factor element
/// `e` of factor `f` (identity is `(usize::MAX, 0)`).
fn syllable_reach(r: &Nfa, tables: &[Vec<Vec<usize>>], letters: &[Option<(usize, usize)>], t: &[(usize, usize)]) -> bool {
    const ONE: (usize, usize) = (usize::MAX, 0);
    let n = r.num_states();
    let mul = |a: (usize, usize), b: (usize, usize)| -> Option<(usize, usize)> {
        if a == ONE {
            return Some(b);
        }
        if b == ONE {
            return Some(a);
        }
        if a.0 != b.0 {
            return None;
        }
        let e = tables[a.0][a.1][b.1];
        Some(if e == 0 { ONE } else { (a.0, e) })
    };
    let mut rel: HashSet<(usize, usize, (usize, usize))> = HashSet::new();
    let mut queue = VecDeque::new();
    let add = |x: (usize, usize, (usize, usize)), rel: &mut HashSet<_>, queue: &mut VecDeque<_>| {
        if rel.insert(x) {
            queue.push_back(x);
        }
    };
    for p in 0..n {
        add((p, p, ONE), &mut rel, &mut queue);
        for &(l, q) in r.edges_from(p) {
            let v = match l {
                None => ONE,
                Some(l) => {
                    let (f, e) = letters[l.index()].expect("interpreted");
                    if e == 0 {
                        ONE
                    } else {
                        (f, e)
                    }
                }
            };
            add((p, q, v), &mut rel, &mut queue);
        }
    }
    while let Some((p, q, v)) = queue.pop_front() {
        let right: Vec<_> = rel.iter().filter(|&&(a, _, _)| a == q).copied().collect();
        for (_, r2, w) in right {
            if let Some(x) = mul(v, w) {
                add((p, r2, x), &mut rel, &mut queue);
            }
        }
        let left: Vec<_> = rel.iter().filter(|&&(_, b, _)| b == p).copied().collect();
        for (p0, _, w) in left {
            if let Some(x) = mul(w, v) {
                add((p0, q, x), &mut rel, &mut queue);
            }
        }
    }
    let mut cur: HashSet<usize> = HashSet::from([r.initial()]);
    if t.is_empty() {
        return rel.iter().any(|&(p, q, v)| p == r.initial() && v == ONE && r.is_final(q));
    }
    for &syl in t {
        cur = rel
            .iter()
            .filter(|&&(p, _, v)| cur.contains(&p) && v == syl)
            .map(|&(_, q, _)| q)
            .collect();
    }
    cur.iter().any(|&q| r.is_final(q))
}

/// Splits a target into its free-group letters and the rest.
fn split_free(kind: &RepKind, target: &OracleRep) -> Option<(Vec<(u32, bool)>, Option<OracleRep>)> {
    match (kind, target) {
        (RepKind::Free(_), OracleRep::Free(v)) => Some((v.clone(), None)),
        (RepKind::Abelian { .. }, OracleRep::Abelian(_)) | (RepKind::FreeMonoid(_), OracleRep::Word(_)) => {
            Some((Vec::new(), Some(target.clone())))
        }
        (RepKind::Product(a, b), OracleRep::Pair(x, y)) => match (a.as_ref(), b.as_ref()) {
            (RepKind::Free(_), RepKind::Abelian { .. } | RepKind::FreeMonoid(_)) => match x.as_ref() {
                OracleRep::Free(v) => Some((v.clone(), Some((**y).clone()))),
                _ => None,
            },
            (RepKind::Abelian { .. } | RepKind::FreeMonoid(_), RepKind::Free(_)) => match y.as_ref() {
                OracleRep::Free(v) => Some((v.clone(), Some((**x).clone()))),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

/// The non-free factor, with partial values capped so that only finitely many
/// occur. Every partner letter has positive weight, so a path's weight bounds
/// the weight of each of its pieces.
struct BoundedPartner {
    /// Letter ↦ value, for partner letters.
    values: Vec<Option<Value>>,
    zero: Value,
    admit: Admit,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Value {
    Unit,
    Vec(Vec<i64>),
    Word(Vec<u32>),
}

enum Admit {
    Any,
    /// `Σ sign_i v_i` at most the cap.
    Weight(Vec<i64>, i64),
    /// Word length at most the cap.
    Length(usize),
}

impl BoundedPartner {
    fn new(r: &Nfa, kind: &RepKind, parts: &[&Option<OracleRep>]) -> Option<BoundedPartner> {
        let partner = match kind {
            RepKind::Product(a, b) => {
                if matches!(a.as_ref(), RepKind::Free(_)) {
                    Some(b.as_ref())
                } else {
                    Some(a.as_ref())
                }
            }
            RepKind::Free(_) => None,
            k => Some(k),
        };
        let n = r.alphabet().len();
        match partner {
            None => Some(BoundedPartner {
                values: vec![None; n],
                zero: Value::Unit,
                admit: Admit::Any,
            }),
            Some(RepKind::FreeMonoid(m)) => {
                let cap = parts
                    .iter()
                    .filter_map(|p| match p {
                        Some(OracleRep::Word(t)) => Some(t.len()),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(0);
                Some(BoundedPartner {
                    values: (0..n).map(|i| m.get(i).copied().flatten().map(|c| Value::Word(vec![c]))).collect(),
                    zero: Value::Word(Vec::new()),
                    admit: Admit::Length(cap),
                })
            }
            Some(RepKind::Abelian { letters, moduli }) => {
                if moduli.iter().any(Option::is_some) {
                    return None;
                }
                let used: Vec<&Vec<i64>> = r
                    .letters_used()
                    .into_iter()
                    .filter_map(|l| letters.get(l.index()).and_then(Option::as_ref))
                    .collect();
                let k = moduli.len();
                (0..(1u32 << k)).find_map(|mask| {
                    let sign: Vec<i64> = (0..k).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
                    let weight = |v: &[i64]| v.iter().zip(&sign).map(|(a, b)| a * b).sum::<i64>();
                    let cap = parts
                        .iter()
                        .filter_map(|p| match p {
                            Some(OracleRep::Abelian(t)) => Some(weight(t)),
                            _ => None,
                        })
                        .max()
                        .unwrap_or(0);
                    used.iter().all(|v| weight(v) > 0).then(|| BoundedPartner {
                        values: (0..n).map(|i| letters.get(i).cloned().flatten().map(Value::Vec)).collect(),
                        zero: Value::Vec(vec![0; k]),
                        admit: Admit::Weight(sign.clone(), cap),
                    })
                })
            }
            _ => None,
        }
    }

    fn zero(&self) -> Value {
        self.zero.clone()
    }

    fn value_of(&self, part: &Option<OracleRep>) -> Value {
        match part {
            Some(OracleRep::Abelian(v)) => Value::Vec(v.clone()),
            Some(OracleRep::Word(w)) => Value::Word(w.clone()),
            _ => Value::Unit,
        }
    }

    fn add(&self, a: &Value, b: &Value) -> Option<Value> {
        let v = match (a, b) {
            (Value::Unit, Value::Unit) => Value::Unit,
            (Value::Vec(x), Value::Vec(y)) => Value::Vec(x.iter().zip(y).map(|(p, q)| p + q).collect()),
            (Value::Word(x), Value::Word(y)) => Value::Word(x.iter().chain(y).copied().collect()),
            _ => return None,
        };
        self.admissible(&v).then_some(v)
    }

    fn admissible(&self, v: &Value) -> bool {
        match (&self.admit, v) {
            (Admit::Any, _) => true,
            (Admit::Weight(sign, cap), Value::Vec(x)) => x.iter().zip(sign).map(|(a, b)| a * b).sum::<i64>() <= *cap,
            (Admit::Length(cap), Value::Word(x)) => x.len() <= *cap,
            _ => false,
        }
    }
}

type FreeEdge = (usize, (u32, bool), usize);

/// For each state, the states reachable by a freely trivial path with the
/// partner value read along it, plus the free-letter edges. Trivial paths are
/// closed under concatenation and under wrapping with an edge `x` and a later
/// edge `x'`.
fn trivial_paths(r: &Nfa, kind: &RepKind, p: &BoundedPartner) -> (Vec<Vec<(usize, Value)>>, Vec<FreeEdge>) {
    let free_of = |l: Letter| -> Option<(u32, bool)> {
        match kind {
            RepKind::Free(m) => m[l.index()],
            RepKind::Product(a, b) => match (a.as_ref(), b.as_ref()) {
                (RepKind::Free(m), _) | (_, RepKind::Free(m)) => m[l.index()],
                _ => None,
            },
            _ => None,
        }
    };
    let n = r.num_states();
    type Triple = (usize, usize, Value);
    let mut rel: HashSet<Triple> = HashSet::new();
    let mut from: Vec<Vec<(usize, Value)>> = vec![Vec::new(); n];
    let mut into: Vec<Vec<(usize, Value)>> = vec![Vec::new(); n];
    let mut queue: VecDeque<Triple> = VecDeque::new();
    let mut free_edges: Vec<FreeEdge> = Vec::new();
    let add = |t: Triple, rel: &mut HashSet<Triple>, from: &mut Vec<Vec<(usize, Value)>>, into: &mut Vec<Vec<(usize, Value)>>, queue: &mut VecDeque<Triple>| {
        if rel.insert(t.clone()) {
            from[t.0].push((t.1, t.2.clone()));
            into[t.1].push((t.0, t.2.clone()));
            queue.push_back(t);
        }
    };
    for s in 0..n {
        add((s, s, p.zero()), &mut rel, &mut from, &mut into, &mut queue);
        for &(l, d) in r.edges_from(s) {
            match l {
                None => add((s, d, p.zero()), &mut rel, &mut from, &mut into, &mut queue),
                Some(l) => match free_of(l) {
                    Some(g) => free_edges.push((s, g, d)),
                    None => {
                        if let Some(v) = &p.values[l.index()] {
                            if p.admissible(v) {
                                add((s, d, v.clone()), &mut rel, &mut from, &mut into, &mut queue);
                            }
                        } else {
                            // letter ignored by both factors acts trivially
                            add((s, d, p.zero()), &mut rel, &mut from, &mut into, &mut queue);
                        }
                    }
                },
            }
        }
    }
    while let Some((a, b, v)) = queue.pop_front() {
        for (c, w) in from[b].clone() {
            if let Some(x) = p.add(&v, &w) {
                add((a, c, x), &mut rel, &mut from, &mut into, &mut queue);
            }
        }
        for (z, w) in into[a].clone() {
            if let Some(x) = p.add(&w, &v) {
                add((z, b, x), &mut rel, &mut from, &mut into, &mut queue);
            }
        }
        for &(s, g, d) in &free_edges {
            if d != a {
                continue;
            }
            for &(s2, g2, d2) in &free_edges {
                if s2 == b && g2 == (g.0, !g.1) {
                    add((s, d2, v.clone()), &mut rel, &mut from, &mut into, &mut queue);
                }
            }
        }
    }
    (from, free_edges)
}

fn read_target(
    r: &Nfa,
    (from, free_edges): &(Vec<Vec<(usize, Value)>>, Vec<FreeEdge>),
    p: &BoundedPartner,
    free_target: &[(u32, bool)],
    target: &Value,
) -> bool {
    // read the reduced free target, gluing trivial segments in between
    let mut cur: HashSet<(usize, Value)> = from[r.initial()].iter().cloned().collect();
    for &g in free_target {
        let mut next = HashSet::new();
        for (s, v) in &cur {
            for &(s0, g0, d) in free_edges {
                if s0 != *s || g0 != g {
                    continue;
                }
                for (e, w) in &from[d] {
                    if let Some(x) = p.add(v, w) {
                        next.insert((*e, x));
                    }
                }
            }
        }
        cur = next;
    }
    cur.iter().any(|(s, v)| r.is_final(*s) && v == target)
}

/// Words of length at most `max_len` obtainable from `L(r)` by deleting
/// factors `x x'`, where `kind` is a free representation of every letter `r`
/// uses. A word `d` is such a descendant iff some accepted word factors as
/// `u₀ d₁ u₁ … d_k u_k` with each `u_i` freely trivial.
pub fn free_descendants(r: &Nfa, kind: &RepKind, max_len: usize) -> Result<BTreeSet<Word>> {
    let RepKind::Free(m) = kind else {
        return Err(Error::Invalid("descendants need a free representation".into()));
    };
    for l in r.letters_used() {
        if !kind.interprets(l) {
            return Err(Error::UnknownLetter(format!("letter {} has no interpretation", l.0)));
        }
    }
    let p = BoundedPartner::new(r, kind, &[]).expect("free representation");
    let (from, free_edges) = trivial_paths(r, kind, &p);
    let close = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
        set.iter().flat_map(|&s| from[s].iter().map(|(q, _)| *q)).collect()
    };
    let letters: Vec<Letter> = r.alphabet().letters().filter(|&l| kind.interprets(l)).collect();
    let mut out = BTreeSet::new();
    let mut stack = vec![(Vec::new(), close(&BTreeSet::from([r.initial()])))];
    while let Some((w, set)) = stack.pop() {
        if set.iter().any(|&s| r.is_final(s)) {
            out.insert(Word(w.clone()));
        }
        if w.len() == max_len {
            continue;
        }
        for &l in &letters {
            let g = m[l.index()].expect("interpreted");
            let step: BTreeSet<usize> = free_edges
                .iter()
                .filter(|&&(s, h, _)| h == g && set.contains(&s))
                .map(|&(_, _, d)| d)
                .collect();
            let next = close(&step);
            if !next.is_empty() {
                let mut w2 = w.clone();
                w2.push(l);
                stack.push((w2, next));
            }
        }
    }
    Ok(out)
}

/// Membership of `w` in the subgroup generated by `subgens`, by folding the
/// flower graph of the generators. `kind` must be a free representation.
pub fn stallings_member(kind: &RepKind, subgens: &[Word], w: &Word) -> Result<bool> {
    let RepKind::Free(_) = kind else {
        return Err(Error::Invalid("folding needs a free representation".into()));
    };
    let reduce = |u: &Word| -> Result<Vec<(u32, bool)>> {
        match evaluate(kind, u)? {
            OracleRep::Free(v) => Ok(v),
            _ => unreachable!(),
        }
    };
    // edges stored one way per (generator, direction); inverse edges implicit
    let mut parent: Vec<usize> = vec![0];
    let mut edges: Vec<(usize, u32, usize)> = Vec::new();
    for u in subgens {
        let v = reduce(u)?;
        if v.is_empty() {
            continue;
        }
        let mut cur = 0;
        for (i, &(g, inv)) in v.iter().enumerate() {
            let next = if i + 1 == v.len() {
                0
            } else {
                parent.push(parent.len());
                parent.len() - 1
            };
            if inv {
                edges.push((next, g, cur));
            } else {
                edges.push((cur, g, next));
            }
            cur = next;
        }
    }
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let n = parent[y];
            parent[y] = r;
            y = n;
        }
        r
    }
    loop {
        let mut changed = false;
        let mut out: HashMap<(usize, u32), usize> = HashMap::new();
        let mut inn: HashMap<(usize, u32), usize> = HashMap::new();
        for i in 0..edges.len() {
            let (s, g, d) = edges[i];
            let (s, d) = (find(&mut parent, s), find(&mut parent, d));
            if let Some(&d2) = out.get(&(s, g)) {
                let d2 = find(&mut parent, d2);
                if d2 != d {
                    parent[d2] = d;
                    changed = true;
                }
            } else {
                out.insert((s, g), d);
            }
            let d = find(&mut parent, d);
            let s = find(&mut parent, s);
            if let Some(&s2) = inn.get(&(d, g)) {
                let s2 = find(&mut parent, s2);
                if s2 != s {
                    parent[s2] = s;
                    changed = true;
                }
            } else {
                inn.insert((d, g), s);
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: HashMap<(usize, u32), usize> = HashMap::new();
    let mut inn: HashMap<(usize, u32), usize> = HashMap::new();
    for i in 0..edges.len() {
        let (s, g, d) = edges[i];
        let (s, d) = (find(&mut parent, s), find(&mut parent, d));
        out.insert((s, g), d);
        inn.insert((d, g), s);
    }
    let mut cur = find(&mut parent, 0);
    for (g, inv) in reduce(w)? {
        let step = if inv { inn.get(&(cur, g)) } else { out.get(&(cur, g)) };
        match step {
            Some(&n) => cur = find(&mut parent, n),
            None => return Ok(false),
        }
    }
    Ok(cur == find(&mut parent, 0))
}

/// Every word reachable from `start` in at most `max_depth` rewriting steps,
/// trying each factor against each rule set with a membership query.
pub fn derivation_search(system: &MonadicSystem, start: &Word, max_depth: usize) -> Result<BTreeSet<Word>> {
    let mut seen: BTreeSet<Word> = BTreeSet::from([start.clone()]);
    let mut frontier = vec![start.clone()];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for u in &frontier {
            let l = u.letters();
            for i in 0..=l.len() {
                for j in i..=l.len() {
                    let factor = Word(l[i..j].to_vec());
                    for (x, rule) in system.rules() {
                        if !rule.contains(&factor)? {
                            continue;
                        }
                        let mut v = l[..i].to_vec();
                        v.extend(x);
                        v.extend_from_slice(&l[j..]);
                        let v = Word(v);
                        if seen.insert(v.clone()) {
                            next.push(v);
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen)
}
