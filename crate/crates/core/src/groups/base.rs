//! Free, finite and finitely generated abelian groups.

use std::collections::VecDeque;

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::grammars::{Cfg, IlpOptions, ParikhEncoding, Relation};
use crate::rewriting::{ancestors_rid_with, MonadicSystem, SaturationOptions};
use crate::rid::rid_regular;
use crate::words::{InvolutiveAlphabet, Letter, Word};

use super::{decider_from_wp_rid, GroupDecider, Limits};

pub fn free_group_decider(gens: &InvolutiveAlphabet) -> Result<GroupDecider> {
    free_group_decider_with(gens, Limits::default())
}

/// `W(F)` is the ancestor set of `{ε}` under free reduction.
pub fn free_group_decider_with(gens: &InvolutiveAlphabet, limits: Limits) -> Result<GroupDecider> {
    if !gens.is_fixed_point_free() {
        return Err(Error::InvalidAlphabet("free generators need a fixed-point-free involution".into()));
    }
    let eps = rid_regular(&Nfa::singleton(gens.alphabet(), &Word::empty()));
    let opts = SaturationOptions {
        oracle_budget: limits.oracle_budget,
    };
    let wp = ancestors_rid_with(&eps, &MonadicSystem::free_reduction(gens), opts)?;
    let names: Vec<&str> = gens.generators().into_iter().map(|l| gens.alphabet().name(l)).collect();
    let wp = wp.with_description(format!("free({})", names.join(", ")));
    decider_from_wp_rid(&wp, gens)
}

/// A group given by its multiplication table; element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::Invalid("multiplication table must be square over 0..n".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row[0] != i || table[0][i] != i {
                return Err(Error::Invalid(format!("0 is not an identity for element {i}")));
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for (i, row) in table.iter().enumerate() {
            match row.iter().position(|&x| x == 0) {
                Some(j) if table[j][i] == 0 => inverse[i] = j,
                _ => return Err(Error::Invalid(format!("element {i} has no two-sided inverse"))),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Invalid(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, inverse })
    }

    /// `ℤ/n` with `i · j = i + j mod n`.
    pub fn cyclic(n: usize) -> Result<FiniteGroup> {
        FiniteGroup::new((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect())
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup::cyclic(1).expect("trivial group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

/// Evaluates words and subsets by walking the multiplication table.
pub fn finite_group_decider(g: &FiniteGroup, gens: &InvolutiveAlphabet, assign: &[usize]) -> Result<GroupDecider> {
    if assign.len() != gens.len() {
        return Err(Error::DimensionMismatch {
            expected: gens.len(),
            got: assign.len(),
        });
    }
    for x in gens.alphabet().letters() {
        let e = assign[x.index()];
        if e >= g.order() {
            return Err(Error::Invalid(format!("element {e} outside the group")));
        }
        if assign[gens.inverse(x).index()] != g.inverse(e) {
            return Err(Error::Invalid(format!(
                "`{}` and its inverse letter are not assigned inverse elements",
                gens.alphabet().name(x)
            )));
        }
    }
    let mut seen = vec![false; g.order()];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(a) = queue.pop_front() {
        for &e in assign {
            let b = g.mul(a, e);
            if !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    if seen.contains(&false) {
        return Err(Error::Invalid("assigned elements do not generate the group".into()));
    }
    let (g2, assign) = (g.clone(), assign.to_vec());
    Ok(GroupDecider::new(gens, format!("finite(order {})", g.order()), move |r: &Nfa, w: &Word| {
        let target = w.letters().iter().fold(0, |acc, l| g2.mul(acc, assign[l.index()]));
        let n = g2.order();
        let mut seen = vec![false; r.num_states() * n];
        let start = r.initial() * n;
        seen[start] = true;
        let mut stack = vec![(r.initial(), 0usize)];
        while let Some((s, e)) = stack.pop() {
            if e == target && r.is_final(s) {
                return Ok(true);
            }
            for &(l, d) in r.edges_from(s) {
                let f = l.map_or(e, |l| g2.mul(e, assign[l.index()]));
                if !seen[d * n + f] {
                    seen[d * n + f] = true;
                    stack.push((d, f));
                }
            }
        }
        Ok(false)
    }))
}

/// Coordinates of a finitely generated abelian group on a letter set: each
/// coordinate has a positive and a negative letter, and a modulus for
/// torsion coordinates.
#[derive(Clone, Debug)]
pub(crate) struct AbelianCoords {
    pub coords: Vec<(Letter, Letter, Option<u64>)>,
}

impl AbelianCoords {
    pub fn evaluate(&self, w: &Word) -> Vec<i64> {
        self.coords
            .iter()
            .map(|&(p, n, m)| {
                let v = w.letters().iter().map(|&l| i64::from(l == p) - i64::from(l == n)).sum::<i64>();
                match m {
                    Some(m) => v.rem_euclid(m as i64),
                    None => v,
                }
            })
            .collect()
    }

    /// Adds rows forcing the counted letters to evaluate to `target`.
    /// `letter_index` maps a coordinate letter to its terminal index.
    pub fn constrain(
        &self,
        enc: &mut ParikhEncoding,
        target: &[i64],
        letter_index: impl Fn(Letter) -> usize,
    ) -> Result<()> {
        for (&(p, n, m), &t) in self.coords.iter().zip(target) {
            let mut row = enc.terminal_counts[letter_index(p)].clone();
            row.extend(enc.terminal_counts[letter_index(n)].iter().map(|&(v, c)| (v, -c)));
            if let Some(m) = m {
                let m = m as i64;
                let up = enc.instance.add_var();
                let down = enc.instance.add_var();
                row.push((up, -m));
                row.push((down, m));
            }
            enc.instance.add(row, Relation::Eq, t)?;
        }
        Ok(())
    }
}

pub fn abelian_group_decider(free_rank: usize, torsion: &[u64]) -> Result<GroupDecider> {
    let free: Vec<String> = (1..=free_rank).map(|i| format!("e{i}")).collect();
    let tors: Vec<(String, u64)> = torsion.iter().enumerate().map(|(i, &m)| (format!("f{}", i + 1), m)).collect();
    abelian_group_decider_named(&free, &tors, Limits::default())
}

/// `ℤ^r × ℤ/m₁ × … ` with generator names chosen by the caller. Membership
/// is integer feasibility of edge-use counts of the subset automaton.
pub fn abelian_group_decider_named(free: &[String], torsion: &[(String, u64)], limits: Limits) -> Result<GroupDecider> {
    let names: Vec<&str> = free.iter().map(String::as_str).chain(torsion.iter().map(|(n, _)| n.as_str())).collect();
    if let Some((n, m)) = torsion.iter().find(|(_, m)| *m < 2) {
        return Err(Error::Invalid(format!("torsion order of `{n}` is {m}, must be at least 2")));
    }
    let gens = InvolutiveAlphabet::from_generators(&names)?;
    let mods = std::iter::repeat(None)
        .take(free.len())
        .chain(torsion.iter().map(|&(_, m)| Some(m)));
    let coords = AbelianCoords {
        coords: names
            .iter()
            .zip(mods)
            .map(|(n, m)| {
                let p = gens.alphabet().lookup(n).expect("declared");
                (p, gens.inverse(p), m)
            })
            .collect(),
    };
    let mut desc = vec![format!("Z^{}", free.len())];
    desc.extend(torsion.iter().map(|(_, m)| format!("Z/{m}")));
    let ilp = IlpOptions {
        node_budget: limits.ilp_budget,
    };
    Ok(GroupDecider::new(&gens, format!("abelian({})", desc.join(" x ")), move |r: &Nfa, w: &Word| {
        let r = r.trim();
        if r.is_empty() {
            return Ok(false);
        }
        let target = coords.evaluate(w);
        let mut enc = ParikhEncoding::new(&Cfg::from_nfa(&r));
        coords.constrain(&mut enc, &target, |l| l.index())?;
        Ok(enc.solve(ilp)?.is_some())
    }))
}
