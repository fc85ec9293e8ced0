//! Direct products `F × P` of a free group with an abelian group, a free
//! commutative monoid or a free monoid.
//!
//! A subset automaton over the joint alphabet is read as an automaton over
//! `F × P*`: shifting by the inverse of the free part of the target makes
//! the question whether some accepted path has trivial free label and
//! partner label equal to the partner part. The partner labels of such
//! paths form a context-free language.

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::grammars::{cfg_empty, cfg_member, fautomaton_to_cfg, FAutomaton, IlpOptions, ParikhEncoding, Relation};
use crate::words::{free_reduce, invert_word, Alphabet, InvolutiveAlphabet, Letter, Word};

use super::base::AbelianCoords;
use super::{GroupDecider, Limits, MonoidDecider};

#[derive(Clone, Debug)]
pub enum Partner {
    /// `ℤ^r × ℤ/m₁ × …` with the given generator names.
    Abelian {
        free: Vec<String>,
        torsion: Vec<(String, u64)>,
    },
    FreeCommutative(Vec<String>),
    FreeMonoid(Alphabet),
}

impl Partner {
    /// Generators `e1 …` and `f1 …`.
    pub fn abelian(free_rank: usize, torsion: &[u64]) -> Partner {
        Partner::Abelian {
            free: (1..=free_rank).map(|i| format!("e{i}")).collect(),
            torsion: torsion.iter().enumerate().map(|(i, &m)| (format!("f{}", i + 1), m)).collect(),
        }
    }

    /// Generators `c1 …`.
    pub fn free_commutative(rank: usize) -> Partner {
        Partner::FreeCommutative((1..=rank).map(|i| format!("c{i}")).collect())
    }
}

#[derive(Clone, Debug)]
pub struct ProductSpec {
    pub free: InvolutiveAlphabet,
    pub partner: Partner,
}

#[derive(Clone, Debug)]
pub enum ProductDecider {
    Group(GroupDecider),
    Monoid(MonoidDecider),
}

impl ProductDecider {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            ProductDecider::Group(d) => d.alphabet(),
            ProductDecider::Monoid(d) => d.alphabet(),
        }
    }

    pub fn member(&self, r: &Nfa, w: &Word) -> Result<bool> {
        match self {
            ProductDecider::Group(d) => d.member(r, w),
            ProductDecider::Monoid(d) => d.member(r, w),
        }
    }

    pub fn into_group(self) -> Option<GroupDecider> {
        match self {
            ProductDecider::Group(d) => Some(d),
            ProductDecider::Monoid(_) => None,
        }
    }

    pub fn into_monoid(self) -> MonoidDecider {
        match self {
            ProductDecider::Group(d) => d.as_monoid(),
            ProductDecider::Monoid(d) => d,
        }
    }
}

enum PartnerCheck {
    Abelian(AbelianCoords),
    Commutative,
    Words,
}

pub fn product_with_free_group_decider(spec: &ProductSpec) -> Result<ProductDecider> {
    product_with_free_group_decider_with(spec, Limits::default())
}

pub fn product_with_free_group_decider_with(spec: &ProductSpec, limits: Limits) -> Result<ProductDecider> {
    let free = spec.free.clone();
    if !free.is_fixed_point_free() {
        return Err(Error::InvalidAlphabet("free generators need a fixed-point-free involution".into()));
    }
    let kf = free.len();
    let mut names: Vec<String> = free.alphabet().names().to_vec();
    let (partner, check, group, desc) = match &spec.partner {
        Partner::Abelian { free: zs, torsion } => {
            if let Some((n, m)) = torsion.iter().find(|(_, m)| *m < 2) {
                return Err(Error::Invalid(format!("torsion order of `{n}` is {m}, must be at least 2")));
            }
            let base: Vec<&str> = zs.iter().map(String::as_str).chain(torsion.iter().map(|(n, _)| n.as_str())).collect();
            let inv = InvolutiveAlphabet::from_generators(&base)?;
            let mods = std::iter::repeat(None)
                .take(zs.len())
                .chain(torsion.iter().map(|&(_, m)| Some(m)));
            let coords = base
                .iter()
                .zip(mods)
                .map(|(n, m)| {
                    let p = inv.alphabet().lookup(n).expect("declared");
                    (p, inv.inverse(p), m)
                })
                .collect();
            let mut parts = vec![format!("Z^{}", zs.len())];
            parts.extend(torsion.iter().map(|(_, m)| format!("Z/{m}")));
            let desc = parts.join(" x ");
            (inv.alphabet().clone(), PartnerCheck::Abelian(AbelianCoords { coords }), Some(inv), desc)
        }
        Partner::FreeCommutative(cs) => (Alphabet::new(cs.clone())?, PartnerCheck::Commutative, None, format!("N^{}", cs.len())),
        Partner::FreeMonoid(a) => (a.clone(), PartnerCheck::Words, None, format!("{{{a}}}*")),
    };
    names.extend(partner.names().iter().cloned());
    let joint = Alphabet::new(names).map_err(|e| Error::InvalidAlphabet(format!("free and partner letters overlap: {e}")))?;
    let ilp = IlpOptions {
        node_budget: limits.ilp_budget,
    };
    let free_names: Vec<&str> = free.generators().into_iter().map(|l| free.alphabet().name(l)).collect();
    let desc = format!("F({}) x {desc}", free_names.join(", "));

    let (free2, partner2) = (free.clone(), partner.clone());
    let member = move |r: &Nfa, w: &Word| -> Result<bool> {
        let (fw, pw): (Vec<Letter>, Vec<Letter>) = w.letters().iter().partition(|l| l.index() < kf);
        let g = free_reduce(&free2, &Word(fw));
        let m = Word(pw.into_iter().map(|l| Letter((l.index() - kf) as u32)).collect());
        let shifted = r.left_translate(&invert_word(&free2, &g))?.trim();
        if shifted.is_empty() {
            return Ok(false);
        }
        let edges = shifted
            .edges()
            .map(|(s, l, d)| match l {
                None => (s, Word::empty(), Word::empty(), d),
                Some(l) if l.index() < kf => (s, Word(vec![l]), Word::empty(), d),
                Some(l) => (s, Word::empty(), Word(vec![Letter((l.index() - kf) as u32)]), d),
            })
            .collect();
        let p = FAutomaton::new(
            &free2,
            &partner2,
            shifted.num_states(),
            shifted.initial(),
            shifted.finals().to_vec(),
            edges,
        )?;
        let cfg = fautomaton_to_cfg(&p);
        if cfg_empty(&cfg) {
            return Ok(false);
        }
        match &check {
            PartnerCheck::Words => Ok(cfg_member(&cfg, &m)),
            PartnerCheck::Commutative => {
                let mut enc = ParikhEncoding::new(&cfg);
                for t in 0..partner2.len() {
                    let count = m.letters().iter().filter(|l| l.index() == t).count() as i64;
                    let row = enc.terminal_counts[t].clone();
                    enc.instance.add(row, Relation::Eq, count)?;
                }
                Ok(enc.solve(ilp)?.is_some())
            }
            PartnerCheck::Abelian(coords) => {
                let mut enc = ParikhEncoding::new(&cfg);
                coords.constrain(&mut enc, &coords.evaluate(&m), |l| l.index())?;
                Ok(enc.solve(ilp)?.is_some())
            }
        }
    };
    match group {
        Some(inv) => {
            let mut all = Vec::with_capacity(joint.len());
            all.extend(free.alphabet().letters().map(|l| free.inverse(l)));
            all.extend(inv.alphabet().letters().map(|l| Letter((inv.inverse(l).index() + kf) as u32)));
            let gens = InvolutiveAlphabet::with_involution(joint, all)?;
            Ok(ProductDecider::Group(GroupDecider::new(&gens, desc, member)))
        }
        None => Ok(ProductDecider::Monoid(MonoidDecider::new(&joint, desc, member))),
    }
}
