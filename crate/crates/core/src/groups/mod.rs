//! Rational subset membership deciders for groups and monoids, and the
//! constructions that build new deciders from old ones.

use std::fmt;
use std::sync::Arc;

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::rid::RidLanguage;
use crate::words::{invert_word, Alphabet, InvolutiveAlphabet, Word};

mod base;
mod gog;
mod overgroup;
mod product;

pub use base::{
    abelian_group_decider, abelian_group_decider_named, finite_group_decider, free_group_decider,
    free_group_decider_with, FiniteGroup,
};
pub use gog::{
    amalgam_decider, amalgam_graph, fundamental_generators, graph_of_groups_decider, graph_of_groups_decider_with,
    graph_of_groups_system, GogSystem,
    hnn_decider, GogEdge, GogVertex, GraphOfGroups,
};
pub use overgroup::{coset_transducer, extend_generators, overgroup_decider, CosetTable};
pub use product::{product_with_free_group_decider, product_with_free_group_decider_with, Partner, ProductDecider, ProductSpec};

pub type MemberFn = Arc<dyn Fn(&Nfa, &Word) -> Result<bool> + Send + Sync>;

/// Resource caps shared by the constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Rule-oracle calls per saturation; `None` is unbounded.
    pub oracle_budget: Option<u64>,
    /// Branch-and-bound nodes per integer program.
    pub ilp_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            oracle_budget: Some(1_000_000),
            ilp_budget: 100_000,
        }
    }
}

/// One named construction-time check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        CheckReport {
            name: name.into(),
            passed,
        }
    }
}

/// Decides `w ∈ L(R)` in a group, where `L(R)` is read through the
/// evaluation map from words to group elements.
#[derive(Clone)]
pub struct GroupDecider {
    generators: InvolutiveAlphabet,
    member: MemberFn,
    description: String,
}

impl GroupDecider {
    pub fn new<F>(generators: &InvolutiveAlphabet, description: impl Into<String>, member: F) -> Self
    where
        F: Fn(&Nfa, &Word) -> Result<bool> + Send + Sync + 'static,
    {
        GroupDecider {
            generators: generators.clone(),
            member: Arc::new(member),
            description: description.into(),
        }
    }

    pub fn generators(&self) -> &InvolutiveAlphabet {
        &self.generators
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.generators.alphabet()
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn member(&self, r: &Nfa, w: &Word) -> Result<bool> {
        self.alphabet().ensure_same(r.alphabet(), "membership subset")?;
        self.alphabet().check_word(w)?;
        if r.finals().is_empty() {
            return Ok(false);
        }
        (self.member)(r, w)
    }

    /// Whether `u` and `v` represent the same element.
    pub fn equal(&self, u: &Word, v: &Word) -> Result<bool> {
        self.member(&Nfa::singleton(self.alphabet(), u), v)
    }

    pub fn is_identity(&self, w: &Word) -> Result<bool> {
        self.equal(&Word::empty(), w)
    }

    pub fn as_monoid(&self) -> MonoidDecider {
        MonoidDecider {
            generators: self.alphabet().clone(),
            member: self.member.clone(),
            description: self.description.clone(),
        }
    }
}

impl fmt::Debug for GroupDecider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupDecider({} over {})", self.description, self.alphabet())
    }
}

/// As [`GroupDecider`] for monoids, with no inversion on the generators.
#[derive(Clone)]
pub struct MonoidDecider {
    generators: Alphabet,
    member: MemberFn,
    description: String,
}

impl MonoidDecider {
    pub fn new<F>(generators: &Alphabet, description: impl Into<String>, member: F) -> Self
    where
        F: Fn(&Nfa, &Word) -> Result<bool> + Send + Sync + 'static,
    {
        MonoidDecider {
            generators: generators.clone(),
            member: Arc::new(member),
            description: description.into(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.generators
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn member(&self, r: &Nfa, w: &Word) -> Result<bool> {
        self.generators.ensure_same(r.alphabet(), "membership subset")?;
        self.generators.check_word(w)?;
        if r.finals().is_empty() {
            return Ok(false);
        }
        (self.member)(r, w)
    }
}

impl fmt::Debug for MonoidDecider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonoidDecider({} over {})", self.description, self.generators)
    }
}

/// The word problem as an oracle: `R` meets it iff `1 ∈ L(R)` in the group.
pub fn wp_rid(d: &GroupDecider) -> RidLanguage {
    let d2 = d.clone();
    RidLanguage::new(d.alphabet(), format!("wp[{}]", d.description), move |r: &Nfa| {
        d2.member(r, &Word::empty())
    })
}

/// `w ∈ L(R)` iff `w⁻¹ · L(R)` meets the word problem.
pub fn decider_from_wp_rid(wp: &RidLanguage, gens: &InvolutiveAlphabet) -> Result<GroupDecider> {
    wp.alphabet().ensure_same(gens.alphabet(), "word problem")?;
    let (wp2, g2) = (wp.clone(), gens.clone());
    Ok(GroupDecider::new(gens, wp.description().to_string(), move |r: &Nfa, w: &Word| {
        wp2.intersects(&r.left_translate(&invert_word(&g2, w))?)
    }))
}

/// Membership in the subgroup generated by `subgens`.
pub fn subgroup_member(d: &GroupDecider, subgens: &[Word], w: &Word) -> Result<bool> {
    d.member(&subgroup_automaton(d.generators(), subgens)?, w)
}

/// `(u₁ | u₁⁻¹ | … )*`.
pub fn subgroup_automaton(gens: &InvolutiveAlphabet, subgens: &[Word]) -> Result<Nfa> {
    let mut words = Vec::new();
    for u in subgens {
        gens.alphabet().check_word(u)?;
        words.push(u.clone());
        words.push(invert_word(gens, u));
    }
    Ok(Nfa::from_words(gens.alphabet(), &words).star())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("INFINITE"),
        }
    }
}

/// Finite iff `1` lies in the semigroup `w · w*`; then the least `n` with
/// `wⁿ = 1`.
pub fn element_order(d: &GroupDecider, w: &Word) -> Result<Order> {
    let a = d.alphabet();
    let single = Nfa::singleton(a, w);
    let semigroup = single.concat(&single.star())?;
    if !d.member(&semigroup, &Word::empty())? {
        return Ok(Order::Infinite);
    }
    let mut n = 1u64;
    let mut p = w.clone();
    loop {
        if d.is_identity(&p)? {
            return Ok(Order::Finite(n));
        }
        n += 1;
        p = p.concat(w);
        if n == u64::MAX {
            return Err(Error::Invalid("order search overflow".into()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::compile_str;
    use crate::rewriting::{ancestors_rid, MonadicSystem};
    use crate::rid::rid_regular;

    fn f2() -> InvolutiveAlphabet {
        InvolutiveAlphabet::from_generators(["a", "b"]).unwrap()
    }

    #[test]
    fn wp_rid_examples() {
        let g = f2();
        let wp = wp_rid(&free_group_decider(&g).unwrap());
        let q = |s: &str| compile_str(s, g.alphabet()).unwrap();
        assert!(wp.intersects(&q("a a'")).unwrap());
        assert!(!wp.intersects(&q("a b")).unwrap());
        assert!(wp.intersects(&q("1")).unwrap());
    }

    #[test]
    fn decider_from_wp_examples() {
        let g = f2();
        let eps = rid_regular(&Nfa::singleton(g.alphabet(), &Word::empty()));
        let wp = ancestors_rid(&eps, &MonadicSystem::free_reduction(&g)).unwrap();
        let d = decider_from_wp_rid(&wp, &g).unwrap();
        let q = |s: &str| compile_str(s, g.alphabet()).unwrap();
        let w = |s: &str| g.parse_word(s).unwrap();
        assert!(d.member(&q("a"), &w("a")).unwrap());
        assert!(!d.member(&q("a"), &w("b")).unwrap());
        assert!(d.member(&q("1"), &Word::empty()).unwrap());
        // round trip at the answer level
        let back = wp_rid(&d);
        for s in ["a a'", "a b", "1", "(a | b')*", "a* b a'"] {
            assert_eq!(back.intersects(&q(s)).unwrap(), wp.intersects(&q(s)).unwrap(), "{s}");
        }
    }

    #[test]
    fn subgroup_examples() {
        let g = f2();
        let d = free_group_decider(&g).unwrap();
        let w = |s: &str| g.parse_word(s).unwrap();
        let gens = [w("a a"), w("a b")];
        assert!(subgroup_member(&d, &gens, &w("a b")).unwrap());
        assert!(!subgroup_member(&d, &gens, &w("b")).unwrap());
        assert!(!subgroup_member(&d, &gens, &w("a")).unwrap());
        assert!(subgroup_member(&d, &[], &Word::empty()).unwrap());
        assert!(!subgroup_member(&d, &[], &w("a")).unwrap());
    }

    #[test]
    fn order_examples() {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let t = InvolutiveAlphabet::from_generators(["t"]).unwrap();
        let d = finite_group_decider(&z3, &t, &[1, 2]).unwrap();
        assert_eq!(element_order(&d, &t.parse_word("t").unwrap()).unwrap(), Order::Finite(3));
        assert_eq!(element_order(&d, &Word::empty()).unwrap(), Order::Finite(1));
        let g = f2();
        let f = free_group_decider(&g).unwrap();
        assert_eq!(element_order(&f, &g.parse_word("a").unwrap()).unwrap(), Order::Infinite);
        assert_eq!(Order::Infinite.to_string(), "INFINITE");
    }

    #[test]
    fn member_checks_alphabets() {
        let g = f2();
        let d = free_group_decider(&g).unwrap();
        let other = Alphabet::new(["a", "a'"]).unwrap();
        assert!(d.member(&Nfa::universal(&other), &Word::empty()).is_err());
        assert!(!d.member(&Nfa::empty(g.alphabet()), &Word::empty()).unwrap());
    }
}
