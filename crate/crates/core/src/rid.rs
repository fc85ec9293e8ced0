//! Languages given by an oracle deciding whether a regular language meets them.

use std::fmt;
use std::sync::Arc;

use crate::automata::{transducer_preimage, Nfa, Transducer, TransducerBuilder};
use crate::error::Result;
use crate::words::{Alphabet, Morphism, Word};

pub type Oracle = Arc<dyn Fn(&Nfa) -> Result<bool> + Send + Sync>;

/// An oracle handle for a language `L`: `intersects(R)` decides whether
/// `L(R) ∩ L` is nonempty.
#[derive(Clone)]
pub struct RidLanguage {
    alphabet: Alphabet,
    oracle: Oracle,
    description: String,
    regular: Option<Nfa>,
}

impl RidLanguage {
    pub fn new<F>(alphabet: &Alphabet, description: impl Into<String>, oracle: F) -> Self
    where
        F: Fn(&Nfa) -> Result<bool> + Send + Sync + 'static,
    {
        RidLanguage {
            alphabet: alphabet.clone(),
            oracle: Arc::new(oracle),
            description: description.into(),
            regular: None,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// The automaton, when the language is known to be regular.
    pub fn regular(&self) -> Option<&Nfa> {
        self.regular.as_ref()
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn intersects(&self, r: &Nfa) -> Result<bool> {
        self.alphabet.ensure_same(r.alphabet(), "oracle query")?;
        if r.finals().is_empty() {
            return Ok(false);
        }
        (self.oracle)(r)
    }

    /// Singleton probe.
    pub fn contains(&self, w: &Word) -> Result<bool> {
        self.intersects(&Nfa::singleton(&self.alphabet, w))
    }
}

impl fmt::Debug for RidLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RidLanguage({})", self.description)
    }
}

pub fn rid_regular(m: &Nfa) -> RidLanguage {
    let lang = m.trim();
    let inner = lang.clone();
    let mut l = RidLanguage::new(m.alphabet(), "regular", move |r: &Nfa| r.meets(&inner));
    l.regular = Some(lang);
    l
}

pub fn rid_empty(alphabet: &Alphabet) -> RidLanguage {
    rid_regular(&Nfa::empty(alphabet)).with_description("empty")
}

pub fn rid_union(l1: &RidLanguage, l2: &RidLanguage) -> Result<RidLanguage> {
    l1.alphabet.ensure_same(&l2.alphabet, "union")?;
    let description = format!("({} ∪ {})", l1.description, l2.description);
    if let (Some(a), Some(b)) = (&l1.regular, &l2.regular) {
        return Ok(rid_regular(&a.union(b)?).with_description(description));
    }
    let (a, b) = (l1.clone(), l2.clone());
    Ok(RidLanguage::new(&l1.alphabet, description, move |r: &Nfa| {
        Ok(a.intersects(r)? || b.intersects(r)?)
    }))
}

/// Union of any number of languages over one alphabet.
pub fn rid_union_all(alphabet: &Alphabet, parts: &[RidLanguage]) -> Result<RidLanguage> {
    let mut acc = rid_empty(alphabet);
    for (i, p) in parts.iter().enumerate() {
        acc = if i == 0 {
            p.alphabet.ensure_same(alphabet, "union")?;
            p.clone()
        } else {
            rid_union(&acc, p)?
        };
    }
    Ok(acc)
}

/// The image of `L` under the transducer.
pub fn rid_transduction(l: &RidLanguage, t: &Transducer) -> Result<RidLanguage> {
    l.alphabet.ensure_same(t.input(), "transduction")?;
    let (inner, t2) = (l.clone(), t.clone());
    Ok(RidLanguage::new(
        t.output(),
        format!("transduce({})", l.description),
        move |q: &Nfa| {
            let pre = transducer_preimage(&t2, q)?;
            inner.intersects(&pre)
        },
    ))
}

/// `h⁻¹(L)` over `h.source`.
pub fn rid_relabel_inverse(l: &RidLanguage, h: &Morphism) -> Result<RidLanguage> {
    l.alphabet.ensure_same(h.target(), "inverse morphism")?;
    let (inner, h2) = (l.clone(), h.clone());
    Ok(RidLanguage::new(
        h.source(),
        format!("unmap({})", l.description),
        move |r: &Nfa| inner.intersects(&r.relabel(&h2)?),
    ))
}

/// `left · L · right`.
pub fn rid_translate(l: &RidLanguage, left: &Word, right: &Word) -> Result<RidLanguage> {
    l.alphabet.check_word(left)?;
    l.alphabet.check_word(right)?;
    let description = format!(
        "{}·{}·{}",
        l.alphabet.spell(left),
        l.description,
        l.alphabet.spell(right)
    );
    if let Some(m) = &l.regular {
        let t = m.left_translate(left)?.right_translate(right)?;
        return Ok(rid_regular(&t).with_description(description));
    }
    let (inner, left, right) = (l.clone(), left.clone(), right.clone());
    Ok(RidLanguage::new(&l.alphabet, description, move |r: &Nfa| {
        inner.intersects(&r.quotient(&left, &right)?)
    }))
}

/// `L ∩ L(m)`, as a transduction through the identity restricted to `m`.
pub fn rid_intersect_regular(l: &RidLanguage, m: &Nfa) -> Result<RidLanguage> {
    l.alphabet.ensure_same(m.alphabet(), "intersection")?;
    let mut b = TransducerBuilder::new(m.alphabet(), m.alphabet());
    b.add_states(m.num_states());
    for (s, lab, d) in m.edges() {
        let w = Word(lab.into_iter().collect());
        b.add_edge(s, &w, w.clone(), d)?;
    }
    b.set_initial(m.initial());
    for &f in m.finals() {
        b.add_final(f);
    }
    rid_transduction(l, &b.build())
}

/// `h(L)` over `h.target`, as a one-state transduction.
pub fn rid_morphism_image(l: &RidLanguage, h: &Morphism) -> Result<RidLanguage> {
    l.alphabet.ensure_same(h.source(), "morphism image")?;
    let mut b = TransducerBuilder::new(h.source(), h.target());
    let s = b.add_state();
    for x in h.source().letters() {
        b.add_edge(s, &Word(vec![x]), h.image(x).clone(), s)?;
    }
    b.add_final(s);
    rid_transduction(l, &b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::compile_str;

    fn c(src: &str, a: &Alphabet) -> Nfa {
        compile_str(src, a).unwrap()
    }

    #[test]
    fn regular_examples() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let l = rid_regular(&c("a*", &a));
        assert!(l.intersects(&c("a a", &a)).unwrap());
        assert!(!l.intersects(&c("b", &a)).unwrap());
        let e = rid_regular(&Nfa::empty(&a));
        assert!(!e.intersects(&c("(a|b)*", &a)).unwrap());
    }

    #[test]
    fn union_examples() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let u = rid_union(&rid_regular(&c("a", &a)), &rid_regular(&c("b", &a))).unwrap();
        assert!(u.intersects(&c("b", &a)).unwrap());
        let base = rid_regular(&c("a b*", &a));
        let with_empty = rid_union(&base, &rid_empty(&a)).unwrap();
        for q in ["a", "b", "a b b", "(a|b)*", "b a"] {
            assert_eq!(with_empty.intersects(&c(q, &a)).unwrap(), base.intersects(&c(q, &a)).unwrap());
        }
    }

    #[test]
    fn union_keeps_oracle_path_when_not_regular() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let odd = RidLanguage::new(&a, "odd", |r: &Nfa| Ok(r.enumerate(5).iter().any(|w| w.len() % 2 == 1)));
        let u = rid_union(&odd, &rid_regular(&c("b b", &a))).unwrap();
        assert!(u.regular().is_none());
        assert!(u.intersects(&c("b b", &a)).unwrap());
        assert!(u.intersects(&c("a", &a)).unwrap());
        assert!(!u.intersects(&c("a a", &a)).unwrap());
    }

    #[test]
    fn transduction_examples() {
        let a = Alphabet::new(["a"]).unwrap();
        let x = Alphabet::new(["x"]).unwrap();
        let mut b = TransducerBuilder::new(&a, &x);
        let s = b.add_state();
        let f = b.add_state();
        b.add_edge(s, &a.parse_word("a").unwrap(), x.parse_word("x").unwrap(), f).unwrap();
        b.add_final(f);
        let t = rid_transduction(&rid_regular(&c("a", &a)), &b.build()).unwrap();
        assert!(t.intersects(&c("x", &x)).unwrap());
        assert!(!t.intersects(&c("x x", &x)).unwrap());
    }

    #[test]
    fn relabel_inverse_examples() {
        let ys = Alphabet::new(["y"]).unwrap();
        let a = Alphabet::new(["a"]).unwrap();
        let h = Morphism::from_spellings(&ys, &a, &[("y", "a a")]).unwrap();
        let l = rid_relabel_inverse(&rid_regular(&c("(a a)*", &a)), &h).unwrap();
        assert!(l.intersects(&c("y y", &ys)).unwrap());
        let l = rid_relabel_inverse(&rid_regular(&c("a", &a)), &h).unwrap();
        assert!(!l.intersects(&c("y", &ys)).unwrap());
        let erase = Morphism::from_spellings(&ys, &a, &[("y", "1")]).unwrap();
        let l = rid_relabel_inverse(&rid_regular(&c("1", &a)), &erase).unwrap();
        assert!(l.intersects(&c("y y y", &ys)).unwrap());
    }

    #[test]
    fn translate_examples() {
        let a = Alphabet::new(["a", "b", "u", "v"]).unwrap();
        let w = |s: &str| a.parse_word(s).unwrap();
        let l = rid_translate(&rid_regular(&c("a", &a)), &w("b"), &Word::empty()).unwrap();
        assert!(l.intersects(&c("b a", &a)).unwrap());
        assert!(!l.intersects(&c("a", &a)).unwrap());

        // non-regular inner language so the quotient path is used
        let base = RidLanguage::new(&a, "a|b", {
            let m = c("a | b", &a);
            move |r: &Nfa| r.meets(&m)
        });
        let twice = rid_translate(&rid_translate(&base, &w("u"), &Word::empty()).unwrap(), &w("v"), &Word::empty())
            .unwrap();
        let once = rid_translate(&base, &w("v u"), &Word::empty()).unwrap();
        for q in ["v u a", "u v a", "v u b", "(u|v)* (a|b)", "a"] {
            assert_eq!(twice.intersects(&c(q, &a)).unwrap(), once.intersects(&c(q, &a)).unwrap(), "{q}");
        }
    }

    #[test]
    fn derived_closures() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let l = rid_intersect_regular(&rid_regular(&c("a* b", &a)), &c("a a (a|b)*", &a)).unwrap();
        assert!(l.contains(&a.parse_word("a a a b").unwrap()).unwrap());
        assert!(!l.contains(&a.parse_word("a b").unwrap()).unwrap());
        let x = Alphabet::new(["x"]).unwrap();
        let h = Morphism::from_spellings(&a, &x, &[("a", "x x"), ("b", "1")]).unwrap();
        let img = rid_morphism_image(&rid_regular(&c("a b a", &a)), &h).unwrap();
        assert!(img.contains(&x.parse_word("x x x x").unwrap()).unwrap());
        assert!(!img.contains(&x.parse_word("x x").unwrap()).unwrap());
    }

    #[test]
    fn alphabets_must_match() {
        let a = Alphabet::new(["a"]).unwrap();
        let b = Alphabet::new(["b"]).unwrap();
        let l = rid_regular(&c("a", &a));
        assert!(l.intersects(&c("b", &b)).is_err());
        assert!(rid_union(&l, &rid_regular(&c("b", &b))).is_err());
    }
}
