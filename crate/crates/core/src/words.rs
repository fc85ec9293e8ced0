//! Alphabets, involutions, words and alphabet morphisms.
//!
//! Letters are small indices into an [`Alphabet`]; the alphabet owns the
//! printable names. Every group generating set is symmetric: each letter `a`
//! has a formal inverse spelled `a'`, recorded by an [`InvolutiveAlphabet`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Characters that may not appear in a base letter name.
pub const RESERVED: &[char] = &['(', ')', '|', '*', '\'', ',', '.'];

/// Spelling of the empty word in every text format.
pub const EPSILON: &str = "1";

/// Index of a letter inside its alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

struct AlphabetInner {
    names: Vec<String>,
    index: HashMap<String, Letter>,
}

/// A finite ordered set of letter names. Cheap to clone.
#[derive(Clone)]
pub struct Alphabet(Arc<AlphabetInner>);

impl Alphabet {
    /// Builds an alphabet from names in order. Names may carry trailing
    /// apostrophes (inverse spellings) but must otherwise avoid reserved
    /// characters and whitespace.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Vec::new();
        let mut index = HashMap::new();
        for name in names {
            let name = name.into();
            check_letter_name(&name)?;
            if index.contains_key(&name) {
                return Err(Error::InvalidAlphabet(format!("duplicate letter `{name}`")));
            }
            index.insert(name.clone(), Letter(out.len() as u32));
            out.push(name);
        }
        Ok(Alphabet(Arc::new(AlphabetInner { names: out, index })))
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.len() as u32).map(Letter)
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.0.names[letter.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn lookup(&self, name: &str) -> Option<Letter> {
        self.0.index.get(name).copied()
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.lookup(name)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.index() < self.len()
    }

    /// Parses a word literal: letter names separated by whitespace, with `1`
    /// standing for the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == EPSILON {
                continue;
            }
            letters.push(self.letter(token)?);
        }
        Ok(Word(letters))
    }

    /// Checks that every letter of `w` belongs to this alphabet.
    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.0.iter().find(|l| !self.contains(**l)) {
            Some(l) => Err(Error::AlphabetMismatch(format!(
                "letter index {} outside alphabet of size {}",
                l.0,
                self.len()
            ))),
            None => Ok(()),
        }
    }

    /// Renders a word in the canonical literal syntax.
    pub fn spell(&self, w: &Word) -> String {
        if w.is_empty() {
            return EPSILON.to_string();
        }
        let parts: Vec<&str> = w.0.iter().map(|l| self.name(*l)).collect();
        parts.join(" ")
    }

    pub fn same_as(&self, other: &Alphabet) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }

    pub(crate) fn ensure_same(&self, other: &Alphabet, context: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "{context}: {{{}}} vs {{{}}}",
                self.0.names.join(" "),
                other.0.names.join(" ")
            )))
        }
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet{:?}", self.0.names)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.names.join(" "))
    }
}

fn check_letter_name(name: &str) -> Result<()> {
    let base = name.trim_end_matches('\'');
    if base.is_empty() {
        return Err(Error::InvalidAlphabet(format!("empty letter name `{name}`")));
    }
    if base == EPSILON {
        return Err(Error::InvalidAlphabet("`1` is reserved for the empty word".into()));
    }
    if let Some(c) = base
        .chars()
        .find(|c| c.is_whitespace() || RESERVED.contains(c) || c.is_control())
    {
        return Err(Error::InvalidAlphabet(format!(
            "letter `{name}` contains reserved character {c:?}"
        )));
    }
    Ok(())
}

/// The spelling of the formal inverse of a base letter name.
pub fn inverse_name(name: &str) -> String {
    match name.strip_suffix('\'') {
        Some(base) => base.to_string(),
        None => format!("{name}'"),
    }
}

/// An alphabet with an involution pairing each letter with its formal
/// inverse. For group generating sets the involution has no fixed points.
#[derive(Clone)]
pub struct InvolutiveAlphabet {
    alphabet: Alphabet,
    inv: Arc<Vec<Letter>>,
}

impl InvolutiveAlphabet {
    /// Letters `g, g'` for every generator name, in that order.
    pub fn from_generators<I, S>(generators: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut names = Vec::new();
        for g in generators {
            let g = g.as_ref();
            if g.ends_with('\'') {
                return Err(Error::InvalidAlphabet(format!(
                    "generator `{g}` must be a base name without apostrophe"
                )));
            }
            names.push(g.to_string());
            names.push(format!("{g}'"));
        }
        Self::from_letters(names)
    }

    /// Pairs letters by the apostrophe convention; every letter's partner
    /// must be present.
    pub fn from_letters<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let alphabet = Alphabet::new(names)?;
        let mut inv = Vec::with_capacity(alphabet.len());
        for l in alphabet.letters() {
            let partner = inverse_name(alphabet.name(l));
            match alphabet.lookup(&partner) {
                Some(p) => inv.push(p),
                None => {
                    return Err(Error::InvalidAlphabet(format!(
                        "letter `{}` has no inverse `{partner}`",
                        alphabet.name(l)
                    )))
                }
            }
        }
        Ok(InvolutiveAlphabet {
            alphabet,
            inv: Arc::new(inv),
        })
    }

    /// An explicit involution. `inv[i]` is the partner of letter `i`.
    pub fn with_involution(alphabet: Alphabet, inv: Vec<Letter>) -> Result<Self> {
        if inv.len() != alphabet.len() {
            return Err(Error::InvalidAlphabet("involution is not total".into()));
        }
        for (i, j) in inv.iter().enumerate() {
            if !alphabet.contains(*j) || inv[j.index()].index() != i {
                return Err(Error::InvalidAlphabet(format!(
                    "pairing of `{}` is not an involution",
                    alphabet.name(Letter(i as u32))
                )));
            }
        }
        Ok(InvolutiveAlphabet {
            alphabet,
            inv: Arc::new(inv),
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    #[inline]
    pub fn inverse(&self, letter: Letter) -> Letter {
        self.inv[letter.index()]
    }

    pub fn is_fixed_point_free(&self) -> bool {
        self.alphabet.letters().all(|l| self.inverse(l) != l)
    }

    /// Base generators: the first letter of every involution pair.
    pub fn generators(&self) -> Vec<Letter> {
        self.alphabet
            .letters()
            .filter(|l| self.inverse(*l).index() >= l.index())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        self.alphabet.parse_word(text)
    }

    pub fn spell(&self, w: &Word) -> String {
        self.alphabet.spell(w)
    }
}

impl PartialEq for InvolutiveAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.inv == other.inv
    }
}

impl fmt::Debug for InvolutiveAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InvolutiveAlphabet({})", self.alphabet)
    }
}

/// A finite sequence of letters. The alphabet is carried by the context.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn power(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// Cancels every factor `a inv(a)`. Single left-to-right stack pass.
pub fn free_reduce(alpha: &InvolutiveAlphabet, w: &Word) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.0 {
        match stack.last() {
            Some(&top) if alpha.inverse(top) == l => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word(stack)
}

/// The formal inverse: reversed, each letter replaced by its partner.
pub fn invert_word(alpha: &InvolutiveAlphabet, w: &Word) -> Word {
    Word(w.0.iter().rev().map(|l| alpha.inverse(*l)).collect())
}

/// A monoid morphism between free monoids, given on letters.
#[derive(Clone, Debug)]
pub struct Morphism {
    source: Alphabet,
    target: Alphabet,
    images: Vec<Word>,
}

impl Morphism {
    pub fn new(source: Alphabet, target: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Invalid(format!(
                "morphism defines {} images for {} letters",
                images.len(),
                source.len()
            )));
        }
        for w in &images {
            target.check_word(w)?;
        }
        Ok(Morphism {
            source,
            target,
            images,
        })
    }

    /// Builds a morphism from `(source letter name, target word literal)` pairs.
    pub fn from_spellings(source: &Alphabet, target: &Alphabet, map: &[(&str, &str)]) -> Result<Self> {
        let mut images = vec![None; source.len()];
        for (from, to) in map {
            let l = source.letter(from)?;
            images[l.index()] = Some(target.parse_word(to)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| {
                    Error::Invalid(format!(
                        "morphism undefined on `{}`",
                        source.name(Letter(i as u32))
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(source.clone(), target.clone(), images)
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        Morphism {
            source: alphabet.clone(),
            target: alphabet.clone(),
            images: alphabet.letters().map(|l| Word(vec![l])).collect(),
        }
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn image(&self, letter: Letter) -> &Word {
        &self.images[letter.index()]
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.source.check_word(w)?;
        let mut out = Vec::new();
        for l in &w.0 {
            out.extend_from_slice(&self.images[l.index()].0);
        }
        Ok(Word(out))
    }
}

/// Letterwise substitution, concatenated in order.
pub fn apply_morphism(m: &Morphism, w: &Word) -> Result<Word> {
    m.apply(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2() -> InvolutiveAlphabet {
        InvolutiveAlphabet::from_generators(["a", "b"]).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let a = f2();
        let w = a.parse_word("a a' b").unwrap();
        assert_eq!(a.spell(&free_reduce(&a, &w)), "b");
        assert!(free_reduce(&a, &Word::empty()).is_empty());
        let w = a.parse_word("a b b' a'").unwrap();
        assert!(free_reduce(&a, &w).is_empty());
    }

    #[test]
    fn invert_examples() {
        let a = f2();
        let w = a.parse_word("a b").unwrap();
        assert_eq!(a.spell(&invert_word(&a, &w)), "b' a'");
        assert!(invert_word(&a, &Word::empty()).is_empty());
        let w = a.parse_word("a b' a").unwrap();
        assert_eq!(invert_word(&a, &invert_word(&a, &w)), w);
    }

    #[test]
    fn morphism_examples() {
        let src = Alphabet::new(["a", "b"]).unwrap();
        let dst = Alphabet::new(["x", "y"]).unwrap();
        let m = Morphism::from_spellings(&src, &dst, &[("a", "x y"), ("b", "1")]).unwrap();
        let w = src.parse_word("a b a").unwrap();
        assert_eq!(dst.spell(&apply_morphism(&m, &w).unwrap()), "x y x y");

        let id = Morphism::identity(&src);
        assert_eq!(id.apply(&w).unwrap(), w);

        let ys = Alphabet::new(["y"]).unwrap();
        let ts = Alphabet::new(["t"]).unwrap();
        let recode = Morphism::from_spellings(&ys, &ts, &[("y", "t t")]).unwrap();
        let w = ys.parse_word("y y").unwrap();
        assert_eq!(ts.spell(&recode.apply(&w).unwrap()), "t t t t");
    }

    #[test]
    fn morphism_rejects_foreign_letter() {
        let src = Alphabet::new(["a"]).unwrap();
        let m = Morphism::identity(&src);
        assert!(m.apply(&Word(vec![Letter(3)])).is_err());
    }

    #[test]
    fn alphabet_rejects_bad_names() {
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a b"]).is_err());
        assert!(Alphabet::new(["(x"]).is_err());
        assert!(Alphabet::new(["1"]).is_err());
        assert!(InvolutiveAlphabet::from_letters(["a", "b'"]).is_err());
        assert!(InvolutiveAlphabet::from_generators(["a'"]).is_err());
    }

    #[test]
    fn involution_is_fixed_point_free() {
        let a = f2();
        assert!(a.is_fixed_point_free());
        for l in a.alphabet().letters() {
            assert_eq!(a.inverse(a.inverse(l)), l);
        }
        assert_eq!(a.generators().len(), 2);
        assert_eq!(a.alphabet().names(), &["a", "a'", "b", "b'"]);
    }

    #[test]
    fn spelling_round_trips_empty_word() {
        let a = f2();
        assert_eq!(a.spell(&Word::empty()), "1");
        assert!(a.parse_word("1").unwrap().is_empty());
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        prop::collection::vec(0u32..4, 0..12).prop_map(|v| Word(v.into_iter().map(Letter).collect()))
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(w in arb_word()) {
            let a = f2();
            let r = free_reduce(&a, &w);
            prop_assert_eq!(free_reduce(&a, &r), r);
        }

        #[test]
        fn word_times_inverse_reduces_to_empty(w in arb_word()) {
            let a = f2();
            let ww = w.concat(&invert_word(&a, &w));
            prop_assert!(free_reduce(&a, &ww).is_empty());
        }

        #[test]
        fn morphism_distributes(u in arb_word(), v in arb_word()) {
            let a = f2();
            let t = Alphabet::new(["x", "y"]).unwrap();
            let m = Morphism::from_spellings(a.alphabet(), &t,
                &[("a", "x"), ("a'", "y y"), ("b", "1"), ("b'", "x y")]).unwrap();
            let lhs = m.apply(&u.concat(&v)).unwrap();
            let rhs = m.apply(&u).unwrap().concat(&m.apply(&v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
