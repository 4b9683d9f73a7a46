//! Factor enumeration for morphic subshifts, interpretation of factors as
//! windows of images, synchronization delay and separability.
//!
//! Factor sets are exact. A factor of length `L` touches at most `k + 2`
//! consecutive images, where `k` is the largest length of a factor whose image
//! fits in `L − 2` letters, so windows of images of length-`(k + 2)` factors
//! give every length-`L` factor. This recursion shrinks the length as long as
//! no factor of length `L − 2` consists of letters with one-letter images:
//! primitive morphisms are raised to a power with images of length at least
//! two, and for `x -> x·w·x, y -> y` the lengths up to `h + 2` (`h` the longest
//! run of `y` in `w`) are seeded from the windows of `φ²(x)`.
//!
//! Separability is decided on length-`D` factors: once every such factor has
//! a single interpretation and the last letters of images differ, the type of
//! an infinite word is a function of its length-`D` prefix, and two infinite
//! words with distinct prefixes compare like those prefixes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{fixed_point_letters, is_primitive, GeneralMorphism, Letter, Word};

/// Default cap on the synchronization delay search.
pub const DEFAULT_DELAY_CAP: usize = 64;

/// Lexicographically sorted distinct factors of one length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSet {
    pub length: usize,
    pub factors: Vec<Word>,
}

impl FactorSet {
    fn from_set(length: usize, set: BTreeSet<Word>) -> Self {
        FactorSet { length, factors: set.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.factors.binary_search(w).is_ok()
    }
}

/// Position of a letter inside the image of another: `(letter, offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypeTag {
    pub letter: Letter,
    pub offset: usize,
}

impl TypeTag {
    pub fn new(letter: Letter, offset: usize) -> Self {
        TypeTag { letter, offset }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypingReport {
    pub delay: usize,
    /// Length-`delay` factors in lexicographic order with their type.
    pub typed: Vec<(Word, TypeTag)>,
    pub separable: bool,
    /// Types in increasing order of their factor blocks, when separable.
    pub type_order: Option<Vec<TypeTag>>,
}

#[derive(Debug, Clone)]
enum Engine {
    Ancestor { driver: GeneralMorphism, seed: Option<(usize, BTreeSet<Word>)> },
    Lifted { base: Box<Language>, delay: usize, coding: BTreeMap<Word, Letter> },
}

/// The language of the subshift of a morphism, computed lazily by length.
#[derive(Debug, Clone)]
pub struct Language {
    morphism: GeneralMorphism,
    engine: Engine,
    cache: BTreeMap<usize, FactorSet>,
    all_letters_in_delay: bool,
}

fn longest_run(w: &Word, y: Letter) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for &l in w.letters() {
        if l == y {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

impl Language {
    /// Language of a primitive morphism, or of a binary `x -> x·w·x, y -> y`.
    pub fn new(m: &GeneralMorphism) -> Result<Self> {
        let engine = if is_primitive(m) {
            let (driver, _) = m.power_with_min_len(2);
            Engine::Ancestor { driver, seed: None }
        } else {
            let (x, y) = non_primitive_shape(m).ok_or_else(|| {
                Error::Inadmissible(format!("no factor enumeration for non-primitive {m}"))
            })?;
            let h = longest_run(m.image(x), y);
            let len = h + 2;
            let seed_word = m.apply(m.image(x));
            let seed: BTreeSet<Word> = seed_word.windows(len).collect();
            Engine::Ancestor { driver: m.clone(), seed: Some((len, seed)) }
        };
        Ok(Language {
            morphism: m.clone(),
            engine,
            cache: BTreeMap::new(),
            all_letters_in_delay: m.is_binary(),
        })
    }

    /// Language of a recoding whose letters stand for length-`delay` factors
    /// of `base`: factors of length `n` are codes of base factors of length
    /// `n + delay − 1`.
    pub fn lifted(
        m: &GeneralMorphism,
        base: Language,
        delay: usize,
        coding: BTreeMap<Word, Letter>,
    ) -> Self {
        Language {
            morphism: m.clone(),
            engine: Engine::Lifted { base: Box::new(base), delay, coding },
            cache: BTreeMap::new(),
            all_letters_in_delay: m.is_binary(),
        }
    }

    /// Chooses the ancestor engine when the morphism supports it and lifting
    /// otherwise.
    pub fn for_recoding(
        m: &GeneralMorphism,
        base: &Language,
        delay: usize,
        coding: BTreeMap<Word, Letter>,
    ) -> Self {
        if is_primitive(m) {
            if let Ok(lang) = Language::new(m) {
                return lang;
            }
        }
        Language::lifted(m, base.clone(), delay, coding)
    }

    pub fn morphism(&self) -> &GeneralMorphism {
        &self.morphism
    }

    pub fn is_lifted(&self) -> bool {
        matches!(self.engine, Engine::Lifted { .. })
    }

    /// Length-2 factors: close the length-2 windows of images under the
    /// boundary words `last(μ(x))·first(μ(y))` for known factors `xy`.
    pub fn factors_len2(&mut self) -> FactorSet {
        if let Some(fs) = self.cache.get(&2) {
            return fs.clone();
        }
        let m = self.morphism.clone();
        let mut set: BTreeSet<Word> = m.images().iter().flat_map(|w| w.windows(2)).collect();
        loop {
            let mut added = false;
            let current: Vec<Word> = set.iter().cloned().collect();
            for w in current {
                let l = m.image(w.0[0]).last().expect("non-erasing");
                let f = m.image(w.0[1]).first().expect("non-erasing");
                added |= set.insert(Word(vec![l, f]));
            }
            if !added {
                break;
            }
        }
        let fs = FactorSet::from_set(2, set);
        self.cache.insert(2, fs.clone());
        fs
    }

    pub fn factors(&mut self, len: usize) -> Result<FactorSet> {
        if let Some(fs) = self.cache.get(&len) {
            return Ok(fs.clone());
        }
        let fs = self.compute(len)?;
        self.cache.insert(len, fs.clone());
        Ok(fs)
    }

    fn compute(&mut self, len: usize) -> Result<FactorSet> {
        if len == 0 {
            return Ok(FactorSet::from_set(0, [Word::new()].into()));
        }
        let (driver, seed_len) = match &mut self.engine {
            Engine::Lifted { base, delay, coding } => {
                let inner = base.factors(len + *delay - 1)?;
                let mut set = BTreeSet::new();
                for u in &inner.factors {
                    set.insert(lift_with(coding, u, *delay)?);
                }
                return Ok(FactorSet::from_set(len, set));
            }
            Engine::Ancestor { driver, seed } => {
                if let Some((sl, words)) = seed {
                    if len == *sl {
                        return Ok(FactorSet::from_set(len, words.clone()));
                    }
                }
                (driver.clone(), seed.as_ref().map(|s| s.0))
            }
        };
        if let Some(sl) = seed_len {
            if len < sl {
                let top = self.factors(sl)?;
                let set = top.factors.iter().flat_map(|w| w.windows(len)).collect();
                return Ok(FactorSet::from_set(len, set));
            }
        }
        if len <= 2 {
            let two = self.factors_len2();
            if len == 2 {
                return Ok(two);
            }
            let set = two.factors.iter().flat_map(|w| w.windows(1)).collect();
            return Ok(FactorSet::from_set(1, set));
        }
        // Longest factor whose driver image fits strictly inside the window.
        let mut inner = 0;
        loop {
            let j = inner + 1;
            if j + 2 > len {
                return Err(Error::Consistency(format!("ancestor recursion stalls at length {len}")));
            }
            let fj = self.factors(j)?;
            let min_image = fj.factors.iter().map(|y| driver.apply(y).len()).min().unwrap_or(usize::MAX);
            if min_image > len - 2 {
                break;
            }
            inner = j;
        }
        let ancestors = self.factors(inner + 2)?;
        let set = ancestors.factors.iter().flat_map(|v| driver.apply(v).windows(len).collect::<Vec<_>>()).collect();
        Ok(FactorSet::from_set(len, set))
    }

    /// For every factor of length `len`, the set of `(first letter of the
    /// ancestor, offset)` pairs under which it is a window of an image.
    pub fn interpretation_table(&mut self, len: usize) -> Result<BTreeMap<Word, BTreeSet<TypeTag>>> {
        let ancestors = self.factors(len)?;
        let m = &self.morphism;
        let mut table: BTreeMap<Word, BTreeSet<TypeTag>> = BTreeMap::new();
        for v in &ancestors.factors {
            let img = m.apply(v);
            let first = v.0[0];
            for p in 0..m.image_len(first) {
                if p + len <= img.len() {
                    table
                        .entry(img.slice(p, p + len))
                        .or_default()
                        .insert(TypeTag::new(first, p));
                }
            }
        }
        Ok(table)
    }

    pub fn interpretations(&mut self, u: &Word) -> Result<BTreeSet<TypeTag>> {
        let mut table = self.interpretation_table(u.len())?;
        table.remove(u).ok_or_else(|| Error::UnknownWindow(self.morphism.alphabet().render(u)))
    }

    /// Number of length-`len` factors with more than one interpretation.
    pub fn ambiguity(&mut self, len: usize) -> Result<usize> {
        Ok(self.interpretation_table(len)?.values().filter(|s| s.len() > 1).count())
    }

    fn delay_holds(&mut self, len: usize) -> Result<bool> {
        let table = self.interpretation_table(len)?;
        let q = self.morphism.size();
        Ok(table.iter().all(|(w, types)| {
            types.len() == 1
                && (!self.all_letters_in_delay
                    || (0..q as u16).all(|l| w.contains_letter(Letter(l))))
        }))
    }

    /// Smallest length whose factors all carry one type (and, over a binary
    /// alphabet, contain both letters).
    pub fn synchronization_delay(&mut self, cap: usize) -> Result<usize> {
        for len in 1..=cap {
            if self.delay_holds(len)? {
                return Ok(len);
            }
        }
        Err(Error::SynchronizationDelayNotFound { cap })
    }

    pub fn typing_and_separability(&mut self, delay: usize) -> Result<TypingReport> {
        let table = self.interpretation_table(delay)?;
        let mut typed = Vec::with_capacity(table.len());
        for (w, types) in table {
            if types.len() != 1 {
                return Err(Error::Consistency(format!(
                    "factor {} has {} types at delay {delay}",
                    self.morphism.alphabet().render(&w),
                    types.len()
                )));
            }
            let t = *types.iter().next().expect("one type");
            typed.push((w, t));
        }
        let mut blocks: Vec<TypeTag> = Vec::new();
        for (_, t) in &typed {
            if blocks.last() != Some(t) {
                blocks.push(*t);
            }
        }
        let distinct: BTreeSet<TypeTag> = blocks.iter().copied().collect();
        if distinct.len() != self.morphism.total_image_len() {
            return Err(Error::Consistency(format!(
                "{} types observed, {} expected",
                distinct.len(),
                self.morphism.total_image_len()
            )));
        }
        let separable = distinct.len() == blocks.len();
        Ok(TypingReport {
            delay,
            typed,
            separable,
            type_order: separable.then_some(blocks),
        })
    }
}

/// `(x, y)` when `φ(x) = x·w·x` with `y` in `w` and `φ(y) = y`.
pub fn non_primitive_shape(m: &GeneralMorphism) -> Option<(Letter, Letter)> {
    if !m.is_binary() {
        return None;
    }
    [(Letter::A, Letter::B), (Letter::B, Letter::A)].into_iter().find(|&(x, y)| {
        let ix = m.image(x);
        m.image(y).letters() == [y]
            && ix.len() >= 3
            && ix.first() == Some(x)
            && ix.last() == Some(x)
            && ix.contains_letter(y)
            && fixed_point_letters(m).contains(&x)
    })
}

/// Sliding-window code of `w` under a factor coding.
pub fn lift_with(coding: &BTreeMap<Word, Letter>, w: &Word, delay: usize) -> Result<Word> {
    if w.len() < delay {
        return Err(Error::UnknownWindow(format!("word shorter than {delay}")));
    }
    let mut out = Vec::with_capacity(w.len() - delay + 1);
    for i in 0..=w.len() - delay {
        let win = &w.0[i..i + delay];
        match coding.get(&Word(win.to_vec())) {
            Some(&l) => out.push(l),
            None => {
                return Err(Error::UnknownWindow(
                    win.iter().map(|l| l.0.to_string()).collect::<Vec<_>>().join(","),
                ))
            }
        }
    }
    Ok(Word(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::fixed_point_prefix;

    fn bm(a: &str, b: &str) -> GeneralMorphism {
        GeneralMorphism::binary(a, b).unwrap()
    }

    fn words(fs: &FactorSet) -> Vec<String> {
        let alpha = crate::words::Alphabet::binary();
        fs.factors.iter().map(|w| alpha.render(w)).collect()
    }

    fn brute(m: &GeneralMorphism, x: Letter, n: usize, len: usize) -> Vec<String> {
        let w = fixed_point_prefix(m, x, n).unwrap();
        let set: BTreeSet<Word> = w.windows(len).collect();
        words(&FactorSet::from_set(len, set))
    }

    #[test]
    fn length_two() {
        assert_eq!(words(&Language::new(&bm("ab", "ba")).unwrap().factors_len2()), ["aa", "ab", "ba", "bb"]);
        assert_eq!(words(&Language::new(&bm("baa", "bab")).unwrap().factors_len2()), ["aa", "ab", "ba", "bb"]);
        assert_eq!(brute(&bm("baa", "bab"), Letter::B, 2000, 2), ["aa", "ab", "ba", "bb"]);
        assert_eq!(words(&Language::new(&bm("aaba", "b")).unwrap().factors(2).unwrap()), ["aa", "ab", "ba"]);
        assert_eq!(brute(&bm("aaba", "b"), Letter::A, 2000, 2), ["aa", "ab", "ba"]);
    }

    #[test]
    fn factor_counts() {
        let mut l = Language::new(&bm("aabab", "bba")).unwrap();
        let f5 = l.factors(5).unwrap();
        assert_eq!(f5.len(), 17);
        assert_eq!(words(&f5)[0], "aaaba");
        assert_eq!(words(&f5)[16], "bbbab");
        let mut tm = Language::new(&bm("ab", "ba")).unwrap();
        assert_eq!(tm.factors(5).unwrap().len(), 12);
        assert_eq!(words(&tm.factors(1).unwrap()), ["a", "b"]);
    }

    #[test]
    fn interpretation_examples() {
        let mut l = Language::new(&bm("aabab", "bba")).unwrap();
        assert_eq!(l.interpretations(&Word::binary("babb").unwrap()).unwrap().len(), 2);
        assert_eq!(l.interpretations(&Word::binary("babba").unwrap()).unwrap().len(), 1);
        assert_eq!(l.interpretations(&Word::binary("babbb").unwrap()).unwrap().len(), 1);
        let mut tm = Language::new(&bm("ab", "ba")).unwrap();
        let i = tm.interpretations(&Word::binary("aabba").unwrap()).unwrap();
        assert_eq!(i.into_iter().collect::<Vec<_>>(), vec![TypeTag::new(Letter::B, 1)]);
    }

    #[test]
    fn delays_and_separability() {
        let mut l = Language::new(&bm("aabab", "bba")).unwrap();
        assert_eq!(l.synchronization_delay(DEFAULT_DELAY_CAP).unwrap(), 5);
        assert!(!l.typing_and_separability(5).unwrap().separable);

        let mut tm = Language::new(&bm("ab", "ba")).unwrap();
        let d = tm.synchronization_delay(DEFAULT_DELAY_CAP).unwrap();
        assert!(d <= 5);
        let rep = tm.typing_and_separability(d).unwrap();
        let t = |l, o| TypeTag::new(l, o);
        assert_eq!(
            rep.type_order.unwrap(),
            vec![t(Letter::B, 1), t(Letter::A, 0), t(Letter::B, 0), t(Letter::A, 1)]
        );

        let mut p = Language::new(&bm("baa", "bab")).unwrap();
        let d = p.synchronization_delay(DEFAULT_DELAY_CAP).unwrap();
        assert!(p.typing_and_separability(d).unwrap().separable);
        assert!(!p.delay_holds(d - 1).unwrap());
    }

    #[test]
    fn factor_sets_match_long_prefixes() {
        let corpus = [
            ("ab", "ba"),
            ("aba", "ab"),
            ("baa", "bab"),
            ("aabab", "bba"),
            ("ba", "babab"),
            ("aaba", "b"),
            ("abbba", "b"),
            ("babba", "bab"),
            ("a", "bab"),
        ];
        for (a, b) in corpus {
            let m = bm(a, b);
            let x = *fixed_point_letters(&m).iter().next().unwrap();
            let mut lang = Language::new(&m).unwrap();
            for len in 1..=12 {
                assert_eq!(words(&lang.factors(len).unwrap()), brute(&m, x, 60_000, len), "{a}/{b} at {len}");
            }
        }
    }

    #[test]
    fn delay_cap_is_reported() {
        let mut l = Language::new(&bm("aabab", "bba")).unwrap();
        assert_eq!(l.synchronization_delay(3), Err(Error::SynchronizationDelayNotFound { cap: 3 }));
    }
}
