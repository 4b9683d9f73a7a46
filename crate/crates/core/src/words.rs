//! Letters, finite words, morphisms and the admissibility filter applied to
//! binary input.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index into an ordered alphabet. Letter order is index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter(pub u16);

impl Letter {
    pub const A: Letter = Letter(0);
    pub const B: Letter = Letter(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite word. The derived ordering is lexicographic with a proper prefix
/// ranking before its extensions.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn contains_letter(&self, l: Letter) -> bool {
        self.0.contains(&l)
    }

    /// All windows of length `n`, left to right.
    pub fn windows(&self, n: usize) -> impl Iterator<Item = Word> + '_ {
        let count = if n == 0 || n > self.len() { 0 } else { self.len() - n + 1 };
        (0..count).map(move |i| Word(self.0[i..i + n].to_vec()))
    }

    /// Parses a word over the binary alphabet `{a, b}`.
    pub fn binary(s: &str) -> Result<Word> {
        Alphabet::binary().parse_word(s)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// Ordered alphabet given by display labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new(labels: Vec<String>) -> Self {
        Alphabet { labels }
    }

    pub fn binary() -> Self {
        Alphabet::new(vec!["a".into(), "b".into()])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.labels.len() as u16).map(Letter)
    }

    pub fn label(&self, l: Letter) -> &str {
        &self.labels[l.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn lookup(&self, label: &str) -> Option<Letter> {
        self.labels.iter().position(|s| s == label).map(|i| Letter(i as u16))
    }

    /// Parses a word made of single-character labels.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                let key = c.to_string();
                self.lookup(&key).ok_or(Error::UnknownLetter(key))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Renders a word; multi-character labels are separated by spaces.
    pub fn render(&self, w: &Word) -> String {
        let single = self.labels.iter().all(|l| l.chars().count() == 1);
        let parts: Vec<&str> = w.0.iter().map(|&l| self.label(l)).collect();
        if single {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }
}

/// Non-erasing morphism over an ordered alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralMorphism {
    alphabet: Alphabet,
    images: Vec<Word>,
}

impl GeneralMorphism {
    pub fn new(alphabet: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != alphabet.len() {
            let missing = alphabet.labels().get(images.len()).cloned().unwrap_or_default();
            return Err(Error::MissingRule(missing));
        }
        for (i, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::EmptyImage(alphabet.labels()[i].clone()));
            }
            if let Some(bad) = img.0.iter().find(|l| l.index() >= alphabet.len()) {
                return Err(Error::UnknownLetter(format!("#{}", bad.0)));
            }
        }
        Ok(GeneralMorphism { alphabet, images })
    }

    /// Binary morphism from the two images written over `{a, b}`.
    pub fn binary(a: &str, b: &str) -> Result<Self> {
        let alpha = Alphabet::binary();
        let ia = alpha.parse_word(a)?;
        let ib = alpha.parse_word(b)?;
        GeneralMorphism::new(alpha, vec![ia, ib])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_binary(&self) -> bool {
        self.size() == 2
    }

    pub fn image(&self, l: Letter) -> &Word {
        &self.images[l.index()]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image_len(&self, l: Letter) -> usize {
        self.images[l.index()].len()
    }

    pub fn min_image_len(&self) -> usize {
        self.images.iter().map(Word::len).min().unwrap_or(0)
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn total_image_len(&self) -> usize {
        self.images.iter().map(Word::len).sum()
    }

    /// Common image length if every image has the same length.
    pub fn uniform_len(&self) -> Option<usize> {
        let k = self.images[0].len();
        self.images.iter().all(|w| w.len() == k).then_some(k)
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Vec::with_capacity(w.len() * self.max_image_len());
        for &l in &w.0 {
            out.extend_from_slice(&self.images[l.index()].0);
        }
        Word(out)
    }

    /// `self ∘ inner`: first apply `inner`, then `self`.
    pub fn compose(&self, inner: &GeneralMorphism) -> GeneralMorphism {
        let images = inner.images.iter().map(|w| self.apply(w)).collect();
        GeneralMorphism { alphabet: self.alphabet.clone(), images }
    }

    pub fn square(&self) -> GeneralMorphism {
        self.compose(self)
    }

    /// Smallest power `self^k` whose images all have length at least `min_len`.
    pub fn power_with_min_len(&self, min_len: usize) -> (GeneralMorphism, usize) {
        let mut cur = self.clone();
        let mut k = 1;
        while cur.min_image_len() < min_len && k < 64 {
            cur = self.compose(&cur);
            k += 1;
        }
        (cur, k)
    }

    /// Rule list `a->ab;b->ba` (labels separated by spaces when multi-character).
    pub fn rules(&self) -> Vec<(String, String)> {
        self.alphabet
            .letters()
            .map(|l| (self.alphabet.label(l).to_string(), self.alphabet.render(self.image(l))))
            .collect()
    }
}

impl fmt::Display for GeneralMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.rules().into_iter().map(|(l, r)| format!("{l}->{r}")).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Parses `a->ab;b->ba`. Whitespace is ignored, `,` is accepted as separator.
pub fn parse_morphism(spec: &str) -> Result<GeneralMorphism> {
    let alpha = Alphabet::binary();
    let cleaned: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let mut images: Vec<Option<Word>> = vec![None; alpha.len()];
    for rule in cleaned.split([';', ',']).filter(|r| !r.is_empty()) {
        let (lhs, rhs) = rule.split_once("->").ok_or_else(|| Error::MalformedRule(rule.into()))?;
        if lhs.chars().count() != 1 {
            return Err(Error::MalformedRule(rule.into()));
        }
        let letter = alpha.lookup(lhs).ok_or_else(|| Error::UnknownLetter(lhs.into()))?;
        if rhs.is_empty() {
            return Err(Error::EmptyImage(lhs.into()));
        }
        if rhs.contains("->") {
            return Err(Error::MalformedRule(rule.into()));
        }
        let img = alpha.parse_word(rhs)?;
        if images[letter.index()].replace(img).is_some() {
            return Err(Error::DuplicateRule(lhs.into()));
        }
    }
    let mut out = Vec::with_capacity(images.len());
    for (i, img) in images.into_iter().enumerate() {
        out.push(img.ok_or_else(|| Error::MissingRule(alpha.labels()[i].clone()))?);
    }
    GeneralMorphism::new(alpha, out)
}

/// Square matrix of non-negative counts. Entry `(i, j)` counts letter `i` in
/// the image of letter `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    entries: Vec<Vec<u64>>,
}

impl IntMatrix {
    pub fn from_rows(entries: Vec<Vec<u64>>) -> Self {
        IntMatrix { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.size();
        let mut out = vec![vec![0u64; n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for k in 0..n {
                let x = self.entries[i][k];
                if x == 0 {
                    continue;
                }
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell += x * other.entries[k][j];
                }
            }
        }
        IntMatrix { entries: out }
    }

    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|&x| x > 0))
    }

    pub fn column_sums(&self) -> Vec<u64> {
        let n = self.size();
        (0..n).map(|j| (0..n).map(|i| self.entries[i][j]).sum()).collect()
    }

    pub fn trace(&self) -> i64 {
        (0..self.size()).map(|i| self.entries[i][i] as i64).sum()
    }
}

pub fn matrix(m: &GeneralMorphism) -> IntMatrix {
    let q = m.size();
    let mut entries = vec![vec![0u64; q]; q];
    for j in m.alphabet().letters() {
        for &l in m.image(j).letters() {
            entries[l.index()][j.index()] += 1;
        }
    }
    IntMatrix { entries }
}

/// Primitivity via the zero pattern: a primitive `q×q` matrix has a positive
/// power of exponent at most `q² − 2q + 2`, and positive powers stay positive,
/// so repeated boolean squaring past that exponent decides it.
pub fn is_primitive(m: &GeneralMorphism) -> bool {
    let q = m.size();
    let bound = q * q - 2 * q + 2;
    let words = q.div_ceil(64);
    // Row i holds the set of j with entry (i, j) non-zero.
    let mut rows: Vec<Vec<u64>> = vec![vec![0u64; words]; q];
    for j in m.alphabet().letters() {
        for &l in m.image(j).letters() {
            rows[l.index()][j.index() / 64] |= 1 << (j.index() % 64);
        }
    }
    let mut exp = 1usize;
    loop {
        if exp >= bound {
            return rows
                .iter()
                .all(|r| (0..q).all(|j| r[j / 64] & (1 << (j % 64)) != 0));
        }
        let mut next = vec![vec![0u64; words]; q];
        for i in 0..q {
            for k in 0..q {
                if rows[i][k / 64] & (1 << (k % 64)) != 0 {
                    for w in 0..words {
                        next[i][w] |= rows[k][w];
                    }
                }
            }
        }
        rows = next;
        exp *= 2;
    }
}

/// Letters `x` whose image starts with `x` and differs from `x`.
pub fn fixed_point_letters(m: &GeneralMorphism) -> BTreeSet<Letter> {
    m.alphabet()
        .letters()
        .filter(|&x| {
            let img = m.image(x);
            img.first() == Some(x) && img.len() > 1
        })
        .collect()
}

/// First `n` letters of the fixed point starting with `x`.
pub fn fixed_point_prefix(m: &GeneralMorphism, x: Letter, n: usize) -> Result<Word> {
    if !fixed_point_letters(m).contains(&x) {
        return Err(Error::NotFixedPointLetter(m.alphabet().label(x).to_string()));
    }
    if n == 0 {
        return Ok(Word::new());
    }
    let mut w = m.image(x).0.clone();
    let mut i = 1;
    while w.len() < n {
        let l = w[i];
        w.extend_from_slice(&m.image(l).0);
        i += 1;
    }
    w.truncate(n);
    Ok(Word(w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Admissible,
    PeriodicFixedPoint,
    NoFixedPoint,
    NotUniformlyRecurrent,
    UnsupportedShape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validity {
    pub verdict: Verdict,
    pub detail: String,
}

impl Validity {
    fn new(verdict: Verdict, detail: impl Into<String>) -> Self {
        Validity { verdict, detail: detail.into() }
    }

    pub fn is_admissible(&self) -> bool {
        self.verdict == Verdict::Admissible
    }
}

/// `w == head (tail)^k` for some `k >= 1`; returns `k`.
fn repeat_count(w: &[Letter], head: &[Letter], tail: &[Letter]) -> Option<usize> {
    let rest = w.strip_prefix(head)?;
    if tail.is_empty() || rest.is_empty() || rest.len() % tail.len() != 0 {
        return None;
    }
    rest.chunks(tail.len()).all(|c| c == tail).then_some(rest.len() / tail.len())
}

fn primitive_root(w: &[Letter]) -> &[Letter] {
    let n = w.len();
    for p in 1..=n {
        if n.is_multiple_of(p) && w.chunks(p).all(|c| c == &w[..p]) {
            return &w[..p];
        }
    }
    w
}

/// Rejection patterns for binary morphisms. Morphisms passing every check are
/// treated as having aperiodic, uniformly recurrent fixed points.
pub fn admissibility(m: &GeneralMorphism) -> Validity {
    use Verdict::*;
    if !m.is_binary() {
        return Validity::new(UnsupportedShape, "only binary morphisms are accepted");
    }
    let fixed = fixed_point_letters(m);
    if fixed.is_empty() {
        return Validity::new(NoFixedPoint, "no image starts with its own letter");
    }
    let (a, b) = (Letter::A, Letter::B);
    let ia = m.image(a).letters();
    let ib = m.image(b).letters();

    // a(ba)^m, b(ab)^n with m + n >= 1.
    let ba = [b, a];
    let ab = [a, b];
    let pm = if ia == [a] { Some(0) } else { repeat_count(ia, &[a], &ba) };
    let pn = if ib == [b] { Some(0) } else { repeat_count(ib, &[b], &ab) };
    if let (Some(pm), Some(pn)) = (pm, pn) {
        if pm + pn >= 1 {
            return Validity::new(
                PeriodicFixedPoint,
                format!("periodic fixed point: images a(ba)^{pm} and b(ab)^{pn}"),
            );
        }
    }
    let ra = primitive_root(ia);
    if ra.len() >= 2 && ra == primitive_root(ib) {
        return Validity::new(
            PeriodicFixedPoint,
            format!(
                "periodic fixed point: images are powers of {}",
                m.alphabet().render(&Word(ra.to_vec()))
            ),
        );
    }

    if is_primitive(m) {
        return Validity::new(Admissible, "primitive");
    }

    // Non-primitive: some letter y never produces the other letter x.
    let (x, y) = if !ia.contains(&b) && !ib.contains(&a) {
        return Validity::new(PeriodicFixedPoint, "periodic fixed point: each image is a power of its letter");
    } else if !ib.contains(&a) {
        (a, b)
    } else if !ia.contains(&b) {
        (b, a)
    } else {
        // Both off-diagonal entries positive but not primitive: both diagonal
        // entries are zero, so no image starts with its own letter.
        return Validity::new(NoFixedPoint, "images swap the letters");
    };
    let ix = m.image(x).letters();
    let iy = m.image(y).letters();
    let lx = m.alphabet().label(x).to_string();
    let ly = m.alphabet().label(y).to_string();
    if !fixed.contains(&x) {
        return Validity::new(PeriodicFixedPoint, format!("periodic fixed point {ly}^ω"));
    }
    if iy.len() >= 2 {
        return Validity::new(
            UnsupportedShape,
            format!("non-primitive with {ly} -> {ly}^{}: the {ly}-runs grow without bound", iy.len()),
        );
    }
    if ix.last() != Some(&x) {
        return Validity::new(
            NotUniformlyRecurrent,
            format!("non-primitive with {ly} fixed and φ({lx}) not ending in {lx}"),
        );
    }
    // φ(x) = x (y^k x)^n is periodic.
    for k in 1..ix.len() {
        let mut block = vec![y; k];
        block.push(x);
        if repeat_count(ix, &[x], &block).is_some() {
            return Validity::new(
                PeriodicFixedPoint,
                format!("periodic fixed point: φ({lx}) = {lx}({ly}^{k}{lx})^n, φ({ly}) = {ly}"),
            );
        }
    }
    Validity::new(Admissible, format!("non-primitive of shape {lx} -> {lx}w{lx}, {ly} -> {ly}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm(a: &str, b: &str) -> GeneralMorphism {
        GeneralMorphism::binary(a, b).unwrap()
    }

    #[test]
    fn parses_thue_morse() {
        let m = parse_morphism("a->ab;b->ba").unwrap();
        assert_eq!(m, bm("ab", "ba"));
        let m = parse_morphism(" a -> ab , b->ba ").unwrap();
        assert_eq!(m.to_string(), "a->ab;b->ba");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_morphism("a->a"), Err(Error::MissingRule(_))));
        assert!(matches!(parse_morphism("a->ab;b->"), Err(Error::EmptyImage(_))));
        assert!(matches!(parse_morphism("a->ab;c->a"), Err(Error::UnknownLetter(_))));
        assert!(matches!(parse_morphism("a->ab;b->ac"), Err(Error::UnknownLetter(_))));
        assert!(matches!(parse_morphism("a=ab;b->a"), Err(Error::MalformedRule(_))));
        assert!(matches!(parse_morphism("a->ab;a->b;b->a"), Err(Error::DuplicateRule(_))));
    }

    #[test]
    fn matrices_use_column_convention() {
        let rows = |m: &GeneralMorphism| matrix(m).rows().to_vec();
        assert_eq!(rows(&bm("ab", "ba")), vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(rows(&bm("ab", "a")), vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(rows(&bm("aba", "bbb")), vec![vec![2, 0], vec![1, 3]]);
        let m = bm("aab", "b");
        assert_eq!(matrix(&m).column_sums(), vec![3, 1]);
    }

    #[test]
    fn primitivity_verdicts() {
        assert!(is_primitive(&bm("ab", "ba")));
        assert!(is_primitive(&bm("ab", "a")));
        assert!(!is_primitive(&bm("aba", "bbb")));
        assert!(!is_primitive(&bm("aaba", "b")));
    }

    #[test]
    fn fixed_letters() {
        let set = |m: GeneralMorphism| fixed_point_letters(&m).into_iter().collect::<Vec<_>>();
        assert_eq!(set(bm("ab", "ba")), vec![Letter::A, Letter::B]);
        assert_eq!(set(bm("ba", "bab")), vec![Letter::B]);
        assert_eq!(set(bm("ab", "aa")), vec![Letter::A]);
    }

    #[test]
    fn prefixes() {
        let tm = bm("ab", "ba");
        assert_eq!(fixed_point_prefix(&tm, Letter::A, 16).unwrap(), Word::binary("abbabaabbaababba").unwrap());
        let m = bm("aaba", "b");
        assert_eq!(fixed_point_prefix(&m, Letter::A, 13).unwrap(), Word::binary("aabaaababaaba").unwrap());
        assert!(fixed_point_prefix(&tm, Letter::A, 0).unwrap().is_empty());
        assert!(fixed_point_prefix(&bm("ba", "bab"), Letter::A, 3).is_err());
    }

    #[test]
    fn admissibility_patterns() {
        use Verdict::*;
        let v = |a: &str, b: &str| admissibility(&bm(a, b)).verdict;
        assert_eq!(v("a", "bab"), PeriodicFixedPoint);
        assert_eq!(v("ab", "bab"), Admissible);
        assert_eq!(v("aba", "bab"), PeriodicFixedPoint);
        assert_eq!(v("abab", "ab"), PeriodicFixedPoint);
        assert_eq!(v("aaba", "b"), Admissible);
        assert_eq!(v("ab", "ba"), Admissible);
        assert_eq!(v("ab", "a"), Admissible);
        assert_eq!(v("aba", "bbb"), UnsupportedShape);
        assert_eq!(v("ab", "b"), NotUniformlyRecurrent);
        assert_eq!(v("aba", "b"), PeriodicFixedPoint);
        assert_eq!(v("abba", "b"), PeriodicFixedPoint);
        assert_eq!(v("abbaba", "b"), Admissible);
        assert_eq!(v("ba", "ab"), NoFixedPoint);
        assert_eq!(v("b", "a"), NoFixedPoint);
        assert_eq!(v("aa", "bb"), PeriodicFixedPoint);
    }

    #[test]
    fn composition_matrix_is_product() {
        let m = bm("aab", "ba");
        assert_eq!(matrix(&m.square()), matrix(&m).mul(&matrix(&m)));
    }
}
