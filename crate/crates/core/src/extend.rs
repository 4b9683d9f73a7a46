//! Recoding onto the alphabet of length-`D` factors and the morphism χ on it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::language::{lift_with, FactorSet, TypeTag};
use crate::qfield::{rat, solve_frequencies, FieldDesc, QNum};
use crate::words::{fixed_point_letters, fixed_point_prefix, Alphabet, GeneralMorphism, IntMatrix, Letter, Word};

/// Bijection between length-`D` factors and extended letters, with the
/// first-letter projection ρ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coding {
    delay: usize,
    base: Alphabet,
    alphabet: Alphabet,
    factors: Vec<Word>,
    index: BTreeMap<Word, Letter>,
    rho: Vec<Letter>,
}

impl Coding {
    /// Letters follow the lexicographic order of the factors and are labelled
    /// `x_i`, ranked among factors starting with the same letter `x`.
    pub fn new(base: &Alphabet, facts: &FactorSet) -> Result<Coding> {
        if facts.length == 0 || facts.is_empty() {
            return Err(Error::Consistency("empty factor set for coding".into()));
        }
        let mut rank: BTreeMap<Letter, usize> = BTreeMap::new();
        let mut labels = Vec::with_capacity(facts.len());
        let mut index = BTreeMap::new();
        let mut rho = Vec::with_capacity(facts.len());
        for (i, u) in facts.factors.iter().enumerate() {
            let first = u.0[0];
            let r = rank.entry(first).or_insert(0);
            *r += 1;
            labels.push(format!("{}_{}", base.label(first), r));
            index.insert(u.clone(), Letter(i as u16));
            rho.push(first);
        }
        Ok(Coding {
            delay: facts.length,
            base: base.clone(),
            alphabet: Alphabet::new(labels),
            factors: facts.factors.clone(),
            index,
            rho,
        })
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn base(&self) -> &Alphabet {
        &self.base
    }

    pub fn size(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Word] {
        &self.factors
    }

    pub fn factor(&self, l: Letter) -> &Word {
        &self.factors[l.index()]
    }

    pub fn code(&self, u: &Word) -> Option<Letter> {
        self.index.get(u).copied()
    }

    pub fn index_map(&self) -> &BTreeMap<Word, Letter> {
        &self.index
    }

    pub fn rho(&self, l: Letter) -> Letter {
        self.rho[l.index()]
    }

    /// Letterwise ρ.
    pub fn project(&self, w: &Word) -> Word {
        Word(w.0.iter().map(|&l| self.rho(l)).collect())
    }
}

/// Sliding-window code of a binary word; `|w| − D + 1` letters.
pub fn lift_word(w: &Word, coding: &Coding) -> Result<Word> {
    lift_with(&coding.index, w, coding.delay).map_err(|e| match e {
        Error::UnknownWindow(_) => {
            let bad = w
                .windows(coding.delay)
                .find(|u| coding.code(u).is_none())
                .map(|u| coding.base.render(&u))
                .unwrap_or_else(|| coding.base.render(w));
            Error::UnknownWindow(bad)
        }
        other => other,
    })
}

/// χ(π(u)) is the code of the first `|φ(u₀)| + D − 1` letters of `φ(u)`.
pub fn build_chi(m: &GeneralMorphism, coding: &Coding) -> Result<GeneralMorphism> {
    let d = coding.delay;
    let mut images = Vec::with_capacity(coding.size());
    for u in &coding.factors {
        let x = u.0[0];
        let img = m.apply(u);
        let needed = m.image_len(x) + d - 1;
        if img.len() < needed {
            return Err(Error::ChiLength {
                letter: coding.base.render(u),
                needed,
                delay: d,
            });
        }
        images.push(lift_word(&img.slice(0, needed), coding)?);
    }
    GeneralMorphism::new(coding.alphabet.clone(), images)
}

/// The extended letter starting the lift of the fixed point of `m` from `x`.
pub fn lifted_start(m: &GeneralMorphism, coding: &Coding, x: Letter) -> Result<Letter> {
    let prefix = fixed_point_prefix(m, x, coding.delay)?;
    coding.code(&prefix).ok_or_else(|| Error::UnknownWindow(coding.base.render(&prefix)))
}

/// Facts established by [`verify_chi`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiDiagnostics {
    /// Number of distinct χ-images.
    pub distinct_images: usize,
    /// Extended letters starting fixed points of χ, in letter order.
    pub fixed_letters: Vec<Letter>,
}

/// Checks `ρ∘χ = φ∘ρ`, the last-letter property of χ-images, and that fixed
/// points of χ project onto the fixed points of `m`.
pub fn verify_chi(m: &GeneralMorphism, chi: &GeneralMorphism, coding: &Coding) -> Result<ChiDiagnostics> {
    let fail = |msg: String| Err(Error::Consistency(msg));
    if chi.size() != coding.size() {
        return fail(format!("χ has {} letters, coding has {}", chi.size(), coding.size()));
    }
    for e in chi.alphabet().letters() {
        if coding.project(chi.image(e)) != *m.image(coding.rho(e)) {
            return fail(format!("ρ(χ({})) differs from φ(ρ)", coding.alphabet.label(e)));
        }
    }

    let distinct: BTreeSet<&Word> = chi.images().iter().collect();
    let mut last_of: BTreeMap<Letter, &Word> = BTreeMap::new();
    for img in &distinct {
        let last = img.last().expect("non-erasing");
        if let Some(other) = last_of.insert(last, img) {
            if other != *img {
                return fail(format!("two χ-images end with {}", coding.alphabet.label(last)));
            }
        }
    }
    for img in &distinct {
        for &l in &img.0[..img.len() - 1] {
            if last_of.contains_key(&l) {
                return fail(format!("final letter {} occurs inside a χ-image", coding.alphabet.label(l)));
            }
        }
    }

    let fixed_chi: Vec<Letter> = fixed_point_letters(chi).into_iter().collect();
    let fixed_m = fixed_point_letters(m);
    if fixed_chi.len() != fixed_m.len() {
        return fail(format!("χ has {} fixed points, φ has {}", fixed_chi.len(), fixed_m.len()));
    }
    for &e in &fixed_chi {
        let x = coding.rho(e);
        if !fixed_m.contains(&x) {
            return fail(format!("fixed point of χ from {} projects outside", coding.alphabet.label(e)));
        }
        let n = 256;
        if coding.project(&fixed_point_prefix(chi, e, n)?) != fixed_point_prefix(m, x, n)? {
            return fail(format!("ρ-image of the fixed point from {} is not a fixed point", coding.alphabet.label(e)));
        }
    }
    Ok(ChiDiagnostics { distinct_images: distinct.len(), fixed_letters: fixed_chi })
}

/// Letter frequencies of χ. Letters with equal images have equal columns,
/// so the eigenproblem is solved on the distinct images and each letter's
/// frequency is read back from the images it occurs in.
pub fn chi_frequencies(chi: &GeneralMorphism, field: &Arc<FieldDesc>) -> Result<Vec<QNum>> {
    let mut classes: Vec<&Word> = Vec::new();
    for img in chi.images() {
        if !classes.contains(&img) {
            classes.push(img);
        }
    }
    let class_of = |l: Letter| classes.iter().position(|c| *c == chi.image(l)).expect("listed");
    let k = classes.len();
    // count[y][K]: occurrences of y in the image K.
    let mut count = vec![vec![0u64; k]; chi.size()];
    for (j, img) in classes.iter().enumerate() {
        for &y in img.letters() {
            count[y.index()][j] += 1;
        }
    }
    let mut reduced = vec![vec![0u64; k]; k];
    for y in chi.alphabet().letters() {
        for j in 0..k {
            reduced[class_of(y)][j] += count[y.index()][j];
        }
    }
    let nu = solve_frequencies(&IntMatrix::from_rows(reduced), field)?;
    let inv_theta = field.theta().inverse()?;
    let mu: Vec<QNum> = count
        .iter()
        .map(|row| {
            let s = row.iter().zip(&nu).fold(QNum::zero(field), |s, (&c, v)| &s + &v.scale(&rat(c as i64, 1)));
            &s * &inv_theta
        })
        .collect();
    let theta = field.theta();
    let mut back = vec![QNum::zero(field); chi.size()];
    for x in chi.alphabet().letters() {
        for &y in chi.image(x).letters() {
            back[y.index()] = &back[y.index()] + &mu[x.index()];
        }
    }
    for (b, m) in back.iter().zip(&mu) {
        if *b != m * &theta || m.signum() != Ordering::Greater {
            return Err(Error::Consistency("χ frequencies are not a positive θ-eigenvector".into()));
        }
    }
    Ok(mu)
}

/// Order of the types of χ, read off the images. Two tails `σ^p χ(x)` are
/// compared letter by letter; when one runs out first, its last letter occurs
/// nowhere else, so equal overlaps force equal images and then `p` and `x`
/// decide. Letters are numbered in the order of their factors.
pub fn chi_type_order(chi: &GeneralMorphism) -> Result<Vec<TypeTag>> {
    let mut types: Vec<TypeTag> = chi
        .alphabet()
        .letters()
        .flat_map(|x| (0..chi.image_len(x)).map(move |p| TypeTag::new(x, p)))
        .collect();
    let mut clash = None;
    types.sort_by(|s, t| {
        let a = &chi.image(s.letter).0[s.offset..];
        let b = &chi.image(t.letter).0[t.offset..];
        let common = a.len().min(b.len());
        match a[..common].cmp(&b[..common]) {
            Ordering::Equal if a.len() == b.len() && chi.image(s.letter) == chi.image(t.letter) => {
                s.letter.cmp(&t.letter)
            }
            Ordering::Equal => {
                clash.get_or_insert((*s, *t));
                a.len().cmp(&b.len())
            }
            o => o,
        }
    });
    match clash {
        None => Ok(types),
        Some((s, t)) => Err(Error::Consistency(format!(
            "types ({}, {}) and ({}, {}) of χ are not comparable from the images",
            chi.alphabet().label(s.letter),
            s.offset,
            chi.alphabet().label(t.letter),
            t.offset
        ))),
    }
}
