//! The sequence `ν_w` of a fixed point, read off the interval morphism.
//!
//! The lifted fixed point `u` satisfies `u = σ^p(μ(u))` for the final morphism
//! `μ`, where `p = |π|`. Position `n` of `u` is therefore position `j` of the
//! image of `u[n′]`, and `ν[n] = f_{u[n′], j}(ν[n′])`. Following these links
//! from any index ends in a cycle; the composed map around it is a contraction
//! whose fixed point is solved exactly, and the rest is back-substituted.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extend::{lift_word, Coding};
use crate::intervals::{apply_piece, IntervalMorphism};
use crate::language::TypeTag;
use crate::normalize::NormalizationTrace;
use crate::qfield::{rat, ExtReal, FieldDesc, QNum};
use crate::words::{fixed_point_prefix, GeneralMorphism, Letter, Word};

/// `ν[index] = f_piece(ν[parent])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub index: usize,
    pub parent: usize,
    pub piece: TypeTag,
}

/// A cycle of links. `indices[0]` is the fixed point of the composition
/// `f_{pieces[0]} ∘ … ∘ f_{pieces[len−1]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchor {
    pub indices: Vec<usize>,
    pub pieces: Vec<TypeTag>,
    pub value: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuSequence {
    pub source: Letter,
    pub field: Arc<FieldDesc>,
    pub terms: Vec<ExtReal>,
    /// Link of every emitted index.
    pub links: Vec<ChainLink>,
    pub anchors: Vec<Anchor>,
    /// Letters of the lifted fixed point at the emitted indices.
    pub letters: Vec<Letter>,
}

/// Link of index `n` given the final-alphabet word `u` and the shift `p`.
pub fn chain_map(u: &Word, p: usize, im: &IntervalMorphism, n: usize) -> Result<ChainLink> {
    let target = n + p;
    let mut start = 0;
    for (i, &l) in u.letters().iter().enumerate() {
        let len = im.pieces[l.index()].len();
        if target < start + len {
            return Ok(ChainLink { index: n, parent: i, piece: TypeTag::new(l, target - start) });
        }
        start += len;
    }
    Err(Error::PrefixTooShort(n))
}

/// Prefix of the lifted fixed point together with cumulative image lengths.
struct Chase<'a> {
    original: &'a GeneralMorphism,
    coding: Option<&'a Coding>,
    im: &'a IntervalMorphism,
    source: Letter,
    shift: usize,
    u: Word,
    cum: Vec<usize>,
}

impl<'a> Chase<'a> {
    fn grow(&mut self, len: usize) -> Result<()> {
        let extra = self.coding.map_or(0, |c| c.delay() - 1);
        let w = fixed_point_prefix(self.original, self.source, len + extra)?;
        self.u = match self.coding {
            Some(c) => lift_word(&w, c)?,
            None => w,
        };
        self.cum = Vec::with_capacity(self.u.len() + 1);
        let mut acc = 0;
        self.cum.push(0);
        for &l in self.u.letters() {
            acc += self.im.pieces[l.index()].len();
            self.cum.push(acc);
        }
        Ok(())
    }

    fn link(&mut self, n: usize) -> Result<ChainLink> {
        let target = n + self.shift;
        while *self.cum.last().expect("non-empty") <= target || self.u.len() <= n {
            let len = (2 * self.u.len()).max(n + 1);
            self.grow(len)?;
        }
        let parent = self.cum.partition_point(|&c| c <= target) - 1;
        let letter = self.u.0[parent];
        Ok(ChainLink { index: n, parent, piece: TypeTag::new(letter, target - self.cum[parent]) })
    }
}

/// Default bound on the number of links followed.
pub fn default_chain_cap(terms: usize, shift: usize) -> usize {
    10 * (terms + shift) + 1000
}

/// First `count` terms of `ν_w` for the fixed point `w` of `original` starting
/// with `x`.
pub fn generate_nu(
    original: &GeneralMorphism,
    trace: &NormalizationTrace,
    coding: Option<&Coding>,
    im: &IntervalMorphism,
    x: Letter,
    count: usize,
    chain_cap: Option<usize>,
) -> Result<NuSequence> {
    let shift = trace.shift();
    let cap = chain_cap.unwrap_or_else(|| default_chain_cap(count, shift));
    let mut chase = Chase { original, coding, im, source: x, shift, u: Word::new(), cum: vec![0] };
    chase.grow((2 * (count + shift)).max(64))?;

    let field = im.field.clone();
    let one = QNum::one(&field);
    let mut links: HashMap<usize, ChainLink> = HashMap::new();
    let mut values: HashMap<usize, ExtReal> = HashMap::new();
    let mut anchors = Vec::new();
    let mut followed = 0usize;

    for n in 0..count {
        if values.contains_key(&n) {
            continue;
        }
        let mut path: Vec<usize> = Vec::new();
        let mut position: HashMap<usize, usize> = HashMap::new();
        let mut cur = n;
        let cycle_start = loop {
            if values.contains_key(&cur) {
                break None;
            }
            if let Some(&k) = position.get(&cur) {
                break Some(k);
            }
            position.insert(cur, path.len());
            path.push(cur);
            followed += 1;
            if followed > cap {
                return Err(Error::ChainCap { cap });
            }
            let link = match links.get(&cur) {
                Some(l) => *l,
                None => {
                    let l = chase.link(cur)?;
                    links.insert(cur, l);
                    l
                }
            };
            cur = link.parent;
        };

        let mut resolved_from = path.len();
        if let Some(k) = cycle_start {
            let cycle = path[k..].to_vec();
            let pieces: Vec<TypeTag> = cycle.iter().map(|c| links[c].piece).collect();
            // x ↦ s·x + K for the composition, outermost piece first.
            let mut s = one.clone();
            let mut kk = QNum::zero(&field);
            for t in &pieces {
                let f = im.piece(*t);
                kk = &kk + &(&s * &f.intercept);
                s = &s * &f.slope;
            }
            let expected = one.checked_div(&field.theta().pow(pieces.len() as u32))?;
            if s != expected || s.compare(&one)? != Ordering::Less {
                return Err(Error::Consistency(format!("cycle slope {s} is not a contraction")));
            }
            let fixed = kk.checked_div(&(&one - &s))?;
            let innermost = im.piece(*pieces.last().expect("non-empty cycle"));
            let mut lo = innermost.domain.lo.clone();
            let mut hi = innermost.domain.hi.clone();
            for t in pieces.iter().rev() {
                lo = apply_piece(im.piece(*t), &lo)?;
                hi = apply_piece(im.piece(*t), &hi)?;
            }
            let value = if fixed == lo.value {
                lo
            } else if fixed == hi.value {
                hi
            } else {
                ExtReal::neutral(fixed)
            };
            values.insert(cycle[0], value.clone());
            for i in (1..cycle.len()).rev() {
                let next = cycle[(i + 1) % cycle.len()];
                let v = apply_piece(im.piece(pieces[i]), &values[&next])?;
                values.insert(cycle[i], v);
            }
            anchors.push(Anchor { indices: cycle, pieces, value });
            resolved_from = k;
        }
        for i in (0..resolved_from).rev() {
            let idx = path[i];
            let link = links[&idx];
            let v = apply_piece(im.piece(link.piece), &values[&link.parent])?;
            values.insert(idx, v);
        }
    }

    let mut terms = Vec::with_capacity(count);
    let mut emitted = Vec::with_capacity(count);
    for n in 0..count {
        let link = links[&n];
        let replay = apply_piece(im.piece(link.piece), &values[&link.parent])?;
        if replay != values[&n] {
            return Err(Error::Consistency(format!("replay of ν[{n}] gives {replay}, stored {}", values[&n])));
        }
        terms.push(values[&n].clone());
        emitted.push(link);
    }
    let mut sorted: Vec<&QNum> = terms.iter().map(|t| &t.value).collect();
    sorted.sort_by(|a, b| a.compare(b).expect("shared field"));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Consistency("two terms of ν share a value".into()));
    }
    if chase.u.len() < count {
        chase.grow(count)?;
    }
    let letters = chase.u.0[..count].to_vec();
    Ok(NuSequence { source: x, field, terms, links: emitted, anchors, letters })
}

/// `ν[kn + p] = ν[n]/k + C_{u[n],p}` for a `k`-uniform final morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRegular {
    pub k: usize,
    /// `constants[a][p] = C_{a,p}`.
    pub constants: Vec<Vec<QNum>>,
}

impl KRegular {
    pub fn predict(&self, nu_n: &QNum, letter: Letter, p: usize) -> QNum {
        &nu_n.scale(&rat(1, self.k as i64)) + &self.constants[letter.index()][p]
    }
}

pub fn kregular_recurrence(im: &IntervalMorphism, m_final: &GeneralMorphism) -> Result<KRegular> {
    let k = m_final.uniform_len().ok_or(Error::NotUniform)?;
    if k < 2 {
        return Err(Error::NotUniform);
    }
    let constants = im.pieces.iter().map(|row| row.iter().map(|p| p.intercept.clone()).collect()).collect();
    Ok(KRegular { k, constants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::build_interval_morphism;
    use crate::language::Language;
    use crate::normalize::normalize;
    use crate::qfield::{dominant_root, solve_frequencies};
    use crate::words::matrix;

    struct Fixture {
        original: GeneralMorphism,
        trace: NormalizationTrace,
        im: IntervalMorphism,
    }

    fn fixture(a: &str, b: &str) -> Fixture {
        let original = GeneralMorphism::binary(a, b).unwrap();
        let trace = normalize(&original).unwrap();
        let m = &trace.prepared;
        let field = dominant_root(&matrix(m)).unwrap();
        let freqs = solve_frequencies(&matrix(m), &field).unwrap();
        let mut lang = Language::new(m).unwrap();
        let d = lang.synchronization_delay(64).unwrap();
        let order = lang.typing_and_separability(d).unwrap().type_order.unwrap();
        let im = build_interval_morphism(m, &freqs, &order, &field).unwrap();
        Fixture { original, trace, im }
    }

    fn rendered(f: &Fixture, x: Letter, n: usize) -> Vec<String> {
        let seq = generate_nu(&f.original, &f.trace, None, &f.im, x, n, None).unwrap();
        seq.terms.iter().map(ExtReal::render).collect()
    }

    #[test]
    fn thue_morse_sequences() {
        let f = fixture("ab", "ba");
        assert_eq!(rendered(&f, Letter::A, 8), ["1/2-", "1", "3/4-", "1/4-", "5/8-", "1/8-", "3/8-", "7/8-"]);
        assert_eq!(rendered(&f, Letter::B, 8), ["1/2+", "0", "1/4+", "3/4+", "3/8+", "7/8+", "5/8+", "1/8+"]);
    }

    #[test]
    fn shifted_fixed_points() {
        let f = fixture("aab", "abb");
        assert_eq!(f.trace.shift(), 1);
        // 10/18 in reduced form.
        assert_eq!(rendered(&f, Letter::A, 5), ["0", "1/6+", "5/9+", "1/18+", "2/9+"]);
        let g = fixture("baa", "bab");
        assert_eq!(rendered(&g, Letter::B, 4), ["3/4", "5/12", "11/12", "23/36"]);
    }

    #[test]
    fn anchors_of_the_babab_system() {
        let f = fixture("ab", "babab");
        assert_eq!(f.trace.shift(), 5);
        let t = |l, o| TypeTag::new(l, o);
        let anchors = |x| {
            let seq = generate_nu(&f.original, &f.trace, None, &f.im, x, 3, None).unwrap();
            seq.anchors.iter().map(|a| (a.indices.clone(), a.pieces.clone())).collect::<Vec<_>>()
        };
        // One-based ν[2], ν[3] are zero-based indices 1 and 2.
        assert_eq!(anchors(Letter::A), [(vec![1], vec![t(Letter::B, 4)]), (vec![2], vec![t(Letter::B, 0)])]);
        assert_eq!(anchors(Letter::B), [(vec![1], vec![t(Letter::A, 1)]), (vec![2], vec![t(Letter::B, 0)])]);
        let seq = generate_nu(&f.original, &f.trace, None, &f.im, Letter::A, 1, None).unwrap();
        assert_eq!(seq.links[0].piece, t(Letter::B, 3));
    }

    #[test]
    fn chain_map_examples() {
        let f = fixture("ab", "ba");
        let w = fixed_point_prefix(&f.original, Letter::A, 32).unwrap();
        let l = chain_map(&w, 0, &f.im, 0).unwrap();
        assert_eq!((l.parent, l.piece), (0, TypeTag::new(Letter::A, 0)));
        for n in 0..40 {
            let l = chain_map(&w, 0, &f.im, n).unwrap();
            assert_eq!((l.parent, l.piece.offset), (n / 2, n % 2));
        }
        assert_eq!(chain_map(&w, 0, &f.im, 64), Err(Error::PrefixTooShort(64)));
    }

    #[test]
    fn fixed_point_equation_without_shift() {
        let f = fixture("ab", "ba");
        let seq = generate_nu(&f.original, &f.trace, None, &f.im, Letter::A, 200, None).unwrap();
        for n in 0..100 {
            let img = &f.im.pieces[seq.letters[n].index()];
            for (j, piece) in img.iter().enumerate() {
                assert_eq!(apply_piece(piece, &seq.terms[n]).unwrap(), seq.terms[2 * n + j]);
            }
        }
    }

    #[test]
    fn recurrence_matches_generation() {
        let f = fixture("ab", "ba");
        let rec = kregular_recurrence(&f.im, &f.trace.prepared).unwrap();
        assert_eq!(rec.k, 2);
        let c: Vec<String> = rec.constants.iter().flatten().map(QNum::exact).collect();
        assert_eq!(c, ["1/4", "3/4", "1/4", "-1/4"]);
        let seq = generate_nu(&f.original, &f.trace, None, &f.im, Letter::A, 1024, None).unwrap();
        for n in 0..512 {
            for p in 0..2 {
                assert_eq!(rec.predict(&seq.terms[n].value, seq.letters[n], p), seq.terms[2 * n + p].value);
            }
        }
        let fib = fixture("ab", "a");
        assert_eq!(kregular_recurrence(&fib.im, &fib.trace.prepared), Err(Error::NotUniform));
    }

    #[test]
    fn chain_cap_is_enforced() {
        let f = fixture("ab", "babab");
        let r = generate_nu(&f.original, &f.trace, None, &f.im, Letter::A, 50, Some(3));
        assert_eq!(r, Err(Error::ChainCap { cap: 3 }));
    }
}
