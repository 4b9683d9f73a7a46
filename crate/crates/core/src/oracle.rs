//! Brute-force ground truth on a long fixed-point prefix: shift comparison,
//! empirical `ν`, factor frequencies and discrepancy.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::qfield::{rat, ExtReal, QNum, Rational};
use crate::words::{fixed_point_prefix, GeneralMorphism, Letter, Word};

const INITIAL_DEPTH: usize = 64;
const MAX_PREFIX: usize = 1 << 24;

/// A fixed-point prefix used to compare shifts of the infinite word.
#[derive(Debug, Clone)]
pub struct PrefixUniverse {
    w: Word,
    depth: usize,
    source: Option<(GeneralMorphism, Letter)>,
}

impl PrefixUniverse {
    pub fn new(w: Word) -> Self {
        PrefixUniverse { w, depth: INITIAL_DEPTH, source: None }
    }

    /// Prefix of length `len` of the fixed point of `m` from `x`; comparisons
    /// through [`PrefixUniverse::compare`] regenerate it longer when needed.
    pub fn from_fixed_point(m: &GeneralMorphism, x: Letter, len: usize) -> Result<Self> {
        let w = fixed_point_prefix(m, x, len)?;
        Ok(PrefixUniverse { w, depth: INITIAL_DEPTH, source: Some((m.clone(), x)) })
    }

    pub fn word(&self) -> &Word {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn compare_within(&self, i: usize, j: usize, depth: usize) -> Option<Ordering> {
        let a = &self.w.0[i.min(self.w.len())..];
        let b = &self.w.0[j.min(self.w.len())..];
        let span = depth.min(a.len()).min(b.len());
        (0..span).find(|&k| a[k] != b[k]).map(|k| a[k].cmp(&b[k]))
    }

    /// Lexicographic comparison of `σ^i(w)` and `σ^j(w)` by first difference
    /// on the available prefix.
    pub fn shift_compare(&self, i: usize, j: usize) -> Result<Ordering> {
        if i == j {
            return Ok(Ordering::Equal);
        }
        let mut depth = self.depth;
        loop {
            if let Some(o) = self.compare_within(i, j, depth) {
                return Ok(o);
            }
            if depth >= self.w.len() {
                return Err(Error::NoDifference(i, j));
            }
            depth *= 2;
        }
    }

    /// Like [`PrefixUniverse::shift_compare`], growing the depth and, for a
    /// known fixed point, the prefix.
    pub fn compare(&mut self, i: usize, j: usize) -> Result<Ordering> {
        loop {
            match self.shift_compare(i, j) {
                Err(Error::NoDifference(..)) => {}
                other => return other,
            }
            let Some((m, x)) = &self.source else { return Err(Error::NoDifference(i, j)) };
            let len = 2 * self.w.len().max(i.max(j) + 1);
            if len > MAX_PREFIX {
                return Err(Error::NoDifference(i, j));
            }
            self.w = fixed_point_prefix(m, *x, len)?;
            self.depth = (2 * self.depth).min(self.w.len());
        }
    }
}

/// `#{k < T : σ^k(w) < σ^n(w)} / T`.
pub fn empirical_nu(pu: &mut PrefixUniverse, n: usize, samples: usize) -> Result<Rational> {
    if samples == 0 {
        return Ok(Rational::zero());
    }
    let mut below = 0i64;
    for k in 0..samples {
        if pu.compare(k, n)? == Ordering::Less {
            below += 1;
        }
    }
    Ok(rat(below, samples as i64))
}

/// Occurrences of `u` in the prefix divided by the number of windows.
pub fn empirical_frequency(pu: &PrefixUniverse, u: &Word) -> Rational {
    let w = pu.word();
    if u.is_empty() || u.len() > w.len() {
        return Rational::zero();
    }
    let windows = w.len() - u.len() + 1;
    let hits = w.0.windows(u.len()).filter(|win| *win == u.letters()).count();
    rat(hits as i64, windows as i64)
}

/// Star discrepancy of the value parts: `max_i max(|i/N − v₍ᵢ₎|, |(i+1)/N − v₍ᵢ₎|)`.
pub fn discrepancy(values: &[ExtReal]) -> Result<QNum> {
    let first = values.first().ok_or_else(|| Error::Consistency("empty value list".into()))?;
    let field = first.value.field().clone();
    let mut sorted: Vec<&QNum> = values.iter().map(|v| &v.value).collect();
    sorted.sort_by(|a, b| a.compare(b).expect("shared field"));
    let n = values.len() as i64;
    let mut worst = QNum::zero(&field);
    for (i, v) in sorted.into_iter().enumerate() {
        for k in [i as i64, i as i64 + 1] {
            let gap = (&QNum::rational(&field, rat(k, n)) - v).abs();
            if gap.compare(&worst)? == Ordering::Greater {
                worst = gap;
            }
        }
    }
    Ok(worst)
}

/// Pairs `(i, j)`, `i < j`, where the order of `ν` terms and the order of the
/// shifts disagree.
pub fn order_mismatches(pu: &mut PrefixUniverse, terms: &[ExtReal]) -> Result<Vec<(usize, usize)>> {
    let mut bad = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            if terms[i].cmp(&terms[j]) != pu.compare(i, j)? {
                bad.push((i, j));
            }
        }
    }
    Ok(bad)
}

/// Pairs of terms with the same value, i.e. the greatest element of one
/// cylinder and the least of the next both in one orbit. Never non-zero for
/// an aperiodic recurrent word.
pub fn maxmin_conflicts(terms: &[ExtReal]) -> usize {
    let mut sorted: Vec<&ExtReal> = terms.iter().collect();
    sorted.sort();
    sorted.windows(2).filter(|w| w[0].value == w[1].value).count()
}

/// `|a − b|` as a float, for reporting statistical bands.
pub fn gap_f64(a: &Rational, b: &QNum) -> f64 {
    let x = QNum::rational(b.field(), a.clone());
    (&x - b).abs().to_f64()
}

/// True when the rational is at most `bound` in absolute value.
pub fn within(r: &Rational, bound: &Rational) -> bool {
    r.abs() <= *bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::{FieldDesc, Tag};

    fn tm(len: usize) -> PrefixUniverse {
        let m = GeneralMorphism::binary("ab", "ba").unwrap();
        PrefixUniverse::from_fixed_point(&m, Letter::A, len).unwrap()
    }

    fn close(r: &Rational, target: Rational, tol: Rational) -> bool {
        within(&(r - target), &tol)
    }

    #[test]
    fn shift_comparisons() {
        let pu = tm(4096);
        assert_eq!(pu.shift_compare(0, 1).unwrap(), Ordering::Less);
        assert_eq!(pu.shift_compare(5, 5).unwrap(), Ordering::Equal);
        assert_eq!(pu.shift_compare(3, 2).unwrap(), Ordering::Less);
        let short = PrefixUniverse::new(Word::binary("abab").unwrap());
        assert_eq!(short.shift_compare(0, 2), Err(Error::NoDifference(0, 2)));
    }

    #[test]
    fn prefix_regrows_on_demand() {
        let mut pu = tm(16);
        assert_eq!(pu.shift_compare(0, 12), Err(Error::NoDifference(0, 12)));
        assert_eq!(pu.compare(0, 12).unwrap(), Ordering::Greater);
        assert!(pu.len() > 16);
    }

    #[test]
    fn empirical_values() {
        let mut pu = tm(100_000);
        let tol = rat(1, 50);
        assert!(close(&empirical_nu(&mut pu, 0, 4096).unwrap(), rat(1, 2), tol.clone()));
        assert!(close(&empirical_nu(&mut pu, 1, 4096).unwrap(), rat(1, 1), tol.clone()));
        let m = GeneralMorphism::binary("baa", "bab").unwrap();
        let mut pv = PrefixUniverse::from_fixed_point(&m, Letter::B, 100_000).unwrap();
        assert!(close(&empirical_nu(&mut pv, 0, 4096).unwrap(), rat(3, 4), tol));

        let f = |s: &str| empirical_frequency(&pu, &Word::binary(s).unwrap());
        assert!(close(&f("a"), rat(1, 2), rat(1, 100)));
        assert!(close(&f("aa"), rat(1, 6), rat(1, 100)));
        assert!(f("ab") > Rational::zero());
    }

    #[test]
    fn discrepancy_formula() {
        let field = FieldDesc::rational(2);
        let pts = |v: Vec<Rational>| -> Vec<ExtReal> {
            v.into_iter().map(|r| ExtReal::neutral(QNum::rational(&field, r))).collect()
        };
        let n = 10;
        let grid = pts((0..n).map(|i| rat(i, n)).collect());
        assert_eq!(discrepancy(&grid).unwrap(), QNum::rational(&field, rat(1, n)));
        let constant = pts(vec![rat(1, 3); 4]);
        assert_eq!(discrepancy(&constant).unwrap(), QNum::rational(&field, rat(2, 3)));
    }

    #[test]
    fn conflicts_need_equal_values() {
        let field = FieldDesc::rational(2);
        let half = QNum::rational(&field, rat(1, 2));
        let a = ExtReal::new(half.clone(), Tag::Minus);
        let b = ExtReal::new(half, Tag::Plus);
        let c = ExtReal::neutral(QNum::rational(&field, rat(1, 4)));
        assert_eq!(maxmin_conflicts(&[a.clone(), c.clone()]), 0);
        assert_eq!(maxmin_conflicts(&[a, b, c]), 1);
    }
}
