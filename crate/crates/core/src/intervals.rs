//! The extended-interval structure `I_a`, `J_{a,p}` and the affine interval
//! morphism of a separable order-preserving morphism.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::language::TypeTag;
use crate::qfield::{ExtReal, FieldDesc, Interval, QNum, Tag};
use crate::words::{GeneralMorphism, Letter};

/// `f_{a,p}(x) = x/θ + C`, mapping `I_a` onto `J_{a,p}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffinePiece {
    pub tag: TypeTag,
    pub domain: Interval,
    pub range: Interval,
    pub slope: QNum,
    pub intercept: QNum,
}

impl AffinePiece {
    pub fn eval(&self, x: &QNum) -> QNum {
        &(x * &self.slope) + &self.intercept
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalMorphism {
    pub field: Arc<FieldDesc>,
    pub frequencies: Vec<QNum>,
    pub letter_intervals: Vec<Interval>,
    /// Pieces per letter, by offset.
    pub pieces: Vec<Vec<AffinePiece>>,
    pub type_order: Vec<TypeTag>,
}

/// Consecutive closed intervals of the given lengths covering `[0, 1]`, with
/// `-`/`+` at the internal cuts and bare outer ends.
fn partition(field: &Arc<FieldDesc>, lengths: &[QNum]) -> Vec<Interval> {
    let mut out = Vec::with_capacity(lengths.len());
    let mut acc = QNum::zero(field);
    for (i, len) in lengths.iter().enumerate() {
        let lo_tag = if i == 0 { Tag::Neutral } else { Tag::Plus };
        let hi_tag = if i + 1 == lengths.len() { Tag::Neutral } else { Tag::Minus };
        let next = &acc + len;
        let hi = if i + 1 == lengths.len() { QNum::one(field) } else { next.clone() };
        out.push(Interval::new(ExtReal::new(acc, lo_tag), ExtReal::new(hi, hi_tag)));
        acc = next;
    }
    out
}

pub fn build_interval_morphism(
    m: &GeneralMorphism,
    freqs: &[QNum],
    type_order: &[TypeTag],
    field: &Arc<FieldDesc>,
) -> Result<IntervalMorphism> {
    let q = m.size();
    if freqs.len() != q || type_order.len() != m.total_image_len() {
        return Err(Error::Consistency("frequency or type table size mismatch".into()));
    }
    let one = QNum::one(field);
    let total = freqs.iter().fold(QNum::zero(field), |s, f| &s + f);
    if total != one {
        return Err(Error::Consistency(format!("frequencies sum to {total}")));
    }
    let theta = field.theta();
    let slope = one.checked_div(&theta)?;
    let letter_intervals = partition(field, freqs);
    let j_lengths: Vec<QNum> = type_order.iter().map(|t| &freqs[t.letter.index()] * &slope).collect();
    let ranges = partition(field, &j_lengths);

    let mut pieces: Vec<Vec<Option<AffinePiece>>> =
        (0..q).map(|i| vec![None; m.image_len(Letter(i as u16))]).collect();
    for (t, range) in type_order.iter().zip(ranges) {
        let domain = letter_intervals[t.letter.index()].clone();
        if domain.length().signum() != Ordering::Greater || range.length().signum() != Ordering::Greater {
            return Err(Error::Consistency(format!("empty interval for type {t:?}")));
        }
        if &domain.length() * &slope != range.length() {
            return Err(Error::Consistency(format!("slope of piece {t:?} is not 1/θ")));
        }
        let target = m.image(t.letter).0[t.offset];
        let host = &letter_intervals[target.index()];
        if !(host.contains(&range.lo) && host.contains(&range.hi)) {
            return Err(Error::Consistency(format!("J{t:?} is not inside I of its first letter")));
        }
        let intercept = &range.lo.value - &(&domain.lo.value * &slope);
        let slot = &mut pieces[t.letter.index()][t.offset];
        if slot.is_some() {
            return Err(Error::Consistency(format!("type {t:?} listed twice")));
        }
        *slot = Some(AffinePiece { tag: *t, domain, range, slope: slope.clone(), intercept });
    }
    let pieces = pieces
        .into_iter()
        .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Consistency("type order misses a type".into()))?;
    Ok(IntervalMorphism {
        field: field.clone(),
        frequencies: freqs.to_vec(),
        letter_intervals,
        pieces,
        type_order: type_order.to_vec(),
    })
}

impl IntervalMorphism {
    pub fn piece(&self, t: TypeTag) -> &AffinePiece {
        &self.pieces[t.letter.index()][t.offset]
    }

    pub fn pieces_in_type_order(&self) -> impl Iterator<Item = &AffinePiece> {
        self.type_order.iter().map(|&t| self.piece(t))
    }
}

/// Applies a piece. Domain endpoints go to the matching range endpoints with
/// their tags; any other point keeps its own tag.
pub fn apply_piece(piece: &AffinePiece, x: &ExtReal) -> Result<ExtReal> {
    if !piece.domain.contains(x) {
        return Err(Error::DomainViolation { value: x.render(), piece: format!("{:?}", piece.tag) });
    }
    if x.value == piece.domain.lo.value {
        return Ok(piece.range.lo.clone());
    }
    if x.value == piece.domain.hi.value {
        return Ok(piece.range.hi.clone());
    }
    Ok(ExtReal::new(piece.eval(&x.value), x.tag))
}

/// The letter `a` with `x ∈ I_a`.
pub fn coding_projection(x: &ExtReal, im: &IntervalMorphism) -> Result<Letter> {
    let hits: Vec<usize> =
        (0..im.letter_intervals.len()).filter(|&i| im.letter_intervals[i].contains(x)).collect();
    match hits.as_slice() {
        [i] => Ok(Letter(*i as u16)),
        [] => Err(Error::DomainViolation { value: x.render(), piece: "[0, 1]".into() }),
        _ => Err(Error::AmbiguousProjection(x.render())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::Language;
    use crate::qfield::{dominant_root, rat, solve_frequencies};
    use crate::words::matrix;

    fn build(a: &str, b: &str) -> (GeneralMorphism, IntervalMorphism) {
        let m = GeneralMorphism::binary(a, b).unwrap();
        let field = dominant_root(&matrix(&m)).unwrap();
        let freqs = solve_frequencies(&matrix(&m), &field).unwrap();
        let mut lang = Language::new(&m).unwrap();
        let d = lang.synchronization_delay(64).unwrap();
        let order = lang.typing_and_separability(d).unwrap().type_order.unwrap();
        let im = build_interval_morphism(&m, &freqs, &order, &field).unwrap();
        (m, im)
    }

    fn intercepts(im: &IntervalMorphism, l: Letter) -> Vec<String> {
        im.pieces[l.index()].iter().map(|p| p.intercept.exact()).collect()
    }

    #[test]
    fn thue_morse_pieces() {
        let (_, im) = build("ab", "ba");
        assert_eq!(im.field.theta().exact(), "2");
        assert_eq!(intercepts(&im, Letter::A), ["1/4", "3/4"]);
        assert_eq!(intercepts(&im, Letter::B), ["1/4", "-1/4"]);
        let ranges: Vec<String> = im.pieces.iter().flatten().map(|p| p.range.render()).collect();
        assert_eq!(ranges, ["[1/4+, 1/2-]", "[3/4+, 1]", "[1/2+, 3/4-]", "[0, 1/4-]"]);
        assert_eq!(im.letter_intervals[0].render(), "[0, 1/2-]");
        assert_eq!(im.letter_intervals[1].render(), "[1/2+, 1]");
    }

    #[test]
    fn transferred_pieces() {
        let (_, im) = build("baa", "bab");
        assert_eq!(intercepts(&im, Letter::A), ["1/2", "0", "1/6"]);
        assert_eq!(intercepts(&im, Letter::B), ["1/2", "1/6", "2/3"]);
    }

    #[test]
    fn partition_identities() {
        for (a, b) in [("ab", "ba"), ("aba", "ab"), ("baa", "bab"), ("ba", "babab")] {
            let (_, im) = build(a, b);
            let f = &im.field;
            let sum_j = im.pieces.iter().flatten().fold(QNum::zero(f), |s, p| &s + &p.range.length());
            let sum_i = im.letter_intervals.iter().fold(QNum::zero(f), |s, i| &s + &i.length());
            assert_eq!(sum_j, QNum::one(f));
            assert_eq!(sum_i, QNum::one(f));
            for p in im.pieces.iter().flatten() {
                assert_eq!(&p.slope * &f.theta(), QNum::one(f));
                assert_eq!(p.eval(&p.domain.lo.value), p.range.lo.value);
                assert_eq!(p.eval(&p.domain.hi.value), p.range.hi.value);
            }
        }
    }

    #[test]
    fn tagged_application() {
        let (_, im) = build("ab", "ba");
        let f = im.field.clone();
        let q = |n, d| QNum::rational(&f, rat(n, d));
        let half_minus = ExtReal::new(q(1, 2), Tag::Minus);
        let fa0 = im.piece(TypeTag::new(Letter::A, 0));
        let fa1 = im.piece(TypeTag::new(Letter::A, 1));
        let fb1 = im.piece(TypeTag::new(Letter::B, 1));
        assert_eq!(apply_piece(fa0, &half_minus).unwrap(), half_minus);
        assert_eq!(apply_piece(fa1, &half_minus).unwrap().render(), "1");
        let sixth = ExtReal::neutral(q(1, 6));
        let once = apply_piece(fa1, &sixth).unwrap();
        assert_eq!(once.value, q(5, 6));
        assert_eq!(apply_piece(fb1, &once).unwrap(), sixth);
        assert!(matches!(
            apply_piece(fb1, &ExtReal::new(q(1, 2), Tag::Minus)),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn projection() {
        let (_, im) = build("ab", "ba");
        let f = im.field.clone();
        let q = |n, d| QNum::rational(&f, rat(n, d));
        assert_eq!(coding_projection(&ExtReal::new(q(1, 2), Tag::Minus), &im).unwrap(), Letter::A);
        assert_eq!(coding_projection(&ExtReal::new(q(1, 2), Tag::Plus), &im).unwrap(), Letter::B);
        assert_eq!(coding_projection(&ExtReal::neutral(q(7, 8)), &im).unwrap(), Letter::B);
        assert!(matches!(
            coding_projection(&ExtReal::neutral(q(1, 2)), &im),
            Err(Error::AmbiguousProjection(_))
        ));
    }

    #[test]
    fn projection_follows_images() {
        for (a, b) in [("ab", "ba"), ("aba", "ab"), ("baa", "bab")] {
            let (m, im) = build(a, b);
            let f = im.field.clone();
            for k in 1..200i64 {
                let x = ExtReal::neutral(QNum::rational(&f, rat(k, 200)));
                let Ok(d) = coding_projection(&x, &im) else { continue };
                let image: Vec<Letter> = im.pieces[d.index()]
                    .iter()
                    .map(|p| coding_projection(&apply_piece(p, &x).unwrap(), &im).unwrap())
                    .collect();
                assert_eq!(image, m.image(d).0, "{a}/{b} at {k}/200");
            }
        }
    }
}
