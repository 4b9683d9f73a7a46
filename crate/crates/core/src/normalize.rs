//! Bringing a binary morphism into order-preserving form with images ending in
//! distinct letters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{GeneralMorphism, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Preserving,
    Reversing,
}

fn common_prefix_len(x: &[Letter], y: &[Letter]) -> usize {
    x.iter().zip(y).take_while(|(p, q)| p == q).count()
}

fn common_suffix_len(x: &[Letter], y: &[Letter]) -> usize {
    x.iter().rev().zip(y.iter().rev()).take_while(|(p, q)| p == q).count()
}

/// Decides whether `u < v` implies `φ(u) < φ(v)` on infinite words.
///
/// When one image is a prefix of the other, the common prefix is rotated to
/// the end of both images; this conjugate compares infinite images exactly as
/// the original does.
pub fn orientation(m: &GeneralMorphism) -> Result<Orientation> {
    if !m.is_binary() {
        return Err(Error::Inadmissible("orientation is defined for binary morphisms".into()));
    }
    let mut x = m.image(Letter::A).0.clone();
    let mut y = m.image(Letter::B).0.clone();
    let cap = x.len() + y.len();
    for _ in 0..=cap {
        let lcp = common_prefix_len(&x, &y);
        if lcp < x.len().min(y.len()) {
            return Ok(if x[lcp] < y[lcp] { Orientation::Preserving } else { Orientation::Reversing });
        }
        if x == y {
            break;
        }
        let p = x[..lcp].to_vec();
        x.rotate_left(lcp);
        y = [&y[lcp..], &p[..]].concat();
    }
    Err(Error::OrientationCap { cap })
}

pub fn square_if_reversing(m: &GeneralMorphism) -> Result<GeneralMorphism> {
    Ok(match orientation(m)? {
        Orientation::Preserving => m.clone(),
        Orientation::Reversing => m.square(),
    })
}

/// Record of the passage from the input morphism to the prepared one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationTrace {
    pub input_orientation: Orientation,
    pub squared: bool,
    /// Morphism whose fixed points are those of the input (input or its square).
    pub source: GeneralMorphism,
    /// Common suffixes in the order they were moved.
    pub transfers: Vec<Word>,
    /// Last transfer first; `prepared(w) = pi · source(w)`.
    pub pi: Word,
    pub prepared: GeneralMorphism,
}

impl NormalizationTrace {
    pub fn shift(&self) -> usize {
        self.pi.len()
    }
}

/// Moves the maximal common suffix of the two images to their front until the
/// last letters differ.
pub fn transfer_suffixes(m: &GeneralMorphism) -> Result<(GeneralMorphism, Vec<Word>)> {
    let mut x = m.image(Letter::A).0.clone();
    let mut y = m.image(Letter::B).0.clone();
    let bound = x.len().max(y.len()) / x.len().min(y.len()) + 1;
    let mut transfers = Vec::new();
    loop {
        let s = common_suffix_len(&x, &y);
        if s == 0 {
            break;
        }
        if transfers.len() == bound {
            return Err(Error::TransferBound { bound });
        }
        let suffix = x[x.len() - s..].to_vec();
        x.rotate_right(s);
        y.rotate_right(s);
        transfers.push(Word(suffix));
    }
    let prepared = GeneralMorphism::new(m.alphabet().clone(), vec![Word(x), Word(y)])?;
    Ok((prepared, transfers))
}

pub fn normalize(m: &GeneralMorphism) -> Result<NormalizationTrace> {
    let input_orientation = orientation(m)?;
    let squared = input_orientation == Orientation::Reversing;
    let source = if squared { m.square() } else { m.clone() };
    let (prepared, transfers) = transfer_suffixes(&source)?;
    let pi = Word(transfers.iter().rev().flat_map(|w| w.0.iter().copied()).collect());
    if orientation(&prepared)? != Orientation::Preserving {
        return Err(Error::Consistency("prepared morphism is not order-preserving".into()));
    }
    Ok(NormalizationTrace { input_orientation, squared, source, transfers, pi, prepared })
}
