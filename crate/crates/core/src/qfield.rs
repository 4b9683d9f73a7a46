//! Exact arithmetic in `Q(θ)`, `θ` the dominant root of `x² − t·x + d`, and
//! the side-tagged reals that populate the extended unit interval.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::IntMatrix;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `θ` is the larger root of `x² − trace·x + det`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDesc {
    pub trace: i64,
    pub det: i64,
    pub discriminant: i64,
    /// Set when `θ` is rational; elements are then stored with `b = 0`.
    pub rational_theta: Option<Rational>,
}

impl FieldDesc {
    pub fn new(trace: i64, det: i64) -> Result<Arc<FieldDesc>> {
        let discriminant = trace * trace - 4 * det;
        if discriminant < 0 {
            return Err(Error::DegenerateMatrix(format!("complex roots of x^2 - {trace}x + {det}")));
        }
        let s = discriminant.sqrt();
        let rational_theta = (s * s == discriminant).then(|| rat(trace + s, 2));
        let field = FieldDesc { trace, det, discriminant, rational_theta };
        if field.theta_f64() <= 1.0 {
            return Err(Error::DegenerateMatrix(field.polynomial()));
        }
        Ok(Arc::new(field))
    }

    /// Field with a rational generator `θ = value`.
    pub fn rational(value: i64) -> Arc<FieldDesc> {
        FieldDesc::new(value + 1, value).expect("rational generator above 1")
    }

    pub fn is_rational(&self) -> bool {
        self.rational_theta.is_some()
    }

    pub fn theta_f64(&self) -> f64 {
        (self.trace as f64 + (self.discriminant as f64).sqrt()) / 2.0
    }

    /// Minimal polynomial of `θ` over `Q`.
    pub fn polynomial(&self) -> String {
        match &self.rational_theta {
            Some(r) => format!("θ - {r}"),
            None => {
                let t = match self.trace {
                    0 => String::new(),
                    1 => " - θ".into(),
                    t if t > 0 => format!(" - {t}θ"),
                    t => format!(" + {}θ", -t),
                };
                let d = match self.det {
                    0 => String::new(),
                    d if d > 0 => format!(" + {d}"),
                    d => format!(" - {}", -d),
                };
                format!("θ^2{t}{d}")
            }
        }
    }

    pub fn theta(self: &Arc<Self>) -> QNum {
        match &self.rational_theta {
            Some(r) => QNum::rational(self, r.clone()),
            None => QNum { a: Zero::zero(), b: One::one(), field: self.clone() },
        }
    }

    pub fn same(&self, other: &FieldDesc) -> bool {
        self.trace == other.trace && self.det == other.det
    }
}

/// Dominant root of the characteristic polynomial of a `2×2` matrix.
pub fn dominant_root(m: &IntMatrix) -> Result<Arc<FieldDesc>> {
    if m.size() != 2 {
        return Err(Error::Consistency("dominant_root expects a 2x2 matrix".into()));
    }
    let g = |i, j| m.get(i, j) as i64;
    FieldDesc::new(g(0, 0) + g(1, 1), g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0))
}

/// `a + b·θ` with rational `a`, `b`.
#[derive(Clone)]
pub struct QNum {
    a: Rational,
    b: Rational,
    field: Arc<FieldDesc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl QNum {
    pub fn new(field: &Arc<FieldDesc>, a: Rational, b: Rational) -> QNum {
        match &field.rational_theta {
            Some(t) => QNum { a: a + b * t, b: Zero::zero(), field: field.clone() },
            None => QNum { a, b, field: field.clone() },
        }
    }

    pub fn rational(field: &Arc<FieldDesc>, a: Rational) -> QNum {
        QNum { a, b: Zero::zero(), field: field.clone() }
    }

    pub fn from_int(field: &Arc<FieldDesc>, n: i64) -> QNum {
        QNum::rational(field, rat_int(n))
    }

    pub fn zero(field: &Arc<FieldDesc>) -> QNum {
        QNum::from_int(field, 0)
    }

    pub fn one(field: &Arc<FieldDesc>) -> QNum {
        QNum::from_int(field, 1)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn check(&self, other: &QNum) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field.same(&other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, o: &QNum) -> Result<QNum> {
        self.check(o)?;
        Ok(QNum { a: &self.a + &o.a, b: &self.b + &o.b, field: self.field.clone() })
    }

    pub fn checked_sub(&self, o: &QNum) -> Result<QNum> {
        self.check(o)?;
        Ok(QNum { a: &self.a - &o.a, b: &self.b - &o.b, field: self.field.clone() })
    }

    pub fn checked_mul(&self, o: &QNum) -> Result<QNum> {
        self.check(o)?;
        if self.field.is_rational() {
            return Ok(QNum::rational(&self.field, &self.a * &o.a));
        }
        // θ² = tθ − d
        let t = rat_int(self.field.trace);
        let d = rat_int(self.field.det);
        let bb = &self.b * &o.b;
        let a = &self.a * &o.a - &bb * d;
        let b = &self.a * &o.b + &self.b * &o.a + bb * t;
        Ok(QNum { a, b, field: self.field.clone() })
    }

    pub fn inverse(&self) -> Result<QNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.field.is_rational() {
            return Ok(QNum::rational(&self.field, self.a.recip()));
        }
        // (a + bθ)(a + bθ') with θ' = t − θ is the norm a² + abt + b²d.
        let t = rat_int(self.field.trace);
        let d = rat_int(self.field.det);
        let norm = &self.a * &self.a + &self.a * &self.b * &t + &self.b * &self.b * d;
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let a = (&self.a + &self.b * t) / &norm;
        let b = -(&self.b) / norm;
        Ok(QNum { a, b, field: self.field.clone() })
    }

    pub fn checked_div(&self, o: &QNum) -> Result<QNum> {
        self.check(o)?;
        self.checked_mul(&o.inverse()?)
    }

    pub fn arith(&self, o: &QNum, op: ArithOp) -> Result<QNum> {
        match op {
            ArithOp::Add => self.checked_add(o),
            ArithOp::Sub => self.checked_sub(o),
            ArithOp::Mul => self.checked_mul(o),
            ArithOp::Div => self.checked_div(o),
        }
    }

    pub fn scale(&self, r: &Rational) -> QNum {
        QNum { a: &self.a * r, b: &self.b * r, field: self.field.clone() }
    }

    pub fn pow(&self, mut e: u32) -> QNum {
        let mut base = self.clone();
        let mut acc = QNum::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Sign at the real embedding `θ = (t + √disc)/2`, decided with rationals only.
    pub fn signum(&self) -> Ordering {
        if self.b.is_zero() {
            return self.a.cmp(&Zero::zero());
        }
        // a + bθ = p + q√disc with p = a + bt/2 and q = b/2.
        let p = &self.a + &self.b * rat(self.field.trace, 2);
        let q = &self.b / rat_int(2);
        let zero = Rational::zero();
        match (p.cmp(&zero), q.cmp(&zero)) {
            (Ordering::Equal, s) => s,
            (s, Ordering::Equal) => s,
            (ps, qs) if ps == qs => ps,
            (ps, _) => {
                // Opposite signs: the larger magnitude wins.
                let lhs = &p * &p;
                let rhs = &q * &q * rat_int(self.field.discriminant);
                match lhs.cmp(&rhs) {
                    Ordering::Greater => ps,
                    Ordering::Less => ps.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn compare(&self, o: &QNum) -> Result<Ordering> {
        Ok(self.checked_sub(o)?.signum())
    }

    pub fn abs(&self) -> QNum {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * self.field.theta_f64()
    }

    /// Exact floor, via an integer square root when `θ` is irrational.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // a + bθ = (P + Q√disc) / den
        let p = &self.a + &self.b * rat(self.field.trace, 2);
        let q = &self.b / rat_int(2);
        let den = p.denom().lcm(q.denom());
        let big_p = p.numer() * (&den / p.denom());
        let big_q = q.numer() * (&den / q.denom());
        let r = (&big_q * &big_q * BigInt::from(self.field.discriminant)).sqrt();
        // √(Q²·disc) is irrational, so it lies strictly between r and r + 1.
        let num = if big_q.is_positive() { big_p + r } else { big_p - r - 1 };
        num.div_floor(&den)
    }

    /// Decimal expansion rounded half-to-even at `digits` fractional digits.
    pub fn decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10).pow(digits as u32);
        let scaled = self.scale(&BigRational::from_integer(scale.clone()));
        let half = QNum::rational(&self.field, rat(1, 2));
        let shifted = &scaled + &half;
        let mut r = shifted.floor();
        // Ties only occur for rational values.
        if shifted.is_rational() && shifted.a.is_integer() && r.is_odd() {
            r -= 1;
        }
        let neg = r.is_negative();
        let mag = r.abs().to_string();
        let body = if digits == 0 {
            mag
        } else {
            let padded = format!("{:0>width$}", mag, width = digits + 1);
            let (int, frac) = padded.split_at(padded.len() - digits);
            format!("{int}.{frac}")
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    /// `p/q`, or `p/q + r/s·θ` when `θ` is irrational.
    pub fn exact(&self) -> String {
        if self.b.is_zero() {
            return self.a.to_string();
        }
        let coeff = |r: &Rational| if r.is_one() { "θ".to_string() } else { format!("{r}·θ") };
        if self.a.is_zero() {
            if self.b == -Rational::one() {
                return "-θ".into();
            }
            return coeff(&self.b);
        }
        if self.b.is_negative() {
            format!("{} - {}", self.a, coeff(&-self.b.clone()))
        } else {
            format!("{} + {}", self.a, coeff(&self.b))
        }
    }
}

impl PartialEq for QNum {
    fn eq(&self, other: &Self) -> bool {
        self.field.same(&other.field) && self.a == other.a && self.b == other.b
    }
}

impl Eq for QNum {}

impl PartialOrd for QNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other).ok()
    }
}

impl fmt::Debug for QNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact())
    }
}

impl fmt::Display for QNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&QNum> for &QNum {
            type Output = QNum;
            fn $m(self, rhs: &QNum) -> QNum {
                self.$checked(rhs).expect("operands share a field")
            }
        }
        impl $tr<QNum> for QNum {
            type Output = QNum;
            fn $m(self, rhs: QNum) -> QNum {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &QNum {
    type Output = QNum;
    fn neg(self) -> QNum {
        QNum { a: -self.a.clone(), b: -self.b.clone(), field: self.field.clone() }
    }
}

impl Neg for QNum {
    type Output = QNum;
    fn neg(self) -> QNum {
        -&self
    }
}

/// Perron eigenvector of `m` for the eigenvalue `θ`, normalized to sum 1.
/// Solved by Gaussian elimination over `Q(θ)`; the null space must be a line.
pub fn solve_frequencies(m: &IntMatrix, field: &Arc<FieldDesc>) -> Result<Vec<QNum>> {
    let n = m.size();
    let theta = field.theta();
    let mut rows: Vec<Vec<QNum>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = QNum::from_int(field, m.get(i, j) as i64);
                    if i == j {
                        &e - &theta
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    // Reduced row echelon form.
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inverse()?;
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x = &*x - &(&f * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return Err(Error::Consistency(format!(
            "eigenspace of θ has dimension {} (expected 1)",
            free.len()
        )));
    }
    let f = free[0];
    let mut v = vec![QNum::zero(field); n];
    v[f] = QNum::one(field);
    for (row, &c) in pivots.iter().enumerate() {
        v[c] = -&rows[row][f];
    }
    let sum = v.iter().fold(QNum::zero(field), |acc, x| &acc + x);
    if sum.is_zero() {
        return Err(Error::Consistency("zero eigenvector".into()));
    }
    let v: Vec<QNum> = v.iter().map(|x| x / &sum).collect();
    if v.iter().any(|x| x.signum() != Ordering::Greater) {
        return Err(Error::Consistency("eigenvector has a non-positive entry".into()));
    }
    Ok(v)
}

/// Side tag of a point of the extended interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Minus,
    Neutral,
    Plus,
}

impl Tag {
    pub fn suffix(self) -> &'static str {
        match self {
            Tag::Minus => "-",
            Tag::Neutral => "",
            Tag::Plus => "+",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::Minus => "minus",
            Tag::Neutral => "neutral",
            Tag::Plus => "plus",
        }
    }
}

/// A value of `Q(θ)` with a side tag. `x-` sorts before `x+`.
#[derive(Clone, PartialEq, Eq)]
pub struct ExtReal {
    pub value: QNum,
    pub tag: Tag,
}

impl ExtReal {
    pub fn new(value: QNum, tag: Tag) -> Self {
        ExtReal { value, tag }
    }

    pub fn neutral(value: QNum) -> Self {
        ExtReal { value, tag: Tag::Neutral }
    }

    /// True for the bare values 0 and 1, which print without a tag.
    pub fn is_unit_endpoint(&self) -> bool {
        self.value.is_rational() && (self.value.a().is_zero() || self.value.a().is_one())
    }

    pub fn shown_tag(&self) -> Tag {
        if self.is_unit_endpoint() {
            Tag::Neutral
        } else {
            self.tag
        }
    }

    pub fn render(&self) -> String {
        let tag = self.shown_tag();
        if self.value.is_rational() || tag == Tag::Neutral {
            format!("{}{}", self.value.exact(), tag.suffix())
        } else {
            format!("({}){}", self.value.exact(), tag.suffix())
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    /// Tags break ties only between equal values; the pipeline never emits a
    /// neutral point next to a tagged twin.
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .compare(&other.value)
            .expect("operands share a field")
            .then(self.tag.cmp(&other.tag))
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Closed interval of the extended line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: ExtReal,
    pub hi: ExtReal,
}

impl Interval {
    pub fn new(lo: ExtReal, hi: ExtReal) -> Self {
        Interval { lo, hi }
    }

    pub fn length(&self) -> QNum {
        &self.hi.value - &self.lo.value
    }

    /// Membership with tags consulted only at tagged endpoints.
    pub fn contains(&self, x: &ExtReal) -> bool {
        let lo = x.value.compare(&self.lo.value).expect("shared field");
        let hi = x.value.compare(&self.hi.value).expect("shared field");
        if lo == Ordering::Less || hi == Ordering::Greater {
            return false;
        }
        if lo == Ordering::Equal && self.lo.tag == Tag::Plus && x.tag == Tag::Minus {
            return false;
        }
        if hi == Ordering::Equal && self.hi.tag == Tag::Minus && x.tag == Tag::Plus {
            return false;
        }
        true
    }

    pub fn render(&self) -> String {
        format!("[{}, {}]", self.lo.render(), self.hi.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Arc<FieldDesc> {
        FieldDesc::new(3, 1).unwrap()
    }

    #[test]
    fn dominant_roots() {
        let tm = dominant_root(&IntMatrix::from_rows(vec![vec![1, 1], vec![1, 1]])).unwrap();
        assert_eq!(tm.rational_theta, Some(rat_int(2)));
        let f2 = dominant_root(&IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]])).unwrap();
        assert!(f2.rational_theta.is_none());
        assert_eq!((f2.trace, f2.det, f2.discriminant), (3, 1, 5));
        assert!((f2.theta_f64() - 2.618_033_988_749_895).abs() < 1e-12);
        let np = dominant_root(&IntMatrix::from_rows(vec![vec![3, 0], vec![1, 1]])).unwrap();
        assert_eq!(np.rational_theta, Some(rat_int(3)));
        assert!(dominant_root(&IntMatrix::from_rows(vec![vec![1, 0], vec![0, 1]])).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let two = FieldDesc::rational(2);
        let half = &QNum::one(&two) / &two.theta();
        assert_eq!(half, QNum::rational(&two, rat(1, 2)));

        let f = golden();
        let th = f.theta();
        let sq = &th * &th;
        assert_eq!((sq.a().clone(), sq.b().clone()), (rat_int(-1), rat_int(3)));
        let inv = th.inverse().unwrap();
        assert_eq!((inv.a().clone(), inv.b().clone()), (rat_int(3), rat_int(-1)));
        assert_eq!(&inv * &th, QNum::one(&f));
        assert!(QNum::zero(&f).inverse().is_err());
    }

    #[test]
    fn comparisons() {
        let f = golden();
        let th = f.theta();
        let half = QNum::rational(&f, rat(1, 2));
        assert_eq!(half.compare(&half).unwrap(), Ordering::Equal);
        let five_halves = QNum::rational(&f, rat(5, 2));
        assert_eq!(th.compare(&five_halves).unwrap(), Ordering::Greater);
        let three_minus = &QNum::from_int(&f, 3) - &th;
        assert_eq!(three_minus.signum(), Ordering::Greater);
        let other = FieldDesc::new(1, -1).unwrap();
        assert_eq!(th.compare(&other.theta()), Err(Error::FieldMismatch));
    }

    #[test]
    fn frequencies() {
        let tm = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 1]]);
        let f = dominant_root(&tm).unwrap();
        let v = solve_frequencies(&tm, &f).unwrap();
        assert_eq!(v, vec![QNum::rational(&f, rat(1, 2)); 2]);

        let m = IntMatrix::from_rows(vec![vec![3, 0], vec![1, 1]]);
        let f = dominant_root(&m).unwrap();
        let v = solve_frequencies(&m, &f).unwrap();
        assert_eq!(v, vec![QNum::rational(&f, rat(2, 3)), QNum::rational(&f, rat(1, 3))]);

        let fib2 = IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]]);
        let f = dominant_root(&fib2).unwrap();
        let v = solve_frequencies(&fib2, &f).unwrap();
        assert!((v[0].to_f64() - 0.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn decimals() {
        let f = FieldDesc::rational(2);
        let q = |n, d| QNum::rational(&f, rat(n, d));
        assert_eq!(q(1, 2).decimal(3), "0.500");
        assert_eq!(q(1, 8).decimal(2), "0.12");
        assert_eq!(q(3, 8).decimal(2), "0.38");
        assert_eq!(q(-1, 4).decimal(1), "-0.2");
        assert_eq!(q(7, 1).decimal(0), "7");
        let g = golden();
        assert_eq!(g.theta().decimal(20), "2.61803398874989484820");
        assert_eq!((&QNum::zero(&g) - &g.theta()).decimal(3), "-2.618");
    }

    #[test]
    fn rendering() {
        let g = golden();
        let x = QNum::new(&g, rat(1, 2), rat(-3, 4));
        assert_eq!(x.exact(), "1/2 - 3/4·θ");
        assert_eq!(g.theta().exact(), "θ");
        assert_eq!(g.polynomial(), "θ^2 - 3θ + 1");
        let f = FieldDesc::rational(2);
        assert_eq!(ExtReal::new(QNum::rational(&f, rat(1, 2)), Tag::Minus).render(), "1/2-");
        assert_eq!(ExtReal::new(QNum::one(&f), Tag::Minus).render(), "1");
    }

    #[test]
    fn ext_order_and_membership() {
        let f = FieldDesc::rational(2);
        let h = QNum::rational(&f, rat(1, 2));
        let lo = ExtReal::new(h.clone(), Tag::Minus);
        let hi = ExtReal::new(h.clone(), Tag::Plus);
        assert!(lo < hi);
        let ia = Interval::new(ExtReal::neutral(QNum::zero(&f)), lo.clone());
        assert!(ia.contains(&lo));
        assert!(!ia.contains(&hi));
        assert!(ia.contains(&ExtReal::neutral(QNum::rational(&f, rat(1, 3)))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn fields() -> Vec<Arc<FieldDesc>> {
            vec![golden(), FieldDesc::new(2, -1).unwrap(), FieldDesc::new(5, 2).unwrap(), FieldDesc::rational(3)]
        }

        fn number() -> impl Strategy<Value = (usize, i64, i64, i64, i64)> {
            (0..4usize, -50i64..50, 1i64..20, -50i64..50, 1i64..20)
        }

        fn build(field: &Arc<FieldDesc>, (_, an, ad, bn, bd): (usize, i64, i64, i64, i64)) -> QNum {
            if field.rational_theta.is_some() {
                QNum::rational(field, rat(an, ad))
            } else {
                QNum::new(field, rat(an, ad), rat(bn, bd))
            }
        }

        proptest! {
            #[test]
            fn ring_identities(x in number(), y in number()) {
                let f = &fields()[x.0];
                let (p, q) = (build(f, x), build(f, y));
                prop_assert_eq!(&(&p + &q) - &q, p.clone());
                prop_assert_eq!(&p * &q, &q * &p);
                if q.signum() != Ordering::Equal {
                    prop_assert_eq!(&(&p * &q) / &q, p.clone());
                    prop_assert_eq!(&q * &q.inverse().unwrap(), QNum::one(f));
                }
            }

            #[test]
            fn order_matches_floats(x in number(), y in number(), z in number()) {
                let f = &fields()[x.0];
                let (p, q, r) = (build(f, x), build(f, y), build(f, z));
                let pq = p.compare(&q).unwrap();
                prop_assert_eq!(pq, q.compare(&p).unwrap().reverse());
                if (p.to_f64() - q.to_f64()).abs() > 1e-9 {
                    prop_assert_eq!(pq, p.to_f64().partial_cmp(&q.to_f64()).unwrap());
                }
                if pq != Ordering::Greater && q.compare(&r).unwrap() != Ordering::Greater {
                    prop_assert!(p.compare(&r).unwrap() != Ordering::Greater);
                }
                prop_assert_eq!(p.signum(), p.compare(&QNum::zero(f)).unwrap());
            }

            #[test]
            fn decimals_track_value(x in number(), digits in 1usize..15) {
                let f = &fields()[x.0];
                let p = build(f, x);
                let d: f64 = p.decimal(digits).parse().unwrap();
                prop_assert!((d - p.to_f64()).abs() <= 10f64.powi(-(digits as i32)) + 1e-9 * p.to_f64().abs());
            }
        }
    }
}
