//! Dense univariate polynomials over ℤ and ℚ, Sturm sequences, and exact sign
//! evaluation at rationals and real quadratic surds.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Integer polynomial, coefficients in ascending order with no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    /// From coefficients written highest degree first, e.g. `[1, -6, 9, -3]`.
    pub fn from_desc(desc: &[i64]) -> Self {
        Self::new(desc.iter().rev().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_asc(asc: &[i64]) -> Self {
        Self::new(asc.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// The variable itself.
    pub fn var() -> Self {
        Self::from_asc(&[0, 1])
    }

    /// `t - a`.
    pub fn linear(a: i64) -> Self {
        Self::from_asc(&[-a, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn desc(&self) -> Vec<BigInt> {
        self.0.iter().rev().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigInt {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// `p(a + b·t)`.
    pub fn compose_linear(&self, a: &BigInt, b: &BigInt) -> Self {
        let inner = IntPoly::new(vec![a.clone(), b.clone()]);
        self.0.iter().rev().fold(IntPoly::default(), |acc, c| &(&acc * &inner) + &IntPoly::constant(c.clone()))
    }

    /// Exact quotient over ℤ, or `None` when the division leaves a remainder
    /// or needs fractions.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        let mut rem = self.0.clone();
        let dl = d.lead();
        let dd = d.deg();
        if self.is_zero() {
            return Some(IntPoly::default());
        }
        if self.deg() < dd {
            return None;
        }
        let mut quot = vec![BigInt::zero(); self.deg() - dd + 1];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&dl);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in d.0.iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        rem.iter().all(Zero::is_zero).then(|| IntPoly::new(quot))
    }

    /// Power sums `s_0 ..= s_n` of the roots of a monic polynomial, by Newton's identities.
    pub fn power_sums(&self, n: usize) -> Vec<BigInt> {
        assert!(self.is_monic(), "power sums need a monic polynomial");
        let d = self.deg();
        // e_j = (-1)^j a_{d-j}
        let e: Vec<BigInt> = (0..=d)
            .map(|j| {
                let c = self.coeff(d - j);
                if j % 2 == 0 { c } else { -c }
            })
            .collect();
        let mut s = vec![BigInt::from(d)];
        for k in 1..=n {
            let mut acc = BigInt::zero();
            for i in 1..=(k - 1).min(d) {
                let term = &e[i] * &s[k - i];
                if i % 2 == 1 { acc += term } else { acc -= term }
            }
            if k <= d {
                let term = &e[k] * BigInt::from(k);
                if k % 2 == 1 { acc += term } else { acc -= term }
            }
            s.push(acc);
        }
        s
    }

    pub fn to_q(&self) -> QPoly {
        QPoly::new(self.0.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Render with the given variable name, highest degree first.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if i == 0 || !a.is_one() {
                out.push_str(&a.to_string());
            }
            match i {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{i}")),
            }
        }
        out
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

/// Serialized as the coefficient list, highest degree first.
impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for c in self.0.iter().rev() {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.0.len().max(rhs.0.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.0.len().max(rhs.0.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::default();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.0.iter().map(|c| -c).collect())
    }
}

/// Rational polynomial, ascending coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QPoly(Vec<BigRational>);

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn derivative(&self) -> Self {
        QPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut rem = self.0.clone();
        if self.is_zero() || self.deg() < d.deg() {
            return (QPoly::default(), self.clone());
        }
        let dd = d.deg();
        let mut quot = vec![BigRational::zero(); self.deg() - dd + 1];
        for i in (0..quot.len()).rev() {
            let q = &rem[i + dd] / d.lead();
            if q.is_zero() {
                continue;
            }
            for (j, c) in d.0.iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn monic(&self) -> QPoly {
        let l = self.lead().clone();
        QPoly::new(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() { a } else { a.monic() }
    }

    /// Product of the distinct irreducible factors.
    pub fn squarefree(&self) -> QPoly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_surd(&self, x: &Surd) -> Surd {
        self.0.iter().rev().fold(Surd::rational(BigRational::zero(), x.d.clone()), |acc, c| {
            let mut v = acc.mul(x);
            v.a += c;
            v
        })
    }

    fn sign_at(&self, p: &Point) -> i32 {
        match p {
            Point::NegInf => {
                let s = sign(self.lead());
                if self.deg().is_multiple_of(2) { s } else { -s }
            }
            Point::PosInf => sign(self.lead()),
            Point::Rational(x) => sign(&self.eval(x)),
            Point::Surd(x) => self.eval_surd(x).sign(),
        }
    }
}

fn sign(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// `a + b·√d` with `d` a positive integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub a: BigRational,
    pub b: BigRational,
    pub d: BigInt,
}

impl Surd {
    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Self {
        assert!(d.is_positive(), "radicand must be positive");
        Surd { a, b, d }
    }

    pub fn rational(a: BigRational, d: BigInt) -> Self {
        Surd { a, b: BigRational::zero(), d }
    }

    /// `a + b√d` from integers.
    pub fn from_ints(a: i64, b: i64, d: i64) -> Self {
        Surd::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()), d.into())
    }

    fn mul(&self, o: &Surd) -> Surd {
        let d = BigRational::from_integer(self.d.clone());
        Surd {
            a: &self.a * &o.a + &self.b * &o.b * d,
            b: &self.a * &o.b + &self.b * &o.a,
            d: self.d.clone(),
        }
    }

    pub fn sign(&self) -> i32 {
        let (sa, sb) = (sign(&self.a), sign(&self.b));
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        // Opposite signs: compare a² with b²d.
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * BigRational::from_integer(self.d.clone());
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        }
    }

    /// Rational enclosure `[lo, hi]` of width at most `width`.
    pub fn enclose(&self, width: &BigRational) -> (BigRational, BigRational) {
        let (lo, hi) = sqrt_enclosure(&self.d, &(width / (self.b.abs() + BigRational::one())));
        if self.b.is_negative() {
            (&self.a + &self.b * &hi, &self.a + &self.b * &lo)
        } else {
            (&self.a + &self.b * &lo, &self.a + &self.b * &hi)
        }
    }
}

/// Rational `[lo, hi]` containing `√n` with `hi - lo ≤ width`.
pub fn sqrt_enclosure(n: &BigInt, width: &BigRational) -> (BigRational, BigRational) {
    let r = n.sqrt();
    let mut lo = BigRational::from_integer(r.clone());
    let mut hi = BigRational::from_integer(r + 1);
    let target = BigRational::from_integer(n.clone());
    if &lo * &lo == target {
        return (lo.clone(), lo);
    }
    let two = BigRational::from_integer(2.into());
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / &two;
        if &mid * &mid <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Evaluation points for sign-variation counts.
#[derive(Clone, Debug)]
pub enum Point {
    NegInf,
    PosInf,
    Rational(BigRational),
    Surd(Surd),
}

/// Sturm sequence of the squarefree part of a polynomial.
#[derive(Clone, Debug)]
pub struct Sturm {
    seq: Vec<QPoly>,
}

impl Sturm {
    pub fn new(p: &IntPoly) -> Self {
        assert!(p.deg() >= 1, "Sturm sequence of a constant");
        let sq = p.to_q().squarefree();
        let mut seq = vec![sq.clone(), sq.derivative()];
        while !seq.last().expect("nonempty").is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            seq.push(QPoly::new(r.0.iter().map(|c| -c).collect()));
        }
        seq.pop();
        Sturm { seq }
    }

    pub fn distinct_degree(&self) -> usize {
        self.seq[0].deg()
    }

    pub fn is_root(&self, p: &Point) -> bool {
        self.seq[0].sign_at(p) == 0
    }

    pub fn variations(&self, p: &Point) -> usize {
        let signs: Vec<i32> = self.seq.iter().map(|q| q.sign_at(p)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct roots in the half-open interval `(a, b]`.
    pub fn count(&self, a: &Point, b: &Point) -> usize {
        self.variations(a) - self.variations(b)
    }

    pub fn real_roots(&self) -> usize {
        self.count(&Point::NegInf, &Point::PosInf)
    }

    /// Distinct roots strictly below `c`.
    pub fn below(&self, c: &Point) -> usize {
        self.count(&Point::NegInf, c) - usize::from(self.is_root(c))
    }

    /// Distinct roots strictly above `c`.
    pub fn above(&self, c: &Point) -> usize {
        self.count(c, &Point::PosInf)
    }
}

/// Open-closed interval `(lo, hi]` holding exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isolation {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Serialize for Isolation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.lo.to_string(), self.hi.to_string()].serialize(s)
    }
}

/// Outcome of the positive-real-roots test with its witnesses.
#[derive(Clone, Debug, Serialize)]
pub struct RootCertificate {
    pub holds: bool,
    pub degree: usize,
    pub distinct_roots: usize,
    pub positive_roots: usize,
    pub isolation: Vec<Isolation>,
}

/// Whether every root of `p`, counted with multiplicity, is a positive real.
pub fn certify_positive_real_roots(p: &IntPoly) -> RootCertificate {
    let sturm = Sturm::new(p);
    let zero = Point::Rational(BigRational::zero());
    let positive = sturm.count(&zero, &Point::PosInf);
    let distinct = sturm.distinct_degree();
    let holds = positive == distinct && !sturm.is_root(&zero);
    let isolation = if holds { isolate_roots(p) } else { Vec::new() };
    RootCertificate { holds, degree: p.deg(), distinct_roots: distinct, positive_roots: positive, isolation }
}

/// Bound on the absolute value of every root.
pub fn cauchy_bound(p: &IntPoly) -> BigRational {
    let lead = p.lead().abs();
    let max = p.coeffs()[..p.deg()].iter().map(Signed::abs).max().unwrap_or_default();
    BigRational::one() + BigRational::new(max, lead)
}

/// Disjoint intervals, in increasing order, each holding one distinct real root.
pub fn isolate_roots(p: &IntPoly) -> Vec<Isolation> {
    let sturm = Sturm::new(p);
    let b = cauchy_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    let two = BigRational::from_integer(2.into());
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.count(&Point::Rational(lo.clone()), &Point::Rational(hi.clone()));
        match n {
            0 => {}
            1 => out.push(Isolation { lo, hi }),
            _ => {
                let mid = (&lo + &hi) / &two;
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Shrink an isolating interval until its width is at most `width`.
pub fn refine(p: &IntPoly, iso: &Isolation, width: &BigRational) -> Isolation {
    let sturm = Sturm::new(p);
    let two = BigRational::from_integer(2.into());
    let (mut lo, mut hi) = (iso.lo.clone(), iso.hi.clone());
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / &two;
        let mp = Point::Rational(mid.clone());
        if sturm.is_root(&mp) {
            return Isolation { lo: mid.clone(), hi: mid };
        }
        if sturm.count(&Point::Rational(lo.clone()), &mp) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Isolation { lo, hi }
}

/// Irreducible over ℤ, for a monic polynomial whose roots are all positive reals.
///
/// Any monic factor of such a polynomial again has positive real roots with a
/// smaller trace, so trial division over a bounded box is exhaustive.
pub fn irreducible_positive(p: &IntPoly) -> bool {
    let d = p.deg();
    let trace = -p.coeff(d - 1);
    let s = trace.to_i64().expect("small trace");
    (1..=d / 2).all(|j| {
        (1..s).all(|b| monic_positive_box(j, b).iter().all(|f| p.div_exact(f).is_none()))
    })
}

/// Monic integer polynomials of degree `d` and trace `s` whose coefficients
/// satisfy the Maclaurin bounds for positive roots: `e_j ≤ C(d, j)·(s/d)^j`.
/// All such polynomials with positive real roots are included.
pub fn monic_positive_box(d: usize, s: i64) -> Vec<IntPoly> {
    let bounds: Vec<i64> = (0..=d)
        .map(|j| {
            let num = BigInt::from(binomial(d, j)) * BigInt::from(s).pow(j as u32);
            let den = BigInt::from(d).pow(j as u32);
            (num / den).to_i64().expect("small bound")
        })
        .collect();
    let mut out = Vec::new();
    let mut e = vec![0i64; d + 1];
    e[0] = 1;
    if d == 0 {
        return vec![IntPoly::one()];
    }
    e[1] = s;
    fill(&mut e, 2, &bounds, &mut out);
    out
}

fn fill(e: &mut Vec<i64>, j: usize, bounds: &[i64], out: &mut Vec<IntPoly>) {
    let d = e.len() - 1;
    if j > d {
        let desc: Vec<i64> = e.iter().enumerate().map(|(i, &v)| if i % 2 == 0 { v } else { -v }).collect();
        out.push(IntPoly::from_desc(&desc));
        return;
    }
    for v in 1..=bounds[j] {
        e[j] = v;
        fill(e, j + 1, bounds, out);
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn positive_root_examples() {
        assert!(certify_positive_real_roots(&IntPoly::from_desc(&[1, -3, 1])).holds);
        assert!(!certify_positive_real_roots(&IntPoly::from_desc(&[1, -5, 7])).holds);
        assert!(certify_positive_real_roots(&IntPoly::from_desc(&[1, -2])).holds);
        // (t-1)^2 (t-3): repeated roots still positive.
        let p = &IntPoly::from_desc(&[1, -1]).pow(2) * &IntPoly::linear(3);
        let c = certify_positive_real_roots(&p);
        assert!(c.holds);
        assert_eq!(c.distinct_roots, 2);
        // t (t - 1) has a root at zero.
        assert!(!certify_positive_real_roots(&IntPoly::from_desc(&[1, -1, 0])).holds);
        assert!(!certify_positive_real_roots(&IntPoly::from_desc(&[1, 1])).holds);
    }

    #[test]
    fn isolation_brackets_golden_roots() {
        let p = IntPoly::from_desc(&[1, -3, 1]);
        let iso = isolate_roots(&p);
        assert_eq!(iso.len(), 2);
        let r = refine(&p, &iso[0], &q(1, 1_000_000));
        // (3 - √5)/2 ≈ 0.381966
        assert!(r.lo <= q(381966, 1_000_000) && r.hi >= q(381966, 1_000_000));
    }

    #[test]
    fn surd_signs() {
        // 5 - 2√8 < 0, 6 - 2√8 > 0
        assert_eq!(Surd::from_ints(5, -2, 8).sign(), -1);
        assert_eq!(Surd::from_ints(6, -2, 8).sign(), 1);
        assert_eq!(Surd::from_ints(-4, 2, 4).sign(), 0);
        let p = IntPoly::from_desc(&[1, 0, -8]);
        let s = Sturm::new(&p);
        let c = Point::Surd(Surd::from_ints(0, 2, 2));
        assert!(s.is_root(&c));
        assert_eq!(s.below(&c), 1);
        assert_eq!(s.above(&c), 0);
    }

    #[test]
    fn exact_division() {
        let a = IntPoly::from_desc(&[1, -3, 1]);
        let b = IntPoly::from_desc(&[1, -2]);
        let p = &a * &b;
        assert_eq!(p.div_exact(&a), Some(b.clone()));
        assert_eq!(p.div_exact(&IntPoly::linear(5)), None);
        assert!(!irreducible_positive(&p));
        assert!(irreducible_positive(&a));
    }

    #[test]
    fn newton_power_sums() {
        // roots 1, 2, 3
        let p = &(&IntPoly::linear(1) * &IntPoly::linear(2)) * &IntPoly::linear(3);
        let s = p.power_sums(5);
        let want: Vec<BigInt> = (0..=5).map(|k| BigInt::from(1 + 2i64.pow(k) + 3i64.pow(k))).collect();
        assert_eq!(s, want);
    }

    proptest! {
        #[test]
        fn sturm_counts_integer_roots(roots in prop::collection::vec(-6i64..7, 1..6), a in -8i64..8, w in 1i64..10) {
            let p = roots.iter().fold(IntPoly::one(), |acc, &r| &acc * &IntPoly::linear(r));
            let s = Sturm::new(&p);
            let b = a + w;
            let mut distinct = roots.clone();
            distinct.sort();
            distinct.dedup();
            let want = distinct.iter().filter(|&&r| r > a && r <= b).count();
            let got = s.count(&Point::Rational(q(a, 1)), &Point::Rational(q(b, 1)));
            prop_assert_eq!(got, want);
            prop_assert_eq!(s.real_roots(), distinct.len());
        }

        #[test]
        fn power_sums_match_direct(roots in prop::collection::vec(-9i64..10, 1..6)) {
            let p = roots.iter().fold(IntPoly::one(), |acc, &r| &acc * &IntPoly::linear(r));
            let s = p.power_sums(4);
            for k in 0..=4u32 {
                let direct: i64 = roots.iter().map(|r| r.pow(k)).sum();
                prop_assert_eq!(&s[k as usize], &BigInt::from(direct));
            }
        }
    }
}
