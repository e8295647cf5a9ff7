//! Truncated series in `q` with rational exponents and exact rational coefficients.
//!
//! A [`QSeries`] is either exact (a finite Laurent polynomial in some `q^{1/D}`)
//! or known modulo `q^T`. Products and quotients propagate the truncation the
//! usual way: a factor known to relative precision `k` past its trailing term
//! limits the result to relative precision `k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::{Coeff, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    terms: BTreeMap<Q, Coeff>,
    /// `None` for an exact series.
    trunc: Option<Q>,
}

/// First exponent where two series differ, or agreement through the
/// common truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Agreement {
    Order(Q),
    Full,
}

impl Agreement {
    pub fn order(&self) -> Option<Q> {
        match self {
            Agreement::Order(e) => Some(*e),
            Agreement::Full => None,
        }
    }
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agreement::Order(e) => write!(f, "{e}"),
            Agreement::Full => f.write_str("inf"),
        }
    }
}

// Extended arithmetic on truncations: `None` stands for +infinity.
fn ext_min(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn ext_add(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    Some(a? + b?)
}

impl QSeries {
    pub fn zero(trunc: Q) -> Self {
        QSeries { terms: BTreeMap::new(), trunc: Some(trunc) }
    }

    pub fn exact_zero() -> Self {
        QSeries { terms: BTreeMap::new(), trunc: None }
    }

    pub fn exact_one() -> Self {
        Self::exact_monomial(Coeff::one(), Q::zero())
    }

    pub fn one(trunc: Q) -> Self {
        Self::monomial(Coeff::one(), Q::zero(), trunc)
    }

    /// `c q^e + O(q^trunc)`; the term is dropped when `e >= trunc`.
    pub fn monomial(c: Coeff, e: Q, trunc: Q) -> Self {
        Self::from_terms([(e, c)], Some(trunc))
    }

    pub fn exact_monomial(c: Coeff, e: Q) -> Self {
        Self::from_terms([(e, c)], None)
    }

    /// `1 - q^a`, exactly.
    pub fn one_minus_power(a: Q) -> Self {
        Self::from_terms([(Q::zero(), Coeff::one()), (a, -Coeff::one())], None)
    }

    /// Sums duplicate exponents, drops zero coefficients and anything at or
    /// beyond the truncation.
    pub fn from_terms(terms: impl IntoIterator<Item = (Q, Coeff)>, trunc: Option<Q>) -> Self {
        let mut map: BTreeMap<Q, Coeff> = BTreeMap::new();
        for (e, c) in terms {
            if trunc.is_some_and(|t| e >= t) || c.is_zero() {
                continue;
            }
            accumulate(&mut map, e, c);
        }
        QSeries { terms: map, trunc }
    }

    /// Builds a series from integer coefficients keyed by exponent.
    pub fn from_integer_map(map: BTreeMap<Q, i64>, trunc: Option<Q>) -> Self {
        Self::from_terms(map.into_iter().map(|(e, c)| (e, Coeff::from_integer(BigInt::from(c)))), trunc)
    }

    pub fn trunc(&self) -> Option<Q> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// No nonzero term below the truncation.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Q, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: Q) -> Coeff {
        self.terms.get(&e).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Trailing (lowest) exponent with a nonzero coefficient.
    pub fn ord(&self) -> Option<Q> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<Q> {
        self.terms.keys().next_back().copied()
    }

    /// Trailing exponent, with a zero series counting as vanishing up to its
    /// truncation (`None` = infinite).
    fn valuation(&self) -> Option<Q> {
        match self.ord() {
            Some(e) => Some(e),
            None => self.trunc,
        }
    }

    /// Least common denominator of the exponents and the truncation.
    pub fn grid(&self) -> i64 {
        let mut d = self.trunc.map(|t| *t.denom()).unwrap_or(1);
        for e in self.terms.keys() {
            d = d.lcm(e.denom());
        }
        d
    }

    /// Lowers the truncation to `min(self.trunc, t)`.
    pub fn truncate(&self, t: Q) -> Self {
        let trunc = ext_min(self.trunc, Some(t));
        QSeries { terms: self.terms.range(..t).map(|(e, c)| (*e, c.clone())).collect(), trunc }
    }

    pub fn scale(&self, k: &Coeff) -> Self {
        if k.is_zero() {
            return QSeries { terms: BTreeMap::new(), trunc: self.trunc };
        }
        QSeries { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(), trunc: self.trunc }
    }

    /// Multiplication by `q^s`.
    pub fn shift(&self, s: Q) -> Self {
        QSeries {
            terms: self.terms.iter().map(|(e, c)| (e + s, c.clone())).collect(),
            trunc: self.trunc.map(|t| t + s),
        }
    }

    pub fn add(&self, other: &QSeries) -> Self {
        let trunc = ext_min(self.trunc, other.trunc);
        let mut terms = match trunc {
            Some(t) => self.terms.range(..t).map(|(e, c)| (*e, c.clone())).collect(),
            None => self.terms.clone(),
        };
        for (e, c) in &other.terms {
            if trunc.is_some_and(|t| *e >= t) {
                break;
            }
            accumulate(&mut terms, *e, c.clone());
        }
        QSeries { terms, trunc }
    }

    pub fn negate(&self) -> Self {
        QSeries { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(), trunc: self.trunc }
    }

    pub fn sub(&self, other: &QSeries) -> Self {
        self.add(&other.negate())
    }

    /// Truncation is `min(T_a + ord b, T_b + ord a)`.
    pub fn mul(&self, other: &QSeries) -> Self {
        let trunc = ext_min(ext_add(self.trunc, other.valuation()), ext_add(other.trunc, self.valuation()));
        let mut terms: BTreeMap<Q, Coeff> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if trunc.is_some_and(|t| e >= t) {
                    // Exponents of `other` are increasing.
                    break;
                }
                accumulate(&mut terms, e, ca * cb);
            }
        }
        QSeries { terms, trunc }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = match self.trunc {
            Some(t) if self.is_zero() && k > 0 => return QSeries::zero(t * Q::from_integer(k as i64)),
            _ => QSeries::exact_one(),
        };
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Series quotient `self / b`; `b` needs a nonzero trailing term.
    ///
    /// When both operands are exact the quotient must be a finite series,
    /// otherwise [`Error::InexactDivision`]; truncate one side first to get a
    /// power-series expansion.
    pub fn div_by_unit(&self, b: &QSeries) -> Result<Self> {
        let ob = b.ord().ok_or(Error::DivisionByNonUnit)?;
        if self.is_exact() && b.is_exact() {
            return self.div_exact(b);
        }
        if self.is_exact() && self.is_zero() {
            return Ok(QSeries::exact_zero());
        }
        // Relative precision is the smaller of the two; ord(a) for a zero
        // dividend is its truncation.
        let oa = self.valuation();
        let trunc = ext_min(self.trunc.map(|t| t - ob), ext_add(b.trunc, oa).map(|t| t - ob - ob))
            .expect("one operand is truncated");
        let lead = b.terms[&ob].clone();
        let limit = trunc + ob;
        let mut rem: BTreeMap<Q, Coeff> = self.terms.range(..limit).map(|(e, c)| (*e, c.clone())).collect();
        let mut quotient = BTreeMap::new();
        while let Some((e, c)) = rem.pop_first() {
            let qe = e - ob;
            let qc = c / &lead;
            for (eb, cb) in b.terms.iter().skip(1) {
                let ex = qe + eb;
                if ex >= limit {
                    break;
                }
                accumulate(&mut rem, ex, -(&qc * cb));
            }
            quotient.insert(qe, qc);
        }
        Ok(QSeries { terms: quotient, trunc: Some(trunc) })
    }

    /// Exact polynomial division of two exact series.
    pub fn div_exact(&self, b: &QSeries) -> Result<Self> {
        let ob = b.ord().ok_or(Error::DivisionByNonUnit)?;
        if !self.is_exact() || !b.is_exact() {
            return Err(Error::InexactDivision);
        }
        let Some(top_a) = self.max_exponent() else {
            return Ok(QSeries::exact_zero());
        };
        let top_q = top_a - b.max_exponent().expect("nonzero divisor");
        let lead = b.terms[&ob].clone();
        let mut rem = self.terms.clone();
        let mut quotient = BTreeMap::new();
        while let Some((e, c)) = rem.pop_first() {
            let qe = e - ob;
            if qe > top_q {
                return Err(Error::InexactDivision);
            }
            let qc = c / &lead;
            for (eb, cb) in b.terms.iter().skip(1) {
                accumulate(&mut rem, qe + eb, -(&qc * cb));
            }
            quotient.insert(qe, qc);
        }
        Ok(QSeries { terms: quotient, trunc: None })
    }

    /// Divides by the trailing monomial `c q^e`; returns the normalized series,
    /// `e`, and the sign of `c`.
    pub fn trailing_normalize(&self) -> Result<(QSeries, Q, i8)> {
        let (e, c) = self.terms.iter().next().ok_or(Error::NoTrailingTerm)?;
        let sign = if c.is_negative() { -1 } else { 1 };
        let inv = c.recip();
        Ok((self.scale(&inv).shift(-*e), *e, sign))
    }

    /// Least exponent below both truncations where the coefficients differ.
    pub fn agreement_order(&self, other: &QSeries) -> Agreement {
        let limit = ext_min(self.trunc, other.trunc);
        let below = |e: &Q| limit.is_none_or(|t| *e < t);
        let mut a = self.terms.iter().filter(|(e, _)| below(e)).peekable();
        let mut b = other.terms.iter().filter(|(e, _)| below(e)).peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Agreement::Full,
                (Some((ea, _)), None) => return Agreement::Order(**ea),
                (None, Some((eb, _))) => return Agreement::Order(**eb),
                (Some((ea, ca)), Some((eb, cb))) => {
                    if ea != eb {
                        return Agreement::Order(*(*ea).min(*eb));
                    }
                    if ca != cb {
                        return Agreement::Order(**ea);
                    }
                    a.next();
                    b.next();
                }
            }
        }
    }

    /// All exponents are nonnegative integers and all coefficients integers.
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|(e, c)| e.is_integer() && !e.is_negative() && c.is_integer())
    }

    /// Replaces one coefficient; used for mutation testing of checks.
    pub fn with_coeff(&self, e: Q, c: Coeff) -> Self {
        let mut out = self.clone();
        if out.trunc.is_some_and(|t| e >= t) {
            return out;
        }
        if c.is_zero() {
            out.terms.remove(&e);
        } else {
            out.terms.insert(e, c);
        }
        out
    }
}

fn accumulate(map: &mut BTreeMap<Q, Coeff>, e: Q, c: Coeff) {
    use std::collections::btree_map::Entry;
    match map.entry(e) {
        Entry::Vacant(slot) => {
            if !c.is_zero() {
                slot.insert(c);
            }
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += c;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

/// `(q;q)_inf = prod_{k>=1} (1 - q^k)` modulo `q^trunc`.
pub fn euler_product(trunc: Q) -> QSeries {
    let n = ceil_nonneg(trunc);
    let mut dense = vec![BigInt::zero(); n];
    if n > 0 {
        dense[0] = BigInt::one();
    }
    for k in 1..n {
        for j in (k..n).rev() {
            let prev = dense[j - k].clone();
            dense[j] -= prev;
        }
    }
    from_dense(dense, trunc)
}

/// `sum_{m in Z} (-1)^m q^{m(3m-1)/2}` modulo `q^trunc`.
pub fn pentagonal_sum(trunc: Q) -> QSeries {
    let mut terms = Vec::new();
    let mut m: i64 = 0;
    loop {
        let e1 = m * (3 * m - 1) / 2;
        let e2 = m * (3 * m + 1) / 2;
        if Q::from_integer(e1) >= trunc && Q::from_integer(e2) >= trunc {
            break;
        }
        let sign = if m % 2 == 0 { 1 } else { -1 };
        terms.push((Q::from_integer(e1), Coeff::from_integer(BigInt::from(sign))));
        if m > 0 {
            terms.push((Q::from_integer(e2), Coeff::from_integer(BigInt::from(sign))));
        }
        m += 1;
    }
    QSeries::from_terms(terms, Some(trunc))
}

/// `prod_i (1 - q^{a_i})` as an exact polynomial.
pub fn product_one_minus(exponents: impl IntoIterator<Item = i64>) -> QSeries {
    exponents.into_iter().fold(QSeries::exact_one(), |acc, a| acc.mul(&QSeries::one_minus_power(Q::from_integer(a))))
}

fn ceil_nonneg(t: Q) -> usize {
    if t.is_positive() {
        t.ceil().to_integer() as usize
    } else {
        0
    }
}

fn from_dense(dense: Vec<BigInt>, trunc: Q) -> QSeries {
    let terms = dense
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (Q::from_integer(i as i64), Coeff::from_integer(c)))
        .collect();
    QSeries { terms, trunc: Some(trunc) }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.negate()
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let exp = if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "q".to_string()
            } else if e.is_integer() && e.is_positive() {
                format!("q^{e}")
            } else {
                format!("q^({e})")
            };
            match (mag.is_one(), exp.is_empty()) {
                (true, true) => f.write_str("1")?,
                (true, false) => f.write_str(&exp)?,
                (false, true) => write!(f, "{mag}")?,
                (false, false) => write!(f, "{mag}*{exp}")?,
            }
        }
        match self.trunc {
            Some(t) => {
                if !first {
                    f.write_str(" + ")?;
                }
                if t.is_integer() {
                    write!(f, "O(q^{t})")
                } else {
                    write!(f, "O(q^({t}))")
                }
            }
            None if first => f.write_str("0"),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn c(n: i64) -> Coeff {
        Coeff::from_integer(BigInt::from(n))
    }

    fn poly(terms: &[(i64, i64)], trunc: Option<i64>) -> QSeries {
        QSeries::from_terms(terms.iter().map(|&(e, k)| (Q::from_integer(e), c(k))), trunc.map(Q::from_integer))
    }

    #[test]
    fn monomial_examples() {
        let one = QSeries::monomial(c(1), Q::zero(), q(50, 1));
        assert_eq!(one.to_string(), "1 + O(q^50)");
        let m = QSeries::monomial(c(-1), q(3, 2), q(10, 1));
        assert_eq!(m.to_string(), "-q^(3/2) + O(q^10)");
        let gone = QSeries::monomial(c(5), q(12, 1), q(10, 1));
        assert!(gone.is_zero());
        assert_eq!(gone.trunc(), Some(q(10, 1)));
    }

    #[test]
    fn ring_examples() {
        let t = 30;
        let geo = poly(&(0..t).map(|k| (k, 1)).collect::<Vec<_>>(), Some(t));
        let prod = &QSeries::one_minus_power(Q::one()) * &geo;
        assert_eq!(prod, QSeries::one(Q::from_integer(t)));

        let a = poly(&[(0, 1), (3, -2), (7, 5)], Some(9));
        let z = &a + &-&a;
        assert!(z.is_zero());
        assert_eq!(z.trunc(), Some(q(9, 1)));

        let half = QSeries::exact_monomial(c(1), q(1, 2));
        let third = QSeries::exact_monomial(c(1), q(1, 3));
        let m = &half * &third;
        assert_eq!(m.grid(), 6);
        assert_eq!(m.coeff(q(5, 6)), c(1));
    }

    #[test]
    fn mul_truncation_rule() {
        let a = poly(&[(2, 1), (3, 1)], Some(10));
        let b = poly(&[(1, 1)], Some(5));
        assert_eq!(a.mul(&b).trunc(), Some(q(7, 1)));
        let z = QSeries::zero(q(4, 1));
        assert_eq!(z.mul(&a).trunc(), Some(q(6, 1)));
        assert_eq!(QSeries::exact_zero().mul(&a), QSeries::exact_zero());
    }

    #[test]
    fn division_examples() {
        let a = poly(&[(0, 1), (1, -3), (4, 1)], Some(40));
        let quotient = a.div_by_unit(&a).unwrap();
        assert_eq!(quotient, QSeries::one(q(40, 1)));

        let geo = QSeries::one(q(25, 1)).div_by_unit(&QSeries::one_minus_power(Q::one())).unwrap();
        assert_eq!(geo, poly(&(0..25).map(|k| (k, 1)).collect::<Vec<_>>(), Some(25)));

        let num = QSeries::from_terms([(q(1, 2), c(1)), (q(3, 2), c(-1))], None);
        let den = QSeries::exact_monomial(c(1), q(1, 2));
        assert_eq!(num.div_by_unit(&den).unwrap(), QSeries::one_minus_power(Q::one()));

        assert_eq!(a.div_by_unit(&QSeries::zero(q(3, 1))).unwrap_err(), Error::DivisionByNonUnit);
        let inexact = QSeries::exact_one().div_by_unit(&QSeries::one_minus_power(Q::one()));
        assert_eq!(inexact.unwrap_err(), Error::InexactDivision);
    }

    #[test]
    fn division_truncation_with_offsets() {
        // a = q^2 + O(q^10), b = q^-1 (1 - q) exact: quotient q^3/(1-q) + O(q^11).
        let a = poly(&[(2, 1)], Some(10));
        let b = poly(&[(-1, 1), (0, -1)], None);
        let quotient = a.div_by_unit(&b).unwrap();
        assert_eq!(quotient.trunc(), Some(q(11, 1)));
        assert_eq!(quotient, poly(&(3..11).map(|k| (k, 1)).collect::<Vec<_>>(), Some(11)));
    }

    #[test]
    fn euler_product_examples() {
        assert_eq!(euler_product(q(6, 1)), poly(&[(0, 1), (1, -1), (2, -1), (5, 1)], Some(6)));
        let t = q(200, 1);
        assert_eq!(euler_product(t), pentagonal_sum(t));
        let e = euler_product(t);
        assert_eq!(&e * &QSeries::one(t).div_by_unit(&e).unwrap(), QSeries::one(t));
        assert_eq!(euler_product(q(13, 2)), euler_product(q(7, 1)).truncate(q(13, 2)));
    }

    #[test]
    fn partition_numbers() {
        // Oracle: dynamic-programming partition counter.
        let n = 60usize;
        let mut p = vec![BigInt::zero(); n];
        p[0] = BigInt::one();
        for part in 1..n {
            for total in part..n {
                let prev = p[total - part].clone();
                p[total] += prev;
            }
        }
        let t = Q::from_integer(n as i64);
        let inv = QSeries::one(t).div_by_unit(&euler_product(t)).unwrap();
        for (k, pk) in p.iter().enumerate() {
            assert_eq!(inv.coeff(Q::from_integer(k as i64)), Coeff::from_integer(pk.clone()));
        }
        assert_eq!(p[10], BigInt::from(42));
    }

    #[test]
    fn trailing_normalize_examples() {
        let a = poly(&[(3, -1), (4, 1)], None);
        assert_eq!(a.trailing_normalize().unwrap(), (QSeries::one_minus_power(Q::one()), q(3, 1), -1));
        let b = poly(&[(0, 1), (1, 1)], None);
        assert_eq!(b.trailing_normalize().unwrap(), (b.clone(), Q::zero(), 1));
        let h = QSeries::exact_monomial(c(2), q(1, 2));
        assert_eq!(h.trailing_normalize().unwrap(), (QSeries::exact_one(), q(1, 2), 1));
        assert_eq!(QSeries::zero(q(5, 1)).trailing_normalize().unwrap_err(), Error::NoTrailingTerm);
    }

    #[test]
    fn agreement_examples() {
        let a = poly(&[(0, 1), (1, 1)], Some(10));
        assert_eq!(a.agreement_order(&a), Agreement::Full);
        let b = poly(&[(0, 1), (1, 1), (5, 1)], Some(10));
        assert_eq!(a.agreement_order(&b), Agreement::Order(q(5, 1)));
        let one = QSeries::exact_one();
        let other = QSeries::from_terms([(Q::zero(), c(1)), (q(1, 2), c(1))], None);
        assert_eq!(one.agreement_order(&other), Agreement::Order(q(1, 2)));
        // Differences at or past the common truncation are invisible.
        let short = poly(&[(0, 1), (1, 1)], Some(5));
        assert_eq!(short.agreement_order(&b), Agreement::Full);
    }

    #[test]
    fn integrality_examples() {
        assert!(poly(&[(0, 1), (1, -1), (7, 3)], Some(10)).is_integral());
        assert!(!QSeries::exact_monomial(c(1), q(1, 2)).is_integral());
        assert!(!QSeries::exact_monomial(Coeff::new(BigInt::from(1), BigInt::from(2)), Q::one()).is_integral());
        assert!(!QSeries::exact_monomial(c(1), q(-1, 1)).is_integral());
    }

    #[test]
    fn exact_zero_over_truncated_unit() {
        let b = poly(&[(0, 1), (1, 2)], Some(5));
        assert_eq!(QSeries::exact_zero().div_by_unit(&b).unwrap(), QSeries::exact_zero());
    }

    #[test]
    fn display_forms() {
        let s = QSeries::from_terms(
            [(q(-1, 2), c(2)), (Q::one(), c(-1)), (q(5, 3), Coeff::new(3.into(), 2.into()))],
            Some(q(7, 2)),
        );
        assert_eq!(s.to_string(), "2*q^(-1/2) - q + 3/2*q^(5/3) + O(q^(7/2))");
        assert_eq!(QSeries::exact_zero().to_string(), "0");
    }
}
