//! Coloured `sl_r` invariants of torus knots `T(p, p')` for the colours
//! `L_r(n Lambda_1)`.
//!
//! Two independent routes are provided:
//!
//! * the plethysm route, `sum_mu m^mu qdim(L(mu)) theta_mu^{p'/p}`, with the
//!   Adams multiplicities `m^mu` read off from the alternating sum over
//!   `Pi_{r,n} x S_r`;
//! * the closed route, a finite lattice sum over `Pi_{r,n} x S_r` divided by
//!   `prod_{alpha > 0} (1 - q^{(alpha, delta)})`.
//!
//! All invariants are framed with writhe `p p'` and not normalized unless the
//! function name says otherwise.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{
    self, dominant_reduce, pi_weights, root_system, weyl_elements, Reduction, RootSystem, WeightVector,
};
use crate::qseries::{product_one_minus, QSeries};
use crate::{check_coprime, Coeff, Q};

/// A torus knot `T(p, p')` with coprime positive parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct TorusKnot {
    pub p: u64,
    pub pp: u64,
}

impl TorusKnot {
    pub fn new(p: u64, pp: u64) -> Result<Self> {
        check_coprime(p, pp)?;
        Ok(TorusKnot { p, pp })
    }

    /// `T(p', p)`, the same knot with the roles swapped.
    pub fn swapped(&self) -> Self {
        TorusKnot { p: self.pp, pp: self.p }
    }

    fn ratio(&self) -> Q {
        Q::new(self.pp as i64, self.p as i64)
    }
}

/// Irreducible decomposition `psi_p(L_r(lambda)) = sum m^mu L_r(mu)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlethysmDecomposition {
    entries: BTreeMap<WeightVector, i64>,
}

impl PlethysmDecomposition {
    pub fn multiplicity(&self, mu: &WeightVector) -> i64 {
        self.entries.get(mu).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WeightVector, &i64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum_mu m^mu dim L(mu)` with the classical Weyl dimension.
    pub fn virtual_dimension(&self) -> BigInt {
        self.entries.iter().map(|(mu, m)| weyl_dimension(mu) * BigInt::from(*m)).sum()
    }
}

/// Classical Weyl dimension `prod_{alpha>0} (lambda+delta, alpha)/(delta, alpha)`.
pub fn weyl_dimension(lambda: &WeightVector) -> BigInt {
    let r = lambda.rank();
    let shifted = lambda + &lattice::weyl_vector(r);
    let c = shifted.coords();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..r {
        for j in i + 1..r {
            let diff = c[i] - c[j];
            num *= BigInt::from(*diff.numer());
            den *= BigInt::from(*diff.denom()) * BigInt::from((j - i) as i64);
        }
    }
    num / den
}

fn require_dominant(lambda: &WeightVector) -> Result<()> {
    if lambda.is_dominant() {
        Ok(())
    } else {
        Err(Error::NotDominant(lambda.to_string()))
    }
}

/// Quantum dimension of `L_r(lambda)` as an exact Laurent polynomial:
/// `q^{-s} prod (1 - q^{(lambda+delta, alpha)}) / prod (1 - q^{(delta, alpha)})`.
pub fn qdim_polynomial(lambda: &WeightVector) -> Result<QSeries> {
    require_dominant(lambda)?;
    let r = lambda.rank();
    let rs = root_system(r)?;
    let shifted = lambda + &rs.weyl_vector;
    let c = shifted.coords();
    let mut tops = Vec::with_capacity(rs.positive_roots.len());
    for i in 0..r {
        for j in i + 1..r {
            tops.push((c[i] - c[j]).to_integer());
        }
    }
    let heights = rs.heights();
    let excess: i64 = tops.iter().sum::<i64>() - heights.iter().sum::<i64>();
    let num = product_one_minus(tops);
    let den = product_one_minus(heights);
    Ok(num.div_exact(&den)?.shift(Q::new(-excess, 2)))
}

pub fn qdim_irrep(lambda: &WeightVector, trunc: Q) -> Result<QSeries> {
    Ok(qdim_polynomial(lambda)?.truncate(trunc))
}

/// `(lambda, lambda + 2 delta) / 2`; defined for any weight.
pub fn twist_exponent(lambda: &WeightVector) -> Q {
    let delta = lattice::weyl_vector(lambda.rank());
    (lambda.dot(lambda) + Q::from_integer(2) * lambda.dot(&delta)) / Q::from_integer(2)
}

/// Adams decomposition of `psi_p(L_r(n Lambda_1))`.
///
/// Every pair `(lambda, w)` in `Pi_{r,n} x S_r` contributes `(-1)^{l(w)}` at
/// `p lambda + w delta`. Reducing each point to the chamber gives the
/// alternating extension `M`, and since the point set is Weyl-stable every
/// orbit is visited `r!` times.
pub fn adams_decompose(r: usize, n: usize, p: u64) -> Result<PlethysmDecomposition> {
    if p == 0 {
        return Err(Error::NonPositiveParameter { p, pp: 0 });
    }
    let rs = root_system(r)?;
    let weyl = weyl_elements(r)?;
    let shifts: Vec<(WeightVector, i8)> = weyl.iter().map(|w| (w.apply(&rs.weyl_vector), w.parity())).collect();
    let pq = Q::from_integer(p as i64);
    let mut orbit_sums: BTreeMap<WeightVector, i64> = BTreeMap::new();
    for lambda in pi_weights(r, n)? {
        let scaled = lambda.scale(pq);
        for (w_delta, sign) in &shifts {
            let nu = &scaled + w_delta;
            if let Reduction::Chamber { u, dominant } = dominant_reduce(&nu)? {
                let mu = &dominant - &rs.weyl_vector;
                *orbit_sums.entry(mu).or_insert(0) += (*sign as i64) * (u.parity() as i64);
            }
        }
    }
    let order = weyl.len() as i64;
    let entries = orbit_sums
        .into_iter()
        .filter(|(_, m)| *m != 0)
        .map(|(mu, m)| {
            debug_assert_eq!(m % order, 0, "orbit sum not divisible by |W|");
            (mu, m / order)
        })
        .filter(|(_, m)| *m != 0)
        .collect();
    Ok(PlethysmDecomposition { entries })
}

/// Plethysm route: `sum_mu m^mu qdim(L(mu)) q^{(p'/p) twist(mu)}`.
pub fn jones_rosso_oracle(r: usize, knot: TorusKnot, n: usize, trunc: Q) -> Result<QSeries> {
    TorusKnot::new(knot.p, knot.pp)?;
    let decomposition = adams_decompose(r, n, knot.p)?;
    let terms: Vec<(&WeightVector, &i64)> = decomposition.iter().collect();
    let pieces: Result<Vec<QSeries>> = terms
        .par_iter()
        .map(|(mu, m)| {
            let twist = twist_exponent(mu) * knot.ratio();
            let qdim = qdim_polynomial(mu)?;
            Ok(qdim.shift(twist).scale(&Coeff::from_integer(BigInt::from(**m))).truncate(trunc))
        })
        .collect();
    Ok(pieces?.iter().fold(QSeries::zero(trunc), |acc, s| acc.add(s)))
}

/// `prod_{alpha > 0} (1 - q^{(alpha, delta)})`, exactly.
pub fn weyl_denominator_product(rs: &RootSystem) -> QSeries {
    product_one_minus(rs.heights())
}

/// Exact numerator of the closed route:
/// `sum (-1)^{l(w)} q^{(pp'/2)|lambda|^2 - p'(lambda,delta) + p(lambda,w delta) - (delta,w delta) + (delta,delta)}`
/// over `Pi_{r,n} x S_r`.
pub fn jones_numerator(r: usize, knot: TorusKnot, n: usize) -> Result<QSeries> {
    TorusKnot::new(knot.p, knot.pp)?;
    let rs = root_system(r)?;
    let delta = &rs.weyl_vector;
    let delta_sq = delta.norm_sq();
    let shifts: Vec<(WeightVector, Q, i64)> = weyl_elements(r)?
        .into_iter()
        .map(|w| {
            let wd = w.apply(delta);
            let constant = delta_sq - delta.dot(&wd);
            (wd, constant, w.parity() as i64)
        })
        .collect();
    let (p, pp) = (Q::from_integer(knot.p as i64), Q::from_integer(knot.pp as i64));
    let quad = p * pp / Q::from_integer(2);
    let weights = pi_weights(r, n)?;
    let counts = weights
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<Q, i64>, lambda| {
            let base = quad * lambda.norm_sq() - pp * lambda.dot(delta);
            for (wd, constant, sign) in &shifts {
                let e = base + p * lambda.dot(wd) + constant;
                *acc.entry(e).or_insert(0) += sign;
            }
            acc
        })
        .reduce(BTreeMap::new, merge_counts);
    Ok(QSeries::from_integer_map(counts, None))
}

pub(crate) fn merge_counts(mut a: BTreeMap<Q, i64>, b: BTreeMap<Q, i64>) -> BTreeMap<Q, i64> {
    for (e, c) in b {
        *a.entry(e).or_insert(0) += c;
    }
    a
}

/// Closed route for the framed, non-normalized invariant, modulo `q^trunc`.
pub fn jones_closed(r: usize, knot: TorusKnot, n: usize, trunc: Q) -> Result<QSeries> {
    let rs = root_system(r)?;
    let numerator = jones_numerator(r, knot, n)?;
    numerator.truncate(trunc).div_by_unit(&weyl_denominator_product(&rs))
}

/// The same invariant from the unrearranged lattice sum
/// `q^{-(p'/2p)|delta|^2} / qdim(Delta_r) * sum (-1)^{l(w)} q^{(p'/2p)|p lambda + w delta|^2 + (p lambda + w delta, delta)}`,
/// with `qdim(Delta_r) = sum_w (-1)^{l(w)} q^{(w delta, delta)}`.
pub fn jones_closed_weyl_form(r: usize, knot: TorusKnot, n: usize, trunc: Q) -> Result<QSeries> {
    TorusKnot::new(knot.p, knot.pp)?;
    let rs = root_system(r)?;
    let delta = &rs.weyl_vector;
    let weyl = weyl_elements(r)?;
    let ratio = Q::new(knot.pp as i64, 2 * knot.p as i64);
    let pq = Q::from_integer(knot.p as i64);

    let mut denominator = BTreeMap::new();
    for w in &weyl {
        *denominator.entry(w.apply(delta).dot(delta)).or_insert(0) += w.parity() as i64;
    }
    let denominator = QSeries::from_integer_map(denominator, None);

    let mut counts: BTreeMap<Q, i64> = BTreeMap::new();
    for lambda in pi_weights(r, n)? {
        let scaled = lambda.scale(pq);
        for w in &weyl {
            let nu = &scaled + &w.apply(delta);
            let e = ratio * nu.norm_sq() + nu.dot(delta) - ratio * delta.norm_sq();
            *counts.entry(e).or_insert(0) += w.parity() as i64;
        }
    }
    let numerator = QSeries::from_integer_map(counts, None);
    let ob = denominator.ord().expect("Weyl denominator is nonzero");
    numerator.truncate(trunc + ob).div_by_unit(&denominator)
}

/// Framing-independent invariant `theta_{n Lambda_1}^{-pp'} J`.
pub fn jones_unframed(r: usize, knot: TorusKnot, n: usize, trunc: Q) -> Result<QSeries> {
    let lambda = lattice::fundamental_weight(r, 1).scale(Q::from_integer(n as i64));
    let shift = -twist_exponent(&lambda) * Q::from_integer((knot.p * knot.pp) as i64);
    Ok(jones_closed(r, knot, n, trunc - shift)?.shift(shift))
}

/// Framing-independent invariant normalized to 1 on the unknot.
pub fn jones_unframed_normalized(r: usize, knot: TorusKnot, n: usize, trunc: Q) -> Result<QSeries> {
    let lambda = lattice::fundamental_weight(r, 1).scale(Q::from_integer(n as i64));
    let qdim = qdim_polynomial(&lambda)?;
    let od = qdim.ord().expect("quantum dimension is nonzero");
    jones_unframed(r, knot, n, trunc + od)?.div_by_unit(&qdim)
}

/// `J` divided by its trailing monomial, together with the removed exponent
/// and the sign of the removed coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub series: QSeries,
    pub exponent: Q,
    pub sign: i8,
}

/// Trailing-normalized invariant, known modulo `q^trunc` after normalization.
pub fn jones_hat(r: usize, knot: TorusKnot, n: usize, trunc: Q) -> Result<Normalized> {
    let rs = root_system(r)?;
    let numerator = jones_numerator(r, knot, n)?;
    // The denominator has constant term 1, so the trailing term of J is that of the numerator.
    let lead = numerator.ord().ok_or(Error::NoTrailingTerm)?;
    let full = numerator.truncate(lead + trunc).div_by_unit(&weyl_denominator_product(&rs))?;
    let (series, exponent, sign) = full.trailing_normalize()?;
    Ok(Normalized { series, exponent, sign })
}

/// Closed form for `r = 3`, `p = 2`, odd `p' >= 3`.
pub fn jones_sl3_p2(pp: u64, n: usize, trunc: Q) -> Result<QSeries> {
    if pp < 3 || pp.is_multiple_of(2) {
        return Err(Error::InvalidOddParameter(pp));
    }
    let ppq = Q::from_integer(pp as i64);
    let half = Q::new(1, 2);
    let ni = n as i64;
    let mut sum = QSeries::exact_zero();
    for i in 0..=ni {
        let e = half * ppq * Q::from_integer(i * i + i) - Q::from_integer(i);
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let term = QSeries::exact_monomial(Coeff::from_integer(BigInt::from(sign)), e).mul(&product_one_minus([
            ni - i + 1,
            2 * i + 1,
            ni + i + 2,
        ]));
        sum = sum.add(&term);
    }
    let n_sq = Q::from_integer(ni * ni);
    let prefactor = half * ppq * (n_sq / Q::from_integer(3) + Q::from_integer(ni)) - Q::from_integer(ni);
    let sign = if ni % 2 == 0 { Coeff::one() } else { -Coeff::one() };
    sum.shift(prefactor).scale(&sign).truncate(trunc).div_by_unit(&product_one_minus([1, 1, 2]))
}
