//! Lattice-sum characters of the principal W-algebras `W_r(p, p')`.
//!
//! The shifted character is
//! `(q;q)_inf^{1-r} sum_{alpha in Q_r + mu} sum_{sigma} (-1)^{l(sigma)} q^{E(alpha, sigma)}`
//! with
//! `E = (pp'/2)|alpha|^2 - p'(alpha, xi+delta) + p(alpha, sigma(zeta+delta)) - (xi+delta, sigma(zeta+delta) - (zeta+delta))`.
//! The `q^{1/24}` factors of the eta function are never materialized.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::invariants::{merge_counts, weyl_denominator_product};
use crate::lattice::{self, ball_radius, coset_scan, lemma_w_for_mu, root_system, to_f64, weyl_elements, WeightVector};
use crate::qseries::{euler_product, product_one_minus, QSeries};
use crate::{check_coprime, Q};

/// Parameters of a (shifted) character `chi^{r,p,p';mu}_{xi,zeta}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WCharParams {
    pub r: usize,
    pub p: u64,
    pub pp: u64,
    pub xi: WeightVector,
    pub zeta: WeightVector,
    pub mu: WeightVector,
}

impl WCharParams {
    /// `xi = zeta = 0`, `mu = 0`: the vacuum character.
    pub fn vacuum(r: usize, p: u64, pp: u64) -> Result<Self> {
        lattice::root_system(r)?;
        let zero = WeightVector::zero(r);
        Self::new(r, p, pp, zero.clone(), zero.clone(), zero)
    }

    pub fn new(r: usize, p: u64, pp: u64, xi: WeightVector, zeta: WeightVector, mu: WeightVector) -> Result<Self> {
        root_system(r)?;
        check_coprime(p, pp)?;
        for w in [&xi, &zeta, &mu] {
            if w.rank() != r {
                return Err(Error::RankMismatch { left: r, right: w.rank() });
            }
        }
        for w in [&xi, &zeta] {
            if !w.is_dominant() {
                return Err(Error::NotDominant(w.to_string()));
            }
        }
        if !mu.in_weight_lattice() {
            return Err(Error::NotInWeightLattice(mu.to_string()));
        }
        Ok(WCharParams { r, p, pp, xi, zeta, mu })
    }

    pub fn with_shift(mut self, mu: WeightVector) -> Result<Self> {
        self.mu = mu;
        Self::new(self.r, self.p, self.pp, self.xi, self.zeta, self.mu)
    }

    /// Whether `(xi, zeta)` is in `P+_{r,p-r} x P+_{r,p'-r}`. Outside `r <= p, p'`
    /// the formula is still evaluated, as a plain q-series.
    pub fn in_physical_range(&self) -> bool {
        let level = |k: u64| k as i64 - self.r as i64;
        self.r as u64 <= self.p.min(self.pp) && self.xi.in_level(level(self.p)) && self.zeta.in_level(level(self.pp))
    }
}

/// The lattice sum without the `(q;q)_inf^{r-1}` denominator, modulo `q^trunc`.
pub fn character_numerator(params: &WCharParams, trunc: Q) -> Result<QSeries> {
    let r = params.r;
    let rs = root_system(r)?;
    let delta = &rs.weyl_vector;
    let a = &params.xi + delta;
    let b = &params.zeta + delta;
    let (p, pp) = (params.p as i64, params.pp as i64);

    struct Branch {
        sign: i64,
        image: WeightVector,
        constant: Q,
    }
    let branches: Vec<Branch> = weyl_elements(r)?
        .into_iter()
        .map(|sigma| {
            let image = sigma.apply(&b);
            let constant = -a.dot(&(&image - &b));
            Branch { sign: sigma.parity() as i64, image, constant }
        })
        .collect();

    // Completeness: E < T forces c|alpha|^2 - |alpha| (p'|a| + p|b|) <= T - min constant.
    let c = Q::new(p * pp, 2);
    let min_constant = branches.iter().map(|br| br.constant).min().expect("S_r is nonempty");
    let v_norm = pp as f64 * to_f64(a.norm_sq()).sqrt() + p as f64 * to_f64(b.norm_sq()).sqrt();
    let Some(radius) = ball_radius(to_f64(c), v_norm, to_f64(trunc - min_constant)) else {
        return Ok(QSeries::zero(trunc));
    };

    let mut points: Vec<Vec<i64>> = Vec::new();
    coset_scan(r, &params.mu, radius, |scaled| {
        let norm: i64 = scaled.iter().map(|x| x * x).sum();
        // Cheap prefilter in floating point; the exact test happens per branch.
        let alpha_norm = (norm as f64).sqrt() / r as f64;
        if to_f64(c) * alpha_norm * alpha_norm - alpha_norm * v_norm <= to_f64(trunc - min_constant) + 1e-6 {
            points.push(scaled.to_vec());
        }
    });

    // Exponent times 2 r^2 L is an integer once a and b are scaled by L.
    let l = a.coords().iter().chain(b.coords()).fold(1i64, |acc, x| num_integer::lcm(acc, *x.denom()));
    let scale_vec =
        |w: &WeightVector| -> Vec<i64> { w.coords().iter().map(|x| (x * Q::from_integer(l)).to_integer()).collect() };
    let a_s = scale_vec(&a);
    let images: Vec<Vec<i64>> = branches.iter().map(|br| scale_vec(&br.image)).collect();
    let rr = r as i64;
    let den = 2 * rr * rr * l;

    let counts = points
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<Q, i64>, x| {
            let norm: i64 = x.iter().map(|v| v * v).sum();
            let lin_a: i64 = x.iter().zip(&a_s).map(|(u, v)| u * v).sum();
            let base = p * pp * l * norm - 2 * pp * rr * lin_a;
            for (br, img) in branches.iter().zip(&images) {
                let lin_b: i64 = x.iter().zip(img).map(|(u, v)| u * v).sum();
                let e = Q::new(base + 2 * p * rr * lin_b, den) + br.constant;
                if e < trunc {
                    *acc.entry(e).or_insert(0) += br.sign;
                }
            }
            acc
        })
        .reduce(BTreeMap::new, merge_counts);
    Ok(QSeries::from_integer_map(counts, Some(trunc)))
}

/// `chi^{r,p,p';mu}_{xi,zeta}` modulo `q^trunc`.
pub fn wchar_shifted(params: &WCharParams, trunc: Q) -> Result<QSeries> {
    let numerator = character_numerator(params, trunc)?;
    let euler = euler_product(trunc);
    (1..params.r).try_fold(numerator, |acc, _| acc.div_by_unit(&euler))
}

/// The normalized character `chi^{r,p,p'}_{xi,zeta}` (shift `mu = 0`).
pub fn wchar_normalized(
    r: usize,
    p: u64,
    pp: u64,
    xi: &WeightVector,
    zeta: &WeightVector,
    trunc: Q,
) -> Result<QSeries> {
    let params = WCharParams::new(r, p, pp, xi.clone(), zeta.clone(), WeightVector::zero(r))?;
    wchar_shifted(&params, trunc)
}

/// `(q;q)_inf^{r-1} / prod_{alpha>0}(1 - q^{(alpha,delta)}) * chi^{r,p,p'; j Lambda_1}_{0,0}`.
///
/// The Euler factors cancel exactly against the character's denominator, so
/// this is the lattice sum divided by the Weyl product.
pub fn limit_rhs(r: usize, p: u64, pp: u64, j: usize, trunc: Q) -> Result<QSeries> {
    let rs = root_system(r)?;
    if j >= r {
        return Err(Error::ShiftOutOfRange { j, r });
    }
    let mu = lattice::fundamental_weight(r, 1).scale(Q::from_integer(j as i64));
    let params = WCharParams::vacuum(r, p, pp)?.with_shift(mu)?;
    character_numerator(&params, trunc)?.div_by_unit(&weyl_denominator_product(&rs))
}

/// Conjectured limit of the trailing-normalized invariants for `p < r`:
/// `prod_{Phi+_{r-p}} (1 - q^{(alpha, delta_{r-p})}) / prod_{Phi+_r} (1 - q^{(alpha, delta_r)}) * (q;q)^{p-1} chi^{p,p,p'}_{0,0}`.
pub fn conjecture_rhs(r: usize, p: u64, pp: u64, trunc: Q) -> Result<QSeries> {
    let rs = root_system(r)?;
    check_coprime(p, pp)?;
    let pu = p as usize;
    if pu < 2 || pu > r {
        return Err(Error::MalformedParams(format!("conjecture needs 2 <= p <= r, got p = {p}, r = {r}")));
    }
    let inner = WCharParams::vacuum(pu, p, pp)?;
    let numerator = character_numerator(&inner, trunc)?;
    let complement = if r - pu >= 2 { weyl_denominator_product(&root_system(r - pu)?) } else { QSeries::exact_one() };
    numerator.mul(&complement).div_by_unit(&weyl_denominator_product(&rs))
}

/// `(-1)^{l(w)}` for the `w` with `r mu - delta + w delta` in `r Q_r`.
pub fn lemma32_sign(mu: &WeightVector) -> Result<i8> {
    Ok(lemma_w_for_mu(mu)?.0.parity())
}

/// The limit of the `r = 3`, `p = 2` invariants in its alternating-sum form:
/// `sum_{i >= 0} (-1)^i q^{(p'/2)(i^2+i) - i} (1 - q^{2i+1}) / ((1-q)^2 (1-q^2))`.
pub fn sl3_p2_limit(pp: u64, trunc: Q) -> Result<QSeries> {
    if pp < 3 || pp.is_multiple_of(2) {
        return Err(Error::InvalidOddParameter(pp));
    }
    let mut terms: BTreeMap<Q, i64> = BTreeMap::new();
    let half_pp = Q::new(pp as i64, 2);
    for i in 0i64.. {
        let e = half_pp * Q::from_integer(i * i + i) - Q::from_integer(i);
        if e >= trunc {
            break;
        }
        let sign = if i % 2 == 0 { 1 } else { -1 };
        *terms.entry(e).or_insert(0) += sign;
        *terms.entry(e + Q::from_integer(2 * i + 1)).or_insert(0) -= sign;
    }
    QSeries::from_integer_map(terms, Some(trunc)).div_by_unit(&product_one_minus([1, 1, 2]))
}

/// Lowest exponent of a character, or `None` if it vanishes below the truncation.
pub fn minimum_degree(series: &QSeries) -> Option<Q> {
    series.ord().filter(|e| !series.coeff(*e).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::fundamental_weight;
    use crate::{Agreement, Coeff};
    use num_traits::One;

    fn t(n: i64) -> Q {
        Q::from_integer(n)
    }

    fn zero(r: usize) -> WeightVector {
        WeightVector::zero(r)
    }

    /// `prod_{k in ks} (1 - q^k)` by repeated multiplication, modulo `q^trunc`.
    fn naive_product(ks: impl IntoIterator<Item = i64>, trunc: i64) -> QSeries {
        ks.into_iter().fold(QSeries::one(t(trunc)), |acc, k| acc.mul(&QSeries::one_minus_power(t(k))))
    }

    /// `sum_k q^{k^2 + k} / (q;q)_k`.
    fn rogers_ramanujan(trunc: i64) -> QSeries {
        let mut total = QSeries::zero(t(trunc));
        for k in 0.. {
            if k * k + k >= trunc {
                break;
            }
            let pochhammer = naive_product(1..=k, trunc);
            let term = QSeries::monomial(Coeff::one(), t(k * k + k), t(trunc)).div_by_unit(&pochhammer).unwrap();
            total = total.add(&term);
        }
        total
    }

    #[test]
    fn trivial_character_is_one() {
        let numerator = character_numerator(&WCharParams::vacuum(2, 2, 3).unwrap(), t(100)).unwrap();
        assert_eq!(numerator, naive_product(1..100, 100));
        assert_eq!(wchar_normalized(2, 2, 3, &zero(2), &zero(2), t(100)).unwrap(), QSeries::one(t(100)));
    }

    #[test]
    fn virasoro_vacuum_matches_rogers_ramanujan() {
        let chi = wchar_normalized(2, 2, 5, &zero(2), &zero(2), t(60)).unwrap();
        assert_eq!(chi, rogers_ramanujan(60));
    }

    #[test]
    fn normalized_characters_are_integral() {
        for (r, p, pp) in [(3, 3, 4), (2, 3, 4), (3, 4, 5), (2, 3, 5)] {
            let chi = wchar_normalized(r, p, pp, &zero(r), &zero(r), t(60)).unwrap();
            assert_eq!(chi.coeff(Q::zero()), Coeff::one());
            assert!(chi.is_integral(), "r={r} p={p} pp={pp}");
        }
        let ising = wchar_normalized(2, 3, 4, &zero(2), &zero(2), t(40)).unwrap();
        let cylindric = ising.div_by_unit(&naive_product(1..40, 40)).unwrap();
        assert_eq!(cylindric.coeff(Q::zero()), Coeff::one());
        assert!(cylindric.is_integral());
    }

    #[test]
    fn ising_spin_module_counts_distinct_partitions() {
        let distinct = (1..30).fold(QSeries::one(t(30)), |acc, k| {
            acc.mul(&QSeries::from_integer_map([(Q::zero(), 1), (t(k), 1)].into(), None))
        });
        let zeta = fundamental_weight(2, 1);
        assert_eq!(wchar_normalized(2, 3, 4, &zero(2), &zeta, t(30)).unwrap(), distinct);
        let params = WCharParams::new(2, 3, 4, zeta, zero(2), zero(2)).unwrap();
        assert!(params.in_physical_range());
        assert!(wchar_shifted(&params, t(30)).unwrap().is_integral());
    }

    #[test]
    fn shifts_by_root_lattice_do_nothing() {
        let base = WCharParams::vacuum(3, 3, 5).unwrap();
        let reference = wchar_shifted(&base, t(40)).unwrap();
        for a in [[1i64, 0], [0, -1], [2, 1], [-1, 3]] {
            let beta = WeightVector::from_simple_roots(3, &[t(a[0]), t(a[1])]).unwrap();
            let shifted = wchar_shifted(&base.clone().with_shift(beta).unwrap(), t(40)).unwrap();
            assert_eq!(shifted, reference);
        }
    }

    #[test]
    fn p_below_r_vanishes() {
        for i in 0..3 {
            let mu = if i == 0 { zero(3) } else { fundamental_weight(3, i) };
            let params = WCharParams::vacuum(3, 2, 5).unwrap().with_shift(mu).unwrap();
            assert!(wchar_shifted(&params, t(100)).unwrap().is_zero());
        }
        for j in 0..3 {
            assert!(limit_rhs(3, 2, 5, j, t(60)).unwrap().is_zero());
        }
    }

    #[test]
    fn r_equals_p_sign() {
        assert_eq!(lemma32_sign(&zero(4)).unwrap(), 1);
        assert_eq!(lemma32_sign(&WeightVector::from_integers(&[1, -1, 0]).unwrap()).unwrap(), 1);
        assert_eq!(lemma32_sign(&fundamental_weight(2, 1)).unwrap(), -1);
        assert_eq!(lemma32_sign(&fundamental_weight(3, 1)).unwrap(), 1);
        assert!(lemma32_sign(&WeightVector::new(vec![Q::new(1, 4), Q::new(-1, 4)]).unwrap()).is_err());

        let base = wchar_normalized(2, 2, 5, &zero(2), &zero(2), t(60)).unwrap();
        let params = WCharParams::vacuum(2, 2, 5).unwrap().with_shift(fundamental_weight(2, 1)).unwrap();
        assert_eq!(wchar_shifted(&params, t(60)).unwrap().negate(), base);
    }

    #[test]
    fn limit_examples() {
        assert_eq!(limit_rhs(2, 2, 3, 0, t(60)).unwrap(), naive_product(2..60, 60));
        assert_eq!(limit_rhs(3, 2, 5, 3, t(10)).unwrap_err(), Error::ShiftOutOfRange { j: 3, r: 3 });
        assert_eq!(limit_rhs(3, 2, 4, 0, t(10)).unwrap_err(), Error::NotCoprime { p: 2, pp: 4 });
    }

    #[test]
    fn limit_equals_euler_route() {
        for (r, p, pp, j) in [(2, 2, 5, 0), (3, 3, 4, 0), (3, 3, 5, 1), (3, 4, 5, 2)] {
            let rs = root_system(r).unwrap();
            let mu = fundamental_weight(r, 1).scale(Q::from_integer(j as i64));
            let params = WCharParams::vacuum(r, p, pp).unwrap().with_shift(mu).unwrap();
            let chi = wchar_shifted(&params, t(40)).unwrap();
            let via_euler =
                euler_product(t(40)).pow(r as u32 - 1).mul(&chi).div_by_unit(&weyl_denominator_product(&rs)).unwrap();
            assert_eq!(limit_rhs(r, p, pp, j, t(40)).unwrap(), via_euler);
        }
    }

    #[test]
    fn conjecture_examples() {
        for pp in [3, 5, 7] {
            let chi = wchar_normalized(2, 2, pp, &zero(2), &zero(2), t(60)).unwrap();
            let proved = euler_product(t(60)).mul(&chi).div_by_unit(&product_one_minus([1, 1, 2])).unwrap();
            assert_eq!(sl3_p2_limit(pp, t(60)).unwrap(), proved);
            assert_eq!(conjecture_rhs(3, 2, pp, t(60)).unwrap(), proved);
        }
        let rhs = conjecture_rhs(4, 3, 5, t(30)).unwrap();
        assert!(rhs.coeff(Q::zero()) > Coeff::from_integer(0.into()));
        for (r, pp) in [(2, 3), (3, 4), (3, 5)] {
            assert_eq!(conjecture_rhs(r, r as u64, pp, t(40)).unwrap(), limit_rhs(r, r as u64, pp, 0, t(40)).unwrap());
        }
        assert!(conjecture_rhs(3, 4, 5, t(10)).is_err());
    }

    #[test]
    fn truncation_is_stable() {
        let params = WCharParams::vacuum(3, 4, 5).unwrap().with_shift(fundamental_weight(3, 2)).unwrap();
        let small = wchar_shifted(&params, t(25)).unwrap();
        let large = wchar_shifted(&params, t(50)).unwrap();
        assert_eq!(large.truncate(t(25)), small);
        assert_eq!(small.agreement_order(&large), Agreement::Full);
    }

    #[test]
    fn parameter_validation() {
        assert_eq!(WCharParams::vacuum(3, 3, 6).unwrap_err(), Error::NotCoprime { p: 3, pp: 6 });
        let bad = WeightVector::from_fundamental(3, &[-1, 0]).unwrap();
        assert!(matches!(WCharParams::new(3, 3, 4, bad, zero(3), zero(3)), Err(Error::NotDominant(_))));
        assert!(!WCharParams::vacuum(3, 2, 5).unwrap().in_physical_range());
        assert!(WCharParams::vacuum(3, 3, 4).unwrap().in_physical_range());
        assert_eq!(sl3_p2_limit(4, t(10)).unwrap_err(), Error::InvalidOddParameter(4));
    }
}
