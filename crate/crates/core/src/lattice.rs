//! Root-system data for `sl_r` in epsilon coordinates.
//!
//! Weights live in the trace-zero hyperplane of `Q^r`, with the standard
//! orthonormal form `(e_i, e_j) = delta_ij`. The Weyl group is the symmetric
//! group acting by permuting coordinates. Lattice membership (weight lattice,
//! root lattice, dominance, level bounds) is expressed as predicates on
//! [`WeightVector`] rather than as separate types.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Q;

/// A point of the Cartan dual of `sl_r`, stored by its `r` epsilon coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector {
    coords: Vec<Q>,
}

impl WeightVector {
    pub fn new(coords: Vec<Q>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidRank(coords.len()));
        }
        let trace: Q = coords.iter().sum();
        if !trace.is_zero() {
            return Err(Error::NonzeroTrace(trace));
        }
        Ok(WeightVector { coords })
    }

    pub fn from_integers(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| Q::from_integer(c)).collect())
    }

    pub fn zero(r: usize) -> Self {
        WeightVector { coords: vec![Q::zero(); r] }
    }

    /// `sum_i a_i Lambda_i` from fundamental-weight coordinates `a_1..a_{r-1}`.
    pub fn from_fundamental(r: usize, a: &[i64]) -> Result<Self> {
        check_rank(r)?;
        if a.len() != r - 1 {
            return Err(Error::RankMismatch { left: r - 1, right: a.len() });
        }
        let mut out = Self::zero(r);
        for (i, &ai) in a.iter().enumerate() {
            out = &out + &fundamental_weight(r, i + 1).scale(Q::from_integer(ai));
        }
        Ok(out)
    }

    /// `sum_i x_i alpha_i` from simple-root coordinates `x_1..x_{r-1}`.
    pub fn from_simple_roots(r: usize, x: &[Q]) -> Result<Self> {
        check_rank(r)?;
        if x.len() != r - 1 {
            return Err(Error::RankMismatch { left: r - 1, right: x.len() });
        }
        let mut coords = vec![Q::zero(); r];
        for (i, xi) in x.iter().enumerate() {
            coords[i] += xi;
            coords[i + 1] -= xi;
        }
        Ok(WeightVector { coords })
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    /// Pairings `(self, alpha_i)`, i.e. the fundamental-weight coordinates.
    pub fn fundamental_coords(&self) -> Vec<Q> {
        self.coords.windows(2).map(|w| w[0] - w[1]).collect()
    }

    /// Coefficients in the simple-root basis (partial sums of coordinates).
    pub fn simple_root_coords(&self) -> Vec<Q> {
        let mut acc = Q::zero();
        self.coords[..self.rank() - 1]
            .iter()
            .map(|c| {
                acc += c;
                acc
            })
            .collect()
    }

    pub fn inner(&self, other: &WeightVector) -> Result<Q> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: other.rank() });
        }
        Ok(self.dot(other))
    }

    /// Unchecked trace form; ranks must agree.
    pub(crate) fn dot(&self, other: &WeightVector) -> Q {
        debug_assert_eq!(self.rank(), other.rank());
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> Q {
        self.dot(self)
    }

    pub fn scale(&self, k: Q) -> WeightVector {
        WeightVector { coords: self.coords.iter().map(|c| c * k).collect() }
    }

    /// All coordinate differences are integers.
    pub fn in_weight_lattice(&self) -> bool {
        let first = self.coords[0];
        self.coords.iter().all(|c| (c - first).is_integer())
    }

    pub fn in_root_lattice(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Dominant integral: `(self, alpha_i)` is a nonnegative integer for all i.
    pub fn is_dominant(&self) -> bool {
        self.fundamental_coords().iter().all(|a| a.is_integer() && !a.is_negative())
    }

    /// Strictly inside the fundamental chamber (the set `P°_r`).
    pub fn is_regular_dominant(&self) -> bool {
        self.fundamental_coords().iter().all(|a| a.is_integer() && a.is_positive())
    }

    /// Membership in `P+_{r,k}`: dominant with `(self, theta) <= k`.
    pub fn in_level(&self, k: i64) -> bool {
        self.is_dominant() && self.coords[0] - self.coords[self.rank() - 1] <= Q::from_integer(k)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.iter().join(", "))
    }
}

impl Add for &WeightVector {
    type Output = WeightVector;
    fn add(self, rhs: &WeightVector) -> WeightVector {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch in weight addition");
        WeightVector { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &WeightVector {
    type Output = WeightVector;
    fn sub(self, rhs: &WeightVector) -> WeightVector {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch in weight subtraction");
        WeightVector { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &WeightVector {
    type Output = WeightVector;
    fn neg(self) -> WeightVector {
        WeightVector { coords: self.coords.iter().map(|c| -c).collect() }
    }
}

/// An element of the Weyl group `S_r`, acting on `e_i` by `e_i -> e_{w(i)}`.
///
/// Indices are zero-based internally; the sign `(-1)^{l(w)}` is cached.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
    parity: i8,
}

impl Permutation {
    /// Builds a permutation from its image list; returns `None` if it is not a bijection.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let r = images.len();
        let mut seen = vec![false; r];
        for &i in &images {
            if i >= r || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        let parity = if inversions(&images).is_multiple_of(2) { 1 } else { -1 };
        Some(Permutation { images, parity })
    }

    pub fn identity(r: usize) -> Self {
        Permutation { images: (0..r).collect(), parity: 1 }
    }

    /// The transposition swapping one-based positions `i` and `j`.
    pub fn transposition(r: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..r).collect();
        images.swap(i - 1, j - 1);
        Self::from_images(images).expect("transposition is a bijection")
    }

    /// The cycle `(r, 1, 2, ..., r-1)`: `i -> i+1`, `r -> 1`.
    pub fn cycle(r: usize) -> Self {
        Self::from_images((0..r).map(|i| (i + 1) % r).collect()).expect("cycle is a bijection")
    }

    /// The longest element, reversing the order of coordinates.
    pub fn longest(r: usize) -> Self {
        Self::from_images((0..r).rev().collect()).expect("reversal is a bijection")
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// Zero-based image list.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `(-1)^{l(w)}`.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    /// Length in simple transpositions (the inversion count).
    pub fn length(&self) -> usize {
        inversions(&self.images)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.rank(), other.rank(), "rank mismatch in composition");
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
            parity: self.parity * other.parity,
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.rank()];
        for (i, &wi) in self.images.iter().enumerate() {
            images[wi] = i;
        }
        Permutation { images, parity: self.parity }
    }

    pub fn pow(&self, k: usize) -> Permutation {
        (0..k).fold(Self::identity(self.rank()), |acc, _| self.compose(&acc))
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &w)| i == w)
    }

    pub fn act(&self, mu: &WeightVector) -> Result<WeightVector> {
        if self.rank() != mu.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: mu.rank() });
        }
        Ok(self.apply(mu))
    }

    pub(crate) fn apply(&self, mu: &WeightVector) -> WeightVector {
        let mut coords = vec![Q::zero(); mu.rank()];
        for (i, &wi) in self.images.iter().enumerate() {
            coords[wi] = mu.coords[i];
        }
        WeightVector { coords }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.images.iter().map(|i| i + 1).join(" "))
    }
}

fn inversions(images: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i] > images[j] {
                count += 1;
            }
        }
    }
    count
}

fn check_rank(r: usize) -> Result<()> {
    if r < 2 {
        Err(Error::InvalidRank(r))
    } else {
        Ok(())
    }
}

/// `alpha_i = e_i - e_{i+1}`, one-based `i`.
pub fn simple_root(r: usize, i: usize) -> WeightVector {
    let mut coords = vec![Q::zero(); r];
    coords[i - 1] = Q::one();
    coords[i] = -Q::one();
    WeightVector { coords }
}

/// `Lambda_i`, one-based `i`; `Lambda_r` is taken to be zero.
pub fn fundamental_weight(r: usize, i: usize) -> WeightVector {
    let (ri, rr) = (i as i64, r as i64);
    let coords = (0..r).map(|k| if k < i { Q::new(rr - ri, rr) } else { Q::new(-ri, rr) }).collect();
    WeightVector { coords }
}

/// The Weyl vector `((r-1)/2, (r-3)/2, ..., (1-r)/2)`.
pub fn weyl_vector(r: usize) -> WeightVector {
    let rr = r as i64;
    WeightVector { coords: (0..rr).map(|k| Q::new(rr - 1 - 2 * k, 2)).collect() }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    pub rank: usize,
    pub simple_roots: Vec<WeightVector>,
    pub fundamental_weights: Vec<WeightVector>,
    pub weyl_vector: WeightVector,
    /// `e_i - e_j` for `i < j`, ordered lexicographically in `(i, j)`.
    pub positive_roots: Vec<WeightVector>,
    pub highest_root: WeightVector,
    pub longest_element: Permutation,
}

impl RootSystem {
    /// Heights `(alpha, delta)` of the positive roots, in `positive_roots` order.
    pub fn heights(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.positive_roots.len());
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                out.push((j - i) as i64);
            }
        }
        out
    }
}

pub fn root_system(r: usize) -> Result<RootSystem> {
    check_rank(r)?;
    let simple_roots = (1..r).map(|i| simple_root(r, i)).collect();
    let fundamental_weights = (1..r).map(|i| fundamental_weight(r, i)).collect();
    let mut positive_roots = Vec::with_capacity(r * (r - 1) / 2);
    for i in 0..r {
        for j in i + 1..r {
            let mut coords = vec![Q::zero(); r];
            coords[i] = Q::one();
            coords[j] = -Q::one();
            positive_roots.push(WeightVector { coords });
        }
    }
    let mut theta = vec![Q::zero(); r];
    theta[0] = Q::one();
    theta[r - 1] = -Q::one();
    Ok(RootSystem {
        rank: r,
        simple_roots,
        fundamental_weights,
        weyl_vector: weyl_vector(r),
        positive_roots,
        highest_root: WeightVector { coords: theta },
        longest_element: Permutation::longest(r),
    })
}

pub fn inner(mu: &WeightVector, nu: &WeightVector) -> Result<Q> {
    mu.inner(nu)
}

pub fn act(w: &Permutation, mu: &WeightVector) -> Result<WeightVector> {
    w.act(mu)
}

/// All `r!` elements of `S_r`, in lexicographic order of their image lists.
pub fn weyl_elements(r: usize) -> Result<Vec<Permutation>> {
    check_rank(r)?;
    Ok((0..r)
        .permutations(r)
        .map(|images| Permutation::from_images(images).expect("permutations are bijections"))
        .collect())
}

/// Weights of `L_r(n Lambda_1)`: `n Lambda_1 - sum a_i alpha_i` with
/// `n >= a_1 >= ... >= a_{r-1} >= 0`, lexicographic in `(a_1, ..., a_{r-1})`.
pub fn pi_weights(r: usize, n: usize) -> Result<Vec<WeightVector>> {
    check_rank(r)?;
    let top = fundamental_weight(r, 1).scale(Q::from_integer(n as i64));
    let mut out = Vec::new();
    let mut a = vec![0usize; r - 1];
    fill_chain(&mut a, 0, n, &mut |a| {
        let mut coords = top.coords.clone();
        for (i, &ai) in a.iter().enumerate() {
            let ai = Q::from_integer(ai as i64);
            coords[i] -= ai;
            coords[i + 1] += ai;
        }
        out.push(WeightVector { coords });
    });
    Ok(out)
}

fn fill_chain(a: &mut Vec<usize>, depth: usize, bound: usize, emit: &mut impl FnMut(&[usize])) {
    if depth == a.len() {
        emit(a);
        return;
    }
    for v in 0..=bound {
        a[depth] = v;
        fill_chain(a, depth + 1, v, emit);
    }
}

/// Result of moving a weight into the closed fundamental chamber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// `u * dominant == nu` with `dominant` strictly inside the chamber.
    Chamber { u: Permutation, dominant: WeightVector },
    /// Two coordinates coincide: the weight lies on a wall.
    Boundary,
}

/// Sorts the coordinates of `nu` into strictly decreasing order.
pub fn dominant_reduce(nu: &WeightVector) -> Result<Reduction> {
    if !nu.in_weight_lattice() {
        return Err(Error::NotInWeightLattice(nu.to_string()));
    }
    let mut order: Vec<usize> = (0..nu.rank()).collect();
    order.sort_by(|&i, &j| nu.coords[j].cmp(&nu.coords[i]));
    if order.windows(2).any(|w| nu.coords[w[0]] == nu.coords[w[1]]) {
        return Ok(Reduction::Boundary);
    }
    let dominant = WeightVector { coords: order.iter().map(|&i| nu.coords[i]).collect() };
    let u = Permutation::from_images(order).expect("sort order is a bijection");
    Ok(Reduction::Chamber { u, dominant })
}

/// For `mu` in the weight lattice, returns `(w, lambda)` with
/// `r mu - delta + w delta = r lambda` and `lambda` in the root lattice.
///
/// Writes `mu = Lambda_k + phi` with `phi` in the root lattice and takes
/// `w = sigma^k` for the cycle `sigma = (r, 1, ..., r-1)`.
pub fn lemma_w_for_mu(mu: &WeightVector) -> Result<(Permutation, WeightVector)> {
    if !mu.in_weight_lattice() {
        return Err(Error::NotInWeightLattice(mu.to_string()));
    }
    let r = mu.rank();
    let rr = r as i64;
    // The class of mu in P/Q is read off from r * coord_1 modulo r.
    let scaled = (mu.coords[0] * Q::from_integer(rr)).to_integer();
    let k = (-scaled).mod_floor(&rr) as usize;
    let w = Permutation::cycle(r).pow(k);
    let delta = weyl_vector(r);
    let lhs = &(&mu.scale(Q::from_integer(rr)) - &delta) + &w.apply(&delta);
    let lambda = lhs.scale(Q::new(1, rr));
    debug_assert!(lambda.in_root_lattice());
    Ok((w, lambda))
}

/// Whether `u delta - w delta` lies in `p Q_r`.
pub fn delta_difference_divisible(u: &Permutation, w: &Permutation, p: i64) -> bool {
    let delta = weyl_vector(u.rank());
    let diff = &u.apply(&delta) - &w.apply(&delta);
    diff.coords.iter().all(|c| c.is_integer() && c.to_integer() % p == 0)
}

/// All `alpha` in `Q_r + mu` with `c |alpha|^2 + (alpha, v) <= bound`,
/// lexicographic in simple-root coordinates.
///
/// The search box comes from `|alpha| <= (|v| + sqrt(|v|^2 + 4 c bound)) / 2c`
/// and the smallest eigenvalue `4 sin^2(pi / 2r)` of the Cartan matrix.
pub fn coset_ball(r: usize, mu: &WeightVector, c: Q, v: &WeightVector, bound: Q) -> Result<Vec<WeightVector>> {
    check_rank(r)?;
    for w in [mu, v] {
        if w.rank() != r {
            return Err(Error::RankMismatch { left: r, right: w.rank() });
        }
    }
    if !c.is_positive() {
        return Err(Error::NonPositiveQuadratic(c));
    }
    if !mu.in_weight_lattice() {
        return Err(Error::NotInWeightLattice(mu.to_string()));
    }
    let v_norm = to_f64(v.norm_sq()).sqrt();
    let radius = match ball_radius(to_f64(c), v_norm, to_f64(bound)) {
        Some(radius) => radius,
        None => return Ok(Vec::new()),
    };

    // Integer form of the test: scale coordinates by r and clear denominators.
    let den = v.coords.iter().fold(c.denom().lcm(bound.denom()), |acc, x| acc.lcm(x.denom()));
    let cq = (c * Q::from_integer(den)).to_integer() as i128;
    let vq: Vec<i128> = v.coords.iter().map(|x| (*x * Q::from_integer(den)).to_integer() as i128).collect();
    let rr = r as i128;
    let limit = (bound * Q::from_integer(den)).to_integer() as i128 * rr * rr;

    let mut out = Vec::new();
    coset_scan(r, mu, radius, |scaled| {
        let norm: i128 = scaled.iter().map(|&a| (a as i128) * (a as i128)).sum();
        let lin: i128 = scaled.iter().zip(&vq).map(|(&a, &b)| a as i128 * b).sum();
        if cq * norm + rr * lin <= limit {
            out.push(WeightVector { coords: scaled.iter().map(|&a| Q::new(a, r as i64)).collect() });
        }
    });
    Ok(out)
}

pub(crate) fn to_f64(x: Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Upper bound on `|alpha|` for `c |alpha|^2 - |alpha| v_norm <= bound`, padded
/// against rounding. `None` when no point can qualify.
pub(crate) fn ball_radius(c: f64, v_norm: f64, bound: f64) -> Option<f64> {
    let disc = v_norm * v_norm + 4.0 * c * bound;
    if disc < 0.0 {
        // Slack for rounding: only reject clearly empty balls.
        if disc < -1e-9 * (1.0 + v_norm * v_norm + (4.0 * c * bound).abs()) {
            return None;
        }
        return Some(v_norm / (2.0 * c) * (1.0 + 1e-9) + 1e-9);
    }
    Some((v_norm + disc.sqrt()) / (2.0 * c) * (1.0 + 1e-9) + 1e-9)
}

/// Visits every point of `Q_r + mu` inside the coordinate box that contains
/// the Euclidean ball of the given radius. Points are passed as `r * coords`.
pub(crate) fn coset_scan(r: usize, mu: &WeightVector, radius: f64, mut visit: impl FnMut(&[i64])) {
    let lambda_min = 4.0 * (std::f64::consts::PI / (2.0 * r as f64)).sin().powi(2);
    let half_width = radius / lambda_min.sqrt() + 1e-9;
    let y_mu = mu.simple_root_coords();
    let ranges: Vec<(i64, i64)> = y_mu
        .iter()
        .map(|y| {
            let y = to_f64(*y);
            ((-half_width - y).ceil() as i64, (half_width - y).floor() as i64)
        })
        .collect();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return;
    }
    let rr = r as i64;
    let base: Vec<i64> = mu.coords.iter().map(|c| (c * Q::from_integer(rr)).to_integer()).collect();
    let mut x: Vec<i64> = ranges.iter().map(|(lo, _)| *lo).collect();
    let mut scaled = vec![0i64; r];
    loop {
        for (k, s) in scaled.iter_mut().enumerate() {
            let mut val = base[k];
            if k < r - 1 {
                val += rr * x[k];
            }
            if k > 0 {
                val -= rr * x[k - 1];
            }
            *s = val;
        }
        visit(&scaled);
        // Odometer increment, last coordinate fastest.
        let mut i = r - 1;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if x[i] < ranges[i].1 {
                x[i] += 1;
                for j in i + 1..r - 1 {
                    x[j] = ranges[j].0;
                }
                break;
            }
        }
    }
}
