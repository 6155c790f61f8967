//! Special functions and subset algebra behind the closed-form evaluators.
//!
//! Everything here is a pure function of its arguments.

use std::fmt;

use crate::error::{Result, SrtError};

/// Largest relay population the closed forms will enumerate exhaustively.
///
/// The analytic cost grows like `2^N * 2^|D|`; twenty relays is already about
/// a million decoding sets.
pub const SUBSET_ENUMERATION_CAP: usize = 20;

/// Largest relay population representable by a [`RelayIndexSet`].
pub const MAX_RELAYS: usize = 64;

/// A subset of relay indices drawn from `0..universe`.
///
/// Stored as a bitmask, so iteration is always in ascending index order and
/// members are unique by construction.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct RelayIndexSet {
    mask: u64,
    universe: usize,
}

impl RelayIndexSet {
    pub fn empty(universe: usize) -> Self {
        assert!(universe <= MAX_RELAYS, "at most {MAX_RELAYS} relays supported");
        Self { mask: 0, universe }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        set.mask = low_bits(universe);
        set
    }

    /// Builds a set from a bitmask; bit `i` set means relay `i` is a member.
    pub fn from_mask(mask: u64, universe: usize) -> Result<Self> {
        if universe > MAX_RELAYS {
            return Err(SrtError::Domain(format!(
                "universe of {universe} relays exceeds {MAX_RELAYS}"
            )));
        }
        if mask & !low_bits(universe) != 0 {
            return Err(SrtError::Domain(format!(
                "mask {mask:#b} has members outside 0..{universe}"
            )));
        }
        Ok(Self { mask, universe })
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I, universe: usize) -> Result<Self> {
        let mut set = Self::from_mask(0, universe)?;
        for i in indices {
            if i >= universe {
                return Err(SrtError::Domain(format!("relay index {i} out of range 0..{universe}")));
            }
            set.mask |= 1 << i;
        }
        Ok(set)
    }

    pub fn insert(&mut self, index: usize) {
        assert!(index < self.universe, "relay index {index} out of range");
        self.mask |= 1 << index;
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.universe && self.mask & (1 << index) != 0
    }

    pub fn cardinality(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Relays in `0..universe` that are not members.
    pub fn complement(&self) -> Self {
        Self {
            mask: !self.mask & low_bits(self.universe),
            universe: self.universe,
        }
    }

    /// This set with `index` removed.
    pub fn without(&self, index: usize) -> Self {
        Self {
            mask: self.mask & !(1u64.checked_shl(index as u32).unwrap_or(0)),
            universe: self.universe,
        }
    }

    /// Members in ascending order.
    pub fn iter(&self) -> Members {
        Members { rest: self.mask }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for RelayIndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl IntoIterator for &RelayIndexSet {
    type Item = usize;
    type IntoIter = Members;

    fn into_iter(self) -> Members {
        self.iter()
    }
}

/// Ascending iterator over the members of a [`RelayIndexSet`].
#[derive(Clone, Debug)]
pub struct Members {
    rest: u64,
}

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.rest == 0 {
            return None;
        }
        let i = self.rest.trailing_zeros() as usize;
        self.rest &= self.rest - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.rest.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Regularized lower incomplete gamma `P(k, x)` for integer shape `k`.
///
/// This is the CDF at `x` of a sum of `k` unit-mean exponentials. For
/// integer `k` it has the finite form `1 - e^{-x} sum_{j<k} x^j / j!`; when
/// `x < k` that difference cancels badly, so the equivalent convergent tail
/// `e^{-x} sum_{j>=k} x^j / j!` is summed instead.
pub fn regularized_lower_gamma(x: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(SrtError::Domain("incomplete gamma shape k must be >= 1".into()));
    }
    if x.is_nan() || x < 0.0 {
        return Err(SrtError::Domain(format!(
            "incomplete gamma argument x = {x} must be >= 0"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    if k == 1 {
        return Ok(-(-x).exp_m1());
    }
    let kf = f64::from(k);
    let p = if x < kf {
        // e^{-x} x^k / k!, then ratios x / (j + 1) < 1.
        let mut term = (-x + kf * x.ln() - ln_factorial(k)).exp();
        let mut sum = 0.0;
        let mut j = kf;
        while term > sum * f64::EPSILON * 0.25 {
            sum += term;
            j += 1.0;
            term *= x / j;
        }
        sum
    } else {
        // Upper tail Q = e^{-x} sum_{j<k} x^j/j!, summed from the largest term down
        // so e^{-x} never underflows on its own.
        let mut term = (-x + (kf - 1.0) * x.ln() - ln_factorial(k - 1)).exp();
        let mut q = 0.0;
        let mut j = kf - 1.0;
        loop {
            q += term;
            if j == 0.0 || term < q * f64::EPSILON * 0.25 {
                break;
            }
            term *= j / x;
            j -= 1.0;
        }
        1.0 - q
    };
    Ok(p.clamp(0.0, 1.0))
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|j| f64::from(j).ln()).sum()
}

/// All `2^n - 1` non-empty subsets of `0..n`, ordered by bitmask value.
///
/// Fails when `n` exceeds [`SUBSET_ENUMERATION_CAP`].
pub fn enumerate_nonempty_subsets(n: usize) -> Result<NonEmptySubsets> {
    enumerate_nonempty_subsets_capped(n, SUBSET_ENUMERATION_CAP)
}

/// As [`enumerate_nonempty_subsets`] with an explicit cap.
pub fn enumerate_nonempty_subsets_capped(n: usize, cap: usize) -> Result<NonEmptySubsets> {
    if n == 0 {
        return Err(SrtError::Domain("subset enumeration needs at least one relay".into()));
    }
    check_enumeration_cap(n, cap)?;
    Ok(NonEmptySubsets {
        next: 1,
        end: 1u64 << n,
        universe: n,
    })
}

pub(crate) fn check_enumeration_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(MAX_RELAYS - 1);
    if n > cap {
        return Err(SrtError::Capacity {
            n,
            cap,
            cost: 1u128 << n.min(127),
        });
    }
    Ok(())
}

/// Iterator returned by [`enumerate_nonempty_subsets`].
#[derive(Clone, Debug)]
pub struct NonEmptySubsets {
    next: u64,
    end: u64,
    universe: usize,
}

impl Iterator for NonEmptySubsets {
    type Item = RelayIndexSet;

    fn next(&mut self) -> Option<RelayIndexSet> {
        if self.next >= self.end {
            return None;
        }
        let set = RelayIndexSet {
            mask: self.next,
            universe: self.universe,
        };
        self.next += 1;
        Some(set)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for NonEmptySubsets {}

/// Probability that relay `relay` has the strictly largest relay-destination
/// gain among the members of `dn`.
///
/// Inclusion-exclusion over the subsets `C` of `dn \ {relay}`:
/// `sum_C (-1)^|C| / (1 + sum_{j in C} gain_relay / gain_j)`, where the empty
/// subset supplies the leading `1`. Terms are added largest first with
/// compensated summation since their signs alternate.
pub fn best_relay_selection_probability(relay: usize, dn: &RelayIndexSet, gains_id: &[f64]) -> Result<f64> {
    if !dn.contains(relay) {
        return Err(SrtError::Domain(format!(
            "relay {relay} is not in the decoding set {dn:?}"
        )));
    }
    check_gains(dn, gains_id, "gains_id")?;
    let own = gains_id[relay];
    let ratios: Vec<f64> = dn.without(relay).iter().map(|j| own / gains_id[j]).collect();

    // Ratio sums for every subset, built from the subset minus its lowest member.
    let count = 1usize << ratios.len();
    let mut sums = vec![0.0f64; count];
    let mut terms = Vec::with_capacity(count);
    terms.push(1.0);
    for mask in 1..count {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + ratios[low];
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(sign / (1.0 + sums[mask]));
    }
    Ok(compensated_sum(&mut terms).clamp(0.0, 1.0))
}

/// Probability that the eavesdropper channel gain of the best relay in `dn`
/// exceeds `lambda`, with the best relay chosen by largest relay-destination
/// gain.
///
/// `gains_id` and `gains_ie` are the per-relay means of the exponential
/// relay-destination and relay-eavesdropper gains, indexed by relay.
pub fn best_relay_eve_exceedance(dn: &RelayIndexSet, gains_id: &[f64], gains_ie: &[f64], lambda: f64) -> Result<f64> {
    if dn.is_empty() {
        return Err(SrtError::Domain("decoding set must be non-empty".into()));
    }
    if lambda.is_nan() || lambda < 0.0 {
        return Err(SrtError::Domain(format!("threshold lambda = {lambda} must be >= 0")));
    }
    check_gains(dn, gains_id, "gains_id")?;
    check_gains(dn, gains_ie, "gains_ie")?;
    let mut terms = Vec::with_capacity(dn.cardinality());
    for i in dn {
        let tail = (-lambda / gains_ie[i]).exp();
        terms.push(tail * best_relay_selection_probability(i, dn, gains_id)?);
    }
    Ok(compensated_sum(&mut terms).clamp(0.0, 1.0))
}

fn check_gains(dn: &RelayIndexSet, gains: &[f64], name: &str) -> Result<()> {
    for i in dn {
        match gains.get(i) {
            None => {
                return Err(SrtError::Domain(format!(
                    "{name} has {} entries, relay {i} requested",
                    gains.len()
                )))
            }
            Some(&g) if !(g > 0.0 && g.is_finite()) => {
                return Err(SrtError::Domain(format!("{name}[{i}] = {g} must be positive")))
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Neumaier-compensated sum, after ordering the terms by decreasing magnitude.
pub(crate) fn compensated_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for &t in terms.iter() {
        let next = sum + t;
        if sum.abs() >= t.abs() {
            carry += (sum - next) + t;
        } else {
            carry += (t - next) + sum;
        }
        sum = next;
    }
    sum + carry
}
