//! Closed-form and semi-analytic outage/intercept probabilities.
//!
//! Relay schemes condition on the decoding set: the probability of each
//! decoding set is exact, and is multiplied by the probability that the
//! second hop fails (outage) or that the eavesdropper's second-hop gain
//! clears the threshold (intercept).

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::channel::{draw_coefficient, SystemParams};
use crate::error::{Result, SrtError};
use crate::special::{
    best_relay_eve_exceedance, check_enumeration_cap, enumerate_nonempty_subsets, regularized_lower_gamma,
    RelayIndexSet, SUBSET_ENUMERATION_CAP,
};

/// Transmission scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Source to destination, no relays.
    Direct,
    /// Best decoding relay (by relay-destination gain) forwards alone.
    SingleRelay,
    /// All decoding relays forward jointly with the destination-matched beamformer.
    MultiRelay,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Direct, Scheme::SingleRelay, Scheme::MultiRelay];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Direct => "direct",
            Scheme::SingleRelay => "single",
            Scheme::MultiRelay => "multi",
        }
    }

    pub fn uses_relays(&self) -> bool {
        !matches!(self, Scheme::Direct)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = SrtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Scheme::Direct),
            "single" => Ok(Scheme::SingleRelay),
            "multi" => Ok(Scheme::MultiRelay),
            other => Err(SrtError::Domain(format!(
                "unknown scheme `{other}` (expected direct, single or multi)"
            ))),
        }
    }
}

/// How a probability was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Analytic,
    /// Exact decoding-set weights with a sampled inner probability.
    SemiAnalytic,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::SemiAnalytic => "semi-analytic",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = SrtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Method::Analytic),
            "semi-analytic" => Ok(Method::SemiAnalytic),
            "monte-carlo" => Ok(Method::MonteCarlo),
            other => Err(SrtError::Domain(format!("unknown method `{other}`"))),
        }
    }
}

/// A paired (outage, intercept) evaluation of one scheme.
///
/// Standard errors are present exactly when the method involved sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SrtPoint {
    pub scheme: Scheme,
    pub method: Method,
    pub op: f64,
    pub ip: f64,
    pub op_stderr: Option<f64>,
    pub ip_stderr: Option<f64>,
}

impl SrtPoint {
    pub fn analytic(scheme: Scheme, op: f64, ip: f64) -> Self {
        Self {
            scheme,
            method: Method::Analytic,
            op,
            ip,
            op_stderr: None,
            ip_stderr: None,
        }
    }
}

/// `1 - exp(-Delta / gain_sd)`.
pub fn op_direct(params: &SystemParams) -> f64 {
    -(-params.delta() / params.gain_sd()).exp_m1()
}

/// `exp(-Delta / gain_se)`.
pub fn ip_direct(params: &SystemParams) -> f64 {
    (-params.delta() / params.gain_se()).exp()
}

/// Probability that exactly the relays in `dn` decode the first hop.
pub fn decoding_set_probability(dn: &RelayIndexSet, params: &SystemParams) -> Result<f64> {
    Ok(ln_decoding_set_probability(dn, params)?.exp())
}

/// Log of the product of per-relay decode / fail probabilities.
fn ln_decoding_set_probability(dn: &RelayIndexSet, params: &SystemParams) -> Result<f64> {
    if dn.universe() != params.n_relays() {
        return Err(SrtError::Domain(format!(
            "decoding set over {} relays used with {} relays configured",
            dn.universe(),
            params.n_relays()
        )));
    }
    let lambda = params.lambda();
    let ln_p = params
        .gains_si()
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            if dn.contains(i) {
                -lambda / g
            } else {
                ln_exp_cdf(lambda, g)
            }
        })
        .sum();
    Ok(ln_p)
}

/// `ln(1 - exp(-x / mean))`.
fn ln_exp_cdf(x: f64, mean: f64) -> f64 {
    (-(-x / mean).exp_m1()).ln()
}

fn require_relays(params: &SystemParams) -> Result<()> {
    if params.n_relays() == 0 {
        return Err(SrtError::Domain("relay schemes need at least one relay".into()));
    }
    check_enumeration_cap(params.n_relays(), SUBSET_ENUMERATION_CAP)
}

/// Outage probability of single-relay selection.
///
/// Outage happens when no relay decodes, or when the best decoding relay's
/// gain to the destination is below Lambda, which for independent links is
/// the product of the per-relay exponential CDFs.
pub fn op_single(params: &SystemParams) -> Result<f64> {
    require_relays(params)?;
    let n = params.n_relays();
    let lambda = params.lambda();
    let ln_fail_id: Vec<f64> = params.gains_id().iter().map(|&g| ln_exp_cdf(lambda, g)).collect();
    let mut total = decoding_set_probability(&RelayIndexSet::empty(n), params)?;
    for dn in enumerate_nonempty_subsets(n)? {
        let ln_second_hop: f64 = dn.iter().map(|i| ln_fail_id[i]).sum();
        total += (ln_decoding_set_probability(&dn, params)? + ln_second_hop).exp();
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Intercept probability of single-relay selection.
///
/// An empty decoding set leaks nothing; otherwise the eavesdropper hears the
/// relay picked for its destination gain, see [`best_relay_eve_exceedance`].
pub fn ip_single(params: &SystemParams) -> Result<f64> {
    require_relays(params)?;
    let lambda = params.lambda();
    let mut total = 0.0;
    for dn in enumerate_nonempty_subsets(params.n_relays())? {
        let weight = decoding_set_probability(&dn, params)?;
        if weight == 0.0 {
            continue;
        }
        total += weight * best_relay_eve_exceedance(&dn, params.gains_id(), params.gains_ie(), lambda)?;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Outage probability of multi-relay selection.
///
/// With every relay-destination gain sharing one mean, the beamformed
/// destination gain of a decoding set is Erlang distributed, so the per-set
/// outage factor is the regularized incomplete gamma at `Lambda / gain_id`.
/// Unequal relay-destination gains are rejected; use Monte Carlo for those.
pub fn op_multi(params: &SystemParams) -> Result<f64> {
    require_relays(params)?;
    let n = params.n_relays();
    let gain_d = params.gains_id()[0];
    if params.gains_id().iter().any(|&g| g != gain_d) {
        return Err(SrtError::Unsupported(
            "multi-relay outage closed form needs identical relay-destination gains; \
             estimate this configuration with Monte Carlo"
                .into(),
        ));
    }
    let x = params.lambda() / gain_d;
    let ln_erlang_cdf = (1..=n)
        .map(|k| Ok(regularized_lower_gamma(x, k as u32)?.ln()))
        .collect::<Result<Vec<f64>>>()?;
    let mut total = decoding_set_probability(&RelayIndexSet::empty(n), params)?;
    for dn in enumerate_nonempty_subsets(n)? {
        total += (ln_decoding_set_probability(&dn, params)? + ln_erlang_cdf[dn.cardinality() - 1]).exp();
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Estimator for the eavesdropper term `Pr(|h_d^H h_e|^2 / |h_d|^2 > Lambda)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InnerEstimator {
    /// Draw `h_d` only; given `h_d` the projected eavesdropper gain is
    /// exponential with mean `sum |h_id|^2 g_ie / sum |h_id|^2`, so each draw
    /// contributes its exact conditional tail probability.
    #[default]
    Conditional,
    /// Draw `h_d` and `h_e` and count threshold crossings.
    Indicator,
}

/// Semi-analytic intercept probability of multi-relay selection.
///
/// Returns `(probability, stderr)`. Decoding-set weights are exact; the inner
/// term of each non-empty set is averaged over `inner_trials` draws from
/// `rng`, so `stderr^2 = sum_n w_n^2 var_n`.
pub fn ip_multi<R: Rng + ?Sized>(params: &SystemParams, inner_trials: u64, rng: &mut R) -> Result<(f64, f64)> {
    ip_multi_with(params, inner_trials, rng, InnerEstimator::default())
}

/// Smallest `inner_trials` accepted by [`ip_multi`].
pub const MIN_INNER_TRIALS: u64 = 1_000;

/// [`ip_multi`] with an explicit inner estimator.
pub fn ip_multi_with<R: Rng + ?Sized>(
    params: &SystemParams,
    inner_trials: u64,
    rng: &mut R,
    estimator: InnerEstimator,
) -> Result<(f64, f64)> {
    require_relays(params)?;
    if inner_trials < MIN_INNER_TRIALS {
        return Err(SrtError::Domain(format!(
            "inner_trials = {inner_trials} is below the minimum of {MIN_INNER_TRIALS}"
        )));
    }
    let lambda = params.lambda();
    let mut total = 0.0;
    let mut variance = 0.0;
    for dn in enumerate_nonempty_subsets(params.n_relays())? {
        let weight = decoding_set_probability(&dn, params)?;
        if weight == 0.0 {
            continue;
        }
        if lambda == 0.0 {
            total += weight;
            continue;
        }
        let (mean, var) = inner_eavesdropper_tail(&dn, params, lambda, inner_trials, rng, estimator);
        total += weight * mean;
        variance += weight * weight * var;
    }
    Ok((total.clamp(0.0, 1.0), variance.sqrt()))
}

/// Sample mean of the inner term and the variance of that mean.
fn inner_eavesdropper_tail<R: Rng + ?Sized>(
    dn: &RelayIndexSet,
    params: &SystemParams,
    lambda: f64,
    trials: u64,
    rng: &mut R,
    estimator: InnerEstimator,
) -> (f64, f64) {
    let (gains_id, gains_ie) = (params.gains_id(), params.gains_ie());
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for t in 1..=trials {
        let value = match estimator {
            InnerEstimator::Conditional => {
                let (mut num, mut den) = (0.0, 0.0);
                for i in dn {
                    let d = draw_coefficient(gains_id[i], rng).norm_sqr();
                    num += d * gains_ie[i];
                    den += d;
                }
                (-lambda * den / num).exp()
            }
            InnerEstimator::Indicator => {
                let mut inner = num_complex::Complex64::new(0.0, 0.0);
                let mut den = 0.0;
                for i in dn {
                    let hd = draw_coefficient(gains_id[i], rng);
                    let he = draw_coefficient(gains_ie[i], rng);
                    inner += hd.conj() * he;
                    den += hd.norm_sqr();
                }
                if inner.norm_sqr() / den > lambda {
                    1.0
                } else {
                    0.0
                }
            }
        };
        let delta = value - mean;
        mean += delta / t as f64;
        m2 += delta * (value - mean);
    }
    let n = trials as f64;
    (mean, m2 / n / n)
}

/// Evaluates one scheme by its closed form, sampling only where no closed
/// form exists (multi-relay intercept).
pub fn evaluate<R: Rng + ?Sized>(
    scheme: Scheme,
    params: &SystemParams,
    inner_trials: u64,
    rng: &mut R,
) -> Result<SrtPoint> {
    match scheme {
        Scheme::Direct => Ok(SrtPoint::analytic(scheme, op_direct(params), ip_direct(params))),
        Scheme::SingleRelay => Ok(SrtPoint::analytic(scheme, op_single(params)?, ip_single(params)?)),
        Scheme::MultiRelay => {
            let op = op_multi(params)?;
            let (ip, ip_stderr) = ip_multi(params, inner_trials, rng)?;
            Ok(SrtPoint {
                scheme,
                method: Method::SemiAnalytic,
                op,
                ip,
                op_stderr: Some(0.0),
                ip_stderr: Some(ip_stderr),
            })
        }
    }
}
