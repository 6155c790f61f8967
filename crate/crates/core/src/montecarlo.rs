//! Full-protocol Monte Carlo simulation of the three schemes.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::Scheme;
use crate::channel::{
    decoding_set, draw_realization, shannon_capacity, stream_domain, substream, ChannelRealization, SystemParams,
};
use crate::error::{Result, SrtError};
use crate::special::RelayIndexSet;

/// Binomial proportion estimate with its normal-approximation standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub stderr: f64,
}

impl McEstimate {
    pub fn new(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(SrtError::Domain("Monte Carlo needs at least one trial".into()));
        }
        if successes > trials {
            return Err(SrtError::Domain(format!(
                "{successes} successes out of {trials} trials"
            )));
        }
        let n = trials as f64;
        let p_hat = successes as f64 / n;
        Ok(Self {
            trials,
            successes,
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / n).sqrt(),
        })
    }
}

/// Outcome of one simulated transmission.
///
/// A receiver decodes only when its capacity strictly exceeds the rate; a
/// gain sitting exactly on the threshold is a failure for both the
/// destination and the eavesdropper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    /// The destination cannot decode.
    pub outage: bool,
    /// The eavesdropper can decode.
    pub intercept: bool,
}

impl TrialOutcome {
    const SILENT: TrialOutcome = TrialOutcome {
        outage: true,
        intercept: false,
    };
}

pub fn trial_direct(real: &ChannelRealization, params: &SystemParams) -> TrialOutcome {
    let delta = params.delta();
    TrialOutcome {
        outage: !(real.h_sd.norm_sqr() > delta),
        intercept: real.h_se.norm_sqr() > delta,
    }
}

/// Decoding relay with the largest relay-destination gain; the lowest index
/// wins an exact tie.
pub fn best_relay(real: &ChannelRealization, dset: &RelayIndexSet) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in dset {
        let g = real.h_id[i].norm_sqr();
        if best.is_none_or(|(_, bg)| g > bg) {
            best = Some((i, g));
        }
    }
    best.map(|(i, _)| i)
}

pub fn trial_single(real: &ChannelRealization, params: &SystemParams) -> TrialOutcome {
    let dset = decoding_set(real, params);
    let Some(b) = best_relay(real, &dset) else {
        return TrialOutcome::SILENT;
    };
    let lambda = params.lambda();
    TrialOutcome {
        outage: !(real.h_id[b].norm_sqr() > lambda),
        intercept: real.h_ie[b].norm_sqr() > lambda,
    }
}

/// Destination gain under the matched beamformer: `sum |h_id|^2` over `dset`.
pub fn multi_destination_gain(real: &ChannelRealization, dset: &RelayIndexSet) -> f64 {
    dset.iter().map(|i| real.h_id[i].norm_sqr()).sum()
}

/// Eavesdropper gain under the destination-matched beamformer:
/// `|h_d^H h_e|^2 / |h_d|^2` restricted to `dset`.
pub fn multi_eavesdropper_gain(real: &ChannelRealization, dset: &RelayIndexSet) -> f64 {
    let mut inner = Complex64::new(0.0, 0.0);
    let mut norm = 0.0;
    for i in dset {
        inner += real.h_id[i].conj() * real.h_ie[i];
        norm += real.h_id[i].norm_sqr();
    }
    inner.norm_sqr() / norm
}

/// Unit-norm beamforming weights `h_d^* / |h_d|` over the relays in `dset`.
pub fn matched_weights(real: &ChannelRealization, dset: &RelayIndexSet) -> Vec<Complex64> {
    let norm = multi_destination_gain(real, dset).sqrt();
    dset.iter().map(|i| real.h_id[i].conj() / norm).collect()
}

pub fn trial_multi(real: &ChannelRealization, params: &SystemParams) -> TrialOutcome {
    let dset = decoding_set(real, params);
    if dset.is_empty() {
        return TrialOutcome::SILENT;
    }
    let lambda = params.lambda();
    TrialOutcome {
        outage: !(multi_destination_gain(real, &dset) > lambda),
        intercept: multi_eavesdropper_gain(real, &dset) > lambda,
    }
}

/// Two-slot capacity `0.5 log2(1 + gamma g)`.
pub fn relayed_capacity(gain: f64, params: &SystemParams) -> f64 {
    0.5 * shannon_capacity(gain * params.gamma())
}

pub fn trial(scheme: Scheme, real: &ChannelRealization, params: &SystemParams) -> TrialOutcome {
    match scheme {
        Scheme::Direct => trial_direct(real, params),
        Scheme::SingleRelay => trial_single(real, params),
        Scheme::MultiRelay => trial_multi(real, params),
    }
}

const CHUNK: u64 = 1 << 14;

/// Estimates `(outage, intercept)` from `trials` independent transmissions.
///
/// Trial `t` draws its realization from `substream(seed, PROTOCOL_TRIALS, t)`
/// and counts are integers, so the result does not depend on how rayon
/// schedules the chunks.
pub fn estimate(scheme: Scheme, params: &SystemParams, trials: u64, seed: u64) -> Result<(McEstimate, McEstimate)> {
    if trials == 0 {
        return Err(SrtError::Domain("Monte Carlo needs at least one trial".into()));
    }
    if scheme.uses_relays() && params.n_relays() == 0 {
        return Err(SrtError::Domain("relay schemes need at least one relay".into()));
    }
    let chunks = trials.div_ceil(CHUNK);
    let (outages, intercepts) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let (mut o, mut i) = (0u64, 0u64);
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let mut rng = substream(seed, stream_domain::PROTOCOL_TRIALS, t);
                let real = draw_realization(params, &mut rng);
                let out = trial(scheme, &real, params);
                o += u64::from(out.outage);
                i += u64::from(out.intercept);
            }
            (o, i)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((McEstimate::new(outages, trials)?, McEstimate::new(intercepts, trials)?))
}
