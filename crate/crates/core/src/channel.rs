//! Rayleigh fading realizations and the rate-threshold predicates on them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SrtError};
use crate::special::{RelayIndexSet, MAX_RELAYS};

/// Scenario constants: SNR, rate and the mean power gain of every link.
///
/// `gamma` is the linear transmit SNR `P / N0` and `rate` the data rate in
/// bit/s/Hz. Gains are means of `|h|^2` for the source-destination (`sd`),
/// source-eavesdropper (`se`), source-relay (`si`), relay-destination (`id`)
/// and relay-eavesdropper (`ie`) links. All transmitters use the same power.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    gamma: f64,
    rate: f64,
    gain_sd: f64,
    gain_se: f64,
    gains_si: Vec<f64>,
    gains_id: Vec<f64>,
    gains_ie: Vec<f64>,
}

impl SystemParams {
    pub fn new(
        gamma: f64,
        rate: f64,
        gain_sd: f64,
        gain_se: f64,
        gains_si: Vec<f64>,
        gains_id: Vec<f64>,
        gains_ie: Vec<f64>,
    ) -> Result<Self> {
        positive("gamma", gamma)?;
        positive("rate", rate)?;
        positive("gain_sd", gain_sd)?;
        positive("gain_se", gain_se)?;
        let n = gains_si.len();
        if n > MAX_RELAYS {
            return Err(SrtError::InvalidParam {
                field: "n_relays",
                reason: format!("{n} exceeds the maximum of {MAX_RELAYS}"),
            });
        }
        for (field, gains) in [
            ("gains_si", &gains_si),
            ("gains_id", &gains_id),
            ("gains_ie", &gains_ie),
        ] {
            if gains.len() != n {
                return Err(SrtError::InvalidParam {
                    field,
                    reason: format!("has {} entries, expected one per relay ({n})", gains.len()),
                });
            }
            for &g in gains {
                positive(field, g)?;
            }
        }
        Ok(Self {
            gamma,
            rate,
            gain_sd,
            gain_se,
            gains_si,
            gains_id,
            gains_ie,
        })
    }

    /// Every relay shares the same three link gains.
    #[allow(clippy::too_many_arguments)]
    pub fn symmetric(
        gamma: f64,
        rate: f64,
        n_relays: usize,
        gain_sd: f64,
        gain_se: f64,
        gain_si: f64,
        gain_id: f64,
        gain_ie: f64,
    ) -> Result<Self> {
        Self::new(
            gamma,
            rate,
            gain_sd,
            gain_se,
            vec![gain_si; n_relays],
            vec![gain_id; n_relays],
            vec![gain_ie; n_relays],
        )
    }

    /// The reference scenario: 10 dB, 1 bit/s/Hz, six relays, unit main-link
    /// gains and 0.1 on every eavesdropper link.
    pub fn reference() -> Self {
        Self::symmetric(10.0, 1.0, 6, 1.0, 0.1, 1.0, 1.0, 0.1).expect("reference parameters are valid")
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        Ok(Self { gamma, ..self.clone() })
    }

    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(Self { rate, ..self.clone() })
    }

    /// Resizes the relay population. Only defined when each per-relay gain
    /// vector is uniform (or `n_relays` is unchanged).
    pub fn with_relay_count(&self, n_relays: usize) -> Result<Self> {
        if n_relays == self.n_relays() {
            return Ok(self.clone());
        }
        let resize = |field: &'static str, gains: &[f64]| -> Result<Vec<f64>> {
            match gains.first() {
                Some(&g) if gains.iter().all(|&x| x == g) => Ok(vec![g; n_relays]),
                Some(_) => Err(SrtError::InvalidParam {
                    field,
                    reason: "per-relay gains differ, cannot change the relay count".into(),
                }),
                None => Err(SrtError::InvalidParam {
                    field,
                    reason: "no relay gains to replicate".into(),
                }),
            }
        };
        Self::new(
            self.gamma,
            self.rate,
            self.gain_sd,
            self.gain_se,
            resize("gains_si", &self.gains_si)?,
            resize("gains_id", &self.gains_id)?,
            resize("gains_ie", &self.gains_ie)?,
        )
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn n_relays(&self) -> usize {
        self.gains_si.len()
    }

    pub fn gain_sd(&self) -> f64 {
        self.gain_sd
    }

    pub fn gain_se(&self) -> f64 {
        self.gain_se
    }

    pub fn gains_si(&self) -> &[f64] {
        &self.gains_si
    }

    pub fn gains_id(&self) -> &[f64] {
        &self.gains_id
    }

    pub fn gains_ie(&self) -> &[f64] {
        &self.gains_ie
    }

    /// Gain threshold for one-slot (direct) decoding: `(2^R - 1) / gamma`.
    pub fn delta(&self) -> f64 {
        pow2_minus_one(self.rate) / self.gamma
    }

    /// Gain threshold for two-slot (relayed) decoding: `(2^{2R} - 1) / gamma`.
    pub fn lambda(&self) -> f64 {
        pow2_minus_one(2.0 * self.rate) / self.gamma
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::reference()
    }
}

// exp2 is exact at integer exponents; exp_m1 keeps small rates accurate.
fn pow2_minus_one(x: f64) -> f64 {
    if x >= 1.0 {
        x.exp2() - 1.0
    } else {
        (x * std::f64::consts::LN_2).exp_m1()
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SrtError::InvalidParam {
            field,
            reason: format!("{value} must be a positive finite number"),
        })
    }
}

/// One draw of every fading coefficient in the network.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub h_sd: Complex64,
    pub h_se: Complex64,
    pub h_si: Vec<Complex64>,
    pub h_id: Vec<Complex64>,
    pub h_ie: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn n_relays(&self) -> usize {
        self.h_si.len()
    }
}

/// Draws `CN(0, gain)`: two independent real normals of variance `gain / 2`,
/// so `|h|^2` is exponential with mean `gain`.
pub fn draw_coefficient<R: Rng + ?Sized>(gain: f64, rng: &mut R) -> Complex64 {
    let scale = (0.5 * gain).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// Draws all `2 + 3N` coefficients independently.
///
/// Draw order is fixed (`sd`, `se`, then `si`, `id`, `ie` per relay), so a
/// given stream state always yields the same realization.
pub fn draw_realization<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelRealization {
    let n = params.n_relays();
    let h_sd = draw_coefficient(params.gain_sd, rng);
    let h_se = draw_coefficient(params.gain_se, rng);
    let mut h_si = Vec::with_capacity(n);
    let mut h_id = Vec::with_capacity(n);
    let mut h_ie = Vec::with_capacity(n);
    for i in 0..n {
        h_si.push(draw_coefficient(params.gains_si[i], rng));
        h_id.push(draw_coefficient(params.gains_id[i], rng));
        h_ie.push(draw_coefficient(params.gains_ie[i], rng));
    }
    ChannelRealization {
        h_sd,
        h_se,
        h_si,
        h_id,
        h_ie,
    }
}

/// Relays whose first-hop gain clears the two-slot threshold.
///
/// A gain exactly at the threshold does not decode.
pub fn decoding_set(real: &ChannelRealization, params: &SystemParams) -> RelayIndexSet {
    let lambda = params.lambda();
    let mut set = RelayIndexSet::empty(real.n_relays());
    for (i, h) in real.h_si.iter().enumerate() {
        if h.norm_sqr() > lambda {
            set.insert(i);
        }
    }
    set
}

/// Single-slot capacities `(C_sd, C_se)` of direct transmission, bit/s/Hz.
pub fn capacity_direct(real: &ChannelRealization, params: &SystemParams) -> (f64, f64) {
    (
        shannon_capacity(real.h_sd.norm_sqr() * params.gamma),
        shannon_capacity(real.h_se.norm_sqr() * params.gamma),
    )
}

/// `log2(1 + snr)`.
pub fn shannon_capacity(snr: f64) -> f64 {
    snr.ln_1p() / std::f64::consts::LN_2
}

/// Stream domains, each a disjoint region of the ChaCha keystream.
pub mod stream_domain {
    pub const PROTOCOL_TRIALS: u64 = 0;
    pub const SEMI_ANALYTIC: u64 = 1;
}

/// Independent random stream for `(seed, domain, index)`.
///
/// The seed keys the generator, `index` selects the ChaCha stream and
/// `domain` offsets the starting position by `2^64` words, so streams never
/// overlap and do not depend on which thread consumes them.
pub fn substream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.set_word_pos(u128::from(domain) << 64);
    rng
}
