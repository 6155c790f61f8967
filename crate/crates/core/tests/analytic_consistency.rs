//! Closed forms against the protocol simulator, plus shape properties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srt_core::analytic::{
    decoding_set_probability, ip_direct, ip_multi, ip_multi_with, ip_single, op_direct, op_multi, op_single,
    InnerEstimator,
};
use srt_core::channel::substream;
use srt_core::montecarlo::estimate;
use srt_core::{RelayIndexSet, Scheme, SystemParams};

fn within(analytic: f64, estimate: f64, stderr: f64, k: f64) -> bool {
    (analytic - estimate).abs() <= k * stderr
}

#[test]
fn single_relay_n1_matches_simulation() {
    let p = SystemParams::symmetric(10.0, 1.0, 1, 1.0, 0.1, 1.0, 1.0, 0.1).unwrap();
    let (op, ip) = estimate(Scheme::SingleRelay, &p, 1_000_000, 3).unwrap();
    assert!(within(op_single(&p).unwrap(), op.p_hat, op.stderr, 3.0));
    assert!(within(ip_single(&p).unwrap(), ip.p_hat, ip.stderr, 3.0));
}

#[test]
fn single_relay_symmetric_pair_matches_simulation() {
    let p = SystemParams::reference().with_relay_count(2).unwrap();
    let (op, ip) = estimate(Scheme::SingleRelay, &p, 1_000_000, 4).unwrap();
    assert!(within(op_single(&p).unwrap(), op.p_hat, op.stderr, 3.0));
    assert!(within(ip_single(&p).unwrap(), ip.p_hat, ip.stderr, 3.0));
}

fn asymmetric() -> SystemParams {
    SystemParams::new(
        4.0,
        0.7,
        0.8,
        0.3,
        vec![0.5, 1.0, 2.0, 0.8],
        vec![1.5, 0.4, 1.0, 0.7],
        vec![0.2, 0.9, 0.05, 0.4],
    )
    .unwrap()
}

#[test]
fn single_relay_unequal_gains_match_simulation() {
    let p = asymmetric();
    let (op, ip) = estimate(Scheme::SingleRelay, &p, 1_000_000, 5).unwrap();
    assert!(
        within(op_single(&p).unwrap(), op.p_hat, op.stderr, 3.0),
        "{} vs {op:?}",
        op_single(&p).unwrap()
    );
    assert!(
        within(ip_single(&p).unwrap(), ip.p_hat, ip.stderr, 3.0),
        "{} vs {ip:?}",
        ip_single(&p).unwrap()
    );
}

#[test]
fn multi_relay_outage_matches_simulation() {
    let p = SystemParams::reference().with_gamma(4.0).unwrap();
    let (op, _) = estimate(Scheme::MultiRelay, &p, 1_000_000, 6).unwrap();
    assert!(within(op_multi(&p).unwrap(), op.p_hat, op.stderr, 3.0));
}

#[test]
fn multi_relay_intercept_estimators_agree_with_simulation() {
    let p = SystemParams::new(
        4.0,
        0.7,
        0.8,
        0.3,
        vec![0.5, 1.0, 2.0, 0.8],
        vec![1.0; 4],
        vec![0.2, 0.9, 0.05, 0.4],
    )
    .unwrap();
    let (_, mc) = estimate(Scheme::MultiRelay, &p, 1_000_000, 7).unwrap();
    let (cond, cond_se) = ip_multi(&p, 50_000, &mut substream(7, 1, 0)).unwrap();
    let (ind, ind_se) = ip_multi_with(&p, 50_000, &mut substream(7, 1, 1), InnerEstimator::Indicator).unwrap();
    assert!(cond_se > 0.0 && ind_se > cond_se);
    let combined = |se: f64| (se * se + mc.stderr * mc.stderr).sqrt();
    assert!(within(cond, mc.p_hat, combined(cond_se), 3.0), "{cond} vs {mc:?}");
    assert!(within(ind, mc.p_hat, combined(ind_se), 3.0), "{ind} vs {mc:?}");
}

#[test]
fn multi_intercept_singleton_inner_term() {
    // One relay: the projected eavesdropper gain is |h_1e|^2 itself.
    let p = SystemParams::symmetric(10.0, 1.0, 1, 1.0, 0.1, 1.0, 0.7, 0.25).unwrap();
    let weight = decoding_set_probability(&RelayIndexSet::full(1), &p).unwrap();
    let tail = (-p.lambda() / 0.25).exp();
    let (ind, se) = ip_multi_with(&p, 100_000, &mut substream(1, 1, 0), InnerEstimator::Indicator).unwrap();
    assert!(within(weight * tail, ind, se, 4.0));
    let (cond, _) = ip_multi(&p, 1_000, &mut substream(1, 1, 0)).unwrap();
    assert!((cond - weight * tail).abs() < 1e-15);
}

fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    let n = rng.random_range(1..=3usize);
    let mut g = |lo: f64, hi: f64| 10f64.powf(rng.random_range(lo..hi));
    let gamma = g(-1.0, 3.0);
    let rate = g(-1.0, 0.7);
    let (sd, se) = (g(-1.0, 1.0), g(-2.0, 1.0));
    let si: Vec<f64> = (0..n).map(|_| g(-1.0, 1.0)).collect();
    let id = vec![g(-1.0, 1.0); n];
    let ie: Vec<f64> = (0..n).map(|_| g(-2.0, 1.0)).collect();
    SystemParams::new(gamma, rate, sd, se, si, id, ie).unwrap()
}

#[test]
fn evaluators_stay_in_unit_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for k in 0..10_000u64 {
        let p = random_params(&mut rng);
        let (ipm, _) = ip_multi(&p, 1_000, &mut substream(k, 1, 0)).unwrap();
        for v in [
            op_direct(&p),
            ip_direct(&p),
            op_single(&p).unwrap(),
            ip_single(&p).unwrap(),
            op_multi(&p).unwrap(),
            ipm,
        ] {
            assert!((0.0..=1.0).contains(&v), "{v} for {p:?}");
        }
    }
}

#[test]
fn outage_falls_and_intercept_rises_with_snr() {
    let asym_eve = SystemParams::new(
        1.0,
        1.0,
        1.0,
        0.1,
        vec![1.0; 4],
        vec![1.0; 4],
        vec![0.05, 0.1, 0.2, 0.4],
    )
    .unwrap();
    for base in [SystemParams::reference(), asym_eve] {
        let grid: Vec<f64> = (0..50).map(|i| 10f64.powf(-0.5 + 0.07 * i as f64)).collect();
        let mut prev: Option<[f64; 6]> = None;
        for gamma in grid {
            let p = base.with_gamma(gamma).unwrap();
            let (ipm, _) = ip_multi(&p, 2_000, &mut substream(99, 1, 0)).unwrap();
            let now = [
                op_direct(&p),
                op_single(&p).unwrap(),
                op_multi(&p).unwrap(),
                ip_direct(&p),
                ip_single(&p).unwrap(),
                ipm,
            ];
            if let Some(before) = prev {
                for j in 0..3 {
                    assert!(now[j] <= before[j], "outage {j} rose at gamma {gamma}");
                    assert!(now[j + 3] >= before[j + 3], "intercept {j} fell at gamma {gamma}");
                }
            }
            prev = Some(now);
        }
    }
}

#[test]
fn one_relay_collapses_all_relay_evaluators() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..200u64 {
        let mut p = random_params(&mut rng);
        while p.n_relays() != 1 {
            p = random_params(&mut rng);
        }
        let (ipm, _) = ip_multi(&p, 1_000, &mut substream(k, 1, 0)).unwrap();
        assert!((op_single(&p).unwrap() - op_multi(&p).unwrap()).abs() < 1e-12);
        assert!((ip_single(&p).unwrap() - ipm).abs() < 1e-12);
    }
}

#[test]
fn multi_outage_never_exceeds_single() {
    for n in 1..=8usize {
        for gdb in (0..=30).step_by(3) {
            for rate in [0.25, 1.0, 2.0] {
                let p = SystemParams::reference()
                    .with_relay_count(n)
                    .unwrap()
                    .with_gamma(10f64.powf(gdb as f64 / 10.0))
                    .unwrap()
                    .with_rate(rate)
                    .unwrap();
                assert!(op_multi(&p).unwrap() <= op_single(&p).unwrap() + 1e-15);
            }
        }
    }
}

#[test]
fn multi_intercept_default_configuration_zero_threshold_limit() {
    let p = SystemParams::reference().with_gamma(1e300).unwrap();
    let (ip, se) = ip_multi_with(&p, 1_000, &mut substream(1, 1, 0), InnerEstimator::Indicator).unwrap();
    let none = decoding_set_probability(&RelayIndexSet::empty(6), &p).unwrap();
    assert!((ip - (1.0 - none)).abs() < 1e-12);
    assert_eq!(se, 0.0);
}

#[test]
fn relay_outage_beats_direct_from_eight_db() {
    let base = SystemParams::reference();
    for gdb in (0..=30).step_by(2) {
        let p = base.with_gamma(10f64.powf(gdb as f64 / 10.0)).unwrap();
        let (d, s, m) = (op_direct(&p), op_single(&p).unwrap(), op_multi(&p).unwrap());
        if gdb >= 8 {
            assert!(s <= d && m <= d, "{gdb} dB: single {s} multi {m} direct {d}");
        } else {
            // half-rate penalty: relayed links need three times the direct threshold
            assert!(s > d, "{gdb} dB: single {s} direct {d}");
        }
    }
}
