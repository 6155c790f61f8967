//! Independent numerical oracles. Test code only: nothing here calls into the
//! inclusion-exclusion or Poisson-sum paths it is used to check.

#![allow(dead_code)]

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates over `[0, inf)` for integrands dominated by `e^{-t}`, split
/// into panels so the adaptive rule sees the shape near the origin.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: &F, tol: f64) -> f64 {
    let cuts = [0.0, 0.25, 1.0, 3.0, 8.0, 20.0, 45.0, 80.0];
    cuts.windows(2).map(|w| integrate(f, w[0], w[1], tol / 8.0)).sum()
}

/// `P(k, x)` by quadrature of the Erlang density `t^{k-1} e^{-t} / (k-1)!`.
pub fn lower_gamma_by_quadrature(x: f64, k: u32) -> f64 {
    let fact: f64 = (1..k).map(f64::from).product();
    let density = |t: f64| t.powi(k as i32 - 1) * (-t).exp() / fact;
    integrate(&density, 0.0, x, 1e-15)
}

/// `Pr(Y_i > max_j Y_j)` for independent exponentials, by integrating
/// `f_{Y_i}(y) prod_j F_{Y_j}(y)` over `y`, with `y = gain_i * t`.
pub fn selection_probability_by_quadrature(relay: usize, members: &[usize], gains_id: &[f64]) -> f64 {
    let own = gains_id[relay];
    let ratios: Vec<f64> = members
        .iter()
        .filter(|&&j| j != relay)
        .map(|&j| own / gains_id[j])
        .collect();
    let integrand = |t: f64| (-t).exp() * ratios.iter().map(|r| -(-t * r).exp_m1()).product::<f64>();
    integrate_half_line(&integrand, 1e-13)
}

/// Best-relay eavesdropper exceedance assembled by total probability from
/// per-relay exponential tails and quadrature selection probabilities.
pub fn best_relay_exceedance_by_quadrature(members: &[usize], gains_id: &[f64], gains_ie: &[f64], lambda: f64) -> f64 {
    members
        .iter()
        .map(|&i| (-lambda / gains_ie[i]).exp() * selection_probability_by_quadrature(i, members, gains_id))
        .sum()
}
