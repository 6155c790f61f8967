//! SNR sweeps and security-reliability trade-off curves.

use rayon::prelude::*;

use crate::analytic::{self, Method, Scheme, SrtPoint};
use crate::channel::{stream_domain, substream, SystemParams};
use crate::error::{Result, SrtError};
use crate::montecarlo;
use crate::special::{check_enumeration_cap, SUBSET_ENUMERATION_CAP};

/// Which evaluators a sweep runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodSelection {
    Analytic,
    MonteCarlo,
    Both,
}

impl MethodSelection {
    fn methods(self) -> &'static [Method] {
        match self {
            MethodSelection::Analytic => &[Method::Analytic],
            MethodSelection::MonteCarlo => &[Method::MonteCarlo],
            MethodSelection::Both => &[Method::Analytic, Method::MonteCarlo],
        }
    }

    pub fn includes_monte_carlo(self) -> bool {
        self != MethodSelection::Analytic
    }
}

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_INNER_TRIALS: u64 = 20_000;

/// `10^(db / 10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `start, start + step, ...` up to `stop` inclusive.
pub fn db_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(SrtError::Domain(format!("bad grid {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// 0 to 30 dB in 2 dB steps.
pub fn default_gamma_grid() -> Vec<f64> {
    db_grid(0.0, 30.0, 2.0).expect("static grid")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub schemes: Vec<Scheme>,
    /// Transmit SNR grid in dB, strictly ascending.
    pub gamma_db_grid: Vec<f64>,
    /// Template; gamma is replaced at each grid point.
    pub base_params: SystemParams,
    pub methods: MethodSelection,
    /// Protocol Monte Carlo trials per row.
    pub trials: u64,
    /// Inner draws per decoding set for the semi-analytic multi-relay intercept.
    pub inner_trials: u64,
    pub seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            schemes: Scheme::ALL.to_vec(),
            gamma_db_grid: default_gamma_grid(),
            base_params: SystemParams::reference(),
            methods: MethodSelection::Analytic,
            trials: DEFAULT_TRIALS,
            inner_trials: DEFAULT_INNER_TRIALS,
            seed: 1,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(SrtError::Domain("no schemes requested".into()));
        }
        if self.gamma_db_grid.is_empty() {
            return Err(SrtError::Domain("gamma grid is empty".into()));
        }
        if self.gamma_db_grid.iter().any(|g| !g.is_finite()) {
            return Err(SrtError::Domain("gamma grid has non-finite values".into()));
        }
        if self.gamma_db_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SrtError::Domain("gamma grid must be strictly ascending".into()));
        }
        if self.methods.includes_monte_carlo() && self.trials == 0 {
            return Err(SrtError::Domain("Monte Carlo needs at least one trial".into()));
        }
        Ok(())
    }
}

/// One output row: a scheme evaluated at one SNR by one method.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub n_relays: usize,
    pub gamma_db: f64,
    pub rate: f64,
    /// Method that produced the row (or was requested, if it failed).
    pub method: Method,
    /// Trials behind a sampled row; `None` for closed forms.
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub outcome: std::result::Result<SrtPoint, SrtError>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.outcome.is_ok()
    }
}

fn evaluate_row(scheme: Scheme, params: &SystemParams, gamma_db: f64, method: Method, spec: &SweepSpec) -> SweepRow {
    let mut row = SweepRow {
        scheme,
        n_relays: params.n_relays(),
        gamma_db,
        rate: params.rate(),
        method,
        trials: None,
        seed: None,
        outcome: Err(SrtError::Domain("not evaluated".into())),
    };
    let params = match params.with_gamma(db_to_linear(gamma_db)) {
        Ok(p) => p,
        Err(e) => {
            row.outcome = Err(e);
            return row;
        }
    };
    match method {
        Method::MonteCarlo => {
            row.trials = Some(spec.trials);
            row.seed = Some(spec.seed);
            row.outcome = montecarlo::estimate(scheme, &params, spec.trials, spec.seed).map(|(op, ip)| SrtPoint {
                scheme,
                method,
                op: op.p_hat,
                ip: ip.p_hat,
                op_stderr: Some(op.stderr),
                ip_stderr: Some(ip.stderr),
            });
        }
        _ => {
            // One stream per relay count, shared across the grid, so the
            // sampled inner term moves smoothly with gamma.
            let mut rng = substream(spec.seed, stream_domain::SEMI_ANALYTIC, params.n_relays() as u64);
            row.outcome = analytic::evaluate(scheme, &params, spec.inner_trials, &mut rng);
            if let Ok(point) = &row.outcome {
                row.method = point.method;
                if point.method == Method::SemiAnalytic {
                    row.trials = Some(spec.inner_trials);
                    row.seed = Some(spec.seed);
                }
            }
        }
    }
    row
}

fn run_jobs(jobs: Vec<(Scheme, SystemParams, f64, Method)>, spec: &SweepSpec) -> Vec<SweepRow> {
    jobs.into_par_iter()
        .map(|(scheme, params, g, method)| evaluate_row(scheme, &params, g, method, spec))
        .collect()
}

/// Every requested scheme at every grid point by every requested method.
///
/// Rows are ordered by scheme, then gamma, then method. A row whose
/// evaluation fails is kept with its error.
pub fn run_snr_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for &scheme in &spec.schemes {
        for &g in &spec.gamma_db_grid {
            for &method in spec.methods.methods() {
                jobs.push((scheme, spec.base_params.clone(), g, method));
            }
        }
    }
    Ok(run_jobs(jobs, spec))
}

/// Trade-off loci for each relay count in `n_values`.
///
/// The direct locus does not depend on the relay count and is emitted once,
/// first, with `n_relays = 0`. Relay-scheme rows follow, ordered by relay
/// count, scheme, gamma and method.
pub fn run_srt_curve(spec: &SweepSpec, n_values: &[usize]) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    if n_values.is_empty() {
        return Err(SrtError::Domain("no relay counts requested".into()));
    }
    for &n in n_values {
        if n == 0 {
            return Err(SrtError::Domain("relay counts must be at least 1".into()));
        }
        check_enumeration_cap(n, SUBSET_ENUMERATION_CAP)?;
    }
    let mut jobs = Vec::new();
    let mut push_scheme = |scheme: Scheme, params: &SystemParams| {
        for &g in &spec.gamma_db_grid {
            for &method in spec.methods.methods() {
                jobs.push((scheme, params.clone(), g, method));
            }
        }
    };
    if spec.schemes.contains(&Scheme::Direct) {
        push_scheme(Scheme::Direct, &spec.base_params.with_relay_count(0)?);
    }
    for &n in n_values {
        let params = spec.base_params.with_relay_count(n)?;
        for &scheme in spec.schemes.iter().filter(|s| s.uses_relays()) {
            push_scheme(scheme, &params);
        }
    }
    Ok(run_jobs(jobs, spec))
}

/// A scheme's (outage, intercept) locus as gamma varies, sorted by outage.
#[derive(Clone, Debug, PartialEq)]
pub struct SrtLocus {
    pub scheme: Scheme,
    pub n_relays: usize,
    /// `(op, ip)` pairs, ascending in `op`, both strictly positive.
    pub points: Vec<(f64, f64)>,
}

impl SrtLocus {
    /// Collects successful rows of one scheme and relay count. `sampled`
    /// selects Monte Carlo rows instead of closed-form / semi-analytic ones.
    /// Points with a zero probability are dropped (no place on log axes).
    pub fn from_rows(rows: &[SweepRow], scheme: Scheme, n_relays: usize, sampled: bool) -> Self {
        let mut points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.scheme == scheme && r.n_relays == n_relays && (r.method == Method::MonteCarlo) == sampled)
            .filter_map(|r| r.outcome.as_ref().ok())
            .filter(|p| p.op > 0.0 && p.ip > 0.0)
            .map(|p| (p.op, p.ip))
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            scheme,
            n_relays,
            points,
        }
    }

    pub fn op_range(&self) -> Option<(f64, f64)> {
        Some((self.points.first()?.0, self.points.last()?.0))
    }

    /// Intercept probability at outage `op`, interpolating `ln ip` linearly in
    /// `ln op`. `None` outside the locus.
    pub fn ip_at_op(&self, op: f64) -> Option<f64> {
        let (lo, hi) = self.op_range()?;
        if !(op >= lo && op <= hi) {
            return None;
        }
        let k = self.points.partition_point(|p| p.0 < op);
        if self.points[k].0 == op {
            return Some(self.points[k].1);
        }
        let (x0, y0) = self.points[k - 1];
        let (x1, y1) = self.points[k];
        let t = (op.ln() - x0.ln()) / (x1.ln() - x0.ln());
        Some((y0.ln() + t * (y1.ln() - y0.ln())).exp())
    }
}

/// A matched-outage point where `lower` has a larger intercept probability
/// than `upper`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominanceViolation {
    pub op: f64,
    pub lower_ip: f64,
    pub upper_ip: f64,
}

/// Checks `lower` has intercept probability no larger than `upper` at every
/// grid outage of either locus that lies strictly inside the other's range.
pub fn dominance_violations(lower: &SrtLocus, upper: &SrtLocus) -> Vec<DominanceViolation> {
    let (Some((llo, lhi)), Some((ulo, uhi))) = (lower.op_range(), upper.op_range()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for &(op, ip) in &lower.points {
        if op > ulo && op < uhi {
            let other = upper.ip_at_op(op).expect("inside range");
            if ip > other {
                out.push(DominanceViolation {
                    op,
                    lower_ip: ip,
                    upper_ip: other,
                });
            }
        }
    }
    for &(op, ip) in &upper.points {
        if op > llo && op < lhi {
            let other = lower.ip_at_op(op).expect("inside range");
            if other > ip {
                out.push(DominanceViolation {
                    op,
                    lower_ip: other,
                    upper_ip: ip,
                });
            }
        }
    }
    out
}

/// Number of grid points where the two loci can be compared.
pub fn comparable_points(a: &SrtLocus, b: &SrtLocus) -> usize {
    let (Some((alo, ahi)), Some((blo, bhi))) = (a.op_range(), b.op_range()) else {
        return 0;
    };
    a.points.iter().filter(|p| p.0 > blo && p.0 < bhi).count()
        + b.points.iter().filter(|p| p.0 > alo && p.0 < ahi).count()
}
