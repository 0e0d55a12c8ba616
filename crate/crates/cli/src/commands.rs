use photodetect_core::bayes::{
    analytic_posterior_grid, posterior_density_at, posterior_update, pure_state, HypothesisGrid,
};
use photodetect_core::linalg::random_density;
use photodetect_core::{
    AtomLevel, DetectorParams, FieldChannel, JcParams, Operator, Outcome, TrajectorySampler,
};

use crate::config::RunConfig;
use crate::output::{Cell, Table};

/// Tolerance of every numerical check reported by `validate`.
pub const CHECK_TOL: f64 = 1e-12;

pub struct ValidationReport {
    pub table: Table,
    pub all_passed: bool,
}

struct Checks {
    table: Table,
    all_passed: bool,
}

impl Checks {
    fn new() -> Self {
        Self {
            table: Table::new(&["check", "passed", "residual", "tolerance"]),
            all_passed: true,
        }
    }

    fn record(&mut self, name: &str, residual: f64, tolerance: f64) -> bool {
        let passed = residual <= tolerance;
        self.all_passed &= passed;
        self.table.push(vec![
            name.into(),
            passed.into(),
            residual.into(),
            tolerance.into(),
        ]);
        passed
    }
}

/// Distance of `x` outside `[lo, hi]`; infinite for NaN.
fn outside(x: f64, lo: f64, hi: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        (lo - x).max(x - hi).max(0.0)
    }
}

fn sum_ops(dim: usize, ops: impl IntoIterator<Item = Operator>) -> Operator {
    ops.into_iter()
        .fold(Operator::zeros(dim).expect("dim is positive"), |acc, op| {
            &acc + &op
        })
}

/// Checks the raw inputs, then the derived detector table, the atomic POVM,
/// the field channel and the interaction blocks.
pub fn validate(cfg: &RunConfig, seed: u64) -> ValidationReport {
    let mut checks = Checks::new();
    let mut inputs_ok = true;
    inputs_ok &= checks.record("eps_g_in_unit_interval", outside(cfg.eps_g, 0.0, 1.0), 0.0);
    inputs_ok &= checks.record("eps_e_in_unit_interval", outside(cfg.eps_e, 0.0, 1.0), 0.0);
    inputs_ok &= checks.record("p1g_within_eps_g", outside(cfg.p1g, 0.0, cfg.eps_g), 0.0);
    inputs_ok &= checks.record("p1e_within_eps_e", outside(cfg.p1e, 0.0, cfg.eps_e), 0.0);
    let flips = cfg
        .flip_fractions
        .iter()
        .flatten()
        .map(|&f| outside(f, 0.0, 1.0))
        .fold(0.0, f64::max);
    inputs_ok &= checks.record("flip_fractions_in_unit_interval", flips, 0.0);
    let wt = if cfg.omega_tau.is_finite() {
        outside(cfg.omega_tau, 0.0, f64::INFINITY)
    } else {
        f64::INFINITY
    };
    inputs_ok &= checks.record("omega_tau_finite_non_negative", wt, 0.0);
    inputs_ok &= checks.record(
        "field_dim_positive",
        if cfg.field_dim >= 1 { 0.0 } else { 1.0 },
        0.0,
    );
    checks.record(
        "n_points_positive",
        if cfg.n_points >= 1 { 0.0 } else { 1.0 },
        0.0,
    );

    if !inputs_ok {
        return ValidationReport {
            table: checks.table,
            all_passed: false,
        };
    }
    let (Ok(params), Ok(jc)) = (cfg.detector(), cfg.jc()) else {
        unreachable!("inputs were range-checked above")
    };
    derived_checks(&mut checks, &params, &jc, seed);
    ValidationReport {
        table: checks.table,
        all_passed: checks.all_passed,
    }
}

fn derived_checks(checks: &mut Checks, params: &DetectorParams, jc: &JcParams, seed: u64) {
    let r = params.constraint_residuals();
    checks.record("click_efficiency", r.click_efficiency, CHECK_TOL);
    checks.record("no_click_probability", r.no_click, CHECK_TOL);
    checks.record("stay_flip_split", r.process_split, CHECK_TOL);
    checks.record(
        "process_probabilities_non_negative",
        r.negativity,
        CHECK_TOL,
    );

    let id2 = Operator::identity(2).expect("atom dimension");
    let povm_sum = sum_ops(2, Outcome::ALL.map(|xi| params.povm(xi)));
    checks.record(
        "atom_povm_completeness",
        povm_sum.max_abs_diff(&id2),
        CHECK_TOL,
    );

    let kraus_gap = Outcome::ALL
        .iter()
        .map(|&xi| {
            let mm = sum_ops(2, params.transformers(xi).iter().map(|m| &m.adjoint() * m));
            mm.max_abs_diff(&params.povm(xi))
        })
        .fold(0.0, f64::max);
    checks.record("atom_transformers_match_povm", kraus_gap, CHECK_TOL);

    let n = jc.field_dim();
    let idn = Operator::identity(n).expect("field_dim validated");
    let (g, e) = (jc.u_gg(), jc.u_eg());
    let iso = &(&g.adjoint() * &g) + &(&e.adjoint() * &e);
    checks.record("interaction_isometry", iso.max_abs_diff(&idn), CHECK_TOL);

    let ch = FieldChannel::new(*params, *jc);
    checks.record(
        "field_channel_completeness",
        ch.completeness_sum().max_abs_diff(&idn),
        CHECK_TOL,
    );

    let rho_a = random_density(2, seed).expect("atom dimension");
    let duality = Outcome::ALL
        .iter()
        .map(|&xi| {
            let tr = params
                .apply_lambda(xi, &rho_a)
                .expect("2x2 state")
                .trace()
                .re;
            (tr - params.outcome_probability(xi, &rho_a).expect("2x2 state")).abs()
        })
        .fold(0.0, f64::max);
    checks.record("atom_selection_duality", duality, CHECK_TOL);

    let rho_f = random_density(n, seed).expect("field_dim validated");
    let total: f64 = ch
        .outcome_probabilities(&rho_f)
        .expect("dimensions match")
        .iter()
        .sum();
    checks.record("field_probabilities_sum", (total - 1.0).abs(), CHECK_TOL);
}

/// Numeric grid posterior next to the renormalized closed form, uniform prior.
pub fn posterior(cfg: &RunConfig, xi: Outcome) -> photodetect_core::Result<Table> {
    let ch = cfg.channel()?;
    let prior = HypothesisGrid::uniform(cfg.n_points)?;
    let numeric = posterior_update(&prior, xi, &ch)?;
    let analytic = analytic_posterior_grid(
        cfg.n_points,
        ch.params().marginal(xi, AtomLevel::Ground),
        ch.params().marginal(xi, AtomLevel::Excited),
        cfg.omega_tau,
    )?;
    let mut table = Table::new(&["theta", "numeric", "analytic", "abs_diff"]);
    for ((&theta, &n), &a) in prior
        .thetas()
        .iter()
        .zip(numeric.density())
        .zip(analytic.density())
    {
        table.push(vec![theta.into(), n.into(), a.into(), (n - a).abs().into()]);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    /// `start, start + step, ...` up to and including `stop`.
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let SweepRange { start, stop, step } = *self;
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err("sweep bounds and step must be finite".into());
        }
        if step == 0.0 || (stop - start) * step < 0.0 {
            return Err(format!("step {step} does not lead from {start} to {stop}"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| start + i as f64 * step).collect())
    }
}

/// Parameters for swept `eps_g`: `p1g` keeps its share of `eps_g` from the
/// base config (zero when the base `eps_g` is zero).
pub fn swept_detector(cfg: &RunConfig, eps_g: f64) -> photodetect_core::Result<DetectorParams> {
    let share = if cfg.eps_g > 0.0 {
        cfg.p1g / cfg.eps_g
    } else {
        0.0
    };
    DetectorParams::new(eps_g, cfg.eps_e, eps_g * share, cfg.p1e, &cfg.flips())
}

/// Posterior density at `theta` after outcome `xi` as a function of `eps_g`.
pub fn sweep_eps(
    cfg: &RunConfig,
    range: SweepRange,
    theta: f64,
    xi: Outcome,
) -> Result<Table, SweepError> {
    let values = range.values().map_err(SweepError::Range)?;
    let jc = cfg.jc().map_err(SweepError::Config)?;
    let prior = HypothesisGrid::uniform(cfg.n_points).map_err(SweepError::Config)?;
    // theta is checked once up front so a bad value is a usage error, not N row errors
    prior.cell_of(theta).map_err(SweepError::Config)?;
    let mut table = Table::new(&["eps_g", "density_at_theta", "error"]);
    for eps_g in values {
        let density = swept_detector(cfg, eps_g).and_then(|params| {
            posterior_density_at(&prior, xi, &FieldChannel::new(params, jc), theta)
        });
        match density {
            Ok(d) => table.push(vec![eps_g.into(), d.into(), "".into()]),
            Err(e) => table.push(vec![eps_g.into(), f64::NAN.into(), e.to_string().into()]),
        }
    }
    Ok(table)
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid sweep range: {0}")]
    Range(String),
    #[error(transparent)]
    Config(photodetect_core::Error),
}

/// Repeated probing of `|psi(theta)>` with fresh ground-state atoms.
pub fn simulate(
    cfg: &RunConfig,
    rounds: usize,
    theta: f64,
    seed: u64,
) -> photodetect_core::Result<Table> {
    let ch = cfg.channel()?;
    let rho0 = pure_state(theta, cfg.field_dim)?;
    let steps = TrajectorySampler::new(seed).run(&ch, &rho0, rounds)?;
    let mut table = Table::new(&["round", "xi", "p0", "p1", "p2", "trace_check"]);
    for (k, step) in steps.iter().enumerate() {
        let [p0, p1, p2] = step.probabilities;
        let residual = (step.state.as_operator().trace().re - 1.0).abs();
        table.push(vec![
            Cell::Int(k as u64 + 1),
            Cell::Int(step.outcome.index() as u64),
            p0.into(),
            p1.into(),
            p2.into(),
            residual.into(),
        ]);
    }
    Ok(table)
}
