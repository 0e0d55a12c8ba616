//! Test-only oracles. Nothing here calls `FieldChannel::apply` or the
//! closed-form posterior; routes are rebuilt from the joint atom-field state.
#![allow(dead_code)]

use nalgebra::DMatrix;
use photodetect_core::detector::ChamberProcess;
use photodetect_core::linalg::{kron, partial_trace_atom};
use photodetect_core::{
    Complex64, DensityOperator, DetectorParams, FlipFractions, JcParams, Operator, Outcome,
};
use rand::Rng;

pub const FIELD_DIMS: [usize; 4] = [2, 3, 4, 8];

/// Uniformly random valid detector parameters.
pub fn random_params(rng: &mut impl Rng) -> DetectorParams {
    let eps_g: f64 = rng.random();
    let eps_e: f64 = rng.random();
    let p1g = rng.random::<f64>() * eps_g;
    let p1e = rng.random::<f64>() * eps_e;
    let mut flips = FlipFractions::default();
    for row in flips.0.iter_mut() {
        for f in row.iter_mut() {
            *f = rng.random();
        }
    }
    DetectorParams::new(eps_g, eps_e, p1g, p1e, &flips).expect("sampled inside the constraint set")
}

/// Same marginals as `base`, different stay/flip split.
pub fn with_flips(base: &DetectorParams, flips: &FlipFractions) -> DetectorParams {
    use photodetect_core::AtomLevel::{Excited, Ground};
    let p1g = base.marginal(Outcome::GroundClick, Ground);
    let p1e = base.marginal(Outcome::GroundClick, Excited);
    DetectorParams::new(base.eps_g(), base.eps_e(), p1g, p1e, flips).unwrap()
}

/// Selected subensemble state via the joint state: apply every chamber
/// transformer (x) identity to `U(|g><g| (x) rho)U^dagger`, then trace out
/// the atom.
pub fn joint_route(
    params: &DetectorParams,
    jc: &JcParams,
    xi: Outcome,
    rho: &DensityOperator,
) -> Operator {
    let n = jc.field_dim();
    let joint = jc.joint_state_after_interaction(rho).unwrap();
    let id = Operator::identity(n).unwrap();
    let mut selected = Operator::zeros(2 * n).unwrap();
    for m in params.transformers(xi) {
        let lifted = kron(&m, &id);
        selected = &selected + &lifted.sandwich(&joint);
    }
    partial_trace_atom(&selected, n).unwrap()
}

/// Field Kraus operators before collapsing the sum over the exit level:
/// `K = sum_eta <eta| (M (x) I) U |g>`, entrywise.
pub fn uncollapsed_kraus(params: &DetectorParams, jc: &JcParams, xi: Outcome) -> Vec<Operator> {
    let n = jc.field_dim();
    let blocks = [jc.u_gg(), jc.u_eg()];
    params
        .transformers(xi)
        .iter()
        .map(|m| {
            Operator::from_fn(n, |r, c| {
                let mut acc = Complex64::new(0.0, 0.0);
                for eta in 0..2 {
                    for mu in 0..2 {
                        acc += m[(eta, mu)] * blocks[mu][(r, c)];
                    }
                }
                acc
            })
            .unwrap()
        })
        .collect()
}

pub fn kraus_route(kraus: &[Operator], rho: &DensityOperator) -> Operator {
    let n = rho.dim();
    kraus.iter().fold(Operator::zeros(n).unwrap(), |acc, k| {
        &acc + &k.sandwich(rho.as_operator())
    })
}

/// Smallest eigenvalue of the Hermitian part, by a dense eigen-solve.
pub fn min_eigenvalue(op: &Operator) -> f64 {
    let n = op.dim();
    let m = DMatrix::from_fn(n, n, |r, c| (op[(r, c)] + op[(c, r)].conj()) * 0.5);
    m.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn process_table(params: &DetectorParams) -> Vec<f64> {
    Outcome::ALL
        .iter()
        .flat_map(|&xi| ChamberProcess::ALL.map(|p| params.process_probability(xi, p)))
        .collect()
}
