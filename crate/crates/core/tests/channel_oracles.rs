mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use photodetect_core::linalg::random_density;
use photodetect_core::{
    DetectorParams, FieldChannel, FlipFractions, JcParams, Outcome, TrajectorySampler,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn kraus_route_equals_joint_state_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let params = common::random_params(&mut rng);
        let dim = common::FIELD_DIMS[rng.random_range(0..4)];
        let jc = JcParams::new(rng.random::<f64>() * PI, dim).unwrap();
        let rho = random_density(dim, rng.random()).unwrap();
        let ch = FieldChannel::new(params, jc);
        for xi in Outcome::ALL {
            let direct = ch.apply(xi, &rho).unwrap();
            let joint = common::joint_route(&params, &jc, xi, &rho);
            assert!(direct.max_abs_diff(&joint) <= 1e-12);
            let uncollapsed =
                common::kraus_route(&common::uncollapsed_kraus(&params, &jc, xi), &rho);
            assert!(direct.max_abs_diff(&uncollapsed) <= 1e-12);
        }
    }
}

#[test]
fn collapsed_kraus_equal_uncollapsed_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let params = common::random_params(&mut rng);
        let jc = JcParams::new(rng.random::<f64>() * PI, 4).unwrap();
        let ch = FieldChannel::new(params, jc);
        for xi in Outcome::ALL {
            for (a, b) in ch
                .kraus_ops(xi)
                .iter()
                .zip(common::uncollapsed_kraus(&params, &jc, xi))
            {
                assert!(a.max_abs_diff(&b) <= 1e-15);
            }
        }
    }
}

#[test]
fn subensemble_states_ignore_flip_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let base = common::random_params(&mut rng);
        let jc = JcParams::new(rng.random::<f64>() * PI, 3).unwrap();
        let rho = random_density(3, rng.random()).unwrap();
        let reference =
            FieldChannel::new(common::with_flips(&base, &FlipFractions::uniform(0.0)), jc);
        for f in [0.3, 1.0] {
            let ch = FieldChannel::new(common::with_flips(&base, &FlipFractions::uniform(f)), jc);
            for xi in Outcome::ALL {
                let a = reference.apply(xi, &rho).unwrap();
                let b = ch.apply(xi, &rho).unwrap();
                assert!(a.max_abs_diff(&b) <= 1e-12);
            }
        }
    }
}

#[test]
fn single_round_frequencies_match_probabilities() {
    let d = DetectorParams::new(0.9, 0.8, 0.85, 0.1, &FlipFractions::uniform(0.2)).unwrap();
    let ch = FieldChannel::new(d, JcParams::new(FRAC_PI_2, 2).unwrap());
    let rho = photodetect_core::bayes::pure_state(2.0, 2).unwrap();
    let probs = ch.outcome_probabilities(&rho).unwrap();
    let n = 100_000;
    let mut counts = [0usize; 3];
    let mut sampler = TrajectorySampler::new(31);
    for _ in 0..n {
        let step = &sampler.run(&ch, &rho, 1).unwrap()[0];
        counts[step.outcome.index()] += 1;
    }
    for xi in 0..3 {
        let p = probs[xi];
        let freq = counts[xi] as f64 / n as f64;
        assert!(
            (freq - p).abs() <= 3.0 * (p * (1.0 - p) / n as f64).sqrt(),
            "xi={xi} freq={freq} p={p}"
        );
    }
}
