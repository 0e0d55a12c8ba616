//! Field-space measurement channel induced by one atom-pointer passage.
//!
//! Tracing out the atom after the chamber gives, for each outcome `xi`, four
//! field Kraus operators: the entry level of the chamber process selects the
//! unitary block, the exit level is summed out.
//!
//! ```text
//! K[xi, gg] = sqrt(p[xi][gg]) U_gg    K[xi, ge] = sqrt(p[xi][ge]) U_gg
//! K[xi, eg] = sqrt(p[xi][eg]) U_eg    K[xi, ee] = sqrt(p[xi][ee]) U_eg
//! ```
//!
//! Regrouping gives `Xi_xi(rho) = p[xi][g] U_gg rho U_gg^dagger + p[xi][e] U_eg rho U_eg^dagger`,
//! so how a marginal is split between stay and flip processes never shows up
//! in the field state.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detector::{ChamberProcess, DetectorParams, Outcome};
use crate::error::{Error, Result};
use crate::jaynes_cummings::JcParams;
use crate::linalg::{DensityOperator, Operator};

/// Outcomes less likely than this are treated as impossible when conditioning.
pub const IMPOSSIBLE_PROBABILITY: f64 = 1e-14;

/// Detector and interaction bundled with their precomputed Kraus operators.
#[derive(Debug, Clone)]
pub struct FieldChannel {
    params: DetectorParams,
    jc: JcParams,
    kraus: [[Operator; 4]; 3],
}

impl FieldChannel {
    pub fn new(params: DetectorParams, jc: JcParams) -> Self {
        let (u_gg, u_eg) = (jc.u_gg(), jc.u_eg());
        let kraus = Outcome::ALL.map(|xi| {
            ChamberProcess::ALL.map(|process| {
                let amp = libm::sqrt(params.process_probability(xi, process));
                let block = match process.entry() {
                    crate::linalg::AtomLevel::Ground => &u_gg,
                    crate::linalg::AtomLevel::Excited => &u_eg,
                };
                block.scale(Complex64::new(amp, 0.0))
            })
        });
        Self { params, jc, kraus }
    }

    pub fn params(&self) -> &DetectorParams {
        &self.params
    }

    pub fn jc(&self) -> &JcParams {
        &self.jc
    }

    pub fn field_dim(&self) -> usize {
        self.jc.field_dim()
    }

    /// Kraus operators of outcome `xi` in [`ChamberProcess::ALL`] order.
    pub fn kraus_ops(&self, xi: Outcome) -> &[Operator; 4] {
        &self.kraus[xi.index()]
    }

    /// `sum_k K^dagger K` over every outcome; the identity for a valid channel.
    pub fn completeness_sum(&self) -> Operator {
        let mut sum = Operator::zeros(self.field_dim()).expect("field_dim is positive");
        for ops in &self.kraus {
            for k in ops {
                sum = &sum + &(&k.adjoint() * k);
            }
        }
        sum
    }

    /// Unnormalized subensemble state `Xi_xi(rho_f)`; its trace is `P(xi)`.
    pub fn apply(&self, xi: Outcome, rho_f: &DensityOperator) -> Result<Operator> {
        let rho = rho_f.as_operator();
        rho.expect_dim(self.field_dim())?;
        let mut out = Operator::zeros(self.field_dim())?;
        for (k, process) in self.kraus_ops(xi).iter().zip(ChamberProcess::ALL) {
            if self.params.process_probability(xi, process) > 0.0 {
                k.add_sandwich_into(rho, &mut out);
            }
        }
        Ok(out)
    }

    pub fn outcome_probability(&self, xi: Outcome, rho_f: &DensityOperator) -> Result<f64> {
        Ok(self.apply(xi, rho_f)?.trace().re.max(0.0))
    }

    pub fn outcome_probabilities(&self, rho_f: &DensityOperator) -> Result<[f64; 3]> {
        Ok(self.subensembles(rho_f)?.map(|s| s.trace().re.max(0.0)))
    }

    /// `Xi_xi(rho_f)` for every outcome, indexed by [`Outcome::index`].
    pub fn subensembles(&self, rho_f: &DensityOperator) -> Result<[Operator; 3]> {
        Ok([
            self.apply(Outcome::NoClick, rho_f)?,
            self.apply(Outcome::GroundClick, rho_f)?,
            self.apply(Outcome::ExcitedClick, rho_f)?,
        ])
    }

    /// Field state given outcome `xi`, with the outcome probability.
    ///
    /// Returns [`Error::ImpossibleOutcome`] when `P(xi)` is below
    /// [`IMPOSSIBLE_PROBABILITY`].
    pub fn conditional_state(
        &self,
        xi: Outcome,
        rho_f: &DensityOperator,
    ) -> Result<(DensityOperator, f64)> {
        normalize_subensemble(xi, self.apply(xi, rho_f)?)
    }

    /// Field state after the atom passage when the outcome is discarded.
    pub fn unconditional_state(&self, rho_f: &DensityOperator) -> Result<DensityOperator> {
        let mut sum = Operator::zeros(self.field_dim())?;
        for xi in Outcome::ALL {
            sum = &sum + &self.apply(xi, rho_f)?;
        }
        DensityOperator::new(sum)
    }
}

fn normalize_subensemble(xi: Outcome, unnormalized: Operator) -> Result<(DensityOperator, f64)> {
    let probability = unnormalized.trace().re;
    if !(probability >= IMPOSSIBLE_PROBABILITY) {
        return Err(Error::ImpossibleOutcome {
            outcome: xi,
            probability: probability.max(0.0),
        });
    }
    let state = DensityOperator::new(unnormalized.scale_real(1.0 / probability))?;
    Ok((state, probability))
}

/// One round of repeated probing.
#[derive(Debug, Clone)]
pub struct TrajectoryStep {
    pub outcome: Outcome,
    /// Outcome probabilities of the state before this round.
    pub probabilities: [f64; 3],
    /// Conditional field state after this round.
    pub state: DensityOperator,
}

/// Draws outcomes with a private seeded generator.
#[derive(Debug, Clone)]
pub struct TrajectorySampler {
    rng: ChaCha8Rng,
}

impl TrajectorySampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Samples an outcome; entries below [`IMPOSSIBLE_PROBABILITY`] are never drawn.
    pub fn draw(&mut self, probabilities: &[f64; 3]) -> Outcome {
        let weights = probabilities.map(|p| if p >= IMPOSSIBLE_PROBABILITY { p } else { 0.0 });
        let total: f64 = weights.iter().sum();
        let u = self.rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last = Outcome::NoClick;
        for xi in Outcome::ALL {
            let w = weights[xi.index()];
            if w == 0.0 {
                continue;
            }
            acc += w;
            last = xi;
            if u < acc {
                return xi;
            }
        }
        last
    }

    /// Probes `rho_f0` with `rounds` fresh ground-state atoms, conditioning on
    /// each sampled outcome.
    pub fn run(
        &mut self,
        channel: &FieldChannel,
        rho_f0: &DensityOperator,
        rounds: usize,
    ) -> Result<Vec<TrajectoryStep>> {
        if rounds == 0 {
            return Err(Error::Empty("rounds"));
        }
        let mut state = rho_f0.clone();
        let mut steps = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let [s0, s1, s2] = channel.subensembles(&state)?;
            let probabilities = [&s0, &s1, &s2].map(|s| s.trace().re.max(0.0));
            let outcome = self.draw(&probabilities);
            let chosen = match outcome {
                Outcome::NoClick => s0,
                Outcome::GroundClick => s1,
                Outcome::ExcitedClick => s2,
            };
            let (next, _) = normalize_subensemble(outcome, chosen)?;
            steps.push(TrajectoryStep {
                outcome,
                probabilities,
                state: next.clone(),
            });
            state = next;
        }
        Ok(steps)
    }
}

pub fn sample_trajectory(
    channel: &FieldChannel,
    rho_f0: &DensityOperator,
    rounds: usize,
    seed: u64,
) -> Result<Vec<TrajectoryStep>> {
    TrajectorySampler::new(seed).run(channel, rho_f0, rounds)
}
