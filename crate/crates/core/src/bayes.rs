//! Bayesian inference over the initial field state
//! `|psi(theta)> = cos(theta/2)|0> + sin(theta/2)|1>`, `theta in [0, pi]`.
//!
//! Densities live on a composite midpoint grid: cell `k` covers
//! `[k h, (k+1) h]` with `h = pi / n` and is represented by its midpoint.
//! The likelihood of outcome `xi` is evaluated through the field channel,
//! and [`analytic_posterior`] gives the closed-form density for a uniform
//! prior as an independent reference.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_PI, PI};

use num_complex::Complex64;

use crate::channel::{FieldChannel, IMPOSSIBLE_PROBABILITY};
use crate::detector::{DetectorParams, Outcome};
use crate::error::{Error, Result};
use crate::linalg::{AtomLevel, DensityOperator};

/// One grid point per degree.
pub const DEFAULT_GRID_POINTS: usize = 181;

/// Normalization tolerance of a hypothesis grid.
pub const GRID_NORM_TOL: f64 = 1e-10;

/// Probability density over `theta` sampled at cell midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisGrid {
    thetas: Vec<f64>,
    density: Vec<f64>,
    cell_width: f64,
}

fn midpoints(n_points: usize) -> Vec<f64> {
    let h = PI / n_points as f64;
    (0..n_points).map(|k| (k as f64 + 0.5) * h).collect()
}

impl HypothesisGrid {
    /// The uniform prior `1 / pi`.
    pub fn uniform(n_points: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidGrid("n_points must be positive"));
        }
        Ok(Self {
            thetas: midpoints(n_points),
            density: alloc::vec![FRAC_1_PI; n_points],
            cell_width: PI / n_points as f64,
        })
    }

    /// Wraps already-normalized density values.
    pub fn from_density(density: Vec<f64>) -> Result<Self> {
        let n = density.len();
        if n == 0 {
            return Err(Error::InvalidGrid("n_points must be positive"));
        }
        if density.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(Error::InvalidGrid(
                "density values must be finite and non-negative",
            ));
        }
        let grid = Self {
            thetas: midpoints(n),
            density,
            cell_width: PI / n as f64,
        };
        if (grid.normalization() - 1.0).abs() > GRID_NORM_TOL {
            return Err(Error::InvalidGrid("density does not integrate to one"));
        }
        Ok(grid)
    }

    /// Normalizes non-negative weights at the midpoints into a density.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidGrid("n_points must be positive"));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidGrid(
                "weights must be finite and non-negative",
            ));
        }
        let h = PI / n as f64;
        let z: f64 = weights.iter().sum::<f64>() * h;
        if !(z > 0.0) {
            return Err(Error::InvalidGrid("weights vanish everywhere"));
        }
        Ok(Self {
            thetas: midpoints(n),
            density: weights.into_iter().map(|w| w / z).collect(),
            cell_width: h,
        })
    }

    pub fn n_points(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn cell_width(&self) -> f64 {
        self.cell_width
    }

    /// `sum_k density[k] * cell_width`.
    pub fn normalization(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.cell_width
    }

    /// Index of the cell containing `theta`; `pi` belongs to the last cell.
    pub fn cell_of(&self, theta: f64) -> Result<usize> {
        check_theta(theta)?;
        let k = libm::floor(theta / self.cell_width) as usize;
        Ok(k.min(self.n_points() - 1))
    }

    /// Piecewise-constant density value at an arbitrary `theta`.
    pub fn density_at(&self, theta: f64) -> Result<f64> {
        Ok(self.density[self.cell_of(theta)?])
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    Ok(())
}

/// `|psi(theta)><psi(theta)|` embedded in `field_dim` Fock states.
pub fn pure_state(theta: f64, field_dim: usize) -> Result<DensityOperator> {
    check_theta(theta)?;
    if field_dim < 2 {
        return Err(Error::InvalidDimension {
            dim: field_dim,
            min: 2,
        });
    }
    let mut amplitudes = alloc::vec![Complex64::new(0.0, 0.0); field_dim];
    amplitudes[0] = Complex64::new(libm::cos(theta / 2.0), 0.0);
    amplitudes[1] = Complex64::new(libm::sin(theta / 2.0), 0.0);
    DensityOperator::pure(&amplitudes)
}

/// `P(xi | theta)` through the field channel.
pub fn likelihood(theta: f64, xi: Outcome, channel: &FieldChannel) -> Result<f64> {
    channel.outcome_probability(xi, &pure_state(theta, channel.field_dim())?)
}

fn likelihoods(grid: &HypothesisGrid, xi: Outcome, channel: &FieldChannel) -> Result<Vec<f64>> {
    grid.thetas
        .iter()
        .map(|&t| likelihood(t, xi, channel))
        .collect()
}

/// Bayes' rule on the grid; `likelihoods[k]` belongs to `grid.thetas()[k]`.
fn reweight(grid: &HypothesisGrid, likelihoods: &[f64], xi: Outcome) -> Result<HypothesisGrid> {
    let weights: Vec<f64> = likelihoods
        .iter()
        .zip(&grid.density)
        .map(|(l, d)| l * d)
        .collect();
    let evidence = weights.iter().sum::<f64>() * grid.cell_width;
    if !(evidence >= IMPOSSIBLE_PROBABILITY) {
        return Err(Error::ImpossibleOutcome {
            outcome: xi,
            probability: evidence.max(0.0),
        });
    }
    Ok(HypothesisGrid {
        thetas: grid.thetas.clone(),
        density: weights.into_iter().map(|w| w / evidence).collect(),
        cell_width: grid.cell_width,
    })
}

/// Posterior density after observing `xi` once.
pub fn posterior_update(
    grid: &HypothesisGrid,
    xi: Outcome,
    channel: &FieldChannel,
) -> Result<HypothesisGrid> {
    reweight(grid, &likelihoods(grid, xi, channel)?, xi)
}

/// Posterior density at an arbitrary `theta`, with the prior read as
/// piecewise constant over grid cells and the evidence taken from the grid.
pub fn posterior_density_at(
    prior: &HypothesisGrid,
    xi: Outcome,
    channel: &FieldChannel,
    theta: f64,
) -> Result<f64> {
    let ls = likelihoods(prior, xi, channel)?;
    let evidence = ls
        .iter()
        .zip(&prior.density)
        .map(|(l, d)| l * d)
        .sum::<f64>()
        * prior.cell_width;
    if !(evidence >= IMPOSSIBLE_PROBABILITY) {
        return Err(Error::ImpossibleOutcome {
            outcome: xi,
            probability: evidence.max(0.0),
        });
    }
    Ok(likelihood(theta, xi, channel)? * prior.density_at(theta)? / evidence)
}

/// Closed-form posterior for a uniform prior on `[0, pi]`:
///
/// ```text
/// P(theta|xi) = (1/pi) [1 + (p_g - p_e) s cos(theta) / (2 p_g + (p_e - p_g) s)],  s = sin^2(omega_tau)
/// ```
///
/// with `p_g = P(xi|g)`, `p_e = P(xi|e)`.
pub fn analytic_posterior(theta: f64, p_xig: f64, p_xie: f64, omega_tau: f64) -> Result<f64> {
    check_theta(theta)?;
    let s = libm::sin(omega_tau);
    let s2 = s * s;
    let denominator = 2.0 * p_xig + (p_xie - p_xig) * s2;
    if !(denominator >= IMPOSSIBLE_PROBABILITY) {
        return Err(Error::DegenerateDetector(denominator));
    }
    Ok(FRAC_1_PI * (1.0 + (p_xig - p_xie) * s2 * libm::cos(theta) / denominator))
}

/// [`analytic_posterior`] with the marginals of outcome `xi` read from `params`.
pub fn analytic_posterior_for(
    theta: f64,
    xi: Outcome,
    params: &DetectorParams,
    omega_tau: f64,
) -> Result<f64> {
    analytic_posterior(
        theta,
        params.marginal(xi, AtomLevel::Ground),
        params.marginal(xi, AtomLevel::Excited),
        omega_tau,
    )
}

/// The closed-form posterior sampled at the midpoints of an `n_points` grid
/// and renormalized with the grid's own quadrature.
pub fn analytic_posterior_grid(
    n_points: usize,
    p_xig: f64,
    p_xie: f64,
    omega_tau: f64,
) -> Result<HypothesisGrid> {
    if n_points == 0 {
        return Err(Error::InvalidGrid("n_points must be positive"));
    }
    let weights = midpoints(n_points)
        .into_iter()
        .map(|t| analytic_posterior(t, p_xig, p_xie, omega_tau))
        .collect::<Result<Vec<_>>>()?;
    HypothesisGrid::from_weights(weights)
}

/// Folds Bayes updates over repeated probing of the same field.
///
/// Each hypothesis carries its own conditional field state: the round-`k`
/// likelihood is evaluated on the state of hypothesis `theta` conditioned on
/// the earlier outcomes, not on `|psi(theta)>` again.
pub fn sequential_update(
    grid: &HypothesisGrid,
    outcomes: &[Outcome],
    channel: &FieldChannel,
) -> Result<HypothesisGrid> {
    if outcomes.is_empty() {
        return Err(Error::Empty("outcomes"));
    }
    let mut states = grid
        .thetas
        .iter()
        .map(|&t| pure_state(t, channel.field_dim()).map(Some))
        .collect::<Result<Vec<_>>>()?;
    let mut current = grid.clone();
    for &xi in outcomes {
        let mut ls = Vec::with_capacity(states.len());
        for slot in states.iter_mut() {
            let Some(state) = slot.as_ref() else {
                ls.push(0.0);
                continue;
            };
            match channel.conditional_state(xi, state) {
                Ok((next, p)) => {
                    ls.push(p);
                    *slot = Some(next);
                }
                Err(Error::ImpossibleOutcome { .. }) => {
                    // this hypothesis is ruled out for good
                    ls.push(0.0);
                    *slot = None;
                }
                Err(e) => return Err(e),
            }
        }
        current = reweight(&current, &ls, xi)?;
    }
    Ok(current)
}
