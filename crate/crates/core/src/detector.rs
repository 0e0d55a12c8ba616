//! Imperfect ionization-chamber detector acting on the atom-pointer.
//!
//! The chamber has two state-selective detectors. Outcome `1` is a click of the
//! detector tuned to `|g>`, outcome `2` a click of the one tuned to `|e>`, and
//! outcome `0` means the atom passed unseen. For each outcome `xi` and entry
//! level `mu` the marginal `p[xi][mu] = P(xi | mu)` is split into a part where
//! the atom stays in `mu` and a part where the chamber's internal pulses flip
//! it before the click:
//!
//! ```text
//! p[xi][gg] + p[xi][ge] = p[xi][g]        p[xi][ee] + p[xi][eg] = p[xi][e]
//! p[1][g] + p[2][g] = eps_g                p[1][e] + p[2][e] = eps_e
//! p[0][g] = 1 - eps_g                      p[0][e] = 1 - eps_e
//! ```
//!
//! Amplitudes are taken real and non-negative, `alpha = sqrt(p)`; every
//! observable quantity depends only on `|alpha|^2`.

use core::fmt;

use num_complex::Complex64;

use crate::error::{Constraint, ConstraintViolation, Error, Result};
use crate::linalg::{AtomLevel, DensityOperator, Operator, ATOM_DIM};

/// Tolerance used when checking the detector constraint system.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Detection result `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    /// `xi = 0`: no detector clicked.
    NoClick,
    /// `xi = 1`: the ground-state detector clicked.
    GroundClick,
    /// `xi = 2`: the excited-state detector clicked.
    ExcitedClick,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [
        Outcome::NoClick,
        Outcome::GroundClick,
        Outcome::ExcitedClick,
    ];

    pub fn index(self) -> usize {
        match self {
            Outcome::NoClick => 0,
            Outcome::GroundClick => 1,
            Outcome::ExcitedClick => 2,
        }
    }

    pub fn from_index(xi: u32) -> Result<Self> {
        match xi {
            0 => Ok(Outcome::NoClick),
            1 => Ok(Outcome::GroundClick),
            2 => Ok(Outcome::ExcitedClick),
            other => Err(Error::InvalidOutcome(other)),
        }
    }
}

impl TryFrom<u32> for Outcome {
    type Error = Error;

    fn try_from(xi: u32) -> Result<Self> {
        Self::from_index(xi)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Elementary chamber process: entry level followed by the level at the click.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChamberProcess {
    /// Enters in `|g>` and stays there.
    StayGround,
    /// Enters in `|g>` and is pumped to `|e>`.
    GroundToExcited,
    /// Enters in `|e>` and is pumped to `|g>`.
    ExcitedToGround,
    /// Enters in `|e>` and stays there.
    StayExcited,
}

impl ChamberProcess {
    /// Kraus ordering used throughout: `gg, ge, eg, ee`.
    pub const ALL: [ChamberProcess; 4] = [
        ChamberProcess::StayGround,
        ChamberProcess::GroundToExcited,
        ChamberProcess::ExcitedToGround,
        ChamberProcess::StayExcited,
    ];

    pub fn index(self) -> usize {
        match self {
            ChamberProcess::StayGround => 0,
            ChamberProcess::GroundToExcited => 1,
            ChamberProcess::ExcitedToGround => 2,
            ChamberProcess::StayExcited => 3,
        }
    }

    pub fn entry(self) -> AtomLevel {
        match self {
            ChamberProcess::StayGround | ChamberProcess::GroundToExcited => AtomLevel::Ground,
            ChamberProcess::ExcitedToGround | ChamberProcess::StayExcited => AtomLevel::Excited,
        }
    }

    pub fn exit(self) -> AtomLevel {
        match self {
            ChamberProcess::StayGround | ChamberProcess::ExcitedToGround => AtomLevel::Ground,
            ChamberProcess::GroundToExcited | ChamberProcess::StayExcited => AtomLevel::Excited,
        }
    }

    fn is_flip(self) -> bool {
        self.entry() != self.exit()
    }
}

/// Fraction of each marginal `p[xi][mu]` carried by the flip process,
/// indexed `[xi][mu]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FlipFractions(pub [[f64; 2]; 3]);

impl FlipFractions {
    pub fn uniform(f: f64) -> Self {
        Self([[f; 2]; 3])
    }

    pub fn get(&self, xi: Outcome, level: AtomLevel) -> f64 {
        self.0[xi.index()][level.index()]
    }
}

/// Residuals of the detector constraint system; all should be below
/// [`CONSTRAINT_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintResiduals {
    /// Stay plus flip probability against the marginal, worst over `xi, mu`.
    pub process_split: f64,
    /// `|p_1g + p_2g - eps_g|` and `|p_1e + p_2e - eps_e|`, worst of the two.
    pub click_efficiency: f64,
    /// `|p_0g - (1 - eps_g)|` and `|p_0e - (1 - eps_e)|`, worst of the two.
    pub no_click: f64,
    /// `|sum_xi p[xi][mu] - 1|`, worst over `mu`.
    pub completeness: f64,
    /// Most negative probability in the table (zero when none are).
    pub negativity: f64,
}

impl ConstraintResiduals {
    pub fn max(&self) -> f64 {
        [
            self.process_split,
            self.click_efficiency,
            self.no_click,
            self.completeness,
            self.negativity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Validated detector imperfection table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    eps_g: f64,
    eps_e: f64,
    /// `p[xi][mu]`
    marginals: [[f64; 2]; 3],
    /// `p[xi][process]` in [`ChamberProcess::ALL`] order.
    processes: [[f64; 4]; 3],
}

fn in_unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

fn violation(constraint: Constraint, value: f64) -> Error {
    Error::Constraint(ConstraintViolation { constraint, value })
}

impl DetectorParams {
    /// Builds the table from efficiencies, the ground-detector click
    /// probabilities `p1g = P(1|g)`, `p1e = P(1|e)`, and flip fractions.
    pub fn new(eps_g: f64, eps_e: f64, p1g: f64, p1e: f64, flips: &FlipFractions) -> Result<Self> {
        if !in_unit(eps_g) {
            return Err(violation(Constraint::GroundEfficiency, eps_g));
        }
        if !in_unit(eps_e) {
            return Err(violation(Constraint::ExcitedEfficiency, eps_e));
        }
        if !(p1g >= 0.0 && p1g <= eps_g) {
            return Err(violation(Constraint::GroundClickSplit, p1g));
        }
        if !(p1e >= 0.0 && p1e <= eps_e) {
            return Err(violation(Constraint::ExcitedClickSplit, p1e));
        }
        for xi in Outcome::ALL {
            for level in AtomLevel::ALL {
                let f = flips.get(xi, level);
                if !in_unit(f) {
                    return Err(violation(Constraint::FlipFraction(xi, level), f));
                }
            }
        }

        let marginals = [
            [1.0 - eps_g, 1.0 - eps_e],
            [p1g, p1e],
            [eps_g - p1g, eps_e - p1e],
        ];
        let mut processes = [[0.0; 4]; 3];
        for xi in Outcome::ALL {
            for process in ChamberProcess::ALL {
                let entry = process.entry();
                let marginal = marginals[xi.index()][entry.index()];
                let f = flips.get(xi, entry);
                processes[xi.index()][process.index()] = if process.is_flip() {
                    f * marginal
                } else {
                    (1.0 - f) * marginal
                };
            }
        }
        Ok(Self {
            eps_g,
            eps_e,
            marginals,
            processes,
        })
    }

    /// Perfect photon counter: `xi = 1` iff the atom is in `|g>`, `xi = 2` iff in `|e>`.
    pub fn ideal_counter() -> Self {
        Self::new(1.0, 1.0, 1.0, 0.0, &FlipFractions::default()).expect("ideal counter is valid")
    }

    pub fn eps_g(&self) -> f64 {
        self.eps_g
    }

    pub fn eps_e(&self) -> f64 {
        self.eps_e
    }

    /// `P(xi | level)`.
    pub fn marginal(&self, xi: Outcome, level: AtomLevel) -> f64 {
        self.marginals[xi.index()][level.index()]
    }

    /// `|alpha_{xi, process}|^2`.
    pub fn process_probability(&self, xi: Outcome, process: ChamberProcess) -> f64 {
        self.processes[xi.index()][process.index()]
    }

    /// Measures every constraint of the table.
    pub fn constraint_residuals(&self) -> ConstraintResiduals {
        let mut r = ConstraintResiduals {
            process_split: 0.0,
            click_efficiency: 0.0,
            no_click: 0.0,
            completeness: 0.0,
            negativity: 0.0,
        };
        for xi in Outcome::ALL {
            for level in AtomLevel::ALL {
                let split: f64 = ChamberProcess::ALL
                    .iter()
                    .filter(|p| p.entry() == level)
                    .map(|&p| self.process_probability(xi, p))
                    .sum();
                r.process_split = r
                    .process_split
                    .max((split - self.marginal(xi, level)).abs());
            }
            for &p in &self.processes[xi.index()] {
                r.negativity = r.negativity.max(-p);
            }
            for &p in &self.marginals[xi.index()] {
                r.negativity = r.negativity.max(-p);
            }
        }
        for (level, eps) in [
            (AtomLevel::Ground, self.eps_g),
            (AtomLevel::Excited, self.eps_e),
        ] {
            let clicks = self.marginal(Outcome::GroundClick, level)
                + self.marginal(Outcome::ExcitedClick, level);
            r.click_efficiency = r.click_efficiency.max((clicks - eps).abs());
            r.no_click = r
                .no_click
                .max((self.marginal(Outcome::NoClick, level) - (1.0 - eps)).abs());
            let total: f64 = Outcome::ALL
                .iter()
                .map(|&xi| self.marginal(xi, level))
                .sum();
            r.completeness = r.completeness.max((total - 1.0).abs());
        }
        r
    }

    /// Atomic POVM element `diag(p[xi][g], p[xi][e])`.
    pub fn povm(&self, xi: Outcome) -> Operator {
        Operator::diagonal(&[
            self.marginal(xi, AtomLevel::Ground),
            self.marginal(xi, AtomLevel::Excited),
        ])
        .expect("atom dimension is 2")
    }

    /// State transformers `M_{xi, process} = sqrt(p) |exit><entry|`, in
    /// [`ChamberProcess::ALL`] order.
    pub fn transformers(&self, xi: Outcome) -> [Operator; 4] {
        ChamberProcess::ALL.map(|process| {
            let amp = libm::sqrt(self.process_probability(xi, process));
            Operator::atom_transition(process.exit(), process.entry())
                .scale(Complex64::new(amp, 0.0))
        })
    }

    /// Unnormalized post-selected atom state `sum_k M_k rho_a M_k^dagger`.
    pub fn apply_lambda(&self, xi: Outcome, rho_a: &DensityOperator) -> Result<Operator> {
        rho_a.as_operator().expect_dim(ATOM_DIM)?;
        let mut out = Operator::zeros(ATOM_DIM)?;
        for m in self.transformers(xi) {
            out = &out + &m.sandwich(rho_a.as_operator());
        }
        Ok(out)
    }

    /// `P(xi) = P(xi|g) P(g) + P(xi|e) P(e)`.
    pub fn outcome_probability(&self, xi: Outcome, rho_a: &DensityOperator) -> Result<f64> {
        let rho = rho_a.as_operator();
        rho.expect_dim(ATOM_DIM)?;
        let p = self.marginal(xi, AtomLevel::Ground) * rho[(0, 0)].re
            + self.marginal(xi, AtomLevel::Excited) * rho[(1, 1)].re;
        Ok(p.max(0.0))
    }
}
