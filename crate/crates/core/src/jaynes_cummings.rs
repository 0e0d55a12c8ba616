//! Resonant atom-field interaction for an atom entering the cavity in `|g>`.
//!
//! Only the ground-state column of the interaction unitary is needed:
//! `U|g>|psi> = |g> U_gg|psi> + |e> U_eg|psi>` with
//!
//! ```text
//! U_gg = cos(omega_tau * sqrt(a^dagger a))
//! U_eg = -i sin(omega_tau * sqrt(a a^dagger)) / sqrt(a a^dagger) * a
//! ```
//!
//! `a a^dagger` has spectrum `n + 1 >= 1`, so the quotient in `U_eg` never
//! meets its removable singularity. In matrix elements,
//! `<n-1|U_eg|n> = -i sin(omega_tau * sqrt(n))`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{diag_fock_fn, AtomLevel, DensityOperator, Operator, ATOM_DIM};

/// Interaction strength and Fock truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcParams {
    omega_tau: f64,
    field_dim: usize,
}

impl JcParams {
    /// `omega_tau` is the single-photon Rabi angle: the Rabi frequency times
    /// the interaction time.
    pub fn new(omega_tau: f64, field_dim: usize) -> Result<Self> {
        if !(omega_tau.is_finite() && omega_tau >= 0.0) {
            return Err(Error::InvalidOmegaTau(omega_tau));
        }
        if field_dim == 0 {
            return Err(Error::InvalidDimension { dim: 0, min: 1 });
        }
        Ok(Self {
            omega_tau,
            field_dim,
        })
    }

    pub fn omega_tau(&self) -> f64 {
        self.omega_tau
    }

    pub fn field_dim(&self) -> usize {
        self.field_dim
    }

    /// `<g|U|g>`: diagonal with entries `cos(omega_tau * sqrt(n))`.
    pub fn u_gg(&self) -> Operator {
        let wt = self.omega_tau;
        diag_fock_fn(self.field_dim, |n| libm::cos(wt * libm::sqrt(n as f64)))
            .expect("field_dim validated at construction")
    }

    /// `<e|U|g>`: lowers the photon number by one.
    pub fn u_eg(&self) -> Operator {
        let mut u = Operator::zeros(self.field_dim).expect("field_dim validated at construction");
        for n in 1..self.field_dim {
            let s = libm::sin(self.omega_tau * libm::sqrt(n as f64));
            u[(n - 1, n)] = Complex64::new(0.0, -s);
        }
        u
    }

    /// The block `<level|U|g>`.
    pub fn column_block(&self, level: AtomLevel) -> Operator {
        match level {
            AtomLevel::Ground => self.u_gg(),
            AtomLevel::Excited => self.u_eg(),
        }
    }

    /// `U (|g><g| (x) rho_f) U^dagger` in the atom-slow joint basis.
    pub fn joint_state_after_interaction(&self, rho_f: &DensityOperator) -> Result<Operator> {
        let n = self.field_dim;
        rho_f.as_operator().expect_dim(n)?;
        let rho = rho_f.as_operator();
        let blocks = [self.u_gg(), self.u_eg()];
        let mut joint = Operator::zeros(ATOM_DIM * n)?;
        for mu in AtomLevel::ALL {
            for nu in AtomLevel::ALL {
                let block = &(&blocks[mu.index()] * rho) * &blocks[nu.index()].adjoint();
                for r in 0..n {
                    for c in 0..n {
                        joint[(mu.index() * n + r, nu.index() * n + c)] = block[(r, c)];
                    }
                }
            }
        }
        Ok(joint)
    }
}
