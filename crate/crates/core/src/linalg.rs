//! Dense complex operators over the truncated Fock space, the two-level atom
//! space and the joint atom-field space.
//!
//! Joint operators use the atom-slow ordering: basis vector `|mu, n>` sits at
//! flat index `mu * N + n` with `mu = 0` for `|g>` and `mu = 1` for `|e>`, so
//! `<mu n| A (x) B |nu m> = A[mu][nu] * B[n][m]`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{DensityViolation, Error, Result};

/// Dimension of the atom space.
pub const ATOM_DIM: usize = 2;

/// Entrywise Hermiticity tolerance for density operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-12;
/// Lowest admissible eigenvalue magnitude below zero for density operators.
pub const PSD_FLOOR: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Level of the two-level atom-pointer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomLevel {
    Ground,
    Excited,
}

impl AtomLevel {
    pub const ALL: [AtomLevel; 2] = [AtomLevel::Ground, AtomLevel::Excited];

    pub fn index(self) -> usize {
        match self {
            AtomLevel::Ground => 0,
            AtomLevel::Excited => 1,
        }
    }
}

impl fmt::Display for AtomLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomLevel::Ground => "g",
            AtomLevel::Excited => "e",
        })
    }
}

/// Flat index of `|level, n>` in a joint space with `field_dim` Fock states.
pub fn joint_index(level: AtomLevel, n: usize, field_dim: usize) -> usize {
    level.index() * field_dim + n
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.entries.chunks(self.dim))
            .finish()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidDimension { dim, min: 1 });
    }
    Ok(())
}

impl Operator {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::zeros_unchecked(dim))
    }

    fn zeros_unchecked(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for i in 0..dim {
            op[(i, i)] = ONE;
        }
        Ok(op)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        check_dim(dim)?;
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Ok(Self { dim, entries })
    }

    /// Builds an operator from `dim * dim` row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    /// Real diagonal operator.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let mut op = Self::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            op[(i, i)] = Complex64::new(v, 0.0);
        }
        Ok(op)
    }

    /// `|row><col|` in a space of dimension `dim`.
    pub fn outer(dim: usize, row: usize, col: usize) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        if row >= dim || col >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.max(col) + 1,
            });
        }
        op[(row, col)] = ONE;
        Ok(op)
    }

    /// `|to><from|` on the atom space.
    pub fn atom_transition(to: AtomLevel, from: AtomLevel) -> Self {
        let mut op = Self::zeros_unchecked(ATOM_DIM);
        op[(to.index(), from.index())] = ONE;
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros_unchecked(n);
        for r in 0..n {
            for c in 0..n {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// `self * rho * self^dagger`.
    pub fn sandwich(&self, rho: &Operator) -> Self {
        &(self * rho) * &self.adjoint()
    }

    /// `acc += self * rho * self^dagger` without materializing the adjoint.
    pub fn add_sandwich_into(&self, rho: &Operator, acc: &mut Operator) {
        let n = self.dim;
        assert!(rho.dim == n && acc.dim == n, "operator dimensions differ");
        let left = self * rho;
        for i in 0..n {
            for j in 0..n {
                let mut s = ZERO;
                for b in 0..n {
                    s += left.entries[i * n + b] * self.entries[j * n + b].conj();
                }
                acc.entries[i * n + j] += s;
            }
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Whether every eigenvalue of the Hermitian part is at least `-floor`.
    ///
    /// Runs a Cholesky factorization of `self + floor * I` on the lower
    /// triangle; the factorization exists iff the shifted matrix is positive
    /// definite.
    pub fn is_positive_within(&self, floor: f64) -> bool {
        let n = self.dim;
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut d = self[(j, j)].re + floor;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) {
                return false;
            }
            let pivot = libm::sqrt(d);
            l[j * n + j] = Complex64::new(pivot, 0.0);
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / pivot;
            }
        }
        true
    }

    pub fn kron(&self, other: &Operator) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros_unchecked(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// The `(row, col)` atom block `<row| self |col>` of a joint operator.
    pub fn atom_block(&self, row: AtomLevel, col: AtomLevel, field_dim: usize) -> Result<Self> {
        self.expect_dim(ATOM_DIM * field_dim)?;
        let (r0, c0) = (row.index() * field_dim, col.index() * field_dim);
        Self::from_fn(field_dim, |n, m| self[(r0 + n, c0 + m)])
    }

    pub(crate) fn expect_dim(&self, expected: usize) -> Result<()> {
        if self.dim != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.dim && c < self.dim, "index out of range");
        &self.entries[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(r < self.dim && c < self.dim, "index out of range");
        &mut self.entries[r * self.dim + c]
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let n = self.dim;
        let mut out = Operator::zeros_unchecked(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Field annihilation operator `a` on `dim` Fock states: `<n-1|a|n> = sqrt(n)`.
pub fn annihilation(dim: usize) -> Result<Operator> {
    let mut a = Operator::zeros(dim)?;
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new(libm::sqrt(n as f64), 0.0);
    }
    Ok(a)
}

/// `diag(f(0), ..., f(dim - 1))`, the Fock-diagonal function of the number operator.
pub fn diag_fock_fn(dim: usize, f: impl Fn(usize) -> f64) -> Result<Operator> {
    check_dim(dim)?;
    let values: Vec<f64> = (0..dim).map(f).collect();
    Operator::diagonal(&values)
}

pub fn kron(a: &Operator, b: &Operator) -> Operator {
    a.kron(b)
}

/// `Tr_A` of a joint operator: the sum of its two diagonal atom blocks.
pub fn partial_trace_atom(joint: &Operator, field_dim: usize) -> Result<Operator> {
    check_dim(field_dim)?;
    joint.expect_dim(ATOM_DIM * field_dim)?;
    Operator::from_fn(field_dim, |n, m| {
        AtomLevel::ALL
            .iter()
            .map(|mu| {
                let off = mu.index() * field_dim;
                joint[(off + n, off + m)]
            })
            .sum()
    })
}

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, PartialEq)]
pub struct DensityOperator(Operator);

impl fmt::Debug for DensityOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl DensityOperator {
    /// Validates all three density-operator invariants.
    pub fn new(op: Operator) -> Result<Self> {
        let residual = op.hermiticity_residual();
        if !(residual <= HERMITIAN_TOL) {
            return Err(Error::NotDensity(DensityViolation::NotHermitian {
                residual,
            }));
        }
        let trace = op.trace();
        if !((trace.re - 1.0).abs() <= TRACE_TOL && trace.im.abs() <= TRACE_TOL) {
            return Err(Error::NotDensity(DensityViolation::TraceNotOne {
                trace: trace.re,
            }));
        }
        if !op.is_positive_within(PSD_FLOOR) {
            return Err(Error::NotDensity(DensityViolation::NotPositive {
                floor: PSD_FLOOR,
            }));
        }
        Ok(Self(op))
    }

    /// Divides a positive operator by its trace and validates the result.
    pub fn normalized(op: Operator) -> Result<Self> {
        let trace = op.trace().re;
        if !(trace > 0.0) {
            return Err(Error::NotDensity(DensityViolation::TraceNotOne { trace }));
        }
        Self::new(op.scale_real(1.0 / trace))
    }

    /// `|psi><psi|` for a non-zero amplitude vector, normalized.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let dim = amplitudes.len();
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_sqr > 0.0) {
            return Err(Error::NotDensity(DensityViolation::TraceNotOne {
                trace: norm_sqr,
            }));
        }
        let op = Operator::from_fn(dim, |r, c| amplitudes[r] * amplitudes[c].conj() / norm_sqr)?;
        Self::new(op)
    }

    /// The Fock state `|n><n|`.
    pub fn fock(dim: usize, n: usize) -> Result<Self> {
        Ok(Self(Operator::outer(dim, n, n)?))
    }

    /// The atom state `|level><level|`.
    pub fn atom(level: AtomLevel) -> Self {
        Self(Operator::atom_transition(level, level))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }
}

impl AsRef<Operator> for DensityOperator {
    fn as_ref(&self) -> &Operator {
        &self.0
    }
}

/// `G G^dagger / Tr(G G^dagger)` for a seeded complex Gaussian `G`.
pub fn random_density(dim: usize, seed: u64) -> Result<DensityOperator> {
    check_dim(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Operator::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    })?;
    DensityOperator::normalized(&g * &g.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn annihilation_small() {
        let a = annihilation(2).unwrap();
        assert_eq!(a.entries(), &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        let a3 = annihilation(3).unwrap();
        assert!((a3[(1, 2)].re - libm::sqrt(2.0)).abs() < 1e-15);
    }

    #[test]
    fn number_operator_from_ladder() {
        for dim in 1..=8 {
            let a = annihilation(dim).unwrap();
            let n = &a.adjoint() * &a;
            let expected = diag_fock_fn(dim, |k| k as f64).unwrap();
            assert!(n.max_abs_diff(&expected) <= 1e-14, "dim {dim}");
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(
            annihilation(0),
            Err(Error::InvalidDimension { dim: 0, min: 1 })
        );
        assert!(diag_fock_fn(0, |_| 1.0).is_err());
        assert!(random_density(0, 1).is_err());
    }

    #[test]
    fn diag_fock_examples() {
        let id = diag_fock_fn(3, |_| 1.0).unwrap();
        assert_eq!(id, Operator::identity(3).unwrap());
        let half_turn = diag_fock_fn(2, |n| {
            libm::cos(core::f64::consts::FRAC_PI_2 * libm::sqrt(n as f64))
        })
        .unwrap();
        assert!(half_turn.max_abs_diff(&Operator::diagonal(&[1.0, 0.0]).unwrap()) < 1e-15);
    }

    #[test]
    fn kron_of_identities() {
        let i2 = Operator::identity(2).unwrap();
        let i3 = Operator::identity(3).unwrap();
        assert_eq!(kron(&i2, &i3), Operator::identity(6).unwrap());
    }

    #[test]
    fn kron_ground_projector_has_empty_excited_block() {
        let rho = random_density(3, 7).unwrap();
        let joint = kron(
            DensityOperator::atom(AtomLevel::Ground).as_operator(),
            rho.as_operator(),
        );
        let zero = Operator::zeros(3).unwrap();
        for (r, c) in [
            (AtomLevel::Excited, AtomLevel::Excited),
            (AtomLevel::Ground, AtomLevel::Excited),
            (AtomLevel::Excited, AtomLevel::Ground),
        ] {
            assert_eq!(joint.atom_block(r, c, 3).unwrap(), zero);
        }
        assert_eq!(
            joint
                .atom_block(AtomLevel::Ground, AtomLevel::Ground, 3)
                .unwrap(),
            *rho.as_operator()
        );
    }

    #[test]
    fn partial_trace_of_excited_projector() {
        let x = random_density(4, 3).unwrap();
        let joint = kron(
            DensityOperator::atom(AtomLevel::Excited).as_operator(),
            x.as_operator(),
        );
        assert_eq!(partial_trace_atom(&joint, 4).unwrap(), *x.as_operator());
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let joint = Operator::identity(6).unwrap();
        assert_eq!(
            partial_trace_atom(&joint, 4),
            Err(Error::DimensionMismatch {
                expected: 8,
                found: 6
            })
        );
    }

    #[test]
    fn random_density_fixture() {
        assert_eq!(
            random_density(1, 42).unwrap().as_operator().entries(),
            &[c(1.0)]
        );
        assert_eq!(random_density(4, 9).unwrap(), random_density(4, 9).unwrap());
        assert_ne!(
            random_density(4, 9).unwrap(),
            random_density(4, 10).unwrap()
        );
    }

    #[test]
    fn density_rejects_each_violation() {
        let not_herm = Operator::from_entries(2, vec![c(0.5), c(0.1), c(0.0), c(0.5)]).unwrap();
        assert!(matches!(
            DensityOperator::new(not_herm),
            Err(Error::NotDensity(DensityViolation::NotHermitian { .. }))
        ));
        let bad_trace = Operator::diagonal(&[0.5, 0.6]).unwrap();
        assert!(matches!(
            DensityOperator::new(bad_trace),
            Err(Error::NotDensity(DensityViolation::TraceNotOne { .. }))
        ));
        let negative = Operator::diagonal(&[1.1, -0.1]).unwrap();
        assert!(matches!(
            DensityOperator::new(negative),
            Err(Error::NotDensity(DensityViolation::NotPositive { .. }))
        ));
        // within the eigenvalue floor
        assert!(DensityOperator::new(Operator::diagonal(&[1.0 + 5e-11, -5e-11]).unwrap()).is_ok());
    }

    #[test]
    fn pure_states_are_accepted_by_shifted_cholesky() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityOperator::pure(&[c(s), Complex64::new(0.0, s), c(0.0)]).unwrap();
        assert!((rho.as_operator()[(0, 1)] - Complex64::new(0.0, -0.5)).norm() < 1e-15);
    }
}
