//! Validated bipartite states.

use serde::{Deserialize, Serialize};

use super::eigen::{hermitian_eigensystem_with, singular_values, Eigensystem};
use super::{norm, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on `C^dim_a ⊗ C^dim_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
}

impl DensityOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn is_two_qubit(&self) -> bool {
        self.dims() == (2, 2)
    }

    /// `log2(dim_a · dim_b)` when both dimensions are powers of two.
    pub fn qubit_count(&self) -> Result<f64> {
        if !self.dim_a.is_power_of_two() || !self.dim_b.is_power_of_two() {
            return Err(Error::NotPowerOfTwo {
                dim_a: self.dim_a,
                dim_b: self.dim_b,
            });
        }
        Ok((self.dim_a.trailing_zeros() + self.dim_b.trailing_zeros()) as f64)
    }

    pub fn eigensystem(&self) -> Result<Eigensystem> {
        hermitian_eigensystem_with(&self.matrix, &Tolerances::DEFAULT)
    }

    /// Eigenvalues as a probability vector: roundoff below zero is clipped,
    /// values above one are capped, and the vector is renormalized when the
    /// clipping moved the sum by more than `1e-12`.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let mut values: Vec<f64> = self
            .eigensystem()?
            .values
            .into_iter()
            .map(|x| x.clamp(0.0, 1.0))
            .collect();
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-12 && sum > 0.0 {
            values.iter_mut().for_each(|x| *x /= sum);
        }
        Ok(values)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so tr ρ² = Σ |ρ_ij|²
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Wraps a matrix built by a routine that preserves the density-operator
    /// invariants (reductions, convex mixtures of valid states).
    pub(crate) fn from_trusted(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Self {
        Self { matrix, dim_a, dim_b }
    }
}

pub fn validate_density(m: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<DensityOperator> {
    validate_density_with(m, dim_a, dim_b, &Tolerances::DEFAULT)
}

/// Checks Hermiticity, unit trace and positivity, in that order.
pub fn validate_density_with(
    m: ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    tol: &Tolerances,
) -> Result<DensityOperator> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let d = dim_a * dim_b;
    if m.rows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: m.rows(),
        });
    }
    if d > tol.max_dim {
        return Err(Error::DimensionTooLarge { dim: d, cap: tol.max_dim });
    }
    let residual = m.hermiticity_residual();
    if residual > tol.hermiticity {
        return Err(Error::NotHermitian { residual });
    }
    let residual = (m.trace() - C64::new(1.0, 0.0)).norm();
    if residual > tol.trace {
        return Err(Error::TraceNotOne { residual });
    }
    let es = hermitian_eigensystem_with(&m, tol)?;
    let min_eigenvalue = es.values.first().copied().unwrap_or(0.0);
    if min_eigenvalue < tol.positivity_floor {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityOperator { matrix: m, dim_a, dim_b })
}

/// Unit vector in `C^dim_a ⊗ C^dim_b`, index `i_a · dim_b + i_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dim_a: usize,
    dim_b: usize,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, dim_a: usize, dim_b: usize) -> Result<Self> {
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                found: amplitudes.len(),
            });
        }
        if let Some(index) = amplitudes
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite { index });
        }
        let residual = (norm(&amplitudes).powi(2) - 1.0).abs();
        if residual > Tolerances::DEFAULT.pure_norm {
            return Err(Error::NotNormalized { residual });
        }
        Ok(Self { amplitudes, dim_a, dim_b })
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>, dim_a: usize, dim_b: usize) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { residual: 1.0 });
        }
        Self::new(amplitudes.iter().map(|z| z / n).collect(), dim_a, dim_b)
    }

    /// `|a⟩ ⊗ |b⟩` for computational basis labels.
    pub fn basis(a: usize, b: usize, dim_a: usize, dim_b: usize) -> Result<Self> {
        if a >= dim_a || b >= dim_b {
            return Err(Error::Domain(format!(
                "basis label ({a},{b}) outside dims ({dim_a},{dim_b})"
            )));
        }
        let mut amplitudes = vec![ZERO; dim_a * dim_b];
        amplitudes[a * dim_b + b] = C64::new(1.0, 0.0);
        Self::new(amplitudes, dim_a, dim_b)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator::from_trusted(
            ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
            self.dim_a,
            self.dim_b,
        )
    }

    /// Amplitudes reshaped to the `dim_a × dim_b` coefficient matrix.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.dim_a, self.dim_b, self.amplitudes.clone())
            .expect("amplitude count checked on construction")
    }
}

/// Schmidt coefficients of a pure state, descending.
pub fn schmidt_coefficients(psi: &PureState) -> Vec<f64> {
    singular_values(&psi.coefficient_matrix())
}

/// Reduced state of the kept subsystem, returned with dims `(d_keep, 1)`.
pub fn partial_trace(rho: &DensityOperator, keep: Subsystem) -> DensityOperator {
    let (da, db) = rho.dims();
    let m = rho.matrix();
    match keep {
        Subsystem::A => {
            let mut r = ComplexMatrix::zeros(da, da);
            for i in 0..da {
                for j in 0..da {
                    r[(i, j)] = (0..db).map(|k| m[(i * db + k, j * db + k)]).sum();
                }
            }
            DensityOperator::from_trusted(r, da, 1)
        }
        Subsystem::B => {
            let mut r = ComplexMatrix::zeros(db, db);
            for i in 0..db {
                for j in 0..db {
                    r[(i, j)] = (0..da).map(|k| m[(k * db + i, k * db + j)]).sum();
                }
            }
            DensityOperator::from_trusted(r, db, 1)
        }
    }
}

/// Transposes the chosen tensor factor.
pub fn partial_transpose(rho: &DensityOperator, side: Subsystem) -> ComplexMatrix {
    partial_transpose_matrix(rho.matrix(), rho.dim_a(), rho.dim_b(), side)
}

/// Partial transpose of a raw `(da·db)`-square matrix.
pub fn partial_transpose_matrix(
    m: &ComplexMatrix,
    da: usize,
    db: usize,
    side: Subsystem,
) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for k in 0..db {
            for j in 0..da {
                for l in 0..db {
                    let (src_row, src_col) = match side {
                        Subsystem::A => (j * db + k, i * db + l),
                        Subsystem::B => (i * db + l, j * db + k),
                    };
                    out[(i * db + k, j * db + l)] = m[(src_row, src_col)];
                }
            }
        }
    }
    out
}

/// Exchanges the roles of the two parties.
pub fn swap_subsystems(rho: &DensityOperator) -> DensityOperator {
    let (da, db) = rho.dims();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for k in 0..db {
            for j in 0..da {
                for l in 0..db {
                    out[(k * da + i, l * da + j)] = m[(i * db + k, j * db + l)];
                }
            }
        }
    }
    DensityOperator::from_trusted(out, db, da)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::tensor_product;

    fn psi_plus() -> PureState {
        let h = 1.0 / 2f64.sqrt();
        PureState::new(
            vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)],
            2,
            2,
        )
        .unwrap()
    }

    fn bell_mixture_by_hand(p: f64) -> DensityOperator {
        #[rustfmt::skip]
        let re = [
            0.5, 0.0, 0.0, p - 0.5,
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
            p - 0.5, 0.0, 0.0, 0.5,
        ];
        validate_density(ComplexMatrix::from_real(4, 4, &re).unwrap(), 2, 2).unwrap()
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let m = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(validate_density(m, 2, 2).is_ok());
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let m = ComplexMatrix::diag_real(&[0.5, 0.6, -0.1, 0.0]);
        match validate_density(m, 2, 2) {
            Err(Error::NotPositive { min_eigenvalue }) => {
                assert!((min_eigenvalue + 0.1).abs() < 1e-15)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trace_and_hermiticity_are_named() {
        let m = ComplexMatrix::diag_real(&[0.5, 0.4, 0.0, 0.0]);
        let err = validate_density(m, 2, 2).unwrap_err();
        assert_eq!(err.to_string(), "TraceNotOne residual=0.1");
        let m = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(matches!(
            validate_density(m, 2, 1),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn dimension_cap() {
        let m = ComplexMatrix::identity(128).scale_real(1.0 / 128.0);
        assert!(matches!(
            validate_density(m, 8, 16),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn bell_mixture_matrix_is_valid() {
        bell_mixture_by_hand(0.3);
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let rho = psi_plus().projector();
        for side in [Subsystem::A, Subsystem::B] {
            assert!(partial_trace(&rho, side).matrix().max_abs_diff(&half) < 1e-15);
        }
        let mix = bell_mixture_by_hand(0.25);
        assert!(partial_trace(&mix, Subsystem::A).matrix().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn product_state_factor_recovery() {
        let sigma = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.7, 0.0),
                C64::new(0.1, -0.2),
                C64::new(0.1, 0.2),
                C64::new(0.3, 0.0),
            ],
        )
        .unwrap();
        let tau = ComplexMatrix::diag_real(&[0.4, 0.6]);
        let rho = validate_density(tensor_product(&sigma, &tau), 2, 2).unwrap();
        assert!(partial_trace(&rho, Subsystem::A).matrix().max_abs_diff(&sigma) < 1e-15);
        assert!(partial_trace(&rho, Subsystem::B).matrix().max_abs_diff(&tau) < 1e-15);
        let pt = partial_transpose(&rho, Subsystem::B);
        assert!(pt.max_abs_diff(&tensor_product(&sigma, &tau.transpose())) < 1e-15);
        let pt = partial_transpose(&rho, Subsystem::A);
        assert!(pt.max_abs_diff(&tensor_product(&sigma.transpose(), &tau)) < 1e-15);
    }

    #[test]
    fn partial_transpose_spectra() {
        let es = hermitian_eigensystem_with(
            &partial_transpose(&psi_plus().projector(), Subsystem::B),
            &Tolerances::DEFAULT,
        )
        .unwrap();
        assert!((es.values[0] + 0.5).abs() < 1e-12);
        for p in [0.0, 0.1, 0.25, 0.4] {
            let es = hermitian_eigensystem_with(
                &partial_transpose(&bell_mixture_by_hand(p), Subsystem::B),
                &Tolerances::DEFAULT,
            )
            .unwrap();
            assert!((es.values[0] - (p - 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_moves_factors() {
        let sigma = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let tau = ComplexMatrix::diag_real(&[0.0, 0.5, 0.5]);
        let rho = validate_density(tensor_product(&sigma, &tau), 2, 3).unwrap();
        let swapped = swap_subsystems(&rho);
        assert_eq!(swapped.dims(), (3, 2));
        assert!(swapped.matrix().max_abs_diff(&tensor_product(&tau, &sigma)) < 1e-15);
    }

    #[test]
    fn schmidt_of_bell_and_product() {
        let s = schmidt_coefficients(&psi_plus());
        assert!((s[0] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((s[1] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        let s = schmidt_coefficients(&PureState::basis(1, 0, 2, 2).unwrap());
        assert_eq!(s[1], 0.0);
    }

    #[test]
    fn spectrum_clips_roundoff() {
        let m = ComplexMatrix::diag_real(&[0.5, 0.5 + 5e-11, -5e-11, 0.0]);
        let rho = validate_density(m, 2, 2).unwrap();
        let spec = rho.spectrum().unwrap();
        assert!(spec.iter().all(|&x| x >= 0.0));
        assert!((spec.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
