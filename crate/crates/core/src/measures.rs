//! Entropies and entanglement quantities, all in base 2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{
    hermitian_eigensystem, partial_trace, partial_transpose, schmidt_coefficients, tensor_product,
    ComplexMatrix, DensityOperator, PureState, Subsystem, C64,
};
use crate::tolerance::Tolerances;

/// Binary entropy `H(x)` in bits, with `0·log 0 = 0`.
///
/// Both terms are derived from `max(x, 1-x)`, so `H(x)` and `H(1-x)` are
/// evaluated on identical operands and agree bit for bit.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    let major = if x > 0.5 { x } else { 1.0 - x };
    let minor = 1.0 - major;
    Ok(plogp(major) + plogp(minor))
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let tol = Tolerances::DEFAULT;
    if let Some(&bad) = p.iter().find(|&&x| !x.is_finite() || x < -tol.probability) {
        return Err(Error::Domain(format!("probability entry {bad} below zero")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol.probability {
        return Err(Error::NotNormalized {
            residual: (sum - 1.0).abs(),
        });
    }
    Ok(p
        .iter()
        .filter(|&&x| x > tol.zero_eigenvalue)
        .map(|&x| plogp(x))
        .sum())
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    shannon_entropy(&rho.spectrum()?)
}

/// `n - S(ρ)` with `n = log2(dim_a · dim_b)`.
pub fn information_content(rho: &DensityOperator) -> Result<f64> {
    let n = rho.qubit_count()?;
    Ok(n - von_neumann_entropy(rho)?)
}

/// `(S(ρ_A), S(ρ_B))`.
pub fn local_entropies(rho: &DensityOperator) -> Result<(f64, f64)> {
    Ok((
        von_neumann_entropy(&partial_trace(rho, Subsystem::A))?,
        von_neumann_entropy(&partial_trace(rho, Subsystem::B))?,
    ))
}

/// Entropy of entanglement of a pure state, from its Schmidt coefficients.
pub fn pure_state_entanglement(psi: &PureState) -> Result<f64> {
    let weights: Vec<f64> = schmidt_coefficients(psi).iter().map(|s| s * s).collect();
    let sum: f64 = weights.iter().sum();
    shannon_entropy(&weights.iter().map(|w| w / sum).collect::<Vec<_>>())
}

fn require_two_qubit(rho: &DensityOperator, what: &'static str) -> Result<()> {
    if rho.is_two_qubit() {
        Ok(())
    } else {
        Err(Error::WrongDimensions {
            what,
            need_a: 2,
            need_b: 2,
            dim_a: rho.dim_a(),
            dim_b: rho.dim_b(),
        })
    }
}

/// `σ_y ⊗ σ_y`.
fn yy() -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    let y = ComplexMatrix::new(2, 2, vec![C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)])
        .expect("2x2");
    tensor_product(&y, &y)
}

/// Wootters concurrence of a two-qubit state.
///
/// The decreasing square roots `λ_k` of the spectrum of `ρ (Y⊗Y) ρ* (Y⊗Y)`
/// are obtained from the Hermitian matrix `√ρ ρ̃ √ρ`, which has the same
/// spectrum.
pub fn concurrence_2q(rho: &DensityOperator) -> Result<f64> {
    require_two_qubit(rho, "concurrence")?;
    let es = rho.eigensystem()?;
    let sqrt_rho = es.map_values(|x| x.max(0.0).sqrt());
    let flip = yy();
    let tilde = flip.matmul(&rho.matrix().conj())?.matmul(&flip)?;
    let r = sqrt_rho.matmul(&tilde)?.matmul(&sqrt_rho)?;
    // symmetrize roundoff before the Hermitian solve
    let r = r.add(&r.adjoint())?.scale_real(0.5);
    let mut lambdas: Vec<f64> = hermitian_eigensystem(&r)?
        .values
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(c.clamp(0.0, 1.0))
}

/// Entanglement of formation of a two-qubit state, `H(½ + ½√(1 - C²))`.
pub fn eof_2q(rho: &DensityOperator) -> Result<f64> {
    eof_from_concurrence(concurrence_2q(rho)?)
}

pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    let arg = 0.5 + 0.5 * (1.0 - c * c).max(0.0).sqrt();
    binary_entropy(arg.min(1.0))
}

/// Closed-form entanglement cost of `p ψ₊ + (1-p) ψ₋`, `H(½ + √(p(1-p)))`.
pub fn bell_mixture_ec(p: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Domain(format!("Bell-mixture parameter {p} outside [0, 1/2]")));
    }
    let arg = 0.5 + (p * (1.0 - p)).sqrt();
    binary_entropy(arg.min(1.0))
}

/// Smallest eigenvalue of the partial transpose over B.
pub fn ppt_min_eigenvalue(rho: &DensityOperator) -> Result<f64> {
    let es = hermitian_eigensystem(&partial_transpose(rho, Subsystem::B))?;
    Ok(es.values[0])
}

/// Scalar summary of a bipartite state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub n: f64,
    pub s_total: f64,
    pub s_a: f64,
    pub s_b: f64,
    pub info: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concurrence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eof: Option<f64>,
    pub ppt_min_eig: f64,
}

pub fn measure_report(rho: &DensityOperator) -> Result<MeasureReport> {
    let n = rho.qubit_count()?;
    let s_total = von_neumann_entropy(rho)?;
    let (s_a, s_b) = local_entropies(rho)?;
    let (concurrence, eof) = if rho.is_two_qubit() {
        let c = concurrence_2q(rho)?;
        (Some(c), Some(eof_from_concurrence(c)?))
    } else {
        (None, None)
    };
    Ok(MeasureReport {
        n,
        s_total,
        s_a,
        s_b,
        info: n - s_total,
        concurrence,
        eof,
        ppt_min_eig: ppt_min_eigenvalue(rho)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::validate_density;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn bell_mixture(p: f64) -> DensityOperator {
        #[rustfmt::skip]
        let re = [
            0.5, 0.0, 0.0, p - 0.5,
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
            p - 0.5, 0.0, 0.0, 0.5,
        ];
        validate_density(ComplexMatrix::from_real(4, 4, &re).unwrap(), 2, 2).unwrap()
    }

    fn psi_plus() -> PureState {
        let h = C64::new(1.0 / 2f64.sqrt(), 0.0);
        let z = C64::new(0.0, 0.0);
        PureState::new(vec![h, z, z, h], 2, 2).unwrap()
    }

    // high-precision reference values computed offline with mpmath (50 digits)
    const H_QUARTER: f64 = 0.811_278_124_459_132_8;
    const EC_QUARTER: f64 = 0.354_578_902_665_269_9;
    const H_NINE_TENTHS: f64 = 0.468_995_593_589_281_2;

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        close(binary_entropy(0.25).unwrap(), H_QUARTER, 1e-15);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn binary_entropy_symmetric_on_grid() {
        for k in 0..=1000 {
            let x = k as f64 * 1e-3;
            assert_eq!(binary_entropy(x).unwrap(), binary_entropy(1.0 - x).unwrap());
        }
    }

    #[test]
    fn shannon_values() {
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(shannon_entropy(&[0.25; 4]).unwrap(), 2.0);
        close(shannon_entropy(&[0.25, 0.75, 0.0, 0.0]).unwrap(), H_QUARTER, 1e-15);
        assert!(shannon_entropy(&[0.5, 0.4]).is_err());
        assert!(shannon_entropy(&[1.1, -0.1]).is_err());
        // roundoff negatives are clipped
        assert!(shannon_entropy(&[1.0 + 1e-10, -1e-10]).is_ok());
    }

    #[test]
    fn entropy_information_and_locals() {
        let bell = psi_plus().projector();
        close(von_neumann_entropy(&bell).unwrap(), 0.0, 1e-9);
        close(information_content(&bell).unwrap(), 2.0, 1e-9);
        let mixed = validate_density(ComplexMatrix::identity(4).scale_real(0.25), 2, 2).unwrap();
        close(von_neumann_entropy(&mixed).unwrap(), 2.0, 1e-12);
        close(information_content(&mixed).unwrap(), 0.0, 1e-12);
        let mix = bell_mixture(0.25);
        close(von_neumann_entropy(&mix).unwrap(), H_QUARTER, 1e-12);
        close(information_content(&mix).unwrap(), 2.0 - H_QUARTER, 1e-12);
        let (sa, sb) = local_entropies(&mix).unwrap();
        close(sa, 1.0, 1e-12);
        close(sb, 1.0, 1e-12);
        let (sa, sb) = local_entropies(&bell).unwrap();
        close(sa, 1.0, 1e-12);
        close(sb, 1.0, 1e-12);
        let (sa, sb) = local_entropies(&PureState::basis(0, 1, 2, 2).unwrap().projector()).unwrap();
        assert_eq!((sa, sb), (0.0, 0.0));
    }

    #[test]
    fn information_needs_power_of_two() {
        let rho = validate_density(ComplexMatrix::identity(6).scale_real(1.0 / 6.0), 2, 3).unwrap();
        assert!(matches!(
            information_content(&rho),
            Err(Error::NotPowerOfTwo { .. })
        ));
    }

    #[test]
    fn pure_entanglement_values() {
        close(pure_state_entanglement(&psi_plus()).unwrap(), 1.0, 1e-15);
        assert_eq!(
            pure_state_entanglement(&PureState::basis(0, 0, 2, 2).unwrap()).unwrap(),
            0.0
        );
        let psi = PureState::new(
            vec![
                C64::new(0.9f64.sqrt(), 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.1f64.sqrt(), 0.0),
            ],
            2,
            2,
        )
        .unwrap();
        close(pure_state_entanglement(&psi).unwrap(), H_NINE_TENTHS, 1e-14);
    }

    #[test]
    fn concurrence_and_eof_values() {
        close(concurrence_2q(&psi_plus().projector()).unwrap(), 1.0, 1e-9);
        close(eof_2q(&psi_plus().projector()).unwrap(), 1.0, 1e-9);
        let mixed = validate_density(ComplexMatrix::identity(4).scale_real(0.25), 2, 2).unwrap();
        assert_eq!(concurrence_2q(&mixed).unwrap(), 0.0);
        assert_eq!(eof_2q(&mixed).unwrap(), 0.0);
        close(concurrence_2q(&bell_mixture(0.25)).unwrap(), 0.5, 1e-9);
        close(eof_2q(&bell_mixture(0.25)).unwrap(), EC_QUARTER, 1e-9);
        let three = validate_density(ComplexMatrix::identity(9).scale_real(1.0 / 9.0), 3, 3).unwrap();
        assert!(matches!(
            concurrence_2q(&three),
            Err(Error::WrongDimensions { .. })
        ));
    }

    #[test]
    fn bell_mixture_ec_values() {
        assert_eq!(bell_mixture_ec(0.0).unwrap(), 1.0);
        assert_eq!(bell_mixture_ec(0.5).unwrap(), 0.0);
        close(bell_mixture_ec(0.25).unwrap(), EC_QUARTER, 1e-15);
        assert!(bell_mixture_ec(0.6).is_err());
        assert!(bell_mixture_ec(-0.01).is_err());
    }

    #[test]
    fn report_fields() {
        let r = measure_report(&bell_mixture(0.25)).unwrap();
        assert_eq!(r.n, 2.0);
        close(r.s_total + r.info, 2.0, 1e-12);
        close(r.eof.unwrap(), EC_QUARTER, 1e-9);
        close(r.ppt_min_eig, -0.25, 1e-12);
    }
}
