//! State families with known protocol points, and coarse classification.

use serde::Serialize;

use crate::curves::{formation_endpoints, FormationFamily, PointKind, ProtocolPoint};
use crate::ensembles::{
    assumed_exact_values, formation_point, product_eigenbasis_check, Component, ComponentState,
    Ensemble, ProductEigenbasis,
};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, DensityOperator, PureState, C64, ZERO};
use crate::measures::{
    bell_mixture_ec, information_content, ppt_min_eigenvalue, pure_state_entanglement,
};
use crate::tolerance::Tolerances;

/// `(|00⟩ + sign·|11⟩)/√2`.
fn bell_state(sign: f64) -> PureState {
    let h = 1.0 / 2f64.sqrt();
    PureState::new(
        vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(sign * h, 0.0)],
        2,
        2,
    )
    .expect("unit norm")
}

pub fn psi_plus() -> PureState {
    bell_state(1.0)
}

pub fn psi_minus() -> PureState {
    bell_state(-1.0)
}

fn check_bell_parameter(p: f64) -> Result<()> {
    if (0.0..=0.5).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("Bell-mixture parameter {p} outside [0, 1/2]")))
    }
}

/// `p |ψ₊⟩⟨ψ₊| + (1-p) |ψ₋⟩⟨ψ₋|`.
pub fn bell_mixture(p: f64) -> Result<DensityOperator> {
    check_bell_parameter(p)?;
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(3, 3)] = C64::new(0.5, 0.0);
    m[(0, 3)] = C64::new(p - 0.5, 0.0);
    m[(3, 0)] = C64::new(p - 0.5, 0.0);
    crate::matrix::validate_density(m, 2, 2)
}

/// `{(2p, ρ_s), (1-2p, ψ₋)}` with `ρ_s` the equal mixture of `|00⟩` and `|11⟩`.
pub fn bell_intermediate_decomposition(p: f64) -> Result<Ensemble> {
    check_bell_parameter(p)?;
    let rho_s = ComponentState::from_pure_mixture(vec![
        (0.5, PureState::basis(0, 0, 2, 2)?),
        (0.5, PureState::basis(1, 1, 2, 2)?),
    ])?;
    Ensemble::new(vec![
        Component::new(2.0 * p, rho_s),
        Component::new(1.0 - 2.0 * p, ComponentState::Pure(psi_minus())),
    ])
}

/// The three formation points of the Bell mixture for `0 < p < 1/2`:
/// `(E_c, 2)`, the intermediate `(1-2p, 2-2p)` and `(1, 2-H(p))`.
///
/// Endpoints come from the information content and the assumption-flagged
/// `(Δ_f, E_r)`; the intermediate point from the `{ρ_s, ψ₋}` decomposition.
pub fn bell_formation_points(p: f64) -> Result<Vec<ProtocolPoint>> {
    check_bell_parameter(p)?;
    if p == 0.0 || p == 0.5 {
        return Err(Error::DegenerateFamily { p });
    }
    let rho = bell_mixture(p)?;
    let info = information_content(&rho)?;
    let assumed = assumed_exact_values(&rho)?;
    let e_c = bell_mixture_ec(p)?;
    let (ec_point, er_point) = formation_endpoints(info, assumed.delta_f, e_c, assumed.e_r)?;
    let mid = formation_point(&bell_intermediate_decomposition(p)?)?;
    Ok(vec![ec_point, mid, er_point])
}

/// The Bell-mixture family as a scan target. At `p = 0` the curve is the
/// single point `(1, 2)`; at `p = 1/2` it is the flat line `I = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BellMixtureFamily;

impl FormationFamily for BellMixtureFamily {
    fn domain(&self) -> (f64, f64) {
        (0.0, 0.5)
    }

    fn formation_points(&self, p: f64) -> Result<Vec<ProtocolPoint>> {
        check_bell_parameter(p)?;
        if p == 0.0 {
            return Ok(vec![ProtocolPoint::new(
                1.0,
                2.0,
                PointKind::FormationEndpointEc,
                "E_c",
            )]);
        }
        if p == 0.5 {
            return Ok(vec![
                ProtocolPoint::new(0.0, 1.0, PointKind::FormationEndpointEc, "E_c"),
                ProtocolPoint::new(1.0, 1.0, PointKind::Bound, "I=1"),
            ]);
        }
        bell_formation_points(p)
    }
}

fn check_weights(weights: &[f64], what: &str) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Domain(format!("{what} vector is empty")));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::Domain(format!("{what} entry {w} is negative")));
    }
    Ok(())
}

/// Smallest power of two (at least 2) holding `len` local labels.
fn local_dim(len: usize) -> usize {
    len.max(2).next_power_of_two()
}

// Typed coefficients such as 0.70710678 carry about 8 digits.
const COEFF_NORM_TOL: f64 = 1e-7;

/// `Σ c_k |kk⟩` in the smallest power-of-two local dimension that fits.
///
/// Coefficients whose squares sum to 1 within 1e-7 are renormalized exactly.
pub fn pure_schmidt(coeffs: &[f64]) -> Result<PureState> {
    check_weights(coeffs, "Schmidt coefficient")?;
    let norm_sq: f64 = coeffs.iter().map(|c| c * c).sum();
    let residual = (norm_sq - 1.0).abs();
    if residual > COEFF_NORM_TOL {
        return Err(Error::NotNormalized { residual });
    }
    let d = local_dim(coeffs.len());
    let mut amp = vec![ZERO; d * d];
    for (k, c) in coeffs.iter().enumerate() {
        amp[k * d + k] = C64::new(*c, 0.0);
    }
    PureState::normalized(amp, d, d)
}

/// `Σ p_k |kk⟩⟨kk|`.
pub fn classically_correlated(probs: &[f64]) -> Result<DensityOperator> {
    check_weights(probs, "probability")?;
    let sum: f64 = probs.iter().sum();
    let residual = (sum - 1.0).abs();
    if residual > COEFF_NORM_TOL {
        return Err(Error::NotNormalized { residual });
    }
    let d = local_dim(probs.len());
    let mut diag = vec![0.0; d * d];
    for (k, p) in probs.iter().enumerate() {
        diag[k * d + k] = p / sum;
    }
    crate::matrix::validate_density(ComplexMatrix::diag_real(&diag), d, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Category {
    PureProduct,
    PureEntangled,
    ClassicallyCorrelated,
    MixedNPT,
    MixedPPT,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub purity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entanglement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_eigenbasis: Option<ProductEigenbasis>,
    pub ppt_min_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub category: Category,
    pub evidence: Evidence,
}

/// Sorts a state into pure product / pure entangled / classically correlated
/// / NPT / PPT, in that order of precedence.
///
/// The product-eigenbasis test only runs on two qubits; larger states fall
/// through to the partial-transpose evidence.
pub fn classify(rho: &DensityOperator) -> Result<Classification> {
    let tol = Tolerances::DEFAULT;
    let purity = rho.purity();
    let ppt_min_eig = ppt_min_eigenvalue(rho)?;
    let mut evidence = Evidence {
        purity,
        entanglement: None,
        product_eigenbasis: None,
        ppt_min_eig,
    };
    if purity >= 1.0 - tol.purity {
        let es = rho.eigensystem()?;
        let top = es.vector(es.values.len() - 1);
        let psi = PureState::normalized(top, rho.dim_a(), rho.dim_b())?;
        let e = pure_state_entanglement(&psi)?;
        evidence.entanglement = Some(e);
        let category = if e > tol.schmidt {
            Category::PureEntangled
        } else {
            Category::PureProduct
        };
        return Ok(Classification { category, evidence });
    }
    if rho.is_two_qubit() {
        let check = product_eigenbasis_check(rho)?;
        evidence.product_eigenbasis = Some(check);
        if check == ProductEigenbasis::HasProductEigenbasis {
            return Ok(Classification {
                category: Category::ClassicallyCorrelated,
                evidence,
            });
        }
    }
    let category = if ppt_min_eig < -tol.npt {
        Category::MixedNPT
    } else {
        Category::MixedPPT
    };
    Ok(Classification { category, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::swap_subsystems;
    use crate::measures::von_neumann_entropy;

    const EC_QUARTER: f64 = 0.354_578_902_665_269_9;
    const H_QUARTER: f64 = 0.811_278_124_459_132_9;

    #[test]
    fn bell_mixture_entries() {
        let r = bell_mixture(0.0).unwrap();
        assert!(r.matrix().max_abs_diff(psi_minus().projector().matrix()) < 1e-15);
        let r = bell_mixture(0.5).unwrap();
        assert_eq!(r.matrix(), &ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]));
        let r = bell_mixture(0.25).unwrap();
        assert_eq!(r.matrix()[(0, 3)], C64::new(-0.25, 0.0));
        let spec = r.spectrum().unwrap();
        let want = [0.0, 0.0, 0.25, 0.75];
        for (a, b) in spec.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(bell_mixture(0.51).is_err());
    }

    #[test]
    fn bell_points() {
        let pts = bell_formation_points(0.25).unwrap();
        assert!((pts[0].q - EC_QUARTER).abs() < 1e-12 && pts[0].i == 2.0);
        assert!((pts[1].q - 0.5).abs() < 1e-12 && (pts[1].i - 1.5).abs() < 1e-12);
        assert!((pts[2].q - 1.0).abs() < 1e-12 && (pts[2].i - (2.0 - H_QUARTER)).abs() < 1e-12);

        let pts = bell_formation_points(0.49).unwrap();
        assert!((pts[0].q - 0.001_473_166_429_869_301_5).abs() < 1e-9);
        assert!((pts[1].q - 0.02).abs() < 1e-12 && (pts[1].i - 1.02).abs() < 1e-12);
        assert!((pts[2].i - (2.0 - 0.999_711_441_752_809_9)).abs() < 1e-9);

        let pts = bell_formation_points(1e-9).unwrap();
        for p in &pts {
            assert!((p.q - 1.0).abs() < 1e-3 && (p.i - 2.0).abs() < 1e-3);
        }

        assert!(matches!(bell_formation_points(0.0), Err(Error::DegenerateFamily { .. })));
        assert!(matches!(bell_formation_points(0.5), Err(Error::DegenerateFamily { .. })));
    }

    #[test]
    fn pure_schmidt_states() {
        let psi = pure_schmidt(&[1.0]).unwrap();
        assert_eq!(psi, PureState::basis(0, 0, 2, 2).unwrap());
        let h = 1.0 / 2f64.sqrt();
        let psi = pure_schmidt(&[h, h]).unwrap();
        assert!(crate::matrix::inner(psi.amplitudes(), psi_plus().amplitudes()).re > 1.0 - 1e-15);
        let psi = pure_schmidt(&[0.9f64.sqrt(), 0.1f64.sqrt()]).unwrap();
        assert!((pure_state_entanglement(&psi).unwrap() - 0.468_995_593_589_281_2).abs() < 1e-14);
        let psi = pure_schmidt(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_eq!(psi.dims(), (4, 4));
        assert!((pure_state_entanglement(&psi).unwrap() - 2.0).abs() < 1e-14);
        assert!(pure_schmidt(&[0.5, 0.5]).is_err());
        assert!(pure_schmidt(&[-1.0]).is_err());
    }

    #[test]
    fn classical_states() {
        let r = classically_correlated(&[0.5, 0.5]).unwrap();
        assert_eq!(r.matrix(), &ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]));
        assert!((information_content(&r).unwrap() - 1.0).abs() < 1e-12);
        let r = classically_correlated(&[1.0, 0.0]).unwrap();
        assert!((information_content(&r).unwrap() - 2.0).abs() < 1e-12);
        let r = classically_correlated(&[0.25, 0.75]).unwrap();
        assert!((von_neumann_entropy(&r).unwrap() - H_QUARTER).abs() < 1e-12);
        assert!((information_content(&r).unwrap() - (2.0 - H_QUARTER)).abs() < 1e-12);
        assert!(classically_correlated(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn classification_examples() {
        let c = classify(&psi_plus().projector()).unwrap();
        assert_eq!(c.category, Category::PureEntangled);
        let c = classify(&bell_mixture(0.25).unwrap()).unwrap();
        assert_eq!(c.category, Category::MixedNPT);
        assert!((c.evidence.ppt_min_eig + 0.25).abs() < 1e-12);
        assert_eq!(c.evidence.product_eigenbasis, Some(ProductEigenbasis::No));
        let c = classify(&bell_mixture(0.5).unwrap()).unwrap();
        assert_eq!(c.category, Category::ClassicallyCorrelated);
        let c = classify(&pure_schmidt(&[1.0]).unwrap().projector()).unwrap();
        assert_eq!(c.category, Category::PureProduct);
    }

    #[test]
    fn separable_mixed_state_is_ppt() {
        // equal mixture of |00⟩ and |++⟩: separable, no product eigenbasis
        let h = 0.5;
        let pp = [C64::new(h, 0.0); 4];
        let z = [C64::new(1.0, 0.0), ZERO, ZERO, ZERO];
        let m = ComplexMatrix::outer(&z, &z)
            .add(&ComplexMatrix::outer(&pp, &pp))
            .unwrap()
            .scale_real(0.5);
        let rho = crate::matrix::validate_density(m, 2, 2).unwrap();
        let c = classify(&rho).unwrap();
        assert_eq!(c.category, Category::MixedPPT);
    }

    #[test]
    fn classify_is_swap_invariant() {
        for p in [0.0, 0.1, 0.25, 0.4, 0.5] {
            let rho = bell_mixture(p).unwrap();
            assert_eq!(
                classify(&rho).unwrap().category,
                classify(&swap_subsystems(&rho)).unwrap().category
            );
        }
    }

    #[test]
    fn larger_dims_skip_eigenbasis_test() {
        let rho = classically_correlated(&[0.25, 0.25, 0.25, 0.25]).unwrap();
        let c = classify(&rho).unwrap();
        assert_eq!(c.evidence.product_eigenbasis, None);
        assert_eq!(c.category, Category::MixedPPT);
    }

    #[test]
    fn family_degenerate_points() {
        let fam = BellMixtureFamily;
        assert_eq!(fam.formation_points(0.0).unwrap().len(), 1);
        assert_eq!(fam.formation_points(0.5).unwrap().len(), 2);
        assert!(fam.formation_points(0.7).is_err());
    }
}
