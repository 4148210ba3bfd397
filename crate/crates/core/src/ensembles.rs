//! Decompositions of a state into weighted components, local-orthogonality
//! certification, and the decomposition-based bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curves::{PointKind, ProtocolPoint};
use crate::error::{Error, Result};
use crate::matrix::{
    hermitian_eigensystem, inner, norm, partial_trace, schmidt_coefficients, tensor_vec,
    validate_density, ComplexMatrix, DensityOperator, PureState, Subsystem, C64, ZERO,
};
use crate::measures::{eof_2q, pure_state_entanglement, von_neumann_entropy};
use crate::tolerance::Tolerances;

/// State carried by one ensemble component.
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentState {
    Pure(PureState),
    /// A mixed component, optionally with its own pure-state decomposition.
    Mixed {
        state: DensityOperator,
        decomposition: Option<Vec<(f64, PureState)>>,
    },
}

impl ComponentState {
    pub fn mixed(state: DensityOperator) -> Self {
        ComponentState::Mixed {
            state,
            decomposition: None,
        }
    }

    /// A mixed component given through its pure-state decomposition.
    pub fn from_pure_mixture(parts: Vec<(f64, PureState)>) -> Result<Self> {
        let sub = Ensemble::new(
            parts
                .iter()
                .map(|(w, psi)| Component::new(*w, ComponentState::Pure(psi.clone())))
                .collect(),
        )?;
        Ok(ComponentState::Mixed {
            state: ensemble_average(&sub)?,
            decomposition: Some(parts),
        })
    }

    pub fn density(&self) -> DensityOperator {
        match self {
            ComponentState::Pure(psi) => psi.projector(),
            ComponentState::Mixed { state, .. } => state.clone(),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            ComponentState::Pure(psi) => psi.dims(),
            ComponentState::Mixed { state, .. } => state.dims(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub state: ComponentState,
}

impl Component {
    pub fn new(weight: f64, state: ComponentState) -> Self {
        Self { weight, state }
    }
}

/// Weighted decomposition `{p_i, ρ_i}` on a common pair of dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    dim_a: usize,
    dim_b: usize,
    components: Vec<Component>,
}

impl Ensemble {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let first = components
            .first()
            .ok_or_else(|| Error::Domain("ensemble has no components".into()))?;
        let (dim_a, dim_b) = first.state.dims();
        for c in &components {
            let (da, db) = c.state.dims();
            if (da, db) != (dim_a, dim_b) {
                return Err(Error::DimensionMismatch {
                    expected: dim_a * dim_b,
                    found: da * db,
                });
            }
            if !c.weight.is_finite() || c.weight < 0.0 {
                return Err(Error::Domain(format!("negative component weight {}", c.weight)));
            }
            if let ComponentState::Mixed {
                state,
                decomposition: Some(parts),
            } = &c.state
            {
                check_decomposition(state, parts)?;
            }
        }
        let sum: f64 = components.iter().map(|c| c.weight).sum();
        if (sum - 1.0).abs() > tol.probability {
            return Err(Error::NotNormalized {
                residual: (sum - 1.0).abs(),
            });
        }
        Ok(Self {
            dim_a,
            dim_b,
            components,
        })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    /// Components with nonzero weight, paired with their original index.
    fn active(&self) -> impl Iterator<Item = (usize, &Component)> {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| c.weight > 0.0)
    }
}

fn check_decomposition(state: &DensityOperator, parts: &[(f64, PureState)]) -> Result<()> {
    let tol = Tolerances::DEFAULT;
    let d = state.dim();
    let mut sum = ComplexMatrix::zeros(d, d);
    let mut weight = 0.0;
    for (w, psi) in parts {
        if psi.dims() != state.dims() {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: psi.dims().0 * psi.dims().1,
            });
        }
        if w.is_nan() || *w < 0.0 {
            return Err(Error::Domain(format!("negative sub-component weight {w}")));
        }
        sum = sum.add(&psi.projector().matrix().scale_real(*w))?;
        weight += w;
    }
    if (weight - 1.0).abs() > tol.probability {
        return Err(Error::NotNormalized {
            residual: (weight - 1.0).abs(),
        });
    }
    let residual = sum.max_abs_diff(state.matrix());
    if residual > tol.probability {
        return Err(Error::Domain(format!(
            "sub-decomposition does not reproduce its component (residual {residual:e})"
        )));
    }
    Ok(())
}

/// `Σ p_i ρ_i`, validated.
pub fn ensemble_average(e: &Ensemble) -> Result<DensityOperator> {
    let d = e.dim_a * e.dim_b;
    let mut sum = ComplexMatrix::zeros(d, d);
    for c in &e.components {
        sum = sum.add(&c.state.density().matrix().scale_real(c.weight))?;
    }
    validate_density(sum, e.dim_a, e.dim_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orthogonality {
    /// Reduced components on this side have pairwise orthogonal supports.
    Orthogonal(Subsystem),
    /// The sufficient condition failed on both sides; LOCC-orthogonality is
    /// not decided.
    NotOrthogonal,
}

impl Orthogonality {
    pub fn is_certified(self) -> bool {
        matches!(self, Orthogonality::Orthogonal(_))
    }
}

/// Projector onto the span of eigenvectors with eigenvalue above the support
/// cutoff.
fn support_projector(rho: &DensityOperator) -> Result<ComplexMatrix> {
    let es = rho.eigensystem()?;
    let cutoff = Tolerances::DEFAULT.support;
    Ok(es.map_values(|x| if x > cutoff { 1.0 } else { 0.0 }))
}

fn supports_pairwise_orthogonal(states: &[DensityOperator], side: Subsystem) -> Result<bool> {
    let projectors = states
        .iter()
        .map(|s| support_projector(&partial_trace(s, side)))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..projectors.len() {
        for j in (i + 1)..projectors.len() {
            if projectors[i].matmul(&projectors[j])?.frobenius_norm() > Tolerances::DEFAULT.overlap {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Sufficient test for LOCC-orthogonality: on one side, the reduced states of
/// all (nonzero-weight) components have pairwise orthogonal supports.
pub fn local_orthogonality_check(e: &Ensemble) -> Orthogonality {
    let states: Vec<DensityOperator> = e.active().map(|(_, c)| c.state.density()).collect();
    orthogonality_of(&states)
}

fn orthogonality_of(states: &[DensityOperator]) -> Orthogonality {
    for side in [Subsystem::A, Subsystem::B] {
        if supports_pairwise_orthogonal(states, side).unwrap_or(false) {
            return Orthogonality::Orthogonal(side);
        }
    }
    Orthogonality::NotOrthogonal
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProductEigenbasis {
    HasProductEigenbasis,
    No,
    Inconclusive,
}

const PRODUCT_SEARCH_RESTARTS: usize = 32;
const PRODUCT_SEARCH_CONVERGENCE: f64 = 1e-12;
const PRODUCT_SEARCH_MAX_ITERS: usize = 1000;
const PRODUCT_SEARCH_SEED: u64 = 0x005e_ed0f_90d5;

/// Decides whether a two-qubit state has an eigenbasis of product vectors.
///
/// Nondegenerate eigenvectors must themselves be product. Each degenerate
/// eigenspace is searched greedily for a product basis, maximizing the
/// overlap of a product vector with the space by alternating local updates.
pub fn product_eigenbasis_check(rho: &DensityOperator) -> Result<ProductEigenbasis> {
    if !rho.is_two_qubit() {
        return Err(Error::WrongDimensions {
            what: "product eigenbasis check",
            need_a: 2,
            need_b: 2,
            dim_a: rho.dim_a(),
            dim_b: rho.dim_b(),
        });
    }
    let tol = Tolerances::DEFAULT;
    let es = rho.eigensystem()?;
    let (da, db) = rho.dims();
    let d = da * db;

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..d {
        match groups.last_mut() {
            Some(g) if es.values[k] - es.values[*g.last().unwrap()] <= tol.schmidt => g.push(k),
            _ => groups.push(vec![k]),
        }
    }

    // any nondegenerate entangled eigenvector settles the question
    for g in groups.iter().filter(|g| g.len() == 1) {
        let psi = PureState::normalized(es.vector(g[0]), da, db)?;
        if schmidt_coefficients(&psi)[1] > tol.schmidt {
            return Ok(ProductEigenbasis::No);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PRODUCT_SEARCH_SEED);
    for g in groups.iter().filter(|g| g.len() > 1) {
        if g.len() == d {
            // the whole space: the computational basis works
            continue;
        }
        let basis: Vec<Vec<C64>> = g.iter().map(|&k| es.vector(k)).collect();
        let found = (0..PRODUCT_SEARCH_RESTARTS)
            .any(|_| greedy_product_basis(basis.clone(), da, db, &mut rng));
        if !found {
            return Ok(ProductEigenbasis::Inconclusive);
        }
    }
    Ok(ProductEigenbasis::HasProductEigenbasis)
}

/// Peels product vectors off the subspace one at a time; true when every
/// step finds one within the convergence threshold.
fn greedy_product_basis(
    mut basis: Vec<Vec<C64>>,
    da: usize,
    db: usize,
    rng: &mut ChaCha8Rng,
) -> bool {
    while !basis.is_empty() {
        let (overlap, product) = maximize_product_overlap(&basis, da, db, rng);
        if 1.0 - overlap > PRODUCT_SEARCH_CONVERGENCE {
            return false;
        }
        basis = orthogonal_complement_within(&basis, &product);
    }
    true
}

/// Alternating maximization of `Σ_j |⟨a⊗b|u_j⟩|²` over unit `a`, `b`.
fn maximize_product_overlap(
    basis: &[Vec<C64>],
    da: usize,
    db: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, Vec<C64>) {
    let random_unit = |rng: &mut ChaCha8Rng, n: usize| {
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let s = norm(&v);
        v.into_iter().map(|z| z / s).collect::<Vec<_>>()
    };
    let mut b = random_unit(rng, db);
    let mut a = vec![ZERO; da];
    let mut best = -1.0;
    for _ in 0..PRODUCT_SEARCH_MAX_ITERS {
        // fix b: maximize a† (Σ w_j w_j†) a with w_j = (I ⊗ ⟨b|) u_j
        let mut gram = ComplexMatrix::zeros(da, da);
        for u in basis {
            let w: Vec<C64> = (0..da)
                .map(|i| (0..db).map(|l| b[l].conj() * u[i * db + l]).sum())
                .collect();
            gram = gram.add(&ComplexMatrix::outer(&w, &w)).expect("same shape");
        }
        a = top_eigenvector(&gram);
        let mut gram = ComplexMatrix::zeros(db, db);
        for u in basis {
            let w: Vec<C64> = (0..db)
                .map(|l| (0..da).map(|i| a[i].conj() * u[i * db + l]).sum())
                .collect();
            gram = gram.add(&ComplexMatrix::outer(&w, &w)).expect("same shape");
        }
        b = top_eigenvector(&gram);
        let product = tensor_vec(&a, &b);
        let overlap: f64 = basis.iter().map(|u| inner(&product, u).norm_sqr()).sum();
        let improved = overlap - best;
        best = overlap;
        if improved.abs() < 1e-15 || 1.0 - overlap < 1e-15 {
            break;
        }
    }
    (best, tensor_vec(&a, &b))
}

fn top_eigenvector(m: &ComplexMatrix) -> Vec<C64> {
    let es = hermitian_eigensystem(m).expect("gram matrices are Hermitian");
    es.vector(es.values.len() - 1)
}

/// Orthonormal basis of `span(basis) ⊖ P v`.
fn orthogonal_complement_within(basis: &[Vec<C64>], v: &[C64]) -> Vec<Vec<C64>> {
    let mut projected = vec![ZERO; v.len()];
    for u in basis {
        let c = inner(u, v);
        for (p, x) in projected.iter_mut().zip(u) {
            *p += c * x;
        }
    }
    let s = norm(&projected);
    let direction: Vec<C64> = projected.iter().map(|z| z / s).collect();
    let mut out: Vec<Vec<C64>> = Vec::new();
    for u in basis {
        let mut w = u.clone();
        for q in std::iter::once(&direction).chain(out.iter()) {
            let c = inner(q, &w);
            for (x, y) in w.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
        let n = norm(&w);
        if n > 1e-8 {
            out.push(w.into_iter().map(|z| z / n).collect());
        }
        if out.len() + 1 == basis.len() {
            break;
        }
    }
    out
}

/// Entanglement cost of one component, when a rule applies.
fn component_cost(state: &ComponentState) -> Result<Option<f64>> {
    match state {
        ComponentState::Pure(psi) => Ok(Some(pure_state_entanglement(psi)?)),
        ComponentState::Mixed {
            state,
            decomposition,
        } => {
            if let Some(parts) = decomposition {
                if let Some(cost) = locally_orthogonal_pure_cost(parts)? {
                    return Ok(Some(cost));
                }
            }
            if state.is_two_qubit() && is_bell_diagonal(state)? {
                return Ok(Some(eof_2q(state)?));
            }
            // the spectral decomposition is a pure-state decomposition too
            let es = state.eigensystem()?;
            let (da, db) = state.dims();
            let parts = es
                .values
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > Tolerances::DEFAULT.support)
                .map(|(k, &w)| Ok((w, PureState::normalized(es.vector(k), da, db)?)))
                .collect::<Result<Vec<_>>>()?;
            locally_orthogonal_pure_cost(&parts)
        }
    }
}

fn locally_orthogonal_pure_cost(parts: &[(f64, PureState)]) -> Result<Option<f64>> {
    let states: Vec<DensityOperator> = parts
        .iter()
        .filter(|(w, _)| *w > 0.0)
        .map(|(_, psi)| psi.projector())
        .collect();
    if !orthogonality_of(&states).is_certified() {
        return Ok(None);
    }
    let mut cost = 0.0;
    for (w, psi) in parts {
        cost += w * pure_state_entanglement(psi)?;
    }
    Ok(Some(cost))
}

/// Diagonal in the Bell basis to within the overlap tolerance.
pub fn is_bell_diagonal(rho: &DensityOperator) -> Result<bool> {
    if !rho.is_two_qubit() {
        return Ok(false);
    }
    let h = 1.0 / 2f64.sqrt();
    let (z, p, m) = (0.0, h, -h);
    #[rustfmt::skip]
    let bell = ComplexMatrix::from_real(4, 4, &[
        p, p, z, z,
        z, z, p, p,
        z, z, p, m,
        m, p, z, z,
    ])?;
    let rotated = bell.adjoint().matmul(rho.matrix())?.matmul(&bell)?;
    let mut off: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                off = off.max(rotated[(i, j)].norm());
            }
        }
    }
    Ok(off <= Tolerances::DEFAULT.overlap)
}

/// Resource point of the protocol that forms each component separately.
///
/// `Q = Σ p_i E_c(ρ_i)`. The instruction set can be reset only when the
/// whole ensemble is certified locally orthogonal, in which case the
/// information cost drops to `I_f = n - S(Σ p_i ρ_i)`; otherwise
/// `I_f = n - Σ p_i S(ρ_i)`.
pub fn formation_point(e: &Ensemble) -> Result<ProtocolPoint> {
    let average = ensemble_average(e)?;
    let n = average.qubit_count()?;
    let mut q = 0.0;
    let mut mean_entropy = 0.0;
    for (index, c) in e.active() {
        let cost = component_cost(&c.state)?.ok_or(Error::ComponentCostUnknown { index })?;
        q += c.weight * cost;
        mean_entropy += c.weight * von_neumann_entropy(&c.state.density())?;
    }
    let i = if local_orthogonality_check(e).is_certified() {
        n - von_neumann_entropy(&average)?
    } else {
        n - mean_entropy
    };
    Ok(ProtocolPoint::new(
        q.max(0.0),
        i.max(0.0),
        PointKind::FormationIntermediate,
        "decomposition",
    ))
}

fn require_certified(e: &Ensemble) -> Result<()> {
    if local_orthogonality_check(e).is_certified() {
        Ok(())
    } else {
        Err(Error::NotCertifiedOrthogonal)
    }
}

/// `min_X Σ p_i S(ρ_X^i)` for a certified locally orthogonal decomposition.
pub fn er_upper_bound(e: &Ensemble) -> Result<f64> {
    require_certified(e)?;
    let mut per_side = [0.0, 0.0];
    for (_, c) in e.active() {
        let rho = c.state.density();
        per_side[0] += c.weight * von_neumann_entropy(&partial_trace(&rho, Subsystem::A))?;
        per_side[1] += c.weight * von_neumann_entropy(&partial_trace(&rho, Subsystem::B))?;
    }
    Ok(per_side[0].min(per_side[1]))
}

/// `Σ p_i S(ρ_i)` for a certified locally orthogonal decomposition; never
/// exceeds `S(Σ p_i ρ_i)`.
pub fn delta_f_upper_bound(e: &Ensemble) -> Result<f64> {
    require_certified(e)?;
    let mut bound = 0.0;
    for (_, c) in e.active() {
        bound += c.weight * von_neumann_entropy(&c.state.density())?;
    }
    let limit = von_neumann_entropy(&ensemble_average(e)?)?;
    let excess = bound - limit;
    if excess > Tolerances::DEFAULT.hull_slack {
        return Err(Error::BoundChainViolated {
            bound: "sum p_i S(rho_i)",
            limit: "S(rho)",
            excess,
        });
    }
    Ok(bound)
}

/// `(Δ_f, E_r)` for a state with no product eigenbasis, under the assumption
/// that the decomposition bounds are tight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumedValues {
    pub delta_f: f64,
    pub e_r: f64,
    pub assumption_dependent: bool,
}

pub fn assumed_exact_values(rho: &DensityOperator) -> Result<AssumedValues> {
    if rho.purity() >= 1.0 - Tolerances::DEFAULT.purity {
        return Err(Error::NotApplicable(
            "pure states have zero surplus; use the formation point".into(),
        ));
    }
    match product_eigenbasis_check(rho)? {
        ProductEigenbasis::No => {
            let s = von_neumann_entropy(rho)?;
            let sa = von_neumann_entropy(&partial_trace(rho, Subsystem::A))?;
            let sb = von_neumann_entropy(&partial_trace(rho, Subsystem::B))?;
            Ok(AssumedValues {
                delta_f: s,
                e_r: sa.min(sb),
                assumption_dependent: true,
            })
        }
        other => Err(Error::NotApplicable(format!(
            "product eigenbasis check returned {other:?}"
        ))),
    }
}
