//! Protocol points, piecewise-linear envelopes, susceptibility and the
//! family phase scan.
//!
//! Formation resources are stored as nonnegative magnitudes: `q` qubits of
//! quantum communication and `i` bits of information consumed. Negating them
//! into the lower-left quadrant is left to rendering.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    FormationEndpointEc,
    FormationEndpointEr,
    FormationIntermediate,
    ExtractionZero,
    ExtractionDistill,
    ExtractionReversible,
    Chord,
    Bound,
}

impl PointKind {
    pub fn curve_kind(self) -> Option<CurveKind> {
        match self {
            PointKind::FormationEndpointEc
            | PointKind::FormationEndpointEr
            | PointKind::FormationIntermediate => Some(CurveKind::Formation),
            PointKind::ExtractionZero
            | PointKind::ExtractionDistill
            | PointKind::ExtractionReversible => Some(CurveKind::Extraction),
            PointKind::Chord | PointKind::Bound => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::FormationEndpointEc => "formation_endpoint_ec",
            PointKind::FormationEndpointEr => "formation_endpoint_er",
            PointKind::FormationIntermediate => "formation_intermediate",
            PointKind::ExtractionZero => "extraction_zero",
            PointKind::ExtractionDistill => "extraction_distill",
            PointKind::ExtractionReversible => "extraction_reversible",
            PointKind::Chord => "chord",
            PointKind::Bound => "bound",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            PointKind::FormationEndpointEc,
            PointKind::FormationEndpointEr,
            PointKind::FormationIntermediate,
            PointKind::ExtractionZero,
            PointKind::ExtractionDistill,
            PointKind::ExtractionReversible,
            PointKind::Chord,
            PointKind::Bound,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Formation,
    Extraction,
}

/// An achievable `(Q, I)` resource pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolPoint {
    pub q: f64,
    pub i: f64,
    pub kind: PointKind,
    pub label: String,
}

impl ProtocolPoint {
    pub fn new(q: f64, i: f64, kind: PointKind, label: impl Into<String>) -> Self {
        Self {
            q,
            i,
            kind,
            label: label.into(),
        }
    }

    fn vertex(&self) -> Vertex {
        Vertex { q: self.q, i: self.i }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vertex {
    pub q: f64,
    pub i: f64,
}

/// Protocol points plus the piecewise-linear envelope through them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InformationCurve {
    pub kind: CurveKind,
    pub points: Vec<ProtocolPoint>,
    pub envelope: Vec<Vertex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `dI/dQ` on a segment and its reciprocal `χ = dQ/dI`; `χ` is `±inf` on a
/// flat segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Susceptibility {
    pub slope: f64,
    pub chi: f64,
}

impl Susceptibility {
    fn from_slope(slope: f64) -> Self {
        Self {
            slope,
            chi: 1.0 / slope,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.chi.is_infinite()
    }
}

impl InformationCurve {
    pub fn domain(&self) -> (f64, f64) {
        let first = self.envelope.first().map_or(0.0, |v| v.q);
        let last = self.envelope.last().map_or(0.0, |v| v.q);
        (first, last)
    }

    pub fn is_degenerate(&self) -> bool {
        self.envelope.len() < 2
    }

    pub fn segment_slopes(&self) -> Vec<f64> {
        self.envelope
            .windows(2)
            .map(|w| (w[1].i - w[0].i) / (w[1].q - w[0].q))
            .collect()
    }

    /// Index of the segment with the largest `|dI/dQ|` (first on ties).
    pub fn steepest_segment(&self) -> Option<usize> {
        let slopes = self.segment_slopes();
        let mut best: Option<(usize, f64)> = None;
        for (k, s) in slopes.iter().enumerate() {
            if best.is_none_or(|(_, b)| s.abs() > b) {
                best = Some((k, s.abs()));
            }
        }
        best.map(|(k, _)| k)
    }
}

/// The two extreme formation points `(E_c, I + Δ_f)` and `(E_r, I)`.
pub fn formation_endpoints(
    info: f64,
    delta_f: f64,
    e_c: f64,
    e_r: f64,
) -> Result<(ProtocolPoint, ProtocolPoint)> {
    for (name, x) in [("I", info), ("Δ_f", delta_f), ("E_c", e_c), ("E_r", e_r)] {
        if !x.is_finite() {
            return Err(Error::Domain(format!("{name} is not finite")));
        }
    }
    if e_c > e_r + 1e-12 {
        return Err(Error::OrderingViolation { e_c, e_r });
    }
    if delta_f < -1e-12 || e_c < -1e-12 || info < -1e-12 {
        return Err(Error::Domain(format!(
            "formation resources must be nonnegative (I={info}, Δ_f={delta_f}, E_c={e_c})"
        )));
    }
    Ok((
        ProtocolPoint::new(e_c, info + delta_f, PointKind::FormationEndpointEc, "E_c"),
        ProtocolPoint::new(e_r, info, PointKind::FormationEndpointEr, "E_r"),
    ))
}

fn same_curve(a: PointKind, b: PointKind) -> bool {
    match (a.curve_kind(), b.curve_kind()) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    }
}

/// Point of the protocol that runs `p2` with probability `lambda` and `p1`
/// otherwise.
pub fn chord_mix(p1: &ProtocolPoint, p2: &ProtocolPoint, lambda: f64) -> Result<ProtocolPoint> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("mixing weight {lambda} outside [0, 1]")));
    }
    if !same_curve(p1.kind, p2.kind) {
        return Err(Error::MixedCurveKinds);
    }
    Ok(ProtocolPoint::new(
        (1.0 - lambda) * p1.q + lambda * p2.q,
        (1.0 - lambda) * p1.i + lambda * p2.i,
        PointKind::Chord,
        format!("{}~{}", p1.label, p2.label),
    ))
}

fn infer_kind(points: &[ProtocolPoint]) -> Result<CurveKind> {
    let mut kind = None;
    for p in points {
        match (kind, p.kind.curve_kind()) {
            (_, None) => {}
            (None, Some(k)) => kind = Some(k),
            (Some(a), Some(b)) if a != b => return Err(Error::MixedCurveKinds),
            _ => {}
        }
    }
    Ok(kind.unwrap_or(CurveKind::Formation))
}

/// `(a - o) × (b - o)`; positive for a counter-clockwise turn.
fn cross(o: Vertex, a: Vertex, b: Vertex) -> f64 {
    (a.q - o.q) * (b.i - o.i) - (a.i - o.i) * (b.q - o.q)
}

/// Lower convex hull over `q` of the supplied points.
///
/// Probabilistic mixing makes every chord achievable, so the hull is the
/// boundary of the achievable region. Collinear vertices are dropped. For
/// formation curves any rising tail is flattened, since surplus quantum
/// communication can always be left unused.
pub fn build_lower_envelope(points: &[ProtocolPoint]) -> Result<InformationCurve> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            need: 2,
            got: points.len(),
        });
    }
    if let Some(p) = points.iter().find(|p| !p.q.is_finite() || !p.i.is_finite()) {
        return Err(Error::Domain(format!("point '{}' is not finite", p.label)));
    }
    let kind = infer_kind(points)?;
    let mut sorted: Vec<ProtocolPoint> = points.to_vec();
    sorted.sort_by(|a, b| a.q.total_cmp(&b.q).then(a.i.total_cmp(&b.i)));

    let mut hull: Vec<Vertex> = Vec::new();
    for v in sorted.iter().map(ProtocolPoint::vertex) {
        if hull.last().is_some_and(|last| last.q == v.q) {
            // same q, higher i: dominated
            continue;
        }
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], v) <= 0.0 {
            hull.pop();
        }
        hull.push(v);
    }

    if kind == CurveKind::Formation {
        let (argmin, min_i) = hull
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(k, m), (j, v)| if v.i < m { (j, v.i) } else { (k, m) });
        if argmin + 1 < hull.len() {
            let last_q = hull[hull.len() - 1].q;
            hull.truncate(argmin + 1);
            hull.push(Vertex { q: last_q, i: min_i });
        }
    }

    Ok(InformationCurve {
        kind,
        points: sorted,
        envelope: hull,
    })
}

/// Like [`build_lower_envelope`] but a lone point gives a single-vertex
/// curve.
pub fn curve_from_points(points: Vec<ProtocolPoint>) -> Result<InformationCurve> {
    match points.as_slice() {
        [only] => {
            let kind = only.kind.curve_kind().unwrap_or(CurveKind::Formation);
            Ok(InformationCurve {
                kind,
                envelope: vec![only.vertex()],
                points,
            })
        }
        _ => build_lower_envelope(&points),
    }
}

/// Linear interpolation on the envelope.
pub fn curve_value(c: &InformationCurve, q: f64) -> Result<f64> {
    let (lo, hi) = c.domain();
    if !(q >= lo && q <= hi) {
        return Err(Error::OutOfRange { q, lo, hi });
    }
    if let Some(v) = c.envelope.iter().find(|v| v.q == q) {
        return Ok(v.i);
    }
    let k = c
        .envelope
        .windows(2)
        .position(|w| q >= w[0].q && q <= w[1].q)
        .ok_or(Error::OutOfRange { q, lo, hi })?;
    let (a, b) = (c.envelope[k], c.envelope[k + 1]);
    Ok(a.i + (q - a.q) / (b.q - a.q) * (b.i - a.i))
}

/// Pure-state extraction line `I_l(Q) = n - e - Q` on `[-e, e]`.
pub fn pure_extraction_line(n: f64, e: f64) -> Result<InformationCurve> {
    if !n.is_finite() || !e.is_finite() || e < 0.0 || e > n / 2.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "pure-state entanglement {e} outside [0, n/2] for n={n}"
        )));
    }
    let points = if e == 0.0 {
        vec![ProtocolPoint::new(0.0, n, PointKind::ExtractionZero, "I_l(0)")]
    } else {
        vec![
            ProtocolPoint::new(-e, n, PointKind::ExtractionReversible, "I_l(-E_r)"),
            ProtocolPoint::new(0.0, n - e, PointKind::ExtractionZero, "I_l(0)"),
            ProtocolPoint::new(e, n - 2.0 * e, PointKind::ExtractionDistill, "I_g"),
        ]
    };
    let envelope = points.iter().map(ProtocolPoint::vertex).collect();
    Ok(InformationCurve {
        kind: CurveKind::Extraction,
        points,
        envelope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Complementarity {
    Satisfied(f64),
    Violated(f64),
}

/// Checks `I_l(Q) + Q ≤ I_l(0)` for `Q ≥ 0`. `Satisfied` carries the slack
/// `I_l(0) - I_l(Q) - Q` (which may be negative by at most the hull
/// tolerance); `Violated` carries the excess.
pub fn complementarity_check(i_l_at_q: f64, q: f64, i_l_zero: f64) -> Result<Complementarity> {
    if q.is_nan() || q < 0.0 {
        return Err(Error::Domain(format!(
            "complementarity bound holds only for Q >= 0, got {q}"
        )));
    }
    let slack = i_l_zero - (i_l_at_q + q);
    if slack >= -Tolerances::DEFAULT.hull_slack {
        Ok(Complementarity::Satisfied(slack))
    } else {
        Ok(Complementarity::Violated(-slack))
    }
}

/// Segment slope and susceptibility at `q`. At an interior vertex the value
/// is two-sided and `side` must pick one; at the domain ends the single
/// adjacent segment is used.
pub fn chi(c: &InformationCurve, q: f64, side: Option<Side>) -> Result<Susceptibility> {
    if c.is_degenerate() {
        return Err(Error::DegenerateCurve);
    }
    let (lo, hi) = c.domain();
    if !(q >= lo && q <= hi) {
        return Err(Error::OutOfRange { q, lo, hi });
    }
    let slopes = c.segment_slopes();
    let last = slopes.len() - 1;
    let tol = Tolerances::DEFAULT.vertex;
    if let Some(k) = c.envelope.iter().position(|v| (v.q - q).abs() <= tol) {
        let segment = if k == 0 {
            0
        } else if k == c.envelope.len() - 1 {
            last
        } else {
            match side {
                Some(Side::Left) => k - 1,
                Some(Side::Right) => k,
                None => return Err(Error::VertexNeedsSide { q }),
            }
        };
        return Ok(Susceptibility::from_slope(slopes[segment]));
    }
    let k = c
        .envelope
        .windows(2)
        .position(|w| q > w[0].q && q < w[1].q)
        .ok_or(Error::OutOfRange { q, lo, hi })?;
    Ok(Susceptibility::from_slope(slopes[k]))
}

/// A one-parameter state family that yields formation protocol points.
pub trait FormationFamily: Sync {
    fn domain(&self) -> (f64, f64);

    fn formation_points(&self, p: f64) -> Result<Vec<ProtocolPoint>>;
}

/// The same protocol points for every parameter value.
#[derive(Debug, Clone)]
pub struct ConstantFamily {
    pub points: Vec<ProtocolPoint>,
    pub domain: (f64, f64),
}

impl FormationFamily for ConstantFamily {
    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn formation_points(&self, _p: f64) -> Result<Vec<ProtocolPoint>> {
        Ok(self.points.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    /// The envelope segment with the largest `|dI/dQ|`, sampled at its midpoint.
    SteepestSegment,
    /// A fixed `Q`; at a vertex the right-hand segment is used.
    FixedQ(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// `|slope|` at the last sample must exceed this for a divergence.
    pub divergence_threshold: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            divergence_threshold: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSample {
    pub p: f64,
    pub q_at: f64,
    pub slope: f64,
    pub chi: f64,
    /// The envelope is a single point or flat at the probe: no finite `χ`.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseScanResult {
    pub samples: Vec<PhaseSample>,
    pub divergence_flag: bool,
}

/// Uniform grid of `steps` points from `lo` to `hi`, endpoints exact.
pub fn uniform_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|k| {
            let t = k as f64 / (steps - 1) as f64;
            lo * (1.0 - t) + hi * t
        })
        .collect()
}

fn scan_one(family: &dyn FormationFamily, p: f64, probe: Probe) -> Result<PhaseSample> {
    let curve = curve_from_points(family.formation_points(p)?)?;
    if curve.is_degenerate() {
        let q_at = curve.envelope[0].q;
        return Ok(PhaseSample {
            p,
            q_at,
            slope: 0.0,
            chi: f64::INFINITY,
            degenerate: true,
        });
    }
    let (q_at, s) = match probe {
        Probe::SteepestSegment => {
            let k = curve.steepest_segment().expect("non-degenerate curve");
            let q_at = 0.5 * (curve.envelope[k].q + curve.envelope[k + 1].q);
            (q_at, Susceptibility::from_slope(curve.segment_slopes()[k]))
        }
        Probe::FixedQ(q) => (q, chi(&curve, q, Some(Side::Right))?),
    };
    Ok(PhaseSample {
        p,
        q_at,
        slope: s.slope,
        chi: s.chi,
        degenerate: s.slope == 0.0,
    })
}

/// Builds the formation envelope at every grid parameter and records the
/// slope and `χ` at the probe.
///
/// The divergence flag is raised when `|slope|` at the last sample exceeds
/// the threshold and grows strictly over the final quarter of the grid.
pub fn phase_scan(
    family: &dyn FormationFamily,
    grid: &[f64],
    probe: Probe,
    config: ScanConfig,
) -> Result<PhaseScanResult> {
    if grid.is_empty() {
        return Err(Error::InsufficientPoints { need: 1, got: 0 });
    }
    let (lo, hi) = family.domain();
    if let Some(&p) = grid.iter().find(|&&p| !(p >= lo && p <= hi)) {
        return Err(Error::Domain(format!(
            "scan parameter {p} outside family domain [{lo}, {hi}]"
        )));
    }
    let mut samples = grid
        .par_iter()
        .map(|&p| scan_one(family, p, probe))
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| a.p.total_cmp(&b.p));

    let n = samples.len();
    let tail = n.div_ceil(4).max(2).min(n);
    let growing = samples[n - tail..]
        .windows(2)
        .all(|w| w[1].slope.abs() > w[0].slope.abs());
    let divergence_flag = samples[n - 1].slope.abs() > config.divergence_threshold && growing;
    Ok(PhaseScanResult {
        samples,
        divergence_flag,
    })
}
