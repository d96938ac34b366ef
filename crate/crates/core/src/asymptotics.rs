//! Sequence side against indicator side: limsup of norms, inverse norms,
//! condition numbers and pseudospectra of `Aₙ`, convergence verdicts over the
//! residue classes of `n`, and attribution of spectral pollution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{FsaError, Result};
use crate::expression::{FSExpression, SectionIndex};
use crate::indicators::{stab_composed, Indicator, IndicatorKind, IndicatorSet};
use crate::matrix::FiniteMatrix;
use crate::operator::Exponent;
use crate::parallel::{map_slice, Parallelism};
use crate::scalar::{ExtReal, C64};
use crate::spectral::estimators::{indicator_inv_norm, indicator_norm, EstimateKind, MuEstimator, NormEstimate};
use crate::spectral::norms::{inv_norm, kappa, op_norm};
use crate::spectral::pseudo::{
    pseudo_grid_indicator, pseudo_grid_matrix, GridBox, PseudospectrumGrid, Resolution,
};
use crate::spectral::sets::{hausdorff_distance, set_common, set_union, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuantityKind {
    Norm,
    InvNorm,
    /// Derived from the other two; never compared set-wise.
    Kappa,
    PseudoSet { epsilon: f64 },
}

/// Inclusive range of section indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NRange {
    pub start: u64,
    pub end: u64,
}

impl NRange {
    pub fn new(start: u64, end: u64) -> Result<Self> {
        let r = Self { start, end };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start == 0 {
            return Err(FsaError::SectionIndex(0));
        }
        if self.start > self.end {
            return Err(FsaError::EmptyRange { start: self.start, end: self.end });
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<u64> {
        (self.start..=self.end).collect()
    }

    /// The last `⌈len/2⌉` indices, standing in for "all large n".
    pub fn tail(&self) -> Vec<u64> {
        let len = self.end - self.start + 1;
        (self.end + 1 - len.div_ceil(2)..=self.end).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Relative tolerance for estimator convergence and for comparing values.
    pub tol: f64,
    /// Largest indicator window.
    pub m_max: usize,
    pub parallelism: Parallelism,
}

impl Default for Settings {
    fn default() -> Self {
        Self { tol: 1e-9, m_max: 200, parallelism: Parallelism::Sequential }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "box")]
    pub bbox: GridBox,
    pub resolution: Resolution,
    /// Window size for the indicator estimators.
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Convergent,
    /// Two residues of `n` whose limits disagree.
    Divergent { witnesses: [u64; 2], gap: ExtReal },
    Inconclusive { reason: String, tolerance: f64 },
}

impl Verdict {
    pub fn is_convergent(&self) -> bool {
        matches!(self, Verdict::Convergent)
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Verdict::Divergent { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorEstimate {
    pub label: String,
    pub kind: IndicatorKind,
    pub residues: Option<Vec<u64>>,
    pub estimate: NormEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaBounds {
    /// `max κ(B)`, a max over the computed finite set of indicators.
    pub lower: ExtReal,
    /// `max_r (max_{B∈Stab_r} ‖B‖)(max_{B∈Stab_r} ‖B⁻¹‖)`.
    pub per_residue: ExtReal,
    /// `(max ‖B‖)(max ‖B⁻¹‖)`.
    pub upper: ExtReal,
    pub lower_is_strict: bool,
    pub upper_is_strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub quantity: QuantityKind,
    pub n_range: NRange,
    pub modulus: u64,
    pub sequence_samples: BTreeMap<u64, ExtReal>,
    /// Max over the tail of the range.
    pub sequence_limsup: ExtReal,
    /// Min over the tail of the range.
    pub sequence_liminf: ExtReal,
    pub indicator_side: Vec<IndicatorEstimate>,
    pub indicator_max: Option<ExtReal>,
    pub per_residue: BTreeMap<u64, ExtReal>,
    pub indicator_liminf: Option<ExtReal>,
    pub discrepancy: Option<ExtReal>,
    pub verdict: Verdict,
    /// For inverse norms: whether every indicator is invertible.
    pub stable: Option<bool>,
    pub kappa: Option<KappaBounds>,
}

/// Indicator-side values of a scalar quantity.
struct ScalarSide {
    estimates: Vec<IndicatorEstimate>,
    per_residue: BTreeMap<u64, ExtReal>,
    /// Whether every estimate entering residue `r` converged.
    converged: BTreeMap<u64, bool>,
}

impl ScalarSide {
    fn max(&self) -> Option<ExtReal> {
        ExtReal::fold_max(self.per_residue.values().copied())
    }

    fn min(&self) -> Option<ExtReal> {
        self.per_residue.values().copied().reduce(ExtReal::min)
    }
}

fn estimate_of(ind: &Indicator, estimate: NormEstimate) -> IndicatorEstimate {
    IndicatorEstimate { label: ind.label(), kind: ind.kind, residues: ind.residues.clone(), estimate }
}

fn by_residue<T: Copy>(set: &IndicatorSet, values: &[T], fold: impl Fn(&[T]) -> T) -> BTreeMap<u64, T> {
    (0..set.modulus)
        .map(|r| {
            let vs: Vec<T> = set
                .members
                .iter()
                .zip(values)
                .filter(|(m, _)| m.appears_in(r))
                .map(|(_, v)| *v)
                .collect();
            (r, fold(&vs))
        })
        .collect()
}

fn max_of(vs: &[ExtReal]) -> ExtReal {
    ExtReal::fold_max(vs.iter().copied()).unwrap_or(ExtReal::Finite(0.0))
}

fn all_of(vs: &[bool]) -> bool {
    vs.iter().all(|&b| b)
}

fn norm_side(set: &IndicatorSet, s: &Settings) -> ScalarSide {
    let est = map_slice(&set.members, s.parallelism, |m| indicator_norm(m, s.tol, s.m_max));
    scalar_side(set, est)
}

fn inv_norm_side(set: &IndicatorSet, s: &Settings) -> Result<ScalarSide> {
    let est = map_slice(&set.members, s.parallelism, |m| indicator_inv_norm(m, s.tol, s.m_max));
    Ok(scalar_side(set, est.into_iter().collect::<Result<Vec<_>>>()?))
}

fn scalar_side(set: &IndicatorSet, est: Vec<NormEstimate>) -> ScalarSide {
    let values: Vec<ExtReal> = est.iter().map(|e| e.value).collect();
    let flags: Vec<bool> = est.iter().map(|e| e.converged).collect();
    ScalarSide {
        per_residue: by_residue(set, &values, max_of),
        converged: by_residue(set, &flags, all_of),
        estimates: set.members.iter().zip(est).map(|(m, e)| estimate_of(m, e)).collect(),
    }
}

/// The per-residue products `(max ‖B‖)(max ‖B⁻¹‖)` and the bounds around them.
fn kappa_side(set: &IndicatorSet, norms: &ScalarSide, invs: &ScalarSide, tol: f64) -> (ScalarSide, KappaBounds) {
    let estimates: Vec<IndicatorEstimate> = norms
        .estimates
        .iter()
        .zip(&invs.estimates)
        .map(|(a, b)| IndicatorEstimate {
            estimate: NormEstimate {
                value: a.estimate.value.mul(b.estimate.value),
                kind: EstimateKind::LowerBound,
                window_size: a.estimate.window_size.max(b.estimate.window_size),
                converged: a.estimate.converged && b.estimate.converged,
                tolerance_used: tol,
            },
            ..a.clone()
        })
        .collect();
    let per_residue: BTreeMap<u64, ExtReal> =
        (0..set.modulus).map(|r| (r, norms.per_residue[&r].mul(invs.per_residue[&r]))).collect();
    let converged = (0..set.modulus).map(|r| (r, norms.converged[&r] && invs.converged[&r])).collect();
    let lower = max_of(&estimates.iter().map(|e| e.estimate.value).collect::<Vec<_>>());
    let upper = norms.max().unwrap_or(ExtReal::Finite(0.0)).mul(invs.max().unwrap_or(ExtReal::Finite(0.0)));
    let side = ScalarSide { estimates, per_residue, converged };
    let mid = side.max().unwrap_or(ExtReal::Finite(0.0));
    let bounds = KappaBounds {
        lower,
        per_residue: mid,
        upper,
        lower_is_strict: lower < mid && !lower.agrees(mid, tol),
        upper_is_strict: mid < upper && !mid.agrees(upper, tol),
    };
    (side, bounds)
}

/// Convergent iff all residue classes agree; witnesses are the residues
/// holding the smallest and the largest value.
fn scalar_verdict(side: &ScalarSide, tol: f64) -> Verdict {
    let mut lo: Option<(u64, ExtReal)> = None;
    let mut hi: Option<(u64, ExtReal)> = None;
    for (&r, &v) in &side.per_residue {
        if lo.is_none_or(|(_, w)| v < w) {
            lo = Some((r, v));
        }
        if hi.is_none_or(|(_, w)| v > w) {
            hi = Some((r, v));
        }
    }
    let (Some((rl, vl)), Some((rh, vh))) = (lo, hi) else {
        return Verdict::Inconclusive { reason: "no residue classes".into(), tolerance: tol };
    };
    if vl.agrees(vh, tol) {
        return Verdict::Convergent;
    }
    if side.converged[&rl] && side.converged[&rh] {
        Verdict::Divergent { witnesses: [rl, rh], gap: vl.distance(vh) }
    } else {
        Verdict::Inconclusive { reason: "indicator estimates did not converge".into(), tolerance: tol }
    }
}

fn sample_sequence<F>(expr: &FSExpression, range: NRange, par: Parallelism, f: F) -> Result<BTreeMap<u64, ExtReal>>
where
    F: Fn(&FiniteMatrix, Exponent) -> Result<ExtReal> + Sync + Send,
{
    range.validate()?;
    let p = expr.validate()?;
    let ns = range.values();
    let values = map_slice(&ns, par, |&n| f(&expr.finite_section(SectionIndex::new(n)?)?, p));
    ns.into_iter().zip(values).map(|(n, v)| Ok((n, v?))).collect()
}

fn tail_extremes(samples: &BTreeMap<u64, ExtReal>, range: NRange) -> (ExtReal, ExtReal) {
    let tail: Vec<ExtReal> = range.tail().iter().map(|n| samples[n]).collect();
    let sup = max_of(&tail);
    let inf = tail.iter().copied().reduce(ExtReal::min).unwrap_or(ExtReal::Finite(0.0));
    (sup, inf)
}

fn report(
    quantity: QuantityKind,
    range: NRange,
    modulus: u64,
    samples: BTreeMap<u64, ExtReal>,
    side: Option<&ScalarSide>,
    tol: f64,
) -> AsymptoticsReport {
    let (sup, inf) = tail_extremes(&samples, range);
    let indicator_max = side.and_then(ScalarSide::max);
    AsymptoticsReport {
        quantity,
        n_range: range,
        modulus,
        sequence_samples: samples,
        sequence_limsup: sup,
        sequence_liminf: inf,
        indicator_side: side.map(|s| s.estimates.clone()).unwrap_or_default(),
        indicator_max,
        per_residue: side.map(|s| s.per_residue.clone()).unwrap_or_default(),
        indicator_liminf: side.and_then(ScalarSide::min),
        discrepancy: indicator_max.map(|m| m.distance(sup)),
        verdict: match side {
            Some(s) => scalar_verdict(s, tol),
            None => Verdict::Inconclusive { reason: "indicator inverse norms need p = 2".into(), tolerance: tol },
        },
        stable: None,
        kappa: None,
    }
}

/// `limsup ‖Aₙ‖` against `max ‖B‖` over the indicators.
pub fn limsup_norm(expr: &FSExpression, range: NRange, s: &Settings) -> Result<AsymptoticsReport> {
    let samples = sample_sequence(expr, range, s.parallelism, |m, p| Ok(ExtReal::Finite(op_norm(m, p))))?;
    let set = stab_composed(expr)?;
    let side = norm_side(&set, s);
    Ok(report(QuantityKind::Norm, range, set.modulus, samples, Some(&side), s.tol))
}

/// `limsup ‖Aₙ⁻¹‖` against `max ‖B⁻¹‖`; the sequence is stable iff that
/// maximum is finite.
pub fn limsup_inv_norm(expr: &FSExpression, range: NRange, s: &Settings) -> Result<AsymptoticsReport> {
    let samples = sample_sequence(expr, range, s.parallelism, inv_norm)?;
    let set = stab_composed(expr)?;
    let side = match expr.exponent()? {
        Exponent::Two => Some(inv_norm_side(&set, s)?),
        _ => None,
    };
    let mut r = report(QuantityKind::InvNorm, range, set.modulus, samples, side.as_ref(), s.tol);
    r.stable = r.indicator_max.map(ExtReal::is_finite);
    Ok(r)
}

/// `limsup κ(Aₙ)` against the per-residue product formula, with the bounds
/// `max κ(B) ≤ … ≤ (max ‖B‖)(max ‖B⁻¹‖)`.
pub fn limsup_kappa(expr: &FSExpression, range: NRange, s: &Settings) -> Result<AsymptoticsReport> {
    let samples = sample_sequence(expr, range, s.parallelism, kappa)?;
    let set = stab_composed(expr)?;
    if expr.exponent()? != Exponent::Two {
        return Ok(report(QuantityKind::Kappa, range, set.modulus, samples, None, s.tol));
    }
    let (side, bounds) = kappa_side(&set, &norm_side(&set, s), &inv_norm_side(&set, s)?, s.tol);
    let mut r = report(QuantityKind::Kappa, range, set.modulus, samples, Some(&side), s.tol);
    r.kappa = Some(bounds);
    Ok(r)
}

/// Distance between possibly empty sets: two empty sets coincide, and an
/// empty set is infinitely far from a nonempty one.
pub fn set_distance(a: &PointSet, b: &PointSet) -> ExtReal {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => ExtReal::Finite(0.0),
        (false, false) => ExtReal::Finite(hausdorff_distance(a, b).expect("nonempty sets")),
        _ => ExtReal::Infinite,
    }
}

/// Pairwise distances between the sets of different residues, keyed `"r-s"`,
/// and a verdict from the largest one.
fn set_verdict(sets: &BTreeMap<u64, PointSet>, tol: f64) -> (BTreeMap<String, ExtReal>, Verdict) {
    let mut distances = BTreeMap::new();
    let mut worst: Option<([u64; 2], ExtReal)> = None;
    let keys: Vec<u64> = sets.keys().copied().collect();
    for (i, &a) in keys.iter().enumerate() {
        for &b in &keys[i + 1..] {
            let d = set_distance(&sets[&a], &sets[&b]);
            distances.insert(format!("{a}-{b}"), d);
            if worst.is_none_or(|(_, w)| d > w) {
                worst = Some(([a, b], d));
            }
        }
    }
    let verdict = match worst {
        Some((witnesses, gap)) if gap > ExtReal::Finite(tol) => Verdict::Divergent { witnesses, gap },
        _ => Verdict::Convergent,
    };
    (distances, verdict)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoSummary {
    pub epsilon: f64,
    pub n_range: NRange,
    pub tail: Vec<u64>,
    pub modulus: u64,
    pub grid: GridSpec,
    pub cell_diagonal: f64,
    /// Hausdorff tolerance, two cell diagonals.
    pub tolerance: f64,
    pub sequence_limsup_points: usize,
    pub indicator_union_points: usize,
    pub sequence_liminf_points: usize,
    /// `d_H` between the sampled limsup and the union over indicators.
    pub discrepancy: ExtReal,
    pub consistent: bool,
    /// Indicator values are window estimates from above, so their sublevel
    /// sets are inner approximations.
    pub inner_approximation: bool,
    /// `d_H` between the tail unions of different residue classes of `n`.
    pub sequence_residue_distances: BTreeMap<String, ExtReal>,
    /// Whether the sampled sets Hausdorff-converge along the tail.
    pub sequence_converges: bool,
    pub indicator_residue_distances: BTreeMap<String, ExtReal>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct PseudoAnalysis {
    pub summary: PseudoSummary,
    /// Grids of `Aₙ` for the tail indices.
    pub sequence_grids: BTreeMap<u64, PseudospectrumGrid>,
    pub indicator_grids: Vec<(String, PseudospectrumGrid)>,
    pub union_grid: PseudospectrumGrid,
}

fn indicator_grids(
    set: &IndicatorSet,
    eps: f64,
    grid: &GridSpec,
    par: Parallelism,
) -> Result<Vec<PseudospectrumGrid>> {
    set.members
        .iter()
        .map(|m| pseudo_grid_indicator(m, grid.window, grid.bbox, grid.resolution, &[eps], par))
        .collect()
}

fn residue_unions(
    set: &IndicatorSet,
    grids: &[PseudospectrumGrid],
    eps: f64,
) -> Result<BTreeMap<u64, PointSet>> {
    (0..set.modulus)
        .map(|r| {
            let chosen: Vec<PseudospectrumGrid> = set
                .members
                .iter()
                .zip(grids)
                .filter(|(m, _)| m.appears_in(r))
                .map(|(_, g)| g.clone())
                .collect();
            Ok((r, PseudospectrumGrid::union(&chosen)?.sublevel_points(eps)))
        })
        .collect()
}

/// `limsup Sp_ε Aₙ` from grids of the tail sections against the union of
/// `Sp_ε B` over the indicators.
pub fn limsup_pseudospectrum(
    expr: &FSExpression,
    eps: f64,
    grid: &GridSpec,
    range: NRange,
    par: Parallelism,
) -> Result<PseudoAnalysis> {
    range.validate()?;
    let p = expr.validate()?;
    p.require_two("pseudospectrum")?;
    let set = stab_composed(expr)?;
    let tail = range.tail();
    let mut sequence_grids = BTreeMap::new();
    for &n in &tail {
        let m = expr.finite_section(SectionIndex::new(n)?)?;
        sequence_grids.insert(n, pseudo_grid_matrix(&m, p, grid.bbox, grid.resolution, &[eps], par)?);
    }
    let ind_grids = indicator_grids(&set, eps, grid, par)?;
    let union_grid = PseudospectrumGrid::union(&ind_grids)?;
    let cell = union_grid.cell_diagonal();
    let tol = 2.0 * cell;

    let sets: Vec<PointSet> = sequence_grids.values().map(|g| g.sublevel_points(eps)).collect();
    let limsup = set_union(&sets, tol);
    let liminf = set_common(&sets, tol);
    let union_points = union_grid.sublevel_points(eps);
    let discrepancy = set_distance(&limsup, &union_points);

    let mut by_class: BTreeMap<u64, Vec<PointSet>> = BTreeMap::new();
    for (&n, s) in sequence_grids.keys().zip(&sets) {
        by_class.entry(n % set.modulus).or_default().push(s.clone());
    }
    let class_unions: BTreeMap<u64, PointSet> = by_class.into_iter().map(|(r, v)| (r, set_union(&v, tol))).collect();
    let (sequence_residue_distances, seq_verdict) = set_verdict(&class_unions, tol);
    let (indicator_residue_distances, verdict) = set_verdict(&residue_unions(&set, &ind_grids, eps)?, tol);

    let summary = PseudoSummary {
        epsilon: eps,
        n_range: range,
        tail,
        modulus: set.modulus,
        grid: *grid,
        cell_diagonal: cell,
        tolerance: tol,
        sequence_limsup_points: limsup.len(),
        indicator_union_points: union_points.len(),
        sequence_liminf_points: liminf.len(),
        discrepancy,
        consistent: discrepancy <= ExtReal::Finite(tol),
        inner_approximation: union_grid.inner_approximation,
        sequence_residue_distances,
        sequence_converges: seq_verdict.is_convergent(),
        indicator_residue_distances,
        verdict,
    };
    let indicator_grids = set.members.iter().map(Indicator::label).zip(ind_grids).collect();
    Ok(PseudoAnalysis { summary, sequence_grids, indicator_grids, union_grid })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub quantity: QuantityKind,
    pub modulus: u64,
    /// Indicator-side value per residue of `n` (scalar quantities).
    pub per_residue: BTreeMap<u64, ExtReal>,
    pub limsup: Option<ExtReal>,
    pub liminf: Option<ExtReal>,
    /// `d_H` between the residue classes (pseudospectra).
    pub residue_distances: BTreeMap<String, ExtReal>,
    pub verdict: Verdict,
    pub tolerance: f64,
}

/// Whether `s(Aₙ)` converges: the residue classes of `n` modulo the common
/// period are the minimizing sequences, so it converges iff their indicator
/// values agree.
pub fn convergence_verdict(
    expr: &FSExpression,
    quantity: QuantityKind,
    s: &Settings,
    grid: Option<&GridSpec>,
) -> Result<ConvergenceReport> {
    let p = expr.validate()?;
    let set = stab_composed(expr)?;
    let scalar = |side: &ScalarSide| ConvergenceReport {
        quantity,
        modulus: set.modulus,
        per_residue: side.per_residue.clone(),
        limsup: side.max(),
        liminf: side.min(),
        residue_distances: BTreeMap::new(),
        verdict: scalar_verdict(side, s.tol),
        tolerance: s.tol,
    };
    match quantity {
        QuantityKind::Norm => Ok(scalar(&norm_side(&set, s))),
        QuantityKind::InvNorm => {
            p.require_two("inverse norm verdict")?;
            Ok(scalar(&inv_norm_side(&set, s)?))
        }
        QuantityKind::Kappa => {
            p.require_two("condition number verdict")?;
            let (side, _) = kappa_side(&set, &norm_side(&set, s), &inv_norm_side(&set, s)?, s.tol);
            Ok(scalar(&side))
        }
        QuantityKind::PseudoSet { epsilon } => {
            p.require_two("pseudospectrum verdict")?;
            let grid = grid.ok_or_else(|| FsaError::DegenerateGrid("no grid given".into()))?;
            let grids = indicator_grids(&set, epsilon, grid, s.parallelism)?;
            let tol = 2.0 * grids[0].cell_diagonal();
            let (residue_distances, verdict) = set_verdict(&residue_unions(&set, &grids, epsilon)?, tol);
            Ok(ConvergenceReport {
                quantity,
                modulus: set.modulus,
                per_residue: BTreeMap::new(),
                limsup: None,
                liminf: None,
                residue_distances,
                verdict,
                tolerance: tol,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Culprit {
    pub label: String,
    pub kind: IndicatorKind,
    pub residues: Option<Vec<u64>>,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribution {
    /// No indicator comes within ε.
    Clear,
    /// Only the strong limit does: `λ` approximates its spectrum.
    Genuine,
    /// Only corner indicators do: the points near `λ` are pollution.
    Pollution,
    /// Both the strong limit and some corner indicators do.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PollutionReport {
    pub lambda: [f64; 2],
    pub epsilon: f64,
    pub window: usize,
    /// Indicators with `μ̂(B − λI) ≤ ε`, ascending.
    pub culprits: Vec<Culprit>,
    pub attribution: Attribution,
}

/// Which indicators have `λ` in their ε-pseudospectrum, by the window
/// estimate `μ̂(B − λI)`.
pub fn pollution_attribution(expr: &FSExpression, lambda: C64, eps: f64, m: usize) -> Result<PollutionReport> {
    expr.validate()?.require_two("pollution attribution")?;
    let set = stab_composed(expr)?;
    let mut culprits: Vec<Culprit> = set
        .members
        .iter()
        .map(|ind| Culprit {
            label: ind.label(),
            kind: ind.kind,
            residues: ind.residues.clone(),
            mu: MuEstimator::new(&ind.op, m).at(lambda),
        })
        .filter(|c| c.mu <= eps)
        .collect();
    culprits.sort_by(|a, b| a.mu.total_cmp(&b.mu).then_with(|| a.label.cmp(&b.label)));
    let center = culprits.iter().any(|c| c.kind == IndicatorKind::Center);
    let corners = culprits.iter().any(|c| c.kind != IndicatorKind::Center);
    let attribution = match (center, corners) {
        (false, false) => Attribution::Clear,
        (true, false) => Attribution::Genuine,
        (false, true) => Attribution::Pollution,
        (true, true) => Attribution::Mixed,
    };
    Ok(PollutionReport { lambda: [lambda.re, lambda.im], epsilon: eps, window: m, culprits, attribution })
}
