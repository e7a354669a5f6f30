//! Exhaustive checks of the signed weighted A-infinity relation and of the
//! grading laws satisfied by the operations.

use std::io::{self, Write};

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::algebra::{AlgebraContext, AlgebraElement, BasisPath, GradingVector};
use crate::operations::{OperationError, Operations, SampleKey};
use crate::tiling::CanonicalKey;
use crate::weight::WeightVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("term r={r}, s={s}, u={u}, v={v}: {source}")]
    Term {
        r: usize,
        s: usize,
        u: WeightVector,
        v: WeightVector,
        #[source]
        source: Box<OperationError>,
    },
}

impl VerifyError {
    pub fn is_budget(&self) -> bool {
        let VerifyError::Term { source, .. } = self;
        matches!(**source, OperationError::OutOfBudget { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    pub weight: WeightVector,
    pub inputs: Vec<AlgebraElement>,
}

impl RelationInstance {
    pub fn from_paths(weight: WeightVector, inputs: &[BasisPath]) -> Self {
        let m = weight.m();
        RelationInstance {
            weight,
            inputs: inputs
                .iter()
                .map(|p| AlgebraElement::from_path(m, p.clone()))
                .collect(),
        }
    }
}

/// One nonzero summand `sign * mu^u(a_1..a_r, mu^v(a_{r+1}..a_{r+s}), ..)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTerm {
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub u: WeightVector,
    pub v: WeightVector,
    pub sign: i64,
    pub inner: AlgebraElement,
    pub outer: AlgebraElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub instance: RelationInstance,
    pub value: AlgebraElement,
    pub passed: bool,
    /// The nonzero terms; kept only when the check fails.
    pub trace: Vec<RelationTerm>,
}

impl RelationReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "weight": self.instance.weight,
            "inputs": self.instance.inputs.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "value": self.value.to_string(),
            "passed": self.passed,
        });
        if !self.trace.is_empty() {
            v["trace"] = self
                .trace
                .iter()
                .map(|t| {
                    json!({
                        "r": t.r, "s": t.s, "t": t.t,
                        "u": t.u, "v": t.v, "sign": t.sign,
                        "inner": t.inner.to_string(),
                        "outer": t.outer.to_string(),
                    })
                })
                .collect();
        }
        v
    }
}

/// All nonzero terms of the relation for `inst`.
pub fn ainfty_terms(
    ops: &Operations<'_>,
    inst: &RelationInstance,
) -> Result<Vec<RelationTerm>, VerifyError> {
    let n = inst.inputs.len();
    let mut terms = Vec::new();
    for (u, v) in inst.weight.splits() {
        for r in 0..=n {
            for s in 0..=n - r {
                let t = n - r - s;
                // mu_1 vanishes, as inner operation or as outer one.
                if s == 1 || s == n {
                    continue;
                }
                let err = |source: OperationError| VerifyError::Term {
                    r,
                    s,
                    u: u.clone(),
                    v: v.clone(),
                    source: Box::new(source),
                };
                let inner = ops.mu(&v, &inst.inputs[r..r + s]).map_err(err)?;
                if inner.is_zero() {
                    continue;
                }
                let mut outer_inputs = Vec::with_capacity(n - s + 1);
                outer_inputs.extend_from_slice(&inst.inputs[..r]);
                outer_inputs.push(inner.clone());
                outer_inputs.extend_from_slice(&inst.inputs[r + s..]);
                let outer = ops.mu(&u, &outer_inputs).map_err(err)?;
                if outer.is_zero() {
                    continue;
                }
                let sign = if (r + s * t).is_multiple_of(2) { 1 } else { -1 };
                terms.push(RelationTerm {
                    r,
                    s,
                    t,
                    u: u.clone(),
                    v: v.clone(),
                    sign,
                    inner,
                    outer,
                });
            }
        }
    }
    Ok(terms)
}

fn total(m: usize, terms: &[RelationTerm]) -> AlgebraElement {
    let mut value = AlgebraElement::zero(m);
    for term in terms {
        value.add_scaled(&term.outer, term.sign, 0);
    }
    value
}

/// The signed sum over all `r + s + t = n` and `u + v = w`.
pub fn ainfty_sum(
    ops: &Operations<'_>,
    inst: &RelationInstance,
) -> Result<AlgebraElement, VerifyError> {
    Ok(total(ops.ctx().m(), &ainfty_terms(ops, inst)?))
}

pub fn check(ops: &Operations<'_>, inst: &RelationInstance) -> Result<RelationReport, VerifyError> {
    let terms = ainfty_terms(ops, inst)?;
    let value = total(ops.ctx().m(), &terms);
    let passed = value.is_zero();
    Ok(RelationReport {
        instance: inst.clone(),
        value,
        passed,
        trace: if passed { Vec::new() } else { terms },
    })
}

/// Composable sequences of pure basis paths (each input ends where the next
/// starts) with doubled total grading at most `bound`, in lexicographic order.
pub fn composable_sequences(ctx: &AlgebraContext, bound: u32) -> Vec<Vec<BasisPath>> {
    let paths = ctx.basis_paths_up_to(bound);
    let mut out = Vec::new();
    fn grow(
        paths: &[BasisPath],
        left: u32,
        prefix: &mut Vec<BasisPath>,
        out: &mut Vec<Vec<BasisPath>>,
    ) {
        for p in paths {
            let w = p.doubled_total();
            if w > left {
                continue;
            }
            if let Some(last) = prefix.last() {
                if last.target() != p.source() {
                    continue;
                }
            }
            prefix.push(p.clone());
            out.push(prefix.clone());
            grow(paths, left - w, prefix, out);
            prefix.pop();
        }
    }
    grow(&paths, bound, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Doubled gradings that can be split off the front of `p` (`left`) or the
/// back (`right`) by a pure factorization.
fn split_weights(p: &BasisPath, left: bool) -> Vec<u32> {
    let word = p.word();
    (1..word.len())
        .map(|j| {
            let part = if left { &word[..j] } else { &word[j..] };
            part.iter().map(|g| g.doubled_weight()).sum()
        })
        .collect()
}

/// Whether `mu^v` on a block of `arity` inputs with doubled grading `tot`
/// can be nonzero. `ends` lists the gradings the extended terms may strip
/// off, or is `None` when an end input is unknown.
fn may_be_nonzero(
    m: usize,
    arity: usize,
    v: &WeightVector,
    tot: u32,
    ends: Option<Vec<u32>>,
) -> bool {
    match arity {
        0 => return v.as_unit().is_some(),
        1 => return false,
        2 if v.is_zero() => return true,
        _ => {}
    }
    let Some(ends) = ends else {
        return true;
    };
    let per_vertex = 2 * m as u32;
    let tot = tot + 2 * v.total();
    std::iter::once(0)
        .chain(ends)
        .any(|cut| tot > cut && (tot - cut).is_multiple_of(per_vertex))
}

/// The grading filter: `false` only when every term of the relation is
/// forced to vanish by the vertex-count law.
pub fn feasible(m: usize, weight: &WeightVector, inputs: &[BasisPath]) -> bool {
    let n = inputs.len();
    let grading: Vec<u32> = inputs.iter().map(|p| p.doubled_total()).collect();
    let all: u32 = grading.iter().sum();
    let ends_of = |first: &BasisPath, last: &BasisPath| {
        let mut e = split_weights(first, true);
        e.extend(split_weights(last, false));
        e
    };
    for (u, v) in weight.splits() {
        for r in 0..=n {
            for s in 0..=n - r {
                if s == 1 || s == n {
                    continue;
                }
                let block = &inputs[r..r + s];
                let inner_tot: u32 = grading[r..r + s].iter().sum();
                let inner_ends = (s >= 1).then(|| ends_of(&block[0], &block[s - 1]));
                if !may_be_nonzero(m, s, &v, inner_tot, inner_ends.or(Some(Vec::new()))) {
                    continue;
                }
                // The inner output has the grading of its inputs plus v.
                let outer_tot = all + 2 * v.total();
                let outer_ends = if r == 0 || r + s == n {
                    None
                } else {
                    Some(ends_of(&inputs[0], &inputs[n - 1]))
                };
                if may_be_nonzero(m, n - s + 1, &u, outer_tot, outer_ends) {
                    return true;
                }
            }
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    /// Bound on the sum of doubled shadow totals of the inputs.
    pub grading_bound: u32,
    /// Bound on `w_1 + ... + w_m`.
    pub weight_bound: u32,
}

impl SweepConfig {
    /// Largest number of vertices any operation in the sweep can require.
    pub fn required_d(&self, m: usize) -> usize {
        ((self.grading_bound + 2 * self.weight_bound) / (2 * m as u32)) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOutcome {
    pub m: usize,
    pub config: SweepConfig,
    /// Reports of the instances that failed, in sweep order.
    pub failures: Vec<RelationReport>,
    pub checked: usize,
    pub passed: usize,
    pub skipped_infeasible: usize,
    pub budget_aborted: usize,
    pub complete: bool,
    pub error: Option<String>,
}

impl SweepOutcome {
    fn new(m: usize, config: SweepConfig) -> Self {
        SweepOutcome {
            m,
            config,
            failures: Vec::new(),
            checked: 0,
            passed: 0,
            skipped_infeasible: 0,
            budget_aborted: 0,
            complete: true,
            error: None,
        }
    }

    pub fn failed(&self) -> usize {
        self.checked - self.passed
    }

    /// True when the sweep ran to completion and every checked instance passed.
    pub fn all_passed(&self) -> bool {
        self.complete && self.failed() == 0
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "m": self.m,
            "grading_bound": self.config.grading_bound,
            "weight_bound": self.config.weight_bound,
            "checked": self.checked,
            "passed": self.passed,
            "failed": self.failed(),
            "skipped_infeasible": self.skipped_infeasible,
            "budget_aborted": self.budget_aborted,
            "complete": self.complete,
            "error": self.error,
        })
    }

    pub fn write_summary(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "{}", json!({ "summary": self.summary_json() }))
    }
}

/// Writes each report as one JSON line; pass to [`sweep_with`].
pub fn json_lines_sink<W: Write>(
    out: &mut W,
) -> impl FnMut(&RelationReport) -> io::Result<()> + '_ {
    move |r| writeln!(out, "{}", r.to_json())
}

enum Outcome {
    Skipped,
    Checked(RelationReport),
    Aborted(String),
}

type Job = (WeightVector, Vec<BasisPath>, Option<usize>);

const CHUNK: usize = 4096;

fn run<I, F>(
    ops: &Operations<'_>,
    config: SweepConfig,
    jobs: I,
    sink: &mut F,
) -> io::Result<SweepOutcome>
where
    I: Iterator<Item = Job>,
    F: FnMut(&RelationReport) -> io::Result<()>,
{
    let m = ops.ctx().m();
    let mut sweep = SweepOutcome::new(m, config);
    let mut jobs = jobs.peekable();
    while jobs.peek().is_some() {
        let chunk: Vec<Job> = jobs.by_ref().take(CHUNK).collect();
        let outcomes: Vec<Outcome> = chunk
            .into_par_iter()
            .map(|(w, inputs, unit)| {
                if unit.is_none() && !feasible(m, &w, &inputs) {
                    return Outcome::Skipped;
                }
                let inst = RelationInstance::from_paths(w, &inputs);
                let result = match unit {
                    None => check(ops, &inst),
                    Some(pos) => check_unit_terms(ops, &inst, pos),
                };
                match result {
                    Ok(report) => Outcome::Checked(report),
                    Err(e) => Outcome::Aborted(e.to_string()),
                }
            })
            .collect();
        for o in outcomes {
            match o {
                Outcome::Skipped => sweep.skipped_infeasible += 1,
                Outcome::Checked(r) => {
                    sink(&r)?;
                    sweep.checked += 1;
                    if r.passed {
                        sweep.passed += 1;
                    } else {
                        sweep.failures.push(r);
                    }
                }
                Outcome::Aborted(e) => {
                    sweep.budget_aborted += 1;
                    sweep.complete = false;
                    sweep.error.get_or_insert(e);
                }
            }
        }
    }
    Ok(sweep)
}

fn budget_abort(ops: &Operations<'_>, config: SweepConfig) -> Option<SweepOutcome> {
    let m = ops.ctx().m();
    let required = config.required_d(m);
    if required <= ops.index().d_max() {
        return None;
    }
    let mut out = SweepOutcome::new(m, config);
    out.complete = false;
    out.error = Some(format!(
        "out of budget: bounds allow operations with d = {required}, index has d_max = {}",
        ops.index().d_max()
    ));
    Some(out)
}

/// Checks the relation for every weight with total at most the weight bound
/// and every composable pure sequence within the grading bound.
///
/// If the index is too small for the bounds, nothing is evaluated and the
/// outcome is marked incomplete.
pub fn sweep(ops: &Operations<'_>, config: SweepConfig) -> SweepOutcome {
    sweep_with(ops, config, &mut |_: &RelationReport| Ok(())).expect("the sink never fails")
}

/// [`sweep`], handing every checked report to `sink` in sweep order.
pub fn sweep_with<F>(
    ops: &Operations<'_>,
    config: SweepConfig,
    sink: &mut F,
) -> io::Result<SweepOutcome>
where
    F: FnMut(&RelationReport) -> io::Result<()>,
{
    if let Some(aborted) = budget_abort(ops, config) {
        return Ok(aborted);
    }
    let weights = WeightVector::all_up_to(ops.ctx().m(), config.weight_bound);
    let seqs = composable_sequences(ops.ctx(), config.grading_bound);
    let jobs = seqs.into_iter().flat_map(|inputs| {
        weights
            .iter()
            .map(move |w| (w.clone(), inputs.clone(), None))
    });
    run(ops, config, jobs, sink)
}

/// Checks the relation with an idempotent inserted into each composable
/// sequence at every position. Besides the relation itself, every surviving
/// term must be one of the two terms where `mu^0_2` meets the unit.
pub fn unitality_sweep(ops: &Operations<'_>, config: SweepConfig) -> SweepOutcome {
    unitality_sweep_with(ops, config, &mut |_: &RelationReport| Ok(()))
        .expect("the sink never fails")
}

pub fn unitality_sweep_with<F>(
    ops: &Operations<'_>,
    config: SweepConfig,
    sink: &mut F,
) -> io::Result<SweepOutcome>
where
    F: FnMut(&RelationReport) -> io::Result<()>,
{
    if let Some(aborted) = budget_abort(ops, config) {
        return Ok(aborted);
    }
    let weights = WeightVector::all_up_to(ops.ctx().m(), config.weight_bound);
    let seqs = composable_sequences(ops.ctx(), config.grading_bound);
    let jobs = seqs.into_iter().flat_map(|inputs| {
        let weights = &weights;
        (0..=inputs.len()).flat_map(move |pos| {
            let vertex = if pos < inputs.len() {
                inputs[pos].source()
            } else {
                inputs[pos - 1].target()
            };
            let mut seq = inputs.clone();
            seq.insert(pos, BasisPath::idempotent(vertex));
            weights
                .iter()
                .map(move |w| (w.clone(), seq.clone(), Some(pos)))
        })
    });
    run(ops, config, jobs, sink)
}

fn check_unit_terms(
    ops: &Operations<'_>,
    inst: &RelationInstance,
    pos: usize,
) -> Result<RelationReport, VerifyError> {
    let terms = ainfty_terms(ops, inst)?;
    let value = total(ops.ctx().m(), &terms);
    let n = inst.inputs.len();
    let unit_term = |t: &RelationTerm| {
        let inside = (t.r..t.r + t.s).contains(&pos);
        if inside {
            t.s == 2 && t.v.is_zero()
        } else {
            n - t.s + 1 == 2 && t.u.is_zero()
        }
    };
    let passed = value.is_zero() && terms.iter().all(unit_term);
    Ok(RelationReport {
        instance: inst.clone(),
        value,
        passed,
        trace: if passed { Vec::new() } else { terms },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AuditCheck {
    ShadowConservation,
    GrLaw,
    EvenArity,
    NonMultiplyability,
    StrictUnitality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditViolation {
    pub check: AuditCheck,
    pub weight: WeightVector,
    pub inputs: Vec<BasisPath>,
    pub output: AlgebraElement,
    pub detail: String,
    pub witnesses: Vec<CanonicalKey>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub audited: usize,
    pub violations: Vec<AuditViolation>,
}

/// Checks every nonzero basis-level evaluation against the grading laws.
pub fn grading_audit(ops: &Operations<'_>, samples: &[(SampleKey, AlgebraElement)]) -> AuditReport {
    let ctx = ops.ctx();
    let m = ctx.m();
    let mut report = AuditReport::default();
    for ((w, inputs), output) in samples {
        if output.is_zero() {
            continue;
        }
        report.audited += 1;
        let n = inputs.len();
        let multiplication = n == 2 && w.is_zero();
        let mut expected = GradingVector(w.components().iter().map(|x| 2 * x).collect());
        for p in inputs {
            expected += &GradingVector::of_path(m, p);
        }
        let degree = n as i64 - 2 + 2 * i64::from(w.total());
        let mut found = Vec::new();
        for (mono, _) in output.terms() {
            let shadow = ctx.shadow_of(mono);
            if shadow != expected {
                found.push((
                    AuditCheck::ShadowConservation,
                    format!("output term has shadow {shadow}, inputs give {expected}"),
                ));
            }
            let gr = ctx.gr_of(mono);
            if gr != degree {
                found.push((AuditCheck::GrLaw, format!("gr {gr}, expected {degree}")));
            }
        }
        if n % 2 == 1 {
            found.push((
                AuditCheck::EvenArity,
                format!("nonzero operation of arity {n}"),
            ));
        }
        if !multiplication {
            if inputs.iter().any(|p| p.is_idempotent()) {
                found.push((
                    AuditCheck::StrictUnitality,
                    "nonzero operation with an idempotent input".into(),
                ));
            } else if let Some(k) = (1..n).find(|&k| inputs[k - 1].mul(&inputs[k]).is_some()) {
                found.push((
                    AuditCheck::NonMultiplyability,
                    format!("inputs {} and {} multiply to a nonzero path", k, k + 1),
                ));
            }
        }
        if found.is_empty() {
            continue;
        }
        let witnesses: Vec<CanonicalKey> = ops
            .contributing_graphs(w, inputs)
            .map(|g| g.into_iter().map(|(_, k)| k).collect())
            .unwrap_or_default();
        for (check, detail) in found {
            report.violations.push(AuditViolation {
                check,
                weight: w.clone(),
                inputs: inputs.clone(),
                output: output.clone(),
                detail,
                witnesses: witnesses.clone(),
            });
        }
    }
    report
}
