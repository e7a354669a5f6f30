//! The weighted operations `mu^w_n` on `C(m,1)[t]`.

use std::collections::BTreeMap;
use std::sync::Mutex;

use thiserror::Error;

use crate::algebra::{AlgebraContext, AlgebraElement, AlgebraError, BasisPath};
use crate::enumerator::OperationIndex;
use crate::tiling::CanonicalKey;
use crate::weight::WeightVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperationError {
    #[error(
        "out of budget: weight {weight} on ({inputs}) needs graphs with d = {required}, index has d_max = {d_max}"
    )]
    OutOfBudget {
        required: usize,
        d_max: usize,
        weight: WeightVector,
        inputs: String,
    },
    #[error("weight vector {weight} has length {found}, expected {expected}")]
    WeightLength {
        weight: WeightVector,
        found: usize,
        expected: usize,
    },
    #[error("index is for m = {index}, algebra has m = {algebra}")]
    IndexMismatch { index: usize, algebra: usize },
    #[error("centered counts take pure inputs, got {0}")]
    ImpureInput(BasisPath),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Which part of the operation formula a graph contributes to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Centered,
    /// `a * c(a_1', ...)` with `a_1 = a * a_1'`.
    LeftExtended(BasisPath),
    /// `c(..., a_n') * a` with `a_n = a_n' * a`.
    RightExtended(BasisPath),
}

/// A basis-level evaluation `mu^weight(inputs) = output`.
pub type SampleKey = (WeightVector, Vec<BasisPath>);

pub struct Operations<'a> {
    ctx: &'a AlgebraContext,
    index: &'a OperationIndex,
    samples: Option<Mutex<BTreeMap<SampleKey, AlgebraElement>>>,
}

fn show(inputs: &[BasisPath]) -> String {
    inputs
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl<'a> Operations<'a> {
    pub fn new(ctx: &'a AlgebraContext, index: &'a OperationIndex) -> Result<Self, OperationError> {
        if ctx.m() != index.m() {
            return Err(OperationError::IndexMismatch {
                index: index.m(),
                algebra: ctx.m(),
            });
        }
        Ok(Operations {
            ctx,
            index,
            samples: None,
        })
    }

    /// Like [`Operations::new`], but remembers every nonzero basis-level
    /// evaluation for later auditing.
    pub fn recording(
        ctx: &'a AlgebraContext,
        index: &'a OperationIndex,
    ) -> Result<Self, OperationError> {
        let mut ops = Self::new(ctx, index)?;
        ops.samples = Some(Mutex::new(BTreeMap::new()));
        Ok(ops)
    }

    pub fn ctx(&self) -> &AlgebraContext {
        self.ctx
    }

    pub fn index(&self) -> &OperationIndex {
        self.index
    }

    /// Recorded nonzero evaluations, sorted by key.
    pub fn samples(&self) -> Vec<(SampleKey, AlgebraElement)> {
        match &self.samples {
            Some(s) => s
                .lock()
                .expect("sample lock")
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            None => Vec::new(),
        }
    }

    fn check_weight(&self, w: &WeightVector) -> Result<(), OperationError> {
        if w.m() != self.ctx.m() {
            return Err(OperationError::WeightLength {
                weight: w.clone(),
                found: w.m(),
                expected: self.ctx.m(),
            });
        }
        Ok(())
    }

    /// The number of internal vertices a graph with these inputs and weight
    /// must have, or `None` when the gradings rule every graph out.
    pub fn required_d(&self, w: &WeightVector, inputs: &[BasisPath]) -> Option<usize> {
        let m = self.ctx.m();
        let total: u32 = inputs.iter().map(|p| p.doubled_total()).sum::<u32>() + 2 * w.total();
        let per_vertex = 2 * m as u32;
        if total == 0 || !total.is_multiple_of(per_vertex) {
            return None;
        }
        let d = (total / per_vertex) as usize;
        // Leaf count law, with the two sides kept non-negative.
        let n = inputs.len() as i64;
        let (m, d_i, w_i) = (m as i64, d as i64, i64::from(w.total()));
        if n != 2 * m * d_i - 4 * d_i + 2 - 2 * w_i {
            return None;
        }
        let cyclic = (0..inputs.len())
            .all(|k| inputs[k].target() == inputs[(k + 1) % inputs.len()].source());
        cyclic.then_some(d)
    }

    /// The index entries matching a centered query, after the grading and
    /// budget checks.
    fn centered_entries(
        &self,
        w: &WeightVector,
        inputs: &[BasisPath],
    ) -> Result<&'a [crate::enumerator::IndexEntry], OperationError> {
        self.check_weight(w)?;
        if let Some(p) = inputs.iter().find(|p| p.is_idempotent()) {
            return Err(OperationError::ImpureInput(p.clone()));
        }
        let Some(d) = self.required_d(w, inputs) else {
            return Ok(&[]);
        };
        if d > self.index.d_max() {
            return Err(OperationError::OutOfBudget {
                required: d,
                d_max: self.index.d_max(),
                weight: w.clone(),
                inputs: show(inputs),
            });
        }
        Ok(self.index.lookup(inputs, w))
    }

    /// The centered count `c^w_n(inputs)`: the sum of `iota * t^d` over all
    /// matching graphs.
    pub fn c(
        &self,
        w: &WeightVector,
        inputs: &[BasisPath],
    ) -> Result<AlgebraElement, OperationError> {
        let mut out = self.ctx.zero();
        for e in self.centered_entries(w, inputs)? {
            out.add_term(
                BasisPath::idempotent(e.idempotent),
                e.d as u32,
                e.multiplicity as i64,
            );
        }
        Ok(out)
    }

    /// `mu^w_n` on basis paths.
    pub fn mu_basis(
        &self,
        w: &WeightVector,
        inputs: &[BasisPath],
    ) -> Result<AlgebraElement, OperationError> {
        self.check_weight(w)?;
        for p in inputs {
            self.ctx.check_path(p)?;
        }
        let out = self.mu_basis_unchecked(w, inputs)?;
        if let Some(samples) = &self.samples {
            if !out.is_zero() {
                samples
                    .lock()
                    .expect("sample lock")
                    .insert((w.clone(), inputs.to_vec()), out.clone());
            }
        }
        Ok(out)
    }

    fn mu_basis_unchecked(
        &self,
        w: &WeightVector,
        inputs: &[BasisPath],
    ) -> Result<AlgebraElement, OperationError> {
        let m = self.ctx.m();
        match inputs.len() {
            0 => {
                return match w.as_unit() {
                    Some(i) => Ok(self.ctx.u_element(i)?),
                    None => Ok(self.ctx.zero()),
                };
            }
            1 => return Ok(self.ctx.zero()),
            2 if w.is_zero() => {
                return Ok(match inputs[0].mul(&inputs[1]) {
                    Some(p) => AlgebraElement::from_path(m, p),
                    None => self.ctx.zero(),
                });
            }
            _ => {}
        }
        if inputs.iter().any(|p| p.is_idempotent()) {
            return Ok(self.ctx.zero());
        }
        let mut out = self.c(w, inputs)?;
        let n = inputs.len();
        let mut rest = inputs.to_vec();
        for (a, a1) in inputs[0].pure_splittings() {
            rest[0] = a1;
            for e in self.centered_entries(w, &rest)? {
                if let Some(p) = a.mul(&BasisPath::idempotent(e.idempotent)) {
                    out.add_term(p, e.d as u32, e.multiplicity as i64);
                }
            }
        }
        let mut rest = inputs.to_vec();
        for (an, a) in inputs[n - 1].pure_splittings() {
            rest[n - 1] = an;
            for e in self.centered_entries(w, &rest)? {
                if let Some(p) = BasisPath::idempotent(e.idempotent).mul(&a) {
                    out.add_term(p, e.d as u32, e.multiplicity as i64);
                }
            }
        }
        Ok(out)
    }

    /// `mu^w_n`, extended multilinearly and `t`-equivariantly.
    pub fn mu(
        &self,
        w: &WeightVector,
        inputs: &[AlgebraElement],
    ) -> Result<AlgebraElement, OperationError> {
        self.check_weight(w)?;
        for x in inputs {
            if x.m() != self.ctx.m() {
                return Err(AlgebraError::ContextMismatch {
                    left: self.ctx.m(),
                    right: x.m(),
                }
                .into());
            }
        }
        let mut out = self.ctx.zero();
        if inputs.iter().any(|x| x.is_zero()) {
            return Ok(out);
        }
        let mut paths = Vec::with_capacity(inputs.len());
        self.expand(w, inputs, &mut paths, 1, 0, &mut out)?;
        Ok(out)
    }

    fn expand(
        &self,
        w: &WeightVector,
        inputs: &[AlgebraElement],
        paths: &mut Vec<BasisPath>,
        coefficient: i64,
        t: u32,
        out: &mut AlgebraElement,
    ) -> Result<(), OperationError> {
        let k = paths.len();
        if k == inputs.len() {
            let value = self.mu_basis(w, paths)?;
            out.add_scaled(&value, coefficient, t);
            return Ok(());
        }
        for (mono, c) in inputs[k].terms() {
            paths.push(mono.path.clone());
            self.expand(w, inputs, paths, coefficient * c, t + mono.t, out)?;
            paths.pop();
        }
        Ok(())
    }

    /// The graphs behind `mu^w_n(inputs)` on pure basis inputs, tagged with
    /// the term they enter through.
    pub fn contributing_graphs(
        &self,
        w: &WeightVector,
        inputs: &[BasisPath],
    ) -> Result<Vec<(Term, CanonicalKey)>, OperationError> {
        let mut out = Vec::new();
        if inputs.len() < 2 || inputs.iter().any(|p| p.is_idempotent()) {
            return Ok(out);
        }
        for e in self.centered_entries(w, inputs)? {
            out.extend(e.graphs.iter().map(|g| (Term::Centered, g.clone())));
        }
        let n = inputs.len();
        let mut rest = inputs.to_vec();
        for (a, a1) in inputs[0].pure_splittings() {
            rest[0] = a1;
            for e in self.centered_entries(w, &rest)? {
                if a.target() == e.idempotent {
                    out.extend(
                        e.graphs
                            .iter()
                            .map(|g| (Term::LeftExtended(a.clone()), g.clone())),
                    );
                }
            }
        }
        let mut rest = inputs.to_vec();
        for (an, a) in inputs[n - 1].pure_splittings() {
            rest[n - 1] = an;
            for e in self.centered_entries(w, &rest)? {
                if a.source() == e.idempotent {
                    out.extend(
                        e.graphs
                            .iter()
                            .map(|g| (Term::RightExtended(a.clone()), g.clone())),
                    );
                }
            }
        }
        Ok(out)
    }
}
