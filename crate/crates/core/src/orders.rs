//! The resolution order ⊢ (refinement by subalgebra inclusion), the
//! redundancy order ▷ (declared reductions), and the minimax search.
//!
//! `V ▷ W` means `W` is obtained from `V` by discarding declared redundant
//! structure: a tensor factor (`V = W ⊗ I` under a declared factorization)
//! or an explicit surjection of spectra. Redundancy is never inferred from
//! the matrices alone; it comes from witnesses, which are validated here.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::context::{is_subcontext, Context, ContextId, ContextPoset};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ToleranceConfig};

/// Ordered tensor factorization of an ambient space, Kronecker row-major:
/// factor 0 is the most significant index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFactorization {
    pub name: String,
    pub dims: Vec<usize>,
}

impl TensorFactorization {
    pub fn new(name: impl Into<String>, dims: Vec<usize>) -> Result<Self> {
        let f = TensorFactorization {
            name: name.into(),
            dims,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.len() < 2 || self.dims.contains(&0) {
            return Err(Error::Validation(format!(
                "factorization {:?} needs at least two nonzero factors",
                self.name
            )));
        }
        if self
            .dims
            .iter()
            .try_fold(1usize, |a, &d| a.checked_mul(d))
            .is_none()
        {
            return Err(Error::Validation(format!(
                "factorization {:?} overflows",
                self.name
            )));
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// `I ⊗ … ⊗ m ⊗ … ⊗ I` with `m` at position `factor`.
    pub fn lift(&self, factor: usize, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = *self.dims.get(factor).ok_or_else(|| {
            Error::Validation(format!(
                "factor index {factor} out of range for {:?}",
                self.name
            ))
        })?;
        if m.dim() != d {
            return Err(Error::DimensionMismatch {
                left: d,
                right: m.dim(),
            });
        }
        let before: usize = self.dims[..factor].iter().product();
        let after: usize = self.dims[factor + 1..].iter().product();
        let mut out = m.clone();
        if before > 1 {
            out = ComplexMatrix::identity(before).kron(&out)?;
        }
        if after > 1 {
            out = out.kron(&ComplexMatrix::identity(after))?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessKind {
    TensorFactor {
        factorization: String,
        factor: usize,
    },
    ExplicitSurjection {
        mapping: Vec<usize>,
    },
}

/// A declared reduction `from ▷ to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedundancyWitness {
    pub from_id: ContextId,
    pub to_id: ContextId,
    #[serde(flatten)]
    pub kind: WitnessKind,
}

/// A witness that passed validation, with the induced map from the minimal
/// projections of `from` onto those of `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckedWitness {
    pub witness: RedundancyWitness,
    pub image: Vec<usize>,
}

fn invalid(reason: String, projection_index: Option<usize>) -> Error {
    Error::WitnessInvalid {
        reason,
        projection_index,
    }
}

pub fn validate_witness(
    w: &RedundancyWitness,
    poset: &ContextPoset,
    factorizations: &[TensorFactorization],
    tol: &ToleranceConfig,
) -> Result<CheckedWitness> {
    let from = poset.context(w.from_id)?;
    let to = poset.context(w.to_id)?;
    if w.from_id == w.to_id {
        return Err(invalid("witness reduces a context to itself".into(), None));
    }
    let image = match &w.kind {
        WitnessKind::TensorFactor {
            factorization,
            factor,
        } => {
            let f = factorizations
                .iter()
                .find(|f| &f.name == factorization)
                .ok_or_else(|| invalid(format!("unknown factorization {factorization:?}"), None))?;
            tensor_image(from, to, f, *factor, tol)?
        }
        WitnessKind::ExplicitSurjection { mapping } => {
            if mapping.len() != from.algebra_dim() {
                return Err(invalid(
                    format!(
                        "mapping has {} entries for {} points",
                        mapping.len(),
                        from.algebra_dim()
                    ),
                    None,
                ));
            }
            let mut hit = vec![false; to.algebra_dim()];
            for (i, &j) in mapping.iter().enumerate() {
                if j >= hit.len() {
                    return Err(invalid(format!("target {j} out of range"), Some(i)));
                }
                hit[j] = true;
            }
            if let Some(j) = hit.iter().position(|h| !h) {
                return Err(invalid(format!("mapping is not onto; misses {j}"), None));
            }
            mapping.clone()
        }
    };
    Ok(CheckedWitness {
        witness: w.clone(),
        image,
    })
}

/// Match every minimal projection of `from` with `q ⊗ I` (at position
/// `factor`) for a minimal projection `q` of `to`.
fn tensor_image(
    from: &Context,
    to: &Context,
    f: &TensorFactorization,
    factor: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<usize>> {
    if from.dim() != f.ambient_dim() {
        return Err(invalid(
            format!(
                "context dimension {} does not match factorization {:?} ({})",
                from.dim(),
                f.name,
                f.ambient_dim()
            ),
            None,
        ));
    }
    if f.dims.get(factor) != Some(&to.dim()) {
        return Err(invalid(
            format!(
                "retained factor {factor} of {:?} does not have dimension {}",
                f.name,
                to.dim()
            ),
            None,
        ));
    }
    if from.algebra_dim() != to.algebra_dim() {
        return Err(invalid(
            format!(
                "point counts differ: {} vs {}",
                from.algebra_dim(),
                to.algebra_dim()
            ),
            None,
        ));
    }
    let lifted: Vec<ComplexMatrix> = to
        .minimal_projections()
        .iter()
        .map(|q| f.lift(factor, q.matrix()))
        .collect::<Result<_>>()?;
    let mut image = Vec::with_capacity(from.algebra_dim());
    for (i, p) in from.minimal_projections().iter().enumerate() {
        let j = lifted
            .iter()
            .position(|l| l.distance(p.matrix()) <= tol.eps_rank)
            .ok_or_else(|| {
                invalid(
                    format!("minimal projection {i} is not of the form q ⊗ I"),
                    Some(i),
                )
            })?;
        image.push(j);
    }
    Ok(image)
}

/// Try every (factorization, factor, from, to) combination and keep the
/// tensor witnesses that validate.
pub fn derive_tensor_witnesses(
    poset: &ContextPoset,
    factorizations: &[TensorFactorization],
    tol: &ToleranceConfig,
) -> Vec<RedundancyWitness> {
    let mut out = Vec::new();
    for f in factorizations {
        for factor in 0..f.dims.len() {
            for from in poset.ids() {
                for to in poset.ids() {
                    let w = RedundancyWitness {
                        from_id: from,
                        to_id: to,
                        kind: WitnessKind::TensorFactor {
                            factorization: f.name.clone(),
                            factor,
                        },
                    };
                    if validate_witness(&w, poset, factorizations, tol).is_ok() {
                        out.push(w);
                    }
                }
            }
        }
    }
    out
}

/// Validated witnesses over a fixed set of context ids.
#[derive(Debug, Clone, Default)]
pub struct RedundancyRegistry {
    known: BTreeSet<ContextId>,
    witnesses: Vec<CheckedWitness>,
    reductions: BTreeMap<ContextId, BTreeSet<ContextId>>,
}

impl RedundancyRegistry {
    pub fn new(
        poset: &ContextPoset,
        witnesses: &[RedundancyWitness],
        factorizations: &[TensorFactorization],
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        let checked = witnesses
            .iter()
            .map(|w| validate_witness(w, poset, factorizations, tol))
            .collect::<Result<Vec<_>>>()?;
        let mut reductions: BTreeMap<ContextId, BTreeSet<ContextId>> = BTreeMap::new();
        for c in &checked {
            reductions
                .entry(c.witness.from_id)
                .or_default()
                .insert(c.witness.to_id);
        }
        Ok(RedundancyRegistry {
            known: poset.ids().collect(),
            witnesses: checked,
            reductions,
        })
    }

    pub fn witnesses(&self) -> &[CheckedWitness] {
        &self.witnesses
    }

    fn reachable(&self, start: ContextId) -> BTreeSet<ContextId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in self.reductions.get(&v).into_iter().flatten() {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// `redundant ▷* reduced` in the reflexive-transitive closure.
    pub fn redundancy_leq(&self, reduced: ContextId, redundant: ContextId) -> Result<bool> {
        for id in [reduced, redundant] {
            if !self.known.contains(&id) {
                return Err(Error::UnknownContextId(id));
            }
        }
        Ok(reduced == redundant || self.reachable(redundant).contains(&reduced))
    }

    /// Strongly connected groups of two or more contexts that reduce to
    /// each other.
    pub fn cycles(&self) -> Vec<Vec<ContextId>> {
        let mut out: Vec<Vec<ContextId>> = Vec::new();
        let mut placed = BTreeSet::new();
        for &v in &self.known {
            if placed.contains(&v) {
                continue;
            }
            let down = self.reachable(v);
            if !down.contains(&v) {
                continue;
            }
            let group: Vec<ContextId> = down
                .iter()
                .copied()
                .filter(|&w| self.reachable(w).contains(&v))
                .collect();
            placed.extend(group.iter().copied());
            if group.len() >= 2 {
                out.push(group);
            }
        }
        out
    }
}

/// `a ⊢ b`: `b` refines `a`.
pub fn resolution_leq(a: &Context, b: &Context, tol: &ToleranceConfig) -> Result<bool> {
    is_subcontext(a, b, tol)
}

pub fn redundancy_leq(
    reduced: ContextId,
    redundant: ContextId,
    registry: &RedundancyRegistry,
) -> Result<bool> {
    registry.redundancy_leq(reduced, redundant)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimaxReport {
    pub resolution_maximal: Vec<ContextId>,
    pub redundancy_minimal: Vec<ContextId>,
    pub minimax: Vec<ContextId>,
    /// Incomparable minimax contexts sharing an ambient dimension.
    pub ties: Vec<Vec<ContextId>>,
    pub redundancy_cycles: Vec<Vec<ContextId>>,
}

pub fn minimax_contexts(
    poset: &ContextPoset,
    registry: &RedundancyRegistry,
) -> Result<MinimaxReport> {
    let ids: Vec<ContextId> = poset.ids().collect();
    let resolution_maximal: Vec<ContextId> = ids
        .iter()
        .copied()
        .filter(|&v| !ids.iter().any(|&w| poset.includes(v, w)))
        .collect();
    let mut redundancy_minimal = Vec::new();
    for &v in &ids {
        let mut strict = false;
        for &w in &ids {
            if w != v && registry.redundancy_leq(w, v)? && !registry.redundancy_leq(v, w)? {
                strict = true;
                break;
            }
        }
        if !strict {
            redundancy_minimal.push(v);
        }
    }
    let minimax: Vec<ContextId> = resolution_maximal
        .iter()
        .copied()
        .filter(|v| redundancy_minimal.contains(v))
        .collect();
    let mut by_dim: BTreeMap<usize, Vec<ContextId>> = BTreeMap::new();
    for &v in &minimax {
        by_dim.entry(poset.context(v)?.dim()).or_default().push(v);
    }
    let ties = by_dim.into_values().filter(|g| g.len() >= 2).collect();
    Ok(MinimaxReport {
        resolution_maximal,
        redundancy_minimal,
        minimax,
        ties,
        redundancy_cycles: registry.cycles(),
    })
}
