//! Outer and inner daseinisation of projections into contexts.
//!
//! The outer daseinisation of `p` in `v` is the least projection of `v`
//! above `p`; the inner one is the greatest projection of `v` below `p`.
//! Both are sums of minimal projections of `v`, so neither needs a search
//! over the whole projection lattice of the context.

use std::collections::BTreeMap;

use crate::context::{Context, ContextId, ContextPoset};
use crate::error::{Error, Result};
use crate::matrix::{overlaps, range_contains, Projection, ToleranceConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct DaseinisationResult {
    pub context_id: ContextId,
    pub outer: Projection,
    pub inner: Projection,
}

fn check_dims(p: &Projection, v: &Context) -> Result<()> {
    if p.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: v.dim(),
        });
    }
    Ok(())
}

/// Return `p` itself when the computed sum coincides with it, so that
/// projections already in the context are fixed exactly.
fn settle(p: &Projection, sum: Projection, tol: &ToleranceConfig) -> Projection {
    if sum.rank() == p.rank() && sum.matrix().distance(p.matrix()) <= 10.0 * tol.eps_rank {
        p.clone()
    } else {
        sum
    }
}

pub fn outer_daseinisation(
    p: &Projection,
    v: &Context,
    tol: &ToleranceConfig,
) -> Result<Projection> {
    check_dims(p, v)?;
    let mut hit = Vec::new();
    for (i, q) in v.minimal_projections().iter().enumerate() {
        if overlaps(q, p, tol)? {
            hit.push(i);
        }
    }
    Ok(settle(p, v.sum_of(&hit), tol))
}

pub fn inner_daseinisation(
    p: &Projection,
    v: &Context,
    tol: &ToleranceConfig,
) -> Result<Projection> {
    check_dims(p, v)?;
    let mut under = Vec::new();
    for (i, q) in v.minimal_projections().iter().enumerate() {
        if range_contains(p, q, tol)? {
            under.push(i);
        }
    }
    Ok(settle(p, v.sum_of(&under), tol))
}

pub fn daseinise(
    p: &Projection,
    id: ContextId,
    v: &Context,
    tol: &ToleranceConfig,
) -> Result<DaseinisationResult> {
    Ok(DaseinisationResult {
        context_id: id,
        outer: outer_daseinisation(p, v, tol)?,
        inner: inner_daseinisation(p, v, tol)?,
    })
}

/// Daseinise `p` into every context of the poset sharing its dimension.
/// Contexts on other ambient dimensions are skipped.
pub fn daseinise_over_poset(
    p: &Projection,
    poset: &ContextPoset,
    tol: &ToleranceConfig,
) -> Result<BTreeMap<ContextId, DaseinisationResult>> {
    let mut out = BTreeMap::new();
    for id in poset.ids() {
        let v = poset.context(id)?;
        if v.dim() != p.dim() {
            continue;
        }
        out.insert(id, daseinise(p, id, v, tol)?);
    }
    Ok(out)
}
