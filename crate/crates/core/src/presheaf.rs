//! Gelfand spectra of contexts and the restriction maps between them.
//!
//! At finite dimension the characters of a context are in bijection with
//! its minimal projections: the character attached to `Q` sends an element
//! of the context to its eigenvalue on `range(Q)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::context::{is_subcontext, Context, ContextId, ContextPoset};
use crate::error::{Error, Result};
use crate::matrix::{
    commutator_residual, range_contains, Complex64, ComplexMatrix, ToleranceConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Character {
    pub context_id: ContextId,
    pub index: usize,
}

pub fn spectrum(id: ContextId, v: &Context) -> Vec<Character> {
    (0..v.algebra_dim())
        .map(|index| Character {
            context_id: id,
            index,
        })
        .collect()
}

/// `χ(a)`: the eigenvalue of `a` on the range of the character's minimal
/// projection. Fails with `NotInContext` unless `a` commutes with every
/// minimal projection and acts as a scalar on each of them.
pub fn evaluate_character(
    chi: Character,
    v: &Context,
    a: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<Complex64> {
    if a.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: v.dim(),
        });
    }
    let qs = v.minimal_projections();
    if chi.index >= qs.len() {
        return Err(Error::Validation(format!(
            "character index {} out of range for {} points",
            chi.index,
            qs.len()
        )));
    }
    let bound = tol.eps_rank * a.max_abs().max(1.0);
    let mut value = None;
    for (i, q) in qs.iter().enumerate() {
        if commutator_residual(a, q.matrix())? > bound {
            return Err(Error::NotInContext(chi.context_id));
        }
        let qm = q.matrix().as_dmatrix();
        let qa = qm * a.as_dmatrix();
        let lambda = qa.trace() / q.rank() as f64;
        let resid = crate::matrix::max_abs(&(&qa * qm - qm.map(|z| z * lambda)));
        if resid > bound {
            return Err(Error::NotInContext(chi.context_id));
        }
        if i == chi.index {
            value = Some(lambda);
        }
    }
    Ok(value.expect("index checked above"))
}

/// A restriction map `Γ(super) → Γ(sub)`, stored as the image index of
/// every point of the larger spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Restriction {
    pub sub: ContextId,
    pub sup: ContextId,
    pub image: Vec<usize>,
}

impl Restriction {
    pub fn apply(&self, chi: Character) -> Character {
        Character {
            context_id: self.sub,
            index: self.image[chi.index],
        }
    }
}

/// Each minimal projection `Q` of `sup` goes to the unique minimal
/// projection `Q'` of `sub` with `Q ≤ Q'`.
pub fn restriction_map(
    sub_id: ContextId,
    sub: &Context,
    sup_id: ContextId,
    sup: &Context,
    tol: &ToleranceConfig,
) -> Result<Restriction> {
    if !is_subcontext(sub, sup, tol)? {
        return Err(Error::NotASubcontext {
            sub: sub_id,
            sup: sup_id,
        });
    }
    let mut image = Vec::with_capacity(sup.algebra_dim());
    for (i, q) in sup.minimal_projections().iter().enumerate() {
        let mut targets = Vec::new();
        for (j, q_sub) in sub.minimal_projections().iter().enumerate() {
            if range_contains(q_sub, q, tol)? {
                targets.push(j);
            }
        }
        match targets.as_slice() {
            [j] => image.push(*j),
            _ => return Err(Error::AmbiguousRestriction { index: i }),
        }
    }
    let mut hit = vec![false; sub.algebra_dim()];
    for &j in &image {
        hit[j] = true;
    }
    if let Some(j) = hit.iter().position(|h| !h) {
        return Err(Error::Validation(format!(
            "restriction {sup_id} → {sub_id} misses point {j}"
        )));
    }
    Ok(Restriction {
        sub: sub_id,
        sup: sup_id,
        image,
    })
}

/// All spectra and restriction maps of a poset, including identities.
#[derive(Debug, Clone)]
pub struct PresheafData {
    pub spectra: BTreeMap<ContextId, Vec<Character>>,
    pub restrictions: BTreeMap<(ContextId, ContextId), Restriction>,
}

pub fn presheaf(poset: &ContextPoset, tol: &ToleranceConfig) -> Result<PresheafData> {
    let mut spectra = BTreeMap::new();
    let mut restrictions = BTreeMap::new();
    for id in poset.ids() {
        let v = poset.context(id)?;
        spectra.insert(id, spectrum(id, v));
        restrictions.insert((id, id), restriction_map(id, v, id, v, tol)?);
    }
    for &(sub, sup) in poset.inclusion_edges() {
        let r = restriction_map(sub, poset.context(sub)?, sup, poset.context(sup)?, tol)?;
        restrictions.insert((sub, sup), r);
    }
    Ok(PresheafData {
        spectra,
        restrictions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctorialityViolation {
    pub lower: ContextId,
    pub middle: ContextId,
    pub upper: ContextId,
    pub point: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct FunctorialityReport {
    pub chains_checked: usize,
    pub violations: Vec<FunctorialityViolation>,
}

impl FunctorialityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every chain `W ⊆ V ⊆ U` (identities included) check that
/// restricting `U → W` directly agrees with restricting through `V`.
pub fn check_functoriality(
    poset: &ContextPoset,
    tol: &ToleranceConfig,
) -> Result<FunctorialityReport> {
    let data = presheaf(poset, tol)?;
    let mut report = FunctorialityReport::default();
    let leq = |a: ContextId, b: ContextId| a == b || poset.includes(a, b);
    let ids: Vec<ContextId> = poset.ids().collect();
    for &w in &ids {
        for &v in ids.iter().filter(|&&v| leq(w, v)) {
            for &u in ids.iter().filter(|&&u| leq(v, u)) {
                report.chains_checked += 1;
                let direct = &data.restrictions[&(w, u)];
                let upper = &data.restrictions[&(v, u)];
                let lower = &data.restrictions[&(w, v)];
                for point in 0..direct.image.len() {
                    if direct.image[point] != lower.image[upper.image[point]] {
                        report.violations.push(FunctorialityViolation {
                            lower: w,
                            middle: v,
                            upper: u,
                            point,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{context_from_commuting, Context};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn diag(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(d)
    }

    #[test]
    fn spectrum_sizes() {
        let t = tol();
        assert_eq!(spectrum(ContextId(0), &Context::trivial(3, &t)).len(), 1);
        let vz = context_from_commuting(2, &[diag(&[1.0, -1.0])], &t).unwrap();
        assert_eq!(spectrum(ContextId(1), &vz).len(), 2);
        let v = context_from_commuting(3, &[diag(&[1.0, 2.0, 2.0])], &t).unwrap();
        assert_eq!(spectrum(ContextId(2), &v).len(), 2);
    }

    #[test]
    fn evaluation_examples() {
        let t = tol();
        let vz = context_from_commuting(2, &[diag(&[1.0, -1.0])], &t).unwrap();
        let id = ContextId(1);
        for chi in spectrum(id, &vz) {
            let one = evaluate_character(chi, &vz, &ComplexMatrix::identity(2), &t).unwrap();
            assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        // canonical order: |1⟩⟨1| (entries 0,..,1) sorts before |0⟩⟨0|
        let chi = Character {
            context_id: id,
            index: 0,
        };
        let val = evaluate_character(chi, &vz, &diag(&[1.0, 2.0]), &t).unwrap();
        assert!((val - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let sx = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            evaluate_character(chi, &vz, &sx, &t),
            Err(Error::NotInContext(ContextId(1)))
        ));
    }

    #[test]
    fn restriction_examples() {
        let t = tol();
        let fine = context_from_commuting(3, &[diag(&[1.0, 2.0, 3.0])], &t).unwrap();
        let coarse = context_from_commuting(3, &[diag(&[1.0, 1.0, 2.0])], &t).unwrap();
        let triv = Context::trivial(3, &t);
        let r = restriction_map(ContextId(1), &fine, ContextId(1), &fine, &t).unwrap();
        assert_eq!(r.image, vec![0, 1, 2]);
        let r = restriction_map(ContextId(0), &triv, ContextId(1), &fine, &t).unwrap();
        assert_eq!(r.image, vec![0, 0, 0]);
        let r = restriction_map(ContextId(2), &coarse, ContextId(1), &fine, &t).unwrap();
        // fine points in canonical order: e3, e2, e1; coarse: e3, e1+e2
        assert_eq!(r.image, vec![0, 1, 1]);
        assert!(matches!(
            restriction_map(ContextId(1), &fine, ContextId(2), &coarse, &t),
            Err(Error::NotASubcontext { .. })
        ));
    }
}
