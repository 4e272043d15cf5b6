//! Contexts (unital abelian subalgebras) in canonical form and the finite
//! context category generated by a set of available observables.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    canonical_sort, check_commuting_hermitian, commutator_residual, encode_ordered, overlaps,
    range_contains, simultaneous_diagonalize, validate_projection, ComplexMatrix, Projection,
    ToleranceConfig,
};
use crate::orders::TensorFactorization;

/// Cap on the number of observables accepted for subset enumeration.
pub const MAX_OBSERVABLES: usize = 16;

/// Cap on minimal projections for [`all_projections`].
pub const MAX_ENUMERATED_ATOMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextId(pub usize);

impl fmt::Display for ContextId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// A unital abelian subalgebra, stored as its minimal projections in
/// canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    dim: usize,
    minimal_projections: Vec<Projection>,
    canonical_key: Vec<u8>,
}

impl Context {
    /// Build a context from a complete family of pairwise orthogonal
    /// projections. Zero projections are dropped.
    pub fn from_minimal_projections(
        dim: usize,
        projections: Vec<Projection>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        let mut projections: Vec<Projection> =
            projections.into_iter().filter(|p| p.rank() > 0).collect();
        if projections.is_empty() {
            return Err(Error::Validation(
                "context has no minimal projections".into(),
            ));
        }
        for p in &projections {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: p.dim(),
                });
            }
        }
        for i in 0..projections.len() {
            for j in i + 1..projections.len() {
                if overlaps(&projections[i], &projections[j], tol)? {
                    return Err(Error::Validation(format!(
                        "minimal projections {i} and {j} are not orthogonal"
                    )));
                }
            }
        }
        let total = Projection::orthogonal_sum(dim, &projections);
        let resid = total.matrix().distance(&ComplexMatrix::identity(dim));
        if resid > tol.eps_rank {
            return Err(Error::Validation(format!(
                "minimal projections do not sum to identity (residual {resid:e})"
            )));
        }
        canonical_sort(&mut projections, tol);
        let canonical_key = context_key(dim, &projections, tol);
        Ok(Context {
            dim,
            minimal_projections: projections,
            canonical_key,
        })
    }

    /// The scalars `{λI}`.
    pub fn trivial(dim: usize, tol: &ToleranceConfig) -> Self {
        let projections = vec![Projection::identity(dim)];
        let canonical_key = context_key(dim, &projections, tol);
        Context {
            dim,
            minimal_projections: projections,
            canonical_key,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn minimal_projections(&self) -> &[Projection] {
        &self.minimal_projections
    }

    /// Linear dimension of the algebra.
    pub fn algebra_dim(&self) -> usize {
        self.minimal_projections.len()
    }

    pub fn canonical_key(&self) -> &[u8] {
        &self.canonical_key
    }

    pub fn key_hex(&self) -> String {
        hex::encode(&self.canonical_key)
    }

    /// Indices of the minimal projections lying under `p`.
    pub(crate) fn atoms_below(&self, p: &Projection, tol: &ToleranceConfig) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, q) in self.minimal_projections.iter().enumerate() {
            if range_contains(p, q, tol)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Sum of the minimal projections at `indices`.
    pub fn sum_of(&self, indices: &[usize]) -> Projection {
        Projection::orthogonal_sum(
            self.dim,
            indices.iter().map(|&i| &self.minimal_projections[i]),
        )
    }

    /// Whether `p` is one of the context's projections (a sum of minimal
    /// projections).
    pub fn contains_projection(&self, p: &Projection, tol: &ToleranceConfig) -> Result<bool> {
        let below = self.atoms_below(p, tol)?;
        Ok(self.sum_of(&below).matrix().distance(p.matrix()) <= 10.0 * tol.eps_rank)
    }
}

fn context_key(dim: usize, projections: &[Projection], tol: &ToleranceConfig) -> Vec<u8> {
    let mut key = encode_ordered(&[dim as i64, projections.len() as i64]);
    for p in projections {
        key.extend(p.canonical_key(tol));
    }
    key
}

/// Context generated by a commuting Hermitian family; the empty family
/// yields the trivial context.
pub fn context_from_commuting(
    dim: usize,
    family: &[ComplexMatrix],
    tol: &ToleranceConfig,
) -> Result<Context> {
    if family.is_empty() {
        return Ok(Context::trivial(dim, tol));
    }
    let projections = simultaneous_diagonalize(dim, family, tol)?;
    let canonical_key = context_key(dim, &projections, tol);
    Ok(Context {
        dim,
        minimal_projections: projections,
        canonical_key,
    })
}

/// `sub ⊆ sup` as algebras.
pub fn is_subcontext(sub: &Context, sup: &Context, tol: &ToleranceConfig) -> Result<bool> {
    if sub.dim != sup.dim {
        return Err(Error::DimensionMismatch {
            left: sub.dim,
            right: sup.dim,
        });
    }
    if sub.algebra_dim() > sup.algebra_dim() {
        return Ok(false);
    }
    for q in &sub.minimal_projections {
        let below = sup.atoms_below(q, tol)?;
        if sup.sum_of(&below).matrix().distance(q.matrix()) > 10.0 * tol.eps_rank {
            return Ok(false);
        }
    }
    Ok(true)
}

fn same_context(a: &Context, b: &Context, tol: &ToleranceConfig) -> Result<bool> {
    if a.canonical_key == b.canonical_key {
        return Ok(true);
    }
    if a.dim != b.dim || a.algebra_dim() != b.algebra_dim() {
        return Ok(false);
    }
    Ok(is_subcontext(a, b, tol)? && is_subcontext(b, a, tol)?)
}

/// Every projection of a context: all `2^k` sums of its minimal projections,
/// indexed by bitmask over the canonical order.
pub fn all_projections(v: &Context, tol: &ToleranceConfig) -> Result<Vec<Projection>> {
    let k = v.algebra_dim();
    if k > MAX_ENUMERATED_ATOMS {
        return Err(Error::ContextTooLarge(k));
    }
    (0u32..(1 << k))
        .map(|mask| {
            let indices: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            validate_projection(v.sum_of(&indices).matrix(), tol)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct NamedObservable {
    pub name: String,
    pub matrix: ComplexMatrix,
}

/// The generating data of the ambient algebra: named Hermitian observables.
///
/// Observables live either on the primary dimension `dim` or on the product
/// dimension of a declared tensor factorization.
#[derive(Debug, Clone)]
pub struct AvailableObservables {
    dim: usize,
    observables: Vec<NamedObservable>,
    factorizations: Vec<TensorFactorization>,
}

impl AvailableObservables {
    pub fn new(
        dim: usize,
        observables: Vec<NamedObservable>,
        factorizations: Vec<TensorFactorization>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        let mut names = BTreeSet::new();
        for f in &factorizations {
            if !names.insert(format!("factorization:{}", f.name)) {
                return Err(Error::Validation(format!(
                    "duplicate factorization name {:?}",
                    f.name
                )));
            }
        }
        for o in &observables {
            if !names.insert(o.name.clone()) {
                return Err(Error::Validation(format!(
                    "duplicate observable name {:?}",
                    o.name
                )));
            }
            let r = o.matrix.hermiticity_residual();
            if r > tol.eps_herm {
                return Err(Error::Validation(format!(
                    "observable {:?} is not Hermitian (residual {r:e})",
                    o.name
                )));
            }
            let d = o.matrix.dim();
            if d != dim && !factorizations.iter().any(|f| f.ambient_dim() == d) {
                return Err(Error::Validation(format!(
                    "observable {:?} has dimension {d}, which is neither the model dimension {dim} \
                     nor the product dimension of a declared factorization",
                    o.name
                )));
            }
        }
        Ok(AvailableObservables {
            dim,
            observables,
            factorizations,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn observables(&self) -> &[NamedObservable] {
        &self.observables
    }

    pub fn factorizations(&self) -> &[TensorFactorization] {
        &self.factorizations
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.observables.iter().position(|o| o.name == name)
    }

    /// Multiply every observable by a real scalar.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for o in &mut out.observables {
            o.matrix = o.matrix.scale(s);
        }
        out
    }

    /// Ambient dimensions in enumeration order: the primary dimension, then
    /// any other dimension in order of first appearance.
    fn ambient_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.dim];
        for o in &self.observables {
            if !dims.contains(&o.matrix.dim()) {
                dims.push(o.matrix.dim());
            }
        }
        dims
    }
}

/// The finite context category generated by available observables.
#[derive(Debug, Clone)]
pub struct ContextPoset {
    contexts: Vec<Context>,
    generators: Vec<Vec<usize>>,
    inclusion_edges: BTreeSet<(ContextId, ContextId)>,
    hasse_edges: Vec<(ContextId, ContextId)>,
}

impl ContextPoset {
    /// Assemble a poset from deduplicated contexts, computing inclusion
    /// edges by pairwise [`is_subcontext`] within each ambient dimension.
    pub fn from_contexts(
        contexts: Vec<Context>,
        generators: Vec<Vec<usize>>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        if generators.len() != contexts.len() {
            return Err(Error::Validation(
                "generator list does not match context list".into(),
            ));
        }
        let mut inclusion_edges = BTreeSet::new();
        for (i, a) in contexts.iter().enumerate() {
            for (j, b) in contexts.iter().enumerate() {
                if i != j && a.dim == b.dim && is_subcontext(a, b, tol)? {
                    inclusion_edges.insert((ContextId(i), ContextId(j)));
                }
            }
        }
        let mut poset = ContextPoset {
            contexts,
            generators,
            inclusion_edges,
            hasse_edges: Vec::new(),
        };
        poset.hasse_edges = hasse(&poset)?;
        Ok(poset)
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ContextId> {
        (0..self.contexts.len()).map(ContextId)
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn context(&self, id: ContextId) -> Result<&Context> {
        self.contexts.get(id.0).ok_or(Error::UnknownContextId(id))
    }

    pub fn generators(&self, id: ContextId) -> Result<&[usize]> {
        self.generators
            .get(id.0)
            .map(|g| g.as_slice())
            .ok_or(Error::UnknownContextId(id))
    }

    pub fn inclusion_edges(&self) -> &BTreeSet<(ContextId, ContextId)> {
        &self.inclusion_edges
    }

    pub fn hasse_edges(&self) -> &[(ContextId, ContextId)] {
        &self.hasse_edges
    }

    /// Strict inclusion `a ⊊ b`.
    pub fn includes(&self, a: ContextId, b: ContextId) -> bool {
        self.inclusion_edges.contains(&(a, b))
    }

    /// Id of the context equal to `v`, if present.
    pub fn find(&self, v: &Context, tol: &ToleranceConfig) -> Result<Option<ContextId>> {
        if let Some(i) = self
            .contexts
            .iter()
            .position(|c| c.canonical_key == v.canonical_key)
        {
            return Ok(Some(ContextId(i)));
        }
        for (i, c) in self.contexts.iter().enumerate() {
            if same_context(c, v, tol)? {
                return Ok(Some(ContextId(i)));
            }
        }
        Ok(None)
    }

    /// Bottom elements, one per ambient dimension.
    pub fn bottoms(&self) -> Vec<ContextId> {
        self.ids()
            .filter(|&a| self.inclusion_edges.iter().all(|&(_, sup)| sup != a))
            .collect()
    }
}

/// Transitive reduction of the strict inclusion relation, sorted by
/// `(sub, super)`.
pub fn hasse(poset: &ContextPoset) -> Result<Vec<(ContextId, ContextId)>> {
    let rel = &poset.inclusion_edges;
    for &(a, b) in rel {
        if a == b {
            return Err(Error::CycleDetected(a, b));
        }
        if rel.contains(&(b, a)) {
            return Err(Error::CycleDetected(a.min(b), a.max(b)));
        }
    }
    let mut succ: HashMap<ContextId, Vec<ContextId>> = HashMap::new();
    for &(a, b) in rel {
        succ.entry(a).or_default().push(b);
    }
    let mut edges: Vec<(ContextId, ContextId)> = rel
        .iter()
        .copied()
        .filter(|&(a, b)| {
            !succ
                .get(&a)
                .into_iter()
                .flatten()
                .any(|&c| c != b && rel.contains(&(c, b)))
        })
        .collect();
    edges.sort();
    Ok(edges)
}

/// Shortlex enumeration of index subsets of `0..m` of size at most `k`.
fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k.min(m) {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l| l + 1);
            for i in start..m {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Enumerate every context generated by a pairwise commuting subset of the
/// available observables (of size at most `max_subset_size`), deduplicated
/// by canonical key. Ids follow generation order: per ambient dimension,
/// subsets in shortlex order over observable indices, first generator wins.
pub fn enumerate_contexts(
    avail: &AvailableObservables,
    tol: &ToleranceConfig,
    max_subset_size: usize,
) -> Result<ContextPoset> {
    let m = avail.observables.len();
    if m > MAX_OBSERVABLES {
        return Err(Error::ModelTooLarge(format!(
            "{m} observables exceeds cap {MAX_OBSERVABLES}"
        )));
    }
    if max_subset_size > m {
        return Err(Error::Validation(format!(
            "max_subset_size {max_subset_size} exceeds observable count {m}"
        )));
    }

    let mut contexts: Vec<Context> = Vec::new();
    let mut generators: Vec<Vec<usize>> = Vec::new();
    for dim in avail.ambient_dims() {
        let group: Vec<usize> = (0..m)
            .filter(|&i| avail.observables[i].matrix.dim() == dim)
            .collect();
        let g = group.len();
        let mut commuting = vec![vec![true; g]; g];
        for a in 0..g {
            for b in a + 1..g {
                let r = commutator_residual(
                    &avail.observables[group[a]].matrix,
                    &avail.observables[group[b]].matrix,
                )?;
                commuting[a][b] = r <= tol.eps_rank;
                commuting[b][a] = commuting[a][b];
            }
        }
        for subset in subsets(g, max_subset_size) {
            let pairwise = subset
                .iter()
                .enumerate()
                .all(|(x, &a)| subset[x + 1..].iter().all(|&b| commuting[a][b]));
            if !pairwise {
                continue;
            }
            let family: Vec<ComplexMatrix> = subset
                .iter()
                .map(|&a| avail.observables[group[a]].matrix.clone())
                .collect();
            check_commuting_hermitian(&family, tol)?;
            let v = context_from_commuting(dim, &family, tol)?;
            let mut duplicate = false;
            for c in &contexts {
                if same_context(c, &v, tol)? {
                    duplicate = true;
                    break;
                }
            }
            if !duplicate {
                contexts.push(v);
                generators.push(subset.iter().map(|&a| group[a]).collect());
            }
        }
    }
    ContextPoset::from_contexts(contexts, generators, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn diag(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(d)
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn obs(name: &str, m: ComplexMatrix) -> NamedObservable {
        NamedObservable {
            name: name.into(),
            matrix: m,
        }
    }

    #[test]
    fn generated_context_examples() {
        let t = tol();
        let v = context_from_commuting(3, &[], &t).unwrap();
        assert_eq!(v.algebra_dim(), 1);
        let v = context_from_commuting(3, &[diag(&[1.0, 2.0, 2.0])], &t).unwrap();
        let mut ranks: Vec<usize> = v.minimal_projections().iter().map(|p| p.rank()).collect();
        ranks.sort();
        assert_eq!(ranks, vec![1, 2]);
        let v = context_from_commuting(3, &[diag(&[1.0, 2.0, 2.0]), diag(&[5.0, 3.0, 4.0])], &t)
            .unwrap();
        assert_eq!(v.algebra_dim(), 3);
        assert!(v.minimal_projections().iter().all(|p| p.rank() == 1));
    }

    #[test]
    fn subcontext_examples() {
        let t = tol();
        let vz = context_from_commuting(2, &[diag(&[1.0, -1.0])], &t).unwrap();
        let vx = context_from_commuting(2, &[sigma_x()], &t).unwrap();
        let triv = Context::trivial(2, &t);
        assert!(is_subcontext(&triv, &vz, &t).unwrap());
        assert!(is_subcontext(&vz, &vz, &t).unwrap());
        assert!(!is_subcontext(&vz, &vx, &t).unwrap());
        assert!(!is_subcontext(&vz, &triv, &t).unwrap());
        assert!(matches!(
            is_subcontext(&triv, &Context::trivial(3, &t), &t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn from_minimal_projections_rejects_incomplete_families() {
        let t = tol();
        let p0 = validate_projection(&diag(&[1.0, 0.0, 0.0]), &t).unwrap();
        let p1 = validate_projection(&diag(&[0.0, 1.0, 0.0]), &t).unwrap();
        let p01 = validate_projection(&diag(&[1.0, 1.0, 0.0]), &t).unwrap();
        assert!(Context::from_minimal_projections(3, vec![p0.clone(), p1.clone()], &t).is_err());
        assert!(Context::from_minimal_projections(3, vec![p0, p01], &t).is_err());
    }

    #[test]
    fn enumerate_single_observable() {
        let t = tol();
        let avail =
            AvailableObservables::new(2, vec![obs("d", diag(&[1.0, 2.0]))], vec![], &t).unwrap();
        let poset = enumerate_contexts(&avail, &t, 1).unwrap();
        assert_eq!(poset.len(), 2);
        assert_eq!(poset.hasse_edges(), &[(ContextId(0), ContextId(1))]);
        assert_eq!(poset.bottoms(), vec![ContextId(0)]);
    }

    #[test]
    fn enumerate_qubit_pair() {
        let t = tol();
        let avail = AvailableObservables::new(
            2,
            vec![obs("Sz", diag(&[1.0, -1.0])), obs("Sx", sigma_x())],
            vec![],
            &t,
        )
        .unwrap();
        let poset = enumerate_contexts(&avail, &t, 2).unwrap();
        assert_eq!(poset.len(), 3);
        assert!(!poset.includes(ContextId(1), ContextId(2)));
        assert!(!poset.includes(ContextId(2), ContextId(1)));
        assert_eq!(
            poset.hasse_edges(),
            &[(ContextId(0), ContextId(1)), (ContextId(0), ContextId(2))]
        );
        assert_eq!(poset.generators(ContextId(2)).unwrap(), &[1]);
    }

    #[test]
    fn enumerate_commuting_refinement() {
        let t = tol();
        let avail = AvailableObservables::new(
            3,
            vec![
                obs("fine", diag(&[1.0, 2.0, 3.0])),
                obs("coarse", diag(&[1.0, 1.0, 2.0])),
            ],
            vec![],
            &t,
        )
        .unwrap();
        let poset = enumerate_contexts(&avail, &t, 2).unwrap();
        assert_eq!(poset.len(), 3);
        // trivial ⊂ coarse ⊂ fine as a chain; two covering edges
        assert_eq!(poset.hasse_edges().len(), 2);
        assert!(poset.includes(ContextId(2), ContextId(1)));
        assert_eq!(poset.inclusion_edges().len(), 3);
    }

    #[test]
    fn enumeration_caps() {
        let t = tol();
        let many: Vec<NamedObservable> = (0..17)
            .map(|i| obs(&format!("o{i}"), diag(&[i as f64, 0.0])))
            .collect();
        let avail = AvailableObservables::new(2, many, vec![], &t).unwrap();
        assert!(matches!(
            enumerate_contexts(&avail, &t, 1),
            Err(Error::ModelTooLarge(_))
        ));
    }

    #[test]
    fn duplicate_names_rejected() {
        let t = tol();
        let r = AvailableObservables::new(
            2,
            vec![obs("a", diag(&[1.0, 0.0])), obs("a", diag(&[0.0, 1.0]))],
            vec![],
            &t,
        );
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn hasse_detects_cycles() {
        let t = tol();
        let mut poset = ContextPoset::from_contexts(
            vec![Context::trivial(2, &t), Context::trivial(2, &t)],
            vec![vec![], vec![]],
            &t,
        );
        // two copies of the same context include each other
        assert!(matches!(poset, Err(Error::CycleDetected(..))));
        poset = ContextPoset::from_contexts(vec![Context::trivial(2, &t)], vec![vec![]], &t);
        assert!(poset.unwrap().hasse_edges().is_empty());
    }

    #[test]
    fn all_projections_examples() {
        let t = tol();
        let triv = Context::trivial(2, &t);
        let ps = all_projections(&triv, &t).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].rank(), 0);
        assert_eq!(ps[1].rank(), 2);

        let vz = context_from_commuting(2, &[diag(&[1.0, -1.0])], &t).unwrap();
        assert_eq!(all_projections(&vz, &t).unwrap().len(), 4);

        let v3 = context_from_commuting(3, &[diag(&[1.0, 2.0, 3.0])], &t).unwrap();
        let ps = all_projections(&v3, &t).unwrap();
        assert_eq!(ps.len(), 8);
        for a in &ps {
            for b in &ps {
                assert!(crate::matrix::commutes(a.matrix(), b.matrix(), &t).unwrap());
            }
        }
    }

    #[test]
    fn subsets_are_shortlex() {
        assert_eq!(
            subsets(3, 2),
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2]
            ]
        );
    }
}
