//! Dense complex linear algebra at desk scale.
//!
//! Everything here works on small square matrices (at most [`MAX_DIM`]) and
//! decides equalities through the explicit thresholds of a
//! [`ToleranceConfig`]. All "norms" are the entrywise maximum modulus.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex64 = nalgebra::Complex<f64>;

/// Hard cap on ambient dimension for any dense matrix.
pub const MAX_DIM: usize = 64;

/// Cap on dimension for commutant computations (an n²×n² system).
pub const MAX_COMMUTANT_DIM: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub eps_herm: f64,
    pub eps_idem: f64,
    pub eps_rank: f64,
    pub round_digits: u32,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps_herm: 1e-9,
            eps_idem: 1e-9,
            eps_rank: 1e-9,
            round_digits: 6,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, eps) in [
            ("eps_herm", self.eps_herm),
            ("eps_idem", self.eps_idem),
            ("eps_rank", self.eps_rank),
        ] {
            if !(eps > 0.0 && eps <= 1e-3) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {eps} must lie in (0, 1e-3]"
                )));
            }
        }
        if !(4..=12).contains(&self.round_digits) {
            return Err(Error::InvalidTolerance(format!(
                "round_digits = {} must lie in [4, 12]",
                self.round_digits
            )));
        }
        Ok(())
    }

    fn round_scale(&self) -> f64 {
        10f64.powi(self.round_digits as i32)
    }
}

/// Square complex matrix of dimension `1..=MAX_DIM`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape(format!("{}x{} matrix", m.nrows(), m.ncols())));
        }
        if m.nrows() == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        if m.nrows() > MAX_DIM {
            return Err(Error::ModelTooLarge(format!(
                "dimension {} exceeds cap {MAX_DIM}",
                m.nrows()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Shape("non-finite entry".into()));
        }
        Ok(ComplexMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Shape(format!(
                "row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        ComplexMatrix(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * s))
    }

    /// Kronecker product `self ⊗ other`, row-major convention.
    pub fn kron(&self, other: &ComplexMatrix) -> Result<Self> {
        Self::from_dmatrix(self.0.kronecker(&other.0))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        max_abs(&(&self.0 - &other.0))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.0 - self.0.adjoint()))
    }

    fn check_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn symmetrized(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Hermitian idempotent matrix with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    matrix: ComplexMatrix,
    rank: usize,
}

impl Projection {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn zero(dim: usize) -> Self {
        Projection {
            matrix: ComplexMatrix::zeros(dim),
            rank: 0,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Projection {
            matrix: ComplexMatrix::identity(dim),
            rank: dim,
        }
    }

    /// Projection onto the span of the orthonormal columns of `basis`.
    pub(crate) fn from_orthonormal_columns(dim: usize, basis: &DMatrix<Complex64>) -> Self {
        if basis.ncols() == 0 {
            return Projection::zero(dim);
        }
        let m = symmetrized(&(basis * basis.adjoint()));
        Projection {
            matrix: ComplexMatrix(m),
            rank: basis.ncols(),
        }
    }

    /// Sum of pairwise orthogonal projections; ranks add.
    pub(crate) fn orthogonal_sum<'a, I>(dim: usize, parts: I) -> Self
    where
        I: IntoIterator<Item = &'a Projection>,
    {
        let mut m = DMatrix::zeros(dim, dim);
        let mut rank = 0;
        for p in parts {
            m += &p.matrix.0;
            rank += p.rank;
        }
        Projection {
            matrix: ComplexMatrix(symmetrized(&m)),
            rank,
        }
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        let m = DMatrix::<Complex64>::identity(n, n) - &self.matrix.0;
        Projection {
            matrix: ComplexMatrix(symmetrized(&m)),
            rank: n - self.rank,
        }
    }

    /// Entries rounded to `round_digits` decimals, row-major, real part
    /// before imaginary part.
    pub fn rounded_entries(&self, tol: &ToleranceConfig) -> Vec<i64> {
        let scale = tol.round_scale();
        let m = &self.matrix.0;
        let n = m.nrows();
        let mut out = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                out.push((z.re * scale).round() as i64);
                out.push((z.im * scale).round() as i64);
            }
        }
        out
    }

    /// Byte key whose lexicographic order matches the numeric order of
    /// [`Projection::rounded_entries`].
    pub fn canonical_key(&self, tol: &ToleranceConfig) -> Vec<u8> {
        encode_ordered(&self.rounded_entries(tol))
    }
}

pub(crate) fn encode_ordered(values: &[i64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 8);
    for v in values {
        out.extend_from_slice(&((*v as u64) ^ (1u64 << 63)).to_be_bytes());
    }
    out
}

/// Sort projections into canonical order.
pub fn canonical_sort(projections: &mut [Projection], tol: &ToleranceConfig) {
    let mut keyed: Vec<(Vec<i64>, Projection)> = projections
        .iter()
        .map(|p| (p.rounded_entries(tol), p.clone()))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    for (slot, (_, p)) in projections.iter_mut().zip(keyed) {
        *slot = p;
    }
}

pub fn validate_projection(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Projection> {
    let herm = m.hermiticity_residual();
    if herm > tol.eps_herm {
        return Err(Error::NotHermitian { residual: herm });
    }
    let sym = symmetrized(&m.0);
    let idem = max_abs(&(&sym * &sym - &sym));
    if idem > tol.eps_idem {
        return Err(Error::NotIdempotent { residual: idem });
    }
    let eig = SymmetricEigen::new(sym.clone());
    let mut rank = 0;
    for &lambda in eig.eigenvalues.iter() {
        let off = lambda.abs().min((lambda - 1.0).abs());
        if off > tol.eps_rank {
            return Err(Error::NotIdempotent { residual: off });
        }
        if (lambda - 1.0).abs() <= tol.eps_rank {
            rank += 1;
        }
    }
    Ok(Projection {
        matrix: ComplexMatrix(sym),
        rank,
    })
}

pub fn commutes(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<bool> {
    Ok(commutator_residual(a, b)? <= tol.eps_rank)
}

pub fn commutator_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_dim(b)?;
    Ok(max_abs(&(&a.0 * &b.0 - &b.0 * &a.0)))
}

/// `Q ≤ P`: the range of `q` lies inside the range of `p`.
pub fn range_contains(p: &Projection, q: &Projection, tol: &ToleranceConfig) -> Result<bool> {
    p.matrix.check_dim(&q.matrix)?;
    let pq = &p.matrix.0 * &q.matrix.0;
    Ok(max_abs(&(pq - &q.matrix.0)) <= tol.eps_rank)
}

/// The ranges of `p` and `q` are not orthogonal.
pub fn overlaps(p: &Projection, q: &Projection, tol: &ToleranceConfig) -> Result<bool> {
    p.matrix.check_dim(&q.matrix)?;
    Ok(max_abs(&(&p.matrix.0 * &q.matrix.0)) > tol.eps_rank)
}

/// Orthonormal eigenvectors of a Hermitian matrix, clustered into
/// eigenspaces. Eigenvalues closer than `10^-round_digits` to their sorted
/// neighbour share a cluster. Returns (mean eigenvalue, basis) pairs in
/// ascending eigenvalue order.
fn eigenspaces(h: DMatrix<Complex64>, tol: &ToleranceConfig) -> Vec<(f64, DMatrix<Complex64>)> {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(Ordering::Equal)
    });
    let gap = 1.0 / tol.round_scale();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for i in order {
        let lambda = eig.eigenvalues[i];
        match clusters.last_mut() {
            Some(c) if lambda - last <= gap => c.push(i),
            _ => clusters.push(vec![i]),
        }
        last = lambda;
    }
    clusters
        .into_iter()
        .map(|c| {
            let mean = c.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / c.len() as f64;
            let cols: Vec<_> = c.iter().map(|&i| eig.eigenvectors.column(i)).collect();
            (mean, DMatrix::from_columns(&cols))
        })
        .collect()
}

/// Orthonormal basis of the eigenvectors of a PSD Hermitian matrix whose
/// eigenvalue is `<= threshold` (`null = true`) or `> threshold`.
fn psd_subspace(h: DMatrix<Complex64>, threshold: f64, null: bool) -> DMatrix<Complex64> {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let cols: Vec<_> = (0..n)
        .filter(|&i| (eig.eigenvalues[i] <= threshold) == null)
        .map(|i| eig.eigenvectors.column(i))
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Projection onto `range(P) ∩ range(Q)`.
pub fn meet(p: &Projection, q: &Projection, tol: &ToleranceConfig) -> Result<Projection> {
    p.matrix.check_dim(&q.matrix)?;
    let n = p.dim();
    let id = DMatrix::<Complex64>::identity(n, n);
    let h = symmetrized(&((&id - &p.matrix.0) + (&id - &q.matrix.0)));
    let basis = psd_subspace(h, tol.eps_rank, true);
    Ok(Projection::from_orthonormal_columns(n, &basis))
}

/// Projection onto `range(P) + range(Q)`.
pub fn join(p: &Projection, q: &Projection, tol: &ToleranceConfig) -> Result<Projection> {
    p.matrix.check_dim(&q.matrix)?;
    let n = p.dim();
    let h = symmetrized(&(&p.matrix.0 + &q.matrix.0));
    let basis = psd_subspace(h, tol.eps_rank, false);
    Ok(Projection::from_orthonormal_columns(n, &basis))
}

/// Check that a family is Hermitian and pairwise commuting, reporting the
/// first offending pair by index.
pub fn check_commuting_hermitian(family: &[ComplexMatrix], tol: &ToleranceConfig) -> Result<()> {
    for a in family {
        let r = a.hermiticity_residual();
        if r > tol.eps_herm {
            return Err(Error::NotHermitian { residual: r });
        }
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let r = commutator_residual(&family[i], &family[j])?;
            if r > tol.eps_rank {
                return Err(Error::NonCommutingFamily {
                    first: i,
                    second: j,
                    residual: r,
                });
            }
        }
    }
    Ok(())
}

/// Minimal projections of the unital abelian algebra generated by a
/// commuting Hermitian family, in canonical order.
///
/// Joint eigenspaces are found by successive refinement: each generator is
/// compressed onto every current block and the block is split along the
/// eigenspaces of the compression.
pub fn simultaneous_diagonalize(
    dim: usize,
    family: &[ComplexMatrix],
    tol: &ToleranceConfig,
) -> Result<Vec<Projection>> {
    for a in family {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: a.dim(),
            });
        }
    }
    check_commuting_hermitian(family, tol)?;

    let mut blocks: Vec<DMatrix<Complex64>> = vec![DMatrix::identity(dim, dim)];
    for a in family {
        let herm = symmetrized(&a.0);
        let mut next = Vec::with_capacity(blocks.len());
        for u in &blocks {
            let compressed = symmetrized(&(u.adjoint() * &herm * u));
            for (_, v) in eigenspaces(compressed, tol) {
                next.push(u * v);
            }
        }
        blocks = next;
    }
    let mut projections: Vec<Projection> = blocks
        .iter()
        .map(|u| Projection::from_orthonormal_columns(dim, u))
        .collect();
    canonical_sort(&mut projections, tol);
    Ok(projections)
}

/// Linear dimension of `{X : XA = AX for all A in family}`.
///
/// Solves the stacked system `(I ⊗ A − Aᵀ ⊗ I) vec(X) = 0` and counts
/// singular values at or below `eps_rank`.
pub fn commutant_dimension(
    dim: usize,
    family: &[ComplexMatrix],
    tol: &ToleranceConfig,
) -> Result<usize> {
    if dim > MAX_COMMUTANT_DIM {
        return Err(Error::ModelTooLarge(format!(
            "commutant of dimension {dim} exceeds cap {MAX_COMMUTANT_DIM}"
        )));
    }
    for a in family {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: a.dim(),
            });
        }
    }
    let n2 = dim * dim;
    if family.is_empty() {
        return Ok(n2);
    }
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let mut stacked = DMatrix::<Complex64>::zeros(family.len() * n2, n2);
    for (k, a) in family.iter().enumerate() {
        // column-major vec: vec(AX - XA) = (I ⊗ A - Aᵀ ⊗ I) vec(X)
        let block = id.kronecker(&a.0) - a.0.transpose().kronecker(&id);
        stacked.view_mut((k * n2, 0), (n2, n2)).copy_from(&block);
    }
    let sv = if stacked.nrows() > n2 {
        // compress to a square factor before the SVD
        let r = stacked.qr().r();
        r.singular_values()
    } else {
        stacked.singular_values()
    };
    let rank = sv.iter().filter(|&&s| s > tol.eps_rank).count();
    Ok(n2 - rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn ket0() -> Projection {
        validate_projection(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0]), &tol()).unwrap()
    }

    fn ket1() -> Projection {
        validate_projection(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0]), &tol()).unwrap()
    }

    fn plus() -> Projection {
        let m = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        validate_projection(&m, &tol()).unwrap()
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn tolerance_bounds() {
        assert!(tol().validate().is_ok());
        let mut t = tol();
        t.eps_rank = 0.0;
        assert!(t.validate().is_err());
        let mut t = tol();
        t.eps_herm = 1e-2;
        assert!(t.validate().is_err());
        let mut t = tol();
        t.round_digits = 3;
        assert!(t.validate().is_err());
        t.round_digits = 13;
        assert!(t.validate().is_err());
    }

    #[test]
    fn dimension_cap() {
        let big = DMatrix::<Complex64>::identity(MAX_DIM + 1, MAX_DIM + 1);
        assert!(matches!(
            ComplexMatrix::from_dmatrix(big),
            Err(Error::ModelTooLarge(_))
        ));
        assert!(ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![]]).is_err());
    }

    #[test]
    fn validate_examples() {
        let p = validate_projection(&ComplexMatrix::identity(2), &tol()).unwrap();
        assert_eq!(p.rank(), 2);
        let p = validate_projection(&ComplexMatrix::zeros(3), &tol()).unwrap();
        assert_eq!(p.rank(), 0);
        assert_eq!(plus().rank(), 1);
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        match validate_projection(&m, &tol()) {
            Err(Error::NotHermitian { residual }) => assert!((residual - 1.0).abs() < 1e-12),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
        let m = ComplexMatrix::from_real_diagonal(&[2.0, 0.0]);
        assert!(matches!(
            validate_projection(&m, &tol()),
            Err(Error::NotIdempotent { .. })
        ));
    }

    #[test]
    fn validate_resymmetrizes() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.0, -0.5 + 1e-11)],
            vec![c(0.0, 0.5), c(0.5, 0.0)],
        ])
        .unwrap();
        let p = validate_projection(&m, &tol()).unwrap();
        assert_eq!(p.rank(), 1);
        assert_eq!(p.matrix().hermiticity_residual(), 0.0);
    }

    #[test]
    fn commutation_examples() {
        let d1 = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let d2 = ComplexMatrix::from_real_diagonal(&[3.0, 4.0]);
        assert!(commutes(&d1, &d2, &tol()).unwrap());
        assert!(!commutes(&sigma_x(), &sigma_z(), &tol()).unwrap());
        assert_eq!(commutator_residual(&sigma_x(), &sigma_z()).unwrap(), 2.0);
        assert!(commutes(&sigma_x(), &ComplexMatrix::identity(2), &tol()).unwrap());
        assert!(matches!(
            commutes(&d1, &ComplexMatrix::identity(3), &tol()),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn containment_and_overlap_examples() {
        let t = tol();
        let id = Projection::identity(2);
        assert!(range_contains(&id, &plus(), &t).unwrap());
        assert!(range_contains(&plus(), &plus(), &t).unwrap());
        assert!(!range_contains(&ket0(), &plus(), &t).unwrap());
        assert!(!overlaps(&ket0(), &ket1(), &t).unwrap());
        assert!(overlaps(&ket0(), &plus(), &t).unwrap());
        assert!(!overlaps(&Projection::zero(2), &plus(), &t).unwrap());
    }

    #[test]
    fn lattice_examples() {
        let t = tol();
        let m = meet(&plus(), &Projection::identity(2), &t).unwrap();
        assert!(m.matrix().distance(plus().matrix()) < 1e-12);
        let j = join(&plus(), &Projection::zero(2), &t).unwrap();
        assert!(j.matrix().distance(plus().matrix()) < 1e-12);
        let j = join(&ket0(), &ket1(), &t).unwrap();
        assert_eq!(j.rank(), 2);
        assert!(j.matrix().distance(&ComplexMatrix::identity(2)) < 1e-12);
        let m = meet(&ket0(), &plus(), &t).unwrap();
        assert_eq!(m.rank(), 0);
        assert_eq!(m.matrix().max_abs(), 0.0);
    }

    #[test]
    fn diagonalize_examples() {
        let t = tol();
        let qs = simultaneous_diagonalize(
            3,
            &[ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 3.0])],
            &t,
        )
        .unwrap();
        assert_eq!(qs.len(), 3);
        assert!(qs.iter().all(|q| q.rank() == 1));

        let qs = simultaneous_diagonalize(2, &[ComplexMatrix::identity(2)], &t).unwrap();
        assert_eq!(qs.len(), 1);
        assert_eq!(qs[0].rank(), 2);

        let qs = simultaneous_diagonalize(2, &[sigma_x()], &t).unwrap();
        assert_eq!(qs.len(), 2);
        let minus = Projection::identity(2);
        let minus = minus.matrix().as_dmatrix() - plus().matrix().as_dmatrix();
        // canonical order puts |−⟩⟨−| (entries -0.5 off-diagonal) first
        assert!(max_abs(&(qs[0].matrix().as_dmatrix() - minus)) < 1e-12);
        assert!(qs[1].matrix().distance(plus().matrix()) < 1e-12);

        let err = simultaneous_diagonalize(2, &[sigma_x(), sigma_z()], &t).unwrap_err();
        assert!(matches!(
            err,
            Error::NonCommutingFamily {
                first: 0,
                second: 1,
                ..
            }
        ));
        let bad = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            simultaneous_diagonalize(2, &[bad], &t),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn commutant_examples() {
        let t = tol();
        let units: Vec<ComplexMatrix> = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| {
                let mut m = DMatrix::zeros(2, 2);
                m[(i, j)] = c(1.0, 0.0);
                ComplexMatrix::from_dmatrix(m).unwrap()
            })
            .collect();
        assert_eq!(commutant_dimension(2, &units, &t).unwrap(), 1);
        assert_eq!(commutant_dimension(3, &[], &t).unwrap(), 9);
        assert_eq!(
            commutant_dimension(2, &[ComplexMatrix::from_real_diagonal(&[1.0, 2.0])], &t).unwrap(),
            2
        );
        assert!(matches!(
            commutant_dimension(33, &[], &t),
            Err(Error::ModelTooLarge(_))
        ));
    }

    #[test]
    fn canonical_key_orders_numerically() {
        let a = encode_ordered(&[-5, 3]);
        let b = encode_ordered(&[-4, 0]);
        let z = encode_ordered(&[0, 0]);
        assert!(a < b && b < z);
    }
}
