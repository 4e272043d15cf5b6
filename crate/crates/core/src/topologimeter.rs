//! Discretized line-versus-circle toy model.
//!
//! The ambient space is `C² ⊗ C^m ⊗ C^n`: a 2×2 matrix slot, an x-grid of
//! `m` points and a y-grid of `n` points, with basis index
//! `b·m·n + x·n + y`. Two maximal abelian contexts are modelled:
//!
//! * `A1`, matrices `[[f(y), g(y)], [g(y), f(y)]]`. Diagonalizing the
//!   symmetric 2×2 form splits it into an `f+g` block and an `f−g` block,
//!   each a copy of the y-grid (a path).
//! * `A2`, matrices `diag(p(x), q(x))` with `p` periodic. The `p` block is
//!   the x-grid with cyclic adjacency, the `q` block the x-grid as a path.
//!
//! Topology is carried by the declared adjacency of the grids, since a
//! finite spectrum has none of its own.
//!
//! Structured mode keeps every spectral point symbolic and scales to large
//! grids. Full-matrix mode (ambient dimension at most 64) also materializes
//! the generators and their contexts for cross-checking.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::{context_from_commuting, Context};
use crate::error::{Error, Result};
use crate::matrix::{
    commutant_dimension, validate_projection, ComplexMatrix, ToleranceConfig, MAX_COMMUTANT_DIM,
    MAX_DIM,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridModel {
    pub m: usize,
    pub n: usize,
}

impl GridModel {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::Validation(format!(
                "x-grid size m = {m} must be at least 3"
            )));
        }
        if n < 2 {
            return Err(Error::Validation(format!(
                "y-grid size n = {n} must be at least 2"
            )));
        }
        if m.checked_mul(n).and_then(|k| k.checked_mul(2)).is_none() {
            return Err(Error::ModelTooLarge("grid size overflows".into()));
        }
        Ok(GridModel { m, n })
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.m * self.n
    }

    fn index(&self, b: usize, x: usize, y: usize) -> usize {
        b * self.m * self.n + x * self.n + y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContextTag {
    A1,
    A2,
}

impl fmt::Display for ContextTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContextTag::A1 => "A1",
            ContextTag::A2 => "A2",
        })
    }
}

impl FromStr for ContextTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A1" | "a1" => Ok(ContextTag::A1),
            "A2" | "a2" => Ok(ContextTag::A2),
            other => Err(Error::UnknownContextTag(other.to_string())),
        }
    }
}

/// Spectral block of a context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Block {
    /// `f + g` eigenvalue of the A1 form, over the y-grid.
    Sum,
    /// `f − g` eigenvalue of the A1 form, over the y-grid.
    Difference,
    /// Top-left `p(x)` slot of A2, over the cyclic x-grid.
    Periodic,
    /// Bottom-right `q(x)` slot of A2, over the x-grid as a path.
    Free,
}

impl Block {
    pub fn context(self) -> ContextTag {
        match self {
            Block::Sum | Block::Difference => ContextTag::A1,
            Block::Periodic | Block::Free => ContextTag::A2,
        }
    }

    fn cyclic(self) -> bool {
        self == Block::Periodic
    }

    fn of(tag: ContextTag) -> [Block; 2] {
        match tag {
            ContextTag::A1 => [Block::Sum, Block::Difference],
            ContextTag::A2 => [Block::Periodic, Block::Free],
        }
    }
}

/// A point of a context's spectrum: a block and a grid coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub block: Block,
    pub coord: usize,
}

impl GridModel {
    fn block_len(&self, block: Block) -> usize {
        match block.context() {
            ContextTag::A1 => self.n,
            ContextTag::A2 => self.m,
        }
    }

    /// Rank of the minimal projection behind one spectral point: the size
    /// of the coordinate the context ignores.
    pub fn point_rank(&self, block: Block) -> usize {
        match block.context() {
            ContextTag::A1 => self.m,
            ContextTag::A2 => self.n,
        }
    }

    pub fn block_rank(&self, block: Block) -> usize {
        self.block_len(block) * self.point_rank(block)
    }

    pub fn points(&self, tag: ContextTag) -> Vec<SpectralPoint> {
        Block::of(tag)
            .into_iter()
            .flat_map(|block| {
                (0..self.block_len(block)).map(move |coord| SpectralPoint { block, coord })
            })
            .collect()
    }

    /// Minimal projection for a spectral point, as a dense matrix.
    pub fn point_matrix(&self, point: SpectralPoint) -> Result<ComplexMatrix> {
        let dim = self.ambient_dim();
        if dim > MAX_DIM {
            return Err(Error::ModelTooLarge(format!(
                "ambient dimension {dim} exceeds full-matrix cap {MAX_DIM}"
            )));
        }
        let mut rows = vec![vec![0.0; dim]; dim];
        match point.block {
            Block::Sum | Block::Difference => {
                let sign = if point.block == Block::Sum { 1.0 } else { -1.0 };
                let y = point.coord;
                for x in 0..self.m {
                    for (b1, b2, s) in [(0, 0, 1.0), (0, 1, sign), (1, 0, sign), (1, 1, 1.0)] {
                        rows[self.index(b1, x, y)][self.index(b2, x, y)] = 0.5 * s;
                    }
                }
            }
            Block::Periodic | Block::Free => {
                let b = if point.block == Block::Periodic { 0 } else { 1 };
                let x = point.coord;
                for y in 0..self.n {
                    let i = self.index(b, x, y);
                    rows[i][i] = 1.0;
                }
            }
        }
        ComplexMatrix::from_real_rows(&rows)
    }

    /// The context built directly from its symbolic spectral points.
    pub fn symbolic_context(&self, tag: ContextTag, tol: &ToleranceConfig) -> Result<Context> {
        let projections = self
            .points(tag)
            .into_iter()
            .map(|p| validate_projection(&self.point_matrix(p)?, tol))
            .collect::<Result<Vec<_>>>()?;
        Context::from_minimal_projections(self.ambient_dim(), projections, tol)
    }

    /// Single structured generator of each context, built from separating
    /// sample functions: `f(y) = y + 1`, `g(y) = 1/4`, `p(x) = x + 1`,
    /// `q(x) = −(x + 1)`.
    pub fn generator(&self, tag: ContextTag) -> Result<ComplexMatrix> {
        let dim = self.ambient_dim();
        if dim > MAX_DIM {
            return Err(Error::ModelTooLarge(format!(
                "ambient dimension {dim} exceeds full-matrix cap {MAX_DIM}"
            )));
        }
        let mut rows = vec![vec![0.0; dim]; dim];
        for x in 0..self.m {
            for y in 0..self.n {
                let (i0, i1) = (self.index(0, x, y), self.index(1, x, y));
                match tag {
                    ContextTag::A1 => {
                        let f = y as f64 + 1.0;
                        let g = 0.25;
                        rows[i0][i0] = f;
                        rows[i1][i1] = f;
                        rows[i0][i1] = g;
                        rows[i1][i0] = g;
                    }
                    ContextTag::A2 => {
                        rows[i0][i0] = x as f64 + 1.0;
                        rows[i1][i1] = -(x as f64 + 1.0);
                    }
                }
            }
        }
        ComplexMatrix::from_real_rows(&rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Structured,
    FullMatrix,
}

#[derive(Debug, Clone)]
pub struct FullMatrixData {
    pub generators: BTreeMap<ContextTag, ComplexMatrix>,
    /// Contexts obtained by diagonalizing the generators.
    pub contexts: BTreeMap<ContextTag, Context>,
}

/// The toy model: grid, active spectral blocks per context and, in
/// full-matrix mode, the dense generators and contexts.
#[derive(Debug, Clone)]
pub struct Topologimeter {
    grid: GridModel,
    mode: Mode,
    blocks: BTreeMap<ContextTag, Vec<Block>>,
    full: Option<FullMatrixData>,
}

pub fn build_topologimeter(
    grid: GridModel,
    mode: Mode,
    tol: &ToleranceConfig,
) -> Result<Topologimeter> {
    let blocks = [ContextTag::A1, ContextTag::A2]
        .into_iter()
        .map(|t| (t, Block::of(t).to_vec()))
        .collect();
    let full = match mode {
        Mode::Structured => None,
        Mode::FullMatrix => {
            let mut generators = BTreeMap::new();
            let mut contexts = BTreeMap::new();
            for tag in [ContextTag::A1, ContextTag::A2] {
                let g = grid.generator(tag)?;
                contexts.insert(
                    tag,
                    context_from_commuting(grid.ambient_dim(), std::slice::from_ref(&g), tol)?,
                );
                generators.insert(tag, g);
            }
            Some(FullMatrixData {
                generators,
                contexts,
            })
        }
    };
    Ok(Topologimeter {
        grid,
        mode,
        blocks,
        full,
    })
}

impl Topologimeter {
    pub fn grid(&self) -> GridModel {
        self.grid
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn full(&self) -> Option<&FullMatrixData> {
        self.full.as_ref()
    }

    pub fn blocks(&self, tag: ContextTag) -> &[Block] {
        &self.blocks[&tag]
    }

    /// Number of spectral points over the active blocks.
    pub fn spectrum_size(&self, tag: ContextTag) -> usize {
        self.blocks(tag)
            .iter()
            .map(|&b| self.grid.block_len(b))
            .sum()
    }

    /// Drop a spectral block, e.g. to model a state supported on the other
    /// block only. The last block of a context cannot be removed.
    pub fn without_block(&self, block: Block) -> Result<Self> {
        let tag = block.context();
        let remaining: Vec<Block> = self.blocks[&tag]
            .iter()
            .copied()
            .filter(|&b| b != block)
            .collect();
        if remaining.is_empty() {
            return Err(Error::Validation(format!(
                "cannot remove the last block of {tag}"
            )));
        }
        let mut out = self.clone();
        out.blocks.insert(tag, remaining);
        Ok(out)
    }

    pub fn spectrum_graph(&self, tag: ContextTag) -> SpectrumGraph {
        graph_for_blocks(&self.grid, self.blocks(tag))
    }

    /// Whether each full-matrix context matches its symbolic construction.
    pub fn cross_mode_agreement(
        &self,
        tol: &ToleranceConfig,
    ) -> Result<BTreeMap<ContextTag, bool>> {
        let full = self
            .full
            .as_ref()
            .ok_or_else(|| Error::Validation("cross-mode check needs full-matrix mode".into()))?;
        let mut out = BTreeMap::new();
        for (tag, ctx) in &full.contexts {
            let symbolic = self.grid.symbolic_context(*tag, tol)?;
            out.insert(*tag, symbolic.canonical_key() == ctx.canonical_key());
        }
        Ok(out)
    }
}

/// Finite graph on spectral points with grid adjacency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumGraph {
    pub vertices: Vec<SpectralPoint>,
    pub edges: BTreeSet<(usize, usize)>,
    pub components: Vec<Vec<usize>>,
}

impl SpectrumGraph {
    /// Edges are normalized to `(min, max)`; components are found by
    /// breadth-first search and listed in order of their smallest vertex.
    pub fn new(
        vertices: Vec<SpectralPoint>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let n = vertices.len();
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Validation(format!("bad edge ({a}, {b})")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &set {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        Ok(SpectrumGraph {
            vertices,
            edges: set,
            components,
        })
    }
}

fn graph_for_blocks(grid: &GridModel, blocks: &[Block]) -> SpectrumGraph {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for &block in blocks {
        let base = vertices.len();
        let len = grid.block_len(block);
        vertices.extend((0..len).map(|coord| SpectralPoint { block, coord }));
        edges.extend((0..len - 1).map(|i| (base + i, base + i + 1)));
        if block.cyclic() {
            edges.push((base + len - 1, base));
        }
    }
    SpectrumGraph::new(vertices, edges).expect("grid edges are in range")
}

/// Spectrum graph of the full context on a grid.
pub fn spectrum_graph(tag: ContextTag, grid: &GridModel) -> SpectrumGraph {
    graph_for_blocks(grid, &Block::of(tag))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyClass {
    PathLike,
    CircleLike,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentTopology {
    pub block: Option<Block>,
    pub vertices: usize,
    pub edges: usize,
    pub b0: usize,
    pub b1: i64,
    pub class: TopologyClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologyReport {
    pub components: Vec<ComponentTopology>,
    pub total_b0: usize,
    pub total_b1: i64,
}

pub fn topology_report(sg: &SpectrumGraph) -> TopologyReport {
    let mut owner = vec![0usize; sg.vertices.len()];
    for (c, comp) in sg.components.iter().enumerate() {
        for &v in comp {
            owner[v] = c;
        }
    }
    let mut edge_counts = vec![0usize; sg.components.len()];
    for &(a, _) in &sg.edges {
        edge_counts[owner[a]] += 1;
    }
    let components: Vec<ComponentTopology> = sg
        .components
        .iter()
        .zip(edge_counts)
        .map(|(comp, e)| {
            let v = comp.len();
            let b1 = e as i64 - v as i64 + 1;
            let first = sg.vertices[comp[0]].block;
            let block = comp
                .iter()
                .all(|&i| sg.vertices[i].block == first)
                .then_some(first);
            ComponentTopology {
                block,
                vertices: v,
                edges: e,
                b0: 1,
                b1,
                class: match b1 {
                    0 => TopologyClass::PathLike,
                    1 => TopologyClass::CircleLike,
                    _ => TopologyClass::Other,
                },
            }
        })
        .collect();
    TopologyReport {
        total_b0: components.len(),
        total_b1: components.iter().map(|c| c.b1).sum(),
        components,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementOutcome {
    pub context: ContextTag,
    pub seed: u64,
    pub block: Block,
    pub probability: f64,
    pub topology: ComponentTopology,
}

/// Seeded measurement in a context: one active spectral block is selected
/// with probability proportional to its rank (the maximally mixed state),
/// and the topology of the surviving configuration space is reported.
pub fn measure(model: &Topologimeter, tag: ContextTag, seed: u64) -> Result<MeasurementOutcome> {
    let blocks = model.blocks(tag);
    let weights: Vec<usize> = blocks.iter().map(|&b| model.grid.block_rank(b)).collect();
    let total: usize = weights.iter().sum();
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::Validation(format!("block weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = dist.sample(&mut rng);
    let block = blocks[k];
    let report = topology_report(&graph_for_blocks(&model.grid, &[block]));
    Ok(MeasurementOutcome {
        context: tag,
        seed,
        block,
        probability: weights[k] as f64 / total as f64,
        topology: report.components[0].clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalityEntry {
    /// Linear dimension of the context.
    pub context_dim: usize,
    /// Linear dimension of the reduced ambient algebra.
    pub ambient_algebra_dim: usize,
    /// Ambient dimension recomputed as the commutant of its commutant.
    pub ambient_check: usize,
    pub commutant_dim: usize,
    pub maximal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalityReport {
    pub grid: GridModel,
    pub entries: BTreeMap<ContextTag, MaximalityEntry>,
}

impl MaximalityReport {
    pub fn passed(&self) -> bool {
        self.entries.values().all(|e| e.maximal)
    }
}

fn path_adjacency(k: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![0.0; k]; k];
    for i in 0..k.saturating_sub(1) {
        rows[i][i + 1] = 1.0;
        rows[i + 1][i] = 1.0;
    }
    rows
}

fn ramp(k: usize) -> Vec<f64> {
    (1..=k).map(|i| i as f64).collect()
}

/// Hermitian generators of the commutant of the reduced ambient algebra
/// for a context: 2×2 matrices over functions of the context's own grid
/// coordinate, tensored with the identity on the coordinate it ignores.
///
/// For `A2` that algebra is `M₂ ⊗ D_m ⊗ I_n`, whose commutant
/// `I₂ ⊗ D_m ⊗ M_n` is generated by `diag(1..m)` on x and by `diag(1..n)`
/// with the path adjacency on y. `A1` is the same with x and y swapped.
fn ambient_commutant_generators(grid: &GridModel, tag: ContextTag) -> Result<Vec<ComplexMatrix>> {
    let i2 = ComplexMatrix::identity(2);
    let (im, in_) = (
        ComplexMatrix::identity(grid.m),
        ComplexMatrix::identity(grid.n),
    );
    let dx = ComplexMatrix::from_real_diagonal(&ramp(grid.m));
    let dy = ComplexMatrix::from_real_diagonal(&ramp(grid.n));
    let kron3 = |a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix| a.kron(b)?.kron(c);
    match tag {
        ContextTag::A2 => {
            let jy = ComplexMatrix::from_real_rows(&path_adjacency(grid.n))?;
            Ok(vec![
                kron3(&i2, &dx, &in_)?,
                kron3(&i2, &im, &dy)?,
                kron3(&i2, &im, &jy)?,
            ])
        }
        ContextTag::A1 => {
            let jx = ComplexMatrix::from_real_rows(&path_adjacency(grid.m))?;
            Ok(vec![
                kron3(&i2, &im, &dy)?,
                kron3(&i2, &dx, &in_)?,
                kron3(&i2, &jx, &in_)?,
            ])
        }
    }
}

/// Commutant dimension of `context` inside the reduced ambient algebra
/// associated with `ambient`, via `(context ∪ B')' = context' ∩ B`.
pub fn check_maximal_in(
    context: &Context,
    ambient: ContextTag,
    grid: &GridModel,
    tol: &ToleranceConfig,
) -> Result<MaximalityEntry> {
    let dim = grid.ambient_dim();
    if dim > MAX_COMMUTANT_DIM {
        return Err(Error::ModelTooLarge(format!(
            "maximality check needs ambient dimension <= {MAX_COMMUTANT_DIM}, got {dim}"
        )));
    }
    if context.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: context.dim(),
        });
    }
    let b_prime = ambient_commutant_generators(grid, ambient)?;
    let ambient_check = commutant_dimension(dim, &b_prime, tol)?;
    let mut family = b_prime;
    family.extend(
        context
            .minimal_projections()
            .iter()
            .map(|q| q.matrix().clone()),
    );
    let commutant_dim = commutant_dimension(dim, &family, tol)?;
    let ambient_algebra_dim = match ambient {
        ContextTag::A1 => 4 * grid.n,
        ContextTag::A2 => 4 * grid.m,
    };
    Ok(MaximalityEntry {
        context_dim: context.algebra_dim(),
        ambient_algebra_dim,
        ambient_check,
        commutant_dim,
        maximal: commutant_dim == context.algebra_dim(),
    })
}

pub fn maximality_check(grid: GridModel, tol: &ToleranceConfig) -> Result<MaximalityReport> {
    if grid.ambient_dim() > MAX_COMMUTANT_DIM {
        return Err(Error::ModelTooLarge(format!(
            "maximality check needs 2·m·n <= {MAX_COMMUTANT_DIM}, got {}",
            grid.ambient_dim()
        )));
    }
    let mut entries = BTreeMap::new();
    for tag in [ContextTag::A1, ContextTag::A2] {
        let ctx = grid.symbolic_context(tag, tol)?;
        entries.insert(tag, check_maximal_in(&ctx, tag, &grid, tol)?);
    }
    Ok(MaximalityReport { grid, entries })
}
