//! File formats: model JSON, projection JSON, enumerated-poset JSON,
//! datasheet CSV and DOT export.
//!
//! Complex entries are `[re, im]` pairs; matrices are row-major lists of
//! rows. Every parser here takes untrusted text and reports failures as
//! `Error::Parse` (syntax, with line and column) or `Error::Validation`
//! (a named invariant).

use std::fmt::{self, Write as _};
use std::io::{Read, Write};
use std::marker::PhantomData;
use std::path::Path;

use indexmap::IndexMap;
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::context::{
    context_from_commuting, enumerate_contexts, AvailableObservables, Context, ContextId,
    ContextPoset, NamedObservable,
};
use crate::error::{Error, Result};
use crate::matrix::{
    validate_projection, Complex64, ComplexMatrix, Projection, ToleranceConfig, MAX_DIM,
};
use crate::orders::{
    derive_tensor_witnesses, MinimaxReport, RedundancyRegistry, RedundancyWitness,
    TensorFactorization, WitnessKind,
};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    if rows.len() > MAX_DIM {
        return Err(Error::ModelTooLarge(format!(
            "matrix dimension {} exceeds cap {MAX_DIM}",
            rows.len()
        )));
    }
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Map that rejects duplicate keys and keeps file order.
#[derive(Debug, Clone, Default)]
struct UniqueMap<V>(IndexMap<String, V>);

impl<'de, V: Deserialize<'de>> Deserialize<'de> for UniqueMap<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V_<V>(PhantomData<V>);
        impl<'de, V: Deserialize<'de>> Visitor<'de> for V_<V> {
            type Value = UniqueMap<V>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map with unique keys")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut out = IndexMap::new();
                while let Some((k, v)) = map.next_entry::<String, V>()? {
                    if out.contains_key(&k) {
                        return Err(serde::de::Error::custom(format!("duplicate key {k:?}")));
                    }
                    out.insert(k, v);
                }
                Ok(UniqueMap(out))
            }
        }
        d.deserialize_map(V_(PhantomData))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftSpec {
    source: String,
    factorization: String,
    factor: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ObservableSpec {
    Matrix(MatrixJson),
    Lift { lift: LiftSpec },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToleranceOverrides {
    eps_herm: Option<f64>,
    eps_idem: Option<f64>,
    eps_rank: Option<f64>,
    round_digits: Option<u32>,
}

/// A declared reduction between the contexts generated by two named sets
/// of observables.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(try_from = "RawWitnessDecl")]
pub struct WitnessDecl {
    pub from: Vec<String>,
    pub to: Vec<String>,
    pub kind: WitnessKind,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWitnessDecl {
    from: Vec<String>,
    to: Vec<String>,
    kind: String,
    factorization: Option<String>,
    factor: Option<usize>,
    mapping: Option<Vec<usize>>,
}

impl TryFrom<RawWitnessDecl> for WitnessDecl {
    type Error = String;

    fn try_from(raw: RawWitnessDecl) -> std::result::Result<Self, String> {
        let kind = match (
            raw.kind.as_str(),
            raw.factorization,
            raw.factor,
            raw.mapping,
        ) {
            ("tensor-factor", Some(factorization), Some(factor), None) => {
                WitnessKind::TensorFactor {
                    factorization,
                    factor,
                }
            }
            ("explicit-surjection", None, None, Some(mapping)) => {
                WitnessKind::ExplicitSurjection { mapping }
            }
            ("tensor-factor", ..) => {
                return Err(
                    "tensor-factor witness needs exactly `factorization` and `factor`".into(),
                )
            }
            ("explicit-surjection", ..) => {
                return Err("explicit-surjection witness needs exactly `mapping`".into())
            }
            (other, ..) => return Err(format!("unknown witness kind {other:?}")),
        };
        Ok(WitnessDecl {
            from: raw.from,
            to: raw.to,
            kind,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    dim: usize,
    observables: UniqueMap<ObservableSpec>,
    #[serde(default)]
    factorizations: Vec<TensorFactorization>,
    #[serde(default)]
    redundancy_witnesses: Vec<WitnessDecl>,
    #[serde(default)]
    derive_witnesses: bool,
    #[serde(default)]
    max_subset_size: Option<usize>,
    #[serde(default)]
    tolerance: ToleranceOverrides,
}

/// A validated model: observables, declared witnesses and tolerances.
#[derive(Debug, Clone)]
pub struct Model {
    pub tolerance: ToleranceConfig,
    pub available: AvailableObservables,
    pub witnesses: Vec<WitnessDecl>,
    pub derive_witnesses: bool,
    pub max_subset_size: Option<usize>,
}

pub fn parse_model(text: &str) -> Result<Model> {
    let file: ModelFile = serde_json::from_str(text).map_err(parse_err)?;
    let defaults = ToleranceConfig::default();
    let t = &file.tolerance;
    let tolerance = ToleranceConfig {
        eps_herm: t.eps_herm.unwrap_or(defaults.eps_herm),
        eps_idem: t.eps_idem.unwrap_or(defaults.eps_idem),
        eps_rank: t.eps_rank.unwrap_or(defaults.eps_rank),
        round_digits: t.round_digits.unwrap_or(defaults.round_digits),
    };
    tolerance
        .validate()
        .map_err(|e| Error::Validation(e.to_string()))?;
    if file.dim == 0 || file.dim > MAX_DIM {
        return Err(Error::Validation(format!(
            "dim = {} must lie in [1, {MAX_DIM}]",
            file.dim
        )));
    }
    for f in &file.factorizations {
        f.validate()?;
        if f.ambient_dim() > MAX_DIM {
            return Err(Error::Validation(format!(
                "factorization {:?} has dimension {} above cap {MAX_DIM}",
                f.name,
                f.ambient_dim()
            )));
        }
    }

    let mut observables: Vec<NamedObservable> = Vec::new();
    for (name, entry) in file.observables.0 {
        let matrix = match entry {
            ObservableSpec::Matrix(rows) => matrix_from_json(&rows)
                .map_err(|e| Error::Validation(format!("observable {name:?}: {e}")))?,
            ObservableSpec::Lift { lift } => {
                let source = observables
                    .iter()
                    .find(|o| o.name == lift.source)
                    .ok_or_else(|| {
                        Error::Validation(format!(
                            "observable {name:?} lifts unknown or later observable {:?}",
                            lift.source
                        ))
                    })?;
                let f = file
                    .factorizations
                    .iter()
                    .find(|f| f.name == lift.factorization)
                    .ok_or_else(|| {
                        Error::Validation(format!(
                            "observable {name:?} uses unknown factorization {:?}",
                            lift.factorization
                        ))
                    })?;
                f.lift(lift.factor, &source.matrix)
                    .map_err(|e| Error::Validation(format!("observable {name:?}: {e}")))?
            }
        };
        observables.push(NamedObservable { name, matrix });
    }
    let available =
        AvailableObservables::new(file.dim, observables, file.factorizations, &tolerance)?;
    if let Some(k) = file.max_subset_size {
        if k > available.observables().len() {
            return Err(Error::Validation(format!(
                "max_subset_size {k} exceeds observable count"
            )));
        }
    }
    for w in &file.redundancy_witnesses {
        for name in w.from.iter().chain(&w.to) {
            if available.index_of(name).is_none() {
                return Err(Error::Validation(format!(
                    "witness references unknown observable {name:?}"
                )));
            }
        }
    }
    Ok(Model {
        tolerance,
        available,
        witnesses: file.redundancy_witnesses,
        derive_witnesses: file.derive_witnesses,
        max_subset_size: file.max_subset_size,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let text = std::fs::read_to_string(path)?;
    parse_model(&text)
}

impl Model {
    pub fn observable_names(&self) -> Vec<String> {
        self.available
            .observables()
            .iter()
            .map(|o| o.name.clone())
            .collect()
    }

    pub fn enumerate(&self) -> Result<ContextPoset> {
        let k = self
            .max_subset_size
            .unwrap_or(self.available.observables().len());
        enumerate_contexts(&self.available, &self.tolerance, k)
    }

    fn generated(&self, names: &[String]) -> Result<Context> {
        let mats: Vec<ComplexMatrix> = names
            .iter()
            .map(|n| {
                let i = self.available.index_of(n).expect("names checked at load");
                self.available.observables()[i].matrix.clone()
            })
            .collect();
        let dim = mats.first().map_or(self.available.dim(), |m| m.dim());
        if mats.iter().any(|m| m.dim() != dim) {
            return Err(Error::Validation(format!(
                "witness generators {names:?} live on different dimensions"
            )));
        }
        context_from_commuting(dim, &mats, &self.tolerance)
            .map_err(|e| Error::Validation(format!("witness generators {names:?}: {e}")))
    }

    /// Declared witnesses resolved to context ids, plus derived tensor
    /// witnesses when the model asks for them.
    pub fn witnesses_for(&self, poset: &ContextPoset) -> Result<Vec<RedundancyWitness>> {
        let mut out = Vec::new();
        for decl in &self.witnesses {
            let mut ids = [ContextId(0); 2];
            for (slot, names) in ids.iter_mut().zip([&decl.from, &decl.to]) {
                let ctx = self.generated(names)?;
                *slot = poset.find(&ctx, &self.tolerance)?.ok_or_else(|| {
                    Error::Validation(format!(
                        "context generated by {names:?} is not in the enumerated poset"
                    ))
                })?;
            }
            out.push(RedundancyWitness {
                from_id: ids[0],
                to_id: ids[1],
                kind: decl.kind.clone(),
            });
        }
        if self.derive_witnesses {
            for w in
                derive_tensor_witnesses(poset, self.available.factorizations(), &self.tolerance)
            {
                if !out
                    .iter()
                    .any(|o| o.from_id == w.from_id && o.to_id == w.to_id)
                {
                    out.push(w);
                }
            }
        }
        Ok(out)
    }

    pub fn registry(&self, poset: &ContextPoset) -> Result<RedundancyRegistry> {
        let ws = self.witnesses_for(poset)?;
        RedundancyRegistry::new(poset, &ws, self.available.factorizations(), &self.tolerance)
            .map_err(|e| match e {
                Error::WitnessInvalid { .. } => Error::Validation(e.to_string()),
                other => other,
            })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionFile {
    matrix: MatrixJson,
}

/// Parse `{"matrix": [[[re, im], ...], ...]}` and validate it as a
/// projection.
pub fn parse_projection(text: &str, tol: &ToleranceConfig) -> Result<Projection> {
    let file: ProjectionFile = serde_json::from_str(text).map_err(parse_err)?;
    let m = matrix_from_json(&file.matrix).map_err(|e| Error::Validation(e.to_string()))?;
    validate_projection(&m, tol).map_err(|e| Error::Validation(format!("projection: {e}")))
}

pub fn projection_to_json(p: &Projection) -> serde_json::Value {
    serde_json::json!({ "matrix": matrix_to_json(p.matrix()), "rank": p.rank() })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextEntry {
    id: ContextId,
    dim: usize,
    canonical_key: String,
    generators: Vec<usize>,
    minimal_projections: Vec<MatrixJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PosetFile {
    tolerance: ToleranceConfig,
    observables: Vec<String>,
    contexts: Vec<ContextEntry>,
    inclusion_edges: Vec<(ContextId, ContextId)>,
    hasse_edges: Vec<(ContextId, ContextId)>,
}

pub fn poset_to_json(
    poset: &ContextPoset,
    names: &[String],
    tol: &ToleranceConfig,
) -> Result<String> {
    let contexts = poset
        .ids()
        .map(|id| {
            let c = poset.context(id)?;
            Ok(ContextEntry {
                id,
                dim: c.dim(),
                canonical_key: c.key_hex(),
                generators: poset.generators(id)?.to_vec(),
                minimal_projections: c
                    .minimal_projections()
                    .iter()
                    .map(|p| matrix_to_json(p.matrix()))
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let file = PosetFile {
        tolerance: *tol,
        observables: names.to_vec(),
        contexts,
        inclusion_edges: poset.inclusion_edges().iter().copied().collect(),
        hasse_edges: poset.hasse_edges().to_vec(),
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Parse(e.to_string()))
}

/// A poset read back from JSON, revalidated: canonical keys and edges are
/// recomputed and must match the stored ones.
#[derive(Debug, Clone)]
pub struct LoadedPoset {
    pub poset: ContextPoset,
    pub observables: Vec<String>,
    pub tolerance: ToleranceConfig,
}

pub fn parse_poset(text: &str) -> Result<LoadedPoset> {
    let file: PosetFile = serde_json::from_str(text).map_err(parse_err)?;
    let tol = file.tolerance;
    tol.validate()?;
    let mut contexts = Vec::with_capacity(file.contexts.len());
    let mut generators = Vec::with_capacity(file.contexts.len());
    for (i, entry) in file.contexts.iter().enumerate() {
        if entry.id != ContextId(i) {
            return Err(Error::Validation(format!(
                "context ids must be consecutive from 0; found {} at position {i}",
                entry.id
            )));
        }
        if entry.dim == 0 || entry.dim > MAX_DIM {
            return Err(Error::Validation(format!(
                "context {} has bad dimension",
                entry.id
            )));
        }
        let projections = entry
            .minimal_projections
            .iter()
            .map(|m| validate_projection(&matrix_from_json(m)?, &tol))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Validation(format!("context {}: {e}", entry.id)))?;
        let ctx = Context::from_minimal_projections(entry.dim, projections, &tol)
            .map_err(|e| Error::Validation(format!("context {}: {e}", entry.id)))?;
        if ctx.key_hex() != entry.canonical_key {
            return Err(Error::Validation(format!(
                "context {} canonical key does not match its projections",
                entry.id
            )));
        }
        contexts.push(ctx);
        generators.push(entry.generators.clone());
    }
    let poset = ContextPoset::from_contexts(contexts, generators, &tol)?;
    let stored_incl: Vec<_> = file.inclusion_edges.clone();
    let computed_incl: Vec<_> = poset.inclusion_edges().iter().copied().collect();
    if stored_incl != computed_incl || file.hasse_edges != poset.hasse_edges() {
        return Err(Error::Validation(
            "stored edges differ from recomputed inclusion".into(),
        ));
    }
    Ok(LoadedPoset {
        poset,
        observables: file.observables,
        tolerance: tol,
    })
}

/// One datasheet reshaped to a `rows × cols` table, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn table(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.cols).map(|r| r.to_vec()).collect()
    }
}

/// Read one datasheet per CSV record (no header) and reshape each into a
/// `rows × cols` table. Row numbers in errors are 1-based record indices.
pub fn ingest_datasheets<R: Read>(
    reader: R,
    rows: usize,
    cols: usize,
) -> Result<Vec<GridFunction>> {
    let expected = rows
        .checked_mul(cols)
        .filter(|&k| k > 0)
        .ok_or_else(|| Error::Validation(format!("bad reshape target {rows}x{cols}")))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| Error::Parse(format!("csv row {row}: {e}")))?;
        if record.len() != expected {
            return Err(Error::RowLengthMismatch {
                row,
                expected,
                found: record.len(),
            });
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::NonNumericField {
                        row,
                        column: c + 1,
                        value: field.to_string(),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(GridFunction { rows, cols, values });
    }
    Ok(out)
}

pub fn datasheets_to_json(tables: &[GridFunction]) -> serde_json::Value {
    let (rows, cols) = tables.first().map_or((0, 0), |t| (t.rows, t.cols));
    serde_json::json!({
        "rows": rows,
        "cols": cols,
        "tables": tables.iter().map(|t| t.table()).collect::<Vec<_>>(),
    })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT digraph of a context poset: Hasse edges of the resolution order
/// solid (pointing from coarser to finer), declared reductions dashed
/// (pointing from the redundant context to its reduction), minimax
/// contexts drawn with a double border and `minimax=true`.
pub fn poset_dot(
    poset: &ContextPoset,
    names: &[String],
    registry: &RedundancyRegistry,
    report: &MinimaxReport,
) -> Result<String> {
    let mut s = String::new();
    s.push_str("digraph contexts {\n  rankdir=BT;\n  node [shape=box];\n");
    for id in poset.ids() {
        let c = poset.context(id)?;
        let gens: Vec<&str> = poset
            .generators(id)?
            .iter()
            .map(|&i| names.get(i).map_or("?", |n| n.as_str()))
            .collect();
        let gens = if gens.is_empty() {
            "trivial".to_string()
        } else {
            gens.join(", ")
        };
        let label = dot_escape(&format!(
            "{id}: {gens}\\ndim {}, {} points",
            c.dim(),
            c.algebra_dim()
        ));
        let _ = write!(s, "  {id} [label=\"{label}\"");
        if report.minimax.contains(&id) {
            s.push_str(", minimax=true, peripheries=2");
        }
        s.push_str("];\n");
    }
    for (a, b) in poset.hasse_edges() {
        let _ = writeln!(s, "  {a} -> {b};");
    }
    let mut reductions: Vec<(ContextId, ContextId)> = registry
        .witnesses()
        .iter()
        .map(|w| (w.witness.from_id, w.witness.to_id))
        .collect();
    reductions.sort();
    reductions.dedup();
    for (a, b) in reductions {
        let _ = writeln!(s, "  {a} -> {b} [style=dashed];");
    }
    s.push_str("}\n");
    Ok(s)
}

/// Write via a temporary file in the target directory, then rename.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
