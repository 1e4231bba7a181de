//! Python module `quasifold`: exact field elements, polytopes, the reduction
//! data, isotropy groups and the batch pipeline.
//!
//! Exact quantities cross the boundary as strings in config syntax
//! (`p/q ± r/s*sqrt(m)`), or as `FieldScalar` objects; floats as `float`.

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::pyclass::CompareOp;

use quasifold::config::{parse_config, parse_entry};
use quasifold::delzant::{act_torus, Coords, DelzantData, LevelPoint};
use quasifold::exactmath::{self, FieldScalar as Scalar, IntMatrix};
use quasifold::pipeline::{self, FaceListing};
use quasifold::polytope::{Halfspace, PolytopeH};
use quasifold::quasilattice::{self as ql, IsotropyGroup};
use quasifold::verify;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn faces_arg(faces: &str) -> PyResult<FaceListing> {
    match faces {
        "vertices" => Ok(FaceListing::Vertices),
        "all" => Ok(FaceListing::All),
        other => Err(PyValueError::new_err(format!("faces must be 'vertices' or 'all', not {other:?}"))),
    }
}

/// Element `a + b·√m` of a real quadratic field, exact.
#[pyclass(name = "FieldScalar", module = "quasifold", frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyFieldScalar(Scalar);

/// Accepts a `FieldScalar`, an `int`, or a string entry.
#[derive(FromPyObject)]
enum EntryArg {
    Scalar(PyFieldScalar),
    Int(BigInt),
    Text(String),
}

impl EntryArg {
    fn resolve(self, m: u64) -> PyResult<Scalar> {
        let x = match self {
            EntryArg::Scalar(s) => s.0,
            EntryArg::Int(n) => Scalar::rational(BigRational::from_integer(n), m),
            EntryArg::Text(t) => parse_entry(&t, m).map_err(value_error)?,
        };
        if x.discriminant() != m && !(x.is_rational() && x.discriminant() == 1) {
            return Err(PyValueError::new_err(format!("entry {x} is not in Q(sqrt({m}))")));
        }
        Ok(if x.discriminant() == m { x } else { Scalar::rational(x.rational_part().clone(), m) })
    }
}

fn resolve_all(entries: Vec<EntryArg>, m: u64) -> PyResult<Vec<Scalar>> {
    entries.into_iter().map(|e| e.resolve(m)).collect()
}

fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_config_string).collect()
}

#[pymethods]
impl PyFieldScalar {
    /// `FieldScalar("1/2 + 3*sqrt(5)", 5)`; `m` defaults to 1.
    #[new]
    #[pyo3(signature = (text, m = 1))]
    fn new(text: &str, m: u64) -> PyResult<Self> {
        parse_entry(text, m).map(PyFieldScalar).map_err(value_error)
    }

    /// `a + b·√m` from integer or `"p/q"` parts.
    #[staticmethod]
    #[pyo3(signature = (a, b, m))]
    fn from_parts(a: &str, b: &str, m: u64) -> PyResult<Self> {
        let parse = |s: &str| s.trim().parse::<BigRational>().map_err(value_error);
        Scalar::new(parse(a)?, parse(b)?, m).map(PyFieldScalar).map_err(value_error)
    }

    #[getter]
    fn rational_part(&self) -> String {
        self.0.rational_part().to_string()
    }

    #[getter]
    fn irrational_part(&self) -> String {
        self.0.irrational_part().to_string()
    }

    #[getter]
    fn discriminant(&self) -> u64 {
        self.0.discriminant()
    }

    fn conjugate(&self) -> Self {
        PyFieldScalar(self.0.conjugate())
    }

    /// `a² − m·b²` as `"p/q"`.
    fn norm(&self) -> String {
        self.0.norm().to_string()
    }

    fn sign(&self) -> i32 {
        self.0.signum()
    }

    fn is_rational(&self) -> bool {
        self.0.is_rational()
    }

    fn to_config_string(&self) -> String {
        self.0.to_config_string()
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("FieldScalar({:?}, {})", self.0.to_config_string(), self.0.discriminant())
    }

    fn __neg__(&self) -> Self {
        PyFieldScalar(-self.0.clone())
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.checked_add(&other.0).map(PyFieldScalar).map_err(value_error)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.checked_sub(&other.0).map(PyFieldScalar).map_err(value_error)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.0.checked_mul(&other.0).map(PyFieldScalar).map_err(value_error)
    }

    fn __truediv__(&self, other: &Self) -> PyResult<Self> {
        if other.0.is_zero() {
            return Err(PyZeroDivisionError::new_err("division by zero in Q(sqrt m)"));
        }
        self.0.checked_div(&other.0).map(PyFieldScalar).map_err(value_error)
    }

    /// `==` is exact; ordering across different discriminants raises.
    fn __richcmp__(&self, other: &Self, op: CompareOp) -> PyResult<bool> {
        match op {
            CompareOp::Eq => Ok(self.0 == other.0),
            CompareOp::Ne => Ok(self.0 != other.0),
            _ => Ok(op.matches(self.0.cmp_exact(&other.0).map_err(value_error)?)),
        }
    }
}

/// `(active_facets, exact_coords, float_coords)`.
type VertexTuple = (Vec<usize>, Vec<String>, Vec<f64>);

/// H-polytope `{μ : ⟨μ, X_j⟩ ≥ λ_j}` with exact data.
#[pyclass(name = "Polytope", module = "quasifold", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolytope(PolytopeH);

#[pymethods]
impl PyPolytope {
    /// `Polytope(normals, offsets, discriminant=1)`; entries may be
    /// `FieldScalar`, `int` or strings such as `"-1/2*sqrt(5)"`.
    #[new]
    #[pyo3(signature = (normals, offsets, discriminant = 1))]
    fn new(normals: Vec<Vec<EntryArg>>, offsets: Vec<EntryArg>, discriminant: u64) -> PyResult<Self> {
        if normals.len() != offsets.len() {
            return Err(PyValueError::new_err("normals and offsets differ in length"));
        }
        let dim = normals.first().map_or(0, Vec::len);
        let halfspaces = normals
            .into_iter()
            .zip(offsets)
            .map(|(x, l)| Ok(Halfspace::new(resolve_all(x, discriminant)?, l.resolve(discriminant)?)))
            .collect::<PyResult<Vec<_>>>()?;
        PolytopeH::new(dim, halfspaces).map(PyPolytope).map_err(value_error)
    }

    /// Parses the batch config format and keeps only the polytope.
    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        let cfg = parse_config(text).map_err(value_error)?;
        cfg.polytope().map(PyPolytope).map_err(value_error)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn num_facets(&self) -> usize {
        self.0.num_facets()
    }

    #[getter]
    fn discriminant(&self) -> u64 {
        self.0.discriminant()
    }

    /// `[(active_facets, exact_coords, float_coords)]`, sorted by active set.
    fn vertices(&self) -> PyResult<Vec<VertexTuple>> {
        let vs = self.0.vertices().map_err(value_error)?;
        Ok(vs.iter().map(|v| (v.active.clone(), strings(&v.coords), v.to_f64())).collect())
    }

    fn is_simple(&self) -> PyResult<bool> {
        Ok(self.0.check_simple().map_err(value_error)?.is_simple)
    }

    /// Active facet sets of all nonempty proper faces.
    fn faces(&self) -> PyResult<Vec<Vec<usize>>> {
        self.0.faces().map_err(value_error)
    }

    fn bounding_box(&self) -> PyResult<Vec<(f64, f64)>> {
        self.0.bounding_box().map_err(value_error)
    }

    fn contains(&self, mu: Vec<f64>, eps: f64) -> PyResult<bool> {
        if mu.len() != self.0.dim() {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        Ok(self.0.contains_approx(&mu, eps))
    }
}

/// `(face, invariant_factors, free_rank, text)`.
type GroupTuple = (Vec<usize>, Vec<BigInt>, usize, String);

fn group_tuple(g: &IsotropyGroup) -> GroupTuple {
    (g.face.clone(), g.invariant_factors.clone(), g.free_rank, g.to_string())
}

/// Reduction data for a polytope: quasilattice, kernel basis of `𝔫`, `ψ`
/// and the moment map.
#[pyclass(name = "Construction", module = "quasifold", frozen)]
struct PyConstruction(DelzantData);

impl PyConstruction {
    fn level_point(&self, moduli: Vec<f64>, phases: Option<Vec<f64>>) -> PyResult<LevelPoint> {
        let d = self.0.torus_rank();
        if moduli.len() != d {
            return Err(PyValueError::new_err(format!("expected {d} moduli")));
        }
        let phases = phases.unwrap_or_else(|| vec![0.0; d]);
        if phases.len() != d {
            return Err(PyValueError::new_err(format!("expected {d} phases")));
        }
        Ok(LevelPoint::float(moduli).with_phases(phases))
    }

    fn exact_point(&self, moduli: Vec<EntryArg>) -> PyResult<LevelPoint> {
        let d = self.0.torus_rank();
        if moduli.len() != d {
            return Err(PyValueError::new_err(format!("expected {d} moduli")));
        }
        Ok(LevelPoint::exact(resolve_all(moduli, self.0.polytope().discriminant())?))
    }
}

#[pymethods]
impl PyConstruction {
    /// Fails with `ValueError` unless the polytope is simple, bounded and
    /// full-dimensional.
    #[new]
    fn new(polytope: &PyPolytope) -> PyResult<Self> {
        quasifold::delzant::build_construction(&polytope.0).map(PyConstruction).map_err(value_error)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn torus_rank(&self) -> usize {
        self.0.torus_rank()
    }

    #[getter]
    fn subgroup_dim(&self) -> usize {
        self.0.subgroup_dim()
    }

    #[getter]
    fn reduced_dim(&self) -> usize {
        self.0.reduced_dim()
    }

    #[getter]
    fn q_rank(&self) -> usize {
        self.0.quasilattice().q_rank()
    }

    #[getter]
    fn is_lattice(&self) -> bool {
        self.0.quasilattice().is_lattice()
    }

    /// Integer relations among the normals, one row each.
    fn relations(&self) -> Vec<Vec<BigInt>> {
        self.0.quasilattice().relations().to_rows()
    }

    /// Rows spanning `𝔫`, as exact strings.
    fn kernel_basis(&self) -> Vec<Vec<String>> {
        self.0.kernel_basis().to_rows().iter().map(|r| strings(r)).collect()
    }

    fn check_regular_value(&self) -> PyResult<bool> {
        Ok(self.0.check_regular_value().map_err(value_error)?.passed)
    }

    /// `ψ` at a float point given by moduli `r_j = |z_j|²`.
    fn psi(&self, moduli: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.0.psi(&self.level_point(moduli, None)?).map_err(value_error)?.to_f64())
    }

    /// `ψ` at an exact point.
    fn psi_exact(&self, moduli: Vec<EntryArg>) -> PyResult<Vec<String>> {
        let c = self.0.psi(&self.exact_point(moduli)?).map_err(value_error)?;
        Ok(strings(c.as_exact().expect("exact input")))
    }

    /// `Φ` at a float point on the level set; phases are ignored by `Φ` but
    /// accepted for symmetry with the torus action.
    #[pyo3(signature = (moduli, phases = None, tol = verify::LEVEL_TOL))]
    fn moment_map(&self, moduli: Vec<f64>, phases: Option<Vec<f64>>, tol: f64) -> PyResult<Vec<f64>> {
        let p = self.level_point(moduli, phases)?;
        Ok(self.0.moment_map(&p, tol).map_err(value_error)?.to_f64())
    }

    /// `Φ` at an exact point; raises unless the point is exactly on the level set.
    fn moment_map_exact(&self, moduli: Vec<EntryArg>) -> PyResult<Vec<String>> {
        let c = self.0.moment_map(&self.exact_point(moduli)?, 0.0).map_err(value_error)?;
        match c {
            Coords::Exact(v) => Ok(strings(&v)),
            Coords::Float(_) => unreachable!("exact input gives exact output"),
        }
    }

    /// Exact moduli of the level point over `μ`.
    fn fiber_point(&self, mu: Vec<EntryArg>) -> PyResult<Vec<String>> {
        let mu = resolve_all(mu, self.0.polytope().discriminant())?;
        let p = self.0.fiber_point(&mu).map_err(value_error)?;
        Ok(strings(p.moduli.as_exact().expect("exact fiber")))
    }

    fn fiber_point_f64(&self, mu: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.0.fiber_point_f64(&mu).map_err(value_error)?.moduli.to_f64())
    }

    /// Phases after rotating by `angles` (both in turns).
    fn act_torus(&self, moduli: Vec<f64>, phases: Vec<f64>, angles: Vec<f64>) -> PyResult<Vec<f64>> {
        let p = self.level_point(moduli, Some(phases))?;
        if angles.len() != p.len() {
            return Err(PyValueError::new_err("angle vector has the wrong length"));
        }
        Ok(act_torus(&p, &angles).phases)
    }

    fn isotropy_group(&self, face: Vec<usize>) -> PyResult<GroupTuple> {
        ql::isotropy_group(self.0.quasilattice(), &face).map(|g| group_tuple(&g)).map_err(value_error)
    }

    /// `(kind, groups)` over every face of the polytope.
    fn classify(&self) -> PyResult<(String, Vec<GroupTuple>)> {
        let faces = self.0.polytope().faces().map_err(value_error)?;
        let c = ql::classify(self.0.quasilattice(), &faces).map_err(value_error)?;
        Ok((c.kind.to_string(), c.groups.iter().map(group_tuple).collect()))
    }

    /// `n` sampled moment values; deterministic in `seed`.
    #[pyo3(signature = (n, seed = 0, tol = verify::LEVEL_TOL))]
    fn sample_moment_image(&self, py: Python<'_>, n: usize, seed: u64, tol: f64) -> PyResult<Vec<Vec<f64>>> {
        let data = &self.0;
        let (_, values) = py.detach(|| verify::sample_moment_image(data, n, seed, tol)).map_err(value_error)?;
        Ok(values)
    }
}

/// Runs the batch pipeline on config text; returns
/// `(exit_code, report, csv)`. Errors that prevent a report raise `ValueError`.
#[pyfunction]
#[pyo3(signature = (config, faces = "vertices"))]
fn run_pipeline(py: Python<'_>, config: &str, faces: &str) -> PyResult<(i32, String, String)> {
    let cfg = parse_config(config).map_err(value_error)?;
    let faces = faces_arg(faces)?;
    let report = py.detach(|| pipeline::run_pipeline(&cfg, faces)).map_err(value_error)?;
    Ok((report.status.code(), report.render(), report.samples_csv()))
}

/// Nonzero invariant factors `d_1 | d_2 | …` of an integer matrix.
#[pyfunction]
fn smith_normal_form(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<BigInt>> {
    let a = IntMatrix::from_rows(rows).map_err(value_error)?;
    Ok(exactmath::smith_normal_form(&a).factors)
}

/// A `ℤ`-basis of `span_ℚ(rows) ∩ ℤⁿ` in Hermite form. Entries are ints or
/// `"p/q"` strings.
#[pyfunction]
fn saturate_lattice(rows: Vec<Vec<String>>) -> PyResult<Vec<Vec<BigInt>>> {
    let basis = rows
        .iter()
        .map(|r| r.iter().map(|s| s.trim().parse::<BigRational>().map_err(value_error)).collect())
        .collect::<PyResult<Vec<Vec<BigRational>>>>()?;
    Ok(exactmath::saturate_lattice(&basis).map_err(value_error)?.to_rows())
}

#[pymodule]
#[pyo3(name = "quasifold")]
fn quasifold_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFieldScalar>()?;
    m.add_class::<PyPolytope>()?;
    m.add_class::<PyConstruction>()?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(smith_normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(saturate_lattice, m)?)?;
    Ok(())
}
