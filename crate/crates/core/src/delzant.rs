//! Reduction data for a simple polytope.
//!
//! With `π : ℝᵈ → ℝⁿ, e_j ↦ X_j` and `𝔫 = ker π`, the torus `Tᵈ` acts on
//! `ℂᵈ` with moment map `J(z) = Σ (|z_j|² + λ_j) e_j*`, and the subgroup with
//! Lie algebra `𝔫` has moment map `ψ = i*∘J`. The reduced space is
//! `ψ⁻¹(0)/N`, of dimension `2d − 2(d − n) = 2n`, and the residual action of
//! `Tᵈ/N = ℝⁿ/Q` has moment map `Φ` determined by `⟨Φ, X_j⟩ = |z_j|² + λ_j`.
//!
//! Points of `ℂᵈ` are stored as moduli `r_j = |z_j|²` plus phases in turns;
//! nothing here needs the complex coordinates themselves.

use thiserror::Error;

use crate::exactmath::{ExactMatrix, FieldMatrix, FieldScalar};
use crate::polytope::{PolytopeError, PolytopeH, Vertex};
use crate::quasilattice::{build_quasilattice, Quasilattice, QuasilatticeError, QuasitorusData};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DelzantError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Quasilattice(#[from] QuasilatticeError),
    #[error("polytope is not simple at {} vertex(es)", .0.len())]
    NotSimple(Vec<Vertex>),
    #[error("point is not on the zero level set (residual {residual:e})")]
    NotOnLevelSet { residual: f64 },
    #[error("point lies outside the polytope (facet {facet})")]
    OutsidePolytope { facet: usize },
    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("kernel basis does not span ker π")]
    InvalidKernelBasis,
}

/// A coordinate vector, either exact or in floating point.
#[derive(Clone, Debug, PartialEq)]
pub enum Coords {
    Exact(Vec<FieldScalar>),
    Float(Vec<f64>),
}

impl Coords {
    pub fn len(&self) -> usize {
        match self {
            Coords::Exact(v) => v.len(),
            Coords::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Coords::Exact(v) => v.iter().map(FieldScalar::to_f64).collect(),
            Coords::Float(v) => v.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&[FieldScalar]> {
        match self {
            Coords::Exact(v) => Some(v),
            Coords::Float(_) => None,
        }
    }

    /// Largest absolute component, 0 for an empty vector.
    pub fn max_abs(&self) -> f64 {
        self.to_f64().iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// A point of `ℂᵈ` as `z_j = √r_j · e^{2πiθ_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelPoint {
    pub moduli: Coords,
    /// Phases in turns, each in `[0, 1)`.
    pub phases: Vec<f64>,
}

impl LevelPoint {
    pub fn exact(moduli: Vec<FieldScalar>) -> Self {
        let phases = vec![0.0; moduli.len()];
        LevelPoint { moduli: Coords::Exact(moduli), phases }
    }

    pub fn float(moduli: Vec<f64>) -> Self {
        let phases = vec![0.0; moduli.len()];
        LevelPoint { moduli: Coords::Float(moduli), phases }
    }

    pub fn with_phases(mut self, phases: Vec<f64>) -> Self {
        assert_eq!(phases.len(), self.moduli.len(), "phase vector has the wrong length");
        self.phases = phases.into_iter().map(|t| t.rem_euclid(1.0)).collect();
        self
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }
}

/// Outcome of the per-vertex regular-value check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityCertificate {
    pub passed: bool,
    /// First vertex (by active set) whose inactive kernel columns fail to span `𝔫*`.
    pub offending_face: Option<Vec<usize>>,
    pub faces_checked: usize,
}

/// Everything the reduction needs, computed exactly from the polytope.
#[derive(Clone, Debug)]
pub struct DelzantData {
    polytope: PolytopeH,
    quasitorus: QuasitorusData,
    kernel_basis: FieldMatrix,
    offsets: Vec<FieldScalar>,
    solve_facets: Vec<usize>,
    solve_inverse: FieldMatrix,
    float_kernel: ExactMatrix<f64>,
    float_inverse: ExactMatrix<f64>,
}

/// Full construction; requires a simple, bounded, full-dimensional polytope.
pub fn build_construction(p: &PolytopeH) -> Result<DelzantData, DelzantError> {
    let report = p.check_simple()?;
    if !report.is_simple {
        return Err(DelzantError::NotSimple(report.offending));
    }
    DelzantData::assemble(p)
}

impl DelzantData {
    /// Builds the data without the simplicity requirement, so the regularity
    /// certificate can be produced (and fail) for non-simple input.
    pub fn assemble(p: &PolytopeH) -> Result<Self, DelzantError> {
        let vertices = p.vertices()?;
        let quasilattice = build_quasilattice(p.normals())?;
        let kernel_basis = FieldMatrix::from_rows(p.generator_matrix().field_kernel())
            .expect("kernel rows have equal length");
        let solve_facets = independent_prefix(p, &vertices[0].active);
        let solve_inverse = p
            .normal_rows(&solve_facets)
            .inverse()
            .expect("vertex normals are independent");
        Ok(DelzantData {
            polytope: p.clone(),
            quasitorus: QuasitorusData::new(quasilattice),
            float_kernel: kernel_basis.to_f64(),
            float_inverse: solve_inverse.to_f64(),
            kernel_basis,
            offsets: p.offsets(),
            solve_facets,
            solve_inverse,
        })
    }

    /// Same construction with the rows of `𝔫` replaced by another basis.
    pub fn with_kernel_basis(&self, basis: FieldMatrix) -> Result<Self, DelzantError> {
        let d = self.torus_rank();
        if basis.nrows() != d - self.dim() || basis.ncols() != d || basis.rank() != basis.nrows() {
            return Err(DelzantError::InvalidKernelBasis);
        }
        let g = self.polytope.generator_matrix();
        let annihilates = basis.mul_mat(&g.transpose()).to_rows().iter().flatten().all(FieldScalar::is_zero);
        if !annihilates {
            return Err(DelzantError::InvalidKernelBasis);
        }
        let mut out = self.clone();
        out.float_kernel = basis.to_f64();
        out.kernel_basis = basis;
        Ok(out)
    }

    pub fn polytope(&self) -> &PolytopeH {
        &self.polytope
    }

    pub fn quasilattice(&self) -> &Quasilattice {
        &self.quasitorus.quasilattice
    }

    pub fn quasitorus(&self) -> &QuasitorusData {
        &self.quasitorus
    }

    /// Rows span `𝔫 = ker π`, `(d − n) × d`.
    pub fn kernel_basis(&self) -> &FieldMatrix {
        &self.kernel_basis
    }

    pub fn offsets(&self) -> &[FieldScalar] {
        &self.offsets
    }

    /// `n`, the dimension of the quasitorus `D`.
    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    /// `d`, the rank of the ambient torus acting on `ℂᵈ`.
    pub fn torus_rank(&self) -> usize {
        self.polytope.num_facets()
    }

    /// `dim N = d − n`.
    pub fn subgroup_dim(&self) -> usize {
        self.kernel_basis.nrows()
    }

    /// `dim M = dim ℂᵈ − 2 dim N`.
    pub fn reduced_dim(&self) -> usize {
        2 * self.torus_rank() - 2 * self.subgroup_dim()
    }

    /// Facets whose equations determine `Φ` (the lowest vertex active set).
    pub fn solve_facets(&self) -> &[usize] {
        &self.solve_facets
    }

    fn check_len(&self, p: &LevelPoint) -> Result<(), DelzantError> {
        let d = self.torus_rank();
        if p.moduli.len() != d || p.phases.len() != d {
            return Err(DelzantError::DimensionMismatch { expected: d, got: p.moduli.len() });
        }
        Ok(())
    }

    /// `ψ(p) = B·(r + λ)`.
    pub fn psi(&self, p: &LevelPoint) -> Result<Coords, DelzantError> {
        self.check_len(p)?;
        Ok(match &p.moduli {
            Coords::Exact(r) => {
                let shifted: Vec<FieldScalar> = r.iter().zip(&self.offsets).map(|(a, b)| a + b).collect();
                Coords::Exact(self.kernel_basis.mul_vec(&shifted))
            }
            Coords::Float(r) => {
                let shifted: Vec<f64> = r
                    .iter()
                    .zip(self.polytope.float_offsets())
                    .map(|(a, b)| a + b)
                    .collect();
                Coords::Float(float_mul_vec(&self.float_kernel, &shifted))
            }
        })
    }

    /// For every vertex, the columns of `B` outside its active set must span
    /// `ℝ^{d−n}`. Holds at all vertices iff the polytope is simple.
    pub fn check_regular_value(&self) -> Result<RegularityCertificate, DelzantError> {
        let vertices = self.polytope.vertices()?;
        let d = self.torus_rank();
        let k = self.subgroup_dim();
        for v in vertices {
            let inactive: Vec<usize> = (0..d).filter(|j| !v.active.contains(j)).collect();
            let spans = !inactive.is_empty() && self.kernel_basis.select_columns(&inactive).rank() == k;
            if !spans {
                return Ok(RegularityCertificate {
                    passed: false,
                    offending_face: Some(v.active.clone()),
                    faces_checked: vertices.len(),
                });
            }
        }
        Ok(RegularityCertificate { passed: true, offending_face: None, faces_checked: vertices.len() })
    }

    /// `Φ(p)`: solves `⟨μ, X_j⟩ = r_j + λ_j` on the designated vertex basis and
    /// checks the remaining equations, exactly for exact points and within
    /// `tol` for float points.
    pub fn moment_map(&self, p: &LevelPoint, tol: f64) -> Result<Coords, DelzantError> {
        self.check_len(p)?;
        match &p.moduli {
            Coords::Exact(r) => {
                let rhs: Vec<FieldScalar> =
                    self.solve_facets.iter().map(|&j| &r[j] + &self.offsets[j]).collect();
                let mu = self.solve_inverse.mul_vec(&rhs);
                let residuals: Vec<FieldScalar> = (0..self.torus_rank())
                    .map(|j| self.polytope.slack(j, &mu) - r[j].clone())
                    .collect();
                if residuals.iter().any(|x| !x.is_zero()) {
                    let residual = residuals.iter().fold(0.0f64, |acc, x| acc.max(x.to_f64().abs()));
                    return Err(DelzantError::NotOnLevelSet { residual });
                }
                Ok(Coords::Exact(mu))
            }
            Coords::Float(r) => {
                let lam = self.polytope.float_offsets();
                let rhs: Vec<f64> = self.solve_facets.iter().map(|&j| r[j] + lam[j]).collect();
                let mu = float_mul_vec(&self.float_inverse, &rhs);
                let residual = self
                    .polytope
                    .float_slacks(&mu)
                    .iter()
                    .zip(r)
                    .fold(0.0f64, |acc, (s, rj)| acc.max((s - rj).abs()));
                if residual > tol || residual.is_nan() {
                    return Err(DelzantError::NotOnLevelSet { residual });
                }
                Ok(Coords::Float(mu))
            }
        }
    }

    /// The point of `ψ⁻¹(0)` over `μ` with all phases zero:
    /// `r_j = ⟨μ, X_j⟩ − λ_j`.
    pub fn fiber_point(&self, mu: &[FieldScalar]) -> Result<LevelPoint, DelzantError> {
        self.check_point_len(mu.len())?;
        let moduli: Vec<FieldScalar> = (0..self.torus_rank()).map(|j| self.polytope.slack(j, mu)).collect();
        if let Some(facet) = moduli.iter().position(FieldScalar::is_negative) {
            return Err(DelzantError::OutsidePolytope { facet });
        }
        Ok(LevelPoint::exact(moduli))
    }

    /// Float version of [`DelzantData::fiber_point`].
    pub fn fiber_point_f64(&self, mu: &[f64]) -> Result<LevelPoint, DelzantError> {
        self.check_point_len(mu.len())?;
        let moduli = self.polytope.float_slacks(mu);
        if let Some(facet) = moduli.iter().position(|&x| x < 0.0 || x.is_nan()) {
            return Err(DelzantError::OutsidePolytope { facet });
        }
        Ok(LevelPoint::float(moduli))
    }

    fn check_point_len(&self, got: usize) -> Result<(), DelzantError> {
        if got != self.dim() {
            return Err(DelzantError::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }
}

/// Rotates phases by `angles` (in turns); moduli are untouched.
pub fn act_torus(p: &LevelPoint, angles: &[f64]) -> LevelPoint {
    assert_eq!(angles.len(), p.phases.len(), "angle vector has the wrong length");
    LevelPoint {
        moduli: p.moduli.clone(),
        phases: p.phases.iter().zip(angles).map(|(t, a)| (t + a).rem_euclid(1.0)).collect(),
    }
}

pub fn psi(data: &DelzantData, p: &LevelPoint) -> Result<Coords, DelzantError> {
    data.psi(p)
}

pub fn check_regular_value(data: &DelzantData) -> Result<RegularityCertificate, DelzantError> {
    data.check_regular_value()
}

pub fn moment_map(data: &DelzantData, p: &LevelPoint, tol: f64) -> Result<Coords, DelzantError> {
    data.moment_map(p, tol)
}

pub fn fiber_point(data: &DelzantData, mu: &[FieldScalar]) -> Result<LevelPoint, DelzantError> {
    data.fiber_point(mu)
}

/// Greedy choice of `n` independent facets from `active`, in order.
fn independent_prefix(p: &PolytopeH, active: &[usize]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for &j in active {
        let mut trial = chosen.clone();
        trial.push(j);
        if p.normal_rows(&trial).rank() == trial.len() {
            chosen = trial;
        }
        if chosen.len() == p.dim() {
            break;
        }
    }
    chosen
}

fn float_mul_vec(m: &ExactMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}
