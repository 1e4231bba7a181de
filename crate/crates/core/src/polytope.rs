//! Exact halfspace polytopes `{μ : ⟨μ, X_j⟩ ≥ λ_j}`, brute-force vertex
//! enumeration, and the simplicity check.

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use itertools::Itertools;
use thiserror::Error;

use crate::exactmath::{ExactMatrix, FieldMatrix, FieldScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("polytope needs at least n+1 = {needed} facets, got {got}")]
    TooFewFacets { needed: usize, got: usize },
    #[error("ambient dimension must be positive")]
    ZeroDimension,
    #[error("facet {index}: normal has length {got}, expected {expected}")]
    WrongLength { index: usize, expected: usize, got: usize },
    #[error("facet {0} has a zero normal")]
    ZeroNormal(usize),
    #[error("facet {index} mixes discriminants {expected} and {got}")]
    DiscriminantMismatch { index: usize, expected: u64, got: u64 },
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope has dimension {affine_dim} < {ambient_dim}")]
    LowerDimensional { affine_dim: usize, ambient_dim: usize },
}

/// One inequality `⟨μ, normal⟩ ≥ offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Halfspace {
    pub normal: Vec<FieldScalar>,
    pub offset: FieldScalar,
}

impl Halfspace {
    pub fn new(normal: Vec<FieldScalar>, offset: FieldScalar) -> Self {
        Halfspace { normal, offset }
    }

    /// `(c·X, c·λ)`; the halfspace is unchanged for `c > 0`.
    pub fn scaled(&self, c: &FieldScalar) -> Self {
        Halfspace {
            normal: self.normal.iter().map(|x| x * c).collect(),
            offset: &self.offset * c,
        }
    }
}

/// A vertex with its full active set (sorted facet indices, 0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub coords: Vec<FieldScalar>,
    pub active: Vec<usize>,
}

impl Vertex {
    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(FieldScalar::to_f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicityReport {
    pub is_simple: bool,
    pub offending: Vec<Vertex>,
}

/// Halfspace representation of a full-dimensional polytope in ℝⁿ.
///
/// Normals are taken verbatim; no rescaling to primitive vectors happens,
/// since the construction depends on the chosen `X_j`.
#[derive(Clone, Debug)]
pub struct PolytopeH {
    dim: usize,
    discriminant: u64,
    halfspaces: Vec<Halfspace>,
    float_normals: Vec<Vec<f64>>,
    float_offsets: Vec<f64>,
    vertices: OnceLock<Result<Vec<Vertex>, PolytopeError>>,
}

impl PartialEq for PolytopeH {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.discriminant == other.discriminant
            && self.halfspaces == other.halfspaces
    }
}

impl PolytopeH {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self, PolytopeError> {
        if dim == 0 {
            return Err(PolytopeError::ZeroDimension);
        }
        if halfspaces.len() < dim + 1 {
            return Err(PolytopeError::TooFewFacets { needed: dim + 1, got: halfspaces.len() });
        }
        let discriminant = halfspaces[0].offset.discriminant();
        for (index, h) in halfspaces.iter().enumerate() {
            if h.normal.len() != dim {
                return Err(PolytopeError::WrongLength { index, expected: dim, got: h.normal.len() });
            }
            if let Some(x) = h
                .normal
                .iter()
                .chain(std::iter::once(&h.offset))
                .find(|x| x.discriminant() != discriminant)
            {
                return Err(PolytopeError::DiscriminantMismatch {
                    index,
                    expected: discriminant,
                    got: x.discriminant(),
                });
            }
            if h.normal.iter().all(FieldScalar::is_zero) {
                return Err(PolytopeError::ZeroNormal(index));
            }
        }
        let float_normals =
            halfspaces.iter().map(|h| h.normal.iter().map(FieldScalar::to_f64).collect()).collect();
        let float_offsets = halfspaces.iter().map(|h| h.offset.to_f64()).collect();
        Ok(PolytopeH {
            dim,
            discriminant,
            halfspaces,
            float_normals,
            float_offsets,
            vertices: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn discriminant(&self) -> u64 {
        self.discriminant
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn normals(&self) -> Vec<Vec<FieldScalar>> {
        self.halfspaces.iter().map(|h| h.normal.clone()).collect()
    }

    pub fn offsets(&self) -> Vec<FieldScalar> {
        self.halfspaces.iter().map(|h| h.offset.clone()).collect()
    }

    pub fn float_normals(&self) -> &[Vec<f64>] {
        &self.float_normals
    }

    pub fn float_offsets(&self) -> &[f64] {
        &self.float_offsets
    }

    /// The `n × d` matrix whose columns are the normals.
    pub fn generator_matrix(&self) -> FieldMatrix {
        ExactMatrix::from_fn(self.dim, self.num_facets(), |i, j| {
            self.halfspaces[j].normal[i].clone()
        })
    }

    /// The `|rows| × n` matrix with the selected normals as rows.
    pub fn normal_rows(&self, facets: &[usize]) -> FieldMatrix {
        ExactMatrix::from_fn(facets.len(), self.dim, |i, j| {
            self.halfspaces[facets[i]].normal[j].clone()
        })
    }

    /// Exact slack `⟨μ, X_j⟩ − λ_j`.
    pub fn slack(&self, facet: usize, mu: &[FieldScalar]) -> FieldScalar {
        let h = &self.halfspaces[facet];
        let dot = h
            .normal
            .iter()
            .zip(mu)
            .fold(FieldScalar::zero(self.discriminant), |acc, (x, y)| acc + x * y);
        dot - h.offset.clone()
    }

    /// Float slacks of every facet.
    pub fn float_slacks(&self, mu: &[f64]) -> Vec<f64> {
        assert_eq!(mu.len(), self.dim, "point has the wrong dimension");
        self.float_normals
            .iter()
            .zip(&self.float_offsets)
            .map(|(x, l)| x.iter().zip(mu).map(|(a, b)| a * b).sum::<f64>() - l)
            .collect()
    }

    /// Exact membership test.
    pub fn contains_exact(&self, mu: &[FieldScalar]) -> bool {
        assert_eq!(mu.len(), self.dim, "point has the wrong dimension");
        (0..self.num_facets()).all(|j| !self.slack(j, mu).is_negative())
    }

    /// Float membership test with slack `eps ≥ 0`.
    pub fn contains_approx(&self, mu: &[f64], eps: f64) -> bool {
        self.float_slacks(mu).iter().all(|&s| s >= -eps)
    }

    /// Cached result of [`enumerate_vertices`].
    pub fn vertices(&self) -> Result<&[Vertex], PolytopeError> {
        match self.vertices.get_or_init(|| enumerate_uncached(self)) {
            Ok(v) => Ok(v),
            Err(e) => Err(e.clone()),
        }
    }

    /// Facet sets of all proper nonempty faces: every nonempty subset of
    /// some vertex active set, sorted by size then lexicographically.
    pub fn faces(&self) -> Result<Vec<Vec<usize>>, PolytopeError> {
        let mut faces = BTreeSet::new();
        for v in self.vertices()? {
            for k in 1..=v.active.len() {
                for subset in v.active.iter().copied().combinations(k) {
                    faces.insert((k, subset));
                }
            }
        }
        Ok(faces.into_iter().map(|(_, f)| f).collect())
    }

    /// Per-coordinate `[min, max]` of the vertex float embeddings.
    pub fn bounding_box(&self) -> Result<Vec<(f64, f64)>, PolytopeError> {
        let verts = self.vertices()?;
        Ok((0..self.dim)
            .map(|i| {
                verts.iter().map(|v| v.coords[i].to_f64()).fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), x| (lo.min(x), hi.max(x)),
                )
            })
            .collect())
    }

    pub fn check_simple(&self) -> Result<SimplicityReport, PolytopeError> {
        let offending: Vec<Vertex> = self
            .vertices()?
            .iter()
            .filter(|v| v.active.len() != self.dim || self.normal_rows(&v.active).rank() != self.dim)
            .cloned()
            .collect();
        Ok(SimplicityReport { is_simple: offending.is_empty(), offending })
    }
}

/// Every vertex of the polytope, ordered lexicographically by active set.
pub fn enumerate_vertices(p: &PolytopeH) -> Result<Vec<Vertex>, PolytopeError> {
    p.vertices().map(<[Vertex]>::to_vec)
}

pub fn check_simple(p: &PolytopeH) -> Result<SimplicityReport, PolytopeError> {
    p.check_simple()
}

pub fn bounding_box(p: &PolytopeH) -> Result<Vec<(f64, f64)>, PolytopeError> {
    p.bounding_box()
}

fn enumerate_uncached(p: &PolytopeH) -> Result<Vec<Vertex>, PolytopeError> {
    let n = p.dim;
    let d = p.num_facets();
    if p.generator_matrix().rank() < n {
        // a nonempty polyhedron whose normals miss a direction contains a line
        return Err(PolytopeError::Unbounded);
    }
    let mut found: HashSet<Vec<FieldScalar>> = HashSet::new();
    let mut order = Vec::new();
    for subset in (0..d).combinations(n) {
        let a = p.normal_rows(&subset);
        let rhs: Vec<FieldScalar> = subset.iter().map(|&j| p.halfspaces[j].offset.clone()).collect();
        let Some(mu) = a.solve(&rhs) else { continue };
        if found.contains(&mu) || !p.contains_exact(&mu) {
            continue;
        }
        found.insert(mu.clone());
        order.push(mu);
    }
    if order.is_empty() {
        return Err(PolytopeError::EmptyPolytope);
    }
    if has_recession_ray(p) {
        return Err(PolytopeError::Unbounded);
    }
    let mut vertices: Vec<Vertex> = order
        .into_iter()
        .map(|coords| {
            let active = (0..d).filter(|&j| p.slack(j, &coords).is_zero()).collect();
            Vertex { coords, active }
        })
        .collect();
    vertices.sort_by(|a, b| a.active.cmp(&b.active));

    let affine_dim = affine_dimension(&vertices);
    if affine_dim < n {
        return Err(PolytopeError::LowerDimensional { affine_dim, ambient_dim: n });
    }
    Ok(vertices)
}

/// Looks for an extreme ray of the recession cone `{y : ⟨y, X_j⟩ ≥ 0 ∀j}`.
/// The cone is pointed once the normals span, so a nonzero cone has a ray cut
/// out by `n − 1` independent normals.
fn has_recession_ray(p: &PolytopeH) -> bool {
    let n = p.dim;
    let m = p.discriminant;
    let candidates: Vec<Vec<FieldScalar>> = if n == 1 {
        vec![vec![FieldScalar::one(m)]]
    } else {
        (0..p.num_facets())
            .combinations(n - 1)
            .filter_map(|subset| {
                let mut kernel = p.normal_rows(&subset).kernel();
                (kernel.len() == 1).then(|| kernel.remove(0))
            })
            .collect()
    };
    candidates.into_iter().any(|y| {
        let neg: Vec<FieldScalar> = y.iter().map(|x| -x).collect();
        [y, neg].iter().any(|dir| {
            p.halfspaces.iter().all(|h| {
                let dot = h
                    .normal
                    .iter()
                    .zip(dir)
                    .fold(FieldScalar::zero(m), |acc, (a, b)| acc + a * b);
                !dot.is_negative()
            })
        })
    })
}

fn affine_dimension(vertices: &[Vertex]) -> usize {
    let Some((first, rest)) = vertices.split_first() else { return 0 };
    if rest.is_empty() {
        return 0;
    }
    let diffs: Vec<Vec<FieldScalar>> = rest
        .iter()
        .map(|v| v.coords.iter().zip(&first.coords).map(|(a, b)| a - b).collect())
        .collect();
    FieldMatrix::from_rows(diffs).map(|m| m.rank()).unwrap_or(0)
}
