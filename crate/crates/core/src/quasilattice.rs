//! The quasilattice `Q = ℤX₁ + … + ℤX_d`, its integer relation lattice, and
//! the discrete isotropy groups `Γ_F` of the faces of the polytope.
//!
//! Everything is computed through presentations in `ℤᵈ`: `Q ≅ ℤᵈ/K` with
//! `K = {k : Σ k_j X_j = 0}`, and for a face `F`
//!
//! ```text
//! Γ_F = S_F / (K + ℤ{e_j : j ∈ F}),   S_F = {k ∈ ℤᵈ : Σ k_j X_j ∈ span{X_j : j ∈ F}}
//! ```
//!
//! which is `(Q ∩ span X_F) / ℤX_F`. For rational data this reproduces the
//! classical orbifold structure groups; when `Q` is not discrete the groups
//! acquire free summands. The formula is the rational-case analogue, not a
//! chart group read off an atlas.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactmath::{
    saturate_lattice, smith_normal_form, to_rational, ExactError, ExactMatrix, FieldMatrix,
    FieldScalar, IntMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuasilatticeError {
    #[error("no generators given")]
    NoGenerators,
    #[error("generators do not span the ambient space (rank {rank} < {dim})")]
    GeneratorsDoNotSpan { rank: usize, dim: usize },
    #[error("normals of face {0:?} are linearly dependent")]
    DependentFaceNormals(Vec<usize>),
    #[error("facet index {0} out of range")]
    FacetOutOfRange(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `Q` together with its saturated relation lattice `K ⊂ ℤᵈ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quasilattice {
    generators: Vec<Vec<FieldScalar>>,
    dim: usize,
    relations: IntMatrix,
    q_rank: usize,
}

impl Quasilattice {
    pub fn generators(&self) -> &[Vec<FieldScalar>] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn discriminant(&self) -> u64 {
        self.generators[0][0].discriminant()
    }

    /// Rows form a ℤ-basis of `K`, in Hermite normal form.
    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Rank of `Q` as an abelian group, `d − rank K`.
    pub fn q_rank(&self) -> usize {
        self.q_rank
    }

    /// True when `Q` is discrete, i.e. a genuine lattice.
    pub fn is_lattice(&self) -> bool {
        self.q_rank == self.dim
    }

    /// The `n × d` matrix with the generators as columns.
    pub fn generator_matrix(&self) -> FieldMatrix {
        ExactMatrix::from_fn(self.dim, self.generators.len(), |i, j| self.generators[j][i].clone())
    }
}

/// `D = ℝⁿ/Q`, recorded through its quasilattice.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasitorusData {
    pub dim: usize,
    pub quasilattice: Quasilattice,
}

impl QuasitorusData {
    pub fn new(quasilattice: Quasilattice) -> Self {
        QuasitorusData { dim: quasilattice.dim(), quasilattice }
    }

    /// True when `D` is an honest torus.
    pub fn is_torus(&self) -> bool {
        self.quasilattice.is_lattice()
    }
}

pub fn build_quasilattice(generators: Vec<Vec<FieldScalar>>) -> Result<Quasilattice, QuasilatticeError> {
    let d = generators.len();
    let Some(dim) = generators.first().map(Vec::len) else {
        return Err(QuasilatticeError::NoGenerators);
    };
    if dim == 0 || generators.iter().any(|g| g.len() != dim) {
        return Err(ExactError::Ragged.into());
    }
    let gm = ExactMatrix::from_fn(dim, d, |i, j| generators[j][i].clone());
    gm.check_discriminant()?;
    let rank = gm.rank();
    if rank < dim {
        return Err(QuasilatticeError::GeneratorsDoNotSpan { rank, dim });
    }
    let relations = saturated(&gm.rational_kernel(), d)?;
    let q_rank = d - relations.nrows();
    Ok(Quasilattice { generators, dim, relations, q_rank })
}

pub fn is_lattice(q: &Quasilattice) -> bool {
    q.is_lattice()
}

fn saturated(basis: &[Vec<BigRational>], d: usize) -> Result<IntMatrix, ExactError> {
    if basis.is_empty() {
        Ok(IntMatrix::from_fn(0, d, |_, _| BigInt::zero()))
    } else {
        saturate_lattice(basis)
    }
}

/// `Γ_F` as a finitely generated abelian group `ℤ^free_rank ⊕ ⨁ ℤ/d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IsotropyGroup {
    pub face: Vec<usize>,
    /// Invariant factors ≥ 2 forming a divisibility chain.
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl IsotropyGroup {
    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.invariant_factors.iter().product())
    }
}

impl fmt::Display for IsotropyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".into());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// The two lattices presenting `Γ_F`: a basis of `S_F` and the generators of
/// `L_F = K + ℤ{e_j : j ∈ F}`, both as integer row matrices in `ℤᵈ`.
#[derive(Clone, Debug)]
pub struct FacePresentation {
    pub ambient: IntMatrix,
    pub subgroup: IntMatrix,
}

pub fn face_presentation(q: &Quasilattice, face: &[usize]) -> Result<FacePresentation, QuasilatticeError> {
    let d = q.num_generators();
    let n = q.dim();
    let m = q.discriminant();
    if let Some(&j) = face.iter().find(|&&j| j >= d) {
        return Err(QuasilatticeError::FacetOutOfRange(j));
    }
    let face_rows = ExactMatrix::from_fn(face.len(), n, |i, k| q.generators[face[i]][k].clone());
    if !face.is_empty() && face_rows.rank() != face.len() {
        return Err(QuasilatticeError::DependentFaceNormals(face.to_vec()));
    }

    // annihilator of span X_F: covectors c with ⟨c, X_j⟩ = 0 for j ∈ F
    let annihilator: Vec<Vec<FieldScalar>> = if face.is_empty() {
        (0..n)
            .map(|i| (0..n).map(|k| if i == k { FieldScalar::one(m) } else { FieldScalar::zero(m) }).collect())
            .collect()
    } else {
        face_rows.kernel()
    };
    let ambient = if annihilator.is_empty() {
        IntMatrix::from_fn(d, d, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
    } else {
        let c = FieldMatrix::from_rows(annihilator)?;
        let constraint = c.mul_mat(&q.generator_matrix());
        saturated(&constraint.rational_kernel(), d)?
    };

    let k = q.relations();
    let subgroup = IntMatrix::from_fn(k.nrows() + face.len(), d, |i, j| {
        if i < k.nrows() {
            k[(i, j)].clone()
        } else if face[i - k.nrows()] == j {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    });
    Ok(FacePresentation { ambient, subgroup })
}

/// Integer coordinates of each row of `vectors` in the basis `basis`
/// (rows of both in ℤᵈ). Panics if some row is not in the lattice.
fn coordinates_in(basis: &IntMatrix, vectors: &IntMatrix) -> IntMatrix {
    let s = basis.nrows();
    if s == 0 || vectors.nrows() == 0 {
        return IntMatrix::from_fn(vectors.nrows(), s, |_, _| BigInt::zero());
    }
    let b = to_rational(basis);
    let pivots = b.rref().pivots;
    debug_assert_eq!(pivots.len(), s);
    // cᵀ B = v restricted to the pivot columns is a square invertible system
    let inverse = b
        .select_columns(&pivots)
        .transpose()
        .inverse()
        .expect("basis rows are independent");
    let rows = (0..vectors.nrows())
        .map(|r| {
            let rhs: Vec<BigRational> =
                pivots.iter().map(|&p| BigRational::from_integer(vectors[(r, p)].clone())).collect();
            let c = inverse.mul_vec(&rhs);
            for j in 0..basis.ncols() {
                let recon = c.iter().enumerate().fold(BigRational::zero(), |acc, (i, ci)| {
                    acc + ci * BigRational::from_integer(basis[(i, j)].clone())
                });
                assert_eq!(
                    recon,
                    BigRational::from_integer(vectors[(r, j)].clone()),
                    "vector outside the span of the basis"
                );
            }
            c.into_iter()
                .map(|x| {
                    assert!(x.is_integer(), "vector outside the lattice");
                    x.to_integer()
                })
                .collect()
        })
        .collect();
    IntMatrix::from_rows(rows).expect("rectangular")
}

pub fn isotropy_group(q: &Quasilattice, face: &[usize]) -> Result<IsotropyGroup, QuasilatticeError> {
    let pres = face_presentation(q, face)?;
    let coords = coordinates_in(&pres.ambient, &pres.subgroup);
    let s = pres.ambient.nrows();
    let snf = smith_normal_form(&coords);
    Ok(IsotropyGroup {
        face: face.to_vec(),
        invariant_factors: snf.nontrivial_factors(),
        free_rank: s - snf.rank,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Manifold,
    Orbifold,
    Quasifold,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceKind::Manifold => "Manifold",
            SpaceKind::Orbifold => "Orbifold",
            SpaceKind::Quasifold => "Quasifold",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub kind: SpaceKind,
    /// One group per face, in the order the faces were supplied.
    pub groups: Vec<IsotropyGroup>,
}

pub fn classify(q: &Quasilattice, faces: &[Vec<usize>]) -> Result<Classification, QuasilatticeError> {
    let groups = faces
        .iter()
        .map(|f| isotropy_group(q, f))
        .collect::<Result<Vec<_>, _>>()?;
    let kind = if groups.iter().any(|g| !g.is_finite()) {
        SpaceKind::Quasifold
    } else if groups.iter().any(|g| !g.is_trivial()) {
        SpaceKind::Orbifold
    } else {
        SpaceKind::Manifold
    };
    Ok(Classification { kind, groups })
}
