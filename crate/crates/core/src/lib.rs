//! Generalized Delzant construction for simple convex polytopes.
//!
//! Starting from an exact halfspace description of a simple polytope
//! `Δ = {μ : ⟨μ, X_j⟩ ≥ λ_j}` with normals in a real quadratic field, the
//! crate computes the symplectic-reduction data of `ℂᵈ` by the subgroup of
//! the torus whose Lie algebra is `ker(e_j ↦ X_j)`, certifies that `0` is a
//! regular value, checks that the induced moment map has image `Δ`, and
//! classifies the reduced space as a manifold, orbifold or quasifold from
//! the discrete isotropy groups of its faces.

pub mod exactmath;
pub mod fixtures;
pub mod polytope;
pub mod quasilattice;
pub mod delzant;
pub mod verify;
pub mod config;
pub mod pipeline;
