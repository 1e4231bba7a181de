//! Named example polytopes used throughout the tests, the CLI examples and
//! the Python bindings.

use crate::exactmath::FieldScalar;
use crate::polytope::{Halfspace, PolytopeH};

fn int_halfspaces(rows: &[(&[i64], i64)]) -> Vec<Halfspace> {
    rows.iter()
        .map(|(normal, offset)| {
            Halfspace::new(
                normal.iter().map(|&x| FieldScalar::from_int(x, 1)).collect(),
                FieldScalar::from_int(*offset, 1),
            )
        })
        .collect()
}

fn build(dim: usize, halfspaces: Vec<Halfspace>) -> PolytopeH {
    PolytopeH::new(dim, halfspaces).expect("fixture is well-formed")
}

/// `[0, 1]` cut out by `μ ≥ 0` and `−μ ≥ −1`.
pub fn interval() -> PolytopeH {
    build(1, int_halfspaces(&[(&[1], 0), (&[-1], -1)]))
}

/// Unit square, normals `e₁, e₂, −e₁, −e₂`.
pub fn square() -> PolytopeH {
    build(2, int_halfspaces(&[(&[1, 0], 0), (&[0, 1], 0), (&[-1, 0], -1), (&[0, -1], -1)]))
}

/// Standard triangle, normals `e₁, e₂, −e₁−e₂` (the moment polytope of ℂP²).
pub fn triangle() -> PolytopeH {
    build(2, int_halfspaces(&[(&[1, 0], 0), (&[0, 1], 0), (&[-1, -1], -1)]))
}

/// `[0, 1]` with normals `(1, −2)`: a teardrop-type weighted sphere.
pub fn weighted_sphere() -> PolytopeH {
    build(1, int_halfspaces(&[(&[1], 0), (&[-2], -2)]))
}

/// `[0, 1]` with normals `(s, −t)` and offsets `(0, −t)`; irrational `s/t`
/// gives the quasi-sphere.
pub fn quasi_sphere(s: FieldScalar, t: FieldScalar) -> PolytopeH {
    let m = s.discriminant();
    build(
        1,
        vec![
            Halfspace::new(vec![s], FieldScalar::zero(m)),
            Halfspace::new(vec![-&t], -&t),
        ],
    )
}

/// Pyramid over `[−1,1]²` with apex `(0,0,1)`; the apex lies on four facets.
pub fn square_pyramid() -> PolytopeH {
    build(
        3,
        int_halfspaces(&[
            (&[-1, 0, -1], -1),
            (&[1, 0, -1], -1),
            (&[0, -1, -1], -1),
            (&[0, 1, -1], -1),
            (&[0, 0, 1], 0),
        ]),
    )
}

/// `τ = (√5 − 1)/2 = 2 cos(2π/5)`.
pub fn golden_tau() -> FieldScalar {
    FieldScalar::from_parts((-1, 2), (1, 2), 5)
}

/// Linear image of the regular pentagon whose normals lie in ℚ(√5)²:
/// `X₀ = e₁`, `X₁ = e₂`, `X_{k+1} = τ·X_k − X_{k−1}`, all offsets `−1`.
pub fn golden_pentagon() -> PolytopeH {
    let m = 5;
    let tau = golden_tau();
    let mut normals = vec![
        vec![FieldScalar::one(m), FieldScalar::zero(m)],
        vec![FieldScalar::zero(m), FieldScalar::one(m)],
    ];
    for k in 1..4 {
        let next: Vec<FieldScalar> =
            (0..2).map(|i| &tau * &normals[k][i] - normals[k - 1][i].clone()).collect();
        normals.push(next);
    }
    build(
        2,
        normals.into_iter().map(|x| Halfspace::new(x, FieldScalar::from_int(-1, m))).collect(),
    )
}

/// Every named fixture with a short label.
pub fn corpus() -> Vec<(&'static str, PolytopeH)> {
    vec![
        ("interval", interval()),
        ("triangle", triangle()),
        ("square", square()),
        ("pentagon", golden_pentagon()),
        ("quasi-sphere", quasi_sphere(FieldScalar::one(2), FieldScalar::sqrt_m(2))),
        ("weighted-sphere", weighted_sphere()),
        ("square-pyramid", square_pyramid()),
    ]
}
