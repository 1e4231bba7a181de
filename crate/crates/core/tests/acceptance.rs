//! Acceptance suite. Runs as a plain binary so every criterion prints exactly
//! one `PASS`/`FAIL` line; exits nonzero if any criterion fails.

// `ensure!(x <= tol)` expands to `!(x <= tol)` on purpose: NaN must fail
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::{lattice_vertex_order, rational_interior, unimodularly_equivalent};
use quasifold::config::{parse_config, ProblemConfig};
use quasifold::delzant::{act_torus, build_construction, Coords, DelzantData};
use quasifold::exactmath::{saturate_lattice, smith_normal_form, FieldScalar, IntMatrix};
use quasifold::fixtures;
use quasifold::pipeline::{run_pipeline, FaceListing, Report};
use quasifold::polytope::PolytopeH;
use quasifold::quasilattice::{classify, SpaceKind};
use quasifold::verify::{determinantal_divisor, sample_moment_image, saturation_oracle, snf_oracle, LEVEL_TOL};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn simple_fixtures() -> Vec<(&'static str, PolytopeH)> {
    fixtures::corpus().into_iter().filter(|(name, _)| *name != "square-pyramid").collect()
}

fn run_config(cfg: &ProblemConfig) -> Result<Report, String> {
    run_pipeline(cfg, FaceListing::All).map_err(|e| e.to_string())
}

fn quasi_sphere_run(t: FieldScalar, label: &str) -> Result<(Report, Duration), String> {
    let p = fixtures::quasi_sphere(FieldScalar::one(t.discriminant()), t);
    let mut cfg = ProblemConfig::from_polytope(&p);
    cfg.samples = 10_000;
    let start = Instant::now();
    let report = run_config(&cfg)?;
    let elapsed = start.elapsed();
    ensure!(report.reduced_dim == 2, "{label}: dim_M = {}", report.reduced_dim);
    ensure!(report.kind() == Some(SpaceKind::Quasifold), "{label}: kind {:?}", report.kind());
    let s = report.samples.as_ref().ok_or(format!("{label}: no samples"))?;
    ensure!(s.samples == 10_000, "{label}: {} samples", s.samples);
    let (lo, hi) = s.sampled_extent[0];
    ensure!(lo >= -1e-9 && hi <= 1.0 + 1e-9, "{label}: extent [{lo}, {hi}]");
    ensure!(s.exact_extent[0] == (0.0, 1.0), "{label}: exact extent {:?}", s.exact_extent[0]);
    ensure!(s.extent_gaps[0] <= 1e-3, "{label}: gap {}", s.extent_gaps[0]);
    ensure!(elapsed <= Duration::from_secs(5), "{label}: {elapsed:?}");
    Ok((report, elapsed))
}

fn criterion_1() -> Outcome {
    // the config text must describe the same polytope as the fixture
    let text = "ambient_dim = 1\ndiscriminant = 2\n\
                facet = [1/1] ; lambda = 0/1\n\
                facet = [0/1 - 1/1*sqrt(2)] ; lambda = 0/1 - 1/1*sqrt(2)\n";
    let parsed = parse_config(text).map_err(|e| e.to_string())?.polytope().map_err(|e| e.to_string())?;
    ensure!(
        parsed == fixtures::quasi_sphere(FieldScalar::one(2), FieldScalar::sqrt_m(2)),
        "parsed config differs from the quasi-sphere"
    );
    let (a, ta) = quasi_sphere_run(FieldScalar::sqrt_m(2), "t=sqrt2")?;
    let (b, tb) = quasi_sphere_run(FieldScalar::sqrt_m(3), "t=sqrt3")?;
    let (sa, sb) = (a.samples.unwrap(), b.samples.unwrap());
    ensure!(sa.exact_extent == sb.exact_extent, "exact extents differ");
    Ok(format!(
        "extent sqrt2 [{:.3e}, {:.12}] gap {:.1e} in {:.2?}; sqrt3 [{:.3e}, {:.12}] gap {:.1e} in {:.2?}",
        sa.sampled_extent[0].0,
        sa.sampled_extent[0].1,
        sa.extent_gaps[0],
        ta,
        sb.sampled_extent[0].0,
        sb.sampled_extent[0].1,
        sb.extent_gaps[0],
        tb
    ))
}

fn criterion_2() -> Outcome {
    let cases = [
        ("interval", fixtures::interval(), 2, 1),
        ("triangle", fixtures::triangle(), 3, 2),
        ("square", fixtures::square(), 4, 2),
        ("pentagon", fixtures::golden_pentagon(), 5, 2),
    ];
    let mut seen = Vec::new();
    for (name, p, d, n) in cases {
        let data = build_construction(&p).map_err(|e| format!("{name}: {e}"))?;
        ensure!(data.torus_rank() == d && data.dim() == n, "{name}: d={} n={}", data.torus_rank(), data.dim());
        // dim ℂᵈ − 2 dim N with dim N = d − n
        ensure!(2 * d - 2 * data.subgroup_dim() == 2 * n, "{name}: dim N = {}", data.subgroup_dim());
        ensure!(data.reduced_dim() == 2 * n, "{name}: dim_M = {}", data.reduced_dim());
        seen.push(format!("{name}={}", data.reduced_dim()));
    }
    Ok(seen.join(" "))
}

fn criterion_3() -> Outcome {
    let mut seen = Vec::new();
    for (name, p) in fixtures::corpus() {
        let simple = p.check_simple().map_err(|e| format!("{name}: {e}"))?.is_simple;
        let data = DelzantData::assemble(&p).map_err(|e| format!("{name}: {e}"))?;
        let regular = data.check_regular_value().map_err(|e| format!("{name}: {e}"))?.passed;
        ensure!(simple == regular, "{name}: simple={simple} regular={regular}");
        ensure!(simple == (name != "square-pyramid"), "{name}: unexpected simplicity {simple}");
        seen.push(format!("{name}={}", if simple { "simple" } else { "non-simple" }));
    }
    Ok(seen.join(" "))
}

fn criterion_4() -> Outcome {
    let mut seen = Vec::new();
    let cases = [
        ("square", fixtures::square()),
        ("triangle", fixtures::triangle()),
        ("weighted-sphere", fixtures::weighted_sphere()),
        ("pentagon", fixtures::golden_pentagon()),
    ];
    for (name, p) in cases {
        let start = Instant::now();
        let data = build_construction(&p).map_err(|e| format!("{name}: {e}"))?;
        let c = classify(data.quasilattice(), &p.faces().unwrap()).map_err(|e| format!("{name}: {e}"))?;
        let elapsed = start.elapsed();
        ensure!(elapsed <= Duration::from_secs(1), "{name}: {elapsed:?}");
        let vertices = p.vertices().unwrap();
        let vertex_groups: Vec<_> =
            vertices.iter().map(|v| c.groups.iter().find(|g| g.face == v.active).unwrap()).collect();
        match name {
            "square" | "triangle" => {
                ensure!(c.kind == SpaceKind::Manifold, "{name}: {:?}", c.kind);
                ensure!(c.groups.iter().all(|g| g.is_trivial()), "{name}: nontrivial group");
            }
            "weighted-sphere" => {
                ensure!(c.kind == SpaceKind::Orbifold, "{name}: {:?}", c.kind);
                let nontrivial: Vec<_> = vertex_groups.iter().filter(|g| !g.is_trivial()).collect();
                ensure!(nontrivial.len() == 1, "{name}: {} nontrivial vertex groups", nontrivial.len());
                let g = nontrivial[0];
                ensure!(
                    g.free_rank == 0 && g.invariant_factors == vec![BigInt::from(2)],
                    "{name}: group {g}"
                );
            }
            _ => {
                ensure!(c.kind == SpaceKind::Quasifold, "{name}: {:?}", c.kind);
                ensure!(vertex_groups.iter().all(|g| g.free_rank >= 1), "{name}: a vertex group has free rank 0");
            }
        }
        if data.quasilattice().is_lattice() {
            for (v, g) in vertices.iter().zip(&vertex_groups) {
                let expect = lattice_vertex_order(&p, &v.active);
                ensure!(g.order() == Some(expect.clone()), "{name}: |Γ_{:?}| = {:?}, oracle {expect}", v.active, g.order());
            }
        }
        seen.push(format!("{name}={} ({:.1?})", c.kind, elapsed));
    }
    Ok(seen.join(" "))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut exact_checked = 0;
    for (name, p) in simple_fixtures() {
        let data = build_construction(&p).map_err(|e| format!("{name}: {e}"))?;
        let mut points: Vec<Vec<FieldScalar>> = p.vertices().unwrap().iter().map(|v| v.coords.clone()).collect();
        points.extend(rational_interior(&p, &mut rng, 100));
        for mu in &points {
            let fiber = data.fiber_point(mu).map_err(|e| format!("{name}: {e}"))?;
            ensure!(data.psi(&fiber).unwrap().as_exact().unwrap().iter().all(FieldScalar::is_zero), "{name}: ψ ≠ 0");
            let back = data.moment_map(&fiber, 0.0).map_err(|e| format!("{name}: {e}"))?;
            ensure!(back == Coords::Exact(mu.clone()), "{name}: round trip failed at {mu:?}");
            exact_checked += 1;
            let mu_f: Vec<f64> = mu.iter().map(FieldScalar::to_f64).collect();
            let image = data
                .moment_map(&data.fiber_point_f64(&mu_f).map_err(|e| format!("{name}: {e}"))?, LEVEL_TOL)
                .map_err(|e| format!("{name}: {e}"))?
                .to_f64();
            let err = mu_f.iter().zip(&image).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            ensure!(err <= 1e-12, "{name}: float error {err:e} at {mu_f:?}");
            worst = worst.max(err);
        }
        let (report, _) = sample_moment_image(&data, 10_000, 11, LEVEL_TOL).map_err(|e| format!("{name}: {e}"))?;
        ensure!(report.samples == 10_000, "{name}: {} samples", report.samples);
        ensure!(report.max_roundtrip_error <= 1e-12, "{name}: float error {:e}", report.max_roundtrip_error);
        worst = worst.max(report.max_roundtrip_error);
    }
    Ok(format!("{exact_checked} exact round trips, worst float error {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for (name, p) in simple_fixtures() {
        let data = build_construction(&p).map_err(|e| format!("{name}: {e}"))?;
        let d = data.torus_rank();
        for mu in rational_interior(&p, &mut rng, 1000) {
            let phases: Vec<f64> = (0..d).map(|_| rng.random()).collect();
            let point = data.fiber_point(&mu).unwrap().with_phases(phases);
            let angles: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            let before = data.moment_map(&point, 0.0).map_err(|e| format!("{name}: {e}"))?;
            let after = data.moment_map(&act_torus(&point, &angles), 0.0).map_err(|e| format!("{name}: {e}"))?;
            ensure!(before == after, "{name}: moment map moved under the torus action");
            checked += 1;
        }
    }
    Ok(format!("{checked} (p, φ) pairs"))
}

fn random_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(rng.random_range(-5..=5)))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let snf_cases = 600;
    for i in 0..snf_cases {
        let (r, c) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let a = random_int_matrix(&mut rng, r, c);
        let got = smith_normal_form(&a).factors;
        let expect = snf_oracle(&a);
        ensure!(got == expect, "case {i}: {a} gives {got:?}, minors give {expect:?}");
    }
    let sat_cases = 300;
    let mut done = 0;
    while done < sat_cases {
        let d = rng.random_range(1..=4);
        let r = rng.random_range(1..=d);
        let ints = random_int_matrix(&mut rng, r, d);
        if determinantal_divisor(&ints, r).is_zero() {
            continue;
        }
        // rescale each row by a random nonzero rational
        let basis: Vec<Vec<BigRational>> = ints
            .to_rows()
            .into_iter()
            .map(|row| {
                let s = BigRational::new(rng.random_range(1..=6).into(), rng.random_range(1..=6).into());
                row.into_iter().map(|x| BigRational::from_integer(x) * &s).collect()
            })
            .collect();
        let got = saturate_lattice(&basis).map_err(|e| e.to_string())?.to_rows();
        let expect = saturation_oracle(&basis);
        ensure!(unimodularly_equivalent(&got, &expect), "saturation of {basis:?}: {got:?} vs {expect:?}");
        done += 1;
    }
    Ok(format!("{snf_cases} Smith forms, {sat_cases} saturations"))
}

fn criterion_8() -> Outcome {
    let fixtures = [("pentagon", fixtures::golden_pentagon()), ("weighted-sphere", fixtures::weighted_sphere())];
    for (name, p) in &fixtures {
        let mut cfg = ProblemConfig::from_polytope(p);
        cfg.samples = 2000;
        cfg.seed = 42;
        let a = run_config(&cfg)?;
        let b = run_config(&cfg)?;
        ensure!(a.render() == b.render(), "{name}: reports differ in process");
        ensure!(a.samples_csv() == b.samples_csv(), "{name}: CSVs differ in process");
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("pentagon.cfg");
    let mut cfg = ProblemConfig::from_polytope(&fixtures::golden_pentagon());
    cfg.samples = 3000;
    cfg.seed = 9;
    std::fs::write(&input, cfg.to_config_string()).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let report = dir.path().join(format!("report{run}.txt"));
        let csv = dir.path().join(format!("samples{run}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_quasifold"))
            .arg("--input")
            .arg(&input)
            .arg("--report")
            .arg(&report)
            .arg("--emit-samples")
            .arg(&csv)
            .arg("--faces")
            .arg("all")
            .status()
            .map_err(|e| e.to_string())?;
        ensure!(status.success(), "binary exited with {status}");
        let read = |p| std::fs::read(p).map_err(|e: std::io::Error| e.to_string());
        outputs.push((read(&report)?, read(&csv)?));
    }
    ensure!(outputs[0].0 == outputs[1].0, "binary reports differ");
    ensure!(outputs[0].1 == outputs[1].1, "binary CSVs differ");
    ensure!(!outputs[0].0.contains(&b'\r'), "report contains CR");
    Ok(format!("report {} bytes, CSV {} bytes, identical across runs", outputs[0].0.len(), outputs[0].1.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 quasi-sphere reproduction", criterion_1),
        ("2 dimension formula", criterion_2),
        ("3 regularity iff simplicity", criterion_3),
        ("4 rational specializations", criterion_4),
        ("5 moment round trip", criterion_5),
        ("6 torus invariance", criterion_6),
        ("7 oracle equivalence", criterion_7),
        ("8 determinism", criterion_8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (label, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&e))));
        match outcome {
            Ok(detail) => println!("PASS criterion {label}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {label}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}
