//! End-to-end run: config → polytope → construction → certificates →
//! isotropy groups → sampling, rendered as a fixed-order text report.

use std::fmt::Write as _;

use thiserror::Error;

use crate::config::{ConfigError, ProblemConfig};
use crate::delzant::{DelzantData, DelzantError, RegularityCertificate};
use crate::exactmath::FieldScalar;
use crate::polytope::{PolytopeError, SimplicityReport, Vertex};
use crate::quasilattice::{classify, Classification, IsotropyGroup, QuasilatticeError, SpaceKind};
use crate::verify::{sample_moment_image, SampleError, SampleReport};

/// Process exit codes. Every failure maps to exactly one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExitCode {
    Success = 0,
    /// Bad command line or unreadable/unwritable file.
    Usage = 2,
    /// Config text failed to parse.
    InvalidConfig = 3,
    /// Empty, unbounded, lower-dimensional or otherwise malformed polytope.
    Degenerate = 4,
    NotSimple = 5,
    NotRegular = 6,
    /// Sampling or the float moment map failed.
    SamplingFailed = 7,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn label(self) -> &'static str {
        match self {
            ExitCode::Success => "ok",
            ExitCode::Usage => "usage",
            ExitCode::InvalidConfig => "invalid-config",
            ExitCode::Degenerate => "degenerate",
            ExitCode::NotSimple => "not-simple",
            ExitCode::NotRegular => "not-regular",
            ExitCode::SamplingFailed => "sampling-failed",
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Quasilattice(#[from] QuasilatticeError),
    #[error(transparent)]
    Delzant(DelzantError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl From<DelzantError> for PipelineError {
    fn from(e: DelzantError) -> Self {
        match e {
            DelzantError::Polytope(p) => PipelineError::Polytope(p),
            DelzantError::Quasilattice(q) => PipelineError::Quasilattice(q),
            other => PipelineError::Delzant(other),
        }
    }
}

impl PipelineError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            PipelineError::Config(_) => ExitCode::InvalidConfig,
            PipelineError::Polytope(_) | PipelineError::Quasilattice(_) => ExitCode::Degenerate,
            PipelineError::Delzant(DelzantError::NotSimple(_)) => ExitCode::NotSimple,
            PipelineError::Delzant(_) | PipelineError::Sample(_) => ExitCode::SamplingFailed,
            PipelineError::Io { .. } => ExitCode::Usage,
        }
    }
}

/// Which isotropy groups to list in the report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FaceListing {
    #[default]
    Vertices,
    All,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: ProblemConfig,
    pub vertices: Vec<Vertex>,
    pub simplicity: SimplicityReport,
    pub regularity: RegularityCertificate,
    pub q_rank: usize,
    pub is_lattice: bool,
    pub relations: Vec<Vec<String>>,
    pub subgroup_dim: usize,
    pub reduced_dim: usize,
    /// Present only when the polytope is simple.
    pub classification: Option<Classification>,
    pub vertex_groups: Vec<IsotropyGroup>,
    pub samples: Option<SampleReport>,
    /// Sampled moment values, one row per sample.
    pub sample_values: Vec<Vec<f64>>,
    pub faces: FaceListing,
    pub status: ExitCode,
}

impl Report {
    pub fn kind(&self) -> Option<SpaceKind> {
        self.classification.as_ref().map(|c| c.kind)
    }

    /// Whether every sampled moment value lies in `Δ` up to the tolerance.
    pub fn image_within_tolerance(&self) -> Option<bool> {
        self.samples.as_ref().map(|s| s.max_outside_slack <= self.config.tolerance)
    }

    /// UTF-8, LF-terminated, fixed key order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let cfg = &self.config;
        line(w, "status", self.status.label());
        line(w, "exit_code", self.status.code());
        line(w, "ambient_dim", cfg.ambient_dim);
        line(w, "discriminant", cfg.discriminant);
        line(w, "facets", cfg.halfspaces.len());
        for (j, h) in cfg.halfspaces.iter().enumerate() {
            let normal: Vec<String> = h.normal.iter().map(FieldScalar::to_config_string).collect();
            line(
                w,
                &format!("facet[{j}]"),
                format!("normal=[{}] lambda={}", normal.join(", "), h.offset.to_config_string()),
            );
        }
        line(w, "vertices", self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            let exact: Vec<String> = v.coords.iter().map(FieldScalar::to_config_string).collect();
            let float: Vec<String> = v.to_f64().into_iter().map(fmt_f64).collect();
            line(
                w,
                &format!("vertex[{i}]"),
                format!("active={:?} exact=[{}] float=[{}]", v.active, exact.join(", "), float.join(", ")),
            );
        }
        line(w, "simple", self.simplicity.is_simple);
        for v in &self.simplicity.offending {
            line(w, "simple.offending_vertex", format!("active={:?}", v.active));
        }
        line(w, "quasilattice.q_rank", self.q_rank);
        line(w, "quasilattice.is_lattice", self.is_lattice);
        let rels: Vec<String> = self.relations.iter().map(|r| format!("[{}]", r.join(", "))).collect();
        line(w, "quasilattice.relations", format!("[{}]", rels.join(", ")));
        line(
            w,
            "regular_value",
            if self.regularity.passed { "pass".to_string() } else { "fail".to_string() },
        );
        if let Some(face) = &self.regularity.offending_face {
            line(w, "regular_value.offending_face", format!("{face:?}"));
        }
        line(w, "regular_value.vertices_checked", self.regularity.faces_checked);
        line(w, "dim_N", self.subgroup_dim);
        line(w, "dim_M", self.reduced_dim);
        match &self.classification {
            Some(c) => {
                line(w, "classification", c.kind);
                line(
                    w,
                    "isotropy.definition",
                    "(Q cap span X_F) / Z<X_F>, rational-case analogue of the local structure groups",
                );
                for g in &self.vertex_groups {
                    line(w, "vertex_group", fmt_group(g));
                }
                if self.faces == FaceListing::All {
                    for g in &c.groups {
                        line(w, "face_group", fmt_group(g));
                    }
                }
            }
            None => line(w, "classification", "none"),
        }
        if let Some(s) = &self.samples {
            line(w, "samples.count", s.samples);
            line(w, "samples.seed", s.seed);
            line(w, "samples.tolerance", fmt_f64(cfg.tolerance));
            line(w, "samples.max_roundtrip_error", fmt_f64(s.max_roundtrip_error));
            line(w, "samples.max_level_residual", fmt_f64(s.max_level_residual));
            line(w, "samples.max_outside_slack", fmt_f64(s.max_outside_slack));
            line(w, "samples.image_within_tolerance", s.max_outside_slack <= cfg.tolerance);
            for (i, ((sampled, exact), gap)) in
                s.sampled_extent.iter().zip(&s.exact_extent).zip(&s.extent_gaps).enumerate()
            {
                line(
                    w,
                    &format!("samples.extent[{i}]"),
                    format!(
                        "sampled=[{}, {}] exact=[{}, {}] gap={}",
                        fmt_f64(sampled.0),
                        fmt_f64(sampled.1),
                        fmt_f64(exact.0),
                        fmt_f64(exact.1),
                        fmt_f64(*gap)
                    ),
                );
            }
            for (i, d) in s.vertex_distances.iter().enumerate() {
                line(w, &format!("samples.vertex_distance[{i}]"), fmt_f64(*d));
            }
        }
        out
    }

    /// `mu_1,…,mu_n` header plus one row per sample.
    pub fn samples_csv(&self) -> String {
        let n = self.config.ambient_dim;
        let mut out = (1..=n).map(|i| format!("mu_{i}")).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.sample_values {
            out.push_str(&row.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key}: {value}");
}

fn fmt_group(g: &IsotropyGroup) -> String {
    let factors: Vec<String> = g.invariant_factors.iter().map(ToString::to_string).collect();
    format!("face={:?} factors=[{}] free_rank={} group={}", g.face, factors.join(", "), g.free_rank, g)
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Runs the whole construction. Non-simple input still yields a report (with
/// a non-success status); malformed input is an error.
pub fn run_pipeline(cfg: &ProblemConfig, faces: FaceListing) -> Result<Report, PipelineError> {
    let polytope = cfg.polytope()?;
    let vertices = polytope.vertices()?.to_vec();
    let simplicity = polytope.check_simple()?;
    let data = DelzantData::assemble(&polytope)?;
    let regularity = data.check_regular_value()?;
    let q = data.quasilattice();
    let relations = q
        .relations()
        .to_rows()
        .into_iter()
        .map(|r| r.iter().map(ToString::to_string).collect())
        .collect();

    let mut report = Report {
        config: cfg.clone(),
        vertices,
        simplicity,
        regularity,
        q_rank: q.q_rank(),
        is_lattice: q.is_lattice(),
        relations,
        subgroup_dim: data.subgroup_dim(),
        reduced_dim: data.reduced_dim(),
        classification: None,
        vertex_groups: Vec::new(),
        samples: None,
        sample_values: Vec::new(),
        faces,
        status: ExitCode::Success,
    };
    if !report.simplicity.is_simple {
        report.status = ExitCode::NotSimple;
        return Ok(report);
    }
    if !report.regularity.passed {
        report.status = ExitCode::NotRegular;
        return Ok(report);
    }

    let classification = classify(q, &polytope.faces()?)?;
    report.vertex_groups = report
        .vertices
        .iter()
        .filter_map(|v| classification.groups.iter().find(|g| g.face == v.active).cloned())
        .collect();
    report.classification = Some(classification);

    let (samples, values) = sample_moment_image(&data, cfg.samples, cfg.seed, cfg.tolerance)?;
    report.samples = Some(samples);
    report.sample_values = values;
    Ok(report)
}
