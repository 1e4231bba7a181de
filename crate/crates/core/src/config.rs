//! Problem description files.
//!
//! ```text
//! # quasi-sphere with s = 1, t = sqrt(2)
//! ambient_dim = 1
//! discriminant = 2
//! samples = 10000
//! seed = 0
//! tolerance = 1e-9
//! facet = [1/1] ; lambda = 0/1
//! facet = [0/1 - 1/1*sqrt(2)] ; lambda = 0/1 - 1/1*sqrt(2)
//! ```
//!
//! One `key = value` per line, `#` starts a comment. Each `facet` line gives
//! a normal `X_j` and offset `λ_j` of the halfspace `⟨μ, X_j⟩ ≥ λ_j`. Entries
//! are sums of terms `p/q` and `p/q*sqrt(m)` (integers and a bare `sqrt(m)`
//! are accepted too); whitespace is ignored and unary minus is allowed.

use std::fmt::Write as _;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::exactmath::{is_square_free, FieldScalar};
use crate::polytope::{Halfspace, PolytopeError, PolytopeH};

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: sqrt({got}) does not match discriminant {expected}")]
    DiscriminantMismatch { line: usize, column: usize, expected: u64, got: u64 },
    #[error("line {line}: {value} is not square-free")]
    NonSquareFreeDiscriminant { line: usize, value: u64 },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemConfig {
    pub ambient_dim: usize,
    pub discriminant: u64,
    pub halfspaces: Vec<Halfspace>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub emit_samples: Option<PathBuf>,
}

impl ProblemConfig {
    pub fn new(ambient_dim: usize, discriminant: u64, halfspaces: Vec<Halfspace>) -> Self {
        ProblemConfig {
            ambient_dim,
            discriminant,
            halfspaces,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            tolerance: DEFAULT_TOLERANCE,
            emit_samples: None,
        }
    }

    /// Configuration describing an existing polytope, with default options.
    pub fn from_polytope(p: &PolytopeH) -> Self {
        Self::new(p.dim(), p.discriminant(), p.halfspaces().to_vec())
    }

    pub fn polytope(&self) -> Result<PolytopeH, PolytopeError> {
        PolytopeH::new(self.ambient_dim, self.halfspaces.clone())
    }

    /// Canonical text form; `parse_config` reads it back to the same value.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ambient_dim = {}", self.ambient_dim);
        let _ = writeln!(out, "discriminant = {}", self.discriminant);
        let _ = writeln!(out, "samples = {}", self.samples);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "tolerance = {:?}", self.tolerance);
        if let Some(path) = &self.emit_samples {
            let _ = writeln!(out, "emit_samples = {}", path.display());
        }
        for h in &self.halfspaces {
            let normal: Vec<String> = h.normal.iter().map(FieldScalar::to_config_string).collect();
            let _ = writeln!(out, "facet = [{}] ; lambda = {}", normal.join(", "), h.offset.to_config_string());
        }
        out
    }
}

struct RawFacet {
    line: usize,
    text: String,
    /// Column (1-based) of the first character of `text`.
    start: usize,
}

pub fn parse_config(text: &str) -> Result<ProblemConfig, ConfigError> {
    let mut ambient_dim = None;
    let mut discriminant = None;
    let mut samples = DEFAULT_SAMPLES;
    let mut seed = DEFAULT_SEED;
    let mut tolerance = DEFAULT_TOLERANCE;
    let mut emit_samples = None;
    let mut facets = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(syntax(line, col_of(raw, content.len() - content.trim_start().len()), "expected `key = value`"));
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        let value_col = col_of(raw, eq + 1 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len()));
        match key {
            "ambient_dim" => ambient_dim = Some(parse_number::<usize>(value, line, value_col)?),
            "discriminant" => {
                let m = parse_number::<u64>(value, line, value_col)?;
                if !is_square_free(m) {
                    return Err(ConfigError::NonSquareFreeDiscriminant { line, value: m });
                }
                discriminant = Some(m);
            }
            "samples" => samples = parse_number(value, line, value_col)?,
            "seed" => seed = parse_number(value, line, value_col)?,
            "tolerance" => {
                let t: f64 = parse_number(value, line, value_col)?;
                if !(t.is_finite() && t >= 0.0) {
                    return Err(ConfigError::Invalid { line, message: "tolerance must be finite and >= 0".into() });
                }
                tolerance = t;
            }
            "emit_samples" => emit_samples = Some(PathBuf::from(value)),
            "facet" => facets.push(RawFacet { line, text: content[eq + 1..].to_string(), start: col_of(raw, eq + 1) }),
            other => {
                return Err(syntax(line, col_of(raw, content.find(other).unwrap_or(0)), &format!("unknown key `{other}`")))
            }
        }
    }

    let ambient_dim = ambient_dim.ok_or(ConfigError::MissingKey("ambient_dim"))?;
    let discriminant = discriminant.unwrap_or(1);
    let halfspaces = facets
        .iter()
        .map(|f| {
            let mut cur = Cursor::new(&f.text, f.line, f.start, discriminant);
            let h = cur.facet()?;
            if h.normal.len() != ambient_dim {
                return Err(ConfigError::Invalid {
                    line: f.line,
                    message: format!("normal has {} entries, expected {ambient_dim}", h.normal.len()),
                });
            }
            Ok(h)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProblemConfig { ambient_dim, discriminant, halfspaces, samples, seed, tolerance, emit_samples })
}

/// Parses a single field entry such as `1/2 - 3/4*sqrt(5)`.
pub fn parse_entry(text: &str, discriminant: u64) -> Result<FieldScalar, ConfigError> {
    let mut cur = Cursor::new(text, 1, 1, discriminant);
    let v = cur.entry()?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok(v)
}

/// 1-based column of byte offset `offset` in `line`.
fn col_of(line: &str, offset: usize) -> usize {
    line[..offset.min(line.len())].chars().count() + 1
}

fn syntax(line: usize, column: usize, message: &str) -> ConfigError {
    ConfigError::Syntax { line, column, message: message.to_string() }
}

fn parse_number<T: std::str::FromStr>(value: &str, line: usize, column: usize) -> Result<T, ConfigError> {
    value.parse().map_err(|_| syntax(line, column, &format!("invalid number `{value}`")))
}

/// Character cursor over one value, tracking the source column.
struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    start: usize,
    m: u64,
}

impl Cursor {
    fn new(src: &str, line: usize, start: usize, m: u64) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, line, start, m }
    }

    fn column(&self) -> usize {
        self.start + self.pos
    }

    fn error(&self, message: &str) -> ConfigError {
        syntax(self.line, self.column(), message)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ConfigError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let w: Vec<char> = word.chars().collect();
        if self.chars[self.pos..].starts_with(&w) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn facet(&mut self) -> Result<Halfspace, ConfigError> {
        self.expect('[')?;
        let mut normal = vec![self.entry()?];
        while self.eat(',') {
            normal.push(self.entry()?);
        }
        self.expect(']')?;
        self.expect(';')?;
        if !self.keyword("lambda") {
            return Err(self.error("expected `lambda`"));
        }
        self.expect('=')?;
        let offset = self.entry()?;
        if self.peek().is_some() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(Halfspace::new(normal, offset))
    }

    fn entry(&mut self) -> Result<FieldScalar, ConfigError> {
        let mut negative = self.eat('-');
        if !negative {
            self.eat('+');
        }
        let mut acc = FieldScalar::zero(self.m);
        loop {
            let t = self.term()?;
            acc = if negative { acc - t } else { acc + t };
            if self.eat('+') {
                negative = false;
            } else if self.eat('-') {
                negative = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FieldScalar, ConfigError> {
        if self.peek() == Some('s') {
            return self.sqrt();
        }
        let q = self.rational()?;
        if self.eat('*') {
            let s = self.sqrt()?;
            return Ok(&FieldScalar::rational(q, self.m) * &s);
        }
        Ok(FieldScalar::rational(q, self.m))
    }

    fn sqrt(&mut self) -> Result<FieldScalar, ConfigError> {
        let column = {
            self.skip_ws();
            self.column()
        };
        if !self.keyword("sqrt") {
            return Err(self.error("expected `sqrt`"));
        }
        self.expect('(')?;
        let k = self.integer()?;
        self.expect(')')?;
        let k: u64 = k.try_into().map_err(|_| syntax(self.line, column, "sqrt argument out of range"))?;
        if k == 1 {
            return Ok(FieldScalar::one(self.m));
        }
        if !is_square_free(k) {
            return Err(ConfigError::NonSquareFreeDiscriminant { line: self.line, value: k });
        }
        if k != self.m {
            return Err(ConfigError::DiscriminantMismatch { line: self.line, column, expected: self.m, got: k });
        }
        Ok(FieldScalar::sqrt_m(self.m))
    }

    fn integer(&mut self) -> Result<BigInt, ConfigError> {
        self.skip_ws();
        let begin = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        if begin == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits: String = self.chars[begin..self.pos].iter().collect();
        Ok(digits.parse().expect("ascii digits"))
    }

    fn rational(&mut self) -> Result<BigRational, ConfigError> {
        let num = self.integer()?;
        if !self.eat('/') {
            return Ok(BigRational::from_integer(num));
        }
        self.skip_ws();
        let column = self.column();
        let den = self.integer()?;
        if den.is_zero() {
            return Err(syntax(self.line, column, "zero denominator"));
        }
        Ok(BigRational::new(num, den))
    }
}
