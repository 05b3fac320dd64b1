//! On-disk formats: sequence and run JSON (schema 1) and the check report.
//!
//! Reals are written as decimal strings with 17 significant digits so that
//! binary64 values round-trip exactly; `∞` is written as `"Infinity"`.

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context};
use hypwind::schottky::NestedSequence;
use hypwind::walpha::AlphaRun;
use hypwind::{BoundaryPoint, MoebiusMap};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_real(self.0))
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a real as a decimal string or number")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                parse_real(v)
                    .map(Real)
                    .ok_or_else(|| E::custom(format!("bad real {v:?}")))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn fmt_real(x: f64) -> String {
    if x == f64::INFINITY {
        "Infinity".into()
    } else if x == f64::NEG_INFINITY {
        "-Infinity".into()
    } else if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

fn parse_real(s: &str) -> Option<f64> {
    match s.trim() {
        "Infinity" => Some(f64::INFINITY),
        "-Infinity" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}

fn boundary(x: BoundaryPoint) -> Real {
    Real(x.as_real().unwrap_or(f64::INFINITY))
}

fn from_boundary(x: Real) -> BoundaryPoint {
    if x.0.is_infinite() {
        BoundaryPoint::Infinity
    } else {
        BoundaryPoint::Real(x.0)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Matrix {
    pub a: Real,
    pub b: Real,
    pub c: Real,
    pub d: Real,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Axis {
    pub minus: Real,
    pub plus: Real,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub schema: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceFile {
    pub generators: Vec<Matrix>,
    pub lengths: Vec<Real>,
    pub axes: Vec<Axis>,
    pub scales_log: Vec<Real>,
    pub meta: Meta,
}

/// A sequence file extended by the data of one run along a pick.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunFile {
    #[serde(flatten)]
    pub sequence: SequenceFile,
    pub pick: Vec<usize>,
    pub endpoints: Vec<Real>,
    pub r: Vec<Real>,
}

impl SequenceFile {
    pub fn from_sequence(seq: &NestedSequence) -> Self {
        SequenceFile {
            generators: seq
                .gens
                .iter()
                .map(|g| Matrix {
                    a: Real(g.a()),
                    b: Real(g.b()),
                    c: Real(g.c()),
                    d: Real(g.d()),
                })
                .collect(),
            lengths: seq.lengths.iter().map(|&l| Real(l)).collect(),
            axes: seq
                .axes
                .iter()
                .map(|a| Axis {
                    minus: boundary(a.minus),
                    plus: boundary(a.plus),
                })
                .collect(),
            scales_log: seq
                .axes
                .iter()
                .map(|a| Real(boundary(a.plus).0.abs().ln()))
                .collect(),
            meta: Meta { schema: SCHEMA },
        }
    }

    /// Rebuilds the sequence from the generators; nominal lengths are kept
    /// from the file.
    pub fn to_sequence(&self) -> anyhow::Result<NestedSequence> {
        if self.meta.schema != SCHEMA {
            bail!("unsupported schema {}", self.meta.schema);
        }
        if self.generators.is_empty() {
            bail!("sequence has no generators");
        }
        if self.lengths.len() != self.generators.len() {
            bail!(
                "{} lengths for {} generators",
                self.lengths.len(),
                self.generators.len()
            );
        }
        let gens = self
            .generators
            .iter()
            .enumerate()
            .map(|(n, m)| {
                MoebiusMap::new(m.a.0, m.b.0, m.c.0, m.d.0)
                    .with_context(|| format!("generator {n}"))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let mut seq = NestedSequence::from_generators(gens)?;
        seq.lengths = self.lengths.iter().map(|l| l.0).collect();
        for (n, (file, built)) in self.axes.iter().zip(&seq.axes).enumerate() {
            let (m, p) = (from_boundary(file.minus), from_boundary(file.plus));
            if m.gap(&built.minus) > 1e-9 || p.gap(&built.plus) > 1e-9 {
                bail!("axis {n} does not match its generator");
            }
        }
        Ok(seq)
    }
}

impl RunFile {
    pub fn new(seq: &NestedSequence, run: &AlphaRun) -> Self {
        RunFile {
            sequence: SequenceFile::from_sequence(seq),
            pick: run.pick.clone(),
            endpoints: run.endpoints.iter().map(|&x| Real(x)).collect(),
            r: run.r.iter().map(|&x| Real(x)).collect(),
        }
    }
}

/// Either kind of input accepted by `walpha` and `plot`.
pub enum Input {
    Sequence(SequenceFile),
    Run(RunFile),
}

impl Input {
    pub fn sequence(&self) -> &SequenceFile {
        match self {
            Input::Sequence(s) => s,
            Input::Run(r) => &r.sequence,
        }
    }
}

pub fn read_input(path: &Path) -> anyhow::Result<Input> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let input = if value.get("pick").is_some() {
        Input::Run(
            serde_json::from_value(value)
                .with_context(|| format!("reading run {}", path.display()))?,
        )
    } else {
        Input::Sequence(
            serde_json::from_value(value)
                .with_context(|| format!("reading sequence {}", path.display()))?,
        )
    };
    Ok(input)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteEntry {
    pub suite: &'static str,
    pub trials: u64,
    pub worst_slack: Real,
    pub violations: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckMeta {
    pub schema: u32,
    pub seed: u64,
    pub rng: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub meta: CheckMeta,
    pub suites: Vec<SuiteEntry>,
}
