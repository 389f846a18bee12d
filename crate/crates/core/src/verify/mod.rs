//! Property suites over finite probe families.
//!
//! Every pass is quantified over the probes, anchors and scales recorded in
//! the result; nothing here claims a statement for every interval.

mod catalog;
mod characterization;
mod decay;
mod geometry;
mod propagation;
mod transport;
mod worked;

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::muckenhoupt::TripleOptions;
use crate::porosity::{ProbeFamily, ProbeOptions};
use crate::real_sets::{Interval, SetDescription};

pub use catalog::{catalog, preset, random_finite, NamedSet, PRESET_NAMES};
pub use characterization::{a1_equivalence, SideAgreement};
pub use decay::{
    decay_report, dimension_report, least_squares_slope, DecayReport, DecayRow, DimensionReport,
    DIMENSION_TOLERANCE,
};
pub use geometry::{distance_bound, pore_distance};
pub use propagation::{left_propagation, scale_comparison};
pub use transport::{side_equivalence, transforms};
pub use worked::examples;

/// Keyed numbers and labels; non-finite numbers become the strings `inf`,
/// `-inf`, `nan`.
pub type Values = BTreeMap<String, Value>;

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub(crate) fn values<const N: usize>(pairs: [(&str, Value); N]) -> Values {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub(crate) fn interval_value(i: &Interval) -> Value {
    serde_json::json!([i.lo(), i.hi()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// `max d(x, E)` over `I` against `2(1 + d(I,E)/|I|) ρ(I)`.
    DistanceBound,
    /// `ρ(I⁺) ≥ C₀ max_{I⁺} d(x, E)` for probes near `E`.
    PoreDistance,
    /// `ρ(I) ≤ ((γ+1)/γ) ρ(I⁻)` on right-certified sets.
    LeftPropagation,
    /// Comparison of `ρ(I⁺)` and `ρ(J⁺)` for nested intervals.
    ScaleComparison,
    /// Geometric decay of neighbourhood measures.
    Decay,
    /// Box-counting dimension against the porosity bound.
    Dimension,
    /// Right porosity against boundedness of plus-side constants.
    A1Equivalence,
    /// Two-sided porosity against both one-sided conditions.
    SideEquivalence,
    /// Reflection duality and cutoff transport.
    Transforms,
    /// Worked examples on fixed sets.
    Examples,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::DistanceBound,
        Suite::PoreDistance,
        Suite::LeftPropagation,
        Suite::ScaleComparison,
        Suite::Decay,
        Suite::Dimension,
        Suite::A1Equivalence,
        Suite::SideEquivalence,
        Suite::Transforms,
        Suite::Examples,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DistanceBound => "distance-bound",
            Suite::PoreDistance => "pore-distance",
            Suite::LeftPropagation => "left-propagation",
            Suite::ScaleComparison => "scale-comparison",
            Suite::Decay => "decay",
            Suite::Dimension => "dimension",
            Suite::A1Equivalence => "a1-equivalence",
            Suite::SideEquivalence => "side-equivalence",
            Suite::Transforms => "transforms",
            Suite::Examples => "examples",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::Parse(format!(
                    "unknown suite {s:?} (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub values: Values,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub set: String,
    pub parameters: Values,
    /// Short description of the probe family the checks ran on.
    pub probes: String,
    /// False when the suite's hypothesis does not hold for this set; such a
    /// suite runs no checks and passes vacuously.
    pub applicable: bool,
    pub checks: usize,
    pub failure_count: usize,
    /// The first failures, each with the values needed to replay it.
    pub failures: Vec<Failure>,
    pub constants: Values,
    pub pass: bool,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

const MAX_FAILURES: usize = 64;

/// Accumulates checks for one suite run.
pub(crate) struct Tally {
    result: SuiteResult,
}

impl Tally {
    pub fn new(suite: Suite, set: &NamedSet) -> Tally {
        Tally {
            result: SuiteResult {
                suite,
                set: set.label.clone(),
                parameters: Values::new(),
                probes: String::new(),
                applicable: true,
                checks: 0,
                failure_count: 0,
                failures: Vec::new(),
                constants: Values::new(),
                pass: true,
                notes: Vec::new(),
                details: Value::Null,
            },
        }
    }

    pub fn check(&mut self, ok: bool, check: &str, values: impl FnOnce() -> Values) {
        self.result.checks += 1;
        if !ok {
            self.result.failure_count += 1;
            if self.result.failures.len() < MAX_FAILURES {
                self.result.failures.push(Failure {
                    check: check.to_string(),
                    values: values(),
                });
            }
        }
    }

    pub fn parameter(&mut self, key: &str, v: Value) {
        self.result.parameters.insert(key.to_string(), v);
    }

    pub fn constant(&mut self, key: &str, v: Value) {
        self.result.constants.insert(key.to_string(), v);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.result.notes.push(text.into());
    }

    pub fn probes(&mut self, family: &ProbeFamily) {
        self.result.probes = describe(family);
    }

    pub fn not_applicable(&mut self, why: impl Into<String>) {
        self.result.applicable = false;
        self.note(why);
    }

    pub fn details(&mut self, details: Value) {
        self.result.details = details;
    }

    pub fn finish(mut self) -> SuiteResult {
        self.result.pass = self.result.failure_count == 0;
        self.result
    }
}

pub(crate) fn describe(family: &ProbeFamily) -> String {
    let mut parts = Vec::new();
    if !family.anchors.is_empty() {
        let lo = family.scales.first().map_or(0.0, |s| s.log2());
        let hi = family.scales.last().map_or(0.0, |s| s.log2());
        parts.push(format!(
            "{} anchors x lengths 2^{lo}..2^{hi} x {} alignments",
            family.anchors.len(),
            family.alignments.len()
        ));
    }
    if !family.random.is_empty() {
        parts.push(format!(
            "{} random (seed {})",
            family.random.len(),
            family.seed
        ));
    }
    if !family.extra.is_empty() {
        parts.push(format!("{} explicit", family.extra.len()));
    }
    format!("{} probes: {}", family.len(), parts.join(" + "))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub window: Interval,
    pub probes: ProbeOptions,
    /// Extra octaves above the window scale for the sweeps that must see
    /// large-scale failures.
    pub wide_octaves: u32,
    pub eta: f64,
    pub decay_depth: u32,
    pub propagation_probes: usize,
    pub triples: TripleOptions,
    /// Exponents tried on sets that are not right-certified.
    pub alpha_grid: Vec<f64>,
    pub cut_at: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            window: Interval::new(-64.0, 64.0).expect("valid window"),
            probes: ProbeOptions::default(),
            wide_octaves: 9,
            eta: 2.0,
            decay_depth: 8,
            propagation_probes: 10_000,
            triples: TripleOptions::default(),
            alpha_grid: vec![0.125, 0.25, 0.5, 0.75],
            cut_at: 0.0,
        }
    }
}

impl SuiteConfig {
    pub fn family(&self, set: &SetDescription) -> Result<ProbeFamily> {
        ProbeFamily::around(set, &self.window, &self.probes)
    }

    /// The default family stretched `wide_octaves` above the window scale.
    pub fn wide_family(&self, set: &SetDescription) -> Result<ProbeFamily> {
        let top = self.window.length().log2().ceil() as i32 + self.wide_octaves as i32;
        let options = ProbeOptions {
            octaves: self.probes.octaves + self.wide_octaves,
            top_exponent: Some(top),
            ..self.probes
        };
        ProbeFamily::around(set, &self.window, &options)
    }
}

pub fn run_suite(suite: Suite, set: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    match suite {
        Suite::DistanceBound => distance_bound(set, config),
        Suite::PoreDistance => pore_distance(set, config),
        Suite::LeftPropagation => left_propagation(set, config),
        Suite::ScaleComparison => scale_comparison(set, config),
        Suite::Decay => decay::decay_suite(set, config),
        Suite::Dimension => decay::dimension_suite(set, config),
        Suite::A1Equivalence => a1_equivalence(set, config),
        Suite::SideEquivalence => side_equivalence(set, config),
        Suite::Transforms => transforms(set, config),
        Suite::Examples => examples(set, config),
    }
}

/// Sets as rows, suites as columns; cells are `pass`, `fail`, `n/a` or empty.
pub fn write_summary_csv<W: Write>(results: &[SuiteResult], out: W) -> Result<()> {
    let mut suites: Vec<Suite> = results.iter().map(|r| r.suite).collect();
    suites.sort();
    suites.dedup();
    let mut sets: Vec<&str> = Vec::new();
    for r in results {
        if !sets.contains(&r.set.as_str()) {
            sets.push(&r.set);
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["set"];
    header.extend(suites.iter().map(|s| s.name()));
    w.write_record(&header)?;
    for set in sets {
        let mut row = vec![set.to_string()];
        for suite in &suites {
            let cell = results
                .iter()
                .find(|r| r.set == set && r.suite == *suite)
                .map_or("", |r| match (r.applicable, r.pass) {
                    (false, _) => "n/a",
                    (true, true) => "pass",
                    (true, false) => "fail",
                });
            row.push(cell.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
