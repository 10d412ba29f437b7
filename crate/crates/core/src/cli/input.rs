//! JSON ingestion with exact rationals.
//!
//! A rational is a `"p/q"` string, an integer string, a `[p, q]` pair of
//! integers or a bare JSON integer. JSON numbers with a fraction or exponent
//! are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::Signed;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::Deserialize;

use crate::function::FunctionOnSpace;
use crate::measure::Prob;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::space::{Transformation, MAX_POINTS};
use crate::UpperProb;

/// A malformed or inconsistent input file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct InputError {
    pub path: PathBuf,
    pub message: String,
}

impl InputError {
    fn new(path: &Path, message: impl Into<String>) -> Self {
        Self { path: path.to_path_buf(), message: message.into() }
    }
}

/// Exact rational as read from JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactRational(pub Rational);

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = ExactRational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"p/q\", [p, q] or an integer")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
        Ok(ExactRational(Rational::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
        Ok(ExactRational(Rational::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
        Err(E::custom(format!("decimal number {v} is not accepted; write it as \"p/q\"")))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
        parse_rational(v).map(ExactRational).map_err(E::custom)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
        let numer: i64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &"a [p, q] pair"))?;
        let denom: i64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &"a [p, q] pair"))?;
        if seq.next_element::<de::IgnoredAny>()?.is_some() {
            return Err(de::Error::invalid_length(3, &"a [p, q] pair"));
        }
        if denom == 0 {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(ExactRational(Rational::new(BigInt::from(numer), BigInt::from(denom))))
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// A vector of masses, checked to be nonnegative and to sum to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassVector(pub Vec<Rational>);

impl<'de> Deserialize<'de> for MassVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let values: Vec<ExactRational> = Vec::deserialize(deserializer)?;
        let values: Vec<Rational> = values.into_iter().map(|r| r.0).collect();
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(de::Error::custom(format!("mass at point {i} is negative ({})", format_rational(v))));
        }
        let total: Rational = values.iter().sum();
        if total != Rational::from_integer(1.into()) {
            return Err(de::Error::custom(format!("masses sum to {}, expected 1", format_rational(&total))));
        }
        Ok(Self(values))
    }
}

/// The contents of a system file.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDescription {
    pub omega_size: usize,
    pub map: Vec<usize>,
    #[serde(default)]
    pub generators: Vec<MassVector>,
    #[serde(default)]
    pub probability: Option<MassVector>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbabilityDocument {
    probability: MassVector,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionDocument {
    function: Vec<ExactRational>,
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::new(path, format!("cannot read file: {e}")))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, InputError> {
    let mut deserializer = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut deserializer).map_err(|e| {
        // The inner message already ends with the line and column.
        let field = e.path().to_string();
        let inner = e.into_inner();
        if field == "." {
            InputError::new(path, inner.to_string())
        } else {
            InputError::new(path, format!("field `{field}`: {inner}"))
        }
    })?;
    deserializer.end().map_err(|e| InputError::new(path, e.to_string()))?;
    Ok(value)
}

/// The document is either a bare array or an object with a single key.
fn is_bare_array(text: &str) -> bool {
    text.trim_start().starts_with('[')
}

/// Parses and validates a system file.
pub fn load_system(path: &Path) -> Result<SystemDescription, InputError> {
    let system: SystemDescription = parse(path, &read(path)?)?;
    system.validate(path)?;
    Ok(system)
}

impl SystemDescription {
    fn validate(&self, path: &Path) -> Result<(), InputError> {
        let m = self.omega_size;
        if m == 0 || m > MAX_POINTS {
            return Err(InputError::new(path, format!("field `omega_size`: {m} is outside 1..={MAX_POINTS}")));
        }
        if self.map.len() != m {
            return Err(InputError::new(path, format!("field `map`: has {} entries, expected {m}", self.map.len())));
        }
        if let Some((i, t)) = self.map.iter().enumerate().find(|(_, &t)| t >= m) {
            return Err(InputError::new(path, format!("field `map[{i}]`: image {t} is outside 0..{m}")));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.0.len() != m {
                return Err(InputError::new(
                    path,
                    format!("field `generators[{i}]`: has {} masses, expected {m}", g.0.len()),
                ));
            }
        }
        if let Some(p) = &self.probability {
            if p.0.len() != m {
                return Err(InputError::new(path, format!("field `probability`: has {} masses, expected {m}", p.0.len())));
            }
        }
        Ok(())
    }

    pub fn transformation(&self) -> Transformation {
        Transformation::new(self.map.clone()).expect("validated map")
    }

    /// The upper envelope of the generators; `None` when there are none.
    pub fn capacity(&self) -> Option<UpperProb> {
        if self.generators.is_empty() {
            return None;
        }
        let generators = self.generators.iter().map(|g| Prob::new(g.0.clone()).expect("validated mass")).collect();
        Some(UpperProb::envelope(generators).expect("nonempty generators"))
    }

    pub fn probability(&self) -> Option<Prob> {
        self.probability.as_ref().map(|p| Prob::new(p.0.clone()).expect("validated mass"))
    }
}

/// Reads a probability file: a bare array or `{"probability": [...]}`.
pub fn load_probability(path: &Path, width: usize) -> Result<Prob, InputError> {
    let text = read(path)?;
    let mass = if is_bare_array(&text) {
        parse::<MassVector>(path, &text)?
    } else {
        parse::<ProbabilityDocument>(path, &text)?.probability
    };
    if mass.0.len() != width {
        return Err(InputError::new(path, format!("probability has {} masses, expected {width}", mass.0.len())));
    }
    Ok(Prob::new(mass.0).expect("validated mass"))
}

/// Reads a function file: a bare array or `{"function": [...]}`.
pub fn load_function(path: &Path, width: usize) -> Result<FunctionOnSpace, InputError> {
    let text = read(path)?;
    let values = if is_bare_array(&text) {
        parse::<Vec<ExactRational>>(path, &text)?
    } else {
        parse::<FunctionDocument>(path, &text)?.function
    };
    if values.len() != width {
        return Err(InputError::new(path, format!("function has {} values, expected {width}", values.len())));
    }
    Ok(FunctionOnSpace::new(values.into_iter().map(|r| r.0).collect()).expect("validated width"))
}
