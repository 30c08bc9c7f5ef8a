//! JSON records for vertices, inequalities, tensors and trial reports.
//!
//! Integers are written as JSON numbers and rationals as `"p/q"` strings.
//! Catalog files hold one record per line so they diff cleanly.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::{FaceCertificate, Inequality, LiftedInequality};
use crate::linalg::{format_rational, parse_rational, IntVector, RatVector, Rational};
use crate::membership::{FeasibilityResult, Trial, Witness};
use crate::polytope::{CorrelationTensor, Polytope, Scenario};

fn to_i64(x: &BigInt, what: &str) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Parse(format!("{what} {x} does not fit in 64 bits")))
}

fn ints(v: &IntVector, what: &str) -> Result<Vec<i64>> {
    v.iter().map(|x| to_i64(x, what)).collect()
}

fn rationals(v: &RatVector) -> Vec<String> {
    v.entries().iter().map(format_rational).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCatalog {
    pub scenario: Scenario,
    pub vertices: Vec<Vec<i64>>,
}

impl VertexCatalog {
    pub fn from_polytope(p: &Polytope) -> Result<Self> {
        let vertices = p.vertices().iter().map(|v| ints(v.tensor(), "vertex entry")).collect::<Result<_>>()?;
        Ok(VertexCatalog { scenario: p.scenario(), vertices })
    }

    pub fn to_json(&self) -> Result<String> {
        let head = format!("{{\"scenario\":{},\"vertices\":[", to_json(&self.scenario)?);
        let rows: Vec<String> = self.vertices.iter().map(to_json).collect::<Result<_>>()?;
        Ok(format!("{head}\n{}\n]}}\n", rows.join(",\n")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityRecord {
    pub scenario: Scenario,
    pub coefficients: Vec<i64>,
    pub bound: i64,
    pub provenance: String,
    pub tight: bool,
    pub saturating_count: usize,
}

impl InequalityRecord {
    pub fn from_certificate(cert: &FaceCertificate) -> Result<Self> {
        let iq = &cert.inequality;
        Ok(InequalityRecord {
            scenario: iq.scenario(),
            coefficients: ints(iq.coefficients(), "coefficient")?,
            bound: to_i64(iq.bound(), "bound")?,
            provenance: iq.provenance().to_string(),
            tight: cert.is_tight(),
            saturating_count: cert.saturating_count(),
        })
    }

    /// The inequality as written; certificate fields are not checked here.
    pub fn inequality(&self) -> Result<Inequality> {
        let coefficients = IntVector::from_i64s(self.coefficients.iter().copied());
        Inequality::new(self.scenario, coefficients, self.bound.into(), self.provenance.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub scenario: Scenario,
    pub values: Vec<String>,
}

impl TensorRecord {
    pub fn new(scenario: Scenario, values: &RatVector) -> Self {
        TensorRecord { scenario, values: rationals(values) }
    }

    /// Parsed values with only the length checked.
    pub fn raw_values(&self) -> Result<RatVector> {
        if self.values.len() != self.scenario.dim() {
            return Err(Error::DimensionMismatch { expected: self.scenario.dim(), found: self.values.len() });
        }
        Ok(RatVector::new(self.values.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?))
    }

    pub fn tensor(&self) -> Result<CorrelationTensor> {
        CorrelationTensor::new(self.scenario, self.raw_values()?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    Infeasible,
}

impl From<bool> for Verdict {
    fn from(feasible: bool) -> Self {
        if feasible {
            Verdict::Feasible
        } else {
            Verdict::Infeasible
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub tensor: Vec<String>,
    pub regime: String,
    pub solver_verdict: Verdict,
    pub catalog_verdict: Verdict,
    pub violated_ids: Vec<usize>,
}

impl From<&Trial> for TrialRecord {
    fn from(t: &Trial) -> Self {
        TrialRecord {
            tensor: rationals(&t.tensor),
            regime: t.regime.name().to_string(),
            solver_verdict: t.solver_feasible.into(),
            catalog_verdict: t.catalog_feasible.into(),
            violated_ids: t.violated_ids.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRecord {
    pub vertex: Vec<i64>,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipRecord {
    pub scenario: Scenario,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<WeightRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_max: Option<i64>,
}

impl MembershipRecord {
    pub fn new(p: &Polytope, result: &FeasibilityResult) -> Result<Self> {
        let mut rec = MembershipRecord {
            scenario: p.scenario(),
            verdict: result.feasible.into(),
            weights: None,
            functional: None,
            value: None,
            vertex_max: None,
        };
        match &result.witness {
            Witness::Mixture(ws) => {
                let weights = ws
                    .iter()
                    .map(|(i, w)| {
                        Ok(WeightRecord { vertex: ints(p.vertices()[*i].tensor(), "vertex entry")?, weight: format_rational(w) })
                    })
                    .collect::<Result<_>>()?;
                rec.weights = Some(weights);
            }
            Witness::Separator { functional, value, vertex_max } => {
                rec.functional = Some(ints(functional, "functional entry")?);
                rec.value = Some(format_rational(value));
                rec.vertex_max = Some(to_i64(vertex_max, "vertex maximum")?);
            }
        }
        Ok(rec)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedRecord {
    pub source: usize,
    pub coefficients: Vec<i64>,
    pub lower: i64,
    pub upper: i64,
    pub description: String,
}

impl LiftedRecord {
    pub fn new(l: &LiftedInequality) -> Result<Self> {
        let (lower, upper) = l.limits();
        Ok(LiftedRecord {
            source: l.source,
            coefficients: ints(&l.coefficients, "coefficient")?,
            lower: to_i64(&lower, "limit")?,
            upper: to_i64(&upper, "limit")?,
            description: l.describe(),
        })
    }
}

/// Value of one catalog entry at a tensor; `violated` is the two-sided
/// test `|c·E| > b` since each entry stands for a face and its antiface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryValue {
    pub id: usize,
    pub value: String,
    pub bound: i64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scenario: Scenario,
    /// Largest `|c·E|` over the catalog.
    pub max_value: String,
    pub max_id: Option<usize>,
    pub violated_ids: Vec<usize>,
    pub values: Vec<EntryValue>,
}

impl EvaluationReport {
    pub fn new(catalog: &[Inequality], e: &CorrelationTensor) -> Result<Self> {
        let mut values = Vec::with_capacity(catalog.len());
        let mut best: Option<(usize, Rational)> = None;
        for (id, iq) in catalog.iter().enumerate() {
            let value = iq.evaluate(e)?.value.abs();
            let violated = value > Rational::from_integer(iq.bound().clone());
            if best.as_ref().is_none_or(|(_, b)| value > *b) {
                best = Some((id, value.clone()));
            }
            values.push(EntryValue { id, value: format_rational(&value), bound: to_i64(iq.bound(), "bound")?, violated });
        }
        Ok(EvaluationReport {
            scenario: e.scenario(),
            max_value: best.as_ref().map(|(_, v)| format_rational(v)).unwrap_or_else(|| "0".into()),
            max_id: best.map(|(i, _)| i),
            violated_ids: values.iter().filter(|v| v.violated).map(|v| v.id).collect(),
            values,
        })
    }

    /// Summary object on the first line, then one entry per line.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Head<'a> {
            scenario: Scenario,
            max_value: &'a str,
            max_id: Option<usize>,
            violated_ids: &'a [usize],
        }
        let mut text = to_json(&Head {
            scenario: self.scenario,
            max_value: &self.max_value,
            max_id: self.max_id,
            violated_ids: &self.violated_ids,
        })?;
        text.pop();
        let rows: Vec<String> = self.values.iter().map(to_json).collect::<Result<_>>()?;
        Ok(format!("{text},\"values\":[\n{}\n]}}\n", rows.join(",\n")))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::Parse(e.to_string()))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// A JSON array with one element per line.
pub fn to_json_lines_array<T: Serialize>(items: &[T]) -> Result<String> {
    if items.is_empty() {
        return Ok("[]\n".into());
    }
    let rows: Vec<String> = items.iter().map(to_json).collect::<Result<_>>()?;
    Ok(format!("[\n{}\n]\n", rows.join(",\n")))
}

/// JSON Lines: one record per line, newline terminated.
pub fn to_json_lines<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&to_json(item)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::{catalog, certify_face};
    use crate::signfn::{Enumeration, SignFunction, SignFunctionRecord};
    use crate::Rational;

    #[test]
    fn scenario_json_shape() {
        let s = Scenario::new(2, 3).unwrap();
        assert_eq!(to_json(&s).unwrap(), r#"{"parties":2,"settings_per_party":3}"#);
        assert!(from_json::<Scenario>(r#"{"parties":2,"settings_per_party":4}"#).is_err());
        assert!(from_json::<Scenario>(r#"{"parties":0,"settings_per_party":3}"#).is_err());
    }

    #[test]
    fn inequality_record_round_trip() {
        let s = Scenario::new(2, 3).unwrap();
        let cat = catalog(s, Enumeration::Exhaustive).unwrap();
        for iq in &cat {
            let rec = InequalityRecord::from_certificate(&certify_face(iq).unwrap()).unwrap();
            assert!(rec.tight);
            assert_eq!(rec.saturating_count, 16);
            let text = to_json(&rec).unwrap();
            let back: InequalityRecord = from_json(&text).unwrap();
            assert_eq!(back, rec);
            assert_eq!(&back.inequality().unwrap(), iq);
        }
        let text = to_json_lines_array(&cat.iter().map(|iq| to_json(iq.coefficients().to_i64s().as_ref().unwrap()).unwrap()).collect::<Vec<_>>()).unwrap();
        assert_eq!(text.lines().count(), cat.len() + 2);
    }

    #[test]
    fn tensor_record_parses_and_checks_range() {
        let s = Scenario::new(2, 2).unwrap();
        let rec: TensorRecord = from_json(r#"{"scenario":{"parties":2,"settings_per_party":2},"values":["7/10","-1","0","1/3"]}"#).unwrap();
        let t = rec.tensor().unwrap();
        assert_eq!(t.values()[0], Rational::new(7.into(), 10.into()));
        assert_eq!(TensorRecord::new(s, t.values()), rec);
        let wide = TensorRecord { scenario: s, values: vec!["11/10".into(), "0".into(), "0".into(), "0".into()] };
        assert!(wide.raw_values().is_ok());
        assert!(wide.tensor().is_err());
        let short = TensorRecord { scenario: s, values: vec!["0".into()] };
        assert!(short.raw_values().is_err());
        let junk = TensorRecord { scenario: s, values: vec!["x".into(), "0".into(), "0".into(), "0".into()] };
        assert!(junk.raw_values().is_err());
    }

    #[test]
    fn sign_function_json_shape() {
        let s = Scenario::new(2, 3).unwrap();
        let sf = SignFunction::constant(s, 1).unwrap();
        let text = to_json(&SignFunctionRecord::from(&sf)).unwrap();
        assert!(text.starts_with(r#"{"parties":2,"table":[1,1,"#));
        let back: SignFunctionRecord = from_json(&text).unwrap();
        assert_eq!(SignFunction::try_from(back).unwrap(), sf);
    }

    #[test]
    fn vertex_catalog_lines() {
        let p = Polytope::new(Scenario::new(2, 3).unwrap()).unwrap();
        let cat = VertexCatalog::from_polytope(&p).unwrap();
        let text = cat.to_json().unwrap();
        assert_eq!(text.lines().count(), 34);
        let back: VertexCatalog = from_json(&text).unwrap();
        assert_eq!(back, cat);
    }

    #[test]
    fn evaluation_report_flags_chsh() {
        let s = Scenario::new(2, 3).unwrap();
        let cat = catalog(s, Enumeration::Exhaustive).unwrap();
        let seven = Rational::new(7.into(), 10.into());
        let zero = Rational::from_integer(0.into());
        let mut vals = vec![zero; 9];
        vals[0] = seven.clone();
        vals[1] = seven.clone();
        vals[3] = seven.clone();
        vals[4] = -seven;
        let e = CorrelationTensor::new(s, RatVector::new(vals)).unwrap();
        let report = EvaluationReport::new(&cat, &e).unwrap();
        assert_eq!(report.max_value, "14/5");
        assert_eq!(report.violated_ids.len(), 1);
        let chsh = &cat[report.violated_ids[0]];
        assert_eq!(chsh.coefficients().to_i64s().unwrap(), vec![1, 1, 0, 1, -1, 0, 0, 0, 0]);
        let text = report.to_json().unwrap();
        assert!(text.starts_with(r#"{"scenario":{"parties":2,"settings_per_party":3},"max_value":"14/5""#));
        assert_eq!(from_json::<EvaluationReport>(&text).unwrap(), report);
        let zero_report = EvaluationReport::new(&cat, &CorrelationTensor::zero(s)).unwrap();
        assert!(zero_report.violated_ids.is_empty());
        assert_eq!(zero_report.max_value, "0");
    }

    #[test]
    fn verdict_spelling() {
        assert_eq!(to_json(&Verdict::from(false)).unwrap(), "\"infeasible\"");
    }
}
