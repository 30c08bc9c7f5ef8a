//! The correlation polytope of an N-party dichotomic Bell scenario.
//!
//! A vertex is the tensor product of one deterministic local order per party,
//! flattened row-major with party 1 as the slowest index. For two parties and
//! orders `(x,y,z)` and `(w,v,t)` this gives `(xw,xv,xt,yw,yv,yt,zw,zv,zt)`,
//! the same slot order as `(E00,E01,E02,E10,…,E22)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{IntVector, RatVector, Rational};

/// Largest party count for which the vertex set is materialised.
pub const MAX_ENUMERATED_PARTIES: usize = 4;

/// Number of parties and local settings per party.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawScenario")]
pub struct Scenario {
    parties: usize,
    settings_per_party: usize,
}

#[derive(Deserialize)]
struct RawScenario {
    parties: usize,
    settings_per_party: usize,
}

impl TryFrom<RawScenario> for Scenario {
    type Error = Error;
    fn try_from(raw: RawScenario) -> Result<Self> {
        Scenario::new(raw.parties, raw.settings_per_party)
    }
}

impl Scenario {
    pub fn new(parties: usize, settings_per_party: usize) -> Result<Self> {
        if parties == 0 {
            return Err(Error::InvalidScenario("at least one party is required".into()));
        }
        if !(2..=3).contains(&settings_per_party) {
            return Err(Error::InvalidScenario(format!(
                "settings per party must be 2 or 3, got {settings_per_party}"
            )));
        }
        Ok(Scenario { parties, settings_per_party })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn settings_per_party(&self) -> usize {
        self.settings_per_party
    }

    /// Dimension of correlation space, `settings^parties`.
    pub fn dim(&self) -> usize {
        self.settings_per_party.pow(self.parties as u32)
    }

    /// Index variables contributed by each party to a sign function.
    pub fn vars_per_party(&self) -> usize {
        self.settings_per_party - 1
    }

    pub fn index_vars(&self) -> usize {
        self.parties * self.vars_per_party()
    }

    /// Closed-form vertex count `2^(N·s − (N−1))`.
    pub fn vertex_count(&self) -> usize {
        1usize << (self.parties * self.settings_per_party - (self.parties - 1))
    }

    /// Decomposes a slot index into one setting per party.
    pub fn slot_settings(&self, mut slot: usize) -> Vec<usize> {
        let mut out = vec![0; self.parties];
        for p in (0..self.parties).rev() {
            out[p] = slot % self.settings_per_party;
            slot /= self.settings_per_party;
        }
        out
    }

    pub fn slot_index(&self, settings: &[usize]) -> usize {
        settings.iter().fold(0, |acc, &s| acc * self.settings_per_party + s)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-party/{}-setting", self.parties, self.settings_per_party)
    }
}

/// Deterministic outcomes `(m⁰, m¹, …)` for every setting of one party.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalOrder {
    outcomes: Vec<i8>,
}

impl LocalOrder {
    pub fn new(outcomes: Vec<i8>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.iter().any(|&m| m != 1 && m != -1) {
            return Err(Error::InvalidOrder(format!("outcomes must be ±1, got {outcomes:?}")));
        }
        Ok(LocalOrder { outcomes })
    }

    /// The order whose bits (most significant first) mark the `−1` outcomes.
    pub fn from_bits(settings: usize, bits: usize) -> Self {
        let outcomes = (0..settings)
            .map(|k| if bits >> (settings - 1 - k) & 1 == 1 { -1 } else { 1 })
            .collect();
        LocalOrder { outcomes }
    }

    pub fn outcomes(&self) -> &[i8] {
        &self.outcomes
    }

    pub fn negated(&self) -> Self {
        LocalOrder { outcomes: self.outcomes.iter().map(|m| -m).collect() }
    }
}

/// A vertex of the correlation polytope.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    tensor: IntVector,
    local_orders: Vec<LocalOrder>,
    canonical_sign: i8,
}

impl Vertex {
    pub fn tensor(&self) -> &IntVector {
        &self.tensor
    }

    pub fn local_orders(&self) -> &[LocalOrder] {
        &self.local_orders
    }

    /// Sign of the first nonzero tensor entry.
    pub fn canonical_sign(&self) -> i8 {
        self.canonical_sign
    }

    /// The twin vertex `−v`, generated by negating the last party's order.
    pub fn negated(&self) -> Vertex {
        let mut local_orders = self.local_orders.clone();
        if let Some(last) = local_orders.last_mut() {
            *last = last.negated();
        }
        Vertex { tensor: -&self.tensor, local_orders, canonical_sign: -self.canonical_sign }
    }
}

fn outer_product(orders: &[&[i8]]) -> Vec<i8> {
    orders.iter().fold(vec![1i8], |acc, order| {
        acc.iter().flat_map(|&x| order.iter().map(move |&m| x * m)).collect()
    })
}

fn signs_to_vector(signs: &[i8]) -> IntVector {
    IntVector::from_i64s(signs.iter().map(|&s| i64::from(s)))
}

/// Builds the vertex generated by one local order per party.
pub fn vertex_from_assignment(s: Scenario, orders: &[LocalOrder]) -> Result<Vertex> {
    if orders.len() != s.parties() {
        return Err(Error::WrongPartyCount { expected: s.parties(), found: orders.len() });
    }
    for o in orders {
        if o.outcomes.len() != s.settings_per_party() {
            return Err(Error::InvalidOrder(format!(
                "expected {} outcomes per order, got {}",
                s.settings_per_party(),
                o.outcomes.len()
            )));
        }
    }
    let slices: Vec<&[i8]> = orders.iter().map(|o| o.outcomes()).collect();
    let signs = outer_product(&slices);
    let canonical_sign = signs.iter().copied().find(|&x| x != 0).unwrap_or(1);
    Ok(Vertex { tensor: signs_to_vector(&signs), local_orders: orders.to_vec(), canonical_sign })
}

/// Sort key putting `+1` before `−1` in each coordinate.
fn sign_key(signs: &[i8]) -> Vec<u8> {
    signs.iter().map(|&x| u8::from(x < 0)).collect()
}

/// All distinct vertices, ordered lexicographically by tensor with `+1 < −1`.
///
/// Every joint assignment is generated and duplicates are dropped exactly; the
/// retained local orders are those of the first assignment producing the
/// tensor, which has every party but the last starting with `+1`.
pub fn enumerate_vertices(s: Scenario) -> Result<Vec<Vertex>> {
    if s.parties() > MAX_ENUMERATED_PARTIES {
        return Err(Error::UnsupportedScale(format!(
            "vertex enumeration supports at most {MAX_ENUMERATED_PARTIES} parties"
        )));
    }
    let m = s.settings_per_party();
    let total_bits = s.parties() * m;
    let mut seen: BTreeMap<Vec<u8>, Vertex> = BTreeMap::new();
    for joint in 0..1usize << total_bits {
        let orders: Vec<LocalOrder> = (0..s.parties())
            .map(|p| LocalOrder::from_bits(m, joint >> ((s.parties() - 1 - p) * m) & ((1 << m) - 1)))
            .collect();
        let slices: Vec<&[i8]> = orders.iter().map(|o| o.outcomes()).collect();
        let signs = outer_product(&slices);
        let key = sign_key(&signs);
        if seen.contains_key(&key) {
            continue;
        }
        let canonical_sign = signs[0];
        seen.insert(key, Vertex { tensor: signs_to_vector(&signs), local_orders: orders, canonical_sign });
    }
    Ok(seen.into_values().collect())
}

/// The product vertex `v_x = ⊗_p (1, x_p…)` for an index tuple of `±1`s,
/// `vars_per_party` entries per party.
pub fn product_vertex(s: Scenario, index: &[i8]) -> Result<IntVector> {
    Ok(signs_to_vector(&product_vertex_signs(s, index)?))
}

pub(crate) fn product_vertex_signs(s: Scenario, index: &[i8]) -> Result<Vec<i8>> {
    let k = s.vars_per_party();
    if index.len() != s.index_vars() {
        return Err(Error::DimensionMismatch { expected: s.index_vars(), found: index.len() });
    }
    let locals: Vec<Vec<i8>> = index
        .chunks(k)
        .map(|vars| std::iter::once(1).chain(vars.iter().copied()).collect())
        .collect();
    let slices: Vec<&[i8]> = locals.iter().map(Vec::as_slice).collect();
    Ok(outer_product(&slices))
}

/// A scenario together with its (cached) vertex set.
#[derive(Clone, Debug)]
pub struct Polytope {
    scenario: Scenario,
    vertices: Vec<Vertex>,
}

impl Polytope {
    pub fn new(scenario: Scenario) -> Result<Self> {
        Ok(Polytope { scenario, vertices: enumerate_vertices(scenario)? })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn dim(&self) -> usize {
        self.scenario.dim()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn tensors(&self) -> Vec<IntVector> {
        self.vertices.iter().map(|v| v.tensor.clone()).collect()
    }

    /// Position of a tensor in the vertex list.
    pub fn index_of(&self, tensor: &IntVector) -> Option<usize> {
        self.vertices.iter().position(|v| &v.tensor == tensor)
    }

    /// `max_v c·v` over all vertices.
    pub fn max_functional(&self, coefficients: &IntVector) -> Result<BigInt> {
        let mut best: Option<BigInt> = None;
        for v in &self.vertices {
            let val = coefficients.dot(&v.tensor)?;
            if best.as_ref().is_none_or(|b| val > *b) {
                best = Some(val);
            }
        }
        Ok(best.unwrap_or_default())
    }
}

/// Rational correlation data `E`, indexed like vertex tensors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationTensor {
    scenario: Scenario,
    values: RatVector,
}

impl CorrelationTensor {
    pub fn new(scenario: Scenario, values: RatVector) -> Result<Self> {
        if values.dim() != scenario.dim() {
            return Err(Error::DimensionMismatch { expected: scenario.dim(), found: values.dim() });
        }
        let one = Rational::one();
        for (slot, v) in values.entries().iter().enumerate() {
            if v.abs() > one {
                return Err(Error::OutOfRange { slot, value: crate::linalg::format_rational(v) });
            }
        }
        Ok(CorrelationTensor { scenario, values })
    }

    pub fn from_vertex(scenario: Scenario, v: &Vertex) -> Result<Self> {
        CorrelationTensor::new(scenario, v.tensor.to_rational())
    }

    pub fn zero(scenario: Scenario) -> Self {
        CorrelationTensor { scenario, values: RatVector::zeros(scenario.dim()) }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn values(&self) -> &RatVector {
        &self.values
    }
}

/// Convex combination `Σ P(v)·v` of weighted vertices.
pub fn mixture(s: Scenario, weights: &[(&Vertex, Rational)]) -> Result<CorrelationTensor> {
    let mut total = Rational::zero();
    let mut acc = RatVector::zeros(s.dim());
    for (v, w) in weights {
        if w.is_negative() {
            return Err(Error::InvalidWeights(format!("negative weight {w}")));
        }
        if v.tensor.dim() != s.dim() {
            return Err(Error::DimensionMismatch { expected: s.dim(), found: v.tensor.dim() });
        }
        total += w;
        acc = acc.add(&v.tensor.to_rational().scale(w))?;
    }
    if !total.is_one() {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
    }
    CorrelationTensor::new(s, acc)
}
