//! Bell inequalities: construction from sign functions and vertex bases,
//! validity and tightness certificates, the two-setting reduction and the
//! CH-type lift.
//!
//! An [`Inequality`] `c·E ≤ b` is kept in canonical form: the coefficients
//! and bound share no common factor and the first nonzero coefficient is
//! positive. The vertex set is symmetric under `v ↦ −v`, so `c·E ≤ b` and
//! `−c·E ≤ b` are valid together; one canonical record stands for the pair
//! (face and antiface), i.e. for `|c·E| ≤ b`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{affine_rank, bordered_cofactors, gcd_all, IntVector, RatVector, Rational};
use crate::polytope::{product_vertex_signs, CorrelationTensor, Polytope, Scenario, Vertex};
use crate::signfn::{self, index_tuple, is_admissible, Enumeration, SignFunction};

/// Largest number of vertex subsets scanned by [`hyperplane_facets`].
pub const MAX_HYPERPLANE_SUBSETS: u64 = 2_000_000;

/// `c·E ≤ bound` over correlation space, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    scenario: Scenario,
    coefficients: IntVector,
    bound: BigInt,
    provenance: String,
}

impl Inequality {
    /// Canonicalises `c·E ≤ bound`.
    pub fn new(scenario: Scenario, coefficients: IntVector, bound: BigInt, provenance: impl Into<String>) -> Result<Self> {
        if coefficients.dim() != scenario.dim() {
            return Err(Error::DimensionMismatch { expected: scenario.dim(), found: coefficients.dim() });
        }
        let (coefficients, bound, _) = canonicalize(coefficients, bound);
        Ok(Inequality { scenario, coefficients, bound, provenance: provenance.into() })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn coefficients(&self) -> &IntVector {
        &self.coefficients
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// `c·E`, and whether it exceeds the bound.
    pub fn evaluate(&self, e: &CorrelationTensor) -> Result<Evaluation> {
        if e.scenario() != self.scenario {
            return Err(Error::DimensionMismatch { expected: self.scenario.dim(), found: e.scenario().dim() });
        }
        let value = self.coefficients.dot_rational(e.values())?;
        let violated = value > Rational::from_integer(self.bound.clone());
        Ok(Evaluation { value, violated })
    }

    /// Two-sided test `|c·x| ≤ b` on raw values.
    pub fn admits(&self, values: &RatVector) -> Result<bool> {
        let value = self.coefficients.dot_rational(values)?;
        Ok(value.abs() <= Rational::from_integer(self.bound.clone()))
    }

    fn sort_key(&self) -> (Scenario, BigInt, std::cmp::Reverse<IntVector>) {
        (self.scenario, self.bound.clone(), std::cmp::Reverse(self.coefficients.clone()))
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut body = String::new();
        for (slot, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let label: String = self.scenario.slot_settings(slot).iter().map(|s| s.to_string()).collect();
            let mag = c.abs();
            let mag = if mag.is_one() { String::new() } else { mag.to_string() };
            let sign = match (body.is_empty(), c.is_negative()) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            body.push_str(&format!("{sign}{mag}E{label}"));
        }
        if body.is_empty() {
            body.push('0');
        }
        write!(f, "{body} <= {}", self.bound)
    }
}

/// Value of an inequality's functional at a correlation tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub value: Rational,
    pub violated: bool,
}

/// Divides out the common factor and makes the first nonzero coefficient
/// positive. The flag reports whether the functional was negated.
fn canonicalize(coefficients: IntVector, bound: BigInt) -> (IntVector, BigInt, bool) {
    let g = gcd_all(coefficients.iter().chain(std::iter::once(&bound)));
    let (mut coeffs, bound) = if g.is_zero() || g.is_one() {
        (coefficients.into_entries(), bound)
    } else {
        (coefficients.into_entries().into_iter().map(|c| c / &g).collect(), bound / &g)
    };
    let flip = coeffs.iter().find(|c| !c.is_zero()).is_some_and(Signed::is_negative);
    if flip {
        for c in coeffs.iter_mut() {
            *c = -&*c;
        }
    }
    (IntVector::new(coeffs), bound, flip)
}

/// Raw functional `T = Σ_x S(x)·v_x` (bound `2^n`) of a sign function.
pub fn raw_functional(sf: &SignFunction) -> Result<(IntVector, BigInt)> {
    let s = sf.scenario();
    let n = sf.vars();
    let mut acc = vec![0i64; s.dim()];
    for (pos, &sign) in sf.table().iter().enumerate() {
        let v = product_vertex_signs(s, &index_tuple(n, pos))?;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += i64::from(sign) * i64::from(x);
        }
    }
    Ok((IntVector::from_i64s(acc), BigInt::one() << n))
}

/// Tight inequality whose face is `{S(x)·v_x}`, with raw bound `2^n`
/// reduced to canonical form.
pub fn from_sign_function(sf: &SignFunction) -> Result<Inequality> {
    if !is_admissible(sf) {
        return Err(Error::NotAdmissible);
    }
    let (raw, bound) = raw_functional(sf)?;
    let (coefficients, bound, flipped) = canonicalize(raw, bound);
    let face = if flipped { sf.negate() } else { sf.clone() };
    let provenance = format!("sign:{}|anti:{}", face.id(), face.negate().id());
    Ok(Inequality { scenario: sf.scenario(), coefficients, bound, provenance })
}

fn tensor_id(t: &IntVector) -> String {
    let bits: Vec<u8> = t.iter().map(|x| u8::from(x.is_negative())).collect();
    bits.chunks(4)
        .map(|c| {
            let nibble = c.iter().fold(0u8, |acc, &b| acc << 1 | b) << (4 - c.len());
            char::from_digit(u32::from(nibble), 16).unwrap()
        })
        .collect()
}

/// Inequality `D[E, v₁…v_d] ≥ 0` through `d` linearly independent vertices.
///
/// With the basis ordered so that `det(v) > 0`, expanding the bordered
/// determinant along its first row gives `det(v) + Σ_j C_j E_j ≥ 0`, i.e.
/// `Σ_j (−C_j) E_j ≤ det(v)`.
pub fn from_vertex_basis(s: Scenario, basis: &[IntVector]) -> Result<Inequality> {
    if basis.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: basis.len() });
    }
    let mut cof = bordered_cofactors(basis)?;
    if cof[0].is_zero() {
        return Err(Error::LinearlyDependent { rank: crate::linalg::rank(basis), needed: s.dim() });
    }
    if cof[0].is_negative() {
        // Same as swapping two basis rows.
        for c in cof.iter_mut() {
            *c = -&*c;
        }
    }
    let bound = cof[0].clone();
    let coefficients = IntVector::new(cof[1..].iter().map(|c| -c).collect());
    let ids: Vec<String> = basis.iter().map(tensor_id).collect();
    Inequality::new(s, coefficients, bound, format!("basis:{}", ids.join(",")))
}

/// `max_v c·v` over all vertices of the scenario's polytope.
pub fn classical_bound(coefficients: &IntVector, s: Scenario) -> Result<BigInt> {
    Polytope::new(s)?.max_functional(coefficients)
}

/// Saturating vertices of a valid inequality and their affine rank.
#[derive(Clone, Debug)]
pub struct FaceCertificate {
    pub inequality: Inequality,
    pub saturating_vertices: Vec<Vertex>,
    pub affine_rank: usize,
}

impl FaceCertificate {
    /// Facet-defining: the saturating set spans a hyperplane.
    pub fn is_tight(&self) -> bool {
        self.affine_rank == self.inequality.scenario().dim()
    }

    pub fn saturating_count(&self) -> usize {
        self.saturating_vertices.len()
    }
}

pub fn certify_face(iq: &Inequality) -> Result<FaceCertificate> {
    certify_face_in(&Polytope::new(iq.scenario())?, iq)
}

/// Like [`certify_face`], reusing an enumerated polytope.
pub fn certify_face_in(polytope: &Polytope, iq: &Inequality) -> Result<FaceCertificate> {
    if polytope.scenario() != iq.scenario() {
        return Err(Error::DimensionMismatch { expected: polytope.dim(), found: iq.scenario().dim() });
    }
    let classical = polytope.max_functional(iq.coefficients())?;
    if &classical != iq.bound() {
        return Err(Error::Validity { bound: iq.bound().to_string(), classical: classical.to_string() });
    }
    let saturating_vertices: Vec<Vertex> = polytope
        .vertices()
        .iter()
        .filter(|v| iq.coefficients().dot(v.tensor()).is_ok_and(|x| &x == iq.bound()))
        .cloned()
        .collect();
    let tensors: Vec<IntVector> = saturating_vertices.iter().map(|v| v.tensor().clone()).collect();
    let affine_rank = affine_rank(&tensors)?;
    Ok(FaceCertificate { inequality: iq.clone(), saturating_vertices, affine_rank })
}

/// Canonical forms with duplicates removed, ordered by bound and then by
/// coefficients (descending). The first provenance seen is kept.
pub fn dedup(iqs: impl IntoIterator<Item = Inequality>) -> Vec<Inequality> {
    let mut seen: BTreeMap<_, Inequality> = BTreeMap::new();
    for iq in iqs {
        let iq = Inequality::new(iq.scenario, iq.coefficients, iq.bound, iq.provenance)
            .expect("dimension already validated");
        seen.entry(iq.sort_key()).or_insert(iq);
    }
    seen.into_values().collect()
}

/// The inequality catalog: every admissible sign function, built and deduplicated.
pub fn catalog(s: Scenario, mode: Enumeration) -> Result<Vec<Inequality>> {
    let sfs = signfn::enumerate_admissible(s, mode)?;
    let built: Result<Vec<Inequality>> = sfs.par_iter().map(from_sign_function).collect();
    Ok(dedup(built?))
}

/// Result of restricting a one-index-per-party sign function to two settings.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// Inequality in the two-setting scenario.
    pub inequality: Inequality,
    /// For each party, the three-setting index kept as two-setting index 1.
    pub kept_settings: Vec<usize>,
}

/// Two-setting inequality from a sign function that uses at most one index
/// variable per party. Its coefficients live on the sub-block
/// `{0, kept}` of every party, which is relabelled as `{0, 1}`.
pub fn reduce_two_settings(sf: &SignFunction) -> Result<Reduction> {
    let s = sf.scenario();
    if s.settings_per_party() == 2 {
        let inequality = from_sign_function(sf)?;
        return Ok(Reduction { inequality, kept_settings: vec![1; s.parties()] });
    }
    let support = signfn::fourier(sf).support();
    let n = sf.vars();
    let mut kept = Vec::with_capacity(s.parties());
    for p in 0..s.parties() {
        let b1 = 1usize << (n - 1 - 2 * p);
        let b2 = b1 >> 1;
        let uses1 = support.iter().any(|m| m & b1 != 0);
        let uses2 = support.iter().any(|m| m & b2 != 0);
        kept.push(match (uses1, uses2) {
            (true, true) => {
                return Err(Error::Reduction(format!("{sf} depends on both index variables of party {}", p + 1)))
            }
            (false, true) => 2,
            _ => 1,
        });
    }
    let full = from_sign_function(sf)?;
    let target = Scenario::new(s.parties(), 2)?;
    let mut projected = vec![BigInt::zero(); target.dim()];
    let mut covered = vec![false; s.dim()];
    for (slot, value) in projected.iter_mut().enumerate() {
        let settings: Vec<usize> =
            target.slot_settings(slot).iter().zip(&kept).map(|(&t, &k)| if t == 0 { 0 } else { k }).collect();
        let src = s.slot_index(&settings);
        covered[src] = true;
        *value = full.coefficients()[src].clone();
    }
    if let Some(slot) = (0..s.dim()).find(|&i| !covered[i] && !full.coefficients()[i].is_zero()) {
        return Err(Error::Reduction(format!("coefficient outside the kept sub-block at slot {slot}")));
    }
    let label: String = kept.iter().map(|k| k.to_string()).collect();
    let inequality = Inequality::new(target, IntVector::new(projected), full.bound().clone(), format!("reduced:{}@{label}", sf.id()))?;
    Ok(Reduction { inequality, kept_settings: kept })
}

/// Labels of the two-party slots under the lift: slot `(0,0)` is the
/// normalisation, `(i,0)` and `(0,j)` are marginals, the rest correlations.
pub fn lifted_slot_labels() -> Vec<String> {
    let mut out = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            out.push(match (i, j) {
                (0, 0) => "1".to_string(),
                (i, 0) => format!("A{i}"),
                (0, j) => format!("B{j}"),
                (i, j) => format!("A{i}B{j}"),
            });
        }
    }
    out
}

/// The 16 lifted vertices `(1,m¹,m²)⊗(1,n¹,n²)`.
pub fn lifted_vertices() -> Vec<IntVector> {
    let s = Scenario::new(2, 3).expect("valid scenario");
    (0..16)
        .map(|i| IntVector::from_i64s(product_vertex_signs(s, &index_tuple(4, i)).unwrap().into_iter().map(i64::from)))
        .collect()
}

/// A two-setting full-data constraint `−b ≤ c·W ≤ b` in lifted coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedInequality {
    /// Position of the source inequality in the catalog.
    pub source: usize,
    pub coefficients: IntVector,
    pub bound: BigInt,
}

impl LiftedInequality {
    /// Bounds on the non-constant part after moving the normalisation
    /// term across: `lower ≤ Σ_{slot≠0} c·W ≤ upper`.
    pub fn limits(&self) -> (BigInt, BigInt) {
        let c0 = &self.coefficients[0];
        (-&self.bound - c0, &self.bound - c0)
    }

    pub fn holds(&self, w: &RatVector) -> Result<bool> {
        let value = self.coefficients.dot_rational(w)?;
        Ok(value.abs() <= Rational::from_integer(self.bound.clone()))
    }

    /// Human-readable form such as `-1 <= A1 + B1 - A1B1 <= 1`.
    pub fn describe(&self) -> String {
        let labels = lifted_slot_labels();
        let (lo, hi) = self.limits();
        let mut body = String::new();
        for (slot, c) in self.coefficients.iter().enumerate().skip(1) {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let mag = if mag.is_one() { String::new() } else { format!("{mag}*") };
            if body.is_empty() {
                body.push_str(if c.is_negative() { "-" } else { "" });
            } else {
                body.push_str(if c.is_negative() { " - " } else { " + " });
            }
            body.push_str(&mag);
            body.push_str(&labels[slot]);
        }
        if body.is_empty() {
            body.push('0');
        }
        format!("{lo} <= {body} <= {hi}")
    }
}

/// Catalog reinterpreted over the lifted vertices.
#[derive(Clone, Debug)]
pub struct ChLift {
    pub slot_labels: Vec<String>,
    pub vertices: Vec<IntVector>,
    pub inequalities: Vec<LiftedInequality>,
}

/// Relabels every two-party, three-setting inequality as a constraint on
/// normalisation, marginals and two-setting correlations.
pub fn ch_lift(s: Scenario, catalog: &[Inequality]) -> Result<ChLift> {
    if s != Scenario::new(2, 3)? {
        return Err(Error::InvalidScenario(format!("the CH lift is defined for 2 parties with 3 settings, got {s}")));
    }
    let mut inequalities = Vec::with_capacity(catalog.len());
    for (source, iq) in catalog.iter().enumerate() {
        if iq.scenario() != s {
            return Err(Error::Catalog(format!("entry {source} belongs to {}", iq.scenario())));
        }
        inequalities.push(LiftedInequality {
            source,
            coefficients: iq.coefficients().clone(),
            bound: iq.bound().clone(),
        });
    }
    Ok(ChLift { slot_labels: lifted_slot_labels(), vertices: lifted_vertices(), inequalities })
}

/// Brute-force facet list: every `d`-subset of vertices spanning a
/// hyperplane with all remaining vertices on one side.
pub fn hyperplane_facets(polytope: &Polytope) -> Result<Vec<Inequality>> {
    let d = polytope.dim();
    let tensors = polytope.tensors();
    let n = tensors.len();
    if binomial(n as u64, d as u64) > MAX_HYPERPLANE_SUBSETS {
        return Err(Error::UnsupportedScale(format!(
            "hyperplane enumeration over C({n},{d}) subsets is too large"
        )));
    }
    let mut found = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let basis: Vec<IntVector> = idx.iter().map(|&i| tensors[i].clone()).collect();
        let cof = bordered_cofactors(&basis)?;
        if !cof[0].is_zero() {
            let sign = if cof[0].is_negative() { -BigInt::one() } else { BigInt::one() };
            let side = |t: &IntVector| -> BigInt {
                let lin: BigInt = cof[1..].iter().zip(t.iter()).map(|(c, x)| c * x).sum();
                (&cof[0] + lin) * &sign
            };
            if tensors.iter().all(|t| !side(t).is_negative()) {
                found.push(from_vertex_basis(polytope.scenario(), &basis)?);
            }
        }
        // Next combination in lexicographic order.
        let Some(i) = (0..d).rev().find(|&i| idx[i] < n - d + i) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(dedup(found))
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det;
    use crate::signfn::{enumerate_admissible, Enumeration};

    fn s23() -> Scenario {
        Scenario::new(2, 3).unwrap()
    }

    fn iv(xs: &[i64]) -> IntVector {
        IntVector::from_i64s(xs.iter().copied())
    }

    fn chsh_sign() -> SignFunction {
        SignFunction::from_fn(s23(), |x| (1 + x[0] + x[2] - x[0] * x[2]) / 2).unwrap()
    }

    fn chsh() -> IntVector {
        iv(&[1, 1, 0, 1, -1, 0, 0, 0, 0])
    }

    fn unit(slot: usize) -> IntVector {
        IntVector::from_i64s((0..9).map(|i| i64::from(i == slot)))
    }

    #[test]
    fn sign_function_examples() {
        let one = SignFunction::constant(s23(), 1).unwrap();
        let (raw, bound) = raw_functional(&one).unwrap();
        assert_eq!(raw, iv(&[16, 0, 0, 0, 0, 0, 0, 0, 0]));
        assert_eq!(bound, BigInt::from(16));
        let iq = from_sign_function(&one).unwrap();
        assert_eq!((iq.coefficients(), iq.bound()), (&unit(0), &BigInt::one()));

        let (raw, _) = raw_functional(&chsh_sign()).unwrap();
        assert_eq!(raw, iv(&[8, 8, 0, 8, -8, 0, 0, 0, 0]));
        let iq = from_sign_function(&chsh_sign()).unwrap();
        assert_eq!((iq.coefficients(), iq.bound()), (&chsh(), &BigInt::from(2)));

        let ac = SignFunction::from_fn(s23(), |x| x[0] * x[2]).unwrap();
        assert_eq!(raw_functional(&ac).unwrap().0, iv(&[0, 0, 0, 0, 16, 0, 0, 0, 0]));
        let iq = from_sign_function(&ac).unwrap();
        assert_eq!((iq.coefficients(), iq.bound()), (&unit(4), &BigInt::one()));
    }

    #[test]
    fn sign_function_rejects_inadmissible() {
        let ab = SignFunction::from_fn(s23(), |x| x[0] * x[1]).unwrap();
        assert_eq!(from_sign_function(&ab), Err(Error::NotAdmissible));
    }

    #[test]
    fn sign_pair_collapses() {
        let a = from_sign_function(&chsh_sign()).unwrap();
        let b = from_sign_function(&chsh_sign().negate()).unwrap();
        assert_eq!(a, b);
        assert_eq!(dedup([a.clone(), b, a.clone()]).len(), 1);
    }

    #[test]
    fn dedup_orders_and_merges() {
        let e00 = Inequality::new(s23(), unit(0), BigInt::one(), "x").unwrap();
        let e11 = Inequality::new(s23(), unit(4), BigInt::one(), "y").unwrap();
        let c = Inequality::new(s23(), chsh(), BigInt::from(2), "z").unwrap();
        let out = dedup([c.clone(), e11.clone(), e00.clone()]);
        assert_eq!(out, vec![e00.clone(), e11.clone(), c.clone()]);
        let neg = Inequality::new(s23(), -&unit(0), BigInt::one(), "w").unwrap();
        assert_eq!(dedup([e00.clone(), neg]).len(), 1);
    }

    #[test]
    fn canonical_form_divides_and_normalises_sign() {
        let iq = Inequality::new(s23(), iv(&[-8, -8, 0, -8, 8, 0, 0, 0, 0]), BigInt::from(16), "").unwrap();
        assert_eq!(iq.coefficients(), &chsh());
        assert_eq!(iq.bound(), &BigInt::from(2));
    }

    #[test]
    fn classical_bound_examples() {
        let (raw, _) = raw_functional(&SignFunction::constant(s23(), 1).unwrap()).unwrap();
        assert_eq!(classical_bound(&raw, s23()).unwrap(), BigInt::from(16));
        assert_eq!(classical_bound(&chsh(), s23()).unwrap(), BigInt::from(2));
        assert_eq!(classical_bound(&IntVector::zeros(9), s23()).unwrap(), BigInt::zero());
    }

    #[test]
    fn certify_examples() {
        for iq in [
            Inequality::new(s23(), chsh(), 2.into(), "").unwrap(),
            Inequality::new(s23(), unit(0), 1.into(), "").unwrap(),
        ] {
            let cert = certify_face(&iq).unwrap();
            assert_eq!(cert.saturating_count(), 16);
            assert_eq!(cert.affine_rank, 9);
            assert!(cert.is_tight());
        }
        let bad = Inequality::new(s23(), iv(&[1, 0, 0, 0, 1, 0, 0, 0, 0]), 1.into(), "").unwrap();
        assert!(matches!(certify_face(&bad), Err(Error::Validity { .. })));
    }

    #[test]
    fn evaluate_examples() {
        let p = Polytope::new(s23()).unwrap();
        let iq = from_sign_function(&chsh_sign()).unwrap();
        let cert = certify_face_in(&p, &iq).unwrap();
        for v in &cert.saturating_vertices {
            let e = CorrelationTensor::from_vertex(s23(), v).unwrap();
            let ev = iq.evaluate(&e).unwrap();
            assert_eq!(ev.value, Rational::from_integer(2.into()));
            assert!(!ev.violated);
            let e = CorrelationTensor::from_vertex(s23(), &v.negated()).unwrap();
            assert_eq!(iq.evaluate(&e).unwrap().value, Rational::from_integer((-2).into()));
        }
        let seven = Rational::new(7.into(), 10.into());
        let mut vals = vec![Rational::zero(); 9];
        vals[0] = seven.clone();
        vals[1] = seven.clone();
        vals[3] = seven.clone();
        vals[4] = -seven;
        let e = CorrelationTensor::new(s23(), RatVector::new(vals)).unwrap();
        let ev = iq.evaluate(&e).unwrap();
        assert_eq!(ev.value, Rational::new(28.into(), 10.into()));
        assert!(ev.violated);
        let e22 = CorrelationTensor::zero(Scenario::new(2, 2).unwrap());
        assert!(iq.evaluate(&e22).is_err());
    }

    #[test]
    fn vertex_basis_matches_sign_function() {
        let s = s23();
        let one = SignFunction::constant(s, 1).unwrap();
        let expected = from_sign_function(&one).unwrap();
        let mut basis = Vec::new();
        for pos in 0..16 {
            let x = index_tuple(4, pos);
            if (x[0], x[1]) == (1, 1) || (x[2], x[3]) == (1, 1) {
                continue;
            }
            basis.push(crate::polytope::product_vertex(s, &x).unwrap());
        }
        let got = from_vertex_basis(s, &basis).unwrap();
        assert_eq!((got.coefficients(), got.bound()), (expected.coefficients(), expected.bound()));
        basis.swap(0, 3);
        let swapped = from_vertex_basis(s, &basis).unwrap();
        assert_eq!(swapped.coefficients(), got.coefficients());
    }

    #[test]
    fn vertex_basis_rejects_dependent() {
        let p = Polytope::new(s23()).unwrap();
        let mut basis: Vec<IntVector> = p.tensors().into_iter().take(9).collect();
        basis[8] = -&basis[0];
        assert!(det(&basis).unwrap().is_zero());
        assert!(matches!(from_vertex_basis(s23(), &basis), Err(Error::LinearlyDependent { .. })));
        assert!(from_vertex_basis(s23(), &basis[..8]).is_err());
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_two_settings(&chsh_sign()).unwrap();
        assert_eq!(r.inequality.coefficients(), &iv(&[1, 1, 1, -1]));
        assert_eq!(r.inequality.bound(), &BigInt::from(2));
        assert_eq!(r.kept_settings, vec![1, 1]);

        let r = reduce_two_settings(&SignFunction::constant(s23(), 1).unwrap()).unwrap();
        assert_eq!(r.inequality.coefficients(), &iv(&[1, 0, 0, 0]));

        let ac = SignFunction::from_fn(s23(), |x| x[0] * x[2]).unwrap();
        let r = reduce_two_settings(&ac).unwrap();
        assert_eq!(r.inequality.coefficients(), &iv(&[0, 0, 0, 1]));

        let bd = SignFunction::from_fn(s23(), |x| x[1] * x[3]).unwrap();
        let r = reduce_two_settings(&bd).unwrap();
        assert_eq!(r.kept_settings, vec![2, 2]);
        assert_eq!(r.inequality.coefficients(), &iv(&[0, 0, 0, 1]));

        let mixed = SignFunction::from_fn(s23(), |x| (x[0] * x[2] + x[0] * x[3] + x[1] * x[2] - x[1] * x[3]) / 2).unwrap();
        assert!(matches!(reduce_two_settings(&mixed), Err(Error::Reduction(_))));
    }

    #[test]
    fn two_setting_facets_by_brute_force() {
        let p = Polytope::new(Scenario::new(2, 2).unwrap()).unwrap();
        let facets = hyperplane_facets(&p).unwrap();
        assert_eq!(facets.len(), 8);
        let cube = Polytope::new(Scenario::new(1, 3).unwrap()).unwrap();
        assert_eq!(hyperplane_facets(&cube).unwrap().len(), 3);
        assert!(matches!(hyperplane_facets(&Polytope::new(s23()).unwrap()), Err(Error::UnsupportedScale(_))));
    }

    #[test]
    fn ch_lift_examples() {
        let cat = catalog(s23(), Enumeration::Exhaustive).unwrap();
        let lift = ch_lift(s23(), &cat).unwrap();
        assert_eq!(lift.inequalities.len(), cat.len());
        assert_eq!(lift.vertices.len(), 16);
        assert!(lift.vertices.iter().all(|w| w[0].is_one()));

        let norm = lift.inequalities.iter().find(|l| l.coefficients == unit(0)).unwrap();
        for w in &lift.vertices {
            assert_eq!(norm.coefficients.dot(w).unwrap(), BigInt::one());
        }
        let c = lift.inequalities.iter().find(|l| l.coefficients == chsh()).unwrap();
        assert_eq!(c.describe(), "-3 <= B1 + A1 - A1B1 <= 1");
        for l in &lift.inequalities {
            for w in &lift.vertices {
                assert!(l.holds(&w.to_rational()).unwrap());
            }
        }
        assert!(ch_lift(Scenario::new(2, 2).unwrap(), &[]).is_err());
    }

    #[test]
    fn two_party_catalog_size() {
        let sfs = enumerate_admissible(s23(), Enumeration::Exhaustive).unwrap();
        assert_eq!(sfs.len(), 90);
        let cat = catalog(s23(), Enumeration::Exhaustive).unwrap();
        assert_eq!(cat.len(), 45);
    }

    #[test]
    fn display_is_readable() {
        let iq = Inequality::new(s23(), chsh(), 2.into(), "").unwrap();
        assert_eq!(iq.to_string(), "E00 + E01 + E10 - E11 <= 2");
    }
}
