//! Exact polytope membership: is a correlation tensor a convex combination
//! of vertices?
//!
//! Solved as a phase-one linear program over the rationals with Bland's
//! anti-cycling rule. A feasible answer carries the vertex weights; an
//! infeasible one carries a Farkas certificate turned into a separating
//! functional `c` with `c·E > max_v c·v`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inequality::{certify_face_in, Inequality};
use crate::linalg::{gcd_all, IntVector, RatVector, Rational};
use crate::polytope::{Polytope, Scenario};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Nonzero weights, keyed by vertex position in the polytope's vertex list.
    Mixture(Vec<(usize, Rational)>),
    /// Integer functional whose value at the query exceeds its vertex maximum.
    Separator { functional: IntVector, value: Rational, vertex_max: BigInt },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityResult {
    pub feasible: bool,
    pub witness: Witness,
}

impl FeasibilityResult {
    /// Re-checks the witness against the query with exact arithmetic.
    pub fn is_sound(&self, polytope: &Polytope, values: &RatVector) -> bool {
        match (&self.witness, self.feasible) {
            (Witness::Mixture(weights), true) => {
                let mut total = Rational::zero();
                let mut acc = RatVector::zeros(polytope.dim());
                for (idx, w) in weights {
                    let Some(v) = polytope.vertices().get(*idx) else {
                        return false;
                    };
                    if w.is_negative() {
                        return false;
                    }
                    total += w;
                    acc = acc.add(&v.tensor().to_rational().scale(w)).expect("same dimension");
                }
                total.is_one() && &acc == values
            }
            (Witness::Separator { functional, value, vertex_max }, false) => {
                let Ok(actual) = functional.dot_rational(values) else {
                    return false;
                };
                let Ok(max) = polytope.max_functional(functional) else {
                    return false;
                };
                &actual == value && &max == vertex_max && actual > Rational::from_integer(max)
            }
            _ => false,
        }
    }
}

pub fn decompose(values: &RatVector, s: Scenario) -> Result<FeasibilityResult> {
    decompose_in(&Polytope::new(s)?, values)
}

/// Decides membership of `values` in the polytope and returns a witness.
pub fn decompose_in(polytope: &Polytope, values: &RatVector) -> Result<FeasibilityResult> {
    let dim = polytope.dim();
    if values.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: values.dim() });
    }
    let vertices = polytope.vertices();
    let n = vertices.len();
    let m = dim + 1;

    // Rows: normalisation, then one per slot. Columns: vertices, artificials, rhs.
    let mut signs = vec![1i8; m];
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let rhs = if i == 0 { Rational::one() } else { values[i - 1].clone() };
        let flip = rhs.is_negative();
        signs[i] = if flip { -1 } else { 1 };
        let mut row = Vec::with_capacity(n + m + 1);
        for v in vertices {
            let a = if i == 0 { BigInt::one() } else { v.tensor()[i - 1].clone() };
            row.push(Rational::from_integer(if flip { -a } else { a }));
        }
        for k in 0..m {
            row.push(if k == i { Rational::one() } else { Rational::zero() });
        }
        row.push(if flip { -rhs } else { rhs });
        tab.push(row);
    }
    let width = n + m + 1;
    let mut cost = vec![Rational::zero(); width];
    for row in &tab {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &tab[i][width - 1] / &tab[i][enter];
            let better = match &leave {
                None => true,
                Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (r, _) = leave.expect("phase-one objective is bounded below");
        pivot(&mut tab, &mut cost, r, enter);
        basis[r] = enter;
    }

    // cost[rhs] holds −(sum of artificials).
    if cost[width - 1].is_zero() {
        let mut weights: Vec<(usize, Rational)> = basis
            .iter()
            .enumerate()
            .filter(|&(i, &j)| j < n && !tab[i][width - 1].is_zero())
            .map(|(i, &j)| (j, tab[i][width - 1].clone()))
            .collect();
        weights.sort_by_key(|(j, _)| *j);
        return Ok(FeasibilityResult { feasible: true, witness: Witness::Mixture(weights) });
    }

    // Duals from the artificial columns: y_i = 1 − reduced cost, then undo row flips.
    let y: Vec<Rational> = (0..m)
        .map(|i| {
            let yi = Rational::one() - &cost[n + i];
            if signs[i] < 0 {
                -yi
            } else {
                yi
            }
        })
        .collect();
    let functional = integer_direction(&y[1..]);
    let value = functional.dot_rational(values)?;
    let vertex_max = polytope.max_functional(&functional)?;
    Ok(FeasibilityResult { feasible: false, witness: Witness::Separator { functional, value, vertex_max } })
}

fn pivot(tab: &mut [Vec<Rational>], cost: &mut [Rational], r: usize, c: usize) {
    let inv = tab[r][c].recip();
    for v in tab[r].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let pivot_row = tab[r].clone();
    let eliminate = |row: &mut Vec<Rational>| {
        let f = row[c].clone();
        if f.is_zero() {
            return;
        }
        for (x, p) in row.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
    };
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    let mut cost_row = cost.to_vec();
    eliminate(&mut cost_row);
    cost.clone_from_slice(&cost_row);
}

/// Smallest integer vector positively proportional to `y`.
fn integer_direction(y: &[Rational]) -> IntVector {
    let scaled = RatVector::new(y.to_vec());
    let (nums, _) = scaled.to_integer_scaled();
    let g = gcd_all(nums.iter());
    if g.is_zero() || g.is_one() {
        return nums;
    }
    IntVector::new(nums.into_entries().into_iter().map(|x| x / &g).collect())
}

/// How a random query tensor was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Random mixture of random vertices.
    Interior,
    /// Random mixture of the vertices of one face.
    Boundary,
    /// A face point pushed outwards and clipped to `[−1, 1]`.
    Exterior,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Interior => "interior",
            Regime::Boundary => "boundary",
            Regime::Exterior => "exterior",
        }
    }
}

/// One completeness trial.
#[derive(Clone, Debug)]
pub struct Trial {
    pub regime: Regime,
    pub tensor: RatVector,
    pub solver_feasible: bool,
    pub catalog_feasible: bool,
    /// Catalog positions whose two-sided bound `|c·E| ≤ b` fails.
    pub violated_ids: Vec<usize>,
    pub witness_sound: bool,
}

impl Trial {
    pub fn agrees(&self) -> bool {
        self.solver_feasible == self.catalog_feasible
    }
}

#[derive(Clone, Debug)]
pub struct CompletenessReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub trials: Vec<Trial>,
}

impl CompletenessReport {
    pub fn disagreements(&self) -> Vec<&Trial> {
        self.trials.iter().filter(|t| !t.agrees()).collect()
    }

    pub fn unsound_witnesses(&self) -> usize {
        self.trials.iter().filter(|t| !t.witness_sound).count()
    }

    pub fn count(&self, regime: Regime, feasible: bool) -> usize {
        self.trials.iter().filter(|t| t.regime == regime && t.solver_feasible == feasible).count()
    }

    pub fn passed(&self) -> bool {
        self.disagreements().is_empty() && self.unsound_witnesses() == 0
    }
}

/// Membership according to the catalog: positions of every violated record.
pub fn catalog_violations(catalog: &[Inequality], values: &RatVector) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, iq) in catalog.iter().enumerate() {
        if !iq.admits(values)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// Random tensor generator over a polytope and its facet catalog.
pub struct TensorSampler<'a> {
    polytope: &'a Polytope,
    /// Saturating vertex positions of each face, both orientations.
    faces: Vec<Vec<usize>>,
}

impl<'a> TensorSampler<'a> {
    pub fn new(polytope: &'a Polytope, catalog: &[Inequality]) -> Result<Self> {
        let mut faces = Vec::with_capacity(2 * catalog.len());
        for iq in catalog {
            let cert = certify_face_in(polytope, iq)?;
            let face: Vec<usize> = cert
                .saturating_vertices
                .iter()
                .map(|v| polytope.index_of(v.tensor()).expect("vertex of this polytope"))
                .collect();
            let anti: Vec<usize> = cert
                .saturating_vertices
                .iter()
                .map(|v| polytope.index_of(&-v.tensor()).expect("vertex set is symmetric"))
                .collect();
            faces.push(face);
            faces.push(anti);
        }
        Ok(TensorSampler { polytope, faces })
    }

    fn mix(&self, pool: &[usize], max_terms: usize, rng: &mut ChaCha8Rng) -> RatVector {
        let k = rng.gen_range(1..=max_terms.min(pool.len()));
        let chosen = sample(rng, pool.len(), k);
        let weights: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=10)).collect();
        let total: u32 = weights.iter().sum();
        let mut acc = RatVector::zeros(self.polytope.dim());
        for (idx, w) in chosen.iter().zip(weights) {
            let v = self.polytope.vertices()[pool[idx]].tensor().to_rational();
            acc = acc.add(&v.scale(&Rational::new(w.into(), total.into()))).expect("same dimension");
        }
        acc
    }

    pub fn draw(&self, regime: Regime, rng: &mut ChaCha8Rng) -> RatVector {
        match regime {
            Regime::Interior => {
                let all: Vec<usize> = (0..self.polytope.vertices().len()).collect();
                self.mix(&all, 6, rng)
            }
            Regime::Boundary | Regime::Exterior if self.faces.is_empty() => self.draw(Regime::Interior, rng),
            Regime::Boundary => {
                let face = &self.faces[rng.gen_range(0..self.faces.len())];
                self.mix(face, self.polytope.dim(), rng)
            }
            Regime::Exterior => {
                let face = &self.faces[rng.gen_range(0..self.faces.len())];
                let point = self.mix(face, self.polytope.dim(), rng);
                let factor = Rational::new(rng.gen_range(11..=15).into(), 10.into());
                let one = Rational::one();
                let clipped = point
                    .scale(&factor)
                    .into_entries()
                    .into_iter()
                    .map(|x| if x > one { one.clone() } else if x < -&one { -&one } else { x })
                    .collect();
                RatVector::new(clipped)
            }
        }
    }
}

/// Compares the LP oracle with the catalog on `trials` seeded random tensors,
/// cycling through interior, boundary and exterior regimes.
pub fn completeness_check(s: Scenario, catalog: &[Inequality], trials: usize, seed: u64) -> Result<CompletenessReport> {
    if catalog.is_empty() {
        return Err(Error::Catalog("no inequalities supplied".into()));
    }
    if let Some(bad) = catalog.iter().position(|iq| iq.scenario() != s) {
        return Err(Error::Catalog(format!("entry {bad} belongs to {}", catalog[bad].scenario())));
    }
    let polytope = Polytope::new(s)?;
    let sampler = TensorSampler::new(&polytope, catalog)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let regimes = [Regime::Interior, Regime::Boundary, Regime::Exterior];
    let queries: Vec<(Regime, RatVector)> = (0..trials)
        .map(|i| {
            let regime = regimes[i % regimes.len()];
            (regime, sampler.draw(regime, &mut rng))
        })
        .collect();
    let trials: Result<Vec<Trial>> = queries
        .into_par_iter()
        .map(|(regime, tensor)| {
            let result = decompose_in(&polytope, &tensor)?;
            let violated_ids = catalog_violations(catalog, &tensor)?;
            Ok(Trial {
                regime,
                solver_feasible: result.feasible,
                catalog_feasible: violated_ids.is_empty(),
                witness_sound: result.is_sound(&polytope, &tensor),
                violated_ids,
                tensor,
            })
        })
        .collect();
    Ok(CompletenessReport { scenario: s, seed, trials: trials? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::catalog;
    use crate::signfn::Enumeration;

    fn s23() -> Scenario {
        Scenario::new(2, 3).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn vertex_is_point_mass() {
        let p = Polytope::new(s23()).unwrap();
        for idx in [0, 7, 31] {
            let e = p.vertices()[idx].tensor().to_rational();
            let r = decompose_in(&p, &e).unwrap();
            assert!(r.feasible);
            assert_eq!(r.witness, Witness::Mixture(vec![(idx, Rational::one())]));
            assert!(r.is_sound(&p, &e));
        }
    }

    #[test]
    fn zero_tensor_is_feasible() {
        let p = Polytope::new(s23()).unwrap();
        let e = RatVector::zeros(9);
        let r = decompose_in(&p, &e).unwrap();
        assert!(r.feasible);
        assert!(r.is_sound(&p, &e));
    }

    #[test]
    fn supra_classical_chsh_point_is_separated() {
        let p = Polytope::new(s23()).unwrap();
        let seven = q(7, 10);
        let mut vals = vec![Rational::zero(); 9];
        vals[0] = seven.clone();
        vals[1] = seven.clone();
        vals[3] = seven.clone();
        vals[4] = -seven;
        let e = RatVector::new(vals);
        let r = decompose_in(&p, &e).unwrap();
        assert!(!r.feasible);
        assert!(r.is_sound(&p, &e));
        let Witness::Separator { functional, .. } = &r.witness else { panic!("expected separator") };
        // Supported on the CHSH block.
        for slot in [2, 5, 6, 7, 8] {
            assert!(functional[slot].is_zero(), "{functional}");
        }
    }

    #[test]
    fn inflated_vertex_is_infeasible() {
        let p = Polytope::new(s23()).unwrap();
        let e = p.vertices()[3].tensor().to_rational().scale(&q(11, 10));
        let r = decompose_in(&p, &e).unwrap();
        assert!(!r.feasible);
        assert!(r.is_sound(&p, &e));
    }

    #[test]
    fn dimension_checked() {
        assert!(decompose(&RatVector::zeros(4), s23()).is_err());
    }

    #[test]
    fn small_completeness_run() {
        let cat = catalog(s23(), Enumeration::Exhaustive).unwrap();
        let report = completeness_check(s23(), &cat, 60, 11).unwrap();
        assert!(report.passed());
        assert!(report.count(Regime::Interior, true) > 0);
        assert!(report.count(Regime::Exterior, false) > 0);
        assert!(completeness_check(s23(), &[], 10, 1).is_err());
    }

    #[test]
    fn completeness_is_deterministic() {
        let s = Scenario::new(2, 2).unwrap();
        let cat = catalog(s, Enumeration::Exhaustive).unwrap();
        let a = completeness_check(s, &cat, 30, 5).unwrap();
        let b = completeness_check(s, &cat, 30, 5).unwrap();
        let ta: Vec<_> = a.trials.iter().map(|t| t.tensor.clone()).collect();
        let tb: Vec<_> = b.trials.iter().map(|t| t.tensor.clone()).collect();
        assert_eq!(ta, tb);
        assert!(a.passed());
    }
}
