//! Property suite over a scenario: determinant identities, expansion
//! integrality, cut-through, saturation, catalog certificates, the
//! two-setting baseline, construction-path agreement, the CH lift and the
//! completeness cross-check.
//!
//! Every sampled check is driven by an explicit seed that is echoed in its
//! outcome so a failure can be replayed.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequality::{
    catalog, certify_face_in, ch_lift, from_sign_function, from_vertex_basis, hyperplane_facets, raw_functional,
    reduce_two_settings, Inequality,
};
use crate::linalg::{bordered_cofactors, bordered_det, det, solve_exact, IntVector, RatVector, Rational};
use crate::membership::{completeness_check, CompletenessReport};
use crate::polytope::{product_vertex, Polytope, Scenario};
use crate::signfn::{enumerate_admissible, index_tuple, one_variable_per_party, Enumeration, SignFunction};

/// Attempts allowed per requested sample when drawing random bases.
const ATTEMPTS_PER_SAMPLE: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seed: Option<u64>,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String, seed: Option<u64>) -> Self {
        CheckOutcome { name: name.to_string(), passed, detail, seed }
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)?;
        if let Some(seed) = self.seed {
            write!(f, " (seed {seed})")?;
        }
        Ok(())
    }
}

/// Draws `count` linearly independent `dim`-subsets of vertex positions
/// from `pool`, accepting only those passing `keep`.
fn random_bases(
    tensors: &[IntVector],
    pool: &[usize],
    count: usize,
    rng: &mut ChaCha8Rng,
    keep: impl Fn(&[IntVector]) -> bool,
) -> Result<Vec<Vec<usize>>> {
    let dim = tensors[0].dim();
    if pool.len() < dim {
        return Err(Error::LinearlyDependent { rank: pool.len(), needed: dim });
    }
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > ATTEMPTS_PER_SAMPLE * count.max(1) {
            return Err(Error::UnsupportedScale(format!("found only {} of {count} admissible bases", out.len())));
        }
        let mut idx: Vec<usize> = sample(rng, pool.len(), dim).into_iter().map(|i| pool[i]).collect();
        idx.sort_unstable();
        let basis: Vec<IntVector> = idx.iter().map(|&i| tensors[i].clone()).collect();
        if !det(&basis)?.is_zero() && keep(&basis) {
            out.push(idx);
        }
    }
    Ok(out)
}

fn pick(tensors: &[IntVector], idx: &[usize]) -> Vec<IntVector> {
    idx.iter().map(|&i| tensors[i].clone()).collect()
}

/// Bordered determinant identity: `D[−v_k; v_1..v_d] = 2·det(v_1..v_d)` for every basis member.
#[derive(Clone, Debug)]
pub struct DeterminantIdentityReport {
    pub bases: usize,
    pub failures: Vec<Vec<usize>>,
}

pub fn determinant_identity(p: &Polytope, samples: usize, seed: u64) -> Result<DeterminantIdentityReport> {
    let tensors = p.tensors();
    let all: Vec<usize> = (0..tensors.len()).collect();
    let bases = random_bases(&tensors, &all, samples, &mut ChaCha8Rng::seed_from_u64(seed), |_| true)?;
    let failures = bases
        .par_iter()
        .filter(|idx| {
            let basis = pick(&tensors, idx);
            let twice = Rational::from_integer(det(&basis).expect("square") * 2);
            !basis.iter().all(|v| bordered_det(&(-v).to_rational(), &basis).is_ok_and(|d| d == twice))
        })
        .cloned()
        .collect();
    Ok(DeterminantIdentityReport { bases: bases.len(), failures })
}

/// Expansions of the remaining vertices in a vertex basis.
#[derive(Clone, Debug)]
pub struct ExpansionReport {
    pub bases: usize,
    pub expansions: usize,
    /// Bases with some non-integer expansion coefficient.
    pub non_integer: Vec<Vec<usize>>,
    /// Expansions whose coefficients all satisfy `|t| ≤ 1`.
    pub unit_expansions: usize,
    /// Bases all of whose expansions satisfy `|t| ≤ 1`.
    pub unit_bases: usize,
}

impl ExpansionReport {
    pub fn unit_rate(&self) -> f64 {
        self.unit_expansions as f64 / self.expansions.max(1) as f64
    }
}

pub fn expansion_integrality(p: &Polytope, samples: usize, seed: u64) -> Result<ExpansionReport> {
    let tensors = p.tensors();
    let all: Vec<usize> = (0..tensors.len()).collect();
    let bases = random_bases(&tensors, &all, samples, &mut ChaCha8Rng::seed_from_u64(seed), |_| true)?;
    let per_basis: Vec<(usize, bool, usize)> = bases
        .par_iter()
        .map(|idx| {
            let basis = pick(&tensors, idx);
            let members: BTreeSet<&IntVector> = basis.iter().collect();
            let mut expansions = 0;
            let mut integral = true;
            let mut unit = 0;
            for v in &tensors {
                if members.contains(v) || members.contains(&-v) {
                    continue;
                }
                let t = solve_exact(&basis, &v.to_rational()).expect("basis is nonsingular");
                expansions += 1;
                integral &= t.entries().iter().all(|x| x.is_integer());
                if t.entries().iter().all(|x| x.abs() <= Rational::one()) {
                    unit += 1;
                }
            }
            (expansions, integral, unit)
        })
        .collect();
    let mut report =
        ExpansionReport { bases: bases.len(), expansions: 0, non_integer: Vec::new(), unit_expansions: 0, unit_bases: 0 };
    for (idx, (e, integral, unit)) in bases.iter().zip(per_basis) {
        report.expansions += e;
        report.unit_expansions += unit;
        if unit == e {
            report.unit_bases += 1;
        }
        if !integral {
            report.non_integer.push(idx.clone());
        }
    }
    Ok(report)
}

/// Cut-through: a hyperplane through `d` independent vertices holding at most
/// `2^(index vars) − 1` vertices separates some pair `±v`.
#[derive(Clone, Debug)]
pub struct CutThroughReport {
    pub bases: usize,
    pub failures: Vec<Vec<usize>>,
}

fn hyperplane_values(cof: &[BigInt], tensors: &[IntVector]) -> Vec<BigInt> {
    tensors
        .iter()
        .map(|t| &cof[0] + cof[1..].iter().zip(t.iter()).map(|(c, x)| c * x).sum::<BigInt>())
        .collect()
}

pub fn cut_through(p: &Polytope, samples: usize, seed: u64) -> Result<CutThroughReport> {
    let tensors = p.tensors();
    let all: Vec<usize> = (0..tensors.len()).collect();
    let face_size = 1usize << p.scenario().index_vars();
    let keep = |basis: &[IntVector]| {
        let cof = bordered_cofactors(basis).expect("square");
        hyperplane_values(&cof, &tensors).iter().filter(|d| d.is_zero()).count() < face_size
    };
    let bases = random_bases(&tensors, &all, samples, &mut ChaCha8Rng::seed_from_u64(seed), keep)?;
    let failures = bases
        .par_iter()
        .filter(|idx| {
            let cof = bordered_cofactors(&pick(&tensors, idx)).expect("square");
            let values = hyperplane_values(&cof, &tensors);
            let cuts = tensors.iter().zip(&values).any(|(t, d)| {
                let j = p.index_of(&-t).expect("vertex set is symmetric");
                let e = &values[j];
                (d.is_positive() && e.is_negative()) || (d.is_negative() && e.is_positive())
            });
            !cuts
        })
        .cloned()
        .collect();
    Ok(CutThroughReport { bases: bases.len(), failures })
}

/// `Σ_x S(x)·(v_x·y) = ±2^n` on the face `{S(y)·v_y}` and its negation.
#[derive(Clone, Debug)]
pub struct SaturationReport {
    pub functions: usize,
    pub checked_vertices: usize,
    pub failures: Vec<SignFunction>,
}

pub fn saturation_identity(sfs: &[SignFunction]) -> Result<SaturationReport> {
    let results: Result<Vec<(usize, bool)>> = sfs
        .par_iter()
        .map(|sf| {
            let s = sf.scenario();
            let n = sf.vars();
            let (t, raw_bound) = raw_functional(sf)?;
            let mut ok = true;
            for y in 0..1usize << n {
                let v = product_vertex(s, &index_tuple(n, y))?;
                let face = if sf.value(y) > 0 { v } else { -&v };
                ok &= t.dot(&face)? == raw_bound && t.dot(&-&face)? == -&raw_bound;
            }
            Ok((1usize << n, ok))
        })
        .collect();
    let mut report = SaturationReport { functions: sfs.len(), checked_vertices: 0, failures: Vec::new() };
    for (sf, (count, ok)) in sfs.iter().zip(results?) {
        report.checked_vertices += 2 * count;
        if !ok {
            report.failures.push(sf.clone());
        }
    }
    Ok(report)
}

/// Validity and tightness of every catalog entry; the expected saturating
/// count is `2^(index vars)`.
#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub entries: usize,
    /// `(position, provenance, reason)` for every failing entry.
    pub failures: Vec<(usize, String, String)>,
}

pub fn catalog_certificates(p: &Polytope, cat: &[Inequality]) -> CertificateReport {
    let expected = 1usize << p.scenario().index_vars();
    let failures = cat
        .par_iter()
        .enumerate()
        .filter_map(|(i, iq)| {
            let reason = match certify_face_in(p, iq) {
                Err(e) => e.to_string(),
                Ok(c) if !c.is_tight() => format!("affine rank {} below {}", c.affine_rank, p.dim()),
                Ok(c) if c.saturating_count() != expected => {
                    format!("{} saturating vertices, expected {expected}", c.saturating_count())
                }
                Ok(_) => return None,
            };
            Some((i, iq.provenance().to_string(), reason))
        })
        .collect();
    CertificateReport { entries: cat.len(), failures }
}

type Face = (IntVector, BigInt);

fn faces(iqs: &[Inequality]) -> BTreeSet<Face> {
    iqs.iter().map(|iq| (iq.coefficients().clone(), iq.bound().clone())).collect()
}

/// Two-setting baseline: sign-function facets, reduced three-setting
/// facets and brute-force hyperplane facets at two parties, two settings.
#[derive(Clone, Debug)]
pub struct BaselineReport {
    pub from_sign_functions: usize,
    pub from_reduction: usize,
    pub from_hyperplanes: usize,
    pub sign_matches_hyperplanes: bool,
    pub reduction_matches_hyperplanes: bool,
}

pub fn two_setting_baseline() -> Result<BaselineReport> {
    let s2 = Scenario::new(2, 2)?;
    let direct: Vec<Inequality> = enumerate_admissible(s2, Enumeration::Exhaustive)?
        .iter()
        .filter(|sf| one_variable_per_party(sf))
        .map(from_sign_function)
        .collect::<Result<_>>()?;
    let brute = hyperplane_facets(&Polytope::new(s2)?)?;
    let s3 = Scenario::new(2, 3)?;
    let reduced: Vec<Inequality> = enumerate_admissible(s3, Enumeration::Exhaustive)?
        .iter()
        .filter(|sf| one_variable_per_party(sf))
        .map(|sf| reduce_two_settings(sf).map(|r| r.inequality))
        .collect::<Result<_>>()?;
    let (d, r, b) = (faces(&direct), faces(&reduced), faces(&brute));
    Ok(BaselineReport {
        from_sign_functions: d.len(),
        from_reduction: r.len(),
        from_hyperplanes: b.len(),
        sign_matches_hyperplanes: d == b,
        reduction_matches_hyperplanes: r == b,
    })
}

/// Construction paths: a random independent `d`-subset of a sign
/// function's face rebuilds the same canonical inequality.
#[derive(Clone, Debug)]
pub struct ConstructionReport {
    pub faces: usize,
    pub mismatches: Vec<(SignFunction, Vec<usize>)>,
}

pub fn construction_paths(sfs: &[SignFunction], faces: usize, seed: u64) -> Result<ConstructionReport> {
    if sfs.is_empty() {
        return Err(Error::Catalog("no sign functions supplied".into()));
    }
    let s = sfs[0].scenario();
    let p = Polytope::new(s)?;
    let tensors = p.tensors();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(faces);
    for _ in 0..faces {
        let sf = &sfs[rng.gen_range(0..sfs.len())];
        let cert = certify_face_in(&p, &from_sign_function(sf)?)?;
        let pool: Vec<usize> = cert.saturating_vertices.iter().map(|v| p.index_of(v.tensor()).expect("vertex")).collect();
        let idx = random_bases(&tensors, &pool, 1, &mut rng, |_| true)?.remove(0);
        draws.push((sf.clone(), idx));
    }
    let mismatches = draws
        .into_par_iter()
        .filter(|(sf, idx)| {
            let a = from_sign_function(sf).expect("admissible");
            let b = from_vertex_basis(s, &pick(&tensors, idx)).expect("independent");
            a.coefficients() != b.coefficients() || a.bound() != b.bound()
        })
        .collect();
    Ok(ConstructionReport { faces, mismatches })
}

/// CH lift: every lifted constraint on every lifted vertex and on random
/// mixtures of them.
#[derive(Clone, Debug)]
pub struct LiftReport {
    pub inequalities: usize,
    pub points: usize,
    /// `(source position, point index)`; points `0..16` are the vertices.
    pub failures: Vec<(usize, usize)>,
}

pub fn lift_soundness(cat: &[Inequality], mixtures: usize, seed: u64) -> Result<LiftReport> {
    let lift = ch_lift(Scenario::new(2, 3)?, cat)?;
    let mut points: Vec<RatVector> = lift.vertices.iter().map(IntVector::to_rational).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..mixtures {
        let k = rng.gen_range(1..=lift.vertices.len());
        let chosen = sample(&mut rng, lift.vertices.len(), k);
        let weights: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=20)).collect();
        let total: u32 = weights.iter().sum();
        let mut acc = RatVector::zeros(9);
        for (i, w) in chosen.iter().zip(weights) {
            acc = acc.add(&points[i].scale(&Rational::new(w.into(), total.into())))?;
        }
        points.push(acc);
    }
    let failures = lift
        .inequalities
        .par_iter()
        .flat_map_iter(|l| {
            points
                .iter()
                .enumerate()
                .filter(|(_, w)| !l.holds(w).unwrap_or(false))
                .map(|(j, _)| (l.source, j))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(LiftReport { inequalities: lift.inequalities.len(), points: points.len(), failures })
}

/// What [`run_suite`] runs.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub scenario: Scenario,
    pub seed: u64,
    /// Random bases per sampled geometric check.
    pub samples: usize,
    /// Random tensors for the completeness check.
    pub trials: usize,
    /// Sign-function enumeration for generating a catalog.
    pub enumeration: Enumeration,
}

impl SuiteConfig {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        SuiteConfig { scenario, seed, samples: 1000, trials: 1000, enumeration: Enumeration::Exhaustive }
    }
}

/// Outcomes of [`run_suite`], plus the completeness trials when they ran.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub outcomes: Vec<CheckOutcome>,
    pub completeness: Option<CompletenessReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

/// Runs every check applicable to the scenario. With `supplied` the
/// certificates and completeness checks use that catalog instead of a
/// freshly generated one.
pub fn run_suite(cfg: &SuiteConfig, supplied: Option<&[Inequality]>) -> Result<SuiteReport> {
    let s = cfg.scenario;
    let seed = cfg.seed;
    let p = Polytope::new(s)?;
    let sfs = enumerate_admissible(s, cfg.enumeration)?;
    let generated;
    let cat = match supplied {
        Some(c) => c,
        None => {
            generated = catalog(s, cfg.enumeration)?;
            &generated[..]
        }
    };
    let mut out = Vec::new();
    let mut completeness = None;

    let sat = saturation_identity(&sfs)?;
    out.push(CheckOutcome::new(
        "saturation identity",
        sat.failures.is_empty() && sat.functions > 0,
        format!("{} sign functions, {} vertex evaluations, {} failures", sat.functions, sat.checked_vertices, sat.failures.len())
            + &sat.failures.first().map(|sf| format!(", first {sf}")).unwrap_or_default(),
        None,
    ));

    let certs = catalog_certificates(&p, cat);
    out.push(CheckOutcome::new(
        "catalog certificates",
        certs.failures.is_empty() && certs.entries > 0,
        format!("{} entries, {} failures", certs.entries, certs.failures.len())
            + &certs
                .failures
                .first()
                .map(|(i, prov, why)| format!(", first entry {i} ({prov}): {why}"))
                .unwrap_or_default(),
        None,
    ));

    if s.parties() == 2 && s.settings_per_party() == 3 {
        let r = determinant_identity(&p, cfg.samples, seed)?;
        out.push(CheckOutcome::new(
            "determinant identity",
            r.failures.is_empty(),
            format!("{} bases, {} failures", r.bases, r.failures.len()),
            Some(seed),
        ));
        let r = expansion_integrality(&p, cfg.samples, seed.wrapping_add(1))?;
        out.push(CheckOutcome::new(
            "integer expansions",
            r.non_integer.is_empty(),
            format!(
                "{} bases, {} expansions, {} non-integer bases; |t| <= 1 holds for {:.4} of expansions and {} of {} bases",
                r.bases,
                r.expansions,
                r.non_integer.len(),
                r.unit_rate(),
                r.unit_bases,
                r.bases
            ),
            Some(seed.wrapping_add(1)),
        ));
        let r = cut_through(&p, cfg.samples, seed.wrapping_add(2))?;
        out.push(CheckOutcome::new(
            "cut-through",
            r.failures.is_empty(),
            format!("{} non-face bases, {} failures", r.bases, r.failures.len()),
            Some(seed.wrapping_add(2)),
        ));
        let r = construction_paths(&sfs, 100, seed.wrapping_add(3))?;
        out.push(CheckOutcome::new(
            "construction paths",
            r.mismatches.is_empty(),
            format!("{} faces, {} mismatches", r.faces, r.mismatches.len()),
            Some(seed.wrapping_add(3)),
        ));
        let r = lift_soundness(cat, cfg.samples, seed.wrapping_add(4))?;
        out.push(CheckOutcome::new(
            "CH lift",
            r.failures.is_empty(),
            format!("{} lifted inequalities on {} points, {} failures", r.inequalities, r.points, r.failures.len()),
            Some(seed.wrapping_add(4)),
        ));
    }

    if s.parties() == 2 {
        let r = two_setting_baseline()?;
        out.push(CheckOutcome::new(
            "two-setting baseline",
            r.sign_matches_hyperplanes && r.reduction_matches_hyperplanes,
            format!(
                "{} sign-function facets, {} reduced facets, {} hyperplane facets",
                r.from_sign_functions, r.from_reduction, r.from_hyperplanes
            ),
            None,
        ));
        if certs.failures.is_empty() {
            let r = completeness_check(s, cat, cfg.trials, seed.wrapping_add(5))?;
            let bad = r.disagreements();
            out.push(CheckOutcome::new(
                "completeness",
                r.passed(),
                format!("{} trials, {} disagreements, {} unsound witnesses", r.trials.len(), bad.len(), r.unsound_witnesses())
                    + &bad
                        .first()
                        .map(|t| format!(", first tensor {:?}", t.tensor.entries().iter().map(|x| x.to_string()).collect::<Vec<_>>()))
                        .unwrap_or_default(),
                Some(seed.wrapping_add(5)),
            ));
            completeness = Some(r);
        } else {
            out.push(CheckOutcome::new(
                "completeness",
                false,
                "not run: the catalog has entries without valid certificates".into(),
                Some(seed.wrapping_add(5)),
            ));
        }
    }
    Ok(SuiteReport { outcomes: out, completeness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p23() -> Polytope {
        Polytope::new(Scenario::new(2, 3).unwrap()).unwrap()
    }

    #[test]
    fn sampled_facts_hold_on_small_runs() {
        let p = p23();
        assert!(determinant_identity(&p, 20, 1).unwrap().failures.is_empty());
        let r = expansion_integrality(&p, 20, 2).unwrap();
        assert!(r.non_integer.is_empty());
        assert!(r.expansions > 0);
        let r = cut_through(&p, 20, 3).unwrap();
        assert_eq!(r.bases, 20);
        assert!(r.failures.is_empty());
    }

    #[test]
    fn saturation_on_every_two_party_function() {
        let s = Scenario::new(2, 3).unwrap();
        let sfs = enumerate_admissible(s, Enumeration::Exhaustive).unwrap();
        let r = saturation_identity(&sfs).unwrap();
        assert_eq!(r.functions, 90);
        assert_eq!(r.checked_vertices, 90 * 32);
        assert!(r.failures.is_empty());
    }

    #[test]
    fn perturbed_catalog_entry_is_named() {
        let s = Scenario::new(2, 3).unwrap();
        let mut cat = catalog(s, Enumeration::Exhaustive).unwrap();
        let iq = &cat[7];
        let mut c = iq.coefficients().clone().into_entries();
        c[8] += 1;
        cat[7] = Inequality::new(s, IntVector::new(c), iq.bound().clone(), "tampered").unwrap();
        let r = catalog_certificates(&p23(), &cat);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].0, 7);
        assert_eq!(r.failures[0].1, "tampered");
    }

    #[test]
    fn baseline_sets_agree() {
        let r = two_setting_baseline().unwrap();
        assert!(r.sign_matches_hyperplanes);
        assert!(r.reduction_matches_hyperplanes);
        assert_eq!(r.from_hyperplanes, 8);
    }

    #[test]
    fn small_suite_passes() {
        let mut cfg = SuiteConfig::new(Scenario::new(2, 3).unwrap(), 9);
        cfg.samples = 10;
        cfg.trials = 30;
        let report = run_suite(&cfg, None).unwrap();
        assert!(report.passed(), "{:?}", report.outcomes);
        assert_eq!(report.outcomes.len(), 9);
        assert_eq!(report.completeness.unwrap().trials.len(), 30);
    }

    #[test]
    fn two_setting_suite_passes() {
        let mut cfg = SuiteConfig::new(Scenario::new(2, 2).unwrap(), 4);
        cfg.trials = 30;
        let report = run_suite(&cfg, None).unwrap();
        assert!(report.passed(), "{:?}", report.outcomes);
    }
}
