use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use tribell_core::inequality::{catalog, from_sign_function};
use tribell_core::linalg::{combine, det, rank, solve_exact};
use tribell_core::membership::decompose_in;
use tribell_core::signfn::{fourier, is_admissible, is_admissible_by_spectrum};
use tribell_core::{
    CorrelationTensor, Enumeration, Inequality, IntVector, Polytope, RatVector, Rational, Scenario, SignFunction,
};

fn laplace(m: &[Vec<i64>]) -> BigInt {
    if m.is_empty() {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for (j, &a) in m[0].iter().enumerate() {
        if a == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
        let term = BigInt::from(a) * laplace(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn square(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-4i64..=4, n), n))
}

fn rows(m: &[Vec<i64>]) -> Vec<IntVector> {
    m.iter().map(|r| IntVector::from_i64s(r.iter().copied())).collect()
}

fn ratio() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=12).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn s23() -> Scenario {
    Scenario::new(2, 3).unwrap()
}

/// Vertex mixture with the given small positive weights.
fn mixture_of(p: &Polytope, picks: &[(usize, u32)]) -> RatVector {
    let total: u32 = picks.iter().map(|&(_, w)| w).sum();
    picks.iter().fold(RatVector::zeros(p.dim()), |acc, &(i, w)| {
        let v = p.vertices()[i % p.vertices().len()].tensor().to_rational();
        acc.add(&v.scale(&Rational::new(w.into(), total.into()))).unwrap()
    })
}

fn relabel(values: &RatVector, f: impl Fn(usize, usize) -> (usize, usize, bool)) -> RatVector {
    let mut out = vec![Rational::zero(); 9];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b, neg) = f(i, j);
            let x = values[3 * i + j].clone();
            out[3 * a + b] = if neg { -x } else { x };
        }
    }
    RatVector::new(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinant_matches_laplace(m in square(6)) {
        prop_assert_eq!(det(&rows(&m)).unwrap(), laplace(&m));
    }

    #[test]
    fn determinant_alternates_under_row_swap(m in square(6), a in 0usize..6, b in 0usize..6) {
        let n = m.len();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let mut swapped = m.clone();
        swapped.swap(a, b);
        prop_assert_eq!(det(&rows(&swapped)).unwrap(), -det(&rows(&m)).unwrap());
    }

    #[test]
    fn rank_is_transpose_invariant(m in square(5)) {
        let n = m.len();
        let t: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect();
        let r = rank(&rows(&m));
        prop_assert_eq!(r, rank(&rows(&t)));
        prop_assert_eq!(r == n, !det(&rows(&m)).unwrap().is_zero());
    }

    #[test]
    fn solve_inverts_combine(idx in prop::sample::subsequence((0..32usize).collect::<Vec<_>>(), 9), t in prop::collection::vec(ratio(), 9)) {
        let p = Polytope::new(s23()).unwrap();
        let basis: Vec<IntVector> = idx.iter().map(|&i| p.vertices()[i].tensor().clone()).collect();
        prop_assume!(!det(&basis).unwrap().is_zero());
        let t = RatVector::new(t);
        let x = combine(&basis, &t).unwrap();
        prop_assert_eq!(solve_exact(&basis, &x).unwrap(), t);
    }

    #[test]
    fn evaluate_is_affine_linear(
        a in prop::collection::vec((0usize..32, 1u32..6), 1..5),
        b in prop::collection::vec((0usize..32, 1u32..6), 1..5),
        k in 0usize..45,
        alpha in (0i64..=9).prop_map(|n| Rational::new(n.into(), 9.into())),
    ) {
        let s = s23();
        let p = Polytope::new(s).unwrap();
        let iq = &catalog(s, Enumeration::Exhaustive).unwrap()[k];
        let (ea, eb) = (mixture_of(&p, &a), mixture_of(&p, &b));
        let mix = ea.scale(&alpha).add(&eb.scale(&(Rational::one() - &alpha))).unwrap();
        let val = |v: &RatVector| iq.evaluate(&CorrelationTensor::new(s, v.clone()).unwrap()).unwrap();
        let (va, vb, vm) = (val(&ea), val(&eb), val(&mix));
        prop_assert_eq!(vm.value, &alpha * va.value + (Rational::one() - &alpha) * vb.value);
        prop_assert!(!vm.violated);
    }

    #[test]
    fn fourier_reconstructs_three_party_tables(bits in prop::collection::vec(any::<bool>(), 64)) {
        let s = Scenario::new(3, 3).unwrap();
        let sf = SignFunction::from_table(s, bits.iter().map(|&b| if b { -1 } else { 1 }).collect()).unwrap();
        let spectrum = fourier(&sf);
        let back: Vec<Rational> = sf.table().iter().map(|&v| Rational::from_integer(v.into())).collect();
        prop_assert_eq!(spectrum.reconstruct(), back);
        prop_assert_eq!(spectrum.energy(), Rational::one());
        prop_assert_eq!(is_admissible(&sf), is_admissible_by_spectrum(&sf));
    }

    #[test]
    fn symmetries_keep_admissible_functions_admissible(k in 0usize..90, ops in prop::collection::vec(0usize..7, 0..6)) {
        let s = s23();
        let all = tribell_core::signfn::enumerate_admissible(s, Enumeration::Exhaustive).unwrap();
        let mut sf = all[k].clone();
        for op in ops {
            sf = match op {
                0..=3 => sf.flip_variable(op),
                4 | 5 => sf.swap_party_variables(op - 4),
                _ => sf.negate(),
            };
        }
        prop_assert!(is_admissible(&sf));
        prop_assert!(from_sign_function(&sf).is_ok());
    }

    #[test]
    fn canonical_form_ignores_positive_and_negative_scaling(k in 0usize..45, m in prop_oneof![1i64..6, -6i64..=-1]) {
        let s = s23();
        let iq = &catalog(s, Enumeration::Exhaustive).unwrap()[k];
        let scaled: Vec<BigInt> = iq.coefficients().iter().map(|c| c * m).collect();
        let bound = iq.bound() * m.abs();
        let again = Inequality::new(s, IntVector::new(scaled), bound, iq.provenance()).unwrap();
        prop_assert_eq!(&again, iq);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn membership_is_invariant_under_relabelling(
        picks in prop::collection::vec((0usize..32, 1u32..6), 1..5),
        push in 8i64..=15,
        flip_setting in 1usize..3,
    ) {
        let p = Polytope::new(s23()).unwrap();
        let base = mixture_of(&p, &picks);
        let scaled = base.scale(&Rational::new(push.into(), 10.into()));
        let clipped = RatVector::new(
            scaled.into_entries().into_iter().map(|x| x.min(Rational::one()).max(-Rational::one())).collect(),
        );
        let verdict = |v: &RatVector| decompose_in(&p, v).unwrap().feasible;
        let want = verdict(&clipped);
        let parties = relabel(&clipped, |i, j| (j, i, false));
        let settings = relabel(&clipped, |i, j| ([0, 2, 1][i], j, false));
        let flipped = relabel(&clipped, |i, j| (i, j, j == flip_setting));
        prop_assert_eq!(verdict(&parties), want);
        prop_assert_eq!(verdict(&settings), want);
        prop_assert_eq!(verdict(&flipped), want);
    }
}
