//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers or reduced
//! rationals. Determinants and ranks use fraction-free (Bareiss) elimination,
//! so intermediate values stay integral and every `== 0` test is exact.

use std::fmt;
use std::ops::{Index, Neg};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational, always stored reduced with a positive denominator.
pub type Rational = BigRational;

/// A vector of arbitrary-precision integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn from_i64s(entries: impl IntoIterator<Item = i64>) -> Self {
        IntVector(entries.into_iter().map(BigInt::from).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        IntVector(vec![BigInt::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVector) -> Result<BigInt> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn dot_rational(&self, other: &RatVector) -> Result<Rational> {
        check_dim(self.dim(), other.dim())?;
        let mut acc = Rational::zero();
        for (a, b) in self.0.iter().zip(other.entries()) {
            if !a.is_zero() {
                acc += b * Rational::from_integer(a.clone());
            }
        }
        Ok(acc)
    }

    pub fn to_rational(&self) -> RatVector {
        RatVector(self.0.iter().cloned().map(Rational::from_integer).collect())
    }

    /// Entries as machine integers; `None` if any entry overflows `i64`.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|x| i64::try_from(x).ok()).collect()
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|x| -x).collect())
    }
}

impl Index<usize> for IntVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A vector of exact rationals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RatVector(Vec<Rational>);

impl RatVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        // `Ratio::new_raw` can bypass reduction.
        RatVector(entries.into_iter().map(|r| Rational::new(r.numer().clone(), r.denom().clone())).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        RatVector(vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn scale(&self, factor: &Rational) -> RatVector {
        RatVector(self.0.iter().map(|x| x * factor).collect())
    }

    pub fn add(&self, other: &RatVector) -> Result<RatVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().sum()
    }

    /// Least common multiple of all denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
    }

    /// Returns `(numerators, d)` with `self = numerators / d`.
    pub fn to_integer_scaled(&self) -> (IntVector, BigInt) {
        let d = self.common_denominator();
        let nums = self.0.iter().map(|r| r.numer() * (&d / r.denom())).collect();
        (IntVector(nums), d)
    }
}

impl From<&IntVector> for RatVector {
    fn from(v: &IntVector) -> Self {
        v.to_rational()
    }
}

impl Index<usize> for RatVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn to_matrix(rows: &[IntVector]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.0.clone()).collect()
}

/// Bareiss determinant of an owned square matrix.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Exact determinant of the square matrix whose rows are `rows`.
pub fn det(rows: &[IntVector]) -> Result<BigInt> {
    for r in rows {
        check_dim(rows.len(), r.dim())?;
    }
    Ok(bareiss_det(to_matrix(rows)))
}

/// Rank of an integer matrix, by fraction-free row reduction.
pub fn rank(rows: &[IntVector]) -> usize {
    let mut m = to_matrix(rows);
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let t = &m[i][j] * &m[r][c] - &m[i][c] * &m[r][j];
                m[i][j] = t / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

fn bordered_rows(points: &[IntVector]) -> Vec<IntVector> {
    points
        .iter()
        .map(|p| {
            let mut row = Vec::with_capacity(p.dim() + 1);
            row.push(BigInt::one());
            row.extend(p.0.iter().cloned());
            IntVector(row)
        })
        .collect()
}

/// Maximal number of affinely independent points among `points`
/// (dimension of the affine span plus one). Empty input has rank 0.
pub fn affine_rank(points: &[IntVector]) -> Result<usize> {
    if let Some(first) = points.first() {
        for p in points {
            check_dim(first.dim(), p.dim())?;
        }
    }
    Ok(rank(&bordered_rows(points)))
}

/// Cofactors of the first row of the bordered matrix `[1 x; 1 w¹; ...; 1 wᴺ]`.
///
/// Returns `c` of length N+1 such that `D[x, w] = c[0] + Σ_j c[j+1]·x_j` for
/// every point `x`; `c[0]` is `det(w)`.
pub fn bordered_cofactors(points: &[IntVector]) -> Result<Vec<BigInt>> {
    let n = points.len();
    for p in points {
        check_dim(n, p.dim())?;
    }
    let bordered = bordered_rows(points);
    let mut out = Vec::with_capacity(n + 1);
    for col in 0..=n {
        let minor: Vec<Vec<BigInt>> = bordered
            .iter()
            .map(|row| {
                row.0
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let d = bareiss_det(minor);
        out.push(if col % 2 == 0 { d } else { -d });
    }
    Ok(out)
}

/// `D[x, w¹, …, wᴺ]`: determinant of the (N+1)×(N+1) matrix with a leading
/// column of ones, first row `(1, x)` and row k+1 equal to `(1, wᵏ)`.
pub fn bordered_det(x: &RatVector, points: &[IntVector]) -> Result<Rational> {
    let n = x.dim();
    check_dim(n, points.len())?;
    for p in points {
        check_dim(n, p.dim())?;
    }
    // Scale the first row to integers; the determinant scales by the same factor.
    let (nums, d) = x.to_integer_scaled();
    let mut m = Vec::with_capacity(n + 1);
    let mut first = Vec::with_capacity(n + 1);
    first.push(d.clone());
    first.extend(nums.0);
    m.push(first);
    for p in points {
        let mut row = Vec::with_capacity(n + 1);
        row.push(BigInt::one());
        row.extend(p.0.iter().cloned());
        m.push(row);
    }
    Ok(Rational::new(bareiss_det(m), d))
}

/// Expansion coefficients `t` with `Σ_i t_i · rows[i] = rhs`.
pub fn solve_exact(rows: &[IntVector], rhs: &RatVector) -> Result<RatVector> {
    let n = rows.len();
    check_dim(n, rhs.dim())?;
    for r in rows {
        check_dim(n, r.dim())?;
    }
    // Augmented system Mᵀ t = rhs, Gauss-Jordan over the rationals.
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = (0..n).map(|j| Rational::from_integer(rows[j][i].clone())).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero()).ok_or(Error::Singular)?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut().skip(c) {
            *v *= &inv;
        }
        let pivot = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot).skip(c) {
                *x -= &f * p;
            }
        }
    }
    Ok(RatVector(a.into_iter().map(|mut row| row.pop().unwrap()).collect()))
}

/// `Σ_i t_i · rows[i]`.
pub fn combine(rows: &[IntVector], t: &RatVector) -> Result<RatVector> {
    check_dim(rows.len(), t.dim())?;
    let dim = rows.first().map_or(0, IntVector::dim);
    let mut acc = vec![Rational::zero(); dim];
    for (row, coef) in rows.iter().zip(t.entries()) {
        check_dim(dim, row.dim())?;
        for (a, x) in acc.iter_mut().zip(row.iter()) {
            *a += coef * Rational::from_integer(x.clone());
        }
    }
    Ok(RatVector(acc))
}

/// Greatest common divisor of all values (non-negative; zero for all-zero input).
pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::zero(), |g, v| g.gcd(v))
}

pub(crate) fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    s.parse().map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(xs: &[i64]) -> IntVector {
        IntVector::from_i64s(xs.iter().copied())
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn identity(n: usize) -> Vec<IntVector> {
        (0..n).map(|i| IntVector::from_i64s((0..n).map(|j| i64::from(i == j)))).collect()
    }

    fn product_basis() -> Vec<IntVector> {
        let mut rows = Vec::new();
        for a in [1i64, -1] {
            for b in [1i64, -1] {
                for c in [1i64, -1] {
                    for d in [1i64, -1] {
                        if (a, b) == (1, 1) || (c, d) == (1, 1) {
                            continue;
                        }
                        let u = [1, a, b];
                        let w = [1, c, d];
                        rows.push(IntVector::from_i64s(u.iter().flat_map(|x| w.iter().map(move |y| x * y))));
                    }
                }
            }
        }
        rows
    }

    #[test]
    fn det_identity_and_repeated_row() {
        assert_eq!(det(&identity(9)).unwrap(), BigInt::one());
        let mut m = identity(4);
        m[2] = m[0].clone();
        assert_eq!(det(&m).unwrap(), BigInt::zero());
        assert_eq!(det(&[]).unwrap(), BigInt::one());
    }

    #[test]
    fn det_rejects_non_square() {
        let rows = vec![iv(&[1, 2, 3]), iv(&[4, 5, 6])];
        assert_eq!(det(&rows), Err(Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn det_needs_pivoting() {
        let rows = vec![iv(&[0, 1]), iv(&[1, 0])];
        assert_eq!(det(&rows).unwrap(), BigInt::from(-1));
        let rows = vec![iv(&[0, 0, 1]), iv(&[0, 2, 0]), iv(&[3, 0, 0])];
        assert_eq!(det(&rows).unwrap(), BigInt::from(-6));
    }

    #[test]
    fn product_basis_det_is_frozen_value() {
        // 4096 = (±4)³·(±4)³, computed beforehand by cofactor expansion.
        assert_eq!(det(&product_basis()).unwrap(), BigInt::from(4096));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&identity(5)), 5);
        assert_eq!(rank(&[iv(&[1, 2]), iv(&[2, 4]), iv(&[3, 6])]), 1);
        assert_eq!(rank(&[iv(&[0, 0]), iv(&[0, 0])]), 0);
        assert_eq!(affine_rank(&[iv(&[5, 7])]).unwrap(), 1);
        assert_eq!(affine_rank(&[iv(&[0, 0]), iv(&[1, 1]), iv(&[2, 2])]).unwrap(), 2);
    }

    #[test]
    fn bordered_det_examples() {
        let w = product_basis();
        let d = det(&w).unwrap();
        for k in 0..9 {
            assert!(bordered_det(&w[k].to_rational(), &w).unwrap().is_zero());
            let neg = -&w[k];
            assert_eq!(bordered_det(&neg.to_rational(), &w).unwrap(), Rational::from_integer(2 * &d));
        }
        // x = Σ tᵢwᵢ gives det(w)·(1 − Σ tᵢ).
        let t = RatVector::new((0..9).map(|i| q(i - 3, 5)).collect());
        let x = combine(&w, &t).unwrap();
        let expected = Rational::from_integer(d) * (Rational::one() - t.sum());
        assert_eq!(bordered_det(&x, &w).unwrap(), expected);
    }

    #[test]
    fn bordered_cofactors_reproduce_bordered_det() {
        let w = product_basis();
        let c = bordered_cofactors(&w).unwrap();
        assert_eq!(c[0], det(&w).unwrap());
        let x = RatVector::new((0..9).map(|i| q(2 * i - 7, 3)).collect());
        let via_cofactors = Rational::from_integer(c[0].clone()) + IntVector::new(c[1..].to_vec()).dot_rational(&x).unwrap();
        assert_eq!(via_cofactors, bordered_det(&x, &w).unwrap());
    }

    #[test]
    fn solve_exact_examples() {
        let r = RatVector::new(vec![q(1, 2), q(-3, 1), q(0, 1)]);
        assert_eq!(solve_exact(&identity(3), &r).unwrap(), r);

        // Cube face: (1,1,1) = −Σ a'b'(1,a',b') over (a',b') ≠ (1,1).
        let basis = vec![iv(&[1, 1, -1]), iv(&[1, -1, 1]), iv(&[1, -1, -1])];
        let ones = iv(&[1, 1, 1]).to_rational();
        let t = solve_exact(&basis, &ones).unwrap();
        assert_eq!(t, iv(&[1, 1, -1]).to_rational());
        assert_eq!(t.sum(), Rational::one());

        // Product basis: (1,1,1)⊗(1,1,1) = Σ a'b'c'd' (1,a',b')⊗(1,c',d').
        let w = product_basis();
        let t = solve_exact(&w, &IntVector::from_i64s([1; 9]).to_rational()).unwrap();
        let pairs = [(1, -1), (-1, 1), (-1, -1)];
        let expected: Vec<i64> = pairs
            .iter()
            .flat_map(|&(a, b)| pairs.iter().map(move |&(c, d)| a * b * c * d))
            .collect();
        assert_eq!(t, IntVector::from_i64s(expected).to_rational());
        assert_eq!(t.sum(), Rational::one());
    }

    #[test]
    fn solve_exact_singular() {
        let rows = vec![iv(&[1, 2]), iv(&[2, 4])];
        assert_eq!(solve_exact(&rows, &RatVector::zeros(2)), Err(Error::Singular));
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["7/10", "-3", "0", "14/5"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_rational("4/8").unwrap()), "1/2");
        assert!(parse_rational("x").is_err());
    }
}
