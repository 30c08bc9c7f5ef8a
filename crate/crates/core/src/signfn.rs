//! Sign functions on local index tuples and their Boolean-Fourier spectra.
//!
//! A sign function assigns `±1` to every tuple of index variables, one group
//! of `settings − 1` variables per party (`a,b` for party 1, `c,d` for party 2,
//! …). Tables are stored in canonical order: lexicographic over the variables,
//! first variable slowest, `+1` before `−1`. Table position `i` therefore
//! encodes the tuple whose bit `n−1−j` is set exactly when variable `j` is
//! `−1`, and a monomial is the bitmask of the variables it contains.
//!
//! A function is *admissible* when its spectrum has no monomial containing
//! both variables of a single party.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Rational;
use crate::polytope::Scenario;

/// Largest party count accepted by exhaustive enumeration.
pub const MAX_EXHAUSTIVE_PARTIES: usize = 3;
/// Largest party count accepted by sampling enumeration.
pub const MAX_SAMPLED_PARTIES: usize = 4;

/// A total `±1` table over `{±1}^(index vars)`.
///
/// Ordered by scenario, then by table in canonical order (`+1 < −1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignFunction {
    scenario: Scenario,
    table: Vec<i8>,
}

impl Ord for SignFunction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.scenario.cmp(&other.scenario).then_with(|| other.table.cmp(&self.table))
    }
}

impl PartialOrd for SignFunction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl SignFunction {
    pub fn from_table(scenario: Scenario, table: Vec<i8>) -> Result<Self> {
        check_table_size(scenario)?;
        let expected = 1usize << scenario.index_vars();
        if table.len() != expected {
            return Err(Error::InvalidSignFunction(format!(
                "table for {scenario} needs {expected} entries, got {}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&x| x != 1 && x != -1) {
            return Err(Error::InvalidSignFunction(format!("entry {bad} is not ±1")));
        }
        Ok(SignFunction { scenario, table })
    }

    /// Tabulates `f` over all index tuples in canonical order.
    pub fn from_fn(scenario: Scenario, f: impl Fn(&[i8]) -> i8) -> Result<Self> {
        check_table_size(scenario)?;
        let n = scenario.index_vars();
        let table = (0..1usize << n).map(|i| f(&index_tuple(n, i))).collect();
        SignFunction::from_table(scenario, table)
    }

    pub fn constant(scenario: Scenario, value: i8) -> Result<Self> {
        SignFunction::from_fn(scenario, |_| value)
    }

    /// Infers the scenario from the party count and table length.
    pub fn from_parts(parties: usize, table: Vec<i8>) -> Result<Self> {
        if parties == 0 || !table.len().is_power_of_two() {
            return Err(Error::InvalidSignFunction(format!("table length {} is not a power of two", table.len())));
        }
        let n = table.len().trailing_zeros() as usize;
        if !n.is_multiple_of(parties) || !(1..=2).contains(&(n / parties)) {
            return Err(Error::InvalidSignFunction(format!(
                "table length {} does not fit {parties} parties",
                table.len()
            )));
        }
        SignFunction::from_table(Scenario::new(parties, n / parties + 1)?, table)
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn parties(&self) -> usize {
        self.scenario.parties()
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }

    pub fn vars(&self) -> usize {
        self.scenario.index_vars()
    }

    pub fn value(&self, position: usize) -> i8 {
        self.table[position]
    }

    pub fn negate(&self) -> SignFunction {
        SignFunction { scenario: self.scenario, table: self.table.iter().map(|x| -x).collect() }
    }

    /// Flips the sign of index variable `var` (`x_var ↦ −x_var`).
    pub fn flip_variable(&self, var: usize) -> SignFunction {
        let bit = 1usize << (self.vars() - 1 - var);
        let table = (0..self.table.len()).map(|i| self.table[i ^ bit]).collect();
        SignFunction { scenario: self.scenario, table }
    }

    /// Exchanges the two index variables of `party` (three-setting scenarios).
    pub fn swap_party_variables(&self, party: usize) -> SignFunction {
        let n = self.vars();
        let b1 = 1usize << (n - 1 - 2 * party);
        let b2 = b1 >> 1;
        let table = (0..self.table.len())
            .map(|i| {
                let j = if (i & b1 != 0) != (i & b2 != 0) { i ^ b1 ^ b2 } else { i };
                self.table[j]
            })
            .collect();
        SignFunction { scenario: self.scenario, table }
    }

    /// Hex identifier: table bits in canonical order, bit set for `−1`.
    pub fn id(&self) -> String {
        let bits: Vec<u8> = self.table.iter().map(|&x| u8::from(x < 0)).collect();
        let mut out = String::with_capacity(bits.len().div_ceil(4));
        for chunk in bits.chunks(4) {
            let nibble = chunk.iter().fold(0u8, |acc, &b| acc << 1 | b) << (4 - chunk.len());
            out.push(char::from_digit(u32::from(nibble), 16).unwrap());
        }
        out
    }
}

impl fmt::Display for SignFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S[{}:{}]", self.parties(), self.id())
    }
}

/// JSON form `{"parties": N, "table": [±1, …]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignFunctionRecord {
    pub parties: usize,
    pub table: Vec<i8>,
}

impl From<&SignFunction> for SignFunctionRecord {
    fn from(sf: &SignFunction) -> Self {
        SignFunctionRecord { parties: sf.parties(), table: sf.table.clone() }
    }
}

impl TryFrom<SignFunctionRecord> for SignFunction {
    type Error = Error;
    fn try_from(r: SignFunctionRecord) -> Result<Self> {
        SignFunction::from_parts(r.parties, r.table)
    }
}

fn check_table_size(s: Scenario) -> Result<()> {
    if s.index_vars() > 16 {
        return Err(Error::UnsupportedScale(format!("sign-function table for {s} is too large")));
    }
    Ok(())
}

/// Values of the index variables at canonical table position `i`.
pub fn index_tuple(vars: usize, i: usize) -> Vec<i8> {
    (0..vars).map(|j| if i >> (vars - 1 - j) & 1 == 1 { -1 } else { 1 }).collect()
}

/// Bitmask of the monomial that is the product of the given variables.
pub fn monomial(vars: usize, variables: &[usize]) -> usize {
    variables.iter().fold(0, |m, &j| m | 1 << (vars - 1 - j))
}

/// Boolean-Fourier spectrum: `coefficient(M) = 2^(−n) Σ_x S(x)·M(x)`.
///
/// Stored as the integer sums `Σ_x S(x)·M(x)`; the common denominator is `2^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierSpectrum {
    vars: usize,
    sums: Vec<i64>,
}

impl FourierSpectrum {
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Unnormalised sum `Σ_x S(x)·M(x)` for monomial mask `m`.
    pub fn raw(&self, m: usize) -> i64 {
        self.sums[m]
    }

    pub fn coefficient(&self, m: usize) -> Rational {
        Rational::new(BigInt::from(self.sums[m]), BigInt::from(1i64 << self.vars))
    }

    /// Monomials with nonzero coefficient, in increasing mask order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.sums.len()).filter(|&m| self.sums[m] != 0).collect()
    }

    /// Evaluates `Σ_M coeff_M · M(x)` at every table position.
    pub fn reconstruct(&self) -> Vec<Rational> {
        let mut vals = self.sums.clone();
        walsh_hadamard(&mut vals);
        let denom = BigInt::from(1i64 << self.vars);
        vals.into_iter().map(|v| Rational::new(BigInt::from(v), denom.clone())).collect()
    }

    /// `Σ_M coeff_M²`.
    pub fn energy(&self) -> Rational {
        let total: i64 = self.sums.iter().map(|s| s * s).sum();
        Rational::new(BigInt::from(total), BigInt::from(1i64 << (2 * self.vars)))
    }
}

/// In-place unnormalised Walsh-Hadamard transform.
fn walsh_hadamard(v: &mut [i64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = a + b;
                *y = a - b;
            }
        }
        h *= 2;
    }
}

pub fn fourier(sf: &SignFunction) -> FourierSpectrum {
    let mut sums: Vec<i64> = sf.table.iter().map(|&x| i64::from(x)).collect();
    walsh_hadamard(&mut sums);
    FourierSpectrum { vars: sf.vars(), sums }
}

/// Bit pairs `(b1, b2)` of each party's two variables (three settings only).
fn party_bit_pairs(s: Scenario) -> Vec<(usize, usize)> {
    if s.vars_per_party() < 2 {
        return Vec::new();
    }
    let n = s.index_vars();
    (0..s.parties())
        .map(|p| {
            let b1 = 1usize << (n - 1 - 2 * p);
            (b1, b1 >> 1)
        })
        .collect()
}

/// Blockwise test: for every party and every assignment of the others,
/// `Σ_{a,b} ab·S = 0` over that party's two variables.
pub fn is_admissible(sf: &SignFunction) -> bool {
    let table = &sf.table;
    party_bit_pairs(sf.scenario).into_iter().all(|(b1, b2)| {
        (0..table.len())
            .filter(|i| i & (b1 | b2) == 0)
            .all(|i| table[i] - table[i | b2] - table[i | b1] + table[i | b1 | b2] == 0)
    })
}

/// Spectral test: no monomial in the support contains both variables of a party.
pub fn is_admissible_by_spectrum(sf: &SignFunction) -> bool {
    let spectrum = fourier(sf);
    let pairs = party_bit_pairs(sf.scenario);
    spectrum.support().into_iter().all(|m| pairs.iter().all(|&(b1, b2)| m & (b1 | b2) != (b1 | b2)))
}

/// Whether `sf` depends on at most one index variable of every party.
pub fn one_variable_per_party(sf: &SignFunction) -> bool {
    let pairs = party_bit_pairs(sf.scenario);
    let support = fourier(sf).support();
    pairs.iter().all(|&(b1, b2)| {
        let uses1 = support.iter().any(|m| m & b1 != 0);
        let uses2 = support.iter().any(|m| m & b2 != 0);
        !(uses1 && uses2)
    })
}

/// How to enumerate admissible sign functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    /// Every admissible function.
    Exhaustive,
    /// Up to `cap` distinct functions from seeded randomised descents.
    Sample { cap: usize, seed: u64 },
}

/// Admissible sign functions for `s`, sorted in canonical table order.
///
/// Tables of at most 16 entries are filtered exhaustively; larger ones are
/// explored by depth-first assignment with block propagation.
pub fn enumerate_admissible(s: Scenario, mode: Enumeration) -> Result<Vec<SignFunction>> {
    let vars = s.index_vars();
    match mode {
        Enumeration::Exhaustive => {
            if s.parties() > MAX_EXHAUSTIVE_PARTIES {
                return Err(Error::UnsupportedScale(format!(
                    "exhaustive enumeration supports at most {MAX_EXHAUSTIVE_PARTIES} parties"
                )));
            }
            if vars <= 4 {
                Ok(filter_all(s))
            } else {
                Ok(BlockSearch::new(s).enumerate_all())
            }
        }
        Enumeration::Sample { cap, seed } => {
            if s.parties() > MAX_SAMPLED_PARTIES {
                return Err(Error::UnsupportedScale(format!(
                    "sampling supports at most {MAX_SAMPLED_PARTIES} parties"
                )));
            }
            Ok(BlockSearch::new(s).sample(cap, seed))
        }
    }
}

fn filter_all(s: Scenario) -> Vec<SignFunction> {
    let len = 1usize << s.index_vars();
    (0u64..1 << len)
        .map(|bits| {
            let table = (0..len).map(|i| if bits >> (len - 1 - i) & 1 == 1 { -1 } else { 1 }).collect();
            SignFunction { scenario: s, table }
        })
        .filter(is_admissible)
        .collect()
}

/// Depth-first assignment of a sign table under the party-block constraints.
///
/// Each constraint involves the four entries obtained by varying one party's
/// two variables with everything else fixed. Once three of them are set the
/// fourth is forced; a forced value outside `±1` or a complete block with
/// nonzero weighted sum is a conflict.
#[derive(Clone)]
pub struct BlockSearch {
    scenario: Scenario,
    pairs: Vec<(usize, usize)>,
    table: Vec<i8>,
    trail: Vec<usize>,
}

impl BlockSearch {
    pub fn new(scenario: Scenario) -> Self {
        BlockSearch {
            scenario,
            pairs: party_bit_pairs(scenario),
            table: vec![0; 1 << scenario.index_vars()],
            trail: Vec::new(),
        }
    }

    /// Sets `pos` and propagates forced entries; returns `false` on conflict.
    /// On conflict the caller must undo to its own trail mark.
    fn assign(&mut self, pos: usize, value: i8) -> bool {
        let mut queue = vec![(pos, value)];
        while let Some((pos, value)) = queue.pop() {
            match self.table[pos] {
                0 => {
                    self.table[pos] = value;
                    self.trail.push(pos);
                }
                v if v == value => continue,
                _ => return false,
            }
            for &(b1, b2) in &self.pairs {
                let base = pos & !(b1 | b2);
                let cells = [(base, 1), (base | b2, -1), (base | b1, -1), (base | b1 | b2, 1)];
                let mut sum = 0i8;
                let mut open = None;
                let mut unset = 0;
                for &(c, w) in &cells {
                    match self.table[c] {
                        0 => {
                            unset += 1;
                            open = Some((c, w));
                        }
                        v => sum += w * v,
                    }
                }
                match (unset, open) {
                    (0, _) if sum != 0 => return false,
                    (1, Some((c, w))) => {
                        let forced = -sum * w;
                        if forced != 1 && forced != -1 {
                            return false;
                        }
                        queue.push((c, forced));
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let pos = self.trail.pop().unwrap();
            self.table[pos] = 0;
        }
    }

    fn next_open(&self, from: usize) -> Option<usize> {
        (from..self.table.len()).find(|&i| self.table[i] == 0)
    }

    fn current(&self) -> SignFunction {
        SignFunction { scenario: self.scenario, table: self.table.clone() }
    }

    fn collect_all(&mut self, from: usize, out: &mut Vec<SignFunction>) {
        let Some(pos) = self.next_open(from) else {
            out.push(self.current());
            return;
        };
        for value in [1i8, -1] {
            let mark = self.trail.len();
            if self.assign(pos, value) {
                self.collect_all(pos + 1, out);
            }
            self.undo_to(mark);
        }
    }

    /// All admissible tables in canonical order. The two branches of the first
    /// entry are explored in parallel.
    pub fn enumerate_all(&self) -> Vec<SignFunction> {
        let branches: Vec<Vec<SignFunction>> = [1i8, -1]
            .par_iter()
            .map(|&value| {
                let mut search = self.clone();
                let mut out = Vec::new();
                if search.assign(0, value) {
                    search.collect_all(1, &mut out);
                }
                out
            })
            .collect();
        let mut all: Vec<SignFunction> = branches.into_iter().flatten().collect();
        all.sort();
        all
    }

    /// Counts admissible tables without storing them.
    pub fn count_all(&self) -> u64 {
        fn go(search: &mut BlockSearch, from: usize) -> u64 {
            let Some(pos) = search.next_open(from) else {
                return 1;
            };
            let mut total = 0;
            for value in [1i8, -1] {
                let mark = search.trail.len();
                if search.assign(pos, value) {
                    total += go(search, pos + 1);
                }
                search.undo_to(mark);
            }
            total
        }
        let mut search = self.clone();
        go(&mut search, 0)
    }

    fn descend(&mut self, from: usize, rng: &mut ChaCha8Rng) -> bool {
        let Some(pos) = self.next_open(from) else {
            return true;
        };
        let mut values = [1i8, -1];
        values.shuffle(rng);
        for value in values {
            let mark = self.trail.len();
            if self.assign(pos, value) && self.descend(pos + 1, rng) {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }

    /// Up to `cap` distinct admissible tables, each found by a randomised
    /// depth-first descent. Gives up after `64·cap` descents.
    pub fn sample(&self, cap: usize, seed: u64) -> Vec<SignFunction> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut found = BTreeSet::new();
        let mut attempts = 0usize;
        while found.len() < cap && attempts < cap.saturating_mul(64) {
            attempts += 1;
            let mut search = self.clone();
            if search.descend(0, &mut rng) {
                found.insert(search.current());
            }
        }
        found.into_iter().collect()
    }
}
