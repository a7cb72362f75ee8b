//! Permutations, pattern containment and pattern statistics.

mod separable;

pub use separable::{is_separable, random_separable, SeparableClass, MAX_SEPARABLE_LEN};

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourpoint::{pattern_index, PatternHistogram, PATTERNS};
use crate::rng::seeded_rng;

/// Largest length handled by brute-force pattern counting.
pub const MAX_BRUTE_FORCE_LEN: usize = 20;

/// Largest length for exhaustive enumeration of the symmetric group.
pub const MAX_ENUMERATION_LEN: usize = 9;

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(one_line: Vec<u32>) -> Result<Self> {
        let n = one_line.len();
        let mut seen = vec![false; n];
        for &v in &one_line {
            if v == 0 || v as usize > n || seen[v as usize - 1] {
                return Err(Error::param(format!(
                    "not a permutation of 1..={n}: {one_line:?}"
                )));
            }
            seen[v as usize - 1] = true;
        }
        Ok(Permutation(one_line))
    }

    pub(crate) fn new_unchecked(one_line: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(one_line.clone()).is_ok());
        Permutation(one_line)
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<u32> = (1..=n as u32).collect();
        v.shuffle(rng);
        Permutation(v)
    }

    /// Digit string such as `"3412"`; only for `n <= 9`.
    pub fn from_digits(s: &str) -> Result<Self> {
        let v = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d > 0)
                    .ok_or_else(|| Error::param(format!("bad digit {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        Permutation::new(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn one_line(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// Value at 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Permutation(inv)
    }

    pub fn reverse(&self) -> Self {
        Permutation(self.0.iter().rev().copied().collect())
    }

    pub fn complement(&self) -> Self {
        let n = self.len() as u32;
        Permutation(self.0.iter().map(|&v| n + 1 - v).collect())
    }

    /// Lexicographic rank among permutations of the same length.
    pub fn lex_rank(&self) -> usize {
        lex_rank(&self.0)
    }

    pub fn from_lex_rank(n: usize, mut rank: usize) -> Self {
        let mut remaining: Vec<u32> = (1..=n as u32).collect();
        let mut out = Vec::with_capacity(n);
        for i in (0..n).rev() {
            let f = factorial(i);
            out.push(remaining.remove(rank / f));
            rank %= f;
        }
        Permutation(out)
    }

    /// Digit string without separators, as used for short patterns.
    pub fn to_digits(&self) -> String {
        self.0.iter().map(|v| v.to_string()).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Parses whitespace-separated values, or a bare digit string when no
/// whitespace is present.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if !s.contains(char::is_whitespace) && s.len() <= 9 && !s.is_empty() {
            return Permutation::from_digits(s);
        }
        let v = s
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|e| Error::param(format!("bad entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        Permutation::new(v)
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u64 = 1;
    for i in 0..k {
        c = c * (n - i) as u64 / (i + 1) as u64;
    }
    c
}

fn lex_rank<T: PartialOrd>(v: &[T]) -> usize {
    let k = v.len();
    let mut rank = 0;
    for i in 0..k {
        let smaller_after = v[i + 1..].iter().filter(|x| **x < v[i]).count();
        rank += smaller_after * factorial(k - 1 - i);
    }
    rank
}

/// The permutation order-isomorphic to `r`.
pub fn standardize<T: PartialOrd>(r: &[T]) -> Result<Permutation> {
    let mut idx: Vec<usize> = (0..r.len()).collect();
    let mut bad = false;
    idx.sort_by(|&a, &b| {
        r[a].partial_cmp(&r[b]).unwrap_or_else(|| {
            bad = true;
            std::cmp::Ordering::Equal
        })
    });
    if bad || idx.windows(2).any(|w| r[w[0]] >= r[w[1]]) {
        return Err(Error::NotDistinct);
    }
    let mut out = vec![0u32; r.len()];
    for (rank, &i) in idx.iter().enumerate() {
        out[i] = rank as u32 + 1;
    }
    Ok(Permutation(out))
}

/// Calls `f` with every increasing `k`-tuple of indices below `n`.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn check_sizes(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(Error::param(format!("pattern length {k} exceeds permutation length {n}")));
    }
    if n > MAX_BRUTE_FORCE_LEN {
        return Err(Error::param(format!(
            "brute-force counting is limited to length {MAX_BRUTE_FORCE_LEN}, got {n}"
        )));
    }
    Ok(())
}

/// Number of index subsets of `pi` whose standardization is `sigma`.
pub fn count_pattern(pi: &Permutation, sigma: &Permutation) -> Result<u64> {
    let (n, k) = (pi.len(), sigma.len());
    check_sizes(n, k)?;
    let target = sigma.lex_rank();
    let mut count = 0;
    let mut buf = vec![0u32; k];
    for_each_subset(n, k, |s| {
        for (b, &i) in buf.iter_mut().zip(s) {
            *b = pi.0[i];
        }
        if lex_rank(&buf) == target {
            count += 1;
        }
    });
    Ok(count)
}

/// Counts of every length-`k` pattern in `pi`, indexed by lexicographic rank.
pub fn count_all_patterns(pi: &Permutation, k: usize) -> Result<Vec<u64>> {
    check_sizes(pi.len(), k)?;
    Ok(count_all_unchecked(&pi.0, k))
}

fn count_all_unchecked(pi: &[u32], k: usize) -> Vec<u64> {
    let mut counts = vec![0u64; factorial(k)];
    let mut buf = vec![0u32; k];
    for_each_subset(pi.len(), k, |s| {
        for (b, &i) in buf.iter_mut().zip(s) {
            *b = pi[i];
        }
        counts[lex_rank(&buf)] += 1;
    });
    counts
}

/// Probability that a uniform `|sigma|`-subset of positions of `pi`
/// standardizes to `sigma`.
pub fn pattern_density(pi: &Permutation, sigma: &Permutation) -> Result<f64> {
    let c = count_pattern(pi, sigma)?;
    Ok(c as f64 / binomial(pi.len(), sigma.len()) as f64)
}

/// Patterns of `floor(n/4)` random disjoint 4-position sets.
pub fn non_overlapping_counts(pi: &Permutation, seed: u64) -> Result<PatternHistogram> {
    let n = pi.len();
    if n < 4 {
        return Err(Error::param(format!("need length at least 4, got {n}")));
    }
    let mut pos: Vec<usize> = (0..n).collect();
    pos.shuffle(&mut seeded_rng(seed));
    let mut counts = [0u64; PATTERNS];
    for block in pos.chunks_exact(4) {
        let mut b = [block[0], block[1], block[2], block[3]];
        b.sort_unstable();
        let vals = b.map(|i| pi.0[i]);
        counts[pattern_index(&vals).expect("permutation values are distinct")] += 1;
    }
    Ok(PatternHistogram::from_counts(counts))
}

/// `sigma ⊕ tau`: `tau` shifted above and to the right of `sigma`.
pub fn direct_sum(sigma: &Permutation, tau: &Permutation) -> Permutation {
    let m = sigma.len() as u32;
    let mut v = sigma.0.clone();
    v.extend(tau.0.iter().map(|&t| t + m));
    Permutation(v)
}

/// `sigma ⊖ tau`: `sigma` shifted above and to the left of `tau`.
pub fn skew_sum(sigma: &Permutation, tau: &Permutation) -> Permutation {
    let n = tau.len() as u32;
    let mut v: Vec<u32> = sigma.0.iter().map(|&s| s + n).collect();
    v.extend_from_slice(&tau.0);
    Permutation(v)
}

/// Pearson correlations between the counts of every pair of length-`k`
/// patterns, taken over all of `S_n`. Rows and columns follow the
/// lexicographic order of the patterns. Constant counts give `NaN`.
pub fn pattern_correlation_matrix(n: usize, k: usize) -> Result<Vec<Vec<f64>>> {
    if n > MAX_ENUMERATION_LEN {
        return Err(Error::param(format!(
            "exhaustive enumeration is limited to n <= {MAX_ENUMERATION_LEN}, got {n}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::param(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let p = factorial(k);
    let total = factorial(n);
    // moment sums: [count, sum_a, sum_ab] accumulated in exact integers
    let (sum, sum_sq) = (0..total)
        .into_par_iter()
        .fold(
            || (vec![0u128; p], vec![0u128; p * p]),
            |(mut s, mut ss), r| {
                let pi = Permutation::from_lex_rank(n, r);
                let c = count_all_unchecked(&pi.0, k);
                for a in 0..p {
                    s[a] += c[a] as u128;
                    if c[a] == 0 {
                        continue;
                    }
                    for b in 0..p {
                        ss[a * p + b] += (c[a] * c[b]) as u128;
                    }
                }
                (s, ss)
            },
        )
        .reduce(
            || (vec![0u128; p], vec![0u128; p * p]),
            |(mut s1, mut ss1), (s2, ss2)| {
                s1.iter_mut().zip(&s2).for_each(|(a, b)| *a += b);
                ss1.iter_mut().zip(&ss2).for_each(|(a, b)| *a += b);
                (s1, ss1)
            },
        );
    let t = total as f64;
    let mean: Vec<f64> = sum.iter().map(|&s| s as f64 / t).collect();
    let cov = |a: usize, b: usize| sum_sq[a * p + b] as f64 / t - mean[a] * mean[b];
    let mut out = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in 0..p {
            out[a][b] = cov(a, b) / (cov(a, a) * cov(b, b)).sqrt();
        }
    }
    Ok(out)
}

/// Uniform random permutation of length `n`.
pub fn random_permutation(n: usize, seed: u64) -> Permutation {
    Permutation::random(n, &mut seeded_rng(seed))
}

/// Standardization of `n` i.i.d. uniform reals; equivalent to
/// [`random_permutation`] in law, kept for tests of `standardize`.
pub fn standardized_uniforms(n: usize, seed: u64) -> Permutation {
    let mut rng = seeded_rng(seed);
    let r: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    standardize(&r).expect("continuous draws are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        Permutation::from_digits(s).unwrap()
    }

    #[test]
    fn standardize_examples() {
        assert_eq!(standardize(&[141, 817, 96, 108]).unwrap(), p("3412"));
        assert_eq!(standardize(&[1.5, 2.5]).unwrap(), p("12"));
        assert_eq!(standardize(p("2413").one_line()).unwrap(), p("2413"));
        assert!(matches!(standardize(&[1, 1]), Err(Error::NotDistinct)));
        assert!(standardize(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("3412".parse::<Permutation>().unwrap(), p("3412"));
        let long: Permutation = "10 1 2 3 4 5 6 7 8 9".parse().unwrap();
        assert_eq!(long.len(), 10);
        assert_eq!(long.to_string(), "10 1 2 3 4 5 6 7 8 9");
        assert!("1223".parse::<Permutation>().is_err());
        assert!("0".parse::<Permutation>().is_err());
    }

    #[test]
    fn lex_rank_roundtrip() {
        for r in 0..120 {
            assert_eq!(Permutation::from_lex_rank(5, r).lex_rank(), r);
        }
        assert_eq!(p("1234").lex_rank(), 0);
        assert_eq!(p("4321").lex_rank(), 23);
    }

    #[test]
    fn count_examples() {
        let pi = p("531426");
        // positions 2, 3, 5 hold 3, 1, 4
        assert_eq!(standardize(&[3, 1, 4]).unwrap(), p("213"));
        let c = count_pattern(&pi, &p("213")).unwrap();
        assert!(c >= 1);
        assert_eq!(count_pattern(&pi, &p("1")).unwrap(), 6);
        let id = Permutation::identity(9);
        assert_eq!(count_pattern(&id, &p("12")).unwrap(), 36);
        assert_eq!(count_pattern(&id, &p("21")).unwrap(), 0);
    }

    #[test]
    fn count_213_in_example_by_hand() {
        // triples (a<b<c) with pi_b < pi_a < pi_c in 5 3 1 4 2 6
        let pi = [5, 3, 1, 4, 2, 6];
        let mut manual = 0;
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    if pi[b] < pi[a] && pi[a] < pi[c] {
                        manual += 1;
                    }
                }
            }
        }
        assert_eq!(count_pattern(&p("531426"), &p("213")).unwrap(), manual);
    }

    #[test]
    fn size_errors() {
        assert!(count_pattern(&p("12"), &p("123")).is_err());
        let big = Permutation::identity(21);
        assert!(count_pattern(&big, &p("12")).is_err());
        assert!(non_overlapping_counts(&p("123"), 0).is_err());
        assert!(pattern_correlation_matrix(10, 4).is_err());
    }

    #[test]
    fn density_examples() {
        assert_eq!(pattern_density(&p("12"), &p("12")).unwrap(), 1.0);
        assert_eq!(pattern_density(&Permutation::identity(7), &p("21")).unwrap(), 0.0);
    }

    #[test]
    fn average_density_over_s6_is_uniform() {
        let mut totals = vec![0u64; 24];
        for r in 0..720 {
            let c = count_all_patterns(&Permutation::from_lex_rank(6, r), 4).unwrap();
            for (t, x) in totals.iter_mut().zip(c) {
                *t += x;
            }
        }
        for t in totals {
            let avg = t as f64 / (720.0 * 15.0);
            assert!((avg - 1.0 / 24.0).abs() < 1e-12);
        }
    }

    #[test]
    fn all_pattern_counts_sum_to_binomial() {
        let mut rng = seeded_rng(3);
        for n in 4..=12 {
            let pi = Permutation::random(n, &mut rng);
            let c = count_all_patterns(&pi, 4).unwrap();
            assert_eq!(c.iter().sum::<u64>(), binomial(n, 4));
        }
    }

    #[test]
    fn non_overlapping_identity() {
        let h = non_overlapping_counts(&Permutation::identity(103), 1).unwrap();
        assert_eq!(h.blocks, 25);
        assert_eq!(h.counts[0], 25);
    }

    #[test]
    fn sums() {
        let one = p("1");
        assert_eq!(direct_sum(&one, &one), p("12"));
        assert_eq!(skew_sum(&one, &one), p("21"));
        let a = skew_sum(&one, &one);
        let b = skew_sum(&skew_sum(&direct_sum(&one, &one), &one), &one);
        let pi = direct_sum(&direct_sum(&direct_sum(&a, &b), &one), &a);
        // (1⊖1)⊕((1⊕1)⊖1⊖1)⊕1⊕(1⊖1)
        assert_eq!(pi.to_digits(), "215643798");
        assert_eq!(direct_sum(&p("231"), &p("21")).len(), 5);
    }

    #[test]
    fn correlation_k2_over_s4() {
        let m = pattern_correlation_matrix(4, 2).unwrap();
        assert!((m[0][1] + 1.0).abs() < 1e-12);
        assert!((m[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_matrix_shape() {
        let m = pattern_correlation_matrix(6, 4).unwrap();
        assert_eq!(m.len(), 24);
        for a in 0..24 {
            assert!((m[a][a] - 1.0).abs() < 1e-9);
            for b in 0..24 {
                assert!((m[a][b] - m[b][a]).abs() < 1e-12);
                assert!(m[a][b].abs() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn symmetries() {
        let q = p("2413");
        assert_eq!(q.inverse(), p("3142"));
        assert_eq!(q.reverse(), p("3142"));
        assert_eq!(q.complement(), p("3142"));
        assert_eq!(q.inverse().inverse(), q);
    }

    #[test]
    fn standardized_uniforms_is_permutation() {
        let pi = standardized_uniforms(50, 8);
        assert!(Permutation::new(pi.into_vec()).is_ok());
    }

    #[test]
    fn subset_enumeration_counts() {
        for n in 0..8 {
            for k in 0..=n {
                let mut c = 0;
                for_each_subset(n, k, |_| c += 1);
                assert_eq!(c as u64, binomial(n, k), "n={n} k={k}");
            }
        }
    }
}
