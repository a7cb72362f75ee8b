//! Separable permutations: recognition, exact uniform sampling and the
//! limiting 4-pattern class probabilities.
//!
//! A separable permutation of length `n >= 2` is a plane tree with `n`
//! leaves whose internal nodes have at least two children, together with a
//! sign (direct or skew sum) at the root; signs alternate down the tree.
//! The sampler draws the tree uniformly by choosing the number of internal
//! nodes from its exact law, a uniform degree composition, a uniform
//! placement of internal nodes in the preorder word, and the rotation
//! singled out by the cycle lemma.

use rand::seq::index::sample;
use rand::Rng as _;
use serde::Serialize;

use super::Permutation;
use crate::error::{Error, Result};
use crate::rng::{seeded_rng, Rng};
use crate::stats::ln_gamma;

pub const MAX_SEPARABLE_LEN: usize = 20_000;

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Draws the number of internal nodes of a uniform tree with `n >= 2`
/// leaves. There are `C(n+i, i) C(n-2, i-1) / (n+i)` trees with `i`
/// internal nodes.
fn sample_internal_count(n: usize, rng: &mut Rng) -> usize {
    let logw: Vec<f64> = (1..n)
        .map(|i| ln_binomial(n + i, i) + ln_binomial(n - 2, i - 1) - ((n + i) as f64).ln())
        .collect();
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, wk) in w.iter().enumerate() {
        if u < *wk {
            return k + 1;
        }
        u -= wk;
    }
    n - 1
}

/// Preorder child counts of a uniform plane tree with `n` leaves and no
/// unary nodes.
pub(crate) fn random_schroeder_tree(n: usize, rng: &mut Rng) -> Vec<u32> {
    if n == 1 {
        return vec![0];
    }
    let i = sample_internal_count(n, rng);
    let m = n + i;

    // uniform weak composition of n - i - 1 extra children into i parts
    let mut bars: Vec<usize> = sample(rng, n - 2, i - 1).into_vec();
    bars.sort_unstable();
    let mut degrees = Vec::with_capacity(i);
    let mut prev: isize = -1;
    for &b in &bars {
        degrees.push((b as isize - prev - 1) as u32 + 2);
        prev = b as isize;
    }
    degrees.push((n as isize - 2 - prev - 1) as u32 + 2);

    let mut slots: Vec<usize> = sample(rng, m, i).into_vec();
    slots.sort_unstable();
    let mut word = vec![0u32; m];
    for (&s, &d) in slots.iter().zip(&degrees) {
        word[s] = d;
    }

    // rotate to start just after the first minimum of the walk
    let mut walk: i64 = 0;
    let mut low = i64::MAX;
    let mut at = 0;
    for (t, &d) in word.iter().enumerate() {
        walk += d as i64 - 1;
        if walk < low {
            low = walk;
            at = t;
        }
    }
    word.rotate_left((at + 1) % m);
    word
}

/// Turns a preorder tree word and a root sign into the permutation it
/// encodes; `true` means direct sum.
pub(crate) fn tree_to_permutation(word: &[u32], root_direct: bool) -> Permutation {
    let m = word.len();
    let mut nodes = vec![1usize; m];
    let mut leaves = vec![0usize; m];
    let mut stack: Vec<usize> = Vec::new();
    for v in (0..m).rev() {
        if word[v] == 0 {
            leaves[v] = 1;
        } else {
            for _ in 0..word[v] {
                let c = stack.pop().expect("well-formed preorder word");
                nodes[v] += nodes[c];
                leaves[v] += leaves[c];
            }
        }
        stack.push(v);
    }
    let mut base = vec![0usize; m];
    let mut direct = vec![root_direct; m];
    let mut out = Vec::with_capacity(leaves[0]);
    for v in 0..m {
        if word[v] == 0 {
            out.push(base[v] as u32 + 1);
            continue;
        }
        let mut c = v + 1;
        let mut before = 0;
        for _ in 0..word[v] {
            direct[c] = !direct[v];
            base[c] = if direct[v] {
                base[v] + before
            } else {
                base[v] + leaves[v] - before - leaves[c]
            };
            before += leaves[c];
            c += nodes[c];
        }
    }
    Permutation::new_unchecked(out)
}

/// A uniformly random separable permutation of length `n`.
pub fn random_separable(n: usize, seed: u64) -> Result<Permutation> {
    if n == 0 || n > MAX_SEPARABLE_LEN {
        return Err(Error::param(format!(
            "separable length must be in 1..={MAX_SEPARABLE_LEN}, got {n}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let word = random_schroeder_tree(n, &mut rng);
    let root_direct = rng.random::<bool>();
    Ok(tree_to_permutation(&word, root_direct))
}

/// Recognizes separability by repeatedly splitting off a prefix that is an
/// interval at the bottom or top of the value range.
pub fn is_separable(pi: &Permutation) -> bool {
    let v = pi.one_line();
    // each entry is a slice [lo, hi) whose values form an interval
    let mut work = vec![(0usize, v.len())];
    while let Some((lo, hi)) = work.pop() {
        if hi - lo <= 2 {
            continue;
        }
        let (smin, smax) = v[lo..hi]
            .iter()
            .fold((u32::MAX, 0), |(a, b), &x| (a.min(x), b.max(x)));
        let (mut pmin, mut pmax) = (u32::MAX, 0);
        let mut split = None;
        for k in lo..hi - 1 {
            pmin = pmin.min(v[k]);
            pmax = pmax.max(v[k]);
            let len = (k - lo + 1) as u32;
            if pmax - pmin + 1 == len && (pmin == smin || pmax == smax) {
                split = Some(k + 1);
                break;
            }
        }
        match split {
            Some(k) => {
                work.push((lo, k));
                work.push((k, hi));
            }
            None => return false,
        }
    }
    true
}

/// Classes of 4-patterns by their limiting frequency in a random
/// separable permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SeparableClass {
    Sigma1,
    Sigma2,
    Sigma3,
    Sigma4,
}

const SIGMA1: [&str; 2] = ["1234", "4321"];
const SIGMA2: [&str; 10] = [
    "1243", "1324", "1432", "2134", "2341", "3214", "3421", "4123", "4231", "4312",
];
const SIGMA3: [&str; 10] = [
    "1342", "1423", "2143", "2314", "2431", "3124", "3241", "3412", "4132", "4213",
];
const SIGMA4: [&str; 2] = ["2413", "3142"];

impl SeparableClass {
    pub const ALL: [SeparableClass; 4] = [
        SeparableClass::Sigma1,
        SeparableClass::Sigma2,
        SeparableClass::Sigma3,
        SeparableClass::Sigma4,
    ];

    /// Limiting probability that a random 4-subset shows a given member.
    pub fn probability(self) -> f64 {
        match self {
            SeparableClass::Sigma1 => 1.0 / 8.0,
            SeparableClass::Sigma2 => 1.0 / 20.0,
            SeparableClass::Sigma3 => 1.0 / 40.0,
            SeparableClass::Sigma4 => 0.0,
        }
    }

    pub fn members(self) -> &'static [&'static str] {
        match self {
            SeparableClass::Sigma1 => &SIGMA1,
            SeparableClass::Sigma2 => &SIGMA2,
            SeparableClass::Sigma3 => &SIGMA3,
            SeparableClass::Sigma4 => &SIGMA4,
        }
    }

    pub fn of(sigma: &Permutation) -> Result<Self> {
        if sigma.len() != 4 {
            return Err(Error::param(format!("expected a 4-pattern, got length {}", sigma.len())));
        }
        let s = sigma.to_digits();
        SeparableClass::ALL
            .into_iter()
            .find(|c| c.members().contains(&s.as_str()))
            .ok_or_else(|| Error::param(format!("{s} is not listed in any class")))
    }

    /// Class of each pattern, indexed by Lehmer index.
    pub fn by_index() -> [SeparableClass; 24] {
        std::array::from_fn(|k| {
            SeparableClass::of(&Permutation::from_lex_rank(4, k)).expect("tables cover S4")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{count_pattern, Permutation};
    use super::*;
    use std::collections::HashMap;

    fn p(s: &str) -> Permutation {
        Permutation::from_digits(s).unwrap()
    }

    fn all_perms(n: usize) -> Vec<Permutation> {
        (0..super::super::factorial(n))
            .map(|r| Permutation::from_lex_rank(n, r))
            .collect()
    }

    fn avoids_forbidden(pi: &Permutation) -> bool {
        pi.len() < 4
            || count_pattern(pi, &p("2413")).unwrap() == 0 && count_pattern(pi, &p("3142")).unwrap() == 0
    }

    #[test]
    fn recognizer_matches_pattern_avoidance() {
        for n in 1..=7 {
            for pi in all_perms(n) {
                assert_eq!(is_separable(&pi), avoids_forbidden(&pi), "{pi}");
            }
        }
    }

    #[test]
    fn separable_counts_are_schroeder_numbers() {
        let expected = [1, 2, 6, 22, 90, 394, 1806];
        for (n, &e) in (1..=7).zip(&expected) {
            let c = all_perms(n).iter().filter(|q| is_separable(q)).count();
            assert_eq!(c, e, "n={n}");
        }
    }

    #[test]
    fn worked_example_is_separable() {
        assert!(is_separable(&"215643798".parse().unwrap()));
        assert!(!is_separable(&p("2413")));
    }

    #[test]
    fn tree_words_are_valid() {
        let mut rng = seeded_rng(1);
        for n in 1..200 {
            let w = random_schroeder_tree(n, &mut rng);
            assert_eq!(w.iter().filter(|&&d| d == 0).count(), n);
            assert!(w.iter().all(|&d| d != 1));
            let mut walk: i64 = 0;
            for (t, &d) in w.iter().enumerate() {
                walk += d as i64 - 1;
                if t + 1 < w.len() {
                    assert!(walk >= 0);
                }
            }
            assert_eq!(walk, -1);
        }
    }

    #[test]
    fn sampler_outputs_are_separable() {
        for seed in 0..300 {
            let n = 1 + (seed as usize % 50);
            let pi = random_separable(n, seed).unwrap();
            assert_eq!(pi.len(), n);
            assert!(is_separable(&pi));
            if n <= 20 {
                assert!(avoids_forbidden(&pi));
            }
        }
    }

    #[test]
    fn small_lengths() {
        assert_eq!(random_separable(1, 0).unwrap(), p("1"));
        assert!(random_separable(0, 0).is_err());
        assert!(random_separable(MAX_SEPARABLE_LEN + 1, 0).is_err());
    }

    #[test]
    fn uniform_on_s3_and_s4() {
        for (n, support) in [(3usize, 6usize), (4, 22)] {
            let draws = 40_000;
            let mut freq: HashMap<Permutation, u64> = HashMap::new();
            for s in 0..draws {
                *freq.entry(random_separable(n, s).unwrap()).or_insert(0) += 1;
            }
            assert_eq!(freq.len(), support);
            assert!(!freq.contains_key(&p("2413")));
            let obs: Vec<u64> = freq.values().copied().collect();
            let probs = vec![1.0 / support as f64; support];
            let (_, pv) = crate::stats::chi_square_gof(&obs, &probs);
            assert!(pv > 0.001, "n={n} p={pv}");
        }
    }

    #[test]
    fn class_tables() {
        let sizes: Vec<usize> = SeparableClass::ALL.iter().map(|c| c.members().len()).collect();
        assert_eq!(sizes, vec![2, 10, 10, 2]);
        let total: f64 = SeparableClass::ALL
            .iter()
            .map(|c| c.members().len() as f64 * c.probability())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        let classes = SeparableClass::by_index();
        for (k, c) in classes.iter().enumerate() {
            let sigma = Permutation::from_lex_rank(4, k);
            let rc = sigma.reverse().complement();
            assert_eq!(SeparableClass::of(&rc).unwrap(), *c, "{sigma}");
        }
    }

    #[test]
    fn class_examples() {
        assert_eq!(SeparableClass::of(&p("1234")).unwrap(), SeparableClass::Sigma1);
        assert_eq!(SeparableClass::of(&p("2413")).unwrap().probability(), 0.0);
        assert_eq!(SeparableClass::of(&p("2143")).unwrap(), SeparableClass::Sigma3);
        assert_eq!(SeparableClass::of(&p("2143")).unwrap().probability(), 1.0 / 40.0);
        assert!(SeparableClass::of(&p("123")).is_err());
    }

    #[test]
    fn large_length_is_fast_and_valid() {
        let pi = random_separable(MAX_SEPARABLE_LEN, 5).unwrap();
        assert_eq!(pi.len(), MAX_SEPARABLE_LEN);
        assert!(is_separable(&pi));
    }
}
