//! Binomial coefficients, hypergeometric terms and bounded-composition
//! counts.
//!
//! Out-of-range binomials (`k < 0`, `k > n`, `n < 0`) are zero everywhere in
//! this module, so hypergeometric terms with impossible draws vanish without
//! special-casing at the call sites.

use alloc::vec;

/// Exact `C(n, k)`, or `None` if it does not fit in a `u128`.
pub fn binomial_exact(n: i64, k: i64) -> Option<u128> {
    if n < 0 || k < 0 || k > n {
        return Some(0);
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for j in 0..k {
        // acc * (n - j) / (j + 1) stays integral at every step.
        let g = gcd(acc, j + 1);
        let num = (n - j) / ((j + 1) / g);
        acc = (acc / g).checked_mul(num)?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Natural log of `C(n, k)`; `-inf` when the coefficient is zero.
pub fn ln_binomial(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// `C(n, k)` as a real number: exact for `n <= 64`, log-space beyond.
pub fn binomial(n: i64, k: i64) -> f64 {
    if n <= 64 {
        binomial_exact(n, k).expect("C(64, k) fits in u128") as f64
    } else {
        libm::exp(ln_binomial(n, k))
    }
}

/// Probability of `hits` marked items when drawing `draws` items without
/// replacement from `population` items of which `marked` are marked.
pub fn hypergeometric_pmf(population: i64, marked: i64, draws: i64, hits: i64) -> f64 {
    if draws < 0 || draws > population {
        return 0.0;
    }
    let num_a = binomial_exact(marked, hits);
    let num_b = binomial_exact(population - marked, draws - hits);
    let den = binomial_exact(population, draws);
    match (num_a, num_b, den) {
        (Some(0), _, _) | (_, Some(0), _) => 0.0,
        (Some(a), Some(b), Some(d)) => match a.checked_mul(b) {
            Some(ab) => ratio(ab, d),
            None => (a as f64) * (b as f64) / (d as f64),
        },
        _ => libm::exp(
            ln_binomial(marked, hits) + ln_binomial(population - marked, draws - hits)
                - ln_binomial(population, draws),
        ),
    }
}

fn ratio(num: u128, den: u128) -> f64 {
    if num == den {
        return 1.0;
    }
    let g = gcd(num, den);
    (num / g) as f64 / (den / g) as f64
}

/// Number of integer vectors `v` with `0 <= v_j <= caps[j]` and `sum v = total`.
/// Saturates at `u128::MAX`.
pub fn count_bounded_compositions(total: usize, caps: &[usize]) -> u128 {
    // ways[t] = number of prefixes summing to t; windowed prefix sums per part.
    let mut ways = vec![0u128; total + 1];
    ways[0] = 1;
    for &cap in caps {
        let mut prefix = vec![0u128; total + 2];
        for t in 0..=total {
            prefix[t + 1] = prefix[t].saturating_add(ways[t]);
        }
        for t in 0..=total {
            let lo = t.saturating_sub(cap);
            ways[t] = prefix[t + 1].saturating_sub(prefix[lo]);
        }
    }
    ways[total]
}

/// Inclusion–exclusion count of vectors of length `parts` with entries in
/// `0..=cap` summing to `total`:
/// `sum_j (-1)^j C(parts, j) C(total - j(cap+1) + parts - 1, parts - 1)`.
/// `None` if an intermediate term overflows.
pub fn count_uniform_compositions(total: usize, parts: usize, cap: usize) -> Option<u128> {
    if parts == 0 {
        return Some(u128::from(total == 0));
    }
    let mut positive: u128 = 0;
    let mut negative: u128 = 0;
    let mut j = 0usize;
    while j <= parts && j * (cap + 1) <= total {
        let rest = (total - j * (cap + 1) + parts - 1) as i64;
        let term = binomial_exact(parts as i64, j as i64)?
            .checked_mul(binomial_exact(rest, parts as i64 - 1)?)?;
        if j.is_multiple_of(2) {
            positive = positive.checked_add(term)?;
        } else {
            negative = negative.checked_add(term)?;
        }
        j += 1;
    }
    positive.checked_sub(negative)
}
