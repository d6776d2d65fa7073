//! Combinatorial helpers.
//!
//! Everything that can overflow a 64-bit factorial goes through log-factorials
//! or exact 128-bit integer arithmetic.

use statrs::function::factorial::ln_factorial;

/// Exact binomial coefficient. Zero when `k > n`.
pub fn binomial_exact(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Binomial coefficient as a float; zero outside the valid range.
pub fn binomial(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return 0.0;
    }
    if n <= 120 {
        binomial_exact(n as u64, k as u64) as f64
    } else {
        ln_binomial(n as u64, k as u64).exp()
    }
}

pub fn ln_fact(n: u64) -> f64 {
    ln_factorial(n)
}

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_fact(n) - ln_fact(k) - ln_fact(n - k)
}

/// `(a+b+c+d)! / (a! b! c! d!)` as a product of binomials.
pub fn multinomial4(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let n = (a + b + c + d) as i64;
    binomial(n, a as i64) * binomial(n - a as i64, b as i64) * binomial((c + d) as i64, c as i64)
}

/// Dimension of the permutation-symmetric operator space, `binom(N+3, 3)`.
pub fn sym_dimension(n: usize) -> usize {
    binomial_exact(n as u64 + 3, 3) as usize
}

/// `sum_k a_k b_k` with error-free products and Neumaier accumulation.
pub fn dot_compensated(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut add = |v: f64| {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    };
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        add(p);
        add(x.mul_add(y, -p));
    }
    sum + comp
}

/// `sum_b binom(N - n, nz - b) binom(n, b) (-1)^b`, the weight of the
/// `(n_z, 0, 0)` element on a configuration with `n` spins down.
pub fn down_count_kernel(big_n: usize, n: usize, nz: usize) -> f64 {
    if big_n <= 120 {
        let mut acc: i128 = 0;
        for b in 0..=n.min(nz) {
            if nz - b > big_n - n {
                continue;
            }
            let term = (binomial_exact((big_n - n) as u64, (nz - b) as u64) * binomial_exact(n as u64, b as u64)) as i128;
            acc += if b % 2 == 0 { term } else { -term };
        }
        acc as f64
    } else {
        (0..=n.min(nz))
            .map(|b| {
                let s = if b % 2 == 0 { 1.0 } else { -1.0 };
                s * binomial((big_n - n) as i64, (nz - b) as i64) * binomial(n as i64, b as i64)
            })
            .sum()
    }
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_dot_recovers_cancellation() {
        let a = [1e16, 1.0, -1e16];
        let b = [1.0, 1.0, 1.0];
        assert_eq!(dot_compensated(&a, &b), 1.0);
        // (1 + 1)^(N - n) (1 - 1)^n summed over n_z vanishes for n > 0
        for n in 1..=48 {
            let total: f64 = (0..=48).map(|nz| down_count_kernel(48, n, nz)).sum();
            assert_eq!(total, 0.0);
        }
        assert_eq!(down_count_kernel(4, 0, 2), 6.0);
    }

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial_exact(48, 24), 32_247_603_683_100);
        assert_eq!(binomial_exact(100, 50), 100_891_344_545_564_193_334_812_497_256);
        assert_eq!(binomial_exact(3, 5), 0);
        assert_eq!(binomial(5, -1), 0.0);
    }

    #[test]
    fn sym_dimension_values() {
        assert_eq!(sym_dimension(1), 4);
        assert_eq!(sym_dimension(48), 20_825);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s = neumaier_sum([1e16, 1.0, -1e16]);
        assert_eq!(s, 1.0);
    }
}
