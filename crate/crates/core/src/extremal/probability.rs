use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{ratio_to_f64, to_f64, Rational, Q};

pub const DEFAULT_PRECISION: f64 = 1e-15;

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Outcome of a floating-point comparison carried out at a stated precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict3 {
    True,
    False,
    WithinPrecision,
}

impl Verdict3 {
    /// `lhs >= rhs` up to `precision`.
    pub fn at_least(lhs: f64, rhs: f64, precision: f64) -> Self {
        if lhs >= rhs + precision {
            Verdict3::True
        } else if lhs < rhs - precision {
            Verdict3::False
        } else {
            Verdict3::WithinPrecision
        }
    }

    pub fn is_false(self) -> bool {
        self == Verdict3::False
    }
}

/// `P[Bin(tn-1, 1/n) < t]` as `(numerator, n^(tn-1))`.
pub fn binomial_tail_below(n: usize, t: usize) -> (BigUint, BigUint) {
    assert!(n >= 2 && t >= 1);
    let big_n = t * n - 1;
    // Σ_{j<t} C(N,j)(n-1)^(N-j) = (n-1)^(N-t+1) Σ_{j<t} C(N,j)(n-1)^(t-1-j)
    let mut inner = BigUint::zero();
    let mut c = BigUint::one();
    let nm1 = BigUint::from(n - 1);
    let mut pows = vec![BigUint::one(); t];
    for e in 1..t {
        pows[e] = &pows[e - 1] * &nm1;
    }
    for j in 0..t {
        inner += &c * &pows[t - 1 - j];
        c = c * BigUint::from(big_n - j) / BigUint::from(j + 1);
    }
    let num = nm1.pow((big_n + 1 - t) as u32) * inner;
    (num, BigUint::from(n).pow(big_n as u32))
}

/// `1/e - 1/(2 sqrt(n(n-1)))`.
pub fn qn_bound(n: usize) -> f64 {
    (-1f64).exp() - 1.0 / (2.0 * ((n * (n - 1)) as f64).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct QnReport {
    pub n: usize,
    pub t_max: usize,
    /// `min_{t <= t_max} P[Bin(tn-1, 1/n) < t]`.
    pub q_n_estimate: f64,
    pub argmin_t: usize,
    /// The `t = 1` term, `(1 - 1/n)^(n-1)`, exactly.
    pub first_term: Q,
    pub bound: f64,
    pub above_bound: Verdict3,
    /// `q_n_estimate - (1 - 1/n)^(n-1)`; reported, not asserted.
    pub conjecture_gap: f64,
    pub precision: f64,
}

pub fn binomial_qn(n: usize, t_max: usize, precision: f64) -> Result<QnReport> {
    if n < 2 || t_max < 1 {
        return Err(Error::Precondition(format!("need n ≥ 2 and t_max ≥ 1, got n = {n}, t_max = {t_max}")));
    }
    let mut best: Option<(usize, BigUint, BigUint)> = None;
    for t in 1..=t_max {
        let (num, den) = binomial_tail_below(n, t);
        let better = match &best {
            None => true,
            // num/den < bn/bd  ⟺  num·bd < bn·den
            Some((_, bn, bd)) => &num * bd < bn * &den,
        };
        if better {
            best = Some((t, num, den));
        }
    }
    let (argmin_t, num, den) = best.expect("t_max ≥ 1");
    let q = ratio_to_f64(num, den);
    let (n1, d1) = binomial_tail_below(n, 1);
    let first = Rational::new(BigInt::from(n1), BigInt::from(d1));
    let bound = qn_bound(n);
    Ok(QnReport {
        n,
        t_max,
        q_n_estimate: q,
        argmin_t,
        conjecture_gap: q - to_f64(&first),
        first_term: Q(first),
        bound,
        above_bound: Verdict3::at_least(q, bound, precision),
        precision,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PoissonReport {
    pub lambda: Q,
    pub value: f64,
    pub above_inverse_e: Verdict3,
    pub precision: f64,
}

/// Largest `λ` accepted by [`poisson_below_mean`]; the sum has `⌊λ⌋ + 1` terms.
const POISSON_LAMBDA_LIMIT: f64 = 1e8;

/// `P[Poisson(λ) <= λ]`, summed in log space.
pub fn poisson_below_mean(lambda: &Rational, precision: f64) -> Result<PoissonReport> {
    if *lambda <= Rational::zero() {
        return Err(Error::Precondition(format!("λ must be positive, got {lambda}")));
    }
    let lam = to_f64(lambda);
    if lam > POISSON_LAMBDA_LIMIT {
        return Err(Error::budget("Poisson terms", lam, POISSON_LAMBDA_LIMIT));
    }
    let top = lambda.floor().to_integer();
    let top: u64 = top.try_into().unwrap_or(0);
    // log of the j-th term: -λ + j ln λ - ln j!
    let ln_lam = lam.ln();
    let mut logs = Vec::with_capacity(top as usize + 1);
    let mut ln_fact = 0.0f64;
    for j in 0..=top {
        if j > 0 {
            ln_fact += (j as f64).ln();
        }
        logs.push(-lam + j as f64 * ln_lam - ln_fact);
    }
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Ascending-magnitude summation keeps the rounding error small.
    let mut terms: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
    terms.sort_by(|a, b| a.total_cmp(b));
    let value = terms.iter().sum::<f64>() * peak.exp();
    Ok(PoissonReport {
        lambda: Q(lambda.clone()),
        value,
        above_inverse_e: Verdict3::at_least(value, (-1f64).exp(), precision),
        precision,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma9Report {
    pub n: usize,
    pub k: usize,
    /// `C(m,k) - C(m-n+1,k)` with `m = (k+1)n`.
    pub lhs: String,
    /// `C(kn-1,k)`.
    pub rhs: String,
    pub holds: bool,
    /// Both ratio products match the binomial ratios exactly.
    pub products_match: bool,
    /// At `k = 1` the ratios sum to exactly 1.
    pub equality_at_k1: bool,
}

fn ratio_product(n: usize, k: usize, from: usize) -> Rational {
    (from..=n).fold(Rational::one(), |acc, i| {
        acc * Rational::new(BigInt::from(k * n + i - k), BigInt::from(k * n + i))
    })
}

fn binomial_ratio(a: usize, b: usize, k: usize) -> Rational {
    Rational::new(BigInt::from(binomial(a, k)), BigInt::from(binomial(b, k)))
}

/// Checks `C(m,k) - C(m-n+1,k) >= C(kn-1,k)` for `m = (k+1)n`, the product
/// forms of the two ratios, and the equality case `k = 1`.
pub fn lemma9_check(n: usize, k: usize) -> Result<Lemma9Report> {
    if n < 2 || k < 1 {
        return Err(Error::Precondition(format!("need n ≥ 2 and k ≥ 1, got n = {n}, k = {k}")));
    }
    let m = (k + 1) * n;
    let lhs = binomial(m, k) - binomial(m - n + 1, k);
    let rhs = binomial(k * n - 1, k);
    let first = binomial_ratio(k * n - 1, k * n + n, k);
    let second = binomial_ratio(k * n + 1, k * n + n, k);
    let products_match = first == ratio_product(n, k, 0) && second == ratio_product(n, k, 2);
    let at_one = binomial_ratio(n - 1, 2 * n, 1) + binomial_ratio(n + 1, 2 * n, 1);
    Ok(Lemma9Report {
        n,
        k,
        holds: lhs >= rhs && first + second <= Rational::one(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        products_match,
        equality_at_k1: at_one == Rational::one(),
    })
}
