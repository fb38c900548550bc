//! Log-factorial table. Degrees are capped at `MAX_DEGREE`, so arguments stay
//! small, but ratios of factorials are still formed in log space to avoid the
//! precision loss of dividing large doubles.

use std::sync::OnceLock;

const TABLE_LEN: usize = 256;

fn table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        for k in 2..TABLE_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

/// ln(n!) for n < 256; panics beyond the table (unreachable below the degree cap).
pub(crate) fn ln_factorial(n: i64) -> f64 {
    assert!((0..TABLE_LEN as i64).contains(&n), "factorial argument {n} out of table range");
    table()[n as usize]
}

/// n! in double precision (exact for n <= 20).
#[cfg(test)]
pub(crate) fn factorial(n: i64) -> f64 {
    assert!(n >= 0);
    let mut p = 1.0;
    for k in 2..=n {
        p *= k as f64;
    }
    p
}

/// Binomial coefficient in double precision.
pub(crate) fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}
