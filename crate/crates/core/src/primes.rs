//! Prime tables and the two asymptotic formulas for the `n`-th prime:
//! `p_n ~ n log n` and Cesàro's four-term expansion. Logarithms are
//! natural throughout.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// Sieve memory guard.
pub const MAX_SIEVE_LIMIT: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn count(&self) -> usize {
        self.primes.len()
    }

    /// `p_n` for 1-based `n`, if the table reaches it.
    pub fn nth(&self, n: usize) -> Option<u64> {
        n.checked_sub(1)
            .and_then(|i| self.primes.get(i))
            .map(|&p| p as u64)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|&p| p as u64)
    }
}

/// All primes `<= limit` (odd-only Eratosthenes sieve, one bit per odd
/// number).
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::LimitTooLarge {
            limit,
            max: MAX_SIEVE_LIMIT,
        });
    }
    if limit < 2 {
        return Err(Error::OutOfDomain {
            what: "sieve limit",
            value: limit as f64,
            domain: "[2, 1e9]".into(),
        });
    }

    // bit i <-> odd number 2i + 1; set = composite
    let odd_count = limit.div_ceil(2) as usize;
    let mut composite = vec![0u64; odd_count.div_ceil(64)];
    composite[0] |= 1; // 1 is not prime
    let mut i = 1usize;
    while {
        let p = 2 * i as u64 + 1;
        p * p <= limit
    } {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < odd_count {
                composite[j / 64] |= 1 << (j % 64);
                j += p;
            }
        }
        i += 1;
    }

    let estimate = (limit as f64 / (limit as f64).ln().max(1.0) * 1.3) as usize + 8;
    let mut primes = Vec::with_capacity(estimate);
    primes.push(2u32);
    for (w, &word) in composite.iter().enumerate() {
        let mut free = !word;
        while free != 0 {
            let b = free.trailing_zeros() as usize;
            let idx = w * 64 + b;
            if idx >= odd_count {
                break;
            }
            primes.push((2 * idx + 1) as u32);
            free &= free - 1;
        }
    }
    Ok(PrimeTable { limit, primes })
}

/// Sieve bound guaranteed to contain `p_n`: `n (log n + log log n)` for
/// `n >= 6` (Rosser's bound) plus a small margin.
fn nth_prime_bound(n: usize) -> u64 {
    if n < 6 {
        return 13;
    }
    let x = n as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 16
}

/// A table holding at least the first `n` primes.
pub fn first_primes(n: usize) -> Result<PrimeTable> {
    let mut limit = nth_prime_bound(n.max(1));
    loop {
        let t = sieve(limit.min(MAX_SIEVE_LIMIT))?;
        if t.count() >= n {
            return Ok(t);
        }
        if limit >= MAX_SIEVE_LIMIT {
            return Err(Error::LimitTooLarge {
                limit: limit.saturating_mul(2),
                max: MAX_SIEVE_LIMIT,
            });
        }
        limit = limit.saturating_mul(2);
    }
}

pub fn nth_prime(n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("prime index starts at 1".into()));
    }
    Ok(first_primes(n)?.nth(n).expect("table holds n primes"))
}

/// `n log n + n log log n - n + n (log log n - 2)/log n`. The expansion
/// continues; only these four terms are evaluated.
pub fn cesaro(n: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::OutOfDomain {
            what: "cesaro index",
            value: n as f64,
            domain: "n >= 3".into(),
        });
    }
    let x = n as f64;
    let l = x.ln();
    let ll = l.ln();
    Ok(x * l + x * ll - x + x * (ll - 2.0) / l)
}

/// `n log n`.
pub fn pnt_asymptotic(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::OutOfDomain {
            what: "pnt index",
            value: n as f64,
            domain: "n >= 2".into(),
        });
    }
    let x = n as f64;
    Ok(x * x.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub n: u64,
    pub p: u64,
    pub n_log_n: Option<f64>,
    pub cesaro: Option<f64>,
}

impl AsymptoticRow {
    pub fn rel_err_pnt(&self) -> Option<f64> {
        self.n_log_n
            .map(|a| (a - self.p as f64).abs() / self.p as f64)
    }

    pub fn rel_err_cesaro(&self) -> Option<f64> {
        self.cesaro
            .map(|a| (a - self.p as f64).abs() / self.p as f64)
    }
}

pub fn asymptotic_rows(table: &PrimeTable, ns: &[u64]) -> Vec<AsymptoticRow> {
    ns.iter()
        .filter_map(|&n| {
            table.nth(n as usize).map(|p| AsymptoticRow {
                n,
                p,
                n_log_n: pnt_asymptotic(n).ok(),
                cesaro: cesaro(n).ok(),
            })
        })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_asymptotics_csv<W: Write>(rows: &[AsymptoticRow], mut w: W) -> io::Result<()> {
    writeln!(w, "n,p_n,n_log_n,cesaro,rel_err_n_log_n,rel_err_cesaro")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.n,
            r.p,
            opt(r.n_log_n),
            opt(r.cesaro),
            opt(r.rel_err_pnt()),
            opt(r.rel_err_cesaro())
        )?;
    }
    Ok(())
}
