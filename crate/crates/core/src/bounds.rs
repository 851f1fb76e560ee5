//! Numeric side: the bound `S(n, m)`, its closed forms for m = 2, 3, the
//! sandwich estimate, and the applicability search for torsion divisors.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::coeff::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("closed form gave the non-integer {0}")]
    NonIntegralResult(String),
    #[error("closed form only known for m = 2, 3 (got m = {0})")]
    UnsupportedM(u32),
    #[error("d = {d} > N + 1 = {}: not in the Fano range", n + 1)]
    NotFano { d: u32, n: u64 },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

type Result<T> = std::result::Result<T, BoundsError>;

fn binom(n: u32, k: u32) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `S(n, m) = sum_{l=1}^{n} C(n, l) floor((n - l) / m)`.
#[allow(non_snake_case)]
pub fn sum_S(n: u32, m: u32) -> BigUint {
    assert!(m >= 2, "m >= 2");
    (1..=n).map(|l| binom(n, l) * ((n - l) / m)).sum()
}

const DELTA3: [(i64, i64); 6] = [(1, 3), (2, 3), (2, 3), (-1, 3), (0, 1), (2, 3)];

/// Closed form of `S(n, m)` for m in {2, 3}, evaluated in exact rationals.
#[allow(non_snake_case)]
pub fn closed_form_S(n: u32, m: u32) -> Result<BigUint> {
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let two_pow = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(num_bigint::BigInt::one() << e as usize)
        } else {
            BigRational::new(1.into(), num_bigint::BigInt::one() << (-e) as usize)
        }
    };
    let n_i = n as i64;
    let val = match m {
        2 => q(n_i - 1, 1) * two_pow(n_i - 2) - q(n_i / 2, 1),
        3 => {
            let (a, b) = DELTA3[(n % 6) as usize];
            q(n_i - 2, 3) * two_pow(n_i - 1) - q(n_i, 3) + q(a, b)
        }
        _ => return Err(BoundsError::UnsupportedM(m)),
    };
    if !val.is_integer() || val < BigRational::zero() {
        return Err(BoundsError::NonIntegralResult(val.to_string()));
    }
    Ok(val.to_integer().to_biguint().expect("non-negative"))
}

/// `(floor(n/m) - 1)(2^(n-1) - 1) <= S(n, m) <= floor(n/m)(2^(n-1) - 1)`.
pub fn sandwich_check(n: u32, m: u32) -> bool {
    let s = sum_S(n, m);
    let base = (BigUint::one() << (n - 1) as usize) - 1u32;
    let k = n / m;
    let lower_ok = k == 0 || BigUint::from(k - 1) * &base <= s;
    lower_ok && s <= BigUint::from(k) * &base
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundQuery {
    pub d: u32,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub m: u32,
    pub char_p: u64,
}

impl BoundQuery {
    pub fn new(d: u32, big_n: u64, m: u32, char_p: u64) -> Result<Self> {
        if d < 4 {
            return Err(BoundsError::InvalidQuery(format!("d = {d} < 4")));
        }
        if big_n < 3 {
            return Err(BoundsError::InvalidQuery(format!("N = {big_n} < 3")));
        }
        if m < 2 {
            return Err(BoundsError::InvalidQuery(format!("m = {m} < 2")));
        }
        if char_p != 0 && !is_prime(char_p) {
            return Err(BoundsError::InvalidQuery(format!("{char_p} is not 0 or a prime")));
        }
        if char_p != 0 && u64::from(m) % char_p == 0 {
            return Err(BoundsError::InvalidQuery(format!("m = {m} not invertible in characteristic {char_p}")));
        }
        Ok(Self { d, big_n, m, char_p })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundWitness {
    pub n: u32,
    pub r: u64,
    pub s: u64,
}

fn r_cap(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 2
    }
}

/// Is `(n, r, s)` a witness for `q`?
pub fn is_witness(q: &BoundQuery, w: &BoundWitness) -> bool {
    w.n >= 2
        && w.r <= r_cap(w.n)
        && BigUint::from(w.s) <= sum_S(w.n, q.m)
        && u64::from(w.n).checked_add(w.r).and_then(|x| x.checked_add(w.s)) == Some(q.big_n)
        && q.d >= q.m + w.n
}

/// A witness with maximal `n`, then maximal `r`, if any exists.
pub fn applicable(q: &BoundQuery) -> Option<BoundWitness> {
    let top = q.d.checked_sub(q.m)?;
    (2..=top).rev().find_map(|n| {
        let rest = q.big_n.checked_sub(u64::from(n))?;
        let r = rest.min(r_cap(n));
        let w = BoundWitness { n, r, s: rest - r };
        is_witness(q, &w).then_some(w)
    })
}

/// `max over 2 <= n <= d - m of n + (2^n - 2) + S(n, m)`.
#[allow(non_snake_case)]
pub fn max_N(d: u32, m: u32) -> BigUint {
    (2..=d.saturating_sub(m))
        .map(|n| BigUint::from(n) + ((BigUint::one() << n as usize) - 2u32) + sum_S(n, m))
        .max()
        .unwrap_or_default()
}

/// Numbers that fit in u64 as JSON numbers, larger ones as decimal strings.
fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorReport {
    pub d: u32,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub char_p: u64,
    /// Enumerated m run over 2..=d-2.
    pub m_max: u32,
    pub divisors: Vec<u32>,
    pub witnesses: Vec<BoundWitness>,
    #[serde(serialize_with = "ser_big")]
    pub lcm: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub upper_bound: BigUint,
}

/// Every `m` (coprime to the characteristic) forced to divide the torsion
/// order of a very general hypersurface of degree `d` in dimension `N`.
pub fn divisor_report(d: u32, big_n: u64, char_p: u64) -> Result<DivisorReport> {
    if u64::from(d) > big_n + 1 {
        return Err(BoundsError::NotFano { d, n: big_n });
    }
    let m_max = d.saturating_sub(2);
    let mut divisors = Vec::new();
    let mut witnesses = Vec::new();
    for m in 2..=m_max {
        let Ok(q) = BoundQuery::new(d, big_n, m, char_p) else { continue };
        if let Some(w) = applicable(&q) {
            divisors.push(m);
            witnesses.push(w);
        }
    }
    let lcm = divisors
        .iter()
        .fold(BigUint::one(), |acc, &m| num_integer::Integer::lcm(&acc, &BigUint::from(m)));
    let upper_bound = (1..=d).fold(BigUint::one(), |acc, k| acc * k);
    Ok(DivisorReport { d, big_n, char_p, m_max, divisors, witnesses, lcm, upper_bound })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub d: u32,
    pub m: u32,
    #[serde(rename = "max_N", serialize_with = "ser_big")]
    pub max_n: BigUint,
    pub n: Option<u32>,
    pub r: Option<u64>,
    pub s: Option<u64>,
}

/// One row per `d` in the range: `max_N(d, m)` and the witness attaining it.
pub fn bounds_table(ds: std::ops::RangeInclusive<u32>, m: u32) -> Vec<TableRow> {
    ds.map(|d| {
        let max_n = max_N(d, m);
        let w = max_n
            .to_u64()
            .filter(|&big_n| big_n >= 3 && d >= 4)
            .and_then(|big_n| applicable(&BoundQuery { d, big_n, m, char_p: 0 }));
        TableRow { d, m, max_n, n: w.map(|w| w.n), r: w.map(|w| w.r), s: w.map(|w| w.s) }
    })
    .collect()
}

pub fn table_tsv(rows: &[TableRow]) -> String {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    let mut out = String::from("d\tm\tmax_N\tn\tr\ts\n");
    for row in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            row.d,
            row.m,
            row.max_n,
            opt(row.n.map(|v| v.to_string())),
            opt(row.r.map(|v| v.to_string())),
            opt(row.s.map(|v| v.to_string())),
        ));
    }
    out
}

pub fn table_json(rows: &[TableRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Plain u128 sum with a float-free binomial, as an independent oracle.
    fn s_oracle(n: u32, m: u32) -> u128 {
        let mut total = 0u128;
        let mut c = 1u128;
        for l in 1..=n {
            c = c * u128::from(n - l + 1) / u128::from(l);
            total += c * u128::from((n - l) / m);
        }
        total
    }

    #[test]
    fn sum_examples() {
        assert_eq!(sum_S(2, 2), big(0));
        assert_eq!(sum_S(4, 2), big(10));
        assert_eq!(sum_S(5, 3), big(15));
        assert_eq!(sum_S(6, 2), big(77));
        assert_eq!(sum_S(3, 2), big(3));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_S(4, 2).unwrap(), big(10));
        assert_eq!(closed_form_S(5, 3).unwrap(), big(15));
        assert_eq!(closed_form_S(2, 2).unwrap(), big(0));
        assert_eq!(closed_form_S(4, 5), Err(BoundsError::UnsupportedM(5)));
    }

    #[test]
    fn closed_form_matches_sum() {
        for n in 1..=40 {
            for m in [2, 3] {
                let got = closed_form_S(n, m).unwrap();
                assert_eq!(got, sum_S(n, m), "n={n} m={m}");
                assert_eq!(got, BigUint::from(s_oracle(n, m)));
            }
        }
    }

    #[test]
    fn sandwich_range() {
        assert!(sandwich_check(6, 2));
        assert!(sandwich_check(2, 2));
        assert!(sandwich_check(5, 3));
        for n in 2..=64 {
            for m in 2..=12 {
                assert!(sandwich_check(n, m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn applicable_examples() {
        let q = |d, n, m| BoundQuery::new(d, n, m, 0).unwrap();
        let w = |n, r, s| Some(BoundWitness { n, r, s });
        assert_eq!(applicable(&q(5, 10, 2)), w(3, 6, 1));
        assert_eq!(applicable(&q(5, 12, 2)), w(3, 6, 3));
        assert_eq!(applicable(&q(5, 13, 2)), None);
        assert_eq!(applicable(&q(5, 4, 3)), w(2, 2, 0));
        assert_eq!(applicable(&q(5, 5, 3)), None);
        assert!(BoundQuery::new(5, 10, 2, 2).is_err());
        assert!(BoundQuery::new(3, 10, 2, 0).is_err());
    }

    #[test]
    fn max_n_examples() {
        assert_eq!(max_N(5, 2), big(12));
        assert_eq!(max_N(4, 2), big(4));
        assert_eq!(max_N(6, 2), big(28));
        for d in 5..=16u32 {
            let t2 = (u64::from(d) + 1) << (d - 4);
            assert!(max_N(d, 2) >= big(t2), "d={d}");
            let t3 = ((u64::from(d) + 1) << (d - 4)) / 3;
            assert!(max_N(d, 3) >= big(t3), "d={d}");
        }
    }

    #[test]
    fn divisor_examples() {
        let r = divisor_report(5, 10, 0).unwrap();
        assert_eq!(r.divisors, vec![2]);
        assert_eq!(r.lcm, big(2));
        assert_eq!(r.upper_bound, big(120));
        assert!(!divisor_report(5, 10, 2).unwrap().divisors.contains(&2));
        assert_eq!(divisor_report(7, 4, 0).unwrap_err(), BoundsError::NotFano { d: 7, n: 4 });
        for m in 2..=5 {
            let q = BoundQuery::new(7, 4, m, 0).unwrap();
            let w = applicable(&q).unwrap();
            assert!(is_witness(&q, &w));
        }
        let q5 = BoundQuery::new(7, 4, 5, 0).unwrap();
        assert_eq!(applicable(&q5), Some(BoundWitness { n: 2, r: 2, s: 0 }));
    }

    #[test]
    fn table_output() {
        let rows = bounds_table(5..=6, 2);
        let tsv = table_tsv(&rows);
        assert_eq!(tsv, "d\tm\tmax_N\tn\tr\ts\n5\t2\t12\t3\t6\t3\n6\t2\t28\t4\t14\t10\n");
        let json: serde_json::Value = serde_json::from_str(&table_json(&rows)).unwrap();
        assert_eq!(json[0]["max_N"], serde_json::json!(12));
    }

    proptest! {
        #[test]
        fn applicable_matches_exhaustive(d in 4u32..=9, big_n in 3u64..=80, m in 2u32..=5) {
            let q = BoundQuery::new(d, big_n, m, 0).unwrap();
            let mut exists = false;
            for n in 2..=d.saturating_sub(m) {
                for r in 0..=r_cap(n) {
                    let Some(s) = big_n.checked_sub(u64::from(n) + r) else { continue };
                    if u128::from(s) <= s_oracle(n, m) {
                        exists = true;
                    }
                }
            }
            let got = applicable(&q);
            prop_assert_eq!(got.is_some(), exists);
            if let Some(w) = got {
                prop_assert!(is_witness(&q, &w));
            }
        }
    }
}
