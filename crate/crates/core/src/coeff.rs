//! Exact coefficient arithmetic: the prime field GF(p) and Laurent
//! polynomials over GF(p) in a fixed set of named parameters.
//!
//! Parameters stand in for the transcendental constants of the
//! constructions (`pi`, `lam`, `rho`, `t`). Only parameters flagged
//! invertible may carry negative exponents; by default that is `lam` alone.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("modulus or parameter space mismatch")]
    ModulusMismatch,
    #[error("parameter `{0}` is flagged invertible and may not be assigned 0")]
    InvertibleAssignedZero(String),
    #[error("parameter `{0}` has no assigned value")]
    UnassignedParameter(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("negative exponent on non-invertible parameter `{0}`")]
    NegativeExponent(String),
}

/// Deterministic trial-division primality test; moduli here are small.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse by the extended Euclidean algorithm. `a` must be reduced mod `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(p as i128) as u64)
}

/// Reduce a signed integer into `[0, p)`.
pub fn reduce_i64(v: i64, p: u64) -> u64 {
    (v as i128).rem_euclid(p as i128) as u64
}

/// An element of GF(p), always stored fully reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u64,
    modulus: u64,
}

impl FieldElem {
    /// Builds `value mod p`, checking that `p` is prime.
    pub fn new(value: i64, modulus: u64) -> Result<Self, CoeffError> {
        if !is_prime(modulus) {
            return Err(CoeffError::NotPrime(modulus));
        }
        Ok(Self::from_reduced(reduce_i64(value, modulus), modulus))
    }

    pub(crate) fn from_reduced(value: u64, modulus: u64) -> Self {
        debug_assert!(value < modulus);
        FieldElem { value, modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.modulus, other.modulus, "field elements over different primes");
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl std::ops::Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: Self) -> Self {
        self.check(&rhs);
        Self::from_reduced(add_mod(self.value, rhs.value, self.modulus), self.modulus)
    }
}

impl std::ops::Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: Self) -> Self {
        self.check(&rhs);
        Self::from_reduced(sub_mod(self.value, rhs.value, self.modulus), self.modulus)
    }
}

impl std::ops::Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: Self) -> Self {
        self.check(&rhs);
        Self::from_reduced(mul_mod(self.value, rhs.value, self.modulus), self.modulus)
    }
}

impl std::ops::Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> Self {
        Self::from_reduced(sub_mod(0, self.value, self.modulus), self.modulus)
    }
}

/// Multiplicative inverse in GF(p).
pub fn ff_inv(a: FieldElem) -> Result<FieldElem, CoeffError> {
    inv_mod(a.value, a.modulus)
        .map(|v| FieldElem::from_reduced(v, a.modulus))
        .ok_or(CoeffError::ZeroInverse)
}

/// Names of the transcendental parameters and which of them are units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSpace {
    names: Vec<String>,
    invertible: Vec<bool>,
}

impl ParamSpace {
    pub fn new<S: AsRef<str>>(params: &[(S, bool)]) -> Self {
        ParamSpace {
            names: params.iter().map(|(n, _)| n.as_ref().to_string()).collect(),
            invertible: params.iter().map(|(_, inv)| *inv).collect(),
        }
    }

    /// `pi`, `lam`, `rho`, `t`, with `lam` invertible.
    pub fn standard() -> Self {
        Self::new(&[("pi", false), ("lam", true), ("rho", false), ("t", false)])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_invertible(&self, idx: usize) -> bool {
        self.invertible[idx]
    }
}

/// Modulus plus parameter space; shared by every coefficient of a computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffRing {
    p: u64,
    params: ParamSpace,
}

impl CoeffRing {
    pub fn new(p: u64, params: ParamSpace) -> Result<Arc<Self>, CoeffError> {
        if !is_prime(p) {
            return Err(CoeffError::NotPrime(p));
        }
        Ok(Arc::new(CoeffRing { p, params }))
    }

    pub fn standard(p: u64) -> Result<Arc<Self>, CoeffError> {
        Self::new(p, ParamSpace::standard())
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn params(&self) -> &ParamSpace {
        &self.params
    }

    pub fn elem(&self, v: i64) -> FieldElem {
        FieldElem::from_reduced(reduce_i64(v, self.p), self.p)
    }
}

pub(crate) fn same_ring(a: &Arc<CoeffRing>, b: &Arc<CoeffRing>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Exponent vector over the parameter space.
///
/// Ordering: descending total degree, then descending lexicographic, so the
/// natural `BTreeMap` iteration order is the canonical display order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamMono(pub Vec<i32>);

impl ParamMono {
    fn total(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }
}

impl Ord for ParamMono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .total()
            .cmp(&self.total())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for ParamMono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Values for some or all parameters of a [`ParamSpace`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamAssignment {
    values: BTreeMap<String, u64>,
}

impl ParamAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: u64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: u64) {
        self.values.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.values.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Resolve against a parameter space, checking the invertibility gate.
    /// Unassigned parameters stay `None`.
    pub(crate) fn resolve(&self, ring: &CoeffRing) -> Result<Vec<Option<u64>>, CoeffError> {
        let space = ring.params();
        let mut out = vec![None; space.len()];
        for (name, &v) in &self.values {
            let idx = space
                .index_of(name)
                .ok_or_else(|| CoeffError::UnknownParameter(name.clone()))?;
            let v = v % ring.modulus();
            if v == 0 && space.is_invertible(idx) {
                return Err(CoeffError::InvertibleAssignedZero(name.clone()));
            }
            out[idx] = Some(v);
        }
        Ok(out)
    }
}

/// A Laurent polynomial over GF(p) in the parameters of a [`CoeffRing`].
#[derive(Clone, Debug)]
pub struct ParamCoeff {
    ring: Arc<CoeffRing>,
    terms: BTreeMap<ParamMono, u64>,
}

impl PartialEq for ParamCoeff {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for ParamCoeff {}

impl ParamCoeff {
    pub fn zero(ring: &Arc<CoeffRing>) -> Self {
        ParamCoeff {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<CoeffRing>, c: i64) -> Self {
        let v = reduce_i64(c, ring.modulus());
        let mut out = Self::zero(ring);
        if v != 0 {
            out.terms.insert(ParamMono(vec![0; ring.params().len()]), v);
        }
        out
    }

    pub fn one(ring: &Arc<CoeffRing>) -> Self {
        Self::constant(ring, 1)
    }

    /// `c * prod(param_i^{e_i})`.
    pub fn monomial(ring: &Arc<CoeffRing>, exps: Vec<i32>, c: i64) -> Result<Self, CoeffError> {
        assert_eq!(exps.len(), ring.params().len());
        for (i, &e) in exps.iter().enumerate() {
            if e < 0 && !ring.params().is_invertible(i) {
                return Err(CoeffError::NegativeExponent(ring.params().names()[i].clone()));
            }
        }
        let v = reduce_i64(c, ring.modulus());
        let mut out = Self::zero(ring);
        if v != 0 {
            out.terms.insert(ParamMono(exps), v);
        }
        Ok(out)
    }

    /// The parameter `name` raised to `exp`.
    pub fn param_pow(ring: &Arc<CoeffRing>, name: &str, exp: i32) -> Result<Self, CoeffError> {
        let idx = ring
            .params()
            .index_of(name)
            .ok_or_else(|| CoeffError::UnknownParameter(name.to_string()))?;
        let mut exps = vec![0; ring.params().len()];
        exps[idx] = exp;
        Self::monomial(ring, exps, 1)
    }

    pub fn param(ring: &Arc<CoeffRing>, name: &str) -> Result<Self, CoeffError> {
        Self::param_pow(ring, name, 1)
    }

    pub fn ring(&self) -> &Arc<CoeffRing> {
        &self.ring
    }

    pub fn modulus(&self) -> u64 {
        self.ring.modulus()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value() == Some(1)
    }

    /// `Some(c)` when the coefficient involves no parameter.
    pub fn constant_value(&self) -> Option<u64> {
        match self.terms.len() {
            0 => Some(0),
            1 => {
                let (m, &c) = self.terms.iter().next().unwrap();
                m.0.iter().all(|&e| e == 0).then_some(c)
            }
            _ => None,
        }
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&ParamMono, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert_add(&mut self, mono: ParamMono, c: u64) {
        let p = self.ring.modulus();
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = add_mod(*o.get(), c, p);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, CoeffError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(CoeffError::ModulusMismatch);
        }
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.insert_add(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, CoeffError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(CoeffError::ModulusMismatch);
        }
        let p = self.ring.modulus();
        let mut out = Self::zero(&self.ring);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let mono = ParamMono(ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect());
                out.insert_add(mono, mul_mod(ca, cb, p));
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let p = self.ring.modulus();
        ParamCoeff {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), p - c)).collect(),
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.ring.modulus();
        let c = c % p;
        if c == 0 {
            return Self::zero(&self.ring);
        }
        ParamCoeff {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, &v)| (m.clone(), mul_mod(v, c, p))).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Most negative exponent of `param` across the terms (0 if none negative).
    pub fn min_exponent(&self, idx: usize) -> i32 {
        self.terms.keys().map(|m| m.0[idx]).min().unwrap_or(0).min(0)
    }

    /// Multiply by `param^k`; `k` may be negative only for invertible parameters
    /// unless the result keeps all exponents non-negative.
    pub fn shift_param(&self, idx: usize, k: i32) -> Result<Self, CoeffError> {
        let invertible = self.ring.params().is_invertible(idx);
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            let mut e = m.0.clone();
            e[idx] += k;
            if e[idx] < 0 && !invertible {
                return Err(CoeffError::NegativeExponent(self.ring.params().names()[idx].clone()));
            }
            terms.insert(ParamMono(e), c);
        }
        Ok(ParamCoeff {
            ring: self.ring.clone(),
            terms,
        })
    }

    /// Formal derivative with respect to a parameter.
    pub fn derivative(&self, idx: usize) -> Self {
        let p = self.ring.modulus();
        let mut out = Self::zero(&self.ring);
        for (m, &c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] -= 1;
            out.insert_add(ParamMono(exps), mul_mod(c, reduce_i64(e as i64, p), p));
        }
        out
    }

    /// Substitute values for some parameters, leaving the rest symbolic.
    /// Setting an invertible parameter to zero is refused.
    pub fn partial_specialize(&self, values: &[Option<u64>]) -> Result<Self, CoeffError> {
        let p = self.ring.modulus();
        let mut out = Self::zero(&self.ring);
        for (m, &c) in &self.terms {
            let mut coef = c;
            let mut exps = m.0.clone();
            for (i, v) in values.iter().enumerate() {
                let Some(v) = *v else { continue };
                let e = exps[i];
                if e == 0 {
                    continue;
                }
                let factor = if e > 0 {
                    pow_mod(v, e as u64, p)
                } else {
                    let inv = inv_mod(v, p).ok_or_else(|| {
                        CoeffError::InvertibleAssignedZero(self.ring.params().names()[i].clone())
                    })?;
                    pow_mod(inv, (-e) as u64, p)
                };
                coef = mul_mod(coef, factor, p);
                exps[i] = 0;
            }
            out.insert_add(ParamMono(exps), coef);
        }
        Ok(out)
    }

    /// Evaluate at a total assignment.
    pub fn specialize(&self, assignment: &ParamAssignment) -> Result<FieldElem, CoeffError> {
        let values = assignment.resolve(&self.ring)?;
        self.specialize_resolved(&values)
    }

    pub(crate) fn specialize_resolved(&self, values: &[Option<u64>]) -> Result<FieldElem, CoeffError> {
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e != 0 && values[i].is_none() {
                    return Err(CoeffError::UnassignedParameter(
                        self.ring.params().names()[i].clone(),
                    ));
                }
            }
        }
        let reduced = self.partial_specialize(values)?;
        Ok(FieldElem::from_reduced(
            reduced.constant_value().expect("fully specialized"),
            self.ring.modulus(),
        ))
    }
}

/// Specialize a coefficient at an assignment of parameter values.
pub fn param_specialize(c: &ParamCoeff, assignment: &ParamAssignment) -> Result<FieldElem, CoeffError> {
    c.specialize(assignment)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
}

/// Ring operation on two coefficients (`Neg` ignores `b`).
pub fn param_arith(a: &ParamCoeff, b: &ParamCoeff, op: ArithOp) -> Result<ParamCoeff, CoeffError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Neg => Ok(a.neg()),
    }
}

impl std::ops::Add for &ParamCoeff {
    type Output = ParamCoeff;
    fn add(self, rhs: Self) -> ParamCoeff {
        self.try_add(rhs).expect("coefficient ring mismatch")
    }
}

impl std::ops::Mul for &ParamCoeff {
    type Output = ParamCoeff;
    fn mul(self, rhs: Self) -> ParamCoeff {
        self.try_mul(rhs).expect("coefficient ring mismatch")
    }
}

impl std::ops::Neg for &ParamCoeff {
    type Output = ParamCoeff;
    fn neg(self) -> ParamCoeff {
        ParamCoeff::neg(self)
    }
}

impl fmt::Display for ParamCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.ring.params().names();
        for (k, (m, &c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let factors: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], e)
                    }
                })
                .collect();
            match (c, factors.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", factors.join("*"))?,
                _ => write!(f, "{c}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}
