//! Sparse multivariate polynomials with parameter coefficients.
//!
//! Exponent vectors are dense per universe; terms live in a `BTreeMap` whose
//! key order is the canonical order (descending total degree, then
//! descending lexicographic), so iteration and printing are deterministic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::coeff::{
    mul_mod, same_ring, CoeffError, CoeffRing, FieldElem, ParamAssignment, ParamCoeff,
};

mod parse;

pub use parse::parse_poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live in different variable universes")]
    UniverseMismatch,
    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("point has {got} coordinates, universe has {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("{0} does not divide the polynomial")]
    NotDivisible(String),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Ordered, duplicate-free variable names.
#[derive(Clone, Debug)]
pub struct VarUniverse {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for VarUniverse {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for VarUniverse {}

impl VarUniverse {
    /// Panics on duplicate names.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Arc<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            assert!(index.insert(n.clone(), i).is_none(), "duplicate variable {n}");
        }
        Arc::new(VarUniverse { names, index })
    }

    /// `x0..xn, y1..y{r+1}, z1..zs`, optionally followed by `z, w`.
    pub fn standard(n: usize, r: usize, s: usize, with_zw: bool) -> Arc<Self> {
        let mut names: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
        names.extend((1..=r + 1).map(|j| format!("y{j}")));
        names.extend((1..=s).map(|k| format!("z{k}")));
        if with_zw {
            names.push("z".into());
            names.push("w".into());
        }
        Self::new(&names)
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
        self.index.get(name).copied()
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize, PolyError> {
        self.index_of(name).ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    /// A new universe with `extra` appended.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Arc<Self> {
        let mut names = self.names.clone();
        names.extend(extra.iter().map(|s| s.as_ref().to_string()));
        Self::new(&names)
    }
}

fn same_universe(a: &Arc<VarUniverse>, b: &Arc<VarUniverse>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Exponent vector, ordered canonically (see module docs).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct SparsePoly {
    vars: Arc<VarUniverse>,
    ring: Arc<CoeffRing>,
    terms: BTreeMap<Monomial, ParamCoeff>,
}

impl PartialEq for SparsePoly {
    fn eq(&self, other: &Self) -> bool {
        same_universe(&self.vars, &other.vars)
            && same_ring(&self.ring, &other.ring)
            && self.terms == other.terms
    }
}

impl Eq for SparsePoly {}

impl SparsePoly {
    pub fn zero(vars: &Arc<VarUniverse>, ring: &Arc<CoeffRing>) -> Self {
        SparsePoly {
            vars: vars.clone(),
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<VarUniverse>, ring: &Arc<CoeffRing>, c: ParamCoeff) -> Self {
        let mut p = Self::zero(vars, ring);
        p.add_term(Monomial(vec![0; vars.len()]), c);
        p
    }

    pub fn one(vars: &Arc<VarUniverse>, ring: &Arc<CoeffRing>) -> Self {
        Self::constant(vars, ring, ParamCoeff::one(ring))
    }

    /// `coeff * prod(var^exp)` for the given `(name, exp)` pairs.
    pub fn term(
        vars: &Arc<VarUniverse>,
        ring: &Arc<CoeffRing>,
        coeff: ParamCoeff,
        powers: &[(&str, u32)],
    ) -> Result<Self, PolyError> {
        let mut exps = vec![0u32; vars.len()];
        for (name, e) in powers {
            exps[vars.require(name)?] += e;
        }
        let mut p = Self::zero(vars, ring);
        p.add_term(Monomial(exps), coeff);
        Ok(p)
    }

    pub fn var(vars: &Arc<VarUniverse>, ring: &Arc<CoeffRing>, name: &str) -> Result<Self, PolyError> {
        Self::var_pow(vars, ring, name, 1)
    }

    pub fn var_pow(
        vars: &Arc<VarUniverse>,
        ring: &Arc<CoeffRing>,
        name: &str,
        e: u32,
    ) -> Result<Self, PolyError> {
        Self::term(vars, ring, ParamCoeff::one(ring), &[(name, e)])
    }

    /// Build from raw terms; zero coefficients are dropped and repeats summed.
    pub fn from_terms(
        vars: &Arc<VarUniverse>,
        ring: &Arc<CoeffRing>,
        terms: impl IntoIterator<Item = (Monomial, ParamCoeff)>,
    ) -> Self {
        let mut p = Self::zero(vars, ring);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    pub fn universe(&self) -> &Arc<VarUniverse> {
        &self.vars
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

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ParamCoeff)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: Monomial, c: ParamCoeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<(), PolyError> {
        if !same_universe(&self.vars, &other.vars) {
            return Err(PolyError::UniverseMismatch);
        }
        if !same_ring(&self.ring, &other.ring) {
            return Err(PolyError::Coeff(CoeffError::ModulusMismatch));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(&self.vars, &self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        SparsePoly {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &ParamCoeff) -> Self {
        let mut out = Self::zero(&self.vars, &self.ring);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&ParamCoeff::constant(&self.ring, c))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.vars, &self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiply by `var^k`.
    pub fn mul_var_pow(&self, var: &str, k: u32) -> Result<Self, PolyError> {
        let idx = self.vars.require(var)?;
        Ok(self.shift_exponent(idx, k))
    }

    fn shift_exponent(&self, idx: usize, k: u32) -> Self {
        SparsePoly {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e[idx] += k;
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Exact division by `var^k`.
    pub fn div_var_pow(&self, var: &str, k: u32) -> Result<Self, PolyError> {
        let idx = self.vars.require(var)?;
        if !self.terms.keys().all(|m| m.0[idx] >= k) {
            return Err(PolyError::NotDivisible(format!("{var}^{k}")));
        }
        Ok(SparsePoly {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e[idx] -= k;
                    (Monomial(e), c.clone())
                })
                .collect(),
        })
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Largest `k` with `var^k` dividing every term; `None` for the zero polynomial.
    pub fn valuation(&self, var: &str) -> Result<Option<u32>, PolyError> {
        let idx = self.vars.require(var)?;
        Ok(self.terms.keys().map(|m| m.0[idx]).min())
    }

    pub fn degree_in(&self, var: &str) -> Result<u32, PolyError> {
        let idx = self.vars.require(var)?;
        Ok(self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0))
    }

    pub fn contains_var(&self, var: &str) -> Result<bool, PolyError> {
        Ok(self.degree_in(var)? > 0)
    }

    /// Variables that occur with positive exponent, in universe order.
    pub fn occurring_vars(&self) -> Vec<usize> {
        (0..self.vars.len())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    /// Split `self = sum_k c_k * var^k`, returning `c_0, c_1, ...` (with `var` removed from each).
    pub fn coefficients_in(&self, var: &str) -> Result<Vec<SparsePoly>, PolyError> {
        let idx = self.vars.require(var)?;
        let top = self.degree_in(var)? as usize;
        let mut out = vec![Self::zero(&self.vars, &self.ring); top + 1];
        for (m, c) in &self.terms {
            let k = m.0[idx] as usize;
            let mut e = m.0.clone();
            e[idx] = 0;
            out[k].add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to a variable.
    pub fn derivative(&self, var: &str) -> Result<Self, PolyError> {
        let idx = self.vars.require(var)?;
        let p = self.modulus();
        let mut out = Self::zero(&self.vars, &self.ring);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 || (e as u64).is_multiple_of(p) {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] -= 1;
            out.add_term(Monomial(exps), c.scale(e as u64 % p));
        }
        Ok(out)
    }

    /// Formal derivative with respect to a parameter (parameters treated as coordinates).
    pub fn param_derivative(&self, param: &str) -> Result<Self, PolyError> {
        let idx = self
            .ring
            .params()
            .index_of(param)
            .ok_or_else(|| CoeffError::UnknownParameter(param.to_string()))?;
        let mut out = Self::zero(&self.vars, &self.ring);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.derivative(idx));
        }
        Ok(out)
    }

    /// Substitute values for some parameters; the rest stay symbolic.
    pub fn specialize_params(&self, assignment: &ParamAssignment) -> Result<Self, PolyError> {
        let values = assignment.resolve(&self.ring)?;
        let mut out = Self::zero(&self.vars, &self.ring);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.partial_specialize(&values)?);
        }
        Ok(out)
    }

    /// Constant coefficients as residues, if no parameter occurs.
    pub fn constant_terms(&self) -> Option<Vec<(Monomial, u64)>> {
        self.terms
            .iter()
            .map(|(m, c)| c.constant_value().map(|v| (m.clone(), v)))
            .collect()
    }

    /// Exact evaluation at a point with the given parameter values.
    pub fn eval_point(&self, point: &[FieldElem], params: &ParamAssignment) -> Result<FieldElem, PolyError> {
        if point.len() != self.vars.len() {
            return Err(PolyError::PointLength {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let p = self.modulus();
        if let Some(bad) = point.iter().find(|x| x.modulus() != p) {
            let _ = bad;
            return Err(PolyError::Coeff(CoeffError::ModulusMismatch));
        }
        let values = params.resolve(&self.ring)?;
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut v = c.specialize_resolved(&values)?.value();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v = mul_mod(v, crate::coeff::pow_mod(x.value(), e as u64, p), p);
                }
            }
            acc = crate::coeff::add_mod(acc, v, p);
        }
        Ok(FieldElem::from_reduced(acc, p))
    }

    /// Re-express in another universe, mapping variables by name.
    pub fn embed(&self, target: &Arc<VarUniverse>) -> Result<Self, PolyError> {
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|n| target.require(n))
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(target, &self.ring);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.len()];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Rename one variable into a universe that has the new name (used when the
    /// induction's `z` becomes the next `z_{s+1}`).
    pub fn rename_into(&self, target: &Arc<VarUniverse>, from: &str, to: &str) -> Result<Self, PolyError> {
        let src = self.vars.require(from)?;
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| target.require(if i == src { to } else { n }))
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(target, &self.ring);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.len()];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Multiply through by `param^k` with `k` the largest negative exponent of
    /// an invertible parameter, then set that parameter to zero. This is the
    /// non-Laurent evaluation path; the result is polynomial in the parameter
    /// before specialization.
    pub fn clear_and_specialize_zero(&self, param: &str) -> Result<Self, PolyError> {
        let idx = self
            .ring
            .params()
            .index_of(param)
            .ok_or_else(|| CoeffError::UnknownParameter(param.to_string()))?;
        let shift = -self.terms.values().map(|c| c.min_exponent(idx)).min().unwrap_or(0);
        let mut out = Self::zero(&self.vars, &self.ring);
        for (m, c) in &self.terms {
            let cleared = c.shift_param(idx, shift)?;
            let mut kept = ParamCoeff::zero(&self.ring);
            for (pm, v) in cleared.terms() {
                if pm.0[idx] == 0 {
                    kept = &kept + &ParamCoeff::monomial(&self.ring, pm.0.clone(), v as i64)?;
                }
            }
            out.add_term(m.clone(), kept);
        }
        Ok(out)
    }

    /// Coefficient attached to an exact monomial (zero if absent).
    pub fn coefficient(&self, m: &Monomial) -> ParamCoeff {
        self.terms.get(m).cloned().unwrap_or_else(|| ParamCoeff::zero(&self.ring))
    }

    pub fn canonical_string(&self) -> String {
        self.to_string()
    }
}

impl std::ops::Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: Self) -> SparsePoly {
        self.try_add(rhs).expect("incompatible polynomials")
    }
}

impl std::ops::Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: Self) -> SparsePoly {
        self.try_sub(rhs).expect("incompatible polynomials")
    }
}

impl std::ops::Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: Self) -> SparsePoly {
        self.try_mul(rhs).expect("incompatible polynomials")
    }
}

impl std::ops::Mul<SparsePoly> for SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: SparsePoly) -> SparsePoly {
        &self * &rhs
    }
}

impl std::ops::Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly::neg(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Mul,
    Neg,
    /// Multiply `a` by the constant term of `b`.
    Scale,
}

/// Exact arithmetic on two polynomials of the same universe.
pub fn poly_arith(a: &SparsePoly, b: &SparsePoly, op: PolyOp) -> Result<SparsePoly, PolyError> {
    match op {
        PolyOp::Add => a.try_add(b),
        PolyOp::Mul => a.try_mul(b),
        PolyOp::Neg => Ok(a.neg()),
        PolyOp::Scale => {
            a.check_compatible(b)?;
            let c = b.coefficient(&Monomial(vec![0; b.vars.len()]));
            Ok(a.scale(&c))
        }
    }
}

/// `(total_degree, is_homogeneous)`.
pub fn degree_info(a: &SparsePoly) -> Result<(u32, bool), PolyError> {
    let d = a.total_degree().ok_or(PolyError::ZeroPolynomial)?;
    Ok((d, a.is_homogeneous()))
}

/// Does `var^k` divide every term? Vacuously true for zero.
pub fn monomial_divides(a: &SparsePoly, var: &str, k: u32) -> Result<bool, PolyError> {
    let idx = a.vars.require(var)?;
    Ok(a.terms.keys().all(|m| m.0[idx] >= k))
}

pub fn partial_derivative(a: &SparsePoly, var: &str) -> Result<SparsePoly, PolyError> {
    a.derivative(var)
}

pub fn eval_point(a: &SparsePoly, point: &[FieldElem], params: &ParamAssignment) -> Result<FieldElem, PolyError> {
    a.eval_point(point, params)
}

pub fn canonical_string(a: &SparsePoly) -> String {
    a.to_string()
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let pnames = self.ring.params().names();
        let vnames = self.vars.names();
        let mut first = true;
        for (m, c) in &self.terms {
            let var_factors: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| power(&vnames[i], e as i64))
                .collect();
            for (pm, v) in c.terms() {
                let mut factors: Vec<String> = pm
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e != 0)
                    .map(|(i, &e)| power(&pnames[i], e as i64))
                    .collect();
                factors.extend(var_factors.iter().cloned());
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                match (v, factors.is_empty()) {
                    (_, true) => write!(f, "{v}")?,
                    (1, false) => write!(f, "{}", factors.join("*"))?,
                    _ => write!(f, "{v}*{}", factors.join("*"))?,
                }
            }
        }
        Ok(())
    }
}

fn power(name: &str, e: i64) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

/// Convenience: a constant polynomial from a signed integer.
pub fn int_poly(vars: &Arc<VarUniverse>, ring: &Arc<CoeffRing>, c: i64) -> SparsePoly {
    SparsePoly::constant(vars, ring, ParamCoeff::constant(ring, c))
}

pub(crate) fn residue_from_big(c: u128, p: u64) -> u64 {
    (c % p as u128) as u64
}
