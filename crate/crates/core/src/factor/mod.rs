//! Irreducibility over GF(p).
//!
//! `univariate_factor` is a complete factorization. `probably_irreducible`
//! decides absolute irreducibility of a homogeneous form by restricting it to
//! random planes: a plane section that keeps full degree, is irreducible over
//! GF(p) and has a smooth GF(p)-point is absolutely irreducible, and so is
//! the form itself.
//!
//! The reported failure bound is `(C0 * deg^2 / p)^trials` with `C0 = 1`,
//! the shape of the effective Bertini estimate for a bad plane. Because each
//! certified slice is already a proof for the specialized form, the bound
//! is conservative; it is kept so that callers can compare trial budgets.

pub mod bivariate;
pub mod univariate;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coeff::{add_mod, mul_mod, CoeffError, FieldElem, ParamAssignment};
use crate::poly::{Monomial, PolyError, SparsePoly};
use bivariate::{BiPoly, BivariateError};
use univariate::UniPoly;

/// Constant in the slice failure bound.
pub const BERTINI_C0: f64 = 1.0;

/// Enough for a bound of 2^-40 at degree 5 over GF(101).
pub const DEFAULT_TRIALS: usize = 24;

/// Seed used where the caller does not supply one; factorizations do not
/// depend on it.
const INTERNAL_SEED: u64 = 0x5eed_f00d;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("the zero polynomial cannot be factored")]
    ZeroPolynomial,
    #[error("a constant has no irreducibility verdict")]
    ConstantPolynomial,
    #[error("coefficient still depends on parameter(s): {0}")]
    UnspecializedParameter(String),
    #[error("more than one variable occurs")]
    NotUnivariate,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("p = {p} is too small for degree {deg} (need p > deg^2)")]
    DegreeTooLargeForPrime { deg: u32, p: u64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Irreducible,
    Reducible,
    Inconclusive,
}

/// How parameters are fixed before slicing.
#[derive(Clone, Debug)]
pub enum ParamChoice {
    /// Use these values; parameters left out are drawn at random from the seed.
    Given(ParamAssignment),
    /// Independent nonzero residues for every parameter, drawn from the seed.
    Random,
}

#[derive(Clone, Debug)]
pub struct IrreducibilityVerdict {
    pub verdict: Verdict,
    /// A verified nontrivial factor of the specialized polynomial.
    pub witness: Option<SparsePoly>,
    /// Probability bound for a wrong `Irreducible`; meaningful only then.
    pub failure_bound: f64,
    pub trials: usize,
    pub certified_slices: usize,
    /// Parameter values the verdict refers to.
    pub specialization: ParamAssignment,
}

#[derive(Clone, Debug)]
pub struct UnivariateFactors {
    pub unit: FieldElem,
    pub factors: Vec<(SparsePoly, u32)>,
}

impl UnivariateFactors {
    pub fn expand(&self, like: &SparsePoly) -> SparsePoly {
        let mut acc = crate::poly::int_poly(like.universe(), like.ring(), self.unit.value() as i64);
        for (f, e) in &self.factors {
            acc = &acc * &f.pow(*e);
        }
        acc
    }
}

pub fn failure_bound(deg: u32, p: u64, trials: usize) -> f64 {
    let base = (BERTINI_C0 * (deg as f64).powi(2) / p as f64).min(1.0);
    base.powi(trials as i32).max(f64::MIN_POSITIVE)
}

/// Smallest trial count whose failure bound is at most `2^-bits`; `None` if
/// a single slice bound is not below 1.
pub fn trials_for_bound(deg: u32, p: u64, bits: f64) -> Option<usize> {
    let base = BERTINI_C0 * (deg as f64).powi(2) / p as f64;
    if base >= 1.0 {
        return None;
    }
    Some((bits / -base.log2()).ceil().max(1.0) as usize)
}

fn constant_terms(a: &SparsePoly) -> Result<Vec<(Monomial, u64)>, FactorError> {
    a.constant_terms().ok_or_else(|| {
        let names: Vec<String> = a
            .terms()
            .flat_map(|(_, c)| {
                c.terms()
                    .flat_map(|(m, _)| {
                        m.0.iter()
                            .enumerate()
                            .filter(|(_, &e)| e != 0)
                            .map(|(i, _)| a.ring().params().names()[i].clone())
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        FactorError::UnspecializedParameter(names.join(", "))
    })
}

/// Complete factorization of a polynomial in (at most) one variable with
/// constant coefficients.
pub fn univariate_factor(a: &SparsePoly) -> Result<UnivariateFactors, FactorError> {
    if a.is_zero() {
        return Err(FactorError::ZeroPolynomial);
    }
    let terms = constant_terms(a)?;
    let occ = a.occurring_vars();
    if occ.len() > 1 {
        return Err(FactorError::NotUnivariate);
    }
    let p = a.modulus();
    let idx = occ.first().copied();
    let mut dense = Vec::new();
    for (m, v) in &terms {
        let e = idx.map_or(0, |i| m.0[i] as usize);
        if dense.len() <= e {
            dense.resize(e + 1, 0);
        }
        dense[e] = v % p;
    }
    let f = UniPoly::new(dense, p);
    let mut rng = ChaCha8Rng::seed_from_u64(INTERNAL_SEED);
    let fac = univariate::factor(&f, &mut rng);
    let var = idx.map(|i| a.universe().names()[i].clone());
    let factors = fac
        .factors
        .iter()
        .map(|(g, e)| {
            let var = var.as_deref().expect("nonconstant factor implies a variable");
            (uni_to_sparse(g, a, var), *e)
        })
        .collect();
    Ok(UnivariateFactors {
        unit: FieldElem::new(fac.unit as i64, p)?,
        factors,
    })
}

fn uni_to_sparse(g: &UniPoly, like: &SparsePoly, var: &str) -> SparsePoly {
    let idx = like.universe().index_of(var).expect("variable in universe");
    let n = like.universe().len();
    SparsePoly::from_terms(
        like.universe(),
        like.ring(),
        g.coeffs().iter().enumerate().map(|(k, &v)| {
            let mut e = vec![0u32; n];
            e[idx] = k as u32;
            (Monomial(e), crate::coeff::ParamCoeff::constant(like.ring(), v as i64))
        }),
    )
}

fn resolve_params(a: &SparsePoly, choice: &ParamChoice, seed: u64) -> ParamAssignment {
    let p = a.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut out = ParamAssignment::new();
    for name in a.ring().params().names() {
        let drawn = rng.random_range(1..p);
        let v = match choice {
            ParamChoice::Given(g) => g.get(name).unwrap_or(drawn),
            ParamChoice::Random => drawn,
        };
        out.set(name, v);
    }
    out
}

/// Randomized absolute-irreducibility test for a homogeneous polynomial.
pub fn probably_irreducible(
    a: &SparsePoly,
    params: &ParamChoice,
    trials: usize,
    seed: u64,
) -> Result<IrreducibilityVerdict, FactorError> {
    let (deg, homogeneous) = crate::poly::degree_info(a).map_err(|_| FactorError::ZeroPolynomial)?;
    if !homogeneous {
        return Err(FactorError::NotHomogeneous);
    }
    if deg == 0 {
        return Err(FactorError::ConstantPolynomial);
    }
    let p = a.modulus();
    if p <= (deg as u64) * (deg as u64) {
        return Err(FactorError::DegreeTooLargeForPrime { deg, p });
    }
    let assignment = resolve_params(a, params, seed);
    let bound = failure_bound(deg, p, trials);
    let verdict = |v: Verdict, witness: Option<SparsePoly>, certified: usize| IrreducibilityVerdict {
        verdict: v,
        witness,
        failure_bound: bound,
        trials,
        certified_slices: certified,
        specialization: assignment.clone(),
    };

    // Visible monomial content, valid for every parameter value.
    if let Some(w) = monomial_witness(a)? {
        return Ok(verdict(Verdict::Reducible, Some(w), 0));
    }
    let spec = a.specialize_params(&assignment)?;
    if spec.total_degree() != Some(deg) {
        return Ok(verdict(Verdict::Inconclusive, None, 0));
    }
    if let Some(w) = monomial_witness(&spec)? {
        return Ok(verdict(Verdict::Reducible, Some(w), 0));
    }
    if deg == 1 {
        return Ok(verdict(Verdict::Irreducible, None, trials));
    }
    let terms = constant_terms(&spec)?;
    let occ = spec.occurring_vars();
    match occ.len() {
        2 => {
            return Ok(match binary_form_witness(&spec, &terms, &occ) {
                Some(w) => verdict(Verdict::Reducible, Some(w), 0),
                None => verdict(Verdict::Inconclusive, None, 0),
            })
        }
        3 => {
            if let Some(w) = ternary_witness(&spec, &terms, &occ)? {
                return Ok(verdict(Verdict::Reducible, Some(w), 0));
            }
        }
        _ => {}
    }

    let certified: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            slice_certified(&terms, &occ, deg, p, &mut rng)
        })
        .collect();
    let n_ok = certified.iter().filter(|&&c| c).count();
    Ok(if n_ok == trials && trials > 0 {
        verdict(Verdict::Irreducible, None, n_ok)
    } else {
        verdict(Verdict::Inconclusive, None, n_ok)
    })
}

/// A single variable dividing every term, when that leaves a nonconstant cofactor.
fn monomial_witness(a: &SparsePoly) -> Result<Option<SparsePoly>, FactorError> {
    if a.total_degree().unwrap_or(0) < 2 {
        return Ok(None);
    }
    for name in a.universe().names() {
        if a.valuation(name)?.unwrap_or(0) > 0 {
            let w = SparsePoly::var(a.universe(), a.ring(), name)?;
            let cof = a.div_var_pow(name, 1)?;
            if &w * &cof == *a {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn verified(w: SparsePoly, target: &SparsePoly) -> Option<SparsePoly> {
    let (dw, _) = crate::poly::degree_info(&w).ok()?;
    let dt = target.total_degree()?;
    if dw == 0 || dw >= dt {
        return None;
    }
    let (bw, bt) = (to_dense(&w)?, to_dense(target)?);
    let q = dense_exact_div(&bt, &bw)?;
    (dense_mul(&bw, &q) == bt).then_some(w)
}

/// Homogenize a factor found in the chart where `occ[last] = 1`.
fn homogenize(f: &BiPoly, like: &SparsePoly, occ: &[usize]) -> SparsePoly {
    let n = like.universe().len();
    let k = f.total_degree().unwrap_or(0);
    SparsePoly::from_terms(
        like.universe(),
        like.ring(),
        f.terms().map(|(i, j, v)| {
            let mut e = vec![0u32; n];
            e[occ[0]] = i as u32;
            if occ.len() == 3 {
                e[occ[1]] = j as u32;
                e[occ[2]] = (k - i - j) as u32;
            } else {
                e[occ[1]] = (k - i) as u32;
            }
            (Monomial(e), crate::coeff::ParamCoeff::constant(like.ring(), v as i64))
        }),
    )
}

fn binary_form_witness(spec: &SparsePoly, terms: &[(Monomial, u64)], occ: &[usize]) -> Option<SparsePoly> {
    let p = spec.modulus();
    let f = BiPoly::from_terms(terms.iter().map(|(m, v)| (m.0[occ[0]] as usize, 0, *v)), p);
    let mut rng = ChaCha8Rng::seed_from_u64(INTERNAL_SEED);
    let fac = univariate::factor(&f.eval_y(0), &mut rng);
    let total: u32 = fac.factors.iter().map(|(_, e)| e).sum();
    if total < 2 {
        return None;
    }
    let g = BiPoly::new(fac.factors[0].0.coeffs().iter().map(|&v| UniPoly::constant(v, p)).collect(), p);
    verified(homogenize(&g, spec, occ), spec)
}

fn ternary_witness(
    spec: &SparsePoly,
    terms: &[(Monomial, u64)],
    occ: &[usize],
) -> Result<Option<SparsePoly>, FactorError> {
    let p = spec.modulus();
    let f = BiPoly::from_terms(
        terms.iter().map(|(m, v)| (m.0[occ[0]] as usize, m.0[occ[1]] as usize, *v)),
        p,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(INTERNAL_SEED);
    match bivariate::factor(&f, &mut rng) {
        Ok(fac) if !fac.is_irreducible() => {
            let g = &fac.factors[0].0;
            Ok(verified(homogenize(g, spec, occ), spec))
        }
        Ok(_) | Err(BivariateError::NoGoodSpecialization(_)) => Ok(None),
        Err(BivariateError::DegreeNotBelowCharacteristic { .. }) => Ok(None),
    }
}

/// One random plane section; `true` if it certifies absolute irreducibility.
fn slice_certified(terms: &[(Monomial, u64)], occ: &[usize], deg: u32, p: u64, rng: &mut ChaCha8Rng) -> bool {
    for _ in 0..deg.max(1) {
        let lines: Vec<BiPoly> = occ
            .iter()
            .map(|_| {
                let (a, b, c) = (rng.random_range(0..p), rng.random_range(0..p), rng.random_range(0..p));
                BiPoly::from_terms([(0, 0, a), (1, 0, b), (0, 1, c)], p)
            })
            .collect();
        let g = substitute(terms, occ, &lines, deg, p);
        if g.total_degree() != Some(deg as usize) || g.deg_x().unwrap_or(0) == 0 {
            continue;
        }
        return match bivariate::factor(&g, rng) {
            Ok(fac) if fac.is_irreducible() => bivariate::smooth_point(&g, rng).is_some(),
            _ => false,
        };
    }
    false
}

fn substitute(terms: &[(Monomial, u64)], occ: &[usize], lines: &[BiPoly], deg: u32, p: u64) -> BiPoly {
    let powers: Vec<Vec<BiPoly>> = lines
        .iter()
        .map(|l| {
            let mut v = vec![BiPoly::from_y(UniPoly::constant(1, p))];
            for k in 1..=deg as usize {
                let next = v[k - 1].mul(l);
                v.push(next);
            }
            v
        })
        .collect();
    let mut acc = BiPoly::zero(p);
    for (m, c) in terms {
        let mut t = BiPoly::from_y(UniPoly::constant(*c, p));
        for (slot, &vi) in occ.iter().enumerate() {
            let e = m.0[vi] as usize;
            if e > 0 {
                t = t.mul(&powers[slot][e]);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

// Dense helpers for verifying witnesses on specialized polynomials.

type Dense = std::collections::BTreeMap<Vec<u32>, u64>;

fn to_dense(a: &SparsePoly) -> Option<(Dense, u64)> {
    let p = a.modulus();
    let terms = a.constant_terms()?;
    Some((terms.into_iter().map(|(m, v)| (m.0, v)).collect(), p))
}

fn dense_mul(a: &(Dense, u64), b: &(Dense, u64)) -> (Dense, u64) {
    let p = a.1;
    let mut out = Dense::new();
    for (ma, ca) in &a.0 {
        for (mb, cb) in &b.0 {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let e = out.entry(m).or_insert(0);
            *e = add_mod(*e, mul_mod(*ca, *cb, p), p);
        }
    }
    out.retain(|_, v| *v != 0);
    (out, p)
}

/// Exact multivariate division using the graded order; `None` if it leaves a remainder.
fn dense_exact_div(a: &(Dense, u64), b: &(Dense, u64)) -> Option<(Dense, u64)> {
    let p = a.1;
    let key = |m: &Vec<u32>| (m.iter().sum::<u32>(), m.clone());
    let lead_b = b.0.keys().max_by_key(|m| key(m))?.clone();
    let lb_inv = crate::coeff::inv_mod(b.0[&lead_b], p)?;
    let mut r = a.0.clone();
    let mut q = Dense::new();
    while let Some(lead_r) = r.keys().max_by_key(|m| key(m)).cloned() {
        if lead_r.iter().zip(&lead_b).any(|(x, y)| x < y) {
            return None;
        }
        let shift: Vec<u32> = lead_r.iter().zip(&lead_b).map(|(x, y)| x - y).collect();
        let coef = mul_mod(r[&lead_r], lb_inv, p);
        q.insert(shift.clone(), coef);
        for (mb, cb) in &b.0 {
            let m: Vec<u32> = mb.iter().zip(&shift).map(|(x, y)| x + y).collect();
            let e = r.entry(m).or_insert(0);
            *e = crate::coeff::sub_mod(*e, mul_mod(coef, *cb, p), p);
        }
        r.retain(|_, v| *v != 0);
    }
    Some((q, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffRing;
    use crate::poly::{parse_poly, VarUniverse};

    fn poly(s: &str, vars: &[&str], p: u64) -> SparsePoly {
        parse_poly(s, &VarUniverse::new(vars), &CoeffRing::standard(p).unwrap()).unwrap()
    }

    #[test]
    fn univariate_examples() {
        let f = poly("x^2 + 6", &["x"], 7);
        let fac = univariate_factor(&f).unwrap();
        let names: Vec<String> = fac.factors.iter().map(|(g, _)| g.to_string()).collect();
        assert_eq!(names, vec!["x + 1", "x + 6"]);
        assert_eq!(fac.expand(&f), f);

        let g = poly("x^2 + 1", &["x"], 7);
        assert_eq!(univariate_factor(&g).unwrap().factors.len(), 1);

        let h = poly("x^3", &["x"], 5);
        let fac = univariate_factor(&h).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.factors[0].1, 3);
    }

    #[test]
    fn univariate_errors() {
        let v = VarUniverse::new(&["x"]);
        let r = CoeffRing::standard(7).unwrap();
        assert_eq!(univariate_factor(&SparsePoly::zero(&v, &r)).unwrap_err(), FactorError::ZeroPolynomial);
        let f = parse_poly("pi*x + 1", &v, &r).unwrap();
        assert!(matches!(univariate_factor(&f), Err(FactorError::UnspecializedParameter(_))));
    }

    #[test]
    fn conic_is_irreducible() {
        let f = poly("x0^2 + x1^2 + x2^2", &["x0", "x1", "x2"], 101);
        let v = probably_irreducible(&f, &ParamChoice::Random, 8, 1).unwrap();
        assert_eq!(v.verdict, Verdict::Irreducible);
        assert!(v.failure_bound < 1e-4);
    }

    #[test]
    fn visible_monomial_factor() {
        let f = poly("x0*x1", &["x0", "x1"], 101);
        let v = probably_irreducible(&f, &ParamChoice::Random, 8, 1).unwrap();
        assert_eq!(v.verdict, Verdict::Reducible);
        assert_eq!(v.witness.unwrap().to_string(), "x0");
    }

    #[test]
    fn monomial_family_reducible() {
        for d in 2..=9u32 {
            for a in 0..=d {
                let f = poly(&format!("x0^{a}*x1^{}", d - a), &["x0", "x1"], 101);
                let v = probably_irreducible(&f, &ParamChoice::Random, 4, 5).unwrap();
                assert_eq!(v.verdict, Verdict::Reducible, "d={d} a={a}");
            }
        }
    }

    #[test]
    fn product_of_quadrics_found_in_three_variables() {
        let f = poly("(x0^2 + x1*x2 + 3*x2^2)*(x0*x1 + x2^2)", &["x0", "x1", "x2"], 101);
        let v = probably_irreducible(&f, &ParamChoice::Random, 8, 1).unwrap();
        assert_eq!(v.verdict, Verdict::Reducible);
        let w = v.witness.unwrap();
        assert_eq!(w.total_degree(), Some(2));
    }

    #[test]
    fn reducible_in_many_variables_is_not_called_irreducible() {
        let f = poly("(x0 + x1 + x2 + x3)*(x0^2 + x1*x3 + x2^2)", &["x0", "x1", "x2", "x3"], 101);
        let v = probably_irreducible(&f, &ParamChoice::Random, 8, 1).unwrap();
        assert_ne!(v.verdict, Verdict::Irreducible);
    }

    #[test]
    fn cubic_surface_with_parameters() {
        let f = poly("pi*x0^3 + x1^3 + x2^3 + rho*x3^3 + x0*x1*x2", &["x0", "x1", "x2", "x3"], 101);
        let v = probably_irreducible(&f, &ParamChoice::Random, 12, 9).unwrap();
        assert_eq!(v.verdict, Verdict::Irreducible);
        assert_eq!(v.certified_slices, 12);
    }

    #[test]
    fn degree_gate() {
        let f = poly("x0^11 + x1^11", &["x0", "x1"], 101);
        assert_eq!(
            probably_irreducible(&f, &ParamChoice::Random, 4, 0).unwrap_err(),
            FactorError::DegreeTooLargeForPrime { deg: 11, p: 101 }
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let f = poly("x0^3 + x1^3 + x2^3 + x3^3", &["x0", "x1", "x2", "x3"], 101);
        let a = probably_irreducible(&f, &ParamChoice::Random, 6, 42).unwrap();
        let b = probably_irreducible(&f, &ParamChoice::Random, 6, 42).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.certified_slices, b.certified_slices);
        assert_eq!(a.specialization, b.specialization);
    }

    #[test]
    fn trial_budget_for_target() {
        assert_eq!(trials_for_bound(5, 101, 40.0), Some(20));
        assert!(failure_bound(5, 101, DEFAULT_TRIALS) <= 2f64.powi(-40));
        assert_eq!(trials_for_bound(11, 101, 40.0), None);
    }
}
