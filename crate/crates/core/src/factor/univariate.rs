//! Dense univariate polynomials over GF(p) and their factorization:
//! squarefree decomposition, distinct-degree splitting, then
//! Cantor–Zassenhaus equal-degree splitting.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::coeff::{add_mod, inv_mod, mul_mod, sub_mod};

/// Little-endian coefficients, no trailing zeros. The zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    c: Vec<u64>,
    p: u64,
}

impl PartialOrd for UniPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top down.
impl Ord for UniPoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.c
            .len()
            .cmp(&other.c.len())
            .then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}

impl UniPoly {
    pub fn new(mut c: Vec<u64>, p: u64) -> Self {
        for v in c.iter_mut() {
            *v %= p;
        }
        let mut out = UniPoly { c, p };
        out.trim();
        out
    }

    pub fn zero(p: u64) -> Self {
        UniPoly { c: Vec::new(), p }
    }

    pub fn constant(v: u64, p: u64) -> Self {
        Self::new(vec![v], p)
    }

    pub fn x(p: u64) -> Self {
        Self::new(vec![0, 1], p)
    }

    /// `x - a`
    pub fn linear(a: u64, p: u64) -> Self {
        Self::new(vec![sub_mod(0, a % p, p), 1], p)
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    /// `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    /// `self(y + a)`.
    pub fn taylor_shift(&self, a: u64) -> Self {
        let step = Self::new(vec![a % self.p, 1], self.p);
        let mut acc = Self::zero(self.p);
        for &v in self.c.iter().rev() {
            acc = acc.mul(&step).add(&Self::constant(v, self.p));
        }
        acc
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &v| add_mod(mul_mod(acc, x, self.p), v, self.p))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| add_mod(self.coeff(i), o.coeff(i), self.p)).collect();
        Self::new(c, self.p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| sub_mod(self.coeff(i), o.coeff(i), self.p)).collect();
        Self::new(c, self.p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = add_mod(c[i + j], mul_mod(a, b, self.p), self.p);
            }
        }
        Self::new(c, self.p)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.c.iter().map(|&v| mul_mod(v, k, self.p)).collect(), self.p)
    }

    pub fn monic(&self) -> Self {
        match inv_mod(self.lead(), self.p) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = inv_mod(d.lead(), self.p).expect("leading coefficient is a unit");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(self.p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = mul_mod(r[k + dd], inv, self.p);
            q[k] = coef;
            if coef == 0 {
                continue;
            }
            for (i, &dv) in d.c.iter().enumerate() {
                r[k + i] = sub_mod(r[k + i], mul_mod(coef, dv, self.p), self.p);
            }
        }
        r.truncate(dd);
        (Self::new(q, self.p), Self::new(r, self.p))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Exact quotient, if `d` divides `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::constant(1, p), Self::zero(p));
        let (mut t0, mut t1) = (Self::zero(p), Self::constant(1, p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        let inv = inv_mod(r0.lead(), p).unwrap_or(1);
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    /// Inverse of `self` modulo `m`, if coprime.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let (g, s, _) = self.rem(m).xgcd(m);
        g.is_one().then(|| s.rem(m))
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &v)| mul_mod(v, i as u64 % self.p, self.p))
            .collect();
        Self::new(c, self.p)
    }

    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut acc = Self::constant(1, self.p).rem(m);
        let mut base = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// `self(x)^p` has only exponents divisible by p; this undoes that.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        Self::new(self.c.iter().step_by(p).copied().collect(), self.p)
    }
}

/// Factorization `unit * prod f_i^{e_i}` with monic irreducible `f_i`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniFactorization {
    pub unit: u64,
    pub factors: Vec<(UniPoly, u32)>,
}

impl UniFactorization {
    pub fn expand(&self, p: u64) -> UniPoly {
        let mut acc = UniPoly::constant(self.unit, p);
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(f);
            }
        }
        acc
    }
}

/// Squarefree decomposition of a monic polynomial (multiplicities may be
/// multiples of p).
pub fn squarefree_decomposition(f: &UniPoly) -> Vec<(UniPoly, u32)> {
    let p = f.modulus();
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let g = f.derivative();
    if g.is_zero() {
        for (h, k) in squarefree_decomposition(&f.pth_root()) {
            out.push((h, k * p as u32));
        }
        return out;
    }
    let mut c = f.gcd(&g);
    let mut w = f.exact_div(&c).expect("gcd divides").monic();
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.exact_div(&y).expect("gcd divides").monic();
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.exact_div(&w).expect("gcd divides");
    }
    if c.degree().unwrap_or(0) > 0 {
        for (h, k) in squarefree_decomposition(&c.monic().pth_root()) {
            out.push((h, k * p as u32));
        }
    }
    out
}

/// Split a squarefree monic polynomial into products of irreducibles of equal degree.
pub fn distinct_degree(f: &UniPoly) -> Vec<(UniPoly, usize)> {
    let p = f.modulus();
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = UniPoly::x(p);
    let mut h = x.rem(&rest);
    let mut d = 1usize;
    while rest.degree().unwrap_or(0) >= 2 * d {
        h = h.pow_mod(p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.exact_div(&g).expect("gcd divides");
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if let Some(deg) = rest.degree() {
        if deg > 0 {
            out.push((rest, deg));
        }
    }
    out
}

/// `a^((p^d - 1)/2) mod f`, computed as a norm-like product to avoid huge exponents.
fn half_power(a: &UniPoly, d: usize, f: &UniPoly) -> UniPoly {
    let p = f.modulus();
    let mut t = a.rem(f);
    let mut s = t.clone();
    for _ in 1..d {
        t = t.pow_mod(p, f);
        s = s.mul(&t).rem(f);
    }
    s.pow_mod((p - 1) / 2, f)
}

fn trace_map(a: &UniPoly, d: usize, f: &UniPoly) -> UniPoly {
    let mut t = a.rem(f);
    let mut s = t.clone();
    for _ in 1..d {
        t = t.mul(&t).rem(f);
        s = s.add(&t);
    }
    s
}

/// Cantor–Zassenhaus: split a product of distinct monic irreducibles of degree `d`.
pub fn equal_degree(f: &UniPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<UniPoly> {
    let p = f.modulus();
    let n = f.degree().unwrap_or(0);
    if n == d {
        return vec![f.clone()];
    }
    loop {
        let a = UniPoly::new((0..n).map(|_| rng.random_range(0..p)).collect(), p);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            trace_map(&a, d, f)
        } else {
            half_power(&a, d, f).sub(&UniPoly::constant(1, p))
        };
        let g = b.gcd(f);
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < n {
            let h = f.exact_div(&g).expect("gcd divides");
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}

/// Complete factorization of a nonzero polynomial.
pub fn factor(f: &UniPoly, rng: &mut ChaCha8Rng) -> UniFactorization {
    assert!(!f.is_zero(), "cannot factor zero");
    let unit = f.lead();
    let mut factors = Vec::new();
    for (sq, mult) in squarefree_decomposition(&f.monic()) {
        for (block, d) in distinct_degree(&sq) {
            for g in equal_degree(&block, d, rng) {
                factors.push((g, mult));
            }
        }
    }
    factors.sort();
    UniFactorization { unit, factors }
}

/// Irreducibility without a full factorization.
pub fn is_irreducible(f: &UniPoly) -> bool {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    let f = f.monic();
    if !f.gcd(&f.derivative()).is_one() {
        return false;
    }
    let dd = distinct_degree(&f);
    dd.len() == 1 && dd[0].1 == n
}

/// Roots in GF(p) by splitting `gcd(f, x^p - x)`.
pub fn roots(f: &UniPoly, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let p = f.modulus();
    if f.is_zero() {
        return Vec::new();
    }
    let f = f.monic();
    let x = UniPoly::x(p);
    let lin = x.pow_mod(p, &f).sub(&x).gcd(&f);
    if lin.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut r: Vec<u64> = equal_degree(&lin, 1, rng)
        .into_iter()
        .map(|g| sub_mod(0, g.coeff(0), p))
        .collect();
    r.sort_unstable();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn x_squared_minus_one_mod_7() {
        let f = UniPoly::new(vec![6, 0, 1], 7);
        let fac = factor(&f, &mut rng());
        let got: Vec<_> = fac.factors.iter().map(|(g, e)| (g.coeffs().to_vec(), *e)).collect();
        assert_eq!(got, vec![(vec![1, 1], 1), (vec![6, 1], 1)]);
    }

    #[test]
    fn x_squared_plus_one_irreducible_mod_7() {
        let f = UniPoly::new(vec![1, 0, 1], 7);
        assert!(is_irreducible(&f));
        assert!((0..7).all(|a| f.eval(a) != 0));
        assert_eq!(factor(&f, &mut rng()).factors.len(), 1);
    }

    #[test]
    fn cube_of_x_mod_5() {
        let f = UniPoly::new(vec![0, 0, 0, 1], 5);
        let fac = factor(&f, &mut rng());
        assert_eq!(fac.factors, vec![(UniPoly::x(5), 3)]);
    }

    #[test]
    fn pth_power_multiplicity() {
        // (x + 1)^7 * (x + 2) over GF(7)
        let p = 7;
        let mut f = UniPoly::new(vec![2, 1], p);
        for _ in 0..7 {
            f = f.mul(&UniPoly::new(vec![1, 1], p));
        }
        let fac = factor(&f, &mut rng());
        assert_eq!(fac.expand(p), f);
        assert!(fac.factors.contains(&(UniPoly::new(vec![1, 1], p), 7)));
    }

    #[test]
    fn characteristic_two_splitting() {
        // x^4 + x = x (x + 1)(x^2 + x + 1) over GF(2)
        let f = UniPoly::new(vec![0, 1, 0, 0, 1], 2);
        let fac = factor(&f, &mut rng());
        assert_eq!(fac.factors.len(), 3);
        assert_eq!(fac.expand(2), f);
    }

    #[test]
    fn roots_of_split_poly() {
        let p = 101;
        let f = UniPoly::linear(3, p).mul(&UniPoly::linear(50, p)).mul(&UniPoly::new(vec![2, 0, 1], p));
        assert_eq!(roots(&f, &mut rng()), vec![3, 50]);
    }

    #[test]
    fn xgcd_bezout() {
        let p = 13;
        let a = UniPoly::new(vec![1, 2, 3, 1], p);
        let b = UniPoly::new(vec![5, 0, 1], p);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn factorization_remultiplies(c in prop::collection::vec(0u64..13, 1..12), seed in 0u64..1000) {
                let f = UniPoly::new(c, 13);
                prop_assume!(!f.is_zero());
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let fac = factor(&f, &mut r);
                prop_assert_eq!(fac.expand(13), f);
                for (g, _) in &fac.factors {
                    prop_assert!(is_irreducible(g));
                    prop_assert_eq!(g.lead(), 1);
                }
            }

            #[test]
            fn factorization_is_seed_independent(c in prop::collection::vec(0u64..5, 1..9), s1 in 0u64..100, s2 in 100u64..200) {
                let f = UniPoly::new(c, 5);
                prop_assume!(!f.is_zero());
                let a = factor(&f, &mut ChaCha8Rng::seed_from_u64(s1));
                let b = factor(&f, &mut ChaCha8Rng::seed_from_u64(s2));
                prop_assert_eq!(a, b);
            }
        }
    }
}
