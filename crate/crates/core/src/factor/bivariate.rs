//! Dense bivariate polynomials over GF(p) and exact factorization by
//! specialization, multi-factor Hensel lifting and subset recombination.
//!
//! A `BiPoly` is stored as a polynomial in `x` whose coefficients are
//! `UniPoly`s in `y`.

use rand_chacha::ChaCha8Rng;

use super::univariate::{self, UniPoly};
use crate::coeff::inv_mod;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiPoly {
    c: Vec<UniPoly>,
    p: u64,
}

impl PartialOrd for BiPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BiPoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.c
            .len()
            .cmp(&other.c.len())
            .then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}

/// Truncated power series in `y` with coefficients in GF(p)[x].
type Series = Vec<UniPoly>;

impl BiPoly {
    pub fn new(mut c: Vec<UniPoly>, p: u64) -> Self {
        while c.last().is_some_and(UniPoly::is_zero) {
            c.pop();
        }
        BiPoly { c, p }
    }

    pub fn zero(p: u64) -> Self {
        BiPoly { c: Vec::new(), p }
    }

    /// From `(i, j, coeff)` triples meaning `coeff * x^i * y^j`.
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, usize, u64)>, p: u64) -> Self {
        let mut grid: Vec<Vec<u64>> = Vec::new();
        for (i, j, v) in terms {
            if grid.len() <= i {
                grid.resize(i + 1, Vec::new());
            }
            if grid[i].len() <= j {
                grid[i].resize(j + 1, 0);
            }
            grid[i][j] = (grid[i][j] + v % p) % p;
        }
        Self::new(grid.into_iter().map(|r| UniPoly::new(r, p)).collect(), p)
    }

    /// A polynomial in `y` alone.
    pub fn from_y(g: UniPoly) -> Self {
        let p = g.modulus();
        Self::new(vec![g], p)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.c.iter().enumerate().flat_map(|(i, row)| {
            row.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(move |(j, &v)| (i, j, v))
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg_x(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg_y(&self) -> usize {
        self.c.iter().filter_map(UniPoly::degree).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms().map(|(i, j, _)| i + j).max()
    }

    /// Leading coefficient in `x`.
    pub fn lc(&self) -> UniPoly {
        self.c.last().cloned().unwrap_or_else(|| UniPoly::zero(self.p))
    }

    pub fn coeff_x(&self, i: usize) -> UniPoly {
        self.c.get(i).cloned().unwrap_or_else(|| UniPoly::zero(self.p))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff_x(i).add(&o.coeff_x(i))).collect(), self.p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff_x(i).sub(&o.coeff_x(i))).collect(), self.p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let mut c = vec![UniPoly::zero(self.p); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Self::new(c, self.p)
    }

    pub fn scale_y(&self, g: &UniPoly) -> Self {
        Self::new(self.c.iter().map(|r| r.mul(g)).collect(), self.p)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_y(UniPoly::constant(1, self.p));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative_x(&self) -> Self {
        let p = self.p;
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, r)| r.scale(i as u64 % p))
                .collect(),
            p,
        )
    }

    pub fn derivative_y(&self) -> Self {
        Self::new(self.c.iter().map(UniPoly::derivative).collect(), self.p)
    }

    /// `self(x, a)` as a polynomial in `x`.
    pub fn eval_y(&self, a: u64) -> UniPoly {
        UniPoly::new(self.c.iter().map(|r| r.eval(a)).collect(), self.p)
    }

    pub fn eval(&self, x: u64, y: u64) -> u64 {
        self.eval_y(y).eval(x)
    }

    /// `self(x, y + a)`.
    pub fn shift_y(&self, a: u64) -> Self {
        Self::new(self.c.iter().map(|r| r.taylor_shift(a)).collect(), self.p)
    }

    /// Exchange the roles of `x` and `y`.
    pub fn transpose(&self) -> Self {
        Self::from_terms(self.terms().map(|(i, j, v)| (j, i, v)), self.p)
    }

    /// Monic gcd of the `y`-coefficients.
    pub fn content(&self) -> UniPoly {
        self.c
            .iter()
            .fold(UniPoly::zero(self.p), |g, r| g.gcd(r))
    }

    /// Divide out the content and make the leading coefficient's top term 1.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let cont = self.content();
        let q = Self::new(
            self.c
                .iter()
                .map(|r| r.exact_div(&cont).expect("content divides"))
                .collect(),
            self.p,
        );
        q.normalized()
    }

    /// Scale by a constant so the leading `y`-coefficient of `lc` is 1.
    pub fn normalized(&self) -> Self {
        match inv_mod(self.lc().lead(), self.p) {
            Some(inv) => Self::new(self.c.iter().map(|r| r.scale(inv)).collect(), self.p),
            None => self.clone(),
        }
    }

    /// Exact quotient in GF(p)[x, y], if `d` divides `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let dx = d.deg_x()?;
        let dl = d.lc();
        let mut r = self.clone();
        let mut q = vec![UniPoly::zero(self.p); self.c.len().saturating_sub(dx)];
        while let Some(rx) = r.deg_x() {
            if rx < dx {
                return None;
            }
            let coef = r.lc().exact_div(&dl)?;
            let k = rx - dx;
            q[k] = q[k].add(&coef);
            let mut shifted = vec![UniPoly::zero(self.p); k];
            shifted.extend(d.c.iter().map(|v| v.mul(&coef)));
            r = r.sub(&Self::new(shifted, self.p));
            if r.deg_x() == Some(rx) {
                return None;
            }
        }
        Some(Self::new(q, self.p))
    }

    /// `lc(d)^(deg a - deg d + 1) * a mod d` in `x`.
    fn pseudo_rem(&self, d: &Self) -> Self {
        let dx = d.deg_x().expect("nonzero divisor");
        let dl = d.lc();
        let mut r = self.clone();
        while let Some(rx) = r.deg_x() {
            if rx < dx {
                break;
            }
            let rl = r.lc();
            let k = rx - dx;
            let mut shifted = vec![UniPoly::zero(self.p); k];
            shifted.extend(d.c.iter().map(|v| v.mul(&rl)));
            r = r.scale_y(&dl).sub(&Self::new(shifted, self.p));
        }
        r
    }

    /// Normalized gcd via the primitive remainder sequence.
    pub fn gcd(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.primitive_with_content();
        }
        if o.is_zero() {
            return self.primitive_with_content();
        }
        let cont = self.content().gcd(&o.content());
        let (mut a, mut b) = (self.primitive(), o.primitive());
        if a.deg_x() < b.deg_x() {
            std::mem::swap(&mut a, &mut b);
        }
        while b.deg_x().is_some_and(|d| d > 0) {
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive() };
        }
        let g = if b.is_zero() {
            a
        } else {
            // b is a nonzero polynomial in y alone, so the x-part of the gcd is trivial
            Self::from_y(UniPoly::constant(1, self.p))
        };
        g.scale_y(&cont).normalized()
    }

    fn primitive_with_content(&self) -> Self {
        self.primitive().scale_y(&self.content()).normalized()
    }

    fn to_series(&self, k: usize) -> Series {
        (0..k)
            .map(|j| UniPoly::new(self.c.iter().map(|r| r.coeff(j)).collect(), self.p))
            .collect()
    }

    fn from_series(s: &Series, p: u64) -> Self {
        Self::from_terms(
            s.iter()
                .enumerate()
                .flat_map(|(j, row)| row.coeffs().iter().enumerate().map(move |(i, &v)| (i, j, v)).collect::<Vec<_>>()),
            p,
        )
    }
}

fn series_mul(a: &Series, b: &Series, k: usize, p: u64) -> Series {
    let mut out = vec![UniPoly::zero(p); k];
    for (i, u) in a.iter().enumerate().take(k) {
        if u.is_zero() {
            continue;
        }
        for (j, v) in b.iter().enumerate().take(k - i) {
            out[i + j] = out[i + j].add(&u.mul(v));
        }
    }
    out
}

/// Inverse of a univariate power series `g(y)` with `g(0) != 0`, mod `y^k`.
fn series_inverse(g: &UniPoly, k: usize) -> Vec<u64> {
    let p = g.modulus();
    let inv0 = inv_mod(g.coeff(0), p).expect("unit constant term");
    let mut out = vec![0u64; k];
    for n in 0..k {
        let mut acc = if n == 0 { 1 } else { 0 };
        for i in 1..=n {
            let t = crate::coeff::mul_mod(g.coeff(i), out[n - i], p);
            acc = crate::coeff::sub_mod(acc, t, p);
        }
        out[n] = crate::coeff::mul_mod(acc, inv0, p);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiFactorization {
    pub unit: u64,
    pub factors: Vec<(BiPoly, u32)>,
}

impl BiFactorization {
    pub fn expand(&self, p: u64) -> BiPoly {
        let mut acc = BiPoly::from_y(UniPoly::constant(self.unit, p));
        for (f, e) in &self.factors {
            acc = acc.mul(&f.pow(*e));
        }
        acc
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BivariateError {
    #[error("no squarefree specialization exists in GF({0})")]
    NoGoodSpecialization(u64),
    #[error("x-degree {deg} is not below the characteristic {p}")]
    DegreeNotBelowCharacteristic { deg: usize, p: u64 },
}

/// Full factorization over GF(p). Requires `deg_x < p` and `deg_y < p`.
pub fn factor(f: &BiPoly, rng: &mut ChaCha8Rng) -> Result<BiFactorization, BivariateError> {
    let p = f.modulus();
    assert!(!f.is_zero(), "cannot factor zero");
    for deg in [f.deg_x().unwrap_or(0), f.deg_y()] {
        if deg as u64 >= p {
            return Err(BivariateError::DegreeNotBelowCharacteristic { deg, p });
        }
    }
    let unit = f.lc().lead();
    let mut factors = Vec::new();
    let cont = f.content();
    if cont.degree().unwrap_or(0) > 0 {
        for (g, e) in univariate::factor(&cont, rng).factors {
            factors.push((BiPoly::from_y(g), e));
        }
    }
    let pp = f.primitive();
    if pp.deg_x().unwrap_or(0) > 0 {
        for (sq, mult) in squarefree(&pp) {
            for g in factor_squarefree(&sq, rng)? {
                factors.push((g, mult));
            }
        }
    }
    factors.sort();
    Ok(BiFactorization { unit, factors })
}

/// Yun's algorithm in `x` over GF(p)(y); valid because degrees are below p.
fn squarefree(a: &BiPoly) -> Vec<(BiPoly, u32)> {
    let mut out = Vec::new();
    let da = a.derivative_x();
    let mut c = a.gcd(&da);
    let mut w = a.exact_div(&c).expect("gcd divides").normalized();
    let mut i = 1u32;
    while w.deg_x().unwrap_or(0) > 0 {
        let y = w.gcd(&c);
        let z = w.exact_div(&y).expect("gcd divides").normalized();
        if z.deg_x().unwrap_or(0) > 0 {
            out.push((z, i));
        }
        i += 1;
        c = c.exact_div(&y).expect("gcd divides");
        w = y;
    }
    out
}

/// Irreducible factors of a primitive polynomial that is squarefree in `x`.
fn factor_squarefree(q: &BiPoly, rng: &mut ChaCha8Rng) -> Result<Vec<BiPoly>, BivariateError> {
    let p = q.modulus();
    let n = q.deg_x().unwrap_or(0);
    if n <= 1 {
        return Ok(vec![q.normalized()]);
    }
    let shift = (0..p)
        .find(|&a| {
            let img = q.eval_y(a);
            img.degree() == Some(n) && img.gcd(&img.derivative()).is_one()
        })
        .ok_or(BivariateError::NoGoodSpecialization(p))?;
    let qs = q.shift_y(shift);
    let image = qs.eval_y(0);
    let uni = univariate::factor(&image, rng);
    if uni.factors.len() == 1 {
        return Ok(vec![q.normalized()]);
    }
    let lc = qs.lc();
    let k = qs.deg_y() + lc.degree().unwrap_or(0) + 1;
    let lifted = hensel_lift(&qs, &lc, &uni.factors.iter().map(|(g, _)| g.clone()).collect::<Vec<_>>(), k);

    let mut found = Vec::new();
    let mut rem: Vec<usize> = (0..lifted.len()).collect();
    let mut cur = qs.clone();
    let mut size = 1usize;
    while 2 * size <= rem.len() {
        let mut hit = None;
        for subset in combinations(&rem, size) {
            let mut prod: Series = vec![UniPoly::zero(p); k];
            prod[0] = UniPoly::constant(1, p);
            for &i in &subset {
                prod = series_mul(&prod, &lifted[i], k, p);
            }
            let lcs: Series = cur.lc().coeffs().iter().map(|&v| UniPoly::constant(v, p)).collect();
            let cand = BiPoly::from_series(&series_mul(&lcs, &prod, k, p), p).primitive();
            if let Some(cof) = cur.exact_div(&cand) {
                hit = Some((subset, cand, cof));
                break;
            }
        }
        match hit {
            Some((subset, cand, cof)) => {
                rem.retain(|i| !subset.contains(i));
                found.push(cand);
                cur = cof;
            }
            None => size += 1,
        }
    }
    if cur.deg_x().unwrap_or(0) > 0 {
        found.push(cur.primitive());
    }
    let undo = (p - shift) % p;
    Ok(found.into_iter().map(|g| g.shift_y(undo).normalized()).collect())
}

/// Lift `q / lc(q) = prod f_i (mod y)` to `mod y^k`, with monic lifts.
fn hensel_lift(q: &BiPoly, lc: &UniPoly, fs: &[UniPoly], k: usize) -> Vec<Series> {
    let p = q.modulus();
    let inv = series_inverse(lc, k);
    let inv_series: Series = inv.iter().map(|&v| UniPoly::constant(v, p)).collect();
    let target = series_mul(&q.to_series(k), &inv_series, k, p);

    let total = fs.iter().fold(UniPoly::constant(1, p), |a, f| a.mul(f));
    let bezout: Vec<UniPoly> = fs
        .iter()
        .map(|f| {
            let others = total.exact_div(f).expect("factor divides");
            others.inv_mod(f).expect("coprime factors")
        })
        .collect();

    let mut lifted: Vec<Series> = fs
        .iter()
        .map(|f| {
            let mut s = vec![UniPoly::zero(p); k];
            s[0] = f.clone();
            s
        })
        .collect();
    for j in 1..k {
        let mut prod: Series = vec![UniPoly::zero(p); j + 1];
        prod[0] = UniPoly::constant(1, p);
        for g in &lifted {
            prod = series_mul(&prod, g, j + 1, p);
        }
        let err = target[j].sub(&prod[j]);
        if err.is_zero() {
            continue;
        }
        for (i, f) in fs.iter().enumerate() {
            lifted[i][j] = err.mul(&bezout[i]).rem(f);
        }
    }
    lifted
}

fn combinations(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    let n = items.len();
    if size > n {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - size {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A GF(p)-point on `f = 0` where the gradient does not vanish.
pub fn smooth_point(f: &BiPoly, rng: &mut ChaCha8Rng) -> Option<(u64, u64)> {
    let p = f.modulus();
    let fx = f.derivative_x();
    let fy = f.derivative_y();
    for y in 0..p {
        let slice = f.eval_y(y);
        if slice.is_zero() {
            continue;
        }
        for x in univariate::roots(&slice, rng) {
            if fx.eval(x, y) != 0 || fy.eval(x, y) != 0 {
                return Some((x, y));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(3)
    }

    fn bp(terms: &[(usize, usize, u64)], p: u64) -> BiPoly {
        BiPoly::from_terms(terms.iter().copied(), p)
    }

    #[test]
    fn conic_is_irreducible() {
        // x^2 + y^2 + 1 over GF(101)
        let f = bp(&[(2, 0, 1), (0, 2, 1), (0, 0, 1)], 101);
        let fac = factor(&f, &mut rng()).unwrap();
        assert!(fac.is_irreducible());
        assert!(smooth_point(&f, &mut rng()).is_some());
    }

    #[test]
    fn product_recovered() {
        let p = 101;
        let a = bp(&[(2, 0, 1), (0, 3, 5), (1, 1, 7), (0, 0, 2)], p);
        let b = bp(&[(1, 2, 3), (2, 0, 1), (0, 1, 9)], p);
        let c = bp(&[(0, 1, 1), (0, 0, 4)], p);
        let f = a.mul(&b).mul(&b).mul(&c);
        let fac = factor(&f, &mut rng()).unwrap();
        assert_eq!(fac.expand(p), f);
        assert_eq!(fac.factors.len(), 3);
        assert!(fac.factors.iter().any(|(g, e)| *e == 2 && *g == b.normalized()));
    }

    #[test]
    fn non_monic_leading_coefficient() {
        // (y x + 1)(y x^2 + x + y) over GF(13)
        let p = 13;
        let a = bp(&[(1, 1, 1), (0, 0, 1)], p);
        let b = bp(&[(2, 1, 1), (1, 0, 1), (0, 1, 1)], p);
        let f = a.mul(&b);
        let fac = factor(&f, &mut rng()).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.expand(p), f);
    }

    #[test]
    fn linear_factors_over_split_image() {
        // x^2 - y^2 - y^3 is irreducible although its image at y = 0 is x^2.
        let p = 101;
        let f = bp(&[(2, 0, 1), (0, 2, 100), (0, 3, 100)], p);
        assert!(factor(&f, &mut rng()).unwrap().is_irreducible());
    }

    #[test]
    fn gcd_example() {
        let p = 31;
        let g = bp(&[(1, 1, 1), (0, 0, 3)], p);
        let a = g.mul(&bp(&[(2, 0, 1), (0, 1, 1)], p));
        let b = g.mul(&bp(&[(1, 0, 1), (0, 2, 2)], p));
        assert_eq!(a.gcd(&b), g.normalized());
    }

    /// Degree <= 3 polynomials are reducible exactly when they have a linear factor.
    fn has_linear_factor(f: &BiPoly) -> bool {
        let p = f.modulus();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let l = bp(&[(1, 0, a), (0, 1, b), (0, 0, c)], p);
                    if f.exact_div(&l).is_some() {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn exhaustive_oracle_small_fields() {
        use rand::Rng;
        let mut r = ChaCha8Rng::seed_from_u64(99);
        let (mut red, mut irred) = (0, 0);
        for p in [5u64, 7] {
            for _ in 0..150 {
                let deg = r.random_range(2..=3usize);
                let mut terms = Vec::new();
                for i in 0..=deg {
                    for j in 0..=deg - i {
                        terms.push((i, j, r.random_range(0..p)));
                    }
                }
                let f = BiPoly::from_terms(terms, p);
                if f.total_degree() != Some(deg) || f.deg_x().unwrap_or(0) == 0 {
                    continue;
                }
                match factor(&f, &mut r) {
                    Ok(fac) => {
                        assert_eq!(fac.expand(p), f);
                        assert_eq!(!fac.is_irreducible(), has_linear_factor(&f), "{f:?}");
                        if fac.is_irreducible() {
                            irred += 1;
                        } else {
                            red += 1;
                        }
                    }
                    Err(BivariateError::NoGoodSpecialization(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(red > 10 && irred > 10, "{red} reducible, {irred} irreducible");
    }

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(&[4, 5, 6], 2), vec![vec![4, 5], vec![4, 6], vec![5, 6]]);
        assert_eq!(combinations(&[1], 1), vec![vec![1]]);
    }
}
