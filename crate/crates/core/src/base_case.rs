//! The starting hypersurface of the induction: the polynomials `g`, `c_j`,
//! `F`, and the initial `HypersurfaceState` with `s = 0`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{is_prime, CoeffError, CoeffRing, ParamAssignment, ParamCoeff};
use crate::poly::{int_poly, PolyError, SparsePoly, VarUniverse};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("index j = {j} outside 1..={max}")]
    IndexOutOfRange { j: u64, max: u64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseParams {
    pub n: u32,
    pub m: u32,
    pub r: u32,
    pub d: u32,
    pub p: u64,
}

impl BaseParams {
    pub fn new(n: u32, m: u32, r: u32, d: u32, p: u64) -> Result<Self, BaseError> {
        let bad = |msg: String| Err(BaseError::InvalidParams(msg));
        if n < 2 {
            return bad(format!("n = {n} must be at least 2"));
        }
        if n > 30 {
            return bad(format!("n = {n} is too large"));
        }
        if m < 2 {
            return bad(format!("m = {m} must be at least 2"));
        }
        let rmax = (1u64 << n) - 2;
        if r < 1 || r as u64 > rmax {
            return bad(format!("r = {r} must lie in 1..={rmax}"));
        }
        if d < m + n {
            return bad(format!("d = {d} must be at least m + n = {}", m + n));
        }
        if !is_prime(p) {
            return bad(format!("p = {p} is not prime"));
        }
        if (m as u64).is_multiple_of(p) {
            return bad(format!("m = {m} is not invertible mod p = {p}"));
        }
        if p <= d as u64 {
            return bad(format!("p = {p} must exceed d = {d}"));
        }
        Ok(BaseParams { n, m, r, d, p })
    }

    /// `m * ceil((n + 1) / m)`
    pub fn deg_g(&self) -> u32 {
        self.m * (self.n + 1).div_ceil(self.m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub n: u32,
    pub m: u32,
    pub r: u32,
    pub s: u32,
    pub d: u32,
}

/// A parameter is either left symbolic or pinned to a residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamValue {
    Symbolic,
    Value(u64),
}

/// Per-parameter settings; names absent from the map count as symbolic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamSettings(pub BTreeMap<String, ParamValue>);

impl ParamSettings {
    pub fn symbolic() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> ParamValue {
        self.0.get(name).copied().unwrap_or(ParamValue::Symbolic)
    }

    pub fn set(&mut self, name: &str, v: ParamValue) {
        self.0.insert(name.to_string(), v);
    }

    /// Values for checks: pinned ones as given, symbolic ones drawn nonzero from `seed`.
    pub fn assignment(&self, ring: &CoeffRing, seed: u64) -> ParamAssignment {
        let p = ring.modulus();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0x7061_7261);
        let mut out = ParamAssignment::new();
        for name in ring.params().names() {
            let drawn = rng.random_range(1..p);
            let v = match self.get(name) {
                ParamValue::Value(v) => v,
                ParamValue::Symbolic => drawn,
            };
            out.set(name, v);
        }
        out
    }
}

/// The data `(f0, a0, a[i][j], e, h)` describing one stage of the induction.
///
/// `a` has `m` rows and `r + 1` columns; `a[i-1][j-1]` multiplies `y_j^i`.
/// Column `r + 1` only ever holds the coefficient of `y_{r+1}^m` coming from
/// `F`; it is never selected as `j0` and has no `e` entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypersurfaceState {
    pub ring: Arc<CoeffRing>,
    pub vars: Arc<VarUniverse>,
    pub dims: Dims,
    pub f0: SparsePoly,
    pub a0: SparsePoly,
    pub a: Vec<Vec<SparsePoly>>,
    pub e: Vec<u32>,
    pub h_poly: SparsePoly,
    pub params: ParamSettings,
}

impl HypersurfaceState {
    pub fn a_ij(&self, i: u32, j: u32) -> &SparsePoly {
        &self.a[i as usize - 1][j as usize - 1]
    }

    /// `f0 + a0 + sum_{i,j} a[i][j] * y_j^i`, including the `y_{r+1}` column.
    pub fn defining_poly(&self) -> SparsePoly {
        let mut acc = &self.f0 + &self.a0;
        for (i0, row) in self.a.iter().enumerate() {
            for (j0, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let y = format!("y{}", j0 + 1);
                acc = &acc + &c.mul_var_pow(&y, i0 as u32 + 1).expect("y variable in universe");
            }
        }
        acc
    }

    /// `f0 + a0`, the polynomial whose irreducibility is required.
    pub fn f0_plus_a0(&self) -> SparsePoly {
        &self.f0 + &self.a0
    }

    /// `floor(val_x0(a[m][j]) / m)`, or `None` if `a[m][j] = 0`.
    pub fn recompute_e(&self, j: u32) -> Option<u32> {
        let v = self.a_ij(self.dims.m, j).valuation("x0").ok()??;
        Some(v / self.dims.m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HChoice {
    /// Chain form when p divides d, power sum otherwise.
    #[default]
    Auto,
    PowerSum,
    Chain,
}

fn ring_and_vars(bp: &BaseParams) -> Result<(Arc<CoeffRing>, Arc<VarUniverse>), BaseError> {
    Ok((CoeffRing::standard(bp.p)?, VarUniverse::standard(bp.n as usize, bp.r as usize, 0, false)))
}

fn var(vars: &Arc<VarUniverse>, ring: &Arc<CoeffRing>, name: &str, e: u32) -> SparsePoly {
    SparsePoly::var_pow(vars, ring, name, e).expect("standard variable")
}

fn sign(n: u32) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn x_product(vars: &Arc<VarUniverse>, ring: &Arc<CoeffRing>, n: u32) -> SparsePoly {
    (1..=n).fold(int_poly(vars, ring, 1), |acc, i| &acc * &var(vars, ring, &format!("x{i}"), 1))
}

/// `g = pi * (sum x_i^k)^m - (-1)^n x0^(mk - n) x1...xn` with `k = ceil((n+1)/m)`.
pub fn build_g(bp: &BaseParams) -> Result<SparsePoly, BaseError> {
    let (ring, vars) = ring_and_vars(bp)?;
    build_g_in(bp, &vars, &ring)
}

pub(crate) fn build_g_in(
    bp: &BaseParams,
    vars: &Arc<VarUniverse>,
    ring: &Arc<CoeffRing>,
) -> Result<SparsePoly, BaseError> {
    let k = (bp.n + 1).div_ceil(bp.m);
    let power_sum = (0..=bp.n).fold(SparsePoly::zero(vars, ring), |acc, i| {
        &acc + &var(vars, ring, &format!("x{i}"), k)
    });
    let pi = SparsePoly::constant(vars, ring, ParamCoeff::param(ring, "pi")?);
    let first = &pi * &power_sum.pow(bp.m);
    let second = var(vars, ring, "x0", bp.m * k - bp.n) * x_product(vars, ring, bp.n);
    Ok(&first - &second.scale_int(sign(bp.n)))
}

/// `c_j = prod (-x_i)^{eps_i}` for the binary digits `eps` of `j`.
pub fn build_cj(
    j: u64,
    n: u32,
    vars: &Arc<VarUniverse>,
    ring: &Arc<CoeffRing>,
) -> Result<SparsePoly, BaseError> {
    let max = (1u64 << n) - 2;
    if j < 1 || j > max {
        return Err(BaseError::IndexOutOfRange { j, max });
    }
    let mut acc = int_poly(vars, ring, 1);
    for i in 1..=n {
        if (j >> (i - 1)) & 1 == 1 {
            acc = &acc * &var(vars, ring, &format!("x{i}"), 1).neg();
        }
    }
    Ok(acc)
}

/// `F = g x0^(m+n-deg g) + sum_j x0^(n - deg c_j) c_j y_j^m + (-1)^n x1...xn y_{r+1}^m`.
#[allow(non_snake_case)]
pub fn build_F(bp: &BaseParams) -> Result<SparsePoly, BaseError> {
    let (ring, vars) = ring_and_vars(bp)?;
    let mut acc = build_g_in(bp, &vars, &ring)?.mul_var_pow("x0", bp.m + bp.n - bp.deg_g())?;
    for j in 1..=bp.r {
        let c = build_cj(j as u64, bp.n, &vars, &ring)?;
        let dc = j.count_ones();
        let t = c.mul_var_pow("x0", bp.n - dc)?.mul_var_pow(&format!("y{j}"), bp.m)?;
        acc = &acc + &t;
    }
    let tail = x_product(&vars, &ring, bp.n)
        .scale_int(sign(bp.n))
        .mul_var_pow(&format!("y{}", bp.r + 1), bp.m)?;
    Ok(&acc + &tail)
}

/// The irreducible degree-`d` form `h`.
pub fn build_h(bp: &BaseParams, choice: HChoice) -> Result<SparsePoly, BaseError> {
    let (ring, vars) = ring_and_vars(bp)?;
    build_h_in(bp, choice, &vars, &ring)
}

fn build_h_in(
    bp: &BaseParams,
    choice: HChoice,
    vars: &Arc<VarUniverse>,
    ring: &Arc<CoeffRing>,
) -> Result<SparsePoly, BaseError> {
    let chain = match choice {
        HChoice::Auto => (bp.d as u64).is_multiple_of(bp.p),
        HChoice::PowerSum => false,
        HChoice::Chain => true,
    };
    let d = bp.d;
    Ok(if chain {
        (1..=bp.n).fold(var(vars, ring, "x0", d), |acc, i| {
            &acc + &(&var(vars, ring, &format!("x{}", i - 1), 1) * &var(vars, ring, &format!("x{i}"), d - 1))
        })
    } else {
        (0..=bp.n).fold(SparsePoly::zero(vars, ring), |acc, i| {
            &acc + &var(vars, ring, &format!("x{i}"), d)
        })
    })
}

/// Initial state: `f0 = rho h + x0^(d - deg g) g`, `a0 = 0`, `a[i][j] = 0`
/// for `i < m`, `a[m][j] = x0^(d - m - deg c_j) c_j`, `h_poly = 1`.
pub fn build_base_state(bp: &BaseParams, h_choice: HChoice) -> Result<HypersurfaceState, BaseError> {
    let (ring, vars) = ring_and_vars(bp)?;
    let rho = SparsePoly::constant(&vars, &ring, ParamCoeff::param(&ring, "rho")?);
    let h = build_h_in(bp, h_choice, &vars, &ring)?;
    let g = build_g_in(bp, &vars, &ring)?;
    let f0 = &(&rho * &h) + &g.mul_var_pow("x0", bp.d - bp.deg_g())?;
    let zero = SparsePoly::zero(&vars, &ring);
    let (m, r) = (bp.m as usize, bp.r as usize);
    let mut a = vec![vec![zero.clone(); r + 1]; m];
    let mut e = Vec::with_capacity(r);
    for j in 1..=bp.r {
        let c = build_cj(j as u64, bp.n, &vars, &ring)?;
        let shift = bp.d - bp.m - j.count_ones();
        a[m - 1][j as usize - 1] = c.mul_var_pow("x0", shift)?;
        e.push(shift / bp.m);
    }
    // y_{r+1}^m coefficient of x0^(d-m-n) F
    a[m - 1][r] = x_product(&vars, &ring, bp.n)
        .scale_int(sign(bp.n))
        .mul_var_pow("x0", bp.d - bp.m - bp.n)?;
    Ok(HypersurfaceState {
        dims: Dims {
            n: bp.n,
            m: bp.m,
            r: bp.r,
            s: 0,
            d: bp.d,
        },
        f0,
        a0: zero,
        a,
        e,
        h_poly: int_poly(&vars, &ring, 1),
        params: ParamSettings::symbolic(),
        ring,
        vars,
    })
}
