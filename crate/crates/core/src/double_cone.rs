//! The double cone family over a state, the induction step that replaces
//! the `j0` column by the transformed coefficients `a'_i`, and the symbolic
//! and sampled checks around them.

use std::sync::Arc;

use num_integer::binomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::base_case::{Dims, HypersurfaceState};
use crate::coeff::{CoeffError, FieldElem, ParamAssignment, ParamCoeff};
use crate::factor::{self, univariate::UniPoly, ParamChoice, Verdict};
use crate::poly::{int_poly, PolyError, SparsePoly, VarUniverse};
use crate::report::Report;

/// Failure-bound target for the irreducibility condition, as a power of two.
pub const IRREDUCIBILITY_BITS: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DoubleConeError {
    #[error("j0 = {j0} outside 1..={r}")]
    IndexOutOfRange { j0: u32, r: u32 },
    #[error("e[{j0}] = 0, the column has no x0-power left to spend")]
    EjTooSmall { j0: u32 },
    #[error("x0^{i} does not divide a[{i}][{j0}]")]
    DivisionFailure { i: u32, j0: u32 },
    #[error("no j has e[j] >= 1")]
    EjExhausted,
    #[error("no point found in the sampling region within the budget")]
    SamplingExhausted,
    #[error("sampling region must lie inside x0 != 0")]
    RegionRejected,
    #[error("parameter `{0}` must be assigned a nonzero value")]
    ZeroParameter(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

type Result<T> = std::result::Result<T, DoubleConeError>;

#[derive(Clone, Debug)]
pub struct DoubleConeFamily {
    pub state_in: HypersurfaceState,
    pub j0: u32,
    pub l: u32,
    /// State universe plus `z, w`.
    pub vars: Arc<VarUniverse>,
    /// Everything not involving `y_{j0}`, in the state universe.
    pub f: SparsePoly,
    /// `a_0 .. a_l` with `deg a_i = d - 2i`, in the state universe.
    pub a: Vec<SparsePoly>,
    pub f1: SparsePoly,
    pub f2: SparsePoly,
    pub y0_eq: SparsePoly,
    pub y1_eq: SparsePoly,
    pub z_eq: SparsePoly,
}

impl DoubleConeFamily {
    pub fn y_name(&self) -> String {
        format!("y{}", self.j0)
    }

    /// `lam * y_{j0} + x0`
    fn lam_y_plus_x0(&self) -> SparsePoly {
        lam_y_plus_x0(&self.vars, &self.state_in, self.j0)
    }
}

fn lam_y_plus_x0(vars: &Arc<VarUniverse>, st: &HypersurfaceState, j0: u32) -> SparsePoly {
    let ring = &st.ring;
    let lam = ParamCoeff::param(ring, "lam").expect("standard parameter");
    let y = SparsePoly::var(vars, ring, &format!("y{j0}")).expect("y variable");
    &y.scale(&lam) + &SparsePoly::var(vars, ring, "x0").expect("x0")
}

/// Smallest `j` with `e[j] >= 1`.
pub fn select_j0(state: &HypersurfaceState) -> Option<u32> {
    state.e.iter().position(|&e| e >= 1).map(|i| i as u32 + 1)
}

fn check_j0(state: &HypersurfaceState, j0: u32) -> Result<()> {
    if j0 < 1 || j0 > state.dims.r {
        return Err(DoubleConeError::IndexOutOfRange { j0, r: state.dims.r });
    }
    if state.e[j0 as usize - 1] == 0 {
        return Err(DoubleConeError::EjTooSmall { j0 });
    }
    Ok(())
}

/// Regroup the state around `y_{j0}` and write down `F1, F2, Y0, Y1, Z`.
pub fn build_family(state: &HypersurfaceState, j0: u32) -> Result<DoubleConeFamily> {
    check_j0(state, j0)?;
    let (m, d) = (state.dims.m, state.dims.d);
    let ring = &state.ring;
    let x0 = |k: u32| SparsePoly::var_pow(&state.vars, ring, "x0", k).expect("x0");

    let mut a = vec![state.a0.clone()];
    for i in 1..=m {
        let c = state.a_ij(i, j0);
        let q = c.div_var_pow("x0", i).map_err(|_| DoubleConeError::DivisionFailure { i, j0 })?;
        a.push(q);
    }
    let y = format!("y{j0}");
    let mut grouped = SparsePoly::zero(&state.vars, ring);
    for (i, ai) in a.iter().enumerate() {
        let t = (ai * &x0(i as u32)).mul_var_pow(&y, i as u32)?;
        grouped = &grouped + &t;
    }
    let full = state.defining_poly();
    let f = &full - &grouped;

    let vars = state.vars.extended(&["z", "w"]);
    let z = SparsePoly::var(&vars, ring, "z")?;
    let w = SparsePoly::var(&vars, ring, "w")?;
    let x0f = |k: u32| SparsePoly::var_pow(&vars, ring, "x0", k).expect("x0");
    let z_eq = full.embed(&vars)?;
    let z_term = &x0f(d - 1) * &z;
    let w_term = &(&x0f(d - 2) * &lam_y_plus_x0(&vars, state, j0)) * &w;
    let y0_eq = &z_eq + &z_term;
    let y1_eq = &z_eq + &w_term;
    let f1 = &y0_eq + &w_term;
    let t = SparsePoly::constant(&vars, ring, ParamCoeff::param(ring, "t")?);
    let f2 = &(&t * &x0f(2)) + &(&z * &w);
    Ok(DoubleConeFamily {
        state_in: state.clone(),
        j0,
        l: m,
        vars,
        f,
        a,
        f1,
        f2,
        y0_eq,
        y1_eq,
        z_eq,
    })
}

/// The transformed coefficients `a'_0 .. a'_l` for input `a_0 .. a_l` of
/// degrees `d - 2i`, in universe `target`, with `zname` the fresh variable.
pub fn aiprime(a: &[SparsePoly], d: u32, target: &Arc<VarUniverse>, zname: &str) -> Result<Vec<SparsePoly>> {
    let ring = a[0].ring().clone();
    let p = ring.modulus();
    let l = a.len() - 1;
    let a: Vec<SparsePoly> = a.iter().map(|ai| ai.embed(target)).collect::<std::result::Result<_, _>>()?;
    let neg_lam_inv = -&ParamCoeff::param_pow(&ring, "lam", -1)?;
    let x0 = |k: u32| SparsePoly::var_pow(target, &ring, "x0", k).expect("x0");
    let z = |k: u32| SparsePoly::var_pow(target, &ring, zname, k).expect("fresh variable");
    let mut out = Vec::with_capacity(l + 1);
    for i in 0..=l {
        let mut sum = SparsePoly::zero(target, &ring);
        for (k, ak) in a.iter().enumerate().skip(i) {
            let c = (binomial(k as u64, i as u64) % p) as i64;
            let coef = neg_lam_inv.pow((k - i) as u32).scale(c as u64);
            sum = &sum + &(&x0(2 * (k - i) as u32) * ak).scale(&coef);
        }
        let mut ai = &z(i as u32) * &sum;
        if i == 1 {
            let tl = &ParamCoeff::param(&ring, "t")? * &ParamCoeff::param(&ring, "lam")?;
            ai = &ai + &x0(d - 1).scale(&tl);
        }
        if i == 0 {
            ai = &ai + &(&x0(d - 1) * &z(1));
        }
        out.push(ai);
    }
    Ok(out)
}

/// One induction step on column `j0`.
pub fn induct_step(state: &HypersurfaceState, j0: u32) -> Result<HypersurfaceState> {
    let fam = build_family(state, j0)?;
    let dims = state.dims;
    let s1 = dims.s + 1;
    let next = VarUniverse::standard(dims.n as usize, dims.r as usize, s1 as usize, false);
    let zname = format!("z{s1}");
    let ap = aiprime(&fam.a, dims.d, &next, &zname)?;
    let emb = |p: &SparsePoly| p.embed(&next);
    let mut a = Vec::with_capacity(state.a.len());
    for (i0, row) in state.a.iter().enumerate() {
        let mut new_row = Vec::with_capacity(row.len());
        for (jj, c) in row.iter().enumerate() {
            if jj + 1 == j0 as usize {
                new_row.push(ap[i0 + 1].clone());
            } else {
                new_row.push(emb(c)?);
            }
        }
        a.push(new_row);
    }
    let mut e = state.e.clone();
    e[j0 as usize - 1] -= 1;
    let h_poly = emb(&state.h_poly)?.mul_var_pow(&zname, 1)?;
    let f0 = emb(&state.f0)?;
    Ok(HypersurfaceState {
        ring: state.ring.clone(),
        vars: next,
        dims: Dims { s: s1, ..dims },
        f0,
        a0: ap[0].clone(),
        a,
        e,
        h_poly,
        params: state.params.clone(),
    })
}

/// Jacobian minor for the total space and the two derivative identities of
/// the special fibre components.
pub fn verify_singular_minors(fam: &DoubleConeFamily) -> Report {
    let mut rep = Report::new();
    let st = &fam.state_in;
    let d = st.dims.d;
    let ring = &st.ring;

    // The family parameter t is a coordinate of the total space here; the
    // coefficients of F1 lie in the ground field, so F1 does not involve it.
    let total = fam.vars.extended(&["t"]);
    let x0 = |k: u32| SparsePoly::var_pow(&total, ring, "x0", k).expect("x0");
    let f1 = fam.f1.embed(&total).expect("family embeds");
    let z = SparsePoly::var(&total, ring, "z").expect("z");
    let w = SparsePoly::var(&total, ring, "w").expect("w");
    let tc = SparsePoly::var(&total, ring, "t").expect("t");
    let f2 = &(&tc * &x0(2)) + &(&z * &w);
    let dd = |p: &SparsePoly, v: &str| p.derivative(v).expect("variable present");
    let minor = &(&dd(&f1, "t") * &dd(&f2, "z")) - &(&dd(&f1, "z") * &dd(&f2, "t"));
    let expected = x0(d + 1).neg();
    rep.push_eq(
        "jacobian minor (d_t, d_z) of total space",
        "singular locus of the family lies in x0 = 0",
        &expected,
        &minor,
    );

    let x0f = |k: u32| SparsePoly::var_pow(&fam.vars, ring, "x0", k).expect("x0");
    let dz = fam.y0_eq.derivative("z").expect("z");
    rep.push_eq(
        "d_z of Y0 equation",
        "singular locus of Y0 lies in x0 = 0",
        &x0f(d - 1),
        &dz,
    );
    let dw = fam.y1_eq.derivative("w").expect("w");
    let exp_w = &x0f(d - 2) * &fam.lam_y_plus_x0();
    rep.push_eq(
        "d_w of Y1 equation",
        "singular locus of Y1 lies in x0 (lam y_j + x0) = 0",
        &exp_w,
        &dw,
    );

    let deg = |p: &SparsePoly| match crate::poly::degree_info(p) {
        Ok((d, h)) => format!("({d}, {h})"),
        Err(e) => e.to_string(),
    };
    rep.push("degree of F1", "complete intersection family", format!("({d}, true)"), deg(&fam.f1), deg(&fam.f1) == format!("({d}, true)"));
    rep.push("degree of F2", "complete intersection family", "(2, true)", deg(&fam.f2), deg(&fam.f2) == "(2, true)");
    let full = st.defining_poly().embed(&fam.vars).expect("embeds");
    rep.push(
        "regrouping round trip",
        "rewrite of the equation around y_j0",
        "Z equation equals the state's defining polynomial",
        if fam.z_eq == full { "equal" } else { "different" },
        fam.z_eq == full,
    );
    rep
}

/// Conditions on a state: shape, degrees, the divisibility ladder with
/// maximal `e`, irreducibility of `f0 + a0`, and the shape of `h`.
pub fn verify_state(state: &HypersurfaceState, trials: usize, seed: u64) -> Report {
    let mut rep = Report::new();
    let Dims { n, m, r, s, d } = state.dims;

    let expected_vars = VarUniverse::standard(n as usize, r as usize, s as usize, false);
    rep.push(
        "variable universe",
        "coordinates x, y, z of the stage",
        expected_vars.names().join(","),
        state.vars.names().join(","),
        *expected_vars == *state.vars,
    );

    let full = state.defining_poly();
    let got = match crate::poly::degree_info(&full) {
        Ok((dd, h)) => format!("degree {dd}, homogeneous {h}"),
        Err(e) => e.to_string(),
    };
    let want = format!("degree {d}, homogeneous true");
    rep.push("defining polynomial homogeneous of degree d", "shape of the stage equation", want.clone(), got.clone(), want == got);

    let ys: Vec<String> = (1..=r + 1).map(|j| format!("y{j}")).collect();
    let mut with_y = Vec::new();
    let mut bad_degree = Vec::new();
    let mut slots: Vec<(String, &SparsePoly, u32)> = vec![("f0".into(), &state.f0, d), ("a0".into(), &state.a0, d)];
    for i in 1..=m {
        for j in 1..=r + 1 {
            slots.push((format!("a[{i}][{j}]"), state.a_ij(i, j), d - i));
        }
    }
    for (name, poly, deg) in &slots {
        if ys.iter().any(|y| poly.contains_var(y).unwrap_or(true)) {
            with_y.push(name.clone());
        }
        if !poly.is_zero() && (poly.total_degree() != Some(*deg) || !poly.is_homogeneous()) {
            bad_degree.push(name.clone());
        }
    }
    let list = |v: &Vec<String>| if v.is_empty() { "none".to_string() } else { v.join(", ") };
    rep.push("coefficients free of y", "coefficients live in x and z only", "none", list(&with_y), with_y.is_empty());
    rep.push("coefficient degrees d - i", "homogeneous coefficients", "none", list(&bad_degree), bad_degree.is_empty());

    for j in 1..=r {
        let stored = state.e.get(j as usize - 1).copied();
        let rec = state.recompute_e(j);
        let ladder_ok = rec.is_some_and(|e| {
            (1..=m).all(|i| crate::poly::monomial_divides(state.a_ij(i, j), "x0", i * e).unwrap_or(false))
        });
        let show = |v: Option<u32>| v.map_or("undefined".into(), |e| e.to_string());
        rep.push(
            format!("divisibility ladder j={j}"),
            "x0^(e m) | a[m][j] implies x0^(e i) | a[i][j]; e maximal",
            format!("e = {}, ladder holds", show(stored)),
            format!("e = {}, ladder {}", show(rec), if ladder_ok { "holds" } else { "fails" }),
            stored.is_some() && stored == rec && ladder_ok,
        );
    }

    let assignment = state.params.assignment(&state.ring, seed);
    match factor::probably_irreducible(&state.f0_plus_a0(), &ParamChoice::Given(assignment), trials, seed) {
        Ok(v) => {
            rep.push(
                "f0 + a0 irreducible",
                "irreducibility of f0 + a0",
                "Irreducible",
                format!("{:?} ({}/{} slices certified)", v.verdict, v.certified_slices, v.trials),
                v.verdict == Verdict::Irreducible,
            );
            let bits = -v.failure_bound.log2();
            rep.push(
                "irreducibility failure bound",
                "irreducibility of f0 + a0",
                format!("<= 2^-{IRREDUCIBILITY_BITS}"),
                format!("2^-{bits:.1}"),
                v.verdict == Verdict::Irreducible && bits >= IRREDUCIBILITY_BITS,
            );
        }
        Err(e) => rep.push("f0 + a0 irreducible", "irreducibility of f0 + a0", "Irreducible", e.to_string(), false),
    }

    let expected_h = (1..=s).fold(int_poly(&state.vars, &state.ring, 1), |acc, k| {
        acc.mul_var_pow(&format!("z{k}"), 1).expect("z variable")
    });
    rep.push(
        "h is a product of z-coordinates",
        "h grows by the fresh z at each step",
        expected_h.to_string(),
        state.h_poly.to_string(),
        state.h_poly == expected_h,
    );
    rep
}

/// Checks relating a state to its successor under `induct_step`.
pub fn verify_induction_step(before: &HypersurfaceState, j0: u32, after: &HypersurfaceState) -> Result<Report> {
    let fam = build_family(before, j0)?;
    let mut rep = Report::new();
    let (m, d, l) = (before.dims.m, before.dims.d, fam.l);
    let zname = format!("z{}", after.dims.s);
    let ring = &before.ring;
    let emb = |p: &SparsePoly| p.embed(&after.vars).expect("embeds");
    let col = |i: u32| if i == 0 { after.a0.clone() } else { after.a_ij(i, j0).clone() };

    let mut degs_ok = true;
    for i in 0..=l {
        let c = col(i);
        degs_ok &= c.is_zero() || (c.is_homogeneous() && c.total_degree() == Some(d - i));
    }
    rep.push("deg a'_i = d - i", "degrees of the transformed coefficients", "all", if degs_ok { "all" } else { "violated" }, degs_ok);

    if l >= 2 {
        let top = emb(&fam.a[l as usize]).mul_var_pow(&zname, l)?;
        rep.push_eq("top coefficient a'_l = z^l a_l", "formula for a'_i", &top, &col(l));
    }
    if l == 2 {
        let x0 = |k: u32| SparsePoly::var_pow(&after.vars, ring, "x0", k).expect("x0");
        let z = SparsePoly::var(&after.vars, ring, &zname)?;
        let li = |k: i32| ParamCoeff::param_pow(ring, "lam", k).expect("lam");
        let (a0, a1, a2) = (emb(&fam.a[0]), emb(&fam.a[1]), emb(&fam.a[2]));
        let exp0 = &(&(&a0 - &(&x0(2) * &a1).scale(&li(-1))) + &(&x0(4) * &a2).scale(&li(-2))) + &(&x0(d - 1) * &z);
        rep.push_eq("a'_0 expansion for l = 2", "formula for a'_i", &exp0, &col(0));
        let tl = &ParamCoeff::param(ring, "t")? * &li(1);
        let exp1 = &(&z * &(&a1 - &(&x0(2) * &a2).scale(&li(-1).scale(2)))) + &x0(d - 1).scale(&tl);
        rep.push_eq("a'_1 expansion for l = 2", "formula for a'_i", &exp1, &col(1));
    }

    let mut untouched = true;
    for i in 1..=m {
        for j in 1..=before.dims.r + 1 {
            if j != j0 {
                untouched &= emb(before.a_ij(i, j)) == *after.a_ij(i, j);
            }
        }
    }
    untouched &= emb(&before.f0) == after.f0;
    rep.push("columns j != j0 unchanged", "coefficients without y_j0 are carried over", "identical", if untouched { "identical" } else { "changed" }, untouched);

    // divisibility transport on the sum part of a'_i
    let e = before.e[j0 as usize - 1] - 1;
    let sums = aiprime_sums(&fam.a, &after.vars, &zname)?;
    let mut transport = (0..=l as usize).all(|i| crate::poly::monomial_divides(&fam.a[i], "x0", i as u32 * e).unwrap_or(false));
    if transport {
        transport = sums
            .iter()
            .enumerate()
            .all(|(i, s)| crate::poly::monomial_divides(s, "x0", i as u32 * e).unwrap_or(false));
    }
    rep.push(
        "divisibility transport",
        "x0^(ie) | a_i for all i implies x0^(ie) | a'_i",
        format!("x0^(i*{e}) divides each sum part"),
        if transport { "holds" } else { "fails" },
        transport,
    );

    let e_ok = after.e[j0 as usize - 1] + 1 == before.e[j0 as usize - 1]
        && after.e.iter().zip(&before.e).enumerate().all(|(k, (a, b))| k + 1 == j0 as usize || a == b);
    rep.push("e[j0] decremented", "each step spends one unit of e", "by exactly one", if e_ok { "by exactly one" } else { "otherwise" }, e_ok);
    Ok(rep)
}

/// The `z_{s+1}^i * sum(...)` part of `a'_i`, without the delta terms.
fn aiprime_sums(a: &[SparsePoly], target: &Arc<VarUniverse>, zname: &str) -> Result<Vec<SparsePoly>> {
    let ring = a[0].ring().clone();
    let d_dummy = 1; // delta terms are removed below, so the degree does not matter
    let full = aiprime(a, d_dummy + 1, target, zname)?;
    let x0 = |k: u32| SparsePoly::var_pow(target, &ring, "x0", k).expect("x0");
    let z = SparsePoly::var(target, &ring, zname)?;
    let tl = &ParamCoeff::param(&ring, "t")? * &ParamCoeff::param(&ring, "lam")?;
    Ok(full
        .into_iter()
        .enumerate()
        .map(|(i, p)| match i {
            0 => &p - &(&x0(d_dummy) * &z),
            1 => &p - &x0(d_dummy).scale(&tl),
            _ => p,
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleRegion {
    X0NonZero,
    X0ZNonZero,
    X0Zero,
}

/// Sample points of the specialized complete intersection with `x0 != 0`
/// and check that the Jacobian of `(F1, F2)` has rank 2 at each.
pub fn smoothness_sample(
    fam: &DoubleConeFamily,
    region: SampleRegion,
    samples: usize,
    params: &ParamAssignment,
    seed: u64,
) -> Result<Report> {
    if region == SampleRegion::X0Zero {
        return Err(DoubleConeError::RegionRejected);
    }
    let ring = &fam.state_in.ring;
    let p = ring.modulus();
    for name in ring.params().names() {
        match params.get(name) {
            None => return Err(CoeffError::UnassignedParameter(name.clone()).into()),
            Some(v) if v % p == 0 && (name == "lam" || name == "t") => {
                return Err(DoubleConeError::ZeroParameter(name.clone()))
            }
            _ => {}
        }
    }
    let f1 = fam.f1.specialize_params(params)?;
    let f2 = fam.f2.specialize_params(params)?;
    let names = fam.vars.names().to_vec();
    let grads: Vec<(SparsePoly, SparsePoly)> = names
        .iter()
        .map(|v| Ok((f1.derivative(v)?, f2.derivative(v)?)))
        .collect::<std::result::Result<_, PolyError>>()?;
    let zero_params = ParamAssignment::new();
    let ev = |poly: &SparsePoly, pt: &[FieldElem]| poly.eval_point(pt, params).or_else(|_| poly.eval_point(pt, &zero_params));
    let iz = fam.vars.index_of("z").expect("z");
    let iw = fam.vars.index_of("w").expect("w");
    let d = fam.state_in.dims.d as u64;
    let t = params.get("t").expect("checked");
    let lam = params.get("lam").expect("checked");
    let yj = fam.vars.index_of(&fam.y_name()).expect("y_j0");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = samples.max(1) * 64;
    let (mut found, mut rank2) = (0usize, 0usize);
    for _ in 0..budget {
        if found == samples {
            break;
        }
        let mut pt: Vec<FieldElem> = (0..names.len()).map(|_| ring.elem(rng.random_range(0..p) as i64)).collect();
        pt[0] = ring.elem(rng.random_range(1..p) as i64);
        pt[iz] = ring.elem(0);
        pt[iw] = ring.elem(0);
        let x0 = pt[0];
        let a = ev(&fam.z_eq, &pt)?;
        let b = pow(x0, d - 2) * (ring.elem(lam as i64) * pt[yj] + x0);
        let tt = ring.elem(t as i64);
        // x0^(d-1) z^2 + A z - t B x0^2 = 0
        let quad = UniPoly::new(
            vec![(-(tt * b * x0 * x0)).value(), a.value(), pow(x0, d - 1).value()],
            p,
        );
        let roots = factor::univariate::roots(&quad, &mut rng);
        let Some(&zv) = roots.iter().find(|&&r| r != 0) else { continue };
        let zf = ring.elem(zv as i64);
        let wf = -(tt * x0 * x0) * crate::coeff::ff_inv(zf)?;
        pt[iz] = zf;
        pt[iw] = wf;
        if !ev(&f1, &pt)?.is_zero() || !ev(&f2, &pt)?.is_zero() {
            continue;
        }
        found += 1;
        let rows: Vec<(FieldElem, FieldElem)> = grads
            .iter()
            .map(|(g1, g2)| Ok((ev(g1, &pt)?, ev(g2, &pt)?)))
            .collect::<std::result::Result<_, PolyError>>()?;
        let full_rank = (0..rows.len())
            .any(|i| (i + 1..rows.len()).any(|k| !(rows[i].0 * rows[k].1 - rows[i].1 * rows[k].0).is_zero()));
        if full_rank {
            rank2 += 1;
        }
    }
    if found == 0 {
        return Err(DoubleConeError::SamplingExhausted);
    }
    let mut rep = Report::new();
    rep.push(
        "rank-2 jacobian at sampled points",
        "generic fibre is smooth away from x0 = 0",
        format!("{samples}/{samples}"),
        format!("{rank2}/{found}"),
        rank2 == found && found == samples,
    );
    Ok(rep)
}

fn pow(x: FieldElem, e: u64) -> FieldElem {
    let mut acc = FieldElem::new(1, x.modulus()).expect("prime modulus");
    for _ in 0..e {
        acc = acc * x;
    }
    acc
}

/// `Y1` with `lam` denominators cleared and `lam = 0` substituted.
pub fn y1_at_lambda_zero(fam: &DoubleConeFamily) -> Result<SparsePoly> {
    Ok(fam.y1_eq.clear_and_specialize_zero("lam")?)
}
