//! Edge subdivision, chain normalization, the telescoping identity, and the
//! transfer of solutions from the subdivided Phi to Psi.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ChainSkeleton, DualGraph, FgModule, IntMatrix, Result, SkeletonError};

/// An `r`-fold subdivision of every edge. `skeleton` is the refined object;
/// new vertex `(e, n)` sits at index `|V| + e (r - 1) + (n - 1)` and its
/// CH1 there is the pulled-back part `CH0[e]`. The section part of CH1 is a
/// formal ledger carried by [`Chain::zeta`], one copy of `CH0[e]` per new
/// vertex, with no intersection data of its own.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubdividedSkeleton {
    pub base: ChainSkeleton,
    pub r: u32,
    pub skeleton: ChainSkeleton,
}

impl SubdividedSkeleton {
    pub fn new_vertex(&self, e: usize, n: u32) -> usize {
        assert!(n >= 1 && n < self.r, "1 <= n < r");
        self.base.graph.vertices.len() + e * (self.r as usize - 1) + (n as usize - 1)
    }

    /// Index into [`Chain::zeta`] for vertex `(e, n)`.
    fn zeta_index(&self, e: usize, n: u32) -> usize {
        self.new_vertex(e, n) - self.base.graph.vertices.len()
    }

    pub fn new_vertex_count(&self) -> usize {
        self.base.graph.edges.len() * (self.r as usize - 1)
    }

    pub fn zero_chain(&self) -> Chain {
        Chain {
            parts: self.skeleton.ch1.iter().map(|m| vec![0; m.gens()]).collect(),
            zeta: (0..self.base.graph.edges.len())
                .flat_map(|e| std::iter::repeat_n(vec![0; self.base.ch0[e].gens()], self.r as usize - 1))
                .collect(),
        }
    }
}

/// A one-cycle on the subdivided skeleton: CH1 coordinates per vertex, and
/// for each new vertex its section-ledger part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Chain {
    pub parts: Vec<Vec<i64>>,
    pub zeta: Vec<Vec<i64>>,
}

pub fn subdivide(sk: &ChainSkeleton, r: u32) -> Result<SubdividedSkeleton> {
    if r < 2 {
        return Err(SkeletonError::SubdivisionTooSmall(r));
    }
    let nv = sk.graph.vertices.len();
    let mut vertices = sk.graph.vertices.clone();
    let mut ch1 = sk.ch1.clone();
    let mut ch0_vertex = sk.ch0_vertex.clone();
    for (e, &(v, w)) in sk.graph.edges.iter().enumerate() {
        for n in 1..r {
            vertices.push(format!("({}-{},{n})", sk.graph.vertices[v], sk.graph.vertices[w]));
            ch1.push(sk.ch0[e].clone());
            ch0_vertex.push(sk.ch0[e].clone());
        }
    }
    let idx = |e: usize, n: u32| nv + e * (r as usize - 1) + (n as usize - 1);
    let mut edges = Vec::new();
    let mut ch0 = Vec::new();
    let mut inter = Vec::new();
    let mut push = sk.push.as_ref().map(|_| Vec::new());
    for (e, &(v, w)) in sk.graph.edges.iter().enumerate() {
        let g = sk.ch0[e].gens();
        let id = || IntMatrix::identity(g);
        for k in 0..r {
            // the k-th piece joins position k and k + 1 along the edge
            let (edge, i_pair, p_pair) = if k == 0 {
                let bp = sk.push.as_ref().map(|p| p[e][0].clone());
                ((v, idx(e, 1)), [sk.inter[e][0].clone(), id()], bp.map(|b| [b, id()]))
            } else if k == r - 1 {
                let bp = sk.push.as_ref().map(|p| p[e][1].clone());
                ((w, idx(e, r - 1)), [sk.inter[e][1].clone(), id()], bp.map(|b| [b, id()]))
            } else {
                ((idx(e, k), idx(e, k + 1)), [id(), id()], Some([id(), id()]))
            };
            edges.push(edge);
            ch0.push(sk.ch0[e].clone());
            inter.push(i_pair);
            if let (Some(out), Some(pp)) = (push.as_mut(), p_pair) {
                out.push(pp);
            }
        }
    }
    let graph = DualGraph::new(vertices, edges)?;
    let skeleton = ChainSkeleton::new(sk.modulus, graph, ch1, ch0, ch0_vertex, inter, push)?;
    Ok(SubdividedSkeleton { base: sk.clone(), r, skeleton })
}

fn check_chain(ssk: &SubdividedSkeleton, g: &Chain) -> Result<()> {
    let sk = &ssk.skeleton;
    if g.parts.len() != sk.ch1.len() || g.zeta.len() != ssk.new_vertex_count() {
        return Err(SkeletonError::BadChain("wrong number of components".into()));
    }
    for (v, part) in g.parts.iter().enumerate() {
        if part.len() != sk.ch1[v].gens() {
            return Err(SkeletonError::BadChain(format!("component {v} has the wrong length")));
        }
    }
    for e in 0..ssk.base.graph.edges.len() {
        for n in 1..ssk.r {
            if g.zeta[ssk.zeta_index(e, n)].len() != ssk.base.ch0[e].gens() {
                return Err(SkeletonError::BadChain(format!("section part at ({e},{n}) has the wrong length")));
            }
        }
    }
    Ok(())
}

/// Move every section part one step towards `w(e)`, in increasing `n`,
/// and finally into `CH1[w(e)]` through `transfer[e]: CH0[e] -> CH1[w(e)]`.
pub fn normalize_chain(
    ssk: &SubdividedSkeleton,
    gamma: &Chain,
    transfer: &BTreeMap<usize, IntMatrix>,
) -> Result<Chain> {
    check_chain(ssk, gamma)?;
    let c = ssk.skeleton.modulus;
    let mut out = gamma.clone();
    for (e, &(_, w)) in ssk.base.graph.edges.iter().enumerate() {
        let module = &ssk.base.ch0[e];
        let mut carry = vec![0i64; module.gens()];
        for n in 1..ssk.r {
            let k = ssk.zeta_index(e, n);
            for (a, b) in carry.iter_mut().zip(&out.zeta[k]) {
                *a += b;
            }
            carry = module.reduce(c, &carry);
            out.zeta[k] = vec![0; module.gens()];
        }
        if module.is_zero_elem(c, &carry) {
            continue;
        }
        let t = transfer.get(&e).ok_or(SkeletonError::MissingTransferMap(e))?;
        if (t.rows, t.cols) != (ssk.base.ch1[w].gens(), module.gens()) {
            return Err(SkeletonError::BadMapShape {
                name: format!("transfer[{e}]"),
                want: (ssk.base.ch1[w].gens(), module.gens()),
                got: (t.rows, t.cols),
            });
        }
        let moved = t.apply(&carry);
        let sum: Vec<i64> = out.parts[w].iter().zip(&moved).map(|(a, b)| a + b).collect();
        out.parts[w] = ssk.base.ch1[w].reduce(c, &sum);
    }
    Ok(out)
}

/// `(sum_{n=1}^{r-1} n (a_{n-1} - 2 a_n + a_{n+1}), a_0 - a_r)`, both reduced
/// in `module` tensored with `Z/c`. `alphas` holds `a_0 .. a_r`.
pub fn telescope_identity(alphas: &[Vec<i64>], module: &FgModule, c: u64) -> (Vec<i64>, Vec<i64>) {
    let r = alphas.len() - 1;
    let g = module.gens();
    let mut lhs = vec![0i64; g];
    for n in 1..r {
        for k in 0..g {
            let term = alphas[n - 1][k] - 2 * alphas[n][k] + alphas[n + 1][k];
            lhs[k] = (lhs[k] + (n as i64 % c as i64) * term.rem_euclid(c as i64)).rem_euclid(c as i64);
        }
    }
    let rhs: Vec<i64> = (0..g).map(|k| alphas[0][k] - alphas[r][k]).collect();
    (module.reduce(c, &lhs), module.reduce(c, &rhs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeCheck {
    pub edge: usize,
    pub lhs: Vec<i64>,
    pub rhs: Vec<i64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TelescopeReport {
    pub c: u64,
    pub r: u32,
    pub edges: Vec<EdgeCheck>,
    pub all_pass: bool,
}

/// The telescoping identity on every original edge for a normalized chain.
pub fn telescope_check(ssk: &SubdividedSkeleton, gamma: &Chain, c: u64) -> Result<TelescopeReport> {
    if c == 0 || !(ssk.r as u64).is_multiple_of(c) {
        return Err(SkeletonError::RDivisibilityViolated { c, r: ssk.r });
    }
    check_chain(ssk, gamma)?;
    if gamma.zeta.iter().any(|z| z.iter().any(|&x| x.rem_euclid(c as i64) != 0)) {
        return Err(SkeletonError::BadChain("chain is not normalized".into()));
    }
    let base = &ssk.base;
    let mut edges = Vec::new();
    for (e, &(v, w)) in base.graph.edges.iter().enumerate() {
        let mut alphas = vec![base.inter[e][0].apply(&gamma.parts[v])];
        for n in 1..ssk.r {
            alphas.push(gamma.parts[ssk.new_vertex(e, n)].clone());
        }
        alphas.push(base.inter[e][1].apply(&gamma.parts[w]));
        let (lhs, rhs) = telescope_identity(&alphas, &base.ch0[e], c);
        let pass = lhs == rhs;
        edges.push(EdgeCheck { edge: e, lhs, rhs, pass });
    }
    let all_pass = edges.iter().all(|x| x.pass);
    Ok(TelescopeReport { c, r: ssk.r, edges, all_pass })
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Random `a_0 .. a_r` in `(Z/c)^dim`; number of trials where the identity
/// holds. Trials run in parallel, one stream each.
pub fn telescope_trials(c: u64, r: u32, dim: usize, trials: u64, seed: u64) -> u64 {
    let module = FgModule::free(dim);
    (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = trial_rng(seed, t);
            let alphas: Vec<Vec<i64>> =
                (0..=r).map(|_| (0..dim).map(|_| rng.random_range(0..c) as i64).collect()).collect();
            let (lhs, rhs) = telescope_identity(&alphas, &module, c);
            lhs == rhs
        })
        .count() as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemoReport {
    pub trials: u64,
    pub solvable: u64,
    pub verified: u64,
    pub unsolvable: u64,
}

/// For random `z` in `sum_e CH0[e] (x) Z/c`: solve `Phi'(g) = m z` placed at
/// the vertices `(e, 1)` of the `r`-fold subdivision, normalize, and check
/// `m z = Psi(g restricted to the original vertices)`.
pub fn surjectivity_transfer_demo(
    sk: &ChainSkeleton,
    r: u32,
    c: u64,
    m: u64,
    trials: u64,
    seed: u64,
) -> Result<DemoReport> {
    if c == 0 || !(r as u64).is_multiple_of(c) {
        return Err(SkeletonError::RDivisibilityViolated { c, r });
    }
    let mut base = sk.clone();
    base.modulus = c;
    let ssk = subdivide(&base, r)?;
    let phi = ssk.skeleton.phi_map()?;
    let psi = base.psi_map();
    let vertex_off = super::block_offsets(&ssk.skeleton.ch0_vertex);
    let ch1_off = super::block_offsets(&ssk.skeleton.ch1);
    let nv = base.graph.vertices.len();

    let outcomes: Vec<Result<Option<bool>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let z: Vec<Vec<i64>> = base
                .ch0
                .iter()
                .map(|md| {
                    let raw: Vec<i64> = (0..md.gens()).map(|_| rng.random_range(0..c) as i64).collect();
                    md.reduce(c, &raw)
                })
                .collect();
            let mut target = vec![0i64; *vertex_off.last().unwrap()];
            for (e, ze) in z.iter().enumerate() {
                let at = vertex_off[ssk.new_vertex(e, 1)];
                for (k, x) in ze.iter().enumerate() {
                    target[at + k] = x * m as i64;
                }
            }
            let Some(sol) = phi.preimage(&target) else { return Ok(None) };
            let mut gamma = ssk.zero_chain();
            for v in 0..gamma.parts.len() {
                gamma.parts[v] = sol[ch1_off[v]..ch1_off[v + 1]].to_vec();
            }
            let gamma = normalize_chain(&ssk, &gamma, &BTreeMap::new())?;
            let tel = telescope_check(&ssk, &gamma, c)?;
            let restricted: Vec<i64> = gamma.parts[..nv].concat();
            let image = psi.apply(&restricted);
            let mz: Vec<i64> = z.iter().zip(&base.ch0).flat_map(|(ze, md)| {
                let scaled: Vec<i64> = ze.iter().map(|x| x * m as i64).collect();
                md.reduce(c, &scaled)
            }).collect();
            Ok(Some(tel.all_pass && image == mz))
        })
        .collect();
    let mut rep = DemoReport { trials, solvable: 0, verified: 0, unsolvable: 0 };
    for o in outcomes {
        match o? {
            None => rep.unsolvable += 1,
            Some(ok) => {
                rep.solvable += 1;
                rep.verified += u64::from(ok);
            }
        }
    }
    Ok(rep)
}
