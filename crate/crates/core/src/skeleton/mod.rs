//! Dual graphs with module data on vertices and edges, the maps Psi and
//! Phi between the direct sums, and cokernel torsion via Smith normal form.

pub mod chain;
pub mod snf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chain::{
    normalize_chain, subdivide, surjectivity_transfer_demo, telescope_check, telescope_identity, telescope_trials,
    Chain, DemoReport, EdgeCheck, SubdividedSkeleton, TelescopeReport,
};
pub use snf::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeletonError {
    #[error("edge {0:?} is a loop or out of range")]
    BadEdge((usize, usize)),
    #[error("edge {0:?} appears twice")]
    DuplicateEdge((usize, usize)),
    #[error("invalid module: {0}")]
    BadModule(String),
    #[error("map {name} has shape {got:?}, expected {want:?}")]
    BadMapShape { name: String, want: (usize, usize), got: (usize, usize) },
    #[error("expected {want} {what}, got {got}")]
    Count { what: &'static str, want: usize, got: usize },
    #[error("push maps are missing")]
    MissingPush,
    #[error("no transfer map for edge {0}")]
    MissingTransferMap(usize),
    #[error("c = {c} does not divide r = {r}")]
    RDivisibilityViolated { c: u64, r: u32 },
    #[error("subdivision count r = {0} < 2")]
    SubdivisionTooSmall(u32),
    #[error("chain does not match the skeleton: {0}")]
    BadChain(String),
    #[error("{0}")]
    Json(String),
}

type Result<T> = std::result::Result<T, SkeletonError>;

/// Loop-free simple graph; vertex order is list order, edges `(v, w)` with `v < w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

impl DualGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for &(v, w) in &edges {
            if v >= w || w >= vertices.len() {
                return Err(SkeletonError::BadEdge((v, w)));
            }
            if !seen.insert((v, w)) {
                return Err(SkeletonError::DuplicateEdge((v, w)));
            }
        }
        Ok(Self { vertices, edges })
    }

    /// Vertices named `0..n`.
    pub fn numbered(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn path(n: usize) -> Self {
        Self::numbered(n, (1..n).map(|i| (i - 1, i)).collect()).expect("path is simple")
    }

    pub fn incident(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(move |(_, &(a, b))| a == v || b == v).map(|(e, _)| e)
    }
}

/// `(Z or Z/c)^rank + sum Z/t_i`, with `t_1 | t_2 | ...` and all `t_i > 1`.
/// Generators are ordered free part first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FgModule {
    pub rank: usize,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

impl FgModule {
    pub fn new(rank: usize, torsion: Vec<u64>) -> Result<Self> {
        if torsion.iter().any(|&t| t < 2) {
            return Err(SkeletonError::BadModule("torsion factors must exceed 1".into()));
        }
        if torsion.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(SkeletonError::BadModule("torsion factors must form a divisor chain".into()));
        }
        Ok(Self { rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        Self { rank, torsion: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    pub fn gens(&self) -> usize {
        self.rank + self.torsion.len()
    }

    /// Relation order of each generator over a ring of modulus `c` (0 for Z).
    fn orders(&self, c: u64) -> Vec<u64> {
        let g = |t: u64| if c == 0 { t } else { num_integer::gcd(t, c) };
        std::iter::repeat_n(c, self.rank).chain(self.torsion.iter().map(|&t| g(t))).collect()
    }

    /// Reduce coordinates to the least non-negative residues.
    pub fn reduce(&self, c: u64, v: &[i64]) -> Vec<i64> {
        v.iter()
            .zip(self.orders(c))
            .map(|(&x, o)| if o == 0 { x } else { x.rem_euclid(o as i64) })
            .collect()
    }

    /// Is `v` zero in the module over modulus `c`?
    pub fn is_zero_elem(&self, c: u64, v: &[i64]) -> bool {
        self.reduce(c, v).iter().all(|&x| x == 0)
    }
}

/// Sum of modules: generators concatenated.
fn block_offsets(mods: &[FgModule]) -> Vec<usize> {
    let mut off = vec![0];
    for m in mods {
        off.push(off.last().unwrap() + m.gens());
    }
    off
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearMap {
    /// 0 for Z, c for Z/c.
    pub modulus: u64,
    pub domain: Vec<FgModule>,
    pub codomain: Vec<FgModule>,
    pub matrix: IntMatrix,
}

impl LinearMap {
    pub fn new(modulus: u64, domain: FgModule, codomain: FgModule, matrix: IntMatrix) -> Result<Self> {
        let want = (codomain.gens(), domain.gens());
        if (matrix.rows, matrix.cols) != want {
            return Err(SkeletonError::BadMapShape { name: "map".into(), want, got: (matrix.rows, matrix.cols) });
        }
        Ok(Self { modulus, domain: vec![domain], codomain: vec![codomain], matrix })
    }

    fn codomain_orders(&self) -> Vec<u64> {
        self.codomain.iter().flat_map(|m| m.orders(self.modulus)).collect()
    }

    /// `[matrix | relations of the codomain]`, presenting the cokernel over Z.
    fn presentation(&self) -> IntMatrix {
        let orders = self.codomain_orders();
        let rel: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] != 0).collect();
        let cols = self.matrix.cols;
        let mut m = IntMatrix::zeros(orders.len(), cols + rel.len());
        for i in 0..orders.len() {
            m.data[i][..cols].copy_from_slice(&self.matrix.data[i]);
        }
        for (k, &i) in rel.iter().enumerate() {
            m.data[i][cols + k] = orders[i] as i64;
        }
        m
    }

    /// Invariant factors of the cokernel; 0 entries are free summands.
    pub fn cokernel(&self) -> Vec<u64> {
        snf::cokernel_factors(&self.presentation()).into_iter().filter(|&f| f != 1).map(|f| f as u64).collect()
    }

    /// Apply the map and reduce in the codomain.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        let raw = self.matrix.apply(v);
        reduce_blocks(&self.codomain, self.modulus, &raw)
    }

    /// A preimage of `b`, if one exists.
    pub fn preimage(&self, b: &[i64]) -> Option<Vec<i64>> {
        let sol = snf::solve(&self.presentation(), b)?;
        let orders: Vec<u64> = self.domain.iter().flat_map(|m| m.orders(self.modulus)).collect();
        let x = sol[..self.matrix.cols]
            .iter()
            .zip(orders)
            .map(|(&v, o)| if o == 0 { v as i64 } else { v.rem_euclid(i128::from(o)) as i64 })
            .collect();
        Some(x)
    }
}

fn reduce_blocks(mods: &[FgModule], c: u64, v: &[i64]) -> Vec<i64> {
    let off = block_offsets(mods);
    mods.iter().enumerate().flat_map(|(k, m)| m.reduce(c, &v[off[k]..off[k + 1]])).collect()
}

/// `m * coker(map) = 0`.
pub fn cokernel_torsion(map: &LinearMap, m: u64) -> bool {
    map.cokernel().iter().all(|&f| f != 0 && m.is_multiple_of(f))
}

/// Module data on a dual graph. For edge `e = (v, w)`, index 0 of the
/// per-edge pairs refers to `v`, index 1 to `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainSkeleton {
    pub modulus: u64,
    pub graph: DualGraph,
    pub ch1: Vec<FgModule>,
    pub ch0: Vec<FgModule>,
    pub ch0_vertex: Vec<FgModule>,
    /// `inter[e][k]: CH1[end k] -> CH0[e]`
    pub inter: Vec<[IntMatrix; 2]>,
    /// `push[e][k]: CH0[e] -> CH0_vertex[end k]`
    pub push: Option<Vec<[IntMatrix; 2]>>,
}

impl ChainSkeleton {
    pub fn new(
        modulus: u64,
        graph: DualGraph,
        ch1: Vec<FgModule>,
        ch0: Vec<FgModule>,
        ch0_vertex: Vec<FgModule>,
        inter: Vec<[IntMatrix; 2]>,
        push: Option<Vec<[IntMatrix; 2]>>,
    ) -> Result<Self> {
        let nv = graph.vertices.len();
        let ne = graph.edges.len();
        let count = |what, want, got| if want == got { Ok(()) } else { Err(SkeletonError::Count { what, want, got }) };
        count("CH1 modules", nv, ch1.len())?;
        count("vertex CH0 modules", nv, ch0_vertex.len())?;
        count("edge CH0 modules", ne, ch0.len())?;
        count("intersection map pairs", ne, inter.len())?;
        for (e, &(v, w)) in graph.edges.iter().enumerate() {
            for (k, end) in [v, w].into_iter().enumerate() {
                let want = (ch0[e].gens(), ch1[end].gens());
                let got = (inter[e][k].rows, inter[e][k].cols);
                if want != got {
                    return Err(SkeletonError::BadMapShape { name: format!("inter[{e}][{k}]"), want, got });
                }
            }
        }
        if let Some(push) = &push {
            count("push map pairs", ne, push.len())?;
            for (e, &(v, w)) in graph.edges.iter().enumerate() {
                for (k, end) in [v, w].into_iter().enumerate() {
                    let want = (ch0_vertex[end].gens(), ch0[e].gens());
                    let got = (push[e][k].rows, push[e][k].cols);
                    if want != got {
                        return Err(SkeletonError::BadMapShape { name: format!("push[{e}][{k}]"), want, got });
                    }
                }
            }
        }
        Ok(Self { modulus, graph, ch1, ch0, ch0_vertex, inter, push })
    }

    /// Every module `Z^1` (or `(Z/c)^1`) and every map the identity.
    pub fn unit(modulus: u64, graph: DualGraph) -> Self {
        let nv = graph.vertices.len();
        let ne = graph.edges.len();
        let id = || [IntMatrix::identity(1), IntMatrix::identity(1)];
        Self::new(
            modulus,
            graph,
            vec![FgModule::free(1); nv],
            vec![FgModule::free(1); ne],
            vec![FgModule::free(1); nv],
            (0..ne).map(|_| id()).collect(),
            Some((0..ne).map(|_| id()).collect()),
        )
        .expect("unit skeleton is well formed")
    }

    pub fn ch1_offsets(&self) -> Vec<usize> {
        block_offsets(&self.ch1)
    }

    /// `Psi: sum_v CH1[v] -> sum_e CH0[e]`, row block `e` is
    /// `inter[e][0]` at `v(e)` and `-inter[e][1]` at `w(e)`.
    pub fn psi_map(&self) -> LinearMap {
        let col_off = block_offsets(&self.ch1);
        let row_off = block_offsets(&self.ch0);
        let mut m = IntMatrix::zeros(*row_off.last().unwrap(), *col_off.last().unwrap());
        for (e, &(v, w)) in self.graph.edges.iter().enumerate() {
            place(&mut m, row_off[e], col_off[v], &self.inter[e][0]);
            place(&mut m, row_off[e], col_off[w], &self.inter[e][1].neg());
        }
        LinearMap { modulus: self.modulus, domain: self.ch1.clone(), codomain: self.ch0.clone(), matrix: m }
    }

    /// `Phi: sum_v CH1[v] -> sum_v CH0_vertex[v]`; block `(j, i)` is
    /// `push[e][j] inter[e][i]` for adjacent `i != j`, and the diagonal block
    /// is minus the sum of `push[e][i] inter[e][i]` over edges at `i`.
    pub fn phi_map(&self) -> Result<LinearMap> {
        let push = self.push.as_ref().ok_or(SkeletonError::MissingPush)?;
        let col_off = block_offsets(&self.ch1);
        let row_off = block_offsets(&self.ch0_vertex);
        let mut m = IntMatrix::zeros(*row_off.last().unwrap(), *col_off.last().unwrap());
        for (e, &(v, w)) in self.graph.edges.iter().enumerate() {
            let ends = [v, w];
            for i in 0..2 {
                let j = 1 - i;
                let off = push[e][j].mul(&self.inter[e][i]);
                add_block(&mut m, row_off[ends[j]], col_off[ends[i]], &off);
                let diag = push[e][i].mul(&self.inter[e][i]).neg();
                add_block(&mut m, row_off[ends[i]], col_off[ends[i]], &diag);
            }
        }
        Ok(LinearMap {
            modulus: self.modulus,
            domain: self.ch1.clone(),
            codomain: self.ch0_vertex.clone(),
            matrix: m,
        })
    }
}

fn place(m: &mut IntMatrix, r0: usize, c0: usize, b: &IntMatrix) {
    for i in 0..b.rows {
        for j in 0..b.cols {
            m.data[r0 + i][c0 + j] = b.data[i][j];
        }
    }
}

fn add_block(m: &mut IntMatrix, r0: usize, c0: usize, b: &IntMatrix) {
    for i in 0..b.rows {
        for j in 0..b.cols {
            m.data[r0 + i][c0 + j] += b.data[i][j];
        }
    }
}

/// On-disk form of a skeleton: matrices as plain row lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonFile {
    /// 0 for Z, c for Z/c.
    pub modulus: u64,
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub ch1: Vec<FgModule>,
    pub ch0: Vec<FgModule>,
    pub ch0_vertex: Vec<FgModule>,
    pub inter: Vec<[Vec<Vec<i64>>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub push: Option<Vec<[Vec<Vec<i64>>; 2]>>,
}

impl SkeletonFile {
    pub fn from_json(text: &str) -> Result<ChainSkeleton> {
        let f: SkeletonFile = serde_json::from_str(text).map_err(|e| SkeletonError::Json(e.to_string()))?;
        f.into_skeleton()
    }

    pub fn into_skeleton(self) -> Result<ChainSkeleton> {
        for m in self.ch1.iter().chain(&self.ch0).chain(&self.ch0_vertex) {
            FgModule::new(m.rank, m.torsion.clone())?;
        }
        let graph = DualGraph::new(self.vertices, self.edges)?;
        let shape = |name: String, data: Vec<Vec<i64>>, rows: usize, cols: usize| {
            let got = (data.len(), data.first().map_or(cols, |r| r.len()));
            IntMatrix::from_rows(rows, cols, data).ok_or(SkeletonError::BadMapShape { name, want: (rows, cols), got })
        };
        let mut inter = Vec::new();
        for (e, pair) in self.inter.into_iter().enumerate() {
            let Some(&(v, w)) = graph.edges.get(e) else {
                return Err(SkeletonError::Count { what: "intersection map pairs", want: graph.edges.len(), got: e + 1 });
            };
            let rows = self.ch0[e].gens();
            let [a, b] = pair;
            inter.push([
                shape(format!("inter[{e}][0]"), a, rows, self.ch1[v].gens())?,
                shape(format!("inter[{e}][1]"), b, rows, self.ch1[w].gens())?,
            ]);
        }
        let push = match self.push {
            None => None,
            Some(ps) => {
                let mut out = Vec::new();
                for (e, pair) in ps.into_iter().enumerate() {
                    let Some(&(v, w)) = graph.edges.get(e) else {
                        return Err(SkeletonError::Count { what: "push map pairs", want: graph.edges.len(), got: e + 1 });
                    };
                    let cols = self.ch0[e].gens();
                    let [a, b] = pair;
                    out.push([
                        shape(format!("push[{e}][0]"), a, self.ch0_vertex[v].gens(), cols)?,
                        shape(format!("push[{e}][1]"), b, self.ch0_vertex[w].gens(), cols)?,
                    ]);
                }
                Some(out)
            }
        };
        ChainSkeleton::new(self.modulus, graph, self.ch1, self.ch0, self.ch0_vertex, inter, push)
    }

    pub fn from_skeleton(sk: &ChainSkeleton) -> Self {
        let rows = |m: &IntMatrix| m.data.clone();
        Self {
            modulus: sk.modulus,
            vertices: sk.graph.vertices.clone(),
            edges: sk.graph.edges.clone(),
            ch1: sk.ch1.clone(),
            ch0: sk.ch0.clone(),
            ch0_vertex: sk.ch0_vertex.clone(),
            inter: sk.inter.iter().map(|[a, b]| [rows(a), rows(b)]).collect(),
            push: sk.push.as_ref().map(|p| p.iter().map(|[a, b]| [rows(a), rows(b)]).collect()),
        }
    }
}
