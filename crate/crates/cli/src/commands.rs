use std::fmt;
use std::io::Write;
use std::path::Path;

use dcone::base_case::{build_base_state, BaseParams, HChoice, ParamValue};
use dcone::bounds::{self, BoundQuery, BoundsError};
use dcone::double_cone::{self, DoubleConeError, SampleRegion};
use dcone::report::Report;
use dcone::skeleton::{self, FgModule, IntMatrix, LinearMap, SkeletonError, SkeletonFile};
use dcone::state_file::{Provenance, StateFile};
use serde_json::json;

use crate::{BaseArgs, BoundsArgs, Cli, Command, ConstructCmd, InductArgs, SkeletonCmd, VerifyArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or malformed input files.
    Usage(String),
    /// A domain error or failed check.
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) | CliError::Failed(s) => f.write_str(s),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn failed(msg: impl fmt::Display) -> CliError {
    CliError::Failed(msg.to_string())
}

fn skeleton_err(e: SkeletonError) -> CliError {
    match e {
        SkeletonError::RDivisibilityViolated { .. } => failed(e),
        _ => usage(e),
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8> {
    if cli.json && cli.seed.is_none() {
        return Err(usage("--json requires --seed"));
    }
    let ctx = Ctx { json: cli.json, seed: cli.seed.unwrap_or(0), explicit_seed: cli.seed };
    match &cli.command {
        Command::Bounds(a) => bounds_cmd(&ctx, a, out),
        Command::Construct(ConstructCmd::Base(a)) => construct_base(&ctx, a, out),
        Command::Induct(a) => induct(&ctx, a, out),
        Command::Verify(a) => verify(&ctx, a, out),
        Command::Skeleton(cmd) => skeleton_cmd(&ctx, cmd, out),
    }
}

struct Ctx {
    json: bool,
    seed: u64,
    explicit_seed: Option<u64>,
}

fn print_json(out: &mut dyn Write, v: &impl serde::Serialize) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"))?;
    Ok(())
}

fn bounds_cmd(ctx: &Ctx, a: &BoundsArgs, out: &mut dyn Write) -> Result<u8> {
    if let Some(sum) = &a.sum {
        let (n, m) = (sum[0], sum[1]);
        if m < 2 {
            return Err(usage("--sum needs m >= 2"));
        }
        let s = bounds::sum_S(n, m);
        let closed = match bounds::closed_form_S(n, m) {
            Ok(v) => Some(v),
            Err(BoundsError::UnsupportedM(_)) => None,
            Err(e) => return Err(failed(e)),
        };
        let agree = closed.as_ref().is_none_or(|c| *c == s);
        if ctx.json {
            let closed_s = closed.as_ref().map(|c| c.to_string());
            print_json(out, &json!({"n": n, "m": m, "S": s.to_string(), "closed_form": closed_s, "agree": agree}))?;
        } else {
            match &closed {
                Some(c) => writeln!(out, "S({n},{m}) = {s} (closed form {c})")?,
                None => writeln!(out, "S({n},{m}) = {s} (no closed form for m = {m})")?,
            }
        }
        return if agree { Ok(0) } else { Err(failed("closed form disagrees with the direct sum")) };
    }
    if let Some(range) = &a.table {
        let (lo, hi) = range
            .split_once('-')
            .or_else(|| range.split_once(".."))
            .and_then(|(x, y)| Some((x.trim().parse::<u32>().ok()?, y.trim().parse::<u32>().ok()?)))
            .ok_or_else(|| usage(format!("--table expects A-B, got `{range}`")))?;
        let m = a.m.unwrap_or(2);
        if m < 2 || lo > hi {
            return Err(usage("--table needs m >= 2 and A <= B"));
        }
        let rows = bounds::bounds_table(lo..=hi, m);
        if ctx.json {
            writeln!(out, "{}", bounds::table_json(&rows))?;
        } else {
            write!(out, "{}", bounds::table_tsv(&rows))?;
        }
        return Ok(0);
    }
    let (Some(d), Some(big_n)) = (a.d, a.big_n) else {
        return Err(usage("bounds needs --d and --N, or --table, or --sum"));
    };
    match a.m {
        Some(m) => {
            let q = BoundQuery::new(d, big_n, m, a.char_p).map_err(usage)?;
            let w = bounds::applicable(&q);
            if ctx.json {
                print_json(out, &json!({"query": q, "applicable": w.is_some(), "witness": w}))?;
            } else {
                match w {
                    Some(w) => writeln!(out, "applicable: yes, witness n={} r={} s={}", w.n, w.r, w.s)?,
                    None => writeln!(out, "applicable: no")?,
                }
            }
        }
        None => {
            let rep = bounds::divisor_report(d, big_n, a.char_p).map_err(usage)?;
            if ctx.json {
                print_json(out, &rep)?;
            } else {
                let list: Vec<String> = rep.divisors.iter().map(|m| m.to_string()).collect();
                writeln!(out, "divisors (m <= {}): {}", rep.m_max, if list.is_empty() { "none".into() } else { list.join(", ") })?;
                writeln!(out, "lcm: {}", rep.lcm)?;
                writeln!(out, "upper bound d!: {}", rep.upper_bound)?;
            }
        }
    }
    Ok(0)
}

fn parse_h(s: &str) -> Result<HChoice> {
    match s {
        "auto" => Ok(HChoice::Auto),
        "power-sum" => Ok(HChoice::PowerSum),
        "chain" => Ok(HChoice::Chain),
        _ => Err(usage(format!("--h must be auto, power-sum or chain, got `{s}`"))),
    }
}

fn write_state(ctx: &Ctx, file: &StateFile, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let text = file.to_json();
    match path {
        Some(p) => {
            std::fs::write(p, format!("{text}\n"))?;
            if ctx.json {
                print_json(out, &json!({"wrote": p.display().to_string(), "s": file.dims.s, "e": file.e}))?;
            } else {
                writeln!(out, "wrote {} (s = {}, e = {:?})", p.display(), file.dims.s, file.e)?;
            }
        }
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn construct_base(ctx: &Ctx, a: &BaseArgs, out: &mut dyn Write) -> Result<u8> {
    let bp = BaseParams::new(a.n, a.m, a.r, a.d, a.p).map_err(usage)?;
    let mut st = build_base_state(&bp, parse_h(&a.h)?).map_err(usage)?;
    for kv in &a.params {
        let (name, value) = kv.split_once('=').ok_or_else(|| usage(format!("--param expects name=value, got `{kv}`")))?;
        if st.ring.params().index_of(name).is_none() {
            return Err(usage(format!("unknown parameter `{name}`")));
        }
        let v: u64 = value.parse().map_err(|_| usage(format!("--param {name}: `{value}` is not an integer")))?;
        st.params.set(name, ParamValue::Value(v % a.p));
    }
    let detail = format!("n={} m={} r={} d={} p={} h={}", a.n, a.m, a.r, a.d, a.p, a.h);
    let log = vec![Provenance { op: "construct base".into(), seed: ctx.explicit_seed, detail }];
    write_state(ctx, &StateFile::from_state(&st, log), a.out.as_deref(), out)?;
    Ok(0)
}

fn load_state(path: &Path) -> Result<(StateFile, dcone::base_case::HypersurfaceState)> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let file = StateFile::from_json(&text).map_err(usage)?;
    let st = file.to_state().map_err(usage)?;
    Ok((file, st))
}

fn induct(ctx: &Ctx, a: &InductArgs, out: &mut dyn Write) -> Result<u8> {
    let (mut file, mut st) = load_state(&a.state)?;
    for step in 0..a.steps {
        let j0 = match a.j {
            Some(j) => j,
            None => double_cone::select_j0(&st)
                .ok_or_else(|| failed(format!("{} after {step} step(s)", DoubleConeError::EjExhausted)))?,
        };
        let next = double_cone::induct_step(&st, j0).map_err(|e| match e {
            DoubleConeError::IndexOutOfRange { .. } => usage(e),
            _ => failed(format!("{e} (after {step} step(s))")),
        })?;
        file = file.advance(&next, Provenance { op: "induct".into(), seed: None, detail: format!("j={j0}") });
        st = next;
    }
    write_state(ctx, &file, a.out.as_deref(), out)?;
    Ok(0)
}

fn verify(ctx: &Ctx, a: &VerifyArgs, out: &mut dyn Write) -> Result<u8> {
    let (_, st) = load_state(&a.state)?;
    let mut rep = double_cone::verify_state(&st, a.trials, ctx.seed);
    if let Some(j0) = double_cone::select_j0(&st) {
        let fam = double_cone::build_family(&st, j0).map_err(failed)?;
        rep.extend(double_cone::verify_singular_minors(&fam));
        if a.samples > 0 {
            let params = st.params.assignment(&st.ring, ctx.seed);
            let smooth = double_cone::smoothness_sample(&fam, SampleRegion::X0NonZero, a.samples, &params, ctx.seed)
                .map_err(failed)?;
            rep.extend(smooth);
        }
    }
    emit_report(ctx, &rep, out)?;
    Ok(if rep.all_pass() { 0 } else { 1 })
}

fn emit_report(ctx: &Ctx, rep: &Report, out: &mut dyn Write) -> Result<()> {
    if ctx.json {
        writeln!(out, "{}", rep.to_json())?;
        return Ok(());
    }
    for c in &rep.checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        if c.pass {
            writeln!(out, "{tag}  {}", c.check)?;
        } else {
            writeln!(out, "{tag}  {}: expected {}, got {}", c.check, c.expected, c.got)?;
        }
    }
    let s = &rep.summary;
    writeln!(out, "{} checks, {} passed, {} failed", s.total, s.passed, s.failed)?;
    Ok(())
}

fn load_skeleton(path: &Path) -> Result<skeleton::ChainSkeleton> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    SkeletonFile::from_json(&text).map_err(usage)
}

fn parse_map(arg: &str) -> Result<LinearMap> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| usage(format!("{arg}: {e}")))?
    };
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| usage(format!("map: {e}")))?;
    let rows_of = |m: &serde_json::Value| -> Result<Vec<Vec<i64>>> {
        serde_json::from_value(m.clone()).map_err(|e| usage(format!("map matrix: {e}")))
    };
    let (modulus, data, domain, codomain) = match &v {
        serde_json::Value::Array(_) => {
            let data = rows_of(&v)?;
            let cols = data.first().map_or(0, |r| r.len());
            let rows = data.len();
            (0, data, FgModule::free(cols), FgModule::free(rows))
        }
        serde_json::Value::Object(o) => {
            let data = rows_of(o.get("matrix").ok_or_else(|| usage("map: missing `matrix`"))?)?;
            let modulus = o.get("modulus").and_then(|x| x.as_u64()).unwrap_or(0);
            let module = |key: &str, default: usize| -> Result<FgModule> {
                match o.get(key) {
                    None => Ok(FgModule::free(default)),
                    Some(m) => {
                        let m: FgModule = serde_json::from_value(m.clone()).map_err(|e| usage(format!("map {key}: {e}")))?;
                        FgModule::new(m.rank, m.torsion).map_err(usage)
                    }
                }
            };
            let cols = data.first().map_or(0, |r| r.len());
            let rows = data.len();
            (modulus, data.clone(), module("domain", cols)?, module("codomain", rows)?)
        }
        _ => return Err(usage("map must be a matrix or an object")),
    };
    let matrix = IntMatrix::from_rows(codomain.gens(), domain.gens(), data)
        .ok_or_else(|| usage("map matrix does not match the module sizes"))?;
    LinearMap::new(modulus, domain, codomain, matrix).map_err(usage)
}

fn describe_cokernel(factors: &[u64], modulus: u64) -> String {
    if factors.is_empty() {
        return "0".into();
    }
    let part = |f: &u64| if *f == 0 { if modulus == 0 { "Z".to_string() } else { format!("Z/{modulus}") } } else { format!("Z/{f}") };
    factors.iter().map(part).collect::<Vec<_>>().join(" + ")
}

fn skeleton_cmd(ctx: &Ctx, cmd: &SkeletonCmd, out: &mut dyn Write) -> Result<u8> {
    match cmd {
        SkeletonCmd::Subdivide { graph, r } => {
            let sk = load_skeleton(graph)?;
            let ssk = skeleton::subdivide(&sk, *r).map_err(skeleton_err)?;
            let g = &ssk.skeleton.graph;
            if ctx.json {
                print_json(out, &SkeletonFile::from_skeleton(&ssk.skeleton))?;
            } else {
                writeln!(out, "vertices: {} (was {})", g.vertices.len(), sk.graph.vertices.len())?;
                writeln!(out, "edges: {} (was {})", g.edges.len(), sk.graph.edges.len())?;
                for &(v, w) in &g.edges {
                    writeln!(out, "{} -- {}", g.vertices[v], g.vertices[w])?;
                }
            }
            Ok(0)
        }
        SkeletonCmd::Telescope { c, r, k, trials } => {
            if *c == 0 || u64::from(*r) % c != 0 {
                return Err(failed(SkeletonError::RDivisibilityViolated { c: *c, r: *r }));
            }
            let passed = skeleton::telescope_trials(*c, *r, *k, *trials, ctx.seed);
            if ctx.json {
                print_json(out, &json!({"c": c, "r": r, "k": k, "trials": trials, "passed": passed}))?;
            } else {
                writeln!(out, "{passed}/{trials} pass")?;
            }
            Ok(if passed == *trials { 0 } else { 1 })
        }
        SkeletonCmd::Coker { map, m } => {
            let lm = parse_map(map)?;
            let factors = lm.cokernel();
            let yes = skeleton::cokernel_torsion(&lm, *m);
            if ctx.json {
                print_json(out, &json!({"cokernel": factors, "m": m, "torsion": yes}))?;
            } else {
                writeln!(out, "cokernel: {}", describe_cokernel(&factors, lm.modulus))?;
                writeln!(out, "{m}-torsion: {}", if yes { "yes" } else { "no" })?;
            }
            Ok(if yes { 0 } else { 1 })
        }
        SkeletonCmd::Transfer { graph, c, r, m, trials } => {
            let sk = load_skeleton(graph)?;
            let rep = skeleton::surjectivity_transfer_demo(&sk, *r, *c, *m, *trials, ctx.seed).map_err(skeleton_err)?;
            if ctx.json {
                print_json(out, &rep)?;
            } else {
                writeln!(out, "solved {}/{}, verified {}/{}", rep.solvable, rep.trials, rep.verified, rep.solvable)?;
            }
            Ok(if rep.verified == rep.solvable { 0 } else { 1 })
        }
    }
}
