//! Instance generators built from hardness reductions, each with a
//! certificate builder (source witness → schedule) and a decoder
//! (schedule → source witness).
//!
//! Vertices and edges are numbered from 1 in generated job ids, e.g. `v3^2`
//! is copy 2 of the job for vertex 3 and `e5^12` the edge-5 job for the
//! color pair (1, 2).

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, Job, MachineEnv, Schedule, Time};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("edge endpoint `{0}` is not a vertex")]
    UnknownVertex(String),
    #[error("graph is not simple: {0}")]
    NotSimple(String),
    #[error("coloring is not proper: {0}")]
    ImproperColoring(String),
    #[error("chi is missing or not onto the pattern: {0}")]
    BadChi(String),
    #[error("values sum to an odd total {0} and no target was given")]
    OddSum(u64),
    #[error("invalid witness: {0}")]
    BadWitness(String),
    #[error("schedule does not have the expected structure: {0}")]
    Structure(String),
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum VertexName {
    Int(i64),
    Str(String),
}

impl From<VertexName> for String {
    fn from(v: VertexName) -> String {
        match v {
            VertexName::Int(i) => i.to_string(),
            VertexName::Str(s) => s,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<VertexName>,
    #[serde(default)]
    edges: Vec<(VertexName, VertexName)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chi: Option<BTreeMap<String, VertexName>>,
}

/// A simple undirected graph, optionally with a map `chi` from its vertices
/// to the vertices of a pattern graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub chi: Option<BTreeMap<String, String>>,
}

impl SourceGraph {
    /// Vertices `1..=n` with edges given by 1-based pairs.
    pub fn numbered(n: usize, edges: &[(usize, usize)]) -> Self {
        SourceGraph {
            vertices: (1..=n).map(|i| i.to_string()).collect(),
            edges: edges
                .iter()
                .map(|&(u, v)| (u.to_string(), v.to_string()))
                .collect(),
            chi: None,
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..=n)
            .flat_map(|u| (u + 1..=n).map(move |v| (u, v)))
            .collect();
        Self::numbered(n, &edges)
    }

    pub fn with_chi<I, A, B>(mut self, chi: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        self.chi = Some(chi.into_iter().map(|(a, b)| (a.into(), b.into())).collect());
        self
    }

    pub fn from_json(text: &str) -> Result<Self, ReductionError> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        let g = SourceGraph {
            vertices: doc.vertices.into_iter().map(String::from).collect(),
            edges: doc
                .edges
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
            chi: doc
                .chi
                .map(|m| m.into_iter().map(|(k, v)| (k, v.into())).collect()),
        };
        g.check()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            vertices: self.vertices.iter().cloned().map(VertexName::Str).collect(),
            edges: self
                .edges
                .iter()
                .map(|(a, b)| (VertexName::Str(a.clone()), VertexName::Str(b.clone())))
                .collect(),
            chi: self.chi.as_ref().map(|m| {
                m.iter()
                    .map(|(k, v)| (k.clone(), VertexName::Str(v.clone())))
                    .collect()
            }),
        };
        serde_json::to_string(&doc).expect("graph serializes")
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn index_of(&self, v: &str) -> Option<usize> {
        self.vertices.iter().position(|x| x == v)
    }

    /// Edges as 0-based index pairs; fails on unknown endpoints.
    pub fn indexed_edges(&self) -> Result<Vec<(usize, usize)>, ReductionError> {
        self.edges
            .iter()
            .map(|(a, b)| {
                let ia = self
                    .index_of(a)
                    .ok_or_else(|| ReductionError::UnknownVertex(a.clone()))?;
                let ib = self
                    .index_of(b)
                    .ok_or_else(|| ReductionError::UnknownVertex(b.clone()))?;
                Ok((ia, ib))
            })
            .collect()
    }

    pub fn check(&self) -> Result<(), ReductionError> {
        let names: HashSet<&String> = self.vertices.iter().collect();
        if names.len() != self.vertices.len() {
            return Err(ReductionError::NotSimple("duplicate vertex".into()));
        }
        let mut seen = HashSet::new();
        for (a, b) in self.indexed_edges()? {
            if a == b {
                return Err(ReductionError::NotSimple(format!(
                    "loop at `{}`",
                    self.vertices[a]
                )));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(ReductionError::NotSimple(format!(
                    "parallel edge `{}`-`{}`",
                    self.vertices[a], self.vertices[b]
                )));
            }
        }
        Ok(())
    }

    fn has_edge(&self, a: usize, b: usize) -> Result<bool, ReductionError> {
        Ok(self
            .indexed_edges()?
            .iter()
            .any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)))
    }
}

fn unit(id: String, d: Time) -> Job {
    Job::new(id, 1).with_deadline(d)
}

fn slot_index(sched: &Schedule) -> HashMap<&str, (usize, Time)> {
    sched
        .entries
        .iter()
        .map(|e| (e.job.as_str(), (e.machine, e.start)))
        .collect()
}

// ---------------------------------------------------------------------------
// 3-Coloring → 1|d_j,prec,p_j=1|k-sched,C_max

/// Deadlines of the four job groups for `n` vertices and `m` edges, indexed
/// from 1.
struct ColDeadlines {
    n: Time,
    m: Time,
}

impl ColDeadlines {
    fn v(&self, i: Time) -> Time {
        i
    }
    fn e(&self, j: Time) -> Time {
        self.n + j
    }
    fn f(&self, j: Time) -> Time {
        self.n + 2 * self.m + 1 - j
    }
    fn w(&self, i: Time) -> Time {
        2 * self.n + 2 * self.m + 1 - i
    }
}

const PAIRS: [(usize, usize); 6] = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)];

/// One machine, unit jobs, `k = C_max = 2n + 2m`. Vertex `i` gets jobs
/// `v_i^a` (deadline `i`) and `w_i^a` (deadline `2n+2m+1−i`) with
/// `v_i^a ≺ w_i^a`; edge `j = {u, v}` gets `e_j^{ab}` (deadline `n+j`) and
/// `f_j^{ab}` (deadline `n+2m+1−j`) for `a ≠ b`, with `u^a, v^b ≺ e_j^{ab} ≺ f_j^{ab}`.
pub fn gen_3coloring(g: &SourceGraph) -> Result<Instance, ReductionError> {
    g.check()?;
    let edges = g.indexed_edges()?;
    let dl = ColDeadlines {
        n: g.n() as Time,
        m: edges.len() as Time,
    };
    let mut jobs = Vec::new();
    let mut prec = Vec::new();
    for i in 1..=g.n() {
        for a in 1..=3 {
            jobs.push(unit(format!("v{i}^{a}"), dl.v(i as Time)));
            jobs.push(unit(format!("w{i}^{a}"), dl.w(i as Time)));
            prec.push((format!("v{i}^{a}"), format!("w{i}^{a}")));
        }
    }
    for (j, &(u, v)) in edges.iter().enumerate() {
        let j = j + 1;
        let (u, v) = (u + 1, v + 1);
        for (a, b) in PAIRS {
            let e = format!("e{j}^{a}{b}");
            let f = format!("f{j}^{a}{b}");
            jobs.push(unit(e.clone(), dl.e(j as Time)));
            jobs.push(unit(f.clone(), dl.f(j as Time)));
            prec.push((format!("v{u}^{a}"), e.clone()));
            prec.push((format!("v{v}^{b}"), e.clone()));
            prec.push((e, f));
        }
    }
    let k = 2 * g.n() + 2 * edges.len();
    Ok(Instance::new(MachineEnv::Single, jobs, k)
        .with_prec(prec)
        .with_cmax(k as Time))
}

fn check_coloring(g: &SourceGraph, colors: &[u8]) -> Result<(), ReductionError> {
    if colors.len() != g.n() || colors.iter().any(|c| !(1..=3).contains(c)) {
        return Err(ReductionError::ImproperColoring(
            "need one color in 1..=3 per vertex".into(),
        ));
    }
    for (u, v) in g.indexed_edges()? {
        if colors[u] == colors[v] {
            return Err(ReductionError::ImproperColoring(format!(
                "edge `{}`-`{}` is monochromatic",
                g.vertices[u], g.vertices[v]
            )));
        }
    }
    Ok(())
}

/// Runs every job of the coloring exactly at its deadline.
pub fn certify_3coloring(g: &SourceGraph, colors: &[u8]) -> Result<Schedule, ReductionError> {
    check_coloring(g, colors)?;
    let edges = g.indexed_edges()?;
    let dl = ColDeadlines {
        n: g.n() as Time,
        m: edges.len() as Time,
    };
    let mut s = Schedule::new();
    for (i, &a) in colors.iter().enumerate() {
        let i1 = i as Time + 1;
        s.push(format!("v{}^{a}", i + 1), 0, dl.v(i1) - 1);
        s.push(format!("w{}^{a}", i + 1), 0, dl.w(i1) - 1);
    }
    for (j, &(u, v)) in edges.iter().enumerate() {
        let j1 = j as Time + 1;
        let (a, b) = (colors[u], colors[v]);
        s.push(format!("e{}^{a}{b}", j + 1), 0, dl.e(j1) - 1);
        s.push(format!("f{}^{a}{b}", j + 1), 0, dl.f(j1) - 1);
    }
    Ok(s.sorted())
}

/// Reads the color of each vertex from the `v_i^a` job it runs.
pub fn decode_3coloring(g: &SourceGraph, sched: &Schedule) -> Result<Vec<u8>, ReductionError> {
    let at = slot_index(sched);
    let mut colors = Vec::with_capacity(g.n());
    for i in 1..=g.n() {
        let used: Vec<u8> = (1..=3u8)
            .filter(|a| at.contains_key(format!("v{i}^{a}").as_str()))
            .collect();
        match used[..] {
            [a] => colors.push(a),
            _ => {
                return Err(ReductionError::Structure(format!(
                    "vertex {i} has {} scheduled v-jobs",
                    used.len()
                )))
            }
        }
    }
    check_coloring(g, &colors).map_err(|e| ReductionError::Structure(e.to_string()))?;
    Ok(colors)
}

// ---------------------------------------------------------------------------
// k-Clique → 1|prec|k-sched,C_max

/// Vertex jobs `p = 2`, edge jobs `p = 1` after both endpoints;
/// `k' = q + q(q−1)/2`, `C_max = 2q + q(q−1)/2`.
pub fn gen_clique(g: &SourceGraph, q: usize) -> Result<Instance, ReductionError> {
    g.check()?;
    if q == 0 {
        return Err(ReductionError::BadWitness("clique size must be positive".into()));
    }
    let edges = g.indexed_edges()?;
    let mut jobs: Vec<Job> = (1..=g.n()).map(|i| Job::new(format!("v{i}"), 2)).collect();
    let mut prec = Vec::new();
    for (j, &(u, v)) in edges.iter().enumerate() {
        let e = format!("e{}", j + 1);
        jobs.push(Job::new(e.clone(), 1));
        prec.push((format!("v{}", u + 1), e.clone()));
        prec.push((format!("v{}", v + 1), e));
    }
    let pairs = q * (q - 1) / 2;
    Ok(Instance::new(MachineEnv::Single, jobs, q + pairs)
        .with_prec(prec)
        .with_cmax((2 * q + pairs) as Time))
}

/// Clique vertices first, then the edges among them.
pub fn certify_clique(g: &SourceGraph, clique: &[usize]) -> Result<Schedule, ReductionError> {
    let set: HashSet<usize> = clique.iter().copied().collect();
    if set.len() != clique.len() || clique.iter().any(|&v| v >= g.n()) {
        return Err(ReductionError::BadWitness("clique vertices must be distinct".into()));
    }
    for (i, &a) in clique.iter().enumerate() {
        for &b in &clique[i + 1..] {
            if !g.has_edge(a, b)? {
                return Err(ReductionError::BadWitness(format!(
                    "`{}` and `{}` are not adjacent",
                    g.vertices[a], g.vertices[b]
                )));
            }
        }
    }
    let mut s = Schedule::new();
    let mut clock = 0;
    for &v in clique {
        s.push(format!("v{}", v + 1), 0, clock);
        clock += 2;
    }
    for (j, (u, v)) in g.indexed_edges()?.into_iter().enumerate() {
        if set.contains(&u) && set.contains(&v) {
            s.push(format!("e{}", j + 1), 0, clock);
            clock += 1;
        }
    }
    Ok(s)
}

/// The vertices whose jobs were scheduled, checked to form a clique.
pub fn decode_clique(g: &SourceGraph, sched: &Schedule, q: usize) -> Result<Vec<usize>, ReductionError> {
    let at = slot_index(sched);
    let verts: Vec<usize> = (0..g.n())
        .filter(|v| at.contains_key(format!("v{}", v + 1).as_str()))
        .collect();
    if verts.len() != q {
        return Err(ReductionError::Structure(format!(
            "{} vertex jobs scheduled, expected {q}",
            verts.len()
        )));
    }
    for (i, &a) in verts.iter().enumerate() {
        for &b in &verts[i + 1..] {
            if !g.has_edge(a, b)? {
                return Err(ReductionError::Structure("scheduled vertices are not a clique".into()));
            }
        }
    }
    Ok(verts)
}

// ---------------------------------------------------------------------------
// Partitioned Subgraph Isomorphism → 1|prec,r_j|k-sched,C_max and 2|prec|…

/// Pattern vertex index (0-based) of each target vertex.
fn chi_indices(target: &SourceGraph, pattern: &SourceGraph) -> Result<Vec<usize>, ReductionError> {
    let chi = target
        .chi
        .as_ref()
        .ok_or_else(|| ReductionError::BadChi("target has no chi".into()))?;
    let mut out = Vec::with_capacity(target.n());
    for v in &target.vertices {
        let c = chi
            .get(v)
            .ok_or_else(|| ReductionError::BadChi(format!("no value for `{v}`")))?;
        out.push(
            pattern
                .index_of(c)
                .ok_or_else(|| ReductionError::BadChi(format!("`{c}` is not a pattern vertex")))?,
        );
    }
    let hit: HashSet<usize> = out.iter().copied().collect();
    if hit.len() != pattern.n() {
        return Err(ReductionError::BadChi("not onto the pattern".into()));
    }
    Ok(out)
}

/// `t_i = Σ_{j ≤ i} 3^{s+1−j}` for `i = 0..=s`.
pub fn psi_stamps(s: usize) -> Vec<Time> {
    let mut t = vec![0 as Time; s + 1];
    for i in 1..=s {
        t[i] = t[i - 1] + (3 as Time).pow((s + 1 - i) as u32);
    }
    t
}

struct PsiParts {
    /// per target vertex: pattern index
    chi: Vec<usize>,
    /// target edges (0-based endpoints) whose colors form a pattern edge,
    /// with their 1-based target edge number
    edge_jobs: Vec<(usize, usize, usize)>,
    s: usize,
    pattern_edges: usize,
}

fn psi_parts(target: &SourceGraph, pattern: &SourceGraph) -> Result<PsiParts, ReductionError> {
    target.check()?;
    pattern.check()?;
    let chi = chi_indices(target, pattern)?;
    let mut edge_jobs = Vec::new();
    for (j, (u, v)) in target.indexed_edges()?.into_iter().enumerate() {
        if pattern.has_edge(chi[u], chi[v])? {
            edge_jobs.push((u, v, j + 1));
        }
    }
    Ok(PsiParts {
        chi,
        edge_jobs,
        s: pattern.n(),
        pattern_edges: pattern.edges.len(),
    })
}

fn psi_jobs(p: &PsiParts, with_release: bool) -> (Vec<Job>, Vec<(String, String)>) {
    let t = psi_stamps(p.s);
    let mut jobs = Vec::new();
    let mut prec = Vec::new();
    for (v, &c) in p.chi.iter().enumerate() {
        let i = c + 1;
        let mut job = Job::new(format!("v{}", v + 1), (3 as Time).pow((p.s + 1 - i) as u32));
        if with_release {
            job = job.with_release(t[i - 1]);
        }
        jobs.push(job);
    }
    for &(u, v, j) in &p.edge_jobs {
        let e = format!("e{j}");
        let mut job = Job::new(e.clone(), 1);
        if with_release {
            job = job.with_release(t[p.s]);
        }
        jobs.push(job);
        prec.push((format!("v{}", u + 1), e.clone()));
        prec.push((format!("v{}", v + 1), e));
    }
    (jobs, prec)
}

/// Vertex jobs `p = 3^{s+1−i}` released at `t_{i−1}` for pattern class `i`;
/// unit edge jobs released at `t_s` for target edges that map onto pattern
/// edges. `k = s + |E'|`, `C_max = t_s + |E'|`.
pub fn gen_psi(target: &SourceGraph, pattern: &SourceGraph) -> Result<Instance, ReductionError> {
    let p = psi_parts(target, pattern)?;
    let (jobs, prec) = psi_jobs(&p, true);
    let ts = psi_stamps(p.s)[p.s];
    Ok(Instance::new(MachineEnv::Single, jobs, p.s + p.pattern_edges)
        .with_prec(prec)
        .with_cmax(ts + p.pattern_edges as Time))
}

/// Two identical machines and no release dates: a chain of jobs
/// `r1 ≺ … ≺ rs` with `p(r_i) = 3^{s+1−i}` on the second machine replaces
/// the release dates (`r_i` precedes every job formerly released at `t_i`),
/// and `|E'|` unit fillers follow `rs`. `k = 2s + 2|E'|`.
pub fn gen_psi_2machine(target: &SourceGraph, pattern: &SourceGraph) -> Result<Instance, ReductionError> {
    let p = psi_parts(target, pattern)?;
    let (mut jobs, mut prec) = psi_jobs(&p, false);
    let s = p.s;
    for i in 1..=s {
        jobs.push(Job::new(format!("r{i}"), (3 as Time).pow((s + 1 - i) as u32)));
        if i > 1 {
            prec.push((format!("r{}", i - 1), format!("r{i}")));
        }
    }
    // jobs released at t_i: vertex class i+1 for i < s, edge jobs for i = s
    for (v, &c) in p.chi.iter().enumerate() {
        if c >= 1 {
            prec.push((format!("r{c}"), format!("v{}", v + 1)));
        }
    }
    for &(_, _, j) in &p.edge_jobs {
        prec.push((format!("r{s}"), format!("e{j}")));
    }
    for x in 1..=p.pattern_edges {
        jobs.push(Job::new(format!("x{x}"), 1));
        if s > 0 {
            prec.push((format!("r{s}"), format!("x{x}")));
        }
    }
    let ts = psi_stamps(s)[s];
    Ok(Instance::new(MachineEnv::Identical(2), jobs, 2 * s + 2 * p.pattern_edges)
        .with_prec(prec)
        .with_cmax(ts + p.pattern_edges as Time))
}

/// `phi[i]` = target vertex (0-based) for pattern vertex `i`.
fn psi_witness_edges(
    target: &SourceGraph,
    pattern: &SourceGraph,
    p: &PsiParts,
    phi: &[usize],
) -> Result<Vec<usize>, ReductionError> {
    if phi.len() != p.s || phi.iter().any(|&v| v >= target.n()) {
        return Err(ReductionError::BadWitness("need one target vertex per pattern vertex".into()));
    }
    for (i, &v) in phi.iter().enumerate() {
        if p.chi[v] != i {
            return Err(ReductionError::BadWitness(format!(
                "`{}` is not in class `{}`",
                target.vertices[v], pattern.vertices[i]
            )));
        }
    }
    let mut out = Vec::new();
    for (a, b) in pattern.indexed_edges()? {
        let (u, v) = (phi[a], phi[b]);
        let j = p
            .edge_jobs
            .iter()
            .find(|&&(x, y, _)| (x, y) == (u, v) || (x, y) == (v, u))
            .map(|&(_, _, j)| j)
            .ok_or_else(|| {
                ReductionError::BadWitness(format!(
                    "`{}`-`{}` is not a target edge",
                    target.vertices[u], target.vertices[v]
                ))
            })?;
        out.push(j);
    }
    Ok(out)
}

/// Vertex jobs at their release dates, edge jobs from `t_s` on.
pub fn certify_psi(
    target: &SourceGraph,
    pattern: &SourceGraph,
    phi: &[usize],
) -> Result<Schedule, ReductionError> {
    let p = psi_parts(target, pattern)?;
    let edge_ids = psi_witness_edges(target, pattern, &p, phi)?;
    let t = psi_stamps(p.s);
    let mut s = Schedule::new();
    for (i, &v) in phi.iter().enumerate() {
        s.push(format!("v{}", v + 1), 0, t[i]);
    }
    for (x, j) in edge_ids.into_iter().enumerate() {
        s.push(format!("e{j}"), 0, t[p.s] + x as Time);
    }
    Ok(s)
}

/// As [`certify_psi`], with the release chain and fillers on machine 1.
pub fn certify_psi_2machine(
    target: &SourceGraph,
    pattern: &SourceGraph,
    phi: &[usize],
) -> Result<Schedule, ReductionError> {
    let mut s = certify_psi(target, pattern, phi)?;
    let t = psi_stamps(pattern.n());
    let sz = pattern.n();
    for i in 1..=sz {
        s.push(format!("r{i}"), 1, t[i - 1]);
    }
    for x in 1..=pattern.edges.len() {
        s.push(format!("x{x}"), 1, t[sz] + x as Time - 1);
    }
    Ok(s.sorted())
}

/// The scheduled vertex job of each pattern class.
pub fn decode_psi(
    target: &SourceGraph,
    pattern: &SourceGraph,
    sched: &Schedule,
) -> Result<Vec<usize>, ReductionError> {
    let p = psi_parts(target, pattern)?;
    let at = slot_index(sched);
    let mut phi = vec![None; p.s];
    for v in 0..target.n() {
        if at.contains_key(format!("v{}", v + 1).as_str()) {
            let c = p.chi[v];
            if phi[c].replace(v).is_some() {
                return Err(ReductionError::Structure(format!(
                    "two vertex jobs of class `{}`",
                    pattern.vertices[c]
                )));
            }
        }
    }
    let phi: Vec<usize> = phi
        .into_iter()
        .enumerate()
        .map(|(c, v)| {
            v.ok_or_else(|| {
                ReductionError::Structure(format!("class `{}` unused", pattern.vertices[c]))
            })
        })
        .collect::<Result<_, _>>()?;
    psi_witness_edges(target, pattern, &p, &phi)
        .map_err(|e| ReductionError::Structure(e.to_string()))?;
    Ok(phi)
}

// ---------------------------------------------------------------------------
// Partition / Subset Sum → P2||k-sched,C_max

/// Two identical machines, `k = n`, `C_max = Σ/2`. With a target `T` a
/// padding job of size `|Σ − 2T|` is added so that a perfect split exists
/// iff some subset sums to `T`.
pub fn gen_partition(values: &[Time], target: Option<Time>) -> Result<Instance, ReductionError> {
    if values.contains(&0) {
        return Err(ReductionError::BadWitness("values must be positive".into()));
    }
    let sum: Time = values.iter().sum();
    let mut jobs: Vec<Job> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| Job::new(format!("a{}", i + 1), v))
        .collect();
    let total = match target {
        None if sum % 2 == 1 => return Err(ReductionError::OddSum(sum)),
        None => sum,
        Some(t) => {
            let pad = sum.abs_diff(2 * t);
            if pad > 0 {
                jobs.push(Job::new("pad", pad));
            }
            sum + pad
        }
    };
    let k = jobs.len();
    Ok(Instance::new(MachineEnv::Identical(2), jobs, k).with_cmax(total / 2))
}

/// `subset` on machine 0, the rest on machine 1, padding on whichever side
/// needs it.
pub fn certify_partition(
    values: &[Time],
    target: Option<Time>,
    subset: &[usize],
) -> Result<Schedule, ReductionError> {
    let inst = gen_partition(values, target)?;
    let half = inst.cmax.expect("generated with a bound");
    let chosen: HashSet<usize> = subset.iter().copied().collect();
    let mut s = Schedule::new();
    let mut clock = [0 as Time; 2];
    for (i, &v) in values.iter().enumerate() {
        let side = if chosen.contains(&i) { 0 } else { 1 };
        s.push(format!("a{}", i + 1), side, clock[side]);
        clock[side] += v;
    }
    if let Some(pad) = inst.jobs.iter().find(|j| j.id == "pad") {
        let side = if clock[0] <= clock[1] { 0 } else { 1 };
        s.push("pad", side, clock[side]);
        clock[side] += pad.proc[0];
    }
    if clock != [half, half] {
        return Err(ReductionError::BadWitness(format!(
            "sides sum to {} and {}, expected {half}",
            clock[0], clock[1]
        )));
    }
    Ok(s.sorted())
}

/// Indices of a subset summing to the target (or to `Σ/2`).
pub fn decode_partition(
    values: &[Time],
    target: Option<Time>,
    sched: &Schedule,
) -> Result<Vec<usize>, ReductionError> {
    let at = slot_index(sched);
    let sum: Time = values.iter().sum();
    let goal = target.unwrap_or(sum / 2);
    let mut sides = [Vec::new(), Vec::new()];
    for i in 0..values.len() {
        let (m, _) = at
            .get(format!("a{}", i + 1).as_str())
            .ok_or_else(|| ReductionError::Structure(format!("a{} unscheduled", i + 1)))?;
        sides[*m].push(i);
    }
    for side in sides {
        if side.iter().map(|&i| values[i]).sum::<Time>() == goal {
            return Ok(side);
        }
    }
    // the side holding the padding sums to Σ − T
    Err(ReductionError::Structure(format!("no side sums to {goal}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_schedule;
    use crate::oracle::{brute_force, DEFAULT_BUDGET};

    fn certified(inst: &Instance, s: &Schedule) {
        let v = check_schedule(inst, s).unwrap();
        assert!(v.feasible, "{:?}", v.violations);
        assert_eq!(v.jobs_done, inst.k);
        assert!(v.makespan <= inst.cmax.unwrap());
    }

    fn feasible(inst: &Instance) -> bool {
        brute_force(inst, inst.cmax, DEFAULT_BUDGET).unwrap().is_some()
    }

    #[test]
    fn three_coloring_sizes() {
        let k3 = gen_3coloring(&SourceGraph::complete(3)).unwrap();
        assert_eq!(k3.n(), 54);
        assert_eq!((k3.k, k3.cmax), (12, Some(12)));
        let one = gen_3coloring(&SourceGraph::numbered(1, &[])).unwrap();
        assert_eq!((one.n(), one.k, one.cmax), (6, 2, Some(2)));
        let none = gen_3coloring(&SourceGraph::default()).unwrap();
        assert_eq!((none.n(), none.k), (0, 0));
    }

    #[test]
    fn three_coloring_certificate() {
        let g = SourceGraph::complete(3);
        let inst = gen_3coloring(&g).unwrap();
        let s = certify_3coloring(&g, &[1, 2, 3]).unwrap();
        certified(&inst, &s);
        let mut starts: Vec<Time> = s.entries.iter().map(|e| e.start).collect();
        starts.sort_unstable();
        assert_eq!(starts, (0..12).collect::<Vec<_>>());
        assert_eq!(decode_3coloring(&g, &s).unwrap(), vec![1, 2, 3]);
        assert!(matches!(
            certify_3coloring(&g, &[1, 1, 2]),
            Err(ReductionError::ImproperColoring(_))
        ));
    }

    #[test]
    fn three_coloring_decoder_rejects_bad_structure() {
        let g = SourceGraph::numbered(2, &[(1, 2)]);
        let mut s = Schedule::new();
        s.push("v1^1", 0, 0);
        s.push("v2^1", 0, 1);
        assert!(matches!(decode_3coloring(&g, &s), Err(ReductionError::Structure(_))));
    }

    #[test]
    fn clique_examples() {
        let k3 = SourceGraph::complete(3);
        let inst = gen_clique(&k3, 3).unwrap();
        assert_eq!((inst.k, inst.cmax), (6, Some(9)));
        assert!(feasible(&inst));
        let s = certify_clique(&k3, &[0, 1, 2]).unwrap();
        certified(&inst, &s);
        assert_eq!(decode_clique(&k3, &s, 3).unwrap(), vec![0, 1, 2]);

        let p3 = SourceGraph::numbered(3, &[(1, 2), (2, 3)]);
        assert!(!feasible(&gen_clique(&p3, 3).unwrap()));

        let q1 = gen_clique(&p3, 1).unwrap();
        assert_eq!((q1.k, q1.cmax), (1, Some(2)));
        assert!(feasible(&q1));
        assert!(!feasible(&gen_clique(&SourceGraph::default(), 1).unwrap()));
    }

    fn single_edge_pattern() -> SourceGraph {
        SourceGraph::numbered(2, &[(1, 2)])
    }

    #[test]
    fn psi_single_edge() {
        let pattern = single_edge_pattern();
        let target = SourceGraph::numbered(2, &[(1, 2)]).with_chi([("1", "1"), ("2", "2")]);
        assert_eq!(psi_stamps(2), vec![0, 9, 12]);
        let inst = gen_psi(&target, &pattern).unwrap();
        assert_eq!((inst.k, inst.cmax), (3, Some(13)));
        let v1 = &inst.jobs[0];
        let v2 = &inst.jobs[1];
        let e = &inst.jobs[2];
        assert_eq!((v1.proc[0], v1.release), (9, 0));
        assert_eq!((v2.proc[0], v2.release), (3, 9));
        assert_eq!((e.proc[0], e.release), (1, 12));
        assert!(feasible(&inst));
        let s = certify_psi(&target, &pattern, &[0, 1]).unwrap();
        certified(&inst, &s);
        assert_eq!(decode_psi(&target, &pattern, &s).unwrap(), vec![0, 1]);

        let apart = SourceGraph::numbered(2, &[]).with_chi([("1", "1"), ("2", "2")]);
        assert!(!feasible(&gen_psi(&apart, &pattern).unwrap()));
    }

    #[test]
    fn psi_two_machines() {
        let pattern = single_edge_pattern();
        let target = SourceGraph::numbered(2, &[(1, 2)]).with_chi([("1", "1"), ("2", "2")]);
        let inst = gen_psi_2machine(&target, &pattern).unwrap();
        assert_eq!((inst.k, inst.cmax), (6, Some(13)));
        assert!(!inst.has_releases());
        certified(&inst, &certify_psi_2machine(&target, &pattern, &[0, 1]).unwrap());
        assert!(feasible(&inst));
    }

    #[test]
    fn psi_chi_must_be_onto() {
        let target = SourceGraph::numbered(2, &[(1, 2)]).with_chi([("1", "1"), ("2", "1")]);
        assert!(matches!(
            gen_psi(&target, &single_edge_pattern()),
            Err(ReductionError::BadChi(_))
        ));
    }

    #[test]
    fn partition_examples() {
        let inst = gen_partition(&[1, 2, 3], None).unwrap();
        assert_eq!(inst.cmax, Some(3));
        assert!(feasible(&inst));
        let s = certify_partition(&[1, 2, 3], None, &[2]).unwrap();
        certified(&inst, &s);
        assert_eq!(decode_partition(&[1, 2, 3], None, &s).unwrap(), vec![2]);

        let padded = gen_partition(&[1, 1, 1], Some(1)).unwrap();
        assert_eq!(padded.n(), 4);
        assert!(feasible(&padded));

        let two = gen_partition(&[2, 2], None).unwrap();
        assert_eq!((two.k, two.cmax), (2, Some(2)));
        assert!(feasible(&two));

        assert!(matches!(gen_partition(&[1, 2], None), Err(ReductionError::OddSum(3))));
    }

    #[test]
    fn graph_json() {
        let g = SourceGraph::from_json(r#"{"vertices":[1,"b",3],"edges":[[1,"b"],["b",3]]}"#).unwrap();
        assert_eq!(g.vertices, vec!["1", "b", "3"]);
        assert_eq!(SourceGraph::from_json(&g.to_json()).unwrap(), g);
        let chi = SourceGraph::from_json(r#"{"vertices":[1,2],"edges":[],"chi":{"1":1,"2":"x"}}"#)
            .unwrap();
        assert_eq!(chi.chi.unwrap()["2"], "x");
        assert!(SourceGraph::from_json(r#"{"vertices":[1],"edges":[[1,1]]}"#).is_err());
        assert!(SourceGraph::from_json(r#"{"vertices":[1],"extra":0}"#).is_err());
    }
}
