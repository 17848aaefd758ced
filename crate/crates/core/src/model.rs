//! Instance and schedule data model, instance validation, and the schedule
//! checker that certifies every solver's output.
//!
//! Time convention: `release` is the earliest allowed start, `deadline` the
//! latest allowed completion, and a job with processing time `p` started at
//! `s` occupies the half-open interval `[s, s + p)`. A missing deadline means
//! +∞ and is never replaced by a large sentinel number.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integral time. All release dates, deadlines and processing times use it.
pub type Time = u64;

/// Structural problems that make an input unusable (as opposed to a schedule
/// that is merely infeasible).
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown job id `{0}`")]
    UnknownJob(String),
    #[error("job `{job}` assigned to machine {machine}, but only {count} machine(s) exist")]
    MachineOutOfRange {
        job: String,
        machine: usize,
        count: usize,
    },
    #[error("invalid machine description: {0}")]
    Machines(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachineEnv {
    Single,
    Identical(usize),
    Unrelated(usize),
}

impl MachineEnv {
    pub fn count(&self) -> usize {
        match *self {
            MachineEnv::Single => 1,
            MachineEnv::Identical(m) | MachineEnv::Unrelated(m) => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub id: String,
    /// One entry for single/identical machines, one per machine otherwise.
    pub proc: Vec<Time>,
    pub release: Time,
    pub deadline: Option<Time>,
}

impl Job {
    pub fn new(id: impl Into<String>, p: Time) -> Self {
        Job {
            id: id.into(),
            proc: vec![p],
            release: 0,
            deadline: None,
        }
    }

    pub fn with_release(mut self, r: Time) -> Self {
        self.release = r;
        self
    }

    pub fn with_deadline(mut self, d: Time) -> Self {
        self.deadline = Some(d);
        self
    }

    pub fn with_proc(mut self, proc: Vec<Time>) -> Self {
        self.proc = proc;
        self
    }

    /// Processing time on `machine`.
    pub fn processing(&self, machine: usize) -> Time {
        if self.proc.len() == 1 {
            self.proc[0]
        } else {
            self.proc[machine]
        }
    }

    pub fn min_processing(&self) -> Time {
        self.proc.iter().copied().min().unwrap_or(0)
    }

    /// Whether completing by `c` respects the deadline.
    pub fn meets_deadline(&self, c: Time) -> bool {
        self.deadline.is_none_or(|d| c <= d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub machines: MachineEnv,
    pub jobs: Vec<Job>,
    /// `(a, b)`: `a` must complete before `b` starts.
    pub prec: Vec<(String, String)>,
    /// Number of jobs to schedule.
    pub k: usize,
    /// Optional decision bound on the makespan.
    pub cmax: Option<Time>,
}

impl Instance {
    pub fn new(machines: MachineEnv, jobs: Vec<Job>, k: usize) -> Self {
        Instance {
            machines,
            jobs,
            prec: Vec::new(),
            k,
            cmax: None,
        }
    }

    pub fn with_prec<A: Into<String>, B: Into<String>>(
        mut self,
        edges: impl IntoIterator<Item = (A, B)>,
    ) -> Self {
        self.prec
            .extend(edges.into_iter().map(|(a, b)| (a.into(), b.into())));
        self
    }

    pub fn with_cmax(mut self, cmax: Time) -> Self {
        self.cmax = Some(cmax);
        self
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn machine_count(&self) -> usize {
        self.machines.count()
    }

    /// Map from job id to position. Later duplicates are ignored.
    pub fn job_index(&self) -> HashMap<&str, usize> {
        let mut map = HashMap::with_capacity(self.jobs.len());
        for (i, j) in self.jobs.iter().enumerate() {
            map.entry(j.id.as_str()).or_insert(i);
        }
        map
    }

    /// Precedence edges as job positions.
    pub fn indexed_edges(&self) -> Result<Vec<(usize, usize)>, ModelError> {
        let index = self.job_index();
        self.prec
            .iter()
            .map(|(a, b)| {
                let ia = *index
                    .get(a.as_str())
                    .ok_or_else(|| ModelError::UnknownJob(a.clone()))?;
                let ib = *index
                    .get(b.as_str())
                    .ok_or_else(|| ModelError::UnknownJob(b.clone()))?;
                Ok((ia, ib))
            })
            .collect()
    }

    /// Direct predecessors of every job, by position.
    pub fn predecessor_lists(&self) -> Result<Vec<Vec<usize>>, ModelError> {
        let mut preds = vec![Vec::new(); self.jobs.len()];
        for (a, b) in self.indexed_edges()? {
            if !preds[b].contains(&a) {
                preds[b].push(a);
            }
        }
        Ok(preds)
    }

    pub fn all_unit(&self) -> bool {
        self.jobs.iter().all(|j| j.proc.iter().all(|&p| p == 1))
    }

    pub fn has_deadlines(&self) -> bool {
        self.jobs.iter().any(|j| j.deadline.is_some())
    }

    pub fn has_releases(&self) -> bool {
        self.jobs.iter().any(|j| j.release > 0)
    }

    pub fn has_prec(&self) -> bool {
        !self.prec.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceDoc::from(self)).expect("instance serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&InstanceDoc::from(self)).expect("instance serializes")
    }
}

// ---------------------------------------------------------------------------
// JSON documents

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MachinesDoc {
    kind: MachineKind,
    #[serde(default)]
    count: Option<usize>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MachineKind {
    Single,
    Identical,
    Unrelated,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ProcDoc {
    One(Time),
    Many(Vec<Time>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobDoc {
    id: String,
    p: ProcDoc,
    #[serde(default)]
    r: Time,
    #[serde(default)]
    d: Option<Time>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    machines: MachinesDoc,
    jobs: Vec<JobDoc>,
    #[serde(default)]
    prec: Vec<(String, String)>,
    k: usize,
    #[serde(default)]
    cmax: Option<Time>,
}

impl TryFrom<InstanceDoc> for Instance {
    type Error = ModelError;

    fn try_from(doc: InstanceDoc) -> Result<Self, ModelError> {
        let machines = match (doc.machines.kind, doc.machines.count) {
            (MachineKind::Single, None | Some(1)) => MachineEnv::Single,
            (MachineKind::Single, Some(c)) => {
                return Err(ModelError::Machines(format!(
                    "kind `single` with count {c}"
                )))
            }
            (MachineKind::Identical, Some(c)) => MachineEnv::Identical(c),
            (MachineKind::Unrelated, Some(c)) => MachineEnv::Unrelated(c),
            (kind, None) => {
                return Err(ModelError::Machines(format!(
                    "kind `{kind:?}` requires a count"
                )))
            }
        };
        let jobs = doc
            .jobs
            .into_iter()
            .map(|j| Job {
                id: j.id,
                proc: match j.p {
                    ProcDoc::One(p) => vec![p],
                    ProcDoc::Many(ps) => ps,
                },
                release: j.r,
                deadline: j.d,
            })
            .collect();
        Ok(Instance {
            machines,
            jobs,
            prec: doc.prec,
            k: doc.k,
            cmax: doc.cmax,
        })
    }
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        let (kind, count) = match inst.machines {
            MachineEnv::Single => (MachineKind::Single, 1),
            MachineEnv::Identical(m) => (MachineKind::Identical, m),
            MachineEnv::Unrelated(m) => (MachineKind::Unrelated, m),
        };
        InstanceDoc {
            machines: MachinesDoc {
                kind,
                count: Some(count),
            },
            jobs: inst
                .jobs
                .iter()
                .map(|j| JobDoc {
                    id: j.id.clone(),
                    p: if j.proc.len() == 1 && !matches!(inst.machines, MachineEnv::Unrelated(_)) {
                        ProcDoc::One(j.proc[0])
                    } else {
                        ProcDoc::Many(j.proc.clone())
                    },
                    r: j.release,
                    d: j.deadline,
                })
                .collect(),
            prec: inst.prec.clone(),
            k: inst.k,
            cmax: inst.cmax,
        }
    }
}

// ---------------------------------------------------------------------------
// Schedules

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assignment {
    pub job: String,
    pub machine: usize,
    pub start: Time,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub entries: Vec<Assignment>,
}

impl Schedule {
    pub fn new() -> Self {
        Schedule::default()
    }

    pub fn push(&mut self, job: impl Into<String>, machine: usize, start: Time) {
        self.entries.push(Assignment {
            job: job.into(),
            machine,
            start,
        });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by `(start, machine)`.
    pub fn sorted(mut self) -> Self {
        self.entries
            .sort_by(|a, b| (a.start, a.machine, &a.job).cmp(&(b.start, b.machine, &b.job)));
        self
    }

    pub fn to_json(&self, makespan: Time) -> String {
        serde_json::to_string(&ScheduleDoc {
            entries: self.entries.clone(),
            makespan,
        })
        .expect("schedule serializes")
    }

    /// Parses a schedule document; the stored makespan is returned alongside.
    pub fn from_json(text: &str) -> Result<(Self, Time), ModelError> {
        let doc: ScheduleDoc = serde_json::from_str(text)?;
        Ok((
            Schedule {
                entries: doc.entries,
            },
            doc.makespan,
        ))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    entries: Vec<Assignment>,
    makespan: Time,
}

/// A schedule together with its makespan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub makespan: Time,
    pub schedule: Schedule,
}

impl Solution {
    /// Builds a solution, computing the makespan from the instance.
    pub fn from_schedule(inst: &Instance, schedule: Schedule) -> Result<Self, ModelError> {
        let index = inst.job_index();
        let mut makespan = 0;
        for e in &schedule.entries {
            let j = *index
                .get(e.job.as_str())
                .ok_or_else(|| ModelError::UnknownJob(e.job.clone()))?;
            makespan = makespan.max(e.start + inst.jobs[j].processing(e.machine));
        }
        Ok(Solution { makespan, schedule })
    }
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    DuplicateJobId(String),
    UnknownEdgeEndpoint { from: String, to: String },
    Cycle(Vec<String>),
    KExceedsJobCount { k: usize, n: usize },
    NoMachines,
    ProcessingArity { job: String, expected: usize, found: usize },
    ZeroProcessingTime(String),
    /// Warning: `release + min p > deadline`.
    Unschedulable(String),
    /// Warning: `k = 0` makes the instance trivial.
    ZeroK,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::DuplicateJobId(id) => write!(f, "duplicate job id `{id}`"),
            Issue::UnknownEdgeEndpoint { from, to } => {
                write!(f, "precedence edge ({from}, {to}) references an undeclared job")
            }
            Issue::Cycle(ids) => write!(f, "precedence cycle through {}", ids.join(", ")),
            Issue::KExceedsJobCount { k, n } => write!(f, "k exceeds job count ({k} > {n})"),
            Issue::NoMachines => write!(f, "machine count must be positive"),
            Issue::ProcessingArity {
                job,
                expected,
                found,
            } => write!(
                f,
                "job `{job}` has {found} processing time(s), expected {expected}"
            ),
            Issue::ZeroProcessingTime(id) => write!(f, "job `{id}` has a zero processing time"),
            Issue::Unschedulable(id) => {
                write!(f, "job `{id}` is unschedulable (release + p exceeds deadline)")
            }
            Issue::ZeroK => write!(f, "k is zero"),
        }
    }
}

/// Errors make the instance unusable; warnings flag permitted oddities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    /// Whether any error or warning message contains `needle`.
    pub fn mentions(&self, needle: &str) -> bool {
        self.errors
            .iter()
            .chain(&self.warnings)
            .any(|i| i.to_string().contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut report = ValidationReport::default();
    let m = inst.machine_count();
    if m == 0 {
        report.errors.push(Issue::NoMachines);
    }

    let mut seen = HashSet::new();
    for job in &inst.jobs {
        if !seen.insert(job.id.as_str()) {
            report.errors.push(Issue::DuplicateJobId(job.id.clone()));
        }
        let expected = match inst.machines {
            MachineEnv::Unrelated(c) => c,
            _ => 1,
        };
        if job.proc.len() != expected {
            report.errors.push(Issue::ProcessingArity {
                job: job.id.clone(),
                expected,
                found: job.proc.len(),
            });
        }
        if job.proc.contains(&0) {
            report.errors.push(Issue::ZeroProcessingTime(job.id.clone()));
        }
        if let Some(d) = job.deadline {
            if !job.proc.is_empty() && job.release + job.min_processing() > d {
                report.warnings.push(Issue::Unschedulable(job.id.clone()));
            }
        }
    }

    if inst.k > inst.n() {
        report.errors.push(Issue::KExceedsJobCount {
            k: inst.k,
            n: inst.n(),
        });
    }
    if inst.k == 0 {
        report.warnings.push(Issue::ZeroK);
    }

    let index = inst.job_index();
    let mut edges = Vec::with_capacity(inst.prec.len());
    for (a, b) in &inst.prec {
        match (index.get(a.as_str()), index.get(b.as_str())) {
            (Some(&ia), Some(&ib)) => edges.push((ia, ib)),
            _ => report.errors.push(Issue::UnknownEdgeEndpoint {
                from: a.clone(),
                to: b.clone(),
            }),
        }
    }
    let leftover = kahn_leftover(inst.n(), &edges);
    if !leftover.is_empty() {
        report.errors.push(Issue::Cycle(
            leftover.iter().map(|&i| inst.jobs[i].id.clone()).collect(),
        ));
    }
    report
}

/// Nodes that Kahn's algorithm cannot remove (those on or behind a cycle).
fn kahn_leftover(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in edges {
        indeg[b] += 1;
        succ[a].push(b);
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = vec![false; n];
    while let Some(v) = stack.pop() {
        removed[v] = true;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    (0..n).filter(|&v| !removed[v]).collect()
}

// ---------------------------------------------------------------------------
// Feasibility checking

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateEntry(String),
    ReleaseViolated { job: String, start: Time, release: Time },
    DeadlineViolated { job: String, completion: Time, deadline: Time },
    MachineOverlap { machine: usize, first: String, second: String },
    PrecedenceOrder { before: String, after: String },
    PredecessorUnscheduled { job: String, predecessor: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateEntry(j) => write!(f, "job `{j}` scheduled more than once"),
            Violation::ReleaseViolated {
                job,
                start,
                release,
            } => write!(f, "release violated: `{job}` starts at {start} < {release}"),
            Violation::DeadlineViolated {
                job,
                completion,
                deadline,
            } => write!(
                f,
                "deadline violated: `{job}` completes at {completion} > {deadline}"
            ),
            Violation::MachineOverlap {
                machine,
                first,
                second,
            } => write!(f, "machine {machine} overlap: `{first}` and `{second}`"),
            Violation::PrecedenceOrder { before, after } => {
                write!(f, "precedence violated: `{after}` starts before `{before}` completes")
            }
            Violation::PredecessorUnscheduled { job, predecessor } => write!(
                f,
                "predecessor unscheduled: `{job}` runs without `{predecessor}`"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub jobs_done: usize,
    pub makespan: Time,
    pub violations: Vec<Violation>,
}

impl FeasibilityVerdict {
    pub fn mentions(&self, needle: &str) -> bool {
        self.violations
            .iter()
            .any(|v| v.to_string().contains(needle))
    }
}

/// Checks `sched` against every constraint of `inst`.
///
/// Unknown jobs and machine indices are structural errors; everything else
/// is reported as a violation.
pub fn check_schedule(inst: &Instance, sched: &Schedule) -> Result<FeasibilityVerdict, ModelError> {
    let index = inst.job_index();
    let m = inst.machine_count();
    let mut violations = Vec::new();
    // (start, completion, machine) per scheduled job
    let mut slot: Vec<Option<(Time, Time)>> = vec![None; inst.n()];
    let mut per_machine: Vec<Vec<(Time, Time, usize)>> = vec![Vec::new(); m];
    let mut makespan = 0;
    let mut jobs_done = 0;

    for e in &sched.entries {
        let j = *index
            .get(e.job.as_str())
            .ok_or_else(|| ModelError::UnknownJob(e.job.clone()))?;
        if e.machine >= m {
            return Err(ModelError::MachineOutOfRange {
                job: e.job.clone(),
                machine: e.machine,
                count: m,
            });
        }
        let job = &inst.jobs[j];
        if slot[j].is_some() {
            violations.push(Violation::DuplicateEntry(job.id.clone()));
            continue;
        }
        let completion = e.start + job.processing(e.machine);
        slot[j] = Some((e.start, completion));
        jobs_done += 1;
        makespan = makespan.max(completion);
        per_machine[e.machine].push((e.start, completion, j));
        if e.start < job.release {
            violations.push(Violation::ReleaseViolated {
                job: job.id.clone(),
                start: e.start,
                release: job.release,
            });
        }
        if let Some(d) = job.deadline {
            if completion > d {
                violations.push(Violation::DeadlineViolated {
                    job: job.id.clone(),
                    completion,
                    deadline: d,
                });
            }
        }
    }

    for (machine, intervals) in per_machine.iter_mut().enumerate() {
        intervals.sort_unstable();
        for w in intervals.windows(2) {
            if w[1].0 < w[0].1 {
                violations.push(Violation::MachineOverlap {
                    machine,
                    first: inst.jobs[w[0].2].id.clone(),
                    second: inst.jobs[w[1].2].id.clone(),
                });
            }
        }
    }

    for (a, b) in &inst.prec {
        let ia = *index
            .get(a.as_str())
            .ok_or_else(|| ModelError::UnknownJob(a.clone()))?;
        let ib = *index
            .get(b.as_str())
            .ok_or_else(|| ModelError::UnknownJob(b.clone()))?;
        match (slot[ia], slot[ib]) {
            (_, None) => {}
            (None, Some(_)) => violations.push(Violation::PredecessorUnscheduled {
                job: b.clone(),
                predecessor: a.clone(),
            }),
            (Some((_, ca)), Some((sb, _))) => {
                if ca > sb {
                    violations.push(Violation::PrecedenceOrder {
                        before: a.clone(),
                        after: b.clone(),
                    });
                }
            }
        }
    }

    Ok(FeasibilityVerdict {
        feasible: violations.is_empty(),
        jobs_done,
        makespan,
        violations,
    })
}

// ---------------------------------------------------------------------------
// Variant flags

/// Machine environment field of the three-field notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnvKind {
    Single,
    P,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VariantFlags {
    pub env: EnvKind,
    pub has_release: bool,
    pub has_deadline: bool,
    pub has_prec: bool,
    pub unit_p: bool,
}

impl VariantFlags {
    /// Flags as a property of the data: nonzero releases, finite deadlines,
    /// nonempty precedence and all-unit processing times. One machine is
    /// `Single` whatever its declared kind, and unrelated machines on which
    /// every job takes the same time everywhere are identical.
    pub fn of(inst: &Instance) -> Self {
        let unit_p = inst.all_unit();
        let uniform = inst
            .jobs
            .iter()
            .all(|j| j.proc.windows(2).all(|w| w[0] == w[1]));
        let env = match inst.machines {
            _ if inst.machine_count() == 1 => EnvKind::Single,
            MachineEnv::Single => EnvKind::Single,
            MachineEnv::Identical(_) => EnvKind::P,
            MachineEnv::Unrelated(_) if unit_p || uniform => EnvKind::P,
            MachineEnv::Unrelated(_) => EnvKind::R,
        };
        VariantFlags {
            env,
            has_release: inst.has_releases(),
            has_deadline: inst.has_deadlines(),
            has_prec: inst.has_prec(),
            unit_p,
        }
    }

    /// Three-field name such as `P|r_j,prec,p_j=1|k-sched,C_max`.
    pub fn notation(&self) -> String {
        let alpha = match self.env {
            EnvKind::Single => "1",
            EnvKind::P => "P",
            EnvKind::R => "R",
        };
        let mut beta = Vec::new();
        if self.has_release {
            beta.push("r_j");
        }
        if self.has_deadline {
            beta.push("d_j");
        }
        if self.has_prec {
            beta.push("prec");
        }
        if self.unit_p {
            beta.push("p_j=1");
        }
        format!("{alpha}|{}|k-sched,C_max", beta.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Instance {
        let jobs = ["a", "b", "c", "d"].iter().map(|id| Job::new(*id, 1)).collect();
        Instance::new(MachineEnv::Single, jobs, 4).with_prec([
            ("a", "b"),
            ("a", "c"),
            ("b", "d"),
            ("c", "d"),
        ])
    }

    fn chain2() -> Instance {
        Instance::new(MachineEnv::Single, vec![Job::new("a", 1), Job::new("b", 1)], 2)
            .with_prec([("a", "b")])
    }

    #[test]
    fn diamond_is_valid() {
        let report = validate_instance(&diamond());
        assert!(report.is_valid(), "{report}");
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let inst = diamond().with_prec([("a", "a")]);
        let report = validate_instance(&inst);
        assert!(!report.is_valid());
        assert!(report.mentions("cycle"));
    }

    #[test]
    fn longer_cycle_detected() {
        let inst = diamond().with_prec([("d", "a")]);
        assert!(validate_instance(&inst).mentions("cycle"));
    }

    #[test]
    fn k_too_large() {
        let mut inst = diamond();
        inst.k = 5;
        assert!(validate_instance(&inst).mentions("k exceeds job count"));
    }

    #[test]
    fn structural_issues_reported() {
        let mut inst = Instance::new(
            MachineEnv::Unrelated(2),
            vec![
                Job::new("a", 1).with_proc(vec![1, 2]),
                Job::new("a", 1).with_proc(vec![1]),
                Job::new("z", 0).with_proc(vec![0, 3]),
            ],
            1,
        );
        inst.prec.push(("a".into(), "ghost".into()));
        let report = validate_instance(&inst);
        assert!(report.mentions("duplicate job id"));
        assert!(report.mentions("expected 2"));
        assert!(report.mentions("zero processing time"));
        assert!(report.mentions("undeclared job"));
    }

    #[test]
    fn unschedulable_job_is_only_a_warning() {
        let inst = Instance::new(
            MachineEnv::Single,
            vec![Job::new("a", 3).with_release(2).with_deadline(4)],
            1,
        );
        let report = validate_instance(&inst);
        assert!(report.is_valid());
        assert!(report.mentions("unschedulable"));
    }

    #[test]
    fn chain_schedule_feasible() {
        let mut s = Schedule::new();
        s.push("a", 0, 0);
        s.push("b", 0, 1);
        let v = check_schedule(&chain2(), &s).unwrap();
        assert!(v.feasible, "{:?}", v.violations);
        assert_eq!(v.makespan, 2);
        assert_eq!(v.jobs_done, 2);
    }

    #[test]
    fn missing_predecessor() {
        let mut s = Schedule::new();
        s.push("b", 0, 1);
        let v = check_schedule(&chain2(), &s).unwrap();
        assert!(!v.feasible);
        assert!(v.mentions("predecessor unscheduled"));
    }

    #[test]
    fn precedence_order_and_overlap() {
        let mut s = Schedule::new();
        s.push("a", 0, 0);
        s.push("b", 0, 0);
        let v = check_schedule(&chain2(), &s).unwrap();
        assert!(v.mentions("precedence violated"));
        assert!(v.mentions("overlap"));
    }

    #[test]
    fn release_and_deadline() {
        let inst = Instance::new(
            MachineEnv::Single,
            vec![Job::new("a", 1).with_release(5), Job::new("b", 2).with_deadline(3)],
            1,
        );
        let mut s = Schedule::new();
        s.push("a", 0, 4);
        let v = check_schedule(&inst, &s).unwrap();
        assert!(!v.feasible);
        assert!(v.mentions("release violated"));

        let mut s = Schedule::new();
        s.push("b", 0, 2);
        assert!(check_schedule(&inst, &s).unwrap().mentions("deadline violated"));
    }

    #[test]
    fn structural_errors() {
        let mut s = Schedule::new();
        s.push("nope", 0, 0);
        assert!(matches!(
            check_schedule(&chain2(), &s),
            Err(ModelError::UnknownJob(_))
        ));
        let mut s = Schedule::new();
        s.push("a", 3, 0);
        assert!(matches!(
            check_schedule(&chain2(), &s),
            Err(ModelError::MachineOutOfRange { .. })
        ));
    }

    #[test]
    fn empty_schedule_has_zero_makespan() {
        let v = check_schedule(&chain2(), &Schedule::new()).unwrap();
        assert!(v.feasible);
        assert_eq!(v.makespan, 0);
        assert_eq!(v.jobs_done, 0);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"machines":{"kind":"unrelated","count":2},
            "jobs":[{"id":"a","p":[1,2],"r":0,"d":null},{"id":"b","p":[3,1],"r":2,"d":9}],
            "prec":[["a","b"]],"k":2,"cmax":null}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.machines, MachineEnv::Unrelated(2));
        assert_eq!(inst.jobs[1].deadline, Some(9));
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn json_rejects_unknown_fields() {
        let text = r#"{"machines":{"kind":"single"},"jobs":[],"k":0,"weights":[]}"#;
        assert!(Instance::from_json(text).is_err());
        let text = r#"{"machines":{"kind":"single"},"jobs":[{"id":"a","p":1,"w":3}],"k":1}"#;
        assert!(Instance::from_json(text).is_err());
    }

    #[test]
    fn schedule_json() {
        let mut s = Schedule::new();
        s.push("a", 0, 0);
        let text = s.to_json(1);
        assert_eq!(text, r#"{"entries":[{"job":"a","machine":0,"start":0}],"makespan":1}"#);
        assert_eq!(Schedule::from_json(&text).unwrap(), (s, 1));
    }

    #[test]
    fn flags_are_data_driven() {
        let inst = Instance::new(
            MachineEnv::Unrelated(2),
            vec![Job::new("a", 1).with_proc(vec![1, 1])],
            1,
        );
        let f = VariantFlags::of(&inst);
        assert_eq!(f.env, EnvKind::P);
        assert!(f.unit_p && !f.has_release && !f.has_deadline && !f.has_prec);

        let inst = Instance::new(MachineEnv::Identical(1), vec![Job::new("a", 2)], 1);
        assert_eq!(VariantFlags::of(&inst).env, EnvKind::Single);
        assert_eq!(VariantFlags::of(&diamond()).notation(), "1|prec,p_j=1|k-sched,C_max");
    }
}
