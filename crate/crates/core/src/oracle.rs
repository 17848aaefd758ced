//! Exhaustive `n^O(k)` solver, exact for every variant. It is the reference
//! every other solver is compared against.
//!
//! A sequence assignment fixes, per machine, the order of the jobs it runs;
//! realizing it starts every job as early as release date, machine and
//! predecessors allow. The search places `(job, machine)` pairs in strictly
//! increasing `(start, machine)` order, so every realized schedule is met
//! exactly once.

use thiserror::Error;

use crate::model::{Instance, ModelError, Schedule, Solution, Time, MachineEnv};

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Per-machine job sequences (job indices).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SequenceAssignment {
    pub seqs: Vec<Vec<usize>>,
}

impl SequenceAssignment {
    pub fn len(&self) -> usize {
        self.seqs.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The machine orders used by a schedule.
    pub fn from_schedule(inst: &Instance, sched: &Schedule) -> Result<Self, ModelError> {
        let index = inst.job_index();
        let mut per: Vec<Vec<(Time, usize)>> = vec![Vec::new(); inst.machine_count()];
        for e in &sched.entries {
            let j = *index
                .get(e.job.as_str())
                .ok_or_else(|| ModelError::UnknownJob(e.job.clone()))?;
            per.get_mut(e.machine)
                .ok_or_else(|| ModelError::MachineOutOfRange {
                    job: e.job.clone(),
                    machine: e.machine,
                    count: inst.machine_count(),
                })?
                .push((e.start, j));
        }
        Ok(SequenceAssignment {
            seqs: per
                .into_iter()
                .map(|mut v| {
                    v.sort_unstable();
                    v.into_iter().map(|(_, j)| j).collect()
                })
                .collect(),
        })
    }
}

/// Earliest-start realization of `assign`. Jobs are taken round by round
/// (position 1 on every machine, then position 2, …); a job whose
/// predecessor is sequenced but not yet placed waits for a later pass. Fails
/// on a missed deadline or a predecessor that is never placed.
pub fn greedy_realize(inst: &Instance, assign: &SequenceAssignment) -> Result<Option<Solution>, ModelError> {
    let preds = inst.predecessor_lists()?;
    let m = inst.machine_count();
    if assign.seqs.len() > m {
        return Err(ModelError::Machines(format!(
            "assignment uses {} machines, instance has {m}",
            assign.seqs.len()
        )));
    }
    let mut completion: Vec<Option<Time>> = vec![None; inst.n()];
    let mut pos = vec![0usize; assign.seqs.len()];
    let mut frontier = vec![0 as Time; assign.seqs.len()];
    let mut sched = Schedule::new();
    let total = assign.len();
    let mut placed = 0;
    while placed < total {
        let mut progress = false;
        for (i, seq) in assign.seqs.iter().enumerate() {
            let Some(&j) = seq.get(pos[i]) else { continue };
            if completion[j].is_some() {
                return Ok(None); // sequenced twice
            }
            let Some(ready) = preds[j]
                .iter()
                .map(|&p| completion[p])
                .try_fold(0, |acc, c| c.map(|c| acc.max(c)))
            else {
                continue;
            };
            let job = &inst.jobs[j];
            let start = job.release.max(frontier[i]).max(ready);
            let end = start + job.processing(i);
            if !job.meets_deadline(end) {
                return Ok(None);
            }
            completion[j] = Some(end);
            frontier[i] = end;
            sched.push(job.id.clone(), i, start);
            pos[i] += 1;
            placed += 1;
            progress = true;
        }
        if !progress {
            return Ok(None);
        }
    }
    let makespan = frontier.iter().copied().max().unwrap_or(0);
    Ok(Some(Solution {
        makespan,
        schedule: sched.sorted(),
    }))
}

struct Search<'a> {
    inst: &'a Instance,
    preds: Vec<Vec<usize>>,
    topo: Vec<usize>,
    m: usize,
    symmetric: bool,
    bound: Time,
    budget: u64,
    nodes: u64,
    // state
    completion: Vec<Option<Time>>,
    frontier: Vec<Time>,
    used: usize,
    trail: Vec<(usize, usize, Time)>,
    best: Option<(Time, Vec<(usize, usize, Time)>)>,
}

impl Search<'_> {
    /// Upper limit on the completion of job `j` that can still improve.
    fn limit(&self, j: usize) -> Time {
        let mut l = self.bound;
        if let Some((b, _)) = &self.best {
            l = l.min(b.saturating_sub(1));
        }
        self.inst.jobs[j].deadline.map_or(l, |d| d.min(l))
    }

    /// Counting bound: the `r` remaining jobs all start at or after `floor`,
    /// so the `i`-th of them to finish does so no earlier than
    /// `floor + ceil(i/m)`; the `r` latest effective deadlines must cover that.
    fn hopeless(&self, floor: Time, r: usize) -> bool {
        let n = self.inst.n();
        let mut est: Vec<Option<Time>> = vec![None; n];
        let mut limits = Vec::new();
        for &j in &self.topo {
            if self.completion[j].is_some() {
                continue;
            }
            let job = &self.inst.jobs[j];
            let mut start = floor.max(job.release);
            let mut alive = true;
            for &p in &self.preds[j] {
                match (self.completion[p], est[p]) {
                    (Some(c), _) => start = start.max(c),
                    (None, Some(e)) => start = start.max(e),
                    (None, None) => {
                        alive = false;
                        break;
                    }
                }
            }
            if !alive {
                continue;
            }
            let end = start + job.min_processing();
            let lim = self.limit(j);
            if end <= lim {
                est[j] = Some(end);
                limits.push(lim);
            }
        }
        if limits.len() < r {
            return true;
        }
        limits.sort_unstable();
        let top = &limits[limits.len() - r..];
        top.iter()
            .enumerate()
            .any(|(i, &d)| d < floor + (i / self.m) as Time + 1)
    }

    fn dfs(&mut self, last: (Time, usize)) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::BudgetExceeded(self.budget));
        }
        let k = self.inst.k;
        if self.trail.len() == k {
            let makespan = self.trail.iter().map(|t| t.2).max().unwrap_or(0);
            if self.best.as_ref().is_none_or(|(b, _)| makespan < *b) {
                self.best = Some((makespan, self.trail.clone()));
            }
            return Ok(());
        }
        if self.hopeless(last.0, k - self.trail.len()) {
            return Ok(());
        }
        let machines = if self.symmetric {
            (self.used + 1).min(self.m)
        } else {
            self.m
        };
        for j in 0..self.inst.n() {
            if self.completion[j].is_some() {
                continue;
            }
            let Some(ready) = self.preds[j]
                .iter()
                .map(|&p| self.completion[p])
                .try_fold(0, |acc, c| c.map(|c: Time| acc.max(c)))
            else {
                continue;
            };
            let job = &self.inst.jobs[j];
            for i in 0..machines {
                let start = job.release.max(self.frontier[i]).max(ready);
                if (start, i) <= last && !self.trail.is_empty() {
                    continue;
                }
                let end = start + job.processing(i);
                if end > self.limit(j) {
                    continue;
                }
                let saved = (self.frontier[i], self.used);
                self.completion[j] = Some(end);
                self.frontier[i] = end;
                self.used = self.used.max(i + 1);
                self.trail.push((j, i, end));
                let r = self.dfs((start, i));
                self.trail.pop();
                self.completion[j] = None;
                (self.frontier[i], self.used) = saved;
                r?;
            }
        }
        Ok(())
    }
}

/// Minimum makespan over all schedules of `k` jobs, optionally bounded by
/// `cmax`. Gives up with an error after `budget` search nodes.
pub fn brute_force(inst: &Instance, cmax: Option<Time>, budget: u64) -> Result<Option<Solution>, OracleError> {
    let preds = inst.predecessor_lists()?;
    let n = inst.n();
    // Kahn order for the bound computation; cycles leave nodes out and those
    // can never be placed anyway.
    let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut succ = vec![Vec::new(); n];
    for (j, ps) in preds.iter().enumerate() {
        for &p in ps {
            succ[p].push(j);
        }
    }
    let mut topo: Vec<usize> = (0..n).filter(|&j| indeg[j] == 0).collect();
    let mut head = 0;
    while head < topo.len() {
        let v = topo[head];
        head += 1;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                topo.push(w);
            }
        }
    }
    let m = inst.machine_count();
    let symmetric = match inst.machines {
        MachineEnv::Single | MachineEnv::Identical(_) => true,
        MachineEnv::Unrelated(_) => inst
            .jobs
            .iter()
            .all(|j| j.proc.windows(2).all(|w| w[0] == w[1])),
    };
    let mut s = Search {
        inst,
        preds,
        topo,
        m,
        symmetric,
        bound: cmax.unwrap_or(Time::MAX),
        budget,
        nodes: 0,
        completion: vec![None; n],
        frontier: vec![0; m],
        used: 0,
        trail: Vec::new(),
        best: None,
    };
    if inst.k > n || m == 0 {
        return Ok(None);
    }
    s.dfs((0, 0))?;
    Ok(s.best.map(|(makespan, trail)| {
        let mut sched = Schedule::new();
        for (j, i, end) in trail {
            sched.push(inst.jobs[j].id.clone(), i, end - inst.jobs[j].processing(i));
        }
        Solution {
            makespan,
            schedule: sched.sorted(),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{check_schedule, Job};

    fn solve(inst: &Instance) -> Option<Solution> {
        let sol = brute_force(inst, None, DEFAULT_BUDGET).unwrap();
        if let Some(s) = &sol {
            let v = check_schedule(inst, &s.schedule).unwrap();
            assert!(v.feasible, "{:?}", v.violations);
            assert_eq!(v.jobs_done, inst.k);
            assert_eq!(v.makespan, s.makespan);
        }
        sol
    }

    fn seqs(v: Vec<Vec<usize>>) -> SequenceAssignment {
        SequenceAssignment { seqs: v }
    }

    #[test]
    fn realize_chain() {
        let inst = Instance::new(MachineEnv::Single, vec![Job::new("a", 1), Job::new("b", 1)], 2)
            .with_prec([("a", "b")]);
        assert_eq!(greedy_realize(&inst, &seqs(vec![vec![0, 1]])).unwrap().unwrap().makespan, 2);
        assert!(greedy_realize(&inst, &seqs(vec![vec![1, 0]])).unwrap().is_none());
    }

    #[test]
    fn realize_release() {
        let inst = Instance::new(MachineEnv::Single, vec![Job::new("a", 3).with_release(5)], 1);
        assert_eq!(greedy_realize(&inst, &seqs(vec![vec![0]])).unwrap().unwrap().makespan, 8);
    }

    #[test]
    fn realize_defers_across_machines() {
        // b on machine 0 waits for a on machine 1, which appears later in its round
        let inst = Instance::new(
            MachineEnv::Identical(2),
            vec![Job::new("a", 2), Job::new("b", 1), Job::new("c", 1)],
            3,
        )
        .with_prec([("a", "b")]);
        let sol = greedy_realize(&inst, &seqs(vec![vec![1], vec![2, 0]])).unwrap().unwrap();
        assert_eq!(sol.makespan, 4);
        assert!(check_schedule(&inst, &sol.schedule).unwrap().feasible);
    }

    #[test]
    fn realize_missing_predecessor() {
        let inst = fixtures::diamond(1);
        assert!(greedy_realize(&inst, &seqs(vec![vec![1]])).unwrap().is_none());
    }

    #[test]
    fn figure_tree_and_diamond() {
        assert_eq!(solve(&fixtures::ternary_tree(1, 2)).unwrap().makespan, 2);
        assert_eq!(solve(&fixtures::diamond(1)).unwrap().makespan, 4);
        assert_eq!(solve(&fixtures::diamond(2)).unwrap().makespan, 3);
    }

    #[test]
    fn k_one_takes_earliest_completion() {
        let inst = Instance::new(
            MachineEnv::Unrelated(2),
            vec![
                Job::new("a", 1).with_proc(vec![5, 4]).with_release(1),
                Job::new("b", 1).with_proc(vec![7, 3]).with_release(2),
            ],
            1,
        );
        assert_eq!(solve(&inst).unwrap().makespan, 5);
    }

    #[test]
    fn zero_deadlines_infeasible() {
        let inst = Instance::new(
            MachineEnv::Single,
            vec![Job::new("a", 1).with_deadline(0), Job::new("b", 2).with_deadline(0)],
            1,
        );
        assert!(solve(&inst).is_none());
    }

    #[test]
    fn respects_cmax_and_budget() {
        let inst = fixtures::diamond(1);
        assert!(brute_force(&inst, Some(3), DEFAULT_BUDGET).unwrap().is_none());
        assert!(brute_force(&inst, Some(4), DEFAULT_BUDGET).unwrap().is_some());
        assert!(matches!(
            brute_force(&inst, None, 2),
            Err(OracleError::BudgetExceeded(2))
        ));
    }

    #[test]
    fn unrelated_machines_not_merged() {
        // the only fast machine for both jobs is machine 1
        let inst = Instance::new(
            MachineEnv::Unrelated(3),
            vec![
                Job::new("a", 1).with_proc(vec![9, 1, 9]),
                Job::new("b", 1).with_proc(vec![9, 9, 1]),
            ],
            2,
        );
        assert_eq!(solve(&inst).unwrap().makespan, 1);
    }

    #[test]
    fn schedule_round_trip_through_assignment() {
        let inst = fixtures::diamond(2);
        let sol = solve(&inst).unwrap();
        let assign = SequenceAssignment::from_schedule(&inst, &sol.schedule).unwrap();
        let again = greedy_realize(&inst, &assign).unwrap().unwrap();
        assert!(again.makespan <= sol.makespan);
    }
}
