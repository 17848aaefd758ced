//! Polynomial cases: slot greedy for unit jobs with precedence, EDD greedy
//! for unit jobs with release dates and deadlines, and Moore–Hodgson based
//! solvers for a single machine with arbitrary processing times.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::model::{Instance, Schedule, Solution, Time};

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("solver does not apply: {0}")]
    WrongVariant(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

fn require(cond: bool, what: &str) -> Result<(), PolyError> {
    if cond {
        Ok(())
    } else {
        Err(PolyError::WrongVariant(what.to_string()))
    }
}

fn empty_solution() -> Solution {
    Solution {
        makespan: 0,
        schedule: Schedule::new(),
    }
}

/// Unit jobs with precedence and release dates: in every slot run up to `m`
/// available jobs, lowest index first, and jump ahead when nothing is
/// available. Optimal on one machine; an upper bound otherwise.
pub fn greedy_prec_unit(inst: &Instance) -> Result<Option<Solution>, PolyError> {
    require(inst.all_unit(), "processing times are not all 1")?;
    require(!inst.has_deadlines(), "deadlines present")?;
    let preds = inst.predecessor_lists()?;
    let n = inst.n();
    let m = inst.machine_count().max(1);
    if inst.k == 0 {
        return Ok(Some(empty_solution()));
    }
    // finish[j] = completion slot once scheduled
    let mut finish: Vec<Option<Time>> = vec![None; n];
    let mut sched = Schedule::new();
    let mut done = 0;
    let mut t: Time = 1;
    loop {
        let ready = |j: usize, finish: &[Option<Time>], t: Time| {
            finish[j].is_none() && preds[j].iter().all(|&p| finish[p].is_some_and(|c| c < t))
        };
        let mut placed = 0;
        for j in 0..n {
            if placed == m || done == inst.k {
                break;
            }
            if inst.jobs[j].release < t && ready(j, &finish, t) {
                finish[j] = Some(t);
                sched.push(inst.jobs[j].id.clone(), placed, t - 1);
                placed += 1;
                done += 1;
            }
        }
        if done == inst.k {
            return Ok(Some(Solution {
                makespan: t,
                schedule: sched,
            }));
        }
        if placed == 0 {
            // idle: skip to the next release of a job whose predecessors are done
            let next = (0..n)
                .filter(|&j| ready(j, &finish, t))
                .map(|j| inst.jobs[j].release + 1)
                .min();
            match next {
                Some(r) if r > t => t = r,
                _ => return Ok(None),
            }
        } else {
            t += 1;
        }
    }
}

/// Unit jobs with release dates and deadlines, no precedence: each slot runs
/// the available unexpired jobs with the earliest deadlines (ties by index).
pub fn greedy_edd_unit(inst: &Instance) -> Result<Option<Solution>, PolyError> {
    require(inst.all_unit(), "processing times are not all 1")?;
    require(!inst.has_prec(), "precedence constraints present")?;
    let m = inst.machine_count().max(1);
    if inst.k == 0 {
        return Ok(Some(empty_solution()));
    }
    // (release slot, deadline or ∞, index), sorted by release slot
    let mut by_release: Vec<(Time, Time, usize)> = inst
        .jobs
        .iter()
        .enumerate()
        .map(|(j, job)| (job.release + 1, job.deadline.unwrap_or(Time::MAX), j))
        .collect();
    by_release.sort_unstable();
    let mut heap: BinaryHeap<Reverse<(Time, usize)>> = BinaryHeap::new();
    let mut next = 0;
    let mut sched = Schedule::new();
    let mut done = 0;
    let mut t: Time = 1;
    loop {
        while next < by_release.len() && by_release[next].0 <= t {
            let (_, d, j) = by_release[next];
            heap.push(Reverse((d, j)));
            next += 1;
        }
        let mut placed = 0;
        while placed < m && done < inst.k {
            let Some(Reverse((d, j))) = heap.pop() else {
                break;
            };
            if d < t {
                continue;
            }
            sched.push(inst.jobs[j].id.clone(), placed, t - 1);
            placed += 1;
            done += 1;
        }
        if done == inst.k {
            return Ok(Some(Solution {
                makespan: t,
                schedule: sched,
            }));
        }
        // drop expired jobs so an empty heap means idle
        while heap.peek().is_some_and(|Reverse((d, _))| *d <= t) {
            heap.pop();
        }
        if heap.is_empty() {
            if next == by_release.len() {
                return Ok(None);
            }
            t = by_release[next].0;
        } else {
            t += 1;
        }
    }
}

/// Moore–Hodgson on `(p, d)` pairs (`None` = no deadline): the largest set
/// of jobs that can all finish on time on one machine, as an EDD sequence of
/// input indices.
pub fn moore_max_ontime(jobs: &[(Time, Option<Time>)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by_key(|&j| (jobs[j].1.unwrap_or(Time::MAX), j));
    let mut kept: BinaryHeap<(Time, usize)> = BinaryHeap::new();
    let mut removed = vec![false; jobs.len()];
    let mut clock: Time = 0;
    for &j in &order {
        let (p, d) = jobs[j];
        kept.push((p, j));
        clock += p;
        if d.is_some_and(|d| clock > d) {
            let (q, i) = kept.pop().expect("just pushed");
            clock -= q;
            removed[i] = true;
        }
    }
    order.into_iter().filter(|&j| !removed[j]).collect()
}

/// Single machine, no precedence, at most one of release dates / deadlines.
pub fn solve_single_machine(inst: &Instance) -> Result<Option<Solution>, PolyError> {
    require(inst.machine_count() == 1, "more than one machine")?;
    require(!inst.has_prec(), "precedence constraints present")?;
    require(
        !(inst.has_releases() && inst.has_deadlines()),
        "both release dates and deadlines present",
    )?;
    if inst.k == 0 {
        return Ok(Some(empty_solution()));
    }
    if inst.k > inst.n() {
        return Ok(None);
    }
    let p = |j: usize| inst.jobs[j].processing(0);
    if inst.has_releases() {
        Ok(solve_release(inst))
    } else if inst.has_deadlines() {
        Ok(solve_deadline(inst))
    } else {
        let mut order: Vec<usize> = (0..inst.n()).collect();
        order.sort_by_key(|&j| (p(j), j));
        Ok(Some(back_to_back(inst, &order[..inst.k])))
    }
}

fn back_to_back(inst: &Instance, seq: &[usize]) -> Solution {
    let mut sched = Schedule::new();
    let mut clock = 0;
    for &j in seq {
        sched.push(inst.jobs[j].id.clone(), 0, clock);
        clock += inst.jobs[j].processing(0);
    }
    Solution {
        makespan: clock,
        schedule: sched,
    }
}

/// Smallest `c` in `[lo, hi]` with `ok(c)`, given monotonicity and `ok(hi)`.
fn first_true(mut lo: Time, mut hi: Time, ok: impl Fn(Time) -> bool) -> Time {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// `1|d_j|`: the makespan bound `C` acts as a common deadline; the smallest
/// `C` for which Moore keeps `k` jobs is optimal, and the first `k` jobs of
/// its EDD sequence realize it.
fn solve_deadline(inst: &Instance) -> Option<Solution> {
    let capped = |c: Time| -> Vec<(Time, Option<Time>)> {
        inst.jobs
            .iter()
            .map(|j| (j.processing(0), Some(j.deadline.map_or(c, |d| d.min(c)))))
            .collect()
    };
    let total: Time = inst.jobs.iter().map(|j| j.processing(0)).sum();
    let k = inst.k;
    if moore_max_ontime(&capped(total)).len() < k {
        return None;
    }
    let c = first_true(0, total, |c| moore_max_ontime(&capped(c)).len() >= k);
    let seq = moore_max_ontime(&capped(c));
    Some(back_to_back(inst, &seq[..k]))
}

/// `1|r_j|`: reversing time around `C` turns release dates into deadlines
/// `C − r_j`, which reduces to the deadline case.
fn solve_release(inst: &Instance) -> Option<Solution> {
    let reversed = |c: Time| -> Vec<(Time, Option<Time>)> {
        inst.jobs
            .iter()
            .map(|j| {
                // a job with r_j > C cannot run: deadline 0 and p ≥ 1 exclude it
                (j.processing(0), Some(c.saturating_sub(j.release)))
            })
            .collect()
    };
    let k = inst.k;
    let hi = inst.jobs.iter().map(|j| j.release).max().unwrap_or(0)
        + inst.jobs.iter().map(|j| j.processing(0)).sum::<Time>();
    if moore_max_ontime(&reversed(hi)).len() < k {
        return None;
    }
    let c = first_true(0, hi, |c| moore_max_ontime(&reversed(c)).len() >= k);
    let seq = moore_max_ontime(&reversed(c));
    let mut sched = Schedule::new();
    let mut clock = 0;
    for &j in &seq[..k] {
        clock += inst.jobs[j].processing(0);
        sched.push(inst.jobs[j].id.clone(), 0, c - clock);
    }
    Some(Solution {
        makespan: c,
        schedule: sched.sorted(),
    })
}
