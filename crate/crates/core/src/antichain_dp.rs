//! Decision and optimization for `P|r_j,prec,p_j=1|k-sched,C_max` by dynamic
//! programming over antichains of bounded depth.
//!
//! `S(A, t)` holds when exactly `pred(A)` can be processed by slot `t`;
//! `R(A, t)` additionally completes the schedule to `k` jobs by greedily
//! running minimal jobs of `G − pred(A)` after `t`. Only antichains of depth
//! at most `k` are ever queried at the `R` level.
//!
//! Slots are restricted to the event set `T = {ρ + i : ρ ∈ {0} ∪ ρ(V), 0 ≤ i ≤ k}`.
//! In a left-shifted schedule of at most `k` jobs every busy slot lies in
//! `T`, and `G^t` is constant between consecutive elements of `T`, so
//! `S(A, t) = S(A, ⌊t⌋_T)`.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{Instance, Schedule, Solution, Time};
use crate::poset::{build_poset, Antichain, PosetError, PrecedenceGraph};

#[derive(Debug, Error)]
pub enum DpError {
    #[error("antichain DP needs unit jobs on identical machines without deadlines: {0}")]
    WrongVariant(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Forward over slots, `S` stored only for antichains of depth ≤ k.
    #[default]
    Faithful,
    /// Memoized recursion on `S` with no depth restriction below the top.
    Lazy,
}

/// One application of the recurrence: `placed` run in slot `t`, the rest of
/// `pred(A)` is `pred(prev)`, finished by `prev_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub placed: Vec<usize>,
    pub prev: Antichain,
    pub prev_t: Time,
}

/// Stored value of `S(A, t)`; the witness is absent for `A = ∅`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpEntry {
    pub value: bool,
    pub witness: Option<Step>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DpStats {
    /// `(t, number of antichains with d^t ≤ k)` for each visited slot.
    pub antichains_per_t: Vec<(Time, usize)>,
    pub table_entries: usize,
}

/// Greedy completion after slot `t`: `(node, slot)` pairs.
pub type Tail = Vec<(usize, Time)>;

pub struct DpContext {
    g: PrecedenceGraph,
    m: usize,
    k: usize,
    cmax: Time,
    mode: Mode,
    /// Sorted event slots, all ≥ 1.
    times: Vec<Time>,
    /// Faithful mode: true entries per canonical slot.
    layers: HashMap<Time, HashMap<Antichain, DpEntry>>,
    /// Lazy mode: memo on canonical `(A, t)`.
    memo: HashMap<(Antichain, Time), DpEntry>,
    enum_cache: Option<(usize, Vec<Antichain>)>,
    stats: DpStats,
}

pub fn check_variant(inst: &Instance) -> Result<(), DpError> {
    if !inst.all_unit() {
        return Err(DpError::WrongVariant("processing times are not all 1".into()));
    }
    if inst.has_deadlines() {
        return Err(DpError::WrongVariant("deadlines present".into()));
    }
    Ok(())
}

impl DpContext {
    pub fn new(inst: &Instance, cmax: Time, mode: Mode) -> Result<Self, DpError> {
        check_variant(inst)?;
        let g = build_poset(inst)?;
        let k = inst.k;
        let mut times: Vec<Time> = std::iter::once(0)
            .chain(g.rhos().iter().copied())
            .flat_map(|r| (0..=k as Time).map(move |i| r + i))
            .filter(|&t| t >= 1 && t <= cmax)
            .collect();
        times.sort_unstable();
        times.dedup();
        Ok(DpContext {
            g,
            m: inst.machine_count().max(1),
            k,
            cmax,
            mode,
            times,
            layers: HashMap::new(),
            memo: HashMap::new(),
            enum_cache: None,
            stats: DpStats::default(),
        })
    }

    pub fn graph(&self) -> &PrecedenceGraph {
        &self.g
    }

    pub fn event_slots(&self) -> &[Time] {
        &self.times
    }

    pub fn stats(&self) -> &DpStats {
        &self.stats
    }

    /// Largest event slot `≤ t`, or 0.
    pub fn canonical(&self, t: Time) -> Time {
        let i = self.times.partition_point(|&x| x <= t);
        if i == 0 {
            0
        } else {
            self.times[i - 1]
        }
    }

    fn antichains_at(&mut self, t: Time) -> Vec<Antichain> {
        let active = self.g.active(t);
        let size = active.count_ones(..);
        match &self.enum_cache {
            Some((s, list)) if *s == size => list.clone(),
            _ => {
                let list = self.g.enumerate_antichains_in(&active, self.k);
                self.enum_cache = Some((size, list.clone()));
                list
            }
        }
    }

    /// All `(X, A')` with `X ⊆ A`, `|X| ≤ m`, `A' = max(pred(A) \ X)`, in
    /// Gray-code order of `X` so that `pred(A) \ X` changes by one node.
    fn steps(&self, a: &Antichain) -> Vec<(Vec<usize>, Antichain)> {
        let nodes = a.nodes();
        let l = nodes.len();
        let mut rest = self.g.pred_set(a);
        let mut out = Vec::new();
        let mut prev_gray = 0u64;
        for i in 0u64..(1u64 << l) {
            let gray = i ^ (i >> 1);
            let flipped = gray ^ prev_gray;
            if flipped != 0 {
                rest.toggle(nodes[flipped.trailing_zeros() as usize]);
            }
            prev_gray = gray;
            if gray.count_ones() as usize > self.m {
                continue;
            }
            let mut placed = Vec::new();
            let mut next = Vec::new();
            for (b, &x) in nodes.iter().enumerate() {
                if gray >> b & 1 == 1 {
                    placed.push(x);
                } else {
                    next.push(x);
                }
            }
            for &x in &placed {
                for &y in self.g.predecessors(x) {
                    if rest.contains(y) && self.g.up_set(y).intersection_count(&rest) == 1 {
                        next.push(y);
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            out.push((placed, Antichain::from_sorted(next)));
        }
        out
    }

    fn released_by(&self, a: &Antichain, t: Time) -> bool {
        a.nodes().iter().all(|&x| self.g.rho(x) <= t)
    }

    /// `S(A, t)`.
    pub fn compute_s(&mut self, a: &Antichain, t: Time) -> bool {
        let t = self.canonical(t);
        if a.is_empty() {
            return true;
        }
        match self.mode {
            Mode::Lazy => self.s_lazy(a, t),
            Mode::Faithful => {
                self.run_layers_through(t);
                self.layers
                    .get(&t)
                    .is_some_and(|layer| layer.contains_key(a))
            }
        }
    }

    fn evaluate(&mut self, a: &Antichain, t: Time) -> DpEntry {
        let false_entry = DpEntry {
            value: false,
            witness: None,
        };
        if t == 0 || !self.released_by(a, t) {
            return false_entry;
        }
        let pred = self.g.pred_set(a).count_ones(..) as u128;
        if pred > self.m as u128 * t as u128 {
            return false_entry;
        }
        let prev_t = self.canonical(t - 1);
        for (placed, prev) in self.steps(a) {
            let ok = prev.is_empty()
                || match self.mode {
                    Mode::Lazy => self.s_lazy(&prev, prev_t),
                    Mode::Faithful => self
                        .layers
                        .get(&prev_t)
                        .is_some_and(|layer| layer.contains_key(&prev)),
                };
            if ok {
                return DpEntry {
                    value: true,
                    witness: Some(Step {
                        placed,
                        prev,
                        prev_t,
                    }),
                };
            }
        }
        false_entry
    }

    fn s_lazy(&mut self, a: &Antichain, t: Time) -> bool {
        if a.is_empty() {
            return true;
        }
        let key = (a.clone(), t);
        if let Some(e) = self.memo.get(&key) {
            return e.value;
        }
        let entry = self.evaluate(a, t);
        let value = entry.value;
        self.memo.insert(key, entry);
        self.stats.table_entries = self.memo.len();
        value
    }

    fn run_layers_through(&mut self, t: Time) {
        let pending: Vec<Time> = self
            .times
            .iter()
            .copied()
            .filter(|&x| x <= t && !self.layers.contains_key(&x))
            .collect();
        for x in pending {
            self.compute_layer(x);
        }
    }

    fn compute_layer(&mut self, t: Time) -> Vec<Antichain> {
        let list = self.antichains_at(t);
        let mut layer = HashMap::new();
        for a in &list {
            if a.is_empty() {
                continue;
            }
            let e = self.evaluate(a, t);
            if e.value {
                layer.insert(a.clone(), e);
            }
        }
        self.stats.table_entries += layer.len();
        self.layers.insert(t, layer);
        list
    }

    /// Minimal jobs of `G − pred(A)` packed `m` per slot after `t` by
    /// ascending `(ρ, index)`; `None` if `S(A, t)` fails or `k` is unreachable
    /// by `cmax`.
    pub fn fill(&mut self, a: &Antichain, t: Time) -> Option<Tail> {
        if !self.compute_s(a, t) {
            return None;
        }
        self.greedy_tail(a, t)
    }

    fn greedy_tail(&self, a: &Antichain, t: Time) -> Option<Tail> {
        let pred = self.g.pred_set(a);
        let done = pred.count_ones(..);
        let need = self.k.saturating_sub(done);
        if need == 0 {
            return Some(Vec::new());
        }
        let mut cands: Vec<usize> = (0..self.g.n())
            .filter(|&x| {
                !pred.contains(x)
                    && self.g.rho(x) <= self.cmax
                    && self.g.down_set(x).difference_count(&pred) == 1
            })
            .collect();
        if cands.len() < need {
            return None;
        }
        cands.sort_by_key(|&x| (self.g.rho(x), x));
        let mut tail = Vec::with_capacity(need);
        let (mut slot, mut used) = (t + 1, 0);
        for &x in &cands[..need] {
            if self.g.rho(x) > slot {
                slot = self.g.rho(x);
                used = 0;
            }
            if used == self.m {
                slot += 1;
                used = 0;
            }
            if slot > self.cmax {
                return None;
            }
            tail.push((x, slot));
            used += 1;
        }
        Some(tail)
    }

    fn entry(&self, a: &Antichain, t: Time) -> Option<&DpEntry> {
        match self.mode {
            Mode::Lazy => self.memo.get(&(a.clone(), t)),
            Mode::Faithful => self.layers.get(&t).and_then(|l| l.get(a)),
        }
    }

    /// Slot assignment of `pred(A)` following stored witnesses.
    fn unwind(&self, a: &Antichain, t: Time) -> Vec<(usize, Time)> {
        let mut out = Vec::new();
        let (mut a, mut t) = (a.clone(), self.canonical(t));
        while !a.is_empty() {
            let step = self
                .entry(&a, t)
                .and_then(|e| e.witness.clone())
                .expect("true entries carry a witness");
            out.extend(step.placed.iter().map(|&x| (x, t)));
            a = step.prev;
            t = step.prev_t;
        }
        out
    }

    fn to_solution(&self, slots: Vec<(usize, Time)>) -> Solution {
        let mut slots = slots;
        slots.sort_by_key(|&(x, s)| (s, x));
        let mut sched = Schedule::new();
        let mut makespan = 0;
        let mut i = 0;
        while i < slots.len() {
            let s = slots[i].1;
            let mut machine = 0;
            while i < slots.len() && slots[i].1 == s {
                sched.push(self.g.id(slots[i].0), machine, s - 1);
                machine += 1;
                i += 1;
            }
            makespan = s;
        }
        Solution {
            makespan,
            schedule: sched,
        }
    }

    /// Runs the decision procedure: for `t = 0` and every event slot up to
    /// `cmax`, tries `R(A, t)` on all antichains with `d^t(A) ≤ k`.
    pub fn decide(&mut self) -> Option<Solution> {
        if self.k == 0 {
            return Some(Solution {
                makespan: 0,
                schedule: Schedule::new(),
            });
        }
        let slots: Vec<Time> = std::iter::once(0).chain(self.times.clone()).collect();
        for t in slots {
            let list = match self.mode {
                Mode::Faithful if t > 0 => {
                    self.run_layers_through(t - 1);
                    self.compute_layer(t)
                }
                _ => self.antichains_at(t),
            };
            self.stats.antichains_per_t.push((t, list.len()));
            for a in &list {
                if let Some(tail) = self.fill(a, t) {
                    let mut slots = self.unwind(a, t);
                    slots.extend(tail);
                    return Some(self.to_solution(slots));
                }
            }
        }
        None
    }
}

/// A schedule of `k` jobs with makespan at most `cmax`, if one exists.
pub fn decide(inst: &Instance, cmax: Time, mode: Mode) -> Result<Option<Solution>, DpError> {
    Ok(DpContext::new(inst, cmax, mode)?.decide())
}

/// Smallest makespan, found by binary search over the event slots up to
/// `max(ρ) + k`.
pub fn minimize_makespan(inst: &Instance, mode: Mode) -> Result<Option<Solution>, DpError> {
    Ok(minimize_makespan_with_stats(inst, mode)?.map(|(s, _)| s))
}

pub fn minimize_makespan_with_stats(
    inst: &Instance,
    mode: Mode,
) -> Result<Option<(Solution, DpStats)>, DpError> {
    check_variant(inst)?;
    if inst.k == 0 {
        return Ok(Some((
            Solution {
                makespan: 0,
                schedule: Schedule::new(),
            },
            DpStats::default(),
        )));
    }
    let g = build_poset(inst)?;
    let horizon = g.rhos().iter().copied().max().unwrap_or(0) + inst.k as Time;
    let cands = DpContext::new(inst, horizon, mode)?.event_slots().to_vec();

    let attempt = |c: Time| -> Result<Option<(Solution, DpStats)>, DpError> {
        let mut ctx = DpContext::new(inst, c, mode)?;
        Ok(ctx.decide().map(|s| (s, ctx.stats().clone())))
    };

    let Some(last) = cands.last() else {
        return Ok(None);
    };
    let Some(mut best) = attempt(*last)? else {
        return Ok(None);
    };
    let (mut lo, mut hi) = (0, cands.len() - 1);
    // invariant: cands[hi] feasible, everything below lo infeasible
    while lo < hi {
        let mid = (lo + hi) / 2;
        match attempt(cands[mid])? {
            Some(found) => {
                hi = mid;
                best = found;
            }
            None => lo = mid + 1,
        }
    }
    debug_assert!(best.0.makespan <= cands[hi]);
    Ok(Some(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{check_schedule, Job, MachineEnv};

    fn ac(ctx: &DpContext, ids: &[&str]) -> Antichain {
        let g = ctx.graph();
        Antichain::new(g, ids.iter().map(|id| g.index_of(id).unwrap()).collect()).unwrap()
    }

    fn certify(inst: &Instance, sol: &Solution, bound: Time) {
        let v = check_schedule(inst, &sol.schedule).unwrap();
        assert!(v.feasible, "{:?}", v.violations);
        assert!(v.jobs_done >= inst.k);
        assert_eq!(v.makespan, sol.makespan);
        assert!(sol.makespan <= bound);
    }

    #[test]
    fn s_values_on_diamond() {
        for mode in [Mode::Faithful, Mode::Lazy] {
            let mut ctx = DpContext::new(&fixtures::diamond(1), 4, mode).unwrap();
            let a = ac(&ctx, &["a"]);
            let bc = ac(&ctx, &["b", "c"]);
            assert!(ctx.compute_s(&a, 1));
            assert!(!ctx.compute_s(&bc, 2));
            assert!(ctx.compute_s(&bc, 3));
        }
    }

    #[test]
    fn fill_on_figure_tree() {
        for mode in [Mode::Faithful, Mode::Lazy] {
            let inst = fixtures::ternary_tree(1, 2);
            let mut ctx = DpContext::new(&inst, 2, mode).unwrap();
            let r = ac(&ctx, &["r"]);
            let tail = ctx.fill(&r, 1).unwrap();
            assert_eq!(tail.len(), 1);
            assert_eq!(tail[0].1, 2);
            assert!(ctx.graph().id(tail[0].0).starts_with('c'));
        }
    }

    #[test]
    fn fill_empty_tail_and_gate() {
        let inst = fixtures::chain(3, 1);
        let mut ctx = DpContext::new(&inst, 3, Mode::Faithful).unwrap();
        let c = ac(&ctx, &["j3"]);
        assert_eq!(ctx.fill(&c, 3), Some(Vec::new()));
        assert_eq!(ctx.fill(&c, 2), None);
    }

    #[test]
    fn decide_figure_tree() {
        let inst = fixtures::ternary_tree(1, 2);
        for mode in [Mode::Faithful, Mode::Lazy] {
            let sol = decide(&inst, 2, mode).unwrap().unwrap();
            certify(&inst, &sol, 2);
            let first = sol.schedule.entries.iter().find(|e| e.start == 0).unwrap();
            assert_eq!(first.job, "r");
            assert!(decide(&inst, 1, mode).unwrap().is_none());
        }
    }

    #[test]
    fn decide_diamond() {
        let inst = fixtures::diamond(1);
        for mode in [Mode::Faithful, Mode::Lazy] {
            assert!(decide(&inst, 3, mode).unwrap().is_none());
            let sol = decide(&inst, 4, mode).unwrap().unwrap();
            certify(&inst, &sol, 4);
        }
    }

    #[test]
    fn decide_single_job() {
        for m in [1, 3] {
            let env = if m == 1 {
                MachineEnv::Single
            } else {
                MachineEnv::Identical(m)
            };
            let inst = Instance::new(env, vec![Job::new("x", 1)], 1);
            assert!(decide(&inst, 1, Mode::Faithful).unwrap().is_some());
        }
    }

    #[test]
    fn minimize_examples() {
        let tree = fixtures::ternary_tree(1, 2);
        let chain = fixtures::chain(3, 1);
        let late = Instance::new(MachineEnv::Single, vec![Job::new("x", 1).with_release(5)], 1);
        for mode in [Mode::Faithful, Mode::Lazy] {
            assert_eq!(minimize_makespan(&tree, mode).unwrap().unwrap().makespan, 2);
            assert_eq!(minimize_makespan(&chain, mode).unwrap().unwrap().makespan, 3);
            let sol = minimize_makespan(&late, mode).unwrap().unwrap();
            assert_eq!(sol.makespan, 6);
            certify(&late, &sol, 6);
        }
    }

    #[test]
    fn two_machines_diamond() {
        let inst = fixtures::diamond(2);
        let sol = minimize_makespan(&inst, Mode::Faithful).unwrap().unwrap();
        assert_eq!(sol.makespan, 3);
        certify(&inst, &sol, 3);
    }

    #[test]
    fn event_slots_compress_releases() {
        let inst = Instance::new(
            MachineEnv::Single,
            vec![Job::new("a", 1), Job::new("b", 1).with_release(100)],
            1,
        );
        let ctx = DpContext::new(&inst, 1000, Mode::Faithful).unwrap();
        assert_eq!(ctx.event_slots(), &[1, 2, 101, 102]);
        assert_eq!(ctx.canonical(50), 2);
        assert_eq!(ctx.canonical(0), 0);
    }

    #[test]
    fn rejects_deadlines_and_long_jobs() {
        let d = Instance::new(MachineEnv::Single, vec![Job::new("a", 1).with_deadline(3)], 1);
        assert!(matches!(
            decide(&d, 3, Mode::Faithful),
            Err(DpError::WrongVariant(_))
        ));
        let p = Instance::new(MachineEnv::Single, vec![Job::new("a", 2)], 1);
        assert!(decide(&p, 3, Mode::Faithful).is_err());
    }

    #[test]
    fn k_zero_is_trivial() {
        let mut inst = fixtures::diamond(1);
        inst.k = 0;
        let sol = minimize_makespan(&inst, Mode::Faithful).unwrap().unwrap();
        assert_eq!(sol.makespan, 0);
        assert!(sol.schedule.is_empty());
    }
}
