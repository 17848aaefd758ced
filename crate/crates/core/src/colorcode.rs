//! Color coding for `R|r_j,d_j|k-sched,C_max`.
//!
//! Jobs get random colors from `0..k`. For each machine `i` and color set
//! `X`, `B_i(X)` is the least makespan of a sequence on machine `i` that
//! uses exactly one job of every color in `X`. A colorful schedule exists iff
//! the sets with `B_i(X) ≤ C_max` can partition all colors across machines,
//! which is a subset convolution of the thresholded tables. Repeating over
//! `≈ e^k` colorings finds a schedule with constant probability whenever one
//! exists; a returned schedule is always genuine.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Instance, MachineEnv, Schedule, Solution, Time};

/// Tables have `2^k` entries; beyond this they stop being practical.
pub const MAX_K: usize = 20;

pub const INFINITY: Time = Time::MAX;

#[derive(Debug, Error)]
pub enum ColorError {
    #[error("k = {0} exceeds the supported maximum of {MAX_K}")]
    KTooLarge(usize),
    #[error("color coding does not handle precedence constraints")]
    Precedence,
    #[error("table of length {got} does not match 2^{k}")]
    TableSize { got: usize, k: usize },
    #[error("at least one trial is required")]
    NoTrials,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorAssignment {
    /// Color of each job, in `0..k`.
    pub colors: Vec<usize>,
    pub seed: u64,
}

/// Uniform independent colors from a seeded ChaCha stream.
pub fn random_coloring(n: usize, k: usize, seed: u64) -> ColorAssignment {
    assert!(k >= 1, "need at least one color");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ColorAssignment {
        colors: (0..n).map(|_| rng.random_range(0..k)).collect(),
        seed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetTable {
    pub machine: usize,
    pub k: usize,
    /// `B(X)` indexed by color mask; [`INFINITY`] when impossible.
    pub values: Vec<Time>,
    /// `(last color, job)` realizing `B(X)`.
    pub back: Vec<Option<(usize, usize)>>,
}

fn check_k(k: usize) -> Result<(), ColorError> {
    if k > MAX_K {
        Err(ColorError::KTooLarge(k))
    } else {
        Ok(())
    }
}

/// `B_i(X) = min_{l ∈ X} min_{c(j) = l} max(r_j, B_i(X − l)) + p_ij`,
/// over jobs that meet their deadline.
pub fn machine_dp(
    inst: &Instance,
    machine: usize,
    coloring: &ColorAssignment,
    k: usize,
) -> Result<SubsetTable, ColorError> {
    check_k(k)?;
    let mut by_color: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (j, &c) in coloring.colors.iter().enumerate() {
        by_color[c].push(j);
    }
    let size = 1usize << k;
    let mut values = vec![INFINITY; size];
    let mut back = vec![None; size];
    values[0] = 0;
    for x in 1..size {
        let mut best = INFINITY;
        let mut arg = None;
        let mut bits = x;
        while bits != 0 {
            let l = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let prev = values[x ^ (1 << l)];
            if prev == INFINITY {
                continue;
            }
            for &j in &by_color[l] {
                let job = &inst.jobs[j];
                let c = job.release.max(prev) + job.processing(machine);
                if c < best && job.meets_deadline(c) {
                    best = c;
                    arg = Some((l, j));
                }
            }
        }
        values[x] = best;
        back[x] = arg;
    }
    Ok(SubsetTable {
        machine,
        k,
        values,
        back,
    })
}

/// `A_i(X) = [B_i(X) ≤ C_max]`.
pub fn threshold_table(tbl: &SubsetTable, cmax: Time) -> Vec<bool> {
    tbl.values.iter().map(|&b| b <= cmax).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvMode {
    /// Ranked zeta/Möbius transforms, `O(2^k k^2)`.
    #[default]
    Fast,
    /// Direct sum over submasks, `O(3^k)`.
    Naive,
}

/// `(f * g)(X) = Σ_{Y ⊆ X} f(Y) g(X − Y)` over `u64` with wrapping
/// arithmetic. Intermediate transform values may wrap; the result is exact
/// whenever the true convolution fits in 64 bits.
pub fn subset_convolution(f: &[u64], g: &[u64], k: usize, mode: ConvMode) -> Vec<u64> {
    let size = 1usize << k;
    assert!(f.len() == size && g.len() == size);
    match mode {
        ConvMode::Naive => (0..size)
            .map(|x| {
                let mut acc = 0u64;
                let mut y = x;
                loop {
                    acc = acc.wrapping_add(f[y].wrapping_mul(g[x ^ y]));
                    if y == 0 {
                        break;
                    }
                    y = (y - 1) & x;
                }
                acc
            })
            .collect(),
        ConvMode::Fast => {
            let fh = ranked_zeta(f, k);
            let gh = ranked_zeta(g, k);
            let mut out = vec![0u64; size];
            let mut h = vec![0u64; size];
            for r in 0..=k {
                for x in 0..size {
                    let mut acc = 0u64;
                    for a in 0..=r {
                        acc = acc.wrapping_add(fh[a][x].wrapping_mul(gh[r - a][x]));
                    }
                    h[x] = acc;
                }
                for b in 0..k {
                    let bit = 1 << b;
                    for x in 0..size {
                        if x & bit != 0 {
                            h[x] = h[x].wrapping_sub(h[x ^ bit]);
                        }
                    }
                }
                for x in 0..size {
                    if x.count_ones() as usize == r {
                        out[x] = h[x];
                    }
                }
            }
            out
        }
    }
}

fn ranked_zeta(f: &[u64], k: usize) -> Vec<Vec<u64>> {
    let size = 1usize << k;
    let mut ranked = vec![vec![0u64; size]; k + 1];
    for x in 0..size {
        ranked[x.count_ones() as usize][x] = f[x];
    }
    for row in ranked.iter_mut() {
        for b in 0..k {
            let bit = 1 << b;
            for x in 0..size {
                if x & bit != 0 {
                    row[x] = row[x].wrapping_add(row[x ^ bit]);
                }
            }
        }
    }
    ranked
}

/// Decides whether the color set splits into `X_1, …, X_m` with
/// `A_i(X_i) = 1`, and returns such a split. Prefix products are clamped to
/// 0/1 after each convolution, which keeps every count below `2^k`.
pub fn subset_convolution_cover(
    tables: &[Vec<bool>],
    k: usize,
    mode: ConvMode,
) -> Result<Option<Vec<usize>>, ColorError> {
    check_k(k)?;
    let size = 1usize << k;
    if let Some(t) = tables.iter().find(|t| t.len() != size) {
        return Err(ColorError::TableSize { got: t.len(), k });
    }
    let full = size - 1;
    let mut prefix: Vec<Vec<u64>> = Vec::with_capacity(tables.len() + 1);
    let mut unit = vec![0u64; size];
    unit[0] = 1;
    prefix.push(unit);
    for t in tables {
        let a: Vec<u64> = t.iter().map(|&b| b as u64).collect();
        let p = subset_convolution(prefix.last().unwrap(), &a, k, mode);
        prefix.push(p.into_iter().map(|v| (v > 0) as u64).collect());
    }
    if prefix.last().unwrap()[full] == 0 {
        return Ok(None);
    }
    // peel machines from the last one
    let mut parts = vec![0usize; tables.len()];
    let mut target = full;
    for i in (0..tables.len()).rev() {
        let mut y = target;
        loop {
            if tables[i][y] && prefix[i][target ^ y] == 1 {
                parts[i] = y;
                target ^= y;
                break;
            }
            assert!(y != 0, "positive product must admit a split");
            y = (y - 1) & target;
        }
    }
    Ok(Some(parts))
}

fn symmetric(inst: &Instance) -> bool {
    match inst.machines {
        MachineEnv::Single | MachineEnv::Identical(_) => true,
        MachineEnv::Unrelated(_) => inst
            .jobs
            .iter()
            .all(|j| j.proc.windows(2).all(|w| w[0] == w[1])),
    }
}

/// Per-machine tables for one coloring; identical machines share one.
fn tables_for(inst: &Instance, coloring: &ColorAssignment) -> Result<Vec<SubsetTable>, ColorError> {
    let k = inst.k;
    if symmetric(inst) {
        let t = machine_dp(inst, 0, coloring, k)?;
        let copies = inst.machine_count().min(k).max(1);
        Ok((0..copies)
            .map(|i| SubsetTable {
                machine: i,
                ..t.clone()
            })
            .collect())
    } else {
        (0..inst.machine_count())
            .map(|i| machine_dp(inst, i, coloring, k))
            .collect()
    }
}

fn realize(inst: &Instance, tables: &[SubsetTable], parts: &[usize]) -> Solution {
    let mut sched = Schedule::new();
    let mut makespan = 0;
    for (tbl, &part) in tables.iter().zip(parts) {
        let mut x = part;
        makespan = makespan.max(tbl.values[x]);
        while x != 0 {
            let (l, j) = tbl.back[x].expect("finite entries have a back pointer");
            let end = tbl.values[x];
            sched.push(
                inst.jobs[j].id.clone(),
                tbl.machine,
                end - inst.jobs[j].processing(tbl.machine),
            );
            x ^= 1 << l;
        }
    }
    Solution {
        makespan,
        schedule: sched.sorted(),
    }
}

fn check_variant(inst: &Instance) -> Result<(), ColorError> {
    if inst.has_prec() {
        return Err(ColorError::Precedence);
    }
    check_k(inst.k)
}

fn empty() -> Solution {
    Solution {
        makespan: 0,
        schedule: Schedule::new(),
    }
}

/// A schedule of exactly `k` jobs, one per color, with makespan ≤ `cmax`.
pub fn colorful_decide(
    inst: &Instance,
    cmax: Time,
    coloring: &ColorAssignment,
) -> Result<Option<Solution>, ColorError> {
    colorful_decide_with(inst, cmax, coloring, ConvMode::Fast)
}

pub fn colorful_decide_with(
    inst: &Instance,
    cmax: Time,
    coloring: &ColorAssignment,
    mode: ConvMode,
) -> Result<Option<Solution>, ColorError> {
    check_variant(inst)?;
    if inst.k == 0 {
        return Ok(Some(empty()));
    }
    let tables = tables_for(inst, coloring)?;
    let a: Vec<Vec<bool>> = tables.iter().map(|t| threshold_table(t, cmax)).collect();
    Ok(subset_convolution_cover(&a, inst.k, mode)?.map(|parts| realize(inst, &tables, &parts)))
}

/// `⌈e^k · ln 4⌉`: failure probability at most 1/4 on feasible inputs.
pub fn default_trials(k: usize) -> u64 {
    ((k as f64).exp() * 4f64.ln()).ceil() as u64
}

/// Coloring for trial `t`. With `n = k` the identity coloring is colorful
/// for the only possible job set, so no randomness is needed.
fn trial_coloring(n: usize, k: usize, seed: u64, t: u64) -> ColorAssignment {
    if n == k {
        ColorAssignment {
            colors: (0..n).collect(),
            seed,
        }
    } else {
        random_coloring(n, k, seed.wrapping_add(t))
    }
}

fn effective_trials(inst: &Instance, trials: u64) -> u64 {
    if inst.n() == inst.k || inst.k == 1 {
        1
    } else {
        trials
    }
}

/// Runs [`colorful_decide`] over `trials` colorings seeded `seed + t`.
pub fn solve_colorcode(
    inst: &Instance,
    cmax: Time,
    trials: u64,
    seed: u64,
) -> Result<Option<Solution>, ColorError> {
    check_variant(inst)?;
    if trials == 0 {
        return Err(ColorError::NoTrials);
    }
    if inst.k == 0 {
        return Ok(Some(empty()));
    }
    if inst.k > inst.n() {
        return Ok(None);
    }
    for t in 0..effective_trials(inst, trials) {
        let c = trial_coloring(inst.n(), inst.k, seed, t);
        if let Some(sol) = colorful_decide(inst, cmax, &c)? {
            return Ok(Some(sol));
        }
    }
    Ok(None)
}

/// Least makespan found over `trials` colorings. Per coloring the tables do
/// not depend on the bound, so the bound is binary searched over their
/// finite values.
pub fn minimize_colorcode(
    inst: &Instance,
    trials: u64,
    seed: u64,
) -> Result<Option<Solution>, ColorError> {
    check_variant(inst)?;
    if trials == 0 {
        return Err(ColorError::NoTrials);
    }
    if inst.k == 0 {
        return Ok(Some(empty()));
    }
    if inst.k > inst.n() {
        return Ok(None);
    }
    let k = inst.k;
    let mut best: Option<Solution> = None;
    for t in 0..effective_trials(inst, trials) {
        let c = trial_coloring(inst.n(), k, seed, t);
        let tables = tables_for(inst, &c)?;
        let mut cands: Vec<Time> = tables
            .iter()
            .flat_map(|tb| tb.values.iter().copied())
            .filter(|&v| v != INFINITY)
            .filter(|&v| best.as_ref().is_none_or(|b| v < b.makespan))
            .collect();
        cands.sort_unstable();
        cands.dedup();
        let cover = |cmax: Time| {
            let a: Vec<Vec<bool>> = tables.iter().map(|tb| threshold_table(tb, cmax)).collect();
            subset_convolution_cover(&a, k, ConvMode::Fast)
        };
        let Some(&top) = cands.last() else { continue };
        if cover(top)?.is_none() {
            continue;
        }
        let (mut lo, mut hi) = (0, cands.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if cover(cands[mid])?.is_some() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let parts = cover(cands[hi])?.expect("checked above");
        best = Some(realize(inst, &tables, &parts));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_schedule, Job};

    fn unit_jobs(n: usize, m: usize, k: usize) -> Instance {
        let env = if m == 1 {
            MachineEnv::Single
        } else {
            MachineEnv::Identical(m)
        };
        Instance::new(env, (0..n).map(|i| Job::new(format!("j{i}"), 1)).collect(), k)
    }

    #[test]
    fn coloring_contract() {
        assert!(random_coloring(0, 3, 1).colors.is_empty());
        assert!(random_coloring(7, 1, 9).colors.iter().all(|&c| c == 0));
        assert_eq!(random_coloring(5, 3, 42), random_coloring(5, 3, 42));
        assert!(random_coloring(50, 3, 42).colors.iter().all(|&c| c < 3));
    }

    #[test]
    fn machine_dp_examples() {
        let one = Instance::new(MachineEnv::Single, vec![Job::new("a", 3).with_release(2)], 1);
        let c = ColorAssignment {
            colors: vec![0],
            seed: 0,
        };
        let t = machine_dp(&one, 0, &c, 1).unwrap();
        assert_eq!(t.values[0], 0);
        assert_eq!(t.values[1], 5);

        let two = unit_jobs(2, 1, 2);
        let c = ColorAssignment {
            colors: vec![0, 1],
            seed: 0,
        };
        assert_eq!(machine_dp(&two, 0, &c, 2).unwrap().values[3], 2);
    }

    #[test]
    fn machine_dp_guard() {
        let inst = unit_jobs(1, 1, 1);
        let c = ColorAssignment {
            colors: vec![0],
            seed: 0,
        };
        assert!(matches!(
            machine_dp(&inst, 0, &c, 21),
            Err(ColorError::KTooLarge(21))
        ));
    }

    #[test]
    fn threshold_examples() {
        let tbl = SubsetTable {
            machine: 0,
            k: 1,
            values: vec![0, 5],
            back: vec![None, None],
        };
        assert_eq!(threshold_table(&tbl, 5), vec![true, true]);
        let inf = SubsetTable {
            values: vec![0, INFINITY],
            ..tbl.clone()
        };
        assert_eq!(threshold_table(&inf, 100), vec![true, false]);
        let zero = SubsetTable {
            values: vec![0; 2],
            ..tbl
        };
        assert_eq!(threshold_table(&zero, 0), vec![true, true]);
    }

    #[test]
    fn cover_examples() {
        // m = 1
        let a = vec![true, false, false, true];
        assert_eq!(
            subset_convolution_cover(&[a], 2, ConvMode::Fast).unwrap(),
            Some(vec![3])
        );
        // split {1} | {2}
        let a1 = vec![true, true, false, false];
        let a2 = vec![true, false, true, false];
        assert_eq!(
            subset_convolution_cover(&[a1, a2], 2, ConvMode::Fast).unwrap(),
            Some(vec![1, 2])
        );
        // only the empty set
        let z = vec![true, false, false, false];
        assert_eq!(
            subset_convolution_cover(&[z.clone(), z], 2, ConvMode::Fast).unwrap(),
            None
        );
        assert!(matches!(
            subset_convolution_cover(&[vec![true; 3]], 2, ConvMode::Fast),
            Err(ColorError::TableSize { got: 3, k: 2 })
        ));
    }

    #[test]
    fn fast_and_naive_convolution_agree_on_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..=8 {
            let size = 1 << k;
            let f: Vec<u64> = (0..size).map(|_| rng.random_range(0..4)).collect();
            let g: Vec<u64> = (0..size).map(|_| rng.random_range(0..4)).collect();
            assert_eq!(
                subset_convolution(&f, &g, k, ConvMode::Fast),
                subset_convolution(&f, &g, k, ConvMode::Naive)
            );
        }
    }

    #[test]
    fn colorful_examples() {
        let inst = unit_jobs(3, 1, 3).with_cmax(3);
        let c = ColorAssignment {
            colors: vec![0, 1, 2],
            seed: 0,
        };
        let sol = colorful_decide(&inst, 3, &c).unwrap().unwrap();
        assert!(check_schedule(&inst, &sol.schedule).unwrap().feasible);
        assert_eq!(sol.schedule.len(), 3);

        let mono = unit_jobs(2, 1, 2);
        let c = ColorAssignment {
            colors: vec![0, 0],
            seed: 0,
        };
        assert!(colorful_decide(&mono, 10, &c).unwrap().is_none());
    }

    #[test]
    fn infeasible_never_solved() {
        let inst = Instance::new(
            MachineEnv::Unrelated(2),
            (0..4)
                .map(|i| Job::new(format!("j{i}"), 1).with_proc(vec![3, 4]).with_deadline(2))
                .collect(),
            2,
        );
        assert!(solve_colorcode(&inst, 100, 50, 1).unwrap().is_none());
    }

    #[test]
    fn single_trial_for_one_color() {
        let inst = Instance::new(
            MachineEnv::Single,
            vec![Job::new("a", 4), Job::new("b", 2).with_release(1)],
            1,
        );
        let sol = solve_colorcode(&inst, 3, 1, 99).unwrap().unwrap();
        assert_eq!(sol.makespan, 3);
        assert_eq!(minimize_colorcode(&inst, 1, 5).unwrap().unwrap().makespan, 3);
    }

    #[test]
    fn minimize_unrelated() {
        let inst = Instance::new(
            MachineEnv::Unrelated(2),
            vec![
                Job::new("a", 1).with_proc(vec![2, 5]),
                Job::new("b", 1).with_proc(vec![5, 2]),
                Job::new("c", 1).with_proc(vec![4, 4]).with_release(1),
            ],
            2,
        );
        let sol = minimize_colorcode(&inst, default_trials(2), 3).unwrap().unwrap();
        assert_eq!(sol.makespan, 2);
        assert!(check_schedule(&inst, &sol.schedule).unwrap().feasible);
    }

    #[test]
    fn precedence_rejected() {
        let inst = crate::fixtures::diamond(1);
        assert!(matches!(
            solve_colorcode(&inst, 10, 1, 0),
            Err(ColorError::Precedence)
        ));
    }

    #[test]
    fn trial_count() {
        assert_eq!(default_trials(0), 2);
        assert_eq!(default_trials(3), 28);
    }
}
