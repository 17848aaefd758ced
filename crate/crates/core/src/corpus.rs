//! Seeded random instances: small ones covering every table row for
//! cross-checking against the oracle, and larger unit-time DAGs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::table;
use crate::model::{EnvKind, Instance, Job, MachineEnv, Time, VariantFlags};

#[derive(Debug, Clone, Copy)]
pub struct CorpusParams {
    pub max_n: usize,
    pub max_m: usize,
    pub max_k: usize,
    pub max_p: Time,
    pub edge_prob: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            max_n: 9,
            max_m: 2,
            max_k: 4,
            max_p: 4,
            edge_prob: 0.25,
        }
    }
}

/// Random edges `i → j` (`i < j` in a shuffled order), each with
/// probability `p`.
pub fn random_edges<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((order[i], order[j]));
            }
        }
    }
    edges
}

/// An instance whose [`VariantFlags::of`] is exactly `flags`.
pub fn instance_for_flags<R: Rng>(rng: &mut R, flags: VariantFlags, params: &CorpusParams) -> Instance {
    let m = match flags.env {
        EnvKind::Single => 1,
        _ => rng.random_range(2..=params.max_m.max(2)),
    };
    let machines = match flags.env {
        EnvKind::Single => MachineEnv::Single,
        EnvKind::P => MachineEnv::Identical(m),
        EnvKind::R => MachineEnv::Unrelated(m),
    };
    let min_n = if flags.has_prec { 2 } else { 1 };
    let n = rng.random_range(min_n..=params.max_n.max(min_n));
    let k = rng.random_range(1..=params.max_k.min(n));
    let max_p = if flags.unit_p { 1 } else { params.max_p.max(2) };

    let mut jobs = Vec::with_capacity(n);
    for i in 0..n {
        let proc: Vec<Time> = match flags.env {
            EnvKind::R => (0..m).map(|_| rng.random_range(1..=max_p + 1)).collect(),
            _ => vec![rng.random_range(1..=max_p)],
        };
        let mut job = Job::new(format!("j{}", i + 1), proc[0]).with_proc(proc);
        if flags.has_release && rng.random_bool(0.6) {
            job = job.with_release(rng.random_range(0..=2 * max_p));
        }
        if flags.has_deadline && rng.random_bool(0.6) {
            let slack = rng.random_range(0..=3 * max_p);
            let d = job.release + job.min_processing() + slack;
            job = job.with_deadline(d);
        }
        jobs.push(job);
    }

    let pick = rng.random_range(0..n);
    if flags.has_release && jobs.iter().all(|j| j.release == 0) {
        jobs[pick].release = rng.random_range(1..=2 * max_p);
    }
    if flags.has_deadline && jobs.iter().all(|j| j.deadline.is_none()) {
        let d = jobs[pick].release + jobs[pick].min_processing() + rng.random_range(0..=3 * max_p);
        jobs[pick].deadline = Some(d);
    }
    if !flags.unit_p && jobs.iter().all(|j| j.proc.iter().all(|&p| p == 1)) {
        jobs[pick].proc[0] = 2;
    }
    if flags.env == EnvKind::R && jobs.iter().all(|j| j.proc.windows(2).all(|w| w[0] == w[1])) {
        jobs[pick].proc[1] = jobs[pick].proc[0] + 1;
    }

    let mut edges = Vec::new();
    if flags.has_prec {
        edges = random_edges(rng, n, params.edge_prob);
        if edges.is_empty() {
            edges.push((0, 1));
        }
    }
    let named: Vec<(String, String)> = edges
        .iter()
        .map(|&(a, b)| (jobs[a].id.clone(), jobs[b].id.clone()))
        .collect();
    Instance::new(machines, jobs, k).with_prec(named)
}

/// `count` instances cycling through all 40 table rows.
pub fn mixed_corpus(seed: u64, count: usize, params: &CorpusParams) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = table();
    (0..count)
        .map(|i| instance_for_flags(&mut rng, rows[i % rows.len()].flags, params))
        .collect()
}

/// Unit jobs on `m` identical machines with random precedence; releases in
/// `0..=max_release`.
pub fn random_unit_dag<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    k: usize,
    edge_prob: f64,
    max_release: Time,
) -> Instance {
    let jobs = (0..n)
        .map(|i| {
            let r = if max_release == 0 { 0 } else { rng.random_range(0..=max_release) };
            Job::new(format!("j{}", i + 1), 1).with_release(r)
        })
        .collect();
    let edges: Vec<(String, String)> = random_edges(rng, n, edge_prob)
        .into_iter()
        .map(|(a, b)| (format!("j{}", a + 1), format!("j{}", b + 1)))
        .collect();
    let env = if m <= 1 { MachineEnv::Single } else { MachineEnv::Identical(m) };
    Instance::new(env, jobs, k.min(n)).with_prec(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    #[test]
    fn corpus_hits_requested_rows() {
        let corpus = mixed_corpus(7, 400, &CorpusParams::default());
        for (i, inst) in corpus.iter().enumerate() {
            assert!(validate_instance(inst).is_valid());
            assert_eq!(VariantFlags::of(inst), table()[i % 40].flags, "instance {i}");
            assert!(inst.n() <= 9 && inst.k <= 4 && inst.machine_count() <= 2);
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        let p = CorpusParams::default();
        assert_eq!(mixed_corpus(3, 50, &p), mixed_corpus(3, 50, &p));
    }

    #[test]
    fn unit_dag_is_acyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inst = random_unit_dag(&mut rng, 30, 2, 5, 0.1, 4);
        assert!(validate_instance(&inst).is_valid());
        assert!(inst.all_unit());
    }
}
