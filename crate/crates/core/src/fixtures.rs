//! Small named instances shared by tests, the CLI self-test and the docs.

use crate::model::{Instance, Job, MachineEnv};

fn env(m: usize) -> MachineEnv {
    if m <= 1 {
        MachineEnv::Single
    } else {
        MachineEnv::Identical(m)
    }
}

/// Unit jobs `a ≺ b, a ≺ c, b ≺ d, c ≺ d`, with `k = 4`.
pub fn diamond(m: usize) -> Instance {
    let jobs = ["a", "b", "c", "d"].iter().map(|id| Job::new(*id, 1)).collect();
    Instance::new(env(m), jobs, 4).with_prec([("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
}

/// Unit chain `j1 ≺ j2 ≺ … ≺ jn`, with `k = n`.
pub fn chain(n: usize, m: usize) -> Instance {
    let jobs = (1..=n).map(|i| Job::new(format!("j{i}"), 1)).collect();
    let edges: Vec<(String, String)> = (1..n)
        .map(|i| (format!("j{i}"), format!("j{}", i + 1)))
        .collect();
    Instance::new(env(m), jobs, n).with_prec(edges)
}

/// Root `r`, children `c1..c3`, grandchildren `g1..g9` (`g{3i-2..3i}` under
/// `c{i}`); all unit, no releases.
pub fn ternary_tree(m: usize, k: usize) -> Instance {
    let mut jobs = vec![Job::new("r", 1)];
    let mut edges = Vec::new();
    for c in 1..=3 {
        jobs.push(Job::new(format!("c{c}"), 1));
        edges.push(("r".to_string(), format!("c{c}")));
    }
    for g in 1..=9 {
        jobs.push(Job::new(format!("g{g}"), 1));
        edges.push((format!("c{}", (g - 1) / 3 + 1), format!("g{g}")));
    }
    Instance::new(env(m), jobs, k).with_prec(edges)
}
