//! The 40 variants of partial scheduling as data: complexity class, the
//! lower bound and its source problem, and the algorithm each one is solved
//! with. [`dispatch`] classifies an instance and runs that algorithm.

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::antichain_dp::{self, DpError, Mode};
use crate::colorcode::{self, ColorError};
use crate::model::{validate_instance, EnvKind, Instance, Solution, Time, ValidationReport, VariantFlags};
use crate::oracle::{self, OracleError, DEFAULT_BUDGET};
use crate::polysolvers::{self, PolyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplexityClass {
    PolyTime,
    Fpt,
    W1Hard,
}

impl fmt::Display for ComplexityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplexityClass::PolyTime => "P",
            ComplexityClass::Fpt => "FPT",
            ComplexityClass::W1Hard => "W[1]-hard",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    GreedyPrec,
    GreedyEdd,
    Moore,
    SmallestP,
    AntichainDp,
    ColorCode,
    Oracle,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::GreedyPrec => "greedy-prec",
            Algorithm::GreedyEdd => "greedy-edd",
            Algorithm::Moore => "moore",
            Algorithm::SmallestP => "smallest-p",
            Algorithm::AntichainDp => "antichain-dp",
            Algorithm::ColorCode => "colorcode",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub id: usize,
    pub flags: VariantFlags,
    pub class: ComplexityClass,
    pub algorithm: Algorithm,
    pub bound_note: &'static str,
}

impl TableRow {
    pub fn name(&self) -> String {
        self.flags.notation()
    }
}

const NOTE_3COL: &str = "no n^o(k/log k) algorithm under ETH (reduction from 3-Coloring); n^O(k) by exhaustive search";
const NOTE_DP: &str = "no O*(2^o(sqrt(k log k))) algorithm under ETH (from P|prec,p_j=1|C_max); O*(2^O(k)) by antichain DP";
const NOTE_CLIQUE: &str = "no n^o(sqrt k) algorithm under ETH (reduction from k-Clique); n^O(k) by exhaustive search";
const NOTE_PSI: &str = "no n^o(k/log k) algorithm under ETH (reduction from Partitioned Subgraph Isomorphism); n^O(k) by exhaustive search";
const NOTE_POLY: &str = "polynomial time";
const NOTE_SUBSET: &str = "no O*(2^o(k)) algorithm under ETH (reduction from Subset Sum); O*(2^O(k)) by color coding";

/// Rows are ordered by precedence (yes first), machine environment
/// (`1`, `P`, `R`, unit-time blocks before general ones) and then
/// release dates / deadlines (none, `r_j`, `d_j`, both).
fn build_table() -> Vec<TableRow> {
    let blocks: [(bool, EnvKind, bool); 10] = [
        (true, EnvKind::Single, true),
        (true, EnvKind::P, true),
        (true, EnvKind::Single, false),
        (true, EnvKind::P, false),
        (true, EnvKind::R, false),
        (false, EnvKind::Single, true),
        (false, EnvKind::P, true),
        (false, EnvKind::Single, false),
        (false, EnvKind::P, false),
        (false, EnvKind::R, false),
    ];
    let mut rows = Vec::with_capacity(40);
    for (prec, env, unit) in blocks {
        for (has_release, has_deadline) in [(false, false), (true, false), (false, true), (true, true)] {
            let id = rows.len() + 1;
            let (class, algorithm, note) = match id {
                1 | 2 => (ComplexityClass::PolyTime, Algorithm::GreedyPrec, NOTE_POLY),
                3 | 4 | 7 | 8 => (ComplexityClass::W1Hard, Algorithm::Oracle, NOTE_3COL),
                5 | 6 => (ComplexityClass::Fpt, Algorithm::AntichainDp, NOTE_DP),
                9 => (ComplexityClass::W1Hard, Algorithm::Oracle, NOTE_CLIQUE),
                10..=20 => (ComplexityClass::W1Hard, Algorithm::Oracle, NOTE_PSI),
                21..=28 => (ComplexityClass::PolyTime, Algorithm::GreedyEdd, NOTE_POLY),
                29 => (ComplexityClass::PolyTime, Algorithm::SmallestP, NOTE_POLY),
                30 | 31 => (ComplexityClass::PolyTime, Algorithm::Moore, NOTE_POLY),
                _ => (ComplexityClass::Fpt, Algorithm::ColorCode, NOTE_SUBSET),
            };
            rows.push(TableRow {
                id,
                flags: VariantFlags {
                    env,
                    has_release,
                    has_deadline,
                    has_prec: prec,
                    unit_p: unit,
                },
                class,
                algorithm,
                bound_note: note,
            });
        }
    }
    rows
}

pub fn table() -> &'static [TableRow] {
    static TABLE: OnceLock<Vec<TableRow>> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("unit processing times imply identical machines, so R with p_j=1 is not a separate variant")]
    UnitOnUnrelated,
}

pub fn classify(flags: VariantFlags) -> Result<&'static TableRow, ClassifyError> {
    if flags.unit_p && flags.env == EnvKind::R {
        return Err(ClassifyError::UnitOnUnrelated);
    }
    Ok(table()
        .iter()
        .find(|row| row.flags == flags)
        .expect("every valid flag combination has a row"))
}

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error("invalid instance:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("{algorithm} cannot solve this instance: {reason}")]
    Mismatch { algorithm: Algorithm, reason: String },
    #[error(transparent)]
    Budget(OracleError),
}

#[derive(Debug, Clone)]
pub struct DispatchOptions {
    /// Overrides the row's algorithm.
    pub algorithm: Option<Algorithm>,
    /// Overrides the instance's makespan bound.
    pub cmax: Option<Time>,
    /// Color-coding trials; default `⌈e^k ln 4⌉`.
    pub trials: Option<u64>,
    pub seed: u64,
    pub mode: Mode,
    pub budget: u64,
}

impl Default for DispatchOptions {
    fn default() -> Self {
        DispatchOptions {
            algorithm: None,
            cmax: None,
            trials: None,
            seed: 0,
            mode: Mode::default(),
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DispatchOutcome {
    pub row: &'static TableRow,
    pub algorithm: Algorithm,
    /// `None` when no schedule of `k` jobs meets the bound.
    pub solution: Option<Solution>,
    /// Seed used, for randomized algorithms.
    pub seed: Option<u64>,
}

fn mismatch(algorithm: Algorithm, e: impl fmt::Display) -> DispatchError {
    DispatchError::Mismatch {
        algorithm,
        reason: e.to_string(),
    }
}

/// Classifies `inst` and runs the chosen algorithm for the minimum
/// makespan; a result above the bound (from the options or the instance)
/// counts as infeasible.
pub fn dispatch(inst: &Instance, opts: &DispatchOptions) -> Result<DispatchOutcome, DispatchError> {
    let report = validate_instance(inst);
    if !report.is_valid() {
        return Err(DispatchError::Invalid(report));
    }
    let flags = VariantFlags::of(inst);
    let row = classify(flags)?;
    let algorithm = opts.algorithm.unwrap_or(row.algorithm);
    let bound = opts.cmax.or(inst.cmax);
    let mut seed = None;

    let solution = match algorithm {
        Algorithm::GreedyPrec => {
            if inst.machine_count() > 1 {
                return Err(mismatch(algorithm, "the slot greedy is exact only on one machine"));
            }
            polysolvers::greedy_prec_unit(inst).map_err(|e: PolyError| mismatch(algorithm, e))?
        }
        Algorithm::GreedyEdd => {
            polysolvers::greedy_edd_unit(inst).map_err(|e| mismatch(algorithm, e))?
        }
        Algorithm::Moore | Algorithm::SmallestP => {
            polysolvers::solve_single_machine(inst).map_err(|e| mismatch(algorithm, e))?
        }
        Algorithm::AntichainDp => antichain_dp::minimize_makespan(inst, opts.mode)
            .map_err(|e: DpError| mismatch(algorithm, e))?,
        Algorithm::ColorCode => {
            if flags.has_prec {
                return Err(mismatch(algorithm, ColorError::Precedence));
            }
            let trials = opts.trials.unwrap_or_else(|| colorcode::default_trials(inst.k));
            seed = Some(opts.seed);
            colorcode::minimize_colorcode(inst, trials, opts.seed).map_err(|e| mismatch(algorithm, e))?
        }
        Algorithm::Oracle => match oracle::brute_force(inst, bound, opts.budget) {
            Ok(s) => s,
            Err(e @ OracleError::BudgetExceeded(_)) => return Err(DispatchError::Budget(e)),
            Err(e) => return Err(mismatch(algorithm, e)),
        },
    };
    let solution = solution.filter(|s| bound.is_none_or(|c| s.makespan <= c));
    Ok(DispatchOutcome {
        row,
        algorithm,
        solution,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{check_schedule, Job, MachineEnv};
    use crate::reductions::{gen_clique, SourceGraph};

    fn flags(env: EnvKind, r: bool, d: bool, prec: bool, unit: bool) -> VariantFlags {
        VariantFlags {
            env,
            has_release: r,
            has_deadline: d,
            has_prec: prec,
            unit_p: unit,
        }
    }

    #[test]
    fn table_shape() {
        let t = table();
        assert_eq!(t.len(), 40);
        for (i, row) in t.iter().enumerate() {
            assert_eq!(row.id, i + 1);
            assert_eq!(classify(row.flags).unwrap().id, row.id);
        }
    }

    #[test]
    fn classify_examples() {
        let r1 = classify(flags(EnvKind::Single, false, false, true, true)).unwrap();
        assert_eq!((r1.id, r1.class), (1, ComplexityClass::PolyTime));
        let r7 = classify(flags(EnvKind::P, false, true, true, true)).unwrap();
        assert_eq!((r7.id, r7.class), (7, ComplexityClass::W1Hard));
        assert!(r7.bound_note.contains("3-Coloring") && r7.bound_note.contains("n^o(k/log k)"));
        let r40 = classify(flags(EnvKind::R, true, true, false, false)).unwrap();
        assert_eq!((r40.id, r40.class, r40.algorithm), (40, ComplexityClass::Fpt, Algorithm::ColorCode));
        assert_eq!(r40.name(), "R|r_j,d_j|k-sched,C_max");
    }

    #[test]
    fn unit_on_unrelated_rejected() {
        assert!(matches!(
            classify(flags(EnvKind::R, false, false, false, true)),
            Err(ClassifyError::UnitOnUnrelated)
        ));
    }

    #[test]
    fn dispatch_examples() {
        let tree = fixtures::ternary_tree(2, 2);
        let out = dispatch(&tree, &DispatchOptions::default()).unwrap();
        assert_eq!((out.row.id, out.algorithm), (5, Algorithm::AntichainDp));
        assert_eq!(out.solution.unwrap().makespan, 2);

        let g = gen_clique(&SourceGraph::complete(3), 3).unwrap();
        let out = dispatch(&g, &DispatchOptions::default()).unwrap();
        assert_eq!((out.row.id, out.algorithm), (9, Algorithm::Oracle));
        let sol = out.solution.unwrap();
        assert!(check_schedule(&g, &sol.schedule).unwrap().feasible);

        let plain = Instance::new(MachineEnv::Single, vec![Job::new("a", 3), Job::new("b", 2)], 1);
        let out = dispatch(&plain, &DispatchOptions::default()).unwrap();
        assert_eq!((out.row.id, out.algorithm), (29, Algorithm::SmallestP));
        assert_eq!(out.solution.unwrap().makespan, 2);
    }

    #[test]
    fn released_tree_is_row_six() {
        let mut tree = fixtures::ternary_tree(2, 2);
        tree.jobs[0].release = 1;
        assert_eq!(dispatch(&tree, &DispatchOptions::default()).unwrap().row.id, 6);
    }

    #[test]
    fn identical_one_is_single() {
        let inst = Instance::new(MachineEnv::Identical(1), vec![Job::new("a", 3)], 1);
        assert_eq!(classify(VariantFlags::of(&inst)).unwrap().id, 29);
    }

    #[test]
    fn bound_makes_infeasible() {
        let opts = DispatchOptions {
            cmax: Some(3),
            ..Default::default()
        };
        let out = dispatch(&fixtures::diamond(1), &opts).unwrap();
        assert!(out.solution.is_none());
    }

    #[test]
    fn override_mismatch_and_invalid() {
        let opts = DispatchOptions {
            algorithm: Some(Algorithm::ColorCode),
            ..Default::default()
        };
        assert!(matches!(
            dispatch(&fixtures::diamond(1), &opts),
            Err(DispatchError::Mismatch { .. })
        ));
        let bad = fixtures::diamond(1).with_prec([("d", "a")]);
        assert!(matches!(
            dispatch(&bad, &DispatchOptions::default()),
            Err(DispatchError::Invalid(_))
        ));
    }
}
