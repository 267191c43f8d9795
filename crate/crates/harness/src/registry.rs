use crate::config::ExperimentConfig;
use crate::error::{HarnessError, HarnessResult};
use crate::experiments::{amplification, grover, qrac, reductions, rp, swapping, tail_bounds};
use crate::output::ResultRow;

type Validate = fn(&ExperimentConfig) -> HarnessResult<()>;
type Run = fn(&ExperimentConfig) -> HarnessResult<Vec<ResultRow>>;

pub struct Entry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Core operations the experiment calls.
    pub core_ops: &'static [&'static str],
    pub validate: Validate,
    pub run: Run,
}

static REGISTRY: &[Entry] = &[
    Entry {
        name: "grover_sweep",
        summary: "Grover inversion success for k = 0..k_max against sin^2((2k+1) theta)",
        core_ops: grover::CORE_OPS,
        validate: grover::validate,
        run: grover::run,
    },
    Entry {
        name: "search_amplification",
        summary: "repetition with verification on synthetic epsilon-inverters",
        core_ops: amplification::SEARCH_CORE_OPS,
        validate: amplification::validate_search,
        run: amplification::run_search,
    },
    Entry {
        name: "decision_amplification",
        summary: "majority vote on synthetic delta-inverters against the binomial tail",
        core_ops: amplification::DECISION_CORE_OPS,
        validate: amplification::validate_decision,
        run: amplification::run_decision,
    },
    Entry {
        name: "search_to_decision",
        summary: "bitwise preimage recovery from an amplified decision inverter",
        core_ops: reductions::SEARCH_CORE_OPS,
        validate: reductions::validate_search,
        run: reductions::run_search,
    },
    Entry {
        name: "unique_search",
        summary: "distributional error of unique search solved with an adaptive decision inverter",
        core_ops: reductions::UNIQUE_CORE_OPS,
        validate: reductions::validate_unique,
        run: reductions::run_unique,
    },
    Entry {
        name: "swapping_lemma",
        summary: "final-state distance of random query circuits against sqrt(T q)",
        core_ops: swapping::CORE_OPS,
        validate: swapping::validate,
        run: swapping::run,
    },
    Entry {
        name: "tail_bounds",
        summary: "Chernoff, reverse Markov and averaging bounds against exact enumeration",
        core_ops: tail_bounds::CORE_OPS,
        validate: tail_bounds::validate,
        run: tail_bounds::run,
    },
    Entry {
        name: "qrac_round_trip",
        summary: "encode/decode permutations with the random access code; lengths and failure rate",
        core_ops: qrac::CORE_OPS,
        validate: qrac::validate,
        run: qrac::run,
    },
    Entry {
        name: "ow_qccra2_rp",
        summary: "one-wayness game for c = pi(m || r) with punctured decryption",
        core_ops: rp::CORE_OPS,
        validate: rp::validate,
        run: rp::run,
    },
];

pub fn registry() -> &'static [Entry] {
    REGISTRY
}

pub fn find(name: &str) -> HarnessResult<&'static Entry> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = REGISTRY.iter().map(|e| e.name).collect();
        HarnessError::Config(format!(
            "experiment: unknown name {name:?}; known: {}",
            names.join(", ")
        ))
    })
}

pub fn validate(cfg: &ExperimentConfig) -> HarnessResult<()> {
    (find(&cfg.experiment)?.validate)(cfg)
}

/// Validates and runs `cfg` on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> HarnessResult<Vec<ResultRow>> {
    let entry = find(&cfg.experiment)?;
    (entry.validate)(cfg)?;
    (entry.run)(cfg)
}
