//! Encode random permutations with the random access code, decode random
//! images, and compare lengths and failure rates with their formulas.

use perminv::bounds::chernoff_majority;
use perminv::inverter::{InverterKind, PermutationSet};
use perminv::oracle::{OraclePath, Permutation};
use perminv::qrac::{
    case1_length, case2_length, effective_queries, encoding_randomness, good_set_g, good_set_threshold,
    sample_subset_r, sigma_magnitude, swapping_distance, Encoding, Payload, QracParams, QracScheme,
    INVERTING_THRESHOLD,
};
use perminv::rng::{derive_seed, Coins};
use serde::Deserialize;

use super::run_inversion;
use crate::config::ExperimentConfig;
use crate::error::{require, HarnessResult};
use crate::inverters::InverterChoice;
use crate::output::ResultRow;
use crate::parallel::map_ordered;

pub const CORE_OPS: &[&str] = &[
    "case1_length",
    "case2_length",
    "effective_queries",
    "encoding_randomness",
    "good_set_g",
    "good_set_threshold",
    "sample_subset_r",
    "sigma_magnitude",
    "swapping_distance",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Params {
    inverter: InverterChoice,
    gamma: f64,
    c: f64,
    /// Advice copies; defaults to `ceil(25 ln N)`.
    rho: Option<u64>,
    /// Restricted success of the inverter; measured when absent.
    epsilon: Option<f64>,
    /// Permutations used to measure epsilon.
    epsilon_perms: u64,
    r_streams: u64,
    decode_queries: u64,
    /// Check final-state distances for members of `G` (n <= 4).
    swapping: bool,
    path: OraclePath,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            inverter: InverterChoice::FullTable {
                problem: InverterKind::Search,
            },
            gamma: 0.5,
            c: 0.5,
            rho: None,
            epsilon: None,
            epsilon_perms: 20,
            r_streams: 1,
            decode_queries: 100,
            swapping: true,
            path: OraclePath::Functional,
        }
    }
}

fn params(cfg: &ExperimentConfig) -> HarnessResult<(Params, QracParams)> {
    let p: Params = cfg.params()?;
    require(cfg.n_bits <= 6, "n_bits", "must be at most 6")?;
    require(p.gamma > 0.0 && p.gamma < 1.0, "params.gamma", "must lie in (0, 1)")?;
    require(p.c > 0.0 && p.c < 1.0, "params.c", "must lie in (0, 1)")?;
    if let Some(rho) = p.rho {
        require((1..=10_000).contains(&rho), "params.rho", "must lie in 1..=10000")?;
    }
    if let Some(e) = p.epsilon {
        require((0.0..=1.0).contains(&e), "params.epsilon", "must lie in [0, 1]")?;
    }
    require((1..=10_000).contains(&p.epsilon_perms), "params.epsilon_perms", "must lie in 1..=10000")?;
    require((1..=64).contains(&p.r_streams), "params.r_streams", "must lie in 1..=64")?;
    require(p.decode_queries <= 1_000_000, "params.decode_queries", "must be at most 10^6")?;
    let inv = p.inverter.build(cfg.n_bits, "params.inverter")?;
    require(inv.kind() == InverterKind::Search, "params.inverter", "must be a search inverter")?;
    require(inv.adaptive_bits() == 0, "params.inverter", "must be non-adaptive")?;
    let t = effective_queries(inv.as_ref(), cfg.n_bits) as f64;
    require(p.gamma / (t * t) <= 1.0, "params.gamma", "gamma / T^2 must be at most 1")?;
    let qp = QracParams {
        gamma: p.gamma,
        c: p.c,
        rho_copies: p.rho.unwrap_or_else(|| QracParams::default_rho(cfg.n_bits)),
        epsilon: p.epsilon.unwrap_or(0.0),
        r_streams: p.r_streams,
    };
    Ok((p, qp))
}

pub fn validate(cfg: &ExperimentConfig) -> HarnessResult<()> {
    params(cfg).map(|_| ())
}

struct SeedOutcome {
    encoding: Encoding,
    r_size: u64,
    serialized_bits: u64,
    formula_bits: u64,
    round_trip: bool,
    decodes: u64,
    failures: u64,
    inverter_runs: u64,
    max_swap: Option<f64>,
    good_check: bool,
}

/// `log2(N!)`.
fn log2_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).log2()).sum()
}

pub fn run(cfg: &ExperimentConfig) -> HarnessResult<Vec<ResultRow>> {
    let (p, mut qp) = params(cfg)?;
    let n = cfg.n_bits;
    let size = 1u64 << n;
    let inv = p.inverter.build(n, "params.inverter")?;
    let declared = inv.resources(n);
    let t_eff = effective_queries(inv.as_ref(), n);

    let epsilon = match p.epsilon {
        Some(e) => e,
        None => {
            let mode = perminv::inverter::EvalMode::Exact {
                perms: PermutationSet::Sampled {
                    count: p.epsilon_perms,
                    seed: derive_seed(cfg.seed, 1),
                },
                r_streams: 1,
                seed: derive_seed(cfg.seed, 2),
            };
            run_inversion(inv.as_ref(), InverterKind::Search, n, &mode)?.success_probability
        }
    };
    qp.epsilon = epsilon;
    let scheme = QracScheme::new(inv.as_ref(), &qp)?.with_path(p.path);
    let threshold = good_set_threshold(epsilon, qp.gamma, qp.c, n, t_eff);

    let seeds: Vec<u64> = (0..cfg.trials).map(|i| derive_seed(derive_seed(cfg.seed, 3), i)).collect();
    let outcomes = map_ordered(&seeds, |&s| -> HarnessResult<SeedOutcome> {
        let perm = Permutation::from_seed(n, derive_seed(s, 0));
        let enc_seed = derive_seed(s, 1);
        let r_set = scheme.subset(n, enc_seed)?;
        let r_size = r_set.len() as u64;
        let again = sample_subset_r(n, t_eff, qp.gamma, derive_seed(enc_seed, 1))?;
        let encoding = scheme.encode(&perm, enc_seed)?;
        let bits = encoding.to_bits(r_size)?;
        let formula_bits = match &encoding.payload {
            Payload::Table { .. } => case1_length(n),
            Payload::Good { good_count, .. } => {
                case2_length(n, r_size, *good_count, qp.rho_copies, declared.advice_qubits)
            }
        };
        let ctx = scheme.layout(n, enc_seed, r_size)?;
        let back = Encoding::from_bytes(&encoding.to_bytes(r_size)?, &ctx)?;
        let round_trip = back.payload == encoding.payload && back.length_bits == encoding.length_bits;

        let decoder = scheme.decoder(&back, enc_seed)?;
        let mut coins = Coins::from_seed(derive_seed(s, 2));
        let mut failures = 0;
        let mut runs = 0;
        for j in 0..p.decode_queries {
            let y = coins.below(size);
            let d = decoder.decode(y, derive_seed(s, 3 + j))?;
            failures += (d.candidate != perm.invert(y)) as u64;
            runs += d.runs;
        }

        // G recomputed independently of the encoder's bookkeeping
        let good = decoder.good_set().to_vec();
        let gs = good_set_g(&perm, inv.as_ref(), &r_set, qp.c, enc_seed, qp.r_streams)?;
        let good_check = r_set == again
            && (encoding.case() == 1 || gs.good == good)
            && gs.good.iter().all(|&x| gs.success[x as usize] >= INVERTING_THRESHOLD - 1e-12);
        let r = encoding_randomness(enc_seed);
        let (advice, _) = inv.phase0(&perm, r)?;
        let mut magnitude_check = true;
        for &x in &good {
            let q = sigma_magnitude(&perm, inv.as_ref(), &advice, r, &r_set, x)?;
            magnitude_check &= q <= qp.c / t_eff as f64 + 1e-12;
        }
        let good_check = good_check && magnitude_check;
        let mut max_swap: Option<f64> = None;
        if p.swapping && n <= 4 {
            for &x in &good {
                if let Some(d) = swapping_distance(&perm, inv.as_ref(), enc_seed, &good, x, p.path)? {
                    max_swap = Some(max_swap.map_or(d, |m: f64| m.max(d)));
                }
            }
        }
        Ok(SeedOutcome {
            encoding,
            r_size,
            serialized_bits: bits.len() as u64,
            formula_bits,
            round_trip,
            decodes: p.decode_queries,
            failures,
            inverter_runs: runs,
            max_swap,
            good_check,
        })
    })?;

    let sqrt_c = qp.c.sqrt();
    let mut rows = Vec::with_capacity(outcomes.len() + 1);
    for (i, o) in outcomes.iter().enumerate() {
        let d = o.encoding.diagnostics.clone().expect("fresh encodings carry diagnostics");
        let mut row = ResultRow::new(cfg, i as u64)
            .label("kind", "encoding")
            .value("case", o.encoding.case() as f64)
            .value("length_bits", o.encoding.length_bits as f64)
            .value("serialized_bits", o.serialized_bits as f64)
            .value("r_size", o.r_size as f64)
            .value("good_count", d.good_count as f64)
            .value("inverting_count", d.inverting_count as f64)
            .value("decodes", o.decodes as f64)
            .value("failures", o.failures as f64)
            .value("inverter_runs", o.inverter_runs as f64)
            .bound("length_formula", o.formula_bits as f64, "case 1: 1 + ceil(log N!); case 2: 1 + ceil(log(N+1)) + ceil(log C(|R|,|G|)) + ceil(log(N!/|G|!)) + rho S")
            .bound("good_set_threshold", d.threshold, "(eps gamma N / 4T^2)(1 - 5 gamma^2 / c)")
            .check("length_matches_formula", o.encoding.length_bits == o.formula_bits && o.serialized_bits == o.formula_bits)
            .check("binary_round_trip", o.round_trip)
            .check("good_set_consistent", o.good_check);
        if let Some(m) = o.max_swap {
            row = row
                .value("max_swapping_distance", m)
                .bound("sqrt_c", sqrt_c, "sqrt(c)")
                .check("swapping_within_sqrt_c", m <= sqrt_c + 1e-9);
        }
        rows.push(row);
    }
    let decodes: u64 = outcomes.iter().map(|o| o.decodes).sum();
    let failures: u64 = outcomes.iter().map(|o| o.failures).sum();
    let rate = if decodes > 0 { failures as f64 / decodes as f64 } else { 0.0 };
    let tail = chernoff_majority(qp.rho_copies, INVERTING_THRESHOLD)?;
    let k = outcomes.len().max(1) as f64;
    let mean_len = outcomes.iter().map(|o| o.encoding.length_bits as f64).sum::<f64>() / k;
    let case2 = outcomes.iter().filter(|o| o.encoding.case() == 2).count();
    rows.push(
        ResultRow::new(cfg, rows.len() as u64)
            .label("kind", "summary")
            .label("inverter", inv.name())
            .value("epsilon", epsilon)
            .value("rho", qp.rho_copies as f64)
            .value("t_eff", t_eff as f64)
            .value("advice_qubits", declared.advice_qubits as f64)
            .value("encodings", outcomes.len() as f64)
            .value("case2_encodings", case2 as f64)
            .value("decodes", decodes as f64)
            .value("failures", failures as f64)
            .prob("failure_rate", rate)
            .value("mean_length_bits", mean_len)
            // annotations only: the space-time tradeoffs are asymptotic
            .value("s_t_squared", declared.advice_qubits as f64 * (t_eff * t_eff) as f64)
            .bound("log2_n_factorial", log2_factorial(size), "log2(N!)")
            .bound("good_set_threshold", threshold, "(eps gamma N / 4T^2)(1 - 5 gamma^2 / c)")
            .bound("majority_tail", tail.bound_value, "exp(-rho (p - 1/2)^2 / (2p)), p = 2/3")
            .check("failure_rate_within_tail", rate <= tail.bound_value),
    );
    Ok(rows)
}
