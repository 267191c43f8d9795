//! A variable-length random access code for permutations built from a
//! search inverter.
//!
//! The encoder samples a random subset `R` of `[N]`, finds the good set `G`:
//! the `x` in `R` that the inverter recovers with probability at least 2/3
//! while putting query magnitude at most `c/T` on `R \ {x}` (forward) and
//! `pi(R) \ {pi(x)}` (inverse). If `G` is large enough it stores `G`, `pi`
//! outside `G` and `rho` copies of the advice; otherwise the whole inverse
//! table. The decoder answers known images directly and runs the inverter
//! `rho` times against the decode oracle for the rest, taking a plurality
//! vote.
//!
//! Randomness: the encoding seed `R` yields the inverter's `r` (substream 0),
//! the subset (substream 1) and extra `r` streams for estimating success
//! (substreams `2, 3, ...`).
//!
//! `T` in the thresholds is `max(1, oracle calls)` of the inverter, the
//! number of queries the real oracle pair actually receives.

mod bits;
pub mod rank;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::inverter::{evaluate_instance, Advice, Inverter, InverterKind};
use crate::oracle::{
    build_qrac_decode_oracle, encode_flagged, make_two_sided, Direction, OraclePath, Permutation,
    QracDecodeOracle, QueryOracle,
};
use crate::rng::{derive_seed, Coins, SharedRandomness};
use bits::{BitReader, BitWriter};
use rank::{
    binomial, bits_for, factorial, falling_factorial, rank_injection, rank_subset,
    unrank_injection, unrank_subset,
};

/// Success probability that puts `x` in the inverting set.
pub const INVERTING_THRESHOLD: f64 = 2.0 / 3.0;
const THRESHOLD_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QracParams {
    pub gamma: f64,
    pub c: f64,
    pub rho_copies: u64,
    /// The inverter's restricted success fraction, measured beforehand.
    pub epsilon: f64,
    /// Number of `r` values the success over `r` is averaged over.
    pub r_streams: u64,
}

impl QracParams {
    pub fn new(gamma: f64, c: f64, rho_copies: u64, epsilon: f64) -> Result<Self> {
        let p = Self {
            gamma,
            c,
            rho_copies,
            epsilon,
            r_streams: 1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.gamma > 0.0 && self.gamma < 1.0, "gamma {} outside (0, 1)", self.gamma);
        ensure!(self.c > 0.0 && self.c < 1.0, "c {} outside (0, 1)", self.c);
        ensure!(self.rho_copies >= 1, "need at least one advice copy");
        ensure!(
            (0.0..=1.0).contains(&self.epsilon),
            "epsilon {} outside [0, 1]",
            self.epsilon
        );
        ensure!(self.r_streams >= 1, "need at least one r stream");
        Ok(())
    }

    /// `ceil(25 ln N)`.
    pub fn default_rho(n_bits: usize) -> u64 {
        (25.0 * (n_bits as f64) * std::f64::consts::LN_2).ceil() as u64
    }
}

/// `max(1, oracle calls)`.
pub fn effective_queries(inv: &dyn Inverter, n_bits: usize) -> u64 {
    inv.resources(n_bits).oracle_calls.max(1)
}

/// Each element of `[N]` joins `R` independently with probability
/// `gamma / T^2`, decided in increasing order from `Coins::from_seed(seed)`.
pub fn sample_subset_r(n_bits: usize, t: u64, gamma: f64, seed: u64) -> Result<Vec<u64>> {
    ensure!(t >= 1, "T must be at least 1");
    let p = gamma / (t as f64 * t as f64);
    ensure!((0.0..=1.0).contains(&p), "inclusion probability {p} outside [0, 1]");
    let mut coins = Coins::from_seed(seed);
    Ok((0..1u64 << n_bits).filter(|_| coins.bernoulli(p)).collect())
}

/// `(epsilon gamma N / 4 T^2) (1 - 5 gamma^2 / c)`.
pub fn good_set_threshold(epsilon: f64, gamma: f64, c: f64, n_bits: usize, t: u64) -> f64 {
    let n = (1u64 << n_bits) as f64;
    let t = t as f64;
    epsilon * gamma * n / (4.0 * t * t) * (1.0 - 5.0 * gamma * gamma / c)
}

pub fn case1_length(n_bits: usize) -> u64 {
    1 + bits_for(&factorial(1 << n_bits))
}

/// `1 + ceil(log(N+1)) + ceil(log C(|R|,|G|)) + ceil(log(N!/|G|!)) + rho S`.
pub fn case2_length(n_bits: usize, r_size: u64, g_size: u64, rho: u64, advice_qubits: u64) -> u64 {
    let n = 1u64 << n_bits;
    1 + count_width(n_bits)
        + bits_for(&binomial(r_size, g_size))
        + bits_for(&falling_factorial(n, n - g_size))
        + rho * advice_qubits
}

/// Width of the `|G|` field: `|G|` ranges over `0..=N`.
fn count_width(n_bits: usize) -> u64 {
    bits_for(&BigUint::from((1u64 << n_bits) + 1))
}

/// The inverter randomness `r` used by the encoding with seed `seed`.
pub fn encoding_randomness(seed: u64) -> SharedRandomness {
    SharedRandomness(derive_seed(seed, 0))
}

fn stream(seed: u64, j: u64) -> SharedRandomness {
    if j == 0 {
        encoding_randomness(seed)
    } else {
        SharedRandomness(derive_seed(seed, 1 + j))
    }
}

/// The query magnitude the run on challenge `pi(x)` puts on
/// `Sigma_0 = (R \ {x})` forward and `Sigma_1 = (pi(R) \ {pi(x)}, flag 0)`
/// inverse.
pub fn sigma_magnitude(
    perm: &Permutation,
    inv: &dyn Inverter,
    advice: &Advice,
    r: SharedRandomness,
    r_set: &[u64],
    x: u64,
) -> Result<f64> {
    let y = perm.apply(x);
    let calls = inv.resources(perm.n_bits()).oracle_calls;
    let mut handle = make_two_sided(perm.clone(), y)?.with_budget(calls);
    let sigma0: Vec<u64> = r_set.iter().copied().filter(|&w| w != x).collect();
    let sigma1: Vec<u64> = r_set
        .iter()
        .filter(|&&w| w != x)
        .map(|&w| encode_flagged(perm.apply(w), 0))
        .collect();
    let p0 = handle.add_probe(Direction::Forward, &sigma0)?;
    let p1 = handle.add_probe(Direction::Inverse, &sigma1)?;
    inv.phase1(&mut handle, advice, 0, y, r)?;
    Ok(handle.total_query_magnitude(p0)? + handle.total_query_magnitude(p1)?)
}

/// Everything the encoder learns about `pi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodSet {
    pub t_eff: u64,
    pub r_set: Vec<u64>,
    /// Success over `r` for every `x`.
    pub success: Vec<f64>,
    /// `I`: the `x` with success at least 2/3.
    pub inverting: Vec<u64>,
    /// `(x, magnitude)` for every `x` in `R ∩ I`.
    pub magnitudes: Vec<(u64, f64)>,
    pub good: Vec<u64>,
}

/// Computes `I` exactly over `r_streams` values of `r` and `G` inside
/// `R ∩ I` with the magnitude condition `q <= c / T`.
pub fn good_set_g(
    perm: &Permutation,
    inv: &dyn Inverter,
    r_set: &[u64],
    c: f64,
    seed: u64,
    r_streams: u64,
) -> Result<GoodSet> {
    ensure!(inv.kind() == InverterKind::Search, "{} is not a search inverter", inv.name());
    ensure!(inv.adaptive_bits() == 0, "the code needs a non-adaptive inverter");
    ensure!(r_streams >= 1, "need at least one r stream");
    let n = perm.n_bits();
    let size = perm.size();
    let t_eff = effective_queries(inv, n);
    let mut success = vec![0.0; size as usize];
    let mut advice0 = None;
    for j in 0..r_streams {
        let r = stream(seed, j);
        let (advice, _) = inv.phase0(perm, r)?;
        for x in 0..size {
            success[x as usize] += evaluate_instance(inv, perm, &advice, 0, x, r)?.success_mass;
        }
        if j == 0 {
            advice0 = Some(advice);
        }
    }
    success.iter_mut().for_each(|s| *s /= r_streams as f64);
    let advice = advice0.expect("at least one stream");
    let inverting: Vec<u64> = (0..size)
        .filter(|&x| success[x as usize] >= INVERTING_THRESHOLD - THRESHOLD_SLACK)
        .collect();
    let r = encoding_randomness(seed);
    let mut magnitudes = Vec::new();
    let mut good = Vec::new();
    for &x in r_set {
        ensure!(x < size, "subset element {x} out of range");
        if success[x as usize] < INVERTING_THRESHOLD - THRESHOLD_SLACK {
            continue;
        }
        let q = sigma_magnitude(perm, inv, &advice, r, r_set, x)?;
        magnitudes.push((x, q));
        if q <= c / t_eff as f64 + THRESHOLD_SLACK {
            good.push(x);
        }
    }
    Ok(GoodSet {
        t_eff,
        r_set: r_set.to_vec(),
        success,
        inverting,
        magnitudes,
        good,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    /// Case 1: rank of the inverse table among all permutations.
    Table { inverse_rank: BigUint },
    /// Case 2.
    Good {
        good_count: u64,
        /// Rank of `G` as a subset of `R` (positions in sorted `R`).
        subset_rank: BigUint,
        /// Rank of `(pi(w))` for `w` outside `G` in increasing order.
        table_rank: BigUint,
        advice: Vec<Advice>,
        /// Declared advice size `S`; each copy is stored in `S` bits.
        advice_qubits: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodeDiagnostics {
    pub r_size: u64,
    pub inverting_count: u64,
    pub good_count: u64,
    pub threshold: f64,
    /// `|I| >= (epsilon / 2) N`.
    pub in_x: bool,
    pub t_eff: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Encoding {
    pub n_bits: usize,
    pub payload: Payload,
    /// The case formula evaluated at this encoding's sizes.
    pub length_bits: u64,
    pub diagnostics: Option<EncodeDiagnostics>,
}

/// What a reader of the binary layout must know in advance.
#[derive(Clone, Debug)]
pub struct LayoutContext {
    pub n_bits: usize,
    pub r_size: u64,
    pub rho_copies: u64,
    pub advice_qubits: u64,
    /// Register structure of one advice copy.
    pub advice_shape: Advice,
}

impl Encoding {
    pub fn case(&self) -> u8 {
        match self.payload {
            Payload::Table { .. } => 1,
            Payload::Good { .. } => 2,
        }
    }

    /// The framed layout: flag bit (0 for case 1), then for case 1 the table
    /// rank in `ceil(log N!)` bits; for case 2 `|G|`, the subset rank, the
    /// restricted table rank and `rho` advice copies of `S` bits each. Ranks
    /// are big-endian.
    pub fn to_bits(&self, r_size: u64) -> Result<Vec<bool>> {
        let n = 1u64 << self.n_bits;
        let mut w = BitWriter::default();
        match &self.payload {
            Payload::Table { inverse_rank } => {
                w.push(false);
                w.push_big(inverse_rank, bits_for(&factorial(n)))?;
            }
            Payload::Good {
                good_count,
                subset_rank,
                table_rank,
                advice,
                advice_qubits,
            } => {
                w.push(true);
                w.push_u64(*good_count, count_width(self.n_bits))?;
                w.push_big(subset_rank, bits_for(&binomial(r_size, *good_count)))?;
                w.push_big(table_rank, bits_for(&falling_factorial(n, n - good_count)))?;
                for a in advice {
                    let bits = a.to_bits();
                    ensure!(bits.len() as u64 <= *advice_qubits, "advice copy exceeds S");
                    w.extend(&bits);
                    w.extend(&vec![false; (*advice_qubits as usize) - bits.len()]);
                }
            }
        }
        Ok(w.into_bits())
    }

    /// `to_bits` padded with zeros to whole bytes, most significant bit
    /// first.
    pub fn to_bytes(&self, r_size: u64) -> Result<Vec<u8>> {
        Ok(bits::pack(&self.to_bits(r_size)?))
    }

    pub fn from_bytes(bytes: &[u8], ctx: &LayoutContext) -> Result<Self> {
        Self::from_bits(&bits::unpack(bytes), ctx, true)
    }

    /// Reads an encoding; with `padded`, trailing bits up to the next byte
    /// boundary are allowed and must be zero.
    pub fn from_bits(bits: &[bool], ctx: &LayoutContext, padded: bool) -> Result<Self> {
        let n = 1u64 << ctx.n_bits;
        let mut rd = BitReader::new(bits);
        let case2 = rd.bit()?;
        let payload = if !case2 {
            let inverse_rank = rd.big(bits_for(&factorial(n)))?;
            if inverse_rank >= factorial(n) {
                return Err(Error::Decode("table rank out of range".into()));
            }
            Payload::Table { inverse_rank }
        } else {
            let good_count = rd.u64(count_width(ctx.n_bits))?;
            if good_count > ctx.r_size {
                return Err(Error::Decode(format!(
                    "|G| = {good_count} exceeds |R| = {}",
                    ctx.r_size
                )));
            }
            let subset_rank = rd.big(bits_for(&binomial(ctx.r_size, good_count)))?;
            let table_rank = rd.big(bits_for(&falling_factorial(n, n - good_count)))?;
            let shape_bits = ctx.advice_shape.qubits() as usize;
            if shape_bits as u64 > ctx.advice_qubits {
                return Err(Error::Decode("advice shape exceeds S".into()));
            }
            let mut advice = Vec::with_capacity(ctx.rho_copies as usize);
            for _ in 0..ctx.rho_copies {
                let copy = rd.take(ctx.advice_qubits as usize)?;
                advice.push(ctx.advice_shape.refill(&copy[..shape_bits])?);
            }
            Payload::Good {
                good_count,
                subset_rank,
                table_rank,
                advice,
                advice_qubits: ctx.advice_qubits,
            }
        };
        let rest = rd.remaining();
        if (!padded && !rest.is_empty()) || rest.len() >= 8 || rest.iter().any(|&b| b) {
            return Err(Error::Decode(format!("{} unexpected trailing bits", rest.len())));
        }
        let length_bits = match &payload {
            Payload::Table { .. } => case1_length(ctx.n_bits),
            Payload::Good { good_count, .. } => {
                case2_length(ctx.n_bits, ctx.r_size, *good_count, ctx.rho_copies, ctx.advice_qubits)
            }
        };
        Ok(Self {
            n_bits: ctx.n_bits,
            payload,
            length_bits,
            diagnostics: None,
        })
    }
}

/// The code built from one search inverter.
#[derive(Clone, Copy)]
pub struct QracScheme<'a> {
    pub inverter: &'a dyn Inverter,
    pub params: &'a QracParams,
    pub path: OraclePath,
}

impl<'a> QracScheme<'a> {
    pub fn new(inverter: &'a dyn Inverter, params: &'a QracParams) -> Result<Self> {
        params.validate()?;
        ensure!(inverter.kind() == InverterKind::Search, "{} is not a search inverter", inverter.name());
        ensure!(inverter.adaptive_bits() == 0, "the code needs a non-adaptive inverter");
        Ok(Self {
            inverter,
            params,
            path: OraclePath::Functional,
        })
    }

    pub fn with_path(mut self, path: OraclePath) -> Self {
        self.path = path;
        self
    }

    /// The subset `R` for encoding seed `seed`.
    pub fn subset(&self, n_bits: usize, seed: u64) -> Result<Vec<u64>> {
        let t = effective_queries(self.inverter, n_bits);
        sample_subset_r(n_bits, t, self.params.gamma, derive_seed(seed, 1))
    }

    pub fn layout(&self, n_bits: usize, seed: u64, r_size: u64) -> Result<LayoutContext> {
        let (shape, _) = self
            .inverter
            .phase0(&Permutation::identity(n_bits), encoding_randomness(seed))?;
        Ok(LayoutContext {
            n_bits,
            r_size,
            rho_copies: self.params.rho_copies,
            advice_qubits: self.inverter.resources(n_bits).advice_qubits,
            advice_shape: shape,
        })
    }

    pub fn encode(&self, perm: &Permutation, seed: u64) -> Result<Encoding> {
        let r_set = self.subset(perm.n_bits(), seed)?;
        self.encode_with_subset(perm, seed, &r_set)
    }

    /// Encodes with an explicitly chosen `R` (sorted, distinct).
    pub fn encode_with_subset(&self, perm: &Permutation, seed: u64, r_set: &[u64]) -> Result<Encoding> {
        ensure!(r_set.windows(2).all(|w| w[0] < w[1]), "R must be sorted and distinct");
        let n_bits = perm.n_bits();
        let n = perm.size();
        let p = self.params;
        let gs = good_set_g(perm, self.inverter, r_set, p.c, seed, p.r_streams)?;
        let threshold = good_set_threshold(p.epsilon, p.gamma, p.c, n_bits, gs.t_eff);
        let in_x = gs.inverting.len() as f64 >= p.epsilon / 2.0 * n as f64 - THRESHOLD_SLACK;
        let case2 = in_x && gs.good.len() as f64 >= threshold;
        let diagnostics = EncodeDiagnostics {
            r_size: r_set.len() as u64,
            inverting_count: gs.inverting.len() as u64,
            good_count: gs.good.len() as u64,
            threshold,
            in_x,
            t_eff: gs.t_eff,
        };
        if !case2 {
            return Ok(Encoding {
                n_bits,
                payload: Payload::Table {
                    inverse_rank: rank_injection(perm.inverse_table(), n)?,
                },
                length_bits: case1_length(n_bits),
                diagnostics: Some(diagnostics),
            });
        }
        let positions: Vec<u64> = gs
            .good
            .iter()
            .map(|x| r_set.binary_search(x).expect("G inside R") as u64)
            .collect();
        let mut in_g = vec![false; n as usize];
        gs.good.iter().for_each(|&x| in_g[x as usize] = true);
        let restricted: Vec<u64> = (0..n).filter(|&w| !in_g[w as usize]).map(|w| perm.apply(w)).collect();
        let r = encoding_randomness(seed);
        let advice = (0..p.rho_copies)
            .map(|_| self.inverter.phase0(perm, r).map(|(a, _)| a))
            .collect::<Result<Vec<_>>>()?;
        let advice_qubits = self.inverter.resources(n_bits).advice_qubits;
        let g = gs.good.len() as u64;
        Ok(Encoding {
            n_bits,
            payload: Payload::Good {
                good_count: g,
                subset_rank: rank_subset(&positions, r_set.len() as u64)?,
                table_rank: rank_injection(&restricted, n)?,
                advice,
                advice_qubits,
            },
            length_bits: case2_length(n_bits, r_set.len() as u64, g, p.rho_copies, advice_qubits),
            diagnostics: Some(diagnostics),
        })
    }

    pub fn decoder(&self, enc: &Encoding, seed: u64) -> Result<Decoder<'a>> {
        let r_set = self.subset(enc.n_bits, seed)?;
        self.decoder_with_subset(enc, seed, &r_set)
    }

    pub fn decoder_with_subset(&self, enc: &Encoding, seed: u64, r_set: &[u64]) -> Result<Decoder<'a>> {
        let n = 1u64 << enc.n_bits;
        let state = match &enc.payload {
            Payload::Table { inverse_rank } => DecoderState::Table(unrank_injection(inverse_rank, n, n)?),
            Payload::Good {
                good_count,
                subset_rank,
                table_rank,
                advice,
                ..
            } => {
                let positions = unrank_subset(subset_rank, r_set.len() as u64, *good_count)?;
                let good: Vec<u64> = positions.iter().map(|&i| r_set[i as usize]).collect();
                let values = unrank_injection(table_rank, n, n - good_count)?;
                let mut in_g = vec![false; n as usize];
                good.iter().for_each(|&x| in_g[x as usize] = true);
                let mut it = values.into_iter();
                let known_part: Vec<Option<u64>> = (0..n)
                    .map(|w| if in_g[w as usize] { None } else { it.next() })
                    .collect();
                let mut known_inverse = vec![None; n as usize];
                for (w, v) in known_part.iter().enumerate() {
                    if let Some(v) = v {
                        known_inverse[*v as usize] = Some(w as u64);
                    }
                }
                ensure!(advice.len() as u64 == self.params.rho_copies, "wrong number of advice copies");
                DecoderState::Good {
                    known_part,
                    known_inverse,
                    good,
                    advice: advice.clone(),
                }
            }
        };
        Ok(Decoder {
            inverter: self.inverter,
            r: encoding_randomness(seed),
            path: self.path,
            state,
        })
    }
}

enum DecoderState {
    Table(Vec<u64>),
    Good {
        known_part: Vec<Option<u64>>,
        known_inverse: Vec<Option<u64>>,
        good: Vec<u64>,
        advice: Vec<Advice>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    pub candidate: u64,
    /// Number of inverter runs (0 when the answer was stored).
    pub runs: u64,
    /// Votes for the winning candidate.
    pub votes: u64,
}

/// A decoder with the stored fields unpacked.
pub struct Decoder<'a> {
    inverter: &'a dyn Inverter,
    r: SharedRandomness,
    path: OraclePath,
    state: DecoderState,
}

impl Decoder<'_> {
    /// The good set recovered from the encoding (empty in case 1).
    pub fn good_set(&self) -> &[u64] {
        match &self.state {
            DecoderState::Table(_) => &[],
            DecoderState::Good { good, .. } => good,
        }
    }

    /// Recovers `pi^-1(y)`. Terminal measurements of the `rho` inverter runs
    /// are drawn from `measurement_seed`; ties in the vote go to the smaller
    /// candidate.
    pub fn decode(&self, y: u64, measurement_seed: u64) -> Result<Decoded> {
        match &self.state {
            DecoderState::Table(inv) => {
                ensure!((y as usize) < inv.len(), "image {y} out of range");
                Ok(Decoded {
                    candidate: inv[y as usize],
                    runs: 0,
                    votes: 0,
                })
            }
            DecoderState::Good {
                known_part,
                known_inverse,
                good,
                advice,
            } => {
                ensure!((y as usize) < known_inverse.len(), "image {y} out of range");
                if let Some(x) = known_inverse[y as usize] {
                    return Ok(Decoded {
                        candidate: x,
                        runs: 0,
                        votes: 0,
                    });
                }
                let data = QracDecodeOracle {
                    known_part: known_part.clone(),
                    good_set: good.clone(),
                    target_image: y,
                };
                let calls = self.inverter.resources(data.n_bits()).oracle_calls;
                let mut coins = Coins::from_seed(measurement_seed);
                let mut votes: BTreeMap<u64, u64> = BTreeMap::new();
                let mut last: Option<(&Advice, crate::inverter::Outcome)> = None;
                for a in advice {
                    // identical advice and r give an identical outcome distribution
                    let reuse = matches!(&last, Some((prev, _)) if *prev == a);
                    if !reuse {
                        let mut oracle = build_qrac_decode_oracle(data.clone(), self.path)?.with_budget(calls);
                        let out = self.inverter.phase1(&mut oracle, a, 0, y, self.r)?;
                        last = Some((a, out));
                    }
                    let (_, out) = last.as_ref().expect("set above");
                    *votes.entry(out.sample(coins.unit())).or_default() += 1;
                }
                let (candidate, count) = votes
                    .iter()
                    .fold((0, 0), |best, (&c, &k)| if k > best.1 { (c, k) } else { best });
                Ok(Decoded {
                    candidate,
                    runs: advice.len() as u64,
                    votes: count,
                })
            }
        }
    }
}

/// Distance between the inverter's final states on challenge `pi(x)` under
/// the real oracle pair and under the decode oracle for `good`, or `None`
/// if the inverter keeps no state.
pub fn swapping_distance(
    perm: &Permutation,
    inv: &dyn Inverter,
    seed: u64,
    good: &[u64],
    x: u64,
    path: OraclePath,
) -> Result<Option<f64>> {
    let r = encoding_randomness(seed);
    let (advice, _) = inv.phase0(perm, r)?;
    let y = perm.apply(x);
    let mut real = make_two_sided(perm.clone(), y)?;
    let a = inv.phase1(&mut real, &advice, 0, y, r)?;
    let mut in_g = vec![false; perm.size() as usize];
    good.iter().for_each(|&w| in_g[w as usize] = true);
    let data = QracDecodeOracle {
        known_part: (0..perm.size())
            .map(|w| (!in_g[w as usize]).then(|| perm.apply(w)))
            .collect(),
        good_set: good.to_vec(),
        target_image: y,
    };
    let mut bar = build_qrac_decode_oracle(data, path)?;
    let b = inv.phase1(&mut bar, &advice, 0, y, r)?;
    match (a.final_state, b.final_state) {
        (Some(s), Some(t)) => Ok(Some(s.euclidean_distance(&t)?)),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverter::{grover_spi, ConstantInverter, FullTableInverter};

    fn full() -> FullTableInverter {
        FullTableInverter {
            kind: InverterKind::Search,
        }
    }

    #[test]
    fn subset_extremes_and_determinism() {
        assert_eq!(sample_subset_r(3, 1, 1.0, 5).unwrap(), (0..8).collect::<Vec<_>>());
        assert!(sample_subset_r(3, 1, 1.5, 5).is_err());
        assert_eq!(sample_subset_r(4, 2, 0.9, 7).unwrap(), sample_subset_r(4, 2, 0.9, 7).unwrap());
    }

    #[test]
    fn full_table_with_everything_in_r_is_case_two() {
        let inv = full();
        let params = QracParams::new(0.3, 0.9, 2, 1.0).unwrap();
        let scheme = QracScheme::new(&inv, &params).unwrap();
        let perm = Permutation::from_seed(3, 11);
        let all: Vec<u64> = (0..8).collect();
        let enc = scheme.encode_with_subset(&perm, 4, &all).unwrap();
        assert_eq!(enc.case(), 2);
        let d = enc.diagnostics.clone().unwrap();
        assert_eq!(d.good_count, 8);
        // |G| field 4 bits, C(8,8) and 8!/8! need 0 bits, two copies of 24 bits
        assert_eq!(enc.length_bits, 1 + 4 + 48);
        assert_eq!(enc.to_bits(8).unwrap().len() as u64, enc.length_bits);
        let dec = scheme.decoder_with_subset(&enc, 4, &all).unwrap();
        for y in 0..8 {
            assert_eq!(dec.decode(y, y).unwrap().candidate, perm.invert(y));
        }
    }

    #[test]
    fn hopeless_inverter_is_case_one() {
        let inv = ConstantInverter {
            kind: InverterKind::Search,
            value: 0,
        };
        let params = QracParams::new(0.5, 0.5, 3, 0.5).unwrap();
        let scheme = QracScheme::new(&inv, &params).unwrap();
        let perm = Permutation::from_seed(3, 2);
        let enc = scheme.encode(&perm, 9).unwrap();
        assert_eq!(enc.case(), 1);
        assert_eq!(enc.length_bits, 1 + 16);
        let dec = scheme.decoder(&enc, 9).unwrap();
        for y in 0..8 {
            assert_eq!(dec.decode(y, 0).unwrap().candidate, perm.invert(y));
        }
    }

    #[test]
    fn binary_round_trip() {
        let inv = grover_spi(2);
        let params = QracParams::new(0.9, 0.9, 5, 1.0).unwrap();
        let scheme = QracScheme::new(&inv, &params).unwrap();
        for seed in 0..20 {
            let perm = Permutation::from_seed(3, seed);
            let r_set = scheme.subset(3, seed).unwrap();
            let enc = scheme.encode(&perm, seed).unwrap();
            let ctx = scheme.layout(3, seed, r_set.len() as u64).unwrap();
            let bytes = enc.to_bytes(r_set.len() as u64).unwrap();
            let back = Encoding::from_bytes(&bytes, &ctx).unwrap();
            assert_eq!(back.payload, enc.payload);
            assert_eq!(back.length_bits, enc.length_bits);
        }
    }

    #[test]
    fn malformed_bytes_rejected() {
        let inv = full();
        let params = QracParams::new(0.3, 0.9, 1, 1.0).unwrap();
        let scheme = QracScheme::new(&inv, &params).unwrap();
        let ctx = scheme.layout(3, 0, 8).unwrap();
        assert!(matches!(Encoding::from_bytes(&[], &ctx), Err(Error::Decode(_))));
        // case 1 with a rank >= 8!
        assert!(Encoding::from_bytes(&[0x7f, 0xff, 0x80], &ctx).is_err());
    }

    #[test]
    fn good_set_members_satisfy_both_conditions() {
        let inv = grover_spi(1);
        let perm = Permutation::from_seed(3, 4);
        let r_set: Vec<u64> = vec![1, 2, 5];
        let gs = good_set_g(&perm, &inv, &r_set, 0.9, 3, 1).unwrap();
        assert_eq!(gs.t_eff, 2);
        for &x in &gs.good {
            assert!(gs.success[x as usize] >= 2.0 / 3.0 - 1e-12);
            let (advice, _) = inv.phase0(&perm, encoding_randomness(3)).unwrap();
            let q = sigma_magnitude(&perm, &inv, &advice, encoding_randomness(3), &r_set, x).unwrap();
            assert!(q <= 0.45 + 1e-12);
        }
    }
}
