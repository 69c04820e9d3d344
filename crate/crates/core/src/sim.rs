//! Packet-level SRLNC codec and Monte Carlo harness: a generation-based
//! encoder drawing coding vectors from the sparse distribution, a
//! memoryless per-destination packet erasure channel, an incremental
//! Gaussian-elimination decoder, and estimators for the decoding success
//! probability and transmissions-to-decode.
//!
//! Trials are driven by a counter-based RNG (ChaCha8) with one substream
//! per trial index, so runs are reproducible for a given seed and
//! independent of how trials are scheduled across threads.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, FieldSpec, SparseDist};
use crate::linalg::FqMatrix;
use crate::symbolic::parse_rational;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("decoder rank {rank} of {needed} cannot recover the generation")]
    RankDeficient { rank: usize, needed: usize },
    #[error("audit mismatch on trial {trial}: incremental rank {incremental}, batch rank {batch}")]
    AuditMismatch {
        trial: u64,
        incremental: usize,
        batch: usize,
    },
    #[error("recovered payloads differ from the source generation on trial {trial}")]
    RoundTripMismatch { trial: u64 },
}

/// One generation: `n` source packets of `L` symbols each, all over the
/// same field as the coding coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceGeneration {
    field: Arc<FieldSpec>,
    n: usize,
    l: usize,
    packets: Vec<Vec<u16>>,
}

impl SourceGeneration {
    pub fn from_values(
        field: Arc<FieldSpec>,
        packets: &[Vec<u64>],
    ) -> Result<SourceGeneration, SimError> {
        let n = packets.len();
        let l = packets.first().map_or(0, |p| p.len());
        let mut rows = Vec::with_capacity(n);
        for packet in packets {
            if packet.len() != l {
                return Err(SimError::DimensionMismatch(format!(
                    "payload length {} != {l}",
                    packet.len()
                )));
            }
            let row: Vec<u16> = packet
                .iter()
                .map(|&v| field.element(v).map(|e| e.value()))
                .collect::<Result<_, _>>()?;
            rows.push(row);
        }
        Ok(SourceGeneration {
            field,
            n,
            l,
            packets: rows,
        })
    }

    /// Uniformly random payload symbols (payloads are data, not sparse).
    pub fn random<R: Rng + ?Sized>(
        field: Arc<FieldSpec>,
        n: usize,
        l: usize,
        rng: &mut R,
    ) -> SourceGeneration {
        let q = field.q();
        let packets = (0..n)
            .map(|_| (0..l).map(|_| rng.gen_range(0..q)).collect())
            .collect();
        SourceGeneration {
            field,
            n,
            l,
            packets,
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn generation_size(&self) -> usize {
        self.n
    }

    pub fn payload_len(&self) -> usize {
        self.l
    }

    pub fn packets(&self) -> &[Vec<u16>] {
        &self.packets
    }
}

/// A coded packet: the coding vector and the corresponding linear
/// combination of the generation's payloads.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedPacket {
    pub coding_vector: Vec<u16>,
    pub payload: Vec<u16>,
}

impl CodedPacket {
    pub fn is_zero_vector(&self) -> bool {
        self.coding_vector.iter().all(|&v| v == 0)
    }
}

/// Draw a coding vector i.i.d. from the sparse distribution and combine the
/// generation's payloads with it.
pub fn encode<R: Rng + ?Sized>(
    gen: &SourceGeneration,
    dist: &SparseDist,
    rng: &mut R,
) -> Result<CodedPacket, SimError> {
    if dist.field().q() != gen.field.q() {
        return Err(FieldError::MismatchedFields(dist.field().q(), gen.field.q()).into());
    }
    let field = &gen.field;
    let coding_vector: Vec<u16> = (0..gen.n).map(|_| dist.sample(rng).value()).collect();
    let mut payload = vec![0u16; gen.l];
    for (coeff, packet) in coding_vector.iter().zip(&gen.packets) {
        if *coeff == 0 {
            continue;
        }
        for (acc, &sym) in payload.iter_mut().zip(packet) {
            *acc = field.add_raw(*acc, field.mul_raw(*coeff, sym));
        }
    }
    Ok(CodedPacket {
        coding_vector,
        payload,
    })
}

/// Incremental Gaussian-elimination state of one destination. Accepted
/// coding vectors are kept in reduced row echelon form, ordered by pivot
/// column, with the payloads transformed by the same row operations.
#[derive(Debug, Clone)]
pub struct DecoderState {
    field: Arc<FieldSpec>,
    n: usize,
    l: usize,
    pivot_cols: Vec<usize>,
    reduced_rows: Vec<Vec<u16>>,
    transformed_payloads: Vec<Vec<u16>>,
    received_count: u64,
}

impl DecoderState {
    pub fn new(field: Arc<FieldSpec>, n: usize, l: usize) -> DecoderState {
        DecoderState {
            field,
            n,
            l,
            pivot_cols: Vec::new(),
            reduced_rows: Vec::new(),
            transformed_payloads: Vec::new(),
            received_count: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.reduced_rows.len()
    }

    pub fn received_count(&self) -> u64 {
        self.received_count
    }

    pub fn is_complete(&self) -> bool {
        self.rank() == self.n
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    /// Reduce the packet against the current rows; returns whether it was
    /// innovative (increased the rank). Keeps the state in reduced row
    /// echelon form.
    pub fn insert(&mut self, pkt: &CodedPacket) -> Result<bool, SimError> {
        if pkt.coding_vector.len() != self.n || pkt.payload.len() != self.l {
            return Err(SimError::DimensionMismatch(format!(
                "packet dimensions {}x{} do not match decoder {}x{}",
                pkt.coding_vector.len(),
                pkt.payload.len(),
                self.n,
                self.l
            )));
        }
        self.received_count += 1;
        let f = self.field.clone();
        let mut vector = pkt.coding_vector.clone();
        let mut payload = pkt.payload.clone();
        for (row_idx, &pivot) in self.pivot_cols.iter().enumerate() {
            let factor = vector[pivot];
            if factor == 0 {
                continue;
            }
            axpy_neg(&f, factor, &self.reduced_rows[row_idx], &mut vector);
            axpy_neg(&f, factor, &self.transformed_payloads[row_idx], &mut payload);
        }
        let Some(pivot) = vector.iter().position(|&v| v != 0) else {
            return Ok(false);
        };
        let inv = f.inv_raw(vector[pivot]).expect("pivot entry is nonzero");
        if inv != 1 {
            for v in &mut vector {
                *v = f.mul_raw(*v, inv);
            }
            for v in &mut payload {
                *v = f.mul_raw(*v, inv);
            }
        }
        // Clear the new pivot column in the existing rows.
        for row_idx in 0..self.reduced_rows.len() {
            let factor = self.reduced_rows[row_idx][pivot];
            if factor == 0 {
                continue;
            }
            axpy_neg(&f, factor, &vector, &mut self.reduced_rows[row_idx]);
            axpy_neg(&f, factor, &payload, &mut self.transformed_payloads[row_idx]);
        }
        let slot = self.pivot_cols.partition_point(|&c| c < pivot);
        self.pivot_cols.insert(slot, pivot);
        self.reduced_rows.insert(slot, vector);
        self.transformed_payloads.insert(slot, payload);
        Ok(true)
    }

    /// At full rank the reduced rows are the identity, so the transformed
    /// payloads are exactly the source packets in order.
    pub fn recover_sources(&self) -> Result<Vec<Vec<u16>>, SimError> {
        if !self.is_complete() {
            return Err(SimError::RankDeficient {
                rank: self.rank(),
                needed: self.n,
            });
        }
        Ok(self.transformed_payloads.clone())
    }
}

/// `target -= factor * source` over the field.
fn axpy_neg(field: &FieldSpec, factor: u16, source: &[u16], target: &mut [u16]) {
    for (t, &s) in target.iter_mut().zip(source) {
        if s != 0 {
            *t = field.sub_raw(*t, field.mul_raw(factor, s));
        }
    }
}

/// How a destination receives packets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReceptionMode {
    /// The destination holds exactly `m` received packets; estimates the
    /// full-rank probability of the m x n decoding matrix.
    FixedM { m: usize },
    /// The source sends `packets` coded packets; each is lost independently
    /// with probability `erasure`. Records transmissions until decode.
    Stream { packets: u64, erasure: f64 },
}

/// One Monte Carlo scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub q: u64,
    pub n: usize,
    /// Payload length in field symbols.
    pub l: usize,
    #[serde(with = "rational_as_string")]
    pub p0: BigRational,
    pub mode: ReceptionMode,
    pub trials: u64,
    pub seed: u64,
    /// Transmit zero coding vectors (the analytic formulas assume they
    /// count as transmissions); disable to model a source that suppresses
    /// them.
    #[serde(default = "default_true")]
    pub include_zero_vectors: bool,
}

fn default_true() -> bool {
    true
}

mod rational_as_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        FieldSpec::new(self.q).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        if self.n == 0 {
            return Err(SimError::InvalidConfig("generation size must be >= 1".into()));
        }
        if self.l == 0 {
            return Err(SimError::InvalidConfig("payload length must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(SimError::InvalidConfig("need at least one trial".into()));
        }
        if self.p0 < BigRational::from_integer(0.into()) || self.p0 > BigRational::one() {
            return Err(SimError::InvalidConfig(format!(
                "sparsity {} outside [0, 1]",
                self.p0
            )));
        }
        if !self.include_zero_vectors && self.p0 == BigRational::one() {
            return Err(SimError::InvalidConfig(
                "p0 = 1 cannot produce nonzero coding vectors".into(),
            ));
        }
        match &self.mode {
            ReceptionMode::FixedM { m } => {
                if *m < self.n {
                    return Err(SimError::InvalidConfig(format!(
                        "fixed-m mode needs m >= n, got m={m}, n={}",
                        self.n
                    )));
                }
            }
            ReceptionMode::Stream { erasure, .. } => {
                if !(0.0..=1.0).contains(erasure) {
                    return Err(SimError::InvalidConfig(format!(
                        "erasure rate {erasure} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Transmissions-to-decode statistics over the successful trials
/// (nearest-rank quantiles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionStats {
    pub mean: f64,
    pub min: u64,
    pub p50: u64,
    pub p90: u64,
    pub max: u64,
}

/// Measured statistics of a run, with the config echoed back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub trials: u64,
    pub successes: u64,
    pub empirical_success_rate: f64,
    /// Binomial standard error of the empirical rate.
    pub standard_error: f64,
    /// Present in stream mode when at least one trial decoded.
    pub transmissions: Option<TransmissionStats>,
    /// Trials cross-checked against a batch rank computation.
    pub audited_trials: u64,
}

impl SimReport {
    pub fn csv_header() -> &'static str {
        "q,n,mode,m_or_packets,eps,p0,trials,seed,success_rate,stderr"
    }

    pub fn to_csv_row(&self) -> String {
        let (mode, m_or_packets, eps) = match &self.config.mode {
            ReceptionMode::FixedM { m } => ("fixed_m", m.to_string(), String::new()),
            ReceptionMode::Stream { packets, erasure } => {
                ("stream", packets.to_string(), erasure.to_string())
            }
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.config.q,
            self.config.n,
            mode,
            m_or_packets,
            eps,
            self.config.p0,
            self.trials,
            self.config.seed,
            self.empirical_success_rate,
            self.standard_error
        )
    }
}

struct TrialOutcome {
    success: bool,
    transmissions_to_decode: Option<u64>,
}

/// The per-trial RNG substream: trials are reproducible and independent of
/// scheduling because each one derives its stream from (seed, index).
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_one_trial(
    cfg: &SimConfig,
    field: &Arc<FieldSpec>,
    dist: &SparseDist,
    trial: u64,
) -> Result<TrialOutcome, SimError> {
    let mut rng = trial_rng(cfg.seed, trial);
    let generation = SourceGeneration::random(field.clone(), cfg.n, cfg.l, &mut rng);
    let mut decoder = DecoderState::new(field.clone(), cfg.n, cfg.l);
    let audited = trial.is_multiple_of(1000);
    let mut inserted_vectors: Vec<Vec<u64>> = Vec::new();

    let next_packet = |rng: &mut ChaCha8Rng| -> Result<CodedPacket, SimError> {
        loop {
            let pkt = encode(&generation, dist, rng)?;
            if cfg.include_zero_vectors || !pkt.is_zero_vector() {
                return Ok(pkt);
            }
        }
    };

    let mut transmissions_to_decode = None;
    match cfg.mode {
        ReceptionMode::FixedM { m } => {
            for _ in 0..m {
                let pkt = next_packet(&mut rng)?;
                if audited {
                    inserted_vectors
                        .push(pkt.coding_vector.iter().map(|&v| v as u64).collect());
                }
                decoder.insert(&pkt)?;
            }
        }
        ReceptionMode::Stream { packets, erasure } => {
            for tx in 1..=packets {
                let pkt = next_packet(&mut rng)?;
                if rng.gen_bool(erasure) {
                    continue;
                }
                if audited {
                    inserted_vectors
                        .push(pkt.coding_vector.iter().map(|&v| v as u64).collect());
                }
                decoder.insert(&pkt)?;
                if decoder.is_complete() {
                    transmissions_to_decode = Some(tx);
                    break;
                }
            }
        }
    }

    if audited && !inserted_vectors.is_empty() {
        let batch = FqMatrix::from_rows(field.clone(), &inserted_vectors)
            .map_err(|e| SimError::InvalidConfig(e.to_string()))?
            .rank();
        if batch != decoder.rank() {
            return Err(SimError::AuditMismatch {
                trial,
                incremental: decoder.rank(),
                batch,
            });
        }
    }

    let success = decoder.is_complete();
    if success {
        let recovered = decoder.recover_sources()?;
        if recovered != generation.packets() {
            return Err(SimError::RoundTripMismatch { trial });
        }
    }
    Ok(TrialOutcome {
        success,
        transmissions_to_decode,
    })
}

/// Run the whole scenario. Deterministic for a given config (including
/// seed); trials execute in parallel on the current rayon pool and reduce
/// by counting, so scheduling cannot affect the report.
pub fn run_trials(cfg: &SimConfig) -> Result<SimReport, SimError> {
    cfg.validate()?;
    let field = FieldSpec::new(cfg.q).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
    let dist = SparseDist::new(field.clone(), cfg.p0.clone())
        .map_err(|e| SimError::InvalidConfig(e.to_string()))?;

    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_one_trial(cfg, &field, &dist, trial))
        .collect::<Result<_, _>>()?;

    let successes = outcomes.iter().filter(|o| o.success).count() as u64;
    let rate = successes as f64 / cfg.trials as f64;
    let standard_error = (rate * (1.0 - rate) / cfg.trials as f64).sqrt();
    let mut decode_times: Vec<u64> = outcomes
        .iter()
        .filter_map(|o| o.transmissions_to_decode)
        .collect();
    decode_times.sort_unstable();
    let transmissions = if decode_times.is_empty() {
        None
    } else {
        let len = decode_times.len();
        let nearest_rank = |fraction: f64| {
            let idx = ((fraction * len as f64).ceil() as usize).clamp(1, len) - 1;
            decode_times[idx]
        };
        Some(TransmissionStats {
            mean: decode_times.iter().sum::<u64>() as f64 / len as f64,
            min: decode_times[0],
            p50: nearest_rank(0.5),
            p90: nearest_rank(0.9),
            max: decode_times[len - 1],
        })
    };
    Ok(SimReport {
        config: cfg.clone(),
        trials: cfg.trials,
        successes,
        empirical_success_rate: rate,
        standard_error,
        transmissions,
        audited_trials: cfg.trials.div_ceil(1000),
    })
}
