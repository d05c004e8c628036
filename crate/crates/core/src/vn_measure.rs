//! The ideal premeasurement interaction, Born-rule probabilities and
//! reproducible outcome sampling.
//!
//! The detector has a ready slot and two pointer slots, all mutually
//! orthogonal, so its dimension is at least 3. Premeasurement is a fixed
//! permutation unitary: it sends |s_i⟩|ready⟩ to |s_i⟩|pointer_i⟩ and is
//! completed on the unused basis states by the unique order-preserving
//! permutation. Eigenstates pass through undisturbed.
//!
//! Sampling is driven by a counter-based generator: every trial draws from
//! its own stream derived from (root seed, trial index), so results are
//! identical regardless of execution order or thread count.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::qstate::{DensityOperator, PureState, SchmidtForm, SubsystemLayout};

/// Probability excursions below zero up to this size are rounding noise and
/// get clamped; anything larger is an error.
const PROBABILITY_SLACK: f64 = 1e-12;

/// Slot assignment for the detector: one ready state and one pointer state
/// per system eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ApparatusSpec {
    pub dim: usize,
    pub ready_index: usize,
    pub pointer_indices: [usize; 2],
}

impl ApparatusSpec {
    pub fn new(dim: usize, ready_index: usize, pointer_indices: [usize; 2]) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidApparatus(format!(
                "dimension {dim} cannot hold a ready state and two pointers"
            )));
        }
        let slots = [ready_index, pointer_indices[0], pointer_indices[1]];
        if slots.iter().any(|&s| s >= dim) {
            return Err(Error::InvalidApparatus("slot index out of range".into()));
        }
        if slots[0] == slots[1] || slots[0] == slots[2] || slots[1] == slots[2] {
            return Err(Error::InvalidApparatus(
                "slot indices must be distinct".into(),
            ));
        }
        Ok(Self {
            dim,
            ready_index,
            pointer_indices,
        })
    }

    /// Three slots: ready = 0, pointers = 1 and 2.
    pub fn minimal() -> Self {
        Self::new(3, 0, [1, 2]).expect("minimal spec is valid")
    }

    pub fn ready_state(&self) -> ComplexVector {
        ComplexVector::basis(self.dim, self.ready_index).expect("validated at construction")
    }
}

/// One sampled joint outcome. Records eigenvalue indices only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OutcomeRecord {
    pub trial_id: u64,
    /// 1 or 2.
    pub s_index: u8,
    /// 1 or 2.
    pub a_index: u8,
    /// (root seed, per-trial stream) that produced this draw.
    pub seed_path: (u64, u64),
}

/// Writes records as CSV with columns `trial_id,s_value,a_value`.
pub fn write_records_csv<W: Write>(mut out: W, records: &[OutcomeRecord]) -> std::io::Result<()> {
    writeln!(out, "trial_id,s_value,a_value")?;
    for r in records {
        writeln!(out, "{},{},{}", r.trial_id, r.s_index, r.a_index)?;
    }
    Ok(())
}

/// Deterministic stream-splitting random generator.
///
/// Identical (seed, stream) pairs produce identical draws on every platform;
/// `substream` and `child` derive independent generators without touching the
/// parent, so callers may fan out across threads freely.
#[derive(Clone, Debug)]
pub struct StreamRng {
    root_seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(root_seed: u64) -> Self {
        Self::with_stream(root_seed, 0)
    }

    pub fn with_stream(root_seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(root_seed);
        inner.set_stream(stream);
        Self {
            root_seed,
            stream,
            inner,
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Same key, independent stream counter.
    pub fn substream(&self, stream: u64) -> Self {
        Self::with_stream(self.root_seed, stream)
    }

    /// Re-keyed generator for a labeled branch of the experiment.
    pub fn child(&self, label: u64) -> Self {
        Self::new(mix64(self.root_seed, label))
    }

    /// Uniform draw in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// SplitMix64-style mixing of a seed with a branch label.
fn mix64(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The premeasurement permutation unitary on the 2·dim composite space.
///
/// Block i (system eigenstate i) permutes the detector slots: ready goes to
/// pointer i, the remaining slots map onto the remaining targets in
/// ascending order.
pub fn premeasurement_unitary(spec: &ApparatusSpec) -> ComplexMatrix {
    let d = spec.dim;
    let mut u = ComplexMatrix::zeros(2 * d, 2 * d);
    for s in 0..2 {
        let pointer = spec.pointer_indices[s];
        let targets: Vec<usize> = (0..d).filter(|&j| j != pointer).collect();
        let mut map = vec![0usize; d];
        map[spec.ready_index] = pointer;
        let mut remaining = targets.into_iter();
        for (source, slot) in map.iter_mut().enumerate() {
            if source != spec.ready_index {
                *slot = remaining.next().expect("one target per source");
            }
        }
        for (source, &target) in map.iter().enumerate() {
            u[(s * d + target, s * d + source)] = Complex64::new(1.0, 0.0);
        }
    }
    u
}

/// Couples a two-level system to the detector: U(ψ ⊗ apparatus).
///
/// The apparatus state must be the ready basis state; anything else is a
/// protocol violation and is rejected.
pub fn premeasure(
    system: &PureState,
    apparatus: &ComplexVector,
    spec: &ApparatusSpec,
) -> Result<PureState> {
    if system.dim() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "premeasurement expects a two-level system, got dimension {}",
            system.dim()
        )));
    }
    if apparatus.dim() != spec.dim {
        return Err(Error::ShapeMismatch(format!(
            "apparatus state dimension {} vs spec dimension {}",
            apparatus.dim(),
            spec.dim
        )));
    }
    if apparatus.max_abs_diff(&spec.ready_state()) > 1e-12 {
        return Err(Error::ApparatusNotReady);
    }
    let composite = system.amplitudes().tensor(apparatus)?;
    let out = premeasurement_unitary(spec).matvec(&composite);
    let layout = SubsystemLayout::new(&[("S", 2), ("A", spec.dim)])?;
    PureState::new(layout, out)
}

/// Premeasurement with the apparatus prepared in its ready state.
pub fn premeasure_ready(system: &PureState, spec: &ApparatusSpec) -> Result<PureState> {
    premeasure(system, &spec.ready_state(), spec)
}

/// Born-rule probabilities ⟨ψ|P_k|ψ⟩ for a complete projector set.
pub fn born_probabilities(psi: &PureState, projectors: &[ComplexMatrix]) -> Result<Vec<f64>> {
    let dim = psi.dim();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for p in projectors {
        if p.rows() != dim || p.cols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "projector shape {}x{} vs state dimension {dim}",
                p.rows(),
                p.cols()
            )));
        }
        sum = &sum + p;
    }
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if dev > 1e-10 {
        return Err(Error::IncompleteProjectors(dev));
    }
    projectors
        .iter()
        .map(|p| {
            let value = psi.amplitudes().inner(&p.matvec(psi.amplitudes())).re;
            clamp_probability(value)
        })
        .collect()
}

fn clamp_probability(value: f64) -> Result<f64> {
    if value < -PROBABILITY_SLACK {
        return Err(Error::NegativeProbability(value));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Draws one index from a normalized probability list, advancing the
/// generator by a single uniform.
pub fn sample(probabilities: &[f64], rng: &mut StreamRng) -> Result<usize> {
    let mut total = 0.0;
    for &p in probabilities {
        if p < -PROBABILITY_SLACK {
            return Err(Error::NegativeProbability(p));
        }
        total += p.max(0.0);
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::ProbabilitySum(total));
    }
    let u = rng.next_f64();
    let mut cumulative = 0.0;
    for (i, &p) in probabilities.iter().enumerate() {
        cumulative += p.max(0.0);
        if u < cumulative {
            return Ok(i);
        }
    }
    // u landed beyond the accumulated total (possible when it is 1−ulp short
    // of 1); the final outcome takes the remainder.
    Ok(probabilities.len() - 1)
}

/// Everything produced by one run of the correlated-measurement scenario.
#[derive(Clone, Debug)]
pub struct CatScenario {
    pub state: PureState,
    pub rho_s: DensityOperator,
    pub rho_a: DensityOperator,
    pub schmidt: SchmidtForm,
    pub entropy_global: f64,
    pub entropy_s: f64,
    pub entropy_a: f64,
    pub purity_global: f64,
    pub purity_s: f64,
    pub purity_a: f64,
    /// Joint outcome probabilities over (1,1), (1,2), (2,1), (2,2).
    pub probabilities: [f64; 4],
    /// Counts in the same order.
    pub counts: [u64; 4],
    pub records: Vec<OutcomeRecord>,
    /// Records with s_index ≠ a_index. Zero for the correlated state.
    pub cross_count: u64,
}

/// Prepares c1|s1⟩ + c2|s2⟩, couples it to a ready detector, reduces the
/// resulting state both ways and samples `trials` joint outcomes.
pub fn run_cat_scenario(
    c1: Complex64,
    c2: Complex64,
    trials: u64,
    rng: &StreamRng,
) -> Result<CatScenario> {
    let norm_sq = c1.norm_sqr() + c2.norm_sqr();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm_sq.sqrt()));
    }
    let spec = ApparatusSpec::minimal();
    let system = PureState::from_amplitudes(SubsystemLayout::single("S", 2)?, vec![c1, c2])?;
    let state = premeasure_ready(&system, &spec)?;

    let rho = state.densify();
    let rho_s = rho.partial_trace("S")?;
    let rho_a = rho.partial_trace("A")?;
    let schmidt = state.schmidt()?;

    // Projectors onto the four (s, pointer) pairs plus the untouched rest of
    // the detector space; the rest carries zero weight.
    let dim = state.dim();
    let mut projectors = Vec::with_capacity(5);
    let mut rest = ComplexMatrix::identity(dim);
    for s in 0..2 {
        for a in 0..2 {
            let index = s * spec.dim + spec.pointer_indices[a];
            let e = ComplexVector::basis(dim, index)?;
            let p = e.outer(&e);
            rest = &rest - &p;
            projectors.push(p);
        }
    }
    projectors.push(rest);
    let born = born_probabilities(&state, &projectors)?;
    let probabilities = [born[0], born[1], born[2], born[3]];

    let counts_and_records = sample_joint_outcomes(&probabilities, trials, rng)?;
    let cross_count = counts_and_records.0[1] + counts_and_records.0[2];
    Ok(CatScenario {
        entropy_global: rho.von_neumann_entropy(),
        entropy_s: rho_s.von_neumann_entropy(),
        entropy_a: rho_a.von_neumann_entropy(),
        purity_global: rho.purity(),
        purity_s: rho_s.purity(),
        purity_a: rho_a.purity(),
        state,
        rho_s,
        rho_a,
        schmidt,
        probabilities,
        counts: counts_and_records.0,
        records: counts_and_records.1,
        cross_count,
    })
}

const TRIAL_CHUNK: u64 = 8192;

/// Samples joint outcomes in parallel chunks; each trial uses its own stream,
/// so counts and records are independent of the chunking and thread count.
fn sample_joint_outcomes(
    probabilities: &[f64; 4],
    trials: u64,
    rng: &StreamRng,
) -> Result<([u64; 4], Vec<OutcomeRecord>)> {
    let root = rng.root_seed();
    let chunk_count = trials.div_ceil(TRIAL_CHUNK);
    let chunks: Vec<([u64; 4], Vec<OutcomeRecord>)> = (0..chunk_count)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * TRIAL_CHUNK;
            let end = (start + TRIAL_CHUNK).min(trials);
            let mut counts = [0u64; 4];
            let mut records = Vec::with_capacity((end - start) as usize);
            for trial in start..end {
                let mut trial_rng = rng.substream(trial);
                let outcome = sample(probabilities, &mut trial_rng)?;
                counts[outcome] += 1;
                records.push(OutcomeRecord {
                    trial_id: trial,
                    s_index: (outcome / 2 + 1) as u8,
                    a_index: (outcome % 2 + 1) as u8,
                    seed_path: (root, trial),
                });
            }
            Ok((counts, records))
        })
        .collect::<Result<_>>()?;

    let mut counts = [0u64; 4];
    let mut records = Vec::with_capacity(trials as usize);
    for (c, r) in chunks {
        for i in 0..4 {
            counts[i] += c[i];
        }
        records.extend(r);
    }
    Ok((counts, records))
}
