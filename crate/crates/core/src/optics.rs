//! Optical components over dual-rail path qubits, and the two-photon
//! interferometer built from them.
//!
//! Path conventions: index 0 is the solid beam, index 1 the dashed beam.
//! The beam splitter is the symmetric 50:50 matrix (1/√2)[[1, i],[i, 1]];
//! mirrors contribute only a dropped global phase. The photon-S arm carries
//! its phase shifter on the solid path, the photon-A arm on the dashed path,
//! so the two entangled branches pick up the relative phase φ_S − φ_A.
//!
//! The splitter reflection phases leave a fixed setup phase in the joint
//! probabilities. [`calibrate`] measures it at reference settings and
//! returns the origin shift that zeroes it; all phase-dependent operations
//! then take the calibration record.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::qstate::{DensityOperator, PureState, SubsystemLayout};

/// Local phase-shifter settings for the two arms, in radians. Values are
/// stored as given; reduction mod 2π happens only inside trig evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseSettings {
    pub phi_s: f64,
    pub phi_a: f64,
}

impl PhaseSettings {
    pub fn new(phi_s: f64, phi_a: f64) -> Result<Self> {
        if !phi_s.is_finite() || !phi_a.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { phi_s, phi_a })
    }

    pub fn delta(&self) -> f64 {
        self.phi_s - self.phi_a
    }
}

/// Origin shift that zeroes the setup phase, plus the residual left after
/// applying it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationRecord {
    /// Measured setup phase; subtracted from φ_S before compilation.
    pub origin_shift: f64,
    /// Setup phase remaining after the shift; below 1e-9 by construction.
    pub w: f64,
    pub note: String,
}

/// Probabilities of the four coincidence outcomes, keyed (detector A, detector S).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointDistribution {
    pub p11: f64,
    pub p12: f64,
    pub p21: f64,
    pub p22: f64,
}

impl JointDistribution {
    pub fn as_array(&self) -> [f64; 4] {
        [self.p11, self.p12, self.p21, self.p22]
    }

    pub fn same(&self) -> f64 {
        self.p11 + self.p22
    }

    pub fn diff(&self) -> f64 {
        self.p12 + self.p21
    }

    /// P(same) − P(diff).
    pub fn correlation(&self) -> f64 {
        self.same() - self.diff()
    }

    /// (P(A1), P(A2), P(S1), P(S2)).
    pub fn marginals(&self) -> (f64, f64, f64, f64) {
        (
            self.p11 + self.p12,
            self.p21 + self.p22,
            self.p11 + self.p21,
            self.p12 + self.p22,
        )
    }
}

/// One element in an optical arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Component {
    BeamSplitter,
    PhaseShifter { path: usize, phi: f64 },
    Mirror,
    Barrier { path: usize },
}

impl Component {
    fn matrix(&self) -> ComplexMatrix {
        match *self {
            Component::BeamSplitter => bs_unitary(),
            Component::PhaseShifter { path, phi } => {
                let mut m = ComplexMatrix::identity(2);
                m[(path, path)] = Complex64::from_polar(1.0, phi);
                m
            }
            // Mirror phase is global and dropped.
            Component::Mirror => ComplexMatrix::identity(2),
            Component::Barrier { path } => {
                let mut m = ComplexMatrix::identity(2);
                m[(path, path)] = Complex64::new(0.0, 0.0);
                m
            }
        }
    }

    fn is_lossy(&self) -> bool {
        matches!(self, Component::Barrier { .. })
    }
}

/// Photon source feeding the network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Source {
    /// One photon in an equal superposition of both paths.
    SinglePhoton,
    /// The equal-amplitude correlated pair (|11⟩ + |22⟩)/√2.
    EntangledPair,
}

/// Ordered per-arm component lists ahead of the detectors.
#[derive(Clone, Debug)]
pub struct OpticalNetwork {
    pub source: Source,
    pub arms: Vec<Vec<Component>>,
}

impl OpticalNetwork {
    pub fn single_photon(arm: Vec<Component>) -> Self {
        Self {
            source: Source::SinglePhoton,
            arms: vec![arm],
        }
    }

    pub fn entangled_pair(s_arm: Vec<Component>, a_arm: Vec<Component>) -> Self {
        Self {
            source: Source::EntangledPair,
            arms: vec![s_arm, a_arm],
        }
    }

    /// Multiplies the arm components in order and tensors the arms together.
    /// Barrier-free networks compile to unitaries; barriers make the map
    /// trace-nonincreasing.
    pub fn compile(&self) -> Result<CompiledNetwork> {
        let mut arm_matrices = Vec::with_capacity(self.arms.len());
        let mut lossy = false;
        for arm in &self.arms {
            let mut m = ComplexMatrix::identity(2);
            for component in arm {
                m = &component.matrix() * &m;
                lossy = lossy || component.is_lossy();
            }
            arm_matrices.push(m);
        }
        let matrix = match self.source {
            Source::SinglePhoton => {
                if arm_matrices.len() != 1 {
                    return Err(Error::InvalidConfig(
                        "single-photon network needs exactly one arm".into(),
                    ));
                }
                arm_matrices.pop().unwrap()
            }
            Source::EntangledPair => {
                if arm_matrices.len() != 2 {
                    return Err(Error::InvalidConfig(
                        "entangled-pair network needs exactly two arms".into(),
                    ));
                }
                arm_matrices[0].tensor(&arm_matrices[1])?
            }
        };
        Ok(CompiledNetwork { matrix, lossy })
    }

    /// Initial amplitude vector emitted by the source.
    pub fn source_state(&self) -> ComplexVector {
        let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self.source {
            Source::SinglePhoton => ComplexVector::new(vec![half, half]).unwrap(),
            Source::EntangledPair => ComplexVector::new(vec![half, zero, zero, half]).unwrap(),
        }
    }
}

/// Compiled transfer matrix with a loss marker.
#[derive(Clone, Debug)]
pub struct CompiledNetwork {
    pub matrix: ComplexMatrix,
    pub lossy: bool,
}

impl CompiledNetwork {
    /// Applies the map; lossy networks post-select on detection and report
    /// the discarded probability.
    pub fn apply(&self, input: &ComplexVector) -> Result<(ComplexVector, f64)> {
        let out = self.matrix.matvec(input);
        let norm = out.norm();
        if self.lossy {
            if norm < 1e-12 {
                return Err(Error::Blocked);
            }
            let loss = (1.0 - norm * norm).max(0.0);
            Ok((out.scaled(Complex64::new(1.0 / norm, 0.0)), loss))
        } else {
            Ok((out, 0.0))
        }
    }
}

/// The symmetric 50:50 beam splitter (1/√2)[[1, i],[i, 1]].
pub fn bs_unitary() -> ComplexMatrix {
    let t = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let r = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    ComplexMatrix::new(2, 2, vec![t, r, r, t]).expect("fixed 2x2 matrix")
}

fn interferometer_arm(path: usize, phi: f64) -> Vec<Component> {
    vec![
        Component::PhaseShifter { path, phi },
        Component::Mirror,
        Component::BeamSplitter,
    ]
}

/// Detector probabilities for one photon interfering with itself: phase φ on
/// the solid path, then the beam splitter. Full-visibility fringes.
pub fn single_photon_probs(phi: f64) -> (f64, f64) {
    let network = OpticalNetwork::single_photon(interferometer_arm(0, phi));
    let compiled = network.compile().expect("single-photon arm compiles");
    let (out, _) = compiled.apply(&network.source_state()).expect("lossless");
    (out[0].norm_sqr(), out[1].norm_sqr())
}

/// The two-photon interferometer at the given physical settings: the
/// correlated-pair source state on layout (S, A) and the compiled joint
/// unitary.
pub fn build_rto(settings: PhaseSettings) -> (PureState, ComplexMatrix) {
    let network = OpticalNetwork::entangled_pair(
        interferometer_arm(0, settings.phi_s),
        interferometer_arm(1, settings.phi_a),
    );
    let compiled = network.compile().expect("barrier-free network compiles");
    let layout = SubsystemLayout::new(&[("S", 2), ("A", 2)]).expect("4-dimensional layout");
    let state = PureState::new(layout, network.source_state()).expect("source state is normalized");
    (state, compiled.matrix)
}

/// Joint detection probabilities at raw (uncalibrated) physical settings.
fn raw_joint_probs(settings: PhaseSettings) -> JointDistribution {
    let (state, unitary) = build_rto(settings);
    let out = unitary.matvec(state.amplitudes());
    // Flat index s·2 + a; distribution keys are (A detector, S detector).
    JointDistribution {
        p11: out[0].norm_sqr(),
        p12: out[2].norm_sqr(),
        p21: out[1].norm_sqr(),
        p22: out[3].norm_sqr(),
    }
}

/// Measures the setup phase at reference settings and returns the origin
/// shift that zeroes it. Deterministic, so calibrating twice gives the same
/// record.
pub fn calibrate() -> CalibrationRecord {
    let measure = |shift: f64| {
        let at = |phi_s: f64| {
            raw_joint_probs(PhaseSettings {
                phi_s: phi_s - shift,
                phi_a: 0.0,
            })
            .p11
        };
        // p11 = (1 + cos(Δ + w))/4, so Δ = 0 reads cos w and Δ = −π/2 reads sin w.
        let cos_w = 4.0 * at(0.0) - 1.0;
        let sin_w = 4.0 * at(-FRAC_PI_2) - 1.0;
        sin_w.atan2(cos_w)
    };
    let origin_shift = measure(0.0);
    let residual = measure(origin_shift);
    CalibrationRecord {
        origin_shift,
        w: residual,
        note: "symmetric 50:50 splitter; origin shifted so equal settings agree perfectly".into(),
    }
}

/// Joint probabilities at calibrated settings, evaluated through the compiled
/// network.
pub fn rto_joint_probs(settings: PhaseSettings, cal: &CalibrationRecord) -> JointDistribution {
    raw_joint_probs(PhaseSettings {
        phi_s: settings.phi_s - cal.origin_shift,
        phi_a: settings.phi_a,
    })
}

/// The cosine law for the same probabilities: p11 = p22 = (1/4)[1 + cos(Δ + w)]
/// and p12 = p21 = (1/4)[1 − cos(Δ + w)].
pub fn closed_form_joint_probs(
    settings: PhaseSettings,
    cal: &CalibrationRecord,
) -> JointDistribution {
    let c = (settings.delta() + cal.w).cos();
    JointDistribution {
        p11: 0.25 * (1.0 + c),
        p12: 0.25 * (1.0 - c),
        p21: 0.25 * (1.0 - c),
        p22: 0.25 * (1.0 + c),
    }
}

/// Degree of correlation C = P(same) − P(diff) = cos(φ_S − φ_A).
pub fn correlation(settings: PhaseSettings, cal: &CalibrationRecord) -> f64 {
    rto_joint_probs(settings, cal).correlation()
}

/// Single-detector probabilities (P(A1), P(A2), P(S1), P(S2)); all 1/2
/// independent of the settings.
pub fn marginals(settings: PhaseSettings, cal: &CalibrationRecord) -> (f64, f64, f64, f64) {
    rto_joint_probs(settings, cal).marginals()
}

/// Detector probabilities for a photon whose partner carries which-path
/// information with inner product `overlap`: fringe visibility |overlap|.
///
/// overlap = 0 is the inserted barrier (orthogonal partner states, flat 1/2);
/// overlap = 1 is the absent barrier (identical partner states, full fringes).
pub fn zwm_probs(overlap: Complex64, phi: f64) -> Result<(f64, f64)> {
    if !phi.is_finite() {
        return Err(Error::NonFinite);
    }
    let mag = overlap.norm();
    if mag > 1.0 + 1e-12 {
        return Err(Error::OverlapOutOfRange(mag));
    }
    let mag = mag.min(1.0);
    let p1 = 0.5 * (1.0 + mag * (phi + overlap.arg() - FRAC_PI_2).cos());
    Ok((p1, 1.0 - p1))
}

/// Same probabilities by explicit construction: build the joint state with
/// partner states of the given overlap, trace the partner out, push the
/// reduced operator through the interferometer arm.
pub fn zwm_oracle_probs(overlap: Complex64, phi: f64) -> Result<(f64, f64)> {
    let rho_s = zwm_reduced_state(overlap)?;
    let arm = OpticalNetwork::single_photon(interferometer_arm(0, phi))
        .compile()?
        .matrix;
    let rotated = &(&arm * rho_s.matrix()) * &arm.adjoint();
    Ok((rotated[(0, 0)].re, rotated[(1, 1)].re))
}

/// Reduced state of the signal photon when its partner's which-path states
/// have inner product ⟨e₂|e₁⟩ = overlap.
pub fn zwm_reduced_state(overlap: Complex64) -> Result<DensityOperator> {
    let mag = overlap.norm();
    if mag > 1.0 + 1e-12 {
        return Err(Error::OverlapOutOfRange(mag));
    }
    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let residual = (1.0 - (mag * mag).min(1.0)).max(0.0).sqrt();
    let partner_1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let partner_2 = [overlap.conj(), Complex64::new(residual, 0.0)];
    let layout = SubsystemLayout::new(&[("S", 2), ("E", 2)])?;
    let amplitudes = vec![
        half * partner_1[0],
        half * partner_1[1],
        half * partner_2[0],
        half * partner_2[1],
    ];
    let joint = PureState::from_amplitudes(layout, amplitudes)?;
    joint.densify().partial_trace("S")
}

/// Fringe visibility of the signal photon read from its reduced state:
/// twice the off-diagonal magnitude.
pub fn zwm_oracle_visibility(overlap: Complex64) -> Result<f64> {
    let rho_s = zwm_reduced_state(overlap)?;
    Ok(2.0 * rho_s.matrix()[(0, 1)].norm())
}
