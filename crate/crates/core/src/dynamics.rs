//! Reduced two-atom dynamics: evolve, trace out the field, measure.

use serde::{Deserialize, Serialize};

use crate::entanglement::{classify_with, negativity, ClassLabel, ClassifierConfig};
use crate::error::{Error, Result};
use crate::linalg::{expm_i_hermitian, partial_trace_field, ComplexMatrix, JointState, ATOM_DIM, C64, ZERO};
use crate::model::{initial_state_from_vector, sector_hamiltonian, AtomicVector, SystemParams, TwoAtomAmplitudes};
use crate::propagator::FullEvolution;

pub use crate::linalg::AtomDensityMatrix;

/// Negative diagonal round-off above this magnitude is left visible.
pub const POPULATION_CLAMP: f64 = 1e-12;

/// One sample of the reduced dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub tau: f64,
    pub p_ee: f64,
    pub p_eg: f64,
    pub p_ge: f64,
    pub p_gg: f64,
    pub negativity: f64,
    pub class_label: ClassLabel,
}

impl TimeSeriesRecord {
    pub fn populations(&self) -> [f64; 4] {
        [self.p_ee, self.p_eg, self.p_ge, self.p_gg]
    }
}

/// Diagonal of `rho` in basis order, with tiny negative round-off set to zero.
pub fn populations(rho: &AtomDensityMatrix) -> [f64; 4] {
    let mut p = [0.0; 4];
    for (i, slot) in p.iter_mut().enumerate() {
        let x = rho.get(i, i).re;
        *slot = if x < 0.0 && x > -POPULATION_CLAMP { 0.0 } else { x };
    }
    p
}

/// Full-space evolution of a fixed initial product state `atomic ⊗ |n>`.
#[derive(Debug, Clone)]
pub struct Evolution {
    full: FullEvolution,
    initial: JointState,
}

impl Evolution {
    pub fn new(params: &SystemParams, atomic: &AtomicVector) -> Result<Self> {
        Ok(Self {
            full: FullEvolution::new(params)?,
            initial: initial_state_from_vector(atomic, params)?,
        })
    }

    pub fn params(&self) -> &SystemParams {
        self.full.params()
    }

    pub fn state(&self, tau: f64) -> Result<JointState> {
        self.full.evolve(&self.initial, tau)
    }

    pub fn reduced(&self, tau: f64) -> Result<AtomDensityMatrix> {
        partial_trace_field(&self.state(tau)?)
    }

    pub fn record(&self, tau: f64, classifier: &ClassifierConfig) -> Result<TimeSeriesRecord> {
        let rho = self.reduced(tau)?;
        let [p_ee, p_eg, p_ge, p_gg] = populations(&rho);
        let neg = negativity(&rho)?.value;
        let class_label = classify_with(&rho, classifier)?.label;
        Ok(TimeSeriesRecord {
            tau,
            p_ee,
            p_eg,
            p_ge,
            p_gg,
            negativity: neg,
            class_label,
        })
    }

    /// Samples on `tau_k = k * tau_max / (steps - 1)`.
    pub fn time_series(
        &self,
        tau_max: f64,
        steps: usize,
        classifier: &ClassifierConfig,
    ) -> Result<Vec<TimeSeriesRecord>> {
        tau_grid(tau_max, steps)?
            .into_iter()
            .map(|tau| self.record(tau, classifier))
            .collect()
    }
}

/// Uniform grid of `steps` points on `[0, tau_max]`.
pub fn tau_grid(tau_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 steps, got {steps}")));
    }
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(Error::InvalidParams(format!("tau_max must be positive, got {tau_max}")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if k == steps - 1 {
                tau_max
            } else {
                k as f64 * tau_max / last
            }
        })
        .collect())
}

/// Reduced atomic state at `tau` for the product initial state given by `amps`.
pub fn evolve_reduced(params: &SystemParams, amps: &TwoAtomAmplitudes, tau: f64) -> Result<AtomDensityMatrix> {
    Evolution::new(params, &amps.atomic_vector())?.reduced(tau)
}

pub fn time_series(
    params: &SystemParams,
    atomic: &AtomicVector,
    tau_max: f64,
    steps: usize,
) -> Result<Vec<TimeSeriesRecord>> {
    Evolution::new(params, atomic)?.time_series(tau_max, steps, &ClassifierConfig::default())
}

/// Initial states that live in a single invariant ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceSeed {
    /// `|ee, n>`, first member of the ladder based at `n`.
    Excited,
    /// `|gg, n>`, last member of the ladder based at `n - 2`.
    Ground,
}

/// Reduced state from the four ladder amplitudes alone, without the full
/// field space.
///
/// Components on different photon numbers are orthogonal in the field, so only
/// `|eg>` and `|ge>` (which share `n + 1` photons) keep a coherence.
pub fn evolve_reduced_subspace(params: &SystemParams, seed: SubspaceSeed, tau: f64) -> Result<AtomDensityMatrix> {
    let n = params.n_photon() as i64;
    let (base, start) = match seed {
        SubspaceSeed::Excited => (n, 0),
        SubspaceSeed::Ground => (n - 2, 3),
    };
    let u = expm_i_hermitian(&sector_hamiltonian(params.delta(), base), tau)?;
    let mut init = [ZERO; ATOM_DIM];
    init[start] = C64::new(1.0, 0.0);
    let amps = u.mul_vec(&init);
    let photons = [base, base + 1, base + 1, base + 2];
    let mut rho = ComplexMatrix::zeros(ATOM_DIM);
    for j in 0..ATOM_DIM {
        for k in 0..ATOM_DIM {
            if photons[j] == photons[k] {
                rho[(j, k)] = amps[j] * amps[k].conj();
            }
        }
    }
    AtomDensityMatrix::new(rho)
}
