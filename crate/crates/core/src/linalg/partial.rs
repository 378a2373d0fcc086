use super::{eig_hermitian, norm_sqr, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Number of two-atom basis states, ordered `|ee>, |eg>, |ge>, |gg>`.
pub const ATOM_DIM: usize = 4;

const NORM_TOL: f64 = 1e-10;

/// Pure state of the two atoms and the truncated field.
///
/// Amplitudes are stored atom-major: index `atom * fock_dim + photons`,
/// with the atomic index following the `|ee>, |eg>, |ge>, |gg>` order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    fock_dim: usize,
    amps: Vec<C64>,
}

impl JointState {
    pub fn zeros(fock_dim: usize) -> Self {
        Self {
            fock_dim,
            amps: vec![ZERO; ATOM_DIM * fock_dim],
        }
    }

    pub fn from_vec(fock_dim: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != ATOM_DIM * fock_dim {
            return Err(Error::DimensionMismatch {
                expected: ATOM_DIM * fock_dim,
                actual: amps.len(),
            });
        }
        Ok(Self { fock_dim, amps })
    }

    /// `(atomic state) ⊗ |photons>`
    pub fn product(atomic: &[C64; ATOM_DIM], photons: usize, fock_dim: usize) -> Result<Self> {
        if photons >= fock_dim {
            return Err(Error::CutoffTooSmall {
                cutoff: fock_dim.saturating_sub(1),
                required: photons,
            });
        }
        let mut s = Self::zeros(fock_dim);
        for (a, &c) in atomic.iter().enumerate() {
            s.set(a, photons, c);
        }
        Ok(s)
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    #[inline]
    pub fn index(&self, atom: usize, photons: usize) -> usize {
        atom * self.fock_dim + photons
    }

    pub fn amplitude(&self, atom: usize, photons: usize) -> C64 {
        self.amps[self.index(atom, photons)]
    }

    pub fn set(&mut self, atom: usize, photons: usize, value: C64) {
        let i = self.index(atom, photons);
        self.amps[i] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Total probability carried by Fock level `photons`.
    pub fn level_weight(&self, photons: usize) -> f64 {
        (0..ATOM_DIM).map(|a| self.amplitude(a, photons).norm_sqr()).sum()
    }
}

/// Reduced state of the two atoms in the `|ee>, |eg>, |ge>, |gg>` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomDensityMatrix {
    rho: ComplexMatrix,
}

impl AtomDensityMatrix {
    /// Validates Hermiticity (1e-10), unit trace (1e-12) and positivity
    /// (minimum eigenvalue >= -1e-10).
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if rho.dim() != ATOM_DIM {
            return Err(Error::DimensionMismatch {
                expected: ATOM_DIM,
                actual: rho.dim(),
            });
        }
        let eig = eig_hermitian(&rho)?;
        let tr = rho.trace();
        if (tr - 1.0).norm() > 1e-12 {
            return Err(Error::NotNormalized { norm_sqr: tr.re });
        }
        if eig.eigenvalues()[0] < -1e-10 {
            return Err(Error::InvalidParams(format!(
                "density matrix has negative eigenvalue {:e}",
                eig.eigenvalues()[0]
            )));
        }
        Ok(Self { rho })
    }

    /// `|psi><psi|` for a normalized atomic state.
    pub fn from_pure(psi: &[C64; ATOM_DIM]) -> Result<Self> {
        let n = norm_sqr(psi);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(Self {
            rho: ComplexMatrix::projector(psi).scale(C64::new(1.0 / n, 0.0)),
        })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: ComplexMatrix::identity(ATOM_DIM).scale(C64::new(0.25, 0.0)),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rho[(i, j)]
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// Exchanges the two atoms (`|eg> <-> |ge>`).
    pub fn swapped(&self) -> Self {
        Self {
            rho: self.rho.permuted(&[0, 2, 1, 3]),
        }
    }
}

/// Traces the field out of a joint pure state:
/// `rho[j, k] = sum_m psi(j, m) conj(psi(k, m))`.
pub fn partial_trace_field(joint: &JointState) -> Result<AtomDensityMatrix> {
    let n = joint.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr: n });
    }
    let mut rho = ComplexMatrix::zeros(ATOM_DIM);
    for j in 0..ATOM_DIM {
        for k in j..ATOM_DIM {
            let mut acc = ZERO;
            for m in 0..joint.fock_dim() {
                acc += joint.amplitude(j, m) * joint.amplitude(k, m).conj();
            }
            acc /= n;
            rho[(j, k)] = acc;
            rho[(k, j)] = acc.conj();
        }
        rho[(j, j)] = C64::new(rho[(j, j)].re, 0.0);
    }
    Ok(AtomDensityMatrix { rho })
}

/// Transpose over the second atom: `((i1 i2), (j1 j2)) -> ((i1 j2), (j1 i2))`.
pub fn partial_transpose(rho: &AtomDensityMatrix) -> ComplexMatrix {
    partial_transpose_matrix(rho.matrix())
}

/// [`partial_transpose`] for an arbitrary 4x4 operator.
pub fn partial_transpose_matrix(m: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(m.dim(), ATOM_DIM, "partial transpose needs a two-qubit operator");
    let mut out = ComplexMatrix::zeros(ATOM_DIM);
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    out[(2 * i1 + j2, 2 * j1 + i2)] = m[(2 * i1 + i2, 2 * j1 + j2)];
                }
            }
        }
    }
    out
}
