//! The physical system: parameters, initial states and Hamiltonians.
//!
//! Two identical two-level atoms couple with equal strength to one cavity
//! mode under the rotating-wave approximation. Energies are in units of the
//! coupling and time is the scaled time `tau = lambda * t`. The free
//! evolution is removed by going to the rotating frame, which leaves only the
//! detuning, split symmetrically as `delta * (n_excited - 1)`.
//!
//! Atomic basis order is `|ee>, |eg>, |ge>, |gg>` (first letter is atom 1).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, ComplexMatrix, JointState, ATOM_DIM, C64, ZERO};

pub const EE: usize = 0;
pub const EG: usize = 1;
pub const GE: usize = 2;
pub const GG: usize = 3;

/// Amplitudes of a two-atom pure state in the `|ee>, |eg>, |ge>, |gg>` basis.
pub type AtomicVector = [C64; ATOM_DIM];

/// Number of excited atoms in each atomic basis state.
const EXCITED: [usize; ATOM_DIM] = [2, 1, 1, 0];

/// The ladder from `|ee, n>` reaches `n + 2`; two further empty levels serve
/// as the truncation check.
const CUTOFF_MARGIN: usize = 4;
const DEFAULT_CUTOFF_MARGIN: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    delta: f64,
    n_photon: usize,
    lambda: f64,
    fock_cutoff: usize,
}

impl SystemParams {
    /// Detuning `delta` (units of the coupling) and initial Fock occupation;
    /// the Fock cutoff defaults to `n_photon + 6`.
    pub fn new(delta: f64, n_photon: usize) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::InvalidParams(format!("detuning must be finite, got {delta}")));
        }
        Ok(Self {
            delta,
            n_photon,
            lambda: 1.0,
            fock_cutoff: n_photon + DEFAULT_CUTOFF_MARGIN,
        })
    }

    pub fn with_fock_cutoff(mut self, cutoff: usize) -> Result<Self> {
        let required = self.min_cutoff();
        if cutoff < required {
            return Err(Error::CutoffTooSmall { cutoff, required });
        }
        self.fock_cutoff = cutoff;
        Ok(self)
    }

    /// Physical coupling; only used to convert laboratory time to `tau`.
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParams(format!("coupling must be positive, got {lambda}")));
        }
        self.lambda = lambda;
        Ok(self)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n_photon(&self) -> usize {
        self.n_photon
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn min_cutoff(&self) -> usize {
        self.n_photon + CUTOFF_MARGIN
    }

    pub fn scaled_time(&self, t: f64) -> f64 {
        self.lambda * t
    }

    /// `sqrt(n + 1)`
    pub fn gamma(&self) -> f64 {
        ((self.n_photon + 1) as f64).sqrt()
    }

    /// `sqrt(n + 2)`
    pub fn beta(&self) -> f64 {
        ((self.n_photon + 2) as f64).sqrt()
    }
}

/// Single-atom amplitudes `a_i |g> + b_i |e>` for both atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoAtomAmplitudes {
    a1: C64,
    b1: C64,
    a2: C64,
    b2: C64,
}

impl TwoAtomAmplitudes {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(a1: C64, b1: C64, a2: C64, b2: C64) -> Result<Self> {
        for (a, b) in [(a1, b1), (a2, b2)] {
            let n = a.norm_sqr() + b.norm_sqr();
            if (n - 1.0).abs() > Self::NORM_TOL {
                return Err(Error::NotNormalized { norm_sqr: n });
            }
        }
        Ok(Self { a1, b1, a2, b2 })
    }

    pub fn excited() -> Self {
        let (z, o) = (ZERO, C64::new(1.0, 0.0));
        Self {
            a1: z,
            b1: o,
            a2: z,
            b2: o,
        }
    }

    pub fn ground() -> Self {
        let (z, o) = (ZERO, C64::new(1.0, 0.0));
        Self {
            a1: o,
            b1: z,
            a2: o,
            b2: z,
        }
    }

    pub fn a1(&self) -> C64 {
        self.a1
    }

    pub fn b1(&self) -> C64 {
        self.b1
    }

    pub fn a2(&self) -> C64 {
        self.a2
    }

    pub fn b2(&self) -> C64 {
        self.b2
    }

    /// Product-state coefficients in basis order:
    /// `|ee>: b1 b2, |eg>: b1 a2, |ge>: a1 b2, |gg>: a1 a2`.
    pub fn atomic_vector(&self) -> AtomicVector {
        [
            self.b1 * self.b2,
            self.b1 * self.a2,
            self.a1 * self.b2,
            self.a1 * self.a2,
        ]
    }
}

/// `(|eg> - |ge>) / sqrt(2)`, decoupled from the field for equal couplings.
pub fn singlet() -> AtomicVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO]
}

/// `|ee>, |eg>, |ge>, |gg>` as single basis vectors.
pub fn basis_vector(index: usize) -> AtomicVector {
    let mut v = [ZERO; ATOM_DIM];
    v[index] = C64::new(1.0, 0.0);
    v
}

/// Quantities entering the closed-form propagator.
///
/// The `mu` are the roots of `mu^3 - (delta^2 + 2 gamma^2 + 2 beta^2) mu + 2 delta = 0`,
/// found trigonometrically: `mu_i = (2/3) kappa cos(theta_i)` with
/// `kappa = sqrt(3 (delta^2 + 2 (beta^2 + gamma^2)))`,
/// `theta_1 = acos(-27 delta / kappa^3) / 3` and successive angles spaced by `2 pi / 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralQuantities {
    pub delta: f64,
    pub gamma: f64,
    pub beta: f64,
    pub kappa: f64,
    pub theta: [f64; 3],
    pub mu: [f64; 3],
    /// `alpha_1 = 1/(mu12 mu13)`, `alpha_2 = 1/(mu12 mu23)`, `alpha_3 = 1/(mu13 mu23)`
    pub alpha: [f64; 3],
    /// `[mu12, mu13, mu23]` with `mu_kj = mu_k - mu_j`
    pub mu_diffs: [f64; 3],
}

impl SpectralQuantities {
    /// Residual of the characteristic cubic at `mu`.
    pub fn cubic(&self, mu: f64) -> f64 {
        let linear = self.delta * self.delta + 2.0 * self.gamma * self.gamma + 2.0 * self.beta * self.beta;
        mu * mu * mu - linear * mu + 2.0 * self.delta
    }
}

pub const DEGENERATE_GAP: f64 = 1e-9;
const ACOS_SLACK: f64 = 1e-12;

pub fn spectral_quantities(params: &SystemParams) -> Result<SpectralQuantities> {
    let delta = params.delta();
    let gamma = params.gamma();
    let beta = params.beta();
    let kappa = (3.0 * (delta * delta + 2.0 * (beta * beta + gamma * gamma))).sqrt();

    let argument = -27.0 * delta / kappa.powi(3);
    if argument.abs() > 1.0 + ACOS_SLACK {
        return Err(Error::DomainError { argument });
    }
    let theta1 = argument.clamp(-1.0, 1.0).acos() / 3.0;
    let theta2 = 2.0 * PI / 3.0 + theta1;
    let theta3 = 2.0 * PI / 3.0 + theta2;
    let theta = [theta1, theta2, theta3];
    let mu = theta.map(|th| 2.0 / 3.0 * kappa * th.cos());

    let mu12 = mu[0] - mu[1];
    let mu13 = mu[0] - mu[2];
    let mu23 = mu[1] - mu[2];
    let min_gap = mu12.abs().min(mu13.abs()).min(mu23.abs());
    if min_gap < DEGENERATE_GAP {
        return Err(Error::DegenerateRoots { min_gap });
    }
    let alpha = [1.0 / (mu12 * mu13), 1.0 / (mu12 * mu23), 1.0 / (mu13 * mu23)];

    Ok(SpectralQuantities {
        delta,
        gamma,
        beta,
        kappa,
        theta,
        mu,
        alpha,
        mu_diffs: [mu12, mu13, mu23],
    })
}

/// Hamiltonian on `{|ee,n>, |eg,n+1>, |ge,n+1>, |gg,n+2>}`:
///
/// ```text
/// [[ delta, gamma, gamma,    0  ],
///  [ gamma,   0,     0,    beta ],
///  [ gamma,   0,     0,    beta ],
///  [   0,   beta,  beta, -delta ]]
/// ```
pub fn subspace_hamiltonian(params: &SystemParams) -> ComplexMatrix {
    sector_hamiltonian(params.delta(), params.n_photon() as i64)
}

/// Same block for the ladder whose `|ee>` component carries `base` photons.
///
/// `base` may be `-1` or `-2` for the low-lying sectors that contain `|eg,0>`
/// or `|gg,0>`; basis states with negative photon number then decouple
/// (their couplings vanish) and never acquire amplitude.
pub fn sector_hamiltonian(delta: f64, base: i64) -> ComplexMatrix {
    let gamma = ((base + 1).max(0) as f64).sqrt();
    let beta = ((base + 2).max(0) as f64).sqrt();
    ComplexMatrix::from_real_rows([
        [delta, gamma, gamma, 0.0],
        [gamma, 0.0, 0.0, beta],
        [gamma, 0.0, 0.0, beta],
        [0.0, beta, beta, -delta],
    ])
}

/// Indices of `|ee,n>, |eg,n+1>, |ge,n+1>, |gg,n+2>` in the full space.
pub fn subspace_indices(params: &SystemParams) -> [usize; 4] {
    let f = params.fock_dim();
    let n = params.n_photon();
    [EE * f + n, EG * f + n + 1, GE * f + n + 1, GG * f + n + 2]
}

/// Rotating-frame Hamiltonian on atoms ⊗ Fock(0..=cutoff).
///
/// Index layout matches [`JointState`]: `atom * fock_dim + photons`.
pub fn full_hamiltonian(params: &SystemParams) -> Result<ComplexMatrix> {
    if params.fock_cutoff() < params.min_cutoff() {
        return Err(Error::CutoffTooSmall {
            cutoff: params.fock_cutoff(),
            required: params.min_cutoff(),
        });
    }
    let f = params.fock_dim();
    let mut h = ComplexMatrix::zeros(ATOM_DIM * f);
    for (atom, &exc) in EXCITED.iter().enumerate() {
        let energy = params.delta() * (exc as f64 - 1.0);
        for m in 0..f {
            h[(atom * f + m, atom * f + m)] = C64::new(energy, 0.0);
        }
    }
    // (excited state, state after one atom emits): atom 1 flips ee->ge, eg->gg;
    // atom 2 flips ee->eg, ge->gg
    let emissions = [(EE, GE), (EG, GG), (EE, EG), (GE, GG)];
    for (upper, lower) in emissions {
        for m in 0..f - 1 {
            let g = C64::new(((m + 1) as f64).sqrt(), 0.0);
            let from = upper * f + m;
            let to = lower * f + m + 1;
            h[(to, from)] = g;
            h[(from, to)] = g;
        }
    }
    Ok(h)
}

/// Diagonal operator `a^dag a + (number of excited atoms)`.
pub fn excitation_operator(params: &SystemParams) -> ComplexMatrix {
    let f = params.fock_dim();
    let diag: Vec<C64> = EXCITED
        .iter()
        .flat_map(|&exc| (0..f).map(move |m| C64::new((m + exc) as f64, 0.0)))
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// `(c1 |gg> + c2 |eg> + c3 |ge> + c4 |ee>) ⊗ |n>` with the product-state
/// coefficients of `amps`.
pub fn initial_state(amps: &TwoAtomAmplitudes, params: &SystemParams) -> Result<JointState> {
    initial_state_from_vector(&amps.atomic_vector(), params)
}

/// `(atomic) ⊗ |n>` for an arbitrary normalized two-atom state.
pub fn initial_state_from_vector(atomic: &AtomicVector, params: &SystemParams) -> Result<JointState> {
    let n = norm_sqr(atomic);
    if (n - 1.0).abs() > TwoAtomAmplitudes::NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr: n });
    }
    JointState::product(atomic, params.n_photon(), params.fock_dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_hermitian;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn cutoff_validation() {
        let p = SystemParams::new(0.5, 3).unwrap();
        assert_eq!(p.fock_cutoff(), 9);
        assert!(p.with_fock_cutoff(7).is_ok());
        assert_eq!(
            p.with_fock_cutoff(6).unwrap_err(),
            Error::CutoffTooSmall { cutoff: 6, required: 7 }
        );
        assert!(SystemParams::new(f64::NAN, 0).is_err());
        assert!(p.with_lambda(0.0).is_err());
    }

    #[test]
    fn resonant_vacuum_spectral_quantities() {
        let p = SystemParams::new(0.0, 0).unwrap();
        let sq = spectral_quantities(&p).unwrap();
        assert_eq!(sq.gamma, 1.0);
        assert!((sq.beta - 2f64.sqrt()).abs() < 1e-15);
        assert!((sq.kappa - 18f64.sqrt()).abs() < 1e-12);
        assert!((sq.kappa - 4.242640687).abs() < 1e-9);
        let mut roots = sq.mu;
        roots.sort_by(f64::total_cmp);
        let s6 = 6f64.sqrt();
        for (got, want) in roots.iter().zip([-s6, 0.0, s6]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_first_angle_is_pi_over_six() {
        for n in [0, 1, 3, 10] {
            let p = SystemParams::new(0.0, n).unwrap();
            let sq = spectral_quantities(&p).unwrap();
            assert!((sq.theta[0] - PI / 6.0).abs() < 1e-12);
            let expected = (2.0 * sq.gamma.powi(2) + 2.0 * sq.beta.powi(2)).sqrt();
            assert!((sq.mu[0] - expected).abs() < 1e-12);
            assert!((sq.mu[0] - sq.kappa / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn vieta_at_half_detuning() {
        let p = SystemParams::new(0.5, 0).unwrap();
        let sq = spectral_quantities(&p).unwrap();
        assert!(sq.mu.iter().sum::<f64>().abs() < 1e-9);
        assert!((sq.mu.iter().product::<f64>() + 1.0).abs() < 1e-9);
        for mu in sq.mu {
            assert!(sq.cubic(mu).abs() < 1e-9);
        }
    }

    #[test]
    fn roots_match_symmetric_block_eigenvalues() {
        for delta in [0.0, 0.1, 0.5, 1.0, 2.0] {
            for n in [0usize, 1, 3, 10] {
                let p = SystemParams::new(delta, n).unwrap();
                let sq = spectral_quantities(&p).unwrap();
                let (g, b) = (sq.gamma * 2f64.sqrt(), sq.beta * 2f64.sqrt());
                let block = ComplexMatrix::from_real_rows([[delta, g, 0.0], [g, 0.0, b], [0.0, b, -delta]]);
                let eig = eig_hermitian(&block).unwrap();
                let mut roots = sq.mu;
                roots.sort_by(f64::total_cmp);
                for (r, e) in roots.iter().zip(eig.eigenvalues()) {
                    assert!((r - e).abs() < 1e-9, "delta={delta} n={n}: {r} vs {e}");
                }
            }
        }
    }

    #[test]
    fn subspace_hamiltonian_at_resonance() {
        let p = SystemParams::new(0.0, 0).unwrap();
        let s2 = 2f64.sqrt();
        let expected = ComplexMatrix::from_real_rows([
            [0.0, 1.0, 1.0, 0.0],
            [1.0, 0.0, 0.0, s2],
            [1.0, 0.0, 0.0, s2],
            [0.0, s2, s2, 0.0],
        ]);
        let h = subspace_hamiltonian(&p);
        assert_eq!(h, expected);
        let eig = eig_hermitian(&h).unwrap();
        let s6 = 6f64.sqrt();
        for (got, want) in eig.eigenvalues().iter().zip([-s6, 0.0, 0.0, s6]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn dark_vector_is_null() {
        for delta in [0.0, 0.3, -1.7] {
            for n in [0, 2, 7] {
                let h = subspace_hamiltonian(&SystemParams::new(delta, n).unwrap());
                let v = h.mul_vec(&singlet());
                assert!(v.iter().all(|z| z.norm() < 1e-15));
            }
        }
    }

    #[test]
    fn full_restriction_matches_subspace() {
        for (delta, n) in [(0.0, 0), (0.5, 3), (-1.0, 1)] {
            let p = SystemParams::new(delta, n).unwrap();
            let full = full_hamiltonian(&p).unwrap();
            assert!(full.hermitian_defect() == 0.0);
            let r = full.restrict(&subspace_indices(&p));
            assert!(r.max_abs_diff(&subspace_hamiltonian(&p)) < 1e-14);
        }
    }

    #[test]
    fn vacuum_ground_state_is_eigenvector() {
        let p = SystemParams::new(0.7, 0).unwrap();
        let h = full_hamiltonian(&p).unwrap();
        let psi = initial_state(&TwoAtomAmplitudes::ground(), &p).unwrap();
        let hpsi = h.mul_vec(psi.amplitudes());
        for (i, z) in hpsi.iter().enumerate() {
            let expected = -0.7 * psi.amplitudes()[i];
            assert!((z - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn excitation_number_is_conserved() {
        for (delta, n) in [(0.0, 0), (0.5, 3), (1.0, 1)] {
            let p = SystemParams::new(delta, n).unwrap();
            let h = full_hamiltonian(&p).unwrap();
            let comm = h.commutator(&excitation_operator(&p));
            assert!(comm.max_abs() < 1e-12);
        }
    }

    #[test]
    fn initial_state_factory() {
        let p = SystemParams::new(0.1, 2).unwrap();
        let ee = initial_state(&TwoAtomAmplitudes::excited(), &p).unwrap();
        assert_eq!(ee.amplitude(EE, 2), C64::new(1.0, 0.0));
        assert!((ee.norm_sqr() - 1.0).abs() < 1e-12);
        let gg = initial_state(&TwoAtomAmplitudes::ground(), &p).unwrap();
        assert_eq!(gg.amplitude(GG, 2), C64::new(1.0, 0.0));

        let c = |x: f64| C64::new(x, 0.0);
        let amps = TwoAtomAmplitudes::new(c(H), c(H), c(1.0), ZERO).unwrap();
        let s = initial_state(&amps, &p).unwrap();
        assert!((s.amplitude(GG, 2) - c(H)).norm() < 1e-15);
        assert!((s.amplitude(EG, 2) - c(H)).norm() < 1e-15);
        assert_eq!(s.amplitude(GE, 2), ZERO);
        assert_eq!(s.amplitude(EE, 2), ZERO);
    }

    #[test]
    fn amplitudes_must_be_normalized() {
        let c = |x: f64| C64::new(x, 0.0);
        assert!(matches!(
            TwoAtomAmplitudes::new(c(1.0), c(0.1), c(1.0), ZERO),
            Err(Error::NotNormalized { .. })
        ));
    }
}
