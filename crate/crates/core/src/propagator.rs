//! Time-evolution operators on the invariant subspace.
//!
//! Three routes are provided:
//!
//! * [`propagate_spectral`]: `exp(-i H tau)` of the 4x4 subspace Hamiltonian
//!   through its eigendecomposition. This is the production path.
//! * [`propagate_full_restricted`] / [`FullEvolution`]: the same exponential
//!   on the truncated atoms ⊗ field space.
//! * [`propagate_closed_form`]: explicit element-by-element formulas in
//!   terms of the cubic roots `mu_i`. It is kept for auditing; see
//!   [`ClosedFormMode`] and [`audit_closed_form`].

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, expm_i_hermitian, ComplexMatrix, HermitianEigensystem, JointState, ATOM_DIM, C64};
use crate::model::{full_hamiltonian, spectral_quantities, subspace_hamiltonian, subspace_indices};
use crate::model::{SpectralQuantities, SystemParams};

/// Deviation above which an audited element is reported as a mismatch.
pub const AUDIT_TOL: f64 = 1e-6;

/// Largest amplitude tolerated on the two highest Fock levels.
pub const TRUNCATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormMode {
    /// Every element from the reference formulas, unmodified.
    Strict,
    /// Reference formulas with two repairs: the `U11` exponent uses `mu_i`
    /// instead of `mu_1`, and the `U12 = U13 = U21 = U31` sum carries the
    /// `alpha_i` weights that every other element has.
    Corrected,
}

impl fmt::Display for ClosedFormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Strict => "strict",
            Self::Corrected => "corrected",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm(ClosedFormMode),
    Spectral,
    FullSpaceRestricted,
}

/// 4x4 propagator on `{|ee,n>, |eg,n+1>, |ge,n+1>, |gg,n+2>}`.
#[derive(Debug, Clone)]
pub struct SubspacePropagator {
    pub u: ComplexMatrix,
    pub tau: f64,
    pub method: Method,
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("tau must be finite, got {tau}")))
    }
}

pub fn propagate_spectral(params: &SystemParams, tau: f64) -> Result<SubspacePropagator> {
    check_tau(tau)?;
    let u = expm_i_hermitian(&subspace_hamiltonian(params), tau)?;
    Ok(SubspacePropagator {
        u,
        tau,
        method: Method::Spectral,
    })
}

/// Full-space propagator restricted to the invariant subspace of `|ee, n>`.
pub fn propagate_full_restricted(params: &SystemParams, tau: f64) -> Result<SubspacePropagator> {
    check_tau(tau)?;
    let full = FullEvolution::new(params)?;
    Ok(SubspacePropagator {
        u: full.operator(tau).restrict(&subspace_indices(params)),
        tau,
        method: Method::FullSpaceRestricted,
    })
}

pub fn propagate_closed_form(params: &SystemParams, tau: f64, mode: ClosedFormMode) -> Result<SubspacePropagator> {
    check_tau(tau)?;
    let sq = spectral_quantities(params)?;
    Ok(SubspacePropagator {
        u: closed_form_matrix(&sq, tau, mode),
        tau,
        method: Method::ClosedForm(mode),
    })
}

/// Signs `(-1)^(i+1)` for `i = 1, 2, 3`.
const SIGNS: [f64; 3] = [1.0, -1.0, 1.0];

/// Constant term `-delta (beta^2 - gamma^2) / (mu1 mu2 mu3)` closing `U22`;
/// `U23` carries it with the opposite sign.
///
/// NaN when the root product vanishes to round-off (the `delta = 0` case is 0/0).
pub fn trailing_term(sq: &SpectralQuantities) -> f64 {
    let (b2, g2) = (sq.beta * sq.beta, sq.gamma * sq.gamma);
    let product = sq.mu[0] * sq.mu[1] * sq.mu[2];
    let scale = sq.mu.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if product.abs() <= 1e-12 * scale.powi(3) {
        return f64::NAN;
    }
    -sq.delta * (b2 - g2) / product
}

/// Evaluates the closed-form matrix elements.
pub fn closed_form_matrix(sq: &SpectralQuantities, tau: f64, mode: ClosedFormMode) -> ComplexMatrix {
    let SpectralQuantities {
        delta: d,
        gamma: g,
        beta: b,
        mu,
        alpha,
        ..
    } = *sq;
    let (b2, g2) = (b * b, g * g);
    let phase: [C64; 3] = mu.map(|m| C64::new(0.0, -m * tau).exp());
    let strict = mode == ClosedFormMode::Strict;

    let sum = |term: &dyn Fn(usize) -> C64| -> C64 { (0..3).map(|i| term(i) * SIGNS[i]).sum() };

    let u11 = sum(&|i| {
        let e = if strict { phase[0] } else { phase[i] };
        e * alpha[i] * (mu[i] * (d + mu[i]) - 2.0 * b2)
    });
    let u12 = sum(&|i| {
        let w = if strict { 1.0 } else { alpha[i] };
        phase[i] * w * (d + mu[i])
    }) * g;
    let u14 = sum(&|i| phase[i] * alpha[i]) * (2.0 * b * g);
    let trailing = trailing_term(sq);
    let u22 = sum(&|i| phase[i] * (alpha[i] / mu[i]) * ((b2 * (d - mu[i]) - (d + mu[i])) * (g2 + mu[i] * (d - mu[i]))))
        + trailing;
    let u23 = -sum(&|i| phase[i] * (alpha[i] / mu[i]) * (b2 * (d - mu[i]) - g2 * (d + mu[i]))) - trailing;
    let u24 = -sum(&|i| phase[i] * alpha[i] * (d - mu[i])) * b;
    let u34 = u24;
    let u44 = -sum(&|i| phase[i] * alpha[i] * (2.0 * g2 + mu[i] * (d - mu[i])));

    let mut u = ComplexMatrix::zeros(ATOM_DIM);
    let entries = [
        [u11, u12, u12, u14],
        [u12, u22, u23, u24],
        [u12, u23, u22, u34],
        [u14, u24, u34, u44],
    ];
    for (i, row) in entries.iter().enumerate() {
        for (j, &z) in row.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Evolution on the truncated atoms ⊗ field space with a cached
/// eigendecomposition of the full Hamiltonian.
#[derive(Debug, Clone)]
pub struct FullEvolution {
    params: SystemParams,
    eig: HermitianEigensystem,
}

impl FullEvolution {
    pub fn new(params: &SystemParams) -> Result<Self> {
        let h = full_hamiltonian(params)?;
        Ok(Self {
            params: *params,
            eig: eig_hermitian(&h)?,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn operator(&self, tau: f64) -> ComplexMatrix {
        if tau == 0.0 {
            return ComplexMatrix::identity(self.eig.dim());
        }
        self.eig.evolution_operator(tau)
    }

    /// Evolves `initial` to `tau` and checks that the two highest Fock levels
    /// stay empty.
    pub fn evolve(&self, initial: &JointState, tau: f64) -> Result<JointState> {
        check_tau(tau)?;
        let fock_dim = self.params.fock_dim();
        if initial.fock_dim() != fock_dim {
            return Err(Error::DimensionMismatch {
                expected: fock_dim,
                actual: initial.fock_dim(),
            });
        }
        let amps = if tau == 0.0 {
            initial.amplitudes().to_vec()
        } else {
            self.eig.evolve_vector(tau, initial.amplitudes())
        };
        let state = JointState::from_vec(fock_dim, amps)?;
        for level in [fock_dim - 2, fock_dim - 1] {
            let amplitude = (0..ATOM_DIM)
                .map(|a| state.amplitude(a, level).norm())
                .fold(0.0, f64::max);
            if amplitude >= TRUNCATION_TOL {
                return Err(Error::TruncationLeak { level, amplitude });
            }
        }
        Ok(state)
    }
}

pub fn propagate_full(params: &SystemParams, tau: f64, initial: &JointState) -> Result<JointState> {
    FullEvolution::new(params)?.evolve(initial, tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Match,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    /// `U11` .. `U44`
    pub element: String,
    pub mode: ClosedFormMode,
    /// `None` when the closed form produced a non-finite value.
    pub max_deviation: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Culprit {
    /// The element is correct at `tau = 0`.
    None,
    /// The constant trailing term differs from the dark-state weight `+-1/2`.
    TrailingTerm,
    /// The trailing term is right; the time-dependent sum is not.
    TimeDependentSum,
    /// Non-finite evaluation (e.g. a vanishing root divides).
    NonFinite,
}

/// `tau = 0` diagnosis for `U22` and `U23`, whose closed forms end in a
/// time-independent term.
///
/// Exact evolution requires `U22(0) = 1` and `U23(0) = 0`. The dark state
/// `(|eg> - |ge>)/sqrt(2)` contributes `+1/2` and `-1/2` to these elements at
/// every time, so that is the value the trailing terms must take.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTimeFinding {
    pub element: String,
    pub trailing_term: Option<f64>,
    pub expected_trailing_term: f64,
    pub value_at_zero: Option<[f64; 2]>,
    pub expected_at_zero: f64,
    pub deviation: Option<f64>,
    pub culprit: Culprit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub delta: f64,
    pub n_photon: usize,
    pub mode: ClosedFormMode,
    pub tolerance: f64,
    pub tau_grid: Vec<f64>,
    /// `max |closed_form(0) - I|`, `None` if non-finite.
    pub identity_defect_at_zero: Option<f64>,
    pub records: Vec<ElementRecord>,
    pub zero_time: Vec<ZeroTimeFinding>,
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Compares the closed form against the spectral propagator on `tau_grid`,
/// element by element.
pub fn audit_closed_form(params: &SystemParams, tau_grid: &[f64], mode: ClosedFormMode) -> Result<AuditReport> {
    let sq = spectral_quantities(params)?;
    let mut worst = [[0.0f64; ATOM_DIM]; ATOM_DIM];
    for &tau in tau_grid {
        let oracle = propagate_spectral(params, tau)?.u;
        let cf = closed_form_matrix(&sq, tau, mode);
        for (i, row) in worst.iter_mut().enumerate() {
            for (j, w) in row.iter_mut().enumerate() {
                let dev = (cf[(i, j)] - oracle[(i, j)]).norm();
                // NaN must win over any finite deviation
                *w = if dev.is_nan() || w.is_nan() {
                    f64::NAN
                } else {
                    w.max(dev)
                };
            }
        }
    }

    let mut records = Vec::with_capacity(ATOM_DIM * ATOM_DIM);
    for (i, row) in worst.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            let max_deviation = finite_or_none(w);
            let verdict = match max_deviation {
                Some(d) if d <= AUDIT_TOL => Verdict::Match,
                _ => Verdict::Mismatch,
            };
            records.push(ElementRecord {
                element: format!("U{}{}", i + 1, j + 1),
                mode,
                max_deviation,
                verdict,
            });
        }
    }

    let at_zero = closed_form_matrix(&sq, 0.0, mode);
    let identity_defect_at_zero = finite_or_none(at_zero.max_abs_diff(&ComplexMatrix::identity(ATOM_DIM)));
    let trailing = trailing_term(&sq);
    let zero_time = [("U22", (1, 1), 1.0, 0.5), ("U23", (1, 2), 0.0, -0.5)]
        .into_iter()
        .map(|(name, idx, expected_at_zero, expected_trailing)| {
            let signed_trailing = if name == "U22" { trailing } else { -trailing };
            let value = at_zero[idx];
            let finite = value.re.is_finite() && value.im.is_finite();
            let deviation = finite.then(|| (value - expected_at_zero).norm());
            let culprit = match (deviation, finite_or_none(signed_trailing)) {
                (None, _) | (_, None) => Culprit::NonFinite,
                (Some(d), _) if d <= AUDIT_TOL => Culprit::None,
                (Some(_), Some(t)) if (t - expected_trailing).abs() > AUDIT_TOL => Culprit::TrailingTerm,
                _ => Culprit::TimeDependentSum,
            };
            ZeroTimeFinding {
                element: name.to_string(),
                trailing_term: finite_or_none(signed_trailing),
                expected_trailing_term: expected_trailing,
                value_at_zero: finite.then_some([value.re, value.im]),
                expected_at_zero,
                deviation,
                culprit,
            }
        })
        .collect();

    Ok(AuditReport {
        delta: params.delta(),
        n_photon: params.n_photon(),
        mode,
        tolerance: AUDIT_TOL,
        tau_grid: tau_grid.to_vec(),
        identity_defect_at_zero,
        records,
        zero_time,
    })
}

impl AuditReport {
    pub fn record(&self, element: &str) -> Option<&ElementRecord> {
        self.records.iter().find(|r| r.element == element)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &ElementRecord> {
        self.records.iter().filter(|r| r.verdict == Verdict::Mismatch)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("audit report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_table(&self) -> String {
        let fmt_opt = |x: Option<f64>| x.map_or_else(|| "non-finite".to_string(), |v| format!("{v:.3e}"));
        let mut out = String::new();
        let grid = match (self.tau_grid.first(), self.tau_grid.last()) {
            (Some(a), Some(b)) => format!("{} points in [{a}, {b}]", self.tau_grid.len()),
            _ => "empty".to_string(),
        };
        let _ = writeln!(
            out,
            "closed-form audit: delta={} n={} mode={} tol={:e} tau grid: {grid}",
            self.delta, self.n_photon, self.mode, self.tolerance
        );
        let _ = writeln!(out, "{:<8}{:<11}{:>14}  verdict", "element", "mode", "max_dev");
        for r in &self.records {
            let verdict = match r.verdict {
                Verdict::Match => "match",
                Verdict::Mismatch => "mismatch",
            };
            let _ = writeln!(
                out,
                "{:<8}{:<11}{:>14}  {verdict}",
                r.element,
                r.mode.to_string(),
                fmt_opt(r.max_deviation)
            );
        }
        let _ = writeln!(
            out,
            "identity defect at tau=0: {}",
            fmt_opt(self.identity_defect_at_zero)
        );
        for f in &self.zero_time {
            let _ = writeln!(
                out,
                "{} at tau=0: trailing term {} (dark-state weight {}), deviation from {} is {}, culprit: {:?}",
                f.element,
                fmt_opt(f.trailing_term),
                f.expected_trailing_term,
                f.expected_at_zero,
                fmt_opt(f.deviation),
                f.culprit
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{initial_state, initial_state_from_vector, singlet, TwoAtomAmplitudes, GG};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn p(delta: f64, n: usize) -> SystemParams {
        SystemParams::new(delta, n).unwrap()
    }

    #[test]
    fn spectral_identity_at_zero() {
        let u = propagate_spectral(&p(0.3, 2), 0.0).unwrap();
        assert_eq!(u.u, ComplexMatrix::identity(4));
    }

    #[test]
    fn spectral_period_at_resonance() {
        let u = propagate_spectral(&p(0.0, 0), 2.0 * PI / 6f64.sqrt()).unwrap();
        assert!(u.u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-8);
    }

    #[test]
    fn forward_then_backward() {
        let params = p(0.7, 3);
        let a = propagate_spectral(&params, 2.3).unwrap().u;
        let b = propagate_spectral(&params, -2.3).unwrap().u;
        assert!((&a * &b).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn rejects_non_finite_tau() {
        assert!(propagate_spectral(&p(0.1, 0), f64::INFINITY).is_err());
    }

    #[test]
    fn closed_form_u14_vanishes_at_zero() {
        // sum (-1)^(i+1) alpha_i = 0 is a partial-fraction identity
        for delta in [0.1, 0.5, 1.0, 2.0, -0.4] {
            for n in [0, 1, 3, 10] {
                let cf = propagate_closed_form(&p(delta, n), 0.0, ClosedFormMode::Strict).unwrap();
                assert!(cf.u[(0, 3)].norm() < 1e-12, "delta={delta} n={n}");
            }
        }
    }

    #[test]
    fn closed_form_u12_equals_u13() {
        for mode in [ClosedFormMode::Strict, ClosedFormMode::Corrected] {
            let cf = propagate_closed_form(&p(0.5, 1), 1.7, mode).unwrap();
            assert_eq!(cf.u[(0, 1)], cf.u[(0, 2)]);
        }
    }

    #[test]
    fn full_space_confines_excited_state_to_ladder() {
        let params = p(0.5, 1);
        let evo = FullEvolution::new(&params).unwrap();
        let init = initial_state(&TwoAtomAmplitudes::excited(), &params).unwrap();
        let idx = subspace_indices(&params);
        for tau in [0.3, 1.0, 4.2, 9.9] {
            let s = evo.evolve(&init, tau).unwrap();
            for (k, z) in s.amplitudes().iter().enumerate() {
                if !idx.contains(&k) {
                    assert!(z.norm() < 1e-12);
                }
            }
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn vacuum_ground_state_is_stationary() {
        let params = p(0.8, 0);
        let init = initial_state(&TwoAtomAmplitudes::ground(), &params).unwrap();
        for tau in [0.5, 3.0, 7.0] {
            let s = propagate_full(&params, tau, &init).unwrap();
            assert!((s.amplitude(GG, 0).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_leak_detected() {
        let params = p(0.0, 0);
        let mut near_top = JointState::zeros(params.fock_dim());
        near_top.set(0, params.fock_cutoff() - 2, C64::new(1.0, 0.0));
        let err = propagate_full(&params, 1.0, &near_top).unwrap_err();
        assert!(matches!(err, Error::TruncationLeak { .. }));
    }

    #[test]
    fn dark_state_populations_constant() {
        let params = p(0.4, 3);
        let init = initial_state_from_vector(&singlet(), &params).unwrap();
        let s = propagate_full(&params, 5.0, &init).unwrap();
        for (a, b) in s.amplitudes().iter().zip(init.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn audit_report_shape_and_json() {
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let report = audit_closed_form(&p(0.5, 0), &grid, ClosedFormMode::Strict).unwrap();
        assert_eq!(report.records.len(), 16);
        assert_eq!(report.record("U11").unwrap().verdict, Verdict::Mismatch);
        let back = AuditReport::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);
        assert!(report.to_table().contains("U44"));
    }

    #[test]
    fn audit_corrected_first_row() {
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let report = audit_closed_form(&p(0.5, 0), &grid, ClosedFormMode::Corrected).unwrap();
        for e in ["U11", "U12", "U13", "U14"] {
            let r = report.record(e).unwrap();
            assert!(r.max_deviation.unwrap() < 1e-8, "{e}: {r:?}");
        }
    }

    #[test]
    fn trailing_terms_are_dark_state_halves() {
        // mu1 mu2 mu3 = -2 delta (beta^2 - gamma^2), so the trailing term is exactly 1/2
        for delta in [0.1, 0.5, 1.0] {
            for n in [0, 3] {
                let sq = crate::model::spectral_quantities(&p(delta, n)).unwrap();
                assert!((trailing_term(&sq) - 0.5).abs() < 1e-12);
            }
        }
        let report = audit_closed_form(&p(0.5, 0), &[0.0], ClosedFormMode::Corrected).unwrap();
        let u22 = &report.zero_time[0];
        let u23 = &report.zero_time[1];
        assert_eq!(u23.culprit, Culprit::None);
        assert_eq!(u22.culprit, Culprit::TimeDependentSum);
    }

    proptest! {
        #[test]
        fn semigroup(delta in -2.0f64..2.0, n in 0usize..6, t1 in -5.0f64..5.0, t2 in -5.0f64..5.0) {
            let params = p(delta, n);
            let a = propagate_spectral(&params, t1).unwrap().u;
            let b = propagate_spectral(&params, t2).unwrap().u;
            let ab = propagate_spectral(&params, t1 + t2).unwrap().u;
            prop_assert!((&a * &b).max_abs_diff(&ab) < 1e-9);
        }

        #[test]
        fn atom_exchange_symmetry(delta in -2.0f64..2.0, n in 0usize..6, tau in -10.0f64..10.0) {
            let u = propagate_spectral(&p(delta, n), tau).unwrap().u;
            prop_assert!(u.permuted(&[0, 2, 1, 3]).max_abs_diff(&u) < 1e-10);
        }

        #[test]
        fn dark_column(delta in -2.0f64..2.0, n in 0usize..6, tau in -10.0f64..10.0) {
            let u = propagate_spectral(&p(delta, n), tau).unwrap().u;
            let v = singlet();
            let out = u.mul_vec(&v);
            for (a, b) in out.iter().zip(v.iter()) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }
    }
}
