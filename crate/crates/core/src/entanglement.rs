//! Negativity and state-class templates for the reduced two-atom state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{eig_hermitian, inner, partial_transpose, AtomDensityMatrix, ATOM_DIM, C64};

/// Partial-transpose spectrum and `N = sum |eig_i| - 1`.
///
/// `N` is zero for PPT (hence, for two qubits, separable) states and one for
/// maximally entangled states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityResult {
    pub value: f64,
    /// Ascending.
    pub pt_eigenvalues: [f64; 4],
}

pub fn negativity(rho: &AtomDensityMatrix) -> Result<NegativityResult> {
    let eig = eig_hermitian(&partial_transpose(rho))?;
    let mut pt_eigenvalues = [0.0; 4];
    pt_eigenvalues.copy_from_slice(eig.eigenvalues());
    let value = pt_eigenvalues.iter().map(|l| l.abs()).sum::<f64>() - 1.0;
    Ok(NegativityResult { value, pt_eigenvalues })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    Separable,
    Psi1BellLike,
    Psi2,
    Psi3WernerLike,
    Psi4,
    Psi5,
    MixedUnclassified,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 7] = [
        Self::Separable,
        Self::Psi1BellLike,
        Self::Psi2,
        Self::Psi3WernerLike,
        Self::Psi4,
        Self::Psi5,
        Self::MixedUnclassified,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Separable => "separable",
            Self::Psi1BellLike => "psi1_bell_like",
            Self::Psi2 => "psi2",
            Self::Psi3WernerLike => "psi3_werner_like",
            Self::Psi4 => "psi4",
            Self::Psi5 => "psi5",
            Self::MixedUnclassified => "mixed_unclassified",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown class label `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    /// Minimum dominant eigenvalue of rho for a template fit.
    pub purity_threshold: f64,
    /// Maximum `sqrt(1 - fidelity)` accepted for a template.
    pub residual_threshold: f64,
    /// Negativity below which the state is reported separable.
    pub separable_threshold: f64,
    /// Minimum normalized weight of each component of the two-component
    /// templates, so that e.g. `psi4` is not reported with `nu = 0`.
    pub min_component: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            purity_threshold: 0.9,
            residual_threshold: 0.05,
            separable_threshold: 0.01,
            min_component: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMatch {
    pub label: ClassLabel,
    /// Overlap of the dominant eigenvector with the reported template
    /// family; the dominant eigenvalue when no template applies.
    pub fidelity: f64,
    /// Moduli of the template coefficients after normalization, in the
    /// template's own parametrization (e.g. `eta`, `zeta`).
    pub template_params: Vec<(&'static str, f64)>,
    pub negativity: f64,
}

struct Template {
    label: ClassLabel,
    /// Orthonormal spanning vectors.
    basis: Vec<[C64; ATOM_DIM]>,
    /// Name and the factor converting the orthonormal coefficient into the
    /// template's own coefficient.
    params: Vec<(&'static str, f64)>,
    enforce_components: bool,
}

fn ray(v: [f64; 4]) -> [C64; 4] {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| C64::new(x / n, 0.0))
}

fn templates() -> Vec<Template> {
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    vec![
        Template {
            label: ClassLabel::Psi1BellLike,
            basis: vec![ray([0.0, 1.0, 1.0, 0.0])],
            params: vec![("mu", 1.0 / s2)],
            enforce_components: false,
        },
        Template {
            label: ClassLabel::Psi2,
            basis: vec![ray([1.0, 1.0, 1.0, 0.0])],
            params: vec![("mu1", 1.0 / s3)],
            enforce_components: false,
        },
        Template {
            label: ClassLabel::Psi3WernerLike,
            basis: vec![ray([1.0, 0.0, 0.0, 1.0]), ray([0.0, 1.0, 0.0, 0.0])],
            params: vec![("eta", 1.0 / s2), ("zeta", 1.0)],
            enforce_components: true,
        },
        Template {
            label: ClassLabel::Psi4,
            basis: vec![ray([1.0, 0.0, 0.0, 1.0]), ray([0.0, 1.0, 1.0, 0.0])],
            params: vec![("mu2", 1.0 / s2), ("nu", 1.0 / s2)],
            enforce_components: true,
        },
        Template {
            label: ClassLabel::Psi5,
            basis: vec![
                ray([1.0, 0.0, 0.0, 0.0]),
                ray([0.0, 0.0, 0.0, 1.0]),
                ray([0.0, 1.0, 1.0, 0.0]),
            ],
            params: vec![("chi1", 1.0), ("chi2", 1.0), ("chi3", 1.0 / s2)],
            enforce_components: false,
        },
    ]
}

/// Classifies with [`ClassifierConfig::default`].
pub fn classify(rho: &AtomDensityMatrix) -> Result<ClassMatch> {
    classify_with(rho, &ClassifierConfig::default())
}

/// Matches the dominant eigenvector of `rho` against the state-class
/// templates.
///
/// Separability (negativity below threshold) takes precedence. Otherwise,
/// if the dominant eigenvalue clears the purity threshold, the templates are
/// tried in order `psi1 .. psi5` and the first one whose least-squares
/// residual is below threshold wins. Fits are over complex coefficients, so
/// the result does not depend on the eigenvector's global phase.
pub fn classify_with(rho: &AtomDensityMatrix, config: &ClassifierConfig) -> Result<ClassMatch> {
    let neg = negativity(rho)?.value;
    let eig = eig_hermitian(rho.matrix())?;
    let top = eig.dim() - 1;
    let dominant_value = eig.eigenvalues()[top];
    let fallback = |label| ClassMatch {
        label,
        fidelity: dominant_value.clamp(0.0, 1.0),
        template_params: Vec::new(),
        negativity: neg,
    };

    if neg < config.separable_threshold {
        return Ok(fallback(ClassLabel::Separable));
    }
    if dominant_value < config.purity_threshold {
        return Ok(fallback(ClassLabel::MixedUnclassified));
    }

    let v = eig.eigenvector(top);
    for t in templates() {
        let coeffs: Vec<C64> = t.basis.iter().map(|b| inner(b, &v)).collect();
        let fidelity: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().min(1.0);
        let residual = (1.0 - fidelity).max(0.0).sqrt();
        if residual >= config.residual_threshold || fidelity == 0.0 {
            continue;
        }
        let weights: Vec<f64> = coeffs.iter().map(|c| c.norm() / fidelity.sqrt()).collect();
        if t.enforce_components && weights.iter().any(|&w| w < config.min_component) {
            continue;
        }
        let template_params = t
            .params
            .iter()
            .zip(&weights)
            .map(|(&(name, factor), &w)| (name, w * factor))
            .collect();
        return Ok(ClassMatch {
            label: t.label,
            fidelity,
            template_params,
            negativity: neg,
        });
    }
    Ok(fallback(ClassLabel::MixedUnclassified))
}

/// `p |Bell><Bell| + (1 - p) I/4` with `|Bell> = (|eg> + |ge>)/sqrt(2)`.
pub fn werner_state(p: f64) -> AtomDensityMatrix {
    let bell = ray([0.0, 1.0, 1.0, 0.0]);
    let mut m = crate::linalg::ComplexMatrix::projector(&bell).scale(C64::new(p, 0.0));
    for i in 0..ATOM_DIM {
        m[(i, i)] += C64::new((1.0 - p) / 4.0, 0.0);
    }
    AtomDensityMatrix::new(m).expect("Werner states are valid for p in [-1/3, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    fn pure(v: [f64; 4]) -> AtomDensityMatrix {
        AtomDensityMatrix::from_pure(&ray(v)).unwrap()
    }

    #[test]
    fn product_states_have_zero_negativity() {
        let (a, b) = ([0.6, 0.8], [0.28, 0.96]);
        let prod = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
        assert!(negativity(&pure(prod)).unwrap().value.abs() < 1e-12);
        assert!(negativity(&pure([1.0, 0.0, 0.0, 0.0])).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn singlet_is_maximal() {
        let n = negativity(&pure([0.0, 1.0, -1.0, 0.0])).unwrap();
        assert!((n.value - 1.0).abs() < 1e-12);
        assert!((n.pt_eigenvalues[0] + 0.5).abs() < 1e-12);
        assert!((n.pt_eigenvalues.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn werner_half() {
        let n = negativity(&werner_state(0.5)).unwrap();
        assert!((n.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn diagonal_states_are_ppt() {
        let d = ComplexMatrix::from_diagonal(&[0.4, 0.1, 0.3, 0.2].map(|x| C64::new(x, 0.0)));
        let n = negativity(&AtomDensityMatrix::new(d).unwrap()).unwrap();
        assert!(n.value.abs() < 1e-15);
    }

    #[test]
    fn bell_template() {
        let m = classify(&pure([0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_eq!(m.label, ClassLabel::Psi1BellLike);
        assert!((m.fidelity - 1.0).abs() < 1e-12);
        assert!((m.template_params[0].1 - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ee_plus_gg_is_psi5() {
        let m = classify(&pure([1.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(m.label, ClassLabel::Psi5);
        let chi3 = m.template_params.iter().find(|(n, _)| *n == "chi3").unwrap().1;
        assert!(chi3 < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_separable() {
        let m = classify(&AtomDensityMatrix::maximally_mixed()).unwrap();
        assert_eq!(m.label, ClassLabel::Separable);
        assert!((m.fidelity - 0.25).abs() < 1e-12);
    }

    #[test]
    fn entangled_but_mixed() {
        // Werner p = 0.8 is entangled but its top eigenvalue is 0.85
        let m = classify(&werner_state(0.8)).unwrap();
        assert_eq!(m.label, ClassLabel::MixedUnclassified);
    }

    #[test]
    fn other_templates() {
        assert_eq!(classify(&pure([1.0, 1.0, 1.0, 0.0])).unwrap().label, ClassLabel::Psi2);
        assert_eq!(
            classify(&pure([1.0, 0.7, 0.0, 1.0])).unwrap().label,
            ClassLabel::Psi3WernerLike
        );
        assert_eq!(classify(&pure([1.0, 0.4, 0.4, 1.0])).unwrap().label, ClassLabel::Psi4);
        assert_eq!(classify(&pure([1.0, 0.4, 0.4, 0.3])).unwrap().label, ClassLabel::Psi5);
        // antisymmetric part outside every template
        assert_eq!(
            classify(&pure([0.0, 1.0, -1.0, 0.5])).unwrap().label,
            ClassLabel::MixedUnclassified
        );
    }

    #[test]
    fn global_phase_invariance() {
        let v = ray([1.0, 0.4, 0.4, 1.0]);
        let phase = C64::from_polar(1.0, 1.234);
        let rotated = v.map(|z| z * phase);
        let a = classify(&AtomDensityMatrix::from_pure(&v).unwrap()).unwrap();
        let b = classify(&AtomDensityMatrix::from_pure(&rotated).unwrap()).unwrap();
        assert_eq!(a.label, b.label);
        assert!((a.fidelity - b.fidelity).abs() < 1e-12);
    }

    #[test]
    fn label_strings_round_trip() {
        for l in ClassLabel::ALL {
            assert_eq!(l.as_str().parse::<ClassLabel>().unwrap(), l);
        }
        assert!("psi6".parse::<ClassLabel>().is_err());
    }
}
