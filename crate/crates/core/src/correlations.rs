//! Joint measurement statistics for two-qubit states.
//!
//! The central object is the correlation tensor T with entries
//! T_ij = Tr[ρ (σ_i ⊗ σ_j)], from which every two-detector expectation
//! follows as ⟨AB⟩ = â·T·b̂ with â, b̂ the Bloch vectors of the analyzer
//! settings.  The same expectation is also available through the Born
//! probabilities P(a,b) − P(a,b⊥) − P(a⊥,b) + P(a⊥,b⊥), and — for the three
//! states Φ⁺, Φ′⁺, χ on the hd/hr/dr circles — as closed-form trigonometric
//! expressions; all routes agree to numerical precision.
//!
//! Pauli convention: σ_z has eigenvectors |H⟩ (+1) and |V⟩ (−1), σ_x has
//! |D⟩/|A⟩, σ_y has |L⟩/|R⟩, matching the sphere orientation with |H⟩ at the
//! north pole.

use nalgebra::{Matrix2, Matrix3, Matrix4};

use crate::bases::{GreatCircle, MeasurementDirection, ProjectorPair};
use crate::error::{Error, Result};
use crate::states::{DensityMatrix, NamedState};
use crate::C64;

/// σ_x, eigenvectors |D⟩ (+1) and |A⟩ (−1).
pub fn pauli_x() -> Matrix2<C64> {
    Matrix2::new(
        C64::default(),
        C64::from(1.0),
        C64::from(1.0),
        C64::default(),
    )
}

/// σ_y, eigenvectors |L⟩ (+1) and |R⟩ (−1).
pub fn pauli_y() -> Matrix2<C64> {
    Matrix2::new(
        C64::default(),
        C64::new(0.0, -1.0),
        C64::new(0.0, 1.0),
        C64::default(),
    )
}

/// σ_z, eigenvectors |H⟩ (+1) and |V⟩ (−1).
pub fn pauli_z() -> Matrix2<C64> {
    Matrix2::new(
        C64::from(1.0),
        C64::default(),
        C64::default(),
        C64::from(-1.0),
    )
}

/// The three Pauli matrices in (x, y, z) order.
pub fn pauli_basis() -> [Matrix2<C64>; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// The correlation tensor T_ij = Tr[ρ (σ_i ⊗ σ_j)], i, j ∈ {x, y, z}.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    t: Matrix3<f64>,
}

impl CorrelationMatrix {
    /// Computes the nine Pauli-pair traces of a density matrix.
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let paulis = pauli_basis();
        let mut t = Matrix3::zeros();
        for (i, si) in paulis.iter().enumerate() {
            for (j, sj) in paulis.iter().enumerate() {
                let trace = (rho.matrix() * si.kronecker(sj)).trace();
                debug_assert!(
                    trace.im.abs() < 1e-10,
                    "correlation trace should be real, got {trace}"
                );
                t[(i, j)] = trace.re;
            }
        }
        Self { t }
    }

    /// The 3×3 real tensor.
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.t
    }

    /// The expectation ⟨AB⟩ = â·T·b̂ for two analyzer directions.
    pub fn expectation(&self, a: &MeasurementDirection, b: &MeasurementDirection) -> f64 {
        (self.t * b.bloch_vector()).dot(&a.bloch_vector())
    }
}

/// The correlation tensor of ρ; see [`CorrelationMatrix::from_density`].
pub fn correlation_matrix(rho: &DensityMatrix) -> CorrelationMatrix {
    CorrelationMatrix::from_density(rho)
}

/// The expectation ⟨AB⟩ = â·T·b̂ computed through the correlation tensor.
pub fn expectation_tensor(
    rho: &DensityMatrix,
    a: &MeasurementDirection,
    b: &MeasurementDirection,
) -> f64 {
    correlation_matrix(rho).expectation(a, b)
}

/// Born-rule joint probabilities for one pair of analyzer settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointProbabilities {
    /// P(a, b): both photons transmitted.
    pub p_ab: f64,
    /// P(a, b⊥).
    pub p_ab_perp: f64,
    /// P(a⊥, b).
    pub p_aperp_b: f64,
    /// P(a⊥, b⊥).
    pub p_aperp_bperp: f64,
}

impl JointProbabilities {
    /// The four probabilities in (ab, ab⊥, a⊥b, a⊥b⊥) order.
    pub fn as_array(&self) -> [f64; 4] {
        [self.p_ab, self.p_ab_perp, self.p_aperp_b, self.p_aperp_bperp]
    }

    /// Sum of the four outcomes (1 for a normalized state).
    pub fn sum(&self) -> f64 {
        self.p_ab + self.p_ab_perp + self.p_aperp_b + self.p_aperp_bperp
    }
}

/// The four Born-rule traces Tr[ρ (Π ⊗ Π)] over the outcome pairs.
pub fn joint_probabilities(
    rho: &DensityMatrix,
    a: &ProjectorPair,
    b: &ProjectorPair,
) -> JointProbabilities {
    let born = |pa: &Matrix2<C64>, pb: &Matrix2<C64>| -> f64 {
        let joint: Matrix4<C64> = pa.kronecker(pb);
        (rho.matrix() * joint).trace().re
    };
    let (pa, pa_perp) = (a.projector_a(), a.projector_a_perp());
    let (pb, pb_perp) = (b.projector_a(), b.projector_a_perp());
    JointProbabilities {
        p_ab: born(&pa, &pb),
        p_ab_perp: born(&pa, &pb_perp),
        p_aperp_b: born(&pa_perp, &pb),
        p_aperp_bperp: born(&pa_perp, &pb_perp),
    }
}

/// The expectation P(a,b) − P(a,b⊥) − P(a⊥,b) + P(a⊥,b⊥).
///
/// Returns [`Error::NotNormalized`] when the four probabilities do not sum
/// to 1 within 1e-9.
pub fn expectation_probs(jp: &JointProbabilities) -> Result<f64> {
    let sum = jp.sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { sum });
    }
    Ok(jp.p_ab - jp.p_ab_perp - jp.p_aperp_b + jp.p_aperp_bperp)
}

/// The basis combinations with tabulated closed-form expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisPair {
    /// Both photons on the linear (hd) circle; angles are polarizer angles α.
    HdHd,
    /// Both photons on the hr circle; angles are the native θ.
    HrHr,
    /// Both photons on the dr circle; angles are the native φ.
    DrDr,
    /// Photon 1 on hd (angle α_a), photon 2 on hr (angle θ_b).
    HdHr,
}

impl BasisPair {
    /// The great circles measured by photons 1 and 2.
    pub fn circles(&self) -> (GreatCircle, GreatCircle) {
        match self {
            BasisPair::HdHd => (GreatCircle::Hd, GreatCircle::Hd),
            BasisPair::HrHr => (GreatCircle::Hr, GreatCircle::Hr),
            BasisPair::DrDr => (GreatCircle::Dr, GreatCircle::Dr),
            BasisPair::HdHr => (GreatCircle::Hd, GreatCircle::Hr),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            BasisPair::HdHd => "hd-hd",
            BasisPair::HrHr => "hr-hr",
            BasisPair::DrDr => "dr-dr",
            BasisPair::HdHr => "hd-hr",
        }
    }
}

/// Closed-form two-detector expectations for Φ⁺, Φ′⁺, and χ on the named
/// circle combinations.  Angles are in each circle's native parameter
/// (α for hd, θ for hr, φ for dr).
///
/// Returns [`Error::UnsupportedCombination`] for states outside the
/// twelve-entry table.
pub fn closed_form_expectation(
    state: NamedState,
    basis_pair: BasisPair,
    t_a: f64,
    t_b: f64,
) -> Result<f64> {
    use BasisPair::*;
    use NamedState::*;
    let value = match (state, basis_pair) {
        (PhiPlus, HdHd) => (2.0 * (t_a - t_b)).cos(),
        (PhiPrimePlus, HdHd) => (2.0 * t_a).cos() * (2.0 * t_b).cos(),
        (Chi, HdHd) => -(2.0 * t_a).sin() * (2.0 * t_b).cos(),
        (PhiPlus, HrHr) => (t_a + t_b).cos(),
        (PhiPrimePlus, HrHr) => t_a.cos() * t_b.cos(),
        (Chi, HrHr) => t_a.cos() * t_b.sin(),
        (PhiPlus, DrDr) => (t_a + t_b).cos(),
        (PhiPrimePlus, DrDr) => (t_a + t_b).sin(),
        (Chi, DrDr) => t_a.sin() * t_b.cos(),
        (PhiPlus, HdHr) => (2.0 * t_a).cos() * t_b.cos(),
        (PhiPrimePlus, HdHr) => (2.0 * t_a - t_b).cos(),
        (Chi, HdHr) => -(2.0 * t_a - t_b).sin(),
        (other, pair) => {
            return Err(Error::UnsupportedCombination {
                state: match other {
                    PsiPrimePlus => "psi'+",
                    PhiDelta(_) => "phi:delta",
                    _ => unreachable!("named states above are all matched"),
                },
                basis_pair: pair.label(),
            })
        }
    };
    Ok(value)
}

/// The standard CHSH correlation parameter E(α_a, α_b) for linear analyzers
/// on Φ⁺ — an alias of the hd-hd closed form, kept as a single code path.
pub fn e_correlation(alpha_a: f64, alpha_b: f64) -> f64 {
    closed_form_expectation(NamedState::PhiPlus, BasisPair::HdHd, alpha_a, alpha_b)
        .expect("the hd-hd Φ⁺ entry is always tabulated")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{density_matrix, TwoQubitState};
    use nalgebra::{Matrix4, Vector2};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, TAU};

    fn rho_named(state: NamedState) -> DensityMatrix {
        density_matrix(&state.state())
    }

    fn hd_alpha(alpha: f64) -> MeasurementDirection {
        GreatCircle::Hd.point_native(alpha)
    }

    #[test]
    fn pauli_eigenvector_conventions() {
        let h = Vector2::new(C64::from(1.0), C64::default());
        let d = Vector2::new(C64::from(0.5f64.sqrt()), C64::from(0.5f64.sqrt()));
        let l = Vector2::new(C64::from(0.5f64.sqrt()), C64::new(0.0, 0.5f64.sqrt()));
        assert!((pauli_z() * h - h).camax() < 1e-15);
        assert!((pauli_x() * d - d).camax() < 1e-15);
        assert!((pauli_y() * l - l).camax() < 1e-15);
    }

    #[test]
    fn correlation_matrix_of_product_and_bell_states() {
        let hh = TwoQubitState::from_real([1.0, 0.0, 0.0, 0.0]).unwrap();
        let t = correlation_matrix(&density_matrix(&hh));
        let expected = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!((t.matrix() - expected).norm() < 1e-12);

        let t = correlation_matrix(&rho_named(NamedState::PhiPlus));
        let expected = Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0);
        assert!((t.matrix() - expected).norm() < 1e-12);

        // Φ′⁺ swaps the x-y block; χ is the cyclic off-diagonal pattern.
        let t = correlation_matrix(&rho_named(NamedState::PhiPrimePlus));
        let expected = Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!((t.matrix() - expected).norm() < 1e-12);

        let t = correlation_matrix(&rho_named(NamedState::Chi));
        let expected = Matrix3::new(0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        assert!((t.matrix() - expected).norm() < 1e-12);
    }

    #[test]
    fn white_noise_zeroes_the_tensor() {
        let flat = rho_named(NamedState::PhiPlus)
            .mix_with_white_noise(1.0)
            .unwrap();
        assert!(correlation_matrix(&flat).matrix().norm() < 1e-12);
    }

    #[test]
    fn tensor_expectation_examples() {
        let rho = rho_named(NamedState::PhiPlus);
        let e = expectation_tensor(&rho, &hd_alpha(0.0), &hd_alpha(0.0));
        assert!((e - 1.0).abs() < 1e-12);
        let e = expectation_tensor(&rho, &hd_alpha(FRAC_PI_8), &hd_alpha(0.0));
        assert!((e - FRAC_PI_4.cos()).abs() < 1e-12);

        let chi = rho_named(NamedState::Chi);
        for alpha_a in [0.0, 0.3, 1.1] {
            let e = expectation_tensor(&chi, &hd_alpha(alpha_a), &hd_alpha(FRAC_PI_4));
            assert!(e.abs() < 1e-12, "α_a={alpha_a}");
        }
    }

    #[test]
    fn joint_probability_examples() {
        let rho = rho_named(NamedState::PhiPlus);
        let jp = joint_probabilities(
            &rho,
            &hd_alpha(0.0).projectors(),
            &hd_alpha(0.0).projectors(),
        );
        let expected = [0.5, 0.0, 0.0, 0.5];
        for (p, e) in jp.as_array().iter().zip(expected) {
            assert!((p - e).abs() < 1e-12);
        }

        let jp = joint_probabilities(
            &rho,
            &hd_alpha(0.0).projectors(),
            &hd_alpha(FRAC_PI_4).projectors(),
        );
        for p in jp.as_array() {
            assert!((p - 0.25).abs() < 1e-12);
        }

        let hh = density_matrix(&TwoQubitState::from_real([1.0, 0.0, 0.0, 0.0]).unwrap());
        let jp = joint_probabilities(
            &hh,
            &hd_alpha(0.0).projectors(),
            &hd_alpha(0.0).projectors(),
        );
        let expected = [1.0, 0.0, 0.0, 0.0];
        for (p, e) in jp.as_array().iter().zip(expected) {
            assert!((p - e).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_probs_examples_and_normalization_guard() {
        let perfect = JointProbabilities {
            p_ab: 0.5,
            p_ab_perp: 0.0,
            p_aperp_b: 0.0,
            p_aperp_bperp: 0.5,
        };
        assert_eq!(expectation_probs(&perfect).unwrap(), 1.0);

        let flat = JointProbabilities {
            p_ab: 0.25,
            p_ab_perp: 0.25,
            p_aperp_b: 0.25,
            p_aperp_bperp: 0.25,
        };
        assert_eq!(expectation_probs(&flat).unwrap(), 0.0);

        let rho = rho_named(NamedState::PhiPlus);
        let jp = joint_probabilities(
            &rho,
            &hd_alpha(FRAC_PI_8).projectors(),
            &hd_alpha(0.0).projectors(),
        );
        assert!((expectation_probs(&jp).unwrap() - FRAC_PI_4.cos()).abs() < 1e-12);

        let broken = JointProbabilities {
            p_ab: 0.5,
            p_ab_perp: 0.0,
            p_aperp_b: 0.0,
            p_aperp_bperp: 0.0,
        };
        assert!(matches!(
            expectation_probs(&broken),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn closed_form_examples() {
        let e = closed_form_expectation(NamedState::PhiPlus, BasisPair::HdHd, FRAC_PI_8, 0.0)
            .unwrap();
        assert!((e - FRAC_PI_4.cos()).abs() < 1e-15);

        let e = closed_form_expectation(
            NamedState::PhiPrimePlus,
            BasisPair::DrDr,
            FRAC_PI_4,
            FRAC_PI_4,
        )
        .unwrap();
        assert!((e - 1.0).abs() < 1e-15);

        let e =
            closed_form_expectation(NamedState::Chi, BasisPair::HdHr, 0.0, FRAC_PI_2).unwrap();
        assert!((e - 1.0).abs() < 1e-15);

        assert!(matches!(
            closed_form_expectation(NamedState::PsiPrimePlus, BasisPair::HdHd, 0.0, 0.0),
            Err(Error::UnsupportedCombination { .. })
        ));
        assert!(closed_form_expectation(NamedState::PhiDelta(0.3), BasisPair::DrDr, 0.0, 0.0)
            .is_err());
    }

    #[test]
    fn tensor_matches_closed_forms_on_grid() {
        let states = [NamedState::PhiPlus, NamedState::PhiPrimePlus, NamedState::Chi];
        let pairs = [
            BasisPair::HdHd,
            BasisPair::HrHr,
            BasisPair::DrDr,
            BasisPair::HdHr,
        ];
        for state in states {
            let rho = rho_named(state);
            let t = correlation_matrix(&rho);
            for pair in pairs {
                let (ca, cb) = pair.circles();
                for i in 0..7 {
                    for j in 0..7 {
                        let (a0, a1) = ca.native_range();
                        let (b0, b1) = cb.native_range();
                        let x = a0 + (a1 - a0) * i as f64 / 6.0;
                        let y = b0 + (b1 - b0) * j as f64 / 6.0;
                        let via_tensor =
                            t.expectation(&ca.point_native(x), &cb.point_native(y));
                        let closed = closed_form_expectation(state, pair, x, y).unwrap();
                        assert!(
                            (via_tensor - closed).abs() < 1e-10,
                            "{state:?} {pair:?} at ({x}, {y}): {via_tensor} vs {closed}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn e_alias_shares_the_closed_form_code_path() {
        for (a, b) in [(0.0, 0.1), (FRAC_PI_8, FRAC_PI_4), (1.0, 2.0)] {
            let direct =
                closed_form_expectation(NamedState::PhiPlus, BasisPair::HdHd, a, b).unwrap();
            assert_eq!(e_correlation(a, b), direct);
        }
    }

    #[test]
    fn phi_prime_plus_hd_expectation_factorizes() {
        let rho = rho_named(NamedState::PhiPrimePlus);
        let t = correlation_matrix(&rho);
        let e = |a: f64, b: f64| t.expectation(&hd_alpha(a), &hd_alpha(b));
        for i in 0..9 {
            for j in 0..9 {
                let a = i as f64 * PI / 8.0;
                let b = j as f64 * PI / 8.0;
                let lhs = e(a, b) * e(0.0, 0.0);
                let rhs = e(a, 0.0) * e(0.0, b);
                assert!((lhs - rhs).abs() < 1e-10, "({a}, {b})");
            }
        }
    }

    /// Independent Born-rule oracle for pure states: |⟨a|⟨b| |ψ⟩|² computed
    /// from raw amplitudes, bypassing the projector/trace machinery.
    fn born_amplitude_oracle(
        psi: &TwoQubitState,
        a: &Vector2<C64>,
        b: &Vector2<C64>,
    ) -> f64 {
        let amps = psi.amplitudes();
        let mut overlap = C64::default();
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                overlap += ai.conj() * bj.conj() * amps[2 * i + j];
            }
        }
        overlap.norm_sqr()
    }

    proptest! {
        #[test]
        fn three_expectation_routes_agree(
            amps in proptest::array::uniform8(-1.0f64..1.0),
            theta_a in 0.0..PI, phi_a in 0.0..TAU,
            theta_b in 0.0..PI, phi_b in 0.0..TAU,
        ) {
            prop_assume!(amps.iter().map(|x| x * x).sum::<f64>() > 1e-3);
            let psi = TwoQubitState::new([
                C64::new(amps[0], amps[1]),
                C64::new(amps[2], amps[3]),
                C64::new(amps[4], amps[5]),
                C64::new(amps[6], amps[7]),
            ]).unwrap();
            let rho = density_matrix(&psi);
            let a = MeasurementDirection::new(theta_a, phi_a).unwrap();
            let b = MeasurementDirection::new(theta_b, phi_b).unwrap();

            let via_tensor = expectation_tensor(&rho, &a, &b);
            prop_assert!(via_tensor.abs() <= 1.0 + 1e-10);

            let (pa, pb) = (a.projectors(), b.projectors());
            let via_probs = expectation_probs(&joint_probabilities(&rho, &pa, &pb)).unwrap();
            prop_assert!((via_tensor - via_probs).abs() < 1e-10);

            // Direct operator route Tr[(Â ⊗ B̂) ρ].
            let joint: Matrix4<C64> = pa.observable().kronecker(&pb.observable());
            let via_operator = (rho.matrix() * joint).trace().re;
            prop_assert!((via_tensor - via_operator).abs() < 1e-10);

            // Born-rule amplitude oracle for the (a, b) outcome.
            let p_ab = born_amplitude_oracle(&psi, &pa.ket_a, &pb.ket_a);
            let jp = joint_probabilities(&rho, &pa, &pb);
            prop_assert!((p_ab - jp.p_ab).abs() < 1e-10);
        }

        #[test]
        fn tensor_entries_and_singular_values_bounded(
            amps in proptest::array::uniform8(-1.0f64..1.0),
        ) {
            prop_assume!(amps.iter().map(|x| x * x).sum::<f64>() > 1e-3);
            let psi = TwoQubitState::new([
                C64::new(amps[0], amps[1]),
                C64::new(amps[2], amps[3]),
                C64::new(amps[4], amps[5]),
                C64::new(amps[6], amps[7]),
            ]).unwrap();
            let t = correlation_matrix(&density_matrix(&psi));
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!(t.matrix()[(i, j)].abs() <= 1.0 + 1e-10);
                }
            }
            let svd = t.matrix().svd(false, false);
            for sv in svd.singular_values.iter() {
                prop_assert!(*sv <= 1.0 + 1e-8);
            }
        }
    }
}
