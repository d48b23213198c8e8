//! Two-qubit polarization states.
//!
//! Amplitudes are stored in the product basis ordered |HH⟩, |HV⟩, |VH⟩,
//! |VV⟩, where the first letter is photon 1 (Alice) and the second photon 2
//! (Bob).  The module provides the named states used throughout the crate:
//!
//! - Φ⁺      = (|HH⟩ + |VV⟩)/√2
//! - Φ′⁺     = (|HH⟩ + i|VV⟩)/√2
//! - Ψ′⁺     = (|HV⟩ + i|VH⟩)/√2
//! - χ       = ½(|HH⟩ + i|HV⟩ − |VH⟩ + i|VV⟩) = (|H⟩|L⟩ − |V⟩|R⟩)/√2
//! - Φ(δ)    = (|HH⟩ + e^{iδ}|VV⟩)/√2, the quartz-phase interpolation with
//!   Φ(0) = Φ⁺ and Φ(π/2) = Φ′⁺.
//!
//! Density matrices support white-noise mixing ρ′ = (1−p)ρ + p·𝟙/4, which is
//! how detector noise enters the violation scans.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::C64;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGENVALUE_FLOOR: f64 = -1e-10;
const UNITARITY_TOL: f64 = 1e-10;

/// A normalized two-qubit state vector in the |HH⟩, |HV⟩, |VH⟩, |VV⟩ basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    amps: Vector4<C64>,
}

impl TwoQubitState {
    /// Builds a state from four amplitudes, normalizing them.
    ///
    /// Returns [`Error::ZeroNorm`] when the amplitudes are all (numerically)
    /// zero.
    pub fn new(amplitudes: [C64; 4]) -> Result<Self> {
        let v = Vector4::from_row_slice(&amplitudes);
        let norm = v.norm();
        if norm < 1e-14 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amps: v.map(|a| a / C64::from(norm)),
        })
    }

    /// Builds a state from real amplitudes, normalizing them.
    pub fn from_real(amplitudes: [f64; 4]) -> Result<Self> {
        Self::new(amplitudes.map(C64::from))
    }

    /// The four amplitudes in |HH⟩, |HV⟩, |VH⟩, |VV⟩ order.
    pub fn amplitudes(&self) -> [C64; 4] {
        [self.amps[0], self.amps[1], self.amps[2], self.amps[3]]
    }

    /// The amplitude vector.
    pub fn vector(&self) -> &Vector4<C64> {
        &self.amps
    }

    /// Inner product ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// JSON form: the basis ordering tag plus four `[re, im]` pairs.
    pub fn to_json(&self) -> Value {
        json!({
            "ordering": "HH,HV,VH,VV",
            "amplitudes": self.amplitudes().map(|a| [a.re, a.im]),
        })
    }

    /// Parses the JSON form produced by [`TwoQubitState::to_json`].
    pub fn from_json(value: &Value) -> Result<Self> {
        let ordering = value
            .get("ordering")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("state JSON lacks an `ordering` tag".into()))?;
        if ordering != "HH,HV,VH,VV" {
            return Err(Error::Parse(format!(
                "unsupported basis ordering `{ordering}`"
            )));
        }
        let amps = value
            .get("amplitudes")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("state JSON lacks `amplitudes`".into()))?;
        if amps.len() != 4 {
            return Err(Error::Parse(format!(
                "expected 4 amplitudes, found {}",
                amps.len()
            )));
        }
        let mut parsed = [C64::default(); 4];
        for (slot, entry) in parsed.iter_mut().zip(amps) {
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Parse("amplitude entries must be [re, im] pairs".into()))?;
            let re = pair[0]
                .as_f64()
                .ok_or_else(|| Error::Parse("non-numeric amplitude".into()))?;
            let im = pair[1]
                .as_f64()
                .ok_or_else(|| Error::Parse("non-numeric amplitude".into()))?;
            *slot = C64::new(re, im);
        }
        Self::new(parsed)
    }
}

/// The named states addressable by CLI tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedState {
    /// Φ⁺ = (|HH⟩ + |VV⟩)/√2.
    PhiPlus,
    /// Φ′⁺ = (|HH⟩ + i|VV⟩)/√2.
    PhiPrimePlus,
    /// Ψ′⁺ = (|HV⟩ + i|VH⟩)/√2.
    PsiPrimePlus,
    /// χ = ½(|HH⟩ + i|HV⟩ − |VH⟩ + i|VV⟩).
    Chi,
    /// Φ(δ) = (|HH⟩ + e^{iδ}|VV⟩)/√2.
    PhiDelta(f64),
}

impl NamedState {
    /// The state vector for this tag.
    pub fn state(&self) -> TwoQubitState {
        let r = FRAC_1_SQRT_2;
        let zero = C64::default;
        let amps = match *self {
            NamedState::PhiPlus => [C64::from(r), zero(), zero(), C64::from(r)],
            NamedState::PhiPrimePlus => [C64::from(r), zero(), zero(), C64::new(0.0, r)],
            NamedState::PsiPrimePlus => [zero(), C64::from(r), C64::new(0.0, r), zero()],
            NamedState::Chi => [
                C64::from(0.5),
                C64::new(0.0, 0.5),
                C64::from(-0.5),
                C64::new(0.0, 0.5),
            ],
            NamedState::PhiDelta(delta) => [
                C64::from(r),
                zero(),
                zero(),
                C64::from_polar(r, delta),
            ],
        };
        TwoQubitState::new(amps).expect("named states are normalized by construction")
    }

    /// The CLI tag for this state.
    pub fn label(&self) -> String {
        match self {
            NamedState::PhiPlus => "phi+".into(),
            NamedState::PhiPrimePlus => "phi'+".into(),
            NamedState::PsiPrimePlus => "psi'+".into(),
            NamedState::Chi => "chi".into(),
            NamedState::PhiDelta(delta) => format!("phi:delta={delta}"),
        }
    }
}

/// Parses a CLI state spec: a named tag (`phi+`, `phi'+`, `psi'+`, `chi`),
/// a quartz-phase state (`phi:delta=<angle>`), or raw amplitudes
/// (`raw:<a0>,<a1>,<a2>,<a3>` with 4 real or 8 interleaved re,im values).
pub fn parse_state(spec: &str) -> Result<TwoQubitState> {
    let s = spec.trim();
    match s {
        "phi+" => return Ok(NamedState::PhiPlus.state()),
        "phi'+" => return Ok(NamedState::PhiPrimePlus.state()),
        "psi'+" => return Ok(NamedState::PsiPrimePlus.state()),
        "chi" => return Ok(NamedState::Chi.state()),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("phi:delta=") {
        let delta = crate::angle::parse_angle(rest)?;
        return Ok(NamedState::PhiDelta(delta).state());
    }
    if let Some(rest) = s.strip_prefix("raw:") {
        let parts: Vec<f64> = rest
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad raw amplitude `{p}` in `{spec}`")))
            })
            .collect::<Result<_>>()?;
        let amps = match parts.len() {
            4 => [0, 1, 2, 3].map(|i| C64::from(parts[i])),
            8 => [0, 1, 2, 3].map(|i| C64::new(parts[2 * i], parts[2 * i + 1])),
            n => {
                return Err(Error::Parse(format!(
                    "raw state needs 4 real or 8 interleaved re,im values, found {n}"
                )))
            }
        };
        return TwoQubitState::new(amps);
    }
    Err(Error::Parse(format!(
        "unknown state spec `{spec}` (expected phi+, phi'+, psi'+, chi, phi:delta=<angle>, raw:...)"
    )))
}

/// A two-qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: Matrix4<C64>,
}

impl DensityMatrix {
    /// The pure-state density matrix |ψ⟩⟨ψ|.
    pub fn from_state(state: &TwoQubitState) -> Self {
        let v = state.vector();
        Self { m: v * v.adjoint() }
    }

    /// Validates an arbitrary matrix as a density matrix.
    ///
    /// Checks hermiticity and unit trace to 1e-12 and eigenvalues ≥ −1e-10.
    pub fn try_new(m: Matrix4<C64>) -> Result<Self> {
        let herm_dev = (m - m.adjoint()).camax();
        if herm_dev > HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "hermiticity deviation {herm_dev:.3e}"
            )));
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {trace} instead of 1"
            )));
        }
        let candidate = Self { m };
        if let Some(&min) = candidate
            .eigenvalues()
            .iter()
            .min_by(|a, b| a.total_cmp(b))
        {
            if min < EIGENVALUE_FLOOR {
                return Err(Error::InvalidDensityMatrix(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(candidate)
    }

    /// The underlying 4×4 matrix.
    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.m
    }

    /// Eigenvalues of the (Hermitian) matrix, descending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = self.m.clone_owned().symmetric_eigen();
        let mut vals = [0.0; 4];
        for (slot, v) in vals.iter_mut().zip(eig.eigenvalues.iter()) {
            *slot = *v;
        }
        vals.sort_by(|a, b| b.total_cmp(a));
        vals
    }

    /// White-noise mixing ρ′ = (1−p)ρ + p·𝟙/4 for p ∈ [0, 1].
    pub fn mix_with_white_noise(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                name: "noise fraction p",
                value: p,
                min: 0.0,
                max: 1.0,
            });
        }
        let identity = Matrix4::identity();
        Ok(Self {
            m: self.m.map(|e| e * C64::from(1.0 - p)) + identity.map(|e: C64| e * C64::from(p / 4.0)),
        })
    }
}

/// The pure-state density matrix for `state`; see [`DensityMatrix::from_state`].
pub fn density_matrix(state: &TwoQubitState) -> DensityMatrix {
    DensityMatrix::from_state(state)
}

/// Which photon of the pair a single-qubit operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Photon {
    /// Photon 1 (Alice's side, first basis letter).
    One,
    /// Photon 2 (Bob's side, second basis letter).
    Two,
}

/// Applies a single-qubit unitary to one photon of the pair.
///
/// Returns [`Error::NonUnitary`] when ‖U†U − 𝟙‖ exceeds 1e-10.
pub fn apply_single_qubit(
    state: &TwoQubitState,
    u: &Matrix2<C64>,
    photon: Photon,
) -> Result<TwoQubitState> {
    let deviation = (u.adjoint() * u - Matrix2::identity()).norm();
    if deviation > UNITARITY_TOL {
        return Err(Error::NonUnitary { deviation });
    }
    let identity = Matrix2::identity();
    let full = match photon {
        Photon::One => u.kronecker(&identity),
        Photon::Two => identity.kronecker(u),
    };
    let amps = full * state.vector();
    Ok(TwoQubitState { amps })
}

/// Fidelity |⟨a|b⟩|² between two normalized pure states.
pub fn fidelity(a: &TwoQubitState, b: &TwoQubitState) -> f64 {
    a.inner(b).norm_sqr()
}
