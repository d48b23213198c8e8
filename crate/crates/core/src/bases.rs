//! Measurement bases on the Poincaré–Bloch sphere.
//!
//! A polarization basis is an antipodal pair of points on the sphere with
//! |H⟩ at the north pole: the unit vector n̂ = (sinθ cosφ, sinθ sinφ, cosθ)
//! corresponds to the analyzer state
//!
//! |a⟩ = (cos(θ/2), e^{iφ} sin(θ/2)),   |a⊥⟩ = (sin(θ/2), −e^{iφ} cos(θ/2)),
//!
//! so θ = 0 is |H⟩, the equator holds the circular/diagonal states, and the
//! antipode (π−θ, φ+π) is the orthogonal analyzer.  Three great circles get
//! named parameterizations (by the Bloch angle t along the circle):
//!
//! - `Hd`: the linear bases through |H⟩ and |D⟩; polarizer angle α = t/2.
//! - `Hr`: the elliptical bases through |H⟩ and |L⟩ (ellipse axes fixed
//!   horizontal/vertical); t is the native angle θ and the ellipticity is
//!   tan(θ/2).
//! - `Dr`: the elliptical bases through |D⟩ and |L⟩ (axes along ±45°); t is
//!   the native angle φ and the ellipticity is tan(φ/2).
//! - `RotatedZ(φ_rot)` / `RotatedX(θ_rot)`: the hd circle conjugated by a
//!   rotation of the sphere about the z- or x-axis, interpolating
//!   hd → hr and hd → dr respectively.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Vector2, Vector3};

use crate::angle::parse_angle;
use crate::error::{Error, Result};
use crate::C64;

const ON_CIRCLE_TOL: f64 = 1e-10;

/// A point on the Poincaré–Bloch sphere, i.e. one analyzer state of a basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDirection {
    theta: f64,
    phi: f64,
}

impl MeasurementDirection {
    /// Builds a direction from polar angle θ ∈ [0, π] and azimuth φ
    /// (wrapped into [0, 2π)).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Parse("direction angles must be finite".into()));
        }
        if !(-1e-12..=PI + 1e-12).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                min: 0.0,
                max: PI,
            });
        }
        Ok(Self {
            theta: theta.clamp(0.0, PI),
            phi: wrap_tau(phi),
        })
    }

    /// The direction of a (not necessarily unit) Bloch vector.
    pub fn from_bloch(v: Vector3<f64>) -> Self {
        let r = v.norm();
        let theta = if r == 0.0 { 0.0 } else { (v.z / r).clamp(-1.0, 1.0).acos() };
        let phi = if v.x == 0.0 && v.y == 0.0 {
            0.0
        } else {
            wrap_tau(v.y.atan2(v.x))
        };
        Self { theta, phi }
    }

    /// Polar angle θ ∈ [0, π].
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Azimuth φ ∈ [0, 2π).
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The unit Bloch vector (sinθ cosφ, sinθ sinφ, cosθ).
    pub fn bloch_vector(&self) -> Vector3<f64> {
        let (st, ct) = (self.theta.sin(), self.theta.cos());
        let (sp, cp) = (self.phi.sin(), self.phi.cos());
        Vector3::new(st * cp, st * sp, ct)
    }

    /// The antipodal direction (π−θ, φ+π), the orthogonal analyzer state.
    pub fn antipode(&self) -> Self {
        Self {
            theta: PI - self.theta,
            phi: wrap_tau(self.phi + PI),
        }
    }

    /// The projector pair for this direction; see [`projector_pair`].
    pub fn projectors(&self) -> ProjectorPair {
        projector_pair(self)
    }
}

fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can return TAU itself when x is a tiny negative number.
    if r >= TAU {
        r - TAU
    } else {
        r
    }
}

/// The analyzer kets |a⟩ and |a⊥⟩ of a basis, in the (|H⟩, |V⟩) frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPair {
    /// |a⟩ = (cos(θ/2), e^{iφ} sin(θ/2)).
    pub ket_a: Vector2<C64>,
    /// |a⊥⟩ = (sin(θ/2), −e^{iφ} cos(θ/2)).
    pub ket_a_perp: Vector2<C64>,
}

impl ProjectorPair {
    /// Projector |a⟩⟨a|.
    pub fn projector_a(&self) -> Matrix2<C64> {
        &self.ket_a * self.ket_a.adjoint()
    }

    /// Projector |a⊥⟩⟨a⊥|.
    pub fn projector_a_perp(&self) -> Matrix2<C64> {
        &self.ket_a_perp * self.ket_a_perp.adjoint()
    }

    /// The dichotomic observable Â = |a⟩⟨a| − |a⊥⟩⟨a⊥| with outcomes ±1.
    pub fn observable(&self) -> Matrix2<C64> {
        self.projector_a() - self.projector_a_perp()
    }
}

/// The antipodal projector pair for a direction on the sphere.
pub fn projector_pair(direction: &MeasurementDirection) -> ProjectorPair {
    let half = direction.theta / 2.0;
    let (s, c) = (half.sin(), half.cos());
    let phase = C64::from_polar(1.0, direction.phi);
    ProjectorPair {
        ket_a: Vector2::new(C64::from(c), phase * C64::from(s)),
        ket_a_perp: Vector2::new(C64::from(s), -phase * C64::from(c)),
    }
}

/// The unit Bloch vector of a direction; see
/// [`MeasurementDirection::bloch_vector`].
pub fn bloch_vector(direction: &MeasurementDirection) -> Vector3<f64> {
    direction.bloch_vector()
}

/// A parameterized great circle of measurement bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreatCircle {
    /// Linear polarizations: Bloch plane through |H⟩ and |D⟩.
    Hd,
    /// Elliptical states with horizontal/vertical axes: plane through |H⟩
    /// and |L⟩.
    Hr,
    /// Elliptical states with ±45° axes: the equator through |D⟩ and |L⟩.
    Dr,
    /// The hd circle rotated about the z-axis; `RotatedZ(0)` is hd and
    /// `RotatedZ(π/2)` is hr, pointwise.
    RotatedZ(f64),
    /// The hd circle rotated about the x-axis, parameterized from |D⟩ so
    /// that `RotatedX(π/2)` is dr, pointwise.
    RotatedX(f64),
}

impl GreatCircle {
    /// The Bloch vector at circle parameter `t` (the angle along the circle).
    pub fn bloch_point(&self, t: f64) -> Vector3<f64> {
        let (s, c) = (t.sin(), t.cos());
        match *self {
            GreatCircle::Hd => Vector3::new(s, 0.0, c),
            GreatCircle::Hr => Vector3::new(0.0, s, c),
            GreatCircle::Dr => Vector3::new(c, s, 0.0),
            GreatCircle::RotatedZ(rot) => Vector3::new(s * rot.cos(), s * rot.sin(), c),
            GreatCircle::RotatedX(rot) => Vector3::new(c, s * rot.sin(), -s * rot.cos()),
        }
    }

    /// The direction at circle parameter `t`.
    pub fn point(&self, t: f64) -> MeasurementDirection {
        MeasurementDirection::from_bloch(self.bloch_point(t))
    }

    /// The direction at native parameter `x` (polarizer angle α for hd,
    /// θ for hr, φ for dr, plain t for the rotated families).
    pub fn point_native(&self, x: f64) -> MeasurementDirection {
        self.point(self.param_from_native(x))
    }

    /// The unit normal of the circle's plane.
    pub fn normal(&self) -> Vector3<f64> {
        match *self {
            GreatCircle::Hd => Vector3::new(0.0, 1.0, 0.0),
            GreatCircle::Hr => Vector3::new(1.0, 0.0, 0.0),
            GreatCircle::Dr => Vector3::new(0.0, 0.0, 1.0),
            GreatCircle::RotatedZ(rot) => Vector3::new(-rot.sin(), rot.cos(), 0.0),
            GreatCircle::RotatedX(rot) => Vector3::new(0.0, rot.cos(), rot.sin()),
        }
    }

    /// Name of the native parameter for reports and axis labels.
    pub fn native_parameter(&self) -> &'static str {
        match self {
            GreatCircle::Hd => "alpha",
            GreatCircle::Hr => "theta",
            GreatCircle::Dr => "phi",
            GreatCircle::RotatedZ(_) | GreatCircle::RotatedX(_) => "t",
        }
    }

    /// Full native-parameter range covering the circle once:
    /// [0, π] for hd (polarizer angle), [0, 2π] otherwise.
    pub fn native_range(&self) -> (f64, f64) {
        match self {
            GreatCircle::Hd => (0.0, PI),
            _ => (0.0, TAU),
        }
    }

    /// Circle parameter t for a native parameter value.
    pub fn param_from_native(&self, x: f64) -> f64 {
        match self {
            GreatCircle::Hd => 2.0 * x,
            _ => x,
        }
    }

    /// Native parameter value for a circle parameter t.
    pub fn native_from_param(&self, t: f64) -> f64 {
        match self {
            GreatCircle::Hd => t / 2.0,
            _ => t,
        }
    }

    /// CLI label: `hd`, `hr`, `dr`, `rotz:<angle>`, `rotx:<angle>`.
    pub fn label(&self) -> String {
        match self {
            GreatCircle::Hd => "hd".into(),
            GreatCircle::Hr => "hr".into(),
            GreatCircle::Dr => "dr".into(),
            GreatCircle::RotatedZ(rot) => format!("rotz:{rot}"),
            GreatCircle::RotatedX(rot) => format!("rotx:{rot}"),
        }
    }

    /// Parses a CLI circle label (angles accept π-fractions).
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        match s {
            "hd" => return Ok(GreatCircle::Hd),
            "hr" => return Ok(GreatCircle::Hr),
            "dr" => return Ok(GreatCircle::Dr),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("rotz:") {
            return Ok(GreatCircle::RotatedZ(parse_angle(rest)?));
        }
        if let Some(rest) = s.strip_prefix("rotx:") {
            return Ok(GreatCircle::RotatedX(parse_angle(rest)?));
        }
        Err(Error::Parse(format!(
            "unknown circle `{text}` (expected hd, hr, dr, rotz:<angle>, rotx:<angle>)"
        )))
    }
}

/// The direction on a great circle at circle parameter `t`.
pub fn circle_point(circle: GreatCircle, t: f64) -> MeasurementDirection {
    circle.point(t)
}

/// Signed ellipticity tan(t/2) for directions on the hr or dr circle.
///
/// `t` is the circle parameter recovered from the direction, so the upper
/// semicircle gives ε ∈ [0, ∞) (left-handed) and the lower one negative
/// values (right-handed).  Directions farther than 1e-10 from both circles
/// are rejected.
pub fn ellipticity(direction: &MeasurementDirection) -> Result<f64> {
    let v = direction.bloch_vector();
    if v.x.abs() < ON_CIRCLE_TOL {
        let t = wrap_tau(v.y.atan2(v.z));
        return Ok((t / 2.0).tan());
    }
    if v.z.abs() < ON_CIRCLE_TOL {
        let t = wrap_tau(v.y.atan2(v.x));
        return Ok((t / 2.0).tan());
    }
    Err(Error::NotOnEllipticityCircle {
        theta: direction.theta(),
        phi: direction.phi(),
    })
}

/// Rotation axis for [`rotation_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// SU(2) rotation matrices generating the great circles from |H⟩:
///
/// - `Axis::Y`: ((cos(θ/2), −sin(θ/2)), (sin(θ/2), cos(θ/2))) sweeps hd,
/// - `Axis::X`: ((cos(θ/2), −i sin(θ/2)), (−i sin(θ/2), cos(θ/2))) sweeps hr
///   (with the opposite handedness to the hr parameterization, so
///   `rotation_matrix(Axis::X, -θ)` lands on `circle_point(Hr, θ)`),
/// - `Axis::Z`: diag(e^{−iφ/2}, e^{iφ/2}) sweeps dr from |D⟩.
pub fn rotation_matrix(axis: Axis, angle: f64) -> Matrix2<C64> {
    let half = angle / 2.0;
    let (s, c) = (half.sin(), half.cos());
    match axis {
        Axis::Y => Matrix2::new(
            C64::from(c),
            C64::from(-s),
            C64::from(s),
            C64::from(c),
        ),
        Axis::X => Matrix2::new(
            C64::from(c),
            C64::new(0.0, -s),
            C64::new(0.0, -s),
            C64::from(c),
        ),
        Axis::Z => Matrix2::new(
            C64::from_polar(1.0, -half),
            C64::default(),
            C64::default(),
            C64::from_polar(1.0, half),
        ),
    }
}

/// Parses a CLI direction: `theta=<angle>,phi=<angle>`, or circle shorthand
/// `hd:<t>`, `hr:<t>`, `dr:<t>`, `rotz:<rot>:<t>`, `rotx:<rot>:<t>` with `t`
/// the circle parameter in radians (decimals or π-fractions).
pub fn parse_direction(text: &str) -> Result<MeasurementDirection> {
    let s = text.trim();
    if s.starts_with("theta=") {
        let mut theta = None;
        let mut phi = None;
        for part in s.split(',') {
            if let Some(v) = part.trim().strip_prefix("theta=") {
                theta = Some(parse_angle(v)?);
            } else if let Some(v) = part.trim().strip_prefix("phi=") {
                phi = Some(parse_angle(v)?);
            } else {
                return Err(Error::Parse(format!(
                    "unexpected component `{part}` in direction `{text}`"
                )));
            }
        }
        let theta =
            theta.ok_or_else(|| Error::Parse(format!("direction `{text}` lacks theta")))?;
        let phi = phi.ok_or_else(|| Error::Parse(format!("direction `{text}` lacks phi")))?;
        return MeasurementDirection::new(theta, phi);
    }
    let (label, t) = s
        .rsplit_once(':')
        .ok_or_else(|| Error::Parse(format!("unrecognized direction `{text}`")))?;
    let circle = GreatCircle::parse(label)?;
    Ok(circle.point(parse_angle(t)?))
}
