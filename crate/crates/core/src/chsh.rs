//! CHSH quantities: S = ⟨AB⟩ − ⟨AB′⟩ + ⟨A′B⟩ + ⟨A′B′⟩ and everything built
//! on top of it.
//!
//! Local hidden-variable models obey |S| ≤ 2; quantum mechanics allows up to
//! the Tsirelson bound 2√2.  This module evaluates S for arbitrary settings,
//! maps violation landscapes over two analyzer angles, scans one-dimensional
//! paths through a landscape, maximizes |S| over all four angles restricted
//! to a pair of great circles, and computes the state-intrinsic maximum
//! 2√(λ₁+λ₂) from the two largest eigenvalues of TᵀT.

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector3};

use crate::bases::{GreatCircle, MeasurementDirection};
use crate::correlations::{correlation_matrix, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::states::DensityMatrix;
use crate::TSIRELSON_BOUND;

/// The four analyzer directions of one CHSH measurement.
///
/// Degenerate (coincident) settings are allowed; they simply give |S| ≤ 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSetting {
    pub a: MeasurementDirection,
    pub a_prime: MeasurementDirection,
    pub b: MeasurementDirection,
    pub b_prime: MeasurementDirection,
}

impl ChshSetting {
    /// Builds a setting from native-parameter angles on two circles
    /// ((t_a, t_a′) on `circle_a`, (t_b, t_b′) on `circle_b`).
    pub fn on_circles(
        circle_a: GreatCircle,
        circle_b: GreatCircle,
        t_a: f64,
        t_a_prime: f64,
        t_b: f64,
        t_b_prime: f64,
    ) -> Self {
        Self {
            a: circle_a.point_native(t_a),
            a_prime: circle_a.point_native(t_a_prime),
            b: circle_b.point_native(t_b),
            b_prime: circle_b.point_native(t_b_prime),
        }
    }
}

fn s_from_tensor(
    t: &Matrix3<f64>,
    a: &Vector3<f64>,
    a_prime: &Vector3<f64>,
    b: &Vector3<f64>,
    b_prime: &Vector3<f64>,
) -> f64 {
    let tb = t * b;
    let tb_prime = t * b_prime;
    a.dot(&tb) - a.dot(&tb_prime) + a_prime.dot(&tb) + a_prime.dot(&tb_prime)
}

/// S = ⟨AB⟩ − ⟨AB′⟩ + ⟨A′B⟩ + ⟨A′B′⟩ evaluated through the correlation
/// tensor.
pub fn s_value(rho: &DensityMatrix, setting: &ChshSetting) -> f64 {
    s_value_from_matrix(&correlation_matrix(rho), setting)
}

/// Same as [`s_value`] but reusing a precomputed correlation tensor — the
/// grid and maximization routines call this in their inner loops.
pub fn s_value_from_matrix(t: &CorrelationMatrix, setting: &ChshSetting) -> f64 {
    s_from_tensor(
        t.matrix(),
        &setting.a.bloch_vector(),
        &setting.a_prime.bloch_vector(),
        &setting.b.bloch_vector(),
        &setting.b_prime.bloch_vector(),
    )
}

/// The conventional fixed first-detector angles for a circle: the native
/// origin and a quarter period, (0, π/4) in α for hd and (0, π/2) otherwise.
pub fn default_fixed_a(circle: GreatCircle) -> (f64, f64) {
    match circle {
        GreatCircle::Hd => (0.0, std::f64::consts::FRAC_PI_4),
        _ => (0.0, std::f64::consts::FRAC_PI_2),
    }
}

/// S sampled over the two second-detector angles with the first detector
/// fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    circle_a: GreatCircle,
    circle_b: GreatCircle,
    fixed_a: (f64, f64),
    axis1: Vec<f64>,
    axis2: Vec<f64>,
    s: DMatrix<f64>,
}

impl LandscapeGrid {
    /// The circle carrying the fixed first-detector settings.
    pub fn circle_a(&self) -> GreatCircle {
        self.circle_a
    }

    /// The circle whose native parameter spans both axes.
    pub fn circle_b(&self) -> GreatCircle {
        self.circle_b
    }

    /// The fixed (t_a, t_a′) pair in `circle_a`'s native parameter.
    pub fn fixed_a(&self) -> (f64, f64) {
        self.fixed_a
    }

    /// Sampled t_b values (rows).
    pub fn axis1(&self) -> &[f64] {
        &self.axis1
    }

    /// Sampled t_b′ values (columns).
    pub fn axis2(&self) -> &[f64] {
        &self.axis2
    }

    /// S at (row i = t_b, column j = t_b′).
    pub fn s_values(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// The grid extremum of largest magnitude, with its (t_b, t_b′) location.
    pub fn peak(&self) -> (f64, f64, f64) {
        let mut best: (f64, f64, f64) = (0.0, self.axis1[0], self.axis2[0]);
        for (i, &tb) in self.axis1.iter().enumerate() {
            for (j, &tbp) in self.axis2.iter().enumerate() {
                let s = self.s[(i, j)];
                if s.abs() > best.0.abs() + 1e-12 {
                    best = (s, tb, tbp);
                }
            }
        }
        best
    }
}

fn sample_axis(circle: GreatCircle, resolution: usize) -> Vec<f64> {
    let (lo, hi) = circle.native_range();
    (0..resolution)
        .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
        .collect()
}

/// Samples S over (t_b, t_b′) ∈ native range² at `resolution` points per
/// axis (endpoints included), the first detector fixed at (t_a, t_a′).
///
/// Returns [`Error::ResolutionTooSmall`] when `resolution < 2`.
pub fn landscape(
    rho: &DensityMatrix,
    circle_a: GreatCircle,
    circle_b: GreatCircle,
    t_a: f64,
    t_a_prime: f64,
    resolution: usize,
) -> Result<LandscapeGrid> {
    if resolution < 2 {
        return Err(Error::ResolutionTooSmall(resolution));
    }
    let t = correlation_matrix(rho);
    let a = circle_a.point_native(t_a).bloch_vector();
    let a_prime = circle_a.point_native(t_a_prime).bloch_vector();
    let axis1 = sample_axis(circle_b, resolution);
    let axis2 = axis1.clone();
    let b_vectors: Vec<Vector3<f64>> = axis1
        .iter()
        .map(|&x| circle_b.point_native(x).bloch_vector())
        .collect();
    let s = DMatrix::from_fn(resolution, resolution, |i, j| {
        let value = s_from_tensor(t.matrix(), &a, &a_prime, &b_vectors[i], &b_vectors[j]);
        assert!(
            value.abs() <= TSIRELSON_BOUND + 1e-9,
            "|S| exceeded the Tsirelson bound: {value}"
        );
        value
    });
    Ok(LandscapeGrid {
        circle_a,
        circle_b,
        fixed_a: (t_a, t_a_prime),
        axis1,
        axis2,
        s,
    })
}

/// A one-dimensional path t_b′ = slope·t_b + offset through a landscape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec {
    slope: f64,
    offset: f64,
    start: f64,
    end: f64,
    step: f64,
}

impl PathSpec {
    /// Builds a path; the affine coefficients must be finite and the step
    /// positive.
    pub fn new(slope: f64, offset: f64, start: f64, end: f64, step: f64) -> Result<Self> {
        if !slope.is_finite() || !offset.is_finite() || !start.is_finite() || !end.is_finite() {
            return Err(Error::Parse("path coefficients must be finite".into()));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::OutOfRange {
                name: "step",
                value: step,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        Ok(Self {
            slope,
            offset,
            start,
            end,
            step,
        })
    }

    /// A path with unit slope: t_b′ = t_b + offset.
    pub fn shifted(offset: f64, start: f64, end: f64, step: f64) -> Result<Self> {
        Self::new(1.0, offset, start, end, step)
    }

    /// The sampled t_b values (inclusive of both ends when the step divides
    /// the range).
    pub fn samples(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step).round() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }

    /// The partner angle for a given t_b.
    pub fn partner(&self, t_b: f64) -> f64 {
        self.slope * t_b + self.offset
    }
}

/// S along a path: the first detector fixed at (t_a, t_a′) on `circle_a`,
/// the second sweeping (t_b, slope·t_b + offset) on `circle_b`.  Returns
/// (t_b, S) pairs.
pub fn path_scan(
    rho: &DensityMatrix,
    circle_a: GreatCircle,
    circle_b: GreatCircle,
    fixed_a: (f64, f64),
    path: &PathSpec,
) -> Vec<(f64, f64)> {
    let t = correlation_matrix(rho);
    let a = circle_a.point_native(fixed_a.0).bloch_vector();
    let a_prime = circle_a.point_native(fixed_a.1).bloch_vector();
    path.samples()
        .into_iter()
        .map(|t_b| {
            let b = circle_b.point_native(t_b).bloch_vector();
            let b_prime = circle_b.point_native(path.partner(t_b)).bloch_vector();
            (t_b, s_from_tensor(t.matrix(), &a, &a_prime, &b, &b_prime))
        })
        .collect()
}

/// The state-intrinsic maximum of |S| over all projective settings:
/// 2√(λ₁+λ₂), λ₁ ≥ λ₂ the two largest eigenvalues of TᵀT.
pub fn horodecki_smax(rho: &DensityMatrix) -> f64 {
    let t = correlation_matrix(rho);
    let m = t.matrix().transpose() * t.matrix();
    let mut eigen: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigen.sort_by(|x, y| y.total_cmp(x));
    2.0 * (eigen[0].max(0.0) + eigen[1].max(0.0)).sqrt()
}

/// The maximum of |S| when both detector pairs are restricted to fixed
/// planes: 2·‖M‖_F with M the correlation tensor projected onto the two
/// circle planes.  This is the planar analogue of [`horodecki_smax`] and an
/// independent check on [`max_s_over_angles`].
pub fn planar_smax(rho: &DensityMatrix, circle_a: GreatCircle, circle_b: GreatCircle) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let t = correlation_matrix(rho);
    let ea = [circle_a.bloch_point(0.0), circle_a.bloch_point(FRAC_PI_2)];
    let eb = [circle_b.bloch_point(0.0), circle_b.bloch_point(FRAC_PI_2)];
    let m = Matrix2::from_fn(|i, j| ea[i].dot(&(t.matrix() * eb[j])));
    2.0 * (m.transpose() * m).trace().max(0.0).sqrt()
}

/// Result of a four-angle maximization on a circle pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxSearchResult {
    /// max |S| over the four angles.
    pub s_max: f64,
    /// The maximizing directions.
    pub setting: ChshSetting,
    /// The maximizing circle parameters (t_a, t_a′, t_b, t_b′).
    pub angles: [f64; 4],
}

const COARSE_POINTS: usize = 24;
const REFINE_STEP_TOL: f64 = 1e-7;

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Maximizes |S| over the four circle parameters (t_a, t_a′, t_b, t_b′):
/// an exhaustive coarse grid (24 points per angle over one full period)
/// followed by cyclic coordinate descent with golden-section line searches
/// until the largest per-cycle step falls below 1e-7 rad.  Among coarse
/// maxima equal within 1e-9 the lexicographically smallest angle tuple is
/// refined, which keeps the result reproducible.
pub fn max_s_over_angles(
    rho: &DensityMatrix,
    circle_a: GreatCircle,
    circle_b: GreatCircle,
) -> MaxSearchResult {
    max_s_from_matrix(&correlation_matrix(rho), circle_a, circle_b)
}

/// [`max_s_over_angles`] on a precomputed correlation tensor.
pub fn max_s_from_matrix(
    t: &CorrelationMatrix,
    circle_a: GreatCircle,
    circle_b: GreatCircle,
) -> MaxSearchResult {
    use std::f64::consts::TAU;
    let tm = t.matrix();
    let grid: Vec<f64> = (0..COARSE_POINTS)
        .map(|i| TAU * i as f64 / COARSE_POINTS as f64)
        .collect();
    let a_vecs: Vec<Vector3<f64>> = grid.iter().map(|&t| circle_a.bloch_point(t)).collect();
    let b_vecs: Vec<Vector3<f64>> = grid.iter().map(|&t| circle_b.bloch_point(t)).collect();
    let e = DMatrix::from_fn(COARSE_POINTS, COARSE_POINTS, |i, j| {
        a_vecs[i].dot(&(tm * b_vecs[j]))
    });

    let mut best = f64::NEG_INFINITY;
    let mut best_idx = [0usize; 4];
    for ia in 0..COARSE_POINTS {
        for iap in 0..COARSE_POINTS {
            for ib in 0..COARSE_POINTS {
                for ibp in 0..COARSE_POINTS {
                    let s = (e[(ia, ib)] - e[(ia, ibp)] + e[(iap, ib)] + e[(iap, ibp)]).abs();
                    if s > best + 1e-9 {
                        best = s;
                        best_idx = [ia, iap, ib, ibp];
                    }
                }
            }
        }
    }

    let mut x = best_idx.map(|i| grid[i]);
    let eval = |x: &[f64; 4]| {
        s_from_tensor(
            tm,
            &circle_a.bloch_point(x[0]),
            &circle_a.bloch_point(x[1]),
            &circle_b.bloch_point(x[2]),
            &circle_b.bloch_point(x[3]),
        )
        .abs()
    };
    let spacing = TAU / COARSE_POINTS as f64;
    let mut bracket = spacing;
    loop {
        let mut max_step: f64 = 0.0;
        for i in 0..4 {
            let (xi, _) = golden_max(
                |v| {
                    let mut trial = x;
                    trial[i] = v;
                    eval(&trial)
                },
                x[i] - bracket,
                x[i] + bracket,
                1e-10,
            );
            max_step = max_step.max((xi - x[i]).abs());
            x[i] = xi;
        }
        if max_step < REFINE_STEP_TOL {
            break;
        }
        bracket = (4.0 * max_step).clamp(1e-6, spacing);
    }

    let setting = ChshSetting {
        a: circle_a.point(x[0]),
        a_prime: circle_a.point(x[1]),
        b: circle_b.point(x[2]),
        b_prime: circle_b.point(x[3]),
    };
    MaxSearchResult {
        s_max: eval(&x),
        setting,
        angles: x,
    }
}

/// The great-circle families scanned against each other: each detector's
/// circle is the hd circle rotated about the z or x axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    /// Both circles rotated about z (hd → hr as the angle grows).
    Zz,
    /// Both circles rotated about x (hd → dr).
    Xx,
    /// Detector 1 rotated about z, detector 2 about x.
    Zx,
    /// Detector 1 rotated about x, detector 2 about z.
    Xz,
}

impl Panel {
    /// The circle pair at rotation angles (u, v).
    ///
    /// Detector 2's circle rotates in the opposite sense.  Photon 2's
    /// correlations mirror photon 1's in the circular (y) component — for
    /// Φ⁺, ⟨a ⊗ b⟩ = a_x b_x − a_y b_y + a_z b_z — so equal rotation angles
    /// mean equally correlated bases, and the (u = v) diagonal of a
    /// same-axis scan stays at the Tsirelson bound for Φ⁺ regardless of the
    /// absolute orientation.  The circle at −v is the same great circle as
    /// the one at π − v, so the family covered by the scan is unchanged.
    pub fn circles(&self, u: f64, v: f64) -> (GreatCircle, GreatCircle) {
        let z = GreatCircle::RotatedZ;
        let x = GreatCircle::RotatedX;
        match self {
            Panel::Zz => (z(u), z(-v)),
            Panel::Xx => (x(u), x(-v)),
            Panel::Zx => (z(u), x(-v)),
            Panel::Xz => (x(u), z(-v)),
        }
    }

    /// CLI label.
    pub fn label(&self) -> &'static str {
        match self {
            Panel::Zz => "zz",
            Panel::Xx => "xx",
            Panel::Zx => "zx",
            Panel::Xz => "xz",
        }
    }

    /// Parses `zz`, `xx`, `zx`, or `xz`.
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "zz" => Ok(Panel::Zz),
            "xx" => Ok(Panel::Xx),
            "zx" => Ok(Panel::Zx),
            "xz" => Ok(Panel::Xz),
            other => Err(Error::Parse(format!(
                "unknown panel `{other}` (expected zz, xx, zx, or xz)"
            ))),
        }
    }
}

/// max |S| over the four angles, tabulated over a grid of circle rotation
/// angles.
#[derive(Debug, Clone, PartialEq)]
pub struct CirclePairScan {
    panel: Panel,
    axis_a: Vec<f64>,
    axis_b: Vec<f64>,
    s_max: DMatrix<f64>,
}

impl CirclePairScan {
    pub fn panel(&self) -> Panel {
        self.panel
    }

    /// Rotation angles of detector 1's circle (rows).
    pub fn axis_a(&self) -> &[f64] {
        &self.axis_a
    }

    /// Rotation angles of detector 2's circle (columns).
    pub fn axis_b(&self) -> &[f64] {
        &self.axis_b
    }

    /// max |S| at (row i, column j).
    pub fn s_max(&self) -> &DMatrix<f64> {
        &self.s_max
    }
}

/// Tabulates [`max_s_over_angles`] over rotation angles (u, v) ∈ [0, π]²
/// (circle planes repeat with period π) at `resolution` points per axis.
///
/// Returns [`Error::ResolutionTooSmall`] when `resolution < 2`.
pub fn circle_pair_scan(
    rho: &DensityMatrix,
    panel: Panel,
    resolution: usize,
) -> Result<CirclePairScan> {
    use std::f64::consts::PI;
    if resolution < 2 {
        return Err(Error::ResolutionTooSmall(resolution));
    }
    let t = correlation_matrix(rho);
    let axis: Vec<f64> = (0..resolution)
        .map(|i| PI * i as f64 / (resolution - 1) as f64)
        .collect();
    let s_max = DMatrix::from_fn(resolution, resolution, |i, j| {
        let (ca, cb) = panel.circles(axis[i], axis[j]);
        max_s_from_matrix(&t, ca, cb).s_max
    });
    Ok(CirclePairScan {
        panel,
        axis_a: axis.clone(),
        axis_b: axis,
        s_max,
    })
}

/// The best circle pair within a panel's rotated-circle family: maximizes
/// the planar bound over the two rotation angles (coarse grid plus
/// coordinate descent), then runs the mandated four-angle search on the
/// winning pair.  Returns the search result and the rotation angles.
pub fn max_s_over_rotated_circles(
    rho: &DensityMatrix,
    panel: Panel,
) -> (MaxSearchResult, f64, f64) {
    use std::f64::consts::PI;
    let t = correlation_matrix(rho);
    let tm = t.matrix();
    let bound = |u: f64, v: f64| {
        use std::f64::consts::FRAC_PI_2;
        let (ca, cb) = panel.circles(u, v);
        let ea = [ca.bloch_point(0.0), ca.bloch_point(FRAC_PI_2)];
        let eb = [cb.bloch_point(0.0), cb.bloch_point(FRAC_PI_2)];
        let m = Matrix2::from_fn(|i, j| ea[i].dot(&(tm * eb[j])));
        (m.transpose() * m).trace().max(0.0).sqrt() * 2.0
    };

    const OUTER_COARSE: usize = 48;
    let mut best = f64::NEG_INFINITY;
    let mut uv = [0.0f64; 2];
    for i in 0..OUTER_COARSE {
        for j in 0..OUTER_COARSE {
            let u = PI * i as f64 / OUTER_COARSE as f64;
            let v = PI * j as f64 / OUTER_COARSE as f64;
            let s = bound(u, v);
            if s > best + 1e-9 {
                best = s;
                uv = [u, v];
            }
        }
    }
    let spacing = PI / OUTER_COARSE as f64;
    let mut bracket = spacing;
    loop {
        let mut max_step: f64 = 0.0;
        for i in 0..2 {
            let (xi, _) = golden_max(
                |w| {
                    let mut trial = uv;
                    trial[i] = w;
                    bound(trial[0], trial[1])
                },
                uv[i] - bracket,
                uv[i] + bracket,
                1e-10,
            );
            max_step = max_step.max((xi - uv[i]).abs());
            uv[i] = xi;
        }
        if max_step < REFINE_STEP_TOL {
            break;
        }
        bracket = (4.0 * max_step).clamp(1e-6, spacing);
    }

    let (ca, cb) = panel.circles(uv[0], uv[1]);
    (max_s_from_matrix(&t, ca, cb), uv[0], uv[1])
}
