//! Jones-calculus model of the optical bench and a seeded Monte Carlo
//! coincidence counter.
//!
//! A projection onto an arbitrary polarization state is realized by a
//! quarter-wave plate and a half-wave plate followed by a polarizing beam
//! splitter that transmits |H⟩; [`projection_setting`] computes the two
//! waveplate angles for any analyzer direction.  State preparation covers
//! the phase family Φ(δ) = (|HH⟩ + e^{iδ}|VV⟩)/√2 and the idealized quartz
//! nulling procedure that tunes δ.  The Monte Carlo sampler draws
//! four-outcome coincidence counts from the Born probabilities and feeds
//! plug-in estimators for ⟨AB⟩ and S.

use nalgebra::Matrix2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::bases::{MeasurementDirection, ProjectorPair};
use crate::chsh::ChshSetting;
use crate::correlations::joint_probabilities;
use crate::states::{density_matrix, DensityMatrix, NamedState, TwoQubitState};
use crate::C64;

/// A polarization optic in the beam path, with its fast (or transmission)
/// axis measured from horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalElement {
    /// Linear polarizer transmitting along `angle`.
    Polarizer { angle: f64 },
    /// Half-wave plate, fast axis at `angle`.
    HalfWave { angle: f64 },
    /// Quarter-wave plate, fast axis at `angle`.
    QuarterWave { angle: f64 },
    /// Birefringent phase plate diag(1, e^{iδ}) acting in the H/V basis.
    QuartzPhase { delta: f64 },
}

fn rotation(angle: f64) -> Matrix2<C64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(C64::from(c), C64::from(-s), C64::from(s), C64::from(c))
}

/// The 2×2 Jones matrix of an element: J(angle) = R(angle)·J₀·R(−angle)
/// with J₀ the axis-aligned matrix — diag(1, i) for a quarter-wave plate
/// (fast axis horizontal), diag(1, −1) for a half-wave plate, diag(1, 0)
/// for a polarizer, diag(1, e^{iδ}) for the quartz plate.
pub fn jones_matrix(element: OpticalElement) -> Matrix2<C64> {
    let rotated = |angle: f64, j0: Matrix2<C64>| rotation(angle) * j0 * rotation(-angle);
    match element {
        OpticalElement::Polarizer { angle } => rotated(
            angle,
            Matrix2::new(
                C64::from(1.0),
                C64::default(),
                C64::default(),
                C64::default(),
            ),
        ),
        OpticalElement::HalfWave { angle } => rotated(
            angle,
            Matrix2::new(
                C64::from(1.0),
                C64::default(),
                C64::default(),
                C64::from(-1.0),
            ),
        ),
        OpticalElement::QuarterWave { angle } => rotated(
            angle,
            Matrix2::new(
                C64::from(1.0),
                C64::default(),
                C64::default(),
                C64::new(0.0, 1.0),
            ),
        ),
        OpticalElement::QuartzPhase { delta } => Matrix2::new(
            C64::from(1.0),
            C64::default(),
            C64::default(),
            C64::from_polar(1.0, delta),
        ),
    }
}

/// Waveplate angles that route an analyzer direction onto the transmitted
/// port of a fixed horizontal polarizing beam splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionSetting {
    /// Fast-axis angle of the quarter-wave plate (first element hit).
    pub qwp_angle: f64,
    /// Fast-axis angle of the half-wave plate (second element).
    pub hwp_angle: f64,
}

impl ProjectionSetting {
    /// The combined Jones matrix HWP·QWP of the two-plate pipeline.
    pub fn pipeline(&self) -> Matrix2<C64> {
        jones_matrix(OpticalElement::HalfWave {
            angle: self.hwp_angle,
        }) * jones_matrix(OpticalElement::QuarterWave {
            angle: self.qwp_angle,
        })
    }
}

/// Computes waveplate angles mapping the analyzer state |a⟩ to |H⟩ (up to
/// phase), so the PBS transmits it with probability 1.
///
/// The quarter-wave plate at q turns |a⟩ into a linear state, the
/// half-wave plate at h rotates that onto horizontal: with Bloch components
/// (x, y, z), 2q = atan2(x, z), 2u = atan2(−y, √(1−y²)), h = (u + q)/2.
/// For a linear state at polarizer angle α this reduces to (q, h) = (α, α/2).
pub fn projection_setting(direction: &MeasurementDirection) -> ProjectionSetting {
    let v = direction.bloch_vector();
    let two_q = f64::atan2(v.x, v.z);
    let two_u = f64::atan2(-v.y, (1.0 - v.y * v.y).max(0.0).sqrt());
    ProjectionSetting {
        qwp_angle: 0.5 * two_q,
        hwp_angle: 0.25 * (two_u + two_q),
    }
}

/// The phase family Φ(δ) = (|HH⟩ + e^{iδ}|VV⟩)/√2 produced by the source;
/// δ=0 is Φ⁺ and δ=π/2 is Φ′⁺.
pub fn prepare_phi_delta(delta: f64) -> TwoQubitState {
    NamedState::PhiDelta(delta).state()
}

/// Which state the quartz-plate nulling aims for, i.e. which joint
/// projection is driven to a minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuartzTarget {
    /// Null the |D⟩|A⟩ coincidences; the minimum sits at δ = 0 (Φ⁺).
    PhiPlus,
    /// Null the |D⟩|R⟩ coincidences; the minimum sits at δ = π/2 (Φ′⁺).
    PhiPrimePlus,
}

impl QuartzTarget {
    fn nulled_projection(&self) -> (ProjectorPair, ProjectorPair) {
        use std::f64::consts::{FRAC_PI_2, PI};
        // Photon 1 goes onto |D⟩ for both targets; photon 2 onto |A⟩
        // (D's antipode) or |R⟩ (equator, azimuth 3π/2).
        let d = MeasurementDirection::new(FRAC_PI_2, 0.0).expect("valid direction");
        match self {
            QuartzTarget::PhiPlus => (d.projectors(), d.antipode().projectors()),
            QuartzTarget::PhiPrimePlus => {
                let r = MeasurementDirection::new(FRAC_PI_2, PI + FRAC_PI_2)
                    .expect("valid direction");
                (d.projectors(), r.projectors())
            }
        }
    }

    /// The joint probability being nulled, as a function of δ.
    pub fn probability(&self, delta: f64) -> f64 {
        let (pa, pb) = self.nulled_projection();
        let rho = density_matrix(&prepare_phi_delta(delta));
        joint_probabilities(&rho, &pa, &pb).p_ab
    }
}

/// Finds the quartz phase δ ∈ [0, 2π) minimizing the target's nulled
/// coincidence probability: a coarse scan followed by golden-section
/// refinement.  The probability at the returned δ is below `tolerance`
/// (the minima are exact zeros of smooth, cosine-shaped probabilities).
pub fn tune_quartz_phase(target: QuartzTarget, tolerance: f64) -> f64 {
    use std::f64::consts::TAU;
    debug_assert!(tolerance > 0.0);
    let f = |delta: f64| target.probability(delta);

    const COARSE: usize = 256;
    let mut best = (f(0.0), 0.0);
    for i in 1..COARSE {
        let d = TAU * i as f64 / COARSE as f64;
        let p = f(d);
        if p < best.0 {
            best = (p, d);
        }
    }

    let half = TAU / COARSE as f64;
    let (mut lo, mut hi) = (best.1 - half, best.1 + half);
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > 1e-12 {
        if f1 <= f2 {
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
    let mut delta = 0.5 * (lo + hi);

    // Near the zero the probability is quadratic in δ and drops below the
    // floating-point noise of the Born traces, which stalls the line search
    // about 1e-8 short of the minimum.  One three-point parabola step fixes
    // that: the samples at ±h sit far above the noise floor, and for the
    // cosine-shaped nulling curves the parabola vertex is a near-exact
    // Newton step.
    let h = 1e-3;
    let (f_minus, f_mid, f_plus) = (f(delta - h), f(delta), f(delta + h));
    let curvature = f_plus - 2.0 * f_mid + f_minus;
    if curvature > 0.0 {
        delta -= 0.5 * h * (f_plus - f_minus) / curvature;
    }

    let delta = delta.rem_euclid(TAU);
    debug_assert!(
        f(delta) < tolerance,
        "nulled probability {} not below tolerance {tolerance}",
        f(delta)
    );
    delta
}

/// Four-outcome coincidence counts for one pair of analyzer settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoincidenceRecord {
    /// Counts in the (a, b) output pair.
    pub n_ab: u64,
    /// Counts in (a, b⊥).
    pub n_ab_perp: u64,
    /// Counts in (a⊥, b).
    pub n_aperp_b: u64,
    /// Counts in (a⊥, b⊥).
    pub n_aperp_bperp: u64,
    /// Total generated pairs; the four counts always sum to this.
    pub pairs_total: u64,
    /// The RNG seed that produced the record.
    pub seed: u64,
}

impl CoincidenceRecord {
    /// The four counts in (ab, ab⊥, a⊥b, a⊥b⊥) order.
    pub fn counts(&self) -> [u64; 4] {
        [self.n_ab, self.n_ab_perp, self.n_aperp_b, self.n_aperp_bperp]
    }
}

/// Derives a reproducible per-setting substream seed from a master seed and
/// a setting index (a splitmix-style 64-bit mix).
pub fn derive_stream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `pairs` photon pairs and sorts each into one of the four detector
/// coincidences with the Born probabilities of (ρ, a, b).  Lossless: the
/// four counts sum to `pairs`.  Deterministic for a given seed.
pub fn simulate_coincidences(
    rho: &DensityMatrix,
    a: &ProjectorPair,
    b: &ProjectorPair,
    pairs: u64,
    seed: u64,
) -> CoincidenceRecord {
    let jp = joint_probabilities(rho, a, b);
    let probs = jp.as_array().map(|p| p.max(0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Multinomial draw as a chain of conditional binomials.
    let mut counts = [0u64; 4];
    let mut remaining = pairs;
    let mut remaining_p: f64 = probs.iter().sum();
    for k in 0..3 {
        let fraction = if remaining_p > 1e-15 {
            (probs[k] / remaining_p).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let drawn = Binomial::new(remaining, fraction)
            .expect("fraction is a valid probability")
            .sample(&mut rng);
        counts[k] = drawn;
        remaining -= drawn;
        remaining_p -= probs[k];
    }
    counts[3] = remaining;

    CoincidenceRecord {
        n_ab: counts[0],
        n_ab_perp: counts[1],
        n_aperp_b: counts[2],
        n_aperp_bperp: counts[3],
        pairs_total: pairs,
        seed,
    }
}

/// Plug-in estimator for ⟨AB⟩ from counts:
/// value = (n_ab − n_ab⊥ − n_a⊥b + n_a⊥b⊥)/N, stderr = √((1 − value²)/N).
pub fn estimate_expectation(record: &CoincidenceRecord) -> (f64, f64) {
    let n = record.pairs_total as f64;
    let value = (record.n_ab as f64 - record.n_ab_perp as f64 - record.n_aperp_b as f64
        + record.n_aperp_bperp as f64)
        / n;
    let stderr = ((1.0 - value * value).max(0.0) / n).sqrt();
    (value, stderr)
}

/// Simulates the four CHSH settings at `pairs_per_setting` pairs each and
/// combines the estimates into S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′).
/// Each setting draws from its own substream derived from `seed`, so the
/// settings could be simulated in parallel; s_err is the quadrature sum of
/// the four standard errors.
pub fn simulate_s(
    rho: &DensityMatrix,
    setting: &ChshSetting,
    pairs_per_setting: u64,
    seed: u64,
) -> (f64, f64) {
    let combos = [
        (setting.a, setting.b, 1.0),
        (setting.a, setting.b_prime, -1.0),
        (setting.a_prime, setting.b, 1.0),
        (setting.a_prime, setting.b_prime, 1.0),
    ];
    let mut s_est = 0.0;
    let mut var = 0.0;
    for (index, (da, db, sign)) in combos.iter().enumerate() {
        let record = simulate_coincidences(
            rho,
            &da.projectors(),
            &db.projectors(),
            pairs_per_setting,
            derive_stream_seed(seed, index as u64),
        );
        let (value, stderr) = estimate_expectation(&record);
        s_est += sign * value;
        var += stderr * stderr;
    }
    (s_est, var.sqrt())
}

/// Per-setting simulation records along with the combined S estimate; the
/// expanded form of [`simulate_s`] used by reporting code.
pub fn simulate_s_records(
    rho: &DensityMatrix,
    setting: &ChshSetting,
    pairs_per_setting: u64,
    seed: u64,
) -> ([CoincidenceRecord; 4], f64, f64) {
    let combos = [
        (setting.a, setting.b),
        (setting.a, setting.b_prime),
        (setting.a_prime, setting.b),
        (setting.a_prime, setting.b_prime),
    ];
    let records = std::array::from_fn(|index| {
        let (da, db) = combos[index];
        simulate_coincidences(
            rho,
            &da.projectors(),
            &db.projectors(),
            pairs_per_setting,
            derive_stream_seed(seed, index as u64),
        )
    });
    let signs = [1.0, -1.0, 1.0, 1.0];
    let mut s_est = 0.0;
    let mut var = 0.0;
    for (record, sign) in records.iter().zip(signs) {
        let (value, stderr) = estimate_expectation(record);
        s_est += sign * value;
        var += stderr * stderr;
    }
    (records, s_est, var.sqrt())
}
