//! Exact outcome statistics for a two-detector, three-setting device fed by
//! spin-singlet pairs.
//!
//! Each detector holds a Stern-Gerlach magnet whose orientation is selected
//! by a three-position switch (vertical, or tilted by ±120°), and reports one
//! of two lights. The joint color table for a pair of settings follows from
//! the relative magnet angle alone: the same-color mass is cos²(Δ/2), split
//! evenly between the two equal-color outcomes.
//!
//! Color convention: detector Y's color map is flipped relative to the raw
//! singlet spin sign, so equal settings give equal colors with certainty
//! while the raw spin outcomes are perfectly anticorrelated. The two views
//! are complementary: `same_color_prob` + `raw_singlet_same_outcome_prob`
//! equals one for every setting pair.

use std::ops::Sub;

use thiserror::Error;

use crate::scalar::{RealScalar, Scalar};

/// Errors from table construction and effect mixtures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MerminError {
    /// Mixture weights must sum to one.
    #[error("mixture weights must sum to 1 (got {sum})")]
    WeightSum { sum: f64 },
    /// Mixture weights must be nonnegative.
    #[error("mixture weight {index} is negative ({weight})")]
    NegativeWeight { index: usize, weight: f64 },
    /// Weight and probability lists must pair up.
    #[error("weight/probability length mismatch ({weights} vs {probs})")]
    LengthMismatch { weights: usize, probs: usize },
    /// A joint table must hold four probabilities summing to one.
    #[error("invalid probability table (sum deviates by {deviation})")]
    InvalidTable { deviation: f64 },
}

/// One of the three switch positions of a detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Switch {
    One,
    Two,
    Three,
}

impl Switch {
    /// All positions, in label order.
    pub const ALL: [Switch; 3] = [Switch::One, Switch::Two, Switch::Three];

    /// Numeric label, 1..=3.
    pub fn value(self) -> u8 {
        match self {
            Switch::One => 1,
            Switch::Two => 2,
            Switch::Three => 3,
        }
    }

    /// Zero-based index, 0..=2.
    pub fn index(self) -> usize {
        self.value() as usize - 1
    }

    /// Position with the given zero-based index.
    ///
    /// Panics if `index > 2`.
    pub fn from_index(index: usize) -> Switch {
        Switch::ALL[index]
    }

    /// Magnet orientation in whole degrees: 0, +120 or -120.
    ///
    /// The sign assignment for positions 2 and 3 is a convention; every
    /// derived statistic depends only on relative angles.
    pub fn angle_degrees(self) -> i32 {
        match self {
            Switch::One => 0,
            Switch::Two => 120,
            Switch::Three => -120,
        }
    }
}

impl std::fmt::Display for Switch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Light color reported by a detector.
///
/// The global spin convention: red encodes the +1 (spin-up) outcome, green
/// encodes -1 (spin-down).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Green,
}

impl Color {
    /// Both colors, in `R`, `G` order.
    pub const ALL: [Color; 2] = [Color::Red, Color::Green];

    /// Zero-based index: red 0, green 1.
    pub fn index(self) -> usize {
        match self {
            Color::Red => 0,
            Color::Green => 1,
        }
    }

    /// Single-letter form, `R` or `G`.
    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Green => 'G',
        }
    }
}

impl std::fmt::Display for Color {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Switch settings of the two detectors for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SettingPair {
    /// Setting of detector X.
    pub x: Switch,
    /// Setting of detector Y.
    pub y: Switch,
}

impl SettingPair {
    pub fn new(x: Switch, y: Switch) -> Self {
        SettingPair { x, y }
    }

    /// All nine ordered setting pairs, X-major.
    pub fn all() -> impl Iterator<Item = SettingPair> {
        (0..9).map(SettingPair::from_index)
    }

    /// Dense index in 0..9, X-major.
    pub fn index(self) -> usize {
        self.x.index() * 3 + self.y.index()
    }

    /// Pair with the given dense index.
    ///
    /// Panics if `index > 8`.
    pub fn from_index(index: usize) -> SettingPair {
        assert!(index < 9, "setting pair index out of range");
        SettingPair {
            x: Switch::from_index(index / 3),
            y: Switch::from_index(index % 3),
        }
    }

    /// True when both switches are in the same position.
    pub fn is_equal_settings(self) -> bool {
        self.x == self.y
    }

    /// The pair with the detectors interchanged.
    pub fn swapped(self) -> SettingPair {
        SettingPair {
            x: self.y,
            y: self.x,
        }
    }
}

impl std::fmt::Display for SettingPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.x, self.y)
    }
}

/// Detector-plane orientation of a Stern-Gerlach magnet, in degrees,
/// normalized to (-180, 180].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle<F: RealScalar> {
    degrees: F,
}

impl<F: RealScalar> Angle<F> {
    /// Normalizing constructor; any finite input is reduced modulo 360°.
    pub fn new(degrees: F) -> Self {
        let full = F::from_ratio(360, 1);
        let half = F::from_ratio(180, 1);
        let mut d = degrees % full;
        if d > half {
            d = d - full;
        } else if d <= -half {
            d = d + full;
        }
        Angle { degrees: d }
    }

    pub fn degrees(self) -> F {
        self.degrees
    }

    /// Half angle in radians, the argument of the correlation formulas.
    fn half_radians(self) -> F {
        (self.degrees / F::from_ratio(2, 1)).to_radians()
    }
}

impl<F: RealScalar> Sub for Angle<F> {
    type Output = Angle<F>;

    /// Normalized relative angle.
    fn sub(self, rhs: Angle<F>) -> Angle<F> {
        Angle::new(self.degrees - rhs.degrees)
    }
}

/// Magnet orientation selected by a switch position: 0°, +120° or -120°.
pub fn switch_angle<F: RealScalar>(s: Switch) -> Angle<F> {
    Angle::new(F::from(s.angle_degrees()).expect("small integer fits any float"))
}

/// Joint color distribution over the four outcomes of one setting pair.
///
/// Entries are indexed by (color at X, color at Y); they are nonnegative and
/// sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbTable<T: Scalar> {
    /// X-major entry order: RR, RG, GR, GG.
    entries: [T; 4],
}

impl<T: Scalar> ProbTable<T> {
    /// Validating constructor: all entries in [0, 1], sum equal to one
    /// within [`Scalar::tolerance`].
    pub fn new(rr: T, rg: T, gr: T, gg: T) -> Result<Self, MerminError> {
        let entries = [rr, rg, gr, gg];
        let mut sum = T::zero();
        for &e in &entries {
            if e < T::zero() || e > T::one() {
                return Err(MerminError::InvalidTable {
                    deviation: e.to_f64(),
                });
            }
            sum = sum + e;
        }
        let deviation = (sum - T::one()).abs();
        if deviation > T::tolerance() {
            return Err(MerminError::InvalidTable {
                deviation: deviation.to_f64(),
            });
        }
        Ok(ProbTable { entries })
    }

    /// Probability of the joint outcome (`x`, `y`).
    pub fn get(&self, x: Color, y: Color) -> T {
        self.entries[x.index() * 2 + y.index()]
    }

    /// Entries in RR, RG, GR, GG order.
    pub fn entries(&self) -> impl Iterator<Item = ((Color, Color), T)> + '_ {
        [
            (Color::Red, Color::Red),
            (Color::Red, Color::Green),
            (Color::Green, Color::Red),
            (Color::Green, Color::Green),
        ]
        .into_iter()
        .zip(self.entries.iter().copied())
    }

    /// Total mass on the equal-color outcomes RR and GG.
    pub fn same_color(&self) -> T {
        self.get(Color::Red, Color::Red) + self.get(Color::Green, Color::Green)
    }

    /// Table with the X and Y coordinates interchanged.
    pub fn transposed(&self) -> ProbTable<T> {
        ProbTable {
            entries: [
                self.entries[0],
                self.entries[2],
                self.entries[1],
                self.entries[3],
            ],
        }
    }
}

/// cos²(Δ/2) evaluated exactly for a relative angle that is a whole multiple
/// of 60 degrees, which covers every pair of switch orientations.
fn cos_sq_half_degrees<T: Scalar>(delta_degrees: i32) -> T {
    let reduced = delta_degrees.rem_euclid(360);
    match reduced {
        0 => T::one(),
        60 | 300 => T::from_ratio(3, 4),
        120 | 240 => T::from_ratio(1, 4),
        180 => T::zero(),
        _ => unreachable!("relative switch angle {reduced} is not a multiple of 60 degrees"),
    }
}

/// Joint color distribution predicted for a setting pair.
///
/// The same-color mass cos²(Δ/2) is split evenly between RR and GG, the rest
/// evenly between RG and GR. Equal settings give {1/2, 0, 0, 1/2}; different
/// settings give {1/8, 3/8, 3/8, 1/8}.
pub fn quantum_joint_probs<T: Scalar>(pair: SettingPair) -> ProbTable<T> {
    let delta = pair.x.angle_degrees() - pair.y.angle_degrees();
    let same = cos_sq_half_degrees::<T>(delta);
    let half = T::from_ratio(1, 2);
    let s = same * half;
    let d = (T::one() - same) * half;
    ProbTable::new(s, d, d, s).expect("masses are probabilities summing to 1")
}

/// Fixed joint table used as an independent cross-check of
/// [`quantum_joint_probs`]: {1/2, 0, 0, 1/2} on equal settings and
/// {1/8, 3/8, 3/8, 1/8} otherwise, written out rather than derived.
pub fn reference_joint_probs<T: Scalar>(pair: SettingPair) -> ProbTable<T> {
    let table = if pair.is_equal_settings() {
        [
            T::from_ratio(1, 2),
            T::zero(),
            T::zero(),
            T::from_ratio(1, 2),
        ]
    } else {
        [
            T::from_ratio(1, 8),
            T::from_ratio(3, 8),
            T::from_ratio(3, 8),
            T::from_ratio(1, 8),
        ]
    };
    ProbTable::new(table[0], table[1], table[2], table[3]).expect("reference masses sum to 1")
}

/// Probability that both detectors flash the same color: 1 for equal
/// settings, 1/4 otherwise.
pub fn same_color_prob<T: Scalar>(pair: SettingPair) -> T {
    quantum_joint_probs::<T>(pair).same_color()
}

/// Probability that the raw singlet spin outcomes along two arbitrary axes
/// agree: sin²(Δ/2), exactly zero at Δ = 0 (perfect anticorrelation).
pub fn raw_singlet_same_outcome_prob<F: RealScalar>(a: Angle<F>, b: Angle<F>) -> F {
    let delta = a - b;
    if delta.degrees() == F::zero() {
        return F::zero();
    }
    let s = delta.half_radians().sin();
    s * s
}

/// Observation probability of a mixture of effects: Σ wᵢ·pᵢ.
///
/// Weights must be nonnegative and sum to one within [`Scalar::tolerance`];
/// the two lists must have the same length. This realizes the randomized
/// effect built from two single-setting effects with weights 1/2 each.
pub fn mixture_effect_prob<T: Scalar>(weights: &[T], effect_probs: &[T]) -> Result<T, MerminError> {
    if weights.len() != effect_probs.len() {
        return Err(MerminError::LengthMismatch {
            weights: weights.len(),
            probs: effect_probs.len(),
        });
    }
    let mut sum = T::zero();
    for (index, &w) in weights.iter().enumerate() {
        if w < T::zero() {
            return Err(MerminError::NegativeWeight {
                index,
                weight: w.to_f64(),
            });
        }
        sum = sum + w;
    }
    if (sum - T::one()).abs() > T::tolerance() {
        return Err(MerminError::WeightSum { sum: sum.to_f64() });
    }
    Ok(weights
        .iter()
        .zip(effect_probs)
        .fold(T::zero(), |acc, (&w, &p)| acc + w * p))
}
