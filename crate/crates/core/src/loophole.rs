//! State-dependent detection probabilities layered on the instruction-set
//! model.
//!
//! A particle whose instruction string has a singleton letter is always
//! detected when the switch points at that letter, detected with probability
//! `p` at either doubled letter, and a particle with three equal letters is
//! detected with probability `q`. Under the uniform state distribution and a
//! uniformly random ordered different-setting pair, the unconditional
//! probability of "both detected and equal colors" is (p² + q²)/4, so any
//! (p, q) on the circle p² + q² = 1 reproduces the 1/4 equal-color rate of
//! the singlet table.
//!
//! Note the headline value is unconditional. Conditioning on double
//! detection gives (p² + q²)/(p² + 2p + q²) instead, ≈ 0.366 at
//! (p, q) = (√3/2, 1/2); [`both_detected_prob`] is exposed so callers can
//! form that quotient themselves.

use thiserror::Error;

use crate::lhv::{enumerate_states, lhv_color, InstructionState};
use crate::mermin::{Color, Switch};
use crate::scalar::Scalar;

/// Errors from detection-model construction.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoopholeError {
    /// Detection probabilities live in [0, 1].
    #[error("detection probability {name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
}

/// The pair of detection probabilities (p, q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionModel<T: Scalar> {
    p: T,
    q: T,
}

impl<T: Scalar> DetectionModel<T> {
    /// Validating constructor: both probabilities in [0, 1].
    pub fn new(p: T, q: T) -> Result<Self, LoopholeError> {
        for (name, value) in [("p", p), ("q", q)] {
            if value < T::zero() || value > T::one() {
                return Err(LoopholeError::OutOfRange {
                    name,
                    value: value.to_f64(),
                });
            }
        }
        Ok(DetectionModel { p, q })
    }

    /// Detection probability at a doubled-letter position.
    pub fn p(&self) -> T {
        self.p
    }

    /// Detection probability for three-equal-letter states.
    pub fn q(&self) -> T {
        self.q
    }
}

/// Classification of instruction states by letter multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateClass {
    /// Two positions share a letter, the third differs (six states).
    TwoEqual,
    /// All three positions share a letter (RRR and GGG).
    ThreeEqual,
}

/// The class of an instruction state.
pub fn state_class(state: InstructionState) -> StateClass {
    if state.count_of(Color::Red) == 0 || state.count_of(Color::Green) == 0 {
        StateClass::ThreeEqual
    } else {
        StateClass::TwoEqual
    }
}

/// Probability that a station holding `state` fires when its switch is at
/// `s`: 1 at a singleton letter, `p` at a doubled letter, `q` for
/// three-equal states.
pub fn detect_prob<T: Scalar>(state: InstructionState, s: Switch, m: &DetectionModel<T>) -> T {
    match state.count_of(state.letter(s)) {
        1 => T::one(),
        2 => m.p(),
        _ => m.q(),
    }
}

/// Unconditional probability that both stations fire and show equal colors,
/// under uniform states and a uniformly random ordered different-setting
/// pair: (p² + q²)/4.
pub fn equal_color_and_detected_prob<T: Scalar>(m: &DetectionModel<T>) -> T {
    (m.p() * m.p() + m.q() * m.q()) * T::from_ratio(1, 4)
}

/// Equal-color-and-detected probability conditional on the state class:
/// p²/3 for two-equal states, q² for three-equal states.
pub fn per_class_equal_color_prob<T: Scalar>(class: StateClass, m: &DetectionModel<T>) -> T {
    match class {
        StateClass::TwoEqual => m.p() * m.p() * T::from_ratio(1, 3),
        StateClass::ThreeEqual => m.q() * m.q(),
    }
}

/// Probability that both stations fire, uniform states and uniformly random
/// ordered different-setting pair: (q² + p² + 2p)/4.
pub fn both_detected_prob<T: Scalar>(m: &DetectionModel<T>) -> T {
    let two = T::from_ratio(2, 1);
    (m.q() * m.q() + m.p() * m.p() + two * m.p()) * T::from_ratio(1, 4)
}

/// Independent enumeration oracle for [`equal_color_and_detected_prob`]:
/// sums over the eight states, the six ordered different-setting pairs and
/// the four joint detection outcomes, keeping the mass where both stations
/// fire and the letters agree.
pub fn brute_force_equal_color<T: Scalar>(m: &DetectionModel<T>) -> T {
    let state_weight = T::from_ratio(1, 8);
    let pair_weight = T::from_ratio(1, 6);
    let mut total = T::zero();
    for state in enumerate_states() {
        for x in Switch::ALL {
            for y in Switch::ALL {
                if x == y {
                    continue;
                }
                let px = detect_prob(state, x, m);
                let py = detect_prob(state, y, m);
                for fired_x in [true, false] {
                    for fired_y in [true, false] {
                        let wx = if fired_x { px } else { T::one() - px };
                        let wy = if fired_y { py } else { T::one() - py };
                        let equal = lhv_color(state, x) == lhv_color(state, y);
                        if fired_x && fired_y && equal {
                            total = total + state_weight * pair_weight * wx * wy;
                        }
                    }
                }
            }
        }
    }
    total
}
