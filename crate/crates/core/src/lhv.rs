//! Deterministic instruction-set models: each particle pair carries one of
//! the eight three-letter color strings (RRR, RRG, ..., GGG), the letter at a
//! switch position being the color that position would produce.
//!
//! Both particles of a pair carry the same string, which is forced by the
//! equal-settings statistics. Over the six ordered different-setting pairs,
//! no distribution over strings can push the equal-color frequency below
//! 1/3, strictly above the 1/4 produced by [`crate::mermin`].

use thiserror::Error;

use crate::mermin::{Color, SettingPair, Switch};
use crate::scalar::Scalar;

/// Errors from distribution construction.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LhvError {
    /// Weights must sum to one.
    #[error("state weights must sum to 1 (got {sum})")]
    WeightSum { sum: f64 },
    /// Weights must be nonnegative.
    #[error("state weight for {state} is negative ({weight})")]
    NegativeWeight {
        state: InstructionState,
        weight: f64,
    },
}

/// A deterministic response rule: one color per switch position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstructionState {
    letters: [Color; 3],
}

impl InstructionState {
    pub const fn new(letters: [Color; 3]) -> Self {
        InstructionState { letters }
    }

    /// The color this rule produces for switch position `s`.
    pub fn letter(self, s: Switch) -> Color {
        self.letters[s.index()]
    }

    /// Dense index in 0..8 (R bit 0, G bit 1, first letter most significant).
    pub fn index(self) -> usize {
        self.letters.iter().fold(0, |acc, c| acc * 2 + c.index())
    }

    /// State with the given dense index.
    ///
    /// Panics if `index > 7`.
    pub fn from_index(index: usize) -> InstructionState {
        assert!(index < 8, "instruction state index out of range");
        let letter = |bit: usize| Color::ALL[(index >> bit) & 1];
        InstructionState::new([letter(2), letter(1), letter(0)])
    }

    /// Number of switch positions whose letter equals `color`.
    pub fn count_of(self, color: Color) -> usize {
        self.letters.iter().filter(|&&c| c == color).count()
    }
}

impl std::fmt::Display for InstructionState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in self.letters {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for InstructionState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = [Color::Red; 3];
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 3 {
            return Err(format!("expected three letters, got {s:?}"));
        }
        for (slot, c) in letters.iter_mut().zip(chars) {
            *slot = match c {
                'R' | 'r' => Color::Red,
                'G' | 'g' => Color::Green,
                other => return Err(format!("unexpected letter {other:?}")),
            };
        }
        Ok(InstructionState::new(letters))
    }
}

/// All eight instruction states, in dense-index order.
pub fn enumerate_states() -> [InstructionState; 8] {
    let mut states = [InstructionState::new([Color::Red; 3]); 8];
    for (i, slot) in states.iter_mut().enumerate() {
        *slot = InstructionState::from_index(i);
    }
    states
}

/// Color produced at a station holding `state` when its switch is at `s`.
pub fn lhv_color(state: InstructionState, s: Switch) -> Color {
    state.letter(s)
}

/// Probability distribution over the eight instruction states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDistribution<T: Scalar> {
    weights: [T; 8],
}

impl<T: Scalar> StateDistribution<T> {
    /// Validating constructor: nonnegative weights summing to one within
    /// [`Scalar::tolerance`]. Weights are indexed by
    /// [`InstructionState::index`].
    pub fn new(weights: [T; 8]) -> Result<Self, LhvError> {
        let mut sum = T::zero();
        for (i, &w) in weights.iter().enumerate() {
            if w < T::zero() {
                return Err(LhvError::NegativeWeight {
                    state: InstructionState::from_index(i),
                    weight: w.to_f64(),
                });
            }
            sum = sum + w;
        }
        if (sum - T::one()).abs() > T::tolerance() {
            return Err(LhvError::WeightSum { sum: sum.to_f64() });
        }
        Ok(StateDistribution { weights })
    }

    /// Equal weight 1/8 on every state.
    pub fn uniform() -> Self {
        StateDistribution {
            weights: [T::from_ratio(1, 8); 8],
        }
    }

    /// Equal weight 1/6 on the six two-equal-letter states, zero on RRR and
    /// GGG.
    pub fn uniform_two_equal() -> Self {
        let mut weights = [T::zero(); 8];
        for state in enumerate_states() {
            if state.count_of(Color::Red) != 0 && state.count_of(Color::Green) != 0 {
                weights[state.index()] = T::from_ratio(1, 6);
            }
        }
        StateDistribution { weights }
    }

    /// All mass on a single state.
    pub fn point_mass(state: InstructionState) -> Self {
        let mut weights = [T::zero(); 8];
        weights[state.index()] = T::one();
        StateDistribution { weights }
    }

    pub fn weight(&self, state: InstructionState) -> T {
        self.weights[state.index()]
    }

    /// (state, weight) pairs in dense-index order.
    pub fn iter(&self) -> impl Iterator<Item = (InstructionState, T)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (InstructionState::from_index(i), w))
    }
}

/// Number of ordered different-setting pairs (out of six) on which a state
/// shows the same letter at both positions.
fn agreeing_ordered_pairs(state: InstructionState) -> i64 {
    let mut agree = 0;
    for x in Switch::ALL {
        for y in Switch::ALL {
            if x != y && lhv_color(state, x) == lhv_color(state, y) {
                agree += 1;
            }
        }
    }
    agree
}

/// Probability of equal colors under a uniformly random ordered
/// different-setting pair, with both stations sharing one state drawn from
/// `d`.
pub fn equal_color_prob_diff_settings<T: Scalar>(d: &StateDistribution<T>) -> T {
    d.iter().fold(T::zero(), |acc, (state, w)| {
        acc + w * T::from_ratio(agreeing_ordered_pairs(state), 6)
    })
}

/// Minimum equal-color frequency on different settings and the states
/// attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T: Scalar> {
    /// The minimum over all state distributions: 1/3.
    pub minimum: T,
    /// The point masses attaining the minimum: the six two-equal states.
    pub achieving_states: Vec<InstructionState>,
}

/// Minimizes [`equal_color_prob_diff_settings`] over all distributions.
///
/// The objective is linear in the distribution, so the minimum over the
/// simplex is attained at a point mass; the eight vertices are enumerated.
pub fn mermin_lower_bound<T: Scalar>() -> BoundReport<T> {
    let values: Vec<(InstructionState, T)> = enumerate_states()
        .into_iter()
        .map(|state| {
            (
                state,
                equal_color_prob_diff_settings(&StateDistribution::<T>::point_mass(state)),
            )
        })
        .collect();
    let minimum = values
        .iter()
        .map(|&(_, v)| v)
        .fold(T::one(), |acc, v| if v < acc { v } else { acc });
    let achieving_states = values
        .into_iter()
        .filter(|&(_, v)| v == minimum)
        .map(|(state, _)| state)
        .collect();
    BoundReport {
        minimum,
        achieving_states,
    }
}

/// Checks that equal settings always give equal colors under the
/// shared-state model. Structurally true for every distribution; exposed as
/// an executable sanity check.
pub fn equal_settings_consistency<T: Scalar>(d: &StateDistribution<T>) -> bool {
    let mut prob = T::zero();
    for (state, w) in d.iter() {
        let mut agree = 0;
        for s in Switch::ALL {
            let pair = SettingPair::new(s, s);
            if lhv_color(state, pair.x) == lhv_color(state, pair.y) {
                agree += 1;
            }
        }
        prob = prob + w * T::from_ratio(agree, 3);
    }
    (prob - T::one()).abs() <= T::tolerance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;
    use proptest::prelude::*;

    fn state(s: &str) -> InstructionState {
        s.parse().unwrap()
    }

    #[test]
    fn enumeration_is_total_and_distinct() {
        let states = enumerate_states();
        assert_eq!(states.len(), 8);
        for (i, a) in states.iter().enumerate() {
            for b in &states[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert!(states.contains(&state("RRG")));
        assert!(states.contains(&state("GGG")));
    }

    #[test]
    fn letters_respond_to_switches() {
        assert_eq!(lhv_color(state("RRG"), Switch::Three), Color::Green);
        assert_eq!(lhv_color(state("RRG"), Switch::One), Color::Red);
        assert_eq!(lhv_color(state("GGG"), Switch::Two), Color::Green);
    }

    #[test]
    fn equal_color_prob_examples() {
        assert_eq!(
            equal_color_prob_diff_settings(&StateDistribution::<Rat>::uniform()),
            Rat::new(1, 2)
        );
        assert_eq!(
            equal_color_prob_diff_settings(&StateDistribution::<Rat>::uniform_two_equal()),
            Rat::new(1, 3)
        );
        assert_eq!(
            equal_color_prob_diff_settings(&StateDistribution::<Rat>::point_mass(state("RRR"))),
            Rat::new(1, 1)
        );
    }

    #[test]
    fn lower_bound_is_one_third_on_the_two_equal_states() {
        let report = mermin_lower_bound::<Rat>();
        assert_eq!(report.minimum, Rat::new(1, 3));
        assert_eq!(report.achieving_states.len(), 6);
        assert!(!report.achieving_states.contains(&state("RRR")));
        assert!(!report.achieving_states.contains(&state("GGG")));
        for s in &report.achieving_states {
            assert!(s.count_of(Color::Red) == 1 || s.count_of(Color::Red) == 2);
        }
    }

    #[test]
    fn bound_exceeds_the_quantum_value() {
        let quantum = crate::mermin::same_color_prob::<Rat>(crate::mermin::SettingPair::new(
            Switch::One,
            Switch::Two,
        ));
        assert!(mermin_lower_bound::<Rat>().minimum > quantum);
    }

    #[test]
    fn equal_settings_always_agree() {
        assert!(equal_settings_consistency(
            &StateDistribution::<Rat>::uniform()
        ));
        assert!(equal_settings_consistency(
            &StateDistribution::<Rat>::point_mass(state("RGG"))
        ));
        assert!(equal_settings_consistency(
            &StateDistribution::<f64>::uniform_two_equal()
        ));
    }

    #[test]
    fn distribution_rejects_bad_weights() {
        let mut w = [0.125f64; 8];
        w[0] = 0.0;
        assert_eq!(
            StateDistribution::new(w),
            Err(LhvError::WeightSum { sum: 0.875 })
        );
        w[0] = -0.125;
        assert!(matches!(
            StateDistribution::new(w),
            Err(LhvError::NegativeWeight { .. })
        ));
    }

    fn normalized(raw: [f64; 8]) -> Option<StateDistribution<f64>> {
        let total: f64 = raw.iter().sum();
        if total <= 1e-9 {
            return None;
        }
        let mut weights = raw;
        for w in &mut weights {
            *w /= total;
        }
        // Absorb rounding into the largest weight so the sum is exact.
        let sum: f64 = weights.iter().sum();
        weights[0] += 1.0 - sum;
        StateDistribution::new(weights).ok()
    }

    proptest! {
        #[test]
        fn bound_holds_for_random_distributions(raw in proptest::array::uniform8(0.0f64..1.0)) {
            if let Some(d) = normalized(raw) {
                let v = equal_color_prob_diff_settings(&d);
                prop_assert!(v >= 1.0 / 3.0 - 1e-12);
                prop_assert!(v <= 1.0 + 1e-12);
                prop_assert!(equal_settings_consistency(&d));
            }
        }

        #[test]
        fn objective_is_affine_in_the_distribution(
            raw_a in proptest::array::uniform8(0.0f64..1.0),
            raw_b in proptest::array::uniform8(0.0f64..1.0),
            lambda in 0.0f64..1.0,
        ) {
            let (Some(a), Some(b)) = (normalized(raw_a), normalized(raw_b)) else {
                return Ok(());
            };
            let mut mixed = [0.0f64; 8];
            for (i, m) in mixed.iter_mut().enumerate() {
                let state = InstructionState::from_index(i);
                *m = lambda * a.weight(state) + (1.0 - lambda) * b.weight(state);
            }
            let d = StateDistribution::new(mixed).expect("mixture of distributions");
            let direct = equal_color_prob_diff_settings(&d);
            let blended = lambda * equal_color_prob_diff_settings(&a)
                + (1.0 - lambda) * equal_color_prob_diff_settings(&b);
            prop_assert!((direct - blended).abs() <= 1e-12);
        }
    }
}
