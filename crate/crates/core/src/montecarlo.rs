//! Seeded trial engine for the delayed-choice experiment.
//!
//! Each trial draws both switch settings independently and uniformly, then
//! samples outcomes from the model under test: the singlet color table, an
//! instruction-set distribution, or the latter with a detection layer. The
//! per-trial random stream is addressed by (seed, trial index, draw index),
//! so a run partitioned across worker threads produces counts identical to a
//! sequential run.
//!
//! Draw order within a trial is fixed: the quantum model consumes
//! (switch X, switch Y, joint outcome); the instruction-set model consumes
//! (state, switch X, switch Y[, detection X, detection Y]).

use thiserror::Error;

use crate::lhv::{lhv_color, InstructionState, StateDistribution};
use crate::loophole::{detect_prob, DetectionModel};
use crate::mermin::{quantum_joint_probs, Color, ProbTable, SettingPair, Switch};
use crate::rng::CounterRng;
pub use crate::rng::Seed;

/// Errors from frequency queries.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    /// The conditioning event selected no trials.
    #[error("no recorded trials match the conditioning event")]
    EmptySelection,
}

/// Joint per-station result of one trial; `None` marks a station that did
/// not fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JointOutcome {
    pub x: Option<Color>,
    pub y: Option<Color>,
}

impl JointOutcome {
    /// All nine joint outcomes, station-X major, in R, G, none order.
    pub fn all() -> impl Iterator<Item = JointOutcome> {
        (0..9).map(JointOutcome::from_index)
    }

    /// Dense index in 0..9.
    pub fn index(self) -> usize {
        station_index(self.x) * 3 + station_index(self.y)
    }

    /// Outcome with the given dense index.
    ///
    /// Panics if `index > 8`.
    pub fn from_index(index: usize) -> JointOutcome {
        assert!(index < 9, "joint outcome index out of range");
        JointOutcome {
            x: station_from_index(index / 3),
            y: station_from_index(index % 3),
        }
    }

    pub fn both_detected(self) -> bool {
        self.x.is_some() && self.y.is_some()
    }

    /// Both stations fired and showed the same color.
    pub fn equal_color_detected(self) -> bool {
        matches!((self.x, self.y), (Some(a), Some(b)) if a == b)
    }
}

fn station_index(outcome: Option<Color>) -> usize {
    match outcome {
        Some(c) => c.index(),
        None => 2,
    }
}

fn station_from_index(index: usize) -> Option<Color> {
    match index {
        0 => Some(Color::Red),
        1 => Some(Color::Green),
        _ => None,
    }
}

/// One realized trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub settings: SettingPair,
    pub detected_x: bool,
    pub detected_y: bool,
    pub color_x: Option<Color>,
    pub color_y: Option<Color>,
}

impl TrialRecord {
    /// A color is present exactly when its station fired.
    pub fn new(settings: SettingPair, color_x: Option<Color>, color_y: Option<Color>) -> Self {
        TrialRecord {
            settings,
            detected_x: color_x.is_some(),
            detected_y: color_y.is_some(),
            color_x,
            color_y,
        }
    }

    pub fn outcome(&self) -> JointOutcome {
        JointOutcome {
            x: self.color_x,
            y: self.color_y,
        }
    }
}

/// Dense trial counts over (setting pair, joint outcome), non-detections
/// included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStats {
    n_trials: u64,
    counts: [[u64; 9]; 9],
}

/// An empirical frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency {
    pub hits: u64,
    pub n: u64,
    pub value: f64,
    pub stderr: f64,
}

impl Default for RunStats {
    fn default() -> Self {
        RunStats::new()
    }
}

impl RunStats {
    pub fn new() -> Self {
        RunStats {
            n_trials: 0,
            counts: [[0; 9]; 9],
        }
    }

    pub fn n_trials(&self) -> u64 {
        self.n_trials
    }

    fn record(&mut self, trial: &TrialRecord) {
        self.n_trials += 1;
        self.counts[trial.settings.index()][trial.outcome().index()] += 1;
    }

    /// Count accumulation is associative and commutative, so partial stats
    /// from any partition of the trials merge to the same totals.
    pub fn merge_from(&mut self, other: &RunStats) {
        self.n_trials += other.n_trials;
        for (mine, theirs) in self.counts.iter_mut().zip(other.counts.iter()) {
            for (m, t) in mine.iter_mut().zip(theirs.iter()) {
                *m += t;
            }
        }
    }

    pub fn count(&self, settings: SettingPair, outcome: JointOutcome) -> u64 {
        self.counts[settings.index()][outcome.index()]
    }

    /// Trials recorded for one setting pair, any outcome.
    pub fn setting_count(&self, settings: SettingPair) -> u64 {
        self.counts[settings.index()].iter().sum()
    }

    /// All (settings, outcome, count) cells.
    pub fn cells(&self) -> impl Iterator<Item = (SettingPair, JointOutcome, u64)> + '_ {
        self.counts.iter().enumerate().flat_map(|(si, row)| {
            row.iter().enumerate().map(move |(oi, &count)| {
                (
                    SettingPair::from_index(si),
                    JointOutcome::from_index(oi),
                    count,
                )
            })
        })
    }

    /// Frequency of `event` among trials satisfying `condition`, with the
    /// empirical binomial standard error.
    pub fn frequency<C, E>(&self, condition: C, event: E) -> Result<Frequency, McError>
    where
        C: Fn(SettingPair, JointOutcome) -> bool,
        E: Fn(SettingPair, JointOutcome) -> bool,
    {
        let mut n = 0u64;
        let mut hits = 0u64;
        for (settings, outcome, count) in self.cells() {
            if condition(settings, outcome) {
                n += count;
                if event(settings, outcome) {
                    hits += count;
                }
            }
        }
        if n == 0 {
            return Err(McError::EmptySelection);
        }
        let value = hits as f64 / n as f64;
        Ok(Frequency {
            hits,
            n,
            value,
            stderr: (value * (1.0 - value) / n as f64).sqrt(),
        })
    }
}

/// Result of testing an empirical frequency against an analytic value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub analytic: f64,
    pub empirical: f64,
    pub hits: u64,
    pub n: u64,
    /// Binomial standard error under the analytic value.
    pub stderr: f64,
    /// Zero when empirical and analytic agree exactly, else the studentized
    /// deviation (infinite if the analytic standard error vanishes).
    pub z: f64,
    /// |z| within four standard errors.
    pub pass: bool,
}

/// Compares the conditional frequency of `event` given `condition` against
/// `analytic`, passing at the 4-sigma level.
pub fn compare<C, E>(
    stats: &RunStats,
    analytic: f64,
    condition: C,
    event: E,
) -> Result<Comparison, McError>
where
    C: Fn(SettingPair, JointOutcome) -> bool,
    E: Fn(SettingPair, JointOutcome) -> bool,
{
    let freq = stats.frequency(condition, event)?;
    let stderr = (analytic * (1.0 - analytic) / freq.n as f64).sqrt();
    let diff = freq.value - analytic;
    let z = if diff == 0.0 { 0.0 } else { diff / stderr };
    Ok(Comparison {
        analytic,
        empirical: freq.value,
        hits: freq.hits,
        n: freq.n,
        stderr,
        z,
        pass: z.abs() <= 4.0,
    })
}

/// Condition selecting trials with different switch settings.
pub fn different_settings(settings: SettingPair, _: JointOutcome) -> bool {
    !settings.is_equal_settings()
}

/// Condition selecting trials with equal switch settings.
pub fn equal_settings(settings: SettingPair, _: JointOutcome) -> bool {
    settings.is_equal_settings()
}

/// Event: both stations fired with the same color.
pub fn equal_color_detected(_: SettingPair, outcome: JointOutcome) -> bool {
    outcome.equal_color_detected()
}

/// Event: both stations fired.
pub fn both_detected(_: SettingPair, outcome: JointOutcome) -> bool {
    outcome.both_detected()
}

/// Runs `n` trials of the singlet color table, single-threaded.
pub fn run_quantum(n: u64, seed: Seed) -> RunStats {
    run_quantum_partitioned(n, seed, 1)
}

/// Runs `n` trials of the singlet color table across `workers` threads;
/// counts are identical for every worker count.
pub fn run_quantum_partitioned(n: u64, seed: Seed, workers: usize) -> RunStats {
    let tables: Vec<ProbTable<f64>> = (0..9)
        .map(|i| quantum_joint_probs(SettingPair::from_index(i)))
        .collect();
    run_partitioned(n, workers, |trial| {
        let mut rng = CounterRng::new(seed, trial);
        let pair = draw_settings(&mut rng);
        let (cx, cy) = sample_table(&tables[pair.index()], rng.next_f64());
        TrialRecord::new(pair, Some(cx), Some(cy))
    })
}

/// Runs `n` trials of the instruction-set model, single-threaded.
pub fn run_lhv(
    d: &StateDistribution<f64>,
    m: Option<&DetectionModel<f64>>,
    n: u64,
    seed: Seed,
) -> RunStats {
    run_lhv_partitioned(d, m, n, seed, 1)
}

/// Runs `n` trials of the instruction-set model (with an optional detection
/// layer) across `workers` threads.
pub fn run_lhv_partitioned(
    d: &StateDistribution<f64>,
    m: Option<&DetectionModel<f64>>,
    n: u64,
    seed: Seed,
    workers: usize,
) -> RunStats {
    let mut cumulative = [0.0f64; 8];
    let mut acc = 0.0;
    for (slot, (_, w)) in cumulative.iter_mut().zip(d.iter()) {
        acc += w;
        *slot = acc;
    }
    run_partitioned(n, workers, |trial| {
        let mut rng = CounterRng::new(seed, trial);
        let state = draw_state(&cumulative, rng.next_f64());
        let pair = draw_settings(&mut rng);
        let cx = lhv_color(state, pair.x);
        let cy = lhv_color(state, pair.y);
        let (color_x, color_y) = match m {
            None => (Some(cx), Some(cy)),
            Some(model) => {
                let fired_x = rng.next_f64() < detect_prob(state, pair.x, model);
                let fired_y = rng.next_f64() < detect_prob(state, pair.y, model);
                (fired_x.then_some(cx), fired_y.then_some(cy))
            }
        };
        TrialRecord::new(pair, color_x, color_y)
    })
}

fn draw_settings(rng: &mut CounterRng) -> SettingPair {
    let x = Switch::from_index(rng.uniform_index(3));
    let y = Switch::from_index(rng.uniform_index(3));
    SettingPair::new(x, y)
}

fn sample_table(table: &ProbTable<f64>, u: f64) -> (Color, Color) {
    let mut acc = 0.0;
    for ((cx, cy), p) in table.entries() {
        acc += p;
        if u < acc {
            return (cx, cy);
        }
    }
    (Color::Green, Color::Green)
}

fn draw_state(cumulative: &[f64; 8], u: f64) -> InstructionState {
    for (i, &edge) in cumulative.iter().enumerate() {
        if u < edge {
            return InstructionState::from_index(i);
        }
    }
    InstructionState::from_index(7)
}

/// Splits trial indices into contiguous chunks, one worker each, and merges
/// the partial counts in chunk order.
fn run_partitioned<F>(n: u64, workers: usize, trial: F) -> RunStats
where
    F: Fn(u64) -> TrialRecord + Sync,
{
    let workers = workers.max(1).min(n.clamp(1, 1024) as usize);
    if workers == 1 {
        let mut stats = RunStats::new();
        for t in 0..n {
            stats.record(&trial(t));
        }
        return stats;
    }
    let chunk = n.div_ceil(workers as u64);
    std::thread::scope(|scope| {
        let trial = &trial;
        let handles: Vec<_> = (0..workers as u64)
            .map_while(|w| {
                let lo = w * chunk;
                if lo >= n {
                    return None;
                }
                let hi = (lo + chunk).min(n);
                Some(scope.spawn(move || {
                    let mut stats = RunStats::new();
                    for t in lo..hi {
                        stats.record(&trial(t));
                    }
                    stats
                }))
            })
            .collect();
        let mut total = RunStats::new();
        for handle in handles {
            total.merge_from(&handle.join().expect("simulation worker panicked"));
        }
        total
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(x: usize, y: usize) -> SettingPair {
        SettingPair::new(Switch::from_index(x - 1), Switch::from_index(y - 1))
    }

    #[test]
    fn identical_seeds_reproduce_counts() {
        let a = run_quantum(20_000, Seed(42));
        let b = run_quantum(20_000, Seed(42));
        assert_eq!(a, b);
        let c = run_quantum(20_000, Seed(43));
        assert_ne!(a, c);
    }

    #[test]
    fn partitioned_runs_match_sequential_runs() {
        let d = StateDistribution::<f64>::uniform();
        let m = DetectionModel::new(0.7, 0.4).unwrap();
        let sequential = run_lhv(&d, Some(&m), 9_999, Seed(5));
        for workers in [2, 3, 8, 64] {
            let split = run_lhv_partitioned(&d, Some(&m), 9_999, Seed(5), workers);
            assert_eq!(split, sequential, "workers = {workers}");
        }
        let q_sequential = run_quantum(9_999, Seed(5));
        assert_eq!(run_quantum_partitioned(9_999, Seed(5), 7), q_sequential);
    }

    #[test]
    fn setting_marginals_are_uniform() {
        let n = 90_000u64;
        let stats = run_quantum(n, Seed(1));
        let expected = n as f64 / 9.0;
        let chi2: f64 = SettingPair::all()
            .map(|p| {
                let observed = stats.setting_count(p) as f64;
                (observed - expected).powi(2) / expected
            })
            .sum();
        // Normal approximation of chi-square with 8 degrees of freedom:
        // mean 8, variance 16, 4-sigma ceiling at 24.
        assert!(chi2 <= 24.0, "chi2 = {chi2}");
    }

    #[test]
    fn quantum_run_never_breaks_equal_settings_agreement() {
        let stats = run_quantum(50_000, Seed(9));
        for settings in SettingPair::all().filter(|p| p.is_equal_settings()) {
            for outcome in JointOutcome::all().filter(|o| !o.equal_color_detected()) {
                assert_eq!(stats.count(settings, outcome), 0);
            }
        }
        let agree = compare(&stats, 1.0, equal_settings, equal_color_detected).unwrap();
        assert_eq!(agree.empirical, 1.0);
        assert_eq!(agree.z, 0.0);
        assert!(agree.pass);
    }

    #[test]
    fn quantum_frequencies_track_the_table() {
        let stats = run_quantum(200_000, Seed(42));
        let same = compare(&stats, 0.25, different_settings, equal_color_detected).unwrap();
        assert!(same.pass, "{same:?}");
        assert!((same.empirical - 0.25).abs() < 0.01);
    }

    #[test]
    fn constant_state_always_agrees() {
        let d = StateDistribution::<f64>::point_mass("RRR".parse().unwrap());
        let stats = run_lhv(&d, None, 30_000, Seed(3));
        let all = compare(&stats, 1.0, |_, _| true, equal_color_detected).unwrap();
        assert_eq!(all.empirical, 1.0);
        assert!(all.pass);
    }

    #[test]
    fn single_trial_run() {
        let stats = run_quantum(1, Seed(0));
        assert_eq!(stats.n_trials(), 1);
        let total: u64 = stats.cells().map(|(_, _, c)| c).sum();
        assert_eq!(total, 1);
    }

    #[test]
    fn comparison_z_and_stderr() {
        // Hand-built counts: 83,300 equal-color trials among 333,000
        // different-setting trials.
        let mut stats = RunStats::new();
        stats.n_trials = 333_000;
        let rr = JointOutcome {
            x: Some(Color::Red),
            y: Some(Color::Red),
        }
        .index();
        let rg = JointOutcome {
            x: Some(Color::Red),
            y: Some(Color::Green),
        }
        .index();
        stats.counts[pair(1, 2).index()][rr] = 83_300;
        stats.counts[pair(1, 2).index()][rg] = 333_000 - 83_300;

        let cmp = compare(&stats, 0.25, different_settings, equal_color_detected).unwrap();
        assert!((cmp.stderr - 7.5e-4).abs() < 1e-5, "stderr {}", cmp.stderr);
        assert!(cmp.pass);
        assert!(cmp.z.abs() < 1.0);

        let gross = compare(&stats, 0.5, different_settings, equal_color_detected).unwrap();
        assert!(!gross.pass);

        let exact = compare(
            &stats,
            83_300.0 / 333_000.0,
            different_settings,
            equal_color_detected,
        )
        .unwrap();
        assert_eq!(exact.z, 0.0);
        assert!(exact.pass);
    }

    #[test]
    fn empty_selection_is_an_error() {
        let stats = run_quantum(100, Seed(2));
        let err = compare(&stats, 0.5, |_, o| !o.both_detected(), |_, _| true);
        assert_eq!(err.unwrap_err(), McError::EmptySelection);
    }
}
