//! Implementations of the CLI subcommands.

use std::path::{Path, PathBuf};

use bellsim_core::lhv::{equal_color_prob_diff_settings, mermin_lower_bound, StateDistribution};
use bellsim_core::loophole::{
    both_detected_prob, brute_force_equal_color, equal_color_and_detected_prob,
    per_class_equal_color_prob, DetectionModel, StateClass,
};
use bellsim_core::mermin::{quantum_joint_probs, Color, SettingPair};
use bellsim_core::montecarlo::{
    both_detected, compare, different_settings, equal_color_detected, equal_settings,
    run_lhv_partitioned, run_quantum_partitioned, JointOutcome, McError, Seed,
};
use bellsim_core::regress::{
    complementary_recover, generate_instance, gram_proportionality_error, principal_angles,
    projector, read_matrix_csv, recover_gram, recover_row_space, residual_product,
    RegressionInstance, SubspaceBasis,
};
use bellsim_core::{params, Rat, Scalar};

use crate::report::{ExperimentReport, ReportBuilder};

/// Input and environment failures; every variant maps to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError::Input(message.into())
    }
}

macro_rules! from_core_error {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Input(e.to_string())
            }
        })*
    };
}

from_core_error!(
    bellsim_core::lhv::LhvError,
    bellsim_core::loophole::LoopholeError,
    bellsim_core::regress::RegressError,
    bellsim_core::params::ParamsError,
    McError
);

/// Full nine-pair outcome table of the singlet model against its analytic
/// values, plus the aggregate equal-color rates.
pub fn cmd_quantum(trials: u64, seed: u64, workers: usize) -> Result<ExperimentReport, CliError> {
    let mut builder = ReportBuilder::new("quantum");
    builder.seed(seed).trials(trials).workers(workers);
    let stats = run_quantum_partitioned(trials, Seed(seed), workers);

    for pair in SettingPair::all() {
        let table = quantum_joint_probs::<f64>(pair);
        for cx in Color::ALL {
            for cy in Color::ALL {
                let cmp = compare(
                    &stats,
                    table.get(cx, cy),
                    |s, _| s == pair,
                    |_, o: JointOutcome| o.x == Some(cx) && o.y == Some(cy),
                )?;
                builder.check(&format!("p[{pair}]({cx}{cy})"), &cmp);
            }
        }
    }
    let same_diff = compare(&stats, 0.25, different_settings, equal_color_detected)?;
    builder.check("same_color|different_settings", &same_diff);
    let same_eq = compare(&stats, 1.0, equal_settings, equal_color_detected)?;
    builder.check("same_color|equal_settings", &same_eq);

    Ok(builder.finish())
}

fn parse_distribution(spec: &str) -> Result<StateDistribution<f64>, CliError> {
    match spec {
        "uniform" => Ok(StateDistribution::uniform()),
        "uniform-two-equal" => Ok(StateDistribution::uniform_two_equal()),
        explicit => {
            let weights: Result<Vec<f64>, _> = explicit
                .split(',')
                .map(|w| w.trim().parse::<f64>())
                .collect();
            let weights =
                weights.map_err(|e| CliError::input(format!("malformed weight vector: {e}")))?;
            let weights: [f64; 8] = weights.try_into().map_err(|v: Vec<f64>| {
                CliError::input(format!("expected 8 weights, got {}", v.len()))
            })?;
            Ok(StateDistribution::new(weights)?)
        }
    }
}

/// Instruction-set run without a detection layer, reported against the
/// analytic equal-color value and the 1/3 floor.
pub fn cmd_lhv(
    dist: &str,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<ExperimentReport, CliError> {
    let mut builder = ReportBuilder::new("lhv");
    builder
        .param("dist", dist)
        .seed(seed)
        .trials(trials)
        .workers(workers);
    let d = parse_distribution(dist)?;
    let analytic = equal_color_prob_diff_settings(&d);
    let stats = run_lhv_partitioned(&d, None, trials, Seed(seed), workers);

    let diff = compare(&stats, analytic, different_settings, equal_color_detected)?;
    builder.check("same_color|different_settings", &diff);
    let eq = compare(&stats, 1.0, equal_settings, equal_color_detected)?;
    builder.check("same_color|equal_settings", &eq);

    let bound = mermin_lower_bound::<Rat>();
    let states: Vec<String> = bound
        .achieving_states
        .iter()
        .map(ToString::to_string)
        .collect();
    let quantum = 0.25;
    builder
        .number("bound_minimum", bound.minimum.to_f64())
        .number("quantum_same_color_different_settings", quantum)
        .note("bound_achieving_states", states.join(" "))
        .note(
            "quantum_value_achievable",
            if bound.minimum.to_f64() <= quantum {
                "yes"
            } else {
                "no"
            },
        );

    Ok(builder.finish())
}

/// Detection-layer run: closed forms, diagnostics, and Monte Carlo
/// confirmation of the unconditional, double-detection and conditional
/// rates.
pub fn cmd_loophole(
    p: f64,
    q: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<ExperimentReport, CliError> {
    let model = DetectionModel::new(p, q)?;
    let ecd = equal_color_and_detected_prob(&model);
    let bd = both_detected_prob(&model);

    let mut builder = ReportBuilder::new("loophole");
    builder
        .param("p", p)
        .param("q", q)
        .seed(seed)
        .trials(trials)
        .workers(workers);
    builder
        .number("analytic_equal_color_and_detected", ecd)
        .number(
            "brute_force_equal_color_and_detected",
            brute_force_equal_color(&model),
        )
        .number(
            "per_class_two_equal",
            per_class_equal_color_prob(StateClass::TwoEqual, &model),
        )
        .number(
            "per_class_three_equal",
            per_class_equal_color_prob(StateClass::ThreeEqual, &model),
        )
        .number("analytic_both_detected", bd);
    if bd > 0.0 {
        builder.number("analytic_conditional_equal_color", ecd / bd);
    }

    let d = StateDistribution::<f64>::uniform();
    let stats = run_lhv_partitioned(&d, Some(&model), trials, Seed(seed), workers);

    let unconditional = compare(&stats, ecd, different_settings, equal_color_detected)?;
    builder.check(
        "equal_color_and_detected|different_settings",
        &unconditional,
    );
    let pairs = compare(&stats, bd, different_settings, both_detected)?;
    builder.check("both_detected|different_settings", &pairs);
    if bd > 0.0 {
        let conditional = compare(
            &stats,
            ecd / bd,
            |s, o| different_settings(s, o) && o.both_detected(),
            equal_color_detected,
        );
        match conditional {
            Ok(cmp) => {
                builder.check("equal_color|different_settings,both_detected", &cmp);
            }
            Err(McError::EmptySelection) => {
                builder.note(
                    "conditional_equal_color",
                    "no doubly detected different-setting trials in this run",
                );
            }
        }
    }

    Ok(builder.finish())
}

/// Arguments of the regression subcommand.
pub struct RegressArgs {
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub q: usize,
    pub k: Option<usize>,
    pub seed: u64,
    pub z: Option<PathBuf>,
    pub t: Option<PathBuf>,
}

/// Latent-block recovery, either on a seeded generated instance (with
/// recovery-quality checks) or on user-supplied Z and T matrices (emitting
/// the recovered basis and Gram matrix).
pub fn cmd_regress(args: RegressArgs) -> Result<ExperimentReport, CliError> {
    match (&args.z, &args.t) {
        (Some(z_path), Some(t_path)) => {
            if args.n.is_some() || args.p.is_some() || args.k.is_some() {
                return Err(CliError::input(
                    "--z/--t take matrices from files; drop --n/--p/--k",
                ));
            }
            regress_from_files(z_path, t_path, args.q)
        }
        (None, None) => {
            let (n, p, k) = match (args.n, args.p, args.k) {
                (Some(n), Some(p), Some(k)) => (n, p, k),
                _ => {
                    return Err(CliError::input(
                        "provide --n, --p and --k for a generated instance, or --z and --t",
                    ))
                }
            };
            regress_generated(n, p, args.q, k, args.seed)
        }
        _ => Err(CliError::input("--z and --t must be given together")),
    }
}

fn regress_generated(
    n: usize,
    p: usize,
    q: usize,
    k: usize,
    seed: u64,
) -> Result<ExperimentReport, CliError> {
    let mut builder = ReportBuilder::new("regress");
    builder
        .param("n", n)
        .param("p", p)
        .param("q", q)
        .param("k", k)
        .seed(seed);
    let instance: RegressionInstance<f64> = generate_instance(n, p, q, k, Seed(seed))?;

    // Residual identity (I - P_T)Z = VB.
    let residual = residual_product(instance.z(), instance.t())?;
    let proj = projector(instance.t())?;
    let v = instance.u().sub(&proj.matmul(instance.u()));
    let identity_err = residual.max_abs_diff(&v.matmul(instance.b()));
    builder.bound("residual_product_identity", identity_err, 1e-9);

    if q == 1 {
        let gram_err = gram_proportionality_error(&instance)?;
        builder.bound("gram_proportionality_error", gram_err, 1e-8);
    }

    let recovered = recover_row_space(instance.z(), instance.t(), q)?;
    let truth = SubspaceBasis::from_spanning(&instance.b().transpose())?;
    let angles = principal_angles(&recovered, &truth)?;
    let max_angle = angles.iter().copied().fold(0.0f64, f64::max);
    builder.bound("b_row_space_max_angle", max_angle, 1e-6);

    if k > p {
        let recovered_u = complementary_recover(instance.z(), instance.a(), q)?;
        let truth_u = SubspaceBasis::from_spanning(instance.u())?;
        let angles_u = principal_angles(&recovered_u, &truth_u)?;
        let max_angle_u = angles_u.iter().copied().fold(0.0f64, f64::max);
        builder.bound("u_column_space_max_angle", max_angle_u, 1e-6);
    } else {
        builder.note(
            "u_column_space_recovery",
            "skipped: needs k > p for the transposed projection",
        );
    }

    Ok(builder.finish())
}

fn regress_from_files(
    z_path: &Path,
    t_path: &Path,
    q: usize,
) -> Result<ExperimentReport, CliError> {
    let z = read_matrix_csv(z_path)?;
    let t = read_matrix_csv(t_path)?;
    let mut builder = ReportBuilder::new("regress");
    builder
        .param("z", z_path.display())
        .param("t", t_path.display())
        .param("q", q);

    let basis = recover_row_space(&z, &t, q)?;
    let gram = recover_gram(&z, &t)?;
    builder
        .matrix("recovered_row_space_basis", basis.matrix())
        .matrix("residual_gram", &gram);

    Ok(builder.finish())
}

/// Classifies a parameter query against a registry file.
pub fn cmd_params(registry_path: &Path, query: &[String]) -> Result<ExperimentReport, CliError> {
    let text = std::fs::read_to_string(registry_path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", registry_path.display())))?;
    let registry: params::ExperimentRegistry = text.parse()?;
    let labels: Result<std::collections::BTreeSet<params::ParameterLabel>, _> = query
        .iter()
        .map(|name| params::ParameterLabel::new(name.clone()))
        .collect();
    let labels = labels?;
    let classification = registry.classify(&labels)?;

    let mut builder = ReportBuilder::new("params");
    builder
        .param("registry", registry_path.display())
        .param("query", query.join(" "));
    match &classification {
        params::Classification::Realizable(ids) => {
            builder
                .note("classification", "Realizable")
                .note("covering_experiments", ids.join(" "));
        }
        params::Classification::TotalParameter => {
            builder.note("classification", "TotalParameter");
        }
    }
    builder.note(
        "realism_assumption_holds",
        if classification.is_realizable() {
            "true"
        } else {
            "false"
        },
    );

    Ok(builder.finish())
}

/// Prints the instruction-set floor on the different-setting equal-color
/// frequency and contrasts it with the singlet value.
pub fn cmd_bound() -> Result<ExperimentReport, CliError> {
    let bound = mermin_lower_bound::<Rat>();
    let states: Vec<String> = bound
        .achieving_states
        .iter()
        .map(ToString::to_string)
        .collect();
    let quantum = 0.25;

    let mut builder = ReportBuilder::new("bound");
    builder
        .number("bound_minimum", bound.minimum.to_f64())
        .number("quantum_same_color_different_settings", quantum)
        .note("bound_achieving_states", states.join(" "))
        .note(
            "quantum_value_achievable",
            if bound.minimum.to_f64() <= quantum {
                "yes"
            } else {
                "no"
            },
        )
        .bound(
            "bound_minimum_deviation_from_one_third",
            (bound.minimum - Rat::new(1, 3)).to_f64().abs(),
            0.0,
        );

    Ok(builder.finish())
}
