mod common;

use std::sync::Mutex;

use espm::identification::synthetic::{self, SyntheticSpec};
use espm::identification::{
    penalty, phase_parameters, pso_minimize, reference_table, search_vector, soc_exp_from_coulomb_counting,
    trajectory_misfit, CostWeights, CycleLabel, ExperimentalDataset, IdentificationProblem, Param, PsoConfig,
    Sample, SearchProblem, PENALTY_BASE,
};
use espm::cell::TraceSample;
use espm::{Cell, DtPolicy, InitialFilm};
use proptest::prelude::*;

const LABELS: [CycleLabel; 3] = [CycleLabel::Fresh, CycleLabel::Aged1000, CycleLabel::Aged3300];

fn samples(n: usize, dt: f64, v: impl Fn(f64) -> f64) -> Vec<Sample> {
    (0..n).map(|k| Sample { t_s: k as f64 * dt, voltage_v: v(k as f64 * dt) }).collect()
}

#[test]
fn coulomb_counted_soc() {
    let current = 12.4 / 3.0;
    let full = 12.4 * 3600.0 / current;
    let d = ExperimentalDataset::new(samples(11, full / 10.0, |_| 3.7), current, 298.15, CycleLabel::Fresh).unwrap();
    let soc = soc_exp_from_coulomb_counting(&d, 12.4);
    assert_eq!(soc[0], 1.0);
    assert!((soc[5] - 0.5).abs() < 1e-12);
    assert!(soc[10].abs() < 1e-12);
}

#[test]
fn datasets_validate_their_samples() {
    assert!(ExperimentalDataset::new(samples(9, 1.0, |_| 3.7), 1.0, 298.15, CycleLabel::Fresh).is_err());
    let mut dup = samples(12, 1.0, |_| 3.7);
    dup[3].t_s = dup[2].t_s;
    assert!(ExperimentalDataset::new(dup, 1.0, 298.15, CycleLabel::Fresh).is_err());
    assert!(ExperimentalDataset::new(samples(12, 1.0, |_| f64::NAN), 1.0, 298.15, CycleLabel::Fresh).is_err());
    assert!(ExperimentalDataset::new(samples(12, 1.0, |_| 3.7), 0.0, 298.15, CycleLabel::Fresh).is_err());
}

#[test]
fn capacity_axis_is_converted_to_time() {
    let mut text = String::from("capacity_Ah,voltage_V\n");
    for k in 0..12 {
        text += &format!("{},{}\n", k as f64 * 0.5, 4.0 - 0.05 * k as f64);
    }
    let d = ExperimentalDataset::from_reader(text.as_bytes(), 2.0, 298.15, CycleLabel::Aged1000).unwrap();
    assert_eq!(d.samples()[1].t_s, 900.0);
    assert_eq!(d.label, CycleLabel::Aged1000);
    let bad = "time,voltage\n0,4\n";
    assert!(ExperimentalDataset::from_reader(bad.as_bytes(), 2.0, 298.15, CycleLabel::Fresh).is_err());
}

/// A fake trajectory with linear voltage and equal electrode SOCs, and the
/// matching dataset.
fn fake_trajectory() -> (Vec<TraceSample>, ExperimentalDataset, Vec<f64>) {
    let cell = common::cell();
    let template = cell.evaluate(&cell.initial_state(1.0, InitialFilm::default()).unwrap(), 1.0, 0.0).unwrap();
    let v = |t: f64| 4.0 - 1e-4 * t;
    let soc = |t: f64| 1.0 - 1e-4 * t;
    let traj = (0..=100)
        .map(|k| {
            let t = k as f64 * 10.0;
            let mut output = template;
            output.v_cell = v(t);
            output.soc_n = soc(t);
            output.soc_p = soc(t);
            TraceSample { t_s: t, output }
        })
        .collect();
    let data = ExperimentalDataset::new(samples(34, 30.0, v), 1.0, 298.15, CycleLabel::Fresh).unwrap();
    let soc_exp = data.samples().iter().map(|s| soc(s.t_s)).collect();
    (traj, data, soc_exp)
}

#[test]
fn perfect_match_costs_nothing() {
    let (traj, data, soc_exp) = fake_trajectory();
    let b = trajectory_misfit(&traj, &data, &soc_exp).unwrap();
    assert!(b.weighted(&CostWeights::default()) < 1e-12);
}

#[test]
fn constant_voltage_offset_costs_its_size() {
    let (traj, data, soc_exp) = fake_trajectory();
    let shifted: Vec<Sample> = data.samples().iter().map(|s| Sample { voltage_v: s.voltage_v + 0.02, ..*s }).collect();
    let data = ExperimentalDataset::new(shifted, 1.0, 298.15, CycleLabel::Fresh).unwrap();
    let b = trajectory_misfit(&traj, &data, &soc_exp).unwrap();
    let w = CostWeights { voltage: 0.7, ..CostWeights::default() };
    assert!((b.weighted(&w) - 0.7 * 0.02).abs() < 1e-12);
    let no_voltage = CostWeights { voltage: 0.0, ..w };
    assert!(b.weighted(&no_voltage) < 1e-12);
}

#[test]
fn trajectories_must_span_the_data() {
    let (traj, data, soc_exp) = fake_trajectory();
    assert!(trajectory_misfit(&traj[..50], &data, &soc_exp).is_none());
}

#[test]
fn penalties_rank_by_progress() {
    assert_eq!(penalty(1.0), PENALTY_BASE);
    assert_eq!(penalty(0.0), 2.0 * PENALTY_BASE);
    assert!(penalty(0.8) < penalty(0.3));
    assert_eq!(penalty(f64::NAN), 2.0 * PENALTY_BASE);
}

fn short_problem(order: &[usize]) -> IdentificationProblem {
    let cell = common::cell();
    let all = samples(20, 30.0, |t| 4.05 - 2e-4 * t);
    let shuffled: Vec<Sample> = order.iter().map(|&k| all[k]).collect();
    let data = ExperimentalDataset::new(shuffled, 12.4 / 3.0, 298.15, CycleLabel::Fresh).unwrap();
    IdentificationProblem::new(&cell, InitialFilm::default(), data, 12.4, CostWeights::default(), DtPolicy::default())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cost_ignores_sample_order(order in Just((0..20usize).collect::<Vec<_>>()).prop_shuffle()) {
        let sorted = short_problem(&(0..20).collect::<Vec<_>>());
        let shuffled = short_problem(&order);
        let x = sorted.initial_guess();
        prop_assert_eq!(sorted.cost(&x).to_bits(), shuffled.cost(&x).to_bits());
    }
}

#[test]
fn failed_simulations_are_penalized() {
    let problem = short_problem(&(0..20).collect::<Vec<_>>());
    let mut x = problem.initial_guess();
    // An anode window that cannot hold a full charge saturates immediately.
    let idx = problem.vector().entries().iter().position(|e| e.param == Param::ThetaN100).unwrap();
    x[idx] = 1.0;
    let c = problem.cost(&x);
    assert!(problem.is_penalty(c), "{c}");
    assert!(c >= PENALTY_BASE);
}

struct Sphere {
    lower: Vec<f64>,
    upper: Vec<f64>,
    guess: Vec<f64>,
    seen: Mutex<Vec<Vec<f64>>>,
}

impl Sphere {
    fn new(lower: Vec<f64>, upper: Vec<f64>, guess: Vec<f64>) -> Self {
        Self { lower, upper, guess, seen: Mutex::new(Vec::new()) }
    }
}

impl SearchProblem for Sphere {
    fn lower(&self) -> &[f64] {
        &self.lower
    }
    fn upper(&self) -> &[f64] {
        &self.upper
    }
    fn initial_guess(&self) -> Vec<f64> {
        self.guess.clone()
    }
    fn cost(&self, x: &[f64]) -> f64 {
        self.seen.lock().unwrap().push(x.to_vec());
        x.iter().map(|v| v * v).sum()
    }
}

#[test]
fn swarm_finds_the_sphere_minimum() {
    let problem = Sphere::new(vec![-1.0; 3], vec![1.0; 3], vec![0.8, -0.6, 0.9]);
    let config = PsoConfig { iterations: 200, seed: 7, ..PsoConfig::default() };
    let r = pso_minimize(&problem, &config).unwrap();
    let dist = r.best.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(dist < 1e-3, "{dist:e}");
    assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(r.history.len(), 201);
    assert_eq!(r.evaluations, 30 * 201);
}

#[test]
fn motionless_single_particle_returns_its_guess() {
    let problem = Sphere::new(vec![-1.0; 2], vec![1.0; 2], vec![0.3, -0.4]);
    let config = PsoConfig { swarm_size: 1, iterations: 20, inertia: 0.0, cognitive: 0.0, social: 0.0, ..PsoConfig::default() };
    assert!(config.validate().is_err());
    let r = pso_minimize(&problem, &config).unwrap();
    assert_eq!(r.best, vec![0.3, -0.4]);
    assert!((r.best_cost - 0.25).abs() < 1e-15);
}

#[test]
fn same_seed_same_result_at_any_parallelism() {
    let config = PsoConfig { iterations: 40, seed: 11, ..PsoConfig::default() };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let problem = Sphere::new(vec![-2.0; 4], vec![1.0; 4], vec![0.5; 4]);
            pso_minimize(&problem, &config).unwrap()
        })
    };
    let a = run(1);
    assert_eq!(a, run(1));
    assert_eq!(a, run(4));
    let other = pso_minimize(&Sphere::new(vec![-2.0; 4], vec![1.0; 4], vec![0.5; 4]), &PsoConfig { seed: 12, ..config });
    assert_ne!(a.best, other.unwrap().best);
}

#[test]
fn all_penalized_swarm_reports_failure() {
    struct Hopeless;
    impl SearchProblem for Hopeless {
        fn lower(&self) -> &[f64] {
            &[0.0]
        }
        fn upper(&self) -> &[f64] {
            &[1.0]
        }
        fn initial_guess(&self) -> Vec<f64> {
            vec![0.5]
        }
        fn cost(&self, _: &[f64]) -> f64 {
            f64::NAN
        }
    }
    let config = PsoConfig { iterations: 3, ..PsoConfig::default() };
    assert!(matches!(pso_minimize(&Hopeless, &config), Err(espm::Error::Optimization(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn swarm_never_leaves_the_box(
        seed in any::<u64>(),
        lo in prop::collection::vec(-5.0f64..0.0, 3),
        width in prop::collection::vec(0.01f64..4.0, 3),
        guess in prop::collection::vec(-10.0f64..10.0, 3),
    ) {
        let hi: Vec<f64> = lo.iter().zip(&width).map(|(l, w)| l + w).collect();
        let problem = Sphere::new(lo.clone(), hi.clone(), guess);
        let config = PsoConfig { swarm_size: 8, iterations: 15, seed, ..PsoConfig::default() };
        let r = pso_minimize(&problem, &config).unwrap();
        for x in problem.seen.lock().unwrap().iter().chain(std::iter::once(&r.best)) {
            for d in 0..3 {
                prop_assert!(lo[d] <= x[d] && x[d] <= hi[d]);
            }
        }
    }
}

#[test]
fn pso_config_validation() {
    assert!(PsoConfig::default().validate().is_ok());
    assert!(PsoConfig { swarm_size: 4, ..PsoConfig::default() }.validate().is_err());
    assert!(PsoConfig { social: 0.0, ..PsoConfig::default() }.validate().is_err());
}

#[test]
fn published_tables() {
    let fresh = reference_table(CycleLabel::Fresh);
    assert_eq!(fresh.rows.len(), 9);
    let a_cell = &fresh.rows[0];
    assert_eq!((a_cell.param, a_cell.lower, a_cell.upper, a_cell.guess, a_cell.identified), (Param::ACell, 0.28, 0.83, 0.55, 0.57));
    let r_n = fresh.rows.iter().find(|r| r.param == Param::RN).unwrap();
    assert_eq!((r_n.lower, r_n.upper, r_n.guess, r_n.identified), (5e-6, 15e-6, 10e-6, 5.16e-6));
    let ratio = |l: CycleLabel| reference_table(l).rows.iter().find(|r| r.param == Param::LSeiOverKappaSei).unwrap().identified;
    let theta_n = |l: CycleLabel| reference_table(l).rows.iter().find(|r| r.param == Param::ThetaN100).unwrap().identified;
    assert!(ratio(CycleLabel::Aged3300) > ratio(CycleLabel::Aged1000));
    assert!(theta_n(CycleLabel::Aged3300) < theta_n(CycleLabel::Aged1000));
    assert_eq!(reference_table(CycleLabel::Aged1000).rows[0].lower, 0.0015);
    assert_eq!(reference_table(CycleLabel::Aged1000).rows[0].upper, 0.15);
}

#[test]
fn search_vectors_hold_guesses_inside_bounds() {
    for label in LABELS {
        for e in search_vector(label).entries() {
            assert!(e.lower <= e.guess && e.guess <= e.upper, "{label} {}", e.param);
        }
    }
    let aged = search_vector(CycleLabel::Aged3300);
    assert_eq!(aged.entries()[0].guess, 0.3);
}

#[test]
fn phases_switch_degradation_paths() {
    let p = common::config("aged3300.json").resolved_parameters();
    let fresh = phase_parameters(CycleLabel::Fresh, &p).unwrap();
    assert_eq!((fresh.kinetics.k_f, fresh.kinetics.i0_pl, fresh.aging.betaprime_n), (0.0, 0.0, 0.0));
    assert_eq!(phase_parameters(CycleLabel::Aged1000, &p).unwrap().kinetics.i0_pl, 0.0);
    assert!(phase_parameters(CycleLabel::Aged3300, &p).unwrap().kinetics.i0_pl > 0.0);
    let mut off = p.clone();
    off.kinetics.i0_pl = 0.0;
    assert!(phase_parameters(CycleLabel::Aged3300, &off).is_err());
}

#[test]
fn film_ratio_parameter_sets_the_sei_thickness() {
    let mut p = common::params();
    let mut film = InitialFilm::default();
    Param::LSeiOverKappaSei.apply(0.085, &mut p, &mut film);
    assert!(common::rel(film.l_sei, 0.085 * p.aging.kappa_sei) < 1e-15);
    assert!(common::rel(Param::LSeiOverKappaSei.read(&p, &film), 0.085) < 1e-15);
}

fn synthetic_problem(label: CycleLabel, config: &str, noise: f64) -> (IdentificationProblem, Vec<f64>) {
    let cfg = common::config(config);
    let mut base_params = cfg.cell.clone();
    cfg.theta1.as_ref().unwrap().apply(&mut base_params);
    let base = common::cell().with_params(base_params).unwrap();
    let (truth, film) = synthetic::truth_cell(&base, label).unwrap();
    let nominal = synthetic::nominal_capacity_ah(&truth);
    let spec = SyntheticSpec {
        label,
        current_a: nominal / 3.0,
        cutoff_v: 2.8,
        noise_std_v: noise,
        interval_s: 60.0,
        seed: 3,
        dt: DtPolicy::default(),
        max_time_s: 36000.0,
    };
    let data = synthetic::generate(&truth, film, &spec).unwrap();
    let problem = IdentificationProblem::new(&base, film, data, nominal, CostWeights::default(), DtPolicy::default()).unwrap();
    let x = problem.vector().entries().iter().map(|e| {
        synthetic::synthetic_truth(label).iter().find(|(p, _)| *p == e.param).unwrap().1
    }).collect();
    (problem, x)
}

#[test]
fn truth_vectors_lie_inside_the_published_bounds() {
    for label in LABELS {
        let v = search_vector(label);
        for (param, value) in synthetic::synthetic_truth(label) {
            let e = v.entries().iter().find(|e| e.param == param).unwrap();
            assert!(e.lower <= value && value <= e.upper, "{label} {param}");
        }
    }
}

#[test]
fn synthetic_truth_scores_near_the_noise_floor() {
    for (label, config) in [
        (CycleLabel::Fresh, "fresh.json"),
        (CycleLabel::Aged1000, "aged1000.json"),
        (CycleLabel::Aged3300, "aged3300.json"),
    ] {
        let (problem, x) = synthetic_problem(label, config, 0.0);
        let b = problem.evaluate(&x).unwrap();
        assert!(b.voltage_rmse_v < 1e-4, "{label}: {b:?}");
        assert!(b.weighted(&problem.weights) < 0.005, "{label}: {b:?}");
        let (noisy, x) = synthetic_problem(label, config, 1e-3);
        let b = noisy.evaluate(&x).unwrap();
        assert!((b.voltage_rmse_v - 1e-3).abs() < 3e-4, "{label}: {b:?}");
    }
}

#[test]
fn synthetic_generation_is_seeded() {
    let base: Cell = common::cell();
    let (truth, film) = synthetic::truth_cell(&base, CycleLabel::Fresh).unwrap();
    let spec = SyntheticSpec {
        label: CycleLabel::Fresh,
        current_a: 4.0,
        cutoff_v: 3.5,
        noise_std_v: 1e-3,
        interval_s: 60.0,
        seed: 1,
        dt: DtPolicy::default(),
        max_time_s: 36000.0,
    };
    let a = synthetic::generate(&truth, film, &spec).unwrap();
    assert_eq!(a, synthetic::generate(&truth, film, &spec).unwrap());
    assert_ne!(a, synthetic::generate(&truth, film, &SyntheticSpec { seed: 2, ..spec }).unwrap());
    assert!(a.samples().windows(2).all(|w| w[1].t_s - w[0].t_s == 60.0));
}
