mod common;

use espm::aging::{
    advance_lam, classify_lam_regime, cycle_to_time_coefficients, film_resistance, fracture_area, lam_rates,
    plating_current_density, porosity_update, sei_current_density, side_reaction_driving_factor,
    species_and_film_rates, total_area_closed_form, LamRegime, DEFAULT_REGIME_TOLERANCE,
};
use espm::sweep::aged_state;
use espm::{CellParameters, CellState, Electrode, InitialFilm};

const CATHODE_KPRIME: [f64; 2] = [3.06e-11, 9.26e-11];
const CATHODE_BETAPRIME: [f64; 2] = [0.198e-11, 1.85e-11];
const ANODE_KPRIME: [f64; 2] = [1.40e-10, 6.30e-10];
const ANODE_BETAPRIME: [f64; 2] = [0.741e-9, 9.59e-9];

fn state() -> (CellParameters, CellState) {
    let cell = common::cell();
    let s = cell.initial_state(1.0, InitialFilm::default()).unwrap();
    (cell.params().clone(), s)
}

#[test]
fn switched_off_side_reactions_vanish() {
    let (mut p, s) = state();
    p.kinetics.k_f = 0.0;
    p.kinetics.i0_pl = 0.0;
    assert_eq!(sei_current_density(&s, 0.1, 0.0, 0.0, 4.0, &p), 0.0);
    assert_eq!(plating_current_density(&s, 0.1, 0.0, 0.0, 4.0, &p), 0.0);
}

#[test]
fn sei_current_is_linear_in_area_and_solvent() {
    let (mut p, mut s) = state();
    p.kinetics.i0_pl = 1e-3;
    let base = sei_current_density(&s, 0.1, -0.01, 1e-3, 4.0, &p);
    assert!(base < 0.0);
    s.a_t_n *= 2.0;
    let doubled = sei_current_density(&s, 0.1, -0.01, 1e-3, 4.0, &p);
    assert!(common::rel(doubled, 2.0 * base) < 1e-14);
    p.kinetics.c_solv_surf *= 3.0;
    assert!(common::rel(sei_current_density(&s, 0.1, -0.01, 1e-3, 4.0, &p), 6.0 * base) < 1e-14);
}

#[test]
fn one_thermal_unit_of_overpotential_divides_by_e() {
    let (p, s) = state();
    let unit = p.thermal_voltage() / p.kinetics.alpha;
    let a = sei_current_density(&s, 0.1, 0.0, 0.0, 0.0, &p);
    let b = sei_current_density(&s, 0.1 + unit, 0.0, 0.0, 0.0, &p);
    assert!(common::rel(b, a / std::f64::consts::E) < 1e-12);
}

#[test]
fn plating_to_sei_ratio_is_potential_independent() {
    let (mut p, s) = state();
    p.kinetics.i0_pl = 1e-3;
    let ratio = |phi_s: f64| {
        plating_current_density(&s, phi_s, 0.0, 0.0, 0.0, &p) / sei_current_density(&s, phi_s, 0.0, 0.0, 0.0, &p)
    };
    let r0 = ratio(0.2);
    for phi in [-0.1, 0.0, 0.05, 0.4] {
        assert!(common::rel(ratio(phi), r0) < 1e-12);
    }
    let lower = plating_current_density(&s, 0.0, 0.0, 0.0, 0.0, &p);
    let higher = plating_current_density(&s, 0.1, 0.0, 0.0, 0.0, &p);
    assert!(lower < higher && higher < 0.0, "plating grows as the driving potential drops");
    assert!(side_reaction_driving_factor(0.0, 0.0, 0.0, 0.0, &p) == 1.0);
}

#[test]
fn species_rates_follow_the_split_fraction() {
    let (mut p, mut s) = state();
    let f = p.constants.faraday;
    p.aging.beta = 1.0;
    let r = species_and_film_rates(-1.0, -5.0, &s, &p);
    assert_eq!(r.dc_li_dt, 0.0);
    assert!(common::rel(r.dc_sei_dt, (1.0 + 5.0) / (2.0 * f)) < 1e-15);

    p.aging.beta = 0.0;
    let r = species_and_film_rates(-1.0, -5.0, &s, &p);
    assert!(common::rel(r.dc_sei_dt, 1.0 / (2.0 * f)) < 1e-15);

    s.a_t_n = 1.0;
    let r = species_and_film_rates(-2.0 * f, 0.0, &s, &p);
    assert!(common::rel(r.dc_sei_dt, 1.0) < 1e-15);
    assert!(common::rel(r.dl_sei_dt, p.aging.m_sei / p.aging.rho_sei) < 1e-15);
    assert_eq!(r.dl_film_dt(), r.dl_sei_dt + r.dl_li_dt);
}

#[test]
fn species_only_accumulate() {
    let (p, s) = state();
    for (j_sei, j_pl) in [(-1.0, 0.0), (0.0, -3.0), (-2.5, -0.7)] {
        let r = species_and_film_rates(j_sei, j_pl, &s, &p);
        assert!(r.dc_sei_dt >= 0.0 && r.dc_li_dt >= 0.0);
    }
}

#[test]
fn film_resistance_values() {
    let (p, s) = state();
    assert_eq!(film_resistance(0.0, s.a_t_n, &p), 0.0);
    let ratio = 0.085;
    let r = film_resistance(ratio * p.aging.kappa_sei, s.a_t_n, &p);
    let expected = ratio / (s.a_t_n * p.geometry.a_cell * p.geometry.l_n);
    assert!(common::rel(r, expected) < 1e-12);
    let halved = film_resistance(ratio * p.aging.kappa_sei, s.a_t_n / 2.0, &p);
    assert!(common::rel(halved, 2.0 * r) < 1e-14);
}

#[test]
fn no_lam_coefficients_means_constant_area() {
    let (p, s) = state();
    let rates = lam_rates(&s, &p, 1e7);
    assert_eq!(rates.negative.fracture_area, 0.0);
    assert_eq!(rates.negative.inactive_rate, 0.0);
    assert_eq!(s.a_t_n, 3.0 / p.geometry.r_n);
    assert_eq!(s.a_t_p, 3.0 / p.geometry.r_p);
}

/// Integrates the LAM equations with `dt` up to `horizon` and returns the
/// largest relative deviation from the closed form on both electrodes.
fn lam_error(kprime: [f64; 2], betaprime: [f64; 2], dt: f64, horizon: f64) -> f64 {
    let (mut p, mut s) = state();
    p.aging.kprime_p = kprime[0];
    p.aging.betaprime_p = betaprime[0];
    p.aging.kprime_n = kprime[1];
    p.aging.betaprime_n = betaprime[1];
    let steps = (horizon / dt).round() as usize;
    let mut worst: f64 = 0.0;
    for k in 0..steps {
        advance_lam(&mut s, &p, dt).unwrap();
        s.t = (k + 1) as f64 * dt;
        for (e, a_t) in [(Electrode::Positive, s.a_t_p), (Electrode::Negative, s.a_t_n)] {
            worst = worst.max(common::rel(a_t, total_area_closed_form(&p, e, s.t)));
        }
    }
    worst
}

#[test]
fn lam_integrator_matches_the_closed_form_at_every_table_corner() {
    for kp in CATHODE_KPRIME {
        for bp in CATHODE_BETAPRIME {
            for kn in ANODE_KPRIME {
                for bn in ANODE_BETAPRIME {
                    let err = lam_error([kp, kn], [bp, bn], 100.0, 1e7);
                    assert!(err < 1e-6, "({kp:e},{bp:e}) ({kn:e},{bn:e}): {err:e}");
                }
            }
        }
    }
}

#[test]
fn closed_form_special_cases() {
    let (mut p, _) = state();
    let a = p.specific_area(Electrode::Negative);
    p.aging.kprime_n = 0.0;
    p.aging.betaprime_n = 2e-9;
    let t = 3e8;
    assert!(common::rel(total_area_closed_form(&p, Electrode::Negative, t), a * (-2e-9 * t).exp()) < 1e-14);
    p.aging.kprime_n = 2e-9;
    assert!(common::rel(total_area_closed_form(&p, Electrode::Negative, t), a) < 1e-14);
    assert_eq!(fracture_area(&p, Electrode::Negative, t), a * 2e-9 * t);
}

#[test]
fn equal_coefficients_keep_the_area_during_a_long_integration() {
    let err = lam_error([5e-10, 5e-10], [5e-10, 5e-10], 100.0, 1e7);
    assert!(err < 1e-12, "{err:e}");
}

#[test]
fn regimes_of_the_published_coefficients() {
    for (k, b) in CATHODE_KPRIME.iter().zip(CATHODE_BETAPRIME) {
        let c = classify_lam_regime(*k, b, DEFAULT_REGIME_TOLERANCE).unwrap();
        assert_eq!(c.regime, LamRegime::FractureDominated, "{k:e} {b:e}");
    }
    let minima = classify_lam_regime(3.06e-11, 0.198e-11, DEFAULT_REGIME_TOLERANCE).unwrap();
    assert!((minima.margin + 14.45).abs() < 0.01);
    for k in ANODE_KPRIME {
        for b in ANODE_BETAPRIME {
            let c = classify_lam_regime(k, b, DEFAULT_REGIME_TOLERANCE).unwrap();
            assert_eq!(c.regime, LamRegime::IsolationDominated, "{k:e} {b:e}");
        }
    }
    let minima = classify_lam_regime(1.40e-10, 0.741e-9, DEFAULT_REGIME_TOLERANCE).unwrap();
    assert!((minima.margin - 0.811).abs() < 0.001);
}

#[test]
fn regime_edges() {
    let c = classify_lam_regime(1e-9, 1e-9, DEFAULT_REGIME_TOLERANCE).unwrap();
    assert_eq!((c.regime, c.margin), (LamRegime::Balanced, 0.0));
    assert_eq!(c.regime.case_label(), "i");
    assert!(classify_lam_regime(1e-9, 0.0, DEFAULT_REGIME_TOLERANCE).is_err());
    // Margin exactly -1 lies in no band.
    let c = classify_lam_regime(2.0, 1.0, DEFAULT_REGIME_TOLERANCE).unwrap();
    assert_eq!(c.regime, LamRegime::Unclassified);
    // A margin of exactly the tolerance still counts as balanced.
    let c = classify_lam_regime(0.75, 1.0, 0.25).unwrap();
    assert_eq!(c.regime, LamRegime::Balanced);
}

#[test]
fn porosity_responds_to_lam_and_film() {
    let (p, mut s) = state();
    let (eps_p, eps_n) = porosity_update(&s, &p).unwrap();
    assert_eq!((eps_p, eps_n), (s.eps_p, s.eps_n));
    s.a_ina_n = 1e4;
    s.a_f_n = 2e3;
    assert!(porosity_update(&s, &p).unwrap().1 > eps_n);
    let (_, s) = state();
    let filmed = s.with_film(InitialFilm { l_sei: 1e-9, l_li: 0.0 }, &p).unwrap();
    assert!(filmed.eps_n < eps_n);
    let (_, mut s) = state();
    s.l_film = 1.0;
    assert!(porosity_update(&s, &p).is_err());
}

#[test]
fn cycle_coefficients_use_one_cycle_duration() {
    let t_k = 7.57e-7 / 1.40e-10;
    let t_b = 4e-6 / 0.741e-9;
    assert!(common::rel(t_k, t_b) < 0.01);
    assert!((t_k - 5.4e3).abs() / 5.4e3 < 0.01);
    assert_eq!(cycle_to_time_coefficients(3.0, 5.0, 1.0).unwrap(), (3.0, 5.0));
    let (k1, b1) = cycle_to_time_coefficients(7.57e-7, 4e-6, 5400.0).unwrap();
    let (k2, b2) = cycle_to_time_coefficients(7.57e-7, 4e-6, 10800.0).unwrap();
    assert_eq!((k1 / 2.0, b1 / 2.0), (k2, b2));
    assert!(cycle_to_time_coefficients(1.0, 1.0, 0.0).is_err());
}

#[test]
fn inert_runs_leave_aging_state_untouched() {
    let cell = common::inert_cell();
    let start = cell.initial_state(1.0, InitialFilm::default()).unwrap();
    let mut s = start.clone();
    for _ in 0..500 {
        s = cell.step(&s, 4.133, 1.0).unwrap().0;
    }
    assert_eq!(
        (s.c_sei, s.c_li, s.l_sei, s.l_li, s.l_film),
        (start.c_sei, start.c_li, start.l_sei, start.l_li, start.l_film)
    );
    assert_eq!((s.a_f_n, s.a_ina_n, s.a_t_n, s.eps_n), (start.a_f_n, start.a_ina_n, start.a_t_n, start.eps_n));
    assert_eq!((s.a_f_p, s.a_ina_p, s.a_t_p, s.eps_p), (start.a_f_p, start.a_ina_p, start.a_t_p, start.eps_p));
}

#[test]
fn side_species_never_decrease_along_a_discharge() {
    let config = common::config("aged3300.json");
    let cell = config.build_cell().unwrap();
    let mut s = cell.initial_state(1.0, config.initial_film()).unwrap();
    let (mut c_sei, mut c_li) = (s.c_sei, s.c_li);
    for _ in 0..2000 {
        s = cell.step(&s, 3.0, 1.0).unwrap().0;
        assert!(s.c_sei >= c_sei && s.c_li >= c_li);
        assert!(s.a_ina_n >= 0.0);
        assert_eq!(s.l_film, s.l_sei + s.l_li);
        (c_sei, c_li) = (s.c_sei, s.c_li);
    }
    assert!(c_sei > 0.0 && c_li > 0.0);
}

#[test]
fn film_resistance_rises_with_the_isolation_coefficient() {
    let cell = common::cell();
    let film = InitialFilm { l_sei: 0.085 * cell.params().aging.kappa_sei, l_li: 0.0 };
    let horizon = 3300.0 * 5400.0;
    let mut last = 0.0;
    for b in [0.741e-9, 2e-9, 4e-9, 7e-9, 9.59e-9] {
        let mut p = espm::sweep::constant_cathode_area(cell.params());
        p.aging.kprime_n = 1.40e-10;
        p.aging.betaprime_n = b;
        let aged = cell.with_params(p).unwrap();
        let s = aged_state(&aged, 1.0, film, horizon, 100.0).unwrap();
        let r = film_resistance(s.l_sei, s.a_t_n, aged.params());
        assert!(r > last, "{b:e}: {r} <= {last}");
        last = r;
    }
}
