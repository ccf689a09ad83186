mod common;

use espm::config::parse_parameters;
use espm::{initial_state, load_parameters, save_parameters, Electrode, Error};
use proptest::prelude::*;

fn fresh_json() -> serde_json::Value {
    let text = std::fs::read_to_string(common::config_path("fresh.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn shipped_configs_load() {
    for name in ["fresh.json", "aged1000.json", "aged3300.json"] {
        let config = common::config(name);
        config.build_cell().unwrap();
    }
}

#[test]
fn accepts_published_anode_fraction() {
    let p = load_parameters(&common::config_path("fresh.json")).unwrap();
    assert_eq!(p.composition.v_n, 0.54);
}

#[test]
fn rejects_transference_number_above_one() {
    let mut v = fresh_json();
    v["transport"]["t_plus"] = serde_json::json!(1.2);
    match parse_parameters(&v.to_string()) {
        Err(Error::Invariant { field, .. }) => assert!(field.contains("t_plus"), "{field}"),
        other => panic!("expected an invariant error, got {other:?}"),
    }
}

#[test]
fn missing_contact_resistance_is_a_parse_error_naming_it() {
    let mut v = fresh_json();
    v["resistances"].as_object_mut().unwrap().remove("r_l");
    match parse_parameters(&v.to_string()) {
        Err(e @ Error::Parse { .. }) => assert!(e.to_string().contains("r_l"), "{e}"),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn initial_state_at_full_and_empty_charge() {
    let p = common::params();
    let mesh = common::fresh().mesh;
    let full = initial_state(&p, &mesh, 1.0).unwrap();
    let empty = initial_state(&p, &mesh, 0.0).unwrap();
    let s = &p.stoichiometry;
    let c = &p.composition;
    let uniform_at = |v: &[f64], target: f64| v.iter().all(|&x| common::rel(x, target) < 1e-14);
    assert!(uniform_at(&full.c_s_n, s.theta_n_100 * c.c_s_max_n));
    assert!(uniform_at(&full.c_s_p, s.theta_p_100 * c.c_s_max_p));
    assert!(uniform_at(&empty.c_s_n, s.theta_n_0 * c.c_s_max_n));
    assert!(uniform_at(&empty.c_s_p, s.theta_p_0 * c.c_s_max_p));
    assert!(full.c_e.iter().all(|&x| x == p.electrolyte.nominal_concentration));
    assert_eq!((full.a_f_n, full.a_ina_n, full.c_sei, full.c_li), (0.0, 0.0, 0.0, 0.0));
    assert_eq!(full.a_t_n, p.specific_area(Electrode::Negative));
    assert_eq!(full.l_film, 0.0);
}

#[test]
fn half_charge_lands_mid_window() {
    let p = common::params();
    let state = initial_state(&p, &common::fresh().mesh, 0.5).unwrap();
    let theta_n = state.c_s_n[0] / p.composition.c_s_max_n;
    assert!((theta_n - 0.5).abs() < 1e-12);
}

#[test]
fn soc_outside_unit_interval_is_rejected() {
    let p = common::params();
    let mesh = common::fresh().mesh;
    assert!(initial_state(&p, &mesh, 1.01).is_err());
    assert!(initial_state(&p, &mesh, -0.01).is_err());
}

#[test]
fn fresh_porosity_is_one_minus_solid_fractions() {
    let p = common::params();
    let state = initial_state(&p, &common::fresh().mesh, 1.0).unwrap();
    assert!((state.eps_n - (1.0 - 0.54 - 0.06)).abs() < 1e-15);
    assert!((state.eps_p - (1.0 - 0.5 - 0.1)).abs() < 1e-15);
}

#[test]
fn save_then_load_is_bit_identical() {
    let p = common::params();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    save_parameters(&p, &path).unwrap();
    assert_eq!(load_parameters(&path).unwrap(), p);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips_arbitrary_values(
        a_cell in 0.1f64..2.0,
        r_n in 1e-6f64..2e-5,
        d_s in 1e-15f64..1e-12,
        k_f in 0.0f64..1e-10,
        theta in 0.3f64..0.99,
    ) {
        let mut p = common::params();
        p.geometry.a_cell = a_cell;
        p.geometry.r_n = r_n;
        p.transport.d_s_ref_n = d_s;
        p.kinetics.k_f = k_f;
        p.stoichiometry.theta_n_100 = theta;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        save_parameters(&p, &path).unwrap();
        let back = load_parameters(&path).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn initial_soc_round_trips(soc0 in 0.0f64..=1.0) {
        let p = common::params();
        let state = initial_state(&p, &common::fresh().mesh, soc0).unwrap();
        let (soc_n, soc_p) = espm::cell::soc(&state, &p);
        prop_assert!((soc_n - soc0).abs() < 1e-12, "{} vs {}", soc_n, soc0);
        prop_assert!((soc_p - soc0).abs() < 1e-12, "{} vs {}", soc_p, soc0);
    }
}
