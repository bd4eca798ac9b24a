//! Library values against the high-precision fixture file.

use hurwitz_frobenius::cli::library_fixtures;
use hurwitz_frobenius::fixtures::Fixtures;
use hurwitz_frobenius::specialfn::{gamma_chazy, Modulus, SeriesConfig};
use hurwitz_frobenius::C64;

fn oracle() -> Fixtures {
    Fixtures::load_default().expect("fixture file readable")
}

fn close(name: &str, got: C64, want: C64, tol: f64) {
    let err = (got - want).norm() / want.norm().max(1.0);
    assert!(err < tol, "{name}: got {got}, oracle {want}, relative error {err:.3e}");
}

#[test]
fn every_library_value_matches_the_oracle() {
    let o = oracle();
    let lib = library_fixtures().unwrap();
    for name in ["T1P_I", "ETA_I", "ETA1_LEMN", "OMEGA_LEMN", "RF_012", "ROT_LEMN_01", "F_S_PT1"] {
        close(name, lib.get(name).unwrap(), o.get(name).unwrap(), 1e-12);
    }
}

#[test]
fn gamma_at_the_square_lattice() {
    let g = gamma_chazy(Modulus::new(C64::new(0.0, 1.0)).unwrap(), &SeriesConfig::default()).unwrap();
    close("GAMMA_I", g, oracle().get("GAMMA_I").unwrap(), 1e-13);
}

#[test]
fn legendre_relation_on_the_square_lattice() {
    // eta1 omega' - eta2 omega = i pi / 2 with omega' = i omega and eta2 = -i eta1
    let o = oracle();
    let w = o.get("OMEGA_LEMN").unwrap();
    let e1 = o.get("ETA1_LEMN").unwrap();
    close("legendre", e1 * w * C64::new(0.0, 2.0), C64::new(0.0, std::f64::consts::FRAC_PI_2), 1e-15);
}

#[test]
fn fixture_file_keeps_25_digits() {
    let text = std::fs::read_to_string(Fixtures::default_path()).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let re = json["T1P_I"]["re"].as_str().unwrap();
    let digits = re.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
    assert!(digits.trim_start_matches('0').len() >= 25, "{re}");
}
