use std::process::{Command, Output};

use cubezeta::algebra::IntPoly;
use cubezeta::lattice::SpectrumDump;
use cubezeta::report::{OrbitsReport, PsiReport};
use cubezeta::verify::VerifyReport;
use cubezeta::zeta::ZetaInverse;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubezeta"))
        .args(args)
        .env_remove("CUBEZETA_MAX_DEGREE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

/// Parses JSON output both generically and into `T`, and checks they agree.
fn round_trip<T: serde::de::DeserializeOwned + serde::Serialize>(args: &[&str]) -> T {
    let o = run(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let raw: Value = serde_json::from_str(&text).unwrap();
    let typed: T = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_value(&typed).unwrap(), raw);
    typed
}

#[test]
fn cycle_zeta_text() {
    let o = run(&["zeta", "--n", "5", "--d", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("zeta_inverse: 1 0 0 0 0 -2 0 0 0 0 1\n"));
}

#[test]
fn zeta_two_by_two_factors() {
    let z: ZetaInverse = round_trip(&["zeta", "--n", "2,2", "--format", "json"]);
    let tuples: Vec<Vec<u64>> = z.factors.iter().map(|f| f.dvec.clone()).collect();
    assert_eq!(tuples, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
    assert!(z.factors.iter().all(|f| f.exponent == 1));
    let text = stdout(&run(&["zeta", "--n", "2,2"]));
    for t in ["(1,1)", "(1,2)", "(2,1)", "(2,2)"] {
        assert!(text.contains(&format!("factor {t} exponent 1")), "{text}");
    }
}

#[test]
fn zeta_json_factor_count() {
    let z: ZetaInverse = round_trip(&["zeta", "--n", "4,6", "--format", "json"]);
    assert_eq!(z.factors.len(), 12);
    assert_eq!(z.expand_factored().unwrap(), z.poly);
    let z: ZetaInverse = round_trip(&["zeta", "--n", "2,3", "--d", "1", "--format", "json"]);
    assert_eq!(z.d, 1);
}

#[test]
fn psi_outputs() {
    assert!(stdout(&run(&["psi", "--d", "9"])).contains("psi (9): 1 -3 0 1\n"));
    assert!(stdout(&run(&["psi", "--d", "9", "--pretty"])).contains("x^3 - 3x + 1"));
    let r: PsiReport = round_trip(&["psi", "--d", "5,5", "--orbit-split", "--format", "json"]);
    let o = r.orbits.unwrap();
    let polys: Vec<IntPoly> = o.iter().map(|x| x.poly.clone()).collect();
    assert_eq!(
        polys,
        vec![
            IntPoly::from_i64s(&[-4, 2, 1]),
            IntPoly::from_i64s(&[1, 2, 1])
        ]
    );
    assert_eq!(
        (o[1].multiplicity, o[1].irr_core.clone()),
        (2, IntPoly::from_i64s(&[1, 1]))
    );
    let r: PsiReport = round_trip(&["psi", "--d", "3,5", "--orbit-split", "--format", "json"]);
    let o = r.orbits.unwrap();
    assert_eq!(o.len(), 1);
    assert!(o[0].irreducible);
    assert_eq!(o[0].poly.degree(), Some(2));
}

#[test]
fn orbits_and_spectrum_round_trip() {
    let r: OrbitsReport = round_trip(&["orbits", "--d", "8,12", "--format", "json"]);
    assert_eq!((r.count, r.formula), (1, 1));
    let r: OrbitsReport = round_trip(&["orbits", "--d", "7,7,7", "--format", "json"]);
    assert_eq!(r.count, 9);
    let s: SpectrumDump = round_trip(&["spectrum", "--n", "2,2", "--d", "1", "--format", "json"]);
    assert_eq!(s.eigenvalues, vec![(0.0, 5), (4.0, 2), (8.0, 1)]);
}

#[test]
fn verify_examples() {
    assert_eq!(
        code(&["verify", "orbits", "--qmax", "3", "--dmax", "20"]),
        0
    );
    assert_eq!(code(&["verify", "bass", "--cases", "default"]), 0);
    let o = run(&["verify", "linear-table", "--dmax", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains(
        "families found up to 50: x-lambda, (m,m) 4|m O(1,m/2-1), (m,2m) m odd O(1,m-2), (5,5) O(1,2), (10,10) O(1,3)"
    ));
    let r: VerifyReport = round_trip(&["verify", "geodesics", "--format", "json"]);
    assert!(r.all_pass);
}

#[test]
fn observations_never_fail() {
    let r: VerifyReport =
        round_trip(&["verify", "observations", "--dmax", "12", "--format", "json"]);
    assert!(r.reporting_only);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["zeta", "--bogus"]), 2);
    assert_eq!(code(&["zeta", "--n", "1"]), 2);
    assert_eq!(code(&["zeta", "--n", "3", "--d", "2"]), 2);
    assert_eq!(code(&["verify", "nope"]), 2);
    assert_eq!(code(&["verify", "bass", "--cases", "huge"]), 2);
    assert_eq!(code(&["psi", "--d", "1000,999,997"]), 3);
    assert_eq!(code(&["zeta", "--n", "200,200,200", "--d", "2"]), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_cubezeta"))
        .args(["verify", "cor13"])
        .env("CUBEZETA_MAX_DEGREE", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn deterministic_output() {
    for args in [
        vec!["zeta", "--n", "3,4", "--format", "json"],
        vec!["psi", "--d", "7,9", "--orbit-split"],
        vec!["verify", "spectra"],
    ] {
        let a = run(&args);
        let b = run(&["--threads", "1"]
            .iter()
            .chain(&args)
            .copied()
            .collect::<Vec<_>>());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
