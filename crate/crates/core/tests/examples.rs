//! Every example runs and shows what it claims.

#[allow(dead_code)]
#[path = "../examples/convergence_study.rs"]
mod convergence_study;
#[allow(dead_code)]
#[path = "../examples/custom_system.rs"]
mod custom_system;
#[allow(dead_code)]
#[path = "../examples/disc_grid.rs"]
mod disc_grid;
#[allow(dead_code)]
#[path = "../examples/integrability.rs"]
mod integrability;
#[allow(dead_code)]
#[path = "../examples/maximum_principle.rs"]
mod maximum_principle;
#[allow(dead_code)]
#[path = "../examples/plastic_families.rs"]
mod plastic_families;
#[allow(dead_code)]
#[path = "../examples/potential_reconstruction.rs"]
mod potential_reconstruction;
#[allow(dead_code)]
#[path = "../examples/split_and_cross_triple.rs"]
mod split_and_cross_triple;
#[allow(dead_code)]
#[path = "../examples/verify_suite.rs"]
mod verify_suite;

#[test]
fn disc_grid_example() {
    let (err, integral) = disc_grid::run_example().unwrap();
    assert!(err < 1.0 / 1024.0);
    assert!((integral - std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn split_example() {
    let (fwd, r) = split_and_cross_triple::run_example().unwrap();
    assert!(fwd < 1e-12);
    assert_eq!(r, [1.0, -2.5]);
}

#[test]
fn integrability_example() {
    assert!(integrability::run_example().unwrap() < 1e-10);
}

#[test]
fn maximum_principle_example() {
    let [stat, costate, trans] = maximum_principle::run_example().unwrap();
    assert!(stat.max_norm < 1e-12);
    assert!(costate.max_norm < 0.05);
    assert!(trans.max_norm < 1e-12);
    assert_eq!(trans.m, Some(360));
}

#[test]
fn plastic_families_example() {
    assert!(plastic_families::run_example().unwrap() < 1e-12);
}

#[test]
fn custom_system_example() {
    assert!(custom_system::run_example().unwrap() < 1e-10);
}

#[test]
fn convergence_example() {
    let rows = convergence_study::run_example(bitime::plastic::FamilyKind::Quadratic).unwrap();
    assert!(rows
        .iter()
        .all(|r| r.status != bitime::convergence::ConvergenceStatus::OutsideWindow));
}

#[test]
fn potential_example() {
    let (diff, err) = potential_reconstruction::run_example().unwrap();
    assert!(diff < 1e-12 && err < 1e-12);
}

#[test]
fn verify_example() {
    let report = verify_suite::run_example().unwrap();
    assert!(report.check("(27)", "boundary conditions").unwrap().passed);
}
