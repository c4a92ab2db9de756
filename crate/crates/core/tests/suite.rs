use std::time::Instant;

use twoweight::dyadic::GridParams;
use twoweight::measure::{Measure1D, Measure2D};
use twoweight::suite::*;

fn small_config() -> SuiteConfig {
    SuiteConfig {
        instances: 8,
        atoms: [6, 10],
        grid: GridParams::new(0.5, 2, -16, 2).unwrap(),
        n_shift: 1,
        haar_instances: 2,
        energy_instances: 2,
        corona_instances: 4,
        overlap_samples: 200,
        monotonicity_configs: 10,
        bigger_samples: 200,
        hardy_pairs: 5,
        grid_stats: GridStatsConfig { trials: 200, grids: 10, atoms: 16, ..GridStatsConfig::default() },
        disk: DiskConfig { max_degree: 3, per_degree: 2, instances: 2 },
        ..SuiteConfig::default()
    }
}

#[test]
fn rank_one_instance() {
    let config = SuiteConfig::default();
    let sigma = Measure1D::line(&[(0.5, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.5, 0.5, 1.0)]).unwrap();
    let rep = verify_instance(&config, 0, &sigma, &tau, None, Checks::default());
    let c = rep.constants.expect("constants");
    assert!((c.n_direct - 2.0).abs() < 1e-12);
    assert!((c.testing() - 2.0).abs() < 1e-12);
    assert_eq!(rep.necessity, Some(true));
    assert!((rep.ratio.unwrap() - c.n_direct / c.r_char).abs() < 1e-15);
}

#[test]
fn zero_tau_gives_zero_constants() {
    let config = SuiteConfig::default();
    let sigma = Measure1D::line(&[(0.1, 1.0), (0.6, 2.0)]).unwrap();
    let tau = Measure2D::half_plane(&[]).unwrap();
    let checks = Checks { refine: true, haar: true, energy: true, corona: true };
    let rep = verify_instance(&config, 3, &sigma, &tau, None, checks);
    assert_eq!(rep.error, None);
    let c = rep.constants.unwrap();
    assert_eq!((c.a2, c.t_forward, c.t_backward, c.n_direct), (0.0, 0.0, 0.0, 0.0));
    assert_eq!(rep.ratio, Some(0.0));
    assert_eq!(rep.necessity, Some(true));
    assert!(rep.corona.is_none());
}

#[test]
fn shared_point_mass_is_flagged() {
    let config = SuiteConfig::default();
    let sigma = Measure1D::line(&[(0.3, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.3, 0.0, 1.0)]).unwrap();
    let rep = verify_instance(&config, 0, &sigma, &tau, None, Checks::default());
    assert!(rep.flagged.is_some() || rep.error.is_some());
    assert!(rep.constants.is_none());
}

#[test]
fn same_seed_same_report() {
    let config = small_config();
    let (a, _) = run_suite(&config).unwrap();
    let (b, _) = run_suite(&config).unwrap();
    let ja = serde_json::to_string(&a).unwrap();
    assert_eq!(ja, serde_json::to_string(&b).unwrap());
    assert_eq!(a.verdicts.len(), 9);
    assert_eq!(a.instances.len(), config.instances);
    let other = SuiteConfig { seed: config.seed + 1, ..config };
    assert_ne!(ja, serde_json::to_string(&run_suite(&other).unwrap().0).unwrap());
}

#[test]
fn zero_tolerance_fails() {
    let mut config = small_config();
    config.tolerances.haar = 0.0;
    let (rep, _) = run_suite(&config).unwrap();
    let haar = rep.verdicts.iter().find(|v| v.criterion == 4).unwrap();
    assert_eq!(haar.status, Status::Fail);
    assert!(!rep.passed());
    assert_ne!(rep.exit_code(), 0);
}

#[test]
fn config_validation() {
    let config = SuiteConfig { atoms: [5, 3], ..SuiteConfig::default() };
    assert!(config.validate().is_err());
    assert!(run_suite(&config).is_err());
    let parsed: SuiteConfig = serde_json::from_str(r#"{"seed": 7, "instances": 3}"#).unwrap();
    assert_eq!((parsed.seed, parsed.instances, parsed.c0), (7, 3, 64.0));
    assert!(serde_json::from_str::<SuiteConfig>(r#"{"sed": 7}"#).is_err());
}

#[test]
fn instance_rows_cover_every_instance() {
    let config = small_config();
    let (rep, timings) = run_suite(&config).unwrap();
    assert_eq!(instance_rows(&rep).len(), config.instances);
    assert!(timings.get("instances").is_some());
}

#[test]
fn sixty_four_atom_instance_is_fast() {
    let config = SuiteConfig::default();
    let mut rng = rand::SeedableRng::seed_from_u64(5);
    let (sigma, tau) = generate(Family::Nested, 64, 0, &mut rng).unwrap();
    let start = Instant::now();
    let rep = verify_instance(&config, 0, &sigma, &tau, None, Checks::default());
    let secs = start.elapsed().as_secs_f64();
    assert!(rep.constants.is_some());
    assert!(secs < 2.0, "took {secs} s");
}
