use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twoweight::corona::{build_stopping_tree, PairCollection, Side, StoppingInput, DEFAULT_C0};
use twoweight::dyadic::{Grid, GridParams};
use twoweight::haar::analyze;
use twoweight::io::*;
use twoweight::measure::{Measure1D, Measure2D};
use twoweight::Error;

#[test]
fn measure_json_round_trip() {
    let line = Measure1D::line(&[(0.25, 1.0), (-3.0, 0.5)]).unwrap();
    let json = serde_json::to_string(&line_to_file(&line)).unwrap();
    assert_eq!(measure_from_json(&json).unwrap().into_line().unwrap(), line);
    let plane = Measure2D::half_plane(&[(0.25, 0.5, 1.0)]).unwrap();
    let json = serde_json::to_string(&plane_to_file(&plane)).unwrap();
    assert_eq!(measure_from_json(&json).unwrap().into_plane().unwrap(), plane);

    let m = measure_from_json(r#"{"domain": "disk", "atoms": [[0.5, 0.0, 2.0]]}"#).unwrap().into_plane().unwrap();
    assert_eq!(m.total_mass(), 2.0);
    assert!(measure_from_json(r#"{"domain": "circle", "atoms": [[1.0, 1.0]]}"#).unwrap().into_plane().is_err());
}

#[test]
fn malformed_measures_are_rejected() {
    assert!(matches!(measure_from_json(r#"{"domain": "sphere", "atoms": []}"#), Err(Error::Invalid(_))));
    assert!(matches!(measure_from_json(r#"{"domain": "line", "atoms": [[1.0]]}"#), Err(Error::InvalidAtom(_))));
    assert!(measure_from_json(r#"{"domain": "line", "atoms": [[1.0, -1.0]]}"#).is_err());
    assert!(measure_from_json(r#"{"domain": "half-plane", "atoms": [[1.0, -1.0, 1.0]]}"#).is_err());
    assert!(measure_from_json("not json").is_err());
}

#[test]
fn measure_csv_import() {
    let text = "# comment\nx1,x2,mass\n0.1, 0.2, 1.5\n0.4,0.3,2\n";
    let m = measure_from_csv(text.as_bytes(), "half-plane").unwrap().into_plane().unwrap();
    assert_eq!(m.len(), 2);
    assert_eq!(m.total_mass(), 3.5);
    let m = measure_from_csv("0.5,1\n0.7,2\n".as_bytes(), "line").unwrap().into_line().unwrap();
    assert_eq!(m.positions(), vec![0.5, 0.7]);
    assert!(measure_from_csv("0.5,1\nabc,2\n".as_bytes(), "line").is_err());
}

#[test]
fn measure_files_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("m.json");
    std::fs::write(&json, r#"{"domain": "line", "atoms": [[0.5, 1.0]]}"#).unwrap();
    assert_eq!(read_measure(&json).unwrap().into_line().unwrap().len(), 1);
    let csv = dir.path().join("m.csv");
    std::fs::write(&csv, "0.5,1\n").unwrap();
    assert!(read_measure(&csv).is_err());
    assert_eq!(read_measure_csv(&csv, "circle").unwrap().into_line().unwrap().len(), 1);
    assert!(matches!(read_measure(dir.path().join("missing.json")), Err(Error::Io(_))));
}

proptest! {
    #[test]
    fn grid_json_round_trip(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::sample(GridParams::new(0.3, 3, -12, 4).unwrap(), &mut rng).unwrap();
        let back = grid_from_json(&grid_to_json(&g).unwrap()).unwrap();
        prop_assert_eq!(back.xi(), g.xi());
        prop_assert_eq!(back.lambda(), g.lambda());
        for k in -12..=4 {
            prop_assert_eq!(back.locate(0.123, k).unwrap().span(), g.locate(0.123, k).unwrap().span());
        }
    }
}

#[test]
fn grid_json_validation() {
    let bad = r#"{"xi": [0, 2], "lambda": 1.0, "epsilon": 0.5, "r": 2, "window": [-1, 0]}"#;
    assert!(grid_from_json(bad).is_err());
    let bad = r#"{"xi": [0, 1], "lambda": 1.0, "epsilon": 1.5, "r": 2, "window": [-1, 0]}"#;
    assert!(grid_from_json(bad).is_err());
}

#[test]
fn inner_function_json() {
    let f = inner_from_json(r#"{"zeros": [[0.5, 0.0], [0.0, -0.25]], "singular": [[1.0, 0.5]]}"#).unwrap();
    assert_eq!(f.degree(), 2);
    assert_eq!(f.singular, vec![(1.0, 0.5)]);
    assert!(inner_from_json(r#"{"zeros": [[0.0, 0.0]]}"#).unwrap().singular.is_empty());
    assert!(inner_from_json(r#"{"zeros": [[1.0, 0.0]]}"#).is_err());
}

#[test]
fn tree_and_pair_dumps() {
    let g = Grid::standard(GridParams::new(0.5, 2, -12, 0).unwrap()).unwrap();
    let sigma = Measure1D::line(&[(0.3, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.25, 0.1, 1.0), (0.5, 0.8, 10.0), (0.75, 0.1, 1.0)]).unwrap();
    let input = StoppingInput {
        sigma: &sigma,
        tau: &tau,
        grid: &g,
        values: &[100.0, 1.0, 1.0],
        root: g.interval(0, 0).unwrap(),
        c0: DEFAULT_C0,
        r_char: 1.0,
    };
    let tree = build_stopping_tree(Side::G, &input).unwrap();
    let v: serde_json::Value = serde_json::from_str(&tree_to_json(&tree).unwrap()).unwrap();
    assert_eq!(v["side"], "g");
    assert_eq!(v["roots"][0]["cause"], "root");
    assert_eq!(v["roots"][0]["children"][0]["cause"], "large-average");
    assert_eq!(v["roots"][0]["children"][0]["k"], -1);

    let coll = PairCollection { pairs: vec![(g.interval(0, 0).unwrap(), g.interval(-9, 100).unwrap())] };
    let json = pairs_to_json(&coll).unwrap();
    assert_eq!(json, "[[[0,0],[-9,100]]]");
    let back = pairs_from_json(&json, &g).unwrap();
    assert_eq!(back.pairs, coll.pairs);
    assert!(pairs_from_json("[[[5,0],[0,0]]]", &g).is_err());
}

#[test]
fn expansion_csv_rows() {
    let g = Grid::standard(GridParams::new(0.5, 2, -4, 0).unwrap()).unwrap();
    let sigma = Measure1D::line(&[(0.3, 1.0), (0.7, 1.0)]).unwrap();
    let exp = analyze(&sigma, &[1.0, -1.0], &g).unwrap();
    let mut out = Vec::new();
    write_expansion_csv(&exp, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scale,position,coefficient"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), exp.terms.len());
    let top = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!((top[2].abs() - 2f64.sqrt()).abs() < 1e-12);
}
