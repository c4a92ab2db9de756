use approx::assert_abs_diff_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twoweight::constants::{characterization, interval_family};
use twoweight::corona::*;
use twoweight::dyadic::{Grid, GridParams};
use twoweight::measure::{Measure1D, Measure2D};
use twoweight::suite::{admissible_grid, corona_check, generate, CoronaInput, Family};

fn grid(r: u32) -> Grid {
    Grid::standard(GridParams::new(0.5, r, -12, 0).unwrap()).unwrap()
}

fn root_node(g: &Grid) -> StopNode {
    StopNode {
        interval: g.interval(0, 0).unwrap(),
        parent: None,
        children: Vec::new(),
        cause: StopCause::Root,
        average: 0.0,
        energy: 0.0,
    }
}

#[test]
fn constant_g_with_single_atom_sigma_is_root_only() {
    let g = grid(2);
    let sigma = Measure1D::line(&[(0.3, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.2, 0.1, 1.0), (0.7, 0.05, 1.0), (0.4, 0.6, 2.0)]).unwrap();
    let input = StoppingInput {
        sigma: &sigma,
        tau: &tau,
        grid: &g,
        values: &[1.0, 1.0, 1.0],
        root: g.interval(0, 0).unwrap(),
        c0: DEFAULT_C0,
        r_char: 1.0,
    };
    let tree = build_stopping_tree(Side::G, &input).unwrap();
    assert_eq!(tree.nodes.len(), 1);
    assert_eq!(tree.nodes[0].cause, StopCause::Root);
    assert_eq!(tree.carleson_ratio(&sigma, &tau), 0.0);
}

#[test]
fn large_child_average_stops() {
    let g = grid(2);
    let sigma = Measure1D::line(&[(0.3, 1.0)]).unwrap();
    // positions sort as (0.25), (0.5), (0.75)
    let tau = Measure2D::half_plane(&[(0.25, 0.1, 1.0), (0.5, 0.8, 10.0), (0.75, 0.1, 1.0)]).unwrap();
    let values = [100.0, 1.0, 1.0];
    let input = StoppingInput {
        sigma: &sigma,
        tau: &tau,
        grid: &g,
        values: &values,
        root: g.interval(0, 0).unwrap(),
        c0: DEFAULT_C0,
        r_char: 1.0,
    };
    let tree = build_stopping_tree(Side::G, &input).unwrap();
    assert_eq!(tree.nodes.len(), 2);
    let child = &tree.nodes[1];
    assert_eq!(child.interval, g.interval(-1, 0).unwrap());
    assert_eq!(child.cause, StopCause::LargeAverage);
    assert_eq!(child.parent, Some(0));
    assert_abs_diff_eq!(child.average, 100.0, epsilon = 1e-12);
    assert_abs_diff_eq!(tree.carleson_ratio(&sigma, &tau), 1.0 / 12.0, epsilon = 1e-15);
    assert_eq!(tree.parent_of(&g.interval(-3, 1).unwrap()), Some(1));
    assert_eq!(tree.parent_of(&g.interval(-3, 5).unwrap()), Some(0));
}

#[test]
fn manual_tree_carleson_ratio() {
    let g = grid(2);
    let sigma = Measure1D::line(&[]).unwrap();
    let tau = Measure2D::half_plane(&[(0.1, 0.1, 0.2), (0.6, 0.1, 0.2), (0.5, 0.8, 0.6)]).unwrap();
    let mut nodes = vec![root_node(&g)];
    for n in 0..2 {
        nodes.push(StopNode {
            interval: g.interval(-1, n).unwrap(),
            parent: Some(0),
            children: Vec::new(),
            cause: StopCause::LargeAverage,
            average: 0.0,
            energy: 0.0,
        });
    }
    nodes[0].children = vec![1, 2];
    let tree = StoppingTree { side: Side::G, c0: DEFAULT_C0, nodes };
    assert_abs_diff_eq!(tree.carleson_ratio(&sigma, &tau), 0.4, epsilon = 1e-15);
    assert_abs_diff_eq!(tree.carleson_ratio_descendants(&sigma, &tau), 0.4, epsilon = 1e-15);
}

#[test]
fn zero_f_gives_zero_quasi_orthogonality() {
    let g = grid(2);
    let sigma = Measure1D::line(&[(0.3, 1.0), (0.6, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.2, 0.1, 1.0), (0.7, 0.05, 1.0)]).unwrap();
    let tree = StoppingTree { side: Side::G, c0: DEFAULT_C0, nodes: vec![root_node(&g)] };
    assert_eq!(quasi_orthogonality_ratio(&tree, &sigma, &tau, &g, &[0.0, 0.0], &[1.0, -1.0]).unwrap(), 0.0);
}

#[test]
fn empty_and_weightless_collections_have_zero_size() {
    let g = grid(2);
    let tree = StoppingTree { side: Side::G, c0: DEFAULT_C0, nodes: vec![root_node(&g)] };
    let tau = Measure2D::half_plane(&[(0.2, 0.1, 1.0), (0.7, 0.05, 1.0)]).unwrap();
    let p1 = g.interval(0, 0).unwrap();
    let p2 = (0..256).map(|n| g.interval(-8, n).unwrap()).find(|j| g.is_good(j)).unwrap();
    let sigma = Measure1D::line(&[(p2.span().center(), 1.0), (0.99, 1.0)]).unwrap();
    let empty = PairCollection { pairs: Vec::new() };
    assert_eq!(size_functional(&empty, &sigma, &tau, &g, &tree, 0).unwrap().size, 0.0);
    let l = select_l_collection(&empty, &sigma, &tau, &g, &tree, 0, 0.5).unwrap();
    assert!(l.layers.iter().all(|x| x.is_empty()));

    // a good P2 holding one σ atom has a zero Haar function
    assert!(g.is_good(&p1));
    let one = PairCollection { pairs: vec![(p1, p2)] };
    let rep = size_functional(&one, &sigma, &tau, &g, &tree, 0).unwrap();
    assert_eq!(rep.size, 0.0);
    assert!(rep.lambda.iter().all(|(_, m)| *m == 0.0));
}

#[test]
fn inadmissible_collection_is_rejected() {
    let g = grid(1);
    let tree = StoppingTree { side: Side::G, c0: DEFAULT_C0, nodes: vec![root_node(&g)] };
    let sigma = Measure1D::line(&[(0.3, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.2, 0.1, 1.0)]).unwrap();
    // P2 only one level below P1
    let coll = PairCollection { pairs: vec![(g.interval(0, 0).unwrap(), g.interval(-1, 0).unwrap())] };
    assert!(matches!(
        size_functional(&coll, &sigma, &tau, &g, &tree, 0),
        Err(twoweight::Error::InadmissibleCollection(_))
    ));
}

#[test]
fn triangular_forms_vanish_for_zero_f() {
    let g = grid(1);
    let sigma = Measure1D::line(&[(0.3, 1.0), (0.6, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.2, 0.1, 1.0), (0.7, 0.05, 1.0)]).unwrap();
    let rep = triangular_forms(&TriangularInput {
        sigma: &sigma,
        tau: &tau,
        grid: &g,
        f: &[0.0, 0.0],
        g: &[0.0, 0.0],
        s_f: -12,
        s_g: -12,
    })
    .unwrap();
    assert_eq!((rep.above, rep.below, rep.full, rep.residual_norm), ([0.0; 2], [0.0; 2], [0.0; 2], 0.0));
    // f = h_[0,1) lives at scale 0, which is not of the form -12 + 1 + 4m
    let bad = triangular_forms(&TriangularInput {
        sigma: &sigma,
        tau: &tau,
        grid: &g,
        f: &[-1.0, 1.0],
        g: &[0.0, 0.0],
        s_f: -12,
        s_g: -12,
    });
    assert!(matches!(bad, Err(twoweight::Error::Hypothesis(_))));
}

fn random_trees(count: u64) -> Vec<(Measure1D, Measure2D, Grid, f64)> {
    let params = GridParams::new(0.5, 2, -24, 2).unwrap();
    (0..count)
        .map(|id| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + id);
            let (s, t) = generate(Family::ALL[id as usize % 4], 24, id, &mut rng).unwrap();
            let grid = admissible_grid(params, &s, &t, &mut rng).unwrap();
            let family = interval_family(&s, &t, params, 2, id).unwrap();
            let r = characterization(&s, &t, &family, 1e-10).unwrap().r_char;
            (s, t, grid, r)
        })
        .collect()
}

#[test]
fn random_corona_diagnostics() {
    let mut checked = 0;
    for (id, (s, t, grid, r)) in random_trees(12).into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(id as u64);
        let input = CoronaInput { sigma: &s, tau: &t, grid: &grid, r_char: r, c0: DEFAULT_C0, c_select: 0.5 };
        let Some(c) = corona_check(&input, &mut rng).unwrap() else { continue };
        checked += 1;
        assert!(c.carleson_g <= 0.5 && c.carleson_f <= 0.5, "{c:?}");
        assert!(c.strip_ratio <= 1.0 + 1e-12);
        assert!(c.size_ratio.is_finite() && c.triangular_ratio.is_finite());
    }
    assert!(checked >= 8);
}

#[test]
fn tree_structure_and_l_layers() {
    for (id, (s, t, grid, r)) in random_trees(8).into_iter().enumerate() {
        let root = twoweight::suite::top_interval(&s, &grid).unwrap();
        let values: Vec<f64> = (0..t.len()).map(|i| ((i * 7919 + id) % 97) as f64 * (i as f64).exp2().min(1e9)).collect();
        let input = StoppingInput { sigma: &s, tau: &t, grid: &grid, values: &values, root, c0: DEFAULT_C0, r_char: r };
        let tree = build_stopping_tree(Side::G, &input).unwrap();
        for (i, n) in tree.nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                assert!(tree.nodes[p].children.contains(&i));
                assert!(n.interval.is_inside(&tree.nodes[p].interval) && n.interval != tree.nodes[p].interval);
                assert_ne!(n.cause, StopCause::Root);
            } else {
                assert_eq!(i, 0);
            }
        }
        // λ mass is the sum of squared t-coefficients
        let exp = twoweight::haar::analyze(&s, &s.positions(), &grid).unwrap();
        let js: Vec<_> = exp.terms.values().filter(|x| x.coefficient != 0.0).map(|x| x.h.interval).collect();
        let coll = twoweight::suite::pair_collection(&grid, &tree, 0, &js);
        if coll.pairs.is_empty() {
            continue;
        }
        let rep = size_functional(&coll, &s, &t, &grid, &tree, 0).unwrap();
        let want: f64 = coll.p2().iter().map(|j| t_coefficient(&s, &grid, j).unwrap().powi(2)).sum();
        let got: f64 = rep.lambda.iter().map(|(_, m)| m).sum();
        assert!((got - want).abs() <= 1e-14 * want.max(1e-300));
        let l = select_l_collection(&coll, &s, &t, &grid, &tree, 0, 0.5).unwrap();
        for layer in &l.layers {
            for a in layer {
                assert!(!layer.iter().any(|b| b != a && b.is_inside(a)), "layer is not an antichain");
            }
        }
    }
}
