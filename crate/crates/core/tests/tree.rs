mod common;

use common::q;
use shishikura::fixtures::{fig2_toy, persian_carpet};
use shishikura::tree::EdgeId;
use shishikura::{Rational, TreeMap};

// every point of τ^{-n}(X0) on the toy has denominator dividing 3^n, so a grid scan is complete
fn grid_preimages(tm: &TreeMap, n: usize) -> Vec<Rational> {
    let den = 3i64.pow(n as u32);
    let x0 = tm.x0();
    (0..=den)
        .map(|k| q(k, den))
        .filter(|t| x0.contains(&tm.iterate(&tm.tree().point(EdgeId(0), t.clone()), n)))
        .collect()
}

#[test]
fn toy_refinement_matches_grid_scan() {
    let tm = fig2_toy::<Rational>();
    for n in 0..=4 {
        let xn = tm.refine(n).unwrap();
        let mut coords = xn.coordinates_on(tm.tree(), EdgeId(0));
        coords.sort();
        assert_eq!(coords, grid_preimages(&tm, n), "level {n}");
    }
    let x2 = tm.refine(2).unwrap();
    assert_eq!(x2.len(), 10);
    let expected = [(0, 1), (1, 9), (2, 9), (1, 3), (4, 9), (5, 9), (2, 3), (7, 9), (8, 9), (1, 1)];
    assert_eq!(x2.coordinates_on(tm.tree(), EdgeId(0)), expected.map(|(a, b)| q(a, b)));
}

#[test]
fn carpet_refinement_grows_strictly() {
    let tm = persian_carpet::<Rational>();
    let x2 = tm.refine(2).unwrap();
    let x3 = tm.refine(3).unwrap();
    assert!(x2.is_subset(&x3));
    assert!(x3.len() > x2.len());
    for p in x3.iter() {
        assert!(x2.contains(&tm.iterate(p, 1)));
    }
    for p in x3.iter().filter(|p| !x2.contains(p)) {
        assert!(tm.x0().contains(&tm.iterate(p, 3)));
    }
}
