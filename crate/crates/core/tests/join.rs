use proptest::prelude::*;

use dline_core::join::{
    adaptive_simpson, bump_plateau, collapse_agreement, collapse_chain, glue_search, smooth_step, uniform_tolerances,
    verify_ck_numeric, ChainAtlas, CollapseOrder, IntervalChart, NumericDiffeo, Piece, PiecewiseMap,
    DEFAULT_TOLERANCES, GRID_CELLS, SIMPSON_TOL,
};

/// `x + c (x - l)(r - x) / (r - l)` on `(l; r)`: increasing for `|c| < 1`.
fn bent(l: f64, r: f64, c: f64) -> NumericDiffeo {
    let w = r - l;
    NumericDiffeo::from_fn(
        l,
        r,
        move |x| x + c * (x - l) * (r - x) / w,
        Some(Box::new(move |x| 1.0 + c * (l + r - 2.0 * x) / w)),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn smooth_step_is_a_monotone_switch(s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let (a, b) = (smooth_step(s), smooth_step(t));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(s <= t, a <= b || (a - b).abs() < 1e-15);
        prop_assert!((smooth_step(s) + smooth_step(1.0 - s) - 1.0).abs() < 1e-15);
        prop_assert_eq!(smooth_step(-s), 0.0);
        prop_assert_eq!(smooth_step(1.0 + s), 1.0);
    }

    #[test]
    fn bumps_have_their_plateau(l0 in -5.0f64..5.0, gaps in prop::array::uniform3(0.01f64..2.0), x in -10.0f64..10.0) {
        let (l1, r1) = (l0 + gaps[0], l0 + gaps[0] + gaps[1]);
        let r0 = r1 + gaps[2];
        let b = bump_plateau(l0, l1, r1, r0).unwrap();
        let v = b.eval(x);
        prop_assert!((0.0..=1.0).contains(&v));
        if x <= l0 || x >= r0 { prop_assert_eq!(v, 0.0); }
        if (l1..=r1).contains(&x) { prop_assert_eq!(v, 1.0); }
    }

    #[test]
    fn simpson_integrates_cubics_exactly(c in prop::array::uniform4(-3.0f64..3.0), a in -2.0f64..0.0, b in 0.1f64..2.0) {
        let f = |x: f64| c[0] + x * (c[1] + x * (c[2] + x * c[3]));
        let anti = |x: f64| x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * c[3] / 4.0)));
        let q = adaptive_simpson(&f, a, b, SIMPSON_TOL);
        prop_assert!((q.value - (anti(b) - anti(a))).abs() < 1e-12);
        prop_assert!(!q.capped);
    }

    #[test]
    fn glue_meets_its_contract(l in -3.0f64..3.0, w in 0.5f64..4.0, c in -0.9f64..0.9) {
        let r = l + w;
        let g = bent(l, r, c);
        let glue = glue_search(&g).unwrap();
        let eps = glue.eps;
        prop_assert!(eps > 0.0 && eps < w / 4.0);
        let nodes: Vec<f64> = (1..GRID_CELLS).map(|i| l + w * i as f64 / GRID_CELLS as f64).collect();
        for &x in &nodes {
            if x <= l + eps {
                prop_assert_eq!(glue.p.eval(x), x);
            }
            if x >= r - eps {
                prop_assert_eq!(glue.p.eval(x), g.eval(x));
            }
            prop_assert!(glue.p.derivative(x) > 0.0);
        }
        prop_assert!((glue.gamma_integral - w).abs() <= 1e-8 * w.max(1.0));
        prop_assert!((glue.closure_scale - 1.0).abs() < 1e-8);
    }

    #[test]
    fn kinks_are_detected_at_the_right_order(k in 1usize..=3, jump in prop_oneof![0.5f64..2.0, -0.3f64..-0.2]) {
        // Pieces agree through order k - 1 and jump at order k.
        let mut right = vec![0.0, 1.0, 0.0, 0.0];
        right[k] += jump;
        if k == 1 {
            right[1] = 1.0 + jump.abs();
        }
        let m = PiecewiseMap::new(vec![
            Piece { from: -1.0, to: 0.0, coeffs: vec![0.0, 1.0] },
            Piece { from: 0.0, to: 1.0, coeffs: right },
        ])
        .unwrap();
        if k > 1 {
            prop_assert!(verify_ck_numeric(&m, k - 1, &DEFAULT_TOLERANCES).unwrap().pass);
        }
        let cert = verify_ck_numeric(&m, k, &DEFAULT_TOLERANCES).unwrap();
        prop_assert!(!cert.pass && cert.min_derivative > 0.0);
        prop_assert!(cert.max_residuals[k - 1] > DEFAULT_TOLERANCES[k - 1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn collapse_orders_agree(c in prop::array::uniform3(-0.8f64..0.8)) {
        let charts = vec![
            IntervalChart::identity("A", 0.0, 2.0).unwrap(),
            IntervalChart::identity("B", 1.0, 4.0).unwrap(),
            IntervalChart::identity("C", 3.0, 6.0).unwrap(),
            IntervalChart::identity("D", 5.0, 8.0).unwrap(),
        ];
        let transitions = vec![bent(1.0, 2.0, c[0]), bent(3.0, 4.0, c[1]), bent(5.0, 6.0, c[2])];
        let atlas = ChainAtlas::new(charts, transitions).unwrap();
        let tol = uniform_tolerances(1e-4);
        let one = collapse_chain(&atlas, 2, &tol, CollapseOrder::LeftToRight).unwrap();
        let two = collapse_chain(&atlas, 2, &tol, CollapseOrder::MiddleOut).unwrap();
        prop_assert!(one.cert.pass && two.cert.pass);
        prop_assert_eq!(one.chart.image, (0.0, 8.0));
        let agree = collapse_agreement(&one, &two, 2, &tol).unwrap();
        prop_assert!(agree.iter().all(|c| c.pass));
        // W agrees with the first chart near the left end.
        prop_assert!((one.presentations[0].eval(0.5) - 0.5).abs() < 1e-12);
    }
}

#[test]
fn chain_validation_rejects_triple_overlaps() {
    let charts = vec![
        IntervalChart::identity("A", 0.0, 3.0).unwrap(),
        IntervalChart::identity("B", 1.0, 4.0).unwrap(),
        IntervalChart::identity("C", 2.0, 6.0).unwrap(),
    ];
    assert!(ChainAtlas::from_charts(charts).is_err());
}
