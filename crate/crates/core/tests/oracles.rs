//! Library results against the brute-force references in `common`, on
//! generated inputs.

mod common;

use proptest::prelude::*;
use randgeo::concentration::{f_r_count_with, perturbation_difference, Metric};
use randgeo::delaunay::{dt_build, dt_small, verify_delaunay, VerifyMode};
use randgeo::distsel::{count_pairs_within, count_pairs_within_with_grid};
use randgeo::hull::hull_quadtree;
use randgeo::io::{read_points_csv, write_points_csv};
use randgeo::mst::{mst_divide_conquer, mst_nlogn};
use randgeo::points::sample_points;
use randgeo::{Params, PointSet};

fn unit_points(d: usize, max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::collection::vec(0.0..1.0f64, d), 2..max)
        .prop_map(move |rows| PointSet::from_rows(d, &rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn planar_hull_matches_gift_wrapping(n in 20usize..3000, seed in any::<u64>()) {
        let p = sample_points(n, 2, seed).unwrap();
        prop_assert_eq!(hull_quadtree(&p).unwrap().vertex_set(), common::planar_hull_oracle(&p));
    }

    #[test]
    fn pair_count_matches_all_pairs(p in unit_points(2, 400), r in 0.001..1.6f64) {
        let want = common::pairs_within(&p, r, false);
        prop_assert_eq!(count_pairs_within(&p, r).unwrap().count, want);
        let fine = (8.0 * 2f64.sqrt() / r).floor() as usize + 1;
        prop_assert_eq!(count_pairs_within_with_grid(&p, r, fine).unwrap().count, want);
    }

    #[test]
    fn torus_count_matches_all_pairs(d in 2usize..=4, seed in any::<u64>(), r in 0.01..0.45f64) {
        let p = sample_points(300, d, seed).unwrap();
        prop_assert_eq!(f_r_count_with(&p, r, Metric::Toroidal).unwrap(), common::pairs_within(&p, r, true));
        prop_assert_eq!(f_r_count_with(&p, r, Metric::Euclidean).unwrap(), common::pairs_within(&p, r, false));
    }

    #[test]
    fn single_move_difference_matches_recount(seed in any::<u64>(), i in 0usize..200, axis in 0usize..2, v in 0.0..1.0f64) {
        let p = sample_points(200, 2, seed).unwrap();
        let fast = perturbation_difference(&p, 0.2, i, axis, v, Metric::Toroidal).unwrap();
        let mut q = p.clone();
        q.set_coord(i, axis, v).unwrap();
        prop_assert_eq!(fast, common::pairs_within(&p, 0.2, true).abs_diff(common::pairs_within(&q, 0.2, true)));
    }

    #[test]
    fn points_csv_round_trip(p in unit_points(3, 60)) {
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &p).unwrap();
        prop_assert_eq!(read_points_csv(&buf[..]).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mst_routes_match_prim(d in 2usize..=3, n in 200usize..1500, seed in any::<u64>()) {
        let p = sample_points(n, d, seed).unwrap();
        let params = Params::with_default_c(n, d).unwrap();
        let (edges, total) = common::prim(&p);
        for run in [mst_divide_conquer(&p, &params).unwrap(), mst_nlogn(&p, &params).unwrap()] {
            let got: Vec<(u32, u32)> = run.tree.edges.iter().map(|e| (e.i, e.j)).collect();
            prop_assert_eq!(&got, &edges);
            prop_assert!((run.tree.total_weight - total).abs() <= 1e-12 * total);
        }
    }

    #[test]
    fn local_stars_match_global_triangulation(d in 2usize..=3, n in 200usize..600, seed in any::<u64>()) {
        let p = sample_points(n, d, seed).unwrap();
        let dt = dt_build(&p, &Params::with_default_c(n, d).unwrap()).unwrap();
        prop_assert_eq!(dt.complex.top_simplices(), dt_small(&p).unwrap().top_simplices());
        prop_assert!(verify_delaunay(&dt.complex, &p, VerifyMode::Exhaustive).unwrap().passed());
    }
}
