use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use horobowtie::dl::DlGraph;
use horobowtie::space::{same_height_projection_gap, Space};
use horobowtie::{AdmissibleNorm, HoroPoint, HoroSpace, PlanePoint, PlaneSpace, TreeSpace, TreeVertex};

// Confluence from the raw digit maps: the first level at or above both
// heights from which the digits agree forever.
fn confluence(u: &TreeVertex, v: &TreeVertex) -> i64 {
    let top = u.height().max(v.height());
    let last_diff = u
        .digits()
        .keys()
        .chain(v.digits().keys())
        .filter(|&&l| u.digit(l) != v.digit(l))
        .max()
        .copied();
    match last_diff {
        Some(l) => top.max(l + 1),
        None => top,
    }
}

fn tree_oracle(u: &TreeVertex, v: &TreeVertex) -> i64 {
    let h = confluence(u, v);
    (h - u.height()) + (h - v.height())
}

fn random_vertex(rng: &mut impl Rng, p: u32) -> TreeVertex {
    let h = rng.gen_range(-4..=4);
    let mut digits = Vec::new();
    for l in h..h + 5 {
        if rng.gen_bool(0.4) {
            digits.push((l, rng.gen_range(1..p)));
        }
    }
    TreeVertex::new(h, digits).unwrap()
}

fn vertex_strategy(p: u32) -> impl Strategy<Value = TreeVertex> {
    (-4i64..=4, prop::collection::vec(0..p, 6))
        .prop_map(|(h, ds)| TreeVertex::new(h, ds.into_iter().enumerate().map(|(i, d)| (h + i as i64, d))).unwrap())
}

fn plane_strategy() -> impl Strategy<Value = PlanePoint> {
    (-6.0f64..6.0, -4.0f64..4.0).prop_map(|(x, z)| PlanePoint::new(x, z).unwrap())
}

proptest! {
    #[test]
    fn tree_metric_axioms(p in 2u32..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = TreeSpace::new(p).unwrap();
        let (a, b, c) = (random_vertex(&mut rng, p), random_vertex(&mut rng, p), random_vertex(&mut rng, p));
        prop_assert_eq!(t.distance(&a, &a), 0.0);
        prop_assert_eq!(t.distance(&a, &b), t.distance(&b, &a));
        prop_assert!(t.distance(&a, &c) <= t.distance(&a, &b) + t.distance(&b, &c));
        prop_assert_eq!(t.distance(&a, &b), tree_oracle(&a, &b) as f64);
        if a != b {
            prop_assert!(t.distance(&a, &b) > 0.0);
        }
    }

    #[test]
    fn tree_verticals_are_isometric(v in vertex_strategy(3), t1 in -6i64..6, t2 in -6i64..6) {
        let t = TreeSpace::new(3).unwrap();
        let a = t.vertical_at(&v, t1 as f64).unwrap();
        let b = t.vertical_at(&v, t2 as f64).unwrap();
        prop_assert_eq!(t.height(&a), t1 as f64);
        prop_assert_eq!(t.distance(&a, &b), (t1 - t2).abs() as f64);
    }

    #[test]
    fn plane_metric_axioms(a in plane_strategy(), b in plane_strategy(), c in plane_strategy()) {
        let s = PlaneSpace::new();
        prop_assert!(s.distance(&a, &a).abs() < 1e-12);
        prop_assert!((s.distance(&a, &b) - s.distance(&b, &a)).abs() < 1e-12);
        prop_assert!(s.distance(&a, &c) <= s.distance(&a, &b) + s.distance(&b, &c) + 1e-9);
    }

    #[test]
    fn plane_verticals_are_isometric(a in plane_strategy(), t1 in -5.0f64..5.0, t2 in -5.0f64..5.0) {
        let s = PlaneSpace::new();
        let u = s.vertical_at(&a, t1).unwrap();
        let v = s.vertical_at(&a, t2).unwrap();
        prop_assert!((s.distance(&u, &v) - (t1 - t2).abs()).abs() < 1e-9);
    }

    #[test]
    fn plane_vertical_distance_is_monotone(a in plane_strategy(), b in plane_strategy()) {
        let s = PlaneSpace::new();
        let profile: Vec<f64> = (-40..=40)
            .map(|k| {
                let t = k as f64 / 8.0;
                s.distance(&s.vertical_at(&a, t).unwrap(), &s.vertical_at(&b, t).unwrap())
            })
            .collect();
        prop_assert!(profile.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn tree_vertical_distance_is_monotone(a in vertex_strategy(2), b in vertex_strategy(2)) {
        let s = TreeSpace::new(2).unwrap();
        let profile: Vec<f64> = (-8..=12)
            .map(|t| s.distance(&s.vertical_at(&a, t as f64).unwrap(), &s.vertical_at(&b, t as f64).unwrap()))
            .collect();
        prop_assert!(profile.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn tree_projection_gap_vanishes(a in vertex_strategy(2), b in vertex_strategy(2)) {
        let s = TreeSpace::new(2).unwrap();
        let (x, y) = if a.height() <= b.height() { (a, b) } else { (b, a) };
        prop_assert_eq!(same_height_projection_gap(&s, &x, &y).unwrap(), 0.0);
    }

    #[test]
    fn plane_projection_gap_is_bounded(a in plane_strategy(), b in plane_strategy()) {
        let s = PlaneSpace::new();
        let (x, y) = if a.z <= b.z { (a, b) } else { (b, a) };
        prop_assert!(same_height_projection_gap(&s, &x, &y).unwrap() <= 54.0);
    }

    #[test]
    fn plane_product_paths_are_sandwiched(
        a in plane_strategy(), b in plane_strategy(), c in plane_strategy(), d in plane_strategy(), r in 1.0f64..6.0,
    ) {
        let space = HoroSpace::new(PlaneSpace::new(), PlaneSpace::new(), AdmissibleNorm::lr(r).unwrap()).unwrap();
        let x = space.make_point(a, PlanePoint::new(c.x, -a.z).unwrap()).unwrap();
        let y = space.make_point(b, PlanePoint::new(d.x, -b.z).unwrap()).unwrap();
        let plan = space.build_path(&x, &y).unwrap();
        let pts = plan.points();
        let (lp, lq) = space.component_lengths(&pts);
        let len = space.path_length(&pts);
        let c_n = space.norm().c_n().to_f64();
        prop_assert!(0.5 * (lp + lq) <= len + 1e-9);
        prop_assert!(len <= 2.0 * c_n * (lp + lq) + 1e-9);
        prop_assert!(plan.total_length + 1e-9 >= space.coarse_distance(&x, &y) - 1e-6);
    }
}

#[test]
fn height_is_lipschitz() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [2, 3] {
        let t = TreeSpace::new(p).unwrap();
        for _ in 0..10_000 {
            let (a, b) = (random_vertex(&mut rng, p), random_vertex(&mut rng, p));
            assert!((t.height(&a) - t.height(&b)).abs() <= t.distance(&a, &b));
        }
    }
    let s = PlaneSpace::new();
    for _ in 0..10_000 {
        let a = PlanePoint::new(rng.gen_range(-50.0..50.0), rng.gen_range(-8.0..8.0)).unwrap();
        let b = PlanePoint::new(rng.gen_range(-50.0..50.0), rng.gen_range(-8.0..8.0)).unwrap();
        assert!((s.height(&a) - s.height(&b)).abs() <= s.distance(&a, &b) + 1e-9);
    }
}

#[test]
fn dl_distances_against_the_oracle() {
    for (p, q) in [(2, 2), (2, 3), (3, 3)] {
        let g = DlGraph::ball(p, q, 4).unwrap();
        for i in 0..g.len() {
            let dist = g.bfs_from(i);
            for j in 0..g.len() {
                if !g.margin_ok(i, j) {
                    continue;
                }
                let (x, y) = (g.point(i), g.point(j));
                let d = dist[j].unwrap();
                let dh = (x.p.height() - y.p.height()).abs();
                let dr_p = tree_oracle(&x.p, &y.p) - dh;
                let dr_q = tree_oracle(&x.q, &y.q) - dh;
                assert_eq!(d, dh + dr_p + dr_q, "{} {}", g.serialize(i), g.serialize(j));
                assert!(d >= dh);
                let (dp, dq) = (tree_oracle(&x.p, &y.p), tree_oracle(&x.q, &y.q));
                assert!(dp + dq <= 2 * d && d <= 2 * (dp + dq));
            }
        }
    }
}

#[test]
fn dl_vertical_lines_are_geodesic() {
    let g = DlGraph::ball(2, 3, 6).unwrap();
    let space = horobowtie::dl::dl_space(2, 3).unwrap();
    let anchor = HoroPoint::raw(
        TreeVertex::new(0, [(0, 1)]).unwrap(),
        TreeVertex::new(0, [(0, 2)]).unwrap(),
    );
    let v = space.vertical_through(&anchor);
    let on_line: Vec<(i64, usize)> = (-2..=2)
        .map(|t| {
            (
                t,
                g.index_of(&space.vertical_at(&v, t as f64).unwrap())
                    .expect("line inside the ball"),
            )
        })
        .collect();
    for &(t1, i) in &on_line {
        let dist = g.bfs_from(i);
        for &(t2, j) in &on_line {
            assert_eq!(dist[j], Some((t1 - t2).abs()));
        }
    }
}
