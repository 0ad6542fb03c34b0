use std::sync::Arc;

use num_traits::Signed;
use proptest::prelude::*;

use ridgenet::bolts::{bolt_measure, build_bolt_graph, find_closed_bolt, orbits, weak_star_probe, ProbeTest};
use ridgenet::incidence::{find_closed_path, PointConfig};
use ridgenet::presets::paper_orbit;
use ridgenet::rational::{int, ratio, Rational};
use ridgenet::{Direction, Point};

fn planar_points() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::btree_set((0i64..=4, 0i64..=4), 1..=10)
        .prop_map(|s| s.into_iter().map(|(x, y)| Point::from_ints(&[x, y])).collect())
}

fn dirs() -> (Direction, Direction) {
    (Direction::from_ints(&[1, 1]).unwrap(), Direction::from_ints(&[1, -1]).unwrap())
}

proptest! {
    #[test]
    fn closed_bolt_iff_closed_path_for_two_directions(points in planar_points(), axes in any::<bool>()) {
        let (a1, a2) = if axes { (Direction::axis(2, 0), Direction::axis(2, 1)) } else { dirs() };
        let graph = build_bolt_graph(points.clone(), a1.clone(), a2.clone()).unwrap();
        let cfg = PointConfig::new(points, vec![a1.clone(), a2.clone()]).unwrap();
        let bolt = find_closed_bolt(&graph);
        prop_assert_eq!(bolt.is_some(), find_closed_path(&cfg).is_some());
        if let Some(cb) = bolt {
            prop_assert!(cb.bolt.len() % 2 == 0);
            cb.bolt.check(&a1, &a2, true).unwrap();
            let mu = cb.alternating_measure();
            prop_assert!(mu.weights().all(|w| w.abs() == int(1)));
            prop_assert!(mu.is_annihilating(&[a1, a2]).unwrap());
        }
    }

    #[test]
    fn consecutive_bolt_points_share_an_orbit(points in planar_points()) {
        let (a1, a2) = dirs();
        let graph = build_bolt_graph(points.clone(), a1.clone(), a2.clone()).unwrap();
        let classes = orbits(&graph);
        let class_of = |j: usize| classes.iter().position(|c| c.contains(&j)).unwrap();
        prop_assert_eq!(classes.iter().map(Vec::len).sum::<usize>(), points.len());
        for i in 0..points.len() {
            for j in 0..points.len() {
                let linked = a1.project(&points[i]).unwrap() == a1.project(&points[j]).unwrap()
                    || a2.project(&points[i]).unwrap() == a2.project(&points[j]).unwrap();
                if linked {
                    prop_assert_eq!(class_of(i), class_of(j));
                }
            }
        }
    }

    #[test]
    fn bolt_measures_have_unit_mass(n in 1usize..=40) {
        let bolt = paper_orbit().generate(40).unwrap();
        prop_assert_eq!(bolt_measure(&bolt, n).unwrap().total_variation(), int(1));
    }

    #[test]
    fn ridge_bound_for_level_tables(t1 in prop::collection::vec(-9i64..=9, 8), t2 in prop::collection::vec(-9i64..=9, 8)) {
        // Bounded tables keyed by a hash of the level.
        let table = |t: Vec<i64>| {
            Arc::new(move |s: &Rational| {
                let h = (s.numer().to_string().len() * 7 + s.denom().to_string().len() * 3) % t.len();
                ratio(t[h], 2)
            }) as Arc<dyn Fn(&Rational) -> Rational + Send + Sync>
        };
        let test = ProbeTest::Ridge { name: "table".into(), g1: table(t1), g2: table(t2) };
        let rep = weak_star_probe(&paper_orbit(), &[test], 60, 1.0).unwrap();
        prop_assert_eq!(rep.ridge_bound_held[0], Some(true));
    }
}

#[test]
fn orbit_prefix_has_no_closed_bolt() {
    let gen = paper_orbit();
    let bolt = gen.generate(200).unwrap();
    bolt.check(&gen.a1, &gen.a2, false).unwrap();
    let graph = build_bolt_graph(bolt.points, gen.a1, gen.a2).unwrap();
    assert!(find_closed_bolt(&graph).is_none());
    assert_eq!(orbits(&graph).len(), 1);
}

#[test]
fn probe_csv_is_tidy() {
    let rep = weak_star_probe(&paper_orbit(), &[ProbeTest::coordinate("x", 0)], 5, 1e-2).unwrap();
    let csv = rep.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,test_name,abs_integral");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("1,x,"));
}
