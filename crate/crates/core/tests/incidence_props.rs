use num_traits::{Signed, Zero};
use proptest::prelude::*;

use ridgenet::incidence::{build_incidence, find_closed_path, interpolate_ridge, PointConfig};
use ridgenet::linalg::RatMatrix;
use ridgenet::rational::{int, ratio, Rational};
use ridgenet::{Direction, Point};

fn config() -> impl Strategy<Value = PointConfig> {
    (1usize..=3)
        .prop_flat_map(|d| {
            let pts = prop::collection::btree_set(prop::collection::vec(0i64..=4, d), 1..=12);
            let dirs = prop::collection::vec(
                prop::collection::vec(-2i64..=2, d).prop_filter("nonzero", |a| a.iter().any(|&v| v != 0)),
                1..=4,
            );
            (pts, dirs)
        })
        .prop_map(|(pts, dirs)| {
            PointConfig::new(
                pts.into_iter().map(|p| Point::from_ints(&p)).collect(),
                dirs.into_iter().map(|a| Direction::from_ints(&a).unwrap()).collect(),
            )
            .unwrap()
        })
}

/// Closed path exists iff the 0/1 level matrix has a nontrivial kernel.
fn rank_deficient(cfg: &PointConfig) -> bool {
    let rows: Vec<Vec<Rational>> =
        build_incidence(cfg).matrix().into_iter().map(|r| r.into_iter().map(|v| int(v as i64)).collect()).collect();
    RatMatrix::from_rows(rows).rank() < cfg.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn detector_agrees_with_rank(cfg in config()) {
        prop_assert_eq!(find_closed_path(&cfg).is_some(), rank_deficient(&cfg));
    }

    #[test]
    fn certificates_annihilate_and_restrict(cfg in config()) {
        if let Some(cert) = find_closed_path(&cfg) {
            prop_assert!(cert.validate(cfg.dirs()).unwrap());
            let sub = cfg.restrict(&cert.indices).unwrap();
            prop_assert!(find_closed_path(&sub).is_some());
        }
    }

    #[test]
    fn interpolation_is_exact_iff_path_free(cfg in config(), seed in any::<u64>()) {
        let values: Vec<Rational> = (0..cfg.len()).map(|j| int(((seed >> (j % 48)) % 7) as i64 - 3)).collect();
        let fit = interpolate_ridge(&cfg, &values).unwrap();
        if find_closed_path(&cfg).is_none() {
            prop_assert!(fit.residual.is_zero());
        }
        // Whatever the verdict, the fit reproduces its own residual.
        let worst = cfg.points().iter().zip(&values)
            .map(|(x, f)| (f - fit.sum.eval(x).unwrap()).abs())
            .max().unwrap();
        prop_assert_eq!(worst, fit.residual);
    }

    #[test]
    fn translation_and_direction_scaling_preserve_support(
        cfg in config(),
        shift in prop::collection::vec((-5i64..=5, 1i64..=3), 3),
        scale in (1i64..=4, 1i64..=3, any::<bool>()),
    ) {
        let d = cfg.dim();
        let v: Vec<Rational> = shift[..d].iter().map(|&(n, q)| ratio(n, q)).collect();
        let s = ratio(if scale.2 { scale.0 } else { -scale.0 }, scale.1);
        let moved = PointConfig::new(
            cfg.points().iter().map(|p| p.translate(&v).unwrap()).collect(),
            cfg.dirs().iter().map(|a| a.scaled(&s).unwrap()).collect(),
        ).unwrap();
        let before = find_closed_path(&cfg).map(|c| c.indices);
        let after = find_closed_path(&moved).map(|c| c.indices);
        prop_assert_eq!(before, after);
    }
}
