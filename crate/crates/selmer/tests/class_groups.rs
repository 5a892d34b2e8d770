mod support;

use num_bigint::BigInt;
use selmer::descent_global::genus_2rank_quadratic;
use support::forms::{fundamental_discriminant, is_squarefree, ClassGroup};

#[test]
fn known_class_numbers() {
    for (d, h) in [(-3, 1), (-4, 1), (-23, 3), (-20, 2), (-84, 4), (-47, 5), (-56, 4), (5, 1), (12, 2), (60, 4), (40, 2), (136, 4), (316, 6)] {
        assert_eq!(ClassGroup::new(d).order(), h, "D = {d}");
    }
    assert_eq!(ClassGroup::new(-84).narrow_two_rank(), 2);
    assert!(ClassGroup::new(8).narrow_eq_wide());
    assert!(!ClassGroup::new(12).narrow_eq_wide());
    assert_eq!(ClassGroup::new(12).wide_two_rank(), 0);
}

#[test]
fn composition_is_a_group_law() {
    for d in [-84, -971, -4 * 65, 316, 4 * 79, 8 * 17 * 3] {
        let g = ClassGroup::new(d);
        let e = g.principal();
        for x in 0..g.order() {
            assert_eq!(g.mul(x, e), x);
            assert!((0..g.order()).any(|y| g.mul(x, y) == e));
            for y in 0..g.order() {
                assert_eq!(g.mul(x, y), g.mul(y, x));
            }
        }
    }
}

#[test]
fn genus_theory_matches_reduced_forms() {
    let mut checked = 0;
    for d in -10_000i64..=10_000 {
        if d == 0 || d == 1 || !is_squarefree(d) {
            continue;
        }
        let disc = fundamental_discriminant(d);
        if disc.abs() > 10_000 {
            continue;
        }
        let g = genus_2rank_quadratic(&BigInt::from(d)).unwrap();
        let cg = ClassGroup::new(disc);
        assert_eq!(g.discriminant, BigInt::from(disc));
        assert_eq!(g.narrow_rank, cg.narrow_two_rank(), "d = {d}");
        assert_eq!(g.wide_rank, cg.wide_two_rank(), "d = {d}");
        assert_eq!(g.narrow_eq_wide, cg.narrow_eq_wide(), "d = {d}");
        checked += 1;
    }
    assert!(checked > 5000);
}
