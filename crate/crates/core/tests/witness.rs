use flagtype_core::field::{Field, Fp, Rationals};
use flagtype_core::orbit::DEFAULT_BUDGET;
use flagtype_core::witness::{
    equivariance_check, orbit_classes, separation_check, FamilyId, FeasibilityMatrix, Relation, Separation,
};

#[test]
fn every_family_builds_at_small_rank() {
    for q in [3u64, 5, 7] {
        let f = Fp::new(q).unwrap();
        for id in FamilyId::all() {
            for n in id.n_min()..=id.n_min() + 1 {
                for l in id.domain(n, &f) {
                    let t = id.build(n, &l, &f).unwrap();
                    assert_eq!(t.n(), n);
                    assert_eq!(t.compositions().unwrap(), id.compositions(n).unwrap());
                }
            }
        }
    }
}

#[test]
fn every_family_builds_over_rationals() {
    let f = Rationals;
    for id in FamilyId::all() {
        for l in [2i64, -3] {
            id.build(id.n_min() + 1, &f.from_i64(l), &f).unwrap();
        }
    }
}

#[test]
fn pencils_are_injective_in_lambda() {
    let f = Fp::new(5).unwrap();
    for id in FamilyId::all() {
        let n = id.n_min();
        let dom = id.domain(n, &f);
        let built: Vec<_> = dom.iter().map(|l| id.build(n, l, &f).unwrap()).collect();
        for i in 0..built.len() {
            for j in i + 1..built.len() {
                assert_ne!(built[i], built[j], "{id} at {} and {}", dom[i], dom[j]);
            }
        }
    }
}

#[test]
fn four_line_family_separates_at_q5() {
    let f = Fp::new(5).unwrap();
    let fm = FeasibilityMatrix::default();
    let s = separation_check(FamilyId::O4L31(4), 2, 2, 3, &f, &fm, DEFAULT_BUDGET).unwrap();
    assert!(matches!(s, Separation::DistinctOrbits));
    let s = separation_check(FamilyId::O6L32p, 3, 2, 3, &f, &fm, DEFAULT_BUDGET).unwrap();
    assert!(matches!(s, Separation::DistinctOrbits));
}

#[test]
fn square_class_certificate() {
    let f = Fp::new(5).unwrap();
    let fm = FeasibilityMatrix::default();
    let cert = equivariance_check(FamilyId::O6L322Sq, 3, 1, 2, &f, &fm, DEFAULT_BUDGET).unwrap();
    assert_eq!(cert.target, 4);
    assert_eq!(cert.source.act(&cert.element).unwrap(), cert.image);
    for n in 5..=6 {
        let cert = equivariance_check(FamilyId::O10L323Sq, n, 3, 2, &f, &fm, DEFAULT_BUDGET).unwrap();
        assert_eq!(cert.target, f.div(&3, &4).unwrap());
    }
}

#[test]
fn one_minus_partner_is_found_by_search() {
    let f = Fp::new(5).unwrap();
    let fm = FeasibilityMatrix::default();
    assert_eq!(FamilyId::O6L32p.relation(), Relation::OneMinus);
    let cert = equivariance_check(FamilyId::O6L32p, 3, 2, 1, &f, &fm, DEFAULT_BUDGET).unwrap();
    assert_eq!(cert.target, 4);
}

#[test]
fn separation_outside_matrix_is_infeasible() {
    let f = Fp::new(3).unwrap();
    let fm = FeasibilityMatrix::default();
    let s = separation_check(FamilyId::O8L32(0), 4, 1, 2, &f, &fm, DEFAULT_BUDGET).unwrap();
    assert!(matches!(s, Separation::Infeasible(_)));
}

#[test]
fn square_class_family_has_two_classes() {
    let fm = FeasibilityMatrix::default();
    for q in [3u64, 5] {
        let f = Fp::new(q).unwrap();
        let classes = orbit_classes(FamilyId::O6L322Sq, 3, &f, &fm, DEFAULT_BUDGET).unwrap();
        assert_eq!(classes.len(), 2, "q = {q}: {classes:?}");
        for c in &classes {
            for l in c {
                assert_eq!(f.is_square(*l), f.is_square(c[0]));
            }
        }
    }
}
