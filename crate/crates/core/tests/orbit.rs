use std::collections::HashMap;

use flagtype_core::canonical::standard_pair;
use flagtype_core::field::Fp;
use flagtype_core::flags::{enumerate, Composition, FlagChain, FlagTuple};
use flagtype_core::geometry::{coordinate_stabilizer_generators, group_generators, random_word};
use flagtype_core::invariants::ThetaInvariants;
use flagtype_core::matrix::Matrix;
use flagtype_core::orbit::{
    census, census_fix_first, census_of_factors, materialize_group, orbit, orthogonal_group_order, same_orbit_in_group,
    signature, tuple_key, Connection, Method, DEFAULT_BUDGET,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn comps(n: usize, parts: &[&[usize]]) -> Vec<Composition> {
    parts.iter().map(|p| Composition::for_rank(p.to_vec(), n).unwrap()).collect()
}

#[test]
fn closure_of_o4_generators_has_group_order() {
    let f = Fp::new(3).unwrap();
    let g = materialize_group(&group_generators(2, &f), 10_000).unwrap();
    assert_eq!(g.len() as u128, orthogonal_group_order(2, 3));
    assert_eq!(g.len(), 1152);
}

#[test]
fn coordinate_stabilizers_have_orbit_stabilizer_order() {
    for (n, q) in [(2usize, 3u64), (2, 5), (3, 3)] {
        let f = Fp::new(q).unwrap();
        let gens = group_generators(n, &f);
        let mut checked = 0;
        for t in ThetaInvariants::all(n) {
            let (up, um) = standard_pair(&f, &t);
            let stab = coordinate_stabilizer_generators(n, &f, &[up.pivots(), um.pivots()]);
            for g in &stab {
                assert_eq!(g.apply(&up).unwrap(), up);
                assert_eq!(g.apply(&um).unwrap(), um);
            }
            let pair = FlagTuple::new(n, vec![FlagChain::single(up), FlagChain::single(um)]).unwrap();
            let orbit_len = orbit(&pair, &gens, DEFAULT_BUDGET).unwrap().len() as u128;
            let order = orthogonal_group_order(n, q as u128);
            if order / orbit_len > 1_000_000 {
                continue;
            }
            let stab_order = materialize_group(&stab, 1_000_000).unwrap().len() as u128;
            assert_eq!(stab_order * orbit_len, order, "n = {n}, q = {q}, {t:?}");
            checked += 1;
        }
        assert!(checked >= 5, "n = {n}, q = {q}: {checked}");
    }
}

#[test]
fn pair_normalized_search_agrees_with_plain_orbits() {
    let f = Fp::new(3).unwrap();
    let n = 2;
    let cs = comps(n, &[&[1], &[1, 1], &[2]]);
    let gens = group_generators(n, &f);
    let factors: Vec<Vec<FlagChain<Fp>>> = cs.iter().map(|a| enumerate(n, &f, a, 1 << 20).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pick = |rng: &mut ChaCha8Rng| {
        let chains = factors.iter().map(|fl| fl[rng.gen_range(0..fl.len())].clone()).collect();
        FlagTuple::new(n, chains).unwrap()
    };
    let mut orbit_of: HashMap<Vec<u32>, usize> = HashMap::new();
    let orbit_id = |t: &FlagTuple<Fp>, orbit_of: &mut HashMap<Vec<u32>, usize>| {
        if let Some(&i) = orbit_of.get(&tuple_key(t)) {
            return i;
        }
        let id = orbit_of.values().max().map_or(0, |m| m + 1);
        for m in orbit(t, &gens, DEFAULT_BUDGET).unwrap().members() {
            orbit_of.insert(tuple_key(m), id);
        }
        id
    };
    let (mut same, mut distinct) = (0, 0);
    for _ in 0..150 {
        let x = pick(&mut rng);
        let y = if rng.gen_bool(0.5) { x.act(&random_word(&gens, 12, &mut rng)).unwrap() } else { pick(&mut rng) };
        let expected = orbit_id(&x, &mut orbit_of) == orbit_id(&y, &mut orbit_of);
        match same_orbit_in_group(&x, &y, DEFAULT_BUDGET).unwrap() {
            Connection::Same(g) => {
                assert!(expected);
                assert_eq!(x.act(&g).unwrap(), y);
                same += 1;
            }
            Connection::Distinct => {
                assert!(!expected);
                distinct += 1;
            }
            Connection::Infeasible { .. } => panic!("infeasible at n = 2"),
        }
    }
    assert!(same > 20 && distinct > 20);
}

#[test]
fn union_find_and_bfs_agree_and_are_deterministic() {
    let f = Fp::new(3).unwrap();
    let n = 2;
    let cs = comps(n, &[&[1], &[2], &[1, 1]]);
    let gens = group_generators(n, &f);
    let uf = census_fix_first(n, &f, &cs, &gens, Method::UnionFind, DEFAULT_BUDGET).unwrap();
    let bfs = census_fix_first(n, &f, &cs, &gens, Method::Bfs, DEFAULT_BUDGET).unwrap();
    assert_eq!(uf.orbit_sizes, bfs.orbit_sizes);
    assert_eq!(uf.representatives, bfs.representatives);
    let again = census_fix_first(n, &f, &cs, &gens, Method::UnionFind, DEFAULT_BUDGET).unwrap();
    assert_eq!(uf.to_json(), again.to_json());
}

#[test]
fn fixing_the_first_flag_preserves_orbit_count() {
    let f = Fp::new(3).unwrap();
    let n = 2;
    let gens = group_generators(n, &f);
    for parts in [vec![&[1usize][..], &[2][..]], vec![&[2][..], &[1, 1][..], &[1][..]]] {
        let cs = comps(n, &parts);
        let full = census(n, &f, &cs, &gens, "G", DEFAULT_BUDGET).unwrap();
        let fixed = census_fix_first(n, &f, &cs, &gens, Method::UnionFind, DEFAULT_BUDGET).unwrap();
        assert_eq!(full.orbit_count, fixed.orbit_count);
        assert_eq!(full.orbit_sizes.iter().sum::<u64>(), full.total);
        let mut a: Vec<_> = full.signatures.clone();
        let mut b: Vec<_> = fixed.signatures.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}

#[test]
fn signature_is_constant_on_orbits() {
    let f = Fp::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 3;
    let gens = group_generators(n, &f);
    let cs = comps(n, &[&[1, 2], &[2], &[3]]);
    let factors: Vec<Vec<FlagChain<Fp>>> = cs.iter().map(|a| enumerate(n, &f, a, 1 << 22).unwrap()).collect();
    for _ in 0..40 {
        let chains = factors.iter().map(|fl| fl[rng.gen_range(0..fl.len())].clone()).collect();
        let t = FlagTuple::new(n, chains).unwrap();
        let g = random_word(&gens, 20, &mut rng);
        assert_eq!(signature(&t).unwrap(), signature(&t.act(&g).unwrap()).unwrap());
    }
}

#[test]
fn linear_census_of_lines_under_diagonal_matrices() {
    let f = Fp::new(3).unwrap();
    let a = Composition::new(vec![1]).unwrap();
    let lines = flagtype_core::flags::enumerate_linear(2, &f, &a, 1000).unwrap();
    assert_eq!(lines.len(), 4);
    let d = Matrix::from_i64_rows(&f, &[vec![2, 0], vec![0, 1]]).unwrap();
    let c = census_of_factors(2, &f, vec![a], vec![lines], &[d], "diag", None, Method::UnionFind, 1000, false).unwrap();
    // the two coordinate lines are fixed; the other two are swapped
    assert_eq!(c.orbit_count, 3);
}

#[test]
fn parabolic_of_gl3_on_full_flags() {
    use flagtype_core::orbit::{gl_parabolic_generators, linear_census};
    for q in [3u64, 5] {
        let f = Fp::new(q).unwrap();
        let full = Composition::new(vec![1, 1, 1]).unwrap();
        let c = linear_census(3, &f, &[full], &gl_parabolic_generators(&f, &[2, 1]), "P(2,1)", DEFAULT_BUDGET).unwrap();
        assert_eq!(c.orbit_count, 3);
        assert_eq!(c.total, (1 + q) * (1 + q + q * q));
    }
}

#[test]
fn sp_prime_four_generators_give_the_full_group() {
    use flagtype_core::orbit::{matrix_group_order, sp_prime_generators};
    let f = Fp::new(3).unwrap();
    assert_eq!(matrix_group_order(&sp_prime_generators(&f, 2), 100_000).unwrap(), 51840);
}
