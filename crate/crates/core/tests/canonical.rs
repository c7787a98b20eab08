use flagtype_core::canonical::{
    normalize_pair, representative, sp_prime_transvection, standard_pair, valid_b, Block, IndexLayout, RvContext,
    RvKind, PLUS_BLOCKS,
};
use flagtype_core::error::Error;
use flagtype_core::field::{Field, Fp};
use flagtype_core::geometry::{group_generators, is_maximal_isotropic, random_isotropic, random_word};
use flagtype_core::invariants::{b_invariants, theta, BInvariants, ThetaInvariants};
use flagtype_core::matrix::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_blocks_layout() -> IndexLayout {
    let mut b = [1usize; 15];
    b[14] = 2;
    let b = BInvariants::new(b);
    let g = |j: usize| b.get(j);
    let a0 = g(1) + g(2);
    let ap = g(3) + g(7) + g(8) + g(10);
    let am = g(4) + g(7) + g(9) + g(11);
    let a1 = g(5) + g(6) + g(8) + g(9) + 2 * g(12) + g(13) + g(15);
    let a2 = g(12) + g(13) + g(14);
    let n = a0 + ap + am + a1 + a2;
    assert_eq!(n, 22);
    IndexLayout::new(ThetaInvariants::new(n, a0, ap, am, a1).unwrap(), b).unwrap()
}

fn random_invertible(f: &Fp, size: usize, rng: &mut ChaCha8Rng) -> Matrix<Fp> {
    loop {
        let rows = (0..size).map(|_| (0..size).map(|_| f.random(rng)).collect()).collect();
        let m = Matrix::from_rows_with_cols(f, rows, size).unwrap();
        if m.rank() == size {
            return m;
        }
    }
}

fn random_sp_prime(f: &Fp, size: usize, rng: &mut ChaCha8Rng) -> Matrix<Fp> {
    let mut a = Matrix::identity(f, size);
    for _ in 0..6 {
        let v: Vec<u32> = (0..size).map(|_| f.random(rng)).collect();
        let c = f.random(rng);
        a = sp_prime_transvection(f, &v, &c).mul(&a).unwrap();
    }
    a
}

#[test]
fn layout_blocks_partition_plus_indices() {
    let l = all_blocks_layout();
    let mut all: Vec<usize> = PLUS_BLOCKS.iter().flat_map(|&b| l.block(b)).collect();
    all.sort_unstable();
    assert_eq!(all, l.plus_indices());
    assert_eq!(l.pieces().iter().map(|p| p.len()).sum::<usize>(), 44);
}

#[test]
fn representative_roundtrip_exhaustive_to_rank_four() {
    let f = Fp::new(3).unwrap();
    let mut total = 0;
    for n in 1..=4 {
        for t in ThetaInvariants::all(n) {
            let (up, um) = standard_pair(&f, &t);
            assert_eq!(theta(&up, &um).unwrap(), t);
            for b in valid_b(&t) {
                let v = representative(&f, &t, &b).unwrap();
                assert!(is_maximal_isotropic(&v));
                assert_eq!(b_invariants(&up, &um, &v).unwrap(), b);
                total += 1;
            }
        }
    }
    assert!(total > 100);
}

#[test]
fn normalize_pair_on_random_pairs() {
    for q in [3u64, 5] {
        let f = Fp::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(q);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4);
            let up = random_isotropic(&f, n, rng.gen_range(0..=n), &mut rng);
            let um = random_isotropic(&f, n, rng.gen_range(0..=n), &mut rng);
            let g = normalize_pair(&up, &um).unwrap();
            let (sp, sm) = standard_pair(&f, &theta(&up, &um).unwrap());
            assert_eq!(g.apply(&up).unwrap(), sp);
            assert_eq!(g.apply(&um).unwrap(), sm);
        }
    }
}

#[test]
fn normalize_pair_scrambled_opposite_pair() {
    let f = Fp::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 3;
    let t = ThetaInvariants::new(n, 0, 0, 0, n).unwrap();
    let (u0, un) = standard_pair(&f, &t);
    let h = random_word(&group_generators(n, &f), 30, &mut rng);
    let g = normalize_pair(&h.apply(&u0).unwrap(), &h.apply(&un).unwrap()).unwrap();
    assert_eq!(g.compose(&h).apply(&u0).unwrap(), u0);
    assert_eq!(g.compose(&h).apply(&un).unwrap(), un);
}

#[test]
fn rv_generator_battery() {
    let f = Fp::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ctx = RvContext::new(&f, all_blocks_layout());
    for j in 1..=14 {
        let size = ctx.layout.b.get(j);
        let id = ctx.generator(&RvKind::H { j, a: Matrix::identity(&f, size) }).unwrap();
        assert!(id.is_identity());
        let a = random_invertible(&f, size, &mut rng);
        ctx.generator(&RvKind::H { j, a }).unwrap();
    }
    let a = random_sp_prime(&f, 2, &mut rng);
    ctx.generator(&RvKind::H15 { a }).unwrap();
    let mut count = 0;
    for &bi in PLUS_BLOCKS.iter() {
        for &bk in PLUS_BLOCKS.iter() {
            for &i in &ctx.layout.block(bi) {
                for &k in &ctx.layout.block(bk) {
                    if ctx.transvection_case(i, k).is_err() {
                        assert!(matches!(
                            ctx.generator(&RvKind::G { i, k, mu: 1 }),
                            Err(Error::Inadmissible(_))
                        ));
                        continue;
                    }
                    let zero = ctx.generator(&RvKind::G { i, k, mu: 0 }).unwrap();
                    assert!(zero.is_identity());
                    let mu = f.random_nonzero(&mut rng);
                    ctx.generator(&RvKind::G { i, k, mu }).unwrap();
                    count += 1;
                }
            }
        }
    }
    assert!(count > 50);
}

#[test]
fn eliminate_random_vectors() {
    let f = Fp::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ctx = RvContext::new(&f, all_blocks_layout());
    let m = 44;
    assert!(ctx.eliminate(ctx.layout.block(Block::Bar6)[0], &vec![0; m]).unwrap().is_identity());
    for &bk in PLUS_BLOCKS.iter() {
        let k = ctx.layout.block(bk)[0];
        for _ in 0..3 {
            let mut u = vec![0u32; m];
            for &bi in PLUS_BLOCKS.iter() {
                let exceptional = matches!(
                    (bi, bk),
                    (Block::J(15), Block::Bar12) | (Block::J(15), Block::Bar8) | (Block::Bar12, Block::Bar8)
                );
                if flagtype_core::canonical::precedes(bi, bk) || exceptional {
                    for i in ctx.layout.block(bi) {
                        u[i - 1] = f.random(&mut rng);
                    }
                }
            }
            ctx.eliminate(k, &u).unwrap();
        }
    }
    let k = ctx.layout.block(Block::J(3))[0];
    let mut u = vec![0u32; m];
    u[ctx.layout.block(Block::J(5))[0] - 1] = 1;
    assert!(matches!(ctx.eliminate(k, &u), Err(Error::Hypothesis(_))));
}
