use propends::fpgroup::same_subgroup;
use propends::grushko::{
    cp_lattice_classify, kurosh, random_unimodular, schreier_basis_cyclic_cover, FreeProductDescriptor, LatticeData,
    SubgroupSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classifier_recovers_construction(p in prime(), a in 0usize..4, b in 0usize..4, c in 0usize..5, seed in any::<u64>()) {
        let m = LatticeData::standard(p, a, b, c).unwrap();
        prop_assume!(m.rank() > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, u_inv) = random_unimodular(m.rank(), 3 * m.rank(), &mut rng);
        let cls = cp_lattice_classify(&m.conjugate(&u, &u_inv)).unwrap();
        prop_assert_eq!(cls.triple(), (a, b, c));
        prop_assert!(cls.invariants_hold());
        prop_assert_eq!(cls.rank, p as usize * a + (p as usize - 1) * b + c);
        prop_assert_eq!(cls.fixed_rank, a + c);
    }

    #[test]
    fn cover_basis_generates_the_kernel(r in 1usize..=4, p in prime()) {
        let basis = schreier_basis_cyclic_cover(r, p).unwrap();
        prop_assert!(basis.verified());
        prop_assert!(same_subgroup(&basis.words, &basis.rs_words));
    }

    #[test]
    fn kurosh_rank_matches_schreier(r in 1usize..=3, modulus in prop::sample::select(vec![2u32, 3, 4, 6, 9]), images in prop::collection::vec(0u32..9, 3)) {
        let images: Vec<Vec<u32>> = images[..r].iter().map(|&x| vec![x % modulus]).collect();
        let g = FreeProductDescriptor::new(2, vec![], r).unwrap();
        let k = kurosh(&g, &SubgroupSpec::Kernel { modulus, images }, 20000).unwrap();
        prop_assert_eq!(k.rank_agrees(), Some(true));
        prop_assert_eq!(k.rs_rank, Some(k.index * (r - 1) + 1));
        prop_assert_eq!(k.s_h, k.s_h_formula);
    }
}
