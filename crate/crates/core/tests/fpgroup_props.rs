use propends::exactlin::FpMatrix;
use propends::fpgroup::transfer::{subgroup_mod_p, transfer};
use propends::fpgroup::{
    abelianization, fox_h1_dim, fox_h1_dim_permutation, kernel_table, reidemeister_schreier, Presentation,
    SubgroupData, Word,
};
use proptest::prelude::*;

fn word(n_gens: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..n_gens as i32, any::<bool>()), 0..=max_len).prop_map(|ls| {
        Word::new(
            &ls.into_iter()
                .map(|(g, inv)| if inv { -(g + 1) } else { g + 1 })
                .collect::<Vec<_>>(),
        )
    })
}

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5])
}

/// A map `free(r) -> F_p^k`, with `r` and `k` at most three.
fn free_map() -> impl Strategy<Value = (usize, u32, Vec<Vec<u32>>)> {
    (1..=3usize, prime(), 1..=2usize).prop_flat_map(|(r, p, k)| {
        prop::collection::vec(prop::collection::vec(0..p, k), r).prop_map(move |im| (r, p, im))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nielsen_schreier_rank((r, p, images) in free_map()) {
        let table = kernel_table(&Presentation::free(r), &images, p).unwrap();
        let n = table.index();
        let sd = reidemeister_schreier(&table);
        prop_assert_eq!(sd.n_schreier_gens(), n * (r - 1) + 1);
    }

    #[test]
    fn rewriting_is_consistent((r, p, images) in free_map(), w in word(3, 12)) {
        let w = Word::new(&w.letters().iter().copied().filter(|l| (l.unsigned_abs() as usize) <= r).collect::<Vec<_>>());
        let table = kernel_table(&Presentation::free(r), &images, p).unwrap();
        let sd = reidemeister_schreier(&table);
        // close w up into the subgroup with its coset representative
        let coset = table.trace(0, &w);
        let h = w.mul(&sd.transversal()[coset].inverse());
        prop_assert!(sd.contains(&h));
        let raw = sd.rewrite_raw(&h).unwrap();
        let gens = sd.schreier_gen_words();
        prop_assert_eq!(raw.substitute(&gens), h.clone());
        let mut sum = vec![0i64; r];
        for (s, e) in raw.exponent_sums(gens.len()).into_iter().enumerate() {
            for (acc, x) in sum.iter_mut().zip(gens[s].exponent_sums(r)) {
                *acc += e * x;
            }
        }
        prop_assert_eq!(sum, h.exponent_sums(r));
    }

    #[test]
    fn transfer_composes(p in prime(), r in 1..=3usize, first in prop::collection::vec(0u32..5, 3), second in prop::collection::vec(0u32..5, 3)) {
        let g = Presentation::free(r);
        let u = SubgroupData::from_table(kernel_table(&g, &vec![vec![0]; r], p).unwrap());
        let v_images: Vec<Vec<u32>> = (0..r).map(|i| vec![first[i] % p]).collect();
        let w_images: Vec<Vec<u32>> = (0..r).map(|i| vec![first[i] % p, second[i] % p]).collect();
        let v = SubgroupData::from_table(kernel_table(&g, &v_images, p).unwrap());
        let w = SubgroupData::from_table(kernel_table(&g, &w_images, p).unwrap());
        let uw = transfer(&u, &w, p).unwrap();
        let composed: FpMatrix = transfer(&v, &w, p).unwrap().mul(&transfer(&u, &v, p).unwrap());
        prop_assert_eq!(uw, composed);
    }

    #[test]
    fn fox_trivial_module_is_abelianization(p in prime(), rels in prop::collection::vec(word(2, 8), 0..4)) {
        let pres = Presentation::with_default_names(2, rels, "random");
        let one = FpMatrix::identity(p, 1);
        let h1 = fox_h1_dim(&pres, &[one.clone(), one]).unwrap();
        prop_assert_eq!(h1, abelianization(&pres, p).mod_p_dim);
    }

    #[test]
    fn shapiro_for_permutation_modules(p in prime(), images in prop::collection::vec(prop::collection::vec(0u32..5, 2), 2)) {
        // C_p * C_p, mapped onto a quotient of (Z/p)^2
        let a = Word::gen(0);
        let b = Word::gen(1);
        let g = Presentation::with_default_names(2, vec![a.pow(p as i64), b.pow(p as i64)], "CpCp");
        let images: Vec<Vec<u32>> = images.into_iter().map(|v| v.into_iter().map(|x| x % p).collect()).collect();
        let table = kernel_table(&g, &images, p).unwrap();
        let sd = reidemeister_schreier(&table);
        prop_assert_eq!(fox_h1_dim_permutation(&table, p), subgroup_mod_p(&sd, p).dim());
    }
}
