use std::sync::Arc;

use propends::cli::parse_group_expr;
use propends::modrep::{
    indecomposables_isomorphic, is_isomorphic, krull_schmidt, FiniteGroup, GModule, KsOptions, Subgroup,
};
use proptest::prelude::*;

const GROUPS: &[(&str, u32)] = &[
    ("cyclic(4)", 2),
    ("cyclic(8)", 2),
    ("finite{a, b; a^2, b^2, [a, b]}", 2),
    ("finite{a, b; a^4, b^2, (a b)^2}", 2),
    ("finite{a, b; a^4, a^2 b^-2, b^-1 a b a}", 2),
    ("finite{a, b; a^4, b^2, [a, b]}", 2),
    ("cyclic(9)", 3),
    ("finite{a, b; a^3, b^3, [a, b]}", 3),
    ("cyclic(5)", 5),
];

fn group(i: usize) -> Arc<FiniteGroup> {
    let (text, p) = GROUPS[i];
    let pres = parse_group_expr(text).unwrap().to_pro_p(p).unwrap().compile().unwrap();
    FiniteGroup::from_presentation(&pres, p, 4096).unwrap()
}

fn subgroup(g: &Arc<FiniteGroup>, elems: &[usize]) -> Subgroup {
    let words: Vec<_> = elems.iter().map(|&e| g.word(e % g.order()).clone()).collect();
    g.subgroup(&words, None).unwrap()
}

fn pool(g: &Arc<FiniteGroup>, u: &Subgroup) -> Vec<GModule> {
    let mut v = vec![
        GModule::trivial(Arc::clone(g), 1),
        GModule::augmentation_ideal(Arc::clone(g)).0,
        GModule::regular(Arc::clone(g)),
        GModule::induce(u, &GModule::trivial(Arc::clone(&u.group), 1)).unwrap(),
        GModule::j_ideal(u).unwrap(),
    ];
    v.retain(|m| m.dim() > 0);
    v
}

fn instance() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0..GROUPS.len(), prop::collection::vec(0usize..64, 0..=2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nonzero_modules_have_invariants((gi, elems) in instance()) {
        let g = group(gi);
        let u = subgroup(&g, &elems);
        for m in pool(&g, &u) {
            prop_assert!(m.invariants().dim() > 0);
        }
    }

    #[test]
    fn j_ideal_is_induced_augmentation((gi, elems) in instance()) {
        let g = group(gi);
        let u = subgroup(&g, &elems);
        let j = GModule::j_ideal(&u).unwrap();
        let ind = GModule::induce(&u, &GModule::augmentation_ideal(Arc::clone(&u.group)).0).unwrap();
        prop_assert_eq!(j.dim(), ind.dim());
        if j.dim() > 0 {
            prop_assert!(is_isomorphic(&j, &ind, &KsOptions::default()).unwrap().is_yes());
        }
    }

    #[test]
    fn summands_of_a_sum_come_from_a_part((gi, elems) in instance(), a in 0usize..5, b in 0usize..5) {
        let g = group(gi);
        let u = subgroup(&g, &elems);
        let mods = pool(&g, &u);
        let (n1, n2) = (&mods[a % mods.len()], &mods[b % mods.len()]);
        let opts = KsOptions::default();
        let sum = krull_schmidt(&GModule::direct_sum(&[n1, n2]).unwrap(), &opts).unwrap();
        let parts = [krull_schmidt(n1, &opts).unwrap(), krull_schmidt(n2, &opts).unwrap()];
        for s in &sum.summands {
            let found = parts
                .iter()
                .flat_map(|r| &r.summands)
                .any(|t| indecomposables_isomorphic(&t.module, &s.module).unwrap().is_some());
            prop_assert!(found);
        }
    }

    #[test]
    fn frobenius_reciprocity((gi, elems) in instance(), a in 0usize..5, which in 0usize..3) {
        let g = group(gi);
        let u = subgroup(&g, &elems);
        let mods = pool(&g, &u);
        let m = &mods[a % mods.len()];
        let n = match which {
            0 => GModule::trivial(Arc::clone(&u.group), 1),
            1 => GModule::augmentation_ideal(Arc::clone(&u.group)).0,
            _ => GModule::regular(Arc::clone(&u.group)),
        };
        prop_assume!(n.dim() > 0);
        let ind = GModule::induce(&u, &n).unwrap();
        let res = m.restrict(&u).unwrap();
        prop_assert_eq!(ind.hom_space(m).unwrap().dim(), n.hom_space(&res).unwrap().dim());
        prop_assert_eq!(m.hom_space(&ind).unwrap().dim(), res.hom_space(&n).unwrap().dim());
    }
}
