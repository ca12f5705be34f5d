use proptest::prelude::*;

use dline_core::cosets::library::groups_up_to_12;
use dline_core::cosets::{
    coset_membership_equiv, double_cosets, left_cosets, pm_double_cosets, right_cosets, wreath_mul, FiniteGroup, Subgroup, WreathElement,
};

fn corpus() -> Vec<(String, FiniteGroup)> {
    groups_up_to_12()
}

/// A group from the corpus and one of its subgroups, chosen by index.
fn group_and_subgroup() -> impl Strategy<Value = (usize, usize)> {
    let n = corpus().len();
    (0..n, any::<prop::sample::Index>()).prop_map(move |(g, i)| {
        let subs = corpus()[g].1.all_subgroups().len();
        (g, i.index(subs))
    })
}

fn pick(g: usize, d: usize) -> (FiniteGroup, Subgroup) {
    let grp = corpus().swap_remove(g).1;
    let sub = grp.all_subgroups().swap_remove(d);
    (grp, sub)
}

#[test]
fn library_groups_satisfy_the_axioms() {
    for (name, g) in corpus() {
        let e = g.identity();
        for x in g.elements() {
            assert_eq!(g.mul(e, x), x, "{name}");
            assert_eq!(g.mul(x, g.inv(x)), e, "{name}");
            for y in g.elements() {
                for z in g.elements() {
                    assert_eq!(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)), "{name}");
                }
            }
        }
    }
}

#[test]
fn corpus_covers_every_order_up_to_12() {
    let orders: std::collections::BTreeSet<usize> = corpus().iter().map(|(_, g)| g.order()).collect();
    assert_eq!(orders, (1..=12).collect());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn double_cosets_partition_the_group((gi, ci) in group_and_subgroup(), di in any::<prop::sample::Index>()) {
        let (g, c) = pick(gi, ci);
        let subs = g.all_subgroups();
        let d = &subs[di.index(subs.len())];
        let p = double_cosets(&g, &c, d).unwrap();
        prop_assert!(p.is_partition_of(g.order()));
        // |ChD| = |C||D| / |C ∩ hDh⁻¹|
        for b in p.blocks() {
            let h = b[0];
            let conj = d.iter().map(|x| g.mul(g.mul(h, x), g.inv(h))).filter(|&y| c.contains(y)).count();
            prop_assert_eq!(b.len() * conj, c.len() * d.len());
        }
    }

    #[test]
    fn membership_agrees_with_intersection_test((gi, ci) in group_and_subgroup(), x in any::<prop::sample::Index>(), y in any::<prop::sample::Index>()) {
        let (g, c) = pick(gi, ci);
        let (x, y) = (x.index(g.order()), y.index(g.order()));
        let p = double_cosets(&g, &c, &c).unwrap();
        let member = coset_membership_equiv(&g, &c, &c, x, y).unwrap();
        prop_assert_eq!(member, p.block_of(y).contains(&x));
    }

    #[test]
    fn one_sided_cosets_have_equal_size((gi, di) in group_and_subgroup()) {
        let (g, d) = pick(gi, di);
        for p in [left_cosets(&g, &d).unwrap(), right_cosets(&g, &d).unwrap()] {
            prop_assert!(p.is_partition_of(g.order()));
            prop_assert!(p.blocks().iter().all(|b| b.len() == d.len()));
            prop_assert_eq!(p.blocks().len() * d.len(), g.order());
        }
    }

    #[test]
    fn pm_blocks_are_closed_under_inversion((gi, di) in group_and_subgroup()) {
        let (g, d) = pick(gi, di);
        let pm = pm_double_cosets(&g, &d).unwrap();
        let dd = double_cosets(&g, &d, &d).unwrap();
        prop_assert!(pm.is_partition_of(g.order()));
        for h in g.elements() {
            let mut a = pm.block_of(h).to_vec();
            let mut b = pm.block_of(g.inv(h)).to_vec();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(&a, &b);
            // Each (D,±) block is one or two ordinary double cosets.
            let mut union: Vec<usize> = dd.block_of(h).iter().chain(dd.block_of(g.inv(h))).copied().collect();
            union.sort_unstable();
            union.dedup();
            prop_assert_eq!(a, union);
        }
    }

    #[test]
    fn normal_subgroups_give_cosets((gi, di) in group_and_subgroup()) {
        let (g, d) = pick(gi, di);
        prop_assume!(g.is_normal(&d));
        let dd = double_cosets(&g, &d, &d).unwrap();
        let left = left_cosets(&g, &d).unwrap();
        prop_assert!(dd.same_blocks(&left));
        let pm = pm_double_cosets(&g, &d).unwrap();
        for h in g.elements() {
            let hd: Vec<usize> = d.iter().map(|x| g.mul(h, x)).collect();
            prop_assert!(hd.iter().all(|y| pm.block_of(h).contains(y)));
        }
    }

    #[test]
    fn wreath_product_acts((gi, di) in group_and_subgroup(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), x in any::<prop::sample::Index>()) {
        let (g, d) = pick(gi, di);
        let all = WreathElement::all(&d);
        prop_assert_eq!(all.len(), 2 * d.len() * d.len());
        let (u, v) = (all[i.index(all.len())], all[j.index(all.len())]);
        let x = x.index(g.order());
        prop_assert_eq!(wreath_mul(&g, u, v).act(&g, x), u.act(&g, v.act(&g, x)));
        prop_assert_eq!(WreathElement::identity(&g).act(&g, x), x);
    }
}
