//! Property tests of structural invariants over the small-group catalog.

use std::sync::Arc;

use proptest::prelude::*;
use sbw_core::catalog::Catalog;
use sbw_core::crossed::linked;
use sbw_core::gamma::{GammaElement, GammaSpace};
use sbw_core::poset::PosetG;
use sbw_core::sections::{enumerate_sections, goursat, product, section_from_goursat_pair, star, Section};
use sbw_core::{ElemSet, Group};

fn groups(max_order: usize) -> Vec<Arc<Group>> {
    Catalog::build(8).unwrap().entries().iter().map(|e| e.group.clone()).filter(|g| g.order() <= max_order).collect()
}

fn pick<T: Clone>(items: &[T], i: usize) -> T {
    items[i % items.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quotient_orders_multiply(gi in 0usize..14, ni in 0usize..64) {
        let g = pick(&groups(8), gi);
        let n = pick(&g.normal_subgroups(), ni);
        let (quotient, hom) = g.quotient(&n).unwrap();
        prop_assert_eq!(quotient.order() * n.order(), g.order());
        prop_assert!(hom.is_hom(&g, &quotient));
    }

    #[test]
    fn double_cosets_partition(gi in 0usize..14, ai in 0usize..64, bi in 0usize..64) {
        let g = pick(&groups(8), gi);
        let subs = g.subgroups();
        let (a, b) = (pick(&subs, ai), pick(&subs, bi));
        let mut seen = ElemSet::empty(g.order());
        for t in g.double_cosets(&a, &b).unwrap() {
            for x in a.elems().iter() {
                for y in b.elems().iter() {
                    seen.insert(g.mul(g.mul(x, t), y));
                }
            }
        }
        let total: usize = g
            .double_cosets(&a, &b)
            .unwrap()
            .iter()
            .map(|&t| {
                let at = a.elems().iter().map(|x| g.mul(x, t)).collect::<Vec<_>>();
                let mut set = ElemSet::empty(g.order());
                for x in at {
                    for y in b.elems().iter() {
                        set.insert(g.mul(x, y));
                    }
                }
                set.len()
            })
            .sum();
        prop_assert_eq!(seen.len(), g.order());
        prop_assert_eq!(total, g.order());
    }

    #[test]
    fn goursat_round_trip_on_random_subgroups(gi in 0usize..14, hi in 0usize..14, ui in 0usize..4096, vi in 0usize..4096) {
        let (g, h) = (pick(&groups(8), gi), pick(&groups(8), hi));
        let x = product(&g, &h).unwrap();
        let subs = x.subgroups();
        let (u, v) = (pick(&subs, ui), pick(&subs, vi));
        let (qu, qv) = (goursat(&x, &u).unwrap(), goursat(&x, &v).unwrap());
        prop_assert_eq!(sbw_core::sections::subgroup_from_goursat(&qu), u.clone());
        let is_section = v.is_subgroup_of(&u) && x.is_normal_in(&v, &u).unwrap();
        match section_from_goursat_pair(&qu, &qv) {
            Ok(s) => prop_assert!(is_section && s.t() == &u && s.s() == &v),
            Err(_) => prop_assert!(!is_section),
        }
    }

    #[test]
    fn opposite_swaps_invariants(gi in 0usize..14, hi in 0usize..14, ci in 0usize..100000) {
        let (g, h) = (pick(&groups(8), gi), pick(&groups(8), hi));
        let x = product(&g, &h).unwrap();
        let classes = enumerate_sections(&x);
        let s: Section = pick(&classes, ci).section;
        let op = s.opposite().unwrap();
        let (a, b) = (s.invariants().unwrap(), op.invariants().unwrap());
        prop_assert_eq!(a.left, b.right);
        prop_assert_eq!(a.right, b.left);
        prop_assert_eq!(op.opposite().unwrap().key(), s.key());
    }

    #[test]
    fn composition_is_associative(ids in proptest::array::uniform4(0usize..14), picks in proptest::array::uniform3(0usize..1_000_000)) {
        let all = groups(8);
        let gs: Vec<Arc<Group>> = ids.iter().map(|&i| pick(&all, i)).collect();
        let element = |i: usize, j: usize, r: usize| {
            let space = GammaSpace::get(&gs[i], &gs[j]).unwrap();
            GammaElement::basis_element(&space, r % space.dim())
        };
        let (a, b, c) = (element(0, 1, picks[0]), element(1, 2, picks[1]), element(2, 3, picks[2]));
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let op = a.compose(&b).unwrap().opposite().unwrap();
        prop_assert_eq!(op, b.opposite().unwrap().compose(&a.opposite().unwrap()).unwrap());
    }

    #[test]
    fn e_idempotents_multiply_by_join(gi in 0usize..8, xi in 0usize..1000, yi in 0usize..1000) {
        let g = pick(&groups(6), gi);
        let poset = PosetG::build(&g);
        let e = poset.e_idempotents().unwrap();
        let (x, y) = (xi % poset.len(), yi % poset.len());
        prop_assert_eq!(e[x].compose(&e[y]).unwrap(), e[poset.join(x, y)].clone());
    }
}

/// Linkage is reflexive, symmetric, and transitive through star products of witnesses.
#[test]
fn linkage_is_an_equivalence() {
    let gs: Vec<Arc<Group>> = groups(8).into_iter().filter(|g| g.order() <= 4 || g.name() == "D8" || g.name() == "Q8").collect();
    let mut triples = Vec::new();
    for g in &gs {
        let poset = PosetG::build(g);
        for x in 0..poset.len() {
            triples.push((g.clone(), poset.pair(x).k.clone(), poset.pair(x).p.clone()));
        }
    }
    let link = |a: &(Arc<Group>, sbw_core::Subgroup, sbw_core::Subgroup), b: &(Arc<Group>, sbw_core::Subgroup, sbw_core::Subgroup)| {
        linked(&a.0, &a.1, &a.2, &b.0, &b.1, &b.2).unwrap()
    };
    for a in &triples {
        assert!(link(a, a).is_some());
        for b in &triples {
            let ab = link(a, b);
            assert_eq!(ab.is_some(), link(b, a).is_some());
            let Some(ab) = ab else { continue };
            for c in triples.iter().filter(|c| c.0.order() == b.0.order()) {
                let Some(bc) = link(b, c) else { continue };
                let (w1, w2) = (&ab.witness.section, &bc.witness.section);
                let t = star(w1.ambient(), w1.t(), w2.ambient(), w2.t()).unwrap();
                let s = star(w1.ambient(), w1.s(), w2.ambient(), w2.s()).unwrap();
                let composite = Section::new(product(&a.0, &c.0).unwrap(), t, s).unwrap();
                let inv = composite.invariants().unwrap();
                assert_eq!(inv.left.p_t.order(), a.0.order());
                assert_eq!((&inv.left.k_t, &inv.left.p_s), (&a.1, &a.2));
                assert_eq!((&inv.right.k_t, &inv.right.p_s), (&c.1, &c.2));
                assert!(inv.left.k_s.is_trivial() && inv.right.k_s.is_trivial());
                assert!(link(a, c).is_some());
            }
        }
    }
}

/// Every merged seed row holds reduced pairs of groups of one order.
#[test]
fn seed_rows_merge_reduced_pairs_of_equal_order() {
    let cat = Catalog::build(8).unwrap();
    let table = sbw_core::classification::seeds(&cat, 8).unwrap();
    assert!(table.order_violations.is_empty());
    assert!(table.undetermined.is_empty());
    for class in &table.classes {
        let rows: Vec<_> = class.iter().map(|&r| &table.rows[r]).collect();
        assert!(rows.iter().all(|r| r.order == rows[0].order));
        assert!(rows.iter().all(|r| r.gamma_order == rows[0].gamma_order && r.irr_count == rows[0].irr_count));
    }
}
