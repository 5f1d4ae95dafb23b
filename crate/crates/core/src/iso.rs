//! Isomorphism and automorphism search by backtracking over generator images.

use std::collections::HashMap;

use crate::error::Result;
use crate::group::{Group, Hom};

const UNSET: usize = usize::MAX;

/// Extends the assignment `gens[i] -> imgs[i]` to the subgroup they generate.
/// Returns the partial map, or `None` if it is not a well-defined injective
/// homomorphism.
fn extend(g: &Group, h: &Group, gens: &[usize], imgs: &[usize]) -> Option<Vec<usize>> {
    let mut map = vec![UNSET; g.order()];
    let mut used = vec![false; h.order()];
    map[0] = 0;
    used[0] = true;
    let mut stack = vec![0usize];
    while let Some(x) = stack.pop() {
        for (&s, &t) in gens.iter().zip(imgs) {
            let y = g.mul(x, s);
            let img = h.mul(map[x], t);
            if map[y] == UNSET {
                if std::mem::replace(&mut used[img], true) {
                    return None;
                }
                map[y] = img;
                stack.push(y);
            } else if map[y] != img {
                return None;
            }
        }
    }
    Some(map)
}

fn order_census(g: &Group) -> Vec<usize> {
    let mut v = g.elem_orders().to_vec();
    v.sort_unstable();
    v
}

/// All isomorphisms `G -> H` (up to `limit`), in lexicographic order of the
/// generator image tuples.
pub fn isomorphisms(g: &Group, h: &Group, limit: Option<usize>) -> Vec<Hom> {
    let mut out = Vec::new();
    if g.order() != h.order() || g.is_abelian() != h.is_abelian() || order_census(g) != order_census(h) {
        return out;
    }
    let gens = g.generators().to_vec();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let mut c: Vec<usize> = (0..h.order()).filter(|&t| h.elem_order(t) == g.elem_order(s)).collect();
            c.sort_by_key(|&t| (h.elem_order(t), t));
            c
        })
        .collect();
    let limit = limit.unwrap_or(usize::MAX);
    let mut imgs = Vec::with_capacity(gens.len());
    search(g, h, &gens, &candidates, &mut imgs, limit, &mut out);
    out
}

fn search(
    g: &Group,
    h: &Group,
    gens: &[usize],
    candidates: &[Vec<usize>],
    imgs: &mut Vec<usize>,
    limit: usize,
    out: &mut Vec<Hom>,
) {
    let depth = imgs.len();
    if depth == gens.len() {
        if let Some(map) = extend(g, h, gens, imgs) {
            if map.iter().all(|&x| x != UNSET) {
                out.push(Hom::trusted(map));
            }
        }
        return;
    }
    for &t in &candidates[depth] {
        if out.len() >= limit {
            return;
        }
        imgs.push(t);
        if extend(g, h, &gens[..=depth], imgs).is_some() {
            search(g, h, gens, candidates, imgs, limit, out);
        }
        imgs.pop();
    }
}

pub fn is_isomorphic(g: &Group, h: &Group) -> bool {
    !isomorphisms(g, h, Some(1)).is_empty()
}

/// `Aut(G)` as a group whose element `i` is `auts[i]`; the product of `i` and
/// `j` is `auts[i] ∘ auts[j]`. The identity map comes first.
pub fn automorphisms(g: &Group) -> Result<(Group, Vec<Hom>)> {
    let mut auts = isomorphisms(g, g, None);
    auts.sort();
    let group = hom_group(format!("Aut({})", g.name()), &auts)?;
    Ok((group, auts))
}

/// Multiplication table of a list of bijections closed under composition,
/// identity first.
pub(crate) fn hom_group(name: String, homs: &[Hom]) -> Result<Group> {
    let index: HashMap<&[usize], usize> = homs.iter().enumerate().map(|(i, h)| (h.images(), i)).collect();
    let mut table = Vec::with_capacity(homs.len());
    for a in homs {
        let mut row = Vec::with_capacity(homs.len());
        for b in homs {
            let c = a.after(b);
            match index.get(c.images()) {
                Some(&k) => row.push(k),
                None => return Err(crate::error::Error::NotClosed("maps not closed under composition".into())),
            }
        }
        table.push(row);
    }
    Group::from_table(name, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    /// Counts automorphisms by testing every bijection fixing 0.
    fn brute_aut_count(g: &Group) -> usize {
        fn rec(g: &Group, perm: &mut Vec<usize>, used: &mut Vec<bool>, count: &mut usize) {
            let n = g.order();
            if perm.len() == n {
                if (0..n).all(|a| (0..n).all(|b| perm[g.mul(a, b)] == g.mul(perm[a], perm[b]))) {
                    *count += 1;
                }
                return;
            }
            for t in 1..n {
                if !used[t] {
                    used[t] = true;
                    perm.push(t);
                    rec(g, perm, used, count);
                    perm.pop();
                    used[t] = false;
                }
            }
        }
        let mut used = vec![false; g.order()];
        used[0] = true;
        let mut count = 0;
        rec(g, &mut vec![0], &mut used, &mut count);
        count
    }

    #[test]
    fn quaternion_is_not_dihedral() {
        let q8 = Group::quaternion(8).unwrap();
        let d8 = Group::dihedral(8).unwrap();
        assert!(isomorphisms(&q8, &d8, None).is_empty());
    }

    #[test]
    fn automorphism_counts_match_brute_force() {
        let c2 = Arc::new(Group::cyclic(2).unwrap());
        for g in [
            Group::cyclic(3).unwrap(),
            Group::cyclic(8).unwrap(),
            Group::direct_product(&c2, &c2).unwrap(),
            Group::symmetric(3).unwrap(),
            Group::dihedral(8).unwrap(),
            Group::quaternion(8).unwrap(),
        ] {
            let (aut, homs) = automorphisms(&g).unwrap();
            assert_eq!(aut.order(), brute_aut_count(&g), "{}", g.name());
            assert_eq!(homs[0], Hom::identity(&g));
        }
        assert_eq!(automorphisms(&Group::cyclic(3).unwrap()).unwrap().0.order(), 2);
    }

    #[test]
    fn isomorphisms_are_homomorphisms() {
        let c2 = Arc::new(Group::cyclic(2).unwrap());
        let c3 = Arc::new(Group::cyclic(3).unwrap());
        let c6 = Group::cyclic(6).unwrap();
        let p = Group::direct_product(&c2, &c3).unwrap();
        let isos = isomorphisms(&p, &c6, None);
        assert_eq!(isos.len(), 2);
        for f in &isos {
            assert!(f.is_hom(&p, &c6) && f.is_bijective(6));
        }
        let s3 = Group::symmetric(3).unwrap();
        assert!(isomorphisms(&s3, &s3, None).contains(&Hom::identity(&s3)));
        assert_eq!(isomorphisms(&s3, &s3, Some(1)).len(), 1);
    }
}
