//! Subgroups, the subgroup lattice and structural operations.

use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::bitset::ElemSet;
use crate::error::{Error, Result};
use crate::group::{Group, Hom};

/// A subgroup of a parent group, identified by its element set.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: u64,
    elems: ElemSet,
    order: usize,
    normal: bool,
}

impl Subgroup {
    pub fn elems(&self) -> &ElemSet {
        &self.elems
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.elems.to_vec()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elems.contains(x)
    }

    pub fn is_normal_in_parent(&self) -> bool {
        self.normal
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn parent_fingerprint(&self) -> u64 {
        self.parent
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elems.is_subset(&other.elems)
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.elems == other.elems
    }
}

impl Eq for Subgroup {}

impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.parent.hash(state);
        self.elems.hash(state);
    }
}

impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.elems.cmp(&other.elems).then(self.parent.cmp(&other.parent))
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All subgroups of a group, sorted by element list, with conjugacy classes.
#[derive(Debug)]
pub struct SubgroupLattice {
    subgroups: Vec<Subgroup>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    index: HashMap<ElemSet, usize>,
}

impl SubgroupLattice {
    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    /// Conjugacy classes as index lists; the first member of each class is its
    /// lexicographically least subgroup, and classes are sorted by that member.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, idx: usize) -> usize {
        self.class_of[idx]
    }

    pub fn index_of(&self, set: &ElemSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    pub fn class_representatives(&self) -> impl Iterator<Item = &Subgroup> {
        self.classes.iter().map(|c| &self.subgroups[c[0]])
    }
}

/// A subquotient `T/S` materialized as a group, elements ordered by least
/// coset representative.
#[derive(Debug, Clone)]
pub struct Subquotient {
    pub group: Arc<Group>,
    proj: Vec<usize>,
    reps: Vec<usize>,
}

const OUTSIDE: usize = usize::MAX;

impl Subquotient {
    /// Image of an ambient element of `T` in `T/S`.
    pub fn project(&self, x: usize) -> Option<usize> {
        match self.proj[x] {
            OUTSIDE => None,
            q => Some(q),
        }
    }

    /// Least ambient element of the coset `q`.
    pub fn lift(&self, q: usize) -> usize {
        self.reps[q]
    }

    pub fn reps(&self) -> &[usize] {
        &self.reps
    }
}

impl Group {
    pub(crate) fn check_parent(&self, s: &Subgroup) -> Result<()> {
        if s.parent == self.fingerprint() {
            Ok(())
        } else {
            Err(Error::MixedParents)
        }
    }

    pub fn is_normal_set(&self, set: &ElemSet) -> bool {
        self.generator_conjugations().iter().all(|perm| set.map(perm) == *set)
    }

    /// Wraps an element set already known to be a subgroup.
    pub(crate) fn subgroup_trusted(&self, elems: ElemSet) -> Subgroup {
        Subgroup {
            parent: self.fingerprint(),
            order: elems.len(),
            normal: self.is_normal_set(&elems),
            elems,
        }
    }

    pub fn subgroup_generated(&self, gens: &[usize]) -> Subgroup {
        self.subgroup_trusted(self.closure(gens))
    }

    pub fn subgroup_from_elems(&self, elems: &[usize]) -> Result<Subgroup> {
        if elems.iter().any(|&x| x >= self.order()) {
            return Err(Error::NotSubgroup);
        }
        let set = ElemSet::from_iter_with(self.order(), elems.iter().copied());
        if !set.contains(0) || self.closure(elems) != set {
            return Err(Error::NotSubgroup);
        }
        Ok(self.subgroup_trusted(set))
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        self.subgroup_trusted(ElemSet::from_iter_with(self.order(), [0]))
    }

    pub fn whole(&self) -> Subgroup {
        self.subgroup_trusted(ElemSet::full(self.order()))
    }

    /// `a` is a normal subgroup of `b`.
    pub fn is_normal_in(&self, a: &Subgroup, b: &Subgroup) -> Result<bool> {
        self.check_parent(a)?;
        self.check_parent(b)?;
        Ok(self.normal_in_sets(&a.elems, &b.elems))
    }

    pub(crate) fn normal_in_sets(&self, a: &ElemSet, b: &ElemSet) -> bool {
        a.is_subset(b)
            && self.greedy_generators(b).into_iter().all(|g| a.iter().all(|x| a.contains(self.conjugate(g, x))))
    }

    pub fn intersect(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        self.check_parent(a)?;
        self.check_parent(b)?;
        Ok(self.subgroup_trusted(a.elems.intersection(&b.elems)))
    }

    /// Subgroup generated by `a` and `b`.
    pub fn join(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        self.check_parent(a)?;
        self.check_parent(b)?;
        let mut u = a.elems.clone();
        u.union_with(&b.elems);
        Ok(self.subgroup_generated(&self.greedy_generators(&u)))
    }

    /// The set `AB` (a subgroup whenever one factor normalizes the other).
    pub fn product_set(&self, a: &ElemSet, b: &ElemSet) -> ElemSet {
        let mut out = ElemSet::empty(self.order());
        for x in a {
            for y in b {
                out.insert(self.mul(x, y));
            }
        }
        out
    }

    pub fn centralizer(&self, x: &Subgroup) -> Result<Subgroup> {
        self.check_parent(x)?;
        let gens = self.greedy_generators(&x.elems);
        let set = ElemSet::from_iter_with(
            self.order(),
            (0..self.order()).filter(|&g| gens.iter().all(|&s| self.mul(g, s) == self.mul(s, g))),
        );
        Ok(self.subgroup_trusted(set))
    }

    pub fn normalizer(&self, x: &Subgroup) -> Result<Subgroup> {
        self.check_parent(x)?;
        let gens = self.greedy_generators(&x.elems);
        let set = ElemSet::from_iter_with(
            self.order(),
            (0..self.order()).filter(|&g| gens.iter().all(|&s| x.contains(self.conjugate(g, s)))),
        );
        Ok(self.subgroup_trusted(set))
    }

    pub fn center(&self) -> Subgroup {
        self.centralizer(&self.whole()).expect("same parent")
    }

    /// `[A, B]`, generated by all `a^-1 b^-1 a b`.
    pub fn commutator(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        self.check_parent(a)?;
        self.check_parent(b)?;
        Ok(self.subgroup_trusted(self.commutator_sets(&a.elems, &b.elems)))
    }

    pub(crate) fn commutator_sets(&self, a: &ElemSet, b: &ElemSet) -> ElemSet {
        let mut comms = ElemSet::from_iter_with(self.order(), [0]);
        for x in a {
            for y in b {
                comms.insert(self.commutator_elem(x, y));
            }
        }
        self.closure(&comms.to_vec())
    }

    pub fn conjugate_set(&self, g: usize, set: &ElemSet) -> ElemSet {
        ElemSet::from_iter_with(self.order(), set.iter().map(|x| self.conjugate(g, x)))
    }

    /// One representative (the least element) per double coset `A g B`, ascending.
    pub fn double_cosets(&self, a: &Subgroup, b: &Subgroup) -> Result<Vec<usize>> {
        self.check_parent(a)?;
        self.check_parent(b)?;
        Ok(self.double_coset_reps(&a.elems, &b.elems))
    }

    pub(crate) fn double_coset_reps(&self, a: &ElemSet, b: &ElemSet) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        let mut reps = Vec::new();
        let (av, bv) = (a.to_vec(), b.to_vec());
        for g in 0..self.order() {
            if seen[g] {
                continue;
            }
            reps.push(g);
            for &x in &av {
                let xg = self.mul(x, g);
                for &y in &bv {
                    seen[self.mul(xg, y)] = true;
                }
            }
        }
        reps
    }

    /// The subgroup lattice, computed once per group.
    pub fn lattice(&self) -> Arc<SubgroupLattice> {
        self.lattice_cell().get_or_init(|| Arc::new(self.build_lattice())).clone()
    }

    pub fn subgroups(&self) -> Vec<Subgroup> {
        self.lattice().subgroups.clone()
    }

    /// Normal subgroups, sorted by element list.
    pub fn normal_subgroups(&self) -> Vec<Subgroup> {
        self.lattice().subgroups.iter().filter(|s| s.normal).cloned().collect()
    }

    fn build_lattice(&self) -> SubgroupLattice {
        let n = self.order();
        let mut index: HashMap<ElemSet, usize> = HashMap::new();
        let mut found: Vec<(ElemSet, Vec<usize>)> = Vec::new();
        let mut add = |set: ElemSet, gens: Vec<usize>, found: &mut Vec<(ElemSet, Vec<usize>)>| {
            if !index.contains_key(&set) {
                index.insert(set.clone(), found.len());
                found.push((set, gens));
            }
        };
        add(ElemSet::from_iter_with(n, [0]), Vec::new(), &mut found);
        let mut cyclic: Vec<usize> = Vec::new();
        for x in 1..n {
            let before = found.len();
            add(self.closure(&[x]), vec![x], &mut found);
            if found.len() > before {
                cyclic.push(x);
            }
        }
        let mut i = 0;
        while i < found.len() {
            let (set, gens) = found[i].clone();
            for &c in &cyclic {
                if set.contains(c) {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(c);
                let joined = self.closure(&g2);
                add(joined, g2, &mut found);
            }
            i += 1;
        }
        let mut sets: Vec<ElemSet> = found.into_iter().map(|(s, _)| s).collect();
        sets.sort();
        let index: HashMap<ElemSet, usize> = sets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let subgroups: Vec<Subgroup> = sets.into_iter().map(|s| self.subgroup_trusted(s)).collect();

        let mut class_of = vec![usize::MAX; subgroups.len()];
        let mut classes = Vec::new();
        for start in 0..subgroups.len() {
            if class_of[start] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = vec![start];
            class_of[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(k) = queue.pop_front() {
                for perm in self.generator_conjugations() {
                    let j = index[&subgroups[k].elems.map(perm)];
                    if class_of[j] == usize::MAX {
                        class_of[j] = id;
                        members.push(j);
                        queue.push_back(j);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        SubgroupLattice { subgroups, classes, class_of, index }
    }

    /// `T/S` for `S ⊴ T ≤ G`.
    pub fn subquotient(&self, t: &ElemSet, s: &ElemSet) -> Result<Subquotient> {
        if !self.normal_in_sets(s, t) {
            return Err(Error::NotNormal);
        }
        Ok(self.subquotient_trusted(t, s))
    }

    pub(crate) fn subquotient_trusted(&self, t: &ElemSet, s: &ElemSet) -> Subquotient {
        let mut proj = vec![OUTSIDE; self.order()];
        let mut reps = Vec::new();
        let sv = s.to_vec();
        for x in t {
            if proj[x] != OUTSIDE {
                continue;
            }
            let q = reps.len();
            reps.push(x);
            for &y in &sv {
                proj[self.mul(x, y)] = q;
            }
        }
        let m = reps.len();
        let mut table = vec![0; m * m];
        for a in 0..m {
            for b in 0..m {
                table[a * m + b] = proj[self.mul(reps[a], reps[b])];
            }
        }
        let name = format!("{}/{}", t.len(), s.len());
        Subquotient { group: Arc::new(Group::from_flat_trusted(name, m, table)), proj, reps }
    }

    /// `G/N` with the natural projection.
    pub fn quotient(&self, n: &Subgroup) -> Result<(Group, Hom)> {
        self.check_parent(n)?;
        if !n.normal {
            return Err(Error::NotNormal);
        }
        let sq = self.subquotient_trusted(&ElemSet::full(self.order()), &n.elems);
        let images = (0..self.order()).map(|x| sq.proj[x]).collect();
        let group = Arc::try_unwrap(sq.group).expect("freshly built");
        Ok((group, Hom::trusted(images)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_subgroups(g: &Group) -> Vec<Vec<usize>> {
        let n = g.order();
        assert!(n <= 12);
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask & 1 == 0 {
                continue;
            }
            let v: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if v.iter().all(|&a| v.iter().all(|&b| mask >> g.mul(a, b) & 1 == 1)) {
                out.push(v);
            }
        }
        out.sort();
        out
    }

    fn brute_class_count(g: &Group, subs: &[Vec<usize>]) -> usize {
        let mut reps = std::collections::BTreeSet::new();
        for s in subs {
            let least = (0..g.order())
                .map(|x| {
                    let mut c: Vec<usize> = s.iter().map(|&y| g.conjugate(x, y)).collect();
                    c.sort();
                    c
                })
                .min()
                .unwrap();
            reps.insert(least);
        }
        reps.len()
    }

    #[test]
    fn lattice_matches_power_set_scan() {
        let c2 = Arc::new(Group::cyclic(2).unwrap());
        for g in [
            Group::cyclic(1).unwrap(),
            Group::direct_product(&c2, &c2).unwrap(),
            Group::symmetric(3).unwrap(),
            Group::dihedral(8).unwrap(),
            Group::quaternion(8).unwrap(),
            Group::cyclic(12).unwrap(),
        ] {
            let brute = brute_subgroups(&g);
            let lat = g.lattice();
            let ours: Vec<Vec<usize>> = lat.subgroups().iter().map(|s| s.to_vec()).collect();
            assert_eq!(ours, brute, "{}", g.name());
            assert_eq!(lat.classes().len(), brute_class_count(&g, &brute), "{}", g.name());
        }
    }

    #[test]
    fn small_lattice_counts() {
        let c2 = Arc::new(Group::cyclic(2).unwrap());
        let v4 = Group::direct_product(&c2, &c2).unwrap();
        assert_eq!((v4.subgroups().len(), v4.lattice().classes().len()), (5, 5));
        let s3 = Group::symmetric(3).unwrap();
        assert_eq!((s3.subgroups().len(), s3.lattice().classes().len()), (6, 4));
        assert_eq!(Group::cyclic(1).unwrap().subgroups().len(), 1);
    }

    #[test]
    fn structure_operations() {
        let q8 = Group::quaternion(8).unwrap();
        let z = q8.center();
        assert_eq!(z.to_vec(), vec![0, 2]);
        let s3 = Group::symmetric(3).unwrap();
        let c3 = s3.subgroups().into_iter().find(|s| s.order() == 3).unwrap();
        assert_eq!(s3.centralizer(&c3).unwrap(), c3);
        assert_eq!(s3.normalizer(&c3).unwrap(), s3.whole());
        assert_eq!(s3.commutator(&s3.whole(), &s3.whole()).unwrap(), c3);
        let c6 = Group::cyclic(6).unwrap();
        assert!(c6.commutator(&c6.whole(), &c6.whole()).unwrap().is_trivial());
        assert_eq!(s3.normal_subgroups().len(), 3);
        assert!(matches!(q8.centralizer(&s3.whole()), Err(Error::MixedParents)));
    }

    #[test]
    fn double_coset_representatives() {
        let c4 = Group::cyclic(4).unwrap();
        let p = c4.subgroup_generated(&[2]);
        assert_eq!(c4.double_cosets(&p, &p).unwrap(), vec![0, 1]);
        let g = c4.whole();
        assert_eq!(c4.double_cosets(&g, &g).unwrap(), vec![0]);
        let one = c4.trivial_subgroup();
        assert_eq!(c4.double_cosets(&one, &one).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn double_cosets_partition_the_group() {
        let s3 = Group::symmetric(3).unwrap();
        let subs = s3.subgroups();
        for a in &subs {
            for b in &subs {
                let reps = s3.double_cosets(a, b).unwrap();
                let mut count = vec![0; 6];
                for &t in &reps {
                    let mut block = ElemSet::empty(6);
                    for x in a.elems() {
                        for y in b.elems() {
                            block.insert(s3.mul(s3.mul(x, t), y));
                        }
                    }
                    for z in &block {
                        count[z] += 1;
                    }
                }
                assert!(count.iter().all(|&c| c == 1));
            }
        }
    }

    #[test]
    fn quotients() {
        let q8 = Group::quaternion(8).unwrap();
        let (v, pi) = q8.quotient(&q8.center()).unwrap();
        assert_eq!((v.order(), v.exponent()), (4, 2));
        assert!(pi.is_hom(&q8, &v));
        let (same, pi) = q8.quotient(&q8.trivial_subgroup()).unwrap();
        assert_eq!(same.order(), 8);
        assert!(pi.is_bijective(8));
        assert_eq!(q8.quotient(&q8.whole()).unwrap().0.order(), 1);
        let s3 = Group::symmetric(3).unwrap();
        let c2 = s3.subgroups().into_iter().find(|s| s.order() == 2).unwrap();
        assert!(matches!(s3.quotient(&c2), Err(Error::NotNormal)));
        for n in s3.normal_subgroups() {
            assert_eq!(s3.quotient(&n).unwrap().0.order() * n.order(), 6);
        }
    }

    #[test]
    fn subgroup_validation() {
        let c4 = Group::cyclic(4).unwrap();
        assert!(c4.subgroup_from_elems(&[0, 2]).is_ok());
        assert!(matches!(c4.subgroup_from_elems(&[0, 1]), Err(Error::NotSubgroup)));
    }
}
