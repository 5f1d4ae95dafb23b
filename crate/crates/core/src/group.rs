//! Finite groups given by multiplication tables.
//!
//! Element 0 is always the identity. Tables are validated on construction;
//! groups built here from already validated groups (products, quotients) skip
//! the cubic associativity scan since it is inherited.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock};

use crate::bitset::ElemSet;
use crate::error::{Error, Result};
use crate::subgroup::SubgroupLattice;

pub const DEFAULT_ORDER_CAP: usize = 512;

static ORDER_CAP: AtomicUsize = AtomicUsize::new(0);

/// Largest group order any constructor will build. Reads `SBW_MAX_ORDER` on
/// first use unless [`set_order_cap`] was called.
pub fn order_cap() -> usize {
    let cap = ORDER_CAP.load(Ordering::Relaxed);
    if cap != 0 {
        return cap;
    }
    let cap = std::env::var("SBW_MAX_ORDER")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_ORDER_CAP);
    ORDER_CAP.store(cap, Ordering::Relaxed);
    cap
}

pub fn set_order_cap(cap: usize) {
    ORDER_CAP.store(cap.max(1), Ordering::Relaxed);
}

fn check_cap(order: usize) -> Result<()> {
    let cap = order_cap();
    if order > cap {
        Err(Error::OrderLimitExceeded { order, cap })
    } else {
        Ok(())
    }
}

pub struct Group {
    name: String,
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    elem_orders: Vec<usize>,
    gens: Vec<usize>,
    /// `conj[j][x] = g_j x g_j^-1` for each generator `g_j`.
    conj: Vec<Vec<usize>>,
    abelian: bool,
    perm_gens: Option<Vec<Vec<usize>>>,
    factors: Option<(Arc<Group>, Arc<Group>)>,
    fingerprint: u64,
    lattice: OnceLock<Arc<SubgroupLattice>>,
}

impl Group {
    /// Validates a multiplication table with the identity at index 0.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Group> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotClosed("empty table".into()));
        }
        check_cap(n)?;
        if let Some(r) = table.iter().position(|row| row.len() != n) {
            return Err(Error::NotClosed(format!("row {r} has wrong length")));
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        if let Some(&bad) = flat.iter().find(|&&x| x >= n) {
            return Err(Error::NotClosed(format!("entry {bad} out of range")));
        }
        for a in 0..n {
            if flat[a] != a || flat[a * n] != a {
                return Err(Error::NoIdentity);
            }
        }
        for a in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for b in 0..n {
                row[flat[a * n + b]] = true;
                col[flat[b * n + a]] = true;
            }
            if row.iter().chain(col.iter()).any(|&seen| !seen) {
                return Err(Error::NoInverse(a));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = flat[a * n + b];
                for c in 0..n {
                    if flat[ab * n + c] != flat[a * n + flat[b * n + c]] {
                        return Err(Error::NonAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(Self::from_flat_trusted(name.into(), n, flat))
    }

    /// Builds a group from a table known to satisfy the axioms.
    pub(crate) fn from_flat_trusted(name: String, n: usize, table: Vec<usize>) -> Group {
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| table[a * n + b] == 0).expect("latin table");
        }
        let mut elem_orders = vec![1; n];
        for (a, ord) in elem_orders.iter_mut().enumerate() {
            let mut x = a;
            while x != 0 {
                x = table[x * n + a];
                *ord += 1;
            }
        }
        let abelian = (0..n).all(|a| (0..a).all(|b| table[a * n + b] == table[b * n + a]));
        let mut h = DefaultHasher::new();
        n.hash(&mut h);
        table.hash(&mut h);
        let fingerprint = h.finish();
        let mut g = Group {
            name,
            order: n,
            table,
            inverse,
            elem_orders,
            gens: Vec::new(),
            conj: Vec::new(),
            abelian,
            perm_gens: None,
            factors: None,
            fingerprint,
            lattice: OnceLock::new(),
        };
        g.gens = g.greedy_generators(&ElemSet::full(n));
        g.conj = g
            .gens
            .iter()
            .map(|&s| (0..n).map(|x| g.conjugate(s, x)).collect())
            .collect();
        g
    }

    /// Closes a set of permutations of `0..degree` under composition.
    ///
    /// Elements are sorted lexicographically by their image lists, which puts
    /// the identity permutation at index 0.
    pub fn from_perm_gens(name: impl Into<String>, gens: &[Vec<usize>]) -> Result<Group> {
        let degree = gens.first().map_or(0, |g| g.len());
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&i| i >= degree || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::NotClosed("generators are not permutations of a common set".into()));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        let cap = order_cap();
        while let Some(p) = queue.pop_front() {
            for g in gens {
                // (p * g)(i) = p(g(i))
                let q: Vec<usize> = g.iter().map(|&i| p[i]).collect();
                if seen.insert(q.clone()) {
                    if seen.len() > cap {
                        return Err(Error::OrderLimitExceeded { order: seen.len(), cap });
                    }
                    queue.push_back(q);
                }
            }
        }
        let elems: Vec<Vec<usize>> = seen.into_iter().collect();
        let n = elems.len();
        let index: std::collections::HashMap<&[usize], usize> =
            elems.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let prod: Vec<usize> = elems[b].iter().map(|&i| elems[a][i]).collect();
                table[a * n + b] = index[prod.as_slice()];
            }
        }
        let mut g = Self::from_flat_trusted(name.into(), n, table);
        g.perm_gens = Some(gens.to_vec());
        Ok(g)
    }

    pub fn cyclic(n: usize) -> Result<Group> {
        if n == 0 {
            return Err(Error::Invalid("cyclic group of order 0".into()));
        }
        check_cap(n)?;
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        Ok(Self::from_flat_trusted(format!("C{n}"), n, table))
    }

    /// Dihedral group of the given order (`2n`): element `r^i s^j` has index `i + n j`.
    pub fn dihedral(order: usize) -> Result<Group> {
        if order < 2 || order % 2 != 0 {
            return Err(Error::Invalid(format!("dihedral group of order {order}")));
        }
        check_cap(order)?;
        let n = order / 2;
        let mut table = vec![0; order * order];
        for a in 0..order {
            let (i, j) = (a % n, a / n);
            for b in 0..order {
                let (k, l) = (b % n, b / n);
                // r^i s^j r^k s^l = r^(i + (-1)^j k) s^(j + l)
                let e = if j == 0 { (i + k) % n } else { (i + n - k) % n };
                table[a * order + b] = e + n * ((j + l) % 2);
            }
        }
        Ok(Self::from_flat_trusted(format!("D{order}"), order, table))
    }

    /// Dicyclic group of order `4m` (`Q8` for order 8): `x^(2m) = 1`,
    /// `y^2 = x^m`, `y x y^-1 = x^-1`; `x^i y^j` has index `i + 2m j`.
    pub fn quaternion(order: usize) -> Result<Group> {
        if order < 8 || order % 4 != 0 {
            return Err(Error::Invalid(format!("quaternion group of order {order}")));
        }
        check_cap(order)?;
        let n = order / 2;
        let m = n / 2;
        let mut table = vec![0; order * order];
        for a in 0..order {
            let (i, j) = (a % n, a / n);
            for b in 0..order {
                let (k, l) = (b % n, b / n);
                let mut e = if j == 0 { (i + k) % n } else { (i + n - k) % n };
                if j + l == 2 {
                    e = (e + m) % n;
                }
                table[a * order + b] = e + n * ((j + l) % 2);
            }
        }
        Ok(Self::from_flat_trusted(format!("Q{order}"), order, table))
    }

    pub fn symmetric(n: usize) -> Result<Group> {
        if n == 0 {
            return Err(Error::Invalid("symmetric group on 0 points".into()));
        }
        if n == 1 {
            let mut g = Self::cyclic(1)?;
            g.name = "S1".into();
            return Ok(g);
        }
        let transposition: Vec<usize> = (0..n).map(|i| match i { 0 => 1, 1 => 0, _ => i }).collect();
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::from_perm_gens(format!("S{n}"), &[transposition, cycle])
    }

    /// `G x H` with `(g, h)` at index `g |H| + h`.
    pub fn direct_product(g: &Arc<Group>, h: &Arc<Group>) -> Result<Group> {
        let (m, n) = (g.order, h.order);
        let order = m * n;
        check_cap(order)?;
        let mut table = vec![0; order * order];
        for a in 0..order {
            let (a1, a2) = (a / n, a % n);
            for b in 0..order {
                let (b1, b2) = (b / n, b % n);
                table[a * order + b] = g.mul(a1, b1) * n + h.mul(a2, b2);
            }
        }
        let mut p = Self::from_flat_trusted(format!("{}x{}", g.name, h.name), order, table);
        p.factors = Some((g.clone(), h.clone()));
        Ok(p)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Group {
        self.name = name.into();
        self
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `g x g^-1`
    #[inline]
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inverse[g])
    }

    /// `a^-1 b^-1 a b`
    pub fn commutator_elem(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inverse[a], self.inverse[b]), self.mul(a, b))
    }

    pub fn elem_order(&self, a: usize) -> usize {
        self.elem_orders[a]
    }

    pub fn elem_orders(&self) -> &[usize] {
        &self.elem_orders
    }

    pub fn exponent(&self) -> usize {
        self.elem_orders.iter().fold(1, |acc, &o| num_integer::lcm(acc, o))
    }

    /// A small generating set, chosen greedily by descending element order.
    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    /// Conjugation permutations of the generators.
    pub fn generator_conjugations(&self) -> &[Vec<usize>] {
        &self.conj
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn perm_gens(&self) -> Option<&[Vec<usize>]> {
        self.perm_gens.as_deref()
    }

    pub fn factors(&self) -> Option<(&Arc<Group>, &Arc<Group>)> {
        self.factors.as_ref().map(|(a, b)| (a, b))
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub(crate) fn lattice_cell(&self) -> &OnceLock<Arc<SubgroupLattice>> {
        &self.lattice
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// Greedy generating set of the subgroup spanned by `set`, preferring
    /// elements of larger order, then smaller index.
    pub fn greedy_generators(&self, set: &ElemSet) -> Vec<usize> {
        let mut cands: Vec<usize> = set.iter().filter(|&x| x != 0).collect();
        cands.sort_by_key(|&x| (std::cmp::Reverse(self.elem_orders[x]), x));
        let mut gens = Vec::new();
        let mut span = ElemSet::from_iter_with(self.order, [0]);
        for x in cands {
            if !span.contains(x) {
                gens.push(x);
                span = self.closure(&gens);
            }
        }
        gens
    }

    /// Conjugacy classes, each sorted, ordered by least element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for x in 0..self.order {
            if seen[x] {
                continue;
            }
            let mut class: Vec<usize> = (0..self.order).map(|g| self.conjugate(g, x)).collect();
            class.sort_unstable();
            class.dedup();
            for &y in &class {
                seen[y] = true;
            }
            out.push(class);
        }
        out
    }

    /// Subgroup generated by a list of elements, as an element set.
    pub fn closure(&self, gens: &[usize]) -> ElemSet {
        let mut set = ElemSet::from_iter_with(self.order, [0]);
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    stack.push(y);
                }
            }
        }
        set
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({}, order {})", self.name, self.order)
    }
}

/// A homomorphism, stored as the image of every source element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hom {
    images: Vec<usize>,
}

impl Hom {
    pub fn new(source: &Group, target: &Group, images: Vec<usize>) -> Result<Hom> {
        if images.len() != source.order() || images.iter().any(|&x| x >= target.order()) {
            return Err(Error::Invalid("image array has wrong shape".into()));
        }
        let hom = Hom { images };
        if !hom.is_hom(source, target) {
            return Err(Error::Invalid("map is not a homomorphism".into()));
        }
        Ok(hom)
    }

    pub(crate) fn trusted(images: Vec<usize>) -> Hom {
        Hom { images }
    }

    pub fn identity(g: &Group) -> Hom {
        Hom { images: (0..g.order()).collect() }
    }

    pub fn is_hom(&self, source: &Group, target: &Group) -> bool {
        self.images.len() == source.order()
            && self.images[0] == 0
            && (0..source.order()).all(|a| {
                (0..source.order())
                    .all(|b| self.images[source.mul(a, b)] == target.mul(self.images[a], self.images[b]))
            })
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.images[a]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_bijective(&self, target_order: usize) -> bool {
        if self.images.len() != target_order {
            return false;
        }
        let mut seen = vec![false; target_order];
        self.images.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    }

    /// `self ∘ other` (apply `other` first).
    pub fn after(&self, other: &Hom) -> Hom {
        Hom { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    /// Inverse of a bijective map.
    pub fn inverse(&self) -> Hom {
        let mut inv = vec![0; self.images.len()];
        for (a, &b) in self.images.iter().enumerate() {
            inv[b] = a;
        }
        Hom { images: inv }
    }

    pub fn kernel(&self, source: &Group) -> ElemSet {
        ElemSet::from_iter_with(source.order(), (0..source.order()).filter(|&a| self.images[a] == 0))
    }

    pub fn image_set(&self, target: &Group) -> ElemSet {
        ElemSet::from_iter_with(target.order(), self.images.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn census(g: &Group, ord: usize) -> usize {
        g.elem_orders().iter().filter(|&&o| o == ord).count()
    }

    #[test]
    fn trivial_group() {
        let g = Group::cyclic(1).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.table_rows(), vec![vec![0]]);
    }

    #[test]
    fn named_constructors_validate() {
        for g in [
            Group::cyclic(6).unwrap(),
            Group::dihedral(8).unwrap(),
            Group::quaternion(8).unwrap(),
            Group::symmetric(3).unwrap(),
            Group::dihedral(2).unwrap(),
        ] {
            Group::from_table("check", g.table_rows()).unwrap();
        }
    }

    #[test]
    fn quaternion_and_dihedral_censuses() {
        let q8 = Group::quaternion(8).unwrap();
        assert_eq!((census(&q8, 2), census(&q8, 4)), (1, 6));
        let d8 = Group::dihedral(8).unwrap();
        assert_eq!(census(&d8, 2), 5);
    }

    #[test]
    fn symmetric_group_has_identity_first() {
        let s3 = Group::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(census(&s3, 2), 3);
        assert_eq!(census(&s3, 3), 2);
        assert!(!s3.is_abelian());
        let s4 = Group::symmetric(4).unwrap();
        assert_eq!(s4.order(), 24);
    }

    #[test]
    fn table_errors() {
        assert!(matches!(Group::from_table("x", vec![vec![0, 1], vec![1, 2]]), Err(Error::NotClosed(_))));
        assert!(matches!(Group::from_table("x", vec![vec![1, 0], vec![0, 1]]), Err(Error::NoIdentity)));
        assert!(matches!(Group::from_table("x", vec![vec![0, 1], vec![1, 1]]), Err(Error::NoInverse(_))));
        // A Latin square with identity that is not associative (order-5 loop).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(Group::from_table("x", loop5), Err(Error::NonAssociative(..))));
    }

    #[test]
    fn order_cap_is_enforced() {
        let err = Group::cyclic(100_000).unwrap_err();
        assert!(matches!(err, Error::OrderLimitExceeded { .. }));
    }

    #[test]
    fn products() {
        let c2 = Arc::new(Group::cyclic(2).unwrap());
        let v4 = Group::direct_product(&c2, &c2).unwrap();
        assert_eq!(v4.order(), 4);
        assert_eq!(v4.exponent(), 2);
        let q8 = Arc::new(Group::quaternion(8).unwrap());
        let d8 = Arc::new(Group::dihedral(8).unwrap());
        assert_eq!(Group::direct_product(&q8, &d8).unwrap().order(), 64);
        let c1 = Arc::new(Group::cyclic(1).unwrap());
        let p = Group::direct_product(&c1, &d8).unwrap();
        assert_eq!(p.table_rows(), d8.table_rows());
    }
}
