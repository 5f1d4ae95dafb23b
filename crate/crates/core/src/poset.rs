//! Finite posets with Möbius functions, the orthogonal idempotents obtained
//! from a join-multiplicative family by Möbius inversion, and the poset of
//! commuting normal pairs `(K, P)` of a group.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::bitset::ElemSet;
use crate::error::{Error, Result};
use crate::gamma::{e_section, identity, GammaElement};
use crate::group::Group;
use crate::subgroup::Subgroup;

/// A finite partial order on `0..len`.
#[derive(Clone, Debug)]
pub struct FinitePoset {
    leq: Vec<Vec<bool>>,
    /// A linear extension: `x <= y` implies `x` comes no later than `y`.
    linear: Vec<usize>,
    mobius: OnceLock<MobiusTable>,
}

impl FinitePoset {
    /// Validates reflexivity, antisymmetry and transitivity.
    pub fn new(len: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let table: Vec<Vec<bool>> = (0..len).map(|x| (0..len).map(|y| leq(x, y)).collect()).collect();
        for x in 0..len {
            if !table[x][x] {
                return Err(Error::Invalid(format!("relation not reflexive at {x}")));
            }
            for y in 0..len {
                if x != y && table[x][y] && table[y][x] {
                    return Err(Error::Invalid(format!("relation not antisymmetric at {x}, {y}")));
                }
                if table[x][y] && (0..len).any(|z| table[y][z] && !table[x][z]) {
                    return Err(Error::Invalid(format!("relation not transitive at {x}, {y}")));
                }
            }
        }
        let mut linear: Vec<usize> = (0..len).collect();
        linear.sort_by_key(|&y| ((0..len).filter(|&x| table[x][y]).count(), y));
        Ok(FinitePoset { leq: table, linear, mobius: OnceLock::new() })
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn upper_set(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&y| self.leq[x][y])
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&x| (0..self.len()).all(|y| self.leq[x][y]))
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&x| (0..self.len()).all(|y| self.leq[y][x]))
    }

    /// Least upper bound, if one exists.
    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        let ub: Vec<usize> = (0..self.len()).filter(|&z| self.leq[x][z] && self.leq[y][z]).collect();
        ub.iter().copied().find(|&z| ub.iter().all(|&w| self.leq[z][w]))
    }

    /// `μ(x, y)` on comparable pairs, from `μ(x, x) = 1` and
    /// `Σ_{x <= z <= y} μ(x, z) = 0` for `x < y`.
    pub fn mobius(&self) -> &MobiusTable {
        self.mobius.get_or_init(|| {
            let n = self.len();
            let mut values = vec![0i64; n * n];
            for x in 0..n {
                for &y in &self.linear {
                    if !self.leq[x][y] {
                        continue;
                    }
                    values[x * n + y] = if x == y {
                        1
                    } else {
                        -(0..n).filter(|&z| z != y && self.leq[x][z] && self.leq[z][y]).map(|z| values[x * n + z]).sum::<i64>()
                    };
                }
            }
            MobiusTable { n, values }
        })
    }
}

/// Möbius values; zero on incomparable pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusTable {
    n: usize,
    values: Vec<i64>,
}

impl MobiusTable {
    pub fn get(&self, x: usize, y: usize) -> i64 {
        self.values[x * self.n + y]
    }

    /// Nonzero entries `(x, y, μ(x, y))`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        let n = self.n;
        self.values.iter().enumerate().filter(|(_, &v)| v != 0).map(move |(i, &v)| (i / n, i % n, v))
    }
}

/// The operations the idempotent calculus needs from an algebra.
pub trait Algebra {
    type Elem: Clone + PartialEq;
    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn scale(&self, a: &Self::Elem, c: i64) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
}

/// `f_x = Σ_{x <= y} μ(x, y) e_y`.
pub fn f_family<A: Algebra>(alg: &A, poset: &FinitePoset, e: &[A::Elem]) -> Result<Vec<A::Elem>> {
    let mu = poset.mobius();
    (0..poset.len())
        .map(|x| {
            poset.upper_set(x).try_fold(alg.zero(), |acc, y| alg.add(&acc, &alg.scale(&e[y], mu.get(x, y))))
        })
        .collect()
}

/// Checks `e_x e_y = e_{x ∨ y}`, or `0` when there is no join.
pub fn check_join_products<A: Algebra>(alg: &A, poset: &FinitePoset, e: &[A::Elem]) -> Result<()> {
    for x in 0..poset.len() {
        for y in 0..poset.len() {
            let expect = poset.join(x, y).map_or_else(|| alg.zero(), |z| e[z].clone());
            if alg.mul(&e[x], &e[y])? != expect {
                return Err(Error::AxiomFailed(format!("e_{x} e_{y} is not the join idempotent")));
            }
        }
    }
    Ok(())
}

/// Checks `e_x f_y = f_y e_x = [x <= y] f_y` and `f_x f_y = [x = y] f_x`.
pub fn check_orthogonality<A: Algebra>(alg: &A, poset: &FinitePoset, e: &[A::Elem], f: &[A::Elem]) -> Result<()> {
    let zero = alg.zero();
    for x in 0..poset.len() {
        for y in 0..poset.len() {
            let expect = if poset.leq(x, y) { &f[y] } else { &zero };
            if alg.mul(&e[x], &f[y])? != *expect || alg.mul(&f[y], &e[x])? != *expect {
                return Err(Error::AxiomFailed(format!("e_{x} does not act on f_{y} as expected")));
            }
            let expect = if x == y { &f[x] } else { &zero };
            if alg.mul(&f[x], &f[y])? != *expect {
                return Err(Error::AxiomFailed(format!("f_{x} f_{y} is not orthogonal")));
            }
        }
    }
    Ok(())
}

/// Composition in `kΓ(G, G)`.
pub struct GammaAlgebra {
    pub zero: GammaElement,
}

impl Algebra for GammaAlgebra {
    type Elem = GammaElement;

    fn zero(&self) -> GammaElement {
        self.zero.clone()
    }

    fn add(&self, a: &GammaElement, b: &GammaElement) -> Result<GammaElement> {
        a.add(b)
    }

    fn scale(&self, a: &GammaElement, c: i64) -> GammaElement {
        a.scale(&BigRational::from_integer(BigInt::from(c)))
    }

    fn mul(&self, a: &GammaElement, b: &GammaElement) -> Result<GammaElement> {
        a.compose(b)
    }
}

/// A pair `(K, P)` of normal subgroups with `[K, P] = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairKP {
    pub k: Subgroup,
    pub p: Subgroup,
}

/// All pairs `(K, P)` of `G`, ordered by `(K, P) <= (L, Q)` iff `K <= L` and
/// `P >= Q`. Index 0 is the minimum `(1, G)`.
pub struct PosetG {
    group: Arc<Group>,
    pairs: Vec<PairKP>,
    poset: FinitePoset,
    index: HashMap<(ElemSet, ElemSet), usize>,
    join: Vec<usize>,
}

impl std::fmt::Debug for PosetG {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PosetG({}; {} pairs)", self.group.name(), self.pairs.len())
    }
}

#[derive(Serialize)]
struct PosetJson {
    group: String,
    pairs: Vec<(Vec<usize>, Vec<usize>)>,
    covers: Vec<(usize, usize)>,
    mobius: Vec<(usize, usize, i64)>,
}

impl PosetG {
    /// Memoized per group.
    pub fn build(g: &Arc<Group>) -> Arc<PosetG> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<PosetG>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(p) = cache.lock().expect("poset cache").get(&g.fingerprint()) {
            return p.clone();
        }
        let built = Arc::new(Self::build_uncached(g));
        cache.lock().expect("poset cache").entry(g.fingerprint()).or_insert(built).clone()
    }

    fn build_uncached(g: &Arc<Group>) -> PosetG {
        let normals = g.normal_subgroups();
        let mut pairs = Vec::new();
        for k in &normals {
            for p in &normals {
                if g.commutator_sets(k.elems(), p.elems()).len() == 1 {
                    pairs.push(PairKP { k: k.clone(), p: p.clone() });
                }
            }
        }
        pairs.sort_by_key(|x| (x.k.order(), x.k.elems().clone(), Reverse(x.p.order()), x.p.elems().clone()));
        let index: HashMap<(ElemSet, ElemSet), usize> =
            pairs.iter().enumerate().map(|(i, x)| ((x.k.elems().clone(), x.p.elems().clone()), i)).collect();
        let leq = |a: &PairKP, b: &PairKP| a.k.elems().is_subset(b.k.elems()) && b.p.elems().is_subset(a.p.elems());
        let poset = FinitePoset::new(pairs.len(), |x, y| leq(&pairs[x], &pairs[y])).expect("inclusion order");
        let n = pairs.len();
        let mut join = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                let kl = g.product_set(pairs[x].k.elems(), pairs[y].k.elems());
                let pq = pairs[x].p.elems().intersection(pairs[y].p.elems());
                join[x * n + y] = index[&(kl, pq)];
            }
        }
        PosetG { group: g.clone(), pairs, poset, index, join }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[PairKP] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> &PairKP {
        &self.pairs[i]
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.poset.leq(x, y)
    }

    /// `(K, P) ∨ (L, Q) = (KL, P ∩ Q)`.
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.len() + y]
    }

    pub fn mobius(&self) -> &MobiusTable {
        self.poset.mobius()
    }

    pub fn index_of(&self, k: &ElemSet, p: &ElemSet) -> Option<usize> {
        self.index.get(&(k.clone(), p.clone())).copied()
    }

    pub fn index_of_pair(&self, k: &Subgroup, p: &Subgroup) -> Result<usize> {
        self.group.check_parent(k)?;
        self.group.check_parent(p)?;
        self.index_of(k.elems(), p.elems()).ok_or(Error::NotInPoset)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.len();
        let covers = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| {
                x != y && self.leq(x, y) && !(0..n).any(|z| z != x && z != y && self.leq(x, z) && self.leq(z, y))
            })
            .collect();
        serde_json::to_value(PosetJson {
            group: self.group.name().to_string(),
            pairs: self.pairs.iter().map(|x| (x.k.to_vec(), x.p.to_vec())).collect(),
            covers,
            mobius: self.mobius().entries().collect(),
        })
        .expect("serializable")
    }

    /// `e_(K,P)` for every pair, in poset order.
    pub fn e_idempotents(&self) -> Result<Vec<GammaElement>> {
        self.pairs.iter().map(|x| Ok(e_section(&self.group, &x.k, &x.p)?.1)).collect()
    }

    /// `f_(K,P)` for every pair, in poset order.
    pub fn f_idempotents(&self) -> Result<Vec<GammaElement>> {
        let alg = GammaAlgebra { zero: GammaElement::zero(identity(&self.group)?.space()) };
        f_family(&alg, &self.poset, &self.e_idempotents()?)
    }
}

/// `f_(K,P) = Σ_{(K,P) <= (L,Q)} μ e_(L,Q)`.
pub fn f_idempotent(g: &Arc<Group>, k: &Subgroup, p: &Subgroup) -> Result<GammaElement> {
    let poset = PosetG::build(g);
    let x = poset.index_of_pair(k, p)?;
    let mu = poset.mobius();
    let mut out = GammaElement::zero(identity(g)?.space());
    for y in poset.poset().upper_set(x) {
        let pair = poset.pair(y);
        let e = e_section(g, &pair.k, &pair.p)?.1;
        out = out.add(&e.scale(&BigRational::from_integer(BigInt::from(mu.get(x, y)))))?;
    }
    Ok(out)
}

/// Class sums `(e_C, f_C)` for a partition of the poset indices.
pub fn class_idempotents(poset: &PosetG, partition: &[Vec<usize>]) -> Result<Vec<(GammaElement, GammaElement)>> {
    let mut seen = vec![false; poset.len()];
    for &x in partition.iter().flatten() {
        if x >= poset.len() || std::mem::replace(&mut seen[x], true) {
            return Err(Error::PartitionMismatch);
        }
    }
    if seen.iter().any(|&s| !s) || partition.iter().any(|c| c.is_empty()) {
        return Err(Error::PartitionMismatch);
    }
    let es = poset.e_idempotents()?;
    let fs = poset.f_idempotents()?;
    let zero = GammaElement::zero(es[0].space());
    partition
        .iter()
        .map(|class| {
            let e = class.iter().try_fold(zero.clone(), |acc, &x| acc.add(&es[x]))?;
            let f = class.iter().try_fold(zero.clone(), |acc, &x| acc.add(&fs[x]))?;
            Ok((e, f))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    fn arc(g: Group) -> Arc<Group> {
        Arc::new(g)
    }

    /// Span of the poset elements with `x · y = x ∨ y`, or `0` without a join.
    struct JoinAlgebra<'a> {
        poset: &'a FinitePoset,
    }

    impl Algebra for JoinAlgebra<'_> {
        type Elem = Vec<i64>;

        fn zero(&self) -> Vec<i64> {
            vec![0; self.poset.len()]
        }

        fn add(&self, a: &Vec<i64>, b: &Vec<i64>) -> Result<Vec<i64>> {
            Ok(a.iter().zip(b).map(|(x, y)| x + y).collect())
        }

        fn scale(&self, a: &Vec<i64>, c: i64) -> Vec<i64> {
            a.iter().map(|x| x * c).collect()
        }

        fn mul(&self, a: &Vec<i64>, b: &Vec<i64>) -> Result<Vec<i64>> {
            let mut out = self.zero();
            for (x, &ax) in a.iter().enumerate() {
                for (y, &by) in b.iter().enumerate() {
                    if let Some(z) = self.poset.join(x, y) {
                        out[z] += ax * by;
                    }
                }
            }
            Ok(out)
        }
    }

    fn unit(n: usize, i: usize) -> Vec<i64> {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    }

    #[test]
    fn mobius_of_chains_and_grids() {
        let chain = FinitePoset::new(2, |x, y| x <= y).unwrap();
        assert_eq!(chain.mobius().get(0, 1), -1);
        // 2 x 2 grid: (a, b) <= (c, d) componentwise
        let grid = FinitePoset::new(4, |x, y| x & !y == 0).unwrap();
        assert_eq!(grid.mobius().get(0, 3), 1);
        assert_eq!(grid.mobius().get(0, 1), -1);
        assert_eq!(grid.mobius().get(1, 2), 0);
        assert!(FinitePoset::new(2, |_, _| true).is_err());
    }

    #[test]
    fn idempotents_without_joins() {
        // 0 below 1 and 2, which have no common upper bound
        let poset = FinitePoset::new(3, |x, y| x == y || x == 0).unwrap();
        assert_eq!(poset.join(1, 2), None);
        let alg = JoinAlgebra { poset: &poset };
        let e: Vec<Vec<i64>> = (0..3).map(|i| unit(3, i)).collect();
        check_join_products(&alg, &poset, &e).unwrap();
        let f = f_family(&alg, &poset, &e).unwrap();
        assert_eq!(f[0], vec![1, -1, -1]);
        check_orthogonality(&alg, &poset, &e, &f).unwrap();
        let total = f.iter().fold(alg.zero(), |acc, x| alg.add(&acc, x).unwrap());
        assert_eq!(total, e[0]);
    }

    #[test]
    fn poset_sizes() {
        let c1 = arc(Group::cyclic(1).unwrap());
        assert_eq!(PosetG::build(&c1).len(), 1);
        let s3 = arc(Group::symmetric(3).unwrap());
        let ps = PosetG::build(&s3);
        assert_eq!(ps.len(), 6);
        let shapes: Vec<(usize, usize)> = ps.pairs().iter().map(|x| (x.k.order(), x.p.order())).collect();
        assert_eq!(shapes, vec![(1, 6), (1, 3), (1, 1), (3, 3), (3, 1), (6, 1)]);
        let c4 = arc(Group::cyclic(4).unwrap());
        assert_eq!(PosetG::build(&c4).len(), 9);
        let q8 = arc(Group::quaternion(8).unwrap());
        let pq = PosetG::build(&q8);
        assert_eq!(pq.poset().minimum(), Some(0));
        assert_eq!(pq.pair(0).p.order(), 8);
        let top = pq.poset().maximum().unwrap();
        assert_eq!((pq.pair(top).k.order(), pq.pair(top).p.order()), (8, 1));
    }

    /// Brute-force centralizer test for `[K, P] = 1`.
    #[test]
    fn poset_matches_centralizer_test() {
        for g in [Group::symmetric(3).unwrap(), Group::dihedral(8).unwrap(), Group::quaternion(8).unwrap()] {
            let g = arc(g);
            let ps = PosetG::build(&g);
            let normals = g.normal_subgroups();
            let mut count = 0;
            for k in &normals {
                let c = g.centralizer(k).unwrap();
                for p in &normals {
                    if p.is_subgroup_of(&c) {
                        count += 1;
                        assert!(ps.index_of(k.elems(), p.elems()).is_some());
                    }
                }
            }
            assert_eq!(count, ps.len());
        }
    }

    #[test]
    fn joins_match_least_upper_bounds() {
        let q8 = arc(Group::quaternion(8).unwrap());
        let ps = PosetG::build(&q8);
        for x in 0..ps.len() {
            for y in 0..ps.len() {
                assert_eq!(ps.poset().join(x, y), Some(ps.join(x, y)));
            }
        }
    }

    #[test]
    fn mobius_recursion_exhaustive() {
        let q8 = arc(Group::quaternion(8).unwrap());
        let ps = PosetG::build(&q8);
        let mu = ps.mobius();
        for x in 0..ps.len() {
            assert_eq!(mu.get(x, x), 1);
            for y in 0..ps.len() {
                if x != y && ps.leq(x, y) {
                    let s: i64 = (0..ps.len()).filter(|&z| ps.leq(x, z) && ps.leq(z, y)).map(|z| mu.get(x, z)).sum();
                    assert_eq!(s, 0);
                }
            }
        }
    }

    #[test]
    fn f_idempotents_of_cyclic_two() {
        let c2 = arc(Group::cyclic(2).unwrap());
        let ps = PosetG::build(&c2);
        let (one, whole) = (c2.trivial_subgroup(), c2.whole());
        let e = |k: &Subgroup, p: &Subgroup| e_section(&c2, k, p).unwrap().1;
        let f = f_idempotent(&c2, &one, &whole).unwrap();
        let expect = e(&one, &whole).sub(&e(&whole, &whole)).unwrap().sub(&e(&one, &one)).unwrap().add(&e(&whole, &one)).unwrap();
        assert_eq!(f, expect);
        assert_eq!(f_idempotent(&c2, &whole, &one).unwrap(), e(&whole, &one));
        assert_eq!(ps.len(), 4);
    }

    #[test]
    fn f_sum_is_identity_on_cyclic_four() {
        let c4 = arc(Group::cyclic(4).unwrap());
        let ps = PosetG::build(&c4);
        let fs = ps.f_idempotents().unwrap();
        let total = fs.iter().skip(1).fold(fs[0].clone(), |acc, x| acc.add(x).unwrap());
        assert_eq!(total, identity(&c4).unwrap());
        let alg = GammaAlgebra { zero: GammaElement::zero(total.space()) };
        let es = ps.e_idempotents().unwrap();
        check_join_products(&alg, ps.poset(), &es).unwrap();
        check_orthogonality(&alg, ps.poset(), &es, &fs).unwrap();
    }

    #[test]
    fn class_sums() {
        let c2 = arc(Group::cyclic(2).unwrap());
        let ps = PosetG::build(&c2);
        let singles: Vec<Vec<usize>> = (0..ps.len()).map(|i| vec![i]).collect();
        let sums = class_idempotents(&ps, &singles).unwrap();
        let es = ps.e_idempotents().unwrap();
        for (i, (e, _)) in sums.iter().enumerate() {
            assert_eq!(*e, es[i]);
        }
        assert!(matches!(class_idempotents(&ps, &[vec![0, 1]]), Err(Error::PartitionMismatch)));
        assert!(matches!(class_idempotents(&ps, &[vec![0, 0, 1, 2, 3]]), Err(Error::PartitionMismatch)));
        let f_total = sums.iter().fold(GammaElement::zero(es[0].space()), |acc, (_, f)| acc.add(f).unwrap());
        assert_eq!(f_total, identity(&c2).unwrap());
    }
}
