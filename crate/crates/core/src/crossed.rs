//! Crossed modules `(A, B, ∂)` with `B` acting on `A`, their morphisms, and
//! the crossed modules `(P, G/K, i_P)` attached to commuting normal pairs.

use std::collections::HashMap;
use std::sync::Arc;

use crate::bitset::ElemSet;
use crate::error::{Error, Result};
use crate::group::{Group, Hom};
use crate::iso::isomorphisms;
use crate::sections::{canonical_key, product, Section, SectionClass};
use crate::subgroup::{Subgroup, Subquotient};

#[derive(Clone, Debug)]
pub struct CrossedModule {
    a: Arc<Group>,
    b: Arc<Group>,
    boundary: Hom,
    /// `action[g][x]` is `g` acting on `x`.
    action: Vec<Vec<usize>>,
}

impl CrossedModule {
    /// Validates the homomorphism, action and both crossed module axioms.
    pub fn new(a: Arc<Group>, b: Arc<Group>, boundary: Vec<usize>, action: Vec<Vec<usize>>) -> Result<Self> {
        let boundary = Hom::new(&a, &b, boundary).map_err(|e| Error::AxiomFailed(format!("boundary: {e}")))?;
        if action.len() != b.order() || action.iter().any(|r| r.len() != a.order() || r.iter().any(|&x| x >= a.order())) {
            return Err(Error::AxiomFailed("action table has wrong shape".into()));
        }
        let cm = CrossedModule { a, b, boundary, action };
        cm.validate()?;
        Ok(cm)
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = (&*self.a, &*self.b);
        for g in 0..b.order() {
            let f = Hom::trusted(self.action[g].clone());
            if !f.is_bijective(a.order()) || !f.is_hom(a, a) {
                return Err(Error::AxiomFailed(format!("element {g} does not act by automorphisms")));
            }
        }
        for g in 0..b.order() {
            for h in 0..b.order() {
                let gh = b.mul(g, h);
                if (0..a.order()).any(|x| self.action[gh][x] != self.action[g][self.action[h][x]]) {
                    return Err(Error::AxiomFailed("action is not a homomorphism".into()));
                }
            }
        }
        for g in 0..b.order() {
            for x in 0..a.order() {
                if self.boundary.apply(self.action[g][x]) != b.conjugate(g, self.boundary.apply(x)) {
                    return Err(Error::AxiomFailed("boundary is not equivariant".into()));
                }
            }
        }
        for y in 0..a.order() {
            let dy = self.boundary.apply(y);
            for x in 0..a.order() {
                if self.action[dy][x] != a.conjugate(y, x) {
                    return Err(Error::AxiomFailed("Peiffer identity fails".into()));
                }
            }
        }
        Ok(())
    }

    /// `(P2/K2, P1/K1, ∂)` with `∂(xK2) = xK1` and conjugation action, for
    /// subquotients of a common group `g`. Fails if the maps are not well defined.
    pub(crate) fn from_subquotients(g: &Group, outer: &Subquotient, inner: &Subquotient) -> Result<Self> {
        let (na, nb) = (inner.group.order(), outer.group.order());
        let mut boundary = vec![usize::MAX; na];
        let mut action = vec![vec![usize::MAX; na]; nb];
        for x in 0..g.order() {
            let Some(ax) = inner.project(x) else { continue };
            let bx = outer
                .project(x)
                .ok_or_else(|| Error::AxiomFailed("inner group not inside outer group".into()))?;
            match boundary[ax] {
                usize::MAX => boundary[ax] = bx,
                prev if prev != bx => return Err(Error::AxiomFailed("boundary not well defined".into())),
                _ => {}
            }
            for y in 0..g.order() {
                let Some(by) = outer.project(y) else { continue };
                let img = inner
                    .project(g.conjugate(y, x))
                    .ok_or_else(|| Error::AxiomFailed("inner group not normal in outer group".into()))?;
                match action[by][ax] {
                    usize::MAX => action[by][ax] = img,
                    prev if prev != img => return Err(Error::AxiomFailed("action not well defined".into())),
                    _ => {}
                }
            }
        }
        Self::new(inner.group.clone(), outer.group.clone(), boundary, action)
    }

    /// `(P, G/K, i_P)` for a pair of normal subgroups with `[K, P] = 1`.
    pub fn from_pair(g: &Group, k: &Subgroup, p: &Subgroup) -> Result<Self> {
        if !is_commuting_normal_pair(g, k, p)? {
            return Err(Error::NotInPoset);
        }
        let outer = g.subquotient_trusted(&ElemSet::full(g.order()), k.elems());
        let inner = g.subquotient_trusted(p.elems(), &ElemSet::from_iter_with(g.order(), [0]));
        Self::from_subquotients(g, &outer, &inner)
    }

    pub fn a(&self) -> &Arc<Group> {
        &self.a
    }

    pub fn b(&self) -> &Arc<Group> {
        &self.b
    }

    pub fn boundary(&self) -> &Hom {
        &self.boundary
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g][x]
    }

    /// Isomorphism invariants used to skip hopeless searches.
    pub fn fingerprint(&self) -> CmFingerprint {
        let census = |g: &Group| {
            let mut v = g.elem_orders().to_vec();
            v.sort_unstable();
            v
        };
        let image = self.boundary.image_set(&self.b).len();
        let mut orbits = Vec::new();
        let mut seen = vec![false; self.a.order()];
        for x in 0..self.a.order() {
            if seen[x] {
                continue;
            }
            let mut size = 0;
            let mut stack = vec![x];
            seen[x] = true;
            while let Some(y) = stack.pop() {
                size += 1;
                for g in self.b.generators() {
                    let z = self.action[*g][y];
                    if !std::mem::replace(&mut seen[z], true) {
                        stack.push(z);
                    }
                }
            }
            orbits.push((self.a.elem_order(x), size));
        }
        orbits.sort_unstable();
        CmFingerprint { a: census(&self.a), b: census(&self.b), image, orbits }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CmFingerprint {
    a: Vec<usize>,
    b: Vec<usize>,
    image: usize,
    orbits: Vec<(usize, usize)>,
}

pub(crate) fn is_commuting_normal_pair(g: &Group, k: &Subgroup, p: &Subgroup) -> Result<bool> {
    g.check_parent(k)?;
    g.check_parent(p)?;
    Ok(k.is_normal_in_parent()
        && p.is_normal_in_parent()
        && k.elems().iter().all(|x| p.elems().iter().all(|y| g.mul(x, y) == g.mul(y, x))))
}

/// A morphism `(α, β): (A, B, ∂) -> (A', B', ∂')`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CMorphism {
    pub alpha: Hom,
    pub beta: Hom,
}

impl CMorphism {
    pub fn new(x: &CrossedModule, y: &CrossedModule, alpha: Hom, beta: Hom) -> Result<Self> {
        if Self::is_morphism(x, y, &alpha, &beta) {
            Ok(CMorphism { alpha, beta })
        } else {
            Err(Error::AxiomFailed("not a morphism of crossed modules".into()))
        }
    }

    /// Both maps are homomorphisms, `∂'α = β∂`, and `α(g·a) = β(g)·α(a)`.
    pub fn is_morphism(x: &CrossedModule, y: &CrossedModule, alpha: &Hom, beta: &Hom) -> bool {
        alpha.images().len() == x.a.order()
            && beta.images().len() == x.b.order()
            && alpha.images().iter().all(|&v| v < y.a.order())
            && beta.images().iter().all(|&v| v < y.b.order())
            && alpha.is_hom(&x.a, &y.a)
            && beta.is_hom(&x.b, &y.b)
            && Self::square_and_equivariance(x, y, alpha, beta)
    }

    fn square_and_equivariance(x: &CrossedModule, y: &CrossedModule, alpha: &Hom, beta: &Hom) -> bool {
        (0..x.a.order()).all(|a| y.boundary.apply(alpha.apply(a)) == beta.apply(x.boundary.apply(a)))
            && (0..x.b.order())
                .all(|g| (0..x.a.order()).all(|a| alpha.apply(x.action[g][a]) == y.action[beta.apply(g)][alpha.apply(a)]))
    }

    pub fn identity(x: &CrossedModule) -> Self {
        CMorphism { alpha: Hom::identity(&x.a), beta: Hom::identity(&x.b) }
    }

    /// `self ∘ other`
    pub fn after(&self, other: &CMorphism) -> CMorphism {
        CMorphism { alpha: self.alpha.after(&other.alpha), beta: self.beta.after(&other.beta) }
    }

    pub fn inverse(&self) -> CMorphism {
        CMorphism { alpha: self.alpha.inverse(), beta: self.beta.inverse() }
    }
}

/// All crossed module isomorphisms `X -> Y`, sorted by `(α, β)` image arrays.
pub fn all_isos(x: &CrossedModule, y: &CrossedModule, limit: Option<usize>) -> Vec<CMorphism> {
    let mut out = Vec::new();
    if x.fingerprint() != y.fingerprint() {
        return out;
    }
    let mut alphas = isomorphisms(&x.a, &y.a, None);
    alphas.sort();
    if alphas.is_empty() {
        return out;
    }
    let mut betas = isomorphisms(&x.b, &y.b, None);
    betas.sort();
    let a_gens = x.a.generators();
    let b_gens = x.b.generators();
    let limit = limit.unwrap_or(usize::MAX);
    for alpha in &alphas {
        for beta in &betas {
            // Cheap generator-level filter before the full check.
            let square = a_gens.iter().all(|&a| y.boundary.apply(alpha.apply(a)) == beta.apply(x.boundary.apply(a)));
            let equi = b_gens
                .iter()
                .all(|&g| a_gens.iter().all(|&a| alpha.apply(x.action[g][a]) == y.action[beta.apply(g)][alpha.apply(a)]));
            if square && equi && CMorphism::square_and_equivariance(x, y, alpha, beta) {
                out.push(CMorphism { alpha: alpha.clone(), beta: beta.clone() });
                if out.len() >= limit {
                    return out;
                }
            }
        }
    }
    out
}

/// The first isomorphism `X -> Y` in deterministic order, if any.
pub fn iso_search(x: &CrossedModule, y: &CrossedModule) -> Option<CMorphism> {
    all_isos(x, y, Some(1)).pop()
}

/// `Aut(X)` with `Inn(X)` and `Out(X) = Aut(X)/Inn(X)`.
#[derive(Debug)]
pub struct OutData {
    /// Element `i` is `auts[i]`; product is composition.
    pub aut: Group,
    pub auts: Vec<CMorphism>,
    pub inn: Subgroup,
    pub out: Arc<Group>,
    /// Least automorphism in each coset of `Inn`, in `out` element order.
    pub out_reps: Vec<usize>,
    /// Coset of each automorphism.
    pub out_of_aut: Vec<usize>,
}

pub fn aut_out(x: &CrossedModule) -> Result<OutData> {
    let auts = all_isos(x, x, None);
    let index: HashMap<&CMorphism, usize> = auts.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut table = Vec::with_capacity(auts.len());
    for m in &auts {
        table.push(
            auts.iter()
                .map(|n| index.get(&m.after(n)).copied().ok_or_else(|| Error::NotClosed("automorphisms".into())))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let aut = Group::from_table("Aut", table)?;
    let mut inn_set = ElemSet::empty(auts.len());
    for g in 0..x.b.order() {
        let m = CMorphism {
            alpha: Hom::trusted(x.action[g].clone()),
            beta: Hom::trusted((0..x.b.order()).map(|h| x.b.conjugate(g, h)).collect()),
        };
        inn_set.insert(index[&m]);
    }
    let inn = aut.subgroup_trusted(inn_set);
    if !inn.is_normal_in_parent() {
        return Err(Error::AxiomFailed("inner automorphisms are not normal".into()));
    }
    let q = aut.subquotient_trusted(&ElemSet::full(auts.len()), inn.elems());
    let out_of_aut = (0..auts.len()).map(|i| q.project(i).expect("full")).collect();
    Ok(OutData { out: q.group.clone(), out_reps: q.reps().to_vec(), out_of_aut, aut, auts, inn })
}

/// Section of `G x G` attached to an automorphism `(α, β)` of `(P, G/K, i_P)`:
/// `T = {(x, y) | xK = β(yK)}`, `S = {(α(p), p) | p ∈ P}`.
pub fn theta(g: &Arc<Group>, k: &Subgroup, p: &Subgroup, m: &CMorphism) -> Result<Section> {
    let x = CrossedModule::from_pair(g, k, p)?;
    if !CMorphism::is_morphism(&x, &x, &m.alpha, &m.beta)
        || !m.alpha.is_bijective(x.a.order())
        || !m.beta.is_bijective(x.b.order())
    {
        return Err(Error::NotAutomorphism);
    }
    let gg = product(g, g)?;
    Ok(Section::from_key(gg, &graph_section(g, k, p, g, k, p, m)))
}

/// `V = {(g, h) | gK = β(hL)}`, `U = {(α(q), q)}` in `G x H` for
/// `(α, β): (Q, H/L) -> (P, G/K)`.
fn graph_section(
    g: &Group,
    k: &Subgroup,
    p: &Subgroup,
    h: &Group,
    l: &Subgroup,
    q: &Subgroup,
    m: &CMorphism,
) -> crate::sections::SectionKey {
    let (ng, nh) = (g.order(), h.order());
    let gk = g.subquotient_trusted(&ElemSet::full(ng), k.elems());
    let hl = h.subquotient_trusted(&ElemSet::full(nh), l.elems());
    let mut t = ElemSet::empty(ng * nh);
    for a in 0..ng {
        let ca = gk.project(a).expect("full");
        for b in 0..nh {
            if m.beta.apply(hl.project(b).expect("full")) == ca {
                t.insert(a * nh + b);
            }
        }
    }
    let pv = p.to_vec();
    let s = ElemSet::from_iter_with(ng * nh, q.to_vec().into_iter().enumerate().map(|(i, y)| pv[m.alpha.apply(i)] * nh + y));
    crate::sections::SectionKey { t, s }
}

/// Result of a successful linkage test.
#[derive(Clone, Debug)]
pub struct Linkage {
    /// Isomorphism `(Q, H/L, i_Q) -> (P, G/K, i_P)`.
    pub morphism: CMorphism,
    /// Canonical section of `G x H` with left invariants `(G, K, P, 1)` and
    /// right invariants `(H, L, Q, 1)`.
    pub witness: SectionClass,
}

/// Tests whether `(G, K, P)` and `(H, L, Q)` have isomorphic crossed modules;
/// on success also builds the witness section.
pub fn linked(
    g: &Arc<Group>,
    k: &Subgroup,
    p: &Subgroup,
    h: &Arc<Group>,
    l: &Subgroup,
    q: &Subgroup,
) -> Result<Option<Linkage>> {
    let x = CrossedModule::from_pair(g, k, p)?;
    let y = CrossedModule::from_pair(h, l, q)?;
    let Some(m) = iso_search(&y, &x) else { return Ok(None) };
    let gh = product(g, h)?;
    let key = graph_section(g, k, p, h, l, q, &m);
    let section = Section::new(gh.clone(), gh.subgroup_trusted(key.t.clone()), gh.subgroup_trusted(key.s.clone()))?;
    let inv = section.invariants()?;
    let expect = |side: &crate::sections::Invariants4, grp: &Group, kk: &Subgroup, pp: &Subgroup| {
        side.p_t.order() == grp.order() && side.k_t == *kk && side.p_s == *pp && side.k_s.is_trivial()
    };
    if !expect(&inv.left, g, k, p) || !expect(&inv.right, h, l, q) {
        return Err(Error::AxiomFailed("linkage witness has wrong invariants".into()));
    }
    let (canon, orbit_size) = canonical_key(&gh, &key);
    Ok(Some(Linkage { morphism: m, witness: SectionClass { section: Section::from_key(gh, &canon), orbit_size } }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(g: Group) -> Arc<Group> {
        Arc::new(g)
    }

    #[test]
    fn pair_crossed_modules() {
        let q8 = arc(Group::quaternion(8).unwrap());
        // x = 1, x^2 = 2
        let k = q8.subgroup_generated(&[2]);
        let p = q8.subgroup_generated(&[1]);
        let cm = CrossedModule::from_pair(&q8, &k, &p).unwrap();
        assert_eq!((cm.a().order(), cm.b().order()), (4, 4));
        assert!(cm.a().elem_orders().contains(&4));
        assert_eq!(cm.b().exponent(), 2);
        assert_eq!(cm.boundary().image_set(cm.b()).len(), 2);

        let s3 = arc(Group::symmetric(3).unwrap());
        let whole = CrossedModule::from_pair(&s3, &s3.trivial_subgroup(), &s3.whole()).unwrap();
        assert!(whole.boundary().is_bijective(6));
        let top = CrossedModule::from_pair(&s3, &s3.whole(), &s3.trivial_subgroup()).unwrap();
        assert_eq!((top.a().order(), top.b().order()), (1, 1));
        assert!(matches!(
            CrossedModule::from_pair(&s3, &s3.whole(), &s3.whole()),
            Err(Error::NotInPoset)
        ));
    }

    #[test]
    fn iso_search_cases() {
        let c2 = arc(Group::cyclic(2).unwrap());
        let id = CrossedModule::new(c2.clone(), c2.clone(), vec![0, 1], vec![vec![0, 1], vec![0, 1]]).unwrap();
        let triv = CrossedModule::new(c2.clone(), c2.clone(), vec![0, 0], vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(iso_search(&id, &id), Some(CMorphism::identity(&id)));
        assert!(iso_search(&id, &triv).is_none());

        let q8 = arc(Group::quaternion(8).unwrap());
        let d8 = arc(Group::dihedral(8).unwrap());
        let x = CrossedModule::from_pair(&q8, &q8.subgroup_generated(&[2]), &q8.subgroup_generated(&[1])).unwrap();
        let y = CrossedModule::from_pair(&d8, &d8.subgroup_generated(&[2]), &d8.subgroup_generated(&[1])).unwrap();
        assert!(iso_search(&x, &y).is_some());
    }

    #[test]
    fn out_orders() {
        let s3 = arc(Group::symmetric(3).unwrap());
        let x = CrossedModule::from_pair(&s3, &s3.trivial_subgroup(), &s3.whole()).unwrap();
        assert_eq!(aut_out(&x).unwrap().out.order(), 1);
        let c3 = arc(Group::cyclic(3).unwrap());
        let x = CrossedModule::from_pair(&c3, &c3.trivial_subgroup(), &c3.whole()).unwrap();
        assert_eq!(aut_out(&x).unwrap().out.order(), 2);
        let c2 = arc(Group::cyclic(2).unwrap());
        let v4 = product(&c2, &c2).unwrap();
        let x = CrossedModule::from_pair(&v4, &v4.trivial_subgroup(), &v4.trivial_subgroup()).unwrap();
        // (1, V4, trivial): Aut is Aut(V4), no inner part.
        let od = aut_out(&x).unwrap();
        assert_eq!((od.aut.order(), od.inn.order(), od.out.order()), (6, 1, 6));
        assert_eq!(od.auts[0], CMorphism::identity(&x));
    }

    #[test]
    fn theta_of_identity_is_e_section() {
        let c4 = arc(Group::cyclic(4).unwrap());
        let k = c4.subgroup_generated(&[2]);
        let p = c4.subgroup_generated(&[2]);
        let x = CrossedModule::from_pair(&c4, &k, &p).unwrap();
        let sec = theta(&c4, &k, &p, &CMorphism::identity(&x)).unwrap();
        assert_eq!(sec.s().elems(), &crate::sections::diagonal_set(4, p.elems()));
        assert_eq!(sec.t().elems(), &crate::sections::diagonal_mod_set(&c4, k.elems()));
        let bogus = CMorphism { alpha: Hom::identity(x.a()), beta: Hom::trusted(vec![0, 0]) };
        assert!(matches!(theta(&c4, &k, &p, &bogus), Err(Error::NotAutomorphism)));
    }

    #[test]
    fn linkage_of_quaternion_and_dihedral_pairs() {
        let q8 = arc(Group::quaternion(8).unwrap());
        let d8 = arc(Group::dihedral(8).unwrap());
        let (k, p) = (q8.subgroup_generated(&[2]), q8.subgroup_generated(&[1]));
        let (l, q) = (d8.subgroup_generated(&[2]), d8.subgroup_generated(&[1]));
        let link = linked(&q8, &k, &p, &d8, &l, &q).unwrap().expect("linked");
        let inv = link.witness.section.invariants().unwrap();
        assert_eq!(inv.l0(), (&k, &p));
        assert_eq!(inv.r0(), (&l, &q));
        assert!(linked(&q8, &k, &p, &q8, &k, &p).unwrap().is_some());
    }
}
