//! Sections `S ⊴ T` of a group, with the Goursat description of sections of
//! direct products.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::bitset::ElemSet;
use crate::catalog::{group_ref_json, parse_group_ref};
use crate::crossed::{CMorphism, CrossedModule};
use crate::error::{Condition, Error, Result};
use crate::group::{Group, Hom};
use crate::iso::isomorphisms;
use crate::subgroup::{Subgroup, Subquotient};

/// Memoized `G x H`, so that products (and their subgroup lattices) are built
/// once per pair of tables.
pub fn product(g: &Arc<Group>, h: &Arc<Group>) -> Result<Arc<Group>> {
    static PRODUCTS: OnceLock<Mutex<HashMap<(u64, u64), Arc<Group>>>> = OnceLock::new();
    let key = (g.fingerprint(), h.fingerprint());
    let map = PRODUCTS.get_or_init(Default::default);
    if let Some(p) = map.lock().expect("product cache").get(&key) {
        return Ok(p.clone());
    }
    let p = Arc::new(Group::direct_product(g, h)?);
    Ok(map.lock().expect("product cache").entry(key).or_insert(p).clone())
}

pub(crate) fn factors(x: &Group) -> Result<(&Arc<Group>, &Arc<Group>)> {
    x.factors().ok_or(Error::NotAProduct)
}

/// Projections and kernels of a subgroup `U ≤ G x H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Projections {
    pub p1: ElemSet,
    pub k1: ElemSet,
    pub p2: ElemSet,
    pub k2: ElemSet,
}

pub(crate) fn projections(ng: usize, nh: usize, u: &ElemSet) -> Projections {
    let mut pr = Projections {
        p1: ElemSet::empty(ng),
        k1: ElemSet::empty(ng),
        p2: ElemSet::empty(nh),
        k2: ElemSet::empty(nh),
    };
    for x in u {
        let (g, h) = (x / nh, x % nh);
        pr.p1.insert(g);
        pr.p2.insert(h);
        if h == 0 {
            pr.k1.insert(g);
        }
        if g == 0 {
            pr.k2.insert(h);
        }
    }
    pr
}

/// `{(h, g) | (g, h) ∈ U}` inside `H x G`.
pub(crate) fn swap_set(ng: usize, nh: usize, u: &ElemSet) -> ElemSet {
    ElemSet::from_iter_with(ng * nh, u.iter().map(|x| (x % nh) * ng + x / nh))
}

/// Relational composition `A * B = {(g, k) | ∃h: (g, h) ∈ A, (h, k) ∈ B}`.
pub(crate) fn star_sets(ng: usize, nh: usize, nk: usize, a: &ElemSet, b: &ElemSet) -> ElemSet {
    let mut left: Vec<Vec<usize>> = vec![Vec::new(); nh];
    for x in a {
        left[x % nh].push(x / nh);
    }
    let mut out = ElemSet::empty(ng * nk);
    for y in b {
        let (h, k) = (y / nk, y % nk);
        for &g in &left[h] {
            out.insert(g * nk + k);
        }
    }
    out
}

/// `Δ(X) = {(x, x) | x ∈ X}` in `G x G`.
pub(crate) fn diagonal_set(n: usize, x: &ElemSet) -> ElemSet {
    ElemSet::from_iter_with(n * n, x.iter().map(|g| g * n + g))
}

/// `Δ_K(G) = {(g, h) | h^-1 g ∈ K}` in `G x G`.
pub(crate) fn diagonal_mod_set(g: &Group, k: &ElemSet) -> ElemSet {
    let n = g.order();
    let mut out = ElemSet::empty(n * n);
    for h in 0..n {
        for x in k {
            out.insert(g.mul(h, x) * n + h);
        }
    }
    out
}

/// The key of a section: its two element sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectionKey {
    pub t: ElemSet,
    pub s: ElemSet,
}

/// Section JSON: `{"ambient", "factors": [nG, nH], "T", "S"}`. A section of
/// a group that is not a direct product has `factors = [n, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionJson {
    pub ambient: serde_json::Value,
    pub factors: [usize; 2],
    #[serde(rename = "T")]
    pub t: Vec<usize>,
    #[serde(rename = "S")]
    pub s: Vec<usize>,
}

fn factor_sizes(x: &Group) -> [usize; 2] {
    match x.factors() {
        Some((g, h)) => [g.order(), h.order()],
        None => [x.order(), 1],
    }
}

/// A pair `S ⊴ T` of subgroups of an ambient group.
#[derive(Clone, Debug)]
pub struct Section {
    ambient: Arc<Group>,
    t: Subgroup,
    s: Subgroup,
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        self.ambient.fingerprint() == other.ambient.fingerprint() && self.t == other.t && self.s == other.s
    }
}

impl Eq for Section {}

impl Section {
    pub fn new(ambient: Arc<Group>, t: Subgroup, s: Subgroup) -> Result<Section> {
        ambient.check_parent(&t)?;
        ambient.check_parent(&s)?;
        if !ambient.normal_in_sets(s.elems(), t.elems()) {
            return Err(Error::NotNormal);
        }
        Ok(Section { ambient, t, s })
    }

    pub fn from_elems(ambient: Arc<Group>, t: &[usize], s: &[usize]) -> Result<Section> {
        let t = ambient.subgroup_from_elems(t)?;
        let s = ambient.subgroup_from_elems(s)?;
        Self::new(ambient, t, s)
    }

    pub fn to_json(&self) -> SectionJson {
        SectionJson {
            ambient: group_ref_json(&self.ambient),
            factors: factor_sizes(&self.ambient),
            t: self.t.to_vec(),
            s: self.s.to_vec(),
        }
    }

    /// Reads a section of `ambient` when given, of the referenced group otherwise;
    /// the factor sizes must match either way.
    pub fn from_json(json: &SectionJson, ambient: Option<&Arc<Group>>) -> Result<Section> {
        let x = match ambient {
            Some(x) => x.clone(),
            None => parse_group_ref(&json.ambient)?,
        };
        if factor_sizes(&x) != json.factors {
            return Err(Error::Invalid(format!("factors {:?} do not match {:?}", json.factors, factor_sizes(&x))));
        }
        if json.t.iter().chain(&json.s).any(|&e| e >= x.order()) {
            return Err(Error::Invalid("section element out of range".into()));
        }
        Section::from_elems(x, &json.t, &json.s)
    }

    pub(crate) fn from_key(ambient: Arc<Group>, key: &SectionKey) -> Section {
        let t = ambient.subgroup_trusted(key.t.clone());
        let s = ambient.subgroup_trusted(key.s.clone());
        Section { ambient, t, s }
    }

    pub fn ambient(&self) -> &Arc<Group> {
        &self.ambient
    }

    pub fn t(&self) -> &Subgroup {
        &self.t
    }

    pub fn s(&self) -> &Subgroup {
        &self.s
    }

    pub fn key(&self) -> SectionKey {
        SectionKey { t: self.t.elems().clone(), s: self.s.elems().clone() }
    }

    /// The conjugacy class of this section, in canonical form.
    pub fn class(&self) -> SectionClass {
        let (key, orbit_size) = canonical_key(&self.ambient, &self.key());
        SectionClass { section: Section::from_key(self.ambient.clone(), &key), orbit_size }
    }

    pub fn invariants(&self) -> Result<SectionInvariants> {
        let (g, h) = factors(&self.ambient)?;
        let (ng, nh) = (g.order(), h.order());
        let pt = projections(ng, nh, self.t.elems());
        let ps = projections(ng, nh, self.s.elems());
        let sub = |grp: &Arc<Group>, set: &ElemSet| grp.subgroup_trusted(set.clone());
        Ok(SectionInvariants {
            left: Invariants4 { p_t: sub(g, &pt.p1), k_t: sub(g, &pt.k1), p_s: sub(g, &ps.p1), k_s: sub(g, &ps.k1) },
            right: Invariants4 { p_t: sub(h, &pt.p2), k_t: sub(h, &pt.k2), p_s: sub(h, &ps.p2), k_s: sub(h, &ps.k2) },
        })
    }

    /// `(T^op, S^op)` in `H x G`.
    pub fn opposite(&self) -> Result<Section> {
        let (g, h) = factors(&self.ambient)?;
        let hg = product(h, g)?;
        let (ng, nh) = (g.order(), h.order());
        let key = SectionKey { t: swap_set(ng, nh, self.t.elems()), s: swap_set(ng, nh, self.s.elems()) };
        Ok(Section::from_key(hg, &key))
    }

    /// Goursat correspondents of `T` and `S`.
    pub fn goursat_pair(&self) -> Result<(GoursatQuintuple, GoursatQuintuple)> {
        Ok((goursat(&self.ambient, &self.t)?, goursat(&self.ambient, &self.s)?))
    }

    pub fn is_covering(&self) -> Result<bool> {
        let inv = self.invariants()?;
        Ok(inv.left.p_t.order() == factors(&self.ambient)?.0.order()
            && inv.right.p_t.order() == factors(&self.ambient)?.1.order()
            && inv.left.k_s.is_trivial()
            && inv.right.k_s.is_trivial())
    }
}

/// `(p(T), k(T), p(S), k(S))` on one side of a section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants4 {
    pub p_t: Subgroup,
    pub k_t: Subgroup,
    pub p_s: Subgroup,
    pub k_s: Subgroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionInvariants {
    pub left: Invariants4,
    pub right: Invariants4,
}

impl SectionInvariants {
    /// `(k1(T), p1(S))`
    pub fn l0(&self) -> (&Subgroup, &Subgroup) {
        (&self.left.k_t, &self.left.p_s)
    }

    /// `(k2(T), p2(S))`
    pub fn r0(&self) -> (&Subgroup, &Subgroup) {
        (&self.right.k_t, &self.right.p_s)
    }
}

/// A conjugacy class of sections, stored through its least member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionClass {
    pub section: Section,
    pub orbit_size: usize,
}

impl SectionClass {
    pub fn key(&self) -> SectionKey {
        self.section.key()
    }
}

/// Least `(T, S)` over the conjugation orbit, and the orbit size.
pub(crate) fn canonical_key(x: &Group, key: &SectionKey) -> (SectionKey, usize) {
    if x.is_abelian() {
        return (key.clone(), 1);
    }
    let mut seen: HashSet<SectionKey> = HashSet::from([key.clone()]);
    let mut queue = VecDeque::from([key.clone()]);
    let mut best = key.clone();
    while let Some(k) = queue.pop_front() {
        for perm in x.generator_conjugations() {
            let next = SectionKey { t: k.t.map(perm), s: k.s.map(perm) };
            if !seen.contains(&next) {
                if next < best {
                    best = next.clone();
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    (best, seen.len())
}

/// Conjugation orbit of an element set under the group generated by `gens`,
/// returning the least member and orbit size.
fn least_in_orbit(x: &Group, set: &ElemSet, gens: &[usize]) -> (ElemSet, usize) {
    let mut seen: HashSet<ElemSet> = HashSet::from([set.clone()]);
    let mut queue = VecDeque::from([set.clone()]);
    let mut best = set.clone();
    while let Some(s) = queue.pop_front() {
        for &g in gens {
            let next = x.conjugate_set(g, &s);
            if seen.insert(next.clone()) {
                if next < best {
                    best = next.clone();
                }
                queue.push_back(next);
            }
        }
    }
    (best, seen.len())
}

/// Every conjugacy class of sections of `x`, sorted by canonical form.
pub fn enumerate_sections(x: &Arc<Group>) -> Vec<SectionClass> {
    enumerate_section_keys(x)
        .into_iter()
        .map(|(key, orbit_size)| SectionClass { section: Section::from_key(x.clone(), &key), orbit_size })
        .collect()
}

pub(crate) fn enumerate_section_keys(x: &Group) -> Vec<(SectionKey, usize)> {
    let lattice = x.lattice();
    let subs = lattice.subgroups();
    let mut out = Vec::new();
    for class in lattice.classes() {
        let t = subs[class[0]].elems();
        let t_gens = x.greedy_generators(t);
        let norm_gens = if x.is_abelian() {
            Vec::new()
        } else {
            let normalizer = x.normalizer(&subs[class[0]]).expect("same parent");
            x.greedy_generators(normalizer.elems())
        };
        for s in subs {
            let s = s.elems();
            if !s.is_subset(t) || !t_gens.iter().all(|&g| s.iter().all(|y| s.contains(x.conjugate(g, y)))) {
                continue;
            }
            let (least, orbit) = least_in_orbit(x, s, &norm_gens);
            if least == *s {
                out.push((SectionKey { t: t.clone(), s: s.clone() }, class.len() * orbit));
            }
        }
    }
    out.sort();
    out
}

/// `(P, K, η, L, Q)` with `η: Q/L -> P/K`.
#[derive(Clone, Debug)]
pub struct GoursatQuintuple {
    ambient: Arc<Group>,
    pub p: Subgroup,
    pub k: Subgroup,
    pub l: Subgroup,
    pub q: Subgroup,
    /// `P/K`
    pub pk: Subquotient,
    /// `Q/L`
    pub ql: Subquotient,
    pub eta: Hom,
}

impl GoursatQuintuple {
    /// Validates `K ⊴ P ≤ G`, `L ⊴ Q ≤ H` and that `eta` is an isomorphism `Q/L -> P/K`.
    pub fn new(ambient: Arc<Group>, p: Subgroup, k: Subgroup, l: Subgroup, q: Subgroup, eta: Vec<usize>) -> Result<Self> {
        let (g, h) = factors(&ambient)?;
        g.check_parent(&p)?;
        g.check_parent(&k)?;
        h.check_parent(&l)?;
        h.check_parent(&q)?;
        let pk = g.subquotient(p.elems(), k.elems())?;
        let ql = h.subquotient(q.elems(), l.elems())?;
        let eta = Hom::new(&ql.group, &pk.group, eta).map_err(|_| Error::NotIso)?;
        if !eta.is_bijective(pk.group.order()) {
            return Err(Error::NotIso);
        }
        Ok(GoursatQuintuple { ambient: ambient.clone(), p, k, l, q, pk, ql, eta })
    }

    pub fn ambient(&self) -> &Arc<Group> {
        &self.ambient
    }
}

/// The Goursat correspondent of `U ≤ G x H`.
pub fn goursat(ambient: &Arc<Group>, u: &Subgroup) -> Result<GoursatQuintuple> {
    let (g, h) = factors(ambient)?;
    ambient.check_parent(u)?;
    let (ng, nh) = (g.order(), h.order());
    let pr = projections(ng, nh, u.elems());
    let pk = g.subquotient_trusted(&pr.p1, &pr.k1);
    let ql = h.subquotient_trusted(&pr.p2, &pr.k2);
    let mut eta = vec![usize::MAX; ql.group.order()];
    for x in u.elems() {
        let (a, b) = (x / nh, x % nh);
        let qb = ql.project(b).expect("in Q");
        if eta[qb] == usize::MAX {
            eta[qb] = pk.project(a).expect("in P");
        }
    }
    Ok(GoursatQuintuple {
        ambient: ambient.clone(),
        p: g.subgroup_trusted(pr.p1),
        k: g.subgroup_trusted(pr.k1),
        l: h.subgroup_trusted(pr.k2),
        q: h.subgroup_trusted(pr.p2),
        pk,
        ql,
        eta: Hom::trusted(eta),
    })
}

/// `{(g, h) ∈ P x Q | η(hL) = gK}`
pub fn subgroup_from_goursat(q: &GoursatQuintuple) -> Subgroup {
    q.ambient.subgroup_trusted(goursat_set(q))
}

fn goursat_set(q: &GoursatQuintuple) -> ElemSet {
    let nh = q.ambient.factors().expect("product").1.order();
    let mut out = ElemSet::empty(q.ambient.order());
    for a in q.p.elems() {
        let pa = q.pk.project(a).expect("in P");
        for b in q.q.elems() {
            if q.eta.apply(q.ql.project(b).expect("in Q")) == pa {
                out.insert(a * nh + b);
            }
        }
    }
    out
}

fn normal(g: &Group, a: &Subgroup, b: &Subgroup) -> bool {
    g.normal_in_sets(a.elems(), b.elems())
}

/// Rebuilds the section with Goursat correspondents `outer` (of `T`) and
/// `inner` (of `S`), after checking the section conditions in order.
pub fn section_from_goursat_pair(outer: &GoursatQuintuple, inner: &GoursatQuintuple) -> Result<Section> {
    if outer.ambient.fingerprint() != inner.ambient.fingerprint() {
        return Err(Error::MixedParents);
    }
    let (g, h) = factors(&outer.ambient)?;
    let (o, i) = (outer, inner);
    if !(normal(g, &i.k, &o.k) && normal(h, &i.l, &o.l)) {
        return Err(Error::ConditionViolated(Condition::S3));
    }
    if !(normal(g, &i.k, &o.p) && normal(g, &i.p, &o.p) && normal(h, &i.l, &o.q) && normal(h, &i.q, &o.q)) {
        return Err(Error::ConditionViolated(Condition::S4));
    }
    let commutes = |grp: &Group, a: &Subgroup, b: &Subgroup, c: &Subgroup| grp.commutator_sets(a.elems(), b.elems()).is_subset(c.elems());
    if !(commutes(g, &o.k, &i.p, &i.k) && commutes(h, &o.l, &i.q, &i.l)) {
        return Err(Error::ConditionViolated(Condition::S5));
    }
    let cm_left = CrossedModule::from_subquotients(g, &o.pk, &i.pk)
        .map_err(|_| Error::ConditionViolated(Condition::S6))?;
    let cm_right = CrossedModule::from_subquotients(h, &o.ql, &i.ql)
        .map_err(|_| Error::ConditionViolated(Condition::S6))?;
    if CMorphism::new(&cm_right, &cm_left, i.eta.clone(), o.eta.clone()).is_err() {
        return Err(Error::ConditionViolated(Condition::S7));
    }
    let t = subgroup_from_goursat(o);
    let s = subgroup_from_goursat(i);
    let x = &outer.ambient;
    if !x.normal_in_sets(s.elems(), t.elems()) {
        return Err(Error::Invalid("conditions hold but the reconstructed pair is not a section".into()));
    }
    Ok(Section { ambient: x.clone(), t, s })
}

/// `[K1, P2] ≤ K2` restated as `K1/K2 ≤ C_{P1/K2}(P2/K2)`, on the left factor.
/// Requires `K2 ⊴ P1` and `K2 ≤ K1, P2 ≤ P1`.
pub fn s5_prime_left(g: &Group, outer: &GoursatQuintuple, inner: &GoursatQuintuple) -> bool {
    let big = g.subquotient_trusted(outer.p.elems(), inner.k.elems());
    let img = |set: &ElemSet| -> Vec<usize> {
        let v: BTreeSet<usize> = set.iter().map(|x| big.project(x).expect("inside P1")).collect();
        v.into_iter().collect()
    };
    let (kt, ps) = (img(outer.k.elems()), img(inner.p.elems()));
    let q = &big.group;
    kt.iter().all(|&a| ps.iter().all(|&b| q.mul(a, b) == q.mul(b, a)))
}

/// Star product of `A ≤ G x H` and `B ≤ H x K`, as a subgroup of `G x K`.
pub fn star(x: &Arc<Group>, a: &Subgroup, y: &Arc<Group>, b: &Subgroup) -> Result<Subgroup> {
    let (g, h1) = factors(x)?;
    let (h2, k) = factors(y)?;
    if h1.fingerprint() != h2.fingerprint() {
        return Err(Error::MiddleMismatch);
    }
    x.check_parent(a)?;
    y.check_parent(b)?;
    let gk = product(g, k)?;
    let set = star_sets(g.order(), h1.order(), k.order(), a.elems(), b.elems());
    Ok(gk.subgroup_trusted(set))
}

/// Sections of `G x H` with left invariants `(G, K, P, 1)` and right invariants
/// `(H, L, Q, 1)`, as canonical keys.
pub fn sections_with_invariants(
    g: &Arc<Group>,
    k: &Subgroup,
    p: &Subgroup,
    h: &Arc<Group>,
    l: &Subgroup,
    q: &Subgroup,
) -> Result<Vec<SectionKey>> {
    let x = product(g, h)?;
    let mut found = BTreeSet::new();
    search_sections(g, k, p, h, l, q, |key| {
        found.insert(canonical_key(&x, &key).0);
        true
    })?;
    Ok(found.into_iter().collect())
}

/// Whether some section of `G x H` has left invariants `(G, K, P, 1)` and
/// right invariants `(H, L, Q, 1)`; stops at the first one found.
pub fn section_with_invariants_exists(
    g: &Arc<Group>,
    k: &Subgroup,
    p: &Subgroup,
    h: &Arc<Group>,
    l: &Subgroup,
    q: &Subgroup,
) -> Result<bool> {
    let mut any = false;
    search_sections(g, k, p, h, l, q, |_| {
        any = true;
        false
    })?;
    Ok(any)
}

/// Such a section has `T` the graph of an isomorphism `β: H/L -> G/K` and
/// `S = {(α(y), y)}` for an isomorphism `α: Q -> P`, with `S ⊴ T`. The search
/// pairs every `β` with the `α` agreeing with it on generators of `Q` modulo
/// `K`, then tests normality. `visit` returns whether to continue.
fn search_sections(
    g: &Arc<Group>,
    k: &Subgroup,
    p: &Subgroup,
    h: &Arc<Group>,
    l: &Subgroup,
    q: &Subgroup,
    mut visit: impl FnMut(SectionKey) -> bool,
) -> Result<()> {
    let x = product(g, h)?;
    let (ng, nh) = (g.order(), h.order());
    for (grp, sub) in [(g, k), (g, p)] {
        grp.check_parent(sub)?;
    }
    for (grp, sub) in [(h, l), (h, q)] {
        grp.check_parent(sub)?;
    }
    if p.order() != q.order() || ng / k.order() != nh / l.order() {
        return Ok(());
    }
    let gk = g.subquotient_trusted(&ElemSet::full(ng), k.elems());
    let hl = h.subquotient_trusted(&ElemSet::full(nh), l.elems());
    let one_g = ElemSet::from_iter_with(ng, [0]);
    let one_h = ElemSet::from_iter_with(nh, [0]);
    let pp = g.subquotient_trusted(p.elems(), &one_g);
    let qq = h.subquotient_trusted(q.elems(), &one_h);
    let betas = isomorphisms(&hl.group, &gk.group, None);
    if betas.is_empty() {
        return Ok(());
    }
    let q_gens = qq.group.generators().to_vec();
    let mut by_residue: HashMap<Vec<usize>, Vec<Hom>> = HashMap::new();
    for alpha in isomorphisms(&qq.group, &pp.group, None) {
        let residue = q_gens.iter().map(|&c| gk.project(pp.lift(alpha.apply(c))).expect("full")).collect();
        by_residue.entry(residue).or_default().push(alpha);
    }
    for beta in &betas {
        let residue: Vec<usize> =
            q_gens.iter().map(|&c| beta.apply(hl.project(qq.lift(c)).expect("full"))).collect();
        let Some(alphas) = by_residue.get(&residue) else { continue };
        let mut t = ElemSet::empty(ng * nh);
        for a in 0..ng {
            for b in 0..nh {
                if beta.apply(hl.project(b).expect("full")) == gk.project(a).expect("full") {
                    t.insert(a * nh + b);
                }
            }
        }
        let t_gens = x.greedy_generators(&t);
        for alpha in alphas {
            let s = ElemSet::from_iter_with(
                ng * nh,
                (0..qq.group.order()).map(|c| pp.lift(alpha.apply(c)) * nh + qq.lift(c)),
            );
            if s.is_subset(&t)
                && t_gens.iter().all(|&z| s.iter().all(|y| s.contains(x.conjugate(z, y))))
                && !visit(SectionKey { t: t.clone(), s })
            {
                return Ok(());
            }
        }
    }
    Ok(())
}
