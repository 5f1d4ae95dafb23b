//! The rational span `kΓ(G, H)` of section classes of `G x H`, with the
//! Mackey composition product `Γ(G, H) x Γ(H, K) -> Γ(G, K)`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::ElemSet;
use crate::catalog::{group_ref_json, parse_group_ref};
use crate::crossed::is_commuting_normal_pair;
use crate::error::{Error, Result};
use crate::group::{Group, Hom};
use crate::sections::{
    canonical_key, diagonal_mod_set, diagonal_set, enumerate_section_keys, factors, product, projections, swap_set,
    Section, SectionClass, SectionJson, SectionKey,
};
use crate::subgroup::{Subgroup, SubgroupLattice, Subquotient};

/// Lookup from an arbitrary section of a non-abelian ambient group to the
/// index of its class.
struct CanonMap {
    lattice: Arc<SubgroupLattice>,
    /// For each subgroup `T_j`: the class representative `T_r` and some `g`
    /// with `T_j = g T_r g^-1`.
    to_rep: Vec<(u32, usize)>,
    /// `(r, S)` for every `S ⊴ T_r`, mapped to the basis index of its class.
    by_rep: HashMap<(u32, ElemSet), u32>,
}

/// Basis data of `Γ(G, H)`.
pub struct GammaSpace {
    left: Arc<Group>,
    right: Arc<Group>,
    ambient: Arc<Group>,
    basis: Vec<SectionKey>,
    orbit_sizes: Vec<usize>,
    index: HashMap<SectionKey, u32>,
    canon: Option<CanonMap>,
    p1s: Vec<ElemSet>,
    p2s: Vec<ElemSet>,
}

impl fmt::Debug for GammaSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gamma({}, {}; dim {})", self.left.name(), self.right.name(), self.basis.len())
    }
}

impl GammaSpace {
    /// The memoized space for `(G, H)`.
    pub fn get(g: &Arc<Group>, h: &Arc<Group>) -> Result<Arc<GammaSpace>> {
        static SPACES: OnceLock<Mutex<HashMap<(u64, u64), Arc<GammaSpace>>>> = OnceLock::new();
        let key = (g.fingerprint(), h.fingerprint());
        let map = SPACES.get_or_init(Default::default);
        if let Some(s) = map.lock().expect("space cache").get(&key) {
            return Ok(s.clone());
        }
        let space = Arc::new(Self::build(g, h)?);
        Ok(map.lock().expect("space cache").entry(key).or_insert(space).clone())
    }

    fn build(g: &Arc<Group>, h: &Arc<Group>) -> Result<GammaSpace> {
        let ambient = product(g, h)?;
        let (basis, orbit_sizes): (Vec<SectionKey>, Vec<usize>) = enumerate_section_keys(&ambient).into_iter().unzip();
        let index: HashMap<SectionKey, u32> = basis.iter().cloned().enumerate().map(|(i, k)| (k, i as u32)).collect();
        let canon = (!ambient.is_abelian()).then(|| build_canon(&ambient, &index));
        let (ng, nh) = (g.order(), h.order());
        let (p1s, p2s) = basis
            .iter()
            .map(|k| {
                let pr = projections(ng, nh, &k.s);
                (pr.p1, pr.p2)
            })
            .unzip();
        Ok(GammaSpace { left: g.clone(), right: h.clone(), ambient, basis, orbit_sizes, index, canon, p1s, p2s })
    }

    pub fn left(&self) -> &Arc<Group> {
        &self.left
    }

    pub fn right(&self) -> &Arc<Group> {
        &self.right
    }

    pub fn ambient(&self) -> &Arc<Group> {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn key(&self, i: usize) -> &SectionKey {
        &self.basis[i]
    }

    pub fn keys(&self) -> &[SectionKey] {
        &self.basis
    }

    pub fn class(&self, i: usize) -> SectionClass {
        SectionClass { section: Section::from_key(self.ambient.clone(), &self.basis[i]), orbit_size: self.orbit_sizes[i] }
    }

    /// Basis elements with their classes, in canonical order.
    pub fn basis(self: &Arc<Self>) -> Vec<(SectionClass, GammaElement)> {
        (0..self.dim()).map(|i| (self.class(i), GammaElement::basis_element(self, i))).collect()
    }

    pub fn same_as(&self, other: &GammaSpace) -> bool {
        self.left.fingerprint() == other.left.fingerprint() && self.right.fingerprint() == other.right.fingerprint()
    }

    /// Basis index of the class of an arbitrary section `S ⊴ T` of the ambient group.
    pub fn index_of(&self, t: ElemSet, s: ElemSet) -> usize {
        match &self.canon {
            None => self.index[&SectionKey { t, s }] as usize,
            Some(c) => {
                let j = c.lattice.index_of(&t).expect("subgroup");
                let (r, g) = c.to_rep[j];
                let s = if g == 0 { s } else { self.ambient.conjugate_set(self.ambient.inv(g), &s) };
                c.by_rep[&(r, s)] as usize
            }
        }
    }

    pub fn index_of_section(&self, section: &Section) -> Result<usize> {
        if section.ambient().fingerprint() != self.ambient.fingerprint() {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.index_of(section.t().elems().clone(), section.s().elems().clone()))
    }
}

fn build_canon(x: &Arc<Group>, index: &HashMap<SectionKey, u32>) -> CanonMap {
    let lattice = x.lattice();
    let subs = lattice.subgroups();
    let mut to_rep = vec![(u32::MAX, 0usize); subs.len()];
    let mut by_rep = HashMap::new();
    for class in lattice.classes() {
        let r = class[0];
        to_rep[r] = (r as u32, 0);
        let mut queue = VecDeque::from([r]);
        while let Some(j) = queue.pop_front() {
            let g = to_rep[j].1;
            for (&s, perm) in x.generators().iter().zip(x.generator_conjugations()) {
                let next = lattice.index_of(&subs[j].elems().map(perm)).expect("subgroup");
                if to_rep[next].0 == u32::MAX {
                    to_rep[next] = (r as u32, x.mul(s, g));
                    queue.push_back(next);
                }
            }
        }
        let t = subs[r].elems();
        let t_gens = x.greedy_generators(t);
        let normalizer = x.normalizer(&subs[r]).expect("same parent");
        let n_gens = x.greedy_generators(normalizer.elems());
        for s in subs {
            let s = s.elems();
            if !s.is_subset(t) || by_rep.contains_key(&(r as u32, s.clone())) {
                continue;
            }
            if !t_gens.iter().all(|&g| s.iter().all(|y| s.contains(x.conjugate(g, y)))) {
                continue;
            }
            let mut orbit = vec![s.clone()];
            let mut k = 0;
            while k < orbit.len() {
                for &g in &n_gens {
                    let next = x.conjugate_set(g, &orbit[k]);
                    if !orbit.contains(&next) {
                        orbit.push(next);
                    }
                }
                k += 1;
            }
            let least = orbit.iter().min().expect("nonempty").clone();
            let idx = index[&SectionKey { t: t.clone(), s: least }];
            for member in orbit {
                by_rep.insert((r as u32, member), idx);
            }
        }
    }
    CanonMap { lattice, to_rep, by_rep }
}

/// `A * B` for `A ≤ G x H`, `B ≤ H x K`, using that each fiber of `A` over
/// `H` is a coset of `k1(A)`.
pub(crate) fn star_fast(g: &Group, nh: usize, nk: usize, a: &ElemSet, b: &ElemSet) -> ElemSet {
    let ng = g.order();
    let mut rep = [usize::MAX; 64];
    let mut rep_vec;
    let rep: &mut [usize] = if nh <= 64 {
        &mut rep[..nh]
    } else {
        rep_vec = vec![usize::MAX; nh];
        &mut rep_vec
    };
    let mut k1: smallvec::SmallVec<[usize; 16]> = smallvec::SmallVec::new();
    for x in a {
        let (gx, hx) = (x / nh, x % nh);
        if hx == 0 {
            k1.push(gx);
        }
        if rep[hx] == usize::MAX {
            rep[hx] = gx;
        }
    }
    let mut out = ElemSet::empty(ng * nk);
    for y in b {
        let (hy, ky) = (y / nk, y % nk);
        let r = rep[hy];
        if r == usize::MAX {
            continue;
        }
        for &kk in &k1 {
            out.insert(g.mul(r, kk) * nk + ky);
        }
    }
    out
}

/// `{(t h t^-1, k) | (h, k) ∈ U}`
fn conj_first(h: &Group, nk: usize, t: usize, u: &ElemSet) -> ElemSet {
    let mut out = ElemSet::empty(h.order() * nk);
    for y in u {
        out.insert(h.conjugate(t, y / nk) * nk + y % nk);
    }
    out
}

const MEMO_CAP: usize = 1 << 21;

/// Composition of basis elements for a fixed triple `(G, H, K)`.
pub struct Composer {
    gh: Arc<GammaSpace>,
    hk: Arc<GammaSpace>,
    gk: Arc<GammaSpace>,
    memo: Mutex<HashMap<(u32, u32), Arc<[(u32, u32)]>>>,
}

impl Composer {
    pub fn get(gh: &Arc<GammaSpace>, hk: &Arc<GammaSpace>) -> Result<Arc<Composer>> {
        static COMPOSERS: OnceLock<Mutex<HashMap<(u64, u64, u64), Arc<Composer>>>> = OnceLock::new();
        if gh.right.fingerprint() != hk.left.fingerprint() {
            return Err(Error::MiddleMismatch);
        }
        let key = (gh.left.fingerprint(), gh.right.fingerprint(), hk.right.fingerprint());
        let map = COMPOSERS.get_or_init(Default::default);
        if let Some(c) = map.lock().expect("composer cache").get(&key) {
            return Ok(c.clone());
        }
        let gk = GammaSpace::get(&gh.left, &hk.right)?;
        let c = Arc::new(Composer { gh: gh.clone(), hk: hk.clone(), gk, memo: Mutex::default() });
        Ok(map.lock().expect("composer cache").entry(key).or_insert(c).clone())
    }

    pub fn target(&self) -> &Arc<GammaSpace> {
        &self.gk
    }

    /// Mackey formula for basis elements `i` of `Γ(G, H)` and `j` of `Γ(H, K)`:
    /// one class `(T * tV, S * tU)` per double coset `p2(S) t p1(U)`.
    /// Returns `(class index, multiplicity)` sorted by index.
    pub fn compose_basis(&self, i: usize, j: usize) -> Vec<(u32, u32)> {
        let h = &*self.gh.right;
        let g = &*self.gh.left;
        let (nh, nk) = (h.order(), self.hk.right.order());
        let x = &self.gh.basis[i];
        let y = &self.hk.basis[j];
        let reps = h.double_coset_reps(&self.gh.p2s[i], &self.hk.p1s[j]);
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(reps.len());
        for t in reps {
            let (a, b) = if t == 0 || h.is_abelian() {
                (star_fast(g, nh, nk, &x.t, &y.t), star_fast(g, nh, nk, &x.s, &y.s))
            } else {
                let tv = conj_first(h, nk, t, &y.t);
                let tu = conj_first(h, nk, t, &y.s);
                (star_fast(g, nh, nk, &x.t, &tv), star_fast(g, nh, nk, &x.s, &tu))
            };
            let idx = self.gk.index_of(a, b) as u32;
            match out.iter_mut().find(|(k, _)| *k == idx) {
                Some(entry) => entry.1 += 1,
                None => out.push((idx, 1)),
            }
        }
        out.sort_unstable();
        out
    }

    pub fn compose_cached(&self, i: usize, j: usize) -> Arc<[(u32, u32)]> {
        let key = (i as u32, j as u32);
        if let Some(v) = self.memo.lock().expect("memo").get(&key) {
            return v.clone();
        }
        let v: Arc<[(u32, u32)]> = self.compose_basis(i, j).into();
        let mut memo = self.memo.lock().expect("memo");
        if memo.len() < MEMO_CAP {
            memo.insert(key, v.clone());
        }
        v
    }
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// An element of `kΓ(G, H)`: rational coefficients on basis indices, zeros omitted.
#[derive(Clone)]
pub struct GammaElement {
    space: Arc<GammaSpace>,
    terms: BTreeMap<usize, BigRational>,
}

impl PartialEq for GammaElement {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && self.terms == other.terms
    }
}

impl Eq for GammaElement {}

impl fmt::Debug for GammaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[", self.space)?;
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*#{k}")?;
        }
        write!(f, "]")
    }
}

impl GammaElement {
    pub fn zero(space: &Arc<GammaSpace>) -> Self {
        GammaElement { space: space.clone(), terms: BTreeMap::new() }
    }

    pub fn basis_element(space: &Arc<GammaSpace>, i: usize) -> Self {
        Self::from_terms(space, [(i, BigRational::one())])
    }

    pub fn from_terms(space: &Arc<GammaSpace>, terms: impl IntoIterator<Item = (usize, BigRational)>) -> Self {
        let mut e = Self::zero(space);
        for (i, c) in terms {
            e.add_term(i, c);
        }
        e
    }

    /// The basis element of the class of a section of `G x H`.
    pub fn from_section(section: &Section) -> Result<Self> {
        let (g, h) = factors(section.ambient())?;
        let space = GammaSpace::get(g, h)?;
        let i = space.index_of_section(section)?;
        Ok(Self::basis_element(&space, i))
    }

    pub fn space(&self) -> &Arc<GammaSpace> {
        &self.space
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, i: usize) -> BigRational {
        self.terms.get(&i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SectionKey, &BigRational)> {
        self.terms.iter().map(|(&i, c)| (self.space.key(i), c))
    }

    fn add_term(&mut self, i: usize, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(i).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&i);
        }
    }

    pub fn add(&self, other: &GammaElement) -> Result<GammaElement> {
        if !self.space.same_as(&other.space) {
            return Err(Error::SpaceMismatch);
        }
        let mut out = self.clone();
        for (&i, c) in &other.terms {
            out.add_term(i, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GammaElement) -> Result<GammaElement> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> GammaElement {
        if c.is_zero() {
            return Self::zero(&self.space);
        }
        GammaElement { space: self.space.clone(), terms: self.terms.iter().map(|(&i, v)| (i, v * c)).collect() }
    }

    /// `self ∘ other` for `self ∈ Γ(G, H)`, `other ∈ Γ(H, K)`.
    pub fn compose(&self, other: &GammaElement) -> Result<GammaElement> {
        let comp = Composer::get(&self.space, &other.space)?;
        let mut out = Self::zero(comp.target());
        for (&i, a) in &self.terms {
            for (&j, b) in &other.terms {
                let ab = a * b;
                for &(k, n) in comp.compose_cached(i, j).iter() {
                    out.add_term(k as usize, &ab * rational(n as i64));
                }
            }
        }
        Ok(out)
    }

    /// Image under `(T, S) -> (T^op, S^op)` in `Γ(H, G)`.
    pub fn opposite(&self) -> Result<GammaElement> {
        let space = GammaSpace::get(&self.space.right, &self.space.left)?;
        let (ng, nh) = (self.space.left.order(), self.space.right.order());
        let mut out = Self::zero(&space);
        for (&i, c) in &self.terms {
            let k = self.space.key(i);
            out.add_term(space.index_of(swap_set(ng, nh, &k.t), swap_set(ng, nh, &k.s)), c.clone());
        }
        Ok(out)
    }
}

/// One term of element JSON; the class is any representative section.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub class: SectionJson,
    pub num: i64,
    pub den: i64,
}

/// Element JSON: `{"left", "right", "terms"}`, terms in basis order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub left: serde_json::Value,
    pub right: serde_json::Value,
    pub terms: Vec<TermJson>,
}

impl GammaElement {
    pub fn to_json(&self) -> Result<ElementJson> {
        let small = |n: &BigInt| {
            i64::try_from(n).map_err(|_| Error::Invalid(format!("coefficient {n} does not fit in 64 bits")))
        };
        let terms = self
            .terms
            .iter()
            .map(|(&i, c)| {
                let class = Section::from_key(self.space.ambient().clone(), self.space.key(i)).to_json();
                Ok(TermJson { class, num: small(c.numer())?, den: small(c.denom())? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ElementJson { left: group_ref_json(&self.space.left), right: group_ref_json(&self.space.right), terms })
    }

    pub fn from_json(json: &ElementJson) -> Result<GammaElement> {
        let space = GammaSpace::get(&parse_group_ref(&json.left)?, &parse_group_ref(&json.right)?)?;
        let mut terms = Vec::with_capacity(json.terms.len());
        for term in &json.terms {
            if term.den == 0 {
                return Err(Error::Invalid("zero denominator".into()));
            }
            let section = Section::from_json(&term.class, Some(space.ambient()))?;
            let coefficient = BigRational::new(BigInt::from(term.num), BigInt::from(term.den));
            terms.push((space.index_of_section(&section)?, coefficient));
        }
        Ok(GammaElement::from_terms(&space, terms))
    }
}

/// The class of `(Δ(G), Δ(G))`, the identity of `Γ(G, G)`.
pub fn identity(g: &Arc<Group>) -> Result<GammaElement> {
    let space = GammaSpace::get(g, g)?;
    let d = diagonal_set(g.order(), &ElemSet::full(g.order()));
    let i = space.index_of(d.clone(), d);
    Ok(GammaElement::basis_element(&space, i))
}

/// A subgroup `H ≤ G` as a group in its own right; element `i` is the `i`-th
/// smallest element of `H`.
pub fn materialize(g: &Group, h: &Subgroup) -> Subquotient {
    g.subquotient_trusted(h.elems(), &ElemSet::from_iter_with(g.order(), [0]))
}

/// `G/N`, with elements ordered by least coset representative.
pub fn quotient_of(g: &Group, n: &ElemSet) -> Subquotient {
    g.subquotient_trusted(&ElemSet::full(g.order()), n)
}

/// The basic one-class elements.
pub enum Elementary<'a> {
    /// `Ind_H^G ∈ Γ(G, H)`
    Ind { group: &'a Arc<Group>, sub: &'a Subgroup },
    /// `Res_H^G ∈ Γ(H, G)`
    Res { group: &'a Arc<Group>, sub: &'a Subgroup },
    /// `Inf_{G/N}^G ∈ Γ(G, G/N)`
    Inf { group: &'a Arc<Group>, normal: &'a Subgroup },
    /// `Def_{G/N}^G ∈ Γ(G/N, G)`
    Def { group: &'a Arc<Group>, normal: &'a Subgroup },
    /// Transport along a bijective homomorphism `f: A -> B`, in `Γ(B, A)`.
    Iso { source: &'a Arc<Group>, target: &'a Arc<Group>, map: &'a Hom },
}

/// Basis element of the diagonal-type section `T = S = {(f(x), x)}`.
fn graph_element(left: &Arc<Group>, right: &Arc<Group>, pairs: impl Iterator<Item = (usize, usize)>) -> Result<GammaElement> {
    let space = GammaSpace::get(left, right)?;
    let nr = right.order();
    let set = ElemSet::from_iter_with(left.order() * nr, pairs.map(|(a, b)| a * nr + b));
    let i = space.index_of(set.clone(), set);
    Ok(GammaElement::basis_element(&space, i))
}

pub fn elementary(kind: Elementary<'_>) -> Result<GammaElement> {
    match kind {
        Elementary::Ind { group, sub } | Elementary::Res { group, sub } => {
            group.check_parent(sub).map_err(|_| Error::NotSubgroup)?;
            let m = materialize(group, sub);
            let pairs = (0..m.group.order()).map(|i| (m.lift(i), i));
            if matches!(kind, Elementary::Ind { .. }) {
                graph_element(group, &m.group, pairs)
            } else {
                graph_element(&m.group, group, pairs.map(|(a, b)| (b, a)))
            }
        }
        Elementary::Inf { group, normal } | Elementary::Def { group, normal } => {
            group.check_parent(normal)?;
            if !normal.is_normal_in_parent() {
                return Err(Error::NotNormal);
            }
            let q = quotient_of(group, normal.elems());
            let pairs = (0..group.order()).map(|x| (x, q.project(x).expect("full")));
            if matches!(kind, Elementary::Inf { .. }) {
                graph_element(group, &q.group, pairs)
            } else {
                graph_element(&q.group, group, pairs.map(|(a, b)| (b, a)))
            }
        }
        Elementary::Iso { source, target, map } => {
            if source.order() != target.order() || !map.is_bijective(target.order()) || !map.is_hom(source, target) {
                return Err(Error::NotIso);
            }
            graph_element(target, source, (0..source.order()).map(|a| (map.apply(a), a)))
        }
    }
}

/// `E_(K,P) = (Δ(P) ⊴ Δ_K(G))` and `e_(K,P) = E_(K,P) / |G:P|`.
pub fn e_section(g: &Arc<Group>, k: &Subgroup, p: &Subgroup) -> Result<(Section, GammaElement)> {
    if !is_commuting_normal_pair(g, k, p)? {
        return Err(Error::NotInPoset);
    }
    let gg = product(g, g)?;
    let t = diagonal_mod_set(g, k.elems());
    let s = diagonal_set(g.order(), p.elems());
    let section = Section::new(gg.clone(), gg.subgroup_trusted(t), gg.subgroup_trusted(s))?;
    let big_e = GammaElement::from_section(&section)?;
    let index = BigRational::new(BigInt::from(p.order()), BigInt::from(g.order()));
    Ok((section, big_e.scale(&index)))
}

/// Five factors `Ind, Inf, middle, Def, Res` whose composite is the basis
/// element `i` of `space`; the middle section has full projections on `T`
/// and trivial kernels on `S`.
pub fn factorize(space: &Arc<GammaSpace>, i: usize) -> Result<[GammaElement; 5]> {
    let (g, h) = (space.left(), space.right());
    let (ng, nh) = (g.order(), h.order());
    let key = space.key(i);
    let pt = projections(ng, nh, &key.t);
    let ps = projections(ng, nh, &key.s);
    let one_g = ElemSet::from_iter_with(ng, [0]);
    let one_h = ElemSet::from_iter_with(nh, [0]);
    let p_t = g.subquotient_trusted(&pt.p1, &one_g);
    let q_t = h.subquotient_trusted(&pt.p2, &one_h);
    let g_bar = g.subquotient_trusted(&pt.p1, &ps.k1);
    let h_bar = h.subquotient_trusted(&pt.p2, &ps.k2);
    let ind = graph_element(g, &p_t.group, (0..p_t.group.order()).map(|a| (p_t.lift(a), a)))?;
    let inf = graph_element(
        &p_t.group,
        &g_bar.group,
        (0..p_t.group.order()).map(|a| (a, g_bar.project(p_t.lift(a)).expect("inside"))),
    )?;
    let def = graph_element(
        &h_bar.group,
        &q_t.group,
        (0..q_t.group.order()).map(|b| (h_bar.project(q_t.lift(b)).expect("inside"), b)),
    )?;
    let res = graph_element(&q_t.group, h, (0..q_t.group.order()).map(|b| (b, q_t.lift(b))))?;
    let mid_space = GammaSpace::get(&g_bar.group, &h_bar.group)?;
    let nhb = h_bar.group.order();
    let image = |set: &ElemSet| {
        ElemSet::from_iter_with(
            g_bar.group.order() * nhb,
            set.iter().map(|x| g_bar.project(x / nh).expect("inside") * nhb + h_bar.project(x % nh).expect("inside")),
        )
    };
    let mid = GammaElement::basis_element(&mid_space, mid_space.index_of(image(&key.t), image(&key.s)));
    Ok([ind, inf, mid, def, res])
}

/// A uniformly random basis element.
pub fn random_basis_element(space: &Arc<GammaSpace>, rng: &mut impl Rng) -> GammaElement {
    GammaElement::basis_element(space, rng.gen_range(0..space.dim()))
}

/// Canonical class of an arbitrary section of a product, through its space.
pub fn class_index(space: &GammaSpace, section: &Section) -> Result<usize> {
    space.index_of_section(section)
}

/// Checks `index_of` against the orbit-based canonical form (used by tests).
pub fn index_agrees_with_orbit_canon(space: &GammaSpace, t: &ElemSet, s: &ElemSet) -> bool {
    let (key, _) = canonical_key(space.ambient(), &SectionKey { t: t.clone(), s: s.clone() });
    space.keys()[space.index_of(t.clone(), s.clone())] == key
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sections::enumerate_sections;

    fn arc(g: Group) -> Arc<Group> {
        Arc::new(g)
    }

    #[test]
    fn basis_sizes() {
        let c1 = arc(Group::cyclic(1).unwrap());
        let c2 = arc(Group::cyclic(2).unwrap());
        assert_eq!(GammaSpace::get(&c1, &c1).unwrap().dim(), 1);
        assert_eq!(GammaSpace::get(&c2, &c1).unwrap().dim(), 3);
        assert_eq!(GammaSpace::get(&c2, &c2).unwrap().dim(), 12);
    }

    #[test]
    fn canonical_index_matches_orbit_search() {
        let s3 = arc(Group::symmetric(3).unwrap());
        let c2 = arc(Group::cyclic(2).unwrap());
        let space = GammaSpace::get(&s3, &c2).unwrap();
        let x = space.ambient().clone();
        let subs = x.subgroups();
        for t in &subs {
            for s in &subs {
                if x.normal_in_sets(s.elems(), t.elems()) {
                    assert!(index_agrees_with_orbit_canon(&space, t.elems(), s.elems()));
                }
            }
        }
        assert_eq!(space.dim(), enumerate_sections(&x).len());
    }

    #[test]
    fn identity_acts_trivially() {
        let s3 = arc(Group::symmetric(3).unwrap());
        let id = identity(&s3).unwrap();
        assert_eq!(id.compose(&id).unwrap(), id);
        let space = GammaSpace::get(&s3, &s3).unwrap();
        for (_, b) in space.basis() {
            assert_eq!(id.compose(&b).unwrap(), b);
            assert_eq!(b.compose(&id).unwrap(), b);
        }
        let c1 = arc(Group::cyclic(1).unwrap());
        let one = identity(&c1).unwrap();
        assert_eq!(one.coefficients().len(), 1);
    }

    #[test]
    fn idempotents_of_cyclic_four() {
        let c4 = arc(Group::cyclic(4).unwrap());
        let c2 = c4.subgroup_generated(&[2]);
        let one = c4.trivial_subgroup();
        let (_, e) = e_section(&c4, &one, &c2).unwrap();
        assert_eq!(e.compose(&e).unwrap(), e);
        // E_(1,C2) ∘ E_(1,C2) = 2 E_(1,C2)
        let big = e.scale(&rational(2));
        assert_eq!(big.compose(&big).unwrap(), big.scale(&rational(2)));
        let (_, e_min) = e_section(&c4, &one, &c4.whole()).unwrap();
        assert_eq!(e_min, identity(&c4).unwrap());
    }

    #[test]
    fn elementary_identities() {
        let c4 = arc(Group::cyclic(4).unwrap());
        let n = c4.subgroup_generated(&[2]);
        let inf = elementary(Elementary::Inf { group: &c4, normal: &n }).unwrap();
        let def = elementary(Elementary::Def { group: &c4, normal: &n }).unwrap();
        let q = inf.space().right().clone();
        assert_eq!(def.compose(&inf).unwrap(), identity(&q).unwrap());
        let (key, _) = inf.terms().next().map(|(k, c)| (k.clone(), c.clone())).unwrap();
        assert_eq!((key.t.len(), key.s.len()), (4, 4));
        let whole = c4.whole();
        assert_eq!(elementary(Elementary::Ind { group: &c4, sub: &whole }).unwrap(), identity(&c4).unwrap());
        let s3 = arc(Group::symmetric(3).unwrap());
        let c2 = s3.subgroups().into_iter().find(|s| s.order() == 2).unwrap();
        assert!(matches!(elementary(Elementary::Inf { group: &s3, normal: &c2 }), Err(Error::NotNormal)));
    }

    #[test]
    fn factorization_recomposes() {
        let s3 = arc(Group::symmetric(3).unwrap());
        let c2 = arc(Group::cyclic(2).unwrap());
        let space = GammaSpace::get(&s3, &c2).unwrap();
        for i in 0..space.dim() {
            let [a, b, c, d, e] = factorize(&space, i).unwrap();
            let whole = a.compose(&b.compose(&c.compose(&d.compose(&e).unwrap()).unwrap()).unwrap()).unwrap();
            assert_eq!(whole, GammaElement::basis_element(&space, i));
        }
    }

    #[test]
    fn space_mismatch() {
        let c2 = arc(Group::cyclic(2).unwrap());
        let c3 = arc(Group::cyclic(3).unwrap());
        let a = identity(&c2).unwrap();
        let b = identity(&c3).unwrap();
        assert!(matches!(a.add(&b), Err(Error::SpaceMismatch)));
        assert!(matches!(a.compose(&b), Err(Error::MiddleMismatch)));
    }

    #[test]
    fn element_json_round_trip() {
        let s3 = arc(Group::symmetric(3).unwrap());
        let c2 = arc(Group::cyclic(2).unwrap());
        let space = GammaSpace::get(&s3, &c2).unwrap();
        let x = GammaElement::from_terms(&space, (0..space.dim()).map(|i| (i, BigRational::new((i as i64 - 3).into(), 2.into()))));
        let json = x.to_json().unwrap();
        let text = serde_json::to_string(&json).unwrap();
        let back = GammaElement::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, x);
        let mut bad = json.clone();
        bad.terms[0].den = 0;
        assert!(GammaElement::from_json(&bad).is_err());
    }

    #[test]
    fn fast_star_matches_relational_composition() {
        let s3 = arc(Group::symmetric(3).unwrap());
        let c2 = arc(Group::cyclic(2).unwrap());
        let c4 = arc(Group::cyclic(4).unwrap());
        let gh = crate::sections::product(&s3, &c2).unwrap();
        let hk = crate::sections::product(&c2, &c4).unwrap();
        for a in gh.subgroups() {
            for b in hk.subgroups() {
                assert_eq!(
                    star_fast(&s3, 2, 4, a.elems(), b.elems()),
                    crate::sections::star_sets(6, 2, 4, a.elems(), b.elems())
                );
            }
        }
    }
}
