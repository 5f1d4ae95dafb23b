//! Covering sections, linkage classes of pairs, the groups `Γ_(G,K,P)` and
//! their bimodule sets, reduced pairs, the essential algebra, and seeds of
//! simple functors.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::catalog::Catalog;
use crate::crossed::{aut_out, iso_search, linked, theta, CmFingerprint, CrossedModule};
use crate::error::{Error, Result};
use crate::gamma::{Composer, GammaSpace};
use crate::group::Group;
use crate::linalg::{RowSpace, SparseRow};
use crate::poset::PosetG;
use crate::sections::{diagonal_mod_set, diagonal_set, projections, swap_set, SectionClass, SectionKey};

fn memo<K: std::hash::Hash + Eq + Clone, V>(
    cell: &'static OnceLock<Mutex<HashMap<K, Arc<V>>>>,
    key: K,
    build: impl FnOnce() -> Result<V>,
) -> Result<Arc<V>> {
    let map = cell.get_or_init(Default::default);
    if let Some(v) = map.lock().expect("memo").get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(build()?);
    Ok(map.lock().expect("memo").entry(key).or_insert(v).clone())
}

/// Projections and kernels of `T` and `S` for a section of `G x H`:
/// `(l0, r0)` sides as `((p1 T, k1 T, p1 S, k1 S), (p2 T, k2 T, p2 S, k2 S))`.
fn side_invariants(ng: usize, nh: usize, key: &SectionKey) -> [[crate::ElemSet; 4]; 2] {
    let t = projections(ng, nh, &key.t);
    let s = projections(ng, nh, &key.s);
    [[t.p1, t.k1, s.p1, s.k1], [t.p2, t.k2, s.p2, s.k2]]
}

/// Covering sections of `G x G`: `p1(T) = p2(T) = G`, `k1(S) = k2(S) = 1`.
pub struct CoveringBasis {
    group: Arc<Group>,
    space: Arc<GammaSpace>,
    poset: Arc<PosetG>,
    indices: Vec<usize>,
    position: Vec<u32>,
    l0: Vec<usize>,
    r0: Vec<usize>,
}

impl std::fmt::Debug for CoveringBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CoveringBasis({}; dim {})", self.group.name(), self.indices.len())
    }
}

pub fn covering_basis(g: &Arc<Group>) -> Result<Arc<CoveringBasis>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CoveringBasis>>>> = OnceLock::new();
    memo(&CACHE, g.fingerprint(), || {
        let space = GammaSpace::get(g, g)?;
        let poset = PosetG::build(g);
        let n = g.order();
        let mut indices = Vec::new();
        let mut position = vec![u32::MAX; space.dim()];
        let (mut l0, mut r0) = (Vec::new(), Vec::new());
        for (i, key) in space.keys().iter().enumerate() {
            let [left, right] = side_invariants(n, n, key);
            if left[0].len() == n && right[0].len() == n && left[3].len() == 1 && right[3].len() == 1 {
                position[i] = indices.len() as u32;
                indices.push(i);
                l0.push(poset.index_of(&left[1], &left[2]).ok_or(Error::NotInPoset)?);
                r0.push(poset.index_of(&right[1], &right[2]).ok_or(Error::NotInPoset)?);
            }
        }
        Ok(CoveringBasis { group: g.clone(), space, poset, indices, position, l0, r0 })
    })
}

impl CoveringBasis {
    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn space(&self) -> &Arc<GammaSpace> {
        &self.space
    }

    pub fn poset(&self) -> &Arc<PosetG> {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Space index of the covering element at `pos`.
    pub fn index(&self, pos: usize) -> usize {
        self.indices[pos]
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Covering position of a space index, if covering.
    pub fn position(&self, index: usize) -> Option<usize> {
        match self.position[index] {
            u32::MAX => None,
            p => Some(p as usize),
        }
    }

    /// `l0 = (k1(T), p1(S))` as a poset index.
    pub fn l0(&self, pos: usize) -> usize {
        self.l0[pos]
    }

    /// `r0 = (k2(T), p2(S))` as a poset index.
    pub fn r0(&self, pos: usize) -> usize {
        self.r0[pos]
    }

    pub fn classes(&self) -> Vec<SectionClass> {
        self.indices.iter().map(|&i| self.space.class(i)).collect()
    }

    /// Space index of `E_(K,P)` for poset element `x`.
    pub fn e_index(&self, x: usize) -> usize {
        let pair = self.poset.pair(x);
        let n = self.group.order();
        self.space.index_of(diagonal_mod_set(&self.group, pair.k.elems()), diagonal_set(n, pair.p.elems()))
    }

    /// Checks that products of covering elements only involve covering
    /// classes, for every ordered pair of basis elements.
    pub fn check_closure(&self) -> Result<usize> {
        let comp = Composer::get(&self.space, &self.space)?;
        let mut count = 0;
        for &a in &self.indices {
            for &b in &self.indices {
                for &(c, _) in comp.compose_basis(a, b).iter() {
                    if self.position(c as usize).is_none() {
                        return Err(Error::DecompositionMismatch(format!("product of {a} and {b} leaves the covering span")));
                    }
                }
                count += 1;
            }
        }
        Ok(count)
    }
}

/// Crossed module `(P, G/K, i_P)` of a poset element.
pub fn pair_module(poset: &PosetG, x: usize) -> Result<CrossedModule> {
    let pair = poset.pair(x);
    CrossedModule::from_pair(poset.group(), &pair.k, &pair.p)
}

/// Linkage classes of `𝒢_G` with the induced order on classes.
pub struct LinkagePartition {
    poset: Arc<PosetG>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    order: Vec<Vec<bool>>,
}

impl std::fmt::Debug for LinkagePartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LinkagePartition({:?})", self.classes)
    }
}

#[derive(Serialize)]
struct PartitionJson {
    group: String,
    classes: Vec<Vec<(Vec<usize>, Vec<usize>)>>,
    order: Vec<(usize, usize)>,
}

/// Classes are listed by least member; each class is sorted. The class of
/// the minimum `(1, G)` comes first.
pub fn linkage_partition(g: &Arc<Group>) -> Result<Arc<LinkagePartition>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<LinkagePartition>>>> = OnceLock::new();
    memo(&CACHE, g.fingerprint(), || {
        let poset = PosetG::build(g);
        let modules = (0..poset.len()).map(|x| pair_module(&poset, x)).collect::<Result<Vec<_>>>()?;
        let prints: Vec<CmFingerprint> = modules.iter().map(|m| m.fingerprint()).collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![usize::MAX; poset.len()];
        for x in 0..poset.len() {
            let found = classes.iter().position(|c| {
                let rep = c[0];
                prints[rep] == prints[x] && iso_search(&modules[x], &modules[rep]).is_some()
            });
            match found {
                Some(c) => {
                    classes[c].push(x);
                    class_of[x] = c;
                }
                None => {
                    class_of[x] = classes.len();
                    classes.push(vec![x]);
                }
            }
        }
        let n = classes.len();
        let mut order = vec![vec![false; n]; n];
        for x in 0..poset.len() {
            for y in poset.poset().upper_set(x) {
                order[class_of[x]][class_of[y]] = true;
            }
        }
        Ok(LinkagePartition { poset, classes, class_of, order })
    })
}

impl LinkagePartition {
    pub fn poset(&self) -> &Arc<PosetG> {
        &self.poset
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    /// `{K,P} <= {L,Q}` iff some members are comparable.
    pub fn class_leq(&self, c: usize, d: usize) -> bool {
        self.order[c][d]
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pair = |x: usize| (self.poset.pair(x).k.to_vec(), self.poset.pair(x).p.to_vec());
        let n = self.len();
        serde_json::to_value(PartitionJson {
            group: self.poset.group().name().to_string(),
            classes: self.classes.iter().map(|c| c.iter().map(|&x| pair(x)).collect()).collect(),
            order: (0..n).flat_map(|c| (0..n).map(move |d| (c, d))).filter(|&(c, d)| self.order[c][d]).collect(),
        })
        .expect("serializable")
    }
}

/// `Γ_(G,K,P)`: covering classes with `l0 = r0 = (K, P)`, multiplied by
/// `x · y = (x ∘ y) / |G:P|`. Element 0 is `E_(K,P)`.
pub struct GammaGroup {
    group: Arc<Group>,
    pair: usize,
    space: Arc<GammaSpace>,
    elements: Vec<usize>,
    position: HashMap<usize, usize>,
    table: Arc<Group>,
}

impl std::fmt::Debug for GammaGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GammaGroup({}, pair {}; order {})", self.group.name(), self.pair, self.elements.len())
    }
}

/// Θ compared against `Out(P, G/K, i_P)`.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    pub aut_order: usize,
    pub inn_order: usize,
    pub out_order: usize,
    pub gamma_order: usize,
    /// Γ element of the representative of each `Out` element.
    pub out_to_gamma: Vec<usize>,
}

pub fn gamma_group(g: &Arc<Group>, k: &crate::Subgroup, p: &crate::Subgroup) -> Result<Arc<GammaGroup>> {
    let x = PosetG::build(g).index_of_pair(k, p)?;
    GammaGroup::of_pair(g, x)
}

impl GammaGroup {
    pub fn of_pair(g: &Arc<Group>, x: usize) -> Result<Arc<GammaGroup>> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<GammaGroup>>>> = OnceLock::new();
        memo(&CACHE, (g.fingerprint(), x), || Self::build(g, x))
    }

    fn build(g: &Arc<Group>, x: usize) -> Result<GammaGroup> {
        let cov = covering_basis(g)?;
        if x >= cov.poset().len() {
            return Err(Error::NotInPoset);
        }
        let space = cov.space().clone();
        let identity = cov.e_index(x);
        let mut elements = vec![identity];
        elements.extend((0..cov.len()).filter(|&c| cov.l0(c) == x && cov.r0(c) == x).map(|c| cov.index(c)).filter(|&i| i != identity));
        if cov.position(identity).map_or(true, |c| cov.l0(c) != x || cov.r0(c) != x) {
            return Err(Error::DecompositionMismatch("E_(K,P) does not have invariants (K, P)".into()));
        }
        elements[1..].sort_unstable();
        let position: HashMap<usize, usize> = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let pair = cov.poset().pair(x);
        let index = (g.order() / pair.p.order()) as u32;
        let comp = Composer::get(&space, &space)?;
        let mut table = Vec::with_capacity(elements.len());
        for &a in &elements {
            let mut row = Vec::with_capacity(elements.len());
            for &b in &elements {
                match comp.compose_cached(a, b).as_ref() {
                    [(c, m)] if *m == index && position.contains_key(&(*c as usize)) => row.push(position[&(*c as usize)]),
                    other => {
                        return Err(Error::DecompositionMismatch(format!(
                            "product of Γ elements {a} and {b} is {other:?}, not {index} times one element"
                        )))
                    }
                }
            }
            table.push(row);
        }
        let table = Arc::new(Group::from_table(format!("Gamma({},{})", g.name(), x), table)?);
        let n = g.order();
        for (i, &a) in elements.iter().enumerate() {
            let key = space.key(a);
            let op = space.index_of(swap_set(n, n, &key.t), swap_set(n, n, &key.s));
            if position.get(&op) != Some(&table.inv(i)) {
                return Err(Error::DecompositionMismatch(format!("opposite of Γ element {a} is not its inverse")));
            }
        }
        Ok(GammaGroup { group: g.clone(), pair: x, space, elements, position, table })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn pair(&self) -> usize {
        self.pair
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Space indices in `Γ(G, G)`; index 0 is `E_(K,P)`.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn position(&self, index: usize) -> Option<usize> {
        self.position.get(&index).copied()
    }

    pub fn table(&self) -> &Arc<Group> {
        &self.table
    }

    pub fn space(&self) -> &Arc<GammaSpace> {
        &self.space
    }

    pub fn classes(&self) -> Vec<SectionClass> {
        self.elements.iter().map(|&i| self.space.class(i)).collect()
    }

    /// Number of irreducible representations over a splitting field of
    /// characteristic 0.
    pub fn irreducible_count(&self) -> usize {
        self.table.conjugacy_classes().len()
    }

    /// Maps every automorphism of `(P, G/K, i_P)` through Θ and checks that
    /// Θ is a surjective homomorphism onto Γ with kernel `Inn`.
    pub fn theta_report(&self) -> Result<ThetaReport> {
        let poset = PosetG::build(&self.group);
        let pair = poset.pair(self.pair);
        let cm = pair_module(&poset, self.pair)?;
        let od = aut_out(&cm)?;
        let fail = |m: String| Err(Error::DecompositionMismatch(m));
        let mut images = Vec::with_capacity(od.auts.len());
        for m in &od.auts {
            let section = theta(&self.group, &pair.k, &pair.p, m)?;
            match self.position(self.space.index_of_section(&section)?) {
                Some(pos) => images.push(pos),
                None => return fail("Θ image outside Γ".into()),
            }
        }
        for i in 0..od.auts.len() {
            for j in 0..od.auts.len() {
                if images[od.aut.mul(i, j)] != self.table.mul(images[i], images[j]) {
                    return fail(format!("Θ is not multiplicative at ({i}, {j})"));
                }
            }
        }
        let kernel: Vec<usize> = (0..images.len()).filter(|&i| images[i] == 0).collect();
        if kernel != od.inn.to_vec() {
            return fail("kernel of Θ differs from the inner automorphisms".into());
        }
        let out_to_gamma: Vec<usize> = od.out_reps.iter().map(|&r| images[r]).collect();
        let distinct: HashSet<usize> = out_to_gamma.iter().copied().collect();
        if distinct.len() != out_to_gamma.len() || out_to_gamma.len() != self.order() {
            return fail("Θ does not induce a bijection Out -> Γ".into());
        }
        Ok(ThetaReport {
            aut_order: od.auts.len(),
            inn_order: od.inn.order(),
            out_order: od.out.order(),
            gamma_order: self.order(),
            out_to_gamma,
        })
    }
}

/// Classes of `G x H` with `l = (G, K, P, 1)` and `r = (H, L, Q, 1)`, with
/// the actions of `Γ_(G,K,P)` on the left and `Γ_(H,L,Q)` on the right.
pub struct BimoduleSet {
    pub space: Arc<GammaSpace>,
    /// Space indices in `Γ(G, H)`.
    pub classes: Vec<usize>,
    /// `left[a][i]`: position of `a · classes[i]`, when the action is defined.
    pub left: Option<Vec<Vec<usize>>>,
    /// `right[i][b]`: position of `classes[i] · b`.
    pub right: Option<Vec<Vec<usize>>>,
    pub gamma_left: Arc<GammaGroup>,
    pub gamma_right: Arc<GammaGroup>,
}

fn is_regular(rows: &[Vec<usize>], n: usize) -> bool {
    rows.iter().all(|r| r.iter().copied().collect::<HashSet<_>>().len() == n)
}

impl BimoduleSet {
    /// Both actions defined, and `a ↦ a·γ`, `b ↦ γ·b` bijective for every `γ`.
    pub fn is_free_and_transitive(&self) -> bool {
        let n = self.classes.len();
        let (Some(left), Some(right)) = (&self.left, &self.right) else { return false };
        if n != self.gamma_left.order() || n != self.gamma_right.order() {
            return false;
        }
        let left_t: Vec<Vec<usize>> = (0..n).map(|i| left.iter().map(|r| r[i]).collect()).collect();
        is_regular(&left_t, n) && is_regular(right, n)
    }

    /// The isomorphism `Γ_(H,L,Q) -> Γ_(G,K,P)` induced by `classes[i]`:
    /// `b ↦ a` with `a · γ = γ · b`.
    pub fn transport(&self, i: usize) -> Result<Vec<usize>> {
        let (Some(left), Some(right)) = (&self.left, &self.right) else {
            return Err(Error::DecompositionMismatch("bimodule actions undefined".into()));
        };
        let map: Vec<usize> = (0..self.gamma_right.order())
            .map(|b| {
                let target = right[i][b];
                (0..self.gamma_left.order())
                    .find(|&a| left[a][i] == target)
                    .ok_or_else(|| Error::DecompositionMismatch("left action not transitive".into()))
            })
            .collect::<Result<_>>()?;
        let (gl, gr) = (self.gamma_left.table(), self.gamma_right.table());
        for a in 0..gr.order() {
            for b in 0..gr.order() {
                if map[gr.mul(a, b)] != gl.mul(map[a], map[b]) {
                    return Err(Error::DecompositionMismatch("transport is not multiplicative".into()));
                }
            }
        }
        Ok(map)
    }
}

pub fn bimodule_set(g: &Arc<Group>, x: usize, h: &Arc<Group>, y: usize) -> Result<BimoduleSet> {
    let (pg, ph) = (PosetG::build(g), PosetG::build(h));
    if x >= pg.len() || y >= ph.len() {
        return Err(Error::NotInPoset);
    }
    let (gamma_left, gamma_right) = (GammaGroup::of_pair(g, x)?, GammaGroup::of_pair(h, y)?);
    let space = GammaSpace::get(g, h)?;
    let (ng, nh) = (g.order(), h.order());
    let (px, py) = (pg.pair(x), ph.pair(y));
    let classes: Vec<usize> = (0..space.dim())
        .filter(|&i| {
            let [l, r] = side_invariants(ng, nh, space.key(i));
            l[0].len() == ng
                && l[1] == *px.k.elems()
                && l[2] == *px.p.elems()
                && l[3].len() == 1
                && r[0].len() == nh
                && r[1] == *py.k.elems()
                && r[2] == *py.p.elems()
                && r[3].len() == 1
        })
        .collect();
    let position: HashMap<usize, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let act = |comp: &Composer, a: usize, b: usize, m: u32| -> Option<usize> {
        match comp.compose_cached(a, b).as_ref() {
            [(c, k)] if *k == m => position.get(&(*c as usize)).copied(),
            _ => None,
        }
    };
    let (left, right) = if classes.is_empty() {
        (Some(Vec::new()), Some(Vec::new()))
    } else {
        let cl = Composer::get(gamma_left.space(), &space)?;
        let cr = Composer::get(&space, gamma_right.space())?;
        let ig = (ng / px.p.order()) as u32;
        let ih = (nh / py.p.order()) as u32;
        let left: Option<Vec<Vec<usize>>> = gamma_left
            .elements()
            .iter()
            .map(|&a| classes.iter().map(|&c| act(&cl, a, c, ig)).collect())
            .collect();
        let right: Option<Vec<Vec<usize>>> =
            classes.iter().map(|&c| gamma_right.elements().iter().map(|&b| act(&cr, c, b, ih)).collect()).collect();
        (left, right)
    };
    Ok(BimoduleSet { space, classes, left, right, gamma_left, gamma_right })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    Reduced,
    NotReduced,
    Undetermined,
}

/// Which rule decided a reduced status.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// `K <= P`
    KleP,
    /// `P < K`
    PltK,
    /// `PK = G` and `K` not inside `P`
    PKeqG,
    /// Some nontrivial normal `N <= K` meets `P` trivially.
    NecessaryViolated,
    /// Linked to a pair of a smaller catalog group.
    SmallerLinked { group: String, k: Vec<usize>, p: Vec<usize> },
    /// No rule applies and the catalog search found nothing.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedStatus {
    pub pair: usize,
    pub verdict: Verdict,
    pub rule: Rule,
}

/// Every rule that fires on `(K, P)`, in rule order, with its verdict. The
/// catalog search reports the first linked pair of a smaller catalog group.
pub fn rule_verdicts(g: &Arc<Group>, x: usize, catalog: &Catalog) -> Result<Vec<(Rule, Verdict)>> {
    let poset = PosetG::build(g);
    if x >= poset.len() {
        return Err(Error::NotInPoset);
    }
    let pair = poset.pair(x);
    let (k, p) = (pair.k.elems(), pair.p.elems());
    let mut out = Vec::new();
    if k.is_subset(p) {
        out.push((Rule::KleP, Verdict::Reduced));
    }
    if p.is_subset(k) && p != k {
        out.push((Rule::PltK, Verdict::NotReduced));
    }
    if !k.is_subset(p) && g.product_set(p, k).len() == g.order() {
        out.push((Rule::PKeqG, Verdict::NotReduced));
    }
    if g.normal_subgroups().iter().any(|n| n.order() > 1 && n.elems().is_subset(k) && n.elems().intersection(p).len() == 1) {
        out.push((Rule::NecessaryViolated, Verdict::NotReduced));
    }
    if let Some(rule) = smaller_linked(g, &poset, x, catalog)? {
        out.push((rule, Verdict::NotReduced));
    }
    Ok(out)
}

fn smaller_linked(g: &Arc<Group>, poset: &PosetG, x: usize, catalog: &Catalog) -> Result<Option<Rule>> {
    let pair = poset.pair(x);
    let target = pair_module(poset, x)?;
    let print = target.fingerprint();
    let quotient_order = g.order() / pair.k.order();
    for entry in catalog.entries().iter().filter(|e| e.group.order() < g.order()) {
        let ph = PosetG::build(&entry.group);
        for y in 0..ph.len() {
            let other = ph.pair(y);
            if other.p.order() != pair.p.order() || entry.group.order() / other.k.order() != quotient_order {
                continue;
            }
            let cm = pair_module(&ph, y)?;
            if cm.fingerprint() == print && iso_search(&cm, &target).is_some() {
                return Ok(Some(Rule::SmallerLinked { group: entry.id.clone(), k: other.k.to_vec(), p: other.p.to_vec() }));
            }
        }
    }
    Ok(None)
}

/// Applies, in order: `K <= P`; `P < K`; `PK = G` with `K` not in `P`; the
/// normal-subgroup necessary condition; linkage to a smaller catalog group.
/// Without a decision, an incomplete catalog below `|G|` is an error.
pub fn reduced_status(g: &Arc<Group>, x: usize, catalog: &Catalog) -> Result<ReducedStatus> {
    let poset = PosetG::build(g);
    if x >= poset.len() {
        return Err(Error::NotInPoset);
    }
    let pair = poset.pair(x);
    let (k, p) = (pair.k.elems(), pair.p.elems());
    let status = |verdict, rule| Ok(ReducedStatus { pair: x, verdict, rule });
    if k.is_subset(p) {
        return status(Verdict::Reduced, Rule::KleP);
    }
    if p.is_subset(k) {
        return status(Verdict::NotReduced, Rule::PltK);
    }
    if g.product_set(p, k).len() == g.order() {
        return status(Verdict::NotReduced, Rule::PKeqG);
    }
    if g.normal_subgroups().iter().any(|n| n.order() > 1 && n.elems().is_subset(k) && n.elems().intersection(p).len() == 1) {
        return status(Verdict::NotReduced, Rule::NecessaryViolated);
    }
    if let Some(rule) = smaller_linked(g, &poset, x, catalog)? {
        return status(Verdict::NotReduced, rule);
    }
    catalog.smaller_than(g.order())?;
    status(Verdict::Undetermined, Rule::Exhausted)
}

/// Closed integer interval; `lo == hi` when all statuses are decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub class: Vec<usize>,
    pub n: usize,
    pub gamma_order: usize,
    pub irr_count: usize,
    pub verdict: Verdict,
    pub rule: Rule,
}

#[derive(Clone, Debug, Serialize)]
pub struct EssentialReport {
    pub group: String,
    pub statuses: Vec<ReducedStatus>,
    pub blocks: Vec<BlockReport>,
    pub covering_dim: usize,
    pub essential_dim: Interval,
    pub simple_modules: Interval,
    /// Predicted basis of the essential ideal (space indices), when every
    /// status is decided.
    pub predicted_ideal: Option<Vec<usize>>,
    /// Reading of the non-covering condition used for the prediction.
    pub ideal_condition: &'static str,
}

/// Verdict of a linkage class: reducedness is constant on classes, so any
/// decided member decides the class; conflicting members are an error.
pub fn class_verdict(statuses: &[ReducedStatus], class: &[usize]) -> Result<(Verdict, Rule)> {
    let decided: Vec<&ReducedStatus> = class.iter().map(|&x| &statuses[x]).filter(|s| s.verdict != Verdict::Undetermined).collect();
    match decided.first() {
        None => Ok((Verdict::Undetermined, Rule::Exhausted)),
        Some(first) => {
            if decided.iter().any(|s| s.verdict != first.verdict) {
                return Err(Error::DecompositionMismatch(format!("linked pairs {class:?} have conflicting reduced statuses")));
            }
            Ok((first.verdict, first.rule.clone()))
        }
    }
}

pub fn essential_report(g: &Arc<Group>, catalog: &Catalog) -> Result<EssentialReport> {
    let poset = PosetG::build(g);
    let partition = linkage_partition(g)?;
    let statuses = (0..poset.len()).map(|x| reduced_status(g, x, catalog)).collect::<Result<Vec<_>>>()?;
    let mut blocks = Vec::new();
    let mut pair_verdict = vec![Verdict::Undetermined; poset.len()];
    let (mut dim, mut simples) = (Interval { lo: 0, hi: 0 }, Interval { lo: 0, hi: 0 });
    for class in partition.classes() {
        let (verdict, rule) = class_verdict(&statuses, class)?;
        let gamma = GammaGroup::of_pair(g, class[0])?;
        let (n, order, irr) = (class.len(), gamma.order(), gamma.irreducible_count());
        match verdict {
            Verdict::Reduced => {
                dim.lo += n * n * order;
                simples.lo += irr;
            }
            Verdict::Undetermined => {}
            Verdict::NotReduced => {}
        }
        if verdict != Verdict::NotReduced {
            dim.hi += n * n * order;
            simples.hi += irr;
        }
        for &x in class {
            pair_verdict[x] = verdict;
        }
        blocks.push(BlockReport { class: class.clone(), n, gamma_order: order, irr_count: irr, verdict, rule });
    }
    let cov = covering_basis(g)?;
    let predicted_ideal = (!pair_verdict.contains(&Verdict::Undetermined)).then(|| predicted_ideal(g, &poset, &pair_verdict));
    Ok(EssentialReport {
        group: g.name().to_string(),
        statuses,
        blocks,
        covering_dim: cov.len(),
        essential_dim: dim,
        simple_modules: simples,
        predicted_ideal,
        ideal_condition: "p1(T) != G or k1(S) != 1, or else l0(T,S) not reduced",
    })
}

/// Basis classes of `Γ(G, G)` with `p1(T) != G` or `k1(S) != 1`, or with
/// `p1(T) = G`, `k1(S) = 1` and `l0(T, S)` not reduced.
fn predicted_ideal(g: &Arc<Group>, poset: &PosetG, verdicts: &[Verdict]) -> Vec<usize> {
    let space = GammaSpace::get(g, g).expect("space exists");
    let n = g.order();
    (0..space.dim())
        .filter(|&i| {
            let [l, _] = side_invariants(n, n, space.key(i));
            if l[0].len() != n || l[3].len() != 1 {
                return true;
            }
            let x = poset.index_of(&l[1], &l[2]).expect("l0 lies in the poset");
            verdicts[x] == Verdict::NotReduced
        })
        .collect()
}

/// Outcome of comparing the span of all products through smaller groups
/// with a coordinate subspace.
#[derive(Clone, Debug, Serialize)]
pub struct IdealComparison {
    pub products: usize,
    pub rank: usize,
    pub predicted: usize,
    /// Every product is supported on the predicted coordinates.
    pub contained: bool,
}

impl IdealComparison {
    pub fn equal(&self) -> bool {
        self.contained && self.rank == self.predicted
    }
}

/// Span of `a ∘ b` over basis elements `a ∈ Γ(G, H)`, `b ∈ Γ(H, G)` and all
/// catalog groups `H` smaller than `G`.
pub fn brute_force_ideal(g: &Arc<Group>, catalog: &Catalog) -> Result<RowSpace> {
    let gg = GammaSpace::get(g, g)?;
    let mut span = RowSpace::new();
    let mut seen: HashSet<Vec<(u32, u32)>> = HashSet::new();
    for entry in catalog.smaller_than(g.order())? {
        let gh = GammaSpace::get(g, &entry.group)?;
        let hg = GammaSpace::get(&entry.group, g)?;
        let comp = Composer::get(&gh, &hg)?;
        debug_assert!(comp.target().same_as(&gg));
        for i in 0..gh.dim() {
            for j in 0..hg.dim() {
                let terms = comp.compose_basis(i, j);
                if span.rank() == gg.dim() || !seen.insert(terms.clone()) {
                    continue;
                }
                let row: SparseRow =
                    terms.iter().map(|&(c, m)| (c as usize, BigRational::from_integer(BigInt::from(m)))).collect();
                span.insert(row);
            }
        }
    }
    Ok(span)
}

pub fn compare_ideal(span: &RowSpace, predicted: &[usize]) -> IdealComparison {
    let allowed: HashSet<usize> = predicted.iter().copied().collect();
    IdealComparison {
        products: span.rank(),
        rank: span.rank(),
        predicted: predicted.len(),
        contained: span.rows().all(|r| r.keys().all(|c| allowed.contains(c))),
    }
}

/// One reduced linkage class of one group.
#[derive(Clone, Debug, Serialize)]
pub struct SeedRow {
    pub group: String,
    pub order: usize,
    pub k: Vec<usize>,
    pub p: Vec<usize>,
    pub class_size: usize,
    /// Every pair of the `G`-linkage class, as `(K, P)`.
    pub members: Vec<(Vec<usize>, Vec<usize>)>,
    pub gamma_order: usize,
    pub irr_count: usize,
    /// Cross-group linkage class.
    pub linkage_id: usize,
}

/// Link from a row to the first row of its cross-group class.
#[derive(Clone, Debug, Serialize)]
pub struct SeedWitness {
    pub row: usize,
    pub root: usize,
    /// Canonical section of `G_root x G_row` exhibiting the linkage.
    pub t: Vec<usize>,
    pub s: Vec<usize>,
    /// Least element of the bimodule set, used for transport.
    pub bimodule_element: (Vec<usize>, Vec<usize>),
    /// Conjugacy class of `Γ_root` matched to each conjugacy class of `Γ_row`.
    pub class_transport: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedTable {
    pub rows: Vec<SeedRow>,
    /// Rows of each cross-group class.
    pub classes: Vec<Vec<usize>>,
    pub witnesses: Vec<SeedWitness>,
    /// Pairs of linked reduced rows from groups of different orders.
    pub order_violations: Vec<(usize, usize)>,
    /// Groups with undetermined statuses, whose rows may be incomplete.
    pub undetermined: Vec<String>,
}

pub fn seeds(catalog: &Catalog, max_order: usize) -> Result<SeedTable> {
    let mut rows = Vec::new();
    let mut groups: Vec<(Arc<Group>, usize)> = Vec::new();
    let mut undetermined = Vec::new();
    for entry in catalog.entries().iter().filter(|e| e.group.order() <= max_order) {
        let report = essential_report(&entry.group, catalog)?;
        if report.essential_dim.lo != report.essential_dim.hi {
            undetermined.push(entry.id.clone());
        }
        let poset = PosetG::build(&entry.group);
        for block in report.blocks.iter().filter(|b| b.verdict == Verdict::Reduced) {
            let rep = poset.pair(block.class[0]);
            groups.push((entry.group.clone(), block.class[0]));
            rows.push(SeedRow {
                group: entry.id.clone(),
                order: entry.group.order(),
                k: rep.k.to_vec(),
                p: rep.p.to_vec(),
                class_size: block.n,
                members: block.class.iter().map(|&x| (poset.pair(x).k.to_vec(), poset.pair(x).p.to_vec())).collect(),
                gamma_order: block.gamma_order,
                irr_count: block.irr_count,
                linkage_id: usize::MAX,
            });
        }
    }
    let modules: Vec<CrossedModule> =
        groups.iter().map(|(g, x)| pair_module(&PosetG::build(g), *x)).collect::<Result<_>>()?;
    let prints: Vec<CmFingerprint> = modules.iter().map(|m| m.fingerprint()).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut witnesses = Vec::new();
    let mut order_violations = Vec::new();
    for r in 0..rows.len() {
        let mut joined = false;
        for c in 0..classes.len() {
            let root = classes[c][0];
            if prints[root] != prints[r] {
                continue;
            }
            if rows[root].order != rows[r].order {
                if iso_search(&modules[r], &modules[root]).is_some() {
                    order_violations.push((root, r));
                }
                continue;
            }
            let (g, x) = &groups[root];
            let (h, y) = &groups[r];
            let (pg, ph) = (PosetG::build(g), PosetG::build(h));
            let (a, b) = (pg.pair(*x), ph.pair(*y));
            if let Some(link) = linked(g, &a.k, &a.p, h, &b.k, &b.p)? {
                let bimodule = bimodule_set(g, *x, h, *y)?;
                if bimodule.classes.is_empty() || !bimodule.is_free_and_transitive() {
                    return Err(Error::DecompositionMismatch("linked rows without a regular bimodule set".into()));
                }
                let map = bimodule.transport(0)?;
                let class_transport = transport_classes(bimodule.gamma_right.table(), bimodule.gamma_left.table(), &map)?;
                let key = bimodule.space.key(bimodule.classes[0]);
                witnesses.push(SeedWitness {
                    row: r,
                    root,
                    t: link.witness.section.t().to_vec(),
                    s: link.witness.section.s().to_vec(),
                    bimodule_element: (key.t.to_vec(), key.s.to_vec()),
                    class_transport,
                });
                classes[c].push(r);
                joined = true;
                break;
            }
        }
        if !joined {
            classes.push(vec![r]);
        }
    }
    for (id, class) in classes.iter().enumerate() {
        for &r in class {
            rows[r].linkage_id = id;
        }
    }
    Ok(SeedTable { rows, classes, witnesses, order_violations, undetermined })
}

/// Image of each conjugacy class of `source` under an isomorphism, as an
/// index into the conjugacy classes of `target`.
fn transport_classes(source: &Group, target: &Group, map: &[usize]) -> Result<Vec<usize>> {
    let target_classes = target.conjugacy_classes();
    let class_of: BTreeMap<usize, usize> =
        target_classes.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&x| (x, i))).collect();
    let mut out = Vec::new();
    for class in source.conjugacy_classes() {
        let images: HashSet<usize> = class.iter().map(|&x| class_of[&map[x]]).collect();
        if images.len() != 1 || target_classes[*images.iter().next().expect("one")].len() != class.len() {
            return Err(Error::DecompositionMismatch("transport does not match conjugacy classes".into()));
        }
        out.push(*images.iter().next().expect("one"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::parse_group_name;

    #[test]
    fn covering_counts() {
        let c1 = parse_group_name("C1").unwrap();
        assert_eq!(covering_basis(&c1).unwrap().len(), 1);
        let c2 = parse_group_name("C2").unwrap();
        let cov = covering_basis(&c2).unwrap();
        assert_eq!(cov.len(), 4);
        assert_eq!(cov.check_closure().unwrap(), 16);
        let s3 = parse_group_name("S3").unwrap();
        covering_basis(&s3).unwrap().check_closure().unwrap();
    }

    #[test]
    fn partitions() {
        let c2 = parse_group_name("C2").unwrap();
        let part = linkage_partition(&c2).unwrap();
        assert_eq!(part.len(), 4);
        assert_eq!(part.class_of(0), 0);
        assert!((0..part.len()).all(|c| part.class_leq(0, c)));
        let s3 = parse_group_name("S3").unwrap();
        let part = linkage_partition(&s3).unwrap();
        let ps = part.poset();
        let one_one = ps.index_of_pair(&s3.trivial_subgroup(), &s3.trivial_subgroup()).unwrap();
        let c3 = s3.subgroups().into_iter().find(|s| s.order() == 3).unwrap();
        let c3_one = ps.index_of_pair(&c3, &s3.trivial_subgroup()).unwrap();
        assert_ne!(part.class_of(one_one), part.class_of(c3_one));
    }

    #[test]
    fn gamma_groups_small() {
        let s3 = parse_group_name("S3").unwrap();
        let gam = gamma_group(&s3, &s3.trivial_subgroup(), &s3.whole()).unwrap();
        assert_eq!(gam.order(), 1);
        let c3 = parse_group_name("C3").unwrap();
        let gam = gamma_group(&c3, &c3.trivial_subgroup(), &c3.whole()).unwrap();
        assert_eq!(gam.order(), 2);
        let rep = gam.theta_report().unwrap();
        assert_eq!((rep.out_order, rep.gamma_order), (2, 2));
        let c4 = parse_group_name("C4").unwrap();
        for x in 0..PosetG::build(&c4).len() {
            let gam = GammaGroup::of_pair(&c4, x).unwrap();
            assert_eq!(gam.theta_report().unwrap().out_order, gam.order());
        }
    }

    #[test]
    fn bimodule_of_a_pair_with_itself() {
        let c4 = parse_group_name("C4").unwrap();
        let b = bimodule_set(&c4, 0, &c4, 0).unwrap();
        let mut own = GammaGroup::of_pair(&c4, 0).unwrap().elements().to_vec();
        own.sort_unstable();
        assert_eq!(b.classes, own);
        assert!(b.is_free_and_transitive());
        let last = PosetG::build(&c4).len() - 1;
        assert!(bimodule_set(&c4, 0, &c4, last).unwrap().classes.is_empty());
    }

    #[test]
    fn reduced_rules() {
        let cat = Catalog::build(8).unwrap();
        let q8 = cat.get("Q8").unwrap().clone();
        let x = PosetG::build(&q8).index_of_pair(&q8.subgroup_generated(&[2]), &q8.subgroup_generated(&[1])).unwrap();
        assert_eq!(reduced_status(&q8, x, &cat).unwrap().rule, Rule::KleP);
        let c2 = cat.get("C2").unwrap().clone();
        let y = PosetG::build(&c2).index_of_pair(&c2.whole(), &c2.trivial_subgroup()).unwrap();
        assert_eq!(reduced_status(&c2, y, &cat).unwrap().rule, Rule::PltK);
        let v4 = cat.get("C2xC2").unwrap().clone();
        let (a, b) = (v4.subgroup_generated(&[1]), v4.subgroup_generated(&[2]));
        let z = PosetG::build(&v4).index_of_pair(&a, &b).unwrap();
        let st = reduced_status(&v4, z, &cat).unwrap();
        assert_eq!((st.verdict, st.rule), (Verdict::NotReduced, Rule::PKeqG));
    }

    #[test]
    fn essential_dimension_of_cyclic_two() {
        let cat = Catalog::build(8).unwrap();
        let c2 = cat.get("C2").unwrap().clone();
        let rep = essential_report(&c2, &cat).unwrap();
        assert_eq!(rep.essential_dim, Interval { lo: 3, hi: 3 });
        let span = brute_force_ideal(&c2, &cat).unwrap();
        let cmp = compare_ideal(&span, rep.predicted_ideal.as_ref().unwrap());
        assert!(cmp.equal(), "{cmp:?}");
    }
}
