//! Executable checks of the structural identities, grouped into suites.
//!
//! Each check returns the number of identities it confirmed, or
//! `Error::IdentityFailed` naming the first violation.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{parse_group_name, Catalog};
use crate::classification::{
    brute_force_ideal, class_verdict, compare_ideal, essential_report, linkage_partition, pair_module, reduced_status,
    rule_verdicts, seeds, GammaGroup, IdealComparison, ReducedStatus, Rule, Verdict,
};
use crate::covering::{idempotent_report, matrix_decomposition};
use crate::crossed::{iso_search, linked, CrossedModule};
use crate::error::{Condition, Error, Result};
use crate::gamma::{factorize, identity, GammaElement, GammaSpace};
use crate::group::Group;
use crate::poset::PosetG;
use crate::sections::{
    enumerate_sections, goursat, product, s5_prime_left, section_from_goursat_pair, section_with_invariants_exists,
    subgroup_from_goursat, swap_set, Section,
};

fn fail<T>(msg: String) -> Result<T> {
    Err(Error::IdentityFailed(msg))
}

/// Groups by name, in order.
pub fn named(names: &[&str]) -> Result<Vec<Arc<Group>>> {
    names.iter().map(|n| parse_group_name(n)).collect()
}

/// For every subgroup `U` of `G x H`, `U` is rebuilt from its Goursat
/// correspondent. For every pair `(U1, U2)`, the section conditions accept
/// the pair of correspondents exactly when `U2 ⊴ U1`, and then rebuild
/// `(U1, U2)`. The commutator condition agrees with its quotient form on
/// both sides, and every section class satisfies the order equalities.
pub fn goursat_round_trip(g: &Arc<Group>, h: &Arc<Group>) -> Result<u64> {
    let x = product(g, h)?;
    let hg = product(h, g)?;
    let (ng, nh) = (g.order(), h.order());
    let subs = x.subgroups();
    let quints = subs.iter().map(|u| goursat(&x, u)).collect::<Result<Vec<_>>>()?;
    let swapped = subs
        .iter()
        .map(|u| goursat(&hg, &hg.subgroup_trusted(swap_set(ng, nh, u.elems()))))
        .collect::<Result<Vec<_>>>()?;
    let mut n = 0u64;
    for (u, q) in subs.iter().zip(&quints) {
        if subgroup_from_goursat(q) != *u {
            return fail(format!("subgroup {:?} of {} is not rebuilt from its correspondent", u.to_vec(), x.name()));
        }
        n += 1;
    }
    for (i, (u1, q1)) in subs.iter().zip(&quints).enumerate() {
        for (j, (u2, q2)) in subs.iter().zip(&quints).enumerate() {
            let is_section = x.normal_in_sets(u2.elems(), u1.elems());
            match section_from_goursat_pair(q1, q2) {
                Ok(s) => {
                    if !is_section || s.t() != u1 || s.s() != u2 {
                        return fail(format!("conditions accept ({i}, {j}) in {} wrongly", x.name()));
                    }
                }
                Err(Error::ConditionViolated(c)) => {
                    if is_section {
                        return fail(format!("section ({i}, {j}) of {} rejected by {c}", x.name()));
                    }
                    if c != Condition::S3 && c != Condition::S4 {
                        let left = g.commutator_sets(q1.k.elems(), q2.p.elems()).is_subset(q2.k.elems());
                        let right = h.commutator_sets(q1.l.elems(), q2.q.elems()).is_subset(q2.l.elems());
                        let left_prime = s5_prime_left(g, q1, q2);
                        let right_prime = s5_prime_left(h, &swapped[i], &swapped[j]);
                        if left != left_prime || right != right_prime || (c == Condition::S5) == (left && right) {
                            return fail(format!("S5 and its quotient form disagree at ({i}, {j}) in {}", x.name()));
                        }
                        n += 1;
                    }
                }
                Err(e) => return Err(e),
            }
            if is_section {
                let left_prime = s5_prime_left(g, q1, q2);
                let right_prime = s5_prime_left(h, &swapped[i], &swapped[j]);
                if !left_prime || !right_prime {
                    return fail(format!("section ({i}, {j}) of {} fails the quotient form of S5", x.name()));
                }
            }
            n += 1;
        }
    }
    for class in enumerate_sections(&x) {
        n += section_order_identities(g, h, &class.section)?;
    }
    Ok(n)
}

/// Order equalities between the two sides of a section, and `|G| <= |H|`
/// when `P_T = G`, `K_S = 1` and `K_T <= P_S`.
pub fn section_order_identities(g: &Group, h: &Group, s: &Section) -> Result<u64> {
    let inv = s.invariants()?;
    let (l, r) = (&inv.left, &inv.right);
    let meet = |a: &crate::Subgroup, b: &crate::Subgroup| a.elems().intersection(b.elems()).len();
    let left = [
        l.p_s.order() / meet(&l.p_s, &l.k_t),
        l.p_t.order() / g.product_set(l.p_s.elems(), l.k_t.elems()).len(),
        meet(&l.p_s, &l.k_t) / l.k_s.order(),
    ];
    let right = [
        r.p_s.order() / meet(&r.p_s, &r.k_t),
        r.p_t.order() / h.product_set(r.p_s.elems(), r.k_t.elems()).len(),
        meet(&r.p_s, &r.k_t) / r.k_s.order(),
    ];
    if left != right {
        return fail(format!("order equalities fail: {left:?} vs {right:?}"));
    }
    if l.p_t.order() == g.order() && l.k_s.is_trivial() && l.k_t.is_subgroup_of(&l.p_s) && g.order() > h.order() {
        return fail("a section with full left projection forces |G| <= |H|".into());
    }
    Ok(4)
}

fn assoc(a: &GammaElement, b: &GammaElement, c: &GammaElement) -> Result<bool> {
    Ok(a.compose(b)?.compose(c)? == a.compose(&b.compose(c)?)?)
}

/// `(a ∘ b) ∘ c = a ∘ (b ∘ c)` for all basis triples over all 4-tuples of groups.
pub fn associativity_exhaustive(groups: &[Arc<Group>]) -> Result<u64> {
    let mut n = 0;
    for g in groups {
        for h in groups {
            let gh = GammaSpace::get(g, h)?.basis();
            for k in groups {
                let hk = GammaSpace::get(h, k)?.basis();
                for m in groups {
                    let km = GammaSpace::get(k, m)?.basis();
                    for (_, a) in &gh {
                        for (_, b) in &hk {
                            let ab = a.compose(b)?;
                            for (_, c) in &km {
                                if ab.compose(c)? != a.compose(&b.compose(c)?)? {
                                    return fail(format!(
                                        "associativity fails over {}, {}, {}, {}",
                                        g.name(),
                                        h.name(),
                                        k.name(),
                                        m.name()
                                    ));
                                }
                                n += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(n)
}

fn random_basis(space: &Arc<GammaSpace>, rng: &mut ChaCha8Rng) -> GammaElement {
    GammaElement::basis_element(space, rng.gen_range(0..space.dim()))
}

/// Associativity on `count` random basis triples over random 4-tuples of groups.
pub fn associativity_random(groups: &[Arc<Group>], count: usize, seed: u64) -> Result<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let pick: Vec<&Arc<Group>> = (0..4).map(|_| &groups[rng.gen_range(0..groups.len())]).collect();
        let a = random_basis(&GammaSpace::get(pick[0], pick[1])?, &mut rng);
        let b = random_basis(&GammaSpace::get(pick[1], pick[2])?, &mut rng);
        let c = random_basis(&GammaSpace::get(pick[2], pick[3])?, &mut rng);
        if !assoc(&a, &b, &c)? {
            return fail(format!("random triple {i} is not associative"));
        }
    }
    Ok(count as u64)
}

/// Identity on both sides, `(x ∘ y)^op = y^op ∘ x^op`, and factorization
/// followed by composition returning the class, on every basis element of
/// `Γ(G, H)` (products with random partners).
pub fn gamma_ring_identities(g: &Arc<Group>, h: &Arc<Group>, seed: u64) -> Result<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = GammaSpace::get(g, h)?;
    let back = GammaSpace::get(h, g)?;
    let (idg, idh) = (identity(g)?, identity(h)?);
    let mut n = 0;
    for (_, x) in space.basis() {
        if idg.compose(&x)? != x || x.compose(&idh)? != x {
            return fail("identity is not two-sided".into());
        }
        let y = random_basis(&back, &mut rng);
        if x.compose(&y)?.opposite()? != y.opposite()?.compose(&x.opposite()?)? {
            return fail("opposite is not an anti-homomorphism".into());
        }
        let i = *x.coefficients().keys().next().expect("basis element");
        let [ind, inf, mid, def, res] = factorize(&space, i)?;
        if ind.compose(&inf)?.compose(&mid)?.compose(&def)?.compose(&res)? != x {
            return fail(format!("factorization of class {i} does not recompose"));
        }
        n += 3;
    }
    Ok(n)
}

/// `[S⊴T] ∘ [S⊴T]^op = |H:Q| E_(K,P)` for every covering section of `G x H`
/// with `l = (G, K, P, 1)` and `r = (H, L, Q, 1)`.
pub fn opposite_products(g: &Arc<Group>, h: &Arc<Group>) -> Result<u64> {
    let space = GammaSpace::get(g, h)?;
    let back = GammaSpace::get(h, g)?;
    let comp = crate::gamma::Composer::get(&space, &back)?;
    let target = comp.target().clone();
    let (ng, nh) = (g.order(), h.order());
    let mut n = 0;
    for i in 0..space.dim() {
        let section = Section::from_elems(
            crate::sections::product(g, h)?,
            &space.key(i).t.to_vec(),
            &space.key(i).s.to_vec(),
        )?;
        if !section.is_covering()? {
            continue;
        }
        let inv = section.invariants()?;
        let key = space.key(i);
        let op = back.index_of(swap_set(ng, nh, &key.t), swap_set(ng, nh, &key.s));
        let e = target.index_of(
            crate::sections::diagonal_mod_set(g, inv.left.k_t.elems()),
            crate::sections::diagonal_set(ng, inv.left.p_s.elems()),
        );
        let want = vec![(e as u32, (nh / inv.right.p_s.order()) as u32)];
        if comp.compose_basis(i, op) != want {
            return fail(format!("b b^op is not |H:Q| E for class {i} of {} x {}", g.name(), h.name()));
        }
        n += 1;
    }
    Ok(n)
}

/// `|Γ_(G,K,P)| = |Out(P, G/K, i_P)|` through the explicit Θ bijection, for every pair.
pub fn gamma_versus_out(g: &Arc<Group>) -> Result<u64> {
    let poset = PosetG::build(g);
    for x in 0..poset.len() {
        let rep = GammaGroup::of_pair(g, x)?.theta_report()?;
        if rep.out_order != rep.gamma_order || rep.aut_order != rep.out_order * rep.inn_order {
            return fail(format!("pair {x} of {}: |Out| = {}, |Γ| = {}", g.name(), rep.out_order, rep.gamma_order));
        }
    }
    Ok(poset.len() as u64)
}

/// Bimodule sets between members of each linkage class are free and
/// transitive on both sides, and transport is a group isomorphism.
pub fn bimodule_actions(g: &Arc<Group>) -> Result<u64> {
    let part = linkage_partition(g)?;
    let mut n = 0;
    for class in part.classes() {
        for &x in class {
            let set = crate::classification::bimodule_set(g, class[0], g, x)?;
            if !set.is_free_and_transitive() {
                return fail(format!("bimodule set ({}, {x}) of {} is not regular", class[0], g.name()));
            }
            set.transport(0)?;
            n += 1;
        }
    }
    Ok(n)
}

/// Statistics of the two linkage tests over all pairs of triples.
#[derive(Clone, Debug, Default, Serialize)]
pub struct LinkageAgreement {
    pub triples: usize,
    pub pairs: u64,
    pub linked: u64,
}

/// Crossed module isomorphism against existence of a section with
/// prescribed invariants, on every unordered pair of triples.
pub fn linkage_equivalence(groups: &[Arc<Group>]) -> Result<LinkageAgreement> {
    let mut triples: Vec<(Arc<Group>, usize, CrossedModule)> = Vec::new();
    for g in groups {
        let poset = PosetG::build(g);
        for x in 0..poset.len() {
            triples.push((g.clone(), x, pair_module(&poset, x)?));
        }
    }
    let mut out = LinkageAgreement { triples: triples.len(), ..Default::default() };
    for i in 0..triples.len() {
        for j in i..triples.len() {
            let (g, x, cx) = &triples[i];
            let (h, y, cy) = &triples[j];
            let by_module = iso_search(cy, cx).is_some();
            let (a, b) = (PosetG::build(g), PosetG::build(h));
            let (pa, pb) = (a.pair(*x), b.pair(*y));
            let by_section = section_with_invariants_exists(g, &pa.k, &pa.p, h, &pb.k, &pb.p)?;
            if by_module != by_section {
                return fail(format!(
                    "({}, {x}) and ({}, {y}): module test {by_module}, section test {by_section}",
                    g.name(),
                    h.name()
                ));
            }
            out.pairs += 1;
            out.linked += by_module as u64;
        }
    }
    Ok(out)
}

/// No pair gets both verdicts from the rules, the first firing rule is the
/// reported status, statuses are constant on linkage classes, reduced
/// pairs form a lower set, and every `(1, P)` is reduced.
pub fn reduced_consistency(g: &Arc<Group>, catalog: &Catalog) -> Result<u64> {
    let poset = PosetG::build(g);
    let mut statuses: Vec<ReducedStatus> = Vec::new();
    for x in 0..poset.len() {
        let fired = rule_verdicts(g, x, catalog)?;
        let reduced = fired.iter().any(|(_, v)| *v == Verdict::Reduced);
        let not = fired.iter().any(|(_, v)| *v == Verdict::NotReduced);
        if reduced && not {
            return fail(format!("pair {x} of {} is both reduced and not reduced: {fired:?}", g.name()));
        }
        let status = reduced_status(g, x, catalog)?;
        match fired.first() {
            Some((rule, verdict)) if (rule, verdict) != (&status.rule, &status.verdict) => {
                return fail(format!("pair {x} of {}: status {status:?} is not the first rule {rule:?}", g.name()));
            }
            None if status.verdict != Verdict::Undetermined => {
                return fail(format!("pair {x} of {} decided without a rule", g.name()));
            }
            _ => {}
        }
        if poset.pair(x).k.is_trivial() && status.verdict != Verdict::Reduced {
            return fail(format!("pair {x} of {} with trivial K is not reduced", g.name()));
        }
        statuses.push(status);
    }
    for x in 0..poset.len() {
        for y in poset.poset().upper_set(x) {
            if statuses[y].verdict == Verdict::Reduced && statuses[x].verdict == Verdict::NotReduced {
                return fail(format!("reduced pairs of {} are not a lower set at ({x}, {y})", g.name()));
            }
        }
    }
    for class in linkage_partition(g)?.classes() {
        class_verdict(&statuses, class)?;
    }
    Ok(poset.len() as u64)
}

/// Brute-force span of products through smaller groups against the
/// predicted coordinate subspace.
pub fn essential_oracle(g: &Arc<Group>, catalog: &Catalog) -> Result<IdealComparison> {
    let report = essential_report(g, catalog)?;
    let predicted = report
        .predicted_ideal
        .ok_or_else(|| Error::IdentityFailed(format!("statuses of {} are not all decided", g.name())))?;
    let span = brute_force_ideal(g, catalog)?;
    Ok(compare_ideal(&span, &predicted))
}

/// The quaternion and dihedral pairs of order 8 with cyclic `P` of order 4.
#[derive(Clone, Debug, Serialize)]
pub struct QuaternionDihedralReport {
    pub t_order: usize,
    pub s_order: usize,
    pub left: [Vec<usize>; 4],
    pub right: [Vec<usize>; 4],
    pub quaternion_status: ReducedStatus,
    pub dihedral_status: ReducedStatus,
    pub linked: bool,
    /// Seed rows of the two pairs and their cross-group class ids.
    pub rows: (usize, usize),
    pub linkage_ids: (usize, usize),
    pub gamma_orders: (usize, usize),
    pub irr_counts: (usize, usize),
}

/// `T = <(x, a), (y, b)>`, `S = <(x, a)>` in `Q8 x D8`.
pub fn quaternion_dihedral(catalog: &Catalog) -> Result<QuaternionDihedralReport> {
    let q8 = catalog.get("Q8").ok_or_else(|| Error::Invalid("catalog lacks Q8".into()))?.clone();
    let d8 = catalog.get("D8").ok_or_else(|| Error::Invalid("catalog lacks D8".into()))?.clone();
    // Q8: x = 1, y = 4. D8: a = 1, b = 4.
    let (x, y, a, b) = (1, 4, 1, 4);
    let ambient = product(&q8, &d8)?;
    let n = d8.order();
    let t = ambient.subgroup_generated(&[x * n + a, y * n + b]);
    let s = ambient.subgroup_generated(&[x * n + a]);
    let section = Section::new(ambient, t, s)?;
    let inv = section.invariants()?;
    let four = |side: &crate::sections::Invariants4| {
        [side.p_t.to_vec(), side.k_t.to_vec(), side.p_s.to_vec(), side.k_s.to_vec()]
    };
    let (k, p) = (q8.subgroup_generated(&[q8.mul(x, x)]), q8.subgroup_generated(&[x]));
    let (l, q) = (d8.subgroup_generated(&[d8.mul(a, a)]), d8.subgroup_generated(&[a]));
    let xq = PosetG::build(&q8).index_of_pair(&k, &p)?;
    let xd = PosetG::build(&d8).index_of_pair(&l, &q)?;
    let table = seeds(catalog, 8)?;
    let find = |id: &str, k: &crate::Subgroup, p: &crate::Subgroup| {
        table
            .rows
            .iter()
            .position(|r| r.group == id && r.members.iter().any(|(mk, mp)| *mk == k.to_vec() && *mp == p.to_vec()))
            .ok_or_else(|| Error::IdentityFailed(format!("no seed row for the {id} pair")))
    };
    let (rq, rd) = (find("Q8", &k, &p)?, find("D8", &l, &q)?);
    let (sq, sd) = (&table.rows[rq], &table.rows[rd]);
    Ok(QuaternionDihedralReport {
        t_order: section.t().order(),
        s_order: section.s().order(),
        left: four(&inv.left),
        right: four(&inv.right),
        quaternion_status: reduced_status(&q8, xq, catalog)?,
        dihedral_status: reduced_status(&d8, xd, catalog)?,
        linked: linked(&q8, &k, &p, &d8, &l, &q)?.is_some(),
        rows: (rq, rd),
        linkage_ids: (sq.linkage_id, sd.linkage_id),
        gamma_orders: (sq.gamma_order, sd.gamma_order),
        irr_counts: (sq.irr_count, sd.irr_count),
    })
}

impl QuaternionDihedralReport {
    /// The invariants, both statuses and the merged seed row.
    pub fn check(&self, q8: &Group, d8: &Group) -> Result<()> {
        let sub = |g: &Group, gens: &[usize]| g.subgroup_generated(gens).to_vec();
        let left = [(0..8).collect(), sub(q8, &[2]), sub(q8, &[1]), vec![0]];
        let right = [(0..8).collect(), sub(d8, &[2]), sub(d8, &[1]), vec![0]];
        if self.left != left || self.right != right {
            return fail(format!("invariants {:?} / {:?}", self.left, self.right));
        }
        if (self.t_order, self.s_order) != (16, 4) {
            return fail(format!("|T| = {}, |S| = {}", self.t_order, self.s_order));
        }
        if self.quaternion_status.verdict != Verdict::Reduced || self.dihedral_status.verdict != Verdict::Reduced {
            return fail("the pairs are not both reduced".into());
        }
        if self.quaternion_status.rule != Rule::KleP || !self.linked {
            return fail("expected K <= P and a linkage".into());
        }
        if self.linkage_ids.0 != self.linkage_ids.1
            || self.gamma_orders.0 != self.gamma_orders.1
            || self.irr_counts.0 != self.irr_counts.1
        {
            return fail(format!("seed rows not merged consistently: {self:?}"));
        }
        Ok(())
    }
}

/// One named check in a suite.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub count: u64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    /// The identities the suite exercises.
    pub identity: &'static str,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const SUITES: [&str; 11] = [
    "goursat",
    "mackey",
    "gamma-ring",
    "idempotents",
    "gamma",
    "decompose",
    "essential",
    "q8d8",
    "linkage",
    "reduced",
    "seeds",
];

/// The decomposition suite skips groups whose covering algebra is larger
/// (among groups of order at most 8, only `C2xC2xC2`).
pub const DECOMPOSE_DIM_LIMIT: usize = 4096;

/// What each suite establishes.
pub fn suite_identity(suite: &str) -> Option<&'static str> {
    Some(match suite {
        "goursat" => "Goursat correspondence for sections, quotient form of the commutator condition, order equalities",
        "mackey" => "associativity of the Mackey composition",
        "gamma-ring" => "two-sided identity, opposite anti-homomorphism, factorization, b∘b^op = |H:Q|·E",
        "idempotents" => "e/f idempotent calculus, central class idempotents, Σ f = 1",
        "gamma" => "Γ-group isomorphic to Out of the crossed module, regular bimodule actions",
        "decompose" => "covering algebra as a product of matrix algebras over group algebras of Γ",
        "essential" => "essential ideal spanned by products through smaller groups",
        "q8d8" => "linked reduced pairs of the quaternion and dihedral groups of order 8",
        "linkage" => "crossed module isomorphism equals existence of a covering section",
        "reduced" => "consistency of the reducedness rules",
        "seeds" => "linked reduced pairs have groups of equal order",
        _ => return None,
    })
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub max_order: usize,
    pub seed: u64,
    pub random_triples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_order: 8, seed: 0, random_triples: 1000 }
    }
}

fn outcome(name: String, r: Result<u64>) -> CheckOutcome {
    match r {
        Ok(count) => CheckOutcome { name, passed: true, count, detail: String::new() },
        Err(e) => CheckOutcome { name, passed: false, count: 0, detail: e.to_string() },
    }
}

/// Runs one suite over catalog groups of order at most `max_order`.
pub fn run_suite(suite: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    let catalog = Catalog::build(opts.max_order.min(8))?;
    let groups: Vec<Arc<Group>> =
        catalog.entries().iter().filter(|e| e.group.order() <= opts.max_order).map(|e| e.group.clone()).collect();
    let ids: Vec<String> =
        catalog.entries().iter().filter(|e| e.group.order() <= opts.max_order).map(|e| e.id.clone()).collect();
    let mut checks = Vec::new();
    let each = |checks: &mut Vec<CheckOutcome>, label: &str, f: &dyn Fn(&Arc<Group>) -> Result<u64>| {
        for (g, id) in groups.iter().zip(&ids) {
            checks.push(outcome(format!("{label} {id}"), f(g)));
        }
    };
    match suite {
        "goursat" => {
            let small: Vec<(&Arc<Group>, &String)> =
                groups.iter().zip(&ids).filter(|(g, _)| g.order() <= 4 || g.name() == "S3").collect();
            for (g, a) in &small {
                for (h, b) in &small {
                    checks.push(outcome(format!("round trip {a} x {b}"), goursat_round_trip(g, h)));
                }
            }
        }
        "mackey" => {
            let tiny: Vec<Arc<Group>> = groups.iter().filter(|g| g.order() <= 3).cloned().collect();
            checks.push(outcome("associativity, exhaustive, order <= 3".into(), associativity_exhaustive(&tiny)));
            checks.push(outcome(
                format!("associativity, {} random triples", opts.random_triples),
                associativity_random(&groups, opts.random_triples, opts.seed),
            ));
        }
        "gamma-ring" => {
            for (g, a) in groups.iter().zip(&ids) {
                for (h, b) in groups.iter().zip(&ids) {
                    if g.order() * h.order() <= 24 {
                        checks.push(outcome(format!("identity, opposite, factorization {a} x {b}"), gamma_ring_identities(g, h, opts.seed)));
                    }
                    checks.push(outcome(format!("b b^op {a} x {b}"), opposite_products(g, h)));
                }
            }
        }
        "idempotents" => each(&mut checks, "idempotent calculus", &|g| {
            Ok(idempotent_report(g)?.checks.values().sum())
        }),
        "gamma" => {
            each(&mut checks, "Γ versus Out", &gamma_versus_out);
            each(&mut checks, "bimodule actions", &bimodule_actions);
        }
        "decompose" => {
            for (g, id) in groups.iter().zip(&ids) {
                if crate::classification::covering_basis(g)?.len() <= DECOMPOSE_DIM_LIMIT {
                    let r = matrix_decomposition(g).map(|d| d.blocks.len() as u64);
                    checks.push(outcome(format!("matrix decomposition {id}"), r));
                }
            }
        }
        "essential" => {
            for (g, id) in groups.iter().zip(&ids).filter(|(g, _)| g.order() <= 6) {
                let r = essential_oracle(g, &catalog).and_then(|c| {
                    if c.equal() {
                        Ok(c.rank as u64)
                    } else {
                        fail(format!("{c:?}"))
                    }
                });
                checks.push(outcome(format!("essential ideal {id}"), r));
            }
        }
        "q8d8" => {
            let r = if opts.max_order < 8 {
                Err(Error::Invalid("needs max order 8".into()))
            } else {
                quaternion_dihedral(&catalog).and_then(|rep| {
                    rep.check(catalog.get("Q8").expect("Q8"), catalog.get("D8").expect("D8"))?;
                    Ok(1)
                })
            };
            checks.push(outcome("quaternion and dihedral pairs".into(), r));
        }
        "linkage" => {
            let r = linkage_equivalence(&groups).map(|a| a.pairs);
            checks.push(outcome("module linkage equals section linkage".into(), r));
        }
        "reduced" => each(&mut checks, "reduced rules", &|g| reduced_consistency(g, &catalog)),
        "seeds" => {
            let r = seeds(&catalog, opts.max_order).and_then(|t| {
                if t.order_violations.is_empty() {
                    Ok(t.rows.len() as u64)
                } else {
                    fail(format!("linked reduced pairs of different orders: {:?}", t.order_violations))
                }
            });
            checks.push(outcome("linked reduced pairs have equal orders".into(), r));
        }
        other => return Err(Error::Invalid(format!("unknown suite {other:?}"))),
    }
    let identity = suite_identity(suite).expect("known suite");
    Ok(SuiteReport { suite: suite.to_string(), identity, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn goursat_small_products() {
        let gs = named(&["C1", "C2", "S3"]).unwrap();
        for g in &gs {
            for h in &gs {
                assert!(goursat_round_trip(g, h).unwrap() > 0);
            }
        }
    }

    #[test]
    fn associativity_tiny() {
        let gs = named(&["C1", "C2"]).unwrap();
        assert!(associativity_exhaustive(&gs).unwrap() > 0);
        let more = named(&["C2", "C3", "S3"]).unwrap();
        assert_eq!(associativity_random(&more, 20, 7).unwrap(), 20);
    }

    #[test]
    fn linkage_agrees_on_small_groups() {
        let gs = named(&["C1", "C2", "C3", "C4", "C2xC2", "S3"]).unwrap();
        let rep = linkage_equivalence(&gs).unwrap();
        assert!(rep.linked >= rep.triples as u64);
    }

    #[test]
    fn reduced_rules_on_small_groups() {
        let cat = Catalog::build(6).unwrap();
        for e in cat.entries() {
            reduced_consistency(&e.group, &cat).unwrap();
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &VerifyOptions::default()).is_err());
    }
}
