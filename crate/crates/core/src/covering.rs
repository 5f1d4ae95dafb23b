//! Integer tables for the idempotents of the covering algebra `E_G^c`.
//!
//! Vectors are scaled by `|G|` so that all arithmetic stays integral:
//! `Ẽ_x = |P_x| E_x = |G| e_x` and `F_x = Σ_{v ⪰ x} μ(x, v) Ẽ_v = |G| f_x`.
//! Products of `E_u` with a covering class are single classes, so the
//! tables store one `(position, multiplicity)` per entry.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::classification::{bimodule_set, covering_basis, linkage_partition, CoveringBasis, GammaGroup, LinkagePartition};
use crate::error::{Error, Result};
use crate::gamma::{identity, Composer};
use crate::group::Group;
use crate::linalg::{RowSpace, SparseRow};
use crate::poset::PosetG;
use crate::sections::swap_set;

/// Sparse integer vector over covering positions, sorted, without zeros.
pub type Vector = Vec<(u32, i64)>;

fn fail<T>(msg: String) -> Result<T> {
    Err(Error::IdentityFailed(msg))
}

/// Dense accumulator that remembers which positions it touched.
struct Acc {
    vals: Vec<i64>,
    seen: Vec<bool>,
    touched: Vec<u32>,
}

impl Acc {
    fn new(n: usize) -> Self {
        Acc { vals: vec![0; n], seen: vec![false; n], touched: Vec::new() }
    }

    fn add(&mut self, pos: u32, v: i64) {
        let p = pos as usize;
        if !self.seen[p] {
            self.seen[p] = true;
            self.touched.push(pos);
        }
        self.vals[p] += v;
    }

    fn take(&mut self) -> Vector {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &p in &self.touched {
            let v = std::mem::take(&mut self.vals[p as usize]);
            self.seen[p as usize] = false;
            if v != 0 {
                out.push((p, v));
            }
        }
        self.touched.clear();
        out
    }
}

fn scaled(v: &[(u32, i64)], c: i64) -> Vector {
    if c == 0 {
        return Vec::new();
    }
    v.iter().map(|&(p, x)| (p, x * c)).collect()
}

/// `rows x m` entries of single `(position, multiplicity)` terms, with the
/// rare multi-term results kept aside. Multiplicity 0 marks an aside entry.
struct SideTable {
    m: usize,
    single: Vec<(u32, u32)>,
    multi: HashMap<usize, Vec<(u32, u32)>>,
}

impl SideTable {
    fn get(&self, row: usize, col: usize) -> &[(u32, u32)] {
        let i = row * self.m + col;
        let e = &self.single[i];
        if e.1 == 0 {
            &self.multi[&i]
        } else {
            std::slice::from_ref(e)
        }
    }
}

/// Which side of the product carries the `E` element.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `E_u ∘ c`
    Left,
    /// `c ∘ E_v`
    Right,
}

pub struct CoveringEngine {
    cov: Arc<CoveringBasis>,
    partition: Arc<LinkagePartition>,
    poset: Arc<PosetG>,
    order: i64,
    p_order: Vec<i64>,
    /// Covering position of `E_x`.
    e_pos: Vec<u32>,
    /// `E_u ∘ E_v` in covering positions.
    ee: Vec<Vec<Vec<(u32, u32)>>>,
    /// `|P_u \ G / P_v|`
    dc: Vec<Vec<i64>>,
    /// `F_x` as `(x', coefficient of E_x')`.
    f: Vec<Vec<(usize, i64)>>,
    /// `F_C` per linkage class.
    fc: Vec<Vec<(usize, i64)>>,
    left: OnceLock<SideTable>,
    right: OnceLock<SideTable>,
    /// `F_C ∘ c` and `c ∘ F_C` for every covering `c`, nonzero classes only.
    lf: OnceLock<Vec<Vec<(u16, Vector)>>>,
    rf: OnceLock<Vec<Vec<(u16, Vector)>>>,
}

impl std::fmt::Debug for CoveringEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CoveringEngine({:?})", self.cov)
    }
}

impl CoveringEngine {
    pub fn get(g: &Arc<Group>) -> Result<Arc<CoveringEngine>> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CoveringEngine>>>> = OnceLock::new();
        let map = CACHE.get_or_init(Default::default);
        if let Some(e) = map.lock().expect("engine cache").get(&g.fingerprint()) {
            return Ok(e.clone());
        }
        let e = Arc::new(Self::build(g)?);
        Ok(map.lock().expect("engine cache").entry(g.fingerprint()).or_insert(e).clone())
    }

    fn build(g: &Arc<Group>) -> Result<CoveringEngine> {
        let cov = covering_basis(g)?;
        let partition = linkage_partition(g)?;
        let poset = cov.poset().clone();
        let m = poset.len();
        let p_order: Vec<i64> = poset.pairs().iter().map(|p| p.p.order() as i64).collect();
        let e_pos = (0..m)
            .map(|x| {
                cov.position(cov.e_index(x))
                    .map(|p| p as u32)
                    .ok_or_else(|| Error::IdentityFailed(format!("E of pair {x} is not covering")))
            })
            .collect::<Result<Vec<_>>>()?;
        let comp = Composer::get(cov.space(), cov.space())?;
        let to_pos = |terms: Vec<(u32, u32)>| -> Result<Vec<(u32, u32)>> {
            terms
                .into_iter()
                .map(|(c, k)| match cov.position(c as usize) {
                    Some(p) => Ok((p as u32, k)),
                    None => fail(format!("product leaves the covering span at class {c}")),
                })
                .collect()
        };
        let ee = (0..m)
            .map(|u| (0..m).map(|v| to_pos(comp.compose_basis(cov.e_index(u), cov.e_index(v)))).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let dc = (0..m)
            .map(|u| {
                (0..m).map(|v| g.double_coset_reps(poset.pair(u).p.elems(), poset.pair(v).p.elems()).len() as i64).collect()
            })
            .collect();
        let mobius = poset.mobius();
        let f: Vec<Vec<(usize, i64)>> = (0..m)
            .map(|x| {
                poset.poset().upper_set(x).map(|v| (v, mobius.get(x, v) * p_order[v])).filter(|&(_, c)| c != 0).collect()
            })
            .collect();
        let fc = partition
            .classes()
            .iter()
            .map(|class| {
                let mut sum: BTreeMap<usize, i64> = BTreeMap::new();
                for &x in class {
                    for &(v, c) in &f[x] {
                        *sum.entry(v).or_default() += c;
                    }
                }
                sum.into_iter().filter(|&(_, c)| c != 0).collect()
            })
            .collect();
        Ok(CoveringEngine {
            order: g.order() as i64,
            cov,
            partition,
            poset,
            p_order,
            e_pos,
            ee,
            dc,
            f,
            fc,
            left: OnceLock::new(),
            right: OnceLock::new(),
            lf: OnceLock::new(),
            rf: OnceLock::new(),
        })
    }

    pub fn covering(&self) -> &Arc<CoveringBasis> {
        &self.cov
    }

    pub fn partition(&self) -> &Arc<LinkagePartition> {
        &self.partition
    }

    fn table(&self, side: Side) -> Result<&SideTable> {
        let cell = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        if let Some(t) = cell.get() {
            return Ok(t);
        }
        let t = self.build_table(side)?;
        Ok(cell.get_or_init(|| t))
    }

    fn build_table(&self, side: Side) -> Result<SideTable> {
        let cov = &self.cov;
        let comp = Composer::get(cov.space(), cov.space())?;
        let m = self.poset.len();
        let e_idx: Vec<usize> = (0..m).map(|x| cov.e_index(x)).collect();
        let mut single = Vec::with_capacity(cov.len() * m);
        let mut multi = HashMap::new();
        for c in 0..cov.len() {
            let ci = cov.index(c);
            for &e in &e_idx {
                let terms = match side {
                    Side::Left => comp.compose_basis(e, ci),
                    Side::Right => comp.compose_basis(ci, e),
                };
                let mut terms_pos = Vec::with_capacity(terms.len());
                for (t, k) in terms {
                    match cov.position(t as usize) {
                        Some(p) => terms_pos.push((p as u32, k)),
                        None => return fail(format!("product of covering class {ci} with E leaves the covering span")),
                    }
                }
                if let [one] = terms_pos[..] {
                    single.push(one);
                } else {
                    multi.insert(single.len(), terms_pos);
                    single.push((0, 0));
                }
            }
        }
        Ok(SideTable { m, single, multi })
    }

    /// `Σ a_u b_v E_u ∘ E_v` for combinations of `E` elements.
    fn mul_e(&self, acc: &mut Acc, a: &[(usize, i64)], b: &[(usize, i64)]) -> Vector {
        for &(u, x) in a {
            for &(v, y) in b {
                for &(p, k) in &self.ee[u][v] {
                    acc.add(p, x * y * k as i64);
                }
            }
        }
        acc.take()
    }

    fn e_vector(&self, combo: &[(usize, i64)]) -> Vector {
        let mut v: Vector = combo.iter().map(|&(x, c)| (self.e_pos[x], c)).filter(|&(_, c)| c != 0).collect();
        v.sort_unstable();
        v
    }

    fn e_tilde(&self, x: usize) -> Vec<(usize, i64)> {
        vec![(x, self.p_order[x])]
    }

    /// `E_u ∘ E_v = |P_u\G/P_v| E_{u∨v}`, the scaled join identity
    /// `|P_u||P_v||P_u\G/P_v| = |G||P_{u∨v}|`, and `E_(1,G)` is the identity.
    pub fn check_e_products(&self) -> Result<u64> {
        let m = self.poset.len();
        let mut n = 0;
        for u in 0..m {
            for v in 0..m {
                let j = self.poset.join(u, v);
                if self.ee[u][v] != [(self.e_pos[j], self.dc[u][v] as u32)] {
                    return fail(format!("E_{u} E_{v} = {:?}, expected {} E_{j}", self.ee[u][v], self.dc[u][v]));
                }
                if self.p_order[u] * self.p_order[v] * self.dc[u][v] != self.order * self.p_order[j] {
                    return fail(format!("e_{u} e_{v} is not e of the join"));
                }
                n += 2;
            }
        }
        let id = identity(self.cov.group())?;
        let id_idx = *id.coefficients().keys().next().expect("identity has one class");
        if self.cov.position(id_idx) != Some(self.e_pos[0] as usize) {
            return fail("E_(1,G) is not the identity".into());
        }
        Ok(n + 1)
    }

    /// For every covering `b` and pair `u`: `E_u ∘ b` is one class with
    /// multiplicity `|P_u\G/p1(S)|` and `l0 = u ∨ l0(b)`, equal to
    /// `|G:P_u| b` when `u ⪯ l0(b)`; mirrored on the right.
    pub fn check_side_actions(&self) -> Result<u64> {
        let (left, right) = (self.table(Side::Left)?, self.table(Side::Right)?);
        let cov = &self.cov;
        let m = self.poset.len();
        let mut n = 0;
        for b in 0..cov.len() {
            let (lb, rb) = (cov.l0(b), cov.r0(b));
            for u in 0..m {
                let (dl, dr) = (self.dc[u][lb], self.dc[rb][u]);
                let (l, r) = (left.get(b, u), right.get(b, u));
                let [(cl, kl)] = l else { return fail(format!("E_{u} b_{b} has {} terms", l.len())) };
                let [(cr, kr)] = r else { return fail(format!("b_{b} E_{u} has {} terms", r.len())) };
                if *kl as i64 != dl || cov.l0(*cl as usize) != self.poset.join(u, lb) {
                    return fail(format!("E_{u} b_{b} has wrong multiplicity or left invariant"));
                }
                if *kr as i64 != dr || cov.r0(*cr as usize) != self.poset.join(rb, u) {
                    return fail(format!("b_{b} E_{u} has wrong multiplicity or right invariant"));
                }
                let index = self.order / self.p_order[u];
                if self.poset.leq(u, lb) && (*cl as usize != b || dl != index) {
                    return fail(format!("E_{u} b_{b} is not |G:P| b although u precedes l0(b)"));
                }
                if self.poset.leq(u, rb) && (*cr as usize != b || dr != index) {
                    return fail(format!("b_{b} E_{u} is not |G:P| b although u precedes r0(b)"));
                }
                n += 2;
            }
        }
        Ok(n)
    }

    /// `b ∘ b^op = |G:p2(S)| E_{l0(b)}` for every covering `b`.
    pub fn check_opposites(&self) -> Result<u64> {
        let cov = &self.cov;
        let space = cov.space();
        let comp = Composer::get(space, space)?;
        let n = cov.group().order();
        for b in 0..cov.len() {
            let key = space.key(cov.index(b));
            let op = space.index_of(swap_set(n, n, &key.t), swap_set(n, n, &key.s));
            let got = comp.compose_basis(cov.index(b), op);
            let mult = self.order / self.p_order[cov.r0(b)];
            if got != [(cov.e_index(cov.l0(b)) as u32, mult as u32)] {
                return fail(format!("b_{b} b_{b}^op = {got:?}"));
            }
        }
        Ok(cov.len() as u64)
    }

    /// `e_x f_y = f_y e_x = [x ⪯ y] f_y`, `f_x f_y = δ f_x` and `Σ f_x = 1`.
    pub fn check_pair_idempotents(&self) -> Result<u64> {
        let m = self.poset.len();
        let mut acc = Acc::new(self.cov.len());
        let fv: Vec<Vector> = self.f.iter().map(|f| self.e_vector(f)).collect();
        let mut n = 0;
        for x in 0..m {
            let ex = self.e_tilde(x);
            for y in 0..m {
                let want = if self.poset.leq(x, y) { scaled(&fv[y], self.order) } else { Vec::new() };
                if self.mul_e(&mut acc, &ex, &self.f[y]) != want || self.mul_e(&mut acc, &self.f[y], &ex) != want {
                    return fail(format!("e_{x} f_{y} or f_{y} e_{x} is wrong"));
                }
                let want = if x == y { scaled(&fv[x], self.order) } else { Vec::new() };
                if self.mul_e(&mut acc, &self.f[x], &self.f[y]) != want {
                    return fail(format!("f_{x} f_{y} is wrong"));
                }
                n += 3;
            }
        }
        for f in &self.f {
            for &(v, c) in f {
                acc.add(self.e_pos[v], c);
            }
        }
        if acc.take() != vec![(self.e_pos[0], self.order)] {
            return fail("the f idempotents do not sum to 1".into());
        }
        Ok(n + 1)
    }

    /// Class sums: `e_C f_C' = f_C' e_C = 0` unless `C ⪯ C'`, `e_C f_C = f_C`,
    /// `f_C f_C' = δ f_C`.
    pub fn check_class_idempotents(&self) -> Result<u64> {
        let classes = self.partition.classes();
        let mut acc = Acc::new(self.cov.len());
        let ec: Vec<Vec<(usize, i64)>> = classes.iter().map(|c| c.iter().map(|&x| (x, self.p_order[x])).collect()).collect();
        let fcv: Vec<Vector> = self.fc.iter().map(|f| self.e_vector(f)).collect();
        let mut n = 0;
        for c in 0..classes.len() {
            for d in 0..classes.len() {
                let ef = self.mul_e(&mut acc, &ec[c], &self.fc[d]);
                let fe = self.mul_e(&mut acc, &self.fc[d], &ec[c]);
                if !self.partition.class_leq(c, d) && (!ef.is_empty() || !fe.is_empty()) {
                    return fail(format!("e_C{c} f_C{d} is nonzero for incomparable classes"));
                }
                if c == d && (ef != scaled(&fcv[c], self.order) || fe != ef) {
                    return fail(format!("e_C{c} f_C{c} is not f_C{c}"));
                }
                let want = if c == d { scaled(&fcv[c], self.order) } else { Vec::new() };
                if self.mul_e(&mut acc, &self.fc[c], &self.fc[d]) != want {
                    return fail(format!("f_C{c} f_C{d} is wrong"));
                }
                n += 3;
            }
        }
        Ok(n)
    }

    fn class_products(&self, side: Side) -> Result<Vec<Vec<(u16, Vector)>>> {
        let table = self.table(side)?;
        let mut acc = Acc::new(self.cov.len());
        let mut out = Vec::with_capacity(self.cov.len());
        for b in 0..self.cov.len() {
            let mut row = Vec::new();
            for (c, f) in self.fc.iter().enumerate() {
                for &(u, coef) in f {
                    for &(p, k) in table.get(b, u) {
                        acc.add(p, coef * k as i64);
                    }
                }
                let v = acc.take();
                if !v.is_empty() {
                    row.push((c as u16, v));
                }
            }
            out.push(row);
        }
        Ok(out)
    }

    fn lf(&self) -> Result<&Vec<Vec<(u16, Vector)>>> {
        if let Some(t) = self.lf.get() {
            return Ok(t);
        }
        let t = self.class_products(Side::Left)?;
        Ok(self.lf.get_or_init(|| t))
    }

    fn rf(&self) -> Result<&Vec<Vec<(u16, Vector)>>> {
        if let Some(t) = self.rf.get() {
            return Ok(t);
        }
        let t = self.class_products(Side::Right)?;
        Ok(self.rf.get_or_init(|| t))
    }

    /// `f_C b = b f_C` for every class and covering `b`.
    pub fn check_central(&self) -> Result<u64> {
        let (lf, rf) = (self.lf()?, self.rf()?);
        for b in 0..self.cov.len() {
            if lf[b] != rf[b] {
                return fail(format!("class idempotents do not commute with b_{b}"));
            }
        }
        Ok((self.cov.len() * self.fc.len()) as u64)
    }

    /// `f_C b f_C' = 0` for distinct classes, computed as `f_C (b f_C')`
    /// from the stored one-sided products; also `f_C b f_C = f_C b`.
    pub fn check_block_orthogonality(&self) -> Result<u64> {
        let (lf, rf) = (self.lf()?, self.rf()?);
        let k = self.fc.len();
        let mut accs: Vec<Acc> = (0..k).map(|_| Acc::new(self.cov.len())).collect();
        let mut used = vec![false; k];
        let mut n = 0;
        for b in 0..self.cov.len() {
            for (cp, w) in &rf[b] {
                for &(d, x) in w {
                    for (c, v) in &lf[d as usize] {
                        let c = *c as usize;
                        used[c] = true;
                        for &(p, y) in v {
                            accs[c].add(p, x * y);
                        }
                    }
                }
                for c in 0..k {
                    if !used[c] {
                        continue;
                    }
                    used[c] = false;
                    let got = accs[c].take();
                    let want = if c == *cp as usize { scaled(w, self.order) } else { Vec::new() };
                    if got != want {
                        return fail(format!("f_C{c} b_{b} f_C{cp} is wrong"));
                    }
                }
                n += k as u64;
            }
            n += (k - rf[b].len()) as u64 * k as u64;
        }
        Ok(n)
    }

    /// `F_x ∘ b ∘ F_y` for a covering position `b`.
    fn fbf(&self, acc: &mut Acc, x: usize, b: usize, y: usize) -> Result<Vector> {
        let (left, right) = (self.table(Side::Left)?, self.table(Side::Right)?);
        for &(u, cu) in &self.f[x] {
            for &(p, k) in left.get(b, u) {
                acc.add(p, cu * k as i64);
            }
        }
        let fb = acc.take();
        Ok(self.times_f(acc, right, &fb, y))
    }

    fn times_f(&self, acc: &mut Acc, right: &SideTable, w: &[(u32, i64)], y: usize) -> Vector {
        for &(d, x) in w {
            for &(v, cv) in &self.f[y] {
                for &(p, k) in right.get(d as usize, v) {
                    acc.add(p, x * cv * k as i64);
                }
            }
        }
        acc.take()
    }

    /// General product of covering combinations.
    fn compose(&self, a: &[(u32, i64)], b: &[(u32, i64)]) -> Result<Vector> {
        let cov = &self.cov;
        let comp = Composer::get(cov.space(), cov.space())?;
        let mut acc = Acc::new(cov.len());
        for &(p, x) in a {
            for &(q, y) in b {
                for &(c, k) in comp.compose_cached(cov.index(p as usize), cov.index(q as usize)).iter() {
                    let pos = cov.position(c as usize).ok_or_else(|| Error::IdentityFailed("product leaves E^c".into()))?;
                    acc.add(pos as u32, x * y * k as i64);
                }
            }
        }
        Ok(acc.take())
    }
}

fn rank_of(rows: impl IntoIterator<Item = Vector>) -> usize {
    let mut space = RowSpace::new();
    let mut seen = HashSet::new();
    for r in rows {
        if r.is_empty() || !seen.insert(r.clone()) {
            continue;
        }
        let row: SparseRow = r.into_iter().map(|(p, v)| (p as usize, BigRational::from_integer(BigInt::from(v)))).collect();
        space.insert(row);
    }
    space.rank()
}

/// Counts of every identity checked, by family.
#[derive(Clone, Debug, Default, Serialize)]
pub struct IdempotentReport {
    pub group: String,
    pub pairs: usize,
    pub classes: usize,
    pub covering_dim: usize,
    pub checks: BTreeMap<String, u64>,
}

/// Runs every idempotent identity on `G`, failing on the first violation.
pub fn idempotent_report(g: &Arc<Group>) -> Result<IdempotentReport> {
    let eng = CoveringEngine::get(g)?;
    let mut checks = BTreeMap::new();
    checks.insert("e_products".to_string(), eng.check_e_products()?);
    checks.insert("side_actions".to_string(), eng.check_side_actions()?);
    checks.insert("opposites".to_string(), eng.check_opposites()?);
    checks.insert("pair_idempotents".to_string(), eng.check_pair_idempotents()?);
    checks.insert("class_idempotents".to_string(), eng.check_class_idempotents()?);
    checks.insert("central".to_string(), eng.check_central()?);
    checks.insert("block_orthogonality".to_string(), eng.check_block_orthogonality()?);
    Ok(IdempotentReport {
        group: g.name().to_string(),
        pairs: eng.poset.len(),
        classes: eng.fc.len(),
        covering_dim: eng.cov.len(),
        checks,
    })
}

/// Dimensions of one linkage block of `E_G^c`.
#[derive(Clone, Debug, Serialize)]
pub struct BlockCheck {
    pub class: Vec<usize>,
    pub n: usize,
    pub gamma_order: usize,
    /// Covering classes with `l0` in the class.
    pub submodule_dim: usize,
    /// Rank of `{ b f_C | l0(b) in C }`.
    pub restricted_rank: usize,
    /// Rank of `{ b f_C | b covering }`.
    pub ideal_rank: usize,
    /// `(i, j, dim f_i E^c f_j, |bimodule set|, rank of its image)`.
    pub corner_dims: Vec<(usize, usize, usize, usize, usize)>,
    /// Γ products carried by `a ↦ f a f` (all must hold).
    pub algebra_products: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub group: String,
    pub covering_dim: usize,
    pub block_sum: usize,
    pub blocks: Vec<BlockCheck>,
}

/// `E_G^c ≅ ⊕ Mat_n(kΓ)`: global and blockwise dimensions, the corner
/// spaces `f_i E^c f_j`, the algebra map `kΓ -> f E^c f`, and the matrix
/// units `y_i ȳ_i = e`, `ȳ_i y_i = e_i`.
pub fn matrix_decomposition(g: &Arc<Group>) -> Result<DecompositionReport> {
    let eng = CoveringEngine::get(g)?;
    let cov = &eng.cov;
    let n_cov = cov.len();
    let mut acc = Acc::new(n_cov);
    let right = eng.table(Side::Right)?;
    let comp = Composer::get(cov.space(), cov.space())?;
    let order = g.order();
    let mut blocks = Vec::new();
    let mut block_sum = 0;
    for (ci, class) in eng.partition.classes().iter().enumerate() {
        let gamma = GammaGroup::of_pair(g, class[0])?;
        let n = class.len();
        block_sum += n * n * gamma.order();
        let members: HashSet<usize> = class.iter().copied().collect();
        let submodule_dim = (0..n_cov).filter(|&b| members.contains(&cov.l0(b))).count();
        if submodule_dim != n * n * gamma.order() {
            return Err(Error::DecompositionMismatch(format!("block {ci}: {submodule_dim} classes, expected n^2 |Γ|")));
        }
        let bf = |b: usize, acc: &mut Acc| -> Vector {
            for &(v, c) in &eng.fc[ci] {
                for &(p, k) in right.get(b, v) {
                    acc.add(p, c * k as i64);
                }
            }
            acc.take()
        };
        let restricted: Vec<Vector> = (0..n_cov).filter(|&b| members.contains(&cov.l0(b))).map(|b| bf(b, &mut acc)).collect();
        let restricted_rank = rank_of(restricted);
        let ideal_rank = rank_of((0..n_cov).map(|b| bf(b, &mut acc)).collect::<Vec<_>>());
        if restricted_rank != submodule_dim || ideal_rank != submodule_dim {
            return Err(Error::DecompositionMismatch(format!(
                "block {ci}: projection ranks {restricted_rank}/{ideal_rank}, expected {submodule_dim}"
            )));
        }
        let mut corner_dims = Vec::new();
        for (i, &xi) in class.iter().enumerate() {
            for (j, &xj) in class.iter().enumerate() {
                let all: Vec<Vector> = (0..n_cov).map(|b| eng.fbf(&mut acc, xi, b, xj)).collect::<Result<_>>()?;
                let dim = rank_of(all);
                let bim = bimodule_set(g, xi, g, xj)?;
                let images: Vec<Vector> = bim
                    .classes
                    .iter()
                    .map(|&c| eng.fbf(&mut acc, xi, cov.position(c).expect("covering"), xj))
                    .collect::<Result<_>>()?;
                let image_rank = rank_of(images);
                if dim != gamma.order() || bim.classes.len() != gamma.order() || image_rank != dim {
                    return Err(Error::DecompositionMismatch(format!(
                        "block {ci} corner ({i}, {j}): dim {dim}, bimodule {}, image rank {image_rank}, |Γ| {}",
                        bim.classes.len(),
                        gamma.order()
                    )));
                }
                corner_dims.push((i, j, dim, bim.classes.len(), image_rank));
            }
        }
        let x = class[0];
        let phi: Vec<Vector> = gamma
            .elements()
            .iter()
            .map(|&a| eng.fbf(&mut acc, x, cov.position(a).expect("covering"), x))
            .collect::<Result<_>>()?;
        if rank_of(phi.clone()) != gamma.order() {
            return Err(Error::DecompositionMismatch(format!("block {ci}: a -> f a f is not injective")));
        }
        let index = (order / eng.poset.pair(x).p.order()) as i64;
        let table = gamma.table();
        let mut algebra_products = 0;
        for a in 0..gamma.order() {
            for b in 0..gamma.order() {
                let got = eng.compose(&phi[a], &phi[b])?;
                let want = scaled(&phi[table.mul(a, b)], (order * order) as i64 * index);
                if got != want {
                    return Err(Error::DecompositionMismatch(format!("block {ci}: f a f f b f != f ab f at ({a}, {b})")));
                }
                algebra_products += 1;
            }
        }
        let space = cov.space();
        for &xi in class {
            let bim = bimodule_set(g, x, g, xi)?;
            let y = *bim.classes.first().ok_or_else(|| Error::DecompositionMismatch("empty bimodule set".into()))?;
            let key = space.key(y);
            let op = space.index_of(swap_set(order, order, &key.t), swap_set(order, order, &key.s));
            let pi = eng.p_order[xi] as usize;
            let p0 = eng.p_order[x] as usize;
            let ok = comp.compose_basis(y, op) == [(cov.e_index(x) as u32, (order / pi) as u32)]
                && comp.compose_basis(op, y) == [(cov.e_index(xi) as u32, (order / p0) as u32)];
            if !ok {
                return Err(Error::DecompositionMismatch(format!("block {ci}: matrix units fail for pair {xi}")));
            }
            let unit = eng.mul_e(&mut acc, &eng.e_tilde(xi), &eng.fc[ci]);
            if unit != scaled(&eng.e_vector(&eng.f[xi]), eng.order) {
                return Err(Error::DecompositionMismatch(format!("block {ci}: e_i f_C != f_i for pair {xi}")));
            }
        }
        blocks.push(BlockCheck {
            class: class.clone(),
            n,
            gamma_order: gamma.order(),
            submodule_dim,
            restricted_rank,
            ideal_rank,
            corner_dims,
            algebra_products,
        });
    }
    if block_sum != n_cov {
        return Err(Error::DecompositionMismatch(format!("dim E^c = {n_cov}, block sum {block_sum}")));
    }
    Ok(DecompositionReport { group: g.name().to_string(), covering_dim: n_cov, block_sum, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::parse_group_name;

    #[test]
    fn small_groups_pass_every_identity() {
        for name in ["C1", "C2", "C3", "C4", "S3"] {
            let g = parse_group_name(name).unwrap();
            let rep = idempotent_report(&g).unwrap();
            assert!(rep.checks.values().all(|&n| n > 0), "{name}: {rep:?}");
        }
    }

    #[test]
    fn cyclic_two_decomposes_into_four_units() {
        let c2 = parse_group_name("C2").unwrap();
        let rep = matrix_decomposition(&c2).unwrap();
        assert_eq!(rep.covering_dim, 4);
        assert_eq!(rep.blocks.len(), 4);
        assert!(rep.blocks.iter().all(|b| b.n == 1 && b.gamma_order == 1));
    }
}
