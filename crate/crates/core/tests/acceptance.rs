//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use sbw_core::catalog::Catalog;
use sbw_core::classification::essential_report;
use sbw_core::covering::{idempotent_report, matrix_decomposition};
use sbw_core::gamma::GammaSpace;
use sbw_core::sections::product;
use sbw_core::verify::{
    associativity_exhaustive, associativity_random, essential_oracle, gamma_versus_out, goursat_round_trip,
    linkage_equivalence, named, quaternion_dihedral, reduced_consistency,
};
use sbw_core::Group;

const SEED: u64 = 0x5b_2026;

fn catalog() -> Catalog {
    Catalog::build(8).expect("catalog")
}

/// Conjugacy classes of sections `(T, S)` of `G x G`, counted by brute force
/// over subgroup pairs and explicit conjugation; `covering` keeps those with
/// full projections of `T` and trivial kernels of `S`.
fn section_class_count(g: &Arc<Group>, covering: bool) -> usize {
    let n = g.order();
    let x = product(g, g).unwrap();
    let subs: Vec<Vec<usize>> = x.subgroups().iter().map(|u| u.to_vec()).collect();
    let normal_in = |s: &[usize], t: &[usize]| {
        s.iter().all(|a| t.contains(a))
            && t.iter().all(|&b| s.iter().all(|&a| s.contains(&x.mul(x.mul(b, a), x.inv(b)))))
    };
    let full = |t: &[usize]| {
        let left: BTreeSet<usize> = t.iter().map(|v| v / n).collect();
        let right: BTreeSet<usize> = t.iter().map(|v| v % n).collect();
        left.len() == n && right.len() == n
    };
    let kernels_trivial = |s: &[usize]| s.iter().all(|&v| v == 0 || (v / n != 0 && v % n != 0));
    let mut seen = BTreeSet::new();
    for t in &subs {
        for s in &subs {
            if !normal_in(s, t) || (covering && !(full(t) && kernels_trivial(s))) {
                continue;
            }
            let canon = (0..x.order())
                .map(|c| {
                    let conj = |set: &[usize]| {
                        let mut v: Vec<usize> = set.iter().map(|&a| x.mul(x.mul(c, a), x.inv(c))).collect();
                        v.sort_unstable();
                        v
                    };
                    (conj(t), conj(s))
                })
                .min()
                .unwrap();
            seen.insert(canon);
        }
    }
    seen.len()
}

fn goursat() -> Result<String, String> {
    let gs = named(&["C1", "C2", "C3", "C4", "V4", "S3"]).map_err(|e| e.to_string())?;
    let mut total = 0;
    for g in &gs {
        for h in &gs {
            total += goursat_round_trip(g, h).map_err(|e| e.to_string())?;
        }
    }
    Ok(format!("36 products, {total} identities"))
}

fn mackey() -> Result<String, String> {
    let tiny = named(&["C1", "C2", "C3"]).map_err(|e| e.to_string())?;
    let exhaustive = associativity_exhaustive(&tiny).map_err(|e| e.to_string())?;
    let all: Vec<Arc<Group>> = catalog().entries().iter().map(|e| e.group.clone()).collect();
    let random = associativity_random(&all, 1000, SEED).map_err(|e| e.to_string())?;
    Ok(format!("{exhaustive} exhaustive triples, {random} random triples"))
}

fn idempotents() -> Result<String, String> {
    let mut total = 0u64;
    for e in catalog().entries() {
        let rep = idempotent_report(&e.group).map_err(|e| e.to_string())?;
        for family in ["e_products", "side_actions", "opposites", "pair_idempotents", "class_idempotents", "central"] {
            if rep.checks.get(family).copied().unwrap_or(0) == 0 {
                return Err(format!("{}: no {family} identities checked", e.id));
            }
        }
        total += rep.checks.values().sum::<u64>();
    }
    Ok(format!("14 groups, {total} identities"))
}

fn gamma_out() -> Result<String, String> {
    let mut pairs = 0;
    for e in catalog().entries() {
        pairs += gamma_versus_out(&e.group).map_err(|e| e.to_string())?;
    }
    Ok(format!("{pairs} pairs"))
}

fn decomposition() -> Result<String, String> {
    let gs = named(&["C2", "C3", "C4", "V4", "S3", "C6", "D8", "Q8"]).map_err(|e| e.to_string())?;
    let mut dims = Vec::new();
    for g in &gs {
        let rep = matrix_decomposition(g).map_err(|e| e.to_string())?;
        let oracle = section_class_count(g, true);
        let sum: usize = rep.blocks.iter().map(|b| b.n * b.n * b.gamma_order).sum();
        if rep.covering_dim != oracle || sum != oracle || rep.block_sum != oracle {
            return Err(format!("{}: dim {} blocks {sum}, brute force {oracle}", g.name(), rep.covering_dim));
        }
        if g.name() == "C2" {
            let terms: Vec<usize> = rep.blocks.iter().map(|b| b.n * b.n * b.gamma_order).collect();
            if terms != [1, 1, 1, 1] {
                return Err(format!("C2 blocks {terms:?}"));
            }
        }
        dims.push(format!("{}={}", g.name(), oracle));
    }
    Ok(dims.join(" "))
}

fn essential() -> Result<String, String> {
    let cat = catalog();
    let gs = named(&["C2", "C3", "C4", "V4", "S3"]).map_err(|e| e.to_string())?;
    let mut c2_dim = None;
    for g in &gs {
        let cmp = essential_oracle(g, &cat).map_err(|e| e.to_string())?;
        if !cmp.equal() {
            return Err(format!("{}: {cmp:?}", g.name()));
        }
        let total = section_class_count(g, false);
        let space = GammaSpace::get(g, g).map_err(|e| e.to_string())?;
        let rep = essential_report(g, &cat).map_err(|e| e.to_string())?;
        let quotient = total - cmp.rank;
        if space.dim() != total || rep.essential_dim.lo != quotient || rep.essential_dim.hi != quotient {
            return Err(format!("{}: quotient {quotient}, reported {:?}", g.name(), rep.essential_dim));
        }
        if g.order() == 2 {
            c2_dim = Some(quotient);
        }
    }
    match c2_dim {
        Some(3) => Ok("dim of the essential quotient for C2 is 3".into()),
        other => Err(format!("dim of the essential quotient for C2 is {other:?}")),
    }
}

fn q8d8() -> Result<String, String> {
    let cat = catalog();
    let rep = quaternion_dihedral(&cat).map_err(|e| e.to_string())?;
    rep.check(cat.get("Q8").unwrap(), cat.get("D8").unwrap()).map_err(|e| e.to_string())?;
    Ok(format!(
        "linkage class {}, |Γ| = {}, {} simple modules",
        rep.linkage_ids.0, rep.gamma_orders.0, rep.irr_counts.0
    ))
}

fn linkage() -> Result<String, String> {
    let all: Vec<Arc<Group>> = catalog().entries().iter().map(|e| e.group.clone()).collect();
    let rep = linkage_equivalence(&all).map_err(|e| e.to_string())?;
    Ok(format!("{} triples, {} pairs, {} linked", rep.triples, rep.pairs, rep.linked))
}

fn reduced() -> Result<String, String> {
    let cat = catalog();
    let mut pairs = 0;
    for e in cat.entries() {
        pairs += reduced_consistency(&e.group, &cat).map_err(|e| e.to_string())?;
    }
    Ok(format!("{pairs} pairs over {} groups", cat.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Result<String, String>); 9] = [
        ("goursat round trip", goursat),
        ("mackey associativity", mackey),
        ("idempotent calculus", idempotents),
        ("gamma group versus out", gamma_out),
        ("matrix decomposition", decomposition),
        ("essential ideal oracle", essential),
        ("quaternion and dihedral pairs", q8d8),
        ("linkage equivalence", linkage),
        ("reduced rule soundness", reduced),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
