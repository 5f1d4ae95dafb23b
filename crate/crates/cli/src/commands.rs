//! Subcommand dispatch. Every command produces one JSON report; failures
//! produce an error report with exit status 1 (computation) or 2 (usage).

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::sync::Arc;

use sbw_core::catalog::{group_ref_json, parse_group_ref, Catalog};
use sbw_core::classification::{
    compare_ideal, brute_force_ideal, essential_report, linkage_partition, seeds, GammaGroup,
};
use sbw_core::covering::{idempotent_report, matrix_decomposition};
use sbw_core::crossed::linked;
use sbw_core::gamma::{ElementJson, GammaElement};
use sbw_core::group::set_order_cap;
use sbw_core::iso::automorphisms;
use sbw_core::poset::PosetG;
use sbw_core::sections::{enumerate_sections, product};
use sbw_core::verify::{run_suite, VerifyOptions, SUITES};
use sbw_core::{Error, Group};
use serde_json::{json, Value};

use crate::{CatalogAction, Cli, Command, Format, GroupAction, SectionsAction};

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

/// Text of every input, for the report digest.
#[derive(Default)]
struct Inputs(Vec<String>);

impl Inputs {
    /// Inline JSON, a path to a JSON file, or a bare name.
    fn json_arg(&mut self, arg: &str) -> Result<Value, Failure> {
        let text = if arg.trim_start().starts_with('{') {
            arg.to_string()
        } else if Path::new(arg).is_file() {
            std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("cannot read {arg}: {e}")))?
        } else {
            self.0.push(arg.to_string());
            return Ok(Value::String(arg.to_string()));
        };
        self.0.push(text.clone());
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed JSON in {arg}: {e}")))
    }

    fn group(&mut self, arg: &str) -> Result<Arc<Group>, Failure> {
        let value = self.json_arg(arg)?;
        parse_group_ref(&value).map_err(|e| match e {
            Error::OrderLimitExceeded { .. } => Failure::Compute(e),
            other => Failure::Usage(format!("group {arg}: {other}")),
        })
    }

    fn digest(&self) -> String {
        let mut hasher = DefaultHasher::new();
        self.0.hash(&mut hasher);
        format!("{:016x}", hasher.finish())
    }
}

/// Returns the rendered report and the exit status.
pub fn run(cli: &Cli, argv: &[String]) -> (String, u8) {
    if cli.unsafe_order {
        set_order_cap(usize::MAX);
    }
    let mut inputs = Inputs::default();
    inputs.0.extend(argv.iter().cloned());
    let outcome = dispatch(cli, &mut inputs);
    let mut report = serde_json::Map::new();
    report.insert("command".into(), Value::String(argv.join(" ")));
    report.insert("inputs".into(), Value::String(inputs.digest()));
    let code = match outcome {
        Ok((result, passed)) => {
            report.insert("result".into(), result);
            if passed {
                0
            } else {
                1
            }
        }
        Err(Failure::Usage(message)) => {
            report.insert("error".into(), json!({"kind": "usage", "message": message}));
            2
        }
        Err(Failure::Compute(e)) => {
            report.insert("error".into(), json!({"kind": e.kind(), "message": e.to_string()}));
            1
        }
    };
    let report = Value::Object(report);
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("serializable"),
        Format::Table => crate::render::table(&report),
    };
    (text, code)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn catalog(max_order: usize) -> Result<Catalog, Failure> {
    if max_order == 0 {
        return Err(Failure::Usage("catalog order must be positive".into()));
    }
    Ok(Catalog::build(max_order)?)
}

fn dispatch(cli: &Cli, inputs: &mut Inputs) -> Result<(Value, bool), Failure> {
    let value = match &cli.command {
        Command::Group { action: GroupAction::Info { group } } => group_info(&inputs.group(group)?)?,
        Command::Sections { action: SectionsAction::List { group, right } } => {
            let g = inputs.group(group)?;
            let x = match right {
                Some(h) => product(&g, &inputs.group(h)?)?,
                None => g,
            };
            sections_list(&x)?
        }
        Command::Compose { left, right } => {
            let read = |inputs: &mut Inputs, arg: &str| -> Result<GammaElement, Failure> {
                let json: ElementJson = serde_json::from_value(inputs.json_arg(arg)?)
                    .map_err(|e| Failure::Usage(format!("element {arg}: {e}")))?;
                GammaElement::from_json(&json).map_err(|e| match e {
                    Error::OrderLimitExceeded { .. } => Failure::Compute(e),
                    other => Failure::Usage(format!("element {arg}: {other}")),
                })
            };
            let (a, b) = (read(inputs, left)?, read(inputs, right)?);
            to_value(&a.compose(&b)?.to_json()?)
        }
        Command::Idempotents { group } => {
            let g = inputs.group(group)?;
            json!({"poset": PosetG::build(&g).to_json(), "identities": to_value(&idempotent_report(&g)?)})
        }
        Command::Linkage { group, with } => {
            let g = inputs.group(group)?;
            match with {
                None => linkage_partition(&g)?.to_json(),
                Some(h) => linkage_between(&g, &inputs.group(h)?)?,
            }
        }
        Command::GammaGroup { group, pair } => {
            let g = inputs.group(group)?;
            let n = PosetG::build(&g).len();
            let pairs: Vec<usize> = match pair {
                Some(x) if *x >= n => return Err(Failure::Usage(format!("pair {x} out of range 0..{n}"))),
                Some(x) => vec![*x],
                None => (0..n).collect(),
            };
            Value::Array(pairs.into_iter().map(|x| gamma_group_json(&g, x)).collect::<Result<_, _>>()?)
        }
        Command::Decompose { group } => to_value(&matrix_decomposition(&inputs.group(group)?)?),
        Command::Essential { group, brute_force } => {
            let g = inputs.group(group)?;
            let cat = catalog(cli.seed_order)?;
            let report = essential_report(&g, &cat)?;
            let ideal = match (&report.predicted_ideal, brute_force) {
                (Some(predicted), true) => to_value(&compare_ideal(&brute_force_ideal(&g, &cat)?, predicted)),
                _ => Value::Null,
            };
            json!({"report": to_value(&report), "brute_force": ideal})
        }
        Command::Seeds { max_order } => {
            let cat = catalog(cli.seed_order.max(*max_order))?;
            to_value(&seeds(&cat, *max_order)?)
        }
        Command::Verify { suite, max_order, seed } => return verify(suite, *max_order, *seed),
        Command::Catalog { action } => match action {
            CatalogAction::Build { max_order, out } => {
                let cat = catalog(*max_order)?;
                if let Some(path) = out {
                    cat.save(path)?;
                }
                cat.to_json()
            }
            CatalogAction::Show { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                inputs.0.push(text.clone());
                let value: Value = serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("malformed catalog {}: {e}", path.display())))?;
                let cat = Catalog::from_json(&value).map_err(|e| Failure::Usage(e.to_string()))?;
                let groups: Vec<Value> = cat
                    .entries()
                    .iter()
                    .map(|e| json!({"id": e.id, "order": e.group.order(), "abelian": e.group.is_abelian()}))
                    .collect();
                json!({"groups": groups, "complete": to_value(cat.completeness())})
            }
        },
    };
    Ok((value, true))
}

fn group_info(g: &Arc<Group>) -> Result<Value, Failure> {
    let (aut, _) = automorphisms(g)?;
    let subgroups = g.subgroups();
    let normal: Vec<Vec<usize>> = g.normal_subgroups().iter().map(|s| s.to_vec()).collect();
    Ok(json!({
        "group": group_ref_json(g),
        "name": g.name(),
        "order": g.order(),
        "abelian": g.is_abelian(),
        "generators": g.generators(),
        "element_orders": g.elem_orders(),
        "conjugacy_classes": g.conjugacy_classes(),
        "subgroup_count": subgroups.len(),
        "normal_subgroups": normal,
        "center": g.center().to_vec(),
        "automorphism_group_order": aut.order(),
        "table": g.table_rows(),
    }))
}

fn sections_list(x: &Arc<Group>) -> Result<Value, Failure> {
    let rows = enumerate_sections(x)
        .iter()
        .enumerate()
        .map(|(i, class)| {
            let s = &class.section;
            let mut row = json!({
                "index": i,
                "T": s.t().to_vec(),
                "S": s.s().to_vec(),
                "T_order": s.t().order(),
                "S_order": s.s().order(),
                "orbit_size": class.orbit_size,
            });
            if x.factors().is_some() {
                let inv = s.invariants()?;
                let four = |side: &sbw_core::sections::Invariants4| {
                    json!([side.p_t.to_vec(), side.k_t.to_vec(), side.p_s.to_vec(), side.k_s.to_vec()])
                };
                row["left"] = four(&inv.left);
                row["right"] = four(&inv.right);
                row["covering"] = json!(s.is_covering()?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(json!({"ambient": group_ref_json(x), "count": rows.len(), "sections": rows}))
}

fn linkage_between(g: &Arc<Group>, h: &Arc<Group>) -> Result<Value, Failure> {
    let (a, b) = (PosetG::build(g), PosetG::build(h));
    let pair = |p: &PosetG, x: usize| json!([p.pair(x).k.to_vec(), p.pair(x).p.to_vec()]);
    let mut links = Vec::new();
    for x in 0..a.len() {
        for y in 0..b.len() {
            let (px, py) = (a.pair(x), b.pair(y));
            if let Some(link) = linked(g, &px.k, &px.p, h, &py.k, &py.p)? {
                links.push(json!({"left": x, "right": y, "witness": to_value(&link.witness.section.to_json())}));
            }
        }
    }
    Ok(json!({
        "left": {"group": group_ref_json(g), "pairs": (0..a.len()).map(|x| pair(&a, x)).collect::<Vec<_>>()},
        "right": {"group": group_ref_json(h), "pairs": (0..b.len()).map(|y| pair(&b, y)).collect::<Vec<_>>()},
        "linked": links,
    }))
}

fn gamma_group_json(g: &Arc<Group>, x: usize) -> Result<Value, Failure> {
    let gamma = GammaGroup::of_pair(g, x)?;
    let pair = PosetG::build(g).pair(x).clone();
    let elements: Vec<Value> = gamma.classes().iter().map(|c| to_value(&c.section.to_json())).collect();
    Ok(json!({
        "pair": x,
        "K": pair.k.to_vec(),
        "P": pair.p.to_vec(),
        "order": gamma.order(),
        "elements": elements,
        "table": gamma.table().table_rows(),
        "irreducible_count": gamma.irreducible_count(),
        "out_comparison": to_value(&gamma.theta_report()?),
    }))
}

/// Suites run concurrently; reports are assembled in the fixed suite order.
fn verify(requested: &[String], max_order: usize, seed: u64) -> Result<(Value, bool), Failure> {
    let suites: Vec<String> = if requested.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        requested.to_vec()
    };
    if let Some(bad) = suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(Failure::Usage(format!("unknown suite {bad:?}; known: {}", SUITES.join(", "))));
    }
    if max_order == 0 || max_order > 8 {
        return Err(Failure::Usage("verify supports max orders 1 to 8".into()));
    }
    let opts = VerifyOptions { max_order, seed, ..VerifyOptions::default() };
    let reports = std::thread::scope(|scope| {
        let handles: Vec<_> = suites.iter().map(|s| scope.spawn(|| run_suite(s, &opts))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread")).collect::<Result<Vec<_>, _>>()
    })?;
    let passed = reports.iter().all(|r| r.passed());
    Ok((json!({"passed": passed, "suites": to_value(&reports)}), passed))
}
