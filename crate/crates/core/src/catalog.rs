//! Named group references, group JSON, and catalogs of small groups with
//! per-order completeness flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;

/// Group JSON: `{"name", "order", "table", "perm_gens"?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub name: String,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm_gens: Option<Vec<Vec<usize>>>,
}

impl GroupJson {
    pub fn of(g: &Group) -> GroupJson {
        GroupJson {
            name: g.name().to_string(),
            order: g.order(),
            table: g.table_rows(),
            perm_gens: g.perm_gens().map(|p| p.to_vec()),
        }
    }

    /// Validates the table; permutation generators, when present, must
    /// generate a group with the same table.
    pub fn to_group(&self) -> Result<Group> {
        if self.table.len() != self.order {
            return Err(Error::Invalid(format!("table has {} rows, order is {}", self.table.len(), self.order)));
        }
        let g = Group::from_table(self.name.clone(), self.table.clone())?;
        if let Some(gens) = &self.perm_gens {
            let h = Group::from_perm_gens(self.name.clone(), gens)?;
            if h.table_rows() != self.table {
                return Err(Error::Invalid("permutation generators do not match the table".into()));
            }
            return Ok(h);
        }
        Ok(g)
    }
}

/// One factor of a product name: `C<n>`, `D<order>`, `Q<order>`, `S<n>` or `V4`.
fn named_factor(token: &str) -> Result<Group> {
    let bad = || Error::Invalid(format!("unknown group name {token:?}"));
    if token == "V4" {
        let c2 = Arc::new(Group::cyclic(2)?);
        return Ok(Group::direct_product(&c2, &c2)?.with_name("V4"));
    }
    let (kind, digits) = token.split_at(1.min(token.len()));
    let n: usize = digits.parse().map_err(|_| bad())?;
    match kind {
        "C" => Group::cyclic(n),
        "D" => Group::dihedral(n),
        "Q" => Group::quaternion(n),
        "S" => Group::symmetric(n),
        _ => Err(bad()),
    }
}

/// Parses names such as `S3`, `C4xC2` or `C2xC2xC2` (products associate to the left).
pub fn parse_group_name(name: &str) -> Result<Arc<Group>> {
    let mut factors = name.split('x');
    let first = factors.next().ok_or_else(|| Error::Invalid("empty group name".into()))?;
    let mut acc = Arc::new(named_factor(first.trim())?);
    for f in factors {
        let next = Arc::new(named_factor(f.trim())?);
        acc = Arc::new(Group::direct_product(&acc, &next)?);
    }
    Ok(acc)
}

/// `{"name", "perm_gens"}` without a table.
#[derive(Deserialize)]
struct PermJson {
    name: String,
    perm_gens: Vec<Vec<usize>>,
}

/// `{"construct": "cyclic" | "dihedral" | "quaternion" | "symmetric" | "product", "args": [...]}`.
/// Dihedral and quaternion arguments are group orders; product arguments are group references.
#[derive(Deserialize)]
struct ConstructJson {
    construct: String,
    args: Vec<serde_json::Value>,
}

fn construct(request: &ConstructJson) -> Result<Arc<Group>> {
    let number = |i: usize| {
        request.args
            .get(i)
            .and_then(|v| v.as_u64())
            .map(|n| n as usize)
            .ok_or_else(|| Error::Invalid(format!("{} needs an integer argument", request.construct)))
    };
    let group = match request.construct.as_str() {
        "cyclic" => Group::cyclic(number(0)?)?,
        "dihedral" => Group::dihedral(number(0)?)?,
        "quaternion" => Group::quaternion(number(0)?)?,
        "symmetric" => Group::symmetric(number(0)?)?,
        "product" => {
            let [a, b] = request.args.as_slice() else {
                return Err(Error::Invalid("product needs two group references".into()));
            };
            return crate::sections::product(&parse_group_ref(a)?, &parse_group_ref(b)?);
        }
        other => return Err(Error::Invalid(format!("unknown construction {other:?}"))),
    };
    Ok(Arc::new(group))
}

/// A group given by name or as inline group JSON (table, permutation
/// generators, or construction).
pub fn parse_group_ref(value: &serde_json::Value) -> Result<Arc<Group>> {
    match value {
        serde_json::Value::String(s) => parse_group_name(s),
        other if other.get("construct").is_some() => construct(&serde_json::from_value(other.clone())?),
        other if other.get("table").is_some() => {
            Ok(Arc::new(serde_json::from_value::<GroupJson>(other.clone())?.to_group()?))
        }
        other => {
            let perm: PermJson = serde_json::from_value(other.clone())?;
            Ok(Arc::new(Group::from_perm_gens(perm.name, &perm.perm_gens)?))
        }
    }
}

fn factor_orders(g: &Group) -> Option<(usize, usize)> {
    g.factors().map(|(a, b)| (a.order(), b.order()))
}

/// Reference used when writing JSON: the name when it parses back to the
/// same table and factorization, a product construction for other direct
/// products, the full table otherwise.
pub fn group_ref_json(g: &Group) -> serde_json::Value {
    match parse_group_name(g.name()) {
        Ok(h) if h.fingerprint() == g.fingerprint() && factor_orders(&h) == factor_orders(g) => {
            serde_json::Value::String(g.name().to_string())
        }
        _ => match g.factors() {
            Some((a, b)) => serde_json::json!({"construct": "product", "args": [group_ref_json(a), group_ref_json(b)]}),
            None => serde_json::to_value(GroupJson::of(g)).expect("serializable"),
        },
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub group: Arc<Group>,
}

/// Groups with ids, plus whether every isomorphism type of each order is present.
#[derive(Clone, Debug)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
    complete: BTreeMap<usize, bool>,
}

#[derive(Serialize, Deserialize)]
struct CatalogJson {
    groups: Vec<CatalogGroupJson>,
    complete: BTreeMap<usize, bool>,
}

#[derive(Serialize, Deserialize)]
struct CatalogGroupJson {
    id: String,
    group: GroupJson,
}

/// Every isomorphism type of order at most 8, by order.
const SMALL_GROUPS: [&str; 14] =
    ["C1", "C2", "C3", "C4", "C2xC2", "C5", "C6", "S3", "C7", "C8", "C4xC2", "C2xC2xC2", "D8", "Q8"];

impl Catalog {
    /// All groups of order at most 8 (complete), and for larger orders the
    /// cyclic, dihedral and dicyclic groups (marked incomplete).
    pub fn build(max_order: usize) -> Result<Catalog> {
        let mut entries = Vec::new();
        let mut complete = BTreeMap::new();
        for name in SMALL_GROUPS {
            let g = parse_group_name(name)?;
            if g.order() <= max_order {
                entries.push(CatalogEntry { id: name.to_string(), group: g });
            }
        }
        for n in 1..=max_order.min(8) {
            complete.insert(n, true);
        }
        for n in 9..=max_order {
            let mut names = vec![format!("C{n}")];
            if n % 2 == 0 {
                names.push(format!("D{n}"));
            }
            if n % 4 == 0 {
                names.push(format!("Q{n}"));
            }
            for name in names {
                entries.push(CatalogEntry { id: name.clone(), group: parse_group_name(&name)? });
            }
            complete.insert(n, false);
        }
        Ok(Catalog { entries, complete })
    }

    pub fn from_entries(entries: Vec<CatalogEntry>, complete: BTreeMap<usize, bool>) -> Catalog {
        Catalog { entries, complete }
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Arc<Group>> {
        self.entries.iter().find(|e| e.id == id).map(|e| &e.group)
    }

    pub fn is_complete(&self, order: usize) -> bool {
        self.complete.get(&order).copied().unwrap_or(false)
    }

    pub fn completeness(&self) -> &BTreeMap<usize, bool> {
        &self.complete
    }

    /// Entries of order strictly below `order`, failing when some smaller
    /// order is not known to be complete.
    pub fn smaller_than(&self, order: usize) -> Result<Vec<&CatalogEntry>> {
        if let Some(missing) = (1..order).find(|&n| !self.is_complete(n)) {
            return Err(Error::IncompleteCatalog { order: missing });
        }
        Ok(self.entries.iter().filter(|e| e.group.order() < order).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let json = CatalogJson {
            groups: self
                .entries
                .iter()
                .map(|e| CatalogGroupJson { id: e.id.clone(), group: GroupJson::of(&e.group) })
                .collect(),
            complete: self.complete.clone(),
        };
        serde_json::to_value(json).expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Catalog> {
        let json: CatalogJson = serde_json::from_value(value.clone())?;
        let entries = json
            .groups
            .into_iter()
            .map(|e| Ok(CatalogEntry { id: e.id, group: Arc::new(e.group.to_group()?) }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Catalog { entries, complete: json.complete })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_json())?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Catalog> {
        Self::from_json(&serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::is_isomorphic;

    #[test]
    fn small_catalog_is_complete_and_distinct() {
        let cat = Catalog::build(8).unwrap();
        assert_eq!(cat.len(), 14);
        let counts: Vec<usize> = (1..=8).map(|n| cat.entries().iter().filter(|e| e.group.order() == n).count()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 1, 2, 1, 5]);
        for (i, a) in cat.entries().iter().enumerate() {
            for b in &cat.entries()[i + 1..] {
                assert!(!is_isomorphic(&a.group, &b.group), "{} ~ {}", a.id, b.id);
            }
        }
        assert_eq!(Catalog::build(1).unwrap().len(), 1);
        assert!(cat.smaller_than(9).is_ok());
        let big = Catalog::build(9).unwrap();
        assert!(matches!(big.smaller_than(10), Err(Error::IncompleteCatalog { order: 9 })));
    }

    #[test]
    fn json_round_trip() {
        let cat = Catalog::build(6).unwrap();
        let text = serde_json::to_string(&cat.to_json()).unwrap();
        let back = Catalog::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), text);
        let s3 = cat.get("S3").unwrap();
        assert_eq!(back.get("S3").unwrap().fingerprint(), s3.fingerprint());
        assert!(s3.perm_gens().is_some());
    }

    #[test]
    fn group_refs() {
        let g = parse_group_ref(&serde_json::json!("C2xC2")).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(group_ref_json(&g), serde_json::json!("C2xC2"));
        let inline = serde_json::to_value(GroupJson::of(&g)).unwrap();
        assert_eq!(parse_group_ref(&inline).unwrap().fingerprint(), g.fingerprint());
        assert!(parse_group_name("X5").is_err());
        let bad = serde_json::json!({"name": "bad", "order": 2, "table": [[0, 1], [1, 1]]});
        assert!(parse_group_ref(&bad).is_err());
    }

    #[test]
    fn constructions_and_products() {
        let d8 = parse_group_ref(&serde_json::json!({"construct": "dihedral", "args": [8]})).unwrap();
        assert_eq!(d8.fingerprint(), parse_group_name("D8").unwrap().fingerprint());
        let perm = serde_json::json!({"name": "S3", "perm_gens": [[1, 2, 0], [1, 0, 2]]});
        assert_eq!(parse_group_ref(&perm).unwrap().order(), 6);
        let c2 = parse_group_name("C2").unwrap();
        let v4 = parse_group_name("V4").unwrap();
        assert_eq!(group_ref_json(&crate::sections::product(&c2, &v4).unwrap()), serde_json::json!("C2xV4"));
        let c2c2 = Arc::new(Group::direct_product(&c2, &c2).unwrap());
        let x = Group::direct_product(&c2, &c2c2).unwrap();
        let json = group_ref_json(&x);
        assert_eq!(json, serde_json::json!({"construct": "product", "args": ["C2", "C2xC2"]}));
        let back = parse_group_ref(&json).unwrap();
        assert_eq!(factor_orders(&back), Some((2, 4)));
        assert!(parse_group_ref(&serde_json::json!({"construct": "product", "args": ["C2"]})).is_err());
    }
}
