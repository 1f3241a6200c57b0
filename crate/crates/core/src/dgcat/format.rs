//! JSON file format for finite dg categories.
//!
//! ```json
//! {
//!   "objects": ["0", "1"],
//!   "homs": [{"src": "0", "dst": "1", "basis": [{"label": "v", "degree": -1}, {"label": "w", "degree": 0}]}],
//!   "differential": [{"src": "0", "dst": "1", "from_label": "v", "to_label": "w", "coeff": 1}],
//!   "composition": [],
//!   "identities": {"0": "id0", "1": "id1"},
//!   "order": {"0": 0, "1": 1}
//! }
//! ```
//!
//! Coefficients are integers or strings `"p/q"`. Composites with an identity
//! factor may be omitted and follow the unit laws; other omitted composites
//! are zero. Basis labels are unique across the whole category. A twisted
//! product may be stored without `composition` when it carries
//! `construction: {"twist": {"n": n, "base": <category>}}`; the composition is
//! then recomputed and the listed data is checked against it.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::category::{BasisElement, CategoryError, FiniteDgCategory, HomComplex, HomVector};
use super::directed::DirectednessWitness;
use crate::scalar::{format_rational, parse_rational, Rational};
use crate::twist::{TwistError, TwistedCategory};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Twist(#[from] TwistError),
}

fn field_error(path: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Text(String),
}

impl Coeff {
    fn parse(&self, path: &str) -> Result<Rational, FormatError> {
        match self {
            Coeff::Int(n) => Ok(Rational::from_integer((*n).into())),
            Coeff::Text(s) => parse_rational(s).map_err(|e| field_error(path, e.to_string())),
        }
    }

    fn from_rational(q: &Rational) -> Self {
        use num_traits::ToPrimitive;
        match (q.is_integer(), q.numer().to_i64()) {
            (true, Some(n)) => Coeff::Int(n),
            _ => Coeff::Text(format_rational(q)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub label: String,
    pub degree: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomEntry {
    pub src: String,
    pub dst: String,
    pub basis: Vec<BasisEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentialEntry {
    pub src: String,
    pub dst: String,
    pub from_label: String,
    pub to_label: String,
    pub coeff: Coeff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub label: String,
    pub coeff: Coeff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositionEntry {
    pub g: String,
    pub f: String,
    pub result: Vec<TermEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistConstruction {
    pub n: usize,
    pub base: Box<CategoryFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Construction {
    pub twist: TwistConstruction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryFile {
    pub objects: Vec<String>,
    pub homs: Vec<HomEntry>,
    #[serde(default)]
    pub differential: Vec<DifferentialEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composition: Option<Vec<CompositionEntry>>,
    pub identities: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<BTreeMap<String, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
}

impl CategoryFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("category files serialize")
    }

    /// Serializes a category. With `omit_composition` the composition is left
    /// out and must then be recovered from `construction`.
    pub fn from_category(
        c: &FiniteDgCategory,
        omit_composition: bool,
        construction: Option<Construction>,
    ) -> Self {
        let name = |x: usize| c.object_label(x).to_string();
        let mut homs = Vec::new();
        let mut differential = Vec::new();
        for (x, y) in c.nonzero_pairs() {
            let h = c.hom(x, y);
            homs.push(HomEntry {
                src: name(x),
                dst: name(y),
                basis: h
                    .basis
                    .iter()
                    .map(|b| BasisEntry {
                        label: b.label.clone(),
                        degree: b.degree,
                    })
                    .collect(),
            });
            for (i, dv) in h.differential.iter().enumerate() {
                for (j, q) in dv.iter() {
                    differential.push(DifferentialEntry {
                        src: name(x),
                        dst: name(y),
                        from_label: h.basis[i].label.clone(),
                        to_label: h.basis[*j].label.clone(),
                        coeff: Coeff::from_rational(q),
                    });
                }
            }
        }
        let composition = (!omit_composition).then(|| {
            let mut out = Vec::new();
            for &(x, y, z) in c.composition_tables().keys() {
                if x == y || y == z {
                    continue;
                }
                for g in 0..c.hom(y, z).len() {
                    for f in 0..c.hom(x, y).len() {
                        let r = c.compose(x, y, z, g, f);
                        if r.is_zero() {
                            continue;
                        }
                        out.push(CompositionEntry {
                            g: c.label(y, z, g).to_string(),
                            f: c.label(x, y, f).to_string(),
                            result: r
                                .iter()
                                .map(|(k, q)| TermEntry {
                                    label: c.label(x, z, *k).to_string(),
                                    coeff: Coeff::from_rational(q),
                                })
                                .collect(),
                        });
                    }
                }
            }
            out
        });
        let identities = (0..c.num_objects())
            .map(|x| (name(x), c.label(x, x, c.identity(x)).to_string()))
            .collect();
        let order = c.order().map(|w| {
            (0..c.num_objects())
                .map(|x| (name(x), w.level(x)))
                .collect()
        });
        CategoryFile {
            objects: c.objects().to_vec(),
            homs,
            differential,
            composition,
            identities,
            order,
            construction,
        }
    }

    /// Builds and structurally checks the category; axioms are left to
    /// [`FiniteDgCategory::validate`].
    pub fn to_category(&self) -> Result<FiniteDgCategory, FormatError> {
        let objects: HashMap<&str, usize> = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i))
            .collect();
        if objects.len() != self.objects.len() {
            let dup = self
                .objects
                .iter()
                .enumerate()
                .find(|(i, o)| objects[o.as_str()] != *i)
                .map(|(_, o)| o.clone())
                .unwrap_or_default();
            return Err(field_error("objects", format!("duplicate object {dup:?}")));
        }
        let object = |path: String, label: &str| {
            objects
                .get(label)
                .copied()
                .ok_or_else(|| field_error(path, format!("unknown object {label:?}")))
        };
        let mut homs: BTreeMap<(usize, usize), HomComplex> = BTreeMap::new();
        let mut labels: HashMap<&str, (usize, usize, usize)> = HashMap::new();
        for (i, h) in self.homs.iter().enumerate() {
            let x = object(format!("homs[{i}].src"), &h.src)?;
            let y = object(format!("homs[{i}].dst"), &h.dst)?;
            if homs.contains_key(&(x, y)) {
                return Err(field_error(
                    format!("homs[{i}]"),
                    format!("hom({},{}) listed twice", h.src, h.dst),
                ));
            }
            for (j, b) in h.basis.iter().enumerate() {
                if labels.insert(b.label.as_str(), (x, y, j)).is_some() {
                    return Err(field_error(
                        format!("homs[{i}].basis[{j}].label"),
                        format!("duplicate label {:?}", b.label),
                    ));
                }
            }
            let basis = h
                .basis
                .iter()
                .map(|b| BasisElement::new(b.label.clone(), b.degree))
                .collect();
            homs.insert((x, y), HomComplex::closed(basis));
        }
        for (i, d) in self.differential.iter().enumerate() {
            let path = format!("differential[{i}]");
            let x = object(format!("{path}.src"), &d.src)?;
            let y = object(format!("{path}.dst"), &d.dst)?;
            let locate = |field: &str, label: &str| match labels.get(label) {
                Some(&(a, b, k)) if (a, b) == (x, y) => Ok(k),
                Some(_) => Err(field_error(
                    format!("{path}.{field}"),
                    format!("{label:?} is not in hom({},{})", d.src, d.dst),
                )),
                None => Err(field_error(
                    format!("{path}.{field}"),
                    format!("unknown label {label:?}"),
                )),
            };
            let from = locate("from_label", &d.from_label)?;
            let to = locate("to_label", &d.to_label)?;
            let q = d.coeff.parse(&format!("{path}.coeff"))?;
            homs.get_mut(&(x, y)).expect("located above").differential[from].add_term(to, q);
        }
        let mut identities = Vec::with_capacity(self.objects.len());
        for (x, o) in self.objects.iter().enumerate() {
            let path = format!("identities.{o}");
            let label = self.identities.get(o).ok_or_else(|| {
                field_error(
                    "identities",
                    format!("no identity designated for object {o:?}"),
                )
            })?;
            match labels.get(label.as_str()) {
                Some(&(a, b, k)) if a == x && b == x => identities.push(k),
                Some(_) => {
                    return Err(field_error(
                        path,
                        format!("{label:?} is not in hom({o},{o})"),
                    ))
                }
                None => return Err(field_error(path, format!("unknown label {label:?}"))),
            }
        }
        if let Some(extra) = self
            .identities
            .keys()
            .find(|k| !objects.contains_key(k.as_str()))
        {
            return Err(field_error(format!("identities.{extra}"), "unknown object"));
        }
        let n = self.objects.len();
        let len = |x: usize, y: usize| homs.get(&(x, y)).map_or(0, |h| h.len());
        let mut composition: BTreeMap<(usize, usize, usize), Vec<HomVector>> = BTreeMap::new();
        let mut listed: HashMap<(usize, usize, usize, usize, usize), usize> = HashMap::new();
        for (i, e) in self.composition.iter().flatten().enumerate() {
            let path = format!("composition[{i}]");
            let find = |field: &str, label: &str| {
                labels.get(label).copied().ok_or_else(|| {
                    field_error(
                        format!("{path}.{field}"),
                        format!("unknown label {label:?}"),
                    )
                })
            };
            let (y, z, g) = find("g", &e.g)?;
            let (x, y2, f) = find("f", &e.f)?;
            if y != y2 {
                return Err(field_error(
                    path,
                    format!("{:?} and {:?} are not composable", e.g, e.f),
                ));
            }
            if let Some(prev) = listed.insert((x, y, z, g, f), i) {
                return Err(field_error(
                    path,
                    format!("composite already given in composition[{prev}]"),
                ));
            }
            let mut v = HomVector::new();
            for (j, t) in e.result.iter().enumerate() {
                let tp = format!("{path}.result[{j}]");
                match labels.get(t.label.as_str()) {
                    Some(&(a, b, k)) if (a, b) == (x, z) => {
                        v.add_term(k, t.coeff.parse(&format!("{tp}.coeff"))?)
                    }
                    Some(_) => {
                        return Err(field_error(
                            format!("{tp}.label"),
                            format!(
                                "{:?} is not in hom({},{})",
                                t.label, self.objects[x], self.objects[z]
                            ),
                        ))
                    }
                    None => {
                        return Err(field_error(
                            format!("{tp}.label"),
                            format!("unknown label {:?}", t.label),
                        ))
                    }
                }
            }
            let (lf, lg) = (len(x, y), len(y, z));
            composition
                .entry((x, y, z))
                .or_insert_with(|| vec![HomVector::new(); lf * lg])[g * lf + f] = v;
        }
        // unit laws for composites not listed
        for x in 0..n {
            for y in 0..n {
                let l = len(x, y);
                if l == 0 {
                    continue;
                }
                for (triple, fixed_g, fixed_f) in [
                    ((x, x, y), None, Some(identities[x])),
                    ((x, y, y), Some(identities[y]), None),
                ] {
                    let (lf, lg) = (len(triple.0, triple.1), len(triple.1, triple.2));
                    let table = composition
                        .entry(triple)
                        .or_insert_with(|| vec![HomVector::new(); lf * lg]);
                    for k in 0..l {
                        let (g, f) = (fixed_g.unwrap_or(k), fixed_f.unwrap_or(k));
                        if !listed.contains_key(&(triple.0, triple.1, triple.2, g, f)) {
                            table[g * lf + f] = HomVector::term(k);
                        }
                    }
                }
            }
        }
        let mut c = FiniteDgCategory::new(self.objects.clone(), homs, composition, identities)?;
        if let Some(order) = &self.order {
            let mut levels = Vec::with_capacity(n);
            for o in &self.objects {
                levels.push(
                    *order.get(o).ok_or_else(|| {
                        field_error("order", format!("no level for object {o:?}"))
                    })?,
                );
            }
            if let Some(extra) = order.keys().find(|k| !objects.contains_key(k.as_str())) {
                return Err(field_error(format!("order.{extra}"), "unknown object"));
            }
            c = c.with_order(DirectednessWitness::new(levels))?;
        }
        match &self.construction {
            None => Ok(c),
            Some(con) => {
                let base = Arc::new(con.twist.base.to_category()?);
                let built = TwistedCategory::new(con.twist.n, base)?;
                let reference = built.category();
                check_same(&c, reference, self.composition.is_some())?;
                Ok((**reference).clone())
            }
        }
    }
}

fn check_same(
    file: &FiniteDgCategory,
    built: &FiniteDgCategory,
    compare_composition: bool,
) -> Result<(), FormatError> {
    let mismatch = |what: String| {
        field_error(
            "construction",
            format!("listed data disagrees with the construction: {what}"),
        )
    };
    if file.objects() != built.objects() {
        return Err(mismatch("objects".into()));
    }
    let n = file.num_objects();
    for x in 0..n {
        for y in 0..n {
            if file.hom(x, y) != built.hom(x, y) {
                return Err(mismatch(format!(
                    "hom({},{})",
                    file.object_label(x),
                    file.object_label(y)
                )));
            }
        }
    }
    if compare_composition {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for g in 0..file.hom(y, z).len() {
                        for f in 0..file.hom(x, y).len() {
                            if file.compose(x, y, z, g, f) != built.compose(x, y, z, g, f) {
                                return Err(mismatch(format!(
                                    "{} ∘ {}",
                                    file.label(y, z, g),
                                    file.label(x, y, f)
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::interval;
    use crate::fixtures::{collapse_category, random_directed};

    fn round_trip(c: &FiniteDgCategory) -> FiniteDgCategory {
        let text = CategoryFile::from_category(c, false, None).to_json();
        CategoryFile::parse(&text).unwrap().to_category().unwrap()
    }

    #[test]
    fn round_trips_preserve_structure() {
        for c in [interval(3), collapse_category(), random_directed(4)] {
            let back = round_trip(&c);
            assert_eq!(back.objects(), c.objects());
            for (x, y) in c.nonzero_pairs() {
                assert_eq!(back.hom(x, y), c.hom(x, y));
            }
            assert_eq!(
                back.composition_tables().len(),
                c.composition_tables().len()
            );
            for &(x, y, z) in c.composition_tables().keys() {
                for g in 0..c.hom(y, z).len() {
                    for f in 0..c.hom(x, y).len() {
                        assert_eq!(back.compose(x, y, z, g, f), c.compose(x, y, z, g, f));
                    }
                }
            }
            assert!(back.validate().passed());
        }
    }

    #[test]
    fn twisted_category_without_composition() {
        let base = Arc::new(interval(1));
        let w = TwistedCategory::new(1, base.clone()).unwrap();
        let con = Construction {
            twist: TwistConstruction {
                n: 1,
                base: Box::new(CategoryFile::from_category(&base, false, None)),
            },
        };
        let file = CategoryFile::from_category(w.category(), true, Some(con));
        assert!(file.composition.is_none());
        let back = CategoryFile::parse(&file.to_json())
            .unwrap()
            .to_category()
            .unwrap();
        assert_eq!(back.composition_tables(), w.category().composition_tables());
    }

    #[test]
    fn missing_identity_is_a_field_error() {
        let mut file = CategoryFile::from_category(&interval(1), false, None);
        file.identities.remove("1");
        let err = file.to_category().unwrap_err();
        assert!(
            matches!(err, FormatError::Field { ref path, .. } if path == "identities"),
            "{err}"
        );
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"objects": ["0"], "homs": [], "identities": {}, "extra": 1}"#;
        assert!(matches!(
            CategoryFile::parse(text),
            Err(FormatError::Json(_))
        ));
    }

    #[test]
    fn unknown_label_in_differential() {
        let mut file = CategoryFile::from_category(&collapse_category(), false, None);
        file.differential[0].to_label = "nope".into();
        let err = file.to_category().unwrap_err();
        assert_eq!(
            err.to_string(),
            "differential[0].to_label: unknown label \"nope\""
        );
    }

    #[test]
    fn rational_coefficients_parse() {
        let text = r#"{
            "objects": ["0", "1"],
            "homs": [
                {"src": "0", "dst": "0", "basis": [{"label": "i0", "degree": 0}]},
                {"src": "1", "dst": "1", "basis": [{"label": "i1", "degree": 0}]},
                {"src": "0", "dst": "1", "basis": [{"label": "v", "degree": -1}, {"label": "w", "degree": 0}]}
            ],
            "differential": [{"src": "0", "dst": "1", "from_label": "v", "to_label": "w", "coeff": "-3/6"}],
            "identities": {"0": "i0", "1": "i1"}
        }"#;
        let c = CategoryFile::parse(text).unwrap().to_category().unwrap();
        assert_eq!(
            c.differential(0, 1, 0).coeff(&1),
            crate::scalar::rational(-1, 2)
        );
        assert!(c.validate().passed());
    }
}
