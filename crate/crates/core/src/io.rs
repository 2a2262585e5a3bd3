//! JSON file formats for homomorphisms, subgroups, automorphisms and reports.
//!
//! Polynomials are digit strings, low degree first; field elements are single
//! digits; fields are written `p^n`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{Field, Poly, Subspace};
use crate::amalgam::{HomSpec, RawHomSpec};
use crate::autos::{AutoSpec, Chi, Phi, Primitive};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fingroup::{self, FinGroup};
use crate::genuine::{Certificate, Outcome, Reason, ScanReport, Verdict};
use crate::matrices::{Mat2, MatGroup, Mode};
use crate::subgroups::{QuasiLevel, SubgroupHandle};

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn poly(s: &str, k: &Field) -> Result<Poly> {
    Poly::parse(s, k)
}

/// A finite target group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupDesc {
    ResidueMatrix { field: String, modulus: String, mode: Mode },
    Product { factors: Vec<GroupDesc> },
    /// `F_q^length / W` with `W` spanned by `basis`.
    AdditiveQuotient { field: String, length: usize, basis: Vec<String> },
    Symmetric { n: u8 },
    Table { rows: Vec<Vec<u32>> },
}

impl GroupDesc {
    pub fn build(&self) -> Result<FinGroup> {
        match self {
            GroupDesc::ResidueMatrix { field, modulus, mode } => {
                let k = Field::parse(field)?;
                Ok(FinGroup::Matrix(MatGroup::of(&k, &poly(modulus, &k)?, *mode)?))
            }
            GroupDesc::Product { factors } => {
                FinGroup::product(factors.iter().map(|f| f.build()).collect::<Result<_>>()?)
            }
            GroupDesc::AdditiveQuotient { field, length, basis } => {
                let k = Field::parse(field)?;
                let ps = basis.iter().map(|b| poly(b, &k)).collect::<Result<Vec<_>>>()?;
                if let Some(p) = ps.iter().find(|p| p.degree().is_some_and(|d| d >= *length)) {
                    return Err(Error::Parse(format!(
                        "basis vector {} exceeds length {length}",
                        p.to_digits(&k)
                    )));
                }
                FinGroup::additive(Subspace::span_polys(&k, *length, ps.iter()))
            }
            GroupDesc::Symmetric { n } => FinGroup::symmetric(*n),
            GroupDesc::Table { rows } => FinGroup::table(rows.clone()),
        }
    }

    pub fn describe(g: &FinGroup) -> GroupDesc {
        match g {
            FinGroup::Matrix(m) => GroupDesc::ResidueMatrix {
                field: m.field().to_string(),
                modulus: m.ring().modulus().to_digits(m.field()),
                mode: m.mode(),
            },
            FinGroup::Product(p) => {
                GroupDesc::Product { factors: p.factors().iter().map(GroupDesc::describe).collect() }
            }
            FinGroup::Additive(a) => GroupDesc::AdditiveQuotient {
                field: a.field().to_string(),
                length: a.len(),
                basis: a.subspace().basis_polys().iter().map(|p| p.to_digits(a.field())).collect(),
            },
            FinGroup::Symmetric(n) => GroupDesc::Symmetric { n: *n },
            FinGroup::Table(t) => GroupDesc::Table { rows: t.rows() },
        }
    }
}

/// The on-disk form of a [`HomSpec`]; elements use the target's rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSpecFile {
    pub mode: Mode,
    pub field: String,
    pub modulus: String,
    pub target: GroupDesc,
    pub const_table: Vec<Value>,
    pub torus_table: Vec<Value>,
    pub trans: Vec<Vec<Value>>,
}

impl HomSpecFile {
    /// Parses the tables and re-runs validation.
    pub fn load(&self) -> Result<HomSpec> {
        let k = Field::parse(&self.field)?;
        let target = self.target.build()?;
        let elems = |vs: &[Value]| vs.iter().map(|v| target.parse_element(v)).collect::<Result<Vec<_>>>();
        let raw = RawHomSpec {
            mode: self.mode,
            field: k.clone(),
            modulus: poly(&self.modulus, &k)?,
            const_table: elems(&self.const_table)?,
            torus_table: elems(&self.torus_table)?,
            trans: self.trans.iter().map(|row| elems(row)).collect::<Result<_>>()?,
            target,
        };
        HomSpec::validate(raw)
    }

    pub fn save(h: &HomSpec) -> HomSpecFile {
        let raw = h.raw();
        let k = h.field();
        let tgt = h.target();
        let render = |xs: &[u64]| xs.iter().map(|&x| tgt.format_element(x)).collect::<Vec<_>>();
        HomSpecFile {
            mode: raw.mode,
            field: k.to_string(),
            modulus: raw.modulus.to_digits(k),
            target: GroupDesc::describe(tgt),
            const_table: render(&raw.const_table),
            torus_table: render(&raw.torus_table),
            trans: raw.trans.iter().map(|row| render(row)).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<HomSpec> {
        parse_json::<HomSpecFile>(text)?.load()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SubgroupData {
    Generators(Vec<Value>),
    Elements(Vec<Value>),
}

/// Subgroups built without writing out tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Construction {
    /// `Gamma(f)` or `G(f)`.
    PrincipalCongruence { field: String, modulus: String, mode: Mode },
    /// The normal subgroup with abelian quotient `A / (W + (conductor))`.
    AbelianQuasiLevel { field: String, conductor: String, basis: Vec<String> },
}

/// A subgroup file: explicit `{homspec, subgroup}` or `{construction}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubgroupFile {
    Explicit { homspec: HomSpecFile, subgroup: SubgroupData },
    Built { construction: Construction },
}

impl SubgroupFile {
    pub fn load(&self, caps: Caps) -> Result<SubgroupHandle> {
        match self {
            SubgroupFile::Explicit { homspec, subgroup } => {
                let h = homspec.load()?;
                let tgt = h.target().clone();
                let parse = |vs: &[Value]| vs.iter().map(|v| tgt.parse_element(v)).collect::<Result<Vec<_>>>();
                match subgroup {
                    SubgroupData::Generators(gs) => SubgroupHandle::new(h.clone(), &parse(gs)?, caps),
                    SubgroupData::Elements(es) => {
                        let u = fingroup::from_elements(&tgt, parse(es)?, caps.group_limit())?;
                        SubgroupHandle::with_subgroup(h.clone(), u, caps)
                    }
                }
            }
            SubgroupFile::Built { construction } => match construction {
                Construction::PrincipalCongruence { field, modulus, mode } => {
                    let k = Field::parse(field)?;
                    SubgroupHandle::principal_congruence(&k, &poly(modulus, &k)?, *mode, caps)
                }
                Construction::AbelianQuasiLevel { field, conductor, basis } => {
                    let k = Field::parse(field)?;
                    let ps = basis.iter().map(|b| poly(b, &k)).collect::<Result<Vec<_>>>()?;
                    let ql = QuasiLevel::new(&k, &poly(conductor, &k)?, &ps)?;
                    SubgroupHandle::from_quasilevel_abelian(&ql, caps)
                }
            },
        }
    }

    /// The explicit form, `U` given by its generators.
    pub fn save(h: &SubgroupHandle) -> SubgroupFile {
        let tgt = h.homspec().target();
        SubgroupFile::Explicit {
            homspec: HomSpecFile::save(h.homspec()),
            subgroup: SubgroupData::Generators(
                h.target_subgroup().generators().iter().map(|&x| tgt.format_element(x)).collect(),
            ),
        }
    }

    pub fn from_json(text: &str, caps: Caps) -> Result<SubgroupHandle> {
        parse_json::<SubgroupFile>(text)?.load(caps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PrimitiveFile {
    Inner { matrix: Vec<String> },
    Contragredient,
    /// `values[i] = chi(u)` for the unit with code `i + 1`.
    DetTwist { values: Vec<String> },
    Ring { a: String, b: String, e: u32 },
    /// `images[i] = phi(t^i)` for `i <= D`, on the block modulus (default
    /// `t^(D+1)`).
    NonStandard {
        #[serde(rename = "D")]
        d: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        block: Option<String>,
        images: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutoSpecFile {
    pub field: String,
    /// Composition order: the last entry acts first.
    pub prims: Vec<PrimitiveFile>,
}

impl AutoSpecFile {
    pub fn load(&self) -> Result<AutoSpec> {
        let k = Field::parse(&self.field)?;
        let prims = self
            .prims
            .iter()
            .map(|p| load_primitive(&k, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(AutoSpec { field: k, prims })
    }

    pub fn save(a: &AutoSpec) -> AutoSpecFile {
        let k = &a.field;
        AutoSpecFile { field: k.to_string(), prims: a.prims.iter().map(|p| save_primitive(k, p)).collect() }
    }

    pub fn from_json(text: &str) -> Result<AutoSpec> {
        parse_json::<AutoSpecFile>(text)?.load()
    }
}

fn load_primitive(k: &Field, p: &PrimitiveFile) -> Result<Primitive> {
    Ok(match p {
        PrimitiveFile::Inner { matrix } => Primitive::Inner(Mat2::parse(matrix, k)?),
        PrimitiveFile::Contragredient => Primitive::Contragredient,
        PrimitiveFile::DetTwist { values } => Primitive::DetTwist(Chi::new(
            k,
            values.iter().map(|v| k.parse_elem(v)).collect::<Result<_>>()?,
        )?),
        PrimitiveFile::Ring { a, b, e } => {
            Primitive::RingAuto { a: k.parse_elem(a)?, b: k.parse_elem(b)?, e: *e }
        }
        PrimitiveFile::NonStandard { d, block, images } => {
            let g = match block {
                Some(s) => poly(s, k)?,
                None => Poly::monomial(1, d + 1),
            };
            if g.degree_or_zero() != d + 1 || images.len() != d + 1 {
                return Err(Error::Parse(format!(
                    "non-standard map with D = {d} needs a degree {} block and {} images",
                    d + 1,
                    d + 1
                )));
            }
            let cols = images
                .iter()
                .map(|s| {
                    let p = poly(s, k)?;
                    if p.degree().is_some_and(|e| e > *d) {
                        return Err(Error::Parse(format!("image {s} has degree above D = {d}")));
                    }
                    Ok(p.to_vec(d + 1))
                })
                .collect::<Result<Vec<_>>>()?;
            Primitive::NonStandard(Phi::new(k, &g, cols)?)
        }
    })
}

fn save_primitive(k: &Field, p: &Primitive) -> PrimitiveFile {
    let digit = |a: u8| k.digit(a).to_string();
    match p {
        Primitive::Inner(m) => PrimitiveFile::Inner { matrix: m.to_strings(k).to_vec() },
        Primitive::Contragredient => PrimitiveFile::Contragredient,
        Primitive::DetTwist(chi) => {
            PrimitiveFile::DetTwist { values: chi.values().iter().map(|&v| digit(v)).collect() }
        }
        Primitive::RingAuto { a, b, e } => PrimitiveFile::Ring { a: digit(*a), b: digit(*b), e: *e },
        Primitive::NonStandard(phi) => {
            let g = phi.block();
            let d = g.degree_or_zero() - 1;
            let block = (*g != Poly::monomial(1, d + 1)).then(|| g.to_digits(k));
            let images =
                phi.columns().iter().map(|c| Poly::from_coeffs(c.clone()).to_digits(k)).collect();
            PrimitiveFile::NonStandard { d, block, images }
        }
    }
}

/// `{outcome, certificate | citation | witness, provenance}`.
pub fn verdict_json(v: &Verdict) -> Value {
    let provenance: Vec<Value> = v
        .provenance
        .iter()
        .map(|r| json!({"rule": r.rule.name(), "fired": r.fired, "detail": r.detail}))
        .collect();
    let mut out = serde_json::Map::new();
    match &v.outcome {
        Outcome::Genuine(cert) => {
            out.insert("outcome".into(), json!("Genuine"));
            let c = match cert {
                Certificate::Criterion { rule, premises } => json!({
                    "kind": "criterion",
                    "rule": rule.name(),
                    "premises": {
                        "mode": premises.mode,
                        "q": premises.q,
                        "index": premises.index,
                        "normal": premises.normal,
                        "torus_inside": premises.torus_inside,
                        "scalars_inside": premises.scalars_inside,
                    },
                }),
                Certificate::Factors { witness, factors } => json!({
                    "kind": "factors",
                    "rule": crate::genuine::Rule::FactorCertificate.name(),
                    "witness": witness,
                    "factors": factors,
                }),
            };
            out.insert("certificate".into(), c);
        }
        Outcome::NotGenuine(reason) => {
            out.insert("outcome".into(), json!("NotGenuine"));
            match reason {
                Reason::Rule { rule, detail } => {
                    out.insert("citation".into(), json!(rule.name()));
                    if !detail.is_empty() {
                        out.insert("detail".into(), json!(detail));
                    }
                }
                Reason::Witness(a) => {
                    out.insert("citation".into(), json!(crate::genuine::Rule::AutomorphismWitness.name()));
                    out.insert("witness".into(), serde_json::to_value(AutoSpecFile::save(a)).expect("plain data"));
                }
            }
        }
        Outcome::Unknown => {
            out.insert("outcome".into(), json!("Unknown"));
        }
    }
    out.insert("provenance".into(), Value::Array(provenance));
    Value::Object(out)
}

/// Rows plus minima; the genuine minima are bounds within the scanned class.
pub fn scan_json(r: &ScanReport) -> Value {
    let by_index: BTreeMap<String, usize> = r.by_index.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "index": row.index,
                "normal": row.normal,
                "congruence": row.congruence,
                "description": row.description,
                "verdict": verdict_json(&row.verdict),
            })
        })
        .collect();
    json!({
        "rows": rows,
        "by_index": by_index,
        "min_noncongruence": r.min_noncongruence,
        "min_normal_noncongruence": r.min_normal_noncongruence,
        "min_genuine_in_class": r.min_genuine_in_class,
        "min_normal_genuine_in_class": r.min_normal_genuine_in_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homspec_round_trip() {
        let k = Field::of_order(3).unwrap();
        let h = HomSpec::reduction(Mode::SL, &k, &Poly::parse("01", &k).unwrap()).unwrap();
        let text = serde_json::to_string(&HomSpecFile::save(&h)).unwrap();
        let back = HomSpecFile::from_json(&text).unwrap();
        assert_eq!(back.raw().const_table, h.raw().const_table);
        assert_eq!(back.raw().trans, h.raw().trans);
    }

    #[test]
    fn tampered_homspec_names_the_rule() {
        let k = Field::of_order(2).unwrap();
        let h = HomSpec::reduction(Mode::SL, &k, &Poly::parse("01", &k).unwrap()).unwrap();
        let mut file = HomSpecFile::save(&h);
        file.const_table.swap(1, 2);
        let err = file.load().unwrap_err().to_string();
        assert!(err.contains("const-hom") || err.contains("rule"), "{err}");
    }

    #[test]
    fn subgroup_files() {
        let caps = Caps::default();
        let built = r#"{"construction": {"kind": "principal-congruence", "field": "2^1", "modulus": "01", "mode": "SL"}}"#;
        let h = SubgroupFile::from_json(built, caps).unwrap();
        assert_eq!(h.index(), 6);
        let text = serde_json::to_string(&SubgroupFile::save(&h)).unwrap();
        let back = SubgroupFile::from_json(&text, caps).unwrap();
        assert!(back.same_subgroup(&h).unwrap());
        let ql = r#"{"construction": {"kind": "abelian-quasi-level", "field": "2^1", "conductor": "0001", "basis": ["1", "011"]}}"#;
        assert_eq!(SubgroupFile::from_json(ql, caps).unwrap().index(), 2);
    }

    #[test]
    fn autospec_round_trip() {
        let k = Field::of_order(3).unwrap();
        let text = r#"{"field": "3", "prims": [
            {"kind": "ring", "a": "2", "b": "1", "e": 0},
            {"kind": "contragredient"},
            {"kind": "non-standard", "D": 2, "images": ["1", "001", "01"]},
            {"kind": "inner", "matrix": ["1", "01", "0", "1"]}
        ]}"#;
        let a = AutoSpecFile::from_json(text).unwrap();
        assert_eq!(a.field, k);
        assert_eq!(a.prims.len(), 4);
        let again = AutoSpecFile::save(&a);
        assert_eq!(again.load().unwrap(), a);
        let bad = r#"{"field": "3", "prims": [{"kind": "non-standard", "D": 1, "images": ["1", "0"]}]}"#;
        assert!(AutoSpecFile::from_json(bad).is_err());
    }
}
