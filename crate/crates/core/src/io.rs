//! JSON formats for graphs, tuples, algebra elements, Katsura triples and
//! stabilised block data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::AlgElem;
use crate::ep::EpTuple;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::group::{GroupElem, GroupModel, TableGroup};
use crate::katsura::{default_labels, KatsuraTriple};
use crate::ktheory::{Matrix, UnitsModel};
use crate::scalar::Field;
use crate::semigroup::Triple;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub src: String,
    pub rng: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Trivial,
    Integers,
    Cyclic { order: u64 },
    /// `table[i][j]` is the name of `elements[i] · elements[j]`.
    Table { elements: Vec<String>, table: Vec<Vec<String>> },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    #[serde(default)]
    pub vertices: BTreeMap<String, String>,
    #[serde(default)]
    pub edges: BTreeMap<String, String>,
}

/// A graph, optionally with a group action. Entries left out of `action`,
/// `phi` and `c` default to the identity, `1` and `1`. For `Z` and `Z/m`
/// the tables are keyed by the generator `t`; for table groups by element.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TupleSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub action: BTreeMap<String, ActionSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub phi: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub c: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub alpha: Vec<String>,
    pub g: String,
    pub beta: Vec<String>,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct KatsuraSpec {
    #[serde(rename = "A")]
    pub a: Vec<Vec<u64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<String>>,
    /// Names of the regular vertices, one per row; all vertices by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    /// Primes generating the units model over `Q`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub primes: Vec<u64>,
}

/// Input of `stabilize`: `P` holds units, `Y` is optional.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct StabilizeSpec {
    #[serde(rename = "M")]
    pub m: Vec<Vec<i64>>,
    #[serde(rename = "N")]
    pub n: Vec<Vec<i64>>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<String>>,
    #[serde(rename = "Y", default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub primes: Vec<u64>,
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

/// The field named in a file, unless overridden; `Q` by default.
pub fn resolve_field(declared: Option<&str>, overridden: Option<Field>) -> Result<Field> {
    match (overridden, declared) {
        (Some(f), _) => Ok(f),
        (None, Some(s)) => s.parse(),
        (None, None) => Ok(Field::Rationals),
    }
}

impl TupleSpec {
    pub fn graph(&self) -> Result<Graph> {
        Graph::new(
            self.vertices.iter().cloned(),
            self.edges.iter().map(|e| (e.id.clone(), e.src.clone(), e.rng.clone())),
        )
    }

    pub fn build(&self, field_override: Option<Field>) -> Result<EpTuple> {
        let field = resolve_field(self.field.as_deref(), field_override)?;
        let graph = self.graph()?;
        let group = match &self.group {
            None | Some(GroupSpec::Trivial) => GroupModel::trivial(),
            Some(GroupSpec::Integers) => GroupModel::Integers,
            Some(GroupSpec::Cyclic { order: 0 }) => return Err(Error::Schema("cyclic order must be positive".into())),
            Some(GroupSpec::Cyclic { order }) => GroupModel::Cyclic(*order),
            Some(GroupSpec::Table { elements, table }) => {
                let index = |s: &String| {
                    elements
                        .iter()
                        .position(|x| x == s)
                        .ok_or_else(|| Error::Schema(format!("unknown group element {s:?}")))
                };
                let mul = table.iter().map(|row| row.iter().map(index).collect()).collect::<Result<Vec<Vec<_>>>>()?;
                let tg = TableGroup::new(elements.clone(), mul)?;
                return self.build_table(graph, tg, field);
            }
        };
        let keys: Vec<&str> = if matches!(group, GroupModel::Cyclic(1)) { vec![] } else { vec!["t"] };
        self.check_keys(&keys)?;
        let (gen_v, gen_e, gen_phi, gen_c) = self.generator_rows(&graph, &group, field, "t")?;
        let gen_phi = gen_phi.iter().map(|g| g.0).collect();
        EpTuple::cyclic(graph, group, field, gen_v, gen_e, gen_phi, gen_c)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        let keys = self.action.keys().chain(self.phi.keys()).chain(self.c.keys());
        for k in keys {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Schema(format!("unexpected group key {k:?}")));
            }
        }
        Ok(())
    }

    #[allow(clippy::type_complexity)]
    fn generator_rows(
        &self,
        graph: &Graph,
        group: &GroupModel,
        field: Field,
        key: &str,
    ) -> Result<(Vec<VertexId>, Vec<EdgeId>, Vec<GroupElem>, Vec<crate::scalar::Scalar>)> {
        let mut gen_v: Vec<VertexId> = graph.vertices().collect();
        let mut gen_e: Vec<EdgeId> = graph.edges().collect();
        let mut phi = vec![group.identity(); graph.num_edges()];
        let mut c = vec![field.one(); graph.num_edges()];
        if let Some(a) = self.action.get(key) {
            for (x, y) in &a.vertices {
                gen_v[graph.vertex(x)?.index()] = graph.vertex(y)?;
            }
            for (x, y) in &a.edges {
                gen_e[graph.edge(x)?.index()] = graph.edge(y)?;
            }
        }
        if let Some(p) = self.phi.get(key) {
            for (e, g) in p {
                phi[graph.edge(e)?.index()] = group.parse(g)?;
            }
        }
        if let Some(cs) = self.c.get(key) {
            for (e, s) in cs {
                c[graph.edge(e)?.index()] = field.parse(s)?;
            }
        }
        Ok((gen_v, gen_e, phi, c))
    }

    fn build_table(&self, graph: Graph, tg: TableGroup, field: Field) -> Result<EpTuple> {
        let names: Vec<String> = tg.names().to_vec();
        self.check_keys(&names.iter().map(String::as_str).collect::<Vec<_>>())?;
        let group = GroupModel::Table(tg.clone());
        let (mut act_v, mut act_e, mut phi, mut c) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for name in &names {
            let (v, e, p, cs) = self.generator_rows(&graph, &group, field, name)?;
            act_v.push(v);
            act_e.push(e);
            phi.push(p);
            c.push(cs);
        }
        EpTuple::table(graph, tg, field, act_v, act_e, phi, c)
    }

    /// Full description of a tuple; cyclic models list the generator only.
    pub fn from_tuple(t: &EpTuple) -> TupleSpec {
        let g = t.graph();
        let edges = g
            .edges()
            .map(|e| EdgeSpec {
                id: g.edge_name(e).into(),
                src: g.vertex_name(g.src(e)).into(),
                rng: g.vertex_name(g.rng(e)).into(),
            })
            .collect();
        let (group, keys): (GroupSpec, Vec<GroupElem>) = match t.group() {
            GroupModel::Cyclic(1) => (GroupSpec::Trivial, vec![]),
            GroupModel::Integers => (GroupSpec::Integers, vec![t.group().gen_pow(1)]),
            GroupModel::Cyclic(m) => (GroupSpec::Cyclic { order: *m }, vec![t.group().gen_pow(1)]),
            GroupModel::Table(tg) => {
                let names = tg.names().to_vec();
                let table =
                    tg.table().iter().map(|row| row.iter().map(|&k| names[k].clone()).collect()).collect();
                let keys = (0..names.len()).map(|i| GroupElem(i as i64)).collect();
                (GroupSpec::Table { elements: names, table }, keys)
            }
        };
        let mut spec = TupleSpec {
            vertices: g.vertices().map(|v| g.vertex_name(v).to_string()).collect(),
            edges,
            field: Some(t.field().to_string()),
            group: Some(group),
            action: BTreeMap::new(),
            phi: BTreeMap::new(),
            c: BTreeMap::new(),
        };
        for k in keys {
            let key = match t.group() {
                GroupModel::Table(_) => t.group().format(k),
                _ => "t".to_string(),
            };
            let action = ActionSpec {
                vertices: g
                    .vertices()
                    .map(|v| (g.vertex_name(v).to_string(), g.vertex_name(t.act_vertex(k, v)).to_string()))
                    .collect(),
                edges: g.edges().map(|e| (g.edge_name(e).to_string(), g.edge_name(t.act_edge(k, e)).to_string())).collect(),
            };
            spec.action.insert(key.clone(), action);
            spec.phi.insert(key.clone(), g.edges().map(|e| (g.edge_name(e).to_string(), t.group().format(t.phi(k, e)))).collect());
            spec.c.insert(key, g.edges().map(|e| (g.edge_name(e).to_string(), t.c(k, e).to_string())).collect());
        }
        spec
    }
}

pub fn parse_element(t: &EpTuple, terms: &[TermSpec]) -> Result<AlgElem> {
    let g = t.graph();
    let mut x = AlgElem::zero();
    for term in terms {
        let alpha = g.parse_path(&term.alpha)?;
        let beta = g.parse_path(&term.beta)?;
        let h = t.group().parse(&term.g)?;
        let tr = Triple::new(t, alpha, h, beta)?;
        x.add_term(tr, t.field().parse(&term.coeff)?);
    }
    Ok(x)
}

pub fn element_to_terms(t: &EpTuple, x: &AlgElem) -> Vec<TermSpec> {
    let g = t.graph();
    x.terms()
        .map(|(tr, c)| TermSpec {
            alpha: g.path_names(&tr.alpha),
            g: t.group().format(tr.g),
            beta: g.path_names(&tr.beta),
            coeff: c.to_string(),
        })
        .collect()
}

impl KatsuraSpec {
    pub fn build(&self, field_override: Option<Field>) -> Result<KatsuraTriple> {
        let field = resolve_field(self.field.as_deref(), field_override)?;
        let n = self.a.first().map_or(0, Vec::len);
        let vertices = self.vertices.clone().unwrap_or_else(|| default_labels(n));
        let rows = match &self.rows {
            None => (0..vertices.len()).collect(),
            Some(names) => names
                .iter()
                .map(|r| {
                    vertices.iter().position(|v| v == r).ok_or_else(|| Error::Schema(format!("unknown row vertex {r:?}")))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let c = match &self.c {
            None => vec![vec![field.one(); vertices.len()]; self.a.len()],
            Some(rows) => rows
                .iter()
                .map(|r| r.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        };
        KatsuraTriple::new(vertices, rows, self.a.clone(), self.b.clone(), c, field)
    }

    pub fn units(&self, field: Field) -> Result<UnitsModel> {
        UnitsModel::for_field(field, &self.primes)
    }

    pub fn from_triple(k: &KatsuraTriple) -> KatsuraSpec {
        KatsuraSpec {
            a: k.a().to_vec(),
            b: k.b().to_vec(),
            c: Some(k.c().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()),
            vertices: Some(k.vertices().to_vec()),
            rows: Some(k.rows().iter().map(|&i| k.vertices()[i].clone()).collect()),
            field: Some(k.field().to_string()),
            primes: Vec::new(),
        }
    }
}

pub fn matrix_from_i64(rows: &[Vec<i64>]) -> Result<Matrix> {
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != c) {
        return Err(Error::Schema("ragged matrix".into()));
    }
    Ok(Matrix::from_rows(rows))
}

impl StabilizeSpec {
    /// `(M, N, P as one exponent matrix per unit generator, Y)`.
    pub fn matrices(&self, units: &UnitsModel) -> Result<(Matrix, Matrix, Vec<Matrix>, Option<Matrix>)> {
        let m = matrix_from_i64(&self.m)?;
        let n = matrix_from_i64(&self.n)?;
        let k = m.rows();
        if self.p.len() != k || self.p.iter().any(|r| r.len() != k) {
            return Err(Error::Schema("P must have the shape of M".into()));
        }
        let s = units.orders().len();
        let mut p = vec![Matrix::zeros(k, k); s];
        for (i, row) in self.p.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let exps = units.encode(&units.field().parse(x)?)?;
                for g in 0..s {
                    p[g].set(i, j, exps[g].into());
                }
            }
        }
        let y = self.y.as_deref().map(matrix_from_i64).transpose()?;
        Ok((m, n, p, y))
    }
}
