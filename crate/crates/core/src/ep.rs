//! Twisted Exel-Pardo tuples: a group acting on a graph, the cocycle `φ`, and
//! the unit-valued twist `c`, together with their extensions to paths.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::group::{GroupElem, GroupModel, TableGroup};
use crate::scalar::{Field, Scalar};

/// Half-width of the window of integer group elements used for sampling and
/// for listing images of `∇_e`.
pub const DEFAULT_BOUND: i64 = 64;

#[derive(Clone, Debug)]
pub struct EpTuple {
    graph: Graph,
    group: GroupModel,
    field: Field,
    data: ActionData,
}

#[derive(Clone, Debug)]
enum ActionData {
    Cyclic(CyclicData),
    Table(TableData),
}

/// Data for `Z` and `Z/m`: the action of the generator `t` plus, for every
/// edge orbit of `t`, prefix tables of `φ(t^r, e)` and `c(t^r, e)` for
/// `0 ≤ r ≤ p` where `p` is the orbit length.
#[derive(Clone, Debug)]
struct CyclicData {
    gen_v: Vec<VertexId>,
    gen_e: Vec<EdgeId>,
    gen_phi: Vec<i64>,
    gen_c: Vec<Scalar>,
    vertex_orbits: Vec<Vec<VertexId>>,
    vertex_pos: Vec<(usize, usize)>,
    edge_orbits: Vec<EdgeOrbit>,
    edge_pos: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
struct EdgeOrbit {
    edges: Vec<EdgeId>,
    phi_pref: Vec<Vec<i64>>,
    c_pref: Vec<Vec<Scalar>>,
}

impl EdgeOrbit {
    fn len(&self) -> usize {
        self.edges.len()
    }

    /// `φ(t^p, e)`, the same for every edge of the orbit.
    fn drift(&self) -> i64 {
        self.phi_pref[0][self.len()]
    }

    /// `c(t^p, e)`, likewise orbit independent.
    fn cycle_twist(&self) -> &Scalar {
        &self.c_pref[0][self.len()]
    }
}

#[derive(Clone, Debug)]
struct TableData {
    act_v: Vec<Vec<VertexId>>,
    act_e: Vec<Vec<EdgeId>>,
    phi: Vec<Vec<GroupElem>>,
    c: Vec<Vec<Scalar>>,
}

/// One failed identity with a human-readable witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub law: &'static str,
    pub witness: String,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub failures: Vec<Failure>,
    pub checked: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, law: &'static str, witness: String) {
        const PER_LAW: usize = 16;
        if self.failures.iter().filter(|f| f.law == law).count() < PER_LAW {
            self.failures.push(Failure { law, witness });
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegClass {
    /// Every out-edge is strongly fixed by every group element.
    Fixed,
    /// Some out-edge has injective `∇_e` (and the vertex is not `Fixed`).
    PseudoFree,
    Neither,
}

#[derive(Clone, Debug)]
pub struct Stratification {
    pub reg0: Vec<VertexId>,
    pub reg1: Vec<VertexId>,
    pub other: Vec<VertexId>,
    pub pseudo_free: bool,
    pub partially_pseudo_free: bool,
    classes: Vec<Option<RegClass>>,
}

impl Stratification {
    /// Whether every regular vertex is in `reg0` or `reg1`.
    pub fn partition_holds(&self) -> bool {
        self.other.is_empty()
    }

    /// `None` for sinks.
    pub fn class(&self, v: VertexId) -> Option<RegClass> {
        self.classes[v.index()]
    }
}

/// A choice of out-edge `e_v` for each regular vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section(Vec<Option<EdgeId>>);

impl Section {
    pub fn edge(&self, v: VertexId) -> Option<EdgeId> {
        self.0[v.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        self.0.iter().enumerate().filter_map(|(i, e)| e.map(|e| (VertexId(i as u32), e)))
    }
}

/// Multiset image of `∇_e` over a window of group elements.
#[derive(Clone, Debug)]
pub struct NablaImage {
    pub entries: Vec<(EdgeId, GroupElem, usize)>,
    pub injective: bool,
}

fn orbits<T: Copy>(perm: &[T], idx: impl Fn(T) -> usize, mk: impl Fn(usize) -> T) -> (Vec<Vec<T>>, Vec<(usize, usize)>) {
    let n = perm.len();
    let mut pos = vec![(usize::MAX, 0); n];
    let mut out = Vec::new();
    for start in 0..n {
        if pos[start].0 != usize::MAX {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = start;
        while pos[x].0 == usize::MAX {
            pos[x] = (out.len(), orbit.len());
            orbit.push(mk(x));
            x = idx(perm[x]);
        }
        out.push(orbit);
    }
    (out, pos)
}

fn check_perm(n: usize, image: impl Iterator<Item = usize>, what: &str) -> Result<()> {
    let mut seen = vec![false; n];
    let mut count = 0;
    for i in image {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Schema(format!("action on {what} is not a bijection")));
        }
        count += 1;
    }
    if count != n {
        return Err(Error::Schema(format!("action on {what} has the wrong size")));
    }
    Ok(())
}

impl EpTuple {
    /// A tuple for `Z` or `Z/m` given by the action of the generator `t`, the
    /// exponents `k` with `φ(t, e) = t^k`, and the twists `c(t, e)`.
    pub fn cyclic(
        graph: Graph,
        group: GroupModel,
        field: Field,
        gen_v: Vec<VertexId>,
        gen_e: Vec<EdgeId>,
        gen_phi: Vec<i64>,
        gen_c: Vec<Scalar>,
    ) -> Result<EpTuple> {
        if !group.is_cyclic_model() {
            return Err(Error::Schema("generator data needs the integers or a cyclic group".into()));
        }
        check_perm(graph.num_vertices(), gen_v.iter().map(|v| v.index()), "vertices")?;
        check_perm(graph.num_edges(), gen_e.iter().map(|e| e.index()), "edges")?;
        if gen_phi.len() != graph.num_edges() || gen_c.len() != graph.num_edges() {
            return Err(Error::Schema("phi and c need one value per edge".into()));
        }
        if let Some(s) = gen_c.iter().find(|s| s.field() != field) {
            return Err(Error::Schema(format!("twist {s} is not in {field}")));
        }
        let (vertex_orbits, vertex_pos) = orbits(&gen_v, |v| v.index(), |i| VertexId(i as u32));
        let (raw, edge_pos) = orbits(&gen_e, |e| e.index(), |i| EdgeId(i as u32));
        let edge_orbits = raw
            .into_iter()
            .map(|edges| {
                let p = edges.len();
                let mut phi_pref = Vec::with_capacity(p);
                let mut c_pref = Vec::with_capacity(p);
                for i in 0..p {
                    let mut phis = vec![0i64];
                    let mut cs = vec![field.one()];
                    for j in 0..p {
                        let e = edges[(i + j) % p].index();
                        let next = phis[j].checked_add(gen_phi[e]).expect("group element overflow");
                        phis.push(next);
                        let next = &cs[j] * &gen_c[e];
                        cs.push(next);
                    }
                    phi_pref.push(phis);
                    c_pref.push(cs);
                }
                EdgeOrbit { edges, phi_pref, c_pref }
            })
            .collect();
        let data = CyclicData { gen_v, gen_e, gen_phi, gen_c, vertex_orbits, vertex_pos, edge_orbits, edge_pos };
        Ok(EpTuple { graph, group, field, data: ActionData::Cyclic(data) })
    }

    /// A tuple for a table group, with the action, `φ` and `c` listed for
    /// every group element (rows indexed like the table).
    pub fn table(
        graph: Graph,
        group: TableGroup,
        field: Field,
        act_v: Vec<Vec<VertexId>>,
        act_e: Vec<Vec<EdgeId>>,
        phi: Vec<Vec<GroupElem>>,
        c: Vec<Vec<Scalar>>,
    ) -> Result<EpTuple> {
        let n = group.names().len();
        if act_v.len() != n || act_e.len() != n || phi.len() != n || c.len() != n {
            return Err(Error::Schema("tables need one row per group element".into()));
        }
        for g in 0..n {
            check_perm(graph.num_vertices(), act_v[g].iter().map(|v| v.index()), "vertices")?;
            check_perm(graph.num_edges(), act_e[g].iter().map(|e| e.index()), "edges")?;
            if phi[g].len() != graph.num_edges() || c[g].len() != graph.num_edges() {
                return Err(Error::Schema("phi and c need one value per edge".into()));
            }
            if phi[g].iter().any(|h| h.0 < 0 || h.0 as usize >= n) {
                return Err(Error::Schema("phi value outside the group".into()));
            }
            if let Some(s) = c[g].iter().find(|s| s.field() != field) {
                return Err(Error::Schema(format!("twist {s} is not in {field}")));
            }
        }
        let data = TableData { act_v, act_e, phi, c };
        Ok(EpTuple { graph, group: GroupModel::Table(group), field, data: ActionData::Table(data) })
    }

    /// The trivial group acting trivially, `φ ≡ 1`, `c ≡ 1`.
    pub fn trivial(graph: Graph, field: Field) -> EpTuple {
        let gen_v = graph.vertices().collect();
        let gen_e: Vec<EdgeId> = graph.edges().collect();
        let n = gen_e.len();
        EpTuple::cyclic(graph, GroupModel::trivial(), field, gen_v, gen_e, vec![0; n], vec![field.one(); n])
            .expect("trivial data is well formed")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn group(&self) -> &GroupModel {
        &self.group
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Generator data `(t on vertices, t on edges, φ(t,·) exponents, c(t,·))`
    /// for the cyclic models.
    pub fn generator_data(&self) -> Option<(&[VertexId], &[EdgeId], &[i64], &[Scalar])> {
        match &self.data {
            ActionData::Cyclic(d) => Some((&d.gen_v, &d.gen_e, &d.gen_phi, &d.gen_c)),
            ActionData::Table(_) => None,
        }
    }

    fn exponent(&self, g: GroupElem) -> i64 {
        g.0
    }

    pub fn act_vertex(&self, g: GroupElem, v: VertexId) -> VertexId {
        match &self.data {
            ActionData::Cyclic(d) => {
                let (o, i) = d.vertex_pos[v.index()];
                let orbit = &d.vertex_orbits[o];
                orbit[(i as i64 + self.exponent(g)).rem_euclid(orbit.len() as i64) as usize]
            }
            ActionData::Table(d) => d.act_v[g.0 as usize][v.index()],
        }
    }

    pub fn act_edge(&self, g: GroupElem, e: EdgeId) -> EdgeId {
        match &self.data {
            ActionData::Cyclic(d) => {
                let (o, i) = d.edge_pos[e.index()];
                let orbit = &d.edge_orbits[o];
                orbit.edges[(i as i64 + self.exponent(g)).rem_euclid(orbit.len() as i64) as usize]
            }
            ActionData::Table(d) => d.act_e[g.0 as usize][e.index()],
        }
    }

    pub fn phi(&self, g: GroupElem, e: EdgeId) -> GroupElem {
        match &self.data {
            ActionData::Cyclic(d) => {
                let (o, i) = d.edge_pos[e.index()];
                let orbit = &d.edge_orbits[o];
                let (q, r) = self.exponent(g).div_mod_floor(&(orbit.len() as i64));
                let k = q
                    .checked_mul(orbit.drift())
                    .and_then(|x| x.checked_add(orbit.phi_pref[i][r as usize]))
                    .expect("group element overflow");
                self.group.gen_pow(k)
            }
            ActionData::Table(d) => d.phi[g.0 as usize][e.index()],
        }
    }

    pub fn c(&self, g: GroupElem, e: EdgeId) -> Scalar {
        match &self.data {
            ActionData::Cyclic(d) => {
                let (o, i) = d.edge_pos[e.index()];
                let orbit = &d.edge_orbits[o];
                let (q, r) = self.exponent(g).div_mod_floor(&(orbit.len() as i64));
                let base = &orbit.c_pref[i][r as usize];
                if q == 0 {
                    base.clone()
                } else {
                    orbit.cycle_twist().pow(q) * base
                }
            }
            ActionData::Table(d) => d.c[g.0 as usize][e.index()].clone(),
        }
    }

    /// `g(α)`, computed edge by edge: `g(e α') = g(e) φ(g,e)(α')`.
    pub fn act_path(&self, g: GroupElem, alpha: &Path) -> Path {
        if alpha.is_vertex() {
            return Path::vertex(self.act_vertex(g, alpha.src()));
        }
        let mut h = g;
        let mut edges = Vec::with_capacity(alpha.len());
        for &e in alpha.edges() {
            edges.push(self.act_edge(h, e));
            h = self.phi(h, e);
        }
        let src = self.graph.src(edges[0]);
        let rng = self.graph.rng(*edges.last().unwrap());
        Path::from_parts(src, rng, edges)
    }

    pub fn phi_path(&self, g: GroupElem, alpha: &Path) -> GroupElem {
        alpha.edges().iter().fold(g, |h, &e| self.phi(h, e))
    }

    pub fn c_path(&self, g: GroupElem, alpha: &Path) -> Scalar {
        let mut h = g;
        let mut acc = self.field.one();
        for &e in alpha.edges() {
            acc = acc * self.c(h, e);
            h = self.phi(h, e);
        }
        acc
    }

    /// `g(α)`, `φ(g,α)` and `c(g,α)` in one pass.
    pub fn act_all(&self, g: GroupElem, alpha: &Path) -> (Path, GroupElem, Scalar) {
        if alpha.is_vertex() {
            return (Path::vertex(self.act_vertex(g, alpha.src())), g, self.field.one());
        }
        let mut h = g;
        let mut acc = self.field.one();
        let mut edges = Vec::with_capacity(alpha.len());
        for &e in alpha.edges() {
            edges.push(self.act_edge(h, e));
            acc = acc * self.c(h, e);
            h = self.phi(h, e);
        }
        let src = self.graph.src(edges[0]);
        let rng = self.graph.rng(*edges.last().unwrap());
        (Path::from_parts(src, rng, edges), h, acc)
    }

    /// `∇_e(g) = (g⁻¹(e), φ(g, g⁻¹(e)))`.
    pub fn nabla(&self, e: EdgeId, g: GroupElem) -> (EdgeId, GroupElem) {
        let f = self.act_edge(self.group.inv(g), e);
        (f, self.phi(g, f))
    }

    /// Some `g` with `∇_e(g) = (f, h)`, preferring the identity. When `∇_e` is
    /// injective the answer is unique.
    pub fn nabla_preimage(&self, e: EdgeId, f: EdgeId, h: GroupElem) -> Option<GroupElem> {
        let one = self.group.identity();
        if f == e && h == one {
            return Some(one);
        }
        match &self.data {
            ActionData::Table(_) => {
                self.group.elements().unwrap().into_iter().find(|&g| self.nabla(e, g) == (f, h))
            }
            ActionData::Cyclic(d) => {
                // Solve for k = g⁻¹: k(e) = f and φ(k, e) = h⁻¹.
                let (o, i) = d.edge_pos[e.index()];
                let (o2, j) = d.edge_pos[f.index()];
                if o != o2 {
                    return None;
                }
                let orbit = &d.edge_orbits[o];
                let p = orbit.len() as i64;
                let r = (j as i64 - i as i64).rem_euclid(p);
                let base = orbit.phi_pref[i][r as usize];
                let target = self.group.inv(h).0;
                let drift = orbit.drift();
                let k = match self.group {
                    GroupModel::Integers => {
                        let diff = target.checked_sub(base)?;
                        if drift == 0 {
                            (diff == 0).then_some(r)?
                        } else if diff % drift == 0 {
                            (diff / drift).checked_mul(p)?.checked_add(r)?
                        } else {
                            return None;
                        }
                    }
                    GroupModel::Cyclic(m) => {
                        let m = m as i64;
                        (0..(m / p).max(1))
                            .find(|q| (q * drift + base - target).rem_euclid(m) == 0)
                            .map(|q| q * p + r)?
                    }
                    GroupModel::Table(_) => unreachable!(),
                };
                let k = self.group.gen_pow(k);
                debug_assert_eq!(self.act_edge(k, e), f);
                Some(self.group.inv(k))
            }
        }
    }

    /// Whether `∇_e` is injective, equivalently whether no `g ≠ 1` fixes `e`
    /// strongly. Exact for every group model.
    pub fn nabla_injective(&self, e: EdgeId) -> bool {
        self.strong_fixer(e).is_none()
    }

    /// Some `g ≠ 1` with `g(e) = e` and `φ(g, e) = 1`.
    pub fn strong_fixer(&self, e: EdgeId) -> Option<GroupElem> {
        let one = self.group.identity();
        match &self.data {
            ActionData::Table(_) => self
                .group
                .elements()
                .unwrap()
                .into_iter()
                .find(|&g| g != one && self.act_edge(g, e) == e && self.phi(g, e) == one),
            ActionData::Cyclic(d) => {
                let orbit = &d.edge_orbits[d.edge_pos[e.index()].0];
                let p = orbit.len() as i64;
                match self.group {
                    GroupModel::Integers => (orbit.drift() == 0).then(|| GroupElem(p)),
                    GroupModel::Cyclic(m) => {
                        // t^{qp} fixes e strongly iff q·drift ≡ 0 (mod m).
                        let m = m as i64;
                        let q = m / orbit.drift().rem_euclid(m).gcd(&m);
                        (q * p < m).then(|| self.group.gen_pow(q * p))
                    }
                    GroupModel::Table(_) => unreachable!(),
                }
            }
        }
    }

    /// Whether `Im ∇_e = {(e, 1)}`, i.e. every group element fixes `e` strongly.
    pub fn strongly_fixed_by_all(&self, e: EdgeId) -> bool {
        let one = self.group.identity();
        match &self.data {
            ActionData::Table(_) => self
                .group
                .elements()
                .unwrap()
                .into_iter()
                .all(|g| self.act_edge(g, e) == e && self.phi(g, e) == one),
            ActionData::Cyclic(_) => {
                let t = self.group.gen_pow(1);
                self.act_edge(t, e) == e && self.phi(t, e) == one
            }
        }
    }

    /// The image of `∇_e` over all of `G`, or over `t^k` with `|k| ≤ bound`
    /// for the integers, with multiplicities.
    pub fn nabla_image(&self, e: EdgeId, bound: i64) -> NablaImage {
        let mut entries: Vec<(EdgeId, GroupElem, usize)> = Vec::new();
        for g in self.group.elements_within(bound) {
            let (f, h) = self.nabla(e, g);
            match entries.iter_mut().find(|(f2, h2, _)| *f2 == f && *h2 == h) {
                Some(entry) => entry.2 += 1,
                None => entries.push((f, h, 1)),
            }
        }
        entries.sort();
        NablaImage { entries, injective: self.nabla_injective(e) }
    }

    pub fn stratify(&self) -> Stratification {
        let mut s = Stratification {
            reg0: Vec::new(),
            reg1: Vec::new(),
            other: Vec::new(),
            pseudo_free: self.graph.edges().all(|e| self.nabla_injective(e)),
            partially_pseudo_free: true,
            classes: vec![None; self.graph.num_vertices()],
        };
        for v in self.graph.regular_vertices() {
            let out = self.graph.out_edges(v);
            let has_injective = out.iter().any(|&e| self.nabla_injective(e));
            s.partially_pseudo_free &= has_injective;
            let class = if out.iter().all(|&e| self.strongly_fixed_by_all(e)) {
                s.reg0.push(v);
                RegClass::Fixed
            } else if has_injective {
                s.reg1.push(v);
                RegClass::PseudoFree
            } else {
                s.other.push(v);
                RegClass::Neither
            };
            s.classes[v.index()] = Some(class);
        }
        s
    }

    /// First injective out-edge on `reg1`, first out-edge elsewhere.
    pub fn default_section(&self, strat: &Stratification) -> Section {
        let mut map = vec![None; self.graph.num_vertices()];
        for v in self.graph.regular_vertices() {
            let out = self.graph.out_edges(v);
            let pick = match strat.class(v) {
                Some(RegClass::PseudoFree) => out.iter().copied().find(|&e| self.nabla_injective(e)),
                _ => out.first().copied(),
            };
            map[v.index()] = pick;
        }
        Section(map)
    }

    /// Checks a user-chosen section: `s(e_v) = v`, and `∇_{e_v}` injective on `reg1`.
    /// Vertices missing from `choice` get the default.
    pub fn section_from(&self, strat: &Stratification, choice: &[(VertexId, EdgeId)]) -> Result<Section> {
        let mut section = self.default_section(strat);
        for &(v, e) in choice {
            if !self.graph.is_regular(v) {
                return Err(Error::Schema(format!("{} is not a regular vertex", self.graph.vertex_name(v))));
            }
            if self.graph.src(e) != v {
                return Err(Error::Schema(format!(
                    "edge {} does not start at {}",
                    self.graph.edge_name(e),
                    self.graph.vertex_name(v)
                )));
            }
            if strat.class(v) == Some(RegClass::PseudoFree) && !self.nabla_injective(e) {
                return Err(Error::Unsupported(format!(
                    "∇ is not injective on the chosen edge {}",
                    self.graph.edge_name(e)
                )));
            }
            section.0[v.index()] = Some(e);
        }
        Ok(section)
    }

    /// Checks every tuple law. Finite groups are checked exhaustively; for the
    /// cyclic models the generator conditions are checked exactly and the
    /// cocycle laws additionally on `samples` random triples.
    pub fn validate(&self, seed: u64, samples: usize) -> ValidationReport {
        let mut report = ValidationReport::default();
        match &self.data {
            ActionData::Table(_) => self.validate_table(&mut report),
            ActionData::Cyclic(_) => self.validate_cyclic(&mut report, seed, samples),
        }
        report
    }

    fn name_g(&self, g: GroupElem) -> String {
        self.group.format(g)
    }

    fn check_units(&self, report: &mut ValidationReport, g: GroupElem) {
        for e in self.graph.edges() {
            report.checked += 1;
            if self.c(g, e).is_zero() {
                report.fail("c-unit", format!("c({}, {}) = 0", self.name_g(g), self.graph.edge_name(e)));
            }
        }
    }

    fn check_pointwise(&self, report: &mut ValidationReport, g: GroupElem) {
        let gr = &self.graph;
        for e in gr.edges() {
            let ge = self.act_edge(g, e);
            report.checked += 1;
            if gr.src(ge) != self.act_vertex(g, gr.src(e)) || gr.rng(ge) != self.act_vertex(g, gr.rng(e)) {
                report.fail(
                    "equivariance",
                    format!("{} moves {} to {}", self.name_g(g), gr.edge_name(e), gr.edge_name(ge)),
                );
            }
            let h = self.phi(g, e);
            for v in gr.vertices() {
                report.checked += 1;
                if self.act_vertex(h, v) != self.act_vertex(g, v) {
                    report.fail(
                        "ep-condition",
                        format!(
                            "φ({}, {}) = {} and {} act differently on {}",
                            self.name_g(g),
                            gr.edge_name(e),
                            self.name_g(h),
                            self.name_g(g),
                            gr.vertex_name(v)
                        ),
                    );
                }
            }
        }
    }

    fn check_cocycles(&self, report: &mut ValidationReport, g: GroupElem, h: GroupElem, e: EdgeId) {
        let gh = self.group.mul(g, h);
        let he = self.act_edge(h, e);
        let witness = || format!("g = {}, h = {}, e = {}", self.name_g(g), self.name_g(h), self.graph.edge_name(e));
        report.checked += 2;
        if self.phi(gh, e) != self.group.mul(self.phi(g, he), self.phi(h, e)) {
            report.fail("phi-cocycle", witness());
        }
        if self.c(gh, e) != self.c(g, he) * self.c(h, e) {
            report.fail("c-cocycle", witness());
        }
    }

    fn validate_table(&self, report: &mut ValidationReport) {
        let elems = self.group.elements().unwrap();
        let one = self.group.identity();
        for v in self.graph.vertices() {
            report.checked += 1;
            if self.act_vertex(one, v) != v {
                report.fail("action", format!("identity moves {}", self.graph.vertex_name(v)));
            }
        }
        for e in self.graph.edges() {
            report.checked += 1;
            if self.act_edge(one, e) != e {
                report.fail("action", format!("identity moves {}", self.graph.edge_name(e)));
            }
        }
        for &g in &elems {
            self.check_units(report, g);
            self.check_pointwise(report, g);
            for &h in &elems {
                let gh = self.group.mul(g, h);
                for v in self.graph.vertices() {
                    report.checked += 1;
                    if self.act_vertex(gh, v) != self.act_vertex(g, self.act_vertex(h, v)) {
                        report.fail(
                            "action",
                            format!("(gh)(x) ≠ g(h(x)) for g = {}, h = {}, x = {}", self.name_g(g), self.name_g(h), self.graph.vertex_name(v)),
                        );
                    }
                }
                for e in self.graph.edges() {
                    report.checked += 1;
                    if self.act_edge(gh, e) != self.act_edge(g, self.act_edge(h, e)) {
                        report.fail(
                            "action",
                            format!("(gh)(x) ≠ g(h(x)) for g = {}, h = {}, x = {}", self.name_g(g), self.name_g(h), self.graph.edge_name(e)),
                        );
                    }
                    self.check_cocycles(report, g, h, e);
                }
            }
        }
    }

    fn validate_cyclic(&self, report: &mut ValidationReport, seed: u64, samples: usize) {
        let ActionData::Cyclic(d) = &self.data else { unreachable!() };
        let t = self.group.gen_pow(1);
        self.check_units(report, t);
        self.check_pointwise(report, t);
        if let GroupModel::Cyclic(m) = self.group {
            let m = m as i64;
            for orbit in &d.vertex_orbits {
                report.checked += 1;
                if m % orbit.len() as i64 != 0 {
                    report.fail("cyclic-period", format!("t^{m} moves {}", self.graph.vertex_name(orbit[0])));
                }
            }
            for orbit in &d.edge_orbits {
                let p = orbit.len() as i64;
                let name = self.graph.edge_name(orbit.edges[0]);
                report.checked += 1;
                if m % p != 0 {
                    report.fail("cyclic-period", format!("t^{m} moves {name}"));
                    continue;
                }
                report.checked += 2;
                if ((m / p) as i128 * orbit.drift() as i128).rem_euclid(m as i128) != 0 {
                    report.fail("cyclic-period", format!("φ(t^{m}, {name}) ≠ 1"));
                }
                if !orbit.cycle_twist().pow(m / p).is_one() {
                    report.fail("cyclic-period", format!("c(t^{m}, {name}) ≠ 1"));
                }
            }
        }
        let edges: Vec<EdgeId> = self.graph.edges().collect();
        if edges.is_empty() {
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = match self.group {
            GroupModel::Cyclic(m) => m as i64,
            _ => DEFAULT_BOUND,
        };
        for _ in 0..samples {
            let g = self.group.gen_pow(rng.gen_range(-bound..=bound));
            let h = self.group.gen_pow(rng.gen_range(-bound..=bound));
            let e = edges[rng.gen_range(0..edges.len())];
            self.check_cocycles(report, g, h, e);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(vs: &[&str], es: &[(&str, &str, &str)]) -> Graph {
        Graph::new(
            vs.iter().map(|s| s.to_string()),
            es.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())),
        )
        .unwrap()
    }

    /// The Katsura tuple of `A = [[2]]`, `B = [[1]]`, `C = [[γ]]` written out by hand.
    fn katsura_2_1(gamma: i64) -> EpTuple {
        let g = graph(&["v"], &[("e0", "v", "v"), ("e1", "v", "v")]);
        let q = Field::Rationals;
        EpTuple::cyclic(
            g,
            GroupModel::Integers,
            q,
            vec![VertexId(0)],
            vec![EdgeId(1), EdgeId(0)],
            vec![0, 1],
            vec![q.from_i64(-gamma), q.one()],
        )
        .unwrap()
    }

    #[test]
    fn trivial_tuple_is_valid() {
        let t = EpTuple::trivial(graph(&["v", "w"], &[("e", "v", "w")]), Field::Rationals);
        assert!(t.validate(1, 100).is_valid());
        let s = t.stratify();
        assert_eq!(s.reg0, vec![VertexId(0)]);
        assert!(s.reg1.is_empty());
        assert!(s.partition_holds());
    }

    #[test]
    fn integers_acting_trivially() {
        let g = graph(&["v"], &[("e", "v", "v")]);
        let q = Field::Rationals;
        let t = EpTuple::cyclic(g, GroupModel::Integers, q, vec![VertexId(0)], vec![EdgeId(0)], vec![1], vec![q.one()])
            .unwrap();
        assert!(t.validate(7, 500).is_valid());
        assert_eq!(t.phi(GroupElem(-5), EdgeId(0)), GroupElem(-5));
        assert!(t.nabla_injective(EdgeId(0)));
    }

    #[test]
    fn katsura_paths() {
        let t = katsura_2_1(1);
        let g = t.graph();
        let e0e0 = Path::from_edges(g, vec![EdgeId(0), EdgeId(0)]).unwrap();
        let image = t.act_path(GroupElem(1), &e0e0);
        assert_eq!(g.format_path(&image), "e1 e0");
        assert_eq!(t.phi(GroupElem(1), EdgeId(0)), GroupElem(0));
        assert_eq!(t.phi(GroupElem(1), EdgeId(1)), GroupElem(1));
        assert_eq!(t.phi(GroupElem(2), EdgeId(0)), GroupElem(1));
        assert_eq!(t.phi(GroupElem(-1), EdgeId(0)), GroupElem(-1));
        assert_eq!(t.c(GroupElem(1), EdgeId(0)).to_string(), "-1");
        assert_eq!(t.c(GroupElem(2), EdgeId(1)).to_string(), "-1");
        let v = Path::vertex(VertexId(0));
        assert_eq!(t.phi_path(GroupElem(3), &v), GroupElem(3));
        assert!(t.c_path(GroupElem(3), &v).is_one());
    }

    #[test]
    fn katsura_nabla() {
        let t = katsura_2_1(3);
        let images: Vec<_> = (-20..=20).map(|k| t.nabla(EdgeId(0), GroupElem(k))).collect();
        for (i, a) in images.iter().enumerate() {
            assert!(!images[i + 1..].contains(a));
        }
        assert!(t.nabla_injective(EdgeId(0)));
        for k in -20..=20 {
            let (f, h) = t.nabla(EdgeId(0), GroupElem(k));
            assert_eq!(t.nabla_preimage(EdgeId(0), f, h), Some(GroupElem(k)));
        }
        let s = t.stratify();
        assert_eq!(s.reg1, vec![VertexId(0)]);
        assert!(s.pseudo_free);
    }

    #[test]
    fn strongly_fixed_loop() {
        let g = graph(&["v"], &[("e", "v", "v")]);
        let q = Field::Rationals;
        let t = EpTuple::cyclic(g, GroupModel::Integers, q, vec![VertexId(0)], vec![EdgeId(0)], vec![0], vec![q.one()])
            .unwrap();
        let image = t.nabla_image(EdgeId(0), 10);
        assert_eq!(image.entries, vec![(EdgeId(0), GroupElem(0), 21)]);
        assert!(!image.injective);
        assert_eq!(t.stratify().reg0, vec![VertexId(0)]);
    }

    #[test]
    fn cyclic_group_periods() {
        // Z/4 swapping two loops with φ(t, e0) = 1, φ(t, e1) = t^2: drift 2,
        // so φ(t^4, e) = t^4 = 1 and the data is consistent.
        let g = graph(&["v"], &[("e0", "v", "v"), ("e1", "v", "v")]);
        let q = Field::Rationals;
        let t = EpTuple::cyclic(
            g.clone(),
            GroupModel::Cyclic(4),
            q,
            vec![VertexId(0)],
            vec![EdgeId(1), EdgeId(0)],
            vec![0, 2],
            vec![q.one(), q.one()],
        )
        .unwrap();
        assert!(t.validate(3, 300).is_valid());
        // t^2 fixes e0 and φ(t^2, e0) = t^2 ≠ 1; nothing else fixes e0 strongly.
        assert!(t.nabla_injective(EdgeId(0)));

        let bad = EpTuple::cyclic(
            g,
            GroupModel::Cyclic(4),
            q,
            vec![VertexId(0)],
            vec![EdgeId(1), EdgeId(0)],
            vec![0, 1],
            vec![q.one(), q.one()],
        )
        .unwrap();
        let report = bad.validate(3, 300);
        assert!(report.failures.iter().any(|f| f.law == "cyclic-period"));
    }

    #[test]
    fn broken_table_cocycle_is_reported() {
        // Z/2 as a table, acting trivially on one loop, with φ(a, e) = 1 so that
        // φ(a·a, e) = 1 while φ(a, e)φ(a, e) = 1 holds, but c(a, e) = 2 breaks c.
        let g = graph(&["v"], &[("e", "v", "v")]);
        let q = Field::Rationals;
        let grp = TableGroup::new(vec!["1".into(), "a".into()], vec![vec![0, 1], vec![1, 0]]).unwrap();
        let t = EpTuple::table(
            g,
            grp,
            q,
            vec![vec![VertexId(0)]; 2],
            vec![vec![EdgeId(0)]; 2],
            vec![vec![GroupElem(0)]; 2],
            vec![vec![q.one()], vec![q.from_i64(2)]],
        )
        .unwrap();
        let report = t.validate(0, 0);
        assert!(!report.is_valid());
        assert!(report.failures.iter().all(|f| f.law == "c-cocycle"));
        assert!(report.failures[0].witness.contains("g = a, h = a"));
    }

    #[test]
    fn non_permutation_is_schema_error() {
        let g = graph(&["v"], &[("e0", "v", "v"), ("e1", "v", "v")]);
        let q = Field::Rationals;
        let r = EpTuple::cyclic(
            g,
            GroupModel::Integers,
            q,
            vec![VertexId(0)],
            vec![EdgeId(0), EdgeId(0)],
            vec![0, 0],
            vec![q.one(), q.one()],
        );
        assert!(matches!(r, Err(Error::Schema(_))));
    }
}
