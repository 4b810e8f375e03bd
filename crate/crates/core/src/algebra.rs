//! Elements of the Cohn algebra in the basis of triples, the ideal `K` and
//! its basis, and normal forms in the quotient `L(G,E,φ_c)`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ep::{EpTuple, RegClass, Section, Stratification};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Path, PathFilter, VertexId};
use crate::group::GroupElem;
use crate::scalar::Scalar;
use crate::semigroup::{mul_with_omega, Triple};

pub const DEFAULT_STEP_CAP: usize = 1_000_000;

/// A finite linear combination of triples with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgElem {
    terms: BTreeMap<Triple, Scalar>,
}

impl AlgElem {
    pub fn zero() -> AlgElem {
        AlgElem::default()
    }

    pub fn term(triple: Triple, coeff: Scalar) -> AlgElem {
        let mut x = AlgElem::zero();
        x.add_term(triple, coeff);
        x
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Triple, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t: &Triple) -> Option<&Scalar> {
        self.terms.get(t)
    }

    pub fn add_term(&mut self, triple: Triple, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(triple) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = &*slot.get() + &coeff;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &AlgElem) -> AlgElem {
        let mut out = self.clone();
        for (t, c) in other.terms() {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &AlgElem) -> AlgElem {
        let mut out = self.clone();
        for (t, c) in other.terms() {
            out.add_term(t.clone(), -c);
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> AlgElem {
        let mut out = AlgElem::zero();
        for (t, c) in self.terms() {
            out.add_term(t.clone(), c * s);
        }
        out
    }

    pub fn format(&self, t: &EpTuple) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms.iter().map(|(tr, c)| format!("{c}·{}", tr.format(t))).collect::<Vec<_>>().join(" + ")
    }
}

impl FromIterator<(Triple, Scalar)> for AlgElem {
    fn from_iter<I: IntoIterator<Item = (Triple, Scalar)>>(iter: I) -> Self {
        let mut x = AlgElem::zero();
        for (t, c) in iter {
            x.add_term(t, c);
        }
        x
    }
}

/// The product in `ℓ[S(G,E,φ), ω]`: triples multiply in `S` and pick up `ω`.
pub fn alg_mul(t: &EpTuple, x: &AlgElem, y: &AlgElem) -> AlgElem {
    let mut out = AlgElem::zero();
    for (a, ca) in x.terms() {
        for (b, cb) in y.terms() {
            if let Some((p, w)) = mul_with_omega(t, a, b) {
                out.add_term(p, &(ca * cb) * &w);
            }
        }
    }
    out
}

/// The vertex `v` as the triple `(v, 1, v)`.
pub fn vertex(t: &EpTuple, v: VertexId) -> AlgElem {
    let p = Path::vertex(v);
    AlgElem::term(Triple { alpha: p.clone(), g: t.group().identity(), beta: p }, t.field().one())
}

/// `v g = (v, g, g⁻¹(v))`.
pub fn vertex_group(t: &EpTuple, v: VertexId, g: GroupElem) -> AlgElem {
    let w = t.act_vertex(t.group().inv(g), v);
    AlgElem::term(Triple { alpha: Path::vertex(v), g, beta: Path::vertex(w) }, t.field().one())
}

/// The group element `g = Σ_v v g` of the (unital, finite graph) Cohn algebra.
pub fn group_element(t: &EpTuple, g: GroupElem) -> AlgElem {
    t.graph().vertices().fold(AlgElem::zero(), |acc, v| acc.add(&vertex_group(t, v, g)))
}

/// `α β*` for paths with a common range.
pub fn path_pair(t: &EpTuple, alpha: &Path, beta: &Path) -> Result<AlgElem> {
    let tr = Triple::new(t, alpha.clone(), t.group().identity(), beta.clone())?;
    Ok(AlgElem::term(tr, t.field().one()))
}

/// A basis element `α q_v g β*` of the ideal `K`, with `v = r(α)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KernelTerm {
    pub alpha: Path,
    pub v: VertexId,
    pub g: GroupElem,
    pub beta: Path,
}

impl KernelTerm {
    pub fn format(&self, t: &EpTuple) -> String {
        let gr = t.graph();
        format!(
            "{} q_{} {} ({})*",
            gr.format_path(&self.alpha),
            gr.vertex_name(self.v),
            t.group().format(self.g),
            gr.format_path(&self.beta)
        )
    }
}

/// `(α, g, β) − Σ_{s(e)=v} c(g, g⁻¹e) (αe, φ(g, g⁻¹e), β g⁻¹e)`, the expansion
/// of `α q_v g β*` in the triple basis, with `v = r(α)`.
fn q_expansion(t: &EpTuple, alpha: &Path, g: GroupElem, beta: &Path) -> Vec<(Triple, Scalar)> {
    let gr = t.graph();
    let v = alpha.rng();
    let ginv = t.group().inv(g);
    let mut out = vec![(Triple { alpha: alpha.clone(), g, beta: beta.clone() }, t.field().one())];
    for &e in gr.out_edges(v) {
        let f = t.act_edge(ginv, e);
        out.push((
            Triple { alpha: alpha.extended(gr, e), g: t.phi(g, f), beta: beta.extended(gr, f) },
            -t.c(g, f),
        ));
    }
    out
}

/// `q_v g = v g − Σ_{s(e)=v} e φ_c(g, g⁻¹(e)) g⁻¹(e)*`.
pub fn q_elem(t: &EpTuple, v: VertexId, g: GroupElem) -> Result<AlgElem> {
    kernel_element(t, &KernelTerm { alpha: Path::vertex(v), v, g, beta: Path::vertex(t.act_vertex(t.group().inv(g), v)) })
}

/// `α q_v g β*` expanded in the triple basis.
pub fn kernel_element(t: &EpTuple, k: &KernelTerm) -> Result<AlgElem> {
    let gr = t.graph();
    if !gr.is_regular(k.v) {
        return Err(Error::Domain(format!("{} is not a regular vertex", gr.vertex_name(k.v))));
    }
    if k.alpha.rng() != k.v || k.beta.rng() != t.act_vertex(t.group().inv(k.g), k.v) {
        return Err(Error::Domain(format!("{} is not a basis element of K", k.format(t))));
    }
    Ok(q_expansion(t, &k.alpha, k.g, &k.beta).into_iter().collect())
}

/// All triples `(α, g, β)` with `|α|, |β| ≤ n` and `g` from `group`.
pub fn triples_up_to(t: &EpTuple, n: usize, group: &[GroupElem]) -> Vec<Triple> {
    let paths = t.graph().paths_up_to(n, PathFilter::default());
    let mut out = Vec::new();
    for alpha in &paths {
        for &g in group {
            for beta in &paths {
                if alpha.rng() == t.act_vertex(g, beta.rng()) {
                    out.push(Triple { alpha: alpha.clone(), g, beta: beta.clone() });
                }
            }
        }
    }
    out
}

/// Dimension of the span of `elems`, by Gaussian elimination over the field.
pub fn rank(elems: &[AlgElem]) -> usize {
    // Echelon rows keyed by their pivot (smallest triple).
    let mut pivots: BTreeMap<Triple, AlgElem> = BTreeMap::new();
    for x in elems {
        let mut x = x.clone();
        loop {
            let Some((lead, c)) = x.terms().next().map(|(t, c)| (t.clone(), c.clone())) else { break };
            match pivots.get(&lead) {
                Some(row) => {
                    let rc = row.coeff(&lead).unwrap();
                    x = x.sub(&row.scale(&(&c * &rc.inv().unwrap())));
                }
                None => {
                    pivots.insert(lead, x);
                    break;
                }
            }
        }
    }
    pivots.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Longest `α` first, then the triple order.
    Deepest,
    /// Uniformly random choice among pending terms.
    Shuffled(u64),
}

/// Rewrites Cohn algebra elements to their representatives on `B″`.
#[derive(Clone, Debug)]
pub struct Reducer<'a> {
    tuple: &'a EpTuple,
    strat: Stratification,
    section: Section,
    pub step_cap: usize,
    pub order: Order,
}

enum Worklist {
    Deepest(BTreeSet<(Reverse<usize>, Triple)>),
    Shuffled(Vec<Triple>, ChaCha8Rng),
}

impl Worklist {
    fn push(&mut self, t: Triple) {
        match self {
            Worklist::Deepest(set) => {
                set.insert((Reverse(t.alpha.len()), t));
            }
            Worklist::Shuffled(v, _) => v.push(t),
        }
    }

    fn pop(&mut self) -> Option<Triple> {
        match self {
            Worklist::Deepest(set) => set.pop_first().map(|(_, t)| t),
            Worklist::Shuffled(v, rng) => {
                if v.is_empty() {
                    None
                } else {
                    let i = rng.gen_range(0..v.len());
                    Some(v.swap_remove(i))
                }
            }
        }
    }
}

impl<'a> Reducer<'a> {
    /// Uses the default section. Fails unless every regular vertex is in
    /// `reg0` or `reg1`.
    pub fn new(tuple: &'a EpTuple) -> Result<Reducer<'a>> {
        Self::with_section(tuple, &[])
    }

    pub fn with_section(tuple: &'a EpTuple, choice: &[(VertexId, EdgeId)]) -> Result<Reducer<'a>> {
        let strat = tuple.stratify();
        if !strat.partition_holds() {
            let names: Vec<_> = strat.other.iter().map(|&v| tuple.graph().vertex_name(v)).collect();
            return Err(Error::Unsupported(format!(
                "regular vertices outside reg0 ∪ reg1: {}",
                names.join(", ")
            )));
        }
        let section = tuple.section_from(&strat, choice)?;
        Ok(Reducer { tuple, strat, section, step_cap: DEFAULT_STEP_CAP, order: Order::Deepest })
    }

    pub fn tuple(&self) -> &EpTuple {
        self.tuple
    }

    pub fn section(&self) -> &Section {
        &self.section
    }

    pub fn stratification(&self) -> &Stratification {
        &self.strat
    }

    /// The replacement for a term outside `B″`, `None` if it lies in `B″`.
    fn rewrite(&self, tr: &Triple) -> Option<Vec<(Triple, Scalar)>> {
        let t = self.tuple;
        let gr = t.graph();
        if let (Some(last), Some(f)) = (tr.alpha.last_edge(), tr.beta.last_edge()) {
            let v = gr.src(last);
            if self.section.edge(v) == Some(last) {
                if let Some(g) = t.nabla_preimage(last, f, tr.g) {
                    // α e_v φ(g, f) (β f)* with f = g⁻¹(e_v): solve the q_v g relation for it.
                    let alpha = tr.alpha.without_last(gr);
                    let beta = tr.beta.without_last(gr);
                    let scale = t.c(g, f).inv().expect("twists are units");
                    let out = q_expansion(t, &alpha, g, &beta)
                        .into_iter()
                        .filter(|(x, _)| x.alpha.last_edge() != Some(last) || x.alpha.len() == alpha.len())
                        .map(|(x, c)| (x, &c * &scale))
                        .collect();
                    return Some(out);
                }
            }
        }
        let v = tr.alpha.rng();
        if self.strat.class(v) == Some(RegClass::Fixed) && !t.group().is_identity(tr.g) {
            // α v g β* ≡ Σ_e c(g, g⁻¹e) αe φ(g, g⁻¹e) (βg⁻¹e)* on reg0
            let mut exp = q_expansion(t, &tr.alpha, tr.g, &tr.beta);
            exp.remove(0);
            return Some(exp.into_iter().map(|(x, c)| (x, -c)).collect());
        }
        None
    }

    /// Whether a triple lies in `B″`.
    pub fn is_normal(&self, tr: &Triple) -> bool {
        self.rewrite(tr).is_none()
    }

    /// The representative of `x + K` supported on `B″`.
    pub fn nf(&self, x: &AlgElem) -> Result<AlgElem> {
        let mut elem = x.clone();
        let mut work = match self.order {
            Order::Deepest => Worklist::Deepest(BTreeSet::new()),
            Order::Shuffled(seed) => Worklist::Shuffled(Vec::new(), ChaCha8Rng::seed_from_u64(seed)),
        };
        for (tr, _) in x.terms() {
            work.push(tr.clone());
        }
        let mut steps = 0usize;
        while let Some(tr) = work.pop() {
            let Some(coeff) = elem.terms.get(&tr).cloned() else { continue };
            let Some(replacement) = self.rewrite(&tr) else { continue };
            steps += 1;
            if steps > self.step_cap {
                return Err(Error::Divergence(self.step_cap));
            }
            elem.terms.remove(&tr);
            for (k, c) in replacement {
                elem.add_term(k.clone(), &coeff * &c);
                work.push(k);
            }
        }
        Ok(elem)
    }

    pub fn equal_in_l(&self, x: &AlgElem, y: &AlgElem) -> Result<bool> {
        Ok(self.nf(&x.sub(y))?.is_zero())
    }

    /// Coordinates of `x ∈ K` in the basis `{α q_v g β*}`. Terms are peeled
    /// from the shortest `α` upwards: the shortest triple of `x` is the
    /// leading triple of exactly one basis element.
    pub fn to_kernel_basis(&self, x: &AlgElem) -> Result<Vec<(KernelTerm, Scalar)>> {
        let t = self.tuple;
        let rest = self.nf(x)?;
        if !rest.is_zero() {
            return Err(Error::NotInKernel(format!("normal form is {}", rest.format(t))));
        }
        let mut rem = x.clone();
        let mut out = Vec::new();
        let mut steps = 0usize;
        while let Some((tr, c)) = rem
            .terms()
            .min_by(|a, b| a.0.alpha.len().cmp(&b.0.alpha.len()).then(a.0.cmp(b.0)))
            .map(|(t, c)| (t.clone(), c.clone()))
        {
            steps += 1;
            if steps > self.step_cap {
                return Err(Error::Divergence(self.step_cap));
            }
            let v = tr.alpha.rng();
            if !t.graph().is_regular(v) {
                return Err(Error::NotInKernel(format!("term {} ends at a sink", tr.format(t))));
            }
            let k = KernelTerm { alpha: tr.alpha.clone(), v, g: tr.g, beta: tr.beta.clone() };
            rem = rem.sub(&kernel_element(t, &k)?.scale(&c));
            out.push((k, c));
        }
        let rebuilt = out
            .iter()
            .map(|(k, c)| kernel_element(t, k).map(|x| x.scale(c)))
            .try_fold(AlgElem::zero(), |acc, x| x.map(|x| acc.add(&x)))?;
        assert_eq!(&rebuilt, x, "kernel basis expansion does not reproduce the input");
        out.sort();
        Ok(out)
    }
}
