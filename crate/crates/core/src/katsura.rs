//! Twisted Katsura tuples built from matrices `(A, B, C)`, and the matrix
//! predicates attached to them.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::{alg_mul, group_element, AlgElem};
use crate::ep::EpTuple;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::group::{GroupElem, GroupModel};
use crate::scalar::{Field, Scalar};
use crate::semigroup::Triple;

/// Matrices indexed by regular vertices × all vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatsuraTriple {
    vertices: Vec<String>,
    rows: Vec<usize>,
    a: Vec<Vec<u64>>,
    b: Vec<Vec<i64>>,
    c: Vec<Vec<Scalar>>,
    field: Field,
}

impl KatsuraTriple {
    /// `rows[i]` is the column index of the vertex labelling row `i`.
    pub fn new(
        vertices: Vec<String>,
        rows: Vec<usize>,
        a: Vec<Vec<u64>>,
        b: Vec<Vec<i64>>,
        c: Vec<Vec<Scalar>>,
        field: Field,
    ) -> Result<KatsuraTriple> {
        let n = vertices.len();
        let r = rows.len();
        let shape_ok = a.len() == r
            && b.len() == r
            && c.len() == r
            && a.iter().all(|row| row.len() == n)
            && b.iter().all(|row| row.len() == n)
            && c.iter().all(|row| row.len() == n);
        if !shape_ok {
            return Err(Error::Construction(format!("A, B and C must all be {r}×{n}")));
        }
        let mut seen = BTreeSet::new();
        for &i in &rows {
            if i >= n || !seen.insert(i) {
                return Err(Error::Construction("row labels must be distinct vertices".into()));
            }
        }
        for (i, name) in vertices.iter().enumerate() {
            if vertices[..i].contains(name) {
                return Err(Error::Construction(format!("duplicate vertex {name:?}")));
            }
        }
        for i in 0..r {
            if a[i].iter().all(|&x| x == 0) {
                return Err(Error::Construction(format!("row {} of A is zero", vertices[rows[i]])));
            }
            for j in 0..n {
                let at = || format!("({}, {})", vertices[rows[i]], vertices[j]);
                if c[i][j].field() != field {
                    return Err(Error::Construction(format!("C{} is not in {field}", at())));
                }
                if c[i][j].is_zero() {
                    return Err(Error::Construction(format!("C{} is not a unit", at())));
                }
                if a[i][j] == 0 && b[i][j] != 0 {
                    return Err(Error::Construction(format!("A{0} = 0 but B{0} ≠ 0", at())));
                }
                if a[i][j] == 0 && !c[i][j].is_one() {
                    return Err(Error::Construction(format!("A{0} = 0 but C{0} ≠ 1", at())));
                }
            }
        }
        Ok(KatsuraTriple { vertices, rows, a, b, c, field })
    }

    /// Square matrices with every vertex regular and default labels.
    pub fn square(a: Vec<Vec<u64>>, b: Vec<Vec<i64>>, c: Option<Vec<Vec<Scalar>>>, field: Field) -> Result<KatsuraTriple> {
        let n = a.len();
        let c = c.unwrap_or_else(|| vec![vec![field.one(); n]; n]);
        KatsuraTriple::new(default_labels(n), (0..n).collect(), a, b, c, field)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn a(&self) -> &[Vec<u64>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn c(&self) -> &[Vec<Scalar>] {
        &self.c
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Same matrices over another field. Entries of `C` must be integers or
    /// come from `field` already.
    pub fn with_field(&self, field: Field) -> Result<KatsuraTriple> {
        if field == self.field {
            return Ok(self.clone());
        }
        let c = self
            .c
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| match s.as_rational() {
                        Some(r) if r.is_integer() => Ok(field.from_bigint(r.numer())),
                        _ => Err(Error::Construction(format!("cannot move C entry {s} to {field}"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        KatsuraTriple::new(self.vertices.clone(), self.rows.clone(), self.a.clone(), self.b.clone(), c, field)
    }

    fn row_of(&self, v: usize) -> Option<usize> {
        self.rows.iter().position(|&r| r == v)
    }

    fn edge_name(&self, i: usize, j: usize, k: u64) -> String {
        if self.vertices.len() == 1 {
            format!("e{k}")
        } else {
            format!("e_{}_{}_{k}", self.vertices[self.rows[i]], self.vertices[j])
        }
    }

    /// The graph with `A[v][w]` edges from `v` to `w`, numbered `0..A[v][w]`.
    pub fn graph(&self) -> Graph {
        let mut edges = Vec::new();
        for (i, &v) in self.rows.iter().enumerate() {
            for j in 0..self.vertices.len() {
                for k in 0..self.a[i][j] {
                    edges.push((self.edge_name(i, j, k), self.vertices[v].clone(), self.vertices[j].clone()));
                }
            }
        }
        Graph::new(self.vertices.clone(), edges).expect("generated names are distinct")
    }

    /// The edge `e_k ∈ vE¹w` of the built graph, where `i` is the row of `v`.
    pub fn edge(&self, i: usize, j: usize, k: u64) -> EdgeId {
        let mut idx = 0u64;
        for i2 in 0..self.rows.len() {
            for j2 in 0..self.vertices.len() {
                if (i2, j2) == (i, j) {
                    assert!(k < self.a[i][j], "edge index out of range");
                    return EdgeId((idx + k) as u32);
                }
                idx += self.a[i2][j2];
            }
        }
        panic!("no such matrix entry")
    }

    /// The twisted Katsura tuple: `Z` fixes the vertices, `t` sends `e_n` to
    /// `e_{(B+n) mod A}` with `φ(t, e_n) = t^{⌊(B+n)/A⌋}`, and `c(t, e_0)`
    /// is `(−1)^{(A−1)B} C`, all other `c(t, e_n)` being 1.
    pub fn build_tuple(&self) -> EpTuple {
        let graph = self.graph();
        let field = self.field;
        let mut gen_e = Vec::with_capacity(graph.num_edges());
        let mut gen_phi = Vec::with_capacity(graph.num_edges());
        let mut gen_c = Vec::with_capacity(graph.num_edges());
        let mut base = 0u32;
        for i in 0..self.rows.len() {
            for j in 0..self.vertices.len() {
                let a = self.a[i][j] as i64;
                let b = self.b[i][j];
                for n in 0..a {
                    let shifted = b.checked_add(n).expect("B entry too large");
                    gen_e.push(EdgeId(base + shifted.rem_euclid(a) as u32));
                    gen_phi.push(shifted.div_euclid(a));
                    gen_c.push(if n == 0 {
                        let sign = if (a - 1) * b.rem_euclid(2) % 2 == 0 { field.one() } else { -field.one() };
                        sign * &self.c[i][j]
                    } else {
                        field.one()
                    });
                }
                base += a as u32;
            }
        }
        let gen_v = graph.vertices().collect();
        EpTuple::cyclic(graph, GroupModel::Integers, field, gen_v, gen_e, gen_phi, gen_c)
            .expect("Katsura data is well formed")
    }

    /// The entry `A[v][w]` for vertex indices, 0 for non-regular `v`.
    pub fn a_at(&self, v: usize, w: usize) -> u64 {
        self.row_of(v).map_or(0, |i| self.a[i][w])
    }

    pub fn b_at(&self, v: usize, w: usize) -> i64 {
        self.row_of(v).map_or(0, |i| self.b[i][w])
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    if n == 1 {
        vec!["v".into()]
    } else {
        (0..n).map(|i| format!("v{i}")).collect()
    }
}

/// Bullet-by-bullet verdicts of the KSPI conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KspiReport {
    pub zero_pattern: bool,
    /// Every ordered pair, including `(v, v)`, joined by a path of positive length.
    pub reachable_strict: bool,
    /// Every ordered pair of distinct vertices joined by a path.
    pub reachable_lenient: bool,
    /// Every vertex has two distinct first-return closed paths.
    pub two_loops: bool,
    /// Fewest loop edges at any vertex.
    pub min_loop_edges: usize,
    pub diagonal_ones: bool,
    /// The first failing bullet, if any.
    pub failure: Option<String>,
}

impl KspiReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Counts closed paths at `v` that meet `v` only at their ends, stopping at
/// `stop` and never following more than `cap` edges.
fn first_return_paths(g: &Graph, v: VertexId, cap: usize, stop: usize) -> usize {
    fn go(g: &Graph, v: VertexId, at: VertexId, depth: usize, cap: usize, stop: usize, found: &mut usize) {
        if *found >= stop || depth >= cap {
            return;
        }
        for &e in g.out_edges(at) {
            if *found >= stop {
                return;
            }
            let r = g.rng(e);
            if r == v {
                *found += 1;
            } else {
                go(g, v, r, depth + 1, cap, stop, found);
            }
        }
    }
    let mut found = 0;
    go(g, v, v, 0, cap, stop, &mut found);
    found
}

pub fn is_kspi(k: &KatsuraTriple) -> KspiReport {
    let g = k.graph();
    let n = g.num_vertices();
    // The constructor already enforces the zero pattern.
    let zero_pattern = (0..k.rows.len()).all(|i| (0..n).all(|j| k.a[i][j] != 0 || k.b[i][j] == 0));
    let reachable_strict = g.vertices().all(|v| g.vertices().all(|w| g.reachable_nontrivially(v, w)));
    let reachable_lenient = g.vertices().all(|v| g.vertices().all(|w| v == w || g.reachable_nontrivially(v, w)));
    let cap = g.num_edges() + 1;
    let two_loops = g.vertices().all(|v| first_return_paths(&g, v, cap, 2) >= 2);
    let min_loop_edges = g
        .vertices()
        .map(|v| g.out_edges(v).iter().filter(|&&e| g.rng(e) == v).count())
        .min()
        .unwrap_or(0);
    let diagonal_ones = (0..n).all(|v| k.row_of(v).is_some() && k.b_at(v, v) == 1);
    let failure = if !zero_pattern {
        Some("zero pattern: A_{v,w} = 0 must force B_{v,w} = 0".to_string())
    } else if !reachable_strict {
        Some("connectivity: some ordered pair of vertices is not joined by a path".to_string())
    } else if !two_loops {
        Some("loops: some vertex has fewer than two distinct first-return closed paths".to_string())
    } else if !diagonal_ones {
        let bad = (0..n).find(|&v| k.row_of(v).is_none() || k.b_at(v, v) != 1).unwrap();
        Some(format!("diagonal: B_{{{0},{0}}} ≠ 1", k.vertices[bad]))
    } else {
        None
    };
    KspiReport { zero_pattern, reachable_strict, reachable_lenient, two_loops, min_loop_edges, diagonal_ones, failure }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct HausdorffReport {
    pub verdict: Verdict,
    /// Pairs `(v, w)` with `A ≠ 0 = B` and their verdicts.
    pub pairs: Vec<(usize, usize, Verdict)>,
    /// A witness for the first failing pair: `l`, a path from `w`, and a closed walk.
    pub witness: Option<(u64, Vec<EdgeId>, Vec<EdgeId>)>,
}

pub const DEFAULT_PATH_LEN_CAP: usize = 12;

fn lcm_of_a(k: &KatsuraTriple) -> u64 {
    k.a.iter().flatten().filter(|&&x| x != 0).fold(1u64, |acc, &x| acc.lcm(&x))
}

/// Checks, for every `(v, w)` with `A ≠ 0 = B` and each `l ≤ l_cap`, whether
/// only finitely many paths `e_1 ⋯ e_n` from `w` make `l Π_{i<n} B/A` an
/// integer. Products are taken literally, so a zero entry of `B` makes the
/// product 0. `l_cap` defaults to the lcm of the entries of `A`.
pub fn hausdorff_condition(k: &KatsuraTriple, path_len_cap: usize, l_cap: Option<u64>) -> HausdorffReport {
    let g = k.graph();
    let l_cap = l_cap.unwrap_or_else(|| lcm_of_a(k)).max(1);
    let ratio = |e: EdgeId| {
        let (v, w) = (g.src(e).index(), g.rng(e).index());
        BigRational::new(BigInt::from(k.b_at(v, w)), BigInt::from(k.a_at(v, w)))
    };
    // Closed walks of bounded length with an integral ratio product, per vertex.
    let walk_cap = g.num_edges().min(path_len_cap).max(1);
    let mut integral_cycles: Vec<Vec<(BigRational, Vec<EdgeId>)>> = vec![Vec::new(); g.num_vertices()];
    for u in g.vertices() {
        let mut level: Vec<(VertexId, BigRational, Vec<EdgeId>)> = vec![(u, BigRational::one(), Vec::new())];
        let mut seen = BTreeSet::new();
        for _ in 0..walk_cap {
            let mut keys = BTreeSet::new();
            let mut next = Vec::new();
            for (at, x, walk) in &level {
                for &e in g.out_edges(*at) {
                    let y = x * ratio(e);
                    if !keys.insert((g.rng(e), y.clone())) {
                        continue;
                    }
                    let mut w2 = walk.clone();
                    w2.push(e);
                    if g.rng(e) == u && y.is_integer() && seen.insert(y.clone()) {
                        integral_cycles[u.index()].push((y.clone(), w2.clone()));
                    }
                    next.push((g.rng(e), y, w2));
                }
            }
            level = next;
        }
    }
    // A prime dividing a denominator is fatal once no reachable B can cancel it.
    let reach: Vec<Vec<EdgeId>> = g
        .vertices()
        .map(|u| {
            let mut seen = vec![false; g.num_vertices()];
            let mut stack = vec![u];
            let mut edges = Vec::new();
            seen[u.index()] = true;
            while let Some(x) = stack.pop() {
                for &e in g.out_edges(x) {
                    edges.push(e);
                    if !std::mem::replace(&mut seen[g.rng(e).index()], true) {
                        stack.push(g.rng(e));
                    }
                }
            }
            edges
        })
        .collect();
    let dead = |u: VertexId, x: &BigRational| -> bool {
        if x.is_zero() || x.denom().is_one() {
            return false;
        }
        let bs: Vec<BigInt> = reach[u.index()].iter().map(|&e| ratio(e).numer().abs()).collect();
        if bs.iter().any(|b| b.is_zero()) {
            return false;
        }
        let mut d = x.denom().clone();
        let mut p = BigInt::from(2);
        while &p * &p <= d {
            if (&d % &p).is_zero() {
                if bs.iter().all(|b| !(b % &p).is_zero()) {
                    return true;
                }
                while (&d % &p).is_zero() {
                    d /= &p;
                }
            }
            p += 1;
        }
        d > BigInt::one() && bs.iter().all(|b| !(b % &d).is_zero())
    };

    let mut report = HausdorffReport { verdict: Verdict::Holds, pairs: Vec::new(), witness: None };
    for (i, &v) in k.rows.iter().enumerate() {
        for w in 0..k.vertices.len() {
            if k.a[i][w] == 0 || k.b[i][w] != 0 {
                continue;
            }
            let mut pair = Verdict::Holds;
            'ls: for l in 1..=l_cap {
                let mut frontier: BTreeSet<(VertexId, BigRational, Vec<EdgeId>)> = BTreeSet::new();
                frontier.insert((VertexId(w as u32), BigRational::from_integer(l.into()), Vec::new()));
                let mut depth = 0;
                loop {
                    for (u, x, path) in &frontier {
                        for (rho, walk) in &integral_cycles[u.index()] {
                            if (x * rho).is_integer() {
                                pair = Verdict::Fails;
                                if report.witness.is_none() {
                                    report.witness = Some((l, path.clone(), walk.clone()));
                                }
                                break 'ls;
                            }
                        }
                    }
                    let live: Vec<_> = frontier.iter().filter(|(u, x, _)| !dead(*u, x)).collect();
                    if live.is_empty() {
                        break;
                    }
                    if depth >= path_len_cap {
                        pair = Verdict::Undetermined;
                        break;
                    }
                    let mut next = BTreeSet::new();
                    let mut keys = BTreeSet::new();
                    for (u, x, path) in live {
                        for &e in g.out_edges(*u) {
                            let y = x * ratio(e);
                            if keys.insert((g.rng(e), y.clone())) {
                                let mut p2 = path.clone();
                                p2.push(e);
                                next.insert((g.rng(e), y, p2));
                            }
                        }
                    }
                    frontier = next;
                    depth += 1;
                }
            }
            report.pairs.push((v, w, pair));
            report.verdict = match (report.verdict, pair) {
                (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
                (Verdict::Undetermined, _) | (_, Verdict::Undetermined) => Verdict::Undetermined,
                _ => Verdict::Holds,
            };
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KregReport {
    /// `B_{v,w} = 0 ⟺ A_{v,w} = 0` everywhere.
    pub cond_i: bool,
    /// In every row, a zero of `B` on the support of `A` forces all of `B`
    /// on that support to vanish.
    pub cond_ii: bool,
    /// Flatness verdict for every `(v, w)` with `A ≠ 0`, over a field.
    pub flat: Vec<(usize, usize, bool)>,
}

pub fn kreg_conditions(k: &KatsuraTriple) -> KregReport {
    let mut cond_i = true;
    let mut cond_ii = true;
    let mut flat = Vec::new();
    for (i, &v) in k.rows.iter().enumerate() {
        let support: Vec<usize> = (0..k.vertices.len()).filter(|&w| k.a[i][w] != 0).collect();
        let some_zero = support.iter().any(|&w| k.b[i][w] == 0);
        let some_nonzero = support.iter().any(|&w| k.b[i][w] != 0);
        cond_i &= (0..k.vertices.len()).all(|w| (k.a[i][w] == 0) == (k.b[i][w] == 0));
        cond_ii &= !(some_zero && some_nonzero);
        for &w in &support {
            flat.push((v, w, k.b[i][w] != 0 || !some_nonzero));
        }
    }
    KregReport { cond_i, cond_ii, flat }
}

/// `u_{v,w} = e_0 t e*_{A−1} + Σ_{i<A−1} e_{i+1} e_i*` in the Cohn algebra of
/// the built tuple; `i` is the row of `v`.
pub fn u_element(k: &KatsuraTriple, t: &EpTuple, i: usize, w: usize) -> AlgElem {
    let a = k.a[i][w];
    let one = t.field().one();
    let e = |n: u64| Path::edge(t.graph(), k.edge(i, w, n));
    let mut u = AlgElem::term(Triple { alpha: e(0), g: GroupElem(1), beta: e(a - 1) }, one.clone());
    for n in 0..a - 1 {
        u.add_term(Triple { alpha: e(n + 1), g: GroupElem(0), beta: e(n) }, one.clone());
    }
    u
}

/// `u^n` computed by repeated multiplication; negative powers use the
/// partial inverse `u*`, and `u^0 = Σ e_i e_i*`.
pub fn u_power(k: &KatsuraTriple, t: &EpTuple, i: usize, w: usize, n: i64) -> AlgElem {
    let u = u_element(k, t, i, w);
    let step = if n >= 0 {
        u
    } else {
        u.terms()
            .map(|(tr, c)| (tr.star(t), c.clone()))
            .collect()
    };
    let a = k.a[i][w];
    let mut acc: AlgElem = (0..a)
        .map(|m| {
            let e = Path::edge(t.graph(), k.edge(i, w, m));
            (Triple { alpha: e.clone(), g: GroupElem(0), beta: e }, t.field().one())
        })
        .collect();
    for _ in 0..n.unsigned_abs() {
        acc = alg_mul(t, &acc, &step);
    }
    acc
}

/// `Σ_i e_{(i+n) mod A} t^{⌊(n+i)/A⌋} e_i*`.
pub fn u_power_closed_form(k: &KatsuraTriple, t: &EpTuple, i: usize, w: usize, n: i64) -> AlgElem {
    let a = k.a[i][w] as i64;
    (0..a)
        .map(|m| {
            let alpha = Path::edge(t.graph(), k.edge(i, w, (m + n).rem_euclid(a) as u64));
            let beta = Path::edge(t.graph(), k.edge(i, w, m as u64));
            (Triple { alpha, g: GroupElem((n + m).div_euclid(a)), beta }, t.field().one())
        })
        .collect()
}

/// `(−1)^{(A−1)B} C⁻¹ t·(e_0 e_0*) + Σ_{i≥1} t·(e_i e_i*)`.
pub fn u_lemma_rhs(k: &KatsuraTriple, t: &EpTuple, i: usize, w: usize) -> AlgElem {
    let a = k.a[i][w];
    let b = k.b[i][w];
    let field = t.field();
    let tt = group_element(t, GroupElem(1));
    let mut out = AlgElem::zero();
    for m in 0..a {
        let e = Path::edge(t.graph(), k.edge(i, w, m));
        let proj = AlgElem::term(Triple { alpha: e.clone(), g: GroupElem(0), beta: e }, field.one());
        let mut term = alg_mul(t, &tt, &proj);
        if m == 0 {
            let sign = if (a as i64 - 1) * b.rem_euclid(2) % 2 == 0 { field.one() } else { -field.one() };
            term = term.scale(&(sign * k.c[i][w].inv().expect("C entries are units")));
        }
        out = out.add(&term);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    fn single(a: u64, b: i64, c: i64) -> KatsuraTriple {
        KatsuraTriple::square(vec![vec![a]], vec![vec![b]], Some(vec![vec![q().from_i64(c)]]), q()).unwrap()
    }

    #[test]
    fn one_loop_is_trivial() {
        let t = single(1, 0, 1).build_tuple();
        assert!(t.validate(0, 200).is_valid());
        assert_eq!(t.act_edge(GroupElem(5), EdgeId(0)), EdgeId(0));
        assert_eq!(t.phi(GroupElem(5), EdgeId(0)), GroupElem(0));
        assert!(t.c(GroupElem(5), EdgeId(0)).is_one());
    }

    #[test]
    fn two_one_generators() {
        let t = single(2, 1, 7).build_tuple();
        assert!(t.validate(0, 200).is_valid());
        let one = GroupElem(1);
        assert_eq!(t.act_edge(one, EdgeId(0)), EdgeId(1));
        assert_eq!(t.act_edge(one, EdgeId(1)), EdgeId(0));
        assert_eq!(t.phi(one, EdgeId(0)), GroupElem(0));
        assert_eq!(t.phi(one, EdgeId(1)), GroupElem(1));
        assert_eq!(t.c(one, EdgeId(0)).to_string(), "-7");
        assert!(t.c(one, EdgeId(1)).is_one());
    }

    #[test]
    fn three_three_generators() {
        let t = single(3, 3, 1).build_tuple();
        for n in 0..3 {
            assert_eq!(t.act_edge(GroupElem(1), EdgeId(n)), EdgeId(n));
            assert_eq!(t.phi(GroupElem(1), EdgeId(n)), GroupElem(1));
        }
        // ψ(1, 0) = (3 + 0 − 1)/2 = 1 for A = 2, B = 3
        let t = single(2, 3, 1).build_tuple();
        assert_eq!(t.phi(GroupElem(1), EdgeId(0)), GroupElem(1));
    }

    #[test]
    fn construction_errors() {
        let f = q();
        let bad_b = KatsuraTriple::square(vec![vec![0, 1], vec![1, 1]], vec![vec![1, 0], vec![0, 0]], None, f);
        assert!(matches!(bad_b, Err(Error::Construction(_))));
        let c = vec![vec![f.from_i64(2), f.one()], vec![f.one(), f.one()]];
        let bad_c = KatsuraTriple::square(vec![vec![0, 1], vec![1, 1]], vec![vec![0, 0], vec![0, 0]], Some(c), f);
        assert!(bad_c.is_err());
        let zero_row = KatsuraTriple::square(vec![vec![0]], vec![vec![0]], None, f);
        assert!(zero_row.is_err());
    }

    #[test]
    fn orbit_orders() {
        // σ on vE¹w has order A / gcd(A, B)
        for a in 1..=6u64 {
            for b in -6..=6i64 {
                let t = single(a, b, 1).build_tuple();
                let expected = a / a.gcd(&b.unsigned_abs());
                for e in t.graph().edges() {
                    let mut f = e;
                    let mut order = 0;
                    loop {
                        f = t.act_edge(GroupElem(1), f);
                        order += 1;
                        if f == e {
                            break;
                        }
                    }
                    assert_eq!(order, expected, "A = {a}, B = {b}");
                }
            }
        }
    }

    #[test]
    fn mixed_row_stratification() {
        // Row v: A = (1, 2), B = (0, 1).
        let f = q();
        let k = KatsuraTriple::new(
            vec!["v".into(), "w".into()],
            vec![0],
            vec![vec![1, 2]],
            vec![vec![0, 1]],
            vec![vec![f.one(), f.one()]],
            f,
        )
        .unwrap();
        let t = k.build_tuple();
        let s = t.stratify();
        assert!(s.reg0.is_empty());
        assert_eq!(s.reg1, vec![VertexId(0)]);
        let sec = t.default_section(&s);
        assert_eq!(sec.edge(VertexId(0)), Some(k.edge(0, 1, 0)));
    }

    #[test]
    fn kspi_examples() {
        assert!(is_kspi(&single(2, 1, 3)).holds());
        let r = is_kspi(&single(2, 2, 1));
        assert!(!r.holds() && r.failure.unwrap().starts_with("diagonal"));
        let r = is_kspi(&single(1, 1, 1));
        assert!(!r.two_loops);
        assert!(r.failure.unwrap().starts_with("loops"));
        assert_eq!(r.min_loop_edges, 1);
    }

    #[test]
    fn kspi_connectivity() {
        let k = KatsuraTriple::square(vec![vec![2, 1], vec![0, 2]], vec![vec![1, 0], vec![0, 1]], None, q()).unwrap();
        let r = is_kspi(&k);
        assert!(!r.reachable_strict && !r.reachable_lenient);
        assert!(r.failure.unwrap().starts_with("connectivity"));
        let k = KatsuraTriple::square(vec![vec![1, 1], vec![1, 1]], vec![vec![1, 0], vec![0, 1]], None, q()).unwrap();
        assert!(is_kspi(&k).holds());
    }

    #[test]
    fn hausdorff_vacuous_and_failing() {
        let k = KatsuraTriple::square(vec![vec![2, 1], vec![1, 3]], vec![vec![2, 1], vec![1, 3]], None, q()).unwrap();
        let r = hausdorff_condition(&k, DEFAULT_PATH_LEN_CAP, None);
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.pairs.is_empty());

        // v → w with B = 0 feeding a loop at w with B/A = 1.
        let k = KatsuraTriple::square(vec![vec![1, 1], vec![0, 1]], vec![vec![1, 0], vec![0, 1]], None, q()).unwrap();
        let r = hausdorff_condition(&k, DEFAULT_PATH_LEN_CAP, None);
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.witness.is_some());
    }

    #[test]
    fn hausdorff_holds_with_halving_loop() {
        // v → w with B = 0, and a loop at w with B/A = 1/2 eventually kills integrality.
        let k = KatsuraTriple::square(vec![vec![1, 1], vec![0, 2]], vec![vec![1, 0], vec![0, 1]], None, q()).unwrap();
        let r = hausdorff_condition(&k, DEFAULT_PATH_LEN_CAP, Some(8));
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn zero_b_makes_products_vanish() {
        // With B = 0 on the loop every product of two or more ratios is 0.
        let r = hausdorff_condition(&single(2, 0, 1), DEFAULT_PATH_LEN_CAP, None);
        assert_eq!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn kreg_rows() {
        let f = q();
        let mk = |b: Vec<i64>| {
            KatsuraTriple::new(
                vec!["v".into(), "w".into()],
                vec![0],
                vec![vec![1, 2]],
                vec![b],
                vec![vec![f.one(), f.one()]],
                f,
            )
            .unwrap()
        };
        let r = kreg_conditions(&mk(vec![1, 2]));
        assert!(r.cond_i && r.cond_ii);
        let r = kreg_conditions(&mk(vec![0, 1]));
        assert!(!r.cond_i && !r.cond_ii);
        assert_eq!(r.flat, vec![(0, 0, false), (0, 1, true)]);
        let r = kreg_conditions(&mk(vec![0, 0]));
        assert!(r.cond_ii && !r.cond_i);
        assert!(r.flat.iter().all(|x| x.2));
    }

    #[test]
    fn u_lemma_two_one() {
        let k = single(2, 1, 5);
        let t = k.build_tuple();
        assert_eq!(u_power(&k, &t, 0, 0, 1), u_lemma_rhs(&k, &t, 0, 0));
        for n in -5..=5 {
            assert_eq!(u_power(&k, &t, 0, 0, n), u_power_closed_form(&k, &t, 0, 0, n), "n = {n}");
        }
    }

    #[test]
    fn u_lemma_various() {
        let f = Field::prime(7).unwrap();
        for (a, b) in [(1, 0), (3, 2), (3, -4), (4, 4), (2, -3)] {
            let k = KatsuraTriple::square(vec![vec![a]], vec![vec![b]], Some(vec![vec![f.from_i64(3)]]), f).unwrap();
            let t = k.build_tuple();
            assert_eq!(u_power(&k, &t, 0, 0, b), u_lemma_rhs(&k, &t, 0, 0), "A = {a}, B = {b}");
        }
    }
}
