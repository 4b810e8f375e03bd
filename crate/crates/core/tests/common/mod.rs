#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use twisted_ep::graph::PathFilter;
use twisted_ep::io::{from_json, TupleSpec};
use twisted_ep::semigroup::Triple;
use twisted_ep::{EdgeId, EpTuple, Field, Graph, GroupElem, GroupModel, Path, Scalar, VertexId};

#[derive(Clone, Copy, Debug)]
pub enum Kind {
    Trivial,
    Cyclic(u64),
    Integers,
}

fn random_unit<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    loop {
        let num = rng.gen_range(-4i64..=4);
        let den = rng.gen_range(1i64..=3);
        let x = field.from_i64(num) * field.from_i64(den).inv().unwrap_or_else(|| field.one());
        if !x.is_zero() {
            return x;
        }
    }
}

/// Splits `items` into random cycles whose lengths are taken from `lengths`
/// (which must contain 1).
fn random_cycles<R: Rng, T: Copy>(rng: &mut R, items: &[T], lengths: &[usize]) -> Vec<Vec<T>> {
    let mut rest = items.to_vec();
    rest.shuffle(rng);
    let mut out = Vec::new();
    while !rest.is_empty() {
        let ok: Vec<usize> = lengths.iter().copied().filter(|&l| l <= rest.len()).collect();
        let l = *ok.choose(rng).unwrap();
        out.push(rest.drain(..l).collect());
    }
    out
}

fn divisors(m: u64) -> Vec<usize> {
    (1..=m as usize).filter(|d| m as usize % d == 0).collect()
}

/// A random valid tuple with at most 5 vertices and 8 edges. With
/// probability one half (and a nontrivial group) the vertices come in
/// swapped pairs, so the action on vertices is nontrivial.
pub fn random_tuple<R: Rng>(rng: &mut R, kind: Kind, field: Field) -> EpTuple {
    let can_swap = match kind {
        Kind::Integers => true,
        Kind::Cyclic(m) => m % 2 == 0,
        Kind::Trivial => false,
    };
    let doubled = can_swap && rng.gen_bool(0.5);
    let (nv, ne) = if doubled { (rng.gen_range(1..=2), rng.gen_range(1..=4)) } else { (rng.gen_range(1..=5), rng.gen_range(1..=8)) };
    let base: Vec<(usize, usize)> = (0..ne).map(|_| (rng.gen_range(0..nv), rng.gen_range(0..nv))).collect();
    let copies = if doubled { 2 } else { 1 };
    let vname = |v: usize, c: usize| format!("v{}", v + nv * c);
    let ename = |e: usize, c: usize| format!("e{}", e + ne * c);
    let vertices: Vec<String> = (0..copies).flat_map(|c| (0..nv).map(move |v| (v, c))).map(|(v, c)| vname(v, c)).collect();
    let edges: Vec<(String, String, String)> = (0..copies)
        .flat_map(|c| base.iter().enumerate().map(move |(e, &(s, r))| (e, s, r, c)))
        .map(|(e, s, r, c)| (ename(e, c), vname(s, c), vname(r, c)))
        .collect();
    let graph = Graph::new(vertices, edges).unwrap();
    let total = ne * copies;

    // Cycle lengths allowed on the base edges: the full orbit length must
    // divide the group order.
    let lengths: Vec<usize> = match kind {
        Kind::Trivial => vec![1],
        Kind::Cyclic(m) if doubled => divisors(m).into_iter().filter(|d| (m as usize) % (2 * d) == 0).collect(),
        Kind::Cyclic(m) => divisors(m),
        Kind::Integers => vec![1, 2, 3],
    };
    let mut tau: Vec<usize> = (0..ne).collect();
    let mut cycles = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for e in 0..ne {
        match classes.iter_mut().find(|c| base[c[0]] == base[e]) {
            Some(c) => c.push(e),
            None => classes.push(vec![e]),
        }
    }
    for class in &classes {
        for cyc in random_cycles(rng, class, &lengths) {
            for (i, &e) in cyc.iter().enumerate() {
                tau[e] = cyc[(i + 1) % cyc.len()];
            }
            cycles.push(cyc);
        }
    }
    let gen_v: Vec<VertexId> = (0..nv * copies)
        .map(|v| if doubled { VertexId(((v + nv) % (2 * nv)) as u32) } else { VertexId(v as u32) })
        .collect();
    let gen_e: Vec<EdgeId> = (0..total)
        .map(|e| {
            if !doubled {
                EdgeId(tau[e] as u32)
            } else if e < ne {
                EdgeId((e + ne) as u32)
            } else {
                EdgeId(tau[e - ne] as u32)
            }
        })
        .collect();
    let mut k = vec![0i64; total];
    let mut c = vec![field.one(); total];
    if !matches!(kind, Kind::Trivial | Kind::Cyclic(1)) {
        for e in 0..total {
            k[e] = rng.gen_range(-3..=3);
            if doubled && k[e] % 2 == 0 {
                k[e] += 1;
            }
            c[e] = random_unit(rng, field);
        }
        if let Kind::Cyclic(_) = kind {
            // Orbits must close up: drift ≡ 0 mod the orbit length, twist product 1.
            for cyc in &cycles {
                let orbit: Vec<usize> = if doubled { cyc.iter().flat_map(|&e| [e, e + ne]).collect() } else { cyc.clone() };
                let p = orbit.len() as i64;
                let last = *orbit.last().unwrap();
                let drift: i64 = orbit.iter().map(|&e| k[e]).sum();
                let step = if doubled { 2 } else { 1 };
                let mut fix = k[last];
                while (drift - k[last] + fix).rem_euclid(p) != 0 {
                    fix += step;
                }
                k[last] = fix;
                let prod = orbit[..orbit.len() - 1].iter().fold(field.one(), |acc, &e| acc * c[e].clone());
                c[last] = prod.inv().unwrap();
            }
        }
    }
    let group = match kind {
        Kind::Trivial => GroupModel::trivial(),
        Kind::Cyclic(m) => GroupModel::Cyclic(m),
        Kind::Integers => GroupModel::Integers,
    };
    EpTuple::cyclic(graph, group, field, gen_v, gen_e, k, c).unwrap()
}

pub fn random_group_elem<R: Rng>(rng: &mut R, g: &GroupModel, bound: i64) -> GroupElem {
    match g.elements() {
        Some(all) => *all.choose(rng).unwrap(),
        None => GroupElem(rng.gen_range(-bound..=bound)),
    }
}

pub fn random_path<R: Rng>(rng: &mut R, g: &Graph, max_len: usize) -> Path {
    let start = VertexId(rng.gen_range(0..g.num_vertices() as u32));
    let mut p = Path::vertex(start);
    let len = rng.gen_range(0..=max_len);
    for _ in 0..len {
        let out = g.out_edges(p.rng());
        match out.choose(rng) {
            Some(&e) => p = p.extended(g, e),
            None => break,
        }
    }
    p
}

/// A random path starting at `v`.
pub fn random_path_from<R: Rng>(rng: &mut R, g: &Graph, v: VertexId, max_len: usize) -> Path {
    let mut p = Path::vertex(v);
    for _ in 0..rng.gen_range(0..=max_len) {
        match g.out_edges(p.rng()).choose(rng) {
            Some(&e) => p = p.extended(g, e),
            None => break,
        }
    }
    p
}

/// A random triple `(α, g, β)`; `β` is drawn among paths ending at `g⁻¹ r(α)`.
pub fn random_triple<R: Rng>(rng: &mut R, t: &EpTuple, max_len: usize, bound: i64) -> Option<Triple> {
    let g = t.graph();
    let alpha = random_path(rng, g, max_len);
    let h = random_group_elem(rng, t.group(), bound);
    let target = t.act_vertex(t.group().inv(h), alpha.rng());
    let betas: Vec<Path> = g.paths_up_to(max_len, PathFilter { source: None, range: Some(target) });
    let beta = betas.choose(rng)?.clone();
    Some(Triple { alpha, g: h, beta })
}

/// `t^n` on a path, computed edge by edge by iterating the generator (or its
/// inverse) `|n|` times. Returns the image, the exponent of `φ` and `c`.
pub fn naive_act(t: &EpTuple, n: i64, alpha: &Path) -> (Vec<EdgeId>, i64, Scalar) {
    let (_, gen_e, gen_phi, gen_c) = t.generator_data().expect("cyclic model");
    let ne = gen_e.len();
    let mut inv_e = vec![EdgeId(0); ne];
    for (i, &e) in gen_e.iter().enumerate() {
        inv_e[e.index()] = EdgeId(i as u32);
    }
    let mut exp = n;
    let mut c = t.field().one();
    let mut image = Vec::new();
    for &e in alpha.edges() {
        let mut cur = e;
        let mut acc = 0i64;
        for _ in 0..exp.unsigned_abs() {
            if exp > 0 {
                acc += gen_phi[cur.index()];
                c = c * gen_c[cur.index()].clone();
                cur = gen_e[cur.index()];
            } else {
                let prev = inv_e[cur.index()];
                acc -= gen_phi[prev.index()];
                c = c * gen_c[prev.index()].inv().unwrap();
                cur = prev;
            }
        }
        image.push(cur);
        exp = match t.group() {
            GroupModel::Cyclic(m) => acc.rem_euclid(*m as i64),
            _ => acc,
        };
    }
    (image, exp, c)
}

pub fn from_spec(json: &str) -> EpTuple {
    from_json::<TupleSpec>(json).unwrap().build(None).unwrap()
}

/// Small tuples with at most three edges and at most four group elements.
pub fn small_tuples() -> Vec<(&'static str, EpTuple)> {
    vec![
        (
            "Z/4 swapping two loops",
            from_spec(
                r#"{"vertices": ["v"],
                    "edges": [{"id": "a", "src": "v", "rng": "v"}, {"id": "b", "src": "v", "rng": "v"}],
                    "group": {"kind": "cyclic", "order": 4},
                    "action": {"t": {"edges": {"a": "b", "b": "a"}}},
                    "phi": {"t": {"a": "t", "b": "t^3"}},
                    "c": {"t": {"a": "2", "b": "-1/2"}}}"#,
            ),
        ),
        (
            "Z/2 on parallel edges and a loop",
            from_spec(
                r#"{"vertices": ["v", "w"],
                    "edges": [{"id": "e", "src": "v", "rng": "w"}, {"id": "f", "src": "v", "rng": "w"},
                              {"id": "g", "src": "w", "rng": "w"}],
                    "field": "F5",
                    "group": {"kind": "cyclic", "order": 2},
                    "action": {"t": {"edges": {"e": "f", "f": "e"}}},
                    "phi": {"t": {"e": "t", "f": "t", "g": "t"}},
                    "c": {"t": {"e": "3", "f": "2", "g": "4"}}}"#,
            ),
        ),
        (
            "Klein four-group with a sign character",
            from_spec(
                r#"{"vertices": ["v"],
                    "edges": [{"id": "e0", "src": "v", "rng": "v"}, {"id": "e1", "src": "v", "rng": "v"}],
                    "group": {"kind": "table", "elements": ["1", "x", "y", "xy"],
                              "table": [["1", "x", "y", "xy"], ["x", "1", "xy", "y"],
                                        ["y", "xy", "1", "x"], ["xy", "y", "x", "1"]]},
                    "action": {"x": {"edges": {"e0": "e1", "e1": "e0"}},
                               "xy": {"edges": {"e0": "e1", "e1": "e0"}}},
                    "phi": {"x": {"e0": "x", "e1": "x"},
                            "y": {"e0": "y", "e1": "y"},
                            "xy": {"e0": "xy", "e1": "xy"}},
                    "c": {"x": {"e0": "-1", "e1": "-1"},
                          "xy": {"e0": "-1", "e1": "-1"}}}"#,
            ),
        ),
        (
            "trivial group on a path with a loop",
            from_spec(
                r#"{"vertices": ["u", "v", "w"],
                    "edges": [{"id": "a", "src": "u", "rng": "v"}, {"id": "b", "src": "v", "rng": "w"},
                              {"id": "c", "src": "w", "rng": "w"}]}"#,
            ),
        ),
    ]
}

/// The Katsura tuple for `A = [[2]]`, `B = [[1]]`, `C = [[−5]]` over `Q`.
pub fn katsura_2_1() -> EpTuple {
    let q = Field::Rationals;
    twisted_ep::katsura::KatsuraTriple::square(vec![vec![2]], vec![vec![1]], Some(vec![vec![q.from_i64(-5)]]), q)
        .unwrap()
        .build_tuple()
}

/// All group elements for finite models, `[−bound, bound]` for `Z`.
pub fn group_sample(t: &EpTuple, bound: i64) -> Vec<GroupElem> {
    t.group().elements().unwrap_or_else(|| t.group().elements_within(bound))
}
