//! The inverse semigroup `S(G,E,φ)` of triples `(α, g, β)` and its twisting
//! 2-cocycle `ω`.

use std::cmp::Ordering;

use crate::ep::EpTuple;
use crate::error::{Error, Result};
use crate::graph::Path;
use crate::group::GroupElem;
use crate::scalar::Scalar;

/// A nonzero element `α g β*` with `r(α) = g(r(β))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub alpha: Path,
    pub g: GroupElem,
    pub beta: Path,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum STriple {
    Zero,
    Elem(Triple),
}

impl Triple {
    pub fn new(t: &EpTuple, alpha: Path, g: GroupElem, beta: Path) -> Result<Triple> {
        if alpha.rng() != t.act_vertex(g, beta.rng()) {
            return Err(Error::Domain(format!(
                "r({}) ≠ {}(r({}))",
                t.graph().format_path(&alpha),
                t.group().format(g),
                t.graph().format_path(&beta)
            )));
        }
        Ok(Triple { alpha, g, beta })
    }

    pub fn star(&self, t: &EpTuple) -> Triple {
        Triple { alpha: self.beta.clone(), g: t.group().inv(self.g), beta: self.alpha.clone() }
    }

    pub fn format(&self, t: &EpTuple) -> String {
        let g = t.graph();
        format!("({}, {}, {})", g.format_path(&self.alpha), t.group().format(self.g), g.format_path(&self.beta))
    }
}

/// Paths are compared lexicographically, then the group element, then `β`.
impl Ord for Triple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.alpha
            .cmp(&other.alpha)
            .then(self.g.cmp(&other.g))
            .then_with(|| self.beta.cmp(&other.beta))
    }
}

impl PartialOrd for Triple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Product and twist in one pass: `None` when the product is zero.
pub fn mul_with_omega(t: &EpTuple, x: &Triple, y: &Triple) -> Option<(Triple, Scalar)> {
    if let Some(gamma1) = x.beta.strip_prefix_of(&y.alpha) {
        // γ = β γ₁
        let (moved, phi, c) = t.act_all(x.g, &gamma1);
        let alpha = x.alpha.concat(&moved).expect("ranges match for valid triples");
        let g = t.group().mul(phi, y.g);
        Some((Triple { alpha, g, beta: y.beta.clone() }, c))
    } else if let Some(beta1) = y.alpha.strip_prefix_of(&x.beta) {
        // β = γ β₁
        let hinv = t.group().inv(y.g);
        let moved = t.act_path(hinv, &beta1);
        let (_, phi, c) = t.act_all(y.g, &moved);
        let g = t.group().mul(x.g, phi);
        let beta = y.beta.concat(&moved).expect("ranges match for valid triples");
        Some((Triple { alpha: x.alpha.clone(), g, beta }, c))
    } else {
        None
    }
}

pub fn mul(t: &EpTuple, x: &STriple, y: &STriple) -> STriple {
    match (x, y) {
        (STriple::Elem(a), STriple::Elem(b)) => match mul_with_omega(t, a, b) {
            Some((p, _)) => STriple::Elem(p),
            None => STriple::Zero,
        },
        _ => STriple::Zero,
    }
}

pub fn star(t: &EpTuple, x: &STriple) -> STriple {
    match x {
        STriple::Zero => STriple::Zero,
        STriple::Elem(a) => STriple::Elem(a.star(t)),
    }
}

/// `ω(x, y)`; `None` stands for the value 0.
pub fn omega(t: &EpTuple, x: &STriple, y: &STriple) -> Option<Scalar> {
    match (x, y) {
        (STriple::Elem(a), STriple::Elem(b)) => mul_with_omega(t, a, b).map(|(_, w)| w),
        _ => None,
    }
}
