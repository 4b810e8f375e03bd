//! The acting groups: the integers, finite cyclic groups, and groups given by
//! a multiplication table.

use std::fmt;

use crate::error::{Error, Result};

/// A group element. For the integers this is the exponent of the generator
/// `t`, for `Z/m` the residue in `0..m`, for table groups the row index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElem(pub i64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupModel {
    Integers,
    /// `Z/m`, written multiplicatively with generator `t`. The trivial group
    /// is `Cyclic(1)`.
    Cyclic(u64),
    Table(TableGroup),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableGroup {
    names: Vec<String>,
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl TableGroup {
    /// Checks closure, associativity on all triples, the identity and inverses.
    pub fn new(names: Vec<String>, mul: Vec<Vec<usize>>) -> Result<TableGroup> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Schema("a group needs at least one element".into()));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::Schema(format!("duplicate group element {a:?}")));
            }
        }
        if mul.len() != n || mul.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::Schema("multiplication table must be n×n with entries in 0..n".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a))
            .ok_or_else(|| Error::Schema("multiplication table has no identity".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| mul[a][b] == identity && mul[b][a] == identity)
                .ok_or_else(|| Error::Schema(format!("{} has no inverse", names[a])))?;
            inverses.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(Error::Schema(format!(
                            "multiplication is not associative on ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(TableGroup { names, mul, identity, inverses })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }
}

impl GroupModel {
    pub fn trivial() -> GroupModel {
        GroupModel::Cyclic(1)
    }

    pub fn identity(&self) -> GroupElem {
        match self {
            GroupModel::Table(t) => GroupElem(t.identity as i64),
            _ => GroupElem(0),
        }
    }

    pub fn is_identity(&self, g: GroupElem) -> bool {
        g == self.identity()
    }

    pub fn mul(&self, a: GroupElem, b: GroupElem) -> GroupElem {
        match self {
            GroupModel::Integers => {
                GroupElem(a.0.checked_add(b.0).expect("group element overflow"))
            }
            GroupModel::Cyclic(m) => GroupElem((a.0 + b.0).rem_euclid(*m as i64)),
            GroupModel::Table(t) => GroupElem(t.mul[a.0 as usize][b.0 as usize] as i64),
        }
    }

    pub fn inv(&self, a: GroupElem) -> GroupElem {
        match self {
            GroupModel::Integers => GroupElem(a.0.checked_neg().expect("group element overflow")),
            GroupModel::Cyclic(m) => GroupElem((-a.0).rem_euclid(*m as i64)),
            GroupModel::Table(t) => GroupElem(t.inverses[a.0 as usize] as i64),
        }
    }

    /// `t^k` for the cyclic models. Panics for table groups.
    pub fn gen_pow(&self, k: i64) -> GroupElem {
        match self {
            GroupModel::Integers => GroupElem(k),
            GroupModel::Cyclic(m) => GroupElem(k.rem_euclid(*m as i64)),
            GroupModel::Table(_) => panic!("table groups have no distinguished generator"),
        }
    }

    /// Number of elements, `None` for the integers.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupModel::Integers => None,
            GroupModel::Cyclic(m) => Some(*m),
            GroupModel::Table(t) => Some(t.names.len() as u64),
        }
    }

    /// All elements of a finite group, identity first for cyclic groups.
    pub fn elements(&self) -> Option<Vec<GroupElem>> {
        self.order().map(|n| (0..n as i64).map(GroupElem).collect())
    }

    /// Elements `t^k` with `|k| ≤ bound` for the integers, all elements otherwise.
    pub fn elements_within(&self, bound: i64) -> Vec<GroupElem> {
        match self.elements() {
            Some(all) => all,
            None => (-bound..=bound).map(GroupElem).collect(),
        }
    }

    pub fn is_cyclic_model(&self) -> bool {
        !matches!(self, GroupModel::Table(_))
    }

    /// Parses `1`, `t`, `t^k`, `t^-k`, or a table element name.
    pub fn parse(&self, s: &str) -> Result<GroupElem> {
        let s = s.trim();
        let err = || Error::Schema(format!("cannot parse group element {s:?}"));
        if let GroupModel::Table(t) = self {
            return t
                .names
                .iter()
                .position(|n| n == s)
                .map(|i| GroupElem(i as i64))
                .ok_or_else(err);
        }
        let k: i64 = match s {
            "1" | "e" => 0,
            "t" => 1,
            _ => {
                let exp = s.strip_prefix("t^").ok_or_else(err)?;
                exp.trim_start_matches('(')
                    .trim_end_matches(')')
                    .replace('−', "-")
                    .parse()
                    .map_err(|_| err())?
            }
        };
        Ok(self.gen_pow(k))
    }

    pub fn format(&self, g: GroupElem) -> String {
        match self {
            GroupModel::Table(t) => t.names[g.0 as usize].clone(),
            _ => match g.0 {
                0 => "1".into(),
                1 => "t".into(),
                k => format!("t^{k}"),
            },
        }
    }
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupModel::Integers => write!(f, "Z"),
            GroupModel::Cyclic(1) => write!(f, "1"),
            GroupModel::Cyclic(m) => write!(f, "Z/{m}"),
            GroupModel::Table(t) => write!(f, "table group of order {}", t.names.len()),
        }
    }
}
