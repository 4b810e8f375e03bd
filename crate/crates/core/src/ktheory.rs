//! Integer matrices, Smith normal form, finitely generated abelian groups, and
//! the homotopy K-theory of twisted Katsura algebras.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::katsura::{default_labels, KatsuraTriple};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.iter().flatten().map(|x| x.clone().into()).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[BigInt]>::to_vec).collect()
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.to_rows().iter().map(|r| r.iter().map(|x| x.to_i64()).collect()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Copies `m` into the block starting at `(r, c)`.
    pub fn set_block(&mut self, r: usize, c: usize, m: &Matrix) {
        for i in 0..m.rows {
            for j in 0..m.cols {
                self.set(r + i, c + j, m.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r: usize, c: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.get(r + i, c + j).clone());
            }
        }
        m
    }

    /// Determinant by fraction-free elimination. Panics unless square.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        if n == 0 {
            BigInt::one()
        } else {
            sign * &a[n - 1][n - 1]
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// `row_i += k · row_j`
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        for c in 0..self.cols {
            let x = self.get(j, c) * k;
            self.data[i * self.cols + c] += x;
        }
    }

    /// `col_i += k · col_j`
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        for r in 0..self.rows {
            let x = self.get(r, j) * k;
            self.data[r * self.cols + i] += x;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let x = -self.get(i, c);
            self.set(i, c, x);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let x = -self.get(r, j);
            self.set(r, j, x);
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// `m = u · s · v` with `u`, `v` unimodular and `s` diagonal, nonnegative,
/// each diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Matrix,
    pub s: Matrix,
    pub v: Matrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &Matrix) -> Snf {
    let (rows, cols) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);
    // Row ops E on s are mirrored by u ← u E⁻¹, column ops F by v ← F⁻¹ v.
    for t in 0..rows.min(cols) {
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !s.get(i, j).is_zero())
            .min_by_key(|&(i, j)| s.get(i, j).abs());
        let Some((pi, pj)) = pivot else { break };
        s.swap_rows(t, pi);
        u.swap_cols(t, pi);
        s.swap_cols(t, pj);
        v.swap_rows(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = s.get(i, t).div_floor(s.get(t, t));
                s.add_row(i, t, &-&q);
                u.add_col(t, i, &q);
                if !s.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = s.get(t, j).div_floor(s.get(t, t));
                s.add_col(j, t, &-&q);
                v.add_row(t, j, &q);
                if !s.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // Move the smallest remaining entry of row/column t to the pivot.
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !s.get(i, t).is_zero() && s.get(i, t).abs() < s.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !s.get(t, j).is_zero() && s.get(t, j).abs() < s.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    s.swap_rows(t, best.0);
                    u.swap_cols(t, best.0);
                } else if best.1 != t {
                    s.swap_cols(t, best.1);
                    v.swap_rows(t, best.1);
                }
                continue;
            }
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !s.get(i, j).is_multiple_of(s.get(t, t)));
            match bad {
                Some((i, _)) => {
                    s.add_row(t, i, &BigInt::one());
                    u.add_col(i, t, &-BigInt::one());
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_col(t);
        }
    }
    Snf { u, s, v }
}

/// `Z^rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with `2 ≤ d_1 | d_2 | …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbGroup {
    pub fn zero() -> AbGroup {
        AbGroup { rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> AbGroup {
        AbGroup { rank, torsion: Vec::new() }
    }

    /// The group presented by the given orders (0 meaning infinite order).
    pub fn from_orders(orders: &[BigInt]) -> AbGroup {
        let n = orders.len();
        let mut m = Matrix::zeros(n, n);
        for (i, d) in orders.iter().enumerate() {
            m.set(i, i, d.abs());
        }
        coker(&m)
    }

    pub fn direct_sum(&self, other: &AbGroup) -> AbGroup {
        let mut orders: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        orders.extend(std::iter::repeat(BigInt::zero()).take(self.rank + other.rank));
        AbGroup::from_orders(&orders)
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Number of elements of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// Cokernel of `m: Z^cols → Z^rows`.
pub fn coker(m: &Matrix) -> AbGroup {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    AbGroup { rank: m.rows - rank, torsion: diag.into_iter().filter(|d| d > &BigInt::one()).collect() }
}

/// `(coker m, ker m)`; the kernel is free of rank `cols − rank m`.
pub fn coker_ker(m: &Matrix) -> (AbGroup, AbGroup) {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let diag = snf.diagonal();
    let c = AbGroup { rank: m.rows - rank, torsion: diag.into_iter().filter(|d| d > &BigInt::one()).collect() };
    (c, AbGroup::free(m.cols - rank))
}

/// A finitely generated subgroup of the unit group of the field, with a
/// chosen presentation: one generator per entry of `orders` (0 = free).
#[derive(Clone, Debug)]
pub struct UnitsModel {
    field: Field,
    orders: Vec<u64>,
    kind: UnitsKind,
}

#[derive(Clone, Debug)]
enum UnitsKind {
    /// `F_p^×` cyclic on `generator`, with a discrete log table.
    Prime { p: u64, generator: u64, log: Vec<u32> },
    /// `±1` times products of the listed primes.
    Rational { primes: Vec<u64> },
}

pub const DEFAULT_DLOG_CAP: u64 = 1 << 22;

impl UnitsModel {
    /// `F_p^× ≅ Z/(p−1)` via a primitive root; `p` may not exceed `cap`.
    pub fn prime_field(p: u64, cap: u64) -> Result<UnitsModel> {
        let field = Field::prime(p)?;
        if p > cap {
            return Err(Error::Unsupported(format!("discrete logarithms mod {p} exceed the cap {cap}")));
        }
        let order = p - 1;
        let generator = (1..p)
            .find(|&g| {
                let mut x = 1u64;
                for k in 1..=order {
                    x = x * g % p;
                    if x == 1 {
                        return k == order;
                    }
                }
                false
            })
            .expect("prime fields have primitive roots");
        let mut log = vec![0u32; p as usize];
        let mut x = 1u64;
        for k in 0..order {
            log[x as usize] = k as u32;
            x = x * generator % p;
        }
        let orders = if order == 1 { Vec::new() } else { vec![order] };
        Ok(UnitsModel { field, orders, kind: UnitsKind::Prime { p, generator, log } })
    }

    /// The subgroup of `Q^×` generated by `−1` and the given primes.
    pub fn rationals(primes: &[u64]) -> Result<UnitsModel> {
        let mut ps = primes.to_vec();
        ps.sort_unstable();
        ps.dedup();
        if let Some(&bad) = ps.iter().find(|&&p| Field::prime(p).is_err()) {
            return Err(Error::Schema(format!("{bad} is not prime")));
        }
        let mut orders = vec![2];
        orders.extend(ps.iter().map(|_| 0));
        Ok(UnitsModel { field: Field::Rationals, orders, kind: UnitsKind::Rational { primes: ps } })
    }

    pub fn for_field(field: Field, primes: &[u64]) -> Result<UnitsModel> {
        match field {
            Field::Rationals => UnitsModel::rationals(primes),
            Field::Prime(p) => UnitsModel::prime_field(p, DEFAULT_DLOG_CAP),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn group(&self) -> AbGroup {
        AbGroup::from_orders(&self.orders.iter().map(|&o| BigInt::from(o)).collect::<Vec<_>>())
    }

    /// Names of the generators, in presentation order.
    pub fn generators(&self) -> Vec<String> {
        match &self.kind {
            UnitsKind::Prime { p, generator, .. } => {
                if self.orders.is_empty() {
                    Vec::new()
                } else {
                    vec![format!("{generator} mod {p}")]
                }
            }
            UnitsKind::Rational { primes } => {
                std::iter::once("-1".to_string()).chain(primes.iter().map(ToString::to_string)).collect()
            }
        }
    }

    /// Exponent vector of a unit, reduced modulo the finite orders.
    pub fn encode(&self, s: &Scalar) -> Result<Vec<i64>> {
        if s.field() != self.field || s.is_zero() {
            return Err(Error::Encoding(format!("{s} is not a unit of {}", self.field)));
        }
        match (&self.kind, s) {
            (UnitsKind::Prime { log, .. }, Scalar::Mod { value, .. }) => {
                Ok(if self.orders.is_empty() { Vec::new() } else { vec![log[*value as usize] as i64] })
            }
            (UnitsKind::Rational { primes }, Scalar::Rational(r)) => {
                let mut out = vec![if r.is_negative() { 1 } else { 0 }];
                let mut num = r.numer().abs();
                let mut den = r.denom().clone();
                for &p in primes {
                    let p = BigInt::from(p);
                    let mut k = 0i64;
                    while num.is_multiple_of(&p) {
                        num /= &p;
                        k += 1;
                    }
                    while den.is_multiple_of(&p) {
                        den /= &p;
                        k -= 1;
                    }
                    out.push(k);
                }
                if !num.is_one() || !den.is_one() {
                    return Err(Error::Encoding(format!("{s} involves primes outside {primes:?}")));
                }
                Ok(out)
            }
            _ => unreachable!("field checked above"),
        }
    }

    pub fn decode(&self, exps: &[i64]) -> Scalar {
        assert_eq!(exps.len(), self.orders.len(), "exponent vector has the wrong length");
        match &self.kind {
            UnitsKind::Prime { p, generator, .. } => {
                let g = self.field.from_i64(*generator as i64);
                exps.first().map_or(self.field.one(), |&k| g.pow(k.rem_euclid(*p as i64 - 1)))
            }
            UnitsKind::Rational { primes } => {
                let mut x = self.field.from_i64(if exps[0].rem_euclid(2) == 1 { -1 } else { 1 });
                for (&p, &k) in primes.iter().zip(&exps[1..]) {
                    x = x * self.field.from_i64(p as i64).pow(k);
                }
                x
            }
        }
    }

    /// Whether an exponent vector represents the unit 1.
    pub fn is_trivial(&self, exps: &[i64]) -> bool {
        exps.iter().zip(&self.orders).all(|(&k, &o)| if o == 0 { k == 0 } else { k.rem_euclid(o as i64) == 0 })
    }
}

/// A map `j(ℓ)^c₀ ⊕ j(ℓ)[−1]^c₁ → j(ℓ)^r₀ ⊕ j(ℓ)[−1]^r₁` of block form
/// `[[top, coupling], [0, bottom]]`: `top` and `bottom` are integer matrices,
/// `coupling` holds one exponent matrix per generator of the units model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMap {
    pub top: Matrix,
    pub coupling: Vec<Matrix>,
    pub bottom: Matrix,
    pub unit_orders: Vec<u64>,
}

impl BlockMap {
    pub fn new(top: Matrix, coupling: Vec<Matrix>, bottom: Matrix, unit_orders: Vec<u64>) -> Result<BlockMap> {
        if coupling.len() != unit_orders.len() {
            return Err(Error::Schema("one coupling matrix per unit generator is required".into()));
        }
        if coupling.iter().any(|p| p.rows() != top.rows() || p.cols() != bottom.cols()) {
            return Err(Error::Schema("coupling blocks have the wrong shape".into()));
        }
        Ok(BlockMap { top, coupling, bottom, unit_orders })
    }

    /// The degree-0 map on `KH_0`, which only sees the top block.
    pub fn degree0(&self) -> Matrix {
        self.top.clone()
    }

    /// Integer presentation of the degree-1 map
    /// `𝒰^c₀ ⊕ Z^c₁ → 𝒰^r₀ ⊕ Z^r₁`, with the relations of `𝒰^r₀` appended
    /// as extra columns.
    pub fn degree1(&self) -> Matrix {
        let s = self.unit_orders.len();
        let (r0, c0) = (self.top.rows(), self.top.cols());
        let (r1, c1) = (self.bottom.rows(), self.bottom.cols());
        let finite: Vec<(usize, u64)> = self.unit_orders.iter().copied().enumerate().filter(|&(_, o)| o > 0).collect();
        let rels = r0 * finite.len();
        let mut m = Matrix::zeros(r0 * s + r1, c0 * s + c1 + rels);
        for i in 0..r0 {
            for j in 0..c0 {
                for g in 0..s {
                    m.set(i * s + g, j * s + g, self.top.get(i, j).clone());
                }
            }
            for j in 0..c1 {
                for g in 0..s {
                    m.set(i * s + g, c0 * s + j, self.coupling[g].get(i, j).clone());
                }
            }
        }
        m.set_block(r0 * s, c0 * s, &self.bottom);
        for (k, (i, (g, o))) in (0..r0).flat_map(|i| finite.iter().map(move |&f| (i, f))).enumerate() {
            m.set(i * s + g, c0 * s + c1 + k, BigInt::from(o));
        }
        m
    }

    /// The 𝔚-module presentation `[[top, coupling], [0, bottom]]` as a map of
    /// underlying abelian groups, `(Z ⊕ 𝒰)^{c₀+c₁} → (Z ⊕ 𝒰)^{r₀+r₁}`.
    pub fn underlying(&self) -> Matrix {
        let (r0, c0) = (self.top.rows(), self.top.cols());
        let (r1, c1) = (self.bottom.rows(), self.bottom.cols());
        let mut int = Matrix::zeros(r0 + r1, c0 + c1);
        int.set_block(0, 0, &self.top);
        int.set_block(r0, c0, &self.bottom);
        let units = self
            .coupling
            .iter()
            .map(|p| {
                let mut u = Matrix::zeros(r0 + r1, c0 + c1);
                u.set_block(0, c0, p);
                u
            })
            .collect::<Vec<_>>();
        w_presentation(&int, &units, &self.unit_orders)
    }

    /// `U · self · V` for block-diagonal `U = diag(U₀, U₁)`, `V = diag(V₀, V₁)`.
    pub fn conjugate(&self, u: &Matrix, v: &Matrix) -> Result<BlockMap> {
        let (r0, c0) = (self.top.rows(), self.top.cols());
        let (r1, c1) = (self.bottom.rows(), self.bottom.cols());
        if u.rows() != r0 + r1 || u.cols() != r0 + r1 || v.rows() != c0 + c1 || v.cols() != c0 + c1 {
            return Err(Error::Domain("U and V do not match the block sizes".into()));
        }
        if !u.block(0, r0, r0, r1).is_zero()
            || !u.block(r0, 0, r1, r0).is_zero()
            || !v.block(0, c0, c0, c1).is_zero()
            || !v.block(c0, 0, c1, c0).is_zero()
        {
            return Err(Error::Domain(
                "integer entries cannot connect shifted and unshifted summands; U and V must be block diagonal".into(),
            ));
        }
        for (m, name) in [(u, "U"), (v, "V")] {
            if m.det().abs() != BigInt::one() {
                return Err(Error::Domain(format!("{name} is not unimodular")));
            }
        }
        let (u0, u1) = (u.block(0, 0, r0, r0), u.block(r0, r0, r1, r1));
        let (v0, v1) = (v.block(0, 0, c0, c0), v.block(c0, c0, c1, c1));
        Ok(BlockMap {
            top: u0.mul(&self.top).mul(&v0),
            coupling: self.coupling.iter().map(|p| u0.mul(p).mul(&v1)).collect(),
            bottom: u1.mul(&self.bottom).mul(&v1),
            unit_orders: self.unit_orders.clone(),
        })
    }
}

/// Underlying abelian map of a 𝔚-matrix with integer parts `int` and unit
/// exponent parts `units`: `(n, u) · (m, u') = (nm, u^m u'^n)`. Rows and
/// columns are `Z^R ⊕ 𝒰^R` and `Z^C ⊕ 𝒰^C`, followed by the relation columns
/// of `𝒰^R`.
pub fn w_presentation(int: &Matrix, units: &[Matrix], orders: &[u64]) -> Matrix {
    let s = orders.len();
    let (r, c) = (int.rows(), int.cols());
    let finite: Vec<(usize, u64)> = orders.iter().copied().enumerate().filter(|&(_, o)| o > 0).collect();
    let mut m = Matrix::zeros(r + r * s, c + c * s + r * finite.len());
    m.set_block(0, 0, int);
    for i in 0..r {
        for j in 0..c {
            for g in 0..s {
                m.set(r + i * s + g, j, units[g].get(i, j).clone());
                m.set(r + i * s + g, c + j * s + g, int.get(i, j).clone());
            }
        }
    }
    let base = c + c * s;
    for (k, (i, (g, o))) in (0..r).flat_map(|i| finite.iter().map(move |&f| (i, f))).enumerate() {
        m.set(r + i * s + g, base + k, BigInt::from(o));
    }
    m
}

/// `I − D*` for a Katsura triple: `top = I − Aᵗ`, `bottom = I − Bᵗ`, and the
/// coupling entry at `(v, w)` is the exponent vector of `C_{w,v}`.
pub fn katsura_block_map(k: &KatsuraTriple, units: &UnitsModel) -> Result<BlockMap> {
    if units.field() != k.field() {
        return Err(Error::Encoding(format!("units model is for {}, the triple for {}", units.field(), k.field())));
    }
    let n = k.vertices().len();
    let rows = k.rows();
    let s = units.orders().len();
    let mut top = Matrix::zeros(n, rows.len());
    let mut bottom = Matrix::zeros(n, rows.len());
    let mut coupling = vec![Matrix::zeros(n, rows.len()); s];
    for (i, &w) in rows.iter().enumerate() {
        for v in 0..n {
            let id = BigInt::from((v == w) as i64);
            top.set(v, i, &id - BigInt::from(k.a()[i][v]));
            bottom.set(v, i, &id - BigInt::from(k.b()[i][v]));
            let exps = units.encode(&k.c()[i][v])?;
            for g in 0..s {
                coupling[g].set(v, i, BigInt::from(exps[g]));
            }
        }
    }
    BlockMap::new(top, coupling, bottom, units.orders().to_vec())
}

#[derive(Clone, Debug)]
pub struct KhReport {
    pub kh0: AbGroup,
    pub kh1: AbGroup,
    /// `coker` of the degree-1 map, the subgroup in `0 → coker → KH₁ → ker → 0`.
    pub coker1: AbGroup,
    /// `ker` of the degree-0 map, free.
    pub ker0: AbGroup,
    pub deg0_diagonal: Vec<BigInt>,
    pub deg1_diagonal: Vec<BigInt>,
}

/// `KH₀ = coker(deg 0)`, `KH₁ = coker(deg 1) ⊕ ker(deg 0)`; the sequence
/// splits because the kernel is free.
pub fn kh_groups(map: &BlockMap) -> KhReport {
    let d0 = map.degree0();
    let d1 = map.degree1();
    let s0 = smith_normal_form(&d0);
    let s1 = smith_normal_form(&d1);
    let (kh0, ker0) = coker_ker(&d0);
    let coker1 = coker(&d1);
    KhReport {
        kh1: coker1.direct_sum(&ker0),
        kh0,
        coker1,
        ker0,
        deg0_diagonal: s0.diagonal(),
        deg1_diagonal: s1.diagonal(),
    }
}

/// Underlying groups of `coker(I − D*)` and `coker(I − D)` with
/// `D = [[A, 0], [C, B]]`.
pub fn bf_modules(k: &KatsuraTriple, units: &UnitsModel) -> Result<(AbGroup, AbGroup)> {
    let bf = coker(&katsura_block_map(k, units)?.underlying());
    let n = k.vertices().len();
    let rows = k.rows();
    let r = rows.len();
    let s = units.orders().len();
    let mut int = Matrix::zeros(2 * r, 2 * n);
    let mut unit_parts = vec![Matrix::zeros(2 * r, 2 * n); s];
    for (i, &v) in rows.iter().enumerate() {
        for w in 0..n {
            let id = BigInt::from((v == w) as i64);
            int.set(i, w, &id - BigInt::from(k.a()[i][w]));
            int.set(r + i, n + w, &id - BigInt::from(k.b()[i][w]));
            let exps = units.encode(&k.c()[i][w])?;
            for g in 0..s {
                unit_parts[g].set(r + i, w, BigInt::from(-exps[g]));
            }
        }
    }
    let checked = coker(&w_presentation(&int, &unit_parts, units.orders()));
    Ok((bf, checked))
}

/// `E = [[M, 0, P, 0], [0, I, 0, 0], [0, 0, N, 0], [0, 0, 0, I]]`.
pub fn stabilize(m: &Matrix, n: &Matrix, p: &[Matrix], unit_orders: &[u64]) -> Result<BlockMap> {
    let k = m.rows();
    if [m.cols(), n.rows(), n.cols()].iter().any(|&d| d != k) || p.iter().any(|x| x.rows() != k || x.cols() != k) {
        return Err(Error::Schema("M, N and P must be square of the same size".into()));
    }
    let mut top = Matrix::identity(2 * k);
    top.set_block(0, 0, m);
    let mut bottom = Matrix::identity(2 * k);
    bottom.set_block(0, 0, n);
    let coupling = p
        .iter()
        .map(|x| {
            let mut c = Matrix::zeros(2 * k, 2 * k);
            c.set_block(0, 0, x);
            c
        })
        .collect();
    BlockMap::new(top, coupling, bottom, unit_orders.to_vec())
}

/// Reads `[[I − Aᵗ, C], [0, I − Bᵗ]]` back as a triple; the inverse of
/// [`katsura_block_map`] on square data. Returns the reason when `A` has a
/// negative entry or the vanishing conditions fail.
pub fn solve_katsura(map: &BlockMap, units: &UnitsModel) -> std::result::Result<KatsuraTriple, String> {
    let n = map.top.rows();
    if map.top.cols() != n || map.bottom.rows() != n || map.bottom.cols() != n {
        return Err("blocks are not square".into());
    }
    let id = Matrix::identity(n);
    let a = id.sub(&map.top).transpose();
    let b = id.sub(&map.bottom).transpose();
    let a = a.to_i64_rows().ok_or("A has huge entries")?;
    let b = b.to_i64_rows().ok_or("B has huge entries")?;
    if let Some((i, j)) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] < 0) {
        return Err(format!("A has the negative entry {} at ({i}, {j})", a[i][j]));
    }
    let mut c = vec![vec![units.field().one(); n]; n];
    for v in 0..n {
        for w in 0..n {
            let exps: Vec<i64> = map
                .coupling
                .iter()
                .map(|p| p.get(w, v).to_i64().ok_or("C has huge exponents"))
                .collect::<std::result::Result<_, _>>()?;
            if a[v][w] == 0 && !units.is_trivial(&exps) {
                return Err(format!("A vanishes at ({v}, {w}) but C does not"));
            }
            c[v][w] = units.decode(&exps);
        }
    }
    let a: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
    KatsuraTriple::new(default_labels(n), (0..n).collect(), a, b, c, units.field()).map_err(|e| e.to_string())
}

/// `V = [[0, −I, 0, 0], [I, Y, 0, 0], [0, 0, 0, −I], [0, 0, −I, 0]]` and
/// `U = [[I, I, 0], [0, I, 0], [0, 0, I₂ₙ]]` for blocks of size `n`.
pub fn realization_matrices(y: &Matrix) -> (Matrix, Matrix) {
    let n = y.rows();
    let id = Matrix::identity(n);
    let mut u = Matrix::identity(4 * n);
    u.set_block(0, n, &id);
    let mut v = Matrix::zeros(4 * n, 4 * n);
    v.set_block(0, n, &id.neg());
    v.set_block(n, 0, &id);
    v.set_block(n, n, y);
    v.set_block(2 * n, 3 * n, &id.neg());
    v.set_block(3 * n, 2 * n, &id.neg());
    (u, v)
}

/// Tries every `Y` with entries in `[−bound, bound]` (at most `max_tries` of
/// them) and returns the first whose conjugate is a KSPI Katsura triple.
pub fn search_y(
    e: &BlockMap,
    units: &UnitsModel,
    bound: i64,
    max_tries: usize,
) -> std::result::Result<(Matrix, KatsuraTriple), String> {
    let n = e.top.rows() / 2;
    let width = (2 * bound + 1) as usize;
    let total = width.checked_pow((n * n) as u32).unwrap_or(usize::MAX);
    let mut last = String::from("no candidates");
    for idx in 0..total.min(max_tries) {
        let mut y = Matrix::zeros(n, n);
        let mut rest = idx;
        for i in 0..n * n {
            y.set(i / n, i % n, BigInt::from((rest % width) as i64 - bound));
            rest /= width;
        }
        let (u, v) = realization_matrices(&y);
        let conj = e.conjugate(&u, &v).map_err(|e| e.to_string())?;
        match solve_katsura(&conj, units) {
            Ok(k) if crate::katsura::is_kspi(&k).holds() => return Ok((y, k)),
            Ok(_) => last = "solved triple is not KSPI".into(),
            Err(why) => last = why,
        }
    }
    Err(format!("no Y with entries in [−{bound}, {bound}] reached KSPI form (last obstruction: {last})"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn diag_of(x: &Matrix) -> Vec<i64> {
        smith_normal_form(x).diagonal().iter().map(|d| d.to_i64().unwrap()).collect()
    }

    #[test]
    fn snf_examples() {
        assert_eq!(diag_of(&m(&[&[0]])), vec![0]);
        assert_eq!(diag_of(&m(&[&[-2]])), vec![2]);
        assert_eq!(diag_of(&m(&[&[2, 1], &[0, 2]])), vec![1, 4]);
        assert_eq!(diag_of(&m(&[&[2, 0], &[0, 3]])), vec![1, 6]);
    }

    #[test]
    fn snf_reconstructs() {
        let x = m(&[&[4, 6, 2], &[0, 3, -9], &[8, 1, 1], &[2, 2, 2]]);
        let snf = smith_normal_form(&x);
        assert_eq!(snf.u.mul(&snf.s).mul(&snf.v), x);
        assert_eq!(snf.u.det().abs(), BigInt::one());
        assert_eq!(snf.v.det().abs(), BigInt::one());
    }

    #[test]
    fn cokernels() {
        assert_eq!(coker_ker(&m(&[&[-1]])), (AbGroup::zero(), AbGroup::zero()));
        let (c, k) = coker_ker(&m(&[&[-2]]));
        assert_eq!(c.to_string(), "Z/2");
        assert!(k.is_trivial());
        let (c, k) = coker_ker(&Matrix::zeros(3, 3));
        assert_eq!((c.rank, k.rank), (3, 3));
        assert_eq!(c.to_string(), "Z^3");
    }

    #[test]
    fn direct_sums_normalise() {
        let a = AbGroup::from_orders(&[BigInt::from(2)]);
        let b = AbGroup::from_orders(&[BigInt::from(3), BigInt::zero()]);
        assert_eq!(a.direct_sum(&b).to_string(), "Z ⊕ Z/6");
    }

    #[test]
    fn units_prime_field() {
        let u = UnitsModel::prime_field(7, DEFAULT_DLOG_CAP).unwrap();
        assert_eq!(u.orders(), &[6]);
        let f = Field::Prime(7);
        for x in 1..7 {
            let s = f.from_i64(x);
            assert_eq!(u.decode(&u.encode(&s).unwrap()), s);
        }
        for x in 1..7 {
            for y in 1..7 {
                let (a, b) = (f.from_i64(x), f.from_i64(y));
                let ea = u.encode(&a).unwrap()[0];
                let eb = u.encode(&b).unwrap()[0];
                assert_eq!(u.encode(&(a * b)).unwrap()[0], (ea + eb) % 6);
            }
        }
        assert!(UnitsModel::prime_field(2, 10).unwrap().orders().is_empty());
        assert!(UnitsModel::prime_field(101, 50).is_err());
    }

    #[test]
    fn units_rationals() {
        let u = UnitsModel::rationals(&[2, 3]).unwrap();
        let q = Field::Rationals;
        let x = q.parse("-4/3").unwrap();
        assert_eq!(u.encode(&x).unwrap(), vec![1, 2, -1]);
        assert_eq!(u.decode(&[1, 2, -1]), x);
        assert!(matches!(u.encode(&q.from_i64(5)), Err(Error::Encoding(_))));
    }

    #[test]
    fn leavitt_algebras() {
        for n in 2..=8u64 {
            let k = KatsuraTriple::square(vec![vec![n]], vec![vec![1]], None, Field::Prime(2)).unwrap();
            let units = UnitsModel::for_field(k.field(), &[]).unwrap();
            let r = kh_groups(&katsura_block_map(&k, &units).unwrap());
            let expected = if n == 2 { "0".to_string() } else { format!("Z/{}", n - 1) };
            assert_eq!(r.kh0.to_string(), expected);
        }
    }

    #[test]
    fn one_loop_k_theory() {
        let f = Field::Prime(7);
        let k = KatsuraTriple::square(vec![vec![1]], vec![vec![1]], None, f).unwrap();
        let units = UnitsModel::for_field(f, &[]).unwrap();
        let r = kh_groups(&katsura_block_map(&k, &units).unwrap());
        assert_eq!(r.kh0.to_string(), "Z");
        assert_eq!(r.coker1.to_string(), "Z ⊕ Z/6");
        assert_eq!(r.kh1.to_string(), "Z^2 ⊕ Z/6");
    }

    #[test]
    fn bf_small_cases() {
        let f = Field::Prime(2);
        let k = KatsuraTriple::square(vec![vec![2]], vec![vec![1]], None, f).unwrap();
        let units = UnitsModel::for_field(f, &[]).unwrap();
        let (bf, checked) = bf_modules(&k, &units).unwrap();
        assert_eq!(bf.to_string(), "Z");
        assert_eq!(checked.to_string(), "Z");
    }

    #[test]
    fn stabilize_shape() {
        let one = m(&[&[1]]);
        let e = stabilize(&one, &one, &[Matrix::zeros(1, 1)], &[6]).unwrap();
        assert_eq!(e.top, Matrix::identity(2));
        assert_eq!(e.bottom, Matrix::identity(2));
        assert!(e.coupling[0].is_zero());
        let p = m(&[&[5]]);
        let e = stabilize(&m(&[&[3]]), &m(&[&[-1]]), &[p.clone()], &[6]).unwrap();
        assert_eq!(e.coupling[0].block(0, 0, 1, 1), p);
        assert_eq!(e.coupling[0].get(1, 1), &BigInt::zero());
    }

    #[test]
    fn round_trip_through_block_map() {
        let f = Field::Prime(7);
        let c = vec![vec![f.from_i64(3), f.one()], vec![f.from_i64(5), f.from_i64(6)]];
        let k = KatsuraTriple::square(vec![vec![2, 0], vec![1, 3]], vec![vec![1, 0], vec![-2, 1]], Some(c), f).unwrap();
        let units = UnitsModel::for_field(f, &[]).unwrap();
        let map = katsura_block_map(&k, &units).unwrap();
        assert_eq!(solve_katsura(&map, &units).unwrap(), k);
    }

    #[test]
    fn standard_conjugation_has_negative_block() {
        let units = UnitsModel::for_field(Field::Prime(7), &[]).unwrap();
        let e = stabilize(&m(&[&[2]]), &m(&[&[0]]), &[m(&[&[1]])], units.orders()).unwrap();
        let (u, v) = realization_matrices(&m(&[&[1]]));
        let conj = e.conjugate(&u, &v).unwrap();
        assert_eq!(kh_groups(&conj).kh0, kh_groups(&e).kh0);
        assert!(solve_katsura(&conj, &units).unwrap_err().contains("negative"));
        assert!(search_y(&e, &units, 1, 100).is_err());
    }
}
