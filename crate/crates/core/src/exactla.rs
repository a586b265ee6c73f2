//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Matrices act on column vectors. Hermite forms are row-style (`U·M = H`),
//! Smith forms are two-sided (`U·M·V = D`).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("no integer solution")]
    NoSolution,
    #[error("malformed matrix: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from machine-integer rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend(r.as_ref().iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend(r);
        }
        Ok(IntMatrix { rows: n, cols, data })
    }

    /// Matrix whose columns are the given vectors; `rows` fixes the shape when `columns` is empty.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LinalgError::DimensionMismatch { expected: rows, found: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        Ok(m)
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

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
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

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    /// `self − I`; panics if not square.
    pub fn minus_identity(&self) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        self.sub(&Self::identity(self.rows))
    }

    pub fn pow(&self, mut e: u32) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Horizontal concatenation; all blocks must share the row count `rows`.
    pub fn hstack(rows: usize, blocks: &[&IntMatrix]) -> IntMatrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..b.cols {
                    out.data[i * cols + off + j] = b.get(i, j).clone();
                }
            }
            off += b.cols;
        }
        out
    }

    /// Vertical concatenation; all blocks must share the column count `cols`.
    pub fn vstack(cols: usize, blocks: &[&IntMatrix]) -> IntMatrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend(b.data.iter().cloned());
            rows += b.rows;
        }
        IntMatrix { rows, cols, data }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += k · row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[source * self.cols + j];
            if !s.is_zero() {
                let v = s * k;
                self.data[target * self.cols + j] += v;
            }
        }
    }

    /// col[target] += k · col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + source];
            if !s.is_zero() {
                let v = s * k;
                self.data[i * self.cols + target] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1))
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    /// Inverse of a unimodular matrix, read off from its Hermite form.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let (h, u) = hermite_normal_form(self);
        if h.is_identity() {
            Ok(u)
        } else {
            Err(LinalgError::NotUnimodular)
        }
    }

    /// Parses whitespace-separated rows, one per non-empty line.
    pub fn parse(text: &str) -> Result<IntMatrix, LinalgError> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<BigInt>().map_err(|_| LinalgError::Parse(format!("bad entry {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(LinalgError::Parse("empty matrix".into()));
        }
        IntMatrix::from_big_rows(rows).map_err(|_| LinalgError::Parse("ragged rows".into()))
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.data.iter().map(|x| x.to_string()).collect();
        let width = strs.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|j| format!("{:>width$}", strs[i * self.cols + j])).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Order of an element of a finitely generated abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(BigInt),
    Infinite,
}

impl Order {
    pub fn is_one(&self) -> bool {
        matches!(self, Order::Finite(n) if n.is_one())
    }

    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }

    /// True when the order is finite and divisible by `d`.
    pub fn is_divisible_by(&self, d: &BigInt) -> bool {
        match self {
            Order::Finite(n) => (n % d).is_zero(),
            Order::Infinite => false,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

fn argmin_abs<I: Iterator<Item = (usize, usize)>>(m: &IntMatrix, cells: I) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for (i, j) in cells {
        let x = m.get(i, j);
        if x.is_zero() {
            continue;
        }
        let a = x.abs();
        if best.as_ref().is_none_or(|(_, b)| a < *b) {
            let done = a.is_one();
            best = Some(((i, j), a));
            if done {
                break;
            }
        }
    }
    best.map(|(p, _)| p)
}

fn hnf_in_place(h: &mut IntMatrix, mut u: Option<&mut IntMatrix>) {
    let (rows, cols) = (h.rows, h.cols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let Some((p, _)) = argmin_abs(h, (r..rows).map(|i| (i, c))) else { break };
            h.swap_rows(r, p);
            if let Some(u) = u.as_deref_mut() {
                u.swap_rows(r, p);
            }
            let mut clean = true;
            for i in r + 1..rows {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = -h.get(i, c).div_floor(h.get(r, c));
                h.add_row_multiple(i, r, &q);
                if let Some(u) = u.as_deref_mut() {
                    u.add_row_multiple(i, r, &q);
                }
                if !h.get(i, c).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            if let Some(u) = u.as_deref_mut() {
                u.negate_row(r);
            }
        }
        for i in 0..r {
            let q = -h.get(i, c).div_floor(h.get(r, c));
            h.add_row_multiple(i, r, &q);
            if let Some(u) = u.as_deref_mut() {
                u.add_row_multiple(i, r, &q);
            }
        }
        r += 1;
    }
}

/// Row Hermite normal form: returns `(H, U)` with `U` unimodular and `U·M = H`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    hnf_in_place(&mut h, Some(&mut u));
    (h, u)
}

/// Smith normal form with minimal-absolute-value pivoting: returns `(D, U, V)` with `U·M·V = D`.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let cells = (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j)));
            let Some((pi, pj)) = argmin_abs(&d, cells) else {
                return (d, u, v);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -(d.get(i, t) / d.get(t, t));
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -(d.get(t, j) / d.get(t, t));
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let pivot = d.get(t, t).clone();
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(d.get(i, j) % &pivot).is_zero()));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    (d, u, v)
}

/// Diagonal of a Smith form padded to `rows` entries (zeros beyond the column count).
fn smith_diagonal(d: &IntMatrix) -> Vec<BigInt> {
    (0..d.rows).map(|i| if i < d.cols { d.get(i, i).clone() } else { BigInt::zero() }).collect()
}

fn order_from_smith(diag: &[BigInt], coords: &[BigInt]) -> Order {
    let mut order = BigInt::one();
    for (di, ci) in diag.iter().zip(coords) {
        if di.is_zero() {
            if !ci.is_zero() {
                return Order::Infinite;
            }
        } else {
            let part = di / di.gcd(ci);
            order = order.lcm(&part);
        }
    }
    Order::Finite(order)
}

/// Order of `c` in the cokernel `ℤ^rows / colspan(M)`.
pub fn cokernel_order_of(m: &IntMatrix, c: &[BigInt]) -> Result<Order, LinalgError> {
    if c.len() != m.rows {
        return Err(LinalgError::DimensionMismatch { expected: m.rows, found: c.len() });
    }
    let (d, u, _) = smith_normal_form(m);
    Ok(order_from_smith(&smith_diagonal(&d), &u.mul_vec(c)))
}

/// A finitely generated abelian group `ℤ^n / colspan(R)`, SNF-reduced.
#[derive(Clone, Debug)]
pub struct AbelianPresentation {
    pub ambient_rank: usize,
    pub relation_matrix: IntMatrix,
    /// Nontrivial invariant factors: torsion factors in divisibility order, then one 0 per free summand.
    pub invariant_factors: Vec<BigInt>,
    reduction: IntMatrix,
    diagonal: Vec<BigInt>,
}

impl AbelianPresentation {
    pub fn from_relations(relation_matrix: IntMatrix) -> Self {
        let (d, u, _) = smith_normal_form(&relation_matrix);
        let diagonal = smith_diagonal(&d);
        let mut torsion: Vec<BigInt> = diagonal.iter().filter(|x| !x.is_zero() && !x.is_one()).cloned().collect();
        let free = diagonal.iter().filter(|x| x.is_zero()).count();
        torsion.extend(std::iter::repeat_n(BigInt::zero(), free));
        AbelianPresentation { ambient_rank: relation_matrix.rows, relation_matrix, invariant_factors: torsion, reduction: u, diagonal }
    }

    pub fn order_of(&self, c: &[BigInt]) -> Result<Order, LinalgError> {
        if c.len() != self.ambient_rank {
            return Err(LinalgError::DimensionMismatch { expected: self.ambient_rank, found: c.len() });
        }
        Ok(order_from_smith(&self.diagonal, &self.reduction.mul_vec(c)))
    }

    /// Coordinates of `c` against the nontrivial cyclic factors, reduced into `[0, dᵢ)` for torsion factors.
    pub fn coordinates(&self, c: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if c.len() != self.ambient_rank {
            return Err(LinalgError::DimensionMismatch { expected: self.ambient_rank, found: c.len() });
        }
        let y = self.reduction.mul_vec(c);
        let mut torsion = Vec::new();
        let mut free = Vec::new();
        for (di, yi) in self.diagonal.iter().zip(y) {
            if di.is_zero() {
                free.push(yi);
            } else if !di.is_one() {
                torsion.push(yi.mod_floor(di));
            }
        }
        torsion.extend(free);
        Ok(torsion)
    }

    /// Element of `ℤ^n` representing the given coordinates (inverse of [`coordinates`](Self::coordinates)).
    pub fn element_from_coordinates(&self, coords: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if coords.len() != self.invariant_factors.len() {
            return Err(LinalgError::DimensionMismatch { expected: self.invariant_factors.len(), found: coords.len() });
        }
        let mut y = vec![BigInt::zero(); self.ambient_rank];
        let mut slots: Vec<usize> = (0..self.ambient_rank).filter(|&i| !self.diagonal[i].is_zero() && !self.diagonal[i].is_one()).collect();
        slots.extend((0..self.ambient_rank).filter(|&i| self.diagonal[i].is_zero()));
        for (slot, c) in slots.into_iter().zip(coords) {
            y[slot] = c.clone();
        }
        let inv = self.reduction.unimodular_inverse()?;
        Ok(inv.mul_vec(&y))
    }

    /// Linear coordinate functionals: one `(row, dᵢ)` per nontrivial factor, in the order of
    /// [`invariant_factors`](Self::invariant_factors). The coordinate of `c` is `row·c` taken
    /// modulo `dᵢ` (no reduction for free factors, where `dᵢ = 0`).
    pub fn coordinate_functionals(&self) -> Vec<(Vec<BigInt>, BigInt)> {
        let torsion = (0..self.ambient_rank).filter(|&i| !self.diagonal[i].is_zero() && !self.diagonal[i].is_one());
        let free = (0..self.ambient_rank).filter(|&i| self.diagonal[i].is_zero());
        torsion.chain(free).map(|i| (self.reduction.row(i).to_vec(), self.diagonal[i].clone())).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn free_rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| d.is_zero()).count()
    }

    /// Group order, or `None` when infinite.
    pub fn cardinality(&self) -> Option<BigInt> {
        if self.free_rank() > 0 {
            None
        } else {
            Some(self.invariant_factors.iter().fold(BigInt::one(), |a, d| a * d))
        }
    }
}

impl fmt::Display for AbelianPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.invariant_factors.iter().map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z/{d}") }).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical basis (nonzero rows of the reduced row Hermite form) of the lattice spanned by the rows.
pub fn row_lattice_basis(generators: &IntMatrix) -> IntMatrix {
    let mut h = generators.clone();
    hnf_in_place(&mut h, None);
    let keep = (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    let data = h.data[..keep * h.cols].to_vec();
    IntMatrix { rows: keep, cols: h.cols, data }
}

/// Canonical basis (as rows) of the lattice spanned by the columns.
pub fn column_lattice_basis(m: &IntMatrix) -> IntMatrix {
    row_lattice_basis(&m.transpose())
}

/// Membership test against a basis in row Hermite form.
pub fn hnf_basis_contains(basis: &IntMatrix, v: &[BigInt]) -> bool {
    assert_eq!(basis.cols, v.len());
    let mut v = v.to_vec();
    for i in 0..basis.rows {
        let row = basis.row(i);
        let Some(c) = row.iter().position(|x| !x.is_zero()) else { continue };
        if v[..c].iter().any(|x| !x.is_zero()) {
            return false;
        }
        let (q, r) = v[c].div_rem(&row[c]);
        if !r.is_zero() {
            return false;
        }
        if !q.is_zero() {
            for (x, b) in v.iter_mut().zip(row) {
                *x -= &q * b;
            }
        }
    }
    v.iter().all(Zero::is_zero)
}

pub fn in_column_span(m: &IntMatrix, c: &[BigInt]) -> Result<bool, LinalgError> {
    if c.len() != m.rows {
        return Err(LinalgError::DimensionMismatch { expected: m.rows, found: c.len() });
    }
    Ok(hnf_basis_contains(&column_lattice_basis(m), c))
}

/// Equality of the lattices spanned by the columns of `a` and `b`.
pub fn column_lattices_equal(a: &IntMatrix, b: &IntMatrix) -> bool {
    a.rows == b.rows && column_lattice_basis(a) == column_lattice_basis(b)
}

/// Basis (as columns) of the integer kernel `{x : M·x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hermite_normal_form(&m.transpose());
    let zero_rows: Vec<usize> = (0..h.rows).filter(|&i| h.row(i).iter().all(Zero::is_zero)).collect();
    let mut k = IntMatrix::zeros(m.cols, zero_rows.len());
    for (j, &i) in zero_rows.iter().enumerate() {
        for (r, x) in u.row(i).iter().enumerate() {
            k.set(r, j, x.clone());
        }
    }
    k
}

/// Some integer solution of `M·x = b`.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
    if b.len() != m.rows {
        return Err(LinalgError::DimensionMismatch { expected: m.rows, found: b.len() });
    }
    let (d, u, v) = smith_normal_form(m);
    let y = u.mul_vec(b);
    let mut x = vec![BigInt::zero(); m.cols];
    for (i, yi) in y.iter().enumerate() {
        let di = if i < m.cols { d.get(i, i).clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !yi.is_zero() {
                return Err(LinalgError::NoSolution);
            }
        } else {
            let (q, r) = yi.div_rem(&di);
            if !r.is_zero() {
                return Err(LinalgError::NoSolution);
            }
            x[i] = q;
        }
    }
    Ok(v.mul_vec(&x))
}

/// Triangular basis (rows) of the lattice spanned by the rows of `generators` together with `N·ℤ^d`.
///
/// Entries are kept reduced modulo `N`, so intermediate growth is bounded.
pub fn row_lattice_basis_mod(generators: &IntMatrix, modulus: &BigInt) -> IntMatrix {
    assert!(modulus.is_positive());
    let d = generators.cols;
    let mut basis = IntMatrix::identity(d).scale(modulus);
    let mut v = vec![BigInt::zero(); d];
    for r in 0..generators.rows {
        for (x, g) in v.iter_mut().zip(generators.row(r)) {
            *x = g.mod_floor(modulus);
        }
        insert_mod(&mut basis, &mut v, modulus);
    }
    for k in 0..d {
        let p = basis.get(k, k).clone();
        for i in 0..k {
            let q = -basis.get(i, k).div_floor(&p);
            basis.add_row_multiple(i, k, &q);
            for j in k + 1..d {
                let x = basis.get(i, j).mod_floor(modulus);
                basis.set(i, j, x);
            }
        }
    }
    basis
}

fn insert_mod(basis: &mut IntMatrix, v: &mut [BigInt], modulus: &BigInt) {
    let d = basis.cols;
    for k in 0..d {
        if v[k].is_zero() {
            continue;
        }
        let p = basis.get(k, k).clone();
        let ext = p.extended_gcd(&v[k]);
        let (g, s, t) = (ext.gcd, ext.x, ext.y);
        let a = &v[k] / &g;
        let b = &p / &g;
        for j in k..d {
            let bj = basis.get(k, j).clone();
            let new_b = (&s * &bj + &t * &v[j]).mod_floor(modulus);
            let new_v = (&a * &bj - &b * &v[j]).mod_floor(modulus);
            basis.set(k, j, new_b);
            v[j] = new_v;
        }
        // g divides N, so the reduced pivot is g itself unless g = N.
        basis.set(k, k, g.clone());
        v[k] = BigInt::zero();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_examples() {
        let (h, u) = hermite_normal_form(&IntMatrix::identity(2));
        assert!(h.is_identity() && u.is_identity());
        let z = IntMatrix::zeros(2, 3);
        let (h, u) = hermite_normal_form(&z);
        assert!(h.is_zero() && u.is_identity());
        let m = IntMatrix::from_rows(&[[2, 4], [6, 8]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(u.mul(&m), h);
        assert_eq!(h.get(0, 0), &BigInt::from(2));
        assert_eq!(h.get(1, 1), &BigInt::from(4));
        assert!(h.get(1, 0).is_zero());
        assert!(u.is_unimodular());
    }

    #[test]
    fn snf_examples() {
        let (d, u, v) = smith_normal_form(&IntMatrix::identity(3));
        assert!(d.is_identity() && u.is_identity() && v.is_identity());
        let m = IntMatrix::from_rows(&[[6, 0], [0, 4]]);
        let (d, u, v) = smith_normal_form(&m);
        assert_eq!(d, IntMatrix::from_rows(&[[2, 0], [0, 12]]));
        assert_eq!(u.mul(&m).mul(&v), d);
        let m = IntMatrix::from_rows(&[[2, 4], [6, 8]]);
        let (d, _, _) = smith_normal_form(&m);
        assert_eq!(d, IntMatrix::from_rows(&[[2, 0], [0, 4]]));
    }

    #[test]
    fn cokernel_order_examples() {
        let m = IntMatrix::from_rows(&[[2]]);
        assert_eq!(cokernel_order_of(&m, &big(&[1])).unwrap(), Order::Finite(2.into()));
        let empty = IntMatrix::zeros(1, 0);
        assert_eq!(cokernel_order_of(&empty, &big(&[1])).unwrap(), Order::Infinite);
        let m = IntMatrix::from_rows(&[[3, 0], [0, 0]]);
        assert_eq!(cokernel_order_of(&m, &big(&[1, 0])).unwrap(), Order::Finite(3.into()));
        assert!(matches!(cokernel_order_of(&m, &big(&[1])), Err(LinalgError::DimensionMismatch { .. })));
    }

    #[test]
    fn determinant_small() {
        let m = IntMatrix::from_rows(&[[2, 1, 0], [1, 3, 1], [0, 1, 4]]);
        assert_eq!(m.determinant().unwrap(), BigInt::from(18));
        let s = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        assert_eq!(s.determinant().unwrap(), BigInt::from(-1));
        assert_eq!(IntMatrix::zeros(0, 0).determinant().unwrap(), BigInt::one());
    }

    #[test]
    fn presentation_of_swap_coinvariants() {
        let swap = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        let p = AbelianPresentation::from_relations(swap.minus_identity());
        assert_eq!(p.invariant_factors, vec![BigInt::zero()]);
        assert_eq!(p.to_string(), "Z");
        let p = AbelianPresentation::from_relations(IntMatrix::from_rows(&[[4, 0, 0], [0, 6, 0]]));
        assert_eq!(p.invariant_factors, big(&[2, 12]));
        assert_eq!(p.cardinality(), Some(BigInt::from(24)));
        let c = big(&[1, 1]);
        let coords = p.coordinates(&c).unwrap();
        let back = p.element_from_coordinates(&coords).unwrap();
        assert_eq!(p.coordinates(&back).unwrap(), coords);
    }

    #[test]
    fn kernel_and_solve() {
        let m = IntMatrix::from_rows(&[[1, 2, 3], [2, 4, 6]]);
        let k = integer_kernel(&m);
        assert_eq!(k.cols(), 2);
        assert!(m.mul(&k).is_zero());
        let x = solve_integer(&m, &big(&[6, 12])).unwrap();
        assert_eq!(m.mul_vec(&x), big(&[6, 12]));
        assert_eq!(solve_integer(&m, &big(&[1, 1])), Err(LinalgError::NoSolution));
    }

    #[test]
    fn modular_lattice_basis() {
        // rows (2, 0) and (1, 3) together with 6·Z^2
        let g = IntMatrix::from_rows(&[[2, 0], [1, 3]]);
        let b = row_lattice_basis_mod(&g, &BigInt::from(6));
        let mut full = IntMatrix::vstack(2, &[&g, &IntMatrix::identity(2).scale(&BigInt::from(6))]);
        full = row_lattice_basis(&full);
        assert_eq!(row_lattice_basis(&b), full);
    }

    #[test]
    fn parse_and_display() {
        let m = IntMatrix::parse("1 2\n-3 4\n").unwrap();
        assert_eq!(m, IntMatrix::from_rows(&[[1, 2], [-3, 4]]));
        assert!(IntMatrix::parse("1 2\n3\n").is_err());
        assert!(IntMatrix::parse("a b").is_err());
        assert_eq!(m.to_string(), " 1  2\n-3  4\n");
    }
}
