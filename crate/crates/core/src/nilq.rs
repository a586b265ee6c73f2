//! The 2-step nilpotent quotient π/L³π of a closed surface group π = π₁(Σ_g).
//!
//! H = ℤ^{2g} has basis x₁, y₁, …, x_g, y_g (indices 0..2g). Wedges e_i∧e_j (i < j) are ordered
//! lexicographically, so ω's last term x_g∧y_g is the last pair; the reduced basis of ∧²H/⟨ω⟩
//! drops it, substituting −Σ_{i<g} xᵢ∧yᵢ.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactla::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NilError {
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("generator index {index} out of range for genus {genus}")]
    BadGenerator { index: i32, genus: usize },
    #[error("element is not in L²: homology part {0:?}")]
    NotInL2(Vec<BigInt>),
    #[error("generator images do not kill the surface relator (residue {0:?})")]
    RelatorFails(Vec<BigInt>),
    #[error("expected {expected} generator images, found {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("cannot parse word: {0}")]
    Parse(String),
}

/// Position of e_i∧e_j (i < j) among the pairs of `{0..n}` in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Pairs `(i, j)` in lexicographic order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Rank of ∧²H/⟨ω⟩ in genus g.
pub fn reduced_rank(genus: usize) -> usize {
    let n = 2 * genus;
    n * (n - 1) / 2 - 1
}

/// Reduces full wedge coordinates modulo ω.
pub fn reduce_wedge(genus: usize, full: &[BigInt]) -> Vec<BigInt> {
    let n = 2 * genus;
    let mut out = full[..full.len() - 1].to_vec();
    let c = &full[full.len() - 1];
    if !c.is_zero() {
        for i in 0..genus - 1 {
            out[pair_index(n, 2 * i, 2 * i + 1)] -= c;
        }
    }
    out
}

/// Lifts reduced coordinates to full coordinates (last pair coefficient 0).
pub fn lift_wedge(full_len: usize, reduced: &[BigInt]) -> Vec<BigInt> {
    let mut out = reduced.to_vec();
    out.resize(full_len, BigInt::zero());
    out
}

/// u∧v in reduced coordinates.
pub fn wedge(genus: usize, u: &[BigInt], v: &[BigInt]) -> Vec<BigInt> {
    let n = 2 * genus;
    let mut full = vec![BigInt::zero(); n * (n - 1) / 2];
    for (i, j) in pairs(n) {
        if (u[i].is_zero() || v[j].is_zero()) && (u[j].is_zero() || v[i].is_zero()) {
            continue;
        }
        full[pair_index(n, i, j)] = &u[i] * &v[j] - &u[j] * &v[i];
    }
    reduce_wedge(genus, &full)
}

/// Reduced coordinates of the basis wedge e_i∧e_j for any i ≠ j.
pub fn basis_wedge(genus: usize, i: usize, j: usize) -> Vec<BigInt> {
    let n = 2 * genus;
    let mut u = vec![BigInt::zero(); n];
    let mut v = vec![BigInt::zero(); n];
    u[i] = BigInt::one();
    v[j] = BigInt::one();
    wedge(genus, &u, &v)
}

pub fn basis_label(i: usize) -> String {
    format!("{}{}", if i.is_multiple_of(2) { 'x' } else { 'y' }, i / 2 + 1)
}

/// Labels of the reduced wedge basis, e.g. `x1^y1`.
pub fn reduced_labels(genus: usize) -> Vec<String> {
    let n = 2 * genus;
    let mut out: Vec<String> = pairs(n).into_iter().map(|(i, j)| format!("{}^{}", basis_label(i), basis_label(j))).collect();
    out.pop();
    out
}

/// β(u, v) = Σ_{i>j} u_i·v_j·e_i∧e_j, in full coordinates.
fn collection_cocycle(u: &[BigInt], v: &[BigInt]) -> Vec<BigInt> {
    let n = u.len();
    let mut full = vec![BigInt::zero(); n * (n - 1) / 2];
    for (j, i) in pairs(n) {
        if !u[i].is_zero() && !v[j].is_zero() {
            full[pair_index(n, j, i)] -= &u[i] * &v[j];
        }
    }
    full
}

fn add_into(a: &mut [BigInt], b: &[BigInt]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NilElement {
    pub genus: usize,
    pub h: Vec<BigInt>,
    /// Reduced coordinates in ∧²H/⟨ω⟩.
    pub w: Vec<BigInt>,
}

impl NilElement {
    pub fn identity(genus: usize) -> Self {
        assert!(genus >= 1);
        NilElement { genus, h: vec![BigInt::zero(); 2 * genus], w: vec![BigInt::zero(); reduced_rank(genus)] }
    }

    /// The lift (h, 0).
    pub fn lift(genus: usize, h: &[BigInt]) -> Self {
        assert_eq!(h.len(), 2 * genus);
        NilElement { genus, h: h.to_vec(), w: vec![BigInt::zero(); reduced_rank(genus)] }
    }

    pub fn central(genus: usize, w: Vec<BigInt>) -> Self {
        assert_eq!(w.len(), reduced_rank(genus));
        NilElement { genus, h: vec![BigInt::zero(); 2 * genus], w }
    }

    /// Generator a_i (index 2i−1) or b_i (index 2i); negative indices invert.
    pub fn generator(genus: usize, index: i32) -> Result<Self, NilError> {
        let k = index.unsigned_abs() as usize;
        if k == 0 || k > 2 * genus {
            return Err(NilError::BadGenerator { index, genus });
        }
        let mut x = Self::identity(genus);
        x.h[k - 1] = BigInt::from(index.signum());
        Ok(x)
    }

    pub fn is_identity(&self) -> bool {
        self.h.iter().all(Zero::is_zero) && self.w.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<(), NilError> {
        if self.genus == other.genus {
            Ok(())
        } else {
            Err(NilError::GenusMismatch(self.genus, other.genus))
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, NilError> {
        self.check(other)?;
        Ok(self.mul(other))
    }

    /// Product; panics on genus mismatch (see [`try_mul`](Self::try_mul)).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.genus, other.genus, "genus mismatch");
        let mut h = self.h.clone();
        add_into(&mut h, &other.h);
        let mut w = self.w.clone();
        add_into(&mut w, &other.w);
        add_into(&mut w, &reduce_wedge(self.genus, &collection_cocycle(&self.h, &other.h)));
        NilElement { genus: self.genus, h, w }
    }

    pub fn inverse(&self) -> Self {
        let h = self.h.iter().map(|x| -x).collect();
        let beta = reduce_wedge(self.genus, &collection_cocycle(&self.h, &self.h));
        let w = self.w.iter().zip(&beta).map(|(a, b)| b - a).collect();
        NilElement { genus: self.genus, h, w }
    }

    /// gⁿ = (n·h, n·w + n(n−1)/2·β(h, h)).
    pub fn pow(&self, n: &BigInt) -> Self {
        let tri: BigInt = (n * (n - BigInt::one())).div_floor(&BigInt::from(2));
        let beta = reduce_wedge(self.genus, &collection_cocycle(&self.h, &self.h));
        NilElement {
            genus: self.genus,
            h: self.h.iter().map(|x| x * n).collect(),
            w: self.w.iter().zip(&beta).map(|(a, b)| a * n + b * &tri).collect(),
        }
    }

    /// x·y·x⁻¹·y⁻¹ = (0, h_x∧h_y).
    pub fn commutator(&self, other: &Self) -> Self {
        assert_eq!(self.genus, other.genus, "genus mismatch");
        Self::central(self.genus, wedge(self.genus, &self.h, &other.h))
    }

    pub fn try_commutator(&self, other: &Self) -> Result<Self, NilError> {
        self.check(other)?;
        Ok(self.commutator(other))
    }

    /// r·x·r⁻¹.
    pub fn conjugate_by(&self, r: &Self) -> Self {
        r.mul(self).mul(&r.inverse())
    }
}

impl fmt::Debug for NilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h: Vec<String> = self.h.iter().map(ToString::to_string).collect();
        let w: Vec<String> = self.w.iter().map(ToString::to_string).collect();
        write!(f, "({} | {})", h.join(" "), w.join(" "))
    }
}

/// Projection L²π/L³π → ∧²H/⟨ω⟩.
pub fn hur2(x: &NilElement) -> Result<Vec<BigInt>, NilError> {
    if x.h.iter().any(|c| !c.is_zero()) {
        return Err(NilError::NotInL2(x.h.clone()));
    }
    Ok(x.w.clone())
}

pub fn eval_word(word: &[i32], genus: usize) -> Result<NilElement, NilError> {
    let mut acc = NilElement::identity(genus);
    for &k in word {
        acc = acc.mul(&NilElement::generator(genus, k)?);
    }
    Ok(acc)
}

/// Parses `a1 b1 A1 B1` (capitals invert; whitespace optional) into signed generator indices.
pub fn parse_word(text: &str) -> Result<Vec<i32>, NilError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '*' || c == '.' {
            i += 1;
            continue;
        }
        let (offset, sign) = match c {
            'a' => (1, 1),
            'b' => (0, 1),
            'A' => (1, -1),
            'B' => (0, -1),
            _ => return Err(NilError::Parse(format!("unexpected {c:?} at position {i}"))),
        };
        let start = i + 1;
        let mut end = start;
        while end < chars.len() && chars[end].is_ascii_digit() {
            end += 1;
        }
        let digits: String = chars[start..end].iter().collect();
        let n: i32 = digits.parse().map_err(|_| NilError::Parse(format!("missing index after {c:?} at position {i}")))?;
        if n == 0 {
            return Err(NilError::Parse(format!("generator indices start at 1 (position {i})")));
        }
        out.push(sign * (2 * n - offset));
        i = end;
    }
    Ok(out)
}

/// Renders signed generator indices back into the word grammar.
pub fn format_word(word: &[i32]) -> String {
    word.iter()
        .map(|&k| {
            let m = k.unsigned_abs();
            let letter = match (m % 2 == 1, k > 0) {
                (true, true) => 'a',
                (false, true) => 'b',
                (true, false) => 'A',
                (false, false) => 'B',
            };
            format!("{letter}{}", m.div_ceil(2))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// The relator Π_{i ≤ k}[aᵢ, bᵢ] as a word.
pub fn partial_relator(k: usize) -> Vec<i32> {
    (1..=k as i32).flat_map(|i| [2 * i - 1, 2 * i, -(2 * i - 1), -(2 * i)]).collect()
}

/// Free reduction of a word.
pub fn free_reduce(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &k in word {
        if out.last() == Some(&-k) {
            out.pop();
        } else {
            out.push(k);
        }
    }
    out
}

/// An endomorphism of π/L³π given by the images of a₁, b₁, …, a_g, b_g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilEndo {
    pub genus: usize,
    pub images: Vec<NilElement>,
}

impl NilEndo {
    pub fn new(genus: usize, images: Vec<NilElement>) -> Result<Self, NilError> {
        if images.len() != 2 * genus {
            return Err(NilError::ImageCount { expected: 2 * genus, found: images.len() });
        }
        for x in &images {
            if x.genus != genus {
                return Err(NilError::GenusMismatch(genus, x.genus));
            }
        }
        let mut residue = vec![BigInt::zero(); reduced_rank(genus)];
        for i in 0..genus {
            add_into(&mut residue, &wedge(genus, &images[2 * i].h, &images[2 * i + 1].h));
        }
        if residue.iter().any(|c| !c.is_zero()) {
            return Err(NilError::RelatorFails(residue));
        }
        Ok(NilEndo { genus, images })
    }

    pub fn from_words(genus: usize, words: &[Vec<i32>]) -> Result<Self, NilError> {
        let images = words.iter().map(|w| eval_word(w, genus)).collect::<Result<Vec<_>, _>>()?;
        Self::new(genus, images)
    }

    pub fn identity(genus: usize) -> Self {
        let images = (1..=2 * genus as i32).map(|k| NilElement::generator(genus, k).unwrap()).collect();
        NilEndo { genus, images }
    }

    /// Inner automorphism x ↦ r·x·r⁻¹.
    pub fn conjugation(r: &NilElement) -> Self {
        let id = Self::identity(r.genus);
        NilEndo { genus: r.genus, images: id.images.iter().map(|g| g.conjugate_by(r)).collect() }
    }

    /// φ(x) = φ(P)·φ(P⁻¹x) with P = Π genᵢ^{hᵢ}; P⁻¹x is central and maps through ∧²φ.
    pub fn apply(&self, x: &NilElement) -> NilElement {
        assert_eq!(x.genus, self.genus, "genus mismatch");
        let g = self.genus;
        let mut p = NilElement::identity(g);
        let mut image = NilElement::identity(g);
        for (i, c) in x.h.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut gen = NilElement::identity(g);
            gen.h[i] = BigInt::one();
            p = p.mul(&gen.pow(c));
            image = image.mul(&self.images[i].pow(c));
        }
        let z = p.inverse().mul(x);
        debug_assert!(z.h.iter().all(Zero::is_zero));
        let central = self.wedge_matrix().mul_vec(&z.w);
        image.mul(&NilElement::central(g, central))
    }

    /// Action on H: column i is the homology of the i-th image.
    pub fn h_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(2 * self.genus, &self.images.iter().map(|x| x.h.clone()).collect::<Vec<_>>()).expect("images have rank 2g")
    }

    /// Induced action on ∧²H/⟨ω⟩ in reduced coordinates.
    pub fn wedge_matrix(&self) -> IntMatrix {
        let g = self.genus;
        let n = 2 * g;
        let mut cols: Vec<Vec<BigInt>> = pairs(n).into_iter().map(|(i, j)| wedge(g, &self.images[i].h, &self.images[j].h)).collect();
        cols.pop();
        IntMatrix::from_columns(reduced_rank(g), &cols).expect("reduced rank")
    }

    /// self ∘ other.
    pub fn compose(&self, other: &NilEndo) -> NilEndo {
        NilEndo { genus: self.genus, images: other.images.iter().map(|x| self.apply(x)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.genus)
    }

    /// Whether the H-action equals `matrix`.
    pub fn projects_to(&self, matrix: &IntMatrix) -> bool {
        self.h_matrix() == *matrix
    }
}

/// Sum of coordinate magnitudes, a crude size measure for random tests.
pub fn weight(x: &NilElement) -> BigInt {
    x.h.iter().chain(&x.w).map(|c| c.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn pair_indexing() {
        let n = 6;
        for (k, (i, j)) in pairs(n).into_iter().enumerate() {
            assert_eq!(pair_index(n, i, j), k);
        }
        assert_eq!(reduced_rank(2), 5);
        assert_eq!(reduced_labels(2), vec!["x1^y1", "x1^x2", "x1^y2", "y1^x2", "y1^y2"]);
    }

    #[test]
    fn omega_reduces_to_zero() {
        for g in 1..=4 {
            let mut full = vec![BigInt::zero(); (2 * g) * (2 * g - 1) / 2];
            for i in 0..g {
                full[pair_index(2 * g, 2 * i, 2 * i + 1)] = BigInt::one();
            }
            assert!(reduce_wedge(g, &full).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn commutator_of_generators() {
        let g = 2;
        let a1 = NilElement::generator(g, 1).unwrap();
        let b1 = NilElement::generator(g, 2).unwrap();
        let a2 = NilElement::generator(g, 3).unwrap();
        let prod = a1.mul(&b1).mul(&a1.inverse()).mul(&b1.inverse());
        assert_eq!(prod, NilElement::central(g, basis_wedge(g, 0, 1)));
        assert_eq!(prod.w, big(&[1, 0, 0, 0, 0]));
        assert_eq!(a1.commutator(&b1), prod);
        assert_eq!(a1.commutator(&a2).w, big(&[0, 1, 0, 0, 0]));
        assert!(a1.commutator(&a1).is_identity());
    }

    #[test]
    fn relator_words() {
        for g in 1..=4 {
            assert!(eval_word(&partial_relator(g), g).unwrap().is_identity());
        }
        let half = eval_word(&partial_relator(2), 4).unwrap();
        let expected: Vec<BigInt> = {
            let mut v = basis_wedge(4, 0, 1);
            add_into(&mut v, &basis_wedge(4, 2, 3));
            v
        };
        assert_eq!(hur2(&half).unwrap(), expected);
        assert!(eval_word(&[], 3).unwrap().is_identity());
        let w = parse_word("a1 b1 A1 B1 B2 A2 b2 a2").unwrap();
        let mut expected = basis_wedge(2, 0, 1);
        for (x, y) in expected.iter_mut().zip(basis_wedge(2, 2, 3)) {
            *x -= y;
        }
        assert_eq!(hur2(&eval_word(&w, 2).unwrap()).unwrap(), expected);
        assert!(hur2(&NilElement::generator(2, 1).unwrap()).is_err());
        assert!(eval_word(&[5], 2).is_err());
    }

    #[test]
    fn word_grammar() {
        assert_eq!(parse_word("a1 b1 A1 B1").unwrap(), vec![1, 2, -1, -2]);
        assert_eq!(parse_word("a2B10").unwrap(), vec![3, -20]);
        assert_eq!(format_word(&[1, 2, -1, -2, 3, -20]), "a1 b1 A1 B1 a2 B10");
        assert!(parse_word("c1").is_err());
        assert!(parse_word("a").is_err());
        assert!(parse_word("a0").is_err());
        assert_eq!(free_reduce(&[1, 2, -2, -1, 3]), vec![3]);
    }

    #[test]
    fn powers_match_repeated_products() {
        let x = NilElement { genus: 2, h: big(&[1, -2, 0, 3]), w: big(&[1, 0, 2, 0, -1]) };
        let mut acc = NilElement::identity(2);
        for n in 0..5 {
            assert_eq!(x.pow(&BigInt::from(n)), acc);
            acc = acc.mul(&x);
        }
        assert_eq!(x.pow(&BigInt::from(-3)), x.pow(&BigInt::from(3)).inverse());
    }

    #[test]
    fn endomorphisms() {
        let g = 2;
        let id = NilEndo::identity(g);
        let x = eval_word(&parse_word("a1 b2 a1 B1 a2").unwrap(), g).unwrap();
        assert_eq!(id.apply(&x), x);
        // Swap of the two handles: a1 ↔ a2, b1 ↔ b2.
        let swap = NilEndo::from_words(g, &[vec![3], vec![4], vec![1], vec![2]]).unwrap();
        assert!(swap.compose(&swap).is_identity());
        assert_eq!(swap.apply(&swap.apply(&x)), x);
        let r = eval_word(&partial_relator(1), g).unwrap();
        assert!(NilEndo::conjugation(&r).is_identity());
        assert!(matches!(NilEndo::from_words(g, &[vec![1], vec![1], vec![3], vec![4]]), Err(NilError::RelatorFails(_))));
        let y = eval_word(&parse_word("b1 A2 b2").unwrap(), g).unwrap();
        assert_eq!(swap.apply(&x.mul(&y)), swap.apply(&x).mul(&swap.apply(&y)));
    }
}
