//! Cohomology of a surface group G = ⟨a₁, b₁, …, a_h, b_h | Π[aᵢ, bᵢ]⟩ with coefficients in
//! an integer module, through the Gruenberg resolution 0 → P₂ → P₁ → P₀ → ℤ.
//!
//! For the torus (h = 1) the generators are a = T and b = S, the resolution generators of P₁
//! are e (dual to T) and f (dual to S), and d₂(u) = (1 − S)e − (1 − T)f.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{column_lattice_basis, integer_kernel, AbelianPresentation, IntMatrix, LinalgError, Order};
use crate::nilq::{hur2, wedge, NilElement, NilEndo, NilError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohError {
    #[error("expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("module action: {0}")]
    BadAction(String),
    #[error("not a cocycle: (1−S)φ(e) − (1−T)φ(f) = {0:?}")]
    NotCocycle(Vec<BigInt>),
    #[error("lift does not project to the module action: {0}")]
    LiftMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Nil(#[from] NilError),
}

/// Action of the surface group on ℤ^n: matrices for a₁, b₁, …, a_h, b_h.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleAction {
    pub rank: usize,
    pub generators: Vec<IntMatrix>,
    inverses: Vec<IntMatrix>,
}

impl ModuleAction {
    pub fn new(generators: Vec<IntMatrix>) -> Result<Self, CohError> {
        if generators.is_empty() || !generators.len().is_multiple_of(2) {
            return Err(CohError::BadAction(format!("need 2h ≥ 2 generators, got {}", generators.len())));
        }
        let rank = generators[0].rows();
        let mut inverses = Vec::with_capacity(generators.len());
        for (k, g) in generators.iter().enumerate() {
            if g.rows() != rank || g.cols() != rank {
                return Err(CohError::BadAction(format!("generator {k} is not {rank}×{rank}")));
            }
            inverses.push(g.unimodular_inverse().map_err(|_| CohError::BadAction(format!("generator {k} is not invertible over ℤ")))?);
        }
        let mut product = IntMatrix::identity(rank);
        for i in 0..generators.len() / 2 {
            let (a, b) = (2 * i, 2 * i + 1);
            product = product.mul(&generators[a]).mul(&generators[b]).mul(&inverses[a]).mul(&inverses[b]);
        }
        if !product.is_identity() {
            return Err(CohError::BadAction("surface relator does not act trivially".into()));
        }
        Ok(ModuleAction { rank, generators, inverses })
    }

    /// Torus action with a = T, b = S.
    pub fn torus(t: IntMatrix, s: IntMatrix) -> Result<Self, CohError> {
        Self::new(vec![t, s])
    }

    pub fn base_genus(&self) -> usize {
        self.generators.len() / 2
    }

    pub fn t(&self) -> &IntMatrix {
        &self.generators[0]
    }

    pub fn s(&self) -> &IntMatrix {
        &self.generators[1]
    }

    /// ρ of a signed generator index (a_i = 2i−1, b_i = 2i; negative for inverses).
    pub fn of_letter(&self, k: i32) -> &IntMatrix {
        let i = k.unsigned_abs() as usize - 1;
        if k > 0 {
            &self.generators[i]
        } else {
            &self.inverses[i]
        }
    }

    pub fn of_word(&self, word: &[i32]) -> IntMatrix {
        word.iter().fold(IntMatrix::identity(self.rank), |acc, &k| acc.mul(self.of_letter(k)))
    }
}

/// An element of ℤ[F] for the free group on a₁, b₁, …: freely reduced words with coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupRingElement {
    pub terms: BTreeMap<Vec<i32>, BigInt>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(word: &[i32]) -> Self {
        let mut e = Self::zero();
        e.add_term(crate::nilq::free_reduce(word), BigInt::one());
        e
    }

    pub fn one() -> Self {
        Self::word(&[])
    }

    fn add_term(&mut self, word: Vec<i32>, c: BigInt) {
        let entry = self.terms.entry(word).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GroupRingElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, c) in &self.terms {
            for (v, d) in &other.terms {
                let mut w = u.clone();
                w.extend(v);
                out.add_term(crate::nilq::free_reduce(&w), c * d);
            }
        }
        out
    }

    pub fn evaluate(&self, action: &ModuleAction) -> IntMatrix {
        let mut out = IntMatrix::zeros(action.rank, action.rank);
        for (w, c) in &self.terms {
            out = out.add(&action.of_word(w).scale(c));
        }
        out
    }

    /// Image under the augmentation ℤ[F] → ℤ.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }
}

/// The surface relator Π[aᵢ, bᵢ] as a word.
pub fn surface_relator(h: usize) -> Vec<i32> {
    crate::nilq::partial_relator(h)
}

/// Fox derivative ∂w/∂x_k computed letter by letter.
pub fn fox_derivative(word: &[i32], k: i32) -> GroupRingElement {
    let mut out = GroupRingElement::zero();
    for (p, &x) in word.iter().enumerate() {
        if x == k {
            out = out.add(&GroupRingElement::word(&word[..p]));
        } else if x == -k {
            out = out.sub(&GroupRingElement::word(&word[..=p]));
        }
    }
    out
}

/// ∂R/∂a₁, ∂R/∂b₁, …, ∂R/∂a_h, ∂R/∂b_h.
pub fn fox_derivatives(h: usize) -> Vec<GroupRingElement> {
    let r = surface_relator(h);
    (1..=2 * h as i32).map(|k| fox_derivative(&r, k)).collect()
}

/// Closed forms: with P = Π_{j<i}[a_j, b_j], ∂R/∂aᵢ = P·aᵢ(1 − bᵢ)aᵢ⁻¹ and
/// ∂R/∂bᵢ = P·aᵢbᵢ(1 − aᵢ⁻¹)bᵢ⁻¹.
pub fn fox_closed_forms(h: usize) -> Vec<GroupRingElement> {
    let mut out = Vec::with_capacity(2 * h);
    for i in 1..=h as i32 {
        let (a, b) = (2 * i - 1, 2 * i);
        let prefix = GroupRingElement::word(&surface_relator(i as usize - 1));
        let one = GroupRingElement::one();
        let da = GroupRingElement::word(&[a]).mul(&one.sub(&GroupRingElement::word(&[b]))).mul(&GroupRingElement::word(&[-a]));
        let db = GroupRingElement::word(&[a, b]).mul(&one.sub(&GroupRingElement::word(&[-a]))).mul(&GroupRingElement::word(&[-b]));
        out.push(prefix.mul(&da));
        out.push(prefix.mul(&db));
    }
    out
}

/// Columns spanning im d₂* = Σ_k (∂R/∂x_k)·M.
pub fn fox_relation_lattice(action: &ModuleAction) -> IntMatrix {
    let blocks: Vec<IntMatrix> = fox_derivatives(action.base_genus()).iter().map(|d| d.evaluate(action)).collect();
    IntMatrix::hstack(action.rank, &blocks.iter().collect::<Vec<_>>())
}

/// Columns spanning IM = Σ_g (g − 1)·M over the generators.
pub fn augmentation_lattice(action: &ModuleAction) -> IntMatrix {
    let blocks: Vec<IntMatrix> = action.generators.iter().map(IntMatrix::minus_identity).collect();
    IntMatrix::hstack(action.rank, &blocks.iter().collect::<Vec<_>>())
}

/// H²(G, M) ≅ M/IM.
pub fn h2_as_coinvariants(action: &ModuleAction) -> AbelianPresentation {
    AbelianPresentation::from_relations(augmentation_lattice(action))
}

/// A 1-cochain on P₁ for the torus: values on e and f.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    pub phi_e: Vec<BigInt>,
    pub phi_f: Vec<BigInt>,
}

impl Cocycle {
    pub fn zero(rank: usize) -> Self {
        Cocycle { phi_e: vec![BigInt::zero(); rank], phi_f: vec![BigInt::zero(); rank] }
    }

    /// Splits a stacked vector (φ(e), φ(f)).
    pub fn from_stacked(v: &[BigInt]) -> Self {
        let n = v.len() / 2;
        Cocycle { phi_e: v[..n].to_vec(), phi_f: v[n..].to_vec() }
    }

    pub fn stacked(&self) -> Vec<BigInt> {
        self.phi_e.iter().chain(&self.phi_f).cloned().collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let sum = |a: &[BigInt], b: &[BigInt]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Cocycle { phi_e: sum(&self.phi_e, &other.phi_e), phi_f: sum(&self.phi_f, &other.phi_f) }
    }

    /// (1 − S)φ(e) − (1 − T)φ(f).
    pub fn residue(&self, action: &ModuleAction) -> Vec<BigInt> {
        cocycle_map(action).mul_vec(&self.stacked())
    }

    pub fn check(&self, action: &ModuleAction) -> Result<(), CohError> {
        if self.phi_e.len() != action.rank || self.phi_f.len() != action.rank {
            return Err(CohError::Dimension { expected: action.rank, found: self.phi_e.len().max(self.phi_f.len()) });
        }
        let r = self.residue(action);
        if r.iter().all(Zero::is_zero) {
            Ok(())
        } else {
            Err(CohError::NotCocycle(r))
        }
    }
}

/// d₂* as the matrix [I − S | −(I − T)].
pub fn cocycle_map(action: &ModuleAction) -> IntMatrix {
    let n = action.rank;
    let id = IntMatrix::identity(n);
    let left = id.sub(action.s());
    let right = action.t().sub(&id);
    IntMatrix::hstack(n, &[&left, &right])
}

#[derive(Clone, Debug)]
pub struct CocycleSpace {
    /// Columns: an integer basis of ker d₂* ⊂ M ⊕ M.
    pub kernel: IntMatrix,
    /// Columns ((T − 1)mᵢ, (S − 1)mᵢ) for the standard basis mᵢ.
    pub coboundaries: IntMatrix,
}

impl CocycleSpace {
    pub fn basis(&self) -> Vec<Cocycle> {
        self.kernel.columns().iter().map(|c| Cocycle::from_stacked(c)).collect()
    }

    /// H¹ as ker d₂* / im d₁*, in kernel-basis coordinates.
    pub fn h1(&self) -> Result<AbelianPresentation, CohError> {
        let k = self.kernel.cols();
        let mut rel = IntMatrix::zeros(k, self.coboundaries.cols());
        for (j, col) in self.coboundaries.columns().iter().enumerate() {
            let x = crate::exactla::solve_integer(&self.kernel, col)?;
            for (i, v) in x.into_iter().enumerate() {
                rel.set(i, j, v);
            }
        }
        Ok(AbelianPresentation::from_relations(rel))
    }
}

pub fn one_cocycles(action: &ModuleAction) -> Result<CocycleSpace, CohError> {
    if action.base_genus() != 1 {
        return Err(CohError::BadAction("one_cocycles needs a torus action".into()));
    }
    let kernel = integer_kernel(&cocycle_map(action));
    let coboundaries = IntMatrix::vstack(action.rank, &[&action.t().minus_identity(), &action.s().minus_identity()]);
    Ok(CocycleSpace { kernel, coboundaries })
}

/// m(φ⊗ψ)(u) = φ(e)∧Tψ(f) − φ(f)∧Sψ(e), reduced modulo ω.
pub fn m_pairing(phi: &Cocycle, psi: &Cocycle, action: &ModuleAction, genus: usize) -> Result<Vec<BigInt>, CohError> {
    phi.check(action)?;
    psi.check(action)?;
    if action.rank != 2 * genus {
        return Err(CohError::Dimension { expected: 2 * genus, found: action.rank });
    }
    let first = wedge(genus, &phi.phi_e, &action.t().mul_vec(&psi.phi_f));
    let second = wedge(genus, &phi.phi_f, &action.s().mul_vec(&psi.phi_e));
    Ok(first.iter().zip(&second).map(|(x, y)| x - y).collect())
}

fn check_lifts(action: &ModuleAction, s_lift: &NilEndo, t_lift: &NilEndo) -> Result<(), CohError> {
    if !s_lift.projects_to(action.s()) {
        return Err(CohError::LiftMismatch("S̃ does not induce S on H".into()));
    }
    if !t_lift.projects_to(action.t()) {
        return Err(CohError::LiftMismatch("T̃ does not induce T on H".into()));
    }
    Ok(())
}

/// δ(φ) with the default lifts (φ(e), 0) and (φ(f), 0).
pub fn delta(phi: &Cocycle, action: &ModuleAction, s_lift: &NilEndo, t_lift: &NilEndo) -> Result<Vec<BigInt>, CohError> {
    let g = s_lift.genus;
    delta_with_lifts(&NilElement::lift(g, &phi.phi_e), &NilElement::lift(g, &phi.phi_f), action, s_lift, t_lift)
}

/// δ(φ) = hur₂( S̃(ẽ)⁻¹·ẽ · f̃⁻¹·T̃(f̃) · [f̃⁻¹, ẽ] ) for lifts ẽ of φ(e) and f̃ of φ(f).
pub fn delta_with_lifts(
    e: &NilElement,
    f: &NilElement,
    action: &ModuleAction,
    s_lift: &NilEndo,
    t_lift: &NilEndo,
) -> Result<Vec<BigInt>, CohError> {
    check_lifts(action, s_lift, t_lift)?;
    let phi = Cocycle { phi_e: e.h.clone(), phi_f: f.h.clone() };
    phi.check(action)?;
    let x = s_lift.apply(e).inverse().mul(e).mul(&f.inverse()).mul(&t_lift.apply(f)).mul(&f.inverse().commutator(e));
    Ok(hur2(&x)?)
}

#[derive(Clone, Debug)]
pub struct MQuotient {
    pub presentation: AbelianPresentation,
    pub order: Order,
}

/// (W_G / im m) / im δ, and the order of `class` there.
pub fn m_quotient(
    w_action: &ModuleAction,
    m_generators: &[Vec<BigInt>],
    delta_generators: &[Vec<BigInt>],
    class: &[BigInt],
) -> Result<MQuotient, CohError> {
    let n = w_action.rank;
    for v in m_generators.iter().chain(delta_generators).chain(std::iter::once(&class.to_vec())) {
        if v.len() != n {
            return Err(CohError::Dimension { expected: n, found: v.len() });
        }
    }
    let extra: Vec<Vec<BigInt>> = m_generators.iter().chain(delta_generators).cloned().collect();
    let extra = IntMatrix::from_columns(n, &extra)?;
    let all = IntMatrix::hstack(n, &[&augmentation_lattice(w_action), &extra]);
    let basis = column_lattice_basis(&all).transpose();
    let presentation = AbelianPresentation::from_relations(basis);
    let order = presentation.order_of(class)?;
    Ok(MQuotient { presentation, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::column_lattices_equal;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn fox_torus() {
        let d = fox_derivatives(1);
        let expected_a = GroupRingElement::one().sub(&GroupRingElement::word(&[1, 2, -1]));
        let expected_b = GroupRingElement::word(&[1]).sub(&GroupRingElement::word(&[1, 2, -1, -2]));
        assert_eq!(d[0], expected_a);
        assert_eq!(d[1], expected_b);
        assert!(d.iter().all(|x| x.augmentation().is_zero()));
        for h in 1..=3 {
            assert_eq!(fox_derivatives(h), fox_closed_forms(h));
        }
        let d2 = fox_derivatives(2);
        assert_eq!(d2[2].terms.len(), 2);
        assert!(d2[2].terms.keys().all(|w| w.starts_with(&[1, 2, -1, -2])));
    }

    #[test]
    fn coinvariant_examples() {
        let trivial = ModuleAction::torus(IntMatrix::identity(1), IntMatrix::identity(1)).unwrap();
        assert_eq!(h2_as_coinvariants(&trivial).to_string(), "Z");
        let swap = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        let a = ModuleAction::torus(IntMatrix::identity(2), swap.clone()).unwrap();
        assert_eq!(h2_as_coinvariants(&a).to_string(), "Z");
        assert!(column_lattices_equal(&fox_relation_lattice(&a), &augmentation_lattice(&a)));
        assert!(ModuleAction::torus(IntMatrix::from_rows(&[[2]]), IntMatrix::identity(1)).is_err());
    }

    #[test]
    fn cocycle_examples() {
        let trivial = ModuleAction::torus(IntMatrix::identity(2), IntMatrix::identity(2)).unwrap();
        let space = one_cocycles(&trivial).unwrap();
        assert_eq!(space.kernel.cols(), 4);
        assert!(space.coboundaries.is_zero());
        let swap = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        let a = ModuleAction::torus(IntMatrix::identity(2), swap).unwrap();
        let space = one_cocycles(&a).unwrap();
        assert_eq!(space.kernel.cols(), 3);
        for c in space.basis() {
            assert_eq!(c.phi_e[0], c.phi_e[1]);
        }
        assert_eq!(space.h1().unwrap().to_string(), "Z + Z");
    }

    #[test]
    fn m_pairing_examples() {
        let g = 2;
        let id = IntMatrix::identity(4);
        let s = IntMatrix::from_rows(&[[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]);
        let a = ModuleAction::torus(id, s.clone()).unwrap();
        let u = big(&[1, 0, 1, 0]);
        let w = big(&[0, 1, 0, 0]);
        let zero = big(&[0, 0, 0, 0]);
        let phi = Cocycle { phi_e: u.clone(), phi_f: zero.clone() };
        let psi = Cocycle { phi_e: zero.clone(), phi_f: w.clone() };
        assert_eq!(m_pairing(&phi, &psi, &a, g).unwrap(), wedge(g, &u, &w));
        let phi2 = Cocycle { phi_e: big(&[0, 1, 0, 1]), phi_f: zero.clone() };
        assert!(m_pairing(&phi, &phi2, &a, g).unwrap().iter().all(Zero::is_zero));
        let expected: Vec<BigInt> = wedge(g, &w, &s.mul_vec(&u)).iter().map(|x| -x).collect();
        assert_eq!(m_pairing(&psi, &phi, &a, g).unwrap(), expected);
        let bad = Cocycle { phi_e: big(&[1, 0, 0, 0]), phi_f: zero };
        assert!(matches!(m_pairing(&bad, &psi, &a, g), Err(CohError::NotCocycle(_))));
    }

    #[test]
    fn trivial_quotient() {
        let a = ModuleAction::torus(IntMatrix::identity(2), IntMatrix::identity(2)).unwrap();
        let q = m_quotient(&a, &[], &[], &big(&[0, 0])).unwrap();
        assert!(q.order.is_one());
        assert_eq!(q.presentation.to_string(), "Z + Z");
    }
}
