//! o₁ and õ₂ pipelines for surface bundles over the torus built from a stable graph and an
//! automorphism.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactla::{cokernel_order_of, AbelianPresentation, IntMatrix, Order};
use crate::nilq::{self, hur2, wedge, NilElement, NilEndo, NilError};
use crate::stablegraph::{require_automorphism, tree_involution_check, GraphAutomorphism, GraphError, StableGraph};
use crate::surfcoh::{delta, m_pairing, m_quotient, one_cocycles, CohError, ModuleAction};
use crate::surfhom::{self, HomologyError, HomologyModel};

pub const CONVENTION: &str = "rigid-lift";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoritaError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),
    #[error("cross-check divergence: shortcut {shortcut} vs generic {generic}")]
    CrossCheck { shortcut: String, generic: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Cohomology(#[from] CohError),
    #[error(transparent)]
    Nil(#[from] NilError),
}

impl From<HomologyError> for MoritaError {
    fn from(e: HomologyError) -> Self {
        match e {
            HomologyError::Graph(g) => MoritaError::Graph(g),
            other => MoritaError::Hypothesis(other.to_string()),
        }
    }
}

/// JSON number when it fits in an i64, decimal string otherwise.
pub fn big_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

pub fn order_json(o: &Order) -> Value {
    match o {
        Order::Finite(n) => big_json(n),
        Order::Infinite => json!("infinite"),
    }
}

fn vec_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(big_json).collect())
}

#[derive(Clone, Debug)]
pub struct O1Report {
    pub class: Vec<BigInt>,
    pub labels: Vec<String>,
    pub basepoint: String,
    /// Invariant factors of the coinvariants H_{⟨S,T⟩}.
    pub invariant_factors: Vec<BigInt>,
    pub order: Order,
}

impl O1Report {
    pub fn to_json(&self) -> Value {
        json!({
            "order": order_json(&self.order),
            "invariant_factors": vec_json(&self.invariant_factors),
            "class": vec_json(&self.class),
            "basis": self.labels,
            "basepoint": self.basepoint,
            "convention": CONVENTION,
        })
    }
}

pub fn o1_report(graph: &StableGraph, sigma: &GraphAutomorphism, basepoint: Option<&str>) -> Result<O1Report, MoritaError> {
    let model = HomologyModel::new(graph)?;
    require_automorphism(graph, sigma)?;
    let v0 = match basepoint {
        Some(id) => model.vertex(id)?,
        None => surfhom::default_basepoint(graph, sigma),
    };
    let s = surfhom::automorphism_matrix(&model, sigma)?;
    let t = surfhom::twist_matrix(&model);
    let class = surfhom::o1_class_from(&model, sigma, v0)?;
    let relations = surfhom::coinvariant_relations(&s, &t);
    let presentation = AbelianPresentation::from_relations(relations);
    let order = presentation.order_of(&class).expect("class has model rank");
    Ok(O1Report {
        class,
        labels: model.labels(),
        basepoint: graph.vertices[v0].id.clone(),
        invariant_factors: presentation.invariant_factors,
        order,
    })
}

/// A doubled tree with its involution, in the handle ordering x₁, y₁, …, x_N, y_N (N = 2g)
/// where positions 0..g are the side-1 handles and position N − 1 − p is the image of p.
#[derive(Clone, Debug)]
pub struct DoubledTreeModel {
    pub graph: StableGraph,
    pub sigma: GraphAutomorphism,
    /// Surface genus N = 2g.
    pub genus: usize,
    pub stabilized_edge: usize,
    pub ell0: BigInt,
    /// Vertex index of each handle position.
    pub handle_vertex: Vec<usize>,
    pub side_one: Vec<bool>,
    pub s_lift: NilEndo,
    pub t_lift: NilEndo,
    /// r̃₂, the lift of T(λ)λ⁻¹ along the tree path from the basepoint to its image.
    pub r2: NilElement,
}

impl DoubledTreeModel {
    pub fn new(graph: &StableGraph, sigma: &GraphAutomorphism) -> Result<Self, MoritaError> {
        let model = HomologyModel::new(graph)?;
        if !tree_involution_check(graph, sigma) {
            return Err(MoritaError::Hypothesis(
                "need a tree with an involution that fixes no vertex and stabilizes exactly one edge".into(),
            ));
        }
        let o1 = surfhom::o1_order(&model, sigma)?;
        if !o1.is_one() {
            return Err(MoritaError::Invariant(format!("primary class has order {o1} on a doubled tree")));
        }
        let report = require_automorphism(graph, sigma)?;
        let e0 = graph.edge_index(&report.stabilized_edges[0]).unwrap();
        let v0 = (0..graph.vertices.len()).min_by_key(|&i| &graph.vertices[i].id).unwrap();
        let mut side_one = model.tree_side(e0);
        if !side_one[v0] {
            side_one.iter_mut().for_each(|b| *b = !*b);
        }
        let genus = model.genus as usize;
        let g = genus / 2;
        let image = |v: usize| graph.vertex_index(&sigma.vertex_map[&graph.vertices[v].id]).unwrap();
        let mut handle_vertex = vec![usize::MAX; genus];
        let mut p = 0;
        for (v, vert) in graph.vertices.iter().enumerate() {
            if side_one[v] {
                for _ in 0..vert.genus {
                    handle_vertex[p] = v;
                    handle_vertex[genus - 1 - p] = image(v);
                    p += 1;
                }
            }
        }
        if p != g {
            return Err(MoritaError::Invariant("sides carry unequal genus".into()));
        }

        let swap: Vec<Vec<i32>> = (0..2 * genus).map(|k| vec![(2 * (genus - 1 - k / 2) + k % 2 + 1) as i32]).collect();
        let s_lift = NilEndo::from_words(genus, &swap)?;

        // δ_B = Π [a_p, b_p] over handles p on the vertex set B.
        let boundary = |side: &[bool]| -> NilElement {
            let word: Vec<i32> = (0..genus)
                .filter(|&p| side[handle_vertex[p]])
                .flat_map(|p| {
                    let (a, b) = (2 * p as i32 + 1, 2 * p as i32 + 2);
                    [a, b, -a, -b]
                })
                .collect();
            nilq::eval_word(&word, genus).expect("indices in range")
        };
        let near_side = |e: usize| -> Vec<bool> {
            let side = model.tree_side(e);
            if side[v0] {
                side
            } else {
                side.iter().map(|b| !b).collect()
            }
        };
        // The multitwist on π/L³π: generators beyond each edge are conjugated by the
        // ℓ(e)-th power of the boundary word of the side containing the basepoint.
        let mut t_images: Vec<NilElement> = (1..=2 * genus as i32).map(|k| NilElement::generator(genus, k).unwrap()).collect();
        for &e in &model.tree_edges {
            let near = near_side(e);
            let conj = boundary(&near).pow(&BigInt::from(graph.edges[e].multiplicity));
            for (k, img) in t_images.iter_mut().enumerate() {
                if !near[handle_vertex[k / 2]] {
                    *img = img.conjugate_by(&conj);
                }
            }
        }
        let t_lift = NilEndo::new(genus, t_images)?;

        let target = image(v0);
        let mut r2 = NilElement::identity(genus);
        for step in model.tree_path(v0, target) {
            let near = near_side(step.edge);
            let ell = BigInt::from(graph.edges[step.edge].multiplicity);
            r2 = r2.mul(&boundary(&near).pow(&ell));
        }

        let dt = DoubledTreeModel {
            graph: graph.clone(),
            sigma: sigma.clone(),
            genus,
            stabilized_edge: e0,
            ell0: BigInt::from(graph.edges[e0].multiplicity),
            handle_vertex,
            side_one,
            s_lift,
            t_lift,
            r2,
        };
        dt.check_invariants()?;
        Ok(dt)
    }

    fn check_invariants(&self) -> Result<(), MoritaError> {
        if !self.s_lift.compose(&self.s_lift).is_identity() {
            return Err(MoritaError::Invariant("S̃² is not the identity".into()));
        }
        if !self.t_lift.is_identity() {
            return Err(MoritaError::Invariant("T̃ is not the identity on π/L³π".into()));
        }
        if self.s_lift.compose(&self.t_lift) != self.t_lift.compose(&self.s_lift) {
            return Err(MoritaError::Invariant("S̃ and T̃ do not commute".into()));
        }
        Ok(())
    }

    pub fn h_rank(&self) -> usize {
        2 * self.genus
    }

    /// Action on H with a = T, b = S.
    pub fn h_action(&self) -> ModuleAction {
        ModuleAction::torus(self.t_lift.h_matrix(), self.s_lift.h_matrix()).expect("lifts are automorphisms")
    }

    /// Action on ∧²H/⟨ω⟩.
    pub fn w_action(&self) -> ModuleAction {
        ModuleAction::torus(self.t_lift.wedge_matrix(), self.s_lift.wedge_matrix()).expect("lifts are automorphisms")
    }

    /// c₂ = ℓ(e₀)·Σ_{p < g} x_p∧y_p in reduced coordinates.
    pub fn side_class(&self) -> Vec<BigInt> {
        let n = self.genus;
        let mut c = vec![BigInt::zero(); nilq::reduced_rank(n)];
        for p in 0..n / 2 {
            for (x, y) in c.iter_mut().zip(nilq::basis_wedge(n, 2 * p, 2 * p + 1)) {
                *x += y * &self.ell0;
            }
        }
        c
    }
}

/// The mod-2 functional on ∧²H/⟨ω⟩ pulled back from X₁∧Y₁ on ∧²(H_G ⊗ ℤ/2).
pub fn order_two_certificate(genus: usize) -> Vec<BigInt> {
    let n = 2 * genus;
    let mut rho = vec![BigInt::zero(); nilq::reduced_rank(genus)];
    for (i, j) in [(0, 1), (0, n - 1), (1, n - 2)] {
        rho[nilq::pair_index(n, i, j)] = BigInt::one();
    }
    rho
}

fn pair_mod2(a: &[BigInt], b: &[BigInt]) -> bool {
    let s: BigInt = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (s % 2u8).is_zero()
}

#[derive(Clone, Debug)]
pub struct O2Result {
    pub order: Order,
    pub invariant_factors: Vec<BigInt>,
    pub class: Vec<BigInt>,
}

/// Shortcut: W modulo (S − 1)W, H^G∧H and v∧Sv for handle basis vectors v.
pub fn o2_shortcut(model: &DoubledTreeModel) -> Result<(O2Result, Vec<Vec<BigInt>>), MoritaError> {
    let n = model.genus;
    let w = model.w_action();
    let s = model.s_lift.h_matrix();
    let unit = |k: usize| -> Vec<BigInt> { (0..2 * n).map(|i| BigInt::from((i == k) as u8)).collect() };
    let mut relations: Vec<Vec<BigInt>> = w.s().minus_identity().columns();
    for p in 0..n / 2 {
        for parity in 0..2 {
            let mut u = unit(2 * p + parity);
            u[2 * (n - 1 - p) + parity] += 1;
            for k in 0..2 * n {
                relations.push(wedge(n, &u, &unit(k)));
            }
        }
    }
    for k in 0..2 * n {
        let e = unit(k);
        relations.push(wedge(n, &e, &s.mul_vec(&e)));
    }
    let rank = nilq::reduced_rank(n);
    let matrix = IntMatrix::from_columns(rank, &relations).map_err(CohError::from)?;
    let basis = crate::exactla::column_lattice_basis(&matrix).transpose();
    let presentation = AbelianPresentation::from_relations(basis);
    let class = model.side_class();
    let order = presentation.order_of(&class).map_err(CohError::from)?;
    Ok((O2Result { order, invariant_factors: presentation.invariant_factors, class }, relations))
}

/// Generic engine: im m over a cocycle basis, im δ on the same basis, and hur₂(r̃₂).
pub fn o2_generic(model: &DoubledTreeModel) -> Result<(O2Result, Vec<Vec<BigInt>>), MoritaError> {
    let n = model.genus;
    let h = model.h_action();
    let w = model.w_action();
    let basis = one_cocycles(&h)?.basis();
    let mut m_gens = Vec::with_capacity(basis.len() * basis.len());
    for phi in &basis {
        for psi in &basis {
            m_gens.push(m_pairing(phi, psi, &h, n)?);
        }
    }
    let d_gens = basis.iter().map(|phi| delta(phi, &h, &model.s_lift, &model.t_lift)).collect::<Result<Vec<_>, _>>()?;
    let class = hur2(&model.r2)?;
    let q = m_quotient(&w, &m_gens, &d_gens, &class)?;
    let mut generators = w.s().minus_identity().columns();
    generators.extend(w.t().minus_identity().columns());
    generators.extend(m_gens);
    generators.extend(d_gens);
    Ok((O2Result { order: q.order, invariant_factors: q.presentation.invariant_factors, class }, generators))
}

#[derive(Clone, Debug)]
pub struct O2Report {
    pub shortcut: O2Result,
    pub generic: O2Result,
    pub labels: Vec<String>,
    /// Mod-2 functional certifying order 2, present when the order is 2.
    pub certificate: Option<Vec<BigInt>>,
}

impl O2Report {
    pub fn order(&self) -> &Order {
        &self.shortcut.order
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": order_json(&self.shortcut.order),
            "invariant_factors": vec_json(&self.shortcut.invariant_factors),
            "class": vec_json(&self.shortcut.class),
            "basis": self.labels,
            "generic_order": order_json(&self.generic.order),
            "certificate": self.certificate.as_ref().map(|c| vec_json(c)),
            "convention": CONVENTION,
        })
    }
}

/// Shortcut order only (runs the hypothesis checks but not the generic engine).
pub fn o2_tree_order(graph: &StableGraph, sigma: &GraphAutomorphism) -> Result<Order, MoritaError> {
    let model = DoubledTreeModel::new(graph, sigma)?;
    Ok(o2_shortcut(&model)?.0.order)
}

pub fn o2_generic_order(model: &DoubledTreeModel) -> Result<Order, MoritaError> {
    Ok(o2_generic(model)?.0.order)
}

/// Both pipelines, cross-checked, with the order-2 certificate verified against every relation.
pub fn o2_report(graph: &StableGraph, sigma: &GraphAutomorphism) -> Result<O2Report, MoritaError> {
    let model = DoubledTreeModel::new(graph, sigma)?;
    let (shortcut, short_rel) = o2_shortcut(&model)?;
    let (generic, generic_rel) = o2_generic(&model)?;
    if shortcut.order != generic.order || shortcut.invariant_factors != generic.invariant_factors {
        return Err(MoritaError::CrossCheck {
            shortcut: format!("order {} in {:?}", shortcut.order, shortcut.invariant_factors),
            generic: format!("order {} in {:?}", generic.order, generic.invariant_factors),
        });
    }
    let certificate = if shortcut.order == Order::Finite(BigInt::from(2)) {
        let rho = order_two_certificate(model.genus);
        let kills = short_rel.iter().chain(&generic_rel).all(|r| pair_mod2(&rho, r));
        let detects = !pair_mod2(&rho, &shortcut.class) && !pair_mod2(&rho, &generic.class);
        if !(kills && detects) {
            return Err(MoritaError::Invariant("order-2 certificate does not verify".into()));
        }
        Some(rho)
    } else {
        None
    };
    Ok(O2Report { shortcut, generic, labels: nilq::reduced_labels(model.genus), certificate })
}

/// Order of `class` in the coinvariants of a torus action (helper for callers with their own S, T).
pub fn coinvariant_order(s: &IntMatrix, t: &IntMatrix, class: &[BigInt]) -> Order {
    cokernel_order_of(&surfhom::coinvariant_relations(s, t), class).expect("class has matrix rank")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{doubled_pair, doubled_tree, genus_one_cycle, SideTree};

    #[test]
    fn o1_examples() {
        let (g, s) = genus_one_cycle(3, 1);
        let r = o1_report(&g, &s, None).unwrap();
        assert_eq!(r.order, Order::Finite(3.into()));
        assert_eq!(r.basepoint, "v1");
        let id = crate::stablegraph::identity_automorphism(&g);
        assert!(o1_report(&g, &id, None).unwrap().order.is_one());
        for d in 2..=6 {
            let (g, s) = genus_one_cycle(d, 1);
            assert_eq!(o1_report(&g, &s, None).unwrap().order, Order::Finite(BigInt::from(d)));
        }
        let j = r.to_json();
        assert_eq!(j["order"], 3);
        assert_eq!(j["convention"], "rigid-lift");
    }

    #[test]
    fn doubled_pair_orders() {
        for g in 1..=2 {
            let (graph, sigma) = doubled_pair(g, 1);
            let report = o2_report(&graph, &sigma).unwrap();
            assert_eq!(*report.order(), Order::Finite(2.into()), "g = {g}");
            assert!(report.certificate.is_some());
            let (graph, sigma) = doubled_pair(g, 2);
            assert!(o2_report(&graph, &sigma).unwrap().order().is_one());
        }
    }

    #[test]
    fn lifts_on_internal_edges_are_trivial() {
        let side = SideTree { genera: vec![1, 1, 1], parents: vec![0, 0], multiplicities: vec![2, 3] };
        let (graph, sigma) = doubled_tree(&side, 1);
        let model = DoubledTreeModel::new(&graph, &sigma).unwrap();
        assert!(model.t_lift.is_identity());
        assert_eq!(o2_report(&graph, &sigma).unwrap().order(), &Order::Finite(2.into()));
    }

    #[test]
    fn hypothesis_failures() {
        let (g, s) = genus_one_cycle(3, 1);
        assert!(matches!(o2_report(&g, &s), Err(MoritaError::Hypothesis(_))));
    }
}
