//! Homology of the inflated surface Σ_Γ with the multitwist T and an automorphism lift S.
//!
//! Basis order: handles `a_{v,1}, b_{v,1}, …` per vertex in file order, then one vanishing
//! generator `ℓ_e` per non-tree edge, then one cycle generator `λ_e` per non-tree edge.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::exactla::{cokernel_order_of, IntMatrix, Order};
use crate::stablegraph::{require_automorphism, require_stable, GraphAutomorphism, GraphError, StableGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("path is not a walk from {from:?} to {to:?}")]
    BadPath { from: String, to: String },
}

/// One traversal of an edge: `sign` is +1 tail→head and −1 head→tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub edge: usize,
    pub sign: i64,
}

#[derive(Clone, Debug)]
pub struct HomologyModel {
    pub graph: StableGraph,
    pub genus: u64,
    /// Edge indices of the BFS spanning tree.
    pub tree_edges: Vec<usize>,
    /// Edge indices not in the tree, in edge order; these index the vanishing and cycle blocks.
    pub non_tree_edges: Vec<usize>,
    /// First handle index of each vertex.
    pub handle_offsets: Vec<usize>,
    /// `[l_e]` for every edge, as a full-rank coordinate vector.
    pub vanishing_expansion: Vec<Vec<i64>>,
    /// `pairing[i][e] = ⟨basis_i, [l_e]⟩`.
    pub pairing: Vec<Vec<i64>>,
    endpoints: Vec<(usize, usize)>,
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
}

impl HomologyModel {
    pub fn new(graph: &StableGraph) -> Result<Self, HomologyError> {
        let genus = require_stable(graph)?;
        let n = graph.vertices.len();
        let endpoints = graph.endpoints();
        let root = (0..n).min_by_key(|&i| &graph.vertices[i].id).unwrap();

        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut in_tree = vec![false; graph.edges.len()];
        let mut tree_edges = Vec::new();
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for (k, &(t, h)) in endpoints.iter().enumerate() {
                let w = if t == u {
                    h
                } else if h == u {
                    t
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((u, k));
                    depth[w] = depth[u] + 1;
                    in_tree[k] = true;
                    tree_edges.push(k);
                    queue.push_back(w);
                }
            }
        }
        tree_edges.sort();
        let non_tree_edges: Vec<usize> = (0..graph.edges.len()).filter(|&k| !in_tree[k]).collect();

        let mut handle_offsets = Vec::with_capacity(n);
        let mut offset = 0;
        for v in &graph.vertices {
            handle_offsets.push(offset);
            offset += 2 * v.genus as usize;
        }
        let b = non_tree_edges.len();
        let rank = offset + 2 * b;
        debug_assert_eq!(rank as u64, 2 * genus);

        let mut model = HomologyModel {
            graph: graph.clone(),
            genus,
            tree_edges,
            non_tree_edges,
            handle_offsets,
            vanishing_expansion: Vec::new(),
            pairing: Vec::new(),
            endpoints,
            parent,
            depth,
        };
        model.vanishing_expansion = (0..graph.edges.len()).map(|k| model.expand_vanishing(k)).collect();
        model.pairing = model.build_pairing();
        Ok(model)
    }

    pub fn rank(&self) -> usize {
        self.handle_rank() + 2 * self.non_tree_edges.len()
    }

    pub fn handle_rank(&self) -> usize {
        self.graph.vertices.iter().map(|v| 2 * v.genus as usize).sum()
    }

    pub fn vanishing_index(&self, j: usize) -> usize {
        self.handle_rank() + j
    }

    pub fn cycle_index(&self, j: usize) -> usize {
        self.handle_rank() + self.non_tree_edges.len() + j
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.rank());
        for v in &self.graph.vertices {
            for k in 1..=v.genus {
                out.push(format!("a[{},{k}]", v.id));
                out.push(format!("b[{},{k}]", v.id));
            }
        }
        for &e in &self.non_tree_edges {
            out.push(format!("l[{}]", self.graph.edges[e].id));
        }
        for &e in &self.non_tree_edges {
            out.push(format!("lambda[{}]", self.graph.edges[e].id));
        }
        out
    }

    fn non_tree_slot(&self, edge: usize) -> Option<usize> {
        self.non_tree_edges.binary_search(&edge).ok()
    }

    /// `[l_e]` in the vanishing block. For a tree edge, summing the vertex relations over the
    /// side containing its tail leaves only the edges crossing that cut.
    fn expand_vanishing(&self, edge: usize) -> Vec<i64> {
        let mut out = vec![0; self.rank()];
        if let Some(j) = self.non_tree_slot(edge) {
            out[self.vanishing_index(j)] = 1;
            return out;
        }
        let side = self.tree_side(edge);
        for (j, &f) in self.non_tree_edges.iter().enumerate() {
            let (t, h) = self.endpoints[f];
            match (side[t], side[h]) {
                (true, false) => out[self.vanishing_index(j)] -= 1,
                (false, true) => out[self.vanishing_index(j)] += 1,
                _ => {}
            }
        }
        out
    }

    /// Vertices on the tail side of a tree edge once it is removed from the tree.
    pub fn tree_side(&self, edge: usize) -> Vec<bool> {
        let n = self.graph.vertices.len();
        let mut side = vec![false; n];
        let start = self.endpoints[edge].0;
        side[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &k in &self.tree_edges {
                if k == edge {
                    continue;
                }
                let (t, h) = self.endpoints[k];
                for (a, b) in [(t, h), (h, t)] {
                    if a == u && !side[b] {
                        side[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        side
    }

    fn build_pairing(&self) -> Vec<Vec<i64>> {
        let mut pairing = vec![vec![0; self.graph.edges.len()]; self.rank()];
        for (j, &f) in self.non_tree_edges.iter().enumerate() {
            for step in self.fundamental_cycle(f) {
                pairing[self.cycle_index(j)][step.edge] += step.sign;
            }
        }
        pairing
    }

    /// The non-tree edge forward, then the tree path from its head back to its tail.
    pub fn fundamental_cycle(&self, edge: usize) -> Vec<Step> {
        let (t, h) = self.endpoints[edge];
        let mut steps = vec![Step { edge, sign: 1 }];
        steps.extend(self.tree_path(h, t));
        steps
    }

    /// Unique tree path between two vertex indices.
    pub fn tree_path(&self, from: usize, to: usize) -> Vec<Step> {
        let (mut u, mut w) = (from, to);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while u != w {
            if self.depth[u] >= self.depth[w] {
                let (p, k) = self.parent[u].unwrap();
                up.push(Step { edge: k, sign: if self.endpoints[k].0 == u { 1 } else { -1 } });
                u = p;
            } else {
                let (p, k) = self.parent[w].unwrap();
                down.push(Step { edge: k, sign: if self.endpoints[k].0 == p { 1 } else { -1 } });
                w = p;
            }
        }
        down.reverse();
        up.extend(down);
        up
    }

    pub fn vertex(&self, id: &str) -> Result<usize, HomologyError> {
        self.graph.vertex_index(id).ok_or_else(|| HomologyError::UnknownVertex(id.to_string()))
    }

    fn multiplicity(&self, edge: usize) -> BigInt {
        BigInt::from(self.graph.edges[edge].multiplicity)
    }

    /// Σ sign·ℓ(e)·[l_e] over the steps of a walk.
    pub fn twist_class_of_walk(&self, steps: &[Step]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.rank()];
        for s in steps {
            let c = self.multiplicity(s.edge) * s.sign;
            for (x, &l) in out.iter_mut().zip(&self.vanishing_expansion[s.edge]) {
                if l != 0 {
                    *x += &c * l;
                }
            }
        }
        out
    }

    /// Checks that `steps` is a walk from `from` to `to`.
    pub fn check_walk(&self, from: usize, to: usize, steps: &[Step]) -> bool {
        let mut at = from;
        for s in steps {
            let (t, h) = self.endpoints[s.edge];
            let (a, b) = if s.sign > 0 { (t, h) } else { (h, t) };
            if a != at {
                return false;
            }
            at = b;
        }
        at == to
    }
}

/// Columns `T·basis_i`, with T(x) = x + Σ_e ℓ(e)·⟨x, [l_e]⟩·[l_e].
pub fn twist_matrix(model: &HomologyModel) -> IntMatrix {
    let n = model.rank();
    let mut t = IntMatrix::identity(n);
    for i in 0..n {
        for (e, &p) in model.pairing[i].iter().enumerate() {
            if p == 0 {
                continue;
            }
            let c = model.multiplicity(e) * p;
            for (r, &l) in model.vanishing_expansion[e].iter().enumerate() {
                if l != 0 {
                    let v = t.get(r, i) + &c * l;
                    t.set(r, i, v);
                }
            }
        }
    }
    t
}

/// Rigid lift of σ: handles move with their vertex, vanishing classes map to ±[l_{σe}], and cycle
/// generators map to the cycle-basis expansion of the image cycle with no vanishing correction.
pub fn automorphism_matrix(model: &HomologyModel, sigma: &GraphAutomorphism) -> Result<IntMatrix, HomologyError> {
    require_automorphism(&model.graph, sigma)?;
    let g = &model.graph;
    let n = model.rank();
    let mut s = IntMatrix::zeros(n, n);
    let image_vertex = |v: usize| g.vertex_index(&sigma.vertex_map[&g.vertices[v].id]).unwrap();
    let image_edge = |e: usize| {
        let id = &g.edges[e].id;
        let sign = if sigma.edge_reversals.contains(id) { -1 } else { 1 };
        (g.edge_index(&sigma.edge_map[id]).unwrap(), sign)
    };
    for (v, vert) in g.vertices.iter().enumerate() {
        let w = image_vertex(v);
        for k in 0..2 * vert.genus as usize {
            s.set(model.handle_offsets[w] + k, model.handle_offsets[v] + k, BigInt::from(1));
        }
    }
    for (j, &e) in model.non_tree_edges.iter().enumerate() {
        let (f, sign) = image_edge(e);
        let col = model.vanishing_index(j);
        for (r, &l) in model.vanishing_expansion[f].iter().enumerate() {
            if l != 0 {
                s.set(r, col, BigInt::from(sign * l));
            }
        }
        let col = model.cycle_index(j);
        for step in model.fundamental_cycle(e) {
            let (f, sign) = image_edge(step.edge);
            if let Some(jf) = model.non_tree_slot(f) {
                let r = model.cycle_index(jf);
                let v = s.get(r, col) + BigInt::from(sign * step.sign);
                s.set(r, col, v);
            }
        }
    }
    Ok(s)
}

/// Default basepoint: the least vertex id moved by σ, or the least vertex id if σ fixes all.
pub fn default_basepoint(graph: &StableGraph, sigma: &GraphAutomorphism) -> usize {
    let moved = (0..graph.vertices.len()).filter(|&i| {
        let id = &graph.vertices[i].id;
        sigma.vertex_map.get(id) != Some(id)
    });
    moved
        .min_by_key(|&i| &graph.vertices[i].id)
        .unwrap_or_else(|| (0..graph.vertices.len()).min_by_key(|&i| &graph.vertices[i].id).unwrap())
}

/// Twist class of the tree path from `basepoint` to its σ-image.
pub fn o1_class_from(model: &HomologyModel, sigma: &GraphAutomorphism, basepoint: usize) -> Result<Vec<BigInt>, HomologyError> {
    require_automorphism(&model.graph, sigma)?;
    let id = &model.graph.vertices[basepoint].id;
    let target = model.vertex(&sigma.vertex_map[id])?;
    Ok(model.twist_class_of_walk(&model.tree_path(basepoint, target)))
}

/// Twist class along an explicit walk from `basepoint` to its σ-image.
pub fn o1_class_along(
    model: &HomologyModel,
    sigma: &GraphAutomorphism,
    basepoint: usize,
    walk: &[Step],
) -> Result<Vec<BigInt>, HomologyError> {
    require_automorphism(&model.graph, sigma)?;
    let id = &model.graph.vertices[basepoint].id;
    let target = model.vertex(&sigma.vertex_map[id])?;
    if !model.check_walk(basepoint, target, walk) {
        return Err(HomologyError::BadPath { from: id.clone(), to: sigma.vertex_map[id].clone() });
    }
    Ok(model.twist_class_of_walk(walk))
}

pub fn o1_class(model: &HomologyModel, sigma: &GraphAutomorphism) -> Result<Vec<BigInt>, HomologyError> {
    o1_class_from(model, sigma, default_basepoint(&model.graph, sigma))
}

/// Relations `[S − I | T − I]` of the coinvariants H_{⟨S,T⟩}.
pub fn coinvariant_relations(s: &IntMatrix, t: &IntMatrix) -> IntMatrix {
    IntMatrix::hstack(s.rows(), &[&s.minus_identity(), &t.minus_identity()])
}

pub fn o1_order(model: &HomologyModel, sigma: &GraphAutomorphism) -> Result<Order, HomologyError> {
    let s = automorphism_matrix(model, sigma)?;
    let t = twist_matrix(model);
    let c = o1_class(model, sigma)?;
    Ok(cokernel_order_of(&coinvariant_relations(&s, &t), &c).expect("class has model rank"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn triangle_model() {
        let (g, sigma) = families::genus_one_cycle(3, 1);
        let m = HomologyModel::new(&g).unwrap();
        assert_eq!(m.rank(), 8);
        assert_eq!(m.non_tree_edges.len(), 1);
        let l = m.vanishing_index(0);
        for e in 0..3 {
            let mut expected = vec![0; 8];
            expected[l] = 1;
            assert_eq!(m.vanishing_expansion[e], expected);
        }
        let t = twist_matrix(&m);
        let lambda = m.cycle_index(0);
        for i in 0..8 {
            for j in 0..8 {
                let expected = if i == j {
                    1
                } else if i == l && j == lambda {
                    3
                } else {
                    0
                };
                assert_eq!(*t.get(i, j), BigInt::from(expected), "T[{i},{j}]");
            }
        }
        let s = automorphism_matrix(&m, &sigma).unwrap();
        assert_eq!(
            s.column(lambda),
            big(&{
                let mut v = vec![0; 8];
                v[lambda] = 1;
                v
            })
        );
        assert_eq!(s.column(l)[l], BigInt::from(1));
        assert_eq!(*s.get(2, 0), BigInt::from(1), "a[v1] maps to a[v2]");
        let mut expected = vec![0; 8];
        expected[l] = 1;
        assert_eq!(o1_class(&m, &sigma).unwrap(), big(&expected));
        assert_eq!(o1_order(&m, &sigma).unwrap(), Order::Finite(3.into()));
    }

    #[test]
    fn doubled_tree_model() {
        let (g, sigma) = families::doubled_pair(2, 1);
        let m = HomologyModel::new(&g).unwrap();
        assert_eq!(m.rank(), 8);
        assert!(m.non_tree_edges.is_empty());
        assert!(m.vanishing_expansion[0].iter().all(|&x| x == 0));
        assert!(twist_matrix(&m).is_identity());
        let s = automorphism_matrix(&m, &sigma).unwrap();
        assert!(s.mul(&s).is_identity());
        assert_eq!(*s.get(4, 0), BigInt::from(1));
        assert!(o1_class(&m, &sigma).unwrap().iter().all(Zero::is_zero));
        assert!(o1_order(&m, &sigma).unwrap().is_one());
    }

    #[test]
    fn loop_model_rank() {
        let text = r#"{"vertices":[{"id":"v","genus":2}],"edges":[{"id":"l","tail":"v","head":"v"}]}"#;
        let g = crate::stablegraph::GraphFile::parse(text).unwrap().graph();
        let m = HomologyModel::new(&g).unwrap();
        assert_eq!(m.rank(), 6);
        assert_eq!(m.labels(), vec!["a[v,1]", "b[v,1]", "a[v,2]", "b[v,2]", "l[l]", "lambda[l]"]);
        let t = twist_matrix(&m);
        assert_eq!(*t.get(4, 5), BigInt::from(1));
    }

    #[test]
    fn identity_and_scaling() {
        let (g, _) = families::genus_one_cycle(4, 1);
        let m = HomologyModel::new(&g).unwrap();
        let id = crate::stablegraph::identity_automorphism(&g);
        assert!(automorphism_matrix(&m, &id).unwrap().is_identity());
        assert!(o1_class(&m, &id).unwrap().iter().all(Zero::is_zero));
        let (g2, _) = families::genus_one_cycle(4, 2);
        let m2 = HomologyModel::new(&g2).unwrap();
        let d1 = twist_matrix(&m).minus_identity();
        let d2 = twist_matrix(&m2).minus_identity();
        assert_eq!(d1.scale(&BigInt::from(2)), d2);
    }

    #[test]
    fn pinwheel_orders_divisible() {
        for d in 2..=5 {
            for q in 1..=2 {
                let (g, sigma) = families::pinwheel_cycle(d, q, 1);
                let m = HomologyModel::new(&g).unwrap();
                let order = o1_order(&m, &sigma).unwrap();
                assert!(order.is_divisible_by(&BigInt::from(d)), "d={d} q={q}: {order}");
            }
        }
    }
}
