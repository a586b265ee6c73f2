//! Graph families with their automorphisms: rotated cycles and doubled trees.

use std::collections::BTreeSet;

use rand::Rng;

use crate::stablegraph::{Edge, GraphAutomorphism, StableGraph, Vertex};

fn edge(id: String, tail: String, head: String, multiplicity: u64) -> Edge {
    Edge { id, tail, head, multiplicity }
}

/// Cycle of `d` vertices of genus `q` with every edge of multiplicity `ell`, and the rotation
/// `v_i ↦ v_{i+1}`. Surface genus is `d·q + 1`.
pub fn pinwheel_cycle(d: usize, q: u32, ell: u64) -> (StableGraph, GraphAutomorphism) {
    assert!(d >= 1);
    let name = |i: usize| format!("v{}", i % d + 1);
    let ename = |i: usize| format!("e{}", i % d + 1);
    let vertices = (0..d).map(|i| Vertex { id: name(i), genus: q }).collect();
    let edges = (0..d).map(|i| edge(ename(i), name(i), name(i + 1), ell)).collect();
    let mut sigma = GraphAutomorphism::default();
    for i in 0..d {
        sigma.vertex_map.insert(name(i), name(i + 1));
        sigma.edge_map.insert(ename(i), ename(i + 1));
    }
    (StableGraph { vertices, edges }, sigma)
}

/// The cycle `C_n` of genus-1 vertices with rotation (surface genus `n + 1`).
pub fn genus_one_cycle(n: usize, ell: u64) -> (StableGraph, GraphAutomorphism) {
    pinwheel_cycle(n, 1, ell)
}

/// A tree for one side of a doubled tree. Vertex 0 is the attachment point; `parents[i - 1]`
/// is the parent of vertex `i` and must be smaller than `i`.
#[derive(Clone, Debug)]
pub struct SideTree {
    pub genera: Vec<u32>,
    pub parents: Vec<usize>,
    pub multiplicities: Vec<u64>,
}

impl SideTree {
    pub fn single(genus: u32) -> Self {
        SideTree { genera: vec![genus], parents: vec![], multiplicities: vec![] }
    }

    /// A path whose vertex 0 is one end.
    pub fn path(genera: &[u32]) -> Self {
        SideTree {
            genera: genera.to_vec(),
            parents: (0..genera.len().saturating_sub(1)).collect(),
            multiplicities: vec![1; genera.len().saturating_sub(1)],
        }
    }

    pub fn genus(&self) -> u32 {
        self.genera.iter().sum()
    }

    /// Random side tree of total genus at most `max_genus`, stable once doubled.
    pub fn random<R: Rng>(rng: &mut R, max_genus: u32) -> Self {
        assert!(max_genus >= 1);
        let mut genera = vec![rng.gen_range(1..=max_genus.min(3))];
        let mut parents = Vec::new();
        let mut multiplicities = Vec::new();
        while genera.iter().sum::<u32>() < max_genus && rng.gen_bool(0.6) {
            let room = max_genus - genera.iter().sum::<u32>();
            genera.push(rng.gen_range(1..=room.min(2)));
            parents.push(rng.gen_range(0..genera.len() - 1));
            multiplicities.push(rng.gen_range(1..=3));
        }
        // Genus-0 vertices are allowed where the degree in the doubled graph is at least 3.
        let n = genera.len();
        let mut degree = vec![0; n];
        degree[0] += 1;
        for (i, &p) in parents.iter().enumerate() {
            degree[i + 1] += 1;
            degree[p] += 1;
        }
        let total: u32 = genera.iter().sum();
        for i in 0..n {
            if degree[i] >= 3 && genera[i] > 0 && total - genera[i] >= 1 && rng.gen_bool(0.3) {
                genera[i] = 0;
                break;
            }
        }
        SideTree { genera, parents, multiplicities }
    }
}

/// Two copies of `side` joined at their attachment vertices by `e0` (multiplicity `ell0`),
/// with the involution swapping the copies. Side-1 vertices are `u1, u2, …`, side-2 are `w1, …`.
pub fn doubled_tree(side: &SideTree, ell0: u64) -> (StableGraph, GraphAutomorphism) {
    let n = side.genera.len();
    let u = |i: usize| format!("u{}", i + 1);
    let w = |i: usize| format!("w{}", i + 1);
    let mut vertices = Vec::new();
    for i in 0..n {
        vertices.push(Vertex { id: u(i), genus: side.genera[i] });
    }
    for i in 0..n {
        vertices.push(Vertex { id: w(i), genus: side.genera[i] });
    }
    let mut edges = vec![edge("e0".into(), u(0), w(0), ell0)];
    let mut sigma = GraphAutomorphism::default();
    sigma.edge_map.insert("e0".into(), "e0".into());
    sigma.edge_reversals = BTreeSet::from(["e0".to_string()]);
    for i in 0..n {
        sigma.vertex_map.insert(u(i), w(i));
        sigma.vertex_map.insert(w(i), u(i));
    }
    for (k, (&p, &m)) in side.parents.iter().zip(&side.multiplicities).enumerate() {
        let (a, b) = (format!("f{}", k + 1), format!("g{}", k + 1));
        edges.push(edge(a.clone(), u(p), u(k + 1), m));
        edges.push(edge(b.clone(), w(p), w(k + 1), m));
        sigma.edge_map.insert(a.clone(), b.clone());
        sigma.edge_map.insert(b, a);
    }
    (StableGraph { vertices, edges }, sigma)
}

/// Two genus-`g` vertices joined by one edge, swapped.
pub fn doubled_pair(g: u32, ell0: u64) -> (StableGraph, GraphAutomorphism) {
    doubled_tree(&SideTree::single(g), ell0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stablegraph::{check_automorphism, tree_involution_check, validate_stable};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cycles_are_stable_with_rotation() {
        for d in 1..=6 {
            let (g, s) = pinwheel_cycle(d, 2, 1);
            let r = validate_stable(&g, Some(2 * d as u64 + 1)).unwrap();
            assert!(r.valid, "{:?}", r.violations);
            let a = check_automorphism(&g, &s);
            assert!(a.valid, "{:?}", a.violations);
            assert_eq!(a.order, d as u64);
        }
    }

    #[test]
    fn doubled_trees_satisfy_hypothesis() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let side = SideTree::random(&mut rng, 5);
            let (g, s) = doubled_tree(&side, rng.gen_range(1..=3));
            let r = validate_stable(&g, Some(2 * side.genus() as u64)).unwrap();
            assert!(r.valid, "{:?} {:?}", side, r.violations);
            assert!(tree_involution_check(&g, &s), "{side:?}");
        }
        let (g, s) = doubled_tree(&SideTree::path(&[1, 1]), 1);
        assert_eq!(g.vertices.len(), 4);
        assert!(tree_involution_check(&g, &s));
    }
}
