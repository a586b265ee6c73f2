#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use morita_core::stablegraph::{Edge, GraphAutomorphism, StableGraph, Vertex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random connected stable graph: a random spanning tree plus extra edges (loops allowed),
/// with genera bumped where needed for stability.
pub fn random_graph(rng: &mut ChaCha8Rng, max_vertices: usize, max_extra: usize, multiplicities: bool) -> StableGraph {
    let n = rng.gen_range(1..=max_vertices);
    let mut genera: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
    let mut ends: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    for _ in 0..rng.gen_range(0..=max_extra) {
        ends.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    let mut degree = vec![0usize; n];
    for &(t, h) in &ends {
        degree[t] += 1;
        degree[h] += 1;
    }
    for v in 0..n {
        if genera[v] == 0 && degree[v] < 3 {
            genera[v] = if degree[v] >= 1 { 1 } else { 2 };
        }
        if genera[v] == 1 && degree[v] == 0 {
            genera[v] = 2;
        }
    }
    let vertices = (0..n).map(|i| Vertex { id: format!("v{i}"), genus: genera[i] }).collect();
    let edges = ends
        .iter()
        .enumerate()
        .map(|(k, &(t, h))| Edge {
            id: format!("e{k}"),
            tail: format!("v{t}"),
            head: format!("v{h}"),
            multiplicity: if multiplicities { rng.gen_range(1..=2) } else { 1 },
        })
        .collect();
    StableGraph { vertices, edges }
}

/// Every automorphism (vertex permutation, edge permutation, orientation flips) found by
/// exhaustive search over vertex permutations and edge assignments.
pub fn brute_force_automorphisms(graph: &StableGraph) -> Vec<GraphAutomorphism> {
    let n = graph.vertices.len();
    let ends = graph.endpoints();
    let mut out = Vec::new();
    for perm in (0..n).permutations(n) {
        if (0..n).any(|v| graph.vertices[v].genus != graph.vertices[perm[v]].genus) {
            continue;
        }
        let mut assignment = Vec::new();
        let mut used = vec![false; graph.edges.len()];
        assign(graph, &ends, &perm, 0, &mut used, &mut assignment, &mut out);
    }
    out
}

fn assign(
    graph: &StableGraph,
    ends: &[(usize, usize)],
    perm: &[usize],
    e: usize,
    used: &mut [bool],
    assignment: &mut Vec<(usize, bool)>,
    out: &mut Vec<GraphAutomorphism>,
) {
    if e == ends.len() {
        let mut sigma = GraphAutomorphism::default();
        for (i, v) in graph.vertices.iter().enumerate() {
            sigma.vertex_map.insert(v.id.clone(), graph.vertices[perm[i]].id.clone());
        }
        for (k, &(f, reversed)) in assignment.iter().enumerate() {
            sigma.edge_map.insert(graph.edges[k].id.clone(), graph.edges[f].id.clone());
            if reversed {
                sigma.edge_reversals.insert(graph.edges[k].id.clone());
            }
        }
        out.push(sigma);
        return;
    }
    let (t, h) = ends[e];
    for f in 0..ends.len() {
        if used[f] || graph.edges[f].multiplicity != graph.edges[e].multiplicity {
            continue;
        }
        for reversed in [false, true] {
            let (ft, fh) = if reversed { (ends[f].1, ends[f].0) } else { ends[f] };
            if (perm[t], perm[h]) == (ft, fh) {
                used[f] = true;
                assignment.push((f, reversed));
                assign(graph, ends, perm, e + 1, used, assignment, out);
                assignment.pop();
                used[f] = false;
            }
        }
    }
}

/// Order of an automorphism by repeated composition until the identity.
pub fn brute_force_order(graph: &StableGraph, sigma: &GraphAutomorphism) -> u64 {
    let mut vertex: Vec<String> = graph.vertices.iter().map(|v| v.id.clone()).collect();
    let mut edge: Vec<(String, bool)> = graph.edges.iter().map(|e| (e.id.clone(), false)).collect();
    let start = (vertex.clone(), edge.clone());
    let mut k = 0;
    loop {
        vertex = vertex.iter().map(|v| sigma.vertex_map[v].clone()).collect();
        edge = edge.iter().map(|(e, flipped)| (sigma.edge_map[e].clone(), flipped ^ sigma.edge_reversals.contains(e))).collect();
        k += 1;
        if (vertex.clone(), edge.clone()) == start {
            return k;
        }
    }
}

pub fn random_subset(rng: &mut ChaCha8Rng, graph: &StableGraph) -> BTreeSet<String> {
    graph.edges.iter().filter(|_| rng.gen_bool(0.4)).map(|e| e.id.clone()).collect()
}
