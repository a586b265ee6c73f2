//! Stable dual graphs: validation, contraction, specialization and automorphisms.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error("unknown edge id {0:?}")]
    UnknownEdge(String),
    #[error("graph is not stable: {}", .0.join("; "))]
    Unstable(Vec<String>),
    #[error("invalid automorphism: {}", .0.join("; "))]
    InvalidAutomorphism(Vec<String>),
    #[error("malformed graph file: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub genus: u32,
}

fn unit_multiplicity() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
    #[serde(default = "unit_multiplicity")]
    pub multiplicity: u64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphAutomorphism {
    #[serde(rename = "vertices")]
    pub vertex_map: BTreeMap<String, String>,
    #[serde(rename = "edges")]
    pub edge_map: BTreeMap<String, String>,
    #[serde(rename = "reversed_edges", default)]
    pub edge_reversals: BTreeSet<String>,
}

/// On-disk form: a graph with an optional automorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphism: Option<GraphAutomorphism>,
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))
    }

    pub fn new(graph: StableGraph, automorphism: Option<GraphAutomorphism>) -> Self {
        GraphFile { vertices: graph.vertices, edges: graph.edges, automorphism }
    }

    pub fn graph(&self) -> StableGraph {
        StableGraph { vertices: self.vertices.clone(), edges: self.edges.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub valid: bool,
    pub genus: u64,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AutomorphismReport {
    pub valid: bool,
    /// Order as a signed permutation of vertices and oriented edges; 0 when invalid.
    pub order: u64,
    pub fixed_vertices: Vec<String>,
    pub stabilized_edges: Vec<String>,
    pub violations: Vec<String>,
}

impl StableGraph {
    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Checks ids only: uniqueness, known endpoints, positive multiplicities, nonempty vertex set.
    pub fn check_ids(&self) -> Result<(), GraphError> {
        if self.vertices.is_empty() {
            return Err(GraphError::Malformed("graph has no vertices".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v.id.as_str()) {
                return Err(GraphError::Malformed(format!("duplicate vertex id {:?}", v.id)));
            }
        }
        let mut seen_e = BTreeSet::new();
        for e in &self.edges {
            if !seen_e.insert(e.id.as_str()) {
                return Err(GraphError::Malformed(format!("duplicate edge id {:?}", e.id)));
            }
            for end in [&e.tail, &e.head] {
                if !seen.contains(end.as_str()) {
                    return Err(GraphError::Malformed(format!("edge {:?} has unknown endpoint {:?}", e.id, end)));
                }
            }
            if e.multiplicity == 0 {
                return Err(GraphError::Malformed(format!("edge {:?} has multiplicity 0", e.id)));
            }
        }
        Ok(())
    }

    /// Endpoint indices `(tail, head)` per edge; ids must already be checked.
    pub fn endpoints(&self) -> Vec<(usize, usize)> {
        let idx: BTreeMap<&str, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        self.edges.iter().map(|e| (idx[e.tail.as_str()], idx[e.head.as_str()])).collect()
    }

    /// Degree with self-loops counted twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for (t, h) in self.endpoints() {
            deg[t] += 1;
            deg[h] += 1;
        }
        deg
    }

    pub fn first_betti(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    /// g = b₁ + Σ h(v).
    pub fn genus(&self) -> i64 {
        self.first_betti() + self.vertices.iter().map(|v| v.genus as i64).sum::<i64>()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for (t, h) in self.endpoints() {
            adj[t].push(h);
            adj[h].push(t);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len() && self.is_connected()
    }

    /// Symmetric edge-count matrix; diagonal entries count loops.
    fn adjacency_counts(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut a = vec![vec![0; n]; n];
        for (t, h) in self.endpoints() {
            a[t][h] += 1;
            if t != h {
                a[h][t] += 1;
            }
        }
        a
    }
}

pub fn validate_stable(graph: &StableGraph, expected_genus: Option<u64>) -> Result<StabilityReport, GraphError> {
    graph.check_ids()?;
    let mut violations = Vec::new();
    if !graph.is_connected() {
        violations.push("graph is not connected".to_string());
    }
    for (v, d) in graph.vertices.iter().zip(graph.degrees()) {
        if v.genus == 0 && d < 3 {
            violations.push(format!("genus-0 vertex {:?} has degree {d} < 3", v.id));
        }
        if v.genus == 1 && d < 1 {
            violations.push(format!("genus-1 vertex {:?} has degree 0", v.id));
        }
    }
    let genus = graph.genus().max(0) as u64;
    if let Some(g) = expected_genus {
        if g != genus {
            violations.push(format!("genus is {genus}, expected {g}"));
        }
    }
    Ok(StabilityReport { valid: violations.is_empty(), genus, violations })
}

/// Validates and returns the genus, turning violations into an error.
pub fn require_stable(graph: &StableGraph) -> Result<u64, GraphError> {
    let report = validate_stable(graph, None)?;
    if report.valid {
        Ok(report.genus)
    } else {
        Err(GraphError::Unstable(report.violations))
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[rb] = ra;
        }
    }
}

/// Contracts the given edges. Each merged component becomes one vertex, named by its least id,
/// with genus Σh + b₁(contracted subgraph).
pub fn contract_edges(graph: &StableGraph, edge_ids: &BTreeSet<String>) -> Result<StableGraph, GraphError> {
    graph.check_ids()?;
    for id in edge_ids {
        if graph.edge_index(id).is_none() {
            return Err(GraphError::UnknownEdge(id.clone()));
        }
    }
    let n = graph.vertices.len();
    let ends = graph.endpoints();
    let mut uf = UnionFind((0..n).collect());
    for (e, &(t, h)) in graph.edges.iter().zip(&ends) {
        if edge_ids.contains(&e.id) {
            uf.union(t, h);
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    let mut genus: BTreeMap<usize, i64> = BTreeMap::new();
    let mut name: BTreeMap<usize, &str> = BTreeMap::new();
    for (i, v) in graph.vertices.iter().enumerate() {
        *genus.entry(roots[i]).or_default() += v.genus as i64 - 1;
        let slot = name.entry(roots[i]).or_insert(&v.id);
        if v.id.as_str() < *slot {
            *slot = &v.id;
        }
    }
    for (e, &(t, _)) in graph.edges.iter().zip(&ends) {
        if edge_ids.contains(&e.id) {
            *genus.entry(roots[t]).or_default() += 1;
        }
    }
    let mut vertices = Vec::new();
    let mut emitted = BTreeSet::new();
    for i in 0..n {
        let r = roots[i];
        if emitted.insert(r) {
            vertices.push(Vertex { id: name[&r].to_string(), genus: (genus[&r] + 1) as u32 });
        }
    }
    let edges = graph
        .edges
        .iter()
        .zip(&ends)
        .filter(|(e, _)| !edge_ids.contains(&e.id))
        .map(|(e, &(t, h))| Edge {
            id: e.id.clone(),
            tail: name[&roots[t]].to_string(),
            head: name[&roots[h]].to_string(),
            multiplicity: e.multiplicity,
        })
        .collect();
    Ok(StableGraph { vertices, edges })
}

/// Colour refinement of vertices by genus, loop count and neighbourhood colours.
fn refined_colours(graph: &StableGraph) -> Vec<Vec<u64>> {
    let adj = graph.adjacency_counts();
    let n = graph.vertices.len();
    let mut colours: Vec<Vec<u64>> =
        (0..n).map(|i| vec![graph.vertices[i].genus as u64, adj[i][i] as u64, adj[i].iter().sum::<usize>() as u64]).collect();
    for _ in 0..n {
        let mut next: Vec<Vec<u64>> = Vec::with_capacity(n);
        let palette: Vec<Vec<u64>> = colours.iter().cloned().sorted().dedup().collect();
        for i in 0..n {
            let mut sig = colours[i].clone();
            let mut nb: Vec<(usize, usize)> =
                (0..n).filter(|&j| j != i && adj[i][j] > 0).map(|j| (palette.binary_search(&colours[j]).unwrap(), adj[i][j])).collect();
            nb.sort();
            sig.push(u64::MAX);
            for (c, m) in nb {
                sig.push(c as u64);
                sig.push(m as u64);
            }
            next.push(sig);
        }
        let before = colours.iter().cloned().sorted().dedup().count();
        let after = next.iter().cloned().sorted().dedup().count();
        colours = next;
        if after == before {
            break;
        }
    }
    colours
}

/// Vertex bijections `a → b` preserving genus and edge counts; `limit` stops early.
fn vertex_isomorphisms(a: &StableGraph, b: &StableGraph, limit: usize) -> Vec<Vec<usize>> {
    let n = a.vertices.len();
    if n != b.vertices.len() || a.edges.len() != b.edges.len() {
        return Vec::new();
    }
    let (adj_a, adj_b) = (a.adjacency_counts(), b.adjacency_counts());
    let (col_a, col_b) = joint_colours(a, b);
    let mut ca = col_a.clone();
    ca.sort();
    let mut cb = col_b.clone();
    cb.sort();
    if ca != cb {
        return Vec::new();
    }
    // Assign rarest colour classes first, following BFS order to maximize pruning.
    let order = search_order(&adj_a, &col_a);
    let mut found = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        k: usize,
        order: &[usize],
        adj_a: &[Vec<usize>],
        adj_b: &[Vec<usize>],
        col_a: &[u64],
        col_b: &[u64],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        found: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if found.len() >= limit {
            return;
        }
        if k == order.len() {
            found.push(map.clone());
            return;
        }
        let v = order[k];
        for w in 0..col_b.len() {
            if used[w] || col_b[w] != col_a[v] || adj_b[w][w] != adj_a[v][v] {
                continue;
            }
            if order[..k].iter().any(|&u| adj_a[v][u] != adj_b[w][map[u]]) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            go(k + 1, order, adj_a, adj_b, col_a, col_b, map, used, found, limit);
            used[w] = false;
            map[v] = usize::MAX;
            if found.len() >= limit {
                return;
            }
        }
    }
    go(0, &order, &adj_a, &adj_b, &col_a, &col_b, &mut map, &mut used, &mut found, limit);
    found
}

/// Refined colours computed on the disjoint union, so colour ids are comparable.
fn joint_colours(a: &StableGraph, b: &StableGraph) -> (Vec<u64>, Vec<u64>) {
    let mut union = a.clone();
    let tag = |s: &str, side: &str| format!("{side}\u{0}{s}");
    union.vertices = a
        .vertices
        .iter()
        .map(|v| Vertex { id: tag(&v.id, "a"), genus: v.genus })
        .chain(b.vertices.iter().map(|v| Vertex { id: tag(&v.id, "b"), genus: v.genus }))
        .collect();
    union.edges = a
        .edges
        .iter()
        .map(|e| Edge { id: tag(&e.id, "a"), tail: tag(&e.tail, "a"), head: tag(&e.head, "a"), multiplicity: 1 })
        .chain(b.edges.iter().map(|e| Edge { id: tag(&e.id, "b"), tail: tag(&e.tail, "b"), head: tag(&e.head, "b"), multiplicity: 1 }))
        .collect();
    let colours = refined_colours(&union);
    let palette: Vec<Vec<u64>> = colours.iter().cloned().sorted().dedup().collect();
    let ids: Vec<u64> = colours.iter().map(|c| palette.binary_search(c).unwrap() as u64).collect();
    let n = a.vertices.len();
    (ids[..n].to_vec(), ids[n..].to_vec())
}

fn search_order(adj: &[Vec<usize>], colours: &[u64]) -> Vec<usize> {
    let n = adj.len();
    let mut class_size: BTreeMap<u64, usize> = BTreeMap::new();
    for &c in colours {
        *class_size.entry(c).or_default() += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        // Prefer vertices adjacent to already placed ones, then rare colours.
        let next = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| {
                let attached = order.iter().any(|&u: &usize| adj[v][u] > 0);
                (!attached, class_size[&colours[v]], v)
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    order
}

/// Isomorphism of underlying stable graphs (genus labels and edge incidence; orientation and
/// multiplicities ignored).
pub fn is_isomorphic(a: &StableGraph, b: &StableGraph) -> bool {
    !vertex_isomorphisms(a, b, 1).is_empty()
}

/// True iff `general` arises from `special` by contracting some set of edges, up to isomorphism.
pub fn specializes_to(general: &StableGraph, special: &StableGraph) -> bool {
    if general.check_ids().is_err() || special.check_ids().is_err() {
        return false;
    }
    if general.genus() != special.genus() || general.edges.len() > special.edges.len() {
        return false;
    }
    let k = special.edges.len() - general.edges.len();
    if special.vertices.len() < general.vertices.len() || special.vertices.len() - general.vertices.len() > k {
        return false;
    }
    let ids: Vec<String> = special.edges.iter().map(|e| e.id.clone()).collect();
    ids.into_iter().combinations(k).any(|subset| {
        let set: BTreeSet<String> = subset.into_iter().collect();
        match contract_edges(special, &set) {
            Ok(c) => c.vertices.len() == general.vertices.len() && is_isomorphic(general, &c),
            Err(_) => false,
        }
    })
}

fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn check_automorphism(graph: &StableGraph, sigma: &GraphAutomorphism) -> AutomorphismReport {
    let mut violations = Vec::new();
    let invalid = |violations: Vec<String>| AutomorphismReport {
        valid: false,
        order: 0,
        fixed_vertices: Vec::new(),
        stabilized_edges: Vec::new(),
        violations,
    };
    if let Err(e) = graph.check_ids() {
        return invalid(vec![e.to_string()]);
    }
    let vids: BTreeSet<&str> = graph.vertices.iter().map(|v| v.id.as_str()).collect();
    let eids: BTreeSet<&str> = graph.edges.iter().map(|e| e.id.as_str()).collect();
    let keys: BTreeSet<&str> = sigma.vertex_map.keys().map(String::as_str).collect();
    let vals: BTreeSet<&str> = sigma.vertex_map.values().map(String::as_str).collect();
    if keys != vids || vals != vids || sigma.vertex_map.len() != vids.len() {
        violations.push("vertex map is not a bijection on the vertex ids".to_string());
    }
    let keys: BTreeSet<&str> = sigma.edge_map.keys().map(String::as_str).collect();
    let vals: BTreeSet<&str> = sigma.edge_map.values().map(String::as_str).collect();
    if keys != eids || vals != eids || sigma.edge_map.len() != eids.len() {
        violations.push("edge map is not a bijection on the edge ids".to_string());
    }
    for r in &sigma.edge_reversals {
        if !eids.contains(r.as_str()) {
            violations.push(format!("reversed edge {r:?} is not an edge"));
        }
    }
    if !violations.is_empty() {
        return invalid(violations);
    }
    for v in &graph.vertices {
        let w = &graph.vertices[graph.vertex_index(&sigma.vertex_map[&v.id]).unwrap()];
        if v.genus != w.genus {
            violations.push(format!("vertex {:?} (genus {}) maps to {:?} (genus {})", v.id, v.genus, w.id, w.genus));
        }
    }
    for e in &graph.edges {
        let f = &graph.edges[graph.edge_index(&sigma.edge_map[&e.id]).unwrap()];
        if e.multiplicity != f.multiplicity {
            violations.push(format!("edge {:?} maps to {:?} with a different multiplicity", e.id, f.id));
        }
        let (st, sh) = (&sigma.vertex_map[&e.tail], &sigma.vertex_map[&e.head]);
        let ok = if sigma.edge_reversals.contains(&e.id) { *st == f.head && *sh == f.tail } else { *st == f.tail && *sh == f.head };
        if !ok {
            violations.push(format!("edge {:?} -> {:?} does not preserve incidence", e.id, f.id));
        }
    }
    if !violations.is_empty() {
        return invalid(violations);
    }
    let mut order = 1u64;
    let mut seen = BTreeSet::new();
    for v in &graph.vertices {
        if seen.contains(&v.id) {
            continue;
        }
        let mut len = 0;
        let mut cur = v.id.clone();
        loop {
            seen.insert(cur.clone());
            len += 1;
            cur = sigma.vertex_map[&cur].clone();
            if cur == v.id {
                break;
            }
        }
        order = lcm(order, len);
    }
    let mut seen = BTreeSet::new();
    for e in &graph.edges {
        if seen.contains(&e.id) {
            continue;
        }
        let mut len = 0;
        let mut flips = 0;
        let mut cur = e.id.clone();
        loop {
            seen.insert(cur.clone());
            len += 1;
            if sigma.edge_reversals.contains(&cur) {
                flips += 1;
            }
            cur = sigma.edge_map[&cur].clone();
            if cur == e.id {
                break;
            }
        }
        order = lcm(order, if flips % 2 == 1 { 2 * len } else { len });
    }
    AutomorphismReport {
        valid: true,
        order,
        fixed_vertices: graph.vertices.iter().filter(|v| sigma.vertex_map[&v.id] == v.id).map(|v| v.id.clone()).collect(),
        stabilized_edges: graph.edges.iter().filter(|e| sigma.edge_map[&e.id] == e.id).map(|e| e.id.clone()).collect(),
        violations,
    }
}

/// Validates σ, turning violations into an error.
pub fn require_automorphism(graph: &StableGraph, sigma: &GraphAutomorphism) -> Result<AutomorphismReport, GraphError> {
    let report = check_automorphism(graph, sigma);
    if report.valid {
        Ok(report)
    } else {
        Err(GraphError::InvalidAutomorphism(report.violations))
    }
}

pub fn tree_involution_check(graph: &StableGraph, sigma: &GraphAutomorphism) -> bool {
    let report = check_automorphism(graph, sigma);
    report.valid && graph.is_tree() && report.order <= 2 && report.fixed_vertices.is_empty() && report.stabilized_edges.len() == 1
}

pub fn identity_automorphism(graph: &StableGraph) -> GraphAutomorphism {
    GraphAutomorphism {
        vertex_map: graph.vertices.iter().map(|v| (v.id.clone(), v.id.clone())).collect(),
        edge_map: graph.edges.iter().map(|e| (e.id.clone(), e.id.clone())).collect(),
        edge_reversals: BTreeSet::new(),
    }
}

/// All vertex permutations extending to automorphisms (as index maps).
pub fn vertex_automorphisms(graph: &StableGraph) -> Vec<Vec<usize>> {
    vertex_isomorphisms(graph, graph, usize::MAX)
}

/// Order of the full automorphism group acting on vertices, edges and edge orientations.
pub fn count_automorphisms(graph: &StableGraph) -> u64 {
    let adj = graph.adjacency_counts();
    let n = graph.vertices.len();
    let fact = |k: usize| (1..=k as u64).product::<u64>();
    let mut per_perm = 1u64;
    for i in 0..n {
        per_perm *= fact(adj[i][i]) * 2u64.pow(adj[i][i] as u32);
        for j in i + 1..n {
            per_perm *= fact(adj[i][j]);
        }
    }
    vertex_automorphisms(graph).len() as u64 * per_perm
}

/// Builds an automorphism from a vertex permutation, pairing parallel edges in list order.
/// Loops keep their orientation. Returns `None` if the permutation does not preserve edge counts.
pub fn automorphism_from_vertex_map(graph: &StableGraph, perm: &[usize]) -> Option<GraphAutomorphism> {
    let ends = graph.endpoints();
    let mut buckets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, &(t, h)) in ends.iter().enumerate() {
        buckets.entry((t.min(h), t.max(h))).or_default().push(k);
    }
    let mut sigma = GraphAutomorphism::default();
    for (i, v) in graph.vertices.iter().enumerate() {
        sigma.vertex_map.insert(v.id.clone(), graph.vertices[perm[i]].id.clone());
    }
    for (&(a, b), edges) in &buckets {
        let (pa, pb) = (perm[a], perm[b]);
        let targets = buckets.get(&(pa.min(pb), pa.max(pb)))?;
        if targets.len() != edges.len() {
            return None;
        }
        for (&e, &f) in edges.iter().zip(targets) {
            sigma.edge_map.insert(graph.edges[e].id.clone(), graph.edges[f].id.clone());
            let (t, _) = ends[e];
            let (ft, fh) = ends[f];
            if ft != fh && perm[t] != ft {
                sigma.edge_reversals.insert(graph.edges[e].id.clone());
            }
        }
    }
    Some(sigma)
}
