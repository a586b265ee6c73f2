//! Degree-one cohomology of finite groups with coefficients in finite modules ⊕ℤ/mᵢ.
//!
//! Groups are multiplication tables. A 1-cocycle is determined by its values on a generating
//! set, so `H¹` is computed as a lattice problem in those values: the cocycle law along every
//! edge of the Cayley graph gives congruences, principal cocycles `g ↦ (g−1)a` and the moduli
//! give the relations.

use crate::exactla::{in_column_span, row_lattice_basis_mod, smith_normal_form, AbelianPresentation, IntMatrix, LinalgError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

pub mod corpus;

/// Largest group order accepted by the solver.
pub const MAX_ORDER: usize = 10_000;

#[derive(Debug, Error)]
pub enum FinError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("group of order {0} exceeds the bound {MAX_ORDER}")]
    TooLarge(usize),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("not a module: {0}")]
    NotAModule(String),
    #[error("not a subgroup: {0:?}")]
    NotASubgroup(Vec<usize>),
    #[error("values do not form a cocycle")]
    NotACocycle,
    #[error("the class is zero; no witness required")]
    ZeroClass,
    #[error("no cyclic subgroup detects the class")]
    NoWitness,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[a][b] = a·b`).
    ///
    /// Associativity is checked with Light's test on a greedy generating set, which costs
    /// `O(n²)` per generator instead of `O(n³)`.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, FinError> {
        let n = table.len();
        if n == 0 {
            return Err(FinError::Malformed("empty table".into()));
        }
        if n > MAX_ORDER {
            return Err(FinError::TooLarge(n));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(FinError::Malformed(format!("row {a} has {} entries, expected {n}", row.len())));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return Err(FinError::Malformed(format!("entry {x} in row {a} is out of range")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| FinError::NotAGroup("no identity element".into()))?;
        let mut seen = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if seen[table[a][b]] == a {
                    return Err(FinError::NotAGroup(format!("row {a} repeats {}", table[a][b])));
                }
                seen[table[a][b]] = a;
            }
        }
        seen.fill(usize::MAX);
        for b in 0..n {
            for a in 0..n {
                if seen[table[a][b]] == b {
                    return Err(FinError::NotAGroup(format!("column {b} repeats {}", table[a][b])));
                }
                seen[table[a][b]] = b;
            }
        }
        let inverses: Vec<usize> = (0..n).map(|a| (0..n).find(|&b| table[a][b] == identity).unwrap()).collect();
        let mut group = FiniteGroup { table, identity, inverses, generators: Vec::new() };
        let mut reached = vec![identity];
        for x in 0..n {
            if reached.binary_search(&x).is_err() {
                group.generators.push(x);
                reached = group.closure(&group.generators);
            }
        }
        for &s in &group.generators {
            for x in 0..n {
                let xs = group.table[x][s];
                for y in 0..n {
                    if group.table[xs][y] != group.table[x][group.table[s][y]] {
                        return Err(FinError::NotAGroup(format!("({x}·{s})·{y} differs from {x}·({s}·{y})")));
                    }
                }
            }
        }
        Ok(group)
    }

    /// Closure of a set of elements under an associative product with the given identity.
    pub fn generated_by<T: Ord + Clone>(identity: T, generators: &[T], mul: impl Fn(&T, &T) -> T) -> Result<Self, FinError> {
        let mut index = BTreeMap::new();
        let mut elements = vec![identity.clone()];
        index.insert(identity, 0usize);
        let mut i = 0;
        while i < elements.len() {
            for g in generators {
                let x = mul(&elements[i], g);
                if !index.contains_key(&x) {
                    if elements.len() == MAX_ORDER {
                        return Err(FinError::TooLarge(MAX_ORDER + 1));
                    }
                    index.insert(x.clone(), elements.len());
                    elements.push(x);
                }
            }
            i += 1;
        }
        let table = elements.iter().map(|a| elements.iter().map(|b| index[&mul(a, b)]).collect()).collect();
        Self::from_table(table)
    }

    /// Table file format: the order `n`, then `n²` indices (whitespace separated, row by row).
    pub fn parse(text: &str) -> Result<Self, FinError> {
        let mut tokens = text.split_whitespace().map(|t| t.parse::<usize>().map_err(|_| FinError::Malformed(format!("bad index {t:?}"))));
        let n = tokens.next().ok_or_else(|| FinError::Malformed("missing order".into()))??;
        if n > MAX_ORDER {
            return Err(FinError::TooLarge(n));
        }
        let entries: Vec<usize> = tokens.collect::<Result<_, _>>()?;
        if entries.len() != n * n {
            return Err(FinError::Malformed(format!("expected {} table entries, found {}", n * n, entries.len())));
        }
        Self::from_table(entries.chunks(n.max(1)).map(<[usize]>::to_vec).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.order());
        for row in &self.table {
            let line: Vec<String> = row.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// A generating set chosen greedily in index order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn power(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Sorted elements of the subgroup generated by `elements`.
    pub fn closure(&self, elements: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &s in elements {
                let y = self.mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&x| seen[x]).collect()
    }

    pub fn is_subgroup(&self, elements: &[usize]) -> bool {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        !set.is_empty()
            && set.iter().all(|&x| x < self.order())
            && set.contains(&self.identity)
            && set.iter().all(|&a| set.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    pub fn is_normal(&self, elements: &[usize]) -> bool {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        self.is_subgroup(elements)
            && self.generators.iter().all(|&g| set.iter().all(|&h| set.contains(&self.mul(self.mul(g, h), self.inverse(g)))))
    }

    pub fn cyclic_subgroup(&self, g: usize) -> Vec<usize> {
        self.closure(&[g])
    }

    /// One `(generator, elements)` pair per cyclic subgroup, in order of the least generator.
    pub fn cyclic_subgroups(&self) -> Vec<(usize, Vec<usize>)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for g in 0..self.order() {
            let h = self.cyclic_subgroup(g);
            if seen.insert(h.clone()) {
                out.push((g, h));
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order()).filter(|&z| (0..self.order()).all(|x| self.mul(z, x) == self.mul(x, z))).collect()
    }

    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let n = self.order();
        let commutators: BTreeSet<usize> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| self.mul(self.mul(a, b), self.mul(self.inverse(a), self.inverse(b))))
            .collect();
        self.closure(&commutators.into_iter().collect::<Vec<_>>())
    }

    /// A Sylow `p`-subgroup. Any maximal `p`-subgroup is Sylow, so adjoining `p`-elements
    /// greedily while the closure stays a `p`-group reaches one.
    pub fn sylow_subgroup(&self, p: usize) -> Vec<usize> {
        let is_p_power = |mut k: usize| {
            while k.is_multiple_of(p) {
                k /= p;
            }
            k == 1
        };
        let mut h = vec![self.identity];
        loop {
            let grown = (0..self.order())
                .filter(|x| h.binary_search(x).is_err() && is_p_power(self.element_order(*x)))
                .map(|x| {
                    let mut gens = h.clone();
                    gens.push(x);
                    self.closure(&gens)
                })
                .find(|c| is_p_power(c.len()));
            match grown {
                Some(c) => h = c,
                None => return h,
            }
        }
    }

    /// The subgroup on `elements` as a group in its own right, re-indexed in sorted order.
    /// Local index `i` corresponds to the returned embedding's entry `i`.
    pub fn subgroup(&self, elements: &[usize]) -> Result<(FiniteGroup, Vec<usize>), FinError> {
        if !self.is_subgroup(elements) {
            return Err(FinError::NotASubgroup(elements.to_vec()));
        }
        let embedding: Vec<usize> = elements.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let local: BTreeMap<usize, usize> = embedding.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let table = embedding.iter().map(|&a| embedding.iter().map(|&b| local[&self.mul(a, b)]).collect()).collect();
        Ok((FiniteGroup::from_table(table)?, embedding))
    }

    /// `G/N` for a normal subgroup `N`, with the projection `G → G/N`.
    /// Cosets are numbered by their least element.
    pub fn quotient(&self, normal: &[usize]) -> Result<(FiniteGroup, Vec<usize>), FinError> {
        if !self.is_normal(normal) {
            return Err(FinError::NotASubgroup(normal.to_vec()));
        }
        let n = self.order();
        let mut projection = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if projection[g] == usize::MAX {
                for &h in normal {
                    projection[self.mul(g, h)] = reps.len();
                }
                reps.push(g);
            }
        }
        let table = reps.iter().map(|&a| reps.iter().map(|&b| projection[self.mul(a, b)]).collect()).collect();
        Ok((FiniteGroup::from_table(table)?, projection))
    }

    /// `A × B` with `(a, b)` at index `a·|B| + b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Result<FiniteGroup, FinError> {
        let m = other.order();
        let n = self.order() * m;
        let table = (0..n).map(|x| (0..n).map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m)).collect()).collect();
        FiniteGroup::from_table(table)
    }

    /// `N ⋊ K` with `(n₁, k₁)(n₂, k₂) = (n₁·φ_{k₁}(n₂), k₁k₂)` at index `k·|N| + n`.
    /// `action` gives `φ_k` as a permutation of `N` for each `k` in a generating set of `K`.
    pub fn semidirect_product(normal: &FiniteGroup, acting: &FiniteGroup, action: &[(usize, Vec<usize>)]) -> Result<FiniteGroup, FinError> {
        let nn = normal.order();
        let mut phi: Vec<Option<Vec<usize>>> = vec![None; acting.order()];
        phi[acting.identity] = Some((0..nn).collect());
        let mut queue = VecDeque::from([acting.identity]);
        while let Some(k) = queue.pop_front() {
            let pk = phi[k].clone().unwrap();
            for (s, ps) in action {
                let composed: Vec<usize> = ps.iter().map(|&x| pk[x]).collect();
                let ks = acting.mul(k, *s);
                match &phi[ks] {
                    None => {
                        phi[ks] = Some(composed);
                        queue.push_back(ks);
                    }
                    Some(existing) if *existing != composed => {
                        return Err(FinError::NotAGroup("the action is not a homomorphism".into()));
                    }
                    Some(_) => {}
                }
            }
        }
        let phi: Vec<Vec<usize>> = phi
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| FinError::NotAGroup("the action data does not generate the acting group".into()))?;
        let n = nn * acting.order();
        let table = (0..n)
            .map(|x| {
                let (k1, n1) = (x / nn, x % nn);
                (0..n)
                    .map(|y| {
                        let (k2, n2) = (y / nn, y % nn);
                        acting.mul(k1, k2) * nn + normal.mul(n1, phi[k1][n2])
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(table)
    }

    /// Extends a map on `images` (pairs `(g, φ(g))` whose first entries generate this group)
    /// to a homomorphism into `target`, or `None` if no such homomorphism exists.
    pub fn extend_homomorphism(&self, target: &FiniteGroup, images: &[(usize, usize)]) -> Option<Vec<usize>> {
        let mut map: Vec<Option<usize>> = vec![None; self.order()];
        map[self.identity] = Some(target.identity);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &(s, t) in images {
                let y = self.mul(x, s);
                let image = target.mul(map[x].unwrap(), t);
                match map[y] {
                    None => {
                        map[y] = Some(image);
                        queue.push_back(y);
                    }
                    Some(existing) if existing != image => return None,
                    Some(_) => {}
                }
            }
        }
        let map: Vec<usize> = map.into_iter().collect::<Option<_>>()?;
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| map[self.mul(a, b)] == target.mul(map[a], map[b]))).then_some(map)
    }

    /// Isomorphism invariants: order, commutativity, centre and derived subgroup sizes, and the
    /// sorted multiset of (element order, centralizer size, number of square roots).
    pub fn invariants(&self) -> GroupInvariants {
        let n = self.order();
        let mut roots = vec![0usize; n];
        for x in 0..n {
            roots[self.mul(x, x)] += 1;
        }
        let mut profile: Vec<(usize, usize, usize)> = (0..n)
            .map(|x| {
                let centralizer = (0..n).filter(|&y| self.mul(x, y) == self.mul(y, x)).count();
                (self.element_order(x), centralizer, roots[x])
            })
            .collect();
        profile.sort_unstable();
        GroupInvariants {
            order: n,
            abelian: self.is_abelian(),
            center: self.center().len(),
            derived: self.commutator_subgroup().len(),
            profile,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupInvariants {
    pub order: usize,
    pub abelian: bool,
    pub center: usize,
    pub derived: usize,
    pub profile: Vec<(usize, usize, usize)>,
}

/// A module `⊕ℤ/mᵢ` with one action matrix per group element; row `i` is reduced modulo `mᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModule {
    pub moduli: Vec<BigInt>,
    pub action: Vec<IntMatrix>,
}

impl FiniteModule {
    /// Validates that each matrix is well defined on `⊕ℤ/mᵢ`, that the identity acts trivially,
    /// and that `ρ(g·s) = ρ(g)ρ(s)` for every element `g` and generator `s` (which implies the
    /// full homomorphism law).
    pub fn new(group: &FiniteGroup, moduli: Vec<BigInt>, action: Vec<IntMatrix>) -> Result<Self, FinError> {
        let r = moduli.len();
        if let Some(m) = moduli.iter().find(|m| m < &&BigInt::from(2)) {
            return Err(FinError::NotAModule(format!("modulus {m} must be at least 2")));
        }
        if action.len() != group.order() {
            return Err(FinError::NotAModule(format!("{} matrices for a group of order {}", action.len(), group.order())));
        }
        let mut module = FiniteModule { moduli, action };
        for (g, m) in module.action.iter_mut().enumerate() {
            if m.rows() != r || m.cols() != r {
                return Err(FinError::NotAModule(format!("matrix for element {g} is {}x{}, expected {r}x{r}", m.rows(), m.cols())));
            }
            for i in 0..r {
                for j in 0..r {
                    let x = m.get(i, j).mod_floor(&module.moduli[i]);
                    if !(&module.moduli[j] * &x).is_multiple_of(&module.moduli[i]) {
                        return Err(FinError::NotAModule(format!("entry ({i},{j}) of element {g} is not well defined")));
                    }
                    m.set(i, j, x);
                }
            }
        }
        if !module.action[group.identity()].is_identity() {
            return Err(FinError::NotAModule("the identity does not act trivially".into()));
        }
        for g in 0..group.order() {
            for &s in group.generators() {
                if module.compose(&module.action[g], &module.action[s]) != module.action[group.mul(g, s)] {
                    return Err(FinError::NotAModule(format!("action fails on the product of {g} and {s}")));
                }
            }
        }
        Ok(module)
    }

    /// Extends matrices given on a generating set to an action, then validates it.
    pub fn from_generators(group: &FiniteGroup, moduli: Vec<BigInt>, images: &[(usize, IntMatrix)]) -> Result<Self, FinError> {
        let r = moduli.len();
        let reduce = |m: &IntMatrix| {
            let mut out = m.clone();
            for i in 0..r {
                for j in 0..r {
                    out.set(i, j, m.get(i, j).mod_floor(&moduli[i]));
                }
            }
            out
        };
        let mut action: Vec<Option<IntMatrix>> = vec![None; group.order()];
        action[group.identity()] = Some(IntMatrix::identity(r));
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(g) = queue.pop_front() {
            for (s, m) in images {
                let gs = group.mul(g, *s);
                if action[gs].is_none() {
                    action[gs] = Some(reduce(&action[g].as_ref().unwrap().mul(m)));
                    queue.push_back(gs);
                }
            }
        }
        let action = action
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| FinError::NotAModule("the given elements do not generate the group".into()))?;
        Self::new(group, moduli, action)
    }

    pub fn trivial(group: &FiniteGroup, moduli: Vec<BigInt>) -> Self {
        let r = moduli.len();
        FiniteModule { moduli, action: vec![IntMatrix::identity(r); group.order()] }
    }

    /// `ℤ/m` with `g` acting by `−1` exactly when `g ∉ kernel` (an index-two subgroup).
    pub fn sign(group: &FiniteGroup, kernel: &[usize], modulus: BigInt) -> Result<Self, FinError> {
        if 2 * kernel.len() != group.order() || !group.is_subgroup(kernel) {
            return Err(FinError::NotASubgroup(kernel.to_vec()));
        }
        let minus = IntMatrix::from_big_rows(vec![vec![&modulus - 1]])?;
        let action = (0..group.order()).map(|g| if kernel.contains(&g) { IntMatrix::identity(1) } else { minus.clone() }).collect();
        Self::new(group, vec![modulus], action)
    }

    /// The permutation module `ℤ/m[G/H]` on left cosets of `H`.
    pub fn permutation(group: &FiniteGroup, subgroup: &[usize], modulus: BigInt) -> Result<Self, FinError> {
        if !group.is_subgroup(subgroup) {
            return Err(FinError::NotASubgroup(subgroup.to_vec()));
        }
        let n = group.order();
        let mut coset = vec![usize::MAX; n];
        let mut count = 0;
        for g in 0..n {
            if coset[g] == usize::MAX {
                for &h in subgroup {
                    coset[group.mul(g, h)] = count;
                }
                count += 1;
            }
        }
        let reps: Vec<usize> = (0..count).map(|c| coset.iter().position(|&x| x == c).unwrap()).collect();
        let action = (0..n)
            .map(|g| {
                let mut m = IntMatrix::zeros(count, count);
                for (c, &x) in reps.iter().enumerate() {
                    m.set(coset[group.mul(g, x)], c, BigInt::one());
                }
                m
            })
            .collect();
        Self::new(group, vec![modulus; count], action)
    }

    pub fn direct_sum(&self, other: &FiniteModule) -> FiniteModule {
        let (r, s) = (self.rank(), other.rank());
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| {
                let mut m = IntMatrix::zeros(r + s, r + s);
                for i in 0..r {
                    for j in 0..r {
                        m.set(i, j, a.get(i, j).clone());
                    }
                }
                for i in 0..s {
                    for j in 0..s {
                        m.set(r + i, r + j, b.get(i, j).clone());
                    }
                }
                m
            })
            .collect();
        FiniteModule { moduli: self.moduli.iter().chain(&other.moduli).cloned().collect(), action }
    }

    /// `B·ρ(g)·B⁻¹` for a unimodular `B`; needs all moduli equal.
    pub fn change_basis(&self, group: &FiniteGroup, basis: &IntMatrix) -> Result<Self, FinError> {
        if self.moduli.iter().any(|m| m != &self.moduli[0]) {
            return Err(FinError::NotAModule("a change of basis needs equal moduli".into()));
        }
        let inverse = basis.unimodular_inverse()?;
        let action = self.action.iter().map(|m| basis.mul(m).mul(&inverse)).collect();
        Self::new(group, self.moduli.clone(), action)
    }

    /// The contragredient `g ↦ ρ(g⁻¹)ᵀ`; needs all moduli equal.
    pub fn dual(&self, group: &FiniteGroup) -> Result<Self, FinError> {
        if self.moduli.iter().any(|m| m != &self.moduli[0]) {
            return Err(FinError::NotAModule("the dual needs equal moduli".into()));
        }
        let action = (0..group.order()).map(|g| self.action[group.inverse(g)].transpose()).collect();
        Self::new(group, self.moduli.clone(), action)
    }

    /// The module restricted along a subgroup embedding.
    pub fn restrict(&self, embedding: &[usize]) -> FiniteModule {
        FiniteModule { moduli: self.moduli.clone(), action: embedding.iter().map(|&g| self.action[g].clone()).collect() }
    }

    /// The module pulled back along a homomorphism into the group this module lives over.
    pub fn inflate(&self, projection: &[usize]) -> FiniteModule {
        FiniteModule { moduli: self.moduli.clone(), action: projection.iter().map(|&q| self.action[q].clone()).collect() }
    }

    /// Module file format: rank `r`, the `r` moduli, then one `r×r` matrix (row-major) per element.
    pub fn parse(group: &FiniteGroup, text: &str) -> Result<Self, FinError> {
        let tokens: Vec<BigInt> = text
            .split_whitespace()
            .map(|t| t.parse::<BigInt>().map_err(|_| FinError::Malformed(format!("bad integer {t:?}"))))
            .collect::<Result<_, _>>()?;
        let r = tokens.first().and_then(|t| usize::try_from(t).ok()).ok_or_else(|| FinError::Malformed("missing rank".into()))?;
        let expected = 1 + r + group.order() * r * r;
        if tokens.len() != expected {
            return Err(FinError::Malformed(format!("expected {expected} integers, found {}", tokens.len())));
        }
        let moduli = tokens[1..=r].to_vec();
        let action = tokens[1 + r..]
            .chunks(r * r)
            .map(|c| IntMatrix::from_big_rows(c.chunks(r).map(<[BigInt]>::to_vec).collect()))
            .collect::<Result<_, _>>()?;
        Self::new(group, moduli, action)
    }

    pub fn to_text(&self) -> String {
        let line = |v: &[BigInt]| v.iter().map(BigInt::to_string).collect::<Vec<_>>().join(" ");
        let mut out = format!("{}\n{}\n", self.rank(), line(&self.moduli));
        for m in &self.action {
            for i in 0..m.rows() {
                out.push_str(&line(m.row(i)));
                out.push('\n');
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        v.iter().zip(&self.moduli).map(|(x, m)| x.mod_floor(m)).collect()
    }

    pub fn act(&self, g: usize, v: &[BigInt]) -> Vec<BigInt> {
        self.reduce(&self.action[g].mul_vec(v))
    }

    /// Number of elements `∏ mᵢ`.
    pub fn cardinality(&self) -> BigInt {
        self.moduli.iter().product()
    }

    fn compose(&self, a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
        let mut c = a.mul(b);
        for i in 0..c.rows() {
            for j in 0..c.cols() {
                let x = c.get(i, j).mod_floor(&self.moduli[i]);
                c.set(i, j, x);
            }
        }
        c
    }

    /// Lattice `(ρ(g) − 1)ℤʳ + ⊕mᵢℤ` of vectors representing `(g−1)A`.
    fn coboundary_lattice(&self, g: usize) -> IntMatrix {
        let r = self.rank();
        let diag = IntMatrix::from_big_rows(
            (0..r).map(|i| (0..r).map(|j| if i == j { self.moduli[i].clone() } else { BigInt::zero() }).collect()).collect(),
        )
        .expect("square diagonal");
        IntMatrix::hstack(r, &[&self.action[g].minus_identity(), &diag])
    }
}

/// Values `f(g)` of a 1-cocycle, one vector per group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCocycle {
    pub values: Vec<Vec<BigInt>>,
}

/// Checks `f(gh) = f(g) + g·f(h)` for all pairs.
pub fn is_cocycle(group: &FiniteGroup, module: &FiniteModule, f: &FiniteCocycle) -> bool {
    let n = group.order();
    f.values.len() == n
        && (0..n).all(|g| {
            (0..n).all(|h| {
                let rhs: Vec<BigInt> = f.values[g].iter().zip(module.act(g, &f.values[h])).map(|(a, b)| a + b).collect();
                module.reduce(&rhs) == module.reduce(&f.values[group.mul(g, h)])
            })
        })
}

/// `H¹(G, A)` with coordinates. Classes are written in the invariant-factor coordinates of
/// `presentation`.
#[derive(Clone, Debug)]
pub struct H1Finite {
    pub presentation: AbelianPresentation,
    pub generators: Vec<usize>,
    moduli: Vec<BigInt>,
    /// Columns: a basis of the lattice of generator values that extend to cocycles.
    lattice: IntMatrix,
    lattice_inverse: IntMatrix,
    lattice_scales: Vec<BigInt>,
    /// `f(g) = transport[g]·u` for stacked generator values `u`.
    transport: Vec<IntMatrix>,
}

pub fn h1_finite(group: &FiniteGroup, module: &FiniteModule) -> Result<H1Finite, FinError> {
    let n = group.order();
    if n > MAX_ORDER {
        return Err(FinError::TooLarge(n));
    }
    if module.action.len() != n {
        return Err(FinError::NotAModule("module and group orders differ".into()));
    }
    let generators = group.generators().to_vec();
    let (r, k) = (module.rank(), generators.len());
    let d = r * k;
    let modulus = module.moduli.iter().fold(BigInt::one(), |acc, m| acc.lcm(m));
    let scale: Vec<BigInt> = module.moduli.iter().map(|m| &modulus / m).collect();

    let mut transport: Vec<Option<IntMatrix>> = vec![None; n];
    transport[group.identity()] = Some(IntMatrix::zeros(r, d));
    let mut constraints: Vec<Vec<BigInt>> = Vec::new();
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(g) = queue.pop_front() {
        for (si, &s) in generators.iter().enumerate() {
            let mut candidate = transport[g].clone().unwrap();
            for i in 0..r {
                for j in 0..r {
                    let x = (candidate.get(i, si * r + j) + module.action[g].get(i, j)).mod_floor(&module.moduli[i]);
                    candidate.set(i, si * r + j, x);
                }
            }
            let gs = group.mul(g, s);
            match &transport[gs] {
                None => {
                    transport[gs] = Some(candidate);
                    queue.push_back(gs);
                }
                Some(existing) => {
                    for i in 0..r {
                        let row: Vec<BigInt> = candidate.row(i).iter().zip(existing.row(i)).map(|(a, b)| (a - b) * &scale[i]).collect();
                        if row.iter().any(|x| !x.is_multiple_of(&modulus)) {
                            constraints.push(row);
                        }
                    }
                }
            }
        }
    }
    let transport: Vec<IntMatrix> = transport.into_iter().map(Option::unwrap).collect();

    let (lattice, lattice_inverse, lattice_scales) = if d == 0 {
        (IntMatrix::zeros(0, 0), IntMatrix::zeros(0, 0), Vec::new())
    } else {
        let c = if constraints.is_empty() { IntMatrix::zeros(0, d) } else { IntMatrix::from_big_rows(constraints)? };
        solution_lattice(&c, &modulus)?
    };

    // Relations: the moduli on each generator block and the principal cocycles.
    let mut relations: Vec<Vec<BigInt>> = Vec::new();
    for si in 0..k {
        for j in 0..r {
            let mut v = vec![BigInt::zero(); d];
            v[si * r + j] = module.moduli[j].clone();
            relations.push(v);
        }
    }
    for j in 0..r {
        let v: Vec<BigInt> = generators
            .iter()
            .flat_map(|&s| (0..r).map(move |i| (s, i)))
            .map(|(s, i)| module.action[s].get(i, j) - if i == j { BigInt::one() } else { BigInt::zero() })
            .collect();
        relations.push(v);
    }
    let in_lattice_coords: Vec<Vec<BigInt>> = relations
        .iter()
        .map(|v| to_lattice_coords(&lattice_inverse, &lattice_scales, v).ok_or(FinError::NotACocycle))
        .collect::<Result<_, _>>()?;
    let relation_matrix = IntMatrix::from_columns(d, &in_lattice_coords)?;
    Ok(H1Finite {
        presentation: AbelianPresentation::from_relations(relation_matrix),
        generators,
        moduli: module.moduli.clone(),
        lattice,
        lattice_inverse,
        lattice_scales,
        transport,
    })
}

/// `{u : C·u ≡ 0 mod N}` as `(V·diag(c), V⁻¹, c)`.
fn solution_lattice(c: &IntMatrix, modulus: &BigInt) -> Result<(IntMatrix, IntMatrix, Vec<BigInt>), FinError> {
    let d = c.cols();
    let basis = row_lattice_basis_mod(c, modulus);
    let (diag, _, v) = smith_normal_form(&basis);
    let scales: Vec<BigInt> = (0..d).map(|i| modulus / diag.get(i, i).abs().gcd(modulus)).collect();
    let mut lattice = v.clone();
    for j in 0..d {
        for i in 0..d {
            let x = lattice.get(i, j) * &scales[j];
            lattice.set(i, j, x);
        }
    }
    Ok((lattice, v.unimodular_inverse()?, scales))
}

fn to_lattice_coords(inverse: &IntMatrix, scales: &[BigInt], v: &[BigInt]) -> Option<Vec<BigInt>> {
    inverse
        .mul_vec(v)
        .into_iter()
        .zip(scales)
        .map(|(y, c)| {
            let (q, r) = y.div_rem(c);
            r.is_zero().then_some(q)
        })
        .collect()
}

impl H1Finite {
    pub fn cardinality(&self) -> BigInt {
        self.presentation.cardinality().expect("H¹ of a finite group with finite coefficients is finite")
    }

    pub fn is_trivial(&self) -> bool {
        self.presentation.is_trivial()
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.presentation.invariant_factors
    }

    pub fn is_zero(&self, coords: &[BigInt]) -> bool {
        coords.iter().zip(self.invariant_factors()).all(|(c, m)| c.mod_floor(m).is_zero())
    }

    /// A representative cocycle of the class with the given coordinates.
    pub fn cocycle(&self, coords: &[BigInt]) -> Result<FiniteCocycle, FinError> {
        let x = self.presentation.element_from_coordinates(coords)?;
        let u = if self.lattice.rows() == 0 { Vec::new() } else { self.lattice.mul_vec(&x) };
        Ok(self.extend(&u))
    }

    fn extend(&self, u: &[BigInt]) -> FiniteCocycle {
        let values = self
            .transport
            .iter()
            .map(|t| {
                let raw = if u.is_empty() { vec![BigInt::zero(); t.rows()] } else { t.mul_vec(u) };
                raw.iter().zip(&self.moduli).map(|(x, m)| x.mod_floor(m)).collect()
            })
            .collect();
        FiniteCocycle { values }
    }

    /// Coordinates of the class of a cocycle. The values on generators determine a candidate,
    /// which must reproduce every other value.
    pub fn class_of(&self, f: &FiniteCocycle) -> Result<Vec<BigInt>, FinError> {
        if f.values.len() != self.transport.len() || f.values.iter().any(|v| v.len() != self.moduli.len()) {
            return Err(FinError::NotACocycle);
        }
        let u: Vec<BigInt> = self.generators.iter().flat_map(|&s| f.values[s].iter().cloned()).collect();
        let reduce = |v: &[BigInt]| -> Vec<BigInt> { v.iter().zip(&self.moduli).map(|(x, m)| x.mod_floor(m)).collect() };
        let extended = self.extend(&u);
        if extended.values.iter().zip(&f.values).any(|(a, b)| reduce(a) != reduce(b)) {
            return Err(FinError::NotACocycle);
        }
        let x = to_lattice_coords(&self.lattice_inverse, &self.lattice_scales, &u).ok_or(FinError::NotACocycle)?;
        Ok(self.presentation.coordinates(&x)?)
    }

    /// Every class, in lexicographic order of coordinates.
    pub fn classes(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![Vec::new()];
        for m in self.invariant_factors() {
            let bound = m.to_string().parse::<u64>().expect("enumeration of a small group");
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..bound).map(move |c| {
                        let mut v = prefix.clone();
                        v.push(BigInt::from(c));
                        v
                    })
                })
                .collect();
        }
        out
    }

    pub fn random_class<R: Rng>(&self, rng: &mut R) -> Vec<BigInt> {
        self.invariant_factors().iter().map(|m| BigInt::from(rng.gen_range(0..m.to_string().parse::<u64>().unwrap_or(u64::MAX)))).collect()
    }
}

/// A class restricted to a subgroup, with the subgroup's own `H¹`.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub subgroup: FiniteGroup,
    pub embedding: Vec<usize>,
    pub h1: H1Finite,
    pub coordinates: Vec<BigInt>,
}

impl Restriction {
    pub fn is_zero(&self) -> bool {
        self.h1.is_zero(&self.coordinates)
    }
}

pub fn restrict_h1(
    group: &FiniteGroup,
    module: &FiniteModule,
    h1: &H1Finite,
    class: &[BigInt],
    subgroup: &[usize],
) -> Result<Restriction, FinError> {
    let (sub, embedding) = group.subgroup(subgroup)?;
    let f = h1.cocycle(class)?;
    let sub_module = module.restrict(&embedding);
    let sub_h1 = h1_finite(&sub, &sub_module)?;
    let restricted = FiniteCocycle { values: embedding.iter().map(|&g| f.values[g].clone()).collect() };
    let coordinates = sub_h1.class_of(&restricted)?;
    Ok(Restriction { subgroup: sub, embedding, h1: sub_h1, coordinates })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub generator: usize,
    pub elements: Vec<usize>,
}

/// A cocycle restricted to `⟨g⟩` is a coboundary exactly when `f(g) ∈ (g−1)A`.
fn detects(module: &FiniteModule, f: &FiniteCocycle, g: usize) -> Result<bool, FinError> {
    Ok(!in_column_span(&module.coboundary_lattice(g), &f.values[g])?)
}

/// First cyclic subgroup (by least generator) on which the class restricts nontrivially.
pub fn cyclic_witness(group: &FiniteGroup, module: &FiniteModule, h1: &H1Finite, class: &[BigInt]) -> Result<Witness, FinError> {
    if h1.is_zero(class) {
        return Err(FinError::ZeroClass);
    }
    let f = h1.cocycle(class)?;
    for (generator, elements) in group.cyclic_subgroups() {
        if detects(module, &f, generator)? {
            return Ok(Witness { generator, elements });
        }
    }
    Err(FinError::NoWitness)
}

/// Whether the joint restriction `H¹(G, A) → ∏ H¹(⟨g⟩, A)` over all cyclic subgroups is
/// injective, i.e. whether every nonzero class has a cyclic witness. Exact: the kernel is
/// computed as a lattice and compared with the relations of `H¹`.
pub fn cyclic_restriction_injective(group: &FiniteGroup, module: &FiniteModule, h1: &H1Finite) -> Result<bool, FinError> {
    let d = h1.lattice.cols();
    if d == 0 || h1.is_trivial() {
        return Ok(true);
    }
    let mut rows: Vec<(Vec<BigInt>, BigInt)> = Vec::new();
    for (g, _) in group.cyclic_subgroups() {
        let local = AbelianPresentation::from_relations(module.coboundary_lattice(g));
        let through = h1.transport[g].mul(&h1.lattice);
        for (functional, m) in local.coordinate_functionals() {
            let row: Vec<BigInt> = (0..d).map(|j| functional.iter().enumerate().map(|(i, a)| a * through.get(i, j)).sum()).collect();
            rows.push((row, m));
        }
    }
    let modulus = rows.iter().fold(BigInt::one(), |acc, (_, m)| acc.lcm(m));
    let scaled: Vec<Vec<BigInt>> = rows.into_iter().map(|(row, m)| row.iter().map(|x| x * (&modulus / &m)).collect()).collect();
    let c = IntMatrix::from_big_rows(scaled)?;
    let (kernel, _, _) = solution_lattice(&c, &modulus)?;
    for j in 0..d {
        if !in_column_span(&h1.presentation.relation_matrix, &kernel.column(j))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A random `p`-torsion module of rank at most `max_rank`, for a prime `p` dividing `|G|`.
///
/// Summands are trivial, sign and permutation modules over `ℤ/pᵏ` (`k ≤ 2`); the sum is then
/// twisted by a random change of basis and sometimes dualized.
pub fn random_p_module<R: Rng>(group: &FiniteGroup, rng: &mut R, max_rank: usize) -> FiniteModule {
    let primes = prime_factors(group.order());
    let p = primes.choose(rng).copied().unwrap_or(2);
    let q = BigInt::from(p.pow(rng.gen_range(1..=2)));
    let target = rng.gen_range(1..=max_rank);
    let n = group.order();
    let mut module: Option<FiniteModule> = None;
    let rank = |m: &Option<FiniteModule>| m.as_ref().map_or(0, FiniteModule::rank);
    let mut attempts = 0;
    while rank(&module) < target && attempts < 50 {
        attempts += 1;
        let room = target - rank(&module);
        let summand = match rng.gen_range(0..3) {
            0 => Some(FiniteModule::trivial(group, vec![q.clone()])),
            1 => {
                let picks: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..n)).collect();
                let h = group.closure(&picks);
                (2 * h.len() == n).then(|| FiniteModule::sign(group, &h, q.clone()).expect("index two"))
            }
            _ => {
                let picks: Vec<usize> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..n)).collect();
                let h = group.closure(&picks);
                (n / h.len() <= room).then(|| FiniteModule::permutation(group, &h, q.clone()).expect("subgroup"))
            }
        };
        if let Some(s) = summand.filter(|s| s.rank() <= room) {
            module = Some(match module {
                None => s,
                Some(m) => m.direct_sum(&s),
            });
        }
    }
    let module = module.unwrap_or_else(|| FiniteModule::trivial(group, vec![q.clone()]));
    let r = module.rank();
    let mut basis = IntMatrix::identity(r);
    for _ in 0..2 * r {
        let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..r));
        if i != j {
            let c = BigInt::from(rng.gen_range(-2..=2));
            for col in 0..r {
                let x = basis.get(i, col) + &c * basis.get(j, col);
                basis.set(i, col, x);
            }
        }
    }
    let twisted = module.change_basis(group, &basis).expect("unimodular change of basis");
    if rng.gen_bool(0.3) {
        twisted.dual(group).expect("equal moduli")
    } else {
        twisted
    }
}

#[cfg(test)]
mod tests {
    use super::corpus::{cyclic, elementary_abelian};
    use super::*;

    fn z(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]), Err(FinError::NotAGroup(_))));
        assert!(matches!(FiniteGroup::parse("2 0 1 1"), Err(FinError::Malformed(_))));
        // A Latin square with identity that is not associative (a loop of order 5).
        let loop5 = vec![vec![0, 1, 2, 3, 4], vec![1, 0, 3, 4, 2], vec![2, 4, 0, 1, 3], vec![3, 2, 4, 0, 1], vec![4, 3, 1, 2, 0]];
        assert!(matches!(FiniteGroup::from_table(loop5), Err(FinError::NotAGroup(_))));
        assert!(matches!(FiniteGroup::parse(&format!("{}", MAX_ORDER + 1)), Err(FinError::TooLarge(_))));
    }

    #[test]
    fn small_h1_examples() {
        let trivial = cyclic(1);
        let h = h1_finite(&trivial, &FiniteModule::trivial(&trivial, vec![z(5)])).unwrap();
        assert!(h.is_trivial());

        let c2 = cyclic(2);
        let h = h1_finite(&c2, &FiniteModule::trivial(&c2, vec![z(2)])).unwrap();
        assert_eq!(h.invariant_factors(), &[z(2)]);

        let neg = FiniteModule::sign(&c2, &[0], z(4)).unwrap();
        let h = h1_finite(&c2, &neg).unwrap();
        assert_eq!(h.invariant_factors(), &[z(2)]);
        // Brute force: functions f with f(0) = 0 satisfying the cocycle law, modulo (g−1)A.
        let cocycles: Vec<i64> =
            (0..4).filter(|&x| is_cocycle(&c2, &neg, &FiniteCocycle { values: vec![vec![z(0)], vec![z(x)]] })).collect();
        let coboundaries: BTreeSet<i64> = (0..4i64).map(|a| (-2 * a).rem_euclid(4)).collect();
        assert_eq!(cocycles.len() / coboundaries.len(), 2);
    }

    #[test]
    fn restriction_and_witness_on_klein_four() {
        let v4 = elementary_abelian(2, 2);
        let module = FiniteModule::trivial(&v4, vec![z(2)]);
        let h = h1_finite(&v4, &module).unwrap();
        assert_eq!(h.cardinality(), z(4));
        // (a, b) at index 2a + b; the first projection sends (a, b) to a.
        let first = FiniteCocycle { values: (0..4).map(|g| vec![z(g as i64 / 2)]).collect() };
        assert!(is_cocycle(&v4, &module, &first));
        let alpha = h.class_of(&first).unwrap();
        assert!(!h.is_zero(&alpha));
        let first_factor = vec![0, 2];
        let second_factor = vec![0, 1];
        assert!(!restrict_h1(&v4, &module, &h, &alpha, &first_factor).unwrap().is_zero());
        assert!(restrict_h1(&v4, &module, &h, &alpha, &second_factor).unwrap().is_zero());
        assert!(restrict_h1(&v4, &module, &h, &alpha, &[0]).unwrap().is_zero());
        assert!(matches!(restrict_h1(&v4, &module, &h, &alpha, &[0, 3, 1]), Err(FinError::NotASubgroup(_))));
        let w = cyclic_witness(&v4, &module, &h, &alpha).unwrap();
        assert_eq!(w.elements, first_factor);
        let zero = vec![z(0); h.invariant_factors().len()];
        assert!(matches!(cyclic_witness(&v4, &module, &h, &zero), Err(FinError::ZeroClass)));
        assert!(cyclic_restriction_injective(&v4, &module, &h).unwrap());

        let c2 = cyclic(2);
        let hc = h1_finite(&c2, &FiniteModule::trivial(&c2, vec![z(2)])).unwrap();
        let w = cyclic_witness(&c2, &FiniteModule::trivial(&c2, vec![z(2)]), &hc, &[z(1)]).unwrap();
        assert_eq!(w.elements, vec![0, 1]);
    }

    #[test]
    fn module_validation() {
        let c2 = cyclic(2);
        let bad = FiniteModule::new(&c2, vec![z(3)], vec![IntMatrix::identity(1), IntMatrix::from_rows(&[[0]])]);
        assert!(matches!(bad, Err(FinError::NotAModule(_))));
        // 2 on ℤ/2 → ℤ/4 is well defined, 1 is not.
        let ok = FiniteModule::new(&cyclic(1), vec![z(2), z(4)], vec![IntMatrix::from_rows(&[[1, 0], [0, 1]])]);
        assert!(ok.is_ok());
        let ill = FiniteModule::new(&c2, vec![z(2), z(4)], vec![IntMatrix::identity(2), IntMatrix::from_rows(&[[1, 0], [1, 1]])]);
        assert!(matches!(ill, Err(FinError::NotAModule(_))));
        let m = FiniteModule::permutation(&c2, &[0], z(3)).unwrap();
        assert_eq!(FiniteModule::parse(&c2, &m.to_text()).unwrap(), m);
    }

    #[test]
    fn group_structure() {
        let s3 = corpus::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.cyclic_subgroups().len(), 5);
        assert_eq!(s3.sylow_subgroup(2).len(), 2);
        assert_eq!(s3.sylow_subgroup(3).len(), 3);
        assert_eq!(s3.commutator_subgroup().len(), 3);
        let (q, proj) = s3.quotient(&s3.commutator_subgroup()).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(proj.len(), 6);
        assert_eq!(FiniteGroup::parse(&s3.to_text()).unwrap(), s3);
    }
}
