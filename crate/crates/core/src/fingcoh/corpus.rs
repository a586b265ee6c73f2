//! Multiplication tables of every group of order at most 24, one per isomorphism class.
//!
//! The tables are generated by [`build`] from cyclic, metacyclic, permutation, matrix and
//! (semi)direct product constructions, and bundled as text so that the sweep does not depend
//! on the constructions being right. `cargo run --example write_corpus` regenerates the file.

use super::{FinError, FiniteGroup};

const BUNDLED: &str = include_str!("../../data/small_groups.txt");

/// Number of isomorphism classes of groups of order `n`, for `n = 1..=24`.
pub const GROUP_COUNTS: [usize; 24] = [1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14, 1, 5, 1, 5, 2, 2, 1, 15];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedGroup {
    pub name: String,
    pub group: FiniteGroup,
}

pub fn cyclic(n: usize) -> FiniteGroup {
    FiniteGroup::from_table((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect()).expect("cyclic group")
}

/// `(ℤ/p)ᵏ`.
pub fn elementary_abelian(p: usize, k: usize) -> FiniteGroup {
    (1..k).fold(cyclic(p), |acc, _| acc.direct_product(&cyclic(p)).expect("product"))
}

/// `⟨a, x | aᵐ, xᵏ = aᵗ, x·a·x⁻¹ = aʳ⟩` with `aⁱxʲ` at index `i + m·j`.
pub fn metacyclic(m: usize, k: usize, r: usize, t: usize) -> Result<FiniteGroup, FinError> {
    let rpow: Vec<usize> = (0..k)
        .scan(1usize, |acc, _| {
            let cur = *acc;
            *acc = *acc * r % m;
            Some(cur)
        })
        .collect();
    let n = m * k;
    let table = (0..n)
        .map(|x| {
            let (i, j) = (x % m, x / m);
            (0..n)
                .map(|y| {
                    let (u, v) = (y % m, y / m);
                    let mut a = i + u * rpow[j];
                    let mut b = j + v;
                    if b >= k {
                        b -= k;
                        a += t;
                    }
                    a % m + m * b
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(table)
}

/// Dihedral group of order `2m`.
pub fn dihedral(m: usize) -> FiniteGroup {
    metacyclic(m, 2, m - 1, 0).expect("dihedral group")
}

/// Dicyclic group of order `4q`.
pub fn dicyclic(q: usize) -> FiniteGroup {
    metacyclic(2 * q, 2, 2 * q - 1, q).expect("dicyclic group")
}

fn permutation_group(n: usize, generators: &[Vec<u8>]) -> FiniteGroup {
    let identity: Vec<u8> = (0..n as u8).collect();
    FiniteGroup::generated_by(identity, generators, |a, b| b.iter().map(|&i| a[i as usize]).collect()).expect("permutation group")
}

pub fn symmetric(n: usize) -> FiniteGroup {
    let swap: Vec<u8> = (0..n as u8).map(|i| if i < 2 { 1 - i } else { i }).collect();
    let cycle: Vec<u8> = (0..n as u8).map(|i| (i + 1) % n as u8).collect();
    permutation_group(n, &[swap, cycle])
}

pub fn alternating4() -> FiniteGroup {
    permutation_group(4, &[vec![1, 2, 0, 3], vec![0, 2, 3, 1]])
}

/// `SL(2, 3)` as 2×2 matrices over `𝔽₃`.
pub fn sl2_3() -> FiniteGroup {
    let mul = |a: &[u8; 4], b: &[u8; 4]| {
        [(a[0] * b[0] + a[1] * b[2]) % 3, (a[0] * b[1] + a[1] * b[3]) % 3, (a[2] * b[0] + a[3] * b[2]) % 3, (a[2] * b[1] + a[3] * b[3]) % 3]
    };
    FiniteGroup::generated_by([1, 0, 0, 1], &[[1, 1, 0, 1], [1, 0, 1, 1]], mul).expect("SL(2,3)")
}

fn product(factors: &[FiniteGroup]) -> FiniteGroup {
    factors[1..].iter().fold(factors[0].clone(), |acc, g| acc.direct_product(g).expect("product"))
}

/// `N ⋊ C₂` where the generator acts by the automorphism sending `gens[i]` to `images[i]`.
fn split_by_involution(normal: &FiniteGroup, gens: &[usize], images: &[usize]) -> FiniteGroup {
    let pairs: Vec<(usize, usize)> = gens.iter().copied().zip(images.iter().copied()).collect();
    let phi = normal.extend_homomorphism(normal, &pairs).expect("automorphism");
    FiniteGroup::semidirect_product(normal, &cyclic(2), &[(1, phi)]).expect("semidirect product")
}

/// All 74 groups of order at most 24.
pub fn build() -> Vec<NamedGroup> {
    let c = cyclic;
    let d8 = dihedral(4);
    let q8 = dicyclic(2);
    let s3 = symmetric(3);
    let a4 = alternating4();
    let dic12 = dicyclic(3);
    let c4c2 = product(&[c(4), c(2)]);
    // In C4 × C2 the generators are (1,0) = 2 and (0,1) = 1; (1,1) = 3 and (2,1) = 5.
    let g16_3 = split_by_involution(&c4c2, &[2, 1], &[3, 1]);
    let pauli = split_by_involution(&c4c2, &[2, 1], &[2, 5]);
    // In C3 × C3 the generators are 3 and 1; inversion sends them to 6 and 2.
    let gen_dihedral18 = split_by_involution(&product(&[c(3), c(3)]), &[3, 1], &[6, 2]);
    // D8 acts on C3 through the quotient by its Klein four subgroup ⟨a², x⟩.
    let c3_d8 = FiniteGroup::semidirect_product(&c(3), &d8, &[(1, vec![0, 2, 1]), (4, vec![0, 1, 2])]).expect("C3:D8");

    let mc = |m, k, r, t| metacyclic(m, k, r, t).expect("metacyclic group");
    let entries: Vec<(&str, FiniteGroup)> = vec![
        ("C1", c(1)),
        ("C2", c(2)),
        ("C3", c(3)),
        ("C4", c(4)),
        ("C2xC2", elementary_abelian(2, 2)),
        ("C5", c(5)),
        ("C6", c(6)),
        ("S3", s3.clone()),
        ("C7", c(7)),
        ("C8", c(8)),
        ("C4xC2", c4c2.clone()),
        ("C2xC2xC2", elementary_abelian(2, 3)),
        ("D8", d8.clone()),
        ("Q8", q8.clone()),
        ("C9", c(9)),
        ("C3xC3", elementary_abelian(3, 2)),
        ("C10", c(10)),
        ("D10", dihedral(5)),
        ("C11", c(11)),
        ("C12", c(12)),
        ("C6xC2", product(&[c(6), c(2)])),
        ("A4", a4.clone()),
        ("D12", dihedral(6)),
        ("Dic12", dic12.clone()),
        ("C13", c(13)),
        ("C14", c(14)),
        ("D14", dihedral(7)),
        ("C15", c(15)),
        ("C16", c(16)),
        ("C4xC4", product(&[c(4), c(4)])),
        ("(C4xC2):C2", g16_3),
        ("C4:C4", mc(4, 4, 3, 0)),
        ("C8xC2", product(&[c(8), c(2)])),
        ("M16", mc(8, 2, 5, 0)),
        ("D16", dihedral(8)),
        ("SD16", mc(8, 2, 3, 0)),
        ("Q16", dicyclic(4)),
        ("C4xC2xC2", product(&[c(4), c(2), c(2)])),
        ("C2xD8", product(&[c(2), d8.clone()])),
        ("C2xQ8", product(&[c(2), q8.clone()])),
        ("C4oD8", pauli),
        ("C2^4", elementary_abelian(2, 4)),
        ("C17", c(17)),
        ("C18", c(18)),
        ("C6xC3", product(&[c(6), c(3)])),
        ("D18", dihedral(9)),
        ("C3xS3", product(&[c(3), s3.clone()])),
        ("(C3xC3):C2", gen_dihedral18),
        ("C19", c(19)),
        ("C20", c(20)),
        ("C10xC2", product(&[c(10), c(2)])),
        ("D20", dihedral(10)),
        ("Dic20", dicyclic(5)),
        ("F20", mc(5, 4, 2, 0)),
        ("C21", c(21)),
        ("C7:C3", mc(7, 3, 2, 0)),
        ("C22", c(22)),
        ("D22", dihedral(11)),
        ("C23", c(23)),
        ("C24", c(24)),
        ("C12xC2", product(&[c(12), c(2)])),
        ("C6xC2xC2", product(&[c(6), c(2), c(2)])),
        ("S4", symmetric(4)),
        ("SL(2,3)", sl2_3()),
        ("Dic24", dicyclic(6)),
        ("C3:C8", mc(3, 8, 2, 0)),
        ("C4xS3", product(&[c(4), s3.clone()])),
        ("D24", dihedral(12)),
        ("C2xDic12", product(&[c(2), dic12])),
        ("C3:D8", c3_d8),
        ("C3xD8", product(&[c(3), d8])),
        ("C3xQ8", product(&[c(3), q8])),
        ("C2xA4", product(&[c(2), a4])),
        ("C2xC2xS3", product(&[c(2), c(2), s3])),
    ];
    entries.into_iter().map(|(name, group)| NamedGroup { name: name.to_string(), group }).collect()
}

pub fn render(groups: &[NamedGroup]) -> String {
    groups.iter().map(|g| format!("# {}\n{}", g.name, g.group.to_text())).collect::<Vec<_>>().join("\n")
}

/// Parses the `# name` / table block format written by [`render`].
pub fn parse(text: &str) -> Result<Vec<NamedGroup>, FinError> {
    let mut out = Vec::new();
    for block in text.split("# ").filter(|b| !b.trim().is_empty()) {
        let (name, body) = block.split_once('\n').ok_or_else(|| FinError::Malformed("corpus block without a table".into()))?;
        out.push(NamedGroup { name: name.trim().to_string(), group: FiniteGroup::parse(body)? });
    }
    Ok(out)
}

/// The bundled corpus.
pub fn bundled() -> Vec<NamedGroup> {
    parse(BUNDLED).expect("bundled corpus parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn bundled_matches_constructions() {
        assert_eq!(bundled(), build());
    }

    #[test]
    fn one_group_per_isomorphism_class() {
        let groups = bundled();
        for n in 1..=24 {
            let count = groups.iter().filter(|g| g.group.order() == n).count();
            assert_eq!(count, GROUP_COUNTS[n - 1], "order {n}");
        }
        let invariants: BTreeSet<_> = groups.iter().map(|g| g.group.invariants()).collect();
        assert_eq!(invariants.len(), groups.len(), "two corpus entries are isomorphic");
    }
}
