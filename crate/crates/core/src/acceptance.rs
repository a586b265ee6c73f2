//! The acceptance suite: ten exact, seeded checks with pinned time limits.
//!
//! Shared by the `acceptance` test target and `morita selftest`.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactla::{column_lattice_basis, column_lattices_equal, hnf_basis_contains, smith_normal_form, IntMatrix, Order};
use crate::families::{doubled_pair, doubled_tree, genus_one_cycle, pinwheel_cycle, SideTree};
use crate::fingcoh::{self, corpus, cyclic_restriction_injective, cyclic_witness, h1_finite, restrict_h1};
use crate::morita::{o1_report, o2_report, DoubledTreeModel};
use crate::nilq::{eval_word, reduced_rank, wedge, NilElement};
use crate::stablegraph::tree_involution_check;
use crate::surfcoh::{
    augmentation_lattice, delta, delta_with_lifts, fox_relation_lattice, m_pairing, one_cocycles, surface_relator, Cocycle, ModuleAction,
};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Per-case limit for criterion 1.
pub const CYCLE_CASE_LIMIT: Duration = Duration::from_secs(1);
/// Total limit for criterion 3.
pub const O2_TOTAL_LIMIT: Duration = Duration::from_secs(30);
/// Total limit for criterion 9.
pub const WITNESS_TOTAL_LIMIT: Duration = Duration::from_secs(60);

/// H¹ groups up to this size are enumerated class by class in criterion 9.
const ENUMERATION_LIMIT: u64 = 1024;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub number: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {} ({:.2?}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.number,
            self.title,
            self.elapsed,
            self.detail
        )
    }
}

pub const TITLES: [&str; 10] = [
    "o1 order of the genus-one cycle equals g-1, g = 3..10",
    "o1 vanishes on doubled trees up to surface genus 16",
    "o2 has order exactly 2 on doubled pairs, both engines agree",
    "o1 order of pinwheels divisible by d",
    "delta defect identity on 200 cocycle pairs",
    "delta independent of lifts modulo IW + im m on 100 cases",
    "Fox relation lattice equals the augmentation lattice on 100 actions",
    "nilpotent group axioms, 1000 cases per genus 2..6",
    "cyclic witnesses for every nonzero class over the small-group corpus",
    "Smith normal form on 500 random matrices",
];

type Outcome = Result<String, String>;

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=10).map(|k| run(k, seed)).collect()
}

/// Runs one criterion (numbered 1..=10).
pub fn run(number: u32, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(u64::from(number)));
    let outcome = match number {
        1 => genus_one_cycles(),
        2 => doubled_trees_o1(&mut rng),
        3 => doubled_pairs_o2(),
        4 => pinwheels(),
        5 => defect_identity(&mut rng),
        6 => lift_independence(&mut rng),
        7 => fox_lattice(&mut rng),
        8 => nil_axioms(&mut rng),
        9 => witnesses(seed),
        10 => smith_forms(&mut rng),
        _ => Err(format!("no criterion {number}")),
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult {
        number,
        title: TITLES.get(number as usize - 1).copied().unwrap_or("unknown"),
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn genus_one_cycles() -> Outcome {
    let mut slowest = Duration::ZERO;
    for g in 3..=10usize {
        let start = Instant::now();
        let (graph, sigma) = genus_one_cycle(g - 1, 1);
        let report = o1_report(&graph, &sigma, None).map_err(|e| format!("g = {g}: {e}"))?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        ensure(report.order == Order::Finite(BigInt::from(g - 1)), || format!("g = {g}: order {}", report.order))?;
        ensure(elapsed < CYCLE_CASE_LIMIT, || format!("g = {g} took {elapsed:.2?}"))?;
    }
    Ok(format!("orders 2..9 exact, slowest case {slowest:.2?}"))
}

fn doubled_trees_o1(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases: Vec<SideTree> = Vec::new();
    for g in 1..=8 {
        cases.push(SideTree::single(g));
    }
    cases.push(SideTree::path(&[1, 1, 1, 1, 1, 1, 1, 1]));
    for _ in 0..24 {
        cases.push(SideTree::random(rng, 8));
    }
    let mut max_genus = 0;
    for (k, side) in cases.iter().enumerate() {
        let ell0 = 1 + (k as u64 % 3);
        let (graph, sigma) = doubled_tree(side, ell0);
        ensure(tree_involution_check(&graph, &sigma), || format!("case {k} is not a doubled tree"))?;
        let report = o1_report(&graph, &sigma, None).map_err(|e| format!("case {k}: {e}"))?;
        ensure(report.order.is_one(), || format!("case {k} (side genera {:?}): order {}", side.genera, report.order))?;
        max_genus = max_genus.max(2 * side.genus());
    }
    ensure(max_genus == 16, || format!("largest surface genus reached was {max_genus}"))?;
    Ok(format!("{} doubled trees, surface genus up to {max_genus}", cases.len()))
}

fn doubled_pairs_o2() -> Outcome {
    let start = Instant::now();
    let mut orders = Vec::new();
    for g in 1..=4u32 {
        let (graph, sigma) = doubled_pair(g, 1);
        let report = o2_report(&graph, &sigma).map_err(|e| format!("g = {g}: {e}"))?;
        let two = Order::Finite(BigInt::from(2));
        ensure(report.shortcut.order == two && report.generic.order == two, || {
            format!("g = {g}: shortcut {} generic {}", report.shortcut.order, report.generic.order)
        })?;
        ensure(report.shortcut.invariant_factors == report.generic.invariant_factors, || format!("g = {g}: invariant factors differ"))?;
        orders.push(format!("Sigma_{}: 2", 2 * g));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < O2_TOTAL_LIMIT, || format!("took {elapsed:.2?}"))?;
    Ok(orders.join(", "))
}

fn pinwheels() -> Outcome {
    let mut seen = Vec::new();
    for d in 2..=6usize {
        for q in 1..=2u32 {
            let (graph, sigma) = pinwheel_cycle(d, q, 1);
            let report = o1_report(&graph, &sigma, None).map_err(|e| format!("d = {d}, q = {q}: {e}"))?;
            ensure(report.order.is_divisible_by(&BigInt::from(d)), || format!("d = {d}, q = {q}: order {}", report.order))?;
            seen.push(format!("{d}/{q}:{}", report.order));
        }
    }
    Ok(format!("d/q:order {}", seen.join(" ")))
}

/// Doubled-tree models used by the cohomological criteria: pairs of genus 1, 2 and two small trees.
fn doubled_models(rng: &mut ChaCha8Rng) -> Result<Vec<DoubledTreeModel>, String> {
    let mut sides = vec![SideTree::single(1), SideTree::single(2), SideTree::path(&[1, 1])];
    sides.push(SideTree::random(rng, 2));
    sides
        .iter()
        .enumerate()
        .map(|(k, side)| {
            let (graph, sigma) = doubled_tree(side, 1 + k as u64 % 2);
            DoubledTreeModel::new(&graph, &sigma).map_err(|e| e.to_string())
        })
        .collect()
}

fn random_cocycle(rng: &mut ChaCha8Rng, basis: &[Cocycle]) -> Cocycle {
    let n = basis[0].phi_e.len();
    basis.iter().fold(Cocycle::zero(n), |acc, b| {
        let k = rng.gen_range(-3..=3);
        acc.add(&Cocycle { phi_e: b.phi_e.iter().map(|x| x * k).collect(), phi_f: b.phi_f.iter().map(|x| x * k).collect() })
    })
}

fn difference(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn defect_identity(rng: &mut ChaCha8Rng) -> Outcome {
    let models = doubled_models(rng)?;
    let mut nonzero_m = 0;
    for case in 0..200 {
        let model = &models[case % models.len()];
        let h = model.h_action();
        let iw = column_lattice_basis(&augmentation_lattice(&model.w_action()));
        let basis = one_cocycles(&h).map_err(|e| e.to_string())?.basis();
        let (phi, psi) = (random_cocycle(rng, &basis), random_cocycle(rng, &basis));
        let d = |c: &Cocycle| delta(c, &h, &model.s_lift, &model.t_lift).map_err(|e| e.to_string());
        let m = m_pairing(&phi, &psi, &h, model.genus).map_err(|e| e.to_string())?;
        let lhs = difference(&difference(&d(&phi.add(&psi))?, &d(&phi)?), &d(&psi)?);
        ensure(hnf_basis_contains(&iw, &difference(&lhs, &m)), || format!("case {case}: defect differs from m"))?;
        if !hnf_basis_contains(&iw, &m) {
            nonzero_m += 1;
        }
    }
    Ok(format!("200 pairs, m nonzero in W_G for {nonzero_m}"))
}

fn random_central(rng: &mut ChaCha8Rng, genus: usize) -> NilElement {
    NilElement::central(genus, (0..reduced_rank(genus)).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect())
}

fn lift_independence(rng: &mut ChaCha8Rng) -> Outcome {
    let models = doubled_models(rng)?;
    let mut moved = 0;
    for case in 0..100 {
        let model = &models[case % models.len()];
        let h = model.h_action();
        let basis = one_cocycles(&h).map_err(|e| e.to_string())?.basis();
        let mut generators = augmentation_lattice(&model.w_action()).columns();
        for phi in &basis {
            for psi in &basis {
                generators.push(m_pairing(phi, psi, &h, model.genus).map_err(|e| e.to_string())?);
            }
        }
        let lattice = column_lattice_basis(&IntMatrix::from_columns(reduced_rank(model.genus), &generators).map_err(|e| e.to_string())?);
        let phi = random_cocycle(rng, &basis);
        let base = delta(&phi, &h, &model.s_lift, &model.t_lift).map_err(|e| e.to_string())?;
        let e = NilElement::lift(model.genus, &phi.phi_e).mul(&random_central(rng, model.genus));
        let f = NilElement::lift(model.genus, &phi.phi_f).mul(&random_central(rng, model.genus));
        let changed = delta_with_lifts(&e, &f, &h, &model.s_lift, &model.t_lift).map_err(|e| e.to_string())?;
        let diff = difference(&changed, &base);
        ensure(hnf_basis_contains(&lattice, &diff), || format!("case {case}: lift change leaves IW + im m"))?;
        if diff.iter().any(|x| !x.is_zero()) {
            moved += 1;
        }
    }
    Ok(format!("100 lift changes, {moved} moved delta by a nonzero vector"))
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            let c = BigInt::from(rng.gen_range(-2..=2));
            for col in 0..n {
                let x = m.get(i, col) + &c * m.get(j, col);
                m.set(i, col, x);
            }
        } else if rng.gen_bool(0.3) {
            for col in 0..n {
                let x = -m.get(i, col);
                m.set(i, col, x);
            }
        }
    }
    m
}

/// Two commuting unimodular matrices: conjugates of powers of one matrix, times signs.
fn commuting_pair(rng: &mut ChaCha8Rng, n: usize) -> (IntMatrix, IntMatrix) {
    let p = random_unimodular(rng, n);
    let base = random_unimodular(rng, n);
    let sign = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { BigInt::one() } else { -BigInt::one() };
    let a = base.pow(rng.gen_range(0..=2)).scale(&sign(rng));
    let b = base.pow(rng.gen_range(0..=2)).scale(&sign(rng));
    let inv = p.unimodular_inverse().expect("unimodular");
    (p.mul(&a).mul(&inv), p.mul(&b).mul(&inv))
}

fn fox_lattice(rng: &mut ChaCha8Rng) -> Outcome {
    let mut genus_two = 0;
    for case in 0..100 {
        let n = rng.gen_range(1..=6);
        let generators = if case % 2 == 0 {
            let (t, s) = commuting_pair(rng, n);
            vec![t, s]
        } else {
            genus_two += 1;
            if rng.gen_bool(0.5) {
                let (a, b) = (random_unimodular(rng, n), random_unimodular(rng, n));
                vec![a.clone(), b.clone(), b, a]
            } else {
                let (a, b) = commuting_pair(rng, n);
                let (c, d) = commuting_pair(rng, n);
                vec![a, b, c, d]
            }
        };
        let action = ModuleAction::new(generators).map_err(|e| format!("case {case}: {e}"))?;
        ensure(column_lattices_equal(&fox_relation_lattice(&action), &augmentation_lattice(&action)), || {
            format!("case {case}: lattices differ")
        })?;
    }
    Ok(format!("100 actions ({} at h = 1, {genus_two} at h = 2)", 100 - genus_two))
}

fn random_element(rng: &mut ChaCha8Rng, genus: usize) -> NilElement {
    NilElement {
        genus,
        h: (0..2 * genus).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect(),
        w: (0..reduced_rank(genus)).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect(),
    }
}

fn nil_axioms(rng: &mut ChaCha8Rng) -> Outcome {
    for genus in 2..=6usize {
        let relator = surface_relator(genus);
        ensure(eval_word(&relator, genus).map_err(|e| e.to_string())?.is_identity(), || format!("relator nontrivial at genus {genus}"))?;
        let id = NilElement::identity(genus);
        for case in 0..1000 {
            let (x, y, z) = (random_element(rng, genus), random_element(rng, genus), random_element(rng, genus));
            ensure(x.mul(&y).mul(&z) == x.mul(&y.mul(&z)), || format!("genus {genus} case {case}: associativity"))?;
            ensure(x.mul(&x.inverse()) == id && x.inverse().mul(&x) == id, || format!("genus {genus} case {case}: inverse"))?;
            let commutator = x.mul(&y).mul(&x.inverse()).mul(&y.inverse());
            ensure(commutator == NilElement::central(genus, wedge(genus, &x.h, &y.h)), || {
                format!("genus {genus} case {case}: commutator law")
            })?;
            // The relator conjugated by a random word still evaluates to the identity.
            let len = rng.gen_range(0..6);
            let word: Vec<i32> = (0..len)
                .map(|_| {
                    let k = rng.gen_range(1..=2 * genus as i32);
                    if rng.gen_bool(0.5) {
                        k
                    } else {
                        -k
                    }
                })
                .collect();
            let inverse_word: Vec<i32> = word.iter().rev().map(|k| -k).collect();
            let conjugated: Vec<i32> = word.iter().chain(&relator).chain(&inverse_word).copied().collect();
            ensure(eval_word(&conjugated, genus).map_err(|e| e.to_string())?.is_identity(), || {
                format!("genus {genus} case {case}: conjugated relator")
            })?;
        }
    }
    Ok("5000 cases".into())
}

fn witnesses(seed: u64) -> Outcome {
    let start = Instant::now();
    let groups = corpus::bundled();
    let (mut modules, mut nonzero_h1, mut classes, mut sampled) = (0usize, 0usize, 0u64, 0u64);
    for (index, named) in groups.iter().enumerate() {
        let group = &named.group;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index as u64 + 1)));
        for k in 0..20 {
            let module = fingcoh::random_p_module(group, &mut rng, 6);
            let tag = || format!("{} module {k}", named.name);
            let h1 = h1_finite(group, &module).map_err(|e| format!("{}: {e}", tag()))?;
            modules += 1;
            if h1.is_trivial() {
                continue;
            }
            nonzero_h1 += 1;
            let complete = cyclic_restriction_injective(group, &module, &h1).map_err(|e| format!("{}: {e}", tag()))?;
            ensure(complete, || format!("{}: some nonzero class restricts to zero on every cyclic subgroup", tag()))?;
            let size = h1.cardinality();
            let to_check: Vec<Vec<BigInt>> = if size <= BigInt::from(ENUMERATION_LIMIT) {
                h1.classes()
            } else {
                sampled += 1;
                (0..64).map(|_| h1.random_class(&mut rng)).collect()
            };
            for (c, class) in to_check.iter().enumerate() {
                if h1.is_zero(class) {
                    continue;
                }
                classes += 1;
                let witness = cyclic_witness(group, &module, &h1, class).map_err(|e| format!("{}: {e}", tag()))?;
                if c < 4 {
                    let restricted = restrict_h1(group, &module, &h1, class, &witness.elements).map_err(|e| format!("{}: {e}", tag()))?;
                    ensure(!restricted.is_zero(), || format!("{}: witness restriction vanishes", tag()))?;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < WITNESS_TOTAL_LIMIT, || format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "{} groups, {modules} modules, {nonzero_h1} with nonzero H1, {classes} classes witnessed ({sampled} large H1 sampled, all proven by the kernel check)",
        groups.len()
    ))
}

fn smith_forms(rng: &mut ChaCha8Rng) -> Outcome {
    let mut rank_deficient = 0;
    for case in 0..500 {
        let (rows, cols) = (rng.gen_range(1..=10), rng.gen_range(1..=10));
        let m = if case % 3 == 0 {
            // Product through a narrow middle dimension forces small rank.
            let k = rng.gen_range(1..=rows.min(cols));
            let a = random_matrix(rng, rows, k, 6);
            let b = random_matrix(rng, k, cols, 6);
            a.mul(&b)
        } else {
            random_matrix(rng, rows, cols, 50)
        };
        let (d, u, v) = smith_normal_form(&m);
        ensure(u.mul(&m).mul(&v) == d, || format!("case {case}: U·M·V differs from D"))?;
        ensure(u.is_unimodular() && v.is_unimodular(), || format!("case {case}: transform not unimodular"))?;
        let diag: Vec<BigInt> = (0..rows.min(cols)).map(|i| d.get(i, i).clone()).collect();
        for i in 0..rows {
            for j in 0..cols {
                ensure(i == j || d.get(i, j).is_zero(), || format!("case {case}: D not diagonal"))?;
            }
        }
        ensure(diag.iter().all(|x| !x.is_negative()), || format!("case {case}: negative invariant factor"))?;
        for w in diag.windows(2) {
            let divides = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
            ensure(divides, || format!("case {case}: {} does not divide {}", w[0], w[1]))?;
        }
        if diag.iter().any(Zero::is_zero) {
            rank_deficient += 1;
        }
    }
    Ok(format!("500 matrices, {rank_deficient} rank deficient"))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
    IntMatrix::from_rows(&data)
}
