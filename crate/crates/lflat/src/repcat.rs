//! Group representations over ℚ with ε-symmetric duality structures.
//!
//! A representation is a list of invertible matrices for abstract generators
//! (relations optional, verified when supplied). On top of that this module
//! builds: the hat representation on F ⊕ F*, endomorphism algebras,
//! finite-group closure, invariant-form averaging, a meataxe-style splitter,
//! and the real/complex/quaternionic type classification.
//!
//! Everything is exact. Irreducibility certificates produced by the meataxe
//! are heuristic over ℚ (random group-algebra elements and eigenspace
//! splittings, exhausted per the configured policy); the classifier only
//! commits to a type when such a certificate is present, otherwise it reports
//! `Reducible` or `Undecided`.

use crate::exactla::{kernel, rat, Rational, RationalMatrix, Subspace};
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("generator {0} is singular")]
    SingularGenerator(String),
    #[error("relation {0} does not evaluate to the identity")]
    BrokenRelation(usize),
    #[error("duality matrix must satisfy qᵀ = (−1)^ε q (ε = {0})")]
    BadDualitySymmetry(u8),
    #[error("duality matrix is singular")]
    SingularDuality,
    #[error("duality is not invariant under generator {0}")]
    NotInvariant(String),
    #[error("group closure exceeded cap of {0} elements; group is possibly infinite")]
    PossiblyInfinite(usize),
    #[error("antisymmetric invertible duality needs even dimension, got {0}")]
    OddSymplectic(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
}

/// Element of ℤ₂ grading the symmetry of duality structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Epsilon(pub u8);

impl Epsilon {
    pub const SYMMETRIC: Epsilon = Epsilon(0);
    pub const ANTISYMMETRIC: Epsilon = Epsilon(1);

    pub fn add(self, other: Epsilon) -> Epsilon {
        Epsilon((self.0 + other.0) % 2)
    }

    /// (−1)^ε as a rational.
    pub fn sign(self) -> Rational {
        if self.0 == 0 {
            rat(1)
        } else {
            rat(-1)
        }
    }
}

/// Parity ε_n = [n(n−1)/2] mod 2 governing pushforward grading shifts.
pub fn epsilon_n(n: usize) -> Epsilon {
    Epsilon(((n * n.saturating_sub(1)) / 2 % 2) as u8)
}

/// Word in abstract generators: list of (generator index, exponent).
pub type Word = Vec<(usize, i32)>;

#[derive(Clone, Debug)]
pub struct MatrixGroupRep {
    pub generator_names: Vec<String>,
    pub generators: Vec<RationalMatrix>,
    pub relations: Vec<Word>,
    pub dim: usize,
}

impl MatrixGroupRep {
    pub fn new(
        generator_names: Vec<String>,
        generators: Vec<RationalMatrix>,
        relations: Vec<Word>,
    ) -> Result<Self, RepError> {
        assert_eq!(generator_names.len(), generators.len());
        let dim = generators.first().map_or(0, |g| g.rows());
        for (name, g) in generator_names.iter().zip(&generators) {
            if g.rows() != dim || g.cols() != dim {
                return Err(RepError::Dimension(format!(
                    "generator {name} is {}x{}, expected {dim}x{dim}",
                    g.rows(),
                    g.cols()
                )));
            }
            if g.inverse().is_none() {
                return Err(RepError::SingularGenerator(name.clone()));
            }
        }
        let rep = MatrixGroupRep {
            generator_names,
            generators,
            relations,
            dim,
        };
        for (i, w) in rep.relations.iter().enumerate() {
            if rep.evaluate_word(w) != RationalMatrix::identity(dim) {
                return Err(RepError::BrokenRelation(i));
            }
        }
        Ok(rep)
    }

    /// Representation of the trivial group on ℚ^dim.
    pub fn trivial(dim: usize) -> Self {
        MatrixGroupRep {
            generator_names: Vec::new(),
            generators: Vec::new(),
            relations: Vec::new(),
            dim,
        }
    }

    pub fn evaluate_word(&self, w: &Word) -> RationalMatrix {
        let mut acc = RationalMatrix::identity(self.dim);
        for &(g, e) in w {
            let m = if e >= 0 {
                self.generators[g].clone()
            } else {
                self.generators[g].inverse().expect("generator invertible")
            };
            for _ in 0..e.unsigned_abs() {
                acc = m.mul(&acc);
            }
        }
        acc
    }

    /// Generator-wise conjugation ρ(g) ↦ A ρ(g) A⁻¹.
    pub fn conjugate(&self, a: &RationalMatrix) -> MatrixGroupRep {
        let ainv = a.inverse().expect("conjugating matrix must be invertible");
        MatrixGroupRep {
            generator_names: self.generator_names.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| a.mul(g).mul(&ainv))
                .collect(),
            relations: self.relations.clone(),
            dim: self.dim,
        }
    }

    /// Block sum with another representation of the same abstract group.
    pub fn direct_sum(&self, other: &MatrixGroupRep) -> MatrixGroupRep {
        assert_eq!(
            self.generator_names, other.generator_names,
            "direct sum needs representations of the same group"
        );
        MatrixGroupRep {
            generator_names: self.generator_names.clone(),
            generators: self
                .generators
                .iter()
                .zip(&other.generators)
                .map(|(a, b)| a.block_diag(b))
                .collect(),
            relations: self.relations.clone(),
            dim: self.dim + other.dim,
        }
    }

    /// Generator-wise Kronecker product.
    pub fn tensor(&self, other: &MatrixGroupRep) -> MatrixGroupRep {
        assert_eq!(
            self.generator_names, other.generator_names,
            "tensor needs representations of the same group"
        );
        MatrixGroupRep {
            generator_names: self.generator_names.clone(),
            generators: self
                .generators
                .iter()
                .zip(&other.generators)
                .map(|(a, b)| a.kronecker(b))
                .collect(),
            relations: self.relations.clone(),
            dim: self.dim * other.dim,
        }
    }

    /// Restriction to an invariant subspace, in the subspace basis.
    pub fn restrict(&self, sub: &Subspace) -> MatrixGroupRep {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let img = g.mul(sub.basis());
                sub.basis()
                    .solve(&img)
                    .expect("subspace must be invariant")
            })
            .collect();
        MatrixGroupRep {
            generator_names: self.generator_names.clone(),
            generators: gens,
            relations: self.relations.clone(),
            dim: sub.dim(),
        }
    }

    pub fn is_invariant(&self, sub: &Subspace) -> bool {
        self.generators
            .iter()
            .all(|g| sub.contains(&sub.map_by(g)))
    }
}

/// ε-symmetric duality structure q : F → F*, stored as an invertible matrix
/// with qᵀ = (−1)^ε q.
#[derive(Clone, Debug)]
pub struct DualityStructure {
    pub epsilon: Epsilon,
    pub q: RationalMatrix,
}

impl DualityStructure {
    pub fn new(epsilon: Epsilon, q: RationalMatrix) -> Result<Self, RepError> {
        let sym_ok = match epsilon.0 {
            0 => q.is_symmetric(),
            _ => q.is_antisymmetric(),
        };
        if !sym_ok {
            return Err(RepError::BadDualitySymmetry(epsilon.0));
        }
        if q.rows() > 0 && q.inverse().is_none() {
            return Err(RepError::SingularDuality);
        }
        Ok(DualityStructure { epsilon, q })
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    /// Check ρ(g)ᵀ q ρ(g) = q for every generator; reports the offender.
    pub fn validate_invariance(&self, rep: &MatrixGroupRep) -> Result<(), RepError> {
        for (name, g) in rep.generator_names.iter().zip(&rep.generators) {
            if g.transpose().mul(&self.q).mul(g) != self.q {
                return Err(RepError::NotInvariant(name.clone()));
            }
        }
        Ok(())
    }

    pub fn negate(&self) -> DualityStructure {
        DualityStructure {
            epsilon: self.epsilon,
            q: self.q.neg(),
        }
    }
}

/// Kind reported by the type classifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepKind {
    Real,
    Complex,
    Quaternionic,
    Reducible,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RepTypeResult {
    pub kind: RepKind,
    pub end_dim: usize,
}

/// BFS closure of the generated matrix group; errors past `cap` elements.
pub fn group_closure(
    generators: &[RationalMatrix],
    cap: usize,
) -> Result<Vec<RationalMatrix>, RepError> {
    let dim = generators.first().map_or(0, |g| g.rows());
    let id = RationalMatrix::identity(dim);
    let mut seen: HashMap<RationalMatrix, usize> = HashMap::new();
    let mut order: Vec<RationalMatrix> = Vec::new();
    seen.insert(id.clone(), 0);
    order.push(id);
    let mut frontier = 0usize;
    while frontier < order.len() {
        let current = order[frontier].clone();
        frontier += 1;
        for g in generators {
            let next = g.mul(&current);
            if !seen.contains_key(&next) {
                if order.len() >= cap {
                    return Err(RepError::PossiblyInfinite(cap));
                }
                seen.insert(next.clone(), order.len());
                order.push(next);
            }
        }
    }
    Ok(order)
}

pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

/// The representation (F̂, ρ̂) of Ĝ = G × ℤ₂ on F ⊕ F*:
/// ρ̂(g,0) = ρ(g) ⊕ ρ(g⁻¹)ᵀ and ρ̂(1,1) the block antidiagonal of q⁻¹ and q.
///
/// The construction verifies that the extra generator squares to the identity
/// and commutes with every ρ̂(g,0) (which is exactly invariance of q), and
/// that the block consistency q⁻¹·qᵀ = (−1)^ε holds.
pub fn hat_rep(
    rep: &MatrixGroupRep,
    dual: &DualityStructure,
) -> Result<MatrixGroupRep, RepError> {
    dual.validate_invariance(rep)?;
    let n = rep.dim;
    let qinv = dual.q.inverse().ok_or(RepError::SingularDuality)?;
    let mut names = rep.generator_names.clone();
    names.push("duality_swap".to_string());
    let mut gens: Vec<RationalMatrix> = rep
        .generators
        .iter()
        .map(|g| {
            let ginv_t = g.inverse().expect("invertible").transpose();
            g.block_diag(&ginv_t)
        })
        .collect();
    let mut j = RationalMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            j.set(r, n + c, qinv.at(r, c).clone());
            j.set(n + r, c, dual.q.at(r, c).clone());
        }
    }
    // q⁻¹ qᵀ = (−1)^ε, the block-level shadow of ρ̂(1,1)² within the formula
    debug_assert_eq!(
        qinv.mul(&dual.q.transpose()),
        RationalMatrix::identity(n).scale(&dual.epsilon.sign())
    );
    if j.mul(&j) != RationalMatrix::identity(2 * n) {
        return Err(RepError::BadDualitySymmetry(dual.epsilon.0));
    }
    for (name, g) in names.iter().zip(&gens) {
        if g.mul(&j) != j.mul(g) {
            return Err(RepError::NotInvariant(name.clone()));
        }
    }
    gens.push(j);
    MatrixGroupRep::new(names, gens, Vec::new())
}

/// Basis of the solution space of ρ(g)X = Xρ(g) for all generators, arranged
/// so the identity matrix is the first basis element.
pub fn endomorphism_algebra(rep: &MatrixGroupRep) -> Vec<RationalMatrix> {
    let n = rep.dim;
    if n == 0 {
        return Vec::new();
    }
    // row-major vec: vec(AX) = (A ⊗ I) vec X, vec(XB) = (I ⊗ Bᵀ) vec X
    let eye = RationalMatrix::identity(n);
    let mut blocks: Vec<RationalMatrix> = Vec::new();
    for g in &rep.generators {
        blocks.push(g.kronecker(&eye).sub(&eye.kronecker(&g.transpose())));
    }
    let stacked = if blocks.is_empty() {
        RationalMatrix::zeros(0, n * n)
    } else {
        let mut acc = blocks[0].clone();
        for b in &blocks[1..] {
            acc = acc.vstack(b);
        }
        acc
    };
    let ker = kernel(&stacked);
    // re-pivot so vec(identity) leads the basis
    let id_vec: Vec<Rational> = (0..n * n)
        .map(|k| {
            if k / n == k % n {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let mut span = crate::exactla::IncrementalSpan::new(n * n);
    span.insert(&id_vec);
    let mut picked = vec![id_vec];
    for j in 0..ker.dim() {
        let col = ker.basis().column(j);
        if span.insert(&col) {
            picked.push(col);
        }
    }
    picked
        .into_iter()
        .map(|v| RationalMatrix::from_fn(n, n, |i, j| v[i * n + j].clone()))
        .collect()
}

/// Basis of the space of intertwiners X : V_a → V_b (ρ_b(g) X = X ρ_a(g)).
pub fn hom_space(a: &MatrixGroupRep, b: &MatrixGroupRep) -> Vec<RationalMatrix> {
    assert_eq!(a.generator_names, b.generator_names);
    let (na, nb) = (a.dim, b.dim);
    if na == 0 || nb == 0 {
        return Vec::new();
    }
    let eye_a = RationalMatrix::identity(na);
    let eye_b = RationalMatrix::identity(nb);
    let mut blocks: Vec<RationalMatrix> = Vec::new();
    for (ga, gb) in a.generators.iter().zip(&b.generators) {
        // X is nb × na, vec row-major: vec(G_b X) = (G_b ⊗ I_na) v, vec(X G_a) = (I_nb ⊗ G_aᵀ) v
        blocks.push(
            gb.kronecker(&eye_a)
                .sub(&eye_b.kronecker(&ga.transpose())),
        );
    }
    let stacked = if blocks.is_empty() {
        RationalMatrix::zeros(0, na * nb)
    } else {
        let mut acc = blocks[0].clone();
        for bl in &blocks[1..] {
            acc = acc.vstack(bl);
        }
        acc
    };
    let ker = kernel(&stacked);
    (0..ker.dim())
        .map(|j| {
            let v = ker.basis().column(j);
            RationalMatrix::from_fn(nb, na, |i, k| v[i * na + k].clone())
        })
        .collect()
}

/// Search a matrix space for an invertible element by deterministic grid
/// enumeration, exact by the degree bound: det restricted to the span has
/// total degree ≤ n, so vanishing on {0..n}^d forces it to vanish identically.
pub fn invertible_in_span(basis: &[RationalMatrix]) -> Option<RationalMatrix> {
    if basis.is_empty() {
        return None;
    }
    let n = basis[0].rows();
    if n == 0 {
        return Some(RationalMatrix::zeros(0, 0));
    }
    // cheap first passes: single elements, then pairwise sums
    for b in basis {
        if b.inverse().is_some() {
            return Some(b.clone());
        }
    }
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            let cand = basis[i].add(&basis[j]);
            if cand.inverse().is_some() {
                return Some(cand);
            }
        }
    }
    // full grid {0..n}^d
    let d = basis.len();
    let mut idx = vec![0usize; d];
    loop {
        let mut cand = RationalMatrix::zeros(n, n);
        for (k, b) in basis.iter().enumerate() {
            if idx[k] > 0 {
                cand = cand.add(&b.scale(&rat(idx[k] as i64)));
            }
        }
        if !cand.is_zero() && cand.inverse().is_some() {
            return Some(cand);
        }
        // odometer increment
        let mut carry = 0;
        loop {
            if carry == d {
                return None;
            }
            idx[carry] += 1;
            if idx[carry] > n {
                idx[carry] = 0;
                carry += 1;
            } else {
                break;
            }
        }
    }
}

/// Invertible intertwiner between two representations, if one exists.
pub fn isomorphism_between(
    a: &MatrixGroupRep,
    b: &MatrixGroupRep,
) -> Option<RationalMatrix> {
    if a.dim != b.dim {
        return None;
    }
    let homs = hom_space(a, b);
    invertible_in_span(&homs)
}

/// Average gᵀ S g over the group closure for S in a basis of (anti)symmetric
/// matrices; returns an invertible invariant form if the invariant space
/// contains one, `None` if it provably does not.
pub fn average_invariant_form(
    rep: &MatrixGroupRep,
    epsilon: Epsilon,
    closure_cap: usize,
) -> Result<Option<DualityStructure>, RepError> {
    let n = rep.dim;
    let elements = if rep.generators.is_empty() {
        vec![RationalMatrix::identity(n)]
    } else {
        group_closure(&rep.generators, closure_cap)?
    };
    // basis of (anti)symmetric matrices
    let mut seeds: Vec<RationalMatrix> = Vec::new();
    for i in 0..n {
        for j in i..n {
            if epsilon.0 == 1 && i == j {
                continue;
            }
            let mut s = RationalMatrix::zeros(n, n);
            s.set(i, j, Rational::one());
            if i != j {
                s.set(j, i, epsilon.sign());
            }
            seeds.push(s);
        }
    }
    let mut averaged: Vec<RationalMatrix> = Vec::new();
    for s in &seeds {
        let mut acc = RationalMatrix::zeros(n, n);
        for g in &elements {
            acc = acc.add(&g.transpose().mul(s).mul(g));
        }
        if !acc.is_zero() {
            averaged.push(acc);
        }
    }
    // reduce to an independent spanning set of the invariant space
    let vecs: Vec<Vec<Rational>> = averaged
        .iter()
        .map(|m| (0..n * n).map(|k| m.at(k / n, k % n).clone()).collect())
        .collect();
    let span = Subspace::from_columns(RationalMatrix::from_columns(
        n * n,
        vecs,
    ));
    let basis: Vec<RationalMatrix> = (0..span.dim())
        .map(|j| {
            let v = span.basis().column(j);
            RationalMatrix::from_fn(n, n, |i, k| v[i * n + k].clone())
        })
        .collect();
    match invertible_in_span(&basis) {
        Some(q) => Ok(Some(DualityStructure::new(epsilon, q)?)),
        None => Ok(None),
    }
}

/// Outcome of a meataxe run.
#[derive(Clone, Debug)]
pub enum MeataxeOutcome {
    /// A proper nonzero invariant subspace.
    Proper(Subspace),
    /// No splitting found after exhausting the policy. Heuristic over ℚ,
    /// exact for dim ≤ 2 and for end_dim = 1 with finite image.
    Irreducible,
    /// Budget exhausted before the policy completed.
    Undecided,
}

#[derive(Clone, Copy, Debug)]
pub struct MeataxeConfig {
    /// Random group-algebra/endomorphism combinations to try.
    pub random_budget: usize,
    pub seed: u64,
}

impl Default for MeataxeConfig {
    fn default() -> Self {
        MeataxeConfig {
            random_budget: 64,
            seed: 0,
        }
    }
}

/// Smallest invariant subspace containing `v`.
pub fn spin(rep: &MatrixGroupRep, v: &[Rational]) -> Subspace {
    let n = rep.dim;
    let mut space = Subspace::from_columns(RationalMatrix::from_columns(n, vec![v.to_vec()]));
    loop {
        let mut grown = space.clone();
        for g in &rep.generators {
            grown = crate::exactla::sum(&grown, &space.map_by(g)).expect("same ambient");
        }
        if grown.dim() == space.dim() {
            return space;
        }
        space = grown;
    }
}

/// Minimal polynomial coefficients (monic, low degree first) of a square matrix.
pub fn minimal_polynomial(m: &RationalMatrix) -> Vec<Rational> {
    let n = m.rows();
    let mut powers: Vec<RationalMatrix> = vec![RationalMatrix::identity(n)];
    loop {
        let vecs: Vec<Vec<Rational>> = powers
            .iter()
            .map(|p| (0..n * n).map(|k| p.at(k / n, k % n).clone()).collect())
            .collect();
        let mat = RationalMatrix::from_columns(n * n, vecs);
        if mat.rank() < powers.len() {
            // the last power is dependent on the previous ones
            let prev = RationalMatrix::from_columns(
                n * n,
                powers[..powers.len() - 1]
                    .iter()
                    .map(|p| (0..n * n).map(|k| p.at(k / n, k % n).clone()).collect())
                    .collect(),
            );
            let target = RationalMatrix::from_columns(
                n * n,
                vec![powers
                    .last()
                    .map(|p| (0..n * n).map(|k| p.at(k / n, k % n).clone()).collect())
                    .unwrap()],
            );
            let sol = prev.solve(&target).expect("dependence established");
            let mut coeffs: Vec<Rational> =
                (0..powers.len() - 1).map(|i| -sol.at(i, 0).clone()).collect();
            coeffs.push(Rational::one());
            return coeffs;
        }
        powers.push(powers.last().unwrap().mul(m));
    }
}

/// Rational roots of a polynomial with rational coefficients (monic or not).
fn rational_roots(coeffs: &[Rational]) -> Vec<Rational> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    // clear denominators
    let mut den = BigInt::one();
    for c in coeffs {
        den = den.clone() / den.gcd(c.denom()) * c.denom();
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    let deg = match ints.iter().rposition(|c| !c.is_zero()) {
        Some(d) => d,
        None => return Vec::new(),
    };
    let low = match ints.iter().position(|c| !c.is_zero()) {
        Some(l) => l,
        None => return Vec::new(),
    };
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(Rational::zero());
    }
    let a0 = ints[low].clone();
    let an = ints[deg].clone();
    let divisors = |x: &BigInt| -> Vec<BigInt> {
        let mut ds = Vec::new();
        let ax = x.magnitude().clone();
        let mut d = num_bigint::BigUint::from(1u32);
        // trial division is fine: desk-scale coefficients
        while &d * &d <= ax {
            if (&ax % &d).is_zero() {
                ds.push(BigInt::from(d.clone()));
                ds.push(BigInt::from(&ax / &d));
            }
            d += 1u32;
        }
        ds
    };
    let eval = |r: &Rational| -> Rational {
        let mut acc = Rational::zero();
        for c in coeffs.iter().rev() {
            acc = acc * r + c;
        }
        acc
    };
    for p in divisors(&a0) {
        for q in divisors(&an) {
            for sign in [1i64, -1] {
                let cand = Rational::new(p.clone() * BigInt::from(sign), q.clone());
                if eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand.clone());
                }
            }
        }
    }
    roots
}

fn poly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let trim = |v: &[Rational]| -> Vec<Rational> {
        let d = v.iter().rposition(|c| !c.is_zero());
        match d {
            Some(d) => v[..=d].to_vec(),
            None => Vec::new(),
        }
    };
    let mut x = trim(a);
    let mut y = trim(b);
    while !y.is_empty() {
        // x mod y
        let mut r = x.clone();
        while r.len() >= y.len() && !r.is_empty() {
            let f = r.last().unwrap() / y.last().unwrap();
            let shift = r.len() - y.len();
            for (i, c) in y.iter().enumerate() {
                let v = r[shift + i].clone() - &f * c;
                r[shift + i] = v;
            }
            r = trim(&r);
        }
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        x.iter().map(|c| c / &lead).collect()
    } else {
        x
    }
}

fn poly_derivative(p: &[Rational]) -> Vec<Rational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * rat(i as i64))
        .collect()
}

fn apply_poly(p: &[Rational], m: &RationalMatrix) -> RationalMatrix {
    let n = m.rows();
    let mut acc = RationalMatrix::zeros(n, n);
    for c in p.iter().rev() {
        acc = acc.mul(m);
        if !c.is_zero() {
            acc = acc.add(&RationalMatrix::identity(n).scale(c));
        }
    }
    acc
}

fn split_by_element(rep: &MatrixGroupRep, z: &RationalMatrix) -> Option<Subspace> {
    let n = rep.dim;
    let mu = minimal_polynomial(z);
    if mu.len() <= 1 {
        return None;
    }
    // rational eigenvalues give invariant eigenspaces
    for root in rational_roots(&mu) {
        let shifted = z.sub(&RationalMatrix::identity(n).scale(&root));
        let ker = kernel(&shifted);
        if ker.dim() > 0 && ker.dim() < n {
            return Some(ker);
        }
    }
    // repeated factors: gcd(μ, μ') is a proper factor; its kernel is invariant
    let g = poly_gcd(&mu, &poly_derivative(&mu));
    if g.len() > 1 && g.len() < mu.len() {
        let ker = kernel(&apply_poly(&g, z));
        if ker.dim() > 0 && ker.dim() < n {
            return Some(ker);
        }
    }
    None
}

/// Exact irreducibility decision for 2-dimensional representations: an
/// invariant line is a common rational eigenvector of the generators.
fn split_dim2(rep: &MatrixGroupRep) -> MeataxeOutcome {
    let lines: Option<Vec<Subspace>> = rep
        .generators
        .iter()
        .find(|g| **g != RationalMatrix::identity(2) && g.neg() != RationalMatrix::identity(2))
        .map(|g| {
            let mu = minimal_polynomial(g);
            rational_roots(&mu)
                .into_iter()
                .map(|r| kernel(&g.sub(&RationalMatrix::identity(2).scale(&r))))
                .filter(|k| k.dim() == 1)
                .collect()
        });
    match lines {
        None => {
            // all generators are ±identity: every line is invariant
            let e1 = Subspace::from_columns(RationalMatrix::from_i64_rows(&[&[1], &[0]]));
            MeataxeOutcome::Proper(e1)
        }
        Some(cands) => {
            for line in cands {
                if rep.is_invariant(&line) {
                    return MeataxeOutcome::Proper(line);
                }
            }
            // a non-scalar generator has at most two eigenlines; none invariant
            MeataxeOutcome::Irreducible
        }
    }
}

/// Meataxe-style splitter. Returns a proper invariant subspace, an
/// irreducibility certificate, or `Undecided` when the budget runs out.
pub fn meataxe_split(rep: &MatrixGroupRep, config: &MeataxeConfig) -> MeataxeOutcome {
    let n = rep.dim;
    if n <= 1 {
        return MeataxeOutcome::Irreducible;
    }
    // spin pass over standard basis vectors
    for i in 0..n {
        let mut v = vec![Rational::zero(); n];
        v[i] = Rational::one();
        let s = spin(rep, &v);
        if s.dim() < n {
            return MeataxeOutcome::Proper(s);
        }
    }
    if n == 2 {
        return split_dim2(rep);
    }
    let end = endomorphism_algebra(rep);
    if end.len() == 1 {
        return MeataxeOutcome::Irreducible;
    }
    for e in &end[1..] {
        if let Some(s) = split_by_element(rep, e) {
            return MeataxeOutcome::Proper(s);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.random_budget {
        let mut z = RationalMatrix::zeros(n, n);
        for e in &end {
            let c = rng.gen_range(-3i64..=3);
            if c != 0 {
                z = z.add(&e.scale(&rat(c)));
            }
        }
        if let Some(s) = split_by_element(rep, &z) {
            return MeataxeOutcome::Proper(s);
        }
    }
    MeataxeOutcome::Irreducible
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyConfig {
    pub closure_cap: usize,
    pub meataxe: MeataxeConfig,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            closure_cap: DEFAULT_CLOSURE_CAP,
            meataxe: MeataxeConfig::default(),
        }
    }
}

/// Type classification of a representation with duality.
///
/// The kind is committed only when the representation is certified
/// irreducible and its endomorphism algebra has ℚ-dimension 1, 2, or 4; the
/// hat representation's endomorphism dimension is computed as a consistency
/// check (it carries the extra split along the graphs of ±q and must have
/// exactly twice the dimension).
pub fn classify_type(
    rep: &MatrixGroupRep,
    dual: &DualityStructure,
    config: &ClassifyConfig,
) -> Result<RepTypeResult, RepError> {
    dual.validate_invariance(rep)?;
    group_closure(&rep.generators, config.closure_cap)?;
    let end_dim = endomorphism_algebra(rep).len();
    match meataxe_split(rep, &config.meataxe) {
        MeataxeOutcome::Proper(_) => Ok(RepTypeResult {
            kind: RepKind::Reducible,
            end_dim,
        }),
        MeataxeOutcome::Undecided => Ok(RepTypeResult {
            kind: RepKind::Undecided,
            end_dim,
        }),
        MeataxeOutcome::Irreducible => {
            let hat = hat_rep(rep, dual)?;
            let hat_end = endomorphism_algebra(&hat).len();
            if hat_end != 2 * end_dim {
                return Ok(RepTypeResult {
                    kind: RepKind::Undecided,
                    end_dim,
                });
            }
            let kind = match end_dim {
                1 => RepKind::Real,
                2 => RepKind::Complex,
                4 => RepKind::Quaternionic,
                _ => RepKind::Undecided,
            };
            Ok(RepTypeResult { kind, end_dim })
        }
    }
}

/// Eigen-grading ranks of the complexified duality: the exact shadow of the
/// associated K-theory class. For ε=0 these are the inertia counts of q; for
/// ε=1 the grading splits evenly.
pub fn k0_grading_ranks(dual: &DualityStructure) -> Result<(usize, usize), RepError> {
    let n = dual.dim();
    match dual.epsilon.0 {
        0 => {
            let form = crate::exactla::SymmetricForm::new(dual.q.clone())
                .expect("ε=0 duality matrix is symmetric");
            let sig = crate::exactla::signature(&form);
            Ok((sig.pos, sig.neg))
        }
        _ => {
            if n % 2 != 0 {
                return Err(RepError::OddSymplectic(n));
            }
            Ok((n / 2, n / 2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::ratio;

    fn rot3() -> RationalMatrix {
        // order-3 rotation on ℚ²
        RationalMatrix::from_i64_rows(&[&[0, -1], &[1, -1]])
    }

    fn z3_rep() -> MatrixGroupRep {
        MatrixGroupRep::new(vec!["r".into()], vec![rot3()], vec![vec![(0, 3)]]).unwrap()
    }

    fn q8_rep() -> MatrixGroupRep {
        // left multiplication by i and j on the integral quaternions
        let i = RationalMatrix::from_i64_rows(&[
            &[0, -1, 0, 0],
            &[1, 0, 0, 0],
            &[0, 0, 0, -1],
            &[0, 0, 1, 0],
        ]);
        let j = RationalMatrix::from_i64_rows(&[
            &[0, 0, -1, 0],
            &[0, 0, 0, 1],
            &[1, 0, 0, 0],
            &[0, -1, 0, 0],
        ]);
        MatrixGroupRep::new(
            vec!["i".into(), "j".into()],
            vec![i, j],
            vec![vec![(0, 4)], vec![(1, 4)], vec![(0, 1), (1, 1), (0, 1), (1, -1)]],
        )
        .unwrap()
    }

    #[test]
    fn closure_orders() {
        let neg = RationalMatrix::identity(2).neg();
        assert_eq!(group_closure(&[neg], 100).unwrap().len(), 2);
        assert_eq!(group_closure(&[rot3()], 100).unwrap().len(), 3);
        let rot4 = RationalMatrix::from_i64_rows(&[&[0, -1], &[1, 0]]);
        assert_eq!(group_closure(&[rot4], 100).unwrap().len(), 4);
        assert_eq!(group_closure(&q8_rep().generators, 100).unwrap().len(), 8);
    }

    #[test]
    fn closure_cap_reports_possibly_infinite() {
        let shear = RationalMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]);
        match group_closure(&[shear], 50) {
            Err(RepError::PossiblyInfinite(50)) => {}
            other => panic!("expected cap error, got {:?}", other),
        }
    }

    #[test]
    fn hat_of_trivial_group_is_the_swap() {
        let rep = MatrixGroupRep::trivial(1);
        let dual = DualityStructure::new(Epsilon(0), RationalMatrix::identity(1)).unwrap();
        let hat = hat_rep(&rep, &dual).unwrap();
        assert_eq!(hat.dim, 2);
        assert_eq!(
            hat.generators[0],
            RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]])
        );
    }

    #[test]
    fn hat_of_sign_rep() {
        let rep = MatrixGroupRep::new(
            vec!["s".into()],
            vec![RationalMatrix::identity(1).neg()],
            vec![vec![(0, 2)]],
        )
        .unwrap();
        let dual = DualityStructure::new(Epsilon(0), RationalMatrix::identity(1)).unwrap();
        let hat = hat_rep(&rep, &dual).unwrap();
        assert_eq!(
            hat.generators[0],
            RationalMatrix::from_i64_rows(&[&[-1, 0], &[0, -1]])
        );
        assert_eq!(
            hat.generators[1],
            RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]])
        );
    }

    #[test]
    fn hat_symplectic_block_consistency() {
        // ε=1 on ℚ², trivial G: J² = identity by direct 4×4 multiplication,
        // and the block product q⁻¹·qᵀ is −1.
        let rep = MatrixGroupRep::trivial(2);
        let q = RationalMatrix::from_i64_rows(&[&[0, 1], &[-1, 0]]);
        let dual = DualityStructure::new(Epsilon(1), q.clone()).unwrap();
        let hat = hat_rep(&rep, &dual).unwrap();
        let j = &hat.generators[0];
        assert_eq!(j.mul(j), RationalMatrix::identity(4));
        assert_eq!(
            q.inverse().unwrap().mul(&q.transpose()),
            RationalMatrix::identity(2).neg()
        );
    }

    #[test]
    fn end_algebra_dimensions() {
        assert_eq!(endomorphism_algebra(&MatrixGroupRep::trivial(3)).len(), 9);
        let e = endomorphism_algebra(&z3_rep());
        assert_eq!(e.len(), 2);
        assert_eq!(e[0], RationalMatrix::identity(2));
        // regular rep of ℤ₂
        let swap = RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let reg =
            MatrixGroupRep::new(vec!["t".into()], vec![swap], vec![vec![(0, 2)]]).unwrap();
        assert_eq!(endomorphism_algebra(&reg).len(), 2);
        assert_eq!(endomorphism_algebra(&q8_rep()).len(), 4);
    }

    #[test]
    fn meataxe_splits_diagonal_z2() {
        let d = RationalMatrix::from_i64_rows(&[&[1, 0], &[0, -1]]);
        let rep = MatrixGroupRep::new(vec!["t".into()], vec![d], vec![vec![(0, 2)]]).unwrap();
        match meataxe_split(&rep, &MeataxeConfig::default()) {
            MeataxeOutcome::Proper(s) => assert_eq!(s.dim(), 1),
            other => panic!("expected split, got {:?}", other),
        }
    }

    #[test]
    fn meataxe_certifies_rotation_rep() {
        match meataxe_split(&z3_rep(), &MeataxeConfig::default()) {
            MeataxeOutcome::Irreducible => {}
            other => panic!("expected certificate, got {:?}", other),
        }
    }

    #[test]
    fn meataxe_finds_diagonal_line_of_regular_z2() {
        let swap = RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let reg =
            MatrixGroupRep::new(vec!["t".into()], vec![swap], vec![vec![(0, 2)]]).unwrap();
        match meataxe_split(&reg, &MeataxeConfig::default()) {
            MeataxeOutcome::Proper(s) => {
                assert_eq!(s.dim(), 1);
                assert!(rep_line_is_pm_diagonal(&s));
            }
            other => panic!("expected split, got {:?}", other),
        }
    }

    fn rep_line_is_pm_diagonal(s: &Subspace) -> bool {
        s.contains_vector(&[rat(1), rat(1)]) || s.contains_vector(&[rat(1), rat(-1)])
    }

    #[test]
    fn average_form_trivial_group() {
        let rep = MatrixGroupRep::trivial(1);
        let q = average_invariant_form(&rep, Epsilon(0), 100)
            .unwrap()
            .unwrap();
        assert!(q.q.inverse().is_some());
    }

    #[test]
    fn average_form_z3_symplectic() {
        let q = average_invariant_form(&z3_rep(), Epsilon(1), 100)
            .unwrap()
            .unwrap();
        // rotation has determinant 1, so the standard symplectic form works;
        // any invertible invariant antisymmetric 2×2 form is a scalar of it
        assert!(q.q.is_antisymmetric());
        q.validate_invariance(&z3_rep()).unwrap();
    }

    #[test]
    fn average_form_none_case() {
        // sign ⊕ trivial rep of ℤ₂ admits no invertible invariant antisymmetric form
        let d = RationalMatrix::from_i64_rows(&[&[-1, 0], &[0, 1]]);
        let rep = MatrixGroupRep::new(vec!["t".into()], vec![d], vec![vec![(0, 2)]]).unwrap();
        assert!(average_invariant_form(&rep, Epsilon(1), 100)
            .unwrap()
            .is_none());
    }

    #[test]
    fn classify_trivial_group_line_is_real() {
        let rep = MatrixGroupRep::trivial(1);
        let dual = DualityStructure::new(Epsilon(0), RationalMatrix::identity(1)).unwrap();
        let r = classify_type(&rep, &dual, &ClassifyConfig::default()).unwrap();
        assert_eq!(r.kind, RepKind::Real);
        assert_eq!(r.end_dim, 1);
    }

    #[test]
    fn classify_hat_swap_rep_splits() {
        // the 2-dim swap rep of ℤ₂ (the hat of the trivial example) is reducible
        let swap = RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let rep =
            MatrixGroupRep::new(vec!["t".into()], vec![swap], vec![vec![(0, 2)]]).unwrap();
        let dual = DualityStructure::new(Epsilon(0), RationalMatrix::identity(2)).unwrap();
        let r = classify_type(&rep, &dual, &ClassifyConfig::default()).unwrap();
        assert_eq!(r.kind, RepKind::Reducible);
        assert_eq!(r.end_dim, 2);
    }

    #[test]
    fn classify_z3_rotation_complex() {
        let dual = average_invariant_form(&z3_rep(), Epsilon(0), 100)
            .unwrap()
            .unwrap();
        let r = classify_type(&z3_rep(), &dual, &ClassifyConfig::default()).unwrap();
        assert_eq!(r.kind, RepKind::Complex);
        assert_eq!(r.end_dim, 2);
    }

    #[test]
    fn classify_q8_quaternionic() {
        let rep = q8_rep();
        let dual = average_invariant_form(&rep, Epsilon(1), 100)
            .unwrap()
            .unwrap();
        let r = classify_type(&rep, &dual, &ClassifyConfig::default()).unwrap();
        assert_eq!(r.kind, RepKind::Quaternionic);
        assert_eq!(r.end_dim, 4);
    }

    #[test]
    fn classify_is_conjugation_invariant() {
        let a = RationalMatrix::from_rows(vec![
            vec![rat(1), ratio(1, 2)],
            vec![rat(1), rat(1)],
        ]);
        let rep = z3_rep().conjugate(&a);
        let dual = average_invariant_form(&rep, Epsilon(0), 100)
            .unwrap()
            .unwrap();
        let r = classify_type(&rep, &dual, &ClassifyConfig::default()).unwrap();
        assert_eq!(r.kind, RepKind::Complex);
        assert_eq!(r.end_dim, 2);
    }

    #[test]
    fn k0_ranks() {
        let d = DualityStructure::new(
            Epsilon(0),
            RationalMatrix::from_i64_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -1]]),
        )
        .unwrap();
        assert_eq!(k0_grading_ranks(&d).unwrap(), (2, 1));
        let hyp = DualityStructure::new(
            Epsilon(0),
            RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]),
        )
        .unwrap();
        assert_eq!(k0_grading_ranks(&hyp).unwrap(), (1, 1));
        let symp4 = DualityStructure::new(
            Epsilon(1),
            RationalMatrix::from_i64_rows(&[
                &[0, 0, 1, 0],
                &[0, 0, 0, 1],
                &[-1, 0, 0, 0],
                &[0, -1, 0, 0],
            ]),
        )
        .unwrap();
        assert_eq!(k0_grading_ranks(&symp4).unwrap(), (2, 2));
    }

    #[test]
    fn minimal_polynomial_of_projection() {
        let p = RationalMatrix::from_i64_rows(&[&[1, 0], &[0, 0]]);
        let mu = minimal_polynomial(&p);
        // x² − x
        assert_eq!(mu, vec![rat(0), rat(-1), rat(1)]);
    }
}
