//! Exact isotropy analysis of rational quadratic forms.
//!
//! Witnesses are found by congruence diagonalization plus a meet-in-the-middle
//! search over small integer vectors; anisotropy is certified exactly by
//! definiteness, the square test in rank ≤ 2, the Legendre criterion in rank
//! 3, and Hilbert-symbol local obstructions in rank 4. Rank ≥ 5 indefinite
//! forms are always isotropic, so a missing witness there is reported as
//! `Unknown` rather than guessed.

use crate::exactla::{kernel, rat, Rational, RationalMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Isotropy {
    /// Nonzero vector v with vᵀ G v = 0.
    Witness(Vec<Rational>),
    /// Proven anisotropic.
    Anisotropic,
    /// The form is (or may be) isotropic but no witness was found in budget.
    Unknown,
}

/// Decide isotropy of the symmetric Gram matrix `gram`.
pub fn isotropic_vector(gram: &RationalMatrix) -> Isotropy {
    let n = gram.rows();
    if n == 0 {
        return Isotropy::Anisotropic;
    }
    // radical vectors are isotropic
    let rad = kernel(gram);
    if rad.dim() > 0 {
        return Isotropy::Witness(rad.basis().column(0));
    }
    // congruence diagonalization with tracked transform: Tᵀ G T = diag
    let (diag, t) = diagonalize(gram);
    let entries: Vec<Rational> = (0..n).map(|i| diag.at(i, i).clone()).collect();
    debug_assert!(entries.iter().all(|e| !e.is_zero()));
    // trivial hyperbolic pairs: a_i = −a_j
    for i in 0..n {
        for j in (i + 1)..n {
            if entries[i] == -entries[j].clone() {
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::one();
                v[j] = Rational::one();
                return Isotropy::Witness(t.apply(&v));
            }
        }
    }
    let pos = entries.iter().filter(|e| e.is_positive()).count();
    if pos == 0 || pos == n {
        return Isotropy::Anisotropic;
    }
    if n == 1 {
        return Isotropy::Anisotropic;
    }
    // clear to an integer diagonal form: x² coefficient a/b scaled by b² ⇒ a·b
    let ints: Vec<BigInt> = entries.iter().map(|e| e.numer() * e.denom()).collect();
    if n == 2 {
        // a x² + b y² = 0 ⇔ −a/b is a square; test numerator and denominator
        let s = -(&entries[0] / &entries[1]);
        if let (Some(p), Some(q)) = (exact_sqrt(s.numer()), exact_sqrt(s.denom())) {
            let ratio = Rational::new(p, q); // y/x = √(−a/b)
            debug_assert!((&entries[0] + &entries[1] * &ratio * &ratio).is_zero());
            let v = vec![Rational::one(), ratio];
            return Isotropy::Witness(t.apply(&v));
        }
        return Isotropy::Anisotropic;
    }
    // search for a small witness on the diagonalized integer form
    if let Some(v) = midpoint_search(&ints, 25) {
        let vr: Vec<Rational> = v.iter().map(|&x| rat(x)).collect();
        return Isotropy::Witness(t.apply(&vr));
    }
    // exact certification for ranks 3 and 4
    match n {
        3 => {
            if ternary_isotropic_decision(&ints) {
                match midpoint_search(&ints, 400) {
                    Some(v) => {
                        let vr: Vec<Rational> = v.iter().map(|&x| rat(x)).collect();
                        Isotropy::Witness(t.apply(&vr))
                    }
                    None => Isotropy::Unknown,
                }
            } else {
                Isotropy::Anisotropic
            }
        }
        4 => {
            if quaternary_anisotropic_decision(&ints) {
                Isotropy::Anisotropic
            } else {
                match midpoint_search(&ints, 120) {
                    Some(v) => {
                        let vr: Vec<Rational> = v.iter().map(|&x| rat(x)).collect();
                        Isotropy::Witness(t.apply(&vr))
                    }
                    None => Isotropy::Unknown,
                }
            }
        }
        _ => {
            // indefinite of rank ≥ 5 is isotropic; we only lack a witness
            match midpoint_search(&ints, 60) {
                Some(v) => {
                    let vr: Vec<Rational> = v.iter().map(|&x| rat(x)).collect();
                    Isotropy::Witness(t.apply(&vr))
                }
                None => Isotropy::Unknown,
            }
        }
    }
}

/// Congruence diagonalization returning (D, T) with Tᵀ G T = D.
fn diagonalize(gram: &RationalMatrix) -> (RationalMatrix, RationalMatrix) {
    let n = gram.rows();
    let mut s = gram.clone();
    let mut t = RationalMatrix::identity(n);
    let mut k = 0;
    while k < n {
        if s.at(k, k).is_zero() {
            if let Some(j) = ((k + 1)..n).find(|&j| !s.at(j, j).is_zero()) {
                swap_cong(&mut s, &mut t, k, j);
            } else if let Some((i, j)) = offdiag(&s, k) {
                if i != k {
                    swap_cong(&mut s, &mut t, k, i);
                }
                let jj = if j == k { i } else { j };
                add_cong(&mut s, &mut t, k, jj);
            } else {
                break;
            }
        }
        let pivot = s.at(k, k).clone();
        if !pivot.is_zero() {
            let inv = pivot.recip();
            for i in (k + 1)..n {
                if !s.at(i, k).is_zero() {
                    let f = s.at(i, k) * &inv;
                    col_sub(&mut s, &mut t, i, k, &f);
                }
            }
        }
        k += 1;
    }
    (s, t)
}

fn swap_cong(s: &mut RationalMatrix, t: &mut RationalMatrix, a: usize, b: usize) {
    let n = s.rows();
    for j in 0..n {
        let x = s.at(a, j).clone();
        let y = s.at(b, j).clone();
        s.set(a, j, y);
        s.set(b, j, x);
    }
    for i in 0..n {
        let x = s.at(i, a).clone();
        let y = s.at(i, b).clone();
        s.set(i, a, y);
        s.set(i, b, x);
    }
    for i in 0..n {
        let x = t.at(i, a).clone();
        let y = t.at(i, b).clone();
        t.set(i, a, y);
        t.set(i, b, x);
    }
}

fn add_cong(s: &mut RationalMatrix, t: &mut RationalMatrix, a: usize, b: usize) {
    let n = s.rows();
    for j in 0..n {
        let v = s.at(a, j) + s.at(b, j);
        s.set(a, j, v);
    }
    for i in 0..n {
        let v = s.at(i, a) + s.at(i, b);
        s.set(i, a, v);
    }
    for i in 0..n {
        let v = t.at(i, a) + t.at(i, b);
        t.set(i, a, v);
    }
}

/// column_i -= f * column_k (and the symmetric row operation on s).
fn col_sub(s: &mut RationalMatrix, t: &mut RationalMatrix, i: usize, k: usize, f: &Rational) {
    let n = s.rows();
    for j in 0..n {
        let v = s.at(i, j) - f * s.at(k, j);
        s.set(i, j, v);
    }
    for j in 0..n {
        let v = s.at(j, i) - f * s.at(j, k);
        s.set(j, i, v);
    }
    for j in 0..n {
        let v = t.at(j, i) - f * t.at(j, k);
        t.set(j, i, v);
    }
}

fn offdiag(s: &RationalMatrix, k: usize) -> Option<(usize, usize)> {
    let n = s.rows();
    for i in k..n {
        for j in (i + 1)..n {
            if !s.at(i, j).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

fn exact_sqrt(x: &BigInt) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.sqrt();
    if &(&r * &r) == x {
        Some(r)
    } else {
        None
    }
}

/// Meet-in-the-middle search for Σ a_i x_i² = 0, 0 ≤ x_i ≤ bound, x ≠ 0
/// (signs are immaterial: the form is even in each variable).
fn midpoint_search(coeffs: &[BigInt], bound: i64) -> Option<Vec<i64>> {
    let n = coeffs.len();
    let half = n / 2;
    let (left, right) = coeffs.split_at(half);
    use std::collections::HashMap;
    let mut table: HashMap<BigInt, Vec<i64>> = HashMap::new();
    let mut result: Option<Vec<i64>> = None;
    let mut assign = vec![0i64; half];
    enumerate_sums(left, bound, &mut assign, 0, &mut |sum, xs| {
        if result.is_none() && sum.is_zero() && xs.iter().any(|&x| x != 0) {
            // the left half alone is a witness, pad with zeros
            let mut v = xs.to_vec();
            v.resize(n, 0);
            result = Some(v);
        }
        table.entry(sum).or_insert_with(|| xs.to_vec());
    });
    if result.is_some() {
        return result;
    }
    let mut assign_r = vec![0i64; n - half];
    enumerate_sums(right, bound, &mut assign_r, 0, &mut |sum, xs| {
        if result.is_some() {
            return;
        }
        if sum.is_zero() && xs.iter().any(|&x| x != 0) {
            let mut v = vec![0i64; half];
            v.extend_from_slice(xs);
            result = Some(v);
            return;
        }
        if let Some(ls) = table.get(&(-sum)) {
            let mut v = ls.clone();
            v.extend_from_slice(xs);
            if v.iter().any(|&x| x != 0) {
                result = Some(v);
            }
        }
    });
    result
}

fn enumerate_sums(
    coeffs: &[BigInt],
    bound: i64,
    assign: &mut [i64],
    idx: usize,
    f: &mut impl FnMut(BigInt, &[i64]),
) {
    if idx == coeffs.len() {
        let sum: BigInt = coeffs
            .iter()
            .zip(assign.iter())
            .map(|(c, &x)| c * BigInt::from(x) * BigInt::from(x))
            .sum();
        f(sum, assign);
        return;
    }
    // nonnegative range suffices: the form is even in each variable
    for x in 0..=bound {
        assign[idx] = x;
        enumerate_sums(coeffs, bound, assign, idx + 1, f);
    }
    assign[idx] = 0;
}

fn squarefree_part(x: &BigInt) -> BigInt {
    let mut n = x.abs();
    let sign = if x.is_negative() {
        BigInt::from(-1)
    } else {
        BigInt::one()
    };
    let mut out = BigInt::one();
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        let mut count = 0u32;
        while (&n % &d).is_zero() {
            n /= &d;
            count += 1;
        }
        if count % 2 == 1 {
            out *= &d;
        }
        d += 1;
    }
    out * n * sign
}

fn odd_prime_factors(x: &BigInt) -> Vec<BigInt> {
    let mut n = x.abs();
    let mut out = Vec::new();
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            if !d.is_even() {
                out.push(d.clone());
            }
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1;
    }
    if n > BigInt::one() && !n.is_even() {
        out.push(n);
    }
    out
}

fn legendre_symbol(a: &BigInt, p: &BigInt) -> i32 {
    // p odd prime
    let a_mod = a.mod_floor(p);
    if a_mod.is_zero() {
        return 0;
    }
    let exp = (p - BigInt::one()) / BigInt::from(2);
    let r = a_mod.modpow(&exp, p);
    if r.is_one() {
        1
    } else {
        -1
    }
}

fn is_qr_mod_squarefree(a: &BigInt, m: &BigInt) -> bool {
    // a is a QR mod every odd prime factor of the square-free m
    odd_prime_factors(m)
        .iter()
        .all(|p| legendre_symbol(a, p) != -1)
}

/// Legendre's criterion for a x² + b y² + c z² = 0 with a,b,c the diagonal
/// (made square-free and pairwise coprime by the classical transformations).
fn ternary_isotropic_decision(coeffs: &[BigInt]) -> bool {
    let mut a = squarefree_part(&coeffs[0]);
    let mut b = squarefree_part(&coeffs[1]);
    let mut c = squarefree_part(&coeffs[2]);
    // pairwise gcd extraction: ⟨ga′, gb′, c⟩ ≃ ⟨a′, b′, gc⟩ up to squares
    loop {
        let gab = a.gcd(&b);
        if gab > BigInt::one() {
            a /= &gab;
            b /= &gab;
            c = squarefree_part(&(c * gab));
            continue;
        }
        let gac = a.gcd(&c);
        if gac > BigInt::one() {
            a /= &gac;
            c /= &gac;
            b = squarefree_part(&(b * gac));
            continue;
        }
        let gbc = b.gcd(&c);
        if gbc > BigInt::one() {
            b /= &gbc;
            c /= &gbc;
            a = squarefree_part(&(a * gbc));
            continue;
        }
        break;
    }
    let signs = [a.is_positive(), b.is_positive(), c.is_positive()];
    if signs.iter().all(|&s| s) || signs.iter().all(|&s| !s) {
        return false;
    }
    is_qr_mod_squarefree(&(-&a * &b), &c)
        && is_qr_mod_squarefree(&(-&b * &c), &a)
        && is_qr_mod_squarefree(&(-&a * &c), &b)
}

fn hilbert_symbol_odd(a: &BigInt, b: &BigInt, p: &BigInt) -> i32 {
    let (alpha, u) = p_adic_split(a, p);
    let (beta, v) = p_adic_split(b, p);
    let mut s = 1;
    if alpha % 2 == 1 && beta % 2 == 1 {
        // (−1)^{(p−1)/2}
        let e = ((p - BigInt::one()) / BigInt::from(2)).mod_floor(&BigInt::from(2));
        if e.is_one() {
            s = -s;
        }
    }
    if beta % 2 == 1 {
        s *= legendre_symbol(&u, p);
    }
    if alpha % 2 == 1 {
        s *= legendre_symbol(&v, p);
    }
    s
}

fn hilbert_symbol_2(a: &BigInt, b: &BigInt) -> i32 {
    let (alpha, u) = p_adic_split(a, &BigInt::from(2));
    let (beta, v) = p_adic_split(b, &BigInt::from(2));
    // (u−1)/2 mod 2 and (u²−1)/8 mod 2 for odd u
    let eps = |x: &BigInt| -> i64 {
        if x.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
            1
        } else {
            0
        }
    };
    let omega = |x: &BigInt| -> i64 {
        let m = x.mod_floor(&BigInt::from(8));
        if m == BigInt::from(3) || m == BigInt::from(5) {
            1
        } else {
            0
        }
    };
    let e = eps(&u) * eps(&v) + (alpha as i64) * omega(&v) + (beta as i64) * omega(&u);
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

fn p_adic_split(x: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut u = x.clone();
    let mut val = 0u32;
    while (&u % p).is_zero() {
        u /= p;
        val += 1;
    }
    (val, u)
}

fn hilbert_symbol(a: &BigInt, b: &BigInt, p: &BigInt) -> i32 {
    if *p == BigInt::from(2) {
        hilbert_symbol_2(a, b)
    } else {
        hilbert_symbol_odd(a, b, p)
    }
}

fn is_square_in_qp(x: &BigInt, p: &BigInt) -> bool {
    let (val, u) = p_adic_split(x, p);
    if val % 2 == 1 {
        return false;
    }
    if *p == BigInt::from(2) {
        u.mod_floor(&BigInt::from(8)).is_one()
    } else {
        legendre_symbol(&u, p) == 1
    }
}

/// Exact anisotropy decision for rank-4 integer diagonal forms: anisotropic
/// over ℚ iff anisotropic over ℝ or over some ℚ_p, which for rank 4 happens
/// exactly when the discriminant is a p-adic square and the Hasse invariant
/// differs from (−1,−1)_p.
fn quaternary_anisotropic_decision(coeffs: &[BigInt]) -> bool {
    let pos = coeffs.iter().filter(|c| c.is_positive()).count();
    if pos == 0 || pos == 4 {
        return true;
    }
    // relevant places: 2 and odd primes dividing any coefficient
    let mut primes: Vec<BigInt> = vec![BigInt::from(2)];
    for c in coeffs {
        for p in odd_prime_factors(c) {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    let disc: BigInt = coeffs.iter().product();
    for p in &primes {
        if !is_square_in_qp(&disc, p) {
            continue;
        }
        let mut hasse = 1;
        for i in 0..4 {
            for j in (i + 1)..4 {
                hasse *= hilbert_symbol(&coeffs[i], &coeffs[j], p);
            }
        }
        let minus_one = BigInt::from(-1);
        if hasse != hilbert_symbol(&minus_one, &minus_one, p) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::SymmetricForm;

    fn diag_form(entries: &[i64]) -> RationalMatrix {
        let n = entries.len();
        let mut m = RationalMatrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, rat(e));
        }
        m
    }

    fn check_witness(gram: &RationalMatrix, v: &[Rational]) {
        let vm = RationalMatrix::from_columns(v.len(), vec![v.to_vec()]);
        let val = vm.transpose().mul(gram).mul(&vm);
        assert!(val.is_zero(), "witness fails: {:?}", val);
        assert!(v.iter().any(|x| !x.is_zero()), "witness is zero");
    }

    #[test]
    fn definite_forms_are_anisotropic() {
        assert_eq!(isotropic_vector(&diag_form(&[1, 2, 3])), Isotropy::Anisotropic);
        assert_eq!(
            isotropic_vector(&diag_form(&[-1, -5, -2, -2])),
            Isotropy::Anisotropic
        );
    }

    #[test]
    fn hyperbolic_has_witness() {
        let g = RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        match isotropic_vector(&g) {
            Isotropy::Witness(v) => check_witness(&g, &v),
            other => panic!("expected witness, got {:?}", other),
        }
    }

    #[test]
    fn rank2_square_test() {
        // ⟨1, −4⟩ isotropic (4 is a square); ⟨1, −2⟩ anisotropic
        let g = diag_form(&[1, -4]);
        match isotropic_vector(&g) {
            Isotropy::Witness(v) => check_witness(&g, &v),
            other => panic!("expected witness, got {:?}", other),
        }
        assert_eq!(isotropic_vector(&diag_form(&[1, -2])), Isotropy::Anisotropic);
    }

    #[test]
    fn ternary_cases() {
        // x² + y² = 2z² has (1,1,1)
        let g = diag_form(&[1, 1, -2]);
        match isotropic_vector(&g) {
            Isotropy::Witness(v) => check_witness(&g, &v),
            other => panic!("expected witness, got {:?}", other),
        }
        // x² + y² = 3z² has no rational solutions
        assert_eq!(
            isotropic_vector(&diag_form(&[1, 1, -3])),
            Isotropy::Anisotropic
        );
        // x² + y² = 7z²: likewise (7 ≡ 3 mod 4)
        assert_eq!(
            isotropic_vector(&diag_form(&[1, 1, -7])),
            Isotropy::Anisotropic
        );
    }

    #[test]
    fn quaternary_cases() {
        // ⟨1,1,−2,−2⟩: (1,1,1,0)
        let g = diag_form(&[1, 1, -2, -2]);
        match isotropic_vector(&g) {
            Isotropy::Witness(v) => check_witness(&g, &v),
            other => panic!("expected witness, got {:?}", other),
        }
        // ⟨1,1,1,−7⟩: 7 is a sum of three rational squares? 7 = 4+1+1+1 needs four;
        // three squares represent all n ≢ 0,4,7 mod 8, so 7 is NOT: anisotropic
        assert_eq!(
            isotropic_vector(&diag_form(&[1, 1, 1, -7])),
            Isotropy::Anisotropic
        );
        // the norm form of the rational quaternions ⟨1,1,1,1⟩ vs mixed
        let g = diag_form(&[1, 3, -2, -6]);
        match isotropic_vector(&g) {
            // disc = 36 square; hasse analysis or search decides; witness exists: x²+3y²=2z²+6w²: (… ) try search
            Isotropy::Witness(v) => check_witness(&g, &v),
            Isotropy::Anisotropic => panic!("⟨1,3,−2,−6⟩ is isotropic (1,1,√?,..)"),
            Isotropy::Unknown => panic!("search should find a witness"),
        }
    }

    #[test]
    fn nondiagonal_witness_transforms_back() {
        // congruence-scrambled hyperbolic ⊕ definite
        let base = diag_form(&[1, -1, 2]);
        let a = RationalMatrix::from_i64_rows(&[&[1, 2, 0], &[0, 1, 3], &[1, 0, 1]]);
        let g = a.transpose().mul(&base).mul(&a);
        let g = SymmetricForm::new(g).unwrap();
        match isotropic_vector(g.matrix()) {
            Isotropy::Witness(v) => check_witness(g.matrix(), &v),
            other => panic!("expected witness, got {:?}", other),
        }
    }

    #[test]
    fn degenerate_form_returns_radical_vector() {
        let g = diag_form(&[1, 0, 5]);
        match isotropic_vector(&g) {
            Isotropy::Witness(v) => check_witness(&g, &v),
            other => panic!("expected witness, got {:?}", other),
        }
    }
}
