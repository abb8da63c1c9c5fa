//! Exact linear algebra over arbitrary-precision rationals.
//!
//! Everything downstream (duality structures, cohomology, spectral-sequence
//! pages) is built on the types here: dense rational matrices, subspaces in
//! canonical reduced column echelon form, subquotients with induced maps, and
//! signatures of symmetric bilinear forms. No floating point appears anywhere;
//! signatures and kernels are discontinuous, so exactness is correctness.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

/// Exact scalar used throughout the crate.
pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for a rational from a numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric: entries ({0},{1}) and ({1},{0}) differ")]
    NotSymmetric(usize, usize),
    #[error("subspace not contained in the expected space: {0}")]
    NotContained(String),
    #[error("map is not well-defined on the subquotient: {0}")]
    NotWellDefined(String),
    #[error("matrix is singular")]
    Singular,
}

/// Dense matrix over `Rational`, row-major.
///
/// Zero-row and zero-column matrices are first-class citizens; empty carriers
/// show up constantly as zero generators and trivial cohomology groups.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
        }
        RationalMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Test/construction helper for small integer matrices.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).clone();
                    out.set(i, j, cur + a * b);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) + other.at(i, j))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - other.at(i, j))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| -self.at(i, j).clone())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) * s)
    }

    /// Apply to a vector given as a slice; returns the image vector.
    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "apply dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..self.cols {
                    if !v[j].is_zero() && !self.at(i, j).is_zero() {
                        acc += self.at(i, j) * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                other.at(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack col mismatch");
        Self::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.at(i, j).clone()
            } else {
                other.at(i - self.rows, j).clone()
            }
        })
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        Self::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.at(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.at(i - self.rows, j - self.cols).clone()
            } else {
                Rational::zero()
            }
        })
    }

    /// Kronecker product; block (i,j) is `self[i,j] * other`.
    pub fn kronecker(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.at(k, l);
                        if !b.is_zero() {
                            out.set(i * other.rows + k, j * other.cols + l, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn from_columns(ambient: usize, cols: Vec<Vec<Rational>>) -> Self {
        for c in &cols {
            assert_eq!(c.len(), ambient, "column length mismatch");
        }
        Self::from_fn(ambient, cols.len(), |i, j| cols[j][i].clone())
    }

    /// In-place Gauss-Jordan reduction; returns pivot columns.
    ///
    /// Pivots prefer ±1 entries: on incidence-style matrices this keeps the
    /// whole elimination integral, which is what makes the corpus-sized
    /// cochain complexes cheap.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // find a pivot in column c at or below row r, preferring units
            let mut found: Option<usize> = None;
            for i in r..self.rows {
                let e = self.at(i, c);
                if e.is_zero() {
                    continue;
                }
                if found.is_none() {
                    found = Some(i);
                }
                if e.denom().is_one() && e.numer().magnitude().is_one() {
                    found = Some(i);
                    break;
                }
            }
            let Some(p) = found else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.entries.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.at(r, c).recip();
            for j in 0..self.cols {
                let v = self.at(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in 0..self.cols {
                        let v = self.at(i, j) - &f * self.at(r, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().len()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = self.hstack(&Self::identity(n));
        let pivots = aug.row_reduce();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| aug.at(i, n + j).clone()))
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m.at(i, k).is_zero()) else {
                return Rational::zero();
            };
            if p != k {
                for j in 0..n {
                    m.entries.swap(p * n + j, k * n + j);
                }
                det = -det;
            }
            det *= m.at(k, k);
            let inv = m.at(k, k).recip();
            for i in (k + 1)..n {
                if !m.at(i, k).is_zero() {
                    let f = m.at(i, k) * &inv;
                    for j in k..n {
                        let v = m.at(i, j) - &f * m.at(k, j);
                        m.set(i, j, v);
                    }
                }
            }
        }
        det
    }

    pub fn trace(&self) -> Rational {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.at(i, i).clone()).sum()
    }

    /// Solve `self * X = rhs` exactly; `None` if inconsistent.
    /// If the system is underdetermined any particular solution is returned.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "solve dimension mismatch");
        let mut aug = self.hstack(rhs);
        let pivots = aug.row_reduce();
        // consistency: no pivot may land in the rhs block
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (r, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(p, j, aug.at(r, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// First index pair witnessing asymmetry, if any.
    pub fn asymmetry_witness(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.at(i, j) != self.at(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry_witness().is_none()
    }

    pub fn is_antisymmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if *self.at(i, j) != -self.at(j, i).clone() {
                    return false;
                }
            }
        }
        true
    }
}

/// Incrementally maintained echelonized span; answers "is this vector new"
/// in one elimination pass instead of a fresh rank computation.
pub struct IncrementalSpan {
    ambient: usize,
    /// echelon rows with their pivot column
    rows: Vec<(usize, Vec<Rational>)>,
}

impl IncrementalSpan {
    pub fn new(ambient: usize) -> Self {
        IncrementalSpan {
            ambient,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the span; returns true (and absorbs the remainder)
    /// if `v` was independent.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut w = v.to_vec();
        for (pivot, row) in &self.rows {
            if !w[*pivot].is_zero() {
                let f = w[*pivot].clone();
                for (wi, ri) in w.iter_mut().zip(row.iter()) {
                    if !ri.is_zero() {
                        *wi -= &f * ri;
                    }
                }
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let inv = w[p].recip();
                for x in w.iter_mut() {
                    if !x.is_zero() {
                        *x *= &inv;
                    }
                }
                self.rows.push((p, w));
                self.rows.sort_by_key(|(p, _)| *p);
                true
            }
        }
    }

    pub fn contains(&mut self, v: &[Rational]) -> bool {
        let mut w = v.to_vec();
        for (pivot, row) in &self.rows {
            if !w[*pivot].is_zero() {
                let f = w[*pivot].clone();
                for (wi, ri) in w.iter_mut().zip(row.iter()) {
                    if !ri.is_zero() {
                        *wi -= &f * ri;
                    }
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }
}

/// Subspace of ℚ^n stored as a reduced column echelon basis, so two equal
/// subspaces have identical bases and equality is plain comparison.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: RationalMatrix,
}

impl Subspace {
    /// Span of the given columns, canonicalized.
    pub fn from_columns(cols: RationalMatrix) -> Self {
        let ambient = cols.rows();
        // reduced column echelon = transpose of the RREF of the transpose
        let mut t = cols.transpose();
        let pivots = t.row_reduce();
        let rank = pivots.len();
        let basis = RationalMatrix::from_fn(ambient, rank, |i, j| t.at(j, i).clone());
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: RationalMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: RationalMatrix::identity(ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Canonical basis matrix (ambient × dim).
    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let rhs = RationalMatrix::from_columns(self.ambient, vec![v.to_vec()]);
        self.basis.solve(&rhs).is_some()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        if self.ambient != other.ambient {
            return false;
        }
        other.basis.cols() == 0 || self.basis.solve(&other.basis).is_some()
    }

    /// Image of this subspace under `m`.
    pub fn map_by(&self, m: &RationalMatrix) -> Subspace {
        Subspace::from_columns(m.mul(&self.basis))
    }
}

/// Kernel of `m` as a subspace of the source.
pub fn kernel(m: &RationalMatrix) -> Subspace {
    let n = m.cols();
    let mut red = m.clone();
    let pivots = red.row_reduce();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut cols = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![Rational::zero(); n];
        v[fc] = Rational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -red.at(r, fc).clone();
        }
        cols.push(v);
    }
    Subspace::from_columns(RationalMatrix::from_columns(n, cols))
}

/// Column span of `m` as a subspace of the target.
pub fn image(m: &RationalMatrix) -> Subspace {
    Subspace::from_columns(m.clone())
}

pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace, LinAlgError> {
    if a.ambient != b.ambient {
        return Err(LinAlgError::DimensionMismatch(format!(
            "intersect: ambient {} vs {}",
            a.ambient, b.ambient
        )));
    }
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(a.ambient));
    }
    // solutions (x, y) of A x = B y; the intersection is spanned by the A x part
    let stacked = a.basis.hstack(&b.basis.neg());
    let ker = kernel(&stacked);
    let xs = RationalMatrix::from_fn(a.dim(), ker.dim(), |i, j| ker.basis().at(i, j).clone());
    Ok(Subspace::from_columns(a.basis.mul(&xs)))
}

pub fn sum(a: &Subspace, b: &Subspace) -> Result<Subspace, LinAlgError> {
    if a.ambient != b.ambient {
        return Err(LinAlgError::DimensionMismatch(format!(
            "sum: ambient {} vs {}",
            a.ambient, b.ambient
        )));
    }
    Ok(Subspace::from_columns(a.basis.hstack(&b.basis)))
}

/// Surjection ℚ^ambient → ℚ^(ambient−dim sub) with kernel exactly `sub`.
///
/// The section is chosen by greedily completing the subspace basis with
/// standard vectors, so the output is deterministic.
pub fn quotient_map(
    ambient: usize,
    sub: &Subspace,
) -> Result<(RationalMatrix, usize), LinAlgError> {
    if sub.ambient_dim() != ambient {
        return Err(LinAlgError::DimensionMismatch(format!(
            "quotient_map: ambient {} vs subspace ambient {}",
            ambient,
            sub.ambient_dim()
        )));
    }
    let k = sub.dim();
    let mut span = IncrementalSpan::new(ambient);
    for j in 0..k {
        span.insert(&sub.basis().column(j));
    }
    let mut b = sub.basis().clone();
    for e in 0..ambient {
        if b.cols() == ambient {
            break;
        }
        let mut v = vec![Rational::zero(); ambient];
        v[e] = Rational::one();
        if span.insert(&v) {
            b = b.hstack(&RationalMatrix::from_columns(ambient, vec![v]));
        }
    }
    // b is ambient x ambient, invertible
    let binv = b.inverse().ok_or(LinAlgError::Singular)?;
    let proj = RationalMatrix::from_fn(ambient - k, ambient, |i, j| binv.at(k + i, j).clone());
    debug_assert!(proj.mul(sub.basis()).is_zero());
    Ok((proj, ambient - k))
}

/// Subquotient top/bottom of an ambient ℚ^n, with a deterministic
/// representative basis. Spectral-sequence pages live in this type.
#[derive(Clone, Debug)]
pub struct Subquotient {
    top: Subspace,
    bottom: Subspace,
    /// Columns: representatives in the ambient space, one per subquotient
    /// basis vector. Chosen among the top basis columns extending the bottom.
    reps: RationalMatrix,
}

impl Subquotient {
    pub fn new(top: Subspace, bottom: Subspace) -> Result<Self, LinAlgError> {
        if top.ambient_dim() != bottom.ambient_dim() {
            return Err(LinAlgError::DimensionMismatch(format!(
                "subquotient: ambient {} vs {}",
                top.ambient_dim(),
                bottom.ambient_dim()
            )));
        }
        if !top.contains(&bottom) {
            return Err(LinAlgError::NotContained(
                "subquotient bottom ⊄ top".to_string(),
            ));
        }
        let ambient = top.ambient_dim();
        let mut span = IncrementalSpan::new(ambient);
        for j in 0..bottom.dim() {
            span.insert(&bottom.basis().column(j));
        }
        let mut reps_cols = Vec::new();
        for j in 0..top.dim() {
            let col = top.basis().column(j);
            if span.insert(&col) {
                reps_cols.push(col);
            }
        }
        let reps = RationalMatrix::from_columns(ambient, reps_cols);
        Ok(Subquotient { top, bottom, reps })
    }

    pub fn ambient_dim(&self) -> usize {
        self.top.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.reps.cols()
    }

    pub fn top(&self) -> &Subspace {
        &self.top
    }

    pub fn bottom(&self) -> &Subspace {
        &self.bottom
    }

    pub fn reps(&self) -> &RationalMatrix {
        &self.reps
    }

    /// Coordinates of an ambient vector (which must lie in `top`) in the
    /// representative basis.
    pub fn project(&self, v: &[Rational]) -> Result<Vec<Rational>, LinAlgError> {
        let ambient = self.ambient_dim();
        if v.len() != ambient {
            return Err(LinAlgError::DimensionMismatch(format!(
                "project: vector length {} vs ambient {}",
                v.len(),
                ambient
            )));
        }
        let frame = self.bottom.basis().hstack(&self.reps);
        let rhs = RationalMatrix::from_columns(ambient, vec![v.to_vec()]);
        let sol = frame
            .solve(&rhs)
            .ok_or_else(|| LinAlgError::NotContained("vector outside subquotient top".into()))?;
        Ok((self.bottom.dim()..frame.cols())
            .map(|i| sol.at(i, 0).clone())
            .collect())
    }

    pub fn lift(&self, coords: &[Rational]) -> Vec<Rational> {
        self.reps.apply(coords)
    }

    /// Matrix (in subquotient coordinates) of the map induced by `f` between
    /// two subquotients. Errors if `f` does not respect the structures.
    pub fn induced_map(
        f: &RationalMatrix,
        src: &Subquotient,
        dst: &Subquotient,
    ) -> Result<RationalMatrix, LinAlgError> {
        if f.cols() != src.ambient_dim() || f.rows() != dst.ambient_dim() {
            return Err(LinAlgError::DimensionMismatch(format!(
                "induced_map: f is {}x{}, src ambient {}, dst ambient {}",
                f.rows(),
                f.cols(),
                src.ambient_dim(),
                dst.ambient_dim()
            )));
        }
        // f must carry bottom into bottom and top into top
        let bot_img = src.bottom.map_by(f);
        if !dst.bottom.contains(&bot_img) {
            return Err(LinAlgError::NotWellDefined(
                "image of source bottom escapes destination bottom".into(),
            ));
        }
        let top_img = src.top.map_by(f);
        if !dst.top.contains(&top_img) {
            return Err(LinAlgError::NotWellDefined(
                "image of source top escapes destination top".into(),
            ));
        }
        let mut cols = Vec::with_capacity(src.dim());
        for j in 0..src.dim() {
            let v = f.apply(&src.reps.column(j));
            cols.push(dst.project(&v)?);
        }
        Ok(RationalMatrix::from_fn(dst.dim(), src.dim(), |i, j| {
            cols[j][i].clone()
        }))
    }
}

/// Five-argument form of the induced-map operation: `f` descends to
/// `src_sub/src_quot → dst_sub/dst_quot`.
pub fn induced_map(
    f: &RationalMatrix,
    src_sub: &Subspace,
    src_quot: &Subspace,
    dst_sub: &Subspace,
    dst_quot: &Subspace,
) -> Result<RationalMatrix, LinAlgError> {
    let src = Subquotient::new(src_sub.clone(), src_quot.clone())?;
    let dst = Subquotient::new(dst_sub.clone(), dst_quot.clone())?;
    Subquotient::induced_map(f, &src, &dst)
}

/// Symmetric bilinear form; construction rejects asymmetric matrices with a
/// diagnostic naming the first offending entry pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricForm {
    dim: usize,
    matrix: RationalMatrix,
}

impl SymmetricForm {
    pub fn new(matrix: RationalMatrix) -> Result<Self, LinAlgError> {
        if let Some((i, j)) = matrix.asymmetry_witness() {
            return Err(LinAlgError::NotSymmetric(i, j));
        }
        Ok(SymmetricForm {
            dim: matrix.rows(),
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }
}

/// Inertia counts of a symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub null: usize,
}

impl Signature {
    /// sign(Q) := pos − neg.
    pub fn sign(&self) -> i64 {
        self.pos as i64 - self.neg as i64
    }
}

/// Signature by symmetric congruence diagonalization with exact pivoting.
///
/// Zero diagonal entries with a nonzero off-diagonal partner are handled by
/// the standard hyperbolic move (add row/column j into i), which stays in ℚ.
pub fn signature(form: &SymmetricForm) -> Signature {
    let n = form.dim();
    let mut s = form.matrix().clone();
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut k = 0usize;
    while k < n {
        if s.at(k, k).is_zero() {
            // prefer a later nonzero diagonal entry
            if let Some(j) = ((k + 1)..n).find(|&j| !s.at(j, j).is_zero()) {
                congruence_swap(&mut s, k, j);
            } else if let Some((i, j)) = find_offdiag(&s, k) {
                // all remaining diagonal entries vanish; make one
                if i != k {
                    congruence_swap(&mut s, k, i);
                }
                let jj = if j == k { i } else { j };
                congruence_add(&mut s, k, jj);
            } else {
                break; // remaining block is zero
            }
        }
        let pivot = s.at(k, k).clone();
        if pivot.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        let inv = pivot.recip();
        for i in (k + 1)..n {
            if !s.at(i, k).is_zero() {
                let f = s.at(i, k) * &inv;
                // row_i -= f * row_k, then col_i -= f * col_k
                for j in k..n {
                    let v = s.at(i, j) - &f * s.at(k, j);
                    s.set(i, j, v);
                }
                for j in k..n {
                    let v = s.at(j, i) - &f * s.at(j, k);
                    s.set(j, i, v);
                }
            }
        }
        k += 1;
    }
    Signature {
        pos,
        neg,
        null: n - pos - neg,
    }
}

fn congruence_swap(s: &mut RationalMatrix, a: usize, b: usize) {
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
}

fn congruence_add(s: &mut RationalMatrix, a: usize, b: usize) {
    let n = s.rows();
    for j in 0..n {
        let v = s.at(a, j) + s.at(b, j);
        s.set(a, j, v);
    }
    for i in 0..n {
        let v = s.at(i, a) + s.at(i, b);
        s.set(i, a, v);
    }
}

fn find_offdiag(s: &RationalMatrix, k: usize) -> Option<(usize, usize)> {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[i64]) -> SymmetricForm {
        let n = entries.len();
        let mut m = RationalMatrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, rat(e));
        }
        SymmetricForm::new(m).unwrap()
    }

    #[test]
    fn signature_of_diagonal() {
        let sig = signature(&diag(&[1, 1, -1]));
        assert_eq!((sig.pos, sig.neg, sig.null), (2, 1, 0));
    }

    #[test]
    fn signature_of_hyperbolic_plane() {
        let m = RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let sig = signature(&SymmetricForm::new(m).unwrap());
        assert_eq!((sig.pos, sig.neg, sig.null), (1, 1, 0));
    }

    #[test]
    fn signature_with_null_directions() {
        let sig = signature(&diag(&[0, -3, 0, 5]));
        assert_eq!((sig.pos, sig.neg, sig.null), (1, 1, 2));
    }

    #[test]
    fn asymmetric_input_names_offending_pair() {
        let m = RationalMatrix::from_i64_rows(&[&[0, 1], &[2, 0]]);
        match SymmetricForm::new(m) {
            Err(LinAlgError::NotSymmetric(0, 1)) => {}
            other => panic!("expected NotSymmetric(0,1), got {:?}", other),
        }
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        assert_eq!(kernel(&RationalMatrix::identity(4)).dim(), 0);
        assert_eq!(kernel(&RationalMatrix::zeros(3, 5)), Subspace::full(5));
    }

    #[test]
    fn intersect_coordinate_planes() {
        let e12 = Subspace::from_columns(RationalMatrix::from_i64_rows(&[
            &[1, 0],
            &[0, 1],
            &[0, 0],
        ]));
        let e23 = Subspace::from_columns(RationalMatrix::from_i64_rows(&[
            &[0, 0],
            &[1, 0],
            &[0, 1],
        ]));
        let meet = intersect(&e12, &e23).unwrap();
        assert_eq!(meet.dim(), 1);
        assert!(meet.contains_vector(&[rat(0), rat(1), rat(0)]));
    }

    #[test]
    fn dimension_formula() {
        // dim(a) + dim(b) = dim(a∩b) + dim(a+b) on a nontrivial pair
        let a = Subspace::from_columns(RationalMatrix::from_i64_rows(&[
            &[1, 0],
            &[2, 1],
            &[0, 1],
            &[1, 0],
        ]));
        let b = Subspace::from_columns(RationalMatrix::from_i64_rows(&[
            &[1, 1],
            &[2, 0],
            &[0, 3],
            &[1, 7],
        ]));
        let meet = intersect(&a, &b).unwrap();
        let join = sum(&a, &b).unwrap();
        assert_eq!(a.dim() + b.dim(), meet.dim() + join.dim());
    }

    #[test]
    fn subspace_equality_is_basis_independent() {
        let s1 = Subspace::from_columns(RationalMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]));
        let s2 = Subspace::from_columns(RationalMatrix::from_i64_rows(&[&[3, 5], &[1, 2]]));
        assert_eq!(s1, s2); // both are all of ℚ²
        let l1 = Subspace::from_columns(RationalMatrix::from_i64_rows(&[&[2], &[4]]));
        let l2 = Subspace::from_columns(RationalMatrix::from_i64_rows(&[&[1], &[2]]));
        assert_eq!(l1, l2);
    }

    #[test]
    fn quotient_by_zero_is_invertible() {
        let (proj, d) = quotient_map(3, &Subspace::zero(3)).unwrap();
        assert_eq!(d, 3);
        assert!(proj.inverse().is_some());
    }

    #[test]
    fn quotient_kills_exactly_the_subspace() {
        let line = Subspace::from_columns(RationalMatrix::from_i64_rows(&[&[1], &[0]]));
        let (proj, d) = quotient_map(2, &line).unwrap();
        assert_eq!(d, 1);
        assert!(proj.mul(line.basis()).is_zero());
        assert_eq!(kernel(&proj), line);
    }

    #[test]
    fn induced_map_rejects_non_respecting_maps() {
        // f = swap on ℚ²; subquotient ℚ²/span(e1); f does not preserve span(e1)
        let f = RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let sub = Subspace::full(2);
        let quot = Subspace::from_columns(RationalMatrix::from_i64_rows(&[&[1], &[0]]));
        let r = induced_map(&f, &sub, &quot, &sub, &quot);
        assert!(matches!(r, Err(LinAlgError::NotWellDefined(_))));
    }

    #[test]
    fn induced_map_on_valid_subquotient() {
        // f = diag(2,3) preserves both coordinate lines
        let f = RationalMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]);
        let sub = Subspace::full(2);
        let quot = Subspace::from_columns(RationalMatrix::from_i64_rows(&[&[1], &[0]]));
        let m = induced_map(&f, &sub, &quot, &sub, &quot).unwrap();
        assert_eq!(m.rows(), 1);
        assert_eq!(*m.at(0, 0), rat(3));
    }

    #[test]
    fn solve_and_inverse_roundtrip() {
        let a = RationalMatrix::from_i64_rows(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RationalMatrix::identity(3));
        let rhs = RationalMatrix::from_i64_rows(&[&[1], &[0], &[2]]);
        let x = a.solve(&rhs).unwrap();
        assert_eq!(a.mul(&x), rhs);
    }

    #[test]
    fn zero_dimensional_edge_cases() {
        let z = RationalMatrix::zeros(0, 0);
        assert_eq!(z.rank(), 0);
        assert_eq!(kernel(&z).dim(), 0);
        let e = Subspace::zero(0);
        assert_eq!(e.dim(), 0);
        let sig = signature(&SymmetricForm::new(z).unwrap());
        assert_eq!((sig.pos, sig.neg, sig.null), (0, 0, 0));
    }
}
