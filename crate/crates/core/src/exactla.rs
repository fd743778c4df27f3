//! Exact rational linear algebra.
//!
//! Everything downstream (algebras, sheaves, Kähler modules) reduces to
//! kernels, images and quotients of matrices over ℚ. Subspaces are kept in
//! reduced row echelon form so that two subspaces are equal exactly when
//! their stored bases are equal.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`. Panics on a zero denominator.
pub fn qr(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"-5"`, `"2/3"`, `"−3/7"` (Unicode minus accepted) exactly.
/// Decimal and exponent notation are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let normalized = trimmed.replace('\u{2212}', "-");
    let (num, den) = match normalized.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (normalized.as_str(), None),
    };
    let parse_int = |s: &str, allow_sign: bool| -> Result<BigInt, ParseRationalError> {
        let digits = if allow_sign {
            s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s)
        } else {
            s
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError::Invalid(text.to_string()));
        }
        s.parse::<BigInt>()
            .map_err(|_| ParseRationalError::Invalid(text.to_string()))
    };
    let numerator = parse_int(num, true)?;
    let denominator = match den {
        Some(d) => parse_int(d, false)?,
        None => BigInt::one(),
    };
    if denominator.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(text.to_string()));
    }
    Ok(Rational::new(numerator, denominator))
}

pub fn zero_vector(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vec<Rational> {
    let mut v = zero_vector(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add_vectors(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vectors(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vector(s: &Rational, v: &[Rational]) -> Vec<Rational> {
    v.iter().map(|x| s * x).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Dense row-major matrix over ℚ.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
pub struct RaggedRows {
    pub row: usize,
    pub expected: usize,
    pub found: usize,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from explicit rows; `cols` is needed for the 0-row case.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self, RaggedRows> {
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(RaggedRows { row: i, expected: cols, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { rows: n_rows, cols, data })
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self { rows, cols, data: entries.iter().map(|&e| q(e)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vector(&self.data)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix columns");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: add_vectors(&self.data, &other.data) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: sub_vectors(&self.data, &other.data) }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { rows: self.rows, cols: self.cols, data: scale_vector(s, &self.data) }
    }

    /// Block-diagonal sum of the given matrices.
    pub fn block_diagonal(blocks: &[Matrix]) -> Self {
        let rows = blocks.iter().map(Matrix::rows).sum();
        let cols = blocks.iter().map(Matrix::cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &m[(i, j)] - &factor * &m[(r, j)];
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Null space `{v : self·v = 0}`.
    pub fn kernel(&self) -> Subspace {
        kernel(self)
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::span(self.rows, self.columns())
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let v = &out[(i, j)] + a * b;
                    out[(i, j)] = v;
                }
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Bilinear map `ℚ^d0 × ℚ^d1 → ℚ^d2` stored as coefficients `c[i][j][k]`.
///
/// Used both for algebra structure constants (`d0 = d1 = d2`) and for
/// module actions (`A × M → M`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    data: Vec<Rational>,
}

impl Tensor3 {
    pub fn zeros(d0: usize, d1: usize, d2: usize) -> Self {
        Self { dims: (d0, d1, d2), data: vec![Rational::zero(); d0 * d1 * d2] }
    }

    pub fn from_fn(
        d0: usize,
        d1: usize,
        d2: usize,
        mut f: impl FnMut(usize, usize) -> Vec<Rational>,
    ) -> Self {
        let mut t = Self::zeros(d0, d1, d2);
        for i in 0..d0 {
            for j in 0..d1 {
                let v = f(i, j);
                assert_eq!(v.len(), d2, "bilinear map output has wrong length");
                t.set_fiber(i, j, v);
            }
        }
        t
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.data[self.offset(i, j) + k]
    }

    /// `c[i][j][·]`, the image of the basis pair `(i, j)`.
    pub fn fiber(&self, i: usize, j: usize) -> &[Rational] {
        let o = self.offset(i, j);
        &self.data[o..o + self.dims.2]
    }

    pub fn set_fiber(&mut self, i: usize, j: usize, v: Vec<Rational>) {
        assert_eq!(v.len(), self.dims.2);
        let o = self.offset(i, j);
        for (k, x) in v.into_iter().enumerate() {
            self.data[o + k] = x;
        }
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        assert!(i < self.dims.0 && j < self.dims.1, "tensor index out of range");
        (i * self.dims.1 + j) * self.dims.2
    }

    pub fn apply(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.dims.0);
        assert_eq!(y.len(), self.dims.1);
        let mut out = zero_vector(self.dims.2);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let coeff = xi * yj;
                for (k, c) in self.fiber(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &coeff * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `y ↦ self(x, y)`.
    pub fn left_operator(&self, x: &[Rational]) -> Matrix {
        let cols: Vec<_> = (0..self.dims.1)
            .map(|j| self.apply(x, &unit_vector(self.dims.1, j)))
            .collect();
        Matrix::from_columns(self.dims.2, &cols)
    }
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor3 {:?}", self.dims)
    }
}

/// Linear subspace of `ℚ^ambient_dim` with a canonical basis.
///
/// The basis rows are in reduced row echelon form: each basis vector has a
/// leading 1 in its pivot column and zeros in every other pivot column.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: (0..ambient_dim).map(|i| unit_vector(ambient_dim, i)).collect(),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn span<I>(ambient_dim: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<Rational>>,
    {
        let rows: Vec<Vec<Rational>> = vectors
            .into_iter()
            .inspect(|v| assert_eq!(v.len(), ambient_dim, "spanning vector has wrong length"))
            .filter(|v| !is_zero_vector(v))
            .collect();
        if rows.is_empty() {
            return Self::zero(ambient_dim);
        }
        let m = Matrix::from_rows(ambient_dim, rows).expect("lengths checked");
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Self { ambient_dim, basis, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis vectors as the rows of a `dim × ambient_dim` matrix.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_rows(self.ambient_dim, self.basis.clone()).expect("basis rows have ambient length")
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v ∉ self`.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(v.len(), self.ambient_dim);
        let coords: Vec<Rational> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut residual = v.to_vec();
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (r, x) in residual.iter_mut().zip(b) {
                if !x.is_zero() {
                    *r -= c * x;
                }
            }
        }
        is_zero_vector(&residual).then_some(coords)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Inverse of [`Subspace::coordinates`].
    pub fn from_coordinates(&self, coords: &[Rational]) -> Vec<Rational> {
        assert_eq!(coords.len(), self.dim());
        let mut out = zero_vector(self.ambient_dim);
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                if !x.is_zero() {
                    *o += c * x;
                }
            }
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        Subspace::span(self.ambient_dim, self.basis.iter().chain(&other.basis).cloned())
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        // Solve Σ aᵢuᵢ − Σ bⱼvⱼ = 0 and map the a-part back.
        let mut cols: Vec<Vec<Rational>> = self.basis.clone();
        cols.extend(other.basis.iter().map(|v| v.iter().map(|x| -x).collect()));
        let system = Matrix::from_columns(self.ambient_dim, &cols);
        let ker = system.kernel();
        Subspace::span(
            self.ambient_dim,
            ker.basis().iter().map(|k| self.from_coordinates(&k[..self.dim()])),
        )
    }

    /// Image of this subspace under a linear map.
    pub fn map(&self, m: &Matrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient_dim);
        Subspace::span(m.rows(), self.basis.iter().map(|b| m.mul_vec(b)))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in ℚ^{}", self.dim(), self.ambient_dim)?;
        for b in &self.basis {
            let row: Vec<String> = b.iter().map(ToString::to_string).collect();
            write!(f, "; [{}]", row.join(" "))?;
        }
        write!(f, ")")
    }
}

/// Full solution space of `m·v = 0` in canonical echelon basis.
pub fn kernel(m: &Matrix) -> Subspace {
    let (r, pivots) = m.rref();
    let n = m.cols();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let vectors = free.iter().map(|&f| {
        let mut v = zero_vector(n);
        v[f] = Rational::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -r[(row, f)].clone();
        }
        v
    });
    Subspace::span(n, vectors)
}

/// Result of [`solve`]: a particular solution (if any) and whether it is unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Option<Vec<Rational>>,
    /// `ker m = 0`; reported regardless of consistency.
    pub unique: bool,
}

impl Solution {
    pub fn is_consistent(&self) -> bool {
        self.particular.is_some()
    }
}

/// Solves `m·v = rhs`. Inconsistency is reported as `particular == None`.
pub fn solve(m: &Matrix, rhs: &[Rational]) -> Solution {
    assert_eq!(rhs.len(), m.rows(), "right-hand side length must equal row count");
    let n = m.cols();
    let augmented = Matrix::from_fn(m.rows(), n + 1, |i, j| {
        if j < n {
            m[(i, j)].clone()
        } else {
            rhs[i].clone()
        }
    });
    let (r, pivots) = augmented.rref();
    let unique = pivots.iter().filter(|&&p| p < n).count() == n;
    if pivots.last() == Some(&n) {
        return Solution { particular: None, unique };
    }
    let mut v = zero_vector(n);
    for (row, &p) in pivots.iter().enumerate() {
        v[p] = r[(row, n)].clone();
    }
    Solution { particular: Some(v), unique }
}

/// Solves `x·m = rhs_row` for each row of `rhs`, i.e. finds `X` with `X·m = rhs`.
/// Returns `None` if any row is inconsistent; the flag reports uniqueness.
pub fn solve_left(m: &Matrix, rhs: &Matrix) -> (Option<Matrix>, bool) {
    assert_eq!(m.cols(), rhs.cols());
    let mt = m.transpose();
    let mut rows = Vec::with_capacity(rhs.rows());
    let unique = mt.is_injective();
    for i in 0..rhs.rows() {
        match solve(&mt, rhs.row(i)).particular {
            Some(x) => rows.push(x),
            None => return (None, unique),
        }
    }
    (Some(Matrix::from_rows(m.rows(), rows).expect("solution rows")), unique)
}

/// A quotient `ℚ^n / sub` with explicit projection and a linear section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub dim: usize,
    /// `dim × n`; annihilates exactly `sub`.
    pub projection: Matrix,
    /// `n × dim`; `projection · section = identity`.
    pub section: Matrix,
}

/// Quotient of `ℚ^ambient_dim` by `sub`; quotient coordinates are the
/// non-pivot coordinates of `sub`'s echelon basis.
pub fn quotient_space(ambient_dim: usize, sub: &Subspace) -> Quotient {
    assert_eq!(sub.ambient_dim(), ambient_dim, "subspace lives in a different ambient space");
    let free: Vec<usize> = (0..ambient_dim).filter(|c| !sub.pivots().contains(c)).collect();
    let dim = free.len();
    let mut projection = Matrix::zeros(dim, ambient_dim);
    let mut section = Matrix::zeros(ambient_dim, dim);
    for (row, &f) in free.iter().enumerate() {
        projection[(row, f)] = Rational::one();
        section[(f, row)] = Rational::one();
        for (b, &p) in sub.basis().iter().zip(sub.pivots()) {
            projection[(row, p)] = -b[f].clone();
        }
    }
    Quotient { dim, projection, section }
}

/// `span{ mult(a, b) : a ∈ basis(u), b ∈ basis(v) }`.
pub fn product_subspace(u: &Subspace, v: &Subspace, mult: &Tensor3) -> Subspace {
    let (d0, d1, d2) = mult.dims();
    assert_eq!(u.ambient_dim(), d0);
    assert_eq!(v.ambient_dim(), d1);
    let products = u
        .basis()
        .iter()
        .flat_map(|a| v.basis().iter().map(move |b| mult.apply(a, b)));
    Subspace::span(d2, products)
}

/// Rational roots of `Σ coeffs[i]·tⁱ` (lowest degree first), without multiplicity,
/// sorted ascending. The zero polynomial has no well-defined root set and yields
/// an empty list.
pub fn rational_roots(coeffs: &[Rational]) -> Vec<Rational> {
    let mut c: Vec<Rational> = coeffs.to_vec();
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    let lowest = c.iter().position(|x| !x.is_zero()).expect("nonzero polynomial");
    if lowest > 0 {
        roots.push(Rational::zero());
        c.drain(..lowest);
    }
    if c.len() > 1 {
        // Clear denominators to get integer coefficients.
        let lcm = c.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
        let ints: Vec<BigInt> = c.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let constant = ints[0].abs();
        let leading = ints[ints.len() - 1].abs();
        for p in divisors(&constant) {
            for qd in divisors(&leading) {
                for sign in [1i64, -1] {
                    let candidate = Rational::new(&p * BigInt::from(sign), qd.clone());
                    if evaluate_poly(&c, &candidate).is_zero() && !roots.contains(&candidate) {
                        roots.push(candidate);
                    }
                }
            }
        }
    }
    roots.sort();
    roots
}

pub fn evaluate_poly(coeffs: &[Rational], t: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Determinant by permutation expansion; independent of elimination.
    fn det_by_permutations(m: &Matrix) -> Rational {
        fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
            if n == 0 {
                return vec![(vec![], 1)];
            }
            let mut out = Vec::new();
            for (p, s) in permutations(n - 1) {
                for pos in 0..n {
                    let mut np = p.clone();
                    np.insert(pos, n - 1);
                    let shift = (n - 1 - pos) as i32;
                    out.push((np, if shift % 2 == 0 { s } else { -s }));
                }
            }
            out
        }
        let n = m.rows();
        permutations(n)
            .into_iter()
            .map(|(p, s)| {
                let prod = (0..n).fold(q(1), |acc, i| acc * &m[(i, p[i])]);
                if s > 0 { prod } else { -prod }
            })
            .fold(q(0), |a, b| a + b)
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut with_last: Vec<Vec<usize>> = subsets(n - 1, k - 1);
        for s in &mut with_last {
            s.push(n - 1);
        }
        let mut out = subsets(n - 1, k);
        out.extend(with_last);
        out
    }

    /// Rank as the size of the largest nonvanishing minor.
    fn rank_by_minors(m: &Matrix) -> usize {
        let max = m.rows().min(m.cols());
        (1..=max)
            .rev()
            .find(|&k| {
                subsets(m.rows(), k).iter().any(|rs| {
                    subsets(m.cols(), k).iter().any(|cs| {
                        let minor = Matrix::from_fn(k, k, |i, j| m[(rs[i], cs[j])].clone());
                        !det_by_permutations(&minor).is_zero()
                    })
                })
            })
            .unwrap_or(0)
    }

    fn dual_mult_map() -> Matrix {
        // columns e_i⊗e_j in order (1⊗1, 1⊗x, x⊗1, x⊗x), basis {1, x}
        Matrix::from_i64(2, 4, &[1, 0, 0, 0, 0, 1, 1, 0])
    }

    #[test]
    fn parse_accepts_exact_literals() {
        assert_eq!(parse_rational("2/3").unwrap(), qr(2, 3));
        assert_eq!(parse_rational("-5").unwrap(), q(-5));
        assert_eq!(parse_rational("0").unwrap(), q(0));
        assert_eq!(parse_rational("\u{2212}3/7").unwrap(), qr(-3, 7));
        assert_eq!(parse_rational(" 4/6 ").unwrap(), qr(2, 3));
    }

    #[test]
    fn parse_rejects_bad_literals() {
        assert!(matches!(parse_rational("1/0"), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(matches!(parse_rational("0.5"), Err(ParseRationalError::Invalid(_))));
        assert!(matches!(parse_rational("1e3"), Err(ParseRationalError::Invalid(_))));
        assert!(matches!(parse_rational("1/-2"), Err(ParseRationalError::Invalid(_))));
        assert!(matches!(parse_rational(""), Err(ParseRationalError::Empty)));
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        assert!(kernel(&Matrix::identity(2)).is_zero());
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        assert_eq!(kernel(&Matrix::zeros(2, 3)), Subspace::full(3));
    }

    #[test]
    fn kernel_of_dual_number_multiplication() {
        let m = dual_mult_map();
        // oracle: nullity = cols - rank, rank from minors
        let oracle_nullity = m.cols() - rank_by_minors(&m);
        assert_eq!(oracle_nullity, 2);
        let ker = kernel(&m);
        assert_eq!(ker.dim(), 2);
        for b in ker.basis() {
            assert!(is_zero_vector(&m.mul_vec(b)));
        }
    }

    #[test]
    fn solve_examples() {
        let s = solve(&Matrix::identity(2), &[q(1), q(2)]);
        assert_eq!(s.particular, Some(vec![q(1), q(2)]));
        assert!(s.unique);

        let s = solve(&Matrix::zeros(2, 2), &[q(1), q(0)]);
        assert!(!s.is_consistent());

        let m = Matrix::from_i64(1, 2, &[1, 1]);
        let s = solve(&m, &[q(3)]);
        let v = s.particular.expect("consistent");
        assert_eq!(&v[0] + &v[1], q(3));
        assert!(!s.unique);
    }

    #[test]
    fn quotient_examples() {
        let sub = Subspace::span(3, [unit_vector(3, 0)]);
        let quo = quotient_space(3, &sub);
        assert_eq!(quo.dim, 2);
        assert_eq!(&quo.projection * &quo.section, Matrix::identity(2));
        assert!(is_zero_vector(&quo.projection.mul_vec(&unit_vector(3, 0))));

        let quo = quotient_space(4, &Subspace::zero(4));
        assert_eq!(quo.projection, Matrix::identity(4));
    }

    #[test]
    fn product_subspace_examples() {
        let pointwise = Tensor3::from_fn(3, 3, 3, |i, j| {
            if i == j { unit_vector(3, i) } else { zero_vector(3) }
        });
        let zero = Subspace::zero(3);
        let u = Subspace::span(3, [vec![q(1), q(1), q(0)]]);
        assert!(product_subspace(&zero, &u, &pointwise).is_zero());
        assert_eq!(product_subspace(&u, &u, &pointwise), u);
    }

    #[test]
    fn rational_roots_finds_all() {
        // (t - 1/2)(t + 3) t = t³ + 5/2 t² - 3/2 t
        let roots = rational_roots(&[q(0), qr(-3, 2), qr(5, 2), q(1)]);
        assert_eq!(roots, vec![q(-3), q(0), qr(1, 2)]);
        // t² - 2 has none
        assert!(rational_roots(&[q(-2), q(0), q(1)]).is_empty());
    }

    #[test]
    fn intersection_and_sum() {
        let a = Subspace::span(3, [unit_vector(3, 0), unit_vector(3, 1)]);
        let b = Subspace::span(3, [unit_vector(3, 1), unit_vector(3, 2)]);
        assert_eq!(a.intersection(&b), Subspace::span(3, [unit_vector(3, 1)]));
        assert_eq!(a.sum(&b), Subspace::full(3));
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c)
                .prop_map(move |v| Matrix::from_i64(r, c, &v))
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            prop_assert_eq!(kernel(&m).dim() + m.rank(), m.cols());
            prop_assert_eq!(m.rank(), rank_by_minors(&m));
        }

        #[test]
        fn kernel_basis_is_canonical(m in small_matrix(), seed in 0u64..1000) {
            let ker = kernel(&m);
            // rebuild from a shuffled, rescaled spanning set
            let mut vecs: Vec<Vec<Rational>> = ker.basis().to_vec();
            let n = vecs.len();
            if n > 1 {
                vecs.rotate_left((seed as usize) % n);
                let first = vecs[0].clone();
                vecs[1] = add_vectors(&vecs[1], &first);
            }
            let vecs: Vec<_> = vecs.iter().map(|v| scale_vector(&q(seed as i64 % 5 + 1), v)).collect();
            prop_assert_eq!(Subspace::span(m.cols(), vecs), ker);
        }

        #[test]
        fn quotient_projection_section(m in small_matrix()) {
            let sub = m.image();
            let quo = quotient_space(sub.ambient_dim(), &sub);
            prop_assert_eq!(quo.dim, sub.ambient_dim() - sub.dim());
            prop_assert_eq!(&quo.projection * &quo.section, Matrix::identity(quo.dim));
            for b in sub.basis() {
                prop_assert!(is_zero_vector(&quo.projection.mul_vec(b)));
            }
            prop_assert_eq!(kernel(&quo.projection), sub);
        }
    }
}
