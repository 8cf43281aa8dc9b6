#![allow(clippy::needless_range_loop)]

//! Exact integer lattice algebra.
//!
//! Dense arbitrary-precision matrices, Smith and Hermite normal forms,
//! kernels, saturated eigensublattices of involutions, and finite quotient
//! groups `Z^r / span(generators)`.  All arithmetic is exact; pivots in the
//! normal-form algorithms can exceed machine words even for small inputs.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Int = BigInt;
/// Column vector with exact integer entries.
pub type Vector = Vec<Int>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("matrix with {rows} rows and {cols} cols cannot hold {found} entries")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        found: usize,
    },
    #[error("generator has length {found}, ambient rank is {ambient}")]
    GeneratorLength { ambient: usize, found: usize },
    #[error("sublattice has infinite index in the ambient lattice")]
    InfiniteIndex,
    #[error("quotient of order {0} is too large to enumerate")]
    QuotientTooLarge(Int),
    #[error("matrix is not an involution: T^2 != I")]
    NotInvolution,
    #[error("involution is not anti-symplectic: T^t E T != -E")]
    NotAntiSymplectic,
    #[error("expected a square matrix of even size, got {rows}x{cols}")]
    NotEvenSquare { rows: usize, cols: usize },
}

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Int>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Int>) -> Result<Self, LatticeError> {
        if entries.len() != rows * cols {
            return Err(LatticeError::DimensionMismatch {
                rows,
                cols,
                found: entries.len(),
            });
        }
        Ok(IntegerMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    /// Convenience constructor from machine-integer rows.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&x| Int::from(x)));
        }
        IntegerMatrix {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn from_columns(cols: &[Vector], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for i in 0..rows {
                m[(i, j)] = col[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a * &rhs[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vector {
        assert_eq!(
            self.cols,
            v.len(),
            "dimension mismatch in matrix-vector product"
        );
        let mut out = vec![Int::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i] += &self[(i, j)] * &v[j];
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn neg(&self) -> Self {
        IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| -a).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Entries as machine integers, when they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_i64()).collect())
            .collect()
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..=i).all(|j| self[(i, j)] == -&self[(j, i)]))
    }
}

impl Index<(usize, usize)> for IntegerMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// The rank-`2g` lattice with the standard unimodular symplectic pairing
/// `<e_i, f_j> = delta_ij` in the basis `e_1..e_g, f_1..f_g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticLattice {
    genus: usize,
}

impl SymplecticLattice {
    pub fn new(genus: usize) -> Self {
        SymplecticLattice { genus }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    /// The matrix `[[0, I], [-I, 0]]` of the cup pairing.
    pub fn cup_form(&self) -> IntegerMatrix {
        let g = self.genus;
        let mut e = IntegerMatrix::zeros(2 * g, 2 * g);
        for i in 0..g {
            e[(i, g + i)] = Int::one();
            e[(g + i, i)] = -Int::one();
        }
        e
    }

    /// `u^t E v`, computed without materializing the form matrix.
    pub fn pairing(&self, u: &[Int], v: &[Int]) -> Int {
        let g = self.genus;
        assert_eq!(u.len(), 2 * g);
        assert_eq!(v.len(), 2 * g);
        let mut acc = Int::zero();
        for i in 0..g {
            acc += &u[i] * &v[g + i];
            acc -= &u[g + i] * &v[i];
        }
        acc
    }
}

/// An integral involution `T` of the rank-`2g` lattice that reverses the
/// standard symplectic pairing: `T^2 = I` and `T^t E T = -E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiSymplecticInvolution {
    matrix: IntegerMatrix,
}

impl AntiSymplecticInvolution {
    pub fn new(matrix: IntegerMatrix) -> Result<Self, LatticeError> {
        if !matrix.is_square() || !matrix.rows().is_multiple_of(2) {
            return Err(LatticeError::NotEvenSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if !matrix.mul(&matrix).is_identity() {
            return Err(LatticeError::NotInvolution);
        }
        let e = SymplecticLattice::new(matrix.rows() / 2).cup_form();
        let conjugated = matrix.transpose().mul(&e).mul(&matrix);
        if conjugated != e.neg() {
            return Err(LatticeError::NotAntiSymplectic);
        }
        Ok(AntiSymplecticInvolution { matrix })
    }

    pub fn genus(&self) -> usize {
        self.matrix.rows() / 2
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[Int]) -> Vector {
        self.matrix.mul_vec(v)
    }

    /// The negated involution; negation preserves both axioms.
    pub fn negated(&self) -> Self {
        AntiSymplecticInvolution {
            matrix: self.matrix.neg(),
        }
    }
}

/// Smith decomposition `U * M * V = D` with `U`, `V` unimodular and `D`
/// diagonal, `d_i >= 0`, `d_i | d_{i+1}`.
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v_inv: IntegerMatrix,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        let n = self.d.rows().min(self.d.cols());
        (0..n).take_while(|&i| !self.d[(i, i)].is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<Int> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Solves `m x = b` for the decomposed matrix, reusing the transforms.
    pub fn solve(&self, b: &[Int]) -> Option<Vector> {
        let rows = self.d.rows();
        let cols = self.d.cols();
        assert_eq!(rows, b.len(), "right-hand side length mismatch");
        let rhs = self.u.mul_vec(b);
        let mut y = vec![Int::zero(); cols];
        let n = rows.min(cols);
        for i in 0..rows {
            if i < n && !self.d[(i, i)].is_zero() {
                let (q, r) = rhs[i].div_rem(&self.d[(i, i)]);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            } else if !rhs[i].is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&y))
    }
}

struct SnfWork {
    d: IntegerMatrix,
    u: IntegerMatrix,
    u_inv: IntegerMatrix,
    v: IntegerMatrix,
    v_inv: IntegerMatrix,
}

impl SnfWork {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.d.cols() {
            let tmp = self.d[(a, j)].clone();
            self.d[(a, j)] = self.d[(b, j)].clone();
            self.d[(b, j)] = tmp;
        }
        for j in 0..self.u.cols() {
            let tmp = self.u[(a, j)].clone();
            self.u[(a, j)] = self.u[(b, j)].clone();
            self.u[(b, j)] = tmp;
        }
        for i in 0..self.u_inv.rows() {
            let tmp = self.u_inv[(i, a)].clone();
            self.u_inv[(i, a)] = self.u_inv[(i, b)].clone();
            self.u_inv[(i, b)] = tmp;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.d.rows() {
            let tmp = self.d[(i, a)].clone();
            self.d[(i, a)] = self.d[(i, b)].clone();
            self.d[(i, b)] = tmp;
        }
        for i in 0..self.v.rows() {
            let tmp = self.v[(i, a)].clone();
            self.v[(i, a)] = self.v[(i, b)].clone();
            self.v[(i, b)] = tmp;
        }
        for j in 0..self.v_inv.cols() {
            let tmp = self.v_inv[(a, j)].clone();
            self.v_inv[(a, j)] = self.v_inv[(b, j)].clone();
            self.v_inv[(b, j)] = tmp;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.d.cols() {
            let e = -&self.d[(a, j)];
            self.d[(a, j)] = e;
        }
        for j in 0..self.u.cols() {
            let e = -&self.u[(a, j)];
            self.u[(a, j)] = e;
        }
        for i in 0..self.u_inv.rows() {
            let e = -&self.u_inv[(i, a)];
            self.u_inv[(i, a)] = e;
        }
    }

    /// row_i += c * row_k
    fn add_row(&mut self, i: usize, k: usize, c: &Int) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.d.cols() {
            let delta = c * &self.d[(k, j)];
            self.d[(i, j)] += delta;
        }
        for j in 0..self.u.cols() {
            let delta = c * &self.u[(k, j)];
            self.u[(i, j)] += delta;
        }
        for r in 0..self.u_inv.rows() {
            let delta = c * &self.u_inv[(r, i)];
            self.u_inv[(r, k)] -= delta;
        }
    }

    /// col_j += c * col_k
    fn add_col(&mut self, j: usize, k: usize, c: &Int) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.d.rows() {
            let delta = c * &self.d[(i, k)];
            self.d[(i, j)] += delta;
        }
        for i in 0..self.v.rows() {
            let delta = c * &self.v[(i, k)];
            self.v[(i, j)] += delta;
        }
        for s in 0..self.v_inv.cols() {
            let delta = c * &self.v_inv[(j, s)];
            self.v_inv[(k, s)] -= delta;
        }
    }

    fn min_abs_nonzero(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in k..self.d.rows() {
            for j in k..self.d.cols() {
                let e = &self.d[(i, j)];
                if e.is_zero() {
                    continue;
                }
                match best {
                    Some(b) if self.d[b].abs() <= e.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

/// Smith normal form with both transforms and their inverses.
///
/// Accepts any integer matrix, including zero-sized ones.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut w = SnfWork {
        d: m.clone(),
        u: IntegerMatrix::identity(rows),
        u_inv: IntegerMatrix::identity(rows),
        v: IntegerMatrix::identity(cols),
        v_inv: IntegerMatrix::identity(cols),
    };
    for k in 0..rows.min(cols) {
        loop {
            let Some(pivot) = w.min_abs_nonzero(k) else {
                // remaining submatrix is zero
                return SmithDecomposition {
                    u: w.u,
                    d: w.d,
                    v: w.v,
                    u_inv: w.u_inv,
                    v_inv: w.v_inv,
                };
            };
            w.swap_rows(k, pivot.0);
            w.swap_cols(k, pivot.1);
            if w.d[(k, k)].is_negative() {
                w.negate_row(k);
            }
            let mut dirty = false;
            for i in k + 1..rows {
                if !w.d[(i, k)].is_zero() {
                    let q = &w.d[(i, k)] / &w.d[(k, k)];
                    w.add_row(i, k, &(-q));
                    dirty |= !w.d[(i, k)].is_zero();
                }
            }
            for j in k + 1..cols {
                if !w.d[(k, j)].is_zero() {
                    let q = &w.d[(k, j)] / &w.d[(k, k)];
                    w.add_col(j, k, &(-q));
                    dirty |= !w.d[(k, j)].is_zero();
                }
            }
            if dirty {
                continue;
            }
            // pivot must divide every remaining entry before moving on
            let p = w.d[(k, k)].clone();
            let mut offender = None;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(&w.d[(i, j)] % &p).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => w.add_row(k, i, &Int::one()),
                None => break,
            }
        }
    }
    SmithDecomposition {
        u: w.u,
        d: w.d,
        v: w.v,
        u_inv: w.u_inv,
        v_inv: w.v_inv,
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntegerMatrix) -> Int {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Int::one();
    }
    let mut a = m.clone();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                return Int::zero();
            };
            for j in 0..n {
                let tmp = a[(k, j)].clone();
                a[(k, j)] = a[(swap, j)].clone();
                a[(swap, j)] = tmp;
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = num / &prev;
            }
            a[(i, k)] = Int::zero();
        }
        prev = a[(k, k)].clone();
    }
    sign * a[(n - 1, n - 1)].clone()
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// The result is the canonical generating set: pivot columns strictly
/// increasing, pivots positive, entries above each pivot reduced into
/// `[0, pivot)`.  Zero rows are dropped.
pub fn row_hermite_normal_form(rows: &[Vector]) -> Vec<Vector> {
    let mut work: Vec<Vector> = rows.iter().filter(|r| !is_zero_vec(r)).cloned().collect();
    let width = rows.first().map_or(0, Vec::len);
    debug_assert!(rows.iter().all(|r| r.len() == width));
    let mut pivot_row = 0;
    for col in 0..width {
        // gcd-reduce all rows at `col` into a single pivot row
        loop {
            let mut best: Option<usize> = None;
            for (i, row) in work.iter().enumerate().skip(pivot_row) {
                if row[col].is_zero() {
                    continue;
                }
                match best {
                    Some(b) if work[b][col].abs() <= row[col].abs() => {}
                    _ => best = Some(i),
                }
            }
            let Some(b) = best else { break };
            work.swap(pivot_row, b);
            let mut reduced_all = true;
            let pivot = work[pivot_row][col].clone();
            for i in pivot_row + 1..work.len() {
                if work[i][col].is_zero() {
                    continue;
                }
                let q = work[i][col].div_floor(&pivot);
                for j in 0..width {
                    let delta = &q * &work[pivot_row][j];
                    work[i][j] -= delta;
                }
                reduced_all &= work[i][col].is_zero();
            }
            if reduced_all {
                break;
            }
        }
        if pivot_row < work.len() && !work[pivot_row][col].is_zero() {
            if work[pivot_row][col].is_negative() {
                for j in 0..width {
                    let e = -&work[pivot_row][j];
                    work[pivot_row][j] = e;
                }
            }
            // normalize the rows above into [0, pivot)
            let pivot = work[pivot_row][col].clone();
            for i in 0..pivot_row {
                let q = work[i][col].div_floor(&pivot);
                if q.is_zero() {
                    continue;
                }
                for j in 0..width {
                    let delta = &q * &work[pivot_row][j];
                    work[i][j] -= delta;
                }
            }
            pivot_row += 1;
        }
    }
    work.truncate(pivot_row);
    work.retain(|r| !is_zero_vec(r));
    work
}

/// Canonical representative of `v` modulo the lattice generated by
/// `hnf_rows` (which must be in row Hermite normal form).
pub fn hnf_reduce(hnf_rows: &[Vector], v: &[Int]) -> Vector {
    let mut out = v.to_vec();
    for row in hnf_rows {
        let col = match row.iter().position(|e| !e.is_zero()) {
            Some(c) => c,
            None => continue,
        };
        let q = out[col].div_floor(&row[col]);
        if q.is_zero() {
            continue;
        }
        for j in 0..out.len() {
            let delta = &q * &row[j];
            out[j] -= delta;
        }
    }
    out
}

fn is_zero_vec(v: &[Int]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Basis of the kernel of `m`, canonicalized by Hermite normal form.
pub fn kernel_basis(m: &IntegerMatrix) -> Vec<Vector> {
    let snf = smith_normal_form(m);
    let n = m.rows().min(m.cols());
    let mut gens = Vec::new();
    for j in 0..m.cols() {
        let in_diag = j < n && !snf.d[(j, j)].is_zero();
        if !in_diag {
            gens.push(snf.v.column(j));
        }
    }
    row_hermite_normal_form(&gens)
}

/// Exact solution of `m x = b` over the integers, if one exists.
pub fn solve(m: &IntegerMatrix, b: &[Int]) -> Option<Vector> {
    smith_normal_form(m).solve(b)
}

/// A finite quotient `Z^r / L` described by its elementary divisors and a
/// full set of canonical coset representatives.
#[derive(Clone, Debug)]
pub struct FiniteQuotient {
    pub elementary_divisors: Vec<Int>,
    pub coset_representatives: Vec<Vector>,
    pub order: Int,
    hnf_rows: Vec<Vector>,
}

impl FiniteQuotient {
    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }

    /// Canonical representative of the coset of `v`.
    pub fn reduce(&self, v: &[Int]) -> Vector {
        hnf_reduce(&self.hnf_rows, v)
    }
}

const QUOTIENT_ENUMERATION_LIMIT: u64 = 1 << 20;

/// Quotient of `Z^ambient_rank` by the span of the given generators.
///
/// Fails with [`LatticeError::InfiniteIndex`] when the span has rank lower
/// than the ambient lattice.  Representatives are canonical (Hermite-reduced)
/// and sorted, with the zero coset first.
pub fn quotient_group(
    generators: &[Vector],
    ambient_rank: usize,
) -> Result<FiniteQuotient, LatticeError> {
    for g in generators {
        if g.len() != ambient_rank {
            return Err(LatticeError::GeneratorLength {
                ambient: ambient_rank,
                found: g.len(),
            });
        }
    }
    if ambient_rank == 0 {
        return Ok(FiniteQuotient {
            elementary_divisors: Vec::new(),
            coset_representatives: vec![Vec::new()],
            order: Int::one(),
            hnf_rows: Vec::new(),
        });
    }
    let m = IntegerMatrix::from_columns(generators, ambient_rank);
    let snf = smith_normal_form(&m);
    if snf.rank() < ambient_rank {
        return Err(LatticeError::InfiniteIndex);
    }
    let divisors: Vec<Int> = (0..ambient_rank).map(|i| snf.d[(i, i)].clone()).collect();
    let order: Int = divisors.iter().product();
    let count = order
        .to_u64()
        .filter(|&n| n <= QUOTIENT_ENUMERATION_LIMIT)
        .ok_or_else(|| LatticeError::QuotientTooLarge(order.clone()))?;
    let hnf_rows = row_hermite_normal_form(generators);

    let mut reps = Vec::with_capacity(count as usize);
    let mut counter = vec![Int::zero(); ambient_rank];
    loop {
        let rep = hnf_reduce(&hnf_rows, &snf.u_inv.mul_vec(&counter));
        reps.push(rep);
        // odometer over the divisor box
        let mut pos = 0;
        loop {
            if pos == ambient_rank {
                reps.sort();
                reps.dedup();
                debug_assert_eq!(reps.len() as u64, count);
                return Ok(FiniteQuotient {
                    elementary_divisors: divisors,
                    coset_representatives: reps,
                    order,
                    hnf_rows,
                });
            }
            counter[pos] += 1;
            if counter[pos] < divisors[pos] {
                break;
            }
            counter[pos] = Int::zero();
            pos += 1;
        }
    }
}

/// Basis of the saturated sublattice `{v : T v = sign * v}`.
///
/// Kernels of integer matrices are saturated automatically, so the result
/// always has torsion-free quotient.  For an anti-symplectic involution on a
/// rank-`2g` lattice both eigensublattices have rank `g`.
pub fn eigenlattice(t: &AntiSymplecticInvolution, sign: i64) -> Vec<Vector> {
    assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
    let n = t.rank();
    let mut m = t.matrix().clone();
    for i in 0..n {
        m[(i, i)] -= Int::from(sign);
    }
    kernel_basis(&m)
}

/// Rank of `m` over GF(2).
pub fn rank_mod2(m: &IntegerMatrix) -> usize {
    let mut rows: Vec<u64> = (0..m.rows())
        .map(|i| {
            (0..m.cols()).fold(0u64, |acc, j| {
                acc | ((m[(i, j)].mod_floor(&Int::from(2)).to_u64().unwrap()) << j)
            })
        })
        .collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let bit = 1u64 << col;
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && *row & bit != 0 {
                *row ^= pivot_row;
            }
        }
        rank += 1;
    }
    rank
}

/// Vector entries as machine integers, when they all fit.
pub fn vector_to_i64(v: &[Int]) -> Option<Vec<i64>> {
    v.iter().map(ToPrimitive::to_i64).collect()
}

/// Gcd of the entries is 1 (and the vector is nonzero).
pub fn is_primitive(v: &[Int]) -> bool {
    let mut g = Int::zero();
    for e in v {
        g = g.gcd(e);
    }
    g.is_one()
}
