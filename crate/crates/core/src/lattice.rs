//! Exact integer linear algebra over finitely generated abelian groups.
//!
//! Everything here works with arbitrary-precision integers. The central
//! routine is [`smith_normal_form`], from which kernels, cokernels,
//! integer solvability and subgroup saturation are all read off.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer vectors are plain `Vec<BigInt>` throughout the crate.
pub type IntVector = Vec<BigInt>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("torsion orders must be at least 2 and form a divisibility chain")]
    BadTorsion,
}

/// Converts a slice of machine integers to an [`IntVector`].
pub fn ivec(values: &[i64]) -> IntVector {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add_vec(a: &[BigInt], b: &[BigInt]) -> IntVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[BigInt], b: &[BigInt]) -> IntVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(a: &[BigInt], c: &BigInt) -> IntVector {
    a.iter().map(|x| x * c).collect()
}

pub fn is_zero_vec(a: &[BigInt]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Gcd of the entries (zero for the zero vector).
pub fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides out the content. The zero vector is returned unchanged.
pub fn primitive(a: &[BigInt]) -> IntVector {
    let g = content(a);
    if g.is_zero() || g.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| x / &g).collect()
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed to give 0-row matrices a width.
    pub fn from_rows(rows: Vec<IntVector>, cols: usize) -> Result<Self, LatticeError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LatticeError::RaggedRows {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(IntMatrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(columns: &[IntVector], rows: usize) -> Result<Self, LatticeError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LatticeError::RaggedRows {
                    row: j,
                    expected: rows,
                    found: c.len(),
                });
            }
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    /// Convenience constructor for tests and literals. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| ivec(r)).collect(), cols).expect("ragged literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> IntVector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> IntVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn column_vectors(&self) -> Vec<IntVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> IntVector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    /// Block-diagonal sum `[self 0; 0 other]`.
    pub fn direct_sum(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] += c * row[source]`
    pub fn add_row_multiple(&mut self, target: usize, source: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[source * self.cols + j] * c;
            self.data[target * self.cols + j] += v;
        }
    }

    /// `col[target] += c * col[source]`
    pub fn add_col_multiple(&mut self, target: usize, source: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + source] * c;
            self.data[i * self.cols + target] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        let mut prev = BigInt::one();
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(p) = (rank..a.rows).find(|&i| !a.get(i, col).is_zero()) else {
                continue;
            };
            a.swap_rows(rank, p);
            for i in rank + 1..a.rows {
                for j in col + 1..a.cols {
                    let v =
                        (a.get(i, j) * a.get(rank, col) - a.get(i, col) * a.get(rank, j)) / &prev;
                    a.set(i, j, v);
                }
                a.set(i, col, BigInt::zero());
            }
            prev = a.get(rank, col).clone();
            rank += 1;
        }
        rank
    }

    /// Adjugate of a square matrix, so that `A * adj(A) = det(A) * I`.
    pub fn adjugate(&self) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut adj = Self::zeros(n, n);
        if n == 1 {
            adj.set(0, 0, BigInt::one());
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let minor_rows: Vec<IntVector> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| self.get(r, c).clone())
                            .collect()
                    })
                    .collect();
                let minor = IntMatrix::from_rows(minor_rows, n - 1).expect("square minor");
                let cof = if (i + j) % 2 == 0 {
                    minor.det()
                } else {
                    -minor.det()
                };
                adj.set(j, i, cof);
            }
        }
        adj
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` in Smith normal form.
///
/// `u_inv` is carried along so that images and saturations can be mapped
/// back without a separate inversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn find_pivot(d: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..d.rows() {
        for j in k..d.cols() {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d.get(bi, bj).abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form with smallest-absolute-value pivoting (ties broken by
/// lowest row, then column). The diagonal of `D` is nonnegative and forms a
/// divisibility chain; it is unique, the transforms are deterministic.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    // row op helpers keep u_inv = u^{-1}
    let row_swap =
        |d: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, a: usize, b: usize| {
            d.swap_rows(a, b);
            u.swap_rows(a, b);
            ui.swap_cols(a, b);
        };
    let row_add = |d: &mut IntMatrix,
                   u: &mut IntMatrix,
                   ui: &mut IntMatrix,
                   t: usize,
                   s: usize,
                   c: &BigInt| {
        d.add_row_multiple(t, s, c);
        u.add_row_multiple(t, s, c);
        ui.add_col_multiple(s, t, &-c);
    };

    'outer: for k in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = find_pivot(&d, k) else {
                break 'outer;
            };
            row_swap(&mut d, &mut u, &mut u_inv, k, pi);
            d.swap_cols(k, pj);
            v.swap_cols(k, pj);

            let pivot = d.get(k, k).clone();
            let mut clean = true;
            for i in k + 1..m {
                let q = d.get(i, k).div_floor(&pivot);
                row_add(&mut d, &mut u, &mut u_inv, i, k, &-q);
                clean &= d.get(i, k).is_zero();
            }
            for j in k + 1..n {
                let q = d.get(k, j).div_floor(&pivot);
                d.add_col_multiple(j, k, &-&q);
                v.add_col_multiple(j, k, &-q);
                clean &= d.get(k, j).is_zero();
            }
            if !clean {
                continue;
            }
            let offender =
                (k + 1..m).find(|&i| (k + 1..n).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => row_add(&mut d, &mut u, &mut u_inv, k, i, &BigInt::one()),
                None => break,
            }
        }
        if d.get(k, k).is_negative() {
            d.negate_row(k);
            u.negate_row(k);
            u_inv.negate_col(k);
        }
    }
    SmithDecomposition { u, d, v, u_inv }
}

/// Basis of the integer kernel `{x : A x = 0}` (a saturated sublattice).
pub fn kernel_basis(a: &IntMatrix) -> Vec<IntVector> {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    (r..a.cols()).map(|j| snf.v.column(j)).collect()
}

/// Some integer solution of `A x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<IntVector> {
    assert_eq!(a.rows(), b.len());
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let factors = snf.invariant_factors();
    let mut z = vec![BigInt::zero(); a.cols()];
    for (i, y) in ub.iter().enumerate() {
        match factors.get(i) {
            Some(f) => {
                if !y.is_multiple_of(f) {
                    return None;
                }
                z[i] = y / f;
            }
            None => {
                if !y.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(snf.v.mul_vec(&z))
}

/// Finitely generated abelian group `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with
/// `d_1 | d_2 | … | d_k`, each `d_i ≥ 2`.
///
/// Elements are coordinate vectors of length `free_rank + k`: free
/// coordinates first, then torsion residues reduced into `[0, d_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FgAbelianGroup {
    pub free_rank: usize,
    pub torsion_orders: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn new(free_rank: usize, torsion_orders: Vec<BigInt>) -> Result<Self, LatticeError> {
        let two = BigInt::from(2);
        if torsion_orders.iter().any(|d| d < &two)
            || torsion_orders
                .windows(2)
                .any(|w| !w[1].is_multiple_of(&w[0]))
        {
            return Err(LatticeError::BadTorsion);
        }
        Ok(FgAbelianGroup {
            free_rank,
            torsion_orders,
        })
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup {
            free_rank: rank,
            torsion_orders: Vec::new(),
        }
    }

    pub fn coords(&self) -> usize {
        self.free_rank + self.torsion_orders.len()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion_orders.iter().product()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_orders.is_empty()
    }

    pub fn zero(&self) -> IntVector {
        vec![BigInt::zero(); self.coords()]
    }

    pub fn reduce(&self, x: &mut [BigInt]) {
        for (i, d) in self.torsion_orders.iter().enumerate() {
            let c = &mut x[self.free_rank + i];
            *c = c.mod_floor(d);
        }
    }

    pub fn reduced(&self, x: &[BigInt]) -> IntVector {
        let mut y = x.to_vec();
        self.reduce(&mut y);
        y
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> IntVector {
        self.reduced(&add_vec(a, b))
    }

    pub fn neg(&self, a: &[BigInt]) -> IntVector {
        self.reduced(&a.iter().map(|x| -x).collect::<Vec<_>>())
    }

    pub fn is_zero(&self, a: &[BigInt]) -> bool {
        is_zero_vec(&self.reduced(a))
    }

    /// The relation columns of this group viewed as a presentation on its
    /// coordinates: `d_i e_{free_rank + i}`.
    pub fn relation_columns(&self) -> Vec<IntVector> {
        self.torsion_orders
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut c = vec![BigInt::zero(); self.coords()];
                c[self.free_rank + i] = d.clone();
                c
            })
            .collect()
    }

    /// Basis vector `e_i` of the coordinate presentation.
    pub fn unit(&self, i: usize) -> IntVector {
        let mut e = self.zero();
        e[i] = BigInt::one();
        e
    }

    pub fn direct_sum(&self, other: &FgAbelianGroup) -> Quotient {
        // Coordinates of self, then coordinates of other.
        let n = self.coords() + other.coords();
        let mut rels = Vec::new();
        for c in self.relation_columns() {
            let mut r = c;
            r.extend(std::iter::repeat_n(BigInt::zero(), other.coords()));
            rels.push(r);
        }
        for c in other.relation_columns() {
            let mut r = vec![BigInt::zero(); self.coords()];
            r.extend(c);
            rels.push(r);
        }
        Quotient::of_presentation(n, &rels)
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        for d in &self.torsion_orders {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homomorphism of groups in normal form, given by the images of the
/// coordinate generators (columns of `matrix`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupMap {
    pub source: FgAbelianGroup,
    pub target: FgAbelianGroup,
    pub matrix: IntMatrix,
}

impl GroupMap {
    pub fn new(
        source: FgAbelianGroup,
        target: FgAbelianGroup,
        matrix: IntMatrix,
    ) -> Result<Self, LatticeError> {
        if matrix.rows() != target.coords() || matrix.cols() != source.coords() {
            return Err(LatticeError::DimensionMismatch(format!(
                "group map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.coords(),
                source.coords()
            )));
        }
        // Torsion generators must land on elements of compatible order.
        for (i, d) in source.torsion_orders.iter().enumerate() {
            let img = scale_vec(&matrix.column(source.free_rank + i), d);
            if !target.is_zero(&img) {
                return Err(LatticeError::DimensionMismatch(format!(
                    "torsion generator {i} of order {d} has an image of larger order"
                )));
            }
        }
        Ok(GroupMap {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(group: &FgAbelianGroup) -> Self {
        GroupMap {
            source: group.clone(),
            target: group.clone(),
            matrix: IntMatrix::identity(group.coords()),
        }
    }

    pub fn apply(&self, x: &[BigInt]) -> IntVector {
        self.target.reduced(&self.matrix.mul_vec(x))
    }

    pub fn compose(&self, first: &GroupMap) -> GroupMap {
        GroupMap {
            source: first.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&first.matrix),
        }
    }
}

/// Normal form of a presented group `Z^n / ⟨relations⟩`.
///
/// `projection` sends a presentation vector to normal-form coordinates
/// (reduce afterwards); column `i` of `section` lifts normal-form basis
/// element `i` back to the presentation.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FgAbelianGroup,
    pub projection: IntMatrix,
    pub section: IntMatrix,
}

impl Quotient {
    pub fn of_presentation(num_generators: usize, relations: &[IntVector]) -> Quotient {
        let rel = IntMatrix::from_columns(relations, num_generators).expect("relation length");
        let snf = smith_normal_form(&rel);
        let factors = snf.invariant_factors();
        let r = factors.len();
        let mut order: Vec<usize> = (r..num_generators).collect();
        let torsion_idx: Vec<usize> = (0..r).filter(|&i| !factors[i].is_one()).collect();
        order.extend(torsion_idx.iter().copied());
        let group = FgAbelianGroup {
            free_rank: num_generators - r,
            torsion_orders: torsion_idx.iter().map(|&i| factors[i].clone()).collect(),
        };
        let projection = IntMatrix::from_rows(
            order.iter().map(|&i| snf.u.row(i)).collect(),
            num_generators,
        )
        .expect("rows of U");
        let section = IntMatrix::from_columns(
            &order
                .iter()
                .map(|&i| snf.u_inv.column(i))
                .collect::<Vec<_>>(),
            num_generators,
        )
        .expect("columns of U^-1");
        Quotient {
            group,
            projection,
            section,
        }
    }

    pub fn project(&self, x: &[BigInt]) -> IntVector {
        self.group.reduced(&self.projection.mul_vec(x))
    }
}

/// Quotient of a normal-form group by the subgroup generated by `elements`.
/// The returned projection acts on `group` coordinates.
pub fn quotient_group(group: &FgAbelianGroup, elements: &[IntVector]) -> Quotient {
    let mut rels = group.relation_columns();
    rels.extend(elements.iter().cloned());
    Quotient::of_presentation(group.coords(), &rels)
}

/// Normal form of the subgroup generated by `elements` inside `group`.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: FgAbelianGroup,
    /// Inclusion into the ambient group.
    pub inclusion: GroupMap,
    /// Subgroup coordinates of each generating element.
    pub element_coords: Vec<IntVector>,
}

pub fn subgroup(ambient: &FgAbelianGroup, elements: &[IntVector]) -> Subgroup {
    let k = elements.len();
    let n = ambient.coords();
    // kernel of [H | Rel] restricted to the H block = relations among generators
    let mut cols = elements.to_vec();
    cols.extend(ambient.relation_columns());
    let big = IntMatrix::from_columns(&cols, n).expect("element length");
    let relations: Vec<IntVector> = kernel_basis(&big)
        .into_iter()
        .map(|v| v[..k].to_vec())
        .filter(|v| !is_zero_vec(v))
        .collect();
    let q = Quotient::of_presentation(k, &relations);
    let hmat = IntMatrix::from_columns(elements, n).expect("element length");
    let inclusion = GroupMap {
        source: q.group.clone(),
        target: ambient.clone(),
        matrix: reduce_columns(ambient, hmat.mul(&q.section)),
    };
    let element_coords = (0..k)
        .map(|j| q.group.reduced(&q.projection.column(j)))
        .collect();
    Subgroup {
        group: q.group,
        inclusion,
        element_coords,
    }
}

fn reduce_columns(group: &FgAbelianGroup, m: IntMatrix) -> IntMatrix {
    let cols: Vec<IntVector> = m
        .column_vectors()
        .into_iter()
        .map(|c| group.reduced(&c))
        .collect();
    IntMatrix::from_columns(&cols, m.rows()).expect("same shape")
}

/// Coordinates of `x` in the subgroup, if `x` lies in it.
pub fn subgroup_coords(sub: &Subgroup, x: &[BigInt]) -> Option<IntVector> {
    let mut cols = sub.inclusion.matrix.column_vectors();
    let nsub = cols.len();
    cols.extend(sub.inclusion.target.relation_columns());
    let big = IntMatrix::from_columns(&cols, sub.inclusion.target.coords()).expect("shape");
    let sol = solve_integer(&big, x)?;
    Some(sub.group.reduced(&sol[..nsub]))
}

/// Cokernel `Z^rows / image(A)` as free rank plus torsion orders.
pub fn cokernel(a: &IntMatrix) -> FgAbelianGroup {
    let snf = smith_normal_form(a);
    let factors = snf.invariant_factors();
    FgAbelianGroup {
        free_rank: a.rows() - factors.len(),
        torsion_orders: factors.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Row-style Hermite normal form: the nonzero rows of the reduced echelon
/// basis of the row lattice, pivots positive, entries above pivots reduced
/// into `[0, pivot)`.
pub fn hermite_rows(rows: &[IntVector], width: usize) -> Vec<IntVector> {
    let mut m = IntMatrix::from_rows(rows.to_vec(), width).expect("row width");
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..width {
        if r == m.rows() {
            break;
        }
        loop {
            let nz: Vec<usize> = (r..m.rows())
                .filter(|&i| !m.get(i, col).is_zero())
                .collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz
                .iter()
                .min_by(|&&a, &&b| m.get(a, col).abs().cmp(&m.get(b, col).abs()))
                .unwrap();
            m.swap_rows(r, p);
            let piv = m.get(r, col).clone();
            let mut done = true;
            for i in r + 1..m.rows() {
                let q = m.get(i, col).div_floor(&piv);
                m.add_row_multiple(i, r, &-q);
                done &= m.get(i, col).is_zero();
            }
            if done {
                break;
            }
        }
        if (r..m.rows()).all(|i| m.get(i, col).is_zero()) && m.get(r, col).is_zero() {
            continue;
        }
        if m.get(r, col).is_negative() {
            m.negate_row(r);
        }
        let piv = m.get(r, col).clone();
        for i in 0..r {
            let q = m.get(i, col).div_floor(&piv);
            m.add_row_multiple(i, r, &-q);
        }
        pivots.push(col);
        r += 1;
    }
    (0..r).map(|i| m.row(i)).collect()
}

/// Basis of `{v : n v ∈ span(generators) for some n ≥ 1}`, in row Hermite form.
pub fn saturate_subgroup(generators: &[IntVector], ambient_rank: usize) -> Vec<IntVector> {
    if generators.is_empty() {
        return Vec::new();
    }
    let a = IntMatrix::from_columns(generators, ambient_rank).expect("generator length");
    let snf = smith_normal_form(&a);
    let basis: Vec<IntVector> = (0..snf.rank()).map(|j| snf.u_inv.column(j)).collect();
    hermite_rows(&basis, ambient_rank)
}

/// Coordinates of `v` with respect to the columns of `basis`, if integral.
pub fn coordinates_in(basis: &IntMatrix, v: &[BigInt]) -> Option<IntVector> {
    let x = solve_integer(basis, v)?;
    if basis.mul_vec(&x) == v {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_decomposition(a: &IntMatrix) -> SmithDecomposition {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d, "U A V = D for {a:?}");
        assert!(s.u.is_unimodular() || a.rows() == 0);
        assert!(s.v.is_unimodular() || a.cols() == 0);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(a.rows()));
        s
    }

    #[test]
    fn identity_is_its_own_smith_form() {
        let s = check_decomposition(&IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
        assert_eq!(s.u, IntMatrix::identity(2));
        assert_eq!(s.v, IntMatrix::identity(2));
    }

    #[test]
    fn diag_2_3_becomes_1_6() {
        let s = check_decomposition(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.d, IntMatrix::from_i64(&[&[1, 0], &[0, 6]]));
    }

    #[test]
    fn row_r_minus_r() {
        for r in 1..6 {
            let s = check_decomposition(&IntMatrix::from_i64(&[&[r, -r]]));
            assert_eq!(s.d, IntMatrix::from_i64(&[&[r, 0]]));
        }
    }

    #[test]
    fn empty_matrices() {
        let s = check_decomposition(&IntMatrix::zeros(0, 3));
        assert_eq!(s.d.rows(), 0);
        let s = check_decomposition(&IntMatrix::zeros(2, 0));
        assert_eq!(s.u, IntMatrix::identity(2));
        assert_eq!(cokernel(&IntMatrix::zeros(2, 0)), FgAbelianGroup::free(2));
    }

    #[test]
    fn cokernel_of_r_lines_relation() {
        let g = cokernel(&IntMatrix::from_i64(&[&[2], &[-2]]));
        assert_eq!(g.free_rank, 1);
        assert_eq!(g.torsion_orders, ivec(&[2]));
        let g = cokernel(&IntMatrix::from_i64(&[&[3], &[-3]]));
        assert_eq!(g.free_rank, 1);
        assert_eq!(g.torsion_orders, ivec(&[3]));
    }

    #[test]
    fn saturate_examples() {
        assert_eq!(saturate_subgroup(&[ivec(&[2, 0])], 2), vec![ivec(&[1, 0])]);
        assert_eq!(
            saturate_subgroup(&[ivec(&[1, 0]), ivec(&[0, 1])], 2),
            vec![ivec(&[1, 0]), ivec(&[0, 1])]
        );
        assert_eq!(saturate_subgroup(&[ivec(&[2, 2])], 2), vec![ivec(&[1, 1])]);
    }

    #[test]
    fn kernel_and_solve() {
        let a = IntMatrix::from_i64(&[&[1, 1, -1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(is_zero_vec(&a.mul_vec(v)));
        }
        let a = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        assert!(solve_integer(&a, &ivec(&[4, 3])).is_some());
        assert!(solve_integer(&a, &ivec(&[1, 3])).is_none());
    }

    #[test]
    fn subgroup_of_torsion_group() {
        // <(1, 1)> inside Z + Z/2 is infinite cyclic
        let g = FgAbelianGroup::new(1, ivec(&[2])).unwrap();
        let h = subgroup(&g, &[ivec(&[1, 1])]);
        assert_eq!(h.group, FgAbelianGroup::free(1));
        // <(0, 1), (2, 0)> is Z + Z/2
        let h = subgroup(&g, &[ivec(&[0, 1]), ivec(&[2, 0])]);
        assert_eq!(h.group, FgAbelianGroup::new(1, ivec(&[2])).unwrap());
        assert!(subgroup_coords(&h, &ivec(&[1, 0])).is_none());
        assert!(subgroup_coords(&h, &ivec(&[4, 1])).is_some());
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_rows(&[ivec(&[2, 4]), ivec(&[1, 3])], 2);
        let b = hermite_rows(&[ivec(&[1, 3]), ivec(&[0, 2])], 2);
        assert_eq!(a, b);
    }

    #[test]
    fn bareiss_det_and_rank() {
        let m = IntMatrix::from_i64(&[&[0, 2, 1], &[1, 0, 0], &[3, 1, 1]]);
        assert_eq!(m.det(), BigInt::from(-1));
        assert_eq!(m.rank(), 3);
        let m = IntMatrix::from_i64(&[&[1, 2], &[2, 4], &[0, 0]]);
        assert_eq!(m.rank(), 1);
        let adj = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]).adjugate();
        assert_eq!(adj, IntMatrix::from_i64(&[&[1, -1], &[-1, 2]]));
    }
}
