//! Dense matrices and one unit-pivot Gauss-Jordan engine shared by all
//! three coefficient domains. Over a field every nonzero entry is a unit,
//! so the engine is ordinary reduced row echelon; over Z/p^N a column whose
//! remaining entries are nonzero non-units is a hard error.

use super::{ArithError, Rat, Ring};
use num_bigint::BigUint;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type MatrixQ = Matrix<Rat>;
pub type MatrixFp = Matrix<u64>;
pub type MatrixPN = Matrix<BigUint>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, ArithError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(ArithError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

pub fn mat_identity<R: Ring>(ring: &R, n: usize) -> Matrix<R::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
}

pub fn mat_mul<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!(a.cols, b.rows, "matrix product shape mismatch");
    Matrix::from_fn(a.rows, b.cols, |i, j| {
        let mut acc = ring.zero();
        for k in 0..a.cols {
            acc = ring.add(&acc, &ring.mul(a.get(i, k), b.get(k, j)));
        }
        acc
    })
}

pub fn mat_vec<R: Ring>(ring: &R, m: &Matrix<R::Elem>, v: &[R::Elem]) -> Vec<R::Elem> {
    assert_eq!(m.cols, v.len(), "matrix-vector shape mismatch");
    (0..m.rows)
        .map(|i| {
            let mut acc = ring.zero();
            for k in 0..m.cols {
                acc = ring.add(&acc, &ring.mul(m.get(i, k), &v[k]));
            }
            acc
        })
        .collect()
}

pub fn mat_sub<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Matrix::from_fn(a.rows, a.cols, |i, j| ring.sub(a.get(i, j), b.get(i, j)))
}

pub fn mat_add<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Matrix::from_fn(a.rows, a.cols, |i, j| ring.add(a.get(i, j), b.get(i, j)))
}

pub fn mat_scale<R: Ring>(ring: &R, c: &R::Elem, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.map(|x| ring.mul(c, x))
}

/// Reduced row echelon with unit pivots and full column pivoting, applied
/// to `m` and mirrored on the augmented block. Returns (pivot row, pivot
/// column) pairs. Over a field every nonzero entry is a unit so this is
/// ordinary RREF; over Z/p^N the pivot search skips columns whose
/// remaining entries are non-units, and fails only when no unit is left
/// anywhere while some remaining row is nonzero.
fn rref<R: Ring>(
    ring: &R,
    m: &mut Matrix<R::Elem>,
    aug: &mut Matrix<R::Elem>,
) -> Result<Vec<(usize, usize)>, ArithError> {
    assert_eq!(m.rows, aug.rows);
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    while r < m.rows {
        // First unused column holding a unit in a remaining row.
        let mut found = None;
        'search: for c in 0..m.cols {
            if pivots.iter().any(|&(_, pc)| pc == c) {
                continue;
            }
            for i in r..m.rows {
                if ring.is_unit(m.get(i, c)) {
                    found = Some((i, c));
                    break 'search;
                }
            }
        }
        let Some((i, c)) = found else {
            // No unit pivot left: the remaining rows must be zero, or the
            // system genuinely needs a non-unit pivot.
            for i in r..m.rows {
                for c in 0..m.cols {
                    if pivots.iter().any(|&(_, pc)| pc == c) {
                        continue;
                    }
                    if !ring.is_zero(m.get(i, c)) {
                        return Err(ArithError::NonUnitPivot);
                    }
                }
            }
            break;
        };
        m.swap_rows(r, i);
        aug.swap_rows(r, i);
        let inv = ring.inverse(m.get(r, c)).expect("unit pivot");
        for j in 0..m.cols {
            m.set(r, j, ring.mul(&inv, m.get(r, j)));
        }
        for j in 0..aug.cols {
            aug.set(r, j, ring.mul(&inv, aug.get(r, j)));
        }
        for i2 in 0..m.rows {
            if i2 == r || ring.is_zero(m.get(i2, c)) {
                continue;
            }
            let factor = m.get(i2, c).clone();
            for j in 0..m.cols {
                let delta = ring.mul(&factor, m.get(r, j));
                m.set(i2, j, ring.sub(m.get(i2, j), &delta));
            }
            for j in 0..aug.cols {
                let delta = ring.mul(&factor, aug.get(r, j));
                aug.set(i2, j, ring.sub(aug.get(i2, j), &delta));
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    Ok(pivots)
}

/// Particular solution plus a basis of the solution module of M x = 0.
#[derive(Debug, Clone)]
pub struct LinearSolution<T> {
    pub particular: Vec<T>,
    pub kernel: Vec<Vec<T>>,
}

/// Solve M x = rhs. Ok(None) means provably no solution; kernel vectors are
/// a basis of the homogeneous solutions (free module of that rank for Z/p^N
/// thanks to unit pivots).
pub fn solve_linear<R: Ring>(
    ring: &R,
    m: &Matrix<R::Elem>,
    rhs: &[R::Elem],
) -> Result<Option<LinearSolution<R::Elem>>, ArithError> {
    if rhs.len() != m.rows {
        return Err(ArithError::DimensionMismatch(format!(
            "{} equations, rhs of length {}",
            m.rows,
            rhs.len()
        )));
    }
    let mut work = m.clone();
    let mut aug = Matrix::from_fn(m.rows, 1, |i, _| rhs[i].clone());
    let pivots = rref(ring, &mut work, &mut aug)?;
    // Rows past the last pivot are all-zero on the left; the system is
    // consistent only if the right side vanishes there too.
    for i in pivots.len()..m.rows {
        if !ring.is_zero(aug.get(i, 0)) {
            return Ok(None);
        }
    }
    let mut particular = vec![ring.zero(); m.cols];
    for &(r, c) in &pivots {
        particular[c] = aug.get(r, 0).clone();
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut kernel = Vec::new();
    for free in (0..m.cols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![ring.zero(); m.cols];
        v[free] = ring.one();
        for &(r, c) in &pivots {
            v[c] = ring.neg(work.get(r, free));
        }
        kernel.push(v);
    }
    Ok(Some(LinearSolution { particular, kernel }))
}

/// Basis of { x : M x = 0 }.
pub fn kernel_basis<R: Ring>(
    ring: &R,
    m: &Matrix<R::Elem>,
) -> Result<Vec<Vec<R::Elem>>, ArithError> {
    let rhs = vec![ring.zero(); m.rows()];
    Ok(solve_linear(ring, m, &rhs)?
        .expect("homogeneous system is consistent")
        .kernel)
}

/// Exact inverse. Over Z/p^N this requires the reduction mod p to be
/// invertible; a failed pivot is reported as a singular input.
pub fn mat_inverse<R: Ring>(
    ring: &R,
    m: &Matrix<R::Elem>,
) -> Result<Matrix<R::Elem>, ArithError> {
    if m.rows != m.cols {
        return Err(ArithError::DimensionMismatch("inverse of non-square".into()));
    }
    let mut work = m.clone();
    let mut aug = mat_identity(ring, m.rows);
    match rref(ring, &mut work, &mut aug) {
        Ok(pivots) if pivots.len() == m.rows => Ok(aug),
        Ok(_) => Err(ArithError::Singular),
        Err(ArithError::NonUnitPivot) => Err(ArithError::Singular),
        Err(e) => Err(e),
    }
}

/// Determinant by echelon form with unit pivots. Over Z/p^N an elimination
/// breakdown means det is a non-unit and is reported as NonUnitPivot.
pub fn mat_determinant<R: Ring>(
    ring: &R,
    m: &Matrix<R::Elem>,
) -> Result<R::Elem, ArithError> {
    if m.rows != m.cols {
        return Err(ArithError::DimensionMismatch("determinant of non-square".into()));
    }
    let n = m.rows;
    let mut work = m.clone();
    let mut det = ring.one();
    let mut negate = false;
    for c in 0..n {
        let pivot_row = (c..n).find(|&i| ring.is_unit(work.get(i, c)));
        let Some(i) = pivot_row else {
            if (c..n).all(|i| ring.is_zero(work.get(i, c))) {
                return Ok(ring.zero());
            }
            return Err(ArithError::NonUnitPivot);
        };
        if i != c {
            work.swap_rows(c, i);
            negate = !negate;
        }
        let pivot = work.get(c, c).clone();
        det = ring.mul(&det, &pivot);
        let inv = ring.inverse(&pivot).expect("unit pivot");
        for i2 in (c + 1)..n {
            if ring.is_zero(work.get(i2, c)) {
                continue;
            }
            let factor = ring.mul(work.get(i2, c), &inv);
            for j in c..n {
                let delta = ring.mul(&factor, work.get(c, j));
                work.set(i2, j, ring.sub(work.get(i2, j), &delta));
            }
        }
    }
    Ok(if negate { ring.neg(&det) } else { det })
}
