//! Field-generic constructive Witt extension. The same engine runs over Q
//! and over F_p (the residue step of the lattice lifting), so everything
//! here is written against the `Field` ring-object trait. char != 2 is
//! assumed throughout and asserted where it matters.
//!
//! The algorithm: orthogonalize the span; when it is nondegenerate, map
//! source to target one orthogonal vector at a time with one or two
//! reflections per step; when the span is degenerate, first complete the
//! radical hyperbolically on both sides (the completions are prescribed the
//! same inner products, so the Gram matrices still agree) and reduce to the
//! nondegenerate case.

use super::QuadError;
use crate::arith::{kernel_basis, mat_identity, mat_vec, solve_linear, Field, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialTarget {
    /// det +1 only.
    Determinant,
    /// det +1 and trivial spinor norm.
    SpinorKernel,
}

pub fn bilinear_generic<K: Field>(
    field: &K,
    gram: &Matrix<K::Elem>,
    x: &[K::Elem],
    y: &[K::Elem],
) -> K::Elem {
    let gy = mat_vec(field, gram, y);
    let mut acc = field.zero();
    for (a, b) in x.iter().zip(gy.iter()) {
        acc = field.add(&acc, &field.mul(a, b));
    }
    acc
}

/// Matrix of tau_c relative to the ambient basis: I - (2/f(c)) c (Gc)^t.
/// None when f(c) is not invertible.
pub fn reflection_matrix<K: Field>(
    field: &K,
    gram: &Matrix<K::Elem>,
    c: &[K::Elem],
) -> Option<Matrix<K::Elem>> {
    let fc = bilinear_generic(field, gram, c, c);
    let inv = field.inverse(&fc)?;
    let two = field.from_i64(2);
    let coef = field.mul(&two, &inv);
    let gc = mat_vec(field, gram, c);
    let n = c.len();
    Some(Matrix::from_fn(n, n, |i, j| {
        let delta = if i == j { field.one() } else { field.zero() };
        field.sub(&delta, &field.mul(&coef, &field.mul(&c[i], &gc[j])))
    }))
}

/// Gram matrix of a list of vectors.
pub fn subspace_gram<K: Field>(
    field: &K,
    gram: &Matrix<K::Elem>,
    basis: &[Vec<K::Elem>],
) -> Matrix<K::Elem> {
    Matrix::from_fn(basis.len(), basis.len(), |i, j| {
        bilinear_generic(field, gram, &basis[i], &basis[j])
    })
}

/// Congruent diagonalization: invertible C with t(C) S C diagonal. Handles
/// degenerate S (zero diagonal entries appear at the end of their blocks).
pub fn congruent_diagonalize<K: Field>(
    field: &K,
    s: &Matrix<K::Elem>,
) -> Result<(Matrix<K::Elem>, Vec<K::Elem>), QuadError> {
    let m = s.rows();
    if s.cols() != m {
        return Err(QuadError::DimensionMismatch("diagonalize non-square".into()));
    }
    let two = field.from_i64(2);
    assert!(field.is_unit(&two), "char 2 is unsupported");
    let mut t = s.clone();
    let mut c = mat_identity(field, m);

    // Column operation col_a += coef * col_b mirrored on rows keeps T
    // congruent to S; the same column op is recorded in C.
    for k in 0..m {
        if field.is_zero(t.get(k, k)) {
            // Try to bring a nonzero diagonal entry to position k.
            if let Some(j) = ((k + 1)..m).find(|&j| !field.is_zero(t.get(j, j))) {
                swap_basis(&mut t, &mut c, k, j);
            } else if let Some((i, j)) = find_nonzero_off_diag(field, &t, k) {
                // All remaining diagonal entries vanish; v_i += v_j makes
                // T[i][i] = 2 T[i][j] != 0 in char != 2.
                add_basis(field, &mut t, &mut c, i, j, &field.one());
                if i != k {
                    swap_basis(&mut t, &mut c, k, i);
                }
            } else {
                // Remaining block is identically zero.
                break;
            }
        }
        let pivot = t.get(k, k).clone();
        let inv = field.inverse(&pivot).expect("nonzero diagonal pivot");
        for j in (k + 1)..m {
            if field.is_zero(t.get(k, j)) {
                continue;
            }
            let coef = field.neg(&field.mul(t.get(k, j), &inv));
            add_basis(field, &mut t, &mut c, j, k, &coef);
        }
    }
    let diag = (0..m).map(|i| t.get(i, i).clone()).collect();
    Ok((c, diag))
}

fn swap_basis<E: Clone>(t: &mut Matrix<E>, c: &mut Matrix<E>, a: usize, b: usize) {
    let m = t.rows();
    for i in 0..m {
        let x = t.get(i, a).clone();
        t.set(i, a, t.get(i, b).clone());
        t.set(i, b, x);
    }
    for j in 0..m {
        let x = t.get(a, j).clone();
        t.set(a, j, t.get(b, j).clone());
        t.set(b, j, x);
    }
    for i in 0..c.rows() {
        let x = c.get(i, a).clone();
        c.set(i, a, c.get(i, b).clone());
        c.set(i, b, x);
    }
}

/// Basis change v_a += coef * v_b, applied congruently to T and recorded in C.
fn add_basis<K: Field>(
    field: &K,
    t: &mut Matrix<K::Elem>,
    c: &mut Matrix<K::Elem>,
    a: usize,
    b: usize,
    coef: &K::Elem,
) {
    let m = t.rows();
    for i in 0..m {
        let x = field.add(t.get(i, a), &field.mul(coef, t.get(i, b)));
        t.set(i, a, x);
    }
    for j in 0..m {
        let x = field.add(t.get(a, j), &field.mul(coef, t.get(b, j)));
        t.set(a, j, x);
    }
    for i in 0..c.rows() {
        let x = field.add(c.get(i, a), &field.mul(coef, c.get(i, b)));
        c.set(i, a, x);
    }
}

fn find_nonzero_off_diag<K: Field>(
    field: &K,
    t: &Matrix<K::Elem>,
    from: usize,
) -> Option<(usize, usize)> {
    let m = t.rows();
    for i in from..m {
        for j in (i + 1)..m {
            if !field.is_zero(t.get(i, j)) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Some anisotropic vector in the span of `basis`, or None when f vanishes
/// on the whole span (in char != 2 this is exactly "the span Gram is 0").
pub fn anisotropic_in_span<K: Field>(
    field: &K,
    gram: &Matrix<K::Elem>,
    basis: &[Vec<K::Elem>],
) -> Option<Vec<K::Elem>> {
    let h = subspace_gram(field, gram, basis);
    for i in 0..basis.len() {
        if !field.is_zero(h.get(i, i)) {
            return Some(basis[i].clone());
        }
    }
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            if !field.is_zero(h.get(i, j)) {
                // f(v_i + v_j) = 2 (v_i|v_j) when both diagonals vanish.
                let v = basis[i]
                    .iter()
                    .zip(basis[j].iter())
                    .map(|(a, b)| field.add(a, b))
                    .collect();
                return Some(v);
            }
        }
    }
    None
}

/// Basis of the orthogonal complement of a system of vectors.
pub fn orthogonal_complement_basis<K: Field>(
    field: &K,
    gram: &Matrix<K::Elem>,
    vectors: &[Vec<K::Elem>],
) -> Result<Vec<Vec<K::Elem>>, QuadError> {
    let n = gram.rows();
    if vectors.is_empty() {
        return Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { field.one() } else { field.zero() })
                    .collect()
            })
            .collect());
    }
    let rows: Vec<Vec<K::Elem>> = vectors.iter().map(|v| mat_vec(field, gram, v)).collect();
    let m = Matrix::from_rows(rows).map_err(QuadError::Arith)?;
    Ok(kernel_basis(field, &m)?)
}

fn vectors_independent<K: Field>(field: &K, vectors: &[Vec<K::Elem>]) -> bool {
    if vectors.is_empty() {
        return true;
    }
    let n = vectors[0].len();
    let m = Matrix::from_fn(n, vectors.len(), |i, j| vectors[j][i].clone());
    kernel_basis(field, &m).is_ok_and(|k| k.is_empty())
}

fn apply_reflection_to_vec<K: Field>(
    field: &K,
    gram: &Matrix<K::Elem>,
    c: &[K::Elem],
    x: &[K::Elem],
) -> Vec<K::Elem> {
    let fc = bilinear_generic(field, gram, c, c);
    let xc = bilinear_generic(field, gram, x, c);
    let coef = field.div_unit(&field.mul(&field.from_i64(2), &xc), &fc);
    x.iter()
        .zip(c.iter())
        .map(|(xi, ci)| field.sub(xi, &field.mul(&coef, ci)))
        .collect()
}

fn apply_word_to_vec<K: Field>(
    field: &K,
    gram: &Matrix<K::Elem>,
    word: &[Vec<K::Elem>],
    x: &[K::Elem],
) -> Vec<K::Elem> {
    // word[0] applied last.
    let mut v = x.to_vec();
    for c in word.iter().rev() {
        v = apply_reflection_to_vec(field, gram, c, &v);
    }
    v
}

/// Witt extension over an arbitrary field of char != 2: a reflection word
/// whose product maps each source to its target. At most two reflections
/// are spent per orthogonalized span vector, and the postcondition is
/// re-verified on the original systems before returning.
pub fn witt_extend_generic<K: Field>(
    field: &K,
    gram: &Matrix<K::Elem>,
    sources: &[Vec<K::Elem>],
    targets: &[Vec<K::Elem>],
) -> Result<Vec<Vec<K::Elem>>, QuadError> {
    let n = gram.rows();
    if sources.len() != targets.len() {
        return Err(QuadError::DimensionMismatch(
            "source and target system sizes differ".into(),
        ));
    }
    if sources.iter().chain(targets.iter()).any(|v| v.len() != n) {
        return Err(QuadError::DimensionMismatch("vector size != form dim".into()));
    }
    let m = sources.len();
    if m == 0 {
        return Ok(vec![]);
    }
    // Gram agreement, reported 1-indexed.
    let sg = subspace_gram(field, gram, sources);
    let tg = subspace_gram(field, gram, targets);
    for i in 0..m {
        for j in i..m {
            if sg.get(i, j) != tg.get(i, j) {
                return Err(QuadError::GramMismatch(i + 1, j + 1));
            }
        }
    }
    if !vectors_independent(field, sources) || !vectors_independent(field, targets) {
        return Err(QuadError::DependentSystem);
    }

    // Degenerate span: complete the radical hyperbolically on both sides.
    let radical = kernel_basis(field, &sg)?;
    let (a_sys, b_sys) = if radical.is_empty() {
        (sources.to_vec(), targets.to_vec())
    } else {
        hyperbolic_complete(field, gram, sources, targets, &radical)?
    };

    // Orthogonalize the (now nondegenerate) span; the same coordinate
    // change applies to both sides because the Grams agree.
    let span_gram = subspace_gram(field, gram, &a_sys);
    let (c_change, diag) = congruent_diagonalize(field, &span_gram)?;
    if diag.iter().any(|d| field.is_zero(d)) {
        return Err(QuadError::Degenerate);
    }
    let mm = a_sys.len();
    let combine = |sys: &[Vec<K::Elem>], j: usize| -> Vec<K::Elem> {
        let mut acc = vec![field.zero(); n];
        for (i, v) in sys.iter().enumerate() {
            let coef = c_change.get(i, j);
            for (a, b) in acc.iter_mut().zip(v.iter()) {
                *a = field.add(a, &field.mul(coef, b));
            }
        }
        acc
    };

    // One or two reflections per orthogonal pair (u_i, v_i): the classical
    // step tau_{u-v}, falling back to tau_v tau_{u+v} when u - v is
    // isotropic (one of the two always works in char != 2).
    let mut word: Vec<Vec<K::Elem>> = Vec::new(); // application order
    for j in 0..mm {
        let u0 = combine(&a_sys, j);
        let v = combine(&b_sys, j);
        let u = apply_word_to_vec(field, gram, &reverse_word(&word), &u0);
        if u == v {
            continue;
        }
        let diff: Vec<K::Elem> = u
            .iter()
            .zip(v.iter())
            .map(|(a, b)| field.sub(a, b))
            .collect();
        if !field.is_zero(&bilinear_generic(field, gram, &diff, &diff)) {
            word.push(diff);
        } else {
            let sum: Vec<K::Elem> = u
                .iter()
                .zip(v.iter())
                .map(|(a, b)| field.add(a, b))
                .collect();
            debug_assert!(!field.is_zero(&bilinear_generic(field, gram, &sum, &sum)));
            word.push(sum);
            word.push(v.clone());
        }
        debug_assert_eq!(
            apply_word_to_vec(field, gram, &reverse_word(&word), &u0),
            v
        );
    }

    // Stored in application order; the public convention is word[0] last.
    let word = reverse_word(&word);
    for (a, b) in sources.iter().zip(targets.iter()) {
        let image = apply_word_to_vec(field, gram, &word, a);
        assert_eq!(&image, b, "witt extension postcondition");
    }
    Ok(word)
}

fn reverse_word<E: Clone>(word: &[Vec<E>]) -> Vec<Vec<E>> {
    word.iter().rev().cloned().collect()
}

/// For each radical basis vector r of the span, adjoin on both sides a
/// vector w with (r|w) = 1, zero products against everything else adjoined
/// or spanned, and f(w) = 0. Both sides receive identical prescriptions, so
/// the extended Grams agree and the extended span is nondegenerate.
fn hyperbolic_complete<K: Field>(
    field: &K,
    gram: &Matrix<K::Elem>,
    sources: &[Vec<K::Elem>],
    targets: &[Vec<K::Elem>],
    radical: &[Vec<K::Elem>],
) -> Result<(Vec<Vec<K::Elem>>, Vec<Vec<K::Elem>>), QuadError> {
    let m = sources.len();
    let combine = |sys: &[Vec<K::Elem>], coords: &[K::Elem]| -> Vec<K::Elem> {
        let mut acc = vec![field.zero(); sys[0].len()];
        for (i, v) in sys.iter().enumerate() {
            for (a, b) in acc.iter_mut().zip(v.iter()) {
                *a = field.add(a, &field.mul(&coords[i], b));
            }
        }
        acc
    };

    // Complement of the radical inside the span: standard coordinates not
    // used as pivots by the radical coordinate matrix. (Kernel vectors of
    // the span Gram are coordinate vectors of length m.)
    let rad_coords: Vec<&Vec<K::Elem>> = radical.iter().collect();
    let pivot_cols = {
        let mut mtx = Matrix::from_fn(radical.len(), m, |i, j| rad_coords[i][j].clone());
        let mut aug = Matrix::from_fn(radical.len(), 0, |_, _| field.zero());
        rref_pivot_cols(field, &mut mtx, &mut aug)
    };
    let complement_idx: Vec<usize> = (0..m).filter(|j| !pivot_cols.contains(j)).collect();

    let rad_a: Vec<Vec<K::Elem>> = rad_coords.iter().map(|c| combine(sources, c)).collect();
    let rad_b: Vec<Vec<K::Elem>> = rad_coords.iter().map(|c| combine(targets, c)).collect();

    let mut a_sys = sources.to_vec();
    let mut b_sys = targets.to_vec();
    let mut new_a: Vec<Vec<K::Elem>> = Vec::new();
    let mut new_b: Vec<Vec<K::Elem>> = Vec::new();
    for k in 0..rad_a.len() {
        let w_a = completion_vector(field, gram, &rad_a, &complement_idx, sources, &new_a, k)?;
        let w_b = completion_vector(field, gram, &rad_b, &complement_idx, targets, &new_b, k)?;
        new_a.push(w_a);
        new_b.push(w_b);
    }
    a_sys.extend(new_a);
    b_sys.extend(new_b);
    Ok((a_sys, b_sys))
}

/// Solve for w with (w|rad_l) = delta_{kl}, (w|sys_j) = 0 for complement
/// indices j, (w|prev_l) = 0; then shift along rad_k to force f(w) = 0.
fn completion_vector<K: Field>(
    field: &K,
    gram: &Matrix<K::Elem>,
    rad: &[Vec<K::Elem>],
    complement_idx: &[usize],
    sys: &[Vec<K::Elem>],
    prev: &[Vec<K::Elem>],
    k: usize,
) -> Result<Vec<K::Elem>, QuadError> {
    let mut constraint_vectors: Vec<Vec<K::Elem>> = Vec::new();
    let mut rhs: Vec<K::Elem> = Vec::new();
    for (l, r) in rad.iter().enumerate() {
        constraint_vectors.push(r.clone());
        rhs.push(if l == k { field.one() } else { field.zero() });
    }
    for &j in complement_idx {
        constraint_vectors.push(sys[j].clone());
        rhs.push(field.zero());
    }
    for w in prev {
        constraint_vectors.push(w.clone());
        rhs.push(field.zero());
    }
    let rows: Vec<Vec<K::Elem>> = constraint_vectors
        .iter()
        .map(|v| mat_vec(field, gram, v))
        .collect();
    let mtx = Matrix::from_rows(rows).map_err(QuadError::Arith)?;
    let sol = solve_linear(field, &mtx, &rhs)?
        .ok_or(QuadError::Degenerate)?;
    let w0 = sol.particular;
    // f(w0 + t r_k) = f(w0) + 2 t since (w0|r_k) = 1 and f(r_k) = 0.
    let f_w0 = bilinear_generic(field, gram, &w0, &w0);
    let t = field.neg(&field.div_unit(&f_w0, &field.from_i64(2)));
    let w: Vec<K::Elem> = w0
        .iter()
        .zip(rad[k].iter())
        .map(|(a, r)| field.add(a, &field.mul(&t, r)))
        .collect();
    debug_assert!(field.is_zero(&bilinear_generic(field, gram, &w, &w)));
    Ok(w)
}

/// Pivot columns of the reduced row echelon form (unit pivots; fields only
/// here so this never fails).
fn rref_pivot_cols<K: Field>(
    field: &K,
    m: &mut Matrix<K::Elem>,
    _aug: &mut Matrix<K::Elem>,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        let Some(i) = (r..m.rows()).find(|&i| !field.is_zero(m.get(i, c))) else {
            continue;
        };
        for j in 0..m.cols() {
            let x = m.get(r, j).clone();
            m.set(r, j, m.get(i, j).clone());
            m.set(i, j, x);
        }
        let inv = field.inverse(m.get(r, c)).expect("nonzero over a field");
        for j in 0..m.cols() {
            m.set(r, j, field.mul(&inv, m.get(r, j)));
        }
        for i2 in 0..m.rows() {
            if i2 == r || field.is_zero(m.get(i2, c)) {
                continue;
            }
            let factor = m.get(i2, c).clone();
            for j in 0..m.cols() {
                let delta = field.mul(&factor, m.get(r, j));
                m.set(i2, j, field.sub(m.get(i2, j), &delta));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}
