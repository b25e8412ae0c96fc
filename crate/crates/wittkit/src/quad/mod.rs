//! Quadratic forms over Q in the distinguished shape
//! x1*x2 + a3*x3^2 + ... + an*xn^2, reflections, constructive Witt
//! extension, spinor norms and normalization of arbitrary isotropic forms
//! into that shape.
//!
//! Conventions: the Gram matrix G is that of the bilinear form (x|y) with
//! (x|x) = f(x), so the hyperbolic block carries 1/2 off the diagonal. All
//! isometry-producing operations are contracts on postconditions; outputs
//! are never unique and tests must not compare against fixed matrices.

mod cartan;
mod witt;

pub use cartan::{cartan_dieudonne, cartan_word_generic, GridField};
pub use witt::{
    anisotropic_in_span, congruent_diagonalize, orthogonal_complement_basis, reflection_matrix,
    subspace_gram, witt_extend_generic, SpecialTarget,
};

use crate::arith::{
    is_square_rat, mat_determinant, mat_identity, mat_inverse, mat_mul, mat_vec, rat_i64,
    solve_linear, square_class, ArithError, Matrix, MatrixQ, Rat, RatField, SquareClass,
    DEFAULT_FACTOR_BOUND,
};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("form is degenerate")]
    Degenerate,
    #[error("form is not in standard shape")]
    NotStandardShape,
    #[error("reflection vector is isotropic")]
    IsotropicReflectionVector,
    #[error("zero scalar where a nonzero one is required")]
    ZeroScalar,
    #[error("gram mismatch at ({0},{1})")]
    GramMismatch(usize, usize),
    #[error("input system is linearly dependent")]
    DependentSystem,
    #[error("matrix is not orthogonal for this form")]
    NotOrthogonal,
    #[error("spinor norm defined on SO only")]
    SpinorOnSpecialOnly,
    #[error("no admissible correction vector found")]
    NoCorrectionVector,
    #[error("sources must lie in the orthogonal complement of the hyperbolic plane <e1,e2>")]
    SourcesMeetHyperbolicPlane,
    #[error("not isotropic over R")]
    NotIsotropicOverR,
    #[error("witness required: no isotropic vector of height <= {0}")]
    WitnessRequired(u64),
    #[error("claimed witness is not an isotropic vector")]
    BadWitness,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A nondegenerate quadratic form over Q, optionally known to be in the
/// standard shape (then `standard` holds [a3, ..., an]).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    dim: usize,
    gram: MatrixQ,
    standard: Option<Vec<Rat>>,
}

impl QuadraticForm {
    pub fn from_gram(gram: MatrixQ) -> Result<Self, QuadError> {
        let n = gram.rows();
        if n == 0 || gram.cols() != n {
            return Err(QuadError::DimensionMismatch("gram must be square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if gram.get(i, j) != gram.get(j, i) {
                    return Err(QuadError::NotSymmetric);
                }
            }
        }
        if mat_determinant(&RatField, &gram)?.is_zero() {
            return Err(QuadError::Degenerate);
        }
        let standard = Self::detect_standard(&gram);
        Ok(QuadraticForm {
            dim: n,
            gram,
            standard,
        })
    }

    /// Build x1*x2 + alphas\[0\]*x3^2 + ... directly from the coefficients.
    pub fn standard(alphas: &[Rat]) -> Result<Self, QuadError> {
        if alphas.is_empty() {
            return Err(QuadError::DimensionMismatch(
                "standard shape needs at least one diagonal coefficient".into(),
            ));
        }
        if alphas.iter().any(|a| a.is_zero()) {
            return Err(QuadError::Degenerate);
        }
        let n = alphas.len() + 2;
        let half = rat_i64(1) / rat_i64(2);
        let gram = Matrix::from_fn(n, n, |i, j| {
            if (i, j) == (0, 1) || (i, j) == (1, 0) {
                half.clone()
            } else if i == j && i >= 2 {
                alphas[i - 2].clone()
            } else {
                Rat::zero()
            }
        });
        Ok(QuadraticForm {
            dim: n,
            gram,
            standard: Some(alphas.to_vec()),
        })
    }

    fn detect_standard(gram: &MatrixQ) -> Option<Vec<Rat>> {
        let n = gram.rows();
        if n < 3 {
            return None;
        }
        let half = rat_i64(1) / rat_i64(2);
        for i in 0..n {
            for j in 0..n {
                let e = gram.get(i, j);
                let ok = if (i, j) == (0, 1) || (i, j) == (1, 0) {
                    *e == half
                } else if i == j && i >= 2 {
                    !e.is_zero()
                } else {
                    e.is_zero()
                };
                if !ok {
                    return None;
                }
            }
        }
        Some((2..n).map(|i| gram.get(i, i).clone()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &MatrixQ {
        &self.gram
    }

    pub fn standard_coeffs(&self) -> Option<&[Rat]> {
        self.standard.as_deref()
    }

    pub fn is_standard_shape(&self) -> bool {
        self.standard.is_some()
    }

    /// The distinguished anisotropic vector a = e_n (standard shape only).
    pub fn anchor_a(&self) -> Vec<Rat> {
        basis_vector(self.dim, self.dim - 1)
    }

    /// The distinguished anisotropic vector b = e_{n-1}.
    pub fn anchor_b(&self) -> Vec<Rat> {
        basis_vector(self.dim, self.dim - 2)
    }

    pub fn bilinear(&self, x: &[Rat], y: &[Rat]) -> Result<Rat, QuadError> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(QuadError::DimensionMismatch(format!(
                "form has dimension {}, vectors have {} and {}",
                self.dim,
                x.len(),
                y.len()
            )));
        }
        let gy = mat_vec(&RatField, &self.gram, y);
        Ok(x.iter().zip(gy.iter()).map(|(a, b)| a * b).sum())
    }

    pub fn evaluate(&self, x: &[Rat]) -> Result<Rat, QuadError> {
        self.bilinear(x, x)
    }
}

pub fn basis_vector(n: usize, i: usize) -> Vec<Rat> {
    (0..n)
        .map(|j| if j == i { Rat::one() } else { Rat::zero() })
        .collect()
}

/// An exact orthogonal transformation, certified at construction to satisfy
/// t(M) G M = G, with determinant +1 or -1 and an optional reflection word
/// whose product is M (word\[0\] applied last).
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMapQ {
    matrix: MatrixQ,
    det: i8,
    word: Option<ReflectionWord>,
}

/// Ordered list of anisotropic vectors c_i; the associated map is the
/// product of the reflections tau_{c_i}, first entry leftmost.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionWord {
    pub vectors: Vec<Vec<Rat>>,
}

impl ReflectionWord {
    pub fn empty() -> Self {
        ReflectionWord { vectors: vec![] }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn product(&self, form: &QuadraticForm) -> Result<MatrixQ, QuadError> {
        let mut acc = mat_identity(&RatField, form.dim());
        for c in &self.vectors {
            let r = reflection_matrix(&RatField, form.gram(), c)
                .ok_or(QuadError::IsotropicReflectionVector)?;
            acc = mat_mul(&RatField, &acc, &r);
        }
        Ok(acc)
    }

    /// Product of the f(c_i): the spinor norm of the word, unreduced.
    pub fn spinor_product(&self, form: &QuadraticForm) -> Result<Rat, QuadError> {
        let mut acc = Rat::one();
        for c in &self.vectors {
            acc *= form.evaluate(c)?;
        }
        Ok(acc)
    }

    pub fn reversed(&self) -> Self {
        ReflectionWord {
            vectors: self.vectors.iter().rev().cloned().collect(),
        }
    }
}

impl OrthogonalMapQ {
    /// Validate t(M) G M = G and det in {1, -1}; attach a word after
    /// checking its product equals M.
    pub fn new(
        form: &QuadraticForm,
        matrix: MatrixQ,
        word: Option<ReflectionWord>,
    ) -> Result<Self, QuadError> {
        let q = RatField;
        if matrix.rows() != form.dim() || matrix.cols() != form.dim() {
            return Err(QuadError::DimensionMismatch("map size != form dim".into()));
        }
        let lhs = mat_mul(&q, &mat_mul(&q, &matrix.transpose(), form.gram()), &matrix);
        if &lhs != form.gram() {
            return Err(QuadError::NotOrthogonal);
        }
        let det = mat_determinant(&q, &matrix)?;
        let det = if det == Rat::one() {
            1
        } else if det == -Rat::one() {
            -1
        } else {
            return Err(QuadError::NotOrthogonal);
        };
        if let Some(w) = &word {
            if w.product(form)? != matrix {
                return Err(QuadError::NotOrthogonal);
            }
        }
        Ok(OrthogonalMapQ { matrix, det, word })
    }

    pub fn identity(form: &QuadraticForm) -> Self {
        OrthogonalMapQ {
            matrix: mat_identity(&RatField, form.dim()),
            det: 1,
            word: Some(ReflectionWord::empty()),
        }
    }

    pub fn from_word(form: &QuadraticForm, word: ReflectionWord) -> Result<Self, QuadError> {
        let matrix = word.product(form)?;
        let det = if word.len().is_multiple_of(2) { 1 } else { -1 };
        Ok(OrthogonalMapQ {
            matrix,
            det,
            word: Some(word),
        })
    }

    pub fn matrix(&self) -> &MatrixQ {
        &self.matrix
    }

    pub fn det(&self) -> i8 {
        self.det
    }

    pub fn word(&self) -> Option<&ReflectionWord> {
        self.word.as_ref()
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        mat_vec(&RatField, &self.matrix, v)
    }

    pub fn compose(&self, other: &OrthogonalMapQ) -> OrthogonalMapQ {
        let matrix = mat_mul(&RatField, &self.matrix, &other.matrix);
        let word = match (&self.word, &other.word) {
            (Some(a), Some(b)) => Some(ReflectionWord {
                vectors: a.vectors.iter().chain(b.vectors.iter()).cloned().collect(),
            }),
            _ => None,
        };
        OrthogonalMapQ {
            matrix,
            det: self.det * other.det,
            word,
        }
    }

    pub fn inverse(&self) -> OrthogonalMapQ {
        let matrix = mat_inverse(&RatField, &self.matrix).expect("orthogonal maps are invertible");
        OrthogonalMapQ {
            matrix,
            det: self.det,
            word: self.word.as_ref().map(|w| w.reversed()),
        }
    }

    pub fn is_identity(&self) -> bool {
        let n = self.matrix.rows();
        self.matrix == mat_identity(&RatField, n)
    }

    /// Whether the map lies in the kernel of the spinor norm on SO: det +1
    /// and the reflection-word product of f-values a rational square. Uses
    /// the attached word when present, otherwise factors the map.
    pub fn is_spinor_trivial(&self, form: &QuadraticForm) -> Result<bool, QuadError> {
        if self.det != 1 {
            return Ok(false);
        }
        Ok(is_square_rat(&self.spinor_product(form)?))
    }

    /// Unreduced spinor value: the product of f over some reflection word.
    pub fn spinor_product(&self, form: &QuadraticForm) -> Result<Rat, QuadError> {
        let word = match &self.word {
            Some(w) => w.clone(),
            None => cartan_dieudonne(form, self)?,
        };
        word.spinor_product(form)
    }
}

/// tau_c(x) = x - (2 (x|c) / f(c)) c, as a certified map with word \[c\].
pub fn reflection(form: &QuadraticForm, c: &[Rat]) -> Result<OrthogonalMapQ, QuadError> {
    if c.len() != form.dim() {
        return Err(QuadError::DimensionMismatch("reflection vector size".into()));
    }
    let matrix = reflection_matrix(&RatField, form.gram(), c)
        .ok_or(QuadError::IsotropicReflectionVector)?;
    Ok(OrthogonalMapQ {
        matrix,
        det: -1,
        word: Some(ReflectionWord {
            vectors: vec![c.to_vec()],
        }),
    })
}

/// The rotation e1 -> lambda e1, e2 -> e2/lambda, identity elsewhere.
/// Fixes e3..en (hence the anchors a, b), has det +1 and spinor norm the
/// class of lambda; realized by the word tau_{e1-e2} tau_{e1-lambda e2}.
pub fn hyperbolic_rotation(form: &QuadraticForm, lambda: &Rat) -> Result<OrthogonalMapQ, QuadError> {
    if !form.is_standard_shape() {
        return Err(QuadError::NotStandardShape);
    }
    if lambda.is_zero() {
        return Err(QuadError::ZeroScalar);
    }
    if lambda.is_one() {
        return Ok(OrthogonalMapQ::identity(form));
    }
    let n = form.dim();
    let mut c1 = basis_vector(n, 0);
    c1[1] = -Rat::one();
    let mut c2 = basis_vector(n, 0);
    c2[1] = -lambda.clone();
    let word = ReflectionWord {
        vectors: vec![c1, c2],
    };
    let map = OrthogonalMapQ::from_word(form, word)?;
    debug_assert_eq!(map.matrix().get(0, 0), lambda);
    Ok(map)
}

/// Which subspace a represented value must land in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentIn {
    /// The orthogonal complement of both anchors a and b.
    PerpAB,
    /// The orthogonal complement of a only.
    PerpA,
}

/// A nonzero vector w in the requested complement with f(w) = c, built on
/// the hyperbolic plane <e1, e2>: w = c e1 + e2, or e1 when c = 0.
pub fn represent_value(
    form: &QuadraticForm,
    c: &Rat,
    constraint: RepresentIn,
) -> Result<Vec<Rat>, QuadError> {
    if !form.is_standard_shape() {
        return Err(QuadError::NotStandardShape);
    }
    let n = form.dim();
    let needed = match constraint {
        RepresentIn::PerpAB => 4,
        RepresentIn::PerpA => 3,
    };
    if n < needed {
        return Err(QuadError::DimensionMismatch(
            "form too small for the requested complement".into(),
        ));
    }
    let mut w = basis_vector(n, 0);
    if !c.is_zero() {
        w[0] = c.clone();
        w[1] = Rat::one();
    }
    debug_assert_eq!(form.evaluate(&w).unwrap(), *c);
    Ok(w)
}

/// Exact signature (n_plus, n_minus) by symmetric Gaussian diagonalization.
pub fn signature(form: &QuadraticForm) -> (usize, usize) {
    let q = RatField;
    let (_, diag) = congruent_diagonalize(&q, form.gram()).expect("form is nondegenerate");
    let plus = diag.iter().filter(|d| d.is_positive()).count();
    let minus = diag.iter().filter(|d| d.is_negative()).count();
    debug_assert_eq!(plus + minus, form.dim());
    (plus, minus)
}

/// Extend the system map a_i -> b_i to an isometry of the whole space,
/// certified by a reflection word. Preconditions: equal Grams, each system
/// linearly independent over Q.
pub fn witt_extend(
    form: &QuadraticForm,
    sources: &[Vec<Rat>],
    targets: &[Vec<Rat>],
) -> Result<OrthogonalMapQ, QuadError> {
    let word = witt_extend_generic(&RatField, form.gram(), sources, targets)?;
    let map = OrthogonalMapQ::from_word(form, ReflectionWord { vectors: word })?;
    for (a, b) in sources.iter().zip(targets) {
        debug_assert_eq!(&map.apply(a), b);
    }
    Ok(map)
}

/// As `witt_extend`, but lands in SO (det +1) or in the spinor-norm kernel.
///
/// The corrections compose on the source side: a reflection tau_c with c
/// orthogonal to every source fixes the sources, and the spinor fix is a
/// hyperbolic rotation, which requires standard shape and all sources in
/// <e1, e2>-perp (targets may be arbitrary).
pub fn witt_extend_special(
    form: &QuadraticForm,
    sources: &[Vec<Rat>],
    targets: &[Vec<Rat>],
    target: SpecialTarget,
) -> Result<OrthogonalMapQ, QuadError> {
    let q = RatField;
    let mut map = witt_extend(form, sources, targets)?;
    if map.det() == -1 {
        // Determinant fix: append tau_c with c anisotropic, orthogonal to
        // all sources.
        let complement = orthogonal_complement_basis(&q, form.gram(), sources)?;
        let c = anisotropic_in_span(&q, form.gram(), &complement)
            .ok_or(QuadError::NoCorrectionVector)?;
        map = map.compose(&reflection(form, &c)?);
    }
    if target == SpecialTarget::SpinorKernel {
        if !form.is_standard_shape() {
            return Err(QuadError::NotStandardShape);
        }
        for s in sources {
            if !s[0].is_zero() || !s[1].is_zero() {
                return Err(QuadError::SourcesMeetHyperbolicPlane);
            }
        }
        let product = map.spinor_product(form)?;
        if !is_square_rat(&product) {
            // theta(map . h(1/product)) is the class of product^2: trivial.
            // h fixes e3..en, hence every source.
            let correction = hyperbolic_rotation(form, &(Rat::one() / &product))?;
            map = map.compose(&correction);
        }
        debug_assert!(map.is_spinor_trivial(form).unwrap());
    }
    for (a, b) in sources.iter().zip(targets) {
        debug_assert_eq!(&map.apply(a), b);
    }
    Ok(map)
}

/// Spinor norm of a det +1 map as a canonical square class. Needs to
/// factor the product of reflection values, so desk-scale inputs only;
/// `OrthogonalMapQ::is_spinor_trivial` avoids factoring entirely.
pub fn spinor_norm(form: &QuadraticForm, map: &OrthogonalMapQ) -> Result<SquareClass, QuadError> {
    if map.det() != 1 {
        return Err(QuadError::SpinorOnSpecialOnly);
    }
    let product = map.spinor_product(form)?;
    Ok(square_class(&product, DEFAULT_FACTOR_BOUND)?)
}

/// Enumerate primitive integer vectors by increasing max-norm, each norm
/// level in lexicographic order.
pub fn primitive_vectors_by_height(n: usize, max_height: u64) -> impl Iterator<Item = Vec<i64>> {
    fn gcd_all(v: &[i64]) -> i64 {
        v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x.abs()))
    }
    (1..=max_height as i64).flat_map(move |h| {
        let mut odometer = vec![-h; n];
        let mut done = false;
        std::iter::from_fn(move || loop {
            if done {
                return None;
            }
            let current = odometer.clone();
            let mut i = n;
            loop {
                if i == 0 {
                    done = true;
                    break;
                }
                i -= 1;
                if odometer[i] < h {
                    odometer[i] += 1;
                    for x in odometer[i + 1..].iter_mut() {
                        *x = -h;
                    }
                    break;
                }
            }
            if current.iter().map(|x| x.abs()).max() == Some(h) && gcd_all(&current) == 1 {
                return Some(current);
            }
        })
    })
}

/// Bring an arbitrary nondegenerate isotropic form of dimension >= 5 into
/// standard shape with integer diagonal coefficients, the last two
/// positive, and n+ >= n- after an optional global sign flip.
///
/// Returns (new form, T, s) with t(T) G_new T = s G_old exactly; T maps old
/// coordinates to new ones and conjugates the orthogonal groups.
pub fn normalize_to_standard(
    form: &QuadraticForm,
    witness: Option<&[Rat]>,
    height_bound: u64,
) -> Result<(QuadraticForm, MatrixQ, i8), QuadError> {
    let q = RatField;
    let n = form.dim();
    if n < 5 {
        return Err(QuadError::DimensionMismatch(
            "standard shape needs dimension >= 5".into(),
        ));
    }
    let (n_plus, n_minus) = signature(form);
    if n_plus == 0 || n_minus == 0 {
        return Err(QuadError::NotIsotropicOverR);
    }

    // Fast path: the form already satisfies every convention.
    if let Some(alphas) = form.standard_coeffs() {
        let integral = alphas.iter().all(|a| a.is_integer());
        let last_two_positive = alphas[n - 4].is_positive() && alphas[n - 3].is_positive();
        if integral && last_two_positive && n_plus >= n_minus {
            return Ok((form.clone(), mat_identity(&q, n), 1));
        }
    }

    let scale: i8 = if n_plus >= n_minus { 1 } else { -1 };
    let gram_scaled = if scale == 1 {
        form.gram().clone()
    } else {
        form.gram().map(|x| -x)
    };
    let scaled_bilinear = |x: &[Rat], y: &[Rat]| -> Rat {
        let gy = mat_vec(&q, &gram_scaled, y);
        x.iter().zip(gy.iter()).map(|(a, b)| a * b).sum()
    };

    // Isotropic vector: validate the witness or search by height.
    let v: Vec<Rat> = match witness {
        Some(w) => {
            if w.len() != n || w.iter().all(|x| x.is_zero()) || !form.evaluate(w)?.is_zero() {
                return Err(QuadError::BadWitness);
            }
            w.to_vec()
        }
        None => {
            let mut found = None;
            for cand in primitive_vectors_by_height(n, height_bound) {
                let cand: Vec<Rat> = cand.iter().map(|&x| rat_i64(x)).collect();
                if form.evaluate(&cand)?.is_zero() {
                    found = Some(cand);
                    break;
                }
            }
            found.ok_or(QuadError::WitnessRequired(height_bound))?
        }
    };

    // Hyperbolic pair (v, e2hat) with (v|e2hat) = 1/2 in the scaled form.
    let rows = Matrix::from_rows(vec![mat_vec(&q, &gram_scaled, &v)])?;
    let sol = solve_linear(&q, &rows, &[Rat::one()])?
        .expect("a nondegenerate form pairs nontrivially with any nonzero vector");
    let u = sol.particular; // (v|u) = 1
    let fu = scaled_bilinear(&u, &u);
    // u' = u - (f(u)/2) v is isotropic and still pairs to 1 with v.
    let half_fu = fu / rat_i64(2);
    let u_iso: Vec<Rat> = u
        .iter()
        .zip(v.iter())
        .map(|(ui, vi)| ui - &half_fu * vi)
        .collect();
    let e2hat: Vec<Rat> = u_iso.iter().map(|x| x / rat_i64(2)).collect();
    debug_assert!(scaled_bilinear(&u_iso, &u_iso).is_zero());

    // Orthogonal complement of the plane, diagonalized.
    let plane = [v.clone(), e2hat.clone()];
    let compl = {
        let rows: Vec<Vec<Rat>> = plane.iter().map(|w| mat_vec(&q, &gram_scaled, w)).collect();
        let m = Matrix::from_rows(rows)?;
        crate::arith::kernel_basis(&q, &m)?
    };
    debug_assert_eq!(compl.len(), n - 2);
    let compl_gram = Matrix::from_fn(n - 2, n - 2, |i, j| scaled_bilinear(&compl[i], &compl[j]));
    let (c_change, diag) = congruent_diagonalize(&q, &compl_gram)?;
    // w_i = sum_k compl[k] * C[k][i], with f(w_i) = diag[i] != 0.
    let mut diag_vectors: Vec<Vec<Rat>> = (0..n - 2)
        .map(|i| {
            let mut acc = vec![Rat::zero(); n];
            for (k, base) in compl.iter().enumerate() {
                let coef = c_change.get(k, i);
                for (a, b) in acc.iter_mut().zip(base.iter()) {
                    *a += coef * b;
                }
            }
            acc
        })
        .collect();

    // Rescale each to its squarefree integer value.
    let mut alphas: Vec<Rat> = Vec::with_capacity(n - 2);
    for (i, d) in diag.iter().enumerate() {
        let cls = square_class(d, DEFAULT_FACTOR_BOUND)?;
        let alpha = Rat::from_integer(cls.representative().clone());
        let ratio = d / &alpha; // a positive rational square
        let r = Rat::new(ratio.numer().sqrt(), ratio.denom().sqrt());
        debug_assert_eq!(&r * &r, ratio);
        for x in diag_vectors[i].iter_mut() {
            *x /= &r;
        }
        alphas.push(alpha);
    }

    // Put two positive coefficients last (the final two positives, keeping
    // everything else in order).
    let pos: Vec<usize> = (0..alphas.len())
        .filter(|&i| alphas[i].is_positive())
        .collect();
    if pos.len() < 2 {
        // n+ >= n- >= 1 and n >= 5 force at least two positive diagonal
        // values in the complement of a hyperbolic plane.
        return Err(QuadError::NotIsotropicOverR);
    }
    let chosen = [pos[pos.len() - 2], pos[pos.len() - 1]];
    let mut order: Vec<usize> = (0..alphas.len()).filter(|i| !chosen.contains(i)).collect();
    order.extend_from_slice(&chosen);

    let mut new_basis: Vec<Vec<Rat>> = vec![v, e2hat];
    let mut new_alphas: Vec<Rat> = Vec::with_capacity(n - 2);
    for &i in &order {
        new_basis.push(diag_vectors[i].clone());
        new_alphas.push(alphas[i].clone());
    }
    let u_mat = Matrix::from_fn(n, n, |i, j| new_basis[j][i].clone());
    let new_form = QuadraticForm::standard(&new_alphas)?;
    // t(U) G' U = G_new by construction; T = U^-1 then satisfies
    // t(T) G_new T = G' = s G_old.
    let check = mat_mul(&q, &mat_mul(&q, &u_mat.transpose(), &gram_scaled), &u_mat);
    if &check != new_form.gram() {
        return Err(QuadError::NotOrthogonal);
    }
    let t = mat_inverse(&q, &u_mat)?;
    Ok((new_form, t, scale))
}
