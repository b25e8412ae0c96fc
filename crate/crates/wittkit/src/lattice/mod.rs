//! Isometries of unimodular Z_p-lattices at finite precision: one-digit
//! orthogonality improvement, full lifting, transporter refinement through
//! a skew-symmetric solve over the residue field, the combined lift, the
//! determinant-constrained variant, vector levels and the orbit criterion.
//!
//! Everything is a congruence at a stated level. Internally the routines
//! work at precision N plus a few guard digits; no precision is actually
//! lost (all divisions are by units), the margin is a documented defensive
//! buffer.

use crate::arith::{
    kernel_basis, mat_determinant, mat_identity, mat_inverse, mat_mul, mat_sub, mat_vec,
    residue_valuation, solve_linear, ArithError, Matrix, MatrixFp, MatrixPN, PrimeField,
    ResidueRing, Ring, VectorPN,
};
use crate::quad::{witt_extend_generic, QuadError};
use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LatticeError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("gram determinant is not a p-unit")]
    NotUnimodular,
    #[error("level must be >= 1")]
    LevelZero,
    #[error("matrix congruence precondition fails at level {0}")]
    CongruenceFailure(u32),
    #[error("gram values of sources and targets disagree at ({0},{1})")]
    GramValueMismatch(usize, usize),
    #[error("reductions mod p are linearly dependent")]
    DependentReductions,
    #[error("level exceeds precision (vector is 0 mod p^N)")]
    LevelExceedsPrecision,
    #[error("f-values disagree mod p^N")]
    ValueMismatch,
    #[error("special lift needs 2m+1 <= n, got m={m}, n={n}")]
    SpecialNeedsRoom { m: usize, n: usize },
    #[error("precision too small: need at least {0}")]
    PrecisionTooSmall(u32),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("residue Witt step failed: {0}")]
    ResidueWitt(String),
}

impl From<QuadError> for LatticeError {
    fn from(e: QuadError) -> Self {
        LatticeError::ResidueWitt(e.to_string())
    }
}

/// A unimodular quadratic lattice over Z_p at working precision: gram is
/// symmetric with unit determinant mod p, p odd.
#[derive(Debug, Clone, PartialEq)]
pub struct UnimodularLatticeZp {
    ring: ResidueRing,
    dim: usize,
    gram: MatrixPN,
}

impl UnimodularLatticeZp {
    pub fn new(ring: ResidueRing, gram: MatrixPN) -> Result<Self, LatticeError> {
        let n = gram.rows();
        if n == 0 || gram.cols() != n {
            return Err(LatticeError::DimensionMismatch("gram must be square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if gram.get(i, j) != gram.get(j, i) {
                    return Err(LatticeError::DimensionMismatch("gram not symmetric".into()));
                }
            }
        }
        match mat_determinant(&ring, &gram) {
            Ok(d) if ring.is_unit(&d) => {}
            Ok(_) | Err(ArithError::NonUnitPivot) => return Err(LatticeError::NotUnimodular),
            Err(e) => return Err(e.into()),
        }
        Ok(UnimodularLatticeZp { ring, dim: n, gram })
    }

    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &MatrixPN {
        &self.gram
    }

    pub fn prime(&self) -> u64 {
        self.ring.prime()
    }

    /// The same lattice viewed at another precision (entries lifted
    /// canonically or truncated).
    pub fn at_precision(&self, precision: u32) -> UnimodularLatticeZp {
        let ring = self.ring.with_precision(precision);
        let gram = self.gram.map(|x| x % ring.modulus());
        UnimodularLatticeZp {
            ring,
            dim: self.dim,
            gram,
        }
    }

    pub fn bilinear(&self, x: &VectorPN, y: &VectorPN) -> BigUint {
        let gy = mat_vec(&self.ring, &self.gram, y);
        let mut acc = self.ring.zero();
        for (a, b) in x.iter().zip(gy.iter()) {
            acc = self.ring.add(&acc, &self.ring.mul(a, b));
        }
        acc
    }

    pub fn evaluate(&self, x: &VectorPN) -> BigUint {
        self.bilinear(x, x)
    }

    fn gram_fp(&self) -> (PrimeField, MatrixFp) {
        let fp = self.ring.residue_field();
        let gram = self.gram.map(|x| self.ring.to_residue_field(x));
        (fp, gram)
    }
}

/// An orthogonal transformation of the lattice certified at a precision:
/// t(X) F X = F mod p^certified and X invertible mod p.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMapZp {
    matrix: MatrixPN,
    certified_precision: u32,
}

impl OrthogonalMapZp {
    /// Re-verifies the orthogonality congruence; never trusts the caller.
    pub fn new(
        lattice: &UnimodularLatticeZp,
        matrix: MatrixPN,
        certified_precision: u32,
    ) -> Result<Self, LatticeError> {
        let ring = lattice.ring();
        if matrix.rows() != lattice.dim() || matrix.cols() != lattice.dim() {
            return Err(LatticeError::DimensionMismatch("map size != dim".into()));
        }
        if certified_precision > ring.precision() {
            return Err(LatticeError::PrecisionTooSmall(certified_precision));
        }
        let lhs = mat_mul(
            ring,
            &mat_mul(ring, &matrix.transpose(), lattice.gram()),
            &matrix,
        );
        if !matrices_congruent(ring, &lhs, lattice.gram(), certified_precision) {
            return Err(LatticeError::CongruenceFailure(certified_precision));
        }
        Ok(OrthogonalMapZp {
            matrix,
            certified_precision,
        })
    }

    pub fn matrix(&self) -> &MatrixPN {
        &self.matrix
    }

    pub fn certified_precision(&self) -> u32 {
        self.certified_precision
    }

    pub fn apply(&self, ring: &ResidueRing, v: &VectorPN) -> VectorPN {
        mat_vec(ring, &self.matrix, v)
    }

    pub fn det_sign(&self, lattice: &UnimodularLatticeZp) -> Result<i8, LatticeError> {
        det_sign(lattice.ring(), &self.matrix)
    }
}

/// Orthogonal matrices mod p^N have det = +/-1 (the only square roots of 1
/// in Z/p^N for odd p).
pub fn det_sign(ring: &ResidueRing, matrix: &MatrixPN) -> Result<i8, LatticeError> {
    let d = mat_determinant(ring, matrix).map_err(|_| LatticeError::NotUnimodular)?;
    if ring.is_zero(&ring.sub(&d, &ring.one())) {
        Ok(1)
    } else if ring.is_zero(&ring.add(&d, &ring.one())) {
        Ok(-1)
    } else {
        Err(LatticeError::NotUnimodular)
    }
}

pub fn matrices_congruent(ring: &ResidueRing, a: &MatrixPN, b: &MatrixPN, level: u32) -> bool {
    a.entries()
        .zip(b.entries())
        .all(|(x, y)| ring.congruent_at(x, y, level))
}

pub fn vectors_congruent(ring: &ResidueRing, a: &VectorPN, b: &VectorPN, level: u32) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b.iter())
            .all(|(x, y)| ring.congruent_at(x, y, level))
}

/// Transporter problem: find X orthogonal with X a_i = b_i mod p^N.
/// Invariants: gram values agree mod p^N and both reductions mod p are
/// linearly independent.
#[derive(Debug, Clone)]
pub struct TransporterProblem {
    pub lattice: UnimodularLatticeZp,
    pub sources: Vec<VectorPN>,
    pub targets: Vec<VectorPN>,
}

impl TransporterProblem {
    pub fn new(
        lattice: UnimodularLatticeZp,
        sources: Vec<VectorPN>,
        targets: Vec<VectorPN>,
    ) -> Result<Self, LatticeError> {
        if sources.len() != targets.len() {
            return Err(LatticeError::DimensionMismatch(
                "source and target counts differ".into(),
            ));
        }
        let n = lattice.dim();
        if sources.iter().chain(targets.iter()).any(|v| v.len() != n) {
            return Err(LatticeError::DimensionMismatch("vector size != dim".into()));
        }
        let m = sources.len();
        for i in 0..m {
            for j in i..m {
                let sa = lattice.bilinear(&sources[i], &sources[j]);
                let sb = lattice.bilinear(&targets[i], &targets[j]);
                if !lattice.ring().is_zero(&lattice.ring().sub(&sa, &sb)) {
                    return Err(LatticeError::GramValueMismatch(i + 1, j + 1));
                }
            }
        }
        let fp = lattice.ring().residue_field();
        for sys in [&sources, &targets] {
            if !reductions_independent(lattice.ring(), &fp, sys) {
                return Err(LatticeError::DependentReductions);
            }
        }
        Ok(TransporterProblem {
            lattice,
            sources,
            targets,
        })
    }

    pub fn count(&self) -> usize {
        self.sources.len()
    }
}

fn reductions_independent(ring: &ResidueRing, fp: &PrimeField, vectors: &[VectorPN]) -> bool {
    if vectors.is_empty() {
        return true;
    }
    let n = vectors[0].len();
    let m = Matrix::from_fn(n, vectors.len(), |i, j| {
        ring.to_residue_field(&vectors[j][i])
    });
    kernel_basis(fp, &m).is_ok_and(|k| k.is_empty())
}

/// Find Y over F_p with t(Y) F + F Y = 0 and Y x_i = y_i. Preconditions:
/// the x_i are independent and (x_i|y_j) + (x_j|y_i) = 0; solvability is
/// then guaranteed, and we solve the combined linear system directly.
pub fn skew_solve(
    fp: &PrimeField,
    gram: &MatrixFp,
    sources: &[Vec<u64>],
    targets: &[Vec<u64>],
) -> Result<MatrixFp, LatticeError> {
    let n = gram.rows();
    let m = sources.len();
    if targets.len() != m || sources.iter().chain(targets.iter()).any(|v| v.len() != n) {
        return Err(LatticeError::DimensionMismatch("skew solve shapes".into()));
    }
    let bil = |x: &[u64], y: &[u64]| -> u64 {
        let gy = mat_vec(fp, gram, y);
        let mut acc = 0u64;
        for (a, b) in x.iter().zip(gy.iter()) {
            acc = fp.add(&acc, &fp.mul(a, b));
        }
        acc
    };
    for i in 0..m {
        for j in 0..m {
            let s = fp.add(&bil(&sources[i], &targets[j]), &bil(&sources[j], &targets[i]));
            if s != 0 {
                return Err(LatticeError::GramValueMismatch(i + 1, j + 1));
            }
        }
    }

    // Unknowns: the n^2 entries of Y, row major. Equations: the upper
    // triangle (with diagonal) of t(Y)F + FY = 0, then Y x_i = y_i.
    let unknowns = n * n;
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut rhs: Vec<u64> = Vec::new();
    for a in 0..n {
        for b in a..n {
            // (t(Y)F + FY)[a][b] = sum_k Y[k][a] F[k][b] + F[a][k] Y[k][b]
            let mut row = vec![0u64; unknowns];
            for k in 0..n {
                row[k * n + a] = fp.add(&row[k * n + a], gram.get(k, b));
                row[k * n + b] = fp.add(&row[k * n + b], gram.get(a, k));
            }
            rows.push(row);
            rhs.push(0);
        }
    }
    for (x, y) in sources.iter().zip(targets.iter()) {
        for a in 0..n {
            let mut row = vec![0u64; unknowns];
            for k in 0..n {
                row[a * n + k] = x[k];
            }
            rows.push(row);
            rhs.push(y[a]);
        }
    }
    let system = Matrix::from_rows(rows).map_err(LatticeError::Arith)?;
    let sol = solve_linear(fp, &system, &rhs)?
        .ok_or_else(|| LatticeError::ResidueWitt("skew system unexpectedly unsolvable".into()))?;
    Ok(Matrix::from_fn(n, n, |i, j| sol.particular[i * n + j]))
}

/// One digit of orthogonality: given t(X) F X = F mod p^l (l >= 1) with
/// F X invertible mod p, returns Y = X + p^l Z with t(Y) F Y = F mod
/// p^{l+1} and Y = X mod p^l, where Z = t((F X)^{-1}) A / 2 and
/// p^l A = F - t(X) F X.
pub fn improve_orthogonality(
    lattice: &UnimodularLatticeZp,
    x: &MatrixPN,
    level: u32,
) -> Result<MatrixPN, LatticeError> {
    let ring = lattice.ring();
    if level == 0 {
        return Err(LatticeError::LevelZero);
    }
    let f = lattice.gram();
    let txfx = mat_mul(ring, &mat_mul(ring, &x.transpose(), f), x);
    let defect = mat_sub(ring, f, &txfx);
    if defect
        .entries()
        .any(|e| !ring.congruent_at(e, &ring.zero(), level))
    {
        return Err(LatticeError::CongruenceFailure(level));
    }
    // A = defect / p^l, known mod p^{W-l}.
    let a = defect.map(|e| ring.divide_by_p_pow(e, level));
    let fx = mat_mul(ring, f, x);
    let fx_inv = mat_inverse(ring, &fx).map_err(|_| LatticeError::NotUnimodular)?;
    let half = ring
        .inverse(&ring.from_i64(2))
        .expect("2 is a unit for odd p");
    let z = mat_mul(ring, &fx_inv.transpose(), &a).map(|e| ring.mul(&half, e));
    let p_l = BigUint::from(ring.prime()).pow(level);
    Ok(Matrix::from_fn(lattice.dim(), lattice.dim(), |i, j| {
        ring.add(x.get(i, j), &ring.mul(&p_l, z.get(i, j)))
    }))
}

/// Iterate `improve_orthogonality` from level l up to the target precision:
/// the digit-by-digit limit construction truncated at N.
pub fn lift_to_orthogonal(
    lattice: &UnimodularLatticeZp,
    x: &MatrixPN,
    level: u32,
    target: u32,
) -> Result<OrthogonalMapZp, LatticeError> {
    if level == 0 {
        return Err(LatticeError::LevelZero);
    }
    if target > lattice.ring().precision() {
        return Err(LatticeError::PrecisionTooSmall(target));
    }
    let mut y = x.map(|e| e % lattice.ring().modulus());
    let mut l = level;
    while l < target {
        y = improve_orthogonality(lattice, &y, l)?;
        l += 1;
    }
    OrthogonalMapZp::new(lattice, y, target)
}

/// One transporter digit (the lattice analogue of a Hensel step): with
/// X_s a_i = b_i mod p^s, produce X = E + p^s Y with X = E mod p^s,
/// t(X) F X = F mod p^{s+1} and X (X_s a_i) = b_i mod p^{s+1}. Y solves
/// the skew system on the reduced defect vectors c_i = (b_i - X_s a_i)/p^s.
pub fn refine_transporter(
    lattice: &UnimodularLatticeZp,
    current: &OrthogonalMapZp,
    sources: &[VectorPN],
    targets: &[VectorPN],
    s: u32,
) -> Result<MatrixPN, LatticeError> {
    let ring = lattice.ring();
    if s == 0 {
        return Err(LatticeError::LevelZero);
    }
    let moved: Vec<VectorPN> = sources.iter().map(|a| current.apply(ring, a)).collect();
    for (ma, b) in moved.iter().zip(targets.iter()) {
        if !vectors_congruent(ring, ma, b, s) {
            return Err(LatticeError::CongruenceFailure(s));
        }
    }
    let (fp, gram_fp) = lattice.gram_fp();
    let defects: Vec<Vec<u64>> = moved
        .iter()
        .zip(targets.iter())
        .map(|(ma, b)| {
            (0..lattice.dim())
                .map(|k| {
                    let diff = ring.sub(&b[k], &ma[k]);
                    let quotient = ring.divide_by_p_pow(&diff, s);
                    ring.to_residue_field(&quotient)
                })
                .collect()
        })
        .collect();
    let moved_fp: Vec<Vec<u64>> = moved
        .iter()
        .map(|v| v.iter().map(|e| ring.to_residue_field(e)).collect())
        .collect();
    let y = skew_solve(&fp, &gram_fp, &moved_fp, &defects)?;
    let p_s = BigUint::from(ring.prime()).pow(s);
    Ok(Matrix::from_fn(lattice.dim(), lattice.dim(), |i, j| {
        let yl = BigUint::from(*y.get(i, j));
        let base = if i == j { ring.one() } else { ring.zero() };
        ring.add(&base, &ring.mul(&p_s, &yl))
    }))
}

/// Guard digits added to the working precision; divisions are all by
/// units so these are a defensive margin only.
pub fn guard_digits(prime: u64, dim: usize) -> u32 {
    let mut g = 2u32;
    let mut pw = prime;
    while (pw as usize) < dim {
        pw = pw.saturating_mul(prime);
        g += 1;
    }
    g
}

/// The full constructive transporter: base step by Witt's theorem on the
/// residue space (through the field-generic extension engine), lifted to an
/// orthogonal matrix at working precision, then alternating refinement and
/// lifting up the levels. The stabilization X_{s+1} = X_s mod p^s is
/// asserted at every iteration.
pub fn witt_lift(problem: &TransporterProblem, target: u32) -> Result<OrthogonalMapZp, LatticeError> {
    let base = &problem.lattice;
    if target < 1 || target > base.ring().precision() {
        return Err(LatticeError::PrecisionTooSmall(target.max(1)));
    }
    let work = target + guard_digits(base.prime(), base.dim());
    let lattice = base.at_precision(work);
    let ring = lattice.ring();
    let lift_vec = |v: &VectorPN| -> VectorPN { v.iter().map(|e| e % ring.modulus()).collect() };
    let sources: Vec<VectorPN> = problem.sources.iter().map(&lift_vec).collect();
    let targets: Vec<VectorPN> = problem.targets.iter().map(&lift_vec).collect();

    // Base step: classical Witt over the residue field.
    let (fp, gram_fp) = lattice.gram_fp();
    let red = |v: &VectorPN| -> Vec<u64> { v.iter().map(|e| ring.to_residue_field(e)).collect() };
    let src_fp: Vec<Vec<u64>> = sources.iter().map(&red).collect();
    let tgt_fp: Vec<Vec<u64>> = targets.iter().map(&red).collect();
    let word = witt_extend_generic(&fp, &gram_fp, &src_fp, &tgt_fp)?;
    let mut z1 = mat_identity(&fp, lattice.dim());
    for c in &word {
        let r = crate::quad::reflection_matrix(&fp, &gram_fp, c)
            .ok_or_else(|| LatticeError::ResidueWitt("isotropic reflection vector".into()))?;
        z1 = mat_mul(&fp, &z1, &r);
    }
    let z1_lifted = z1.map(|e| BigUint::from(*e));
    let mut current = lift_to_orthogonal(&lattice, &z1_lifted, 1, work)?;

    // Refinement: after the step at level s the transporter property holds
    // mod p^{s+1}.
    for s in 1..target {
        let step = refine_transporter(&lattice, &current, &sources, &targets, s)?;
        let composed = mat_mul(ring, &step, current.matrix());
        let next = lift_to_orthogonal(&lattice, &composed, s + 1, work)?;
        // Monotone stabilization: X_{s+1} = X_s mod p^s.
        assert!(
            matrices_congruent(ring, next.matrix(), current.matrix(), s),
            "stabilization X_t = X_s mod p^s violated at s = {s}"
        );
        current = next;
    }

    // Reduce to the requested precision and certify there.
    let out_ring = base.ring().with_precision(target);
    let out_lattice = base.at_precision(target);
    let matrix = current.matrix().map(|e| e % out_ring.modulus());
    let map = OrthogonalMapZp::new(&out_lattice, matrix, target)?;
    for (a, b) in problem.sources.iter().zip(problem.targets.iter()) {
        let a_t: VectorPN = a.iter().map(|e| e % out_ring.modulus()).collect();
        let b_t: VectorPN = b.iter().map(|e| e % out_ring.modulus()).collect();
        if !vectors_congruent(&out_ring, &map.apply(&out_ring, &a_t), &b_t, target) {
            return Err(LatticeError::CongruenceFailure(target));
        }
    }
    Ok(map)
}

/// As `witt_lift` but lands in SO. Needs 2m+1 <= n. When the plain lift
/// has determinant -1 it is composed with a reflection tau_c, where c is
/// drawn from the unit-pivot kernel of the source system (so c is
/// orthogonal to every source at full precision) with f(c) a unit.
pub fn witt_lift_special(
    problem: &TransporterProblem,
    target: u32,
) -> Result<OrthogonalMapZp, LatticeError> {
    let m = problem.count();
    let n = problem.lattice.dim();
    if 2 * m + 1 > n {
        return Err(LatticeError::SpecialNeedsRoom { m, n });
    }
    let plain = witt_lift(problem, target)?;
    let out_lattice = problem.lattice.at_precision(target);
    if plain.det_sign(&out_lattice)? == 1 {
        return Ok(plain);
    }
    let ring = out_lattice.ring();
    let sources: Vec<VectorPN> = problem
        .sources
        .iter()
        .map(|v| v.iter().map(|e| e % ring.modulus()).collect())
        .collect();
    let tau = source_fixing_reflection(&out_lattice, &sources)?;
    let composed = mat_mul(ring, plain.matrix(), &tau);
    let map = OrthogonalMapZp::new(&out_lattice, composed, target)?;
    for (a, b) in sources.iter().zip(problem.targets.iter()) {
        let b_t: VectorPN = b.iter().map(|e| e % ring.modulus()).collect();
        if !vectors_congruent(ring, &map.apply(ring, a), &b_t, target) {
            return Err(LatticeError::CongruenceFailure(target));
        }
    }
    debug_assert_eq!(map.det_sign(&out_lattice).unwrap(), 1);
    Ok(map)
}

/// Reflection tau_c with (c|a_i) = 0 mod p^N for every source and f(c) a
/// p-unit. Exists whenever 2m+1 <= n (the mod-p complement of the sources
/// cannot be totally isotropic).
fn source_fixing_reflection(
    lattice: &UnimodularLatticeZp,
    sources: &[VectorPN],
) -> Result<MatrixPN, LatticeError> {
    let ring = lattice.ring();
    let n = lattice.dim();
    let kernel: Vec<VectorPN> = if sources.is_empty() {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { ring.one() } else { ring.zero() })
                    .collect()
            })
            .collect()
    } else {
        let rows: Vec<VectorPN> = sources
            .iter()
            .map(|a| mat_vec(ring, lattice.gram(), a))
            .collect();
        let m = Matrix::from_rows(rows).map_err(LatticeError::Arith)?;
        kernel_basis(ring, &m)?
    };
    // Anisotropic combination located on the residue field, then rebuilt
    // from the mod-p^N kernel basis.
    let fp = ring.residue_field();
    let kernel_fp: Vec<Vec<u64>> = kernel
        .iter()
        .map(|v| v.iter().map(|e| ring.to_residue_field(e)).collect())
        .collect();
    let gram_fp = lattice.gram().map(|e| ring.to_residue_field(e));
    let picked = crate::quad::anisotropic_in_span(&fp, &gram_fp, &kernel_fp).ok_or(
        LatticeError::ResidueWitt("no unit-norm vector in the source complement".into()),
    )?;
    let c = combine_kernel(ring, &kernel, &kernel_fp, &picked);
    debug_assert!(ring.is_unit(&lattice.evaluate(&c)));
    reflection_matrix_pn(lattice, &c)
}

fn combine_kernel(
    ring: &ResidueRing,
    kernel: &[VectorPN],
    kernel_fp: &[Vec<u64>],
    target_fp: &[u64],
) -> VectorPN {
    // target_fp is either kernel_fp[i] or kernel_fp[i] + kernel_fp[j];
    // translate to the same combination of the p^N kernel vectors.
    for (i, kf) in kernel_fp.iter().enumerate() {
        if kf == target_fp {
            return kernel[i].clone();
        }
    }
    for i in 0..kernel_fp.len() {
        for j in (i + 1)..kernel_fp.len() {
            let fp_sum: Vec<u64> = kernel_fp[i]
                .iter()
                .zip(kernel_fp[j].iter())
                .map(|(a, b)| (a + b) % ring.prime())
                .collect();
            if fp_sum == *target_fp {
                return kernel[i]
                    .iter()
                    .zip(kernel[j].iter())
                    .map(|(a, b)| ring.add(a, b))
                    .collect();
            }
        }
    }
    unreachable!("anisotropic combination must come from the kernel basis");
}

/// Matrix of tau_c over Z/p^N; exactly orthogonal as a residue identity.
pub fn reflection_matrix_pn(
    lattice: &UnimodularLatticeZp,
    c: &VectorPN,
) -> Result<MatrixPN, LatticeError> {
    let ring = lattice.ring();
    let fc = lattice.evaluate(c);
    let inv = ring.inverse(&fc).ok_or(LatticeError::ResidueWitt(
        "reflection vector norm not a unit".into(),
    ))?;
    let coef = ring.mul(&ring.from_i64(2), &inv);
    let gc = mat_vec(ring, lattice.gram(), c);
    let n = lattice.dim();
    Ok(Matrix::from_fn(n, n, |i, j| {
        let delta = if i == j { ring.one() } else { ring.zero() };
        ring.sub(&delta, &ring.mul(&coef, &ring.mul(&c[i], &gc[j])))
    }))
}

/// Level of a nonzero residue vector: the largest l with a in p^l L,
/// read off the standard-basis coordinates.
pub fn level(lattice: &UnimodularLatticeZp, a: &VectorPN) -> Result<u32, LatticeError> {
    let ring = lattice.ring();
    a.iter()
        .filter_map(|e| residue_valuation(ring, e))
        .min()
        .ok_or(LatticeError::LevelExceedsPrecision)
}

/// Verdict of the orbit test.
#[derive(Debug, Clone)]
pub enum OrbitOutcome {
    /// A transporter certified at full precision N.
    Transporter(OrthogonalMapZp),
    /// Levels differ: no transporter exists at any precision.
    LevelMismatch { source: u32, target: u32 },
    /// Levels agree but the primitive parts take different f-values mod
    /// p^{N - level}, which rules out a transporter mod p^N.
    PrimitiveValueMismatch { level: u32 },
}

impl OrbitOutcome {
    pub fn transporter(&self) -> Option<&OrthogonalMapZp> {
        match self {
            OrbitOutcome::Transporter(x) => Some(x),
            _ => None,
        }
    }
}

/// Orbit criterion: a transporter X with X a = b mod p^N exists iff the
/// levels agree and the primitive parts a0 = a/p^l, b0 = b/p^l satisfy
/// f(a0) = f(b0) mod p^{N-l} (automatic when f(a) = f(b) holds exactly).
/// On success the returned map satisfies X a = b mod p^N: transporting the
/// primitive parts mod p^{N-l} is enough, since
/// X a - b = p^l (X a0 - b0) = 0 mod p^N.
pub fn orbit_test(
    lattice: &UnimodularLatticeZp,
    a: &VectorPN,
    b: &VectorPN,
    target: u32,
) -> Result<OrbitOutcome, LatticeError> {
    let ring = lattice.ring();
    if target > ring.precision() {
        return Err(LatticeError::PrecisionTooSmall(target));
    }
    let fa = lattice.evaluate(a);
    let fb = lattice.evaluate(b);
    if !ring.congruent_at(&fa, &fb, target) {
        return Err(LatticeError::ValueMismatch);
    }
    let lat_n = lattice.at_precision(target);
    let ring_n = lat_n.ring();
    let a_n: VectorPN = a.iter().map(|e| e % ring_n.modulus()).collect();
    let b_n: VectorPN = b.iter().map(|e| e % ring_n.modulus()).collect();
    let la = level(&lat_n, &a_n)?;
    let lb = level(&lat_n, &b_n)?;
    if la != lb {
        return Ok(OrbitOutcome::LevelMismatch {
            source: la,
            target: lb,
        });
    }
    let reduced = target - la;
    let lat_r = lattice.at_precision(reduced);
    let ring_r = lat_r.ring();
    let a0: VectorPN = a_n
        .iter()
        .map(|e| ring_n.divide_by_p_pow(e, la) % ring_r.modulus())
        .collect();
    let b0: VectorPN = b_n
        .iter()
        .map(|e| ring_n.divide_by_p_pow(e, la) % ring_r.modulus())
        .collect();
    if !ring_r.congruent_at(&lat_r.evaluate(&a0), &lat_r.evaluate(&b0), reduced) {
        return Ok(OrbitOutcome::PrimitiveValueMismatch { level: la });
    }
    let problem = TransporterProblem::new(lat_r, vec![a0], vec![b0])?;
    let at_reduced = witt_lift(&problem, reduced)?;
    let lifted = lift_to_orthogonal(&lat_n, at_reduced.matrix(), reduced, target)?;
    let image = lifted.apply(ring_n, &a_n);
    if !vectors_congruent(ring_n, &image, &b_n, target) {
        return Err(LatticeError::CongruenceFailure(target));
    }
    Ok(OrbitOutcome::Transporter(lifted))
}

#[cfg(test)]
mod tests;
