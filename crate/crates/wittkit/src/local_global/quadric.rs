//! Bad places of a standard-shape form, integral local points on the
//! complement quadric { x : x _|_ a, x _|_ s, f(x) = f(b) }, noncompactness
//! of the local solution sets of q = a, and the strong-approximation
//! criterion for quadrics in >= 3 variables.

use super::hilbert::{is_local_square, PlaceQ};
use super::isotropy::{is_isotropic_local, represents_local};
use super::LocalError;
use crate::arith::{
    factorize, kernel_basis, mat_vec, padic_valuation, solve_linear, sqrt_mod_p, Matrix, MatrixQ,
    PrimeField, Rat, RatField, ResidueRing, Ring, VectorPN,
};
use crate::quad::{congruent_diagonalize, QuadraticForm};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeSet;

/// V0 for a standard-shape form: 2 together with every prime dividing the
/// numerator or denominator of a diagonal coefficient, minus the primes
/// already in S.
pub fn bad_places(
    form: &QuadraticForm,
    exclude: &[u64],
    factor_bound: u64,
) -> Result<BTreeSet<u64>, LocalError> {
    let alphas = form.standard_coeffs().ok_or(LocalError::NotStandardShape)?;
    let mut set = BTreeSet::new();
    set.insert(2u64);
    for alpha in alphas {
        let f = factorize(&(alpha.numer() * alpha.denom()), factor_bound)?;
        for (p, _) in &f.factors {
            let p = p
                .to_u64()
                .ok_or_else(|| LocalError::HypothesisFailed("prime exceeds u64".into()))?;
            set.insert(p);
        }
    }
    for p in exclude {
        set.remove(p);
    }
    Ok(set)
}

fn check_good_place(form: &QuadraticForm, ring: &ResidueRing) -> Result<(), LocalError> {
    let p = ring.prime();
    let alphas = form.standard_coeffs().ok_or(LocalError::NotStandardShape)?;
    for alpha in alphas {
        if padic_valuation(alpha, p).map_err(LocalError::Arith)? != 0 {
            return Err(LocalError::BadPlace(p));
        }
    }
    Ok(())
}

/// An integral point of the quadric: t with (t|a) = 0, (t|s) = 0 and
/// f(t) = f(b) = alpha_{n-1}, all mod p^N, for a good odd prime p.
///
/// Construction: drop the a-coordinate of s to get u, extract the
/// primitive part u0 = u / p^d, span M = <a, u0> when f(u0) is a unit or
/// M = <a, u0, u1> with a mod-p hyperbolic partner u1 otherwise; represent
/// the unit alpha_{n-1} on the unimodular complement of M by a residue
/// search followed by one-variable scaling refinement.
pub fn quadric_zp_point(
    form: &QuadraticForm,
    ring: &ResidueRing,
    s: &VectorPN,
) -> Result<VectorPN, LocalError> {
    check_good_place(form, ring)?;
    let n = form.dim();
    if s.len() != n {
        return Err(LocalError::HypothesisFailed("vector size != dim".into()));
    }
    if n < 5 {
        return Err(LocalError::DimensionTooSmall(5));
    }
    let s: VectorPN = s.iter().map(|e| e % ring.modulus()).collect();
    if s.iter().all(|e| ring.is_zero(e)) {
        return Err(LocalError::ZeroInput);
    }
    let gram = reduce_gram(form.gram(), ring)?;
    let bilinear = |x: &VectorPN, y: &VectorPN| -> BigUint {
        let gy = mat_vec(ring, &gram, y);
        let mut acc = ring.zero();
        for (a, b) in x.iter().zip(gy.iter()) {
            acc = ring.add(&acc, &ring.mul(a, b));
        }
        acc
    };
    let target_value = ring
        .from_rat(&form.gram().get(n - 2, n - 2).clone())
        .map_err(LocalError::Arith)?; // f(b) = alpha_{n-1}, a p-unit

    // u = s minus its a-component.
    let mut u = s.clone();
    u[n - 1] = ring.zero();

    // M = the unimodular sublattice containing a and the primitive part
    // of u; when u = 0 the constraint (t|s) degenerates to (t|a) = 0 and
    // t = b works, but run the generic path with M = <a> for uniformity.
    let mut m_basis: Vec<VectorPN> = vec![unit_vector(ring, n, n - 1)];
    if !u.iter().all(|e| ring.is_zero(e)) {
        let d = u
            .iter()
            .filter_map(|e| crate::arith::residue_valuation(ring, e))
            .min()
            .expect("u is nonzero");
        let u0: VectorPN = u.iter().map(|e| ring.divide_by_p_pow(e, d)).collect();
        if ring.is_unit(&bilinear(&u0, &u0)) {
            m_basis.push(u0);
        } else {
            // Hyperbolic partner of u0 inside <e1..e_{n-1}> mod p.
            let fp = ring.residue_field();
            let u0_fp: Vec<u64> = u0.iter().map(|e| ring.to_residue_field(e)).collect();
            let gram_fp = gram.map(|e| ring.to_residue_field(e));
            let u1_fp = hyperbolic_partner(&fp, &gram_fp, &u0_fp, n - 1)?;
            let u1: VectorPN = u1_fp.iter().map(|&e| BigUint::from(e)).collect();
            m_basis.push(u0);
            m_basis.push(u1);
        }
    }

    // Unimodular complement of M: unit-pivot kernel of (x | m_j) = 0.
    let rows: Vec<VectorPN> = m_basis.iter().map(|v| mat_vec(ring, &gram, v)).collect();
    let sys = Matrix::from_rows(rows).map_err(LocalError::Arith)?;
    let kernel = kernel_basis(ring, &sys).map_err(LocalError::Arith)?;
    debug_assert!(kernel.len() >= 2);

    // Represent the unit target value on the complement: residue search on
    // the diagonalized reduction, then scaling refinement.
    let fp = ring.residue_field();
    let gram_fp = gram.map(|e| ring.to_residue_field(e));
    let kernel_fp: Vec<Vec<u64>> = kernel
        .iter()
        .map(|v| v.iter().map(|e| ring.to_residue_field(e)).collect())
        .collect();
    let h_fp = Matrix::from_fn(kernel.len(), kernel.len(), |i, j| {
        bilinear_fp(&fp, &gram_fp, &kernel_fp[i], &kernel_fp[j])
    });
    let (change, diag) = congruent_diagonalize(&fp, &h_fp).map_err(|e| LocalError::Quad(e.to_string()))?;
    if diag.iter().take(2).any(|d| *d == 0) {
        return Err(LocalError::HypothesisFailed(
            "complement reduction unexpectedly degenerate".into(),
        ));
    }
    let target_fp = ring.to_residue_field(&target_value);
    let (x1, x2) = represent_on_binary(&fp, diag[0], diag[1], target_fp)?;
    // Coordinates in the kernel basis: change * (x1, x2, 0, ...).
    let coords_fp: Vec<u64> = (0..kernel.len())
        .map(|i| {
            let a = fp.mul(change.get(i, 0), &x1);
            let b = fp.mul(change.get(i, 1), &x2);
            fp.add(&a, &b)
        })
        .collect();
    let mut t: VectorPN = vec![ring.zero(); n];
    for (c, k) in coords_fp.iter().zip(kernel.iter()) {
        let c = BigUint::from(*c);
        for (ti, ki) in t.iter_mut().zip(k.iter()) {
            *ti = ring.add(ti, &ring.mul(&c, ki));
        }
    }
    debug_assert!(ring.is_unit(&bilinear(&t, &t)));

    // One-variable refinement: scale t by 1 + p^l theta to push
    // f(t) = target mod p^{l+1} one level at a time.
    let precision = ring.precision();
    for l in 1..precision {
        let ft = bilinear(&t, &t);
        let defect = ring.sub(&target_value, &ft);
        if ring.is_zero(&defect) {
            break;
        }
        if !ring.congruent_at(&defect, &ring.zero(), l) {
            return Err(LocalError::HypothesisFailed(format!(
                "refinement lost a digit at level {l}"
            )));
        }
        let quotient = ring.divide_by_p_pow(&defect, l);
        let two_ft_inv = ring
            .inverse(&ring.mul(&ring.from_i64(2), &ft))
            .expect("f(t) is a unit");
        let theta = ring.mul(&quotient, &two_ft_inv);
        let p_l = BigUint::from(ring.prime()).pow(l);
        let factor = ring.add(&ring.one(), &ring.mul(&p_l, &theta));
        for ti in t.iter_mut() {
            *ti = ring.mul(&factor, ti);
        }
    }

    // Re-verify the full contract.
    let a_vec = unit_vector(ring, n, n - 1);
    if !ring.is_zero(&bilinear(&t, &a_vec))
        || !ring.is_zero(&bilinear(&t, &s))
        || !ring.is_zero(&ring.sub(&bilinear(&t, &t), &target_value))
    {
        return Err(LocalError::HypothesisFailed(
            "quadric point postcondition failed".into(),
        ));
    }
    Ok(t)
}

fn unit_vector(ring: &ResidueRing, n: usize, i: usize) -> VectorPN {
    (0..n)
        .map(|j| if j == i { ring.one() } else { ring.zero() })
        .collect()
}

fn reduce_gram(gram: &MatrixQ, ring: &ResidueRing) -> Result<Matrix<BigUint>, LocalError> {
    let n = gram.rows();
    let mut out = Matrix::from_fn(n, n, |_, _| ring.zero());
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, ring.from_rat(gram.get(i, j)).map_err(LocalError::Arith)?);
        }
    }
    Ok(out)
}

fn bilinear_fp(fp: &PrimeField, gram: &Matrix<u64>, x: &[u64], y: &[u64]) -> u64 {
    let gy = mat_vec(fp, gram, y);
    let mut acc = 0u64;
    for (a, b) in x.iter().zip(gy.iter()) {
        acc = fp.add(&acc, &fp.mul(a, b));
    }
    acc
}

/// w with f(w) = 0 and (u0|w) = 1 inside the span of the first `limit`
/// coordinates, given isotropic nonzero u0 in that span.
fn hyperbolic_partner(
    fp: &PrimeField,
    gram: &Matrix<u64>,
    u0: &[u64],
    limit: usize,
) -> Result<Vec<u64>, LocalError> {
    let n = u0.len();
    // Solve (u0 | w) = 1 with w supported on the first `limit` coordinates.
    let gu = mat_vec(fp, gram, u0);
    let row: Vec<u64> = gu[..limit].to_vec();
    let sys = Matrix::from_rows(vec![row]).map_err(LocalError::Arith)?;
    let sol = solve_linear(fp, &sys, &[1u64])
        .map_err(LocalError::Arith)?
        .ok_or_else(|| LocalError::HypothesisFailed("complement pairing degenerate".into()))?;
    let mut w = vec![0u64; n];
    w[..limit].copy_from_slice(&sol.particular);
    // Remove the self-pairing: w' = w - (f(w)/2) u0 is isotropic and still
    // pairs to 1.
    let fw = bilinear_fp(fp, gram, &w, &w);
    let half = fp.inverse(&2).expect("p odd");
    let coef = fp.mul(&fw, &half);
    let w: Vec<u64> = w
        .iter()
        .zip(u0.iter())
        .map(|(wi, ui)| fp.sub(wi, &fp.mul(&coef, ui)))
        .collect();
    debug_assert_eq!(bilinear_fp(fp, gram, &w, &w), 0);
    debug_assert_eq!(bilinear_fp(fp, gram, u0, &w), 1);
    Ok(w)
}

/// Solve d1 x^2 + d2 y^2 = target over F_p (d1, d2, target units) by a
/// deterministic scan: some x makes (target - d1 x^2)/d2 a square.
fn represent_on_binary(
    fp: &PrimeField,
    d1: u64,
    d2: u64,
    target: u64,
) -> Result<(u64, u64), LocalError> {
    let d2_inv = fp.inverse(&d2).expect("unit");
    for x in 0..fp.p {
        let r = fp.sub(&target, &fp.mul(&d1, &fp.mul(&x, &x)));
        let r = fp.mul(&r, &d2_inv);
        if let Some(y) = sqrt_mod_p(fp, r) {
            return Ok((x, y));
        }
    }
    Err(LocalError::HypothesisFailed(
        "binary unit form failed to represent a unit (impossible for p odd)".into(),
    ))
}

/// The places v in S where the solution set of q = a over the completion
/// is noncompact: exactly those where q is isotropic and q = a is locally
/// solvable.
pub fn quadric_noncompact_places(
    form: &QuadraticForm,
    value: &Rat,
    places: &[PlaceQ],
) -> Result<Vec<PlaceQ>, LocalError> {
    if value.is_zero() {
        return Err(LocalError::ZeroInput);
    }
    let mut out = Vec::new();
    for &v in places {
        if is_isotropic_local(form, v)? && represents_local(form, value, v)? {
            out.push(v);
        }
    }
    Ok(out)
}

/// Why a strong-approximation verdict holds or fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SapReason {
    /// m >= 4 with noncompact Q_S: always holds.
    DimensionAtLeastFour,
    /// m = 3 and the restriction to the witness complement is isotropic
    /// over Q.
    ComplementIsotropicOverQ,
    /// m = 3 and some v in S has the complement form anisotropic over the
    /// completion (with q isotropic there when v is real).
    WitnessPlace(PlaceQ),
    /// m = 3 and no place of S satisfies the criterion.
    NoAdmissiblePlace,
}

impl std::fmt::Display for SapReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SapReason::DimensionAtLeastFour => write!(f, "m>=4-noncompact"),
            SapReason::ComplementIsotropicOverQ => write!(f, "g-K-isotropic"),
            SapReason::WitnessPlace(v) => write!(f, "witness-place {v}"),
            SapReason::NoAdmissiblePlace => write!(
                f,
                "obstruction: complement form anisotropic over Q and at no v in S \
                 anisotropic with the real-isotropy side condition"
            ),
        }
    }
}

/// Verdict of the strong-approximation decision.
#[derive(Debug, Clone, PartialEq)]
pub struct SapVerdict {
    pub holds: bool,
    pub reason: SapReason,
}

/// Decide strong approximation with respect to S for the quadric
/// q(x) = value, given a rational witness point.
///
/// Hypotheses (violations are errors, never a silent false): value != 0,
/// dim >= 3, q(witness) = value, and the product of the local solution
/// sets over S is noncompact.
///
/// For dim >= 4 the verdict is true. For dim = 3 let g be the restriction
/// of q to the orthogonal complement of the witness: the verdict is true
/// iff g is isotropic over Q, or g is anisotropic over Q and some v in S
/// has g anisotropic over the completion, q being additionally isotropic
/// there when v is real.
pub fn strong_approx_quadric(
    form: &QuadraticForm,
    value: &Rat,
    places: &[PlaceQ],
    witness: &[Rat],
) -> Result<SapVerdict, LocalError> {
    if value.is_zero() {
        return Err(LocalError::ZeroInput);
    }
    let m = form.dim();
    if m < 3 {
        return Err(LocalError::DimensionTooSmall(3));
    }
    let at_witness = form.evaluate(witness)?;
    if &at_witness != value {
        return Err(LocalError::HypothesisFailed(format!(
            "witness evaluates to {at_witness}, not to the quadric value"
        )));
    }
    if quadric_noncompact_places(form, value, places)?.is_empty() {
        return Err(LocalError::HypothesisFailed(
            "Q_S noncompact fails: every local solution set over S is compact or empty".into(),
        ));
    }
    if m >= 4 {
        return Ok(SapVerdict {
            holds: true,
            reason: SapReason::DimensionAtLeastFour,
        });
    }

    // m = 3: restrict to the orthogonal complement of the witness.
    let q = RatField;
    let row = Matrix::from_rows(vec![mat_vec(&q, form.gram(), witness)])
        .map_err(LocalError::Arith)?;
    let compl = kernel_basis(&q, &row).map_err(LocalError::Arith)?;
    debug_assert_eq!(compl.len(), 2);
    let g_gram = Matrix::from_fn(2, 2, |i, j| {
        form.bilinear(&compl[i], &compl[j]).expect("sizes agree")
    });
    // Binary form: isotropic over a field iff -det is a square there.
    let det = &(g_gram.get(0, 0) * g_gram.get(1, 1)) - &(g_gram.get(0, 1) * g_gram.get(1, 0));
    if det.is_zero() {
        return Err(LocalError::HypothesisFailed(
            "witness complement is degenerate".into(),
        ));
    }
    let neg_det = -det;
    if crate::arith::is_square_rat(&neg_det) {
        return Ok(SapVerdict {
            holds: true,
            reason: SapReason::ComplementIsotropicOverQ,
        });
    }
    for &v in places {
        let g_anisotropic = !is_local_square(&neg_det, v)?;
        if !g_anisotropic {
            continue;
        }
        if v == PlaceQ::Real && !is_isotropic_local(form, v)? {
            continue;
        }
        return Ok(SapVerdict {
            holds: true,
            reason: SapReason::WitnessPlace(v),
        });
    }
    Ok(SapVerdict {
        holds: false,
        reason: SapReason::NoAdmissiblePlace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_i64;

    fn diag_form(xs: &[i64]) -> QuadraticForm {
        QuadraticForm::from_gram(Matrix::from_fn(xs.len(), xs.len(), |i, j| {
            if i == j {
                rat_i64(xs[i])
            } else {
                rat_i64(0)
            }
        }))
        .unwrap()
    }

    fn std_form(alphas: &[i64]) -> QuadraticForm {
        let a: Vec<Rat> = alphas.iter().map(|&x| rat_i64(x)).collect();
        QuadraticForm::standard(&a).unwrap()
    }

    #[test]
    fn bad_places_examples() {
        let f = std_form(&[1, 1, 1]);
        assert_eq!(
            bad_places(&f, &[], 1000).unwrap(),
            BTreeSet::from([2u64])
        );
        let f = std_form(&[6, 1, 1]);
        assert_eq!(
            bad_places(&f, &[], 1000).unwrap(),
            BTreeSet::from([2u64, 3])
        );
        let alphas = vec![
            crate::arith::rat_from_str("1/5").unwrap(),
            rat_i64(1),
            rat_i64(1),
        ];
        let f = QuadraticForm::standard(&alphas).unwrap();
        assert_eq!(
            bad_places(&f, &[5], 1000).unwrap(),
            BTreeSet::from([2u64])
        );
    }

    #[test]
    fn quadric_points() {
        let f = std_form(&[1, 1, 1]);
        let ring = ResidueRing::new(5, 8).unwrap();
        // s = e3
        let s = unit_vector(&ring, 5, 2);
        let t = quadric_zp_point(&f, &ring, &s).unwrap();
        let gram = reduce_gram(f.gram(), &ring).unwrap();
        let bil = |x: &VectorPN, y: &VectorPN| -> BigUint {
            let gy = mat_vec(&ring, &gram, y);
            let mut acc = ring.zero();
            for (a, b) in x.iter().zip(gy.iter()) {
                acc = ring.add(&acc, &ring.mul(a, b));
            }
            acc
        };
        assert!(ring.is_zero(&bil(&t, &unit_vector(&ring, 5, 4))));
        assert!(ring.is_zero(&bil(&t, &s)));
        assert_eq!(bil(&t, &t), ring.one());

        // s = e3 + 5 e4: the primitive-part machinery engages.
        let mut s2 = unit_vector(&ring, 5, 2);
        s2[3] = ring.from_i64(5);
        let t = quadric_zp_point(&f, &ring, &s2).unwrap();
        assert!(ring.is_zero(&bil(&t, &s2)));
        assert!(ring.is_zero(&bil(&t, &unit_vector(&ring, 5, 4))));
        assert_eq!(bil(&t, &t), ring.one());

        // s = 5 e3 (level 1): same contract.
        let mut s3 = vec![ring.zero(); 5];
        s3[2] = ring.from_i64(5);
        let t = quadric_zp_point(&f, &ring, &s3).unwrap();
        assert!(ring.is_zero(&bil(&t, &s3)));
        assert_eq!(bil(&t, &t), ring.one());

        // s with isotropic primitive part: u0 = e1 forces the hyperbolic
        // partner branch.
        let s4 = unit_vector(&ring, 5, 0);
        let t = quadric_zp_point(&f, &ring, &s4).unwrap();
        assert!(ring.is_zero(&bil(&t, &s4)));
        assert_eq!(bil(&t, &t), ring.one());

        // Bad place rejected: alpha = 5 at p = 5.
        let f5 = std_form(&[5, 1, 1]);
        assert!(matches!(
            quadric_zp_point(&f5, &ring, &s),
            Err(LocalError::BadPlace(5))
        ));
        // Zero s rejected.
        let zero = vec![ring.zero(); 5];
        assert!(matches!(
            quadric_zp_point(&f, &ring, &zero),
            Err(LocalError::ZeroInput)
        ));
    }

    #[test]
    fn noncompact_places() {
        // Indefinite ternary with a real point: noncompact at the real place.
        let f = diag_form(&[1, 1, -2]);
        assert_eq!(
            quadric_noncompact_places(&f, &rat_i64(1), &[PlaceQ::Real]).unwrap(),
            vec![PlaceQ::Real]
        );
        // The sphere is compact.
        let sphere = diag_form(&[1, 1, 1]);
        assert!(
            quadric_noncompact_places(&sphere, &rat_i64(1), &[PlaceQ::Real])
                .unwrap()
                .is_empty()
        );
        // A form with a hyperbolic plane is isotropic everywhere.
        let h = std_form(&[1]);
        assert_eq!(
            quadric_noncompact_places(&h, &rat_i64(7), &[PlaceQ::Finite(7)]).unwrap(),
            vec![PlaceQ::Finite(7)]
        );
    }

    #[test]
    fn strong_approximation_counterexample() {
        // x1^2 + x2^2 - 2 x3^2 = 1 with S = {real} and witness (1,0,0):
        // the complement form diag(1,-2) is anisotropic over Q but
        // isotropic over R, so no admissible place exists.
        let f = diag_form(&[1, 1, -2]);
        let witness = vec![rat_i64(1), rat_i64(0), rat_i64(0)];
        let verdict =
            strong_approx_quadric(&f, &rat_i64(1), &[PlaceQ::Real], &witness).unwrap();
        assert!(!verdict.holds);
        assert_eq!(verdict.reason, SapReason::NoAdmissiblePlace);

        // Adding a finite place where the complement form is anisotropic
        // flips the verdict. g = diag(1,-2) restricted: -det = 2. 2 is a
        // square mod 7 (3^2 = 2), so p = 7 does NOT help; at p = 5, 2 is a
        // non-residue, so v = 5 is a witness place.
        let verdict = strong_approx_quadric(
            &f,
            &rat_i64(1),
            &[PlaceQ::Real, PlaceQ::Finite(7)],
            &witness,
        )
        .unwrap();
        assert!(!verdict.holds);
        let verdict = strong_approx_quadric(
            &f,
            &rat_i64(1),
            &[PlaceQ::Real, PlaceQ::Finite(5)],
            &witness,
        )
        .unwrap();
        assert!(verdict.holds);
        assert_eq!(verdict.reason, SapReason::WitnessPlace(PlaceQ::Finite(5)));
    }

    #[test]
    fn strong_approximation_dim4_and_errors() {
        // m >= 4 with a noncompact place: holds.
        let f = diag_form(&[1, 1, 1, -2]);
        let witness = vec![rat_i64(1), rat_i64(0), rat_i64(0), rat_i64(0)];
        let verdict =
            strong_approx_quadric(&f, &rat_i64(1), &[PlaceQ::Real], &witness).unwrap();
        assert!(verdict.holds);
        assert_eq!(verdict.reason, SapReason::DimensionAtLeastFour);

        // Compact Q_S: hypothesis failure.
        let sphere = diag_form(&[1, 1, 1]);
        let w = vec![rat_i64(1), rat_i64(0), rat_i64(0)];
        assert!(matches!(
            strong_approx_quadric(&sphere, &rat_i64(1), &[PlaceQ::Real], &w),
            Err(LocalError::HypothesisFailed(_))
        ));

        // Witness not on the quadric.
        let f = diag_form(&[1, 1, -2]);
        let bad = vec![rat_i64(1), rat_i64(1), rat_i64(0)];
        assert!(matches!(
            strong_approx_quadric(&f, &rat_i64(1), &[PlaceQ::Real], &bad),
            Err(LocalError::HypothesisFailed(_))
        ));
    }

    #[test]
    fn sap_invariance_under_square_scaling() {
        let f = diag_form(&[1, 1, -2]);
        let witness = vec![rat_i64(1), rat_i64(0), rat_i64(0)];
        let verdict =
            strong_approx_quadric(&f, &rat_i64(1), &[PlaceQ::Real], &witness).unwrap();
        // Scale q by 4 and the value accordingly; witness unchanged.
        let f4 = QuadraticForm::from_gram(f.gram().map(|x| x * rat_i64(4))).unwrap();
        let verdict4 =
            strong_approx_quadric(&f4, &rat_i64(4), &[PlaceQ::Real], &witness).unwrap();
        assert_eq!(verdict.holds, verdict4.holds);
    }
}
