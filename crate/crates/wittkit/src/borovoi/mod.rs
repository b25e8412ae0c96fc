//! Four-factor stabilizer decompositions of spinor-kernel elements.
//!
//! Fix a standard-shape form of dimension n >= 5 with anchors a = e_n and
//! b = e_{n-1}. Write G(a), G(b) for the stabilizers inside the spinor
//! kernel O'_n(f). The machinery here decomposes any g in O'_n(f) as
//! g = x y z u with x, z fixing a and y, u fixing b, through the fiber
//! map (x, y, z, u) -> (xyzu, xy(a), xy(b)) and its section over any
//! admissible base point.
//!
//! Each construction returns a certificate whose checks are re-run by an
//! independent verifier; nothing downstream trusts the construction path.

use crate::arith::{
    mat_inverse, mat_mul, mat_vec, Matrix, MatrixPN, Rat, ResidueRing, Ring, VectorPN,
};
use crate::lattice::{
    matrices_congruent, vectors_congruent, witt_lift_special, LatticeError, OrthogonalMapZp,
    TransporterProblem, UnimodularLatticeZp,
};
use crate::local_global::LocalError;
use crate::quad::{
    cartan_word_generic, hyperbolic_rotation, represent_value, witt_extend, witt_extend_special,
    OrthogonalMapQ, QuadError, QuadraticForm, RepresentIn, SpecialTarget,
};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BorovoiError {
    #[error("frame needs a standard-shape form of dimension >= 5")]
    FrameTooSmall,
    #[error("element is not in the spinor kernel: {witness}")]
    NotInSpinorKernel { witness: String },
    #[error("vector is not in X (f(s) != f(a))")]
    NotInX,
    #[error("triple violates a Z membership: {0}")]
    NotInZ(String),
    #[error("element does not stabilize both anchors")]
    NotStabilizer,
    #[error("certificate check failed: {0}")]
    CheckFailed(String),
    #[error("certificates lie over different fiber base points")]
    DifferentFibers,
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("local layer: {0}")]
    Local(String),
    #[error("lattice layer: {0}")]
    Lattice(String),
}

impl From<LocalError> for BorovoiError {
    fn from(e: LocalError) -> Self {
        BorovoiError::Local(e.to_string())
    }
}

impl From<LatticeError> for BorovoiError {
    fn from(e: LatticeError) -> Self {
        BorovoiError::Lattice(e.to_string())
    }
}

/// A standard-shape form of dimension >= 5 with its two anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardFrame {
    form: QuadraticForm,
}

impl StandardFrame {
    pub fn new(form: QuadraticForm) -> Result<Self, BorovoiError> {
        if !form.is_standard_shape() || form.dim() < 5 {
            return Err(BorovoiError::FrameTooSmall);
        }
        Ok(StandardFrame { form })
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// a = e_n.
    pub fn anchor_a(&self) -> Vec<Rat> {
        self.form.anchor_a()
    }

    /// b = e_{n-1}.
    pub fn anchor_b(&self) -> Vec<Rat> {
        self.form.anchor_b()
    }

    pub fn f_a(&self) -> Rat {
        self.form.gram().get(self.dim() - 1, self.dim() - 1).clone()
    }

    pub fn f_b(&self) -> Rat {
        self.form.gram().get(self.dim() - 2, self.dim() - 2).clone()
    }
}

/// Membership in X = { s : f(s) = f(a) }.
pub fn is_in_x(frame: &StandardFrame, s: &[Rat]) -> Result<bool, BorovoiError> {
    Ok(frame.form().evaluate(s)? == frame.f_a())
}

/// Membership in Y = { (g, s) : s in X, (s|g(b)) = 0 }.
pub fn is_in_y(frame: &StandardFrame, g: &OrthogonalMapQ, s: &[Rat]) -> Result<bool, BorovoiError> {
    let gb = g.apply(&frame.anchor_b());
    Ok(is_in_x(frame, s)? && frame.form().bilinear(s, &gb)?.is_zero())
}

/// Membership in Z = { (g, s, t) : (g,s) in Y, (t|a) = 0, f(t) = f(b),
/// (s|t) = 0 }.
pub fn is_in_z(
    frame: &StandardFrame,
    g: &OrthogonalMapQ,
    s: &[Rat],
    t: &[Rat],
) -> Result<bool, BorovoiError> {
    let form = frame.form();
    Ok(is_in_y(frame, g, s)?
        && form.bilinear(t, &frame.anchor_a())?.is_zero()
        && form.evaluate(t)? == frame.f_b()
        && form.bilinear(s, t)?.is_zero())
}

/// A point of Z lying over a spinor-kernel element g.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPoint {
    pub g: OrthogonalMapQ,
    pub s: Vec<Rat>,
    pub t: Vec<Rat>,
}

impl ZPoint {
    pub fn new(
        frame: &StandardFrame,
        g: OrthogonalMapQ,
        s: Vec<Rat>,
        t: Vec<Rat>,
    ) -> Result<Self, BorovoiError> {
        require_spinor_kernel(frame, &g)?;
        if !is_in_z(frame, &g, &s, &t)? {
            return Err(BorovoiError::NotInZ("Z membership".into()));
        }
        Ok(ZPoint { g, s, t })
    }
}

fn require_spinor_kernel(frame: &StandardFrame, g: &OrthogonalMapQ) -> Result<(), BorovoiError> {
    if g.det() != 1 {
        return Err(BorovoiError::NotInSpinorKernel {
            witness: "det = -1".into(),
        });
    }
    if !g.is_spinor_trivial(frame.form())? {
        // Reduce the witness to its squarefree class when the product is
        // small enough to factor; fall back to the raw value otherwise.
        let witness = match g.spinor_product(frame.form()) {
            Ok(q) => match crate::arith::square_class(&q, crate::arith::DEFAULT_FACTOR_BOUND) {
                Ok(cls) => format!("spinor norm class {cls}"),
                Err(_) => format!("spinor norm value {q}"),
            },
            Err(_) => "nontrivial spinor norm".into(),
        };
        return Err(BorovoiError::NotInSpinorKernel { witness });
    }
    Ok(())
}

/// A point of the fiber of psi over g: the triple (g, s, b).
///
/// When g(b) = +/- b the triple (g, a, b) already lies in the fiber.
/// Otherwise take u' the b-component of g(b), complete it to u = u' + u''
/// with u'' in <a,b>-perp and f(u) = f(b), transport (u, b) to (g(b), b)
/// by an isometry sigma, and use s = sigma(a).
pub fn psi_fiber_point(frame: &StandardFrame, g: &OrthogonalMapQ) -> Result<ZPoint, BorovoiError> {
    require_spinor_kernel(frame, g)?;
    let form = frame.form();
    let a = frame.anchor_a();
    let b = frame.anchor_b();
    let gb = g.apply(&b);
    let minus_b: Vec<Rat> = b.iter().map(|x| -x).collect();
    if gb == b || gb == minus_b {
        return ZPoint::new(frame, g.clone(), a, b);
    }
    let ratio = form.bilinear(&gb, &b)? / frame.f_b();
    let u_prime: Vec<Rat> = b.iter().map(|x| x * &ratio).collect();
    let missing = frame.f_b() - form.evaluate(&u_prime)?;
    let u_second = represent_value(form, &missing, RepresentIn::PerpAB)?;
    let u: Vec<Rat> = u_prime
        .iter()
        .zip(u_second.iter())
        .map(|(x, y)| x + y)
        .collect();
    let sigma = witt_extend(form, &[u, b.clone()], &[gb, b.clone()])?;
    let s = sigma.apply(&a);
    ZPoint::new(frame, g.clone(), s, b)
}

/// A point of the fiber of nu over s in X: a triple (g, s, t) whose middle
/// component is s.
///
/// g is any spinor-kernel element with g(a) = s. For s = +/- a the triple
/// (g, s, b) works; otherwise build w with (w|b) = 0, (w|a) = (s|a) and
/// f(w) = f(a), move (w, a) to (s, a) by an isometry sigma and take
/// t = sigma(b).
pub fn nu_fiber_point(frame: &StandardFrame, s: &[Rat]) -> Result<ZPoint, BorovoiError> {
    if !is_in_x(frame, s)? {
        return Err(BorovoiError::NotInX);
    }
    let form = frame.form();
    let a = frame.anchor_a();
    let b = frame.anchor_b();
    let g = witt_extend_special(form, std::slice::from_ref(&a), &[s.to_vec()], SpecialTarget::SpinorKernel)?;
    let minus_a: Vec<Rat> = a.iter().map(|x| -x).collect();
    if s == a.as_slice() || s == minus_a.as_slice() {
        return ZPoint::new(frame, g, s.to_vec(), b);
    }
    let ratio = form.bilinear(s, &a)? / frame.f_a();
    let w_prime: Vec<Rat> = a.iter().map(|x| x * &ratio).collect();
    let missing = frame.f_a() - form.evaluate(&w_prime)?;
    let w_second = represent_value(form, &missing, RepresentIn::PerpAB)?;
    let w: Vec<Rat> = w_prime
        .iter()
        .zip(w_second.iter())
        .map(|(x, y)| x + y)
        .collect();
    let sigma = witt_extend_special(
        form,
        &[w, a.clone()],
        &[s.to_vec(), a.clone()],
        SpecialTarget::Determinant,
    )?;
    let t = sigma.apply(&b);
    ZPoint::new(frame, g, s.to_vec(), t)
}

/// The four-factor certificate: g = x y z u with x(a) = a, y(b) = b,
/// z(a) = a, u(b) = b, xy(a) = s, xy(b) = t, every factor in the spinor
/// kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct BorovoiCertificate {
    pub g: OrthogonalMapQ,
    pub x: OrthogonalMapQ,
    pub y: OrthogonalMapQ,
    pub z: OrthogonalMapQ,
    pub u: OrthogonalMapQ,
    pub s: Vec<Rat>,
    pub t: Vec<Rat>,
}

impl BorovoiCertificate {
    pub fn factors(&self) -> [&OrthogonalMapQ; 4] {
        [&self.x, &self.y, &self.z, &self.u]
    }

    /// Least common multiple of all denominators appearing in the factors.
    pub fn denominator_lcm(&self) -> num_bigint::BigInt {
        use num_integer::Integer;
        let mut acc = num_bigint::BigInt::one();
        for f in self.factors() {
            for e in f.matrix().entries() {
                acc = acc.lcm(e.denom());
            }
        }
        acc
    }
}

/// Independent verifier: re-checks every membership, the product, the
/// transported anchors and the spinor-kernel conditions. Construction code
/// is not consulted.
pub fn verify_certificate(
    frame: &StandardFrame,
    cert: &BorovoiCertificate,
) -> Result<(), BorovoiError> {
    let form = frame.form();
    let a = frame.anchor_a();
    let b = frame.anchor_b();
    let fail = |what: &str| Err(BorovoiError::CheckFailed(what.into()));
    if cert.x.apply(&a) != a {
        return fail("x(a) = a");
    }
    if cert.y.apply(&b) != b {
        return fail("y(b) = b");
    }
    if cert.z.apply(&a) != a {
        return fail("z(a) = a");
    }
    if cert.u.apply(&b) != b {
        return fail("u(b) = b");
    }
    let xy = cert.x.compose(&cert.y);
    if xy.apply(&a) != cert.s {
        return fail("xy(a) = s");
    }
    if xy.apply(&b) != cert.t {
        return fail("xy(b) = t");
    }
    let product = xy.compose(&cert.z).compose(&cert.u);
    if product.matrix() != cert.g.matrix() {
        return fail("x y z u = g");
    }
    if !is_in_z(frame, &cert.g, &cert.s, &cert.t)? {
        return fail("(g, s, t) in Z");
    }
    for (name, factor) in [
        ("x", &cert.x),
        ("y", &cert.y),
        ("z", &cert.z),
        ("u", &cert.u),
        ("g", &cert.g),
    ] {
        if factor.det() != 1 {
            return Err(BorovoiError::CheckFailed(format!("det {name} = +1")));
        }
        if !factor.is_spinor_trivial(form)? {
            return Err(BorovoiError::CheckFailed(format!(
                "spinor norm of {name} trivial"
            )));
        }
    }
    Ok(())
}

/// A point of the fiber of phi over a Z-point, by the three-isometry
/// construction: rho moves (b, a) to (t, a), eta moves (a, b) to (s, t),
/// sigma moves (a, b) to (s, g(b)), all inside the spinor kernel; then
/// x = rho, y = rho^-1 eta, z = eta^-1 sigma, u = sigma^-1 g.
pub fn phi_fiber_point(
    frame: &StandardFrame,
    zeta: &ZPoint,
) -> Result<BorovoiCertificate, BorovoiError> {
    let form = frame.form();
    let a = frame.anchor_a();
    let b = frame.anchor_b();
    let gb = zeta.g.apply(&b);
    let rho = witt_extend_special(
        form,
        &[b.clone(), a.clone()],
        &[zeta.t.clone(), a.clone()],
        SpecialTarget::SpinorKernel,
    )?;
    let eta = witt_extend_special(
        form,
        &[a.clone(), b.clone()],
        &[zeta.s.clone(), zeta.t.clone()],
        SpecialTarget::SpinorKernel,
    )?;
    let sigma = witt_extend_special(
        form,
        &[a.clone(), b.clone()],
        &[zeta.s.clone(), gb],
        SpecialTarget::SpinorKernel,
    )?;
    let x = rho.clone();
    let y = rho.inverse().compose(&eta);
    let z = eta.inverse().compose(&sigma);
    let u = sigma.inverse().compose(&zeta.g);
    let cert = BorovoiCertificate {
        g: zeta.g.clone(),
        x,
        y,
        z,
        u,
        s: zeta.s.clone(),
        t: zeta.t.clone(),
    };
    verify_certificate(frame, &cert)?;
    Ok(cert)
}

fn is_stabilizer(frame: &StandardFrame, h: &OrthogonalMapQ) -> Result<bool, BorovoiError> {
    Ok(h.apply(&frame.anchor_a()) == frame.anchor_a()
        && h.apply(&frame.anchor_b()) == frame.anchor_b()
        && h.det() == 1
        && h.is_spinor_trivial(frame.form())?)
}

/// Act on a certificate by a stabilizer triple:
/// (x, y, z, u) -> (x h1^-1, h1 y h2^-1, h2 z h3^-1, h3 u).
pub fn h_action(
    frame: &StandardFrame,
    h: (&OrthogonalMapQ, &OrthogonalMapQ, &OrthogonalMapQ),
    cert: &BorovoiCertificate,
) -> Result<BorovoiCertificate, BorovoiError> {
    for hi in [h.0, h.1, h.2] {
        if !is_stabilizer(frame, hi)? {
            return Err(BorovoiError::NotStabilizer);
        }
    }
    let out = BorovoiCertificate {
        g: cert.g.clone(),
        x: cert.x.compose(&h.0.inverse()),
        y: h.0.compose(&cert.y).compose(&h.1.inverse()),
        z: h.1.compose(&cert.z).compose(&h.2.inverse()),
        u: h.2.compose(&cert.u),
        s: cert.s.clone(),
        t: cert.t.clone(),
    };
    verify_certificate(frame, &out)?;
    Ok(out)
}

/// The unique stabilizer triple carrying `from` to `to` (both over the
/// same Z-point): h1 = x2^-1 x1, h2 = (x2 y2)^-1 (x1 y1),
/// h3 = (x2 y2 z2)^-1 (x1 y1 z1).
pub fn transporting_triple(
    frame: &StandardFrame,
    from: &BorovoiCertificate,
    to: &BorovoiCertificate,
) -> Result<(OrthogonalMapQ, OrthogonalMapQ, OrthogonalMapQ), BorovoiError> {
    if from.g.matrix() != to.g.matrix() || from.s != to.s || from.t != to.t {
        return Err(BorovoiError::DifferentFibers);
    }
    let h1 = to.x.inverse().compose(&from.x);
    let xy_from = from.x.compose(&from.y);
    let xy_to = to.x.compose(&to.y);
    let h2 = xy_to.inverse().compose(&xy_from);
    let xyz_from = xy_from.compose(&from.z);
    let xyz_to = xy_to.compose(&to.z);
    let h3 = xyz_to.inverse().compose(&xyz_from);
    for h in [&h1, &h2, &h3] {
        if !is_stabilizer(frame, h)? {
            return Err(BorovoiError::NotStabilizer);
        }
    }
    Ok((h1, h2, h3))
}

/// End-to-end decomposition of a spinor-kernel element: psi-fiber point
/// with t = b, then the phi-fiber construction.
pub fn decompose(
    frame: &StandardFrame,
    g: &OrthogonalMapQ,
) -> Result<BorovoiCertificate, BorovoiError> {
    let zeta = psi_fiber_point(frame, g)?;
    phi_fiber_point(frame, &zeta)
}

/// Deterministic generator of spinor-kernel elements: a seeded word of
/// reflection pairs and hyperbolic rotations, closed off by one rotation
/// cancelling the accumulated spinor value.
pub fn random_spinor_kernel_element(
    frame: &StandardFrame,
    seed: u64,
    word_length: usize,
) -> OrthogonalMapQ {
    let form = frame.form();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = OrthogonalMapQ::identity(form);
    let rand_aniso = |rng: &mut ChaCha8Rng| -> Vec<Rat> {
        loop {
            let v: Vec<Rat> = (0..form.dim())
                .map(|_| crate::arith::rat_i64(rng.gen_range(-2..=2)))
                .collect();
            if !form.evaluate(&v).expect("size matches").is_zero() {
                return v;
            }
        }
    };
    for _ in 0..word_length {
        if rng.gen_range(0..10) < 3 {
            let lambda = crate::arith::rat_i64(loop {
                let v = rng.gen_range(-4i64..=4);
                if v != 0 {
                    break v;
                }
            });
            g = g.compose(&hyperbolic_rotation(form, &lambda).expect("standard, nonzero"));
        } else {
            let c = rand_aniso(&mut rng);
            let d = rand_aniso(&mut rng);
            g = g.compose(&crate::quad::reflection(form, &c).expect("anisotropic"));
            g = g.compose(&crate::quad::reflection(form, &d).expect("anisotropic"));
        }
    }
    let q = g.spinor_product(form).expect("word attached");
    if !crate::arith::is_square_rat(&q) {
        let correction = hyperbolic_rotation(form, &(Rat::one() / &q)).expect("nonzero");
        g = g.compose(&correction);
    }
    debug_assert!(g.is_spinor_trivial(form).unwrap());
    g
}

/// Deterministic generator of elements of the stabilizer G(a, b) inside
/// the spinor kernel: a spinor-kernel word on the sub-frame spanned by
/// e_1..e_{n-2}, embedded identically on the anchors.
pub fn random_stabilizer_element(
    frame: &StandardFrame,
    seed: u64,
    word_length: usize,
) -> OrthogonalMapQ {
    let n = frame.dim();
    let alphas = frame.form().standard_coeffs().expect("standard frame");
    let sub_alphas: Vec<Rat> = alphas[..n - 4].to_vec();
    let sub_form = QuadraticForm::standard(&sub_alphas).expect("n >= 5 leaves a coefficient");
    let sub_frame_form = sub_form.clone();
    // Generate on the sub-space (dimension n-2 >= 3).
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = OrthogonalMapQ::identity(&sub_form);
    let rand_aniso = |rng: &mut ChaCha8Rng| -> Vec<Rat> {
        loop {
            let v: Vec<Rat> = (0..sub_form.dim())
                .map(|_| crate::arith::rat_i64(rng.gen_range(-2..=2)))
                .collect();
            if !sub_form.evaluate(&v).expect("size matches").is_zero() {
                return v;
            }
        }
    };
    for _ in 0..word_length {
        if rng.gen_range(0..10) < 3 {
            let lambda = crate::arith::rat_i64(loop {
                let v = rng.gen_range(-4i64..=4);
                if v != 0 {
                    break v;
                }
            });
            g = g.compose(&hyperbolic_rotation(&sub_frame_form, &lambda).expect("standard"));
        } else {
            let c = rand_aniso(&mut rng);
            let d = rand_aniso(&mut rng);
            g = g.compose(&crate::quad::reflection(&sub_form, &c).expect("anisotropic"));
            g = g.compose(&crate::quad::reflection(&sub_form, &d).expect("anisotropic"));
        }
    }
    let q = g.spinor_product(&sub_form).expect("word attached");
    if !crate::arith::is_square_rat(&q) {
        let correction = hyperbolic_rotation(&sub_form, &(Rat::one() / &q)).expect("nonzero");
        g = g.compose(&correction);
    }
    // Embed block-diagonally; the reflection word embeds with the same
    // f-values, so the word is re-created on the big form.
    let sub_word = g.word().expect("constructed with words").clone();
    let embedded_word = crate::quad::ReflectionWord {
        vectors: sub_word
            .vectors
            .iter()
            .map(|v| {
                let mut w = v.clone();
                w.extend([Rat::zero(), Rat::zero()]);
                w
            })
            .collect(),
    };
    let out = OrthogonalMapQ::from_word(frame.form(), embedded_word).expect("embedding preserves");
    debug_assert!(is_stabilizer(frame, &out).unwrap());
    out
}

/// A Z-point with residue entries: the reduction of a global point mod
/// p^N (denominators away from p).
#[derive(Debug, Clone)]
pub struct LocalZPoint {
    pub g: MatrixPN,
    pub s: VectorPN,
    pub t: VectorPN,
}

/// Reduce a global Z-point mod p^N. Errors when a denominator is not a
/// p-unit.
pub fn reduce_zpoint(
    zeta: &ZPoint,
    ring: &ResidueRing,
) -> Result<LocalZPoint, BorovoiError> {
    let reduce_vec = |v: &[Rat]| -> Result<VectorPN, BorovoiError> {
        v.iter()
            .map(|x| ring.from_rat(x).map_err(|e| BorovoiError::Local(e.to_string())))
            .collect()
    };
    let n = zeta.g.matrix().rows();
    let mut g = Matrix::from_fn(n, n, |_, _| ring.zero());
    for i in 0..n {
        for j in 0..n {
            g.set(
                i,
                j,
                ring.from_rat(zeta.g.matrix().get(i, j))
                    .map_err(|e| BorovoiError::Local(e.to_string()))?,
            );
        }
    }
    Ok(LocalZPoint {
        g,
        s: reduce_vec(&zeta.s)?,
        t: reduce_vec(&zeta.t)?,
    })
}

/// The local quadruple certificate: factors certified mod p^{N'} with
/// N' = N - 2 declared conservatively.
#[derive(Debug, Clone)]
pub struct LocalQuadruple {
    pub x: OrthogonalMapZp,
    pub y: OrthogonalMapZp,
    pub z: OrthogonalMapZp,
    pub u: OrthogonalMapZp,
    pub certified_precision: u32,
}

/// Spinor norm of the reduction over F_p: the Legendre class of the
/// product of reflection values of any factorization of the reduced
/// matrix.
fn residue_spinor_trivial(
    lattice: &UnimodularLatticeZp,
    matrix: &MatrixPN,
) -> Result<bool, BorovoiError> {
    let ring = lattice.ring();
    let fp = ring.residue_field();
    let gram_fp = lattice.gram().map(|e| ring.to_residue_field(e));
    let reduced = matrix.map(|e| ring.to_residue_field(e));
    let word = cartan_word_generic(&fp, &gram_fp, &reduced)
        .map_err(BorovoiError::Quad)?;
    let mut product = 1u64;
    for c in &word {
        let gc = mat_vec(&fp, &gram_fp, c);
        let mut val = 0u64;
        for (a, b) in c.iter().zip(gc.iter()) {
            val = fp.add(&val, &fp.mul(a, b));
        }
        product = fp.mul(&product, &val);
    }
    Ok(product == 0 || fp.legendre(product) == 1)
}

/// Hyperbolic rotation matrix mod p^N with unit parameter lambda:
/// e1 -> lambda e1, e2 -> e2 / lambda, identity elsewhere. Fixes both
/// anchors; residue spinor class = class of lambda.
fn hyperbolic_rotation_pn(ring: &ResidueRing, n: usize, lambda: &BigUint) -> MatrixPN {
    let inv = ring.inverse(lambda).expect("unit parameter");
    Matrix::from_fn(n, n, |i, j| {
        if (i, j) == (0, 0) {
            lambda.clone()
        } else if (i, j) == (1, 1) {
            inv.clone()
        } else if i == j {
            ring.one()
        } else {
            ring.zero()
        }
    })
}

/// Local version of the phi-fiber construction: for a good odd prime
/// (p does not divide 2 or any form coefficient), produce a quadruple of
/// residue orthogonal maps with x y z u = g, x y (a) = s, x y (b) = t and
/// all memberships mod p^{N-2}.
pub fn phi_fiber_local(
    frame: &StandardFrame,
    zeta: &LocalZPoint,
    ring: &ResidueRing,
) -> Result<LocalQuadruple, BorovoiError> {
    let form = frame.form();
    let n = frame.dim();
    let p = ring.prime();
    // Good place: every alpha_i must be a p-unit.
    for alpha in form.standard_coeffs().expect("standard frame") {
        if crate::arith::padic_valuation(alpha, p).map_err(|e| BorovoiError::Local(e.to_string()))?
            != 0
        {
            return Err(BorovoiError::Local(format!("p={p} is a bad place")));
        }
    }
    let precision = ring.precision();
    if precision < 3 {
        return Err(BorovoiError::Local("precision must be at least 3".into()));
    }
    let gram = {
        let mut g = Matrix::from_fn(n, n, |_, _| ring.zero());
        for i in 0..n {
            for j in 0..n {
                g.set(
                    i,
                    j,
                    ring.from_rat(form.gram().get(i, j))
                        .map_err(|e| BorovoiError::Local(e.to_string()))?,
                );
            }
        }
        g
    };
    let lattice = UnimodularLatticeZp::new(ring.clone(), gram)?;
    let unit = |i: usize| -> VectorPN {
        (0..n)
            .map(|j| if j == i { ring.one() } else { ring.zero() })
            .collect()
    };
    let a = unit(n - 1);
    let b = unit(n - 2);
    let g = zeta.g.map(|e| e % ring.modulus());
    let s: VectorPN = zeta.s.iter().map(|e| e % ring.modulus()).collect();
    let t: VectorPN = zeta.t.iter().map(|e| e % ring.modulus()).collect();

    // Z-membership of the reduced point, mod p^N.
    let check_zero = |x: &BigUint, what: &str| -> Result<(), BorovoiError> {
        if !ring.is_zero(x) {
            return Err(BorovoiError::NotInZ(format!("{what} mod p^N")));
        }
        Ok(())
    };
    let gb = mat_vec(ring, &g, &b);
    let ga_check = mat_mul(ring, &mat_mul(ring, &g.transpose(), lattice.gram()), &g);
    if !matrices_congruent(ring, &ga_check, lattice.gram(), precision) {
        return Err(BorovoiError::NotInZ("g orthogonal mod p^N".into()));
    }
    check_zero(
        &ring.sub(&lattice.evaluate(&s), &lattice.evaluate(&a)),
        "f(s) = f(a)",
    )?;
    check_zero(&lattice.bilinear(&s, &gb), "(s|g(b)) = 0")?;
    check_zero(&lattice.bilinear(&t, &a), "(t|a) = 0")?;
    check_zero(
        &ring.sub(&lattice.evaluate(&t), &lattice.evaluate(&b)),
        "f(t) = f(b)",
    )?;
    check_zero(&lattice.bilinear(&s, &t), "(s|t) = 0")?;

    // The three special lifts (2m+1 = 5 <= n).
    let rho = lift_pair(&lattice, [&b, &a], [&t, &a])?;
    let eta = lift_pair(&lattice, [&a, &b], [&s, &t])?;
    let sigma = lift_pair(&lattice, [&a, &b], [&s, &gb])?;

    let rho_i = mat_inverse(ring, &rho).map_err(|e| BorovoiError::Lattice(e.to_string()))?;
    let eta_i = mat_inverse(ring, &eta).map_err(|e| BorovoiError::Lattice(e.to_string()))?;
    let sigma_i = mat_inverse(ring, &sigma).map_err(|e| BorovoiError::Lattice(e.to_string()))?;
    let x = rho.clone();
    let y = mat_mul(ring, &rho_i, &eta);
    let z = mat_mul(ring, &eta_i, &sigma);
    let u = mat_mul(ring, &sigma_i, &g);

    // Certify at N' = N - 2 (conservative guard margin).
    let certified = precision - 2;
    let out_lattice = lattice.at_precision(certified);
    let out_ring = out_lattice.ring().clone();
    let reduce = |m: &MatrixPN| m.map(|e| e % out_ring.modulus());
    let matrices = [reduce(&x), reduce(&y), reduce(&z), reduce(&u)];
    let reduced_zeta = LocalZPoint {
        g: reduce(&g),
        s: s.iter().map(|e| e % out_ring.modulus()).collect(),
        t: t.iter().map(|e| e % out_ring.modulus()).collect(),
    };
    verify_local_quadruple(frame, &reduced_zeta, &matrices, &out_ring)?;
    let [mx, my, mz, mu] = matrices;
    Ok(LocalQuadruple {
        x: OrthogonalMapZp::new(&out_lattice, mx, certified)?,
        y: OrthogonalMapZp::new(&out_lattice, my, certified)?,
        z: OrthogonalMapZp::new(&out_lattice, mz, certified)?,
        u: OrthogonalMapZp::new(&out_lattice, mu, certified)?,
        certified_precision: certified,
    })
}

/// Independent checker for a local quadruple at its certified precision:
/// orthogonality of each factor, the product x y z u = g, the transported
/// anchors, the stabilizer memberships, determinants +1 and trivial
/// residue spinor norms, all mod the ring's full precision.
pub fn verify_local_quadruple(
    frame: &StandardFrame,
    zeta: &LocalZPoint,
    matrices: &[MatrixPN; 4],
    ring: &ResidueRing,
) -> Result<(), BorovoiError> {
    let form = frame.form();
    let n = frame.dim();
    let certified = ring.precision();
    let gram = {
        let mut g = Matrix::from_fn(n, n, |_, _| ring.zero());
        for i in 0..n {
            for j in 0..n {
                g.set(
                    i,
                    j,
                    ring.from_rat(form.gram().get(i, j))
                        .map_err(|e| BorovoiError::Local(e.to_string()))?,
                );
            }
        }
        g
    };
    let lattice = UnimodularLatticeZp::new(ring.clone(), gram)?;
    let unit = |i: usize| -> VectorPN {
        (0..n)
            .map(|j| if j == i { ring.one() } else { ring.zero() })
            .collect()
    };
    let a = unit(n - 1);
    let b = unit(n - 2);
    let quad: Vec<OrthogonalMapZp> = matrices
        .iter()
        .map(|m| OrthogonalMapZp::new(&lattice, m.map(|e| e % ring.modulus()), certified))
        .collect::<Result<_, _>>()?;
    let (qx, qy, qz, qu) = (&quad[0], &quad[1], &quad[2], &quad[3]);
    let g = zeta.g.map(|e| e % ring.modulus());
    let s: VectorPN = zeta.s.iter().map(|e| e % ring.modulus()).collect();
    let t: VectorPN = zeta.t.iter().map(|e| e % ring.modulus()).collect();
    let xy = mat_mul(ring, qx.matrix(), qy.matrix());
    let xyzu = mat_mul(ring, &mat_mul(ring, &xy, qz.matrix()), qu.matrix());
    let checks: [(&str, bool); 9] = [
        ("x y z u = g", matrices_congruent(ring, &xyzu, &g, certified)),
        (
            "x y (a) = s",
            vectors_congruent(ring, &mat_vec(ring, &xy, &a), &s, certified),
        ),
        (
            "x y (b) = t",
            vectors_congruent(ring, &mat_vec(ring, &xy, &b), &t, certified),
        ),
        (
            "x(a) = a",
            vectors_congruent(ring, &qx.apply(ring, &a), &a, certified),
        ),
        (
            "y(b) = b",
            vectors_congruent(ring, &qy.apply(ring, &b), &b, certified),
        ),
        (
            "z(a) = a",
            vectors_congruent(ring, &qz.apply(ring, &a), &a, certified),
        ),
        (
            "u(b) = b",
            vectors_congruent(ring, &qu.apply(ring, &b), &b, certified),
        ),
        (
            "det = +1",
            quad.iter().all(|m| m.det_sign(&lattice) == Ok(1)),
        ),
        (
            "residue spinor norms trivial",
            quad.iter()
                .map(|m| residue_spinor_trivial(&lattice, m.matrix()))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .all(|ok| ok),
        ),
    ];
    for (what, ok) in checks {
        if !ok {
            return Err(BorovoiError::CheckFailed(format!("local {what}")));
        }
    }
    Ok(())
}

/// Special lift of a two-vector system, corrected to trivial residue
/// spinor norm by a hyperbolic rotation with a non-residue unit parameter.
fn lift_pair(
    lattice: &UnimodularLatticeZp,
    sources: [&VectorPN; 2],
    targets: [&VectorPN; 2],
) -> Result<MatrixPN, BorovoiError> {
    let ring = lattice.ring();
    let problem = TransporterProblem::new(
        lattice.clone(),
        sources.iter().map(|v| (*v).clone()).collect(),
        targets.iter().map(|v| (*v).clone()).collect(),
    )?;
    let lifted = witt_lift_special(&problem, ring.precision())?;
    let mut matrix = lifted.matrix().clone();
    if !residue_spinor_trivial(lattice, &matrix)? {
        let fp = ring.residue_field();
        let lambda = BigUint::from(fp.non_residue());
        let h = hyperbolic_rotation_pn(ring, lattice.dim(), &lambda);
        // h fixes e3..en, in particular both anchors, so the transport
        // survives; the residue spinor class flips to trivial.
        matrix = mat_mul(ring, &matrix, &h);
        debug_assert!(residue_spinor_trivial(lattice, &matrix)?);
    }
    Ok(matrix)
}
