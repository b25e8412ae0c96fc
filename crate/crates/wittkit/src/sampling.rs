//! Deterministic instance generators for the property suites. Everything
//! flows from an explicit seed; no entropy sources.

use crate::arith::{mat_vec, rat_i64, Matrix, MatrixPN, Rat, ResidueRing, Ring, VectorPN};
use crate::lattice::{reflection_matrix_pn, TransporterProblem, UnimodularLatticeZp};
use crate::quad::{reflection, witt_extend_generic, OrthogonalMapQ, QuadraticForm};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniform nonzero integer in [-bound, bound].
pub fn random_nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

/// Whether a rational is zero, without importing the numeric traits.
pub fn rat_is_zero(x: &Rat) -> bool {
    x.is_zero()
}

/// A standard-shape form of the given dimension with small nonzero
/// coefficients.
pub fn random_standard_form(rng: &mut ChaCha8Rng, dim: usize) -> QuadraticForm {
    assert!(dim >= 3);
    let alphas: Vec<Rat> = (0..dim - 2)
        .map(|_| {
            rat_i64(loop {
                let v = rng.gen_range(-5i64..=5);
                if v != 0 {
                    break v;
                }
            })
        })
        .collect();
    QuadraticForm::standard(&alphas).expect("nonzero coefficients")
}

pub fn random_anisotropic_vector(
    form: &QuadraticForm,
    rng: &mut ChaCha8Rng,
    max_entry: i64,
) -> Vec<Rat> {
    loop {
        let v: Vec<Rat> = (0..form.dim())
            .map(|_| rat_i64(rng.gen_range(-max_entry..=max_entry)))
            .collect();
        if !form.evaluate(&v).expect("sizes agree").is_zero() {
            return v;
        }
    }
}

/// A product of up to `reflections` random rational reflections.
pub fn random_orthogonal_q(
    form: &QuadraticForm,
    rng: &mut ChaCha8Rng,
    reflections: usize,
) -> OrthogonalMapQ {
    let mut acc = OrthogonalMapQ::identity(form);
    for _ in 0..reflections {
        let c = random_anisotropic_vector(form, rng, 3);
        acc = acc.compose(&reflection(form, &c).expect("anisotropic"));
    }
    acc
}

/// A linearly independent system of m vectors with entries bounded by
/// `max_entry`; when `degenerate_span` is set the span is arranged to have
/// a nontrivial radical (the first vector is isotropic and orthogonal to
/// the rest), which exercises the hyperbolic-completion path.
pub fn random_system(
    form: &QuadraticForm,
    rng: &mut ChaCha8Rng,
    m: usize,
    max_entry: i64,
    degenerate_span: bool,
) -> Vec<Vec<Rat>> {
    let n = form.dim();
    loop {
        let mut sys: Vec<Vec<Rat>> = Vec::with_capacity(m);
        if degenerate_span {
            // e1 is isotropic in a standard-shape form; pad with vectors
            // supported away from the hyperbolic plane so they stay
            // orthogonal to it.
            sys.push(crate::quad::basis_vector(n, 0));
            while sys.len() < m {
                let mut v: Vec<Rat> = vec![Rat::zero(); n];
                for x in v.iter_mut().skip(2) {
                    *x = rat_i64(rng.gen_range(-max_entry..=max_entry));
                }
                sys.push(v);
            }
        } else {
            for _ in 0..m {
                sys.push(
                    (0..n)
                        .map(|_| rat_i64(rng.gen_range(-max_entry..=max_entry)))
                        .collect(),
                );
            }
        }
        // Admissible iff the extension engine accepts the identity
        // instance (checks independence and, trivially, the Grams).
        if witt_extend_generic(&crate::arith::RatField, form.gram(), &sys, &sys).is_ok() {
            return sys;
        }
    }
}

/// A full admissible Witt instance: a form, an independent system and its
/// image under a hidden isometry.
pub struct WittInstance {
    pub form: QuadraticForm,
    pub sources: Vec<Vec<Rat>>,
    pub targets: Vec<Vec<Rat>>,
}

pub fn random_witt_instance(rng: &mut ChaCha8Rng, degenerate_span: bool) -> WittInstance {
    let dim = rng.gen_range(5..=6);
    let form = random_standard_form(rng, dim);
    let m = rng.gen_range(1..=2);
    let sources = random_system(&form, rng, m, 10, degenerate_span);
    let count = rng.gen_range(0..=4);
    let hidden = random_orthogonal_q(&form, rng, count);
    let targets: Vec<Vec<Rat>> = sources.iter().map(|v| hidden.apply(v)).collect();
    WittInstance {
        form,
        sources,
        targets,
    }
}

/// A random unimodular symmetric Gram matrix over Z/p^N.
pub fn random_unimodular_lattice(
    rng: &mut ChaCha8Rng,
    p: u64,
    dim: usize,
    precision: u32,
) -> UnimodularLatticeZp {
    let ring = ResidueRing::new(p, precision).expect("odd prime");
    loop {
        let upper = Matrix::from_fn(dim, dim, |i, j| {
            if i <= j {
                ring.from_i64(rng.gen_range(0..(3 * p as i64)))
            } else {
                ring.zero()
            }
        });
        let gram = Matrix::from_fn(dim, dim, |i, j| {
            if i <= j {
                upper.get(i, j).clone()
            } else {
                upper.get(j, i).clone()
            }
        });
        if let Ok(lat) = UnimodularLatticeZp::new(ring.clone(), gram) {
            return lat;
        }
    }
}

/// A product of unit-norm residue reflections.
pub fn random_orthogonal_pn(
    lattice: &UnimodularLatticeZp,
    rng: &mut ChaCha8Rng,
    reflections: usize,
) -> MatrixPN {
    let ring = lattice.ring();
    let n = lattice.dim();
    let mut acc = Matrix::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() });
    let mut placed = 0;
    while placed < reflections {
        let c: VectorPN = (0..n)
            .map(|_| ring.from_i64(rng.gen_range(-9i64..=9)))
            .collect();
        if !ring.is_unit(&lattice.evaluate(&c)) {
            continue;
        }
        let r = reflection_matrix_pn(lattice, &c).expect("unit norm");
        acc = crate::arith::mat_mul(ring, &acc, &r);
        placed += 1;
    }
    acc
}

/// An admissible transporter problem on a random unimodular lattice: the
/// targets are the image of the sources under a hidden residue isometry.
pub fn random_transporter_problem(
    rng: &mut ChaCha8Rng,
    p: u64,
    precision: u32,
) -> TransporterProblem {
    let dim = rng.gen_range(3..=6);
    let m = rng.gen_range(1..=2usize.min(dim - 1));
    let lattice = random_unimodular_lattice(rng, p, dim, precision);
    let ring = lattice.ring().clone();
    let sources: Vec<VectorPN> = (0..m)
        .map(|i| {
            let mut v: VectorPN = (0..dim)
                .map(|j| {
                    if j == i {
                        ring.one()
                    } else if j < m {
                        ring.zero()
                    } else {
                        ring.from_i64(rng.gen_range(0..100))
                    }
                })
                .collect();
            // occasionally perturb the unit coordinate
            if rng.gen_range(0..10) < 3 {
                v[i] = ring.from_i64(rng.gen_range(1..(p as i64)));
            }
            v
        })
        .collect();
    let count = rng.gen_range(0..=3);
    let hidden = random_orthogonal_pn(&lattice, rng, count);
    let targets: Vec<VectorPN> = sources.iter().map(|s| mat_vec(&ring, &hidden, s)).collect();
    TransporterProblem::new(lattice, sources, targets).expect("constructed to be admissible")
}
