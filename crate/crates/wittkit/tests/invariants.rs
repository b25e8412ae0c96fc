//! Module-level invariant properties: the algebraic laws each layer
//! promises, checked on randomized inputs with fixed seeds or proptest.

use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;
use wittkit::arith::{
    factorize, mat_vec, padic_valuation, rat_from_str, rat_i64, solve_linear, square_class,
    Matrix, Rat, RatField, DEFAULT_FACTOR_BOUND,
};
use wittkit::quad::{reflection, spinor_norm, OrthogonalMapQ, QuadraticForm};
use wittkit::sampling::{random_nonzero, seeded_rng};

fn rat_strategy() -> impl Strategy<Value = Rat> {
    (-200i64..=200, 1i64..=60).prop_map(|(n, d)| rat_i64(n) / rat_i64(d))
}

proptest! {
    #[test]
    fn square_class_group_law(a in rat_strategy(), b in rat_strategy()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let ca = square_class(&a, DEFAULT_FACTOR_BOUND).unwrap();
        let cb = square_class(&b, DEFAULT_FACTOR_BOUND).unwrap();
        let product = square_class(&(&a * &b), DEFAULT_FACTOR_BOUND).unwrap();
        prop_assert_eq!(ca.mul(&cb, DEFAULT_FACTOR_BOUND).unwrap(), product);
    }

    #[test]
    fn square_class_square_invariance(a in rat_strategy(), y in rat_strategy()) {
        prop_assume!(!a.is_zero() && !y.is_zero());
        let scaled = &a * &y * &y;
        prop_assert_eq!(
            square_class(&a, DEFAULT_FACTOR_BOUND).unwrap(),
            square_class(&scaled, DEFAULT_FACTOR_BOUND).unwrap()
        );
    }

    #[test]
    fn factorize_reconstructs(n in -100_000i64..100_000) {
        prop_assume!(n != 0);
        let f = factorize(&num_bigint::BigInt::from(n), 1_000).unwrap();
        prop_assert_eq!(f.reconstruct(), num_bigint::BigInt::from(n));
    }

    #[test]
    fn solve_then_remultiply(
        entries in proptest::collection::vec(-9i64..=9, 12),
        rhs in proptest::collection::vec(-9i64..=9, 3),
    ) {
        let m = Matrix::from_fn(3, 4, |i, j| rat_i64(entries[i * 4 + j]));
        let b: Vec<Rat> = rhs.iter().map(|&x| rat_i64(x)).collect();
        if let Some(sol) = solve_linear(&RatField, &m, &b).unwrap() {
            prop_assert_eq!(mat_vec(&RatField, &m, &sol.particular), b);
            for k in &sol.kernel {
                let image = mat_vec(&RatField, &m, k);
                prop_assert!(image.iter().all(|x| x.is_zero()));
            }
        }
    }
}

#[test]
fn valuation_is_additive_on_1000_pairs() {
    let mut rng = seeded_rng(31);
    for _ in 0..1000 {
        let p = [2u64, 3, 5, 7, 11][rng.gen_range(0..5)];
        let x = rat_from_str(&format!(
            "{}/{}",
            random_nonzero(&mut rng, 10_000),
            rng.gen_range(1i64..=500)
        ))
        .unwrap();
        let y = rat_from_str(&format!(
            "{}/{}",
            random_nonzero(&mut rng, 10_000),
            rng.gen_range(1i64..=500)
        ))
        .unwrap();
        assert_eq!(
            padic_valuation(&(&x * &y), p).unwrap(),
            padic_valuation(&x, p).unwrap() + padic_valuation(&y, p).unwrap()
        );
    }
}

#[test]
fn spinor_norm_is_a_homomorphism_on_200_pairs() {
    let form = QuadraticForm::standard(&[rat_i64(1), rat_i64(2), rat_i64(1)]).unwrap();
    let mut rng = seeded_rng(33);
    let mut random_so = |rng: &mut rand_chacha::ChaCha8Rng| -> OrthogonalMapQ {
        let mut acc = OrthogonalMapQ::identity(&form);
        for _ in 0..2 {
            let c: Vec<Rat> = loop {
                let v: Vec<Rat> = (0..5).map(|_| rat_i64(rng.gen_range(-3..=3))).collect();
                if !form.evaluate(&v).unwrap().is_zero() {
                    break v;
                }
            };
            acc = acc.compose(&reflection(&form, &c).unwrap());
        }
        acc
    };
    for _ in 0..200 {
        let s = random_so(&mut rng);
        let t = random_so(&mut rng);
        let ns = spinor_norm(&form, &s).unwrap();
        let nt = spinor_norm(&form, &t).unwrap();
        let nst = spinor_norm(&form, &s.compose(&t)).unwrap();
        assert_eq!(ns.mul(&nt, DEFAULT_FACTOR_BOUND).unwrap(), nst);
    }
}

#[test]
fn witt_extension_postcondition_on_200_admissible_instances() {
    for i in 0..200u64 {
        let mut rng = seeded_rng(40_000 + i);
        let inst = wittkit::sampling::random_witt_instance(&mut rng, i % 7 == 0);
        let map = wittkit::quad::witt_extend(&inst.form, &inst.sources, &inst.targets).unwrap();
        for (a, b) in inst.sources.iter().zip(&inst.targets) {
            assert_eq!(&map.apply(a), b);
        }
        assert!(map.word().unwrap().len() <= 2 * inst.form.dim());
    }
}

#[test]
fn cartan_dieudonne_on_500_random_products() {
    let form = QuadraticForm::standard(&[rat_i64(1), rat_i64(1), rat_i64(1)]).unwrap();
    let mut rng = seeded_rng(51);
    for _ in 0..500 {
        let k = rng.gen_range(0..=6);
        let mut sigma = OrthogonalMapQ::identity(&form);
        for _ in 0..k {
            let c: Vec<Rat> = loop {
                let v: Vec<Rat> = (0..5).map(|_| rat_i64(rng.gen_range(-3..=3))).collect();
                if !form.evaluate(&v).unwrap().is_zero() {
                    break v;
                }
            };
            sigma = sigma.compose(&reflection(&form, &c).unwrap());
        }
        let bare = OrthogonalMapQ::new(&form, sigma.matrix().clone(), None).unwrap();
        let word = wittkit::quad::cartan_dieudonne(&form, &bare).unwrap();
        assert!(word.len() <= 5, "word length {} exceeds the dimension", word.len());
        assert_eq!(&word.product(&form).unwrap(), sigma.matrix());
    }
}

#[test]
fn spinor_norm_well_defined_on_200_elements() {
    let form = QuadraticForm::standard(&[rat_i64(1), rat_i64(1), rat_i64(1)]).unwrap();
    let mut rng = seeded_rng(52);
    for _ in 0..200 {
        let mut sigma = OrthogonalMapQ::identity(&form);
        for _ in 0..2 {
            let c: Vec<Rat> = loop {
                let v: Vec<Rat> = (0..5).map(|_| rat_i64(rng.gen_range(-2..=2))).collect();
                if !form.evaluate(&v).unwrap().is_zero() {
                    break v;
                }
            };
            let d: Vec<Rat> = loop {
                let v: Vec<Rat> = (0..5).map(|_| rat_i64(rng.gen_range(-2..=2))).collect();
                if !form.evaluate(&v).unwrap().is_zero() {
                    break v;
                }
            };
            sigma = sigma
                .compose(&reflection(&form, &c).unwrap())
                .compose(&reflection(&form, &d).unwrap());
        }
        // Two independent factorizations: pad with tau_c tau_c, and factor
        // the bare matrix from scratch.
        let c: Vec<Rat> = loop {
            let v: Vec<Rat> = (0..5).map(|_| rat_i64(rng.gen_range(-2..=2))).collect();
            if !form.evaluate(&v).unwrap().is_zero() {
                break v;
            }
        };
        let padded = sigma
            .compose(&reflection(&form, &c).unwrap())
            .compose(&reflection(&form, &c).unwrap());
        let bare = OrthogonalMapQ::new(&form, sigma.matrix().clone(), None).unwrap();
        let n1 = spinor_norm(&form, &sigma).unwrap();
        let n2 = spinor_norm(&form, &padded).unwrap();
        let n3 = spinor_norm(&form, &bare).unwrap();
        assert_eq!(n1, n2);
        assert_eq!(n1, n3);
    }
}

#[test]
fn reduced_global_certificates_pass_the_local_checks() {
    // A global four-factor certificate, reduced mod p^N at an admissible
    // prime, is a valid local quadruple: all congruences, determinants and
    // residue spinor norms check out.
    use wittkit::borovoi::{
        decompose, random_spinor_kernel_element, verify_local_quadruple, LocalZPoint,
        StandardFrame,
    };
    let frame = StandardFrame::new(
        QuadraticForm::standard(&[rat_i64(1), rat_i64(1), rat_i64(1)]).unwrap(),
    )
    .unwrap();
    let mut produced = 0;
    let mut seed = 60_000u64;
    while produced < 10 {
        seed += 1;
        let g = random_spinor_kernel_element(&frame, seed, 4);
        let cert = decompose(&frame, &g).unwrap();
        let p = [5u64, 7, 11][produced % 3];
        let ring = wittkit::arith::ResidueRing::new(p, 12).unwrap();
        let reduce_map = |m: &wittkit::quad::OrthogonalMapQ| -> Option<wittkit::arith::MatrixPN> {
            let mm = m.matrix();
            let mut out = Matrix::from_fn(5, 5, |_, _| num_bigint::BigUint::ZERO);
            for i in 0..5 {
                for j in 0..5 {
                    out.set(i, j, ring.from_rat(mm.get(i, j)).ok()?);
                }
            }
            Some(out)
        };
        let reduce_vec = |v: &[Rat]| -> Option<Vec<num_bigint::BigUint>> {
            v.iter().map(|x| ring.from_rat(x).ok()).collect()
        };
        let (Some(gx), Some(xx), Some(yy), Some(zz), Some(uu)) = (
            reduce_map(&cert.g),
            reduce_map(&cert.x),
            reduce_map(&cert.y),
            reduce_map(&cert.z),
            reduce_map(&cert.u),
        ) else {
            continue; // denominator hit p; try the next seed
        };
        let (Some(s), Some(t)) = (reduce_vec(&cert.s), reduce_vec(&cert.t)) else {
            continue;
        };
        let zeta = LocalZPoint { g: gx, s, t };
        verify_local_quadruple(&frame, &zeta, &[xx, yy, zz, uu], &ring)
            .expect("reduced global certificate passes the local checks");
        produced += 1;
    }
}

/// Fast integer search for an isotropic vector of a diagonal form, up to
/// the given max-norm. i128 arithmetic; entries assumed small.
fn diagonal_isotropic_search(diag: &[i64], height: i64) -> Option<Vec<i64>> {
    let n = diag.len();
    let mut v = vec![-height; n];
    loop {
        let value: i128 = v
            .iter()
            .zip(diag.iter())
            .map(|(&x, &d)| d as i128 * (x as i128) * (x as i128))
            .sum();
        if value == 0 && v.iter().any(|&x| x != 0) {
            return Some(v);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if v[i] < height {
                v[i] += 1;
                for x in v[i + 1..].iter_mut() {
                    *x = -height;
                }
                break;
            }
        }
    }
}

#[test]
fn global_isotropy_agrees_with_bounded_search_on_a_curated_corpus() {
    use wittkit::local_global::{is_isotropic_global, is_isotropic_local};
    // 30 diagonal forms over Q, mixing isotropic and anisotropic ones of
    // dimensions 2 through 5.
    let corpus: [&[i64]; 30] = [
        &[1, -1],
        &[1, -2],
        &[1, -4],
        &[2, -18],
        &[3, -5],
        &[1, 1, -1],
        &[1, 1, -2],
        &[1, 1, -3],
        &[1, 1, 1],
        &[1, -2, -3],
        &[1, 2, -3],
        &[2, 3, -5],
        &[1, 1, -7],
        &[2, 5, -7],
        &[3, 4, -7],
        &[1, 1, 1, -1],
        &[1, 1, 1, 1],
        &[1, 2, -3, -4],
        &[1, 1, -1, -1],
        &[2, 3, 5, -30],
        &[1, 3, -2, -6],
        &[1, 1, 2, -2],
        &[7, 11, -13, -1],
        &[1, 2, 3, 4],
        &[-1, -2, -5, -10],
        &[1, 1, 1, 1, -7],
        &[1, 2, 3, -4, -5],
        &[1, 1, 1, -2, -3],
        &[2, 2, 3, 3, -1],
        &[5, -7, 11, -13, 2],
    ];
    // Smaller exhaustive heights for the higher dimensions keep the search
    // honest but bounded; solutions in this corpus are tiny anyway.
    let height_for = |n: usize| -> i64 {
        match n {
            2 => 100,
            3 => 100,
            4 => 20,
            _ => 8,
        }
    };
    for diag in corpus {
        let n = diag.len();
        let form = QuadraticForm::from_gram(Matrix::from_fn(n, n, |i, j| {
            if i == j {
                rat_i64(diag[i])
            } else {
                rat_i64(0)
            }
        }))
        .unwrap();
        let (declared, obstruction) = is_isotropic_global(&form, 1_000_000).unwrap();
        match diagonal_isotropic_search(diag, height_for(n)) {
            Some(v) => {
                // Search found a zero: it must be declared isotropic, and
                // the witness must actually evaluate to zero.
                let vr: Vec<Rat> = v.iter().map(|&x| rat_i64(x)).collect();
                assert!(form.evaluate(&vr).unwrap().is_zero());
                assert!(declared, "search solved {diag:?} but it was declared anisotropic");
            }
            None => {
                if !declared {
                    // Declared anisotropic: the reported obstruction must
                    // verify locally.
                    let place = obstruction.expect("anisotropic verdicts carry a place");
                    assert!(
                        !is_isotropic_local(&form, place).unwrap(),
                        "claimed obstruction at {place} does not verify for {diag:?}"
                    );
                }
                // Declared isotropic with no small zero is allowed: the
                // bounded search is incomplete by design.
            }
        }
    }
}

#[test]
fn invariant_reports_are_internally_consistent() {
    use wittkit::local_global::{local_invariants, PlaceQ};
    let corpus: [&[i64]; 6] = [
        &[1, -1],
        &[1, 1, -3],
        &[1, 1, 1, 1],
        &[1, 2, -3, -4],
        &[2, 3, 5, -30],
        &[1, 1, 1, -2, -3],
    ];
    for diag in corpus {
        let n = diag.len();
        let form = QuadraticForm::from_gram(Matrix::from_fn(n, n, |i, j| {
            if i == j {
                rat_i64(diag[i])
            } else {
                rat_i64(0)
            }
        }))
        .unwrap();
        for place in [
            PlaceQ::Real,
            PlaceQ::Finite(2),
            PlaceQ::Finite(3),
            PlaceQ::Finite(5),
        ] {
            let inv = local_invariants(&form, place, 1_000_000).unwrap();
            assert_eq!(inv.isotropic, inv.witt_index >= 1);
            assert!(inv.witt_index <= inv.dim / 2);
            assert!(inv.hasse == 1 || inv.hasse == -1);
        }
    }
}

#[test]
fn residue_solves_remultiply_mod_p_to_the_n() {
    use wittkit::arith::ResidueRing;
    let mut rng = seeded_rng(71);
    let mut solved = 0;
    while solved < 20 {
        let p = [3u64, 5, 7][rng.gen_range(0..3)];
        let ring = ResidueRing::new(p, 6).unwrap();
        let rows = rng.gen_range(2..=4);
        let cols = rng.gen_range(2..=4);
        let m = Matrix::from_fn(rows, cols, |_, _| {
            wittkit::arith::Ring::from_i64(&ring, rng.gen_range(0..200))
        });
        let rhs: Vec<_> = (0..rows)
            .map(|_| wittkit::arith::Ring::from_i64(&ring, rng.gen_range(0..200)))
            .collect();
        match solve_linear(&ring, &m, &rhs) {
            Ok(Some(sol)) => {
                assert_eq!(mat_vec(&ring, &m, &sol.particular), rhs);
                for k in &sol.kernel {
                    let image = mat_vec(&ring, &m, k);
                    assert!(image
                        .iter()
                        .all(|x| wittkit::arith::Ring::is_zero(&ring, x)));
                }
                solved += 1;
            }
            Ok(None) => {}
            // Non-unit pivot structure: outside the engine's contract.
            Err(_) => {}
        }
    }
}
