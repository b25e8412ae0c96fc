use crate::files::{parse_json_file, read_text, write_atomic, CliError, PairFile, SystemFile};
use crate::Command;
use std::path::Path;
use wittkit::arith::{padic_valuation, rat_from_str, Rat, ResidueRing, Ring, VectorPN};
use wittkit::borovoi::{
    decompose, phi_fiber_local, psi_fiber_point, reduce_zpoint, BorovoiError, StandardFrame,
};
use wittkit::cert::{
    build_borovoi_cert, build_lift_cert, build_normalize_cert, build_sap_cert, build_witt_cert,
    certificate_to_string, parse_certificate, summary, verify_certificate, Certificate,
    InvariantReportJson, InvariantsCert, LocalQuadJson, OrbitCert, PlaceJson,
};
use wittkit::io::{parse_form, residue_matrix_to_json, FormJson};
use wittkit::lattice::{
    level, orbit_test, witt_lift, witt_lift_special, OrbitOutcome, TransporterProblem,
    UnimodularLatticeZp,
};
use wittkit::local_global::{
    local_invariants, relevant_places, strong_approx_quadric, PlaceQ,
};
use wittkit::quad::{
    congruent_diagonalize, normalize_to_standard, witt_extend, witt_extend_special,
    OrthogonalMapQ, QuadraticForm, SpecialTarget,
};

pub fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::FormNormalize {
            form,
            height_bound,
            witness,
            output,
        } => cmd_form_normalize(&form, height_bound, witness.as_deref(), &output),
        Command::WittExtend {
            form,
            vectors,
            special,
            output,
        } => cmd_witt_extend(&form, &vectors, special, &output),
        Command::Lift {
            form,
            transporter,
            prime,
            precision,
            special,
            output,
        } => cmd_lift(&form, &transporter, prime, precision, special, &output),
        Command::OrbitTest {
            form,
            vectors,
            prime,
            precision,
            output,
        } => cmd_orbit_test(&form, &vectors, prime, precision, &output),
        Command::Borovoi {
            form,
            element,
            local,
            output,
        } => cmd_borovoi(&form, &element, local.as_deref(), &output),
        Command::Sap {
            form,
            value,
            places,
            witness,
            output,
        } => cmd_sap(&form, &value, &places, &witness, &output),
        Command::Invariants {
            form,
            factor_bound,
            output,
        } => cmd_invariants(&form, factor_bound, &output),
        Command::Verify {
            certificate,
            factor_bound,
        } => cmd_verify(&certificate, factor_bound),
        Command::Selftest { seed } => Ok(cmd_selftest(seed)),
    }
}

fn load_form(path: &Path) -> Result<QuadraticForm, CliError> {
    let text = read_text(path)?;
    parse_form(&text).map_err(|e| CliError::new(format!("{}: {e}", path.display())))
}

fn parse_rat_list(s: &str, what: &str) -> Result<Vec<Rat>, CliError> {
    s.split(',')
        .map(|part| {
            rat_from_str(part.trim()).map_err(|e| CliError::new(format!("{what}: {e}")))
        })
        .collect()
}

fn parse_places(s: &str) -> Result<Vec<PlaceQ>, CliError> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            if part == "real" {
                Ok(PlaceQ::Real)
            } else {
                let p: u64 = part
                    .parse()
                    .map_err(|_| CliError::new(format!("bad place {part}")))?;
                PlaceQ::finite(p).map_err(CliError::new)
            }
        })
        .collect()
}

fn emit(cert: &Certificate, output: &Path) -> Result<(), CliError> {
    write_atomic(output, &certificate_to_string(cert))?;
    println!("{} -> {}", summary(cert), output.display());
    Ok(())
}

fn parse_system(
    form: &QuadraticForm,
    file: &SystemFile,
) -> Result<(Vec<Vec<Rat>>, Vec<Vec<Rat>>), CliError> {
    let parse_side = |side: &[Vec<String>], name: &str| -> Result<Vec<Vec<Rat>>, CliError> {
        side.iter()
            .map(|v| {
                if v.len() != form.dim() {
                    return Err(CliError::new(format!("{name}: vector size != form dim")));
                }
                v.iter()
                    .map(|s| rat_from_str(s).map_err(CliError::new))
                    .collect()
            })
            .collect()
    };
    Ok((
        parse_side(&file.sources, "sources")?,
        parse_side(&file.targets, "targets")?,
    ))
}

fn cmd_form_normalize(
    form_path: &Path,
    height_bound: u64,
    witness: Option<&str>,
    output: &Path,
) -> Result<i32, CliError> {
    let form = load_form(form_path)?;
    let witness_vec = witness
        .map(|w| parse_rat_list(w, "witness"))
        .transpose()?;
    let (normal, transform, scale) =
        normalize_to_standard(&form, witness_vec.as_deref(), height_bound)
            .map_err(CliError::new)?;
    let cert = Certificate::Normalize(build_normalize_cert(&form, &normal, &transform, scale));
    emit(&cert, output)?;
    Ok(0)
}

fn cmd_witt_extend(
    form_path: &Path,
    vectors_path: &Path,
    special: bool,
    output: &Path,
) -> Result<i32, CliError> {
    let form = load_form(form_path)?;
    let file: SystemFile = parse_json_file(vectors_path, "vectors file")?;
    let (sources, targets) = parse_system(&form, &file)?;
    let map = if special {
        let target = if form.is_standard_shape()
            && sources
                .iter()
                .all(|s| wittkit::sampling::rat_is_zero(&s[0]) && wittkit::sampling::rat_is_zero(&s[1]))
        {
            SpecialTarget::SpinorKernel
        } else {
            SpecialTarget::Determinant
        };
        witt_extend_special(&form, &sources, &targets, target).map_err(CliError::new)?
    } else {
        witt_extend(&form, &sources, &targets).map_err(CliError::new)?
    };
    let cert = Certificate::Witt(build_witt_cert(&form, &sources, &targets, &map));
    emit(&cert, output)?;
    Ok(0)
}

fn residue_lattice(
    form: &QuadraticForm,
    prime: u64,
    precision: u32,
) -> Result<(ResidueRing, UnimodularLatticeZp), CliError> {
    if prime == 2 {
        return Err(CliError::new(
            "p=2 unsupported: the residue characteristic must be odd",
        ));
    }
    if let Some(alphas) = form.standard_coeffs() {
        for (i, alpha) in alphas.iter().enumerate() {
            let v = padic_valuation(alpha, prime).map_err(CliError::new)?;
            if v != 0 {
                return Err(CliError::new(format!(
                    "p={prime} is a bad place: alpha_{} = {} is not a p-unit",
                    i + 3,
                    wittkit::arith::rat_to_string(alpha)
                )));
            }
        }
    }
    let ring = wittkit::io::parse_ring(prime, precision).map_err(CliError::new)?;
    let n = form.dim();
    let mut gram = wittkit::arith::Matrix::from_fn(n, n, |_, _| ring.zero());
    for i in 0..n {
        for j in 0..n {
            gram.set(
                i,
                j,
                ring.from_rat(form.gram().get(i, j)).map_err(|e| {
                    CliError::new(format!("gram entry ({i},{j}) not p-integral: {e}"))
                })?,
            );
        }
    }
    let lattice = UnimodularLatticeZp::new(ring.clone(), gram).map_err(CliError::new)?;
    Ok((ring, lattice))
}

fn reduce_vectors(
    ring: &ResidueRing,
    vectors: &[Vec<Rat>],
) -> Result<Vec<VectorPN>, CliError> {
    vectors
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| ring.from_rat(x).map_err(CliError::new))
                .collect()
        })
        .collect()
}

fn cmd_lift(
    form_path: &Path,
    vectors_path: &Path,
    prime: u64,
    precision: u32,
    special: bool,
    output: &Path,
) -> Result<i32, CliError> {
    let form = load_form(form_path)?;
    let file: SystemFile = parse_json_file(vectors_path, "transporter file")?;
    let (sources_q, targets_q) = parse_system(&form, &file)?;
    let (ring, lattice) = residue_lattice(&form, prime, precision)?;
    let sources = reduce_vectors(&ring, &sources_q)?;
    let targets = reduce_vectors(&ring, &targets_q)?;
    let problem = TransporterProblem::new(lattice.clone(), sources.clone(), targets.clone())
        .map_err(CliError::new)?;
    let map = if special {
        witt_lift_special(&problem, precision).map_err(CliError::new)?
    } else {
        witt_lift(&problem, precision).map_err(CliError::new)?
    };
    let out_lattice = lattice.at_precision(precision);
    let reduce = |v: &VectorPN| -> VectorPN {
        v.iter().map(|e| e % out_lattice.ring().modulus()).collect()
    };
    let cert = Certificate::Lift(build_lift_cert(
        &out_lattice,
        &sources.iter().map(&reduce).collect::<Vec<_>>(),
        &targets.iter().map(&reduce).collect::<Vec<_>>(),
        &map,
    ));
    emit(&cert, output)?;
    Ok(0)
}

fn cmd_orbit_test(
    form_path: &Path,
    vectors_path: &Path,
    prime: u64,
    precision: u32,
    output: &Path,
) -> Result<i32, CliError> {
    let form = load_form(form_path)?;
    let file: PairFile = parse_json_file(vectors_path, "vectors file")?;
    let parse_vec = |v: &[String], name: &str| -> Result<Vec<Rat>, CliError> {
        if v.len() != form.dim() {
            return Err(CliError::new(format!("{name}: vector size != form dim")));
        }
        v.iter()
            .map(|s| rat_from_str(s).map_err(CliError::new))
            .collect()
    };
    let a_q = parse_vec(&file.a, "a")?;
    let b_q = parse_vec(&file.b, "b")?;
    let (ring, lattice) = residue_lattice(&form, prime, precision)?;
    let a = reduce_vectors(&ring, std::slice::from_ref(&a_q))?.pop().unwrap();
    let b = reduce_vectors(&ring, std::slice::from_ref(&b_q))?.pop().unwrap();
    let outcome = orbit_test(&lattice, &a, &b, precision).map_err(CliError::new)?;
    let out_lattice = lattice.at_precision(precision);
    let out_ring = out_lattice.ring();
    let reduce = |v: &VectorPN| -> VectorPN { v.iter().map(|e| e % out_ring.modulus()).collect() };
    let (a_n, b_n) = (reduce(&a), reduce(&b));
    let la = level(&out_lattice, &a_n).map_err(CliError::new)?;
    let lb = level(&out_lattice, &b_n).map_err(CliError::new)?;
    let base = OrbitCert {
        p: prime,
        precision,
        gram: residue_matrix_to_json(out_lattice.gram()),
        a: a_n.iter().map(|e| e.to_string()).collect(),
        b: b_n.iter().map(|e| e.to_string()).collect(),
        found: false,
        levels: (la, lb),
        reason: None,
        x: None,
        transport_level: None,
    };
    match outcome {
        OrbitOutcome::Transporter(map) => {
            let cert = Certificate::Orbit(OrbitCert {
                found: true,
                x: Some(residue_matrix_to_json(map.matrix())),
                transport_level: Some(map.certified_precision()),
                ..base
            });
            emit(&cert, output)?;
            Ok(0)
        }
        OrbitOutcome::LevelMismatch { source, target } => {
            let cert = Certificate::Orbit(OrbitCert {
                reason: Some(format!("levels differ: {source} vs {target}")),
                ..base
            });
            emit(&cert, output)?;
            Ok(1)
        }
        OrbitOutcome::PrimitiveValueMismatch { level } => {
            let cert = Certificate::Orbit(OrbitCert {
                reason: Some(format!(
                    "primitive parts at level {level} take different values mod p^{}",
                    precision - level
                )),
                ..base
            });
            emit(&cert, output)?;
            Ok(1)
        }
    }
}

fn cmd_borovoi(
    form_path: &Path,
    element_path: &Path,
    local: Option<&[u64]>,
    output: &Path,
) -> Result<i32, CliError> {
    let form = load_form(form_path)?;
    let frame = StandardFrame::new(form.clone()).map_err(CliError::new)?;
    let map_json: wittkit::io::MapJson = parse_json_file(element_path, "element file")?;
    let g: OrthogonalMapQ = map_json.to_map(&form).map_err(CliError::new)?;
    let cert = match decompose(&frame, &g) {
        Ok(c) => c,
        Err(BorovoiError::NotInSpinorKernel { witness }) => {
            println!("not in spinor kernel: {witness}");
            return Ok(1);
        }
        Err(e) => return Err(CliError::new(e)),
    };
    let local_json = match local {
        Some(&[p, n]) => {
            let ring = wittkit::io::parse_ring(p, n.try_into().map_err(|_| {
                CliError::new("precision out of range")
            })?)
            .map_err(CliError::new)?;
            let zeta = psi_fiber_point(&frame, &g).map_err(CliError::new)?;
            let reduced = reduce_zpoint(&zeta, &ring).map_err(CliError::new)?;
            let quad = phi_fiber_local(&frame, &reduced, &ring).map_err(CliError::new)?;
            Some(LocalQuadJson {
                p,
                precision: ring.precision(),
                certified: quad.certified_precision,
                x: residue_matrix_to_json(quad.x.matrix()),
                y: residue_matrix_to_json(quad.y.matrix()),
                z: residue_matrix_to_json(quad.z.matrix()),
                u: residue_matrix_to_json(quad.u.matrix()),
            })
        }
        Some(_) => return Err(CliError::new("--local expects two values: P N")),
        None => None,
    };
    let cert = Certificate::Borovoi(Box::new(build_borovoi_cert(&form, &cert, local_json)));
    emit(&cert, output)?;
    Ok(0)
}

fn cmd_sap(
    form_path: &Path,
    value: &str,
    places: &str,
    witness: &str,
    output: &Path,
) -> Result<i32, CliError> {
    let form = load_form(form_path)?;
    let value = rat_from_str(value).map_err(CliError::new)?;
    let places = parse_places(places)?;
    let witness = parse_rat_list(witness, "witness")?;
    let verdict =
        strong_approx_quadric(&form, &value, &places, &witness).map_err(CliError::new)?;
    let holds = verdict.holds;
    let cert = Certificate::Sap(build_sap_cert(&form, &value, &places, &witness, &verdict));
    emit(&cert, output)?;
    Ok(if holds { 0 } else { 1 })
}

fn cmd_invariants(form_path: &Path, factor_bound: u64, output: &Path) -> Result<i32, CliError> {
    let form = load_form(form_path)?;
    let (_, diag) = congruent_diagonalize(&wittkit::arith::RatField, form.gram())
        .map_err(CliError::new)?;
    let places = relevant_places(&diag, factor_bound).map_err(CliError::new)?;
    let mut reports = Vec::new();
    for place in places {
        let inv = local_invariants(&form, place, factor_bound).map_err(CliError::new)?;
        reports.push(InvariantReportJson {
            place: PlaceJson::of(place),
            disc: inv.discriminant.representative().to_string(),
            hasse: inv.hasse,
            witt_index: inv.witt_index,
        });
    }
    let cert = Certificate::Invariants(InvariantsCert {
        form: FormJson::of(&form),
        factor_bound,
        reports,
    });
    emit(&cert, output)?;
    Ok(0)
}

fn cmd_verify(cert_path: &Path, factor_bound: u64) -> Result<i32, CliError> {
    let text = read_text(cert_path)?;
    let cert = match parse_certificate(&text) {
        Ok(c) => c,
        Err(e) => return Err(CliError::new(format!("{}: {e}", cert_path.display()))),
    };
    match verify_certificate(&cert, factor_bound) {
        Ok(()) => {
            println!("verified: {}", summary(&cert));
            Ok(0)
        }
        Err(e) => {
            println!("rejected: {e}");
            Ok(1)
        }
    }
}

fn cmd_selftest(seed: u64) -> i32 {
    use wittkit::sampling::*;
    let mut failures = 0usize;
    let mut report = |name: &str, ok: bool| {
        println!("{} {}", if ok { "PASS" } else { "FAIL" }, name);
        if !ok {
            failures += 1;
        }
    };

    // Witt extension soundness, reduced size.
    let ok = (0..10).all(|i| {
        let mut rng = seeded_rng(seed.wrapping_add(i));
        let inst = random_witt_instance(&mut rng, i % 3 == 0);
        match witt_extend(&inst.form, &inst.sources, &inst.targets) {
            Ok(map) => inst
                .sources
                .iter()
                .zip(&inst.targets)
                .all(|(a, b)| &map.apply(a) == b),
            Err(_) => false,
        }
    });
    report("witt-extension soundness (10 instances)", ok);

    // Lattice transporter engine at p = 3, N = 12.
    let ok = (0..4).all(|i| {
        let mut rng = seeded_rng(seed.wrapping_add(100 + i));
        let problem = random_transporter_problem(&mut rng, 3, 16);
        witt_lift(&problem, 12).is_ok()
    });
    report("lattice transporter lift (4 instances)", ok);

    // Orbit criterion negative case: e1 vs 3 e1 in a standard lattice.
    let ok = {
        let form = QuadraticForm::standard(&[
            wittkit::arith::rat_i64(1),
            wittkit::arith::rat_i64(1),
            wittkit::arith::rat_i64(1),
        ])
        .unwrap();
        match residue_lattice(&form, 3, 6) {
            Ok((ring, lattice)) => {
                let mut e1: VectorPN = vec![ring.zero(); 5];
                e1[0] = ring.one();
                let mut e1_scaled: VectorPN = vec![ring.zero(); 5];
                e1_scaled[0] = ring.from_i64(3);
                matches!(
                    orbit_test(&lattice, &e1, &e1_scaled, 4),
                    Ok(OrbitOutcome::LevelMismatch { .. })
                )
            }
            Err(_) => false,
        }
    };
    report("orbit criterion level mismatch", ok);

    // Borovoi round trip on three seeds.
    let ok = (0..3).all(|i| {
        let form = QuadraticForm::standard(&[
            wittkit::arith::rat_i64(1),
            wittkit::arith::rat_i64(1),
            wittkit::arith::rat_i64(1),
        ])
        .unwrap();
        let frame = StandardFrame::new(form).unwrap();
        let g = wittkit::borovoi::random_spinor_kernel_element(&frame, seed.wrapping_add(i), 5);
        decompose(&frame, &g)
            .map(|c| wittkit::borovoi::verify_certificate(&frame, &c).is_ok())
            .unwrap_or(false)
    });
    report("borovoi decomposition round trip (3 seeds)", ok);

    // Hilbert product formula on 100 pairs.
    let ok = {
        let mut rng = seeded_rng(seed.wrapping_add(999));
        (0..100).all(|_| {
            let x = wittkit::arith::rat_i64(random_nonzero(&mut rng, 500));
            let y = wittkit::arith::rat_i64(random_nonzero(&mut rng, 500));
            product_formula_holds(&x, &y)
        })
    };
    report("hilbert product formula (100 pairs)", ok);

    // SAP verdicts on the two canonical instances.
    let ok = {
        let diag = |xs: &[i64]| {
            QuadraticForm::from_gram(wittkit::arith::Matrix::from_fn(
                xs.len(),
                xs.len(),
                |i, j| {
                    if i == j {
                        wittkit::arith::rat_i64(xs[i])
                    } else {
                        wittkit::arith::rat_i64(0)
                    }
                },
            ))
            .unwrap()
        };
        let f3 = diag(&[1, 1, -2]);
        let w3 = vec![
            wittkit::arith::rat_i64(1),
            wittkit::arith::rat_i64(0),
            wittkit::arith::rat_i64(0),
        ];
        let negative = strong_approx_quadric(
            &f3,
            &wittkit::arith::rat_i64(1),
            &[PlaceQ::Real],
            &w3,
        )
        .map(|v| !v.holds)
        .unwrap_or(false);
        let f4 = diag(&[1, 1, 1, -2]);
        let w4 = vec![
            wittkit::arith::rat_i64(1),
            wittkit::arith::rat_i64(0),
            wittkit::arith::rat_i64(0),
            wittkit::arith::rat_i64(0),
        ];
        let positive = strong_approx_quadric(
            &f4,
            &wittkit::arith::rat_i64(1),
            &[PlaceQ::Real],
            &w4,
        )
        .map(|v| v.holds)
        .unwrap_or(false);
        negative && positive
    };
    report("strong approximation canonical verdicts", ok);

    if failures == 0 {
        println!("selftest: all suites passed");
        0
    } else {
        println!("selftest: {failures} suite(s) failed");
        1
    }
}

fn product_formula_holds(x: &Rat, y: &Rat) -> bool {
    use wittkit::local_global::{hilbert_symbol, relevant_symbol_places};
    let places = match relevant_symbol_places(x, y, 100_000) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let mut product = 1i32;
    for place in places {
        match hilbert_symbol(x, y, place) {
            Ok(s) => product *= s,
            Err(_) => return false,
        }
    }
    product == 1
}
