//! Self-contained certificate files and their independent verifier.
//!
//! A certificate embeds the toolkit version and the full input, so a third
//! party can re-check every claim from the file alone. Verification never
//! trusts a payload: all memberships, products and congruences are
//! recomputed; a single perturbed entry is rejected.

use crate::arith::{factorize, mat_mul, mat_vec, rat_from_str, rat_to_string, Rat};
use crate::borovoi::{
    verify_certificate as verify_borovoi, verify_local_quadruple, BorovoiCertificate, LocalZPoint,
    StandardFrame, ZPoint,
};
use crate::io::{
    parse_rat, parse_rat_matrix, parse_rat_vec, parse_residue_matrix, parse_residue_vec,
    parse_ring, rat_matrix_to_json, rat_vec_to_json, residue_matrix_to_json, residue_vec_to_json,
    FormJson, IoError, MapJson,
};
use crate::lattice::{
    det_sign, level, matrices_congruent, vectors_congruent, UnimodularLatticeZp,
};
use crate::local_global::{
    local_invariants, strong_approx_quadric, PlaceQ, SapReason, SapVerdict,
};
use crate::quad::{signature, QuadraticForm};
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CertError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("verification failed: {0}")]
    CheckFailed(String),
}

fn check(ok: bool, what: &str) -> Result<(), CertError> {
    if ok {
        Ok(())
    } else {
        Err(CertError::CheckFailed(what.to_string()))
    }
}

/// A place in certificate JSON: "real" or the prime as a number.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PlaceJson {
    Prime(u64),
    Name(String),
}

impl PlaceJson {
    pub fn of(place: PlaceQ) -> Self {
        match place {
            PlaceQ::Real => PlaceJson::Name("real".into()),
            PlaceQ::Finite(p) => PlaceJson::Prime(p),
        }
    }

    pub fn to_place(&self) -> Result<PlaceQ, IoError> {
        match self {
            PlaceJson::Name(s) if s == "real" => Ok(PlaceQ::Real),
            PlaceJson::Name(s) => Err(IoError::BadField {
                field: "place".into(),
                reason: format!("unknown place {s}"),
            }),
            PlaceJson::Prime(p) => PlaceQ::finite(*p).map_err(|e| IoError::BadField {
                field: "place".into(),
                reason: e.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WittCert {
    pub form: FormJson,
    pub sources: Vec<Vec<String>>,
    pub targets: Vec<Vec<String>>,
    pub map: MapJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftChecks {
    pub orthogonality_level: u32,
    pub transport_level: u32,
    pub det: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftCert {
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub gram: Vec<Vec<String>>,
    pub sources: Vec<Vec<String>>,
    pub targets: Vec<Vec<String>>,
    #[serde(rename = "X")]
    pub x: Vec<Vec<String>>,
    pub checks: LiftChecks,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitCert {
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub gram: Vec<Vec<String>>,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub found: bool,
    /// (level of a, level of b); present on every verdict.
    pub levels: (u32, u32),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(rename = "X", skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transport_level: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalQuadJson {
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub certified: u32,
    pub x: Vec<Vec<String>>,
    pub y: Vec<Vec<String>>,
    pub z: Vec<Vec<String>>,
    pub u: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BorovoiCertJson {
    pub form: FormJson,
    pub g: MapJson,
    pub x: MapJson,
    pub y: MapJson,
    pub z: MapJson,
    pub u: MapJson,
    pub s: Vec<String>,
    pub t: Vec<String>,
    pub denominator_lcm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_primes: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local: Option<LocalQuadJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SapCert {
    pub form: FormJson,
    pub value: String,
    pub places: Vec<PlaceJson>,
    pub witness: Vec<String>,
    pub holds: bool,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_place: Option<PlaceJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantReportJson {
    pub place: PlaceJson,
    pub disc: String,
    pub hasse: i32,
    pub witt_index: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantsCert {
    pub form: FormJson,
    pub factor_bound: u64,
    pub reports: Vec<InvariantReportJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizeCert {
    pub input: FormJson,
    pub output: FormJson,
    pub transform: Vec<Vec<String>>,
    pub scale: String,
}

/// Typed certificate payloads.
#[derive(Debug, Clone)]
pub enum Certificate {
    Witt(WittCert),
    Lift(LiftCert),
    Orbit(OrbitCert),
    Borovoi(Box<BorovoiCertJson>),
    Sap(SapCert),
    Invariants(InvariantsCert),
    Normalize(NormalizeCert),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Witt(_) => "witt",
            Certificate::Lift(_) => "lift",
            Certificate::Orbit(_) => "orbit",
            Certificate::Borovoi(_) => "borovoi",
            Certificate::Sap(_) => "sap",
            Certificate::Invariants(_) => "invariants",
            Certificate::Normalize(_) => "normalize",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CertificateEnvelope {
    kind: String,
    version: String,
    payload: serde_json::Value,
}

pub fn certificate_to_string(cert: &Certificate) -> String {
    let payload = match cert {
        Certificate::Witt(c) => serde_json::to_value(c),
        Certificate::Lift(c) => serde_json::to_value(c),
        Certificate::Orbit(c) => serde_json::to_value(c),
        Certificate::Borovoi(c) => serde_json::to_value(c),
        Certificate::Sap(c) => serde_json::to_value(c),
        Certificate::Invariants(c) => serde_json::to_value(c),
        Certificate::Normalize(c) => serde_json::to_value(c),
    }
    .expect("payloads are serializable");
    let envelope = CertificateEnvelope {
        kind: cert.kind().to_string(),
        version: crate::TOOLKIT_VERSION.to_string(),
        payload,
    };
    serde_json::to_string_pretty(&envelope).expect("serializable")
}

/// Parse a certificate file; the payload is decoded strictly by kind.
pub fn parse_certificate(text: &str) -> Result<Certificate, IoError> {
    if text.len() > 64 << 20 {
        return Err(IoError::LimitExceeded("certificate file too large".into()));
    }
    let envelope: CertificateEnvelope =
        serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    let payload = envelope.payload;
    let decode_err = |e: serde_json::Error| IoError::Json(e.to_string());
    match envelope.kind.as_str() {
        "witt" => Ok(Certificate::Witt(
            serde_json::from_value(payload).map_err(decode_err)?,
        )),
        "lift" => Ok(Certificate::Lift(
            serde_json::from_value(payload).map_err(decode_err)?,
        )),
        "orbit" => Ok(Certificate::Orbit(
            serde_json::from_value(payload).map_err(decode_err)?,
        )),
        "borovoi" => Ok(Certificate::Borovoi(
            serde_json::from_value(payload).map_err(decode_err)?,
        )),
        "sap" => Ok(Certificate::Sap(
            serde_json::from_value(payload).map_err(decode_err)?,
        )),
        "invariants" => Ok(Certificate::Invariants(
            serde_json::from_value(payload).map_err(decode_err)?,
        )),
        "normalize" => Ok(Certificate::Normalize(
            serde_json::from_value(payload).map_err(decode_err)?,
        )),
        other => Err(IoError::UnknownKind(other.to_string())),
    }
}

/// Recompute every claim in the certificate; the first failing check is
/// reported by name.
pub fn verify_certificate(cert: &Certificate, factor_bound: u64) -> Result<(), CertError> {
    match cert {
        Certificate::Witt(c) => verify_witt(c),
        Certificate::Lift(c) => verify_lift(c),
        Certificate::Orbit(c) => verify_orbit(c),
        Certificate::Borovoi(c) => verify_borovoi_cert(c, factor_bound),
        Certificate::Sap(c) => verify_sap(c, factor_bound),
        Certificate::Invariants(c) => verify_invariants(c),
        Certificate::Normalize(c) => verify_normalize(c),
    }
}

fn verify_witt(c: &WittCert) -> Result<(), CertError> {
    let form = c.form.to_form()?;
    let map = c.map.to_map(&form)?;
    check(
        c.sources.len() == c.targets.len(),
        "source and target counts agree",
    )?;
    for (src, tgt) in c.sources.iter().zip(c.targets.iter()) {
        let a = parse_rat_vec("sources", src)?;
        let b = parse_rat_vec("targets", tgt)?;
        check(a.len() == form.dim() && b.len() == form.dim(), "vector sizes")?;
        check(map.apply(&a) == b, "map transports each source to its target")?;
    }
    if let Some(claimed_class) = c.map.spinor_norm {
        let computed = crate::quad::spinor_norm(&form, &map)
            .map_err(|e| CertError::CheckFailed(format!("spinor norm claim unverifiable: {e}")))?;
        check(
            computed.representative().to_i64() == Some(claimed_class),
            "claimed spinor norm matches",
        )?;
    }
    Ok(())
}

fn verify_lift(c: &LiftCert) -> Result<(), CertError> {
    let ring = parse_ring(c.p, c.precision)?;
    let gram = parse_residue_matrix("gram", &c.gram, &ring)?;
    let lattice = UnimodularLatticeZp::new(ring.clone(), gram)
        .map_err(|e| CertError::CheckFailed(format!("lattice: {e}")))?;
    let x = parse_residue_matrix("X", &c.x, &ring)?;
    check(
        c.checks.orthogonality_level <= c.precision && c.checks.transport_level <= c.precision,
        "check levels within the stated precision",
    )?;
    let lhs = mat_mul(&ring, &mat_mul(&ring, &x.transpose(), lattice.gram()), &x);
    check(
        matrices_congruent(&ring, &lhs, lattice.gram(), c.checks.orthogonality_level),
        "orthogonality congruence",
    )?;
    check(
        c.sources.len() == c.targets.len(),
        "source and target counts agree",
    )?;
    for (src, tgt) in c.sources.iter().zip(c.targets.iter()) {
        let a = parse_residue_vec("sources", src, &ring)?;
        let b = parse_residue_vec("targets", tgt, &ring)?;
        check(a.len() == lattice.dim() && b.len() == lattice.dim(), "vector sizes")?;
        check(
            vectors_congruent(&ring, &mat_vec(&ring, &x, &a), &b, c.checks.transport_level),
            "transport congruence",
        )?;
    }
    let sign = det_sign(&ring, &x).map_err(|e| CertError::CheckFailed(format!("det: {e}")))?;
    let claimed = if c.checks.det == "+1" { 1 } else { -1 };
    check(sign == claimed, "determinant sign")?;
    Ok(())
}

fn verify_orbit(c: &OrbitCert) -> Result<(), CertError> {
    let ring = parse_ring(c.p, c.precision)?;
    let gram = parse_residue_matrix("gram", &c.gram, &ring)?;
    let lattice = UnimodularLatticeZp::new(ring.clone(), gram)
        .map_err(|e| CertError::CheckFailed(format!("lattice: {e}")))?;
    let a = parse_residue_vec("a", &c.a, &ring)?;
    let b = parse_residue_vec("b", &c.b, &ring)?;
    check(a.len() == lattice.dim() && b.len() == lattice.dim(), "vector sizes")?;
    check(
        ring.congruent_at(&lattice.evaluate(&a), &lattice.evaluate(&b), c.precision),
        "f-values agree mod p^N",
    )?;
    let la = level(&lattice, &a).map_err(|e| CertError::CheckFailed(e.to_string()))?;
    let lb = level(&lattice, &b).map_err(|e| CertError::CheckFailed(e.to_string()))?;
    check((la, lb) == c.levels, "claimed levels")?;
    if c.found {
        let x = c
            .x
            .as_ref()
            .ok_or_else(|| CertError::CheckFailed("transporter missing".into()))?;
        let x = parse_residue_matrix("X", x, &ring)?;
        let t_level = c
            .transport_level
            .ok_or_else(|| CertError::CheckFailed("transport level missing".into()))?;
        check(t_level <= c.precision, "transport level within precision")?;
        let lhs = mat_mul(&ring, &mat_mul(&ring, &x.transpose(), lattice.gram()), &x);
        check(
            matrices_congruent(&ring, &lhs, lattice.gram(), t_level),
            "orthogonality congruence",
        )?;
        check(
            vectors_congruent(&ring, &mat_vec(&ring, &x, &a), &b, t_level),
            "transport congruence",
        )?;
    } else {
        // The negative verdict must be reproducible: either the levels
        // differ, or the primitive parts take different f-values.
        if la == lb {
            let reduced = c.precision - la;
            let lat_r = lattice.at_precision(reduced);
            let ring_r = lat_r.ring().clone();
            let red = |v: &[num_bigint::BigUint]| -> Vec<num_bigint::BigUint> {
                v.iter()
                    .map(|e| ring.divide_by_p_pow(&(e % ring.modulus()), la) % ring_r.modulus())
                    .collect()
            };
            let a0 = red(&a);
            let b0 = red(&b);
            check(
                !ring_r.congruent_at(&lat_r.evaluate(&a0), &lat_r.evaluate(&b0), reduced),
                "negative verdict reproducible",
            )?;
        }
    }
    Ok(())
}

fn verify_borovoi_cert(c: &BorovoiCertJson, factor_bound: u64) -> Result<(), CertError> {
    let form = c.form.to_form()?;
    let frame = StandardFrame::new(form.clone())
        .map_err(|e| CertError::CheckFailed(format!("frame: {e}")))?;
    let cert = BorovoiCertificate {
        g: c.g.to_map(&form)?,
        x: c.x.to_map(&form)?,
        y: c.y.to_map(&form)?,
        z: c.z.to_map(&form)?,
        u: c.u.to_map(&form)?,
        s: parse_rat_vec("s", &c.s)?,
        t: parse_rat_vec("t", &c.t)?,
    };
    verify_borovoi(&frame, &cert).map_err(|e| CertError::CheckFailed(e.to_string()))?;
    let lcm = cert.denominator_lcm();
    check(
        lcm.to_string() == c.denominator_lcm,
        "denominator lcm matches",
    )?;
    if let Some(s_primes) = &c.s_primes {
        // Declared S-integrality: the denominator support must lie in S.
        let f = factorize(&lcm, factor_bound)
            .map_err(|e| CertError::CheckFailed(format!("lcm factorization: {e}")))?;
        for (p, _) in &f.factors {
            let p = p
                .to_u64()
                .ok_or_else(|| CertError::CheckFailed("denominator prime too large".into()))?;
            check(
                s_primes.contains(&p),
                "denominator support contained in the declared S",
            )?;
        }
    }
    if let Some(local) = &c.local {
        let ring = parse_ring(local.p, local.precision)?;
        check(
            local.certified + 2 == local.precision,
            "local certified level is N - 2",
        )?;
        let zeta = ZPoint::new(&frame, cert.g.clone(), cert.s.clone(), cert.t.clone())
            .map_err(|e| CertError::CheckFailed(format!("Z membership: {e}")))?;
        let reduced = crate::borovoi::reduce_zpoint(&zeta, &ring)
            .map_err(|e| CertError::CheckFailed(e.to_string()))?;
        let out_ring = parse_ring(local.p, local.certified)?;
        let matrices = [
            parse_residue_matrix("local.x", &local.x, &out_ring)?,
            parse_residue_matrix("local.y", &local.y, &out_ring)?,
            parse_residue_matrix("local.z", &local.z, &out_ring)?,
            parse_residue_matrix("local.u", &local.u, &out_ring)?,
        ];
        let reduced_zeta = LocalZPoint {
            g: reduced.g.map(|e| e % out_ring.modulus()),
            s: reduced.s.iter().map(|e| e % out_ring.modulus()).collect(),
            t: reduced.t.iter().map(|e| e % out_ring.modulus()).collect(),
        };
        verify_local_quadruple(&frame, &reduced_zeta, &matrices, &out_ring)
            .map_err(|e| CertError::CheckFailed(format!("local quadruple: {e}")))?;
    }
    Ok(())
}

fn verify_sap(c: &SapCert, factor_bound: u64) -> Result<(), CertError> {
    let _ = factor_bound;
    let form = c.form.to_form()?;
    let value = parse_rat("value", &c.value)?;
    let witness = parse_rat_vec("witness", &c.witness)?;
    let places: Result<Vec<PlaceQ>, IoError> = c.places.iter().map(|p| p.to_place()).collect();
    let places = places?;
    let verdict = strong_approx_quadric(&form, &value, &places, &witness)
        .map_err(|e| CertError::CheckFailed(format!("hypothesis: {e}")))?;
    check(verdict.holds == c.holds, "verdict")?;
    check(verdict.reason.to_string() == c.reason, "reason")?;
    let witness_place = match &verdict.reason {
        SapReason::WitnessPlace(v) => Some(PlaceJson::of(*v)),
        _ => None,
    };
    check(witness_place == c.witness_place, "witness place")?;
    Ok(())
}

fn verify_invariants(c: &InvariantsCert) -> Result<(), CertError> {
    let form = c.form.to_form()?;
    for report in &c.reports {
        let place = report.place.to_place()?;
        let inv = local_invariants(&form, place, c.factor_bound)
            .map_err(|e| CertError::CheckFailed(e.to_string()))?;
        check(
            inv.discriminant.representative().to_string() == report.disc,
            "discriminant",
        )?;
        check(inv.hasse == report.hasse, "hasse invariant")?;
        check(inv.witt_index == report.witt_index, "witt index")?;
    }
    Ok(())
}

fn verify_normalize(c: &NormalizeCert) -> Result<(), CertError> {
    let input = c.input.to_form()?;
    let output = c.output.to_form()?;
    let t = parse_rat_matrix("transform", &c.transform)?;
    let scale: Rat = match c.scale.as_str() {
        "+1" => rat_from_str("1").unwrap(),
        "-1" => rat_from_str("-1").unwrap(),
        other => {
            return Err(CertError::CheckFailed(format!(
                "scale must be +1 or -1, got {other}"
            )))
        }
    };
    check(output.is_standard_shape(), "output in standard shape")?;
    let alphas = output.standard_coeffs().expect("standard");
    check(
        alphas.iter().all(|a| a.is_integer()),
        "integer coefficients",
    )?;
    check(
        alphas[alphas.len() - 1].is_positive() && alphas[alphas.len() - 2].is_positive(),
        "last two coefficients positive",
    )?;
    let (plus, minus) = signature(&output);
    check(plus >= minus, "n+ >= n- after scaling")?;
    let q = crate::arith::RatField;
    let lhs = mat_mul(&q, &mat_mul(&q, &t.transpose(), output.gram()), &t);
    let rhs = input.gram().map(|x| x * &scale);
    check(lhs == rhs, "conjugation identity t(T) G_new T = s G_old")?;
    Ok(())
}

/// Rendered one-line summaries for stdout.
pub fn summary(cert: &Certificate) -> String {
    match cert {
        Certificate::Witt(c) => format!(
            "witt: {} vector(s) transported, det {}",
            c.sources.len(),
            c.map.det
        ),
        Certificate::Lift(c) => format!(
            "lift: p={} N={} det {} transport mod p^{}",
            c.p, c.precision, c.checks.det, c.checks.transport_level
        ),
        Certificate::Orbit(c) => {
            if c.found {
                format!("orbit: transporter found at p={} mod p^{}", c.p, c.precision)
            } else {
                format!(
                    "orbit: no transporter (levels {} vs {})",
                    c.levels.0, c.levels.1
                )
            }
        }
        Certificate::Borovoi(c) => format!(
            "borovoi: four factors, denominator lcm {}{}",
            c.denominator_lcm,
            if c.local.is_some() { ", with local quadruple" } else { "" }
        ),
        Certificate::Sap(c) => format!("sap: holds={} ({})", c.holds, c.reason),
        Certificate::Invariants(c) => format!("invariants: {} place(s)", c.reports.len()),
        Certificate::Normalize(c) => format!(
            "normalize: dimension {}, scale {}",
            c.transform.len(),
            c.scale
        ),
    }
}

/// Convenience: the Z-point behind a borovoi payload, for reuse by local
/// construction in the CLI.
pub fn borovoi_zpoint(c: &BorovoiCertJson) -> Result<(StandardFrame, ZPoint), CertError> {
    let form = c.form.to_form()?;
    let frame = StandardFrame::new(form.clone())
        .map_err(|e| CertError::CheckFailed(format!("frame: {e}")))?;
    let g = c.g.to_map(&form)?;
    let zeta = ZPoint::new(
        &frame,
        g,
        parse_rat_vec("s", &c.s)?,
        parse_rat_vec("t", &c.t)?,
    )
    .map_err(|e| CertError::CheckFailed(e.to_string()))?;
    Ok((frame, zeta))
}

// Builders used by the CLI.

pub fn build_witt_cert(
    form: &QuadraticForm,
    sources: &[Vec<Rat>],
    targets: &[Vec<Rat>],
    map: &crate::quad::OrthogonalMapQ,
) -> WittCert {
    WittCert {
        form: FormJson::of(form),
        sources: sources.iter().map(|v| rat_vec_to_json(v)).collect(),
        targets: targets.iter().map(|v| rat_vec_to_json(v)).collect(),
        map: MapJson::of(form, map),
    }
}

pub fn build_lift_cert(
    lattice: &UnimodularLatticeZp,
    sources: &[crate::arith::VectorPN],
    targets: &[crate::arith::VectorPN],
    map: &crate::lattice::OrthogonalMapZp,
) -> LiftCert {
    let ring = lattice.ring();
    let sign = det_sign(ring, map.matrix()).expect("orthogonal map has unit det");
    LiftCert {
        p: lattice.prime(),
        precision: map.certified_precision(),
        gram: residue_matrix_to_json(lattice.gram()),
        sources: sources.iter().map(residue_vec_to_json).collect(),
        targets: targets.iter().map(residue_vec_to_json).collect(),
        x: residue_matrix_to_json(map.matrix()),
        checks: LiftChecks {
            orthogonality_level: map.certified_precision(),
            transport_level: map.certified_precision(),
            det: if sign == 1 { "+1" } else { "-1" }.into(),
        },
    }
}

pub fn build_borovoi_cert(
    form: &QuadraticForm,
    cert: &BorovoiCertificate,
    local: Option<LocalQuadJson>,
) -> BorovoiCertJson {
    BorovoiCertJson {
        form: FormJson::of(form),
        g: MapJson::of(form, &cert.g),
        x: MapJson::of(form, &cert.x),
        y: MapJson::of(form, &cert.y),
        z: MapJson::of(form, &cert.z),
        u: MapJson::of(form, &cert.u),
        s: rat_vec_to_json(&cert.s),
        t: rat_vec_to_json(&cert.t),
        denominator_lcm: cert.denominator_lcm().to_string(),
        s_primes: None,
        local,
    }
}

pub fn build_sap_cert(
    form: &QuadraticForm,
    value: &Rat,
    places: &[PlaceQ],
    witness: &[Rat],
    verdict: &SapVerdict,
) -> SapCert {
    SapCert {
        form: FormJson::of(form),
        value: rat_to_string(value),
        places: places.iter().map(|&p| PlaceJson::of(p)).collect(),
        witness: rat_vec_to_json(witness),
        holds: verdict.holds,
        reason: verdict.reason.to_string(),
        witness_place: match &verdict.reason {
            SapReason::WitnessPlace(v) => Some(PlaceJson::of(*v)),
            _ => None,
        },
    }
}

pub fn build_normalize_cert(
    input: &QuadraticForm,
    output: &QuadraticForm,
    transform: &crate::arith::MatrixQ,
    scale: i8,
) -> NormalizeCert {
    NormalizeCert {
        input: FormJson::of(input),
        output: FormJson::of(output),
        transform: rat_matrix_to_json(transform),
        scale: if scale == 1 { "+1" } else { "-1" }.into(),
    }
}
