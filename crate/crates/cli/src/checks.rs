//! Maps each scenario kind onto galilei-core verification routines.

use std::collections::BTreeMap;

use galilei_core::composite::{canonical_transform_is_symplectic, verify_ccr_composite};
use galilei_core::dynamics::{
    compare_flows, evolve_state, extra_casimir_check, hamiltonian_galilei, hamiltonian_physical, max_drift,
    phase_distance, picture_discrepancies, ehrenfest_residual, relative_spin_flow, rotation_invariance_defect,
    EvolveOptions, FlowResult, Method, RelativeFlowConfig, System,
};
use galilei_core::exact::{rational, ComplexRational};
use galilei_core::lie::{check_jacobi, subalgebra_check, AlgebraDescriptor, CatalogId, LieAlgebra};
use galilei_core::linalg::{c, commutator, identity, max_abs, re, CMatrix};
use galilei_core::rep::{
    boost_conjugation_defect, build_zeta_rep, rotation_covariance_defect, truncated_ccr, verify_homomorphism,
    Realization,
};
use galilei_core::spin::{
    casimir_spectrum, casimir_spin_value, decompose_product_spins, relative_spin_spectrum, spin_matrices,
    t_tensor, triangle_size, CasimirSpectrum,
};
use galilei_core::uea::{casimir_candidates, check_central, commutator_uea, CasimirCandidate, PbwPolynomial};
use galilei_core::{CompositeRep, ParticleRep, Spin};
use serde_json::{json, Value};

use crate::anchors::Anchor;
use crate::report::{CheckRecord, Status};
use crate::scenario::{
    AlgebraPayload, CompositePayload, DynamicsPayload, Payload, RepPayload, SpectrumPayload, SystemSpec,
    UeaPayload,
};
use crate::tolerances::Tolerances;
use crate::ConfigError;

pub fn run_payload(payload: &Payload, tol: &Tolerances) -> Result<Vec<CheckRecord>, ConfigError> {
    match payload {
        Payload::Algebra(p) => algebra(p),
        Payload::Uea(p) => uea(p),
        Payload::SingleRep(p) => single_rep(p, tol),
        Payload::Composite(p) => composite(p, tol),
        Payload::Spectrum(p) => spectrum(p, tol),
        Payload::Dynamics(p) => dynamics(p, tol),
    }
}

fn at<E: std::fmt::Display>(path: &str) -> impl Fn(E) -> ConfigError + '_ {
    move |e| ConfigError::at(path, e.to_string())
}

fn load_algebra(
    name: Option<&str>,
    desc: Option<&AlgebraDescriptor>,
    name_key: &str,
) -> Result<(LieAlgebra, Option<CatalogId>), ConfigError> {
    match (name, desc) {
        (Some(n), None) => {
            let id: CatalogId = n.parse().map_err(at(&format!("payload.{name_key}")))?;
            Ok((LieAlgebra::catalog(id), Some(id)))
        }
        (None, Some(d)) => Ok((LieAlgebra::from_descriptor(d).map_err(at("payload.descriptor"))?, None)),
        _ => Err(ConfigError::at("payload", format!("give exactly one of `{name_key}` or `descriptor`"))),
    }
}

fn within(value: f64, tol: f64) -> bool {
    value.is_finite() && value <= tol
}

// ---------------------------------------------------------------- algebra

fn algebra(p: &AlgebraPayload) -> Result<Vec<CheckRecord>, ConfigError> {
    let (alg, _) = load_algebra(p.name.as_deref(), p.descriptor.as_ref(), "name")?;
    let mut out = vec![CheckRecord::from_report(format!("jacobi[{}]", alg.name), Anchor::Jacobi, &check_jacobi(&alg))];
    for (k, subset) in p.subalgebras.iter().enumerate() {
        let names: Vec<&str> = subset.iter().map(String::as_str).collect();
        let r = subalgebra_check(&alg, &names).map_err(at(&format!("payload.subalgebras[{k}]")))?;
        out.push(CheckRecord::from_report(
            format!("subalgebra[{}]{{{}}}", alg.name, names.join(",")),
            Anchor::Subalgebra,
            &r,
        ));
    }
    Ok(out)
}

// -------------------------------------------------------------------- uea

fn candidate_anchor(name: &str) -> Anchor {
    match name {
        "M" => Anchor::MassCentral,
        "half_T_squared" => Anchor::SpinCasimirCentral,
        "galilei_casimir" => Anchor::GalileiCasimirCentral,
        _ => Anchor::Centrality,
    }
}

fn uea(p: &UeaPayload) -> Result<Vec<CheckRecord>, ConfigError> {
    let (alg, id) = load_algebra(p.algebra.as_deref(), p.descriptor.as_ref(), "algebra")?;
    let mut candidates: Vec<CasimirCandidate> = Vec::new();
    match (id, &p.candidates) {
        (Some(id), wanted) => {
            let all = casimir_candidates(id).map_err(at("payload.algebra"))?;
            match wanted {
                None => candidates = all,
                Some(names) => {
                    for (k, n) in names.iter().enumerate() {
                        let c = all.iter().find(|c| &c.name == n).ok_or_else(|| {
                            ConfigError::at(format!("payload.candidates[{k}]"), format!("no catalog candidate `{n}` for {id}"))
                        })?;
                        candidates.push(c.clone());
                    }
                }
            }
        }
        (None, Some(_)) => {
            return Err(ConfigError::at("payload.candidates", "catalog candidates need a catalog algebra"));
        }
        (None, None) => {}
    }
    for (k, spec) in p.polynomials.iter().enumerate() {
        let mut poly = PbwPolynomial::zero();
        for (t, term) in spec.terms.iter().enumerate() {
            let path = format!("payload.polynomials[{k}].terms[{t}]");
            if term.den == 0 {
                return Err(ConfigError::at(path, "zero denominator"));
            }
            let r = rational(term.num, term.den);
            let coeff = if term.imaginary { ComplexRational::new(rational(0, 1), r) } else { ComplexRational::real(r) };
            let word: Vec<&str> = term.word.iter().map(String::as_str).collect();
            poly = poly.add(&PbwPolynomial::from_names(&alg, &word, coeff).map_err(at(&path))?);
        }
        candidates.push(CasimirCandidate { name: spec.name.clone(), polynomial: poly, algebra: alg.name.clone() });
    }

    let mut out = Vec::new();
    for cand in &candidates {
        let r = check_central(&alg, cand);
        let rec = CheckRecord::from_report(format!("centrality[{}]", cand.name), candidate_anchor(&cand.name), &r)
            .metric("exact", true);
        out.push(rec);
    }
    for (k, g) in p.noncentral.iter().enumerate() {
        let gi = alg.index_of(g).map_err(at(&format!("payload.noncentral[{k}]")))?;
        let gp = PbwPolynomial::generator(gi);
        let anchor = if g == "H" { Anchor::TimeTranslationNotCentral } else { Anchor::Centrality };
        let mut rec = CheckRecord::new(format!("noncentral[{g}]"), anchor);
        let mut nonzero = 0usize;
        for other in 0..alg.dim() {
            let rem = commutator_uea(&alg, &gp, &PbwPolynomial::generator(other));
            if !rem.is_zero() {
                nonzero += 1;
                rec.detail(format!("[{g}, {}] = {}", alg.name_of(other), rem.display(&alg)));
            }
        }
        let rec = rec.metric("nonzero_remainders", nonzero as f64).require(nonzero > 0, || format!("{g} is central"));
        out.push(rec);
    }
    Ok(out)
}

// ------------------------------------------------------------- single_rep

fn single_rep(p: &RepPayload, tol: &Tolerances) -> Result<Vec<CheckRecord>, ConfigError> {
    let cfg = p.rep.clone();
    let rep = ParticleRep::new(cfg.clone()).map_err(at("payload.rep"))?;
    let id: CatalogId = p.algebra.parse().map_err(at("payload.algebra"))?;
    if p.margin >= cfg.levels {
        return Err(ConfigError::at("payload.margin", format!("margin {} must be below levels {}", p.margin, cfg.levels)));
    }
    let hbar = rep.hbar();
    let mut out = Vec::new();

    let t = tol.get("homomorphism");
    let r = verify_homomorphism(&rep, &LieAlgebra::catalog(id), p.margin, t).map_err(at("payload"))?;
    out.push(CheckRecord::from_report(format!("homomorphism[{id}]"), Anchor::Homomorphism, &r));

    // raw commutator against the closed-form truncated value
    let t = tol.get("raw_ccr");
    let mut worst: f64 = 0.0;
    for axis in 0..cfg.dims {
        let raw = commutator(rep.x(axis), rep.p(axis));
        worst = worst.max(max_abs(&(raw - truncated_ccr(&rep, axis))));
    }
    out.push(
        CheckRecord::new("raw_ccr", Anchor::TruncatedCcr)
            .tol(t)
            .metric("max_deviation", worst)
            .metric("top_level_defect", hbar * cfg.levels as f64)
            .require(within(worst, t), || format!("raw [X, P] deviates from the truncated formula by {worst:.3e}")),
    );

    let t = tol.get("ccr");
    let proj = rep.interior_projector(1).map_err(at("payload.rep.levels"))?;
    let mut worst: f64 = 0.0;
    for i in 0..cfg.dims {
        for j in 0..cfg.dims {
            let mut d = commutator(rep.x(i), rep.p(j));
            if i == j {
                d -= identity(rep.dim()) * c(0.0, hbar);
            }
            worst = worst.max(proj.projected_norm(&d));
        }
    }
    out.push(
        CheckRecord::new("projected_ccr", Anchor::TruncatedCcr)
            .tol(t)
            .metric("margin", 1)
            .metric("max_defect", worst)
            .require(within(worst, t), || format!("projected [X_i, P_j] - iħδ_ij has norm {worst:.3e}")),
    );

    let scalar = identity(rep.dim()) * re(cfg.mass);
    let dev = max_abs(&(rep.mass_matrix() - &scalar));
    out.push(
        CheckRecord::new("mass_scalar", Anchor::MassScalar)
            .metric("mass", cfg.mass)
            .metric("max_deviation", dev)
            .require(rep.mass_matrix() == &scalar, || format!("M - m Id has entries up to {dev:.3e}")),
    );

    if cfg.dims == 3 {
        out.extend(spin_checks(&rep, p.margin, tol)?);
    }

    if let Some(b) = &p.boost {
        if b.len() != cfg.dims {
            return Err(ConfigError::at("payload.boost", format!("expected {} components", cfg.dims)));
        }
        let t = tol.get("boost");
        let d = boost_conjugation_defect(&rep, b, p.margin).map_err(at("payload"))?;
        out.push(
            CheckRecord::new("boost", Anchor::BoostShift)
                .tol(t)
                .metric("defect", d)
                .metric("margin", p.margin)
                .require(within(d, t), || format!("boosted momentum defect {d:.3e}")),
        );
    }
    if let Some(theta) = p.rotation_angle {
        if cfg.dims != 3 {
            return Err(ConfigError::at("payload.rotation_angle", "rotations need dims = 3"));
        }
        let t = tol.get("rotation");
        let d = rotation_covariance_defect(&rep, theta, p.margin).map_err(at("payload"))?;
        out.push(
            CheckRecord::new("rotation", Anchor::RotationCovariance)
                .tol(t)
                .metric("theta", theta)
                .metric("defect", d)
                .metric("margin", p.margin)
                .require(within(d, t), || format!("rotated boost defect {d:.3e}")),
        );
    }
    for (k, &z) in p.zeta.iter().enumerate() {
        let t = tol.get("zeta") * z.abs().max(1.0);
        let zr = build_zeta_rep(z, cfg.clone()).map_err(at(&format!("payload.zeta[{k}]")))?;
        let d = zr.ccr_defect(1).map_err(at("payload"))?;
        out.push(
            CheckRecord::new(format!("zeta[{z}]"), Anchor::ZetaCcr)
                .tol(t)
                .metric("defect", d)
                .require(within(d, t), || format!("[X_ζ, P_ζ] - iħζ has norm {d:.3e}")),
        );
    }
    Ok(out)
}

fn spin_checks(rep: &ParticleRep, margin: usize, tol: &Tolerances) -> Result<Vec<CheckRecord>, ConfigError> {
    let s = rep.config.spin;
    let hbar = rep.hbar();
    let mut out = Vec::new();

    let t = tol.get("spin_casimir");
    let sm = spin_matrices(s, hbar);
    let want = s.casimir() * hbar * hbar;
    let dev = max_abs(&(sm.half_casimir() - identity(sm.dim()) * re(want)));
    out.push(
        CheckRecord::new(format!("spin_casimir[s={}]", s.value()), Anchor::SpinCasimir)
            .tol(t)
            .metric("expected", want)
            .metric("max_deviation", dev)
            .require(within(dev, t), || format!("(1/2) S_ij S^ij - s(s+1)ħ² Id has entries up to {dev:.3e}")),
    );

    let tt = t_tensor(rep).map_err(at("payload.rep"))?;
    if s.twice() > 0 {
        let t = tol.get("t_tensor");
        let m = rep.mass();
        let dev = tt.iter().zip(rep.spin_blocks()).map(|(tk, sk)| max_abs(&(tk - sk * re(m)))).fold(0.0, f64::max);
        out.push(
            CheckRecord::new("t_equals_m_s", Anchor::InternalTensor)
                .tol(t)
                .metric("max_deviation", dev)
                .require(within(dev, t), || format!("T - m S has entries up to {dev:.3e}")),
        );
    } else {
        let t = tol.get("t_spinless");
        let proj = rep.interior_projector(margin).map_err(at("payload.margin"))?;
        let n = tt.iter().map(|tk| proj.projected_norm(tk)).fold(0.0, f64::max);
        out.push(
            CheckRecord::new("t_vanishes", Anchor::InternalTensor)
                .tol(t)
                .metric("projected_norm", n)
                .metric("margin", margin)
                .require(within(n, t), || format!("spinless T has projected norm {n:.3e}")),
        );
    }

    let t = tol.get("t_tensor");
    let rec = CheckRecord::new("spin_from_casimir", Anchor::SpinCasimir).tol(t);
    let rec = match casimir_spin_value(rep, margin, t) {
        Ok(v) => rec
            .metric("casimir_value", v.value)
            .metric("recovered_spin", v.s)
            .metric("deviation", v.deviation)
            .require((v.s - s.value()).abs() <= 1e-8, || format!("recovered spin {} differs from {}", v.s, s.value())),
        Err(e) => rec.require(false, || e.to_string()),
    };
    out.push(rec);
    Ok(out)
}

// -------------------------------------------------------------- composite

fn ccr_anchor(pair: &str) -> Anchor {
    match pair {
        "(X_com, P)" => Anchor::ComCcr,
        "(X_naive, P)" => Anchor::NaiveCcr,
        "(R, Q)" => Anchor::RelativeCcr,
        _ => Anchor::CrossCcr,
    }
}

fn composite(p: &CompositePayload, tol: &Tolerances) -> Result<Vec<CheckRecord>, ConfigError> {
    let (ca, cb) = p.configs("payload")?;
    let (ma, mb) = (ca.mass, cb.mass);
    let a = ParticleRep::new(ca).map_err(at("payload.particleA"))?;
    let b = ParticleRep::new(cb).map_err(at("payload.particleB"))?;
    let comp = CompositeRep::new(a, b).map_err(at("payload"))?;
    let levels = comp.a.config.levels.min(comp.b.config.levels);
    if p.margin == 0 || p.margin >= levels {
        return Err(ConfigError::at("payload.margin", format!("margin must lie in 1..{levels}")));
    }
    if p.homomorphism_margin >= levels {
        return Err(ConfigError::at("payload.homomorphism_margin", format!("must be below levels {levels}")));
    }
    let hbar = comp.hbar();
    let mut out = Vec::new();

    let scalar = identity(comp.dim()) * re(ma + mb);
    out.push(
        CheckRecord::new("mass_additivity", Anchor::MassAdditivity)
            .metric("total_mass", ma + mb)
            .metric("max_deviation", max_abs(&(comp.mass_matrix() - &scalar)))
            .require(comp.mass_matrix() == &scalar, || "M is not exactly (m_a + m_b) Id".into()),
    );

    let t = tol.get("ccr");
    for r in verify_ccr_composite(&comp, p.margin, t).map_err(at("payload.margin"))? {
        let mut rec = CheckRecord::new(format!("ccr{}", r.pair), ccr_anchor(&r.pair))
            .tol(t)
            .metric("coefficient", r.coefficient)
            .metric("coefficient_over_hbar", r.coefficient / hbar)
            .metric("expected", r.expected)
            .metric("diagonal_residual", r.diagonal_residual)
            .metric("off_diagonal_residual", r.off_diagonal_residual)
            .require(r.passed, || {
                format!("coefficient {} (expected {}), residuals {:.3e} / {:.3e}", r.coefficient, r.expected, r.diagonal_residual, r.off_diagonal_residual)
            });
        rec.non_physical = r.non_physical;
        out.push(rec);
    }

    out.push(
        CheckRecord::new("symplectic", Anchor::Symplectic)
            .metric("exact", true)
            .require(canonical_transform_is_symplectic(ma, mb), || "T Ω Tᵀ ≠ Ω".into()),
    );

    let t = tol.get("homomorphism");
    let r = verify_homomorphism(&comp, &LieAlgebra::catalog(CatalogId::Hr3), p.homomorphism_margin, t)
        .map_err(at("payload"))?;
    out.push(CheckRecord::from_report("homomorphism[hr3]", Anchor::Homomorphism, &r));
    Ok(out)
}

// --------------------------------------------------------------- spectrum

fn shells_json(spec: &CasimirSpectrum) -> Value {
    Value::Array(
        spec.shells
            .iter()
            .map(|s| {
                json!({
                    "n": s.n,
                    "levels": s.levels.iter().map(|l| json!({
                        "ell": l.ell,
                        "multiplicity": l.multiplicity,
                        "value": l.value,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

/// `2J → multiplicity` for orbital `ℓ ∈ {n, n−2, …}` coupled to both spins.
fn derived_shell(n: usize, s_a: Spin, s_b: Spin) -> BTreeMap<u32, usize> {
    let mut out = BTreeMap::new();
    for ell in (n % 2..=n).step_by(2) {
        for (j1, c1) in decompose_product_spins(Spin::from_twice(2 * ell as u32), s_a) {
            for (j, c2) in decompose_product_spins(j1, s_b) {
                *out.entry(j.twice()).or_insert(0) += c1 * c2 * j.multiplicity();
            }
        }
    }
    out
}

fn spectrum(p: &SpectrumPayload, tol: &Tolerances) -> Result<Vec<CheckRecord>, ConfigError> {
    if !(p.hbar.is_finite() && p.hbar > 0.0) {
        return Err(ConfigError::at("payload.hbar", "must be positive"));
    }
    let mut out = Vec::new();
    let spec = relative_spin_spectrum(p.n_max, p.s_a, p.s_b, p.hbar);
    let t = tol.get("label");
    let worst_rel = spec
        .eigenvalues
        .iter()
        .filter_map(|l| l.ell.map(|e| (l.value - e * (e + 1.0) * p.hbar * p.hbar).abs() / l.value.abs().max(1.0)))
        .fold(0.0, f64::max);
    let want_dim = triangle_size(p.n_max) * p.s_a.multiplicity() * p.s_b.multiplicity();
    let label = format!("relative_spectrum[n_max={},s_a={},s_b={}]", p.n_max, p.s_a.value(), p.s_b.value());
    out.push(
        CheckRecord::new(label, Anchor::RelativeSpectrum)
            .tol(t)
            .metric("max_relative_label_error", worst_rel)
            .metric("unmatched", spec.unmatched.len())
            .metric("dimension", spec.dimension())
            .metric("expected_dimension", want_dim)
            .metric("shells", shells_json(&spec))
            .require(within(worst_rel, t), || format!("label error {worst_rel:.3e}"))
            .require(spec.unmatched.is_empty(), || format!("unmatched eigenvalues {:?}", spec.unmatched))
            .require(spec.dimension() == want_dim, || format!("dimension {} != {want_dim}", spec.dimension())),
    );

    let mut rec = CheckRecord::new("shell_structure", Anchor::RelativeSpectrum)
        .metric("source", if p.expected_shells.is_some() { "scenario" } else { "coupling rule" });
    if let Some(exp) = &p.expected_shells {
        if exp.len() != spec.shells.len() {
            return Err(ConfigError::at(
                "payload.expected_shells",
                format!("expected {} shells for n_max = {}", spec.shells.len(), p.n_max),
            ));
        }
    }
    for shell in &spec.shells {
        let got: BTreeMap<u32, usize> = shell
            .levels
            .iter()
            .filter_map(|l| l.ell.map(|e| ((2.0 * e).round() as u32, l.multiplicity)))
            .collect();
        let want: BTreeMap<u32, usize> = match &p.expected_shells {
            Some(exp) => exp[shell.n].iter().map(|&(e, m)| ((2.0 * e).round() as u32, m)).collect(),
            None => derived_shell(shell.n, p.s_a, p.s_b),
        };
        if got != want {
            let fmt = |m: &BTreeMap<u32, usize>| {
                m.iter().map(|(t, k)| format!("{}:{k}", *t as f64 / 2.0)).collect::<Vec<_>>().join(", ")
            };
            rec.status = Status::Fail;
            rec.detail(format!("shell {}: got {{{}}}, expected {{{}}}", shell.n, fmt(&got), fmt(&want)));
        }
    }
    out.push(rec);

    for &(a, b) in &p.product_spins {
        let decomposition = decompose_product_spins(a, b);
        let got: BTreeMap<u32, usize> = decomposition.iter().map(|(s, n)| (s.twice(), *n)).collect();
        // brute force: label the spectrum of (S_a ⊗ 1 + 1 ⊗ S_b)²/2
        let (sa, sb) = (spin_matrices(a, p.hbar), spin_matrices(b, p.hbar));
        let (ia, ib) = (identity(sa.dim()), identity(sb.dim()));
        let comps: Vec<CMatrix> =
            (0..3).map(|k| sa.components()[k].kronecker(&ib) + ia.kronecker(&sb.components()[k])).collect();
        let brute = casimir_spectrum(&comps, p.hbar);
        let want: BTreeMap<u32, usize> = brute
            .eigenvalues
            .iter()
            .filter_map(|l| l.ell.map(|e| ((2.0 * e).round() as u32, l.multiplicity / ((2.0 * e).round() as usize + 1))))
            .collect();
        let dim: usize = decomposition.iter().map(|(s, n)| s.multiplicity() * n).sum();
        out.push(
            CheckRecord::new(format!("spin_addition[{}x{}]", a.value(), b.value()), Anchor::SpinAddition)
                .metric("spins", decomposition.iter().map(|(s, n)| json!([s.value(), n])).collect::<Vec<_>>())
                .metric("dimension", dim)
                .require(got == want, || format!("rule {got:?} vs diagonalization {want:?}"))
                .require(brute.unmatched.is_empty(), || "unlabelled total-spin eigenvalues".into())
                .require(dim == a.multiplicity() * b.multiplicity(), || format!("dimension sum {dim} is wrong")),
        );
    }
    Ok(out)
}

// --------------------------------------------------------------- dynamics

fn flow_records(flow: &FlowResult, tol: &Tolerances) -> Vec<CheckRecord> {
    let (tu, te) = (tol.get("unitarity"), tol.get("energy"));
    let (nd, ed) = (flow.max_norm_deviation, flow.max_energy_drift);
    vec![
        CheckRecord::new("unitarity", Anchor::Unitarity)
            .tol(tu)
            .metric("method", json!(flow.method))
            .metric("max_norm_deviation", nd)
            .require(within(nd, tu), || format!("norm drifts by {nd:.3e}")),
        CheckRecord::new("energy", Anchor::EnergyConservation)
            .tol(te)
            .metric("max_energy_drift", ed)
            .metric("initial_energy", flow.energy_trace.first().copied().unwrap_or(0.0))
            .require(within(ed, te), || format!("energy drifts by {ed:.3e}")),
        CheckRecord::new("truncation_guard", Anchor::TruncationGuard)
            .tol(tol.get("leakage"))
            .metric("max_boundary_population", flow.max_boundary_population)
            .warn_if(flow.unreliable, "top-level occupation exceeds the leakage threshold; result unreliable"),
    ]
}

fn options(hbar: f64, method: Method, boundary: Vec<usize>, tol: &Tolerances) -> EvolveOptions {
    let mut o = EvolveOptions::default().with_hbar(hbar).with_method(method).with_boundary(boundary);
    o.leakage_threshold = tol.get("leakage");
    o
}

fn picture_record(h: &CMatrix, ops: &[(String, CMatrix)], psi0: &galilei_core::linalg::CVector, t: f64, hbar: f64, tol: &Tolerances) -> Result<CheckRecord, ConfigError> {
    let tp = tol.get("picture");
    let mats: Vec<&CMatrix> = ops.iter().map(|(_, a)| a).collect();
    let worst = picture_discrepancies(h, &mats, psi0, t, hbar).map_err(at("payload"))?.into_iter().fold(0.0, f64::max);
    Ok(CheckRecord::new("picture", Anchor::PictureEquivalence)
        .tol(tp)
        .metric("observables", ops.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>())
        .metric("t", t)
        .metric("max_discrepancy", worst)
        .require(within(worst, tp), || format!("Schrödinger and Heisenberg expectations differ by {worst:.3e}")))
}

fn dynamics(p: &DynamicsPayload, tol: &Tolerances) -> Result<Vec<CheckRecord>, ConfigError> {
    if p.t_grid.steps == 0 || !(p.t_grid.t_max.is_finite() && p.t_grid.t_max > 0.0) {
        return Err(ConfigError::at("payload.t_grid", "needs t_max > 0 and steps ≥ 1"));
    }
    p.potential.validate().map_err(at("payload.potential"))?;
    match &p.system {
        SystemSpec::Single(cfg) => single_dynamics(p, ParticleRep::new(cfg.clone()).map_err(at("payload.system.single"))?, tol),
        SystemSpec::Composite { particle_a, particle_b } => {
            let a = ParticleRep::new(particle_a.clone()).map_err(at("payload.system.composite.particleA"))?;
            let b = ParticleRep::new(particle_b.clone()).map_err(at("payload.system.composite.particleB"))?;
            composite_dynamics(p, CompositeRep::new(a, b).map_err(at("payload.system.composite"))?, tol)
        }
        SystemSpec::Relative(r) => {
            if p.psi0.is_some() {
                return Err(ConfigError::at("payload.psi0", "relative flows use a fixed spread state"));
            }
            let cfg = RelativeFlowConfig {
                m_a: r.m_a,
                m_b: r.m_b,
                s_a: r.s_a,
                s_b: r.s_b,
                n_max: r.n_max,
                potential: p.potential.clone(),
                t_grid: p.t_grid,
                hbar: r.hbar,
                omega_ref: r.omega_ref,
            };
            let (flow, comm) = relative_spin_flow(&cfg).map_err(at("payload.system.relative"))?;
            let mut out = flow_records(&flow, tol);
            let tc = tol.get("casimir_drift");
            let drift = flow.casimir_trace.as_deref().map(max_drift).unwrap_or(f64::NAN);
            out.push(
                CheckRecord::new("spin_casimir_conservation", Anchor::SpinConservation)
                    .tol(tc)
                    .metric("max_drift", drift)
                    .metric("initial_value", flow.casimir_trace.as_ref().and_then(|c| c.first().copied()).unwrap_or(0.0))
                    .require(within(drift, tc), || format!("(1/2) S_ij S^ij drifts by {drift:.3e}")),
            );
            let tk = tol.get("commutator");
            out.push(
                CheckRecord::new("spin_commutes_with_h", Anchor::SpinConservation)
                    .tol(tk)
                    .metric("max_commutator_norm", comm)
                    .require(within(comm, tk), || format!("‖[H, S_ij]‖ = {comm:.3e}")),
            );
            Ok(out)
        }
    }
}

fn single_dynamics(p: &DynamicsPayload, rep: ParticleRep, tol: &Tolerances) -> Result<Vec<CheckRecord>, ConfigError> {
    let psi0 = p
        .psi0
        .as_ref()
        .ok_or_else(|| ConfigError::at("payload.psi0", "single-particle flows need an initial state"))?
        .for_particle(&rep)
        .map_err(at("payload.psi0"))?;
    if p.margin >= rep.config.levels {
        return Err(ConfigError::at("payload.margin", "margin must be below levels"));
    }
    let hbar = rep.hbar();
    let h = hamiltonian_physical(&System::Single(&rep), &p.potential).map_err(at("payload.potential"))?;
    let times = p.t_grid.points();
    let opts = options(hbar, p.method, rep.boundary_indices(), tol);
    let flow = evolve_state(&h, &psi0, &times, &opts).map_err(at("payload.psi0"))?;
    let mut out = flow_records(&flow, tol);

    let mut ops = Vec::new();
    for i in 0..rep.config.dims {
        ops.push((format!("X{}", i + 1), rep.x(i).clone()));
        ops.push((format!("P{}", i + 1), rep.p(i).clone()));
    }
    out.push(picture_record(&h, &ops, &psi0, p.t_grid.t_max, hbar, tol)?);

    if p.ehrenfest {
        let te = tol.get("ehrenfest");
        let e = ehrenfest_residual(&h, rep.xs(), rep.ps(), rep.mass(), &psi0, &times, &opts).map_err(at("payload"))?;
        out.push(
            CheckRecord::new("ehrenfest", Anchor::Ehrenfest)
                .tol(te)
                .metric("max_residual", e.max_residual)
                .require(within(e.max_residual, te), || format!("residual {:.3e}", e.max_residual)),
        );
    }

    let cal_v = p.potential.cal_v;
    let hg = hamiltonian_galilei(&rep, cal_v);
    let tx = tol.get("extra_casimir");
    let r = extra_casimir_check(&rep, &hg, cal_v, p.margin, tx).map_err(at("payload"))?;
    out.push(CheckRecord::from_report("extra_casimir[galilei]", Anchor::ExtraCasimir, &r));
    let r = extra_casimir_check(&rep, &h, 0.0, p.margin, tx).map_err(at("payload"))?;
    if p.potential.is_zero() {
        out.push(CheckRecord::from_report("extra_casimir[physical]", Anchor::ExtraCasimir, &r));
    } else {
        let floor = tol.get("nonscalar_floor");
        let dev = r.metrics["nonscalar_deviation"];
        let mut rec = CheckRecord::new("extra_casimir[physical]", Anchor::ExtraCasimir).tol(floor);
        rec.metrics = r.metrics.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect();
        out.push(rec.require(dev >= floor, || format!("2MH_phys - P² is scalar to {dev:.3e} despite V ≠ 0")));
    }

    if p.compare_galilei || p.expect_departure {
        let cmp = compare_flows(&hg, &h, &psi0, &times, &opts).map_err(at("payload"))?;
        let tf = tol.get("fidelity");
        let agree = cmp.min_fidelity >= 1.0 - tf;
        let v_zero = p.potential.is_zero();
        let final_fid = cmp.fidelity.last().copied().unwrap_or(1.0);
        out.push(
            CheckRecord::new("flow_dichotomy", Anchor::FlowDichotomy)
                .tol(tf)
                .metric("potential_is_zero", v_zero)
                .metric("min_fidelity", cmp.min_fidelity)
                .metric("final_fidelity", final_fid)
                .require(agree == v_zero, || {
                    if v_zero {
                        format!("flows separate although V = 0 (min fidelity {})", cmp.min_fidelity)
                    } else {
                        format!("flows coincide although V ≠ 0 (min fidelity {})", cmp.min_fidelity)
                    }
                })
                .warn_if(cmp.unreliable, "top-level occupation exceeds the leakage threshold"),
        );
        if v_zero {
            let tp = tol.get("phase");
            let worst = cmp
                .times
                .iter()
                .zip(&cmp.phase)
                .map(|(t, ph)| phase_distance(*ph, -cal_v * t / hbar))
                .fold(0.0, f64::max);
            out.push(
                CheckRecord::new("galilei_phase", Anchor::GalileiPhase)
                    .tol(tp)
                    .metric("cal_v", cal_v)
                    .metric("max_phase_error", worst)
                    .metric("final_phase", cmp.phase.last().copied().unwrap_or(0.0))
                    .require(within(worst, tp), || format!("relative phase misses -𝒱t/ħ by {worst:.3e}")),
            );
        }
        if p.expect_departure {
            let dep = tol.get("departure");
            out.push(
                CheckRecord::new("flow_departure", Anchor::FlowDichotomy)
                    .tol(dep)
                    .metric("min_fidelity", cmp.min_fidelity)
                    .metric("t_max", p.t_grid.t_max)
                    .require(cmp.min_fidelity < dep, || {
                        format!("minimum fidelity {} never drops below {dep} by t = {}", cmp.min_fidelity, p.t_grid.t_max)
                    }),
            );
        }
    }
    Ok(out)
}

fn composite_dynamics(p: &DynamicsPayload, comp: CompositeRep, tol: &Tolerances) -> Result<Vec<CheckRecord>, ConfigError> {
    let psi0 = p
        .psi0
        .as_ref()
        .ok_or_else(|| ConfigError::at("payload.psi0", "composite flows need an initial state"))?
        .for_composite(&comp)
        .map_err(at("payload.psi0"))?;
    let levels = comp.a.config.levels.min(comp.b.config.levels);
    if p.margin >= levels {
        return Err(ConfigError::at("payload.margin", "margin must be below levels"));
    }
    let hbar = comp.hbar();
    let h = hamiltonian_physical(&System::Composite(&comp), &p.potential).map_err(at("payload.potential"))?;
    let times = p.t_grid.points();
    let opts = options(hbar, p.method, comp.boundary_indices(), tol);
    let flow = evolve_state(&h, &psi0, &times, &opts).map_err(at("payload.psi0"))?;
    let mut out = flow_records(&flow, tol);

    let d = comp.dims();
    let xs: Vec<CMatrix> = (0..d).map(|i| comp.x(i)).collect();
    let ps: Vec<CMatrix> = (0..d).map(|i| comp.p(i).clone()).collect();
    let tm = tol.get("com_momentum");
    let drift = ps.iter().map(|pi| max_drift(&flow.expectation_trace(pi))).fold(0.0, f64::max);
    out.push(
        CheckRecord::new("com_momentum", Anchor::ComDecoupling)
            .tol(tm)
            .metric("max_drift", drift)
            .require(within(drift, tm), || format!("total momentum drifts by {drift:.3e}")),
    );
    let mut ops: Vec<(String, CMatrix)> = Vec::new();
    for i in 0..d {
        ops.push((format!("X_com{}", i + 1), xs[i].clone()));
        ops.push((format!("P{}", i + 1), ps[i].clone()));
    }
    out.push(picture_record(&h, &ops, &psi0, p.t_grid.t_max, hbar, tol)?);
    if p.ehrenfest {
        let te = tol.get("com_ehrenfest");
        let e = ehrenfest_residual(&h, &xs, &ps, comp.total_mass, &psi0, &times, &opts).map_err(at("payload"))?;
        out.push(
            CheckRecord::new("com_ehrenfest", Anchor::Ehrenfest)
                .tol(te)
                .metric("max_residual", e.max_residual)
                .require(within(e.max_residual, te), || format!("residual {:.3e}", e.max_residual)),
        );
    }
    if d == 3 {
        let tr = tol.get("rotation_invariance");
        let defect = rotation_invariance_defect(&comp, &h, p.margin).map_err(at("payload"))?;
        out.push(
            CheckRecord::new("rotation_invariance", Anchor::RotationInvariance)
                .tol(tr)
                .metric("defect", defect)
                .metric("margin", p.margin)
                .require(within(defect, tr), || format!("‖Π[H, J_ij]Π‖ = {defect:.3e}")),
        );
    }
    Ok(out)
}
