//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned.
//! Run with `cargo test -p galilei-cli --test acceptance`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use galilei_cli::{run_suite, Status, Suite};
use galilei_core::composite::{verify_ccr_composite, CompositeRep};
use galilei_core::dynamics::{
    coherent_state, compare_flows, extra_casimir_check, hamiltonian_galilei, hamiltonian_physical,
    phase_distance, EvolveOptions, PotentialSpec, System, TimeGrid,
};
use galilei_core::exact::{rational, ComplexRational};
use galilei_core::lie::{check_jacobi, CatalogId, LieAlgebra};
use galilei_core::linalg::{c, commutator, hermitian_eigenvalues, identity, max_abs, re, CMatrix};
use galilei_core::rep::{verify_homomorphism, GlobalUnits, ParticleRep, Realization, RepConfig, Spin};
use galilei_core::spin::{
    casimir_spin_value, decompose_product_spins, half_square, relative_spin_spectrum, spin_matrices, t_tensor,
};
use galilei_core::uea::{casimir_candidates, check_central, commutator_uea, Monomial, PbwPolynomial};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for id in [CatalogId::H3, CatalogId::So3, CatalogId::Hr3, CatalogId::G3tilde] {
        let r = check_jacobi(&LieAlgebra::catalog(id));
        ensure(r.passed, || format!("Jacobi fails for {id}: {:?}", r.violations))?;
    }
    let mut names = Vec::new();
    for id in [CatalogId::Hr3, CatalogId::G3tilde] {
        let alg = LieAlgebra::catalog(id);
        for cand in casimir_candidates(id).map_err(|e| e.to_string())? {
            let r = check_central(&alg, &cand);
            ensure(r.passed, || format!("{} not central in {id}", cand.name))?;
            names.push(format!("{}:{}", id, cand.name));
        }
    }
    ensure(names.len() == 5, || format!("expected 5 candidates, got {names:?}"))?;
    // [H, K_i] = −iħ P_i, built by hand
    let g = LieAlgebra::catalog(CatalogId::G3tilde);
    let h = PbwPolynomial::generator(g.index_of("H").unwrap());
    for i in 1..=3 {
        let k = PbwPolynomial::generator(g.index_of(&format!("K{i}")).unwrap());
        let mut expected = PbwPolynomial::zero();
        let p = g.index_of(&format!("P{i}")).unwrap();
        expected.add_term(Monomial { factors: vec![p], hbar_power: 1 }, &ComplexRational::i().scale(&rational(-1, 1)));
        ensure(commutator_uea(&g, &h, &k) == expected, || format!("[H, K{i}] is not -i hbar P{i}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 5.0, || format!("took {secs:.2} s > 5 s"))?;
    Ok(format!("4 Jacobi suites and 5 Casimirs exact, H noncentral, {secs:.2} s"))
}

fn criterion_2() -> Outcome {
    let n = 6;
    let rep = ParticleRep::new(RepConfig::new(1.7, 3, n)).map_err(|e| e.to_string())?;
    let r = verify_homomorphism(&rep, &LieAlgebra::catalog(CatalogId::Hr3), 2, 1e-10).map_err(|e| e.to_string())?;
    ensure(r.passed, || format!("{:?}", r.violations))?;
    let hbar = rep.hbar();
    let mut worst: f64 = 0.0;
    for axis in 0..3 {
        let defect = commutator(rep.x(axis), rep.p(axis)) - identity(rep.dim()) * c(0.0, hbar);
        let mut expected = CMatrix::zeros(rep.dim(), rep.dim());
        for idx in 0..rep.dim() {
            if rep.decode(idx).0[axis] == n - 1 {
                expected[(idx, idx)] = c(0.0, -hbar * n as f64);
            }
        }
        worst = worst.max(max_abs(&(defect - expected)));
    }
    ensure(worst <= 1e-12, || format!("raw defect differs from hbar N |N-1><N-1| by {worst:.3e}"))?;
    Ok(format!(
        "max projected defect {:.2e} over {} pairs, raw-defect residual {worst:.1e}",
        r.metrics["max_defect"], r.metrics["pairs_checked"]
    ))
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x6a11_1e1);
    let mass = |rng: &mut StdRng| 10.0 - rng.random_range(0.0..10.0);
    for _ in 0..10 {
        let m = mass(&mut rng);
        let rep = ParticleRep::new(RepConfig::new(m, 1, 6)).map_err(|e| e.to_string())?;
        ensure(*rep.mass_matrix() == identity(rep.dim()) * re(m), || format!("M != m Id for m = {m}"))?;
    }
    for _ in 0..10 {
        let (ma, mb) = (mass(&mut rng), mass(&mut rng));
        let comp = CompositeRep::new(
            ParticleRep::new(RepConfig::new(ma, 1, 4)).map_err(|e| e.to_string())?,
            ParticleRep::new(RepConfig::new(mb, 1, 4)).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let dev = max_abs(&(comp.mass_matrix() - identity(comp.dim()) * re(ma + mb)));
        ensure(dev == 0.0, || format!("composite mass off by {dev:e} for ({ma}, {mb})"))?;
    }
    Ok("10 single masses and 10 mass pairs exact (seeded)".into())
}

fn criterion_4() -> Outcome {
    let comp = CompositeRep::new(
        ParticleRep::new(RepConfig::new(1.0, 1, 8)).map_err(|e| e.to_string())?,
        ParticleRep::new(RepConfig::new(2.0, 1, 8)).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let hbar = comp.hbar();
    let reports = verify_ccr_composite(&comp, 1, 1e-12).map_err(|e| e.to_string())?;
    let get = |l: &str| reports.iter().find(|r| r.pair == l).ok_or(format!("pair {l} missing"));
    let (com, naive, rq) = (get("(X_com, P)")?, get("(X_naive, P)")?, get("(R, Q)")?);
    ensure((com.coefficient - hbar).abs() <= 1e-12, || format!("X_com coefficient {}", com.coefficient))?;
    ensure((naive.coefficient - 2.0 * hbar).abs() <= 1e-12, || format!("X_naive coefficient {}", naive.coefficient))?;
    ensure((rq.coefficient - hbar).abs() <= 1e-12, || format!("(R, Q) coefficient {}", rq.coefficient))?;
    for r in reports.iter().filter(|r| r.expected == 0.0) {
        let res = r.diagonal_residual.max(r.off_diagonal_residual);
        ensure(res <= 1e-12, || format!("cross pair {} residual {res:e}", r.pair))?;
    }
    Ok(format!(
        "X_com {:.15}, X_naive {:.15}, (R, Q) {:.15}",
        com.coefficient, naive.coefficient, rq.coefficient
    ))
}

fn criterion_5() -> Outcome {
    let m = 1.3;
    let mut worst_cas: f64 = 0.0;
    for twice in 0..=3 {
        let s = Spin::from_twice(twice);
        let sm = spin_matrices(s, 1.0);
        let target = s.value() * (s.value() + 1.0);
        worst_cas = worst_cas.max(max_abs(&(half_square(sm.components()) - identity(sm.dim()) * re(target))));
        let rep = ParticleRep::new(RepConfig::new(m, 3, 4).with_spin(s)).map_err(|e| e.to_string())?;
        let t = t_tensor(&rep).map_err(|e| e.to_string())?;
        if twice == 0 {
            let dev = t.iter().map(max_abs).fold(0.0, f64::max);
            ensure(dev <= 1e-10, || format!("T != 0 on spinless rep: {dev:e}"))?;
        } else {
            for (tk, sk) in t.iter().zip(rep.spin_blocks()) {
                let dev = max_abs(&(tk - sk * re(m)));
                ensure(dev <= 1e-12, || format!("T != m S for s = {s}: {dev:e}"))?;
            }
        }
        let v = casimir_spin_value(&rep, 1, 1e-10).map_err(|e| e.to_string())?;
        ensure((v.s - s.value()).abs() <= 1e-10, || format!("spin read back as {} for {s}", v.s))?;
    }
    ensure(worst_cas <= 1e-13, || format!("spin Casimir off by {worst_cas:e}"))?;
    Ok(format!("s in {{0, 1/2, 1, 3/2}}, Casimir deviation {worst_cas:.1e}"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let spec = relative_spin_spectrum(3, Spin::ZERO, Spin::ZERO, 1.0);
    let expected: [&[(f64, usize)]; 4] = [&[(0.0, 1)], &[(1.0, 3)], &[(0.0, 1), (2.0, 5)], &[(1.0, 3), (3.0, 7)]];
    ensure(spec.shells.len() == 4, || format!("{} shells", spec.shells.len()))?;
    for (shell, want) in spec.shells.iter().zip(expected) {
        let got: Vec<(f64, usize)> = shell.levels.iter().map(|l| (l.ell.unwrap_or(f64::NAN), l.multiplicity)).collect();
        ensure(got == want, || format!("shell {}: {got:?}", shell.n))?;
    }
    ensure(spec.unmatched.is_empty(), || format!("unlabeled eigenvalues {:?}", spec.unmatched))?;
    let err = spec.max_label_error(1.0);
    ensure(err <= 1e-8, || format!("label error {err:e}"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 30.0, || format!("took {secs:.2} s > 30 s"))?;
    Ok(format!("shells {{0; 1; 0,2; 1,3}}, label error {err:.1e}, {secs:.2} s"))
}

/// Independent oracle: diagonalize `(S_a + S_b)²` on the product space.
fn brute_force(a: Spin, b: Spin) -> BTreeMap<u32, usize> {
    let (sa, sb) = (spin_matrices(a, 1.0), spin_matrices(b, 1.0));
    let (ia, ib) = (identity(sa.dim()), identity(sb.dim()));
    let comps: Vec<CMatrix> =
        (0..3).map(|k| sa.components()[k].kronecker(&ib) + ia.kronecker(&sb.components()[k])).collect();
    let mut states = BTreeMap::new();
    for lambda in hermitian_eigenvalues(&half_square(&comps)) {
        let twice = (-1.0 + (1.0 + 4.0 * lambda).sqrt()).round() as u32;
        *states.entry(twice).or_insert(0) += 1;
    }
    states.into_iter().map(|(t, n)| (t, n / (t as usize + 1))).collect()
}

fn criterion_7() -> Outcome {
    let mut pairs = 0;
    for ta in 0..=3 {
        for tb in 0..=3 {
            let (a, b) = (Spin::from_twice(ta), Spin::from_twice(tb));
            let got: BTreeMap<u32, usize> =
                decompose_product_spins(a, b).into_iter().map(|(s, n)| (s.twice(), n)).collect();
            let want = brute_force(a, b);
            ensure(got == want, || format!("{a} x {b}: {got:?} vs {want:?}"))?;
            let dim: usize = got.iter().map(|(t, n)| (*t as usize + 1) * n).sum();
            ensure(dim == a.multiplicity() * b.multiplicity(), || format!("{a} x {b}: dimension {dim}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} spin pairs match brute force, dimension sum exact"))
}

fn criterion_8() -> Outcome {
    let units = GlobalUnits { hbar: 1.0, omega_ref: 0.7 };
    let rep = ParticleRep::new(RepConfig::new(1.0, 1, 32).with_units(units)).map_err(|e| e.to_string())?;
    let hbar = rep.hbar();
    let psi = coherent_state(&rep, &[0.3]).map_err(|e| e.to_string())?;
    let opts = EvolveOptions::default().with_hbar(hbar).with_boundary(rep.boundary_indices());
    let cal_v = 5.0;
    let hg = hamiltonian_galilei(&rep, cal_v);
    let free = hamiltonian_physical(&System::Single(&rep), &PotentialSpec::none()).map_err(|e| e.to_string())?;
    let times = TimeGrid { t_max: 2.0, steps: 40 }.points();
    let cmp = compare_flows(&hg, &free, &psi, &times, &opts).map_err(|e| e.to_string())?;
    ensure(cmp.min_fidelity >= 1.0 - 1e-8, || format!("free-flow fidelity {}", cmp.min_fidelity))?;
    let phase_err = times.iter().zip(&cmp.phase).map(|(t, p)| phase_distance(*p, -cal_v * t / hbar)).fold(0.0, f64::max);
    ensure(phase_err <= 1e-6, || format!("phase error {phase_err:e}"))?;

    let harmonic = PotentialSpec::polynomial_x(vec![0.0, 0.0, 0.5]);
    let hv = hamiltonian_physical(&System::Single(&rep), &harmonic).map_err(|e| e.to_string())?;
    let times = TimeGrid { t_max: 2.0, steps: 20 }.points();
    let dep = compare_flows(&hg, &hv, &psi, &times, &opts).map_err(|e| e.to_string())?;
    ensure(dep.min_fidelity < 0.99, || format!("harmonic fidelity stays at {}", dep.min_fidelity))?;

    let ok = extra_casimir_check(&rep, &hg, cal_v, 1, 1e-10).map_err(|e| e.to_string())?;
    ensure(ok.passed, || format!("Galilei extra Casimir: {:?}", ok.violations))?;
    let bad = extra_casimir_check(&rep, &hv, cal_v, 1, 1e-10).map_err(|e| e.to_string())?;
    let nonscalar = bad.metrics["nonscalar_deviation"];
    ensure(nonscalar >= 0.1, || format!("physical nonscalar deviation only {nonscalar:e}"))?;
    Ok(format!(
        "free fidelity {:.12}, phase error {phase_err:.1e}, harmonic fidelity {:.4}, nonscalar {nonscalar:.3}",
        cmp.min_fidelity, dep.min_fidelity
    ))
}

fn criterion_9() -> Outcome {
    let report = run_suite(Suite::PaperFull, &BTreeMap::new()).map_err(|e| e.to_string())?;
    let limits = [
        ("unitarity", "max_norm_deviation", 1e-10),
        ("energy", "max_energy_drift", 1e-9),
        ("picture", "max_discrepancy", 1e-9),
        ("spin_casimir_conservation", "max_drift", 1e-8),
    ];
    let mut counts = BTreeMap::new();
    for rec in &report.checks {
        let family = rec.name.split_once('/').map_or(rec.name.as_str(), |(_, n)| n);
        let Some((key, metric, tol)) = limits.iter().find(|(k, _, _)| family == *k) else { continue };
        let value = rec.metrics.get(*metric).and_then(Value::as_f64).ok_or(format!("{}: no {metric}", rec.name))?;
        ensure(rec.status == Status::Pass && value <= *tol, || format!("{}: {metric} = {value:e}", rec.name))?;
        *counts.entry(*key).or_insert(0) += 1;
    }
    ensure(counts.len() == limits.len(), || format!("missing families: {counts:?}"))?;
    Ok(format!("{counts:?} within pinned tolerances"))
}

fn criterion_10() -> Outcome {
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_galilei"));
    let start = Instant::now();
    let core = Command::new(&bin).args(["suite", "paper-core"]).output().map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(core.status.code() == Some(0), || format!("paper-core exit {:?}", core.status.code()))?;
    ensure(secs <= 10.0, || format!("paper-core took {secs:.2} s"))?;
    let mutated = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/algebra_fail.json");
    let out = Command::new(&bin).arg("verify").arg("algebra").arg(&mutated).output().map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(out.status.code() == Some(1), || format!("mutated algebra exit {:?}", out.status.code()))?;
    ensure(stderr.contains("FAIL jacobi["), || format!("violating check not named: {stderr}"))?;
    Ok(format!("paper-core exit 0 in {secs:.2} s, mutation exit 1 ({})", stderr.lines().next().unwrap_or("").trim()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact symbolic suite", criterion_1),
        ("representation homomorphism", criterion_2),
        ("mass Casimir and additivity", criterion_3),
        ("composite CCR coefficients", criterion_4),
        ("spin Casimir and T tensor", criterion_5),
        ("relative-motion spectrum", criterion_6),
        ("angular-momentum addition", criterion_7),
        ("flow dichotomy and extra Casimir", criterion_8),
        ("dynamics conservation", criterion_9),
        ("CLI contract", criterion_10),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(msg) => println!("criterion {} PASS: {title}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL: {title}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
