use std::collections::BTreeMap;

use galilei_core::composite::{verify_ccr_composite, CompositeRep};
use galilei_core::lie::{check_jacobi, CatalogId, LieAlgebra};
use galilei_core::linalg::{
    c, commutator, hermitian_eigenvalues, identity, max_abs, mul, re, submatrix, CMatrix,
};
use galilei_core::rep::{
    boost_conjugation_defect, rotation_covariance_defect, verify_homomorphism, ParticleRep,
    Realization, RepConfig, Spin,
};
use galilei_core::spin::{
    casimir_spin_value, decompose_product_spins, half_square, relative_spin_spectrum,
    shell_size, spin_matrices, t_tensor,
};
use galilei_core::exact::{rational, ComplexRational};
use galilei_core::uea::{casimir_candidates, check_central, commutator_uea, Monomial, PbwPolynomial};

#[test]
fn catalog_jacobi_and_casimirs_are_exact() {
    for id in [CatalogId::H3, CatalogId::So3, CatalogId::Hr3, CatalogId::G3tilde] {
        let r = check_jacobi(&LieAlgebra::catalog(id));
        assert!(r.passed, "{r:?}");
    }
    for id in [CatalogId::Hr3, CatalogId::G3tilde] {
        for cand in casimir_candidates(id).unwrap() {
            assert!(check_central(&LieAlgebra::catalog(id), &cand).passed, "{} in {id}", cand.name);
        }
    }
}

#[test]
fn time_translation_is_not_central() {
    let g = LieAlgebra::catalog(CatalogId::G3tilde);
    let h = PbwPolynomial::generator(g.index_of("H").unwrap());
    let k1 = PbwPolynomial::generator(g.index_of("K1").unwrap());
    let rem = commutator_uea(&g, &h, &k1);
    // [H, K1] = −iħ P1
    let mut expected = PbwPolynomial::zero();
    let p1 = g.index_of("P1").unwrap();
    expected.add_term(Monomial { factors: vec![p1], hbar_power: 1 }, &ComplexRational::i().scale(&rational(-1, 1)));
    assert_eq!(rem, expected);
}

#[test]
fn hr3_representation_is_a_homomorphism_on_the_interior() {
    let rep = ParticleRep::new(RepConfig::new(1.7, 3, 6)).unwrap();
    let r = verify_homomorphism(&rep, &LieAlgebra::catalog(CatalogId::Hr3), 2, 1e-10).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.metrics["pairs_checked"], 45.0);
}

#[test]
fn raw_ccr_defect_sits_on_the_top_level() {
    let n = 6;
    let rep = ParticleRep::new(RepConfig::new(1.0, 3, n)).unwrap();
    for axis in 0..3 {
        let raw = commutator(rep.x(axis), rep.p(axis));
        let defect = raw - identity(rep.dim()) * c(0.0, 1.0);
        // oracle: −iħN on basis states whose `axis` occupation is N−1
        let mut expected = CMatrix::zeros(rep.dim(), rep.dim());
        for idx in 0..rep.dim() {
            if rep.decode(idx).0[axis] == n - 1 {
                expected[(idx, idx)] = c(0.0, -(n as f64));
            }
        }
        assert!(max_abs(&(defect - expected)) <= 1e-12);
    }
}

#[test]
fn boosts_shift_momentum_and_rotations_rotate_boosts() {
    let rep = ParticleRep::new(RepConfig::new(2.0, 3, 6)).unwrap();
    assert!(boost_conjugation_defect(&rep, &[0.05, -0.02, 0.0], 3).unwrap() < 1e-6);
    assert!(rotation_covariance_defect(&rep, 0.7, 3).unwrap() < 1e-10);
}

#[test]
fn t_tensor_is_mass_times_spin() {
    for twice in 0..=3 {
        let s = Spin::from_twice(twice);
        let m = 1.3;
        let rep = ParticleRep::new(RepConfig::new(m, 3, 4).with_spin(s)).unwrap();
        let t = t_tensor(&rep).unwrap();
        for (tk, sk) in t.iter().zip(rep.spin_blocks()) {
            assert!(max_abs(&(tk - sk * re(m))) <= 1e-12);
        }
        let v = casimir_spin_value(&rep, 1, 1e-10).unwrap();
        assert!((v.s - s.value()).abs() < 1e-10);
    }
}

#[test]
fn relative_spectrum_shells() {
    let spec = relative_spin_spectrum(3, Spin::ZERO, Spin::ZERO, 1.0);
    let expected: [&[(f64, usize)]; 4] = [&[(0.0, 1)], &[(1.0, 3)], &[(0.0, 1), (2.0, 5)], &[(1.0, 3), (3.0, 7)]];
    for (shell, want) in spec.shells.iter().zip(expected) {
        let got: Vec<(f64, usize)> =
            shell.levels.iter().map(|l| (l.ell.unwrap(), l.multiplicity)).collect();
        assert_eq!(got, want.to_vec(), "shell {}", shell.n);
    }
    assert!(spec.max_label_error(1.0) <= 1e-8);
    assert!(spec.unmatched.is_empty());
}

/// Brute-force oracle: diagonalize `(S_a + S_b)²` and count each
/// `s(s+1)ħ²` level.
fn brute_force_decomposition(a: Spin, b: Spin) -> BTreeMap<u32, usize> {
    let (sa, sb) = (spin_matrices(a, 1.0), spin_matrices(b, 1.0));
    let (ia, ib) = (identity(sa.dim()), identity(sb.dim()));
    let comps: Vec<CMatrix> = (0..3)
        .map(|k| sa.components()[k].kronecker(&ib) + ia.kronecker(&sb.components()[k]))
        .collect();
    let mut counts = BTreeMap::new();
    for lambda in hermitian_eigenvalues(&half_square(&comps)) {
        let s = (-1.0 + (1.0 + 4.0 * lambda).sqrt()) / 2.0;
        let twice = (2.0 * s).round() as u32;
        assert!((lambda - s.round_half() * (s.round_half() + 1.0)).abs() < 1e-9);
        *counts.entry(twice).or_insert(0) += 1;
    }
    counts.into_iter().map(|(t, n)| (t, n / (t as usize + 1))).collect()
}

trait RoundHalf {
    fn round_half(self) -> f64;
}

impl RoundHalf for f64 {
    fn round_half(self) -> f64 {
        (2.0 * self).round() / 2.0
    }
}

#[test]
fn product_spins_match_brute_force() {
    for ta in 0..=3 {
        for tb in 0..=3 {
            let (a, b) = (Spin::from_twice(ta), Spin::from_twice(tb));
            let got: BTreeMap<u32, usize> =
                decompose_product_spins(a, b).into_iter().map(|(s, n)| (s.twice(), n)).collect();
            assert_eq!(got, brute_force_decomposition(a, b), "{a} x {b}");
            let dim: usize = got.iter().map(|(t, n)| (*t as usize + 1) * n).sum();
            assert_eq!(dim, a.multiplicity() * b.multiplicity());
        }
    }
}

#[test]
fn composite_ccr_coefficients() {
    let comp = CompositeRep::new(
        ParticleRep::new(RepConfig::new(1.0, 1, 8)).unwrap(),
        ParticleRep::new(RepConfig::new(2.0, 1, 8)).unwrap(),
    )
    .unwrap();
    let reports = verify_ccr_composite(&comp, 1, 1e-12).unwrap();
    let get = |l: &str| reports.iter().find(|r| r.pair == l).unwrap();
    assert!((get("(X_com, P)").coefficient - 1.0).abs() <= 1e-12);
    assert!((get("(X_naive, P)").coefficient - 2.0).abs() <= 1e-12);
    assert!((get("(R, Q)").coefficient - 1.0).abs() <= 1e-12);
    for r in &reports {
        assert!(r.passed, "{r:?}");
    }
}

/// The triangle construction of the relative orbital Casimir agrees with the
/// tensor-product construction on states with at most `N − 2` total quanta
/// (where every factor in `L = R×Q` is exact). The spectrum there is the
/// relative shells combined with center-of-mass shells.
#[test]
fn relative_mode_matches_tensor_construction() {
    let n = 3;
    let (ma, mb) = (1.0, 1.0);
    let comp = CompositeRep::new(
        ParticleRep::new(RepConfig::new(ma, 3, n)).unwrap(),
        ParticleRep::new(RepConfig::new(mb, 3, n)).unwrap(),
    )
    .unwrap();
    let (r, q) = comp.relative_ops();
    let l: Vec<CMatrix> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| mul(&r[i], &q[j]) - mul(&q[i], &r[j]))
        .collect();
    let cas = half_square(&l);
    let db = comp.b.dim();
    let quanta = |idx: usize| -> usize {
        comp.a.decode(idx / db).0.iter().sum::<usize>() + comp.b.decode(idx % db).0.iter().sum::<usize>()
    };
    let cutoff = n - 2;
    let inside: Vec<usize> = (0..comp.dim()).filter(|&i| quanta(i) <= cutoff).collect();
    let outside: Vec<usize> = (0..comp.dim()).filter(|&i| quanta(i) > cutoff).collect();
    let leak = inside
        .iter()
        .flat_map(|&i| outside.iter().map(move |&o| (i, o)))
        .map(|(i, o)| cas[(o, i)].norm())
        .fold(0.0, f64::max);
    assert!(leak < 1e-12, "Casimir leaves the low-quanta subspace: {leak}");
    let mut got = hermitian_eigenvalues(&submatrix(&cas, &inside));

    let rel = relative_spin_spectrum(cutoff, Spin::ZERO, Spin::ZERO, 1.0);
    let mut expected = Vec::new();
    for shell in &rel.shells {
        let com_states: usize = (0..=cutoff - shell.n).map(shell_size).sum();
        for level in &shell.levels {
            expected.extend(std::iter::repeat_n(level.value, level.multiplicity * com_states));
        }
    }
    expected.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    assert_eq!(got.len(), expected.len());
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).abs() < 1e-10, "{got:?} vs {expected:?}");
    }
}
