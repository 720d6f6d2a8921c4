//! Spin representations, the `T_ij` tensor, Casimir spectra and
//! angular-momentum addition.
//!
//! Component mapping in the `|s, m⟩` basis (`m = s, s−1, …, −s`):
//! `S_12 = S_z`, `S_23 = S_x`, `S_13 = −S_y`. This matches the rotation
//! table in [`crate::lie`], e.g. `[S_12, S_23] = −iħ S_13`.

use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{hermitian_eigenvalues, identity, kron, mul, re, CMatrix, I};
use crate::rep::{Realization, RepError, Spin};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("Casimir is not scalar on the interior (deviation {deviation:.3e}, mean {mean:.6})")]
    NotScalar { deviation: f64, mean: f64 },
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Clone, Debug)]
pub struct SpinRep {
    pub s: Spin,
    pub hbar: f64,
    comps: [CMatrix; 3],
}

impl SpinRep {
    /// `[S_12, S_13, S_23]`.
    pub fn components(&self) -> &[CMatrix; 3] {
        &self.comps
    }

    pub fn dim(&self) -> usize {
        self.s.multiplicity()
    }

    /// `(1/2) S_ij S^ij = Σ_{i<j} S_ij²`.
    pub fn half_casimir(&self) -> CMatrix {
        half_square(&self.comps)
    }
}

/// `Σ_{i<j} A_ij²` for the three independent components.
pub fn half_square(comps: &[CMatrix]) -> CMatrix {
    let n = comps[0].nrows();
    comps.iter().fold(CMatrix::zeros(n, n), |acc, a| acc + mul(a, a))
}

pub fn spin_matrices(s: Spin, hbar: f64) -> SpinRep {
    let dim = s.multiplicity();
    let sv = s.value();
    let mut sz = CMatrix::zeros(dim, dim);
    let mut raise = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let m = sv - k as f64;
        sz[(k, k)] = re(hbar * m);
        if k > 0 {
            raise[(k - 1, k)] = re(hbar * (sv * (sv + 1.0) - m * (m + 1.0)).sqrt());
        }
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower) * re(0.5);
    let sy = (&raise - &lower) * (-I * 0.5);
    SpinRep { s, hbar, comps: [sz, -sy, sx] }
}

/// `T_ij = M J_ij − (K_i P_j − P_i K_j)` in `[T_12, T_13, T_23]` order.
pub fn t_tensor<R: Realization + ?Sized>(rep: &R) -> Result<[CMatrix; 3], RepError> {
    if rep.spatial_dims() != 3 {
        return Err(RepError::NotThreeDimensional);
    }
    let t = |i: usize, j: usize| -> CMatrix {
        let jij = rep.j(i, j).expect("d = 3 has all rotation generators");
        mul(rep.mass_matrix(), jij) - (mul(rep.k(i), rep.p(j)) - mul(rep.p(i), rep.k(j)))
    };
    Ok([t(0, 1), t(0, 2), t(1, 2)])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinValue {
    /// Scalar value of `(1/(2m²)) T_ij T^ij`, i.e. `s(s+1)ħ²`.
    pub value: f64,
    pub s: f64,
    /// `‖Π(C − value)Π‖` on the interior.
    pub deviation: f64,
}

/// `s` solving `s(s+1)ħ² = value`.
pub fn spin_from_casimir(value: f64, hbar: f64) -> f64 {
    let disc = 1.0 + 4.0 * value / (hbar * hbar);
    (-1.0 + disc.max(0.0).sqrt()) / 2.0
}

/// Evaluates `(1/(2m²)) T_ij T^ij` and requires it to be scalar on the
/// interior within `tol`.
pub fn casimir_spin_value<R: Realization + ?Sized>(
    rep: &R,
    margin: usize,
    tol: f64,
) -> Result<SpinValue, SpinError> {
    let t = t_tensor(rep)?;
    let m = rep.mass();
    let cas = half_square(&t) / re(m * m);
    let proj = rep.interior_projector(margin)?;
    let block = proj.project(&cas);
    let rank = proj.rank().max(1);
    let mean = block.trace().re / rank as f64;
    let deviation =
        crate::linalg::spectral_norm(&(block - identity(proj.rank()) * re(mean)));
    if deviation > tol {
        return Err(SpinError::NotScalar { deviation, mean });
    }
    Ok(SpinValue { value: mean, s: spin_from_casimir(mean, rep.hbar()), deviation })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub value: f64,
    pub multiplicity: usize,
    /// `ℓ` with `value ≈ ℓ(ℓ+1)ħ²`, when one matches.
    pub ell: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellSpectrum {
    pub n: usize,
    pub levels: Vec<SpectrumLevel>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CasimirSpectrum {
    pub eigenvalues: Vec<SpectrumLevel>,
    pub unmatched: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub shells: Vec<ShellSpectrum>,
}

impl CasimirSpectrum {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.iter().map(|l| l.multiplicity).sum()
    }

    /// `(ℓ, multiplicity)` pairs of the matched levels.
    pub fn ell_multiplicities(&self) -> Vec<(f64, usize)> {
        self.eigenvalues.iter().filter_map(|l| l.ell.map(|e| (e, l.multiplicity))).collect()
    }

    /// Largest `|λ − ℓ(ℓ+1)ħ²|` over matched levels.
    pub fn max_label_error(&self, hbar: f64) -> f64 {
        self.eigenvalues
            .iter()
            .filter_map(|l| l.ell.map(|e| (l.value - e * (e + 1.0) * hbar * hbar).abs()))
            .fold(0.0, f64::max)
    }
}

/// Label tolerance: `|λ − ℓ(ℓ+1)ħ²| ≤ 1e−8·max(1, λ)`.
pub const LABEL_TOL: f64 = 1e-8;

pub fn label_eigenvalue(lambda: f64, hbar: f64) -> Option<f64> {
    let h2 = hbar * hbar;
    let disc = 1.0 + 4.0 * lambda / h2;
    if disc < -LABEL_TOL {
        return None;
    }
    let ell = ((-1.0 + disc.max(0.0).sqrt()) / 2.0 * 2.0).round() / 2.0;
    let ok = (lambda - ell * (ell + 1.0) * h2).abs() <= LABEL_TOL * lambda.abs().max(1.0);
    ok.then_some(ell)
}

/// Group sorted eigenvalues into levels and attach `ℓ` labels.
pub fn label_spectrum(mut eigenvalues: Vec<f64>, hbar: f64) -> CasimirSpectrum {
    eigenvalues.sort_by(f64::total_cmp);
    let mut levels: Vec<(f64, Vec<f64>)> = Vec::new();
    for v in eigenvalues {
        match levels.last_mut() {
            Some((first, members)) if (v - *first).abs() <= LABEL_TOL * first.abs().max(1.0) => {
                members.push(v)
            }
            _ => levels.push((v, vec![v])),
        }
    }
    let mut out = CasimirSpectrum { eigenvalues: Vec::new(), unmatched: Vec::new(), shells: Vec::new() };
    for (_, members) in levels {
        let value = members.iter().sum::<f64>() / members.len() as f64;
        let ell = label_eigenvalue(value, hbar);
        if ell.is_none() {
            out.unmatched.push(value);
        }
        out.eigenvalues.push(SpectrumLevel { value, multiplicity: members.len(), ell });
    }
    out
}

/// Spectrum of `Σ_{i<j} A_ij²` for Hermitian components.
pub fn casimir_spectrum(comps: &[CMatrix], hbar: f64) -> CasimirSpectrum {
    label_spectrum(hermitian_eigenvalues(&half_square(comps)), hbar)
}

/// Three-dimensional oscillator states with total quanta `n_1+n_2+n_3 ≤ n_max`,
/// ordered by shell. A total-quanta cutoff keeps every rotation-invariant
/// operator block diagonal, so orbital shells are exact.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeModeSpace {
    pub n_max: usize,
    states: Vec<[usize; 3]>,
}

pub fn shell_size(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

pub fn triangle_size(n_max: usize) -> usize {
    (0..=n_max).map(shell_size).sum()
}

impl RelativeModeSpace {
    pub fn new(n_max: usize) -> Self {
        let mut states = Vec::with_capacity(triangle_size(n_max));
        for n in 0..=n_max {
            for n1 in (0..=n).rev() {
                for n2 in (0..=n - n1).rev() {
                    states.push([n1, n2, n - n1 - n2]);
                }
            }
        }
        Self { n_max, states }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[[usize; 3]] {
        &self.states
    }

    pub fn shell_range(&self, n: usize) -> Range<usize> {
        let start = triangle_size(n) - shell_size(n);
        start..triangle_size(n)
    }

    pub fn index_of(&self, occ: [usize; 3]) -> Option<usize> {
        self.states.iter().position(|s| *s == occ)
    }

    /// Annihilation operator along `axis`; raising out of the triangle is
    /// dropped.
    pub fn annihilation(&self, axis: usize) -> CMatrix {
        let mut a = CMatrix::zeros(self.dim(), self.dim());
        for (col, s) in self.states.iter().enumerate() {
            if s[axis] == 0 {
                continue;
            }
            let mut lower = *s;
            lower[axis] -= 1;
            let row = self.index_of(lower).expect("lowering stays in the triangle");
            a[(row, col)] = re((s[axis] as f64).sqrt());
        }
        a
    }

    /// Canonical pair `(R_i, Q_i)` for a mode of mass `mu` and frequency
    /// `omega`, built on this space.
    pub fn canonical_pairs(&self, mu: f64, omega: f64, hbar: f64) -> ([CMatrix; 3], [CMatrix; 3]) {
        let xs = (hbar / (2.0 * mu * omega)).sqrt();
        let ps = (hbar * mu * omega / 2.0).sqrt();
        let mk = |axis| {
            let a = self.annihilation(axis);
            let ad = a.adjoint();
            ((&a + &ad) * re(xs), (&ad - &a) * (I * ps))
        };
        let (r0, q0) = mk(0);
        let (r1, q1) = mk(1);
        let (r2, q2) = mk(2);
        ([r0, r1, r2], [q0, q1, q2])
    }

    /// Evaluate a polynomial in `(R, Q)` of total degree at most `2·pad + 1`
    /// exactly on this space: build on the triangle `n_max + pad` and keep
    /// the leading block.
    pub fn exact_operator<F>(&self, pad: usize, mu: f64, omega: f64, hbar: f64, f: F) -> CMatrix
    where
        F: Fn(&[CMatrix; 3], &[CMatrix; 3]) -> CMatrix,
    {
        let big = RelativeModeSpace::new(self.n_max + pad);
        let (r, q) = big.canonical_pairs(mu, omega, hbar);
        let full = f(&r, &q);
        full.view((0, 0), (self.dim(), self.dim())).into_owned()
    }

    /// Orbital `L_ij = R_i Q_j − Q_i R_j` in `[12, 13, 23]` order.
    pub fn orbital(&self, hbar: f64) -> [CMatrix; 3] {
        let l = |i: usize, j: usize| {
            self.exact_operator(1, 1.0, 1.0, hbar, |r, q| mul(&r[i], &q[j]) - mul(&q[i], &r[j]))
        };
        [l(0, 1), l(0, 2), l(1, 2)]
    }

    /// `L_ij ⊗ I ⊗ I + I ⊗ S_ija ⊗ I + I ⊗ I ⊗ S_ijb`.
    pub fn total_spin(&self, s_a: Spin, s_b: Spin, hbar: f64) -> [CMatrix; 3] {
        let orbital = self.orbital(hbar);
        let (sa, sb) = (spin_matrices(s_a, hbar), spin_matrices(s_b, hbar));
        let (ia, ib, io) = (identity(sa.dim()), identity(sb.dim()), identity(self.dim()));
        let mk = |k: usize| {
            kron(&kron(&orbital[k], &ia), &ib)
                + kron(&kron(&io, &sa.components()[k]), &ib)
                + kron(&kron(&io, &ia), &sb.components()[k])
        };
        [mk(0), mk(1), mk(2)]
    }
}

/// Spectrum of `(1/2) Ŝ_ij Ŝ^ij` for the relative motion of two particles
/// (`Ŝ = R×Q + S_a + S_b`), restricted to `n ≤ n_max` relative quanta and
/// resolved shell by shell.
pub fn relative_spin_spectrum(n_max: usize, s_a: Spin, s_b: Spin, hbar: f64) -> CasimirSpectrum {
    let space = RelativeModeSpace::new(n_max);
    let orbital = space.orbital(hbar);
    let (sa, sb) = (spin_matrices(s_a, hbar), spin_matrices(s_b, hbar));
    let shells: Vec<ShellSpectrum> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let range = space.shell_range(n);
            let size = range.len();
            let block = |m: &CMatrix| m.view((range.start, range.start), (size, size)).into_owned();
            let (ia, ib, io) = (identity(sa.dim()), identity(sb.dim()), identity(size));
            let comps: Vec<CMatrix> = (0..3)
                .map(|k| {
                    kron(&kron(&block(&orbital[k]), &ia), &ib)
                        + kron(&kron(&io, &sa.components()[k]), &ib)
                        + kron(&kron(&io, &ia), &sb.components()[k])
                })
                .collect();
            ShellSpectrum { n, levels: casimir_spectrum(&comps, hbar).eigenvalues }
        })
        .collect();
    let mut all = Vec::new();
    for shell in &shells {
        for level in &shell.levels {
            all.extend(std::iter::repeat_n(level.value, level.multiplicity));
        }
    }
    let mut spectrum = label_spectrum(all, hbar);
    spectrum.shells = shells;
    spectrum
}

/// `s_a ⊗ s_b = ⊕ s` for `s = |s_a − s_b|, …, s_a + s_b`, each once.
pub fn decompose_product_spins(s_a: Spin, s_b: Spin) -> Vec<(Spin, usize)> {
    let (a, b) = (s_a.twice(), s_b.twice());
    (a.abs_diff(b)..=a + b).step_by(2).map(|t| (Spin::from_twice(t), 1)).collect()
}
