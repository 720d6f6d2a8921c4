//! Single-particle matrix representations on a truncated Fock basis.
//!
//! Per Cartesian direction, with `N` oscillator levels and reference
//! frequency `ω`:
//!
//! ```text
//! X = sqrt(ħ / 2mω) (a + a†)        P = i sqrt(ħmω / 2) (a† − a)
//! K = m X                           M = m·Id
//! J_ij = X_i P_j − P_i X_j  (+ I_space ⊗ S_ij when s > 0)
//! ```
//!
//! The basis index is `((n_1 N + n_2) N + n_3)·(2s+1) + σ`. Truncation only
//! corrupts products that pass through the top level `N − 1`, so bracket
//! identities are checked after projecting onto an [`InteriorProjector`].

use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::lie::{AlgebraElement, LieAlgebra};
use crate::linalg::{commutator, identity, kron, mul, re, spectral_norm, submatrix, CMatrix, I};
use crate::report::VerificationReport;
use crate::spin::{spin_matrices, SpinRep};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("hbar and omega_ref must be positive")]
    NonPositiveUnits,
    #[error("dims must be 1, 2 or 3, got {0}")]
    InvalidDims(usize),
    #[error("levels must be at least 2, got {0}")]
    TooFewLevels(usize),
    #[error("spin must be a nonnegative half-integer, got {0}")]
    InvalidSpin(f64),
    #[error("nonzero spin requires dims = 3")]
    SpinWithoutThreeDims,
    #[error("zeta must be nonzero")]
    ZeroZeta,
    #[error("margin {margin} out of range for {levels} levels")]
    MarginOutOfRange { margin: usize, levels: usize },
    #[error("generator `{0}` is not realized by this representation")]
    MissingGenerator(String),
    #[error("operation requires dims = 3")]
    NotThreeDimensional,
    #[error("incompatible representations: {0}")]
    Incompatible(String),
}

/// Twice the spin quantum number, so half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    pub fn from_f64(s: f64) -> Result<Self, RepError> {
        let twice = 2.0 * s;
        if !s.is_finite() || s < 0.0 || (twice - twice.round()).abs() > 1e-12 || twice > 1e6 {
            return Err(RepError::InvalidSpin(s));
        }
        Ok(Spin(twice.round() as u32))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn multiplicity(self) -> usize {
        self.0 as usize + 1
    }

    /// `s(s+1)`.
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for Spin {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Spin::from_f64(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalUnits {
    pub hbar: f64,
    pub omega_ref: f64,
}

impl Default for GlobalUnits {
    fn default() -> Self {
        Self { hbar: 1.0, omega_ref: 1.0 }
    }
}

fn default_one() -> f64 {
    1.0
}

/// Wire form of [`RepConfig`]: `{mass, dims, levels, spin, hbar, omega_ref}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepConfigWire {
    mass: f64,
    dims: usize,
    levels: usize,
    #[serde(default)]
    spin: Spin,
    #[serde(default = "default_one")]
    hbar: f64,
    #[serde(default = "default_one")]
    omega_ref: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RepConfigWire", into = "RepConfigWire")]
pub struct RepConfig {
    pub mass: f64,
    pub dims: usize,
    pub levels: usize,
    pub spin: Spin,
    pub units: GlobalUnits,
}

impl TryFrom<RepConfigWire> for RepConfig {
    type Error = RepError;
    fn try_from(w: RepConfigWire) -> Result<Self, RepError> {
        let cfg = RepConfig {
            mass: w.mass,
            dims: w.dims,
            levels: w.levels,
            spin: w.spin,
            units: GlobalUnits { hbar: w.hbar, omega_ref: w.omega_ref },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<RepConfig> for RepConfigWire {
    fn from(c: RepConfig) -> Self {
        RepConfigWire {
            mass: c.mass,
            dims: c.dims,
            levels: c.levels,
            spin: c.spin,
            hbar: c.units.hbar,
            omega_ref: c.units.omega_ref,
        }
    }
}

impl RepConfig {
    pub fn new(mass: f64, dims: usize, levels: usize) -> Self {
        Self { mass, dims, levels, spin: Spin::ZERO, units: GlobalUnits::default() }
    }

    pub fn with_spin(mut self, spin: Spin) -> Self {
        self.spin = spin;
        self
    }

    pub fn with_units(mut self, units: GlobalUnits) -> Self {
        self.units = units;
        self
    }

    pub fn validate(&self) -> Result<(), RepError> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(RepError::NonPositiveMass(self.mass));
        }
        if !(self.units.hbar > 0.0 && self.units.omega_ref > 0.0) {
            return Err(RepError::NonPositiveUnits);
        }
        if !(1..=3).contains(&self.dims) {
            return Err(RepError::InvalidDims(self.dims));
        }
        if self.levels < 2 {
            return Err(RepError::TooFewLevels(self.levels));
        }
        if self.spin != Spin::ZERO && self.dims != 3 {
            return Err(RepError::SpinWithoutThreeDims);
        }
        Ok(())
    }

    pub fn spatial_size(&self) -> usize {
        self.levels.pow(self.dims as u32)
    }

    pub fn dim(&self) -> usize {
        self.spatial_size() * self.spin.multiplicity()
    }
}

/// Truncated annihilation operator: `a[n-1, n] = sqrt(n)`.
pub fn annihilation(levels: usize) -> CMatrix {
    let mut a = CMatrix::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = re((n as f64).sqrt());
    }
    a
}

/// One-dimensional `(X, P)` on `levels` Fock states.
pub fn ladder_pair(levels: usize, mass: f64, units: GlobalUnits) -> (CMatrix, CMatrix) {
    let a = annihilation(levels);
    let ad = a.adjoint();
    let x = (&a + &ad) * re((units.hbar / (2.0 * mass * units.omega_ref)).sqrt());
    let p = (&ad - &a) * (I * (units.hbar * mass * units.omega_ref / 2.0).sqrt());
    (x, p)
}

/// Index pairs `(i, j)`, 0-based, `i < j`, for `J_ij` in `d` dimensions.
pub fn rotation_pairs(dims: usize) -> Vec<(usize, usize)> {
    match dims {
        2 => vec![(0, 1)],
        3 => vec![(0, 1), (0, 2), (1, 2)],
        _ => Vec::new(),
    }
}

/// Embed a one-dimensional operator acting on direction `axis`.
pub fn embed_axis(op: &CMatrix, axis: usize, dims: usize, levels: usize, spin_dim: usize) -> CMatrix {
    let before = identity(levels.pow(axis as u32));
    let after = identity(levels.pow((dims - axis - 1) as u32) * spin_dim);
    kron(&kron(&before, op), &after)
}

/// Coordinate projector onto Fock states whose occupations are all at most
/// `N − 1 − margin`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteriorProjector {
    pub margin: usize,
    pub dim: usize,
    pub indices: Vec<usize>,
}

impl InteriorProjector {
    pub fn full(dim: usize) -> Self {
        Self { margin: 0, dim, indices: (0..dim).collect() }
    }

    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    pub fn matrix(&self) -> CMatrix {
        let mut d = DVector::from_element(self.dim, Complex64::new(0.0, 0.0));
        for &i in &self.indices {
            d[i] = re(1.0);
        }
        CMatrix::from_diagonal(&d)
    }

    /// `Π A Π` restricted to the range of `Π`.
    pub fn project(&self, a: &CMatrix) -> CMatrix {
        submatrix(a, &self.indices)
    }

    pub fn projected_norm(&self, a: &CMatrix) -> f64 {
        spectral_norm(&self.project(a))
    }

    /// Projector for a tensor product `A ⊗ B`.
    pub fn tensor(a: &Self, b: &Self) -> Self {
        let indices = a
            .indices
            .iter()
            .flat_map(|&i| b.indices.iter().map(move |&j| i * b.dim + j))
            .collect();
        Self { margin: a.margin.min(b.margin), dim: a.dim * b.dim, indices }
    }
}

/// Common view of single-particle and composite representations.
pub trait Realization {
    fn dim(&self) -> usize;
    fn spatial_dims(&self) -> usize;
    fn hbar(&self) -> f64;
    /// Eigenvalue of the mass Casimir.
    fn mass(&self) -> f64;
    fn k(&self, axis: usize) -> &CMatrix;
    fn p(&self, axis: usize) -> &CMatrix;
    /// `J_ij` for 0-based `i < j`.
    fn j(&self, i: usize, j: usize) -> Option<&CMatrix>;
    fn mass_matrix(&self) -> &CMatrix;
    fn interior_projector(&self, margin: usize) -> Result<InteriorProjector, RepError>;

    /// Matrix for a generator label (`K1`, `P2`, `J13`, `M`, `X3`, `I`).
    fn generator(&self, name: &str) -> Option<CMatrix> {
        let axis = |s: &str| -> Option<usize> {
            let k: usize = s.parse().ok()?;
            (1..=self.spatial_dims()).contains(&k).then(|| k - 1)
        };
        match name {
            "M" => Some(self.mass_matrix().clone()),
            "I" => Some(identity(self.dim())),
            _ => {
                let (head, tail) = name.split_at(1);
                match head {
                    "K" => axis(tail).map(|a| self.k(a).clone()),
                    "P" => axis(tail).map(|a| self.p(a).clone()),
                    "X" => axis(tail).map(|a| self.k(a) / re(self.mass())),
                    "J" if tail.len() == 2 => {
                        let (i, j) = (axis(&tail[..1])?, axis(&tail[1..])?);
                        if i < j {
                            self.j(i, j).cloned()
                        } else {
                            None
                        }
                    }
                    _ => None,
                }
            }
        }
    }

    /// `Σ_k c_k Ĝ_k` for an algebra element.
    fn represent(&self, alg: &LieAlgebra, elem: &AlgebraElement) -> Result<CMatrix, RepError> {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (k, coeff) in elem.terms() {
            let name = alg.name_of(k);
            let g = self.generator(name).ok_or_else(|| RepError::MissingGenerator(name.into()))?;
            let (cr, ci) = coeff.to_f64_pair();
            out += g * Complex64::new(cr, ci);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct ParticleRep {
    pub config: RepConfig,
    k: Vec<CMatrix>,
    p: Vec<CMatrix>,
    x: Vec<CMatrix>,
    /// Orbital part `X_i P_j − P_i X_j`, in [`rotation_pairs`] order.
    l: Vec<CMatrix>,
    j: Vec<CMatrix>,
    m: CMatrix,
    spin: Option<SpinRep>,
}

pub fn build_particle_rep(config: RepConfig) -> Result<ParticleRep, RepError> {
    ParticleRep::new(config)
}

impl ParticleRep {
    pub fn new(config: RepConfig) -> Result<Self, RepError> {
        config.validate()?;
        let (d, n) = (config.dims, config.levels);
        let spin_dim = config.spin.multiplicity();
        let dim = config.dim();
        let (x1, p1) = ladder_pair(n, config.mass, config.units);
        let x: Vec<CMatrix> = (0..d).map(|a| embed_axis(&x1, a, d, n, spin_dim)).collect();
        let p: Vec<CMatrix> = (0..d).map(|a| embed_axis(&p1, a, d, n, spin_dim)).collect();
        let k = x.iter().map(|xi| xi * re(config.mass)).collect();
        let l: Vec<CMatrix> =
            rotation_pairs(d).iter().map(|&(i, j)| mul(&x[i], &p[j]) - mul(&p[i], &x[j])).collect();
        let spin = (config.spin != Spin::ZERO)
            .then(|| spin_matrices(config.spin, config.units.hbar));
        let j = match &spin {
            None => l.clone(),
            Some(s) => {
                let space = identity(config.spatial_size());
                l.iter()
                    .zip(s.components())
                    .map(|(li, si)| li + kron(&space, si))
                    .collect()
            }
        };
        let m = identity(dim) * re(config.mass);
        Ok(Self { config, k, p, x, l, j, m, spin })
    }

    pub fn x(&self, axis: usize) -> &CMatrix {
        &self.x[axis]
    }

    pub fn xs(&self) -> &[CMatrix] {
        &self.x
    }

    pub fn ps(&self) -> &[CMatrix] {
        &self.p
    }

    pub fn ks(&self) -> &[CMatrix] {
        &self.k
    }

    /// Orbital angular momentum components in [`rotation_pairs`] order.
    pub fn orbital(&self) -> &[CMatrix] {
        &self.l
    }

    pub fn js(&self) -> &[CMatrix] {
        &self.j
    }

    pub fn spin(&self) -> Option<&SpinRep> {
        self.spin.as_ref()
    }

    /// `I_space ⊗ S_ij` in [`rotation_pairs`] order (zeros when spinless).
    pub fn spin_blocks(&self) -> Vec<CMatrix> {
        match &self.spin {
            None => rotation_pairs(self.config.dims)
                .iter()
                .map(|_| CMatrix::zeros(self.config.dim(), self.config.dim()))
                .collect(),
            Some(s) => {
                let space = identity(self.config.spatial_size());
                s.components().iter().map(|si| kron(&space, si)).collect()
            }
        }
    }

    /// Per-direction occupation numbers and spin index of a basis state.
    pub fn decode(&self, index: usize) -> (Vec<usize>, usize) {
        let spin_dim = self.config.spin.multiplicity();
        let (mut rest, sigma) = (index / spin_dim, index % spin_dim);
        let mut occ = vec![0; self.config.dims];
        for a in (0..self.config.dims).rev() {
            occ[a] = rest % self.config.levels;
            rest /= self.config.levels;
        }
        (occ, sigma)
    }

    pub fn encode(&self, occupations: &[usize], sigma: usize) -> usize {
        let spatial = occupations.iter().fold(0, |acc, &n| acc * self.config.levels + n);
        spatial * self.config.spin.multiplicity() + sigma
    }

    /// Basis states with at least one direction on the top level.
    pub fn boundary_indices(&self) -> Vec<usize> {
        let top = self.config.levels - 1;
        (0..self.config.dim())
            .filter(|&i| self.decode(i).0.iter().any(|&n| n == top))
            .collect()
    }
}

pub fn interior_projector<R: Realization + ?Sized>(
    rep: &R,
    margin: usize,
) -> Result<InteriorProjector, RepError> {
    rep.interior_projector(margin)
}

impl Realization for ParticleRep {
    fn dim(&self) -> usize {
        self.config.dim()
    }
    fn spatial_dims(&self) -> usize {
        self.config.dims
    }
    fn hbar(&self) -> f64 {
        self.config.units.hbar
    }
    fn mass(&self) -> f64 {
        self.config.mass
    }
    fn k(&self, axis: usize) -> &CMatrix {
        &self.k[axis]
    }
    fn p(&self, axis: usize) -> &CMatrix {
        &self.p[axis]
    }
    fn j(&self, i: usize, j: usize) -> Option<&CMatrix> {
        let pos = rotation_pairs(self.config.dims).iter().position(|&q| q == (i, j))?;
        self.j.get(pos)
    }
    fn mass_matrix(&self) -> &CMatrix {
        &self.m
    }
    fn interior_projector(&self, margin: usize) -> Result<InteriorProjector, RepError> {
        let n = self.config.levels;
        if margin >= n {
            return Err(RepError::MarginOutOfRange { margin, levels: n });
        }
        let cap = n - 1 - margin;
        let indices =
            (0..self.dim()).filter(|&i| self.decode(i).0.iter().all(|&occ| occ <= cap)).collect();
        Ok(InteriorProjector { margin, dim: self.dim(), indices })
    }
}

/// `iħ(Id − N|N−1⟩⟨N−1|)` on direction `axis`: the exact value of the
/// truncated `[X_axis, P_axis]`.
pub fn truncated_ccr(rep: &ParticleRep, axis: usize) -> CMatrix {
    let n = rep.config.levels;
    let mut top = CMatrix::zeros(n, n);
    top[(n - 1, n - 1)] = re(n as f64);
    let defect = embed_axis(&top, axis, rep.config.dims, n, rep.config.spin.multiplicity());
    (identity(rep.dim()) - defect) * (I * rep.hbar())
}

/// `(X_ζ, P_ζ, I_ζ)` with `[X_ζ, P_ζ] = iħζ I` on the interior.
#[derive(Clone, Debug)]
pub struct ZetaRep {
    pub zeta: f64,
    pub x: Vec<CMatrix>,
    pub p: Vec<CMatrix>,
    pub identity: CMatrix,
    base: ParticleRep,
}

/// `X_ζ = sign(ζ) sqrt|ζ| X`, `P_ζ = sqrt|ζ| P`, `I_ζ = ζ Id`.
pub fn build_zeta_rep(zeta: f64, config: RepConfig) -> Result<ZetaRep, RepError> {
    if zeta == 0.0 || !zeta.is_finite() {
        return Err(RepError::ZeroZeta);
    }
    let base = ParticleRep::new(config)?;
    let root = zeta.abs().sqrt();
    let x = base.xs().iter().map(|x| x * re(zeta.signum() * root)).collect();
    let p = base.ps().iter().map(|p| p * re(root)).collect();
    let identity = identity(base.dim()) * re(zeta);
    Ok(ZetaRep { zeta, x, p, identity, base })
}

impl ZetaRep {
    pub fn base(&self) -> &ParticleRep {
        &self.base
    }

    /// Largest `‖Π([X_ζi, P_ζj] − iħ δ_ij I_ζ)Π‖` over all direction pairs.
    pub fn ccr_defect(&self, margin: usize) -> Result<f64, RepError> {
        let proj = self.base.interior_projector(margin)?;
        let hbar = self.base.hbar();
        let mut worst: f64 = 0.0;
        for (i, xi) in self.x.iter().enumerate() {
            for (j, pj) in self.p.iter().enumerate() {
                let mut d = commutator(xi, pj);
                if i == j {
                    d -= &self.identity * (I * hbar);
                }
                worst = worst.max(proj.projected_norm(&d));
            }
        }
        Ok(worst)
    }
}

/// Checks `Π([Ĝ_a, Ĝ_b] − iħ Σ_c f^c_ab Ĝ_c)Π ≤ tol` for every pair of
/// generators the representation realizes.
pub fn verify_homomorphism<R: Realization + ?Sized>(
    rep: &R,
    alg: &LieAlgebra,
    margin: usize,
    tol: f64,
) -> Result<VerificationReport, RepError> {
    let proj = rep.interior_projector(margin)?;
    let mut report =
        VerificationReport::new(format!("homomorphism[{}]", alg.name)).with_tolerance(tol);
    let mats: Vec<Option<CMatrix>> =
        alg.generators.iter().map(|g| rep.generator(&g.name)).collect();
    let skipped: Vec<&str> = alg
        .generators
        .iter()
        .zip(&mats)
        .filter(|(_, m)| m.is_none())
        .map(|(g, _)| g.name.as_str())
        .collect();
    let ihbar = I * rep.hbar();
    let mut pairs = 0usize;
    let mut worst: f64 = 0.0;
    for a in 0..alg.dim() {
        for b in a + 1..alg.dim() {
            let (Some(ga), Some(gb)) = (&mats[a], &mats[b]) else { continue };
            let rhs = alg.bracket_basis(a, b);
            let mut defect = commutator(ga, gb);
            let mut missing = None;
            for (c, coeff) in rhs.terms() {
                match &mats[c] {
                    Some(gc) => {
                        let (cr, ci) = coeff.to_f64_pair();
                        defect -= gc * (ihbar * Complex64::new(cr, ci));
                    }
                    None => missing = Some(alg.name_of(c)),
                }
            }
            let (na, nb) = (alg.name_of(a), alg.name_of(b));
            if let Some(m) = missing {
                report.violation(format!("[{na}, {nb}] needs unrealized generator {m}"));
                continue;
            }
            pairs += 1;
            let norm = proj.projected_norm(&defect);
            worst = worst.max(norm);
            if norm > tol {
                report.violation(format!("[{na}, {nb}]: defect {norm:.3e} > {tol:.1e}"));
            }
        }
    }
    report.metric("pairs_checked", pairs as f64);
    report.metric("max_defect", worst);
    report.metric("interior_rank", proj.rank() as f64);
    report.metric("margin", margin as f64);
    if !skipped.is_empty() {
        report.metric("unrealized_generators", skipped.len() as f64);
    }
    Ok(report)
}

/// `‖Π(e^{−ib·K/ħ} P_j e^{ib·K/ħ} − P_j − m b_j)Π‖`, maximized over `j`.
pub fn boost_conjugation_defect(rep: &ParticleRep, b: &[f64], margin: usize) -> Result<f64, RepError> {
    let proj = rep.interior_projector(margin)?;
    let mut gen = CMatrix::zeros(rep.dim(), rep.dim());
    for (axis, bj) in b.iter().enumerate().take(rep.config.dims) {
        gen += rep.k(axis) * re(*bj);
    }
    let u = crate::linalg::propagator(&gen, 1.0, rep.hbar());
    let ud = u.adjoint();
    let mut worst: f64 = 0.0;
    for axis in 0..rep.config.dims {
        let shifted = mul(&mul(&u, rep.p(axis)), &ud);
        let expected = rep.p(axis) + identity(rep.dim()) * re(rep.mass() * b.get(axis).copied().unwrap_or(0.0));
        worst = worst.max(proj.projected_norm(&(shifted - expected)));
    }
    Ok(worst)
}

/// `‖Π(e^{iθJ12/ħ} K1 e^{−iθJ12/ħ} − (cos θ K1 − sin θ K2))Π‖`.
pub fn rotation_covariance_defect(rep: &ParticleRep, theta: f64, margin: usize) -> Result<f64, RepError> {
    if rep.config.dims != 3 {
        return Err(RepError::NotThreeDimensional);
    }
    let proj = rep.interior_projector(margin)?;
    let j12 = rep.j(0, 1).expect("d = 3 has J12");
    let u = crate::linalg::propagator(j12, theta, rep.hbar());
    let rotated = mul(&mul(&u.adjoint(), rep.k(0)), &u);
    let expected = rep.k(0) * re(theta.cos()) - rep.k(1) * re(theta.sin());
    Ok(proj.projected_norm(&(rotated - expected)))
}

/// Dense export for debugging: `{rows, cols, re: [...], im: [...]}` row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixExport {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMatrix> for MatrixExport {
    fn from(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut out = MatrixExport { rows, cols, re: Vec::with_capacity(rows * cols), im: Vec::with_capacity(rows * cols) };
        for r in 0..rows {
            for c in 0..cols {
                out.re.push(m[(r, c)].re);
                out.im.push(m[(r, c)].im);
            }
        }
        out
    }
}

impl From<&MatrixExport> for CMatrix {
    fn from(e: &MatrixExport) -> Self {
        CMatrix::from_fn(e.rows, e.cols, |r, c| Complex64::new(e.re[r * e.cols + c], e.im[r * e.cols + c]))
    }
}
