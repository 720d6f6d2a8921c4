//! Hamiltonian flows on truncated representation spaces.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composite::CompositeRep;
use crate::linalg::{
    commutator, expectation, hermiticity_defect, identity, kron, mul, power, propagator, re,
    spectral_norm, CMatrix, CVector,
};
use crate::rep::{ParticleRep, Realization, RepError, Spin};
use crate::report::VerificationReport;
use crate::spin::{half_square, spin_matrices, RelativeModeSpace};

pub const DENSE_LIMIT: usize = 4096;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const LEAKAGE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("potential {kind:?} does not apply to a {system} system")]
    PotentialMismatch { kind: PotentialKind, system: &'static str },
    #[error("potential degree {degree} exceeds the maximum {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("Hamiltonian is not Hermitian (defect {0:.3e})")]
    NonHermitian(f64),
    #[error("initial state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("time grid must be non-empty and strictly increasing")]
    BadGrid,
    #[error("invalid state: {0}")]
    BadState(String),
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    None,
    #[serde(alias = "polynomial-x")]
    PolynomialX,
    #[serde(alias = "polynomial-r2")]
    PolynomialR2,
}

/// `V = Σ_k c_k x^k` (per direction, `PolynomialX`) or `V = Σ_k c_k (R·R)^k`
/// (`PolynomialR2`); `cal_v` is the constant of the Galilei generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    #[serde(default)]
    pub coefficients: Vec<f64>,
    #[serde(default, rename = "calV")]
    pub cal_v: f64,
    #[serde(default = "default_max_degree")]
    pub max_degree: usize,
}

fn default_max_degree() -> usize {
    4
}

impl PotentialSpec {
    pub fn none() -> Self {
        Self { kind: PotentialKind::None, coefficients: vec![], cal_v: 0.0, max_degree: 4 }
    }

    pub fn polynomial_x(coefficients: Vec<f64>) -> Self {
        Self { kind: PotentialKind::PolynomialX, coefficients, ..Self::none() }
    }

    pub fn polynomial_r2(coefficients: Vec<f64>) -> Self {
        Self { kind: PotentialKind::PolynomialR2, coefficients, ..Self::none() }
    }

    /// `½ k x²` per direction.
    pub fn harmonic(k: f64) -> Self {
        Self::polynomial_x(vec![0.0, 0.0, 0.5 * k])
    }

    pub fn with_cal_v(mut self, cal_v: f64) -> Self {
        self.cal_v = cal_v;
        self
    }

    /// Degree in position operators.
    pub fn degree(&self) -> usize {
        let top = self.coefficients.iter().rposition(|c| *c != 0.0).unwrap_or(0);
        match self.kind {
            PotentialKind::None => 0,
            PotentialKind::PolynomialX => top,
            PotentialKind::PolynomialR2 => 2 * top,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kind == PotentialKind::None || self.coefficients.iter().all(|c| *c == 0.0)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if self.degree() > self.max_degree {
            return Err(DynamicsError::DegreeTooHigh { degree: self.degree(), max: self.max_degree });
        }
        Ok(())
    }
}

fn poly(base: &CMatrix, coefficients: &[f64]) -> CMatrix {
    let mut out = CMatrix::zeros(base.nrows(), base.ncols());
    for (k, c) in coefficients.iter().enumerate() {
        if *c != 0.0 {
            out += power(base, k) * re(*c);
        }
    }
    out
}

fn kinetic(ps: &[CMatrix], mass: f64) -> CMatrix {
    let dim = ps[0].nrows();
    let mut out = CMatrix::zeros(dim, dim);
    for p in ps {
        out += mul(p, p);
    }
    out / re(2.0 * mass)
}

pub enum System<'a> {
    Single(&'a ParticleRep),
    Composite(&'a CompositeRep),
}

/// `P²/2m + V(X)` for one particle, `P²/2m + Q²/2μ + V(R·R)` for a pair.
pub fn hamiltonian_physical(system: &System<'_>, pot: &PotentialSpec) -> Result<CMatrix, DynamicsError> {
    pot.validate()?;
    match system {
        System::Single(rep) => {
            if pot.kind == PotentialKind::PolynomialR2 {
                return Err(DynamicsError::PotentialMismatch { kind: pot.kind, system: "single-particle" });
            }
            let mut h = kinetic(rep.ps(), rep.mass());
            if pot.kind == PotentialKind::PolynomialX {
                for x in rep.xs() {
                    h += poly(x, &pot.coefficients);
                }
            }
            Ok(h)
        }
        System::Composite(comp) => {
            if pot.kind == PotentialKind::PolynomialX {
                return Err(DynamicsError::PotentialMismatch { kind: pot.kind, system: "composite" });
            }
            let ps: Vec<CMatrix> = (0..comp.dims()).map(|i| comp.p(i).clone()).collect();
            let (r, q) = comp.relative_ops();
            let mut h = kinetic(&ps, comp.total_mass) + kinetic(&q, comp.reduced_mass);
            if pot.kind == PotentialKind::PolynomialR2 {
                let r2 = r.iter().fold(CMatrix::zeros(comp.dim(), comp.dim()), |acc, ri| acc + mul(ri, ri));
                h += poly(&r2, &pot.coefficients);
            }
            Ok(h)
        }
    }
}

/// `P²/2m + 𝒱·Id`.
pub fn hamiltonian_galilei<R: Realization + ?Sized>(rep: &R, cal_v: f64) -> CMatrix {
    let ps: Vec<CMatrix> = (0..rep.spatial_dims()).map(|i| rep.p(i).clone()).collect();
    kinetic(&ps, rep.mass()) + identity(rep.dim()) * re(cal_v)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Auto,
    #[serde(alias = "dense-exponential")]
    Dense,
    #[serde(alias = "krylov-subspace")]
    Krylov,
}

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    pub method: Method,
    pub hbar: f64,
    pub krylov_dim: usize,
    pub krylov_tol: f64,
    /// Basis states whose population counts as leakage to the truncation edge.
    pub boundary: Vec<usize>,
    pub leakage_threshold: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            hbar: 1.0,
            krylov_dim: 30,
            krylov_tol: 1e-12,
            boundary: Vec::new(),
            leakage_threshold: LEAKAGE_THRESHOLD,
        }
    }
}

impl EvolveOptions {
    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_boundary(mut self, boundary: Vec<usize>) -> Self {
        self.boundary = boundary;
        self
    }

    fn resolve(&self, dim: usize) -> Method {
        match self.method {
            Method::Auto if dim <= DENSE_LIMIT => Method::Dense,
            Method::Auto => Method::Krylov,
            m => m,
        }
    }
}

/// `{t_max, steps}` expands to `steps + 1` uniform points from 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        let dt = self.t_max / self.steps.max(1) as f64;
        (0..=self.steps).map(|k| k as f64 * dt).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowResult {
    pub method: Method,
    pub times: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<CVector>,
    pub norm_trace: Vec<f64>,
    pub energy_trace: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub casimir_trace: Option<Vec<f64>>,
    pub max_norm_deviation: f64,
    pub max_energy_drift: f64,
    pub max_boundary_population: f64,
    pub unreliable: bool,
    pub final_state: Vec<[f64; 2]>,
}

impl FlowResult {
    pub fn expectation_trace(&self, a: &CMatrix) -> Vec<f64> {
        self.states.iter().map(|s| expectation(a, s).re).collect()
    }

    pub fn final_vector(&self) -> &CVector {
        self.states.last().expect("grid is non-empty")
    }
}

fn check_inputs(h: &CMatrix, psi0: &CVector, times: &[f64]) -> Result<(), DynamicsError> {
    if h.nrows() != psi0.len() {
        return Err(DynamicsError::DimensionMismatch(h.nrows(), psi0.len()));
    }
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL {
        return Err(DynamicsError::NonHermitian(defect));
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(DynamicsError::NotNormalized(norm));
    }
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DynamicsError::BadGrid);
    }
    Ok(())
}

/// `ψ(t) = exp(−iHt/ħ) ψ0` at each grid point.
pub fn evolve_state(
    h: &CMatrix,
    psi0: &CVector,
    times: &[f64],
    options: &EvolveOptions,
) -> Result<FlowResult, DynamicsError> {
    check_inputs(h, psi0, times)?;
    let method = options.resolve(h.nrows());
    let hbar = options.hbar;
    let mut states = Vec::with_capacity(times.len());
    let mut psi = psi0.clone();
    let mut t_prev = 0.0;
    let mut cached: Option<(f64, CMatrix)> = None;
    for &t in times {
        let dt = t - t_prev;
        if dt != 0.0 {
            psi = match method {
                Method::Krylov => krylov_propagate(h, &psi, dt, hbar, options.krylov_dim, options.krylov_tol),
                _ => {
                    // uniform grids differ from step to step only by rounding in t_k
                    let reuse = matches!(&cached, Some((d, _)) if (d - dt).abs() <= 1e-12 * t.abs().max(1.0));
                    if !reuse {
                        cached = Some((dt, propagator(h, dt, hbar)));
                    }
                    &cached.as_ref().expect("just set").1 * &psi
                }
            };
        }
        states.push(psi.clone());
        t_prev = t;
    }
    Ok(assemble(h, times.to_vec(), states, method, options))
}

fn assemble(
    h: &CMatrix,
    times: Vec<f64>,
    states: Vec<CVector>,
    method: Method,
    options: &EvolveOptions,
) -> FlowResult {
    let norm_trace: Vec<f64> = states.iter().map(|s| s.norm()).collect();
    let energy_trace: Vec<f64> = states.iter().map(|s| expectation(h, s).re).collect();
    let max_norm_deviation = norm_trace.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    let e0 = energy_trace[0];
    let max_energy_drift = energy_trace.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
    let max_boundary_population = states
        .iter()
        .map(|s| options.boundary.iter().map(|&i| s[i].norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    let final_state = states.last().expect("non-empty").iter().map(|z| [z.re, z.im]).collect();
    FlowResult {
        method,
        times,
        states,
        norm_trace,
        energy_trace,
        casimir_trace: None,
        max_norm_deviation,
        max_energy_drift,
        max_boundary_population,
        unreliable: max_boundary_population > options.leakage_threshold,
        final_state,
    }
}

/// One Lanczos approximation of `exp(−iHτ/ħ) v` and its a-posteriori error
/// estimate.
fn lanczos_exp(h: &CMatrix, v: &CVector, tau: f64, hbar: f64, m: usize) -> (CVector, f64) {
    let beta0 = v.norm();
    if beta0 == 0.0 {
        return (v.clone(), 0.0);
    }
    let scale = spectral_scale(h);
    let mut basis = vec![v / re(beta0)];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut residual = 0.0;
    for j in 0..m.min(h.nrows()) {
        let mut w = h * &basis[j];
        let a = basis[j].dotc(&w).re;
        alpha.push(a);
        for q in &basis {
            let proj = q.dotc(&w);
            w -= q * proj;
        }
        let b = w.norm();
        if b <= 1e-13 * scale.max(1.0) {
            residual = 0.0;
            break;
        }
        if j + 1 == m.min(h.nrows()) {
            residual = b;
            break;
        }
        beta.push(b);
        basis.push(w / re(b));
    }
    let k = alpha.len();
    let t = DMatrix::<f64>::from_fn(k, k, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let y: Vec<Complex64> = (0..k)
        .map(|r| {
            (0..k)
                .map(|l| {
                    let phase = Complex64::from_polar(1.0, -eig.eigenvalues[l] * tau / hbar);
                    phase * eig.eigenvectors[(r, l)] * eig.eigenvectors[(0, l)]
                })
                .sum()
        })
        .collect();
    let mut out = CVector::zeros(h.nrows());
    for (q, yj) in basis.iter().zip(&y) {
        out += q * (*yj * beta0);
    }
    (out, residual * y[k - 1].norm() * beta0)
}

fn spectral_scale(h: &CMatrix) -> f64 {
    // row-sum bound, cheap and deterministic
    (0..h.nrows())
        .map(|r| h.row(r).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Short-time Lanczos stepping with step halving until the error estimate
/// is below `tol`.
pub fn krylov_propagate(h: &CMatrix, psi: &CVector, dt: f64, hbar: f64, m: usize, tol: f64) -> CVector {
    let mut out = psi.clone();
    let mut remaining = dt;
    let mut tau = dt;
    while remaining.abs() > 0.0 {
        let step = if tau.abs() > remaining.abs() { remaining } else { tau };
        let (next, err) = lanczos_exp(h, &out, step, hbar, m);
        if err > tol && step.abs() > dt.abs() * 1e-9 {
            tau = step / 2.0;
            continue;
        }
        out = next;
        remaining -= step;
        tau = step;
    }
    out
}

/// Heisenberg picture `A(t) = U† A U` with `U = exp(−iHt/ħ)`.
pub fn evolve_observable(h: &CMatrix, a: &CMatrix, t: f64, hbar: f64) -> Result<CMatrix, DynamicsError> {
    if h.shape() != a.shape() {
        return Err(DynamicsError::DimensionMismatch(h.nrows(), a.nrows()));
    }
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL {
        return Err(DynamicsError::NonHermitian(defect));
    }
    let u = propagator(h, t, hbar);
    Ok(mul(&mul(&u.adjoint(), a), &u))
}

/// `|⟨ψ0|A(t)|ψ0⟩ − ⟨ψ(t)|A|ψ(t)⟩|`.
pub fn picture_discrepancy(h: &CMatrix, a: &CMatrix, psi0: &CVector, t: f64, hbar: f64) -> Result<f64, DynamicsError> {
    Ok(picture_discrepancies(h, &[a], psi0, t, hbar)?[0])
}

/// [`picture_discrepancy`] for several observables sharing one propagator.
pub fn picture_discrepancies(
    h: &CMatrix,
    ops: &[&CMatrix],
    psi0: &CVector,
    t: f64,
    hbar: f64,
) -> Result<Vec<f64>, DynamicsError> {
    if h.nrows() != psi0.len() {
        return Err(DynamicsError::DimensionMismatch(h.nrows(), psi0.len()));
    }
    if let Some(a) = ops.iter().find(|a| a.shape() != h.shape()) {
        return Err(DynamicsError::DimensionMismatch(h.nrows(), a.nrows()));
    }
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL {
        return Err(DynamicsError::NonHermitian(defect));
    }
    let u = propagator(h, t, hbar);
    let ud = u.adjoint();
    let psi = &u * psi0;
    Ok(ops
        .iter()
        .map(|a| {
            let heis = expectation(&mul(&mul(&ud, a), &u), psi0);
            (heis - expectation(a, &psi)).norm()
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowComparison {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// `arg⟨ψ₂(t)|ψ₁(t)⟩` in `(−π, π]`.
    pub phase: Vec<f64>,
    pub min_fidelity: f64,
    pub unreliable: bool,
}

pub fn compare_flows(
    h1: &CMatrix,
    h2: &CMatrix,
    psi0: &CVector,
    times: &[f64],
    options: &EvolveOptions,
) -> Result<FlowComparison, DynamicsError> {
    if h1.shape() != h2.shape() {
        return Err(DynamicsError::DimensionMismatch(h1.nrows(), h2.nrows()));
    }
    let f1 = evolve_state(h1, psi0, times, options)?;
    let f2 = evolve_state(h2, psi0, times, options)?;
    let overlaps: Vec<Complex64> = f1.states.iter().zip(&f2.states).map(|(a, b)| b.dotc(a)).collect();
    let fidelity: Vec<f64> = overlaps.iter().map(|z| z.norm()).collect();
    Ok(FlowComparison {
        times: times.to_vec(),
        phase: overlaps.iter().map(|z| z.arg()).collect(),
        min_fidelity: fidelity.iter().copied().fold(f64::INFINITY, f64::min),
        fidelity,
        unreliable: f1.unreliable || f2.unreliable,
    })
}

/// Distance between two angles modulo `2π`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

#[derive(Clone, Debug, Serialize)]
pub struct EhrenfestReport {
    pub max_residual: f64,
    pub position_trace: Vec<Vec<f64>>,
    pub momentum_trace: Vec<Vec<f64>>,
    pub unreliable: bool,
}

/// Centered-difference residual of `d⟨X_i⟩/dt − ⟨P_i⟩/m` along the flow of `h`.
pub fn ehrenfest_residual(
    h: &CMatrix,
    xs: &[CMatrix],
    ps: &[CMatrix],
    mass: f64,
    psi0: &CVector,
    times: &[f64],
    options: &EvolveOptions,
) -> Result<EhrenfestReport, DynamicsError> {
    let flow = evolve_state(h, psi0, times, options)?;
    let xt: Vec<Vec<f64>> = xs.iter().map(|x| flow.expectation_trace(x)).collect();
    let pt: Vec<Vec<f64>> = ps.iter().map(|p| flow.expectation_trace(p)).collect();
    let mut worst: f64 = 0.0;
    for (x, p) in xt.iter().zip(&pt) {
        for k in 1..times.len().saturating_sub(1) {
            let dxdt = (x[k + 1] - x[k - 1]) / (times[k + 1] - times[k - 1]);
            worst = worst.max((dxdt - p[k] / mass).abs());
        }
    }
    Ok(EhrenfestReport { max_residual: worst, position_trace: xt, momentum_trace: pt, unreliable: flow.unreliable })
}

/// Ehrenfest residual for one particle under `P²/2m + V(X)`.
pub fn ehrenfest_check(
    rep: &ParticleRep,
    pot: &PotentialSpec,
    psi0: &CVector,
    times: &[f64],
) -> Result<EhrenfestReport, DynamicsError> {
    let h = hamiltonian_physical(&System::Single(rep), pot)?;
    let opts = EvolveOptions::default().with_hbar(rep.hbar()).with_boundary(rep.boundary_indices());
    ehrenfest_residual(&h, rep.xs(), rep.ps(), rep.mass(), psi0, times, &opts)
}

/// Checks that `2M̂Ĥ − P̂·P̂` is the scalar `2m𝒱` on the interior.
pub fn extra_casimir_check<R: Realization + ?Sized>(
    rep: &R,
    h: &CMatrix,
    cal_v: f64,
    margin: usize,
    tol: f64,
) -> Result<VerificationReport, DynamicsError> {
    let proj = rep.interior_projector(margin)?;
    let mut c = mul(rep.mass_matrix(), h) * re(2.0);
    for i in 0..rep.spatial_dims() {
        c -= mul(rep.p(i), rep.p(i));
    }
    let block = proj.project(&c);
    let n = block.nrows().max(1) as f64;
    let mean = block.trace().re / n;
    let nonscalar = spectral_norm(&(&block - identity(block.nrows()) * re(mean)));
    let target = 2.0 * rep.mass() * cal_v;
    let offset = (mean - target).abs();
    let mut report = VerificationReport::new("extra_casimir").with_tolerance(tol);
    report.metric("scalar_value", mean);
    report.metric("expected_value", target);
    report.metric("nonscalar_deviation", nonscalar);
    report.metric("offset_deviation", offset);
    if nonscalar > tol {
        report.violation(format!("2MH - P^2 is not scalar: deviation {nonscalar:.3e}"));
    }
    if offset > tol {
        report.violation(format!("scalar value {mean} differs from 2m calV = {target}"));
    }
    Ok(report)
}

/// `‖Π[Ĥ, Ĵ_ij]Π‖`, maximized over rotation generators.
pub fn rotation_invariance_defect<R: Realization + ?Sized>(
    rep: &R,
    h: &CMatrix,
    margin: usize,
) -> Result<f64, DynamicsError> {
    let proj = rep.interior_projector(margin)?;
    let d = rep.spatial_dims();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            if let Some(jij) = rep.j(i, j) {
                worst = worst.max(proj.projected_norm(&commutator(h, jij)));
            }
        }
    }
    Ok(worst)
}

/// Initial-state description shared by scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// Truncated coherent state, real amplitude per direction, spin index 0.
    Coherent { alpha: Vec<f64> },
    Fock {
        occupations: Vec<usize>,
        #[serde(default)]
        sigma: usize,
    },
    Vector {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
    /// Tensor product of one state per particle.
    Product { a: Box<StateSpec>, b: Box<StateSpec> },
}

impl StateSpec {
    pub fn for_particle(&self, rep: &ParticleRep) -> Result<CVector, DynamicsError> {
        match self {
            StateSpec::Coherent { alpha } => coherent_state(rep, alpha),
            StateSpec::Fock { occupations, sigma } => fock_state(rep, occupations, *sigma),
            StateSpec::Vector { re, im } => explicit_vector(re, im, rep.dim()),
            StateSpec::Product { .. } => Err(DynamicsError::BadState("product state for a single particle".into())),
        }
    }

    pub fn for_composite(&self, comp: &CompositeRep) -> Result<CVector, DynamicsError> {
        match self {
            StateSpec::Product { a, b } => Ok(product_state(&a.for_particle(&comp.a)?, &b.for_particle(&comp.b)?)),
            StateSpec::Vector { re, im } => explicit_vector(re, im, comp.dim()),
            _ => Err(DynamicsError::BadState("composite states are products or explicit vectors".into())),
        }
    }
}

fn explicit_vector(re_part: &[f64], im_part: &[f64], dim: usize) -> Result<CVector, DynamicsError> {
    if re_part.len() != dim || !(im_part.is_empty() || im_part.len() == dim) {
        return Err(DynamicsError::DimensionMismatch(dim, re_part.len()));
    }
    Ok(CVector::from_fn(dim, |i, _| Complex64::new(re_part[i], im_part.get(i).copied().unwrap_or(0.0))))
}

fn axis_coherent(levels: usize, alpha: f64) -> CVector {
    let mut v = CVector::zeros(levels);
    let mut amp = (-0.5 * alpha * alpha).exp();
    for n in 0..levels {
        if n > 0 {
            amp *= alpha / (n as f64).sqrt();
        }
        v[n] = re(amp);
    }
    v
}

pub fn coherent_state(rep: &ParticleRep, alpha: &[f64]) -> Result<CVector, DynamicsError> {
    let cfg = &rep.config;
    if alpha.len() != cfg.dims {
        return Err(DynamicsError::BadState(format!("need {} amplitudes, got {}", cfg.dims, alpha.len())));
    }
    let mut v = CVector::from_element(1, re(1.0));
    for a in alpha {
        v = v.kronecker(&axis_coherent(cfg.levels, *a));
    }
    let mut spin = CVector::zeros(cfg.spin.multiplicity());
    spin[0] = re(1.0);
    let v = v.kronecker(&spin);
    let norm = v.norm();
    Ok(v / re(norm))
}

pub fn fock_state(rep: &ParticleRep, occupations: &[usize], sigma: usize) -> Result<CVector, DynamicsError> {
    let cfg = &rep.config;
    if occupations.len() != cfg.dims
        || occupations.iter().any(|&n| n >= cfg.levels)
        || sigma >= cfg.spin.multiplicity()
    {
        return Err(DynamicsError::BadState(format!("Fock state {occupations:?}/{sigma} out of range")));
    }
    let mut v = CVector::zeros(rep.dim());
    v[rep.encode(occupations, sigma)] = re(1.0);
    Ok(v)
}

pub fn product_state(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Flow `e^{isG/ħ} ψ0` generated by a Hermitian `G` (rotations use `Ĵ`,
/// boosts `b·K̂`), through the same engine as time evolution.
pub fn transformation_flow(
    generator: &CMatrix,
    psi0: &CVector,
    params: &[f64],
    options: &EvolveOptions,
) -> Result<FlowResult, DynamicsError> {
    evolve_state(&(-generator), psi0, params, options)
}

/// Relative-motion Hamiltonian `Q²/2μ + V(R·R)` on a total-quanta triangle,
/// tensored with identity on the two spin factors.
pub fn relative_hamiltonian(
    space: &RelativeModeSpace,
    mu: f64,
    omega: f64,
    hbar: f64,
    pot: &PotentialSpec,
    spin_dim: usize,
) -> Result<CMatrix, DynamicsError> {
    if pot.kind == PotentialKind::PolynomialX {
        return Err(DynamicsError::PotentialMismatch { kind: pot.kind, system: "composite" });
    }
    pot.validate()?;
    let pad = (pot.degree() / 2).max(1);
    let coeffs = if pot.kind == PotentialKind::None { vec![] } else { pot.coefficients.clone() };
    let h = space.exact_operator(pad, mu, omega, hbar, |r, q| {
        let q2 = q.iter().fold(CMatrix::zeros(q[0].nrows(), q[0].nrows()), |acc, qi| acc + mul(qi, qi));
        let r2 = r.iter().fold(CMatrix::zeros(r[0].nrows(), r[0].nrows()), |acc, ri| acc + mul(ri, ri));
        q2 / re(2.0 * mu) + poly(&r2, &coeffs)
    });
    Ok(kron(&h, &identity(spin_dim)))
}

/// Parameters of a relative-motion conservation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeFlowConfig {
    pub m_a: f64,
    pub m_b: f64,
    #[serde(default)]
    pub s_a: Spin,
    #[serde(default)]
    pub s_b: Spin,
    pub n_max: usize,
    pub potential: PotentialSpec,
    pub t_grid: TimeGrid,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub omega_ref: f64,
}

fn one() -> f64 {
    1.0
}

/// Evolves a fixed spread-out state under the relative Hamiltonian and
/// records `(1/2) Ŝ_ij Ŝ^ij` with `Ŝ = R×Q + S_a + S_b`.
pub fn relative_spin_flow(cfg: &RelativeFlowConfig) -> Result<(FlowResult, f64), DynamicsError> {
    if cfg.m_a <= 0.0 || cfg.m_b <= 0.0 {
        return Err(RepError::NonPositiveMass(cfg.m_a.min(cfg.m_b)).into());
    }
    let space = RelativeModeSpace::new(cfg.n_max);
    let mu = cfg.m_a * cfg.m_b / (cfg.m_a + cfg.m_b);
    let spin_dim = cfg.s_a.multiplicity() * cfg.s_b.multiplicity();
    let h = relative_hamiltonian(&space, mu, cfg.omega_ref, cfg.hbar, &cfg.potential, spin_dim)?;
    let s = total_spin_components(&space, cfg.s_a, cfg.s_b, cfg.hbar, mu, cfg.omega_ref);
    let casimir = half_square(&s);
    let commutator_norm = s.iter().map(|sk| spectral_norm(&commutator(&h, sk))).fold(0.0, f64::max);
    let dim = h.nrows();
    let psi0 = spread_state(dim);
    let top = space.shell_range(cfg.n_max);
    let boundary: Vec<usize> = (top.start * spin_dim..top.end * spin_dim).collect();
    let opts = EvolveOptions::default().with_hbar(cfg.hbar).with_boundary(boundary);
    let mut flow = evolve_state(&h, &psi0, &cfg.t_grid.points(), &opts)?;
    flow.casimir_trace = Some(flow.expectation_trace(&casimir));
    Ok((flow, commutator_norm))
}

fn total_spin_components(space: &RelativeModeSpace, s_a: Spin, s_b: Spin, hbar: f64, mu: f64, omega: f64) -> [CMatrix; 3] {
    let orbital = |i: usize, j: usize| {
        space.exact_operator(1, mu, omega, hbar, |r, q| mul(&r[i], &q[j]) - mul(&q[i], &r[j]))
    };
    let l = [orbital(0, 1), orbital(0, 2), orbital(1, 2)];
    let (sa, sb) = (spin_matrices(s_a, hbar), spin_matrices(s_b, hbar));
    let (ia, ib, io) = (identity(sa.dim()), identity(sb.dim()), identity(space.dim()));
    let mk = |k: usize| {
        kron(&kron(&l[k], &ia), &ib)
            + kron(&kron(&io, &sa.components()[k]), &ib)
            + kron(&kron(&io, &ia), &sb.components()[k])
    };
    [mk(0), mk(1), mk(2)]
}

/// Deterministic normalized state with support on every basis vector.
pub fn spread_state(dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |i, _| {
        let x = i as f64 + 1.0;
        Complex64::new((0.7 * x).cos(), (1.3 * x).sin()) / x
    });
    let n = v.norm();
    v / re(n)
}

/// Spread of a trace around its first value.
pub fn max_drift(trace: &[f64]) -> f64 {
    let first = trace.first().copied().unwrap_or(0.0);
    trace.iter().map(|v| (v - first).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::rep::RepConfig;

    fn rep1(n: usize) -> ParticleRep {
        ParticleRep::new(RepConfig::new(1.0, 1, n)).unwrap()
    }

    #[test]
    fn galilei_equals_free_at_zero_cal_v() {
        let rep = rep1(8);
        let free = hamiltonian_physical(&System::Single(&rep), &PotentialSpec::none()).unwrap();
        assert_eq!(hamiltonian_galilei(&rep, 0.0), free);
    }

    #[test]
    fn potential_kind_mismatch() {
        let rep = rep1(4);
        let err = hamiltonian_physical(&System::Single(&rep), &PotentialSpec::polynomial_r2(vec![0.0, 1.0]));
        assert!(matches!(err, Err(DynamicsError::PotentialMismatch { .. })));
        let deg = hamiltonian_physical(&System::Single(&rep), &PotentialSpec::polynomial_x(vec![0.0; 6].into_iter().chain([1.0]).collect()));
        assert!(matches!(deg, Err(DynamicsError::DegreeTooHigh { .. })));
    }

    #[test]
    fn zero_time_is_identity() {
        let rep = rep1(10);
        let h = hamiltonian_physical(&System::Single(&rep), &PotentialSpec::harmonic(1.0)).unwrap();
        let psi = coherent_state(&rep, &[0.5]).unwrap();
        let flow = evolve_state(&h, &psi, &[0.0, 0.5], &EvolveOptions::default()).unwrap();
        assert_eq!(flow.states[0], psi);
    }

    #[test]
    fn input_validation() {
        let rep = rep1(4);
        let h = hamiltonian_galilei(&rep, 0.0);
        let psi = fock_state(&rep, &[1], 0).unwrap();
        let opts = EvolveOptions::default();
        assert!(matches!(evolve_state(&h, &(&psi * re(2.0)), &[0.0], &opts), Err(DynamicsError::NotNormalized(_))));
        assert!(matches!(evolve_state(&h, &psi, &[0.0, 0.0], &opts), Err(DynamicsError::BadGrid)));
        let mut bad = h.clone();
        bad[(0, 1)] += re(1e-6);
        assert!(matches!(evolve_state(&bad, &psi, &[0.0], &opts), Err(DynamicsError::NonHermitian(_))));
    }

    #[test]
    fn krylov_matches_dense() {
        let rep = rep1(24);
        let h = hamiltonian_physical(&System::Single(&rep), &PotentialSpec::harmonic(1.0)).unwrap();
        let psi = coherent_state(&rep, &[1.0]).unwrap();
        let times = TimeGrid { t_max: 2.0, steps: 10 }.points();
        let dense = evolve_state(&h, &psi, &times, &EvolveOptions::default().with_method(Method::Dense)).unwrap();
        let kry = evolve_state(&h, &psi, &times, &EvolveOptions::default().with_method(Method::Krylov)).unwrap();
        let diff = (dense.final_vector() - kry.final_vector()).norm();
        assert!(diff < 1e-9, "{diff}");
        assert!(kry.max_norm_deviation < 1e-10);
    }

    #[test]
    fn extra_casimir_values() {
        let rep = ParticleRep::new(RepConfig::new(2.0, 1, 8)).unwrap();
        let h = hamiltonian_galilei(&rep, 3.0);
        let report = extra_casimir_check(&rep, &h, 3.0, 1, 1e-10).unwrap();
        assert!(report.passed, "{report:?}");
        assert!((report.metrics["scalar_value"] - 12.0).abs() < 1e-10);
    }

    #[test]
    fn observable_identity_is_fixed() {
        let rep = rep1(6);
        let h = hamiltonian_physical(&System::Single(&rep), &PotentialSpec::harmonic(1.0)).unwrap();
        let out = evolve_observable(&h, &identity(6), 1.3, 1.0).unwrap();
        assert!(max_abs(&(out - identity(6))) < 1e-12);
    }

    #[test]
    fn phase_wrapping() {
        assert!(phase_distance(3.1, 3.1 - 2.0 * std::f64::consts::PI) < 1e-12);
        assert!((phase_distance(0.1, -0.1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn potential_json() {
        let p: PotentialSpec =
            serde_json::from_str(r#"{"kind":"polynomial_r2","coefficients":[0,0.5],"calV":2}"#).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.cal_v, 2.0);
        let s: StateSpec = serde_json::from_str(r#"{"preset":"coherent","alpha":[0.5]}"#).unwrap();
        assert_eq!(s, StateSpec::Coherent { alpha: vec![0.5] });
    }
}
