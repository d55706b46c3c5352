//! The map families under study and their analytic claims: the universal
//! inverter N_p, the witness family M^(p), CP thresholds, output purity,
//! the orthonormal-pair constraint system, and the scalar falsifier for
//! the pure-output no-go argument.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channels::{
    bloch_grid, bloch_state, is_completely_positive, SuperOperator,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::states::{
    fidelity_matrix, purity, random_orthonormal_pair, random_pure_state, werner_state, PureState,
};

/// Residual above which a grid scan counts as a falsification of the
/// constancy claims of the scalar model.
pub const FALSIFICATION_THRESHOLD: f64 = 1e-4;

/// Parameters of the universal inverter N_p on dimension d.
#[derive(Debug, Clone, Copy)]
pub struct InverterParams {
    pub d: usize,
    pub p: f64,
}

impl InverterParams {
    pub fn new(d: usize, p: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("inverter dimension {d} must be >= 2")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("fidelity parameter p = {p} outside [0, 1]")));
        }
        Ok(InverterParams { d, p })
    }

    pub fn cp_boundary(&self) -> f64 {
        1.0 / (self.d as f64 + 1.0)
    }
}

/// N(Λ) = (dp-1)/(d-1)·Λ + (1-p)/(d-1)·Tr[Λ]·1.
///
/// Trace preserving for every p; completely positive iff p ≥ 1/(d+1).
pub fn universal_inverter(params: &InverterParams) -> SuperOperator {
    let d = params.d as f64;
    let c_lin = (d * params.p - 1.0) / (d - 1.0);
    let c_tr = (1.0 - params.p) / (d - 1.0);
    let dim = params.d;
    SuperOperator::from_map(
        dim,
        move |m| {
            m.scale_re(c_lin)
                .add(&ComplexMatrix::identity(dim).scale(m.trace() * C64::new(c_tr, 0.0)))
        },
        format!("inverter(d={}, p={})", params.d, params.p),
    )
}

/// Closed-form output purity of N_p on pure inputs: p² + (1-p)²/(d-1).
///
/// With a = (1-p)/(d-1) the output is (p-a)·|ψ⟩⟨ψ| + a·𝟙, whose purity
/// is (p-a)² + 2(p-a)a + d·a² = p² + (d-1)a². Strictly below 1 for
/// p ∈ [1/(d+1), 1) and d ≥ 2.
pub fn output_purity(params: &InverterParams) -> f64 {
    let d = params.d as f64;
    let one_minus = 1.0 - params.p;
    params.p * params.p + one_minus * one_minus / (d - 1.0)
}

/// Numerical Tr[E(|ψ⟩⟨ψ|)²].
pub fn purity_check(e: &SuperOperator, psi: &PureState) -> Result<f64> {
    Ok(purity(&e.apply(&psi.projector())?))
}

#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub d: usize,
    pub empirical: f64,
    pub analytic_upper: f64,
    pub analytic_lower: f64,
    pub iterations: usize,
}

/// Bisection root of the minimal Choi eigenvalue of N_p over p ∈ [0, 1].
pub fn cp_threshold(d: usize, tol: f64) -> Result<ThresholdReport> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("threshold requires d >= 2, got {d}")));
    }
    // treat eigenvalues above -1e-12 as non-negative; at p = 1 the minimal
    // Choi eigenvalue is exactly zero up to roundoff
    let not_cp = |p: f64| -> Result<bool> {
        let e = universal_inverter(&InverterParams::new(d, p)?);
        Ok(is_completely_positive(&e, 1e-9)?.min_choi_eigenvalue < -1e-12)
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    if !not_cp(lo)? || not_cp(hi)? {
        return Err(Error::InvalidParameter("bisection bracket lost".into()));
    }
    let target = (tol * 1e-3).min(1e-12).max(1e-15);
    let mut iterations = 0;
    while hi - lo > target {
        let mid = 0.5 * (lo + hi);
        if not_cp(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdReport {
        d,
        empirical: 0.5 * (lo + hi),
        analytic_upper: 1.0 / (d as f64 + 1.0),
        analytic_lower: 1.0 / (2.0 * d as f64 - 1.0),
        iterations,
    })
}

/// σ_x, σ_y, σ_z.
pub fn pauli() -> [ComplexMatrix; 3] {
    let z = |re: f64, im: f64| C64::new(re, im);
    [
        ComplexMatrix::new(2, 2, vec![z(0.0, 0.0), z(1.0, 0.0), z(1.0, 0.0), z(0.0, 0.0)]).unwrap(),
        ComplexMatrix::new(2, 2, vec![z(0.0, 0.0), z(0.0, -1.0), z(0.0, 1.0), z(0.0, 0.0)]).unwrap(),
        ComplexMatrix::new(2, 2, vec![z(1.0, 0.0), z(0.0, 0.0), z(0.0, 0.0), z(-1.0, 0.0)]).unwrap(),
    ]
}

/// n̂·σ⃗ for a (normalized) axis.
pub fn pauli_along(axis: [f64; 3]) -> Result<ComplexMatrix> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if norm < 1e-12 {
        return Err(Error::InvalidParameter("witness axis must be nonzero".into()));
    }
    let [sx, sy, sz] = pauli();
    Ok(sx
        .scale_re(axis[0] / norm)
        .add(&sy.scale_re(axis[1] / norm))
        .add(&sz.scale_re(axis[2] / norm)))
}

/// Parameters of the witness family M^(p): the inverter plus a commutator
/// term i[Λ, Θ] with Θ Hermitian.
#[derive(Debug, Clone)]
pub struct WitnessParams {
    pub d: usize,
    pub p: f64,
    pub theta: ComplexMatrix,
}

impl WitnessParams {
    pub fn new(d: usize, p: f64, theta: ComplexMatrix) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("witness dimension {d} must be >= 2")));
        }
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("witness parameter p = {p} outside [0, 1)")));
        }
        if theta.rows() != d || theta.cols() != d {
            return Err(Error::DimensionMismatch("theta must be d×d".into()));
        }
        let herm = theta.hermitian_residual();
        if herm > 1e-12 {
            return Err(Error::NotHermitian { residual: herm, tol: 1e-12 });
        }
        Ok(WitnessParams { d, p, theta })
    }

    /// Qubit branch: Θ = √(p(1-p))·(n̂·σ⃗).
    pub fn qubit(p: f64, axis: [f64; 3]) -> Result<Self> {
        let theta = pauli_along(axis)?.scale_re((p * (1.0 - p)).sqrt());
        Self::new(2, p, theta)
    }
}

/// M^(p)(Λ) = N_p(Λ) + i[Λ, Θ]. The commutator is traceless and its
/// diagonal expectation on any |ψ⟩⟨ψ| vanishes, so the map stays trace
/// preserving and keeps the fidelity-p property of the inverter.
pub fn witness_map(params: &WitnessParams) -> Result<SuperOperator> {
    let inverter = universal_inverter(&InverterParams::new(params.d, params.p)?);
    let theta = params.theta.clone();
    let d = params.d;
    let p = params.p;
    Ok(SuperOperator::from_map(
        d,
        move |m| {
            let comm = m.matmul(&theta).sub(&theta.matmul(m));
            inverter.apply(m).unwrap().add(&comm.scale(C64::new(0.0, 1.0)))
        },
        format!("witness(d={d}, p={p})"),
    ))
}

/// Minimum output eigenvalue of M^(p) over a deterministic Bloch grid.
/// Bounded below by -1e-10 analytically: the output Bloch length obeys
/// |2w|² = (2p-1)² + 4p(1-p)sin²θ ≤ 1.
pub fn witness_positivity_d2(p: f64, axis: [f64; 3], grid: (usize, usize)) -> Result<f64> {
    let map = witness_map(&WitnessParams::qubit(p, axis)?)?;
    let mut min = f64::INFINITY;
    for (theta, phi) in bloch_grid(grid.0, grid.1) {
        let out = map.apply(&bloch_state(theta, phi).projector())?;
        min = min.min(hermitian_eig(&out)?.min_eigenvalue());
    }
    Ok(min)
}

/// The fourth eigenvalue of (M^(p)⊗I)(R_q): λ(q,p) = qp/2 - (3q-1)/4.
pub fn lambda_formula(q: f64, p: f64) -> f64 {
    q * p / 2.0 - (3.0 * q - 1.0) / 4.0
}

/// Smallest p at which λ(q, p) turns non-negative; 0 for separable q ≤ 1/3.
pub fn critical_p(q: f64) -> f64 {
    if q <= 1.0 / 3.0 {
        0.0
    } else {
        (3.0 * q - 1.0) / (2.0 * q)
    }
}

/// The same boundary expressed through the Werner concurrence C:
/// (3/2)·(1 - 1/(2C+1)).
pub fn critical_p_from_concurrence(c: f64) -> f64 {
    1.5 * (1.0 - 1.0 / (2.0 * c + 1.0))
}

/// Ascending eigenvalues of (M^(p)⊗I)(R_q).
pub fn witness_eigen_scan(q: f64, p: f64, axis: [f64; 3]) -> Result<Vec<f64>> {
    let map = witness_map(&WitnessParams::qubit(p, axis)?)?.extend(2);
    let out = map.apply(werner_state(q)?.matrix())?;
    Ok(hermitian_eig(&out)?.eigenvalues)
}

#[derive(Debug, Clone)]
pub struct WitnessScanRow {
    pub q: f64,
    pub p: f64,
    pub lambda_formula: f64,
    pub lambda_numeric: f64,
    pub min_other: f64,
    pub detected: bool,
}

/// One cell of the Werner witness scan: the numerically closest eigenvalue
/// to λ(q,p) is matched, the remaining three are reported through their
/// minimum, and detection means a sub-threshold negative eigenvalue.
pub fn witness_scan_cell(q: f64, p: f64, axis: [f64; 3], detect_tol: f64) -> Result<WitnessScanRow> {
    let eigs = witness_eigen_scan(q, p, axis)?;
    let formula = lambda_formula(q, p);
    let (idx, _) = eigs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - formula).abs().partial_cmp(&(b.1 - formula).abs()).unwrap())
        .unwrap();
    let lambda_numeric = eigs[idx];
    let min_other = eigs
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != idx)
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    Ok(WitnessScanRow {
        q,
        p,
        lambda_formula: formula,
        lambda_numeric,
        min_other,
        detected: lambda_numeric < -detect_tol,
    })
}

/// The sixteen quantities ⟨jkℓm⟩ = ⟨j|E(|k⟩⟨ℓ|)|m⟩ for a chosen
/// orthonormal pair; index 0 is the first vector, 1 the second.
#[derive(Debug, Clone)]
pub struct ConstraintTensor {
    entries: [[[[C64; 2]; 2]; 2]; 2],
}

impl ConstraintTensor {
    pub fn get(&self, j: usize, k: usize, l: usize, m: usize) -> C64 {
        self.entries[j][k][l][m]
    }

    /// Max violation of the adjoint symmetry ⟨jkℓm⟩ = ⟨mℓkj⟩*.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    for m in 0..2 {
                        let diff = self.entries[j][k][l][m] - self.entries[m][l][k][j].conj();
                        worst = worst.max(diff.norm());
                    }
                }
            }
        }
        worst
    }
}

/// Constraint tensor over two arbitrary orthonormal vectors.
pub fn constraint_tensor_for_pair(
    e: &SuperOperator,
    u: &[C64],
    v: &[C64],
) -> Result<ConstraintTensor> {
    let d = e.d();
    if u.len() != d || v.len() != d {
        return Err(Error::DimensionMismatch("pair vectors must have length d".into()));
    }
    let basis = [u, v];
    let mut entries = [[[[C64::new(0.0, 0.0); 2]; 2]; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let image = e.apply(&ComplexMatrix::outer(basis[k], basis[l]))?;
            for j in 0..2 {
                for m in 0..2 {
                    entries[j][k][l][m] = image.sandwich(basis[j], basis[m]);
                }
            }
        }
    }
    Ok(ConstraintTensor { entries })
}

/// Constraint tensor over two canonical basis indices k ≠ k′.
pub fn constraint_tensor(e: &SuperOperator, k: usize, k_prime: usize) -> Result<ConstraintTensor> {
    let d = e.d();
    if k >= d || k_prime >= d {
        return Err(Error::InvalidParameter(format!(
            "basis indices ({k}, {k_prime}) out of range for d = {d}"
        )));
    }
    if k == k_prime {
        return Err(Error::InvalidParameter("constraint tensor needs two distinct indices".into()));
    }
    let u = PureState::basis(d, k);
    let v = PureState::basis(d, k_prime);
    constraint_tensor_for_pair(e, u.amplitudes(), v.amplitudes())
}

#[derive(Debug, Clone)]
pub struct KrausBoundCheck {
    pub max_entry_abs: f64,
    pub bound: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone)]
pub struct ConstraintReport {
    /// |2p - (⟨kk′k′k⟩ + ⟨k′kkk′⟩ + 2Re⟨kkk′k′⟩)|, max over pairs.
    pub max_line1: f64,
    /// |⟨kk′kk′⟩|, max over pairs.
    pub max_line2: f64,
    /// |⟨kkkk′⟩ + ⟨kk′kk⟩|, max over pairs.
    pub max_line3: f64,
    /// |1 - (1/d)·Σ_{k,k′}⟨k′kkk′⟩| on the canonical basis.
    pub trace_residual: f64,
    /// |Σ_{k≠k′}⟨kkk′k′⟩ - d(dp-1)| on the canonical basis.
    pub sum_rule_residual: f64,
    /// |⟨kkk′k′⟩| ≤ p, checked only when a Kraus form is attached.
    pub kraus_bound: Option<KrausBoundCheck>,
}

impl ConstraintReport {
    pub fn max_residual(&self) -> f64 {
        self.max_line1
            .max(self.max_line2)
            .max(self.max_line3)
            .max(self.trace_residual)
            .max(self.sum_rule_residual)
    }
}

fn pair_residuals(t: &ConstraintTensor, p: f64) -> (f64, f64, f64) {
    let line1 = (2.0 * p
        - (t.get(0, 1, 1, 0).re + t.get(1, 0, 0, 1).re + 2.0 * t.get(0, 0, 1, 1).re))
        .abs()
        .max(t.get(0, 1, 1, 0).im.abs() + t.get(1, 0, 0, 1).im.abs());
    let line2 = t.get(0, 1, 0, 1).norm();
    let line3 = (t.get(0, 0, 0, 1) + t.get(0, 1, 0, 0)).norm();
    (line1, line2, line3)
}

/// Checks the orthonormal-pair constraint system, the entangled-trace
/// identity, and the Cauchy-Schwarz bound against a claimed fidelity p.
pub fn check_gqm_constraints(
    e: &SuperOperator,
    p: f64,
    pairs: usize,
    seed: u64,
    tol: f64,
) -> Result<ConstraintReport> {
    let d = e.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_line1 = 0.0f64;
    let mut max_line2 = 0.0f64;
    let mut max_line3 = 0.0f64;

    // Canonical pairs first, then Haar-rotated pairs.
    for k in 0..d {
        for k_prime in 0..d {
            if k == k_prime {
                continue;
            }
            let t = constraint_tensor(e, k, k_prime)?;
            let (l1, l2, l3) = pair_residuals(&t, p);
            max_line1 = max_line1.max(l1);
            max_line2 = max_line2.max(l2);
            max_line3 = max_line3.max(l3);
        }
    }
    for _ in 0..pairs {
        let (u, v) = random_orthonormal_pair(d, &mut rng)?;
        let t = constraint_tensor_for_pair(e, &u, &v)?;
        let (l1, l2, l3) = pair_residuals(&t, p);
        max_line1 = max_line1.max(l1);
        max_line2 = max_line2.max(l2);
        max_line3 = max_line3.max(l3);
    }

    // Full-basis identities.
    let entry = |j: &PureState, k: &PureState, l: &PureState, m: &PureState| -> Result<C64> {
        let image = e.apply(&ComplexMatrix::outer(k.amplitudes(), l.amplitudes()))?;
        Ok(image.sandwich(j.amplitudes(), m.amplitudes()))
    };
    let basis: Vec<PureState> = (0..d).map(|k| PureState::basis(d, k)).collect();
    let mut trace_sum = C64::new(0.0, 0.0);
    let mut pair_sum = C64::new(0.0, 0.0);
    for k in 0..d {
        for k_prime in 0..d {
            trace_sum += entry(&basis[k_prime], &basis[k], &basis[k], &basis[k_prime])?;
            if k != k_prime {
                pair_sum += entry(&basis[k], &basis[k], &basis[k_prime], &basis[k_prime])?;
            }
        }
    }
    let df = d as f64;
    let trace_residual = (trace_sum / C64::new(df, 0.0) - C64::new(1.0, 0.0)).norm();
    let sum_rule_residual = (pair_sum - C64::new(df * (df * p - 1.0), 0.0)).norm();

    let kraus_bound = if e.kraus().is_some() {
        let mut worst = 0.0f64;
        for k in 0..d {
            for k_prime in 0..d {
                if k != k_prime {
                    worst = worst
                        .max(entry(&basis[k], &basis[k], &basis[k_prime], &basis[k_prime])?.norm());
                }
            }
        }
        Some(KrausBoundCheck { max_entry_abs: worst, bound: p, satisfied: worst <= p + tol })
    } else {
        None
    };

    Ok(ConstraintReport {
        max_line1,
        max_line2,
        max_line3,
        trace_residual,
        sum_rule_residual,
        kraus_bound,
    })
}

#[derive(Debug, Clone)]
pub struct GqmVerdict {
    pub is_gqm: bool,
    pub max_deviation: f64,
}

/// Samples Haar states and checks |⟨ψ|E(|ψ⟩⟨ψ|)|ψ⟩ - p| ≤ tol for each.
pub fn is_gqm(e: &SuperOperator, p: f64, samples: usize, seed: u64, tol: f64) -> Result<GqmVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let psi = random_pure_state(e.d(), &mut rng)?;
        let out = e.apply(&psi.projector())?;
        let f = fidelity_matrix(&psi, &out)?;
        worst = worst.max((f - p).abs());
    }
    Ok(GqmVerdict { is_gqm: worst <= tol, max_deviation: worst })
}

/// The scalar model of the pure-output argument: overlaps of the would-be
/// outputs of an orthonormal pair (η₁ = ⟨k′|k_p⟩, η₂ = ⟨k|k′_p⟩), the free
/// phases of the diagonal overlaps, and the ancilla overlap h.
///
/// Forcing η₁ = η₂ = 0 for every orthonormal partner of |k⟩ reproduces the
/// contradiction ‖|k_p⟩‖² = |⟨k|k_p⟩|² = p < 1 against unit normalization;
/// see `unit_norm_contradiction` in the tests.
#[derive(Debug, Clone)]
pub struct NoGoScalarModel {
    pub p: f64,
    pub phi: f64,
    pub phi_prime: f64,
    pub eta1: C64,
    pub eta2: C64,
    pub h: C64,
}

impl NoGoScalarModel {
    pub fn new(p: f64, phi: f64, phi_prime: f64, eta1: C64, eta2: C64, h: C64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("no-go model requires p in [0, 1), got {p}")));
        }
        if h.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!("|h| = {} exceeds 1", h.norm())));
        }
        Ok(NoGoScalarModel { p, phi, phi_prime, eta1, eta2, h })
    }

    fn with_eta_zero(&self) -> Self {
        let mut m = self.clone();
        m.eta1 = C64::new(0.0, 0.0);
        m.eta2 = C64::new(0.0, 0.0);
        m
    }

    fn phase_matched(&self) -> Self {
        let mut m = self.with_eta_zero();
        m.h = C64::from_polar(1.0, self.phi_prime - self.phi);
        m
    }
}

/// F(α, β) = |c₁|² + |c₂|² + 2Re(c₁* c₂ h*) with
/// c₁ = |α|²√p·e^{iφ} + αβ*η₁ and c₂ = |β|²√p·e^{iφ′} + α*βη₂.
pub fn appendix_a_f(model: &NoGoScalarModel, alpha: C64, beta: C64) -> Result<f64> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "(α, β) not normalized: |α|²+|β|² = {norm}"
        )));
    }
    let sqrt_p = model.p.sqrt();
    let c1 = C64::from_polar(alpha.norm_sqr() * sqrt_p, model.phi) + alpha * beta.conj() * model.eta1;
    let c2 = C64::from_polar(beta.norm_sqr() * sqrt_p, model.phi_prime)
        + alpha.conj() * beta * model.eta2;
    Ok(c1.norm_sqr() + c2.norm_sqr() + 2.0 * (c1.conj() * c2 * model.h.conj()).re)
}

/// The amplitude grid of the scalar falsifier: 32 magnitudes × 32 relative
/// phases × 8 global phases.
fn amplitude_grid() -> impl Iterator<Item = (C64, C64)> {
    let (n_mag, n_rel, n_glob) = (32usize, 32usize, 8usize);
    (0..n_mag).flat_map(move |im| {
        let a = (im as f64 + 0.5) / n_mag as f64;
        let b = (1.0 - a * a).sqrt();
        (0..n_rel).flat_map(move |ir| {
            let rel = 2.0 * std::f64::consts::PI * ir as f64 / n_rel as f64;
            (0..n_glob).map(move |ig| {
                let glob = 2.0 * std::f64::consts::PI * ig as f64 / n_glob as f64;
                (C64::from_polar(a, glob), C64::from_polar(b, glob + rel))
            })
        })
    })
}

/// Max residual of the constancy system over the grid: for p ≠ 0 the two
/// combinations F(α,β) - F(α,-β) and F(α,β)+F(α,-β)-F(α,iβ)-F(α,-iβ);
/// for p = 0 the single combination F(α,β)+F(α,iβ). With `early_exit`
/// the scan stops as soon as the threshold is exceeded.
fn combination_residual(model: &NoGoScalarModel, early_exit: Option<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for (alpha, beta) in amplitude_grid() {
        let f = appendix_a_f(model, alpha, beta)?;
        let resid = if model.p != 0.0 {
            let fm = appendix_a_f(model, alpha, -beta)?;
            let fi = appendix_a_f(model, alpha, beta * C64::new(0.0, 1.0))?;
            let fmi = appendix_a_f(model, alpha, beta * C64::new(0.0, -1.0))?;
            (f - fm).abs().max((f + fm - fi - fmi).abs())
        } else {
            let fi = appendix_a_f(model, alpha, beta * C64::new(0.0, 1.0))?;
            (f + fi).abs()
        };
        worst = worst.max(resid);
        if let Some(threshold) = early_exit {
            if worst > threshold {
                return Ok(worst);
            }
        }
    }
    Ok(worst)
}

fn constancy_residual(model: &NoGoScalarModel) -> Result<f64> {
    let mut worst = 0.0f64;
    for (alpha, beta) in amplitude_grid() {
        worst = worst.max((appendix_a_f(model, alpha, beta)? - model.p).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct NoGoReport {
    pub trials: usize,
    pub falsified_count: usize,
    /// Combination residual with η₁ = η₂ = 0 (any h); must vanish.
    pub max_combination_residual_at_solution: f64,
    /// |F - p| with η₁ = η₂ = 0 and h = e^{i(φ′-φ)}; must vanish.
    pub max_constancy_residual_at_solution: f64,
}

/// Draws random nonzero-η scalar models and reports how many the grid
/// scan falsifies, plus confirmation that the η = 0 solution survives.
pub fn appendix_a_solve(p: f64, trials: usize, seed: u64) -> Result<NoGoReport> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("no-go solve requires p in [0, 1), got {p}")));
    }
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_pi = 2.0 * std::f64::consts::PI;
    let draw_model = |rng: &mut ChaCha8Rng| -> Result<NoGoScalarModel> {
        let phi = rng.gen::<f64>() * two_pi;
        let phi_prime = rng.gen::<f64>() * two_pi;
        // nonzero overlaps, bounded away from zero so the grid residual
        // is well above the falsification threshold
        let eta1 = C64::from_polar(0.05 + 0.45 * rng.gen::<f64>(), rng.gen::<f64>() * two_pi);
        let eta2 = C64::from_polar(0.05 + 0.45 * rng.gen::<f64>(), rng.gen::<f64>() * two_pi);
        let h = C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen::<f64>() * two_pi);
        NoGoScalarModel::new(p, phi, phi_prime, eta1, eta2, h)
    };

    let mut falsified = 0;
    let mut last = None;
    for _ in 0..trials {
        let model = draw_model(&mut rng)?;
        if combination_residual(&model, Some(FALSIFICATION_THRESHOLD))? > FALSIFICATION_THRESHOLD {
            falsified += 1;
        }
        last = Some(model);
    }
    let reference = last.expect("trials >= 1");
    Ok(NoGoReport {
        trials,
        falsified_count: falsified,
        max_combination_residual_at_solution: combination_residual(
            &reference.with_eta_zero(),
            None,
        )?,
        max_constancy_residual_at_solution: constancy_residual(&reference.phase_matched())?,
    })
}

/// The regrouped fidelity expression in terms of the pair tensor:
///
/// G(α,β) = 2Re[ (|α|⁴+|β|⁴)p/2
///             + |α³β|(e^{iθ}⟨kkkk′⟩ + e^{-iθ}⟨kkk′k⟩)
///             + |αβ³|(e^{-iθ}⟨k′k′k′k⟩ + e^{iθ}⟨k′k′kk′⟩)
///             + |αβ|²(⟨kk′k′k⟩ + ⟨kkk′k′⟩ + e^{2iθ}⟨kk′kk′⟩) ]
///
/// with θ = arg(α*β). For the tensor of any fidelity-p map this is
/// identically p.
pub fn appendix_b_g(t: &ConstraintTensor, p: f64, alpha: C64, beta: C64) -> Result<f64> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "(α, β) not normalized: |α|²+|β|² = {norm}"
        )));
    }
    let (am, bm) = (alpha.norm(), beta.norm());
    let theta = (alpha.conj() * beta).arg();
    let ph = |k: f64| C64::from_polar(1.0, k * theta);
    let inner = C64::new((am.powi(4) + bm.powi(4)) * p / 2.0, 0.0)
        + (ph(1.0) * t.get(0, 0, 0, 1) + ph(-1.0) * t.get(0, 0, 1, 0))
            * C64::new(am.powi(3) * bm, 0.0)
        + (ph(-1.0) * t.get(1, 1, 1, 0) + ph(1.0) * t.get(1, 1, 0, 1))
            * C64::new(am * bm.powi(3), 0.0)
        + (t.get(0, 1, 1, 0) + t.get(0, 0, 1, 1) + ph(2.0) * t.get(0, 1, 0, 1))
            * C64::new(am * am * bm * bm, 0.0);
    Ok(2.0 * inner.re)
}

/// Max residual of the three phase-averaging identities of G at one (α, β):
/// the four-point average equals 4p and the two difference combinations
/// vanish for a fidelity-p tensor.
pub fn appendix_b_fourier_residual(
    t: &ConstraintTensor,
    p: f64,
    alpha: C64,
    beta: C64,
) -> Result<f64> {
    let i = C64::new(0.0, 1.0);
    let g = appendix_b_g(t, p, alpha, beta)?;
    let gm = appendix_b_g(t, p, alpha, -beta)?;
    let gi = appendix_b_g(t, p, alpha, beta * i)?;
    let gmi = appendix_b_g(t, p, alpha, -beta * i)?;
    let r1 = (g + gm + gi + gmi - 4.0 * p).abs();
    let r2 = (g + gm - gi - gmi).abs();
    let r3 = (g - gm).abs();
    Ok(r1.max(r2).max(r3))
}

/// Max sampled value of ⟨ψ⊥|E(|ψ⟩⟨ψ|)|ψ⊥⟩ on qubits; for N_p this equals
/// 1-p, and at the CP boundary p = 1/3 it attains the optimal 2/3.
pub fn qubit_unot_bound_check(e: &SuperOperator, samples: usize, seed: u64) -> Result<f64> {
    if e.d() != 2 {
        return Err(Error::DimensionMismatch(
            "the orthogonal-component bound is a qubit statement".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples.max(1) {
        let psi = random_pure_state(2, &mut rng)?;
        let perp = psi.orthogonal_qubit()?;
        let out = e.apply(&psi.projector())?;
        worst = worst.max(out.sandwich(perp.amplitudes(), perp.amplitudes()).re);
    }
    Ok(worst)
}
