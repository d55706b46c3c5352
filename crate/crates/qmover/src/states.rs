//! Pure states, density matrices, fidelity, and the Werner family.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};

/// Unit vector in C^d.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Builds a state from amplitudes that are already normalized
    /// (‖ψ‖₂ = 1 within 1e-12).
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidParameter("state dimension must be >= 2".into()));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "state norm {norm} deviates from 1 by more than 1e-12"
            )));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalizes the given amplitudes; errors on the zero vector.
    pub fn from_unnormalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm < 1e-14 {
            return Err(Error::InvalidParameter("cannot normalize the zero vector".into()));
        }
        let scaled = amplitudes.iter().map(|z| z / norm).collect();
        PureState::new(scaled)
    }

    pub fn basis(d: usize, k: usize) -> Self {
        let mut amp = vec![C64::new(0.0, 0.0); d];
        amp[k] = C64::new(1.0, 0.0);
        PureState { amplitudes: amp }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// The orthogonal companion of a qubit state, unique up to phase.
    pub fn orthogonal_qubit(&self) -> Result<PureState> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(
                "orthogonal companion is only defined for qubits".into(),
            ));
        }
        PureState::new(vec![-self.amplitudes[1].conj(), self.amplitudes[0].conj()])
    }
}

/// Hermitian, trace-one, positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("density matrix must be square".into()));
        }
        let herm = matrix.hermitian_residual();
        if herm > 1e-10 {
            return Err(Error::NotHermitian { residual: herm, tol: 1e-10 });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} deviates from 1"
            )));
        }
        let min_eig = hermitian_eig(&matrix)?.min_eigenvalue();
        if min_eig < -1e-9 {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityMatrix { matrix: psi.projector() }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix { matrix: ComplexMatrix::identity(d).scale_re(1.0 / d as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨ψ|ρ|ψ⟩, clamped to [0, 1].
pub fn fidelity(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    fidelity_matrix(psi, rho.matrix())
}

/// Same as [`fidelity`] but on a raw operator; used when the output of a
/// non-positive map is not a valid `DensityMatrix`.
pub fn fidelity_matrix(psi: &PureState, rho: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != psi.dim() || rho.cols() != psi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} against operator {}x{}",
            psi.dim(),
            rho.rows(),
            rho.cols()
        )));
    }
    let f = rho.sandwich(psi.amplitudes(), psi.amplitudes()).re;
    Ok(f.clamp(0.0, 1.0))
}

/// |⟨ψ|φ⟩|².
pub fn projection_overlap(psi: &PureState, phi: &PureState) -> Result<f64> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "overlap between dimensions {} and {}",
            psi.dim(),
            phi.dim()
        )));
    }
    let ip: Complex64 = psi
        .amplitudes()
        .iter()
        .zip(phi.amplitudes())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(ip.norm_sqr().clamp(0.0, 1.0))
}

/// Tr[ρ²] of an arbitrary operator.
pub fn purity(rho: &ComplexMatrix) -> f64 {
    rho.matmul(rho).trace().re
}

/// The singlet (|01⟩ - |10⟩)/√2, with the first factor slow.
pub fn singlet() -> PureState {
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    PureState::new(vec![
        C64::new(0.0, 0.0),
        C64::new(inv_sqrt2, 0.0),
        C64::new(-inv_sqrt2, 0.0),
        C64::new(0.0, 0.0),
    ])
    .unwrap()
}

/// Werner state R_q = (1-q)/4·1⊗1 + q·|Ψ-⟩⟨Ψ-| for q in [0, 1].
pub fn werner_state(q: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("werner parameter q = {q} outside [0, 1]")));
    }
    let mixed = ComplexMatrix::identity(4).scale_re((1.0 - q) / 4.0);
    let sing = singlet().projector().scale_re(q);
    DensityMatrix::new(mixed.add(&sing))
}

/// Werner-state concurrence max{0, (3q-1)/2}.
pub fn werner_concurrence(q: f64) -> f64 {
    ((3.0 * q - 1.0) / 2.0).max(0.0)
}

/// Haar-random unit vector: d complex standard normals, normalized.
pub fn random_pure_state<R: Rng>(d: usize, rng: &mut R) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("state dimension {d} must be >= 2")));
    }
    let amp: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::from_unnormalized(amp)
}

/// A Haar-random orthonormal pair, obtained by rotating (e₁, e₂).
pub fn random_orthonormal_pair<R: Rng>(d: usize, rng: &mut R) -> Result<(Vec<C64>, Vec<C64>)> {
    let u = random_pure_state(d, rng)?;
    // Gram-Schmidt a second Gaussian vector against the first; retry on
    // (measure-zero) near-collinearity.
    for _ in 0..16 {
        let w = random_pure_state(d, rng)?;
        let ip: C64 = u
            .amplitudes()
            .iter()
            .zip(w.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let resid: Vec<C64> = w
            .amplitudes()
            .iter()
            .zip(u.amplitudes())
            .map(|(wi, ui)| wi - ip * ui)
            .collect();
        if vec_norm(&resid) > 1e-6 {
            let v = PureState::from_unnormalized(resid)?;
            return Ok((u.amplitudes().to_vec(), v.amplitudes().to_vec()));
        }
    }
    Err(Error::InvalidParameter("failed to draw an orthonormal pair".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fidelity_with_own_projector_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..6 {
            let psi = random_pure_state(d, &mut rng).unwrap();
            let rho = DensityMatrix::from_pure(&psi);
            assert!((fidelity(&psi, &rho).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_with_orthogonal_state_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let psi = random_pure_state(2, &mut rng).unwrap();
        let perp = psi.orthogonal_qubit().unwrap();
        let rho = DensityMatrix::from_pure(&perp);
        assert!(fidelity(&psi, &rho).unwrap() < 1e-12);
    }

    #[test]
    fn fidelity_with_maximally_mixed_is_inverse_dim() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for d in 2..6 {
            let psi = random_pure_state(d, &mut rng).unwrap();
            let rho = DensityMatrix::maximally_mixed(d);
            assert!((fidelity(&psi, &rho).unwrap() - 1.0 / d as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_invariant_under_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let psi = random_pure_state(3, &mut rng).unwrap();
        let rho = DensityMatrix::maximally_mixed(3);
        let phase = C64::from_polar(1.0, 1.234);
        let rotated =
            PureState::new(psi.amplitudes().iter().map(|z| z * phase).collect()).unwrap();
        let diff = fidelity(&psi, &rho).unwrap() - fidelity(&rotated, &rho).unwrap();
        assert!(diff.abs() < 1e-14);
    }

    #[test]
    fn fidelity_linear_in_mixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let psi = random_pure_state(3, &mut rng).unwrap();
        let rho1 = DensityMatrix::from_pure(&random_pure_state(3, &mut rng).unwrap());
        let rho2 = DensityMatrix::maximally_mixed(3);
        let lambda = 0.3;
        let mixed = DensityMatrix::new(
            rho1.matrix().scale_re(lambda).add(&rho2.matrix().scale_re(1.0 - lambda)),
        )
        .unwrap();
        let lhs = fidelity(&psi, &mixed).unwrap();
        let rhs = lambda * fidelity(&psi, &rho1).unwrap()
            + (1.0 - lambda) * fidelity(&psi, &rho2).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn projection_overlap_examples() {
        let psi = PureState::basis(2, 0);
        assert!((projection_overlap(&psi, &psi).unwrap() - 1.0).abs() < 1e-15);
        let plus = PureState::from_unnormalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)])
            .unwrap();
        assert!((projection_overlap(&psi, &plus).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn projection_overlap_matches_fidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let psi = random_pure_state(4, &mut rng).unwrap();
        let phi = random_pure_state(4, &mut rng).unwrap();
        let a = projection_overlap(&psi, &phi).unwrap();
        let b = fidelity(&psi, &DensityMatrix::from_pure(&phi)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn werner_extremes() {
        let r0 = werner_state(0.0).unwrap();
        assert!(r0.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale_re(0.25)) < 1e-15);
        let r1 = werner_state(1.0).unwrap();
        assert!(r1.matrix().max_abs_diff(&singlet().projector()) < 1e-15);
    }

    #[test]
    fn werner_half_spectrum() {
        // In the Bell basis R_q is diagonal: (1-q)/4 three times, (1+3q)/4 once.
        let e = hermitian_eig(werner_state(0.5).unwrap().matrix()).unwrap();
        for k in 0..3 {
            assert!((e.eigenvalues[k] - 0.125).abs() < 1e-12);
        }
        assert!((e.eigenvalues[3] - 0.625).abs() < 1e-12);
    }

    #[test]
    fn werner_valid_on_whole_range() {
        for k in 0..=20 {
            let q = k as f64 / 20.0;
            let rho = werner_state(q).unwrap();
            let min = hermitian_eig(rho.matrix()).unwrap().min_eigenvalue();
            assert!(min >= -1e-12);
        }
        assert!(werner_state(-0.1).is_err());
        assert!(werner_state(1.1).is_err());
    }

    #[test]
    fn concurrence_values() {
        assert_eq!(werner_concurrence(0.0), 0.0);
        assert_eq!(werner_concurrence(1.0 / 3.0), 0.0);
        assert!((werner_concurrence(1.0) - 1.0).abs() < 1e-15);
        // zero on [0, 1/3], strictly increasing beyond
        let mut prev = 0.0;
        for k in 0..=30 {
            let q = k as f64 / 30.0;
            let c = werner_concurrence(q);
            if q <= 1.0 / 3.0 + 1e-12 {
                assert!(c.abs() < 1e-12);
            } else {
                assert!(c > prev);
            }
            prev = c;
        }
    }

    #[test]
    fn random_state_is_deterministic_per_seed() {
        let a = random_pure_state(4, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = random_pure_state(4, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(a, b);
        assert!(random_pure_state(1, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn haar_first_component_moment() {
        // E[|⟨0|ψ⟩|²] = 1/d for Haar states.
        let d = 3;
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut acc = 0.0;
        for _ in 0..n {
            let psi = random_pure_state(d, &mut rng).unwrap();
            acc += psi.amplitudes()[0].norm_sqr();
        }
        let mean = acc / n as f64;
        assert!((mean - 1.0 / d as f64).abs() < 0.01);
    }

    #[test]
    fn orthonormal_pair_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (u, v) = random_orthonormal_pair(4, &mut rng).unwrap();
        let ip: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        assert!(ip.norm() < 1e-12);
        assert!((vec_norm(&u) - 1.0).abs() < 1e-12);
        assert!((vec_norm(&v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_rejects_bad_inputs() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err()); // trace 2
        let non_psd =
            ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(DensityMatrix::new(non_psd).is_err());
    }
}
