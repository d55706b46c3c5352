//! Superoperators: linear maps on d×d operators held as d²×d² action
//! matrices on column-stacked vectors, with optional Kraus and Choi views.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    devectorize, hermitian_eig, tensor, vectorize, ComplexMatrix, C64,
};
use crate::states::{random_pure_state, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiNormalization {
    Unnormalized,
    StateNormalized,
}

#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub matrix: ComplexMatrix,
    pub normalization: ChoiNormalization,
}

/// Linear map on d×d operators.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    d: usize,
    action: ComplexMatrix,
    kraus: Option<Vec<ComplexMatrix>>,
    label: String,
}

impl SuperOperator {
    pub fn from_action(d: usize, action: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if action.rows() != d * d || action.cols() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "action matrix must be {0}x{0} for d = {d}",
                d * d
            )));
        }
        Ok(SuperOperator { d, action, kraus: None, label: label.into() })
    }

    /// Builds the action matrix column by column from the images of the
    /// matrix units |i⟩⟨j|.
    pub fn from_map(
        d: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
        label: impl Into<String>,
    ) -> Self {
        let dd = d * d;
        let mut action = ComplexMatrix::zeros(dd, dd);
        for j in 0..d {
            for i in 0..d {
                let col = j * d + i; // vec index of |i⟩⟨j|
                let image = f(&ComplexMatrix::basis_unit(d, i, j));
                let v = vectorize(&image);
                for (row, z) in v.into_iter().enumerate() {
                    action.set(row, col, z);
                }
            }
        }
        SuperOperator { d, action, kraus: None, label: label.into() }
    }

    pub fn from_kraus(d: usize, kraus: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        for k in &kraus {
            if k.rows() != d || k.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {}x{} does not match d = {d}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        // vec(K M K†) = (conj(K) ⊗ K) vec(M) under column stacking.
        let mut action = ComplexMatrix::zeros(d * d, d * d);
        for k in &kraus {
            let conj_k = ComplexMatrix::from_fn(d, d, |i, j| k.get(i, j).conj());
            action = action.add(&tensor(&conj_k, k));
        }
        Ok(SuperOperator { d, action, kraus: Some(kraus), label: label.into() })
    }

    pub fn identity(d: usize) -> Self {
        SuperOperator {
            d,
            action: ComplexMatrix::identity(d * d),
            kraus: Some(vec![ComplexMatrix::identity(d)]),
            label: "identity".into(),
        }
    }

    pub fn transpose_map(d: usize) -> Self {
        Self::from_map(d, |m| m.transpose(), "transpose")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn action(&self) -> &ComplexMatrix {
        &self.action
    }

    pub fn kraus(&self) -> Option<&[ComplexMatrix]> {
        self.kraus.as_deref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Attaches Kraus operators extracted from the Choi eigendecomposition.
    /// Fails if the map is not completely positive within `tol`.
    pub fn with_kraus_from_choi(mut self, tol: f64) -> Result<Self> {
        self.kraus = Some(kraus_from_choi_impl(&self, tol)?);
        Ok(self)
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.d || m.cols() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "apply expects a {0}x{0} operator, got {1}x{2}",
                self.d,
                m.rows(),
                m.cols()
            )));
        }
        devectorize(&self.action.mul_vec(&vectorize(m)), self.d)
    }

    /// Choi matrix J(E) = Σ_ij E(|i⟩⟨j|) ⊗ |i⟩⟨j| with the output factor
    /// first (slow); the state-normalized variant is J/d.
    pub fn choi(&self, normalization: ChoiNormalization) -> ChoiMatrix {
        let d = self.d;
        let mut j = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for jj in 0..d {
                let image = self.apply(&ComplexMatrix::basis_unit(d, i, jj)).unwrap();
                j = j.add(&tensor(&image, &ComplexMatrix::basis_unit(d, i, jj)));
            }
        }
        let matrix = match normalization {
            ChoiNormalization::Unnormalized => j,
            ChoiNormalization::StateNormalized => j.scale_re(1.0 / d as f64),
        };
        ChoiMatrix { matrix, normalization }
    }

    /// The action of E ⊗ I on a (d·d_a)-dimensional space, with the
    /// original system as the first (slow) factor.
    pub fn extend(&self, d_a: usize) -> SuperOperator {
        let d = self.d;
        let big = d * d_a;
        let blockwise = |m: &ComplexMatrix| -> ComplexMatrix {
            let mut out = ComplexMatrix::zeros(big, big);
            for a1 in 0..d_a {
                for a2 in 0..d_a {
                    let block = ComplexMatrix::from_fn(d, d, |s1, s2| {
                        m.get(s1 * d_a + a1, s2 * d_a + a2)
                    });
                    let image = self.apply(&block).unwrap();
                    for s1 in 0..d {
                        for s2 in 0..d {
                            out.set(s1 * d_a + a1, s2 * d_a + a2, image.get(s1, s2));
                        }
                    }
                }
            }
            out
        };
        SuperOperator::from_map(big, blockwise, format!("{}⊗I{}", self.label, d_a))
    }
}

fn kraus_from_choi_impl(e: &SuperOperator, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let d = e.d();
    let choi = e.choi(ChoiNormalization::Unnormalized);
    let eig = hermitian_eig(&choi.matrix)?;
    if eig.min_eigenvalue() < -tol {
        return Err(Error::InvalidParameter(format!(
            "map is not CP (min Choi eigenvalue {:.3e}); no Kraus form",
            eig.min_eigenvalue()
        )));
    }
    let mut kraus = Vec::new();
    for k in 0..d * d {
        let lam = eig.eigenvalues[k];
        if lam <= tol {
            continue;
        }
        let v = eig.eigenvector(k);
        let op = ComplexMatrix::from_fn(d, d, |r, i| v[r * d + i] * C64::new(lam.sqrt(), 0.0));
        kraus.push(op);
    }
    Ok(kraus)
}

#[derive(Debug, Clone)]
pub struct CpVerdict {
    pub is_cp: bool,
    pub min_choi_eigenvalue: f64,
}

/// CP test: minimal eigenvalue of the unnormalized Choi matrix against -tol.
pub fn is_completely_positive(e: &SuperOperator, tol: f64) -> Result<CpVerdict> {
    let choi = e.choi(ChoiNormalization::Unnormalized);
    let herm = choi.matrix.hermitian_residual();
    if herm > tol.max(1e-9) * (1.0 + choi.matrix.frobenius_norm()) {
        return Err(Error::NotHermitian { residual: herm, tol });
    }
    let min = hermitian_eig(&choi.matrix)?.min_eigenvalue();
    Ok(CpVerdict { is_cp: min >= -tol, min_choi_eigenvalue: min })
}

#[derive(Debug, Clone)]
pub struct TpVerdict {
    pub is_tp: bool,
    pub max_residual: f64,
}

/// TP test on all matrix units: Tr[E(|i⟩⟨j|)] must equal δ_ij.
pub fn is_trace_preserving(e: &SuperOperator, tol: f64) -> TpVerdict {
    let d = e.d();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let unit = ComplexMatrix::basis_unit(d, i, j);
            let tr_in = unit.trace();
            let tr_out = e.apply(&unit).unwrap().trace();
            worst = worst.max((tr_out - tr_in).norm());
        }
    }
    TpVerdict { is_tp: worst <= tol, max_residual: worst }
}

#[derive(Debug, Clone)]
pub struct PositivityVerdict {
    pub positive: bool,
    pub worst_eigenvalue: f64,
    pub worst_state: PureState,
}

/// Sampled positivity check on pure-state inputs. For d = 2 a deterministic
/// 64×128 Bloch grid is scanned in addition to the Haar samples. A negative
/// verdict is a certificate; a positive one is only evidence.
pub fn is_positive_sampled(
    e: &SuperOperator,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PositivityVerdict> {
    if samples < 1 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let d = e.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut worst_state = PureState::basis(d, 0);

    let mut consider = |psi: PureState| -> Result<()> {
        let out = e.apply(&psi.projector())?;
        let min = hermitian_eig(&out)?.min_eigenvalue();
        if min < worst {
            worst = min;
            worst_state = psi;
        }
        Ok(())
    };

    for _ in 0..samples {
        consider(random_pure_state(d, &mut rng)?)?;
    }
    if d == 2 {
        for (theta, phi) in bloch_grid(64, 128) {
            consider(bloch_state(theta, phi))?;
        }
    }
    Ok(PositivityVerdict { positive: worst >= -tol, worst_eigenvalue: worst, worst_state })
}

/// Midpoint polar × azimuthal grid over the Bloch sphere.
pub fn bloch_grid(n_polar: usize, n_azimuthal: usize) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(n_polar * n_azimuthal);
    for i in 0..n_polar {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / n_polar as f64;
        for j in 0..n_azimuthal {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_azimuthal as f64;
            pts.push((theta, phi));
        }
    }
    pts
}

pub fn bloch_state(theta: f64, phi: f64) -> PureState {
    PureState::new(vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ])
    .unwrap()
}

/// Weighted sum of action matrices; weights must be a probability vector.
pub fn convex_combine(maps: &[(SuperOperator, f64)]) -> Result<SuperOperator> {
    if maps.is_empty() {
        return Err(Error::InvalidParameter("convex combination of zero maps".into()));
    }
    let d = maps[0].0.d();
    let mut total = 0.0;
    for (m, w) in maps {
        if m.d() != d {
            return Err(Error::DimensionMismatch("mixed map dimensions".into()));
        }
        if *w < 0.0 {
            return Err(Error::InvalidParameter(format!("negative weight {w}")));
        }
        total += w;
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("weights sum to {total}, not 1")));
    }
    let mut action = ComplexMatrix::zeros(d * d, d * d);
    for (m, w) in maps {
        action = action.add(&m.action().scale_re(*w));
    }
    SuperOperator::from_action(d, action, "mixture")
}
