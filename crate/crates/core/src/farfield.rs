//! Discrete far-field operators and the measurement operator
//! `W = (I + 2ik|γ|² F0)(F1 - F0)`.
//!
//! Everything downstream of [`discretize`] lives in the `M^{1/2}`-weighted
//! basis, where the quadrature inner product is the plain hermitian dot
//! product and the adjoint is the conjugate transpose.

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scattering::{gamma, DirectionSet, ForwardSolver, RefractionIndexField, DEFAULT_RESIDUAL_TOL};

/// Far-field pattern samples: `entries[(i, j)] = u∞(θ_j, x̂_i)`, columns are
/// incidences and rows are measurement directions.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldMatrix {
    pub directions: DirectionSet,
    pub k: f64,
    pub entries: Mat<Complex64>,
}

impl FarFieldMatrix {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm_l2()
    }
}

/// Quadrature weights and their square roots.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureBasis {
    pub weights: Vec<f64>,
    pub sqrt_weights: Vec<f64>,
}

impl QuadratureBasis {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Config("quadrature weights must be positive".into()));
        }
        let sqrt_weights = weights.iter().map(|w| w.sqrt()).collect();
        Ok(Self { weights, sqrt_weights })
    }

    pub fn from_directions(directions: &DirectionSet) -> Self {
        Self::new(directions.weights().to_vec()).expect("direction weights are positive")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Maps samples of a function on the circle to the weighted basis.
    pub fn to_weighted(&self, samples: &[Complex64]) -> Vec<Complex64> {
        samples.iter().zip(&self.sqrt_weights).map(|(s, w)| s * w).collect()
    }
}

/// Solves one forward problem per direction and samples the far field in
/// the same directions.
pub fn assemble_farfield(index: &RefractionIndexField, k: f64, directions: &DirectionSet) -> Result<FarFieldMatrix> {
    let solver = ForwardSolver::new(index, k)?;
    assemble_with_solver(&solver, directions)
}

pub fn assemble_with_solver(solver: &ForwardSolver, directions: &DirectionSet) -> Result<FarFieldMatrix> {
    if directions.is_empty() {
        return Err(Error::Config("direction set is empty".into()));
    }
    let fields = solver.solve_directions(directions, DEFAULT_RESIDUAL_TOL)?;
    Ok(FarFieldMatrix {
        directions: directions.clone(),
        k: solver.wavenumber(),
        entries: solver.far_field_matrix(&fields, directions),
    })
}

/// Nyström matrix of the far-field operator in the weighted basis,
/// `sqrt(w_i) u∞(θ_j, x̂_i) sqrt(w_j)`.
pub fn discretize(farfield: &FarFieldMatrix, basis: &QuadratureBasis) -> Result<Mat<Complex64>> {
    let n = farfield.entries.nrows();
    if basis.len() != n || farfield.entries.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: basis.len(),
        });
    }
    let s = &basis.sqrt_weights;
    Ok(Mat::from_fn(n, n, |i, j| farfield.entries[(i, j)] * (s[i] * s[j])))
}

/// Real `2N × 2N` representation `[[Re A, -Im A], [Im A, Re A]]` of a
/// complex `N × N` matrix acting on `(Re x; Im x)`.
pub fn expand(a: &Mat<Complex64>) -> Mat<f64> {
    let n = a.nrows();
    Mat::from_fn(2 * n, 2 * n, |r, c| {
        let v = a[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => v.re,
            (true, false) => -v.im,
            (false, true) => v.im,
        }
    })
}

/// Discretized measurement operator with its self-adjoint parts.
#[derive(Debug, Clone)]
pub struct MeasurementOperator {
    pub w: Mat<Complex64>,
    pub w_r: Mat<Complex64>,
    pub w_i: Mat<Complex64>,
    pub w_r_expanded: Mat<f64>,
    pub w_i_expanded: Mat<f64>,
    pub gamma: Complex64,
    pub k: f64,
}

impl MeasurementOperator {
    /// Number of directions `N`; the expanded matrices are `2N × 2N`.
    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    /// Builds the operator directly from its complex matrix.
    pub fn from_matrix(w: Mat<Complex64>, k: f64, gamma: Complex64) -> Self {
        let n = w.nrows();
        let half = Complex64::new(0.5, 0.0);
        let w_r = Mat::from_fn(n, n, |i, j| (w[(i, j)] + w[(j, i)].conj()) * half);
        // (W - W*)/(2i) = -i (W - W*)/2
        let w_i = Mat::from_fn(n, n, |i, j| (w[(i, j)] - w[(j, i)].conj()) * Complex64::new(0.0, -0.5));
        Self {
            w_r_expanded: expand(&w_r),
            w_i_expanded: expand(&w_i),
            w,
            w_r,
            w_i,
            gamma,
            k,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.w.norm_l2()
    }
}

/// `W = (I + 2ik|γ|² F0)(F1 - F0)` from weighted-basis far-field matrices.
pub fn build_measurement_operator(
    f0: &Mat<Complex64>,
    f1: &Mat<Complex64>,
    k: f64,
    gamma: Complex64,
    basis: &QuadratureBasis,
) -> Result<MeasurementOperator> {
    let n = f0.nrows();
    for found in [f0.ncols(), f1.nrows(), f1.ncols(), basis.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    let c = Complex64::new(0.0, 2.0 * k * gamma.norm_sqr());
    let scattering = Mat::from_fn(n, n, |i, j| {
        let id = if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        id + c * f0[(i, j)]
    });
    let diff = f1 - f0;
    let w = &scattering * &diff;
    Ok(MeasurementOperator::from_matrix(w, k, gamma))
}

/// Convenience wrapper: discretizes both far-field matrices in their
/// quadrature basis and builds `W` with the 2D constant γ(k).
pub fn measurement_operator_from_data(f0: &FarFieldMatrix, f1: &FarFieldMatrix) -> Result<MeasurementOperator> {
    if f0.directions != f1.directions {
        return Err(Error::Config("far-field data use different direction sets".into()));
    }
    if f0.k != f1.k {
        return Err(Error::Config(format!(
            "far-field data use different wavenumbers ({} and {})",
            f0.k, f1.k
        )));
    }
    let basis = QuadratureBasis::from_directions(&f0.directions);
    let d0 = discretize(f0, &basis)?;
    let d1 = discretize(f1, &basis)?;
    build_measurement_operator(&d0, &d1, f0.k, gamma(f0.k), &basis)
}

/// Multiplies every entry by `1 + ε (ξ_re + i ξ_im)/√2` with `ξ` uniform on
/// `[-1, 1]`, then clamps the perturbation so that its Frobenius norm is at
/// most `ε ‖F‖`. Deterministic for a given seed.
pub fn add_noise(farfield: &FarFieldMatrix, epsilon: f64, seed: u64) -> Result<FarFieldMatrix> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::Config(format!(
            "noise level must be non-negative, got {epsilon}"
        )));
    }
    if epsilon == 0.0 {
        return Ok(farfield.clone());
    }
    let (rows, cols) = (farfield.entries.nrows(), farfield.entries.ncols());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = epsilon / std::f64::consts::SQRT_2;
    let mut perturbation = Mat::<Complex64>::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let xi = Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            perturbation[(i, j)] = farfield.entries[(i, j)] * xi * scale;
        }
    }
    let bound = epsilon * farfield.frobenius_norm();
    let size = perturbation.norm_l2();
    if size > bound {
        perturbation *= faer::Scale(Complex64::new(bound / size, 0.0));
    }
    Ok(FarFieldMatrix {
        directions: farfield.directions.clone(),
        k: farfield.k,
        entries: &farfield.entries + &perturbation,
    })
}

/// Hermitian inner product `Σ a_j conj(b_j)`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_matrix(n: usize, seed: u64) -> Mat<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Mat::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn matvec(a: &Mat<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
        (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
            .collect()
    }

    fn limited_farfield(n: usize, seed: u64) -> FarFieldMatrix {
        FarFieldMatrix {
            directions: DirectionSet::with_aperture(n, 0.3, 2.9).unwrap(),
            k: 5.0,
            entries: random_matrix(n, seed),
        }
    }

    #[test]
    fn uniform_weights_scale_entries() {
        let n = 7;
        let f = FarFieldMatrix {
            directions: DirectionSet::full(n).unwrap(),
            k: 5.0,
            entries: random_matrix(n, 1),
        };
        let d = discretize(&f, &QuadratureBasis::from_directions(&f.directions)).unwrap();
        let h = std::f64::consts::TAU / n as f64;
        for i in 0..n {
            for j in 0..n {
                assert!((d[(i, j)] - f.entries[(i, j)] * h).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn constant_vector_gives_trapezoid_rule() {
        let f = limited_farfield(9, 2);
        let basis = QuadratureBasis::from_directions(&f.directions);
        let d = discretize(&f, &basis).unwrap();
        // The constant function 1 has weighted coordinates sqrt(w).
        let ones: Vec<Complex64> = basis.sqrt_weights.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        let y = matvec(&d, &ones);
        for i in 0..9 {
            let trap: Complex64 = (0..9).map(|j| f.entries[(i, j)] * basis.weights[j]).sum();
            assert!((y[i] / basis.sqrt_weights[i] - trap).norm() < 1e-14);
        }
    }

    #[test]
    fn adjoint_is_conjugate_transpose_in_weighted_basis() {
        let f = limited_farfield(11, 3);
        let basis = QuadratureBasis::from_directions(&f.directions);
        let d = discretize(&f, &basis).unwrap();
        let adj = Mat::from_fn(11, 11, |i, j| d[(j, i)].conj());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let g = random_vec(11, &mut rng);
            let h = random_vec(11, &mut rng);
            let lhs = inner(&matvec(&d, &g), &h);
            let rhs = inner(&g, &matvec(&adj, &h));
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = limited_farfield(5, 1);
        let basis = QuadratureBasis::new(vec![1.0; 4]).unwrap();
        assert!(matches!(discretize(&f, &basis), Err(Error::DimensionMismatch { .. })));
        let b5 = QuadratureBasis::new(vec![1.0; 5]).unwrap();
        let a = random_matrix(5, 1);
        let b = random_matrix(4, 1);
        assert!(build_measurement_operator(&a, &b, 1.0, gamma(1.0), &b5).is_err());
    }

    #[test]
    fn self_adjoint_parts() {
        let n = 6;
        let f0 = random_matrix(n, 10);
        let f1 = random_matrix(n, 11);
        let basis = QuadratureBasis::new(vec![1.0; n]).unwrap();
        let op = build_measurement_operator(&f0, &f1, 10.0, gamma(10.0), &basis).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(op.w_r[(i, j)], op.w_r[(j, i)].conj());
                assert_eq!(op.w_i[(i, j)], op.w_i[(j, i)].conj());
                let back = op.w_r[(i, j)] + Complex64::new(0.0, 1.0) * op.w_i[(i, j)];
                assert!((back - op.w[(i, j)]).norm() < 1e-14);
            }
        }
        for r in 0..2 * n {
            for c in 0..2 * n {
                assert_eq!(op.w_r_expanded[(r, c)], op.w_r_expanded[(c, r)]);
                assert_eq!(op.w_i_expanded[(r, c)], op.w_i_expanded[(c, r)]);
            }
        }
    }

    #[test]
    fn equal_data_gives_zero_operator() {
        let f = random_matrix(5, 7);
        let basis = QuadratureBasis::new(vec![1.0; 5]).unwrap();
        let op = build_measurement_operator(&f, &f, 10.0, gamma(10.0), &basis).unwrap();
        assert_eq!(op.frobenius_norm(), 0.0);
        assert_eq!(op.w_r_expanded.norm_l2(), 0.0);
        assert_eq!(op.w_i_expanded.norm_l2(), 0.0);
    }

    #[test]
    fn zero_gamma_gives_plain_difference() {
        let f0 = random_matrix(5, 8);
        let f1 = random_matrix(5, 9);
        let basis = QuadratureBasis::new(vec![1.0; 5]).unwrap();
        let op = build_measurement_operator(&f0, &f1, 10.0, Complex64::new(0.0, 0.0), &basis).unwrap();
        assert!((&op.w - &(&f1 - &f0)).norm_l2() < 1e-15);
    }

    #[test]
    fn expanded_quadratic_forms() {
        let n = 8;
        let op = build_measurement_operator(
            &random_matrix(n, 20),
            &random_matrix(n, 21),
            10.0,
            gamma(10.0),
            &QuadratureBasis::new(vec![1.0; n]).unwrap(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let psi = random_vec(n, &mut rng);
            let x: Vec<f64> = psi.iter().map(|z| z.re).chain(psi.iter().map(|z| z.im)).collect();
            let quad = |m: &Mat<f64>| -> f64 {
                (0..2 * n)
                    .map(|r| x[r] * (0..2 * n).map(|c| m[(r, c)] * x[c]).sum::<f64>())
                    .sum()
            };
            let wpp = inner(&matvec(&op.w, &psi), &psi);
            assert!((quad(&op.w_r_expanded) - wpp.re).abs() < 1e-13 * (1.0 + wpp.norm()));
            assert!((quad(&op.w_i_expanded) - wpp.im).abs() < 1e-13 * (1.0 + wpp.norm()));
        }
    }

    #[test]
    fn noise_is_bounded_and_deterministic() {
        let f = limited_farfield(12, 30);
        assert_eq!(add_noise(&f, 0.0, 1).unwrap(), f);
        for eps in [0.02, 0.10] {
            let a = add_noise(&f, eps, 42).unwrap();
            let b = add_noise(&f, eps, 42).unwrap();
            assert_eq!(a, b);
            let rel = (&a.entries - &f.entries).norm_l2() / f.frobenius_norm();
            assert!(rel <= eps, "{rel} > {eps}");
            assert!(rel > 0.0);
        }
        assert_ne!(add_noise(&f, 0.1, 1).unwrap(), add_noise(&f, 0.1, 2).unwrap());
        assert!(add_noise(&f, -0.1, 1).is_err());
    }
}
