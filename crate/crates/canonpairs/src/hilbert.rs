//! Finite-dimensional stand-ins for the six model Hilbert spaces: the real
//! line, the half line, a finite interval, the integer and natural-number
//! lattices, and a finite-dimensional label space.
//!
//! Convention used throughout the crate: a state is stored as pointwise
//! amplitudes psi(x_j) together with a uniform quadrature weight w (the grid
//! spacing h for continuum domains, 1 for discrete bases). Operator matrices
//! act on the weighted coordinates c_j = sqrt(w) psi(x_j), in which the
//! continuum inner product becomes the plain l2 dot product. That makes the
//! adjoint a conjugate transpose, traces plain traces, and positivity
//! ordinary matrix positivity; kernel-type operators absorb a factor w while
//! multiplication operators stay diagonal with unweighted entries.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance for treating a state as normalized in expectation values.
pub const NORM_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DomainSpec {
    /// x_j = -x_max + j h, h = 2 x_max / n_points (right endpoint excluded).
    RealLine { x_max: f64, n_points: usize },
    /// Cell-centered grid on [0, x_max]: x_j = (j + 1/2) h, h = x_max / n_points.
    HalfLine { x_max: f64, n_points: usize },
    /// Cell-centered grid on [0, length]: x_j = (j + 1/2) h, h = length / n_points.
    Interval { length: f64, n_points: usize },
    /// Sites x_m = m * spacing + offset, m = -(n_sites/2) .. -(n_sites/2)+n_sites-1.
    LatticeZ { spacing: f64, offset: f64, n_sites: usize },
    /// Sites x_n = n * spacing, n = 0 .. n_sites-1.
    LatticeN { spacing: f64, n_sites: usize },
    /// Basis labels n0 .. n0+dim-1. With n0 = 0 this doubles as a truncated
    /// Fock space.
    FiniteDim { dim: usize, n0: i64 },
}

impl DomainSpec {
    pub fn real_line(x_max: f64, n_points: usize) -> Result<Self> {
        let d = DomainSpec::RealLine { x_max, n_points };
        d.validate()?;
        Ok(d)
    }

    pub fn half_line(x_max: f64, n_points: usize) -> Result<Self> {
        let d = DomainSpec::HalfLine { x_max, n_points };
        d.validate()?;
        Ok(d)
    }

    pub fn interval(length: f64, n_points: usize) -> Result<Self> {
        let d = DomainSpec::Interval { length, n_points };
        d.validate()?;
        Ok(d)
    }

    pub fn lattice_z(spacing: f64, offset: f64, n_sites: usize) -> Result<Self> {
        let d = DomainSpec::LatticeZ { spacing, offset, n_sites };
        d.validate()?;
        Ok(d)
    }

    pub fn lattice_n(spacing: f64, n_sites: usize) -> Result<Self> {
        let d = DomainSpec::LatticeN { spacing, n_sites };
        d.validate()?;
        Ok(d)
    }

    pub fn finite_dim(dim: usize, n0: i64) -> Result<Self> {
        let d = DomainSpec::FiniteDim { dim, n0 };
        d.validate()?;
        Ok(d)
    }

    /// Truncated Fock space: labels 0 .. dim-1.
    pub fn fock(dim: usize) -> Result<Self> {
        Self::finite_dim(dim, 0)
    }

    // the guards are negations on purpose so NaN parameters fail too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDomain(msg));
        match *self {
            DomainSpec::RealLine { x_max, n_points } => {
                if !(x_max > 0.0) {
                    return bad(format!("x_max must be positive, got {x_max}"));
                }
                if n_points < 4 {
                    return bad(format!("n_points must be >= 4, got {n_points}"));
                }
            }
            DomainSpec::HalfLine { x_max, n_points } => {
                if !(x_max > 0.0) {
                    return bad(format!("x_max must be positive, got {x_max}"));
                }
                if n_points < 4 {
                    return bad(format!("n_points must be >= 4, got {n_points}"));
                }
            }
            DomainSpec::Interval { length, n_points } => {
                if !(length > 0.0) {
                    return bad(format!("length must be positive, got {length}"));
                }
                if n_points < 4 {
                    return bad(format!("n_points must be >= 4, got {n_points}"));
                }
            }
            DomainSpec::LatticeZ { spacing, offset, n_sites } => {
                if !(spacing > 0.0) {
                    return bad(format!("spacing must be positive, got {spacing}"));
                }
                if !(0.0 <= offset && offset < spacing) {
                    return bad(format!("offset must lie in [0, spacing), got {offset}"));
                }
                if n_sites < 2 {
                    return bad(format!("n_sites must be >= 2, got {n_sites}"));
                }
            }
            DomainSpec::LatticeN { spacing, n_sites } => {
                if !(spacing > 0.0) {
                    return bad(format!("spacing must be positive, got {spacing}"));
                }
                if n_sites < 2 {
                    return bad(format!("n_sites must be >= 2, got {n_sites}"));
                }
            }
            DomainSpec::FiniteDim { dim, .. } => {
                if dim < 2 {
                    return bad(format!("dim must be >= 2, got {dim}"));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match *self {
            DomainSpec::RealLine { n_points, .. } => n_points,
            DomainSpec::HalfLine { n_points, .. } => n_points,
            DomainSpec::Interval { n_points, .. } => n_points,
            DomainSpec::LatticeZ { n_sites, .. } => n_sites,
            DomainSpec::LatticeN { n_sites, .. } => n_sites,
            DomainSpec::FiniteDim { dim, .. } => dim,
        }
    }

    /// Grid spacing h for continuum domains, lattice spacing for lattices,
    /// 1 for the finite-dimensional label space.
    pub fn spacing(&self) -> f64 {
        match *self {
            DomainSpec::RealLine { x_max, n_points } => 2.0 * x_max / n_points as f64,
            DomainSpec::HalfLine { x_max, n_points } => x_max / n_points as f64,
            DomainSpec::Interval { length, n_points } => length / n_points as f64,
            DomainSpec::LatticeZ { spacing, .. } => spacing,
            DomainSpec::LatticeN { spacing, .. } => spacing,
            DomainSpec::FiniteDim { .. } => 1.0,
        }
    }

    /// Uniform quadrature weight of the inner product.
    pub fn weight(&self) -> f64 {
        match *self {
            DomainSpec::RealLine { .. } | DomainSpec::HalfLine { .. } | DomainSpec::Interval { .. } => {
                self.spacing()
            }
            _ => 1.0,
        }
    }

    /// Coordinate value (or basis label) of each grid point.
    pub fn points(&self) -> Vec<f64> {
        match *self {
            DomainSpec::RealLine { x_max, n_points } => {
                let h = self.spacing();
                (0..n_points).map(|j| -x_max + j as f64 * h).collect()
            }
            DomainSpec::HalfLine { n_points, .. } | DomainSpec::Interval { n_points, .. } => {
                let h = self.spacing();
                (0..n_points).map(|j| (j as f64 + 0.5) * h).collect()
            }
            DomainSpec::LatticeZ { spacing, offset, n_sites } => {
                let m0 = -(n_sites as i64) / 2;
                (0..n_sites)
                    .map(|j| (m0 + j as i64) as f64 * spacing + offset)
                    .collect()
            }
            DomainSpec::LatticeN { spacing, n_sites } => {
                (0..n_sites).map(|j| j as f64 * spacing).collect()
            }
            DomainSpec::FiniteDim { dim, n0 } => (0..dim).map(|j| (n0 + j as i64) as f64).collect(),
        }
    }

    pub fn same_as(&self, other: &DomainSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

#[derive(Debug, Clone)]
pub struct StateVector {
    pub domain: DomainSpec,
    /// Pointwise amplitudes psi(x_j).
    pub amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(domain: DomainSpec, amplitudes: DVector<Complex64>) -> Result<Self> {
        domain.validate()?;
        if amplitudes.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: amplitudes.len(),
            });
        }
        Ok(StateVector { domain, amplitudes })
    }

    pub fn from_fn(domain: DomainSpec, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let pts = domain.points();
        let amplitudes = DVector::from_iterator(pts.len(), pts.iter().map(|&x| f(x)));
        Self::new(domain, amplitudes)
    }

    /// Basis vector e_i (unit amplitude at index i), for discrete domains.
    pub fn basis_state(domain: DomainSpec, i: usize) -> Result<Self> {
        let n = domain.dim();
        if i >= n {
            return Err(Error::InvalidParameter(format!("basis index {i} out of range {n}")));
        }
        let w = domain.weight();
        let mut amps = DVector::zeros(n);
        amps[i] = Complex64::new(1.0 / w.sqrt(), 0.0);
        Self::new(domain, amps)
    }

    /// Weighted coordinates c = sqrt(w) psi; operators act on these.
    pub fn weighted(&self) -> DVector<Complex64> {
        let s = Complex64::new(self.domain.weight().sqrt(), 0.0);
        &self.amplitudes * s
    }

    pub fn from_weighted(domain: DomainSpec, c: DVector<Complex64>) -> Result<Self> {
        let s = Complex64::new(1.0 / domain.weight().sqrt(), 0.0);
        Self::new(domain, c * s)
    }

    pub fn norm_sq(&self) -> f64 {
        self.domain.weight() * self.amplitudes.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::InvalidParameter("cannot normalize the zero vector".into()));
        }
        Ok(StateVector {
            domain: self.domain.clone(),
            amplitudes: &self.amplitudes / Complex64::new(n, 0.0),
        })
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sq() - 1.0).abs() < tol
    }
}

/// Weighted inner product sum_j w psi_j^* phi_j, conjugate-linear in the
/// first argument.
pub fn inner_product(f: &StateVector, g: &StateVector) -> Result<Complex64> {
    f.domain.same_as(&g.domain)?;
    let w = f.domain.weight();
    Ok(f.amplitudes.dotc(&g.amplitudes) * Complex64::new(w, 0.0))
}

#[derive(Debug, Clone)]
pub struct LinearOperator {
    pub domain: DomainSpec,
    /// Matrix acting on weighted coordinates.
    pub matrix: DMatrix<Complex64>,
}

impl LinearOperator {
    pub fn new(domain: DomainSpec, matrix: DMatrix<Complex64>) -> Result<Self> {
        domain.validate()?;
        let n = domain.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.nrows() });
        }
        Ok(LinearOperator { domain, matrix })
    }

    pub fn identity(domain: DomainSpec) -> Result<Self> {
        let n = domain.dim();
        Self::new(domain, DMatrix::identity(n, n))
    }

    /// Multiplication operator psi(x) -> f(x) psi(x): diagonal in the grid.
    pub fn from_multiplication(domain: DomainSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        let pts = domain.points();
        let n = pts.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, &x) in pts.iter().enumerate() {
            m[(j, j)] = Complex64::new(f(x), 0.0);
        }
        Self::new(domain, m)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.domain.same_as(&psi.domain)?;
        let c = linalg::cgemv(&self.matrix, &psi.weighted());
        StateVector::from_weighted(self.domain.clone(), c)
    }

    /// <psi|M|psi>. Rejects unnormalized input; see
    /// [`LinearOperator::expectation_unchecked`] for the override.
    pub fn expectation(&self, psi: &StateVector) -> Result<Complex64> {
        if !psi.is_normalized(NORM_CHECK_TOL) {
            return Err(Error::NotNormalized { norm_sq: psi.norm_sq() });
        }
        self.expectation_unchecked(psi)
    }

    pub fn expectation_unchecked(&self, psi: &StateVector) -> Result<Complex64> {
        self.domain.same_as(&psi.domain)?;
        let c = psi.weighted();
        Ok(c.dotc(&linalg::cgemv(&self.matrix, &c)))
    }

    pub fn variance(&self, psi: &StateVector) -> Result<f64> {
        let m = self.expectation(psi)?;
        let c = psi.weighted();
        let mc = linalg::cgemv(&self.matrix, &c);
        let m2 = mc.dotc(&mc);
        Ok(m2.re - m.norm_sqr())
    }

    /// Measured hermiticity deviation max_ij |M - M^dagger| (recomputed,
    /// never asserted by construction).
    pub fn hermitian_tol(&self) -> f64 {
        linalg::max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Measured unitarity deviation max_ij |M^dagger M - 1|.
    pub fn unitary_tol(&self) -> f64 {
        let n = self.matrix.nrows();
        let prod = linalg::cgemm(&self.matrix.adjoint(), &self.matrix);
        linalg::max_abs(&(prod - DMatrix::identity(n, n)))
    }

    pub fn adjoint(&self) -> Self {
        LinearOperator {
            domain: self.domain.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn mul(&self, other: &LinearOperator) -> Result<Self> {
        self.domain.same_as(&other.domain)?;
        Ok(LinearOperator {
            domain: self.domain.clone(),
            matrix: linalg::cgemm(&self.matrix, &other.matrix),
        })
    }

    pub fn add(&self, other: &LinearOperator) -> Result<Self> {
        self.domain.same_as(&other.domain)?;
        Ok(LinearOperator {
            domain: self.domain.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        LinearOperator {
            domain: self.domain.clone(),
            matrix: &self.matrix * c,
        }
    }

    pub fn commutator(&self, other: &LinearOperator) -> Result<Self> {
        self.domain.same_as(&other.domain)?;
        let ab = linalg::cgemm(&self.matrix, &other.matrix);
        let ba = linalg::cgemm(&other.matrix, &self.matrix);
        Ok(LinearOperator {
            domain: self.domain.clone(),
            matrix: ab - ba,
        })
    }
}

/// Outer product |f><g| as an operator on weighted coordinates.
pub fn outer_product(f: &StateVector, g: &StateVector) -> Result<LinearOperator> {
    f.domain.same_as(&g.domain)?;
    let cf = f.weighted();
    let cg = g.weighted();
    let n = cf.len();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let s = cg[j].conj();
        for i in 0..n {
            m[(i, j)] = cf[i] * s;
        }
    }
    LinearOperator::new(f.domain.clone(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs;
    use approx::assert_relative_eq;

    #[test]
    fn interval_grid_spans_unit_interval() {
        let d = DomainSpec::interval(1.0, 8).unwrap();
        let pts = d.points();
        assert_eq!(pts.len(), 8);
        assert_relative_eq!(pts[0], 0.0625);
        assert_relative_eq!(pts[7], 0.9375);
        assert!(pts.iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn lattice_z_points_follow_offset_formula() {
        let d = DomainSpec::lattice_z(1.0, 0.25, 5).unwrap();
        let pts = d.points();
        let expected = [-1.75, -0.75, 0.25, 1.25, 2.25];
        for (a, b) in pts.iter().zip(expected.iter()) {
            assert_relative_eq!(a, b);
        }
    }

    #[test]
    fn finite_dim_smallest_case_has_two_labels() {
        let d = DomainSpec::finite_dim(2, 0).unwrap();
        assert_eq!(d.points(), vec![0.0, 1.0]);
    }

    #[test]
    fn domain_validation_rejects_bad_parameters() {
        assert!(DomainSpec::interval(-1.0, 8).is_err());
        assert!(DomainSpec::interval(1.0, 3).is_err());
        assert!(DomainSpec::lattice_z(0.0, 0.0, 5).is_err());
        assert!(DomainSpec::lattice_z(1.0, 1.5, 5).is_err());
        assert!(DomainSpec::lattice_z(1.0, -0.1, 5).is_err());
        assert!(DomainSpec::finite_dim(1, 0).is_err());
    }

    #[test]
    fn basis_states_are_orthonormal() {
        let d = DomainSpec::fock(5).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let ei = StateVector::basis_state(d.clone(), i).unwrap();
                let ej = StateVector::basis_state(d.clone(), j).unwrap();
                let ip = inner_product(&ei, &ej).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip.re - expected).abs() < 1e-14 && ip.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_state_on_unit_interval_is_normalized() {
        let d = DomainSpec::interval(1.0, 64).unwrap();
        let psi = StateVector::from_fn(d, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((inner_product(&psi, &psi).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric_and_linear() {
        let d = DomainSpec::interval(2.0, 16).unwrap();
        let f = StateVector::from_fn(d.clone(), |x| Complex64::new(x, 0.3 * x * x)).unwrap();
        let g = StateVector::from_fn(d.clone(), |x| Complex64::new((2.0 * x).sin(), -x)).unwrap();
        let fg = inner_product(&f, &g).unwrap();
        let gf = inner_product(&g, &f).unwrap();
        assert!((fg - gf.conj()).norm() < 1e-13);
        let f2 = StateVector::new(d, &f.amplitudes * Complex64::new(2.0, 0.0)).unwrap();
        let ff2 = inner_product(&f, &f2).unwrap();
        assert!((ff2.re - 2.0 * f.norm_sq()).abs() < 1e-12 * f.norm_sq());
    }

    #[test]
    fn identity_expectation_is_one() {
        let d = DomainSpec::real_line(5.0, 32).unwrap();
        let psi = StateVector::from_fn(d.clone(), |x| Complex64::new((-x * x).exp(), 0.0))
            .unwrap()
            .normalized()
            .unwrap();
        let id = LinearOperator::identity(d).unwrap();
        let e = id.expectation(&psi).unwrap();
        assert!((e.re - 1.0).abs() < 1e-12 && e.im.abs() < 1e-14);
    }

    #[test]
    fn position_expectation_vanishes_for_even_state() {
        let d = DomainSpec::real_line(6.0, 64).unwrap();
        let psi = StateVector::from_fn(d.clone(), |x| Complex64::new((-0.5 * x * x).exp(), 0.0))
            .unwrap()
            .normalized()
            .unwrap();
        let x = pairs::position_operator(&d).unwrap();
        assert!(x.expectation(&psi).unwrap().re.abs() < 1e-10);
    }

    #[test]
    fn expectation_rejects_unnormalized_states() {
        let d = DomainSpec::real_line(5.0, 16).unwrap();
        let psi = StateVector::from_fn(d.clone(), |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        let id = LinearOperator::identity(d).unwrap();
        assert!(matches!(id.expectation(&psi), Err(Error::NotNormalized { .. })));
        assert!(id.expectation_unchecked(&psi).is_ok());
    }

    #[test]
    fn ground_state_position_spread_matches_quadrature_oracle() {
        // oracle: Simpson quadrature of x^2 exp(-x^2) / sqrt(pi) on [-10, 10],
        // evaluated independently of the operator machinery
        let oracle = {
            let n = 4000usize;
            let (a, b) = (-10.0f64, 10.0f64);
            let h = (b - a) / n as f64;
            let f = |x: f64| x * x * (-x * x).exp() / std::f64::consts::PI.sqrt();
            let mut s = f(a) + f(b);
            for j in 1..n {
                let w = if j % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(a + j as f64 * h);
            }
            s * h / 3.0
        };
        assert!((oracle - 0.5).abs() < 1e-10);

        let d = DomainSpec::real_line(10.0, 512).unwrap();
        let psi = StateVector::from_fn(d.clone(), |x| Complex64::new((-0.5 * x * x).exp(), 0.0))
            .unwrap()
            .normalized()
            .unwrap();
        let x2 = LinearOperator::from_multiplication(d, |x| x * x).unwrap();
        let got = x2.expectation(&psi).unwrap().re;
        assert!((got - oracle).abs() < 1e-6, "got {got}, oracle {oracle}");
    }

    #[test]
    fn hermitian_expectation_is_real_for_generic_state() {
        let d = DomainSpec::fock(12).unwrap();
        let mut m = DMatrix::zeros(12, 12);
        let mut s = 5u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 0..12 {
            for j in 0..12 {
                m[(i, j)] = Complex64::new(next(), next());
            }
        }
        let h = LinearOperator::new(d.clone(), &m + m.adjoint()).unwrap();
        assert!(h.hermitian_tol() < 1e-12);
        let psi = StateVector::new(
            d,
            DVector::from_fn(12, |i, _| Complex64::new(next() + 0.1 * i as f64, next())),
        )
        .unwrap()
        .normalized()
        .unwrap();
        assert!(h.expectation(&psi).unwrap().im.abs() < 1e-10);
    }

    #[test]
    fn grid_refinement_improves_ground_state_spread_quadratically() {
        // Ground state of the discretized oscillator (second-order finite
        // differences, Dirichlet ends): the <X^2> error scales like h^2, so
        // successive halvings shrink it by a factor near 4.
        let x_max = 8.0f64;
        let exact = 0.5f64;
        let mut errs = Vec::new();
        for &n in &[64usize, 128, 256] {
            let h = 2.0 * x_max / n as f64;
            let pts: Vec<f64> = (0..n).map(|j| -x_max + j as f64 * h).collect();
            let diag: Vec<f64> = pts.iter().map(|&x| 1.0 / (h * h) + 0.5 * x * x).collect();
            let off = vec![-0.5 / (h * h); n - 1];
            let (_, v) = linalg::tridiag_eigenpair(&diag, &off, 0);
            let d = DomainSpec::real_line(x_max, n).unwrap();
            let psi = StateVector::new(
                d.clone(),
                DVector::from_iterator(n, v.iter().map(|&a| Complex64::new(a / h.sqrt(), 0.0))),
            )
            .unwrap()
            .normalized()
            .unwrap();
            let x2 = LinearOperator::from_multiplication(d, |x| x * x).unwrap();
            errs.push((x2.expectation(&psi).unwrap().re - exact).abs());
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(
                (3.5..=4.5).contains(&ratio),
                "refinement ratio {ratio} outside [3.5, 4.5]; errors {errs:?}"
            );
        }
    }

    #[test]
    fn outer_product_projects_onto_state() {
        let d = DomainSpec::fock(6).unwrap();
        let psi = StateVector::basis_state(d.clone(), 2).unwrap();
        let proj = outer_product(&psi, &psi).unwrap();
        let phi = StateVector::from_fn(d, |n| Complex64::new(1.0 + n, 0.5)).unwrap();
        let out = proj.apply(&phi).unwrap();
        let expected = inner_product(&psi, &phi).unwrap();
        assert!((out.amplitudes[2] - expected).norm() < 1e-12);
        assert!(out.amplitudes[0].norm() < 1e-14);
    }
}
