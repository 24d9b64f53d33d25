//! Generalized measurement families: validation, purity, Gaussian position
//! Kraus operators, coarse-grained and binned phase-space families, and the
//! dilation of a rank-one family to a projective one on the outcome space.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hilbert::{DomainSpec, LinearOperator, StateVector};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OutcomeLabel {
    Index(usize),
    Real(f64),
    /// (position bin center, momentum sample)
    Pair(f64, f64),
}

/// Storage for one positive element, in weighted coordinates.
#[derive(Debug, Clone)]
pub enum ElementOp {
    /// v v^dagger
    Rank1(DVector<Complex64>),
    /// real multiplication operator
    Diagonal(DVector<f64>),
    Dense(DMatrix<Complex64>),
}

impl ElementOp {
    pub fn dim(&self) -> usize {
        match self {
            ElementOp::Rank1(v) => v.len(),
            ElementOp::Diagonal(d) => d.len(),
            ElementOp::Dense(m) => m.nrows(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match self {
            ElementOp::Rank1(v) => {
                let mut m = DMatrix::zeros(v.len(), v.len());
                linalg::rank1_acc(&mut m, v, 1.0);
                m
            }
            ElementOp::Diagonal(d) => DMatrix::from_fn(d.len(), d.len(), |i, j| {
                if i == j { Complex64::new(d[i], 0.0) } else { Complex64::new(0.0, 0.0) }
            }),
            ElementOp::Dense(m) => m.clone(),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            ElementOp::Rank1(v) => v.norm_squared(),
            ElementOp::Diagonal(d) => d.sum(),
            ElementOp::Dense(m) => linalg::trace(m).re,
        }
    }

    fn trace_of_square(&self) -> f64 {
        match self {
            ElementOp::Rank1(v) => {
                let n2 = v.norm_squared();
                n2 * n2
            }
            ElementOp::Diagonal(d) => d.iter().map(|x| x * x).sum(),
            // hermitian, so tr(m^2) is the squared Frobenius norm
            ElementOp::Dense(m) => linalg::frob(m).powi(2),
        }
    }

    fn min_eigenvalue(&self) -> f64 {
        match self {
            ElementOp::Rank1(v) => {
                if v.len() > 1 { 0.0 } else { v.norm_squared() }
            }
            ElementOp::Diagonal(d) => d.iter().copied().fold(f64::INFINITY, f64::min),
            ElementOp::Dense(m) => linalg::min_eig_hermitian(m),
        }
    }
}

/// Tr(E^2) / (Tr E)^2: one over the effective rank. One for rank-one
/// elements, 1/r for a rank-r projector.
pub fn purity(op: &ElementOp) -> f64 {
    op.trace_of_square() / op.trace().powi(2)
}

pub fn purity_dense(m: &DMatrix<Complex64>) -> f64 {
    purity(&ElementOp::Dense(m.clone()))
}

#[derive(Debug, Clone)]
pub struct MeasureElement {
    pub label: OutcomeLabel,
    /// nonnegative scale applied to `op` in the resolution sum
    pub weight: f64,
    pub op: ElementOp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyKind {
    /// expected to resolve the identity of the whole space
    General,
    /// expected to resolve only the projector onto the span it covers
    CompleteOnSubspace,
}

#[derive(Debug, Clone)]
pub struct MeasureFamily {
    pub domain: DomainSpec,
    pub elements: Vec<MeasureElement>,
    pub kind: FamilyKind,
}

impl MeasureFamily {
    pub fn new(domain: DomainSpec, elements: Vec<MeasureElement>, kind: FamilyKind) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidFamily("family has no elements".into()));
        }
        let n = domain.dim();
        for (i, e) in elements.iter().enumerate() {
            if e.op.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: e.op.dim() });
            }
            if !(e.weight >= 0.0 && e.weight.is_finite()) {
                return Err(Error::InvalidFamily(format!(
                    "element {i} has weight {}, need a finite nonnegative value",
                    e.weight
                )));
            }
        }
        Ok(MeasureFamily { domain, elements, kind })
    }

    /// Dense resolution sum, sum_i weight_i * op_i.
    pub fn resolution_sum(&self) -> DMatrix<Complex64> {
        let n = self.domain.dim();
        let mut s = DMatrix::zeros(n, n);
        for e in &self.elements {
            match &e.op {
                ElementOp::Rank1(v) => linalg::rank1_acc(&mut s, v, e.weight),
                ElementOp::Diagonal(d) => {
                    for j in 0..n {
                        s[(j, j)] += Complex64::new(e.weight * d[j], 0.0);
                    }
                }
                ElementOp::Dense(m) => s += m * Complex64::new(e.weight, 0.0),
            }
        }
        s
    }

    /// Largest |<psi| (sum - 1) |psi>| over the given weighted-coordinate
    /// unit vectors: completeness as seen by those states only.
    pub fn weak_completeness_deviation(&self, states: &[DVector<Complex64>]) -> f64 {
        let s = self.resolution_sum();
        states
            .iter()
            .map(|psi| {
                let spsi = linalg::cgemv(&s, psi);
                (psi.dotc(&spsi) / psi.norm_squared() - Complex64::new(1.0, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Entrywise magnitude of the product of two weighted elements, computed
/// without forming dense products where the structure allows it.
fn pair_product_max(a: &MeasureElement, b: &MeasureElement) -> f64 {
    let scale = a.weight * b.weight;
    if scale == 0.0 {
        return 0.0;
    }
    match (&a.op, &b.op) {
        (ElementOp::Rank1(u), ElementOp::Rank1(v)) => {
            // u u^+ v v^+ : entry (i,j) = u_i <u,v> conj(v_j)
            let inner = u.dotc(v).norm();
            let mu = u.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let mv = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
            scale * inner * mu * mv
        }
        (ElementOp::Rank1(u), ElementOp::Diagonal(d)) => {
            let mu = u.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let mud = u
                .iter()
                .zip(d.iter())
                .map(|(c, x)| c.norm() * x.abs())
                .fold(0.0, f64::max);
            scale * mu * mud
        }
        (ElementOp::Diagonal(d), ElementOp::Rank1(u)) => {
            let mu = u.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let mdu = u
                .iter()
                .zip(d.iter())
                .map(|(c, x)| c.norm() * x.abs())
                .fold(0.0, f64::max);
            scale * mu * mdu
        }
        (ElementOp::Diagonal(c), ElementOp::Diagonal(d)) => {
            scale
                * c.iter()
                    .zip(d.iter())
                    .map(|(x, y)| (x * y).abs())
                    .fold(0.0, f64::max)
        }
        _ => scale * linalg::max_abs(&linalg::cgemm(&a.op.to_dense(), &b.op.to_dense())),
    }
}

fn idempotency_deviation(e: &MeasureElement) -> f64 {
    // || (wE)^2 - wE || for the weighted element
    match &e.op {
        ElementOp::Rank1(v) => {
            let n2 = v.norm_squared();
            let mv = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
            (e.weight * e.weight * n2 - e.weight).abs() * mv * mv
        }
        ElementOp::Diagonal(d) => d
            .iter()
            .map(|&x| (e.weight * e.weight * x * x - e.weight * x).abs())
            .fold(0.0, f64::max),
        ElementOp::Dense(m) => {
            let wm = m * Complex64::new(e.weight, 0.0);
            linalg::max_abs(&(linalg::cgemm(&wm, &wm) - wm))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub n_elements: usize,
    /// smallest eigenvalue across all weighted elements
    pub min_eigenvalue: f64,
    /// entrywise deviation of the resolution sum from the identity, or from
    /// its own square for a subspace-complete family
    pub completeness_deviation: f64,
    pub max_idempotency_deviation: f64,
    /// entrywise size of the largest cross product (subsampled for very
    /// large families)
    pub max_pairwise_product: f64,
    pub pairwise_subsampled: bool,
    pub is_projective: bool,
    pub purities: Vec<f64>,
}

const PSD_TOL: f64 = -1e-6;
const PROJECTIVE_TOL: f64 = 1e-10;

/// Checks positivity and the resolution of the identity, and classifies the
/// family as projective or genuinely generalized.
pub fn validate_family(family: &MeasureFamily) -> Result<ValidationReport> {
    let n = family.domain.dim();
    let mut min_eig = f64::INFINITY;
    for (i, e) in family.elements.iter().enumerate() {
        if let ElementOp::Dense(m) = &e.op {
            if m.nrows() != m.ncols() {
                return Err(Error::InvalidFamily(format!("element {i} is not square")));
            }
            let herm = linalg::max_abs(&(m - m.adjoint()));
            if herm > 1e-8 {
                return Err(Error::InvalidFamily(format!(
                    "element {i} is not hermitian (deviation {herm:.2e})"
                )));
            }
        }
        let ev = e.weight * e.op.min_eigenvalue();
        if ev < PSD_TOL {
            return Err(Error::InvalidFamily(format!(
                "element {i} has eigenvalue {ev:.3e} below zero"
            )));
        }
        min_eig = min_eig.min(ev);
    }

    let s = family.resolution_sum();
    let completeness_deviation = match family.kind {
        FamilyKind::General => {
            let mut diff = s.clone();
            for j in 0..n {
                diff[(j, j)] -= Complex64::new(1.0, 0.0);
            }
            linalg::max_abs(&diff)
        }
        FamilyKind::CompleteOnSubspace => linalg::max_abs(&(linalg::cgemm(&s, &s) - &s)),
    };

    let max_idempotency_deviation = family
        .elements
        .iter()
        .map(idempotency_deviation)
        .fold(0.0, f64::max);

    // cross products; stride-subsample very large families to keep this
    // from dominating the validation cost
    let k = family.elements.len();
    let stride = k.div_ceil(512);
    let picked: Vec<&MeasureElement> = family.elements.iter().step_by(stride).collect();
    let mut max_pairwise = 0.0f64;
    for (ia, a) in picked.iter().enumerate() {
        for b in picked.iter().skip(ia + 1) {
            max_pairwise = max_pairwise.max(pair_product_max(a, b));
        }
    }

    let is_projective =
        max_idempotency_deviation < PROJECTIVE_TOL && max_pairwise < PROJECTIVE_TOL;

    Ok(ValidationReport {
        n_elements: k,
        min_eigenvalue: min_eig,
        completeness_deviation,
        max_idempotency_deviation,
        max_pairwise_product: max_pairwise,
        pairwise_subsampled: stride > 1,
        is_projective,
        purities: family.elements.iter().map(|e| purity(&e.op)).collect(),
    })
}

/// Spectral norm of the product of two sub-band resolution sums, for
/// families labeled by a real outcome. Nonzero values witness the failure
/// of projectivity between disjoint bands.
pub fn band_product_norm(
    family: &MeasureFamily,
    band_a: (f64, f64),
    band_b: (f64, f64),
) -> Result<f64> {
    let n = family.domain.dim();
    let mut sa = DMatrix::zeros(n, n);
    let mut sb = DMatrix::zeros(n, n);
    let mut hits = (0usize, 0usize);
    for e in &family.elements {
        let OutcomeLabel::Real(p) = e.label else {
            return Err(Error::InvalidFamily("band products need real outcome labels".into()));
        };
        if (band_a.0..=band_a.1).contains(&p) {
            sa += e.op.to_dense() * Complex64::new(e.weight, 0.0);
            hits.0 += 1;
        }
        if (band_b.0..=band_b.1).contains(&p) {
            sb += e.op.to_dense() * Complex64::new(e.weight, 0.0);
            hits.1 += 1;
        }
    }
    if hits.0 == 0 || hits.1 == 0 {
        return Err(Error::InvalidParameter("a requested band contains no samples".into()));
    }
    Ok(linalg::spectral_norm(&linalg::cgemm(&sa, &sb)))
}

/// Diagonal Gaussian position Kraus operator centered at x0 with variance
/// w, normalized as a density so that integrating K^+K over centers
/// resolves the identity.
pub fn gaussian_position_kraus(domain: &DomainSpec, x0: f64, w: f64) -> Result<LinearOperator> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidParameter(format!("kraus variance must be positive, got {w}")));
    }
    let amp = (2.0 * PI * w).powf(-0.25);
    LinearOperator::from_multiplication(domain.clone(), |x| {
        amp * (-(x - x0).powi(2) / (4.0 * w)).exp()
    })
}

/// The positive family generated by scanning the Gaussian Kraus center over
/// a grid wide enough that the accumulated densities resolve the identity:
/// centers run from 6 standard deviations below the domain to 6 above.
pub fn gaussian_position_family(
    domain: &DomainSpec,
    w: f64,
    x0_step: f64,
) -> Result<MeasureFamily> {
    if !(x0_step > 0.0 && x0_step.is_finite()) {
        return Err(Error::InvalidParameter(format!("center step must be positive, got {x0_step}")));
    }
    let pts = domain.points();
    let pad = 6.0 * w.sqrt();
    let lo = pts[0] - pad;
    let hi = pts[pts.len() - 1] + pad;
    let n_centers = ((hi - lo) / x0_step).ceil() as usize + 1;
    let norm = 1.0 / (2.0 * PI * w).sqrt();
    let elements = (0..n_centers)
        .map(|i| {
            let x0 = lo + i as f64 * x0_step;
            let d = DVector::from_iterator(
                pts.len(),
                pts.iter().map(|&x| norm * (-(x - x0).powi(2) / (2.0 * w)).exp()),
            );
            MeasureElement {
                label: OutcomeLabel::Real(x0),
                weight: x0_step,
                op: ElementOp::Diagonal(d),
            }
        })
        .collect();
    MeasureFamily::new(domain.clone(), elements, FamilyKind::General)
}

/// Applies one Kraus operator to a normalized state: returns the normalized
/// posterior and the outcome probability (a density when the operator is
/// density-normalized). Outcomes with vanishing probability are rejected.
pub fn apply_kraus(k: &LinearOperator, psi: &StateVector) -> Result<(StateVector, f64)> {
    k.domain.same_as(&psi.domain)?;
    let out = k.apply(psi)?;
    let p = out.norm_sq();
    if p < 1e-14 {
        return Err(Error::OutcomeImpossible { probability: p });
    }
    Ok((out.normalized()?, p))
}

/// Density-matrix form, on weighted-coordinate density matrices.
pub fn apply_kraus_density(
    k: &LinearOperator,
    rho: &DMatrix<Complex64>,
) -> Result<(DMatrix<Complex64>, f64)> {
    let krk = linalg::cgemm(&linalg::cgemm(&k.matrix, rho), &k.matrix.adjoint());
    let p = linalg::trace(&krk).re;
    if p < 1e-14 {
        return Err(Error::OutcomeImpossible { probability: p });
    }
    Ok((krk / Complex64::new(p, 0.0), p))
}

/// Sharp position binning at resolution bin_width: rank-one elements given
/// by the normalized indicator of each bin. Exactly orthonormal, but they
/// resolve only the projector onto the bin-indicator span.
pub fn coarse_position_family(domain: &DomainSpec, bin_width: f64) -> Result<MeasureFamily> {
    let h = domain.spacing();
    let q_real = bin_width / h;
    let q = q_real.round();
    if (q_real - q).abs() > 1e-9 || q < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "bin width {bin_width} must be a whole number of grid steps {h}"
        )));
    }
    let q = q as usize;
    let n = domain.dim();
    if !n.is_multiple_of(q) {
        return Err(Error::InvalidParameter(format!(
            "grid of {n} points does not divide into bins of {q}"
        )));
    }
    let pts = domain.points();
    let w = domain.weight();
    let amp = (w / bin_width).sqrt();
    let elements = (0..n / q)
        .map(|b| {
            let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
            for j in b * q..(b + 1) * q {
                v[j] = Complex64::new(amp, 0.0);
            }
            let center = 0.5 * (pts[b * q] + pts[(b + 1) * q - 1]);
            MeasureElement { label: OutcomeLabel::Real(center), weight: 1.0, op: ElementOp::Rank1(v) }
        })
        .collect();
    MeasureFamily::new(domain.clone(), elements, FamilyKind::CompleteOnSubspace)
}

/// Joint coarse-position / momentum family: within each position bin, a
/// plane-wave factor sampled over the supplied momenta. With samples
/// spanning the full band at a multiple of the grid count, the family
/// resolves the identity exactly.
pub fn binned_phase_space_family(
    domain: &DomainSpec,
    bin_width: f64,
    p_samples: &[f64],
) -> Result<MeasureFamily> {
    if p_samples.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 momentum samples".into()));
    }
    if p_samples.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("momentum samples must be strictly increasing".into()));
    }
    let h = domain.spacing();
    let q_real = bin_width / h;
    let q = q_real.round();
    if (q_real - q).abs() > 1e-9 || q < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "bin width {bin_width} must be a whole number of grid steps {h}"
        )));
    }
    let q = q as usize;
    let n = domain.dim();
    if !n.is_multiple_of(q) {
        return Err(Error::InvalidParameter(format!(
            "grid of {n} points does not divide into bins of {q}"
        )));
    }
    let pts = domain.points();
    let w = domain.weight();
    let amp = (w / bin_width).sqrt();
    let trap = {
        let m = p_samples.len();
        let mut t = vec![0.0; m];
        for i in 0..m {
            let lo = if i == 0 { p_samples[0] } else { p_samples[i - 1] };
            let hi = if i == m - 1 { p_samples[m - 1] } else { p_samples[i + 1] };
            t[i] = 0.5 * (hi - lo);
        }
        t
    };
    let mut elements = Vec::with_capacity((n / q) * p_samples.len());
    for b in 0..n / q {
        let center = 0.5 * (pts[b * q] + pts[(b + 1) * q - 1]);
        for (i, &p) in p_samples.iter().enumerate() {
            let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
            for j in b * q..(b + 1) * q {
                v[j] = Complex64::from_polar(amp, p * pts[j]);
            }
            elements.push(MeasureElement {
                label: OutcomeLabel::Pair(center, p),
                weight: trap[i] * bin_width / (2.0 * PI),
                op: ElementOp::Rank1(v),
            });
        }
    }
    MeasureFamily::new(domain.clone(), elements, FamilyKind::General)
}

#[derive(Debug, Clone)]
pub struct NeumarkDilation {
    /// isometry from the original space into the outcome space; rows are
    /// the adjoints of the weighted element vectors
    pub isometry: DMatrix<Complex64>,
    /// unitary completion of the isometry on the outcome space
    pub unitary: DMatrix<Complex64>,
    /// largest entrywise deviation between the pulled-back outcome
    /// projectors and the original elements
    pub reconstruction_deviation: f64,
}

fn rank1_vector(e: &MeasureElement, idx: usize) -> Result<DVector<Complex64>> {
    match &e.op {
        ElementOp::Rank1(v) => Ok(v * Complex64::new(e.weight.sqrt(), 0.0)),
        ElementOp::Dense(m) => {
            let pur = purity_dense(m);
            if (pur - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidFamily(format!(
                    "element {idx} has purity {pur:.6}, dilation needs rank-one elements"
                )));
            }
            let (vals, vecs) = linalg::eigh(m);
            let top = vals.len() - 1;
            let mut v = vecs.column(top).into_owned() * Complex64::new((vals[top] * e.weight).sqrt(), 0.0);
            // fix the arbitrary eigenvector phase deterministically
            let lead = (0..v.len()).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).unwrap();
            let ph = v[lead] / Complex64::new(v[lead].norm().max(1e-300), 0.0);
            v /= ph;
            Ok(v)
        }
        ElementOp::Diagonal(_) => Err(Error::InvalidFamily(format!(
            "element {idx} is a general multiplication operator, dilation needs rank-one elements"
        ))),
    }
}

/// Lifts a rank-one family to a projective measurement on the outcome
/// space: builds the isometry psi -> (<u_i, psi>)_i, completes it to a
/// unitary, and verifies that pulling the outcome projectors back through
/// the isometry reproduces the original elements.
pub fn neumark_dilate(family: &MeasureFamily) -> Result<NeumarkDilation> {
    let d = family.domain.dim();
    let k = family.elements.len();
    if k < d {
        return Err(Error::InvalidFamily(format!(
            "family with {k} outcomes cannot resolve a {d}-dimensional identity"
        )));
    }
    let vectors = family
        .elements
        .iter()
        .enumerate()
        .map(|(i, e)| rank1_vector(e, i))
        .collect::<Result<Vec<_>>>()?;
    let mut iso = DMatrix::zeros(k, d);
    for (i, u) in vectors.iter().enumerate() {
        for j in 0..d {
            iso[(i, j)] = u[j].conj();
        }
    }
    // sanity: columns orthonormal iff the family resolves the identity
    let gram = linalg::cgemm(&iso.adjoint(), &iso);
    let mut gdev = gram.clone();
    for j in 0..d {
        gdev[(j, j)] -= Complex64::new(1.0, 0.0);
    }
    let gerr = linalg::max_abs(&gdev);
    if gerr > 1e-8 {
        return Err(Error::InvalidFamily(format!(
            "family does not resolve the identity (deviation {gerr:.3e}); cannot dilate"
        )));
    }
    let unitary = linalg::complete_isometry(&iso);
    let mut rec_dev = 0.0f64;
    for (i, u) in vectors.iter().enumerate() {
        // pull back |e_i><e_i| through the isometry: (B^+ e_i)(B^+ e_i)^+
        let mut pulled = DMatrix::zeros(d, d);
        let col = DVector::from_iterator(d, (0..d).map(|j| iso[(i, j)].conj()));
        linalg::rank1_acc(&mut pulled, &col, 1.0);
        let mut target = DMatrix::zeros(d, d);
        linalg::rank1_acc(&mut target, u, 1.0);
        rec_dev = rec_dev.max(linalg::max_abs(&(pulled - target)));
    }
    Ok(NeumarkDilation { isometry: iso, unitary, reconstruction_deviation: rec_dev })
}

/// Four-outcome qubit family built from the tetrahedron directions, each
/// with weight one half. The standard example of an informationally
/// complete family that no projective measurement on the qubit reproduces.
pub fn tetrahedron_qubit_family() -> MeasureFamily {
    let domain = DomainSpec::finite_dim(2, 0).unwrap();
    let dirs = [
        (0.0f64, 0.0f64, 1.0f64),
        (2.0 * (2.0f64).sqrt() / 3.0, 0.0, -1.0 / 3.0),
        (-(2.0f64).sqrt() / 3.0, (2.0f64 / 3.0).sqrt(), -1.0 / 3.0),
        (-(2.0f64).sqrt() / 3.0, -(2.0f64 / 3.0).sqrt(), -1.0 / 3.0),
    ];
    let elements = dirs
        .iter()
        .enumerate()
        .map(|(i, &(x, y, z))| {
            // spinor along the Bloch direction (x, y, z)
            let theta = z.clamp(-1.0, 1.0).acos();
            let phi = y.atan2(x);
            let v = DVector::from_column_slice(&[
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ]);
            MeasureElement { label: OutcomeLabel::Index(i), weight: 0.5, op: ElementOp::Rank1(v) }
        })
        .collect();
    MeasureFamily::new(domain, elements, FamilyKind::General).unwrap()
}

/// Random rank-one family on dim labels with n_outcomes outcomes: the rows
/// of a Haar-random isometry. Deterministic in the seed.
pub fn random_rank1_family(dim: usize, n_outcomes: usize, seed: u64) -> Result<MeasureFamily> {
    use rand::{Rng, SeedableRng};
    if n_outcomes < dim {
        return Err(Error::InvalidParameter("need at least dim outcomes".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut g = DMatrix::from_fn(n_outcomes, n_outcomes, |_, _| {
        Complex64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
    });
    // QR with the R-diagonal phases absorbed makes the Q factor Haar
    let qr = g.clone().qr();
    let q = qr.q();
    let r = qr.r();
    for j in 0..n_outcomes {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / Complex64::new(d.norm(), 0.0) } else { Complex64::new(1.0, 0.0) };
        for i in 0..n_outcomes {
            g[(i, j)] = q[(i, j)] * ph;
        }
    }
    let domain = DomainSpec::finite_dim(dim, 0)?;
    let elements = (0..n_outcomes)
        .map(|i| {
            let v = DVector::from_iterator(dim, (0..dim).map(|j| g[(i, j)].conj()));
            MeasureElement { label: OutcomeLabel::Index(i), weight: 1.0, op: ElementOp::Rank1(v) }
        })
        .collect();
    MeasureFamily::new(domain, elements, FamilyKind::General)
}
