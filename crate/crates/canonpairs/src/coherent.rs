//! Oscillator eigenbases on sampled domains, coherent states built over
//! them, completeness scans of coherent families, the projection of such a
//! family onto an interval mode span, and discrete coherent lattices with
//! their frame bounds.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hilbert::{DomainSpec, LinearOperator, StateVector};
use crate::linalg;
use crate::measure::{ElementOp, FamilyKind, MeasureElement, MeasureFamily, OutcomeLabel};
use crate::pairs;

/// Orthonormal eigenbasis of a X^2 + b P^2 on a sampled domain, phase-fixed
/// so the ladder operator has positive matrix elements along the chain.
#[derive(Debug, Clone)]
pub struct OscillatorBasis {
    pub domain: DomainSpec,
    /// weighted-coordinate eigenmodes, one column per level
    pub modes: DMatrix<Complex64>,
    /// eigenvalues of the quadratic form, ascending
    pub frequencies: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub center: f64,
}

fn kinetic_operator(domain: &DomainSpec) -> Result<LinearOperator> {
    match domain {
        DomainSpec::RealLine { .. } => {
            let p = pairs::momentum_line(domain)?;
            p.mul(&p)
        }
        DomainSpec::Interval { length, n_points } => {
            // periodic spectral square: sum of p_m^2 over the alias-free modes
            let n = *n_points;
            let cutoff = (n / 2).saturating_sub(1) as i64;
            let mut m2 = DMatrix::zeros(n, n);
            for m in -cutoff..=cutoff {
                let p_m = 2.0 * PI * m as f64 / length;
                let u = pairs::interval_momentum_mode(domain, 0.0, m)?;
                linalg::rank1_acc(&mut m2, &u, p_m * p_m);
            }
            LinearOperator::new(domain.clone(), m2)
        }
        _ => Err(Error::DomainMismatch(
            "oscillator bases need a RealLine or Interval domain".into(),
        )),
    }
}

/// Eigenbasis of a (X - center)^2 + b P^2, keeping the lowest `fock` levels.
pub fn oscillator_from_quadratic_centered(
    a: f64,
    b: f64,
    center: f64,
    fock: usize,
    domain: &DomainSpec,
) -> Result<OscillatorBasis> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quadratic coefficients must be positive, got a={a}, b={b}"
        )));
    }
    let n = domain.dim();
    if fock < 2 || fock > n {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= fock <= {n}, got {fock}"
        )));
    }
    let x2 =
        LinearOperator::from_multiplication(domain.clone(), |x| (x - center).powi(2))?;
    let p2 = kinetic_operator(domain)?;
    let h = x2.scale(Complex64::new(a, 0.0)).add(&p2.scale(Complex64::new(b, 0.0)))?;
    let (vals, vecs) = linalg::eigh(&h.matrix);

    let mut modes = DMatrix::zeros(n, fock);
    for k in 0..fock {
        modes.set_column(k, &vecs.column(k));
    }

    // ladder operator for the phase chain
    let xc = LinearOperator::from_multiplication(domain.clone(), |x| x - center)?;
    let p = match domain {
        DomainSpec::RealLine { .. } => pairs::momentum_line(domain)?,
        DomainSpec::Interval { n_points, .. } => {
            // the chain only needs the sign of the ladder elements, so the
            // alias-guarded quarter band is plenty
            let ext = pairs::ExtensionParams::new(0.0, (n_points / 4).saturating_sub(1))?;
            pairs::momentum_interval_extension(domain, &ext)?
        }
        _ => unreachable!(),
    };
    let ca = (a / b).powf(0.25) / 2.0f64.sqrt();
    let cb = (b / a).powf(0.25) / 2.0f64.sqrt();
    let lower = xc
        .scale(Complex64::new(ca, 0.0))
        .add(&p.scale(Complex64::new(0.0, cb)))?;

    // make the ground state sum-positive, then walk up the chain making
    // each <psi_n | lower psi_{n+1}> real positive
    let s0: Complex64 = modes.column(0).iter().sum();
    if s0.norm() > 1e-12 {
        let ph = s0 / Complex64::new(s0.norm(), 0.0);
        let fixed = modes.column(0) / ph;
        modes.set_column(0, &fixed);
    }
    for k in 0..fock - 1 {
        let upper_col = modes.column(k + 1).into_owned();
        let dropped = linalg::cgemv(&lower.matrix, &upper_col);
        let z = modes.column(k).dotc(&dropped);
        if z.norm() > 1e-12 {
            let ph = z / Complex64::new(z.norm(), 0.0);
            let fixed = upper_col / ph;
            modes.set_column(k + 1, &fixed);
        }
    }

    Ok(OscillatorBasis {
        domain: domain.clone(),
        modes,
        frequencies: vals[..fock].to_vec(),
        a,
        b,
        center,
    })
}

/// Same, centered at the origin on the line and at the midpoint of an
/// interval.
pub fn oscillator_from_quadratic(
    a: f64,
    b: f64,
    fock: usize,
    domain: &DomainSpec,
) -> Result<OscillatorBasis> {
    let center = match domain {
        DomainSpec::RealLine { .. } => 0.0,
        DomainSpec::Interval { length, .. } => 0.5 * length,
        _ => 0.0,
    };
    oscillator_from_quadratic_centered(a, b, center, fock, domain)
}

/// Level coefficients of the displaced ground state with displacement
/// alpha, truncated at `fock` levels, together with the weight lost to the
/// truncation. Magnitudes run through log space so large displacements
/// cannot overflow the factorials.
pub fn coherent_coefficients(alpha: Complex64, fock: usize) -> (DVector<Complex64>, f64) {
    let r = alpha.norm();
    let mut c = DVector::from_element(fock, Complex64::new(0.0, 0.0));
    if r == 0.0 {
        c[0] = Complex64::new(1.0, 0.0);
        return (c, 0.0);
    }
    let th = alpha.arg();
    let mut ln_mag = -0.5 * r * r;
    let mut mass = 0.0;
    for n in 0..fock {
        if n > 0 {
            ln_mag += r.ln() - 0.5 * (n as f64).ln();
        }
        c[n] = Complex64::from_polar(ln_mag.exp(), th * n as f64);
        mass += c[n].norm_sqr();
    }
    (c, (1.0 - mass).max(0.0))
}

#[derive(Debug, Clone)]
pub struct CoherentState {
    pub state: StateVector,
    pub coefficients: DVector<Complex64>,
    /// weight beyond the retained levels
    pub norm_deficiency: f64,
}

/// Coherent state over an oscillator basis, renormalized on the grid. The
/// displacement must fit inside the retained levels.
pub fn coherent_state(basis: &OscillatorBasis, alpha: Complex64) -> Result<CoherentState> {
    let fock = basis.modes.ncols();
    let (coeff, deficiency) = coherent_coefficients(alpha, fock);
    if deficiency > 1e-2 {
        return Err(Error::InvalidParameter(format!(
            "|alpha|^2 = {:.2} leaks {:.1e} of its weight past {fock} levels",
            alpha.norm_sqr(),
            deficiency
        )));
    }
    let mut grid = linalg::cgemv(&basis.modes, &coeff);
    let nrm = grid.norm();
    grid /= Complex64::new(nrm, 0.0);
    Ok(CoherentState {
        state: StateVector::from_weighted(basis.domain.clone(), grid)?,
        coefficients: coeff,
        norm_deficiency: deficiency,
    })
}

/// Entrywise deviation from the identity of the discretized coherent
/// resolution sum_alpha (step^2/pi) |alpha><alpha|, measured on the corner
/// block of the lowest `block` levels. The level coefficients are exact, so
/// the corner probes the sampling quality alone.
pub fn coherent_povm_deviation(fock: usize, radius: f64, step: f64, block: usize) -> Result<f64> {
    if block < 1 || block > fock {
        return Err(Error::InvalidParameter(format!("need 1 <= block <= fock, got {block}")));
    }
    if !(radius > 0.0 && step > 0.0) {
        return Err(Error::InvalidParameter("radius and step must be positive".into()));
    }
    let m = (radius / step).ceil() as i64;
    let w = step * step / PI;
    let mut s = DMatrix::zeros(block, block);
    for i in -m..=m {
        for j in -m..=m {
            let alpha = Complex64::new(i as f64 * step, j as f64 * step);
            if alpha.norm() > radius {
                continue;
            }
            let (c, _) = coherent_coefficients(alpha, block);
            linalg::rank1_acc(&mut s, &c, w);
        }
    }
    for d in 0..block {
        s[(d, d)] -= Complex64::new(1.0, 0.0);
    }
    Ok(linalg::max_abs(&s))
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectedPovmReport {
    pub n_elements: usize,
    pub mode_count: usize,
    /// largest eigenvalue distance of the mode-basis resolution sum from
    /// the identity on the span
    pub completeness_deviation: f64,
    pub min_mass: f64,
    pub mean_mass: f64,
    pub max_mass: f64,
}

/// Coherent family of a stiff oscillator living inside an interval,
/// projected onto the span of the low interval momentum modes. The
/// projected elements stay rank-one (hence purity one), the resolution sum
/// approximates the span projector, and the projection cost shows up as
/// element masses strictly below one.
pub fn projected_interval_povm(
    domain: &DomainSpec,
    mode_cutoff: usize,
    a: f64,
    b: f64,
    fock: usize,
    radius: f64,
    step: f64,
) -> Result<(MeasureFamily, ProjectedPovmReport)> {
    let DomainSpec::Interval { n_points, .. } = *domain else {
        return Err(Error::DomainMismatch("projected family needs an Interval domain".into()));
    };
    if 4 * mode_cutoff >= n_points {
        return Err(Error::AliasedCutoff { cutoff: mode_cutoff, n_points });
    }
    let basis = oscillator_from_quadratic(a, b, fock, domain)?;
    let n = n_points;
    let mc = mode_cutoff as i64;
    let span_dim = 2 * mode_cutoff + 1;
    let mut v = DMatrix::zeros(n, span_dim);
    for (col, m) in (-mc..=mc).enumerate() {
        v.set_column(col, &pairs::interval_momentum_mode(domain, 0.0, m)?);
    }
    let vt = v.adjoint();

    let m_steps = (radius / step).ceil() as i64;
    let w = step * step / PI;
    let mut elements = Vec::new();
    let mut s_modes = DMatrix::zeros(span_dim, span_dim);
    let mut masses = Vec::new();
    for i in -m_steps..=m_steps {
        for j in -m_steps..=m_steps {
            let alpha = Complex64::new(i as f64 * step, j as f64 * step);
            if alpha.norm() > radius {
                continue;
            }
            let (c, _) = coherent_coefficients(alpha, fock);
            let grid = linalg::cgemv(&basis.modes, &c);
            let d = linalg::cgemv(&vt, &grid);
            masses.push(d.norm_squared());
            linalg::rank1_acc(&mut s_modes, &d, w);
            elements.push(MeasureElement {
                label: OutcomeLabel::Pair(alpha.re, alpha.im),
                weight: w,
                op: ElementOp::Rank1(linalg::cgemv(&v, &d)),
            });
        }
    }
    let (vals, _) = linalg::eigh(&{
        let mut m = s_modes.clone();
        for d in 0..span_dim {
            m[(d, d)] -= Complex64::new(1.0, 0.0);
        }
        m
    });
    let completeness_deviation = vals.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let n_elements = elements.len();
    let family = MeasureFamily::new(domain.clone(), elements, FamilyKind::CompleteOnSubspace)?;
    let min_mass = masses.iter().copied().fold(f64::INFINITY, f64::min);
    let max_mass = masses.iter().copied().fold(0.0, f64::max);
    let mean_mass = masses.iter().sum::<f64>() / masses.len() as f64;
    Ok((
        family,
        ProjectedPovmReport {
            n_elements,
            mode_count: span_dim,
            completeness_deviation,
            min_mass,
            mean_mass,
            max_mass,
        },
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameReport {
    pub a: f64,
    pub b: f64,
    pub extent: i64,
    pub n_lattice_points: usize,
    pub block: usize,
    /// smallest and largest eigenvalue of the cell-weighted lattice sum on
    /// the block; both approach pi as the lattice densifies
    pub lower: f64,
    pub upper: f64,
    pub ratio: f64,
}

/// Frame bounds of the coherent lattice alpha = m a + i n b, |m|,|n| <=
/// extent, measured on the lowest `block` levels with cell weight a*b. The
/// lattice must extend well past the block's phase-space support.
pub fn lattice_frame(a: f64, b: f64, extent: i64, fock: usize, block: usize) -> Result<FrameReport> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter("lattice spacings must be positive".into()));
    }
    if block < 1 || block > fock {
        return Err(Error::InvalidParameter(format!("need 1 <= block <= fock, got {block}")));
    }
    let needed = ((2.0 * block as f64).sqrt() + 4.0) / a.min(b);
    if (extent as f64) < needed {
        return Err(Error::InsufficientCoverage { extent: extent.max(0) as usize, needed });
    }
    let mut s = DMatrix::zeros(block, block);
    let mut count = 0usize;
    for m in -extent..=extent {
        for n in -extent..=extent {
            let alpha = Complex64::new(m as f64 * a, n as f64 * b);
            let (c, _) = coherent_coefficients(alpha, block);
            linalg::rank1_acc(&mut s, &c, a * b);
            count += 1;
        }
    }
    let (vals, _) = linalg::eigh(&s);
    let lower = vals[0];
    let upper = vals[block - 1];
    Ok(FrameReport {
        a,
        b,
        extent,
        n_lattice_points: count,
        block,
        lower,
        upper,
        ratio: upper / lower.max(1e-300),
    })
}

/// Square lattice spacings carrying N points per phase-space cell of area
/// 2*pi.
pub fn square_lattice_spacing(n_per_cell: usize) -> Result<f64> {
    if n_per_cell < 1 {
        return Err(Error::InvalidParameter("need at least one point per cell".into()));
    }
    Ok((2.0 * PI / n_per_cell as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_basis(a: f64, b: f64, fock: usize) -> OscillatorBasis {
        // box chosen with margin: a tight wrap point can host a spurious
        // junction state right in the low ladder (seen at x_max = 10 with
        // b/a = 4, where one intruder lands at 16.6 between levels 7 and 8)
        let d = DomainSpec::real_line(14.0, 420).unwrap();
        oscillator_from_quadratic(a, b, fock, &d).unwrap()
    }

    #[test]
    fn oscillator_levels_are_equally_spaced() {
        // eigenvalues of a X^2 + b P^2 sit at 2(n + 1/2) sqrt(ab)
        for &(a, b) in &[(0.5f64, 0.5f64), (2.0, 0.5), (0.5, 2.0)] {
            let basis = line_basis(a, b, 12);
            let omega = 2.0 * (a * b).sqrt();
            for n in 0..12 {
                let expect = omega * (n as f64 + 0.5);
                let got = basis.frequencies[n];
                assert!(
                    ((got - expect) / expect).abs() < 1e-6,
                    "level {n}: {got} vs {expect} (a={a}, b={b})"
                );
            }
        }
    }

    #[test]
    fn modes_are_orthonormal() {
        let basis = line_basis(0.5, 0.5, 10);
        let gram = linalg::cgemm(&basis.modes.adjoint(), &basis.modes);
        let mut dev = gram;
        for j in 0..10 {
            dev[(j, j)] -= Complex64::new(1.0, 0.0);
        }
        assert!(linalg::max_abs(&dev) < 1e-10);
    }

    #[test]
    fn ladder_chain_elements_are_positive_square_roots() {
        let basis = line_basis(0.5, 0.5, 10);
        let d = &basis.domain;
        let x = pairs::position_operator(d).unwrap();
        let p = pairs::momentum_line(d).unwrap();
        let lower = x
            .scale(Complex64::new(1.0 / 2.0f64.sqrt(), 0.0))
            .add(&p.scale(Complex64::new(0.0, 1.0 / 2.0f64.sqrt())))
            .unwrap();
        for n in 0..9usize {
            let z = basis
                .modes
                .column(n)
                .dotc(&linalg::cgemv(&lower.matrix, &basis.modes.column(n + 1).into_owned()));
            let expect = ((n + 1) as f64).sqrt();
            assert!(
                (z.re - expect).abs() < 1e-5 && z.im.abs() < 1e-8,
                "chain element {n}: {z} vs {expect}"
            );
        }
    }

    #[test]
    fn ground_state_is_annihilated() {
        let d = DomainSpec::real_line(10.0, 512).unwrap();
        let basis = oscillator_from_quadratic(0.5, 0.5, 4, &d).unwrap();
        let x = pairs::position_operator(&d).unwrap();
        let p = pairs::momentum_line(&d).unwrap();
        let ann = x
            .scale(Complex64::new(0.5f64.sqrt(), 0.0))
            .add(&p.scale(Complex64::new(0.0, 0.5f64.sqrt())))
            .unwrap();
        let res = linalg::cgemv(&ann.matrix, &basis.modes.column(0).into_owned()).norm();
        assert!(res < 1e-4, "annihilation residual {res}");
    }

    #[test]
    fn ground_state_is_sum_positive_gaussian() {
        let basis = line_basis(0.5, 0.5, 4);
        let col = basis.modes.column(0);
        let s: Complex64 = col.iter().sum();
        assert!(s.re > 0.0 && s.im.abs() < 1e-10);
        // no nodes: all entries share the ground-state sign
        assert!(col.iter().all(|c| c.re > -1e-12));
    }

    #[test]
    fn coherent_overlap_matches_displacement_distance() {
        // |<alpha|beta>|^2 = exp(-|alpha - beta|^2)
        let fock = 60;
        let al = Complex64::new(1.0, 0.5);
        let be = Complex64::new(0.3, -0.2);
        let (ca, _) = coherent_coefficients(al, fock);
        let (cb, _) = coherent_coefficients(be, fock);
        let ov = ca.dotc(&cb).norm_sqr();
        let expect = (-(al - be).norm_sqr()).exp();
        assert!(((ov - expect) / expect).abs() < 1e-8, "{ov} vs {expect}");
    }

    #[test]
    fn coherent_grid_state_has_displaced_moments() {
        let basis = line_basis(0.5, 0.5, 40);
        let alpha = Complex64::new(1.1, -0.7);
        let coh = coherent_state(&basis, alpha).unwrap();
        assert!(coh.norm_deficiency < 1e-6);
        let d = &basis.domain;
        let x = pairs::position_operator(d).unwrap();
        let p = pairs::momentum_line(d).unwrap();
        let mx = x.expectation(&coh.state).unwrap().re;
        let mp = p.expectation(&coh.state).unwrap().re;
        assert!((mx - 2.0f64.sqrt() * alpha.re).abs() < 1e-6, "mean x {mx}");
        assert!((mp - 2.0f64.sqrt() * alpha.im).abs() < 1e-6, "mean p {mp}");
        assert!((x.variance(&coh.state).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn oversized_displacement_is_rejected() {
        let basis = line_basis(0.5, 0.5, 10);
        assert!(matches!(
            coherent_state(&basis, Complex64::new(4.0, 0.0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn coherent_sampling_resolves_low_blocks() {
        let vac = coherent_povm_deviation(8, 6.0, 0.1, 1).unwrap();
        assert!(vac < 1e-10, "vacuum deviation {vac}");
        let dev = coherent_povm_deviation(56, 6.0, 0.1, 8).unwrap();
        assert!(dev < 2e-7, "block deviation {dev}");
        // a coarser scan is still fine, a tighter radius degrades it
        let coarse = coherent_povm_deviation(56, 6.0, 0.2, 8).unwrap();
        assert!(coarse < 1e-5, "coarse deviation {coarse}");
        let narrow = coherent_povm_deviation(56, 3.0, 0.1, 8).unwrap();
        assert!(narrow > 1e-4, "narrow radius should leak: {narrow}");
    }

    #[test]
    fn projected_family_is_rank_one_and_nearly_complete_on_span() {
        let d = DomainSpec::interval(1.0, 256).unwrap();
        let (fam, rep) = projected_interval_povm(&d, 8, 5000.0, 0.5, 56, 6.0, 0.2).unwrap();
        assert_eq!(rep.mode_count, 17);
        assert!(rep.completeness_deviation < 5e-2, "dev {}", rep.completeness_deviation);
        assert!(rep.completeness_deviation > 1e-5, "suspiciously exact: {}", rep.completeness_deviation);
        assert!(rep.max_mass <= 1.0 + 1e-9, "mass {}", rep.max_mass);
        assert!(rep.min_mass > 0.0 && rep.mean_mass < 1.0);
        let val = crate::measure::validate_family(&fam).unwrap();
        assert!(val.purities.iter().all(|&p| (p - 1.0).abs() < 1e-12));
        assert!(val.completeness_deviation < 5e-2);
    }

    #[test]
    fn frame_bounds_approach_pi_as_the_lattice_densifies() {
        let fock = 40;
        let block = 13;
        // one point per cell: not a frame in practice, the lower bound
        // collapses
        let a1 = square_lattice_spacing(1).unwrap();
        let r1 = lattice_frame(a1, a1, 4, fock, block).unwrap();
        assert!(r1.lower < 0.05 * PI, "critical lattice lower bound {}", r1.lower);

        let mut ratios = Vec::new();
        for &(n, ext) in &[(2usize, 6i64), (3, 7), (4, 8)] {
            let a = square_lattice_spacing(n).unwrap();
            let r = lattice_frame(a, a, ext, fock, block).unwrap();
            assert!(r.lower > 0.0 && r.upper > r.lower);
            ratios.push(r.ratio);
        }
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "ratios {ratios:?}");

        let a8 = square_lattice_spacing(8).unwrap();
        let r8 = lattice_frame(a8, a8, 11, fock, block).unwrap();
        assert!((r8.lower - PI).abs() < 0.02 * PI, "lower {}", r8.lower);
        assert!((r8.upper - PI).abs() < 0.02 * PI, "upper {}", r8.upper);
    }

    #[test]
    fn sparse_lattices_are_rejected() {
        let a8 = square_lattice_spacing(8).unwrap();
        assert!(matches!(
            lattice_frame(a8, a8, 3, 40, 13),
            Err(Error::InsufficientCoverage { .. })
        ));
    }
}
