//! Simultaneous weak monitoring of both quadratures on a truncated level
//! space: stochastic Kraus increments, trajectory purification, the
//! ensemble unbiasedness estimator, and the closure of the generator
//! algebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{DomainSpec, LinearOperator};
use crate::linalg;

/// Quadrature pair on `fock` levels: X = (lower + raise)/sqrt(2),
/// P = i(raise - lower)/sqrt(2).
pub fn fock_ladder_ops(fock: usize) -> Result<(LinearOperator, LinearOperator)> {
    let domain = DomainSpec::fock(fock)?;
    let s = 1.0 / 2.0f64.sqrt();
    let mut x = DMatrix::zeros(fock, fock);
    let mut p = DMatrix::zeros(fock, fock);
    for n in 0..fock - 1 {
        let r = ((n + 1) as f64).sqrt();
        x[(n, n + 1)] = Complex64::new(s * r, 0.0);
        x[(n + 1, n)] = Complex64::new(s * r, 0.0);
        p[(n, n + 1)] = Complex64::new(0.0, -s * r);
        p[(n + 1, n)] = Complex64::new(0.0, s * r);
    }
    Ok((
        LinearOperator::new(domain.clone(), x)?,
        LinearOperator::new(domain, p)?,
    ))
}

/// One stochastic Kraus increment exp(X dwx + P dwp - (X^2 + P^2) dt).
pub fn kraus_increment(
    x: &LinearOperator,
    p: &LinearOperator,
    dwx: f64,
    dwp: f64,
    dt: f64,
) -> Result<DMatrix<Complex64>> {
    x.domain.same_as(&p.domain)?;
    let exponent = increment_exponent(&x.matrix, &p.matrix, &quadrature_sum(&x.matrix, &p.matrix), dwx, dwp, dt);
    Ok(linalg::expm(&exponent))
}

fn quadrature_sum(x: &DMatrix<Complex64>, p: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    linalg::cgemm(x, x) + linalg::cgemm(p, p)
}

fn increment_exponent(
    x: &DMatrix<Complex64>,
    p: &DMatrix<Complex64>,
    n2: &DMatrix<Complex64>,
    dwx: f64,
    dwp: f64,
    dt: f64,
) -> DMatrix<Complex64> {
    let mut e = DMatrix::zeros(x.nrows(), x.ncols());
    let (es, xs, ps, ns) = (
        e.as_mut_slice(),
        x.as_slice(),
        p.as_slice(),
        n2.as_slice(),
    );
    let (cx, cp, cn) = (
        Complex64::new(dwx, 0.0),
        Complex64::new(dwp, 0.0),
        Complex64::new(dt, 0.0),
    );
    for k in 0..es.len() {
        es[k] = xs[k] * cx + ps[k] * cp - ns[k] * cn;
    }
    e
}

#[derive(Debug, Clone, Copy)]
pub struct WeakConfig {
    pub fock: usize,
    pub dt: f64,
    pub t_final: f64,
    /// record the running quantities every this many steps
    pub record_every: usize,
    pub master_seed: u64,
    /// optional abort threshold on the conditioned mean level; None trusts
    /// the truncation (the maximally mixed start already sits at mean
    /// (fock-1)/2, and trajectories legitimately localize anywhere in the
    /// occupied band)
    pub mean_level_limit: Option<f64>,
}

impl WeakConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fock < 4 {
            return Err(Error::InvalidParameter("need at least 4 levels".into()));
        }
        if !(self.dt > 0.0 && self.t_final > 0.0 && self.t_final >= self.dt) {
            return Err(Error::InvalidParameter(format!(
                "bad time grid: dt={}, t_final={}",
                self.dt, self.t_final
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be positive".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseStats {
    pub n_steps: usize,
    pub var_x_over_dt: f64,
    pub var_p_over_dt: f64,
    pub cross_over_dt: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    /// purity of the conditioned density built from the maximally mixed
    /// start
    pub purity: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub mean_p: Vec<f64>,
    /// accumulated log of the Frobenius normalizations
    pub log_weight: f64,
    pub final_mean_level: f64,
    pub noise: NoiseStats,
    /// trace-normalized accumulated effect operator M dagger M
    #[serde(skip)]
    pub final_element: DMatrix<Complex64>,
}

struct RecordScratch {
    times: Vec<f64>,
    purity: Vec<f64>,
    mean_x: Vec<f64>,
    mean_p: Vec<f64>,
    mean_level: f64,
}

fn record_state(
    m: &DMatrix<Complex64>,
    x: &DMatrix<Complex64>,
    p: &DMatrix<Complex64>,
    t: f64,
    out: &mut RecordScratch,
) {
    // conditioned density from the maximally mixed start: rho ~ M M^+
    let g = linalg::cgemm(m, &m.adjoint());
    let tr = linalg::trace(&g).re;
    let pur = linalg::frob(&g).powi(2) / (tr * tr);
    let mx = linalg::trace(&linalg::cgemm(x, &g)).re / tr;
    let mp = linalg::trace(&linalg::cgemm(p, &g)).re / tr;
    let fock = g.nrows();
    let mut lvl = 0.0;
    for n in 0..fock {
        lvl += n as f64 * g[(n, n)].re;
    }
    out.times.push(t);
    out.purity.push(pur);
    out.mean_x.push(mx);
    out.mean_p.push(mp);
    out.mean_level = lvl / tr;
}

/// Evolves the full measurement operator from the identity through
/// `n_steps` stochastic increments, renormalizing in Frobenius norm each
/// step and accumulating the log weight. Deterministic in (master_seed,
/// traj_index) regardless of threading.
pub fn run_trajectory(cfg: &WeakConfig, traj_index: u64) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let (xop, pop) = fock_ladder_ops(cfg.fock)?;
    let x = xop.matrix;
    let p = pop.matrix;
    let n2 = quadrature_sum(&x, &p);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
    rng.set_stream(traj_index);
    let sqrt_dt = cfg.dt.sqrt();

    let mut m = DMatrix::identity(cfg.fock, cfg.fock)
        * Complex64::new(1.0 / (cfg.fock as f64).sqrt(), 0.0);
    let mut log_weight = (cfg.fock as f64).sqrt().ln();
    let mut scratch = RecordScratch {
        times: vec![],
        purity: vec![],
        mean_x: vec![],
        mean_p: vec![],
        mean_level: 0.0,
    };
    let mut sum_xx = 0.0f64;
    let mut sum_pp = 0.0f64;
    let mut sum_xp = 0.0f64;

    let n_steps = cfg.n_steps();
    record_state(&m, &x, &p, 0.0, &mut scratch);
    if let Some(limit) = cfg.mean_level_limit {
        if scratch.mean_level > limit {
            return Err(Error::TruncationExceeded {
                mean_n: scratch.mean_level,
                step: 0,
                limit,
            });
        }
    }
    for step in 1..=n_steps {
        let zx: f64 = rng.sample(rand_distr::StandardNormal);
        let zp: f64 = rng.sample(rand_distr::StandardNormal);
        let dwx = zx * sqrt_dt;
        let dwp = zp * sqrt_dt;
        sum_xx += dwx * dwx;
        sum_pp += dwp * dwp;
        sum_xp += dwx * dwp;

        let e = increment_exponent(&x, &p, &n2, dwx, dwp, cfg.dt);
        m = linalg::expm_apply(&e, &m);
        let c = linalg::frob(&m);
        if !c.is_finite() || c < 1e-150 {
            return Err(Error::StateCollapse { step });
        }
        m /= Complex64::new(c, 0.0);
        log_weight += c.ln();

        if step % cfg.record_every == 0 || step == n_steps {
            record_state(&m, &x, &p, step as f64 * cfg.dt, &mut scratch);
            if let Some(limit) = cfg.mean_level_limit {
                if scratch.mean_level > limit {
                    return Err(Error::TruncationExceeded {
                        mean_n: scratch.mean_level,
                        step,
                        limit,
                    });
                }
            }
        }
    }

    let n = n_steps as f64;
    let mut element = m.adjoint() * &m;
    let tr = linalg::trace(&element).re;
    element /= Complex64::new(tr, 0.0);
    Ok(TrajectoryRecord {
        times: scratch.times,
        purity: scratch.purity,
        mean_x: scratch.mean_x,
        mean_p: scratch.mean_p,
        log_weight,
        final_mean_level: scratch.mean_level,
        noise: NoiseStats {
            n_steps,
            var_x_over_dt: sum_xx / (n * cfg.dt),
            var_p_over_dt: sum_pp / (n * cfg.dt),
            cross_over_dt: sum_xp / (n * cfg.dt),
        },
        final_element: element,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub n_trajectories: usize,
    pub t_final: f64,
    pub median_final_purity: f64,
    pub frac_final_above_099: f64,
    /// fraction of trajectories whose recorded purity never drops by more
    /// than 1e-4 between records
    pub frac_monotone: f64,
    pub mean_log_weight: f64,
}

/// Runs an ensemble in parallel; trajectory i uses noise stream i, so the
/// result is independent of the thread schedule.
pub fn run_ensemble(cfg: &WeakConfig, n_traj: usize) -> Result<(Vec<TrajectoryRecord>, EnsembleSummary)> {
    if n_traj == 0 {
        return Err(Error::InvalidParameter("need at least one trajectory".into()));
    }
    let records: Vec<TrajectoryRecord> = (0..n_traj as u64)
        .into_par_iter()
        .map(|i| run_trajectory(cfg, i))
        .collect::<Result<Vec<_>>>()?;

    let mut finals: Vec<f64> = records.iter().map(|r| *r.purity.last().unwrap()).collect();
    finals.sort_by(f64::total_cmp);
    let median = if n_traj % 2 == 1 {
        finals[n_traj / 2]
    } else {
        0.5 * (finals[n_traj / 2 - 1] + finals[n_traj / 2])
    };
    let above = finals.iter().filter(|&&p| p > 0.99).count() as f64 / n_traj as f64;
    let monotone = records
        .iter()
        .filter(|r| r.purity.windows(2).all(|w| w[1] >= w[0] - 1e-4))
        .count() as f64
        / n_traj as f64;
    let mean_log_weight = records.iter().map(|r| r.log_weight).sum::<f64>() / n_traj as f64;

    let summary = EnsembleSummary {
        n_trajectories: n_traj,
        t_final: cfg.t_final,
        median_final_purity: median,
        frac_final_above_099: above,
        frac_monotone: monotone,
        mean_log_weight,
    };
    Ok((records, summary))
}

#[derive(Debug, Clone, Serialize)]
pub struct UnbiasReport {
    pub n_trajectories: usize,
    pub t_final: f64,
    pub block: usize,
    /// entrywise deviation of the ensemble mean of K^+K from the identity
    /// on the block
    pub deviation: f64,
}

/// Monte Carlo check that the stochastic Kraus family resolves the
/// identity: averages K^+K over trajectories on the lowest `block` levels.
/// The weight of a trajectory grows like exp(2(2n+1)t) at level n, so the
/// estimator is only meaningful for short horizons; long horizons need an
/// astronomically large sample and the raw average collapses onto the few
/// largest weights.
pub fn unbiasedness_check(cfg: &WeakConfig, n_traj: usize, block: usize) -> Result<UnbiasReport> {
    cfg.validate()?;
    if block < 1 || block > cfg.fock {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= block <= {}, got {block}",
            cfg.fock
        )));
    }
    if n_traj == 0 {
        return Err(Error::InvalidParameter("need at least one trajectory".into()));
    }
    let (xop, pop) = fock_ladder_ops(cfg.fock)?;
    let x = xop.matrix;
    let p = pop.matrix;
    let n2 = quadrature_sum(&x, &p);
    let sqrt_dt = cfg.dt.sqrt();
    let n_steps = cfg.n_steps();

    let runs: Vec<(f64, DMatrix<Complex64>)> = (0..n_traj as u64)
        .into_par_iter()
        .map(|traj| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
            rng.set_stream(traj);
            // track only the action on the block columns
            let mut m = DMatrix::zeros(cfg.fock, block);
            for j in 0..block {
                m[(j, j)] = Complex64::new(1.0, 0.0);
            }
            let mut log_c = 0.0f64;
            for step in 1..=n_steps {
                let zx: f64 = rng.sample(rand_distr::StandardNormal);
                let zp: f64 = rng.sample(rand_distr::StandardNormal);
                let e = increment_exponent(&x, &p, &n2, zx * sqrt_dt, zp * sqrt_dt, cfg.dt);
                m = linalg::expm_apply(&e, &m);
                let c = linalg::frob(&m);
                if !c.is_finite() || c < 1e-150 {
                    return Err(Error::StateCollapse { step });
                }
                m /= Complex64::new(c, 0.0);
                log_c += c.ln();
            }
            Ok((log_c, linalg::cgemm(&m.adjoint(), &m)))
        })
        .collect::<Result<Vec<_>>>()?;

    // average exp(2 log c) K^+K with the largest weight factored out
    let top = runs.iter().map(|(lc, _)| 2.0 * lc).fold(f64::NEG_INFINITY, f64::max);
    let mut acc = DMatrix::zeros(block, block);
    for (lc, g) in &runs {
        acc += g * Complex64::new((2.0 * lc - top).exp(), 0.0);
    }
    acc *= Complex64::new(top.exp() / n_traj as f64, 0.0);
    for j in 0..block {
        acc[(j, j)] -= Complex64::new(1.0, 0.0);
    }
    Ok(UnbiasReport {
        n_trajectories: n_traj,
        t_final: cfg.t_final,
        block,
        deviation: linalg::max_abs(&acc),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LieClosureReport {
    pub dim: usize,
    pub block: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
}

/// Verifies that the seven operators 1, i, X, P, iX, iP, X^2 + P^2 close
/// under commutation over the reals: every pairwise commutator is resolved
/// against the span by least squares on an interior block (the top levels
/// carry the truncation defect of the commutation relation).
pub fn lie_closure_check(fock: usize) -> Result<LieClosureReport> {
    if fock < 8 {
        return Err(Error::InvalidParameter("need at least 8 levels".into()));
    }
    let (xop, pop) = fock_ladder_ops(fock)?;
    let x = xop.matrix;
    let p = pop.matrix;
    let n2 = quadrature_sum(&x, &p);
    let eye = DMatrix::<Complex64>::identity(fock, fock);
    let i = Complex64::new(0.0, 1.0);
    let basis: Vec<DMatrix<Complex64>> = vec![
        eye.clone(),
        &eye * i,
        x.clone(),
        p.clone(),
        &x * i,
        &p * i,
        n2.clone(),
    ];
    let block = fock - 4;
    let corner = |m: &DMatrix<Complex64>| m.view((0, 0), (block, block)).into_owned();
    let basis_c: Vec<DMatrix<Complex64>> = basis.iter().map(&corner).collect();

    // real Gram matrix of the corner basis
    let real_ip = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| -> f64 {
        linalg::trace(&linalg::cgemm(&a.adjoint(), b)).re
    };
    let k = basis.len();
    let gram = nalgebra::DMatrix::<f64>::from_fn(k, k, |r, c| real_ip(&basis_c[r], &basis_c[c]));
    let lu = gram.lu();

    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    for a in 0..k {
        for b in a + 1..k {
            let comm = linalg::cgemm(&basis[a], &basis[b]) - linalg::cgemm(&basis[b], &basis[a]);
            let comm_c = corner(&comm);
            let cn = linalg::frob(&comm_c);
            if cn < 1e-12 {
                continue;
            }
            let rhs = DVector::<f64>::from_fn(k, |r, _| real_ip(&basis_c[r], &comm_c));
            let coeff = lu.solve(&rhs).ok_or_else(|| {
                Error::InvalidParameter("degenerate basis in the closure check".into())
            })?;
            let mut resid = comm_c.clone();
            for (j, base) in basis_c.iter().enumerate() {
                resid -= base * Complex64::new(coeff[j], 0.0);
            }
            let r = linalg::frob(&resid);
            max_abs = max_abs.max(r);
            max_rel = max_rel.max(r / cn);
        }
    }
    Ok(LieClosureReport { dim: k, block, max_abs_residual: max_abs, max_rel_residual: max_rel })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> WeakConfig {
        WeakConfig {
            fock: 30,
            dt: 1e-3,
            t_final: 10.0,
            record_every: 100,
            master_seed: 7,
            mean_level_limit: None,
        }
    }

    #[test]
    fn ladder_ops_satisfy_the_commutation_relation_away_from_the_edge() {
        let (x, p) = fock_ladder_ops(12).unwrap();
        assert!(x.hermitian_tol() < 1e-14 && p.hermitian_tol() < 1e-14);
        let comm = x.commutator(&p).unwrap();
        for r in 0..11 {
            for c in 0..11 {
                let expect = if r == c { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, 0.0) };
                assert!((comm.matrix[(r, c)] - expect).norm() < 1e-13, "({r},{c})");
            }
        }
        // the truncation dumps the whole defect on the top corner entry
        assert!((comm.matrix[(11, 11)] - Complex64::new(0.0, 1.0 - 12.0)).norm() < 1e-12);
    }

    #[test]
    fn noiseless_increment_is_the_level_damping_exponential() {
        let (x, p) = fock_ladder_ops(8).unwrap();
        let dt = 1e-3;
        let k = kraus_increment(&x, &p, 0.0, 0.0, dt).unwrap();
        for n in 0..7 {
            let expect = (-(2.0 * n as f64 + 1.0) * dt).exp();
            assert!((k[(n, n)].re - expect).abs() < 1e-12, "level {n}");
        }
        // the truncated quadrature sum is missing the coupling to the cut
        // level, which halves the top diagonal entry to fock - 1
        assert!((k[(7, 7)].re - (-7.0 * dt).exp()).abs() < 1e-12);
    }

    #[test]
    fn increment_is_positive_and_matches_its_series() {
        let (x, p) = fock_ladder_ops(8).unwrap();
        let (dt, dwx, dwp) = (1e-3, 0.02, -0.03);
        let k = kraus_increment(&x, &p, dwx, dwp, dt).unwrap();
        assert!(linalg::min_eig_hermitian(&k) > 0.0);

        let n2 = quadrature_sum(&x.matrix, &p.matrix);
        let e = increment_exponent(&x.matrix, &p.matrix, &n2, dwx, dwp, dt);
        let taylor = DMatrix::identity(8, 8) + &e + (&e * &e) * Complex64::new(0.5, 0.0);
        let gap = linalg::frob(&(&k - &taylor));
        let cube = linalg::frob(&e).powi(3);
        assert!(gap < cube, "remainder {gap} vs cube {cube}");
    }

    #[test]
    fn trajectories_are_deterministic_in_seed_and_stream() {
        let cfg = WeakConfig { t_final: 0.5, ..quick_cfg() };
        let a = run_trajectory(&cfg, 3).unwrap();
        let b = run_trajectory(&cfg, 3).unwrap();
        assert_eq!(a.log_weight.to_bits(), b.log_weight.to_bits());
        for (pa, pb) in a.purity.iter().zip(b.purity.iter()) {
            assert_eq!(pa.to_bits(), pb.to_bits());
        }
        let other = run_trajectory(&cfg, 4).unwrap();
        assert_ne!(a.log_weight.to_bits(), other.log_weight.to_bits());
    }

    #[test]
    fn sampled_noise_matches_its_nominal_statistics() {
        let cfg = quick_cfg();
        let rec = run_trajectory(&cfg, 0).unwrap();
        assert!((rec.noise.var_x_over_dt - 1.0).abs() < 0.05, "{}", rec.noise.var_x_over_dt);
        assert!((rec.noise.var_p_over_dt - 1.0).abs() < 0.05, "{}", rec.noise.var_p_over_dt);
        assert!(rec.noise.cross_over_dt.abs() < 0.05, "{}", rec.noise.cross_over_dt);
    }

    #[test]
    fn monitoring_purifies_the_maximally_mixed_start() {
        let cfg = quick_cfg();
        let (records, summary) = run_ensemble(&cfg, 6).unwrap();
        assert_eq!(records.len(), 6);
        // starts fully mixed
        assert!((records[0].purity[0] - 1.0 / 30.0).abs() < 1e-12);
        assert!(summary.median_final_purity > 0.99, "median {}", summary.median_final_purity);
        assert!(summary.frac_final_above_099 >= 5.0 / 6.0, "frac {}", summary.frac_final_above_099);
        assert!(summary.frac_monotone >= 5.0 / 6.0, "monotone {}", summary.frac_monotone);

        // the most purified effect operator should be close to a coherent
        // projector: fit its top eigenvector over a phase-space grid
        let best = records
            .iter()
            .max_by(|a, b| a.purity.last().unwrap().total_cmp(b.purity.last().unwrap()))
            .unwrap();
        let (vals, vecs) = linalg::eigh(&best.final_element);
        assert!(*vals.last().unwrap() > 0.99);
        let top = vecs.column(cfg.fock - 1).clone_owned();
        let mut fit = 0.0f64;
        let mut arg = Complex64::new(0.0, 0.0);
        let scan = |center: Complex64, span: f64, step: f64, fit: &mut f64, arg: &mut Complex64| {
            let half = (span / step).round() as i64;
            for i in -half..=half {
                for j in -half..=half {
                    let alpha = center + Complex64::new(i as f64 * step, j as f64 * step);
                    let (coeff, _) = crate::coherent::coherent_coefficients(alpha, cfg.fock);
                    let overlap = coeff.dotc(&top).norm_sqr() / coeff.norm_squared();
                    if overlap > *fit {
                        *fit = overlap;
                        *arg = alpha;
                    }
                }
            }
        };
        scan(Complex64::new(0.0, 0.0), 5.0, 0.25, &mut fit, &mut arg);
        let coarse_best = arg;
        scan(coarse_best, 0.25, 0.05, &mut fit, &mut arg);
        assert!(fit > 0.95, "best coherent overlap {fit} at {arg}");
    }

    #[test]
    fn short_horizon_average_resolves_the_identity() {
        let cfg = WeakConfig { t_final: 0.02, record_every: 10, ..quick_cfg() };
        let rep = unbiasedness_check(&cfg, 500, 8).unwrap();
        assert!(rep.deviation < 0.10, "deviation {}", rep.deviation);
    }

    #[test]
    fn long_horizon_average_is_overwhelmed_by_weight_dispersion() {
        // the weight at level n grows like exp(2(2n+1)t); by t = 4 the
        // sample mean is dominated by its single largest draw and misses
        // the identity by order one no matter what it should converge to
        let cfg = WeakConfig { t_final: 4.0, ..quick_cfg() };
        let rep = unbiasedness_check(&cfg, 40, 8).unwrap();
        assert!(rep.deviation > 0.3, "deviation {}", rep.deviation);
    }

    #[test]
    fn tight_level_limit_aborts_the_mixed_start() {
        let cfg = WeakConfig { mean_level_limit: Some(5.0), ..quick_cfg() };
        assert!(matches!(
            run_trajectory(&cfg, 0),
            Err(Error::TruncationExceeded { .. })
        ));
    }

    #[test]
    fn generator_algebra_closes_with_seven_elements() {
        let rep = lie_closure_check(30).unwrap();
        assert_eq!(rep.dim, 7);
        assert_eq!(rep.block, 26);
        assert!(rep.max_abs_residual < 1e-10, "abs {}", rep.max_abs_residual);
        assert!(rep.max_rel_residual < 1e-10, "rel {}", rep.max_rel_residual);
    }
}
