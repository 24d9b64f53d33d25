//! Deterministic regression computations for the classic finite-interval
//! traps: expanding the constant state over twisted momentum modes, the
//! divergent momentum moments of the box state, the depth limit of the
//! finite-well commutator decomposition, and the energy variance of a state
//! outside the squared Hamiltonian's domain.

use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hilbert::DomainSpec;
use crate::linalg;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Verdict {
    fn below(value: f64, threshold: f64, detail: &str) -> Self {
        Verdict { pass: value < threshold, value, threshold, detail: detail.to_string() }
    }

    fn in_range(value: f64, lo: f64, hi: f64, detail: &str) -> Self {
        Verdict {
            pass: (lo..=hi).contains(&value),
            value,
            threshold: hi,
            detail: format!("{detail} (expected in [{lo}, {hi}])"),
        }
    }
}

/// One aligned table of values against a scan parameter, ready for CSV.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesBlock {
    pub param_name: String,
    pub params: Vec<f64>,
    pub columns: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParadoxReport {
    pub name: String,
    pub conventions: BTreeMap<String, f64>,
    pub quantities: BTreeMap<String, f64>,
    pub series: SeriesBlock,
    pub verdicts: BTreeMap<String, Verdict>,
}

impl ParadoxReport {
    pub fn passes(&self) -> bool {
        self.verdicts.values().all(|v| v.pass)
    }
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = if intervals.is_multiple_of(2) { intervals } else { intervals + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + j as f64 * h);
    }
    acc * h / 3.0
}

fn base_conventions() -> BTreeMap<String, f64> {
    let mut c = BTreeMap::new();
    c.insert("length".to_string(), 1.0);
    c.insert("mass".to_string(), 1.0);
    c.insert("hbar".to_string(), 1.0);
    c
}

/// Expansion of the constant state over the twisted momentum modes
/// p_m = theta0 + 2*pi*m at unit length: Parseval partial sums, the
/// symmetric first-moment series (converging to sin(theta0), not to the
/// naive 0), and the linear divergence of the second-moment series.
pub fn constant_wf_report(theta0: f64, m_max: usize) -> Result<ParadoxReport> {
    if !(0.0..2.0 * PI).contains(&theta0) {
        return Err(Error::InvalidParameter(format!(
            "theta0 must lie in [0, 2*pi), got {theta0}"
        )));
    }
    if m_max < 10 {
        return Err(Error::InvalidParameter("need m_max >= 10".into()));
    }
    let mut conventions = base_conventions();
    conventions.insert("theta0".to_string(), theta0);
    conventions.insert("m_max".to_string(), m_max as f64);

    if theta0 == 0.0 {
        // the constant state is itself the zero-momentum eigenmode: the
        // expansion is a single exact term and every moment vanishes
        let mut quantities = BTreeMap::new();
        quantities.insert("parseval_deficit".to_string(), 0.0);
        quantities.insert("first_moment".to_string(), 0.0);
        quantities.insert("first_moment_target".to_string(), 0.0);
        quantities.insert("second_moment".to_string(), 0.0);
        let mut verdicts = BTreeMap::new();
        verdicts.insert(
            "eigenstate_branch".to_string(),
            Verdict::below(0.0, 1e-12, "all moments of the zero-momentum eigenstate vanish"),
        );
        return Ok(ParadoxReport {
            name: "constant-wf".to_string(),
            conventions,
            quantities,
            series: SeriesBlock {
                param_name: "m_cutoff".to_string(),
                params: vec![m_max as f64],
                columns: BTreeMap::from([
                    ("parseval_partial".to_string(), vec![1.0]),
                    ("first_moment_partial".to_string(), vec![0.0]),
                    ("second_moment_partial".to_string(), vec![0.0]),
                ]),
            },
            verdicts,
        });
    }

    let checkpoints: Vec<usize> = vec![m_max / 8, m_max / 4, m_max / 2, m_max]
        .into_iter()
        .filter(|&m| m >= 1)
        .collect();
    let weight = 4.0 * (theta0 / 2.0).sin().powi(2); // |1 - e^{i theta0}|^2

    let mut sum0 = weight / (theta0 * theta0);
    let mut sum1 = weight / theta0;
    let mut sum2 = weight;
    let mut rows: Vec<(usize, f64, f64, f64)> = Vec::new();
    let mut next = 0usize;
    for m in 1..=m_max {
        let pp = theta0 + 2.0 * PI * m as f64;
        let pm = theta0 - 2.0 * PI * m as f64;
        sum0 += weight * (1.0 / (pp * pp) + 1.0 / (pm * pm));
        sum1 += weight * (1.0 / pp + 1.0 / pm);
        sum2 += 2.0 * weight;
        if next < checkpoints.len() && m == checkpoints[next] {
            rows.push((m, sum0, sum1, sum2));
            next += 1;
        }
    }

    let deficits: Vec<f64> = rows.iter().map(|r| (1.0 - r.1).abs()).collect();
    let last = rows.last().unwrap();
    let target1 = theta0.sin();
    let mut quantities = BTreeMap::new();
    quantities.insert("parseval_deficit".to_string(), deficits[deficits.len() - 1]);
    quantities.insert("first_moment".to_string(), last.2);
    quantities.insert("first_moment_target".to_string(), target1);
    quantities.insert("second_moment".to_string(), last.3);
    quantities.insert("second_growth_rate".to_string(), last.3 / (2.0 * last.0 as f64 + 1.0));
    quantities.insert("second_growth_target".to_string(), weight);

    let mut verdicts = BTreeMap::new();
    verdicts.insert(
        "parseval".to_string(),
        Verdict::below(deficits[deficits.len() - 1], 1e-3, "norm deficit of the partial expansion"),
    );
    if deficits.len() >= 3 {
        let r1 = deficits[deficits.len() - 3] / deficits[deficits.len() - 2];
        let r2 = deficits[deficits.len() - 2] / deficits[deficits.len() - 1];
        verdicts.insert(
            "parseval_decay".to_string(),
            Verdict::in_range(
                0.5 * (r1 + r2),
                1.6,
                2.4,
                "deficit halving rate under cutoff doubling",
            ),
        );
    }
    verdicts.insert(
        "first_moment".to_string(),
        Verdict::below(
            (last.2 - target1).abs(),
            1e-3,
            "symmetric first-moment series against the boundary value sin(theta0)",
        ),
    );
    if rows.len() >= 2 {
        let prev = &rows[rows.len() - 2];
        verdicts.insert(
            "second_divergence".to_string(),
            Verdict::in_range(
                last.3 / prev.3,
                1.8,
                2.2,
                "second-moment growth under cutoff doubling",
            ),
        );
    }

    Ok(ParadoxReport {
        name: "constant-wf".to_string(),
        conventions,
        quantities,
        series: SeriesBlock {
            param_name: "m_cutoff".to_string(),
            params: rows.iter().map(|r| r.0 as f64).collect(),
            columns: BTreeMap::from([
                ("parseval_partial".to_string(), rows.iter().map(|r| r.1).collect()),
                ("parseval_deficit".to_string(), deficits.clone()),
                ("first_moment_partial".to_string(), rows.iter().map(|r| r.2).collect()),
                ("second_moment_partial".to_string(), rows.iter().map(|r| r.3).collect()),
            ]),
        },
        verdicts,
    })
}

/// Momentum moments of the box state over a growing symmetric window,
/// through the squared-magnitude momentum density (the physically
/// meaningful integrand) and through the single oscillatory amplitude
/// factor, both by quadrature. n = 0 converges to the norm, n = 1 vanishes
/// under any symmetric window, n = 2 grows linearly without bound.
pub fn sinc_moment_scan(n: u32, cutoffs: &[f64]) -> Result<ParadoxReport> {
    if n > 2 {
        return Err(Error::InvalidParameter(format!("moment order must be 0, 1 or 2, got {n}")));
    }
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("cutoffs must be strictly increasing".into()));
    }
    if cutoffs[0] <= 0.0 {
        return Err(Error::InvalidParameter("cutoffs must be positive".into()));
    }
    let l = 1.0f64;
    let density = move |p: f64| -> f64 {
        if p.abs() < 1e-12 {
            l / (2.0 * PI)
        } else {
            (2.0 / (PI * l)) * (p * l / 2.0).sin().powi(2) / (p * p)
        }
    };
    let amplitude = move |p: f64| -> f64 {
        if p.abs() < 1e-12 {
            (l / (2.0 * PI)).sqrt()
        } else {
            2.0 * (p * l / 2.0).sin() / (p * (2.0 * PI * l).sqrt())
        }
    };

    let mut dens_vals = Vec::new();
    let mut amp_vals = Vec::new();
    let mut closed_vals = Vec::new();
    for &lam in cutoffs {
        let intervals = ((40.0 * lam * l).ceil() as usize).max(2000);
        let pw = |p: f64| p.powi(n as i32);
        dens_vals.push(simpson(|p| pw(p) * density(p), -lam, lam, intervals));
        amp_vals.push(simpson(|p| pw(p) * amplitude(p), -lam, lam, intervals));
        if n == 2 {
            closed_vals.push((2.0 / (PI * l)) * (lam - (lam * l).sin() / l));
        }
    }

    let mut conventions = base_conventions();
    conventions.insert("moment_order".to_string(), n as f64);
    let mut quantities = BTreeMap::new();
    let mut verdicts = BTreeMap::new();
    let last = dens_vals[dens_vals.len() - 1];
    quantities.insert("density_moment_final".to_string(), last);
    quantities.insert(
        "single_sinc_moment_final".to_string(),
        amp_vals[amp_vals.len() - 1],
    );

    match n {
        0 => {
            let deficit = (last - 1.0).abs();
            quantities.insert("norm_deficit".to_string(), deficit);
            let shrinking = dens_vals
                .windows(2)
                .all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs() + 1e-12);
            verdicts.insert(
                "norm_convergence".to_string(),
                Verdict::below(deficit, 0.01, "window norm against the full norm"),
            );
            verdicts.insert(
                "norm_deficit_shrinks".to_string(),
                Verdict::below(
                    if shrinking { 0.0 } else { 1.0 },
                    0.5,
                    "norm deficit decreases with the window",
                ),
            );
        }
        1 => {
            let worst = dens_vals
                .iter()
                .chain(amp_vals.iter())
                .map(|v| v.abs())
                .fold(0.0, f64::max);
            quantities.insert("max_abs_first_moment".to_string(), worst);
            verdicts.insert(
                "odd_moment_zero".to_string(),
                Verdict::below(worst, 1e-10, "symmetric windows cancel the odd moment"),
            );
        }
        _ => {
            let mut worst_ratio_gap = 0.0f64;
            for w in dens_vals.windows(2).zip(cutoffs.windows(2)) {
                let (vals, cps) = w;
                let growth = (vals[1] / vals[0]) / (cps[1] / cps[0]);
                worst_ratio_gap = worst_ratio_gap.max((growth - 1.0).abs());
            }
            quantities.insert("linear_growth_gap".to_string(), worst_ratio_gap);
            verdicts.insert(
                "linear_divergence".to_string(),
                Verdict::below(worst_ratio_gap, 0.1, "second moment grows linearly in the cutoff"),
            );
            let rel = dens_vals
                .iter()
                .zip(closed_vals.iter())
                .map(|(a, b)| ((a - b) / b).abs())
                .fold(0.0, f64::max);
            quantities.insert("closed_form_gap".to_string(), rel);
            verdicts.insert(
                "matches_closed_form".to_string(),
                Verdict::below(rel, 1e-6, "quadrature against the antiderivative"),
            );
        }
    }

    let mut columns = BTreeMap::from([
        ("density_moment".to_string(), dens_vals),
        ("single_sinc_moment".to_string(), amp_vals),
    ]);
    if n == 2 {
        columns.insert("density_closed_form".to_string(), closed_vals);
    }
    Ok(ParadoxReport {
        name: format!("sinc-moment-n{n}"),
        conventions,
        quantities,
        series: SeriesBlock {
            param_name: "cutoff".to_string(),
            params: cutoffs.to_vec(),
            columns,
        },
        verdicts,
    })
}

/// Naive right-acting expectation <X^4 P^4 - P^4 X^4> of the box ground
/// state at unit length, by quadrature of the interior terms (the smooth
/// cosine is differentiated through the walls, which is exactly the naive
/// move).
pub fn box_naive_commutator() -> f64 {
    let l = 1.0f64;
    let n = 8000usize;
    let h = l / n as f64;
    let phi = |x: f64| (2.0 / l).sqrt() * (PI * x / l).cos();
    let f = |x: f64| x.powi(4) * phi(x);
    let d4f = |x: f64| (f(x - 2.0 * h) - 4.0 * f(x - h) + 6.0 * f(x) - 4.0 * f(x + h) + f(x + 2.0 * h)) / h.powi(4);
    let term1 = (PI / l).powi(4) * simpson(|x| x.powi(4) * phi(x) * phi(x), -l / 2.0, l / 2.0, n);
    let term2 = simpson(|x| phi(x) * d4f(x), -l / 2.0, l / 2.0, n);
    term1 - term2
}

struct WellState {
    energy: f64,
    /// pointwise amplitudes, unit L2 norm
    phi: Vec<f64>,
    kappa: f64,
}

fn solve_well(pts: &[f64], h: f64, depth: f64, eigenindex: usize) -> Result<WellState> {
    let n = pts.len();
    let potential = |x: f64| -> f64 {
        let d = x.abs() - 0.5;
        if d.abs() < 1e-12 {
            0.5 * depth
        } else if d < 0.0 {
            0.0
        } else {
            depth
        }
    };
    let diag: Vec<f64> = pts.iter().map(|&x| 1.0 / (h * h) + potential(x)).collect();
    let off = vec![-0.5 / (h * h); n - 1];
    let (energy, v) = linalg::tridiag_eigenpair(&diag, &off, eigenindex);
    if energy >= depth {
        return Err(Error::NotBound { index: eigenindex, depth });
    }
    let kappa = (2.0 * (depth - energy)).sqrt();
    let phi: Vec<f64> = v.iter().map(|&a| a / h.sqrt()).collect();
    Ok(WellState { energy, phi, kappa })
}

/// Decomposition of <X^4 P^4 - P^4 X^4> for a finite-well bound state into
/// interior, exterior and boundary contributions, against the naive box
/// value. Interior and exterior are the smooth integrals on either side of
/// the potential step (the exterior one lives almost entirely in the
/// evanescent zone, within a few 1/kappa of the step); the boundary bucket
/// is the exact jump term -4 V0 (phi(L/2)^2 + phi(-L/2)^2) the step puts
/// into the fourth derivative. Deepening the well drives the pattern to
/// (1, 1, -2) * C_naive with a vanishing total.
pub fn finite_well_commutator(
    depths: &[f64],
    grid: &DomainSpec,
    eigenindex: usize,
) -> Result<ParadoxReport> {
    let DomainSpec::RealLine { x_max, n_points } = *grid else {
        return Err(Error::DomainMismatch("the well needs a RealLine grid".into()));
    };
    if depths.is_empty() || depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("depths must be strictly increasing".into()));
    }
    if x_max <= 0.75 {
        return Err(Error::InvalidParameter("grid must enclose the well with margin".into()));
    }
    let pts = grid.points();
    let h = grid.spacing();
    let on_node = pts.iter().any(|&x| (x - 0.5).abs() < 1e-9);
    if !on_node {
        return Err(Error::InvalidParameter(
            "well edges must land on grid nodes (use a point count divisible by the edge ratio)".into(),
        ));
    }
    let n = pts.len();

    let c_naive = box_naive_commutator();
    let mut rows: Vec<(f64, f64, f64, f64, f64, f64, f64)> = Vec::new();
    for &depth in depths {
        let ws = solve_well(&pts, h, depth, eigenindex)?;
        let delta = 5.0 / ws.kappa;
        if 0.5 + delta > x_max - 4.0 * h {
            return Err(Error::InvalidParameter(format!(
                "evanescent zone of width {delta:.3} at depth {depth} exceeds the grid"
            )));
        }
        let phi = &ws.phi;
        let e = ws.energy;
        let dphi: Vec<f64> = (0..n)
            .map(|j| {
                if j == 0 {
                    (phi[1] - phi[0]) / h
                } else if j == n - 1 {
                    (phi[n - 1] - phi[n - 2]) / h
                } else {
                    (phi[j + 1] - phi[j - 1]) / (2.0 * h)
                }
            })
            .collect();
        let g_at = |j: usize, v: f64| -> f64 {
            let x = pts[j];
            -phi[j]
                * ((32.0 * x.powi(3) * (v - e) + 96.0 * x) * dphi[j]
                    + (144.0 * x * x * (v - e) + 24.0) * phi[j])
        };
        let mut inside = 0.0;
        let mut outside = 0.0;
        let mut edge_sq = 0.0;
        for j in 0..n {
            let ax = pts[j].abs();
            if (ax - 0.5).abs() < 1e-9 {
                // the node on the step: half a cell on each side, with the
                // one-sided potential values
                inside += 0.5 * h * g_at(j, 0.0);
                outside += 0.5 * h * g_at(j, depth);
                edge_sq += phi[j] * phi[j];
                continue;
            }
            if ax < 0.5 {
                inside += g_at(j, 0.0) * h;
            } else {
                outside += g_at(j, depth) * h;
            }
        }
        // exact jump contribution of the potential step
        let boundary = -4.0 * depth * edge_sq;
        let total = inside + outside + boundary;
        rows.push((depth, ws.energy, delta, inside, outside, boundary, total));
    }

    let residuals: Vec<f64> = rows
        .iter()
        .map(|r| {
            ((r.3 - c_naive).abs())
                .max((r.4 - c_naive).abs())
                .max((r.5 + 2.0 * c_naive).abs())
                .max(r.6.abs())
                / c_naive.abs()
        })
        .collect();

    let mut conventions = base_conventions();
    conventions.insert("eigenindex".to_string(), eigenindex as f64);
    conventions.insert("x_max".to_string(), x_max);
    conventions.insert("n_points".to_string(), n_points as f64);
    conventions.insert("evanescent_decay_lengths".to_string(), 5.0);

    let deepest = rows.last().unwrap();
    let mut quantities = BTreeMap::new();
    quantities.insert("c_naive".to_string(), c_naive);
    quantities.insert("total_over_c_naive".to_string(), deepest.6.abs() / c_naive.abs());
    quantities.insert("inside_over_c_naive".to_string(), deepest.3 / c_naive);
    quantities.insert("outside_over_c_naive".to_string(), deepest.4 / c_naive);
    quantities.insert("boundary_over_c_naive".to_string(), deepest.5 / c_naive);

    let mut verdicts = BTreeMap::new();
    verdicts.insert(
        "total_vanishes".to_string(),
        Verdict::below(
            deepest.6.abs() / c_naive.abs(),
            0.05,
            "total expectation against the naive scale at the deepest well",
        ),
    );
    let pattern_gap = ((deepest.3 / c_naive - 1.0).abs())
        .max((deepest.4 / c_naive - 1.0).abs())
        .max((deepest.5 / (-2.0 * c_naive) - 1.0).abs());
    verdicts.insert(
        "pattern".to_string(),
        Verdict::below(pattern_gap, 0.10, "(inside, outside, boundary) against (1, 1, -2)"),
    );
    let violations = residuals.windows(2).filter(|w| w[1] > w[0] + 1e-12).count();
    verdicts.insert(
        "residual_ladder".to_string(),
        Verdict::below(
            violations as f64,
            1.5,
            "pattern residuals decrease with depth (one non-monotone step allowed)",
        ),
    );

    Ok(ParadoxReport {
        name: "finite-well".to_string(),
        conventions,
        quantities,
        series: SeriesBlock {
            param_name: "depth".to_string(),
            params: rows.iter().map(|r| r.0).collect(),
            columns: BTreeMap::from([
                ("energy".to_string(), rows.iter().map(|r| r.1).collect()),
                ("evanescent_width".to_string(), rows.iter().map(|r| r.2).collect()),
                ("inside".to_string(), rows.iter().map(|r| r.3).collect()),
                ("outside".to_string(), rows.iter().map(|r| r.4).collect()),
                ("boundary".to_string(), rows.iter().map(|r| r.5).collect()),
                ("total".to_string(), rows.iter().map(|r| r.6).collect()),
                ("pattern_residual".to_string(), residuals),
            ]),
        },
        verdicts,
    })
}

fn parabola_state(n: usize) -> (Vec<f64>, f64) {
    // psi = sqrt(15/8) (1 - 4 x_c^2) on the unit interval, cell-centered
    let h = 1.0 / n as f64;
    let norm = (15.0f64 / 8.0).sqrt();
    let psi = (0..n)
        .map(|j| {
            let xc = (j as f64 + 0.5) * h - 0.5;
            norm * (1.0 - 4.0 * xc * xc)
        })
        .collect();
    (psi, h)
}

fn dirichlet_p2(psi: &[f64], h: f64) -> Vec<f64> {
    // -psi'' with hard walls via antisymmetric ghosts
    let n = psi.len();
    (0..n)
        .map(|j| {
            let left = if j == 0 { -psi[0] } else { psi[j - 1] };
            let right = if j == n - 1 { -psi[n - 1] } else { psi[j + 1] };
            -(left - 2.0 * psi[j] + right) / (h * h)
        })
        .collect()
}

fn variance_route_b(psi: &[f64], h: f64) -> f64 {
    let u = dirichlet_p2(psi, h);
    let norm_sq: f64 = psi.iter().map(|a| a * a).sum::<f64>() * h;
    let e2: f64 = u.iter().map(|a| a * a).sum::<f64>() * h / norm_sq;
    let e1: f64 = u.iter().zip(psi.iter()).map(|(a, b)| a * b).sum::<f64>() * h / norm_sq;
    e2 - e1 * e1
}

/// Energy variance of the parabolic state on the unit interval, two ways:
/// the naive fourth derivative (which annihilates the state and reports
/// zero) and the square of the well-defined second-derivative action
/// (which gives the stable positive value). A discrete eigenstate is run
/// through the proper route as a zero-variance control.
pub fn energy_variance_example(n_points: usize) -> Result<ParadoxReport> {
    if n_points < 100 {
        return Err(Error::InvalidParameter("need at least 100 grid points".into()));
    }

    // naive route on a moderate grid: the fourth difference of a quadratic
    // cancels identically, so only roundoff survives; a finer grid would
    // just amplify the 1/h^4 noise
    let (psi_a, h_a) = parabola_state(200);
    let n_a = psi_a.len();
    let mut route_a = 0.0f64;
    for j in 2..n_a - 2 {
        let d4 = (psi_a[j - 2] - 4.0 * psi_a[j - 1] + 6.0 * psi_a[j] - 4.0 * psi_a[j + 1]
            + psi_a[j + 2])
            / h_a.powi(4);
        route_a += psi_a[j] * d4 * h_a;
    }

    let ladder = [n_points, 2 * n_points, 4 * n_points];
    let route_b: Vec<f64> = ladder
        .iter()
        .map(|&n| {
            let (psi, h) = parabola_state(n);
            variance_route_b(&psi, h)
        })
        .collect();
    let change = ((route_b[2] - route_b[1]) / route_b[2]).abs();

    // quadrature oracle on the smooth state: psi'' = -8 N, so the variance
    // is 64 N^2 - (8 N^2 * integral of (1 - 4x^2))^2
    let norm = (15.0f64 / 8.0).sqrt();
    let e2 = simpson(|_| 64.0 * norm * norm, -0.5, 0.5, 2000);
    let e1 = simpson(|x| 8.0 * norm * norm * (1.0 - 4.0 * x * x), -0.5, 0.5, 2000);
    let oracle = e2 - e1 * e1;

    // zero-variance control: the exact eigenvector of the discrete wall
    // Hamiltonian
    let n_e = n_points;
    let h_e = 1.0 / n_e as f64;
    let eig: Vec<f64> = (0..n_e).map(|j| (PI * (j as f64 + 0.5) * h_e).sin()).collect();
    let eig_var = variance_route_b(&eig, h_e);

    let mut conventions = base_conventions();
    conventions.insert("n_points".to_string(), n_points as f64);

    let mut quantities = BTreeMap::new();
    quantities.insert("route_a_naive".to_string(), route_a);
    quantities.insert("route_b_finest".to_string(), route_b[2]);
    quantities.insert("route_b_change_on_doubling".to_string(), change);
    quantities.insert("quadrature_oracle".to_string(), oracle);
    quantities.insert("eigenstate_variance".to_string(), eig_var);

    let mut verdicts = BTreeMap::new();
    verdicts.insert(
        "naive_route_vanishes".to_string(),
        Verdict::below(route_a.abs(), 1e-6, "fourth difference annihilates the parabola"),
    );
    verdicts.insert(
        "proper_route_stable".to_string(),
        Verdict::below(change, 0.01, "route (b) change under grid doubling"),
    );
    verdicts.insert(
        "matches_oracle".to_string(),
        Verdict::below(
            ((route_b[2] - oracle) / oracle).abs(),
            0.01,
            "route (b) against the smooth quadrature value",
        ),
    );
    verdicts.insert(
        "eigenstate_zero_variance".to_string(),
        Verdict::below(eig_var.abs(), 1e-8, "discrete eigenstate has no energy spread"),
    );

    Ok(ParadoxReport {
        name: "energy-variance".to_string(),
        conventions,
        quantities,
        series: SeriesBlock {
            param_name: "n_points".to_string(),
            params: ladder.iter().map(|&n| n as f64).collect(),
            columns: BTreeMap::from([("route_b".to_string(), route_b)]),
        },
        verdicts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    ConstantWf,
    SincMoments,
    FiniteWell,
    EnergyVariance,
}

impl Scenario {
    pub fn all() -> [Scenario; 4] {
        [
            Scenario::ConstantWf,
            Scenario::SincMoments,
            Scenario::FiniteWell,
            Scenario::EnergyVariance,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::ConstantWf => "constant-wf",
            Scenario::SincMoments => "sinc-moments",
            Scenario::FiniteWell => "finite-well",
            Scenario::EnergyVariance => "energy-variance",
        }
    }

    pub fn from_name(name: &str) -> Result<Scenario> {
        match name {
            "constant-wf" => Ok(Scenario::ConstantWf),
            "sinc-moments" => Ok(Scenario::SincMoments),
            "finite-well" => Ok(Scenario::FiniteWell),
            "energy-variance" => Ok(Scenario::EnergyVariance),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

/// Optional parameter overrides for the scenario runner; unset fields fall
/// back to the reference configuration.
#[derive(Debug, Clone, Default)]
pub struct ScenarioOverrides {
    pub theta0: Option<f64>,
    pub m_max: Option<usize>,
    pub cutoffs: Option<Vec<f64>>,
    pub depths: Option<Vec<f64>>,
    pub grid_points: Option<usize>,
    pub eigenindex: Option<usize>,
}

/// Runs one scenario with its reference parameters (or the given
/// overrides). The sinc scan bundles the three moment orders into a single
/// report with prefixed keys.
pub fn run_scenario(scenario: Scenario, ov: &ScenarioOverrides) -> Result<ParadoxReport> {
    match scenario {
        Scenario::ConstantWf => {
            constant_wf_report(ov.theta0.unwrap_or(PI), ov.m_max.unwrap_or(10_000))
        }
        Scenario::SincMoments => {
            let cutoffs = ov.cutoffs.clone().unwrap_or_else(|| vec![25.0, 50.0, 100.0, 200.0]);
            let parts: Vec<ParadoxReport> = (0..=2u32)
                .map(|n| sinc_moment_scan(n, &cutoffs))
                .collect::<Result<Vec<_>>>()?;
            let mut conventions = base_conventions();
            let mut quantities = BTreeMap::new();
            let mut verdicts = BTreeMap::new();
            let mut columns = BTreeMap::new();
            for (n, part) in parts.iter().enumerate() {
                for (k, v) in &part.quantities {
                    quantities.insert(format!("n{n}_{k}"), *v);
                }
                for (k, v) in &part.verdicts {
                    verdicts.insert(format!("n{n}_{k}"), v.clone());
                }
                for (k, v) in &part.series.columns {
                    columns.insert(format!("n{n}_{k}"), v.clone());
                }
            }
            conventions.insert("moment_orders".to_string(), 3.0);
            Ok(ParadoxReport {
                name: "sinc-moments".to_string(),
                conventions,
                quantities,
                series: SeriesBlock {
                    param_name: "cutoff".to_string(),
                    params: cutoffs,
                    columns,
                },
                verdicts,
            })
        }
        Scenario::FiniteWell => {
            let depths = ov
                .depths
                .clone()
                .unwrap_or_else(|| vec![100.0, 1600.0, 25600.0, 100_000.0]);
            let grid = DomainSpec::real_line(1.25, ov.grid_points.unwrap_or(12_000))?;
            finite_well_commutator(&depths, &grid, ov.eigenindex.unwrap_or(0))
        }
        Scenario::EnergyVariance => energy_variance_example(ov.grid_points.unwrap_or(1000)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn expansion_coefficients_match_direct_quadrature() {
        // oracle: c_m = integral of e^{-i p_m x} over the unit interval
        let theta0 = 0.9f64;
        for &m in &[0i64, 1, -3, 7] {
            let p_m = theta0 + 2.0 * PI * m as f64;
            let re = simpson(|x| (p_m * x).cos(), 0.0, 1.0, 4000);
            let im = simpson(|x| -(p_m * x).sin(), 0.0, 1.0, 4000);
            let quad = Complex64::new(re, im).norm_sqr();
            let closed = 4.0 * (theta0 / 2.0).sin().powi(2) / (p_m * p_m);
            assert!((quad - closed).abs() < 1e-10, "m={m}: {quad} vs {closed}");
        }
    }

    #[test]
    fn constant_state_report_finds_the_boundary_moment() {
        let rep = constant_wf_report(0.9, 10_000).unwrap();
        assert!(rep.passes(), "verdicts: {:?}", rep.verdicts);
        let fm = rep.quantities["first_moment"];
        assert!((fm - 0.9f64.sin()).abs() < 1e-3, "first moment {fm}");
        let rate = rep.quantities["second_growth_rate"];
        let target = rep.quantities["second_growth_target"];
        assert!(((rate - target) / target).abs() < 1e-3, "{rate} vs {target}");
    }

    #[test]
    fn constant_state_report_at_half_twist() {
        let rep = constant_wf_report(PI, 10_000).unwrap();
        assert!(rep.passes());
        assert!(rep.quantities["parseval_deficit"] < 1e-3);
        assert!(rep.quantities["first_moment"].abs() < 1e-3);
    }

    #[test]
    fn zero_twist_routes_to_the_eigenstate_branch() {
        let rep = constant_wf_report(0.0, 100).unwrap();
        assert!(rep.passes());
        assert_eq!(rep.quantities["second_moment"], 0.0);
        assert!(rep.verdicts.contains_key("eigenstate_branch"));
    }

    #[test]
    fn under_resolved_expansion_fails_its_verdict() {
        let rep = constant_wf_report(PI, 12).unwrap();
        assert!(!rep.verdicts["parseval"].pass);
        assert!(!rep.passes());
    }

    #[test]
    fn sinc_moments_follow_the_three_patterns() {
        let cutoffs = [50.0, 100.0, 200.0, 400.0];
        let r0 = sinc_moment_scan(0, &cutoffs).unwrap();
        assert!(r0.passes(), "n=0: {:?}", r0.verdicts);
        assert!(r0.quantities["norm_deficit"] < 0.01);

        let r1 = sinc_moment_scan(1, &cutoffs).unwrap();
        assert!(r1.passes());
        assert!(r1.quantities["max_abs_first_moment"] < 1e-10);

        let r2 = sinc_moment_scan(2, &cutoffs).unwrap();
        assert!(r2.passes(), "n=2: {:?}", r2.verdicts);
        assert!(r2.quantities["closed_form_gap"] < 1e-6);
        // the single oscillatory factor does not settle: its swing stays on
        // the order of the cutoff
        let amp = &r2.series.columns["single_sinc_moment"];
        let spread = amp.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(spread > 1.0, "oscillation amplitude {spread}");
    }

    #[test]
    fn naive_box_value_matches_the_closed_form() {
        // the interior terms of the right-acting expectation sum to 4 pi^2
        // at unit length
        let c = box_naive_commutator();
        assert!((c - 4.0 * PI * PI).abs() < 1e-3, "c_naive {c}");
    }

    #[test]
    fn deep_wells_reproduce_the_cancellation_pattern() {
        let grid = DomainSpec::real_line(1.25, 12_000).unwrap();
        let rep =
            finite_well_commutator(&[100.0, 1600.0, 25_600.0, 100_000.0], &grid, 0).unwrap();
        assert!(rep.passes(), "verdicts: {:?}", rep.verdicts);
        let res = &rep.series.columns["pattern_residual"];
        assert!(res[0] > 0.2, "shallow residual {}", res[0]);
        assert!(*res.last().unwrap() < 0.10, "deep residual {}", res.last().unwrap());
        assert!(rep.quantities["total_over_c_naive"] < 0.05);
    }

    #[test]
    fn unbound_index_is_rejected() {
        let grid = DomainSpec::real_line(1.25, 2_000).unwrap();
        assert!(matches!(
            finite_well_commutator(&[15.0], &grid, 5),
            Err(Error::NotBound { .. })
        ));
    }

    #[test]
    fn misaligned_well_grid_is_rejected() {
        // 1.25 * 2 / 1001 steps never hit x = 0.5 exactly
        let grid = DomainSpec::real_line(1.25, 1001).unwrap();
        assert!(finite_well_commutator(&[100.0], &grid, 0).is_err());
    }

    #[test]
    fn energy_variance_routes_disagree_as_documented() {
        let rep = energy_variance_example(1000).unwrap();
        assert!(rep.passes(), "verdicts: {:?}", rep.verdicts);
        assert!(rep.quantities["route_a_naive"].abs() < 1e-6);
        assert!((rep.quantities["route_b_finest"] - 20.0).abs() < 0.2);
        assert!((rep.quantities["quadrature_oracle"] - 20.0).abs() < 1e-6);
        assert!(rep.quantities["eigenstate_variance"].abs() < 1e-8);
    }

    #[test]
    fn scenario_runner_is_deterministic() {
        let ov = ScenarioOverrides::default();
        let a = run_scenario(Scenario::EnergyVariance, &ov).unwrap();
        let b = run_scenario(Scenario::EnergyVariance, &ov).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(Scenario::from_name("no-such-thing").is_err());
        assert_eq!(Scenario::from_name("finite-well").unwrap(), Scenario::FiniteWell);
    }
}
