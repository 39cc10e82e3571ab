//! Named network constructions and the analyses run on them.
//!
//! The grandfather network blocks the forward channel (`G1 = 0`) and lets
//! the loop phase `phi` tune the resonance; the undo network sets
//! `M = -G1^-1`. Both are expected to deliver exactly the forward evolution
//! at resonance, which is what the checks here assert.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Inversion, Operator, SplitterParams, StateVector};
use crate::error::{Error, Result};
use crate::network::{one_minus, FeedbackNetwork};

/// Residual bound for the exact special-case identities.
pub const SPECIAL_CASE_TOL: f64 = 1e-11;

/// Relative agreement required between the numeric FWHM and `2 beta^2 / alpha`
/// before the small-angle width law is considered to hold.
pub const WIDTH_LAW_TOL: f64 = 0.01;

/// Dimensions cycled through by the seeded special-case instances.
pub const SUITE_DIMS: [usize; 4] = [1, 2, 4, 8];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrandfatherParams {
    pub beta: f64,
    /// Dynamical phase accumulated by the alternate channel.
    pub theta: f64,
    /// Extra phase picked up on the way back.
    pub phi: f64,
}

impl GrandfatherParams {
    pub fn new(beta: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidArgument(format!("beta={beta} must lie in (0, 1)")));
        }
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument("theta and phi must be finite".into()));
        }
        Ok(Self { beta, theta, phi })
    }

    pub fn alpha(&self) -> f64 {
        (1.0 - self.beta * self.beta).sqrt()
    }
}

/// `G1 = 0`, `G2 = e^{-i theta}`, `M = e^{i theta + i phi}` in one dimension.
pub fn build_grandfather(p: &GrandfatherParams) -> Result<FeedbackNetwork> {
    FeedbackNetwork::new(
        Operator::zeros(1)?,
        Operator::phase(1, -p.theta)?,
        Operator::phase(1, p.theta + p.phi)?,
        SplitterParams::from_beta(p.beta)?,
    )
}

/// Transmitted probability of the grandfather network,
/// `1 / (1 + 4 (alpha^2 / beta^4) sin^2(phi / 2))`.
pub fn analytic_transmission(beta: f64, phi: f64) -> f64 {
    let alpha2 = 1.0 - beta * beta;
    let beta4 = beta.powi(4);
    let s = (phi / 2.0).sin();
    1.0 / (1.0 + 4.0 * alpha2 / beta4 * s * s)
}

/// Small-angle Lorentzian `1 / (1 + alpha^2 phi^2 / beta^4)`.
pub fn lorentzian_transmission(beta: f64, phi: f64) -> f64 {
    let alpha2 = 1.0 - beta * beta;
    1.0 / (1.0 + alpha2 * phi * phi / beta.powi(4))
}

/// Small-angle width of the resonance, `2 beta^2 / alpha`.
pub fn predicted_fwhm(beta: f64) -> f64 {
    2.0 * beta * beta / (1.0 - beta * beta).sqrt()
}

/// Magnitudes `|psi1/psi|`, `|psi2/psi|`, `|psi4/psi|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeRatios {
    pub psi1: f64,
    pub psi2: f64,
    pub psi4: f64,
}

pub fn grandfather_amplitude_ratios(p: &GrandfatherParams) -> Result<AmplitudeRatios> {
    let net = build_grandfather(p)?;
    let psi = StateVector::basis(1, 0)?;
    let sol = net.solve_closed_form(&psi)?;
    let input = psi.norm();
    Ok(AmplitudeRatios {
        psi1: sol.psi1.norm() / input,
        psi2: sol.psi2.norm() / input,
        psi4: sol.psi4.norm() / input,
    })
}

/// Network whose feedback undoes the forward channel: `M = -G1^-1`.
pub fn build_undo(g1: Operator, g2: Operator, splitter: SplitterParams) -> Result<FeedbackNetwork> {
    let m = g1.invert()?.inverse.scaled(Complex64::new(-1.0, 0.0));
    FeedbackNetwork::new(g1, g2, m, splitter)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecialCase {
    /// `alpha = 1`: output is `G1 psi`.
    NoFeedback,
    /// `beta = 1`: output is `-G2 psi`.
    FullFeedback,
    /// `G2 = -G1`: output is `G1 psi` for any `M`.
    EqualPaths,
    /// `M = -G1^-1`: output is `G1 psi`.
    Undo,
}

impl SpecialCase {
    pub const ALL: [SpecialCase; 4] = [
        SpecialCase::NoFeedback,
        SpecialCase::FullFeedback,
        SpecialCase::EqualPaths,
        SpecialCase::Undo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpecialCase::NoFeedback => "no-feedback",
            SpecialCase::FullFeedback => "full-feedback",
            SpecialCase::EqualPaths => "equal-paths",
            SpecialCase::Undo => "undo",
        }
    }

    /// Builds the `index`-th seeded instance: the network, an input state
    /// and the output the identity predicts.
    pub fn instance(
        self,
        dim: usize,
        seed: u64,
        index: u64,
    ) -> Result<(FeedbackNetwork, StateVector, StateVector)> {
        let base = seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(index.wrapping_mul(16));
        let mut rng = ChaCha8Rng::seed_from_u64(base);
        let beta: f64 = rng.random_range(0.05..0.95);
        let g1 = Operator::random_unitary(dim, base + 1)?;
        let g2 = Operator::random_unitary(dim, base + 2)?;
        let m = Operator::random_unitary(dim, base + 3)?;
        let psi = StateVector::random(dim, base + 4)?;

        let net = match self {
            SpecialCase::NoFeedback => FeedbackNetwork::new(g1, g2, m, SplitterParams::from_alpha(1.0)?)?,
            SpecialCase::FullFeedback => FeedbackNetwork::new(g1, g2, m, SplitterParams::from_beta(1.0)?)?,
            SpecialCase::EqualPaths => {
                let minus_g1 = g1.scaled(Complex64::new(-1.0, 0.0));
                FeedbackNetwork::new(g1, minus_g1, m, SplitterParams::from_beta(beta)?)?
            }
            SpecialCase::Undo => build_undo(g1, g2, SplitterParams::from_beta(beta)?)?,
        };
        let expected = match self {
            SpecialCase::FullFeedback => net.g2().mat_vec(&psi)?.scaled(Complex64::new(-1.0, 0.0)),
            _ => net.g1().mat_vec(&psi)?,
        };
        Ok((net, psi, expected))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub case: SpecialCase,
    pub instances: usize,
    /// Largest `|psi3' - expected|_max` over the instances that solved.
    pub max_residual: f64,
    /// Instances whose solve returned an error.
    pub failures: usize,
}

impl CaseOutcome {
    pub fn passed(&self, tol: f64) -> bool {
        self.failures == 0 && self.max_residual <= tol
    }
}

/// Runs one special case over `per_dim` seeded instances for each dimension.
pub fn run_special_case(case: SpecialCase, seed: u64, dims: &[usize], per_dim: usize) -> CaseOutcome {
    let mut outcome = CaseOutcome {
        case,
        instances: 0,
        max_residual: 0.0,
        failures: 0,
    };
    let mut index = 0u64;
    for &dim in dims {
        for _ in 0..per_dim {
            outcome.instances += 1;
            let residual = case
                .instance(dim, seed, index)
                .and_then(|(net, psi, expected)| {
                    Ok(net.solve_closed_form(&psi)?.psi3p.max_abs_diff(&expected))
                });
            match residual {
                Ok(r) => outcome.max_residual = outcome.max_residual.max(r),
                Err(_) => outcome.failures += 1,
            }
            index += 1;
        }
    }
    outcome
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecialCaseReport {
    pub tolerance: f64,
    pub cases: Vec<CaseOutcome>,
}

impl SpecialCaseReport {
    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed(self.tolerance))
    }
}

/// Every special case on 20 seeded instances (five per dimension in
/// [`SUITE_DIMS`]).
pub fn special_case_suite(seed: u64) -> SpecialCaseReport {
    SpecialCaseReport {
        tolerance: SPECIAL_CASE_TOL,
        cases: SpecialCase::ALL
            .iter()
            .map(|&case| run_special_case(case, seed, &SUITE_DIMS, 5))
            .collect(),
    }
}

/// A seeded network of random unitaries whose loop map has spectral radius
/// at most `max_loop_radius`, together with a random unit input.
///
/// `beta` is redrawn until the radius bound holds; each retry also redraws
/// the operators after a handful of failures.
pub fn random_contracting_network(
    dim: usize,
    seed: u64,
    max_loop_radius: f64,
) -> Result<(FeedbackNetwork, StateVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..64u64 {
        let op_seed = seed.wrapping_mul(0x2545_F491_4F6C_DD1D).wrapping_add(4 * (attempt / 8));
        let g1 = Operator::random_unitary(dim, op_seed)?;
        let g2 = Operator::random_unitary(dim, op_seed + 1)?;
        let m = Operator::random_unitary(dim, op_seed + 2)?;
        let beta: f64 = rng.random_range(0.05..0.95);
        let net = FeedbackNetwork::new(g1, g2, m, SplitterParams::from_beta(beta)?)?;
        let radius = crate::oracle::loop_map(&net)?.transfer.spectral_radius(1000, seed);
        if radius <= max_loop_radius {
            return Ok((net, StateVector::random(dim, op_seed + 3)?));
        }
    }
    Err(Error::InvalidArgument(format!(
        "no network with loop radius <= {max_loop_radius} found for seed {seed}"
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbativeCheck {
    /// Richardson-extrapolated central difference of `psi3'` in `gamma` at 0.
    pub numeric_derivative: StateVector,
    /// `-(G1 + G2) (1 - M G2)^-1 (1 + M G1) psi`.
    pub analytic_first_order: StateVector,
    /// Max-norm difference over the larger of `|analytic|_max` and `|psi|_max`.
    pub relative_error: f64,
    /// Largest difference between the network solver and the gamma-form
    /// output at the positive sample points.
    pub solver_consistency: f64,
    /// Condition estimate of `1 - M G2`; the truncation error grows with it.
    pub resolvent_condition: f64,
}

/// Output state as an explicit function of `gamma = beta^2`:
/// `[(1-gamma) G1 D (1 - M G2) - gamma G2 D (1 + M G1)] psi` with
/// `D = (1 + gamma M G1 - (1-gamma) M G2)^-1`. Only squares of the coupler
/// amplitudes appear, so this continues to `gamma < 0`.
fn output_at_gamma(
    g1: &Operator,
    g2: &Operator,
    mg1: &Operator,
    mg2: &Operator,
    psi: &StateVector,
    gamma: f64,
) -> Result<StateVector> {
    let id = Operator::identity(g1.dim())?;
    let denominator = id.add(&Operator::combine(gamma.into(), mg1, (gamma - 1.0).into(), mg2)?)?;
    let d = denominator.invert()?.inverse;
    let forward = g1.mat_vec(&d.mat_vec(&one_minus(mg2)?.mat_vec(psi)?)?)?;
    let alternate = g2.mat_vec(&d.mat_vec(&id.add(mg1)?.mat_vec(psi)?)?)?;
    StateVector::combine((1.0 - gamma).into(), &forward, (-gamma).into(), &alternate)
}

/// Compares the first-order small-`gamma` response (`gamma = beta^2`) with a
/// finite-difference derivative of the closed-form output.
///
/// Central differences over steps `gamma` and `gamma / 2` are combined by
/// Richardson extrapolation, leaving an `O(gamma^4)` truncation error.
pub fn perturbative_check(
    g1: &Operator,
    g2: &Operator,
    m: &Operator,
    psi: &StateVector,
    gamma: f64,
) -> Result<PerturbativeCheck> {
    if !(gamma > 0.0 && gamma <= 0.01) {
        return Err(Error::InvalidArgument(format!("gamma={gamma} must lie in (0, 0.01]")));
    }
    let mg1 = m.mat_mul(g1)?;
    let mg2 = m.mat_mul(g2)?;
    let Inversion {
        inverse: resolvent,
        condition: resolvent_condition,
    } = one_minus(&mg2)?.invert()?;
    let one_plus_mg1 = Operator::identity(m.dim())?.add(&mg1)?;
    let analytic_first_order = g1
        .add(g2)?
        .mat_vec(&resolvent.mat_vec(&one_plus_mg1.mat_vec(psi)?)?)?
        .scaled(Complex64::new(-1.0, 0.0));

    let net = FeedbackNetwork::new(g1.clone(), g2.clone(), m.clone(), SplitterParams::from_gamma(gamma)?)?;
    let mut solver_consistency = 0.0f64;
    let mut central = |h: f64| -> Result<StateVector> {
        let plus = output_at_gamma(g1, g2, &mg1, &mg2, psi, h)?;
        let minus = output_at_gamma(g1, g2, &mg1, &mg2, psi, -h)?;
        let solved = net
            .with_splitter(SplitterParams::from_gamma(h)?)
            .solve_closed_form(psi)?
            .psi3p;
        solver_consistency = solver_consistency.max(solved.max_abs_diff(&plus));
        Ok(plus.sub(&minus)?.scaled(Complex64::new(0.5 / h, 0.0)))
    };
    let coarse = central(gamma)?;
    let fine = central(gamma / 2.0)?;
    let numeric_derivative = StateVector::combine(
        Complex64::new(4.0 / 3.0, 0.0),
        &fine,
        Complex64::new(-1.0 / 3.0, 0.0),
        &coarse,
    )?;

    let scale = analytic_first_order.max_norm().max(psi.max_norm());
    let relative_error = numeric_derivative.max_abs_diff(&analytic_first_order) / scale;
    Ok(PerturbativeCheck {
        numeric_derivative,
        analytic_first_order,
        relative_error,
        solver_consistency,
        resolvent_condition,
    })
}

/// Seeded random unitaries `(G1, G2, M)` and a random unit input for the
/// perturbative check.
pub fn perturbative_instance(dim: usize, seed: u64) -> Result<(Operator, Operator, Operator, StateVector)> {
    let base = seed.wrapping_mul(4);
    Ok((
        Operator::random_unitary(dim, base)?,
        Operator::random_unitary(dim, base + 1)?,
        Operator::random_unitary(dim, base + 2)?,
        StateVector::random(dim, base + 3)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub phi: f64,
    /// From the network solver.
    pub transmitted: f64,
    /// From the closed-form lineshape.
    pub analytic: f64,
}

impl ScanPoint {
    pub fn abs_error(&self) -> f64 {
        (self.transmitted - self.analytic).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScanResult {
    pub beta: f64,
    pub theta: f64,
    /// Sorted by ascending `phi`.
    pub points: Vec<ScanPoint>,
    pub fwhm_numeric: Option<f64>,
    pub fwhm_predicted: f64,
}

impl PhaseScanResult {
    pub fn max_abs_error(&self) -> f64 {
        self.points.iter().map(ScanPoint::abs_error).fold(0.0, f64::max)
    }

    pub fn peak(&self) -> ScanPoint {
        *self
            .points
            .iter()
            .max_by(|a, b| a.transmitted.total_cmp(&b.transmitted))
            .expect("scans hold at least three points")
    }

    /// Whether the measured width agrees with `2 beta^2 / alpha` to within
    /// [`WIDTH_LAW_TOL`]; `None` when no width was measured.
    pub fn width_law_holds(&self) -> Option<bool> {
        self.fwhm_numeric
            .map(|w| ((w - self.fwhm_predicted) / self.fwhm_predicted).abs() <= WIDTH_LAW_TOL)
    }
}

/// Full width at half maximum by linear interpolation between the grid
/// points bracketing each half-maximum crossing. `None` if either crossing
/// falls outside the sampled window.
pub fn half_max_width(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let (peak_idx, &peak) = ys.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    let half = peak / 2.0;
    let crossing = |i: usize, j: usize| xs[i] + (half - ys[i]) / (ys[j] - ys[i]) * (xs[j] - xs[i]);

    let left = (0..peak_idx).rev().find(|&i| ys[i] <= half)?;
    let right = (peak_idx + 1..ys.len()).find(|&i| ys[i] <= half)?;
    Some(crossing(right, right - 1) - crossing(left, left + 1))
}

/// Solves the grandfather network at `n_points` evenly spaced phases in
/// `[phi_min, phi_max]` (inclusive).
pub fn phase_scan(
    beta: f64,
    theta: f64,
    phi_min: f64,
    phi_max: f64,
    n_points: usize,
) -> Result<PhaseScanResult> {
    if n_points < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 points, got {n_points}")));
    }
    if !phi_min.is_finite() || !phi_max.is_finite() || phi_min >= phi_max {
        return Err(Error::InvalidArgument(format!(
            "invalid phase range [{phi_min}, {phi_max}]"
        )));
    }
    GrandfatherParams::new(beta, theta, 0.0)?;

    let psi = StateVector::basis(1, 0)?;
    let step = (phi_max - phi_min) / (n_points - 1) as f64;
    let points = (0..n_points)
        .map(|k| {
            let phi = if k == n_points - 1 {
                phi_max
            } else {
                phi_min + step * k as f64
            };
            let net = build_grandfather(&GrandfatherParams { beta, theta, phi })?;
            let transmitted = net.solve_closed_form(&psi)?.transmitted_probability()?;
            Ok(ScanPoint {
                phi,
                transmitted,
                analytic: analytic_transmission(beta, phi),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let xs: Vec<f64> = points.iter().map(|p| p.phi).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.transmitted).collect();
    Ok(PhaseScanResult {
        beta,
        theta,
        fwhm_numeric: half_max_width(&xs, &ys),
        fwhm_predicted: predicted_fwhm(beta),
        points,
    })
}
