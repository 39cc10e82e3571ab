//! Loop-unrolling solver that never forms the closed-form denominator.
//!
//! Substituting the early-coupler equations into `psi4 = M psi4'` gives the
//! affine fixed point `psi4 = T psi4 + S psi` with
//! `T = M (alpha^2 G2 - beta^2 G1)` and `S = -i alpha beta M (G1 + G2)`.
//! Starting from `psi4 = 0`, the k-th iterate is the amplitude accumulated
//! over at most k trips around the loop, `sum_{j<k} T^j S psi`.

use num_complex::Complex64;

use crate::algebra::{Operator, StateVector};
use crate::error::{Error, Result};
use crate::network::{FeedbackNetwork, NetworkSolution};

/// Affine loop map `psi4 -> transfer * psi4 + source * psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopMap {
    pub transfer: Operator,
    pub source: Operator,
}

pub fn loop_map(net: &FeedbackNetwork) -> Result<LoopMap> {
    let alpha = net.splitter().alpha();
    let beta = net.splitter().beta();
    let inner = Operator::combine(
        (alpha * alpha).into(),
        net.g2(),
        (-beta * beta).into(),
        net.g1(),
    )?;
    let transfer = net.m().mat_mul(&inner)?;
    let source = net
        .m()
        .mat_mul(&net.g1().add(net.g2())?)?
        .scaled(Complex64::new(0.0, -alpha * beta));
    Ok(LoopMap { transfer, source })
}

/// Successive loop iterates `psi4_1, psi4_2, ...` starting from `psi4_0 = 0`.
#[derive(Debug, Clone)]
pub struct LoopUnrolling<'a> {
    transfer: &'a Operator,
    driven: StateVector,
    current: StateVector,
}

impl<'a> LoopUnrolling<'a> {
    pub fn new(map: &'a LoopMap, psi: &StateVector) -> Result<Self> {
        let driven = map.source.mat_vec(psi)?;
        Ok(Self {
            transfer: &map.transfer,
            current: StateVector::zeros(psi.dim())?,
            driven,
        })
    }

    pub fn current(&self) -> &StateVector {
        &self.current
    }
}

impl Iterator for LoopUnrolling<'_> {
    type Item = StateVector;

    fn next(&mut self) -> Option<StateVector> {
        let next = self
            .transfer
            .mat_vec(&self.current)
            .and_then(|t| t.add(&self.driven))
            .expect("dimensions fixed at construction");
        self.current = next.clone();
        Some(next)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    /// Stop once the max-norm of the update is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Power-iteration budget for the convergence preflight.
    pub spectral_iterations: usize,
    pub spectral_seed: u64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 1_000_000,
            spectral_iterations: 1000,
            spectral_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iterations_used: usize,
    pub final_update_norm: f64,
    pub loop_spectral_radius_estimate: f64,
    pub converged: bool,
}

impl IterationReport {
    /// A spectral radius below one guarantees the loop series converges.
    pub fn convergence_guaranteed(&self) -> bool {
        self.loop_spectral_radius_estimate < 1.0
    }
}

/// Solves the network by summing loop traversals until the update is below
/// `opts.tol`. Divergent or exhausted runs return [`Error::NotConverged`].
pub fn solve_by_iteration(
    net: &FeedbackNetwork,
    psi: &StateVector,
    opts: &IterationOptions,
) -> Result<(NetworkSolution, IterationReport)> {
    if psi.dim() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            found: psi.dim(),
        });
    }
    let map = loop_map(net)?;
    let mut report = IterationReport {
        iterations_used: 0,
        final_update_norm: f64::INFINITY,
        loop_spectral_radius_estimate: map
            .transfer
            .spectral_radius(opts.spectral_iterations, opts.spectral_seed),
        converged: false,
    };

    let mut unrolled = LoopUnrolling::new(&map, psi)?;
    let mut previous = unrolled.current().clone();
    for iterate in unrolled.by_ref().take(opts.max_iter) {
        report.iterations_used += 1;
        report.final_update_norm = iterate.max_abs_diff(&previous);
        if !iterate.is_finite() || !report.final_update_norm.is_finite() {
            report.final_update_norm = f64::INFINITY;
            break;
        }
        if report.final_update_norm <= opts.tol {
            report.converged = true;
            break;
        }
        previous = iterate;
    }

    if !report.converged {
        return Err(Error::NotConverged(Box::new(report)));
    }

    let psi4 = unrolled.current().clone();
    let (psi1, psi2) = crate::algebra::couple(&net.splitter(), psi, &psi4)?;
    let sol = NetworkSolution::assemble(net, psi.clone(), psi1, psi2, psi4, None)?;
    Ok((sol, report))
}

/// Max-norm difference of two output states relative to the reference's
/// max-norm (absolute when the reference vanishes).
pub fn relative_difference(candidate: &StateVector, reference: &StateVector) -> f64 {
    let scale = reference.max_norm();
    let diff = candidate.max_abs_diff(reference);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SplitterParams;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grandfather(beta: f64, phi: f64) -> FeedbackNetwork {
        FeedbackNetwork::new(
            Operator::zeros(1).unwrap(),
            Operator::identity(1).unwrap(),
            Operator::phase(1, phi).unwrap(),
            SplitterParams::from_beta(beta).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn grandfather_loop_map_by_hand() {
        let beta: f64 = 0.3;
        let phi = 0.7;
        let alpha: f64 = (1.0 - beta * beta).sqrt();
        let map = loop_map(&grandfather(beta, phi)).unwrap();
        let e = Complex64::from_polar(1.0, phi);
        assert!((map.transfer.get(0, 0) - e * alpha * alpha).norm() < 1e-15);
        assert!((map.source.get(0, 0) - c(0.0, -alpha * beta) * e).norm() < 1e-15);
    }

    #[test]
    fn decoupled_loop_map() {
        let g1 = Operator::random_unitary(3, 1).unwrap();
        let g2 = Operator::random_unitary(3, 2).unwrap();
        let m = Operator::random_unitary(3, 3).unwrap();
        let net = FeedbackNetwork::new(g1, g2, m, SplitterParams::from_beta(0.0).unwrap()).unwrap();
        let map = loop_map(&net).unwrap();
        let mg2 = net.m().mat_mul(net.g2()).unwrap();
        assert!(map.transfer.max_abs_diff(&mg2) < 1e-15);
        assert_eq!(map.source, Operator::zeros(3).unwrap());
    }

    #[test]
    fn equal_paths_balanced_loop_map() {
        let g1 = Operator::random_unitary(3, 4).unwrap();
        let g2 = g1.scaled(c(-1.0, 0.0));
        let m = Operator::random_unitary(3, 5).unwrap();
        let splitter = SplitterParams::from_beta(0.5f64.sqrt()).unwrap();
        let net = FeedbackNetwork::new(g1, g2, m, splitter).unwrap();
        let map = loop_map(&net).unwrap();
        let minus_mg1 = net.m().mat_mul(net.g1()).unwrap().scaled(c(-1.0, 0.0));
        assert!(map.transfer.max_abs_diff(&minus_mg1) < 1e-15);
        assert!(map.source.max_abs_diff(&Operator::zeros(3).unwrap()) < 1e-15);

        let psi = StateVector::random(3, 6).unwrap();
        let (sol, _) = solve_by_iteration(&net, &psi, &IterationOptions::default()).unwrap();
        assert!(sol.psi4.max_norm() < 1e-15);
    }

    #[test]
    fn no_feedback_converges_immediately() {
        let g1 = Operator::random_unitary(2, 1).unwrap();
        let net = FeedbackNetwork::new(
            g1.clone(),
            Operator::random_unitary(2, 2).unwrap(),
            Operator::random_unitary(2, 3).unwrap(),
            SplitterParams::from_alpha(1.0).unwrap(),
        )
        .unwrap();
        let psi = StateVector::random(2, 4).unwrap();
        let (sol, report) = solve_by_iteration(&net, &psi, &IterationOptions::default()).unwrap();
        assert_eq!(report.iterations_used, 1);
        assert!(report.converged);
        assert_eq!(sol.psi4, StateVector::zeros(2).unwrap());
        assert!(sol.psi3p.max_abs_diff(&g1.mat_vec(&psi).unwrap()) < 1e-15);
    }

    #[test]
    fn grandfather_resolves_without_inversion() {
        let net = grandfather(0.1, 0.0);
        let psi = StateVector::basis(1, 0).unwrap();
        let (sol, report) = solve_by_iteration(&net, &psi, &IterationOptions::default()).unwrap();
        assert!((report.loop_spectral_radius_estimate - 0.99).abs() < 1e-12);
        assert!(report.iterations_used <= 10_000);
        assert!((sol.transmitted_probability().unwrap() - 1.0).abs() < 1e-8);
        assert!(sol.denom_condition.is_none());
    }

    #[test]
    fn divergent_loop_reports_not_converged() {
        // T = alpha^2 + 2 beta^2 > 1 with a nonzero source.
        let net = FeedbackNetwork::new(
            Operator::scalar(1, c(-2.0, 0.0)).unwrap(),
            Operator::identity(1).unwrap(),
            Operator::identity(1).unwrap(),
            SplitterParams::from_beta(0.5f64.sqrt()).unwrap(),
        )
        .unwrap();
        let psi = StateVector::basis(1, 0).unwrap();
        match solve_by_iteration(&net, &psi, &IterationOptions::default()) {
            Err(Error::NotConverged(report)) => {
                assert!(!report.converged);
                assert!(!report.convergence_guaranteed());
                assert!(report.iterations_used < 10_000, "should stop once values overflow");
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn iteration_budget_exhaustion() {
        let net = grandfather(0.1, 0.0);
        let psi = StateVector::basis(1, 0).unwrap();
        let opts = IterationOptions {
            max_iter: 50,
            ..IterationOptions::default()
        };
        match solve_by_iteration(&net, &psi, &opts) {
            Err(Error::NotConverged(report)) => assert_eq!(report.iterations_used, 50),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn relative_difference_falls_back_to_absolute() {
        let zero = StateVector::zeros(2).unwrap();
        let v = StateVector::new(vec![c(1e-3, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(relative_difference(&v, &zero), 1e-3);
        let w = v.scaled(c(2.0, 0.0));
        assert!((relative_difference(&w, &v) - 1.0).abs() < 1e-15);
    }
}
