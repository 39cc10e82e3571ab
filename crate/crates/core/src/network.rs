//! The two-coupler feedback network and its closed-form solution.
//!
//! Amplitude naming follows the network diagram: `psi` enters the early
//! coupler together with the fed-back `psi4`, producing `psi1` (forward
//! channel `g1`) and `psi2` (alternate channel `g2`). At the late coupler the
//! evolved `psi1'`, `psi2'` recombine into the output `psi3'` and the
//! feedback arm `psi4'`, which `m` carries back: `psi4 = m psi4'`.

use num_complex::Complex64;

use crate::algebra::{couple, InversionOptions, Operator, SplitterParams, StateVector};
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackNetwork {
    g1: Operator,
    g2: Operator,
    m: Operator,
    splitter: SplitterParams,
}

impl FeedbackNetwork {
    pub fn new(g1: Operator, g2: Operator, m: Operator, splitter: SplitterParams) -> Result<Self> {
        let dim = g1.dim();
        for op in [&g2, &m] {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
        }
        Ok(Self { g1, g2, m, splitter })
    }

    pub fn dim(&self) -> usize {
        self.g1.dim()
    }

    /// Forward channel.
    pub fn g1(&self) -> &Operator {
        &self.g1
    }

    /// Alternate channel.
    pub fn g2(&self) -> &Operator {
        &self.g2
    }

    /// Backward-in-time propagator.
    pub fn m(&self) -> &Operator {
        &self.m
    }

    pub fn splitter(&self) -> SplitterParams {
        self.splitter
    }

    pub fn with_splitter(&self, splitter: SplitterParams) -> Self {
        Self {
            splitter,
            ..self.clone()
        }
    }

    /// `1 + beta^2 M G1 - alpha^2 M G2`, the operator inverted to get `D`.
    pub fn denominator(&self) -> Result<Operator> {
        let a2 = self.splitter.alpha().powi(2);
        let b2 = self.splitter.beta().powi(2);
        let mg1 = self.m.mat_mul(&self.g1)?;
        let mg2 = self.m.mat_mul(&self.g2)?;
        let loop_part = Operator::combine(b2.into(), &mg1, (-a2).into(), &mg2)?;
        Operator::identity(self.dim())?.add(&loop_part)
    }

    pub fn solve_closed_form(&self, psi: &StateVector) -> Result<NetworkSolution> {
        self.solve_closed_form_with(psi, &InversionOptions::default())
    }

    pub fn solve_closed_form_with(
        &self,
        psi: &StateVector,
        opts: &InversionOptions,
    ) -> Result<NetworkSolution> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        let alpha = self.splitter.alpha();
        let beta = self.splitter.beta();

        let inversion = self.denominator()?.invert_with(opts).map_err(|e| match e {
            Error::SingularMatrix { condition } => Error::SingularDenominator { condition },
            other => other,
        })?;
        let d = &inversion.inverse;

        let mg1 = self.m.mat_mul(&self.g1)?;
        let mg2 = self.m.mat_mul(&self.g2)?;
        let id = Operator::identity(self.dim())?;

        // psi1 = alpha D (1 - M G2) psi
        let psi1 = d
            .mat_vec(&id.sub(&mg2)?.mat_vec(psi)?)?
            .scaled(alpha.into());
        // psi2 = -i beta D (1 + M G1) psi
        let psi2 = d
            .mat_vec(&id.add(&mg1)?.mat_vec(psi)?)?
            .scaled(Complex64::new(0.0, -beta));
        // psi4 = alpha M G2 psi2 - i beta M G1 psi1
        let psi4 = StateVector::combine(
            alpha.into(),
            &mg2.mat_vec(&psi2)?,
            Complex64::new(0.0, -beta),
            &mg1.mat_vec(&psi1)?,
        )?;

        NetworkSolution::assemble(self, psi.clone(), psi1, psi2, psi4, Some(inversion.condition))
    }

    /// Maximum residual of the governing equations evaluated on `sol`.
    ///
    /// Returns infinity when `sol` does not fit this network's dimension.
    pub fn verify_fixed_point(&self, sol: &NetworkSolution) -> f64 {
        self.fixed_point_residual(sol).unwrap_or(f64::INFINITY)
    }

    fn fixed_point_residual(&self, sol: &NetworkSolution) -> Result<f64> {
        let (psi1, psi2) = couple(&self.splitter, &sol.psi_in, &sol.psi4)?;
        let (psi3p, psi4p) = couple(&self.splitter, &sol.psi1p, &sol.psi2p)?;
        let checks = [
            sol.psi1.max_abs_diff(&psi1),
            sol.psi2.max_abs_diff(&psi2),
            sol.psi1p.max_abs_diff(&self.g1.mat_vec(&sol.psi1)?),
            sol.psi2p.max_abs_diff(&self.g2.mat_vec(&sol.psi2)?),
            sol.psi3p.max_abs_diff(&psi3p),
            sol.psi4p.max_abs_diff(&psi4p),
            sol.psi4.max_abs_diff(&self.m.mat_vec(&sol.psi4p)?),
        ];
        Ok(checks.into_iter().fold(0.0, f64::max))
    }
}

/// Every amplitude of a solved network plus conservation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSolution {
    pub psi_in: StateVector,
    pub psi1: StateVector,
    pub psi2: StateVector,
    pub psi4: StateVector,
    pub psi1p: StateVector,
    pub psi2p: StateVector,
    pub psi3p: StateVector,
    pub psi4p: StateVector,
    /// Condition estimate of the inverted denominator; `None` when the
    /// solution was obtained without forming it.
    pub denom_condition: Option<f64>,
    /// `| |psi1|^2 + |psi2|^2 - |psi|^2 - |psi4|^2 |`
    pub conservation_residual_t1: f64,
    /// `| |psi3'|^2 + |psi4'|^2 - |psi1'|^2 - |psi2'|^2 |`
    pub conservation_residual_t2: f64,
}

impl NetworkSolution {
    /// Completes a solution from the early-coupler amplitudes: evolves
    /// through both channels and recombines at the late coupler.
    pub(crate) fn assemble(
        net: &FeedbackNetwork,
        psi_in: StateVector,
        psi1: StateVector,
        psi2: StateVector,
        psi4: StateVector,
        denom_condition: Option<f64>,
    ) -> Result<Self> {
        let psi1p = net.g1.mat_vec(&psi1)?;
        let psi2p = net.g2.mat_vec(&psi2)?;
        let (psi3p, psi4p) = couple(&net.splitter, &psi1p, &psi2p)?;

        let conservation_residual_t1 =
            (psi1.norm_sqr() + psi2.norm_sqr() - psi_in.norm_sqr() - psi4.norm_sqr()).abs();
        let conservation_residual_t2 =
            (psi3p.norm_sqr() + psi4p.norm_sqr() - psi1p.norm_sqr() - psi2p.norm_sqr()).abs();

        Ok(Self {
            psi_in,
            psi1,
            psi2,
            psi4,
            psi1p,
            psi2p,
            psi3p,
            psi4p,
            denom_condition,
            conservation_residual_t1,
            conservation_residual_t2,
        })
    }

    pub fn dim(&self) -> usize {
        self.psi_in.dim()
    }

    /// `|psi3'|^2 / |psi|^2`.
    pub fn transmitted_probability(&self) -> Result<f64> {
        let input = self.psi_in.norm_sqr();
        if input == 0.0 {
            return Err(Error::ZeroInput);
        }
        Ok(self.psi3p.norm_sqr() / input)
    }

    /// All amplitudes in diagram order, labelled.
    pub fn amplitudes(&self) -> [(&'static str, &StateVector); 8] {
        [
            ("psi_in", &self.psi_in),
            ("psi1", &self.psi1),
            ("psi2", &self.psi2),
            ("psi4", &self.psi4),
            ("psi1p", &self.psi1p),
            ("psi2p", &self.psi2p),
            ("psi3p", &self.psi3p),
            ("psi4p", &self.psi4p),
        ]
    }
}

/// `1 - x`, handy when forming resolvents by hand.
pub(crate) fn one_minus(op: &Operator) -> Result<Operator> {
    Operator::combine(ONE, &Operator::identity(op.dim())?, -ONE, op)
}
