//! Strain-driven integration of the three perfect-plasticity flow
//! formulations: small-strain radial return, the additive-logarithmic return
//! map (radial return in log-strain space) and multiplicative flow driven by
//! the Eshelby stress, with KKT verification and optional per-step
//! ellipticity probing of the frozen-plastic-state composite.

use crate::ellipticity::{rank_one_scan, EllipticityReport};
use crate::energy::{eshelby_tensor, log_stretch, EnergyError, EnergyModel, LogStrainEnergy, LogStrainKind};
use crate::tensor::{deviatoric, matrix_exp_sym, SquareMatrix, SymmetricMatrix};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum FlowError {
    #[error("consistency solve failed to converge (residual {residual:e})")]
    Nonconvergence { residual: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("plastic state variant does not match the formulation")]
    StateMismatch,
    #[error("path step {index} failed: {source}")]
    StepFailed { index: usize, source: Box<FlowError> },
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

/// Deviatoric-norm elastic domain |dev Sigma|^2 <= factor * sigma_y^2.
///
/// The factor is configurable: 2/3 for the small-strain and
/// additive-logarithmic formulations, with 1/3 documented as an alternative
/// for the multiplicative Eshelby domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YieldSurface {
    pub sigma_y: f64,
    pub domain_factor: f64,
}

pub const DOMAIN_FACTOR_DEFAULT: f64 = 2.0 / 3.0;
pub const DOMAIN_FACTOR_MULTIPLICATIVE: f64 = 1.0 / 3.0;

impl YieldSurface {
    pub fn new(sigma_y: f64) -> Self {
        Self { sigma_y, domain_factor: DOMAIN_FACTOR_DEFAULT }
    }

    pub fn with_factor(sigma_y: f64, domain_factor: f64) -> Self {
        Self { sigma_y, domain_factor }
    }

    /// Radius of the deviatoric-norm ball.
    pub fn radius(&self) -> f64 {
        self.domain_factor.sqrt() * self.sigma_y
    }

    /// chi(Sigma) = |dev Sigma|^2 - radius^2; admissible iff <= 0.
    pub fn constraint(&self, dev_norm: f64) -> f64 {
        dev_norm * dev_norm - self.radius() * self.radius()
    }

    pub fn kkt_tolerance(&self) -> f64 {
        1e-8 * self.radius() * self.radius()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlasticState<const N: usize> {
    /// traceless plastic strain
    SmallStrain(SymmetricMatrix<N>),
    /// traceless log-plastic-stretch
    AdditiveLog(SymmetricMatrix<N>),
    /// unit-determinant plastic distortion
    Multiplicative(SquareMatrix<N>),
}

impl<const N: usize> PlasticState<N> {
    pub fn check_invariants(&self) -> Result<(), FlowError> {
        match self {
            PlasticState::SmallStrain(eps_p) if eps_p.trace().abs() > 1e-12 => Err(
                FlowError::Domain(format!("plastic strain trace {:e} exceeds 1e-12", eps_p.trace())),
            ),
            PlasticState::AdditiveLog(ep) if ep.trace().abs() > 1e-12 => Err(FlowError::Domain(
                format!("log-plastic-stretch trace {:e} exceeds 1e-12", ep.trace()),
            )),
            PlasticState::Multiplicative(fp) if (fp.det() - 1.0).abs() > 1e-10 => {
                Err(FlowError::Domain(format!(
                    "plastic distortion determinant {:e} deviates from 1",
                    fp.det()
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FlowState<const N: usize> {
    pub plastic: PlasticState<N>,
    /// running sum of lambda_plus * dt
    pub accumulated_multiplier: f64,
    pub last_stress: SymmetricMatrix<N>,
}

impl<const N: usize> FlowState<N> {
    pub fn new(plastic: PlasticState<N>) -> Self {
        Self { plastic, accumulated_multiplier: 0.0, last_stress: SymmetricMatrix::zero() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KktResiduals {
    /// chi at the returned stress; must be <= tol
    pub yield_residual: f64,
    /// |lambda_plus * chi|
    pub complementarity_residual: f64,
}

#[derive(Debug, Clone)]
pub struct StepResult<const N: usize> {
    pub time: f64,
    /// the formulation's driving stress at the end of the step
    pub stress: SymmetricMatrix<N>,
    pub plastic: PlasticState<N>,
    pub lambda_plus: f64,
    pub kkt: KktResiduals,
    pub ellipticity: Option<EllipticityReport<N>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KktVerdict {
    Pass,
    Fail(String),
}

/// Verifies the three optimality conditions at tolerance `tol`.
pub fn kkt_check<const N: usize>(result: &StepResult<N>, tol: f64) -> KktVerdict {
    if result.lambda_plus < 0.0 {
        return KktVerdict::Fail(format!("negative plastic multiplier {:e}", result.lambda_plus));
    }
    if result.kkt.yield_residual > tol {
        return KktVerdict::Fail(format!(
            "stress outside the elastic domain: chi = {:e} > {:e}",
            result.kkt.yield_residual, tol
        ));
    }
    if result.kkt.complementarity_residual > tol * result.lambda_plus.max(1.0) {
        return KktVerdict::Fail(format!(
            "complementarity violated: |lambda * chi| = {:e}",
            result.kkt.complementarity_residual
        ));
    }
    KktVerdict::Pass
}

fn residuals(ys: &YieldSurface, dev_norm: f64, lambda_plus: f64) -> KktResiduals {
    let chi = ys.constraint(dev_norm);
    KktResiduals { yield_residual: chi, complementarity_residual: (lambda_plus * chi).abs() }
}

/// Safeguarded Newton (finite-difference slope) with bisection fallback on a
/// bracketed, sign-changing residual g with g(lo) >= 0 >= g(hi).
fn solve_consistency(
    g: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, FlowError> {
    let (mut a, mut b) = (lo, hi);
    let ga = g(a);
    let gb = g(b);
    if ga < -tol || gb > tol {
        return Err(FlowError::Nonconvergence { residual: ga.min(-gb) });
    }
    let mut x = 0.5 * (a + b);
    let mut unproductive = 0u32;
    for _ in 0..100 {
        let gx = g(x);
        if gx.abs() <= tol {
            return Ok(x);
        }
        if gx > 0.0 {
            a = x;
        } else {
            b = x;
        }
        if (b - a).abs() <= 1e-15 * hi.abs().max(1.0) {
            return Ok(0.5 * (a + b));
        }
        // Newton step with a finite-difference slope, kept inside the bracket
        let h = 1e-7 * (b - a).abs().max(1e-12);
        let slope = (g(x + h) - gx) / h;
        let mut next = if slope.abs() > 1e-300 { x - gx / slope } else { f64::NAN };
        if !(next > a && next < b) || unproductive >= 25 {
            next = 0.5 * (a + b);
        }
        if g(next).abs() >= 0.5 * gx.abs() {
            unproductive += 1;
        } else {
            unproductive = 0;
        }
        x = next;
    }
    let residual = g(x);
    if residual.abs() <= tol {
        Ok(x)
    } else {
        Err(FlowError::Nonconvergence { residual })
    }
}

/// Closed-form radial return for the quadratic small-strain model. Also the
/// workhorse of the additive-logarithmic map, which has the same algebra with
/// the infinitesimal strain replaced by log U.
pub fn radial_return_small_strain<const N: usize>(
    time: f64,
    eps_trial: &SymmetricMatrix<N>,
    state: &mut FlowState<N>,
    mu: f64,
    lambda: f64,
    ys: &YieldSurface,
    dt: f64,
) -> Result<StepResult<N>, FlowError> {
    let eps_p = match &state.plastic {
        PlasticState::SmallStrain(e) => *e,
        _ => return Err(FlowError::StateMismatch),
    };
    let elastic = eps_trial.sub(&eps_p);
    let sigma_trial = elastic
        .scale(2.0 * mu)
        .add(&SymmetricMatrix::identity().scale(lambda * elastic.trace()));
    let dev_trial = deviatoric(&sigma_trial);
    let norm_trial = dev_trial.frobenius_norm();
    let r = ys.radius();

    let (stress, plastic, gamma, dev_norm) = if norm_trial <= r {
        (sigma_trial, PlasticState::SmallStrain(eps_p), 0.0, norm_trial)
    } else {
        let gamma = (norm_trial - r) / (2.0 * mu);
        let n_hat = dev_trial.scale(1.0 / norm_trial);
        let eps_p_new = eps_p.add(&n_hat.scale(gamma));
        let stress = sigma_trial.sub(&n_hat.scale(2.0 * mu * gamma));
        let dev_norm = deviatoric(&stress).frobenius_norm();
        (stress, PlasticState::SmallStrain(eps_p_new), gamma, dev_norm)
    };
    let lambda_plus = gamma / dt;
    state.plastic = plastic;
    state.accumulated_multiplier += gamma;
    state.last_stress = stress;
    Ok(StepResult {
        time,
        stress,
        plastic,
        lambda_plus,
        kkt: residuals(ys, dev_norm, lambda_plus),
        ellipticity: None,
    })
}

/// Backward-Euler return map in log-strain space. Closed-form radial return
/// for the quadratic Hencky core; scalar safeguarded Newton for the
/// exponentiated one (the deviatoric stress stays radial either way).
pub fn additive_log_return_map<const N: usize>(
    time: f64,
    f: &SquareMatrix<N>,
    state: &mut FlowState<N>,
    core: &LogStrainEnergy,
    ys: &YieldSurface,
    dt: f64,
) -> Result<StepResult<N>, FlowError> {
    let ep_old = match &state.plastic {
        PlasticState::AdditiveLog(e) => *e,
        _ => return Err(FlowError::StateMismatch),
    };
    let log_u = log_stretch(f)
        .ok_or_else(|| FlowError::Domain("det F must be positive for the return map".into()))?;
    let e_trial = log_u.sub(&ep_old);
    let sigma_trial = core.strain_stress(&e_trial);
    let dev_sigma_trial = deviatoric(&sigma_trial);
    let norm_trial = dev_sigma_trial.frobenius_norm();
    let r = ys.radius();
    let mu = core.moduli.mu;

    let (gamma, ep_new, e_new) = if norm_trial <= r {
        (0.0, ep_old, e_trial)
    } else {
        let dev_e = deviatoric(&e_trial);
        let x = dev_e.frobenius_norm();
        let n_hat = dev_e.scale(1.0 / x);
        let gamma = match core.kind {
            LogStrainKind::QuadraticHencky => (norm_trial - r) / (2.0 * mu),
            LogStrainKind::ExponentiatedHencky => {
                let k = core.moduli.k;
                let g = |gamma: f64| {
                    let y = x - gamma;
                    2.0 * mu * (k * y * y).exp() * y - r
                };
                solve_consistency(g, 0.0, x, 1e-12 * r)?
            }
        };
        let ep_new = ep_old.add(&n_hat.scale(gamma));
        (gamma, ep_new, e_trial.sub(&n_hat.scale(gamma)))
    };
    let stress = core.strain_stress(&e_new);
    let dev_norm = deviatoric(&stress).frobenius_norm();
    let lambda_plus = gamma / dt;
    state.plastic = PlasticState::AdditiveLog(ep_new);
    state.accumulated_multiplier += gamma;
    state.last_stress = stress;
    Ok(StepResult {
        time,
        stress,
        plastic: state.plastic,
        lambda_plus,
        kkt: residuals(ys, dev_norm, lambda_plus),
        ellipticity: None,
    })
}

/// Semi-implicit exponential-map update of the plastic distortion driven by
/// the deviatoric Eshelby stress. The flow direction is evaluated at the
/// converged state by fixed-point iteration around the scalar consistency
/// solve; the exponential of a traceless direction keeps det Fp = 1.
pub fn multiplicative_flow_step<const N: usize>(
    time: f64,
    f: &SquareMatrix<N>,
    state: &mut FlowState<N>,
    core: &LogStrainEnergy,
    ys: &YieldSurface,
    dt: f64,
) -> Result<StepResult<N>, FlowError> {
    let fp_old = match &state.plastic {
        PlasticState::Multiplicative(fp) => *fp,
        _ => return Err(FlowError::StateMismatch),
    };
    let fe_trial = f.matmul(&fp_old.inverse());
    let sigma_trial = eshelby_tensor(core, &fe_trial)?;
    let dev_trial = deviatoric(&sigma_trial);
    let norm_trial = dev_trial.frobenius_norm();
    let r = ys.radius();

    if norm_trial <= r {
        let lambda_plus = 0.0;
        state.last_stress = sigma_trial;
        return Ok(StepResult {
            time,
            stress: sigma_trial,
            plastic: state.plastic,
            lambda_plus,
            kkt: residuals(ys, norm_trial, lambda_plus),
            ellipticity: None,
        });
    }

    let dev_norm_at = |direction: &SymmetricMatrix<N>, gamma: f64| -> Result<f64, FlowError> {
        let incr = matrix_exp_sym(&deviatoric(direction).scale(-gamma))
            .map_err(|e| FlowError::Energy(e.into()))?;
        let fe = fe_trial.matmul(&incr.as_square());
        Ok(deviatoric(&eshelby_tensor(core, &fe)?).frobenius_norm())
    };

    let mut direction = dev_trial.scale(1.0 / norm_trial);
    let mut gamma = 0.0;
    let mu = core.moduli.mu;
    for _ in 0..30 {
        // bracket the consistency root by doubling from the elastic predictor
        let mut hi = (norm_trial - r) / (2.0 * mu);
        let mut doublings = 0;
        while dev_norm_at(&direction, hi)? > r {
            hi *= 2.0;
            doublings += 1;
            if doublings > 60 {
                return Err(FlowError::Nonconvergence { residual: dev_norm_at(&direction, hi)? - r });
            }
        }
        let dir = direction;
        let g = |gm: f64| dev_norm_at(&dir, gm).map_or(f64::NAN, |n| n - r);
        gamma = solve_consistency(g, 0.0, hi, 1e-12 * r)?;

        let incr = matrix_exp_sym(&deviatoric(&direction).scale(-gamma))
            .map_err(|e| FlowError::Energy(e.into()))?;
        let fe = fe_trial.matmul(&incr.as_square());
        let sigma = eshelby_tensor(core, &fe)?;
        let dev = deviatoric(&sigma);
        let new_direction = dev.scale(1.0 / dev.frobenius_norm());
        let shift = new_direction.sub(&direction).frobenius_norm();
        direction = new_direction;
        if shift <= 1e-10 {
            break;
        }
    }

    let incr = matrix_exp_sym(&deviatoric(&direction).scale(gamma))
        .map_err(|e| FlowError::Energy(e.into()))?;
    let fp_new = incr.as_square().matmul(&fp_old);
    let fe_new = f.matmul(&fp_new.inverse());
    let stress = eshelby_tensor(core, &fe_new)?;
    let dev_norm = deviatoric(&stress).frobenius_norm();
    let lambda_plus = gamma / dt;
    state.plastic = PlasticState::Multiplicative(fp_new);
    state.accumulated_multiplier += gamma;
    state.last_stress = stress;
    Ok(StepResult {
        time,
        stress,
        plastic: state.plastic,
        lambda_plus,
        kkt: residuals(ys, dev_norm, lambda_plus),
        ellipticity: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    SmallStrain,
    AdditiveLog,
    Multiplicative,
}

impl Formulation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Formulation::SmallStrain => "small_strain",
            Formulation::AdditiveLog => "additive_log",
            Formulation::Multiplicative => "multiplicative",
        }
    }

    pub fn initial_state<const N: usize>(&self) -> FlowState<N> {
        FlowState::new(match self {
            Formulation::SmallStrain => PlasticState::SmallStrain(SymmetricMatrix::zero()),
            Formulation::AdditiveLog => PlasticState::AdditiveLog(SymmetricMatrix::zero()),
            Formulation::Multiplicative => PlasticState::Multiplicative(SquareMatrix::identity()),
        })
    }
}

/// A strain-driven loading program.
#[derive(Debug, Clone)]
pub struct PathSpec<const N: usize> {
    pub formulation: Formulation,
    pub core: LogStrainEnergy,
    pub yield_surface: YieldSurface,
    /// strictly increasing times with their deformation gradients; the
    /// small-strain formulation reads sym(F - 1) as the driving strain
    pub steps: Vec<(f64, SquareMatrix<N>)>,
}

impl<const N: usize> PathSpec<N> {
    pub fn validate(&self) -> Result<(), FlowError> {
        for w in self.steps.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(FlowError::Domain("path times must be strictly increasing".into()));
            }
        }
        if self.formulation != Formulation::SmallStrain {
            for (t, f) in &self.steps {
                if f.det() <= 0.0 {
                    return Err(FlowError::Domain(format!(
                        "step at t = {t} has det F = {:e} <= 0",
                        f.det()
                    )));
                }
            }
        }
        Ok(())
    }

    /// The frozen-plastic-state composite model probed after each step.
    pub fn frozen_model(&self, plastic: &PlasticState<N>) -> EnergyModel<N> {
        match plastic {
            PlasticState::SmallStrain(eps_p) => EnergyModel::SmallStrainQuadratic {
                mu: self.core.moduli.mu,
                lambda: self.core.moduli.lambda,
                plastic_strain: *eps_p,
            },
            PlasticState::AdditiveLog(ep) => {
                EnergyModel::AdditiveLog { core: self.core, plastic_log_strain: *ep }
            }
            PlasticState::Multiplicative(fp) => {
                EnergyModel::Multiplicative { core: self.core, plastic_distortion: *fp }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeSettings {
    pub resolution: usize,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self { resolution: 64 }
    }
}

/// Integrates the path step by step, recording stress, plastic state, KKT
/// residuals and (optionally) an ellipticity report of the frozen composite
/// at each visited deformation.
pub fn drive_path<const N: usize>(
    spec: &PathSpec<N>,
    probe: Option<ProbeSettings>,
) -> Result<Vec<StepResult<N>>, FlowError> {
    spec.validate()?;
    let mut state = spec.formulation.initial_state::<N>();
    let mut results = Vec::with_capacity(spec.steps.len());
    let mut prev_t: Option<f64> = None;
    for (index, &(t, f)) in spec.steps.iter().enumerate() {
        let at_step = |e: FlowError| FlowError::StepFailed { index, source: Box::new(e) };
        let dt = match prev_t {
            Some(p) => t - p,
            None => 1.0,
        };
        prev_t = Some(t);
        let mut result = match spec.formulation {
            Formulation::SmallStrain => {
                let eps = f.sub(&SquareMatrix::identity()).symmetric_part();
                radial_return_small_strain(
                    t,
                    &eps,
                    &mut state,
                    spec.core.moduli.mu,
                    spec.core.moduli.lambda,
                    &spec.yield_surface,
                    dt,
                )
                .map_err(at_step)?
            }
            Formulation::AdditiveLog => {
                additive_log_return_map(t, &f, &mut state, &spec.core, &spec.yield_surface, dt)
                    .map_err(at_step)?
            }
            Formulation::Multiplicative => {
                multiplicative_flow_step(t, &f, &mut state, &spec.core, &spec.yield_surface, dt)
                    .map_err(at_step)?
            }
        };
        if let Some(settings) = probe {
            let model = spec.frozen_model(&state.plastic);
            result.ellipticity = Some(
                rank_one_scan(&model, &f, settings.resolution)
                    .map_err(|e| at_step(FlowError::Domain(e.to_string())))?,
            );
        }
        results.push(result);
    }
    Ok(results)
}
