//! Energy catalog: log-strain core energies (quadratic Hencky and
//! exponentiated Hencky), composites over the deformation gradient (pure
//! elastic, additive-logarithmic, multiplicative, Saint-Venant-Kirchhoff,
//! small strain), finite-difference Piola stress, the Eshelby tensor and the
//! one-dimensional toy energies.
//!
//! Inadmissible configurations (det F <= 0) carry infinite energy; the value
//! is reported as `f64::INFINITY` rather than an error so scanners can treat
//! it as a convexity barrier.

use crate::tensor::{
    deviatoric, sym_eigen, KernelError, SquareMatrix, SymmetricMatrix, EPS_PD_REL,
};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum EnergyError {
    #[error("finite-difference probe hit an infinite-energy configuration")]
    BoundaryProximity,
    #[error("invalid moduli: {0}")]
    InvalidModuli(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Material parameters. `lambda` is kept independent of `kappa` so 2D
/// configurations can state both explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moduli {
    pub mu: f64,
    pub kappa: f64,
    pub lambda: f64,
    /// isochoric exponent of the exponentiated Hencky energy
    pub k: f64,
    /// volumetric exponent of the exponentiated Hencky energy
    pub khat: f64,
}

impl Moduli {
    /// `kappa = 0` disables the volumetric part (isochoric-only energy).
    pub fn validate(&self, kind: LogStrainKind) -> Result<(), EnergyError> {
        if !(self.mu > 0.0) {
            return Err(EnergyError::InvalidModuli(format!("mu must be > 0, got {}", self.mu)));
        }
        if !(self.kappa >= 0.0) {
            return Err(EnergyError::InvalidModuli(format!(
                "kappa must be >= 0, got {}",
                self.kappa
            )));
        }
        if kind == LogStrainKind::ExponentiatedHencky {
            if !(self.k > 0.0) {
                return Err(EnergyError::InvalidModuli(format!("k must be > 0, got {}", self.k)));
            }
            if !(self.khat > 0.0) {
                return Err(EnergyError::InvalidModuli(format!(
                    "khat must be > 0, got {}",
                    self.khat
                )));
            }
        }
        Ok(())
    }

    /// Advisory only: parameter ranges outside the known 2D rank-one-convex
    /// regime of the exponentiated Hencky family.
    pub fn rank_one_warnings_2d(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.k < 0.25 {
            w.push(format!("k = {} is below 0.25; 2D rank-one convexity is not guaranteed", self.k));
        }
        if self.khat < 0.125 {
            w.push(format!(
                "khat = {} is below 0.125; 2D rank-one convexity is not guaranteed",
                self.khat
            ));
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogStrainKind {
    QuadraticHencky,
    ExponentiatedHencky,
}

/// A log-strain core energy: a function of the (elastic) logarithmic strain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogStrainEnergy {
    pub kind: LogStrainKind,
    pub moduli: Moduli,
}

impl LogStrainEnergy {
    pub fn quadratic_hencky(mu: f64, kappa: f64) -> Self {
        Self {
            kind: LogStrainKind::QuadraticHencky,
            moduli: Moduli { mu, kappa, lambda: 0.0, k: 1.0, khat: 1.0 },
        }
    }

    pub fn exponentiated_hencky(mu: f64, kappa: f64, k: f64, khat: f64) -> Self {
        Self {
            kind: LogStrainKind::ExponentiatedHencky,
            moduli: Moduli { mu, kappa, lambda: 0.0, k, khat },
        }
    }

    /// Isochoric exponentiated Hencky energy with mu = k = 1 (the shear
    /// counterexample configuration).
    pub fn exponentiated_hencky_isochoric() -> Self {
        Self::exponentiated_hencky(1.0, 0.0, 1.0, 1.0)
    }

    /// Energy density as a function of the log-strain argument.
    pub fn strain_energy<const N: usize>(&self, e: &SymmetricMatrix<N>) -> f64 {
        let m = &self.moduli;
        let dev2 = {
            let d = deviatoric(e);
            d.inner(&d)
        };
        let tr = e.trace();
        match self.kind {
            LogStrainKind::QuadraticHencky => m.mu * dev2 + 0.5 * m.kappa * tr * tr,
            LogStrainKind::ExponentiatedHencky => {
                let iso = m.mu / m.k * (m.k * dev2).exp();
                let vol = if m.kappa == 0.0 {
                    0.0
                } else {
                    m.kappa / (2.0 * m.khat) * (m.khat * tr * tr).exp()
                };
                iso + vol
            }
        }
    }

    /// Analytic derivative of `strain_energy` with respect to the log strain.
    pub fn strain_stress<const N: usize>(&self, e: &SymmetricMatrix<N>) -> SymmetricMatrix<N> {
        let m = &self.moduli;
        let dev = deviatoric(e);
        let tr = e.trace();
        match self.kind {
            LogStrainKind::QuadraticHencky => {
                dev.scale(2.0 * m.mu)
                    .add(&SymmetricMatrix::identity().scale(m.kappa * tr))
            }
            LogStrainKind::ExponentiatedHencky => {
                let dev2 = dev.inner(&dev);
                let iso = dev.scale(2.0 * m.mu * (m.k * dev2).exp());
                if m.kappa == 0.0 {
                    iso
                } else {
                    let vol_coef = m.kappa * (m.khat * tr * tr).exp() * tr;
                    iso.add(&SymmetricMatrix::identity().scale(vol_coef))
                }
            }
        }
    }
}

/// Logarithmic stretch log U = 1/2 log(F^T F), or `None` when the
/// configuration is inadmissible (non-positive determinant or an eigenvalue
/// of C at the positive-definiteness floor).
pub fn log_stretch<const N: usize>(f: &SquareMatrix<N>) -> Option<SymmetricMatrix<N>> {
    if f.det() <= 0.0 {
        return None;
    }
    let c = f.transpose().matmul(f).symmetric_part();
    let eig = sym_eigen(&c).ok()?;
    let max_mag = eig.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    if eig.eigenvalues.iter().any(|&l| l <= EPS_PD_REL * max_mag) {
        return None;
    }
    Some(eig.map_spectral(|l| 0.5 * l.ln()))
}

/// An energy family, optionally composed with a frozen plastic state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyModel<const N: usize> {
    Hyperelastic {
        core: LogStrainEnergy,
    },
    AdditiveLog {
        core: LogStrainEnergy,
        /// traceless log-plastic-stretch
        plastic_log_strain: SymmetricMatrix<N>,
    },
    Multiplicative {
        core: LogStrainEnergy,
        /// unit-determinant plastic distortion
        plastic_distortion: SquareMatrix<N>,
    },
    SaintVenantKirchhoff {
        mu: f64,
        lambda: f64,
        plastic_strain: SymmetricMatrix<N>,
    },
    SmallStrainQuadratic {
        mu: f64,
        lambda: f64,
        plastic_strain: SymmetricMatrix<N>,
    },
}

impl<const N: usize> EnergyModel<N> {
    /// Energy density at F. Inadmissible configurations yield +inf.
    pub fn energy(&self, f: &SquareMatrix<N>) -> f64 {
        if !f.is_finite() {
            return f64::NAN;
        }
        match self {
            EnergyModel::Hyperelastic { core } => match log_stretch(f) {
                Some(e) => core.strain_energy(&e),
                None => f64::INFINITY,
            },
            EnergyModel::AdditiveLog { core, plastic_log_strain } => match log_stretch(f) {
                Some(log_u) => core.strain_energy(&log_u.sub(plastic_log_strain)),
                None => f64::INFINITY,
            },
            EnergyModel::Multiplicative { core, plastic_distortion } => {
                let fe = f.matmul(&plastic_distortion.inverse());
                match log_stretch(&fe) {
                    Some(e) => core.strain_energy(&e),
                    None => f64::INFINITY,
                }
            }
            EnergyModel::SaintVenantKirchhoff { mu, lambda, plastic_strain } => {
                if f.det() <= 0.0 {
                    return f64::INFINITY;
                }
                let c = f.transpose().matmul(f).symmetric_part();
                let e = c.sub(&SymmetricMatrix::identity()).scale(0.5);
                let d = e.sub(plastic_strain);
                let tr = d.trace();
                0.25 * mu * d.inner(&d) + 0.125 * lambda * tr * tr
            }
            EnergyModel::SmallStrainQuadratic { mu, lambda, plastic_strain } => {
                let eps = f.sub(&SquareMatrix::identity()).symmetric_part();
                let d = eps.sub(plastic_strain);
                let tr = d.trace();
                mu * d.inner(&d) + 0.5 * lambda * tr * tr
            }
        }
    }

    /// First Piola-Kirchhoff stress by central finite differences.
    pub fn piola_stress(&self, f: &SquareMatrix<N>) -> Result<SquareMatrix<N>, EnergyError> {
        let h = f64::EPSILON.cbrt() * f.frobenius_norm().max(1.0);
        let mut s = SquareMatrix::zero();
        for i in 0..N {
            for j in 0..N {
                let mut fp = *f;
                fp.entries[i][j] += h;
                let mut fm = *f;
                fm.entries[i][j] -= h;
                let wp = self.energy(&fp);
                let wm = self.energy(&fm);
                if !wp.is_finite() || !wm.is_finite() {
                    return Err(EnergyError::BoundaryProximity);
                }
                s.entries[i][j] = (wp - wm) / (2.0 * h);
            }
        }
        Ok(s)
    }

    /// Cauchy stress sigma = (1/J) S1 F^T, symmetrized.
    pub fn cauchy_stress(&self, f: &SquareMatrix<N>) -> Result<SymmetricMatrix<N>, EnergyError> {
        let j = f.det();
        if j <= 0.0 {
            return Err(EnergyError::Domain(format!(
                "Cauchy stress requires det F > 0, got {j:e}"
            )));
        }
        let s1 = self.piola_stress(f)?;
        Ok(s1.matmul(&f.transpose()).scale(1.0 / j).symmetric_part())
    }

    /// Thermodynamic driving stress of the composite formulations; `None` for
    /// the purely elastic models.
    pub fn driving_stress(
        &self,
        f: &SquareMatrix<N>,
    ) -> Result<Option<SymmetricMatrix<N>>, EnergyError> {
        match self {
            EnergyModel::AdditiveLog { core, plastic_log_strain } => {
                let log_u = log_stretch(f).ok_or_else(|| {
                    EnergyError::Domain("driving stress undefined: det F <= 0".into())
                })?;
                Ok(Some(core.strain_stress(&log_u.sub(plastic_log_strain))))
            }
            EnergyModel::Multiplicative { core, plastic_distortion } => {
                let fe = f.matmul(&plastic_distortion.inverse());
                Ok(Some(eshelby_tensor(core, &fe)?))
            }
            EnergyModel::SmallStrainQuadratic { mu, lambda, plastic_strain } => {
                let eps = f.sub(&SquareMatrix::identity()).symmetric_part();
                let d = eps.sub(plastic_strain);
                Ok(Some(
                    d.scale(2.0 * mu)
                        .add(&SymmetricMatrix::identity().scale(lambda * d.trace())),
                ))
            }
            _ => Ok(None),
        }
    }
}

/// Elastic Eshelby tensor Fe^T D W(Fe) - W(Fe) 1, symmetrized (exactly
/// symmetric for isotropic energies up to discretization error).
pub fn eshelby_tensor<const N: usize>(
    core: &LogStrainEnergy,
    fe: &SquareMatrix<N>,
) -> Result<SymmetricMatrix<N>, EnergyError> {
    let det = fe.det();
    if det <= 0.0 {
        return Err(EnergyError::Domain(format!(
            "Eshelby tensor requires det Fe > 0, got {det:e}"
        )));
    }
    let model = EnergyModel::<N>::Hyperelastic { core: *core };
    let w = model.energy(fe);
    if !w.is_finite() {
        return Err(EnergyError::BoundaryProximity);
    }
    let s1 = model.piola_stress(fe)?;
    Ok(fe
        .transpose()
        .matmul(&s1)
        .sub(&SquareMatrix::identity().scale(w))
        .symmetric_part())
}

/// One-dimensional toy energies on t > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToyEnergy {
    /// t -> (log t)^2
    HenckySquared,
    /// t -> exp((log t)^2)
    ExpHencky,
    /// t -> exp((log t - log s)^2), s > 0
    ExpHenckyShifted { shift: f64 },
}

pub fn toy1d_eval(family: ToyEnergy, t: f64) -> Result<f64, EnergyError> {
    if !(t > 0.0) {
        return Err(EnergyError::Domain(format!("toy energies require t > 0, got {t}")));
    }
    match family {
        ToyEnergy::HenckySquared => Ok(t.ln().powi(2)),
        ToyEnergy::ExpHencky => Ok(t.ln().powi(2).exp()),
        ToyEnergy::ExpHenckyShifted { shift } => {
            if !(shift > 0.0) {
                return Err(EnergyError::Domain(format!(
                    "shift must be > 0, got {shift}"
                )));
            }
            Ok((t.ln() - shift.ln()).powi(2).exp())
        }
    }
}
