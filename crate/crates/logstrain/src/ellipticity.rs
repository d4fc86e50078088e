//! Rank-one-convexity / Legendre-Hadamard ellipticity scanning for any
//! energy model, plus the simple-shear counterexample machinery: a transcribed
//! closed-form shear response curve and an independent first-principles
//! evaluation of the same curve through the spectral kernels.

use crate::energy::{EnergyModel, LogStrainEnergy};
use crate::tensor::{
    dot, matrix_log_psym, normalize, polar_decompose, vec_norm, SquareMatrix, SymmetricMatrix,
    Vector,
};
use rayon::prelude::*;
use thiserror::Error;

/// Floor for the violation tolerance of a scan.
pub const TOL_ELL_FLOOR: f64 = 1e-10;
/// Relative factor applied to the local curvature scale of a scan.
pub const TOL_ELL_REL: f64 = 1e-6;
/// Relative tolerance of the line convexity check.
pub const TOL_LINE_REL: f64 = 1e-9;

#[derive(Debug, Clone, Error)]
pub enum EllipticityError {
    #[error("direction vectors must be unit length")]
    InvalidDirection,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Elliptic,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Elliptic => "elliptic",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Witness<const N: usize> {
    pub eta: Vector<N>,
    pub xi: Vector<N>,
    pub base_point: SquareMatrix<N>,
}

#[derive(Debug, Clone)]
pub struct EllipticityReport<const N: usize> {
    pub verdict: Verdict,
    /// smallest directional second derivative found
    pub min_q: f64,
    /// present iff the verdict is `Violated`
    pub witness: Option<Witness<N>>,
    pub samples: usize,
    pub tol: f64,
}

/// Second derivative of t -> W(F + t eta (x) xi) at t = 0.
///
/// Central three-point differences at step eps^(1/4) * max(1, |F|); an
/// infinite-energy probe returns -inf (a rank-one line has crossed the
/// det F = 0 barrier, which counts as a violation). The quadratic small-strain
/// model is evaluated by its exact constant Hessian instead, which makes the
/// result manifestly independent of the frozen plastic strain.
pub fn directional_second_derivative<const N: usize>(
    model: &EnergyModel<N>,
    f: &SquareMatrix<N>,
    eta: &Vector<N>,
    xi: &Vector<N>,
) -> Result<f64, EllipticityError> {
    if (vec_norm(eta) - 1.0).abs() > 1e-12 || (vec_norm(xi) - 1.0).abs() > 1e-12 {
        return Err(EllipticityError::InvalidDirection);
    }
    if let EnergyModel::SmallStrainQuadratic { mu, lambda, .. } = model {
        let h = SquareMatrix::outer(eta, xi).symmetric_part();
        return Ok(2.0 * mu * h.inner(&h) + lambda * dot(eta, xi).powi(2));
    }
    let step = f64::EPSILON.powf(0.25) * f.frobenius_norm().max(1.0);
    let dir = SquareMatrix::outer(eta, xi);
    let w0 = model.energy(f);
    let wp = model.energy(&f.add(&dir.scale(step)));
    let wm = model.energy(&f.sub(&dir.scale(step)));
    if !w0.is_finite() || !wp.is_finite() || !wm.is_finite() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok((wp - 2.0 * w0 + wm) / (step * step))
}

fn unit_2(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

/// Deterministic hemisphere point set (golden-angle spiral, z in (0, 1]).
fn hemisphere_grid(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|i| {
            let z = (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            normalize(&[r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

fn direction_grid<const N: usize>(resolution: usize) -> Vec<Vector<N>> {
    let mut out = Vec::with_capacity(resolution);
    match N {
        2 => {
            for i in 0..resolution {
                let theta = std::f64::consts::PI * i as f64 / resolution as f64;
                let u = unit_2(theta);
                let mut v = [0.0; N];
                v[0] = u[0];
                v[1] = u[1];
                out.push(v);
            }
        }
        3 => {
            for u in hemisphere_grid(resolution) {
                let mut v = [0.0; N];
                v.copy_from_slice(&u);
                out.push(v);
            }
        }
        _ => unreachable!("supported dimensions are 2 and 3"),
    }
    out
}

fn golden_section_min(lo: f64, hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Scans the directional second derivative over an angular grid of
/// (eta, xi) pairs. The violation tolerance is proportional to the largest
/// curvature magnitude seen on the grid (floor 1e-10).
pub fn rank_one_scan<const N: usize>(
    model: &EnergyModel<N>,
    f: &SquareMatrix<N>,
    resolution: usize,
) -> Result<EllipticityReport<N>, EllipticityError> {
    if !matches!(model, EnergyModel::SmallStrainQuadratic { .. }) && f.det() <= 0.0 {
        return Err(EllipticityError::Domain(format!(
            "base point must satisfy det F > 0, got {:e}",
            f.det()
        )));
    }
    let etas = direction_grid::<N>(resolution);
    let xis = direction_grid::<N>(resolution);
    let pairs = etas.len() * xis.len();

    let qs: Vec<f64> = (0..pairs)
        .into_par_iter()
        .map(|idx| {
            let eta = &etas[idx / xis.len()];
            let xi = &xis[idx % xis.len()];
            directional_second_derivative(model, f, eta, xi).unwrap_or(f64::NEG_INFINITY)
        })
        .collect();

    let mut min_q = f64::INFINITY;
    let mut min_idx = 0usize;
    let mut scale = 0.0_f64;
    for (i, &q) in qs.iter().enumerate() {
        if q.is_finite() {
            scale = scale.max(q.abs());
        }
        if q < min_q {
            min_q = q;
            min_idx = i;
        }
    }
    let tol = (TOL_ELL_REL * scale).max(TOL_ELL_FLOOR);

    let mut best_eta = etas[min_idx / xis.len()];
    let mut best_xi = xis[min_idx % xis.len()];

    // local refinement around the minimal cell (2D angular grids only)
    if N == 2 && min_q.is_finite() {
        let delta = std::f64::consts::PI / resolution as f64;
        let theta0 = std::f64::consts::PI * ((min_idx / xis.len()) as f64) / resolution as f64;
        let phi0 = std::f64::consts::PI * ((min_idx % xis.len()) as f64) / resolution as f64;
        let q_of = |theta: f64, phi: f64| -> f64 {
            let mut eta = [0.0; N];
            let mut xi = [0.0; N];
            let (u, v) = (unit_2(theta), unit_2(phi));
            eta[0] = u[0];
            eta[1] = u[1];
            xi[0] = v[0];
            xi[1] = v[1];
            directional_second_derivative(model, f, &eta, &xi).unwrap_or(f64::NEG_INFINITY)
        };
        let (theta1, _) = golden_section_min(theta0 - delta, theta0 + delta, 30, |t| q_of(t, phi0));
        let (phi1, q1) = golden_section_min(phi0 - delta, phi0 + delta, 30, |p| q_of(theta1, p));
        if q1 < min_q {
            min_q = q1;
            let (u, v) = (unit_2(theta1), unit_2(phi1));
            best_eta[0] = u[0];
            best_eta[1] = u[1];
            best_xi[0] = v[0];
            best_xi[1] = v[1];
        }
    }

    let verdict = if min_q < -tol {
        Verdict::Violated
    } else if min_q <= 10.0 * tol {
        Verdict::Inconclusive
    } else {
        Verdict::Elliptic
    };
    let witness = (verdict == Verdict::Violated).then_some(Witness {
        eta: best_eta,
        xi: best_xi,
        base_point: *f,
    });
    Ok(EllipticityReport { verdict, min_q, witness, samples: pairs, tol })
}

#[derive(Debug, Clone, PartialEq)]
pub enum LineConvexity {
    Convex,
    /// first consecutive triple with a negative second difference
    Nonconvex { witness: [(f64, f64); 3] },
}

/// Discrete convexity check by consecutive-triple second divided differences.
pub fn line_convexity_check(samples: &[(f64, f64)]) -> Result<LineConvexity, EllipticityError> {
    if samples.len() < 3 {
        return Err(EllipticityError::InvalidArgument(
            "convexity check needs at least 3 samples".into(),
        ));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(EllipticityError::InvalidArgument(
                "sample abscissae must be strictly increasing".into(),
            ));
        }
    }
    let h_max = samples.iter().fold(0.0_f64, |m, s| m.max(s.1.abs()));
    let tol = TOL_LINE_REL * h_max;
    for w in samples.windows(3) {
        let [(t0, h0), (t1, h1), (t2, h2)] = [w[0], w[1], w[2]];
        let second = 2.0 * ((h2 - h1) / (t2 - t1) - (h1 - h0) / (t1 - t0)) / (t2 - t0);
        if second < -tol {
            return Ok(LineConvexity::Nonconvex { witness: [w[0], w[1], w[2]] });
        }
    }
    Ok(LineConvexity::Convex)
}

/// Closed-form kinematics of simple shear F = 1 + t e1 (x) e2.
#[derive(Debug, Clone, Copy)]
pub struct SimpleShearKinematics {
    pub stretch: SymmetricMatrix<2>,
    pub rotation: SquareMatrix<2>,
    pub log_stretch: SymmetricMatrix<2>,
    /// largest principal stretch (sqrt(t^2+4) + t)/2
    pub lambda_max: f64,
}

pub fn simple_shear_kinematics(t: f64) -> SimpleShearKinematics {
    let s = (t * t + 4.0).sqrt();
    let lambda_max = 0.5 * (s + t);
    let big_l = lambda_max.ln();
    SimpleShearKinematics {
        stretch: SymmetricMatrix::from_upper([[2.0 / s, t / s], [0.0, (t * t + 2.0) / s]]),
        rotation: SquareMatrix::new([[2.0 / s, t / s], [-t / s, 2.0 / s]]),
        log_stretch: SymmetricMatrix::from_upper([
            [-t * big_l / s, 2.0 * big_l / s],
            [0.0, t * big_l / s],
        ]),
        lambda_max,
    }
}

pub fn shear_deformation(t: f64) -> SquareMatrix<2> {
    SquareMatrix::new([[1.0, t], [0.0, 1.0]])
}

/// Traceless symmetric log-plastic-stretch [[a, b], [b, -a]].
pub fn plastic_log_stretch_2d(a: f64, b: f64) -> SymmetricMatrix<2> {
    SymmetricMatrix::from_upper([[a, b], [0.0, -a]])
}

/// Transcribed closed form of the shear response curve for the isochoric
/// exponentiated Hencky composite at frozen plastic log-stretch (a, b):
///
///   exp(2 log^2 L1 - 2 (log L1 / (t^2+4)) (-2 a t + 4 b) + 2 a^2 + 2 b^2)
///
/// with L1 = (sqrt(t^2+4) + t)/2. The cross term carries a (t^2+4)
/// denominator; the spectral evaluation (`shear_curve_direct`) produces
/// sqrt(t^2+4) instead, so the two branches disagree away from t = 0 whenever
/// a t != 0 or b != 0. Both are kept and compared, see `counterexample_curve`.
pub fn shear_curve_closed_form(a: f64, b: f64, t: f64) -> f64 {
    let big_l = (0.5 * ((t * t + 4.0).sqrt() + t)).ln();
    (2.0 * big_l * big_l - 2.0 * big_l / (t * t + 4.0) * (-2.0 * a * t + 4.0 * b)
        + 2.0 * (a * a + b * b))
        .exp()
}

/// First-principles evaluation of the same curve: energy of the
/// additive-logarithmic composite (isochoric exponentiated Hencky, mu = k = 1)
/// at F = 1 + t e1 (x) e2, routed entirely through the spectral kernels.
pub fn shear_curve_direct(a: f64, b: f64, t: f64) -> f64 {
    let model = EnergyModel::AdditiveLog {
        core: LogStrainEnergy::exponentiated_hencky_isochoric(),
        plastic_log_strain: plastic_log_stretch_2d(a, b),
    };
    model.energy(&shear_deformation(t))
}

#[derive(Debug, Clone)]
pub struct CounterexampleCurve {
    pub a: f64,
    pub b: f64,
    pub t: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub direct: Vec<f64>,
    pub closed_form_convexity: LineConvexity,
    pub direct_convexity: LineConvexity,
    /// max |h(t) - h(-t)| over both curves
    pub evenness_residual: f64,
    /// (t, |closed_form - direct|) at the largest gap between the two routes
    pub max_discrepancy: (f64, f64),
}

/// Samples both curve evaluations on a grid symmetric about 0, asserts
/// evenness and runs the line convexity check on each.
pub fn counterexample_curve(
    a: f64,
    b: f64,
    t_grid: &[f64],
) -> Result<CounterexampleCurve, EllipticityError> {
    if t_grid.len() < 3 {
        return Err(EllipticityError::InvalidArgument(
            "counterexample curve needs at least 3 samples".into(),
        ));
    }
    let n = t_grid.len();
    let t_scale = t_grid.iter().fold(0.0_f64, |m, t| m.max(t.abs())).max(1.0);
    for i in 0..n {
        if (t_grid[i] + t_grid[n - 1 - i]).abs() > 1e-9 * t_scale {
            return Err(EllipticityError::InvalidArgument(
                "grid must be symmetric about 0".into(),
            ));
        }
    }
    let closed_form: Vec<f64> = t_grid.iter().map(|&t| shear_curve_closed_form(a, b, t)).collect();
    let direct: Vec<f64> = t_grid.iter().map(|&t| shear_curve_direct(a, b, t)).collect();

    let mut evenness = 0.0_f64;
    for i in 0..n {
        evenness = evenness
            .max((closed_form[i] - closed_form[n - 1 - i]).abs())
            .max((direct[i] - direct[n - 1 - i]).abs());
    }
    let mut max_discrepancy = (0.0, 0.0);
    for i in 0..n {
        let gap = (closed_form[i] - direct[i]).abs();
        if gap > max_discrepancy.1 {
            max_discrepancy = (t_grid[i], gap);
        }
    }
    let pack = |vals: &[f64]| -> Vec<(f64, f64)> {
        t_grid.iter().copied().zip(vals.iter().copied()).collect()
    };
    Ok(CounterexampleCurve {
        a,
        b,
        t: t_grid.to_vec(),
        closed_form_convexity: line_convexity_check(&pack(&closed_form))?,
        direct_convexity: line_convexity_check(&pack(&direct))?,
        closed_form,
        direct,
        evenness_residual: evenness,
        max_discrepancy,
    })
}

/// Scans a quadratic Hencky hyperelastic model over a grid of diagonal
/// stretches.
pub fn stretch_domain_scan<const N: usize>(
    mu: f64,
    kappa: f64,
    stretch_grid: &[Vector<N>],
    resolution: usize,
) -> Result<Vec<(Vector<N>, EllipticityReport<N>)>, EllipticityError> {
    let model = EnergyModel::<N>::Hyperelastic {
        core: LogStrainEnergy::quadratic_hencky(mu, kappa),
    };
    let mut out = Vec::with_capacity(stretch_grid.len());
    for stretch in stretch_grid {
        if stretch.iter().any(|&l| !(l > 0.0)) {
            return Err(EllipticityError::Domain(
                "stretch grid entries must be positive".into(),
            ));
        }
        let f = SquareMatrix::diagonal(stretch);
        out.push((*stretch, rank_one_scan(&model, &f, resolution)?));
    }
    Ok(out)
}

/// Cross-validation helper used in tests: the closed-form shear kinematics
/// against the generic polar/log kernels.
pub fn verify_shear_kinematics(t: f64) -> f64 {
    let k = simple_shear_kinematics(t);
    let f = shear_deformation(t);
    let polar = polar_decompose(&f).expect("det F = 1 > 0");
    let log_u = matrix_log_psym(&polar.stretch).expect("U positive definite");
    let mut residual: f64 = k
        .stretch
        .sub(&polar.stretch)
        .frobenius_norm()
        .max(k.rotation.sub(&polar.rotation).frobenius_norm());
    residual = residual.max(k.log_stretch.sub(&log_u).frobenius_norm());
    residual
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SymmetricMatrix;

    #[test]
    fn small_strain_directional_curvature_is_analytic() {
        let model = EnergyModel::<3>::SmallStrainQuadratic {
            mu: 1.0,
            lambda: 1.0,
            plastic_strain: SymmetricMatrix::from_upper([
                [0.2, 0.1, 0.0],
                [0.0, -0.1, 0.05],
                [0.0, 0.0, -0.1],
            ]),
        };
        let f = SquareMatrix::identity();
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        let q = directional_second_derivative(&model, &f, &e1, &e2).unwrap();
        // 2 mu |sym(e1 x e2)|^2 + lambda <e1, e2>^2 = mu
        assert!((q - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn non_unit_direction_rejected() {
        let model = EnergyModel::<2>::Hyperelastic {
            core: LogStrainEnergy::exponentiated_hencky_isochoric(),
        };
        let f = SquareMatrix::identity();
        assert!(matches!(
            directional_second_derivative(&model, &f, &[2.0, 0.0], &[0.0, 1.0]),
            Err(EllipticityError::InvalidDirection)
        ));
    }

    #[test]
    fn hyperelastic_exponentiated_is_elliptic_at_identity() {
        let model = EnergyModel::<2>::Hyperelastic {
            core: LogStrainEnergy::exponentiated_hencky_isochoric(),
        };
        let f = SquareMatrix::identity();
        let q = directional_second_derivative(&model, &f, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(q > 0.0);
        let report = rank_one_scan(&model, &f, 64).unwrap();
        assert_eq!(report.verdict, Verdict::Elliptic);
    }

    #[test]
    fn additive_composite_violates_on_shear_path() {
        let model = EnergyModel::AdditiveLog {
            core: LogStrainEnergy::exponentiated_hencky_isochoric(),
            plastic_log_strain: plastic_log_stretch_2d(-2.0, 0.0),
        };
        // somewhere on t in (0, 1) the shear-direction curvature is negative
        let negative = (1..20).any(|i| {
            let f = shear_deformation(i as f64 * 0.05);
            directional_second_derivative(&model, &f, &[1.0, 0.0], &[0.0, 1.0]).unwrap() < 0.0
        });
        assert!(negative);
    }

    #[test]
    fn multiplicative_composite_stays_elliptic_on_shear_path() {
        let model = EnergyModel::Multiplicative {
            core: LogStrainEnergy::exponentiated_hencky_isochoric(),
            plastic_distortion: SquareMatrix::diagonal(&[(-2.0_f64).exp(), 2.0_f64.exp()]),
        };
        for i in 0..7 {
            let f = shear_deformation(i as f64 * 0.25);
            let report = rank_one_scan(&model, &f, 64).unwrap();
            assert_ne!(report.verdict, Verdict::Violated, "violated at t = {}", i as f64 * 0.25);
        }
    }

    #[test]
    fn line_convexity_basics() {
        let quad: Vec<(f64, f64)> = (0..21)
            .map(|i| {
                let t = -1.0 + i as f64 * 0.1;
                (t, t * t)
            })
            .collect();
        assert_eq!(line_convexity_check(&quad).unwrap(), LineConvexity::Convex);
        let neg: Vec<(f64, f64)> = quad.iter().map(|&(t, h)| (t, -h)).collect();
        assert!(matches!(
            line_convexity_check(&neg).unwrap(),
            LineConvexity::Nonconvex { .. }
        ));
        assert!(line_convexity_check(&quad[..2]).is_err());
    }

    #[test]
    fn shear_kinematics_closed_forms() {
        let k = simple_shear_kinematics(0.0);
        assert!(k.stretch.sub(&SymmetricMatrix::identity()).frobenius_norm() <= 1e-15);
        assert!((k.lambda_max - 1.0).abs() <= 1e-15);

        let k = simple_shear_kinematics(1.0);
        let golden = 0.5 * (1.0 + 5.0_f64.sqrt());
        assert!((k.lambda_max - golden).abs() <= 1e-14);
        assert!(verify_shear_kinematics(1.0) <= 1e-10);
        assert!(verify_shear_kinematics(-1.0) <= 1e-10);
        assert!(verify_shear_kinematics(2.5) <= 1e-10);

        // t -> -t flips lambda_max to its reciprocal and the diagonal signs
        let km = simple_shear_kinematics(-1.0);
        assert!((km.lambda_max - 1.0 / golden).abs() <= 1e-14);
        assert!((km.log_stretch.get(0, 0) - k.log_stretch.get(0, 0)).abs() <= 1e-14);
    }

    #[test]
    fn closed_form_curve_values() {
        let h0 = shear_curve_closed_form(-2.0, 0.0, 0.0);
        assert!((h0 - 8.0_f64.exp()).abs() <= 1e-9);
        let h1 = shear_curve_closed_form(-2.0, 0.0, 1.0);
        assert!((h1 - 2193.36).abs() <= 0.5, "h(1) = {h1}");
        // zero plastic stretch: reduces to the hyperelastic shear energy
        let t = 0.8;
        let hyper = (2.0 * simple_shear_kinematics(t).lambda_max.ln().powi(2)).exp();
        assert!((shear_curve_closed_form(0.0, 0.0, t) - hyper).abs() <= 1e-12 * hyper);
    }

    #[test]
    fn direct_curve_values() {
        assert!((shear_curve_direct(-2.0, 0.0, 0.0) - 8.0_f64.exp()).abs() <= 1e-8);
        // (0, 0, 1): exp(2 log^2 golden)
        let golden = 0.5 * (1.0 + 5.0_f64.sqrt());
        let expected = (2.0 * golden.ln().powi(2)).exp();
        assert!((shear_curve_direct(0.0, 0.0, 1.0) - expected).abs() <= 1e-9);
        assert!((expected - 1.589).abs() <= 1e-3);
        // decisive inequality of the counterexample, spectral route
        let h1 = shear_curve_direct(-2.0, 0.0, 1.0);
        assert!(h1 < shear_curve_direct(-2.0, 0.0, 0.0));
        assert!(h1 > 7e2 && h1 < 1e3, "h_direct(1) = {h1}");
    }

    #[test]
    fn direct_matches_inner_product_oracle() {
        // oracle: exponent = 2 log^2 L1 - 2 <dev log U, dev log Up> + 2(a^2+b^2)
        // with <dev log U, dev log Up> expanded from the spectral log U
        let (a, b) = (-2.0_f64, 0.0_f64);
        for &t in &[0.3, 1.0, 1.7] {
            let k = simple_shear_kinematics(t);
            let big_l = k.lambda_max.ln();
            let s = (t * t + 4.0).sqrt();
            let inner = big_l / s * (-2.0 * a * t + 4.0 * b);
            let exponent = 2.0 * big_l * big_l - 2.0 * inner + 2.0 * (a * a + b * b);
            let direct = shear_curve_direct(a, b, t);
            assert!(
                (direct - exponent.exp()).abs() <= 1e-9 * direct,
                "t = {t}: {direct} vs {}",
                exponent.exp()
            );
        }
    }

    #[test]
    fn counterexample_curve_verdicts() {
        let grid: Vec<f64> = (0..401).map(|i| -2.0 + i as f64 * 0.01).collect();
        let curve = counterexample_curve(-2.0, 0.0, &grid).unwrap();
        assert!(matches!(curve.closed_form_convexity, LineConvexity::Nonconvex { .. }));
        assert!(matches!(curve.direct_convexity, LineConvexity::Nonconvex { .. }));
        assert!(curve.evenness_residual <= 1e-10 * 8.0_f64.exp());
        assert!(curve.max_discrepancy.1 > 1.0, "the two routes disagree off t = 0");

        let trivial = counterexample_curve(0.0, 0.0, &grid).unwrap();
        assert_eq!(trivial.closed_form_convexity, LineConvexity::Convex);
        assert_eq!(trivial.direct_convexity, LineConvexity::Convex);
        assert!(trivial.max_discrepancy.1 <= 1e-9);

        // b only: curves coincide at t = 0 with value e^2
        let shifted = counterexample_curve(0.0, 1.0, &grid).unwrap();
        let mid = grid.len() / 2;
        assert!((shifted.closed_form[mid] - 2.0_f64.exp()).abs() <= 1e-12);
        assert!((shifted.direct[mid] - 2.0_f64.exp()).abs() <= 1e-9);
    }

    #[test]
    fn counterexample_curve_rejects_bad_grid() {
        assert!(counterexample_curve(-2.0, 0.0, &[0.0, 1.0]).is_err());
        assert!(counterexample_curve(-2.0, 0.0, &[-1.0, 0.0, 2.0]).is_err());
    }

    #[test]
    fn stretch_scan_2d_smoke() {
        let grid: Vec<[f64; 2]> = vec![[1.0, 1.0], [5.0, 1.0]];
        let out = stretch_domain_scan(1.0, 1.0, &grid, 64).unwrap();
        assert_eq!(out[0].1.verdict, Verdict::Elliptic);
        assert_eq!(out[1].1.verdict, Verdict::Violated);
    }
}
