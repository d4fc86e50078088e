//! Randomized invariant checks for the tensor kernels, energy models and
//! return-map algorithms.

use logstrain::energy::{
    log_stretch, toy1d_eval, EnergyModel, LogStrainEnergy, ToyEnergy,
};
use logstrain::plasticity::{
    additive_log_return_map, kkt_check, radial_return_small_strain, FlowState, KktVerdict,
    PlasticState, YieldSurface,
};
use logstrain::tensor::{
    deviatoric, matrix_exp_sym, matrix_log_psym, polar_decompose, SquareMatrix, SymmetricMatrix,
};
use proptest::prelude::*;

fn sym3(v: [f64; 6]) -> SymmetricMatrix<3> {
    SymmetricMatrix::from_upper([
        [v[0], v[3], v[4]],
        [0.0, v[1], v[5]],
        [0.0, 0.0, v[2]],
    ])
}

/// Proper rotation as the orthogonal polar factor of I + W with W skew;
/// det(I + W) = 1 + |w|^2 > 0, so this never fails.
fn rotation3(w: [f64; 3]) -> SquareMatrix<3> {
    let skew = SquareMatrix::new([
        [0.0, -w[2], w[1]],
        [w[2], 0.0, -w[0]],
        [-w[1], w[0], 0.0],
    ]);
    polar_decompose(&SquareMatrix::identity().add(&skew))
        .expect("I + skew is invertible")
        .rotation
}

/// Deformation gradient with guaranteed positive determinant and bounded
/// conditioning: exp(S) composed with a rotation.
fn deformation3(s: [f64; 6], w: [f64; 3]) -> SquareMatrix<3> {
    matrix_exp_sym(&sym3(s))
        .expect("finite symmetric exponential")
        .as_square()
        .matmul(&rotation3(w))
}

fn rel_gap<const N: usize>(a: &SymmetricMatrix<N>, b: &SymmetricMatrix<N>) -> f64 {
    a.sub(b).frobenius_norm() / a.frobenius_norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    /// exp and log on symmetric / positive-definite matrices invert each other.
    #[test]
    fn log_exp_round_trip(s in proptest::array::uniform6(-1.5_f64..1.5)) {
        let e = sym3(s);
        let x = matrix_exp_sym(&e).unwrap();
        let back = matrix_log_psym(&x).unwrap();
        prop_assert!(rel_gap(&back, &e) <= 1e-9, "round trip gap {}", rel_gap(&back, &e));
    }

    /// The matrix logarithm is isotropic: log(Q X Q^T) = Q log(X) Q^T.
    #[test]
    fn log_isotropy(
        s in proptest::array::uniform6(-1.2_f64..1.2),
        w in proptest::array::uniform3(-2.0_f64..2.0),
    ) {
        let x = matrix_exp_sym(&sym3(s)).unwrap();
        let q = rotation3(w);
        let conj = q.matmul(&x.as_square()).matmul(&q.transpose()).symmetric_part();
        let lhs = matrix_log_psym(&conj).unwrap();
        let rhs = q
            .matmul(&matrix_log_psym(&x).unwrap().as_square())
            .matmul(&q.transpose())
            .symmetric_part();
        prop_assert!(rel_gap(&lhs, &rhs) <= 1e-9, "isotropy gap {}", rel_gap(&lhs, &rhs));
    }

    /// tr log X = log det X on positive-definite matrices.
    #[test]
    fn trace_log_equals_log_det(s in proptest::array::uniform6(-1.2_f64..1.2)) {
        let x = matrix_exp_sym(&sym3(s)).unwrap();
        let tr = matrix_log_psym(&x).unwrap().trace();
        let ld = x.as_square().det().ln();
        prop_assert!((tr - ld).abs() <= 1e-9 * tr.abs().max(1.0), "gap {}", (tr - ld).abs());
    }

    /// Polar factors: R orthogonal with det +1, U positive-definite, F = R U.
    #[test]
    fn polar_factorization(
        s in proptest::array::uniform6(-1.0_f64..1.0),
        w in proptest::array::uniform3(-2.0_f64..2.0),
    ) {
        let f = deformation3(s, w);
        let polar = polar_decompose(&f).unwrap();
        let r = &polar.rotation;
        let ortho = r.transpose().matmul(r).sub(&SquareMatrix::identity()).frobenius_norm();
        prop_assert!(ortho <= 1e-10, "orthogonality defect {ortho}");
        prop_assert!((r.det() - 1.0).abs() <= 1e-10, "det R = {}", r.det());
        let recon = r.matmul(&polar.stretch.as_square());
        let gap = recon.sub(&f).frobenius_norm() / f.frobenius_norm();
        prop_assert!(gap <= 1e-10, "F = R U gap {gap}");
        // U agrees with the principal square root of F^T F through the log
        let log_u = log_stretch(&f).unwrap();
        let gap_u = rel_gap(&matrix_log_psym(&polar.stretch).unwrap(), &log_u);
        prop_assert!(gap_u <= 1e-8, "stretch/log gap {gap_u}");
    }

    /// Deviatoric projection: traceless, idempotent, orthogonal complement of
    /// the spherical part.
    #[test]
    fn deviatoric_projection(s in proptest::array::uniform6(-3.0_f64..3.0)) {
        let x = sym3(s);
        let d = deviatoric(&x);
        prop_assert!(d.trace().abs() <= 1e-12 * x.frobenius_norm().max(1.0));
        prop_assert!(rel_gap(&deviatoric(&d), &d) <= 1e-14);
        let spherical = x.sub(&d);
        prop_assert!(d.inner(&spherical).abs() <= 1e-12 * x.frobenius_norm().powi(2).max(1.0));
    }

    /// Frame indifference and isotropy of the log-strain energies:
    /// W(Q1 F Q2) = W(F) for rotations Q1, Q2.
    #[test]
    fn energy_objectivity_and_isotropy(
        s in proptest::array::uniform6(-0.8_f64..0.8),
        w in proptest::array::uniform3(-2.0_f64..2.0),
        w1 in proptest::array::uniform3(-2.0_f64..2.0),
        w2 in proptest::array::uniform3(-2.0_f64..2.0),
    ) {
        let f = deformation3(s, w);
        let (q1, q2) = (rotation3(w1), rotation3(w2));
        for core in [
            LogStrainEnergy::quadratic_hencky(1.0, 1.0),
            LogStrainEnergy::exponentiated_hencky(1.0, 1.0, 2.0, 3.0),
        ] {
            let model = EnergyModel::Hyperelastic { core };
            let base = model.energy(&f);
            let rotated = model.energy(&q1.matmul(&f).matmul(&q2));
            prop_assert!(
                (base - rotated).abs() <= 1e-9 * base.abs().max(1.0),
                "energy gap {} for {core:?}", (base - rotated).abs()
            );
        }
    }

    /// Left-rotating the deformation leaves the multiplicative composite
    /// unchanged (frame indifference with a frozen plastic distortion).
    #[test]
    fn multiplicative_objectivity(
        s in proptest::array::uniform6(-0.6_f64..0.6),
        w in proptest::array::uniform3(-2.0_f64..2.0),
        p in proptest::array::uniform6(-0.4_f64..0.4),
        w1 in proptest::array::uniform3(-2.0_f64..2.0),
    ) {
        let f = deformation3(s, w);
        let plastic_distortion = {
            let raw = matrix_exp_sym(&deviatoric(&sym3(p))).unwrap().as_square();
            raw.scale(raw.det().powf(-1.0 / 3.0))
        };
        let model = EnergyModel::Multiplicative {
            core: LogStrainEnergy::quadratic_hencky(1.0, 1.0),
            plastic_distortion,
        };
        let base = model.energy(&f);
        let rotated = model.energy(&rotation3(w1).matmul(&f));
        prop_assert!(
            (base - rotated).abs() <= 1e-9 * base.abs().max(1.0),
            "objectivity gap {}", (base - rotated).abs()
        );
    }

    /// When the plastic strain and the total stretch commute (here: both
    /// diagonal), the additive-logarithmic and multiplicative composites
    /// assign the same energy.
    #[test]
    fn coaxial_composites_agree(
        e in proptest::array::uniform3(-0.8_f64..0.8),
        p in proptest::array::uniform3(-0.5_f64..0.5),
    ) {
        let core = LogStrainEnergy::quadratic_hencky(1.0, 1.0);
        let strain = {
            let d = SymmetricMatrix::<3>::diagonal(&p);
            deviatoric(&d)
        };
        let f = matrix_exp_sym(&SymmetricMatrix::<3>::diagonal(&e)).unwrap().as_square();
        let additive = EnergyModel::AdditiveLog { core, plastic_log_strain: strain };
        let multiplicative = EnergyModel::Multiplicative {
            core,
            plastic_distortion: matrix_exp_sym(&strain).unwrap().as_square(),
        };
        let (wa, wm) = (additive.energy(&f), multiplicative.energy(&f));
        prop_assert!(
            (wa - wm).abs() <= 1e-9 * wa.abs().max(1.0),
            "coaxial gap {}", (wa - wm).abs()
        );
    }

    /// Radial return: non-negative multiplier, volume-preserving plastic
    /// strain, and the discrete Karush-Kuhn-Tucker conditions.
    #[test]
    fn radial_return_kkt(
        e in proptest::array::uniform6(-0.6_f64..0.6),
        p0 in proptest::array::uniform6(-0.2_f64..0.2),
        sigma_y in 0.05_f64..1.0,
    ) {
        let surface = YieldSurface::new(sigma_y);
        let prior = deviatoric(&sym3(p0));
        let mut state = FlowState::new(PlasticState::SmallStrain(prior));
        let result =
            radial_return_small_strain(1.0, &sym3(e), &mut state, 1.0, 2.0, &surface, 1.0)
                .unwrap();
        prop_assert!(result.lambda_plus >= 0.0);
        let PlasticState::SmallStrain(p_new) = result.plastic else {
            return Err(TestCaseError::fail("strain-valued state expected"));
        };
        prop_assert!(p_new.trace().abs() <= 1e-10, "plastic volume change {}", p_new.trace());
        let verdict = kkt_check(&result, surface.kkt_tolerance());
        prop_assert!(verdict == KktVerdict::Pass, "KKT verdict {verdict:?}");
    }

    /// The additive-logarithmic return map reduces to the small-strain radial
    /// return applied to log U (with the Lame parameter matched to the bulk
    /// modulus: lambda = kappa - 2 mu / 3).
    #[test]
    fn additive_log_matches_small_strain_on_log_u(
        e in proptest::array::uniform6(-0.5_f64..0.5),
        p0 in proptest::array::uniform6(-0.15_f64..0.15),
    ) {
        let (mu, kappa) = (1.0, 2.0);
        let core = LogStrainEnergy::quadratic_hencky(mu, kappa);
        let surface = YieldSurface::new(0.2);
        let strain = sym3(e);
        let prior = deviatoric(&sym3(p0));
        let f = matrix_exp_sym(&strain).unwrap().as_square();
        let mut sa = FlowState::new(PlasticState::AdditiveLog(prior));
        let mut sb = FlowState::new(PlasticState::SmallStrain(prior));
        let a = additive_log_return_map(1.0, &f, &mut sa, &core, &surface, 1.0).unwrap();
        let b = radial_return_small_strain(
            1.0, &strain, &mut sb, mu, kappa - 2.0 * mu / 3.0, &surface, 1.0,
        )
        .unwrap();
        let gap = a.stress.sub(&b.stress).frobenius_norm()
            / b.stress.frobenius_norm().max(1.0);
        prop_assert!(gap <= 1e-9, "stress gap {gap}");
        prop_assert!((a.lambda_plus - b.lambda_plus).abs() <= 1e-9 * b.lambda_plus.max(1.0));
    }

    /// Second differences of the globally convex scalar families stay
    /// non-negative.
    #[test]
    fn toy_families_convex(t in 0.1_f64..4.0, h in 0.01_f64..0.5) {
        for family in [ToyEnergy::ExpHencky, ToyEnergy::ExpHenckyShifted { shift: 1.5 }] {
            let lo = toy1d_eval(family, t).unwrap();
            let mid = toy1d_eval(family, t + h).unwrap();
            let hi = toy1d_eval(family, t + 2.0 * h).unwrap();
            let second = lo - 2.0 * mid + hi;
            prop_assert!(
                second >= -1e-10 * lo.abs().max(1.0),
                "{family:?} second difference {second} at t = {t}"
            );
        }
    }
}
