//! Dense kernels for 2x2 and 3x3 real matrices: symmetric eigendecomposition,
//! principal matrix log/exp on positive definite symmetric matrices, polar
//! decomposition, deviatoric projection and the usual invariants.
//!
//! Eigendecompositions are closed-form (quadratic formula in 2D, trigonometric
//! cubic solve with one Newton polish per root in 3D), so everything here is
//! deterministic and dependency-free.

use thiserror::Error;

/// Relative threshold below which a "positive definite" eigenvalue is refused.
pub const EPS_PD_REL: f64 = 1e-12;

/// Relative gap under which eigenvalues are treated as a repeated cluster.
const EIGEN_CLUSTER_REL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KernelError {
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("matrix is not positive definite (eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { eigenvalue: f64 },
    #[error("deformation gradient has non-positive determinant {det:e}")]
    NonPositiveDeterminant { det: f64 },
}

pub type Vector<const N: usize> = [f64; N];

pub fn dot<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        s += a[i] * b[i];
    }
    s
}

pub fn vec_norm<const N: usize>(a: &Vector<N>) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize<const N: usize>(a: &Vector<N>) -> Vector<N> {
    let n = vec_norm(a);
    let mut out = *a;
    for x in out.iter_mut() {
        *x /= n;
    }
    out
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// General real n x n matrix, n in {2, 3}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareMatrix<const N: usize> {
    pub entries: [[f64; N]; N],
}

impl<const N: usize> SquareMatrix<N> {
    pub fn new(entries: [[f64; N]; N]) -> Self {
        Self { entries }
    }

    pub fn zero() -> Self {
        Self { entries: [[0.0; N]; N] }
    }

    pub fn identity() -> Self {
        let mut e = [[0.0; N]; N];
        for i in 0..N {
            e[i][i] = 1.0;
        }
        Self { entries: e }
    }

    pub fn diagonal(d: &[f64; N]) -> Self {
        let mut e = [[0.0; N]; N];
        for i in 0..N {
            e[i][i] = d[i];
        }
        Self { entries: e }
    }

    /// Dyadic product a (x) b.
    pub fn outer(a: &Vector<N>, b: &Vector<N>) -> Self {
        let mut e = [[0.0; N]; N];
        for i in 0..N {
            for j in 0..N {
                e[i][j] = a[i] * b[j];
            }
        }
        Self { entries: e }
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut e = [[0.0; N]; N];
        for i in 0..N {
            for j in 0..N {
                e[i][j] = self.entries[j][i];
            }
        }
        Self { entries: e }
    }

    pub fn trace(&self) -> f64 {
        (0..N).map(|i| self.entries[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                s += self.entries[i][j] * other.entries[i][j];
            }
        }
        s
    }

    pub fn det(&self) -> f64 {
        let e = &self.entries;
        match N {
            2 => e[0][0] * e[1][1] - e[0][1] * e[1][0],
            3 => {
                e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
                    - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
                    + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
            }
            _ => unreachable!("supported dimensions are 2 and 3"),
        }
    }

    /// Closed-form inverse via the adjugate. Caller guarantees det != 0.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        let e = &self.entries;
        let mut out = [[0.0; N]; N];
        match N {
            2 => {
                out[0][0] = e[1][1] / d;
                out[0][1] = -e[0][1] / d;
                out[1][0] = -e[1][0] / d;
                out[1][1] = e[0][0] / d;
            }
            3 => {
                out[0][0] = (e[1][1] * e[2][2] - e[1][2] * e[2][1]) / d;
                out[0][1] = (e[0][2] * e[2][1] - e[0][1] * e[2][2]) / d;
                out[0][2] = (e[0][1] * e[1][2] - e[0][2] * e[1][1]) / d;
                out[1][0] = (e[1][2] * e[2][0] - e[1][0] * e[2][2]) / d;
                out[1][1] = (e[0][0] * e[2][2] - e[0][2] * e[2][0]) / d;
                out[1][2] = (e[0][2] * e[1][0] - e[0][0] * e[1][2]) / d;
                out[2][0] = (e[1][0] * e[2][1] - e[1][1] * e[2][0]) / d;
                out[2][1] = (e[0][1] * e[2][0] - e[0][0] * e[2][1]) / d;
                out[2][2] = (e[0][0] * e[1][1] - e[0][1] * e[1][0]) / d;
            }
            _ => unreachable!("supported dimensions are 2 and 3"),
        }
        Self { entries: out }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut e = [[0.0; N]; N];
        for i in 0..N {
            for j in 0..N {
                let mut s = 0.0;
                for k in 0..N {
                    s += self.entries[i][k] * other.entries[k][j];
                }
                e[i][j] = s;
            }
        }
        Self { entries: e }
    }

    pub fn apply(&self, v: &Vector<N>) -> Vector<N> {
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = dot(&self.entries[i], v);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut e = self.entries;
        for x in e.iter_mut().flatten() {
            *x *= s;
        }
        Self { entries: e }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut e = self.entries;
        for i in 0..N {
            for j in 0..N {
                e[i][j] += other.entries[i][j];
            }
        }
        Self { entries: e }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut e = self.entries;
        for i in 0..N {
            for j in 0..N {
                e[i][j] -= other.entries[i][j];
            }
        }
        Self { entries: e }
    }

    /// Exactly symmetric part (M + M^T)/2.
    pub fn symmetric_part(&self) -> SymmetricMatrix<N> {
        let mut e = [[0.0; N]; N];
        for i in 0..N {
            for j in i..N {
                let v = 0.5 * (self.entries[i][j] + self.entries[j][i]);
                e[i][j] = v;
                e[j][i] = v;
            }
        }
        SymmetricMatrix { entries: e }
    }

    pub fn column(&self, j: usize) -> Vector<N> {
        let mut c = [0.0; N];
        for i in 0..N {
            c[i] = self.entries[i][j];
        }
        c
    }
}

/// Symmetric n x n matrix; the lower triangle always mirrors the upper one
/// bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricMatrix<const N: usize> {
    entries: [[f64; N]; N],
}

impl<const N: usize> SymmetricMatrix<N> {
    /// Builds from arbitrary entries, mirroring the upper triangle.
    pub fn from_upper(entries: [[f64; N]; N]) -> Self {
        let mut e = entries;
        for i in 0..N {
            for j in 0..i {
                e[i][j] = e[j][i];
            }
        }
        Self { entries: e }
    }

    pub fn zero() -> Self {
        Self { entries: [[0.0; N]; N] }
    }

    pub fn identity() -> Self {
        Self {
            entries: SquareMatrix::<N>::identity().entries,
        }
    }

    pub fn diagonal(d: &[f64; N]) -> Self {
        Self {
            entries: SquareMatrix::<N>::diagonal(d).entries,
        }
    }

    /// v (x) v, exactly symmetric.
    pub fn outer_self(v: &Vector<N>) -> Self {
        let mut e = [[0.0; N]; N];
        for i in 0..N {
            for j in 0..N {
                e[i][j] = v[i] * v[j];
            }
        }
        Self { entries: e }
    }

    pub fn entries(&self) -> &[[f64; N]; N] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn as_square(&self) -> SquareMatrix<N> {
        SquareMatrix { entries: self.entries }
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..N).map(|i| self.entries[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.as_square().frobenius_norm()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.as_square().inner(&other.as_square())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            entries: self.as_square().add(&other.as_square()).entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            entries: self.as_square().sub(&other.as_square()).entries,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            entries: self.as_square().scale(s).entries,
        }
    }
}

/// dev_n X = X - tr(X)/n * 1.
pub fn deviatoric<const N: usize>(s: &SymmetricMatrix<N>) -> SymmetricMatrix<N> {
    let mean = s.trace() / N as f64;
    let mut e = s.entries;
    for i in 0..N {
        e[i][i] -= mean;
    }
    SymmetricMatrix { entries: e }
}

/// Eigenvalues sorted descending; eigenvector i in column i.
#[derive(Debug, Clone, Copy)]
pub struct EigenDecomposition<const N: usize> {
    pub eigenvalues: [f64; N],
    pub eigenvectors: SquareMatrix<N>,
}

impl<const N: usize> EigenDecomposition<N> {
    /// Sum of f(lambda_i) v_i (x) v_i; exactly symmetric by construction.
    pub fn map_spectral(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix<N> {
        let mut acc = SymmetricMatrix::zero();
        for i in 0..N {
            let v = self.eigenvectors.column(i);
            acc = acc.add(&SymmetricMatrix::outer_self(&v).scale(f(self.eigenvalues[i])));
        }
        acc
    }
}

/// Flips eigenvector signs so the first component above threshold is positive.
fn fix_column_signs<const N: usize>(q: &mut SquareMatrix<N>) {
    for j in 0..N {
        for i in 0..N {
            let v = q.entries[i][j];
            if v.abs() > 1e-12 {
                if v < 0.0 {
                    for r in 0..N {
                        q.entries[r][j] = -q.entries[r][j];
                    }
                }
                break;
            }
        }
    }
}

fn sym_eigen_2(a: &SymmetricMatrix<2>) -> EigenDecomposition<2> {
    let m00 = a.entries[0][0];
    let m01 = a.entries[0][1];
    let m11 = a.entries[1][1];
    let mean = 0.5 * (m00 + m11);
    let half_gap = 0.5 * (m00 - m11);
    let r = (half_gap * half_gap + m01 * m01).sqrt();
    let scale = m00.abs().max(m11.abs()).max(m01.abs());

    let mut q = SquareMatrix::<2>::identity();
    let (l1, l2);
    if r <= EIGEN_CLUSTER_REL * scale.max(1e-300) {
        // repeated eigenvalue; any orthonormal basis works
        l1 = mean;
        l2 = mean;
    } else {
        l1 = mean + r;
        l2 = mean - r;
        // pick the better-conditioned eigenvector representation
        let v1 = if (l1 - m00).abs() > (l1 - m11).abs() {
            normalize(&[m01, l1 - m00])
        } else {
            normalize(&[l1 - m11, m01])
        };
        if v1.iter().all(|x| x.is_finite()) && vec_norm(&v1) > 0.5 {
            q = SquareMatrix::new([[v1[0], -v1[1]], [v1[1], v1[0]]]);
        }
    }
    fix_column_signs(&mut q);
    EigenDecomposition {
        eigenvalues: [l1, l2],
        eigenvectors: q,
    }
}

/// Characteristic polynomial p(x) = det(A - x 1) of a symmetric 3x3 and its
/// derivative, for the Newton polish.
fn char_poly_3(a: &SymmetricMatrix<3>, x: f64) -> (f64, f64) {
    let e = &a.entries;
    let c2 = -(e[0][0] + e[1][1] + e[2][2]);
    let c1 = e[0][0] * e[1][1] + e[0][0] * e[2][2] + e[1][1] * e[2][2]
        - e[0][1] * e[0][1]
        - e[0][2] * e[0][2]
        - e[1][2] * e[1][2];
    let c0 = -a.as_square().det();
    // p(x) = -x^3 - c2 x^2 - c1 x - c0 up to overall sign; use monic form
    let p = ((x + c2) * x + c1) * x + c0;
    let dp = (3.0 * x + 2.0 * c2) * x + c1;
    (p, dp)
}

fn sym_eigen_3(a: &SymmetricMatrix<3>) -> EigenDecomposition<3> {
    let e = &a.entries;
    let q_mean = a.trace() / 3.0;
    let mut b = a.as_square();
    for i in 0..3 {
        b.entries[i][i] -= q_mean;
    }
    let p2 = b.frobenius_norm();
    let scale = a.frobenius_norm().max(1e-300);

    if p2 <= EIGEN_CLUSTER_REL * scale {
        return EigenDecomposition {
            eigenvalues: [q_mean; 3],
            eigenvectors: SquareMatrix::identity(),
        };
    }

    // trigonometric solution of the shifted characteristic cubic
    let p = p2 / 6.0_f64.sqrt();
    let bs = b.scale(1.0 / p);
    let r = (0.5 * bs.det()).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let mut lambdas = [0.0; 3];
    for (k, l) in lambdas.iter_mut().enumerate() {
        *l = q_mean + 2.0 * p * (phi + 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
    }
    lambdas.sort_by(|x, y| y.partial_cmp(x).unwrap());

    // Polish the best-isolated root by Newton on the exact characteristic
    // polynomial (simple root: quadratic convergence), then recover the other
    // two from the deflated quadratic. This stays accurate at double roots,
    // where Newton alone stalls. Working on the trace-shifted matrix keeps the
    // roots near the origin, so the polynomial evaluation does not lose the
    // root to cancellation when all eigenvalues sit near a common value.
    let shifted = {
        let mut upper = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                upper[i][j] = e[i][j];
            }
            upper[i][i] -= q_mean;
        }
        SymmetricMatrix::from_upper(upper)
    };
    let iso = {
        let gap = |i: usize| -> f64 {
            (0..3)
                .filter(|&j| j != i)
                .map(|j| (lambdas[i] - lambdas[j]).abs())
                .fold(f64::INFINITY, f64::min)
        };
        (0..3).max_by(|&i, &j| gap(i).partial_cmp(&gap(j)).unwrap()).unwrap()
    };
    let mut mu = lambdas[iso] - q_mean;
    for _ in 0..4 {
        let (pv, dpv) = char_poly_3(&shifted, mu);
        if dpv.abs() <= 1e-300 {
            break;
        }
        let step = pv / dpv;
        if !step.is_finite() || step.abs() > p2 {
            break;
        }
        mu -= step;
    }
    // monic shifted cubic x^3 + c2 x^2 + c1 x + c0 deflated by (x - mu)
    let c2 = -shifted.trace();
    let c1 = {
        let e2 = &shifted.entries;
        e2[0][0] * e2[1][1] + e2[0][0] * e2[2][2] + e2[1][1] * e2[2][2]
            - e2[0][1] * e2[0][1]
            - e2[0][2] * e2[0][2]
            - e2[1][2] * e2[1][2]
    };
    let qb = c2 + mu;
    let qc = c1 + mu * qb;
    let disc2 = qb * qb - 4.0 * qc;
    // below the coefficient noise floor the pair is numerically a double root
    let (r1, r2) = if disc2 <= 64.0 * f64::EPSILON * (qb * qb + qc.abs()) {
        (-0.5 * qb, -0.5 * qb)
    } else if qb >= 0.0 {
        let disc = disc2.sqrt();
        let r1 = 0.5 * (-qb - disc);
        (r1, if r1 != 0.0 { qc / r1 } else { 0.5 * (-qb + disc) })
    } else {
        let disc = disc2.sqrt();
        let r1 = 0.5 * (-qb + disc);
        (r1, if r1 != 0.0 { qc / r1 } else { 0.5 * (-qb - disc) })
    };
    lambdas = [mu + q_mean, r1 + q_mean, r2 + q_mean];
    lambdas.sort_by(|x, y| y.partial_cmp(x).unwrap());

    let lam_scale = lambdas.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let cluster_tol = EIGEN_CLUSTER_REL * lam_scale.max(1e-300);

    // eigenvector for an isolated eigenvalue: best cross product of two rows
    // of A - lambda 1
    let eigvec = |lambda: f64| -> Option<[f64; 3]> {
        let rows: [[f64; 3]; 3] = [
            [e[0][0] - lambda, e[0][1], e[0][2]],
            [e[0][1], e[1][1] - lambda, e[1][2]],
            [e[0][2], e[1][2], e[2][2] - lambda],
        ];
        let candidates = [
            cross(&rows[0], &rows[1]),
            cross(&rows[0], &rows[2]),
            cross(&rows[1], &rows[2]),
        ];
        let best = candidates
            .iter()
            .max_by(|x, y| vec_norm(x).partial_cmp(&vec_norm(y)).unwrap())
            .unwrap();
        let n = vec_norm(best);
        if n > 1e-14 * scale * scale {
            Some(normalize(best))
        } else {
            None
        }
    };

    // completes v to an orthonormal basis of its complement
    let complement = |v: &[f64; 3]| -> ([f64; 3], [f64; 3]) {
        let probe = if v[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let w1 = normalize(&cross(v, &probe));
        let w2 = cross(v, &w1);
        (w1, w2)
    };

    let gap01 = (lambdas[0] - lambdas[1]).abs();
    let gap12 = (lambdas[1] - lambdas[2]).abs();

    let mut cols: [[f64; 3]; 3];
    if gap01 <= cluster_tol && gap12 <= cluster_tol {
        cols = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    } else {
        // The best-isolated eigenvalue has gap >= spread/3, so its cross
        // product eigenvector is accurate. The remaining two eigenvectors come
        // from diagonalizing A restricted to the orthogonal complement with
        // the closed-form 2x2 solver: their in-pair rotation error then scales
        // with eps * |pair block| / gap rather than with the (much larger)
        // eigenvalue error of the deflated cubic divided by the gap, which
        // matters for close but resolvable pairs.
        let iso_idx = if gap01 >= gap12 { 0 } else { 2 };
        let v = eigvec(lambdas[iso_idx]).unwrap_or([0.0, 0.0, 1.0]);
        let (w1, w2) = complement(&v);
        let av = |w: &[f64; 3]| -> [f64; 3] {
            [
                e[0][0] * w[0] + e[0][1] * w[1] + e[0][2] * w[2],
                e[0][1] * w[0] + e[1][1] * w[1] + e[1][2] * w[2],
                e[0][2] * w[0] + e[1][2] * w[1] + e[2][2] * w[2],
            ]
        };
        let aw1 = av(&w1);
        let aw2 = av(&w2);
        let block = SymmetricMatrix::<2>::from_upper([
            [dot(&w1, &aw1), dot(&w1, &aw2)],
            [0.0, dot(&w2, &aw2)],
        ]);
        let sub = sym_eigen_2(&block);
        let qe = &sub.eigenvectors.entries;
        let mut u1 = [0.0; 3];
        let mut u2 = [0.0; 3];
        for k in 0..3 {
            u1[k] = w1[k] * qe[0][0] + w2[k] * qe[1][0];
            u2[k] = w1[k] * qe[0][1] + w2[k] * qe[1][1];
        }
        // order is irrelevant: the Rayleigh polish below re-sorts the columns
        cols = [v, u1, u2];
    }

    // Rayleigh-quotient polish: quadratically accurate in the eigenvector
    // error, which removes the O(eps |A|^2 / gap) eigenvalue error of the
    // deflated quadratic for close (but resolvable) pairs.
    let mut pairs: [(f64, [f64; 3]); 3] = [(0.0, [0.0; 3]); 3];
    for i in 0..3 {
        let v = cols[i];
        let av = [
            e[0][0] * v[0] + e[0][1] * v[1] + e[0][2] * v[2],
            e[0][1] * v[0] + e[1][1] * v[1] + e[1][2] * v[2],
            e[0][2] * v[0] + e[1][2] * v[1] + e[2][2] * v[2],
        ];
        pairs[i] = (dot(&v, &av), v);
    }
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    for i in 0..3 {
        lambdas[i] = pairs[i].0;
        cols[i] = pairs[i].1;
    }

    let mut q = SquareMatrix::zero();
    for j in 0..3 {
        for i in 0..3 {
            q.entries[i][j] = cols[j][i];
        }
    }
    fix_column_signs(&mut q);
    EigenDecomposition {
        eigenvalues: lambdas,
        eigenvectors: q,
    }
}

/// Symmetric eigendecomposition, eigenvalues descending, deterministic
/// eigenvector signs.
pub fn sym_eigen<const N: usize>(
    a: &SymmetricMatrix<N>,
) -> Result<EigenDecomposition<N>, KernelError> {
    if !a.is_finite() {
        return Err(KernelError::NonFinite);
    }
    // dispatch on the (const) dimension
    match N {
        2 => {
            let mut e2 = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    e2[i][j] = a.entries[i][j];
                }
            }
            let d = sym_eigen_2(&SymmetricMatrix::from_upper(e2));
            let mut out = EigenDecomposition {
                eigenvalues: [0.0; N],
                eigenvectors: SquareMatrix::zero(),
            };
            for i in 0..2 {
                out.eigenvalues[i] = d.eigenvalues[i];
                for j in 0..2 {
                    out.eigenvectors.entries[i][j] = d.eigenvectors.entries[i][j];
                }
            }
            Ok(out)
        }
        3 => {
            let mut e3 = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    e3[i][j] = a.entries[i][j];
                }
            }
            let d = sym_eigen_3(&SymmetricMatrix::from_upper(e3));
            let mut out = EigenDecomposition {
                eigenvalues: [0.0; N],
                eigenvectors: SquareMatrix::zero(),
            };
            for i in 0..3 {
                out.eigenvalues[i] = d.eigenvalues[i];
                for j in 0..3 {
                    out.eigenvectors.entries[i][j] = d.eigenvectors.entries[i][j];
                }
            }
            Ok(out)
        }
        _ => unreachable!("supported dimensions are 2 and 3"),
    }
}

/// Principal matrix logarithm of a positive definite symmetric matrix.
pub fn matrix_log_psym<const N: usize>(
    p: &SymmetricMatrix<N>,
) -> Result<SymmetricMatrix<N>, KernelError> {
    let eig = sym_eigen(p)?;
    let max_mag = eig.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let threshold = EPS_PD_REL * max_mag;
    for &l in &eig.eigenvalues {
        if l <= threshold {
            return Err(KernelError::NotPositiveDefinite { eigenvalue: l });
        }
    }
    Ok(eig.map_spectral(f64::ln))
}

/// Matrix exponential of a symmetric matrix; always positive definite.
pub fn matrix_exp_sym<const N: usize>(
    s: &SymmetricMatrix<N>,
) -> Result<SymmetricMatrix<N>, KernelError> {
    let eig = sym_eigen(s)?;
    Ok(eig.map_spectral(f64::exp))
}

#[derive(Debug, Clone, Copy)]
pub struct PolarFactors<const N: usize> {
    pub rotation: SquareMatrix<N>,
    pub stretch: SymmetricMatrix<N>,
}

/// F = R U with R in SO(n) and U symmetric positive definite.
pub fn polar_decompose<const N: usize>(
    f: &SquareMatrix<N>,
) -> Result<PolarFactors<N>, KernelError> {
    if !f.is_finite() {
        return Err(KernelError::NonFinite);
    }
    let det = f.det();
    if det <= 0.0 {
        return Err(KernelError::NonPositiveDeterminant { det });
    }
    let c = f.transpose().matmul(f).symmetric_part();
    let eig = sym_eigen(&c)?;
    for &l in &eig.eigenvalues {
        if l <= 0.0 {
            return Err(KernelError::NotPositiveDefinite { eigenvalue: l });
        }
    }
    let stretch = eig.map_spectral(f64::sqrt);
    let stretch_inv = eig.map_spectral(|l| 1.0 / l.sqrt());
    let mut rotation = f.matmul(&stretch_inv.as_square());
    // one Newton step R <- (R + R^-T)/2 restores orthogonality quadratically
    rotation = rotation.add(&rotation.inverse().transpose()).scale(0.5);
    Ok(PolarFactors { rotation, stretch })
}
