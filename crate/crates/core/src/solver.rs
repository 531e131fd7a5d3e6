//! SPD solvers for the stencil systems: conjugate gradients with warm
//! starts, and a banded Cholesky factorization for small systems. The two
//! routes are independent, which the tests exploit as a cross-check.

use crate::error::{Error, Result};
use crate::grid::Domain;
use crate::scalar::{fl, fu, Scalar};

#[derive(Debug, Clone, Copy)]
pub struct CgStats<F> {
    pub iterations: usize,
    pub residual_l2: F,
    pub converged: bool,
}

/// Conjugate gradients on `A x = b` for an abstract SPD `apply`.
///
/// `x` holds the initial guess and is updated in place. Convergence is
/// `‖r‖₂ ≤ tol_rel · ‖b‖₂`.
pub fn conjugate_gradient<F: Scalar>(
    apply: impl Fn(&[F], &mut [F]),
    b: &[F],
    x: &mut [F],
    tol_rel: F,
    max_iter: usize,
) -> CgStats<F> {
    let n = b.len();
    assert_eq!(x.len(), n);
    let norm_b = l2(b);
    if norm_b == F::zero() {
        x.fill(F::zero());
        return CgStats {
            iterations: 0,
            residual_l2: F::zero(),
            converged: true,
        };
    }
    let target = tol_rel * norm_b;

    let mut ax = vec![F::zero(); n];
    apply(x, &mut ax);
    let mut r: Vec<F> = b.iter().zip(&ax).map(|(&b, &a)| b - a).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut ap = vec![F::zero(); n];

    for k in 0..max_iter {
        if rr.sqrt() <= target {
            return CgStats {
                iterations: k,
                residual_l2: rr.sqrt(),
                converged: true,
            };
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > F::zero()) {
            // loss of positivity is a hard failure for these stencils
            return CgStats {
                iterations: k,
                residual_l2: rr.sqrt(),
                converged: false,
            };
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    CgStats {
        iterations: max_iter,
        residual_l2: rr.sqrt(),
        converged: rr.sqrt() <= target,
    }
}

fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn l2<F: Scalar>(a: &[F]) -> F {
    dot(a, a).sqrt()
}

/// Apply `(-Δ + diag) x` on the interior nodes of `dom`.
pub fn apply_shifted_neg_laplacian<F: Scalar>(
    dom: &Domain<F>,
    diag: Option<&[F]>,
    x: &[F],
    y: &mut [F],
) {
    let inv_h2 = F::one() / (dom.h() * dom.h());
    let twod = fu::<F>(2 * dom.dim());
    for i in 0..x.len() {
        let nbs = dom.neighbor_slots(i);
        let mut nb_sum = F::zero();
        for s in 0..2 * dom.dim() {
            let j = nbs[s];
            if j >= 0 {
                nb_sum = nb_sum + x[j as usize];
            }
        }
        let shift = diag.map_or(F::zero(), |d| d[i]);
        y[i] = (twod * x[i] - nb_sum) * inv_h2 + shift * x[i];
    }
}

/// Lower-triangular banded Cholesky factor of an SPD band matrix.
pub struct BandedCholesky<F> {
    n: usize,
    bw: usize,
    /// row-major band storage: entry `(i, j)` with `i - bw ≤ j ≤ i`
    /// lives at `l[i * (bw + 1) + (j + bw - i)]`.
    l: Vec<F>,
}

impl<F: Scalar> BandedCholesky<F> {
    /// Factor `-Δ + diag` on the interior nodes of `dom`.
    ///
    /// Fails when the band storage would exceed `max_entries`.
    pub fn factor_neg_laplacian(
        dom: &Domain<F>,
        diag: Option<&[F]>,
        max_entries: usize,
    ) -> Result<Self> {
        let n = dom.interior_count();
        let mut bw = 0usize;
        for i in 0..n {
            for s in 0..2 * dom.dim() {
                let j = dom.neighbor_slots(i)[s];
                if j >= 0 {
                    bw = bw.max(i.abs_diff(j as usize));
                }
            }
        }
        if n.saturating_mul(bw + 1) > max_entries {
            return Err(Error::Unsupported(format!(
                "band storage {}x{} exceeds limit",
                n,
                bw + 1
            )));
        }

        let inv_h2 = F::one() / (dom.h() * dom.h());
        let twod = fu::<F>(2 * dom.dim());
        let width = bw + 1;
        let mut a = vec![F::zero(); n * width];
        for i in 0..n {
            a[i * width + bw] = twod * inv_h2 + diag.map_or(F::zero(), |d| d[i]);
            for s in 0..2 * dom.dim() {
                let j = dom.neighbor_slots(i)[s];
                if j >= 0 && (j as usize) < i {
                    let j = j as usize;
                    a[i * width + (j + bw - i)] = -inv_h2;
                }
            }
        }

        // in-place banded Cholesky
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut sum = a[i * width + (j + bw - i)];
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    sum = sum - a[i * width + (k + bw - i)] * a[j * width + (k + bw - j)];
                }
                if j < i {
                    a[i * width + (j + bw - i)] = sum / a[j * width + bw];
                } else {
                    if !(sum > F::zero()) {
                        return Err(Error::Unsupported("matrix is not positive definite".into()));
                    }
                    a[i * width + bw] = sum.sqrt();
                }
            }
        }
        Ok(BandedCholesky { n, bw, l: a })
    }

    pub fn solve(&self, b: &[F]) -> Vec<F> {
        let width = self.bw + 1;
        let mut y = b.to_vec();
        // forward substitution L y = b
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            let mut sum = y[i];
            for j in j0..i {
                sum = sum - self.l[i * width + (j + self.bw - i)] * y[j];
            }
            y[i] = sum / self.l[i * width + self.bw];
        }
        // back substitution Lᵀ x = y
        for i in (0..self.n).rev() {
            let mut sum = y[i];
            let jmax = (i + self.bw).min(self.n - 1);
            for j in (i + 1)..=jmax {
                sum = sum - self.l[j * width + (i + self.bw - j)] * y[j];
            }
            y[i] = sum / self.l[i * width + self.bw];
        }
        y
    }
}

/// Relative-iteration budget for CG on these stencils.
pub fn default_max_iter<F: Scalar>(dom: &Domain<F>) -> usize {
    let n = dom.interior_count();
    let lines = (fu::<F>(n))
        .powf(F::one() / fu::<F>(dom.dim()))
        .to_usize()
        .unwrap_or(64)
        + 2;
    (60 * lines).max(800)
}

/// Default CG tolerance for the linear solves.
pub fn default_tol_rel<F: Scalar>() -> F {
    fl::<F>(1e-10)
}
