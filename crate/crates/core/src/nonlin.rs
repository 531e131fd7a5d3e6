//! Absorption nonlinearities `g` with primitive `G(t) = ∫₀ᵗ g`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{fl, Scalar};

type RealFn<F> = Arc<dyn Fn(F) -> F + Send + Sync>;

/// Growth family of the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family<F> {
    /// g ≡ 0
    Zero,
    /// g(t) = t
    Linear,
    /// g(t) = |t|^{p-1} t
    Polynomial(F),
    /// g(t) = e^t − 1
    Exponential,
    Custom,
}

/// Evaluable nonlinearity with primitive and declared structural flags.
#[derive(Clone)]
pub struct Nonlinearity<F: Scalar> {
    eval: RealFn<F>,
    /// `G(t) = ∫₀ᵗ g(s) ds`; absent for custom shapes without a closed form.
    primitive: Option<RealFn<F>>,
    /// Local Lipschitz bound: `lipschitz(a, b) ≥ sup_{[a,b]} g'` (a ≤ b).
    lipschitz: RealFn2<F>,
    pub sign_condition: bool,
    pub nondecreasing: bool,
    pub family: Family<F>,
}

type RealFn2<F> = Arc<dyn Fn(F, F) -> F + Send + Sync>;

impl<F: Scalar> fmt::Debug for Nonlinearity<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("family", &self.family)
            .field("sign_condition", &self.sign_condition)
            .field("nondecreasing", &self.nondecreasing)
            .finish()
    }
}

impl<F: Scalar> Nonlinearity<F> {
    pub fn zero() -> Self {
        Nonlinearity {
            eval: Arc::new(|_| F::zero()),
            primitive: Some(Arc::new(|_| F::zero())),
            lipschitz: Arc::new(|_, _| F::zero()),
            sign_condition: true,
            nondecreasing: true,
            family: Family::Zero,
        }
    }

    pub fn linear() -> Self {
        Nonlinearity {
            eval: Arc::new(|t| t),
            primitive: Some(Arc::new(|t: F| t * t / fl::<F>(2.0))),
            lipschitz: Arc::new(|_, _| F::one()),
            sign_condition: true,
            nondecreasing: true,
            family: Family::Linear,
        }
    }

    /// `g(t) = |t|^{p-1} t` for `p ≥ 1`.
    pub fn polynomial(p: F) -> Result<Self> {
        if !(p >= F::one()) {
            return Err(Error::InvalidArgument(
                "polynomial power must be ≥ 1".into(),
            ));
        }
        let gp = p;
        let eval = move |t: F| t.abs().powf(gp - F::one()) * t;
        let prim = move |t: F| t.abs().powf(gp + F::one()) / (gp + F::one());
        let lip = move |a: F, b: F| {
            let m = a.abs().max(b.abs());
            gp * m.powf(gp - F::one())
        };
        Ok(Nonlinearity {
            eval: Arc::new(eval),
            primitive: Some(Arc::new(prim)),
            lipschitz: Arc::new(lip),
            sign_condition: true,
            nondecreasing: true,
            family: Family::Polynomial(p),
        })
    }

    /// `g(t) = e^t − 1`.
    pub fn exponential() -> Self {
        Nonlinearity {
            eval: Arc::new(|t: F| t.exp() - F::one()),
            primitive: Some(Arc::new(|t: F| t.exp() - t - F::one())),
            lipschitz: Arc::new(|_, b: F| b.exp()),
            sign_condition: true,
            nondecreasing: true,
            family: Family::Exponential,
        }
    }

    /// Custom nonlinearity; `lipschitz` may be a crude upper bound.
    pub fn custom(
        eval: impl Fn(F) -> F + Send + Sync + 'static,
        primitive: Option<Arc<dyn Fn(F) -> F + Send + Sync>>,
        lipschitz: impl Fn(F, F) -> F + Send + Sync + 'static,
        sign_condition: bool,
        nondecreasing: bool,
    ) -> Self {
        Nonlinearity {
            eval: Arc::new(eval),
            primitive,
            lipschitz: Arc::new(lipschitz),
            sign_condition,
            nondecreasing,
            family: Family::Custom,
        }
    }

    #[inline]
    pub fn eval(&self, t: F) -> F {
        (self.eval)(t)
    }

    pub fn primitive(&self, t: F) -> Option<F> {
        self.primitive.as_ref().map(|g| g(t))
    }

    pub fn has_primitive(&self) -> bool {
        self.primitive.is_some()
    }

    /// Upper bound for `sup_{[a,b]} g'` with `a ≤ b`.
    pub fn lipschitz_on(&self, a: F, b: F) -> F {
        (self.lipschitz)(a, b)
    }

    /// Level truncation `g_n = min{g, n}` used by the reduced-measure ladder.
    pub fn capped(&self, level: F) -> Self {
        let g = Arc::clone(&self.eval);
        let lip = Arc::clone(&self.lipschitz);
        let cut = self.cap_cut(level);
        let eval = move |t: F| g(t).min(level);
        // primitive of min{g, n} for the nondecreasing families, via the cut
        // point c with g(c) = n
        let primitive: Option<RealFn<F>> = match (&self.primitive, cut) {
            (Some(base), Some(c)) => {
                let base = Arc::clone(base);
                Some(Arc::new(move |t: F| {
                    if t > c {
                        base(c) + level * (t - c)
                    } else {
                        base(t)
                    }
                }))
            }
            (Some(base), None) if matches!(self.family, Family::Zero) => Some(Arc::clone(base)),
            _ => None,
        };
        Nonlinearity {
            eval: Arc::new(eval),
            primitive,
            // g_n is flat above the cut, which tightens the local bound
            lipschitz: Arc::new(move |a: F, b: F| match cut {
                Some(c) if a >= c => F::zero(),
                Some(c) => lip(a, b.min(c)),
                None => lip(a, b),
            }),
            sign_condition: self.sign_condition,
            nondecreasing: self.nondecreasing,
            family: Family::Custom,
        }
    }

    /// Smallest `c ≥ 0` with `g(c) = level` for the monotone families.
    fn cap_cut(&self, level: F) -> Option<F> {
        if level < F::zero() {
            return Some(F::zero());
        }
        match self.family {
            Family::Zero => None,
            Family::Linear => Some(level),
            Family::Polynomial(p) => Some(level.powf(F::one() / p)),
            Family::Exponential => Some((F::one() + level).ln()),
            Family::Custom => None,
        }
    }

    /// Carathéodory freeze outside `[lo, hi]`: the sub/supersolution device
    /// `g̃(t) = g(lo)` below, `g(t)` inside, `g(hi)` above.
    pub fn freeze(&self, lo: F, hi: F) -> impl Fn(F) -> F + '_ {
        move |t: F| {
            let t = t.max(lo).min(hi);
            self.eval(t)
        }
    }

    /// Validate the declared flags on a test lattice; checks the sign
    /// condition, monotonicity, and `G' = g` by central differences.
    pub fn validate_on(&self, lattice: &[F], fd_step: F, fd_tol: F) -> Result<()> {
        if self.sign_condition {
            for &t in lattice {
                if self.eval(t) * t < F::zero() {
                    return Err(Error::Precondition(format!(
                        "sign condition fails at t = {t}"
                    )));
                }
            }
        }
        if self.nondecreasing {
            let mut pts: Vec<F> = lattice.to_vec();
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for w in pts.windows(2) {
                if self.eval(w[1]) < self.eval(w[0]) {
                    return Err(Error::Precondition(format!(
                        "monotonicity fails on [{}, {}]",
                        w[0], w[1]
                    )));
                }
            }
        }
        if let Some(prim) = &self.primitive {
            for &t in lattice {
                let fd = (prim(t + fd_step) - prim(t - fd_step)) / (fd_step + fd_step);
                let g = self.eval(t);
                if (fd - g).abs() > fd_tol * (F::one() + g.abs()) {
                    return Err(Error::Precondition(format!(
                        "primitive mismatch at t = {t}: G' = {fd}, g = {g}"
                    )));
                }
            }
        }
        Ok(())
    }
}
