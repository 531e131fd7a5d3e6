//! Uniform finite-difference grids with zero Dirichlet boundary.
//!
//! A [`Domain`] is an axis-aligned box or a centered ball mask sampled on a
//! uniform lattice of spacing `h`. Only interior nodes carry values; every
//! stencil neighbor that falls on or outside the continuum boundary
//! contributes the value `0`. The discrete negative Laplacian is the usual
//! `2·dim + 1` point stencil, which keeps the Green identities exact:
//! `h^dim ⟨-Δu, u⟩` equals the edge-sum Dirichlet energy to machine
//! precision, and the stencil matrix is a symmetric M-matrix.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{fl, fu, Scalar};

/// Geometry of the continuum domain behind the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// The full axis-aligned box spanned by the bounds.
    Box,
    /// The ball inscribed in the (cubical) bounds, centered at the box center.
    Ball,
}

/// Uniform grid over a box or centered-ball domain with zero boundary data.
#[derive(Debug)]
pub struct Domain<F: Scalar> {
    dim: usize,
    lo: [F; 3],
    h: F,
    lines: [usize; 3],
    shape: Shape,
    ball_center: [F; 3],
    ball_radius: F,
    interior: Vec<[usize; 3]>,
    lattice_to_interior: Vec<i64>,
    /// Per interior node, `2*dim` neighbor slots (-x,+x,-y,+y,-z,+z);
    /// `-1` marks a zero-valued boundary/outside neighbor.
    neighbors: Vec<[i64; 6]>,
    boundary_dist: Vec<F>,
}

impl<F: Scalar> Domain<F> {
    /// Box domain with the given per-axis bounds and spacing `h`.
    pub fn new_box(bounds: &[(F, F)], h: F) -> Result<Arc<Self>> {
        Self::build(bounds, h, Shape::Box)
    }

    /// Ball of radius `radius` centered at `center`, masked on its bounding box.
    pub fn new_ball(dim: usize, center: &[F], radius: F, h: F) -> Result<Arc<Self>> {
        if center.len() != dim {
            return Err(Error::Domain("center length must equal dim".into()));
        }
        if radius <= F::zero() {
            return Err(Error::Domain("ball radius must be positive".into()));
        }
        let bounds: Vec<(F, F)> = center.iter().map(|&c| (c - radius, c + radius)).collect();
        Self::build(&bounds, h, Shape::Ball)
    }

    fn build(bounds: &[(F, F)], h: F, shape: Shape) -> Result<Arc<Self>> {
        let dim = bounds.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::Domain(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if !(h > F::zero()) || !h.is_finite() {
            return Err(Error::Domain("grid spacing h must be positive".into()));
        }

        let mut lo = [F::zero(); 3];
        let mut lines = [1usize; 3];
        for (a, &(l, u)) in bounds.iter().enumerate() {
            if !(u > l) {
                return Err(Error::Domain("empty axis interval".into()));
            }
            let span = (u - l) / h;
            let n = span.round();
            if (span - n).abs() > fl::<F>(1e-6) {
                return Err(Error::Domain(
                    "h must divide the axis length to machine accuracy".into(),
                ));
            }
            let n = n
                .to_usize()
                .ok_or_else(|| Error::Domain("axis length overflow".into()))?;
            if n + 1 < 3 {
                return Err(Error::Domain("need at least 3 grid lines per axis".into()));
            }
            lo[a] = l;
            lines[a] = n + 1;
        }

        let mut ball_center = [F::zero(); 3];
        let mut ball_radius = F::zero();
        if shape == Shape::Ball {
            let two = fl::<F>(2.0);
            for a in 0..dim {
                ball_center[a] = lo[a] + fu::<F>(lines[a] - 1) * h / two;
            }
            ball_radius = (bounds[0].1 - bounds[0].0) / two;
            for &(l, u) in bounds.iter().skip(1) {
                let r = (u - l) / two;
                if (r - ball_radius).abs() > fl::<F>(1e-9) * ball_radius {
                    return Err(Error::Domain("ball mask requires cubical bounds".into()));
                }
            }
        }

        let total: usize = lines[..dim].iter().product();
        let mut interior = Vec::new();
        let mut lattice_to_interior = vec![-1i64; total];

        let pos = |idx: &[usize; 3], a: usize| lo[a] + fu::<F>(idx[a]) * h;
        let is_interior = |idx: &[usize; 3]| -> bool {
            for a in 0..dim {
                if idx[a] == 0 || idx[a] == lines[a] - 1 {
                    return false;
                }
            }
            if shape == Shape::Ball {
                let mut d2 = F::zero();
                for a in 0..dim {
                    let d = pos(idx, a) - ball_center[a];
                    d2 = d2 + d * d;
                }
                return d2 < ball_radius * ball_radius;
            }
            true
        };

        let mut idx = [0usize; 3];
        for flat in 0..total {
            let mut rem = flat;
            for a in (0..dim).rev() {
                idx[a] = rem % lines[a];
                rem /= lines[a];
            }
            if is_interior(&idx) {
                lattice_to_interior[flat] = interior.len() as i64;
                interior.push(idx);
            }
        }
        if interior.is_empty() {
            return Err(Error::Domain("domain has no interior node".into()));
        }

        let flat_of = |idx: &[usize; 3]| -> usize {
            let mut f = 0usize;
            for a in 0..dim {
                f = f * lines[a] + idx[a];
            }
            f
        };

        let mut neighbors = vec![[-1i64; 6]; interior.len()];
        for (i, idx) in interior.iter().enumerate() {
            for a in 0..dim {
                let mut minus = *idx;
                minus[a] -= 1;
                neighbors[i][2 * a] = lattice_to_interior[flat_of(&minus)];
                let mut plus = *idx;
                plus[a] += 1;
                neighbors[i][2 * a + 1] = lattice_to_interior[flat_of(&plus)];
            }
        }

        let mut boundary_dist = Vec::with_capacity(interior.len());
        for idx in &interior {
            let d = match shape {
                Shape::Box => {
                    let mut best = F::infinity();
                    for a in 0..dim {
                        let x = pos(idx, a);
                        let l = lo[a];
                        let u = lo[a] + fu::<F>(lines[a] - 1) * h;
                        best = best.min(x - l).min(u - x);
                    }
                    best
                }
                Shape::Ball => {
                    let mut d2 = F::zero();
                    for a in 0..dim {
                        let dx = pos(idx, a) - ball_center[a];
                        d2 = d2 + dx * dx;
                    }
                    ball_radius - d2.sqrt()
                }
            };
            boundary_dist.push(d);
        }

        Ok(Arc::new(Domain {
            dim,
            lo,
            h,
            lines,
            shape,
            ball_center,
            ball_radius,
            interior,
            lattice_to_interior,
            neighbors,
            boundary_dist,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> F {
        self.h
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    /// Volume weight of one node, `h^dim`.
    pub fn cell_volume(&self) -> F {
        self.h.powi(self.dim as i32)
    }

    pub fn bounds(&self) -> Vec<(F, F)> {
        (0..self.dim)
            .map(|a| (self.lo[a], self.lo[a] + fu::<F>(self.lines[a] - 1) * self.h))
            .collect()
    }

    /// Coordinates of interior node `i`.
    pub fn node_pos(&self, i: usize) -> [F; 3] {
        let idx = self.interior[i];
        let mut p = [F::zero(); 3];
        for a in 0..self.dim {
            p[a] = self.lo[a] + fu::<F>(idx[a]) * self.h;
        }
        p
    }

    pub fn node_lattice(&self, i: usize) -> [usize; 3] {
        self.interior[i]
    }

    pub fn neighbor_slots(&self, i: usize) -> &[i64; 6] {
        &self.neighbors[i]
    }

    /// Distance from interior node `i` to the continuum boundary.
    pub fn boundary_distance(&self, i: usize) -> F {
        self.boundary_dist[i]
    }

    /// Inradius of the continuum domain.
    pub fn inradius(&self) -> F {
        match self.shape {
            Shape::Ball => self.ball_radius,
            Shape::Box => {
                let two = fl::<F>(2.0);
                let mut best = F::infinity();
                for a in 0..self.dim {
                    best = best.min(fu::<F>(self.lines[a] - 1) * self.h / two);
                }
                best
            }
        }
    }

    /// True iff `p` lies strictly inside the continuum domain.
    pub fn contains_strict(&self, p: &[F]) -> bool {
        if p.len() < self.dim {
            return false;
        }
        match self.shape {
            Shape::Box => (0..self.dim).all(|a| {
                let u = self.lo[a] + fu::<F>(self.lines[a] - 1) * self.h;
                p[a] > self.lo[a] && p[a] < u
            }),
            Shape::Ball => {
                let mut d2 = F::zero();
                for a in 0..self.dim {
                    let d = p[a] - self.ball_center[a];
                    d2 = d2 + d * d;
                }
                d2 < self.ball_radius * self.ball_radius
            }
        }
    }

    /// Nearest interior node to `p`; equidistant candidates resolve to the
    /// lexicographically smallest lattice index.
    pub fn nearest_interior_node(&self, p: &[F]) -> usize {
        let half = fl::<F>(0.5);
        let mut cand = [0usize; 3];
        for a in 0..self.dim {
            let t = (p[a] - self.lo[a]) / self.h;
            // round half toward the smaller index
            let i = (t - half).ceil();
            let i = i.max(F::zero()).min(fu::<F>(self.lines[a] - 1));
            cand[a] = i.to_usize().unwrap_or(0);
        }
        let mut flat = 0usize;
        for a in 0..self.dim {
            flat = flat * self.lines[a] + cand[a];
        }
        let hit = self.lattice_to_interior[flat];
        if hit >= 0 {
            return hit as usize;
        }
        // masked domains: fall back to a scan in lattice order
        let mut best = 0usize;
        let mut best_d2 = F::infinity();
        for i in 0..self.interior.len() {
            let q = self.node_pos(i);
            let mut d2 = F::zero();
            for a in 0..self.dim {
                let d = q[a] - p[a];
                d2 = d2 + d * d;
            }
            if d2 < best_d2 {
                best_d2 = d2;
                best = i;
            }
        }
        best
    }

    /// Zero grid function on this domain.
    pub fn zeros(self: &Arc<Self>) -> GridFunction<F> {
        GridFunction {
            dom: Arc::clone(self),
            values: vec![F::zero(); self.interior.len()],
        }
    }

    /// Grid function sampled from `f` at node coordinates.
    pub fn sample(self: &Arc<Self>, f: impl Fn(&[F]) -> F) -> GridFunction<F> {
        let values = (0..self.interior.len())
            .map(|i| f(&self.node_pos(i)[..self.dim]))
            .collect();
        GridFunction {
            dom: Arc::clone(self),
            values,
        }
    }

    pub fn from_values(self: &Arc<Self>, values: Vec<F>) -> Result<GridFunction<F>> {
        if values.len() != self.interior.len() {
            return Err(Error::Domain(format!(
                "value array length {} does not match interior node count {}",
                values.len(),
                self.interior.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("grid function values must be finite".into()));
        }
        Ok(GridFunction {
            dom: Arc::clone(self),
            values,
        })
    }
}

impl<F: Scalar> PartialEq for Domain<F> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.shape == other.shape
            && self.h == other.h
            && self.lines == other.lines
            && self.lo[..self.dim] == other.lo[..other.dim]
    }
}

/// ℓ¹/ℓ²/ℓ∞ norms of a grid function (volume-weighted except `linf`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms<F> {
    pub l1: F,
    pub l2: F,
    pub linf: F,
}

/// Real values on the interior nodes of a [`Domain`]; boundary values are
/// structurally zero and never stored.
#[derive(Debug, Clone)]
pub struct GridFunction<F: Scalar> {
    dom: Arc<Domain<F>>,
    values: Vec<F>,
}

impl<F: Scalar> GridFunction<F> {
    pub fn domain(&self) -> &Arc<Domain<F>> {
        &self.dom
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_domain(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.dom, &other.dom) || *self.dom == *other.dom
    }

    /// Negative discrete Laplacian: `(2·dim·u_i − Σ_nb u_j) / h²`.
    pub fn laplacian_apply(&self) -> GridFunction<F> {
        let dom = &self.dom;
        let inv_h2 = F::one() / (dom.h * dom.h);
        let twod = fu::<F>(2 * dom.dim);
        let mut out = vec![F::zero(); self.values.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut nb_sum = F::zero();
            for s in 0..2 * dom.dim {
                let j = dom.neighbors[i][s];
                if j >= 0 {
                    nb_sum = nb_sum + self.values[j as usize];
                }
            }
            *o = (twod * self.values[i] - nb_sum) * inv_h2;
        }
        GridFunction {
            dom: Arc::clone(dom),
            values: out,
        }
    }

    /// Clamp values to `[-κ, κ]`.
    pub fn truncate(&self, kappa: F) -> Result<GridFunction<F>> {
        if kappa < F::zero() || !kappa.is_finite() {
            return Err(Error::InvalidArgument(
                "truncation level must be ≥ 0".into(),
            ));
        }
        Ok(self.map(|v| v.max(-kappa).min(kappa)))
    }

    pub fn norms(&self) -> Norms<F> {
        let vol = self.dom.cell_volume();
        let mut l1 = F::zero();
        let mut l2 = F::zero();
        let mut linf = F::zero();
        for &v in &self.values {
            l1 = l1 + v.abs();
            l2 = l2 + v * v;
            linf = linf.max(v.abs());
        }
        Norms {
            l1: vol * l1,
            l2: (vol * l2).sqrt(),
            linf,
        }
    }

    /// Lebesgue measure of the level set `{|u| > t}`.
    pub fn dist_fn(&self, t: F) -> F {
        let count = self.values.iter().filter(|v| v.abs() > t).count();
        self.dom.cell_volume() * fu::<F>(count)
    }

    /// Volume-weighted inner product `h^dim Σ u_i v_i`.
    pub fn inner(&self, other: &Self) -> F {
        debug_assert!(self.same_domain(other));
        let dot: F = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a * b)
            .sum();
        self.dom.cell_volume() * dot
    }

    /// Visit every stencil edge once with the two endpoint values.
    ///
    /// Interior-interior edges are owned by their lower endpoint; edges to the
    /// zero boundary are visited from the interior side.
    pub fn for_each_edge(&self, mut f: impl FnMut(F, F)) {
        let dom = &self.dom;
        for i in 0..self.values.len() {
            let ui = self.values[i];
            for a in 0..dom.dim {
                let fwd = dom.neighbors[i][2 * a + 1];
                let uj = if fwd >= 0 {
                    self.values[fwd as usize]
                } else {
                    F::zero()
                };
                f(ui, uj);
                if dom.neighbors[i][2 * a] < 0 {
                    f(F::zero(), ui);
                }
            }
        }
    }

    /// Discrete Dirichlet energy `h^{dim-2} Σ_edges (u_i − u_j)²`,
    /// equal to `h^dim ⟨-Δu, u⟩` exactly.
    pub fn dirichlet_energy(&self) -> F {
        let mut sum = F::zero();
        self.for_each_edge(|a, b| {
            let d = a - b;
            sum = sum + d * d;
        });
        sum * self.dom.h.powi(self.dom.dim as i32 - 2)
    }

    /// Discrete gradient norm `‖Du‖_{ℓ^q}` from forward differences:
    /// `(h^dim Σ_edges |u_i − u_j|^q / h^q)^{1/q}`.
    pub fn grad_lq_norm(&self, q: F) -> F {
        let mut sum = F::zero();
        self.for_each_edge(|a, b| {
            sum = sum + (a - b).abs().powf(q);
        });
        (sum * self.dom.h.powi(self.dom.dim as i32) / self.dom.h.powf(q)).powf(F::one() / q)
    }

    /// Measure of `{|Du| > t}` with edge-sampled gradients.
    pub fn grad_dist_fn(&self, t: F) -> F {
        let h = self.dom.h;
        let mut count = 0usize;
        self.for_each_edge(|a, b| {
            if ((a - b) / h).abs() > t {
                count += 1;
            }
        });
        self.dom.cell_volume() * fu::<F>(count)
    }

    /// Volume-weighted sum over the boundary strip `{d(x, ∂Ω) ≤ ε}`.
    pub fn boundary_strip_l1(&self, eps: F) -> F {
        let tol = eps * (F::one() + fl::<F>(1e-12));
        let mut sum = F::zero();
        for (i, &v) in self.values.iter().enumerate() {
            if self.dom.boundary_dist[i] <= tol {
                sum = sum + v.abs();
            }
        }
        self.dom.cell_volume() * sum
    }

    pub fn map(&self, f: impl Fn(F) -> F) -> GridFunction<F> {
        GridFunction {
            dom: Arc::clone(&self.dom),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(F, F) -> F) -> GridFunction<F> {
        debug_assert!(self.same_domain(other));
        GridFunction {
            dom: Arc::clone(&self.dom),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> GridFunction<F> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> GridFunction<F> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: F) -> GridFunction<F> {
        self.map(|v| c * v)
    }

    pub fn positive_part(&self) -> GridFunction<F> {
        self.map(|v| v.max(F::zero()))
    }

    pub fn max_with(&self, other: &Self) -> GridFunction<F> {
        self.zip(other, |a, b| a.max(b))
    }

    pub fn min_value(&self) -> F {
        self.values.iter().fold(F::infinity(), |m, &v| m.min(v))
    }

    pub fn max_value(&self) -> F {
        self.values.iter().fold(F::neg_infinity(), |m, &v| m.max(v))
    }

    /// Nodewise comparison `self ≤ other + tol`.
    pub fn le_nodewise(&self, other: &Self, tol: F) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(&a, &b)| a <= b + tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom_1d(h: f64) -> Arc<Domain<f64>> {
        Domain::new_box(&[(0.0, 1.0)], h).unwrap()
    }

    #[test]
    fn laplacian_zero_is_zero() {
        let d = dom_1d(0.25);
        let u = d.zeros();
        assert!(u.laplacian_apply().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_hand_stencil_1d() {
        // u = (1/8, 1/4, 1/8) on (0,1) with h = 1/4 maps to (0, 4, 0)
        let d = dom_1d(0.25);
        let u = d.from_values(vec![0.125, 0.25, 0.125]).unwrap();
        let f = u.laplacian_apply();
        assert_eq!(f.values(), &[0.0, 4.0, 0.0]);
    }

    #[test]
    fn laplacian_consistency_2d() {
        // -Δ[x(1-x)y(1-y)] = 2[x(1-x) + y(1-y)], O(h²) under refinement
        let mut errs = Vec::new();
        for &n in &[8usize, 16, 32] {
            let h = 1.0 / n as f64;
            let d = Domain::new_box(&[(0.0, 1.0), (0.0, 1.0)], h).unwrap();
            let u = d.sample(|p| p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]));
            let f = u.laplacian_apply();
            let exact = d.sample(|p| 2.0 * (p[0] * (1.0 - p[0]) + p[1] * (1.0 - p[1])));
            let err = f.sub(&exact).norms().linf;
            errs.push(err);
        }
        // The bilinear sample is discretely harmonic up to the mixed term, so
        // the error is already tiny; it must not grow under refinement.
        assert!(errs[2] <= errs[0] * 1.01 + 1e-12);
    }

    #[test]
    fn laplacian_exact_for_quadratic_1d() {
        // u = x(1-x): second difference is exact, -u'' = 2
        let d = dom_1d(0.125);
        let u = d.sample(|p| p[0] * (1.0 - p[0]));
        let f = u.laplacian_apply();
        for &v in f.values() {
            assert!((v - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn truncate_clamps_and_is_idempotent() {
        let d = dom_1d(0.25);
        let u = d.from_values(vec![-2.0, 0.5, 3.0]).unwrap();
        let t = u.truncate(1.0).unwrap();
        assert_eq!(t.values(), &[-1.0, 0.5, 1.0]);
        let tt = t.truncate(1.0).unwrap();
        assert_eq!(tt.values(), t.values());
        assert!(u.truncate(-0.5).is_err());
    }

    #[test]
    fn truncate_zero_of_zero() {
        let d = dom_1d(0.25);
        let z = d.zeros();
        assert!(z.truncate(0.0).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn norms_basics() {
        let d = dom_1d(0.25);
        let z = d.zeros();
        let n = z.norms();
        assert_eq!((n.l1, n.l2, n.linf), (0.0, 0.0, 0.0));

        // indicator of k nodes has measure k·h for t < 1
        let u = d.from_values(vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(u.dist_fn(0.5), 2.0 * 0.25);
        assert_eq!(u.dist_fn(1.0), 0.0);

        // homogeneity
        let v = d.from_values(vec![0.3, -1.2, 0.7]).unwrap();
        let n1 = v.norms();
        let n2 = v.scale(2.0).norms();
        assert!((n2.l1 - 2.0 * n1.l1).abs() < 1e-15);
        assert!((n2.l2 - 2.0 * n1.l2).abs() < 1e-15);
        assert!((n2.linf - 2.0 * n1.linf).abs() < 1e-15);
    }

    #[test]
    fn dist_fn_commutes_with_truncation_below_level() {
        let d = dom_1d(1.0 / 8.0);
        let u = d.sample(|p| (8.0 * p[0]).sin() * 2.0);
        let k = 1.1;
        let t = u.truncate(k).unwrap();
        for &lvl in &[0.0, 0.3, 0.6, 0.9, 1.0999] {
            assert_eq!(u.dist_fn(lvl), t.dist_fn(lvl));
        }
    }

    #[test]
    fn integration_by_parts_identity() {
        for (dom, name) in [
            (
                Domain::<f64>::new_box(&[(0.0, 1.0), (0.0, 2.0)], 0.125).unwrap(),
                "box2",
            ),
            (
                Domain::new_ball(2, &[0.0, 0.0], 1.0, 0.125).unwrap(),
                "ball2",
            ),
            (Domain::new_box(&[(0.0, 1.0)], 0.0625).unwrap(), "box1"),
        ] {
            let u = dom.sample(|p| (3.1 * p[0]).sin() + p.get(1).map(|y| y * y).unwrap_or(0.0));
            let lhs = u.laplacian_apply().inner(&u);
            let rhs = u.dirichlet_energy();
            assert!(
                (lhs - rhs).abs() <= 1e-11 * (1.0 + rhs.abs()),
                "{name}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn spd_bilinear_form() {
        let d = Domain::<f64>::new_box(&[(0.0, 1.0), (0.0, 1.0)], 0.25).unwrap();
        let u = d.sample(|p| p[0] - 0.3 * p[1]);
        let v = d.sample(|p| p[0] * p[1] - 0.1);
        let a = u.laplacian_apply().inner(&v);
        let b = v.laplacian_apply().inner(&u);
        assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        assert!(u.laplacian_apply().inner(&u) > 0.0);
    }

    #[test]
    fn ball_mask_symmetric() {
        let d = Domain::<f64>::new_ball(2, &[0.0, 0.0], 1.0, 0.25).unwrap();
        // center node exists
        let c = d.nearest_interior_node(&[0.0, 0.0]);
        let p = d.node_pos(c);
        assert!(p[0].abs() < 1e-12 && p[1].abs() < 1e-12);
        // all interior nodes strictly inside
        for i in 0..d.interior_count() {
            let p = d.node_pos(i);
            assert!(p[0] * p[0] + p[1] * p[1] < 1.0);
            assert!(d.boundary_distance(i) > 0.0);
        }
    }

    #[test]
    fn nearest_node_tie_breaks_low() {
        let d = dom_1d(0.25);
        // 0.375 is equidistant between nodes 0.25 and 0.5 -> pick 0.25
        let i = d.nearest_interior_node(&[0.375]);
        assert!((d.node_pos(i)[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn domain_too_small_rejected() {
        assert!(Domain::new_box(&[(0.0f64, 1.0)], 0.6).is_err());
        assert!(Domain::new_box(&[(0.0f64, 1.0)], 0.5).is_ok());
    }

    #[test]
    fn f32_instantiation_works() {
        let d = Domain::<f32>::new_box(&[(0.0, 1.0)], 0.25).unwrap();
        let u = d.from_values(vec![0.125, 0.25, 0.125]).unwrap();
        let f = u.laplacian_apply();
        assert!((f.values()[1] - 4.0).abs() < 1e-4);
    }
}
