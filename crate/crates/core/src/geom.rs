//! Hausdorff outer measures on finite point sets, Frostman density checks,
//! the greedy measure decomposition, strong approximation, Newtonian
//! potentials in radial form, and the one-dimensional logarithmic estimate
//! behind the exponential existence theory.
//!
//! Covers use closed balls `B(x; r)` with radii `r ≤ δ` and value
//! `Σ ω_s r^s`. Exact mode enumerates minimal enclosing balls of subsets and
//! solves the weighted set cover by dynamic programming over bitmasks, which
//! is optimal because shrinking a cover ball onto the points it is
//! responsible for never increases its radius.

use crate::error::{Error, Result};
use crate::scalar::{fl, fu, gamma, Scalar};

/// `ω_s = π^{s/2} / Γ(s/2 + 1)`: the volume of the unit ball of dimension
/// `s` when `s` is an integer (`ω_0 = 1`, `ω_1 = 2`, `ω_2 = π`, `ω_3 = 4π/3`).
pub fn omega<F: Scalar>(s: F) -> Result<F> {
    if s < F::zero() {
        return Err(Error::InvalidArgument("omega requires s ≥ 0".into()));
    }
    if s == F::zero() {
        // counting measure; keep it exact rather than 1/Γ(1) with Lanczos noise
        return Ok(F::one());
    }
    let half = fl::<F>(0.5);
    Ok(F::PI().powf(s * half) / gamma(s * half + F::one()))
}

/// Finite nonnegative point measure in ambient dimension `dim`.
#[derive(Debug, Clone)]
pub struct PointMeasure<F: Scalar> {
    points: Vec<[F; 3]>,
    weights: Vec<F>,
    dim: usize,
}

impl<F: Scalar> PointMeasure<F> {
    pub fn new(dim: usize, points: Vec<[F; 3]>, weights: Vec<F>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidArgument("ambient dim must be 1..=3".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidArgument(
                "points/weights length mismatch".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= F::zero()) || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "weights must be finite and ≥ 0".into(),
            ));
        }
        Ok(PointMeasure {
            points,
            weights,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[[F; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn total_mass(&self) -> F {
        self.weights.iter().copied().sum()
    }

    /// Mass of the atoms selected by `mask`.
    pub fn mass(&self, mask: u64) -> F {
        let mut s = F::zero();
        for i in 0..self.len() {
            if mask & (1 << i) != 0 {
                s = s + self.weights[i];
            }
        }
        s
    }

    /// Restriction to the atoms in `mask`.
    pub fn restrict(&self, mask: u64) -> PointMeasure<F> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for i in 0..self.len() {
            if mask & (1 << i) != 0 {
                points.push(self.points[i]);
                weights.push(self.weights[i]);
            }
        }
        PointMeasure {
            points,
            weights,
            dim: self.dim,
        }
    }

    pub fn diameter(&self) -> F {
        let mut d = F::zero();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                d = d.max(dist(&self.points[i], &self.points[j]));
            }
        }
        d
    }

    /// Smallest pairwise distance between distinct points (∞ for ≤ 1 point).
    pub fn min_gap(&self) -> F {
        let mut g = F::infinity();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let d = dist(&self.points[i], &self.points[j]);
                if d > F::zero() {
                    g = g.min(d);
                }
            }
        }
        g
    }
}

fn dist<F: Scalar>(a: &[F; 3], b: &[F; 3]) -> F {
    let mut s = F::zero();
    for k in 0..3 {
        let d = a[k] - b[k];
        s = s + d * d;
    }
    s.sqrt()
}

/// Minimal enclosing ball of at most 3 boundary points (exact small cases).
fn ball_from_support<F: Scalar>(support: &[[F; 3]]) -> ([F; 3], F) {
    match support.len() {
        0 => ([F::zero(); 3], -F::one()),
        1 => (support[0], F::zero()),
        2 => {
            let half = fl::<F>(0.5);
            let mut c = [F::zero(); 3];
            for k in 0..3 {
                c[k] = (support[0][k] + support[1][k]) * half;
            }
            (c, dist(&support[0], &support[1]) * half)
        }
        _ => circumball3(&support[0], &support[1], &support[2]),
    }
}

/// Circumcenter of a (nondegenerate) triangle in its own plane.
fn circumball3<F: Scalar>(a: &[F; 3], b: &[F; 3], c: &[F; 3]) -> ([F; 3], F) {
    let mut ab = [F::zero(); 3];
    let mut ac = [F::zero(); 3];
    for k in 0..3 {
        ab[k] = b[k] - a[k];
        ac[k] = c[k] - a[k];
    }
    let d11: F = (0..3).map(|k| ab[k] * ab[k]).sum();
    let d22: F = (0..3).map(|k| ac[k] * ac[k]).sum();
    let d12: F = (0..3).map(|k| ab[k] * ac[k]).sum();
    let det = d11 * d22 - d12 * d12;
    if det.abs() <= fl::<F>(1e-14) * (d11 * d22 + F::one()) {
        // collinear: span of the two farthest points
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs
            .iter()
            .max_by(|x, y| dist(x.0, x.1).partial_cmp(&dist(y.0, y.1)).unwrap())
            .copied()
            .unwrap();
        return ball_from_support(&[*p, *q]);
    }
    let half = fl::<F>(0.5);
    let lam = half * d22 * (d11 - d12) / det;
    let mus = half * d11 * (d22 - d12) / det;
    let mut center = [F::zero(); 3];
    for k in 0..3 {
        center[k] = a[k] + lam * ab[k] + mus * ac[k];
    }
    let r = dist(&center, a).max(dist(&center, b)).max(dist(&center, c));
    (center, r)
}

/// Welzl's minimal enclosing ball (deterministic order; fine for ≤ 16 pts).
pub fn min_enclosing_ball<F: Scalar>(points: &[[F; 3]]) -> ([F; 3], F) {
    fn welzl<F: Scalar>(pts: &[[F; 3]], support: &mut Vec<[F; 3]>) -> ([F; 3], F) {
        if pts.is_empty() || support.len() == 3 {
            return ball_from_support(support);
        }
        let p = pts[0];
        let (c, r) = welzl(&pts[1..], support);
        if r >= F::zero() && dist(&c, &p) <= r * (F::one() + fl::<F>(1e-12)) + fl::<F>(1e-300) {
            return (c, r);
        }
        support.push(p);
        let res = welzl(&pts[1..], support);
        support.pop();
        res
    }
    if points.is_empty() {
        return ([F::zero(); 3], F::zero());
    }
    let mut support = Vec::new();
    let (c, _) = welzl(points, &mut support);
    // tighten: radius is the max distance to the input points
    let rr = points.iter().map(|p| dist(&c, p)).fold(F::zero(), F::max);
    (c, rr)
}

/// A ball cover with its `Σ ω_s r^s` value.
#[derive(Debug, Clone)]
pub struct Cover<F> {
    pub balls: Vec<([F; 3], F)>,
    pub value: F,
}

impl<F: Scalar> Cover<F> {
    /// Every target point lies in some ball (with a relative fp slack).
    pub fn covers(&self, points: &[[F; 3]]) -> bool {
        points.iter().all(|p| {
            self.balls
                .iter()
                .any(|(c, r)| dist(c, p) <= *r * (F::one() + fl::<F>(1e-9)) + fl::<F>(1e-12))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverMode {
    Exact,
    Greedy,
}

/// Exact-mode size bound.
pub const EXACT_MAX_POINTS: usize = 12;

/// Candidate balls: minimal enclosing balls of all subsets, deduplicated by
/// covered set. Returns `(coverage mask, center, radius, cost)` tuples.
fn candidate_balls<F: Scalar>(points: &[[F; 3]], s: F, delta: F) -> Vec<(u64, [F; 3], F, F)> {
    let n = points.len();
    let slack = F::one() + fl::<F>(1e-12);
    let mut best: std::collections::BTreeMap<u64, ([F; 3], F, F)> = Default::default();
    let mut subset_pts = Vec::with_capacity(n);
    for mask in 1u64..(1 << n) {
        subset_pts.clear();
        for (i, p) in points.iter().enumerate() {
            if mask & (1 << i) != 0 {
                subset_pts.push(*p);
            }
        }
        let (c, r) = min_enclosing_ball(&subset_pts);
        if r > delta * slack {
            continue;
        }
        let mut coverage = 0u64;
        for (i, p) in points.iter().enumerate() {
            if dist(&c, p) <= r * slack + fl::<F>(1e-300) {
                coverage |= 1 << i;
            }
        }
        let cost = ball_value(s, r);
        match best.get(&coverage) {
            Some(&(_, _, old)) if old <= cost => {}
            _ => {
                best.insert(coverage, (c, r, cost));
            }
        }
    }
    best.into_iter()
        .map(|(m, (c, r, cost))| (m, c, r, cost))
        .collect()
}

/// `ω_s r^s` with the counting convention `0^0 = 1`.
fn ball_value<F: Scalar>(s: F, r: F) -> F {
    let w = omega::<F>(s).expect("s ≥ 0");
    if s == F::zero() {
        w
    } else {
        w * r.powf(s)
    }
}

/// Optimal cover values of *every* subset of `points` at once:
/// `dp[mask] = H^s_δ(points selected by mask)`.
pub struct SubsetHausdorff<F> {
    dp: Vec<F>,
    choice: Vec<usize>,
    cands: Vec<(u64, [F; 3], F, F)>,
}

impl<F: Scalar> SubsetHausdorff<F> {
    pub fn build(points: &[[F; 3]], s: F, delta: F) -> Result<Self> {
        let n = points.len();
        if n > EXACT_MAX_POINTS {
            return Err(Error::Unsupported(format!(
                "exact mode supports at most {EXACT_MAX_POINTS} points, got {n}"
            )));
        }
        let cands = candidate_balls(points, s, delta);
        let size = 1usize << n;
        let mut dp = vec![F::infinity(); size];
        let mut choice = vec![usize::MAX; size];
        dp[0] = F::zero();
        for mask in 1..size {
            let low = mask.trailing_zeros();
            for (ci, &(cov, _, _, cost)) in cands.iter().enumerate() {
                if cov & (1 << low) != 0 {
                    let rest = mask & !(cov as usize);
                    let v = dp[rest] + cost;
                    if v < dp[mask] {
                        dp[mask] = v;
                        choice[mask] = ci;
                    }
                }
            }
        }
        Ok(SubsetHausdorff { dp, choice, cands })
    }

    pub fn value(&self, mask: u64) -> F {
        self.dp[mask as usize]
    }

    /// Reconstruct an optimal cover of `mask`.
    pub fn cover(&self, mask: u64) -> Cover<F> {
        let mut balls = Vec::new();
        let mut m = mask as usize;
        let mut value = F::zero();
        while m != 0 {
            let ci = self.choice[m];
            let (cov, c, r, cost) = self.cands[ci];
            balls.push((c, r));
            value = value + cost;
            m &= !(cov as usize);
        }
        Cover { balls, value }
    }
}

/// Targets for [`hausdorff_outer`].
pub enum HausdorffTarget<'a, F: Scalar> {
    Points(&'a [[F; 3]]),
    Ball { center: [F; 3], radius: F },
}

/// Hausdorff outer measure `H^s_δ` of a finite point set or a single ball.
///
/// Exact mode is a branch-free optimal set cover (≤ 12 points); greedy mode
/// repeatedly takes the candidate ball covering the most uncovered points
/// (ties: smaller radius, then generation order) and is an upper bound for
/// the exact value.
pub fn hausdorff_outer<F: Scalar>(
    target: &HausdorffTarget<F>,
    ambient_dim: usize,
    s: F,
    delta: F,
    mode: CoverMode,
) -> Result<(F, Cover<F>)> {
    if s < F::zero() {
        return Err(Error::InvalidArgument("s must be ≥ 0".into()));
    }
    match target {
        HausdorffTarget::Ball { center, radius } => {
            if *radius > delta {
                return Err(Error::Unsupported("ball value requires radius ≤ δ".into()));
            }
            let nf = fu::<F>(ambient_dim);
            let value = if s > nf {
                F::zero()
            } else {
                ball_value(s, *radius)
            };
            Ok((
                value,
                Cover {
                    balls: vec![(*center, *radius)],
                    value,
                },
            ))
        }
        HausdorffTarget::Points(pts) => {
            if pts.is_empty() {
                return Ok((
                    F::zero(),
                    Cover {
                        balls: Vec::new(),
                        value: F::zero(),
                    },
                ));
            }
            match mode {
                CoverMode::Exact => {
                    let sh = SubsetHausdorff::build(pts, s, delta)?;
                    let full = (1u64 << pts.len()) - 1;
                    Ok((sh.value(full), sh.cover(full)))
                }
                CoverMode::Greedy => greedy_cover(pts, ambient_dim, s, delta),
            }
        }
    }
}

/// Greedy covering: candidate centers are the points, pairwise midpoints and
/// (in 2D) three-point circumcenters; each step takes the ball covering the
/// most uncovered points within radius ≤ δ.
fn greedy_cover<F: Scalar>(
    points: &[[F; 3]],
    ambient_dim: usize,
    s: F,
    delta: F,
) -> Result<(F, Cover<F>)> {
    let n = points.len();
    let mut centers: Vec<[F; 3]> = points.to_vec();
    let half = fl::<F>(0.5);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut c = [F::zero(); 3];
            for k in 0..3 {
                c[k] = (points[i][k] + points[j][k]) * half;
            }
            centers.push(c);
        }
    }
    if ambient_dim == 2 {
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let (c, _) = circumball3(&points[i], &points[j], &points[k]);
                    centers.push(c);
                }
            }
        }
    }

    let mut uncovered: Vec<bool> = vec![true; n];
    let mut remaining = n;
    let mut balls = Vec::new();
    let mut value = F::zero();
    while remaining > 0 {
        // best candidate: most uncovered points, then smallest radius
        let mut best: Option<(usize, F, usize)> = None; // (count, radius, center idx)
        for (ci, c) in centers.iter().enumerate() {
            let mut count = 0usize;
            let mut radius = F::zero();
            for (i, p) in points.iter().enumerate() {
                if uncovered[i] {
                    let d = dist(c, p);
                    if d <= delta {
                        count += 1;
                        radius = radius.max(d);
                    }
                }
            }
            if count == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bc, br, _)) => count > bc || (count == bc && radius < br),
            };
            if better {
                best = Some((count, radius, ci));
            }
        }
        let (_, radius, ci) =
            best.ok_or_else(|| Error::InvalidArgument("δ too small to cover a point".into()))?;
        let c = centers[ci];
        for (i, p) in points.iter().enumerate() {
            if uncovered[i] && dist(&c, p) <= delta {
                uncovered[i] = false;
                remaining -= 1;
            }
        }
        value = value + ball_value(s, radius);
        balls.push((c, radius));
    }
    Ok((value, Cover { balls, value }))
}

/// Frostman density check: `ν(B(x;r)) ≤ α ω_s r^s` for every ball with
/// `r ≤ δ`. Exact for ≤ 16 atoms via subset minimal enclosing balls
/// (the worst ball for a covered set is that set's minimal enclosing ball).
pub fn frostman_check<F: Scalar>(nu: &PointMeasure<F>, alpha: F, s: F, delta: F) -> Result<bool> {
    if !(delta > F::zero()) {
        return Err(Error::InvalidArgument("δ must be positive".into()));
    }
    let n = nu.len();
    if n == 0 {
        return Ok(true);
    }
    if n > 16 {
        return Err(Error::Unsupported(
            "frostman_check enumerates subsets; at most 16 atoms".into(),
        ));
    }
    let slack = F::one() + fl::<F>(1e-12);
    let mut subset = Vec::with_capacity(n);
    for mask in 1u64..(1 << n) {
        subset.clear();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                subset.push(nu.points()[i]);
            }
        }
        let (_, r) = min_enclosing_ball(&subset);
        if r > delta {
            continue;
        }
        if nu.mass(mask) > alpha * ball_value(s, r) * slack + fl::<F>(1e-300) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive oracle: `ν(B) ≤ α·H^s_δ(B)` over all subsets `B` of the
/// support, with `H^s_δ` in exact mode.
pub fn frostman_exhaustive_oracle<F: Scalar>(
    nu: &PointMeasure<F>,
    alpha: F,
    s: F,
    delta: F,
) -> Result<bool> {
    let n = nu.len();
    if n == 0 {
        return Ok(true);
    }
    let sh = SubsetHausdorff::build(nu.points(), s, delta)?;
    let slack = F::one() + fl::<F>(1e-12);
    for mask in 1u64..(1 << n) {
        if nu.mass(mask) > alpha * sh.value(mask) * slack + fl::<F>(1e-300) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy decomposition against an outer-measure oracle `T` on subset masks:
/// returns the kept set `E` with `μ⌊_E ≤ T` and `T(supp∖E) ≤ μ(supp∖E)`,
/// removing violating sets `F` with `μ(F) ≥ θ·sup` per round.
pub fn greedy_decompose<F: Scalar>(
    mu: &PointMeasure<F>,
    t: &mut dyn FnMut(u64) -> F,
    theta: F,
) -> Result<u64> {
    if !(theta > F::zero() && theta < F::one()) {
        return Err(Error::InvalidArgument("θ must lie in (0,1)".into()));
    }
    let n = mu.len();
    if n > 16 {
        return Err(Error::Unsupported("at most 16 atoms".into()));
    }
    let full: u64 = (1 << n) - 1;

    // memoize the oracle so the post-run consistency audit sees every value
    let mut memo: std::collections::BTreeMap<u64, F> = Default::default();
    let remaining = {
        let mut memoized = |mask: u64| -> F { *memo.entry(mask).or_insert_with(|| t(mask)) };
        decompose_on_pool(mu, &mut memoized, theta, full)?
    };

    // opportunistic monotonicity audit over the memoized evaluations
    let entries: Vec<(u64, F)> = memo.iter().map(|(&k, &v)| (k, v)).collect();
    for &(_, va) in &entries {
        if !(va >= F::zero()) {
            return Err(Error::OracleInconsistent("negative value".into()));
        }
    }
    for (i, &(a, va)) in entries.iter().enumerate() {
        for &(b, vb) in entries.iter().skip(i + 1) {
            if a & b == a && va > vb + fl::<F>(1e-12) * (F::one() + vb.abs()) {
                return Err(Error::OracleInconsistent(format!(
                    "T({a:b}) > T({b:b}) despite inclusion"
                )));
            }
            if b & a == b && vb > va + fl::<F>(1e-12) * (F::one() + va.abs()) {
                return Err(Error::OracleInconsistent(format!(
                    "T({b:b}) > T({a:b}) despite inclusion"
                )));
            }
        }
    }

    Ok(remaining)
}

/// Exhaustive verification of both decomposition postconditions.
pub fn verify_decomposition<F: Scalar>(
    mu: &PointMeasure<F>,
    t: &mut dyn FnMut(u64) -> F,
    kept: u64,
) -> bool {
    let n = mu.len();
    let full: u64 = (1 << n) - 1;
    // μ⌊_E ≤ T on every subset of E
    let mut sub = kept;
    loop {
        if sub != 0 {
            let slack = fl::<F>(1e-12) * (F::one() + mu.mass(sub));
            if mu.mass(sub) > t(sub) + slack {
                return false;
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & kept;
    }
    // T(supp∖E) ≤ μ(supp∖E)
    let removed = full & !kept;
    if removed != 0 {
        let slack = fl::<F>(1e-12) * (F::one() + mu.mass(removed));
        if t(removed) > mu.mass(removed) + slack {
            return false;
        }
    }
    true
}

/// Result of the strong approximation: kept atoms and the density scale δ.
#[derive(Debug, Clone, Copy)]
pub struct StrongApprox<F> {
    pub kept: u64,
    pub delta: F,
    /// whether `μ ≤ α H^s` held at the support scale; when it does, the
    /// ε-target is guaranteed reachable, otherwise the violating mass ends
    /// up in the removed part
    pub pre_holds: bool,
}

/// Strong approximation `μ⌊_E ≤ β H^s_δ` (β > α) with `μ(supp∖E) ≤ ε`,
/// built by iterating the greedy decomposition along a shrinking δ-ladder
/// and the metric-additivity separation step (pieces a gap > 2δ̲ apart are
/// additive).
pub fn strong_approx<F: Scalar>(
    mu: &PointMeasure<F>,
    alpha: F,
    s: F,
    eps: F,
    beta: F,
    budget: usize,
) -> Result<StrongApprox<F>> {
    if !(beta > alpha) {
        return Err(Error::InvalidArgument("need β > α".into()));
    }
    let n = mu.len();
    if n == 0 {
        return Ok(StrongApprox {
            kept: 0,
            delta: F::one(),
            pre_holds: true,
        });
    }
    if n > EXACT_MAX_POINTS {
        return Err(Error::Unsupported("at most 12 atoms".into()));
    }
    // density bound at the support scale (advisory: a violation only means
    // the removed mass may exceed ε, reported through NoConvergence)
    let support_delta = {
        let g = mu.min_gap();
        if g.is_finite() {
            g * fl::<F>(0.5) * (F::one() - fl::<F>(1e-9))
        } else {
            mu.diameter().max(F::one())
        }
    };
    let pre_holds = frostman_check(mu, alpha, s, support_delta)?;
    let full: u64 = (1 << n) - 1;
    let theta = fl::<F>(0.5);
    let d0 = mu.diameter().max(fl::<F>(1e-6)) * fl::<F>(2.0);

    let mut kept: u64 = 0;
    let mut pieces: Vec<(u64, F)> = Vec::new();
    let mut delta_n = d0;
    for _ in 0..budget {
        let pool = full & !kept;
        if pool == 0 {
            break;
        }
        // oracle: β·H^s_{δ_n} of subsets, via one DP over the full point set
        let sh = SubsetHausdorff::build(mu.points(), s, delta_n)?;
        let pool_mu = mu.clone();
        // greedy_decompose works on masks relative to the full index set;
        // restrict by intersecting candidate masks with the pool
        let kept_now = {
            let mut t = |mask: u64| beta * sh.value(mask);
            decompose_on_pool(&pool_mu, &mut t, theta, pool)?
        };
        if kept_now != 0 {
            pieces.push((kept_now, delta_n));
            kept |= kept_now;
        }
        if mu.mass(full & !kept) <= eps {
            // separation: δ̲ below half the minimal inter-piece gap and below
            // every piece's own δ
            let mut dl = pieces.iter().map(|&(_, d)| d).fold(d0, F::min);
            let gap = inter_piece_gap(mu, &pieces);
            if gap.is_finite() {
                dl = dl.min(gap * fl::<F>(0.499));
            }
            // self-verify the Frostman bound on the kept part
            let kept_mu = mu.restrict(kept);
            for _ in 0..8 {
                if kept == 0 || frostman_check(&kept_mu, beta, s, dl)? {
                    return Ok(StrongApprox {
                        kept,
                        delta: dl,
                        pre_holds,
                    });
                }
                dl = dl * fl::<F>(0.5);
            }
            return Err(Error::Precondition(
                "kept set fails its own density bound".into(),
            ));
        }
        delta_n = delta_n * fl::<F>(0.5);
    }
    Err(Error::NoConvergence {
        iterations: budget,
        residual: mu.mass(full & !kept).to_f64().unwrap_or(f64::NAN),
    })
}

/// Greedy decomposition restricted to a pool of atoms.
fn decompose_on_pool<F: Scalar>(
    mu: &PointMeasure<F>,
    t: &mut dyn FnMut(u64) -> F,
    theta: F,
    pool: u64,
) -> Result<u64> {
    let mut remaining = pool;
    loop {
        let mut eps = F::zero();
        let mut sub = remaining;
        loop {
            if sub != 0 && t(sub) <= mu.mass(sub) {
                eps = eps.max(mu.mass(sub));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & remaining;
        }
        if eps == F::zero() {
            break;
        }
        let mut picked = 0u64;
        let mut m = 1u64;
        while m <= remaining {
            if m & remaining == m && m != 0 && t(m) <= mu.mass(m) && mu.mass(m) >= theta * eps {
                picked = m;
                break;
            }
            m += 1;
        }
        if picked == 0 {
            break;
        }
        remaining &= !picked;
        if remaining == 0 {
            break;
        }
    }
    Ok(remaining)
}

fn inter_piece_gap<F: Scalar>(mu: &PointMeasure<F>, pieces: &[(u64, F)]) -> F {
    let mut gap = F::infinity();
    for (i, &(a, _)) in pieces.iter().enumerate() {
        for &(b, _) in pieces.iter().skip(i + 1) {
            for pi in 0..mu.len() {
                if a & (1 << pi) == 0 {
                    continue;
                }
                for pj in 0..mu.len() {
                    if b & (1 << pj) == 0 {
                        continue;
                    }
                    gap = gap.min(dist(&mu.points()[pi], &mu.points()[pj]));
                }
            }
        }
    }
    gap
}

/// Newtonian potential of a point measure via the closed-form kernel.
///
/// `N ≥ 3`: `v(x) = (1/(N(N−2)ω_N)) Σ w (1/|x−a|^{N−2} − 1/d^{N−2})`;
/// `N = 2`: `v(x) = (1/2π) Σ w log(d/|x−a|)`.
pub fn kernel_potential<F: Scalar>(mu: &PointMeasure<F>, x: &[F; 3], d: F, n: usize) -> Result<F> {
    potential_common(mu, x, d, n)?;
    let nf = fu::<F>(n);
    let mut v = F::zero();
    if n == 2 {
        let c = F::one() / (fl::<F>(2.0) * F::PI());
        for (p, &w) in mu.points().iter().zip(mu.weights()) {
            v = v + w * c * (d / dist(p, x)).ln();
        }
    } else {
        let wn = omega::<F>(nf)?;
        let c = F::one() / (nf * (nf - fl::<F>(2.0)) * wn);
        let dm = d.powf(nf - fl::<F>(2.0));
        for (p, &w) in mu.points().iter().zip(mu.weights()) {
            let r = dist(p, x);
            v = v + w * c * (F::one() / r.powf(nf - fl::<F>(2.0)) - F::one() / dm);
        }
    }
    Ok(v)
}

/// The same potential in radial form
/// `v(x) = (1/(N ω_N)) ∫₀^d μ(B(x;r)) / r^{N−1} dr`, integrated exactly on
/// the pieces between the sorted atom distances.
pub fn radial_potential<F: Scalar>(mu: &PointMeasure<F>, x: &[F; 3], d: F, n: usize) -> Result<F> {
    potential_common(mu, x, d, n)?;
    let nf = fu::<F>(n);
    let wn = omega::<F>(nf)?;
    let mut dists: Vec<(F, F)> = mu
        .points()
        .iter()
        .zip(mu.weights())
        .map(|(p, &w)| (dist(p, x), w))
        .collect();
    dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut v = F::zero();
    let mut mass = F::zero();
    let mut idx = 0usize;
    let mut r_prev = F::zero();
    // breakpoints at atom distances; μ(B(x;r)) is constant between them
    while idx <= dists.len() {
        let r_next = if idx < dists.len() { dists[idx].0 } else { d };
        let r_next = r_next.min(d);
        if mass > F::zero() && r_next > r_prev {
            v = v + mass * segment_integral(r_prev, r_next, nf);
        }
        if idx < dists.len() {
            mass = mass + dists[idx].1;
            r_prev = dists[idx].0;
        }
        idx += 1;
        if r_prev >= d {
            break;
        }
    }
    Ok(v / (nf * wn))
}

/// `∫_a^b r^{1−N} dr` for `a > 0`.
fn segment_integral<F: Scalar>(a: F, b: F, nf: F) -> F {
    let two = fl::<F>(2.0);
    if nf == two {
        (b / a).ln()
    } else {
        let e = two - nf;
        (b.powf(e) - a.powf(e)) / e
    }
}

fn potential_common<F: Scalar>(mu: &PointMeasure<F>, x: &[F; 3], d: F, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Unsupported("potentials need N ≥ 2".into()));
    }
    let mut maxd = F::zero();
    for p in mu.points() {
        let r = dist(p, x);
        if r == F::zero() {
            return Err(Error::InvalidArgument(
                "potential is infinite on an atom".into(),
            ));
        }
        maxd = maxd.max(r);
    }
    if d < maxd {
        return Err(Error::Precondition(
            "d must dominate every atom distance".into(),
        ));
    }
    Ok(())
}

/// Piecewise power function `f(r) = c_k · r^{p_k}` on `[a_k, a_{k+1})`.
#[derive(Debug, Clone)]
pub struct PowerStepFn<F> {
    /// `(start, coefficient, power)` pieces with increasing starts; the last
    /// piece ends at `d`
    pub pieces: Vec<(F, F, F)>,
    pub d: F,
}

impl<F: Scalar> PowerStepFn<F> {
    /// Value at `r` (right-continuous).
    pub fn eval(&self, r: F) -> F {
        let mut v = F::zero();
        for &(a, c, p) in &self.pieces {
            if r >= a {
                v = c * r.powf(p);
            }
        }
        v
    }

    fn piece_bounds(&self) -> Vec<(F, F, F, F)> {
        let mut out = Vec::new();
        for (k, &(a, c, p)) in self.pieces.iter().enumerate() {
            let b = self.pieces.get(k + 1).map(|&(x, _, _)| x).unwrap_or(self.d);
            out.push((a, b, c, p));
        }
        out
    }

    /// Nondecreasing on `[0, d]` (within a relative tolerance at the seams).
    pub fn is_nondecreasing(&self) -> bool {
        let tol = fl::<F>(1e-12);
        let mut prev_end = F::zero();
        for (a, b, c, p) in self.piece_bounds() {
            if c < F::zero() || (p < F::zero() && c > F::zero()) {
                return false;
            }
            let start_val = if a == F::zero() {
                if p == F::zero() {
                    c
                } else {
                    F::zero()
                }
            } else {
                c * a.powf(p)
            };
            if start_val + tol * (F::one() + start_val.abs()) < prev_end {
                return false;
            }
            prev_end = if b == F::zero() {
                start_val
            } else {
                c * b.powf(p)
            };
        }
        true
    }

    /// `0 ≤ f(r) ≤ α r^s` on `[0, d]`; power monotonicity makes endpoint
    /// checks sufficient.
    pub fn bounded_by(&self, alpha: F, s: F) -> bool {
        let slack = F::one() + fl::<F>(1e-12);
        for (a, b, c, p) in self.piece_bounds() {
            if c < F::zero() {
                return false;
            }
            if c == F::zero() {
                continue;
            }
            if a == F::zero() && p < s {
                return false; // c·r^p / r^s → ∞ as r → 0
            }
            for r in [a, b] {
                if r > F::zero() && c * r.powf(p) > alpha * r.powf(s) * slack {
                    return false;
                }
            }
        }
        true
    }

    /// Exact `∫₀^d f(r) · r^{-e-1} dr` for the piecewise powers.
    pub fn weighted_integral(&self, e: F) -> F {
        let mut total = F::zero();
        for (a, b, c, p) in self.piece_bounds() {
            if c == F::zero() || b <= a {
                continue;
            }
            let q = p - e;
            let seg = if q == F::zero() {
                if a == F::zero() {
                    return F::infinity();
                }
                (b / a).ln()
            } else if a == F::zero() {
                if q < F::zero() {
                    return F::infinity();
                }
                b.powf(q) / q
            } else {
                (b.powf(q) - a.powf(q)) / q
            };
            total = total + c * seg;
        }
        total
    }
}

/// Outcome of the 1D logarithmic estimate.
#[derive(Debug, Clone, Copy)]
pub struct LogMomentCheck<F> {
    pub lhs: F,
    pub rhs: F,
    pub pass: bool,
}

/// The 1D estimate behind the higher-dimensional exponential bound:
/// for nondecreasing `0 ≤ f(r) ≤ α r^s` on `[0,d]`,
/// `∫₀^d f/r^{s+1} ≤ log(1 + C d^α ∫₀^d f/r^{s+1+α})`
/// with `C = s·d^s/f(d) + 1` (the `d = 1` constant `s/f(1) + 1` rescaled).
pub fn log_moment_check_1d<F: Scalar>(
    f: &PowerStepFn<F>,
    alpha: F,
    s: F,
) -> Result<LogMomentCheck<F>> {
    if !(alpha >= F::zero()) || !(s >= F::zero()) || !(f.d > F::zero()) {
        return Err(Error::InvalidArgument("need α ≥ 0, s ≥ 0, d > 0".into()));
    }
    let starts_ok = f.pieces.first().map_or(false, |&(a, _, _)| a == F::zero())
        && f.pieces.windows(2).all(|w| w[1].0 > w[0].0)
        && f.pieces.last().map_or(false, |&(a, _, _)| a < f.d);
    if !starts_ok {
        return Err(Error::InvalidArgument(
            "pieces must start at 0 with increasing starts below d".into(),
        ));
    }
    if !f.is_nondecreasing() {
        return Err(Error::Precondition("f must be nondecreasing".into()));
    }
    if !f.bounded_by(alpha, s) {
        return Err(Error::Precondition("f must satisfy 0 ≤ f ≤ α r^s".into()));
    }
    let f_d = f.eval(f.d);
    if f_d == F::zero() {
        return Ok(LogMomentCheck {
            lhs: F::zero(),
            rhs: F::zero(),
            pass: true,
        });
    }
    let lhs = f.weighted_integral(s);
    let inner = f.weighted_integral(s + alpha);
    let c = s * f.d.powf(s) / f_d + F::one();
    let rhs = (F::one() + c * f.d.powf(alpha) * inner).ln();
    let pass = lhs <= rhs + fl::<F>(1e-10) * (F::one() + rhs.abs());
    Ok(LogMomentCheck { lhs, rhs, pass })
}

/// δ with `sup_{B ⊆ A} [H⁰(B) − H⁰_δ(B)] ≤ ε`; for s = 0 the gap is exactly
/// zero once no admissible ball can merge two points, so δ is just below
/// half the minimal pairwise distance.
pub fn uniform_convergence_check<F: Scalar>(points: &[[F; 3]], eps: F) -> Result<F> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    if points.len() == 1 {
        return Ok(F::one());
    }
    let mut gap = F::infinity();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = dist(&points[i], &points[j]);
            if !(d > F::zero()) {
                return Err(Error::InvalidArgument("points must be distinct".into()));
            }
            gap = gap.min(d);
        }
    }
    let delta = gap * fl::<F>(0.5) * (F::one() - fl::<F>(1e-9));
    if points.len() <= EXACT_MAX_POINTS {
        let sup = hausdorff_gap_sup(points, delta)?;
        if sup > eps {
            return Err(Error::Precondition(format!(
                "gap {sup:e} above the requested tolerance at δ = {delta:e}"
            )));
        }
    }
    Ok(delta)
}

/// `sup_{B ⊆ A} [H⁰(B) − H⁰_δ(B)]` by subset enumeration (≤ 12 points).
pub fn hausdorff_gap_sup<F: Scalar>(points: &[[F; 3]], delta: F) -> Result<F> {
    let sh = SubsetHausdorff::build(points, F::zero(), delta)?;
    let n = points.len();
    let mut sup = F::zero();
    for mask in 1u64..(1 << n) {
        let count = fu::<F>(mask.count_ones() as usize);
        sup = sup.max(count - sh.value(mask));
    }
    Ok(sup)
}

/// Brezis–Merle bound `πd²/(1 − m/4π)` for `m < 4π`.
pub fn brezis_merle_bound<F: Scalar>(mass: F, d: F) -> Result<F> {
    let four_pi = fl::<F>(4.0) * F::PI();
    if !(mass < four_pi) {
        return Err(Error::Precondition("mass must be below 4π".into()));
    }
    Ok(F::PI() * d * d / (F::one() - mass / four_pi))
}
