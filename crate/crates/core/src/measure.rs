//! Discrete finite signed measures: atoms plus an optional density.
//!
//! A measure is `μ = Σ w_k δ_{a_k} + f·(volume element)`, where `f` is a grid
//! function. Atoms flagged `singular` model the continuum concentrated part
//! (zero-capacity analog); at fixed `h` every discrete measure is absolutely
//! continuous, so the distinction is declared, never detected.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Domain, GridFunction};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<F> {
    pub point: [F; 3],
    pub weight: F,
    pub singular: bool,
}

/// Atomic part plus optional density on a common [`Domain`].
#[derive(Debug, Clone)]
pub struct DiscreteMeasure<F: Scalar> {
    dom: Arc<Domain<F>>,
    atoms: Vec<Atom<F>>,
    density: Option<GridFunction<F>>,
}

impl<F: Scalar> DiscreteMeasure<F> {
    pub fn zero(dom: &Arc<Domain<F>>) -> Self {
        DiscreteMeasure {
            dom: Arc::clone(dom),
            atoms: Vec::new(),
            density: None,
        }
    }

    pub fn from_density(density: GridFunction<F>) -> Self {
        DiscreteMeasure {
            dom: Arc::clone(density.domain()),
            atoms: Vec::new(),
            density: Some(density),
        }
    }

    /// Single atom `w·δ_a`.
    pub fn dirac(dom: &Arc<Domain<F>>, point: &[F], weight: F, singular: bool) -> Result<Self> {
        let mut m = Self::zero(dom);
        m.push_atom(point, weight, singular)?;
        Ok(m)
    }

    pub fn push_atom(&mut self, point: &[F], weight: F, singular: bool) -> Result<()> {
        if !self.dom.contains_strict(point) {
            return Err(Error::Measure("atom on or outside the boundary".into()));
        }
        if !weight.is_finite() {
            return Err(Error::Measure("atom weight must be finite".into()));
        }
        let mut p = [F::zero(); 3];
        p[..self.dom.dim()].copy_from_slice(&point[..self.dom.dim()]);
        self.atoms.push(Atom {
            point: p,
            weight,
            singular,
        });
        Ok(())
    }

    pub fn set_density(&mut self, density: GridFunction<F>) -> Result<()> {
        if !(*density.domain().as_ref() == *self.dom.as_ref()) {
            return Err(Error::Measure("density lives on a different domain".into()));
        }
        self.density = Some(density);
        Ok(())
    }

    pub fn domain(&self) -> &Arc<Domain<F>> {
        &self.dom
    }

    pub fn atoms(&self) -> &[Atom<F>] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&GridFunction<F>> {
        self.density.as_ref()
    }

    pub fn has_singular_atoms(&self) -> bool {
        self.atoms.iter().any(|a| a.singular)
    }

    /// Total variation norm `Σ|w| + h^dim Σ|f|`.
    pub fn tv_norm(&self) -> F {
        let atom_tv: F = self.atoms.iter().map(|a| a.weight.abs()).sum();
        let dens_tv = self.density.as_ref().map_or(F::zero(), |d| d.norms().l1);
        atom_tv + dens_tv
    }

    /// Total signed mass `Σw + h^dim Σ f`.
    pub fn total_mass(&self) -> F {
        let atom_mass: F = self.atoms.iter().map(|a| a.weight).sum();
        let dens_mass = self.density.as_ref().map_or(F::zero(), |d| {
            d.domain().cell_volume() * d.values().iter().copied().sum()
        });
        atom_mass + dens_mass
    }

    /// All atoms ≤ 0 and density ≤ 0 nodewise.
    pub fn is_nonpositive(&self) -> bool {
        self.atoms.iter().all(|a| a.weight <= F::zero())
            && self
                .density
                .as_ref()
                .map_or(true, |d| d.values().iter().all(|&v| v <= F::zero()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.scale(-F::one()).is_nonpositive()
    }

    /// Push atoms onto the grid: weight `w` at point `a` becomes `w/h^dim` at
    /// the nearest interior node, added to the density. Mass-exact.
    pub fn project(&self) -> GridFunction<F> {
        let mut values = match &self.density {
            Some(d) => d.values().to_vec(),
            None => vec![F::zero(); self.dom.interior_count()],
        };
        let inv_vol = F::one() / self.dom.cell_volume();
        for a in &self.atoms {
            let i = self.dom.nearest_interior_node(&a.point[..self.dom.dim()]);
            values[i] = values[i] + a.weight * inv_vol;
        }
        self.dom
            .from_values(values)
            .expect("projection preserves length and finiteness")
    }

    /// Pair the measure against a grid function: `Σ w·ζ(nearest node) + h^dim Σ f·ζ`.
    pub fn pair(&self, zeta: &GridFunction<F>) -> F {
        let mut s = F::zero();
        for a in &self.atoms {
            let i = self.dom.nearest_interior_node(&a.point[..self.dom.dim()]);
            s = s + a.weight * zeta.values()[i];
        }
        if let Some(d) = &self.density {
            s = s + d.inner(zeta);
        }
        s
    }

    /// Mollified (density-only) measure: every source is spread with a tent
    /// kernel of radius `ε`, renormalized per source so mass is preserved
    /// exactly even when the kernel is clipped by the boundary.
    pub fn mollify(&self, eps: F) -> Result<DiscreteMeasure<F>> {
        if eps < self.dom.h() {
            return Err(Error::InvalidArgument(
                "mollification radius must be at least h".into(),
            ));
        }
        let dim = self.dom.dim();
        let n = self.dom.interior_count();
        let inv_vol = F::one() / self.dom.cell_volume();
        let mut values = vec![F::zero(); n];

        let mut spread = |point: &[F; 3], mass: F| {
            // tent kernel on the nodes within radius eps
            let mut weights: Vec<(usize, F)> = Vec::new();
            let mut total = F::zero();
            for i in 0..n {
                let q = self.dom.node_pos(i);
                let mut d2 = F::zero();
                for a in 0..dim {
                    let d = q[a] - point[a];
                    d2 = d2 + d * d;
                }
                let r = d2.sqrt();
                if r < eps {
                    let w = F::one() - r / eps;
                    weights.push((i, w));
                    total = total + w;
                }
            }
            if total > F::zero() {
                for (i, w) in weights {
                    values[i] = values[i] + mass * (w / total) * inv_vol;
                }
            } else {
                // kernel missed every node; fall back to nearest-node placement
                let i = self.dom.nearest_interior_node(&point[..dim]);
                values[i] = values[i] + mass * inv_vol;
            }
        };

        for a in &self.atoms {
            spread(&a.point, a.weight);
        }
        if let Some(d) = &self.density {
            let vol = self.dom.cell_volume();
            for i in 0..n {
                let mass = d.values()[i] * vol;
                if mass != F::zero() {
                    spread(&self.dom.node_pos(i), mass);
                }
            }
        }

        Ok(DiscreteMeasure {
            dom: Arc::clone(&self.dom),
            atoms: Vec::new(),
            density: Some(self.dom.from_values(values)?),
        })
    }

    pub fn scale(&self, c: F) -> Self {
        DiscreteMeasure {
            dom: Arc::clone(&self.dom),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    point: a.point,
                    weight: c * a.weight,
                    singular: a.singular,
                })
                .collect(),
            density: self.density.as_ref().map(|d| d.scale(c)),
        }
    }

    /// Signed combination `self + c·other` with atoms aligned by position.
    pub fn linear_comb(&self, other: &Self, c: F) -> Result<Self> {
        if !(*self.dom.as_ref() == *other.dom.as_ref()) {
            return Err(Error::Measure("mismatched domains".into()));
        }
        let mut atoms = self.atoms.clone();
        for b in &other.atoms {
            match atoms.iter_mut().find(|a| a.point == b.point) {
                Some(a) => {
                    a.weight = a.weight + c * b.weight;
                    a.singular = a.singular || b.singular;
                }
                None => atoms.push(Atom {
                    point: b.point,
                    weight: c * b.weight,
                    singular: b.singular,
                }),
            }
        }
        let density = match (&self.density, &other.density) {
            (None, None) => None,
            (Some(d), None) => Some(d.clone()),
            (None, Some(e)) => Some(e.scale(c)),
            (Some(d), Some(e)) => Some(d.zip(e, |x, y| x + c * y)),
        };
        Ok(DiscreteMeasure {
            dom: Arc::clone(&self.dom),
            atoms,
            density,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.linear_comb(other, F::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.linear_comb(other, -F::one())
    }

    /// Nodewise/atomwise lattice join or meet after aligning supports.
    pub fn lattice(&self, other: &Self, op: LatticeOp) -> Result<Self> {
        if !(*self.dom.as_ref() == *other.dom.as_ref()) {
            return Err(Error::Measure("mismatched domains".into()));
        }
        let combine = |a: F, b: F| match op {
            LatticeOp::Max => a.max(b),
            LatticeOp::Min => a.min(b),
        };

        let mut atoms: Vec<Atom<F>> = Vec::new();
        for a in &self.atoms {
            let bw = other
                .atoms
                .iter()
                .find(|b| b.point == a.point)
                .map(|b| (b.weight, b.singular))
                .unwrap_or((F::zero(), false));
            atoms.push(Atom {
                point: a.point,
                weight: combine(a.weight, bw.0),
                singular: a.singular || bw.1,
            });
        }
        for b in &other.atoms {
            if !self.atoms.iter().any(|a| a.point == b.point) {
                atoms.push(Atom {
                    point: b.point,
                    weight: combine(F::zero(), b.weight),
                    singular: b.singular,
                });
            }
        }

        let density = match (&self.density, &other.density) {
            (None, None) => None,
            (Some(d), None) => Some(d.map(|v| combine(v, F::zero()))),
            (None, Some(e)) => Some(e.map(|v| combine(F::zero(), v))),
            (Some(d), Some(e)) => Some(d.zip(e, combine)),
        };
        Ok(DiscreteMeasure {
            dom: Arc::clone(&self.dom),
            atoms,
            density,
        })
    }

    /// Declared concentrated part: the singular-flagged atoms.
    pub fn concentrated_part(&self) -> Self {
        DiscreteMeasure {
            dom: Arc::clone(&self.dom),
            atoms: self.atoms.iter().filter(|a| a.singular).cloned().collect(),
            density: None,
        }
    }

    /// Diffuse part: density plus the unflagged atoms, so that
    /// `μ = diffuse_part + concentrated_part` exactly.
    pub fn diffuse_part(&self) -> Self {
        DiscreteMeasure {
            dom: Arc::clone(&self.dom),
            atoms: self.atoms.iter().filter(|a| !a.singular).cloned().collect(),
            density: self.density.clone(),
        }
    }

    /// Positive part `max{μ, 0}`.
    pub fn positive_part(&self) -> Self {
        self.lattice(&Self::zero(&self.dom), LatticeOp::Max)
            .expect("same domain")
    }

    /// Negative part as a measure: `min{μ, 0}` (nonpositive).
    pub fn negative_part(&self) -> Self {
        self.lattice(&Self::zero(&self.dom), LatticeOp::Min)
            .expect("same domain")
    }

    /// Lattice order `self ≤ other` (atomwise after alignment, nodewise
    /// density). `tol` is a mass tolerance; density values are compared
    /// against the mass-equivalent `tol / h^dim`.
    pub fn le(&self, other: &Self, tol: F) -> bool {
        match self.sub(other) {
            Ok(diff) => {
                let dens_tol = tol / self.dom.cell_volume();
                diff.atoms.iter().all(|a| a.weight <= tol)
                    && diff
                        .density
                        .map_or(true, |d| d.values().iter().all(|&v| v <= dens_tol))
            }
            Err(_) => false,
        }
    }

    /// Drop atoms with |weight| below `tol` and densities identically zero.
    pub fn cleaned(&self, tol: F) -> Self {
        let atoms = self
            .atoms
            .iter()
            .filter(|a| a.weight.abs() > tol)
            .cloned()
            .collect();
        let density = self.density.as_ref().and_then(|d| {
            if d.values().iter().all(|&v| v == F::zero()) {
                None
            } else {
                Some(d.clone())
            }
        });
        DiscreteMeasure {
            dom: Arc::clone(&self.dom),
            atoms,
            density,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOp {
    Max,
    Min,
}
