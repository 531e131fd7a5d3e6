//! Plain-text key = value experiment configs.
//!
//! Keys may repeat (`atom = ...`), `#` starts comments, values are
//! whitespace-separated tokens. Every run is fully determined by the config
//! and the seed.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};

use emlab_core::grid::Domain;
use emlab_core::io::parse_measure;
use emlab_core::measure::DiscreteMeasure;
use emlab_core::nonlin::Nonlinearity;

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: Vec<(String, String)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", ln + 1))?;
            entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Config { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_all(&self, key: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .collect()
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| anyhow!("missing config key `{key}`"))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(v) => v.parse().with_context(|| format!("bad number for `{key}`")),
            None => Ok(default),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for v in self.require(key)?.split_whitespace() {
            out.push(
                v.parse()
                    .with_context(|| format!("bad number in `{key}`"))?,
            );
        }
        if out.is_empty() {
            bail!("empty list for `{key}`");
        }
        Ok(out)
    }

    /// The spacing family: `h_list` if present, otherwise the single `h`.
    pub fn spacings(&self) -> Result<Vec<f64>> {
        if self.get("h_list").is_some() {
            self.f64_list("h_list")
        } else {
            Ok(vec![self.require("h")?.parse().context("bad `h`")?])
        }
    }

    /// Build a domain at spacing `h` from the `dim/shape/bounds|center,radius`
    /// keys.
    pub fn domain(&self, h: f64) -> Result<Arc<Domain<f64>>> {
        let dim: usize = self.require("dim")?.parse().context("bad `dim`")?;
        match self.get("shape").unwrap_or("box") {
            "box" => {
                let b = self.f64_list("bounds")?;
                if b.len() != 2 * dim {
                    bail!("`bounds` needs {} numbers", 2 * dim);
                }
                let bounds: Vec<(f64, f64)> = b.chunks(2).map(|c| (c[0], c[1])).collect();
                Ok(Domain::new_box(&bounds, h)?)
            }
            "ball" => {
                let c = self.f64_list("center")?;
                if c.len() != dim {
                    bail!("`center` needs {dim} numbers");
                }
                let r: f64 = self.require("radius")?.parse().context("bad `radius`")?;
                Ok(Domain::new_ball(dim, &c, r, h)?)
            }
            other => bail!("unknown shape `{other}`"),
        }
    }

    /// Build the measure: repeated `atom = x [y z] w [singular]` lines, an
    /// optional `density_const`, or an external `measure_file`.
    pub fn measure(&self, dom: &Arc<Domain<f64>>) -> Result<DiscreteMeasure<f64>> {
        if let Some(path) = self.get("measure_file") {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading measure file {path}"))?;
            let mu = parse_measure::<f64>(&text)?;
            if !(mu.domain().as_ref() == dom.as_ref()) {
                bail!("measure file domain does not match the configured domain");
            }
            return Ok(mu);
        }
        let dim = dom.dim();
        let mut mu = DiscreteMeasure::zero(dom);
        for entry in self.get_all("atom") {
            let toks: Vec<&str> = entry.split_whitespace().collect();
            let singular = toks.last() == Some(&"singular");
            let vals = if singular {
                &toks[..toks.len() - 1]
            } else {
                &toks[..]
            };
            if vals.len() != dim + 1 {
                bail!("`atom` needs {} coordinates and a weight", dim);
            }
            let nums: Vec<f64> = vals
                .iter()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .context("bad `atom` numbers")?;
            mu.push_atom(&nums[..dim], nums[dim], singular)?;
        }
        if let Some(c) = self.get("density_const") {
            let c: f64 = c.parse().context("bad `density_const`")?;
            mu.set_density(dom.sample(|_| c))?;
        }
        Ok(mu)
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity<f64>> {
        match self.get("g").unwrap_or("zero") {
            "zero" => Ok(Nonlinearity::zero()),
            "linear" => Ok(Nonlinearity::linear()),
            "poly" => {
                let p = self.f64_or("p", 2.0)?;
                Ok(Nonlinearity::polynomial(p)?)
            }
            "exp" => Ok(Nonlinearity::exponential()),
            other => bail!("unknown nonlinearity `{other}`"),
        }
    }

    /// Point-measure for the geometry subcommands: repeated
    /// `point = x [y z] w` lines, or a `measure_file` in the core text
    /// format (atoms only, nonnegative weights).
    pub fn point_measure(&self) -> Result<emlab_core::geom::PointMeasure<f64>> {
        let dim: usize = self.require("dim")?.parse().context("bad `dim`")?;
        if let Some(path) = self.get("measure_file") {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading measure file {path}"))?;
            let mu = parse_measure::<f64>(&text)?;
            if mu.density().is_some() {
                bail!("point measures take atoms only, no density block");
            }
            let points: Vec<[f64; 3]> = mu.atoms().iter().map(|a| a.point).collect();
            let weights: Vec<f64> = mu.atoms().iter().map(|a| a.weight).collect();
            return Ok(emlab_core::geom::PointMeasure::new(dim, points, weights)?);
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for entry in self.get_all("point") {
            let nums: Vec<f64> = entry
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .context("bad `point` numbers")?;
            if nums.len() != dim + 1 {
                bail!("`point` needs {dim} coordinates and a weight");
            }
            let mut p = [0.0f64; 3];
            p[..dim].copy_from_slice(&nums[..dim]);
            points.push(p);
            weights.push(nums[dim]);
        }
        Ok(emlab_core::geom::PointMeasure::new(dim, points, weights)?)
    }
}
