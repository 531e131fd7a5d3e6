//! Plain-text serialization.
//!
//! Measures: a header line `dim h lo hi [lo hi [lo hi]] [ball]`, then
//! `atom x [y z] w [singular]` lines and an optional
//! `density v0 v1 ...` line with node-major interior values.
//! Grid functions: node-major CSV rows `node,value`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Domain, GridFunction, Shape};
use crate::measure::DiscreteMeasure;
use crate::scalar::Scalar;

fn fmt<F: Scalar>(v: F) -> String {
    format!("{:.17e}", v.to_f64().unwrap_or(f64::NAN))
}

/// Serialize a measure with its domain header.
pub fn write_measure<F: Scalar>(mu: &DiscreteMeasure<F>) -> String {
    let dom = mu.domain();
    let mut out = String::new();
    out.push_str(&format!("{} {}", dom.dim(), fmt(dom.h())));
    for (lo, hi) in dom.bounds() {
        out.push_str(&format!(" {} {}", fmt(lo), fmt(hi)));
    }
    if dom.shape() == Shape::Ball {
        out.push_str(" ball");
    }
    out.push('\n');
    for a in mu.atoms() {
        out.push_str("atom");
        for k in 0..dom.dim() {
            out.push_str(&format!(" {}", fmt(a.point[k])));
        }
        out.push_str(&format!(" {}", fmt(a.weight)));
        if a.singular {
            out.push_str(" singular");
        }
        out.push('\n');
    }
    if let Some(d) = mu.density() {
        out.push_str("density");
        for &v in d.values() {
            out.push_str(&format!(" {}", fmt(v)));
        }
        out.push('\n');
    }
    out
}

/// Parse a measure (and its domain) from the text format.
pub fn parse_measure<F: Scalar>(text: &str) -> Result<DiscreteMeasure<F>> {
    let mut lines = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty measure file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 4 {
        return Err(Error::Parse("header needs `dim h lo hi ...`".into()));
    }
    let dim: usize = toks[0]
        .parse()
        .map_err(|_| Error::Parse("bad dim".into()))?;
    let h = parse_f::<F>(toks[1])?;
    let ball = toks.last() == Some(&"ball");
    let coord_toks = if ball {
        &toks[2..toks.len() - 1]
    } else {
        &toks[2..]
    };
    if coord_toks.len() != 2 * dim {
        return Err(Error::Parse("bounds count does not match dim".into()));
    }
    let mut bounds = Vec::new();
    for pair in coord_toks.chunks(2) {
        bounds.push((parse_f::<F>(pair[0])?, parse_f::<F>(pair[1])?));
    }
    let dom = if ball {
        let two = F::from_f64(2.0).unwrap();
        let center: Vec<F> = bounds.iter().map(|&(l, u)| (l + u) / two).collect();
        let radius = (bounds[0].1 - bounds[0].0) / two;
        Domain::new_ball(dim, &center, radius, h)?
    } else {
        Domain::new_box(&bounds, h)?
    };

    let mut mu = DiscreteMeasure::zero(&dom);
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first() {
            Some(&"atom") => {
                let singular = toks.last() == Some(&"singular");
                let vals = if singular {
                    &toks[1..toks.len() - 1]
                } else {
                    &toks[1..]
                };
                if vals.len() != dim + 1 {
                    return Err(Error::Parse(format!(
                        "atom line needs {} coords + weight",
                        dim
                    )));
                }
                let mut p = Vec::new();
                for t in &vals[..dim] {
                    p.push(parse_f::<F>(t)?);
                }
                let w = parse_f::<F>(vals[dim])?;
                mu.push_atom(&p, w, singular)?;
            }
            Some(&"density") => {
                let mut vals = Vec::new();
                for t in &toks[1..] {
                    vals.push(parse_f::<F>(t)?);
                }
                let d = dom.from_values(vals)?;
                mu.set_density(d)?;
            }
            Some(other) => {
                return Err(Error::Parse(format!("unknown record `{other}`")));
            }
            None => {}
        }
    }
    Ok(mu)
}

fn parse_f<F: Scalar>(tok: &str) -> Result<F> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("bad number `{tok}`")))?;
    F::from_f64(v).ok_or_else(|| Error::Parse("number out of range".into()))
}

/// Node-major CSV rows `node,value`.
pub fn write_grid_function<F: Scalar>(u: &GridFunction<F>) -> String {
    let mut out = String::from("node,value\n");
    for (i, &v) in u.values().iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt(v)));
    }
    out
}

/// Parse grid-function CSV against a known domain.
pub fn parse_grid_function<F: Scalar>(dom: &Arc<Domain<F>>, text: &str) -> Result<GridFunction<F>> {
    let mut values = vec![F::zero(); dom.interior_count()];
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line == "node,value" || line.starts_with('#') {
            continue;
        }
        let (i, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {ln}: expected `node,value`")))?;
        let i: usize = i
            .trim()
            .parse()
            .map_err(|_| Error::Parse("bad node index".into()))?;
        if i >= values.len() {
            return Err(Error::Parse(format!("node index {i} out of range")));
        }
        values[i] = parse_f::<F>(v.trim())?;
    }
    dom.from_values(values)
}
