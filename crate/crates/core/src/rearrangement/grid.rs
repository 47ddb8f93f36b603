use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotone::MonotoneFn;
use crate::rearrangement::StepProfile;

/// Piecewise-constant function on a uniform Cartesian grid in `ℝⁿ`,
/// `n ∈ {1, 2, 3}`. Cell `i` is the cube `origin + h·[i, i + 1)`; values are
/// stored row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    shape: Vec<usize>,
    spacing: f64,
    origin: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(shape: Vec<usize>, spacing: f64, origin: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = shape.len();
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension must be 1, 2 or 3, got {n}")));
        }
        if origin.len() != n {
            return Err(Error::InvalidGrid(format!("origin has {} coordinates, expected {n}", origin.len())));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        if shape.contains(&0) {
            return Err(Error::InvalidGrid("every axis needs at least one cell".into()));
        }
        let count: usize = shape.iter().product();
        if values.len() != count {
            return Err(Error::InvalidGrid(format!("{} values for {count} cells", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) || origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("values and origin must be finite".into()));
        }
        Ok(Self {
            shape,
            spacing,
            origin,
            values,
        })
    }

    /// Samples `f` at cell centres.
    pub fn from_fn(shape: Vec<usize>, spacing: f64, origin: Vec<f64>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut g = Self::new(shape.clone(), spacing, origin, vec![0.0; shape.iter().product()])?;
        let mut c = vec![0.0; shape.len()];
        for i in 0..g.values.len() {
            g.center_into(i, &mut c);
            g.values[i] = f(&c);
        }
        if g.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("sampled values must be finite".into()));
        }
        Ok(g)
    }

    /// Grid of `cells` cells per axis centred at the origin, covering
    /// `[−half_width, half_width]ⁿ`.
    pub fn centered(n: usize, cells: usize, half_width: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let h = 2.0 * half_width / cells as f64;
        Self::from_fn(vec![cells; n], h, vec![-half_width; n], f)
    }

    /// Uniform random values in `[0, max)` on a random subset of cells
    /// (each cell nonzero with probability `density`).
    pub fn random<R: Rng>(rng: &mut R, shape: Vec<usize>, spacing: f64, density: f64, max: f64) -> Self {
        let n = shape.len();
        let count: usize = shape.iter().product();
        let values = (0..count)
            .map(|_| {
                if rng.gen_bool(density) {
                    // a few repeated levels exercise ties in the rearrangement
                    if rng.gen_bool(0.2) {
                        (rng.gen_range(1..4) as f64) * max / 4.0
                    } else {
                        rng.gen_range(0.0..max)
                    }
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            origin: vec![-(spacing * shape[0] as f64) / 2.0; n],
            shape,
            spacing,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim() as i32)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes the centre of cell `index` into `out`.
    pub fn center_into(&self, index: usize, out: &mut [f64]) {
        let mut rest = index;
        for axis in (0..self.dim()).rev() {
            let i = rest % self.shape[axis];
            rest /= self.shape[axis];
            out[axis] = self.origin[axis] + (i as f64 + 0.5) * self.spacing;
        }
    }

    pub fn center(&self, index: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        self.center_into(index, &mut c);
        c
    }

    /// Index of the cell containing `x`, if any.
    pub fn cell_of(&self, x: &[f64]) -> Option<usize> {
        let mut index = 0;
        for axis in 0..self.dim() {
            let u = (x[axis] - self.origin[axis]) / self.spacing;
            if !(u >= 0.0) || u >= self.shape[axis] as f64 {
                return None;
            }
            index = index * self.shape[axis] + (u.floor() as usize).min(self.shape[axis] - 1);
        }
        Some(index)
    }

    /// Value of the cell containing `x`, zero outside the grid.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.cell_of(x).map(|i| self.values[i]).unwrap_or(0.0)
    }

    /// `|{|f| > λ}|`, exactly `count · hⁿ`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        let count = self.values.iter().filter(|v| v.abs() > lambda).count();
        count as f64 * self.cell_volume()
    }

    /// `f*`, built from sorted cell values with ends `count · hⁿ`.
    pub fn rearrange(&self) -> StepProfile {
        let mut mags: Vec<f64> = self.values.iter().map(|v| v.abs()).filter(|v| *v > 0.0).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let vol = self.cell_volume();
        let mut ends = Vec::new();
        let mut values = Vec::new();
        let mut k = 0;
        while k < mags.len() {
            let v = mags[k];
            while k < mags.len() && mags[k] == v {
                k += 1;
            }
            ends.push(k as f64 * vol);
            values.push(v);
        }
        StepProfile::new(ends, values).expect("sorted cell values form a valid profile")
    }

    /// `ψ(|f|)` cellwise.
    pub fn map_abs(&self, psi: &MonotoneFn) -> Result<Self> {
        let mut values = Vec::with_capacity(self.values.len());
        for v in &self.values {
            let w = psi.eval(v.abs())?;
            if !w.is_finite() {
                return Err(Error::InvalidGrid(format!("psi({}) is not finite", v.abs())));
            }
            values.push(w);
        }
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.abs()).collect(),
            ..self.clone()
        }
    }

    /// Cellwise sum; the grids must share geometry.
    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.check_same_geometry(other)?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn check_same_geometry(&self, other: &GridFunction) -> Result<()> {
        if self.shape != other.shape || self.spacing != other.spacing || self.origin != other.origin {
            return Err(Error::InvalidGrid("grids do not share geometry".into()));
        }
        Ok(())
    }

    /// `f · 1_{B(x, r)}` with cell-centre inclusion.
    pub fn restrict_to_ball(&self, x: &[f64], r: f64) -> Self {
        let mut c = vec![0.0; self.dim()];
        let values = (0..self.len())
            .map(|i| {
                self.center_into(i, &mut c);
                if crate::geometry::distance(&c, x) < r {
                    self.values[i]
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    /// `∫ |f|`.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.cell_volume()
    }

    /// Centres and `|value| · hⁿ` of the nonzero cells.
    pub fn weighted_centers(&self) -> Vec<(Vec<f64>, f64)> {
        let vol = self.cell_volume();
        (0..self.len())
            .filter(|&i| self.values[i] != 0.0)
            .map(|i| (self.center(i), self.values[i].abs() * vol))
            .collect()
    }

    /// Mass-weighted centroid of `|f|`, or the grid centre when `f = 0`.
    pub fn centroid(&self) -> Vec<f64> {
        let n = self.dim();
        let mut acc = vec![0.0; n];
        let mut total = 0.0;
        for (c, w) in self.weighted_centers() {
            for k in 0..n {
                acc[k] += w * c[k];
            }
            total += w;
        }
        if total > 0.0 {
            acc.iter().map(|a| a / total).collect()
        } else {
            (0..n)
                .map(|k| self.origin[k] + 0.5 * self.spacing * self.shape[k] as f64)
                .collect()
        }
    }

    /// Radius of the smallest ball about `x` containing every nonzero cell.
    pub fn support_radius(&self, x: &[f64]) -> f64 {
        let half_diag = 0.5 * self.spacing * (self.dim() as f64).sqrt();
        self.weighted_centers()
            .iter()
            .map(|(c, _)| crate::geometry::distance(c, x) + half_diag)
            .fold(0.0, f64::max)
    }

    /// Header `dim,n0,..,spacing,o0,..`, one metadata row, then one value
    /// per line in row-major order.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut names = vec!["dim".to_string()];
        names.extend((0..n).map(|k| format!("n{k}")));
        names.push("spacing".into());
        names.extend((0..n).map(|k| format!("o{k}")));
        let mut meta = vec![n.to_string()];
        meta.extend(self.shape.iter().map(|s| s.to_string()));
        meta.push(format!("{:.16e}", self.spacing));
        meta.extend(self.origin.iter().map(|o| format!("{o:.16e}")));
        let mut out = names.join(",") + "\n" + &meta.join(",") + "\n";
        for v in &self.values {
            out.push_str(&format!("{v:.16e}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or(Error::EmptyInput("grid csv"))?;
        if !header.starts_with("dim") {
            return Err(Error::Parse(format!("grid csv header must start with `dim`, got `{header}`")));
        }
        let meta_line = lines.next().ok_or(Error::Parse("grid csv lacks a metadata row".into()))?;
        let meta: Vec<&str> = meta_line.split(',').map(str::trim).collect();
        let n: usize = meta
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad dim in `{meta_line}`")))?;
        if !(1..=3).contains(&n) || meta.len() != 2 * n + 2 {
            return Err(Error::Parse(format!("metadata row `{meta_line}` does not match dim {n}")));
        }
        let parse_f = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
        let shape = meta[1..=n]
            .iter()
            .map(|s| s.parse::<usize>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let spacing = parse_f(meta[n + 1])?;
        let origin = meta[n + 2..].iter().map(|s| parse_f(s)).collect::<Result<Vec<_>>>()?;
        let mut values = Vec::new();
        for line in lines {
            for tok in line.split(',') {
                values.push(parse_f(tok.trim())?);
            }
        }
        Self::new(shape, spacing, origin, values)
    }
}
