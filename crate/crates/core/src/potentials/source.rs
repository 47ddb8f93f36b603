use crate::error::{Error, Result};
use crate::geometry::{distance, norm, omega};
use crate::rearrangement::{GridFunction, RadialLift};

/// Nonzero cells of a grid function, pre-extracted for ball-mass queries.
#[derive(Debug, Clone)]
pub struct GridSource {
    grid: GridFunction,
    centers: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl GridSource {
    pub fn new(grid: GridFunction) -> Self {
        let (centers, weights) = grid.weighted_centers().into_iter().unzip();
        Self {
            grid,
            centers,
            weights,
        }
    }

    pub fn grid(&self) -> &GridFunction {
        &self.grid
    }

    /// Centres and weights `|v| hⁿ` of the nonzero cells.
    pub fn cells(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.centers.iter().map(|c| c.as_slice()).zip(self.weights.iter().copied())
    }
}

/// The function whose potentials are evaluated: a grid function or the
/// radial lift of a profile.
#[derive(Debug, Clone)]
pub enum Source {
    Grid(GridSource),
    Radial(RadialLift),
}

impl From<GridFunction> for Source {
    fn from(g: GridFunction) -> Self {
        Source::Grid(GridSource::new(g))
    }
}

impl From<RadialLift> for Source {
    fn from(l: RadialLift) -> Self {
        Source::Radial(l)
    }
}

impl Source {
    pub fn dim(&self) -> usize {
        match self {
            Source::Grid(g) => g.grid.dim(),
            Source::Radial(l) => l.dim(),
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            Source::Grid(g) => g.weights.iter().sum(),
            Source::Radial(l) => l.profile().total_mass(),
        }
    }

    pub fn centroid(&self) -> Vec<f64> {
        match self {
            Source::Grid(g) => g.grid.centroid(),
            Source::Radial(l) => vec![0.0; l.dim()],
        }
    }

    /// Radius of a ball about `x` outside which `f` vanishes.
    pub fn support_radius(&self, x: &[f64]) -> f64 {
        match self {
            Source::Grid(g) => g.grid.support_radius(x),
            Source::Radial(l) => norm(x) + l.support_radius(),
        }
    }

    /// `∫_{B(x, r)} |f|`: cell-centre inclusion for grids, exact layer-cake
    /// sum for radial lifts.
    pub fn ball_mass(&self, x: &[f64], r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {r}")));
        }
        self.check_point(x)?;
        Ok(self.ball_mass_unchecked(x, r))
    }

    pub(crate) fn ball_mass_unchecked(&self, x: &[f64], r: f64) -> f64 {
        match self {
            Source::Grid(g) => g
                .centers
                .iter()
                .zip(&g.weights)
                .filter(|(c, _)| distance(c, x) < r)
                .map(|(_, w)| *w)
                .sum(),
            Source::Radial(l) => l.ball_mass(norm(x), r),
        }
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "point has {} coordinates, source lives in dimension {}",
                x.len(),
                self.dim()
            )));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("point coordinates must be finite".into()));
        }
        Ok(())
    }

    /// The map `r ↦ ∫_{B(x, r)} |f|` for a fixed centre.
    pub(crate) fn mass_profile(&self, x: &[f64]) -> MassProfile<'_> {
        let n = self.dim();
        match self {
            Source::Grid(g) => {
                let h = g.grid.spacing();
                let mut pairs: Vec<(f64, f64)> = g
                    .centers
                    .iter()
                    .zip(&g.weights)
                    .map(|(c, w)| (distance(c, x), *w))
                    .collect();
                pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                let inner = 0.25 * h;
                let mut radii = Vec::new();
                let mut masses = Vec::new();
                let mut acc = 0.0;
                for (d, w) in pairs {
                    acc += w;
                    let d = d.max(inner);
                    match radii.last() {
                        Some(&last) if last == d => *masses.last_mut().unwrap() = acc,
                        _ => {
                            radii.push(d);
                            masses.push(acc);
                        }
                    }
                }
                MassProfile::Steps {
                    n,
                    local: g.grid.value_at(x).abs(),
                    inner,
                    radii,
                    masses,
                }
            }
            Source::Radial(l) => {
                let d = norm(x);
                let mut kinks: Vec<f64> = l
                    .radii()
                    .iter()
                    .flat_map(|&rho| [(d - rho).abs(), d + rho])
                    .filter(|k| *k > 0.0)
                    .collect();
                kinks.sort_by(|a, b| a.partial_cmp(b).unwrap());
                kinks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.max(1.0));
                MassProfile::Radial { lift: l, d, kinks }
            }
        }
    }
}

/// Ball mass about a fixed centre as a function of the radius.
pub(crate) enum MassProfile<'a> {
    /// Grid source. Below `inner` the mass is modelled as
    /// `ω_n · local · rⁿ`; from `inner` on it is the step function equal to
    /// `masses[k]` on `(radii[k], radii[k+1]]`.
    Steps {
        n: usize,
        local: f64,
        inner: f64,
        radii: Vec<f64>,
        masses: Vec<f64>,
    },
    /// Radial lift seen from a point at distance `d`; smooth between kinks.
    Radial {
        lift: &'a RadialLift,
        d: f64,
        kinks: Vec<f64>,
    },
}

impl MassProfile<'_> {
    pub fn total(&self) -> f64 {
        match self {
            MassProfile::Steps { masses, .. } => masses.last().copied().unwrap_or(0.0),
            MassProfile::Radial { lift, .. } => lift.profile().total_mass(),
        }
    }

    /// Radius from which the mass equals the total.
    pub fn full_radius(&self) -> f64 {
        match self {
            MassProfile::Steps { radii, inner, .. } => radii.last().copied().unwrap_or(*inner),
            MassProfile::Radial { kinks, .. } => kinks.last().copied().unwrap_or(0.0),
        }
    }

    pub fn mass(&self, r: f64) -> f64 {
        match self {
            MassProfile::Steps {
                n,
                local,
                inner,
                radii,
                masses,
            } => {
                if r <= *inner {
                    omega(*n) * local * r.powi(*n as i32)
                } else {
                    let k = radii.partition_point(|&d| d < r);
                    if k == 0 {
                        0.0
                    } else {
                        masses[k - 1]
                    }
                }
            }
            MassProfile::Radial { lift, d, .. } => lift.ball_mass(*d, r),
        }
    }
}
