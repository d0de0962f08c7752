//! Plant drift terms f(rho, xi).
//!
//! The drift is the uncontrolled part of the scalar plant: it takes the
//! current perturbation value rho and state xi. Shipped families are exact;
//! arbitrary drifts can be supplied as a rectangular interpolation table.

use crate::EvalError;

/// Tabulated drift over a rectangular (rho, xi) grid with bilinear
/// interpolation inside and constant continuation outside.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftTable {
    rho_grid: Vec<f64>,
    xi_grid: Vec<f64>,
    /// Row-major: values[i][j] = f(rho_grid[i], xi_grid[j]).
    values: Vec<Vec<f64>>,
}

impl DriftTable {
    pub fn new(
        rho_grid: Vec<f64>,
        xi_grid: Vec<f64>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self, EvalError> {
        let invalid = |reason: String| EvalError::InvalidParameter { reason };
        for (name, grid) in [("rho", &rho_grid), ("xi", &xi_grid)] {
            if grid.len() < 2 {
                return Err(invalid(format!("{name} grid needs at least 2 points")));
            }
            if grid.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("{name} grid contains non-finite entries")));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid(format!("{name} grid must be strictly increasing")));
            }
        }
        if values.len() != rho_grid.len()
            || values.iter().any(|row| row.len() != xi_grid.len())
        {
            return Err(invalid("value table shape does not match the grids".into()));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("value table contains non-finite entries".into()));
        }
        Ok(DriftTable {
            rho_grid,
            xi_grid,
            values,
        })
    }

    fn eval(&self, rho: f64, xi: f64) -> f64 {
        let (i, u) = locate(&self.rho_grid, rho);
        let (j, v) = locate(&self.xi_grid, xi);
        let f00 = self.values[i][j];
        let f01 = self.values[i][j + 1];
        let f10 = self.values[i + 1][j];
        let f11 = self.values[i + 1][j + 1];
        let a = f00 + (f10 - f00) * u;
        let b = f01 + (f11 - f01) * u;
        a + (b - a) * v
    }
}

/// Clamping cell lookup: returns the cell index and the local coordinate
/// in [0, 1] within it.
fn locate(grid: &[f64], x: f64) -> (usize, f64) {
    let n = grid.len();
    if x <= grid[0] {
        return (0, 0.0);
    }
    if x >= grid[n - 1] {
        return (n - 2, 1.0);
    }
    let i = match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(i) => i - 1,
    };
    let u = (x - grid[i]) / (grid[i + 1] - grid[i]);
    (i, u)
}

/// Drift family f(rho, xi).
#[derive(Debug, Clone, PartialEq)]
pub enum DriftFunction {
    /// f = 0.
    Zero,
    /// f(rho, xi) = a * rho + b * xi.
    Affine { a: f64, b: f64 },
    /// f(rho, xi) = rho + a * xi^2.
    Quadratic { a: f64 },
    /// Bilinear interpolation of a tabulated drift.
    Custom(DriftTable),
}

impl DriftFunction {
    #[must_use]
    pub fn eval(&self, rho: f64, xi: f64) -> f64 {
        match self {
            DriftFunction::Zero => 0.0,
            DriftFunction::Affine { a, b } => a * rho + b * xi,
            DriftFunction::Quadratic { a } => rho + a * xi * xi,
            DriftFunction::Custom(table) => table.eval(rho, xi),
        }
    }
}
