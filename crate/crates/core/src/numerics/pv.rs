use crate::error::{Error, Result};
use crate::numerics::grid::FrequencyGrid;
use crate::scalar::Real;

/// `(1/pi) P∫ f(x) / (omega - x) dx` over the span of the grid nodes.
///
/// Singularity subtraction: the trapezoid rule is applied to the smooth
/// quotient `(f(x) - f(omega)) / (omega - x)` and the subtracted part is added
/// back analytically as `f(omega) ln((omega - a) / (b - omega))`. `omega` may
/// sit between nodes, in which case `f(omega)` is linearly interpolated.
pub fn principal_value_integral<T: Real>(f: &[T], grid: &FrequencyGrid<T>, omega: T) -> Result<T> {
    let n = grid.len();
    if f.len() != n {
        return Err(Error::GridMismatch(format!(
            "{} samples on a grid of {} points",
            f.len(),
            n
        )));
    }
    let h = grid.step();
    let a = grid.omega(0);
    let b = grid.omega(n - 1);
    let margin = h * T::lit(1.0 - 1e-12);
    if !(omega - a >= margin && b - omega >= margin) {
        return Err(Error::OutOfRange {
            omega: omega.as_f64(),
            omega_max: grid.omega_max().as_f64(),
        });
    }

    let s = (omega - a) / h;
    let mut j0 = s.floor().to_usize().unwrap_or(0).min(n - 2);
    let mut t = s - T::from_usize_lossy(j0);
    let snap = T::lit(1e-9);
    if t > T::one() - snap {
        j0 += 1;
        t = T::zero();
    }
    let on_node = t < snap;
    let f_at = if on_node {
        f[j0]
    } else {
        f[j0] * (T::one() - t) + f[j0 + 1] * t
    };
    let slope = if on_node {
        (f[j0 + 1] - f[j0 - 1]) / (T::lit(2.0) * h)
    } else {
        (f[j0 + 1] - f[j0]) / h
    };

    let mut acc = T::zero();
    for (j, &fj) in f.iter().enumerate() {
        let g = if on_node && j == j0 {
            -slope
        } else {
            (fj - f_at) / (omega - grid.omega(j))
        };
        let w = if j == 0 || j == n - 1 { T::lit(0.5) } else { T::one() };
        acc += w * g;
    }
    let log_term = f_at * ((omega - a) / (b - omega)).ln();
    Ok((acc * h + log_term) / T::PI())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> FrequencyGrid<f64> {
        FrequencyGrid::new(10.0, 512).unwrap()
    }

    #[test]
    fn zero_function() {
        let g = grid();
        let f = vec![0.0; g.len()];
        assert_eq!(principal_value_integral(&f, &g, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn linear_function_is_exact() {
        let g = grid();
        let f: Vec<f64> = g.values();
        let (a, b) = (g.omega(0), g.omega(g.len() - 1));
        for &w in &[0.0, 0.37, -4.2, 9.0] {
            let exact = (-(b - a) + w * ((w - a) / (b - w)).ln()) / PI;
            let num = principal_value_integral(&f, &g, w).unwrap();
            assert!((num - exact).abs() < 1e-12, "w = {w}: {num} vs {exact}");
        }
    }

    #[test]
    fn edges_are_rejected() {
        let g = grid();
        let f = vec![1.0; g.len()];
        assert!(matches!(
            principal_value_integral(&f, &g, -10.0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(principal_value_integral(&f, &g, g.omega(1)).is_ok());
        assert!(principal_value_integral(&f, &g, g.omega(g.len() - 1)).is_err());
    }
}
