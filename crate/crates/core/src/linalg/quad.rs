use crate::error::{invalid, Result};

/// Composite Simpson rule on a uniform grid. With an odd number of intervals
/// the last three intervals use the 3/8 rule.
pub fn simpson(values: &[f64], h: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 {
        return Err(invalid(format!("Simpson's rule needs at least 3 nodes, got {n}")));
    }
    let intervals = n - 1;
    let (even_end, tail) = if intervals % 2 == 0 { (intervals, false) } else { (intervals - 3, true) };
    let mut s = 0.0;
    if even_end > 0 {
        let mut odd = 0.0;
        let mut even = 0.0;
        for i in 1..even_end {
            if i % 2 == 1 {
                odd += values[i];
            } else {
                even += values[i];
            }
        }
        s += h / 3.0 * (values[0] + 4.0 * odd + 2.0 * even + values[even_end]);
    }
    if tail {
        let f = &values[even_end..];
        s += 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
    }
    Ok(s)
}

/// Composite trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}
