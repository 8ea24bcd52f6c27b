use crate::error::{Error, Result};
use crate::net::pow_from_sq;

fn grid_side(n: usize) -> Result<usize> {
    let m = (n as f64).sqrt().round() as usize;
    if n < 2 || m * m != n {
        return Err(Error::InvalidParameter(format!(
            "{n} is not a perfect square >= 4"
        )));
    }
    Ok(m)
}

/// Lattice sum over the offsets of an `m x m` grid centred as evenly as
/// possible on one node (`n = m^2`): the sum of `(i^2 + j^2)^(-alpha/2)`
/// for `-floor((m-1)/2) <= i, j <= ceil((m-1)/2)`, `(i, j) != (0, 0)`.
pub fn zeta_alpha(n: usize, alpha: f64) -> Result<f64> {
    let m = grid_side(n)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let lo = -(((m - 1) / 2) as i64);
    let hi = (m / 2) as i64;
    let mut sum = 0.0;
    for i in lo..=hi {
        for j in lo..=hi {
            if i != 0 || j != 0 {
                sum += 1.0 / pow_from_sq((i * i + j * j) as f64, alpha);
            }
        }
    }
    Ok(sum)
}

/// `(n - 1) d^alpha / zeta_alpha(n)`: no cooperative broadcast on the grid
/// can spend less.
pub fn grid_coop_lower_bound(m: usize, d: f64, alpha: f64) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "spacing must be positive, got {d}"
        )));
    }
    let n = m * m;
    let zeta = zeta_alpha(n, alpha)?;
    Ok((n - 1) as f64 * d.powf(alpha) / zeta)
}

/// `n d^2 / 9`, the non-cooperative lower bound on an `n`-node grid. Only
/// established for `alpha = 2`; other exponents are rejected.
pub fn grid_noncoop_lower_bound(n: usize, d: f64, alpha: f64) -> Result<f64> {
    if alpha != 2.0 {
        return Err(Error::InvalidParameter(format!(
            "the non-cooperative grid bound holds for alpha = 2 only, got {alpha}"
        )));
    }
    grid_side(n)?;
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "spacing must be positive, got {d}"
        )));
    }
    Ok(n as f64 * d * d / 9.0)
}

/// Left-hand side of the row-spacing condition, `ln(m/(2L) - 1/2) / (2L)`,
/// or `None` when the logarithm is undefined.
pub fn grid_l_condition_value(m: usize, l: usize) -> Option<f64> {
    if l == 0 {
        return None;
    }
    let arg = m as f64 / (2.0 * l as f64) - 0.5;
    (arg > 0.0).then(|| arg.ln() / (2.0 * l as f64))
}

/// Whether spacing `l` provably lets the row construction deliver on an
/// `m x m` grid with `alpha = 2`.
pub fn grid_l_condition(m: usize, l: usize) -> bool {
    grid_l_condition_value(m, l).is_some_and(|v| v >= 1.0)
}

/// `127 ln n`, the ceiling on the conversion ratio.
pub fn theorem3_ceiling(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two nodes, got {n}"
        )));
    }
    Ok(127.0 * (n as f64).ln())
}
