//! Brute-force covering numbers of the near-optimal set
//! `S(ε) = {x : Δ(x⋆, x) ≤ ε}`, used to certify a preset's zooming dimension.

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Greedy ℓ∞ cover of the near-optimal grid points.
///
/// Grid points sit at cell centres `(i + 1/2)/g` on each axis and are visited
/// in lexicographic order; each uncovered point becomes the lower corner of a
/// new ball of radius `eps` (centre shifted by `eps` on every axis).
pub fn covering_number(env: &Environment, eps: f64, grid_resolution: usize) -> Result<usize> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::param("eps", format!("must be > 0, got {eps}")));
    }
    if grid_resolution < 8 {
        return Err(Error::param(
            "grid_resolution",
            format!("must be >= 8, got {grid_resolution}"),
        ));
    }
    let d = env.dim();
    let total = grid_resolution
        .checked_pow(d as u32)
        .filter(|&n| n <= 1 << 24)
        .ok_or_else(|| Error::param("grid_resolution", "grid too large for this dimension"))?;

    let g = grid_resolution as f64;
    let mut centres: Vec<Vec<f64>> = Vec::new();
    let mut coords = vec![0.0; d];
    for flat in 0..total {
        let mut rest = flat;
        for axis in (0..d).rev() {
            coords[axis] = ((rest % grid_resolution) as f64 + 0.5) / g;
            rest /= grid_resolution;
        }
        let x = Point::new(coords.clone())?;
        if env.optimality_gap(&x) > eps {
            continue;
        }
        let covered = centres
            .iter()
            .any(|c| c.iter().zip(&coords).all(|(a, b)| (a - b).abs() <= eps));
        if !covered {
            centres.push(coords.iter().map(|v| v + eps).collect());
        }
    }
    Ok(centres.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{RewardFunction, TransferFunction};

    fn cone(d: usize, opt: f64) -> Environment {
        Environment::new(
            RewardFunction::cone_peak(Point::splat(d, opt).unwrap()),
            TransferFunction::linear(),
        )
    }

    #[test]
    fn whole_domain_is_one_ball() {
        assert_eq!(covering_number(&cone(1, 0.5), 0.5, 64).unwrap(), 1);
        assert_eq!(covering_number(&cone(1, 0.3), 0.75, 64).unwrap(), 1);
    }

    #[test]
    fn cone_count_is_bounded() {
        for d in 1..=2 {
            for k in 2..=5 {
                let n = covering_number(&cone(d, 0.3), (-(k as f64)).exp2(), 64).unwrap();
                assert!((1..=3usize.pow(d as u32)).contains(&n), "d={d} k={k} n={n}");
            }
        }
    }

    #[test]
    fn ridge_doubles() {
        let env = Environment::new(
            RewardFunction::ridge(Point::splat(2, 0.5).unwrap(), 1).unwrap(),
            TransferFunction::linear(),
        );
        let counts: Vec<usize> = (2..=5)
            .map(|k| covering_number(&env, (-(k as f64)).exp2(), 64).unwrap())
            .collect();
        // frozen from the same greedy run by hand: 2 columns × ceil(64/(128ε+1)) rows
        assert_eq!(counts, vec![4, 8, 16, 26]);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(covering_number(&cone(1, 0.5), 0.0, 64).is_err());
        assert!(covering_number(&cone(1, 0.5), 0.1, 4).is_err());
    }
}
