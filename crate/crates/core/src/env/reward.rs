//! Latent 1-Lipschitz reward functions on `[0,1]^d`.

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Clone, Debug, PartialEq)]
pub enum RewardShape {
    /// `1 − ‖x − x⋆‖∞`.
    ConePeak,
    /// `1 − max_{i<k} |x_i − x⋆_i|`; flat along the remaining axes.
    Ridge { k: usize },
    /// Lower Lipschitz envelope `max_j (v_j − ‖x − p_j‖∞)` of anchor values.
    Table { anchors: Vec<(Point, f64)> },
}

/// A 1-Lipschitz reward `f` together with a maximiser `x⋆`.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardFunction {
    shape: RewardShape,
    optimum: Point,
}

impl RewardFunction {
    pub fn cone_peak(optimum: Point) -> Self {
        Self {
            shape: RewardShape::ConePeak,
            optimum,
        }
    }

    pub fn ridge(optimum: Point, k: usize) -> Result<Self> {
        if k == 0 || k > optimum.dim() {
            return Err(Error::param(
                "k",
                format!("must be in 1..={}, got {k}", optimum.dim()),
            ));
        }
        Ok(Self {
            shape: RewardShape::Ridge { k },
            optimum,
        })
    }

    /// Anchors must already be mutually 1-Lipschitz, otherwise the envelope
    /// would not interpolate them.
    pub fn table(anchors: Vec<(Point, f64)>) -> Result<Self> {
        let Some(first) = anchors.first() else {
            return Err(Error::param("anchor", "at least one anchor is required"));
        };
        let d = first.0.dim();
        for (i, (p, v)) in anchors.iter().enumerate() {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.dim(),
                });
            }
            if !v.is_finite() {
                return Err(Error::param("anchor", format!("value {v} is not finite")));
            }
            for (q, w) in &anchors[..i] {
                if (v - w).abs() > p.linf_unchecked(q) + 1e-12 {
                    return Err(Error::param(
                        "anchor",
                        format!("anchors {p} and {q} violate the 1-Lipschitz condition"),
                    ));
                }
            }
        }
        let optimum = anchors
            .iter()
            .fold(first, |best, a| if a.1 > best.1 { a } else { best })
            .0
            .clone();
        Ok(Self {
            shape: RewardShape::Table { anchors },
            optimum,
        })
    }

    pub fn shape(&self) -> &RewardShape {
        &self.shape
    }

    pub fn optimum(&self) -> &Point {
        &self.optimum
    }

    pub fn dim(&self) -> usize {
        self.optimum.dim()
    }

    /// `f(x)`, rejecting points of the wrong dimension.
    pub fn evaluate(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(self.value(x))
    }

    #[inline]
    pub(crate) fn value(&self, x: &Point) -> f64 {
        match &self.shape {
            RewardShape::ConePeak => 1.0 - x.linf_unchecked(&self.optimum),
            RewardShape::Ridge { k } => {
                let dev = x.coords()[..*k]
                    .iter()
                    .zip(&self.optimum.coords()[..*k])
                    .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
                1.0 - dev
            }
            RewardShape::Table { anchors } => anchors
                .iter()
                .map(|(p, v)| v - x.linf_unchecked(p))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// `f(x)` for a reward function.
pub fn evaluate_f(r: &RewardFunction, x: &Point) -> Result<f64> {
    r.evaluate(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn cone_values() {
        let f = RewardFunction::cone_peak(pt(&[0.5]));
        assert_eq!(f.evaluate(&pt(&[0.5])).unwrap(), 1.0);
        assert!((f.evaluate(&pt(&[0.3])).unwrap() - 0.8).abs() < 1e-15);
        assert!(f.evaluate(&pt(&[0.3, 0.3])).is_err());
    }

    #[test]
    fn ridge_ignores_flat_axes() {
        let f = RewardFunction::ridge(pt(&[0.5, 0.5]), 1).unwrap();
        assert_eq!(f.evaluate(&pt(&[0.5, 0.1])).unwrap(), 1.0);
        assert!((f.evaluate(&pt(&[0.2, 0.9])).unwrap() - 0.7).abs() < 1e-15);
        assert!(RewardFunction::ridge(pt(&[0.5, 0.5]), 3).is_err());
        assert!(RewardFunction::ridge(pt(&[0.5, 0.5]), 0).is_err());
    }

    #[test]
    fn table_interpolates_and_peaks() {
        let f = RewardFunction::table(vec![(pt(&[0.2]), 0.9), (pt(&[0.7]), 0.6)]).unwrap();
        assert_eq!(f.optimum(), &pt(&[0.2]));
        assert!((f.evaluate(&pt(&[0.2])).unwrap() - 0.9).abs() < 1e-15);
        assert!((f.evaluate(&pt(&[0.7])).unwrap() - 0.6).abs() < 1e-15);
        assert!(RewardFunction::table(vec![(pt(&[0.2]), 0.9), (pt(&[0.3]), 0.1)]).is_err());
        assert!(RewardFunction::table(vec![]).is_err());
    }

    #[test]
    fn lipschitz_and_maximal_on_random_pairs() {
        let fs = vec![
            RewardFunction::cone_peak(pt(&[0.3, 0.8])),
            RewardFunction::ridge(pt(&[0.6, 0.1]), 1).unwrap(),
            RewardFunction::table(vec![(pt(&[0.1, 0.1]), 0.5), (pt(&[0.9, 0.4]), 0.8)]).unwrap(),
        ];
        let mut rng = RandomStream::new(5, 0);
        for f in &fs {
            let top = f.evaluate(f.optimum()).unwrap();
            for _ in 0..5_000 {
                let x = Point::sample_unit(2, &mut rng);
                let y = Point::sample_unit(2, &mut rng);
                let (fx, fy) = (f.evaluate(&x).unwrap(), f.evaluate(&y).unwrap());
                assert!((fx - fy).abs() <= x.linf_unchecked(&y) + 1e-12);
                assert!(fx <= top + 1e-12);
            }
        }
    }
}
