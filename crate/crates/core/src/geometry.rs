//! Dyadic multiscale partition of `[0,1]^d` under the ℓ∞ metric.
//!
//! A cube at depth `h` has edge `2^-h` and integer index `i` per axis,
//! covering `[i·2^-h, (i+1)·2^-h]`. Points on shared faces belong to several
//! closed cubes; [`Cube::owns`] resolves that with half-open intervals,
//! closing the last interval on each axis at 1.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

/// Deepest representable cube (indices are stored as `u64`).
pub const MAX_DEPTH: u32 = 62;

/// Edge length of a depth-`h` cube: `2^-h`.
pub fn radius(h: u32) -> f64 {
    (-(h as f64)).exp2()
}

pub fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::Dimension {
            got: d,
            max: MAX_DIM,
        });
    }
    Ok(())
}

/// A location in `[0,1]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_dim(coords.len())?;
        for (index, &value) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfDomain { index, value });
            }
        }
        Ok(Self { coords })
    }

    /// The point with every coordinate equal to `value`.
    pub fn splat(d: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; d])
    }

    pub(crate) fn zeros(d: usize) -> Self {
        Self {
            coords: vec![0.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn linf_distance(&self, other: &Point) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self.linf_unchecked(other))
    }

    #[inline]
    pub(crate) fn linf_unchecked(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Uniform point in `[0,1]^d`, consuming exactly `d` draws.
    pub fn sample_unit(d: usize, rng: &mut RandomStream) -> Self {
        Self {
            coords: (0..d).map(|_| rng.next_f64()).collect(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// `max_i |p_i − q_i|`.
pub fn linf_distance(p: &Point, q: &Point) -> Result<f64> {
    p.linf_distance(q)
}

/// An axis-aligned dyadic cube.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    depth: u32,
    index: Vec<u64>,
}

impl Cube {
    pub fn new(depth: u32, index: Vec<u64>) -> Result<Self> {
        check_dim(index.len())?;
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::param(
                "depth",
                format!("must be in 1..={MAX_DEPTH}, got {depth}"),
            ));
        }
        let cells = 1u64 << depth;
        if let Some(&bad) = index.iter().find(|&&i| i >= cells) {
            return Err(Error::InvalidCube { depth, index: bad });
        }
        Ok(Self { depth, index })
    }

    /// The depth-`depth` cube that owns `p` under the half-open rule.
    pub fn owner_of(depth: u32, p: &Point) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::param(
                "depth",
                format!("must be in 1..={MAX_DEPTH}, got {depth}"),
            ));
        }
        let cells = 1u64 << depth;
        let index = p
            .coords()
            .iter()
            .map(|&c| ((c * cells as f64) as u64).min(cells - 1))
            .collect();
        Ok(Self { depth, index })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn index(&self) -> &[u64] {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn edge(&self) -> f64 {
        radius(self.depth)
    }

    pub fn volume(&self) -> f64 {
        self.edge().powi(self.dim() as i32)
    }

    /// Lower and upper bounds of the cube along `axis`.
    pub fn interval(&self, axis: usize) -> (f64, f64) {
        let r = self.edge();
        let lo = self.index[axis] as f64 * r;
        (lo, lo + r)
    }

    /// Closed-cube membership.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        self.check_point(p)?;
        Ok((0..self.dim()).all(|axis| {
            let (lo, hi) = self.interval(axis);
            let c = p.coords()[axis];
            lo <= c && c <= hi
        }))
    }

    /// Half-open membership; exactly one cube per depth owns each point.
    pub fn owns(&self, p: &Point) -> Result<bool> {
        self.check_point(p)?;
        let last = (1u64 << self.depth) - 1;
        Ok((0..self.dim()).all(|axis| {
            let (lo, hi) = self.interval(axis);
            let c = p.coords()[axis];
            lo <= c && (c < hi || (self.index[axis] == last && c <= hi))
        }))
    }

    /// The `2^d` sub-cubes one level down, in lexicographic index order.
    pub fn children(&self) -> Vec<Cube> {
        self.children_iter().collect()
    }

    /// Lazily enumerates the children without materialising the list.
    pub fn children_iter(&self) -> Children<'_> {
        Children {
            parent: self,
            next: 0,
            count: 1u64 << self.dim(),
        }
    }

    pub fn parent(&self) -> Option<Cube> {
        (self.depth > 1).then(|| Cube {
            depth: self.depth - 1,
            index: self.index.iter().map(|i| i >> 1).collect(),
        })
    }

    /// A uniform point in the cube; consumes exactly `d` draws.
    pub fn sample_uniform(&self, rng: &mut RandomStream) -> Point {
        let mut p = Point::zeros(self.dim());
        self.sample_into(rng, &mut p);
        p
    }

    /// Same as [`Cube::sample_uniform`] but reuses `out`'s storage.
    pub fn sample_into(&self, rng: &mut RandomStream, out: &mut Point) {
        debug_assert_eq!(out.dim(), self.dim());
        let r = self.edge();
        for (c, &i) in out.coords.iter_mut().zip(&self.index) {
            *c = (i as f64 + rng.next_f64()) * r;
        }
    }

    /// Stable text id, `h:i1.i2.….id`.
    pub fn label(&self) -> String {
        self.to_string()
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.depth)?;
        for (k, i) in self.index.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Iterator over a cube's children.
pub struct Children<'a> {
    parent: &'a Cube,
    next: u64,
    count: u64,
}

impl Iterator for Children<'_> {
    type Item = Cube;

    fn next(&mut self) -> Option<Cube> {
        if self.next >= self.count {
            return None;
        }
        let k = self.next;
        self.next += 1;
        let d = self.parent.dim();
        let index = self
            .parent
            .index
            .iter()
            .enumerate()
            .map(|(axis, &i)| 2 * i + ((k >> (d - 1 - axis)) & 1))
            .collect();
        Some(Cube {
            depth: self.parent.depth + 1,
            index,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Children<'_> {}

/// The `2^d` depth-1 cubes tiling `[0,1]^d`, lexicographically ordered.
pub fn root_cubes(d: usize) -> Result<Vec<Cube>> {
    check_dim(d)?;
    let n = 1u64 << d;
    Ok((0..n)
        .map(|k| Cube {
            depth: 1,
            index: (0..d).map(|axis| (k >> (d - 1 - axis)) & 1).collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn radius_values() {
        assert_eq!(radius(0), 1.0);
        assert_eq!(radius(1), 0.5);
        assert_eq!(radius(3), 0.125);
        for h in 0..40 {
            assert_eq!(radius(h + 1), radius(h) / 2.0);
        }
    }

    #[test]
    fn roots() {
        let r1 = root_cubes(1).unwrap();
        assert_eq!(
            r1,
            vec![
                Cube::new(1, vec![0]).unwrap(),
                Cube::new(1, vec![1]).unwrap()
            ]
        );
        assert_eq!(root_cubes(2).unwrap().len(), 4);
        assert_eq!(root_cubes(3).unwrap().len(), 8);
        assert!(root_cubes(0).is_err());
        assert!(root_cubes(9).is_err());
        let r2 = root_cubes(2).unwrap();
        let idx: Vec<_> = r2.iter().map(|c| c.index().to_vec()).collect();
        assert_eq!(idx, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn children_of_2d_root() {
        let c = Cube::new(1, vec![0, 0]).unwrap();
        let kids = c.children();
        let idx: Vec<_> = kids.iter().map(|c| c.index().to_vec()).collect();
        assert_eq!(idx, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert!(kids.iter().all(|k| k.depth() == 2));
    }

    #[test]
    fn children_bisect_interval() {
        let c = Cube::new(2, vec![3]).unwrap();
        assert_eq!(
            c.children(),
            vec![
                Cube::new(3, vec![6]).unwrap(),
                Cube::new(3, vec![7]).unwrap()
            ]
        );
        for k in c.children() {
            assert_eq!(k.parent().unwrap(), c);
        }
    }

    #[test]
    fn children_volume_sums_to_parent() {
        for d in 1..=4 {
            let c = Cube::new(2, vec![1; d]).unwrap();
            let total: f64 = c.children().iter().map(Cube::volume).sum();
            assert!((total - c.volume()).abs() < 1e-15);
        }
    }

    #[test]
    fn containment() {
        let lo = Cube::new(1, vec![0]).unwrap();
        let hi = Cube::new(1, vec![1]).unwrap();
        assert!(lo.contains(&pt(&[0.25])).unwrap());
        assert!(!lo.contains(&pt(&[0.75])).unwrap());
        assert!(hi.contains(&pt(&[1.0])).unwrap());
        assert!(hi.owns(&pt(&[1.0])).unwrap());
        // shared face: closed in both, owned by the upper cube only
        assert!(lo.contains(&pt(&[0.5])).unwrap());
        assert!(!lo.owns(&pt(&[0.5])).unwrap());
        assert!(hi.owns(&pt(&[0.5])).unwrap());
        assert!(lo.contains(&pt(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn owner_agrees_with_owns() {
        let p = pt(&[0.5, 1.0]);
        let c = Cube::owner_of(3, &p).unwrap();
        assert_eq!(c.index(), &[4, 7]);
        assert!(c.owns(&p).unwrap());
    }

    #[test]
    fn distance() {
        let p = pt(&[0.0, 0.0]);
        let q = pt(&[0.3, 0.7]);
        assert_eq!(linf_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(linf_distance(&p, &q).unwrap(), 0.7);
        assert_eq!(linf_distance(&q, &p).unwrap(), 0.7);
        assert!(linf_distance(&p, &pt(&[0.1])).is_err());
    }

    #[test]
    fn point_validation() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![1.1]).is_err());
        assert!(Point::new(vec![-0.0, 1.0]).is_ok());
        assert!(Point::new(vec![0.5; 9]).is_err());
    }

    #[test]
    fn cube_validation() {
        assert!(Cube::new(0, vec![0]).is_err());
        assert!(Cube::new(2, vec![4]).is_err());
        assert!(Cube::new(2, vec![3]).is_ok());
    }

    #[test]
    fn labels() {
        assert_eq!(Cube::new(3, vec![1, 6, 0]).unwrap().label(), "3:1.6.0");
        assert_eq!(Cube::new(1, vec![1]).unwrap().label(), "1:1");
    }

    #[test]
    fn sampling_consumes_d_draws() {
        let c = Cube::new(2, vec![1, 2, 3]).unwrap();
        let mut a = RandomStream::new(11, 1);
        let mut b = RandomStream::new(11, 1);
        let _ = c.sample_uniform(&mut a);
        for _ in 0..3 {
            b.next_u64();
        }
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
