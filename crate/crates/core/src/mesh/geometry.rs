//! Plane geometry helpers in the `(x, z)` plane.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub z: f64,
}

impl Point {
    pub const fn new(x: f64, z: f64) -> Self {
        Point { x, z }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.z * o.z
    }

    /// Scalar cross product `self x o`.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.z - self.z * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.z)
    }

    /// Counterclockwise rotation by a right angle.
    pub fn perp(self) -> Point {
        Point::new(-self.z, self.x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.z + o.z)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.z - o.z)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.z * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.z)
    }
}

/// Signed area of the triangle `abc`, positive when counterclockwise.
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// Circumcenter of the triangle `abc`.
pub fn circumcenter(a: Point, b: Point, c: Point) -> Point {
    let u = b - a;
    let v = c - a;
    let d = 2.0 * u.cross(v);
    let (uu, vv) = (u.dot(u), v.dot(v));
    a + Point::new((v.z * uu - u.z * vv) / d, (u.x * vv - v.x * uu) / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circumcenter_is_equidistant() {
        let (a, b, c) = (Point::new(0.1, -0.3), Point::new(2.0, 0.4), Point::new(0.7, 1.9));
        let o = circumcenter(a, b, c);
        let (ra, rb, rc) = ((a - o).norm(), (b - o).norm(), (c - o).norm());
        assert!((ra - rb).abs() < 1e-14 && (ra - rc).abs() < 1e-14);
    }

    #[test]
    fn orientation_sign() {
        let (a, b, c) = (Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0));
        assert_eq!(signed_area(a, b, c), 0.5);
        assert_eq!(signed_area(a, c, b), -0.5);
    }
}
