//! Plain 2-D geometry: points and the rectangular world.

use rand::Rng;

/// A point in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        libm::sqrt(dx * dx + dy * dy)
    }
}

/// Axis-aligned world rectangle spanning (0,0)..(width,height), meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldBounds {
    pub width: f64,
    pub height: f64,
}

impl WorldBounds {
    pub const fn new(width: f64, height: f64) -> Self {
        WorldBounds { width, height }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.height
    }

    /// Draw a uniform point inside the rectangle.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let x = rng.gen_range(0.0..=self.width);
        let y = rng.gen_range(0.0..=self.height);
        Point::new(x, y)
    }
}
