//! Pixel-space primitives shared by the simulator, executor, and rewards.

use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle in integer pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl Rect {
    pub fn new(x: i64, y: i64, w: i64, h: i64) -> Self {
        Rect { x, y, w, h }
    }

    /// Integer center, rounding toward the origin corner.
    pub fn center(&self) -> Point {
        Point {
            x: self.x + self.w / 2,
            y: self.y + self.h / 2,
        }
    }

    /// Half-open containment: the right/bottom edges are exclusive.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x && p.x < self.x + self.w && p.y >= self.y && p.y < self.y + self.h
    }

    /// Closed-rectangle intersection test; rectangles that merely touch count
    /// as intersecting.
    pub fn touches_or_overlaps(&self, other: &Rect) -> bool {
        self.x <= other.x + other.w
            && other.x <= self.x + self.w
            && self.y <= other.y + other.h
            && other.y <= self.y + self.h
    }

    pub fn area(&self) -> i64 {
        self.w.max(0) * self.h.max(0)
    }

    fn intersection_area(&self, other: &Rect) -> i64 {
        let ix = (self.x + self.w).min(other.x + other.w) - self.x.max(other.x);
        let iy = (self.y + self.h).min(other.y + other.h) - self.y.max(other.y);
        ix.max(0) * iy.max(0)
    }

    /// Intersection over union, 0.0 when both rectangles are degenerate.
    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0 {
            return 0.0;
        }
        inter as f64 / union as f64
    }
}

/// A pixel position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn l1_distance(&self, other: &Point) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

/// Screen or render resolution in pixels, serialized as a `[w, h]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct Resolution {
    pub w: u32,
    pub h: u32,
}

impl Resolution {
    pub fn new(w: u32, h: u32) -> Self {
        Resolution { w, h }
    }

    pub fn area(&self) -> u64 {
        u64::from(self.w) * u64::from(self.h)
    }

    /// True when `self` is the native aspect ratio scaled down, allowing one
    /// pixel of rounding slack in the height.
    pub fn aspect_matches(&self, native: Resolution) -> bool {
        let expected = (f64::from(self.w) * f64::from(native.h) / f64::from(native.w)).round();
        (f64::from(self.h) - expected).abs() <= 1.0
    }
}

impl From<(u32, u32)> for Resolution {
    fn from((w, h): (u32, u32)) -> Self {
        Resolution { w, h }
    }
}

impl From<Resolution> for (u32, u32) {
    fn from(r: Resolution) -> Self {
        (r.w, r.h)
    }
}

impl std::fmt::Display for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.w, self.h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_of_even_rect() {
        let r = Rect::new(100, 100, 40, 20);
        assert_eq!(r.center(), Point::new(120, 110));
    }

    #[test]
    fn contains_is_half_open() {
        let r = Rect::new(0, 0, 10, 10);
        assert!(r.contains(Point::new(0, 0)));
        assert!(r.contains(Point::new(9, 9)));
        assert!(!r.contains(Point::new(10, 0)));
    }

    #[test]
    fn touching_counts_as_intersecting() {
        let a = Rect::new(0, 0, 10, 10);
        let b = Rect::new(10, 0, 10, 10);
        let c = Rect::new(11, 0, 10, 10);
        assert!(a.touches_or_overlaps(&b));
        assert!(!a.touches_or_overlaps(&c));
    }

    #[test]
    fn iou_identical_is_one() {
        let a = Rect::new(5, 5, 20, 30);
        assert!((a.iou(&a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iou_disjoint_is_zero() {
        let a = Rect::new(0, 0, 10, 10);
        let b = Rect::new(100, 100, 10, 10);
        assert_eq!(a.iou(&b), 0.0);
    }

    #[test]
    fn aspect_check_allows_rounding() {
        let native = Resolution::new(1280, 800);
        assert!(Resolution::new(1280, 800).aspect_matches(native));
        assert!(Resolution::new(160, 100).aspect_matches(native));
        assert!(Resolution::new(333, 208).aspect_matches(native));
        assert!(!Resolution::new(640, 640).aspect_matches(native));
    }
}
