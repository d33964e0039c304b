//! Minimal 2D geometry for robot poses and task targets. Units are
//! centimetres throughout.

use serde::{Deserialize, Serialize};

/// A point in the plane, in centimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// Euclidean distance between two points, in centimetres.
pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Move from `from` at most `step` centimetres straight towards `to`.
/// Arrives exactly at `to` when the remaining distance is within `step`.
pub fn step_toward(from: Point, to: Point, step: f64) -> Point {
    let d = distance(from, to);
    if d <= step || d == 0.0 {
        return to;
    }
    let t = step / d;
    Point::new(from.x + (to.x - from.x) * t, from.y + (to.y - from.y) * t)
}
