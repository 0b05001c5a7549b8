//! Square-grid network topology.
//!
//! The serving stationary BTS sits at the origin, at the center of a square
//! cell of side `L`. Interfering stationary BTSs occupy the remaining points
//! of a `(2·tiers+1)²` lattice with spacing `L`. Routine UEs fill the serving
//! cell on a regular lattice; the incident scene is a rectangle centered on
//! the midpoint of the serving cell's east edge, where the mobile BTS is
//! parked, and its UEs fill the rectangle on a lattice of their own.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("{name} must be a positive finite length, got {value}")]
    NonPositiveLength { name: &'static str, value: f64 },
    #[error("{name} must be at least {min}, got {value}")]
    TooFew {
        name: &'static str,
        min: usize,
        value: usize,
    },
}

/// A position in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn offset(&self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncidentScene {
    /// Mobile BTS position, at the center of the scene.
    pub center: Point,
    pub width: f64,
    pub height: f64,
    pub ues: Vec<Point>,
}

impl IncidentScene {
    pub fn contains(&self, p: Point) -> bool {
        (p.x - self.center.x).abs() <= self.width / 2.0
            && (p.y - self.center.y).abs() <= self.height / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellLayout {
    pub side_length: f64,
    pub tiers: usize,
    pub serving_bts: Point,
    /// Every stationary BTS other than the serving one, row-major from the
    /// south-west corner of the grid.
    pub interferer_bts: Vec<Point>,
    pub routine_ues: Vec<Point>,
    pub incident: IncidentScene,
}

impl CellLayout {
    /// Every stationary BTS, serving BTS included.
    pub fn stationary_bts(&self) -> impl Iterator<Item = Point> + '_ {
        std::iter::once(self.serving_bts).chain(self.interferer_bts.iter().copied())
    }

    /// Whether `p` lies inside (or on the boundary of) the serving cell.
    pub fn in_serving_cell(&self, p: Point) -> bool {
        let half = self.side_length / 2.0;
        (p.x - self.serving_bts.x).abs() <= half && (p.y - self.serving_bts.y).abs() <= half
    }

    /// Same layout shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> CellLayout {
        let shift = |ps: &[Point]| ps.iter().map(|p| p.offset(dx, dy)).collect();
        CellLayout {
            side_length: self.side_length,
            tiers: self.tiers,
            serving_bts: self.serving_bts.offset(dx, dy),
            interferer_bts: shift(&self.interferer_bts),
            routine_ues: shift(&self.routine_ues),
            incident: IncidentScene {
                center: self.incident.center.offset(dx, dy),
                width: self.incident.width,
                height: self.incident.height,
                ues: shift(&self.incident.ues),
            },
        }
    }

    /// Every coordinate multiplied by `factor` (scene dimensions included).
    pub fn scaled(&self, factor: f64) -> CellLayout {
        let scale = |ps: &[Point]| {
            ps.iter()
                .map(|p| Point::new(p.x * factor, p.y * factor))
                .collect()
        };
        let c = self.incident.center;
        CellLayout {
            side_length: self.side_length * factor,
            tiers: self.tiers,
            serving_bts: Point::new(self.serving_bts.x * factor, self.serving_bts.y * factor),
            interferer_bts: scale(&self.interferer_bts),
            routine_ues: scale(&self.routine_ues),
            incident: IncidentScene {
                center: Point::new(c.x * factor, c.y * factor),
                width: self.incident.width * factor,
                height: self.incident.height * factor,
                ues: scale(&self.incident.ues),
            },
        }
    }
}

/// Rows × columns for `n` points: rows is the largest divisor of `n` that
/// does not exceed `√n`, so rows ≤ columns. Primes degrade to a single row.
pub fn lattice_shape(n: usize) -> (usize, usize) {
    if n == 0 {
        return (0, 0);
    }
    let rows = (1..=n)
        .take_while(|r| r * r <= n)
        .filter(|r| n.is_multiple_of(*r))
        .last()
        .unwrap_or(1);
    (rows, n / rows)
}

/// `n` points at the cell centers of a rows × columns partition of the
/// `width × height` rectangle centered at `center`. Columns run along x.
pub fn lattice_points(n: usize, center: Point, width: f64, height: f64) -> Vec<Point> {
    let (rows, cols) = lattice_shape(n);
    let x0 = center.x - width / 2.0;
    let y0 = center.y - height / 2.0;
    let mut points = Vec::with_capacity(n);
    for r in 0..rows {
        for c in 0..cols {
            points.push(Point::new(
                x0 + (c as f64 + 0.5) * width / cols as f64,
                y0 + (r as f64 + 0.5) * height / rows as f64,
            ));
        }
    }
    points
}

fn positive(name: &'static str, value: f64) -> Result<f64, LayoutError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(LayoutError::NonPositiveLength { name, value })
    }
}

fn at_least(name: &'static str, min: usize, value: usize) -> Result<usize, LayoutError> {
    if value >= min {
        Ok(value)
    } else {
        Err(LayoutError::TooFew { name, min, value })
    }
}

pub fn build_layout(
    side_length: f64,
    tiers: usize,
    n_routine: usize,
    scene_width: f64,
    scene_height: f64,
    n_incident: usize,
) -> Result<CellLayout, LayoutError> {
    positive("side_length", side_length)?;
    positive("scene_width", scene_width)?;
    positive("scene_height", scene_height)?;
    at_least("tiers", 1, tiers)?;
    at_least("n_routine", 1, n_routine)?;
    at_least("n_incident", 1, n_incident)?;

    let t = tiers as i64;
    let mut interferer_bts = Vec::with_capacity(((2 * tiers + 1).pow(2)) - 1);
    for j in -t..=t {
        for i in -t..=t {
            if i == 0 && j == 0 {
                continue;
            }
            interferer_bts.push(Point::new(i as f64 * side_length, j as f64 * side_length));
        }
    }

    let serving_bts = Point::ORIGIN;
    let routine_ues = lattice_points(n_routine, serving_bts, side_length, side_length);
    let center = Point::new(side_length / 2.0, 0.0);
    let ues = lattice_points(n_incident, center, scene_width, scene_height);

    Ok(CellLayout {
        side_length,
        tiers,
        serving_bts,
        interferer_bts,
        routine_ues,
        incident: IncidentScene {
            center,
            width: scene_width,
            height: scene_height,
            ues,
        },
    })
}
