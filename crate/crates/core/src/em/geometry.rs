use super::Position;
use crate::error::{Error, Result};

/// Surface element positions (on the yz-plane) and user positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    lis: Vec<Position>,
    ues: Vec<Position>,
}

impl Geometry {
    pub fn new(lis: Vec<Position>, ues: Vec<Position>) -> Result<Self> {
        if lis.is_empty() || ues.is_empty() {
            return Err(Error::InvalidGeometry(format!(
                "need at least one surface element and one user, got {} and {}",
                lis.len(),
                ues.len()
            )));
        }
        if let Some(p) = lis.iter().find(|p| p.x != 0.0) {
            return Err(Error::InvalidGeometry(format!("surface element off the yz-plane at {p:?}")));
        }
        if let Some(p) = lis.iter().chain(&ues).find(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite())) {
            return Err(Error::InvalidGeometry(format!("non-finite position {p:?}")));
        }
        check_distinct(&lis, &lis, "surface elements")?;
        check_distinct(&ues, &ues, "users")?;
        check_distinct(&ues, &lis, "user and surface element")?;
        Ok(Self { lis, ues })
    }

    pub fn lis(&self) -> &[Position] {
        &self.lis
    }

    pub fn ues(&self) -> &[Position] {
        &self.ues
    }

    pub fn n(&self) -> usize {
        self.lis.len()
    }

    pub fn m(&self) -> usize {
        self.ues.len()
    }
}

fn check_distinct(a: &[Position], b: &[Position], what: &str) -> Result<()> {
    let same_set = std::ptr::eq(a, b);
    for (i, p) in a.iter().enumerate() {
        let others = if same_set { &b[i + 1..] } else { b };
        if let Some(q) = others.iter().find(|q| (**q - *p).norm() == 0.0) {
            return Err(Error::InvalidGeometry(format!("coincident {what} at {q:?}")));
        }
    }
    Ok(())
}

/// `count` points from `-length/2` to `length/2`, endpoints included. A
/// single point sits at the center.
fn centered_grid(length: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    let step = length / (count - 1) as f64;
    let half = length / 2.0;
    (0..count)
        .map(|i| {
            // Mirror the upper half so the grid is exactly symmetric.
            let j = count - 1 - i;
            if i <= j {
                -half + step * i as f64
            } else {
                half - step * j as f64
            }
        })
        .collect()
}

/// Uniform line of elements along y, centered at the origin, spacing
/// `length / (count - 1)`. A single element sits at the origin.
pub fn linear_array(length: f64, count: usize) -> Result<Vec<Position>> {
    if count == 0 {
        return Err(Error::InvalidParameter("linear array needs at least one element".into()));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidParameter(format!("array length must be positive, got {length}")));
    }
    Ok(centered_grid(length, count)
        .into_iter()
        .map(|y| Position::new(0.0, y, 0.0))
        .collect())
}

/// Rectangular grid on the yz-plane, centered at the origin, endpoints
/// included on both axes. Ordered with z varying fastest.
pub fn planar_array(len_y: f64, len_z: f64, count_y: usize, count_z: usize) -> Result<Vec<Position>> {
    if count_y == 0 || count_z == 0 {
        return Err(Error::InvalidParameter(format!(
            "planar array needs at least one element per axis, got {count_y}x{count_z}"
        )));
    }
    if !(len_y.is_finite() && len_y > 0.0 && len_z.is_finite() && len_z > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "planar array side lengths must be positive, got {len_y}x{len_z}"
        )));
    }
    let ys = centered_grid(len_y, count_y);
    let zs = centered_grid(len_z, count_z);
    Ok(ys
        .iter()
        .flat_map(|&y| zs.iter().map(move |&z| Position::new(0.0, y, z)))
        .collect())
}

/// Users on a y-segment at `x = distance_x`, `z = 0`. A single user sits at
/// `y = 0`.
pub fn ue_line(distance_x: f64, length: f64, count: usize) -> Result<Vec<Position>> {
    if count == 0 {
        return Err(Error::InvalidParameter("user line needs at least one user".into()));
    }
    if !(distance_x.is_finite() && distance_x > 0.0) {
        return Err(Error::InvalidParameter(format!("user distance must be positive, got {distance_x}")));
    }
    if !(length.is_finite() && length >= 0.0) {
        return Err(Error::InvalidParameter(format!("user line length must be non-negative, got {length}")));
    }
    if count == 1 {
        return Ok(vec![Position::new(distance_x, 0.0, 0.0)]);
    }
    if length == 0.0 {
        return Err(Error::InvalidParameter(format!("{count} users on a zero-length line would coincide")));
    }
    Ok(centered_grid(length, count)
        .into_iter()
        .map(|y| Position::new(distance_x, y, 0.0))
        .collect())
}
