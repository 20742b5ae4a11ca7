//! Crossing probabilities of rectangles as functions of `p`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::curve::SweepCurve;
use crate::error::{Error, Result};
use crate::lattice::RectangleRegion;

use super::events::connected;
use super::sweep::{direct_sweep, newman_ziff_sweep, ConnectionEvent, DirectSweep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Left to right, `H(n, m)`.
    Horizontal,
    /// Bottom to top, `V(n, m)`.
    Vertical,
}

impl Direction {
    /// The two sides joined by the crossing.
    pub fn sides(self, rect: &RectangleRegion) -> (Vec<usize>, Vec<usize>) {
        match self {
            Direction::Horizontal => (rect.left(), rect.right()),
            Direction::Vertical => (rect.bottom(), rect.top()),
        }
    }

    pub fn event_name(self, rect: &RectangleRegion) -> String {
        let tag = match self {
            Direction::Horizontal => 'H',
            Direction::Vertical => 'V',
        };
        format!("{tag}({}, {})", rect.width(), rect.height())
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h" | "horizontal" => Ok(Direction::Horizontal),
            "v" | "vertical" => Ok(Direction::Vertical),
            _ => Err(Error::Input(format!("unknown crossing direction {s:?} (use h or v)"))),
        }
    }
}

/// Newman-Ziff curve of the crossing probability.
pub fn crossing_sweep(rect: &RectangleRegion, dir: Direction, p_grid: &[f64], replicas: u64, seed: u64) -> Result<SweepCurve> {
    let (a, b) = dir.sides(rect);
    ConnectionEvent::new(rect.graph(), a.clone(), b.clone())?;
    newman_ziff_sweep(
        rect.num_edges(),
        || ConnectionEvent::new(rect.graph(), a.clone(), b.clone()).expect("sides checked above"),
        p_grid,
        replicas,
        seed,
    )
}

/// Direct Monte Carlo curve of the crossing probability.
pub fn crossing_direct(rect: &RectangleRegion, dir: Direction, p_grid: &[f64], replicas: u64, seed: u64) -> Result<DirectSweep> {
    let (a, b) = dir.sides(rect);
    direct_sweep(
        rect.num_edges(),
        |c: &Configuration| connected(rect.graph(), c, &a, &b).expect("sample sized to the rectangle"),
        p_grid,
        replicas,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_name() {
        assert_eq!("H".parse::<Direction>().unwrap(), Direction::Horizontal);
        assert_eq!("vertical".parse::<Direction>().unwrap(), Direction::Vertical);
        assert!("x".parse::<Direction>().is_err());
        let r = RectangleRegion::new(4, 3).unwrap();
        assert_eq!(Direction::Vertical.event_name(&r), "V(4, 3)");
    }

    #[test]
    fn transposed_rectangles_agree() {
        let h = crossing_sweep(&RectangleRegion::new(3, 5).unwrap(), Direction::Horizontal, &[0.5], 20_000, 3).unwrap();
        let v = crossing_sweep(&RectangleRegion::new(5, 3).unwrap(), Direction::Vertical, &[0.5], 20_000, 4).unwrap();
        let (a, b) = (h.point(0), v.point(0));
        assert!((a.value - b.value).abs() < 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt());
    }

    #[test]
    fn sweep_and_direct_agree() {
        let r = RectangleRegion::new(6, 4).unwrap();
        let grid = [0.3, 0.5, 0.7];
        let nz = crossing_sweep(&r, Direction::Horizontal, &grid, 20_000, 1).unwrap();
        let mc = crossing_direct(&r, Direction::Horizontal, &grid, 20_000, 2).unwrap();
        for j in 0..grid.len() {
            assert!(mc.agrees_with(j, nz.estimate[j], nz.stderr[j], 3.0));
        }
    }
}
