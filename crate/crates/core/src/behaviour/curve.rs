use serde::{Deserialize, Serialize};

use crate::domain::BehaviourPoint;

const MIN_DOTS: f64 = 5.0;
const EXTRA_DOTS: f64 = 45.0;
const LOW_ENERGY: [f64; 3] = [139.0, 0.0, 0.0];
const HIGH_ENERGY: [f64; 3] = [255.0, 255.0, 0.0];

/// Visual rendering of a behaviour point as a dotted quadratic Bezier curve
/// from `(0, 0)` to `(1, 0)`. Speed sets the number of dots, energy the dot
/// colour (dark red to yellow) and direction the height of the control point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Curve {
    pub dot_count: usize,
    pub dot_colour: [u8; 3],
    pub control_point: [f64; 2],
    pub dots: Vec<[f64; 2]>,
}

pub fn render_curve(p: &BehaviourPoint) -> Curve {
    let dot_count = (MIN_DOTS + EXTRA_DOTS * p.speed()).round() as usize;
    let e = p.energy();
    let mut dot_colour = [0u8; 3];
    for (c, (lo, hi)) in dot_colour.iter_mut().zip(LOW_ENERGY.iter().zip(HIGH_ENERGY.iter())) {
        *c = (lo + (hi - lo) * e).round() as u8;
    }
    let control = [0.5, p.direction()];
    let dots = (0..dot_count)
        .map(|i| {
            let t = i as f64 / (dot_count - 1) as f64;
            let u = 1.0 - t;
            // P0 = (0,0) and P2 = (1,0)
            [2.0 * u * t * control[0] + t * t, 2.0 * u * t * control[1]]
        })
        .collect();
    Curve {
        dot_count,
        dot_colour,
        control_point: control,
        dots,
    }
}
