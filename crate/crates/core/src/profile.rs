//! Shape diagnostics of a grid function: sign class, interior zeros,
//! refined extrema and symmetry defects.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Relative band below which a sign excursion is treated as roundoff.
pub const SIGN_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Positive,
    Negative,
    SignChanging,
}

impl SignClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignClass::Positive => "positive",
            SignClass::Negative => "negative",
            SignClass::SignChanging => "sign_changing",
        }
    }

    pub fn is_constant_sign(&self) -> bool {
        !matches!(self, SignClass::SignChanging)
    }
}

impl std::fmt::Display for SignClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerProfile {
    pub sign_class: SignClass,
    /// Interior zeros, located by linear interpolation between nodes.
    pub zeros: Vec<f64>,
    pub max_point: f64,
    pub max_value: f64,
    pub min_point: f64,
    pub min_value: f64,
    /// Depth of the smaller lobe relative to the larger one; 0 for
    /// constant-sign functions.
    pub m_bar: f64,
    pub positive_part_symmetry_defect: f64,
    pub negative_part_symmetry_defect: f64,
    /// Norm of the even part relative to the norm of the function.
    pub odd_defect: f64,
}

struct Extremum {
    point: f64,
    value: f64,
}

/// Three-point parabola through the node `i` and its neighbours.
fn refine(u: &GridFunction, i: usize) -> Extremum {
    let v = u.values();
    let h = u.spacing();
    let x = u.interval().node(u.n(), i);
    let left = if i == 0 { 0.0 } else { v[i - 1] };
    let right = if i + 1 == v.len() { 0.0 } else { v[i + 1] };
    let centre = v[i];
    let curvature = left - 2.0 * centre + right;
    if curvature == 0.0 {
        return Extremum {
            point: x,
            value: centre,
        };
    }
    let offset = (0.5 * (left - right) / curvature).clamp(-1.0, 1.0);
    Extremum {
        point: x + offset * h,
        value: centre - 0.125 * (left - right) * (left - right) / curvature,
    }
}

/// Relative L² distance between `part` and its mirror image about `centre`.
fn reflection_defect(u: &GridFunction, part: impl Fn(f64) -> f64, centre: f64) -> f64 {
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (x, &v) in u.nodes().zip(u.values()) {
        let here = part(v);
        let mirrored = part(u.interpolate(2.0 * centre - x));
        diff += (here - mirrored) * (here - mirrored);
        norm += here * here;
    }
    if norm == 0.0 {
        0.0
    } else {
        (diff / norm).sqrt()
    }
}

pub fn analyze(u: &GridFunction) -> Result<MinimizerProfile> {
    let v = u.values();
    let n = u.n();
    let sup = u.sup_norm();
    if sup == 0.0 {
        return Err(Error::DegenerateInput("cannot analyze the zero function"));
    }

    let (i_max, i_min) = v.iter().enumerate().fold((0, 0), |(im, jm), (k, &x)| {
        (
            if x > v[im] { k } else { im },
            if x < v[jm] { k } else { jm },
        )
    });
    let max = refine(u, i_max);
    let min = refine(u, i_min);

    let band = SIGN_BAND * sup;
    let constant_sign = v[i_max] * v[i_min] > -SIGN_BAND * sup * sup;
    let sign_class = if !constant_sign {
        SignClass::SignChanging
    } else if v[i_max] >= -v[i_min] {
        SignClass::Positive
    } else {
        SignClass::Negative
    };

    let mut zeros = Vec::new();
    if !constant_sign {
        let mut last: Option<(f64, f64)> = None;
        for (x, &y) in u.nodes().zip(v) {
            if y.abs() <= band {
                continue;
            }
            if let Some((xp, yp)) = last {
                if yp.signum() != y.signum() {
                    zeros.push(xp + (x - xp) * yp / (yp - y));
                }
            }
            last = Some((x, y));
        }
    }

    let m_bar = if constant_sign {
        0.0
    } else {
        let (a, b) = (max.value.abs(), min.value.abs());
        a.min(b) / a.max(b)
    };

    let positive_part_symmetry_defect = reflection_defect(u, |y| y.max(0.0), max.point);
    let negative_part_symmetry_defect = reflection_defect(u, |y| y.min(0.0), min.point);

    let mut even = 0.0;
    let mut total = 0.0;
    for i in 0..n {
        let s = v[i] + v[n - 1 - i];
        even += s * s;
        total += v[i] * v[i];
    }
    let odd_defect = 0.5 * (even / total).sqrt();

    Ok(MinimizerProfile {
        sign_class,
        zeros,
        max_point: max.point,
        max_value: max.value,
        min_point: min.point,
        min_value: min.value,
        m_bar,
        positive_part_symmetry_defect,
        negative_part_symmetry_defect,
        odd_defect,
    })
}
