//! Extremum detection on sampled occupation curves.
//!
//! The full model superimposes small fast ripples (counter-rotating terms at
//! roughly `ω + ν`) on the slow exchange oscillation. A local extremum only
//! counts if its topographic prominence is at least
//! [`PROMINENCE_FRACTION`] of the curve's total range.

pub const PROMINENCE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub index: usize,
    pub t: f64,
    pub value: f64,
}

/// First interior local maximum of `v` whose prominence is at least
/// `PROMINENCE_FRACTION · (max v − min v)`.
pub fn first_maximum(t: &[f64], v: &[f64]) -> Option<Extremum> {
    assert_eq!(t.len(), v.len());
    let (lo, hi) = range(v)?;
    let needed = PROMINENCE_FRACTION * (hi - lo);
    if !(needed > 0.0) {
        return None;
    }
    let mut i = 1;
    while i + 1 < v.len() {
        if v[i] > v[i - 1] {
            // walk over a plateau
            let mut k = i;
            while k + 1 < v.len() && v[k + 1] == v[i] {
                k += 1;
            }
            if k + 1 < v.len() && v[k + 1] < v[i] && prominence(v, i) >= needed {
                return Some(Extremum {
                    index: i,
                    t: t[i],
                    value: v[i],
                });
            }
            i = k + 1;
        } else {
            i += 1;
        }
    }
    None
}

/// First interior local minimum, by the same prominence rule.
pub fn first_minimum(t: &[f64], v: &[f64]) -> Option<Extremum> {
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    first_maximum(t, &neg).map(|e| Extremum {
        value: -e.value,
        ..e
    })
}

fn range(v: &[f64]) -> Option<(f64, f64)> {
    if v.len() < 3 {
        return None;
    }
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi))
}

fn prominence(v: &[f64], i: usize) -> f64 {
    let peak = v[i];
    let mut left_min = peak;
    for &x in v[..i].iter().rev() {
        if x > peak {
            break;
        }
        left_min = left_min.min(x);
    }
    let mut right_min = peak;
    for &x in &v[i + 1..] {
        if x > peak {
            break;
        }
        right_min = right_min.min(x);
    }
    peak - left_min.max(right_min)
}

/// `max_i |a_i − b_i|`
pub fn max_abs_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
