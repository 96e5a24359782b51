//! Incremental condition estimation for upper-triangular factors grown one
//! column at a time.
//!
//! Both extreme singular values are tracked with the rotation update of LAPACK's
//! `dlaic1`: given an approximate singular vector `x` of the current factor with
//! `‖Rᵀx‖ = σ̂`, the next vector is `[s·x; c]` with `(s, c)` chosen to extremise
//! `‖R̂ᵀ[s·x; c]‖` for the bordered factor. Each step costs `O(j)`.

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extreme {
    Largest,
    Smallest,
}

#[derive(Debug, Clone)]
pub struct IceState {
    x_max: Vec<f64>,
    x_min: Vec<f64>,
    sigma_max: f64,
    sigma_min: f64,
}

impl IceState {
    /// Start from the `1 x 1` leading entry; the condition estimate is 1.
    pub fn new(r11: f64) -> Result<Self> {
        if r11 == 0.0 || !r11.is_finite() {
            return Err(Error::SingularTriangle { col: 0 });
        }
        Ok(Self {
            x_max: vec![1.0],
            x_min: vec![1.0],
            sigma_max: r11.abs(),
            sigma_min: r11.abs(),
        })
    }

    /// Order of the factor seen so far.
    pub fn order(&self) -> usize {
        self.x_max.len()
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn condition(&self) -> f64 {
        self.sigma_max / self.sigma_min
    }

    /// Absorb column `R_{1:j, j}` (its last entry is the diagonal) and return the
    /// new condition estimate.
    pub fn update(&mut self, column: &[f64]) -> Result<f64> {
        let j = self.order();
        if column.len() != j + 1 {
            return Err(Error::DimensionMismatch {
                expected: j + 1,
                got: column.len(),
            });
        }
        let (w, gamma) = column.split_at(j);
        let gamma = gamma[0];
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(Error::SingularTriangle { col: j });
        }

        let alpha = super::dot(&self.x_max, w);
        let (smax, s, c) = bordered_step(Extreme::Largest, self.sigma_max, alpha, gamma);
        self.x_max.iter_mut().for_each(|v| *v *= s);
        self.x_max.push(c);
        self.sigma_max = smax;

        let alpha = super::dot(&self.x_min, w);
        let (smin, s, c) = bordered_step(Extreme::Smallest, self.sigma_min, alpha, gamma);
        self.x_min.iter_mut().for_each(|v| *v *= s);
        self.x_min.push(c);
        self.sigma_min = smin;

        if self.sigma_min == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(self.condition())
    }
}

/// One `dlaic1` step: returns `(σ̂_new, s, c)`.
fn bordered_step(job: Extreme, sest: f64, alpha: f64, gamma: f64) -> (f64, f64, f64) {
    let absalp = alpha.abs();
    let absgam = gamma.abs();
    let absest = sest.abs();

    match job {
        Extreme::Largest => {
            if sest == 0.0 {
                let s1 = absgam.max(absalp);
                if s1 == 0.0 {
                    return (0.0, 0.0, 1.0);
                }
                let (s, c) = (alpha / s1, gamma / s1);
                let tmp = (s * s + c * c).sqrt();
                return (s1 * tmp, s / tmp, c / tmp);
            }
            if absgam <= EPS * absest {
                let tmp = absest.max(absalp);
                let (s1, s2) = (absest / tmp, absalp / tmp);
                return (tmp * (s1 * s1 + s2 * s2).sqrt(), 1.0, 0.0);
            }
            if absalp <= EPS * absest {
                return if absgam <= absest {
                    (absest, 1.0, 0.0)
                } else {
                    (absgam, 0.0, 1.0)
                };
            }
            if absest <= EPS * absalp || absest <= EPS * absgam {
                let (s1, s2) = (absgam, absalp);
                return if s1 <= s2 {
                    let tmp = s1 / s2;
                    let s = (1.0 + tmp * tmp).sqrt();
                    (s2 * s, 1f64.copysign(alpha) / s, (gamma / s2) / s)
                } else {
                    let tmp = s2 / s1;
                    let c = (1.0 + tmp * tmp).sqrt();
                    (s1 * c, (alpha / s1) / c, 1f64.copysign(gamma) / c)
                };
            }
            let zeta1 = alpha / absest;
            let zeta2 = gamma / absest;
            let b = (1.0 - zeta1 * zeta1 - zeta2 * zeta2) * 0.5;
            let c = zeta1 * zeta1;
            let t = if b > 0.0 {
                c / (b + (b * b + c).sqrt())
            } else {
                (b * b + c).sqrt() - b
            };
            let sine = -zeta1 / t;
            let cosine = -zeta2 / (1.0 + t);
            let tmp = (sine * sine + cosine * cosine).sqrt();
            ((t + 1.0).sqrt() * absest, sine / tmp, cosine / tmp)
        }
        Extreme::Smallest => {
            if sest == 0.0 {
                let (sine, cosine) = if absgam.max(absalp) == 0.0 {
                    (1.0, 0.0)
                } else {
                    (-gamma, alpha)
                };
                let s1 = sine.abs().max(cosine.abs());
                let (s, c) = (sine / s1, cosine / s1);
                let tmp = (s * s + c * c).sqrt();
                return (0.0, s / tmp, c / tmp);
            }
            if absgam <= EPS * absest {
                return (absgam, 0.0, 1.0);
            }
            if absalp <= EPS * absest {
                return if absgam <= absest {
                    (absgam, 0.0, 1.0)
                } else {
                    (absest, 1.0, 0.0)
                };
            }
            if absest <= EPS * absalp || absest <= EPS * absgam {
                let (s1, s2) = (absgam, absalp);
                return if s1 <= s2 {
                    let tmp = s1 / s2;
                    let c = (1.0 + tmp * tmp).sqrt();
                    (
                        absest * (tmp / c),
                        -(gamma / s2) / c,
                        1f64.copysign(alpha) / c,
                    )
                } else {
                    let tmp = s2 / s1;
                    let s = (1.0 + tmp * tmp).sqrt();
                    (absest / s, -1f64.copysign(gamma) / s, (alpha / s1) / s)
                };
            }
            let zeta1 = alpha / absest;
            let zeta2 = gamma / absest;
            let norma = (1.0 + zeta1 * zeta1 + (zeta1 * zeta2).abs())
                .max((zeta1 * zeta2).abs() + zeta2 * zeta2);
            let test = 1.0 + 2.0 * (zeta1 - zeta2) * (zeta1 + zeta2);
            let (sine, cosine, sestpr);
            if test >= 0.0 {
                let b = (zeta1 * zeta1 + zeta2 * zeta2 + 1.0) * 0.5;
                let c = zeta2 * zeta2;
                let t = c / (b + (b * b - c).abs().sqrt());
                sine = zeta1 / (1.0 - t);
                cosine = -zeta2 / t;
                sestpr = (t + 4.0 * EPS * EPS * norma).sqrt() * absest;
            } else {
                let b = (zeta2 * zeta2 + zeta1 * zeta1 - 1.0) * 0.5;
                let c = zeta1 * zeta1;
                let t = if b >= 0.0 {
                    -c / (b + (b * b + c).sqrt())
                } else {
                    b - (b * b + c).sqrt()
                };
                sine = -zeta1 / t;
                cosine = -zeta2 / (1.0 + t);
                sestpr = (1.0 + t + 4.0 * EPS * EPS * norma).sqrt() * absest;
            }
            let tmp = (sine * sine + cosine * cosine).sqrt();
            (sestpr, sine / tmp, cosine / tmp)
        }
    }
}
