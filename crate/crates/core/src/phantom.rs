//! Analytic test objects: weighted disk/ball indicators and smooth radial
//! bumps, with exact circular and spherical means.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::vector::{self as v, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Profile {
    /// `w` inside the ball, 0 outside.
    Indicator,
    /// `w (1 - ρ²/R²)³` inside the ball: C² with compact support.
    SmoothBump,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Component {
    pub center: Vec3,
    pub radius: f64,
    pub amplitude: f64,
    pub profile: Profile,
}

impl Component {
    pub fn indicator(center: Vec3, radius: f64, amplitude: f64) -> Self {
        Component {
            center,
            radius,
            amplitude,
            profile: Profile::Indicator,
        }
    }

    pub fn bump(center: Vec3, radius: f64, amplitude: f64) -> Self {
        Component {
            center,
            radius,
            amplitude,
            profile: Profile::SmoothBump,
        }
    }

    /// Radial profile at distance `rho` from the center.
    #[inline]
    pub fn radial(&self, rho: f64) -> f64 {
        if rho >= self.radius {
            return 0.0;
        }
        match self.profile {
            Profile::Indicator => self.amplitude,
            Profile::SmoothBump => {
                let s = 1.0 - (rho * rho) / (self.radius * self.radius);
                self.amplitude * s * s * s
            }
        }
    }

    /// Mean over the circle of radius `r` about `y` (planar coordinates).
    pub fn circular_mean(&self, y: Vec3, r: f64) -> f64 {
        let d = libm::hypot(y[0] - self.center[0], y[1] - self.center[1]);
        let big_r = self.radius;
        if r + d <= big_r && self.profile == Profile::Indicator {
            return self.amplitude;
        }
        if (d - r).abs() >= big_r {
            return 0.0;
        }
        if d == 0.0 || r == 0.0 {
            return self.radial(d.max(r));
        }
        // The circle point at angle θ (from the direction of c) is inside
        // iff cos θ > κ.
        let kappa = (d * d + r * r - big_r * big_r) / (2.0 * d * r);
        let th = libm::acos(kappa.clamp(-1.0, 1.0));
        match self.profile {
            Profile::Indicator => self.amplitude * th / PI,
            Profile::SmoothBump => {
                // ∫₀^θ (α + β cos)³ with |y + rω - c|² = d² + r² - 2dr cos
                let r2 = big_r * big_r;
                let alpha = 1.0 - (d * d + r * r) / r2;
                let beta = 2.0 * d * r / r2;
                let s = libm::sin(th);
                let i0 = th;
                let i1 = s;
                let i2 = 0.5 * th + 0.25 * libm::sin(2.0 * th);
                let i3 = s - s * s * s / 3.0;
                let a2 = alpha * alpha;
                self.amplitude / PI
                    * (a2 * alpha * i0
                        + 3.0 * a2 * beta * i1
                        + 3.0 * alpha * beta * beta * i2
                        + beta * beta * beta * i3)
            }
        }
    }

    /// Mean over the sphere of radius `r` about `y`.
    ///
    /// For a radial profile φ the mean is
    /// `(1/(2dr)) ∫_{|d-r|}^{d+r} φ(ρ) ρ dρ`; the integrand is a polynomial
    /// of degree at most 7 on the support, so four Gauss nodes are exact.
    pub fn spherical_mean(&self, y: Vec3, r: f64) -> f64 {
        let d = v::dist(y, self.center);
        let big_r = self.radius;
        let lo = (d - r).abs();
        if lo >= big_r {
            return 0.0;
        }
        if d == 0.0 || r == 0.0 {
            return self.radial(d.max(r));
        }
        let width = (2.0 * d.min(r)).min(big_r - lo);
        const X: [f64; 4] = [
            -0.861_136_311_594_052_6,
            -0.339_981_043_584_856_3,
            0.339_981_043_584_856_3,
            0.861_136_311_594_052_6,
        ];
        const W: [f64; 4] = [
            0.347_854_845_137_453_9,
            0.652_145_154_862_546_1,
            0.652_145_154_862_546_1,
            0.347_854_845_137_453_9,
        ];
        let mut s = 0.0;
        for k in 0..4 {
            let rho = lo + 0.5 * width * (1.0 + X[k]);
            s += W[k] * rho * self.radial(rho);
        }
        s * 0.5 * width / (2.0 * d * r)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Phantom {
    pub dim: usize,
    pub components: Vec<Component>,
}

impl Phantom {
    pub fn new(dim: usize, components: Vec<Component>) -> Self {
        Phantom { dim, components }
    }

    pub fn eval(&self, x: Vec3) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let d = if self.dim == 2 {
                    libm::hypot(x[0] - c.center[0], x[1] - c.center[1])
                } else {
                    v::dist(x, c.center)
                };
                c.radial(d)
            })
            .sum()
    }

    pub fn circular_mean(&self, y: Vec3, r: f64) -> f64 {
        self.components.iter().map(|c| c.circular_mean(y, r)).sum()
    }

    pub fn spherical_mean(&self, y: Vec3, r: f64) -> f64 {
        self.components.iter().map(|c| c.spherical_mean(y, r)).sum()
    }

    /// Circular mean in 2D, spherical mean in 3D.
    pub fn mean(&self, y: Vec3, r: f64) -> f64 {
        if self.dim == 2 {
            self.circular_mean(y, r)
        } else {
            self.spherical_mean(y, r)
        }
    }

    /// Largest distance from `y` to any point of the support.
    pub fn reach_from(&self, y: Vec3) -> f64 {
        self.components
            .iter()
            .map(|c| v::dist(y, c.center) + c.radius)
            .fold(0.0, f64::max)
    }
}
