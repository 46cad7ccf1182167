//! The Marchenko–Pastur law and its transforms.
//!
//! For aspect ratio `c = p/n` the law has continuous density
//! `f(x) = √((b-x)(x-a)) / (2πcx)` on `(a, b)` with `a = (1-√c)²`,
//! `b = (1+√c)²`, plus a point mass `max(0, 1-1/c)` at zero when `c > 1`.
//!
//! On the real line outside the support the Hilbert transform
//! `H(x) = ∫ (x-λ)⁻¹ dF(λ)` has the closed form implemented here, is
//! strictly decreasing on each component of its domain, and is inverted by
//! the K-transform `K(y) = 1/y + 1/(1-cy)`. The R-transform is
//! `R(y) = K(y) - 1/y = 1/(1-cy)`. These drive every likelihood formula in
//! the crate, together with the closed form of `∫ ln(z₀(h) - λ) dF(λ)` at
//! the inverse point `z₀(h) = K(h/(c(1+h)))`.

use crate::error::{Error, Result};
use crate::quad;

/// Marchenko–Pastur law for aspect ratio `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpLaw {
    c: f64,
    a: f64,
    b: f64,
    atom: f64,
}

impl MpLaw {
    /// Law for aspect ratio `c = p/n > 0`.
    pub fn new(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!(
                "aspect ratio must be positive, got {c}"
            )));
        }
        let s = c.sqrt();
        Ok(MpLaw {
            c,
            a: (1.0 - s) * (1.0 - s),
            b: (1.0 + s) * (1.0 + s),
            atom: (1.0 - 1.0 / c).max(0.0),
        })
    }

    /// Law for the finite-sample aspect ratio `p/n`.
    pub fn for_dims(p: usize, n: usize) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::domain("dimensions must be positive"));
        }
        Self::new(p as f64 / n as f64)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Support edges `(a, b)` of the continuous part.
    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Point mass at zero, `max(0, 1 - 1/c)`.
    pub fn atom(&self) -> f64 {
        self.atom
    }

    /// Continuous density. Zero outside `[a, b]`; the atom is *not* folded in.
    ///
    /// Total on the reals. At `c = 1` the density diverges like `x^{-1/2}`
    /// near zero, so `density(0)` returns `+∞` there.
    pub fn density(&self, x: f64) -> f64 {
        if x <= self.a || x >= self.b {
            // At c = 1 the left edge is 0 and the open-interval formula
            // diverges as x ↓ 0; report the limit rather than NaN.
            if x == 0.0 && self.a == 0.0 {
                return f64::INFINITY;
            }
            return 0.0;
        }
        ((self.b - x) * (x - self.a)).sqrt() / (2.0 * std::f64::consts::PI * self.c * x)
    }

    /// ∫ g(λ) f(λ) dλ over the continuous part `(a, b)`, by Gauss–Kronrod
    /// after the substitution `λ = a + (b-a) sin²t` that removes the
    /// square-root endpoint singularities (and the `x^{-1/2}` blowup at
    /// `c = 1`).
    pub fn integrate_density<G: Fn(f64) -> f64>(&self, g: G, tol: f64) -> Result<f64> {
        let (a, b, c) = (self.a, self.b, self.c);
        let width = b - a;
        let pi = std::f64::consts::PI;
        let f = move |t: f64| {
            let (st, ct) = (t.sin(), t.cos());
            let lam = a + width * st * st;
            if a == 0.0 {
                // f(λ) dλ = (b/πc) cos²t dt when a = 0.
                g(lam) * b * ct * ct / (pi * c)
            } else {
                // f(λ) dλ = (b-a)² · 2 sin²t cos²t / (2πcλ) dt.
                g(lam) * width * width * st * st * ct * ct / (pi * c * lam)
            }
        };
        quad::integrate(f, 0.0, 0.5 * pi, tol)
    }

    /// Distribution function (atom included).
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        if x <= self.a {
            return Ok(self.atom);
        }
        if x >= self.b {
            return Ok(1.0);
        }
        let t = ((x - self.a) / (self.b - self.a)).sqrt().asin();
        let (a, b, c) = (self.a, self.b, self.c);
        let width = b - a;
        let pi = std::f64::consts::PI;
        let f = move |t: f64| {
            let (st, ct) = (t.sin(), t.cos());
            let lam = a + width * st * st;
            if a == 0.0 {
                b * ct * ct / (pi * c)
            } else {
                width * width * st * st * ct * ct / (pi * c * lam)
            }
        };
        Ok(self.atom + quad::integrate(f, 0.0, t, 1e-11)?)
    }

    /// Hilbert transform `H(x) = ∫ (x-λ)⁻¹ dF(λ)` for real `x` outside the
    /// support; the square root carries the sign of `x - c - 1`.
    pub fn hilbert(&self, x: f64) -> Result<f64> {
        if x >= self.a && x <= self.b {
            return Err(Error::domain(format!(
                "hilbert transform undefined inside the support [{:.6}, {:.6}] (x = {x})",
                self.a, self.b
            )));
        }
        if x == 0.0 {
            if self.atom > 0.0 {
                return Err(Error::domain(
                    "hilbert transform undefined at the atom (x = 0)",
                ));
            }
            // c < 1: H(0) = -∫ λ⁻¹ dF(λ) = -1/(1-c), the 0/0 limit of the
            // closed form.
            return Ok(-1.0 / (1.0 - self.c));
        }
        // (x-c-1)² - 4c = (x-a)(x-b), positive off the support.
        let root = ((x - self.a) * (x - self.b)).sqrt();
        let signed = if x - self.c - 1.0 >= 0.0 { root } else { -root };
        Ok((x + self.c - 1.0 - signed) / (2.0 * self.c * x))
    }

    /// Whether `y` lies in the (open) image `H(ℝ \ supp F)` minus the origin,
    /// i.e. in the domain of the K-transform.
    pub fn in_hilbert_image(&self, y: f64) -> bool {
        if !y.is_finite() || y == 0.0 {
            return false;
        }
        let s = self.c.sqrt();
        let right = 1.0 / (s * (1.0 + s));
        if self.c > 1.0 {
            y < 0.0 || (0.0 < y && y < right) || y > 1.0 / (s * (s - 1.0))
        } else if self.c == 1.0 {
            y < 0.0 || (0.0 < y && y < right)
        } else {
            (-1.0 / (s * (1.0 - s)) < y && y < 0.0) || (0.0 < y && y < right)
        }
    }

    /// K-transform `K(y) = 1/y + 1/(1-cy)`, the inverse of [`Self::hilbert`]
    /// on its image.
    pub fn k_transform(&self, y: f64) -> Result<f64> {
        if !self.in_hilbert_image(y) {
            return Err(Error::domain(format!(
                "{y} is outside the image of the hilbert transform (c = {})",
                self.c
            )));
        }
        Ok(1.0 / y + 1.0 / (1.0 - self.c * y))
    }

    /// R-transform `R(y) = K(y) - 1/y = 1/(1-cy)`; defined for `y ≠ 1/c`.
    pub fn r_transform(&self, y: f64) -> Result<f64> {
        let denom = 1.0 - self.c * y;
        if denom == 0.0 {
            return Err(Error::domain(format!(
                "r-transform has a pole at y = 1/c = {}",
                y
            )));
        }
        Ok(1.0 / denom)
    }

    /// The compact subset `Ω_εη` of the hilbert-transform image used by the
    /// spherical-integral asymptotics; case-split on `c ≥ 1` vs `c < 1`.
    pub fn in_omega(&self, x: f64, eps: f64, eta: f64) -> bool {
        assert!(eps > 0.0 && eta > 0.0, "omega margins must be positive");
        if x == 0.0 {
            return false;
        }
        let s = self.c.sqrt();
        let right = 1.0 / (s * (1.0 + s)) - eps;
        let left = if self.c >= 1.0 {
            -1.0 / eta
        } else {
            -1.0 / (s * (1.0 - s)) + eps
        };
        (left <= x && x < 0.0) || (0.0 < x && x <= right)
    }

    /// `z₀(h) = (c+h)(1+h)/h = K(h/(c(1+h)))` for a spike `h ∈ (0, √c)`:
    /// the point at which the likelihood's log-integral is evaluated.
    pub fn z0(&self, h: f64) -> Result<f64> {
        self.check_spike(h)?;
        Ok((self.c + h) * (1.0 + h) / h)
    }

    /// Closed form of `∫ ln(z₀(h) - λ) dF(λ) = h/c - ln(1+h)/c + ln((1+h)c/h)`
    /// for `h ∈ (0, √c)`.
    pub fn log_integral(&self, h: f64) -> Result<f64> {
        self.check_spike(h)?;
        Ok(h / self.c - (1.0 + h).ln() / self.c + ((1.0 + h) * self.c / h).ln())
    }

    fn check_spike(&self, h: f64) -> Result<()> {
        if !(h.is_finite() && h > 0.0 && h < self.c.sqrt()) {
            return Err(Error::domain(format!(
                "spike must lie in (0, √c) = (0, {:.6}), got {h}",
                self.c.sqrt()
            )));
        }
        Ok(())
    }

    /// Tabulates the CDF on `cells` equal steps across `[a, b]` for cheap
    /// repeated evaluation (each segment integrated by one Kronrod panel,
    /// then linear interpolation; plenty for KS-distance diagnostics).
    pub fn cdf_table(&self, cells: usize) -> Result<CdfTable> {
        let cells = cells.max(16);
        let width = self.b - self.a;
        let pi = std::f64::consts::PI;
        let (a, b, c) = (self.a, self.b, self.c);
        let integrand = move |t: f64| {
            let (st, ct) = (t.sin(), t.cos());
            let lam = a + width * st * st;
            if a == 0.0 {
                b * ct * ct / (pi * c)
            } else {
                width * width * st * st * ct * ct / (pi * c * lam)
            }
        };
        let mut cum = Vec::with_capacity(cells + 1);
        cum.push(self.atom);
        let mut acc = self.atom;
        for i in 0..cells {
            let x0 = self.a + width * i as f64 / cells as f64;
            let x1 = self.a + width * (i + 1) as f64 / cells as f64;
            let t0 = ((x0 - self.a) / width).sqrt().min(1.0).asin();
            let t1 = ((x1 - self.a) / width).sqrt().min(1.0).asin();
            let (v, _) = quad::kronrod15(&integrand, t0, t1);
            acc += v;
            cum.push(acc);
        }
        Ok(CdfTable {
            a: self.a,
            b: self.b,
            atom: self.atom,
            cum,
        })
    }
}

/// Precomputed piecewise-linear CDF of an [`MpLaw`].
#[derive(Debug, Clone)]
pub struct CdfTable {
    a: f64,
    b: f64,
    atom: f64,
    cum: Vec<f64>,
}

impl CdfTable {
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x < self.a {
            return self.atom;
        }
        if x >= self.b {
            return 1.0;
        }
        let cells = self.cum.len() - 1;
        let pos = (x - self.a) / (self.b - self.a) * cells as f64;
        let idx = (pos.floor() as usize).min(cells - 1);
        let frac = pos - idx as f64;
        self.cum[idx] + frac * (self.cum[idx + 1] - self.cum[idx])
    }
}
