//! Extended complex plane ℂ ∪ {∞} with the cross ratio and Möbius maps.
//!
//! The boundary quadric is identified with ℂP¹, so boundary points may land
//! on ∞ and every formula here has to survive that.

use num_complex::Complex64;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtC {
    Finite(Complex64),
    Infinity,
}

impl ExtC {
    pub fn new(re: f64, im: f64) -> Self {
        ExtC::Finite(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtC::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            ExtC::Finite(z) => Some(*z),
            ExtC::Infinity => None,
        }
    }

    /// Chordal distance on the Riemann sphere, 2|z−w|/√((1+|z|²)(1+|w|²)).
    pub fn chordal(self, other: ExtC) -> f64 {
        match (self, other) {
            (ExtC::Finite(z), ExtC::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
            (ExtC::Finite(z), ExtC::Infinity) | (ExtC::Infinity, ExtC::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (ExtC::Infinity, ExtC::Infinity) => 0.0,
        }
    }
}

impl From<Complex64> for ExtC {
    fn from(z: Complex64) -> Self {
        ExtC::Finite(z)
    }
}

/// Cross ratio [z1,z2;z3,z4] = (z1−z3)(z2−z4) / ((z2−z3)(z1−z4)).
///
/// At most one argument may be ∞; the corresponding factors cancel in the
/// limit. Returns None when the configuration is degenerate (two of the
/// four points coincide in a way that makes the ratio 0/0).
pub fn cross_ratio(z1: ExtC, z2: ExtC, z3: ExtC, z4: ExtC) -> Option<Complex64> {
    use ExtC::*;
    let r = match (z1, z2, z3, z4) {
        (Finite(a), Finite(b), Finite(c), Finite(d)) => {
            let num = (a - c) * (b - d);
            let den = (b - c) * (a - d);
            safe_div(num, den)?
        }
        (Infinity, Finite(b), Finite(c), Finite(d)) => safe_div(b - d, b - c)?,
        (Finite(a), Infinity, Finite(c), Finite(d)) => safe_div(a - c, a - d)?,
        (Finite(a), Finite(b), Infinity, Finite(d)) => safe_div(b - d, a - d)?,
        (Finite(a), Finite(b), Finite(c), Infinity) => safe_div(a - c, b - c)?,
        _ => return None,
    };
    Some(r)
}

fn safe_div(num: Complex64, den: Complex64) -> Option<Complex64> {
    if den.norm_sqr() == 0.0 {
        return None;
    }
    Some(num / den)
}

/// A Möbius transformation z ↦ (az+b)/(cz+d).
#[derive(Debug, Clone, Copy)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn identity() -> Self {
        Mobius {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// The map sending (z1, z2, z3) to (0, 1, ∞).
    pub fn to_zero_one_inf(z1: ExtC, z2: ExtC, z3: ExtC) -> Self {
        use ExtC::*;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match (z1, z2, z3) {
            (Infinity, Finite(b), Finite(c)) => Mobius {
                a: zero,
                b: -(b - c),
                c: -one,
                d: c,
            },
            (Finite(a), Infinity, Finite(c)) => Mobius {
                a: one,
                b: -a,
                c: one,
                d: -c,
            },
            (Finite(a), Finite(b), Infinity) => Mobius {
                a: -one,
                b: a,
                c: zero,
                d: -(b - a),
            },
            (Finite(a), Finite(b), Finite(c)) => Mobius {
                a: b - c,
                b: -a * (b - c),
                c: b - a,
                d: -c * (b - a),
            },
            _ => Mobius::identity(),
        }
    }

    pub fn inverse(&self) -> Self {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn apply(&self, z: ExtC) -> ExtC {
        match z {
            ExtC::Infinity => {
                if self.c.norm_sqr() == 0.0 {
                    ExtC::Infinity
                } else {
                    ExtC::Finite(self.a / self.c)
                }
            }
            ExtC::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm_sqr() == 0.0 {
                    ExtC::Infinity
                } else {
                    ExtC::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_ratio_standard_normalization() {
        // [0,1;∞,−1] = (0−∞)(1+1)/((1−∞)(0+1)) → 2 in the limit.
        let t = cross_ratio(
            ExtC::new(0.0, 0.0),
            ExtC::new(1.0, 0.0),
            ExtC::Infinity,
            ExtC::new(-1.0, 0.0),
        )
        .unwrap();
        assert!((t - Complex64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cross_ratio_mobius_invariant() {
        let pts = [
            ExtC::new(0.3, 1.1),
            ExtC::new(-2.0, 0.4),
            ExtC::new(1.5, -0.7),
            ExtC::new(0.0, -3.0),
        ];
        let m = Mobius {
            a: Complex64::new(1.0, 2.0),
            b: Complex64::new(0.5, -1.0),
            c: Complex64::new(0.3, 0.1),
            d: Complex64::new(2.0, 0.0),
        };
        let t0 = cross_ratio(pts[0], pts[1], pts[2], pts[3]).unwrap();
        let q: Vec<ExtC> = pts.iter().map(|&z| m.apply(z)).collect();
        let t1 = cross_ratio(q[0], q[1], q[2], q[3]).unwrap();
        assert!((t0 - t1).norm() < 1e-12);
    }

    #[test]
    fn three_point_map_hits_targets() {
        let z1 = ExtC::new(2.0, 1.0);
        let z2 = ExtC::new(-1.0, 0.0);
        let z3 = ExtC::new(0.0, 5.0);
        let m = Mobius::to_zero_one_inf(z1, z2, z3);
        assert!(m.apply(z1).finite().unwrap().norm() < 1e-14);
        assert!((m.apply(z2).finite().unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(m.apply(z3).is_infinite());
        let inv = m.inverse();
        let back = inv.apply(m.apply(z1));
        assert!((back.finite().unwrap() - z1.finite().unwrap()).norm() < 1e-12);
    }
}
