//! Linear algebra over ℝ⁴ with the quadratic form q(x) = x0² + x1² − x2² + x3².
//!
//! x2 is the time coordinate. In the affine chart x3 = 1 the quadric
//! ∂H³ = {q = 0} is the two-sheeted hyperboloid x2 = ±√(x0² + x1² + 1);
//! the region q < 0 is H³ (two components, one inside each sheet) and
//! q > 0 is the de Sitter region between them. All other modules inherit
//! this convention.

use crate::ext_complex::ExtC;
use num_complex::Complex64;
use thiserror::Error;

/// Relative tolerance for light-like classification. Quadric coordinates are
/// irrational (square roots), so exact zero tests are impossible in floats.
pub const TOL_LIGHT: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MinkowskiError {
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("point is not on the boundary quadric (q = {0:.3e})")]
    NotOnQuadric(f64),
    #[error("point lies on the light cone of the chart center")]
    OnLightCone,
    #[error("map undefined on the boundary quadric itself")]
    OnIdealBoundary,
}

/// Homogeneous coordinates on ℝP³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec4 {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Vec4 {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Vec4 { x0, x1, x2, x3 }
    }

    /// Lift of an affine chart point (x3 = 1).
    pub const fn from_chart(p: [f64; 3]) -> Self {
        Vec4::new(p[0], p[1], p[2], 1.0)
    }

    /// Chart coordinates; meaningful only when x3 ≠ 0.
    pub fn to_chart(&self) -> [f64; 3] {
        [self.x0 / self.x3, self.x1 / self.x3, self.x2 / self.x3]
    }

    pub fn scale(&self, t: f64) -> Vec4 {
        Vec4::new(self.x0 * t, self.x1 * t, self.x2 * t, self.x3 * t)
    }

    pub fn add(&self, o: &Vec4) -> Vec4 {
        Vec4::new(
            self.x0 + o.x0,
            self.x1 + o.x1,
            self.x2 + o.x2,
            self.x3 + o.x3,
        )
    }

    pub fn sub(&self, o: &Vec4) -> Vec4 {
        Vec4::new(
            self.x0 - o.x0,
            self.x1 - o.x1,
            self.x2 - o.x2,
            self.x3 - o.x3,
        )
    }

    pub fn euclidean_norm_sqr(&self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn is_zero(&self) -> bool {
        self.euclidean_norm_sqr() == 0.0
    }
}

/// ⟨x, y⟩ = x0·y0 + x1·y1 − x2·y2 + x3·y3 (signature +,+,−,+).
pub fn inner(x: &Vec4, y: &Vec4) -> f64 {
    x.x0 * y.x0 + x.x1 * y.x1 - x.x2 * y.x2 + x.x3 * y.x3
}

/// q(x) = ⟨x, x⟩.
pub fn quad(x: &Vec4) -> f64 {
    inner(x, x)
}

/// Causal class of points, planes and lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceClass {
    Space,
    Time,
    Light,
}

/// A projective plane, stored as its normal covector under the form:
/// the plane is {x : ⟨n, x⟩ = 0}.
#[derive(Debug, Clone, Copy)]
pub struct ProjPlane {
    pub n: Vec4,
}

impl ProjPlane {
    pub fn new(n: Vec4) -> Result<Self, MinkowskiError> {
        if n.is_zero() {
            return Err(MinkowskiError::ZeroVector);
        }
        Ok(ProjPlane { n })
    }

    pub fn contains(&self, x: &Vec4, tol: f64) -> bool {
        inner(&self.n, x).abs()
            <= tol * self.n.euclidean_norm_sqr().sqrt() * x.euclidean_norm_sqr().sqrt()
    }
}

/// Classify a projective point by the sign of q. Points with q < 0 lie in
/// H³ (time-like representative), q > 0 in dS³ (space-like), q ≈ 0 on the
/// boundary quadric.
pub fn classify_point(v: &Vec4) -> Result<SpaceClass, MinkowskiError> {
    if v.is_zero() {
        return Err(MinkowskiError::ZeroVector);
    }
    let s = quad(v);
    let scale = v.euclidean_norm_sqr();
    if s.abs() <= TOL_LIGHT * scale {
        Ok(SpaceClass::Light)
    } else if s > 0.0 {
        Ok(SpaceClass::Space)
    } else {
        Ok(SpaceClass::Time)
    }
}

/// Classify a plane by its normal, with the same sign rule as for points.
/// The chart plane at infinity n = (0,0,0,1) classifies Space; planes
/// through ≥ 3 quadric points also classify Space (their normals have
/// q(n) > 0 and their polar points lie in dS³).
pub fn classify_plane(p: &ProjPlane) -> Result<SpaceClass, MinkowskiError> {
    classify_point(&p.n)
}

/// Classify the projective line through two points by the restriction of the
/// form to their span: Gram determinant < 0 means the line crosses the
/// quadric (and H³), > 0 means it avoids it, ≈ 0 means tangency.
pub fn classify_line(a: &Vec4, b: &Vec4) -> Result<SpaceClass, MinkowskiError> {
    if a.is_zero() || b.is_zero() {
        return Err(MinkowskiError::ZeroVector);
    }
    let det = quad(a) * quad(b) - inner(a, b) * inner(a, b);
    let scale = a.euclidean_norm_sqr() * b.euclidean_norm_sqr();
    if det.abs() <= TOL_LIGHT * scale {
        Ok(SpaceClass::Light)
    } else if det < 0.0 {
        Ok(SpaceClass::Time)
    } else {
        Ok(SpaceClass::Space)
    }
}

/// Polar point of a plane: [n] itself, since the plane is {⟨n, ·⟩ = 0}.
pub fn polar_of_plane(p: &ProjPlane) -> Vec4 {
    p.n
}

/// Polar plane of a point.
pub fn polar_of_point(v: &Vec4) -> Result<ProjPlane, MinkowskiError> {
    ProjPlane::new(*v)
}

/// Plane through three points, by cofactor expansion of the 4×4 determinant.
/// The returned normal n satisfies ⟨n, a⟩ = ⟨n, b⟩ = ⟨n, c⟩ = 0.
pub fn plane_through(a: &Vec4, b: &Vec4, c: &Vec4) -> Result<ProjPlane, MinkowskiError> {
    // Euclidean covector xi with xi · x = det(x; a; b; c).
    let m = [
        [a.x0, a.x1, a.x2, a.x3],
        [b.x0, b.x1, b.x2, b.x3],
        [c.x0, c.x1, c.x2, c.x3],
    ];
    let minor = |skip: usize| -> f64 {
        let cols: Vec<usize> = (0..4).filter(|&j| j != skip).collect();
        let d = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][cols[c0]] * m[r1][cols[c1]] - m[r0][cols[c1]] * m[r1][cols[c0]]
        };
        m[0][cols[0]] * d(1, 2, 1, 2) - m[0][cols[1]] * d(1, 2, 0, 2) + m[0][cols[2]] * d(1, 2, 0, 1)
    };
    let xi = [minor(0), -minor(1), minor(2), -minor(3)];
    // Convert the Euclidean covector to a form-normal: n = Q⁻¹ xi.
    let n = Vec4::new(xi[0], xi[1], -xi[2], xi[3]);
    ProjPlane::new(n)
}

/// Which sheet of the two-sheeted hyperboloid a boundary point lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign(&self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }

    pub fn opposite(&self) -> Sheet {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }
}

/// The boundary point (u0, u1, ±√(u0² + u1² + 1), 1); q = 0 by construction.
pub fn ideal_point(sheet: Sheet, u0: f64, u1: f64) -> Vec4 {
    let h = (u0 * u0 + u1 * u1 + 1.0).sqrt();
    Vec4::new(u0, u1, sheet.sign() * h, 1.0)
}

/// Identification of the boundary quadric with ℂP¹:
/// ζ = (x0 + i·x1)/(x2 + x3), with the fallback ζ = (x2 − x3)/(x0 − i·x1)
/// when |x2 + x3| is small. The two expressions agree on the quadric
/// because (x0 + ix1)(x0 − ix1) = (x2 + x3)(x2 − x3) there. Any other
/// Möbius-equivalent identification would do; cross-ratios do not care.
pub fn boundary_to_complex(v: &Vec4) -> Result<ExtC, MinkowskiError> {
    if v.is_zero() {
        return Err(MinkowskiError::ZeroVector);
    }
    let scale = v.euclidean_norm_sqr();
    let q = quad(v);
    if q.abs() > 1e-7 * scale {
        return Err(MinkowskiError::NotOnQuadric(q));
    }
    let den = v.x2 + v.x3;
    let num = Complex64::new(v.x0, v.x1);
    if den.abs() > 1e-7 * scale.sqrt() {
        Ok(ExtC::Finite(num / den))
    } else {
        // Here x2 ≈ −x3, so x0 − i·x1 vanishes only at the south pole,
        // which maps to ∞.
        let den2 = Complex64::new(v.x0, -v.x1);
        if den2.norm() <= 1e-12 * scale.sqrt() {
            Ok(ExtC::Infinity)
        } else {
            Ok(ExtC::Finite(Complex64::new(v.x2 - v.x3, 0.0) / den2))
        }
    }
}

/// Minkowski form on chart vectors: m(x, y) = x0·y0 + x1·y1 − x2·y2.
/// This is the flat ℝ^{2,1} structure the chart x3 = 1 carries.
pub fn chart_minkowski(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] - x[2] * y[2]
}

/// Infinitesimal Pogorelov map composed with the time flip, sending HS³
/// Killing fields on the chart to Euclidean ℝ³ Killing fields.
///
/// The radial rescaling collapses to the closed form
/// Υ(v) = v − (m(x,v)/(1 + m(x,x)))·x, which is exact on the Killing
/// algebra: a generator field Mx + t + m(t,x)·x maps to Mx + t. The
/// signed factor extends continuously through the light cone; the genuine
/// singularity is the boundary quadric 1 + m(x,x) = 0.
pub fn pogorelov(x: [f64; 3], v: [f64; 3]) -> Result<[f64; 3], MinkowskiError> {
    let xx = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    if xx <= 1e-24 {
        // Υ agrees with the identity differential at the chart center.
        return Ok([v[0], v[1], -v[2]]);
    }
    let m_xx = chart_minkowski(&x, &x);
    if m_xx.abs() <= TOL_LIGHT * xx {
        return Err(MinkowskiError::OnLightCone);
    }
    let qt = 1.0 + m_xx;
    if qt.abs() <= TOL_LIGHT * (1.0 + xx) {
        return Err(MinkowskiError::OnIdealBoundary);
    }
    let coeff = chart_minkowski(&x, &v) / qt;
    Ok([
        v[0] - coeff * x[0],
        v[1] - coeff * x[1],
        -(v[2] - coeff * x[2]),
    ])
}

/// A generator of the isometry algebra so(q): the matrix A acts on
/// homogeneous coordinates, and the induced projective field on the chart
/// is X(x) = (A x̃)_{0..2} − (A x̃)₃ · x with x̃ = (x, 1).
#[derive(Debug, Clone, Copy)]
pub struct KillingGenerator {
    pub a: [[f64; 4]; 4],
}

impl KillingGenerator {
    /// Rotation/boost generator in the (i, j) coordinate plane, built to
    /// satisfy Aᵀ Q + Q A = 0 with Q = diag(1, 1, −1, 1).
    fn plane(i: usize, j: usize) -> Self {
        let sig = [1.0, 1.0, -1.0, 1.0];
        let mut a = [[0.0; 4]; 4];
        a[i][j] = 1.0;
        a[j][i] = -sig[i] * sig[j];
        KillingGenerator { a }
    }

    /// The six basis generators: rotations among the space coordinates
    /// {0, 1, 3} and boosts pairing the time coordinate 2 with each.
    pub fn basis() -> [KillingGenerator; 6] {
        [
            Self::plane(0, 1),
            Self::plane(0, 3),
            Self::plane(1, 3),
            Self::plane(0, 2),
            Self::plane(1, 2),
            Self::plane(3, 2),
        ]
    }

    /// The chart vector field of this generator at chart point x.
    pub fn field_at(&self, x: [f64; 3]) -> [f64; 3] {
        let xt = [x[0], x[1], x[2], 1.0];
        let mut ax = [0.0; 4];
        for (r, row) in self.a.iter().enumerate() {
            ax[r] = row[0] * xt[0] + row[1] * xt[1] + row[2] * xt[2] + row[3] * xt[3];
        }
        [
            ax[0] - ax[3] * x[0],
            ax[1] - ax[3] * x[1],
            ax[2] - ax[3] * x[2],
        ]
    }

    /// Check Aᵀ Q + Q A = 0, for tests.
    pub fn is_in_algebra(&self) -> bool {
        let sig = [1.0f64, 1.0, -1.0, 1.0];
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let v = self.a[j][i] * sig[j] + sig[i] * self.a[i][j];
                worst = worst.max(v.abs());
            }
        }
        worst < 1e-12
    }
}

/// A 4×4 transformation preserving the form.
#[derive(Debug, Clone, Copy)]
pub struct Lorentz {
    pub m: [[f64; 4]; 4],
}

impl Lorentz {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Lorentz { m }
    }

    /// Rotation by angle t in the plane of space coordinates (i, j).
    pub fn rotation(i: usize, j: usize, t: f64) -> Self {
        let mut r = Self::identity();
        r.m[i][i] = t.cos();
        r.m[j][j] = t.cos();
        r.m[i][j] = -t.sin();
        r.m[j][i] = t.sin();
        r
    }

    /// Boost of rapidity t pairing space coordinate i with the time
    /// coordinate 2.
    pub fn boost(i: usize, t: f64) -> Self {
        let mut b = Self::identity();
        b.m[i][i] = t.cosh();
        b.m[2][2] = t.cosh();
        b.m[i][2] = t.sinh();
        b.m[2][i] = t.sinh();
        b
    }

    pub fn compose(&self, other: &Lorentz) -> Lorentz {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = (0..4).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Lorentz { m }
    }

    pub fn apply(&self, v: &Vec4) -> Vec4 {
        let x = [v.x0, v.x1, v.x2, v.x3];
        let mut y = [0.0; 4];
        for (i, row) in self.m.iter().enumerate() {
            y[i] = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
        }
        Vec4::new(y[0], y[1], y[2], y[3])
    }

    /// Max |⟨Tx, Ty⟩ − ⟨x, y⟩| over the standard basis, for tests.
    pub fn form_defect(&self) -> f64 {
        let basis = [
            Vec4::new(1.0, 0.0, 0.0, 0.0),
            Vec4::new(0.0, 1.0, 0.0, 0.0),
            Vec4::new(0.0, 0.0, 1.0, 0.0),
            Vec4::new(0.0, 0.0, 0.0, 1.0),
        ];
        let mut worst: f64 = 0.0;
        for x in &basis {
            for y in &basis {
                let d = inner(&self.apply(x), &self.apply(y)) - inner(x, y);
                worst = worst.max(d.abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inner_basis_values() {
        let e0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let t = Vec4::new(0.0, 0.0, 1.0, 0.0);
        let l = Vec4::new(0.0, 0.0, 1.0, 1.0);
        assert_eq!(inner(&e0, &e0), 1.0);
        assert_eq!(inner(&t, &t), -1.0);
        assert_eq!(inner(&l, &l), 0.0);
    }

    #[test]
    fn inner_symmetric_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let mut v = || {
                Vec4::new(
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                )
            };
            let (x, y, z) = (v(), v(), v());
            assert!((inner(&x, &y) - inner(&y, &x)).abs() < 1e-12);
            let lhs = inner(&x.add(&z), &y);
            let rhs = inner(&x, &y) + inner(&z, &y);
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn classify_examples() {
        // Chart plane at infinity.
        let h_inf = ProjPlane::new(Vec4::new(0.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(classify_plane(&h_inf).unwrap(), SpaceClass::Space);
        // Line through the two poles crosses H³; restricted form (1,1).
        let a = Vec4::new(0.0, 0.0, 1.0, 1.0);
        let b = Vec4::new(0.0, 0.0, -1.0, 1.0);
        assert_eq!(classify_line(&a, &b).unwrap(), SpaceClass::Time);
        // Tangent line: through a quadric point, inside its polar plane.
        let p = ideal_point(Sheet::Plus, 0.0, 0.0);
        let d = Vec4::new(1.0, 0.0, 0.0, 0.0); // ⟨p, d⟩ = 0
        assert_eq!(classify_line(&p, &d).unwrap(), SpaceClass::Light);
        assert_eq!(
            classify_point(&Vec4::new(0.0, 0.0, 0.0, 0.0)),
            Err(MinkowskiError::ZeroVector)
        );
    }

    #[test]
    fn polar_involution_and_face_plane() {
        let n = Vec4::new(0.4, -1.2, 2.0, 0.3);
        let p = ProjPlane::new(n).unwrap();
        let again = polar_of_point(&polar_of_plane(&p)).unwrap();
        // Projectively the same covector (Cauchy-Schwarz equality).
        let cross = inner(&again.n, &n) * inner(&again.n, &n) - quad(&again.n) * quad(&n);
        assert!(cross.abs() < 1e-12);
        // Self-dual axis point.
        let axis = Vec4::new(0.0, 0.0, 0.0, 1.0);
        let pl = polar_of_point(&axis).unwrap();
        assert!(pl.contains(&Vec4::new(1.0, 0.0, 0.0, 0.0), 1e-12));
        assert!(pl.contains(&Vec4::new(0.0, 0.0, 1.0, 0.0), 1e-12));
        // Plane through ≥3 quadric points has its polar in dS³ (q > 0).
        let a = ideal_point(Sheet::Plus, 1.0, 0.0);
        let b = ideal_point(Sheet::Plus, -0.5, 0.8);
        let c = ideal_point(Sheet::Plus, 0.2, -1.3);
        let plane = plane_through(&a, &b, &c).unwrap();
        assert!(plane.contains(&a, 1e-9));
        assert!(plane.contains(&b, 1e-9));
        assert!(plane.contains(&c, 1e-9));
        assert!(quad(&plane.n) > 0.0);
        assert_eq!(classify_plane(&plane).unwrap(), SpaceClass::Space);
    }

    #[test]
    fn ideal_point_on_quadric() {
        assert_eq!(
            ideal_point(Sheet::Plus, 0.0, 0.0),
            Vec4::new(0.0, 0.0, 1.0, 1.0)
        );
        let v = ideal_point(Sheet::Minus, 3.0, 4.0);
        assert!((v.x2 + 26f64.sqrt()).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let sheet = if rng.gen_bool(0.5) {
                Sheet::Plus
            } else {
                Sheet::Minus
            };
            let v = ideal_point(sheet, rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
            assert!(quad(&v).abs() < 1e-12 * v.euclidean_norm_sqr());
        }
    }

    #[test]
    fn boundary_chart_values() {
        let north = boundary_to_complex(&Vec4::new(0.0, 0.0, 1.0, 1.0)).unwrap();
        assert!(north.finite().unwrap().norm() < 1e-15);
        let south = boundary_to_complex(&Vec4::new(0.0, 0.0, -1.0, 1.0)).unwrap();
        assert!(south.is_infinite());
        let v = Vec4::new(1.0, 0.0, 2f64.sqrt(), 1.0);
        let z = boundary_to_complex(&v).unwrap().finite().unwrap();
        assert!((z.re - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!(z.im.abs() < 1e-15);
        assert!(matches!(
            boundary_to_complex(&Vec4::new(1.0, 0.0, 0.0, 1.0)),
            Err(MinkowskiError::NotOnQuadric(_))
        ));
    }

    #[test]
    fn boundary_map_injective_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pts = Vec::new();
        for _ in 0..60 {
            let sheet = if rng.gen_bool(0.5) {
                Sheet::Plus
            } else {
                Sheet::Minus
            };
            pts.push(ideal_point(
                sheet,
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
            ));
        }
        let zs: Vec<ExtC> = pts
            .iter()
            .map(|p| boundary_to_complex(p).unwrap())
            .collect();
        for i in 0..zs.len() {
            for j in (i + 1)..zs.len() {
                let du = (pts[i].x0 - pts[j].x0).abs()
                    + (pts[i].x1 - pts[j].x1).abs()
                    + (pts[i].x2 - pts[j].x2).abs();
                if du > 1e-6 {
                    assert!(zs[i].chordal(zs[j]) > 1e-9);
                }
            }
        }
    }

    #[test]
    fn pogorelov_center_and_orthogonal() {
        // Radial at the chart center: unchanged up to the time flip.
        let v = pogorelov([0.0, 0.0, 0.0], [0.3, -0.2, 0.5]).unwrap();
        assert_eq!(v, [0.3, -0.2, -0.5]);
        // Purely m-orthogonal to the radial direction: only the flip acts.
        let x = [0.7, 0.0, 0.3];
        let w = [0.3, 1.0, 0.7]; // m(x, w) = 0.21 − 0.21 = 0
        assert!(chart_minkowski(&x, &w).abs() < 1e-15);
        let out = pogorelov(x, w).unwrap();
        assert!((out[0] - w[0]).abs() < 1e-14);
        assert!((out[1] - w[1]).abs() < 1e-14);
        assert!((out[2] + w[2]).abs() < 1e-14);
        // Light cone rejected.
        assert_eq!(
            pogorelov([1.0, 0.0, 1.0], [1.0, 0.0, 0.0]),
            Err(MinkowskiError::OnLightCone)
        );
    }

    /// Finite-difference symmetrized gradient of the pushed field; the
    /// independent oracle for the Killing property.
    fn killing_defect(gen: &KillingGenerator, x: [f64; 3]) -> f64 {
        let h = 1e-5;
        let field = |p: [f64; 3]| pogorelov(p, gen.field_at(p)).unwrap();
        let mut grad = [[0.0f64; 3]; 3];
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (field(xp), field(xm));
            for i in 0..3 {
                grad[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((grad[i][j] + grad[j][i]).abs());
            }
        }
        worst
    }

    #[test]
    fn pogorelov_killing_fields() {
        let gens = KillingGenerator::basis();
        for g in &gens {
            assert!(g.is_in_algebra());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut checked = 0;
        while checked < 100 {
            let x = [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ];
            let m = chart_minkowski(&x, &x);
            if m.abs() < 0.1 || (1.0 + m).abs() < 0.1 {
                continue;
            }
            for g in &gens {
                assert!(killing_defect(g, x) < 1e-6);
            }
            checked += 1;
        }
    }

    #[test]
    fn lorentz_preserves_form() {
        let t = Lorentz::rotation(0, 1, 0.7)
            .compose(&Lorentz::boost(0, 0.5))
            .compose(&Lorentz::rotation(0, 3, -0.3))
            .compose(&Lorentz::boost(1, -0.8));
        assert!(t.form_defect() < 1e-12);
        let p = ideal_point(Sheet::Plus, 1.5, -0.3);
        let q_img = quad(&t.apply(&p));
        assert!(q_img.abs() < 1e-12 * t.apply(&p).euclidean_norm_sqr());
    }
}
