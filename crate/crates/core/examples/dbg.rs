use hs_inscribe::horocycle::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mobius_angle(s: Complex64, b1: Base, b2: Base) -> f64 {
    // Send s to the disk center; geodesics to boundary points become rays.
    let m = |b: Base| -> Complex64 {
        match b {
            Base::Finite(x) => {
                let xb = Complex64::new(x, 0.0);
                (xb - s) / (xb - s.conj())
            }
            Base::Infinity => Complex64::new(1.0, 0.0), // limit of (x−s)/(x−s̄) as x→∞
        }
    };
    let (m1, m2) = (m(b1), m(b2));
    let d = (m1 / m2).arg().abs();
    d.min(2.0 * std::f64::consts::PI - d)
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let p = {
        use rand::Rng;
        rng.gen_range(2..=8)
    };
    let poly = random_polygon(&mut rng, p).unwrap();
    for i in 0..poly.len() {
        let s = poly.vertices[i];
        let b1 = poly.horocycles[i].base;
        let b2 = poly.horocycles[(i + 1) % poly.len()].base;
        let a_tan = poly.angle_at(i);
        let a_mob = mobius_angle(s, b1, b2);
        println!(
            "i={i} b1={b1:?} b2={b2:?} s=({:.4},{:.4}) alpha_tan={a_tan:.5} alpha_mobius={a_mob:.5} delta={:.5}",
            s.re, s.im, poly.vertex_to_geodesic(i)
        );
    }
}
