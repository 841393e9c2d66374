//! Random subcarrier allocation and the range-angle steering vector.
//!
//! ```bash
//! cargo run --example steering
//! ```

use precise_jamming::array::{alignment_phases, draw_allocation, steering_vector, ArrayGeometry, PolarPosition};
use precise_jamming::linalg::inner;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> precise_jamming::Result<()> {
    let geom = ArrayGeometry::half_wavelength(32, 3e9, 5e6, 1024)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alloc = draw_allocation(&geom, &mut rng);
    println!("allocation: {alloc}");

    let bob = PolarPosition::from_degrees(30.0, 650.0)?;
    let h = steering_vector(&geom, &alloc, bob);
    for (n, z) in h.entries().iter().take(4).enumerate() {
        println!("h[{n}] = {:+.6} {:+.6}j  (f = {:.1} Hz)", z.re, z.im, alloc.frequency(&geom, n));
    }

    // Phase alignment toward Bob: every antenna adds coherently there.
    let align = alignment_phases(&geom, &alloc, bob);
    let v: Vec<_> = align.iter().map(|p| p / (geom.n_antennas() as f64).sqrt()).collect();
    println!("|h_B^H v|^2 at Bob = {:.6}", inner(h.entries(), &v).norm_sqr());

    // The same weights seen from nearby points fall off in both angle and range.
    for (theta, range) in [(30.0, 700.0), (35.0, 650.0), (100.0, 550.0)] {
        let pos = PolarPosition::from_degrees(theta, range)?;
        let g = inner(steering_vector(&geom, &alloc, pos).entries(), &v).norm_sqr();
        println!("|h^H v|^2 at ({theta}°, {range} m) = {g:.6}");
    }
    Ok(())
}
