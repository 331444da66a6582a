//! Seeded rejection sampler for ample classes.
//!
//! A draw is m(-K) + v with m uniform in 1..=radius and every coordinate of
//! v uniform in -radius..=radius. The draw is pulled back to the
//! root-orthogonal subspace and kept if it is ample.

use crate::lattice::DivisorClass;
use crate::surface::{is_ample, mumford_pullback, ClassOnS, SurfaceModel};
use rand::Rng;

pub fn random_ample<R: Rng>(
    surface: &SurfaceModel,
    rng: &mut R,
    radius: i64,
    max_tries: usize,
) -> Option<ClassOnS> {
    let k = surface.k();
    let anti = -surface.canonical();
    for _ in 0..max_tries {
        let m = rng.gen_range(1..=radius);
        let v: Vec<i64> = (0..=k).map(|_| rng.gen_range(-radius..=radius)).collect();
        let mut c = anti.scale_int(m);
        c = &c + &DivisorClass::from_ints(&v);
        let h = mumford_pullback(surface, &c).ok()?;
        if is_ample(surface, &h).ok()? {
            return Some(h);
        }
    }
    None
}
