//! Uniblock ensembles: uniform on a random set of size 4^k (even) or 2·4^k
//! (odd). Every draw is far from uniform, and the parities are far apart.

use condtest::adversarial::{gen_uniblock, uniblock_k_range, Parity};
use condtest::learner::min_permutation_tv;
use condtest::rng::seeded;

fn main() -> condtest::Result<()> {
    let n = 1 << 12;
    let (lo, hi) = uniblock_k_range(n)?;
    println!("n = {n}: k ranges over {lo}..={hi}");
    let mut rng = seeded(11);
    for _ in 0..5 {
        let even = gen_uniblock(n, Parity::Even, &mut rng)?;
        let odd = gen_uniblock(n, Parity::Odd, &mut rng)?;
        println!(
            "even |U|={:>4} (tv to uniform {:.3})  odd |U|={:>4} ({:.3})  even vs odd {:.3}",
            even.set.len(),
            even.distance_to_uniform(),
            odd.set.len(),
            odd.distance_to_uniform(),
            min_permutation_tv(&even.dist, &odd.dist)?
        );
    }
    Ok(())
}
