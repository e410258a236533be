//! Bucketing a known distribution by geometric probability ranges, and the
//! coarse/restricted views the testers use.

use condtest::bucketing::{bucket, bucket_prime, coarsen, flatness, restrict};
use condtest::fixture;

fn main() -> condtest::Result<()> {
    let mu = fixture::parse("zipf:20:1")?;
    let part = bucket(&mu, 0.5)?;
    println!("Bucket(zipf:20:1, 0.5): k = {}", part.k());
    for (i, m) in part.buckets().iter().enumerate().filter(|(_, m)| !m.is_empty()) {
        println!("  M_{i}: {m:?}");
    }
    println!("coarsened: {:?}", coarsen(&mu, &part)?.probs());
    println!("flatness {:.3} (below 0.5)", flatness(&mu, &part));
    let top = restrict(&mu, part.bucket(part.nonempty()[1]))?;
    println!("restriction to the second non-empty bucket: {:?}", top.dist.probs());

    let fine = bucket_prime(&mu, 0.5)?;
    println!("Bucket'(zipf:20:1, 0.5): sizes {:?}", fine.sizes());
    Ok(())
}
