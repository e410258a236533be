//! The balanced-string reduction: a conditional oracle for mu_{b(x)} that
//! only probes bits of x.

use condtest::adaptive::{identity_primitive, PrimitiveMode};
use condtest::adversarial::{balanced_extend, format_bits, parse_bits, string_distribution, ReductionOracle};
use condtest::rng::seeded;
use condtest::CondOracle;

fn main() -> condtest::Result<()> {
    let x = parse_bits("10110001")?;
    let y = balanced_extend(&x);
    println!("x = {}, b(x) = {}", format_bits(&x), format_bits(&y));
    let mu = string_distribution(&y)?;

    let mut oracle = ReductionOracle::for_string(&x, seeded(1))?;
    let q = [0, 1, 2, 3];
    let counts = oracle.draw_counts(&q, 40_000)?;
    let mass: f64 = q.iter().map(|&i| mu.prob(i)).sum();
    for (i, c) in q.iter().zip(&counts) {
        println!(
            "element {i}: observed {:.3}, exact {:.3}",
            *c as f64 / 40_000.0,
            mu.prob(*i) / mass
        );
    }
    println!(
        "{:.3} bit probes per sample",
        oracle.bit_queries() as f64 / oracle.emissions() as f64
    );

    // Testing mu_{b(x)} against mu_{b(x')} for a string x' at distance 1/4.
    let mut other = x.clone();
    other[..2].iter_mut().for_each(|b| *b = !*b);
    let known = string_distribution(&balanced_extend(&other))?;
    let v = identity_primitive(&mut oracle, &known, 0.1, 0.1, PrimitiveMode::Empirical, 1.0)?;
    println!(
        "against x' = {}: {}, {} bit probes in total",
        format_bits(&other),
        v.decision.as_str(),
        oracle.bit_queries()
    );
    Ok(())
}
