//! Distribution spec strings.
//!
//! | spec | distribution |
//! |------|--------------|
//! | `uniform:<n>` | uniform over `n` elements |
//! | `halfheavy:<n>` | `2/n` on the first half, 0 on the second |
//! | `zipf:<n>:<s>` | `p_i ∝ i^{-s}`, `i = 1..n` |
//! | `pointmass:<n>:<i>` | all mass on element `i` (one-based) |
//! | `file:<path>` | JSON array of non-negative weights, renormalized |
//! | `uniblock-even:<n>:<seed>` | uniform over a random set of size `4^k` |
//! | `uniblock-odd:<n>:<seed>` | uniform over a random set of size `2·4^k` |
//! | `string:<path>` | `mu_{b(x)}` for the bit string `x` stored at `path` |
//!
//! For the specs that take `n`, the size may be left out (`uniform`,
//! `zipf::1.5`) and supplied separately through [`parse_with_n`].

use std::fs;

use crate::adversarial::{balanced_extend, gen_uniblock, parse_bits, string_distribution, Parity};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::rng;

/// Parse a spec string that carries its own domain size.
pub fn parse(spec: &str) -> Result<Distribution> {
    parse_with_n(spec, None)
}

/// Parse a spec string, using `default_n` where the spec omits the size. A
/// size given both ways must agree.
pub fn parse_with_n(spec: &str, default_n: Option<usize>) -> Result<Distribution> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let dist = match kind {
        "file" => load_weights(spec, rest)?,
        "string" => {
            let text = fs::read_to_string(rest).map_err(|e| Error::spec(spec, e.to_string()))?;
            let x = parse_bits(&text).map_err(|e| Error::spec(spec, e.to_string()))?;
            if x.is_empty() {
                return Err(Error::spec(spec, "empty bit string"));
            }
            string_distribution(&balanced_extend(&x))?
        }
        _ => {
            let args: Vec<&str> = if rest.is_empty() {
                Vec::new()
            } else {
                rest.split(':').collect()
            };
            let n = size_arg(spec, args.first().copied(), default_n)?;
            generated(spec, kind, n, &args)?
        }
    };
    if let Some(n) = default_n {
        if dist.len() != n {
            return Err(Error::spec(
                spec,
                format!("describes {} elements but n = {n}", dist.len()),
            ));
        }
    }
    Ok(dist)
}

fn size_arg(spec: &str, arg: Option<&str>, default_n: Option<usize>) -> Result<usize> {
    let n = match arg.filter(|a| !a.is_empty()) {
        Some(a) => a
            .parse::<usize>()
            .map_err(|_| Error::spec(spec, format!("bad size `{a}`")))?,
        None => default_n.ok_or_else(|| Error::spec(spec, "no domain size given"))?,
    };
    if n == 0 {
        return Err(Error::spec(spec, "domain size must be positive"));
    }
    Ok(n)
}

fn arg<'a>(spec: &str, args: &[&'a str], i: usize, what: &str) -> Result<&'a str> {
    args.get(i)
        .copied()
        .ok_or_else(|| Error::spec(spec, format!("missing {what}")))
}

fn generated(spec: &str, kind: &str, n: usize, args: &[&str]) -> Result<Distribution> {
    let extra = |count: usize| -> Result<()> {
        if args.len() > count {
            return Err(Error::spec(spec, "too many fields"));
        }
        Ok(())
    };
    match kind {
        "uniform" => {
            extra(1)?;
            Ok(Distribution::uniform(n))
        }
        "halfheavy" => {
            extra(1)?;
            if n < 2 {
                return Err(Error::spec(spec, "halfheavy needs n >= 2"));
            }
            Distribution::from_weights((0..n).map(|i| if i < n.div_ceil(2) { 1.0 } else { 0.0 }).collect())
        }
        "zipf" => {
            extra(2)?;
            let s: f64 = arg(spec, args, 1, "exponent")?
                .parse()
                .map_err(|_| Error::spec(spec, "bad exponent"))?;
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::spec(spec, "exponent must be a non-negative number"));
            }
            Distribution::from_weights((1..=n).map(|i| (i as f64).powf(-s)).collect())
        }
        "pointmass" => {
            extra(2)?;
            let i: usize = arg(spec, args, 1, "element")?
                .parse()
                .map_err(|_| Error::spec(spec, "bad element"))?;
            if i == 0 || i > n {
                return Err(Error::spec(spec, format!("element must lie in 1..={n}")));
            }
            Distribution::point_mass(n, i - 1)
        }
        "uniblock-even" | "uniblock-odd" => {
            extra(2)?;
            let seed: u64 = arg(spec, args, 1, "seed")?
                .parse()
                .map_err(|_| Error::spec(spec, "bad seed"))?;
            let parity = if kind == "uniblock-even" {
                Parity::Even
            } else {
                Parity::Odd
            };
            let draw = gen_uniblock(n, parity, &mut rng::seeded(seed)).map_err(|e| Error::spec(spec, e.to_string()))?;
            Ok(draw.dist)
        }
        _ => Err(Error::spec(spec, format!("unknown kind `{kind}`"))),
    }
}

fn load_weights(spec: &str, path: &str) -> Result<Distribution> {
    let text = fs::read_to_string(path).map_err(|e| Error::spec(spec, e.to_string()))?;
    let weights: Vec<f64> = serde_json::from_str(&text).map_err(|e| Error::spec(spec, e.to_string()))?;
    Distribution::from_weights(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::tv_distance;

    #[test]
    fn generated_specs() {
        assert_eq!(parse("uniform:5").unwrap(), Distribution::uniform(5));
        let h = parse("halfheavy:1000").unwrap();
        assert!((h.prob(0) - 0.002).abs() < 1e-15 && h.prob(999) == 0.0);
        assert!((tv_distance(&h, &Distribution::uniform(1000)).unwrap() - 0.5).abs() < 1e-12);
        let z = parse("zipf:3:1").unwrap();
        let h3 = 1.0 + 0.5 + 1.0 / 3.0;
        assert!((z.prob(0) - 1.0 / h3).abs() < 1e-12 && (z.prob(2) - 1.0 / (3.0 * h3)).abs() < 1e-12);
        assert_eq!(parse("pointmass:4:1").unwrap().probs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(parse("pointmass:4:4").unwrap().probs(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn size_from_flag() {
        assert_eq!(parse_with_n("uniform", Some(3)).unwrap().len(), 3);
        assert_eq!(parse_with_n("zipf::2", Some(7)).unwrap().len(), 7);
        assert!(parse_with_n("uniform:4", Some(5)).is_err());
        assert!(parse("uniform").is_err());
    }

    #[test]
    fn bad_specs() {
        for bad in [
            "",
            "nope:4",
            "uniform:x",
            "uniform:0",
            "uniform:4:9",
            "pointmass:4:0",
            "pointmass:4:5",
            "zipf:4",
            "zipf:4:-1",
            "uniblock-even:64:1",
            "file:/nonexistent",
        ] {
            assert!(matches!(parse(bad), Err(Error::InvalidSpec { .. })), "{bad}");
        }
    }

    #[test]
    fn uniblock_specs_are_seeded() {
        let a = parse("uniblock-even:256:9").unwrap();
        assert_eq!(a, parse("uniblock-even:256:9").unwrap());
        let size = a.support().len();
        assert!([4, 16, 64].contains(&size));
        let odd = parse("uniblock-odd:256:9").unwrap().support().len();
        assert!([8, 32, 128].contains(&odd));
    }

    #[test]
    fn file_specs() {
        let dir = std::env::temp_dir().join(format!("condtest-fixture-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let w = dir.join("w.json");
        fs::write(&w, "[1, 3]").unwrap();
        let d = parse(&format!("file:{}", w.display())).unwrap();
        assert_eq!(d.probs(), &[0.25, 0.75]);
        let b = dir.join("x.bits");
        fs::write(&b, "01\n").unwrap();
        let d = parse(&format!("string:{}", b.display())).unwrap();
        assert_eq!(d.probs(), &[0.125, 0.375, 0.375, 0.125]);
        fs::write(&w, "[1, -3]").unwrap();
        assert!(parse(&format!("file:{}", w.display())).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }
}
