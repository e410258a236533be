//! Running a seeded trial batch from code, as the command-line tool does.

use condtest::trials::{run_batch, Algorithm, BatchConfig};

fn main() -> condtest::Result<()> {
    let config = BatchConfig {
        dist: Some("halfheavy:1000".into()),
        trials: 20,
        seed: 42,
        jobs: 4,
        ..BatchConfig::new(Algorithm::TestUniformity)
    };
    let batch = run_batch(&config)?;
    print!(
        "{}",
        batch
            .to_jsonl()
            .lines()
            .take(2)
            .map(|l| format!("{l}\n"))
            .collect::<String>()
    );
    println!("{}", batch.summary);
    Ok(())
}
