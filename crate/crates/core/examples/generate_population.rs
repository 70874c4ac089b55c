//! Generates a population at three signal levels and compares the share of
//! labels that fall in the individual's own sign set with the closed form
//! `p + (1 - p) * 10 / 100`.
//!
//!     cargo run --example generate_population

use zodiac_lab::lexicon::{build_default_assignments, build_default_lexicon};
use zodiac_lab::synthpop::{generate_population, write_population_csv, GenerationConfig};

fn main() -> zodiac_lab::Result<()> {
    let lexicon = build_default_lexicon();
    let table = build_default_assignments(&lexicon)?;

    let head = generate_population(
        &GenerationConfig {
            population_size: 5,
            ..Default::default()
        },
        &lexicon,
        &table,
    )?;
    write_population_csv(&head, std::io::stdout()).expect("stdout");

    println!("\n  p   in-sign share   expected");
    for p in [0.0, 0.1, 1.0] {
        let config = GenerationConfig {
            population_size: 20_000,
            signal_probability: p,
            ..Default::default()
        };
        let pop = generate_population(&config, &lexicon, &table)?;
        let in_sign = pop
            .individuals
            .iter()
            .filter(|i| table.contains(i.sign, i.label))
            .count();
        println!(
            "{p:4.1}   {:13.4}   {:8.4}",
            in_sign as f64 / pop.len() as f64,
            p + (1.0 - p) * 0.1
        );
    }
    Ok(())
}
