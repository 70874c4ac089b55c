//! Seeded synthetic population: zodiac sign, nuisance covariates and a
//! trait label drawn from a two-component mixture.
//!
//! With probability `signal_probability` an individual's label is one of
//! their sign's ten traits; otherwise it is any of the 100 traits. Everything
//! else is decoy signal. Each individual consumes the generator in a fixed
//! field order: sign, birth month, sleep (two draws), chai, retrograde flag,
//! lunar vibe, label.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::format_g;
use crate::lexicon::{AssignmentTable, TraitId, TraitLexicon, ZodiacSign, SIGN_COUNT, TRAIT_COUNT};
use crate::rng::Pcg32;

/// PCG stream used for population generation.
pub const POPULATION_STREAM: u64 = 0;

/// Header line of the population CSV.
pub const CSV_HEADER: &str = "sign,birth_month,sleep_hours,chai_cups,mercury_retrograde,lunar_vibe,label";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub population_size: usize,
    pub signal_probability: f64,
    pub seed: u64,
    pub sleep_mean_hours: f64,
    pub sleep_sd_hours: f64,
    pub chai_rate_cups_per_day: f64,
    pub retrograde_probability: f64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            population_size: 5000,
            signal_probability: 0.1,
            seed: 42,
            sleep_mean_hours: 7.0,
            sleep_sd_hours: 1.0,
            chai_rate_cups_per_day: 3.0,
            retrograde_probability: 0.19,
        }
    }
}

impl GenerationConfig {
    /// Checks every field; error fields are reported as
    /// `generation.<name>`.
    pub fn validate(&self) -> Result<()> {
        let field = |name: &str| format!("generation.{name}");
        if self.population_size == 0 {
            return Err(Error::invalid(field("population_size"), "must be at least 1"));
        }
        for (name, p) in [
            ("signal_probability", self.signal_probability),
            ("retrograde_probability", self.retrograde_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(field(name), format!("must be within [0, 1], got {p}")));
            }
        }
        if !self.sleep_mean_hours.is_finite() {
            return Err(Error::invalid(field("sleep_mean_hours"), "must be finite"));
        }
        for (name, v) in [
            ("sleep_sd_hours", self.sleep_sd_hours),
            ("chai_rate_cups_per_day", self.chai_rate_cups_per_day),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field(name), format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub sign: ZodiacSign,
    /// Calendar month 1-12, always one of the two months the sign spans.
    pub birth_month: u8,
    pub sleep_hours: f64,
    pub chai_cups: u32,
    pub mercury_retrograde: bool,
    pub lunar_vibe: f64,
    pub label: TraitId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub individuals: Vec<Individual>,
    pub config: GenerationConfig,
}

impl Population {
    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.individuals.iter().map(|i| i.label.index()).collect()
    }
}

/// Draws one label: a unit draw decides the mixture branch, then one
/// integer draw selects either among the sign's ten traits (ascending id
/// order) or among all 100.
pub fn sample_label(
    sign: ZodiacSign,
    table: &AssignmentTable,
    signal_probability: f64,
    rng: &mut Pcg32,
) -> TraitId {
    if rng.next_unit() < signal_probability {
        let set = table.traits(sign);
        set[rng.index(set.len())]
    } else {
        TraitId::new(rng.index(TRAIT_COUNT)).expect("index below trait count")
    }
}

fn sample_month(sign: ZodiacSign, rng: &mut Pcg32) -> u8 {
    let [(first, d1), (second, d2)] = sign.month_span();
    if rng.next_unit() < d1 as f64 / (d1 as f64 + d2 as f64) {
        first
    } else {
        second
    }
}

pub fn generate_population(
    config: &GenerationConfig,
    lexicon: &TraitLexicon,
    table: &AssignmentTable,
) -> Result<Population> {
    if config.population_size == 0 {
        return Err(Error::EmptyPopulation);
    }
    config.validate()?;
    debug_assert_eq!(lexicon.len(), TRAIT_COUNT);

    let mut rng = Pcg32::new(config.seed, POPULATION_STREAM);
    let individuals = (0..config.population_size)
        .map(|_| {
            let sign = ZodiacSign::ALL[rng.index(SIGN_COUNT)];
            let birth_month = sample_month(sign, &mut rng);
            let sleep_hours = rng
                .normal(config.sleep_mean_hours, config.sleep_sd_hours)
                .clamp(0.0, 24.0);
            let chai_cups = rng.poisson(config.chai_rate_cups_per_day);
            let mercury_retrograde = rng.bernoulli(config.retrograde_probability);
            let lunar_vibe = rng.next_unit();
            let label = sample_label(sign, table, config.signal_probability, &mut rng);
            Individual {
                sign,
                birth_month,
                sleep_hours,
                chai_cups,
                mercury_retrograde,
                lunar_vibe,
                label,
            }
        })
        .collect();
    Ok(Population {
        individuals,
        config: config.clone(),
    })
}

/// Writes the population CSV: canonical sign names, integer labels, reals
/// with 9 significant digits and booleans as 0/1.
pub fn write_population_csv<W: Write>(population: &Population, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for ind in &population.individuals {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            ind.sign.name(),
            ind.birth_month,
            format_g(ind.sleep_hours, 9),
            ind.chai_cups,
            ind.mercury_retrograde as u8,
            format_g(ind.lunar_vibe, 9),
            ind.label,
        )?;
    }
    Ok(())
}

/// Reads a population CSV written by [`write_population_csv`]. The CSV
/// carries no generation settings, so `config` is attached as provenance
/// and its `population_size` is set to the row count.
pub fn read_population_csv<R: BufRead>(input: R, config: GenerationConfig) -> Result<Population> {
    let bad = |line: usize, message: String| Error::Format {
        what: "population csv",
        message: format!("line {line}: {message}"),
    };
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end() == CSV_HEADER => {}
        Some((_, Ok(h))) => return Err(bad(1, format!("unexpected header `{h}`"))),
        Some((_, Err(e))) => return Err(bad(1, e.to_string())),
        None => return Err(Error::Empty("population csv")),
    }
    let mut individuals = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(|e| bad(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 7 {
            return Err(bad(lineno, format!("expected 7 fields, found {}", f.len())));
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| bad(lineno, format!("bad {what} `{s}`")))
        };
        let sign = ZodiacSign::from_name(f[0]).ok_or_else(|| bad(lineno, format!("unknown sign `{}`", f[0])))?;
        let birth_month: u8 = f[1].parse().map_err(|_| bad(lineno, format!("bad month `{}`", f[1])))?;
        if !sign.contains_month(birth_month) {
            return Err(bad(lineno, format!("month {birth_month} is outside {sign}")));
        }
        let chai_cups: u32 = f[3].parse().map_err(|_| bad(lineno, format!("bad chai count `{}`", f[3])))?;
        let mercury_retrograde = match f[4] {
            "0" => false,
            "1" => true,
            other => return Err(bad(lineno, format!("bad retrograde flag `{other}`"))),
        };
        let label = f[6]
            .parse::<usize>()
            .ok()
            .and_then(TraitId::new)
            .ok_or_else(|| bad(lineno, format!("bad label `{}`", f[6])))?;
        individuals.push(Individual {
            sign,
            birth_month,
            sleep_hours: num(f[2], "sleep_hours")?,
            chai_cups,
            mercury_retrograde,
            lunar_vibe: num(f[5], "lunar_vibe")?,
            label,
        });
    }
    if individuals.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let config = GenerationConfig {
        population_size: individuals.len(),
        ..config
    };
    Ok(Population { individuals, config })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{build_default_assignments, build_default_lexicon};

    fn setup() -> (TraitLexicon, AssignmentTable) {
        let lex = build_default_lexicon();
        let table = build_default_assignments(&lex).unwrap();
        (lex, table)
    }

    #[test]
    fn full_signal_stays_in_sign_set() {
        let (_, table) = setup();
        let mut rng = Pcg32::new(3, 0);
        for sign in ZodiacSign::ALL {
            for _ in 0..200 {
                assert!(table.contains(sign, sample_label(sign, &table, 1.0, &mut rng)));
            }
        }
    }

    #[test]
    fn label_consumes_two_draws() {
        let (_, table) = setup();
        let mut a = Pcg32::new(8, 1);
        let mut b = a.clone();
        sample_label(ZodiacSign::Leo, &table, 0.5, &mut a);
        b.next_u32();
        b.next_u32();
        // rejection is astronomically rare for n = 10 or 100
        assert_eq!(a, b);
    }

    #[test]
    fn population_shape_and_ranges() {
        let (lex, table) = setup();
        let cfg = GenerationConfig::default();
        let pop = generate_population(&cfg, &lex, &table).unwrap();
        assert_eq!(pop.len(), 5000);
        for ind in &pop.individuals {
            assert!(ind.sign.contains_month(ind.birth_month));
            assert!((0.0..=24.0).contains(&ind.sleep_hours));
            assert!((0.0..1.0).contains(&ind.lunar_vibe));
        }
        assert_eq!(generate_population(&cfg, &lex, &table).unwrap(), pop);
    }

    #[test]
    fn full_signal_population() {
        let (lex, table) = setup();
        let cfg = GenerationConfig {
            population_size: 1000,
            signal_probability: 1.0,
            ..Default::default()
        };
        let pop = generate_population(&cfg, &lex, &table).unwrap();
        assert!(pop.individuals.iter().all(|i| table.contains(i.sign, i.label)));
    }

    #[test]
    fn zero_population_rejected() {
        let (lex, table) = setup();
        let cfg = GenerationConfig {
            population_size: 0,
            ..Default::default()
        };
        assert!(matches!(generate_population(&cfg, &lex, &table), Err(Error::EmptyPopulation)));
    }

    #[test]
    fn validation_names_field() {
        let cfg = GenerationConfig {
            signal_probability: 1.7,
            ..Default::default()
        };
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("generation.signal_probability"), "{err}");
    }

    #[test]
    fn csv_rewrite_is_stable() {
        let (lex, table) = setup();
        let cfg = GenerationConfig {
            population_size: 300,
            ..Default::default()
        };
        let pop = generate_population(&cfg, &lex, &table).unwrap();
        let mut first = Vec::new();
        write_population_csv(&pop, &mut first).unwrap();
        let text = String::from_utf8(first.clone()).unwrap();
        assert_eq!(text.lines().count(), 301);
        assert!(text.starts_with(CSV_HEADER));

        let back = read_population_csv(first.as_slice(), cfg.clone()).unwrap();
        let mut second = Vec::new();
        write_population_csv(&back, &mut second).unwrap();
        assert_eq!(first, second);
        for (a, b) in pop.individuals.iter().zip(&back.individuals) {
            assert_eq!((a.sign, a.birth_month, a.chai_cups, a.label), (b.sign, b.birth_month, b.chai_cups, b.label));
            assert!((a.sleep_hours - b.sleep_hours).abs() <= 1e-8 * a.sleep_hours.abs().max(1.0));
            assert!((a.lunar_vibe - b.lunar_vibe).abs() <= 1e-8);
        }
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let text = format!("{CSV_HEADER}\nAries,7,7.5,3,0,0.5,4\n");
        assert!(read_population_csv(text.as_bytes(), GenerationConfig::default()).is_err());
        let text = format!("{CSV_HEADER}\nAries,3,7.5,3,0,0.5,100\n");
        assert!(read_population_csv(text.as_bytes(), GenerationConfig::default()).is_err());
    }
}
