//! Prints the sign-to-trait table and its overlap structure, then writes the
//! lexicon JSON (to the path given as the first argument, or `lexicon.json`).
//!
//!     cargo run --example export_lexicon -- /tmp/lexicon.json

use zodiac_lab::cli::cmd_export_lexicon;
use zodiac_lab::lexicon::{build_default_assignments, build_default_lexicon, ZodiacSign};

fn main() -> zodiac_lab::Result<()> {
    let lexicon = build_default_lexicon();
    let table = build_default_assignments(&lexicon)?;
    for sign in ZodiacSign::ALL {
        let names: Vec<&str> = table.traits(sign).iter().map(|&t| lexicon.descriptor(t)).collect();
        println!("{:<12} {}", sign.name(), names.join(", "));
    }

    let overlap = table.overlap_matrix();
    println!("\nshared traits between signs:");
    print!("{:12}", "");
    for s in ZodiacSign::ALL {
        print!("{:>4}", &s.name()[..3]);
    }
    println!();
    for a in ZodiacSign::ALL {
        print!("{:<12}", a.name());
        for b in ZodiacSign::ALL {
            print!("{:>4}", overlap[a.ordinal()][b.ordinal()]);
        }
        println!();
    }
    println!(
        "{} of {} descriptors are assigned to some sign",
        table.union().len(),
        lexicon.len()
    );

    let out = std::env::args().nth(1).unwrap_or_else(|| "lexicon.json".into());
    cmd_export_lexicon(out.as_ref())?;
    println!("wrote {out}");
    Ok(())
}
