//! Embeds a VN stored as BRITE onto a substrate stored as BRITE, printing
//! the same summary and JSON the `embed` subcommand prints.
//!
//!     cargo run --example embed_files -- tests/golden/substrate.brite tests/golden/vn.brite

use std::path::PathBuf;

use hcmvne::cli::cmd_embed;
use hcmvne::embedding::{Algorithm, EmbedParams};

fn main() -> hcmvne::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut args = std::env::args().skip(1).map(PathBuf::from);
    let substrate = args.next().unwrap_or_else(|| root.join("tests/golden/substrate.brite"));
    let vn = args.next().unwrap_or_else(|| root.join("tests/golden/vn.brite"));
    for a in Algorithm::ALL {
        let rep = cmd_embed(&substrate, &vn, a, &EmbedParams::default())?;
        print!("{}", rep.human());
        println!("{}\n", rep.json());
    }
    Ok(())
}
