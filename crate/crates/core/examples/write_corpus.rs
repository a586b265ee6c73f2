//! Regenerates the bundled small-group corpus: `cargo run -p morita-core --example write_corpus [PATH]`.

use morita_core::fingcoh::corpus;

fn main() -> std::io::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/small_groups.txt").to_string());
    let groups = corpus::build();
    std::fs::write(&path, corpus::render(&groups))?;
    println!("wrote {} groups to {path}", groups.len());
    Ok(())
}
