//! Writes the synthetic Garfield-shaped export.
//!
//! ```text
//! cargo run --example garfield_fixture -- fixtures/garfield_like.txt
//! ```

use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let path: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("garfield_like.txt"));
    let text = rpys::synthetic::garfield_like_export();
    std::fs::write(&path, &text)?;
    println!("wrote {} bytes to {}", text.len(), path.display());
    Ok(())
}
