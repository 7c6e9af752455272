//! Writes the configuration-sized problem files into a directory.
//!
//! cargo run -p aucert-core --example gen_fixtures -- fixtures

use std::path::PathBuf;

use aucert_core::corpus::{c_like, java_like};
use aucert_core::frontend::problem_file;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    for (name, (t1, t2)) in [("c_like.in", c_like()), ("java_like.in", java_like())] {
        let text = problem_file(&t1, &t2);
        std::fs::write(dir.join(name), &text)?;
        println!("{name}: {} + {} nodes, {} bytes", t1.size(), t2.size(), text.len());
    }
    Ok(())
}
