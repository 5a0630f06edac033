//! Writes a critical-difference diagram for six scalers.
//!
//! cargo run --example cd_diagram [-- OUT.svg]

use std::path::PathBuf;

use scalebench::harness::{cd_cliques, emit_cd_diagram};
use scalebench::stats::nemenyi_cd;

fn main() -> scalebench::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cd_example.svg"));
    let names: Vec<String> = ["NS", "SS", "MM", "MA", "RS", "QT"].map(String::from).to_vec();
    let ranks = [4.9, 2.6, 3.4, 3.8, 2.9, 3.4];
    let cd = nemenyi_cd(names.len(), 82, 0.05)?;
    for g in cd_cliques(&ranks, cd) {
        let members: Vec<&str> = g.iter().map(|&i| names[i].as_str()).collect();
        println!("not significantly different: {}", members.join(" "));
    }
    emit_cd_diagram(&names, &ranks, cd, "Percep, F1 (N = 82)", &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
