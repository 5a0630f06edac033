//! Splits whole KEEL files into stratified 5-fold train/test files.
//!
//! cargo run --example make_folds -- [SRC_DIR] [DST_DIR] [SEED]
//!
//! Defaults: data/keel-full, data/keel, 20231001. Writes
//! `DST_DIR/<name>/<name>-5-<i>tra.dat` and `...tst.dat`.

use std::path::PathBuf;

use scalebench::keel::{fold_file_name, parse_keel_file, split_document};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut args = std::env::args().skip(1);
    let src = args.next().map(PathBuf::from).unwrap_or_else(|| root.join("data/keel-full"));
    let dst = args.next().map(PathBuf::from).unwrap_or_else(|| root.join("data/keel"));
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20231001);

    let mut files: Vec<PathBuf> = std::fs::read_dir(&src)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "dat"))
        .collect();
    files.sort();
    for path in files {
        let name = path.file_stem().and_then(|s| s.to_str()).ok_or("bad file name")?.to_string();
        let doc = parse_keel_file(&path)?;
        let dir = dst.join(&name);
        std::fs::create_dir_all(&dir)?;
        for (i, (train, test)) in split_document(&doc, 5, seed)?.into_iter().enumerate() {
            std::fs::write(dir.join(fold_file_name(&name, i + 1, true)), train.to_keel_string())?;
            std::fs::write(dir.join(fold_file_name(&name, i + 1, false)), test.to_keel_string())?;
        }
        println!("{name}: {} rows", doc.table.rows.len());
    }
    Ok(())
}
