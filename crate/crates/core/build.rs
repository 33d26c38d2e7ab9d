use std::fmt::Write as _;
use std::path::Path;

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog");
    println!("cargo:rerun-if-changed={}", root.display());
    let mut dirs: Vec<_> = std::fs::read_dir(&root)
        .expect("catalog directory")
        .map(|d| d.expect("dir entry").path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    let mut out = String::from("pub static CATALOG: &[(&str, &[(&str, &str)])] = &[\n");
    for d in &dirs {
        println!("cargo:rerun-if-changed={}", d.display());
        let mut files: Vec<_> = std::fs::read_dir(d)
            .expect("entry directory")
            .map(|f| f.expect("file entry").path())
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        let name = d.file_name().unwrap().to_string_lossy();
        write!(out, "    ({name:?}, &[").unwrap();
        for f in &files {
            println!("cargo:rerun-if-changed={}", f.display());
            let fname = f.file_name().unwrap().to_string_lossy();
            write!(out, "({fname:?}, include_str!({:?})), ", f.display().to_string()).unwrap();
        }
        out.push_str("]),\n");
    }
    out.push_str("];\n");
    let notes = root.join("notes.txt");
    if notes.exists() {
        println!("cargo:rerun-if-changed={}", notes.display());
        writeln!(out, "pub static NOTES: &str = include_str!({:?});", notes.display().to_string()).unwrap();
    } else {
        out.push_str("pub static NOTES: &str = \"\";\n");
    }
    let dest = Path::new(&std::env::var("OUT_DIR").unwrap()).join("embedded_catalog.rs");
    std::fs::write(dest, out).unwrap();
}
