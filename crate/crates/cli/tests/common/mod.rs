//! Synthetic inputs and helpers for driving the `mfc` binary.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn mfc() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mfc"));
    cmd.env_remove("MFC_THREADS").env("RUST_LOG", "error");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    mfc().args(args).output().expect("spawn mfc")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Corpus whose form distances grow with meaning distances: item `i` has
/// a gloss of `i + 1` tokens and a vector at angle `i * step` (or position
/// `i` on a line).
pub struct MonotoneCorpus {
    pub definitions: PathBuf,
    pub embeddings: PathBuf,
    pub ratings: PathBuf,
    pub stoplist: PathBuf,
    pub synonyms: PathBuf,
    pub matrices: (PathBuf, PathBuf),
    pub items: usize,
}

pub fn monotone_corpus(dir: &Path, items: usize) -> MonotoneCorpus {
    let mut defs = String::new();
    let mut emb = format!("{items} 2\n");
    for i in 0..items {
        let gloss = vec!["tok"; i + 1].join(" ");
        let parse = format!("(S {})", vec!["(X tok)"; i + 1].join(" "));
        defs.push_str(&format!("w{i}\tthe {gloss}\t{parse}\n"));
        let angle = i as f64 * 0.05;
        emb.push_str(&format!("w{i} {} {}\n", angle.cos(), angle.sin()));
    }
    // pairs (0, j) have strictly increasing distance and decreasing score
    let mut ratings = String::new();
    for j in 1..items {
        ratings.push_str(&format!("w0 w{j} {}\n", 100 - j));
    }
    ratings.push_str("w0 absent 3\n");

    let n = items;
    let mut meaning = format!("n,{n}\n");
    let mut form = format!("n,{n}\n");
    for i in 0..n {
        for j in i + 1..n {
            meaning.push_str(&format!("{}\n", j - i));
            form.push_str(&format!("{}\n", (j - i) * 2));
        }
    }
    let write = |name: &str, text: &str| {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    };
    MonotoneCorpus {
        definitions: write("definitions.tsv", &defs),
        embeddings: write("vectors.txt", &emb),
        ratings: write("ratings.txt", &ratings),
        stoplist: write("stop.txt", "the\n"),
        synonyms: write("synonyms.tsv", "tok\ttoken\n"),
        matrices: (write("meaning.csv", &meaning), write("form.csv", &form)),
        items,
    }
}

/// All regular files under `dir` except the manifest, with contents.
pub fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file() && p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}
