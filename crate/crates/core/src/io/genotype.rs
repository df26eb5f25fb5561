//! `tmaze-genotype v1 7150` followed by one gene per line.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rnn::{Genotype, GENE_COUNT};

pub fn genotype_header() -> String {
    format!("tmaze-genotype v1 {GENE_COUNT}")
}

pub fn write_genotype_text(g: &Genotype, out: &mut String) {
    writeln!(out, "{}", genotype_header()).unwrap();
    for v in g.genes() {
        // `{}` on f64 prints the shortest string that parses back exactly
        writeln!(out, "{v}").unwrap();
    }
}

pub fn genotype_to_string(g: &Genotype) -> String {
    let mut s = String::with_capacity(GENE_COUNT * 22);
    write_genotype_text(g, &mut s);
    s
}

/// Parse one genotype block from `(line number, text)` pairs.
pub fn parse_genotype_lines<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    path: &Path,
) -> Result<Genotype> {
    let (n, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing genotype header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("tmaze-genotype") || parts.next() != Some("v1") {
        return Err(Error::parse(path, n, format!("expected `{}`, found `{header}`", genotype_header())));
    }
    let declared: usize = parts
        .next()
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| Error::parse(path, n, "genotype header lacks a gene count"))?;
    let mut genes = Vec::with_capacity(declared);
    for _ in 0..declared {
        let Some((ln, text)) = lines.next() else { break };
        let v: f64 = text
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, ln, format!("bad gene value `{}`", text.trim())))?;
        if !v.is_finite() {
            return Err(Error::parse(path, ln, "gene value is not finite"));
        }
        genes.push(v);
    }
    if genes.len() != declared || declared != GENE_COUNT {
        return Err(Error::BadLength {
            expected: GENE_COUNT,
            found: genes.len(),
        });
    }
    Genotype::new(genes)
}

/// Parse a genotype file. Blank lines and `#` comment lines are ignored.
pub fn parse_genotype(text: &str, path: &Path) -> Result<Genotype> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let g = parse_genotype_lines(&mut lines, path)?;
    if let Some((n, _)) = lines.next() {
        return Err(Error::parse(path, n, "trailing data after genotype"));
    }
    Ok(g)
}

pub fn load_genotype(path: &Path) -> Result<Genotype> {
    let text = super::read_input(path)?;
    parse_genotype(&text, path)
}

pub fn save_genotype(g: &Genotype, path: &Path) -> Result<()> {
    super::write_atomic(path, genotype_to_string(g).as_bytes())
}

pub const GENOTYPE_KIND: &str = "tmaze-genotype-file";

/// Genotype preceded by a provenance comment.
pub fn save_genotype_with_header(g: &Genotype, path: &Path, header: &super::ArtifactHeader) -> Result<()> {
    let mut s = header.line(GENOTYPE_KIND);
    write_genotype_text(g, &mut s);
    super::write_atomic(path, s.as_bytes())
}

/// Genotype and its provenance header, if the file has one.
pub fn load_genotype_with_header(path: &Path) -> Result<(Option<super::ArtifactHeader>, Genotype)> {
    let text = super::read_input(path)?;
    let header = match text.lines().next() {
        Some(l) if l.starts_with('#') => {
            Some(super::ArtifactHeader::parse(l, GENOTYPE_KIND).map_err(|m| Error::parse(path, 1, m))?)
        }
        _ => None,
    };
    Ok((header, parse_genotype(&text, path)?))
}
