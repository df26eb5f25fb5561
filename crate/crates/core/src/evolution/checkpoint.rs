//! Per-generation checkpoint files.
//!
//! ```text
//! tmaze-checkpoint v1
//! config_hash <hex>
//! code_version <semver>
//! master_seed <u64>
//! generation <m>
//! population <n>
//! rng derived-per-generation
//! state_hash <sha256 of everything below this line>
//! [history]
//! <history csv with best_generation,best_index columns>
//! [fitness]
//! index,fitness,trial_fitness,trial_elapsed
//! [best] <generation> <index>
//! <trial_fitness>,<trial_elapsed>
//! <genotype block>
//! [genotype <i>]
//! <genotype block>
//! ```
//!
//! Random streams are derived from the master seed and generation, so no
//! generator state needs saving beyond those two numbers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evolution::engine::{BestSoFar, Evaluation, Evolution, EvolutionConfig, GenerationRecord, TrialRecord};
use crate::io::genotype::{parse_genotype_lines, write_genotype_text};
use crate::io::{read_input, write_atomic, CODE_VERSION};
use crate::maze::Environment;

const HEADER: &str = "tmaze-checkpoint v1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn checkpoint_path(dir: &Path, generation: usize) -> PathBuf {
    dir.join(format!("gen_{generation:05}.ckpt"))
}

fn join<T: std::fmt::Display>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

pub fn checkpoint_text(evo: &Evolution, config_hash: &str) -> String {
    let mut body = String::new();
    body.push_str("[history]\n");
    for r in &evo.history {
        writeln!(
            body,
            "{},{},{},{},{},{}",
            r.generation, r.best_so_far_fitness, r.mean_fitness, r.best_elapsed_steps, r.best_generation, r.best_index
        )
        .unwrap();
    }
    body.push_str("[fitness]\n");
    for (i, e) in evo.evaluations.iter().enumerate() {
        writeln!(
            body,
            "{i},{},{},{}",
            e.fitness,
            join(e.trials.iter().map(|t| t.fitness)),
            join(e.trials.iter().map(|t| t.elapsed_steps))
        )
        .unwrap();
    }
    if let Some(b) = &evo.best {
        writeln!(body, "[best] {} {}", b.generation, b.index).unwrap();
        writeln!(
            body,
            "{},{}",
            join(b.evaluation.trials.iter().map(|t| t.fitness)),
            join(b.evaluation.trials.iter().map(|t| t.elapsed_steps))
        )
        .unwrap();
        write_genotype_text(&b.genotype, &mut body);
    }
    for (i, g) in evo.population.iter().enumerate() {
        writeln!(body, "[genotype {i}]").unwrap();
        write_genotype_text(g, &mut body);
    }

    let mut s = String::with_capacity(body.len() + 256);
    writeln!(s, "{HEADER}").unwrap();
    writeln!(s, "config_hash {config_hash}").unwrap();
    writeln!(s, "code_version {CODE_VERSION}").unwrap();
    writeln!(s, "master_seed {}", evo.master_seed).unwrap();
    writeln!(s, "generation {}", evo.generation).unwrap();
    writeln!(s, "population {}", evo.population.len()).unwrap();
    writeln!(s, "rng derived-per-generation").unwrap();
    writeln!(s, "state_hash {}", sha256_hex(body.as_bytes())).unwrap();
    s.push_str(&body);
    s
}

/// Write this generation's checkpoint and prune old ones.
pub fn save_checkpoint(evo: &Evolution, config_hash: &str, dir: &Path) -> Result<PathBuf> {
    let path = checkpoint_path(dir, evo.generation);
    write_atomic(&path, checkpoint_text(evo, config_hash).as_bytes())?;
    if evo.cfg.keep_checkpoints > 0 {
        let all = list_checkpoints(dir)?;
        let excess = all.len().saturating_sub(evo.cfg.keep_checkpoints);
        for (_, old) in all.into_iter().take(excess) {
            std::fs::remove_file(old)?;
        }
    }
    Ok(path)
}

/// Checkpoints in `dir`, oldest first.
pub fn list_checkpoints(dir: &Path) -> Result<Vec<(usize, PathBuf)>> {
    let mut out = Vec::new();
    if !dir.exists() {
        return Ok(out);
    }
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path();
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if let Some(num) = name.strip_prefix("gen_").and_then(|n| n.strip_suffix(".ckpt")) {
            if let Ok(m) = num.parse() {
                out.push((m, p));
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn latest_checkpoint(dir: &Path) -> Result<Option<PathBuf>> {
    Ok(list_checkpoints(dir)?.pop().map(|(_, p)| p))
}

/// Rebuild the run state from a checkpoint written by the same configuration.
pub fn load_checkpoint<'a>(
    path: &Path,
    cfg: EvolutionConfig,
    master_seed: u64,
    env: &'a Environment,
    config_hash: &str,
) -> Result<Evolution<'a>> {
    let text = read_input(path)?;
    let corrupt = |m: String| Error::CheckpointCorrupt(format!("{}: {m}", path.display()));

    let mut header = std::collections::HashMap::new();
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        offset += line.len();
        let line = line.trim_end();
        if i == 0 {
            if line != HEADER {
                return Err(corrupt(format!("expected `{HEADER}`")));
            }
            continue;
        }
        let (k, v) = line.split_once(' ').ok_or_else(|| corrupt(format!("bad header line `{line}`")))?;
        header.insert(k.to_string(), v.to_string());
        if k == "state_hash" {
            break;
        }
    }
    let get = |k: &str| header.get(k).cloned().ok_or_else(|| corrupt(format!("missing `{k}`")));
    let body = &text[offset..];
    if sha256_hex(body.as_bytes()) != get("state_hash")? {
        return Err(corrupt("state hash does not match contents".into()));
    }
    if get("config_hash")? != config_hash {
        return Err(corrupt("written by a different configuration".into()));
    }
    let num = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| corrupt(format!("bad `{k}`"))) };
    if num("master_seed")? != master_seed {
        return Err(corrupt("master seed differs".into()));
    }
    let generation = num("generation")? as usize;
    let n = num("population")? as usize;
    if n != cfg.population_size {
        return Err(corrupt("population size differs".into()));
    }

    let first_body_line = text[..offset].lines().count() + 1;
    let mut lines = body.lines().enumerate().map(|(i, l)| (i + first_body_line, l)).peekable();
    let bad = |ln: usize, what: &str| corrupt(format!("line {ln}: {what}"));
    let f64_at = |s: &str, ln: usize| s.parse::<f64>().map_err(|_| bad(ln, "bad number"));
    let trials_at = |fit: &str, el: &str, ln: usize| -> Result<Vec<TrialRecord>> {
        let f: Vec<f64> = fit.split(';').map(|s| f64_at(s, ln)).collect::<Result<_>>()?;
        let e: Vec<usize> = el
            .split(';')
            .map(|s| s.parse().map_err(|_| bad(ln, "bad step count")))
            .collect::<Result<_>>()?;
        if f.len() != e.len() || f.is_empty() {
            return Err(bad(ln, "trial columns disagree"));
        }
        Ok(f.into_iter()
            .zip(e)
            .map(|(fitness, elapsed_steps)| TrialRecord { fitness, elapsed_steps })
            .collect())
    };

    match lines.next() {
        Some((_, "[history]")) => {}
        _ => return Err(corrupt("missing [history]".into())),
    }
    let mut history = Vec::new();
    while let Some((ln, l)) = lines.next_if(|(_, l)| !l.starts_with('[')) {
        let c: Vec<&str> = l.split(',').collect();
        if c.len() != 6 {
            return Err(bad(ln, "history row needs 6 columns"));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad(ln, "bad integer"));
        history.push(GenerationRecord {
            generation: int(c[0])?,
            best_so_far_fitness: f64_at(c[1], ln)?,
            mean_fitness: f64_at(c[2], ln)?,
            best_elapsed_steps: f64_at(c[3], ln)?,
            best_generation: int(c[4])?,
            best_index: int(c[5])?,
        });
    }
    match lines.next() {
        Some((_, "[fitness]")) => {}
        _ => return Err(corrupt("missing [fitness]".into())),
    }
    let mut evaluations = Vec::new();
    while let Some((ln, l)) = lines.next_if(|(_, l)| !l.starts_with('[')) {
        let c: Vec<&str> = l.split(',').collect();
        if c.len() != 4 {
            return Err(bad(ln, "fitness row needs 4 columns"));
        }
        let e = Evaluation::from_trials(trials_at(c[2], c[3], ln)?);
        if e.fitness.to_bits() != f64_at(c[1], ln)?.to_bits() {
            return Err(bad(ln, "mean fitness disagrees with trials"));
        }
        evaluations.push(e);
    }
    let (ln, l) = lines.next().ok_or_else(|| corrupt("missing [best]".into()))?;
    let parts: Vec<&str> = l.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != "[best]" {
        return Err(bad(ln, "expected [best] <generation> <index>"));
    }
    let best_gen: usize = parts[1].parse().map_err(|_| bad(ln, "bad generation"))?;
    let best_idx: usize = parts[2].parse().map_err(|_| bad(ln, "bad index"))?;
    let (ln, l) = lines.next().ok_or_else(|| corrupt("truncated [best]".into()))?;
    let (f, e) = l.split_once(',').ok_or_else(|| bad(ln, "bad best trials"))?;
    let best_eval = Evaluation::from_trials(trials_at(f, e, ln)?);
    let best_genotype = parse_genotype_lines(&mut lines, path).map_err(|e| corrupt(e.to_string()))?;

    let mut population = Vec::with_capacity(n);
    for i in 0..n {
        match lines.next() {
            Some((_, l)) if l == format!("[genotype {i}]") => {}
            Some((ln, _)) => return Err(bad(ln, &format!("expected [genotype {i}]"))),
            None => return Err(corrupt("truncated population".into())),
        }
        population.push(parse_genotype_lines(&mut lines, path).map_err(|e| corrupt(e.to_string()))?);
    }
    if evaluations.len() != n || history.last().map(|r| r.generation) != Some(generation) {
        return Err(corrupt("tables disagree with header".into()));
    }
    cfg.validate()?;
    Ok(Evolution::restore(
        cfg,
        master_seed,
        env,
        generation,
        population,
        evaluations,
        history,
        BestSoFar {
            genotype: best_genotype,
            evaluation: best_eval,
            generation: best_gen,
            index: best_idx,
        },
    ))
}
