//! Plain-text maze layout format.
//!
//! ```text
//! tmaze-layout v1
//! kind triple-t
//! bounds <width> <height>
//! home <x> <y> <heading>
//! home_radius <r>
//! reward_radius <r>
//! lap_start <x0> <y0> <x1> <y1>
//! corridor <x0> <y0> <x1> <y1>
//! wall <x1> <y1> <x2> <y2> <texture-id>
//! door <id> <backtrack|return-enforcer> <x1> <y1> <x2> <y2> <tx0> <ty0> <tx1> <ty1> <texture-id>
//! reward <path> <x> <y>
//! junction <label> <x0> <y0> <x1> <y1>
//! segment <name> <prospective|retrospective> <class,class,...> <x0> <y0> <x1> <y1>
//! ```
//!
//! Blank lines and `#` comments are ignored. Records may appear in any order
//! after the header; doors keep their file order.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Rect, Segment, Vec2};
use crate::maze::layout::{
    Door, LayoutKind, MazeLayout, RewardSite, SegmentRegion, TJunction, Texture, Wall,
};
use crate::maze::Pose;

pub const LAYOUT_HEADER: &str = "tmaze-layout v1";

pub fn write_layout(layout: &MazeLayout) -> String {
    let mut s = String::new();
    let r = |r: &Rect| format!("{} {} {} {}", r.x0, r.y0, r.x1, r.y1);
    let g = |g: &Segment| format!("{} {} {} {}", g.a.x, g.a.y, g.b.x, g.b.y);
    writeln!(s, "{LAYOUT_HEADER}").unwrap();
    writeln!(s, "kind {}", layout.kind).unwrap();
    writeln!(s, "bounds {} {}", layout.width, layout.height).unwrap();
    writeln!(s, "home {} {} {}", layout.home.x, layout.home.y, layout.home.heading).unwrap();
    writeln!(s, "home_radius {}", layout.home_radius).unwrap();
    writeln!(s, "reward_radius {}", layout.reward_radius).unwrap();
    writeln!(s, "lap_start {}", r(&layout.lap_start)).unwrap();
    for c in &layout.corridors {
        writeln!(s, "corridor {}", r(c)).unwrap();
    }
    for w in &layout.walls {
        writeln!(s, "wall {} {}", g(&w.seg), w.texture.id()).unwrap();
    }
    for d in &layout.doors {
        writeln!(
            s,
            "door {} {} {} {} {}",
            d.id,
            d.kind,
            g(&d.seg),
            r(&d.trigger),
            d.texture.id()
        )
        .unwrap();
    }
    for rw in &layout.rewards {
        writeln!(s, "reward {} {} {}", rw.path, rw.pos.x, rw.pos.y).unwrap();
    }
    for t in &layout.t_junctions {
        writeln!(s, "junction {} {}", t.label, r(&t.rect)).unwrap();
    }
    for sg in &layout.segments {
        let classes: Vec<String> = sg.classes.iter().map(|c| c.to_string()).collect();
        writeln!(s, "segment {} {} {} {}", sg.name, sg.direction, classes.join(","), r(&sg.rect)).unwrap();
    }
    s
}

pub fn parse_layout(text: &str, path: &Path) -> Result<MazeLayout> {
    let err = |line: usize, msg: String| Error::parse(path, line, msg);
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()));
    let first = lines.by_ref().find(|(_, l)| !l.is_empty());
    match first {
        Some((_, l)) if l == LAYOUT_HEADER => {}
        Some((n, l)) => return Err(err(n, format!("expected header `{LAYOUT_HEADER}`, found `{l}`"))),
        None => return Err(err(1, "empty layout file".into())),
    }

    let mut kind = None;
    let mut bounds = None;
    let mut home = None;
    let mut home_radius = None;
    let mut reward_radius = None;
    let mut lap_start = None;
    let mut corridors = Vec::new();
    let mut walls = Vec::new();
    let mut doors: Vec<Door> = Vec::new();
    let mut rewards: Vec<RewardSite> = Vec::new();
    let mut t_junctions = Vec::new();
    let mut segments = Vec::new();

    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let nums = |from: usize, count: usize| -> Result<Vec<f64>> {
            if toks.len() != from + count {
                return Err(err(n, format!("`{}` expects {} fields, found {}", toks[0], from + count - 1, toks.len() - 1)));
            }
            toks[from..]
                .iter()
                .map(|t| t.parse::<f64>().map_err(|_| err(n, format!("bad number `{t}`"))))
                .collect()
        };
        let texture = |t: &str| -> Result<Texture> {
            t.parse::<u8>()
                .ok()
                .and_then(Texture::from_id)
                .ok_or_else(|| err(n, format!("bad texture id `{t}`")))
        };
        match toks[0] {
            "kind" => {
                let k = toks.get(1).ok_or_else(|| err(n, "missing kind".into()))?;
                kind = Some(k.parse::<LayoutKind>().map_err(|e| err(n, e))?);
            }
            "bounds" => {
                let v = nums(1, 2)?;
                bounds = Some((v[0], v[1]));
            }
            "home" => {
                let v = nums(1, 3)?;
                home = Some(Pose::new(v[0], v[1], v[2]));
            }
            "home_radius" => home_radius = Some(nums(1, 1)?[0]),
            "reward_radius" => reward_radius = Some(nums(1, 1)?[0]),
            "lap_start" => {
                let v = nums(1, 4)?;
                lap_start = Some(Rect::new(v[0], v[1], v[2], v[3]));
            }
            "corridor" => {
                let v = nums(1, 4)?;
                corridors.push(Rect::new(v[0], v[1], v[2], v[3]));
            }
            "wall" => {
                if toks.len() != 6 {
                    return Err(err(n, "`wall` expects 5 fields".into()));
                }
                let v = nums_slice(&toks[1..5]).map_err(|m| err(n, m))?;
                walls.push(Wall {
                    seg: Segment::new(v[0], v[1], v[2], v[3]),
                    texture: texture(toks[5])?,
                });
            }
            "door" => {
                if toks.len() != 12 {
                    return Err(err(n, "`door` expects 11 fields".into()));
                }
                let kind = toks[2].parse().map_err(|e| err(n, e))?;
                let v = nums_slice(&toks[3..11]).map_err(|m| err(n, m))?;
                if doors.iter().any(|d| d.id == toks[1]) {
                    return Err(err(n, format!("duplicate door id `{}`", toks[1])));
                }
                doors.push(Door {
                    id: toks[1].to_string(),
                    kind,
                    seg: Segment::new(v[0], v[1], v[2], v[3]),
                    trigger: Rect::new(v[4], v[5], v[6], v[7]),
                    texture: texture(toks[11])?,
                });
            }
            "reward" => {
                if toks.len() != 4 {
                    return Err(err(n, "`reward` expects 3 fields".into()));
                }
                let path: u8 = toks[1].parse().map_err(|_| err(n, format!("bad path id `{}`", toks[1])))?;
                if path == 0 || rewards.iter().any(|r| r.path == path) {
                    return Err(err(n, format!("invalid or duplicate path id {path}")));
                }
                let v = nums_slice(&toks[2..4]).map_err(|m| err(n, m))?;
                rewards.push(RewardSite {
                    path,
                    pos: Vec2::new(v[0], v[1]),
                });
            }
            "junction" => {
                if toks.len() != 6 {
                    return Err(err(n, "`junction` expects 5 fields".into()));
                }
                let v = nums_slice(&toks[2..6]).map_err(|m| err(n, m))?;
                t_junctions.push(TJunction {
                    label: toks[1].to_string(),
                    rect: Rect::new(v[0], v[1], v[2], v[3]),
                });
            }
            "segment" => {
                if toks.len() != 8 {
                    return Err(err(n, "`segment` expects 7 fields".into()));
                }
                let direction = toks[2].parse().map_err(|e| err(n, e))?;
                let classes = toks[3]
                    .split(',')
                    .map(|c| c.parse::<u8>().map_err(|_| err(n, format!("bad class `{c}`"))))
                    .collect::<Result<Vec<_>>>()?;
                let v = nums_slice(&toks[4..8]).map_err(|m| err(n, m))?;
                segments.push(SegmentRegion {
                    name: toks[1].to_string(),
                    direction,
                    classes,
                    rect: Rect::new(v[0], v[1], v[2], v[3]),
                });
            }
            other => return Err(err(n, format!("unknown record `{other}`"))),
        }
    }

    let missing = |what: &str| Error::parse(path, 0, format!("missing `{what}` record"));
    let (width, height) = bounds.ok_or_else(|| missing("bounds"))?;
    rewards.sort_by_key(|r| r.path);
    Ok(MazeLayout {
        kind: kind.unwrap_or(LayoutKind::Custom),
        width,
        height,
        corridors,
        walls,
        doors,
        home: home.ok_or_else(|| missing("home"))?,
        home_radius: home_radius.ok_or_else(|| missing("home_radius"))?,
        reward_radius: reward_radius.ok_or_else(|| missing("reward_radius"))?,
        rewards,
        t_junctions,
        segments,
        lap_start: lap_start.ok_or_else(|| missing("lap_start"))?,
    })
}

fn nums_slice(toks: &[&str]) -> std::result::Result<Vec<f64>, String> {
    toks.iter()
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad number `{t}`")))
        .collect()
}

pub fn load_layout(path: &Path) -> Result<MazeLayout> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingInput(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    parse_layout(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::canonical;

    #[test]
    fn canonical_round_trips() {
        for m in [canonical::triple_t(), canonical::double_t()] {
            let text = write_layout(&m);
            let back = parse_layout(&text, Path::new("mem")).unwrap();
            assert_eq!(back, m);
            assert_eq!(write_layout(&back), text);
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = format!("{LAYOUT_HEADER}\nbounds 1 1\nwall 0 0 1 x 0\n");
        match parse_layout(&text, Path::new("m.txt")) {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("bad number"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "tmaze-layout v2\n";
        assert!(matches!(parse_layout(text, Path::new("m")), Err(Error::Parse { line: 1, .. })));
        let text = format!("{LAYOUT_HEADER}\nbogus 1\n");
        assert!(matches!(parse_layout(&text, Path::new("m")), Err(Error::Parse { line: 2, .. })));
    }
}
