//! Text formats.
//!
//! Trace file:
//!
//! ```text
//! # K=8 mode=p2 size=unit
//! 1,1,4
//! 1,1,8
//! ```
//!
//! One `arrival,size,need` record per line in job-id order. The writer and
//! reader round-trip exactly.
//!
//! Schedule file: one line per slot, `slot: id,id,...`, with an optional
//! ` | id,...` suffix for the free bank.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{JobId, NeedMode, SizeMode, Slot, SlotDecision, Trace};

pub fn write_trace(trace: &Trace) -> String {
    let mut out = format!(
        "# K={} mode={} size={}\n",
        trace.k(),
        trace.need_mode().tag(),
        trace.size_mode().tag()
    );
    for j in trace.jobs() {
        let _ = writeln!(out, "{},{},{}", j.arrival, j.size, j.need);
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: &str) -> Result<(u32, NeedMode, SizeMode)> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| parse_err(1, "missing `# K=.. mode=.. size=..` header"))?;
    let (mut k, mut mode, mut size) = (None, None, None);
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("malformed header field `{field}`")))?;
        match key {
            "K" => {
                k = Some(
                    value
                        .parse::<u32>()
                        .map_err(|_| parse_err(1, format!("bad K `{value}`")))?,
                )
            }
            "mode" => {
                mode = Some(match value {
                    "p2" => NeedMode::PowerOfTwo,
                    "gen" => NeedMode::General,
                    _ => return Err(parse_err(1, format!("unknown mode `{value}`"))),
                })
            }
            "size" => {
                size = Some(match value {
                    "unit" => SizeMode::Unit,
                    "weighted" => SizeMode::Weighted,
                    _ => return Err(parse_err(1, format!("unknown size mode `{value}`"))),
                })
            }
            _ => return Err(parse_err(1, format!("unknown header key `{key}`"))),
        }
    }
    match (k, mode, size) {
        (Some(k), Some(m), Some(s)) => Ok((k, m, s)),
        _ => Err(parse_err(1, "header needs K, mode and size")),
    }
}

pub fn read_trace(text: &str) -> Result<Trace> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty trace file"))?;
    let (k, mode, size) = parse_header(header)?;
    let mut trace = Trace::empty(k, mode, size);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(lineno, "expected `arrival,size,need`"));
        }
        let mut nums = [0u32; 3];
        for (n, f) in nums.iter_mut().zip(&fields) {
            *n = f
                .trim()
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad number `{f}`")))?;
        }
        trace.push(nums[0], nums[1], nums[2]);
    }
    Ok(trace)
}

pub fn load_trace(path: &Path) -> Result<Trace> {
    read_trace(&std::fs::read_to_string(path)?)
}

pub fn save_trace(path: &Path, trace: &Trace) -> Result<()> {
    std::fs::write(path, write_trace(trace))?;
    Ok(())
}

fn join_ids(ids: &[JobId]) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Entry `i` of `schedule` is written as slot `i + 1`.
pub fn write_schedule(schedule: &[SlotDecision]) -> String {
    let mut out = String::new();
    for (i, d) in schedule.iter().enumerate() {
        let _ = write!(out, "{}: {}", i + 1, join_ids(&d.reserved));
        if !d.free.is_empty() {
            let _ = write!(out, " | {}", join_ids(&d.free));
        }
        out.push('\n');
    }
    out
}

fn parse_ids(s: &str, line: usize) -> Result<Vec<JobId>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map(JobId)
                .map_err(|_| parse_err(line, format!("bad job id `{t}`")))
        })
        .collect()
}

/// Slots missing from the file are idle; slot numbers must increase.
pub fn read_schedule(text: &str) -> Result<Vec<SlotDecision>> {
    let mut out: Vec<SlotDecision> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (slot, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(lineno, "expected `slot: ids`"))?;
        let slot: Slot = slot
            .trim()
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad slot `{slot}`")))?;
        if slot == 0 || (slot as usize) <= out.len() {
            return Err(parse_err(lineno, format!("slot {slot} out of order")));
        }
        out.resize(slot as usize - 1, SlotDecision::default());
        let (reserved, free) = match rest.split_once('|') {
            Some((r, f)) => (parse_ids(r, lineno)?, parse_ids(f, lineno)?),
            None => (parse_ids(rest, lineno)?, Vec::new()),
        };
        out.push(SlotDecision::split(reserved, free));
    }
    Ok(out)
}
