//! Line-oriented experiment configuration: `[section]` headers and
//! `key = value` pairs, with `#` comments. The reader tracks which keys each
//! experiment kind consumed and rejects leftovers, so typos fail loudly
//! instead of silently falling back to defaults.

use std::cell::Cell;

use crate::distributions::RadiusDistribution;
use crate::error::{CovlabError, Result};

#[derive(Debug)]
struct RawEntry {
    section: String,
    key: String,
    value: String,
    line: usize,
    consumed: Cell<bool>,
}

/// Parsed config text, before any interpretation.
#[derive(Debug)]
pub struct RawConfig {
    entries: Vec<RawEntry>,
}

fn config_err(line: usize, message: impl Into<String>) -> CovlabError {
    CovlabError::Config { line, message: message.into() }
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut section = String::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| config_err(line_no, format!("unterminated section header `{line}`")))?
                    .trim();
                if name.is_empty() {
                    return Err(config_err(line_no, "empty section name"));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(line_no, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(config_err(line_no, "empty key"));
            }
            if section.is_empty() {
                return Err(config_err(line_no, format!("key `{key}` appears before any [section] header")));
            }
            entries.push(RawEntry {
                section: section.clone(),
                key: key.to_string(),
                value: value.trim().to_string(),
                line: line_no,
                consumed: Cell::new(false),
            });
        }
        Ok(RawConfig { entries })
    }

    /// Take the single value for `section.key`, if present. Duplicate keys
    /// are an error for single-valued fields.
    pub fn take(&self, section: &str, key: &str) -> Result<Option<String>> {
        let matches: Vec<&RawEntry> = self
            .entries
            .iter()
            .filter(|e| e.section == section && e.key == key)
            .collect();
        if matches.len() > 1 {
            return Err(config_err(
                matches[1].line,
                format!("duplicate key `{key}` in [{section}] (first at line {})", matches[0].line),
            ));
        }
        Ok(matches.first().map(|e| {
            e.consumed.set(true);
            e.value.clone()
        }))
    }

    /// Take every value for a repeatable key, in file order.
    pub fn take_all(&self, section: &str, key: &str) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.section == section && e.key == key)
            .map(|e| {
                e.consumed.set(true);
                e.value.clone()
            })
            .collect()
    }

    /// Take a required single value.
    pub fn require(&self, section: &str, key: &str) -> Result<String> {
        self.take(section, key)?.ok_or_else(|| {
            config_err(0, format!("missing required key `{key}` in [{section}]"))
        })
    }

    /// Error if any key was never consumed — it is either unknown or belongs
    /// to a different experiment kind.
    pub fn finish(&self) -> Result<()> {
        if let Some(stray) = self.entries.iter().find(|e| !e.consumed.get()) {
            return Err(config_err(
                stray.line,
                format!("unknown key `{}` in [{}] for this experiment kind", stray.key, stray.section),
            ));
        }
        Ok(())
    }
}

pub fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| config_err(0, format!("key `{key}`: expected a number, got `{value}`")))
}

pub fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value
        .parse::<u64>()
        .map_err(|_| config_err(0, format!("key `{key}`: expected a nonnegative integer, got `{value}`")))
}

pub fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| config_err(0, format!("key `{key}`: expected a nonnegative integer, got `{value}`")))
}

/// Split `a,b,(c,d),e` on top-level commas, respecting parentheses.
pub fn split_top_level(value: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in value.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(current.trim().to_string());
                current = String::new();
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        parts.push(current.trim().to_string());
    }
    parts
}

/// Parse `name(arg, arg, ...)` into the name and raw argument list.
fn parse_call(value: &str) -> Result<(String, Vec<String>)> {
    let open = value
        .find('(')
        .ok_or_else(|| config_err(0, format!("expected `name(args)`, got `{value}`")))?;
    let name = value[..open].trim().to_string();
    let rest = value[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| config_err(0, format!("unbalanced parentheses in `{value}`")))?;
    Ok((name, split_top_level(rest)))
}

fn expect_args(name: &str, args: &[String], n: usize) -> Result<()> {
    if args.len() != n {
        return Err(config_err(
            0,
            format!("`{name}` takes {n} argument(s), got {}", args.len()),
        ));
    }
    Ok(())
}

/// Parse a radius-law literal:
/// `degenerate(v)`, `bounded-uniform(lo,hi)`, `pareto-tail(c)`,
/// `heavy(alpha)`, `discrete-table((k,mass),...)`, `discrete-pareto(c)`.
pub fn parse_distribution(value: &str) -> Result<RadiusDistribution> {
    let (name, args) = parse_call(value)?;
    match name.as_str() {
        "degenerate" => {
            expect_args(&name, &args, 1)?;
            RadiusDistribution::degenerate(parse_f64("rho", &args[0])?)
        }
        "bounded-uniform" => {
            expect_args(&name, &args, 2)?;
            RadiusDistribution::bounded_uniform(parse_f64("rho", &args[0])?, parse_f64("rho", &args[1])?)
        }
        "pareto-tail" => {
            expect_args(&name, &args, 1)?;
            RadiusDistribution::pareto_tail(parse_f64("rho", &args[0])?)
        }
        "heavy" => {
            expect_args(&name, &args, 1)?;
            RadiusDistribution::heavy(parse_f64("rho", &args[0])?)
        }
        "discrete-pareto" => {
            expect_args(&name, &args, 1)?;
            RadiusDistribution::discrete_pareto(parse_f64("rho", &args[0])?)
        }
        "discrete-table" => {
            let mut entries = Vec::new();
            for arg in &args {
                let (k, m) = parse_pair("rho", arg)?;
                if k.fract() != 0.0 || k < 0.0 {
                    return Err(config_err(0, format!("discrete-table key must be a nonnegative integer, got {k}")));
                }
                entries.push((k as u64, m));
            }
            RadiusDistribution::discrete_table(entries)
        }
        other => Err(config_err(0, format!("unknown radius law `{other}`"))),
    }
}

/// Parse `(a, b)` into a pair of numbers.
pub fn parse_pair(key: &str, value: &str) -> Result<(f64, f64)> {
    let inner = value
        .trim()
        .strip_prefix('(')
        .and_then(|v| v.strip_suffix(')'))
        .ok_or_else(|| config_err(0, format!("key `{key}`: expected `(a, b)`, got `{value}`")))?;
    let parts = split_top_level(inner);
    if parts.len() != 2 {
        return Err(config_err(0, format!("key `{key}`: expected two numbers in `{value}`")));
    }
    Ok((parse_f64(key, &parts[0])?, parse_f64(key, &parts[1])?))
}

/// Parse a comma-separated list of numbers.
pub fn parse_number_list(key: &str, value: &str) -> Result<Vec<f64>> {
    split_top_level(value).iter().map(|v| parse_f64(key, v)).collect()
}

/// Parse `(a,b),(c,d),...` into pairs.
pub fn parse_pair_list(key: &str, value: &str) -> Result<Vec<(f64, f64)>> {
    split_top_level(value).iter().map(|v| parse_pair(key, v)).collect()
}
