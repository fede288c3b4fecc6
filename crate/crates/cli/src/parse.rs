//! Argument value parsers.

use std::f64::consts::PI;

/// Parse a time such as `1.25`, `pi`, `pi/2`, `3pi/4`, `-pi/4` or `0.5*pi`.
pub fn parse_time(s: &str) -> Result<f64, String> {
    let text: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let value = match text.find("pi") {
        None => text.parse::<f64>().map_err(|_| format!("cannot parse time '{s}'"))?,
        Some(at) => {
            let head = text[..at].trim_end_matches('*');
            let tail = &text[at + 2..];
            let coeff = match head {
                "" | "+" => 1.0,
                "-" => -1.0,
                h => h.parse::<f64>().map_err(|_| format!("bad coefficient in '{s}'"))?,
            };
            let denom = match tail {
                "" => 1.0,
                t => t
                    .strip_prefix('/')
                    .and_then(|d| d.parse::<f64>().ok())
                    .filter(|d| *d != 0.0)
                    .ok_or_else(|| format!("bad denominator in '{s}'"))?,
            };
            coeff * PI / denom
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("time '{s}' is not finite"))
    }
}

/// Comma-separated floats.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<f64>().map_err(|_| format!("cannot parse '{x}' as a number"))
        })
        .collect()
}

/// Comma-separated connection-set elements, decimal or `0b`-prefixed binary.
pub fn parse_elements(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            let parsed = match x.strip_prefix("0b") {
                Some(bits) => usize::from_str_radix(bits, 2),
                None => x.parse::<usize>(),
            };
            parsed.map_err(|_| format!("cannot parse '{x}' as a connection-set element"))
        })
        .collect()
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("'{s}' is not a positive number")),
    }
}

/// `start, start + step, …` up to and including `stop` (with a little slack
/// so that `stop` itself survives rounding).
pub fn time_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0) {
        return Err(format!("step {step} must be positive"));
    }
    if stop < start {
        return Err(format!("grid end {stop} precedes start {start}"));
    }
    let count = ((stop - start) / step + 1e-9).floor();
    if count > 1e6 {
        return Err(format!("grid would have {count} points"));
    }
    Ok((0..=count as usize).map(|i| start + i as f64 * step).collect())
}
