//! Config-file merging and numeric grid parsing.

use std::ffi::OsString;
use std::path::Path;

/// Parses a flat `key = value` file. Blank lines and lines starting with `#`
/// are ignored; keys may be written with or without leading dashes.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let key = key.trim().trim_start_matches('-').replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

const SUBCOMMANDS: [&str; 6] = ["train", "predict", "evaluate", "cv", "noise-sweep", "theory-check"];

fn flag_name(arg: &str) -> Option<&str> {
    let body = arg.strip_prefix("--")?;
    Some(body.split_once('=').map_or(body, |(k, _)| k))
}

/// Removes `--config PATH` from `args` and splices the file's entries in
/// right after the subcommand. Keys already given on the command line are
/// skipped, so flags win over the file. `true` turns a switch on, `false`
/// leaves it off.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            let path = it.next().ok_or("--config needs a path")?;
            config = Some(path);
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(p.into());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| format!("cannot read config {}: {e}", Path::new(&path).display()))?;
    let entries = parse_config(&text)?;

    let given: Vec<String> = rest
        .iter()
        .filter_map(|a| a.to_str().and_then(flag_name).map(str::to_string))
        .collect();
    let pos = rest
        .iter()
        .position(|a| a.to_str().is_some_and(|s| SUBCOMMANDS.contains(&s)))
        .map_or(rest.len(), |p| p + 1);
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if given.contains(&key) {
            continue;
        }
        match value.as_str() {
            "true" => extra.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                extra.push(format!("--{key}").into());
                extra.push(value.into());
            }
        }
    }
    rest.splice(pos..pos, extra);
    Ok(rest)
}

fn round_grid(v: f64) -> f64 {
    (v * 1e10).round() / 1e10
}

/// `a:b:step` is the half-open range `[a, b)`; anything else is a comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| -> Result<f64, String> {
        let v: f64 = t.trim().parse().map_err(|_| format!("bad number {t:?} in grid {spec:?}"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite value in grid {spec:?}"))
        }
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step <= 0.0 || b <= a {
                return Err(format!("range {spec:?} needs start < stop and step > 0"));
            }
            let n = ((b - a) / step - 1e-9).ceil() as usize;
            (0..n).map(|i| round_grid(a + i as f64 * step)).collect()
        }
        [_] => spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("grid {spec:?} is neither a:b:step nor a comma list")),
    };
    if values.is_empty() {
        return Err(format!("grid {spec:?} is empty"));
    }
    Ok(values)
}
