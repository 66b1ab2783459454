//! CSV and key=value file formats.
//!
//! * counts: header `t,count`, one row per interval right endpoint; `t_0 = 0`
//!   is implicit. A first row with a blank count declares a non-zero
//!   origin, and all times are then shifted so the origin becomes zero.
//! * events: header `tau`, one event time per row.
//! * chain: header `iter,nu,eta[,alpha],beta,loglik,accepted`; row 0 is the
//!   starting point, `accepted` is 0/1.
//! * summary: flat `key=value` lines.
//!
//! Floats are written with 17 significant digits so they read back exactly.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{CountData, EventHistory, HawkesParams, KernelFamily};
use crate::pmmh::{ChainOutput, ChainRecord, ChainState, ParamSummary, Summary};

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(file))
}

fn malformed(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::MalformedRow {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => malformed(path, line, format!("{other:?}")),
    }
}

fn check_header(path: &Path, reader: &mut csv::Reader<File>, expected: &[&str]) -> Result<csv::StringRecord> {
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let ok = header.len() == expected.len() && header.iter().zip(expected).all(|(a, b)| a == *b);
    if !ok {
        return Err(malformed(
            path,
            1,
            format!("expected header `{}`, found `{}`", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(header)
}

fn parse_f64(path: &Path, line: usize, field: Option<&str>, name: &str) -> Result<f64> {
    let s = field.filter(|s| !s.is_empty()).ok_or_else(|| malformed(path, line, format!("missing `{name}`")))?;
    s.parse::<f64>()
        .map_err(|_| malformed(path, line, format!("`{name}` is not a number: `{s}`")))
}

/// Reads interval counts.
pub fn load_counts(path: impl AsRef<Path>) -> Result<CountData> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    check_header(path, &mut reader, &["t", "count"])?;

    let mut origin = 0.0;
    let mut times = vec![0.0];
    let mut counts = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(row + 2, |p| p.line() as usize);
        if rec.len() > 2 {
            return Err(malformed(path, line, format!("expected 2 fields, found {}", rec.len())));
        }
        let t = parse_f64(path, line, rec.get(0), "t")?;
        if !t.is_finite() {
            return Err(malformed(path, line, format!("time `{t}` is not finite")));
        }
        let count_field = rec.get(1).unwrap_or("");
        if count_field.is_empty() {
            if row == 0 {
                origin = t;
                continue;
            }
            return Err(malformed(path, line, "missing `count`"));
        }
        let count: i64 = count_field
            .parse()
            .map_err(|_| malformed(path, line, format!("`count` is not an integer: `{count_field}`")))?;
        if count < 0 {
            return Err(Error::NegativeCount {
                path: path.to_path_buf(),
                line,
                count,
            });
        }
        let shifted = t - origin;
        if !(shifted > *times.last().unwrap()) {
            return Err(Error::NonIncreasingTimes {
                path: path.to_path_buf(),
                line,
                time: t,
            });
        }
        times.push(shifted);
        counts.push(count as u64);
    }
    if counts.is_empty() {
        return Err(Error::data(format!("{}: no count rows", path.display())));
    }
    CountData::new(times, counts)
}

pub fn write_counts<W: Write + ?Sized>(data: &CountData, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "t,count")?;
    for (_, t, n) in data.intervals() {
        writeln!(w, "{},{n}", fmt_f64(t))?;
    }
    w.flush()
}

pub fn save_counts(data: &CountData, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_counts(data, &mut create(path)?).map_err(|e| Error::io(path, e))
}

/// Reads event times (strictly increasing, positive).
pub fn load_events(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    check_header(path, &mut reader, &["tau"])?;
    let mut times: Vec<f64> = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(row + 2, |p| p.line() as usize);
        let t = parse_f64(path, line, rec.get(0), "tau")?;
        let prev = times.last().copied().unwrap_or(0.0);
        if !(t > prev) || !t.is_finite() {
            return Err(Error::NonIncreasingTimes {
                path: path.to_path_buf(),
                line,
                time: t,
            });
        }
        times.push(t);
    }
    Ok(times)
}

pub fn write_events<W: Write + ?Sized>(history: &EventHistory, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "tau")?;
    for &t in history.times() {
        writeln!(w, "{}", fmt_f64(t))?;
    }
    w.flush()
}

pub fn save_events(history: &EventHistory, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_events(history, &mut create(path)?).map_err(|e| Error::io(path, e))
}

fn chain_header(family: KernelFamily) -> Vec<&'static str> {
    let mut h = vec!["iter"];
    h.extend_from_slice(family.param_names());
    h.extend_from_slice(&["loglik", "accepted"]);
    h
}

pub fn save_chain(output: &ChainOutput, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let res = (|| -> std::io::Result<()> {
        writeln!(w, "{}", chain_header(output.family).join(","))?;
        let init = &output.initial;
        let row = |w: &mut BufWriter<File>, iter: usize, params: &HawkesParams, loglik: f64, accepted: bool| {
            write!(w, "{iter}")?;
            for v in params.values() {
                write!(w, ",{}", fmt_f64(v))?;
            }
            writeln!(w, ",{},{}", fmt_f64(loglik), u8::from(accepted))
        };
        row(&mut w, 0, &init.theta.to_params(), init.cached_loglik, true)?;
        for r in &output.records {
            row(&mut w, r.iteration, &r.params, r.loglik, r.accepted)?;
        }
        w.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}

/// Reads a chain written by [`save_chain`]. The kernel family must be
/// supplied because gamma and Weibull chains share a column layout.
pub fn load_chain(path: impl AsRef<Path>, family: KernelFamily) -> Result<ChainOutput> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let header = chain_header(family);
    check_header(path, &mut reader, &header)?;
    let np = family.n_params();
    let mut initial = None;
    let mut records = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(row + 2, |p| p.line() as usize);
        if rec.len() != header.len() {
            return Err(malformed(path, line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let iteration: usize = rec[0]
            .parse()
            .map_err(|_| malformed(path, line, format!("bad iteration `{}`", &rec[0])))?;
        let values = (0..np)
            .map(|i| parse_f64(path, line, rec.get(i + 1), header[i + 1]))
            .collect::<Result<Vec<_>>>()?;
        let params = HawkesParams::from_values(family, &values).map_err(|e| malformed(path, line, e.to_string()))?;
        let loglik = parse_f64(path, line, rec.get(np + 1), "loglik")?;
        let accepted = match &rec[np + 2] {
            "0" => false,
            "1" => true,
            other => return Err(malformed(path, line, format!("accepted must be 0 or 1, got `{other}`"))),
        };
        let theta = params.to_transformed();
        if iteration == 0 && initial.is_none() && records.is_empty() {
            initial = Some(ChainState {
                theta,
                cached_loglik: loglik,
            });
            continue;
        }
        records.push(ChainRecord {
            iteration,
            theta,
            params,
            loglik,
            accepted,
            log_ratio: None,
        });
    }
    let initial = match (initial, records.first()) {
        (Some(s), _) => s,
        (None, Some(r)) => ChainState {
            theta: r.theta.clone(),
            cached_loglik: r.loglik,
        },
        (None, None) => return Err(Error::data(format!("{}: chain has no rows", path.display()))),
    };
    Ok(ChainOutput {
        family,
        initial,
        records,
    })
}

pub fn format_summary(summary: &Summary) -> String {
    let mut s = String::new();
    s.push_str(&format!("kernel={}\n", summary.family));
    s.push_str(&format!("n_draws={}\n", summary.n_draws));
    s.push_str(&format!("burn_in={}\n", summary.burn_in));
    s.push_str(&format!("acceptance_rate={}\n", fmt_f64(summary.acceptance_rate)));
    for p in &summary.params {
        s.push_str(&format!("{}.est={}\n", p.name, fmt_f64(p.estimate)));
        s.push_str(&format!("{}.lower={}\n", p.name, fmt_f64(p.lower)));
        s.push_str(&format!("{}.upper={}\n", p.name, fmt_f64(p.upper)));
        s.push_str(&format!("{}.se={}\n", p.name, fmt_f64(p.se)));
    }
    s
}

pub fn save_summary(summary: &Summary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_summary(summary)).map_err(|e| Error::io(path, e))
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| malformed(path, i + 1, format!("expected key=value, found `{line}`")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn load_summary(path: impl AsRef<Path>) -> Result<Summary> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let map = parse_key_values(&text, path)?;
    let get = |k: &str| -> Result<&String> {
        map.get(k)
            .ok_or_else(|| Error::data(format!("{}: summary is missing `{k}`", path.display())))
    };
    let num = |k: &str| -> Result<f64> {
        get(k)?
            .parse::<f64>()
            .map_err(|_| Error::data(format!("{}: `{k}` is not a number", path.display())))
    };
    let int = |k: &str| -> Result<usize> {
        get(k)?
            .parse::<usize>()
            .map_err(|_| Error::data(format!("{}: `{k}` is not an integer", path.display())))
    };
    let family: KernelFamily = get("kernel")?.parse()?;
    let params = family
        .param_names()
        .iter()
        .map(|&name| {
            Ok(ParamSummary {
                name: name.to_string(),
                estimate: num(&format!("{name}.est"))?,
                lower: num(&format!("{name}.lower"))?,
                upper: num(&format!("{name}.upper"))?,
                se: num(&format!("{name}.se"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Summary {
        family,
        params,
        acceptance_rate: num("acceptance_rate")?,
        n_draws: int("n_draws")?,
        burn_in: int("burn_in")?,
    })
}
