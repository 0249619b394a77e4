//! Recording and time-series CSV ingestion/serialization.

use crate::error::{Error, Result};
use crate::fusion::{ImpactLocation, ImpactRecord, SensorMount, SensorRecord};
use crate::series::{ScalarSeries, Vec3Series};
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

const CHANNELS: [&str; 3] = ["gyro", "accel_lo", "accel_hi"];

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::io(path.display().to_string(), e)
}

/// Serialize an impact record to the documented CSV schema. The trigger time
/// and location ride along as leading `#`-comment metadata.
pub fn write_recording(record: &ImpactRecord, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let put = |out: &mut dyn Write, text: String| -> Result<()> {
        out.write_all(text.as_bytes()).map_err(|e| io_err(path, e))
    };
    put(&mut out, format!("# trigger_time = {}\n", record.trigger_time))?;
    put(&mut out, format!("# location = {}\n", record.location))?;
    put(&mut out, "sensor_id,channel,t,x,y,z\n".to_string())?;
    for sensor in &record.sensors {
        let streams: [(&str, Option<&Vec3Series>); 3] = [
            ("gyro", Some(&sensor.gyro)),
            ("accel_lo", sensor.accel_low.as_ref()),
            ("accel_hi", sensor.accel_high.as_ref()),
        ];
        for (channel, series) in streams {
            let Some(series) = series else { continue };
            for (k, v) in series.samples().iter().enumerate() {
                put(
                    &mut out,
                    format!(
                        "{},{},{},{},{},{}\n",
                        sensor.mount.sensor_id,
                        channel,
                        series.time_at(k),
                        v[0],
                        v[1],
                        v[2]
                    ),
                )?;
            }
        }
    }
    out.flush().map_err(|e| io_err(path, e))
}

struct RawStream {
    times: Vec<f64>,
    samples: Vec<[f64; 3]>,
}

fn finish_stream(raw: &RawStream, what: &str) -> Result<Vec3Series> {
    if raw.times.len() < 2 {
        return Err(Error::Schema(format!(
            "{what} needs at least 2 samples to establish a sample rate"
        )));
    }
    let t0 = raw.times[0];
    let dt = raw.times[1] - t0;
    if !(dt > 0.0) {
        return Err(Error::Schema(format!("{what} timestamps are not increasing")));
    }
    for (k, &t) in raw.times.iter().enumerate() {
        if k > 0 && t <= raw.times[k - 1] {
            return Err(Error::Schema(format!("{what} timestamps are not increasing")));
        }
        let expected = t0 + k as f64 * dt;
        if (t - expected).abs() > 1e-6 * dt {
            return Err(Error::Schema(format!(
                "{what} is not uniformly sampled (sample {k} at t = {t}, expected {expected})"
            )));
        }
    }
    Vec3Series::new(t0, dt, raw.samples.clone())
}

/// Parse a recording CSV against the declared sensor mounts.
pub fn read_recording(path: impl AsRef<Path>, mounts: &[SensorMount]) -> Result<ImpactRecord> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;

    let mut trigger_time = 0.0;
    let mut location = ImpactLocation::Unknown;
    for (idx, line) in text.lines().enumerate() {
        let Some(rest) = line.strip_prefix('#') else { break };
        let Some((key, value)) = rest.split_once('=') else { continue };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "trigger_time" => {
                trigger_time = value.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("invalid trigger_time '{value}'"),
                })?;
            }
            "location" => {
                location = value.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("unknown impact location '{value}'"),
                })?;
            }
            _ => {}
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    {
        let headers = reader.headers().map_err(|e| Error::Schema(e.to_string()))?;
        let expected = ["sensor_id", "channel", "t", "x", "y", "z"];
        if headers.iter().ne(expected) {
            return Err(Error::Schema(format!(
                "header must be 'sensor_id,channel,t,x,y,z', got '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
    }

    let mut order: Vec<String> = Vec::new();
    let mut streams: HashMap<(String, usize), RawStream> = HashMap::new();
    for row in reader.records() {
        let record = row.map_err(|e| {
            Error::Parse {
                line: e.position().map(|p| p.line() as usize).unwrap_or(0),
                message: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 6 {
            return Err(Error::Parse {
                line,
                message: format!("expected 6 fields, got {}", record.len()),
            });
        }
        let sensor_id = record[0].to_string();
        let channel = CHANNELS
            .iter()
            .position(|&c| c == &record[1])
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("unknown channel '{}'", &record[1]),
            })?;
        let mut nums = [0.0; 4];
        for (slot, field) in nums.iter_mut().zip(record.iter().skip(2)) {
            *slot = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("non-numeric value '{field}'"),
            })?;
        }
        if !order.contains(&sensor_id) {
            order.push(sensor_id.clone());
        }
        let stream = streams
            .entry((sensor_id, channel))
            .or_insert_with(|| RawStream { times: Vec::new(), samples: Vec::new() });
        stream.times.push(nums[0]);
        stream.samples.push([nums[1], nums[2], nums[3]]);
    }
    if order.is_empty() {
        return Err(Error::Schema("recording contains no samples".into()));
    }

    let mut sensors = Vec::with_capacity(order.len());
    for sensor_id in order {
        let mount = mounts
            .iter()
            .find(|m| m.sensor_id == sensor_id)
            .cloned()
            .ok_or_else(|| {
                Error::Schema(format!("no mount declared for sensor '{sensor_id}'"))
            })?;
        let gyro = streams
            .get(&(sensor_id.clone(), 0))
            .ok_or_else(|| Error::Schema(format!("sensor '{sensor_id}' has no gyro channel")))
            .and_then(|raw| finish_stream(raw, &format!("gyro stream of '{sensor_id}'")))?;
        let accel_low = streams
            .get(&(sensor_id.clone(), 1))
            .map(|raw| finish_stream(raw, &format!("accel_lo stream of '{sensor_id}'")))
            .transpose()?;
        let accel_high = streams
            .get(&(sensor_id.clone(), 2))
            .map(|raw| finish_stream(raw, &format!("accel_hi stream of '{sensor_id}'")))
            .transpose()?;
        sensors.push(SensorRecord { mount, gyro, accel_low, accel_high });
    }

    let record = ImpactRecord { sensors, trigger_time, location };
    record.validate()?;
    Ok(record)
}

/// Write a `t,x,y,z` time-series CSV.
pub fn write_vec3_csv(series: &Vec3Series, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "t,x,y,z").map_err(|e| io_err(path, e))?;
    for (k, v) in series.samples().iter().enumerate() {
        writeln!(out, "{},{},{},{}", series.time_at(k), v[0], v[1], v[2])
            .map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))
}

fn read_columns(path: &Path, want: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(std::io::BufReader::new(file));
    let mut times = Vec::new();
    let mut values = Vec::new();
    for row in reader.records() {
        let record = row.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != want + 1 {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, got {}", want + 1, record.len()),
            });
        }
        let parse = |field: &str| -> Result<f64> {
            field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("non-numeric value '{field}'"),
            })
        };
        times.push(parse(&record[0])?);
        values.push(record.iter().skip(1).map(parse).collect::<Result<Vec<f64>>>()?);
    }
    Ok((times, values))
}

/// Parse a `t,x,y,z` time-series CSV.
pub fn read_vec3_csv(path: impl AsRef<Path>) -> Result<Vec3Series> {
    let path = path.as_ref();
    let (times, values) = read_columns(path, 3)?;
    let raw = RawStream {
        times,
        samples: values.iter().map(|v| [v[0], v[1], v[2]]).collect(),
    };
    finish_stream(&raw, &path.display().to_string())
}

/// Parse a scalar stream: either `t,value`, or `t,x,y,z` reduced to its
/// resultant magnitude.
pub fn read_scalar_csv(path: impl AsRef<Path>) -> Result<ScalarSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(std::io::BufReader::new(file));
    let width = reader
        .headers()
        .map_err(|e| Error::Schema(e.to_string()))?
        .len();
    drop(reader);
    match width {
        2 => {
            let (times, values) = read_columns(path, 1)?;
            let raw = RawStream {
                times,
                samples: values.iter().map(|v| [v[0], 0.0, 0.0]).collect(),
            };
            let series = finish_stream(&raw, &path.display().to_string())?;
            Ok(series.component(0))
        }
        4 => read_vec3_csv(path)?.resultant(),
        other => Err(Error::Schema(format!(
            "expected a 't,value' or 't,x,y,z' stream, got {other} columns"
        ))),
    }
}
