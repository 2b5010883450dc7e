//! Trajectory CSV files.
//!
//! Header `step,x,y,heading,fx,fy,torque,excited,refractory,dist`, then one
//! row per record. Floats use the shortest decimal form that parses back to
//! the same value, so a written file reads back bit-exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::engine::TrajectoryRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "step,x,y,heading,fx,fy,torque,excited,refractory,dist";

pub fn write_csv<W: Write>(records: &[TrajectoryRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.step, r.x, r.y, r.heading, r.fx, r.fy, r.torque, r.excited, r.refractory, r.dist
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trajectory_csv(records: &[TrajectoryRecord], path: &Path) -> Result<()> {
    write_csv(records, BufWriter::new(File::create(path)?))
}

pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<TrajectoryRecord>> {
    let mut lines = input.lines();
    match lines.next().transpose()? {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        other => {
            return Err(Error::Csv {
                line: 1,
                message: format!("expected header, found {other:?}"),
            })
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Error::Csv {
                line: lineno,
                message: format!("expected 10 fields, found {}", fields.len()),
            });
        }
        let bad = |what: &str| Error::Csv {
            line: lineno,
            message: format!("cannot parse {what}"),
        };
        let f = |k: usize| fields[k].parse::<f64>().map_err(|_| bad(fields[k]));
        let u = |k: usize| fields[k].parse::<usize>().map_err(|_| bad(fields[k]));
        records.push(TrajectoryRecord {
            step: fields[0].parse().map_err(|_| bad(fields[0]))?,
            x: f(1)?,
            y: f(2)?,
            heading: f(3)?,
            fx: f(4)?,
            fy: f(5)?,
            torque: f(6)?,
            excited: u(7)?,
            refractory: u(8)?,
            dist: f(9)?,
        });
    }
    Ok(records)
}

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TrajectoryRecord>> {
    read_csv(BufReader::new(File::open(path)?))
}
