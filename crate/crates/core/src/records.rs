//! CSV output of step records.
//!
//! Floats are written in shortest round-trip decimal, booleans as `0`/`1`,
//! and the branch as its tag or `none`. None of the fields can contain a
//! comma, so no quoting is needed.

use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};
use crate::harness::StepRecord;
use crate::scheduler::Branch;

pub const CSV_HEADER: &str =
    "t,d1,d2,gain1,gain2,near_user,rho1,rho2,r_near,r_far,psc,switched,outage,branch";

const N_FIELDS: usize = 14;

fn format_record(r: &StepRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.t,
        r.d1,
        r.d2,
        r.gain1,
        r.gain2,
        r.near_user,
        r.rho1,
        r.rho2,
        r.r_near,
        r.r_far,
        r.psc,
        u8::from(r.switched),
        u8::from(r.outage),
        r.branch.map_or("none", |b| b.tag()),
    )
}

/// Writes the header and one row per record; returns the bytes written.
pub fn write_records<W: Write>(records: &[StepRecord], out: &mut W, sink: &str) -> Result<usize> {
    let io_err = |source| Error::Io {
        sink: sink.to_string(),
        source,
    };
    let mut written = 0;
    let mut put = |line: &str| -> io::Result<()> {
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
        written += line.len() + 1;
        Ok(())
    };
    put(CSV_HEADER).map_err(io_err)?;
    for r in records {
        put(&format_record(r)).map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(written)
}

/// Reads a file produced by [`write_records`].
pub fn read_records<R: BufRead>(input: R, source: &str) -> Result<Vec<StepRecord>> {
    let mut lines = input.lines().enumerate();
    let io_err = |e| Error::Io {
        sink: source.to_string(),
        source: e,
    };
    let header = match lines.next() {
        Some((_, line)) => line.map_err(io_err)?,
        None => String::new(),
    };
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: "missing or unexpected CSV header".into(),
        });
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(io_err)?;
        let line_no = idx + 1;
        let bad = |what: &str| Error::Parse {
            line: line_no,
            message: format!("bad {what}"),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != N_FIELDS {
            return Err(bad("field count"));
        }
        let float = |i: usize, name: &str| f[i].parse::<f64>().map_err(|_| bad(name));
        let flag = |i: usize, name: &str| match f[i] {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(bad(name)),
        };
        records.push(StepRecord {
            t: f[0].parse().map_err(|_| bad("t"))?,
            d1: float(1, "d1")?,
            d2: float(2, "d2")?,
            gain1: float(3, "gain1")?,
            gain2: float(4, "gain2")?,
            near_user: f[5].parse().map_err(|_| bad("near_user"))?,
            rho1: float(6, "rho1")?,
            rho2: float(7, "rho2")?,
            r_near: float(8, "r_near")?,
            r_far: float(9, "r_far")?,
            psc: float(10, "psc")?,
            switched: flag(11, "switched")?,
            outage: flag(12, "outage")?,
            branch: match f[13] {
                "none" => None,
                tag => Some(Branch::from_tag(tag).ok_or_else(|| bad("branch"))?),
            },
        });
    }
    Ok(records)
}
