use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::simulator::z_score;

/// One joined grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub ebn0_db: f64,
    pub bep: f64,
    pub ber: f64,
    pub bits: u64,
    pub errors: u64,
    pub z: f64,
    pub flagged: bool,
}

fn columns<R: BufRead>(input: R, required: &[&str]) -> Result<Vec<Vec<String>>> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV input".into()))??;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let index: Vec<usize> = required
        .iter()
        .map(|r| {
            names.iter().position(|n| n == r).ok_or_else(|| Error::Parse(format!("CSV lacks column '{r}'")))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let row = index
            .iter()
            .map(|&i| fields.get(i).map(|s| s.trim().to_string()).ok_or_else(|| Error::Parse(format!("short row '{line}'"))))
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("CSV has no data rows".into()));
    }
    Ok(rows)
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))
}

/// `(ebn0_db, bep)` pairs from a BEP curve CSV.
pub fn read_bep_csv<R: BufRead>(input: R) -> Result<Vec<(f64, f64)>> {
    columns(input, &["ebn0_db", "bep"])?.iter().map(|r| Ok((num(&r[0])?, num(&r[1])?))).collect()
}

/// `(ebn0_db, bits, errors)` triples from a simulation CSV.
pub fn read_sim_csv<R: BufRead>(input: R) -> Result<Vec<(f64, u64, u64)>> {
    columns(input, &["ebn0_db", "bits", "errors"])?
        .iter()
        .map(|r| Ok((num(&r[0])?, num(&r[1])?, num(&r[2])?)))
        .collect()
}

/// Pairs points with identical grids and flags `|z| > threshold`.
pub fn compare(bep: &[(f64, f64)], sim: &[(f64, u64, u64)], threshold: f64) -> Result<Vec<CompareRow>> {
    if bep.len() != sim.len() {
        return Err(Error::Grid(format!("{} analytic points vs {} simulated", bep.len(), sim.len())));
    }
    bep.iter()
        .zip(sim)
        .map(|(&(db, p), &(db_sim, bits, errors))| {
            if (db - db_sim).abs() > 1e-9 {
                return Err(Error::Grid(format!("grid mismatch: {db} dB vs {db_sim} dB")));
            }
            if bits == 0 || errors > bits {
                return Err(Error::Parse(format!("invalid counts at {db} dB")));
            }
            let ber = errors as f64 / bits as f64;
            let z = z_score(ber, p, bits);
            Ok(CompareRow { ebn0_db: db, bep: p, ber, bits, errors, z, flagged: z.is_nan() || z.abs() > threshold })
        })
        .collect()
}

pub(super) fn write_csv<W: Write>(rows: &[CompareRow], mut out: W) -> Result<()> {
    writeln!(out, "ebn0_db,bep,ber,bits,errors,z,flag")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.15e},{:.15e},{},{},{:.6},{}",
            r.ebn0_db,
            r.bep,
            r.ber,
            r.bits,
            r.errors,
            r.z,
            if r.flagged { "FAIL" } else { "ok" }
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joins_and_flags() {
        let bep = [(0.0, 0.1), (2.0, 0.01)];
        let sim = [(0.0, 10_000, 1000), (2.0, 10_000, 200)];
        let rows = compare(&bep, &sim, 3.0).unwrap();
        assert!(!rows[0].flagged);
        assert!(rows[1].flagged);
        assert!((rows[1].z - 10.050_378_152_592_12).abs() < 1e-9);
    }

    #[test]
    fn grid_mismatch() {
        assert!(matches!(compare(&[(0.0, 0.1)], &[(1.0, 10, 1)], 3.0), Err(Error::Grid(_))));
        assert!(matches!(compare(&[(0.0, 0.1)], &[], 3.0), Err(Error::Grid(_))));
    }

    #[test]
    fn reads_own_formats() {
        let bep = "ebn0_db,bep,model,filter,kmax\n0,1.5e-1,fbmc-awgn-exact,martin,8\n";
        assert_eq!(read_bep_csv(bep.as_bytes()).unwrap(), vec![(0.0, 0.15)]);
        let sim = "ebn0_db,bits,errors,ber,ci95\n0,100,15,1.5e-1,7e-2\n";
        assert_eq!(read_sim_csv(sim.as_bytes()).unwrap(), vec![(0.0, 100, 15)]);
        assert!(read_sim_csv("ebn0_db,bits,errors,ber,ci95\n".as_bytes()).is_err());
        assert!(read_sim_csv("".as_bytes()).is_err());
    }
}
