use std::fmt::Write as _;
use std::io::{Read, Write};

use super::experiment::{CurvePoint, ExperimentResult, PolicyFit, TrialResult};
use super::trial::TrialRecord;
use crate::error::{LabError, Result};
use crate::matrices::io::format_f64;

fn field<'a>(rec: &'a csv::StringRecord, i: usize, line: usize) -> Result<&'a str> {
    rec.get(i).ok_or_else(|| LabError::Format(format!("line {line}: missing column {}", i + 1)))
}

fn parse<T: std::str::FromStr>(text: &str, what: &str, line: usize) -> Result<T> {
    text.trim().parse().map_err(|_| LabError::Format(format!("line {line}: bad {what} '{text}'")))
}

fn expect_header(rdr: &mut csv::Reader<impl Read>, want: &[&str]) -> Result<()> {
    let got = rdr.headers()?;
    if got.iter().collect::<Vec<_>>() != want {
        return Err(LabError::Format(format!("expected header {want:?}, got {got:?}")));
    }
    Ok(())
}

pub fn write_results_csv<W: Write>(result: &ExperimentResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["policy", "m", "trial", "d_max_trial"])?;
    for t in &result.trials {
        out.write_record([t.policy.name().to_string(), t.m.to_string(), t.trial.to_string(), t.d_max_trial.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_results_csv<R: Read>(r: R) -> Result<Vec<TrialResult>> {
    let mut rdr = csv::Reader::from_reader(r);
    expect_header(&mut rdr, &["policy", "m", "trial", "d_max_trial"])?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        rows.push(TrialResult {
            policy: field(&rec, 0, line)?.parse()?,
            m: parse(field(&rec, 1, line)?, "m", line)?,
            trial: parse(field(&rec, 2, line)?, "trial", line)?,
            d_max_trial: parse(field(&rec, 3, line)?, "d_max_trial", line)?,
        });
    }
    Ok(rows)
}

pub fn write_summary_csv<W: Write>(result: &ExperimentResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["policy", "m", "d_max"])?;
    for c in &result.curves {
        out.write_record([c.policy.name().to_string(), c.m.to_string(), c.d_max.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_summary_csv<R: Read>(r: R) -> Result<Vec<CurvePoint>> {
    let mut rdr = csv::Reader::from_reader(r);
    expect_header(&mut rdr, &["policy", "m", "d_max"])?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        rows.push(CurvePoint {
            policy: field(&rec, 0, line)?.parse()?,
            m: parse(field(&rec, 1, line)?, "m", line)?,
            d_max: parse(field(&rec, 2, line)?, "d_max", line)?,
        });
    }
    Ok(rows)
}

/// Policies without a fit get empty numeric fields.
pub fn write_fits_csv<W: Write>(fits: &[PolicyFit], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["policy", "slope", "intercept", "points_used"])?;
    for f in fits {
        let row = match &f.fit {
            Some(fit) => [f.policy.name().to_string(), format_f64(fit.slope), format_f64(fit.intercept), fit.points_used.to_string()],
            None => [f.policy.name().to_string(), String::new(), String::new(), "0".into()],
        };
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_attempts_csv<W: Write>(attempts: &[TrialRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["policy", "m", "trial", "d", "draw", "success", "rel_error", "decision", "seed"])?;
    for a in attempts {
        let decision = serde_json::to_value(a.decision)?;
        out.write_record([
            a.policy.name().to_string(),
            a.m.to_string(),
            a.trial.to_string(),
            a.d.to_string(),
            a.draw.to_string(),
            a.success.to_string(),
            a.rel_error.map(format_f64).unwrap_or_default(),
            decision.as_str().unwrap_or_default().to_string(),
            a.seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Gnuplot script drawing every policy's `d_max` curve from `summary_csv`
/// with its fitted line, written to `figure1.png`.
pub fn gnuplot_script(summary_csv: &str, fits: &[PolicyFit]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output 'figure1.png'");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set xlabel 'M'");
    let _ = writeln!(s, "set ylabel 'D_max'");
    let _ = writeln!(s, "set key top left");
    let _ = writeln!(s, "set yrange [0:*]");
    let mut plots = Vec::new();
    for (i, f) in fits.iter().enumerate() {
        let name = f.policy.name();
        plots.push(format!(
            "'{summary_csv}' using 2:(strcol(1) eq '{name}' && $3 > 0 ? $3 : 1/0) with points pt {} lc {} title '{name}'",
            7 + i,
            i + 1
        ));
        if let Some(fit) = &f.fit {
            let _ = writeln!(s, "f{i}(x) = {} * x + {}", format_f64(fit.slope), format_f64(fit.intercept));
            plots.push(format!("f{i}(x) with lines lc {} notitle", i + 1));
        }
    }
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{fit_line, DropPolicy, ExperimentConfig};

    fn sample() -> ExperimentResult {
        let cfg = ExperimentConfig {
            m_grid: vec![100, 120],
            trials: 2,
            policies: vec![DropPolicy::RandomSingle, DropPolicy::RandomMulti],
            ..ExperimentConfig::figure1_small()
        };
        let mut trials = Vec::new();
        for (policy, base) in [(DropPolicy::RandomSingle, 10), (DropPolicy::RandomMulti, -1)] {
            for (m, extra) in [(100, 0), (120, 20)] {
                for trial in 0..2 {
                    trials.push(TrialResult { policy, m, trial, d_max_trial: base + extra + trial as i64 });
                }
            }
        }
        ExperimentResult::from_trials(cfg, trials, Vec::new())
    }

    #[test]
    fn results_round_trip() {
        let res = sample();
        let mut buf = Vec::new();
        write_results_csv(&res, &mut buf).unwrap();
        let back = read_results_csv(buf.as_slice()).unwrap();
        assert_eq!(back, res.trials);
        let rebuilt = ExperimentResult::from_trials(res.config.clone(), back, Vec::new());
        assert_eq!(rebuilt.curves, res.curves);
        assert_eq!(rebuilt.fits, res.fits);

        let mut buf = Vec::new();
        write_summary_csv(&res, &mut buf).unwrap();
        assert_eq!(read_summary_csv(buf.as_slice()).unwrap(), res.curves);
    }

    #[test]
    fn summary_values() {
        let res = sample();
        let fit = res.fit(DropPolicy::RandomSingle).unwrap();
        assert_eq!(fit, &fit_line(&[(100.0, 10.0), (120.0, 30.0)]).unwrap());
        assert_eq!(res.onset(DropPolicy::RandomSingle), Some(100));
        assert_eq!(res.onset(DropPolicy::RandomMulti), Some(120));
        assert!(res.fit(DropPolicy::RandomMulti).is_none());
    }

    #[test]
    fn malformed_csv() {
        assert!(read_summary_csv("policy,m\nrandom_single,3\n".as_bytes()).is_err());
        assert!(read_summary_csv("policy,m,d_max\nrandom_single,x,1\n".as_bytes()).is_err());
        assert!(read_summary_csv("policy,m,d_max\nother,3,1\n".as_bytes()).is_err());
    }

    #[test]
    fn fits_and_script() {
        let res = sample();
        let mut buf = Vec::new();
        write_fits_csv(&res.fits, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(2).unwrap().starts_with("random_multi,,,0"));
        let script = gnuplot_script("summary.csv", &res.fits);
        assert!(script.contains("f0(x) = "));
        assert!(!script.contains("f1(x) = "));
        assert!(script.contains("'random_multi'"));
    }
}
