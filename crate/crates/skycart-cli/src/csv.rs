//! Trajectory CSV emission with a fixed column contract.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use skycart::Trajectory;

/// Exact header the exporter writes, in column order.
pub const HEADER: &str =
    "t,x,x_dot,alpha,alpha_dot,beta,beta_dot,u1,u2,u3,u1_cmd,u2_cmd,u3_cmd,ref_x,ref_alpha";

/// Write one row per sample. Numbers use the shortest decimal text that
/// parses back to the identical `f64`, so a read-back is bit-exact.
pub fn export_csv(traj: &Trajectory, path: &Path) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{HEADER}")?;
    for s in &traj.samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.t,
            s.state.x,
            s.state.x_dot,
            s.state.alpha,
            s.state.alpha_dot,
            s.state.beta,
            s.state.beta_dot,
            s.input.u1(),
            s.input.u2(),
            s.input.u3(),
            s.debug.u1_pre_clamp,
            s.debug.u2_pre_clamp,
            s.debug.u3_pre_clamp,
            s.applied.x_ref,
            s.applied.alpha_ref,
        )?;
    }
    w.flush()
}

/// Parse an exported file back into rows of 15 columns (test support).
pub fn read_csv(path: &Path) -> std::io::Result<Vec<[f64; 15]>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != HEADER {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected header: {header}"),
        ));
    }
    let mut rows = Vec::new();
    for line in lines {
        let mut row = [0.0; 15];
        let mut n = 0;
        for (i, field) in line.split(',').enumerate() {
            if i >= 15 {
                n = i + 1;
                break;
            }
            row[i] = field.parse().map_err(|e| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{e}: {field}"))
            })?;
            n = i + 1;
        }
        if n != 15 {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("expected 15 columns, got {n}"),
            ));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use skycart::{
        ControlDebug, ControlInput, Reference, State, Trajectory, TrajectorySample,
    };

    fn sample(t: f64, v: f64) -> TrajectorySample {
        TrajectorySample {
            t,
            state: State::new(v, -v, 0.1 + v, 0.0, 1.0 / 3.0, v * 1e-17),
            input: ControlInput::zero(),
            debug: ControlDebug {
                f_t: v,
                theta_ref: 0.0,
                beta_ref: 0.0,
                u1_pre_clamp: 0.874334083621997,
                u2_pre_clamp: -v,
                u3_pre_clamp: v,
            },
            applied: Reference::new(0.3, std::f64::consts::FRAC_PI_2),
        }
    }

    #[test]
    fn empty_trajectory_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        export_csv(&Trajectory::default(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, format!("{HEADER}\n"));
    }

    #[test]
    fn three_samples_make_four_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let traj = Trajectory {
            samples: vec![sample(0.0, 0.0), sample(0.001, 0.25), sample(0.002, 0.5)],
        };
        export_csv(&traj, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        // awkward values: shortest-repr decimals, tiny magnitudes, thirds
        let traj = Trajectory {
            samples: (0..50)
                .map(|i| sample(i as f64 * 1e-3, (i as f64).sin() * 0.123456789))
                .collect(),
        };
        export_csv(&traj, &path).unwrap();
        let rows = read_csv(&path).unwrap();
        assert_eq!(rows.len(), traj.samples.len());
        for (row, s) in rows.iter().zip(&traj.samples) {
            let expect = [
                s.t,
                s.state.x,
                s.state.x_dot,
                s.state.alpha,
                s.state.alpha_dot,
                s.state.beta,
                s.state.beta_dot,
                s.input.u1(),
                s.input.u2(),
                s.input.u3(),
                s.debug.u1_pre_clamp,
                s.debug.u2_pre_clamp,
                s.debug.u3_pre_clamp,
                s.applied.x_ref,
                s.applied.alpha_ref,
            ];
            for (a, b) in row.iter().zip(expect) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
