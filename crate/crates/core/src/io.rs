//! JSON and CSV formats.
//!
//! Matrices: `{"rows": r, "cols": c, "entries": [[[w,x,y,z], ...], ...]}`.
//! Points and tangent vectors add an `{"n": .., "k": ..}` header to the
//! matrix object. Trajectories are written as CSV with 17 significant
//! digits per float.

use std::io::Write;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::flow::FlowTrajectory;
use crate::matrix::{MatrixJson, QMatrix};
use crate::stiefel::{validate_point, StiefelPoint};

pub fn matrix_from_json(s: &str) -> Result<QMatrix> {
    serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))
}

pub fn matrix_to_json(m: &QMatrix) -> String {
    serde_json::to_string(m).expect("matrix serialization")
}

/// Parses a point; the `n`/`k` header is optional but must agree with the
/// matrix shape when present. The constraint is checked at `tol`.
pub fn point_from_json(s: &str, tol: f64) -> Result<StiefelPoint> {
    #[derive(Deserialize)]
    struct Raw {
        n: Option<usize>,
        k: Option<usize>,
        #[serde(flatten)]
        mat: MatrixJson,
    }
    let raw: Raw = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    let mat = QMatrix::try_from(raw.mat)?;
    if raw.n.is_some_and(|n| n != mat.rows()) || raw.k.is_some_and(|k| k != mat.cols()) {
        return Err(Error::Json(format!(
            "header n={:?}, k={:?} disagrees with a {}x{} matrix",
            raw.n,
            raw.k,
            mat.rows(),
            mat.cols()
        )));
    }
    validate_point(mat, tol)
}

pub fn point_to_json(x: &StiefelPoint) -> String {
    serde_json::to_string(x).expect("point serialization")
}

/// Float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

const COMPONENTS: [char; 4] = ['w', 'x', 'y', 'z'];

fn point_columns(prefix: &str, rows: usize, cols: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(4 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            for c in COMPONENTS {
                out.push(format!("{prefix}{i}_{j}_{c}"));
            }
        }
    }
    out
}

fn point_fields(x: &StiefelPoint) -> impl Iterator<Item = String> + '_ {
    x.mat().to_real_vec().into_iter().map(fmt_f64)
}

/// `t,h,grad_norm` rows; with `with_points`, each row is followed by the
/// point's entries (row-major, then `w,x,y,z`).
pub fn write_trajectory_csv<W: Write>(
    out: &mut W,
    traj: &FlowTrajectory,
    with_points: bool,
) -> std::io::Result<()> {
    let mut header = vec!["t".to_string(), "h".into(), "grad_norm".into()];
    if with_points {
        if let Some(x) = traj.points.first() {
            header.extend(point_columns("x", x.n(), x.k()));
        }
    }
    writeln!(out, "{}", header.join(","))?;
    for i in 0..traj.len() {
        let mut row = vec![
            fmt_f64(traj.times[i]),
            fmt_f64(traj.heights[i]),
            fmt_f64(traj.gradient_norms[i]),
        ];
        if with_points {
            row.extend(point_fields(&traj.points[i]));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Side-by-side closed-form and RK4 samples on the same time grid:
/// `t,h_closed,h_rk4,deviation`, where `deviation` is the Frobenius
/// distance between the two points. Returns the largest deviation.
pub fn write_comparison_csv<W: Write>(
    out: &mut W,
    closed: &FlowTrajectory,
    rk4: &FlowTrajectory,
    with_points: bool,
) -> std::io::Result<f64> {
    assert_eq!(closed.len(), rk4.len(), "trajectories on different grids");
    let mut header: Vec<String> = ["t", "h_closed", "h_rk4", "deviation"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if with_points {
        if let Some(x) = closed.points.first() {
            header.extend(point_columns("closed_", x.n(), x.k()));
            header.extend(point_columns("rk4_", x.n(), x.k()));
        }
    }
    writeln!(out, "{}", header.join(","))?;
    let mut max_dev: f64 = 0.0;
    for i in 0..closed.len() {
        let dev = closed.points[i].dist(&rk4.points[i]);
        max_dev = max_dev.max(dev);
        let mut row = vec![
            fmt_f64(closed.times[i]),
            fmt_f64(closed.heights[i]),
            fmt_f64(rk4.heights[i]),
            fmt_f64(dev),
        ];
        if with_points {
            row.extend(point_fields(&closed.points[i]));
            row.extend(point_fields(&rk4.points[i]));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{closed_form_trajectory, numerical_flow};
    use crate::stiefel::random_point;
    use crate::DEFAULT_TOL;

    #[test]
    fn point_round_trip_is_bit_exact() {
        let x = random_point(4, 2, 17).unwrap();
        let s = point_to_json(&x);
        assert!(s.starts_with(r#"{"n":4,"k":2,"rows":4,"cols":2,"entries":"#));
        let back = point_from_json(&s, DEFAULT_TOL).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn point_header_is_optional_but_checked() {
        let bare = r#"{"rows":2,"cols":1,"entries":[[[0,0,0,0]],[[1,0,0,0]]]}"#;
        assert!(point_from_json(bare, DEFAULT_TOL).is_ok());
        let wrong = r#"{"n":3,"k":1,"rows":2,"cols":1,"entries":[[[0,0,0,0]],[[1,0,0,0]]]}"#;
        assert!(matches!(point_from_json(wrong, DEFAULT_TOL), Err(Error::Json(_))));
        let off = r#"{"rows":2,"cols":1,"entries":[[[1,0,0,0]],[[1,0,0,0]]]}"#;
        assert!(matches!(
            point_from_json(off, DEFAULT_TOL),
            Err(Error::NotOnManifold { .. })
        ));
        assert!(matches!(point_from_json("{", DEFAULT_TOL), Err(Error::Json(_))));
    }

    #[test]
    fn csv_layout() {
        let x = random_point(2, 1, 1).unwrap();
        let traj = closed_form_trajectory(&x, 0.0, 1.0, 4).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,h,grad_norm");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1].split(',').next().unwrap(), "0.0000000000000000e0");
        let parsed: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed, traj.heights[2]);

        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("t,h,grad_norm,x0_0_w,x0_0_x,x0_0_y,x0_0_z,x1_0_w"));
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 3 + 8);
    }

    #[test]
    fn comparison_csv() {
        let x = random_point(3, 1, 2).unwrap();
        let closed = closed_form_trajectory(&x, 0.0, 0.5, 50).unwrap();
        let rk4 = numerical_flow(&x, 0.0, 0.5, 50, false).unwrap();
        let mut buf = Vec::new();
        let dev = write_comparison_csv(&mut buf, &closed, &rk4, false).unwrap();
        assert!(dev < 1e-7);
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,h_closed,h_rk4,deviation");
    }
}
