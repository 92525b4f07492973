//! Bound curves over a `θ` grid, as CSV rows.

use rayon::prelude::*;
use serde::Serialize;

use crate::dimension::{box_dim, hausdorff_dim};
use crate::error::{Error, Result};
use crate::lower::{lower_ffk, lower_linear_box, lower_thm};
use crate::rate::RateFunction;
use crate::upper::{improved_upper, upper_bound, GridSpec};

pub const CSV_HEADER: [&str; 9] =
    ["theta", "upper2", "upper3", "lower_psi", "lower_linear", "lower_ffk", "lower_env", "hdim", "bdim"];

/// Tolerance of the ordering check `hdim ≤ lower_env ≤ upper2 ≤ bdim`.
pub const CHECK_TOL: f64 = 1e-9;

/// Three-scale values are only computed on `[r + margin, 1 − margin]`.
pub const THREE_SCALE_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CurvePoint {
    pub theta: f64,
    pub upper2: f64,
    pub upper3: Option<f64>,
    pub lower_psi: f64,
    pub lower_linear: f64,
    pub lower_ffk: f64,
    pub lower_env: f64,
    pub hdim: f64,
    pub bdim: f64,
}

impl CurvePoint {
    /// Ordering violations at this point, as messages.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut chain = |name_a: &str, a: f64, name_b: &str, b: f64| {
            if !(a <= b + CHECK_TOL) {
                out.push(format!("theta={}: {name_a} = {a} exceeds {name_b} = {b}", self.theta));
            }
        };
        chain("hdim", self.hdim, "lower_env", self.lower_env);
        chain("lower_env", self.lower_env, "upper2", self.upper2);
        chain("upper2", self.upper2, "bdim", self.bdim);
        if let Some(u3) = self.upper3 {
            chain("upper3", u3, "upper2", self.upper2);
        }
        out
    }
}

/// `g` equally spaced points on `[0, 1]` with the interior point nearest to
/// `r` moved onto `r`, so the plateau junction is always sampled. With no
/// interior points `r` is inserted instead.
pub fn theta_grid(r: f64, g: usize) -> Result<Vec<f64>> {
    if g < 2 {
        return Err(Error::InvalidParameter(format!("grid size {g} must be at least 2")));
    }
    let mut grid: Vec<f64> = (0..g).map(|i| i as f64 / (g - 1) as f64).collect();
    if grid.contains(&r) {
        return Ok(grid);
    }
    if g == 2 {
        grid.insert(1, r);
        return Ok(grid);
    }
    let nearest =
        (1..g - 1).min_by(|&a, &b| (grid[a] - r).abs().total_cmp(&(grid[b] - r).abs())).expect("interior points exist");
    grid[nearest] = r;
    Ok(grid)
}

pub fn curve_point(rate: &RateFunction, theta: f64, include_three_scale: bool) -> Result<CurvePoint> {
    let carpet = rate.carpet();
    let upper2 = upper_bound(rate, theta)?;
    let r = carpet.r();
    let in_band = theta >= r + THREE_SCALE_MARGIN && theta <= 1.0 - THREE_SCALE_MARGIN;
    let upper3 = if include_three_scale && in_band {
        match improved_upper(rate, theta, &GridSpec::default()) {
            Ok(p) => Some(p.bound),
            Err(Error::UniformFibres) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let lower_psi = lower_thm(carpet, theta)?.psi;
    let lower_linear = lower_linear_box(carpet, theta);
    let ffk = lower_ffk(carpet, theta);
    Ok(CurvePoint {
        theta,
        upper2,
        upper3,
        lower_psi,
        lower_linear,
        lower_ffk: ffk,
        lower_env: lower_psi.max(lower_linear).max(ffk),
        hdim: hausdorff_dim(carpet),
        bdim: box_dim(carpet),
    })
}

/// Curve rows in `θ` order; rows are computed in parallel.
pub fn curve(rate: &RateFunction, grid: usize, include_three_scale: bool) -> Result<Vec<CurvePoint>> {
    let thetas = theta_grid(rate.carpet().r(), grid)?;
    thetas.par_iter().map(|&t| curve_point(rate, t, include_three_scale)).collect()
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: std::io::Write>(points: &[CurvePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for p in points {
        let cells = [
            format_g12(p.theta),
            format_g12(p.upper2),
            p.upper3.map(format_g12).unwrap_or_default(),
            format_g12(p.lower_psi),
            format_g12(p.lower_linear),
            format_g12(p.lower_ffk),
            format_g12(p.lower_env),
            format_g12(p.hdim),
            format_g12(p.bdim),
        ];
        w.write_record(&cells).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(points: &[CurvePoint]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(points, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("CSV error: {other:?}")),
    }
}

/// Parses curve CSV text. Empty `upper3` cells become `None`.
pub fn read_csv(text: &str) -> Result<Vec<CurvePoint>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::InvalidParameter(format!(
            "unexpected CSV header {:?}; expected {}",
            header.iter().collect::<Vec<_>>(),
            CSV_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let cell = |i: usize| -> Result<Option<f64>> {
            let s = rec.get(i).unwrap_or("").trim();
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| {
                Error::InvalidParameter(format!("row {}: cannot parse {:?} in column {}", line + 1, s, CSV_HEADER[i]))
            })
        };
        let req = |i: usize| -> Result<f64> {
            cell(i)?.ok_or_else(|| Error::InvalidParameter(format!("row {}: empty {} cell", line + 1, CSV_HEADER[i])))
        };
        out.push(CurvePoint {
            theta: req(0)?,
            upper2: req(1)?,
            upper3: cell(2)?,
            lower_psi: req(3)?,
            lower_linear: req(4)?,
            lower_ffk: req(5)?,
            lower_env: req(6)?,
            hdim: req(7)?,
            bdim: req(8)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub rows: usize,
    pub violations: Vec<String>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Validates the ordering invariant on every row of a curve CSV.
pub fn check_csv(text: &str) -> Result<CheckReport> {
    let points = read_csv(text)?;
    Ok(CheckReport { rows: points.len(), violations: points.iter().flat_map(|p| p.violations()).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::{Carpet, CarpetSpec};

    fn l_shape() -> RateFunction {
        RateFunction::new(&Carpet::new(CarpetSpec::new(2, 3, vec![(0, 0), (0, 1), (1, 0)])).unwrap())
    }

    #[test]
    fn g12_formatting() {
        assert_eq!(format_g12(0.0), "0");
        assert_eq!(format_g12(1.0), "1");
        assert_eq!(format_g12(0.5), "0.5");
        assert_eq!(format_g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_g12(1.3496838201955774), "1.3496838202");
        assert_eq!(format_g12(-2.5e-7), "-2.5e-07");
        assert_eq!(format_g12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_g12(0.0001), "0.0001");
        // rounding carries into a new leading digit
        assert_eq!(format_g12(999999999999.9), "1e+12");
    }

    #[test]
    fn grid_contains_breakpoint() {
        let r = 2f64.ln() / 3f64.ln();
        let g = theta_grid(r, 200).unwrap();
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[199], 1.0);
        assert!(g.contains(&r));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(theta_grid(r, 2).unwrap(), vec![0.0, r, 1.0]);
        assert_eq!(theta_grid(0.5, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(theta_grid(r, 1).is_err());
    }

    #[test]
    fn l_shape_curve_anchors_and_order() {
        let f = l_shape();
        let pts = curve(&f, 41, true).unwrap();
        let first = pts.first().unwrap();
        let last = pts.last().unwrap();
        assert!((first.lower_env - first.hdim).abs() < 1e-9);
        assert!((last.upper2 - last.bdim).abs() < 1e-6);
        assert!((last.lower_env - last.bdim).abs() < 1e-6);
        assert!(pts.iter().all(|p| p.violations().is_empty()));
        assert!(pts.iter().any(|p| p.upper3.is_some()));
        for p in &pts {
            let band = p.theta >= f.carpet().r() + 0.01 && p.theta <= 0.99;
            assert_eq!(p.upper3.is_some(), band, "theta={}", p.theta);
        }
    }

    #[test]
    fn csv_round_trip_and_check() {
        let f = l_shape();
        let pts = curve(&f, 12, false).unwrap();
        let text = to_csv_string(&pts).unwrap();
        assert!(text.starts_with("theta,upper2,upper3,lower_psi,lower_linear,lower_ffk,lower_env,hdim,bdim\n"));
        let back = read_csv(&text).unwrap();
        assert_eq!(back.len(), pts.len());
        for (a, b) in back.iter().zip(&pts) {
            assert!((a.upper2 - b.upper2).abs() < 1e-11);
            assert_eq!(a.upper3, None);
        }
        assert!(check_csv(&text).unwrap().ok());
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut cells: Vec<String> = lines[1].split(',').map(String::from).collect();
        cells[1] = "0.5".into();
        lines[1] = cells.join(",");
        let report = check_csv(&(lines.join("\n") + "\n")).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert!(read_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn curve_is_deterministic() {
        let f = l_shape();
        let a = to_csv_string(&curve(&f, 30, false).unwrap()).unwrap();
        let b = to_csv_string(&curve(&l_shape(), 30, false).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
