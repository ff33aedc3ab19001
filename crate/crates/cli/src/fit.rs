use std::fs;
use std::path::{Path, PathBuf};

use chrono::Utc;
use rydcoh_core::analysis::{fit, FitModel, XyData};

use crate::failure::{Failure, Outcome};
use crate::output::{sha256_hex, Manifest, OutputDir};
use crate::plot;
use crate::run::{check_converged, print_fit};

pub struct FitArgs {
    pub data: PathBuf,
    pub model: String,
    pub p1d: Option<f64>,
    pub out: PathBuf,
    pub plot: bool,
}

/// Reads `x, y[, y_err]` rows. A first row that does not parse as numbers
/// is taken as a header. Errors are used as weights only when every one of
/// them is positive.
pub fn read_xy(path: &Path, bytes: &[u8]) -> Outcome<(XyData, bool)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_reader(bytes);
    let mut cols: [Vec<f64>; 3] = Default::default();
    let mut width = None;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::io(path, e))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if line == 0 => continue,
            Err(e) => return Err(Failure::Config(format!("{} line {}: {e}", path.display(), line + 1))),
        };
        if !(2..=3).contains(&values.len()) || width.is_some_and(|w| w != values.len()) {
            return Err(Failure::Config(format!(
                "{} line {}: expected a consistent 2 or 3 columns (x, y[, y_err]), found {}",
                path.display(),
                line + 1,
                values.len()
            )));
        }
        width = Some(values.len());
        for (c, v) in values.into_iter().enumerate() {
            cols[c].push(v);
        }
    }
    let [x, y, err] = cols;
    let weighted = !err.is_empty() && err.iter().all(|e| e.is_finite() && *e > 0.0);
    let data = if weighted { XyData::with_errors(x, y, err)? } else { XyData::new(x, y)? };
    Ok((data, weighted))
}

pub fn cmd_fit(args: &FitArgs) -> Outcome<PathBuf> {
    let started = Utc::now();
    let mut model: FitModel = args.model.parse()?;
    if let (FitModel::PiTrain { .. }, Some(p)) = (model, args.p1d) {
        model = FitModel::PiTrain { p1d: Some(p) };
    } else if args.p1d.is_some() {
        return Err(Failure::Config("--p1d applies only to the pi-train model".into()));
    }
    let bytes = fs::read(&args.data).map_err(|e| Failure::io(&args.data, e))?;
    let (data, weighted) = read_xy(&args.data, &bytes)?;
    if !weighted {
        println!("fitting unweighted (no positive y_err column)");
    }
    let result = fit(model, &data).map_err(|e| match e {
        rydcoh_core::Error::Fit { .. } => Failure::Numerical(e.to_string()),
        other => Failure::from(other),
    })?;
    print_fit(&result);

    let input = serde_json::json!({
        "data": args.data.display().to_string(),
        "data_sha256": sha256_hex(&bytes),
        "model": args.model,
        "p1d": args.p1d,
        "weighted": weighted,
    });
    let mut out = OutputDir::create(&args.out)?;
    let mut manifest = Manifest::new(format!("fit {}", args.model), input, started);
    out.write_fit(&result)?;
    manifest.note("fit", &result);
    if args.plot {
        let curve = rydcoh_core::noise::EnsembleResult {
            scan_values: data.x.clone(),
            mean_observable: data.y.clone(),
            standard_error: data.y_err.clone().unwrap_or_else(|| vec![0.0; data.len()]),
            n_shots: 0,
            seed: 0,
        };
        out.write("plot.svg", plot::render(&curve, Some(&result), "x", &args.model).as_bytes())?;
    }
    let path = out.finish(manifest)?;
    check_converged(&result)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_column_handling() {
        let p = Path::new("mem.csv");
        let (d, w) = read_xy(p, b"scan_value,mean,stderr\n0,1,0.1\n1,2,0.1\n").unwrap();
        assert!(w);
        assert_eq!(d.x, vec![0.0, 1.0]);
        let (d, w) = read_xy(p, b"0,1\n1,2\n").unwrap();
        assert!(!w && d.y_err.is_none());
        let (_, w) = read_xy(p, b"0,1,0\n1,2,0.1\n").unwrap();
        assert!(!w);
        assert!(matches!(read_xy(p, b"0,1\n1,2,3\n"), Err(Failure::Config(_))));
        assert!(matches!(read_xy(p, b"0,1\nx,2\n"), Err(Failure::Config(_))));
    }
}
