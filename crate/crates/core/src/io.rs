//! Price CSV ingestion and the params JSON file format.
//!
//! Price CSV: header `date,<name1>,...,<namek>`, ISO-8601 dates, `.` as the
//! decimal point. Empty or unparsable cells are errors; nothing is imputed.
//!
//! Params JSON: `{"mu": [..], "sigma": [[..], ..], "r_f": x, "asset_names": [..]}`
//! with `asset_names` optional. Floats are written as the shortest decimal
//! that round-trips, so read-after-write is bit-exact.

use std::fs;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{make_params, MarketParams, PriceSeries};

pub fn read_price_csv(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let file = fs::File::open(path)?;
    parse_price_csv(file)
}

pub fn parse_price_csv<R: Read>(reader: R) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 || !headers[0].eq_ignore_ascii_case("date") {
        return Err(Error::InvalidConfig(
            "price CSV header must be `date,<asset>,...`".into(),
        ));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
    let k = names.len();

    let mut dates = Vec::new();
    let mut values = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let date = record.get(0).unwrap_or("");
        dates.push(parse_date(date).ok_or_else(|| Error::InvalidDate {
            row,
            value: date.to_owned(),
        })?);
        for col in 0..k {
            let cell = record.get(col + 1).unwrap_or("");
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::MissingValue { row, col })?;
            values.push(v);
        }
    }
    let t = dates.len();
    let prices = DMatrix::from_row_slice(t, k, &values);
    PriceSeries::new(dates, prices, names)
}

fn parse_date(s: &str) -> Option<NaiveDateTime> {
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return d.and_hms_opt(0, 0, 0);
    }
    if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f") {
        return Some(dt);
    }
    DateTime::parse_from_rfc3339(s).ok().map(|dt| dt.naive_utc())
}

/// On-disk representation of [`MarketParams`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub r_f: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asset_names: Option<Vec<String>>,
}

impl From<&MarketParams> for ParamsFile {
    fn from(p: &MarketParams) -> Self {
        let k = p.k();
        ParamsFile {
            mu: p.mu().iter().copied().collect(),
            sigma: (0..k)
                .map(|r| (0..k).map(|c| p.sigma()[(r, c)]).collect())
                .collect(),
            r_f: p.r_f(),
            asset_names: p.asset_names().map(<[String]>::to_vec),
        }
    }
}

impl ParamsFile {
    pub fn into_params(self) -> Result<MarketParams> {
        let k = self.mu.len();
        if self.sigma.len() != k || self.sigma.iter().any(|row| row.len() != k) {
            return Err(Error::DimensionMismatch(format!(
                "sigma must be {k}x{k} to match mu"
            )));
        }
        let flat: Vec<f64> = self.sigma.into_iter().flatten().collect();
        let p = make_params(
            DVector::from_vec(self.mu),
            DMatrix::from_row_slice(k, k, &flat),
            self.r_f,
        )?;
        match self.asset_names {
            Some(names) => p.with_asset_names(names),
            None => Ok(p),
        }
    }
}

pub fn params_to_json(p: &MarketParams) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&ParamsFile::from(p))?;
    s.push('\n');
    Ok(s)
}

pub fn params_from_json(s: &str) -> Result<MarketParams> {
    serde_json::from_str::<ParamsFile>(s)?.into_params()
}

pub fn write_params_json(p: &MarketParams, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, params_to_json(p)?)?;
    Ok(())
}

pub fn read_params_json(path: impl AsRef<Path>) -> Result<MarketParams> {
    params_from_json(&fs::read_to_string(path)?)
}
