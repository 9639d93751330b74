//! Annual world series, the three-variable panel, and its CSV format.
//!
//! A [`Panel`] holds population (10⁹ persons), primary energy consumption
//! (Gtoe/year) and GDP (T$ at 2010 prices per year) over one contiguous
//! range of years. Every value is an annual aggregate; there is no
//! intra-year resolution.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Exact header of the panel CSV format.
pub const PANEL_HEADER: &str =
    "year,population_billions,energy_gtoe_per_year,gdp_tusd2010_per_year";

const COLUMNS: [&str; 4] = [
    "year",
    "population_billions",
    "energy_gtoe_per_year",
    "gdp_tusd2010_per_year",
];

/// Fewest years a panel may cover; every regression needs three points.
pub const MIN_PANEL_YEARS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Unit {
    #[serde(rename = "Gtoe/year")]
    GtoePerYear,
    #[serde(rename = "Gtoe")]
    Gtoe,
    #[serde(rename = "T$2010/year")]
    TusdPerYear,
    #[serde(rename = "1e9 persons")]
    BillionPersons,
    #[serde(rename = "dimensionless")]
    Dimensionless,
}

impl Unit {
    pub fn tag(self) -> &'static str {
        match self {
            Unit::GtoePerYear => "Gtoe/year",
            Unit::Gtoe => "Gtoe",
            Unit::TusdPerYear => "T$2010/year",
            Unit::BillionPersons => "1e9 persons",
            Unit::Dimensionless => "dimensionless",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One annual variable: `values[i]` belongs to year `start_year + i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearSeries {
    name: String,
    unit: Unit,
    start_year: i32,
    values: Vec<f64>,
}

impl YearSeries {
    /// Builds a series, rejecting empty input and values that are not
    /// finite and strictly positive.
    pub fn new(
        name: impl Into<String>,
        unit: Unit,
        start_year: i32,
        values: Vec<f64>,
    ) -> Result<Self> {
        let series = Self::new_unchecked(name, unit, start_year, values);
        if series.values.is_empty() {
            return Err(Error::InvalidSeries {
                name: series.name,
                reason: "no values".into(),
            });
        }
        if let Some((year, v)) = series.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidSeries {
                name: series.name.clone(),
                reason: format!("value {v} at year {year} is not finite and positive"),
            });
        }
        Ok(series)
    }

    /// Builds a series without checking positivity. Only useful for
    /// constructing data that [`validate_panel`] should then flag.
    pub fn new_unchecked(
        name: impl Into<String>,
        unit: Unit,
        start_year: i32,
        values: Vec<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            unit,
            start_year,
            values,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    /// Last covered year. For an empty series this is `start_year - 1`.
    pub fn end_year(&self) -> i32 {
        self.start_year + self.values.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        let offset = usize::try_from(year.checked_sub(self.start_year)?).ok()?;
        self.values.get(offset).copied()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len()).map(move |i| self.start_year + i as i32)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.years().zip(self.values.iter().copied())
    }

    /// Same year range as `other`.
    pub fn aligned_with(&self, other: &YearSeries) -> bool {
        self.start_year == other.start_year && self.values.len() == other.values.len()
    }

    pub(crate) fn check_aligned(&self, other: &YearSeries) -> Result<()> {
        if self.aligned_with(other) {
            Ok(())
        } else {
            Err(Error::YearRangeMismatch {
                left_start: self.start_year,
                left_end: self.end_year(),
                right_start: other.start_year,
                right_end: other.end_year(),
            })
        }
    }

    fn slice(&self, from_year: i32, to_year: i32) -> YearSeries {
        let lo = (from_year - self.start_year) as usize;
        let hi = (to_year - self.start_year) as usize;
        YearSeries {
            name: self.name.clone(),
            unit: self.unit,
            start_year: from_year,
            values: self.values[lo..=hi].to_vec(),
        }
    }
}

/// Aligned annual records of population, energy consumption and GDP.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Panel {
    population: YearSeries,
    energy: YearSeries,
    gdp: YearSeries,
}

impl Panel {
    /// Builds a validated panel from raw columns starting at `start_year`.
    pub fn new(
        start_year: i32,
        population: Vec<f64>,
        energy: Vec<f64>,
        gdp: Vec<f64>,
    ) -> Result<Self> {
        let panel = Self::new_unvalidated(start_year, population, energy, gdp);
        let report = validate_panel(&panel);
        if report.is_empty() {
            Ok(panel)
        } else {
            Err(Error::InvalidPanel(report))
        }
    }

    /// Builds a panel without any checks; run [`validate_panel`] on it to
    /// list what is wrong.
    pub fn new_unvalidated(
        start_year: i32,
        population: Vec<f64>,
        energy: Vec<f64>,
        gdp: Vec<f64>,
    ) -> Self {
        Self {
            population: YearSeries::new_unchecked(
                "population",
                Unit::BillionPersons,
                start_year,
                population,
            ),
            energy: YearSeries::new_unchecked("energy", Unit::GtoePerYear, start_year, energy),
            gdp: YearSeries::new_unchecked("gdp", Unit::TusdPerYear, start_year, gdp),
        }
    }

    pub fn start_year(&self) -> i32 {
        self.population.start_year()
    }

    pub fn end_year(&self) -> i32 {
        self.population.end_year()
    }

    /// Number of years covered.
    pub fn len(&self) -> usize {
        self.population.len()
    }

    pub fn is_empty(&self) -> bool {
        self.population.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.population.years()
    }

    pub fn population(&self) -> &YearSeries {
        &self.population
    }

    pub fn energy(&self) -> &YearSeries {
        &self.energy
    }

    pub fn gdp(&self) -> &YearSeries {
        &self.gdp
    }

    /// Same panel with every GDP value replaced.
    pub fn with_gdp(&self, gdp: Vec<f64>) -> Result<Self> {
        Panel::new(
            self.start_year(),
            self.population.values.clone(),
            self.energy.values.clone(),
            gdp,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Fewer than [`MIN_PANEL_YEARS`] years.
    TooShort { years: usize },
    /// A series does not cover the panel's year range.
    RangeMismatch {
        series: String,
        start_year: i32,
        end_year: i32,
    },
    /// A value that is zero, negative, or not finite.
    NonPositive {
        series: String,
        year: i32,
        value: f64,
    },
    WrongUnit {
        series: String,
        expected: Unit,
        found: Unit,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooShort { years } => {
                write!(
                    f,
                    "panel covers {years} year(s), at least {MIN_PANEL_YEARS} required"
                )
            }
            Violation::RangeMismatch {
                series,
                start_year,
                end_year,
            } => write!(
                f,
                "series `{series}` covers [{start_year}, {end_year}], not the panel range"
            ),
            Violation::NonPositive {
                series,
                year,
                value,
            } => {
                write!(
                    f,
                    "series `{series}` has non-positive value {value} at {year}"
                )
            }
            Violation::WrongUnit {
                series,
                expected,
                found,
            } => write!(f, "series `{series}` is in {found}, expected {expected}"),
        }
    }
}

/// Every invariant violation found in a panel; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_panel(panel: &Panel) -> ValidationReport {
    let mut violations = Vec::new();
    if panel.len() < MIN_PANEL_YEARS {
        violations.push(Violation::TooShort { years: panel.len() });
    }
    let expected_units = [Unit::BillionPersons, Unit::GtoePerYear, Unit::TusdPerYear];
    for (series, expected) in [&panel.population, &panel.energy, &panel.gdp]
        .into_iter()
        .zip(expected_units)
    {
        if series.unit != expected {
            violations.push(Violation::WrongUnit {
                series: series.name.clone(),
                expected,
                found: series.unit,
            });
        }
        if !series.aligned_with(&panel.population) {
            violations.push(Violation::RangeMismatch {
                series: series.name.clone(),
                start_year: series.start_year(),
                end_year: series.end_year(),
            });
        }
        for (year, value) in series.iter() {
            if !(value.is_finite() && value > 0.0) {
                violations.push(Violation::NonPositive {
                    series: series.name.clone(),
                    year,
                    value,
                });
            }
        }
    }
    ValidationReport { violations }
}

/// Sub-panel over `[from_year, to_year]`, which must lie inside the panel
/// and span at least three years.
pub fn slice_panel(panel: &Panel, from_year: i32, to_year: i32) -> Result<Panel> {
    let (start, end) = (panel.start_year(), panel.end_year());
    if from_year < start || to_year > end || to_year - from_year < MIN_PANEL_YEARS as i32 - 1 {
        return Err(Error::YearRange {
            from: from_year,
            to: to_year,
            start,
            end,
        });
    }
    Ok(Panel {
        population: panel.population.slice(from_year, to_year),
        energy: panel.energy.slice(from_year, to_year),
        gdp: panel.gdp.slice(from_year, to_year),
    })
}

pub fn load_panel(path: impl AsRef<Path>) -> Result<Panel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_panel(BufReader::new(file))
}

struct Row {
    line: u64,
    year: i32,
    values: [f64; 3],
}

/// Parses the panel CSV format. Rows may appear in any order; they are
/// sorted by year, then checked for duplicates and gaps.
pub fn read_panel<R: Read>(reader: R) -> Result<Panel> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = csv.headers().map_err(csv_error)?.clone();
    for column in COLUMNS {
        if !header.iter().any(|h| h == column) {
            return Err(Error::MissingColumn { column });
        }
    }
    let found = header.iter().collect::<Vec<_>>().join(",");
    if found != PANEL_HEADER {
        return Err(Error::UnexpectedHeader {
            found,
            expected: PANEL_HEADER,
        });
    }

    let mut rows = Vec::new();
    for record in csv.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let year = field(0)
            .trim()
            .parse::<i32>()
            .map_err(|_| Error::NonNumeric {
                line,
                column: COLUMNS[0],
                value: field(0).to_string(),
            })?;
        let mut values = [0.0; 3];
        for (slot, i) in values.iter_mut().zip(1..) {
            let cell = field(i);
            let value = cell.trim().parse::<f64>().map_err(|_| Error::NonNumeric {
                line,
                column: COLUMNS[i],
                value: cell.to_string(),
            })?;
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositive {
                    line,
                    column: COLUMNS[i],
                    year,
                    value,
                });
            }
            *slot = value;
        }
        rows.push(Row { line, year, values });
    }

    rows.sort_by_key(|r| r.year);
    for pair in rows.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.year == prev.year {
            return Err(Error::DuplicateYear {
                line: next.line,
                year: next.year,
            });
        }
        if next.year != prev.year + 1 {
            return Err(Error::YearGap {
                line: next.line,
                previous: prev.year,
                found: next.year,
                missing: prev.year + 1,
            });
        }
    }

    let start_year = rows.first().map_or(0, |r| r.year);
    let column = |i: usize| rows.iter().map(|r| r.values[i]).collect::<Vec<_>>();
    Panel::new(start_year, column(0), column(1), column(2))
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Csv {
        line,
        message: e.to_string(),
    }
}

/// Writes the panel in the CSV format read by [`read_panel`]. Values are
/// printed in shortest round-trip form, so reading back is exact.
pub fn write_panel<W: Write>(panel: &Panel, mut writer: W) -> std::io::Result<()> {
    writeln!(writer, "{PANEL_HEADER}")?;
    for (i, year) in panel.years().enumerate() {
        writeln!(
            writer,
            "{year},{},{},{}",
            panel.population.values[i], panel.energy.values[i], panel.gdp.values[i]
        )?;
    }
    writer.flush()
}

pub fn save_panel(panel: &Panel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_panel(panel, BufWriter::new(file)).map_err(io_err)
}
