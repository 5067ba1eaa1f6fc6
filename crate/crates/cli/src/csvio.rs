//! CSV interchange format.
//!
//! One schema per command, each with a `#`-prefixed version comment on the
//! first line and a header on the second. Floats are written with Rust's
//! shortest round-trip formatting ('.' decimal separator, no locale), so a
//! rerun with the same plan and master seed reproduces the file byte for
//! byte. Fields that do not apply to a row's scenario stay empty.

pub const SIM_HEADER: &str = "scenario,n,lambda,p,q,seed,replication,horizon,v1_hat,vn_hat,vA_hat,events,v1_mean,v1_stderr,vn_mean,vn_stderr,vA_mean,vA_stderr";
pub const SOLVE_HEADER: &str =
    "scenario,n,lambda,p,q,v1,vn,vA,vskn_min,vskn_max,v1_asym_p1,v1_asym_p0,v1_lower,v1_upper";
pub const COMPARE_HEADER: &str =
    "scenario,n,lambda,p,q,mode,reps,horizon,metric,sim_mean,sim_stderr,exact,rel_err,tolerance,pass";

pub fn version_comment(command: &str) -> String {
    format!("# aoi-gossip {} {command}", env!("CARGO_PKG_VERSION"))
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt_f64(field: &str) -> Result<Option<f64>, String> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| format!("bad float '{field}'"))
}

fn parse_f64(field: &str) -> Result<f64, String> {
    field.parse::<f64>().map_err(|_| format!("bad float '{field}'"))
}

/// One row of simulation output. Data rows carry per-replication estimates;
/// aggregate rows use `replication = -1` and carry the mean/stderr columns
/// instead.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRow {
    pub scenario: String,
    pub n: usize,
    pub lambda: f64,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub seed: u64,
    pub replication: i64,
    pub horizon: f64,
    pub v1_hat: Option<f64>,
    pub vn_hat: Option<f64>,
    pub va_hat: Option<f64>,
    pub events: Option<u64>,
    pub v1_mean: Option<f64>,
    pub v1_stderr: Option<f64>,
    pub vn_mean: Option<f64>,
    pub vn_stderr: Option<f64>,
    pub va_mean: Option<f64>,
    pub va_stderr: Option<f64>,
}

impl SimRow {
    pub fn is_aggregate(&self) -> bool {
        self.replication < 0
    }

    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scenario,
            self.n,
            self.lambda,
            fmt_opt(self.p),
            fmt_opt(self.q),
            self.seed,
            self.replication,
            self.horizon,
            fmt_opt(self.v1_hat),
            fmt_opt(self.vn_hat),
            fmt_opt(self.va_hat),
            self.events.map(|e| e.to_string()).unwrap_or_default(),
            fmt_opt(self.v1_mean),
            fmt_opt(self.v1_stderr),
            fmt_opt(self.vn_mean),
            fmt_opt(self.vn_stderr),
            fmt_opt(self.va_mean),
            fmt_opt(self.va_stderr),
        )
    }

    pub fn from_line(line: &str) -> Result<SimRow, String> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 18 {
            return Err(format!("expected 18 fields, got {}", f.len()));
        }
        Ok(SimRow {
            scenario: f[0].to_string(),
            n: f[1].parse().map_err(|_| format!("bad n '{}'", f[1]))?,
            lambda: parse_f64(f[2])?,
            p: parse_opt_f64(f[3])?,
            q: parse_opt_f64(f[4])?,
            seed: f[5].parse().map_err(|_| format!("bad seed '{}'", f[5]))?,
            replication: f[6]
                .parse()
                .map_err(|_| format!("bad replication '{}'", f[6]))?,
            horizon: parse_f64(f[7])?,
            v1_hat: parse_opt_f64(f[8])?,
            vn_hat: parse_opt_f64(f[9])?,
            va_hat: parse_opt_f64(f[10])?,
            events: if f[11].is_empty() {
                None
            } else {
                Some(f[11].parse().map_err(|_| format!("bad events '{}'", f[11]))?)
            },
            v1_mean: parse_opt_f64(f[12])?,
            v1_stderr: parse_opt_f64(f[13])?,
            vn_mean: parse_opt_f64(f[14])?,
            vn_stderr: parse_opt_f64(f[15])?,
            va_mean: parse_opt_f64(f[16])?,
            va_stderr: parse_opt_f64(f[17])?,
        })
    }
}

/// One row of exact solver output.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveRow {
    pub scenario: String,
    pub n: usize,
    pub lambda: f64,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub v1: f64,
    pub vn: Option<f64>,
    pub va: Option<f64>,
    pub vskn_min: Option<f64>,
    pub vskn_max: Option<f64>,
    pub v1_asym_p1: Option<f64>,
    pub v1_asym_p0: Option<f64>,
    pub v1_lower: Option<f64>,
    pub v1_upper: Option<f64>,
}

impl SolveRow {
    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scenario,
            self.n,
            self.lambda,
            fmt_opt(self.p),
            fmt_opt(self.q),
            self.v1,
            fmt_opt(self.vn),
            fmt_opt(self.va),
            fmt_opt(self.vskn_min),
            fmt_opt(self.vskn_max),
            fmt_opt(self.v1_asym_p1),
            fmt_opt(self.v1_asym_p0),
            fmt_opt(self.v1_lower),
            fmt_opt(self.v1_upper),
        )
    }

    pub fn from_line(line: &str) -> Result<SolveRow, String> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 14 {
            return Err(format!("expected 14 fields, got {}", f.len()));
        }
        Ok(SolveRow {
            scenario: f[0].to_string(),
            n: f[1].parse().map_err(|_| format!("bad n '{}'", f[1]))?,
            lambda: parse_f64(f[2])?,
            p: parse_opt_f64(f[3])?,
            q: parse_opt_f64(f[4])?,
            v1: parse_f64(f[5])?,
            vn: parse_opt_f64(f[6])?,
            va: parse_opt_f64(f[7])?,
            vskn_min: parse_opt_f64(f[8])?,
            vskn_max: parse_opt_f64(f[9])?,
            v1_asym_p1: parse_opt_f64(f[10])?,
            v1_asym_p0: parse_opt_f64(f[11])?,
            v1_lower: parse_opt_f64(f[12])?,
            v1_upper: parse_opt_f64(f[13])?,
        })
    }
}

/// A parsed CSV file of either interchange schema.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Sim(Vec<SimRow>),
    Solve(Vec<SolveRow>),
}

/// Parses a CSV file produced by `simulate` or `solve`, identified by its
/// header line. Comment lines are skipped; a missing or unknown header, a
/// malformed row, or an empty body is a schema error.
pub fn parse_table(text: &str) -> Result<Table, String> {
    let mut lines = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or("empty CSV: no header line")?;
    match header {
        SIM_HEADER => {
            let rows: Result<Vec<SimRow>, String> = lines
                .enumerate()
                .map(|(i, l)| SimRow::from_line(l).map_err(|e| format!("row {}: {e}", i + 1)))
                .collect();
            let rows = rows?;
            if rows.is_empty() {
                return Err("CSV has a header but no data rows".into());
            }
            Ok(Table::Sim(rows))
        }
        SOLVE_HEADER => {
            let rows: Result<Vec<SolveRow>, String> = lines
                .enumerate()
                .map(|(i, l)| SolveRow::from_line(l).map_err(|e| format!("row {}: {e}", i + 1)))
                .collect();
            let rows = rows?;
            if rows.is_empty() {
                return Err("CSV has a header but no data rows".into());
            }
            Ok(Table::Solve(rows))
        }
        other => Err(format!("unrecognized CSV header: '{other}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row() -> SimRow {
        SimRow {
            scenario: "capture".into(),
            n: 10,
            lambda: 1.0,
            p: Some(1.0),
            q: Some(1.0),
            seed: 42,
            replication: 0,
            horizon: 10000.0,
            v1_hat: Some(5.25),
            vn_hat: Some(9.875),
            va_hat: None,
            events: Some(110123),
            v1_mean: None,
            v1_stderr: None,
            vn_mean: None,
            vn_stderr: None,
            va_mean: None,
            va_stderr: None,
        }
    }

    #[test]
    fn sim_row_round_trips() {
        let row = sample_row();
        let parsed = SimRow::from_line(&row.to_line()).unwrap();
        assert_eq!(parsed, row);
    }

    #[test]
    fn table_parse_detects_schema() {
        let text = format!("# aoi-gossip test\n{}\n{}\n", SIM_HEADER, sample_row().to_line());
        match parse_table(&text).unwrap() {
            Table::Sim(rows) => assert_eq!(rows.len(), 1),
            _ => panic!("wrong table kind"),
        }
        assert!(parse_table("").is_err());
        assert!(parse_table("a,b,c\n1,2,3\n").is_err());
        let headless = format!("{SIM_HEADER}\n");
        assert!(parse_table(&headless).is_err(), "no data rows must fail");
    }

    #[test]
    fn solve_row_round_trips() {
        let row = SolveRow {
            scenario: "mitm".into(),
            n: 100,
            lambda: 1.0,
            p: None,
            q: None,
            v1: 39.99353809165709,
            vn: None,
            va: Some(100.0),
            vskn_min: Some(50.753768844221106),
            vskn_max: Some(95.91954085331876),
            v1_asym_p1: None,
            v1_asym_p0: None,
            v1_lower: None,
            v1_upper: None,
        };
        let parsed = SolveRow::from_line(&row.to_line()).unwrap();
        assert_eq!(parsed, row);
    }

    #[test]
    fn float_formatting_is_locale_free() {
        assert_eq!(fmt_opt(Some(0.5)), "0.5");
        assert_eq!(fmt_opt(Some(1234.0)), "1234");
        assert_eq!(fmt_opt(None), "");
    }
}
