use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

/// Granularity of a temporal column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Year,
    Month,
    Day,
}

/// ISO calendar date at year, month or day precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimePoint {
    pub year: i32,
    pub month: Option<u32>,
    pub day: Option<u32>,
}

impl TimePoint {
    pub fn year(year: i32) -> Self {
        Self {
            year,
            month: None,
            day: None,
        }
    }

    /// Parses `YYYY`, `YYYY-MM` or `YYYY-MM-DD`.
    pub fn parse(s: &str) -> Option<Self> {
        let bytes = s.as_bytes();
        let digits = |r: std::ops::Range<usize>| bytes[r].iter().all(u8::is_ascii_digit);
        match bytes.len() {
            4 if digits(0..4) => Some(Self::year(s.parse().ok()?)),
            7 if digits(0..4) && bytes[4] == b'-' && digits(5..7) => {
                let month: u32 = s[5..7].parse().ok()?;
                (1..=12).contains(&month).then(|| Self {
                    year: s[..4].parse().unwrap_or_default(),
                    month: Some(month),
                    day: None,
                })
            }
            10 if digits(0..4) && bytes[4] == b'-' && digits(5..7) && bytes[7] == b'-' && digits(8..10) => {
                let date = NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()?;
                Some(Self {
                    year: date.year(),
                    month: Some(date.month()),
                    day: Some(date.day()),
                })
            }
            _ => None,
        }
    }

    pub fn unit(&self) -> TimeUnit {
        match (self.month, self.day) {
            (_, Some(_)) => TimeUnit::Day,
            (Some(_), None) => TimeUnit::Month,
            _ => TimeUnit::Year,
        }
    }

    /// Integer position on the `unit` axis. Coarser points sit at the start
    /// of their period.
    pub fn ordinal(&self, unit: TimeUnit) -> i64 {
        let month = self.month.unwrap_or(1);
        match unit {
            TimeUnit::Year => self.year as i64,
            TimeUnit::Month => self.year as i64 * 12 + (month as i64 - 1),
            TimeUnit::Day => NaiveDate::from_ymd_opt(self.year, month, self.day.unwrap_or(1))
                .map(|d| d.num_days_from_ce() as i64)
                .unwrap_or_default(),
        }
    }

    pub fn from_ordinal(ordinal: i64, unit: TimeUnit) -> Self {
        match unit {
            TimeUnit::Year => Self::year(ordinal as i32),
            TimeUnit::Month => Self {
                year: ordinal.div_euclid(12) as i32,
                month: Some(ordinal.rem_euclid(12) as u32 + 1),
                day: None,
            },
            TimeUnit::Day => {
                let d = NaiveDate::from_num_days_from_ce_opt(ordinal as i32).unwrap_or_default();
                Self {
                    year: d.year(),
                    month: Some(d.month()),
                    day: Some(d.day()),
                }
            }
        }
    }
}

impl std::fmt::Display for TimePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:04}", self.year)?;
        if let Some(m) = self.month {
            write!(f, "-{m:02}")?;
        }
        if let Some(d) = self.day {
            write!(f, "-{d:02}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_iso_forms() {
        assert_eq!(TimePoint::parse("1918"), Some(TimePoint::year(1918)));
        assert_eq!(TimePoint::parse("2020-02").unwrap().to_string(), "2020-02");
        assert_eq!(TimePoint::parse("2020-02-29").unwrap().to_string(), "2020-02-29");
        for bad in ["2021-02-29", "2020-13", "191", "19180", "-0.3", "2020/01", "20a0"] {
            assert_eq!(TimePoint::parse(bad), None, "{bad}");
        }
    }

    #[test]
    fn ordinals_round_trip() {
        for s in ["1999-12", "2000-01", "0001-01"] {
            let t = TimePoint::parse(s).unwrap();
            assert_eq!(TimePoint::from_ordinal(t.ordinal(TimeUnit::Month), TimeUnit::Month), t);
        }
        let t = TimePoint::parse("2024-03-01").unwrap();
        let prev = TimePoint::from_ordinal(t.ordinal(TimeUnit::Day) - 1, TimeUnit::Day);
        assert_eq!(prev.to_string(), "2024-02-29");
        // A bare year sits at January on the month axis.
        assert_eq!(TimePoint::year(2000).ordinal(TimeUnit::Month), 2000 * 12);
    }
}
