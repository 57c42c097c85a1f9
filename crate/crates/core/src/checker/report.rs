//! Human- and CSV-readable statistics.

use std::fmt::Write;
use std::time::Duration;

use super::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

pub const CSV_HEADER: &str =
    "verdict,strategy,negated,engine,complements,complement_ms_list,stage_sizes,states_explored,total_ms";

pub(crate) fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

/// Complement times in milliseconds, `;`-separated.
pub(crate) fn complement_ms_list(v: &Verdict) -> String {
    v.stats.complement_times.iter().map(|d| ms(*d)).collect::<Vec<_>>().join(";")
}

/// State counts of all stages, `;`-separated.
pub(crate) fn stage_sizes(v: &Verdict) -> String {
    v.stats.stages.iter().map(|s| s.states.to_string()).collect::<Vec<_>>().join(";")
}

/// Renders the statistics of `v`. The CSV form is a header line followed by
/// one data line.
pub fn stats_report(v: &Verdict, format: ReportFormat) -> String {
    let s = &v.stats;
    let verdict = if v.holds { "HOLDS" } else { "FAILS" };
    let engine = s.inclusion.as_ref().map_or("-", |i| i.engine.as_str());
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            let explored = s.inclusion.as_ref().map_or(0, |i| i.states_explored);
            writeln!(out, "{CSV_HEADER}").unwrap();
            writeln!(
                out,
                "{verdict},{},{},{engine},{},{},{},{explored},{}",
                s.strategy,
                s.negated,
                s.complements,
                complement_ms_list(v),
                stage_sizes(v),
                ms(s.total)
            )
            .unwrap();
        }
        ReportFormat::Text => {
            writeln!(out, "verdict      {verdict}").unwrap();
            let negated = if s.negated { " (checked the negation)" } else { "" };
            writeln!(out, "strategy     {}{negated}", s.strategy).unwrap();
            writeln!(out, "complements  {}", s.complements).unwrap();
            for (i, d) in s.complement_times.iter().enumerate() {
                writeln!(out, "  #{}  {} ms", i + 1, ms(*d)).unwrap();
            }
            writeln!(out, "stages").unwrap();
            for st in &s.stages {
                writeln!(
                    out,
                    "  {:<18} arity {:<2} states {:<7} transitions {:<8} {} ms",
                    st.step,
                    st.arity,
                    st.states,
                    st.transitions,
                    ms(st.elapsed)
                )
                .unwrap();
            }
            if let Some(i) = &s.inclusion {
                write!(out, "inclusion    {engine}, {} states explored, {} ms", i.states_explored, ms(i.elapsed)).unwrap();
                if let Some(c) = i.complement_time {
                    write!(out, " ({} ms complementing)", ms(c)).unwrap();
                }
                writeln!(out).unwrap();
            }
            writeln!(out, "total        {} ms", ms(s.total)).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{Stage, Stats, Strategy};
    use crate::inclusion::InclusionStats;

    fn verdict(holds: bool, stats: Stats) -> Verdict {
        Verdict {
            holds,
            witness: None,
            stats,
        }
    }

    fn stage(step: &str, states: usize) -> Stage {
        Stage {
            step: step.into(),
            arity: 1,
            states,
            transitions: 2 * states,
            elapsed: Duration::from_micros(1500),
        }
    }

    #[test]
    fn csv_of_empty_stats() {
        let out = stats_report(&verdict(true, Stats::default()), ReportFormat::Csv);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines, [CSV_HEADER, "HOLDS,auto,false,-,0,,,0,0.000"]);
    }

    #[test]
    fn csv_lists_complements_and_stages() {
        let stats = Stats {
            strategy: Strategy::PureAbv,
            complements: 2,
            complement_times: vec![Duration::from_millis(2), Duration::from_micros(250)],
            stages: vec![stage("body", 4), stage("complement", 9)],
            total: Duration::from_millis(7),
            ..Stats::default()
        };
        let out = stats_report(&verdict(false, stats), ReportFormat::Csv);
        assert_eq!(out.lines().nth(1), Some("FAILS,pure-abv,false,-,2,2.000;0.250,4;9,0,7.000"));
        assert_eq!(out.lines().nth(1).unwrap().split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn text_mentions_negation_and_inclusion() {
        let stats = Stats {
            strategy: Strategy::Inclusion,
            negated: true,
            stages: vec![stage("self-composition", 3)],
            inclusion: Some(InclusionStats {
                engine: "antichain".into(),
                states_explored: 12,
                elapsed: Duration::from_millis(1),
                complement_time: None,
            }),
            ..Stats::default()
        };
        let out = stats_report(&verdict(true, stats), ReportFormat::Text);
        assert!(out.starts_with("verdict      HOLDS\n"));
        assert!(out.contains("(checked the negation)"));
        assert!(out.contains("self-composition"));
        assert!(out.contains("antichain, 12 states explored"));
    }
}
