//! Post-processing of a solution set: divisibility properties, repeated
//! sigma values, the cube-root growth fit, and the two-line band check.
//!
//! Everything here takes the solutions as an in-order slice; nothing
//! re-derives sigma, so the input's integrity is the caller's business
//! (the search and the fixture loaders both guarantee it).

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::search::Solution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("growth fit needs at least 2 solutions, got {got}")]
    NotEnoughData { got: usize },
}

/// Divisibility facts across a solution set.  The named vectors list the
/// exceptions, which stay short: divisibility is the rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub total_solutions: u64,
    /// n where 6 does not divide the shared sigma value.
    pub not_div_by_6: Vec<u64>,
    /// n where 4 does not divide the shared sigma value.
    pub not_div_by_4: Vec<u64>,
    /// n where 8 does not divide the shared sigma value.
    pub not_div_by_8: Vec<u64>,
    /// Solutions whose shared sigma is exactly 2^a * 3^b.
    pub pow23_hits: Vec<Pow23Hit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pow23Hit {
    pub n: u64,
    pub sigma: u64,
    pub a: u32,
    pub b: u32,
}

pub fn property_report(solutions: &[Solution]) -> PropertyReport {
    let mut report = PropertyReport {
        total_solutions: solutions.len() as u64,
        not_div_by_6: Vec::new(),
        not_div_by_4: Vec::new(),
        not_div_by_8: Vec::new(),
        pow23_hits: Vec::new(),
    };
    for s in solutions {
        if s.sigma % 6 != 0 {
            report.not_div_by_6.push(s.n);
        }
        if s.sigma % 4 != 0 {
            report.not_div_by_4.push(s.n);
        }
        if s.sigma % 8 != 0 {
            report.not_div_by_8.push(s.n);
        }
        let mut rest = s.sigma;
        let a = rest.trailing_zeros();
        rest >>= a;
        let mut b = 0u32;
        while rest % 3 == 0 {
            rest /= 3;
            b += 1;
        }
        if rest == 1 {
            report.pow23_hits.push(Pow23Hit {
                n: s.n,
                sigma: s.sigma,
                a,
                b,
            });
        }
    }
    report
}

/// Solutions sharing one sigma value, in index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepeatGroup {
    pub sigma: u64,
    pub members: Vec<RepeatMember>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RepeatMember {
    pub n: u64,
    pub index: u64,
}

/// One unordered pair out of a repeat group, in the reference table's
/// column layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RepeatPair {
    pub sigma: u64,
    pub n: u64,
    pub index_n: u64,
    pub n_plus_k: u64,
    pub index_n_plus_k: u64,
    pub k: u64,
}

/// Groups of solutions with equal sigma, ascending by sigma.  Only sigma
/// values hit at least twice appear.
pub fn find_repeats(solutions: &[Solution]) -> Vec<RepeatGroup> {
    let mut by_sigma: std::collections::BTreeMap<u64, Vec<RepeatMember>> =
        std::collections::BTreeMap::new();
    for s in solutions {
        by_sigma.entry(s.sigma).or_default().push(RepeatMember {
            n: s.n,
            index: s.index,
        });
    }
    by_sigma
        .into_iter()
        .filter(|(_, members)| members.len() > 1)
        .map(|(sigma, mut members)| {
            members.sort_by_key(|m| m.n);
            RepeatGroup { sigma, members }
        })
        .collect()
}

/// Header of the repeat-pair CSV layout.
pub const REPEAT_CSV_HEADER: &str = "sigma,n,index_n,n_plus_k,index_n_plus_k,k";

/// One CSV row per repeat pair, in the reference table's column order.
pub fn write_repeat_pairs_csv<W: Write>(mut w: W, pairs: &[RepeatPair]) -> std::io::Result<()> {
    writeln!(w, "{REPEAT_CSV_HEADER}")?;
    for p in pairs {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.sigma, p.n, p.index_n, p.n_plus_k, p.index_n_plus_k, p.k
        )?;
    }
    Ok(())
}

/// Every unordered pair within each group: a group of m members yields
/// m-choose-2 rows, so a triple contributes three.
pub fn repeat_pairs(groups: &[RepeatGroup]) -> Vec<RepeatPair> {
    let mut out = Vec::new();
    for g in groups {
        for i in 0..g.members.len() {
            for j in i + 1..g.members.len() {
                let (a, b) = (g.members[i], g.members[j]);
                out.push(RepeatPair {
                    sigma: g.sigma,
                    n: a.n,
                    index_n: a.index,
                    n_plus_k: b.n,
                    index_n_plus_k: b.index,
                    k: b.n - a.n,
                });
            }
        }
    }
    out
}

/// Least-squares coefficients of index against cube root of n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitCoefficients {
    pub slope: f64,
    pub intercept: f64,
}

/// The published coefficients for the solution counting function,
/// count(n) ~ slope * n^(1/3) + intercept.
pub const REFERENCE_FIT: FitCoefficients = FitCoefficients {
    slope: 0.5088,
    intercept: 6.9183,
};

/// Ordinary least squares of the solution index i against n_i^(1/3), one
/// point per solution.
pub fn fit_growth(solutions: &[Solution]) -> Result<FitCoefficients, AnalysisError> {
    if solutions.len() < 2 {
        return Err(AnalysisError::NotEnoughData {
            got: solutions.len(),
        });
    }
    let m = solutions.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for s in solutions {
        let x = (s.n as f64).cbrt();
        let y = s.index as f64;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = m * sxx - sx * sx;
    if denom == 0.0 {
        return Err(AnalysisError::NotEnoughData {
            got: solutions.len(),
        });
    }
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    Ok(FitCoefficients { slope, intercept })
}

/// Predicted number of solutions up to x under the fitted growth law.
pub fn estimate_count(x: f64, fit: &FitCoefficients) -> f64 {
    fit.slope * x.cbrt() + fit.intercept
}

/// Relative residual of one solution against the fitted curve:
/// (i - y_adj) / i with y_adj = slope * n^(1/3) + intercept.
pub fn relative_residual(s: &Solution, fit: &FitCoefficients) -> f64 {
    let y = s.index as f64;
    (y - estimate_count(s.n as f64, fit)) / y
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSummary {
    /// Solutions at or past the threshold that entered the summary.
    pub samples: u64,
    pub max_abs_eps: f64,
    /// The n attaining it.
    pub at_n: u64,
}

/// Largest |relative residual| over solutions with n >= threshold.
pub fn max_residual(
    solutions: &[Solution],
    fit: &FitCoefficients,
    threshold_n: u64,
) -> Option<ResidualSummary> {
    let mut best: Option<ResidualSummary> = None;
    let mut samples = 0u64;
    for s in solutions.iter().filter(|s| s.n >= threshold_n) {
        samples += 1;
        let eps = relative_residual(s, fit).abs();
        if best.is_none_or(|b| eps > b.max_abs_eps) {
            best = Some(ResidualSummary {
                samples: 0,
                max_abs_eps: eps,
                at_n: s.n,
            });
        }
    }
    best.map(|b| ResidualSummary { samples, ..b })
}

/// The two straight lines bracketing the counting function on a cube-root
/// axis, and the last solutions wandering outside them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandReport {
    pub lower_coefficient: f64,
    pub upper_coefficient: f64,
    /// Last n whose index falls below lower_coefficient * n^(1/3).
    pub last_n_below_lower: Option<u64>,
    /// Last n whose index rises above upper_coefficient * n^(1/3).
    pub last_n_above_upper: Option<u64>,
}

pub fn band_check(solutions: &[Solution], lower: f64, upper: f64) -> BandReport {
    let mut below = None;
    let mut above = None;
    for s in solutions {
        let root = (s.n as f64).cbrt();
        let y = s.index as f64;
        if y < lower * root {
            below = Some(s.n);
        }
        if y > upper * root {
            above = Some(s.n);
        }
    }
    BandReport {
        lower_coefficient: lower,
        upper_coefficient: upper,
        last_n_below_lower: below,
        last_n_above_upper: above,
    }
}

/// The full analysis in one JSON-serializable bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub properties: PropertyReport,
    pub repeats: Vec<RepeatGroup>,
    pub fit: FitSection,
    pub band: BandReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSection {
    pub slope: f64,
    pub intercept: f64,
    pub sample_count: u64,
    pub eps_threshold_n: u64,
    pub max_abs_eps_beyond_threshold: Option<f64>,
    pub max_eps_at_n: Option<u64>,
}

pub const DEFAULT_EPS_THRESHOLD_N: u64 = 792_855;
pub const DEFAULT_BAND_LOWER: f64 = 0.50;
pub const DEFAULT_BAND_UPPER: f64 = 0.55;

pub fn analyze(
    solutions: &[Solution],
    eps_threshold_n: u64,
) -> Result<AnalysisReport, AnalysisError> {
    let fit = fit_growth(solutions)?;
    let residual = max_residual(solutions, &fit, eps_threshold_n);
    Ok(AnalysisReport {
        properties: property_report(solutions),
        repeats: find_repeats(solutions),
        fit: FitSection {
            slope: fit.slope,
            intercept: fit.intercept,
            sample_count: solutions.len() as u64,
            eps_threshold_n,
            max_abs_eps_beyond_threshold: residual.map(|r| r.max_abs_eps),
            max_eps_at_n: residual.map(|r| r.at_n),
        },
        band: band_check(solutions, DEFAULT_BAND_LOWER, DEFAULT_BAND_UPPER),
    })
}

/// Plot-ready series: one row per solution with the band lines and the
/// fitted curve evaluated at its n.
pub fn write_plot_series<W: Write>(
    mut w: W,
    solutions: &[Solution],
    fit: &FitCoefficients,
    lower: f64,
    upper: f64,
) -> std::io::Result<()> {
    writeln!(w, "n,count,y1,y2,y_adj,epsilon")?;
    for s in solutions {
        let root = (s.n as f64).cbrt();
        let y_adj = fit.slope * root + fit.intercept;
        let eps = (s.index as f64 - y_adj) / s.index as f64;
        writeln!(
            w,
            "{},{},{:.6},{:.6},{:.6},{:.6}",
            s.n,
            s.index,
            lower * root,
            upper * root,
            y_adj,
            eps
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(n: u64, sigma: u64, index: u64) -> Solution {
        Solution { n, sigma, index }
    }

    fn toy_set() -> Vec<Solution> {
        // The first nine solutions with their true sigmas.
        [
            (14, 24),
            (206, 312),
            (957, 1440),
            (1334, 2160),
            (1364, 2688),
            (1634, 2640),
            (2685, 4320),
            (2974, 4464),
            (4364, 7644),
        ]
        .iter()
        .enumerate()
        .map(|(i, &(n, s))| sol(n, s, i as u64 + 1))
        .collect()
    }

    #[test]
    fn properties_of_the_first_solutions() {
        let report = property_report(&toy_set());
        assert_eq!(report.total_solutions, 9);
        assert!(report.not_div_by_6.is_empty());
        assert!(report.not_div_by_4.is_empty());
        assert_eq!(report.not_div_by_8, vec![4364]);
        assert_eq!(
            report.pow23_hits,
            vec![Pow23Hit {
                n: 14,
                sigma: 24,
                a: 3,
                b: 1
            }]
        );
    }

    #[test]
    fn divisibility_exceptions_are_detected() {
        // sigma(18873) = 28314 = 2 * 3^2 * 11^2 * 13 carries a single
        // factor of 2, so 4 and 8 both miss while 6 still divides.
        let report = property_report(&[sol(18873, 28314, 1)]);
        assert_eq!(report.not_div_by_4, vec![18873]);
        assert_eq!(report.not_div_by_8, vec![18873]);
        assert!(report.not_div_by_6.is_empty());
    }

    #[test]
    fn pow23_exponents() {
        // sigma(147454) = 221184 = 2^13 * 3^3.
        let report = property_report(&[sol(147454, 221184, 1)]);
        assert_eq!(
            report.pow23_hits,
            vec![Pow23Hit {
                n: 147454,
                sigma: 221184,
                a: 13,
                b: 3
            }]
        );
        // 4464 = 2^4 * 3^2 * 31 is not a pure 2-3 product.
        let report = property_report(&[sol(2974, 4464, 1)]);
        assert!(report.pow23_hits.is_empty());
    }

    #[test]
    fn repeats_group_and_pair_up() {
        let solutions = vec![
            sol(10, 100, 1),
            sol(20, 100, 2),
            sol(30, 50, 3),
            sol(40, 100, 4),
            sol(50, 70, 5),
            sol(60, 70, 6),
        ];
        let groups = find_repeats(&solutions);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].sigma, 70);
        assert_eq!(groups[1].sigma, 100);
        assert_eq!(groups[1].members.len(), 3);

        let pairs = repeat_pairs(&groups);
        assert_eq!(pairs.len(), 1 + 3);
        let mut buf = Vec::new();
        write_repeat_pairs_csv(&mut buf, &pairs[..1]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "sigma,n,index_n,n_plus_k,index_n_plus_k,k\n70,50,5,60,6,10\n"
        );
        assert_eq!(
            pairs[0],
            RepeatPair {
                sigma: 70,
                n: 50,
                index_n: 5,
                n_plus_k: 60,
                index_n_plus_k: 6,
                k: 10
            }
        );
        // The triple yields (1,2), (1,3), (2,3) in that order.
        let triple: Vec<(u64, u64)> = pairs[1..].iter().map(|p| (p.n, p.n_plus_k)).collect();
        assert_eq!(triple, vec![(10, 20), (10, 40), (20, 40)]);
    }

    #[test]
    fn no_repeats_among_distinct_sigmas() {
        assert!(find_repeats(&toy_set()[..4]).is_empty());
    }

    #[test]
    fn fit_recovers_an_exact_linear_relation() {
        // Construct points lying exactly on i = 2 * n^(1/3) + 3 by using
        // cubes for n.
        let solutions: Vec<Solution> = (1..=20u64).map(|t| sol(t * t * t, 1, 2 * t + 3)).collect();
        let fit = fit_growth(&solutions).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9, "slope {}", fit.slope);
        assert!(
            (fit.intercept - 3.0).abs() < 1e-9,
            "intercept {}",
            fit.intercept
        );
        assert!((estimate_count(27.0, &fit) - 9.0).abs() < 1e-9);
    }

    #[test]
    fn fit_needs_two_points() {
        assert!(matches!(
            fit_growth(&[]),
            Err(AnalysisError::NotEnoughData { got: 0 })
        ));
        assert!(matches!(
            fit_growth(&toy_set()[..1]),
            Err(AnalysisError::NotEnoughData { got: 1 })
        ));
    }

    #[test]
    fn residuals_and_band_on_synthetic_data() {
        let fit = FitCoefficients {
            slope: 1.0,
            intercept: 0.0,
        };
        // n = 1000: root 10. Index 12 -> eps = (12 - 10)/12 = 1/6.
        let s = sol(1000, 1, 12);
        assert!((relative_residual(&s, &fit) - 2.0 / 12.0).abs() < 1e-12);

        let solutions = vec![sol(1000, 1, 4), sol(8000, 1, 25), sol(27000, 1, 16)];
        // Band 0.5..0.55: indices vs 5/10/15 and 5.5/11/16.5.
        let band = band_check(&solutions, 0.5, 0.55);
        assert_eq!(band.last_n_below_lower, Some(1000));
        assert_eq!(band.last_n_above_upper, Some(8000));

        let none = band_check(&[sol(1000, 1, 5)], 0.4, 0.6);
        assert_eq!(none.last_n_below_lower, None);
        assert_eq!(none.last_n_above_upper, None);

        // eps values: (4-10)/4 = -1.5, (25-20)/25 = 0.2, (16-30)/16 = -0.875.
        let residual = max_residual(&solutions, &fit, 0).unwrap();
        assert_eq!(residual.samples, 3);
        assert_eq!(residual.at_n, 1000);
        assert!((residual.max_abs_eps - 1.5).abs() < 1e-12);
        let residual = max_residual(&solutions, &fit, 20000).unwrap();
        assert_eq!(residual.samples, 1);
        assert_eq!(residual.at_n, 27000);
        assert!(max_residual(&solutions, &fit, 30000).is_none());
    }

    #[test]
    fn plot_series_layout() {
        let mut buf = Vec::new();
        let fit = FitCoefficients {
            slope: 0.5,
            intercept: 1.0,
        };
        write_plot_series(&mut buf, &toy_set()[..1], &fit, 0.5, 0.55).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,count,y1,y2,y_adj,epsilon"));
        let row = lines.next().unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], "14");
        assert_eq!(fields[1], "1");
        // y1 = 0.5 * 14^(1/3) = 1.205071...
        assert_eq!(fields[2], "1.205071");
        assert_eq!(fields.len(), 6);
    }

    #[test]
    fn report_assembles_all_sections() {
        let report = analyze(&toy_set(), 0).unwrap();
        assert_eq!(report.properties.total_solutions, 9);
        assert!(report.repeats.is_empty());
        assert_eq!(report.fit.sample_count, 9);
        assert!(report.fit.max_abs_eps_beyond_threshold.is_some());
        let json = serde_json::to_value(&report).unwrap();
        for key in ["properties", "repeats", "fit", "band"] {
            assert!(json.get(key).is_some(), "missing section {key}");
        }
    }
}
