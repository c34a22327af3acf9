//! Standard financial ratios per firm and per group.
//!
//! Two account schemes are supported: the 4-part scheme (revenues, costs,
//! liabilities, assets) behind classical turnover/margin/leverage/ROE, and a
//! 6-part scheme splitting assets and liabilities into current and
//! non-current. Group averages are ratios of per-part geometric means, which
//! coincide with geometric means of per-firm ratios; ratios whose derived
//! denominator (equity) is not strictly positive come back as a typed
//! undefined value rather than a signed surprise.

use crate::composition::{CompositionalCentre, CompositionSet, PartLabel};
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Dupont4,
    Balance6,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Dupont4 => "dupont4",
            SchemeKind::Balance6 => "balance6",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "dupont4" => Ok(SchemeKind::Dupont4),
            "balance6" => Ok(SchemeKind::Balance6),
            other => Err(CoreError::Shape(format!(
                "unknown scheme '{other}' (expected 'dupont4' or 'balance6')"
            ))),
        }
    }

    pub fn part_count(&self) -> usize {
        match self {
            SchemeKind::Dupont4 => 4,
            SchemeKind::Balance6 => 6,
        }
    }

    /// Scheme roles in their canonical order.
    pub fn roles(&self) -> &'static [&'static str] {
        match self {
            SchemeKind::Dupont4 => &["revenues", "costs", "liabilities", "assets"],
            SchemeKind::Balance6 => &[
                "non_current_assets",
                "current_assets",
                "non_current_liabilities",
                "current_liabilities",
                "revenues",
                "costs",
            ],
        }
    }
}

/// Maps each scheme role to a concrete part name.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioScheme {
    pub kind: SchemeKind,
    /// Part name per role, aligned with `kind.roles()`.
    role_parts: Vec<String>,
}

impl RatioScheme {
    pub fn new(kind: SchemeKind, role_parts: Vec<String>) -> Result<Self> {
        if role_parts.len() != kind.part_count() {
            return Err(CoreError::Shape(format!(
                "scheme {} needs {} part names, got {}",
                kind.name(),
                kind.part_count(),
                role_parts.len()
            )));
        }
        for (i, p) in role_parts.iter().enumerate() {
            if role_parts[..i].contains(p) {
                return Err(CoreError::DuplicatePart(p.clone()));
            }
        }
        Ok(Self { kind, role_parts })
    }

    /// Positional mapping: the set's first D parts fill the roles in order.
    pub fn positional(kind: SchemeKind, parts: &[PartLabel]) -> Result<Self> {
        if parts.len() != kind.part_count() {
            return Err(CoreError::Shape(format!(
                "scheme {} needs {} parts, the set has {}",
                kind.name(),
                kind.part_count(),
                parts.len()
            )));
        }
        Self::new(kind, parts.iter().map(|p| p.name.clone()).collect())
    }

    pub fn role_part(&self, role: &str) -> Option<&str> {
        self.kind
            .roles()
            .iter()
            .position(|r| *r == role)
            .map(|i| self.role_parts[i].as_str())
    }

    /// Resolves role part names to indices within `parts`.
    fn resolve(&self, parts: &[PartLabel]) -> Result<Vec<usize>> {
        self.role_parts
            .iter()
            .map(|name| {
                parts
                    .iter()
                    .position(|p| &p.name == name)
                    .ok_or_else(|| CoreError::UnknownPart(name.clone()))
            })
            .collect()
    }

    /// Standard ratios of one labelled composition (firm row or centre).
    pub fn ratios_for(&self, parts: &[PartLabel], values: &[f64]) -> Result<StandardRatios> {
        if parts.len() != values.len() {
            return Err(CoreError::Shape(format!(
                "{} labels for {} values",
                parts.len(),
                values.len()
            )));
        }
        let idx = self.resolve(parts)?;
        let v = |role: usize| values[idx[role]];
        // A ratio is undefined when its derived denominator is not strictly
        // positive; raw parts are positive by construction.
        let div = |num: f64, den: f64| if den > 0.0 { Some(num / den) } else { None };
        let entries = match self.kind {
            SchemeKind::Dupont4 => {
                let (rev, cost, liab, assets) = (v(0), v(1), v(2), v(3));
                let equity = assets - liab;
                vec![
                    ("turnover".to_string(), div(rev, assets)),
                    ("margin".to_string(), div(rev - cost, rev)),
                    ("leverage".to_string(), div(assets, equity)),
                    ("roe".to_string(), div(rev - cost, equity)),
                ]
            }
            SchemeKind::Balance6 => {
                let (nca, ca, ncl, cl, rev, cost) = (v(0), v(1), v(2), v(3), v(4), v(5));
                let assets = nca + ca;
                let liabilities = ncl + cl;
                let equity = assets - liabilities;
                let profit = rev - cost;
                vec![
                    ("turnover".to_string(), div(rev, assets)),
                    ("current_asset_turnover".to_string(), div(rev, ca)),
                    ("margin".to_string(), div(profit, rev)),
                    ("leverage".to_string(), div(assets, equity)),
                    ("roa".to_string(), div(profit, assets)),
                    ("roe".to_string(), div(profit, equity)),
                    ("indebtedness".to_string(), div(liabilities, assets)),
                    ("current_ratio".to_string(), div(ca, cl)),
                    ("debt_maturity".to_string(), div(ncl, liabilities)),
                    ("asset_structure".to_string(), div(nca, assets)),
                ]
            }
        };
        Ok(StandardRatios { entries })
    }

    /// Standard ratios of a compositional centre.
    pub fn ratios_for_centre(&self, centre: &CompositionalCentre) -> Result<StandardRatios> {
        self.ratios_for(centre.parts(), centre.values())
    }
}

/// Named ratio values; `None` marks an undefined ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardRatios {
    pub entries: Vec<(String, Option<f64>)>,
}

impl StandardRatios {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .and_then(|(_, v)| *v)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }
}

/// One group row of a ratio table.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRatioRow {
    pub label: String,
    pub n: usize,
    pub centre: CompositionalCentre,
    pub ratios: StandardRatios,
}

/// Per-group centre ratios plus the overall row.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRatioTable {
    pub group_column: String,
    pub groups: Vec<GroupRatioRow>,
    pub overall: GroupRatioRow,
}

/// Geometric and arithmetic means of one pairwise ratio over selected rows.
/// The arithmetic column exists only as a diagnostic: it is incompatible
/// with ratio permutation and is never used in analysis paths.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioMeanDiagnostic {
    pub numerator: String,
    pub denominator: String,
    pub geometric: f64,
    pub arithmetic: f64,
}

impl CompositionSet {
    /// Standard ratios of one firm.
    pub fn firm_ratios(&self, row: usize, scheme: &RatioScheme) -> Result<StandardRatios> {
        let comp = self.row_composition(row)?;
        scheme.ratios_for(self.parts(), comp.values())
    }

    /// One centre-ratio row per value of a grouping column, plus overall.
    pub fn group_ratio_table(
        &self,
        scheme: &RatioScheme,
        group_column: &str,
    ) -> Result<GroupRatioTable> {
        let groups = self.group_indices(group_column)?;
        let mut rows = Vec::with_capacity(groups.len());
        for (label, idx) in groups {
            let centre = self.compositional_centre(Some(&idx))?;
            let ratios = scheme.ratios_for_centre(&centre)?;
            rows.push(GroupRatioRow {
                label,
                n: idx.len(),
                centre,
                ratios,
            });
        }
        let centre = self.compositional_centre(None)?;
        let ratios = scheme.ratios_for_centre(&centre)?;
        let overall = GroupRatioRow {
            label: "overall".to_string(),
            n: self.n(),
            centre,
            ratios,
        };
        Ok(GroupRatioTable {
            group_column: group_column.to_string(),
            groups: rows,
            overall,
        })
    }

    /// Geometric vs arithmetic mean of a pairwise ratio over selected rows.
    pub fn ratio_mean_diagnostic(
        &self,
        numerator: &str,
        denominator: &str,
        rows: Option<&[usize]>,
    ) -> Result<RatioMeanDiagnostic> {
        let num = self.part_index(numerator)?;
        let den = self.part_index(denominator)?;
        let idx = self.resolve_rows(rows)?;
        self.ensure_positive(&idx)?;
        let n = idx.len() as f64;
        let mut log_sum = 0.0;
        let mut plain_sum = 0.0;
        for &i in &idx {
            let ratio = self.value(i, num) / self.value(i, den);
            log_sum += ratio.ln();
            plain_sum += ratio;
        }
        Ok(RatioMeanDiagnostic {
            numerator: numerator.to_string(),
            denominator: denominator.to_string(),
            geometric: (log_sum / n).exp(),
            arithmetic: plain_sum / n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn labels(names: &[&str]) -> Vec<PartLabel> {
        names.iter().map(|n| PartLabel::bare(*n)).collect()
    }

    fn dupont_scheme() -> RatioScheme {
        RatioScheme::positional(SchemeKind::Dupont4, &labels(&["x1", "x2", "x3", "x4"])).unwrap()
    }

    #[test]
    fn dupont_ratio_arithmetic() {
        let scheme = dupont_scheme();
        let parts = labels(&["x1", "x2", "x3", "x4"]);
        // First bundled firm: revenues 10386, costs 12987, liabilities
        // 34048, assets 41456.
        let r = scheme
            .ratios_for(&parts, &[10386.0, 12987.0, 34048.0, 41456.0])
            .unwrap();
        assert_relative_eq!(
            r.get("turnover").unwrap(),
            10386.0 / 41456.0,
            max_relative = 1e-15
        );
        assert!((r.get("turnover").unwrap() - 0.2505).abs() < 5e-5);
    }

    #[test]
    fn equal_revenues_and_costs_give_zero_margin() {
        let scheme = dupont_scheme();
        let parts = labels(&["x1", "x2", "x3", "x4"]);
        let r = scheme
            .ratios_for(&parts, &[100.0, 100.0, 30.0, 80.0])
            .unwrap();
        assert_eq!(r.get("margin"), Some(0.0));
    }

    #[test]
    fn dupont_identity_holds_when_defined() {
        let scheme = dupont_scheme();
        let parts = labels(&["x1", "x2", "x3", "x4"]);
        let r = scheme
            .ratios_for(&parts, &[120.0, 80.0, 30.0, 90.0])
            .unwrap();
        let roe = r.get("roe").unwrap();
        let product =
            r.get("turnover").unwrap() * r.get("margin").unwrap() * r.get("leverage").unwrap();
        assert_relative_eq!(roe, product, max_relative = 1e-10);
    }

    #[test]
    fn non_positive_equity_is_undefined() {
        let scheme = dupont_scheme();
        let parts = labels(&["x1", "x2", "x3", "x4"]);
        // liabilities exceed assets -> equity < 0.
        let r = scheme
            .ratios_for(&parts, &[100.0, 90.0, 95.0, 80.0])
            .unwrap();
        assert_eq!(r.get("leverage"), None);
        assert_eq!(r.get("roe"), None);
        assert!(r.get("turnover").is_some());

        // equity exactly zero.
        let r = scheme
            .ratios_for(&parts, &[100.0, 90.0, 80.0, 80.0])
            .unwrap();
        assert_eq!(r.get("roe"), None);
    }

    #[test]
    fn balance6_ratio_names_and_arithmetic() {
        let parts = labels(&["x1", "x2", "x3", "x4", "x5", "x6"]);
        let scheme = RatioScheme::positional(SchemeKind::Balance6, &parts).unwrap();
        let values = [50.0, 30.0, 20.0, 10.0, 90.0, 70.0];
        let r = scheme.ratios_for(&parts, &values).unwrap();
        assert_eq!(r.entries.len(), 10);
        assert_relative_eq!(r.get("turnover").unwrap(), 90.0 / 80.0, max_relative = 1e-15);
        assert_relative_eq!(
            r.get("current_ratio").unwrap(),
            30.0 / 10.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            r.get("debt_maturity").unwrap(),
            20.0 / 30.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            r.get("asset_structure").unwrap(),
            50.0 / 80.0,
            max_relative = 1e-15
        );
        let roe = r.get("roe").unwrap();
        assert_relative_eq!(roe, 20.0 / 50.0, max_relative = 1e-15);
    }

    #[test]
    fn scheme_rejects_duplicate_roles() {
        let r = RatioScheme::new(
            SchemeKind::Dupont4,
            vec!["a".into(), "a".into(), "c".into(), "d".into()],
        );
        assert!(r.is_err());
    }

    #[test]
    fn group_table_has_one_row_per_group_plus_overall() {
        use crate::composition::ExtraColumn;
        let parts = labels(&["x1", "x2", "x3", "x4"]);
        let set = CompositionSet::new(
            parts,
            vec!["1".into(), "2".into(), "3".into()],
            vec![
                vec![10.0, 8.0, 3.0, 12.0],
                vec![20.0, 15.0, 6.0, 25.0],
                vec![12.0, 9.0, 4.0, 14.0],
            ],
            vec![ExtraColumn::numeric("g", vec![0.0, 1.0, 0.0])],
        )
        .unwrap();
        let table = set.group_ratio_table(&dupont_scheme(), "g").unwrap();
        assert_eq!(table.groups.len(), 2);
        assert_eq!(table.groups[0].label, "0");
        assert_eq!(table.groups[0].n, 2);
        assert_eq!(table.overall.n, 3);

        // Degenerate grouping: a single group equals the overall row.
        let single = set
            .with_extra(ExtraColumn::numeric("one", vec![1.0, 1.0, 1.0]))
            .unwrap();
        let t = single.group_ratio_table(&dupont_scheme(), "one").unwrap();
        assert_eq!(t.groups.len(), 1);
        assert_eq!(
            t.groups[0].centre.values(),
            t.overall.centre.values()
        );
    }

    #[test]
    fn mean_diagnostic_matches_toy_counterexample() {
        // Firms 4,5,6 of the toy data: ratios x2/x1 are 1, 100, 10000.
        let x1 = [1e3, 1e2, 1e1];
        let x2 = [1e3, 1e4, 1e5];
        let set = CompositionSet::new(
            labels(&["x1", "x2"]),
            vec!["4".into(), "5".into(), "6".into()],
            x1.iter().zip(x2.iter()).map(|(&a, &b)| vec![a, b]).collect(),
            vec![],
        )
        .unwrap();
        let d = set.ratio_mean_diagnostic("x2", "x1", None).unwrap();
        assert_relative_eq!(d.geometric, 100.0, max_relative = 1e-12);
        assert_relative_eq!(d.arithmetic, 3367.0, max_relative = 1e-12);
        let inv = set.ratio_mean_diagnostic("x1", "x2", None).unwrap();
        assert_relative_eq!(inv.geometric, 0.01, max_relative = 1e-12);
        assert_relative_eq!(inv.arithmetic, 0.3367, max_relative = 1e-10);
    }
}
