//! Pairwise log-ratio choice as a graph over parts.
//!
//! A set of D-1 pairwise log-ratios carries the full relative information of
//! a D-part composition exactly when the ratios, viewed as edges over the
//! parts, form a connected acyclic graph. Any other pairwise log-ratio is
//! then a signed sum of edge ratios along the unique path between its two
//! parts. Edge direction (arrow toward the numerator) is interpretation
//! only; connectivity and cycles are judged on the undirected view.

use crate::composition::{Composition, PartLabel};
use crate::error::{CoreError, Result};
use crate::transforms::LogRatioSpec;

/// Parts as vertices, named log-ratios as edges.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRatioGraph {
    parts: Vec<PartLabel>,
    edges: Vec<LogRatioSpec>,
}

/// Why a graph fails to be a spanning tree of the parts.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDiagnosis {
    pub edge_count: usize,
    pub expected_edge_count: usize,
    /// Connected components by part name, when there is more than one.
    pub components: Vec<Vec<String>>,
    /// One witness cycle by part name, when any cycle exists.
    pub cycle: Option<Vec<String>>,
}

impl std::fmt::Display for GraphDiagnosis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut reasons = Vec::new();
        if self.edge_count != self.expected_edge_count {
            reasons.push(format!(
                "{} edges, expected {}",
                self.edge_count, self.expected_edge_count
            ));
        }
        if self.components.len() > 1 {
            let comps: Vec<String> = self
                .components
                .iter()
                .map(|c| format!("{{{}}}", c.join(", ")))
                .collect();
            reasons.push(format!("disconnected components {}", comps.join(", ")));
        }
        if let Some(cycle) = &self.cycle {
            reasons.push(format!("cycle {{{}}}", cycle.join(", ")));
        }
        write!(f, "{}", reasons.join("; "))
    }
}

/// Outcome of [`LogRatioGraph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum GraphValidation {
    Valid,
    Invalid(GraphDiagnosis),
}

impl GraphValidation {
    pub fn is_valid(&self) -> bool {
        matches!(self, GraphValidation::Valid)
    }
}

/// A target log-ratio expressed as a signed combination of graph edges.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationPath {
    pub target: LogRatioSpec,
    pub terms: Vec<DerivationTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivationTerm {
    pub edge: LogRatioSpec,
    /// +1 when the path traverses the edge toward its numerator, -1 against.
    pub coefficient: i8,
}

impl DerivationPath {
    /// Evaluates the signed sum of edge log-ratios on one composition.
    pub fn evaluate(&self, parts: &[PartLabel], composition: &Composition) -> Result<f64> {
        let index = |name: &str| {
            parts
                .iter()
                .position(|p| p.name == name)
                .ok_or_else(|| CoreError::UnknownPart(name.to_string()))
        };
        let values = composition.values();
        let mut total = 0.0;
        for term in &self.terms {
            let num = index(&term.edge.numerator)?;
            let den = index(&term.edge.denominator)?;
            total += f64::from(term.coefficient) * (values[num].ln() - values[den].ln());
        }
        Ok(total)
    }

    /// Formula like "y1 - y3" over edge names, positive terms first.
    pub fn formula(&self) -> String {
        let mut ordered: Vec<&DerivationTerm> =
            self.terms.iter().filter(|t| t.coefficient >= 0).collect();
        ordered.extend(self.terms.iter().filter(|t| t.coefficient < 0));
        let mut out = String::new();
        for (i, term) in ordered.iter().enumerate() {
            if term.coefficient >= 0 {
                if i > 0 {
                    out.push_str(" + ");
                }
            } else if i == 0 {
                out.push('-');
            } else {
                out.push_str(" - ");
            }
            out.push_str(&term.edge.name);
        }
        out
    }
}

impl LogRatioGraph {
    /// Builds a graph, rejecting unknown parts and duplicate unordered pairs
    /// (self-loops are already impossible for a [`LogRatioSpec`]).
    pub fn new(parts: Vec<PartLabel>, edges: Vec<LogRatioSpec>) -> Result<Self> {
        let find = |name: &str| parts.iter().any(|p| p.name == name);
        for e in &edges {
            if !find(&e.numerator) {
                return Err(CoreError::UnknownPart(e.numerator.clone()));
            }
            if !find(&e.denominator) {
                return Err(CoreError::UnknownPart(e.denominator.clone()));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            let dup = edges[..i].iter().any(|f| {
                (f.numerator == e.numerator && f.denominator == e.denominator)
                    || (f.numerator == e.denominator && f.denominator == e.numerator)
            });
            if dup {
                return Err(CoreError::InvalidGraph(format!(
                    "duplicate edge between '{}' and '{}'",
                    e.numerator, e.denominator
                )));
            }
        }
        Ok(Self { parts, edges })
    }

    pub fn parts(&self) -> &[PartLabel] {
        &self.parts
    }

    pub fn edges(&self) -> &[LogRatioSpec] {
        &self.edges
    }

    fn part_index(&self, name: &str) -> Result<usize> {
        self.parts
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| CoreError::UnknownPart(name.to_string()))
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        // adjacency[v] = (neighbour, edge index)
        let mut adj = vec![Vec::new(); self.parts.len()];
        for (ei, e) in self.edges.iter().enumerate() {
            let a = self.part_index(&e.numerator).expect("checked at build");
            let b = self.part_index(&e.denominator).expect("checked at build");
            adj[a].push((b, ei));
            adj[b].push((a, ei));
        }
        adj
    }

    /// Checks the spanning-tree conditions: D-1 edges, connected, acyclic.
    pub fn validate(&self) -> GraphValidation {
        let d = self.parts.len();
        let adj = self.adjacency();

        // Connected components via BFS on the undirected view.
        let mut component = vec![usize::MAX; d];
        let mut components: Vec<Vec<String>> = Vec::new();
        for start in 0..d {
            if component[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = Vec::new();
            let mut queue = std::collections::VecDeque::from([start]);
            component[start] = id;
            while let Some(v) = queue.pop_front() {
                members.push(self.parts[v].name.clone());
                for &(w, _) in &adj[v] {
                    if component[w] == usize::MAX {
                        component[w] = id;
                        queue.push_back(w);
                    }
                }
            }
            components.push(members);
        }

        let cycle = self.find_cycle(&adj);
        // Forest identity: a cycle exists iff |E| > |V| - #components. The
        // DFS witness must agree with the count.
        debug_assert_eq!(
            cycle.is_some(),
            self.edges.len() > d - components.len()
        );
        let valid =
            self.edges.len() == d.saturating_sub(1) && components.len() == 1 && cycle.is_none();
        if valid {
            GraphValidation::Valid
        } else {
            GraphValidation::Invalid(GraphDiagnosis {
                edge_count: self.edges.len(),
                expected_edge_count: d.saturating_sub(1),
                components,
                cycle,
            })
        }
    }

    /// DFS cycle search returning one witness cycle's part names.
    fn find_cycle(&self, adj: &[Vec<(usize, usize)>]) -> Option<Vec<String>> {
        let d = self.parts.len();
        let mut visited = vec![false; d];
        let mut parent_edge = vec![usize::MAX; d];
        let mut parent = vec![usize::MAX; d];
        for start in 0..d {
            if visited[start] {
                continue;
            }
            let mut stack = vec![(start, usize::MAX)];
            while let Some((v, via_edge)) = stack.pop() {
                if visited[v] {
                    continue;
                }
                visited[v] = true;
                parent_edge[v] = via_edge;
                for &(w, ei) in &adj[v] {
                    if ei == via_edge {
                        continue;
                    }
                    if visited[w] {
                        // Back edge: walk v up to w collecting the cycle.
                        let mut cycle = vec![self.parts[w].name.clone()];
                        let mut u = v;
                        while u != w && u != usize::MAX {
                            cycle.push(self.parts[u].name.clone());
                            u = parent[u];
                        }
                        if u == w {
                            cycle.reverse();
                            return Some(cycle);
                        }
                    } else {
                        parent[w] = v;
                        stack.push((w, ei));
                    }
                }
            }
        }
        None
    }

    /// Expresses any pairwise log-ratio as a signed edge sum along the
    /// unique path from the target's denominator to its numerator.
    pub fn derive(&self, target: &LogRatioSpec) -> Result<DerivationPath> {
        if let GraphValidation::Invalid(diag) = self.validate() {
            return Err(CoreError::InvalidGraph(diag.to_string()));
        }
        let from = self.part_index(&target.denominator)?;
        let to = self.part_index(&target.numerator)?;
        let adj = self.adjacency();

        // BFS path reconstruction over the tree.
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.parts.len()];
        let mut seen = vec![false; self.parts.len()];
        seen[from] = true;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(w, ei) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, ei));
                    queue.push_back(w);
                }
            }
        }
        debug_assert!(seen[to], "validated graph is connected");

        let mut terms = Vec::new();
        let mut v = to;
        while let Some((u, ei)) = prev[v] {
            let edge = &self.edges[ei];
            // Travelling u -> v uses the edge forward when v is its numerator.
            let coefficient = if edge.numerator == self.parts[v].name {
                1
            } else {
                -1
            };
            terms.push(DerivationTerm {
                edge: edge.clone(),
                coefficient,
            });
            v = u;
        }
        terms.reverse();
        Ok(DerivationPath {
            target: target.clone(),
            terms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(names: &[&str]) -> Vec<PartLabel> {
        names.iter().map(|n| PartLabel::bare(*n)).collect()
    }

    fn spec(name: &str, num: &str, den: &str) -> LogRatioSpec {
        LogRatioSpec::new(name, num, den).unwrap()
    }

    fn dupont_graph() -> LogRatioGraph {
        LogRatioGraph::new(
            labels(&["x1", "x2", "x3", "x4"]),
            vec![
                spec("y1", "x1", "x4"),
                spec("y2", "x1", "x2"),
                spec("y3", "x3", "x4"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn spanning_tree_is_valid() {
        assert!(dupont_graph().validate().is_valid());

        let minimal = LogRatioGraph::new(
            labels(&["a", "b"]),
            vec![spec("y", "a", "b")],
        )
        .unwrap();
        assert!(minimal.validate().is_valid());
    }

    #[test]
    fn cycle_and_disconnection_are_both_diagnosed() {
        // y1:(x1/x4), y4:(x1/x3), y3:(x3/x4) cycles through x1,x3,x4 and
        // leaves x2 unconnected.
        let g = LogRatioGraph::new(
            labels(&["x1", "x2", "x3", "x4"]),
            vec![
                spec("y1", "x1", "x4"),
                spec("y4", "x1", "x3"),
                spec("y3", "x3", "x4"),
            ],
        )
        .unwrap();
        match g.validate() {
            GraphValidation::Invalid(diag) => {
                assert_eq!(diag.components.len(), 2);
                assert!(diag.components.iter().any(|c| c == &["x2".to_string()]));
                let cycle = diag.cycle.expect("cycle should be found");
                let mut sorted = cycle.clone();
                sorted.sort();
                assert_eq!(sorted, vec!["x1", "x3", "x4"]);
            }
            GraphValidation::Valid => panic!("graph should be invalid"),
        }
    }

    #[test]
    fn wrong_edge_count_is_diagnosed() {
        let g = LogRatioGraph::new(
            labels(&["a", "b", "c"]),
            vec![spec("y1", "a", "b")],
        )
        .unwrap();
        match g.validate() {
            GraphValidation::Invalid(diag) => {
                assert_eq!(diag.edge_count, 1);
                assert_eq!(diag.expected_edge_count, 2);
            }
            GraphValidation::Valid => panic!("graph should be invalid"),
        }
    }

    #[test]
    fn duplicate_unordered_pair_rejected() {
        let r = LogRatioGraph::new(
            labels(&["a", "b"]),
            vec![spec("y1", "a", "b"), spec("y2", "b", "a")],
        );
        assert!(matches!(r, Err(CoreError::InvalidGraph(_))));
    }

    #[test]
    fn derivation_reproduces_edge_and_reverse() {
        let g = dupont_graph();
        let direct = g.derive(&spec("t", "x1", "x4")).unwrap();
        assert_eq!(direct.terms.len(), 1);
        assert_eq!(direct.terms[0].coefficient, 1);
        assert_eq!(direct.terms[0].edge.name, "y1");

        let reversed = g.derive(&spec("t", "x4", "x1")).unwrap();
        assert_eq!(reversed.terms.len(), 1);
        assert_eq!(reversed.terms[0].coefficient, -1);
    }

    #[test]
    fn derivation_combines_edges() {
        // log(x1/x3) = y1 - y3 in the 4-part graph.
        let g = dupont_graph();
        let path = g.derive(&spec("y4", "x1", "x3")).unwrap();
        assert_eq!(path.formula(), "y1 - y3");

        let c = Composition::new(vec![2.0, 3.0, 5.0, 7.0]).unwrap();
        let evaluated = path.evaluate(g.parts(), &c).unwrap();
        let exact = (2.0f64 / 5.0).ln();
        assert!((evaluated - exact).abs() < 1e-12);
    }

    #[test]
    fn derive_unknown_part_is_an_error() {
        let g = dupont_graph();
        assert!(matches!(
            g.derive(&spec("t", "x1", "nope")),
            Err(CoreError::UnknownPart(_))
        ));
    }
}
