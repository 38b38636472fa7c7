//! Interpolation problems: nodes with lower-set multiplicities, the Taylor
//! polynomials `h_i`, and the ordered list of congruence constraints.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldMode, Rational, Scalar, ScalarError, F64};
use crate::pairmod::OrderXi;
use crate::poly::{Monomial, Poly};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown field mode {0:?} (expected \"rational\" or \"float64\")")]
    UnknownField(String),
    #[error("problem declares no variables")]
    NoVariables,
    #[error("duplicate variable name {0:?}")]
    DuplicateVariable(String),
    #[error("varorder {0:?} is not a permutation of the variables")]
    BadVarorder(Vec<String>),
    #[error("node {node}: expected {expected} coordinates, found {found}")]
    PointArity {
        node: usize,
        expected: usize,
        found: usize,
    },
    #[error("node {node}: alpha {alpha:?} has {found} entries, expected {expected}")]
    AlphaArity {
        node: usize,
        alpha: Vec<u32>,
        expected: usize,
        found: usize,
    },
    #[error("evaluation point has {found} coordinates, expected {expected}")]
    EvalArity { expected: usize, found: usize },
    #[error("node {node} carries no data")]
    EmptyNode { node: usize },
    #[error("node {node}: alpha {alpha:?} given more than once")]
    DuplicateAlpha { node: usize, alpha: Monomial },
    #[error("node {node}: data order is not a chain; the prefix ending at alpha {alpha:?} is not a lower set")]
    BadChain { node: usize, alpha: Monomial },
    #[error("unknown chain rule {0:?} (expected \"graded\" or \"input\")")]
    UnknownChain(String),
    #[error("nodes {first} and {second} are the same point")]
    DuplicatePoint { first: usize, second: usize },
    #[error(
        "node {node}: multiplicity is not a lower set; offending alpha {offending:?} (missing {missing:?})"
    )]
    NotLowerSet {
        node: usize,
        offending: Vec<Monomial>,
        missing: Vec<Monomial>,
    },
    #[error("{context}: {source}")]
    Scalar {
        context: String,
        #[source]
        source: ScalarError,
    },
}

/// Checks closure under the division order. Returns the offending elements
/// paired with a missing immediate divisor.
pub fn lower_set_violations(set: &BTreeSet<Monomial>) -> Vec<(Monomial, Monomial)> {
    let mut out = Vec::new();
    for a in set {
        // Closure under immediate divisors implies closure under all divisors.
        if let Some(d) = a.immediate_divisors().find(|d| !set.contains(d)) {
            out.push((a.clone(), d));
        }
    }
    out
}

pub fn is_lower_set(set: &BTreeSet<Monomial>) -> bool {
    lower_set_violations(set).is_empty()
}

/// Finite subset of `ℕ^n` closed under the division order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerSet(BTreeSet<Monomial>);

impl LowerSet {
    pub fn new(set: BTreeSet<Monomial>) -> Result<Self, BTreeSet<Monomial>> {
        if is_lower_set(&set) {
            Ok(LowerSet(set))
        } else {
            Err(set)
        }
    }

    pub fn elements(&self) -> &BTreeSet<Monomial> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.0.contains(m)
    }

    pub fn max_degree(&self) -> u32 {
        self.0.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Elements ordered by total degree, then `≺_lex`. Every prefix of the
    /// result is again a lower set.
    pub fn chain(&self, ord: &OrderXi) -> Vec<Monomial> {
        let mut v: Vec<Monomial> = self.0.iter().cloned().collect();
        v.sort_by(|a, b| ord.cmp_mono(a, b));
        v
    }
}

/// Free-function form of [`LowerSet::chain`].
pub fn chain(set: &LowerSet, ord: &OrderXi) -> Vec<Monomial> {
    set.chain(ord)
}

/// Interpolation node `Y_i` with its prescribed normalized derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Node<S> {
    pub point: Vec<S>,
    /// `α ↦ f^(α)`; the key set is the node's lower set.
    pub data: BTreeMap<Monomial, S>,
    /// Explicit constraint order for this node; `None` uses
    /// [`LowerSet::chain`].
    pub chain: Option<Vec<Monomial>>,
}

impl<S: Scalar> Node<S> {
    /// Value-only node.
    pub fn simple(point: Vec<S>, value: S) -> Self {
        let n = point.len();
        Node {
            point,
            data: BTreeMap::from([(Monomial::one(n), value)]),
            chain: None,
        }
    }

    /// The node's constraint order under `ord`.
    pub fn chain(&self, ord: &OrderXi) -> Vec<Monomial> {
        match &self.chain {
            Some(c) => c.clone(),
            None => self.lower_set().chain(ord),
        }
    }

    pub fn lower_set(&self) -> LowerSet {
        LowerSet(self.data.keys().cloned().collect())
    }

    pub fn is_simple(&self) -> bool {
        self.data.len() == 1 && self.data.keys().all(Monomial::is_one)
    }

    pub fn value(&self) -> Option<&S> {
        self.data.get(&Monomial::one(self.point.len()))
    }
}

/// `h = Σ_{α∈A} f^(α) (X − Y)^α`, expanded.
pub fn build_h<S: Scalar>(node: &Node<S>) -> Poly<S> {
    let n = node.point.len();
    let centered = Poly::from_terms(n, node.data.iter().map(|(m, v)| (m.clone(), v.clone())));
    let neg: Vec<S> = node.point.iter().map(|v| -v.clone()).collect();
    centered
        .shift(&neg)
        .expect("node arity checked at construction")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem<S> {
    varnames: Vec<String>,
    nodes: Vec<Node<S>>,
    order: OrderXi,
    evaluate_at: Option<Vec<S>>,
}

impl<S: Scalar> Problem<S> {
    pub fn new(
        varnames: Vec<String>,
        nodes: Vec<Node<S>>,
        order: OrderXi,
        evaluate_at: Option<Vec<S>>,
    ) -> Result<Self, ProblemError> {
        let n = varnames.len();
        if n == 0 {
            return Err(ProblemError::NoVariables);
        }
        let mut seen = BTreeSet::new();
        for v in &varnames {
            if !seen.insert(v) {
                return Err(ProblemError::DuplicateVariable(v.clone()));
            }
        }
        if order.nvars() != n {
            return Err(ProblemError::BadVarorder(
                order.varorder.iter().map(|i| format!("#{i}")).collect(),
            ));
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.point.len() != n {
                return Err(ProblemError::PointArity {
                    node: i,
                    expected: n,
                    found: node.point.len(),
                });
            }
            if node.data.is_empty() {
                return Err(ProblemError::EmptyNode { node: i });
            }
            for alpha in node.data.keys() {
                if alpha.arity() != n {
                    return Err(ProblemError::AlphaArity {
                        node: i,
                        alpha: alpha.exponents().to_vec(),
                        expected: n,
                        found: alpha.arity(),
                    });
                }
            }
            let keys: BTreeSet<Monomial> = node.data.keys().cloned().collect();
            let bad = lower_set_violations(&keys);
            if !bad.is_empty() {
                let (offending, missing) = bad.into_iter().unzip();
                return Err(ProblemError::NotLowerSet {
                    node: i,
                    offending,
                    missing,
                });
            }
            if let Some(c) = &node.chain {
                let mut prefix = BTreeSet::new();
                for alpha in c {
                    if !keys.contains(alpha)
                        || !prefix.insert(alpha.clone())
                        || !is_lower_set(&prefix)
                    {
                        return Err(ProblemError::BadChain {
                            node: i,
                            alpha: alpha.clone(),
                        });
                    }
                }
                if prefix.len() != keys.len() {
                    let alpha = keys
                        .difference(&prefix)
                        .next()
                        .cloned()
                        .expect("missing key");
                    return Err(ProblemError::BadChain { node: i, alpha });
                }
            }
            for (j, other) in nodes[..i].iter().enumerate() {
                if other.point == node.point {
                    return Err(ProblemError::DuplicatePoint {
                        first: j,
                        second: i,
                    });
                }
            }
        }
        if let Some(y0) = &evaluate_at {
            if y0.len() != n {
                return Err(ProblemError::EvalArity {
                    expected: n,
                    found: y0.len(),
                });
            }
        }
        Ok(Problem {
            varnames,
            nodes,
            order,
            evaluate_at,
        })
    }

    /// Value-only problem with the default variable order.
    pub fn cauchy(
        varnames: Vec<String>,
        points: Vec<Vec<S>>,
        values: Vec<S>,
        xi: i64,
    ) -> Result<Self, ProblemError> {
        let n = varnames.len();
        let nodes = points
            .into_iter()
            .zip(values)
            .map(|(p, v)| Node::simple(p, v))
            .collect();
        Problem::new(varnames, nodes, OrderXi::with_default_varorder(xi, n), None)
    }

    pub fn nvars(&self) -> usize {
        self.varnames.len()
    }

    pub fn varnames(&self) -> &[String] {
        &self.varnames
    }

    pub fn nodes(&self) -> &[Node<S>] {
        &self.nodes
    }

    pub fn order(&self) -> &OrderXi {
        &self.order
    }

    pub fn evaluate_at(&self) -> Option<&[S]> {
        self.evaluate_at.as_deref()
    }

    /// `N = Σ s_i`.
    pub fn num_conditions(&self) -> usize {
        self.nodes.iter().map(|n| n.data.len()).sum()
    }

    pub fn is_cauchy(&self) -> bool {
        self.nodes.iter().all(Node::is_simple)
    }

    pub fn with_xi(mut self, xi: i64) -> Self {
        self.order.xi = xi;
        self
    }

    pub fn with_varorder(mut self, varorder: Vec<usize>) -> Self {
        self.order = OrderXi::new(self.order.xi, varorder);
        self
    }

    pub fn with_evaluate_at(mut self, y0: Vec<S>) -> Result<Self, ProblemError> {
        if y0.len() != self.nvars() {
            return Err(ProblemError::EvalArity {
                expected: self.nvars(),
                found: y0.len(),
            });
        }
        self.evaluate_at = Some(y0);
        Ok(self)
    }

    /// Variable indices from least to most significant, resolved from names.
    pub fn resolve_varorder(&self, names: &[String]) -> Result<Vec<usize>, ProblemError> {
        resolve_varorder(&self.varnames, names)
    }

    pub fn to_file(&self) -> ProblemFile {
        let explicit = self.nodes.iter().any(|n| n.chain.is_some());
        ProblemFile {
            variables: self.varnames.clone(),
            field: S::MODE.to_string(),
            xi: self.order.xi,
            chain: explicit.then(|| "input".to_string()),
            varorder: Some(
                self.order
                    .varorder
                    .iter()
                    .map(|&i| self.varnames[i].clone())
                    .collect(),
            ),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeFile {
                    point: n
                        .point
                        .iter()
                        .map(|v| Literal::Str(v.to_string()))
                        .collect(),
                    data: n
                        .chain(&self.order)
                        .iter()
                        .map(|a| DataFile {
                            alpha: a.exponents().to_vec(),
                            value: Literal::Str(n.data[a].to_string()),
                        })
                        .collect(),
                })
                .collect(),
            evaluate_at: self
                .evaluate_at
                .as_ref()
                .map(|y| y.iter().map(|v| Literal::Str(v.to_string())).collect()),
        }
    }
}

fn resolve_varorder(varnames: &[String], names: &[String]) -> Result<Vec<usize>, ProblemError> {
    let bad = || ProblemError::BadVarorder(names.to_vec());
    if names.len() != varnames.len() {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let i = varnames.iter().position(|v| v == name).ok_or_else(bad)?;
        if out.contains(&i) {
            return Err(bad());
        }
        out.push(i);
    }
    Ok(out)
}

/// One congruence `a ≡ b·h_i mod I(Y_i, prefix)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Zero-based node index.
    pub node: usize,
    /// The exponent newly added by this constraint.
    pub alpha: Monomial,
    /// Chain prefix up to and including `alpha`.
    pub prefix: LowerSet,
}

/// All `N` constraints: nodes in input order, chain order within a node.
pub fn constraints<S: Scalar>(p: &Problem<S>) -> Vec<Constraint> {
    let mut out = Vec::with_capacity(p.num_conditions());
    for (i, node) in p.nodes.iter().enumerate() {
        let mut prefix = BTreeSet::new();
        for alpha in node.chain(&p.order) {
            prefix.insert(alpha.clone());
            out.push(Constraint {
                node: i,
                alpha,
                prefix: LowerSet(prefix.clone()),
            });
        }
    }
    out
}

/// A numeric literal in a problem file: a string such as `"3/4"` or a bare
/// JSON number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Str(String),
    Num(serde_json::Number),
}

impl Literal {
    fn parse<S: Scalar>(&self, context: impl FnOnce() -> String) -> Result<S, ProblemError> {
        let text = match self {
            Literal::Str(s) => s.clone(),
            Literal::Num(n) => n.to_string(),
        };
        S::parse_literal(&text).map_err(|source| ProblemError::Scalar {
            context: context(),
            source,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataFile {
    pub alpha: Vec<u32>,
    pub value: Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeFile {
    pub point: Vec<Literal>,
    pub data: Vec<DataFile>,
}

/// On-disk JSON problem schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub variables: Vec<String>,
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default)]
    pub xi: i64,
    /// `"graded"` (default): constraints within a node by degree, then
    /// `≺_lex`. `"input"`: in the order the data are listed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<String>,
    /// Variables from least to most significant; `["y", "x"]` means `y ≺ x`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varorder: Option<Vec<String>>,
    pub nodes: Vec<NodeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluate_at: Option<Vec<Literal>>,
}

fn default_field() -> String {
    "rational".to_string()
}

impl ProblemFile {
    pub fn mode(&self) -> Result<FieldMode, ProblemError> {
        match self.field.as_str() {
            "rational" => Ok(FieldMode::Exact),
            "float64" => Ok(FieldMode::Float),
            other => Err(ProblemError::UnknownField(other.to_string())),
        }
    }

    pub fn build<S: Scalar>(&self) -> Result<Problem<S>, ProblemError> {
        let n = self.variables.len();
        if n == 0 {
            return Err(ProblemError::NoVariables);
        }
        let explicit = match self.chain.as_deref() {
            None | Some("graded") => false,
            Some("input") => true,
            Some(other) => return Err(ProblemError::UnknownChain(other.to_string())),
        };
        let varorder = match &self.varorder {
            Some(names) => resolve_varorder(&self.variables, names)?,
            None => (0..n).rev().collect(),
        };
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, nf) in self.nodes.iter().enumerate() {
            let point = nf
                .point
                .iter()
                .enumerate()
                .map(|(c, lit)| lit.parse::<S>(|| format!("node {i} coordinate {c}")))
                .collect::<Result<Vec<S>, _>>()?;
            let mut data = BTreeMap::new();
            let mut listed = Vec::with_capacity(nf.data.len());
            for d in &nf.data {
                if d.alpha.len() != n {
                    return Err(ProblemError::AlphaArity {
                        node: i,
                        alpha: d.alpha.clone(),
                        expected: n,
                        found: d.alpha.len(),
                    });
                }
                let alpha = Monomial::new(d.alpha.clone());
                let v = d
                    .value
                    .parse::<S>(|| format!("node {i} value for alpha {:?}", d.alpha))?;
                if data.insert(alpha.clone(), v).is_some() {
                    return Err(ProblemError::DuplicateAlpha { node: i, alpha });
                }
                listed.push(alpha);
            }
            let chain = explicit.then_some(listed);
            nodes.push(Node { point, data, chain });
        }
        let evaluate_at = self
            .evaluate_at
            .as_ref()
            .map(|y| {
                y.iter()
                    .enumerate()
                    .map(|(c, lit)| lit.parse::<S>(|| format!("evaluate_at coordinate {c}")))
                    .collect::<Result<Vec<S>, _>>()
            })
            .transpose()?;
        Problem::new(
            self.variables.clone(),
            nodes,
            OrderXi::new(self.xi, varorder),
            evaluate_at,
        )
    }
}

/// A parsed problem in whichever field the file asked for.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyProblem {
    Exact(Problem<Rational>),
    Float(Problem<F64>),
}

impl AnyProblem {
    pub fn from_file(file: &ProblemFile) -> Result<Self, ProblemError> {
        Ok(match file.mode()? {
            FieldMode::Exact => AnyProblem::Exact(file.build()?),
            FieldMode::Float => AnyProblem::Float(file.build()?),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let file: ProblemFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }
}
