//! JSON descriptions of multiport networks, their validation, and
//! compilation to a one-step evolution operator on directed-edge modes.
//!
//! Every node port has an incoming and an outgoing slot. A two-way edge
//! uses both slots at each end; a `one_way` edge uses the outgoing slot of
//! `endpoint_a` and the incoming slot of `endpoint_b`. A terminal feeds the
//! incoming slot of `(node, port)` and collects the outgoing slot of `exit`
//! (the same port unless given). In a valid network every slot is used
//! exactly once, so the modes are in one-to-one correspondence with the
//! incoming slots and the step operator is unitary.
//!
//! ```json
//! {
//!   "version": 1,
//!   "nodes": [{ "id": "a", "multiport": { "n": 3, "kind": "grover" } }],
//!   "terminals": [
//!     { "id": "t0", "node": "a", "port": 0 },
//!     { "id": "t1", "node": "a", "port": 1 },
//!     { "id": "t2", "node": "a", "port": 2 }
//!   ]
//! }
//! ```
//!
//! An optional `templates` object (`fig3_chain`, `fig4_lattice`,
//! `compact_pair`) is expanded into explicit nodes, edges and terminals
//! while parsing.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainLabel, Direction};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, Unitary, C64};
use crate::multiport::MultiportSpec;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Endpoint {
    pub node: String,
    pub port: usize,
}

impl Endpoint {
    pub fn new(node: impl Into<String>, port: usize) -> Self {
        Self { node: node.into(), port }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.node, self.port)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: String,
    pub multiport: MultiportSpec,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub endpoint_a: Endpoint,
    pub endpoint_b: Endpoint,
    /// Phase picked up in each direction of travel.
    #[serde(default)]
    pub phase: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub one_way: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalSpec {
    pub id: String,
    pub node: String,
    pub port: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit: Option<Endpoint>,
    /// Reflective terminals send their amplitude back in; the rest absorb.
    #[serde(default, skip_serializing_if = "is_false")]
    pub reflective: bool,
}

impl TerminalSpec {
    pub fn enter(&self) -> Endpoint {
        Endpoint::new(self.node.clone(), self.port)
    }

    pub fn exit_endpoint(&self) -> Endpoint {
        self.exit.clone().unwrap_or_else(|| self.enter())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Templates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fig3_chain: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fig4_lattice: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compact_pair: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub version: u64,
    #[serde(default)]
    pub nodes: Vec<NodeSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub terminals: Vec<TerminalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<Templates>,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self { version: FORMAT_VERSION, nodes: Vec::new(), edges: Vec::new(), terminals: Vec::new(), templates: None }
    }
}

impl NetworkSpec {
    fn merge(&mut self, other: NetworkSpec) {
        self.nodes.extend(other.nodes);
        self.edges.extend(other.edges);
        self.terminals.extend(other.terminals);
    }

    /// Replaces `templates` by the explicit elements it stands for.
    pub fn expand_templates(&mut self) -> Result<()> {
        let Some(t) = self.templates.take() else { return Ok(()) };
        let mut bad = Vec::new();
        if let Some(l) = t.fig3_chain {
            match fig3_chain(l) {
                Ok(s) => self.merge(s),
                Err(e) => bad.push(Diagnostic::new(DiagnosticCode::Template, e.to_string())),
            }
        }
        if let Some(n) = t.fig4_lattice {
            match fig4_lattice(n) {
                Ok(s) => self.merge(s),
                Err(e) => bad.push(Diagnostic::new(DiagnosticCode::Template, e.to_string())),
            }
        }
        if t.compact_pair == Some(true) {
            self.merge(compact_pair());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Network(bad))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticCode {
    Syntax,
    Schema,
    Version,
    Template,
    Empty,
    DuplicateId,
    UnknownNode,
    Arity,
    Phase,
    DuplicatePort,
    DanglingPort,
    Connectivity,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Syntax => "syntax",
            DiagnosticCode::Schema => "schema",
            DiagnosticCode::Version => "version",
            DiagnosticCode::Template => "template",
            DiagnosticCode::Empty => "empty",
            DiagnosticCode::DuplicateId => "duplicate_id",
            DiagnosticCode::UnknownNode => "unknown_node",
            DiagnosticCode::Arity => "arity",
            DiagnosticCode::Phase => "phase",
            DiagnosticCode::DuplicatePort => "duplicate_port",
            DiagnosticCode::DanglingPort => "dangling_port",
            DiagnosticCode::Connectivity => "connectivity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl Diagnostic {
    pub fn new(code: DiagnosticCode, message: impl Into<String>) -> Self {
        Self { code, message: message.into(), line: None, column: None }
    }

    fn at(code: DiagnosticCode, e: &serde_json::Error) -> Self {
        Self { code, message: e.to_string(), line: Some(e.line()), column: Some(e.column()) }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code.as_str(), self.message)?;
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, " (line {l}, column {c})")?;
        }
        Ok(())
    }
}

fn fail(d: Diagnostic) -> Error {
    Error::Network(vec![d])
}

/// Parses the text and expands templates without checking the wiring.
pub fn parse_network_unchecked(text: &str) -> Result<NetworkSpec> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| fail(Diagnostic::at(DiagnosticCode::Syntax, &e)))?;
    match value.get("version") {
        Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
        Some(v) => {
            return Err(fail(Diagnostic::new(
                DiagnosticCode::Version,
                format!("unsupported version {v}, expected {FORMAT_VERSION}"),
            )))
        }
        None => return Err(fail(Diagnostic::new(DiagnosticCode::Version, "missing \"version\""))),
    }
    let mut spec: NetworkSpec =
        serde_json::from_str(text).map_err(|e| fail(Diagnostic::at(DiagnosticCode::Schema, &e)))?;
    spec.expand_templates()?;
    Ok(spec)
}

/// Parses, expands templates and validates; any diagnostic is an error.
pub fn parse_network(text: &str) -> Result<NetworkSpec> {
    let spec = parse_network_unchecked(text)?;
    let diags = validate_network(&spec);
    if diags.is_empty() {
        Ok(spec)
    } else {
        Err(Error::Network(diags))
    }
}

pub fn parse_network_bytes(bytes: &[u8]) -> Result<NetworkSpec> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| fail(Diagnostic::new(DiagnosticCode::Syntax, format!("input is not UTF-8: {e}"))))?;
    parse_network(text)
}

/// Pretty JSON with a trailing newline.
pub fn serialize_network(spec: &NetworkSpec) -> String {
    let mut s = serde_json::to_string_pretty(spec).expect("spec serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    In,
    Out,
}

impl Slot {
    fn describe(self) -> &'static str {
        match self {
            Slot::In => "incoming",
            Slot::Out => "outgoing",
        }
    }
}

fn slot_uses(spec: &NetworkSpec) -> Vec<(Endpoint, Slot)> {
    let mut uses = Vec::new();
    for e in &spec.edges {
        uses.push((e.endpoint_a.clone(), Slot::Out));
        uses.push((e.endpoint_b.clone(), Slot::In));
        if !e.one_way {
            uses.push((e.endpoint_a.clone(), Slot::In));
            uses.push((e.endpoint_b.clone(), Slot::Out));
        }
    }
    for t in &spec.terminals {
        uses.push((t.enter(), Slot::In));
        uses.push((t.exit_endpoint(), Slot::Out));
    }
    uses
}

/// Every problem found, in a fixed order. Empty iff the spec is valid.
pub fn validate_network(spec: &NetworkSpec) -> Vec<Diagnostic> {
    use DiagnosticCode::*;
    let mut out = Vec::new();
    if spec.version != FORMAT_VERSION {
        out.push(Diagnostic::new(Version, format!("unsupported version {}, expected {FORMAT_VERSION}", spec.version)));
    }
    if spec.templates.is_some() {
        out.push(Diagnostic::new(Template, "templates must be expanded before validation"));
    }
    if spec.nodes.is_empty() {
        out.push(Diagnostic::new(Empty, "network has no nodes"));
        return out;
    }

    let mut arity: HashMap<&str, usize> = HashMap::new();
    for node in &spec.nodes {
        if arity.insert(node.id.as_str(), node.multiport.n).is_some() {
            out.push(Diagnostic::new(DuplicateId, format!("node id {:?} declared more than once", node.id)));
        }
        if let Err(e) = node.multiport.validate() {
            out.push(Diagnostic::new(Arity, format!("node {}: {e}", node.id)));
        }
    }
    let mut seen_terminals = HashMap::new();
    for t in &spec.terminals {
        if seen_terminals.insert(t.id.as_str(), ()).is_some() {
            out.push(Diagnostic::new(DuplicateId, format!("terminal id {:?} declared more than once", t.id)));
        }
    }

    let mut references_ok = true;
    let mut check_endpoint = |ep: &Endpoint, what: &str, out: &mut Vec<Diagnostic>| match arity.get(ep.node.as_str()) {
        None => {
            references_ok = false;
            out.push(Diagnostic::new(UnknownNode, format!("{what} refers to unknown node {:?}", ep.node)));
        }
        Some(&n) if ep.port >= n => {
            out.push(Diagnostic::new(Arity, format!("{what} uses port {ep}, but node {} has {n} ports", ep.node)));
        }
        _ => {}
    };
    for (i, e) in spec.edges.iter().enumerate() {
        check_endpoint(&e.endpoint_a, &format!("edge {i}"), &mut out);
        check_endpoint(&e.endpoint_b, &format!("edge {i}"), &mut out);
    }
    for t in &spec.terminals {
        check_endpoint(&t.enter(), &format!("terminal {}", t.id), &mut out);
        if let Some(x) = &t.exit {
            check_endpoint(x, &format!("terminal {}", t.id), &mut out);
        }
    }
    for (i, e) in spec.edges.iter().enumerate() {
        if !e.phase.is_finite() {
            out.push(Diagnostic::new(Phase, format!("edge {i} has non-finite phase")));
        }
    }

    let mut counts: BTreeMap<(Endpoint, Slot), usize> = BTreeMap::new();
    for u in slot_uses(spec) {
        *counts.entry(u).or_default() += 1;
    }
    for ((ep, slot), k) in &counts {
        if *k > 1 {
            out.push(Diagnostic::new(DuplicatePort, format!("port {ep} ({}) used {k} times", slot.describe())));
        }
    }
    for node in &spec.nodes {
        for p in 0..node.multiport.n {
            for slot in [Slot::In, Slot::Out] {
                let ep = Endpoint::new(node.id.clone(), p);
                if !counts.contains_key(&(ep.clone(), slot)) {
                    out.push(Diagnostic::new(DanglingPort, format!("port {ep} has no {} connection", slot.describe())));
                }
            }
        }
    }

    if references_ok {
        let index: HashMap<&str, usize> = spec.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let mut parent: Vec<usize> = (0..spec.nodes.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &spec.edges {
            let (a, b) = (index[e.endpoint_a.node.as_str()], index[e.endpoint_b.node.as_str()]);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
        let mut roots: Vec<usize> = (0..spec.nodes.len()).map(|i| find(&mut parent, i)).collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() > 1 {
            let names: Vec<&str> = roots.iter().map(|&r| spec.nodes[r].id.as_str()).collect();
            out.push(Diagnostic::new(
                Connectivity,
                format!("network has {} disconnected components (containing {})", roots.len(), names.join(", ")),
            ));
        }
    }
    out
}

/// How amplitude reaches a mode's incoming slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSource {
    Edge { edge: usize, from: Endpoint },
    Terminal { terminal: usize, id: String },
}

/// Amplitude about to enter `node` through `port`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    pub node: String,
    pub port: usize,
    pub source: ModeSource,
}

impl Mode {
    pub fn label(&self) -> String {
        match &self.source {
            ModeSource::Edge { from, .. } => format!("{}:{}<{from}", self.node, self.port),
            ModeSource::Terminal { id, .. } => format!("{}:{}<{id}", self.node, self.port),
        }
    }
}

/// Modes ordered by `(node id, port)` of their incoming slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBasis {
    pub modes: Vec<Mode>,
}

impl EdgeBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn index_of(&self, node: &str, port: usize) -> Option<usize> {
        self.modes.iter().position(|m| m.node == node && m.port == port)
    }

    pub fn labels(&self) -> Vec<String> {
        self.modes.iter().map(Mode::label).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledNetwork {
    pub unitary: Unitary,
    pub basis: EdgeBasis,
    /// Mode index of each terminal, in declaration order.
    pub terminal_modes: Vec<usize>,
    pub terminal_ids: Vec<String>,
    pub reflective: Vec<bool>,
}

/// Final in-flight amplitudes and the probability absorbed at each terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub amplitudes: CVector,
    pub absorbed: Vec<f64>,
}

impl CompiledNetwork {
    pub fn dim(&self) -> usize {
        self.unitary.dim()
    }

    /// Unit amplitude in the mode fed by terminal `t`.
    pub fn terminal_input(&self, t: usize) -> Result<CVector> {
        let &m = self.terminal_modes.get(t).ok_or(Error::InvalidPort { port: t, dim: self.terminal_modes.len() })?;
        let mut v = CVector::zeros(self.dim());
        v[m] = C64::new(1.0, 0.0);
        Ok(v)
    }

    /// `U^steps` restricted to terminal rows and columns.
    pub fn terminal_block(&self, steps: usize) -> CMatrix {
        let p = self.unitary.pow(steps);
        let t = &self.terminal_modes;
        CMatrix::from_fn(t.len(), t.len(), |i, j| p.matrix()[(t[i], t[j])])
    }

    /// Steps `psi0`; after each step non-reflective terminals absorb
    /// whatever reached them when `absorb` is set.
    pub fn run(&self, psi0: &CVector, steps: usize, absorb: bool) -> Result<RunResult> {
        if psi0.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: psi0.len() });
        }
        let mut v = psi0.clone();
        let mut absorbed = vec![0.0; self.terminal_modes.len()];
        for _ in 0..steps {
            v = self.unitary.matrix() * v;
            if absorb {
                for (t, &m) in self.terminal_modes.iter().enumerate() {
                    if !self.reflective[t] {
                        absorbed[t] += v[m].norm_sqr();
                        v[m] = C64::new(0.0, 0.0);
                    }
                }
            }
        }
        Ok(RunResult { amplitudes: v, absorbed })
    }

    /// Probability per port index, summed over nodes.
    pub fn port_marginal(&self, amplitudes: &CVector) -> Vec<f64> {
        let width = self.basis.modes.iter().map(|m| m.port + 1).max().unwrap_or(0);
        let mut out = vec![0.0; width];
        for (m, a) in self.basis.modes.iter().zip(amplitudes.iter()) {
            out[m.port] += a.norm_sqr();
        }
        out
    }
}

pub fn compile_evolution(spec: &NetworkSpec) -> Result<CompiledNetwork> {
    let diags = validate_network(spec);
    if !diags.is_empty() {
        return Err(Error::Network(diags));
    }
    let mut nodes: Vec<&NodeSpec> = spec.nodes.iter().collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    let mut offset: HashMap<&str, usize> = HashMap::new();
    let mut unitaries = Vec::with_capacity(nodes.len());
    let mut dim = 0;
    for node in &nodes {
        offset.insert(node.id.as_str(), dim);
        unitaries.push(node.multiport.unitary()?);
        dim += node.multiport.n;
    }
    let idx = |ep: &Endpoint| offset[ep.node.as_str()] + ep.port;

    let mut source: Vec<Option<ModeSource>> = vec![None; dim];
    let mut target: Vec<(usize, f64)> = vec![(usize::MAX, 0.0); dim];
    for (i, e) in spec.edges.iter().enumerate() {
        let (a, b) = (idx(&e.endpoint_a), idx(&e.endpoint_b));
        target[a] = (b, e.phase);
        source[b] = Some(ModeSource::Edge { edge: i, from: e.endpoint_a.clone() });
        if !e.one_way {
            target[b] = (a, e.phase);
            source[a] = Some(ModeSource::Edge { edge: i, from: e.endpoint_b.clone() });
        }
    }
    let mut terminal_modes = Vec::with_capacity(spec.terminals.len());
    for (i, t) in spec.terminals.iter().enumerate() {
        let m = idx(&t.enter());
        target[idx(&t.exit_endpoint())] = (m, 0.0);
        source[m] = Some(ModeSource::Terminal { terminal: i, id: t.id.clone() });
        terminal_modes.push(m);
    }

    let mut m = CMatrix::zeros(dim, dim);
    for (node, u) in nodes.iter().zip(&unitaries) {
        let base = offset[node.id.as_str()];
        for p in 0..node.multiport.n {
            for q in 0..node.multiport.n {
                let (to, phase) = target[base + q];
                m[(to, base + p)] += u.matrix()[(q, p)] * C64::from_polar(1.0, phase);
            }
        }
    }

    let mut modes = Vec::with_capacity(dim);
    for node in &nodes {
        let base = offset[node.id.as_str()];
        for p in 0..node.multiport.n {
            modes.push(Mode { node: node.id.clone(), port: p, source: source[base + p].clone().expect("validated") });
        }
    }
    Ok(CompiledNetwork {
        unitary: Unitary::new(m)?,
        basis: EdgeBasis { modes },
        terminal_modes,
        terminal_ids: spec.terminals.iter().map(|t| t.id.clone()).collect(),
        reflective: spec.terminals.iter().map(|t| t.reflective).collect(),
    })
}

fn digits(n: usize) -> usize {
    n.saturating_sub(1).to_string().len()
}

/// `len` three-port Grover nodes `c0..`, each port `p` wired one way to
/// port `p` of the next node; terminal `t<p>` enters the first node and
/// collects from the last.
pub fn fig3_chain(len: usize) -> Result<NetworkSpec> {
    if len == 0 {
        return Err(Error::InvalidParameter("fig3_chain needs at least one node".into()));
    }
    let w = digits(len);
    let id = |i: usize| format!("c{i:0w$}");
    let nodes = (0..len).map(|i| NodeSpec { id: id(i), multiport: MultiportSpec::grover(3) }).collect();
    let mut edges = Vec::new();
    for i in 0..len - 1 {
        for p in 0..3 {
            edges.push(EdgeSpec {
                endpoint_a: Endpoint::new(id(i), p),
                endpoint_b: Endpoint::new(id(i + 1), p),
                phase: 0.0,
                one_way: true,
            });
        }
    }
    let terminals = (0..3)
        .map(|p| TerminalSpec {
            id: format!("t{p}"),
            node: id(0),
            port: p,
            exit: (len > 1).then(|| Endpoint::new(id(len - 1), p)),
            reflective: false,
        })
        .collect();
    Ok(NetworkSpec { nodes, edges, terminals, ..NetworkSpec::default() })
}

fn fig4_ids(sites: usize) -> impl Fn(usize, bool) -> String {
    let w = digits(sites);
    move |m, top| format!("s{m:0w$}{}", if top { 't' } else { 'b' })
}

/// Periodic two-rail ladder of `sites` cells. Top node of cell `m`: port 0
/// to the left rail edge, port 1 to the right, port 2 down the rung;
/// bottom nodes likewise with port 2 up the rung.
pub fn fig4_lattice(sites: usize) -> Result<NetworkSpec> {
    if sites == 0 {
        return Err(Error::InvalidParameter("fig4_lattice needs at least one site".into()));
    }
    let id = fig4_ids(sites);
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for m in 0..sites {
        for top in [true, false] {
            nodes.push(NodeSpec { id: id(m, top), multiport: MultiportSpec::grover(3) });
        }
    }
    let two_way = |a: Endpoint, b: Endpoint| EdgeSpec { endpoint_a: a, endpoint_b: b, phase: 0.0, one_way: false };
    for m in 0..sites {
        let next = (m + 1) % sites;
        for top in [true, false] {
            edges.push(two_way(Endpoint::new(id(m, top), 1), Endpoint::new(id(next, top), 0)));
        }
        edges.push(two_way(Endpoint::new(id(m, true), 2), Endpoint::new(id(m, false), 2)));
    }
    Ok(NetworkSpec { nodes, edges, ..NetworkSpec::default() })
}

/// Chain label of each mode of a compiled [`fig4_lattice`]. Rightward and
/// downward travel is `R`; leftward and upward is `L`.
pub fn fig4_chain_labels(compiled: &CompiledNetwork, sites: usize) -> Result<Vec<ChainLabel>> {
    let id = fig4_ids(sites);
    let mut lookup = HashMap::new();
    for m in 0..sites {
        lookup.insert(id(m, true), (m, true));
        lookup.insert(id(m, false), (m, false));
    }
    let prev = |m: usize| (m + sites - 1) % sites;
    compiled
        .basis
        .modes
        .iter()
        .map(|mode| {
            let &(m, top) = lookup
                .get(&mode.node)
                .ok_or_else(|| Error::InvalidParameter(format!("node {} is not part of the lattice", mode.node)))?;
            let rail = if top { 1 } else { -1 };
            Ok(match mode.port {
                0 => ChainLabel::new(prev(m), rail, Direction::R),
                1 => ChainLabel::new(m, rail, Direction::L),
                _ if top => ChainLabel::new(m, 0, Direction::L),
                _ => ChainLabel::new(m, 0, Direction::R),
            })
        })
        .collect()
}

/// Two three-port Grover nodes joined port to port by three two-way lines.
pub fn compact_pair() -> NetworkSpec {
    let nodes = ["left", "right"].map(|id| NodeSpec { id: id.into(), multiport: MultiportSpec::grover(3) }).to_vec();
    let edges = (0..3)
        .map(|p| EdgeSpec {
            endpoint_a: Endpoint::new("left", p),
            endpoint_b: Endpoint::new("right", p),
            phase: 0.0,
            one_way: false,
        })
        .collect();
    NetworkSpec { nodes, edges, ..NetworkSpec::default() }
}
