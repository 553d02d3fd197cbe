use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Input,
    Output,
    Component,
}

impl NodeKind {
    pub fn keyword(self) -> &'static str {
        match self {
            NodeKind::Input => "in",
            NodeKind::Output => "out",
            NodeKind::Component => "comp",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "in" => Some(NodeKind::Input),
            "out" => Some(NodeKind::Output),
            "comp" => Some(NodeKind::Component),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub alphabet: Alphabet,
}

/// A directed graph of input, output and component nodes. Edge ids are
/// assigned in insertion order and fix the coordinate order of every tuple
/// alphabet derived from the network.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>, kind: NodeKind) -> usize {
        self.nodes.push(Node {
            name: name.into(),
            kind,
        });
        self.nodes.len() - 1
    }

    pub fn add_input(&mut self, name: impl Into<String>) -> usize {
        self.add_node(name, NodeKind::Input)
    }

    pub fn add_output(&mut self, name: impl Into<String>) -> usize {
        self.add_node(name, NodeKind::Output)
    }

    pub fn add_component(&mut self, name: impl Into<String>) -> usize {
        self.add_node(name, NodeKind::Component)
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, alphabet: Alphabet) -> usize {
        self.edges.push(Edge { src, dst, alphabet });
        self.edges.len() - 1
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_id(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|e| self.edges[*e].dst == v)
            .collect()
    }

    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|e| self.edges[*e].src == v)
            .collect()
    }

    pub fn nodes_of(&self, kind: NodeKind) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|v| self.nodes[*v].kind == kind)
            .collect()
    }

    /// Edges leaving input nodes, in id order.
    pub fn system_input_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|e| self.nodes[self.edges[*e].src].kind == NodeKind::Input)
            .collect()
    }

    /// Edges entering output nodes, in id order.
    pub fn system_output_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|e| self.nodes[self.edges[*e].dst].kind == NodeKind::Output)
            .collect()
    }

    /// Structural problems, each naming the offending node or edge.
    pub fn validate(&self) -> Vec<String> {
        let mut diags = Vec::new();
        for (kind, label) in [
            (NodeKind::Input, "input"),
            (NodeKind::Output, "output"),
            (NodeKind::Component, "component"),
        ] {
            if self.nodes_of(kind).is_empty() {
                diags.push(format!("{label} nodes empty"));
            }
        }
        let mut names = HashSet::new();
        for n in &self.nodes {
            if !names.insert(n.name.as_str()) {
                diags.push(format!("duplicate node name `{}`", n.name));
            }
            if n.name.is_empty() || n.name.contains(char::is_whitespace) {
                diags.push(format!("invalid node name `{}`", n.name));
            }
        }
        let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
        for (id, e) in self.edges.iter().enumerate() {
            if e.src >= self.nodes.len() || e.dst >= self.nodes.len() {
                diags.push(format!("edge {id} references a missing node"));
                continue;
            }
            let (s, d) = (&self.nodes[e.src], &self.nodes[e.dst]);
            if d.kind == NodeKind::Input {
                diags.push(format!("input node `{}` has incoming edge {id}", d.name));
            }
            if s.kind == NodeKind::Output {
                diags.push(format!("output node `{}` has outgoing edge {id}", s.name));
            }
            if s.kind != NodeKind::Component && d.kind != NodeKind::Component {
                diags.push(format!(
                    "edge {id} `{}`->`{}` does not touch a component",
                    s.name, d.name
                ));
            }
            if let Some(prev) = pairs.insert((e.src, e.dst), id) {
                diags.push(format!(
                    "edges {prev} and {id} both connect `{}`->`{}`",
                    s.name, d.name
                ));
            }
        }
        diags
    }
}

/// Where the character on a component input edge comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// Coordinate of the system input tuple.
    System(usize),
    /// Coordinate `slot` of component `comp`'s output tuple.
    Component { comp: usize, slot: usize },
}

/// Wiring of a valid network: component order, tuple alphabets and where
/// each tuple coordinate is read from.
#[derive(Clone, Debug)]
pub struct Layout {
    comp_nodes: Vec<usize>,
    comp_in_edges: Vec<Vec<usize>>,
    comp_out_edges: Vec<Vec<usize>>,
    in_alpha: Vec<Alphabet>,
    out_alpha: Vec<Alphabet>,
    sys_in_edges: Vec<usize>,
    sys_out_edges: Vec<usize>,
    sys_in: Alphabet,
    sys_out: Alphabet,
    in_sources: Vec<Vec<Source>>,
    out_sources: Vec<(usize, usize)>,
    edge_sources: Vec<Source>,
    feeders: Vec<Vec<usize>>,
}

impl Layout {
    pub fn new(net: &Network) -> Result<Self, Vec<String>> {
        let diags = net.validate();
        if !diags.is_empty() {
            return Err(diags);
        }
        let comp_nodes = net.nodes_of(NodeKind::Component);
        let mut comp_index = vec![usize::MAX; net.nodes().len()];
        for (c, v) in comp_nodes.iter().enumerate() {
            comp_index[*v] = c;
        }
        let comp_in_edges: Vec<Vec<usize>> = comp_nodes.iter().map(|v| net.in_edges(*v)).collect();
        let comp_out_edges: Vec<Vec<usize>> =
            comp_nodes.iter().map(|v| net.out_edges(*v)).collect();
        let sys_in_edges = net.system_input_edges();
        let sys_out_edges = net.system_output_edges();
        let product = |edges: &[usize]| {
            Alphabet::product(
                edges
                    .iter()
                    .map(|e| net.edges()[*e].alphabet.clone())
                    .collect(),
            )
        };
        let mut edge_sources = Vec::with_capacity(net.edges().len());
        for (id, e) in net.edges().iter().enumerate() {
            if net.nodes()[e.src].kind == NodeKind::Input {
                let pos = sys_in_edges.iter().position(|x| *x == id).unwrap();
                edge_sources.push(Source::System(pos));
            } else {
                let comp = comp_index[e.src];
                let slot = comp_out_edges[comp].iter().position(|x| *x == id).unwrap();
                edge_sources.push(Source::Component { comp, slot });
            }
        }
        let in_sources: Vec<Vec<Source>> = comp_in_edges
            .iter()
            .map(|es| es.iter().map(|e| edge_sources[*e]).collect())
            .collect();
        let out_sources = sys_out_edges
            .iter()
            .map(|e| match edge_sources[*e] {
                Source::Component { comp, slot } => (comp, slot),
                Source::System(_) => unreachable!("validated: output edges leave components"),
            })
            .collect();
        let feeders = in_sources
            .iter()
            .map(|srcs| {
                let mut f: Vec<usize> = srcs
                    .iter()
                    .filter_map(|s| match s {
                        Source::Component { comp, .. } => Some(*comp),
                        Source::System(_) => None,
                    })
                    .collect();
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        let mut diags = Vec::new();
        let in_alpha: Vec<Alphabet> = comp_in_edges.iter().map(|es| product(es)).collect();
        for (c, a) in in_alpha.iter().enumerate() {
            if !a.is_indexable() {
                diags.push(format!(
                    "component `{}` input alphabet too large",
                    net.nodes()[comp_nodes[c]].name
                ));
            }
        }
        let sys_in = product(&sys_in_edges);
        let sys_out = product(&sys_out_edges);
        if !sys_in.is_indexable() || !sys_out.is_indexable() {
            diags.push("system alphabets too large".into());
        }
        if !diags.is_empty() {
            return Err(diags);
        }
        Ok(Layout {
            out_alpha: comp_out_edges.iter().map(|es| product(es)).collect(),
            in_alpha,
            comp_nodes,
            comp_in_edges,
            comp_out_edges,
            sys_in,
            sys_out,
            sys_in_edges,
            sys_out_edges,
            in_sources,
            out_sources,
            edge_sources,
            feeders,
        })
    }

    pub fn num_components(&self) -> usize {
        self.comp_nodes.len()
    }

    pub fn component_node(&self, c: usize) -> usize {
        self.comp_nodes[c]
    }

    pub fn component_of_node(&self, v: usize) -> Option<usize> {
        self.comp_nodes.iter().position(|x| *x == v)
    }

    pub fn component_in_edges(&self, c: usize) -> &[usize] {
        &self.comp_in_edges[c]
    }

    pub fn component_out_edges(&self, c: usize) -> &[usize] {
        &self.comp_out_edges[c]
    }

    pub fn input_alphabet(&self, c: usize) -> &Alphabet {
        &self.in_alpha[c]
    }

    pub fn output_alphabet(&self, c: usize) -> &Alphabet {
        &self.out_alpha[c]
    }

    pub fn system_inputs(&self) -> &Alphabet {
        &self.sys_in
    }

    pub fn system_outputs(&self) -> &Alphabet {
        &self.sys_out
    }

    /// Product of all component output alphabets; usually far too large to
    /// enumerate, so total outputs are carried as per-component vectors.
    pub fn total_output_alphabet(&self) -> Alphabet {
        Alphabet::product(self.out_alpha.clone())
    }

    pub fn system_input_edges(&self) -> &[usize] {
        &self.sys_in_edges
    }

    pub fn system_output_edges(&self) -> &[usize] {
        &self.sys_out_edges
    }

    pub fn edge_source(&self, e: usize) -> Source {
        self.edge_sources[e]
    }

    pub fn input_sources(&self, c: usize) -> &[Source] {
        &self.in_sources[c]
    }

    /// Components whose outputs feed component `c`, sorted.
    pub fn feeders(&self, c: usize) -> &[usize] {
        &self.feeders[c]
    }

    /// The tuple `(i, o)` restricted to `in(c)`: the character component `c`
    /// reads when the system input is `input` and component outputs are `total`.
    pub fn component_input(&self, c: usize, input: Symbol, total: &[Symbol]) -> Symbol {
        let parts: Vec<Symbol> = self.in_sources[c]
            .iter()
            .map(|src| match *src {
                Source::System(pos) => self.sys_in.project(input, pos),
                Source::Component { comp, slot } => self.out_alpha[comp].project(total[comp], slot),
            })
            .collect();
        self.in_alpha[c].encode(&parts)
    }

    /// The total output restricted to the system output edges.
    pub fn system_output(&self, total: &[Symbol]) -> Symbol {
        let parts: Vec<Symbol> = self
            .out_sources
            .iter()
            .map(|(comp, slot)| self.out_alpha[*comp].project(total[*comp], *slot))
            .collect();
        self.sys_out.encode(&parts)
    }

    /// Character carried by edge `e` at a tick with system input `input`
    /// and component outputs `total`.
    pub fn edge_value(&self, e: usize, input: Option<Symbol>, total: &[Symbol]) -> Option<Symbol> {
        match self.edge_sources[e] {
            Source::System(pos) => input.map(|i| self.sys_in.project(i, pos)),
            Source::Component { comp, slot } => {
                Some(self.out_alpha[comp].project(total[comp], slot))
            }
        }
    }

    /// The full tuple over every edge at one tick.
    pub fn edge_tuple(&self, input: Symbol, total: &[Symbol]) -> EdgeTuple {
        EdgeTuple {
            edges: (0..self.edge_sources.len()).collect(),
            values: (0..self.edge_sources.len())
                .map(|e| self.edge_value(e, Some(input), total).unwrap())
                .collect(),
        }
    }
}

/// A tuple indexed by a set of edge ids, kept in id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeTuple {
    pub edges: Vec<usize>,
    pub values: Vec<Symbol>,
}

impl EdgeTuple {
    /// Projection onto the edges of `keep` that this tuple covers.
    pub fn restrict(&self, keep: &[usize]) -> EdgeTuple {
        let mut edges = Vec::new();
        let mut values = Vec::new();
        for (e, v) in self.edges.iter().zip(&self.values) {
            if keep.contains(e) {
                edges.push(*e);
                values.push(*v);
            }
        }
        EdgeTuple { edges, values }
    }

    pub fn get(&self, e: usize) -> Option<Symbol> {
        self.edges
            .iter()
            .position(|x| *x == e)
            .map(|k| self.values[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits() -> Alphabet {
        Alphabet::flat(["0", "1"]).unwrap()
    }

    #[test]
    fn missing_node_classes_are_reported() {
        let mut n = Network::new();
        let i = n.add_input("i");
        let c = n.add_component("c");
        n.add_edge(i, c, bits());
        let diags = n.validate();
        assert!(diags.iter().any(|d| d == "output nodes empty"), "{diags:?}");
    }

    #[test]
    fn direction_and_duplicate_checks() {
        let mut n = Network::new();
        let i = n.add_input("i");
        let o = n.add_output("o");
        let c = n.add_component("c");
        n.add_edge(c, i, bits());
        n.add_edge(o, c, bits());
        n.add_edge(i, o, bits());
        n.add_edge(c, c, bits());
        n.add_edge(c, c, bits());
        let diags = n.validate();
        assert_eq!(diags.len(), 4, "{diags:?}");
    }

    #[test]
    fn single_edge_layout() {
        let mut n = Network::new();
        let i = n.add_input("i");
        let o = n.add_output("o");
        let c = n.add_component("c");
        n.add_edge(i, c, bits());
        n.add_edge(c, o, bits());
        let l = Layout::new(&n).unwrap();
        let names: Vec<String> = l
            .system_inputs()
            .symbols()
            .map(|s| l.system_inputs().name(s))
            .collect();
        assert_eq!(names, ["0", "1"]);
        assert_eq!(l.component_input(0, Symbol(1), &[Symbol(0)]), Symbol(1));
        assert!(l.feeders(0).is_empty());
    }

    #[test]
    fn restrict_to_nothing_is_unit() {
        let t = EdgeTuple {
            edges: vec![0, 1],
            values: vec![Symbol(1), Symbol(0)],
        };
        assert_eq!(t.restrict(&[0, 1]), t);
        assert!(t.restrict(&[]).edges.is_empty());
        assert_eq!(t.restrict(&[1]).get(1), Some(Symbol(0)));
    }
}
