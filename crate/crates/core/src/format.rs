//! Line-oriented text formats for machines and networks.
//!
//! A machine block:
//!
//! ```text
//! moore
//! states 2
//! initial 0
//! inputs flat a b
//! outputs product 2
//! factor x y
//! factor 1 2
//! state 0 x,1
//! state 1 y,2
//! trans 0 a 1
//! end
//! ```
//!
//! Tuple symbols are written as comma-joined factor names. A network file
//! lists `node <in|out|comp> <name>` and `edge <src> <dst> <symbols...>`
//! lines followed by one `component <name>` header and machine block per
//! component, all inside `mmn` ... `end`. Blank lines and lines starting with
//! `#` are ignored.

use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::mmn::{Mmn, Network, NodeKind};
use crate::moore::DetMoore;

fn write_alphabet(out: &mut String, role: &str, a: &Alphabet) -> Result<()> {
    if let Some(names) = a.names() {
        writeln!(out, "{role} flat {}", names.join(" ")).unwrap();
        return Ok(());
    }
    writeln!(out, "{role} product {}", a.arity()).unwrap();
    for f in a.factors() {
        let names = f.names().ok_or_else(|| {
            Error::AlphabetMismatch("nested product alphabets cannot be serialized".into())
        })?;
        writeln!(out, "factor {}", names.join(" ")).unwrap();
    }
    Ok(())
}

pub fn write_moore(m: &DetMoore) -> Result<String> {
    let mut out = String::new();
    write_moore_into(&mut out, m)?;
    Ok(out)
}

fn write_moore_into(out: &mut String, m: &DetMoore) -> Result<()> {
    use crate::moore::Moore;
    writeln!(out, "moore").unwrap();
    writeln!(out, "states {}", m.num_states()).unwrap();
    writeln!(out, "initial {}", m.initial_state()).unwrap();
    write_alphabet(out, "inputs", m.inputs())?;
    write_alphabet(out, "outputs", m.outputs())?;
    for q in 0..m.num_states() as u32 {
        writeln!(out, "state {q} {}", m.outputs().token(m.state_output(q))).unwrap();
    }
    for (q, i, t) in m.transitions() {
        writeln!(out, "trans {q} {} {t}", m.inputs().token(i)).unwrap();
    }
    writeln!(out, "end").unwrap();
    Ok(())
}

pub fn write_mmn(m: &Mmn) -> Result<String> {
    let mut out = String::from("mmn\n");
    let net = m.network();
    for n in net.nodes() {
        writeln!(out, "node {} {}", n.kind.keyword(), n.name).unwrap();
    }
    for e in net.edges() {
        let names = e.alphabet.names().ok_or_else(|| {
            Error::AlphabetMismatch("edge alphabets must be flat to be serialized".into())
        })?;
        writeln!(
            out,
            "edge {} {} {}",
            net.nodes()[e.src].name,
            net.nodes()[e.dst].name,
            names.join(" ")
        )
        .unwrap();
    }
    for c in 0..m.num_components() {
        writeln!(out, "component {}", m.component_name(c)).unwrap();
        write_moore_into(&mut out, m.component(c))?;
    }
    writeln!(out, "end").unwrap();
    Ok(out)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            line: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next_tokens(&mut self) -> Result<Vec<&'a str>> {
        for (n, raw) in self.inner.by_ref() {
            self.line = n + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Ok(t.split_whitespace().collect());
        }
        Err(self.err("unexpected end of input"))
    }

    fn expect(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let toks = self.next_tokens()?;
        if toks[0] != key {
            return Err(self.err(format!("expected `{key}`, found `{}`", toks[0])));
        }
        Ok(toks[1..].to_vec())
    }

    fn number<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse()
            .map_err(|_| self.err(format!("expected a number, found `{s}`")))
    }

    fn finish(&mut self) -> Result<()> {
        for (n, raw) in self.inner.by_ref() {
            let t = raw.trim();
            if !t.is_empty() && !t.starts_with('#') {
                self.line = n + 1;
                return Err(self.err("trailing content"));
            }
        }
        Ok(())
    }
}

fn parse_alphabet(lines: &mut Lines<'_>, role: &str) -> Result<Alphabet> {
    let toks = lines.expect(role)?;
    match toks.first().copied() {
        Some("flat") => Ok(Alphabet::flat(toks[1..].iter().copied())?),
        Some("product") => {
            let k: usize = lines.number(toks.get(1).copied().unwrap_or(""))?;
            let mut factors = Vec::with_capacity(k);
            for _ in 0..k {
                let f = lines.expect("factor")?;
                factors.push(Alphabet::flat(f)?);
            }
            Ok(Alphabet::product(factors))
        }
        _ => Err(lines.err("expected `flat` or `product`")),
    }
}

fn symbol(lines: &Lines<'_>, a: &Alphabet, tok: &str) -> Result<Symbol> {
    a.parse_token(tok)
        .ok_or_else(|| lines.err(format!("unknown symbol `{tok}`")))
}

fn parse_moore_block(lines: &mut Lines<'_>) -> Result<DetMoore> {
    lines.expect("moore")?;
    let n: usize = {
        let t = lines.expect("states")?;
        lines.number(t.first().copied().unwrap_or(""))?
    };
    let initial: u32 = {
        let t = lines.expect("initial")?;
        lines.number(t.first().copied().unwrap_or(""))?
    };
    let inputs = parse_alphabet(lines, "inputs")?;
    let outputs = parse_alphabet(lines, "outputs")?;
    let mut b = DetMoore::builder(inputs.clone(), outputs.clone());
    for expected in 0..n as u32 {
        let t = lines.expect("state")?;
        if t.len() != 2 || lines.number::<u32>(t[0])? != expected {
            return Err(lines.err(format!("expected `state {expected} <output>`")));
        }
        b.add_state(symbol(lines, &outputs, t[1])?);
    }
    b.set_initial(initial);
    loop {
        let t = lines.next_tokens()?;
        match t[0] {
            "end" => break,
            "trans" if t.len() == 4 => {
                let q = lines.number(t[1])?;
                let i = symbol(lines, &inputs, t[2])?;
                let d = lines.number(t[3])?;
                b.add_transition(q, i, d);
            }
            _ => return Err(lines.err("expected `trans <src> <input> <dst>` or `end`")),
        }
    }
    b.build()
}

pub fn parse_moore(text: &str) -> Result<DetMoore> {
    let mut lines = Lines::new(text);
    let m = parse_moore_block(&mut lines)?;
    lines.finish()?;
    Ok(m)
}

pub fn parse_mmn(text: &str) -> Result<Mmn> {
    let mut lines = Lines::new(text);
    lines.expect("mmn")?;
    let mut net = Network::new();
    let mut comps: Vec<(String, DetMoore)> = Vec::new();
    loop {
        let t = lines.next_tokens()?;
        match t[0] {
            "node" if t.len() == 3 => {
                let kind = NodeKind::from_keyword(t[1])
                    .ok_or_else(|| lines.err(format!("unknown node kind `{}`", t[1])))?;
                net.add_node(t[2], kind);
            }
            "edge" if t.len() >= 4 => {
                let src = net
                    .node_id(t[1])
                    .ok_or_else(|| lines.err(format!("unknown node `{}`", t[1])))?;
                let dst = net
                    .node_id(t[2])
                    .ok_or_else(|| lines.err(format!("unknown node `{}`", t[2])))?;
                net.add_edge(src, dst, Alphabet::flat(t[3..].iter().copied())?);
            }
            "component" if t.len() == 2 => {
                let m = parse_moore_block(&mut lines)?;
                comps.push((t[1].to_string(), m));
            }
            "end" => break,
            other => return Err(lines.err(format!("unexpected `{other}`"))),
        }
    }
    lines.finish()?;
    let order: Vec<String> = net
        .nodes_of(NodeKind::Component)
        .into_iter()
        .map(|v| net.nodes()[v].name.clone())
        .collect();
    let mut machines = Vec::with_capacity(order.len());
    for name in &order {
        let pos = comps.iter().position(|(n, _)| n == name).ok_or_else(|| {
            Error::InvalidNetwork(vec![format!("component `{name}` has no machine")])
        })?;
        machines.push(comps.swap_remove(pos).1);
    }
    if let Some((extra, _)) = comps.first() {
        return Err(Error::InvalidNetwork(vec![format!(
            "machine given for unknown component `{extra}`"
        )]));
    }
    Mmn::new(net, machines)
}
