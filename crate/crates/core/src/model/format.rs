//! Line-oriented textual model format.
//!
//! ```text
//! clocks: x, y
//! automaton P:
//!   state idle accepting
//!   state busy invariant x <= 5
//!   trans idle -> busy guard y >= 2 reset {x} label go
//!   trans busy -> idle guard x == 5
//! sync {go, go_too}
//! ```
//!
//! The first state of an automaton is its initial state. A transition
//! without `label` is an internal move.

use std::fmt::Write as _;

use super::{Atom, Automaton, Cmp, Guard, Network, State, Transition};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(i64),
    Colon,
    Comma,
    LBrace,
    RBrace,
    Arrow,
    And,
    Minus,
    Rel(Cmp),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Colon => "`:`".into(),
        Tok::Comma => "`,`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::And => "`&&`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Rel(c) => format!("`{}`", c.symbol()),
    }
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<Spanned>, Error> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, len) = match two.as_str() {
            "->" => (Tok::Arrow, 2),
            "&&" => (Tok::And, 2),
            "<=" => (Tok::Rel(Cmp::Le), 2),
            ">=" => (Tok::Rel(Cmp::Ge), 2),
            "==" => (Tok::Rel(Cmp::Eq), 2),
            _ => match c {
                ':' => (Tok::Colon, 1),
                ',' => (Tok::Comma, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                '-' => (Tok::Minus, 1),
                '<' => (Tok::Rel(Cmp::Lt), 1),
                '>' => (Tok::Rel(Cmp::Gt), 1),
                c if c.is_ascii_digit() => {
                    let mut j = i;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    let text: String = chars[i..j].iter().collect();
                    let n = text
                        .parse::<i64>()
                        .ok()
                        .filter(|n| *n < (1 << 40))
                        .ok_or_else(|| err(line_no, col, format!("constant `{text}` is too large")))?;
                    (Tok::Num(n), j - i)
                }
                c if c.is_alphabetic() || c == '_' => {
                    let mut j = i;
                    while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                        j += 1;
                    }
                    (Tok::Ident(chars[i..j].iter().collect()), j - i)
                }
                other => return Err(err(line_no, col, format!("unexpected character `{other}`"))),
            },
        };
        out.push(Spanned { tok, col });
        i += len;
    }
    Ok(out)
}

struct Line<'a> {
    no: usize,
    toks: &'a [Spanned],
    pos: usize,
    end_col: usize,
}

impl<'a> Line<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |s| s.col)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos).map(|s| &s.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn unexpected(&self, wanted: &str) -> Error {
        match self.peek() {
            Some(t) => err(self.no, self.col(), format!("expected {wanted}, found {}", describe(t))),
            None => err(self.no, self.col(), format!("expected {wanted}, found end of line")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), Error> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<String, Error> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    /// `{a, b, c}`, possibly empty.
    fn ident_set(&mut self, wanted: &str) -> Result<Vec<(String, usize)>, Error> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::RBrace) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            let col = self.col();
            out.push((self.ident(wanted)?, col));
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBrace) => return Ok(out),
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return Err(self.unexpected("`,` or `}`"));
                }
            }
        }
    }

    /// A conjunction of `clock rel constant`, or `true`.
    fn conjunction(&mut self, clocks: &[String]) -> Result<Guard, Error> {
        if self.keyword("true") {
            self.pos += 1;
            return Ok(Guard::tt());
        }
        let mut atoms = Vec::new();
        loop {
            let col = self.col();
            let name = self.ident("a clock name")?;
            if self.peek() == Some(&Tok::Minus) {
                return Err(err(self.no, self.col(), "diagonal constraints unsupported"));
            }
            let clock = clocks
                .iter()
                .position(|c| *c == name)
                .map(|i| i + 1)
                .ok_or_else(|| err(self.no, col, format!("unknown clock `{name}`")))?;
            let cmp = match self.next() {
                Some(Tok::Rel(c)) => *c,
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("a comparison"));
                }
            };
            let ccol = self.col();
            let constant = match self.next() {
                Some(Tok::Num(n)) => *n,
                Some(Tok::Minus) => return Err(err(self.no, ccol, "negative constants are not allowed")),
                Some(Tok::Ident(other)) if clocks.contains(other) => {
                    return Err(err(self.no, ccol, "diagonal constraints unsupported"))
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("a natural constant"));
                }
            };
            atoms.push(Atom { clock, cmp, constant });
            if self.peek() == Some(&Tok::And) {
                self.pos += 1;
            } else {
                return Ok(Guard::new(atoms));
            }
        }
    }
}

struct PendingTrans {
    line: usize,
    src: (String, usize),
    dst: (String, usize),
    t: Transition,
}

/// Parses the textual model format into a validated network.
pub fn parse_model(text: &str) -> Result<Network, Error> {
    let mut net = Network::default();
    let mut current: Option<(Automaton, Vec<PendingTrans>)> = None;
    let mut sync_lines: Vec<(usize, Vec<(String, usize)>)> = Vec::new();

    let finish = |net: &mut Network, cur: Option<(Automaton, Vec<PendingTrans>)>| -> Result<(), Error> {
        let Some((mut a, pending)) = cur else { return Ok(()) };
        for p in pending {
            let src = a
                .state_id(&p.src.0)
                .ok_or_else(|| err(p.line, p.src.1, format!("unknown state `{}`", p.src.0)))?;
            let dst = a
                .state_id(&p.dst.0)
                .ok_or_else(|| err(p.line, p.dst.1, format!("unknown state `{}`", p.dst.0)))?;
            a.transitions.push(Transition { src, dst, ..p.t });
        }
        net.automata.push(a);
        Ok(())
    };

    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        last_line = no;
        let toks = tokenize(no, raw)?;
        if toks.is_empty() {
            continue;
        }
        let end_col = raw.chars().count() + 1;
        let mut line = Line { no, toks: &toks, pos: 0, end_col };
        let head_col = line.col();
        let head = line.ident("a declaration")?;
        match head.as_str() {
            "clocks" => {
                if current.is_some() || !net.automata.is_empty() {
                    return Err(err(no, head_col, "clocks must be declared before any automaton"));
                }
                line.expect(Tok::Colon, "`:`")?;
                while !line.at_end() {
                    let col = line.col();
                    let name = line.ident("a clock name")?;
                    if net.clocks.contains(&name) {
                        return Err(err(no, col, format!("clock `{name}` declared twice")));
                    }
                    net.clocks.push(name);
                    if !line.at_end() {
                        line.expect(Tok::Comma, "`,`")?;
                    }
                }
            }
            "automaton" => {
                let col = line.col();
                let name = line.ident("an automaton name")?;
                line.expect(Tok::Colon, "`:`")?;
                if net.automaton(&name).is_some()
                    || current.as_ref().is_some_and(|(a, _)| a.name == name)
                {
                    return Err(err(no, col, format!("automaton `{name}` declared twice")));
                }
                finish(&mut net, current.take())?;
                current = Some((Automaton::new(name), Vec::new()));
            }
            "state" => {
                let Some((a, _)) = current.as_mut() else {
                    return Err(err(no, head_col, "state declared outside an automaton"));
                };
                let col = line.col();
                let name = line.ident("a state name")?;
                if a.state_id(&name).is_some() {
                    return Err(err(no, col, format!("state `{name}` declared twice")));
                }
                let mut st = State::new(name);
                if line.keyword("accepting") {
                    line.pos += 1;
                    st.accepting = true;
                }
                if line.keyword("invariant") {
                    line.pos += 1;
                    st.invariant = line.conjunction(&net.clocks)?;
                }
                a.states.push(st);
            }
            "trans" => {
                let Some((_, pending)) = current.as_mut() else {
                    return Err(err(no, head_col, "transition declared outside an automaton"));
                };
                let scol = line.col();
                let src = line.ident("a source state")?;
                line.expect(Tok::Arrow, "`->`")?;
                let dcol = line.col();
                let dst = line.ident("a target state")?;
                let mut t = Transition::new(0, 0);
                if line.keyword("guard") {
                    line.pos += 1;
                    t.guard = line.conjunction(&net.clocks)?;
                }
                if line.keyword("reset") {
                    line.pos += 1;
                    for (c, col) in line.ident_set("a clock name")? {
                        let id = net
                            .clock(&c)
                            .ok_or_else(|| err(no, col, format!("unknown clock `{c}`")))?;
                        if !t.resets.contains(&id) {
                            t.resets.push(id);
                        }
                    }
                }
                if line.keyword("label") {
                    line.pos += 1;
                    t.label = Some(line.ident("a label")?);
                }
                pending.push(PendingTrans { line: no, src: (src, scol), dst: (dst, dcol), t });
            }
            "sync" => {
                let set = line.ident_set("a label")?;
                if set.is_empty() {
                    return Err(err(no, line.col(), "empty sync set"));
                }
                sync_lines.push((no, set));
            }
            other => return Err(err(no, head_col, format!("unknown declaration `{other}`"))),
        }
        if !line.at_end() {
            return Err(line.unexpected("end of line"));
        }
    }
    finish(&mut net, current.take())?;

    for a in &net.automata {
        if a.states.is_empty() {
            return Err(err(last_line.max(1), 1, format!("automaton `{}` has no states", a.name)));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for (no, set) in sync_lines {
        let mut labels = Vec::new();
        for (l, col) in set {
            if !seen.insert(l.clone()) {
                return Err(err(no, col, format!("label `{l}` appears in more than one sync set")));
            }
            labels.push(l);
        }
        net.syncs.push(labels);
    }
    Ok(net)
}

/// Prints a network in the textual format with a stable layout.
pub fn print_model(net: &Network) -> String {
    let mut out = String::new();
    if net.clocks.is_empty() {
        out.push_str("clocks:\n");
    } else {
        let _ = writeln!(out, "clocks: {}", net.clocks.join(", "));
    }
    for a in &net.automata {
        let _ = writeln!(out, "\nautomaton {}:", a.name);
        for s in &a.states {
            let _ = write!(out, "  state {}", s.name);
            if s.accepting {
                out.push_str(" accepting");
            }
            if !s.invariant.is_true() {
                let _ = write!(out, " invariant {}", s.invariant.display(&net.clocks));
            }
            out.push('\n');
        }
        for t in &a.transitions {
            let _ = write!(out, "  trans {} -> {}", a.states[t.src].name, a.states[t.dst].name);
            if !t.guard.is_true() {
                let _ = write!(out, " guard {}", t.guard.display(&net.clocks));
            }
            if !t.resets.is_empty() {
                let names: Vec<&str> = t.resets.iter().map(|&c| net.clocks[c - 1].as_str()).collect();
                let _ = write!(out, " reset {{{}}}", names.join(", "));
            }
            if let Some(l) = &t.label {
                let _ = write!(out, " label {l}");
            }
            out.push('\n');
        }
    }
    if !net.syncs.is_empty() {
        out.push('\n');
        for s in &net.syncs {
            let _ = writeln!(out, "sync {{{}}}", s.join(", "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_model() {
        let net = parse_model("clocks: x\nautomaton A:\n  state s accepting\n  trans s -> s guard x >= 1 reset {x}\n")
            .unwrap();
        let tba = net.flatten().unwrap();
        assert_eq!(tba.num_states(), 1);
        assert_eq!(tba.transitions.len(), 1);
        assert!(tba.is_accepting(0));
    }

    #[test]
    fn diagonal_guard_is_rejected() {
        let e = parse_model("clocks: x, y\nautomaton A:\n  state s\n  trans s -> s guard x - y < 3\n").unwrap_err();
        match e {
            Error::Parse { line, column, message } => {
                assert_eq!((line, column), (4, 24));
                assert_eq!(message, "diagonal constraints unsupported");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn semantic_errors_carry_positions() {
        let e = parse_model("clocks: x\nautomaton A:\n  state s\n  trans s -> s guard z < 3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, column: 22, .. }), "{e:?}");
        let e = parse_model("clocks: x\nautomaton A:\n  state s invariant x <= -2\n").unwrap_err();
        assert!(e.to_string().contains("negative"), "{e}");
        let e = parse_model("clocks: x\nautomaton A:\n  state s\n  trans s -> t\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, column: 14, .. }), "{e:?}");
        let e = parse_model("clocks: x\nautomaton A:\n  state s junk\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, column: 11, .. }), "{e:?}");
    }

    #[test]
    fn print_is_stable() {
        let text = "clocks: x, y\n\nautomaton A:\n  state s accepting invariant x <= 3\n  state t\n  trans s -> t guard x < 3 && y >= 1 reset {x, y} label go\n  trans t -> s\n\nsync {go, stop}\n";
        let net = parse_model(text).unwrap();
        assert_eq!(print_model(&net), text);
    }
}
