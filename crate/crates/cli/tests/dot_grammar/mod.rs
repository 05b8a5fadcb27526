//! A recursive-descent recognizer for the DOT language (without subgraphs
//! or ports), following the published Graphviz grammar.

#[derive(Debug, PartialEq)]
enum Tok {
    Id(String),
    Punct(char),
    EdgeOp(&'static str),
}

#[derive(Debug, Default)]
pub struct DotStats {
    pub directed: bool,
    pub nodes: usize,
    pub edges: usize,
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '{' | '}' | '[' | ']' | ';' | ',' | '=' => {
                out.push(Tok::Punct(c));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Tok::EdgeOp("->"));
                i += 2;
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                out.push(Tok::EdgeOp("--"));
                i += 2;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated string".into()),
                        Some('"') => break,
                        Some('\\') => {
                            s.push('\\');
                            s.push(*chars.get(i + 1).ok_or("dangling escape")?);
                            i += 2;
                        }
                        Some(&c) => {
                            s.push(c);
                            i += 1;
                        }
                    }
                }
                i += 1;
                out.push(Tok::Id(s));
            }
            c if c.is_ascii_digit() || c == '-' || c == '.' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                out.push(Tok::Id(chars[start..i].iter().collect()));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Id(chars[start..i].iter().collect()));
            }
            c => return Err(format!("unexpected character `{c}`")),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    op: &'static str,
    stats: DotStats,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.punct(c) {
            Ok(())
        } else {
            Err(format!("expected `{c}` at token {}, found {:?}", self.pos, self.peek()))
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.toks.get(self.pos) {
            Some(Tok::Id(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            t => Err(format!("expected an identifier at token {}, found {t:?}", self.pos)),
        }
    }

    fn attr_list(&mut self) -> Result<(), String> {
        while self.punct('[') {
            while !self.punct(']') {
                self.id()?;
                self.expect('=')?;
                self.id()?;
                if !self.punct(',') {
                    self.punct(';');
                }
            }
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), String> {
        let first = self.id()?;
        if matches!(first.as_str(), "graph" | "node" | "edge") && self.peek() == Some(&Tok::Punct('[')) {
            return self.attr_list();
        }
        if self.punct('=') {
            self.id()?;
            return Ok(());
        }
        let mut edge = false;
        while let Some(Tok::EdgeOp(op)) = self.peek() {
            if *op != self.op {
                return Err(format!("edge operator `{op}` in a graph using `{}`", self.op));
            }
            self.pos += 1;
            self.id()?;
            self.stats.edges += 1;
            edge = true;
        }
        if !edge {
            self.stats.nodes += 1;
        }
        self.attr_list()
    }

    fn graph(&mut self) -> Result<(), String> {
        let mut kw = self.id()?;
        if kw == "strict" {
            kw = self.id()?;
        }
        self.op = match kw.as_str() {
            "digraph" => "->",
            "graph" => "--",
            _ => return Err(format!("expected `graph` or `digraph`, found `{kw}`")),
        };
        self.stats.directed = self.op == "->";
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.id()?;
        }
        self.expect('{')?;
        while !self.punct('}') {
            if self.peek().is_none() {
                return Err("unterminated graph body".into());
            }
            self.stmt()?;
            self.punct(';');
        }
        if self.pos != self.toks.len() {
            return Err("trailing tokens after the graph".into());
        }
        Ok(())
    }
}

pub fn parse(src: &str) -> Result<DotStats, String> {
    let mut p = Parser { toks: lex(src)?, pos: 0, op: "->", stats: DotStats::default() };
    p.graph()?;
    Ok(p.stats)
}
