use std::collections::BTreeSet;

use super::lexer::{tokenize, Token, TokenKind};
use super::{CdlError, CdlErrorKind, CircuitSpecTree, Element, MeasureDecl, ModeRef, PhaseValue, SorterSpec};
use crate::analysis::{DofKind, Party};
use crate::fock::Statistics;

/// Tokenizes and parses in one step.
pub fn parse_source(source: &str) -> Result<CircuitSpecTree, CdlError> {
    parse(&tokenize(source)?)
}

/// Recursive-descent parse with one token of lookahead, followed by the
/// whole-program checks.
pub fn parse(tokens: &[Token]) -> Result<CircuitSpecTree, CdlError> {
    Parser::new(tokens)?.program()
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    internal: Option<Vec<String>>,
    external: Option<Vec<String>>,
    statistics: Option<Statistics>,
    particles: Vec<(ModeRef, &'a Token)>,
    elements: Vec<Element>,
    measurements: Vec<MeasureDecl>,
    measured: BTreeSet<ModeRef>,
}

const STATEMENTS: [&str; 10] = [
    "internal",
    "external",
    "statistics",
    "particle",
    "hbs",
    "bs",
    "phase",
    "sorter",
    "exchange",
    "measure",
];

fn syntax(tok: &Token, message: String, expected: &[&str]) -> CdlError {
    CdlError {
        kind: CdlErrorKind::Syntax,
        message,
        line: tok.line,
        col: tok.col,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn semantic(tok: &Token, message: String) -> CdlError {
    CdlError {
        kind: CdlErrorKind::Semantic,
        message,
        line: tok.line,
        col: tok.col,
        expected: Vec::new(),
    }
}

fn shown(tok: &Token) -> String {
    if tok.kind == TokenKind::End {
        "end of input".into()
    } else {
        format!("`{}`", tok.text)
    }
}

impl<'a> Parser<'a> {
    fn new(tokens: &'a [Token]) -> Result<Self, CdlError> {
        if tokens.last().map(|t| t.kind) != Some(TokenKind::End) {
            return Err(CdlError {
                kind: CdlErrorKind::Syntax,
                message: "token stream must end with the end token".into(),
                line: tokens.last().map_or(1, |t| t.line),
                col: tokens.last().map_or(1, |t| t.col),
                expected: vec!["end of input".into()],
            });
        }
        Ok(Parser {
            tokens,
            pos: 0,
            internal: None,
            external: None,
            statistics: None,
            particles: Vec::new(),
            elements: Vec::new(),
            measurements: Vec::new(),
            measured: BTreeSet::new(),
        })
    }

    fn peek(&self) -> &'a Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> &'a Token {
        let t = &self.tokens[self.pos];
        if t.kind != TokenKind::End {
            self.pos += 1;
        }
        t
    }

    fn at_keyword(&self, word: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Keyword && t.text == word
    }

    fn expect_keyword(&mut self, options: &[&str]) -> Result<&'a Token, CdlError> {
        let t = self.peek();
        if t.kind == TokenKind::Keyword && options.contains(&t.text.as_str()) {
            return Ok(self.advance());
        }
        let list = options.iter().map(|o| format!("`{o}`")).collect::<Vec<_>>();
        Err(syntax(t, format!("unexpected {}", shown(t)), &list.iter().map(String::as_str).collect::<Vec<_>>()))
    }

    fn expect_punct(&mut self, p: &str) -> Result<&'a Token, CdlError> {
        let t = self.peek();
        if t.kind == TokenKind::Punctuation && t.text == p {
            return Ok(self.advance());
        }
        Err(syntax(t, format!("unexpected {}", shown(t)), &[&format!("`{p}`")]))
    }

    fn expect_ident(&mut self, what: &str) -> Result<&'a Token, CdlError> {
        let t = self.peek();
        if t.kind == TokenKind::Identifier {
            return Ok(self.advance());
        }
        Err(syntax(t, format!("expected {what}, found {}", shown(t)), &[what]))
    }

    fn declared(&self, which: DofKind, tok: &Token) -> Result<String, CdlError> {
        let (set, name) = match which {
            DofKind::Internal => (&self.internal, "internal"),
            DofKind::External => (&self.external, "external"),
        };
        match set {
            Some(labels) if labels.contains(&tok.text) => Ok(tok.text.clone()),
            _ => Err(semantic(tok, format!("undeclared {name} label `{}`", tok.text))),
        }
    }

    fn internal_label(&mut self) -> Result<String, CdlError> {
        let t = self.expect_ident("internal label")?;
        self.declared(DofKind::Internal, t)
    }

    fn external_label(&mut self) -> Result<String, CdlError> {
        let t = self.expect_ident("external label")?;
        self.declared(DofKind::External, t)
    }

    fn mode(&mut self) -> Result<ModeRef, CdlError> {
        let internal = self.internal_label()?;
        self.expect_punct(":")?;
        let external = self.external_label()?;
        Ok(ModeRef { internal, external })
    }

    fn program(mut self) -> Result<CircuitSpecTree, CdlError> {
        while self.peek().kind != TokenKind::End {
            self.statement()?;
        }
        let end = self.peek();
        let statistics = self
            .statistics
            .ok_or_else(|| semantic(end, "missing statistics declaration".into()))?;
        let internal = self
            .internal
            .take()
            .ok_or_else(|| semantic(end, "missing internal declaration".into()))?;
        let external = self
            .external
            .take()
            .ok_or_else(|| semantic(end, "missing external declaration".into()))?;
        if self.particles.is_empty() {
            return Err(semantic(end, "at least one particle is required".into()));
        }
        if statistics == Statistics::Fermion {
            let mut seen = BTreeSet::new();
            for (m, tok) in &self.particles {
                if !seen.insert(m.clone()) {
                    return Err(semantic(
                        tok,
                        format!(
                            "two fermions in input mode {}:{} violate Pauli exclusion",
                            m.internal, m.external
                        ),
                    ));
                }
            }
        }
        Ok(CircuitSpecTree {
            internal,
            external,
            statistics,
            particles: self.particles.into_iter().map(|(m, _)| m).collect(),
            elements: self.elements,
            measurements: self.measurements,
        })
    }

    fn label_list(&mut self, what: &str) -> Result<Vec<String>, CdlError> {
        let mut labels: Vec<String> = Vec::new();
        let first = self.expect_ident(what)?;
        labels.push(first.text.clone());
        while self.peek().kind == TokenKind::Identifier {
            let t = self.advance();
            if labels.contains(&t.text) {
                return Err(semantic(t, format!("label `{}` declared twice", t.text)));
            }
            labels.push(t.text.clone());
        }
        Ok(labels)
    }

    fn routes(&mut self, from: DofKind) -> Result<Vec<(String, String)>, CdlError> {
        let mut out = Vec::new();
        loop {
            let src = match from {
                DofKind::Internal => self.internal_label()?,
                DofKind::External => self.external_label()?,
            };
            self.expect_punct("->")?;
            let dst = self.external_label()?;
            out.push((src, dst));
            if self.peek().kind != TokenKind::Identifier {
                return Ok(out);
            }
        }
    }

    fn ports(&mut self) -> Result<[String; 4], CdlError> {
        Ok([
            self.external_label()?,
            self.external_label()?,
            self.external_label()?,
            self.external_label()?,
        ])
    }

    fn statement(&mut self) -> Result<(), CdlError> {
        let kw = self.expect_keyword(&STATEMENTS)?;
        match kw.text.as_str() {
            "internal" | "external" => {
                let labels = self.label_list("label")?;
                let slot = if kw.text == "internal" {
                    &mut self.internal
                } else {
                    &mut self.external
                };
                if slot.is_some() {
                    return Err(semantic(kw, format!("second `{}` declaration", kw.text)));
                }
                *slot = Some(labels);
            }
            "statistics" => {
                let t = self.expect_keyword(&["boson", "fermion", "distinguishable"])?;
                if self.statistics.is_some() {
                    return Err(semantic(kw, "second `statistics` declaration".into()));
                }
                self.statistics = Some(t.text.parse().expect("statistics keyword"));
            }
            "particle" => {
                let at = self.peek();
                let internal = self.internal_label()?;
                let external = self.external_label()?;
                self.particles.push((ModeRef { internal, external }, at));
            }
            "hbs" => {
                let ports = self.ports()?;
                self.elements.push(Element::Hbs { ports });
            }
            "bs" => {
                let ports = self.ports()?;
                self.elements.push(Element::Bs { ports });
            }
            "phase" => {
                let port = self.external_label()?;
                let t = self.peek();
                let value = match t.kind {
                    TokenKind::Number => PhaseValue::Literal(t.value.expect("folded number")),
                    TokenKind::Parameter => PhaseValue::Param(t.text[1..].to_string()),
                    _ => {
                        return Err(syntax(
                            t,
                            format!("expected a phase, found {}", shown(t)),
                            &["number", "parameter"],
                        ))
                    }
                };
                self.advance();
                self.elements.push(Element::Phase { port, value });
            }
            "sorter" => {
                let sel = self.expect_keyword(&["internal", "external"])?;
                let element = if sel.text == "internal" {
                    let port = self.external_label()?;
                    Element::Sorter {
                        spec: SorterSpec::Internal { port },
                        routes: self.routes(DofKind::Internal)?,
                    }
                } else {
                    Element::Sorter {
                        spec: SorterSpec::External,
                        routes: self.routes(DofKind::External)?,
                    }
                };
                self.elements.push(element);
            }
            "exchange" => {
                let routes = self.routes(DofKind::External)?;
                self.elements.push(Element::Exchange { routes });
            }
            "measure" => self.measure(kw)?,
            _ => unreachable!("statement keywords are exhaustive"),
        }
        Ok(())
    }

    fn measure(&mut self, kw: &Token) -> Result<(), CdlError> {
        let p = self.expect_ident("party `A` or `B`")?;
        let party = match p.text.as_str() {
            "A" => Party::A,
            "B" => Party::B,
            _ => return Err(syntax(p, format!("unknown party `{}`", p.text), &["`A`", "`B`"])),
        };
        if self.measurements.iter().any(|m| m.party == party) {
            return Err(semantic(kw, format!("party {} measured twice", p.text)));
        }
        let kind = match self.expect_keyword(&["internal", "external"])?.text.as_str() {
            "internal" => DofKind::Internal,
            _ => DofKind::External,
        };
        let mut bins: Vec<(String, Vec<ModeRef>)> = Vec::new();
        loop {
            self.expect_keyword(&["bin"])?;
            let label = self.expect_ident("bin label")?;
            if bins.iter().any(|(l, _)| *l == label.text) {
                return Err(semantic(label, format!("bin `{}` defined twice", label.text)));
            }
            self.expect_punct("=")?;
            let mut modes = Vec::new();
            loop {
                let at = self.peek();
                let m = self.mode()?;
                if !self.measured.insert(m.clone()) {
                    return Err(semantic(
                        at,
                        format!("mode {}:{} already belongs to another bin", m.internal, m.external),
                    ));
                }
                modes.push(m);
                if self.peek().kind != TokenKind::Identifier {
                    break;
                }
            }
            bins.push((label.text.clone(), modes));
            if !self.at_keyword("bin") {
                break;
            }
        }
        self.measurements.push(MeasureDecl { party, kind, bins });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = "internal down up\nexternal L R\nstatistics fermion\nparticle down L\n";

    #[test]
    fn minimal_program() {
        let t = parse_source(MINI).unwrap();
        assert_eq!(t.statistics, Statistics::Fermion);
        assert_eq!(t.particles.len(), 1);
        assert!(t.elements.is_empty());
    }

    #[test]
    fn missing_statistics_named() {
        let e = parse_source("").unwrap_err();
        assert_eq!(e.message, "missing statistics declaration");
        let e = parse_source("internal a\nexternal b\nparticle a b\n").unwrap_err();
        assert_eq!(e.kind, CdlErrorKind::Semantic);
        assert!(e.message.contains("statistics"));
    }

    #[test]
    fn pauli_duplicate_rejected_at_second_particle() {
        let src = format!("{MINI}particle down L\n");
        let e = parse_source(&src).unwrap_err();
        assert!(e.message.contains("Pauli"));
        assert_eq!((e.line, e.col), (5, 10));
        let ok = src.replace("fermion", "boson");
        assert_eq!(parse_source(&ok).unwrap().particles.len(), 2);
    }

    #[test]
    fn undeclared_label_position() {
        let e = parse_source(&format!("{MINI}bs L R L Q\n")).unwrap_err();
        assert_eq!((e.line, e.col, e.kind), (5, 10, CdlErrorKind::Semantic));
        assert!(e.message.contains("`Q`"));
    }

    #[test]
    fn overlapping_bins_rejected() {
        let src = format!("{MINI}measure A external bin x = down:L bin y = down:L\n");
        let e = parse_source(&src).unwrap_err();
        assert_eq!((e.line, e.col), (5, 43));
        let src = format!("{MINI}measure A external bin x = down:L\nmeasure B external bin y = down:L\n");
        assert!(parse_source(&src).is_err());
    }

    #[test]
    fn syntax_errors_list_expectations() {
        let e = parse_source(&format!("{MINI}phase L =\n")).unwrap_err();
        assert_eq!(e.kind, CdlErrorKind::Syntax);
        assert_eq!((e.line, e.col), (5, 9));
        assert_eq!(e.expected, ["number", "parameter"]);
        let e = parse_source("42").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        assert!(e.expected.contains(&"`hbs`".to_string()));
    }

    #[test]
    fn elements_in_order() {
        let src = format!(
            "{MINI}hbs L R L R\nphase R $phi\nsorter internal L down -> L up -> R\nexchange L -> R R -> L\n"
        );
        let t = parse_source(&src).unwrap();
        assert_eq!(t.elements.len(), 4);
        assert_eq!(
            t.elements[1],
            Element::Phase {
                port: "R".into(),
                value: PhaseValue::Param("phi".into())
            }
        );
        assert_eq!(
            t.elements[3],
            Element::Exchange {
                routes: vec![("L".into(), "R".into()), ("R".into(), "L".into())]
            }
        );
    }

    #[test]
    fn raw_token_stream_must_be_terminated() {
        let mut toks = tokenize("bs").unwrap();
        toks.pop();
        assert!(parse(&toks).is_err());
    }
}
