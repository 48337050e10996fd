//! Syntax of the input language: one statement per declaration, free layout, `#` comments.
//!
//! ```text
//! chart S (x, y, z)
//! bivector pi on S { [1,2]: "1", [3,2]: "1 + z^2" }
//! form w on S { [1,2]: "x" }
//! vectors rho on S { ("1", "0", "0"), ("0", "1", "0") }
//! map p : S -> M ("x", "y")                # also `transition`
//! grid G on S default | { x: [-1, 0, 1], … } | points { (0, 1, 2), … }
//! related R = p : pi -> piM
//! submanifold X = i in pi [levels ("…", …)] [grid G] [splitting { ("…", …), … }]
//! submersion P = p : pi -> piM [grid G] [coupling] [generators]
//! flow F of pi h "y" from (0, 0, 0) to 13/10 [step 1/1000] [check "x - arctan(z)"]
//! family F = pullback pi by i [gauge w] compare B [grid G]
//! action P = rho with { [1,2]: "1" }
//! positive P = pi
//! conjugation C = pi
//! polytope D = interval | triangle | square | '{"rank": 1, …}' [strata]
//! triple T = A1
//! weyl W = A 1
//! algebra L = '{"dim": 3, …}'
//! associated A = W x D hypothesis isotropic-orbits
//! ```

use thiserror::Error;

use crate::scalars::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct DslError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl DslError {
    pub fn at(src: &str, offset: usize, message: impl Into<String>) -> DslError {
        let before = &src[..offset.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        DslError {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(num_bigint::BigInt),
    /// Contents and byte offset of the first content character.
    Str(String),
    Sym(char),
    Arrow,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, DslError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == '#' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
        } else if c == '-' && b.get(i + 1) == Some(&b'>') {
            out.push((Tok::Arrow, i));
            i += 2;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Int(src[s..i].parse().expect("digits")), s));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            loop {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                // hyphenated words such as `isotropic-orbits` or `cross-check`
                if i + 1 < b.len() && b[i] == b'-' && b[i + 1].is_ascii_alphabetic() {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(src[s..i].to_string()), s));
        } else if c == '"' || c == '\'' {
            let s = i + 1;
            i += 1;
            while i < b.len() && b[i] as char != c {
                i += 1;
            }
            if i >= b.len() {
                return Err(DslError::at(src, s - 1, "unterminated string"));
            }
            out.push((Tok::Str(src[s..i].to_string()), s));
            i += 1;
        } else if "(){}[],:=/;-".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(DslError::at(src, i, format!("unexpected character '{ch}'")));
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

/// A name with its source offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Name {
    pub text: String,
    pub offset: usize,
}

/// A quoted expression with the offset of its first character.
#[derive(Debug, Clone, PartialEq)]
pub struct Text {
    pub text: String,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridDecl {
    Default,
    Axes(Vec<(Name, Vec<Q>)>),
    Points(Vec<Vec<Q>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolytopeDecl {
    Named(Name),
    Json(Text),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Count(u64),
    Ref(Name),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Chart {
        name: Name,
        vars: Vec<Name>,
    },
    Bivector {
        name: Name,
        chart: Name,
        entries: Vec<(Vec<usize>, Text)>,
    },
    Form {
        name: Name,
        chart: Name,
        entries: Vec<(Vec<usize>, Text)>,
    },
    Vectors {
        name: Name,
        chart: Name,
        fields: Vec<Vec<Text>>,
    },
    Map {
        name: Name,
        source: Name,
        target: Name,
        comps: Vec<Text>,
    },
    Grid {
        name: Name,
        chart: Name,
        decl: GridDecl,
    },
    Related {
        name: Name,
        map: Name,
        source: Name,
        target: Name,
    },
    Submanifold {
        name: Name,
        map: Name,
        bivector: Name,
        levels: Vec<Text>,
        grid: Option<Name>,
        splitting: Option<Vec<Vec<Text>>>,
    },
    Submersion {
        name: Name,
        map: Name,
        total: Name,
        base: Name,
        grid: Option<Name>,
        coupling: bool,
        generators: bool,
    },
    Flow {
        name: Name,
        bivector: Name,
        hamiltonian: Text,
        start: Vec<Q>,
        end: Q,
        step: Option<Q>,
        check: Option<Text>,
    },
    Family {
        name: Name,
        bivector: Name,
        map: Name,
        gauge: Option<Name>,
        compare: Name,
        grid: Option<Name>,
    },
    Action {
        name: Name,
        vectors: Name,
        entries: Vec<(Vec<usize>, Text)>,
    },
    Positive {
        name: Name,
        bivector: Name,
    },
    Conjugation {
        name: Name,
        bivector: Name,
    },
    Polytope {
        name: Name,
        decl: PolytopeDecl,
        strata: bool,
    },
    Triple {
        name: Name,
        kind: Name,
    },
    Weyl {
        name: Name,
        kind: Name,
        rank: usize,
    },
    Algebra {
        name: Name,
        json: Text,
    },
    Associated {
        name: Name,
        base: Operand,
        fiber: Operand,
        hypothesis: Option<Name>,
    },
}

impl Stmt {
    pub fn name(&self) -> &Name {
        match self {
            Stmt::Chart { name, .. }
            | Stmt::Bivector { name, .. }
            | Stmt::Form { name, .. }
            | Stmt::Vectors { name, .. }
            | Stmt::Map { name, .. }
            | Stmt::Grid { name, .. }
            | Stmt::Related { name, .. }
            | Stmt::Submanifold { name, .. }
            | Stmt::Submersion { name, .. }
            | Stmt::Flow { name, .. }
            | Stmt::Family { name, .. }
            | Stmt::Action { name, .. }
            | Stmt::Positive { name, .. }
            | Stmt::Conjugation { name, .. }
            | Stmt::Polytope { name, .. }
            | Stmt::Triple { name, .. }
            | Stmt::Weyl { name, .. }
            | Stmt::Algebra { name, .. }
            | Stmt::Associated { name, .. } => name,
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DslError> {
        // point at the opening quote rather than the contents
        let at = match self.peek() {
            Tok::Str(_) => self.offset() - 1,
            _ => self.offset(),
        };
        Err(DslError::at(self.src, at, msg))
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(n) => format!("'{n}'"),
            Tok::Str(_) => "a string".into(),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::Arrow => "'->'".into(),
            Tok::End => "end of input".into(),
        }
    }

    fn sym(&mut self, c: char) -> Result<(), DslError> {
        if self.peek() == &Tok::Sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}', found {}", self.describe()))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn arrow(&mut self) -> Result<(), DslError> {
        if self.peek() == &Tok::Arrow {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '->', found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> Result<Name, DslError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let offset = self.offset();
                self.pos += 1;
                Ok(Name { text: s, offset })
            }
            _ => self.err(format!("expected a name, found {}", self.describe())),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DslError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected '{kw}', found {}", self.describe())),
        }
    }

    /// `grid NAME` as a trailing option, unless it opens a `grid NAME on …` statement.
    fn eat_grid_option(&mut self) -> Result<Option<Name>, DslError> {
        let opens_statement = matches!(self.toks.get(self.pos + 2), Some((Tok::Ident(s), _)) if s == "on");
        if !opens_statement && self.eat_keyword("grid") {
            Ok(Some(self.ident()?))
        } else {
            Ok(None)
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn string(&mut self) -> Result<Text, DslError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                let offset = self.offset();
                self.pos += 1;
                Ok(Text { text: s, offset })
            }
            _ => self.err(format!("expected a quoted expression, found {}", self.describe())),
        }
    }

    fn int(&mut self) -> Result<num_bigint::BigInt, DslError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.err(format!("expected an integer, found {}", self.describe())),
        }
    }

    fn small(&mut self) -> Result<usize, DslError> {
        let at = self.offset();
        let n = self.int()?;
        usize::try_from(n).map_err(|_| DslError::at(self.src, at, "integer out of range"))
    }

    fn rational(&mut self) -> Result<Q, DslError> {
        let neg = self.eat_sym('-');
        let n = self.int()?;
        let d = if self.eat_sym('/') {
            let at = self.offset();
            let d = self.int()?;
            if d == 0.into() {
                return Err(DslError::at(self.src, at, "zero denominator"));
            }
            d
        } else {
            1.into()
        };
        let r = Q::new(n, d);
        Ok(if neg { -r } else { r })
    }

    /// `open item (, item)* close`, allowing an empty list.
    fn list<T>(
        &mut self,
        open: char,
        close: char,
        mut item: impl FnMut(&mut Self) -> Result<T, DslError>,
    ) -> Result<Vec<T>, DslError> {
        self.sym(open)?;
        let mut out = Vec::new();
        if self.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat_sym(close) {
                return Ok(out);
            }
            self.sym(',')?;
        }
    }

    fn indexed_entries(&mut self) -> Result<Vec<(Vec<usize>, Text)>, DslError> {
        self.list('{', '}', |p| {
            let at = p.offset();
            let idx = p.list('[', ']', |p| p.small())?;
            if idx.contains(&0) {
                return Err(DslError::at(p.src, at, "indices are 1-based"));
            }
            p.sym(':')?;
            let t = p.string()?;
            Ok((idx.into_iter().map(|i| i - 1).collect(), t))
        })
    }

    fn tuple_list(&mut self) -> Result<Vec<Vec<Text>>, DslError> {
        self.list('{', '}', |p| p.list('(', ')', |p| p.string()))
    }

    fn stmt(&mut self) -> Result<Stmt, DslError> {
        let kw = self.ident()?;
        let s = match kw.text.as_str() {
            "chart" => {
                let name = self.ident()?;
                let vars = self.list('(', ')', |p| p.ident())?;
                Stmt::Chart { name, vars }
            }
            "bivector" | "form" => {
                let name = self.ident()?;
                self.keyword("on")?;
                let chart = self.ident()?;
                let entries = self.indexed_entries()?;
                if kw.text == "bivector" {
                    Stmt::Bivector { name, chart, entries }
                } else {
                    Stmt::Form { name, chart, entries }
                }
            }
            "vectors" => {
                let name = self.ident()?;
                self.keyword("on")?;
                let chart = self.ident()?;
                let fields = self.tuple_list()?;
                Stmt::Vectors { name, chart, fields }
            }
            "map" | "transition" => {
                let name = self.ident()?;
                self.sym(':')?;
                let source = self.ident()?;
                self.arrow()?;
                let target = self.ident()?;
                let comps = self.list('(', ')', |p| p.string())?;
                Stmt::Map {
                    name,
                    source,
                    target,
                    comps,
                }
            }
            "grid" => {
                let name = self.ident()?;
                self.keyword("on")?;
                let chart = self.ident()?;
                let decl = if self.eat_keyword("default") {
                    GridDecl::Default
                } else if self.eat_keyword("points") {
                    GridDecl::Points(self.list('{', '}', |p| p.list('(', ')', |p| p.rational()))?)
                } else {
                    GridDecl::Axes(self.list('{', '}', |p| {
                        let v = p.ident()?;
                        p.sym(':')?;
                        Ok((v, p.list('[', ']', |p| p.rational())?))
                    })?)
                };
                Stmt::Grid { name, chart, decl }
            }
            "related" => {
                let name = self.ident()?;
                self.sym('=')?;
                let map = self.ident()?;
                self.sym(':')?;
                let source = self.ident()?;
                self.arrow()?;
                let target = self.ident()?;
                Stmt::Related {
                    name,
                    map,
                    source,
                    target,
                }
            }
            "submanifold" => {
                let name = self.ident()?;
                self.sym('=')?;
                let map = self.ident()?;
                self.keyword("in")?;
                let bivector = self.ident()?;
                let (mut levels, mut grid, mut splitting) = (Vec::new(), None, None);
                loop {
                    if self.eat_keyword("levels") {
                        levels = self.list('(', ')', |p| p.string())?;
                    } else if let Some(g) = self.eat_grid_option()? {
                        grid = Some(g);
                    } else if self.eat_keyword("splitting") {
                        splitting = Some(self.tuple_list()?);
                    } else {
                        break;
                    }
                }
                Stmt::Submanifold {
                    name,
                    map,
                    bivector,
                    levels,
                    grid,
                    splitting,
                }
            }
            "submersion" => {
                let name = self.ident()?;
                self.sym('=')?;
                let map = self.ident()?;
                self.sym(':')?;
                let total = self.ident()?;
                self.arrow()?;
                let base = self.ident()?;
                let (mut grid, mut coupling, mut generators) = (None, false, false);
                loop {
                    if let Some(g) = self.eat_grid_option()? {
                        grid = Some(g);
                    } else if self.eat_keyword("coupling") {
                        coupling = true;
                    } else if self.eat_keyword("generators") {
                        generators = true;
                    } else {
                        break;
                    }
                }
                Stmt::Submersion {
                    name,
                    map,
                    total,
                    base,
                    grid,
                    coupling,
                    generators,
                }
            }
            "flow" => {
                let name = self.ident()?;
                self.keyword("of")?;
                let bivector = self.ident()?;
                self.keyword("h")?;
                let hamiltonian = self.string()?;
                self.keyword("from")?;
                let start = self.list('(', ')', |p| p.rational())?;
                self.keyword("to")?;
                let end = self.rational()?;
                let (mut step, mut check) = (None, None);
                loop {
                    if self.eat_keyword("step") {
                        step = Some(self.rational()?);
                    } else if self.eat_keyword("check") {
                        check = Some(self.string()?);
                    } else {
                        break;
                    }
                }
                Stmt::Flow {
                    name,
                    bivector,
                    hamiltonian,
                    start,
                    end,
                    step,
                    check,
                }
            }
            "family" => {
                let name = self.ident()?;
                self.sym('=')?;
                self.keyword("pullback")?;
                let bivector = self.ident()?;
                self.keyword("by")?;
                let map = self.ident()?;
                let gauge = if self.eat_keyword("gauge") { Some(self.ident()?) } else { None };
                self.keyword("compare")?;
                let compare = self.ident()?;
                let grid = self.eat_grid_option()?;
                Stmt::Family {
                    name,
                    bivector,
                    map,
                    gauge,
                    compare,
                    grid,
                }
            }
            "action" => {
                let name = self.ident()?;
                self.sym('=')?;
                let vectors = self.ident()?;
                self.keyword("with")?;
                let entries = self.indexed_entries()?;
                Stmt::Action { name, vectors, entries }
            }
            "positive" | "conjugation" => {
                let name = self.ident()?;
                self.sym('=')?;
                let bivector = self.ident()?;
                if kw.text == "positive" {
                    Stmt::Positive { name, bivector }
                } else {
                    Stmt::Conjugation { name, bivector }
                }
            }
            "polytope" => {
                let name = self.ident()?;
                self.sym('=')?;
                let decl = match self.peek() {
                    Tok::Str(_) => PolytopeDecl::Json(self.string()?),
                    _ => PolytopeDecl::Named(self.ident()?),
                };
                let strata = self.eat_keyword("strata");
                Stmt::Polytope { name, decl, strata }
            }
            "triple" => {
                let name = self.ident()?;
                self.sym('=')?;
                let kind = self.ident()?;
                Stmt::Triple { name, kind }
            }
            "weyl" => {
                let name = self.ident()?;
                self.sym('=')?;
                let kind = self.ident()?;
                let rank = self.small()?;
                Stmt::Weyl { name, kind, rank }
            }
            "algebra" => {
                let name = self.ident()?;
                self.sym('=')?;
                let json = self.string()?;
                Stmt::Algebra { name, json }
            }
            "associated" => {
                let name = self.ident()?;
                self.sym('=')?;
                let base = self.operand()?;
                self.keyword("x")?;
                let fiber = self.operand()?;
                let hypothesis = if self.eat_keyword("hypothesis") { Some(self.ident()?) } else { None };
                Stmt::Associated {
                    name,
                    base,
                    fiber,
                    hypothesis,
                }
            }
            other => {
                return Err(DslError::at(self.src, kw.offset, format!("unknown statement '{other}'")));
            }
        };
        self.eat_sym(';');
        Ok(s)
    }

    fn operand(&mut self) -> Result<Operand, DslError> {
        match self.peek() {
            Tok::Int(_) => {
                let at = self.offset();
                let n = self.int()?;
                u64::try_from(n)
                    .map(Operand::Count)
                    .map_err(|_| DslError::at(self.src, at, "count out of range"))
            }
            _ => Ok(Operand::Ref(self.ident()?)),
        }
    }
}

/// Parses a whole document into statements.
pub fn parse_document(src: &str) -> Result<Vec<Stmt>, DslError> {
    let mut p = Parser {
        src,
        toks: lex(src)?,
        pos: 0,
    };
    let mut out = Vec::new();
    while p.peek() != &Tok::End {
        out.push(p.stmt()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statements() {
        let src = r#"
            # ambient
            chart S (x, y, z)
            bivector pi on S { [1,2]: "1", [3,2]: "1+z^2" }
            map p : S -> M ("x", "y")
            grid G on S { x: [-1, 0, 1/2], y: [0], z: [-3/4] }
            flow F of pi h "y" from (0, 0, 0) to 13/10 check "x - arctan(z)"
            associated A = 2 x W hypothesis isotropic-orbits
        "#;
        let doc = parse_document(src).unwrap();
        assert_eq!(doc.len(), 6);
        match &doc[1] {
            Stmt::Bivector { entries, .. } => {
                assert_eq!(entries[1].0, vec![2, 1]);
                assert_eq!(entries[1].1.text, "1+z^2");
                assert_eq!(&src[entries[1].1.offset..entries[1].1.offset + 5], "1+z^2");
            }
            s => panic!("unexpected {s:?}"),
        }
        match &doc[3] {
            Stmt::Grid {
                decl: GridDecl::Axes(axes),
                ..
            } => assert_eq!(axes[0].1[2], Q::new(1.into(), 2.into())),
            s => panic!("unexpected {s:?}"),
        }
        match &doc[5] {
            Stmt::Associated { base, hypothesis, .. } => {
                assert_eq!(base, &Operand::Count(2));
                assert_eq!(hypothesis.as_ref().unwrap().text, "isotropic-orbits");
            }
            s => panic!("unexpected {s:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_document("chart S (x, y)\nbivector pi on S { [1,2] \"x\" }").unwrap_err();
        assert_eq!((e.line, e.col), (2, 26));
        assert!(e.message.contains("expected ':'"));
        let e = parse_document("chart S (x\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_document("frobnicate X").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        let e = parse_document("bivector p on S { [0,1]: \"x\" }").unwrap_err();
        assert!(e.message.contains("1-based"));
    }

    #[test]
    fn grid_option_does_not_swallow_next_statement() {
        let doc = parse_document("submersion P = p : a -> b grid G
grid H on S default").unwrap();
        assert_eq!(doc.len(), 2);
        match &doc[0] {
            Stmt::Submersion { grid, .. } => assert_eq!(grid.as_ref().unwrap().text, "G"),
            s => panic!("unexpected {s:?}"),
        }
    }
}
