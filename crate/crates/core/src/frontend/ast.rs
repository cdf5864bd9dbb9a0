//! Abstract syntax for Essence Prime models and parameter files.
//!
//! Every node carries the source position it was parsed from. Equality on
//! [`Expr`] and [`Domain`] compares structure only, so re-parsing a
//! pretty-printed tree yields an equal tree even though positions differ.

use crate::error::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Eq,
    Neq,
    Lt,
    Leq,
    Gt,
    Geq,
    LexLt,
    LexLeq,
    LexGt,
    LexGeq,
    And,
    Or,
    Imp,
    Iff,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        use BinOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            Pow => "**",
            Eq => "=",
            Neq => "!=",
            Lt => "<",
            Leq => "<=",
            Gt => ">",
            Geq => ">=",
            LexLt => "<lex",
            LexLeq => "<=lex",
            LexGt => ">lex",
            LexGeq => ">=lex",
            And => "/\\",
            Or => "\\/",
            Imp => "->",
            Iff => "<->",
        }
    }

    /// Binding power from the operator precedence table.
    pub fn precedence(self) -> i32 {
        use BinOp::*;
        match self {
            Pow => 18,
            Mul | Div | Mod => 10,
            Add | Sub => 1,
            Eq | Neq | Lt | Leq | Gt | Geq | LexLt | LexLeq | LexGt | LexGeq => 0,
            And => -1,
            Or => -2,
            Imp | Iff => -4,
        }
    }

    pub fn right_assoc(self) -> bool {
        matches!(self, BinOp::Pow)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantKind {
    ForAll,
    Exists,
    Sum,
}

impl QuantKind {
    pub fn keyword(self) -> &'static str {
        match self {
            QuantKind::ForAll => "forAll",
            QuantKind::Exists => "exists",
            QuantKind::Sum => "sum",
        }
    }
}

/// Named functions callable with `f(args)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Min,
    Max,
    Factorial,
    Popcount,
    ToInt,
    ToSet,
    Flatten,
    Sum,
    Product,
    And,
    Or,
    AllDiff,
    Gcc,
    AtLeast,
    AtMost,
    AllDiffExcept,
    Table,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        use Func::*;
        Some(match name {
            "min" => Min,
            "max" => Max,
            "factorial" => Factorial,
            "popcount" => Popcount,
            "toInt" => ToInt,
            "toSet" => ToSet,
            "flatten" => Flatten,
            "sum" => Sum,
            "product" => Product,
            "and" => And,
            "or" => Or,
            "allDiff" => AllDiff,
            "gcc" => Gcc,
            "atleast" => AtLeast,
            "atmost" => AtMost,
            "alldifferent_except" => AllDiffExcept,
            "table" => Table,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        use Func::*;
        match self {
            Min => "min",
            Max => "max",
            Factorial => "factorial",
            Popcount => "popcount",
            ToInt => "toInt",
            ToSet => "toSet",
            Flatten => "flatten",
            Sum => "sum",
            Product => "product",
            And => "and",
            Or => "or",
            AllDiff => "allDiff",
            Gcc => "gcc",
            AtLeast => "atleast",
            AtMost => "atmost",
            AllDiffExcept => "alldifferent_except",
            Table => "table",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

/// A comprehension generator `i, j : D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub vars: Vec<String>,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Ident(String),
    Matrix {
        elems: Vec<Expr>,
        index: Option<Box<Domain>>,
    },
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `x in S`, where the set is a domain expression or `toSet(..)`.
    In(Box<Expr>, Box<Domain>),
    Quant {
        kind: QuantKind,
        vars: Vec<String>,
        domain: Box<Domain>,
        body: Box<Expr>,
    },
    Comprehension {
        body: Box<Expr>,
        generators: Vec<Generator>,
        conditions: Vec<Expr>,
        index: Option<Box<Domain>>,
    },
    Call(Func, Vec<Expr>),
    Index(Box<Expr>, Vec<Expr>),
    /// Slice subscripts; `None` is a `..` marker.
    Slice(Box<Expr>, Vec<Option<Expr>>),
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    pub fn int(v: i64) -> Self {
        Expr::new(ExprKind::Int(v), Pos::default())
    }

    pub fn ident(name: &str) -> Self {
        Expr::new(ExprKind::Ident(name.to_string()), Pos::default())
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Self {
        let pos = a.pos;
        Expr::new(ExprKind::Binary(op, Box::new(a), Box::new(b)), pos)
    }

    pub fn unary(op: UnOp, a: Expr) -> Self {
        let pos = a.pos;
        Expr::new(ExprKind::Unary(op, Box::new(a)), pos)
    }

    /// Calls `f` on every direct child expression (including expressions
    /// nested in domains).
    pub fn for_each_child<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Ident(_) => {}
            ExprKind::Matrix { elems, index } => {
                elems.iter().for_each(&mut *f);
                if let Some(d) = index {
                    d.for_each_expr(f);
                }
            }
            ExprKind::Unary(_, a) => f(a),
            ExprKind::Binary(_, a, b) => {
                f(a);
                f(b);
            }
            ExprKind::In(a, d) => {
                f(a);
                d.for_each_expr(f);
            }
            ExprKind::Quant { domain, body, .. } => {
                domain.for_each_expr(f);
                f(body);
            }
            ExprKind::Comprehension { body, generators, conditions, index } => {
                f(body);
                for g in generators {
                    g.domain.for_each_expr(f);
                }
                conditions.iter().for_each(&mut *f);
                if let Some(d) = index {
                    d.for_each_expr(f);
                }
            }
            ExprKind::Call(_, args) => args.iter().for_each(f),
            ExprKind::Index(m, idx) => {
                f(m);
                idx.iter().for_each(f);
            }
            ExprKind::Slice(m, idx) => {
                f(m);
                idx.iter().flatten().for_each(f);
            }
        }
    }
}

/// One element of an integer domain's range list.
#[derive(Debug, Clone, PartialEq)]
pub enum RangeItem {
    Single(Expr),
    /// `lo..hi`; either bound may be missing (open range).
    Range(Option<Expr>, Option<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainOp {
    Union,
    Intersect,
    Minus,
}

impl DomainOp {
    pub fn keyword(self) -> &'static str {
        match self {
            DomainOp::Union => "union",
            DomainOp::Intersect => "intersect",
            DomainOp::Minus => "-",
        }
    }

    pub fn precedence(self) -> i32 {
        match self {
            DomainOp::Intersect => 2,
            DomainOp::Union | DomainOp::Minus => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Domain {
    pub kind: DomainKind,
    pub pos: Pos,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    Bool,
    /// `int` with no range list is `Int(vec![])` and denotes all integers.
    Int(Vec<RangeItem>),
    Matrix {
        index: Vec<Domain>,
        base: Box<Domain>,
    },
    /// Reference to a `letting ... be domain`.
    Named(String),
    Op(DomainOp, Box<Domain>, Box<Domain>),
    /// `toSet(X)`, only meaningful on the right of `in`.
    ToSet(Box<Expr>),
}

impl Domain {
    pub fn new(kind: DomainKind, pos: Pos) -> Self {
        Domain { kind, pos }
    }

    pub fn for_each_expr<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        match &self.kind {
            DomainKind::Bool | DomainKind::Named(_) => {}
            DomainKind::Int(items) => {
                for it in items {
                    match it {
                        RangeItem::Single(e) => f(e),
                        RangeItem::Range(a, b) => {
                            if let Some(a) = a {
                                f(a);
                            }
                            if let Some(b) = b {
                                f(b);
                            }
                        }
                    }
                }
            }
            DomainKind::Matrix { index, base } => {
                for d in index {
                    d.for_each_expr(f);
                }
                base.for_each_expr(f);
            }
            DomainKind::Op(_, a, b) => {
                a.for_each_expr(f);
                b.for_each_expr(f);
            }
            DomainKind::ToSet(e) => f(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveDir {
    Minimising,
    Maximising,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    Static,
    Sdf,
    Conflict,
    Srf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Given { names: Vec<String>, domain: Domain, pos: Pos },
    Letting { name: String, domain: Option<Domain>, value: Expr, pos: Pos },
    LettingDomain { name: String, domain: Domain, pos: Pos },
    Find { names: Vec<String>, domain: Domain, pos: Pos },
    Where { conditions: Vec<Expr>, pos: Pos },
    Objective { dir: ObjectiveDir, expr: Expr, pos: Pos },
    BranchingOn { list: Expr, pos: Pos },
    Heuristic { heuristic: Heuristic, pos: Pos },
    SuchThat { constraints: Vec<Expr>, pos: Pos },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Model {
    /// Version from the `language ESSENCE' x.y` header.
    pub version: String,
    pub statements: Vec<Statement>,
}

impl Model {
    pub fn constraints(&self) -> impl Iterator<Item = &Expr> {
        self.statements.iter().flat_map(|s| match s {
            Statement::SuchThat { constraints, .. } => constraints.iter().collect::<Vec<_>>(),
            _ => Vec::new(),
        })
    }

    pub fn objective(&self) -> Option<(ObjectiveDir, &Expr)> {
        self.statements.iter().find_map(|s| match s {
            Statement::Objective { dir, expr, .. } => Some((*dir, expr)),
            _ => None,
        })
    }
}

/// A parameter file: ordered `letting name = value` bindings.
pub type ParamBindings = Vec<(String, Expr)>;
