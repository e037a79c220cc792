use crate::ops;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Ident(String),
    Int(String),
    Binary(String, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, _, _) => ops::precedence(op).expect("parsed operator"),
            _ => u8::MAX,
        }
    }

    /// Canonical text: single spaces around operators, parentheses only where the
    /// left-associative precedence table requires them.
    pub fn to_text(&self) -> String {
        match self {
            Expr::Ident(s) | Expr::Int(s) => s.clone(),
            Expr::Binary(op, _, _) => {
                let (lt, rt) = self.operand_texts().expect("binary");
                format!("{lt} {op} {rt}")
            }
        }
    }

    /// Operand texts of a binary expression as they appear inside it.
    pub fn operand_texts(&self) -> Option<(String, String)> {
        let Expr::Binary(_, l, r) = self else { return None };
        let p = self.precedence();
        let wrap = |e: &Expr, need: bool| if need { format!("({})", e.to_text()) } else { e.to_text() };
        Some((wrap(l, l.precedence() < p), wrap(r, r.precedence() <= p)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Decl { name: String, init: Option<Expr> },
    Assign { lhs: String, rhs: Expr },
    If { cond: Expr, then_block: Vec<Stmt>, else_block: Vec<Stmt> },
    While { cond: Expr, body: Vec<Stmt> },
    Return(Option<Expr>),
    Break,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub return_type: String,
    pub name: String,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub methods: Vec<MethodDecl>,
}
