//! Fully parenthesised printing; the output reparses to an equal tree.

use std::fmt::Write;

use super::ast::*;

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

pub fn domain_to_string(d: &Domain) -> String {
    let mut s = String::new();
    write_domain(&mut s, d);
    s
}

fn write_list(out: &mut String, items: &[Expr]) {
    for (k, e) in items.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        write_expr(out, e);
    }
}

fn write_index(out: &mut String, index: &Option<Box<Domain>>) {
    if let Some(d) = index {
        out.push_str("; ");
        write_domain(out, d);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Int(v) if *v < 0 => {
            // only reachable for synthesised trees; reparses as a negation
            let _ = write!(out, "(-{})", v.unsigned_abs());
        }
        ExprKind::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Ident(n) => out.push_str(n),
        ExprKind::Matrix { elems, index } => {
            out.push('[');
            write_list(out, elems);
            write_index(out, index);
            out.push(']');
        }
        ExprKind::Unary(UnOp::Abs, a) => {
            out.push('|');
            write_expr(out, a);
            out.push('|');
        }
        ExprKind::Unary(op, a) => {
            out.push_str(if *op == UnOp::Neg { "(-" } else { "(!" });
            write_expr(out, a);
            out.push(')');
        }
        ExprKind::Binary(op, a, b) => {
            out.push('(');
            write_expr(out, a);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, b);
            out.push(')');
        }
        ExprKind::In(a, d) => {
            out.push('(');
            write_expr(out, a);
            out.push_str(" in ");
            write_domain(out, d);
            out.push(')');
        }
        ExprKind::Quant { kind, vars, domain, body } => {
            let _ = write!(out, "({} {} : ", kind.keyword(), vars.join(", "));
            write_domain(out, domain);
            out.push_str(" . ");
            write_expr(out, body);
            out.push(')');
        }
        ExprKind::Comprehension { body, generators, conditions, index } => {
            out.push('[');
            write_expr(out, body);
            out.push_str(" | ");
            for (k, g) in generators.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{} : ", g.vars.join(", "));
                write_domain(out, &g.domain);
            }
            for c in conditions {
                out.push_str(", ");
                write_expr(out, c);
            }
            write_index(out, index);
            out.push(']');
        }
        ExprKind::Call(f, args) => {
            out.push_str(f.name());
            out.push('(');
            write_list(out, args);
            out.push(')');
        }
        ExprKind::Index(m, idx) => {
            write_expr(out, m);
            out.push('[');
            write_list(out, idx);
            out.push(']');
        }
        ExprKind::Slice(m, idx) => {
            write_expr(out, m);
            out.push('[');
            for (k, s) in idx.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                match s {
                    Some(e) => write_expr(out, e),
                    None => out.push_str(".."),
                }
            }
            out.push(']');
        }
    }
}

fn write_domain(out: &mut String, d: &Domain) {
    match &d.kind {
        DomainKind::Bool => out.push_str("bool"),
        DomainKind::Int(items) if items.is_empty() => out.push_str("int"),
        DomainKind::Int(items) => {
            out.push_str("int(");
            for (k, it) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                match it {
                    RangeItem::Single(e) => write_expr(out, e),
                    RangeItem::Range(a, b) => {
                        if let Some(a) = a {
                            write_expr(out, a);
                        }
                        out.push_str("..");
                        if let Some(b) = b {
                            write_expr(out, b);
                        }
                    }
                }
            }
            out.push(')');
        }
        DomainKind::Matrix { index, base } => {
            out.push_str("matrix indexed by [");
            for (k, ix) in index.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_domain(out, ix);
            }
            out.push_str("] of ");
            write_domain(out, base);
        }
        DomainKind::Named(n) => out.push_str(n),
        DomainKind::Op(op, a, b) => {
            out.push('(');
            write_domain(out, a);
            let _ = write!(out, " {} ", op.keyword());
            write_domain(out, b);
            out.push(')');
        }
        DomainKind::ToSet(e) => {
            out.push_str("toSet(");
            write_expr(out, e);
            out.push(')');
        }
    }
}

pub fn model_to_string(m: &Model) -> String {
    let mut out = format!("language ESSENCE' {}\n", m.version);
    for s in &m.statements {
        match s {
            Statement::Given { names, domain, .. } => {
                let _ = writeln!(out, "given {} : {}", names.join(", "), domain_to_string(domain));
            }
            Statement::Find { names, domain, .. } => {
                let _ = writeln!(out, "find {} : {}", names.join(", "), domain_to_string(domain));
            }
            Statement::Letting { name, domain: Some(d), value, .. } => {
                let _ = writeln!(
                    out,
                    "letting {name} : {} = {}",
                    domain_to_string(d),
                    expr_to_string(value)
                );
            }
            Statement::Letting { name, domain: None, value, .. } => {
                let _ = writeln!(out, "letting {name} = {}", expr_to_string(value));
            }
            Statement::LettingDomain { name, domain, .. } => {
                let _ = writeln!(out, "letting {name} be domain {}", domain_to_string(domain));
            }
            Statement::Where { conditions, .. } => {
                let mut s = String::new();
                write_list(&mut s, conditions);
                let _ = writeln!(out, "where {s}");
            }
            Statement::Objective { dir, expr, .. } => {
                let kw = match dir {
                    ObjectiveDir::Minimising => "minimising",
                    ObjectiveDir::Maximising => "maximising",
                };
                let _ = writeln!(out, "{kw} {}", expr_to_string(expr));
            }
            Statement::BranchingOn { list, .. } => {
                let _ = writeln!(out, "branching on {}", expr_to_string(list));
            }
            Statement::Heuristic { heuristic, .. } => {
                let h = match heuristic {
                    Heuristic::Static => "static",
                    Heuristic::Sdf => "sdf",
                    Heuristic::Conflict => "conflict",
                    Heuristic::Srf => "srf",
                };
                let _ = writeln!(out, "heuristic {h}");
            }
            Statement::SuchThat { constraints, .. } => {
                out.push_str("such that\n");
                for (k, c) in constraints.iter().enumerate() {
                    out.push_str("    ");
                    write_expr(&mut out, c);
                    out.push_str(if k + 1 < constraints.len() { ",\n" } else { "\n" });
                }
            }
        }
    }
    out
}
