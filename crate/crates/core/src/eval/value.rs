use std::fmt;
use std::rc::Rc;

use super::domain::IntDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseKind {
    Int,
    Bool,
}

/// One dimension of a matrix; inner dimensions are nested matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixValue {
    pub index: IntDomain,
    pub elems: Vec<Value>,
    /// Kind of the innermost scalars, kept so that empty matrices are typed.
    pub base: BaseKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Matrix(Rc<MatrixValue>),
}

impl Value {
    pub fn matrix(index: IntDomain, elems: Vec<Value>, base: BaseKind) -> Value {
        debug_assert_eq!(index.size(), Some(elems.len() as u64));
        Value::Matrix(Rc::new(MatrixValue { index, elems, base }))
    }

    /// A matrix indexed from 1.
    pub fn vector(elems: Vec<Value>, base: BaseKind) -> Value {
        let n = elems.len() as i64;
        Value::matrix(IntDomain::range(1, n), elems, base)
    }

    /// Integer view; booleans convert to 0/1.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            Value::Bool(b) => Some(*b as i64),
            Value::Matrix(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&MatrixValue> {
        match self {
            Value::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn base_kind(&self) -> BaseKind {
        match self {
            Value::Int(_) => BaseKind::Int,
            Value::Bool(_) => BaseKind::Bool,
            Value::Matrix(m) => m.base,
        }
    }

    /// Number of dimensions (0 for scalars).
    pub fn dims(&self) -> usize {
        match self {
            Value::Matrix(m) => 1 + m.elems.first().map_or(0, Value::dims),
            _ => 0,
        }
    }

    /// Scalars in row-major order.
    pub fn flatten(&self) -> Vec<Value> {
        let mut out = Vec::new();
        fn go(v: &Value, out: &mut Vec<Value>) {
            match v {
                Value::Matrix(m) => m.elems.iter().for_each(|e| go(e, out)),
                _ => out.push(v.clone()),
            }
        }
        go(self, &mut out);
        out
    }

    /// Writes a matrix without index domains when every dimension is
    /// indexed from 1, as in solution files: `[[2,3], [1,2]]`.
    pub fn to_solution_string(&self) -> String {
        match self {
            Value::Matrix(m) => {
                let nested = m.elems.first().is_some_and(|e| matches!(e, Value::Matrix(_)));
                let sep = if nested { ", " } else { "," };
                let inner: Vec<String> = m.elems.iter().map(Value::to_solution_string).collect();
                let from_one = m.index.is_empty() || m.index == IntDomain::range(1, m.elems.len() as i64);
                if from_one {
                    format!("[{}]", inner.join(sep))
                } else {
                    format!("[{};{}]", inner.join(sep), m.index)
                }
            }
            _ => self.to_string(),
        }
    }
}

impl fmt::Display for Value {
    /// Canonical form with every index domain spelled out: `[1,2,3;int(1..3)]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Matrix(m) => {
                write!(f, "[")?;
                for (k, e) in m.elems.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ";{}]", m.index)
            }
        }
    }
}

/// A constant domain: the type of a given, find or quantifier variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DomainValue {
    Bool,
    Int(IntDomain),
    Matrix { index: Vec<IntDomain>, base: Box<DomainValue> },
}

impl DomainValue {
    pub fn base_kind(&self) -> BaseKind {
        match self {
            DomainValue::Bool => BaseKind::Bool,
            DomainValue::Int(_) => BaseKind::Int,
            DomainValue::Matrix { base, .. } => base.base_kind(),
        }
    }

    /// Scalar value set; booleans are `{0,1}`.
    pub fn int_domain(&self) -> Option<IntDomain> {
        match self {
            DomainValue::Bool => Some(IntDomain::boolean()),
            DomainValue::Int(d) => Some(d.clone()),
            DomainValue::Matrix { .. } => None,
        }
    }

    /// Whether `v` has this domain's shape and all scalars lie in it.
    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (DomainValue::Bool, Value::Bool(_)) => true,
            (DomainValue::Int(d), Value::Int(x)) => d.contains(*x),
            (DomainValue::Matrix { index, base }, Value::Matrix(_)) => {
                fn go(index: &[IntDomain], base: &DomainValue, v: &Value) -> bool {
                    match index.split_first() {
                        None => base.contains(v),
                        Some((first, rest)) => match v {
                            Value::Matrix(m) => {
                                first.size() == Some(m.elems.len() as u64)
                                    && m.elems.iter().all(|e| go(rest, base, e))
                            }
                            _ => false,
                        },
                    }
                }
                go(index, base, v)
            }
            _ => false,
        }
    }

    /// All values of a finite scalar or matrix domain, in ascending
    /// lexicographic order of the flattened contents.
    pub fn enumerate(&self) -> Option<Vec<Value>> {
        match self {
            DomainValue::Bool => Some(vec![Value::Bool(false), Value::Bool(true)]),
            DomainValue::Int(d) => {
                if !d.is_finite() {
                    return None;
                }
                Some(d.iter().map(Value::Int).collect())
            }
            DomainValue::Matrix { index, base } => {
                let scalars = base.enumerate()?;
                let mut cells: u64 = 1;
                for ix in index {
                    cells = cells.checked_mul(ix.size()?)?;
                }
                let total = (scalars.len() as u64).checked_pow(cells as u32)?;
                if total > 10_000_000 {
                    return None;
                }
                let mut out = Vec::with_capacity(total as usize);
                let mut digits = vec![0usize; cells as usize];
                loop {
                    let flat: Vec<Value> = digits.iter().map(|&d| scalars[d].clone()).collect();
                    out.push(reshape(index, &flat, base.base_kind()));
                    // odometer with the last cell varying fastest
                    let mut k = digits.len();
                    loop {
                        if k == 0 {
                            return Some(out);
                        }
                        k -= 1;
                        digits[k] += 1;
                        if digits[k] < scalars.len() {
                            break;
                        }
                        digits[k] = 0;
                    }
                    if digits.is_empty() {
                        return Some(out);
                    }
                }
            }
        }
    }
}

/// Builds a nested matrix from row-major scalars.
pub fn reshape(index: &[IntDomain], flat: &[Value], base: BaseKind) -> Value {
    match index.split_first() {
        None => flat[0].clone(),
        Some((first, rest)) => {
            let n = first.size().unwrap_or(0) as usize;
            let stride = if n == 0 { 0 } else { flat.len() / n };
            let elems = (0..n).map(|k| reshape(rest, &flat[k * stride..(k + 1) * stride], base)).collect();
            Value::matrix(first.clone(), elems, base)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_and_solution_printing() {
        let v = Value::vector(vec![Value::Int(1), Value::Int(2), Value::Int(3)], BaseKind::Int);
        assert_eq!(v.to_string(), "[1,2,3;int(1..3)]");
        let m = Value::vector(
            vec![
                Value::vector(vec![Value::Int(2), Value::Int(3)], BaseKind::Int),
                Value::vector(vec![Value::Int(1), Value::Int(2)], BaseKind::Int),
            ],
            BaseKind::Int,
        );
        assert_eq!(m.to_solution_string(), "[[2,3], [1,2]]");
        let off = Value::matrix(IntDomain::range(7, 8), vec![Value::Bool(true), Value::Bool(false)], BaseKind::Bool);
        assert_eq!(off.to_solution_string(), "[true,false;int(7..8)]");
    }

    #[test]
    fn matrix_domain_enumeration_is_lexicographic() {
        let d = DomainValue::Matrix {
            index: vec![IntDomain::range(1, 2)],
            base: Box::new(DomainValue::Int(IntDomain::range(1, 2))),
        };
        let all: Vec<String> = d.enumerate().unwrap().iter().map(|v| v.to_solution_string()).collect();
        assert_eq!(all, ["[1,1]", "[1,2]", "[2,1]", "[2,2]"]);
    }
}
