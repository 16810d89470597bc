//! Abstract syntax of the quantum WHILE language.

use crate::state::Gate;

/// Single-qubit computational-basis test `q == value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cond {
    pub qubit: usize,
    pub value: u8,
}

impl Cond {
    pub fn new(qubit: usize, value: u8) -> Self {
        assert!(value <= 1, "condition value is a bit");
        Self { qubit, value }
    }

    pub fn negate(&self) -> Self {
        Self {
            qubit: self.qubit,
            value: 1 - self.value,
        }
    }
}

/// Statements; sequencing is left-associative and executes left to right.
#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Skip,
    Apply(Gate, Vec<usize>),
    Measure(usize),
    Seq(Box<Stmt>, Box<Stmt>),
    If(Cond, Box<Stmt>, Box<Stmt>),
    While(Cond, Box<Stmt>),
}

impl Stmt {
    pub fn seq(first: Stmt, second: Stmt) -> Stmt {
        Stmt::Seq(Box::new(first), Box::new(second))
    }

    /// Sequences a list of statements left-associatively; empty is `skip`.
    pub fn seq_all(stmts: Vec<Stmt>) -> Stmt {
        let mut iter = stmts.into_iter();
        let Some(first) = iter.next() else {
            return Stmt::Skip;
        };
        iter.fold(first, Stmt::seq)
    }

    /// Largest qubit index referenced, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        match self {
            Stmt::Skip => None,
            Stmt::Apply(_, targets) => targets.iter().copied().max(),
            Stmt::Measure(q) => Some(*q),
            Stmt::Seq(a, b) => a.max_qubit().max(b.max_qubit()),
            Stmt::If(c, a, b) => a
                .max_qubit()
                .max(b.max_qubit())
                .max(Some(c.qubit)),
            Stmt::While(c, body) => body.max_qubit().max(Some(c.qubit)),
        }
    }

    /// Number of `while` nodes, in pre-order.
    pub fn loop_count(&self) -> usize {
        match self {
            Stmt::Skip | Stmt::Apply(..) | Stmt::Measure(_) => 0,
            Stmt::Seq(a, b) | Stmt::If(_, a, b) => a.loop_count() + b.loop_count(),
            Stmt::While(_, body) => 1 + body.loop_count(),
        }
    }
}

/// A statement together with its declared register width.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub qubits: usize,
    pub body: Stmt,
}

impl Program {
    pub fn new(qubits: usize, body: Stmt) -> Self {
        Self { qubits, body }
    }
}
