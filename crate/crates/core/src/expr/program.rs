use super::{apply_binary, apply_func, BinOp, EvalError, Expr, Func};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Push(f64),
    Var,
    Neg,
    Bin(BinOp),
    Call(Func),
}

/// Instructions of the unchecked fast path; a `Push`/`Var` directly
/// feeding a binary operator is fused into it.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Fast {
    Push(f64),
    Var,
    Neg,
    Call(Func),
    Bin(BinOp),
    BinConst(BinOp, f64),
    BinVar(BinOp),
}

const INLINE_STACK: usize = 32;
const SMALL_STACK: usize = 8;

/// Postfix form of an [`Expr`] for hot evaluation loops.
///
/// Produces bit-identical results to [`Expr::evaluate`].
#[derive(Debug, Clone)]
pub struct Program {
    code: Vec<Instr>,
    // rendered subexpression per instruction, for error messages
    nodes: Vec<String>,
    max_depth: usize,
    fast: Vec<Fast>,
}

impl Program {
    pub fn compile(expr: &Expr) -> Program {
        let mut program = Program {
            code: Vec::with_capacity(expr.size()),
            nodes: Vec::with_capacity(expr.size()),
            max_depth: 0,
            fast: Vec::new(),
        };
        let mut depth = 0;
        program.emit(expr, &mut depth);
        program.fast = fuse(&program.code);
        program
    }

    fn emit(&mut self, expr: &Expr, depth: &mut usize) {
        let instr = match expr {
            Expr::Num(v) => Instr::Push(*v),
            Expr::Const(c) => Instr::Push(c.value()),
            Expr::Var => Instr::Var,
            Expr::Neg(inner) => {
                self.emit(inner, depth);
                Instr::Neg
            }
            Expr::Call(func, arg) => {
                self.emit(arg, depth);
                Instr::Call(*func)
            }
            Expr::Binary(op, l, r) => {
                self.emit(l, depth);
                self.emit(r, depth);
                *depth -= 1;
                Instr::Bin(*op)
            }
        };
        if matches!(instr, Instr::Push(_) | Instr::Var) {
            *depth += 1;
            self.max_depth = self.max_depth.max(*depth);
        }
        self.code.push(instr);
        self.nodes.push(expr.to_string());
    }

    #[inline]
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        if self.max_depth <= INLINE_STACK {
            let fast = if self.max_depth <= SMALL_STACK {
                self.run_fast::<SMALL_STACK>(t)
            } else {
                self.run_fast::<INLINE_STACK>(t)
            };
            if let Some(v) = fast {
                return Ok(v);
            }
            let mut stack = [0.0f64; INLINE_STACK];
            self.run(t, &mut stack)
        } else {
            let mut stack = vec![0.0f64; self.max_depth];
            self.run(t, &mut stack)
        }
    }

    /// Same arithmetic as [`Self::run`] in the same order, with the checks
    /// folded into one flag; `None` sends the caller to the checked path.
    #[inline]
    fn run_fast<const N: usize>(&self, t: f64) -> Option<f64> {
        let mut stack = [0.0f64; N];
        let mut sp = 0usize;
        let mut ok = true;
        for instr in &self.fast {
            match *instr {
                Fast::Push(v) => {
                    stack[sp] = v;
                    sp += 1;
                }
                Fast::Var => {
                    stack[sp] = t;
                    sp += 1;
                }
                Fast::Neg => stack[sp - 1] = -stack[sp - 1],
                Fast::Call(func) => {
                    let x = stack[sp - 1];
                    let v = raw_func(func, x, &mut ok);
                    ok &= v.is_finite();
                    stack[sp - 1] = v;
                }
                Fast::Bin(op) => {
                    sp -= 1;
                    let v = raw_binary(op, stack[sp - 1], stack[sp], &mut ok);
                    ok &= v.is_finite();
                    stack[sp - 1] = v;
                }
                Fast::BinConst(op, c) => {
                    let v = raw_binary(op, stack[sp - 1], c, &mut ok);
                    ok &= v.is_finite();
                    stack[sp - 1] = v;
                }
                Fast::BinVar(op) => {
                    let v = raw_binary(op, stack[sp - 1], t, &mut ok);
                    ok &= v.is_finite();
                    stack[sp - 1] = v;
                }
            }
        }
        let out = stack[0];
        (ok && out.is_finite()).then_some(out)
    }

    fn run(&self, t: f64, stack: &mut [f64]) -> Result<f64, EvalError> {
        let mut sp = 0usize;
        for (pc, instr) in self.code.iter().enumerate() {
            let value = match *instr {
                Instr::Push(v) => {
                    stack[sp] = v;
                    sp += 1;
                    continue;
                }
                Instr::Var => {
                    stack[sp] = t;
                    sp += 1;
                    continue;
                }
                Instr::Neg => -stack[sp - 1],
                Instr::Call(func) => {
                    apply_func(func, stack[sp - 1]).map_err(|reason| self.fail(pc, t, reason))?
                }
                Instr::Bin(op) => {
                    sp -= 1;
                    apply_binary(op, stack[sp - 1], stack[sp])
                        .map_err(|reason| self.fail(pc, t, reason))?
                }
            };
            if !value.is_finite() {
                return Err(self.fail(pc, t, "non-finite result"));
            }
            stack[sp - 1] = value;
        }
        let out = stack[0];
        if out.is_finite() {
            Ok(out)
        } else {
            // only reachable for a bare literal, which the parser never makes non-finite
            Err(self.fail(self.code.len() - 1, t, "non-finite result"))
        }
    }

    fn fail(&self, pc: usize, t: f64, reason: &'static str) -> EvalError {
        EvalError {
            node: self.nodes[pc].clone(),
            t,
            reason,
        }
    }
}

fn fuse(code: &[Instr]) -> Vec<Fast> {
    let mut out: Vec<Fast> = Vec::with_capacity(code.len());
    for instr in code {
        let next = match *instr {
            Instr::Push(v) => Fast::Push(v),
            Instr::Var => Fast::Var,
            Instr::Neg => Fast::Neg,
            Instr::Call(f) => Fast::Call(f),
            Instr::Bin(op) => match out.last() {
                // the right operand was pushed last, over the left one
                Some(Fast::Push(c)) if out.len() >= 2 => {
                    let c = *c;
                    out.pop();
                    Fast::BinConst(op, c)
                }
                Some(Fast::Var) if out.len() >= 2 => {
                    out.pop();
                    Fast::BinVar(op)
                }
                _ => Fast::Bin(op),
            },
        };
        out.push(next);
    }
    out
}

#[inline(always)]
fn raw_binary(op: BinOp, a: f64, b: f64, ok: &mut bool) -> f64 {
    match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => {
            *ok &= b != 0.0;
            a / b
        }
        BinOp::Pow => {
            *ok &= !(a == 0.0 && b < 0.0) && !(a < 0.0 && b.fract() != 0.0);
            a.powf(b)
        }
    }
}

#[inline(always)]
fn raw_func(func: Func, x: f64, ok: &mut bool) -> f64 {
    match func {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Exp => x.exp(),
        Func::Ln => {
            *ok &= x > 0.0;
            x.ln()
        }
        Func::Sqrt => {
            *ok &= x >= 0.0;
            x.sqrt()
        }
        Func::Abs => x.abs(),
    }
}
