use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PebbleOp {
    Nop,
    Drop(usize),
    Lift(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("operation {0} not enabled")]
pub struct NotEnabled(pub PebbleOp);

impl PebbleOp {
    pub fn index(&self) -> Option<usize> {
        match *self {
            PebbleOp::Nop => None,
            PebbleOp::Drop(i) | PebbleOp::Lift(i) => Some(i),
        }
    }

    pub fn is_nop(&self) -> bool {
        matches!(self, PebbleOp::Nop)
    }

    /// `drop_i` pushes `h` when `|peb| = i-1`; `lift_i` pops when `|peb| = i` and `peb_i = h`.
    pub fn apply(&self, peb: &[usize], h: usize) -> Result<Vec<usize>, NotEnabled> {
        match *self {
            PebbleOp::Nop => Ok(peb.to_vec()),
            PebbleOp::Drop(i) if i >= 1 && peb.len() == i - 1 => {
                let mut v = peb.to_vec();
                v.push(h);
                Ok(v)
            }
            PebbleOp::Lift(i) if i >= 1 && peb.len() == i && peb[i - 1] == h => Ok(peb[..i - 1].to_vec()),
            _ => Err(NotEnabled(*self)),
        }
    }

    pub fn enabled(&self, peb: &[usize], h: usize) -> bool {
        match *self {
            PebbleOp::Nop => true,
            PebbleOp::Drop(i) => i >= 1 && peb.len() == i - 1,
            PebbleOp::Lift(i) => i >= 1 && peb.len() == i && peb[i - 1] == h,
        }
    }

    pub fn reverse(&self) -> PebbleOp {
        match *self {
            PebbleOp::Nop => PebbleOp::Nop,
            PebbleOp::Drop(i) => PebbleOp::Lift(i),
            PebbleOp::Lift(i) => PebbleOp::Drop(i),
        }
    }

    pub fn shift(&self, d: usize) -> PebbleOp {
        match *self {
            PebbleOp::Nop => PebbleOp::Nop,
            PebbleOp::Drop(i) => PebbleOp::Drop(i + d),
            PebbleOp::Lift(i) => PebbleOp::Lift(i + d),
        }
    }
}

pub fn apply_op(op: PebbleOp, peb: &[usize], h: usize) -> Result<Vec<usize>, NotEnabled> {
    op.apply(peb, h)
}

pub fn reverse_op(op: PebbleOp) -> PebbleOp {
    op.reverse()
}

pub fn shift_op(op: PebbleOp, d: usize) -> PebbleOp {
    op.shift(d)
}

impl fmt::Display for PebbleOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PebbleOp::Nop => write!(f, "nop"),
            PebbleOp::Drop(i) => write!(f, "drop{i}"),
            PebbleOp::Lift(i) => write!(f, "lift{i}"),
        }
    }
}
