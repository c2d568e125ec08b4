//! The built-in primitive recursive signature plus a registry for user
//! additions. Each symbol carries an arity, an evaluator on naturals, and a
//! list of defining-equation schemas used for axiom recognition.
//!
//! In equation schemas, `NumVar(k)` is a metavariable matching any number
//! term; nonlinear occurrences must match equal terms.

use super::{NumTerm, VarIdx};
use std::collections::BTreeMap;

pub type PrimId = u16;

pub struct PrimDef {
    pub name: String,
    pub arity: usize,
    pub eval: fn(&[u64]) -> u64,
    /// Defining axiom schemas as (lhs, rhs) pairs over metavariables.
    pub equations: Vec<(NumTerm, NumTerm)>,
}

pub struct PrimTable {
    defs: Vec<PrimDef>,
    by_name: BTreeMap<String, PrimId>,
}

fn mv(k: VarIdx) -> NumTerm {
    NumTerm::NumVar(k)
}

fn p(id: PrimId, args: Vec<NumTerm>) -> NumTerm {
    NumTerm::PrimApp(id, args)
}

// Cantor pairing and its projections.
fn cantor_pair(a: u64, b: u64) -> u64 {
    let s = a.saturating_add(b);
    s.saturating_mul(s.saturating_add(1)) / 2 + b
}

fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 2) <= n + x + 1 && (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

fn cantor_unpair(n: u64) -> (u64, u64) {
    let w = (isqrt(8u64.saturating_mul(n).saturating_add(1)).saturating_sub(1)) / 2;
    let t = w * (w + 1) / 2;
    let b = n - t;
    (w - b, b)
}

// Sequence coding: empty = 0, snoc(s, x) = pair(s, x) + 1.
fn seq_decode(mut s: u64) -> Vec<u64> {
    let mut rev = Vec::new();
    while s > 0 {
        let (rest, x) = cantor_unpair(s - 1);
        rev.push(x);
        s = rest;
        if rev.len() > 64 {
            break; // malformed huge code; bail out
        }
    }
    rev.reverse();
    rev
}

impl PrimTable {
    /// The fixed built-in signature.
    pub fn standard() -> PrimTable {
        let mut t = PrimTable { defs: Vec::new(), by_name: BTreeMap::new() };

        // Ids are assigned in registration order; keep this order stable.
        let add = t.register_raw("add", 2, |a| a[0].saturating_add(a[1]));
        let mul = t.register_raw("mul", 2, |a| a[0].saturating_mul(a[1]));
        let pred = t.register_raw("pred", 1, |a| a[0].saturating_sub(1));
        let sub = t.register_raw("sub", 2, |a| a[0].saturating_sub(a[1]));
        let pair = t.register_raw("pair", 2, |a| cantor_pair(a[0], a[1]));
        let proj1 = t.register_raw("proj1", 1, |a| cantor_unpair(a[0]).0);
        let proj2 = t.register_raw("proj2", 1, |a| cantor_unpair(a[0]).1);
        let snoc = t.register_raw("snoc", 2, |a| cantor_pair(a[0], a[1]).saturating_add(1));
        let len = t.register_raw("len", 1, |a| seq_decode(a[0]).len() as u64);
        let get = t.register_raw("get", 2, |a| {
            let items = seq_decode(a[0]);
            usize::try_from(a[1]).ok().and_then(|i| items.get(i).copied()).unwrap_or(0)
        });
        let _bmu = t.register_raw("bmu", 1, |a| {
            let items = seq_decode(a[0]);
            items.iter().position(|&v| v == 0).map(|i| i as u64).unwrap_or(items.len() as u64)
        });
        let eqc = t.register_raw("eqc", 2, |a| u64::from(a[0] == a[1]));
        let ltc = t.register_raw("ltc", 2, |a| u64::from(a[0] < a[1]));

        let s = NumTerm::succ;
        let zero = || NumTerm::Zero;

        // add(t, 0) = t ; add(t, S(s)) = S(add(t, s))
        t.defs[add as usize].equations = vec![
            (p(add, vec![mv(0), zero()]), mv(0)),
            (p(add, vec![mv(0), s(mv(1))]), s(p(add, vec![mv(0), mv(1)]))),
        ];
        // mul(t, 0) = 0 ; mul(t, S(s)) = add(mul(t, s), t)
        t.defs[mul as usize].equations = vec![
            (p(mul, vec![mv(0), zero()]), zero()),
            (p(mul, vec![mv(0), s(mv(1))]), p(add, vec![p(mul, vec![mv(0), mv(1)]), mv(0)])),
        ];
        // pred(0) = 0 ; pred(S(t)) = t
        t.defs[pred as usize].equations =
            vec![(p(pred, vec![zero()]), zero()), (p(pred, vec![s(mv(0))]), mv(0))];
        // sub(t, 0) = t ; sub(t, S(s)) = pred(sub(t, s))
        t.defs[sub as usize].equations = vec![
            (p(sub, vec![mv(0), zero()]), mv(0)),
            (p(sub, vec![mv(0), s(mv(1))]), p(pred, vec![p(sub, vec![mv(0), mv(1)])])),
        ];
        // proj1(pair(t, s)) = t ; proj2(pair(t, s)) = s
        t.defs[proj1 as usize].equations =
            vec![(p(proj1, vec![p(pair, vec![mv(0), mv(1)])]), mv(0))];
        t.defs[proj2 as usize].equations =
            vec![(p(proj2, vec![p(pair, vec![mv(0), mv(1)])]), mv(1))];
        // len(0) = 0 ; len(snoc(s, x)) = S(len(s)) ; get(snoc(s, x), len(s)) = x
        t.defs[len as usize].equations = vec![
            (p(len, vec![zero()]), zero()),
            (p(len, vec![p(snoc, vec![mv(0), mv(1)])]), s(p(len, vec![mv(0)]))),
        ];
        t.defs[get as usize].equations =
            vec![(p(get, vec![p(snoc, vec![mv(0), mv(1)]), p(len, vec![mv(0)])]), mv(1))];
        // eqc(0, 0) = 1 ; eqc(S t, 0) = 0 ; eqc(0, S t) = 0 ; eqc(S t, S s) = eqc(t, s)
        t.defs[eqc as usize].equations = vec![
            (p(eqc, vec![zero(), zero()]), s(zero())),
            (p(eqc, vec![s(mv(0)), zero()]), zero()),
            (p(eqc, vec![zero(), s(mv(0))]), zero()),
            (p(eqc, vec![s(mv(0)), s(mv(1))]), p(eqc, vec![mv(0), mv(1)])),
        ];
        // ltc(t, 0) = 0 ; ltc(0, S t) = 1 ; ltc(S t, S s) = ltc(t, s)
        t.defs[ltc as usize].equations = vec![
            (p(ltc, vec![mv(0), zero()]), zero()),
            (p(ltc, vec![zero(), s(mv(0))]), s(zero())),
            (p(ltc, vec![s(mv(0)), s(mv(1))]), p(ltc, vec![mv(0), mv(1)])),
        ];

        t
    }

    fn register_raw(&mut self, name: &str, arity: usize, eval: fn(&[u64]) -> u64) -> PrimId {
        let id = self.defs.len() as PrimId;
        self.defs.push(PrimDef { name: name.to_string(), arity, eval, equations: Vec::new() });
        self.by_name.insert(name.to_string(), id);
        id
    }

    /// Register a user symbol. Returns its id, or None if the name is taken.
    pub fn register(
        &mut self,
        name: &str,
        arity: usize,
        eval: fn(&[u64]) -> u64,
        equations: Vec<(NumTerm, NumTerm)>,
    ) -> Option<PrimId> {
        if self.by_name.contains_key(name) {
            return None;
        }
        let id = self.register_raw(name, arity, eval);
        self.defs[id as usize].equations = equations;
        Some(id)
    }

    pub fn lookup(&self, name: &str) -> Option<PrimId> {
        self.by_name.get(name).copied()
    }

    pub fn def(&self, id: PrimId) -> &PrimDef {
        &self.defs[id as usize]
    }

    pub fn name(&self, id: PrimId) -> &str {
        &self.defs[id as usize].name
    }

    pub fn arity(&self, id: PrimId) -> usize {
        self.defs[id as usize].arity
    }

    pub fn eval(&self, id: PrimId, args: &[u64]) -> u64 {
        (self.defs[id as usize].eval)(args)
    }

    pub fn ids(&self) -> impl Iterator<Item = PrimId> + '_ {
        (0..self.defs.len() as PrimId).into_iter()
    }

    pub fn id_add(&self) -> PrimId {
        self.lookup("add").unwrap()
    }
    pub fn id_mul(&self) -> PrimId {
        self.lookup("mul").unwrap()
    }
    pub fn id_sub(&self) -> PrimId {
        self.lookup("sub").unwrap()
    }
    pub fn id_pair(&self) -> PrimId {
        self.lookup("pair").unwrap()
    }
    pub fn id_eqc(&self) -> PrimId {
        self.lookup("eqc").unwrap()
    }
    pub fn id_ltc(&self) -> PrimId {
        self.lookup("ltc").unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_inverts() {
        for a in 0..30 {
            for b in 0..30 {
                assert_eq!(cantor_unpair(cantor_pair(a, b)), (a, b));
            }
        }
    }

    #[test]
    fn sequences_decode() {
        let t = PrimTable::standard();
        let snoc = t.lookup("snoc").unwrap();
        let len = t.lookup("len").unwrap();
        let get = t.lookup("get").unwrap();
        let mut s = 0;
        for x in [5, 0, 7] {
            s = t.eval(snoc, &[s, x]);
        }
        assert_eq!(t.eval(len, &[s]), 3);
        assert_eq!(t.eval(get, &[s, 0]), 5);
        assert_eq!(t.eval(get, &[s, 1]), 0);
        assert_eq!(t.eval(get, &[s, 2]), 7);
        assert_eq!(t.eval(get, &[s, 3]), 0);
        let bmu = t.lookup("bmu").unwrap();
        assert_eq!(t.eval(bmu, &[s]), 1);
    }

    #[test]
    fn user_registration() {
        let mut t = PrimTable::standard();
        let id = t.register("double", 1, |a| a[0] * 2, vec![]).unwrap();
        assert_eq!(t.eval(id, &[21]), 42);
        assert!(t.register("double", 1, |a| a[0], vec![]).is_none());
    }
}
