//! Positive normal form: push negations down to the predicates, then remove
//! them by flipping the sign of the corresponding output rows.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::{append_row, Formula, Interval, OutputMap, RowOrigin};

/// Negation-normal intermediate form where negation only sits on predicates.
enum Nnf {
    Lit(usize, bool),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    Eventually(Interval, Box<Nnf>),
    Always(Interval, Box<Nnf>),
    Until(Interval, Box<Nnf>, Box<Nnf>),
    Release(Interval, Box<Nnf>, Box<Nnf>),
}

fn push(f: &Formula, neg: bool) -> Nnf {
    let boxed = |g: &Formula, n: bool| Box::new(push(g, n));
    match f {
        Formula::Predicate(i) => Nnf::Lit(*i, neg),
        Formula::Not(g) => push(g, !neg),
        Formula::And(gs) => {
            let cs = gs.iter().map(|g| push(g, neg)).collect();
            if neg { Nnf::Or(cs) } else { Nnf::And(cs) }
        }
        Formula::Or(gs) => {
            let cs = gs.iter().map(|g| push(g, neg)).collect();
            if neg { Nnf::And(cs) } else { Nnf::Or(cs) }
        }
        Formula::Eventually(i, g) if neg => Nnf::Always(*i, boxed(g, true)),
        Formula::Eventually(i, g) => Nnf::Eventually(*i, boxed(g, false)),
        Formula::Always(i, g) if neg => Nnf::Eventually(*i, boxed(g, true)),
        Formula::Always(i, g) => Nnf::Always(*i, boxed(g, false)),
        Formula::Until(i, l, r) if neg => Nnf::Release(*i, boxed(l, true), boxed(r, true)),
        Formula::Until(i, l, r) => Nnf::Until(*i, boxed(l, false), boxed(r, false)),
        Formula::Release(i, l, r) if neg => Nnf::Until(*i, boxed(l, true), boxed(r, true)),
        Formula::Release(i, l, r) => Nnf::Release(*i, boxed(l, false), boxed(r, false)),
    }
}

fn literals(n: &Nnf, out: &mut impl FnMut(usize, bool)) {
    match n {
        Nnf::Lit(i, neg) => out(*i, *neg),
        Nnf::And(cs) | Nnf::Or(cs) => cs.iter().for_each(|c| literals(c, out)),
        Nnf::Eventually(_, g) | Nnf::Always(_, g) => literals(g, out),
        Nnf::Until(_, l, r) | Nnf::Release(_, l, r) => {
            literals(l, out);
            literals(r, out);
        }
    }
}

fn rebuild(n: Nnf, rename: &[Option<usize>], flipped: &[bool]) -> Formula {
    let go = |g: Box<Nnf>| rebuild(*g, rename, flipped);
    match n {
        Nnf::Lit(i, neg) => {
            if neg && !flipped[i] {
                Formula::Predicate(rename[i].expect("negated predicate has a row"))
            } else {
                Formula::Predicate(i)
            }
        }
        Nnf::And(cs) => Formula::and(cs.into_iter().map(|c| rebuild(c, rename, flipped)).collect()),
        Nnf::Or(cs) => Formula::or(cs.into_iter().map(|c| rebuild(c, rename, flipped)).collect()),
        Nnf::Eventually(i, g) => Formula::Eventually(i, Box::new(go(g))),
        Nnf::Always(i, g) => Formula::Always(i, Box::new(go(g))),
        Nnf::Until(i, l, r) => Formula::Until(i, Box::new(go(l)), Box::new(go(r))),
        Nnf::Release(i, l, r) => Formula::Release(i, Box::new(go(l)), Box::new(go(r))),
    }
}

/// Rewrites `f` into a negation-free formula over a possibly extended output
/// map.
///
/// A predicate that only occurs negated has its row negated in place; one
/// that occurs both ways gets a new row `-c_i, -d_i, -e_i` appended. Release
/// nodes are kept (they are monotone), negated until becomes release of the
/// negated operands and vice versa.
pub fn to_pnf(f: &Formula, map: &OutputMap) -> (Formula, OutputMap) {
    let nnf = push(f, false);
    let rows = map.rows().max(f.predicate_count());
    let mut pos = vec![false; rows];
    let mut neg = vec![false; rows];
    literals(&nnf, &mut |i, n| if n { neg[i] = true } else { pos[i] = true });

    let mut out = map.clone();
    let mut rename = vec![None; rows];
    let mut flipped = vec![false; rows];
    for i in 0..rows {
        if !neg[i] {
            continue;
        }
        assert!(i < map.rows(), "formula references predicate p{} beyond the output map", i + 1);
        let crow: Vec<f64> = map.c.row(i).iter().map(|v| -v).collect();
        let drow: Vec<f64> = map.d.row(i).iter().map(|v| -v).collect();
        let origin = match map.origin[i] {
            RowOrigin::Original(k) => RowOrigin::Negated(k),
            RowOrigin::Negated(k) => RowOrigin::Original(k),
        };
        if pos[i] {
            out.c = append_row(&out.c, &crow);
            out.d = append_row(&out.d, &drow);
            out.e.push(-map.e[i]);
            out.origin.push(origin);
            rename[i] = Some(out.rows() - 1);
        } else {
            out.c.row_mut(i).copy_from_slice(&crow);
            out.d.row_mut(i).copy_from_slice(&drow);
            out.e[i] = -map.e[i];
            out.origin[i] = origin;
            flipped[i] = true;
        }
    }
    (rebuild(nnf, &rename, &flipped), out)
}
