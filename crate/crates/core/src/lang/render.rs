//! Converts canonical DFAs back to regular expressions by state elimination.
//! Used only for display; the output is correct but not necessarily minimal.

use super::dfa::CanonDfa;
use super::Alphabet;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Re {
    Eps,
    Sym(String),
    Cat(Vec<Re>),
    Alt(Vec<Re>),
    Star(Box<Re>),
}

fn cat(a: Re, b: Re) -> Re {
    match (a, b) {
        (Re::Eps, x) | (x, Re::Eps) => x,
        (Re::Cat(mut xs), Re::Cat(ys)) => {
            xs.extend(ys);
            Re::Cat(xs)
        }
        (Re::Cat(mut xs), y) => {
            xs.push(y);
            Re::Cat(xs)
        }
        (x, Re::Cat(mut ys)) => {
            ys.insert(0, x);
            Re::Cat(ys)
        }
        (x, y) => Re::Cat(vec![x, y]),
    }
}

fn alt(a: Option<Re>, b: Option<Re>) -> Option<Re> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            let mut items = Vec::new();
            for r in [a, b] {
                match r {
                    Re::Alt(xs) => items.extend(xs),
                    r => items.push(r),
                }
            }
            let mut dedup: Vec<Re> = Vec::new();
            for r in items {
                if !dedup.contains(&r) {
                    dedup.push(r);
                }
            }
            if dedup.len() == 1 {
                dedup.pop()
            } else {
                Some(Re::Alt(dedup))
            }
        }
    }
}

fn star(a: Re) -> Re {
    match a {
        Re::Eps => Re::Eps,
        s @ Re::Star(_) => s,
        a => Re::Star(Box::new(a)),
    }
}

fn render(r: &Re, prec: u8, out: &mut String) {
    match r {
        Re::Eps => out.push_str("()"),
        Re::Sym(s) => out.push_str(s),
        Re::Alt(xs) => {
            let has_eps = xs.contains(&Re::Eps);
            let rest: Vec<&Re> = xs.iter().filter(|x| **x != Re::Eps).collect();
            if has_eps {
                // optional parts keep the explicit empty word
                out.push('(');
                out.push_str("()");
                for x in rest {
                    out.push('|');
                    render(x, 0, out);
                }
                out.push(')');
                return;
            }
            if prec > 0 {
                out.push('(');
            }
            for (i, x) in rest.iter().enumerate() {
                if i > 0 {
                    out.push('|');
                }
                render(x, 0, out);
            }
            if prec > 0 {
                out.push(')');
            }
        }
        Re::Cat(xs) => {
            // x.x* is printed as x+
            if prec > 1 {
                out.push('(');
            }
            let mut i = 0;
            let mut first = true;
            while i < xs.len() {
                if !first {
                    out.push('.');
                }
                first = false;
                if i + 1 < xs.len() && xs[i + 1] == Re::Star(Box::new(xs[i].clone())) {
                    render(&xs[i], 2, out);
                    out.push('+');
                    i += 2;
                } else {
                    render(&xs[i], 1, out);
                    i += 1;
                }
            }
            if prec > 1 {
                out.push(')');
            }
        }
        Re::Star(x) => {
            render(x, 2, out);
            out.push('*');
        }
    }
}

pub(crate) fn to_regex(dfa: &CanonDfa, alphabet: &Alphabet) -> String {
    if dfa.is_empty() {
        return "{}".to_string();
    }
    let n = dfa.num_states();
    // Generalized NFA: states 0..n, start = n, accept = n + 1.
    let size = n + 2;
    let mut g: Vec<Vec<Option<Re>>> = vec![vec![None; size]; size];
    g[n][0] = Some(Re::Eps);
    for q in 0..n as u32 {
        if dfa.is_final(q) {
            g[q as usize][n + 1] = Some(Re::Eps);
        }
        for (f, t) in dfa.edges(q) {
            let sym = Re::Sym(alphabet.name(f).to_string());
            let cur = g[q as usize][t as usize].take();
            g[q as usize][t as usize] = alt(cur, Some(sym));
        }
    }
    for k in 0..n {
        let self_loop = g[k][k].take().map(star).unwrap_or(Re::Eps);
        let ins: Vec<usize> = (0..size).filter(|&i| i != k && g[i][k].is_some()).collect();
        let outs: Vec<usize> = (0..size).filter(|&j| j != k && g[k][j].is_some()).collect();
        for &i in &ins {
            for &j in &outs {
                let path = cat(
                    cat(g[i][k].clone().unwrap(), self_loop.clone()),
                    g[k][j].clone().unwrap(),
                );
                let cur = g[i][j].take();
                g[i][j] = alt(cur, Some(path));
            }
        }
        for row in g.iter_mut() {
            row[k] = None;
        }
        for cell in g[k].iter_mut() {
            *cell = None;
        }
    }
    let mut out = String::new();
    render(
        g[n][n + 1].as_ref().expect("non-empty language"),
        0,
        &mut out,
    );
    out
}
