//! DFA to regular expression by state elimination.

use super::regex::Regex;
use super::Dfa;

/// Converts a DFA back to a regular expression denoting the same language.
pub fn dfa_to_regex(d: &Dfa) -> Regex {
    let n = d.state_count;
    // nodes: 0 = virtual start, 1..=n = states, n + 1 = virtual end
    let size = n + 2;
    let mut m: Vec<Vec<Regex>> = vec![vec![Regex::Empty; size]; size];
    m[0][d.initial + 1] = Regex::Eps;
    for &f in &d.finals {
        m[f + 1][n + 1] = Regex::Eps;
    }
    for (q, row) in d.trans.iter().enumerate() {
        for (sym, &t) in row.iter().enumerate() {
            let lit = Regex::lit(d.alphabet.symbol(sym));
            let cur = std::mem::replace(&mut m[q + 1][t + 1], Regex::Empty);
            m[q + 1][t + 1] = Regex::union(cur, lit);
        }
    }
    for k in 1..=n {
        let loop_k = Regex::star(m[k][k].clone());
        let incoming: Vec<usize> = (0..size)
            .filter(|&i| i != k && m[i][k] != Regex::Empty)
            .collect();
        let outgoing: Vec<usize> = (0..size)
            .filter(|&j| j != k && m[k][j] != Regex::Empty)
            .collect();
        for &i in &incoming {
            for &j in &outgoing {
                let path = Regex::concat(
                    m[i][k].clone(),
                    Regex::concat(loop_k.clone(), m[k][j].clone()),
                );
                let cur = std::mem::replace(&mut m[i][j], Regex::Empty);
                m[i][j] = Regex::union(cur, path);
            }
        }
        for x in 0..size {
            m[x][k] = Regex::Empty;
            m[k][x] = Regex::Empty;
        }
    }
    m[0][n + 1].clone()
}
