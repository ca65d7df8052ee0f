//! Independent oracles shared by integration tests.

use std::collections::HashMap;

use interalign::schubert::Partition;

pub fn all_partitions(n: usize) -> Vec<Partition> {
    Partition::of_size(n, n, n)
}

/// `h_k` times a combination, by adding horizontal strips.
fn pieri(terms: &HashMap<Vec<usize>, i64>, k: usize) -> HashMap<Vec<usize>, i64> {
    fn strips(base: &[usize], row: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if row == base.len() + 1 {
            if left == 0 {
                let mut p = cur.clone();
                while p.last() == Some(&0) {
                    p.pop();
                }
                out.push(p);
            }
            return;
        }
        let old = base.get(row).copied().unwrap_or(0);
        // A horizontal strip never grows a row past the old row above it.
        let cap = if row == 0 { old + left } else { base[row - 1].min(old + left) };
        for new in old..=cap {
            cur.push(new);
            strips(base, row + 1, left - (new - old), cur, out);
            cur.pop();
        }
    }
    let mut out = HashMap::new();
    for (lam, c) in terms {
        let mut grown = Vec::new();
        strips(lam, 0, k, &mut Vec::new(), &mut grown);
        for g in grown {
            *out.entry(g).or_insert(0) += c;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(items: &mut Vec<usize>, k: usize, sign: i64, out: &mut Vec<(Vec<usize>, i64)>) {
        if k == items.len() {
            out.push((items.clone(), sign));
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            rec(items, k + 1, if i == k { sign } else { -sign }, out);
            items.swap(k, i);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), 0, 1, &mut out);
    out
}

/// `s_λ s_μ` with `s_μ = det(h_{μ_i - i + j})` expanded over permutations and
/// each `h` applied by the Pieri rule.
pub fn product_by_pieri(lambda: &Partition, mu: &Partition) -> HashMap<Vec<usize>, i64> {
    let l = mu.len();
    let mut total: HashMap<Vec<usize>, i64> = HashMap::new();
    for (sigma, sign) in permutations(l) {
        let degrees: Option<Vec<usize>> = (0..l)
            .map(|i| {
                let v = mu.part(i) as i64 - i as i64 + sigma[i] as i64;
                (v >= 0).then_some(v as usize)
            })
            .collect();
        let Some(degrees) = degrees else { continue };
        let mut terms = HashMap::from([(lambda.parts().to_vec(), sign)]);
        for k in degrees {
            terms = pieri(&terms, k);
        }
        for (p, c) in terms {
            *total.entry(p).or_insert(0) += c;
        }
    }
    total.retain(|_, c| *c != 0);
    total
}
