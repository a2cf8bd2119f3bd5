use super::element::FieldElement;
use super::symbol::Symbol;

/// Rank of a matrix over the field, by Gaussian elimination on exact
/// elements.
pub fn rank(mut rows: Vec<Vec<FieldElement>>) -> usize {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c).is_some_and(|x| !x.is_zero()))
        else {
            continue;
        };
        rows.swap(r, p);
        let pivot_inv = rows[r][c].inv().expect("pivot is nonzero");
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].mul(&pivot_inv);
            for j in c..cols {
                let t = factor.mul(&rows[r][j]);
                rows[i][j] = rows[i][j].sub(&t);
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Transcendence degree of `Q(xs)` over `Q`, computed as the rank of the
/// matrix of formal partials `d x_i / d s` over all transcendental symbols.
/// Valid in characteristic zero because every `v_e` is separable algebraic
/// over the symbols.
pub fn jacobian_trdeg(xs: &[FieldElement]) -> usize {
    let mut symbols: Vec<Symbol> = Vec::new();
    for x in xs {
        symbols.extend(x.symbols());
        for e in x.v_edges() {
            symbols.push(Symbol::u(e));
            symbols.push(Symbol::A(e.lo()));
            symbols.push(Symbol::A(e.hi()));
        }
    }
    symbols.sort();
    symbols.dedup();
    let rows = xs
        .iter()
        .map(|x| symbols.iter().map(|&s| x.partial(s)).collect())
        .collect();
    rank(rows)
}

/// The predicate B: `Q(x, y)` has transcendence degree below 2.
pub fn is_b(x: &FieldElement, y: &FieldElement) -> bool {
    jacobian_trdeg(&[x.clone(), y.clone()]) < 2
}
