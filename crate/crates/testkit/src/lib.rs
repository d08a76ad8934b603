//! Brute-force reference computations for tests.
//!
//! Everything here works on plain `Vec<Vec<f64>>` weight matrices and avoids
//! eigendecompositions, so it stays independent of the code under test.

#![allow(clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Matrix = Vec<Vec<f64>>;

pub fn transpose(m: &Matrix) -> Matrix {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j]).collect())
        .collect()
}

pub fn laplacian(w: &Matrix) -> Matrix {
    let n = w.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { w[i].iter().sum() } else { -w[i][j] })
                .collect()
        })
        .collect()
}

/// Gaussian elimination with partial pivoting.
pub fn solve(mut a: Matrix, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        assert!(p.abs() > 1e-300, "singular system");
        for row in (col + 1)..n {
            let factor = a[row][col] / p;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Mean-zero solution of `L x = b` for `b` summing to zero, found by
/// grounding the last node and solving the reduced system.
pub fn grounded_potential(w: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = w.len();
    let l = laplacian(w);
    let reduced: Matrix = (0..n - 1).map(|i| l[i][..n - 1].to_vec()).collect();
    let mut x = solve(reduced, b[..n - 1].to_vec());
    x.push(0.0);
    let mean = x.iter().sum::<f64>() / n as f64;
    x.iter().map(|v| v - mean).collect()
}

/// Effective resistance from one grounded linear solve.
pub fn resistance(w: &Matrix, u: usize, v: usize) -> f64 {
    if u == v {
        return 0.0;
    }
    let mut b = vec![0.0; w.len()];
    b[u] = 1.0;
    b[v] = -1.0;
    let x = grounded_potential(w, &b);
    x[u] - x[v]
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.parent[x];
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.parent[x] = root;
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Components of the underlying undirected graph (nonzero in either direction).
pub fn component_count(w: &Matrix) -> usize {
    let n = w.len();
    let mut uf = UnionFind {
        parent: (0..n).collect(),
    };
    for i in 0..n {
        for j in 0..n {
            if w[i][j] != 0.0 {
                uf.union(i, j);
            }
        }
    }
    (0..n).filter(|&i| uf.find(i) == i).count()
}

/// Kahn's algorithm on the directed graph `i -> j` for `w[i][j] != 0`.
pub fn is_acyclic(w: &Matrix) -> bool {
    let n = w.len();
    let mut indegree: Vec<usize> = (0..n)
        .map(|j| (0..n).filter(|&i| w[i][j] != 0.0).count())
        .collect();
    let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(u) = queue.pop() {
        seen += 1;
        for v in 0..n {
            if w[u][v] != 0.0 {
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    queue.push(v);
                }
            }
        }
    }
    seen == n
}

/// Minimum cut ratio over every proper non-empty subset, boundary computed
/// from scratch. `min_side` selects `min(|S|, |V\S|)` as the denominator,
/// otherwise `|S|`.
pub fn brute_cheeger(w: &Matrix, min_side: bool) -> f64 {
    let n = w.len();
    let mut best = f64::INFINITY;
    for mask in 1u64..((1u64 << n) - 1) {
        let inside = |i: usize| mask >> i & 1 == 1;
        let mut boundary = 0.0;
        for i in (0..n).filter(|&i| inside(i)) {
            for j in (0..n).filter(|&j| !inside(j)) {
                boundary += w[i][j];
            }
        }
        let size = mask.count_ones() as f64;
        let denom = if min_side {
            size.min(n as f64 - size)
        } else {
            size
        };
        best = best.min(boundary / denom);
    }
    best
}

/// `|flow_e| / w_e` on every edge of a tree carrying injections `omega`:
/// the flow across an edge is the injection total on one side of it.
pub fn tree_edge_loads(w: &Matrix, omega: &[f64]) -> Vec<f64> {
    let n = w.len();
    let mut loads = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if w[u][v] == 0.0 {
                continue;
            }
            // Nodes reachable from u without crossing (u, v).
            let mut side = vec![false; n];
            side[u] = true;
            let mut stack = vec![u];
            while let Some(a) = stack.pop() {
                for b in 0..n {
                    if w[a][b] != 0.0 && !side[b] && !(a == u && b == v) {
                        side[b] = true;
                        stack.push(b);
                    }
                }
            }
            let flow: f64 = (0..n).filter(|&i| side[i]).map(|i| omega[i]).sum();
            loads.push(flow.abs() / w[u][v]);
        }
    }
    loads
}

/// Connected undirected `G(n, p)` by rejection. Weights are 1, or uniform in
/// `[0.5, 1.5]` when `weighted`.
pub fn random_connected(n: usize, p: f64, seed: u64, weighted: bool) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    let x = if weighted {
                        rng.random_range(0.5..1.5)
                    } else {
                        1.0
                    };
                    w[i][j] = x;
                    w[j][i] = x;
                }
            }
        }
        if component_count(&w) == 1 {
            return w;
        }
    }
}

/// Validates DOT text against the grammar subset `graph|digraph ID { stmt* }`
/// where each statement is a node statement or an edge chain, optionally with
/// an attribute list, terminated by `;`.
pub fn check_dot(text: &str) -> Result<(), String> {
    let tokens = dot_tokens(text)?;
    let mut p = DotParser {
        tokens,
        pos: 0,
        directed: false,
    };
    p.graph()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Str,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Comma,
    Semi,
    Edge(bool),
}

fn dot_tokens(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '{' => {
                out.push(Tok::LBrace);
                i += 1
            }
            '}' => {
                out.push(Tok::RBrace);
                i += 1
            }
            '[' => {
                out.push(Tok::LBracket);
                i += 1
            }
            ']' => {
                out.push(Tok::RBracket);
                i += 1
            }
            '=' => {
                out.push(Tok::Eq);
                i += 1
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1
            }
            ';' => {
                out.push(Tok::Semi);
                i += 1
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                out.push(Tok::Edge(false));
                i += 2
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Tok::Edge(true));
                i += 2
            }
            '"' => {
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated string".into()),
                        Some('\\') => i += 2,
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some(_) => i += 1,
                    }
                }
                out.push(Tok::Str);
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.')
                {
                    i += 1;
                }
                if i == start {
                    return Err(format!("bad character {c:?}"));
                }
                out.push(Tok::Id(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

struct DotParser {
    tokens: Vec<Tok>,
    pos: usize,
    directed: bool,
}

impl DotParser {
    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expect(&mut self, t: Tok) -> Result<(), String> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(format!(
                "expected {t:?}, got {got:?} at token {}",
                self.pos - 1
            )),
        }
    }

    fn id(&mut self) -> Result<(), String> {
        match self.next() {
            Some(Tok::Id(_)) | Some(Tok::Str) => Ok(()),
            got => Err(format!("expected identifier, got {got:?}")),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        match self.next() {
            Some(Tok::Id(k)) if k == "graph" => self.directed = false,
            Some(Tok::Id(k)) if k == "digraph" => self.directed = true,
            got => return Err(format!("expected graph keyword, got {got:?}")),
        }
        if matches!(self.peek(), Some(Tok::Id(_)) | Some(Tok::Str)) {
            self.id()?;
        }
        self.expect(Tok::LBrace)?;
        while self.peek() != Some(&Tok::RBrace) {
            self.stmt()?;
        }
        self.expect(Tok::RBrace)?;
        if self.pos != self.tokens.len() {
            return Err("trailing tokens after graph body".into());
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), String> {
        self.id()?;
        while let Some(Tok::Edge(directed)) = self.peek().cloned() {
            if directed != self.directed {
                return Err("edge operator does not match graph kind".into());
            }
            self.pos += 1;
            self.id()?;
        }
        if self.peek() == Some(&Tok::LBracket) {
            self.attrs()?;
        }
        self.expect(Tok::Semi)
    }

    fn attrs(&mut self) -> Result<(), String> {
        self.expect(Tok::LBracket)?;
        loop {
            self.id()?;
            self.expect(Tok::Eq)?;
            self.id()?;
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBracket) => return Ok(()),
                got => return Err(format!("expected , or ], got {got:?}")),
            }
        }
    }
}
