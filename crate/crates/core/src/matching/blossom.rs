//! Maximum-weight matching on general graphs (Edmonds' blossom algorithm with
//! dual variables, O(n³)). Weights are integers; they are doubled internally so
//! every dual update stays integral.

#![allow(clippy::needless_range_loop)]

const NONE: isize = -1;

struct State<'a> {
    nvertex: usize,
    edges: &'a [(usize, usize, i64)],
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<isize>,
    label: Vec<u8>,
    labelend: Vec<isize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<isize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<isize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<isize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl State<'_> {
    fn slack(&self, k: usize) -> i64 {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * w
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![b];
        while let Some(t) = stack.pop() {
            if t < self.nvertex {
                out.push(t);
            } else {
                stack.extend(self.blossomchilds[t].iter().rev().copied());
            }
        }
        out
    }

    fn assign_label(&mut self, w: usize, t: u8, p: isize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let l = self.leaves(b);
            self.queue.extend(l);
        } else if t == 2 {
            let base = self.blossombase[b] as usize;
            let m = self.mate[base];
            debug_assert!(m >= 0);
            self.assign_label(self.endpoint[m as usize], 1, m ^ 1);
        }
    }

    /// Trace back from `v` and `w` to find a new blossom base, or `NONE` if
    /// the two paths reach different roots (augmenting path).
    fn scan_blossom(&mut self, mut v: isize, mut w: isize) -> isize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v as usize];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b] as usize] as isize;
                b = self.inblossom[v as usize];
                v = self.endpoint[self.labelend[b] as usize] as isize;
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slot");
        self.blossombase[b] = base as isize;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b as isize;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b as isize;
            path.push(bv);
            endps.push(self.labelend[bv] as usize);
            v = self.endpoint[self.labelend[bv] as usize];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b as isize;
            path.push(bw);
            endps.push((self.labelend[bw] ^ 1) as usize);
            w = self.endpoint[self.labelend[bw] as usize];
            bw = self.inblossom[w];
        }
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for leaf in self.leaves(b) {
            if self.label[self.inblossom[leaf]] == 2 {
                self.queue.push(leaf);
            }
            self.inblossom[leaf] = b;
        }
        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        for &sub in &path {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[sub].take() {
                Some(list) => vec![list],
                None => self.leaves(sub).iter().map(|&l| self.neighbend[l].iter().map(|p| p / 2).collect()).collect(),
            };
            for list in nblists {
                for k in list {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj] as usize))
                    {
                        bestedgeto[bj] = k as isize;
                    }
                    let _ = i;
                }
            }
            self.bestedge[sub] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NONE).map(|k| k as usize).collect();
        self.bestedge[b] = NONE;
        for &k in &list {
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b] as usize) {
                self.bestedge[b] = k as isize;
            }
        }
        self.blossombestedges[b] = Some(list);
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for leaf in self.leaves(s) {
                    self.inblossom[leaf] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let entrychild = self.inblossom[self.endpoint[(self.labelend[b] ^ 1) as usize]];
            let len = childs.len() as isize;
            let mut j = childs.iter().position(|&c| c == entrychild).expect("entry child") as isize;
            let (jstep, endptrick): (isize, isize) = if j & 1 != 0 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let at = |j: isize| -> usize { j.rem_euclid(len) as usize };
            let endps = self.blossomendps[b].clone();
            let mut p = self.labelend[b];
            while j != 0 {
                let q = endps[at(j - endptrick)] as isize ^ endptrick ^ 1;
                self.label[self.endpoint[(p ^ 1) as usize]] = 0;
                self.label[self.endpoint[q as usize]] = 0;
                self.assign_label(self.endpoint[(p ^ 1) as usize], 2, p);
                self.allowedge[endps[at(j - endptrick)] / 2] = true;
                j += jstep;
                p = endps[at(j - endptrick)] as isize ^ endptrick;
                self.allowedge[(p / 2) as usize] = true;
                j += jstep;
            }
            let bv = childs[at(j)];
            let e = self.endpoint[(p ^ 1) as usize];
            self.label[e] = 2;
            self.label[bv] = 2;
            self.labelend[e] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[at(j)] != entrychild {
                let bv = childs[at(j)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                if let Some(v) = self.leaves(bv).into_iter().find(|&v| self.label[v] != 0) {
                    self.label[v] = 0;
                    let m = self.mate[self.blossombase[bv] as usize];
                    self.label[self.endpoint[m as usize]] = 0;
                    self.assign_label(v, 2, self.labelend[v]);
                }
                j += jstep;
            }
        }
        self.label[b] = u8::MAX;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b as isize {
            t = self.blossomparent[t] as usize;
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len() as isize;
        let i = self.blossomchilds[b].iter().position(|&c| c == t).expect("child") as isize;
        let mut j = i;
        let (jstep, endptrick): (isize, isize) = if i & 1 != 0 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        let at = |j: isize| -> usize { j.rem_euclid(len) as usize };
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][at(j)];
            let p = self.blossomendps[b][at(j - endptrick)] as isize ^ endptrick;
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p as usize]);
            }
            j += jstep;
            let t = self.blossomchilds[b][at(j)];
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[(p ^ 1) as usize]);
            }
            self.mate[self.endpoint[p as usize]] = p ^ 1;
            self.mate[self.endpoint[(p ^ 1) as usize]] = p;
        }
        self.blossomchilds[b].rotate_left(i as usize);
        self.blossomendps[b].rotate_left(i as usize);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v as isize);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p as isize;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs] as usize];
                let bt = self.inblossom[t];
                s = self.endpoint[self.labelend[bt] as usize];
                let j = self.endpoint[(self.labelend[bt] ^ 1) as usize];
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = (self.labelend[bt] ^ 1) as usize;
            }
        }
    }
}

/// Maximum-weight (not necessarily perfect) matching. Returns `mate[v]`, the
/// vertex matched to `v`, or `None`.
pub fn max_weight_matching(nvertex: usize, edges: &[(usize, usize, i64)]) -> Vec<Option<usize>> {
    if edges.is_empty() || nvertex == 0 {
        return vec![None; nvertex];
    }
    let doubled: Vec<(usize, usize, i64)> = edges.iter().map(|&(i, j, w)| (i, j, 2 * w)).collect();
    let edges = &doubled[..];
    let nedge = edges.len();
    let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
    let endpoint: Vec<usize> = (0..2 * nedge).map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 }).collect();
    let mut neighbend = vec![Vec::new(); nvertex];
    for (k, &(i, j, _)) in edges.iter().enumerate() {
        neighbend[i].push(2 * k + 1);
        neighbend[j].push(2 * k);
    }
    let mut st = State {
        nvertex,
        edges,
        endpoint,
        neighbend,
        mate: vec![NONE; nvertex],
        label: vec![0; 2 * nvertex],
        labelend: vec![NONE; 2 * nvertex],
        inblossom: (0..nvertex).collect(),
        blossomparent: vec![NONE; 2 * nvertex],
        blossomchilds: vec![Vec::new(); 2 * nvertex],
        blossombase: (0..nvertex as isize).chain(std::iter::repeat_n(NONE, nvertex)).collect(),
        blossomendps: vec![Vec::new(); 2 * nvertex],
        bestedge: vec![NONE; 2 * nvertex],
        blossombestedges: vec![None; 2 * nvertex],
        unusedblossoms: (nvertex..2 * nvertex).collect(),
        dualvar: std::iter::repeat_n(maxweight, nvertex).chain(std::iter::repeat_n(0, nvertex)).collect(),
        allowedge: vec![false; nedge],
        queue: Vec::new(),
    };

    for _ in 0..nvertex {
        st.label.iter_mut().for_each(|l| *l = 0);
        st.bestedge.iter_mut().for_each(|b| *b = NONE);
        for b in nvertex..2 * nvertex {
            st.blossombestedges[b] = None;
        }
        st.allowedge.iter_mut().for_each(|a| *a = false);
        st.queue.clear();
        for v in 0..nvertex {
            if st.mate[v] == NONE && st.label[st.inblossom[v]] == 0 {
                st.assign_label(v, 1, NONE);
            }
        }
        let mut augmented = false;
        loop {
            while !augmented {
                let Some(v) = st.queue.pop() else { break };
                let nb = st.neighbend[v].clone();
                for p in nb {
                    let k = p / 2;
                    let w = st.endpoint[p];
                    if st.inblossom[v] == st.inblossom[w] {
                        continue;
                    }
                    let mut kslack = 0;
                    if !st.allowedge[k] {
                        kslack = st.slack(k);
                        if kslack <= 0 {
                            st.allowedge[k] = true;
                        }
                    }
                    if st.allowedge[k] {
                        if st.label[st.inblossom[w]] == 0 {
                            st.assign_label(w, 2, (p ^ 1) as isize);
                        } else if st.label[st.inblossom[w]] == 1 {
                            let base = st.scan_blossom(v as isize, w as isize);
                            if base >= 0 {
                                st.add_blossom(base as usize, k);
                            } else {
                                st.augment_matching(k);
                                augmented = true;
                                break;
                            }
                        } else if st.label[w] == 0 {
                            st.label[w] = 2;
                            st.labelend[w] = (p ^ 1) as isize;
                        }
                    } else if st.label[st.inblossom[w]] == 1 {
                        let b = st.inblossom[v];
                        if st.bestedge[b] == NONE || kslack < st.slack(st.bestedge[b] as usize) {
                            st.bestedge[b] = k as isize;
                        }
                    } else if st.label[w] == 0 && (st.bestedge[w] == NONE || kslack < st.slack(st.bestedge[w] as usize)) {
                        st.bestedge[w] = k as isize;
                    }
                }
            }
            if augmented {
                break;
            }
            // Dual update.
            let mut deltatype = 1;
            let mut delta = st.dualvar[..nvertex].iter().copied().min().unwrap_or(0);
            let mut deltaedge = 0usize;
            let mut deltablossom = 0usize;
            for v in 0..nvertex {
                if st.label[st.inblossom[v]] == 0 && st.bestedge[v] != NONE {
                    let d = st.slack(st.bestedge[v] as usize);
                    if d < delta {
                        delta = d;
                        deltatype = 2;
                        deltaedge = st.bestedge[v] as usize;
                    }
                }
            }
            for b in 0..2 * nvertex {
                if st.blossomparent[b] == NONE && st.label[b] == 1 && st.bestedge[b] != NONE {
                    let d = st.slack(st.bestedge[b] as usize) / 2;
                    if d < delta {
                        delta = d;
                        deltatype = 3;
                        deltaedge = st.bestedge[b] as usize;
                    }
                }
            }
            for b in nvertex..2 * nvertex {
                if st.blossombase[b] >= 0 && st.blossomparent[b] == NONE && st.label[b] == 2 && st.dualvar[b] < delta {
                    delta = st.dualvar[b];
                    deltatype = 4;
                    deltablossom = b;
                }
            }
            for v in 0..nvertex {
                match st.label[st.inblossom[v]] {
                    1 => st.dualvar[v] -= delta,
                    2 => st.dualvar[v] += delta,
                    _ => {}
                }
            }
            for b in nvertex..2 * nvertex {
                if st.blossombase[b] >= 0 && st.blossomparent[b] == NONE {
                    match st.label[b] {
                        1 => st.dualvar[b] += delta,
                        2 => st.dualvar[b] -= delta,
                        _ => {}
                    }
                }
            }
            match deltatype {
                1 => break,
                2 => {
                    st.allowedge[deltaedge] = true;
                    let (mut i, j, _) = edges[deltaedge];
                    if st.label[st.inblossom[i]] == 0 {
                        i = j;
                    }
                    st.queue.push(i);
                }
                3 => {
                    st.allowedge[deltaedge] = true;
                    st.queue.push(edges[deltaedge].0);
                }
                _ => st.expand_blossom(deltablossom, false),
            }
        }
        if !augmented {
            break;
        }
        for b in nvertex..2 * nvertex {
            if st.blossomparent[b] == NONE && st.blossombase[b] >= 0 && st.label[b] == 1 && st.dualvar[b] == 0 {
                st.expand_blossom(b, true);
            }
        }
    }
    st.mate.iter().map(|&m| if m >= 0 { Some(st.endpoint[m as usize]) } else { None }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn weight(edges: &[(usize, usize, i64)], mate: &[Option<usize>]) -> i64 {
        edges.iter().filter(|&&(i, j, _)| mate[i] == Some(j)).map(|e| e.2).sum()
    }

    /// Exhaustive maximum over matchings, used as the reference.
    fn brute(n: usize, edges: &[(usize, usize, i64)]) -> i64 {
        fn go(v: usize, n: usize, used: &mut Vec<bool>, w: &[Vec<Option<i64>>]) -> i64 {
            if v == n {
                return 0;
            }
            if used[v] {
                return go(v + 1, n, used, w);
            }
            used[v] = true;
            let mut best = go(v + 1, n, used, w);
            for u in v + 1..n {
                if !used[u] {
                    if let Some(x) = w[v][u] {
                        used[u] = true;
                        best = best.max(x + go(v + 1, n, used, w));
                        used[u] = false;
                    }
                }
            }
            used[v] = false;
            best
        }
        let mut w = vec![vec![None; n]; n];
        for &(i, j, x) in edges {
            let cur: Option<i64> = w[i][j];
            let best = cur.map_or(x, |c| c.max(x));
            w[i][j] = Some(best);
            w[j][i] = Some(best);
        }
        go(0, n, &mut vec![false; n], &w)
    }

    #[test]
    fn small_cases() {
        assert_eq!(max_weight_matching(2, &[(0, 1, 1)]), vec![Some(1), Some(0)]);
        let m = max_weight_matching(4, &[(0, 1, 5), (1, 2, 11), (2, 3, 5)]);
        assert_eq!(m, vec![None, Some(2), Some(1), None]);
        // Classic blossom instance.
        let e = [(0, 1, 8), (0, 2, 9), (1, 2, 10), (2, 3, 7)];
        let m = max_weight_matching(4, &e);
        assert_eq!(m, vec![Some(1), Some(0), Some(3), Some(2)]);
        // Nested blossom with expansion.
        let e = [(0, 1, 9), (0, 2, 9), (1, 2, 10), (1, 3, 8), (2, 4, 8), (3, 4, 10), (4, 5, 6)];
        let m = max_weight_matching(6, &e);
        assert_eq!(weight(&e, &m), brute(6, &e));
    }

    proptest! {
        #[test]
        fn matches_exhaustive_search(
            n in 2usize..9,
            raw in proptest::collection::vec((0usize..9, 0usize..9, 0i64..40), 1..25),
        ) {
            let edges: Vec<_> = raw.into_iter().map(|(i, j, w)| (i % n, j % n, w)).filter(|(i, j, _)| i != j).collect();
            let mate = max_weight_matching(n, &edges);
            for v in 0..n {
                if let Some(u) = mate[v] {
                    prop_assert_eq!(mate[u], Some(v));
                }
            }
            // Weight from the best edge per matched pair.
            let mut best = std::collections::HashMap::new();
            for &(i, j, w) in &edges {
                let key = (i.min(j), i.max(j));
                let e = best.entry(key).or_insert(w);
                *e = (*e).max(w);
            }
            let got: i64 = (0..n).filter_map(|v| mate[v].filter(|&u| u > v).map(|u| best[&(v, u)])).sum();
            prop_assert_eq!(got, brute(n, &edges));
        }
    }
}
